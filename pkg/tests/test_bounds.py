"""
Tests for the closed-form bounds and the chain report.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dcov_bounds.core.bounds import (
    BoundReport,
    ChainLink,
    build_report,
    corollary1_bound,
    corollary2_bound,
    popoviciu_bound,
    theorem_bound,
)
from dcov_bounds.core.exceptions import (
    InvalidBoxError,
    SampleOutsideBoxError,
    SizeMismatchError,
)
from dcov_bounds.core.sample import BoundsBox, validate_sample

TOL = 1e-9

CHAIN_LINKS = {"lemma1", "lemma2", "lemma3", "theorem",
               "lemma2_x", "lemma2_y", "lemma3_x", "lemma3_y"}


class TestTheoremBound:
    """Test cases for theorem_bound and its corollaries."""

    def test_unit_scalars(self):
        """Test [0,1] x [0,1] gives 1/2."""
        unit = BoundsBox(0.0, 1.0, 1)

        assert theorem_bound(unit, unit) == 0.5
        assert corollary2_bound(unit, unit) == 0.5

    def test_mixed_dimensions(self):
        """Test N=4 on [0,2] against M=1 on [0,8]."""
        bound = theorem_bound(BoundsBox(0.0, 2.0, 4), BoundsBox(0.0, 8.0, 1))

        assert bound == pytest.approx(0.5 * math.sqrt(32.0))
        assert bound == pytest.approx(2.828427, abs=1e-6)

    def test_degenerate_box(self):
        """Test a single-point box gives zero."""
        assert theorem_bound(BoundsBox(3.0, 3.0, 2), BoundsBox(0.0, 1.0, 5)) == 0.0

    @pytest.mark.parametrize("n_dim, expected", [(1, 0.5), (4, 1.0), (9, 1.5)])
    def test_corollary1(self, n_dim, expected):
        """Test sqrt(N)/2."""
        assert corollary1_bound(n_dim) == expected

    @pytest.mark.parametrize("n_dim", [1, 2, 3, 7, 16])
    def test_corollary1_is_theorem_on_unit_boxes(self, n_dim):
        """Test the corollary equals the theorem for unit boxes of equal dimension."""
        box = BoundsBox(5.0, 6.0, n_dim)

        assert theorem_bound(box, box) == pytest.approx(corollary1_bound(n_dim), rel=1e-15)

    @pytest.mark.parametrize("n_dim", [0, -1, 2.5, True])
    def test_corollary1_invalid(self, n_dim):
        """Test non-positive or non-integer dimensions are rejected."""
        with pytest.raises(InvalidBoxError):
            corollary1_bound(n_dim)

    def test_corollary2_matches_theorem(self):
        """Test the scalar form against the general bound."""
        bx, by = BoundsBox(-1.0, 2.0, 1), BoundsBox(0.0, 5.0, 1)

        assert corollary2_bound(bx, by) == pytest.approx(theorem_bound(bx, by), rel=1e-15)

    def test_corollary2_needs_scalars(self):
        """Test vector boxes are rejected by the scalar bound."""
        with pytest.raises(InvalidBoxError):
            corollary2_bound(BoundsBox(0.0, 1.0, 2), BoundsBox(0.0, 1.0, 1))

    def test_monotone_in_width(self):
        """Test widening either box never lowers the bound."""
        by = BoundsBox(0.0, 1.0, 3)
        values = [theorem_bound(BoundsBox(0.0, w, 2), by) for w in (0.5, 1.0, 2.0, 4.0)]

        assert values == sorted(values)

    def test_monotone_in_dimension(self):
        """Test more components never lower the bound."""
        by = BoundsBox(0.0, 1.0, 1)
        values = [theorem_bound(BoundsBox(0.0, 1.0, n), by) for n in range(1, 10)]

        assert values == sorted(values)

    def test_symmetric(self):
        """Test swapping the two boxes."""
        bx, by = BoundsBox(0.0, 3.0, 2), BoundsBox(-1.0, 1.0, 7)

        assert theorem_bound(bx, by) == pytest.approx(theorem_bound(by, bx), rel=1e-15)


class TestPopoviciuBound:
    """Test cases for popoviciu_bound."""

    @pytest.mark.parametrize("box, expected", [
        (BoundsBox(0.0, 1.0, 1), 0.25),
        (BoundsBox(-1.0, 1.0, 3), 3.0),
        (BoundsBox(4.0, 4.0, 2), 0.0),
    ])
    def test_values(self, box, expected):
        """Test N (b-a)^2 / 4."""
        assert popoviciu_bound(box) == expected

    def test_square_root_composes_to_theorem(self):
        """Test the theorem bound is sqrt(sqrt(pop_x) sqrt(pop_y))."""
        bx, by = BoundsBox(0.0, 2.0, 4), BoundsBox(1.0, 9.0, 1)
        composed = math.sqrt(math.sqrt(popoviciu_bound(bx)) * math.sqrt(popoviciu_bound(by)))

        assert composed == pytest.approx(theorem_bound(bx, by), rel=1e-14)


class TestChainLink:
    """Test cases for ChainLink."""

    def test_holds_within_tolerance(self):
        """Test an excess below the tolerance still holds."""
        link = ChainLink("lemma1", 1.0 + 1e-12, 1.0)

        assert link.excess == pytest.approx(1e-12)
        assert link.holds(TOL)
        assert not link.holds(0.0)

    def test_to_dict(self):
        """Test the JSON form."""
        assert ChainLink("theorem", 0.25, 0.5).to_dict() == {
            "name": "theorem", "lhs": 0.25, "rhs": 0.5, "excess": -0.25,
        }


class TestBuildReport:
    """Test cases for build_report."""

    def setup_method(self):
        """Setup test fixtures."""
        self.unit = BoundsBox(0.0, 1.0, 1)
        self.two_points = validate_sample([[0.0], [1.0]])

    def test_two_point_hand_values(self):
        """Test the bound is attained by the two-point sample."""
        report = build_report(self.two_points, self.two_points, self.unit, self.unit)

        assert report.observed_dcov == pytest.approx(0.5, abs=1e-12)
        assert report.theorem_bound == 0.5
        assert report.tightness == pytest.approx(1.0, abs=1e-12)
        assert report.dcor == pytest.approx(1.0, abs=1e-12)
        assert report.passes(TOL)

    def test_link_names(self):
        """Test every chain link is reported, plus dcor when defined."""
        report = build_report(self.two_points, self.two_points, self.unit, self.unit)
        names = {link.name for link in report.links()}

        assert names == CHAIN_LINKS | {"dcor_at_most_one"}

    def test_constant_samples(self):
        """Test constant samples pass trivially with zero dcov."""
        x = validate_sample(np.full((5, 2), 0.5))
        y = validate_sample(np.full((5, 1), 0.2))
        report = build_report(x, y, BoundsBox(0.0, 1.0, 2), BoundsBox(0.0, 1.0, 1))

        assert report.observed_dcov == 0.0
        assert report.dcor is None
        assert {link.name for link in report.links()} == CHAIN_LINKS
        assert report.passes(TOL)

    def test_degenerate_box_has_no_tightness(self):
        """Test tightness is undefined when the bound is zero."""
        x = validate_sample(np.full((3, 1), 2.0))
        box = BoundsBox(2.0, 2.0, 1)
        report = build_report(x, x, box, box)

        assert report.theorem_bound == 0.0
        assert report.tightness is None
        assert report.passes(TOL)

    def test_outside_box(self):
        """Test a sample outside its declared box is rejected."""
        with pytest.raises(SampleOutsideBoxError):
            build_report(self.two_points, self.two_points, BoundsBox(0.0, 0.5, 1), self.unit)

    def test_size_mismatch(self):
        """Test differing row counts are rejected."""
        with pytest.raises(SizeMismatchError):
            build_report(self.two_points, validate_sample([[0.0]]), self.unit, self.unit)

    def test_dimension_mismatch(self):
        """Test a box dimension differing from its sample is rejected."""
        with pytest.raises(SizeMismatchError):
            build_report(self.two_points, self.two_points, BoundsBox(0.0, 1.0, 2), self.unit)

    def test_intermediate_values_ordered(self):
        """Test observed <= lemma1 <= lemma2 <= lemma3 = theorem on random data."""
        rng = np.random.default_rng(99)
        for _ in range(25):
            n = int(rng.integers(2, 60))
            x = validate_sample(rng.random((n, 2)))
            y = validate_sample(rng.random((n, 3)) * 4.0 - 2.0)
            report = build_report(x, y, BoundsBox(0.0, 1.0, 2), BoundsBox(-2.0, 2.0, 3))

            assert report.observed_dcov <= report.lemma1_rhs + TOL
            assert report.lemma1_rhs <= report.lemma2_rhs + TOL
            assert report.lemma2_rhs <= report.lemma3_rhs + TOL
            assert report.lemma3_rhs == pytest.approx(report.theorem_bound, rel=1e-12)
            assert report.failed_links(TOL) == []

    def test_independent_uniform_is_far_from_bound(self):
        """Test 200 independent uniform pairs stay well under half the bound."""
        for seed in range(10):
            rng = np.random.default_rng(seed)
            x = validate_sample(rng.random((200, 1)))
            y = validate_sample(rng.random((200, 1)))
            report = build_report(x, y, self.unit, self.unit)

            assert report.tightness < 0.5

    def test_to_dict_fields(self):
        """Test the JSON field names."""
        report = build_report(self.two_points, self.two_points, self.unit, self.unit)

        assert set(report.to_dict()) == {
            "n", "theorem_bound", "popoviciu_x", "popoviciu_y", "lemma2_x", "lemma2_y",
            "lemma1_rhs", "observed_dcov", "tightness", "dvar_x", "dvar_y", "dcor",
        }

    def test_report_is_frozen(self):
        """Test reports are immutable."""
        report = build_report(self.two_points, self.two_points, self.unit, self.unit)

        assert isinstance(report, BoundReport)
        with pytest.raises(Exception):
            report.n = 3


class TestChainProperty:
    """Property-based tests for the full chain."""

    @settings(max_examples=80, deadline=None)
    @given(
        st.integers(min_value=1, max_value=15),
        st.integers(min_value=1, max_value=4),
        st.integers(min_value=1, max_value=4),
        st.integers(min_value=0, max_value=2**32 - 1),
    )
    def test_chain_holds(self, n, dim_x, dim_y, seed):
        """Test every link holds for samples drawn inside their boxes."""
        rng = np.random.default_rng(seed)
        bx, by = BoundsBox(-1.0, 2.0, dim_x), BoundsBox(0.0, 0.5, dim_y)
        # Corners and interior points mixed
        x = np.where(rng.random((n, dim_x)) < 0.3,
                     rng.choice([bx.lo, bx.hi], size=(n, dim_x)),
                     bx.lo + bx.width * rng.random((n, dim_x)))
        y = by.lo + by.width * rng.random((n, dim_y))
        report = build_report(validate_sample(x), validate_sample(np.clip(y, by.lo, by.hi)),
                              bx, by)

        assert report.failed_links(TOL) == []
