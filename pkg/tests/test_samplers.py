"""
Tests for the seeded samplers.
"""

import math

import numpy as np
import pytest

from dcov_bounds.core.estimators import estimate
from dcov_bounds.core.exceptions import BadSpecError
from dcov_bounds.core.sample import BoundsBox
from dcov_bounds.core.samplers import (
    FAMILIES,
    STREAM_IDS,
    SamplerFamily,
    SamplerSpec,
    derive_seed,
    generate,
)

UNIT = BoundsBox(0.0, 1.0, 1)


def spec(family, box_x=UNIT, box_y=UNIT, n=50, seed=1, w=0.0):
    return SamplerSpec(family=family, box_x=box_x, box_y=box_y, n=n, seed=seed, w=w)


def assert_close(x, y, sigma, stddevs=4.0):
    assert x < y + sigma * stddevs
    assert y < x + sigma * stddevs


class TestSamplerSpec:
    """Test cases for SamplerSpec validation."""

    def test_default_id(self):
        """Test the generated identifier."""
        s = spec(SamplerFamily.MIXTURE, box_x=BoundsBox(0.0, 1.0, 2), n=10, w=0.5)

        assert s.spec_id == "mixture-2x1-n10"

    def test_family_from_string(self):
        """Test families may be given by value."""
        assert spec("constant").family is SamplerFamily.CONSTANT

    @pytest.mark.parametrize("kwargs", [
        {"family": "gaussian"},
        {"n": 0},
        {"n": 2.5},
        {"n": float("nan")},
        {"n": "10"},
        {"seed": -1},
        {"seed": 1.5},
        {"seed": 2**64},
        {"w": 1.5},
        {"w": -0.1},
    ])
    def test_invalid(self, kwargs):
        """Test malformed specs are rejected."""
        params = {"family": SamplerFamily.INDEPENDENT_UNIFORM, "n": 10, "seed": 0, "w": 0.0}
        params.update(kwargs)
        with pytest.raises(BadSpecError):
            SamplerSpec(box_x=UNIT, box_y=UNIT, **params)

    def test_integral_floats_become_ints(self):
        """Test whole-valued float sizes and seeds are stored as ints."""
        s = spec(SamplerFamily.INDEPENDENT_UNIFORM, n=12.0, seed=3.0)
        x, _ = generate(s)

        assert type(s.n) is int and type(s.seed) is int
        assert s.spec_id == "independent_uniform-1x1-n12"
        assert x.n == 12

    def test_dict_round_trip(self):
        """Test to_dict and from_dict agree."""
        s = spec(SamplerFamily.MIXTURE, box_y=BoundsBox(-2.0, 2.0, 3), w=0.25)

        assert SamplerSpec.from_dict(s.to_dict()) == s

    @pytest.mark.parametrize("data", [
        {"family": "mixture"},
        {"family": "mixture", "box_x": {"lo": 0, "hi": 1, "dim": 1},
         "box_y": {"lo": 1, "hi": 0, "dim": 1}, "n": 5, "seed": 0},
        {"family": "mixture", "box_x": {"lo": 0, "hi": 1, "dim": 1},
         "box_y": {"lo": 0, "hi": 1, "dim": 1}, "n": 5, "seed": "abc"},
        {"family": "mixture", "box_x": {"lo": 0, "hi": 1},
         "box_y": {"lo": 0, "hi": 1, "dim": 1}, "n": 5, "seed": 0},
    ])
    def test_from_dict_invalid(self, data):
        """Test missing or malformed fields raise BadSpecError."""
        with pytest.raises(BadSpecError):
            SamplerSpec.from_dict(data)

    def test_bernoulli_needs_equal_dims(self):
        """Test the corner family refuses mismatched dimensions."""
        s = spec(SamplerFamily.BERNOULLI_CORNERS, box_x=BoundsBox(0.0, 1.0, 2))

        with pytest.raises(BadSpecError):
            generate(s)


class TestDeriveSeed:
    """Test cases for derive_seed."""

    def test_deterministic(self):
        """Test the same inputs give the same seed."""
        assert derive_seed(42, 3) == derive_seed(42, 3)

    def test_distinct_children(self):
        """Test distinct indices and parents give distinct seeds."""
        seeds = {derive_seed(parent, index) for parent in range(5) for index in range(50)}

        assert len(seeds) == 250

    def test_uint64_range(self):
        """Test seeds fit an unsigned 64-bit integer."""
        for index in range(20):
            assert 0 <= derive_seed(7, index) < 2**64


class TestGenerate:
    """Test cases for generate."""

    @pytest.mark.parametrize("family", list(SamplerFamily))
    def test_deterministic(self, family):
        """Test the same spec yields bit-identical samples."""
        s = spec(family, box_x=BoundsBox(0.0, 1.0, 3), box_y=BoundsBox(-1.0, 4.0, 3), n=40)
        x1, y1 = generate(s)
        x2, y2 = generate(s)

        np.testing.assert_array_equal(x1.data, x2.data)
        np.testing.assert_array_equal(y1.data, y2.data)

    @pytest.mark.parametrize("family", list(SamplerFamily))
    def test_inside_boxes(self, family):
        """Test every draw lies in its declared box."""
        bx, by = BoundsBox(-3.0, 7.0, 2), BoundsBox(0.25, 0.5, 2)
        x, y = generate(spec(family, box_x=bx, box_y=by, n=500, seed=11))

        assert x.data.shape == (500, 2)
        assert y.data.shape == (500, 2)
        assert bx.first_outside(x) is None
        assert by.first_outside(y) is None

    def test_seed_changes_draw(self):
        """Test different seeds give different samples."""
        x1, _ = generate(spec(SamplerFamily.INDEPENDENT_UNIFORM, seed=1))
        x2, _ = generate(spec(SamplerFamily.INDEPENDENT_UNIFORM, seed=2))

        assert not np.array_equal(x1.data, x2.data)

    def test_families_use_separate_streams(self):
        """Test equal seeds do not share streams across families."""
        assert len(set(STREAM_IDS.values())) == len(SamplerFamily)
        x_ind, _ = generate(spec(SamplerFamily.INDEPENDENT_UNIFORM, seed=5))
        x_com, _ = generate(spec(SamplerFamily.COMONOTONE_UNIFORM, seed=5))

        assert not np.array_equal(x_ind.data, x_com.data)

    def test_constant(self):
        """Test the constant family sits at the box midpoints."""
        x, y = generate(spec(SamplerFamily.CONSTANT, box_y=BoundsBox(2.0, 4.0, 1), n=5))

        np.testing.assert_array_equal(x.data, np.full((5, 1), 0.5))
        np.testing.assert_array_equal(y.data, np.full((5, 1), 3.0))

    def test_comonotone_is_affine(self):
        """Test Y is the affine image of X."""
        x, y = generate(spec(SamplerFamily.COMONOTONE_UNIFORM, box_y=BoundsBox(2.0, 5.0, 1)))

        np.testing.assert_allclose(y.data, 2.0 + 3.0 * x.data, rtol=1e-14)

    def test_comonotone_reuses_columns(self):
        """Test a wider Y repeats X's uniforms cyclically."""
        x, y = generate(spec(SamplerFamily.COMONOTONE_UNIFORM, box_x=BoundsBox(0.0, 1.0, 2),
                             box_y=BoundsBox(0.0, 1.0, 5)))

        np.testing.assert_array_equal(y.data, x.data[:, [0, 1, 0, 1, 0]])

    def test_bernoulli_corners(self):
        """Test corner draws share their pattern between X and Y."""
        bx, by = BoundsBox(0.0, 1.0, 3), BoundsBox(-2.0, 2.0, 3)
        x, y = generate(spec(SamplerFamily.BERNOULLI_CORNERS, box_x=bx, box_y=by, n=200))

        assert set(np.unique(x.data)) <= {0.0, 1.0}
        np.testing.assert_array_equal(y.data == 2.0, x.data == 1.0)

    def test_mixture_extremes(self):
        """Test w = 1 is fully coupled and w = 0 is not."""
        coupled_x, coupled_y = generate(spec(SamplerFamily.MIXTURE, w=1.0, n=100))
        free_x, free_y = generate(spec(SamplerFamily.MIXTURE, w=0.0, n=100))

        np.testing.assert_array_equal(coupled_x.data, coupled_y.data)
        assert not np.any(free_x.data == free_y.data)

    def test_uniform_mean(self):
        """Test the uniform mean is within four standard errors of 1/2."""
        n = 20000
        x, y = generate(spec(SamplerFamily.INDEPENDENT_UNIFORM, n=n, seed=3))
        sigma = math.sqrt(1.0 / 12.0 / n)

        assert_close(float(x.data.mean()), 0.5, sigma)
        assert_close(float(y.data.mean()), 0.5, sigma)

    def test_mixture_coupled_fraction(self):
        """Test the coupled fraction is within four standard errors of w."""
        n, w = 20000, 0.3
        x, y = generate(spec(SamplerFamily.MIXTURE, n=n, seed=4, w=w))
        fraction = float(np.mean(x.data[:, 0] == y.data[:, 0]))

        assert_close(fraction, w, math.sqrt(w * (1 - w) / n))

    def test_bernoulli_distance_variance(self):
        """Test dVar of Bernoulli(1/2) on {0, 1} is near 1/2."""
        x, y = generate(spec(SamplerFamily.BERNOULLI_CORNERS, n=4096, seed=8))
        est = estimate(x, y)

        assert 0.48 <= est.dvar_x <= 0.5 + 1e-12
        assert est.dcor == pytest.approx(1.0, abs=1e-10)

    def test_family_info(self):
        """Test every registered family describes itself."""
        for family, sampler in FAMILIES.items():
            info = sampler.get_info()
            assert info["name"]
            assert info["description"]
