"""
Closed-form upper bounds on distance covariance of bounded random vectors,
and the report that lines them up against an observed sample.

For X in [a, b]^N and Y in [c, d]^M,

    dCov(X, Y) <= sqrt(dVar(X) dVar(Y))                        (dCor <= 1)
              <= sqrt(sqrt(var|X-X'|) sqrt(var|Y-Y'|))         (dVar <= sqrt var)
              <= sqrt(sqrt(N (b-a)^2 / 4) sqrt(M (d-c)^2 / 4)) (Popoviciu)
               = (1/2) sqrt((b-a)(d-c) sqrt(NM)).

The empirical measure of an in-box sample is itself a distribution on the
box, so every link holds for the V-statistic estimates as well.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional

from ..config.settings import DEFAULT_TOLERANCE_ABS
from .estimators import distance_variance_of_pairs, estimate_from_distances
from .exceptions import InvalidBoxError, SizeMismatchError
from .sample import BoundsBox, DistanceMatrix, SampleMatrix, pairwise_distances

logger = logging.getLogger(__name__)


def theorem_bound(bx: BoundsBox, by: BoundsBox) -> float:
    """(1/2) sqrt((b-a)(d-c) sqrt(N M)); zero when either box is degenerate."""
    return 0.5 * math.sqrt(bx.width * by.width * math.sqrt(bx.dim * by.dim))


def corollary1_bound(n_dim: int) -> float:
    """sqrt(N)/2, the bound for two N-vectors in unit-length intervals."""
    if isinstance(n_dim, bool) or int(n_dim) != n_dim or n_dim < 1:
        raise InvalidBoxError(f"dimension must be a positive integer, got {n_dim!r}")
    return math.sqrt(n_dim) / 2


def corollary2_bound(bx: BoundsBox, by: BoundsBox) -> float:
    """(1/2) sqrt((b-a)(d-c)) for two scalar random variables."""
    if bx.dim != 1 or by.dim != 1:
        raise InvalidBoxError(
            f"the scalar bound needs one-dimensional boxes, got dims {bx.dim} and {by.dim}"
        )
    return 0.5 * math.sqrt(bx.width * by.width)


def popoviciu_bound(b: BoundsBox) -> float:
    """N (b-a)^2 / 4, the largest variance of |X-X'| on [a, b]^N."""
    return b.dim * b.width**2 / 4


@dataclass(frozen=True)
class ChainLink:
    """One inequality lhs <= rhs of the bound chain."""

    name: str
    lhs: float
    rhs: float

    @property
    def excess(self) -> float:
        return self.lhs - self.rhs

    def holds(self, tolerance: float = DEFAULT_TOLERANCE_ABS) -> bool:
        return self.excess <= tolerance

    def to_dict(self) -> dict:
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "excess": self.excess}


@dataclass(frozen=True)
class BoundReport:
    """Theorem bound, the intermediate lemma values and the observed statistic."""

    theorem_bound: float
    popoviciu_x: float
    popoviciu_y: float
    lemma2_x: float
    lemma2_y: float
    lemma1_rhs: float
    observed_dcov: float
    tightness: Optional[float]
    dvar_x: float
    dvar_y: float
    dcor: Optional[float]
    n: int

    @property
    def lemma2_rhs(self) -> float:
        return math.sqrt(self.lemma2_x * self.lemma2_y)

    @property
    def lemma3_rhs(self) -> float:
        return math.sqrt(math.sqrt(self.popoviciu_x) * math.sqrt(self.popoviciu_y))

    def links(self) -> List[ChainLink]:
        """Every checked inequality, chain links first, then per-vector links."""
        links = [
            ChainLink("lemma1", self.observed_dcov, self.lemma1_rhs),
            ChainLink("lemma2", self.lemma1_rhs, self.lemma2_rhs),
            ChainLink("lemma3", self.lemma2_rhs, self.lemma3_rhs),
            ChainLink("theorem", self.observed_dcov, self.theorem_bound),
            ChainLink("lemma2_x", self.dvar_x, self.lemma2_x),
            ChainLink("lemma2_y", self.dvar_y, self.lemma2_y),
            ChainLink("lemma3_x", self.lemma2_x**2, self.popoviciu_x),
            ChainLink("lemma3_y", self.lemma2_y**2, self.popoviciu_y),
        ]
        if self.dcor is not None:
            links.append(ChainLink("dcor_at_most_one", self.dcor, 1.0))
        return links

    def failed_links(self, tolerance: float = DEFAULT_TOLERANCE_ABS) -> List[ChainLink]:
        return [link for link in self.links() if not link.holds(tolerance)]

    def passes(self, tolerance: float = DEFAULT_TOLERANCE_ABS) -> bool:
        return not self.failed_links(tolerance)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "theorem_bound": self.theorem_bound,
            "popoviciu_x": self.popoviciu_x,
            "popoviciu_y": self.popoviciu_y,
            "lemma2_x": self.lemma2_x,
            "lemma2_y": self.lemma2_y,
            "lemma1_rhs": self.lemma1_rhs,
            "observed_dcov": self.observed_dcov,
            "tightness": self.tightness,
            "dvar_x": self.dvar_x,
            "dvar_y": self.dvar_y,
            "dcor": self.dcor,
        }


def check_report_inputs(x: SampleMatrix, y: SampleMatrix, bx: BoundsBox, by: BoundsBox) -> None:
    """
    Preconditions of :func:`build_report`.

    Raises:
        SizeMismatchError: x and y differ in observations, or a box dimension
            does not match its sample.
        SampleOutsideBoxError: first entry lying outside its declared box.
    """
    if x.n != y.n:
        raise SizeMismatchError(f"x has {x.n} observations but y has {y.n}")
    if bx.dim != x.dim or by.dim != y.dim:
        raise SizeMismatchError(
            f"box dimensions ({bx.dim}, {by.dim}) do not match sample "
            f"dimensions ({x.dim}, {y.dim})"
        )
    bx.require_contains(x, label="x")
    by.require_contains(y, label="y")


def report_from_distances(
    dx: DistanceMatrix, dy: DistanceMatrix, bx: BoundsBox, by: BoundsBox
) -> BoundReport:
    """Bound report from precomputed distance matrices of in-box samples."""
    est = estimate_from_distances(dx, dy)

    bound = theorem_bound(bx, by)
    tightness = est.dcov / bound if bound > 0.0 else None

    report = BoundReport(
        theorem_bound=bound,
        popoviciu_x=popoviciu_bound(bx),
        popoviciu_y=popoviciu_bound(by),
        lemma2_x=math.sqrt(distance_variance_of_pairs(dx)),
        lemma2_y=math.sqrt(distance_variance_of_pairs(dy)),
        lemma1_rhs=math.sqrt(est.dvar_x * est.dvar_y),
        observed_dcov=est.dcov,
        tightness=tightness,
        dvar_x=est.dvar_x,
        dvar_y=est.dvar_y,
        dcor=est.dcor,
        n=dx.n,
    )
    logger.debug(f"Built bound report: dcov={est.dcov!r}, bound={bound!r}")
    return report


def build_report(x: SampleMatrix, y: SampleMatrix, bx: BoundsBox, by: BoundsBox) -> BoundReport:
    """
    Evaluate the whole inequality chain on a paired sample.

    See :func:`check_report_inputs` for the errors raised.
    """
    check_report_inputs(x, y, bx, by)
    return report_from_distances(pairwise_distances(x), pairwise_distances(y), bx, by)
