"""
Plug-in (V-statistic) estimators of distance covariance, variance and correlation.

All statistics are the population functionals evaluated on the empirical
measure of the sample: for distance matrices ``a`` (of X) and ``b`` (of Y),

    S1 = mean over pairs (k, l) of a[k, l] * b[k, l]
    S2 = mean(a) * mean(b)
    S3 = mean over triples (k, l, m) of a[k, l] * b[k, m]
    dCov^2 = S1 + S2 - 2 * S3

S3 reduces to the mean of products of row means, so the estimator is
quadratic in n. Sums are accumulated in ``np.longdouble`` over sorted values,
so reordering the observations leaves every estimate bit-identical.
"""

import logging
import math
from dataclasses import dataclass
from itertools import product
from typing import Optional, Tuple

import numpy as np

from .exceptions import SizeMismatchError
from .sample import DistanceMatrix, SampleMatrix, pairwise_distances

logger = logging.getLogger(__name__)

_ACC = np.longdouble


@dataclass(frozen=True)
class DCovEstimate:
    """Distance covariance statistics for one paired dataset."""

    dcov2: float
    dcov: float
    dvar_x: float
    dvar_y: float
    dcor: Optional[float]
    n: int
    clamped: bool

    @property
    def dcor_defined(self) -> bool:
        return self.dcor is not None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "dcov": self.dcov,
            "dcov2": self.dcov2,
            "dvar_x": self.dvar_x,
            "dvar_y": self.dvar_y,
            "dcor": self.dcor,
            "dcor_defined": self.dcor_defined,
            "clamped": self.clamped,
        }


@dataclass(frozen=True)
class Prop1Decomposition:
    """dCov^2 written as cov(|X-X'|, |Y-Y'|) - 2 cov(|X-X'|, |Y-Y''|)."""

    cov_pair: float
    cov_cross: float
    recomposed_dcov2: float


@dataclass(frozen=True)
class _Terms:
    s1: np.floating
    mean_a: np.floating
    mean_b: np.floating
    s3: np.floating


def _check_sizes(dx: DistanceMatrix, dy: DistanceMatrix) -> int:
    if dx.d.shape != dy.d.shape:
        raise SizeMismatchError(
            f"distance matrices differ in size: {dx.n}x{dx.n} vs {dy.n}x{dy.n}"
        )
    if dx.n < 1:
        raise SizeMismatchError("distance matrices must hold at least one observation")
    return dx.n


def _sorted_sum(values: np.ndarray) -> np.floating:
    return np.sum(np.sort(values, axis=None), dtype=_ACC)


def _terms(dx: DistanceMatrix, dy: DistanceMatrix) -> _Terms:
    n = _check_sizes(dx, dy)
    a, b = dx.d, dy.d

    row_a = np.sum(np.sort(a, axis=1), axis=1, dtype=_ACC) / n
    row_b = np.sum(np.sort(b, axis=1), axis=1, dtype=_ACC) / n

    s1 = _sorted_sum(a * b) / (n * n)
    mean_a = _sorted_sum(row_a) / n
    mean_b = _sorted_sum(row_b) / n
    s3 = _sorted_sum(row_a * row_b) / n
    return _Terms(s1=s1, mean_a=mean_a, mean_b=mean_b, s3=s3)


def dcov2_vstat(dx: DistanceMatrix, dy: DistanceMatrix) -> float:
    """
    V-statistic estimate of dCov^2(X, Y) from the two distance matrices.

    Equal in exact arithmetic to the double-centred formulation; may dip
    below zero only by rounding.
    """
    t = _terms(dx, dy)
    return float(t.s1 + t.mean_a * t.mean_b - 2 * t.s3)


def dcov2_double_centered(dx: DistanceMatrix, dy: DistanceMatrix) -> float:
    """dCov^2 as the mean entrywise product of the double-centred matrices."""
    _check_sizes(dx, dy)

    def centred(d: np.ndarray) -> np.ndarray:
        return d - d.mean(axis=0)[None, :] - d.mean(axis=1)[:, None] + d.mean()

    return float(np.mean(centred(dx.d) * centred(dy.d), dtype=_ACC))


def dcov2_triple_sum(dx: DistanceMatrix, dy: DistanceMatrix) -> float:
    """
    Literal cubic evaluation of the four-term moment formula.

    Computes S1 + S2 - S3 - S3' with explicit loops, where S3' pairs
    a[k][m] with b[k][l]. Only meant as an independent check of
    :func:`dcov2_vstat` for small n.
    """
    n = _check_sizes(dx, dy)
    a = dx.d.tolist()
    b = dy.d.tolist()

    s1 = math.fsum(a[k][l] * b[k][l] for k in range(n) for l in range(n)) / n**2
    mean_a = math.fsum(a[k][l] for k in range(n) for l in range(n)) / n**2
    mean_b = math.fsum(b[k][l] for k in range(n) for l in range(n)) / n**2
    s3, s3_swapped = cross_term_pair(dx, dy)
    return s1 + mean_a * mean_b - s3 - s3_swapped


def cross_term_pair(dx: DistanceMatrix, dy: DistanceMatrix) -> Tuple[float, float]:
    """
    Both cross moments E|X-X'||Y-Y''| and E|X-X''||Y-Y'| by explicit loops.

    Under an iid triple the two coincide; on the empirical measure they are
    equal up to rounding.
    """
    n = _check_sizes(dx, dy)
    a = dx.d.tolist()
    b = dy.d.tolist()
    s3 = math.fsum(a[k][l] * b[k][m] for k, l, m in product(range(n), repeat=3)) / n**3
    s3_swapped = math.fsum(
        a[k][m] * b[k][l] for k, l, m in product(range(n), repeat=3)
    ) / n**3
    return s3, s3_swapped


def prop1_decompose(dx: DistanceMatrix, dy: DistanceMatrix) -> Prop1Decomposition:
    """Covariance form of dCov^2 on the empirical measure."""
    t = _terms(dx, dy)
    product_of_means = t.mean_a * t.mean_b
    cov_pair = t.s1 - product_of_means
    cov_cross = t.s3 - product_of_means
    return Prop1Decomposition(
        cov_pair=float(cov_pair),
        cov_cross=float(cov_cross),
        recomposed_dcov2=float(cov_pair - 2 * cov_cross),
    )


def distance_variance_of_pairs(dx: DistanceMatrix) -> float:
    """
    Variance of |X-X'| over all n^2 ordered pairs, diagonal zeros included.

    Two-pass, so never negative.
    """
    a = dx.d
    mean_a = np.mean(a, dtype=_ACC)
    return float(np.mean(np.square(a - float(mean_a)), dtype=_ACC))


def estimate_from_distances(dx: DistanceMatrix, dy: DistanceMatrix) -> DCovEstimate:
    """:func:`estimate` for callers that already hold both distance matrices."""
    _check_sizes(dx, dy)

    raw = dcov2_vstat(dx, dy)
    clamped = raw < 0.0
    if clamped:
        logger.warning(f"dCov^2 estimate {raw!r} is negative; clamped to 0")
    dcov2 = max(raw, 0.0)
    dcov = math.sqrt(dcov2)

    dvar_x = math.sqrt(max(dcov2_vstat(dx, dx), 0.0))
    dvar_y = math.sqrt(max(dcov2_vstat(dy, dy), 0.0))

    dcor: Optional[float] = None
    if dvar_x > 0.0 and dvar_y > 0.0:
        dcor = dcov / math.sqrt(dvar_x) / math.sqrt(dvar_y)

    return DCovEstimate(
        dcov2=dcov2,
        dcov=dcov,
        dvar_x=dvar_x,
        dvar_y=dvar_y,
        dcor=dcor,
        n=dx.n,
        clamped=clamped,
    )


def estimate(x: SampleMatrix, y: SampleMatrix) -> DCovEstimate:
    """
    Estimate dCov, dVar and dCor for a paired sample.

    The two samples may differ in dimension but must have the same number
    of observations. dCor is left undefined (None) when either distance
    variance is zero.

    Raises:
        SizeMismatchError: x and y have different numbers of rows.
    """
    if x.n != y.n:
        raise SizeMismatchError(f"x has {x.n} observations but y has {y.n}")
    return estimate_from_distances(pairwise_distances(x), pairwise_distances(y))
