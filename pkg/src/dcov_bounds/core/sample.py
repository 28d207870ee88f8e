"""
Sample matrices, bounds boxes and pairwise Euclidean distances.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .exceptions import (
    EmptySampleError,
    InvalidBoxError,
    NonFiniteEntryError,
    SampleError,
    SampleOutsideBoxError,
)

logger = logging.getLogger(__name__)

ArrayLike = Union[np.ndarray, Sequence[Sequence[float]], Sequence[float]]


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class SampleMatrix:
    """
    n observations of a dim-dimensional random vector.

    Rows are observations, columns are components. The underlying array is
    float64 and read-only; build instances through :func:`validate_sample`.
    """

    data: np.ndarray

    @property
    def n(self) -> int:
        return int(self.data.shape[0])

    @property
    def dim(self) -> int:
        return int(self.data.shape[1])

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True)
class BoundsBox:
    """The box [lo, hi]^dim: one interval shared by every component."""

    lo: float
    hi: float
    dim: int

    def __post_init__(self) -> None:
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise InvalidBoxError(f"box limits must be finite, got [{self.lo}, {self.hi}]")
        if self.lo > self.hi:
            raise InvalidBoxError(f"box requires lo <= hi, got [{self.lo}, {self.hi}]")
        if isinstance(self.dim, bool) or int(self.dim) != self.dim or self.dim < 1:
            raise InvalidBoxError(f"box dimension must be a positive integer, got {self.dim!r}")
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        object.__setattr__(self, "dim", int(self.dim))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    @property
    def is_unit(self) -> bool:
        return self.width == 1.0

    @property
    def diameter(self) -> float:
        """Largest Euclidean distance between two points of the box."""
        return float(np.sqrt(self.dim) * self.width)

    def first_outside(self, sample: SampleMatrix) -> Optional[Tuple[int, int, float]]:
        """Row-major first entry of ``sample`` outside [lo, hi], or None."""
        outside = (sample.data < self.lo) | (sample.data > self.hi)
        if not outside.any():
            return None
        row, column = np.argwhere(outside)[0]
        return int(row), int(column), float(sample.data[row, column])

    def require_contains(self, sample: SampleMatrix, label: str = "sample") -> None:
        """Raise :class:`SampleOutsideBoxError` unless every entry lies in the box."""
        offender = self.first_outside(sample)
        if offender is not None:
            row, column, value = offender
            raise SampleOutsideBoxError(row, column, value, self.lo, self.hi, label)

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "dim": self.dim}


@dataclass(frozen=True)
class DistanceMatrix:
    """n x n Euclidean distances between the rows of one sample."""

    d: np.ndarray

    @property
    def n(self) -> int:
        return int(self.d.shape[0])

    def violates_triangle(self, tol: float = 1e-12) -> bool:
        """
        Whether any triple breaks d[k][m] <= d[k][l] + d[l][m].

        Cubic in memory; intended for spot checks on small matrices.
        """
        d = self.d
        detour = d[:, :, None] + d[None, :, :]
        return bool(np.any(d[:, None, :] > detour + tol * (1.0 + detour)))


def validate_sample(data: ArrayLike) -> SampleMatrix:
    """
    Validate raw data and wrap it as a :class:`SampleMatrix`.

    A one-dimensional input is read as n observations of a scalar variable.

    Raises:
        EmptySampleError: no rows or no columns.
        NonFiniteEntryError: first NaN/infinite entry in row-major order.
    """
    try:
        array = np.array(data, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise SampleError(f"sample is not a rectangular real matrix: {e}") from e

    if array.ndim == 1:
        array = array.reshape(-1, 1)
    if array.ndim != 2:
        raise SampleError(f"sample must be a 2-D matrix, got {array.ndim} dimensions")
    if array.shape[0] == 0 or array.shape[1] == 0:
        raise EmptySampleError(f"sample is empty (shape {array.shape[0]}x{array.shape[1]})")

    finite = np.isfinite(array)
    if not finite.all():
        row, column = np.argwhere(~finite)[0]
        raise NonFiniteEntryError(int(row), int(column), float(array[row, column]))

    return SampleMatrix(_frozen(array))


def pairwise_distances(s: SampleMatrix) -> DistanceMatrix:
    """
    Euclidean distances between every pair of rows.

    Each entry is the square root of the summed squared component
    differences; the Gram-matrix expansion is not used.
    """
    if s.n == 1:
        return DistanceMatrix(_frozen(np.zeros((1, 1))))
    d = squareform(pdist(s.data, metric="euclidean"))
    logger.debug(f"Computed {s.n}x{s.n} distance matrix for dim {s.dim}")
    return DistanceMatrix(_frozen(d))


def infer_box(s: SampleMatrix) -> BoundsBox:
    """Tightest single-interval box [min, max]^dim containing every entry."""
    return BoundsBox(lo=float(s.data.min()), hi=float(s.data.max()), dim=s.dim)
