"""
Seeded generators of paired samples on bounded boxes.

Every draw comes from numpy's PCG64 bit generator seeded through a
``SeedSequence`` built from ``(seed, stream_id)``, where ``stream_id`` is the
fixed integer assigned to the family in ``STREAM_IDS``. Uniform variates are
``Generator.random`` doubles in [0, 1); results are clipped onto the closed
box so that rounding in ``lo + width * u`` can never leave it.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np

from .exceptions import BadSpecError
from .sample import BoundsBox, SampleMatrix, validate_sample

logger = logging.getLogger(__name__)

UINT64_LIMIT = 2**64


def _whole_number(value: object) -> Optional[int]:
    """``value`` as an int when it is an integer or an integral float, else None."""
    if isinstance(value, (bool, np.bool_)):
        return None
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)) and math.isfinite(value):
        return int(value) if float(value).is_integer() else None
    return None


class SamplerFamily(str, Enum):
    """Distribution families a :class:`SamplerSpec` can name."""

    INDEPENDENT_UNIFORM = "independent_uniform"
    COMONOTONE_UNIFORM = "comonotone_uniform"
    BERNOULLI_CORNERS = "bernoulli_corners"
    MIXTURE = "mixture"
    CONSTANT = "constant"


# Stable: changing a value changes every stream drawn for that family
STREAM_IDS = {
    SamplerFamily.INDEPENDENT_UNIFORM: 1,
    SamplerFamily.COMONOTONE_UNIFORM: 2,
    SamplerFamily.BERNOULLI_CORNERS: 3,
    SamplerFamily.MIXTURE: 4,
    SamplerFamily.CONSTANT: 5,
}


@dataclass(frozen=True)
class SamplerSpec:
    """Which family to draw from, on which boxes, how many rows, which seed."""

    family: SamplerFamily
    box_x: BoundsBox
    box_y: BoundsBox
    n: int
    seed: int
    w: float = 0.0
    spec_id: str = field(default="")

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "family", SamplerFamily(self.family))
        except ValueError as e:
            raise BadSpecError(f"unknown sampler family {self.family!r}") from e
        n = _whole_number(self.n)
        if n is None or n < 1:
            raise BadSpecError(f"sample size must be a positive integer, got {self.n!r}")
        seed = _whole_number(self.seed)
        if seed is None or not 0 <= seed < UINT64_LIMIT:
            raise BadSpecError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "seed", seed)
        if not 0.0 <= self.w <= 1.0:
            raise BadSpecError(f"mixture weight must lie in [0, 1], got {self.w!r}")
        if not self.spec_id:
            object.__setattr__(
                self,
                "spec_id",
                f"{self.family.value}-{self.box_x.dim}x{self.box_y.dim}-n{self.n}",
            )

    def to_dict(self) -> dict:
        return {
            "id": self.spec_id,
            "family": self.family.value,
            "box_x": self.box_x.to_dict(),
            "box_y": self.box_y.to_dict(),
            "n": self.n,
            "seed": self.seed,
            "w": self.w,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SamplerSpec":
        """Build a spec from its JSON form; raises BadSpecError on any problem."""
        try:
            return cls(
                family=data["family"],
                box_x=BoundsBox(**data["box_x"]),
                box_y=BoundsBox(**data["box_y"]),
                n=data["n"],
                seed=data["seed"],
                w=float(data.get("w", 0.0)),
                spec_id=str(data.get("id", "")),
            )
        except BadSpecError:
            raise
        except KeyError as e:
            raise BadSpecError(f"sampler spec is missing {e}") from e
        except (TypeError, ValueError) as e:
            raise BadSpecError(f"malformed sampler spec: {e}") from e


def derive_seed(seed: int, index: int) -> int:
    """
    Seed of the ``index``-th child stream of ``seed``.

    ``SeedSequence(seed, spawn_key=(index,))`` hashed to one uint64; disjoint
    children for distinct indices, identical on every platform.
    """
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def make_generator(seed: int, family: SamplerFamily) -> np.random.Generator:
    """PCG64 generator for the (seed, family) stream."""
    sequence = np.random.SeedSequence(entropy=[int(seed), STREAM_IDS[family]])
    return np.random.Generator(np.random.PCG64(sequence))


def _scale(u: np.ndarray, box: BoundsBox) -> np.ndarray:
    return np.clip(box.lo + box.width * u, box.lo, box.hi)


def _spread_columns(u: np.ndarray, dim: int) -> np.ndarray:
    """Reuse the columns of ``u`` cyclically (truncating or padding) to reach ``dim``."""
    return u[:, np.arange(dim) % u.shape[1]]


class BaseSamplerFamily(ABC):
    """Base class for sampler family implementations."""

    description = "Paired sampler"

    def __init__(self) -> None:
        self.name = self.__class__.__name__

    @abstractmethod
    def draw(self, rng: np.random.Generator, spec: SamplerSpec) -> Tuple[np.ndarray, np.ndarray]:
        """
        Draw the raw x and y arrays.

        Args:
            rng: generator for the spec's (seed, family) stream
            spec: validated sampler spec

        Returns:
            (n x dim_x, n x dim_y) arrays inside the declared boxes
        """

    def check(self, spec: SamplerSpec) -> None:
        """Raise BadSpecError when this family cannot honour ``spec``."""

    def get_info(self) -> Dict[str, str]:
        return {"name": self.name, "description": self.description}


class IndependentUniform(BaseSamplerFamily):
    description = "X and Y uniform on their boxes, drawn independently"

    def draw(self, rng: np.random.Generator, spec: SamplerSpec) -> Tuple[np.ndarray, np.ndarray]:
        u = rng.random((spec.n, spec.box_x.dim))
        v = rng.random((spec.n, spec.box_y.dim))
        return _scale(u, spec.box_x), _scale(v, spec.box_y)


class ComonotoneUniform(BaseSamplerFamily):
    description = "X uniform; Y the component-wise affine image of X in its box"

    def draw(self, rng: np.random.Generator, spec: SamplerSpec) -> Tuple[np.ndarray, np.ndarray]:
        u = rng.random((spec.n, spec.box_x.dim))
        return _scale(u, spec.box_x), _scale(_spread_columns(u, spec.box_y.dim), spec.box_y)


class BernoulliCorners(BaseSamplerFamily):
    description = "Components iid on {lo, hi} with p = 1/2; Y takes X's corner pattern"

    def check(self, spec: SamplerSpec) -> None:
        if spec.box_x.dim != spec.box_y.dim:
            raise BadSpecError(
                f"bernoulli_corners couples Y to X and needs equal dimensions, "
                f"got {spec.box_x.dim} and {spec.box_y.dim}"
            )

    def draw(self, rng: np.random.Generator, spec: SamplerSpec) -> Tuple[np.ndarray, np.ndarray]:
        bits = rng.integers(0, 2, size=(spec.n, spec.box_x.dim)).astype(bool)
        x = np.where(bits, spec.box_x.hi, spec.box_x.lo)
        y = np.where(bits, spec.box_y.hi, spec.box_y.lo)
        return x, y


class Mixture(BaseSamplerFamily):
    description = "Per observation: comonotone with probability w, else independent"

    def draw(self, rng: np.random.Generator, spec: SamplerSpec) -> Tuple[np.ndarray, np.ndarray]:
        u = rng.random((spec.n, spec.box_x.dim))
        v = rng.random((spec.n, spec.box_y.dim))
        coupled = rng.random(spec.n) < spec.w
        v = np.where(coupled[:, None], _spread_columns(u, spec.box_y.dim), v)
        return _scale(u, spec.box_x), _scale(v, spec.box_y)


class Constant(BaseSamplerFamily):
    description = "Every observation at the box midpoint"

    def draw(self, rng: np.random.Generator, spec: SamplerSpec) -> Tuple[np.ndarray, np.ndarray]:
        x = np.full((spec.n, spec.box_x.dim), spec.box_x.midpoint)
        y = np.full((spec.n, spec.box_y.dim), spec.box_y.midpoint)
        return x, y


FAMILIES: Dict[SamplerFamily, BaseSamplerFamily] = {
    SamplerFamily.INDEPENDENT_UNIFORM: IndependentUniform(),
    SamplerFamily.COMONOTONE_UNIFORM: ComonotoneUniform(),
    SamplerFamily.BERNOULLI_CORNERS: BernoulliCorners(),
    SamplerFamily.MIXTURE: Mixture(),
    SamplerFamily.CONSTANT: Constant(),
}


def generate(spec: SamplerSpec) -> Tuple[SampleMatrix, SampleMatrix]:
    """
    Draw the paired sample described by ``spec``.

    A pure function of ``spec``: the same spec yields bit-identical arrays.

    Raises:
        BadSpecError: the family cannot honour the spec.
    """
    family = FAMILIES[spec.family]
    family.check(spec)
    rng = make_generator(spec.seed, spec.family)
    x, y = family.draw(rng, spec)
    logger.debug(f"Generated {spec.spec_id} with seed {spec.seed}")
    return validate_sample(x), validate_sample(y)
