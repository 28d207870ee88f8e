"""
Monte Carlo verification campaigns over the bound chain.
"""

import dataclasses
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Union

import numpy as np

from ..config.settings import (
    DEFAULT_CAMPAIGN_CONFIG,
    DEFAULT_TOLERANCE_ABS,
    IDENTITY_TOLERANCE_REL,
)
from .bounds import (
    BoundReport,
    ChainLink,
    build_report,
    check_report_inputs,
    report_from_distances,
)
from .estimators import dcov2_vstat, prop1_decompose
from .exceptions import (
    BadSpecError,
    CampaignError,
    ConfigError,
    DCovBoundsError,
    InvalidBoxError,
    MalformedRecordError,
)
from .sample import BoundsBox, SampleMatrix, pairwise_distances, validate_sample
from .samplers import FAMILIES, SamplerFamily, SamplerSpec, derive_seed, generate

logger = logging.getLogger(__name__)

ProgressCallback = Callable[[int], None]


@dataclass(frozen=True)
class CampaignConfig:
    """Specs to sample, replicates per spec and the violation tolerance."""

    specs: List[SamplerSpec]
    replicates: int
    tolerance_abs: float = DEFAULT_TOLERANCE_ABS
    record_failures: bool = False
    workers: int = 1

    def __post_init__(self) -> None:
        if not self.specs:
            raise ConfigError("campaign needs at least one sampler spec")
        if isinstance(self.replicates, bool) or not isinstance(self.replicates, int) \
                or self.replicates < 1:
            raise ConfigError(f"replicates must be a positive integer, got {self.replicates!r}")
        tolerance = self.tolerance_abs
        if isinstance(tolerance, bool) or not isinstance(tolerance, (int, float)) \
                or not 0 < tolerance < math.inf:
            raise ConfigError(f"tolerance_abs must be positive, got {self.tolerance_abs!r}")
        if not isinstance(self.record_failures, bool):
            raise ConfigError(
                f"record_failures must be true or false, got {self.record_failures!r}"
            )
        if isinstance(self.workers, bool) or not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError(f"workers must be a positive integer, got {self.workers!r}")
        for spec in self.specs:
            try:
                FAMILIES[spec.family].check(spec)
            except BadSpecError as e:
                raise ConfigError(f"spec {spec.spec_id!r}: {e}") from e
        ids = [spec.spec_id for spec in self.specs]
        duplicates = sorted({spec_id for spec_id in ids if ids.count(spec_id) > 1})
        if duplicates:
            raise ConfigError(f"duplicate spec ids: {', '.join(duplicates)}")

    def with_seed(self, seed: int) -> "CampaignConfig":
        """Copy whose i-th spec is reseeded with ``derive_seed(seed, i)``."""
        specs = [
            dataclasses.replace(spec, seed=derive_seed(seed, index))
            for index, spec in enumerate(self.specs)
        ]
        return dataclasses.replace(self, specs=specs)

    def to_dict(self) -> dict:
        return {
            "replicates": self.replicates,
            "tolerance_abs": self.tolerance_abs,
            "record_failures": self.record_failures,
            "workers": self.workers,
            "specs": [spec.to_dict() for spec in self.specs],
        }

    @classmethod
    def from_dict(cls, data: Any) -> "CampaignConfig":
        if not isinstance(data, dict):
            raise ConfigError("campaign config must be a JSON object")
        unknown = set(data) - {"specs", "replicates", "tolerance_abs", "record_failures", "workers"}
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        if "specs" not in data or not isinstance(data["specs"], list):
            raise ConfigError("campaign config needs a 'specs' list")
        if "replicates" not in data:
            raise ConfigError("campaign config needs 'replicates'")

        specs = []
        for index, raw in enumerate(data["specs"]):
            if not isinstance(raw, dict):
                raise ConfigError(f"specs[{index}] must be an object")
            try:
                specs.append(SamplerSpec.from_dict(raw))
            except BadSpecError as e:
                raise ConfigError(f"specs[{index}]: {e}") from e

        return cls(
            specs=specs,
            replicates=data["replicates"],
            tolerance_abs=data.get("tolerance_abs", DEFAULT_CAMPAIGN_CONFIG["tolerance_abs"]),
            record_failures=data.get(
                "record_failures", DEFAULT_CAMPAIGN_CONFIG["record_failures"]
            ),
            workers=data.get("workers", DEFAULT_CAMPAIGN_CONFIG["workers"]),
        )


def load_campaign_config(path: Union[str, Path]) -> CampaignConfig:
    """Read and validate a JSON campaign configuration."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read campaign config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"campaign config {path} is not valid JSON: {e}") from e
    return CampaignConfig.from_dict(data)


@dataclass(frozen=True)
class ReplicateOutcome:
    """Checks of one replicate of one spec."""

    spec_id: str
    replicate: int
    seed: int
    report: BoundReport
    violations: List[ChainLink]
    record: Optional[dict] = None


@dataclass(frozen=True)
class SpecSummary:
    """Aggregate of every replicate run for one spec."""

    spec_id: str
    replicates_run: int
    chain_violations: int
    max_violation: float
    tightness_min: Optional[float]
    tightness_median: Optional[float]
    tightness_max: Optional[float]
    mean_dcov: float
    median_dcov: float
    median_dvar_x: float
    dcor_defined_fraction: float

    def to_dict(self) -> dict:
        return {
            "spec_id": self.spec_id,
            "replicates_run": self.replicates_run,
            "chain_violations": self.chain_violations,
            "max_violation": self.max_violation,
            "tightness_quantiles": {
                "min": self.tightness_min,
                "median": self.tightness_median,
                "max": self.tightness_max,
            },
            "mean_dcov": self.mean_dcov,
            "median_dcov": self.median_dcov,
            "median_dvar_x": self.median_dvar_x,
            "dcor_defined_fraction": self.dcor_defined_fraction,
        }


@dataclass(frozen=True)
class CampaignResult:
    """Per-spec summaries, the overall verdict and any recorded failures."""

    per_spec: List[SpecSummary]
    overall_pass: bool
    failures: List[dict] = field(default_factory=list)
    cancelled: bool = False

    def summary_for(self, spec_id: str) -> SpecSummary:
        for summary in self.per_spec:
            if summary.spec_id == spec_id:
                return summary
        raise KeyError(spec_id)

    def to_dict(self) -> dict:
        return {
            "overall_pass": self.overall_pass,
            "cancelled": self.cancelled,
            "per_spec": [summary.to_dict() for summary in self.per_spec],
            "failures": self.failures,
        }


def summarize(spec_id: str, outcomes: Sequence[ReplicateOutcome]) -> SpecSummary:
    """Order-independent aggregate of a spec's replicates."""
    dcovs = np.sort([o.report.observed_dcov for o in outcomes])
    dvars = np.array([o.report.dvar_x for o in outcomes])
    tightness = np.array([o.report.tightness for o in outcomes if o.report.tightness is not None])
    excesses = [link.excess for o in outcomes for link in o.violations]

    def stat(fn: Callable[[np.ndarray], Any], values: np.ndarray) -> Optional[float]:
        return float(fn(values)) if values.size else None

    return SpecSummary(
        spec_id=spec_id,
        replicates_run=len(outcomes),
        chain_violations=len(excesses),
        max_violation=max(excesses, default=0.0),
        tightness_min=stat(np.min, tightness),
        tightness_median=stat(np.median, tightness),
        tightness_max=stat(np.max, tightness),
        mean_dcov=stat(np.mean, dcovs) or 0.0,
        median_dcov=stat(np.median, dcovs) or 0.0,
        median_dvar_x=stat(np.median, dvars) or 0.0,
        dcor_defined_fraction=(
            sum(o.report.dcor is not None for o in outcomes) / len(outcomes) if outcomes else 0.0
        ),
    )


def identity_link(decomposition_dcov2: float, vstat_dcov2: float) -> ChainLink:
    """
    Covariance-form recomposition must match the V-statistic.

    lhs is the absolute gap, rhs the relative allowance
    ``IDENTITY_TOLERANCE_REL * max(1, |vstat|)``; ``holds(tol)`` adds ``tol`` on top.
    """
    allowance = IDENTITY_TOLERANCE_REL * max(1.0, abs(vstat_dcov2))
    return ChainLink("prop1_identity", abs(decomposition_dcov2 - vstat_dcov2), allowance)


def failure_record(spec: SamplerSpec, replicate: int, seed: int, x: SampleMatrix,
                   y: SampleMatrix, violations: Sequence[ChainLink]) -> dict:
    """Self-contained failure artifact; samples are stored verbatim."""
    return {
        "spec_id": spec.spec_id,
        "replicate": replicate,
        "seed": seed,
        "box_x": spec.box_x.to_dict(),
        "box_y": spec.box_y.to_dict(),
        "x": x.data.tolist(),
        "y": y.data.tolist(),
        "violations": [link.to_dict() for link in violations],
    }


class CampaignRunner:
    """
    Runs a campaign replicate by replicate.

    Callbacks:
        progress_callback: called with the completed percentage (int)
        replicate_callback: called with each :class:`ReplicateOutcome`
    """

    def __init__(self, config: CampaignConfig,
                 progress_callback: Optional[ProgressCallback] = None,
                 replicate_callback: Optional[Callable[[ReplicateOutcome], None]] = None):
        self.config = config
        self.progress_callback = progress_callback
        self.replicate_callback = replicate_callback
        self.is_cancelled = False

        logger.info(
            f"Initialized campaign with {len(config.specs)} specs x {config.replicates} replicates"
        )

    def cancel(self) -> None:
        """Stop before the next replicate starts."""
        self.is_cancelled = True
        logger.info("Campaign cancelled")

    def run(self) -> CampaignResult:
        """Run every replicate and aggregate."""
        tasks = [
            (spec, replicate)
            for spec in self.config.specs
            for replicate in range(self.config.replicates)
        ]
        total = len(tasks)
        logger.info(f"Starting campaign of {total} replicates")

        outcomes: List[Optional[ReplicateOutcome]] = [None] * total
        done = 0

        def finish(index: int, outcome: Optional[ReplicateOutcome]) -> None:
            nonlocal done
            outcomes[index] = outcome
            done += 1
            if outcome is not None and self.replicate_callback:
                self.replicate_callback(outcome)
            if self.progress_callback:
                self.progress_callback(int(done / total * 100))

        if self.config.workers == 1:
            for index, (spec, replicate) in enumerate(tasks):
                if self.is_cancelled:
                    break
                finish(index, self._run_replicate(spec, replicate))
        else:
            with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
                results = pool.map(lambda task: self._run_guarded(*task), tasks)
                for index, outcome in enumerate(results):
                    finish(index, outcome)

        per_spec = []
        failures = []
        for spec in self.config.specs:
            collected = [o for o in outcomes if o is not None and o.spec_id == spec.spec_id]
            per_spec.append(summarize(spec.spec_id, collected))
            failures.extend(o.record for o in collected if o.record is not None)

        overall_pass = all(summary.chain_violations == 0 for summary in per_spec)
        logger.info(f"Campaign finished: {'pass' if overall_pass else 'FAIL'}")
        return CampaignResult(
            per_spec=per_spec,
            overall_pass=overall_pass,
            failures=failures,
            cancelled=self.is_cancelled,
        )

    def _run_guarded(self, spec: SamplerSpec, replicate: int) -> Optional[ReplicateOutcome]:
        if self.is_cancelled:
            return None
        return self._run_replicate(spec, replicate)

    def _run_replicate(self, spec: SamplerSpec, replicate: int) -> ReplicateOutcome:
        seed = derive_seed(spec.seed, replicate)
        try:
            x, y = generate(dataclasses.replace(spec, seed=seed))
            check_report_inputs(x, y, spec.box_x, spec.box_y)
            dx, dy = pairwise_distances(x), pairwise_distances(y)
            report = report_from_distances(dx, dy, spec.box_x, spec.box_y)
            identity = identity_link(prop1_decompose(dx, dy).recomposed_dcov2, dcov2_vstat(dx, dy))
        except DCovBoundsError as e:
            logger.error(f"Replicate {replicate} of {spec.spec_id} failed: {e}")
            raise CampaignError(spec.spec_id, replicate, e) from e

        tolerance = self.config.tolerance_abs
        violations = report.failed_links(tolerance)
        if not identity.holds(tolerance):
            violations.append(identity)

        record = None
        if violations:
            names = ", ".join(link.name for link in violations)
            logger.warning(f"{spec.spec_id} replicate {replicate}: violated {names}")
            if self.config.record_failures:
                record = failure_record(spec, replicate, seed, x, y, violations)
        else:
            logger.debug(f"{spec.spec_id} replicate {replicate}: chain holds")

        return ReplicateOutcome(
            spec_id=spec.spec_id,
            replicate=replicate,
            seed=seed,
            report=report,
            violations=violations,
            record=record,
        )


def run_campaign(cfg: CampaignConfig,
                 progress_callback: Optional[ProgressCallback] = None) -> CampaignResult:
    """
    Sample, estimate and check the full chain for every spec and replicate.

    Deterministic given ``cfg``: replicate seeds are ``derive_seed(spec.seed, i)``.

    Raises:
        CampaignError: a sampler or estimator error, tagged with its spec id.
    """
    return CampaignRunner(cfg, progress_callback=progress_callback).run()


def replay_failure(record: Mapping[str, Any]) -> BoundReport:
    """
    Recompute the bound report for a recorded failure.

    Raises:
        MalformedRecordError: missing or unreadable fields.
        SampleOutsideBoxError: the recorded sample is not inside its boxes.
    """
    if not record:
        raise MalformedRecordError("failure record is empty")
    missing = [key for key in ("x", "y", "box_x", "box_y") if key not in record]
    if missing:
        raise MalformedRecordError(f"failure record lacks {', '.join(missing)}")
    try:
        x = validate_sample(record["x"])
        y = validate_sample(record["y"])
        bx = BoundsBox(**record["box_x"])
        by = BoundsBox(**record["box_y"])
    except (TypeError, InvalidBoxError, ValueError) as e:
        raise MalformedRecordError(f"failure record is malformed: {e}") from e
    return build_report(x, y, bx, by)


def tightness_sweep(box_x: BoundsBox, box_y: BoundsBox, n: int, weights: Sequence[float],
                    replicates: int, seed: int,
                    tolerance_abs: float = DEFAULT_TOLERANCE_ABS,
                    workers: int = 1) -> List[Dict[str, Any]]:
    """
    Median tightness as the mixture weight moves from independence to coupling.

    One mixture spec per weight, seeded ``derive_seed(seed, i)``; returns one
    row per weight.
    """
    specs = [
        SamplerSpec(
            family=SamplerFamily.MIXTURE,
            box_x=box_x,
            box_y=box_y,
            n=n,
            seed=derive_seed(seed, index),
            w=float(w),
            spec_id=f"mixture-w{float(w)!r}",
        )
        for index, w in enumerate(weights)
    ]
    config = CampaignConfig(
        specs=specs, replicates=replicates, tolerance_abs=tolerance_abs, workers=workers
    )
    result = run_campaign(config)

    rows = []
    for spec, summary in zip(specs, result.per_spec):
        rows.append({
            "w": spec.w,
            "tightness_min": summary.tightness_min,
            "tightness_median": summary.tightness_median,
            "tightness_max": summary.tightness_max,
            "median_dcov": summary.median_dcov,
            "chain_violations": summary.chain_violations,
        })
    return rows

