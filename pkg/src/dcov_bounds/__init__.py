"""
dcov-bounds - distance covariance estimates and upper bounds for bounded random vectors.

This package computes V-statistic estimates of distance covariance, distance
variance and distance correlation, evaluates the closed-form bound
(1/2) sqrt((b-a)(d-c) sqrt(NM)) for vectors in [a, b]^N x [c, d]^M, and checks
the whole inequality chain behind it on data and in seeded Monte Carlo runs.
"""

__version__ = "1.0.0"

from .core.bounds import BoundReport, build_report, theorem_bound
from .core.campaign import CampaignConfig, CampaignRunner, run_campaign
from .core.estimators import DCovEstimate, estimate
from .core.sample import BoundsBox, SampleMatrix, validate_sample
from .main import main

__all__ = [
    "main",
    "BoundReport",
    "BoundsBox",
    "CampaignConfig",
    "CampaignRunner",
    "DCovEstimate",
    "SampleMatrix",
    "build_report",
    "estimate",
    "run_campaign",
    "theorem_bound",
    "validate_sample",
]
