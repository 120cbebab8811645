"""Numerics for unilateral and bilateral (basic) hypergeometric series.

Evaluation of phi / psi / F / H series, a catalog of classical summation
and transformation identities with residual checks, and a numerical replay
of the interchange-of-summation derivations of the bilateral sums.
"""

from .catalog import CATALOG, IdentityId, ResidualReport, domain_check, residual
from .errors import (
    DivergentSeries,
    DivisionByVanishingFactor,
    DomainError,
    NonFiniteError,
    PoleError,
    QSeriesError,
    SamplingExhausted,
)
from .harness import SamplerConfig, run_replay, run_verification, sample_params
from .pochhammer import poch, qpoch, qpoch_inf, qpoch_ratio
from .replay import PipelineId, ProofPipeline, ProofReport, verify_interchange, verify_key0, verify_key1, verify_key_2f1
from .scalar import gamma, rgamma
from .series import EvalResult, Kind, SeriesSpec, Status, TruncationPolicy, evaluate, term_ratio

__all__ = [
    "CATALOG", "IdentityId", "ResidualReport", "domain_check", "residual",
    "DivergentSeries", "DivisionByVanishingFactor", "DomainError", "NonFiniteError", "PoleError",
    "QSeriesError", "SamplingExhausted",
    "SamplerConfig", "run_replay", "run_verification", "sample_params",
    "poch", "qpoch", "qpoch_inf", "qpoch_ratio",
    "PipelineId", "ProofPipeline", "ProofReport", "verify_interchange",
    "verify_key0", "verify_key1", "verify_key_2f1",
    "gamma", "rgamma",
    "EvalResult", "Kind", "SeriesSpec", "Status", "TruncationPolicy", "evaluate", "term_ratio",
]
