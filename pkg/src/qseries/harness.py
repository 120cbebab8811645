"""Seeded in-domain sampling, batch verification, proof replay and JSON reports."""

from __future__ import annotations

import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from . import catalog, replay
from .catalog import IdentityId, ResidualReport
from .errors import DomainError, QSeriesError, SamplingExhausted
from .replay import PipelineId, ProofReport
from .sampling import MAX_REJECTIONS, rejection_sample, trial_rng
from .series import DEFAULT_POLICY, EvalResult, TruncationPolicy

SCHEMA_VERSION = 1
#: rounding error in a sum is about condition * eps; keep it 100x below tolerance
CONDITION_SAFETY = 100.0


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 0
    margin: float = 0.05
    complex_params: bool = False
    trials: int = 100
    #: reject points whose series condition number exceeds this; None derives it from the tolerance
    max_condition: float | None = None

    def __post_init__(self):
        if not 0.0 < self.margin < 0.5:
            raise ValueError("margin must lie in (0, 0.5)")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.max_condition is not None and not self.max_condition >= 1.0:
            raise ValueError("max_condition must be at least 1")

    def condition_bound(self, tolerance: float, default_tolerance: float | None = None) -> float:
        """Explicit max_condition, else tolerance / (100 eps).

        A tolerance tighter than ``default_tolerance`` does not shrink the
        sampled region; it only makes the residual test stricter.
        """
        if self.max_condition is not None:
            return self.max_condition
        if default_tolerance is not None:
            tolerance = max(tolerance, default_tolerance)
        return tolerance / (CONDITION_SAFETY * sys.float_info.epsilon)

    def as_dict(self) -> dict[str, Any]:
        return {"seed": self.seed, "margin": self.margin, "complex": self.complex_params, "trials": self.trials}


def sample_params(
    identity: IdentityId | str,
    config: SamplerConfig,
    trial: int = 0,
    policy: TruncationPolicy = DEFAULT_POLICY,
    tolerance: float | None = None,
) -> dict[str, complex]:
    """Rejection-sample an in-domain, well-conditioned parameter vector.

    A point is kept when ``domain_check`` passes with the configured margin
    and the condition number of the series involved is below
    ``config.condition_bound``.  Deterministic in (seed, trial).
    """
    ident = catalog.get(identity)
    tol = ident.tolerance if tolerance is None else tolerance
    bound = config.condition_bound(tol, ident.tolerance)

    def accept(p):
        if not catalog.domain_check(ident.id, p, config.margin):
            return False
        cond = catalog.condition_number(ident.id, p, policy)
        return cond is None or cond <= bound

    rng = trial_rng(config.seed, trial, ident.id.value)
    return rejection_sample(
        ident.param_names, accept, rng, config.complex_params, ident.integer_params, ident.id.value
    )


# --- reports ----------------------------------------------------------------


def _cnum(z: complex | None):
    if z is None:
        return None
    z = complex(z)
    return [z.real, z.imag]


def _param_json(params: Mapping[str, Any]) -> dict[str, Any]:
    return {k: (v if isinstance(v, int) else _cnum(v)) for k, v in params.items()}


def _float(x: float | None):
    if x is None or not math.isfinite(x):
        return None
    return x


@dataclass
class TrialRecord:
    params: dict[str, Any]
    lhs: complex | None
    rhs: complex | None
    rel_residual: float | None
    status: str
    detail: dict[str, Any] | None = None

    @property
    def passed(self) -> bool:
        return self.status == "PASS"

    def to_json(self) -> dict[str, Any]:
        out = {
            "params": _param_json(self.params),
            "lhs": _cnum(self.lhs),
            "rhs": _cnum(self.rhs),
            "rel_residual": _float(self.rel_residual),
            "status": self.status,
        }
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class VerificationReport:
    identity: IdentityId
    config: SamplerConfig
    tolerance: float
    trials: list[TrialRecord] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def pass_count(self) -> int:
        return sum(t.passed for t in self.trials)

    @property
    def max_rel_residual(self) -> float:
        vals = [t.rel_residual for t in self.trials if t.rel_residual is not None and math.isfinite(t.rel_residual)]
        return max(vals, default=math.nan)

    @property
    def all_passed(self) -> bool:
        return self.pass_count == len(self.trials)

    def to_json(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "identity": self.identity.value,
            "config": {
                **self.config.as_dict(),
                "tol": self.tolerance,
                "max_condition": self.config.condition_bound(
                    self.tolerance, catalog.get(self.identity).tolerance
                ),
            },
            "trials": [t.to_json() for t in self.trials],
            "summary": {"pass_count": self.pass_count, "max_rel_residual": _float(self.max_rel_residual)},
        }


def _verification_trial(
    identity: IdentityId, config: SamplerConfig, policy: TruncationPolicy, tol: float, trial: int
) -> TrialRecord:
    try:
        params = sample_params(identity, config, trial, policy, tol)
    except SamplingExhausted as exc:
        return TrialRecord({}, None, None, None, "ERROR", {"error": str(exc)})
    try:
        rep: ResidualReport = catalog.residual(identity, params, policy, tolerance=tol)
    except (QSeriesError, OverflowError, ZeroDivisionError) as exc:
        return TrialRecord(params, None, None, None, "ERROR", {"error": f"{type(exc).__name__}: {exc}"})
    if rep.error is not None:
        return TrialRecord(params, rep.lhs_value, rep.rhs, None, "ERROR", {"error": rep.error})
    status = "PASS" if rep.passed else ("FAIL" if rep.status == "OK" else f"FAIL_{rep.status}")
    return TrialRecord(params, rep.lhs_value, rep.rhs, rep.rel_residual, status)


def run_verification(
    identity: IdentityId | str,
    config: SamplerConfig,
    policy: TruncationPolicy = DEFAULT_POLICY,
    tolerance: float | None = None,
) -> VerificationReport:
    ident = catalog.get(identity)
    tol = ident.tolerance if tolerance is None else tolerance
    t0 = time.perf_counter()
    report = VerificationReport(ident.id, config, tol)
    for i in range(config.trials):
        report.trials.append(_verification_trial(ident.id, config, policy, tol, i))
    report.wall_time = time.perf_counter() - t0
    return report


@dataclass
class ReplayReport:
    pipeline: PipelineId
    config: SamplerConfig
    window: tuple[int, int]
    tolerance: float
    trials: list[TrialRecord] = field(default_factory=list)
    proofs: list[ProofReport | None] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def pass_count(self) -> int:
        return sum(t.passed for t in self.trials)

    @property
    def max_rel_residual(self) -> float:
        vals = [t.rel_residual for t in self.trials if t.rel_residual is not None and math.isfinite(t.rel_residual)]
        return max(vals, default=math.nan)

    @property
    def all_passed(self) -> bool:
        return all(t.status in ("PASS", "SKIPPED_CONTINUATION") for t in self.trials)

    def to_json(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "pipeline": self.pipeline.value,
            "config": {
                **self.config.as_dict(),
                "window": list(self.window),
                "tol": self.tolerance,
                "max_condition": self.config.condition_bound(
                    self.tolerance, replay.default_tolerance(self.pipeline)
                ),
            },
            "trials": [t.to_json() for t in self.trials],
            "summary": {"pass_count": self.pass_count, "max_rel_residual": _float(self.max_rel_residual)},
        }


def _replay_trial(pipeline: PipelineId, config: SamplerConfig, window, tol: float, trial: int, params=None):
    if params is None:
        rng = trial_rng(config.seed, trial, pipeline.value)
        bound = config.condition_bound(tol, replay.default_tolerance(pipeline))
        try:
            params = replay.sample_point(pipeline, rng, config.margin, config.complex_params, bound, window)
        except SamplingExhausted as exc:
            return TrialRecord({}, None, None, None, "ERROR", {"error": str(exc)}), None
    try:
        proof = replay.verify_interchange(replay.ProofPipeline(pipeline, params, window), tolerance=tol)
    except DomainError as exc:
        return TrialRecord(params, None, None, None, "SKIPPED_CONTINUATION", {"error": str(exc)}), None
    except (QSeriesError, OverflowError, ZeroDivisionError) as exc:
        return TrialRecord(params, None, None, None, "ERROR", {"error": f"{type(exc).__name__}: {exc}"}), None
    steps = {name: _float(res) for name, res in proof.steps}
    rec = TrialRecord(
        params, proof.assembled, proof.target, proof.end_to_end,
        "PASS" if proof.passed else "FAIL", {"steps": steps},
    )
    return rec, proof


def run_replay(
    pipeline: PipelineId | str,
    config: SamplerConfig,
    window: tuple[int, int] | None = None,
    tolerance: float | None = None,
    points=None,
) -> ReplayReport:
    """Replay a proof pipeline at ``config.trials`` sampled points (or at ``points``)."""
    pid = PipelineId.parse(pipeline) if isinstance(pipeline, str) else pipeline
    window = replay.default_window(pid) if window is None else tuple(window)
    tol = replay.default_tolerance(pid) if tolerance is None else tolerance
    t0 = time.perf_counter()
    report = ReplayReport(pid, config, window, tol)
    if points is None:
        points = [None] * config.trials
    for i, p in enumerate(points):
        rec, proof = _replay_trial(pid, config, window, tol, i, p)
        report.trials.append(rec)
        report.proofs.append(proof)
    report.wall_time = time.perf_counter() - t0
    return report


def dumps(report: VerificationReport | ReplayReport) -> str:
    return json.dumps(report.to_json(), indent=2, allow_nan=False) + "\n"


def write_report(report: VerificationReport | ReplayReport, path: str | Path) -> None:
    Path(path).write_text(dumps(report), encoding="utf-8")
