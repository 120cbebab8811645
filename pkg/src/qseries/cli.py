"""Command-line entry point: ``qseries list | verify | replay | eval``."""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import catalog, harness, replay
from .catalog import IdentityId
from .errors import DomainError, QSeriesError
from .replay import PipelineId
from .series import Kind, SeriesSpec, TruncationPolicy, evaluate

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def parse_complex(text: str) -> complex:
    """Parse '1.5', '-2', '0.3+0.4j' or '0.3+0.4i'."""
    cleaned = text.strip().replace(" ", "").replace("i", "j").replace("J", "j")
    if cleaned.lower() in ("", "nan", "inf", "-inf"):
        raise UsageError(f"not a finite complex number: {text!r}")
    try:
        return complex(cleaned)
    except ValueError:
        raise UsageError(f"not a complex number: {text!r}") from None


def parse_list(text: str | None) -> list[complex]:
    if text is None or text.strip() == "":
        return []
    return [parse_complex(part) for part in text.split(",")]


def parse_window(text: str) -> tuple[int, int]:
    try:
        parts = [int(p) for p in text.split(",")]
    except ValueError:
        raise UsageError(f"window must be M,K integers, got {text!r}") from None
    if len(parts) == 1:
        parts = parts * 2
    if len(parts) != 2 or min(parts) < 1:
        raise UsageError(f"window must be M,K with M, K >= 1, got {text!r}")
    return parts[0], parts[1]


def _format(z: complex | None) -> str:
    if z is None:
        return "-"
    z = complex(z)
    return f"{z.real:.17g}" if z.imag == 0 else f"{z.real:.17g}{z.imag:+.17g}j"


def _fmt_params(params) -> str:
    return ", ".join(f"{k}={v if isinstance(v, int) else _format(v)}" for k, v in params.items())


def _sampler(args) -> harness.SamplerConfig:
    try:
        return harness.SamplerConfig(
            seed=args.seed, margin=args.margin, complex_params=args.complex, trials=args.trials
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _print_failures(trials) -> None:
    for i, t in enumerate(trials):
        if t.status in ("PASS", "SKIPPED_CONTINUATION"):
            continue
        res = "-" if t.rel_residual is None else f"{t.rel_residual:.3e}"
        print(f"  trial {i}: {t.status} rel_residual={res} at {_fmt_params(t.params)}")
        if t.detail and "error" in t.detail:
            print(f"    {t.detail['error']}")


def cmd_list(args) -> int:
    for ident in IdentityId:
        print(ident.value)
    for pid in PipelineId:
        print(pid.value)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        ident = IdentityId.parse(args.identity)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    config = _sampler(args)
    report = harness.run_verification(ident, config, tolerance=args.tol)
    print(
        f"{ident.value}: {report.pass_count}/{len(report.trials)} passed, "
        f"max rel_residual {report.max_rel_residual:.3e} (tol {report.tolerance:g}), "
        f"{report.wall_time:.2f}s"
    )
    _print_failures(report.trials)
    if args.json:
        harness.write_report(report, args.json)
    return EXIT_OK if report.all_passed else EXIT_FAIL


def cmd_replay(args) -> int:
    try:
        pid = PipelineId.parse(args.pipeline)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    window = parse_window(args.window) if args.window else None
    config = _sampler(args)
    report = harness.run_replay(pid, config, window=window, tolerance=args.tol)
    skipped = sum(t.status == "SKIPPED_CONTINUATION" for t in report.trials)
    print(
        f"{pid.value}: {report.pass_count}/{len(report.trials)} passed"
        + (f", {skipped} skipped" if skipped else "")
        + f", max end-to-end residual {report.max_rel_residual:.3e} (tol {report.tolerance:g}), "
        f"window M,K={report.window[0]},{report.window[1]}, {report.wall_time:.2f}s"
    )
    worst: dict[str, float] = {}
    for proof in report.proofs:
        if proof is None:
            continue
        for name, res in proof.steps:
            worst[name] = max(worst.get(name, 0.0), res)
    for name in replay.STEP_NAMES:
        if name in worst:
            limit = replay.INTERCHANGE_TOL if name == "interchange" else report.tolerance
            print(f"  {name:<15} max {worst[name]:.3e} (limit {limit:g})")
    _print_failures(report.trials)
    if args.json:
        harness.write_report(report, args.json)
    return EXIT_OK if report.all_passed else EXIT_FAIL


def cmd_eval(args) -> int:
    kind = Kind(args.kind)
    num, den = parse_list(args.num), parse_list(args.den)
    z = parse_complex(args.z)
    q = parse_complex(args.q) if args.q is not None else None
    vwp = parse_complex(args.vwp) if args.vwp is not None else None
    if kind.basic and q is None:
        raise UsageError(f"{kind.value} series need --q")
    if not kind.basic and q is not None:
        raise UsageError(f"{kind.value} series take no --q")
    if args.max_terms < 1:
        raise UsageError("--max-terms must be positive")
    try:
        spec = SeriesSpec(kind, num, den, z, q, vwp=vwp)
    except (ValueError, DomainError) as exc:
        raise UsageError(str(exc)) from None
    policy = TruncationPolicy(max_terms_per_tail=args.max_terms)
    try:
        res = evaluate(spec, policy)
    except QSeriesError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(f"value          {_format(res.value)}")
    terms = f"{res.upper_terms_used}"
    if kind.bilateral:
        terms += f" upper, {res.lower_terms_used} lower"
    print(f"terms used     {terms}")
    print(f"tail estimate  {res.tail_estimate:.3e}")
    print(f"condition      {res.condition:.3e}")
    print(f"status         {res.status.value}")
    return EXIT_OK if res.status.value == "OK" else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qseries", description="Evaluate and verify q-series identities.")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="identity and pipeline ids, one per line").set_defaults(func=cmd_list)

    def common(p, trials):
        p.add_argument("--trials", type=int, default=trials)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--margin", type=float, default=0.05)
        p.add_argument("--tol", type=float, default=None, help="override the default tolerance")
        p.add_argument("--complex", action="store_true", help="sample complex parameters")
        p.add_argument("--json", metavar="PATH", default=None, help="write the JSON report here")

    v = sub.add_parser("verify", help="randomized residual checks of one catalog identity")
    v.add_argument("identity")
    common(v, 100)
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("replay", help="numerical replay of one proof pipeline")
    r.add_argument("pipeline")
    common(r, 20)
    r.add_argument("--window", metavar="M,K", default=None)
    r.set_defaults(func=cmd_replay)

    e = sub.add_parser("eval", help="evaluate one series")
    e.add_argument("kind", choices=[k.value for k in Kind])
    e.add_argument("--num", default="", help="comma-separated numerator parameters")
    e.add_argument("--den", default="", help="comma-separated denominator parameters")
    e.add_argument("--q", default=None)
    e.add_argument("--z", required=True)
    e.add_argument("--vwp", default=None, help="v of the factor (1 - v q^2k)/(1 - v)")
    e.add_argument("--max-terms", type=int, default=TruncationPolicy().max_terms_per_tail)
    e.set_defaults(func=cmd_eval)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qseries: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
