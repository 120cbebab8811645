"""Seeded point sets for the reduction chain and the cross-check of the two 2psi2 transformations.

Shared by the catalog tests (a few points) and the acceptance module (50).
"""

import sys

from qseries import catalog
from qseries.catalog import IdentityId as I, relative_residual
from qseries.errors import QSeriesError
from qseries.sampling import rejection_sample, trial_rng
from qseries.series import Kind, SeriesSpec, evaluate

EPS = sys.float_info.epsilon
MARGIN = 0.05


def _well_conditioned(specs, tol):
    try:
        return max(evaluate(s).condition for s in specs) <= tol / (100 * EPS)
    except (QSeriesError, ZeroDivisionError, OverflowError):
        return False


def _sample(names, ok, trial, label, cx, seed):
    def accept(p):
        try:
            return ok(p)
        except ZeroDivisionError:
            return False

    return rejection_sample(names, accept, trial_rng(seed, trial, label), cx, label=label)


def reduction_1psi1(trial, cx=False, seed=1, tol=1e-10):
    """1psi1 with b=q against the 1phi0 sum."""

    def ok(p):
        a, q, z = p["a"], p["q"], p["z"]
        return (
            abs(q / a) + MARGIN <= abs(z) <= 1 - MARGIN
            and catalog.domain_check(I.RAMANUJAN_1PSI1, dict(a=a, b=q, q=q, z=z), MARGIN)
            and _well_conditioned([SeriesSpec(Kind.PHI, [a], [], z, q)], tol)
        )

    p = _sample(("a", "q", "z"), ok, trial, "red_1psi1", cx, seed)
    x = evaluate(SeriesSpec(Kind.PSI, [p["a"]], [p["q"]], p["z"], p["q"])).value
    y = evaluate(SeriesSpec(Kind.PHI, [p["a"]], [], p["z"], p["q"])).value
    return p, relative_residual(x, y)


def reduction_2h2(trial, cx=False, seed=1, tol=1e-10):
    """2H2 with d=1 against 2F1 at unit argument."""

    def ok(p):
        return catalog.domain_check(I.GAUSS_2F1, p, MARGIN) and _well_conditioned(
            [SeriesSpec(Kind.F, [p["a"], p["b"]], [p["c"]], 1)], tol
        )

    p = _sample(("a", "b", "c"), ok, trial, "red_2h2", cx, seed)
    x = evaluate(SeriesSpec(Kind.H, [p["a"], p["b"]], [p["c"], 1], 1)).value
    y = evaluate(SeriesSpec(Kind.F, [p["a"], p["b"]], [p["c"]], 1)).value
    return p, relative_residual(x, y)


def reduction_6psi6(trial, cx=False, seed=1, tol=1e-10):
    """6psi6 with e=a against the very-well-poised 6phi5."""
    rogers = catalog.get(I.ROGERS_6PHI5)

    def ok(p):
        return (
            catalog.domain_check(I.ROGERS_6PHI5, p, MARGIN)
            and catalog.domain_check(I.BAILEY_6PSI6, dict(p, e=p["a"]), MARGIN)
            and _well_conditioned([rogers.lhs(p)], tol)
        )

    p = _sample(("a", "b", "c", "d", "q"), ok, trial, "red_6psi6", cx, seed)
    x = evaluate(catalog.get(I.BAILEY_6PSI6).lhs(dict(p, e=p["a"]))).value
    y = evaluate(rogers.lhs(p)).value
    return p, relative_residual(x, y)


def reduction_psi22_sum(trial, cx=False, seed=1, tol=1e-10):
    """The 2psi2 transformation at d=aq against the 2psi2 product."""

    def ok(p):
        return catalog.domain_check(I.PSI22_SUM, p, MARGIN) and catalog.domain_check(
            I.PSI22_TRANSFORM, dict(p, d=p["a"] * p["q"]), MARGIN
        )

    p = _sample(("a", "b", "c", "q"), ok, trial, "red_psi22_sum", cx, seed)
    x, _ = catalog.rhs_value(I.PSI22_TRANSFORM, dict(p, d=p["a"] * p["q"]))
    y = catalog.rhs_closed_form(I.PSI22_SUM, p)
    return p, relative_residual(x, y)


REDUCTIONS = {
    "1psi1_b=q": reduction_1psi1,
    "2h2_d=1": reduction_2h2,
    "6psi6_e=a": reduction_6psi6,
    "psi22_sum_d=aq": reduction_psi22_sum,
}


def btf_params(p):
    """Swap a and b and set z = d/ab, mapping a psi22_transform point to a bailey22_transform point."""
    return dict(a=p["b"], b=p["a"], c=p["c"], d=p["d"], q=p["q"], z=p["d"] / (p["a"] * p["b"]))


def transform_pair(trial, cx=False, seed=1, tol=1e-9):
    """Both transformation right-hand sides at one substituted point."""

    def ok(p):
        if not catalog.domain_check(I.PSI22_TRANSFORM, p, MARGIN):
            return False
        if not catalog.domain_check(I.BAILEY22_TRANSFORM, btf_params(p), MARGIN):
            return False
        cond = catalog.condition_number(I.PSI22_TRANSFORM, p)
        return cond is not None and cond <= tol / (100 * EPS)

    p = _sample(("a", "b", "c", "d", "q"), ok, trial, "tf_btf", cx, seed)
    return p, btf_params(p)
