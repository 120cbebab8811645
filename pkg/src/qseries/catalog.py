"""Executable catalog of bilateral and unilateral summation/transformation identities.

Each entry knows its parameters, its convergence conditions, how to build the
series side, and how to evaluate the other side (a closed product/Gamma form,
or a prefactor times another series for the two transformations).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Mapping, Sequence

from .errors import DomainError, PoleError, QSeriesError
from .pochhammer import INF, qpoch_ratio
from .scalar import POLE_TOL, gamma, nearest_nonpositive_integer
from .series import (
    DEFAULT_POLICY,
    EvalResult,
    Kind,
    SeriesSpec,
    Status,
    TruncationPolicy,
    detect_termination,
    evaluate,
)

#: Distance to a pole below which domain_check rejects a parameter point.
POLE_MARGIN = 1e-6

Params = Mapping[str, complex]


class IdentityId(Enum):
    QBINOMIAL = "qbinomial"
    QGAUSS = "qgauss"
    RAMANUJAN_1PSI1 = "ramanujan_1psi1"
    PSI22_TRANSFORM = "psi22_transform"
    PSI22_SUM = "psi22_sum"
    BAILEY22_TRANSFORM = "bailey22_transform"
    GAUSS_2F1 = "gauss_2f1"
    DOUGALL_2H2 = "dougall_2h2"
    ROGERS_6PHI5 = "rogers_6phi5"
    BAILEY_6PSI6 = "bailey_6psi6"
    JACKSON_8PHI7 = "jackson_8phi7"

    @classmethod
    def parse(cls, text: str) -> "IdentityId":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise KeyError(f"unknown identity id {text!r}") from None


Factor = tuple[str, complex]


@dataclass(frozen=True)
class ClosedForm:
    """Ratio of labelled q-Pochhammer products (``index``) or of Gamma values."""

    num: tuple[Factor, ...]
    den: tuple[Factor, ...]
    q: complex | None = None
    index: float = INF

    @property
    def is_gamma(self) -> bool:
        return self.q is None

    def value(self) -> complex:
        if self.is_gamma:
            out = 1.0 + 0j
            for label, x in self.den:
                if nearest_nonpositive_integer(x) is not None:
                    raise PoleError(f"Gamma({label}) is infinite at {label}={x!r}")
            for label, x in self.num:
                out *= gamma(x)
            for label, x in self.den:
                out /= gamma(x)
            return out
        for label, x in self.den:
            if _q_product_min_factor(x, self.q, self.index) < POLE_TOL:
                raise PoleError(f"({label};q)_{_index_text(self.index)} vanishes at {label}={x!r}")
        return qpoch_ratio([x for _, x in self.num], [x for _, x in self.den], self.q, self.index)

    def min_pole_distance(self) -> float:
        if self.is_gamma:
            return min((_gamma_pole_distance(x) for _, x in self.den), default=math.inf)
        return min((_q_product_min_factor(x, self.q, self.index) for _, x in self.den), default=math.inf)


def _index_text(index: float) -> str:
    return "inf" if index == INF else str(int(index))


def _gamma_pole_distance(x: complex) -> float:
    n = min(round(x.real), 0)
    return abs(x - n)


def _q_product_min_factor(x: complex, q: complex, index: float) -> float:
    """min over the factors of (x;q)_index of |1 - x q^j|."""
    best = math.inf
    if index == INF or index >= 0:
        y = x
        j = 0
        limit = math.inf if index == INF else int(index)
        while j < limit and abs(y) > 1e-3:
            best = min(best, abs(1.0 - y))
            y *= q
            j += 1
        if j < limit:
            best = min(best, abs(1.0 - y))
        return best
    for j in range(1, -int(index) + 1):
        best = min(best, abs(1.0 - x * q ** (-j)))
    return best


@dataclass(frozen=True)
class Condition:
    """``left < right`` (strict, before margin)."""

    label: str
    left: float
    right: float

    def holds(self, margin: float) -> bool:
        return self.left + margin <= self.right


@dataclass(frozen=True)
class Identity:
    id: IdentityId
    param_names: tuple[str, ...]
    conditions: Callable[[Params], list[Condition]]
    lhs: Callable[[Params], SeriesSpec]
    closed: Callable[[Params], ClosedForm]
    rhs_series: Callable[[Params], SeriesSpec] | None = None
    tolerance: float = 1e-8
    integer_params: tuple[str, ...] = ()
    proof_region: str = ""
    claimed_region: str = ""
    extra: Mapping[str, str] = field(default_factory=dict)

    @property
    def is_transformation(self) -> bool:
        return self.rhs_series is not None


def _qp(labels_values: Sequence[Factor]) -> tuple[Factor, ...]:
    return tuple((lbl, complex(v)) for lbl, v in labels_values)


# --- entries --------------------------------------------------------------


def _qbinomial() -> Identity:
    def lhs(p):
        return SeriesSpec(Kind.PHI, [p["a"]], [], p["z"], p["q"])

    def closed(p):
        a, q, z = p["a"], p["q"], p["z"]
        return ClosedForm(_qp([("az", a * z)]), _qp([("z", z)]), q)

    return Identity(
        IdentityId.QBINOMIAL, ("a", "q", "z"),
        lambda p: [Condition("|z| < 1", abs(p["z"]), 1.0)],
        lhs, closed, tolerance=1e-10,
        proof_region="|z| < 1", claimed_region="|z| < 1, or terminating",
    )


def _qgauss() -> Identity:
    def lhs(p):
        a, b, c, q = p["a"], p["b"], p["c"], p["q"]
        return SeriesSpec(Kind.PHI, [a, b], [c], c / (a * b), q)

    def closed(p):
        a, b, c, q = p["a"], p["b"], p["c"], p["q"]
        return ClosedForm(_qp([("c/a", c / a), ("c/b", c / b)]), _qp([("c", c), ("c/ab", c / (a * b))]), q)

    return Identity(
        IdentityId.QGAUSS, ("a", "b", "c", "q"),
        lambda p: [Condition("|c/ab| < 1", abs(p["c"] / (p["a"] * p["b"])), 1.0)],
        lhs, closed, tolerance=1e-10,
        proof_region="|c/ab| < 1", claimed_region="|c/ab| < 1, or terminating",
    )


def _ramanujan() -> Identity:
    def lhs(p):
        return SeriesSpec(Kind.PSI, [p["a"]], [p["b"]], p["z"], p["q"])

    def closed(p):
        a, b, q, z = p["a"], p["b"], p["q"], p["z"]
        return ClosedForm(
            _qp([("q", q), ("b/a", b / a), ("az", a * z), ("q/az", q / (a * z))]),
            _qp([("b", b), ("q/a", q / a), ("z", z), ("b/az", b / (a * z))]),
            q,
        )

    return Identity(
        IdentityId.RAMANUJAN_1PSI1, ("a", "b", "q", "z"),
        lambda p: [
            Condition("|b/a| < |z|", abs(p["b"] / p["a"]), abs(p["z"])),
            Condition("|z| < 1", abs(p["z"]), 1.0),
        ],
        lhs, closed,
        proof_region="|b/a| < |z| < 1", claimed_region="|b/a| < |z| < 1, or terminating",
    )


def _psi22_transform() -> Identity:
    def lhs(p):
        a, b, c, d, q = p["a"], p["b"], p["c"], p["d"], p["q"]
        return SeriesSpec(Kind.PSI, [a, b], [c, d], d / (a * b), q)

    def closed(p):
        a, b, c, d, q = p["a"], p["b"], p["c"], p["d"], p["q"]
        return ClosedForm(
            _qp([("q", q), ("c/a", c / a), ("d/a", d / a), ("d/b", d / b)]),
            _qp([("q/a", q / a), ("c", c), ("d", d), ("d/ab", d / (a * b))]),
            q,
        )

    def rhs_series(p):
        a, b, c, d, q = p["a"], p["b"], p["c"], p["d"], p["q"]
        return SeriesSpec(Kind.PHI, [q / c, a * q / d], [q / b], c / a, q)

    return Identity(
        IdentityId.PSI22_TRANSFORM, ("a", "b", "c", "d", "q"),
        lambda p: [
            Condition("|d/ab| < 1", abs(p["d"] / (p["a"] * p["b"])), 1.0),
            Condition("|c| < 1", abs(p["c"]), 1.0),
            Condition("|c/a| < 1", abs(p["c"] / p["a"]), 1.0),
        ],
        lhs, closed, rhs_series,
        proof_region="max(|d/ab|, |c|, |c/a|) < 1",
        claimed_region="max(|d/ab|, |c|, |c/a|) < 1 (all three enforced), or terminating",
    )


def _psi22_sum() -> Identity:
    def lhs(p):
        a, b, c, q = p["a"], p["b"], p["c"], p["q"]
        return SeriesSpec(Kind.PSI, [a, b], [a * q, c], q / b, q)

    def closed(p):
        a, b, c, q = p["a"], p["b"], p["c"], p["q"]
        return ClosedForm(
            _qp([("q", q), ("q", q), ("aq/b", a * q / b), ("c/a", c / a)]),
            _qp([("aq", a * q), ("q/a", q / a), ("q/b", q / b), ("c", c)]),
            q,
        )

    return Identity(
        IdentityId.PSI22_SUM, ("a", "b", "c", "q"),
        lambda p: [
            Condition("|q/b| < 1", abs(p["q"] / p["b"]), 1.0),
            Condition("|c| < 1", abs(p["c"]), 1.0),
        ],
        lhs, closed,
        proof_region="max(|q/b|, |c|) < 1", claimed_region="max(|q/b|, |c|) < 1, or terminating",
    )


def _bailey22() -> Identity:
    def lhs(p):
        a, b, c, d, q, z = p["a"], p["b"], p["c"], p["d"], p["q"], p["z"]
        return SeriesSpec(Kind.PSI, [a, b], [c, d], z, q)

    def closed(p):
        a, b, c, d, q, z = p["a"], p["b"], p["c"], p["d"], p["q"], p["z"]
        return ClosedForm(
            _qp([("az", a * z), ("d/a", d / a), ("c/b", c / b), ("dq/abz", d * q / (a * b * z))]),
            _qp([("z", z), ("d", d), ("q/b", q / b), ("cd/abz", c * d / (a * b * z))]),
            q,
        )

    def rhs_series(p):
        a, b, c, d, q, z = p["a"], p["b"], p["c"], p["d"], p["q"], p["z"]
        return SeriesSpec(Kind.PSI, [a, a * b * z / d], [a * z, c], d / a, q)

    return Identity(
        IdentityId.BAILEY22_TRANSFORM, ("a", "b", "c", "d", "q", "z"),
        lambda p: [
            Condition("|z| < 1", abs(p["z"]), 1.0),
            Condition("|cd/abz| < 1", abs(p["c"] * p["d"] / (p["a"] * p["b"] * p["z"])), 1.0),
            Condition("|d/a| < 1", abs(p["d"] / p["a"]), 1.0),
            Condition("|c/b| < 1", abs(p["c"] / p["b"]), 1.0),
        ],
        lhs, closed, rhs_series,
        proof_region="max(|z|, |cd/abz|, |d/a|, |c/b|) < 1",
        claimed_region="max(|z|, |cd/abz|, |d/a|, |c/b|) < 1, or terminating",
    )


def _gauss() -> Identity:
    def lhs(p):
        return SeriesSpec(Kind.F, [p["a"], p["b"]], [p["c"]], 1.0)

    def closed(p):
        a, b, c = p["a"], p["b"], p["c"]
        return ClosedForm((("c", c), ("c-a-b", c - a - b)), (("c-a", c - a), ("c-b", c - b)))

    return Identity(
        IdentityId.GAUSS_2F1, ("a", "b", "c"),
        lambda p: [Condition("Re(c-a-b) > 0", 0.0, (p["c"] - p["a"] - p["b"]).real)],
        lhs, closed, tolerance=1e-10,
        proof_region="Re(c-a-b) > 0", claimed_region="Re(c-a-b) > 0, or terminating",
    )


def _dougall() -> Identity:
    def lhs(p):
        return SeriesSpec(Kind.H, [p["a"], p["b"]], [p["c"], p["d"]], 1.0)

    def closed(p):
        a, b, c, d = p["a"], p["b"], p["c"], p["d"]
        return ClosedForm(
            (("1-a", 1 - a), ("1-b", 1 - b), ("c", c), ("d", d), ("c+d-a-b-1", c + d - a - b - 1)),
            (("c-a", c - a), ("c-b", c - b), ("d-a", d - a), ("d-b", d - b)),
        )

    return Identity(
        IdentityId.DOUGALL_2H2, ("a", "b", "c", "d"),
        lambda p: [Condition("Re(c+d-a-b-1) > 0", 0.0, (p["c"] + p["d"] - p["a"] - p["b"] - 1).real)],
        lhs, closed,
        proof_region="Re(a) < min(Re(c), Re(d-b), Re(c+d-b-1))",
        claimed_region="Re(c+d-a-b-1) > 0 (by analytic continuation), or terminating",
    )


def _rogers() -> Identity:
    def lhs(p):
        a, b, c, d, q = p["a"], p["b"], p["c"], p["d"], p["q"]
        return SeriesSpec(
            Kind.PHI, [a, b, c, d], [a * q / b, a * q / c, a * q / d], a * q / (b * c * d), q, vwp=a
        )

    def closed(p):
        a, b, c, d, q = p["a"], p["b"], p["c"], p["d"], p["q"]
        return ClosedForm(
            _qp([("aq", a * q), ("aq/bc", a * q / (b * c)), ("aq/bd", a * q / (b * d)), ("aq/cd", a * q / (c * d))]),
            _qp([("aq/b", a * q / b), ("aq/c", a * q / c), ("aq/d", a * q / d), ("aq/bcd", a * q / (b * c * d))]),
            q,
        )

    return Identity(
        IdentityId.ROGERS_6PHI5, ("a", "b", "c", "d", "q"),
        lambda p: [Condition("|aq/bcd| < 1", abs(p["a"] * p["q"] / (p["b"] * p["c"] * p["d"])), 1.0)],
        lhs, closed,
        proof_region="|aq/bcd| < 1", claimed_region="|aq/bcd| < 1, or terminating",
    )


def _bailey66() -> Identity:
    def lhs(p):
        a, b, c, d, e, q = (p[k] for k in ("a", "b", "c", "d", "e", "q"))
        return SeriesSpec(
            Kind.PSI, [b, c, d, e], [a * q / b, a * q / c, a * q / d, a * q / e],
            a * a * q / (b * c * d * e), q, vwp=a,
        )

    def closed(p):
        a, b, c, d, e, q = (p[k] for k in ("a", "b", "c", "d", "e", "q"))
        aq = a * q
        return ClosedForm(
            _qp([
                ("aq", aq), ("aq/bc", aq / (b * c)), ("aq/bd", aq / (b * d)), ("aq/be", aq / (b * e)),
                ("aq/cd", aq / (c * d)), ("aq/ce", aq / (c * e)), ("aq/de", aq / (d * e)),
                ("q", q), ("q/a", q / a),
            ]),
            _qp([
                ("aq/b", aq / b), ("aq/c", aq / c), ("aq/d", aq / d), ("aq/e", aq / e),
                ("q/b", q / b), ("q/c", q / c), ("q/d", q / d), ("q/e", q / e),
                ("a^2q/bcde", a * aq / (b * c * d * e)),
            ]),
            q,
        )

    return Identity(
        IdentityId.BAILEY_6PSI6, ("a", "b", "c", "d", "e", "q"),
        lambda p: [Condition("|a^2q/bcde| < 1", abs(p["a"] ** 2 * p["q"] / (p["b"] * p["c"] * p["d"] * p["e"])), 1.0)],
        lhs, closed,
        proof_region="|1/c| < min(|b/aq|, |de/aq|, |bde/a^2q|)",
        claimed_region="|1/c| < |bde/a^2q| (radius of convergence, by analytic continuation), or terminating",
    )


def _jackson() -> Identity:
    def lhs(p):
        a, b, c, d, q = p["a"], p["b"], p["c"], p["d"], p["q"]
        n = int(p["n"])
        e = a * a * q ** (1 + n) / (b * c * d)
        return SeriesSpec(
            Kind.PHI,
            [a, b, c, d, e, q ** (-n)],
            [a * q / b, a * q / c, a * q / d, b * c * d * q ** (-n) / a, a * q ** (1 + n)],
            q, q, vwp=a,
        )

    def closed(p):
        a, b, c, d, q = p["a"], p["b"], p["c"], p["d"], p["q"]
        n = int(p["n"])
        return ClosedForm(
            _qp([("aq", a * q), ("aq/bc", a * q / (b * c)), ("aq/bd", a * q / (b * d)), ("aq/cd", a * q / (c * d))]),
            _qp([("aq/b", a * q / b), ("aq/c", a * q / c), ("aq/d", a * q / d), ("aq/bcd", a * q / (b * c * d))]),
            q, n,
        )

    return Identity(
        IdentityId.JACKSON_8PHI7, ("a", "b", "c", "d", "q", "n"),
        lambda p: [Condition("n >= 0", -1.0, float(p["n"]) + 1.0)],
        lhs, closed, tolerance=1e-10, integer_params=("n",),
        proof_region="terminating (q^-n parameter)", claimed_region="terminating (q^-n parameter)",
    )


CATALOG: dict[IdentityId, Identity] = {
    ident.id: ident
    for ident in (
        _qbinomial(), _qgauss(), _ramanujan(), _psi22_transform(), _psi22_sum(), _bailey22(),
        _gauss(), _dougall(), _rogers(), _bailey66(), _jackson(),
    )
}


def get(identity: IdentityId | str) -> Identity:
    if isinstance(identity, str):
        identity = IdentityId.parse(identity)
    return CATALOG[identity]


# --- checks -----------------------------------------------------------------


def _normalise(ident: Identity, params: Params) -> dict[str, complex]:
    missing = [n for n in ident.param_names if n not in params]
    if missing or len(params) != len(ident.param_names):
        raise ValueError(f"{ident.id.value} expects parameters {ident.param_names}, got {tuple(params)}")
    out = {}
    for name in ident.param_names:
        out[name] = int(params[name]) if name in ident.integer_params else complex(params[name])
    return out


def _terminates(spec: SeriesSpec) -> bool:
    bounds = detect_termination(spec)
    if bounds is None:
        return False
    upper, lower = bounds
    if spec.kind.bilateral:
        return upper is not None and lower is not None
    return upper is not None


def _series_pole_distance(spec: SeriesSpec) -> float:
    """Smallest |denominator factor| met while summing ``spec`` (inf if none)."""
    upper, lower = detect_termination(spec) or (None, None)
    best = math.inf
    if spec.vwp is not None:
        best = abs(1.0 - spec.vwp)
    if spec.kind.basic:
        q = spec.q
        for b in spec.den:
            best = min(best, _q_product_min_factor(b, q, INF if upper is None else upper))
        if spec.kind.bilateral:
            reach = _lower_reach(list(spec.num) + list(spec.den), q) if lower is None else -lower
            for a in spec.num:
                if reach:
                    best = min(best, _q_product_min_factor(a, q, -reach))
        return best
    for b in spec.den:
        m = round(b.real)
        if m <= 0 and (upper is None or -m < upper):
            best = min(best, abs(b - m))
    if spec.kind.bilateral:
        for a in spec.num:
            m = round(a.real)
            if m >= 1 and (lower is None or m <= -lower):
                best = min(best, abs(a - m))
    return best


def _lower_reach(params: Sequence[complex], q: complex) -> int:
    """Number of negative indices after which every factor is far from zero."""
    lq = -math.log(abs(q))
    reach = 1
    for p in params:
        m = abs(p)
        if m > 0:
            reach = max(reach, math.ceil(math.log(1e3 / m) / lq) + 1)
    return min(reach, 4096)


def domain_check(identity: IdentityId | str, params: Params, margin: float = 0.0) -> bool:
    """True when the parameters sit inside the identity's stated convergence region.

    Strict inequalities ``X < Y`` are enforced as ``X + margin <= Y``; the
    point is also rejected when any closed-form or series denominator factor
    lies within ``POLE_MARGIN`` of zero.
    """
    ident = get(identity)
    try:
        p = _normalise(ident, params)
    except (TypeError, ValueError):
        return False
    if "q" in p and not 0.0 < abs(p["q"]) < 1.0:
        return False
    try:
        specs = [ident.lhs(p)]
        if ident.rhs_series is not None:
            specs.append(ident.rhs_series(p))
    except (ZeroDivisionError, ValueError, QSeriesError):
        return False
    if not all(_terminates(s) for s in specs):
        if not all(c.holds(margin) for c in ident.conditions(p)):
            return False
    elif ident.id is IdentityId.JACKSON_8PHI7 and p["n"] < 0:
        return False
    try:
        if ident.closed(p).min_pole_distance() < POLE_MARGIN:
            return False
    except (ZeroDivisionError, OverflowError):
        return False
    return all(_series_pole_distance(s) >= POLE_MARGIN for s in specs)


def rhs_closed_form(identity: IdentityId | str, params: Params) -> complex:
    """Closed product/Gamma side of a summation identity.

    For the two transformations this is the product prefactor only; use
    :func:`rhs_value` for the full right-hand side.
    """
    ident = get(identity)
    return ident.closed(_normalise(ident, params)).value()


def rhs_value(
    identity: IdentityId | str, params: Params, policy: TruncationPolicy = DEFAULT_POLICY
) -> tuple[complex, EvalResult | None]:
    ident = get(identity)
    p = _normalise(ident, params)
    pre = ident.closed(p).value()
    if ident.rhs_series is None:
        return pre, None
    res = evaluate(ident.rhs_series(p), policy)
    return pre * res.value, res


def lhs_value(identity: IdentityId | str, params: Params, policy: TruncationPolicy = DEFAULT_POLICY) -> EvalResult:
    ident = get(identity)
    return evaluate(ident.lhs(_normalise(ident, params)), policy)


def condition_number(
    identity: IdentityId | str, params: Params, policy: TruncationPolicy = DEFAULT_POLICY
) -> float | None:
    """Largest sum |t_k| / |sum t_k| over the series on either side.

    Rounding error in a residual grows roughly like this number times the unit
    roundoff.  Returns None when a side cannot be evaluated, so callers surface
    that failure instead of silently dropping the point.
    """
    ident = get(identity)
    p = _normalise(ident, params)
    try:
        cond = evaluate(ident.lhs(p), policy).condition
        if ident.rhs_series is not None:
            cond = max(cond, evaluate(ident.rhs_series(p), policy).condition)
    except (QSeriesError, OverflowError, ZeroDivisionError):
        return None
    return cond


def relative_residual(x: complex, y: complex) -> float:
    return abs(x - y) / max(abs(x), abs(y), 1e-300)


@dataclass(frozen=True)
class ResidualReport:
    identity: IdentityId
    params: dict[str, complex]
    lhs: EvalResult | None
    rhs: complex | None
    rhs_series: EvalResult | None
    #: None when an error prevented the comparison
    abs_residual: float | None
    rel_residual: float | None
    tolerance: float
    passed: bool
    status: str
    error: str | None = None

    @property
    def lhs_value(self) -> complex | None:
        return None if self.lhs is None else self.lhs.value


def residual(
    identity: IdentityId | str,
    params: Params,
    policy: TruncationPolicy = DEFAULT_POLICY,
    tolerance: float | None = None,
    check_domain: bool = True,
) -> ResidualReport:
    """Evaluate both sides of an identity and report their discrepancy.

    Raises:
        DomainError: ``check_domain`` is set and the point fails ``domain_check``.
    """
    ident = get(identity)
    p = _normalise(ident, params)
    tol = ident.tolerance if tolerance is None else tolerance
    if check_domain and not domain_check(ident.id, p):
        raise DomainError(f"{ident.id.value}: parameters outside {ident.proof_region}: {p}")
    lhs = rhs = rhs_res = None
    try:
        lhs = evaluate(ident.lhs(p), policy)
        rhs, rhs_res = rhs_value(ident.id, p, policy)
    except PoleError as exc:
        return ResidualReport(ident.id, p, lhs, rhs, rhs_res, None, None, tol, False,
                              Status.POLE_IN_TERMS.value, f"{type(exc).__name__}: {exc}")
    except (QSeriesError, OverflowError, ZeroDivisionError) as exc:
        return ResidualReport(ident.id, p, lhs, rhs, rhs_res, None, None, tol, False,
                              "ERROR", f"{type(exc).__name__}: {exc}")
    abs_res = abs(lhs.value - rhs)
    rel = relative_residual(lhs.value, rhs)
    statuses_ok = lhs.status is Status.OK and (rhs_res is None or rhs_res.status is Status.OK)
    status = Status.OK.value if statuses_ok else Status.SLOW_CONVERGENCE.value
    return ResidualReport(ident.id, p, lhs, rhs, rhs_res, abs_res, rel, tol,
                          statuses_ok and rel <= tol, status)
