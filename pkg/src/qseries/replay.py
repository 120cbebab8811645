"""Numerical replay of the multiply / interchange / shift derivations of the bilateral sums.

Every pipeline starts from a *key identity*

    P * sum_{k>=0} A(n, k) = R(n)        (n any integer),

multiplies it by a weight W(n) and sums over n.  Because A(n, k) vanishes
for n + k < 0, the double sum can be re-indexed with m = n + k >= 0 and
summed with k outermost:

    sum_n W(n) A(n, k) = sum_k outer(k) * sum_{m>=0} inner(k, m).

The inner sums have closed forms, ``outer(k) * closed(k)`` simplifies to
``C * s_k`` and ``P * C * sum_k s_k`` is the bilateral sum's closed form.

:func:`verify_interchange` checks every link of that chain numerically:

* ``interchange``: the rectangle 0 <= m <= M, 0 <= k <= K summed n-outer in
  original coordinates equals the same set summed k-outer in shifted
  coordinates.  The two use independently computed terms, so agreement is
  pure rounding; the residual is scaled by the sum of absolute terms.
* ``inner_sums``: each inner series (explicit up to M plus the engine tail)
  against its closed form.  Far out in k an inner sum can be tiny next to
  its own terms, so each error is weighted by |outer(k)|: the residual is
  the error those sums contribute to the k-outer total, relative to that
  total's absolute size.
* ``simplification``: ``outer(k) * closed(k)`` against ``C * s_k``, worst
  case over k.
* ``end_to_end``: the assembled value against the target identity's
  right-hand side.
* ``bilateral``: the assembled value against the engine's direct
  evaluation of the bilateral series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping

import numpy as np

from . import catalog
from .catalog import POLE_MARGIN, ClosedForm, Condition, IdentityId, relative_residual
from .errors import DomainError, QSeriesError
from .pochhammer import poch_ratio, qpoch_ratio
from .sampling import rejection_sample
from .scalar import ScaledProduct, exact_sum
from .series import Kind, SeriesSpec, eval_tail, evaluate, term_ratio

INTERCHANGE_TOL = 1e-12
STEP_NAMES = ("interchange", "inner_sums", "simplification", "end_to_end", "bilateral")


class PipelineId(Enum):
    P1_1PSI1 = "p1_1psi1"
    P2A_2PSI2 = "p2a_2psi2"
    P2B_2H2 = "p2b_2h2"
    P3_6PSI6 = "p3_6psi6"

    @classmethod
    def parse(cls, text: str) -> "PipelineId":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise KeyError(f"unknown pipeline id {text!r}") from None


def default_window(pid: PipelineId) -> tuple[int, int]:
    """(M, K): geometric decay needs 60 terms, power-law H tails 400."""
    return (400, 400) if pid is PipelineId.P2B_2H2 else (60, 60)


def default_tolerance(pid: PipelineId) -> float:
    return 1e-8 if pid is PipelineId.P2B_2H2 else 1e-9


@dataclass(frozen=True)
class ProofPipeline:
    id: PipelineId
    params: Mapping[str, complex]
    window: tuple[int, int] | None = None

    def __post_init__(self):
        pid = PipelineId.parse(self.id) if isinstance(self.id, str) else self.id
        object.__setattr__(self, "id", pid)
        window = default_window(pid) if self.window is None else tuple(int(w) for w in self.window)
        if len(window) != 2 or min(window) < 1:
            raise ValueError("window must be a pair (M, K) with M, K >= 1")
        object.__setattr__(self, "window", window)
        shape = _SHAPES[pid]
        missing = [name for name in shape.names if name not in self.params]
        if missing:
            raise ValueError(f"{pid.value} needs parameters {', '.join(missing)}")
        object.__setattr__(self, "params", {name: complex(self.params[name]) for name in shape.names})


@dataclass
class ProofReport:
    pipeline: PipelineId
    params: dict[str, complex]
    window: tuple[int, int]
    tolerance: float
    steps: list[tuple[str, float]] = field(default_factory=list)
    assembled: complex = 0j
    target: complex = 0j

    def residual(self, step: str) -> float:
        return dict(self.steps)[step]

    @property
    def end_to_end(self) -> float:
        return self.residual("end_to_end")

    @property
    def passed(self) -> bool:
        for name, res in self.steps:
            limit = INTERCHANGE_TOL if name == "interchange" else self.tolerance
            if not (res <= limit):
                return False
        return True


# --- small helpers ----------------------------------------------------------


def _sp(*factors: complex) -> ScaledProduct:
    out = ScaledProduct()
    for f in factors:
        out.mul(f)
    return out


def _mul_pow(sp: ScaledProduct, x: complex, n: int) -> ScaledProduct:
    """sp * x**n without overflowing in x**n."""
    x = complex(x)
    if n < 0:
        x, n = 1.0 / x, -n
    while n > 0:
        step = min(n, 32)
        sp.mul(x**step)
        n -= step
    return sp


def _scaled_times(sp: ScaledProduct, x: complex) -> complex:
    return ScaledProduct(sp.mantissa * x, sp.exponent).value


def _qp(*pairs) -> tuple[tuple[str, complex], ...]:
    return tuple((label, complex(x)) for label, x in pairs)


def _tail_after(spec: SeriesSpec, terms: list[complex]) -> complex:
    """sum_{k > M} t_k given t_0 .. t_M from :func:`_terms`."""
    M = len(terms) - 1
    if terms[-1] == 0:
        return 0j
    return eval_tail(spec, M + 1, seed_term=terms[-1] * term_ratio(spec, M)).value


def _terms(spec: SeriesSpec, count: int) -> list[complex]:
    """t_0 .. t_count of a series by its term-ratio recurrence."""
    out = [1.0 + 0j]
    t = 1.0 + 0j
    for m in range(count):
        if t != 0:
            t = t * term_ratio(spec, m)
        out.append(t)
    return out


# --- key identity in q for P1 / P2a -----------------------------------------


def _key0_prefactor(a, b, q) -> ClosedForm:
    return ClosedForm(_qp(("q", q), ("b/a", b / a)), _qp(("q/a", q / a), ("b", b)), q)


def _key0_term(a, b, q, n: int, k: int) -> ScaledProduct:
    sp = _sp(qpoch_ratio([q / b], [q], q, k), qpoch_ratio([a], [q], q, n + k))
    return _mul_pow(sp, b / a, k)


def _key0_ratio(a, b, q, n: int, k: int) -> complex:
    qk1 = q ** (k + 1)
    qnk = q ** (n + k)
    return (1 - qk1 / b) * (1 - a * qnk) / ((1 - qk1) * (1 - qnk * q)) * (b / a)


class _Shape:
    """Parameter-specific pieces of one pipeline."""

    names: tuple[str, ...] = ()
    target: IdentityId

    def __init__(self, p: Mapping[str, complex]):
        self.p = dict(p)

    def target_params(self) -> dict[str, complex]:
        return {name: self.p[name] for name in catalog.get(self.target).param_names}

    def extra_pole_distance(self) -> float:
        return math.inf

    # subclasses: conditions, prefactor, weight, key_term, key_ratio, key_rhs,
    # outer, inner_spec, inner_closed, simplified_const, simplified_spec


class _P1(_Shape):
    names = ("a", "b", "q", "z")
    target = IdentityId.RAMANUJAN_1PSI1

    def conditions(self):
        a, b, z = self.p["a"], self.p["b"], self.p["z"]
        return [Condition("|b/a| < |z|", abs(b / a), abs(z)), Condition("|z| < 1", abs(z), 1.0)]

    def prefactor(self):
        return _key0_prefactor(self.p["a"], self.p["b"], self.p["q"])

    def weight(self, n):
        return _mul_pow(ScaledProduct(), self.p["z"], n)

    def key_term(self, n, k):
        return _key0_term(self.p["a"], self.p["b"], self.p["q"], n, k)

    def key_ratio(self, n, k):
        return _key0_ratio(self.p["a"], self.p["b"], self.p["q"], n, k)

    def key_rhs(self, n):
        return qpoch_ratio([self.p["a"]], [self.p["b"]], self.p["q"], n)

    def outer(self, k):
        a, b, q, z = (self.p[x] for x in self.names)
        return _mul_pow(_sp(qpoch_ratio([q / b], [q], q, k)), b / (a * z), k)

    def inner_spec(self, k):
        return SeriesSpec(Kind.PHI, [self.p["a"]], [], self.p["z"], self.p["q"])

    def inner_closed(self, k):
        return _sp(self.simplified_const().value())

    def simplified_const(self):
        a, z, q = self.p["a"], self.p["z"], self.p["q"]
        return ClosedForm(_qp(("az", a * z)), _qp(("z", z)), q)

    def simplified_spec(self):
        a, b, q, z = (self.p[x] for x in self.names)
        return SeriesSpec(Kind.PHI, [q / b], [], b / (a * z), q)


class _P2a(_Shape):
    names = ("a", "b", "c", "d", "q")
    target = IdentityId.PSI22_TRANSFORM

    def conditions(self):
        a, b, c, d = (self.p[x] for x in "abcd")
        return [
            Condition("|c/a| < 1", abs(c / a), 1.0),
            Condition("|d/ab| < 1", abs(d / (a * b)), 1.0),
            Condition("|c| < 1", abs(c), 1.0),
        ]

    def prefactor(self):
        return _key0_prefactor(self.p["a"], self.p["c"], self.p["q"])

    def weight(self, n):
        a, b, c, d, q = (self.p[x] for x in self.names)
        return _mul_pow(_sp(qpoch_ratio([b], [d], q, n)), d / (a * b), n)

    def key_term(self, n, k):
        return _key0_term(self.p["a"], self.p["c"], self.p["q"], n, k)

    def key_ratio(self, n, k):
        return _key0_ratio(self.p["a"], self.p["c"], self.p["q"], n, k)

    def key_rhs(self, n):
        return qpoch_ratio([self.p["a"]], [self.p["c"]], self.p["q"], n)

    def outer(self, k):
        a, b, c, d, q = (self.p[x] for x in self.names)
        sp = _sp(qpoch_ratio([q / c], [q], q, k), qpoch_ratio([b], [d], q, -k))
        return _mul_pow(sp, b * c / d, k)

    def inner_spec(self, k):
        a, b, c, d, q = (self.p[x] for x in self.names)
        qk = q ** (-k)
        return SeriesSpec(Kind.PHI, [a, b * qk], [d * qk], d / (a * b), q)

    def inner_closed(self, k):
        a, d, q = self.p["a"], self.p["d"], self.p["q"]
        # (d q^-k / a)_inf / (d q^-k)_inf split into a finite balanced part
        return _sp(qpoch_ratio([d], [d / a], q, -k), self.simplified_const().value())

    def simplified_const(self):
        a, b, c, d, q = (self.p[x] for x in self.names)
        return ClosedForm(_qp(("d/a", d / a), ("d/b", d / b)), _qp(("d", d), ("d/ab", d / (a * b))), q)

    def simplified_spec(self):
        a, b, c, d, q = (self.p[x] for x in self.names)
        return SeriesSpec(Kind.PHI, [q / c, a * q / d], [q / b], c / a, q)


class _P2b(_Shape):
    names = ("a", "b", "c", "d")
    target = IdentityId.DOUGALL_2H2

    def conditions(self):
        a, b, c, d = (self.p[x] for x in self.names)
        return [
            Condition("Re(c-a) > 0", 0.0, (c - a).real),
            Condition("Re(d-a-b) > 0", 0.0, (d - a - b).real),
            Condition("Re(c+d-a-b-1) > 0", 0.0, (c + d - a - b - 1).real),
        ]

    def prefactor(self):
        a, c = self.p["a"], self.p["c"]
        return ClosedForm(_qp(("1-a", 1 - a), ("c", c)), _qp(("c-a", c - a)))

    def weight(self, n):
        return _sp(poch_ratio([self.p["b"]], [self.p["d"]], n))

    def key_term(self, n, k):
        a, c = self.p["a"], self.p["c"]
        return _sp(poch_ratio([1 - c], [1], k), poch_ratio([a], [1], n + k))

    def key_ratio(self, n, k):
        a, c = self.p["a"], self.p["c"]
        return (1 - c + k) * (a + n + k) / ((1 + k) * (1 + n + k))

    def key_rhs(self, n):
        return poch_ratio([self.p["a"]], [self.p["c"]], n)

    def key_tail_spec(self, n: int, k0: int) -> SeriesSpec:
        """The k-series of the key identity re-indexed from k0 as an F series."""
        a, c = self.p["a"], self.p["c"]
        den = [1 + n + k0] if k0 == 0 else [1 + k0]
        return SeriesSpec(Kind.F, [1 - c + k0, a + n + k0], den, 1.0)

    def outer(self, k):
        b, c, d = self.p["b"], self.p["c"], self.p["d"]
        return _sp(poch_ratio([1 - c], [1], k), poch_ratio([b], [d], -k))

    def inner_spec(self, k):
        a, b, d = self.p["a"], self.p["b"], self.p["d"]
        return SeriesSpec(Kind.F, [a, b - k], [d - k], 1.0)

    def inner_closed(self, k):
        a, d = self.p["a"], self.p["d"]
        # Gamma(d-k)/Gamma(d-a-k) = Gamma(d)/Gamma(d-a) * (d-a-k)_k/(d-k)_k
        return _sp(poch_ratio([d - a - k], [d - k], k), self.simplified_const().value())

    def simplified_const(self):
        a, b, d = self.p["a"], self.p["b"], self.p["d"]
        return ClosedForm(_qp(("d", d), ("d-a-b", d - a - b)), _qp(("d-a", d - a), ("d-b", d - b)))

    def simplified_spec(self):
        a, b, c, d = (self.p[x] for x in self.names)
        return SeriesSpec(Kind.F, [1 - c, 1 + a - d], [1 - b], 1.0)


class _P3(_Shape):
    names = ("a", "b", "c", "d", "e", "q")
    target = IdentityId.BAILEY_6PSI6

    def conditions(self):
        a, b, c, d, e, q = (self.p[x] for x in self.names)
        return [
            Condition("|aq/bc| < 1", abs(a * q / (b * c)), 1.0),
            Condition("|aq/cde| < 1", abs(a * q / (c * d * e)), 1.0),
            Condition("|a^2q/bcde| < 1", abs(a * a * q / (b * c * d * e)), 1.0),
        ]

    def extra_pole_distance(self):
        a, c = self.p["a"], self.p["c"]
        return min(abs(1 - a), abs(1 - c / a))

    def prefactor(self):
        a, b, c, q = (self.p[x] for x in "abcq")
        return ClosedForm(
            _qp(("cq/b", c * q / b), ("q/a", q / a), ("q", q), ("aq/bc", a * q / (b * c))),
            _qp(("cq/a", c * q / a), ("q/b", q / b), ("aq/b", a * q / b), ("q/c", q / c)),
            q,
        )

    def weight(self, n):
        a, b, c, d, e, q = (self.p[x] for x in self.names)
        sp = _sp((1 - a * q ** (2 * n)) / (1 - a), qpoch_ratio([d, e], [a * q / d, a * q / e], q, n))
        return _mul_pow(sp, a * q / (c * d * e), n)

    def _key(self):
        a, b, c, q = (self.p[x] for x in "abcq")
        return a, b, c, q

    def key_term(self, n, k):
        a, b, c, q = self._key()
        sp = _sp(
            (1 - c * q ** (2 * k) / a) / (1 - c / a),
            qpoch_ratio([c / a, b / a], [q, c * q / b], q, k),
            qpoch_ratio([c], [q], q, n + k),
            qpoch_ratio([a], [a * q / c], q, n - k),
        )
        return _mul_pow(sp, a / b, k)

    def key_ratio(self, n, k):
        a, b, c, q = self._key()
        qk = q**k
        j = n - k
        vwp = (1 - c * qk * qk * q * q / a) / (1 - c * qk * qk / a)
        base = (1 - c * qk / a) * (1 - b * qk / a) / ((1 - qk * q) * (1 - c * qk * q / b))
        mid = (1 - c * q ** (n + k)) / (1 - q ** (n + k + 1))
        low = (1 - a * q**j / c) / (1 - a * q ** (j - 1))
        return vwp * base * mid * low * (a / b)

    def key_rhs(self, n):
        a, b, c, q = self._key()
        value = qpoch_ratio([b, c], [a * q / b, a * q / c], q, n)
        return _scaled_times(_mul_pow(ScaledProduct(), a / b, n), value)

    def outer(self, k):
        a, b, c, d, e, q = (self.p[x] for x in self.names)
        sp = _sp(
            (1 - c * q ** (2 * k) / a) / (1 - c / a),
            qpoch_ratio([c / a, b / a], [q, c * q / b], q, k),
            (1 - a * q ** (-2 * k)) / (1 - a),
            qpoch_ratio([a], [a * q / c], q, -2 * k),
            qpoch_ratio([d, e], [a * q / d, a * q / e], q, -k),
        )
        return _mul_pow(sp, c * d * e / (b * q), k)

    def inner_spec(self, k):
        a, b, c, d, e, q = (self.p[x] for x in self.names)
        v = a * q ** (-2 * k)
        qk = q ** (-k)
        return SeriesSpec(
            Kind.PHI,
            [v, c, d * qk, e * qk],
            [v * q / c, a * q * qk / d, a * q * qk / e],
            a * q / (c * d * e),
            q,
            vwp=v,
        )

    def inner_closed(self, k):
        a, b, c, d, e, q = (self.p[x] for x in self.names)
        aq = a * q
        return _sp(
            qpoch_ratio([aq / c], [aq], q, -2 * k),
            qpoch_ratio([aq / d], [aq / (c * d)], q, -k),
            qpoch_ratio([aq / e], [aq / (c * e)], q, -k),
            self.simplified_const().value(),
        )

    def simplified_const(self):
        a, b, c, d, e, q = (self.p[x] for x in self.names)
        aq = a * q
        return ClosedForm(
            _qp(("aq", aq), ("aq/cd", aq / (c * d)), ("aq/ce", aq / (c * e)), ("aq/de", aq / (d * e))),
            _qp(("aq/c", aq / c), ("aq/d", aq / d), ("aq/e", aq / e), ("aq/cde", aq / (c * d * e))),
            q,
        )

    def simplified_spec(self):
        a, b, c, d, e, q = (self.p[x] for x in self.names)
        v = c / a
        return SeriesSpec(
            Kind.PHI, [v, b / a, c * d / a, c * e / a], [c * q / b, q / d, q / e],
            a * a * q / (b * c * d * e), q, vwp=v,
        )


_SHAPES: dict[PipelineId, type[_Shape]] = {
    PipelineId.P1_1PSI1: _P1,
    PipelineId.P2A_2PSI2: _P2a,
    PipelineId.P2B_2H2: _P2b,
    PipelineId.P3_6PSI6: _P3,
}


def pipeline_param_names(pid: PipelineId | str) -> tuple[str, ...]:
    pid = PipelineId.parse(pid) if isinstance(pid, str) else pid
    return _SHAPES[pid].names


def pipeline_target(pid: PipelineId | str) -> IdentityId:
    pid = PipelineId.parse(pid) if isinstance(pid, str) else pid
    return _SHAPES[pid].target


def _require(conditions: list[Condition], what: str) -> None:
    failed = [c.label for c in conditions if not c.holds(0.0)]
    if failed:
        raise DomainError(f"{what}: condition(s) {', '.join(failed)} violated")


# --- key identities ---------------------------------------------------------


def _key_terms(shape: _Shape, n: int, K: int) -> list[complex]:
    k0 = max(0, -n)
    terms = []
    if k0 <= K:
        t = shape.key_term(n, k0).value
        for k in range(k0, K + 1):
            terms.append(t)
            if t == 0:
                break
            t *= shape.key_ratio(n, k)
    return terms


def _key_tail(shape: _Shape, n: int, K: int) -> complex:
    """Power-law completion of the k-sum beyond k = K."""
    k0 = max(0, -n)
    start = max(K + 1, k0) - k0
    return shape.key_term(n, k0).value * eval_tail(shape.key_tail_spec(n, k0), start).value


def _key_residual(shape: _Shape, n: int, K: int, with_tail: bool = False) -> float:
    n, K = int(n), int(K)
    if K < 0:
        raise ValueError("K must be non-negative")
    pre = shape.prefactor().value()
    total = exact_sum(_key_terms(shape, n, K))
    if with_tail:
        total += _key_tail(shape, n, K)
    return relative_residual(pre * total, shape.key_rhs(n))


def _key0_shape(a, b, q) -> _Shape:
    a, b, q = complex(a), complex(b), complex(q)
    _require([Condition("|b/a| < 1", abs(b / a), 1.0)], "key0")
    return _P1({"a": a, "b": b, "q": q, "z": 0.5})


def _key_2f1_shape(a, c) -> _Shape:
    a, c = complex(a), complex(c)
    _require([Condition("Re(c-a) > 0", 0.0, (c - a).real)], "key_2f1")
    return _P2b({"a": a, "b": 0.5, "c": c, "d": 1.5})


def _key1_shape(a, b, c, q) -> _Shape:
    a, b, c, q = complex(a), complex(b), complex(c), complex(q)
    _require([Condition("|aq/bc| < 1", abs(a * q / (b * c)), 1.0)], "key1")
    return _P3({"a": a, "b": b, "c": c, "d": 2.0, "e": 3.0, "q": q})


_KEY_SHAPES = {"key0": _key0_shape, "key_2f1": _key_2f1_shape, "key1": _key1_shape}
_KEY_TAILED = {"key_2f1"}


def verify_key0(a: complex, b: complex, q: complex, n: int, K: int) -> float:
    """Residual of the key q-identity truncated after k = K (no tail)."""
    return _key_residual(_key0_shape(a, b, q), n, K)


def verify_key_2f1(a: complex, c: complex, n: int, K: int) -> float:
    """Residual of the key Gamma identity: K explicit terms plus the power-law tail."""
    return _key_residual(_key_2f1_shape(a, c), n, K, with_tail=True)


def verify_key1(a: complex, b: complex, c: complex, q: complex, n: int, K: int) -> float:
    """Residual of the key very-well-poised identity truncated after k = K."""
    return _key_residual(_key1_shape(a, b, c, q), n, K)


def key_condition(key: str, params: Mapping[str, complex], n: int, K: int = 240) -> float:
    """sum |t_k| / |sum t_k| over the first K + 1 terms of a key identity's sum.

    For key_2f1 the power-law tail counts as one more term, because the
    explicit partial sum can cancel against it.
    ``key`` is "key0" (params a, b, q), "key_2f1" (a, c) or "key1" (a, b, c, q).
    """
    try:
        build = _KEY_SHAPES[key]
    except KeyError:
        raise KeyError(f"unknown key identity {key!r}; expected one of {sorted(_KEY_SHAPES)}") from None
    shape = build(**params)
    terms = _key_terms(shape, int(n), int(K))
    if key in _KEY_TAILED:
        terms.append(_key_tail(shape, int(n), int(K)))
    total = abs(exact_sum(terms))
    size = math.fsum(abs(t) for t in terms)
    if size == 0.0:
        return 1.0
    return size / total if total > 0 else math.inf


# --- the full chain ---------------------------------------------------------


def _max_rel(pairs) -> float:
    worst = 0.0
    for x, y in pairs:
        worst = max(worst, relative_residual(x, y))
    return worst


def verify_interchange(pipeline: ProofPipeline, tolerance: float | None = None) -> ProofReport:
    """Run every step of the pipeline; raises DomainError outside the proof region."""
    pid = pipeline.id
    tol = default_tolerance(pid) if tolerance is None else tolerance
    shape = _SHAPES[pid](pipeline.params)
    _require(shape.conditions(), pid.value)
    M, K = pipeline.window
    report = ProofReport(pid, dict(pipeline.params), (M, K), tol)
    pre = shape.prefactor().value()

    # original coordinates, n outermost
    original = []
    for n in range(-K, M + 1):
        k0, k1 = max(0, -n), min(K, M - n)
        if k0 > k1:
            continue
        t = shape.weight(n).times(shape.key_term(n, k0)).value
        for k in range(k0, k1 + 1):
            original.append(t)
            if t == 0:
                break
            if k < k1:
                t *= shape.key_ratio(n, k)

    # shifted coordinates, k outermost
    shifted = []
    inner_pairs = []
    simpl_pairs = []
    c_val = shape.simplified_const().value()
    s_terms = _terms(shape.simplified_spec(), K)
    for k in range(K + 1):
        out_k = shape.outer(k)
        spec = shape.inner_spec(k)
        inner = _terms(spec, M)
        shifted.extend(_scaled_times(out_k, u) for u in inner)
        full = exact_sum(inner) + _tail_after(spec, inner)
        closed = shape.inner_closed(k)
        inner_pairs.append((_scaled_times(out_k, full), out_k.times(closed).value))
        simpl_pairs.append((out_k.times(closed).value, c_val * s_terms[k]))

    scale = math.fsum(abs(t) for t in original)
    diff = abs(exact_sum(original) - exact_sum(shifted))
    report.steps.append(("interchange", diff / scale if scale > 0 else diff))
    err = math.fsum(abs(x - y) for x, y in inner_pairs)
    size = math.fsum(abs(y) for _, y in inner_pairs)
    report.steps.append(("inner_sums", err / size if size > 0 else err))
    report.steps.append(("simplification", _max_rel(simpl_pairs)))

    simple = shape.simplified_spec()
    s_total = exact_sum(s_terms) + _tail_after(simple, s_terms)
    assembled = pre * c_val * s_total
    tparams = shape.target_params()
    target, _ = catalog.rhs_value(shape.target, tparams)
    direct = catalog.lhs_value(shape.target, tparams).value
    report.steps.append(("end_to_end", relative_residual(assembled, target)))
    report.steps.append(("bilateral", relative_residual(assembled, direct)))
    report.assembled = assembled
    report.target = target
    return report


# --- sampling ---------------------------------------------------------------


def point_in_domain(pid: PipelineId | str, params: Mapping[str, complex], margin: float = 0.0) -> bool:
    """Per-step conditions with slack, the target's domain, and pole distances."""
    pid = PipelineId.parse(pid) if isinstance(pid, str) else pid
    shape = _SHAPES[pid]({k: complex(v) for k, v in params.items()})
    if not all(c.holds(margin) for c in shape.conditions()):
        return False
    if not catalog.domain_check(shape.target, shape.target_params(), margin):
        return False
    if shape.prefactor().min_pole_distance() < POLE_MARGIN:
        return False
    if shape.simplified_const().min_pole_distance() < POLE_MARGIN:
        return False
    return shape.extra_pole_distance() >= margin


def pipeline_condition(
    pid: PipelineId | str, params: Mapping[str, complex], window: tuple[int, int] | None = None
) -> float | None:
    """Worst condition number among the target's series, the final simplified
    series and the inner series at both ends of the k range; None when one
    cannot be evaluated."""
    pid = PipelineId.parse(pid) if isinstance(pid, str) else pid
    last_k = (default_window(pid) if window is None else window)[1]
    shape = _SHAPES[pid]({k: complex(v) for k, v in params.items()})
    cond = catalog.condition_number(shape.target, shape.target_params())
    if cond is None:
        return None
    try:
        for spec in (shape.simplified_spec(), shape.inner_spec(0), shape.inner_spec(last_k)):
            cond = max(cond, evaluate(spec).condition)
    except (QSeriesError, OverflowError, ZeroDivisionError):
        return None
    return cond


def sample_point(
    pid: PipelineId | str,
    rng: np.random.Generator,
    margin: float = 0.05,
    complex_params: bool = False,
    max_condition: float | None = None,
    window: tuple[int, int] | None = None,
) -> dict[str, complex]:
    """Rejection-sample a point inside the pipeline's proof region.

    With ``max_condition`` set, points whose series suffer more cancellation
    than that (see :func:`pipeline_condition`) are rejected too.
    """
    pid = PipelineId.parse(pid) if isinstance(pid, str) else pid
    names = _SHAPES[pid].names

    def accept(p):
        if not point_in_domain(pid, p, margin):
            return False
        if max_condition is None:
            return True
        cond = pipeline_condition(pid, p, window)
        return cond is None or cond <= max_condition

    return rejection_sample(names, accept, rng, complex_params, label=pid.value)


def describe(pid: PipelineId | str) -> dict[str, Any]:
    pid = PipelineId.parse(pid) if isinstance(pid, str) else pid
    shape = _SHAPES[pid]
    return {"id": pid.value, "params": list(shape.names), "target": shape.target.value}
