"""Evaluators for phi, psi, F and H series driven by term-ratio recurrences.

Every series is normalised so that the k = 0 term is 1.  Terms are generated
by multiplying consecutive ratios; very-well-poised series carry the rational
factor (1 - v q^{2k}) / (1 - v) separately instead of the sqrt(v) parameter
pair, which removes any branch choice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from . import asymptotic
from .errors import DivergentSeries, PoleError
from .pochhammer import check_base
from .scalar import POLE_TOL, AccumulatorState, accumulate, ensure_finite

_DIVERGENCE_RUN = 32
_DIVERGENCE_SLACK = 1e-9
_TERMINATION_RTOL = 1e-10
_MAX_TERMINATION_INDEX = 64
_POISE_RTOL = 1e-10


class Kind(Enum):
    PHI = "phi"
    PSI = "psi"
    F = "f"
    H = "h"

    @property
    def bilateral(self) -> bool:
        return self is Kind.PSI or self is Kind.H

    @property
    def basic(self) -> bool:
        return self is Kind.PHI or self is Kind.PSI


class Status(Enum):
    OK = "OK"
    SLOW_CONVERGENCE = "SLOW_CONVERGENCE"
    POLE_IN_TERMS = "POLE_IN_TERMS"


class Poise(Enum):
    GENERAL = "GENERAL"
    WELL_POISED = "WELL_POISED"
    VERY_WELL_POISED = "VERY_WELL_POISED"


def _ctuple(xs: Iterable[complex]) -> tuple[complex, ...]:
    return tuple(complex(x) for x in xs)


@dataclass(frozen=True)
class SeriesSpec:
    """One r-phi-s / r-psi-s / r-F-s / r-H-s series.

    ``vwp``, when set to ``v``, adds the parameter pair (q sqrt(v), -q sqrt(v))
    over (sqrt(v), -sqrt(v)) in its rational form; the pair is not listed in
    ``num``/``den`` but does count towards r and s.
    """

    kind: Kind
    num: tuple[complex, ...]
    den: tuple[complex, ...]
    z: complex
    q: complex | None = None
    vwp: complex | None = None

    def __post_init__(self):
        object.__setattr__(self, "num", _ctuple(self.num))
        object.__setattr__(self, "den", _ctuple(self.den))
        object.__setattr__(self, "z", complex(self.z))
        if self.kind.basic:
            if self.q is None:
                raise ValueError(f"{self.kind.value} series needs a base q")
            object.__setattr__(self, "q", check_base(self.q))
        elif self.q is not None or self.vwp is not None:
            raise ValueError("F/H series take neither a base nor a very-well-poised factor")
        if self.vwp is not None:
            object.__setattr__(self, "vwp", complex(self.vwp))

    @property
    def r(self) -> int:
        return len(self.num) + (2 if self.vwp is not None else 0)

    @property
    def s(self) -> int:
        return len(self.den) + (2 if self.vwp is not None else 0)

    @property
    def sign_exponent(self) -> int:
        """Exponent of (-1)^k q^{k(k-1)/2} in the term."""
        if self.kind is Kind.PHI:
            return 1 + self.s - self.r
        return self.s - self.r


@dataclass(frozen=True)
class TruncationPolicy:
    max_terms_per_tail: int = 10000
    rel_tol: float = 1e-14
    consecutive_small: int = 8
    min_terms: int = 12

    def __post_init__(self):
        if min(self.max_terms_per_tail, self.consecutive_small, self.min_terms) <= 0:
            raise ValueError("truncation counts must be positive")
        if not 0.0 < self.rel_tol < 1.0:
            raise ValueError("rel_tol must lie in (0, 1)")


DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class EvalResult:
    value: complex
    upper_terms_used: int
    lower_terms_used: int
    tail_estimate: float
    terminated_above: bool
    terminated_below: bool
    status: Status = Status.OK
    #: sum |t_k| / |sum t_k|; large values mean the sum suffered cancellation
    condition: float = 1.0


# ---------------------------------------------------------------------------
# term ratios


def _vanishes(f: complex) -> bool:
    return abs(f) < POLE_TOL


def _vwp_weight(spec: SeriesSpec, k: int) -> complex:
    v = spec.vwp
    if _vanishes(1.0 - v):
        raise PoleError(f"very-well-poised factor 1/(1 - v) is singular at v={v!r}")
    f = 1.0 - v * spec.q ** (2 * k)
    return 0j if _vanishes(f) else f / (1.0 - v)


def _upper_factors(spec: SeriesSpec, k: int) -> tuple[list[complex], list[complex], complex]:
    """Numerator factors, denominator factors and scalar of u_{k+1}/u_k."""
    if spec.kind.basic:
        qk = spec.q**k
        top = [1.0 - a * qk for a in spec.num]
        bottom = [1.0 - b * qk for b in spec.den]
        if spec.kind is Kind.PHI:
            bottom.append(1.0 - qk * spec.q)
        scalar = spec.z * (-qk) ** spec.sign_exponent
    else:
        top = [a + k for a in spec.num]
        bottom = [b + k for b in spec.den]
        if spec.kind is Kind.F:
            bottom.append(complex(k + 1))
        scalar = spec.z
    return top, bottom, scalar


def _base_ratio(spec: SeriesSpec, k: int) -> complex:
    """u_{k+1}/u_k without the very-well-poised factor; 0 on termination."""
    kind = spec.kind
    if kind is Kind.PHI or kind is Kind.PSI:
        qk = spec.q**k
        den = 1.0 - qk * spec.q if kind is Kind.PHI else 1.0 + 0j
        if abs(den) < POLE_TOL:
            raise PoleError(f"term {k + 1} of the series hits a denominator pole")
        for b in spec.den:
            f = 1.0 - b * qk
            if abs(f) < POLE_TOL:
                raise PoleError(f"term {k + 1} of the series hits a denominator pole")
            den *= f
        num = spec.z * (-qk) ** spec.sign_exponent
        for a in spec.num:
            f = 1.0 - a * qk
            if abs(f) < POLE_TOL:
                return 0j
            num *= f
    else:
        den = complex(k + 1) if kind is Kind.F else 1.0 + 0j
        for b in spec.den:
            f = b + k
            if abs(f) < POLE_TOL:
                raise PoleError(f"term {k + 1} of the series hits a denominator pole")
            den *= f
        num = spec.z
        for a in spec.num:
            f = a + k
            if abs(f) < POLE_TOL:
                return 0j
            num *= f
    return num / den


def _base_inverse_ratio(spec: SeriesSpec, k: int) -> complex:
    """u_k/u_{k+1} for k <= -1; 0 when the lower tail terminates at k.

    Basic series use p = q^{-k}, so each factor 1 - c q^k becomes q^k (p - c)
    and the powers of q^k cancel against the scalar.  This stays finite where
    q^k itself would overflow.
    """
    if not spec.kind.basic:
        top, bottom, scalar = _upper_factors(spec, k)
        if any(_vanishes(f) for f in top):
            raise PoleError(f"term {k} of the bilateral series hits a pole")
        if any(_vanishes(f) for f in bottom):
            return 0j
        value = 1.0 / scalar
        for f in bottom:
            value *= f
        for f in top:
            value /= f
        return value
    p = spec.q ** (-k)
    scale = POLE_TOL * abs(p)
    top = [p - a for a in spec.num]
    bottom = [p - b for b in spec.den]
    if any(abs(f) < scale or f == 0 for f in top):
        raise PoleError(f"term {k} of the bilateral series hits a pole")
    if any(abs(f) < scale for f in bottom):
        return 0j
    value = 1.0 / (spec.z * (-1.0) ** spec.sign_exponent)
    for f in bottom:
        value *= f
    for f in top:
        value /= f
    return value


def _vwp_inverse_weight_ratio(spec: SeriesSpec, k: int) -> complex:
    """w_k / w_{k+1} for k <= -1 in the overflow-free form (p^2 - v)/(p^2 - v q^2)."""
    v = spec.vwp
    p2 = spec.q ** (-2 * k)
    den = p2 - v * spec.q**2
    num = p2 - v
    if abs(den) < POLE_TOL * abs(p2) or abs(num) < POLE_TOL * abs(p2):
        raise PoleError(f"very-well-poised factor vanishes next to term {k}; ratio undefined")
    return num / den


def term_ratio(spec: SeriesSpec, k: int) -> complex:
    """t_{k+1}/t_k including every factor of the term."""
    k = int(k)
    ratio = _base_ratio(spec, k)
    if spec.vwp is not None:
        wk = _vwp_weight(spec, k)
        if wk == 0:
            raise PoleError(f"term {k} vanishes through the very-well-poised factor; ratio undefined")
        ratio *= _vwp_weight(spec, k + 1) / wk
    return ensure_finite(ratio, "term ratio")


# ---------------------------------------------------------------------------
# summation


def _power_law(spec: SeriesSpec, direction: int) -> tuple[list[complex], list[complex]] | None:
    """Gamma-ratio parameters of a unit-argument balanced F/H tail, else None."""
    if spec.kind.basic or abs(spec.z - 1.0) > 1e-15:
        return None
    num, den = list(spec.num), list(spec.den)
    if spec.kind is Kind.F:
        den.append(1.0 + 0j)
    if len(num) != len(den):
        return None
    if direction > 0:
        return num, den
    # (a)_{-j} = (-1)^j / (1-a)_j, balanced signs cancel
    return [1.0 - b for b in den], [1.0 - a for a in num]


def _settle_index(spec: SeriesSpec, direction: int) -> int:
    """Index magnitude after which term ratios have reached their limit regime."""
    params = list(spec.num) + list(spec.den)
    if spec.vwp is not None:
        params.append(spec.vwp)
    if not spec.kind.basic:
        return int(4 * max((abs(p) for p in params), default=0.0)) + 1
    lq = -math.log(abs(spec.q))
    worst = 0
    for p in params:
        m = abs(p)
        if m == 0:
            continue
        if direction > 0:
            worst = max(worst, math.ceil(math.log(max(m, 1e-300) / 1e-3) / lq))
        else:
            worst = max(worst, math.ceil(math.log(1e3 / m) / lq))
    return max(worst, 0)


@dataclass
class _TailOutcome:
    state: AccumulatorState = field(default_factory=AccumulatorState)
    terms: int = 0
    tail_estimate: float = 0.0
    terminated: bool = False
    status: Status = Status.OK
    abs_sum: float = 0.0


def _sum_tail(
    spec: SeriesSpec, policy: TruncationPolicy, direction: int, start: int, seed_term: complex | None = None
) -> _TailOutcome:
    """Sum t_k for k = start, start+1, ... (direction +1) or k = -1, -2, ... (direction -1).

    The k = 0 term is u_0 = 1.  For direction +1 terms below ``start`` are
    generated only to seed the recurrence.
    """
    out = _TailOutcome()
    vwp = spec.vwp is not None
    power = _power_law(spec, direction)
    switch = None
    if power is not None:
        switch = asymptotic.required_start(*power)
    settle = _settle_index(spec, direction)

    if direction > 0 and seed_term is not None and vwp:
        w = _vwp_weight(spec, start)
        seed_term = None if w == 0 else seed_term / w
    if direction > 0 and seed_term is not None:
        k = start
        u = complex(seed_term)
        if u == 0:
            out.terminated = True
            return out
    elif direction > 0:
        k = 0
        u = 1.0 + 0j
        while k < start:
            r = _base_ratio(spec, k)
            u *= r
            k += 1
            if u == 0:
                out.terminated = True
                return out
        u = ensure_finite(u, "series term")
    else:
        k = -1
        r = _base_inverse_ratio(spec, -1)
        if vwp:
            _vwp_weight(spec, 0)
            r *= _vwp_inverse_weight_ratio(spec, -1)
        u = r
        if u == 0:
            out.terminated = True
            return out

    state = AccumulatorState()
    small_run = 0
    grow_run = 0
    prev_abs = None
    last_ratio = None
    while True:
        t = u * _vwp_weight(spec, k) if vwp and direction > 0 else u
        t = ensure_finite(t, "series term")
        at = abs(t)
        index = abs(k) if direction < 0 else k
        if switch is not None and index >= switch and out.terms >= policy.min_terms:
            tail, err = _asymptotic_tail(power, index, t)
            scale = max(abs(state.value + tail), abs(tail))
            if err <= policy.rel_tol * scale or index >= policy.max_terms_per_tail:
                state = accumulate(state, tail)
                out.abs_sum += abs(tail)
                out.terms += 1
                out.tail_estimate = err
                break
            # expansion not yet accurate enough here: sum further explicitly
            switch = 2 * index
        state = accumulate(state, t)
        out.abs_sum += at
        out.terms += 1
        if prev_abs is not None and prev_abs > 0 and at > 0:
            last_ratio = at / prev_abs
            if abs(k) >= settle and last_ratio > 1.0 + _DIVERGENCE_SLACK:
                grow_run += 1
                if grow_run >= _DIVERGENCE_RUN:
                    raise DivergentSeries(
                        f"{spec.kind.value} series terms grow by {last_ratio:.6g} per step "
                        f"in the {'upper' if direction > 0 else 'lower'} tail"
                    )
            else:
                grow_run = 0
        prev_abs = at if at > 0 else prev_abs
        partial = abs(state.value)
        if at <= policy.rel_tol * partial:
            small_run += 1
        else:
            small_run = 0
        if small_run >= policy.consecutive_small and out.terms >= policy.min_terms:
            rho = last_ratio if last_ratio is not None else 0.0
            out.tail_estimate = at * rho / (1.0 - rho) if rho < 1.0 else at * policy.consecutive_small
            break
        if out.terms >= policy.max_terms_per_tail:
            rho = last_ratio if last_ratio is not None else 1.0
            out.tail_estimate = at * rho / (1.0 - rho) if rho < 1.0 else at * out.terms
            out.status = Status.SLOW_CONVERGENCE
            break
        if direction > 0:
            r = _base_ratio(spec, k)
            k += 1
        else:
            r = _base_inverse_ratio(spec, k - 1)
            if vwp and r != 0:
                r *= _vwp_inverse_weight_ratio(spec, k - 1)
            k -= 1
        u = u * r
        if u == 0:
            out.terminated = True
            break
    out.state = state
    return out


def _condition(abs_sum: float, value: complex) -> float:
    if abs_sum == 0.0:
        return 1.0
    # >= 1 by the triangle inequality; clamp the rounding of the two sums
    return max(1.0, abs_sum / abs(value)) if value != 0 else math.inf


def _asymptotic_tail(power, index: int, t: complex) -> tuple[complex, float]:
    try:
        return asymptotic.power_tail(power[0], power[1], index, t)
    except ValueError as exc:
        raise DivergentSeries(str(exc)) from exc


def _check_unit_argument_convergence(spec: SeriesSpec) -> None:
    for direction in ((1, -1) if spec.kind.bilateral else (1,)):
        power = _power_law(spec, direction)
        if power is None:
            continue
        sigma = sum(power[1]) - sum(power[0])
        bound = detect_termination(spec)
        finite = bound is not None and (bound[0] if direction > 0 else bound[1]) is not None
        if sigma.real <= 1.0 and not finite:
            raise DivergentSeries(
                f"unit-argument series diverges: terms decay like k^-{sigma!r}"
            )


def eval_unilateral(spec: SeriesSpec, policy: TruncationPolicy = DEFAULT_POLICY) -> EvalResult:
    """Sum a phi or F series from k = 0."""
    if spec.kind.bilateral:
        raise ValueError("eval_unilateral needs a PHI or F series")
    _check_unit_argument_convergence(spec)
    up = _sum_tail(spec, policy, +1, 0)
    return EvalResult(
        value=ensure_finite(up.state.value, "series value"),
        condition=_condition(up.abs_sum, up.state.value),
        upper_terms_used=up.terms,
        lower_terms_used=0,
        tail_estimate=up.tail_estimate,
        terminated_above=up.terminated,
        terminated_below=False,
        status=up.status,
    )


def eval_tail(
    spec: SeriesSpec,
    start: int,
    policy: TruncationPolicy = DEFAULT_POLICY,
    seed_term: complex | None = None,
) -> EvalResult:
    """sum_{k >= start} t_k of the forward (k >= 0) part of any series.

    ``seed_term``, when given, is t_start and saves regenerating terms
    0..start-1 by recurrence.
    """
    _check_unit_argument_convergence(spec)
    up = _sum_tail(spec, policy, +1, int(start), seed_term)
    return EvalResult(
        value=ensure_finite(up.state.value, "series tail"),
        condition=_condition(up.abs_sum, up.state.value),
        upper_terms_used=up.terms,
        lower_terms_used=0,
        tail_estimate=up.tail_estimate,
        terminated_above=up.terminated,
        terminated_below=False,
        status=up.status,
    )


def eval_bilateral(spec: SeriesSpec, policy: TruncationPolicy = DEFAULT_POLICY) -> EvalResult:
    """Sum a psi or H series over all integers k."""
    if not spec.kind.bilateral:
        raise ValueError("eval_bilateral needs a PSI or H series")
    _check_unit_argument_convergence(spec)
    up = _sum_tail(spec, policy, +1, 0)
    down = _sum_tail(spec, policy, -1, 0)
    total = AccumulatorState()
    for part in (up.state.sum, down.state.sum, up.state.compensation, down.state.compensation):
        total = accumulate(total, part)
    status = Status.OK
    if Status.SLOW_CONVERGENCE in (up.status, down.status):
        status = Status.SLOW_CONVERGENCE
    return EvalResult(
        value=ensure_finite(total.value, "series value"),
        condition=_condition(up.abs_sum + down.abs_sum, total.value),
        upper_terms_used=up.terms,
        lower_terms_used=down.terms,
        tail_estimate=up.tail_estimate + down.tail_estimate,
        terminated_above=up.terminated,
        terminated_below=down.terminated,
        status=status,
    )


def evaluate(spec: SeriesSpec, policy: TruncationPolicy = DEFAULT_POLICY) -> EvalResult:
    if spec.kind.bilateral:
        return eval_bilateral(spec, policy)
    return eval_unilateral(spec, policy)


# ---------------------------------------------------------------------------
# structure


def _close(x: complex, y: complex, rtol: float) -> bool:
    return abs(x - y) <= rtol * max(abs(x), abs(y), 1e-300)


def _has_vwp_pair(num: tuple[complex, ...], a: complex, q: complex) -> bool:
    """True when two numerator entries form {q sqrt(a), -q sqrt(a)}."""
    target = a * q * q
    for i in range(len(num)):
        for j in range(i + 1, len(num)):
            x, y = num[i], num[j]
            if abs(x + y) <= _POISE_RTOL * max(abs(x), 1e-300) and _close(-x * y, target, _POISE_RTOL):
                return True
    return False


def classify_poise(spec: SeriesSpec) -> Poise:
    """Well-poised / very-well-poised classification of a basic series."""
    if not spec.kind.basic:
        return Poise.GENERAL
    q = spec.q
    num, den = spec.num, spec.den
    if spec.kind is Kind.PHI:
        if not num or len(num) != len(den) + 1:
            return Poise.GENERAL
        a = num[0]
        if not all(_close(a * q, num[i + 1] * den[i], _POISE_RTOL) for i in range(len(den))):
            return Poise.GENERAL
        if spec.vwp is not None:
            return Poise.VERY_WELL_POISED if _close(spec.vwp, a, _POISE_RTOL) else Poise.WELL_POISED
        return Poise.VERY_WELL_POISED if _has_vwp_pair(num[1:], a, q) else Poise.WELL_POISED
    if not num or len(num) != len(den):
        return Poise.GENERAL
    aq = num[0] * den[0]
    if not all(_close(aq, x * y, _POISE_RTOL) for x, y in zip(num, den)):
        return Poise.GENERAL
    a = aq / q
    if spec.vwp is not None:
        return Poise.VERY_WELL_POISED if _close(spec.vwp, a, _POISE_RTOL) else Poise.WELL_POISED
    return Poise.VERY_WELL_POISED if _has_vwp_pair(num, a, q) else Poise.WELL_POISED


def _q_power_index(x: complex, q: complex) -> int | None:
    """m with x == q^m (relative 1e-10, |m| <= 64), else None."""
    if x == 0:
        return None
    m = round((math.log(abs(x)) / math.log(abs(q))))
    if abs(m) > _MAX_TERMINATION_INDEX:
        return None
    return m if _close(x, q**m, _TERMINATION_RTOL) else None


def _integer_index(x: complex) -> int | None:
    m = round(x.real)
    if abs(m) <= _MAX_TERMINATION_INDEX and abs(x - m) <= _TERMINATION_RTOL * max(1.0, abs(x)):
        return m
    return None


def detect_termination(spec: SeriesSpec) -> tuple[int | None, int | None] | None:
    """(highest nonzero index, lowest nonzero index) forced by the parameters.

    A numerator q^{-m} (or -m for F/H) stops the series above index m; for
    bilateral series a denominator q^{m+1} (or m+1) stops it below index -m.
    """
    upper = lower = None
    for a in spec.num:
        m = _q_power_index(a, spec.q) if spec.kind.basic else _integer_index(a)
        if m is not None and m <= 0:
            upper = -m if upper is None else min(upper, -m)
    if spec.kind.bilateral:
        for b in spec.den:
            m = _q_power_index(b, spec.q) if spec.kind.basic else _integer_index(b)
            if m is not None and m >= 1:
                lower = -(m - 1) if lower is None else max(lower, -(m - 1))
    if upper is None and lower is None:
        return None
    return upper, lower
