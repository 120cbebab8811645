"""q-shifted factorials and ordinary shifted factorials.

Negative indices use the reciprocal-product form

    (a;q)_{-n} = 1 / prod_{j=1}^{n} (1 - a q^{-j}),

so a vanishing factor is detected locally instead of through a ratio of
infinite products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DivisionByVanishingFactor, DomainError
from .scalar import POLE_TOL, ScaledProduct, ensure_finite, rescale, _SCALE_HI, _SCALE_LO

#: Sentinel for an infinite index in :func:`qpoch_multi`.
INF = math.inf

#: Multiplicative tail cut-off for infinite products.
_INF_PRODUCT_CUTOFF = 1e-17


@dataclass(frozen=True)
class PochResult:
    value: complex
    is_zero: bool = False
    zero_order: int = 0

    def __complex__(self) -> complex:
        return self.value


def check_base(q: complex) -> complex:
    q = complex(q)
    if not 0.0 < abs(q) < 1.0:
        raise DomainError(f"base q must satisfy 0 < |q| < 1, got {q!r}")
    return q


def _vanishes(f: complex) -> bool:
    return abs(f) < POLE_TOL


def _inverse_powers(q: complex, n: int) -> list[tuple[complex, int]]:
    """q^-j for j = 1..n as (mantissa, binary exponent) pairs with |mantissa| ~ 1."""
    out = []
    m, e = 1.0 + 0j, 0
    for _ in range(n):
        m = m / q
        _, shift = math.frexp(max(abs(m.real), abs(m.imag)))
        m = complex(math.ldexp(m.real, -shift), math.ldexp(m.imag, -shift))
        e += shift
        out.append((m, e))
    return out


def _shifted_factor(c: complex, m: complex, e: int) -> tuple[complex, int, bool]:
    """1 - c * m * 2^e as (mantissa, exponent, vanishes).

    Written as 2^e (2^-e - c m) so that no intermediate overflows.
    """
    if c == 0:
        return 1.0 + 0j, 0, False
    tiny = math.ldexp(1.0, -e)
    f = tiny - c * m
    return f, e, abs(f) < POLE_TOL * tiny


def qpoch(a: complex, q: complex, k: int) -> PochResult:
    """(a;q)_k for any integer k."""
    a = complex(a)
    q = check_base(q)
    k = int(k)
    if k >= 0:
        prod = ScaledProduct()
        zeros = 0
        x = a
        for _ in range(k):
            f = 1.0 - x
            if _vanishes(f):
                zeros += 1
            else:
                prod.mul(f)
            x *= q
        if zeros:
            return PochResult(0j, True, zeros)
        return PochResult(ensure_finite(prod.value, "q-Pochhammer"))
    m, e = 1.0 + 0j, 0
    for j, (sm, se) in enumerate(_inverse_powers(q, -k), start=1):
        f, fe, vanishes = _shifted_factor(a, sm, se)
        if vanishes:
            raise DivisionByVanishingFactor(
                f"(a;q)_{k} has vanishing factor 1 - a q^-{j} at a={a!r}, q={q!r}"
            )
        m, e = rescale(m / f, e - fe)
    return PochResult(ensure_finite(ScaledProduct(m, e).value, "q-Pochhammer"))


def qpoch_inf(a: complex, q: complex) -> complex:
    """(a;q)_inf, truncated once |a q^j| < 1e-17 with a first-order tail fix."""
    a = complex(a)
    q = check_base(q)
    if a == 0:
        return 1.0 + 0j
    prod = ScaledProduct()
    x = a
    while abs(x) >= _INF_PRODUCT_CUTOFF:
        f = 1.0 - x
        if _vanishes(f):
            return 0j
        prod.mul(f)
        x *= q
    # remaining factors: prod_{j>=0} (1 - x q^j) ~ 1 - x/(1-q)
    prod.mul(1.0 - x / (1.0 - q))
    return ensure_finite(prod.value, "infinite q-Pochhammer")


def qpoch_multi(params: Sequence[complex], q: complex, k: float) -> PochResult:
    """(a_1, ..., a_m; q)_k with k an integer or :data:`INF`."""
    value = 1.0 + 0j
    zeros = 0
    for a in params:
        if k == INF:
            v = qpoch_inf(a, q)
            if v == 0:
                zeros += 1
            value *= v
        else:
            r = qpoch(a, q, int(k))
            zeros += r.zero_order
            value *= r.value
    if zeros:
        return PochResult(0j, True, zeros)
    return PochResult(ensure_finite(value, "q-Pochhammer product"))


def qpoch_ratio(num: Sequence[complex], den: Sequence[complex], q: complex, k: float) -> complex:
    """prod (num;q)_k / prod (den;q)_k evaluated factor by factor.

    Balanced ratios stay representable even when each Pochhammer on its own
    would over- or underflow (large negative k, small q).
    """
    q = check_base(q)
    if k == INF:
        prod = ScaledProduct()
        for a in num:
            prod.mul(qpoch_inf(a, q))
        for b in den:
            v = qpoch_inf(b, q)
            if v == 0:
                raise DivisionByVanishingFactor(f"(b;q)_inf vanishes at b={b!r}")
            prod.div(v)
        return ensure_finite(prod.value, "q-Pochhammer ratio")
    k = int(k)
    m, e = 1.0 + 0j, 0
    zero = False
    if k >= 0:
        qj = 1.0 + 0j
        for _ in range(k):
            for a in num:
                f = 1.0 - a * qj
                if abs(f) < POLE_TOL:
                    zero = True
                else:
                    m *= f
            for b in den:
                f = 1.0 - b * qj
                if abs(f) < POLE_TOL:
                    raise DivisionByVanishingFactor(f"vanishing denominator factor 1 - {b!r}*{qj!r}")
                m /= f
            if not _SCALE_LO < abs(m) < _SCALE_HI:
                m, e = rescale(m, e)
            qj *= q
    else:
        # (x;q)_{-n} = 1/prod_{j=1}^n (1 - x q^{-j}); numerator and denominator swap roles
        for sm, se in _inverse_powers(q, -k):
            for a in den:
                f, fe, vanishes = _shifted_factor(a, sm, se)
                if vanishes:
                    zero = True
                else:
                    m *= f
                    e += fe
            for b in num:
                f, fe, vanishes = _shifted_factor(b, sm, se)
                if vanishes:
                    raise DivisionByVanishingFactor(f"vanishing denominator factor 1 - {b!r} q^-j")
                m /= f
                e -= fe
            if not _SCALE_LO < abs(m) < _SCALE_HI:
                m, e = rescale(m, e)
    if zero:
        return 0j
    return ensure_finite(ScaledProduct(m, e).value, "q-Pochhammer ratio")


def poch(a: complex, k: int) -> PochResult:
    """Shifted factorial (a)_k for integer k, by direct product (no Gamma)."""
    a = complex(a)
    k = int(k)
    prod = ScaledProduct()
    if k >= 0:
        zeros = 0
        for j in range(k):
            f = a + j
            if _vanishes(f):
                zeros += 1
            else:
                prod.mul(f)
        if zeros:
            return PochResult(0j, True, zeros)
        return PochResult(ensure_finite(prod.value, "Pochhammer"))
    for j in range(1, -k + 1):
        f = a - j
        if _vanishes(f):
            raise DivisionByVanishingFactor(f"(a)_{k} has vanishing factor a - {j} at a={a!r}")
        prod.div(f)
    return PochResult(ensure_finite(prod.value, "Pochhammer"))


def poch_ratio(num: Sequence[complex], den: Sequence[complex], k: int) -> complex:
    """prod (num)_k / prod (den)_k for integer k, factor by factor."""
    k = int(k)
    if k >= 0:
        top, bottom, shifts = list(num), list(den), range(k)
    else:
        # (x)_{-n} = 1/prod_{j=1}^n (x - j)
        top, bottom, shifts = list(den), list(num), range(-1, k - 1, -1)
    zero = False
    m, e = 1.0 + 0j, 0
    for s in shifts:
        for a in top:
            f = a + s
            if abs(f) < POLE_TOL:
                zero = True
            else:
                m *= f
        for b in bottom:
            f = b + s
            if abs(f) < POLE_TOL:
                raise DivisionByVanishingFactor(f"vanishing denominator factor {b!r}+{s}")
            m /= f
        if not _SCALE_LO < abs(m) < _SCALE_HI:
            m, e = rescale(m, e)
    if zero:
        return 0j
    return ensure_finite(ScaledProduct(m, e).value, "Pochhammer ratio")
