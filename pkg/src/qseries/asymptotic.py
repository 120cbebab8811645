"""Asymptotic tails of balanced power-law series.

For terms t_k = C * prod Gamma(k + alpha_i) / prod Gamma(k + beta_j) with equally
many alphas and betas, log t_k has the large-k expansion

    -sigma * log(y) + sum_m d_m y^{-m},   y = k + shift,
    d_m = (-1)^{m+1} / (m (m+1)) * [sum_i B_{m+1}(alpha_i') - sum_j B_{m+1}(beta_j')],

(B_n the Bernoulli polynomials, primes denoting parameters minus ``shift``), so
the tail sum_{k>=N} t_k reduces to a combination of Hurwitz zeta values, which
in turn come from the Euler-Maclaurin formula.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

_MAX_ORDER = 40
_EM_TERMS = 30


@lru_cache(maxsize=None)
def _bernoulli_numbers(n: int) -> tuple[float, ...]:
    """B_0..B_n with the B_1 = -1/2 convention."""
    b = [Fraction(0)] * (n + 1)
    b[0] = Fraction(1)
    for m in range(1, n + 1):
        b[m] = -sum(math.comb(m + 1, k) * b[k] for k in range(m)) / (m + 1)
    return tuple(float(x) for x in b)


@lru_cache(maxsize=None)
def _bernoulli_poly_coeffs(n: int) -> tuple[float, ...]:
    """Coefficients of B_n(x), highest power first."""
    b = _bernoulli_numbers(n)
    return tuple(math.comb(n, k) * b[k] for k in range(n + 1))


def bernoulli_poly(n: int, x: complex) -> complex:
    out = 0j
    for c in _bernoulli_poly_coeffs(n):
        out = out * x + c
    return out


def hurwitz_zeta(s: complex, a: complex) -> complex:
    """sum_{k>=0} (k + a)^{-s} for Re(s) > 1 and large positive Re(a)."""
    b = _bernoulli_numbers(2 * _EM_TERMS)
    a_s = a ** (-s)
    out = a * a_s / (s - 1.0) + 0.5 * a_s
    rising = s  # s (s+1) ... (s+2j-2)
    power = a_s / a
    fact = 2.0
    prev = math.inf
    for j in range(1, _EM_TERMS + 1):
        term = b[2 * j] / fact * rising * power
        if abs(term) > prev:
            break
        out += term
        if abs(term) <= 1e-17 * abs(out):
            break
        prev = abs(term)
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        power /= a * a
        fact *= (2 * j + 1) * (2 * j + 2)
    return out


def required_start(alphas: Sequence[complex], betas: Sequence[complex], ratio: float = 4.0) -> int:
    """Smallest index from which the expansion is used, given parameter spread."""
    params = list(alphas) + list(betas)
    shift = _centre(params)
    spread = max((abs(p - shift) for p in params), default=0.0)
    return max(0, math.ceil(ratio * spread + 24 - shift.real))


def _centre(params: Sequence[complex]) -> complex:
    if not params:
        return 0j
    re = [p.real for p in params]
    return complex(0.5 * (min(re) + max(re)), 0.0)


def power_tail(
    alphas: Sequence[complex], betas: Sequence[complex], start: int, t_start: complex
) -> tuple[complex, float]:
    """Return (sum_{k>=start} t_k, error estimate) given the term at ``start``.

    Requires ``len(alphas) == len(betas)`` and ``Re(sigma) > 1`` where
    ``sigma = sum(betas) - sum(alphas)``.
    """
    if len(alphas) != len(betas):
        raise ValueError("power_tail needs balanced parameter lists")
    if t_start == 0:
        return 0j, 0.0
    shift = _centre(list(alphas) + list(betas))
    al = [complex(a) - shift for a in alphas]
    be = [complex(b) - shift for b in betas]
    sigma = sum(be) - sum(al)
    if sigma.real <= 1.0:
        raise ValueError(f"power-law exponent {sigma!r} does not give a convergent tail")
    y0 = start + shift
    d = [0j] * (_MAX_ORDER + 1)
    for m in range(1, _MAX_ORDER + 1):
        acc = sum(bernoulli_poly(m + 1, a) for a in al) - sum(bernoulli_poly(m + 1, b) for b in be)
        d[m] = (-1) ** (m + 1) * acc / (m * (m + 1))
    # exp(sum d_m x^m) = sum e_m x^m
    e = [1.0 + 0j] + [0j] * _MAX_ORDER
    for n in range(1, _MAX_ORDER + 1):
        e[n] = sum(m * d[m] * e[n - m] for m in range(1, n + 1)) / n
    # g(y0) and the zeta combination, truncated when terms stop shrinking
    g0 = 0j
    total = 0j
    err = 0.0
    inv = 1.0 / y0
    # sizes can alternate in parity, so compare against the last two before
    # declaring the asymptotic series divergent
    prev = prev2 = math.inf
    for m in range(_MAX_ORDER + 1):
        size = abs(e[m]) * abs(inv) ** m
        if m > 2 and size > max(prev, prev2):
            break
        g0 += e[m] * inv**m
        total += e[m] * hurwitz_zeta(sigma + m, y0)
        err = max(size, prev) if m > 0 else size
        prev2, prev = prev, size
        if err < 1e-18:
            break
    # t_k = C * y^{-sigma} * sum_m e_m y^{-m}
    c = t_start / (y0 ** (-sigma) * g0)
    tail = c * total
    return tail, abs(tail) * err + abs(tail) * 1e-16
