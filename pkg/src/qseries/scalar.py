"""Complex scalar kernel: Gamma function, compensated summation, scaled products.

Python's built-in ``complex`` is the value type throughout the package.  The
helpers here guarantee that non-finite values never escape silently.
"""

from __future__ import annotations

import cmath
import math
from typing import Iterable, NamedTuple

from .errors import NonFiniteError, PoleError

#: Absolute distance to a nonpositive integer at which Gamma reports a pole.
#: Also the tolerance for a vanishing Pochhammer factor.
POLE_TOL = 1e-12

_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def ensure_finite(z: complex, what: str = "value") -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise NonFiniteError(f"{what} is not finite: {z!r}")
    return z


def nearest_nonpositive_integer(z: complex) -> int | None:
    """Return the nonpositive integer within POLE_TOL of ``z``, if any."""
    n = round(z.real)
    if n <= 0 and abs(z - n) < POLE_TOL:
        return int(n)
    return None


def _sinpi_real(x: float) -> tuple[float, float]:
    """(sin(pi x), cos(pi x)) with argument reduction done before scaling by pi."""
    r = math.fmod(x, 2.0)
    if r > 1.0:
        r -= 2.0
    elif r < -1.0:
        r += 2.0
    if r == 0.0 or abs(r) == 1.0:
        return 0.0, 1.0 if r == 0.0 else -1.0
    if abs(r) == 0.5:
        return math.copysign(1.0, r), 0.0
    return math.sin(math.pi * r), math.cos(math.pi * r)


def sinpi(z: complex) -> complex:
    """sin(pi z) for complex z, exact zeros at the integers."""
    s, c = _sinpi_real(z.real)
    y = math.pi * z.imag
    return complex(s * math.cosh(y), c * math.sinh(y))


def _lanczos(z: complex) -> complex:
    # Gamma(z) for Re(z) >= 1/2
    z = z - 1.0
    x = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        x += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _SQRT_2PI * x * cmath.exp((z + 0.5) * cmath.log(t) - t)


def gamma(z: complex) -> complex:
    """Complex Gamma function.

    Lanczos approximation (g = 7, nine coefficients) on ``Re(z) >= 1/2`` and
    the reflection formula ``Gamma(z) Gamma(1-z) = pi / sin(pi z)`` elsewhere.
    Relative accuracy is around 1e-14 for ``|z| <= 50`` away from the poles.

    Raises:
        PoleError: ``z`` is within ``POLE_TOL`` of a nonpositive integer.
        NonFiniteError: the result overflows.
    """
    z = ensure_finite(z, "gamma argument")
    n = nearest_nonpositive_integer(z)
    if n is not None:
        raise PoleError(f"Gamma has a pole at {n} (argument {z!r})")
    if z.imag == 0.0 and z.real == round(z.real) and 0 < z.real <= 23:
        return complex(math.factorial(int(z.real) - 1))
    try:
        if z.real < 0.5:
            value = math.pi / (sinpi(z) * _lanczos(1.0 - z))
        else:
            value = _lanczos(z)
    except (OverflowError, ZeroDivisionError) as exc:
        raise NonFiniteError(f"Gamma overflow at {z!r}") from exc
    return ensure_finite(value, f"Gamma({z!r})")


def rgamma(z: complex) -> complex:
    """1/Gamma(z); exactly zero at the poles of Gamma."""
    if nearest_nonpositive_integer(complex(z)) is not None:
        return 0j
    return 1.0 / gamma(z)


class AccumulatorState(NamedTuple):
    """Running compensated sum; immutable, so ``accumulate`` returns a new state."""

    sum: complex = 0j
    compensation: complex = 0j
    terms_added: int = 0

    @property
    def value(self) -> complex:
        return self.sum + self.compensation


def _two_sum(s: float, c: float, x: float) -> tuple[float, float]:
    t = s + x
    if abs(s) >= abs(x):
        c += (s - t) + x
    else:
        c += (x - t) + s
    return t, c


def accumulate(state: AccumulatorState, term: complex) -> AccumulatorState:
    """Add ``term`` with Neumaier compensation, componentwise on re and im."""
    term = complex(term)
    if not (math.isfinite(term.real) and math.isfinite(term.imag)):
        raise NonFiniteError(f"cannot accumulate non-finite term {term!r}")
    sr, cr = _two_sum(state.sum.real, state.compensation.real, term.real)
    si, ci = _two_sum(state.sum.imag, state.compensation.imag, term.imag)
    if not (math.isfinite(sr) and math.isfinite(si)):
        raise OverflowError("compensated sum exceeded the representable range")
    return AccumulatorState(complex(sr, si), complex(cr, ci), state.terms_added + 1)


def compensated_sum(terms: Iterable[complex]) -> complex:
    state = AccumulatorState()
    for t in terms:
        state = accumulate(state, t)
    return state.value


def exact_sum(terms: Iterable[complex]) -> complex:
    """Correctly rounded complex sum via ``math.fsum`` on each component."""
    re: list[float] = []
    im: list[float] = []
    for t in terms:
        re.append(t.real)
        im.append(t.imag)
    return complex(math.fsum(re), math.fsum(im))


_SCALE_LO = 2.0**-256
_SCALE_HI = 2.0**256


def rescale(mantissa: complex, exponent: int) -> tuple[complex, int]:
    """Bring |mantissa| back near 1, moving the scale into the binary exponent."""
    m = max(abs(mantissa.real), abs(mantissa.imag))
    if m == 0.0 or _SCALE_LO < m < _SCALE_HI:
        return mantissa, exponent
    _, e = math.frexp(m)
    return complex(math.ldexp(mantissa.real, -e), math.ldexp(mantissa.imag, -e)), exponent + e


class ScaledProduct:
    """Product of many complex factors kept as mantissa * 2**exponent.

    Intermediate over/underflow cannot occur; only the final ``value`` may
    overflow.  A zero factor makes the whole product exactly zero.
    """

    __slots__ = ("mantissa", "exponent")

    def __init__(self, mantissa: complex = 1.0 + 0j, exponent: int = 0):
        self.mantissa = complex(mantissa)
        self.exponent = exponent

    def _normalise(self) -> None:
        m = max(abs(self.mantissa.real), abs(self.mantissa.imag))
        if _SCALE_LO < m < _SCALE_HI:
            return
        if m == 0.0:
            self.exponent = 0
            return
        _, e = math.frexp(m)
        if e > 256 or e < -256:
            self.mantissa = complex(math.ldexp(self.mantissa.real, -e), math.ldexp(self.mantissa.imag, -e))
            self.exponent += e

    def mul(self, x: complex) -> "ScaledProduct":
        self.mantissa *= x
        self._normalise()
        return self

    def div(self, x: complex) -> "ScaledProduct":
        self.mantissa /= x
        self._normalise()
        return self

    def times(self, other: "ScaledProduct") -> "ScaledProduct":
        out = ScaledProduct(self.mantissa * other.mantissa, self.exponent + other.exponent)
        out._normalise()
        return out

    @property
    def value(self) -> complex:
        e = self.exponent
        try:
            re = math.ldexp(self.mantissa.real, e)
            im = math.ldexp(self.mantissa.imag, e)
        except OverflowError as exc:
            raise OverflowError("scaled product overflows binary64") from exc
        return complex(re, im)
