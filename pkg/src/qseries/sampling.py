"""Seeded random draws shared by identity verification and proof replay."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import SamplingExhausted

MAX_REJECTIONS = 100_000
MAGNITUDE_RANGE = (0.1, 10.0)
BASE_RANGE = (0.1, 0.9)
JACKSON_MAX_N = 12


def trial_rng(seed: int, trial: int, stream: str = "") -> np.random.Generator:
    """Independent generator per (seed, trial index, stream)."""
    salt = [ord(ch) for ch in stream]
    return np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, trial, *salt])


def draw_scalar(rng: np.random.Generator, complex_params: bool) -> complex:
    """Log-uniform magnitude in MAGNITUDE_RANGE with a random sign (or phase)."""
    lo, hi = MAGNITUDE_RANGE
    mag = math.exp(rng.uniform(math.log(lo), math.log(hi)))
    if complex_params:
        return complex(mag * np.exp(1j * rng.uniform(0.0, 2.0 * math.pi)))
    return complex(mag if rng.random() < 0.5 else -mag)


def draw_base(rng: np.random.Generator, complex_params: bool) -> complex:
    mag = rng.uniform(*BASE_RANGE)
    if complex_params:
        return complex(mag * np.exp(1j * rng.uniform(0.0, 2.0 * math.pi)))
    return complex(mag)


def draw_params(names, rng: np.random.Generator, complex_params: bool, integer_params=()) -> dict[str, complex]:
    out: dict[str, complex] = {}
    for name in names:
        if name == "q":
            out[name] = draw_base(rng, complex_params)
        elif name in integer_params:
            out[name] = int(rng.integers(0, JACKSON_MAX_N + 1))
        else:
            out[name] = draw_scalar(rng, complex_params)
    return out


def rejection_sample(
    names,
    accept: Callable[[dict[str, complex]], bool],
    rng: np.random.Generator,
    complex_params: bool,
    integer_params=(),
    label: str = "",
) -> dict[str, complex]:
    for _ in range(MAX_REJECTIONS):
        p = draw_params(names, rng, complex_params, integer_params)
        if accept(p):
            return p
    raise SamplingExhausted(f"no in-domain point for {label} after {MAX_REJECTIONS} draws")
