"""Deterministic excitation and test signals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import SpecError
from .kernel import SignalBuffer

KINDS = ("sine", "chirp", "multisine", "white_noise", "composite")


@dataclass(frozen=True)
class SignalSpec:
    """Parameters of one generated signal.

    Only the fields relevant to ``kind`` are read. ``composite`` is a
    white-noise segment followed by a chirp segment, split by ``fractions``.
    """

    kind: str = "sine"
    sample_rate: float = 48000.0
    duration: float = 5.0
    amplitude: float = 0.5
    freq: float = 50.0
    f_start: float = 20.0
    f_end: float = 1000.0
    base_freq: float = 50.0
    spacing: float = 6.0
    count: int = 3
    seed: int = 0
    fractions: Tuple[float, float] = (0.6, 0.4)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"unknown signal kind {self.kind!r}; expected one of {KINDS}")
        if not (self.sample_rate > 0 and math.isfinite(self.sample_rate)):
            raise SpecError(f"sample_rate must be positive, got {self.sample_rate!r}")
        if not (self.duration > 0 and math.isfinite(self.duration)):
            raise SpecError(f"duration must be positive, got {self.duration!r}")
        if not (self.amplitude > 0 and math.isfinite(self.amplitude)):
            raise SpecError(f"amplitude must be positive, got {self.amplitude!r}")
        if self.n_samples < 1:
            raise SpecError("duration too short for a single sample")
        nyquist = self.sample_rate / 2
        for f in self.frequencies():
            if not 0 < f < nyquist:
                raise SpecError(f"frequency {f} Hz outside (0, {nyquist}) Hz")
        if self.kind == "multisine" and (int(self.count) != self.count or self.count < 1):
            raise SpecError(f"multisine count must be a positive integer, got {self.count!r}")
        if self.kind == "composite":
            a, b = self.fractions
            if not (a > 0 and b > 0 and math.isclose(a + b, 1.0)):
                raise SpecError(f"composite fractions must be positive and sum to 1, got {self.fractions}")

    @property
    def n_samples(self) -> int:
        return int(round(self.duration * self.sample_rate))

    def frequencies(self) -> list:
        """Frequencies this spec will synthesize, in Hz."""
        if self.kind == "sine":
            return [self.freq]
        if self.kind in ("chirp", "composite"):
            return [self.f_start, self.f_end]
        if self.kind == "multisine":
            return [self.base_freq + q * self.spacing for q in range(int(self.count))]
        return []


def _chirp(n: int, rate: float, f0: float, f1: float, amp: float) -> np.ndarray:
    t = np.arange(n) / rate
    sweep = n / rate
    phase = 2 * np.pi * (f0 * t + 0.5 * (f1 - f0) / sweep * t**2)
    return amp * np.sin(phase)


def gen(spec: SignalSpec) -> SignalBuffer:
    """Synthesize the signal described by ``spec``."""
    n, rate, amp = spec.n_samples, spec.sample_rate, spec.amplitude
    t = np.arange(n) / rate
    if spec.kind == "sine":
        y = amp * np.sin(2 * np.pi * spec.freq * t)
    elif spec.kind == "chirp":
        y = _chirp(n, rate, spec.f_start, spec.f_end, amp)
    elif spec.kind == "multisine":
        y = sum(np.sin(2 * np.pi * f * t) for f in spec.frequencies())
        if np.any(y):
            # rescaling can land one ulp above amp
            y = np.clip(amp * y / np.max(np.abs(y)), -amp, amp)
    elif spec.kind == "white_noise":
        y = np.random.default_rng(spec.seed).uniform(-amp, amp, n)
    else:
        n_noise = int(round(spec.fractions[0] * n))
        noise = np.random.default_rng(spec.seed).uniform(-amp, amp, n_noise)
        y = np.concatenate([noise, _chirp(n - n_noise, rate, spec.f_start, spec.f_end, amp)])
    return SignalBuffer(np.asarray(y, dtype=np.float64), rate)
