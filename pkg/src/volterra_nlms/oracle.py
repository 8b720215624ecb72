"""Synthetic nonlinear loudspeaker used as ground truth for closed-loop tests."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import SpecError
from .kernel import (
    SignalBuffer,
    VolterraKernel,
    apply_kernel,
    triangular_indices,
)

LINEAR_DECAY = 0.5
QUADRATIC_RATIO = 0.05
CUBIC_RATIO = 0.01


@dataclass(frozen=True, eq=False)
class OracleSpec:
    truth: VolterraKernel
    snr_db: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.truth, VolterraKernel):
            raise SpecError("truth must be a VolterraKernel")
        if self.snr_db is not None and not math.isfinite(self.snr_db):
            raise SpecError(f"snr_db must be finite, got {self.snr_db!r}")


def make_default_speaker(memory: int, seed: int = 0) -> VolterraKernel:
    """Mildly nonlinear order-3 kernel resembling a small loudspeaker.

    ``h1`` decays geometrically from 1 with random signs; ``h2`` and ``h3``
    are random with the same decay envelope and are rescaled so their norms
    are 5% and 1% of ``|h1|``.
    """
    if memory < 2:
        raise SpecError(f"default speaker needs memory >= 2, got {memory}")
    rng = np.random.default_rng(seed)
    signs = np.concatenate([[1.0], rng.choice([-1.0, 1.0], memory - 1)])
    h1 = signs * LINEAR_DECAY ** np.arange(memory)
    norm1 = np.linalg.norm(h1)

    def shaped(order, ratio):
        delays = sum(triangular_indices(order, memory))
        v = rng.standard_normal(delays.size) * LINEAR_DECAY ** (delays / order)
        return v * (ratio * norm1 / np.linalg.norm(v))

    return VolterraKernel(
        memory=memory, order=3, h1=h1,
        h2=shaped(2, QUADRATIC_RATIO), h3=shaped(3, CUBIC_RATIO),
    )


def measure(spec: OracleSpec, x: SignalBuffer) -> SignalBuffer:
    """Desired signal: ``truth`` applied to ``x``, plus optional uniform white noise
    at ``snr_db`` below the noiseless output power."""
    d = apply_kernel(spec.truth, x)
    if spec.snr_db is None:
        return d
    power = float(np.mean(d.samples**2)) if len(d) else 0.0
    if power == 0.0:
        raise SpecError("SNR is undefined for a zero-power signal")
    noise_power = power / 10 ** (spec.snr_db / 10)
    half_width = math.sqrt(3 * noise_power)
    noise = np.random.default_rng(spec.seed).uniform(-half_width, half_width, len(d))
    return SignalBuffer(d.samples + noise, d.sample_rate)


def snr_db(clean: SignalBuffer, noisy: SignalBuffer) -> float:
    """Empirical SNR of ``noisy`` relative to ``clean``."""
    noise = noisy.samples - clean.samples
    return 10 * math.log10(np.mean(clean.samples**2) / np.mean(noise**2))
