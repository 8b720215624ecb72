"""Synthetic version of the loudspeaker experiment.

A known Volterra "speaker" replaces the measured one. Models of order 1, 2
and 3 are trained independently on one excitation (white noise, or the
noise-then-chirp composite) and scored on a fixed suite of chirp, pure-sine
and multisine test signals.
"""

from __future__ import annotations

import dataclasses
from typing import Dict, Optional, Sequence, Tuple

from .evaluation import EvalReport, evaluate_suite
from .kernel import SignalBuffer, VolterraKernel
from .nlms import TrainerConfig, TrainingTrace, train
from .oracle import OracleSpec, measure
from .signals import SignalSpec, gen

SUITE_RATE = 1000.0
SINE_FREQS = (20.0, 50.0, 70.0)


def suite_specs(rate: float = SUITE_RATE, duration: float = 2.0,
                amplitude: float = 0.5) -> Dict[str, SignalSpec]:
    """The six test signals, keyed by table name.

    Sine frequencies scale with ``rate`` so the suite keeps its shape
    relative to the sampling rate (at 1 kHz they are 20, 50 and 70 Hz).
    """
    scale = rate / SUITE_RATE
    common = dict(sample_rate=rate, duration=duration, amplitude=amplitude)
    specs = {"CHIRP": SignalSpec(kind="chirp", f_start=5 * scale, f_end=200 * scale, **common)}
    for f in SINE_FREQS:
        specs[f"{f * scale:g}Hz"] = SignalSpec(kind="sine", freq=f * scale, **common)
    specs["MULTISINE6"] = SignalSpec(kind="multisine", base_freq=50 * scale,
                                     spacing=6 * scale, count=3, **common)
    specs["MULTISINE3"] = SignalSpec(kind="multisine", base_freq=50 * scale,
                                     spacing=3 * scale, count=3, **common)
    return specs


def training_spec(kind: str = "white_noise", rate: float = SUITE_RATE, n_samples: int = 20000,
                  seed: int = 0, amplitude: float = 0.5) -> SignalSpec:
    """White-noise or 60/40 noise+chirp excitation of ``n_samples`` samples."""
    scale = rate / SUITE_RATE
    return SignalSpec(kind=kind, sample_rate=rate, duration=n_samples / rate,
                      amplitude=amplitude, seed=seed, f_start=5 * scale, f_end=200 * scale)


def train_orders(x: SignalBuffer, d: SignalBuffer, config: TrainerConfig,
                 orders: Sequence[int] = (1, 2, 3)) -> Tuple[Dict[int, VolterraKernel], Dict[int, TrainingTrace]]:
    """Train one independent model per order on the same pair."""
    kernels, traces = {}, {}
    for p in orders:
        kernels[p], traces[p] = train(x, d, dataclasses.replace(config, order=p))
    return kernels, traces


def run_protocol(truth: VolterraKernel, train_kind: str, config: TrainerConfig, *,
                 seed: int = 0, n_train: int = 20000, snr_db: Optional[float] = None,
                 rate: float = SUITE_RATE, orders: Sequence[int] = (1, 2, 3)) -> EvalReport:
    """Train every order on ``train_kind`` excitation and evaluate on the suite.

    The oracle measures both the training and the test responses; with
    ``snr_db`` the training response carries measurement noise while the
    test responses stay clean.
    """
    x = gen(training_spec(train_kind, rate=rate, n_samples=n_train, seed=seed))
    d = measure(OracleSpec(truth, snr_db=snr_db, seed=seed + 1), x)
    kernels, _ = train_orders(x, d, config, orders)
    tests = []
    for name, spec in suite_specs(rate).items():
        tx = gen(spec)
        tests.append((name, tx, measure(OracleSpec(truth), tx)))
    return evaluate_suite(kernels, tests)


def multisine_avg(report: EvalReport, order: int = 3) -> float:
    rows = [r for r in report.rows if r.name.startswith("MULTISINE")]
    return sum(r.mse_by_order[order] for r in rows) / len(rows)
