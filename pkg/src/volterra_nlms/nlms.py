"""Kernel estimation with the normalized LMS algorithm.

Every order ``p`` is corrected with the same a-priori error and its own step
``mu_p = alpha_p / (|r|^2 + phi)``. With ``normalization="joint"`` (default)
``r`` is the concatenation of all order regressors, which is the ordinary
NLMS recursion on the stacked Volterra regressor, preconditioned by the
fixed ``diag(alpha_p)``; it is stable whenever every ``alpha_p`` is in (0, 2). With ``normalization="per-order"`` ``r`` is the order's
own regressor ``x_p``. That variant is unstable in the mean as soon as a
cubic term sits next to a linear one: the cubic update reacts to linear
misfit with a gain of order ``E[x^2] E[1/x^2] >> 1``.

One epoch is a full sequential pass over the training pair; epochs repeat
until the epoch MSE drops below ``theta`` or ``max_epochs`` is reached.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from numba import njit

from .errors import ConfigError, DivergenceError, InputError, NumericError
from .kernel import (
    RegressorSet,
    SignalBuffer,
    VolterraKernel,
    coeff_count,
    triangular_indices,
)

log = logging.getLogger(__name__)

INIT_POLICIES = ("identity", "zeros", "seeded-random")
NORMALIZATIONS = ("joint", "per-order")

# epoch statistic growth (relative to the first epoch) treated as divergence
DIVERGENCE_FACTOR = 1e6


@dataclass(frozen=True)
class TrainerConfig:
    """Settings for :func:`train`.

    ``alpha`` holds one step constant per order (index 0 is order 1); only
    the first ``order`` entries are used and each must lie in (0, 2).
    """

    order: int = 3
    memory: int = 65
    alpha: Tuple[float, float, float] = (0.5, 0.5, 0.5)
    phi: float = 1e-6
    theta: float = 1e-10
    max_epochs: int = 100
    init: str = "identity"
    seed: int = 0
    normalization: str = "joint"

    def __post_init__(self):
        alpha = tuple(float(a) for a in np.broadcast_to(np.asarray(self.alpha, float), (3,)))
        object.__setattr__(self, "alpha", alpha)
        if self.order not in (1, 2, 3):
            raise ConfigError(f"order must be 1, 2 or 3, got {self.order!r}")
        if int(self.memory) != self.memory or self.memory < 1:
            raise ConfigError(f"memory must be a positive integer, got {self.memory!r}")
        for p in range(1, self.order + 1):
            a = alpha[p - 1]
            if not 0 < a < 2:
                raise ConfigError(
                    f"alpha{p}={a} violates the NLMS stability constraint 0 < alpha < 2"
                )
        if not self.phi > 0:
            raise ConfigError(f"phi must be positive, got {self.phi!r}")
        if not self.theta > 0:
            raise ConfigError(f"theta must be positive, got {self.theta!r}")
        if int(self.max_epochs) != self.max_epochs or self.max_epochs < 1:
            raise ConfigError(f"max_epochs must be >= 1, got {self.max_epochs!r}")
        if self.init not in INIT_POLICIES:
            raise ConfigError(f"init must be one of {INIT_POLICIES}, got {self.init!r}")
        if self.normalization not in NORMALIZATIONS:
            raise ConfigError(
                f"normalization must be one of {NORMALIZATIONS}, got {self.normalization!r}"
            )

    @classmethod
    def unchecked(cls, **kwargs) -> "TrainerConfig":
        """Build a config skipping validation.

        Test hook for driving the trainer outside its stable region.
        """
        cfg = object.__new__(cls)
        defaults = {f: getattr(cls, f) for f in cls.__dataclass_fields__}
        defaults.update(kwargs)
        defaults["alpha"] = tuple(
            float(a) for a in np.broadcast_to(np.asarray(defaults["alpha"], float), (3,))
        )
        for key, value in defaults.items():
            object.__setattr__(cfg, key, value)
        return cfg


@dataclass
class TrainingTrace:
    epochs_run: int = 0
    epoch_error: list = field(default_factory=list)
    converged: bool = False


def init_kernel(config: TrainerConfig) -> VolterraKernel:
    """Starting kernel for the configured initialization policy."""
    M, P = config.memory, config.order
    if config.init == "identity":
        return VolterraKernel.identity(M, P)
    if config.init == "zeros":
        return VolterraKernel.zeros(M, P)
    rng = np.random.default_rng(config.seed)
    parts = {f"h{p}": rng.normal(0.0, 1e-2, coeff_count(p, M)) for p in range(1, P + 1)}
    return VolterraKernel(memory=M, order=P, **parts)


def learning_rate(x_p, alpha_p: float, phi: float) -> float:
    """NLMS step for one order: ``alpha_p / (|x_p|^2 + phi)``."""
    x_p = np.asarray(x_p, dtype=np.float64)
    return alpha_p / (float(x_p @ x_p) + phi)


def nlms_step(
    kernel: VolterraKernel, regressors: RegressorSet, d_n: float, config: TrainerConfig
) -> Tuple[VolterraKernel, float]:
    """One NLMS correction; returns the updated kernel and the a-priori error."""
    if regressors.memory != kernel.memory:
        raise InputError(
            f"regressor memory {regressors.memory} != kernel memory {kernel.memory}"
        )
    orders = range(1, kernel.order + 1)
    y_n = sum(float(kernel.coefficients(p) @ regressors.of_order(p)) for p in orders)
    e_n = d_n - y_n
    if config.normalization == "joint":
        stacked = np.concatenate([regressors.of_order(p) for p in orders])
    updated = {}
    with np.errstate(over="ignore", invalid="ignore"):
        for p in orders:
            x_p = regressors.of_order(p)
            energy_of = stacked if config.normalization == "joint" else x_p
            mu = learning_rate(energy_of, config.alpha[p - 1], config.phi)
            h = kernel.coefficients(p) + mu * e_n * x_p
            if not (math.isfinite(e_n) and np.all(np.isfinite(h))):
                raise NumericError(f"non-finite order-{p} update", index=None)
            updated[f"h{p}"] = h
    return kernel.replace(**updated), e_n


@njit(cache=True)
def _epoch(x, d, h1, h2, h3, order, a2, b2, a3, b3, c3, alpha, phi, joint, err):
    """One in-place NLMS pass. Returns the first non-finite sample or -1."""
    M = h1.size
    n2 = a2.size
    n3 = a3.size
    buf = np.zeros(M)
    x2 = np.zeros(n2)
    x3 = np.zeros(n3)
    for n in range(x.size):
        for k in range(M - 1, 0, -1):
            buf[k] = buf[k - 1]
        buf[0] = x[n]
        y = 0.0
        e1 = 0.0
        for k in range(M):
            y += h1[k] * buf[k]
            e1 += buf[k] * buf[k]
        e2 = 0.0
        if order >= 2:
            for t in range(n2):
                v = buf[a2[t]] * buf[b2[t]]
                x2[t] = v
                y += h2[t] * v
                e2 += v * v
        e3 = 0.0
        if order >= 3:
            for t in range(n3):
                v = buf[a3[t]] * buf[b3[t]] * buf[c3[t]]
                x3[t] = v
                y += h3[t] * v
                e3 += v * v
        e = d[n] - y
        err[n] = e
        if not np.isfinite(e):
            return n
        if joint:
            e1 = e2 = e3 = e1 + e2 + e3
        g = alpha[0] / (e1 + phi) * e
        for k in range(M):
            h1[k] += g * buf[k]
        if order >= 2:
            g = alpha[1] / (e2 + phi) * e
            for t in range(n2):
                h2[t] += g * x2[t]
        if order >= 3:
            g = alpha[2] / (e3 + phi) * e
            for t in range(n3):
                h3[t] += g * x3[t]
    return -1


def run_epoch(kernel: VolterraKernel, x, d, config: TrainerConfig):
    """One compiled NLMS pass; returns ``(kernel, a_priori_errors, bad_index)``."""
    M, P = kernel.memory, kernel.order
    h = [np.array(kernel.coefficients(p), dtype=np.float64) for p in (1, 2, 3)]
    if P < 2:
        h[1] = np.zeros(0)
    if P < 3:
        h[2] = np.zeros(0)
    a2, b2 = triangular_indices(2, M) if P >= 2 else (np.zeros(0, np.intp),) * 2
    a3, b3, c3 = triangular_indices(3, M) if P >= 3 else (np.zeros(0, np.intp),) * 3
    err = np.zeros(len(x))
    bad = _epoch(
        np.asarray(x, np.float64), np.asarray(d, np.float64), h[0], h[1], h[2], P,
        a2, b2, a3, b3, c3, np.asarray(config.alpha, np.float64), float(config.phi),
        config.normalization == "joint", err,
    )
    if bad >= 0:
        return None, err, int(bad)
    if not all(np.all(np.isfinite(v)) for v in h):
        return None, err, len(x) - 1
    parts = {f"h{p}": h[p - 1] for p in range(1, P + 1)}
    return VolterraKernel(memory=M, order=P, **parts), err, -1


def train(x: SignalBuffer, d: SignalBuffer, config: TrainerConfig = TrainerConfig(),
          kernel: VolterraKernel = None) -> Tuple[VolterraKernel, TrainingTrace]:
    """Estimate a Volterra kernel mapping ``x`` to ``d``.

    Parameters
    ----------
    x, d:
        Input and desired signals of equal length and sample rate.
    config:
        Trainer settings.
    kernel:
        Optional starting kernel; overrides ``config.init``.

    Returns
    -------
    (kernel, trace)
        The final kernel and the per-epoch MSE of the a-priori errors.

    Raises
    ------
    InputError
        Length or sample-rate mismatch, or empty signals.
    DivergenceError
        Non-finite errors, or the epoch MSE growing past
        ``DIVERGENCE_FACTOR`` times its first value.
    """
    if len(x) != len(d):
        raise InputError(f"length mismatch: x has {len(x)} samples, d has {len(d)}")
    if len(x) < 1:
        raise InputError("training signals are empty")
    if x.sample_rate != d.sample_rate:
        raise InputError(f"sample rate mismatch: {x.sample_rate} vs {d.sample_rate}")
    if kernel is None:
        kernel = init_kernel(config)
    elif (kernel.memory, kernel.order) != (config.memory, config.order):
        raise InputError("starting kernel does not match config order/memory")

    trace = TrainingTrace()
    reference = None
    for epoch in range(1, config.max_epochs + 1):
        kernel_next, err, bad = run_epoch(kernel, x.samples, d.samples, config)
        if bad >= 0:
            raise DivergenceError(
                f"training diverged at epoch {epoch}, sample {bad}; "
                f"reduce alpha (got {config.alpha[:config.order]})",
                index=bad, epoch=epoch,
            )
        with np.errstate(over="ignore"):
            stat = float(np.mean(err * err))
        kernel = kernel_next
        trace.epochs_run = epoch
        trace.epoch_error.append(stat)
        log.debug("epoch %d: mse %.6g", epoch, stat)
        if reference is None:
            reference = stat
        if not math.isfinite(stat) or stat > DIVERGENCE_FACTOR * reference:
            raise DivergenceError(
                f"epoch error grew from {reference:.3g} to {stat:.3g}; "
                f"reduce alpha (got {config.alpha[:config.order]})",
                epoch=epoch,
            )
        if stat < config.theta:
            trace.converged = True
            break
    return kernel, trace
