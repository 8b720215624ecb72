"""Third-order Volterra kernels in symmetry-reduced (triangular) storage.

A kernel of memory ``M`` stores

* ``h1`` with ``M`` taps, ``h1[i]`` weighting ``x(n-i)``;
* ``h2`` with ``M(M+1)/2`` coefficients, one per pair ``i <= j``;
* ``h3`` with ``M(M+1)(M+2)/6`` coefficients, one per triple ``i <= j <= k``.

Pairs and triples are laid out lexicographically (outer index slowest), so
``h2`` reads ``(0,0), (0,1), ..., (0,M-1), (1,1), ...``. Samples before the
start of a signal are zero.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from numba import njit

from .errors import DomainError, IndexOrderError, InputError, NumericError


def coeff_count(order: int, memory: int) -> int:
    """Number of distinct coefficients of an order-``order`` kernel with ``memory`` taps."""
    if order not in (1, 2, 3):
        raise DomainError(f"order must be 1, 2 or 3, got {order!r}")
    if int(memory) != memory or memory < 1:
        raise DomainError(f"memory must be a positive integer, got {memory!r}")
    memory = int(memory)
    return math.comb(memory + order - 1, order)


def idx2(i: int, j: int, memory: int) -> int:
    """Flat position of the pair ``(i, j)``, ``i <= j``, in triangular order."""
    if not (0 <= i <= j < memory):
        raise IndexOrderError(f"need 0 <= i <= j < {memory}, got ({i}, {j})")
    return i * memory - i * (i - 1) // 2 + (j - i)


def _tetra(m: int) -> int:
    return m * (m + 1) * (m + 2) // 6


def idx3(i: int, j: int, k: int, memory: int) -> int:
    """Flat position of the triple ``(i, j, k)``, ``i <= j <= k``, in triangular order."""
    if not (0 <= i <= j <= k < memory):
        raise IndexOrderError(f"need 0 <= i <= j <= k < {memory}, got ({i}, {j}, {k})")
    # triples whose first index is < i, then pairs (j, k) over the shrunk range
    return _tetra(memory) - _tetra(memory - i) + idx2(j - i, k - i, memory - i)


@lru_cache(maxsize=64)
def triangular_indices(order: int, memory: int) -> tuple:
    """Delay-index arrays enumerating the canonical layout of one order.

    Returns a tuple of ``order`` read-only int arrays; element ``t`` of the
    flat layout is the delay tuple ``(a[t], b[t], ...)``.
    """
    coeff_count(order, memory)
    tuples = [
        t for t in itertools.product(range(memory), repeat=order)
        if all(t[q] <= t[q + 1] for q in range(order - 1))
    ]
    arrays = tuple(np.array(col, dtype=np.intp) for col in zip(*tuples))
    for a in arrays:
        a.setflags(write=False)
    return arrays


def _as_vector(values, name: str, length: int) -> np.ndarray:
    arr = np.array(values, dtype=np.float64).reshape(-1)
    if arr.size != length:
        raise DomainError(f"{name} must have {length} coefficients, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite coefficients")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class VolterraKernel:
    """Immutable Volterra kernel of order 1 to 3.

    Orders above ``order`` are absent and behave as all-zero. ``h0`` exists
    for file-format completeness and must be 0.
    """

    memory: int
    order: int
    h1: np.ndarray
    h2: Optional[np.ndarray] = None
    h3: Optional[np.ndarray] = None
    h0: float = 0.0

    def __post_init__(self):
        if self.order not in (1, 2, 3):
            raise DomainError(f"order must be 1, 2 or 3, got {self.order!r}")
        coeff_count(1, self.memory)
        object.__setattr__(self, "memory", int(self.memory))
        if self.h0 != 0:
            raise DomainError("h0 is fixed to 0")
        object.__setattr__(self, "h0", 0.0)
        for p in (1, 2, 3):
            name = f"h{p}"
            values = getattr(self, name)
            if p <= self.order:
                if values is None:
                    raise DomainError(f"order-{self.order} kernel needs {name}")
                object.__setattr__(
                    self, name, _as_vector(values, name, coeff_count(p, self.memory))
                )
            elif values is not None:
                raise DomainError(f"{name} given for an order-{self.order} kernel")

    @classmethod
    def zeros(cls, memory: int, order: int) -> "VolterraKernel":
        parts = {f"h{p}": np.zeros(coeff_count(p, memory)) for p in range(1, order + 1)}
        return cls(memory=memory, order=order, **parts)

    @classmethod
    def identity(cls, memory: int, order: int) -> "VolterraKernel":
        h1 = np.zeros(memory)
        h1[0] = 1.0
        parts = {f"h{p}": np.zeros(coeff_count(p, memory)) for p in range(2, order + 1)}
        return cls(memory=memory, order=order, h1=h1, **parts)

    def coefficients(self, p: int) -> np.ndarray:
        """Order-``p`` coefficients; zeros when ``p`` exceeds the kernel order."""
        if p > self.order:
            return np.zeros(coeff_count(p, self.memory))
        return getattr(self, f"h{p}")

    def replace(self, **parts) -> "VolterraKernel":
        fields = {"memory": self.memory, "order": self.order}
        fields.update({f"h{p}": getattr(self, f"h{p}") for p in range(1, self.order + 1)})
        fields.update(parts)
        return VolterraKernel(**fields)

    def only_order(self, p: int) -> "VolterraKernel":
        """Copy keeping the order-``p`` part and zeroing the rest."""
        parts = {
            f"h{q}": (self.coefficients(q) if q == p else np.zeros(coeff_count(q, self.memory)))
            for q in range(1, self.order + 1)
        }
        return VolterraKernel(memory=self.memory, order=self.order, **parts)

    def flat(self) -> np.ndarray:
        """All coefficients concatenated, order 1 first."""
        return np.concatenate([self.coefficients(p) for p in range(1, self.order + 1)])

    @property
    def n_coeffs(self) -> int:
        return sum(coeff_count(p, self.memory) for p in range(1, self.order + 1))


@dataclass(frozen=True, eq=False)
class SignalBuffer:
    """Uniformly sampled real signal."""

    samples: np.ndarray
    sample_rate: float = 48000.0

    def __post_init__(self):
        samples = np.array(self.samples, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(samples)):
            raise InputError("signal contains non-finite samples")
        rate = float(self.sample_rate)
        if not (math.isfinite(rate) and rate > 0):
            raise InputError(f"sample_rate must be positive, got {self.sample_rate!r}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", rate)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


@dataclass(frozen=True, eq=False)
class RegressorSet:
    """Regressor vectors ``x1``, ``x2``, ``x3`` for one time step."""

    x1: np.ndarray
    x2: np.ndarray
    x3: np.ndarray

    def of_order(self, p: int) -> np.ndarray:
        return (self.x1, self.x2, self.x3)[p - 1]

    @property
    def memory(self) -> int:
        return self.x1.size


def _samples(x) -> np.ndarray:
    if isinstance(x, SignalBuffer):
        return x.samples
    return np.asarray(x, dtype=np.float64).reshape(-1)


def build_regressors(x, n: int, memory: int) -> RegressorSet:
    """Regressors at sample ``n``: the ``memory`` newest samples, newest first,
    and their pairwise and triple products in canonical order."""
    xs = _samples(x)
    coeff_count(1, memory)
    if not 0 <= n < xs.size:
        raise IndexError(f"sample index {n} outside signal of length {xs.size}")
    x1 = np.zeros(memory)
    avail = min(memory, n + 1)
    x1[:avail] = xs[n::-1][:avail]
    a2, b2 = triangular_indices(2, memory)
    a3, b3, c3 = triangular_indices(3, memory)
    return RegressorSet(x1=x1, x2=x1[a2] * x1[b2], x3=x1[a3] * x1[b3] * x1[c3])


def delay_matrix(xs: np.ndarray, memory: int) -> np.ndarray:
    """Rows ``[x(n), x(n-1), ..., x(n-M+1)]`` for every ``n``, zero pre-history."""
    padded = np.concatenate([np.zeros(memory - 1), xs])
    return np.lib.stride_tricks.sliding_window_view(padded, memory)[:, ::-1]


def _check_finite(y: np.ndarray) -> None:
    bad = ~np.isfinite(y)
    if bad.any():
        first = int(np.argmax(bad))
        raise NumericError(f"non-finite output at sample {first}", index=first)


@njit(cache=True)
def _filter(xs, h1, h2, h3, a2, b2, a3, b3, c3, y):
    M = h1.size
    buf = np.zeros(M)
    for n in range(xs.size):
        for k in range(M - 1, 0, -1):
            buf[k] = buf[k - 1]
        buf[0] = xs[n]
        acc = 0.0
        for k in range(M):
            acc += h1[k] * buf[k]
        for t in range(h2.size):
            acc += h2[t] * (buf[a2[t]] * buf[b2[t]])
        for t in range(h3.size):
            acc += h3[t] * (buf[a3[t]] * buf[b3[t]] * buf[c3[t]])
        y[n] = acc


def apply_kernel(kernel: VolterraKernel, x) -> SignalBuffer:
    """Filter ``x`` through ``kernel`` using the triangular regressors.

    Each output sample is accumulated in the same fixed order, so the
    result for a sample depends only on its ``memory`` most recent inputs.
    """
    xs = np.ascontiguousarray(_samples(x), dtype=np.float64)
    rate = x.sample_rate if isinstance(x, SignalBuffer) else 1.0
    M = kernel.memory
    empty = np.zeros(0, dtype=np.intp)
    a2, b2 = triangular_indices(2, M) if kernel.order >= 2 else (empty, empty)
    a3, b3, c3 = triangular_indices(3, M) if kernel.order >= 3 else (empty, empty, empty)
    h2 = kernel.h2 if kernel.order >= 2 else np.zeros(0)
    h3 = kernel.h3 if kernel.order >= 3 else np.zeros(0)
    y = np.zeros(xs.size)
    _filter(xs, kernel.h1, h2, h3, a2, b2, a3, b3, c3, y)
    _check_finite(y)
    return SignalBuffer(y, rate)


def _multiplicity(t: tuple) -> int:
    """Number of distinct orderings of the delay tuple ``t``."""
    counts = np.unique(t, return_counts=True)[1]
    return math.factorial(len(t)) // math.prod(math.factorial(int(c)) for c in counts)


def full_kernel(kernel: VolterraKernel, p: int) -> np.ndarray:
    """Symmetric dense ``M**p`` array for order ``p``.

    A triangular coefficient is split evenly over the permutations of its
    delay tuple, so summing the dense array over all tuples reproduces the
    triangular contraction.
    """
    M = kernel.memory
    tri = kernel.coefficients(p)
    dense = np.zeros((M,) * p)
    for t in itertools.product(range(M), repeat=p):
        s = tuple(sorted(t))
        flat = s[0] if p == 1 else idx2(*s, M) if p == 2 else idx3(*s, M)
        dense[t] = tri[flat] / _multiplicity(s)
    return dense


def apply_kernel_naive(kernel: VolterraKernel, x) -> SignalBuffer:
    """Reference evaluator: the plain triple sum over every delay tuple.

    Slow (``M**3`` passes over the signal); meant as a test oracle for small M.
    """
    xs = _samples(x)
    rate = x.sample_rate if isinstance(x, SignalBuffer) else 1.0
    M = kernel.memory
    n = xs.size

    def delayed(tau):
        out = np.zeros(n)
        if tau < n:
            out[tau:] = xs[: n - tau]
        return out

    y = np.zeros(n)
    with np.errstate(over="ignore", invalid="ignore"):
        for p in range(1, kernel.order + 1):
            dense = full_kernel(kernel, p)
            for t in itertools.product(range(M), repeat=p):
                term = np.full(n, dense[t])
                for tau in t:
                    term = term * delayed(tau)
                y += term
    _check_finite(y)
    return SignalBuffer(y, rate)
