"""MSE comparison of model orders over a test suite."""

from __future__ import annotations

import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import InputError, VolterraError
from .kernel import SignalBuffer, VolterraKernel, apply_kernel


def mse(y: SignalBuffer, d: SignalBuffer) -> float:
    """Mean squared difference between two equally long signals."""
    ys = y.samples if isinstance(y, SignalBuffer) else np.asarray(y, dtype=np.float64)
    ds = d.samples if isinstance(d, SignalBuffer) else np.asarray(d, dtype=np.float64)
    if ys.size != ds.size:
        raise InputError(f"length mismatch: {ys.size} vs {ds.size}")
    if ys.size < 1:
        raise InputError("mse of empty signals")
    diff = ys - ds
    return float(np.mean(diff * diff))


@dataclass
class EvalRow:
    name: str
    output_range: Tuple[float, float] = (float("nan"), float("nan"))
    mse_by_order: Dict[int, float] = field(default_factory=dict)
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None


def improvement(before: float, after: float) -> float:
    """Percentage reduction going from ``before`` to ``after``."""
    if before == 0:
        return 0.0 if after == 0 else float("-inf")
    return 100.0 * (before - after) / before


@dataclass
class EvalReport:
    """Per-signal MSE table with aggregate statistics.

    ``improvement_pct[(p, q)]`` holds ``{"avg": ..., "max": ...}``: the
    percentage reduction of the average and maximum MSE from order ``p`` to
    order ``q``. Failed rows are kept but excluded from the aggregates.
    """

    rows: List[EvalRow]
    avg_mse_by_order: Dict[int, float] = field(default_factory=dict)
    max_mse_by_order: Dict[int, float] = field(default_factory=dict)
    improvement_pct: Dict[Tuple[int, int], Dict[str, float]] = field(default_factory=dict)

    @property
    def orders(self) -> List[int]:
        return sorted(self.avg_mse_by_order)

    @property
    def failed(self) -> bool:
        return any(r.failed for r in self.rows)

    @classmethod
    def from_rows(cls, rows: List[EvalRow], orders: Sequence[int]) -> "EvalReport":
        good = [r for r in rows if not r.failed]
        avg, peak = {}, {}
        for p in orders:
            values = [r.mse_by_order[p] for r in good]
            avg[p] = float(np.mean(values)) if values else float("nan")
            peak[p] = float(np.max(values)) if values else float("nan")
        gains = {
            (p, q): {"avg": improvement(avg[p], avg[q]), "max": improvement(peak[p], peak[q])}
            for p, q in itertools.combinations(sorted(orders), 2)
        }
        return cls(rows=rows, avg_mse_by_order=avg, max_mse_by_order=peak, improvement_pct=gains)

    def to_dict(self) -> dict:
        return {
            "rows": [
                {
                    "name": r.name,
                    "output_range": list(r.output_range),
                    "mse_by_order": {str(p): v for p, v in sorted(r.mse_by_order.items())},
                    "error": r.error,
                }
                for r in self.rows
            ],
            "avg_mse_by_order": {str(p): v for p, v in self.avg_mse_by_order.items()},
            "max_mse_by_order": {str(p): v for p, v in self.max_mse_by_order.items()},
            "improvement_pct": {f"{p}->{q}": v for (p, q), v in self.improvement_pct.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> "EvalReport":
        rows = [
            EvalRow(
                name=r["name"],
                output_range=tuple(r["output_range"]),
                mse_by_order={int(p): v for p, v in r["mse_by_order"].items()},
                error=r.get("error"),
            )
            for r in doc["rows"]
        ]
        gains = {}
        for key, v in doc["improvement_pct"].items():
            p, q = key.split("->")
            gains[(int(p), int(q))] = v
        return cls(
            rows=rows,
            avg_mse_by_order={int(p): v for p, v in doc["avg_mse_by_order"].items()},
            max_mse_by_order={int(p): v for p, v in doc["max_mse_by_order"].items()},
            improvement_pct=gains,
        )

    def render(self) -> str:
        """Aligned plain-text tables: ranges, MSE per order, aggregates."""
        orders = self.orders
        width = max([len("Signal")] + [len(r.name) for r in self.rows]) + 2
        label = {1: "linear", 2: "2nd order", 3: "3rd order"}
        lines = [
            "Signal".ljust(width) + "Output range".ljust(22)
            + "".join(label.get(p, f"order {p}").rjust(14) for p in orders)
        ]
        for r in self.rows:
            if r.failed:
                lines.append(r.name.ljust(width) + f"FAILED: {r.error}")
                continue
            lo, hi = r.output_range
            lines.append(
                r.name.ljust(width) + f"[{lo:.3g}, {hi:.3g}]".ljust(22)
                + "".join(f"{r.mse_by_order[p]:14.4e}" for p in orders)
            )
        lines.append("")
        lines.append("avg MSE".ljust(width + 22) + "".join(f"{self.avg_mse_by_order[p]:14.4e}" for p in orders))
        lines.append("max MSE".ljust(width + 22) + "".join(f"{self.max_mse_by_order[p]:14.4e}" for p in orders))
        lines.append("")
        for (p, q), v in self.improvement_pct.items():
            lines.append(
                f"order {p} -> {q}: avg MSE {v['avg']:+.2f}%  max MSE {v['max']:+.2f}% (reduction)"
            )
        return "\n".join(lines) + "\n"


KernelSet = Union[Mapping[int, VolterraKernel], Sequence[VolterraKernel]]


def _evaluate_row(kernels: Mapping[int, VolterraKernel], name, x, d, catch: bool) -> EvalRow:
    try:
        if len(x) != len(d):
            raise InputError(f"{name}: x has {len(x)} samples, d has {len(d)}")
        row = EvalRow(name=name, output_range=(float(d.samples.min()), float(d.samples.max())))
        for p, k in kernels.items():
            row.mse_by_order[p] = mse(apply_kernel(k, x), d)
        return row
    except VolterraError as exc:
        if not catch:
            raise
        return EvalRow(name=name, error=str(exc))


def evaluate_suite(
    kernels: KernelSet,
    tests: Sequence[Tuple[str, SignalBuffer, SignalBuffer]],
    *,
    keep_failed: bool = False,
    workers: int = 1,
) -> EvalReport:
    """Score each order's kernel on every ``(name, x, d)`` test pair.

    ``kernels`` maps order to kernel, or is a sequence taken as orders 1, 2, 3.
    With ``keep_failed`` a row whose evaluation raises is recorded as failed
    instead of aborting the whole suite.
    """
    if not isinstance(kernels, Mapping):
        kernels = {p: k for p, k in enumerate(kernels, start=1)}
    memories = {k.memory for k in kernels.values()}
    if len(memories) > 1:
        raise InputError(f"kernels disagree on memory: {sorted(memories)}")
    jobs = [(name, x, d) for name, x, d in tests]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda t: _evaluate_row(kernels, *t, keep_failed), jobs))
    else:
        rows = [_evaluate_row(kernels, *t, keep_failed) for t in jobs]
    return EvalReport.from_rows(rows, sorted(kernels))
