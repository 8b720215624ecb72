import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from volterra_nlms.errors import InputError
from volterra_nlms.evaluation import (
    EvalReport,
    EvalRow,
    evaluate_suite,
    improvement,
    mse,
)
from volterra_nlms.kernel import SignalBuffer, VolterraKernel, apply_kernel
from volterra_nlms.oracle import make_default_speaker

from conftest import random_kernel


def test_mse_examples():
    assert mse(SignalBuffer([1.0, 2.0]), SignalBuffer([1.0, 2.0])) == 0.0
    assert mse(SignalBuffer([1.0, 1.0]), SignalBuffer([0.0, 0.0])) == 1.0
    assert mse(SignalBuffer([2.0]), SignalBuffer([0.0])) == 4.0
    with pytest.raises(InputError):
        mse(SignalBuffer([1.0]), SignalBuffer([1.0, 2.0]))
    with pytest.raises(InputError):
        mse(np.array([]), np.array([]))


@given(arrays(np.float64, st.integers(1, 50), elements=st.floats(-10, 10)), st.randoms())
def test_mse_permutation_invariant(y, random):
    d = y[::-1] * 0.5 + 1.0
    perm = list(range(y.size))
    random.shuffle(perm)
    assert mse(y[perm], d[perm]) == pytest.approx(mse(y, d), rel=1e-12, abs=0)
    assert mse(y, d) >= 0


def test_improvement_from_table_row():
    # 70 Hz row, white-noise training: linear vs third order
    assert improvement(0.0001184, 0.0001132) == pytest.approx(4.39, abs=0.005)


# MSE tables for the measured speaker (linear, 2nd, 3rd order per test signal)
WHITE_NOISE_TABLE = {
    "CHIRP": (2.32e-05, 2.25e-05, 2.10e-05),
    "20Hz": (7.16e-05, 6.96e-05, 6.62e-05),
    "50Hz": (5.33e-04, 0.000535, 0.00053928),
    "70Hz": (0.0001184, 0.0001142, 0.0001132),
    "MULTISINE6": (0.0003404, 0.000340, 0.0003391),
    "MULTISINE3": (0.0023386, 0.0022054, 0.0020482),
}
COMPOSITE_TABLE = {
    "CHIRP": (2.38e-05, 2.34e-05, 2.11e-05),
    "20Hz": (7.59e-05, 7.51e-05, 7.00e-05),
    "50Hz": (0.0005244, 0.0005244, 0.000479),
    "70Hz": (0.0001333, 1.31e-04, 1.30e-04),
    "MULTISINE6": (0.000352, 0.000334, 0.0002713),
    "MULTISINE3": (0.0023742, 0.0023423, 0.0019952),
}


def _report(table):
    rows = [EvalRow(name=n, output_range=(0.0, 0.0), mse_by_order=dict(zip((1, 2, 3), v)))
            for n, v in table.items()]
    return EvalReport.from_rows(rows, (1, 2, 3))


def test_published_aggregate_percentages():
    white, composite = _report(WHITE_NOISE_TABLE), _report(COMPOSITE_TABLE)
    assert round(white.improvement_pct[(1, 3)]["avg"], 2) == 8.71
    assert round(white.improvement_pct[(1, 3)]["max"], 2) == 12.42
    assert round(composite.improvement_pct[(1, 3)]["max"], 2) == 15.96
    assert round(composite.improvement_pct[(1, 2)]["max"], 2) == 1.34
    for report in (white, composite):
        assert report.avg_mse_by_order[3] < report.avg_mse_by_order[1]
        assert report.max_mse_by_order[3] < report.max_mse_by_order[1]


def _suite(rng, truth, names=("a", "b", "c")):
    tests = []
    for name in names:
        x = SignalBuffer(rng.uniform(-0.5, 0.5, 400), 1000.0)
        tests.append((name, x, apply_kernel(truth, x)))
    return tests


def test_self_consistent_suite(rng):
    k3 = random_kernel(rng, 3, scale=(0.5, 0.1, 0.05))
    kernels = {1: VolterraKernel(3, 1, h1=k3.h1), 2: VolterraKernel(3, 2, h1=k3.h1, h2=k3.h2), 3: k3}
    report = evaluate_suite(kernels, _suite(rng, k3))
    for row in report.rows:
        assert row.mse_by_order[3] < 1e-20
        assert row.mse_by_order[3] == min(row.mse_by_order.values())
        lo, hi = row.output_range
        assert lo < 0 < hi


def test_report_aggregates_recompute(rng):
    kernels = [random_kernel(rng, 2, order=p) for p in (1, 2, 3)]
    report = evaluate_suite(kernels, _suite(rng, make_default_speaker(2)))
    again = EvalReport.from_rows(report.rows, (1, 2, 3))
    assert again.avg_mse_by_order == report.avg_mse_by_order
    assert again.max_mse_by_order == report.max_mse_by_order
    assert again.improvement_pct == report.improvement_pct
    for p in (1, 2, 3):
        values = [r.mse_by_order[p] for r in report.rows]
        assert report.max_mse_by_order[p] == max(values)
    for (p, q), v in report.improvement_pct.items():
        a, b = report.avg_mse_by_order[p], report.avg_mse_by_order[q]
        assert v["avg"] == 100 * (a - b) / a
    restored = EvalReport.from_dict(__import__("json").loads(report.to_json()))
    assert restored.to_json() == report.to_json()


def test_parallel_rows_match_serial(rng):
    kernels = [random_kernel(rng, 3, order=p) for p in (1, 2, 3)]
    tests = _suite(rng, make_default_speaker(3), names=[f"s{i}" for i in range(8)])
    serial = evaluate_suite(kernels, tests)
    parallel = evaluate_suite(kernels, tests, workers=4)
    assert serial.to_json() == parallel.to_json()


def test_failed_rows(rng):
    kernels = [random_kernel(rng, 2, order=p) for p in (1, 2, 3)]
    tests = _suite(rng, make_default_speaker(2), names=["ok"])
    tests.append(("short", SignalBuffer(np.zeros(5)), SignalBuffer(np.zeros(4))))
    with pytest.raises(InputError):
        evaluate_suite(kernels, tests)
    report = evaluate_suite(kernels, tests, keep_failed=True)
    assert report.failed and report.rows[1].failed
    assert report.avg_mse_by_order[1] == report.rows[0].mse_by_order[1]
    text = report.render()
    assert "FAILED" in text and "ok" in text


def test_mismatched_memory_rejected(rng):
    with pytest.raises(InputError):
        evaluate_suite([random_kernel(rng, 2, 1), random_kernel(rng, 3, 2)], [])
