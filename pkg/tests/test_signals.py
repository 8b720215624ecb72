import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from volterra_nlms.errors import SpecError
from volterra_nlms.signals import SignalSpec, gen


def test_sine_starts_at_zero():
    s = gen(SignalSpec(kind="sine", freq=50, sample_rate=48000, duration=1, amplitude=0.5))
    assert len(s) == 48000 and s.samples[0] == 0.0
    assert np.max(np.abs(s.samples)) <= 0.5


def test_multisine_components():
    spec = SignalSpec(kind="multisine", base_freq=100, spacing=6, count=3,
                      sample_rate=6000, duration=1.0)
    assert spec.frequencies() == [100, 106, 112]
    s = gen(spec)
    spectrum = np.abs(np.fft.rfft(s.samples))
    peaks = sorted(np.argsort(spectrum)[-3:])
    assert peaks == [100, 106, 112]  # 1 Hz bins
    assert np.max(np.abs(s.samples)) == pytest.approx(spec.amplitude, rel=1e-12)


def test_composite_layout():
    spec = SignalSpec(kind="composite", duration=10, sample_rate=1000, f_start=5, f_end=100, seed=7)
    s = gen(spec).samples
    assert s.size == 10000
    noise, chirp = s[:6000], s[6000:]

    def lag1(v):
        return np.corrcoef(v[:-1], v[1:])[0, 1]

    assert abs(lag1(noise)) < 0.05
    assert lag1(chirp) > 0.9
    expected = gen(SignalSpec(kind="chirp", duration=4, sample_rate=1000, f_start=5, f_end=100))
    np.testing.assert_array_equal(chirp, expected.samples)
    reference = gen(SignalSpec(kind="white_noise", duration=6, sample_rate=1000, seed=7))
    np.testing.assert_array_equal(noise, reference.samples)


@pytest.mark.parametrize("kind", ["sine", "chirp", "multisine", "white_noise", "composite"])
def test_deterministic_and_bounded(kind):
    spec = SignalSpec(kind=kind, sample_rate=8000, duration=0.5, amplitude=0.3, seed=4)
    a, b = gen(spec), gen(spec)
    assert a.samples.tobytes() == b.samples.tobytes()
    assert np.max(np.abs(a.samples)) <= 0.3


def test_noise_seed_matters():
    a = gen(SignalSpec(kind="white_noise", seed=1, duration=0.01))
    b = gen(SignalSpec(kind="white_noise", seed=2, duration=0.01))
    assert not np.array_equal(a.samples, b.samples)


def _crossings(v):
    """Zero-crossing times in samples, linearly interpolated."""
    i = np.nonzero(np.signbit(v[:-1]) != np.signbit(v[1:]))[0]
    return i + v[i] / (v[i] - v[i + 1])


@pytest.mark.parametrize("f0, f1, rate, dur", [
    (100, 1000, 48000, 5), (50, 2000, 48000, 10), (2000, 500, 44100, 3),
])
def test_chirp_instantaneous_frequency(f0, f1, rate, dur):
    s = gen(SignalSpec(kind="chirp", f_start=f0, f_end=f1, sample_rate=rate, duration=dur)).samples
    z = _crossings(s)
    measured = rate / (2 * np.diff(z))
    t_mid = (z[1:] + z[:-1]) / (2 * rate)
    expected = f0 + (f1 - f0) * t_mid / dur
    np.testing.assert_allclose(measured, expected, rtol=0.01)
    slope, start = np.polyfit(t_mid, measured, 1)
    assert start == pytest.approx(f0, rel=0.01)
    assert start + slope * dur == pytest.approx(f1, rel=0.01)


def test_white_noise_mean():
    n = 200_000
    s = gen(SignalSpec(kind="white_noise", sample_rate=1000, duration=n / 1000, amplitude=0.5, seed=3))
    sigma = 0.5 / np.sqrt(3)
    assert abs(s.samples.mean()) < 3 * sigma / np.sqrt(n)
    assert s.samples.std() == pytest.approx(sigma, rel=0.01)


@pytest.mark.parametrize("bad", [
    dict(kind="sine", freq=30000), dict(kind="sine", freq=0), dict(kind="chirp", f_end=24000),
    dict(kind="multisine", base_freq=23990, spacing=6, count=3), dict(kind="sine", duration=0),
    dict(kind="sine", amplitude=-1), dict(kind="square"),
    dict(kind="composite", fractions=(0.7, 0.4)), dict(kind="composite", fractions=(1.0, 0.0)),
    dict(kind="multisine", count=0),
])
def test_invalid_parameters_rejected(bad):
    with pytest.raises(SpecError):
        SignalSpec(**bad)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["sine", "chirp", "multisine", "white_noise", "composite"]),
       st.floats(0.01, 2.0), st.integers(0, 1000))
def test_peak_never_exceeds_amplitude(kind, amp, seed):
    s = gen(SignalSpec(kind=kind, amplitude=amp, sample_rate=4000, duration=0.25, seed=seed))
    assert np.max(np.abs(s.samples)) <= amp
