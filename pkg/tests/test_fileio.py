import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from volterra_nlms import fileio
from volterra_nlms.errors import ParseError
from volterra_nlms.kernel import SignalBuffer, VolterraKernel, coeff_count
from volterra_nlms.oracle import make_default_speaker

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=50)
@given(arrays(np.float64, st.integers(0, 40), elements=finite),
       st.floats(1e-3, 1e6, allow_nan=False))
def test_signal_round_trip(samples, rate):
    sig = SignalBuffer(samples, rate)
    text = fileio.format_signal(sig)
    back = fileio.parse_signal(text)
    assert back.samples.tobytes() == sig.samples.tobytes()
    assert back.sample_rate == sig.sample_rate
    assert fileio.format_signal(back) == text


@settings(max_examples=30)
@given(st.integers(1, 6), st.sampled_from([1, 2, 3]), st.data())
def test_kernel_round_trip(memory, order, data):
    parts = {
        f"h{p}": data.draw(arrays(np.float64, coeff_count(p, memory), elements=finite))
        for p in range(1, order + 1)
    }
    k = VolterraKernel(memory=memory, order=order, **parts)
    text = fileio.format_kernel(k, {"epochs": "3", "note": "a b=c"})
    back, meta = fileio.parse_kernel(text)
    assert back.flat().tobytes() == k.flat().tobytes()
    assert (back.memory, back.order) == (memory, order)
    assert meta == {"epochs": "3", "note": "a b=c"}
    assert fileio.format_kernel(back, meta) == text


def test_signal_file_layout(tmp_path):
    path = tmp_path / "s.sig"
    fileio.write_signal(path, SignalBuffer([0.0, 0.1, -2.5], 48000))
    raw = path.read_bytes()
    assert raw == b"rate=48000 n=3\n0\n0.10000000000000001\n-2.5\n"
    assert fileio.read_signal(path).samples[1] == 0.1
    assert not list(tmp_path.glob(".*tmp"))


@pytest.mark.parametrize("text", [
    "", "rate=1000\n1\n", "rate=1000 n=2\n1\n", "rate=1000 n=1\nabc\n",
    "rate=1000 n=1\nnan\n", "rate=0 n=1\n1\n", "rate=1000 n=x\n1\n",
])
def test_signal_parse_errors(text):
    with pytest.raises(ParseError):
        fileio.parse_signal(text)


def test_kernel_file_layout():
    k = VolterraKernel(memory=2, order=2, h1=[1.0, 0.5], h2=[0.25, 0.0, -1.0])
    assert fileio.format_kernel(k) == (
        "version=1\nmemory=2\norder=2\nh0=0\nh1=1 0.5\nh2=0.25 0 -1\n"
    )


@pytest.mark.parametrize("text", [
    "memory=2\norder=1\nh1=1 0\n",
    "version=2\nmemory=2\norder=1\nh1=1 0\n",
    "version=1\nmemory=2\norder=1\nh1=1\n",
    "version=1\nmemory=2\norder=2\nh1=1 0\n",
    "version=1\nmemory=2\norder=1\nh1=1 0\nh0=0.5\n",
    "version=1\nmemory=2\norder=1\nh1=1 0\nbogus=1\n",
    "version=1\nmemory=2\norder=1\nh1=1 inf\n",
    "version=1\nmemory=2\norder=1\nh1=1 0\nh1=1 0\n",
    "version=1\nmemory=two\norder=1\nh1=1 0\n",
    "version=1\nmemory=2\norder=1\nh1 1 0\n",
])
def test_kernel_parse_errors(text):
    with pytest.raises(ParseError):
        fileio.parse_kernel(text)


def test_kernel_file_second_write_identical(tmp_path):
    k = make_default_speaker(5, 2)
    a, b = tmp_path / "a.kern", tmp_path / "b.kern"
    fileio.write_kernel(a, k, {"source": "test"})
    back, meta = fileio.read_kernel(a)
    fileio.write_kernel(b, back, meta)
    assert a.read_bytes() == b.read_bytes()


def test_manifest(tmp_path):
    (tmp_path / "sub").mkdir()
    path = tmp_path / "suite.tsv"
    path.write_text("# comment\nCHIRP\tsub/x.sig\t/abs/d.sig\n")
    rows = fileio.read_manifest(path)
    assert rows == [("CHIRP", tmp_path / "sub/x.sig", fileio.Path("/abs/d.sig"))]
    path.write_text("CHIRP x.sig d.sig\n")
    with pytest.raises(ParseError):
        fileio.read_manifest(path)
    with pytest.raises(ParseError):
        fileio.read_signal(tmp_path / "missing.sig")
