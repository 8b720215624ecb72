"""Plain-text file formats for signals, kernels and test manifests.

Signal file::

    rate=<Hz> n=<count>
    <sample>
    ...

Kernel file (``key=value`` lines, coefficient arrays space separated in the
canonical triangular order)::

    version=1
    memory=<M>
    order=<P>
    h0=0
    h1=<M values>
    h2=<M(M+1)/2 values>          (order >= 2)
    h3=<M(M+1)(M+2)/6 values>     (order >= 3)
    meta.<key>=<value>

Manifest: one ``name<TAB>x_path<TAB>d_path`` row per test; relative paths
resolve against the manifest's directory, ``#`` starts a comment line.

Numbers are written with 17 significant digits so reading them back is
exact. Writes go to a temporary file that is then renamed over the target.
"""

from __future__ import annotations

import math
import os
import tempfile
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np

from .errors import ParseError, VolterraError
from .kernel import SignalBuffer, VolterraKernel, coeff_count

KERNEL_FORMAT_VERSION = 1


def fmt(value: float) -> str:
    return "%.17g" % value


def _parse_float(text: str, where: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"{where}: not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ParseError(f"{where}: non-finite value {text!r}")
    return value


def atomic_write(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_signal(signal: SignalBuffer) -> str:
    lines = [f"rate={fmt(signal.sample_rate)} n={len(signal)}"]
    lines.extend(fmt(v) for v in signal.samples)
    return "\n".join(lines) + "\n"


def parse_signal(text: str, source: str = "<signal>") -> SignalBuffer:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError(f"{source}: empty file")
    header = dict(item.partition("=")[::2] for item in lines[0].split())
    if set(header) != {"rate", "n"}:
        raise ParseError(f"{source}:1: expected 'rate=<Hz> n=<count>', got {lines[0]!r}")
    rate = _parse_float(header["rate"], f"{source}:1")
    try:
        count = int(header["n"])
    except ValueError:
        raise ParseError(f"{source}:1: bad sample count {header['n']!r}") from None
    body = lines[1:]
    if len(body) != count:
        raise ParseError(f"{source}: header declares {count} samples, body has {len(body)}")
    samples = np.array([_parse_float(v, f"{source}:{i + 2}") for i, v in enumerate(body)])
    try:
        return SignalBuffer(samples, rate)
    except VolterraError as exc:
        raise ParseError(f"{source}: {exc}") from None


def write_signal(path, signal: SignalBuffer) -> None:
    atomic_write(path, format_signal(signal))


def read_signal(path) -> SignalBuffer:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return parse_signal(text, str(path))


def format_kernel(kernel: VolterraKernel, meta: Dict[str, str] = None) -> str:
    lines = [
        f"version={KERNEL_FORMAT_VERSION}",
        f"memory={kernel.memory}",
        f"order={kernel.order}",
        f"h0={fmt(kernel.h0)}",
    ]
    for p in range(1, kernel.order + 1):
        lines.append(f"h{p}=" + " ".join(fmt(v) for v in kernel.coefficients(p)))
    for key, value in (meta or {}).items():
        value = str(value)
        if "\n" in value or "=" in key or not key:
            raise ValueError(f"metadata entry {key!r} cannot be serialized")
        lines.append(f"meta.{key}={value}")
    return "\n".join(lines) + "\n"


def parse_kernel(text: str, source: str = "<kernel>") -> Tuple[VolterraKernel, Dict[str, str]]:
    fields, meta = {}, {}
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParseError(f"{source}:{lineno}: expected key=value")
        if key.startswith("meta."):
            meta[key[5:]] = value
        elif key in fields:
            raise ParseError(f"{source}:{lineno}: duplicate key {key!r}")
        else:
            fields[key] = (lineno, value)
    for required in ("version", "memory", "order", "h1"):
        if required not in fields:
            raise ParseError(f"{source}: missing key {required!r}")
    try:
        version = int(fields["version"][1])
        memory = int(fields["memory"][1])
        order = int(fields["order"][1])
    except ValueError as exc:
        raise ParseError(f"{source}: {exc}") from None
    if version != KERNEL_FORMAT_VERSION:
        raise ParseError(f"{source}: unsupported kernel format version {version}")
    unknown = set(fields) - {"version", "memory", "order", "h0", "h1", "h2", "h3"}
    if unknown:
        raise ParseError(f"{source}: unknown keys {sorted(unknown)}")
    try:
        parts = {}
        for p in range(1, order + 1):
            if f"h{p}" not in fields:
                raise ParseError(f"{source}: order-{order} kernel is missing h{p}")
            lineno, raw = fields[f"h{p}"]
            values = [_parse_float(v, f"{source}:{lineno}") for v in raw.split()]
            expected = coeff_count(p, memory)
            if len(values) != expected:
                raise ParseError(f"{source}:{lineno}: h{p} needs {expected} values, got {len(values)}")
            parts[f"h{p}"] = np.array(values)
        h0 = _parse_float(fields["h0"][1], source) if "h0" in fields else 0.0
        kernel = VolterraKernel(memory=memory, order=order, h0=h0, **parts)
    except ParseError:
        raise
    except VolterraError as exc:
        raise ParseError(f"{source}: {exc}") from None
    return kernel, meta


def write_kernel(path, kernel: VolterraKernel, meta: Dict[str, str] = None) -> None:
    atomic_write(path, format_kernel(kernel, meta))


def read_kernel(path) -> Tuple[VolterraKernel, Dict[str, str]]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return parse_kernel(text, str(path))


def read_manifest(path) -> List[Tuple[str, Path, Path]]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise ParseError(f"{path}:{lineno}: expected name<TAB>x_path<TAB>d_path")
        name, xp, dp = cols
        rows.append((name, path.parent / xp, path.parent / dp))
    if not rows:
        raise ParseError(f"{path}: manifest lists no tests")
    return rows


def write_manifest(path, rows) -> None:
    atomic_write(path, "".join(f"{n}\t{x}\t{d}\n" for n, x, d in rows))
