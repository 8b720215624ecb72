"""Command line: ``volterra-nlms {gen,oracle,train,apply,eval}``.

Exit codes
----------
0  success (training converged)
1  invalid input: bad signal/oracle spec, mismatched signals, numeric failure
2  parse error: bad command line or unreadable signal/kernel/manifest file
3  trainer configuration rejected (e.g. alpha outside (0, 2))
4  training diverged
5  training stopped at the epoch cap without reaching theta
6  evaluation finished with at least one failed row
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import fileio
from .errors import (
    ConfigError,
    DivergenceError,
    InputError,
    NumericError,
    ParseError,
    SpecError,
)
from .evaluation import EvalReport, EvalRow, evaluate_suite
from .kernel import apply_kernel
from .nlms import INIT_POLICIES, NORMALIZATIONS, TrainerConfig, train
from .oracle import OracleSpec, make_default_speaker, measure, snr_db
from .signals import KINDS, SignalSpec, gen

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_PARSE = 2
EXIT_CONFIG = 3
EXIT_DIVERGED = 4
EXIT_EPOCH_CAP = 5
EXIT_EVAL_FAILED = 6

log = logging.getLogger("volterra_nlms")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_PARSE)


def _say(args, text):
    if not args.quiet:
        print(text)


def _summary(signal):
    s = signal.samples
    return (f"n={len(signal)} rate={signal.sample_rate:g} Hz min={s.min():.6g} "
            f"max={s.max():.6g} rms={np.sqrt(np.mean(s * s)):.6g}")


def cmd_gen(args):
    spec = SignalSpec(
        kind=args.kind, sample_rate=args.rate, duration=args.dur, amplitude=args.amp,
        freq=args.freq, f_start=args.f_start, f_end=args.f_end, base_freq=args.base,
        spacing=args.spacing, count=args.count, seed=args.seed,
        fractions=(args.noise_fraction, 1.0 - args.noise_fraction),
    )
    signal = gen(spec)
    fileio.write_signal(args.out, signal)
    _say(args, f"{args.out}: {args.kind} {_summary(signal)}")
    return EXIT_OK


def harmonic_levels(x, d, n_harmonics=3):
    """Fundamental of ``x`` and the level of its harmonics in ``d``, in dB re. the fundamental.

    Returns ``None`` unless ``x`` is tonal (half its non-DC energy within one
    bin of the strongest line).
    """
    X = np.abs(np.fft.rfft(x.samples))
    D = np.abs(np.fft.rfft(d.samples))
    X[0] = 0.0
    k0 = int(np.argmax(X))
    power = X * X
    if power[max(k0 - 1, 0):k0 + 2].sum() < 0.5 * power.sum():
        return None
    f0 = k0 * x.sample_rate / len(x)
    levels = {}
    for h in range(2, n_harmonics + 1):
        k = h * k0
        if k < D.size and D[k0] > 0:
            levels[h] = 20 * np.log10(max(D[k], 1e-300) / D[k0])
    return f0, levels


def cmd_oracle(args):
    if (args.truth is None) == (args.speaker_memory is None):
        raise SpecError("give exactly one of --truth or --speaker-memory")
    if args.truth is not None:
        truth, _ = fileio.read_kernel(args.truth)
    else:
        truth = make_default_speaker(args.speaker_memory, args.seed)
        if args.save_truth:
            fileio.write_kernel(args.save_truth, truth, {
                "source": "default-speaker", "seed": str(args.seed)})
    x = fileio.read_signal(args.input)
    spec = OracleSpec(truth=truth, snr_db=args.snr_db, seed=args.seed)
    d = measure(spec, x)
    fileio.write_signal(args.out, d)
    _say(args, f"{args.out}: desired {_summary(d)}")
    if args.snr_db is not None:
        achieved = snr_db(apply_kernel(truth, x), d)
        _say(args, f"snr: requested {args.snr_db:g} dB, achieved {achieved:.3f} dB")
    tone = harmonic_levels(x, d) if len(x) >= 8 and np.any(x.samples) else None
    if tone:
        f0, levels = tone
        parts = ", ".join(f"H{h} ({h * f0:g} Hz) {lvl:.1f} dB" for h, lvl in levels.items())
        _say(args, f"harmonics: fundamental {f0:g} Hz; {parts}")
    return EXIT_OK


def _alphas(args):
    alpha = [args.alpha] * 3
    for p, a in enumerate((args.alpha1, args.alpha2, args.alpha3)):
        if a is not None:
            alpha[p] = a
    return tuple(alpha)


def cmd_train(args):
    config = TrainerConfig(
        order=args.order, memory=args.memory, alpha=_alphas(args), phi=args.phi,
        theta=args.theta, max_epochs=args.max_epochs, init=args.init, seed=args.seed,
        normalization=args.normalization,
    )
    x = fileio.read_signal(args.x)
    d = fileio.read_signal(args.d)
    kernel, trace = train(x, d, config)
    meta = {
        "trainer": "nlms",
        "alpha": " ".join(fileio.fmt(a) for a in config.alpha[:config.order]),
        "phi": fileio.fmt(config.phi),
        "theta": fileio.fmt(config.theta),
        "max_epochs": str(config.max_epochs),
        "init": config.init,
        "normalization": config.normalization,
        "seed": str(config.seed),
        "epochs": str(trace.epochs_run),
        "final_mse": fileio.fmt(trace.epoch_error[-1]),
        "converged": str(trace.converged).lower(),
        "x": Path(args.x).name,
        "d": Path(args.d).name,
    }
    fileio.write_kernel(args.out, kernel, meta)
    trace_text = "".join(f"{i}\t{fileio.fmt(v)}\n" for i, v in enumerate(trace.epoch_error, 1))
    if args.trace:
        fileio.atomic_write(args.trace, "epoch\tmse\n" + trace_text)
    if not args.quiet:
        sys.stderr.write(trace_text)
    status = "converged" if trace.converged else "stopped at epoch cap"
    _say(args, f"{args.out}: order {config.order}, memory {config.memory}, "
               f"{trace.epochs_run} epochs, final mse {trace.epoch_error[-1]:.6g} ({status})")
    return EXIT_OK if trace.converged else EXIT_EPOCH_CAP


def cmd_apply(args):
    kernel, _ = fileio.read_kernel(args.kernel)
    x = fileio.read_signal(args.x)
    y = apply_kernel(kernel, x)
    fileio.write_signal(args.out, y)
    _say(args, f"{args.out}: {_summary(y)}")
    return EXIT_OK


def cmd_eval(args):
    kernels = {}
    for p, path in ((1, args.k1), (2, args.k2), (3, args.k3)):
        kernels[p], _ = fileio.read_kernel(path)
    tests, unreadable = [], {}
    entries = fileio.read_manifest(args.manifest)
    for i, (name, xp, dp) in enumerate(entries):
        try:
            tests.append((name, fileio.read_signal(xp), fileio.read_signal(dp)))
        except ParseError as exc:
            unreadable[i] = EvalRow(name=name, error=str(exc))
    report = evaluate_suite(kernels, tests, keep_failed=True, workers=args.workers)
    if unreadable:
        evaluated = iter(report.rows)
        rows = [unreadable[i] if i in unreadable else next(evaluated) for i in range(len(entries))]
        report = EvalReport.from_rows(rows, sorted(kernels))
    if args.out:
        fileio.atomic_write(args.out, report.to_json())
    _say(args, report.render().rstrip("\n"))
    return EXIT_EVAL_FAILED if report.failed else EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized pieces")
    common.add_argument("--quiet", action="store_true", help="suppress summaries")

    parser = _Parser(prog="volterra-nlms", description="Volterra NLMS system identification")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", parents=[common], help="generate a test/excitation signal")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--rate", type=float, default=48000.0, help="sample rate, Hz")
    p.add_argument("--dur", type=float, default=5.0, help="duration, s")
    p.add_argument("--amp", type=float, default=0.5, help="peak amplitude")
    p.add_argument("--freq", type=float, default=50.0, help="sine frequency, Hz")
    p.add_argument("--f-start", type=float, default=20.0, help="chirp start, Hz")
    p.add_argument("--f-end", type=float, default=1000.0, help="chirp end, Hz")
    p.add_argument("--base", type=float, default=50.0, help="multisine lowest component, Hz")
    p.add_argument("--spacing", type=float, default=6.0, help="multisine spacing, Hz")
    p.add_argument("--count", type=int, default=3, help="multisine component count")
    p.add_argument("--noise-fraction", type=float, default=0.6,
                   help="composite: leading white-noise share")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("oracle", parents=[common], help="simulate the reference system")
    p.add_argument("--truth", help="ground-truth kernel file")
    p.add_argument("--speaker-memory", type=int, help="use the built-in speaker with this memory")
    p.add_argument("--save-truth", help="write the built-in speaker kernel here")
    p.add_argument("--input", "-x", required=True, help="input signal file")
    p.add_argument("--snr-db", type=float, help="additive measurement noise level")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("train", parents=[common], help="estimate a kernel with NLMS")
    p.add_argument("-x", required=True, help="input signal file")
    p.add_argument("-d", required=True, help="desired signal file")
    p.add_argument("--order", type=int, default=3, choices=(1, 2, 3))
    p.add_argument("--memory", type=int, default=65)
    p.add_argument("--alpha", type=float, default=0.5, help="step constant for every order")
    p.add_argument("--alpha1", type=float)
    p.add_argument("--alpha2", type=float)
    p.add_argument("--alpha3", type=float)
    p.add_argument("--phi", type=float, default=1e-6)
    p.add_argument("--theta", type=float, default=1e-10)
    p.add_argument("--max-epochs", type=int, default=100)
    p.add_argument("--init", choices=INIT_POLICIES, default="identity")
    p.add_argument("--normalization", choices=NORMALIZATIONS, default="joint")
    p.add_argument("--trace", help="write the per-epoch MSE here")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("apply", parents=[common], help="filter a signal through a kernel")
    p.add_argument("--kernel", "-k", required=True)
    p.add_argument("-x", required=True, help="input signal file")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("eval", parents=[common], help="compare order 1/2/3 kernels")
    p.add_argument("--k1", required=True)
    p.add_argument("--k2", required=True)
    p.add_argument("--k3", required=True)
    p.add_argument("--manifest", required=True, help="name<TAB>x<TAB>d rows")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.func is not cmd_eval and not args.out:
        parser.error(f"{args.command}: --out is required")
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConfigError as exc:
        print(f"config rejected: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (SpecError, InputError, NumericError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
