#!/usr/bin/env python3
"""Average suite MSE against model memory, per order, for a fixed truth."""

import argparse

from volterra_nlms.experiments import run_protocol
from volterra_nlms.nlms import TrainerConfig
from volterra_nlms.oracle import make_default_speaker


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--truth-memory", type=int, default=8)
    ap.add_argument("--memories", type=int, nargs="+", default=[1, 2, 4, 6, 8, 10])
    ap.add_argument("--train", choices=("white_noise", "composite"), default="white_noise")
    ap.add_argument("--epochs", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    truth = make_default_speaker(args.truth_memory, args.seed)
    print(f"{'M':>4}{'linear':>14}{'2nd order':>14}{'3rd order':>14}")
    for m in args.memories:
        config = TrainerConfig(memory=m, max_epochs=args.epochs)
        avg = run_protocol(truth, args.train, config, seed=args.seed).avg_mse_by_order
        print(f"{m:>4}" + "".join(f"{avg[p]:14.4e}" for p in (1, 2, 3)))


if __name__ == "__main__":
    main()
