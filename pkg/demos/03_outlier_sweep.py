"""
Robustness to outliers: LRR against RSI
=======================================

Five 4-dimensional subspaces in R^100 with 20 samples each. Every sample
gets mild Gaussian noise; a growing fraction of samples also gets heavy
noise. Accuracy is averaged over repeated draws. Pass ``--trials 20`` for
the full protocol; the default is quicker.
"""

import argparse

from subseg import AlmConfig, outlier_sweep, benchmark_spec

parser = argparse.ArgumentParser()
parser.add_argument("--trials", type=int, default=5)
parser.add_argument("--svg", help="optional path for a mean +- std plot")
args = parser.parse_args()

result = outlier_sweep(benchmark_spec(), [0.0, 0.1, 0.2, 0.3, 0.4, 0.5], args.trials,
                       cfg_lrr=AlmConfig(lam=0.12), cfg_rsi=AlmConfig(lam=0.6), seed=2010)

table = result.table()
print("outliers   RSI mean (std)    LRR mean (std)")
for f in sorted({f for f, _ in table}):
    r, l = table[(f, "rsi")], table[(f, "lrr")]
    print(f"{f:7.0%}    {r[0]:.3f} ({r[1]:.3f})    {l[0]:.3f} ({l[1]:.3f})")

if args.svg:
    from subseg.cli import plot_sweep

    plot_sweep(args.svg, result)
    print("wrote", args.svg)
