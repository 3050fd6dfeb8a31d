"""The uniform measure keeps its block-count distribution in closed
form, which turns several asymptotic statements into exact finite-n
checks.  This demo runs three of them:

  1. ascending factorial moments of the block count at fixed times,
     Monte Carlo against the exact log-gamma formula;
  2. the centering sequences t_n and t_{c,n} built from iterated
     logarithms, and the exponential law of the scaled block count at
     the c-dependent centering time;
  3. the limiting point process of the largest external branches (a
     Poisson process with random intensity), whose maximum is exactly
     logistic: the exact sampler against that closed form.

Runs in a few seconds.
"""

import numpy as np

from coalsim.experiments import (ExperimentConfig, ks_statistic,
                                 run_experiment)
from coalsim.limits import logistic_cdf, sample_cox_extremes
from coalsim.rates import t_c_sequence, t_sequence


def exact_moments() -> None:
    print("block-count moments at fixed times, n = 10000, r = 1 and 2")
    for r in (1, 2):
        report = run_experiment(ExperimentConfig(
            measure="bolthausen-sznitman", theorem="L9.2", n=10_000,
            replications=4000, params={"r": r}))
        print(report)
    print()


def centering_sequences() -> None:
    print("centering sequences for the extremes (loglog scaling)")
    print("      n |     t_n | t_{2,n}")
    for n in (10 ** 3, 10 ** 4, 10 ** 6):
        print(f"{n:7d} | {t_sequence(n):7.4f} | {t_c_sequence(n, 2.0):7.4f}")
    print("(the spread t_n - t_{c,n} = log(c)/loglog(n) shrinks very")
    print(" slowly; this is the same loglog wall as in the KS trend)\n")


def scaled_count_law() -> None:
    report = run_experiment(ExperimentConfig(
        measure="bolthausen-sznitman", theorem="L9.2", n=10_000,
        replications=2000, params={"t_grid": (), "c": 2.0}))
    print("exp(-t_{c,n}) N(t_{c,n}) against its mean-c exponential limit:")
    print(report)
    print()


def cox_maximum() -> None:
    draws = sample_cox_extremes(3, seed=11, reps=50_000)
    ks = ks_statistic(draws[:, 0], logistic_cdf)
    print("exact sampler of the limiting top-3 points, 50000 draws")
    print(f"  max marginal vs logistic: KS = {ks:.4f}")
    print(f"  mean of max = {draws[:, 0].mean():+.4f}  (logistic mean 0)")
    gaps = draws[:, :-1] - draws[:, 1:]
    print(f"  mean gaps between ranked points: "
          f"{np.array2string(gaps.mean(axis=0), precision=3)}")


def main() -> None:
    exact_moments()
    centering_sequences()
    scaled_count_law()
    cox_maximum()


if __name__ == "__main__":
    main()
