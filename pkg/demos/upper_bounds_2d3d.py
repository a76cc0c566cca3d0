"""Corner-monomial laws in two and three dimensions.

For a drift vanishing like a coordinate monomial x^j at a corner, the
catalog gives the growth ceiling of the stationary variance:

    all orders 1      ->  log^N divergence       (s = 0, k = N)
    max order i, >1   ->  s = -1 + 1/i, with a log factor per repeat

This script cross-checks the ceilings against direct quadrature of the
corner integrals for a few representative multi-indices.

Run:  python demos/upper_bounds_2d3d.py
"""
import math

import numpy as np

import ewslab as ew


def fitted(j, lo, hi, n):
    ps = ew.log_spaced_p(lo, hi, n)
    values = [ew.monomial_integral(j, 1.0, -p) for p in ps]
    return ew.fit_loglog(ew.SweepResult(ps, values)), ps, values


def main():
    print(f"{'j':>12} {'catalog (s, k)':>18} {'fitted s':>9} {'fitted k':>9}")
    for j in ((2, 10), (3, 3), (1, 2, 3)):
        law = ew.law_upper_bound(j)
        fit, _, _ = fitted(j, -14, -2, 49)
        print(f"{str(j):>12} {f'({law.s:.4f}, {law.k})':>18}"
              f" {fit.s:>9.4f} {fit.k:>9.4f}")

    # pure-log cases: compare against log powers directly
    for j, n in (((1, 1), 2), ((1, 1, 1), 3)):
        r = [ew.monomial_integral(j, 1.0, q) / math.log(1 / q) ** n
             for q in (1e-7, 1e-8)]
        drift = abs(r[1] / r[0] - 1.0)
        print(f"{str(j):>12} {'log^' + str(n):>18}"
              f"   ratio drift across a decade: {drift:.4f}")

    # the slowest ceiling over a set of corners wins
    best = ew.best_upper_bound([(2, 10), (3, 3), (1, 2, 3)])
    print(f"\nslowest ceiling among the power cases: s={best.s:.4f}, k={best.k}")

    # two distinct unit indices with positive weights force convergence
    coeffs = {(1, 0): 1.0, (0, 1): 1.0}
    print("two independent unit slopes -> bounded variance:",
          ew.predicts_convergence(coeffs))


if __name__ == "__main__":
    main()
