"""A rotation-invariant drift where the corner ceiling is not sharp.

The planar drift -|x|^2 - p probed with a quarter-disc window diverges
like a single logarithm.  The corner catalog applied to the same
coefficients (x1^2 + x2^2) only promises s = -1/2: a true upper bound,
but far from the actual rate.  Radial symmetry beats the ceiling.

Run:  python demos/radial_log_divergence.py
Writes demo_output/radial_log_divergence.svg
"""
import math
import pathlib

import numpy as np

import ewslab as ew
from ewslab.plotting import Series, render_loglog, sweep_series

OUT = pathlib.Path("demo_output")


def main():
    ps = ew.log_spaced_p(-8, -2, 25)
    symbol = ew.Radial2D(2.0)
    window = ew.QuarterDisc(1.0)
    values = [ew.variance_quadrature(
        ew.VarianceQuery(symbol, window, p, math.sqrt(2.0))) for p in ps]
    sweep = ew.SweepResult(ps, values)

    print(" -p        variance    variance/log(1/-p)")
    for p, v in zip(ps, values):
        print(f"{-p:8.1e}  {v:10.5f}  {v / math.log(-1 / p):10.6f}")

    fit = ew.fit_loglog(sweep)
    ceiling = ew.polynomial_law({(2, 0): 1.0, (0, 2): 1.0})
    print(f"\nfitted (s, k): ({fit.s:.4f}, {fit.k:.4f})")
    print(f"corner ceiling for the same coefficients: "
          f"s={ceiling.s:.4f}, k={ceiling.k}  (not attained)")

    OUT.mkdir(exist_ok=True)
    qs = [-p for p in ps]
    svg = render_loglog(
        [sweep_series(sweep, label="quadrature"),
         Series(x=tuple(qs), y=tuple(math.log(1 / q) for q in qs),
                label="log(1/-p)", markers=False)],
        title="radial quadratic drift: single-log growth",
        ref_slope=-0.5, ref_anchor=(1e-5, 10.0), ref_label="ceiling slope -1/2")
    path = OUT / "radial_log_divergence.svg"
    path.write_text(svg, newline="\n")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
