"""Variance laws for drifts given as Fourier multipliers.

When the drift is a Fourier multiplier m(k) (a constant-coefficient
operator, or convolution with a kernel), the stationary variance of a
frequency-window observable is the same resolvent integral as in
physical space, taken over wavenumbers:

    (sigma**2 / 2) * integral ghat(k)**2 / (-m(k) - p) dk.

The divergence as p -> 0- is controlled by the zero set of m, which
for the pattern-forming families sits on |k| = 1 rather than at the
origin, and only enters when the window covers it.
"""

from __future__ import annotations

import math

import numpy as np

from .quadrature import (
    Disc,
    IndicatorBox,
    QuadratureError,
    TestFunction,
    VarianceQuery,
    _offset_integral,
    _phi_factory,
    _side_integral,
    variance_quadrature,
)
from .scaling import ScalingLaw, SweepResult, law_1d
from .symbols import (
    ConvolutionKernel,
    PowerWavenumber,
    SwiftHohenberg1D,
    SwiftHohenberg2D,
    Symbol,
)

REL_TOL_SPECTRAL = 1e-8

_FREQUENCY_KINDS = (PowerWavenumber, SwiftHohenberg1D, SwiftHohenberg2D, ConvolutionKernel)


class LawUnavailableError(RuntimeError):
    """No closed-form law for this symbol; fit a sweep instead."""


def frequency_symbol(kind: str, **params) -> Symbol:
    """Factory for the frequency symbol families by kind name."""
    if kind == "power2m":
        return PowerWavenumber(params.get("m", 1))
    if kind == "swift_hohenberg_1d":
        return SwiftHohenberg1D()
    if kind == "swift_hohenberg_2d":
        return SwiftHohenberg2D()
    if kind == "convolution":
        return ConvolutionKernel(params["samples"], params["spacing"])
    raise ValueError(f"unknown frequency symbol kind: {kind!r}")


class FrequencyQuery:
    """One spectral variance evaluation: multiplier, window, p < 0, sigma."""

    def __init__(self, symbol: Symbol, ghat: TestFunction, p: float, sigma: float = 1.0):
        if not isinstance(symbol, _FREQUENCY_KINDS):
            raise TypeError("symbol must be one of the frequency multiplier kinds")
        p = float(p)
        sigma = float(sigma)
        if p >= 0:
            raise ValueError("p must be negative")
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        if symbol.dim != ghat.dim:
            raise ValueError("symbol and window dimensions must agree")
        self.symbol = symbol
        self.ghat = ghat
        self.p = p
        self.sigma = sigma

    def covers_zero_set(self) -> bool:
        return covers_zero_set(self.symbol, self.ghat)


def covers_zero_set(symbol: Symbol, ghat: TestFunction) -> bool:
    """Whether the window touches the multiplier's zero set.

    If it does not, the resolvent integrand stays bounded as p -> 0-
    and the variance converges regardless of the divergence law the
    family would otherwise follow.
    """
    if isinstance(symbol, PowerWavenumber):
        if not isinstance(ghat, IndicatorBox):
            raise ValueError("one-dimensional multipliers take box windows")
        return float(ghat.lo[0]) <= 0.0 <= float(ghat.hi[0])
    if isinstance(symbol, SwiftHohenberg1D):
        if not isinstance(ghat, IndicatorBox):
            raise ValueError("one-dimensional multipliers take box windows")
        a, b = float(ghat.lo[0]), float(ghat.hi[0])
        return a <= -1.0 <= b or a <= 1.0 <= b
    if isinstance(symbol, SwiftHohenberg2D):
        if not isinstance(ghat, Disc):
            raise ValueError("the planar pattern multiplier takes a disc window")
        return ghat.radius >= 1.0
    if isinstance(symbol, ConvolutionKernel):
        if not isinstance(ghat, IndicatorBox):
            raise ValueError("kernel multipliers take box windows")
        return len(symbol.zeros_in(float(ghat.lo[0]), float(ghat.hi[0]))) > 0
    raise TypeError("not a frequency symbol")


def _kernel_variance(symbol: ConvolutionKernel, ghat: IndicatorBox, q: float, sigma: float) -> float:
    """Exact integral of the piecewise-linear multiplier interpolant.

    On each grid segment the resolvent of a linear function integrates
    to a logarithm, which stays finite as long as q > 0, so no special
    treatment of near-zero multiplier values is needed.  Accuracy is
    limited by the kernel's sample resolution, not by this step.
    """
    a, b = float(ghat.lo[0]), float(ghat.hi[0])
    grid = symbol.freq_grid
    if a < grid[0] or b > grid[-1]:
        raise ValueError("window exceeds the kernel's resolved frequency range")
    ks = np.unique(np.concatenate([grid[(grid > a) & (grid < b)], [a, b]]))
    tvals = q - np.interp(ks, grid, symbol.multiplier)
    if np.any(tvals <= 0):
        raise ValueError("kernel multiplier is positive inside the window, no stable regime")
    t1, t2 = tvals[:-1], tvals[1:]
    dk = np.diff(ks)
    close = np.abs(t2 - t1) <= 1e-12 * np.maximum(t1, t2)
    with np.errstate(divide="ignore", invalid="ignore"):
        seg = np.where(close, dk * 2.0 / (t1 + t2), dk * np.log(t2 / t1) / (t2 - t1))
    return 0.5 * sigma**2 * float(np.sum(seg))


def variance_spectral(query: FrequencyQuery, rel_tol: float | None = None) -> float:
    """Stationary variance of a frequency-window observable.

    One-dimensional multipliers reduce to the same quadrature as
    physical-space symbols.  The planar pattern multiplier reduces over
    angles and the substitution u = 1 - |k|**2 to a one-dimensional
    resolvent integral with a quadratic zero.  Sampled kernels use the
    exact integral of their linear interpolant.
    """
    tol = rel_tol if rel_tol is not None else REL_TOL_SPECTRAL
    q = -query.p
    symbol = query.symbol
    ghat = query.ghat
    if isinstance(symbol, (PowerWavenumber, SwiftHohenberg1D)):
        return variance_quadrature(
            VarianceQuery(symbol, ghat, query.p, query.sigma), rel_tol=tol
        )
    if isinstance(symbol, SwiftHohenberg2D):
        if not isinstance(ghat, Disc):
            raise ValueError("the planar pattern multiplier takes a disc window")
        phi = _phi_factory(0.0)
        u_lo = 1.0 - ghat.radius**2
        err = 0.0
        if u_lo < 0.0:
            v1, e1 = _side_integral(2.0, -u_lo, q, phi, 0.0, tol)
            v2, e2 = _side_integral(2.0, 1.0, q, phi, 0.0, tol)
            val = v1 + v2
            err = e1 + e2
        else:
            val, err = _offset_integral(2.0, u_lo, 1.0, q, phi, tol)
        if err > 10 * tol * max(abs(val), 1e-300):
            raise QuadratureError("radial spectral quadrature did not reach tolerance")
        return 0.5 * query.sigma**2 * math.pi * val
    if isinstance(symbol, ConvolutionKernel):
        if not isinstance(ghat, IndicatorBox):
            raise ValueError("kernel multipliers take box windows")
        return _kernel_variance(symbol, ghat, q, query.sigma)
    raise TypeError("not a frequency symbol")


def predicted_spectral_law(symbol: Symbol, ghat: TestFunction | None = None) -> ScalingLaw:
    """Catalog law for a frequency family.

    The power multiplier -k**(2m) follows the one-dimensional law with
    alpha = 2m.  Both pattern-forming multipliers vanish quadratically
    across their zero set, and integrating across it (after the radial
    reduction in the plane) gives the square-root divergence.  Sampled
    kernels carry no expansion around their zeros, so no law is
    offered; fit a sweep instead.
    """
    if ghat is not None and not covers_zero_set(symbol, ghat):
        return ScalingLaw.bounded()
    if isinstance(symbol, PowerWavenumber):
        return law_1d(2.0 * symbol.m)
    if isinstance(symbol, (SwiftHohenberg1D, SwiftHohenberg2D)):
        return ScalingLaw(-0.5, 0)
    if isinstance(symbol, ConvolutionKernel):
        raise LawUnavailableError(
            "sampled kernels have no expansion around their zero set; "
            "run a sweep and use fit_loglog"
        )
    raise TypeError("not a frequency symbol")


def spectral_sweep(
    symbol: Symbol,
    ghat: TestFunction,
    ps,
    sigma: float = 1.0,
    rel_tol: float | None = None,
) -> SweepResult:
    """Evaluate the spectral variance on a grid of p values."""
    ps = np.asarray(ps, dtype=float)
    values = [
        variance_spectral(FrequencyQuery(symbol, ghat, p, sigma), rel_tol=rel_tol) for p in ps
    ]
    return SweepResult(ps, values, source="spectral")
