"""Drift symbols for the scalar stability equation.

The equation under study is du = (f(x) + p) u dt + sigma dW, where the
drift acts as multiplication by f(x) + p.  A symbol is the function f:
real valued, nonpositive on its domain, vanishing where the
deterministic part loses stability.  This module holds the structured
symbol families that the quadrature, scaling and simulation layers
accept, plus inspection helpers for polynomial coefficient maps.

Spatial kinds (``ToolAlpha``, ``Polynomial``, ``Piecewise``,
``Radial2D``, ``Zero``) vanish at a designated root.  Frequency kinds
(``PowerWavenumber``, ``SwiftHohenberg1D``, ``SwiftHohenberg2D``,
``ConvolutionKernel``) act as Fourier multipliers and may vanish on a
set away from the origin, so only the nonpositivity half of the
stability check applies to them.
"""

from __future__ import annotations

import math
from typing import Callable, Mapping

import numpy as np

MultiIndex = tuple[int, ...]

_ZERO_TOL = 1e-12


def as_multi_index(value) -> MultiIndex:
    """Coerce ``value`` to a tuple of nonnegative integer exponents.

    Accepts a bare integer (treated as one-dimensional) or any sequence
    of integers.  Raises ValueError for negative or fractional entries.
    """
    try:
        components = tuple(value)
    except TypeError:
        components = (value,)
    if not components:
        raise ValueError("multi-index needs at least one component")
    out = []
    for c in components:
        ci = int(c)
        if ci != c or ci < 0:
            raise ValueError(
                f"multi-index components must be nonnegative integers, got {value!r}"
            )
        out.append(ci)
    return tuple(out)


def _as_point(value, dim: int) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.shape != (dim,):
        raise ValueError(f"expected a point with {dim} coordinates, got shape {arr.shape}")
    return arr


def _as_box(lo, hi, dim: int) -> tuple[np.ndarray, np.ndarray]:
    lo = _as_point(lo, dim)
    hi = _as_point(hi, dim)
    if np.any(hi <= lo):
        raise ValueError("domain box must have positive extent on every axis")
    return lo, hi


class Symbol:
    """Common interface for drift multipliers f(x).

    Subclasses evaluate elementwise on scalars or arrays when ``dim`` is
    1, and on arrays whose last axis holds the coordinates when ``dim``
    is 2 or more.  ``sign_ok`` records whether the strict stability
    check passed: f <= 0 everywhere on the domain and f < 0 away from
    the zero set the family is allowed to have.
    """

    dim: int
    root: np.ndarray
    domain: tuple[np.ndarray, np.ndarray]
    sign_ok: bool
    kind = "abstract"

    def __call__(self, x):
        raise NotImplementedError

    def _coerce(self, x) -> np.ndarray:
        arr = np.asarray(x, dtype=float)
        if self.dim == 1:
            return arr
        if arr.ndim == 0 or arr.shape[-1] != self.dim:
            raise ValueError(
                f"a {self.dim}-dimensional symbol expects points whose last axis "
                f"has length {self.dim}"
            )
        return arr

    def root_scale(self, q: float) -> float:
        """Estimated width of the boundary layer of 1/(q - f) at the root."""
        return float(q)

    def zeros_in(self, lo: float, hi: float) -> tuple[float, ...]:
        """Zeros of f inside [lo, hi], for one-dimensional symbols."""
        if self.dim != 1:
            raise ValueError("zeros_in applies to one-dimensional symbols only")
        r = float(self.root[0])
        return (r,) if lo <= r <= hi else ()


def _lattice(domain, dim):
    lo, hi = domain
    per_axis = {1: 1001, 2: 101, 3: 31}.get(dim, 11)
    axes = [np.linspace(lo[d], hi[d], per_axis) for d in range(dim)]
    if dim == 1:
        return axes[0]
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def _check_sign(symbol: Symbol, strict: bool = True) -> bool:
    """Sampled stability check.

    Verifies f <= 0 on a lattice over the domain, f(root) = 0, and
    strict negativity away from the coordinate hyperplanes through the
    root (in one dimension, away from the root itself).  Hyperplane
    contact is allowed because monomial drifts with several variables
    vanish wherever one factor does.
    """
    pts = _lattice(symbol.domain, symbol.dim)
    vals = np.asarray(symbol(pts), dtype=float)
    if np.max(vals) > _ZERO_TOL:
        if strict:
            raise ValueError(
                f"{symbol.kind} symbol is positive somewhere on the sampled lattice"
            )
        return False
    at_root = float(np.asarray(symbol(symbol.root if symbol.dim > 1 else symbol.root[0])))
    if abs(at_root) > _ZERO_TOL:
        if strict:
            raise ValueError(f"{symbol.kind} symbol does not vanish at its root")
        return False
    lo, hi = symbol.domain
    if symbol.dim == 1:
        spacing = (hi[0] - lo[0]) / (len(pts) - 1)
        off = np.abs(pts - symbol.root[0]) > 2 * spacing
    else:
        spacing = np.max(hi - lo) / 20.0
        off = np.min(np.abs(pts - symbol.root), axis=-1) > spacing
    if np.any(vals[off] >= 0.0):
        if strict:
            raise ValueError(
                f"{symbol.kind} symbol vanishes away from its admissible zero set"
            )
        return False
    return True


class ToolAlpha(Symbol):
    """f(x) = -|x - root|**alpha on an interval around the root."""

    kind = "tool_alpha"

    def __init__(self, alpha: float, root: float = 0.0, domain=None):
        alpha = float(alpha)
        if alpha <= 0:
            raise ValueError("alpha must be positive")
        self.alpha = alpha
        self.dim = 1
        self.root = _as_point(root, 1)
        if domain is None:
            domain = (self.root[0] - 1.0, self.root[0] + 1.0)
        self.domain = _as_box(domain[0], domain[1], 1)
        self.sign_ok = True

    def __call__(self, x):
        arr = self._coerce(x)
        return -np.abs(arr - self.root[0]) ** self.alpha

    def root_scale(self, q: float) -> float:
        return float(q) ** (1.0 / self.alpha)

    def __repr__(self):
        return f"ToolAlpha(alpha={self.alpha}, root={self.root[0]})"


class Polynomial(Symbol):
    """f(x) = -sum_j a_j (x - root)**j for a multi-index coefficient map.

    Coefficients are real; the constructor samples the domain and
    rejects maps that go positive or fail to vanish at the root.
    """

    kind = "polynomial"

    def __init__(self, coeffs: Mapping, root=None, domain=None):
        terms = {}
        for j, a in coeffs.items():
            idx = as_multi_index(j)
            a = float(a)
            if idx in terms:
                raise ValueError(f"duplicate multi-index {idx}")
            terms[idx] = a
        if not terms:
            raise ValueError("coefficient map is empty")
        dims = {len(j) for j in terms}
        if len(dims) != 1:
            raise ValueError("all multi-indices must have the same number of components")
        self.dim = dims.pop()
        if all(a == 0.0 for a in terms.values()):
            raise ValueError("coefficient map has no nonzero entries")
        if any(sum(j) == 0 for j in terms):
            raise ValueError("constant terms are not allowed, f must vanish at the root")
        self.coeffs = dict(sorted(terms.items()))
        self.root = _as_point(root if root is not None else np.zeros(self.dim), self.dim)
        if domain is None:
            lo, hi = self.root, self.root + 1.0
        else:
            lo, hi = domain
        self.domain = _as_box(lo, hi, self.dim)
        self.sign_ok = _check_sign(self, strict=True)

    def __call__(self, x):
        arr = self._coerce(x)
        if self.dim == 1:
            shifted = arr - self.root[0]
            total = np.zeros_like(np.asarray(shifted, dtype=float))
            for j, a in self.coeffs.items():
                if a:
                    total = total + a * shifted ** j[0]
            return -total
        shifted = arr - self.root
        total = np.zeros(arr.shape[:-1], dtype=float)
        for j, a in self.coeffs.items():
            if not a:
                continue
            term = np.full(arr.shape[:-1], a, dtype=float)
            for d, e in enumerate(j):
                if e:
                    term = term * shifted[..., d] ** e
            total = total + term
        return -total

    def root_scale(self, q: float) -> float:
        degrees = [sum(j) for j, a in self.coeffs.items() if a]
        amax = max(abs(a) for a in self.coeffs.values())
        return (float(q) / amax) ** (1.0 / min(degrees))

    def __repr__(self):
        return f"Polynomial({self.coeffs})"


class Piecewise(Symbol):
    """Two one-sided symbols glued at a shared root (one dimension).

    ``left`` applies for x < root and ``right`` for x >= root, so the
    local order of contact may differ between the sides.
    """

    kind = "piecewise"

    def __init__(self, left: Symbol, right: Symbol):
        if left.dim != 1 or right.dim != 1:
            raise ValueError("piecewise symbols are one-dimensional")
        if abs(left.root[0] - right.root[0]) > _ZERO_TOL:
            raise ValueError("both sides must share the same root")
        self.left = left
        self.right = right
        self.dim = 1
        self.root = left.root.copy()
        self.domain = (left.domain[0].copy(), right.domain[1].copy())
        self.sign_ok = left.sign_ok and right.sign_ok

    def __call__(self, x):
        arr = self._coerce(x)
        return np.where(arr < self.root[0], self.left(arr), self.right(arr))

    def root_scale(self, q: float) -> float:
        return min(self.left.root_scale(q), self.right.root_scale(q))

    def __repr__(self):
        return f"Piecewise(left={self.left!r}, right={self.right!r})"


class Radial2D(Symbol):
    """f(x) = -(x1**2 + x2**2)**(exponent/2), radially symmetric in the plane."""

    kind = "radial2d"

    def __init__(self, exponent: float = 2.0, domain=None):
        exponent = float(exponent)
        if exponent <= 0:
            raise ValueError("exponent must be positive")
        self.exponent = exponent
        self.dim = 2
        self.root = np.zeros(2)
        if domain is None:
            lo, hi = (-np.ones(2), np.ones(2))
        else:
            lo, hi = domain
        self.domain = _as_box(lo, hi, 2)
        self.sign_ok = True

    def __call__(self, x):
        arr = self._coerce(x)
        r2 = arr[..., 0] ** 2 + arr[..., 1] ** 2
        return -(r2 ** (self.exponent / 2.0))

    def root_scale(self, q: float) -> float:
        return float(q) ** (1.0 / self.exponent)

    def __repr__(self):
        return f"Radial2D(exponent={self.exponent})"


class Zero(Symbol):
    """f identically zero.

    A degenerate study case: the drift reduces to the constant p, every
    point of the domain is marginal, and the strict stability check is
    impossible, so ``sign_ok`` is always False.
    """

    kind = "zero"

    def __init__(self, dim: int = 1, domain=None):
        self.dim = int(dim)
        if self.dim < 1:
            raise ValueError("dim must be at least 1")
        self.root = np.zeros(self.dim)
        if domain is None:
            lo, hi = (np.zeros(self.dim), np.ones(self.dim))
        else:
            lo, hi = domain
        self.domain = _as_box(lo, hi, self.dim)
        self.sign_ok = False

    def __call__(self, x):
        arr = self._coerce(x)
        shape = arr.shape if self.dim == 1 else arr.shape[:-1]
        return np.zeros(shape)

    def root_scale(self, q: float) -> float:
        return math.inf

    def zeros_in(self, lo: float, hi: float) -> tuple[float, ...]:
        return ()

    def __repr__(self):
        return f"Zero(dim={self.dim})"


class PowerWavenumber(Symbol):
    """Fourier multiplier f(k) = -k**(2m) of the operator -(-Laplace)**m."""

    kind = "power2m"

    def __init__(self, m: int = 1):
        m = int(m)
        if m < 1:
            raise ValueError("m must be a positive integer")
        self.m = m
        self.alpha = 2.0 * m
        self.dim = 1
        self.root = np.zeros(1)
        self.domain = _as_box(-3.0, 3.0, 1)
        self.sign_ok = True

    def __call__(self, x):
        arr = self._coerce(x)
        return -np.abs(arr) ** (2 * self.m)

    def root_scale(self, q: float) -> float:
        return float(q) ** (1.0 / (2 * self.m))

    def __repr__(self):
        return f"PowerWavenumber(m={self.m})"


class SwiftHohenberg1D(Symbol):
    """Fourier multiplier f(k) = -(1 - k**2)**2, vanishing at k = +-1."""

    kind = "swift_hohenberg_1d"

    def __init__(self):
        self.dim = 1
        self.root = np.zeros(1)
        self.domain = _as_box(-3.0, 3.0, 1)
        self.sign_ok = True

    def __call__(self, x):
        arr = self._coerce(x)
        return -((1.0 - arr**2) ** 2)

    def root_scale(self, q: float) -> float:
        return math.sqrt(float(q)) / 2.0

    def zeros_in(self, lo: float, hi: float) -> tuple[float, ...]:
        return tuple(z for z in (-1.0, 1.0) if lo <= z <= hi)

    def __repr__(self):
        return "SwiftHohenberg1D()"


class SwiftHohenberg2D(Symbol):
    """Fourier multiplier f(k) = -(1 - |k|**2)**2, vanishing on |k| = 1."""

    kind = "swift_hohenberg_2d"

    def __init__(self):
        self.dim = 2
        self.root = np.zeros(2)
        self.domain = _as_box((-3.0, -3.0), (3.0, 3.0), 2)
        self.sign_ok = True

    def __call__(self, x):
        arr = self._coerce(x)
        r2 = arr[..., 0] ** 2 + arr[..., 1] ** 2
        return -((1.0 - r2) ** 2)

    def root_scale(self, q: float) -> float:
        return math.sqrt(float(q)) / 2.0

    def __repr__(self):
        return "SwiftHohenberg2D()"


class ConvolutionKernel(Symbol):
    """Fourier multiplier of convolution with a sampled kernel.

    The kernel values are assumed to sample f on a uniform grid with the
    given spacing.  The multiplier is the discrete Fourier transform of
    the samples scaled by the spacing, which approximates the continuum
    transform integral; its real part is kept, since only the real part
    of the spectrum controls the stationary variance.  The overall
    constant therefore follows the non-unitary integral convention, and
    evaluation between the transform's frequency nodes is linear
    interpolation, so accuracy is limited by the sample resolution.
    """

    kind = "convolution"

    def __init__(self, samples, spacing: float):
        samples = np.asarray(samples, dtype=float)
        if samples.ndim != 1 or samples.size < 4:
            raise ValueError("kernel samples must be a vector with at least 4 entries")
        spacing = float(spacing)
        if spacing <= 0:
            raise ValueError("spacing must be positive")
        self.samples = samples
        self.spacing = spacing
        transform = np.fft.fft(samples) * spacing
        freqs = 2.0 * np.pi * np.fft.fftfreq(samples.size, d=spacing)
        order = np.argsort(freqs)
        self.freq_grid = freqs[order]
        self.multiplier = transform.real[order]
        self.dim = 1
        self.root = np.zeros(1)
        self.domain = _as_box(self.freq_grid[0], self.freq_grid[-1], 1)
        self.sign_ok = bool(np.max(self.multiplier) <= _ZERO_TOL)

    def __call__(self, x):
        arr = self._coerce(x)
        return np.interp(arr, self.freq_grid, self.multiplier)

    def root_scale(self, q: float) -> float:
        return float(self.freq_grid[1] - self.freq_grid[0])

    def zeros_in(self, lo: float, hi: float) -> tuple[float, ...]:
        scale = _ZERO_TOL * max(1.0, float(np.max(np.abs(self.multiplier))))
        found = []
        sel = (self.freq_grid >= lo) & (self.freq_grid <= hi)
        for k in self.freq_grid[sel][np.abs(self.multiplier[sel]) <= scale]:
            found.append(float(k))
        # Sign changes between adjacent samples locate off-grid zeros of the
        # interpolated multiplier; bisect each bracketing interval.
        vals = self.multiplier
        for i in range(self.freq_grid.size - 1):
            a, b = self.freq_grid[i], self.freq_grid[i + 1]
            if b < lo or a > hi:
                continue
            fa, fb = vals[i], vals[i + 1]
            if abs(fa) <= scale or abs(fb) <= scale or fa * fb > 0:
                continue
            for _ in range(80):
                mid = 0.5 * (a + b)
                fm = float(np.interp(mid, self.freq_grid, vals))
                if fa * fm <= 0:
                    b, fb = mid, fm
                else:
                    a, fa = mid, fm
            root = 0.5 * (a + b)
            if lo <= root <= hi:
                found.append(float(root))
        return tuple(sorted(found))

    def __repr__(self):
        return f"ConvolutionKernel(n={self.samples.size}, spacing={self.spacing})"


class CustomSymbol(Symbol):
    """Wrapper around an arbitrary real-valued callable.

    Used by :func:`real_part_symbol`; carries no serialized form.  The
    stability check is sampled and recorded in ``sign_ok`` instead of
    raising, so degenerate inputs stay inspectable.
    """

    kind = "custom"

    def __init__(self, fn: Callable, dim: int = 1, root=None, domain=None):
        self.fn = fn
        self.dim = int(dim)
        self.root = _as_point(root if root is not None else np.zeros(self.dim), self.dim)
        if domain is None:
            lo, hi = self.root - 1.0, self.root + 1.0
        else:
            lo, hi = domain
        self.domain = _as_box(lo, hi, self.dim)
        self.sign_ok = _check_sign(self, strict=False)

    def __call__(self, x):
        arr = self._coerce(x)
        try:
            out = np.asarray(self.fn(arr), dtype=float)
        except (TypeError, ValueError):
            out = np.vectorize(lambda v: float(self.fn(v)))(arr)
        expected = arr.shape if self.dim == 1 else arr.shape[:-1]
        if out.shape != expected:
            raise ValueError("callable did not evaluate elementwise over the points")
        return out

    def __repr__(self):
        return f"CustomSymbol(dim={self.dim})"


def eval_symbol(symbol: Symbol, x):
    """Evaluate a symbol at points ``x`` with dimension checking."""
    if not isinstance(symbol, Symbol):
        raise TypeError("eval_symbol expects a Symbol instance")
    return symbol(x)


def real_part_symbol(fn: Callable, dim: int = 1, root=None, domain=None) -> Symbol:
    """Reduce a complex-spectrum drift to the real part that drives variance.

    The imaginary part of the drift only rotates phases and drops out of
    the stationary variance, so the returned symbol evaluates Re f.  A
    real part that vanishes identically on the sampled domain collapses
    to the degenerate :class:`Zero` symbol, which carries
    ``sign_ok=False``; other sign violations are likewise flagged rather
    than raised.
    """
    dim = int(dim)
    root_pt = _as_point(root if root is not None else np.zeros(dim), dim)
    if domain is None:
        box = (root_pt - 1.0, root_pt + 1.0)
    else:
        box = _as_box(domain[0], domain[1], dim)

    def real_fn(x):
        try:
            vals = np.asarray(fn(x))
        except (TypeError, ValueError):
            vals = np.vectorize(lambda v: complex(fn(v)))(x)
        return np.real(vals).astype(float)

    pts = _lattice(box, dim)
    sampled = real_fn(pts)
    if np.max(np.abs(sampled)) <= _ZERO_TOL:
        return Zero(dim, domain=box)
    return CustomSymbol(real_fn, dim=dim, root=root_pt, domain=box)


def minimal_support(coeffs: Mapping) -> frozenset[MultiIndex]:
    """Componentwise-minimal multi-indices among the nonzero coefficients.

    A multi-index j belongs to the result exactly when no other stored
    multi-index d with a nonzero coefficient satisfies d <= j in every
    component.  The scan sorts by total degree so one forward pass
    suffices: a dominator always has total degree at most that of the
    dominated index, and equal-degree indices never dominate each other.
    """
    entries = [as_multi_index(j) for j, a in coeffs.items() if float(a) != 0.0]
    if not entries:
        raise ValueError("coefficient map has no nonzero entries")
    dims = {len(j) for j in entries}
    if len(dims) != 1:
        raise ValueError("all multi-indices must have the same number of components")
    entries.sort(key=lambda j: (sum(j), j))
    minima: list[MultiIndex] = []
    for j in entries:
        if not any(all(md <= jd for md, jd in zip(m, j)) for m in minima):
            minima.append(j)
    return frozenset(minima)


def predicts_convergence(coeffs: Mapping) -> bool:
    """Convergence test for multi-variable polynomial drifts.

    Returns True when at least two distinct unit multi-indices (a single
    1, all other components 0) carry strictly positive coefficients.
    Two independent linear directions of contact are enough to keep the
    stationary variance bounded as p approaches 0 from below, whatever
    the remaining terms do.
    """
    entries = {as_multi_index(j): float(a) for j, a in coeffs.items()}
    if not entries:
        raise ValueError("coefficient map is empty")
    dims = {len(j) for j in entries}
    if len(dims) != 1:
        raise ValueError("all multi-indices must have the same number of components")
    dim = dims.pop()
    if dim < 2:
        raise ValueError("the convergence test needs at least two variables")
    units = sum(1 for j, a in entries.items() if sum(j) == 1 and a > 0.0)
    return units >= 2


def symbol_to_dict(symbol: Symbol) -> dict:
    """JSON-ready description of a symbol; inverse of :func:`symbol_from_dict`."""
    if isinstance(symbol, ToolAlpha):
        return {
            "kind": "tool_alpha",
            "alpha": symbol.alpha,
            "root": float(symbol.root[0]),
            "domain": [float(symbol.domain[0][0]), float(symbol.domain[1][0])],
        }
    if isinstance(symbol, Polynomial):
        return {
            "kind": "polynomial",
            "coeffs": [{"index": list(j), "coeff": a} for j, a in symbol.coeffs.items()],
            "root": [float(v) for v in symbol.root],
            "domain": [
                [float(v) for v in symbol.domain[0]],
                [float(v) for v in symbol.domain[1]],
            ],
        }
    if isinstance(symbol, Piecewise):
        return {
            "kind": "piecewise",
            "left": symbol_to_dict(symbol.left),
            "right": symbol_to_dict(symbol.right),
        }
    if isinstance(symbol, Radial2D):
        return {"kind": "radial2d", "exponent": symbol.exponent}
    if isinstance(symbol, Zero):
        return {"kind": "zero", "dim": symbol.dim}
    if isinstance(symbol, PowerWavenumber):
        return {"kind": "power2m", "m": symbol.m}
    if isinstance(symbol, SwiftHohenberg1D):
        return {"kind": "swift_hohenberg_1d"}
    if isinstance(symbol, SwiftHohenberg2D):
        return {"kind": "swift_hohenberg_2d"}
    if isinstance(symbol, ConvolutionKernel):
        return {
            "kind": "convolution",
            "samples": [float(v) for v in symbol.samples],
            "spacing": symbol.spacing,
        }
    raise TypeError(f"{symbol.kind} symbols have no serialized form")


def symbol_from_dict(data: Mapping) -> Symbol:
    """Rebuild a symbol from its dictionary description."""
    kind = data.get("kind")
    if kind == "tool_alpha":
        domain = data.get("domain")
        return ToolAlpha(
            data["alpha"],
            root=data.get("root", 0.0),
            domain=tuple(domain) if domain else None,
        )
    if kind == "polynomial":
        coeffs = {tuple(entry["index"]): entry["coeff"] for entry in data["coeffs"]}
        domain = data.get("domain")
        return Polynomial(
            coeffs,
            root=data.get("root"),
            domain=tuple(domain) if domain else None,
        )
    if kind == "piecewise":
        return Piecewise(symbol_from_dict(data["left"]), symbol_from_dict(data["right"]))
    if kind == "radial2d":
        return Radial2D(data.get("exponent", 2.0))
    if kind == "zero":
        return Zero(data.get("dim", 1))
    if kind == "power2m":
        return PowerWavenumber(data.get("m", 1))
    if kind == "swift_hohenberg_1d":
        return SwiftHohenberg1D()
    if kind == "swift_hohenberg_2d":
        return SwiftHohenberg2D()
    if kind == "convolution":
        return ConvolutionKernel(data["samples"], data["spacing"])
    raise ValueError(f"unknown symbol kind: {kind!r}")
