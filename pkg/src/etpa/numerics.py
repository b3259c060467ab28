"""Special functions, adaptive quadrature and spectral grids.

Every spectral integral in this package uses the measure dw/2pi.  Grids store
plain angular-frequency steps; the 1/2pi factor is applied in exactly one
place, ``_dbar``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate as _integrate
from scipy import special as _special

SQRT_PI = math.sqrt(math.pi)
TWO_PI = 2.0 * math.pi

# erfcx switches from exp(z^2) erfc(z) to the continued fraction here
ERFCX_SWITCH = 4.0
_ERFCX_CF_TERMS = 60

# uniform-step tolerance for grid axes (relative)
AXIS_TOL = 1e-9


class DomainError(ValueError):
    """Argument outside the domain a function is defined on."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, estimate, error):
        super().__init__(f"{message} (estimate={estimate!r}, error bound={error:.3g})")
        self.estimate = estimate
        self.error = error


class CoverageWarning(UserWarning):
    """A requested point or integral lies (partly) outside a grid's support."""


def _dbar(d_omega):
    return d_omega / TWO_PI


# ---------------------------------------------------------------------------
# scaled complementary error function


def erfcx(z):
    """exp(z**2) * erfc(z) for z >= 0.

    Below ``ERFCX_SWITCH`` the product is formed directly (erfc is still far
    from underflow there); above it a backward-evaluated continued fraction is
    used, which is accurate to machine precision for z >= 3 with 60 terms.
    """
    arr = np.asarray(z, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise DomainError("erfcx is only defined here for z >= 0")
    out = np.empty_like(arr)
    small = arr < ERFCX_SWITCH
    zs = arr[small]
    out[small] = np.exp(zs * zs) * _special.erfc(zs)
    zl = arr[~small]
    if zl.size:
        t = zl.copy()
        for k in range(_ERFCX_CF_TERMS, 0, -1):
            t = zl + (0.5 * k) / t
        out[~small] = 1.0 / (SQRT_PI * t)
    if out.ndim == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# quadrature


def integrate_1d(f, a, b, tol=1e-10, points=None, limit=500):
    """Adaptive Gauss-Kronrod integral of f over [a, b].

    f may return complex values.  Converged when the error bound is at most
    ``max(tol, tol * |estimate|)``; otherwise ``QuadratureError`` is raised
    carrying the partial estimate and the achieved bound.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if points is not None:
        points = sorted(p for p in points if a < p < b) or None
    if not (math.isfinite(a) and math.isfinite(b)):
        points = None  # QUADPACK ignores breakpoints on infinite ranges

    probe = f(0.5 * (a + b) if math.isfinite(a) and math.isfinite(b) else 0.0)
    if np.iscomplexobj(probe):
        re, err_re = _quad(lambda x: np.real(f(x)), a, b, tol, points, limit)
        im, err_im = _quad(lambda x: np.imag(f(x)), a, b, tol, points, limit)
        est, err = complex(re, im), math.hypot(err_re, err_im)
    else:
        est, err = _quad(lambda x: float(f(x)), a, b, tol, points, limit)
    if err > max(tol, tol * abs(est)):
        raise QuadratureError("tolerance not reached", est, err)
    return est


def _quad(f, a, b, tol, points, limit):
    kw = dict(epsabs=tol, epsrel=tol, limit=limit, full_output=1)
    if points:
        kw["points"] = points
    res = _integrate.quad(f, a, b, **kw)
    value, err = res[0], res[1]
    if len(res) > 3 and err > max(tol, tol * abs(value)):
        raise QuadratureError(res[3].splitlines()[0], value, err)
    return value, err


def lorentz_tail_mass(center, gamma, lo, hi):
    """Mass of 2*gamma/(gamma^2 + (x-center)^2) dx/2pi outside [lo, hi], per side."""
    left = 0.5 - math.atan((center - lo) / gamma) / math.pi
    right = 0.5 - math.atan((hi - center) / gamma) / math.pi
    return left, right


def lorentz_weighted_integral(f, center, gamma, scale, support=None, tol=1e-10):
    """Integral of f(x) * 2 gamma / (gamma^2 + (center - x)^2) dx/2pi.

    f is real and smooth on the scale ``scale`` around x = 0.  The integration
    window is max(50 gamma, 10 scale) wide on each side, clipped to ``support``
    when f is only known there; beyond the window f is continued by its edge
    values and the Lorentzian tail is added analytically.

    Returns (value, tail) where ``tail`` is the analytic correction included
    in ``value``.
    """
    lo = min(-10.0 * scale, center - 50.0 * gamma)
    hi = max(10.0 * scale, center + 50.0 * gamma)
    if support is not None:
        lo, hi = max(lo, support[0]), min(hi, support[1])
    # geometric breakpoints so that neither a narrow f nor a narrow line is
    # stepped over when the two scales are far apart
    steps = (0.0, 1.0, 2.0, 4.0, 8.0, 16.0)
    pts = sorted({center + sgn * k * gamma for k in steps for sgn in (-1, 1)} | {sgn * k * scale for k in steps for sgn in (-1, 1)})

    def integrand(x):
        d = center - x
        return float(f(x)) * 2.0 * gamma / (gamma * gamma + d * d) / TWO_PI

    body = integrate_1d(integrand, lo, hi, tol=tol, points=pts)
    left, right = lorentz_tail_mass(center, gamma, lo, hi)
    tail = float(f(lo)) * left + float(f(hi)) * right
    total = body + tail
    if abs(tail) > 1e-6 * abs(total) and abs(tail) > 0:
        warnings.warn(
            CoverageWarning(
                f"Lorentzian tails beyond [{lo:.4g}, {hi:.4g}] carry an estimated "
                f"{tail:.3g} of {total:.3g}; widen the spectral grid"
            ),
            stacklevel=2,
        )
    return total, tail


# ---------------------------------------------------------------------------
# grids


def uniform_axis(center, half_width, n):
    """n uniformly spaced points on [center - half_width, center + half_width]."""
    if n < 2:
        raise ValueError("a grid axis needs at least two points")
    return center + np.linspace(-half_width, half_width, n)


def _check_axis(axis, name):
    axis = np.asarray(axis, dtype=float)
    if axis.ndim != 1 or axis.size < 2:
        raise ValueError(f"{name} must be a 1-D axis with at least two points")
    steps = np.diff(axis)
    step = (axis[-1] - axis[0]) / (axis.size - 1)
    if not step > 0 or np.any(steps <= 0):
        raise ValueError(f"{name} must be strictly increasing")
    # relative to the axis magnitude: absolute optical frequencies carry
    # ~1e-16 * omega0 rounding in every node
    scale = max(abs(step), np.max(np.abs(axis)) * 1e-6)
    if np.max(np.abs(steps - step)) > AXIS_TOL * scale:
        raise ValueError(f"{name} is not uniformly spaced")
    return axis, step


def _frozen(a):
    a = np.array(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class SpectralGrid1D:
    """Complex samples on a uniform angular-frequency axis (rad/s)."""

    omega: np.ndarray
    values: np.ndarray
    d_omega: float = field(init=False)

    def __post_init__(self):
        axis, step = _check_axis(self.omega, "omega")
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != axis.shape:
            raise ValueError("values must match the axis length")
        object.__setattr__(self, "omega", _frozen(axis))
        object.__setattr__(self, "values", _frozen(vals))
        object.__setattr__(self, "d_omega", float(step))

    @classmethod
    def sample(cls, func, center, half_width, n=4096):
        axis = uniform_axis(center, half_width, n)
        return cls(axis, func(axis))

    def integral(self):
        return complex(np.sum(self.values) * _dbar(self.d_omega))

    def norm2(self):
        return float(np.sum(np.abs(self.values) ** 2) * _dbar(self.d_omega))

    def covers(self, center, width, n_widths=6.0):
        return self.omega[0] <= center - n_widths * width and self.omega[-1] >= center + n_widths * width

    def interp(self, w):
        """Linear interpolation; zero outside the axis."""
        re = np.interp(w, self.omega, self.values.real, left=0.0, right=0.0)
        im = np.interp(w, self.omega, self.values.imag, left=0.0, right=0.0)
        return re + 1j * im

    def with_values(self, values):
        return SpectralGrid1D(self.omega, values)


@dataclass(frozen=True, eq=False)
class SpectralGrid2D:
    """Complex samples on a uniform (omega, omega_tilde) grid; values[i, j] at (omega[i], omega_tilde[j])."""

    omega: np.ndarray
    omega_tilde: np.ndarray
    values: np.ndarray
    steps: tuple = field(init=False)

    def __post_init__(self):
        a, ha = _check_axis(self.omega, "omega")
        b, hb = _check_axis(self.omega_tilde, "omega_tilde")
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (a.size, b.size):
            raise ValueError(f"values shape {vals.shape} does not match axes ({a.size}, {b.size})")
        object.__setattr__(self, "omega", _frozen(a))
        object.__setattr__(self, "omega_tilde", _frozen(b))
        object.__setattr__(self, "values", _frozen(vals))
        object.__setattr__(self, "steps", (float(ha), float(hb)))

    @classmethod
    def sample(cls, func, center, half_width, n=512):
        axis = uniform_axis(center, half_width, n)
        return cls(axis, axis, func(axis[:, None], axis[None, :]))

    @property
    def shape(self):
        return self.values.shape

    @property
    def is_square(self):
        return (
            self.omega.size == self.omega_tilde.size
            and np.allclose(self.omega, self.omega_tilde, rtol=0, atol=AXIS_TOL * self.steps[0])
        )

    @property
    def center(self):
        return 0.25 * (self.omega[0] + self.omega[-1] + self.omega_tilde[0] + self.omega_tilde[-1])

    def norm2(self):
        ha, hb = self.steps
        n2 = float(np.sum(np.abs(self.values) ** 2) * _dbar(ha) * _dbar(hb))
        if not math.isfinite(n2):
            raise ValueError("grid square-norm is not finite")
        return n2

    def with_values(self, values):
        return SpectralGrid2D(self.omega, self.omega_tilde, values)

    def bilinear(self, w, wt):
        """Bilinear interpolation at points (w, wt); zero outside the grid."""
        w = np.asarray(w, dtype=float)
        wt = np.asarray(wt, dtype=float)
        ha, hb = self.steps
        na, nb = self.shape
        fa = (w - self.omega[0]) / ha
        fb = (wt - self.omega_tilde[0]) / hb
        # snap coordinates that sit on a node up to rounding
        fa = np.where(np.abs(fa - np.rint(fa)) < 1e-9, np.rint(fa), fa)
        fb = np.where(np.abs(fb - np.rint(fb)) < 1e-9, np.rint(fb), fb)
        inside = (fa >= 0) & (fa <= na - 1) & (fb >= 0) & (fb <= nb - 1)
        ia = np.clip(np.floor(fa).astype(int), 0, na - 2)
        ib = np.clip(np.floor(fb).astype(int), 0, nb - 2)
        ta = np.clip(fa - ia, 0.0, 1.0)
        tb = np.clip(fb - ib, 0.0, 1.0)
        v = self.values
        out = (
            v[ia, ib] * (1 - ta) * (1 - tb)
            + v[ia + 1, ib] * ta * (1 - tb)
            + v[ia, ib + 1] * (1 - ta) * tb
            + v[ia + 1, ib + 1] * ta * tb
        )
        return np.where(inside, out, 0.0)


def diagonal_project(grid: SpectralGrid2D, x, omega0=None):
    """Line integral of the grid along omega + omega_tilde = 2*omega0 + x, in dz/2pi.

    The line is sampled at the omega-axis nodes and the grid is interpolated
    bilinearly, so lines through grid nodes are evaluated exactly.  Detunings
    whose line misses the grid give 0 and a ``CoverageWarning``.
    """
    if omega0 is None:
        omega0 = grid.center
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    lo = grid.omega[0] + grid.omega_tilde[0] - 2 * omega0
    hi = grid.omega[-1] + grid.omega_tilde[-1] - 2 * omega0
    outside = (xs < lo) | (xs > hi)
    if np.any(outside):
        warnings.warn(
            CoverageWarning(f"{int(outside.sum())} detuning(s) outside grid coverage [{lo:.4g}, {hi:.4g}]"),
            stacklevel=2,
        )
    w = grid.omega[None, :]
    wt = 2 * omega0 + xs[:, None] - w
    vals = grid.bilinear(np.broadcast_to(w, wt.shape), wt)
    out = vals.sum(axis=1) * _dbar(grid.steps[0])
    out[outside] = 0.0
    if np.ndim(x) == 0:
        return complex(out[0])
    return out


def antidiagonal_lattice(grid: SpectralGrid2D, omega0=None):
    """Diagonal projection on every detuning whose line passes through grid nodes.

    Requires equal steps on both axes.  Returns (x, K) with x spaced by the
    grid step.  Agrees with ``diagonal_project`` at those detunings.
    """
    ha, hb = grid.steps
    if abs(ha - hb) > AXIS_TOL * ha:
        raise ValueError("antidiagonal lattice needs equal axis steps")
    if omega0 is None:
        omega0 = grid.center
    na, nb = grid.shape
    idx = (np.arange(na)[:, None] + np.arange(nb)[None, :]).ravel()
    v = grid.values.ravel()
    k = np.bincount(idx, weights=v.real, minlength=na + nb - 1) + 1j * np.bincount(
        idx, weights=v.imag, minlength=na + nb - 1
    )
    x = grid.omega[0] + grid.omega_tilde[0] - 2 * omega0 + ha * np.arange(na + nb - 1)
    return x, k * _dbar(ha)


def self_convolution_lattice(grid: SpectralGrid1D, omega0):
    """K(x) = int dz/2pi g(omega0 + z) g(omega0 + x - z) on the node lattice of a 1-D grid."""
    v = grid.values
    k = np.convolve(v, v) * _dbar(grid.d_omega)
    x = 2 * grid.omega[0] - 2 * omega0 + grid.d_omega * np.arange(k.size)
    return x, k
