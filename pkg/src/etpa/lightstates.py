"""One-photon spectral amplitudes and two-photon joint spectral amplitudes.

Shapes are square-normalized in dw/2pi.  Gaussian representations keep their
closed forms and only build grids on request; grid representations carry their
samples.  The dispersion phase is written in detunings from the carrier,
exp[i D/2 ((w - w0)^2 + (wt - w0)^2)], which differs from the absolute-frequency
form only by phases that no probability depends on.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .numerics import (
    TWO_PI,
    SpectralGrid1D,
    SpectralGrid2D,
    CoverageWarning,
    diagonal_project,
    uniform_axis,
)

NORM_TOL = 1e-6
SYMMETRY_TOL = 1e-12
EPS2_MAX = 0.5
EPS2_WARN = 0.1

GRID_1D_POINTS = 4096
GRID_1D_WIDTHS = 8.0
GRID_2D_POINTS = 512
GRID_2D_WIDTHS = 6.0


class ValidityWarning(UserWarning):
    """A formula is evaluated outside the regime it was derived for.

    ``ratio`` holds the offending dimensionless ratio.
    """

    def __init__(self, message, ratio=float("nan")):
        super().__init__(message)
        self.ratio = ratio


class SymmetryError(ValueError):
    pass


def gaussian_shape(detuning, sigma):
    """(sigma^2/2pi)^(-1/4) exp(-detuning^2 / 4 sigma^2), unit square-norm in dw/2pi."""
    return (sigma * sigma / TWO_PI) ** -0.25 * np.exp(-np.square(detuning) / (4.0 * sigma * sigma))


# ---------------------------------------------------------------------------
# one-photon amplitudes


@dataclass(frozen=True, eq=False)
class SpectralAmplitude:
    """alpha(w) = sqrt(N) phi(w) around the carrier ``omega0``.

    Exactly one of ``sigma`` (Gaussian, closed form) or ``grid`` (samples of
    phi on absolute frequencies) is set.  ``single_photon`` marks a one-photon
    Fock state in the temporal mode phi rather than a coherent state.
    """

    omega0: float
    n_photons: float = 1.0
    sigma: float | None = None
    grid: SpectralGrid1D | None = None
    single_photon: bool = False

    def __post_init__(self):
        if (self.sigma is None) == (self.grid is None):
            raise ValueError("give exactly one of sigma or grid")
        if self.sigma is not None and not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not self.n_photons >= 0:
            raise ValueError("mean photon number must be non-negative")
        if self.single_photon and self.n_photons != 1:
            raise ValueError("a single-photon state carries exactly one photon")
        if self.grid is not None:
            n2 = self.grid.norm2()
            if abs(n2 - 1.0) > NORM_TOL:
                raise ValueError(f"spectral shape is not square-normalized (norm^2 = {n2:.9g})")

    @property
    def is_gaussian(self):
        return self.sigma is not None

    @property
    def width(self):
        """RMS width of |phi|^2 (equals sigma for the Gaussian)."""
        if self.sigma is not None:
            return self.sigma
        p = np.abs(self.grid.values) ** 2
        w = self.grid.omega - self.omega0
        mean = np.sum(p * w) / np.sum(p)
        return float(np.sqrt(np.sum(p * (w - mean) ** 2) / np.sum(p)))

    def phi(self, omega):
        if self.sigma is not None:
            return gaussian_shape(np.asarray(omega) - self.omega0, self.sigma).astype(complex)
        return self.grid.interp(omega)

    def alpha(self, omega):
        return math.sqrt(self.n_photons) * self.phi(omega)

    def to_grid(self, n=GRID_1D_POINTS, n_widths=GRID_1D_WIDTHS):
        if self.grid is not None:
            return self.grid
        return SpectralGrid1D.sample(self.phi, self.omega0, n_widths * self.sigma, n)

    def envelope(self, t):
        """Slowly varying envelope A(t) = int dw/2pi alpha(w) exp(-i (w - w0) t), in sqrt(photons/s)."""
        t = np.asarray(t, dtype=float)
        a0 = math.sqrt(self.n_photons)
        if self.sigma is not None:
            s = self.sigma
            return a0 * (TWO_PI) ** 0.25 * math.sqrt(s) / math.sqrt(math.pi) * np.exp(-(s * t) ** 2) + 0j
        g = self.grid
        phase = np.exp(-1j * np.multiply.outer(t, g.omega - self.omega0))
        return a0 * (phase @ g.values) * g.d_omega / TWO_PI

    def with_phase(self, phase_fn, n=GRID_1D_POINTS):
        """Grid copy with phi(w) -> phi(w) exp(i phase_fn(w - w0))."""
        g = self.to_grid(n)
        vals = g.values * np.exp(1j * phase_fn(g.omega - self.omega0))
        return replace(self, sigma=None, grid=g.with_values(vals))


def make_gaussian_coherent(omega0, sigma, n_photons=1.0):
    return SpectralAmplitude(omega0=omega0, n_photons=n_photons, sigma=sigma)


def make_single_photon(omega0, sigma=None, grid=None):
    return SpectralAmplitude(omega0=omega0, n_photons=1.0, sigma=sigma, grid=grid, single_photon=True)


def amplitude_from_samples(omega0, omega, values, n_photons=1.0, normalize=False):
    g = SpectralGrid1D(omega, values)
    if normalize:
        g = g.with_values(g.values / math.sqrt(g.norm2()))
    return SpectralAmplitude(omega0=omega0, n_photons=n_photons, grid=g)


# ---------------------------------------------------------------------------
# two-photon amplitudes


@dataclass(frozen=True, eq=False)
class JointSpectralAmplitude:
    """psi(w, wt) with pair probability ``eps2``.

    Representations:
      * Gaussian pump: psi_B((w - wt)/2) psi_N(w + wt - 2 w0), closed form;
      * separable: phi0(w) phi0(wt);
      * grid: samples on a 2-D grid (absolute frequencies).

    ``dispersion`` is the group-delay dispersion D (s^2).  For closed forms it
    is applied on evaluation; for grids it has already been multiplied in and
    is kept for bookkeeping.  ``unsymmetrized`` marks a raw Type-II amplitude,
    which must go through ``symmetrize_type2`` before any absorption
    calculation.  ``pair_norm2`` is the squared norm the amplitude had before
    it was renormalized (1 unless produced by symmetrization); absorption
    probabilities are scaled by it.
    """

    omega0: float
    eps2: float
    sigma_n: float | None = None
    sigma_b: float | None = None
    phi0: SpectralAmplitude | None = None
    grid: SpectralGrid2D | None = None
    dispersion: float = 0.0
    unsymmetrized: bool = False
    pair_norm2: float = 1.0

    def __post_init__(self):
        kinds = [self.sigma_b is not None, self.phi0 is not None, self.grid is not None]
        if sum(kinds) != 1:
            raise ValueError("give exactly one representation: (sigma_n, sigma_b), phi0 or grid")
        _check_eps2(self.eps2)
        if self.sigma_b is not None:
            if self.sigma_n is None or not 0 < self.sigma_n < self.sigma_b:
                raise ValueError(
                    "Gaussian-pump JSA needs 0 < sigma_n < sigma_b (narrow pump width below the "
                    f"phase-matching width); got sigma_n={self.sigma_n}, sigma_b={self.sigma_b}"
                )
        if self.grid is not None:
            n2 = self.grid.norm2()
            if n2 != 0.0 and abs(n2 - 1.0) > NORM_TOL:
                raise ValueError(f"JSA grid is not normalized (norm^2 = {n2:.9g})")
            if not self.unsymmetrized:
                if not self.grid.is_square:
                    raise SymmetryError("a symmetric JSA needs a square grid with common axes")
                v = self.grid.values
                scale = max(np.max(np.abs(v)), 1e-300)
                if np.max(np.abs(v - v.T)) > SYMMETRY_TOL * scale:
                    raise SymmetryError(
                        "JSA grid is not symmetric; build it with make_jsa_type2 and call symmetrize_type2"
                    )

    @property
    def kind(self):
        if self.sigma_b is not None:
            return "gaussian_pump"
        if self.phi0 is not None:
            return "separable"
        return "grid"

    @property
    def is_null(self):
        return self.pair_norm2 == 0.0

    def marginal_width(self):
        """RMS width of the marginal spectrum."""
        if self.kind == "gaussian_pump":
            return math.sqrt(self.sigma_b**2 + 0.25 * self.sigma_n**2)
        if self.kind == "separable":
            return self.phi0.width
        m = np.sum(np.abs(self.grid.values) ** 2, axis=1)
        w = self.grid.omega - self.omega0
        mean = np.sum(m * w) / np.sum(m)
        return float(np.sqrt(np.sum(m * (w - mean) ** 2) / np.sum(m)))

    def _phase(self, w, wt):
        if self.dispersion == 0.0:
            return 1.0
        a = np.asarray(w) - self.omega0
        b = np.asarray(wt) - self.omega0
        return np.exp(0.5j * self.dispersion * (a * a + b * b))

    def evaluate(self, w, wt):
        w = np.asarray(w, dtype=float)
        wt = np.asarray(wt, dtype=float)
        if self.kind == "gaussian_pump":
            vals = gaussian_shape(0.5 * (w - wt), self.sigma_b) * gaussian_shape(w + wt - 2 * self.omega0, self.sigma_n)
            return vals * self._phase(w, wt)
        if self.kind == "separable":
            return self.phi0.phi(w) * self.phi0.phi(wt) * self._phase(w, wt)
        return self.grid.bilinear(*np.broadcast_arrays(w, wt))

    def to_grid(self, n=GRID_2D_POINTS, n_widths=GRID_2D_WIDTHS):
        if self.grid is not None:
            return self.grid
        half = n_widths * self.marginal_width()
        return SpectralGrid2D.sample(self.evaluate, self.omega0, half, n)

    def materialize(self, n=GRID_2D_POINTS, n_widths=GRID_2D_WIDTHS):
        """Same state in grid representation."""
        if self.grid is not None:
            return self
        return JointSpectralAmplitude(
            omega0=self.omega0,
            eps2=self.eps2,
            grid=self.to_grid(n, n_widths),
            dispersion=self.dispersion,
            pair_norm2=self.pair_norm2,
        )


def _check_eps2(eps2):
    if not 0 < eps2 <= EPS2_MAX:
        raise ValueError(f"pair probability eps2 must lie in (0, {EPS2_MAX}], got {eps2}")
    if eps2 > EPS2_WARN:
        warnings.warn(
            ValidityWarning(
                f"pair probability eps2 = {eps2:.3g} exceeds {EPS2_WARN}; multi-pair terms are neglected",
                ratio=eps2,
            ),
            stacklevel=3,
        )


def make_jsa_gaussian(omega0, sigma_n, sigma_b, eps2):
    """Long-pump Type-I JSA: narrow pump factor times broad phase-matching factor."""
    if not 0 < sigma_n < sigma_b:
        raise ValueError(
            f"sigma_n must be positive and below sigma_b (long narrow-band pump); got {sigma_n} >= {sigma_b}"
            if sigma_n >= sigma_b
            else f"sigma_n must be positive, got {sigma_n}"
        )
    return JointSpectralAmplitude(omega0=omega0, eps2=eps2, sigma_n=sigma_n, sigma_b=sigma_b)


def make_jsa_separable(phi0: SpectralAmplitude, eps2):
    return JointSpectralAmplitude(omega0=phi0.omega0, eps2=eps2, phi0=phi0)


def make_jsa_grid(omega0, grid: SpectralGrid2D, eps2, normalize=False):
    if normalize:
        grid = grid.with_values(grid.values / math.sqrt(grid.norm2()))
    return JointSpectralAmplitude(omega0=omega0, eps2=eps2, grid=grid)


def make_jsa_type2(omega0, grid: SpectralGrid2D, eps2, normalize=False):
    """Raw signal/idler amplitude; not usable for absorption until symmetrized."""
    if normalize:
        grid = grid.with_values(grid.values / math.sqrt(grid.norm2()))
    return JointSpectralAmplitude(omega0=omega0, eps2=eps2, grid=grid, unsymmetrized=True)


def symmetrize_type2(psi: JointSpectralAmplitude) -> JointSpectralAmplitude:
    """(psi + psi^T)/2, renormalized; the pre-normalization norm^2 goes to ``pair_norm2``.

    An antisymmetric input gives the null amplitude (all zeros, pair_norm2 = 0).
    """
    g = psi.grid if psi.grid is not None else psi.to_grid()
    if not g.is_square:
        raise SymmetryError("Type-II symmetrization needs a square grid with common axes")
    sym = 0.5 * (g.values + g.values.T)
    n2 = g.with_values(sym).norm2()
    if n2 <= 1e-24 * max(g.norm2(), 1e-300):
        vals, n2 = np.zeros_like(sym), 0.0
    else:
        vals = sym / math.sqrt(n2)
    return JointSpectralAmplitude(
        omega0=psi.omega0,
        eps2=psi.eps2,
        grid=g.with_values(vals),
        dispersion=psi.dispersion,
        pair_norm2=psi.pair_norm2 * n2,
    )


def apply_dispersion(psi: JointSpectralAmplitude, gdd) -> JointSpectralAmplitude:
    """Propagate both photons through group-delay dispersion ``gdd`` (s^2)."""
    if gdd == 0:
        return psi
    if psi.grid is None:
        return replace(psi, dispersion=psi.dispersion + gdd)
    g = psi.grid
    a = (g.omega - psi.omega0)[:, None]
    b = (g.omega_tilde - psi.omega0)[None, :]
    vals = g.values * np.exp(0.5j * gdd * (a * a + b * b))
    return replace(psi, grid=g.with_values(vals), dispersion=psi.dispersion + gdd)


def dispersion_attenuation(sigma_b, gdd):
    """Factor 1/sqrt(1 + 16 D^2 sigma_b^4) by which dispersion lowers EPP absorption."""
    return 1.0 / math.sqrt(1.0 + 16.0 * gdd**2 * sigma_b**4)


def effective_sigma_b(sigma_b, gdd):
    if not sigma_b > 0:
        raise ValueError("sigma_b must be positive")
    return sigma_b * dispersion_attenuation(sigma_b, gdd)


def stretched_correlation_time(sigma_b, gdd):
    """Pair correlation time after dispersion, (1/sigma_b) sqrt(1 + 16 D^2 sigma_b^4)."""
    if not sigma_b > 0:
        raise ValueError("sigma_b must be positive")
    return math.sqrt(1.0 + 16.0 * gdd**2 * sigma_b**4) / sigma_b


def marginal_spectrum(psi: JointSpectralAmplitude, omega):
    """M(w) = int dwt/2pi |psi(w, wt)|^2 (unit integral in dw/2pi)."""
    omega = np.asarray(omega, dtype=float)
    if psi.kind == "gaussian_pump":
        s2 = psi.sigma_b**2 + 0.25 * psi.sigma_n**2
        return psi.pair_norm2 * math.sqrt(TWO_PI / s2) * np.exp(-((omega - psi.omega0) ** 2) / (2 * s2))
    if psi.kind == "separable":
        return psi.pair_norm2 * np.abs(psi.phi0.phi(omega)) ** 2
    g = psi.grid
    outside = (omega < g.omega[0]) | (omega > g.omega[-1])
    if np.any(outside):
        warnings.warn(CoverageWarning("marginal requested outside the JSA grid"), stacklevel=2)
    rows = np.sum(np.abs(g.values) ** 2, axis=1) * g.steps[1] / TWO_PI
    out = np.interp(omega, g.omega, rows, left=0.0, right=0.0)
    return out if out.ndim else float(out)


def diagonal_projection(psi: JointSpectralAmplitude, x, n=GRID_2D_POINTS):
    """K_psi(x) = int dz/2pi psi(w0 + z, w0 + x - z), on a grid (materialized if needed)."""
    return diagonal_project(psi.to_grid(n), x, psi.omega0)


# ---------------------------------------------------------------------------
# text-matrix format

JSA_FORMAT_TAG = "# etpa joint spectral amplitude v1"


def write_jsa(path, psi: JointSpectralAmplitude, grid_size=GRID_2D_POINTS):
    """Write a JSA as a plain-text matrix.

    Header lines (``key value...``): omega0, eps2, pair_norm2, dispersion,
    symmetry, then ``axis omega start step count`` and ``axis omega_tilde ...``
    (rad/s).  Each following line is one row (fixed omega) holding
    ``re im`` pairs for every omega_tilde.
    """
    g = psi.to_grid(grid_size)
    lines = [
        JSA_FORMAT_TAG,
        f"omega0 {float(psi.omega0)!r}",
        f"eps2 {float(psi.eps2)!r}",
        f"pair_norm2 {float(psi.pair_norm2)!r}",
        f"dispersion {float(psi.dispersion)!r}",
        f"symmetry {'type2-raw' if psi.unsymmetrized else 'symmetric'}",
        f"axis omega {float(g.omega[0])!r} {float(g.steps[0])!r} {g.omega.size}",
        f"axis omega_tilde {float(g.omega_tilde[0])!r} {float(g.steps[1])!r} {g.omega_tilde.size}",
    ]
    inter = np.empty(g.values.shape[:1] + (2 * g.values.shape[1],))
    inter[:, 0::2] = g.values.real
    inter[:, 1::2] = g.values.imag
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
        np.savetxt(fh, inter, fmt="%.17g")


def read_jsa(path) -> JointSpectralAmplitude:
    header = {}
    axes = {}
    with open(path) as fh:
        first = fh.readline().rstrip("\n")
        if first != JSA_FORMAT_TAG:
            raise ValueError(f"{path}: not an etpa JSA file (first line {first!r})")
        n_header = 1
        while len(axes) < 2:
            line = fh.readline()
            n_header += 1
            if not line:
                raise ValueError(f"{path}: truncated header")
            parts = line.split()
            if parts[0] == "axis":
                name, start, step, count = parts[1], float(parts[2]), float(parts[3]), int(parts[4])
                axes[name] = start + step * np.arange(count)
            else:
                header[parts[0]] = parts[1]
        data = np.loadtxt(fh, ndmin=2)
    vals = data[:, 0::2] + 1j * data[:, 1::2]
    grid = SpectralGrid2D(axes["omega"], axes["omega_tilde"], vals)
    return JointSpectralAmplitude(
        omega0=float(header["omega0"]),
        eps2=float(header["eps2"]),
        grid=grid,
        dispersion=float(header.get("dispersion", 0.0)),
        unsymmetrized=header.get("symmetry") == "type2-raw",
        pair_norm2=float(header.get("pair_norm2", 1.0)),
    )
