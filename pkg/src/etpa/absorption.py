"""One- and two-photon absorption probabilities.

Probabilities are P = 2 Re p.  For the Lorentzian line
p ~ 1/(gamma - i(w_fg - 2 w0 - x)) this is the absorptive profile
2 gamma / (gamma^2 + (w_fg - 2 w0 - x)^2); the dispersive part is odd about
line centre and drops out before any integral is taken.

Closed forms and quadrature oracles sit side by side: ``tpa_coherent`` and
``tpa_epp`` integrate |K(x)|^2 against the line shape numerically, whatever
the light state, while the ``*_gaussian`` functions return the analytic
results for Gaussian states on two-photon resonance.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy import constants as _c
from scipy.integrate import trapezoid
from scipy.interpolate import CubicSpline

from .lightstates import (
    GRID_1D_POINTS,
    GRID_2D_POINTS,
    JointSpectralAmplitude,
    SpectralAmplitude,
    SymmetryError,
    ValidityWarning,
    apply_dispersion,
    dispersion_attenuation,
    gaussian_shape,
)
from .numerics import (
    SQRT_PI,
    TWO_PI,
    antidiagonal_lattice,
    diagonal_project,
    erfcx,
    lorentz_weighted_integral,
    self_convolution_lattice,
)

SMALL_P_LIMIT = 0.1
QUASI_MONO_LIMIT = 0.1
IMPULSIVE_LIMIT = 0.1
ZERO_PI_LIMIT = 1e-6
RESONANCE_GUARD = 10.0  # intermediate levels must sit > 10 gamma_fg from w0
DEFAULT_TOL = 1e-9
# spline integrands have kinks in their third derivative at every knot;
# asking QUADPACK for more than this only trips its roundoff detection
LATTICE_TOL = 1e-7


class NearResonanceError(ValueError):
    pass


# ---------------------------------------------------------------------------
# molecule and beam


@dataclass(frozen=True)
class BeamGeometry:
    """Carrier frequency (rad/s), effective beam area (m^2) and refractive index."""

    omega0: float
    area: float
    n: float = 1.0

    def __post_init__(self):
        if not self.area > 0:
            raise ValueError("beam area must be positive")
        if not self.n >= 1:
            raise ValueError("refractive index must be >= 1")
        if not self.omega0 > 0:
            raise ValueError("carrier frequency must be positive")

    @property
    def l0(self):
        """Single-photon field factor sqrt(hbar w0 / 2 eps0 n c A0)."""
        return math.sqrt(_c.hbar * self.omega0 / (2 * _c.epsilon_0 * self.n * _c.c * self.area))


def coupling_from_sigma2(sigma2, gamma_fg, area):
    """Sigma2 L0^4 from the conventional cross section sigma2 (m^4 s)."""
    return sigma2 * gamma_fg / (2.0 * area * area)


def sigma2_from_coupling(coupling, gamma_fg, area):
    """Conventional cross section (m^4 s) from the dimensionless coupling Sigma2 L0^4."""
    return 2.0 * coupling * area * area / gamma_fg


@dataclass(frozen=True)
class OnePhotonLevel:
    """Intermediate level m: frequency, half-width (rad/s) and |mu_gm|^2 L0^2 (1/s)."""

    omega_mg: float
    gamma_mg: float
    mu2_l02: float


@dataclass(frozen=True)
class Molecule:
    """Two-photon transition g -> f.

    Give the coupling either as the dimensionless ``coupling`` = Sigma2 L0^4
    or as ``sigma2`` (m^4 s per photon^2) together with ``geometry``; the
    other one is filled in.
    """

    omega_fg: float
    gamma_fg: float
    coupling: float | None = None
    sigma2: float | None = None
    geometry: BeamGeometry | None = None
    one_photon: OnePhotonLevel | None = None

    def __post_init__(self):
        if not (self.omega_fg > 0 and self.gamma_fg > 0):
            raise ValueError("omega_fg and gamma_fg must be positive")
        if self.coupling is None and self.sigma2 is None:
            raise ValueError("a molecule needs a coupling or a cross section")
        if self.coupling is None:
            if self.geometry is None:
                raise ValueError("converting sigma2 to a coupling needs a beam geometry")
            object.__setattr__(self, "coupling", coupling_from_sigma2(self.sigma2, self.gamma_fg, self.geometry.area))
        elif self.sigma2 is None and self.geometry is not None:
            object.__setattr__(self, "sigma2", sigma2_from_coupling(self.coupling, self.gamma_fg, self.geometry.area))
        if self.coupling < 0:
            raise ValueError("coupling must be non-negative")

    def detuning(self, omega0):
        """Two-photon detuning w_fg - 2 w0."""
        return self.omega_fg - 2.0 * omega0


@dataclass(frozen=True)
class IntermediateLevel:
    """Dipole matrix elements (C m, projected on the field polarization) and frequencies (rad/s)."""

    d_fm: float
    d_mg: float
    omega_fm: float
    omega_mg: float


class DipoleCoupling(NamedTuple):
    sigma2_tensor: float  # Sigma^(2), (rad/s)^2 / (V/m)^4
    coupling: float  # Sigma^(2) L0^4
    sigma2: float  # m^4 s


def sigma2_from_dipoles(levels: Sequence[IntermediateLevel], omega0, gamma_fg, geometry: BeamGeometry):
    """Far-off-resonance two-photon coupling from intermediate-level dipoles.

    Sigma^(2) = [sum_m mu_fm mu_mg / (w0 - w_fm)] [sum_m' mu_m'f mu_gm' / (w_m'g - w0)]
    with mu = d / hbar; the cross section follows from the dipoles directly.
    """
    if not levels:
        raise ValueError("at least one intermediate level is needed")
    for k, lev in enumerate(levels):
        for name, w in (("omega_mg", lev.omega_mg), ("omega_fm", lev.omega_fm)):
            if abs(w - omega0) <= RESONANCE_GUARD * gamma_fg:
                raise NearResonanceError(
                    f"intermediate level {k}: {name} is within {RESONANCE_GUARD:g} gamma_fg of the carrier; "
                    "the far-off-resonance coupling does not apply"
                )
    down = sum(lev.d_fm * lev.d_mg / (omega0 - lev.omega_fm) for lev in levels)
    up = sum(lev.d_fm * lev.d_mg / (lev.omega_mg - omega0) for lev in levels)
    sigma_d = down * up  # C^4 m^4 s^2
    tensor = sigma_d / _c.hbar**4
    coupling = tensor * geometry.l0**4
    sigma2 = (omega0 / (_c.hbar * _c.epsilon_0 * geometry.n * _c.c)) ** 2 * sigma_d / (2 * gamma_fg)
    return DipoleCoupling(tensor, coupling, sigma2)


# ---------------------------------------------------------------------------
# guards


def _guard_probability(p, what):
    if p > SMALL_P_LIMIT:
        warnings.warn(
            ValidityWarning(f"{what} probability {p:.3g} exceeds {SMALL_P_LIMIT}; perturbation theory is stretched", p),
            stacklevel=3,
        )
    return p


def _rms_duration(t, intensity):
    w = trapezoid(intensity, t)
    mean = trapezoid(t * intensity, t) / w
    return math.sqrt(max(trapezoid((t - mean) ** 2 * intensity, t) / w, 0.0))


# ---------------------------------------------------------------------------
# |K(x)|^2 models


@dataclass(frozen=True)
class _KModel:
    """|K(x)|^2 as a callable, with its rms width and (for lattices) its support."""

    f: object
    scale: float
    support: tuple | None = None
    k0: complex = field(default=0j)


def _from_lattice(x, k):
    p = np.abs(k) ** 2
    spline = CubicSpline(x, p)
    lo, hi = float(x[0]), float(x[-1])
    total = p.sum()
    scale = math.sqrt(np.sum(p * x * x) / total) if total > 0 else (hi - lo)

    def f(xx):
        xx = np.asarray(xx, dtype=float)
        return np.where((xx >= lo) & (xx <= hi), np.maximum(spline(xx), 0.0), 0.0)

    i0 = int(np.argmin(np.abs(x)))
    return _KModel(f, scale, (lo, hi), complex(k[i0]) if abs(x[i0]) < 1e-9 * (x[1] - x[0]) else 0j)


def _gauss_pump_k(psi, x):
    """Closed-form K for the Gaussian-pump JSA, dispersion included."""
    d, sb = psi.dispersion, psi.sigma_b
    a = 1.0 / (4 * sb * sb) - 1j * d
    cb = (sb * sb / TWO_PI) ** -0.25
    x = np.asarray(x, dtype=float)
    return gaussian_shape(x, psi.sigma_n) * np.exp(0.25j * d * x * x) * cb * np.sqrt(math.pi / a) / TWO_PI


def _gauss_separable_k(sigma, d, x):
    """Self-convolution of a Gaussian shape of width sigma under dispersion d."""
    x = np.asarray(x, dtype=float)
    c2 = math.sqrt(TWO_PI) / sigma
    a = 1.0 / (2 * sigma * sigma) - 1j * d
    return c2 * np.exp(-x * x / (8 * sigma * sigma) + 0.25j * d * x * x) * np.sqrt(math.pi / a) / TWO_PI


def k_coh(spec: SpectralAmplitude, x, grid_size=None):
    """K_coh(x) = int dz/2pi phi(w0 + z) phi(w0 + x - z) for the normalized shape phi."""
    if spec.is_gaussian and grid_size is None:
        out = np.exp(-np.square(np.asarray(x, dtype=float)) / (8 * spec.sigma**2)) + 0j
        return complex(out) if out.ndim == 0 else out
    lx, lk = self_convolution_lattice(spec.to_grid(grid_size or GRID_1D_POINTS), spec.omega0)
    xx = np.asarray(x, dtype=float)
    re = CubicSpline(lx, lk.real)(xx)
    im = CubicSpline(lx, lk.imag)(xx)
    out = np.where((xx >= lx[0]) & (xx <= lx[-1]), re + 1j * im, 0.0)
    return complex(out) if out.ndim == 0 else out


def _coh_model(spec: SpectralAmplitude, grid_size=None):
    if spec.is_gaussian and grid_size is None:
        s = spec.sigma
        return _KModel(lambda x: np.exp(-np.square(x) / (4 * s * s)), math.sqrt(2) * s, None, 1 + 0j)
    return _from_lattice(*self_convolution_lattice(spec.to_grid(grid_size or GRID_1D_POINTS), spec.omega0))


def k_psi(psi: JointSpectralAmplitude, x, grid_size=None):
    """Diagonal projection K_psi(x); closed form when available, grid line integral otherwise."""
    if psi.kind == "gaussian_pump" and grid_size is None:
        return _gauss_pump_k(psi, x)
    if psi.kind == "separable" and psi.phi0.is_gaussian and grid_size is None:
        return _gauss_separable_k(psi.phi0.sigma, psi.dispersion, x)
    return diagonal_project(psi.to_grid(grid_size or GRID_2D_POINTS), x, psi.omega0)


def _epp_model(psi: JointSpectralAmplitude, grid_size=None):
    if psi.kind == "gaussian_pump" and grid_size is None:
        sn = psi.sigma_n
        k0 = complex(_gauss_pump_k(psi, 0.0))
        a0 = abs(k0) ** 2
        return _KModel(lambda x: a0 * np.exp(-np.square(x) / (2 * sn * sn)), sn, None, k0)
    if psi.kind == "separable" and psi.phi0.is_gaussian and grid_size is None:
        s = psi.phi0.sigma
        k0 = complex(_gauss_separable_k(s, psi.dispersion, 0.0))
        a0 = abs(k0) ** 2
        return _KModel(lambda x: a0 * np.exp(-np.square(x) / (4 * s * s)), math.sqrt(2) * s, None, k0)
    if psi.kind == "separable":
        phi = psi.phi0
        if psi.dispersion:
            d = psi.dispersion
            phi = phi.with_phase(lambda z: 0.5 * d * z * z, grid_size or GRID_1D_POINTS)
        return _from_lattice(*self_convolution_lattice(phi.to_grid(grid_size or GRID_1D_POINTS), psi.omega0))
    return _from_lattice(*antidiagonal_lattice(psi.to_grid(grid_size or GRID_2D_POINTS), psi.omega0))


def lorentz_overlap(model: _KModel, mol: Molecule, omega0, tol=DEFAULT_TOL):
    """int dx/2pi |K(x)|^2 2 gamma / (gamma^2 + (w_fg - 2 w0 - x)^2)."""
    if model.support is not None:
        tol = max(tol, LATTICE_TOL)
    val, _ = lorentz_weighted_integral(
        model.f, mol.detuning(omega0), mol.gamma_fg, model.scale, support=model.support, tol=tol
    )
    return max(val, 0.0)


# ---------------------------------------------------------------------------
# one-photon absorption


def opa_probability(spec: SpectralAmplitude, mol: Molecule, tol=DEFAULT_TOL):
    """mu^2 L0^2 N int dw/2pi |phi(w)|^2 2 gamma_mg / (gamma_mg^2 + (w_mg - w)^2)."""
    lev = mol.one_photon
    if lev is None:
        raise NotImplementedError("molecule has no one-photon level; OPA is not defined for it")
    if spec.is_gaussian:
        s = spec.sigma
        f = lambda x: math.sqrt(TWO_PI) / s * np.exp(-x * x / (2 * s * s))  # noqa: E731
        support, scale = None, s
    else:
        g = spec.grid
        p = np.abs(g.values) ** 2
        xs = g.omega - spec.omega0
        spline = CubicSpline(xs, p)
        f = lambda x: max(float(spline(x)), 0.0)  # noqa: E731
        support, scale = (float(xs[0]), float(xs[-1])), spec.width
        tol = max(tol, LATTICE_TOL)
    val, _ = lorentz_weighted_integral(f, lev.omega_mg - spec.omega0, lev.gamma_mg, scale, support=support, tol=tol)
    return _guard_probability(lev.mu2_l02 * spec.n_photons * val, "one-photon")


# ---------------------------------------------------------------------------
# coherent-state TPA


def tpa_coherent(spec: SpectralAmplitude, mol: Molecule, tol=DEFAULT_TOL, grid_size=None):
    """Quadrature of N^2 Sigma2 L0^4 int dx/2pi |K_coh|^2 L(x).

    ``grid_size`` forces the grid convolution path even for Gaussian shapes.
    A single-photon state cannot absorb two photons and gives 0.
    """
    if spec.single_photon or spec.n_photons == 0:
        return 0.0
    model = _coh_model(spec, grid_size)
    p = spec.n_photons**2 * mol.coupling * lorentz_overlap(model, mol, spec.omega0, tol)
    return _guard_probability(p, "two-photon")


def tpa_coherent_gaussian(n_photons, sigma, mol: Molecule, omega0=None):
    """Closed form N^2 Sigma2 L0^4 xi(gamma_fg / 2 sigma) on two-photon resonance."""
    if omega0 is not None and abs(mol.detuning(omega0)) > 1e-9 * max(mol.gamma_fg, sigma):
        raise ValueError("the closed form holds on two-photon resonance only")
    return n_photons**2 * mol.coupling * erfcx(mol.gamma_fg / (2 * sigma))


def gaussian_envelope_fourth_moment(n_photons, sigma):
    """int |A(t)|^4 dt for the Gaussian pulse: N^2 sigma / sqrt(pi)."""
    return n_photons**2 * sigma / SQRT_PI


def tpa_coherent_longpulse(t, envelope, mol: Molecule, omega0, intensity=False):
    """Long quasi-monochromatic pulse: 2 Sigma2 L0^4 gamma/(gamma^2 + D^2) int |A|^4 dt.

    ``envelope`` holds complex A(t) samples (sqrt(photons/s)), or |A(t)|^2
    (photons/s) when ``intensity`` is set.  The transform-limited bandwidth
    1/(2 tau_rms) is compared with gamma_fg.
    """
    t = np.asarray(t, dtype=float)
    env = np.asarray(envelope)
    inten = np.real(env) if intensity else np.abs(env) ** 2
    fourth = trapezoid(inten**2, t)
    tau = _rms_duration(t, inten)
    if tau > 0:
        ratio = 1.0 / (2 * tau * mol.gamma_fg)
        if ratio > QUASI_MONO_LIMIT:
            warnings.warn(
                ValidityWarning(f"pulse bandwidth / gamma_fg = {ratio:.3g}; pulse is not quasi-monochromatic", ratio),
                stacklevel=2,
            )
    d = mol.detuning(omega0)
    g = mol.gamma_fg
    return _guard_probability(2 * mol.coupling * g / (g * g + d * d) * fourth, "two-photon")


class ImpulsiveResult(NamedTuple):
    probability: float
    zero_pi: bool


def tpa_coherent_impulsive(t, envelope, mol: Molecule):
    """Impulsive limit Sigma2 L0^4 |int A(t)^2 dt|^2, with a two-photon zero-pi flag."""
    t = np.asarray(t, dtype=float)
    a = np.asarray(envelope, dtype=complex)
    amp = trapezoid(a * a, t)
    energy = trapezoid(np.abs(a) ** 2, t)
    ratio = mol.gamma_fg * _rms_duration(t, np.abs(a) ** 2)
    if ratio > IMPULSIVE_LIMIT:
        warnings.warn(ValidityWarning(f"pulse duration x gamma_fg = {ratio:.3g}; not impulsive", ratio), stacklevel=2)
    zero_pi = energy > 0 and abs(amp) ** 2 / energy**2 < ZERO_PI_LIMIT
    return ImpulsiveResult(_guard_probability(mol.coupling * abs(amp) ** 2, "two-photon"), bool(zero_pi))


# ---------------------------------------------------------------------------
# entangled-pair TPA


def _check_symmetric(psi):
    if psi.unsymmetrized:
        raise SymmetryError("raw Type-II amplitude: call symmetrize_type2 before computing absorption")


def tpa_epp(psi: JointSpectralAmplitude, mol: Molecule, tol=DEFAULT_TOL, grid_size=None):
    """Quadrature of 4 eps^2 Sigma2 L0^4 int dx/2pi |K_psi(x)|^2 L(x).

    Closed-form K is used for Gaussian representations unless ``grid_size``
    is given, in which case the state is sampled on that grid and K is taken
    from its antidiagonal sums.
    """
    _check_symmetric(psi)
    if psi.is_null:
        return 0.0
    model = _epp_model(psi, grid_size)
    p = 4.0 * psi.eps2 * psi.pair_norm2 * mol.coupling * lorentz_overlap(model, mol, psi.omega0, tol)
    return _guard_probability(p, "two-photon")


def tpa_epp_gaussian(eps2, sigma_n, sigma_b, mol: Molecule, gdd=0.0):
    """Closed form 4 eps^2 Sigma2 L0^4 (2 sigma_b / sigma_n) xi(gamma / sqrt2 sigma_n), resonant."""
    return (
        4.0 * eps2 * mol.coupling * (2 * sigma_b / sigma_n) * erfcx(mol.gamma_fg / (math.sqrt(2) * sigma_n))
        * dispersion_attenuation(sigma_b, gdd)
    )


def pair_time_diagonal(psi: JointSpectralAmplitude, grid_size=GRID_2D_POINTS, pad=2):
    """psi~(t, t) from the 2-D Fourier transform of the sampled JSA.

    The grid must be centred on the carrier so that the line w + wt = 2 w0
    passes through grid nodes.  Returns (t, psi~(t, t)) over one period of the
    (zero-padded) transform.
    """
    g = psi.to_grid(grid_size)
    h = g.steps[0]
    shift = (g.omega[0] + g.omega_tilde[0] - 2 * psi.omega0) / h
    if not g.is_square or abs(shift - round(shift)) > 1e-6:
        raise ValueError("time-domain path needs a square grid whose antidiagonal lattice contains x = 0")
    m = pad * g.shape[0]
    spec = np.fft.fft2(g.values, s=(m, m))
    t = TWO_PI * np.fft.fftfreq(m, d=h)
    a = g.omega[0] - psi.omega0
    b = g.omega_tilde[0] - psi.omega0
    diag = np.diagonal(spec) * (h / TWO_PI) ** 2 * np.exp(-1j * (a + b) * t)
    order = np.argsort(t)
    return t[order], diag[order]


def impulsive_amplitude(psi: JointSpectralAmplitude, method="frequency", grid_size=None):
    """int dw/2pi psi(w, 2 w0 - w), from the frequency line integral or from int psi~(t, t) dt."""
    if method == "frequency":
        if grid_size is None and psi.kind != "grid":
            return complex(k_psi(psi, 0.0))
        return complex(diagonal_project(psi.to_grid(grid_size or GRID_2D_POINTS), 0.0, psi.omega0))
    if method == "time":
        t, d = pair_time_diagonal(psi, grid_size or GRID_2D_POINTS)
        return complex(np.sum(d) * (t[1] - t[0]))
    raise ValueError(f"unknown method {method!r}; use 'frequency' or 'time'")


def tpa_epp_impulsive(psi: JointSpectralAmplitude, mol: Molecule, method="frequency", grid_size=None):
    """Impulsive EPP limit 4 eps^2 Sigma2 L0^4 |int dw/2pi psi(w, 2 w0 - w)|^2."""
    _check_symmetric(psi)
    if psi.is_null:
        return 0.0
    if psi.kind == "gaussian_pump":
        ratio = mol.gamma_fg / psi.sigma_n
        if ratio > IMPULSIVE_LIMIT:
            warnings.warn(ValidityWarning(f"gamma_fg / sigma_n = {ratio:.3g}; EPP pulse is not impulsive", ratio), stacklevel=2)
    k0 = impulsive_amplitude(psi, method, grid_size)
    return _guard_probability(4.0 * psi.eps2 * psi.pair_norm2 * mol.coupling * abs(k0) ** 2, "two-photon")


def tpa_epp_dispersed(psi: JointSpectralAmplitude, gdd, mol: Molecule, method="analytic", grid_size=GRID_2D_POINTS, tol=DEFAULT_TOL):
    """EPP absorption after both photons pass group-delay dispersion ``gdd`` (s^2).

    ``analytic`` scales the undispersed result by 1/sqrt(1 + 16 D^2 sigma_b^4);
    ``grid`` applies the phase on a sampled grid and integrates numerically.
    """
    if psi.kind != "gaussian_pump":
        raise ValueError("dispersion attenuation is defined for the Gaussian-pump JSA")
    if psi.dispersion:
        raise ValueError("state already carries dispersion; pass the undispersed amplitude")
    if method == "analytic":
        return tpa_epp(psi, mol, tol) * dispersion_attenuation(psi.sigma_b, gdd)
    if method == "grid":
        return tpa_epp(apply_dispersion(psi, gdd), mol, tol, grid_size=grid_size)
    raise ValueError(f"unknown method {method!r}; use 'analytic' or 'grid'")
