"""Quantum enhancement factor: number part, spectral part and flux forms.

QEF = QEF_number x QEF_spectral.  The number part compares mean photon numbers
(eps^2 against N_coh^2 / 2), the spectral part compares Lorentzian-weighted
integrals of |K_psi|^2 and |K_coh|^2.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .absorption import DEFAULT_TOL, Molecule, _coh_model, _epp_model, lorentz_overlap, tpa_coherent, tpa_epp
from .lightstates import JointSpectralAmplitude, SpectralAmplitude, ValidityWarning
from .numerics import SQRT_PI, erfcx

# a >> b is read as a > REGIME_SEPARATION * b when labelling limits
REGIME_SEPARATION = 10.0
CHI_WARN = 10.0

REGIMES = ("broad-line", "narrow-line", "line-between", "line-below-pump")


@dataclass(frozen=True)
class QefBreakdown:
    qef_number: float
    qef_spectral: float
    regime_label: str = "general"

    def __post_init__(self):
        if not (self.qef_number > 0 and self.qef_spectral > 0):
            raise ValueError("enhancement factors must be positive")

    @property
    def qef_total(self):
        return self.qef_number * self.qef_spectral


def qef_number(eps2, n_coh):
    """eps^2 / (N_coh^2 / 2), i.e. N_EPP / N_coh^2 with N_EPP = 2 eps^2."""
    if not (eps2 > 0 and n_coh > 0):
        raise ValueError("eps2 and n_coh must be positive")
    return eps2 / (0.5 * n_coh * n_coh)


def qef_number_from_means(n_epp, n_coh):
    return qef_number(0.5 * n_epp, n_coh)


def qef_spectral(psi: JointSpectralAmplitude, spec_coh: SpectralAmplitude, mol: Molecule, tol=DEFAULT_TOL, grid_size=None):
    """Ratio of the line-weighted integrals of |K_psi|^2 and |K_coh|^2."""
    if abs(psi.omega0 - spec_coh.omega0) > 1e-12 * abs(spec_coh.omega0):
        raise ValueError("the two states must share the carrier frequency")
    denom = lorentz_overlap(_coh_model(spec_coh), mol, spec_coh.omega0, tol)
    if denom <= 0:
        raise ZeroDivisionError("coherent-state overlap integral vanishes")
    num = psi.pair_norm2 * lorentz_overlap(_epp_model(psi, grid_size), mol, psi.omega0, tol)
    return num / denom


def qef_spectral_gaussian(sigma, sigma_n, sigma_b, gamma_fg):
    """(2 sigma_b / sigma_n) xi(gamma / sqrt2 sigma_n) / xi(gamma / 2 sigma)."""
    return (2 * sigma_b / sigma_n) * erfcx(gamma_fg / (math.sqrt(2) * sigma_n)) / erfcx(gamma_fg / (2 * sigma))


def regime_label(sigma, sigma_n, gamma_fg, separation=REGIME_SEPARATION):
    """Which limiting form applies, or "general"."""
    broad_c = gamma_fg > separation * sigma
    narrow_c = gamma_fg * separation < sigma
    broad_n = gamma_fg > separation * sigma_n
    narrow_n = gamma_fg * separation < sigma_n
    if broad_c and broad_n:
        return "broad-line"
    if narrow_c and narrow_n:
        return "narrow-line"
    if broad_n and narrow_c:
        return "line-between"  # sigma_n << gamma << sigma
    if narrow_n and broad_c:
        return "line-below-pump"  # sigma << gamma << sigma_n
    return "general"


def qef_spectral_limit(label, sigma, sigma_n, sigma_b, gamma_fg):
    """Limiting value of the Gaussian spectral factor in a labelled regime."""
    if label == "broad-line":
        return math.sqrt(2) * sigma_b / sigma
    if label == "narrow-line":
        return 2 * sigma_b / sigma_n
    if label == "line-between":
        return 2 * math.sqrt(2) / SQRT_PI * sigma_b / gamma_fg
    if label == "line-below-pump":
        return SQRT_PI * sigma_b * gamma_fg / (sigma_n * sigma)
    raise ValueError(f"no limiting form for regime {label!r}")


def qef_spectral_gaussian_limits(sigma, sigma_n, sigma_b, gamma_fg):
    """Exact Gaussian spectral factor together with the regime it falls in."""
    if not sigma_n < sigma_b:
        raise ValueError("sigma_n must be below sigma_b")
    return qef_spectral_gaussian(sigma, sigma_n, sigma_b, gamma_fg), regime_label(sigma, sigma_n, gamma_fg)


def qef_breakdown_gaussian(eps2, n_coh, sigma, sigma_n, sigma_b, gamma_fg):
    value, label = qef_spectral_gaussian_limits(sigma, sigma_n, sigma_b, gamma_fg)
    return QefBreakdown(qef_number(eps2, n_coh), value, label)


def qef_monolithic(psi: JointSpectralAmplitude, spec_coh: SpectralAmplitude, mol: Molecule, tol=DEFAULT_TOL):
    """P_EPP / P_coh from the two full absorption probabilities."""
    return tpa_epp(psi, mol, tol) / tpa_coherent(spec_coh, mol, tol)


# ---------------------------------------------------------------------------
# flux forms


def marginal_bandwidth(sigma_b):
    """B = sqrt2 sigma_b."""
    return math.sqrt(2) * sigma_b


def chi_factor(window, sigma_n):
    """chi = sqrt2 / (T sigma_n)."""
    if not (window > 0 and sigma_n > 0):
        raise ValueError("window and sigma_n must be positive")
    return math.sqrt(2) / (window * sigma_n)


def _warn_chi(chi):
    if chi > CHI_WARN:
        warnings.warn(
            ValidityWarning(f"chi = {chi:.3g} > {CHI_WARN:g}: the pump is too short for the long-pump model", chi),
            stacklevel=3,
        )


def epp_flux(eps2, window):
    """Photon flux of an EPP stream with pair probability eps2 per window: 2 eps2 / T."""
    return 2.0 * eps2 / window


def qef_flux_form(f_epp, f_coh, bandwidth, chi, psi: JointSpectralAmplitude | None = None, window=None):
    """QEF ~ F_EPP B chi / F_coh^2.

    When ``psi`` and ``window`` are given, ``f_epp`` must equal 2 eps2 / T.
    """
    if not (bandwidth > 0 and chi > 0 and f_coh > 0) or f_epp < 0:
        raise ValueError("fluxes, bandwidth and chi must be positive")
    if psi is not None:
        if window is None:
            raise ValueError("checking F_EPP against a JSA needs the window T")
        expected = epp_flux(psi.eps2, window)
        if abs(f_epp - expected) > 1e-9 * expected:
            raise ValueError(f"F_EPP = {f_epp:.6g}/s disagrees with 2 eps2 / T = {expected:.6g}/s")
    _warn_chi(chi)
    return f_epp * bandwidth * chi / (f_coh * f_coh)


def qef_flux_long_pump(f_epp, f_coh, sigma_b, sigma_n, window, sigma=None, regime="broad-line"):
    """Gaussian flux forms for the two line-width limits.

    ``broad-line`` (gamma >> sigma, sigma_n) uses the coherent pulse width
    sigma; ``narrow-line`` (gamma << sigma, sigma_n) uses sigma_n.
    """
    if regime == "broad-line":
        if sigma is None:
            raise ValueError("the broad-line form needs the coherent bandwidth sigma")
        return f_epp * math.sqrt(2) * sigma_b / (f_coh * f_coh * window * sigma)
    if regime == "narrow-line":
        return f_epp * 2 * sigma_b / (f_coh * f_coh * window * sigma_n)
    raise ValueError(f"unknown regime {regime!r}")


def qef_equal_flux(bandwidth, chi, f_eq):
    """B chi / F_EQ."""
    if not (bandwidth > 0 and chi > 0 and f_eq > 0):
        raise ValueError("bandwidth, chi and flux must be positive")
    _warn_chi(chi)
    return bandwidth * chi / f_eq


def qef_equal_flux_window(bandwidth, window, chi, eps2):
    """B T chi / (2 eps^2)."""
    if not (bandwidth > 0 and window > 0 and chi > 0 and eps2 > 0):
        raise ValueError("all arguments must be positive")
    _warn_chi(chi)
    return bandwidth * window * chi / (2 * eps2)


def crossover_flux(bandwidth, chi):
    """Flux at which coherent and EPP absorption rates coincide: B chi."""
    if not (bandwidth > 0 and chi > 0):
        raise ValueError("bandwidth and chi must be positive")
    return bandwidth * chi
