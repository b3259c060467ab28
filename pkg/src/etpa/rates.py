"""Cross sections, fluxes and event rates; evaluation of complete scenarios.

SI units throughout (m, s, photons/s, m^4 s for the two-photon cross
section).  The rate formulas accept ``units.Quantity`` arguments as well as
floats, which is how the unit audit in the test suite exercises them.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import NamedTuple

from scipy import constants as _c

from .absorption import (
    BeamGeometry,
    Molecule,
    coupling_from_sigma2,
    sigma2_from_coupling,
    tpa_epp,
)
from .enhancement import chi_factor, marginal_bandwidth, qef_flux_form, qef_number
from .lightstates import ValidityWarning, apply_dispersion, dispersion_attenuation, make_jsa_gaussian
from .numerics import SQRT_PI, erfcx
from .units import constants_like

REPORT_SCHEMA = "etpa.report/1"
GM = 1e-58  # m^4 s


def flux_from_power(power, wavelength):
    """Photon flux P lambda / (h c)."""
    h, c = constants_like(power)
    if power < 0 * power or not wavelength > 0 * wavelength:
        raise ValueError("power must be >= 0 and wavelength > 0")
    return power * wavelength / (h * c)


def omega_from_wavelength(wavelength):
    return 2 * math.pi * _c.c / wavelength


def sigma2_convert(*, gamma_fg, area, coupling=None, sigma2=None):
    """Convert between Sigma2 L0^4 and sigma2 = 2 Sigma2 L0^4 A0^2 / gamma_fg; give exactly one."""
    if (coupling is None) == (sigma2 is None):
        raise ValueError("give exactly one of coupling or sigma2")
    if coupling is not None:
        return sigma2_from_coupling(coupling, gamma_fg, area)
    return coupling_from_sigma2(sigma2, gamma_fg, area)


def rate_coherent(sigma2, f_coh, area):
    """Per-molecule rate sigma2 (F / A0)^2 for narrow-band resonant light."""
    return sigma2 * (f_coh / area) ** 2


class EppRate(NamedTuple):
    rate: float
    cross_section: float


def entangled_cross_section(sigma2, bandwidth, chi, area):
    """sigma_e = sigma2 B chi / A0 (an area)."""
    return sigma2 * bandwidth * chi / area


def rate_epp(sigma2, bandwidth, chi, f_epp, area):
    """Per-molecule EPP rate sigma_e F_EPP / A0, linear in the pair flux."""
    if f_epp > bandwidth * 1.0:
        warnings.warn(
            ValidityWarning(
                f"F_EPP exceeds the bandwidth B (ratio {float(f_epp / bandwidth):.3g}); pairs overlap in time",
                float(f_epp / bandwidth),
            ),
            stacklevel=2,
        )
    se = entangled_cross_section(sigma2, bandwidth, chi, area)
    return EppRate(se * f_epp / area, se)


def rate_epp_gaussian(sigma2, sigma_b, sigma_n, sigma, gamma_fg, f_epp, area):
    """Gaussian-JSA rate with the pulse correspondence T ~ sqrt(pi)/sigma."""
    if not sigma_n < sigma_b:
        raise ValueError("sigma_n must be below sigma_b")
    ratio = erfcx(gamma_fg / (math.sqrt(2) * sigma_n)) / erfcx(gamma_fg / (2 * sigma))
    se = sigma2 * 2 * sigma_b * sigma * ratio / (area * SQRT_PI * sigma_n)
    return se * f_epp / area


def molecule_count(concentration, area, path_length):
    n = concentration * area * path_length
    if not n > 0:
        raise ValueError("molecule count must be positive")
    return n


# ---------------------------------------------------------------------------
# scenarios


@dataclass(frozen=True)
class LightSource:
    """Coherent CW light or a stream of entangled pairs.

    ``flux`` is in photons/s (for pairs, twice the pair flux).  EPP light
    needs ``bandwidth`` B or ``sigma_b``, and ``chi`` or ``sigma_n``.
    ``comparator_flux`` is the coherent flux the enhancement factor is quoted
    against (default: equal flux).
    """

    kind: str
    flux: float
    wavelength: float
    bandwidth: float | None = None
    chi: float | None = None
    sigma_b: float | None = None
    sigma_n: float | None = None
    dispersion: float = 0.0
    comparator_flux: float | None = None

    def __post_init__(self):
        if self.kind not in ("coherent", "epp"):
            raise ValueError(f"light kind must be 'coherent' or 'epp', got {self.kind!r}")
        if self.flux < 0 or not self.wavelength > 0:
            raise ValueError("flux must be >= 0 and wavelength > 0")
        if self.kind == "epp":
            if self.bandwidth is None and self.sigma_b is None:
                raise ValueError("EPP light needs light.bandwidth or light.sigma_b")
            if self.chi is None and self.sigma_n is None:
                raise ValueError("EPP light needs light.chi or light.sigma_n")

    @property
    def omega0(self):
        return omega_from_wavelength(self.wavelength)


@dataclass(frozen=True)
class Sample:
    concentration: float  # molecules / m^3
    path_length: float  # m


@dataclass(frozen=True)
class Scenario:
    light: LightSource
    molecule: Molecule
    geometry: BeamGeometry
    window: float  # interaction window T, s
    sample: Sample
    eta_det: float = 1.0
    name: str = ""

    def __post_init__(self):
        if not self.window > 0:
            raise ValueError("interaction window must be positive")
        if not 0 <= self.eta_det <= 1:
            raise ValueError("detection efficiency must lie in [0, 1]")
        if self.molecule.sigma2 is None:
            raise ValueError("scenario molecule needs a cross section (give sigma2 or a geometry)")


def _epp_parameters(light: LightSource, window):
    sigma_b = light.sigma_b if light.sigma_b is not None else light.bandwidth / math.sqrt(2)
    bandwidth = light.bandwidth if light.bandwidth is not None else marginal_bandwidth(light.sigma_b)
    chi = light.chi if light.chi is not None else chi_factor(window, light.sigma_n)
    return bandwidth, chi, sigma_b


def evaluate_scenario(s: Scenario, tol=1e-9) -> dict:
    """Per-molecule and sample rates, detected counts and the enhancement factor.

    Every intermediate quantity is included; validity warnings raised on the
    way are collected under ``warnings`` (and re-emitted).
    """
    light, mol, geo = s.light, s.molecule, s.geometry
    area, T = geo.area, s.window
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rep = {
            "schema": REPORT_SCHEMA,
            "scenario": s.name,
            "kind": light.kind,
            "wavelength_m": light.wavelength,
            "omega0_rad_s": light.omega0,
            "flux_photons_s": light.flux,
            "area_m2": area,
            "window_s": T,
            "sigma2_m4s": mol.sigma2,
            "sigma2_GM": mol.sigma2 / GM,
            "coupling": mol.coupling,
            "gamma_fg_rad_s": mol.gamma_fg,
            "two_photon_detuning_rad_s": mol.detuning(light.omega0),
            "molecule_count": molecule_count(s.sample.concentration, area, s.sample.path_length),
            "eta_det": s.eta_det,
        }
        if light.kind == "coherent":
            g, d = mol.gamma_fg, mol.detuning(light.omega0)
            rate = rate_coherent(mol.sigma2, light.flux, area) * g * g / (g * g + d * d)
            rep["mean_photons_per_window"] = light.flux * T
        else:
            bandwidth, chi, sigma_b = _epp_parameters(light, T)
            att = dispersion_attenuation(sigma_b, light.dispersion)
            eps2 = light.flux * T / 2
            f_coh = light.comparator_flux if light.comparator_flux is not None else light.flux
            r = rate_epp(mol.sigma2, bandwidth, chi, light.flux, area)
            rate = r.rate * att
            rate_coh = rate_coherent(mol.sigma2, f_coh, area)
            qef = qef_flux_form(light.flux, f_coh, bandwidth * att, chi) if light.flux > 0 else 0.0
            rep.update(
                {
                    "pair_probability_eps2": eps2,
                    "bandwidth_B_s": bandwidth,
                    "sigma_b_rad_s": sigma_b,
                    "sigma_n_rad_s": light.sigma_n,
                    "chi": chi,
                    "dispersion_s2": light.dispersion,
                    "dispersion_attenuation": att,
                    "entangled_cross_section_m2": r.cross_section * att,
                    "comparator_flux_photons_s": f_coh,
                    "rate_coherent_comparator": rate_coh,
                    "qef": qef,
                    "qef_number": qef_number(eps2, f_coh * T) if eps2 > 0 else 0.0,
                }
            )
            if eps2 > 0.1:
                warnings.warn(
                    ValidityWarning(f"pair probability per window eps2 = {eps2:.3g} > 0.1", eps2), stacklevel=2
                )
            if light.sigma_n is not None and 0 < eps2 <= 0.5:
                psi = apply_dispersion(make_jsa_gaussian(light.omega0, light.sigma_n, sigma_b, eps2), light.dispersion)
                rep["p_window_engine"] = tpa_epp(psi, mol, tol)
        rep["rate_per_molecule"] = rate
        rep["p_window"] = rate * T
        rep["sample_rate"] = rate * rep["molecule_count"]
        rep["detected_counts"] = rep["sample_rate"] * s.eta_det
    rep["warnings"] = [str(w.message) for w in caught]
    for w in caught:
        warnings.warn_explicit(w.message, w.category, w.filename, w.lineno)
    return rep


def with_flux(s: Scenario, flux) -> Scenario:
    return replace(s, light=replace(s.light, flux=flux))


def report_scalars(rep: dict) -> dict:
    """Numeric entries of a report, in report order."""
    return {k: v for k, v in rep.items() if isinstance(v, (int, float)) and not isinstance(v, bool)}


def format_report_text(rep: dict) -> str:
    keys = [k for k in rep if k != "warnings"]
    width = max(len(k) for k in keys)
    lines = []
    for k in keys:
        v = rep[k]
        if isinstance(v, float):
            v = f"{v:.6g}"
        elif isinstance(v, list):
            v = "; ".join(map(str, v))
        lines.append(f"{k:<{width}}  {v}")
    for w in rep.get("warnings", []):
        lines.append(f"warning: {w}")
    return "\n".join(lines)
