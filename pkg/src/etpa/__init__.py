"""Two-photon absorption by coherent light and time-frequency entangled photon pairs."""
from .numerics import CoverageWarning, DomainError, QuadratureError, erfcx, integrate_1d
from .lightstates import (
    JointSpectralAmplitude,
    SpectralAmplitude,
    ValidityWarning,
    apply_dispersion,
    make_gaussian_coherent,
    make_jsa_gaussian,
    make_jsa_separable,
    make_jsa_type2,
    make_single_photon,
    marginal_spectrum,
    read_jsa,
    symmetrize_type2,
    write_jsa,
)
from .absorption import (
    BeamGeometry,
    Molecule,
    OnePhotonLevel,
    k_coh,
    k_psi,
    opa_probability,
    tpa_coherent,
    tpa_coherent_gaussian,
    tpa_epp,
    tpa_epp_gaussian,
    tpa_epp_impulsive,
)
from .enhancement import QefBreakdown, qef_number, qef_spectral, qef_spectral_gaussian
from .rates import Scenario, evaluate_scenario, flux_from_power, rate_coherent, rate_epp

__version__ = "0.1.0"
