import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from etpa.absorption import (
    BeamGeometry,
    IntermediateLevel,
    Molecule,
    NearResonanceError,
    OnePhotonLevel,
    _epp_model,
    coupling_from_sigma2,
    gaussian_envelope_fourth_moment,
    impulsive_amplitude,
    k_coh,
    k_psi,
    lorentz_overlap,
    opa_probability,
    pair_time_diagonal,
    sigma2_from_coupling,
    sigma2_from_dipoles,
    tpa_coherent,
    tpa_coherent_gaussian,
    tpa_coherent_impulsive,
    tpa_coherent_longpulse,
    tpa_epp,
    tpa_epp_dispersed,
    tpa_epp_gaussian,
    tpa_epp_impulsive,
)
from etpa.lightstates import (
    SymmetryError,
    ValidityWarning,
    amplitude_from_samples,
    apply_dispersion,
    gaussian_shape,
    make_gaussian_coherent,
    make_jsa_gaussian,
    make_jsa_grid,
    make_jsa_separable,
    make_jsa_type2,
    make_single_photon,
    symmetrize_type2,
)
from etpa.numerics import SpectralGrid2D, erfcx

W0 = 100.0
COUPLING = 1e-4


def mol(gamma, detuning=0.0, **kw):
    return Molecule(omega_fg=2 * W0 + detuning, gamma_fg=gamma, coupling=COUPLING, **kw)


@pytest.fixture(autouse=True)
def _quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        yield


class TestCrossSection:
    @given(st.floats(1e-70, 1e-50), st.floats(1e8, 1e15), st.floats(1e-14, 1e-6))
    def test_round_trip(self, s2, gamma, area):
        back = sigma2_from_coupling(coupling_from_sigma2(s2, gamma, area), gamma, area)
        assert abs(back / s2 - 1) <= 1e-12

    def test_molecule_fills_both(self):
        geo = BeamGeometry(omega0=1.77e15, area=1e-10)
        m = Molecule(omega_fg=3.54e15, gamma_fg=3.14e13, sigma2=9e-58, geometry=geo)
        assert m.coupling == pytest.approx(9e-58 * 3.14e13 / (2 * 1e-20))
        m2 = Molecule(omega_fg=3.54e15, gamma_fg=3.14e13, coupling=m.coupling, geometry=geo)
        assert m2.sigma2 == pytest.approx(9e-58, abs=0, rel=1e-14)

    def test_sigma2_needs_geometry(self):
        with pytest.raises(ValueError):
            Molecule(omega_fg=2.0, gamma_fg=1.0, sigma2=1e-58)

    def test_dipoles_consistent_with_conversion(self):
        geo = BeamGeometry(omega0=1.77e15, area=1e-10)
        lev = IntermediateLevel(d_fm=3e-30, d_mg=5e-30, omega_fm=1.0e15, omega_mg=4.0e15)
        d = sigma2_from_dipoles([lev], geo.omega0, 1e13, geo)
        assert d.sigma2 == pytest.approx(sigma2_from_coupling(d.coupling, 1e13, geo.area), abs=0, rel=1e-12)
        assert d.coupling == pytest.approx(d.sigma2_tensor * geo.l0**4, abs=0, rel=1e-14)

    def test_near_resonance_refused(self):
        geo = BeamGeometry(omega0=1.77e15, area=1e-10)
        lev = IntermediateLevel(d_fm=1e-30, d_mg=1e-30, omega_fm=1.0e15, omega_mg=1.77e15 + 5e13)
        with pytest.raises(NearResonanceError):
            sigma2_from_dipoles([lev], geo.omega0, 1e13, geo)


class TestOnePhoton:
    def _mol(self, g=0.5, delta=0.3):
        return mol(1.0, one_photon=OnePhotonLevel(omega_mg=W0 + delta, gamma_mg=g, mu2_l02=1e-3))

    def test_spectral_phase_invariance(self):
        m = self._mol()
        spec = make_gaussian_coherent(W0, 1.2, n_photons=2.0)
        chirped = spec.with_phase(lambda z: 3.0 * z * z + 0.4 * z**3)
        assert opa_probability(chirped, m) == pytest.approx(opa_probability(spec, m), abs=0, rel=1e-7)

    def test_single_photon_equals_coherent_n1(self):
        m = self._mol()
        assert opa_probability(make_single_photon(W0, 0.8), m) == opa_probability(make_gaussian_coherent(W0, 0.8), m)

    def test_closed_form(self):
        # Gaussian |phi|^2 against the line: |phi(0)|^2 xi(gamma / sqrt2 sigma) on resonance
        m = self._mol(delta=0.0)
        s, g = 0.8, 0.5
        p = opa_probability(make_gaussian_coherent(W0, s, n_photons=3.0), m)
        peak = math.sqrt(2 * math.pi) / s
        assert p == pytest.approx(1e-3 * 3.0 * peak * erfcx(g / (math.sqrt(2) * s)), abs=0, rel=1e-8)

    def test_no_level(self):
        with pytest.raises(NotImplementedError):
            opa_probability(make_gaussian_coherent(W0, 1.0), mol(1.0))


class TestCoherentTPA:
    @pytest.mark.parametrize("ratio", [0.01, 0.1, 1.0, 10.0, 100.0])
    def test_closed_form_vs_quadrature(self, ratio):
        s = 1.0
        m = mol(ratio * s)
        spec = make_gaussian_coherent(W0, s, n_photons=2.0)
        assert tpa_coherent(spec, m) == pytest.approx(tpa_coherent_gaussian(2.0, s, m, W0), abs=0, rel=1e-8)

    @pytest.mark.parametrize("ratio", [0.01, 1.0, 100.0])
    def test_grid_path(self, ratio):
        s = 1.0
        m = mol(ratio * s)
        spec = make_gaussian_coherent(W0, s)
        assert tpa_coherent(spec, m, grid_size=4096) == pytest.approx(tpa_coherent_gaussian(1.0, s, m), abs=0, rel=1e-6)

    def test_limits(self):
        s = 1.0
        broad, narrow = mol(100 * s), mol(s / 100)
        n = 3.0
        p_broad = tpa_coherent_gaussian(n, s, broad)
        p_narrow = tpa_coherent_gaussian(n, s, narrow)
        assert p_broad == pytest.approx(n**2 * COUPLING * 2 * s / (math.sqrt(math.pi) * 100 * s), abs=0, rel=0.03)
        assert p_narrow == pytest.approx(n**2 * COUPLING, abs=0, rel=0.03)

    @given(st.floats(0.01, 50.0))
    @settings(max_examples=25, deadline=None)
    def test_n_squared(self, n):
        m = mol(0.7)
        base = tpa_coherent(make_gaussian_coherent(W0, 1.0, 1.0), m)
        assert tpa_coherent(make_gaussian_coherent(W0, 1.0, n), m) == pytest.approx(n * n * base, abs=0, rel=1e-12)

    def test_single_photon_cannot_absorb_two(self):
        assert tpa_coherent(make_single_photon(W0, 1.0), mol(1.0)) == 0.0

    def test_detuning_lowers(self):
        spec = make_gaussian_coherent(W0, 1.0)
        assert tpa_coherent(spec, mol(0.5, detuning=2.0)) < tpa_coherent(spec, mol(0.5))

    def test_closed_form_refuses_detuning(self):
        with pytest.raises(ValueError):
            tpa_coherent_gaussian(1.0, 1.0, mol(1.0, detuning=1.0), omega0=W0)

    def test_longpulse_matches_broad_line(self):
        # gamma >> sigma: 2 coupling / gamma int |A|^4 dt
        s, g = 0.01, 10.0
        m = mol(g)
        spec = make_gaussian_coherent(W0, s, n_photons=2.0)
        t = np.linspace(-600, 600, 20001)
        p = tpa_coherent_longpulse(t, spec.envelope(t), m, W0)
        assert p == pytest.approx(2 * COUPLING / g * gaussian_envelope_fourth_moment(2.0, s), abs=0, rel=1e-6)
        assert p == pytest.approx(tpa_coherent_gaussian(2.0, s, m), abs=0, rel=1e-3)

    def test_longpulse_not_quasi_monochromatic(self):
        t = np.linspace(-10, 10, 2001)
        a = make_gaussian_coherent(W0, 1.0).envelope(t)
        with pytest.warns(ValidityWarning):
            warnings.simplefilter("always")
            tpa_coherent_longpulse(t, a, mol(0.1), W0)

    def test_impulsive_matches_closed_form(self):
        s = 50.0
        m = mol(0.01)
        spec = make_gaussian_coherent(W0, s, n_photons=2.0)
        t = np.linspace(-0.2, 0.2, 4001)
        r = tpa_coherent_impulsive(t, spec.envelope(t), m)
        assert r.probability == pytest.approx(4 * COUPLING, abs=0, rel=1e-9)
        assert r.probability == pytest.approx(tpa_coherent_gaussian(2.0, s, m), abs=0, rel=1e-3)
        assert not r.zero_pi

    def test_zero_pi_pulse(self):
        # a +-pi/4 phase step makes A(t)^2 odd: int A^2 dt = 0 while int |A|^2 dt > 0
        t = np.linspace(-0.2, 0.2, 4000)
        a = np.exp(-(50 * t) ** 2) * np.exp(0.25j * math.pi * np.sign(t))
        ref = tpa_coherent_impulsive(t, np.abs(a), mol(0.01)).probability
        r = tpa_coherent_impulsive(t, a, mol(0.01))
        assert r.zero_pi
        assert r.probability <= 1e-10 * ref


def _random_jsa(seed, n=256, half=8.0):
    """Symmetric smooth JSA on a grid centred on W0: a few random complex Gaussians."""
    rng = np.random.default_rng(seed)
    ax = W0 + np.linspace(-half, half, n)
    a, b = np.meshgrid(ax - W0, ax - W0, indexing="ij")
    v = np.zeros((n, n), complex)
    for _ in range(3):
        c = rng.normal(0, 1.0, 2)
        w = rng.uniform(0.6, 1.5, 2)
        rho = rng.uniform(-0.7, 0.7)
        amp = rng.normal() + 1j * rng.normal()
        qa, qb = (a - c[0]) / w[0], (b - c[1]) / w[1]
        v += amp * np.exp(-(qa * qa + qb * qb - 2 * rho * qa * qb) / 4 + 0.3j * rng.normal() * qa * qb)
    v = 0.5 * (v + v.T)
    g = SpectralGrid2D(ax, ax, v)
    return make_jsa_grid(W0, g, 0.01, normalize=True)


class TestEppTPA:
    @pytest.mark.parametrize("gr", [0.01, 0.3, 1.0, 10.0, 100.0])
    @pytest.mark.parametrize("br", [2.0, 20.0])
    def test_closed_form_vs_quadrature(self, gr, br):
        sn = 1.0
        m = mol(gr * sn)
        psi = make_jsa_gaussian(W0, sn, br * sn, 0.01)
        assert tpa_epp(psi, m) == pytest.approx(tpa_epp_gaussian(0.01, sn, br * sn, m), abs=0, rel=1e-8)

    def test_grid_path(self):
        sn, sb = 1.0, 5.0
        m = mol(1.0)
        psi = make_jsa_gaussian(W0, sn, sb, 0.01)
        assert tpa_epp(psi, m, grid_size=512) == pytest.approx(tpa_epp_gaussian(0.01, sn, sb, m), abs=0, rel=1e-3)

    def test_limits(self):
        sn, sb, e2 = 1.0, 30.0, 0.01
        p_b = tpa_epp_gaussian(e2, sn, sb, mol(100 * sn))
        p_n = tpa_epp_gaussian(e2, sn, sb, mol(sn / 100))
        assert p_b == pytest.approx(e2 * 4 * COUPLING * 2 / math.sqrt(math.pi) * math.sqrt(2) * sb / (100 * sn), abs=0, rel=0.03)
        assert p_n == pytest.approx(e2 * 4 * COUPLING * 2 * sb / sn, abs=0, rel=0.03)

    @given(st.floats(1e-4, 0.1))
    @settings(max_examples=20, deadline=None)
    def test_linear_in_eps2(self, e2):
        m = mol(0.7)
        base = tpa_epp(make_jsa_gaussian(W0, 1.0, 4.0, 0.01), m)
        assert tpa_epp(make_jsa_gaussian(W0, 1.0, 4.0, e2), m) == pytest.approx(base * e2 / 0.01, abs=0, rel=1e-12)

    def test_separable_gaussian(self):
        # phi0 x phi0: K = exp(-x^2/8 sigma^2), same spectral factor as the coherent state
        s = 1.0
        m = mol(0.8)
        psi = make_jsa_separable(make_gaussian_coherent(W0, s), 0.01)
        assert tpa_epp(psi, m) == pytest.approx(4 * 0.01 * COUPLING * erfcx(0.8 / (2 * s)), abs=0, rel=1e-8)
        assert tpa_epp(psi, m, grid_size=4096) == pytest.approx(tpa_epp(psi, m), abs=0, rel=1e-5)

    def test_raw_type2_refused(self):
        ax = np.linspace(W0 - 8, W0 + 8, 65)
        g = SpectralGrid2D(ax, ax, np.outer(gaussian_shape(ax - W0 - 1, 1.0), gaussian_shape(ax - W0, 1.0)))
        raw = make_jsa_type2(W0, g, 0.01, normalize=True)
        with pytest.raises(SymmetryError):
            tpa_epp(raw, mol(1.0))

    def test_type2_symmetric_input_equivalence(self):
        psi = _random_jsa(3, n=128)
        raw = make_jsa_type2(W0, psi.grid, psi.eps2)
        m = mol(0.9)
        a, b = tpa_epp(psi, m), tpa_epp(symmetrize_type2(raw), m)
        assert abs(a - b) <= 1e-12 * a

    def test_type2_diagonal_projection_unchanged(self):
        # K is a sum along antidiagonals, which a transpose maps onto themselves
        ax = np.linspace(W0 - 8, W0 + 8, 129)
        g = SpectralGrid2D(ax, ax, np.outer(gaussian_shape(ax - W0 - 1, 0.7), gaussian_shape(ax - W0 + 0.5, 1.3)))
        raw = make_jsa_type2(W0, g, 0.01, normalize=True)
        m = mol(0.9)
        direct = 4 * 0.01 * COUPLING * lorentz_overlap(_epp_model(raw), m, W0, tol=1e-7)
        assert tpa_epp(symmetrize_type2(raw), m) == pytest.approx(direct, abs=0, rel=1e-10)

    def test_antisymmetric_type2_does_not_absorb(self):
        ax = np.linspace(W0 - 8, W0 + 8, 65)
        v = np.outer(gaussian_shape(ax - W0 - 1, 1.0), gaussian_shape(ax - W0 + 1, 1.0))
        g = SpectralGrid2D(ax, ax, v - v.T)
        raw = make_jsa_type2(W0, g, 0.01, normalize=True)
        assert tpa_epp(symmetrize_type2(raw), mol(1.0)) == 0.0


class TestImpulsiveEpp:
    def test_gaussian_pump_k0(self):
        psi = make_jsa_gaussian(W0, 1.0, 4.0, 0.01)
        kt = impulsive_amplitude(psi, "time", 512)
        assert kt == pytest.approx(impulsive_amplitude(psi, "frequency", 512), abs=0, rel=1e-10)
        assert kt == pytest.approx(complex(k_psi(psi, 0.0)), abs=0, rel=1e-4)

    @pytest.mark.parametrize("seed", [0, 1])
    def test_frequency_vs_time(self, seed):
        psi = _random_jsa(seed)
        m = mol(0.001)
        pf = tpa_epp_impulsive(psi, m, "frequency")
        pt = tpa_epp_impulsive(psi, m, "time")
        assert pt == pytest.approx(pf, abs=0, rel=1e-4)

    def test_time_diagonal_grid_check(self):
        ax = np.linspace(W0 - 8.3, W0 + 8.0, 64)
        g = SpectralGrid2D(ax, ax, np.outer(gaussian_shape(ax - W0, 1.0), gaussian_shape(ax - W0, 1.0)))
        psi = make_jsa_grid(W0, g, 0.01, normalize=True)
        with pytest.raises(ValueError):
            pair_time_diagonal(psi, 64)

    def test_narrow_line_limit(self):
        # gamma << sigma_n: the impulsive result equals the full quadrature
        psi = make_jsa_gaussian(W0, 1.0, 4.0, 0.01)
        m = mol(1e-4)
        assert tpa_epp_impulsive(psi, m) == pytest.approx(tpa_epp(psi, m), abs=0, rel=1e-3)


class TestDispersion:
    def test_analytic_k(self):
        # closed-form K under dispersion vs the grid line integral
        psi = apply_dispersion(make_jsa_gaussian(W0, 1.0, 4.0, 0.01), 0.02)
        x = np.array([-1.0, 0.0, 0.7])
        assert np.allclose(k_psi(psi, x, grid_size=1024), k_psi(psi, x), rtol=1e-3, atol=1e-6)

    @pytest.mark.parametrize("d", [0.0, 0.005, 0.02])
    def test_grid_vs_analytic(self, d):
        psi = make_jsa_gaussian(W0, 1.0, 4.0, 0.01)
        m = mol(0.5)
        a = tpa_epp_dispersed(psi, d, m, "analytic")
        g = tpa_epp_dispersed(psi, d, m, "grid", grid_size=512)
        assert g == pytest.approx(a, abs=0, rel=1e-3)

    def test_closed_form_attenuation(self):
        m = mol(0.5)
        full = tpa_epp_gaussian(0.01, 1.0, 4.0, m)
        assert tpa_epp_gaussian(0.01, 1.0, 4.0, m, gdd=0.1) == pytest.approx(full / math.sqrt(1 + 16 * 0.01 * 256))

    def test_separable_dispersion_quadrature(self):
        # coherent-like separable state: dispersion lowers K(x) but the closed form and grid agree
        psi = apply_dispersion(make_jsa_separable(make_gaussian_coherent(W0, 1.0), 0.01), 0.3)
        m = mol(0.5)
        assert tpa_epp(psi, m, grid_size=4096) == pytest.approx(tpa_epp(psi, m), abs=0, rel=1e-4)

    def test_refuses_predispersed(self):
        psi = apply_dispersion(make_jsa_gaussian(W0, 1.0, 4.0, 0.01), 0.1)
        with pytest.raises(ValueError):
            tpa_epp_dispersed(psi, 0.1, mol(1.0))


def test_kcoh_grid_vs_closed_form():
    s = 1.3
    spec = make_gaussian_coherent(W0, s)
    x = np.linspace(-4, 4, 9)
    assert np.allclose(k_coh(spec, x, grid_size=4096), k_coh(spec, x), atol=1e-8)


def test_kcoh_sampled_amplitude():
    w = np.linspace(W0 - 10, W0 + 10, 2001)
    spec = amplitude_from_samples(W0, w, gaussian_shape(w - W0, 1.0), normalize=True)
    assert abs(k_coh(spec, 0.0)) == pytest.approx(1.0, abs=0, rel=1e-6)
