import math
from pathlib import Path

import pytest
from hypothesis import given, strategies as st
from scipy import constants

from etpa import config
from etpa.config import ScenarioError, SweepSpec, as_raw, convert_value, load_scenario, load_text, make_sweep
from etpa.units import DimensionError, Quantity, UnitParseError, fwhm_hz_to_gamma, has_unit, parse_quantity, parse_unit

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"

BASE = """\
[light]
kind = "epp"
power = "20 nW"
wavelength = "1064 nm"
bandwidth = "1e13 Hz"
chi = 1
window = "1 ps"

[molecule]
sigma2 = "9 GM"
linewidth_fwhm = "10 THz"

[geometry]
area = "1e-6 cm^2"

[sample]
concentration = "2 mM"
path_length = "1 cm"
"""


class TestUnits:
    @pytest.mark.parametrize(
        "text,value,dims",
        [
            ("20 nW", 20e-9, (2, 1, -3)),
            ("1064 nm", 1064e-9, (1, 0, 0)),
            ("1e-6 cm^2", 1e-10, (2, 0, 0)),
            ("1e13 Hz", 1e13, (0, 0, -1)),
            ("2 mM", 2 * constants.N_A, (-3, 0, 0)),
            ("9 GM", 9e-58, (4, 0, 1)),
            ("1e-50 cm^4 s/photon^2", 1e-58, (4, 0, 1)),
            ("5e4 fs^2", 5e-26, (0, 0, 2)),
            ("2.5e13 rad/s", 2.5e13, (0, 0, -1)),
            ("1e8 /s", 1e8, (0, 0, -1)),
            ("1 cm⁻³", 1e6, (-3, 0, 0)),
            ("3", 3.0, (0, 0, 0)),
            ("50 %", 0.5, (0, 0, 0)),
        ],
    )
    def test_parse(self, text, value, dims):
        qv = parse_quantity(text)
        assert qv.value == pytest.approx(value, abs=0, rel=1e-12)
        assert qv.dims == dims

    @pytest.mark.parametrize("bad", ["", "W", "3 furlongs", "1 m^x", "2 W/"])
    def test_parse_errors(self, bad):
        with pytest.raises(UnitParseError):
            parse_quantity(bad)

    def test_add_incompatible(self):
        with pytest.raises(DimensionError):
            parse_quantity("1 m") + parse_quantity("1 s")

    def test_compare_incompatible(self):
        with pytest.raises(DimensionError):
            parse_quantity("1 m") < parse_quantity("1 s")

    def test_to(self):
        assert parse_quantity("1 cm").to("mm") == pytest.approx(10.0)
        with pytest.raises(DimensionError):
            parse_quantity("1 cm").to("s")

    def test_sqrt(self):
        assert parse_quantity("4 m^2").sqrt().dims == (1, 0, 0)
        with pytest.raises(DimensionError):
            parse_quantity("4 m").sqrt()

    def test_float_of_dimensional(self):
        with pytest.raises(DimensionError):
            float(parse_quantity("1 s"))

    def test_has_unit(self):
        assert has_unit("3 nm") and not has_unit("3") and not has_unit(3.0)

    def test_fwhm(self):
        # full width in Hz f corresponds to a half-width gamma with 2 gamma / 2 pi = f
        assert fwhm_hz_to_gamma(10e12) == pytest.approx(math.pi * 1e13)

    @given(st.floats(1e-30, 1e30), st.sampled_from(["m", "nm", "s", "fs^2", "W", "cm^4 s", "/s", "mM"]))
    def test_round_trip_through_to(self, v, unit):
        qv = parse_quantity(f"{v!r} {unit}")
        assert qv.to(unit) == pytest.approx(v, abs=0, rel=1e-12)

    def test_parse_unit_factor(self):
        f, d = parse_unit("cm^4 s/photon^2")
        assert f == pytest.approx(1e-8) and d == (4, 0, 1)

    def test_quantity_dims_algebra(self):
        a = Quantity(2.0, (1, 0, -1))
        assert (a * a / Quantity(4.0, (2, 0, -2))).dims == (0, 0, 0)
        assert (1 / a).dims == (-1, 0, 1)
        assert (a**2).dims == (2, 0, -2)


class TestConfig:
    def test_load_base(self):
        s, values = load_text(BASE)
        assert s.light.kind == "epp"
        assert s.light.flux == pytest.approx(20e-9 * 1064e-9 / (constants.h * constants.c), abs=0, rel=1e-12)
        assert s.window == pytest.approx(1e-12)
        assert s.molecule.gamma_fg == pytest.approx(math.pi * 1e13)
        assert values["geometry"]["area"] == pytest.approx(1e-10)

    @pytest.mark.parametrize("path", sorted(SCENARIOS.glob("*.toml")))
    def test_shipped_scenarios_load(self, path):
        s, _ = load_scenario(path)
        assert s.name == str(path)

    def test_bare_number_needs_unit(self):
        text = BASE.replace('power = "20 nW"', "power = 2e-8")
        with pytest.raises(ScenarioError) as err:
            load_text(text, path="x.toml")
        assert err.value.key == "light.power"
        assert err.value.line == 3
        assert err.value.as_dict()["file"] == "x.toml"

    def test_wrong_dimension(self):
        with pytest.raises(ScenarioError, match="wrong dimension"):
            load_text(BASE.replace('"1064 nm"', '"1064 ns"'))

    def test_dimensionless_with_unit(self):
        with pytest.raises(ScenarioError, match="dimensionless"):
            load_text(BASE.replace("chi = 1", 'chi = "1 m"'))

    def test_unknown_key(self):
        with pytest.raises(ScenarioError) as err:
            load_text(BASE + "colour = 3\n")
        assert err.value.key == "sample.colour"
        assert err.value.line == len(BASE.splitlines()) + 1

    def test_unknown_section(self):
        with pytest.raises(ScenarioError, match="unknown section"):
            load_text(BASE + "[laser]\nx = 1\n")

    def test_missing_required(self):
        with pytest.raises(ScenarioError, match="geometry.area"):
            load_text(BASE.replace('area = "1e-6 cm^2"', ""))

    def test_one_of_power_flux(self):
        with pytest.raises(ScenarioError, match="exactly one"):
            load_text(BASE.replace('power = "20 nW"', 'power = "20 nW"\nflux = "1e11 /s"'))

    def test_one_of_sigma2_coupling(self):
        with pytest.raises(ScenarioError, match="exactly one"):
            load_text(BASE.replace('sigma2 = "9 GM"', ""))

    def test_syntax_error_line(self):
        with pytest.raises(ScenarioError) as err:
            load_text(BASE + "oops = = 1\n")
        assert err.value.line == len(BASE.splitlines()) + 1

    def test_eta_range(self):
        with pytest.raises(ScenarioError, match="eta"):
            load_text(BASE + "[detection]\neta = 1.5\n")

    def test_override(self):
        s, _ = load_text(BASE, overrides=["detection.eta=0.02", "light.chi=0.5"])
        assert s.eta_det == 0.02 and s.light.chi == 0.5

    def test_override_unit_string(self):
        s, _ = load_text(BASE, overrides=['light.power="40 nW"'])
        assert s.light.flux == pytest.approx(2 * load_text(BASE)[0].light.flux)

    def test_override_bad_form(self):
        with pytest.raises(ScenarioError):
            load_text(BASE, overrides=["detection"])

    def test_override_keeps_line_of_section(self):
        with pytest.raises(ScenarioError) as err:
            load_text(BASE, overrides=["light.power=3"])
        assert err.value.key == "light.power"


class TestSweep:
    def test_log_values(self):
        spec = make_sweep("light.flux", "1e9 /s", "1e13 /s", 5, "log")
        assert spec.values() == pytest.approx([1e9, 1e10, 1e11, 1e12, 1e13], abs=0, rel=1e-12)

    def test_linear_values(self):
        spec = make_sweep("light.dispersion", "0 fs^2", "1e5 fs^2", 3, "linear")
        assert spec.values() == pytest.approx([0.0, 5e-26, 1e-25], abs=1e-40)

    def test_unit_checked(self):
        with pytest.raises(ScenarioError):
            make_sweep("light.flux", "1 W", "2 W", 3)

    def test_not_numeric(self):
        with pytest.raises(ScenarioError):
            make_sweep("light.kind", "1", "2", 3)

    @pytest.mark.parametrize("spec", [SweepSpec("light", "flux", 1.0, 2.0, 1), SweepSpec("light", "flux", 0.0, 2.0, 3)])
    def test_invalid(self, spec):
        with pytest.raises(ScenarioError):
            spec.values()

    def test_from_file(self):
        _, values = load_scenario(SCENARIOS / "r6g_epp.toml")
        spec = config.sweep_from_values(values, values["sweep"])
        assert (spec.section, spec.key, spec.steps) == ("light", "flux", 5)

    @given(st.floats(1e-30, 1e30))
    def test_as_raw_round_trip(self, v):
        assert convert_value("light", "flux", as_raw("light", "flux", v)) == pytest.approx(v, abs=0, rel=1e-15)
