"""Scenario files: TOML with unit-suffixed scalars.

Example::

    [light]
    kind = "epp"
    power = "20 nW"
    wavelength = "1064 nm"
    bandwidth = "1e13 Hz"
    chi = 1
    window = "1 ns"

    [molecule]
    sigma2 = "9 GM"
    linewidth_fwhm = "10 THz"

    [geometry]
    area = "1e-6 cm^2"

    [sample]
    concentration = "2 mM"
    path_length = "1 cm"

    [detection]
    eta = 0.01

Dimensional keys must carry a unit; dimensionless keys take bare numbers.
Unknown sections or keys are rejected.
"""
from __future__ import annotations

import re
import sys
from dataclasses import dataclass

from .absorption import BeamGeometry, Molecule
from .rates import LightSource, Sample, Scenario, flux_from_power, omega_from_wavelength
from .units import UnitParseError, dims_of, fwhm_hz_to_gamma, parse_quantity

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class ScenarioError(ValueError):
    """Invalid scenario; ``key`` and ``line`` locate the problem when known."""

    def __init__(self, message, key=None, line=None, path=None):
        where = ""
        if path:
            where += f"{path}"
        if line:
            where += f":{line}"
        super().__init__(f"{where}: {message}" if where else message)
        self.reason = message
        self.key = key
        self.line = line
        self.path = path

    def as_dict(self):
        return {"error": self.reason, "key": self.key, "line": self.line, "file": self.path and str(self.path)}


# key -> expected unit dimension (None: dimensionless number; "str": string)
SCHEMA = {
    "light": {
        "kind": "str",
        "power": "W",
        "flux": "/s",
        "wavelength": "m",
        "bandwidth": "/s",
        "chi": None,
        "sigma_b": "/s",
        "sigma_n": "/s",
        "dispersion": "s^2",
        "comparator_flux": "/s",
        "comparator_power": "W",
        "window": "s",
    },
    "molecule": {
        "name": "str",
        "sigma2": "m^4 s",
        "coupling": None,
        "gamma": "/s",
        "linewidth_fwhm": "/s",
        "detuning": "/s",
    },
    "geometry": {"area": "m^2", "index": None},
    "sample": {"concentration": "m^-3", "path_length": "m"},
    "detection": {"eta": None},
    "sweep": {"parameter": "str", "start": "any", "stop": "any", "steps": None, "spacing": "str"},
}
REQUIRED = {
    "light": ("kind", "wavelength"),
    "molecule": (),
    "geometry": ("area",),
    "sample": ("concentration", "path_length"),
}
DEFAULT_WINDOW = 1e-9


def _key_lines(text):
    lines, section = {}, None
    for n, raw in enumerate(text.splitlines(), 1):
        s = raw.split("#", 1)[0].strip()
        m = re.match(r"^\[\s*([A-Za-z0-9_.-]+)\s*\]$", s)
        if m:
            section = m.group(1)
            lines.setdefault((section, None), n)
            continue
        m = re.match(r"^([A-Za-z0-9_.-]+)\s*=", s)
        if m:
            key = m.group(1)
            if "." in key and section is None:
                sec, key = key.split(".", 1)
                lines[(sec, key)] = n
            else:
                lines[(section, key)] = n
    return lines


def convert_value(section, key, raw):
    """Check one raw value against the schema and return it in SI (or as str)."""
    expected = SCHEMA[section][key]
    full = f"{section}.{key}"
    if expected == "str":
        if not isinstance(raw, str):
            raise ScenarioError(f"{full} must be a string", full)
        return raw
    if expected == "any":
        return raw
    if isinstance(raw, bool) or not isinstance(raw, (int, float, str)):
        raise ScenarioError(f"{full} must be a number or a unit-suffixed string", full)
    try:
        q = parse_quantity(raw)
    except UnitParseError as exc:
        raise ScenarioError(f"{full}: {exc}", full) from None
    if expected is None:
        if q.dims != (0, 0, 0):
            raise ScenarioError(f"{full} is dimensionless; got {raw!r}", full)
        return q.value
    if isinstance(raw, (int, float)) or q.dims == (0, 0, 0) and dims_of(expected) != (0, 0, 0):
        raise ScenarioError(f"{full} needs an explicit unit (expected [{expected}]), got {raw!r}", full)
    if q.dims != dims_of(expected):
        raise ScenarioError(f"{full} has the wrong dimension for [{expected}]: {raw!r}", full)
    return q.value


def parse_override(text):
    """'detection.eta=0.02' -> ('detection', 'eta', raw value)."""
    if "=" not in text:
        raise ScenarioError(f"override {text!r} is not of the form section.key=value")
    path, value = (p.strip() for p in text.split("=", 1))
    if "." not in path:
        raise ScenarioError(f"override key {path!r} must be section.key", path)
    section, key = path.split(".", 1)
    value = value.strip("\"'")
    try:
        raw = float(value)
    except ValueError:
        raw = value
    return section, key, raw


def load_text(text, path=None, overrides=()):
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ScenarioError(f"syntax error: {exc}", line=int(m.group(1)) if m else None, path=path) from None
    lines = _key_lines(text)
    for ov in overrides:
        sec, key, raw = parse_override(ov)
        data.setdefault(sec, {})[key] = raw
    try:
        values = validate(data)
        return build_scenario(values, name=str(path or "")), values
    except ScenarioError as exc:
        line = None
        if exc.key and "." in exc.key:
            sec, key = exc.key.split(".", 1)
            line = lines.get((sec, key)) or lines.get((sec, None))
        raise ScenarioError(exc.reason, exc.key, line, path) from None


def load_scenario(path, overrides=()):
    """Parse a scenario file; returns (Scenario, validated SI values by section)."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return load_text(text, path, overrides)


def validate(data):
    out = {}
    for section, body in data.items():
        if section not in SCHEMA:
            raise ScenarioError(f"unknown section [{section}]; expected one of {sorted(SCHEMA)}", section)
        if not isinstance(body, dict):
            raise ScenarioError(f"[{section}] must be a table", section)
        out[section] = {}
        for key, raw in body.items():
            if key not in SCHEMA[section]:
                raise ScenarioError(
                    f"unknown key {section}.{key}; valid keys: {', '.join(SCHEMA[section])}", f"{section}.{key}"
                )
            out[section][key] = convert_value(section, key, raw)
    missing = [f"{s}.{k}" for s, keys in REQUIRED.items() for k in keys if k not in out.get(s, {})]
    if missing:
        raise ScenarioError(f"missing required field(s): {', '.join(missing)}", missing[0])
    return out


def _one_of(sec, a, b, section):
    if (a in sec) == (b in sec):
        raise ScenarioError(f"give exactly one of {section}.{a} or {section}.{b}", f"{section}.{a}")
    return a if a in sec else b


def build_scenario(v, name=""):
    light_v, mol_v = v["light"], v.get("molecule", {})
    wl = light_v["wavelength"]
    omega0 = omega_from_wavelength(wl)
    which = _one_of(light_v, "power", "flux", "light")
    flux = flux_from_power(light_v["power"], wl) if which == "power" else light_v["flux"]
    comp = light_v.get("comparator_flux")
    if "comparator_power" in light_v:
        comp = flux_from_power(light_v["comparator_power"], wl)
    try:
        light = LightSource(
            kind=light_v["kind"],
            flux=flux,
            wavelength=wl,
            bandwidth=light_v.get("bandwidth"),
            chi=light_v.get("chi"),
            sigma_b=light_v.get("sigma_b"),
            sigma_n=light_v.get("sigma_n"),
            dispersion=light_v.get("dispersion", 0.0),
            comparator_flux=comp,
        )
    except ValueError as exc:
        raise ScenarioError(str(exc), "light.kind") from None
    geo = BeamGeometry(omega0=omega0, area=v["geometry"]["area"], n=v["geometry"].get("index", 1.0))
    wkey = _one_of(mol_v, "gamma", "linewidth_fwhm", "molecule")
    # a full width quoted in Hz: 2 gamma / 2 pi = fwhm
    gamma = mol_v["gamma"] if wkey == "gamma" else fwhm_hz_to_gamma(mol_v["linewidth_fwhm"])
    ckey = _one_of(mol_v, "sigma2", "coupling", "molecule")
    try:
        mol = Molecule(
            omega_fg=2 * omega0 + mol_v.get("detuning", 0.0),
            gamma_fg=gamma,
            geometry=geo,
            **{ckey: mol_v[ckey]},
        )
    except ValueError as exc:
        raise ScenarioError(str(exc), f"molecule.{ckey}") from None
    sample = Sample(v["sample"]["concentration"], v["sample"]["path_length"])
    eta = v.get("detection", {}).get("eta", 1.0)
    if not 0 <= eta <= 1:
        raise ScenarioError("detection.eta must lie in [0, 1]", "detection.eta")
    window = light_v.get("window", DEFAULT_WINDOW)
    try:
        return Scenario(light=light, molecule=mol, geometry=geo, window=window, sample=sample, eta_det=eta, name=name)
    except ValueError as exc:
        raise ScenarioError(str(exc), "light.window") from None


@dataclass(frozen=True)
class SweepSpec:
    section: str
    key: str
    start: float
    stop: float
    steps: int
    spacing: str = "log"

    def values(self):
        import numpy as np

        if self.steps < 2:
            raise ScenarioError("a sweep needs at least two steps", "sweep.steps")
        if self.spacing == "log":
            if not (self.start > 0 and self.stop > 0):
                raise ScenarioError("log spacing needs positive end points", "sweep.start")
            return list(np.geomspace(self.start, self.stop, self.steps))
        if self.spacing == "linear":
            return list(np.linspace(self.start, self.stop, self.steps))
        raise ScenarioError(f"sweep spacing must be 'log' or 'linear', got {self.spacing!r}", "sweep.spacing")


def make_sweep(parameter, start, stop, steps, spacing="log"):
    """Sweep over ``section.key``; end points are parsed with that key's unit rules."""
    if "." not in parameter:
        raise ScenarioError(f"sweep parameter {parameter!r} must be section.key", "sweep.parameter")
    section, key = parameter.split(".", 1)
    if section not in SCHEMA or key not in SCHEMA[section] or SCHEMA[section][key] in ("str", "any"):
        raise ScenarioError(f"{parameter} is not a numeric scenario field", "sweep.parameter")
    lo = convert_value(section, key, start)
    hi = convert_value(section, key, stop)
    return SweepSpec(section, key, lo, hi, int(steps), spacing)


def sweep_from_values(values, raw_sweep=None):
    sw = raw_sweep or {}
    if not sw:
        return None
    return make_sweep(sw["parameter"], sw["start"], sw["stop"], sw.get("steps", 5), sw.get("spacing", "log"))


def format_si(value, unit_dims):
    """Render an SI value as a string the parser reads back exactly."""
    value = float(value)
    return f"{value!r} {unit_dims}" if unit_dims else repr(value)


SI_UNIT = {
    "W": "W", "/s": "/s", "m": "m", "s^2": "s^2", "s": "s", "m^4 s": "m^4 s", "m^2": "m^2", "m^-3": "m^-3",
}


def as_raw(section, key, si_value):
    """SI value of a schema key back into a string ``convert_value`` accepts."""
    expected = SCHEMA[section][key]
    if expected is None:
        return si_value
    return format_si(si_value, SI_UNIT[expected])
