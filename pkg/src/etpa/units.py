"""Unit-tagged scalars and parsing of unit-suffixed strings.

Quantities carry integer exponents of (m, kg, s).  Angles and counts
(rad, photons, molecules) are dimensionless, and Hz is taken as 1/s without a
2 pi, matching how bandwidths are quoted: a "1e13 Hz" bandwidth is used as
1e13 per second.  Convert spectral line widths with ``fwhm_hz_to_gamma``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

from scipy import constants as _c

DIMLESS = (0, 0, 0)
_DIM_NAMES = ("m", "kg", "s")


class DimensionError(TypeError):
    pass


class UnitParseError(ValueError):
    pass


def _fmt_dims(dims):
    parts = [f"{n}^{e}" if e != 1 else n for n, e in zip(_DIM_NAMES, dims) if e]
    return " ".join(parts) or "1"


@dataclass(frozen=True)
class Quantity:
    value: float
    dims: tuple = DIMLESS

    def _same(self, other, op):
        if not isinstance(other, Quantity):
            other = Quantity(other)
        if other.dims != self.dims:
            raise DimensionError(f"cannot {op} [{_fmt_dims(self.dims)}] and [{_fmt_dims(other.dims)}]")
        return other

    def __add__(self, other):
        return Quantity(self.value + self._same(other, "add").value, self.dims)

    __radd__ = __add__

    def __sub__(self, other):
        return Quantity(self.value - self._same(other, "subtract").value, self.dims)

    def __rsub__(self, other):
        return Quantity(self._same(other, "subtract").value - self.value, self.dims)

    def __neg__(self):
        return Quantity(-self.value, self.dims)

    def __mul__(self, other):
        if isinstance(other, Quantity):
            return Quantity(self.value * other.value, tuple(a + b for a, b in zip(self.dims, other.dims)))
        return Quantity(self.value * other, self.dims)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Quantity):
            return Quantity(self.value / other.value, tuple(a - b for a, b in zip(self.dims, other.dims)))
        return Quantity(self.value / other, self.dims)

    def __rtruediv__(self, other):
        return Quantity(other / self.value, tuple(-a for a in self.dims))

    def __pow__(self, k):
        if int(k) != k:
            raise DimensionError("only integer powers of dimensional quantities are supported")
        return Quantity(self.value**k, tuple(a * int(k) for a in self.dims))

    def sqrt(self):
        if any(a % 2 for a in self.dims):
            raise DimensionError(f"square root of [{_fmt_dims(self.dims)}]")
        return Quantity(math.sqrt(self.value), tuple(a // 2 for a in self.dims))

    def __lt__(self, other):
        return self.value < self._same(other, "compare").value

    def __le__(self, other):
        return self.value <= self._same(other, "compare").value

    def __gt__(self, other):
        return self.value > self._same(other, "compare").value

    def __ge__(self, other):
        return self.value >= self._same(other, "compare").value

    def __float__(self):
        if self.dims != DIMLESS:
            raise DimensionError(f"[{_fmt_dims(self.dims)}] is not dimensionless")
        return float(self.value)

    def to(self, unit):
        """Numerical value in ``unit``."""
        factor, dims = parse_unit(unit)
        if dims != self.dims:
            raise DimensionError(f"cannot express [{_fmt_dims(self.dims)}] in {unit!r}")
        return self.value / factor

    def __repr__(self):
        return f"Quantity({self.value!r}, [{_fmt_dims(self.dims)}])"


# ---------------------------------------------------------------------------
# unit table

_PREFIXES = {
    "f": 1e-15, "p": 1e-12, "n": 1e-9, "u": 1e-6, "µ": 1e-6, "m": 1e-3, "c": 1e-2,
    "": 1.0, "k": 1e3, "M": 1e6, "G": 1e9, "T": 1e12,
}
_PREFIXABLE = {
    "m": (1.0, (1, 0, 0)),
    "s": (1.0, (0, 0, 1)),
    "g": (1e-3, (0, 1, 0)),
    "W": (1.0, (2, 1, -3)),
    "J": (1.0, (2, 1, -2)),
    "Hz": (1.0, (0, 0, -1)),
    "M": (_c.N_A * 1e3, (-3, 0, 0)),  # mol/L as molecules per m^3
}
_PLAIN = {
    "rad": (1.0, DIMLESS),
    "photon": (1.0, DIMLESS),
    "photons": (1.0, DIMLESS),
    "molecule": (1.0, DIMLESS),
    "molecules": (1.0, DIMLESS),
    "events": (1.0, DIMLESS),
    "counts": (1.0, DIMLESS),
    "%": (1e-2, DIMLESS),
    "GM": (1e-58, (4, 0, 1)),  # 1e-50 cm^4 s / photon^2
    "L": (1e-3, (3, 0, 0)),
}

UNITS = dict(_PLAIN)
for _sym, (_f, _d) in _PREFIXABLE.items():
    for _p, _pf in _PREFIXES.items():
        UNITS.setdefault(_p + _sym, (_pf * _f, _d))
UNITS["mM"] = (1e-3 * _c.N_A * 1e3, (-3, 0, 0))

_SUPERSCRIPTS = str.maketrans("⁰¹²³⁴⁵⁶⁷⁸⁹⁻", "0123456789-")
_TOKEN = re.compile(r"^([A-Za-zµ%]+)(?:\^?(-?\d+))?$")
_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(.*?)\s*$")


def _parse_tokens(text, sign):
    factor, dims = 1.0, [0, 0, 0]
    for tok in re.split(r"[\s*·]+", text.strip()):
        if not tok:
            continue
        m = _TOKEN.match(tok)
        if not m:
            raise UnitParseError(f"cannot read unit token {tok!r}")
        sym, exp = m.group(1), int(m.group(2) or 1)
        if sym not in UNITS:
            raise UnitParseError(f"unknown unit {sym!r}")
        f, d = UNITS[sym]
        factor *= f ** (sign * exp)
        for i in range(3):
            dims[i] += sign * exp * d[i]
    return factor, dims


def parse_unit(text):
    """(factor to SI, dims) for a unit expression such as 'cm^4 s/photon^2' or '/s'."""
    text = text.translate(_SUPERSCRIPTS).replace("²", "2")
    parts = text.split("/")
    factor, dims = _parse_tokens(parts[0], +1)
    for den in parts[1:]:
        if not den.strip():
            raise UnitParseError(f"empty denominator in {text!r}")
        f, d = _parse_tokens(den, -1)
        factor *= f
        dims = [a + b for a, b in zip(dims, d)]
    return factor, tuple(dims)


def parse_quantity(text) -> Quantity:
    """'20 nW' -> Quantity(2e-8, W).  A bare number is dimensionless."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return Quantity(float(text))
    m = _NUMBER.match(str(text))
    if not m:
        raise UnitParseError(f"cannot read a number from {text!r}")
    value = float(m.group(1))
    if not m.group(2):
        return Quantity(value)
    factor, dims = parse_unit(m.group(2))
    return Quantity(value * factor, dims)


def has_unit(text):
    """True when ``text`` is a string carrying a unit after its number."""
    if not isinstance(text, str):
        return False
    m = _NUMBER.match(text)
    return bool(m and m.group(2))


def dims_of(unit):
    return parse_unit(unit)[1]


def fwhm_hz_to_gamma(fwhm_hz):
    """Half-width gamma (rad/s) of a line whose full width is fwhm_hz in Hz: 2 gamma / 2 pi = fwhm."""
    return math.pi * fwhm_hz


def constants_like(x):
    """(h, c) as Quantities if x is one, plain SI floats otherwise."""
    if isinstance(x, Quantity):
        return Quantity(_c.h, (2, 1, -1)), Quantity(_c.c, (1, 0, -1))
    return _c.h, _c.c
