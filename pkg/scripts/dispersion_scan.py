"""Attenuation of entangled-pair absorption by group-delay dispersion.

Compares the closed-form factor 1/sqrt(1 + 16 D^2 sigma_b^4) with the
absorption probability computed on a dispersed 2-D grid.
"""
import argparse
import math
import warnings

import numpy as np

from etpa.absorption import Molecule, tpa_epp_dispersed
from etpa.lightstates import ValidityWarning, dispersion_attenuation, effective_sigma_b, make_jsa_gaussian
from etpa.rates import omega_from_wavelength


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sigma-b", type=float, default=2.5e13, help="rad/s")
    ap.add_argument("--sigma-n", type=float, default=2.5e13 / 4, help="rad/s, sets the grid extent")
    ap.add_argument("--max-gdd", type=float, default=1e5, help="fs^2")
    ap.add_argument("--steps", type=int, default=11)
    ap.add_argument("--no-grid", action="store_true")
    args = ap.parse_args(argv)

    w0 = omega_from_wavelength(1064e-9)
    m = Molecule(omega_fg=2 * w0, gamma_fg=math.pi * 1e13, coupling=1e-20)
    psi = make_jsa_gaussian(w0, args.sigma_n, args.sigma_b, 0.01)
    print(f"{'D (fs^2)':>10} {'16D^2sb^4':>11} {'1/att':>9} {'sb_eff':>10} {'grid/analytic-1':>16}")
    for d_fs2 in np.linspace(0.0, args.max_gdd, args.steps):
        d = d_fs2 * 1e-30
        att = dispersion_attenuation(args.sigma_b, d)
        k = 16 * d * d * args.sigma_b**4
        dev = ""
        if not args.no_grid:
            n = 512 if k <= 1e3 else 1024
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ValidityWarning)
                a = tpa_epp_dispersed(psi, d, m, "analytic")
                g = tpa_epp_dispersed(psi, d, m, "grid", grid_size=n)
            dev = f"{g / a - 1:.2e}"
        print(f"{d_fs2:>10.4g} {k:>11.4g} {1 / att:>9.2f} {effective_sigma_b(args.sigma_b, d):>10.3e} {dev:>16}")


if __name__ == "__main__":
    main()
