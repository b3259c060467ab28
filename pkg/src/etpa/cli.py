"""Command-line front end.

    etpa preset NAME | --list
    etpa run SCENARIO [--set section.key=value ...]
    etpa sweep SCENARIO [--parameter section.key --start A --stop B --steps N --spacing log|linear]
    etpa export-jsa --wavelength "1064 nm" --sigma-n ... --sigma-b ... --eps2 ... --output FILE

Relative scenario paths that do not exist are also looked up in the
directory named by ``ETPA_CONFIG_DIR``.  Failures print a JSON object with
an ``error`` field to stderr and exit non-zero.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from . import config, presets
from .lightstates import GRID_2D_POINTS, GRID_2D_WIDTHS, apply_dispersion, make_jsa_gaussian, write_jsa
from .rates import evaluate_scenario, format_report_text, omega_from_wavelength, report_scalars
from .units import dims_of, parse_quantity

CONFIG_DIR_ENV = "ETPA_CONFIG_DIR"
EXIT_INVALID = 2
EXIT_FAILED = 1


class CliError(Exception):
    def __init__(self, payload, code=EXIT_INVALID):
        super().__init__(payload.get("error"))
        self.payload = payload
        self.code = code


def resolve_path(path):
    p = Path(path)
    if p.exists() or p.is_absolute():
        return p
    base = os.environ.get(CONFIG_DIR_ENV)
    if base and (Path(base) / p).exists():
        return Path(base) / p
    return p


# ---------------------------------------------------------------------------
# output


def _csv_rows(rows):
    buf = io.StringIO()
    fields = list(rows[0])
    for r in rows[1:]:
        fields += [k for k in r if k not in fields]
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(float(v)) if isinstance(v, float) else v for k, v in r.items()})
    return buf.getvalue()


def render_report(rep, fmt):
    if fmt == "json":
        return json.dumps(rep, indent=2) + "\n"
    if fmt == "csv":
        return _csv_rows([report_scalars(rep)])
    text = format_report_text({k: v for k, v in rep.items() if k != "comparisons"})
    comps = rep.get("comparisons") or []
    if comps:
        text += "\n\npublished vs computed\n"
        for c in comps:
            dev = f"{c['deviation']:+.1%}" if c["mode"] == "relative" else f"x{c['deviation']:.3g}"
            flag = "ok" if c["within"] else "OUTSIDE TOLERANCE"
            text += f"  {c['quantity']:<28} computed {c['computed']:.4g}  published {c['published']:.4g}  {dev}  {flag}\n"
    return text if text.endswith("\n") else text + "\n"


def render_rows(rows, fmt):
    if fmt == "json":
        return json.dumps({"schema": "etpa.sweep/1", "rows": rows}, indent=2) + "\n"
    if fmt == "csv":
        return _csv_rows(rows)
    keys = list(rows[0])
    out = ["  ".join(f"{k:>14}" for k in keys)]
    for r in rows:
        out.append("  ".join(f"{r[k]:>14.6g}" if isinstance(r[k], float) else f"{r[k]!s:>14}" for k in keys))
    return "\n".join(out) + "\n"


def _emit(text, output):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# verbs


def cmd_preset(args):
    if args.list or not args.name:
        lines = [f"{name:<22} {desc}" for name, (_, desc) in presets.PRESETS.items()]
        _emit("\n".join(lines) + "\n", args.output)
        return 0
    try:
        rep = presets.run_preset(args.name)
    except presets.UnknownPreset:
        raise CliError({"error": f"unknown preset {args.name!r}", "valid": list(presets.PRESETS)}) from None
    _emit(render_report(rep, args.format), args.output)
    return 0


def _load(args, overrides=()):
    try:
        return config.load_scenario(resolve_path(args.scenario), overrides)
    except config.ScenarioError as exc:
        raise CliError(exc.as_dict()) from None
    except OSError as exc:
        raise CliError({"error": f"cannot read scenario: {exc.strerror}", "file": args.scenario}) from None


def cmd_run(args):
    scenario, _ = _load(args, args.set or ())
    rep = evaluate_scenario(scenario, tol=args.tol)
    _emit(render_report(rep, args.format), args.output)
    return 0


def sweep_rows(values, spec: config.SweepSpec, tol=1e-9):
    """One report per sweep point, in sweep order."""
    rows = []
    param = f"{spec.section}.{spec.key}"
    for x in spec.values():
        v = {s: dict(body) for s, body in values.items()}
        v.setdefault(spec.section, {})[spec.key] = float(x)
        if spec.section == "light" and spec.key in ("power", "flux"):
            v["light"].pop("flux" if spec.key == "power" else "power", None)
        try:
            rep = evaluate_scenario(config.build_scenario(v), tol=tol)
        except config.ScenarioError as exc:
            raise CliError(exc.as_dict()) from None
        rows.append({param: float(x), **report_scalars(rep)})
    return rows


def cmd_sweep(args):
    _, values = _load(args, args.set or ())
    try:
        if args.parameter:
            if args.start is None or args.stop is None:
                raise config.ScenarioError("--parameter needs --start and --stop", "sweep.start")
            spec = config.make_sweep(args.parameter, args.start, args.stop, args.steps, args.spacing)
        else:
            spec = config.sweep_from_values(values, values.get("sweep"))
            if spec is None:
                raise config.ScenarioError("no [sweep] section and no --parameter given", "sweep.parameter")
        rows = sweep_rows(values, spec, args.tol)
    except config.ScenarioError as exc:
        raise CliError(exc.as_dict()) from None
    _emit(render_rows(rows, args.format), args.output)
    return 0


def _si(text, unit, name):
    try:
        q = parse_quantity(text)
    except ValueError as exc:
        raise CliError({"error": f"--{name}: {exc}"}) from None
    if q.dims != dims_of(unit):
        raise CliError({"error": f"--{name} needs a unit compatible with {unit}, got {text!r}"})
    return q.value


def cmd_export_jsa(args):
    omega0 = omega_from_wavelength(_si(args.wavelength, "m", "wavelength"))
    try:
        psi = make_jsa_gaussian(omega0, _si(args.sigma_n, "/s", "sigma-n"), _si(args.sigma_b, "/s", "sigma-b"), args.eps2)
    except ValueError as exc:
        raise CliError({"error": str(exc)}) from None
    psi = apply_dispersion(psi, _si(args.dispersion, "s^2", "dispersion"))
    if not args.output:
        raise CliError({"error": "export-jsa needs --output"})
    write_jsa(args.output, psi.materialize(args.grid_size, args.n_widths))
    return 0


# ---------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="etpa", description="Two-photon absorption by coherent light and entangled pairs")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")
    common.add_argument("--tol", type=float, default=1e-9, help="quadrature tolerance")
    common.add_argument("--grid-size", type=int, default=GRID_2D_POINTS, help="points per axis of sampled JSAs")
    sub = p.add_subparsers(dest="verb", required=True)

    sp = sub.add_parser("preset", parents=[common], help="worked examples with published figures")
    sp.add_argument("name", nargs="?")
    sp.add_argument("--list", action="store_true")
    sp.set_defaults(func=cmd_preset)

    sp = sub.add_parser("run", parents=[common], help="evaluate a scenario file")
    sp.add_argument("scenario")
    sp.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE", help="override a scenario value")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("sweep", parents=[common], help="evaluate a scenario over a parameter range")
    sp.add_argument("scenario")
    sp.add_argument("--parameter", help="section.key to sweep (default: the file's [sweep] section)")
    sp.add_argument("--start")
    sp.add_argument("--stop")
    sp.add_argument("--steps", type=int, default=5)
    sp.add_argument("--spacing", choices=("log", "linear"), default="log")
    sp.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("export-jsa", parents=[common], help="write a Gaussian-pump JSA as a text matrix")
    sp.add_argument("--wavelength", required=True)
    sp.add_argument("--sigma-n", required=True)
    sp.add_argument("--sigma-b", required=True)
    sp.add_argument("--eps2", type=float, default=0.01)
    sp.add_argument("--dispersion", default="0 s^2")
    sp.add_argument("--n-widths", type=float, default=GRID_2D_WIDTHS)
    sp.set_defaults(func=cmd_export_jsa)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        sys.stderr.write(json.dumps(exc.payload) + "\n")
        return exc.code
    except (ValueError, ArithmeticError) as exc:
        sys.stderr.write(json.dumps({"error": str(exc), "type": type(exc).__name__}) + "\n")
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
