"""Run every named preset and tabulate computed against published figures."""
import argparse
import json
import time

from etpa.presets import PRESETS, run_preset


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--json", action="store_true", help="dump the full reports instead of a table")
    args = ap.parse_args(argv)

    reports = {}
    print(f"{'preset':<22} {'quantity':<28} {'computed':>11} {'published':>11}  status")
    for name in PRESETS:
        t0 = time.perf_counter()
        rep = run_preset(name)
        dt = time.perf_counter() - t0
        reports[name] = rep
        for c in rep["comparisons"]:
            status = "ok" if c["within"] else "outside tolerance"
            print(f"{name:<22} {c['quantity']:<28} {c['computed']:>11.4g} {c['published']:>11.4g}  {status} ({dt * 1e3:.1f} ms)")
    if args.json:
        print(json.dumps(reports, indent=2, default=float))


if __name__ == "__main__":
    main()
