"""Normalized extrema of the loaded wave across alpha for k1=1, k2=2.

The amplitude is singular at alpha_cr; rows within 0.05 of it are flagged.
"""

import argparse

from cablewaves.cli import cmd_extrema_sweep
from cablewaves.emit import emit
from cablewaves.experiment import build_spec


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/extrema")
    ap.add_argument("--count", type=int, default=91)
    args = ap.parse_args()
    spec = build_spec("extrema-sweep", {"k1": "1", "k2": "2", "p": "-0.01",
                                        "alpha-count": str(args.count), "output": args.out})
    tables, summary = cmd_extrema_sweep(spec)
    emit(tables, spec, summary)
    (tab,) = tables
    for row in tab.rows:
        alpha, _, lo, hi, near, status = row
        mark = " *" if near else ""
        print(f"alpha={alpha:.3f}  min={lo:+10.4f}  max={hi:+10.4f}  {status}{mark}")
    print(f"alpha_cr = {summary['alpha_cr']:.6f}")


if __name__ == "__main__":
    main()
