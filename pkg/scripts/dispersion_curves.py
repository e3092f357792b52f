"""Lowest-root dispersion curves a(alpha) for three substrates, plus alpha_cr.

Writes one directory per substrate under ``results/dispersion``.
"""

import argparse

from cablewaves.cli import cmd_dispersion
from cablewaves.emit import emit
from cablewaves.experiment import build_spec

SUBSTRATES = [(30, 1), (1, 2), (1, 10)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/dispersion")
    ap.add_argument("--count", type=int, default=99, help="alpha samples in (0, 1)")
    args = ap.parse_args()
    for k1, k2 in SUBSTRATES:
        spec = build_spec("dispersion", {
            "k1": str(k1), "k2": str(k2), "alpha-min": "0.01", "alpha-max": "0.99",
            "alpha-count": str(args.count), "output": f"{args.out}/k1_{k1}_k2_{k2}"})
        tables, summary = cmd_dispersion(spec)
        emit(tables, spec, summary)
        print(f"k1={k1} k2={k2}: alpha_cr={summary['alpha_cr']:.6f} -> {spec.output}")


if __name__ == "__main__":
    main()
