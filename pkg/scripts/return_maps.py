"""Return maps at x0 = 5 for the two stability parameter sets.

For each of (k1, k2) = (1, 1) and (1, 5), runs the unperturbed wave and three
boundary perturbations, then prints the orbit metrics per epsilon.
"""

import argparse

from cablewaves.emit import emit, table
from cablewaves.experiment import build_spec
from cablewaves.stability import orbit_metrics
from cablewaves.verification import RETURN_EPS, return_map_campaign


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/return_maps")
    args = ap.parse_args()
    for k1, k2 in ((1, 1), (1, 5)):
        _, base, fixed, loops = return_map_campaign(k1, k2)
        series = {0.0: base, **loops}
        rows = [(eps, t, f, fd) for eps, s in series.items()
                for t, (f, fd) in zip(s.times, s.samples)]
        spec = build_spec("stability", {"k1": str(k1), "k2": str(k2),
                                        "output": f"{args.out}/k1_{k1}_k2_{k2}"})
        emit([table("return_map", ("epsilon", "time", "f", "fdot"), *zip(*rows))], spec,
             {"epsilons": list(RETURN_EPS)})
        print(f"k1={k1} k2={k2} fixed point {fixed.centroid}, scatter {fixed.mean_radius:.2e}")
        for eps, s in loops.items():
            m = orbit_metrics(s)
            print(f"k1={k1} k2={k2} eps={eps:.3f}  mean radius {m.mean_radius:.3e}  "
                  f"closure {m.closure:.3f}")


if __name__ == "__main__":
    main()
