"""Command-line entry point.

Exit status: 0 success, 1 verification or run failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from typing import Sequence

import numpy as np

from .analytic import Substrate, limit_case, period_frequency, solve_single_wave
from .emit import Table, emit, table
from .experiment import COMMANDS, KEYS, ExperimentSpec, SpecError, build_spec, read_config
from .loaded import (CRITICAL_TOL, InadmissibleLoadError, LoadedWave, NoRootError,
                     alpha_critical, extrema, scan_roots, solve_loaded_wave)
from .simulator import InstabilityError, RunRecord, config_for_wave, run, run_loaded
from .stability import (Perturbation, envelope, floquet_map, orbit_metrics, perturbed_run,
                        return_map, wave_period)
from .verification import SCENARIOS

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
PROFILE_SAMPLES = 1001
DEFAULT_T_END = 80.0
RETURN_PERIODS = 34
NEAR_CRITICAL = 0.05


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SpecError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cablewaves", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for cmd in COMMANDS:
        p = sub.add_parser(cmd)
        p.add_argument("--config", help="key = value file; flags override it")
        for key, spec in KEYS.items():
            p.add_argument(f"--{key}", dest=key, default=None, metavar="VALUE", help=spec.help)
    v = sub.add_parser("verify")
    v.add_argument("--scenario", required=True, choices=[*SCENARIOS, "all"])
    return parser


def parse_spec(argv: Sequence[str]) -> ExperimentSpec | str:
    """Validated spec for an experiment command, or the scenario name for ``verify``."""
    args, extra = build_parser().parse_known_args(list(argv))
    if extra:
        raise SpecError(f"unknown key: {extra[0].lstrip('-')}")
    if args.command == "verify":
        return args.scenario
    raw: dict[str, str] = {}
    if args.config:
        file_cmd, raw = read_config(args.config)
        if file_cmd is not None and file_cmd != args.command:
            raise SpecError(f"invalid value: command: config file says {file_cmd!r}, "
                            f"command line says {args.command!r}")
    raw.update({k: getattr(args, k) for k in KEYS if getattr(args, k) is not None})
    return build_spec(args.command, raw)


def _substrate(spec: ExperimentSpec) -> Substrate:
    return Substrate(spec["k1"], spec["k2"])


def _wave(spec: ExperimentSpec):
    return solve_single_wave(_substrate(spec), spec["n"], spec["amplitude"], spec["L"], spec["v"])


# command handlers return (tables, summary)

def cmd_analytic(spec: ExperimentSpec):
    sub = _substrate(spec)
    if sub.k2 == 0.0:
        rep = limit_case(sub, "unilateral")
        return [table("limit", ("alpha_limit", "c_limit", "c2_limit", "exists"),
                      [rep.alpha_limit], [rep.c_limit], [rep.c2_limit], [rep.exists])], \
            {"limit": rep.which, "note": rep.note}
    wave = _wave(spec)
    xi = np.linspace(0.0, 1.0, PROFILE_SAMPLES)
    tau, omega = period_frequency(wave)
    summary = {"alpha": wave.alpha, "c": wave.c, "c2": wave.c**2, "a": wave.a, "b": wave.b,
               "tau": tau, "omega": omega, "c3": wave.amplitude,
               "compression_amplitude": wave.compression_amplitude}
    tabs = [table("profile", ("xi", "W", "dW_dxi"), xi, wave.profile(xi), wave.slope(xi)),
            table("summary", tuple(summary), *[[v] for v in summary.values()])]
    return tabs, summary


def cmd_dispersion(spec: ExperimentSpec):
    sub = _substrate(spec)
    acr = alpha_critical(sub)
    if spec["alpha"] is not None:
        scan = scan_roots(sub, spec["alpha"], spec["a-max"])
        roots = np.asarray(scan.roots)
        tabs = [table("roots", ("branch", "a", "b", "c"), range(len(roots)), roots,
                      roots * math.sqrt(sub.k2 / sub.k1), np.sqrt(1.0 + sub.k1 / roots**2)),
                table("poles", ("a",), scan.singularities)]
        return tabs, {"alpha": spec["alpha"], "alpha_cr": acr, "roots": len(roots),
                      "critical": scan.critical}
    alphas = np.linspace(spec["alpha-min"], spec["alpha-max"], spec["alpha-count"])
    a0, crit = [], []
    for al in alphas:
        scan = scan_roots(sub, float(al), spec["a-max"])
        a0.append(scan.critical_root if scan.critical else scan.roots[0])
        crit.append(scan.critical)
    a0 = np.asarray(a0)
    return [table("dispersion", ("alpha", "a0", "c0", "critical"), alphas, a0,
                  np.sqrt(1.0 + sub.k1 / a0**2), crit)], {"alpha_cr": acr}


def _sim_tables(rec: RunRecord) -> list[Table]:
    nt, npr = rec.probe_w.shape
    probes = table("probes", ("time", "x", "w", "wdot"), np.repeat(rec.times, npr),
                   np.tile(rec.probe_x, nt), rec.probe_w.ravel(), rec.probe_wdot.ravel())
    tabs = [probes]
    if rec.snapshots:
        ts = np.concatenate([np.full(rec.x.size, t) for t in rec.snapshot_times])
        tabs.append(table("snapshots", ("time", "x", "w"), ts, np.tile(rec.x, len(rec.snapshots)),
                          np.concatenate(rec.snapshots)))
    if rec.energy:
        e = rec.energy
        tabs.append(table("energy", ("time", "kinetic", "potential", "total", "boundary_flux",
                                     "boundary_work", "balance_residual"),
                          *[[getattr(r, f) for r in e] for f in
                            ("t", "kinetic", "potential", "total", "boundary_flux",
                             "boundary_work", "balance_residual")]))
    return tabs


def _sim_config(spec: ExperimentSpec, wave, t_end: float, probes=()):
    cfg = config_for_wave(wave, t_end, dx=spec["dx"], dt=spec["dt"])
    # short runs still need room for every probe
    reach = max(probes, default=0.0) + 2 * cfg.dx
    if reach > cfg.domain_length:
        cfg = replace(cfg, domain_length=math.ceil(reach / cfg.dx) * cfg.dx)
    return cfg


def _perturbation(spec: ExperimentSpec, omega: float) -> Perturbation:
    if spec["perturbation"] == "initial":
        return Perturbation.initial(spec["epsilon"])
    return Perturbation.boundary(spec["epsilon"], spec["omega1-ratio"] * omega)


def _simulate(spec: ExperimentSpec, wave, t_end: float, probes, snapshots):
    cfg = _sim_config(spec, wave, t_end, probes)
    _, omega = wave_period(wave)
    if spec["epsilon"] > 0.0:
        return perturbed_run(wave, _perturbation(spec, omega), cfg, probes=probes,
                             snapshot_times=snapshots, energy_every=spec["energy-every"])
    if isinstance(wave, LoadedWave):
        return run_loaded(cfg, wave, probes, snapshots, spec["energy-every"])
    return run(cfg, probes, snapshots, spec["energy-every"])


def _run_summary(rec: RunRecord) -> dict:
    out = {"dx": rec.config.dx, "dt": rec.config.dt, "domain_length": rec.config.domain_length,
           "steps": rec.config.n_steps}
    if rec.energy:
        out["integrated_balance_residual"] = rec.integrated_balance_residual()
    return out


def cmd_simulate(spec: ExperimentSpec):
    wave = _wave(spec)
    t_end = spec["t-end"] or DEFAULT_T_END
    rec = _simulate(spec, wave, t_end, spec["probes"], spec["snapshot-times"])
    summary = {"alpha": wave.alpha, "c": wave.c, **_run_summary(rec)}
    return _sim_tables(rec), summary


def cmd_simulate_loaded(spec: ExperimentSpec):
    sub = _substrate(spec)
    wave = solve_loaded_wave(sub, spec["p"], spec["alpha"], a_max=spec["a-max"],
                             L=spec["L"], v=spec["v"])
    t_end = spec["t-end"] or DEFAULT_T_END
    rec = _simulate(spec, wave, t_end, spec["probes"], spec["snapshot-times"])
    an_min, an_max = extrema(wave)
    summary = {"alpha_cr": alpha_critical(sub), "a": wave.a, "c": wave.c,
               "analytic_min_normalized": an_min, "analytic_max_normalized": an_max,
               **_run_summary(rec)}
    if rec.probe_w.size:
        settled = rec.times >= 0.7 * t_end
        f = rec.probe_w[settled]
        summary["simulated_min_normalized"] = float(f.min()) * sub.k1 / wave.p
        summary["simulated_max_normalized"] = float(f.max()) * sub.k2 / wave.p
    return _sim_tables(rec), summary


def cmd_stability(spec: ExperimentSpec):
    wave = _wave(spec)
    tau, omega = period_frequency(wave)
    x0, skip = spec["x0"], spec["skip"]
    t_end = spec["t-end"] or skip + RETURN_PERIODS * tau
    cfg = _sim_config(spec, wave, t_end, [x0])
    runs = {0.0: run(cfg, [x0], energy_every=0)}
    if spec["epsilon"] > 0.0:
        runs[spec["epsilon"]] = perturbed_run(wave, _perturbation(spec, omega), cfg, probes=[x0])
    rm_cols = ([], [], [], [])
    met_cols = ([], [], [], [], [], [])
    env_cols = ([], [], [])
    for eps, rec in runs.items():
        series = return_map(rec, x0, tau, skip)
        m = orbit_metrics(series)
        for col, vals in zip(rm_cols, ([eps] * len(series), series.times,
                                       series.samples[:, 0], series.samples[:, 1])):
            col.extend(vals)
        for col, val in zip(met_cols, (eps, m.centroid[0], m.centroid[1], m.mean_radius,
                                       m.radius_spread, m.closure)):
            col.append(val)
        mids, amps = envelope(rec, x0, tau, skip)
        for col, vals in zip(env_cols, ([eps] * len(mids), mids, amps)):
            col.extend(vals)
    fl = floquet_map(wave)
    tabs = [table("return_map", ("epsilon", "time", "f", "fdot"), *rm_cols),
            table("orbit_metrics", ("epsilon", "centroid_f", "centroid_fdot_over_omega",
                                    "mean_radius", "radius_spread", "closure"), *met_cols),
            table("envelope", ("epsilon", "time", "half_range"), *env_cols)]
    summary = {"tau": tau, "omega": omega, "t_end": t_end,
               "floquet_multipliers": [[z.real, z.imag] for z in fl.multipliers]}
    return tabs, summary


def cmd_floquet(spec: ExperimentSpec):
    fl = floquet_map(_wave(spec))
    m, z = fl.monodromy, fl.multipliers
    cols = ("m11", "m12", "m21", "m22", "mu1_re", "mu1_im", "mu2_re", "mu2_im", "det")
    vals = [*m.ravel(), z[0].real, z[0].imag, z[1].real, z[1].imag, fl.determinant]
    return [table("floquet", cols, *[[v] for v in vals])], {"det": fl.determinant}


def cmd_extrema_sweep(spec: ExperimentSpec):
    """Normalized extrema across alpha; the load sign flips where the given one is inadmissible."""
    sub = _substrate(spec)
    acr = alpha_critical(sub)
    p = spec["p"]
    alphas = np.linspace(spec["alpha-min"], spec["alpha-max"], spec["alpha-count"])
    cols = ([], [], [], [], [], [])
    for al in map(float, alphas):
        row = (al, math.nan, math.nan, math.nan, abs(al - acr) < NEAR_CRITICAL, "ok")
        if abs(al - acr) <= CRITICAL_TOL:
            row = (*row[:5], "critical")
        else:
            for sign in (1.0, -1.0):
                try:
                    w = solve_loaded_wave(sub, sign * p, al, a_max=spec["a-max"])
                except InadmissibleLoadError:
                    continue
                except NoRootError:
                    row = (*row[:5], "no-root")
                    break
                row = (al, sign * p, *extrema(w), row[4], "ok" if sign > 0 else "sign-flipped")
                break
        for col, val in zip(cols, row):
            col.append(val)
    return [table("extrema", ("alpha", "p", "min_normalized", "max_normalized",
                              "near_critical", "status"), *cols)], {"alpha_cr": acr}


HANDLERS = {
    "analytic": cmd_analytic,
    "dispersion": cmd_dispersion,
    "simulate": cmd_simulate,
    "simulate-loaded": cmd_simulate_loaded,
    "stability": cmd_stability,
    "floquet": cmd_floquet,
    "extrema-sweep": cmd_extrema_sweep,
}


def run_verify(name: str) -> int:
    names = list(SCENARIOS) if name == "all" else [name]
    ok = True
    for n in names:
        check = SCENARIOS[n]()
        print(check.line(), flush=True)
        ok &= check.passed
    return EXIT_OK if ok else EXIT_FAIL


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        parsed = parse_spec(argv)
    except SpecError as exc:
        print(f"cablewaves: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if isinstance(parsed, str):
        return run_verify(parsed)
    try:
        tables, summary = HANDLERS[parsed.command](parsed)
        written = emit(tables, parsed, summary)
    except (InstabilityError, OSError) as exc:
        print(f"cablewaves: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"cablewaves: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
