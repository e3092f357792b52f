"""Traveling waves on a taut cable resting on a bilinear elastic substrate."""

__version__ = "0.1.0"

from .analytic import (DegenerateSubstrateError, Substrate, TravelingWave, junction_residuals,
                       limit_case, period_frequency, solve_single_wave)
from .loaded import (LoadedWave, alpha_critical, dispersion_residual, extrema, scan_roots,
                     solve_loaded_wave, zero_wave_exists)
from .simulator import SimConfig, config_for_wave, run, run_loaded
from .stability import Perturbation, floquet_map, orbit_metrics, perturbed_run, return_map

__all__ = [
    "DegenerateSubstrateError", "Substrate", "TravelingWave", "junction_residuals",
    "limit_case", "period_frequency", "solve_single_wave", "LoadedWave", "alpha_critical",
    "dispersion_residual", "extrema", "scan_roots", "solve_loaded_wave", "zero_wave_exists",
    "SimConfig", "config_for_wave", "run", "run_loaded", "Perturbation", "floquet_map",
    "orbit_metrics", "perturbed_run", "return_map", "__version__",
]
