"""Post-processing of simulation records: phase speed, settled-profile error, convergence."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .analytic import TravelingWave
from .loaded import LoadedWave
from .simulator import RunRecord


def upward_crossings(t: np.ndarray, f: np.ndarray, level: float = 0.0) -> np.ndarray:
    """Times where ``f - level`` goes from <= 0 to > 0, linearly interpolated."""
    g = f - level
    i = np.nonzero((g[:-1] <= 0.0) & (g[1:] > 0.0))[0]
    frac = -g[i] / (g[i + 1] - g[i])
    return t[i] + frac * (t[i + 1] - t[i])


def measure_phase_speed(record: RunRecord, t_from: float, t_to: float | None = None,
                        level: float = 0.0) -> float:
    """Speed of constant-phase fronts (upward crossings of ``level``) across the probes.

    Consecutive probes must be closer than one wavelength so each crossing at a
    probe can be matched with the first later crossing at the next one.
    """
    xs = record.probe_x
    if xs.size < 2:
        raise ValueError("need at least two probes")
    order = np.argsort(xs)
    t = record.times
    t_to = t[-1] if t_to is None else t_to
    sel = (t >= t_from) & (t <= t_to)
    crossings = [upward_crossings(t[sel], record.probe_w[sel, j], level) for j in order]
    lags = [0.0]
    for ca, cb in zip(crossings[:-1], crossings[1:]):
        d = []
        for ta in ca:
            later = cb[cb > ta]
            if later.size:
                d.append(later[0] - ta)
        if not d:
            raise ValueError("no matching crossings between neighbouring probes")
        lags.append(float(np.median(d)))
    arrival = np.cumsum(lags)
    slope = np.polyfit(xs[order], arrival, 1)[0]
    return 1.0 / slope


def front_position(x: np.ndarray, w: np.ndarray, threshold: float) -> float:
    """Largest ``x`` where ``|w|`` exceeds ``threshold`` (leading edge of the signal)."""
    idx = np.nonzero(np.abs(w) > threshold)[0]
    return float(x[idx[-1]]) if idx.size else 0.0


def _wave_peak(wave: TravelingWave | LoadedWave) -> float:
    xi = np.linspace(0.0, 1.0, 20_001)
    return float(np.max(np.abs(wave.profile(xi))))


def settled_error(x: np.ndarray, w: np.ndarray, t: float, wave: TravelingWave | LoadedWave,
                  window: tuple[float, float], phase: float = 0.0) -> tuple[float, float]:
    """Phase-aligned relative L-infinity distance to the traveling wave on ``window``.

    Returns ``(error, shift)``; ``shift`` is the nondimensional phase offset that
    minimizes the distance, searched within a quarter period.
    """
    m = (x >= window[0]) & (x <= window[1])
    xs, ws = x[m], w[m]
    base = phase + (xs - wave.c * wave.v * t) / wave.L

    def dist(s):
        return float(np.max(np.abs(ws - wave.profile(base + s))))

    grid = np.linspace(-0.25, 0.25, 501)
    s0 = grid[int(np.argmin([dist(s) for s in grid]))]
    h = grid[1] - grid[0]
    res = minimize_scalar(dist, bounds=(s0 - h, s0 + h), method="bounded",
                          options={"xatol": 1e-10})
    best = min((res.fun, res.x), (dist(s0), s0))
    return best[0] / _wave_peak(wave), float(best[1])


def sample_at(record_x: np.ndarray, w: np.ndarray, xs: np.ndarray) -> np.ndarray:
    return np.interp(xs, record_x, w)


def richardson_order(coarse: np.ndarray, medium: np.ndarray, fine: np.ndarray) -> float:
    """Observed order from three solutions on a common sample set, each step halved."""
    e1 = float(np.max(np.abs(coarse - medium)))
    e2 = float(np.max(np.abs(medium - fine)))
    return math.log2(e1 / e2)


def observed_order(errors: Sequence[float]) -> float:
    """Order from errors at successively halved resolutions (last pair)."""
    return math.log2(errors[-2] / errors[-1])
