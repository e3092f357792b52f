"""Orbital stability: the period map of the profile ODE and stroboscopic return maps."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal, Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.signal import lombscargle

from .analytic import TravelingWave, period_frequency
from .loaded import LoadedWave
from .simulator import (DecayingSinusoid, RunRecord, SimConfig, WaveTrace, config_for_wave,
                        run, run_loaded)

MIN_RETURN_SAMPLES = 30
MIN_ORBIT_SAMPLES = 20


class InsufficientDurationError(ValueError):
    pass


class TooFewSamplesError(ValueError):
    pass


@dataclass(frozen=True)
class FloquetResult:
    monodromy: np.ndarray
    multipliers: np.ndarray

    @property
    def determinant(self) -> float:
        return float(np.linalg.det(self.monodromy))


def _harmonic_block(omega: float, length: float) -> np.ndarray:
    # Fundamental matrix of y'' + omega**2 y = 0 across an interval of the given length.
    cs, sn = math.cos(omega * length), math.sin(omega * length)
    return np.array([[cs, sn / omega], [-omega * sn, cs]])


def floquet_map(wave: TravelingWave) -> FloquetResult:
    """Linearized xi = 0 -> 1 map of ``(W, W')`` about the periodic profile.

    ``k(W) W`` is continuous across ``W = 0``, so the saltation matrices at the
    switching points are the identity and the monodromy is a plain product of
    the compression and tension blocks, repeated ``n`` times.
    """
    cell = _harmonic_block(wave.b, wave.cell - wave.alpha) @ _harmonic_block(wave.a, wave.alpha)
    mono = np.linalg.matrix_power(cell, wave.n)
    return FloquetResult(mono, np.linalg.eigvals(mono))


@dataclass(frozen=True)
class Perturbation:
    """Perturbation families: a harmonic added to the boundary datum, or a decaying
    sinusoid ``epsilon sin(wavenumber x) exp(-decay x)`` added to the initial profile."""

    kind: Literal["boundary_harmonic", "initial_profile"]
    epsilon: float
    omega1: float = 0.0
    wavenumber: float = math.sqrt(2.0)
    decay: float = 0.8

    def __post_init__(self):
        if self.kind not in ("boundary_harmonic", "initial_profile"):
            raise ValueError(f"invalid value: unknown perturbation kind {self.kind!r}")
        if self.epsilon < 0:
            raise ValueError("invalid value: epsilon must be >= 0")
        if self.kind == "boundary_harmonic" and self.epsilon > 0 and self.omega1 <= 0:
            raise ValueError("invalid value: omega1 must be > 0 for a boundary perturbation")

    @classmethod
    def boundary(cls, epsilon: float, omega1: float) -> "Perturbation":
        return cls("boundary_harmonic", epsilon, omega1)

    @classmethod
    def initial(cls, epsilon: float, wavenumber: float = math.sqrt(2.0),
                decay: float = 0.8) -> "Perturbation":
        return cls("initial_profile", epsilon, 0.0, wavenumber, decay)


def wave_period(wave: TravelingWave | LoadedWave) -> tuple[float, float]:
    if isinstance(wave, LoadedWave):
        return wave.period, wave.omega
    return period_frequency(wave)


def perturbed_run(base: TravelingWave | LoadedWave, pert: Perturbation,
                  config: SimConfig | None = None, *, t_end: float | None = None,
                  probes: Sequence[float] = (), snapshot_times: Sequence[float] = (),
                  energy_every: int = 0) -> RunRecord:
    """Run the simulator with the perturbation folded into the boundary or initial data."""
    if config is None:
        if t_end is None:
            raise ValueError("give either a config or t_end")
        config = config_for_wave(base, t_end)
    trace = config.boundary
    if not isinstance(trace, WaveTrace):
        trace = WaveTrace(base)
    if pert.kind == "boundary_harmonic":
        config = replace(config, boundary=replace(trace, epsilon=pert.epsilon,
                                                  omega1=pert.omega1))
    else:
        bump = DecayingSinusoid(pert.epsilon, pert.wavenumber, pert.decay)
        if isinstance(base, LoadedWave):
            wp = base.particular
            initial = lambda x: wp + bump(x)  # noqa: E731
        else:
            initial = bump
        config = replace(config, initial=initial)
    if isinstance(base, LoadedWave):
        return run_loaded(config, base, probes, snapshot_times, energy_every)
    return run(config, probes, snapshot_times, energy_every)


@dataclass(frozen=True)
class ReturnMapSeries:
    x0: float
    tau: float
    times: np.ndarray
    samples: np.ndarray  # rows (f, fdot)

    def __len__(self) -> int:
        return len(self.times)


def return_map(record: RunRecord, x0: float, tau: float, skip: float,
               min_samples: int = MIN_RETURN_SAMPLES) -> ReturnMapSeries:
    """Stroboscopic samples of ``(w(x0, t), w_t(x0, t))`` at ``t = m tau >= skip``."""
    j = record.probe_index(x0)
    t = record.times
    if t[-1] < skip + min_samples * tau:
        raise InsufficientDurationError(
            f"insufficient duration: record ends at t={t[-1]:.4g}, need "
            f">= skip + {min_samples} periods = {skip + min_samples * tau:.4g}")
    m0 = math.ceil(skip / tau - 1e-12)
    m1 = math.floor(t[-2] / tau)
    ts = tau * np.arange(m0, m1 + 1)
    f = CubicSpline(t, record.probe_w[:, j])(ts)
    fdot = CubicSpline(t, record.probe_wdot[:, j])(ts)
    return ReturnMapSeries(float(record.probe_x[j]), tau, ts, np.column_stack([f, fdot]))


@dataclass(frozen=True)
class OrbitMetrics:
    centroid: np.ndarray
    mean_radius: float
    radius_spread: float
    closure: float


def orbit_metrics(series: ReturnMapSeries) -> OrbitMetrics:
    """Centroid, mean radius, radius spread and closure score of a return map.

    Distances are taken in the plane ``(f, fdot / omega)``, ``omega = 2 pi / tau``,
    so both axes carry displacement units; the centroid is reported there too.
    The closure score is spread / mean radius.
    """
    if len(series) < MIN_ORBIT_SAMPLES:
        raise TooFewSamplesError(f"too few samples: {len(series)} < {MIN_ORBIT_SAMPLES}")
    omega = 2.0 * math.pi / series.tau
    pts = series.samples * np.array([1.0, 1.0 / omega])
    centroid = pts.mean(axis=0)
    r = np.linalg.norm(pts - centroid, axis=1)
    mean_r = float(r.mean())
    spread = float(r.std())
    closure = spread / mean_r if mean_r > 0 else 0.0
    return OrbitMetrics(centroid, mean_r, spread, closure)


def distance_to_point(series: ReturnMapSeries, point: np.ndarray) -> np.ndarray:
    """Distances of the samples from ``point`` in the same normalized plane."""
    omega = 2.0 * math.pi / series.tau
    pts = series.samples * np.array([1.0, 1.0 / omega])
    return np.linalg.norm(pts - np.asarray(point), axis=1)


def envelope(record: RunRecord, x0: float, tau: float, skip: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-period peak-to-peak half range of the probe signal, sampled once per period."""
    j = record.probe_index(x0)
    t, f = record.times, record.probe_w[:, j]
    m0 = math.ceil(skip / tau)
    m1 = math.floor(t[-1] / tau) - 1
    mids, amps = [], []
    for m in range(m0, m1 + 1):
        sel = (t >= m * tau) & (t < (m + 1) * tau)
        seg = f[sel]
        mids.append((m + 0.5) * tau)
        amps.append(0.5 * (seg.max() - seg.min()))
    return np.asarray(mids), np.asarray(amps)


def envelope_beat_frequency(record: RunRecord, x0: float, tau: float, skip: float,
                            omega_max: float | None = None) -> float:
    """Dominant angular frequency of the probe envelope modulation (Lomb-Scargle peak)."""
    mids, amps = envelope(record, x0, tau, skip)
    if mids.size < 8:
        raise InsufficientDurationError("insufficient duration for an envelope spectrum")
    y = amps - amps.mean()
    span = mids[-1] - mids[0]
    nyquist = math.pi / tau
    top = nyquist if omega_max is None else min(omega_max, nyquist)
    freqs = np.linspace(2.0 * math.pi / span, top, 20_000)
    power = lombscargle(mids, y, freqs)
    return float(freqs[int(np.argmax(power))])


def radius_by_angle(series: ReturnMapSeries, point: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Loop radius about ``point`` as a periodic function of polar angle, in the normalized plane."""
    omega = 2.0 * math.pi / series.tau
    rel = series.samples * np.array([1.0, 1.0 / omega]) - np.asarray(point)
    ang = np.arctan2(rel[:, 1], rel[:, 0])
    order = np.argsort(ang)
    return np.interp(angles, ang[order], np.hypot(rel[:, 0], rel[:, 1])[order],
                     period=2.0 * math.pi)


def nested(loops: Sequence[ReturnMapSeries], point: np.ndarray, n_angles: int = 360) -> bool:
    """True when each loop lies strictly outside the previous one at every polar angle."""
    angles = np.linspace(-math.pi, math.pi, n_angles, endpoint=False)
    radii = [radius_by_angle(s, point, angles) for s in loops]
    return all(bool(np.all(outer > inner)) for inner, outer in zip(radii, radii[1:]))
