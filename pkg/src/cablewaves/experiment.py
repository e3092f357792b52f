"""Flat key-value experiment descriptions: parsing, validation and round-trip text."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

COMMANDS = ("analytic", "dispersion", "simulate", "simulate-loaded", "stability",
            "floquet", "extrema-sweep")


class SpecError(ValueError):
    """Raised for unknown keys, missing required keys and invalid values."""


def _float(key: str, text: str) -> float:
    try:
        val = float(text)
    except ValueError:
        raise SpecError(f"invalid value: {key} must be a number, got {text!r}") from None
    if not math.isfinite(val):
        raise SpecError(f"invalid value: {key} must be finite, got {text!r}")
    return val


def _int(key: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise SpecError(f"invalid value: {key} must be an integer, got {text!r}") from None


def _float_list(key: str, text: str) -> tuple[float, ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(_float(key, part) for part in text.split(","))


def _optional_float(key: str, text: str):
    return None if text.strip() in ("", "auto") else _float(key, text)


def _choice(*options: str) -> Callable[[str, str], str]:
    def conv(key: str, text: str) -> str:
        if text not in options:
            raise SpecError(f"invalid value: {key} must be one of {', '.join(options)}, "
                            f"got {text!r}")
        return text
    return conv


@dataclass(frozen=True)
class Key:
    convert: Callable[[str, str], object]
    default: object
    help: str
    minimum: float | None = None
    strict: bool = False  # minimum is exclusive


KEYS: dict[str, Key] = {
    "k1": Key(_float, None, "compression-side stiffness", 0.0),
    "k2": Key(_float, None, "tension-side stiffness", 0.0),
    "p": Key(_float, 0.0, "uniform load"),
    "alpha": Key(_optional_float, None, "compression fraction (loaded wave)", 0.0, True),
    "n": Key(_int, 1, "number of repetitions per period", 1),
    "L": Key(_float, 1.0, "wavelength", 0.0, True),
    "v": Key(_float, 1.0, "base wave speed sqrt(T/rho)", 0.0, True),
    "amplitude": Key(_float, 0.01, "tension-side amplitude c3 of the driving wave", 0.0, True),
    "epsilon": Key(_float, 0.0, "perturbation amplitude", 0.0),
    "omega1-ratio": Key(_float, math.sqrt(2.0), "perturbation frequency over wave frequency",
                        0.0, True),
    "perturbation": Key(_choice("boundary", "initial"), "boundary", "perturbation family"),
    "dx": Key(_optional_float, None, "grid spacing (default L/200)", 0.0, True),
    "dt": Key(_optional_float, None, "time step (default 0.9 of the stability limit)", 0.0, True),
    "t-end": Key(_optional_float, None, "final time (default 80; stability: skip + 34 periods)",
                  0.0, True),
    "probes": Key(_float_list, (2.0, 5.0), "probe positions, comma separated"),
    "snapshot-times": Key(_float_list, (20.0, 40.0, 60.0, 80.0), "snapshot times"),
    "energy-every": Key(_int, 10, "energy report stride in steps (0 disables)", 0),
    "x0": Key(_float, 5.0, "return-map probe position", 0.0),
    "skip": Key(_float, 120.0, "return-map transient skip time", 0.0),
    "alpha-min": Key(_float, 0.05, "sweep start", 0.0, True),
    "alpha-max": Key(_float, 0.95, "sweep end", 0.0, True),
    "alpha-count": Key(_int, 19, "sweep points", 2),
    "a-max": Key(_float, 12.0 * math.pi, "dispersion scan upper limit", 0.0, True),
    "output": Key(lambda k, t: t, "out", "output directory"),
    "format": Key(_choice("csv"), "csv", "table format"),
}

REQUIRED: dict[str, tuple[str, ...]] = {
    "analytic": ("k1", "k2"),
    "dispersion": ("k1", "k2"),
    "simulate": ("k1", "k2"),
    "simulate-loaded": ("k1", "k2", "p", "alpha"),
    "stability": ("k1", "k2"),
    "floquet": ("k1", "k2"),
    "extrema-sweep": ("k1", "k2", "p"),
}


@dataclass(frozen=True)
class ExperimentSpec:
    command: str
    params: dict = field(default_factory=dict)

    def __getitem__(self, key: str):
        return self.params[key]

    @property
    def output(self) -> Path:
        return Path(self.params["output"])

    def to_text(self) -> str:
        """Config-file text that parses back to an identical spec."""
        lines = [f"command = {self.command}"]
        for key in KEYS:
            lines.append(f"{key} = {format_value(self.params[key])}")
        return "\n".join(lines) + "\n"

    def echo(self) -> dict:
        """JSON-friendly parameter echo."""
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.params.items()}


def format_value(val) -> str:
    if val is None:
        return "auto"
    if isinstance(val, tuple):
        return ",".join(repr(float(x)) for x in val)
    if isinstance(val, float):
        return repr(val)
    return str(val)


def build_spec(command: str, raw: dict[str, str]) -> ExperimentSpec:
    """Validate raw string values and apply defaults."""
    if command not in COMMANDS:
        raise SpecError(f"invalid value: command must be one of {', '.join(COMMANDS)}, "
                        f"got {command!r}")
    params = {}
    for key, text in raw.items():
        if key not in KEYS:
            raise SpecError(f"unknown key: {key}")
        spec = KEYS[key]
        val = spec.convert(key, text)
        if spec.minimum is not None and val is not None:
            bad = val <= spec.minimum if spec.strict else val < spec.minimum
            if bad:
                op = ">" if spec.strict else "≥"
                raise SpecError(f"invalid value: {key} must be {op} {spec.minimum:g}")
        params[key] = val
    missing = [k for k in REQUIRED[command] if params.get(k) is None]
    if missing:
        raise SpecError(f"missing required: {', '.join(missing)} (command {command})")
    for key, spec in KEYS.items():
        params.setdefault(key, spec.default)
    if params["alpha-min"] >= params["alpha-max"] or params["alpha-max"] >= 1.0:
        raise SpecError("invalid value: alpha-min < alpha-max < 1 required")
    if params["alpha"] is not None and params["alpha"] >= 1.0:
        raise SpecError("invalid value: alpha must be < 1")
    return ExperimentSpec(command, params)


def read_config(path: str | Path) -> tuple[str | None, dict[str, str]]:
    """Read ``key = value`` lines; ``#`` starts a comment. Returns (command, raw values)."""
    command = None
    raw: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SpecError(f"cannot read config {path}: {exc.strerror}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecError(f"invalid value: {path}:{lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        if key == "command":
            command = val
        else:
            raw[key] = val
    return command, raw


def parse_config(path: str | Path, command: str | None = None,
                 overrides: dict[str, str] | None = None) -> ExperimentSpec:
    file_command, raw = read_config(path)
    command = command or file_command
    if command is None:
        raise SpecError("missing required: command")
    raw.update(overrides or {})
    return build_spec(command, raw)
