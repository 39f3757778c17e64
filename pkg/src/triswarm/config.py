"""Experiment configuration: defaults, flat dotted-key config files, validation.

Config files are plain text, one `section.key = value` per line, `#` for
comments.  CLI flags override file values, file values override defaults.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, fields, replace

from .dynamics import SimulationParams
from .errors import InvalidInputError
from .interaction import InteractionFunction, LennardJonesParams, saturated_lennard_jones
from .lattice import GROWTH_POLICIES


@dataclass(frozen=True)
class ExperimentConfig:
    # interaction
    a: float = 0.5
    b: float = 0.5
    c: int = 12
    saturation: float = 1.0
    truncate: bool = False
    # geometry
    R: float = 1.0
    R_a: float = (1.0 + math.sqrt(3.0)) / 2.0
    R_s: float = 3.0
    # simulation
    dt: float = 0.01
    horizon: float = 20.0
    record_every: int = 1
    # experiment
    n: int = 100
    delta: float = 0.2
    delta_grid: tuple[float, ...] = ()
    trials: int = 20
    lattice_seed: int = 0
    perturb_seed: int = 1
    growth: str = "compact"
    # spectrum batches
    spectrum_n_values: tuple[int, ...] = (25, 50, 100)
    spectrum_seeds_per_n: int = 3
    # output
    out_dir: str = "triswarm-out"

    def validate(self) -> None:
        root = (self.a / self.b) ** (1.0 / self.c)
        if abs(root - self.R) > 1e-9 * self.R:
            raise InvalidInputError(
                f"R={self.R} inconsistent with force root (a/b)^(1/c)={root:.12g}"
            )
        if not (self.R < self.R_a < self.R * math.sqrt(3.0)):
            raise InvalidInputError(
                f"R_a={self.R_a} must lie strictly between R and R*sqrt(3)={self.R * math.sqrt(3.0):.12g}"
            )
        if self.R_s < self.R_a:
            raise InvalidInputError("R_s must be >= R_a")
        if self.dt <= 0 or self.horizon < self.dt:
            raise InvalidInputError("need dt > 0 and horizon >= dt")
        if self.n < 3:
            raise InvalidInputError("n must be >= 3 (smallest triangular lattice)")
        if self.delta < 0 or any(d < 0 for d in self.delta_grid):
            raise InvalidInputError("perturbation radii must be non-negative")
        if self.trials < 1:
            raise InvalidInputError("trials must be >= 1")
        if self.growth not in GROWTH_POLICIES:
            raise InvalidInputError(
                f"unknown growth policy {self.growth!r}; choose from {sorted(GROWTH_POLICIES)}"
            )

    def interaction(self) -> InteractionFunction:
        return saturated_lennard_jones(
            LennardJonesParams(a=self.a, b=self.b, c=self.c, saturation=self.saturation),
            r_a=self.R_a,
            truncate=self.truncate,
        )

    def simulation_params(self, record_every: int | None = None) -> SimulationParams:
        return SimulationParams(
            R=self.R,
            R_a=self.R_a,
            R_s=self.R_s,
            dt=self.dt,
            horizon=self.horizon,
            record_every=self.record_every if record_every is None else record_every,
        )

    def digest(self) -> str:
        payload = {f.name: getattr(self, f.name) for f in fields(self)}
        canon = json.dumps(payload, sort_keys=True, default=list)
        return hashlib.sha256(canon.encode()).hexdigest()


_KEY_MAP = {
    "interaction.a": ("a", float),
    "interaction.b": ("b", float),
    "interaction.c": ("c", int),
    "interaction.saturation": ("saturation", float),
    "interaction.truncate": ("truncate", None),
    "geometry.R": ("R", float),
    "geometry.R_a": ("R_a", float),
    "geometry.R_s": ("R_s", float),
    "simulation.dt": ("dt", float),
    "simulation.horizon": ("horizon", float),
    "simulation.record_every": ("record_every", int),
    "experiment.n": ("n", int),
    "experiment.delta": ("delta", float),
    "experiment.delta_grid": ("delta_grid", None),
    "experiment.trials": ("trials", int),
    "experiment.lattice_seed": ("lattice_seed", int),
    "experiment.perturb_seed": ("perturb_seed", int),
    "experiment.growth": ("growth", str),
    "spectrum.n_values": ("spectrum_n_values", None),
    "spectrum.seeds_per_n": ("spectrum_seeds_per_n", int),
    "output.dir": ("out_dir", str),
}


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise InvalidInputError(f"not a boolean: {text!r}")


def parse_config_text(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    cfg = base or ExperimentConfig()
    updates = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidInputError(f"line {lineno}: expected 'section.key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KEY_MAP:
            raise InvalidInputError(f"line {lineno}: unknown key {key!r}")
        name, conv = _KEY_MAP[key]
        try:
            if key == "interaction.truncate":
                updates[name] = _parse_bool(value)
            elif key == "experiment.delta_grid":
                updates[name] = tuple(float(v) for v in value.split(",") if v.strip())
            elif key == "spectrum.n_values":
                updates[name] = tuple(int(v) for v in value.split(",") if v.strip())
            else:
                updates[name] = conv(value)
        except ValueError as exc:
            raise InvalidInputError(f"line {lineno}: bad value for {key}: {exc}") from exc
    return replace(cfg, **updates)


def load_config(path, base: ExperimentConfig | None = None) -> ExperimentConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InvalidInputError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, base)
