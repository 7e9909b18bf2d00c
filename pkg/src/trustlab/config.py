"""Run configuration: YAML file, flag overrides and validation."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence

import yaml

from .abm.world import WorldConfig
from .judge import JudgeParams
from .models import Variant
from .sessions import DEFAULT_ADVISORS, SessionConfig

COMMANDS = ("exp1", "exp2", "exp3", "analytics", "abm", "sweep")
DEFAULT_SESSIONS = {1: 46, 2: 46, 3: 48}
SEED_ENV = "TRUSTLAB_SEED"


class ConfigError(ValueError):
    """The configuration could not be read or parsed."""


@dataclass
class RunConfig:
    command: str = "exp1"
    seed: Optional[int] = None
    out: str = "out"
    # experiment for `analytics`; None means all three
    experiment: Optional[int] = None
    sessions: Optional[int] = None
    feedback: bool = False
    variants: Sequence[str] = ("acc", "cons", "conf")
    blocks: Optional[int] = None
    trials_per_block: Optional[int] = None
    practice_trials: Optional[int] = None
    scale_steps: Optional[int] = None
    advisors: Sequence[Any] = ()
    judge: Dict[str, Any] = field(default_factory=dict)
    prior: float = 0.7
    world: Dict[str, Any] = field(default_factory=dict)
    axes: Dict[str, List[Any]] = field(default_factory=dict)
    replications: int = 20
    workers: int = 1
    series: bool = False

    def experiment_number(self) -> Optional[int]:
        if self.command in ("exp1", "exp2", "exp3"):
            return int(self.command[-1])
        return self.experiment

    def resolved_seed(self) -> int:
        if self.seed is not None:
            return int(self.seed)
        env = os.environ.get(SEED_ENV)
        return int(env) if env not in (None, "") else 0

    def session_config(self, feedback: Optional[bool] = None) -> SessionConfig:
        exp = self.experiment_number()
        return SessionConfig(
            experiment=exp,
            advisors=tuple(self.advisors) or DEFAULT_ADVISORS[exp],
            blocks=self.blocks,
            trials_per_block=self.trials_per_block,
            practice_trials=self.practice_trials,
            feedback=self.feedback if feedback is None else feedback,
            judge=JudgeParams(**self.judge),
            variants=tuple(Variant.parse(v) for v in self.variants),
            scale_steps=self.scale_steps,
        )

    def world_config(self) -> WorldConfig:
        return WorldConfig(**self.world)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["variants"] = list(self.variants)
        d["advisors"] = list(self.advisors)
        return d


_FIELDS = {f.name for f in fields(RunConfig)}


def from_mapping(data: Mapping[str, Any]) -> RunConfig:
    if not isinstance(data, Mapping):
        raise ConfigError("configuration must be a mapping")
    # a manifest nests the run configuration under `config`
    if "config" in data and isinstance(data["config"], Mapping):
        data = data["config"]
    unknown = set(data) - _FIELDS
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    cfg = RunConfig(**dict(data))
    if isinstance(cfg.variants, str):
        cfg.variants = tuple(v for v in cfg.variants.split(",") if v)
    return cfg


def load(path: Path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    return from_mapping(data)


def validate(cfg: RunConfig) -> List[str]:
    """Every invariant violation as ``field.path: message``; empty means runnable."""
    out: List[str] = []
    if cfg.command not in COMMANDS:
        out.append(f"command: must be one of {', '.join(COMMANDS)}, got {cfg.command!r}")
        return out
    try:
        seed = cfg.resolved_seed()
        if not 0 <= seed < 2**64:
            out.append("seed: must be a non-negative 64-bit integer")
    except ValueError:
        out.append(f"seed: {SEED_ENV} is not an integer")
    exp = cfg.experiment_number()
    if cfg.command == "analytics":
        if exp not in (None, 1, 2, 3):
            out.append(f"experiment: must be 1, 2 or 3, got {exp}")
        if not 0.0 < cfg.prior < 1.0:
            out.append("prior: must lie in (0, 1)")
    if cfg.command.startswith("exp"):
        if cfg.sessions is not None and cfg.sessions < 1:
            out.append("sessions: must be >= 1")
        for v in cfg.variants:
            try:
                Variant.parse(v)
            except ValueError:
                out.append(f"variants: unknown variant {v!r}")
        try:
            JudgeParams(**cfg.judge)
        except (TypeError, ValueError) as exc:
            out.append(f"judge: {exc}")
        if not out:
            try:
                cfg.session_config()
            except KeyError as exc:
                out.append(f"advisors: {exc.args[0]}")
            except (TypeError, ValueError) as exc:
                out += [p if ": " in p else f"session: {p}" for p in str(exc).split("; ")]
    if cfg.command in ("abm", "sweep"):
        for k, v in cfg.world.items():
            if isinstance(v, (list, tuple)) and not k.endswith("_range"):
                out.append(f"world.{k}: takes a single value (use a sweep for several)")
        if out:
            return out
        try:
            world = cfg.world_config()
        except (TypeError, ValueError) as exc:
            out.append(f"world: {exc}")
        else:
            out += world.violations(prefix="world.")
            if cfg.command == "sweep":
                out += _sweep_violations(cfg, world)
        if cfg.workers < 1:
            out.append("workers: must be >= 1")
    return out


def _sweep_violations(cfg: RunConfig, world: WorldConfig) -> List[str]:
    out = []
    if cfg.replications < 1:
        out.append("replications: must be >= 1")
    world_fields = {f.name for f in fields(WorldConfig)}
    for name, values in cfg.axes.items():
        if name not in world_fields:
            out.append(f"axes.{name}: not a world parameter")
        elif not isinstance(values, (list, tuple)) or len(values) == 0:
            out.append(f"axes.{name}: must be a non-empty list")
    if out:
        return out
    from .abm.sweep import SweepGrid

    return SweepGrid(world, dict(cfg.axes), cfg.replications, 0).violations()


def apply_overrides(cfg: RunConfig, overrides: Mapping[str, Any]) -> RunConfig:
    """Flags override file values; ``world.x`` keys land in the world mapping."""
    cfg = replace(cfg, judge=dict(cfg.judge), world=dict(cfg.world), axes=dict(cfg.axes))
    for key, value in overrides.items():
        if value is None:
            continue
        if key.startswith("world."):
            cfg.world[key[len("world."):]] = value
        elif key.startswith("axes."):
            cfg.axes[key[len("axes."):]] = value
        else:
            setattr(cfg, key, value)
    return cfg
