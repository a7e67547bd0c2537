"""Flat ``key = value`` configuration files.

One setting per line, ``#`` starts a comment, nested settings use dotted
keys and lists are comma separated::

    nodes.power = 1, 2, 3, 4
    nodes.honesty = 0.9, 0.9, 0.6, 0.99
    alpha = 0.5
    lottery.enabled = true

Only ``nodes.power`` is required.  Unknown keys are rejected.  A file that
also sets any ``sweep.*`` key describes an :class:`ExperimentSpec`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Optional, Union

from ..consensus import LotteryConfig, NodeDescriptor
from ..simulator import BEHAVIOR_MODES, TRUTH_MODES, SimConfig
from ..trust import DECAY_MODES, EMA_INPUTS, BetaPrior, DecayParams


class ConfigError(ValueError):
    """A configuration key is missing, unknown or out of range."""


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"expected a finite number, got {text!r}")
    return value


def _parse_int(text: str) -> int:
    return int(text.strip())


def _split(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _float_list(text: str) -> list[float]:
    return [_parse_float(x) for x in _split(text)]


def _str_list(text: str) -> list[str]:
    return _split(text)


def _unit(lo_open=False, hi_open=False):
    def check(v):
        lo_ok = v > 0 if lo_open else v >= 0
        hi_ok = v < 1 if hi_open else v <= 1
        return lo_ok and hi_ok
    lo = "(" if lo_open else "["
    hi = ")" if hi_open else "]"
    return check, f"must be in {lo}0, 1{hi}"


_POSITIVE = (lambda v: v > 0, "must be > 0")
_AT_LEAST_ONE = (lambda v: v >= 1, "must be >= 1")
_U64 = (lambda v: 0 <= v < 2**64, "must be a 64-bit unsigned integer")


def _choice(options):
    return (lambda v: v in options, f"must be one of {', '.join(options)}")


@dataclass(frozen=True)
class _Key:
    parse: Callable[[str], Any]
    default: Any
    check: Optional[tuple] = None


# Every accepted simulation key, with parser, default and constraint.
SIM_KEYS: dict[str, _Key] = {
    "nodes.power": _Key(_float_list, None),
    "nodes.honesty": _Key(_float_list, None),
    "nodes.id": _Key(_str_list, None),
    "alpha": _Key(_parse_float, 0.5, _unit()),
    "prior.a": _Key(_parse_float, 0.5, _POSITIVE),
    "prior.b": _Key(_parse_float, 0.5, _POSITIVE),
    "decay.mode": _Key(str.strip, "none", _choice(DECAY_MODES)),
    "decay.lambda": _Key(_parse_float, 0.9, _unit()),
    "decay.gamma": _Key(_parse_float, 0.9, _unit()),
    "decay.ema_input": _Key(str.strip, "behavior", _choice(EMA_INPUTS)),
    "committee_size": _Key(_parse_int, 3, _AT_LEAST_ONE),
    "lottery.enabled": _Key(_parse_bool, False),
    "lottery.low_power_quantile": _Key(_parse_float, 0.5, _unit(True, True)),
    "lottery.nb_successes": _Key(_parse_int, 1, _AT_LEAST_ONE),
    "lottery.nb_success_prob": _Key(_parse_float, 0.5, (lambda v: 0 < v <= 1, "must be in (0, 1]")),
    "lottery.uniform_within": _Key(_parse_bool, False),
    "truth_mode": _Key(str.strip, "oracle", _choice(TRUTH_MODES)),
    "behavior_mode": _Key(str.strip, "independent_honesty", _choice(BEHAVIOR_MODES)),
    "rounds": _Key(_parse_int, 100, _AT_LEAST_ONE),
    "block_reward": _Key(_parse_float, 1.0, _POSITIVE),
    "seed": _Key(_parse_int, 0, _U64),
}

SWEEP_KEYS = ("sweep.param", "sweep.values", "sweep.seeds", "output_dir")

# Scalar keys that may be swept.
SWEEPABLE = tuple(k for k in SIM_KEYS if not k.startswith("nodes."))


@dataclass(frozen=True)
class ExperimentSpec:
    base: SimConfig
    sweep_param: Optional[str] = None
    sweep_values: tuple = ()
    seeds: tuple[int, ...] = (0,)
    output_dir: Optional[Path] = None

    def __post_init__(self):
        if self.sweep_param is not None:
            if self.sweep_param not in SWEEPABLE:
                raise ConfigError(f"sweep.param: unknown or non-sweepable key {self.sweep_param!r}")
            if len(self.sweep_values) == 0:
                raise ConfigError("sweep.values: must be non-empty when sweep.param is set")
        if len(self.seeds) == 0:
            raise ConfigError("sweep.seeds: must be non-empty")
        for s in self.seeds:
            if not 0 <= s < 2**64:
                raise ConfigError(f"sweep.seeds: {s} is not a 64-bit unsigned integer")

    def cells(self) -> list[tuple[int, Any, int, SimConfig]]:
        """``(value_index, value, seed, config)`` for every grid cell, in row order."""
        values = self.sweep_values if self.sweep_param is not None else (None,)
        out = []
        for vi, value in enumerate(values):
            cfg = self.base if value is None else with_value(self.base, self.sweep_param, value)
            for seed in self.seeds:
                out.append((vi, value, seed, cfg))
        return out


def _parse_lines(text: str) -> dict[str, str]:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in raw:
            raise ConfigError(f"{key}: set more than once (line {lineno})")
        raw[key] = value
    return raw


def _coerce(key: str, text: str) -> Any:
    spec = SIM_KEYS[key]
    if key == "decay.mode" and ("," in text or "+" in text):
        raise ConfigError(f"decay.mode: decay modes are mutually exclusive, got {text!r}")
    try:
        value = spec.parse(text)
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from None
    if spec.check is not None:
        ok, message = spec.check
        if not ok(value):
            raise ConfigError(f"{key}: {message}, got {value!r}")
    return value


def build_config(raw: dict[str, str]) -> SimConfig:
    """Build a :class:`SimConfig` from unparsed string values."""
    unknown = [k for k in raw if k not in SIM_KEYS]
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown key")
    values = {k: (_coerce(k, raw[k]) if k in raw else spec.default) for k, spec in SIM_KEYS.items()}

    powers = values["nodes.power"]
    if powers is None:
        raise ConfigError("nodes.power: required key is missing")
    n = len(powers)
    if n < 2:
        raise ConfigError(f"nodes.power: need at least 2 nodes, got {n}")
    honesty = values["nodes.honesty"] if values["nodes.honesty"] is not None else [1.0] * n
    ids = values["nodes.id"] if values["nodes.id"] is not None else [str(i) for i in range(n)]
    for key, seq in (("nodes.honesty", honesty), ("nodes.id", ids)):
        if len(seq) != n:
            raise ConfigError(f"{key}: expected {n} entries to match nodes.power, got {len(seq)}")
    if len(set(ids)) != n:
        raise ConfigError("nodes.id: ids must be unique")
    for i, (p, h) in enumerate(zip(powers, honesty)):
        if not p > 0:
            raise ConfigError(f"nodes.power: entry {i} must be > 0, got {p}")
        if not 0 <= h <= 1:
            raise ConfigError(f"nodes.honesty: entry {i} must be in [0, 1], got {h}")
    if values["behavior_mode"] == "power_as_honesty" and max(powers) > 1:
        raise ConfigError("nodes.power: power_as_honesty requires every power in (0, 1]")

    try:
        return SimConfig(
            nodes=tuple(NodeDescriptor(i, p, h) for i, p, h in zip(ids, powers, honesty)),
            alpha=values["alpha"],
            prior=BetaPrior(values["prior.a"], values["prior.b"]),
            decay=DecayParams(
                values["decay.mode"], values["decay.lambda"], values["decay.gamma"], values["decay.ema_input"]
            ),
            committee_size=values["committee_size"],
            lottery=LotteryConfig(
                values["lottery.enabled"],
                values["lottery.low_power_quantile"],
                values["lottery.nb_successes"],
                values["lottery.nb_success_prob"],
                values["lottery.uniform_within"],
            ),
            truth_mode=values["truth_mode"],
            behavior_mode=values["behavior_mode"],
            rounds=values["rounds"],
            block_reward=values["block_reward"],
            seed=values["seed"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def parse_seeds(text: str) -> tuple[int, ...]:
    """``"5"`` means seeds 0..4; ``"3, 7, 11"`` is an explicit list."""
    parts = _split(text)
    try:
        if len(parts) == 1 and "," not in text:
            count = int(parts[0])
            if count < 1:
                raise ConfigError(f"sweep.seeds: seed count must be >= 1, got {count}")
            return tuple(range(count))
        return tuple(int(p) for p in parts)
    except ValueError:
        raise ConfigError(f"sweep.seeds: expected a count or comma list of integers, got {text!r}") from None


def parse_sweep_values(param: str, text: str) -> tuple:
    if param not in SWEEPABLE:
        raise ConfigError(f"sweep.param: unknown or non-sweepable key {param!r}")
    try:
        return tuple(_coerce(param, part) for part in _split(text))
    except ConfigError as exc:
        raise ConfigError(f"sweep.values: {exc}") from None


def parse_config(text: str) -> Union[SimConfig, ExperimentSpec]:
    """Parse config text into a :class:`SimConfig`, or an :class:`ExperimentSpec`
    when any sweep key is present."""
    raw = _parse_lines(text)
    sweep = {k: raw.pop(k) for k in SWEEP_KEYS if k in raw}
    base = build_config(raw)
    if not sweep:
        return base
    param = sweep.get("sweep.param")
    values = ()
    if param is not None:
        values = parse_sweep_values(param, sweep.get("sweep.values", ""))
    elif "sweep.values" in sweep:
        raise ConfigError("sweep.values: requires sweep.param")
    seeds = parse_seeds(sweep["sweep.seeds"]) if "sweep.seeds" in sweep else (base.seed,)
    out = Path(sweep["output_dir"]) if "output_dir" in sweep else None
    return ExperimentSpec(base, param, values, seeds, out)


def load_config(path: Union[str, Path]) -> Union[SimConfig, ExperimentSpec]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)


def config_to_dict(config: SimConfig) -> dict[str, Any]:
    """Flat dotted-key view of a config, in :data:`SIM_KEYS` order."""
    return {
        "nodes.power": [n.power for n in config.nodes],
        "nodes.honesty": [n.honesty for n in config.nodes],
        "nodes.id": [str(n.id) for n in config.nodes],
        "alpha": config.alpha,
        "prior.a": config.prior.a,
        "prior.b": config.prior.b,
        "decay.mode": config.decay.mode,
        "decay.lambda": config.decay.lam,
        "decay.gamma": config.decay.gamma,
        "decay.ema_input": config.decay.ema_input,
        "committee_size": config.committee_size,
        "lottery.enabled": config.lottery.enabled,
        "lottery.low_power_quantile": config.lottery.low_power_quantile,
        "lottery.nb_successes": config.lottery.nb_successes,
        "lottery.nb_success_prob": config.lottery.nb_success_prob,
        "lottery.uniform_within": config.lottery.uniform_within,
        "truth_mode": config.truth_mode,
        "behavior_mode": config.behavior_mode,
        "rounds": config.rounds,
        "block_reward": config.block_reward,
        "seed": config.seed,
    }


def _format(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ", ".join(_format(v) for v in value)
    return str(value)


def serialize_config(config: SimConfig) -> str:
    """Text that :func:`parse_config` turns back into an equal config.

    Floats are written with ``repr`` so the round trip is exact.
    """
    return "".join(f"{k} = {_format(v)}\n" for k, v in config_to_dict(config).items())


def with_value(config: SimConfig, key: str, value: Any) -> SimConfig:
    """Copy of ``config`` with one dotted key replaced."""
    raw = {k: _format(v) for k, v in config_to_dict(config).items()}
    raw[key] = _format(value)
    return build_config(raw)
