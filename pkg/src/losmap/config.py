"""Experiment configuration: YAML schema, validation and defaults.

The packaged data/default.yaml is the canonical default configuration; the
dataclass defaults below mirror it so configs can also be built directly in
code.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import yaml

from .channel import ChannelParams
from .detector import DECISION_RULES, THRESHOLD_CONVENTIONS, DetectorConfig
from .geometry import Point2D, RectObstacle, RoomLayout


class ConfigError(Exception):
    """Invalid, unknown or missing configuration input."""


PERFECT_SENTINEL = "perfect"

# Five 2 m x 4 m tables in the 15 x 25 room. These coordinates are project
# defaults, not measured data.
DEFAULT_OBSTACLES = (
    (2.5, 4.0, 4.5, 8.0),
    (10.5, 4.0, 12.5, 8.0),
    (5.5, 11.0, 9.5, 13.0),
    (2.5, 17.0, 4.5, 21.0),
    (10.5, 17.0, 12.5, 21.0),
)

# Fixed seven-stop walk used by the `map` subcommand's progressive rendering.
DEFAULT_WALK_LOCATIONS = (
    (7.5, 2.0),
    (13.2, 9.5),
    (1.8, 9.5),
    (7.5, 15.0),
    (1.8, 23.2),
    (13.2, 23.2),
    (7.5, 9.9),
)

_ROOM_KEYS = {"width", "length", "obstacles"}
_TOP_KEYS = {
    "room", "num_antennas", "carrier_ghz", "k_factor_db", "gamma_v_db",
    "sigma_v_sq", "num_locations", "num_trials", "cell_size", "seed",
    "prior_h1", "detector_rule", "threshold_convention", "sigma_omega_scale",
}


@dataclass(frozen=True)
class ExperimentConfig:
    room_width: float = 15.0
    room_length: float = 25.0
    obstacles: tuple[tuple[float, float, float, float], ...] = DEFAULT_OBSTACLES
    num_antennas: int = 256
    carrier_ghz: float = 28.0
    k_factor_db: float = 25.0
    gamma_v_db: float | None = 20.0
    sigma_v_sq: float | None = None
    perfect_los: bool = False
    num_locations: int = 18
    num_trials: int = 100
    cell_size: float = 0.1
    seed: int = 42
    prior_h1: float = 0.5
    detector_rule: str = "optimal-threshold"
    threshold_convention: str = "derivation"
    sigma_omega_scale: float = 1.0

    def __post_init__(self):
        for name in ("num_antennas", "num_locations", "num_trials"):
            value = getattr(self, name)
            if not isinstance(value, int) or value <= 0:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if self.num_antennas < 4:
            raise ConfigError("num_antennas must be at least 4")
        if self.cell_size <= 0:
            raise ConfigError("cell_size must be positive")
        if not self.perfect_los:
            if (self.gamma_v_db is None) == (self.sigma_v_sq is None):
                raise ConfigError("supply exactly one of gamma_v_db / sigma_v_sq "
                                  "(or the 'perfect' sentinel)")
        if not 0.0 < self.prior_h1 < 1.0:
            raise ConfigError("prior_h1 must lie strictly inside (0, 1)")
        if self.detector_rule not in DECISION_RULES:
            raise ConfigError(f"detector_rule must be one of {DECISION_RULES}")
        if self.threshold_convention not in THRESHOLD_CONVENTIONS:
            raise ConfigError(
                f"threshold_convention must be one of {THRESHOLD_CONVENTIONS}")

    def layout(self) -> RoomLayout:
        try:
            obstacles = tuple(
                RectObstacle(Point2D(x0, y0), Point2D(x1, y1))
                for x0, y0, x1, y1 in self.obstacles)
            return RoomLayout(width=self.room_width, length=self.room_length,
                              obstacles=obstacles)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def channel_params(self) -> ChannelParams:
        return ChannelParams(fc_ghz=self.carrier_ghz, k_factor_db=self.k_factor_db,
                             gamma_v_db=self.gamma_v_db, sigma_v_sq=self.sigma_v_sq)

    def detector_config(self) -> DetectorConfig:
        return DetectorConfig(prior_h1=self.prior_h1, rule=self.detector_rule,
                              threshold_convention=self.threshold_convention,
                              sigma_omega_scale=self.sigma_omega_scale)


def _require(condition: bool, message: str):
    if not condition:
        raise ConfigError(message)


def _as_number(value, key: str) -> float:
    _require(isinstance(value, (int, float)) and not isinstance(value, bool),
             f"key '{key}' must be a number, got {value!r}")
    return float(value)


def _as_int(value, key: str) -> int:
    _require(isinstance(value, int) and not isinstance(value, bool),
             f"key '{key}' must be an integer, got {value!r}")
    return value


def _parse_mapping(data: dict) -> ExperimentConfig:
    _require(isinstance(data, dict), "config root must be a mapping")
    for key in data:
        _require(key in _TOP_KEYS, f"unknown config key: '{key}'")

    kwargs: dict = {}
    room = data.get("room")
    if room is not None:
        _require(isinstance(room, dict), "key 'room' must be a mapping")
        for key in room:
            _require(key in _ROOM_KEYS, f"unknown config key: 'room.{key}'")
        if "width" in room:
            kwargs["room_width"] = _as_number(room["width"], "room.width")
        if "length" in room:
            kwargs["room_length"] = _as_number(room["length"], "room.length")
        if "obstacles" in room:
            obstacles = room["obstacles"]
            _require(isinstance(obstacles, list),
                     "key 'room.obstacles' must be a list of [x0, y0, x1, y1]")
            parsed = []
            for i, obs in enumerate(obstacles):
                _require(isinstance(obs, (list, tuple)) and len(obs) == 4,
                         f"key 'room.obstacles[{i}]' must be [x0, y0, x1, y1]")
                parsed.append(tuple(_as_number(v, f"room.obstacles[{i}]") for v in obs))
            kwargs["obstacles"] = tuple(parsed)

    if "gamma_v_db" in data:
        value = data["gamma_v_db"]
        if value == PERFECT_SENTINEL:
            kwargs["perfect_los"] = True
            kwargs["gamma_v_db"] = None
        else:
            kwargs["gamma_v_db"] = _as_number(value, "gamma_v_db")
    if "sigma_v_sq" in data:
        kwargs["sigma_v_sq"] = _as_number(data["sigma_v_sq"], "sigma_v_sq")
        if "gamma_v_db" in data and not kwargs.get("perfect_los"):
            raise ConfigError("keys 'gamma_v_db' and 'sigma_v_sq' are mutually exclusive")
        kwargs["gamma_v_db"] = None

    for key, caster in (
        ("num_antennas", _as_int), ("num_locations", _as_int),
        ("num_trials", _as_int), ("seed", _as_int),
        ("carrier_ghz", _as_number), ("k_factor_db", _as_number),
        ("cell_size", _as_number), ("prior_h1", _as_number),
        ("sigma_omega_scale", _as_number),
    ):
        if key in data:
            kwargs[key] = caster(data[key], key)
    for key in ("detector_rule", "threshold_convention"):
        if key in data:
            _require(isinstance(data[key], str), f"key '{key}' must be a string")
            kwargs[key] = data[key]

    config = ExperimentConfig(**kwargs)
    config.layout()  # geometry validation at load time
    return config


def default_config_text() -> str:
    """Raw YAML of the packaged default configuration."""
    return resources.files("losmap").joinpath("data/default.yaml").read_text()


def parse_config(path: str | Path | None = None, **overrides) -> ExperimentConfig:
    """Load and validate a configuration file; None loads the packaged default.

    Keyword overrides (CLI flags) are applied after file parsing and validated
    by the config dataclass.
    """
    if path is None:
        data = yaml.safe_load(default_config_text())
    else:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            data = yaml.safe_load(path.read_text())
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
    config = _parse_mapping(data or {})
    if overrides:
        overrides = {k: v for k, v in overrides.items() if v is not None}
        if overrides.pop("perfect_los_flag", False):
            overrides["perfect_los"] = True
        try:
            config = replace(config, **overrides)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
        config.layout()
    return config
