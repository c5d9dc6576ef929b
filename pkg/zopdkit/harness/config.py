"""
Experiment configuration.

Configurations are INI documents with the sections below; every key is
optional and falls back to the preset of the chosen experiment. List values
are comma separated.

    [experiment]  name, n_iters, seed
    [system]      n_users, p_max, noise, weights, fading_rate
    [policy]      structure, hidden, init
    [steps]       gamma_x, gamma_theta, gamma_lambda_s, gamma_lambda_r, schedule, offset
    [smoothing]   mu_s, mu_r, slack_scale
    [init]        x0, lambda0
    [output]      window, out_dir, mc_n, log_every, figure_stride
    [diag]        mus, sandwich_points, lambda_max
"""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Any, Union

from ..optimization.primal_dual import SCHEDULES, StepSizes
from ..policy.dnn_policy import STRUCTURES
from ..smoothing.gaussian import SmoothingConfig
from ..utils.exceptions import ConfigError

EXPERIMENTS = ["awgn", "mai", "toy", "diag"]
WIRELESS = ("awgn", "mai")
INITS = ["zeros", "uniform"]

Weights = Union[str, tuple[float, ...]]

# (section, key, kind) for every field, in file order
SCHEMA: tuple[tuple[str, str, str], ...] = (
    ("experiment", "name", "str"),
    ("experiment", "n_iters", "int"),
    ("experiment", "seed", "int"),
    ("system", "n_users", "int"),
    ("system", "p_max", "float"),
    ("system", "noise", "floats"),
    ("system", "weights", "weights"),
    ("system", "fading_rate", "float"),
    ("policy", "structure", "str"),
    ("policy", "hidden", "ints"),
    ("policy", "init", "str"),
    ("steps", "gamma_x", "floats"),
    ("steps", "gamma_theta", "floats"),
    ("steps", "gamma_lambda_s", "floats"),
    ("steps", "gamma_lambda_r", "floats"),
    ("steps", "schedule", "str"),
    ("steps", "offset", "float"),
    ("smoothing", "mu_s", "float"),
    ("smoothing", "mu_r", "float"),
    ("smoothing", "slack_scale", "floats"),
    ("init", "x0", "floats"),
    ("init", "lambda0", "floats"),
    ("output", "window", "int"),
    ("output", "out_dir", "str"),
    ("output", "mc_n", "int"),
    ("output", "log_every", "int"),
    ("output", "figure_stride", "int"),
    ("diag", "mus", "floats"),
    ("diag", "sandwich_points", "int"),
    ("diag", "lambda_max", "float"),
)

SECTIONS = tuple(dict.fromkeys(section for section, _, _ in SCHEMA))


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated, immutable experiment settings.

    Raises:
        ConfigError: On any invalid field; the message names ``section.key``.
    """

    name: str = "awgn"
    n_iters: int = 100_000
    seed: int = 0
    n_users: int = 10
    p_max: float = 20.0
    noise: tuple[float, ...] = (1.0,)
    weights: Weights = "random"
    fading_rate: float = 0.5
    structure: str = "per_user"
    hidden: tuple[int, ...] = (8, 4)
    init: str = "zeros"
    gamma_x: tuple[float, ...] = (0.001,)
    gamma_theta: tuple[float, ...] = (0.0008,)
    gamma_lambda_s: tuple[float, ...] = (0.0,)
    gamma_lambda_r: tuple[float, ...] = (0.008,) * 10 + (0.0001,)
    schedule: str = "constant"
    offset: float = 1000.0
    mu_s: float = 0.0
    mu_r: float = 1e-9
    slack_scale: tuple[float, ...] = (0.0,)
    x0: tuple[float, ...] = (1.0,)
    lambda0: tuple[float, ...] = (1.0,)
    window: int = 2000
    out_dir: str = "runs"
    mc_n: int = 10_000
    log_every: int = 10_000
    figure_stride: int = 10
    mus: tuple[float, ...] = (0.1, 0.01, 0.001)
    sandwich_points: int = 1000
    lambda_max: float = 2.0

    def __post_init__(self) -> None:
        self._validate()

    # ============================================================================
    # VALIDATION
    # ============================================================================

    def _validate(self) -> None:
        if self.name not in EXPERIMENTS:
            raise ConfigError("experiment.name", f"unknown experiment {self.name!r}")
        _require(self.n_iters >= 1, "experiment.n_iters", "must be at least 1")
        _require(self.seed >= 0, "experiment.seed", "must be nonnegative")
        _require(self.n_users >= 1, "system.n_users", "must be at least 1")
        _require(self.p_max > 0, "system.p_max", "must be positive")
        _require(all(v > 0 for v in self.noise), "system.noise", "must be positive")
        if isinstance(self.weights, str):
            _require(
                self.weights in ("random", "equal"), "system.weights", "must be random, equal or a list"
            )
        else:
            _require(
                all(v >= 0 for v in self.weights) and sum(self.weights) > 0,
                "system.weights",
                "must be nonnegative with a positive sum",
            )
        _require(self.fading_rate > 0, "system.fading_rate", "must be positive")
        _require(self.structure in STRUCTURES, "policy.structure", f"must be one of {STRUCTURES}")
        _require(all(v >= 1 for v in self.hidden), "policy.hidden", "widths must be positive")
        _require(self.init in INITS, "policy.init", f"must be one of {INITS}")
        for key in ("gamma_x", "gamma_theta", "gamma_lambda_s", "gamma_lambda_r"):
            _require(all(v >= 0 for v in getattr(self, key)), f"steps.{key}", "must be nonnegative")
        _require(self.schedule in SCHEDULES, "steps.schedule", f"must be one of {SCHEDULES}")
        _require(self.offset > 0, "steps.offset", "must be positive")
        _require(self.mu_s >= 0, "smoothing.mu_s", "must be nonnegative")
        _require(self.mu_r >= 0, "smoothing.mu_r", "must be nonnegative")
        _require(all(v >= 0 for v in self.slack_scale), "smoothing.slack_scale", "must be nonnegative")
        _require(all(v >= 0 for v in self.lambda0), "init.lambda0", "must be nonnegative")
        _require(self.window >= 1, "output.window", "must be at least 1")
        _require(self.mc_n >= 1000, "output.mc_n", "must be at least 1000")
        _require(self.log_every >= 0, "output.log_every", "must be nonnegative")
        _require(self.figure_stride >= 1, "output.figure_stride", "must be at least 1")
        _require(len(self.mus) >= 2 and all(v > 0 for v in self.mus), "diag.mus", "needs two or more positive values")
        _require(self.sandwich_points >= 1, "diag.sandwich_points", "must be at least 1")
        _require(self.lambda_max > 0, "diag.lambda_max", "must be positive")
        if self.name == "toy":
            _require(self.n_users == 1, "system.n_users", "the toy program has one user")
            _require(self.p_max == 1.0, "system.p_max", "the toy program allocates on [0, 1]")

        n_metrics = self.n_users if self.name in WIRELESS else 1
        n_service = n_metrics + 1 if self.name in WIRELESS else 1
        for key, section, allowed in (
            ("noise", "system", self.n_users),
            ("gamma_x", "steps", n_metrics),
            ("gamma_lambda_r", "steps", n_service),
            ("slack_scale", "smoothing", n_service),
            ("x0", "init", n_metrics),
            ("lambda0", "init", n_service),
        ):
            length = len(getattr(self, key))
            _require(length in (1, allowed), f"{section}.{key}", f"needs 1 or {allowed} values, got {length}")
        if not isinstance(self.weights, str):
            _require(len(self.weights) == self.n_users, "system.weights", f"needs {self.n_users} values")

    # ============================================================================
    # CONVERSIONS
    # ============================================================================

    def step_sizes(self) -> StepSizes:
        return StepSizes(
            _unwrap(self.gamma_x),
            _unwrap(self.gamma_theta),
            _unwrap(self.gamma_lambda_s),
            _unwrap(self.gamma_lambda_r),
            self.schedule,
            self.offset,
        )

    def smoothing(self) -> SmoothingConfig:
        return SmoothingConfig(self.mu_s, self.mu_r, _unwrap(self.slack_scale))

    def weights_setting(self) -> Any:
        """Weights as understood by the problem builders."""
        if self.weights == "equal":
            return None
        return self.weights

    def with_overrides(self, **changes: Any) -> ExperimentConfig:
        return replace(self, **changes)

    # ============================================================================
    # INI SERIALIZATION
    # ============================================================================

    def to_ini_text(self) -> str:
        values = asdict(self)
        lines: list[str] = []
        for section in SECTIONS:
            if lines:
                lines.append("")
            lines.append(f"[{section}]")
            for sec, key, kind in SCHEMA:
                if sec == section:
                    lines.append(f"{key} = {_format(values[key], kind)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_ini_text(cls, text: str) -> ExperimentConfig:
        """Parse INI text; missing keys take the preset of ``experiment.name``.

        Raises:
            ConfigError: On unknown sections or keys, unparsable values or
                invalid settings.
        """
        parser = configparser.ConfigParser(interpolation=None)
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError("config", f"cannot parse: {exc}") from exc

        kinds = {(section, key): kind for section, key, kind in SCHEMA}
        for section in parser.sections():
            if section not in SECTIONS:
                raise ConfigError(section, "unknown section")
            for key in parser[section]:
                if (section, key) not in kinds:
                    raise ConfigError(f"{section}.{key}", "unknown key")

        name = parser.get("experiment", "name", fallback="awgn").strip()
        base = preset(name) if name in EXPERIMENTS else cls()
        changes: dict[str, Any] = {}
        for section in parser.sections():
            for key, raw in parser[section].items():
                changes[key] = _parse(raw, kinds[(section, key)], f"{section}.{key}")
        return replace(base, **changes)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> ExperimentConfig:
        """Read a configuration file.

        Raises:
            ConfigError: If the file cannot be read or is invalid.
        """
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError("config", f"cannot read {path}: {exc}") from exc
        return cls.from_ini_text(text)


def _require(condition: bool, field: str, message: str) -> None:
    if not condition:
        raise ConfigError(field, message)


def _unwrap(values: tuple[float, ...]) -> Any:
    return values[0] if len(values) == 1 else list(values)


def _format(value: Any, kind: str) -> str:
    if kind in ("floats", "ints"):
        return ", ".join(repr(v) for v in value)
    if kind == "weights":
        return value if isinstance(value, str) else ", ".join(repr(v) for v in value)
    if kind == "float":
        return repr(float(value))
    return str(value)


def _parse(raw: str, kind: str, field: str) -> Any:
    raw = raw.strip()
    try:
        if kind == "str":
            return raw
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "weights" and raw in ("random", "equal"):
            return raw
        items = [item.strip() for item in raw.split(",") if item.strip()]
        if not items:
            raise ValueError("empty list")
        if kind == "ints":
            return tuple(int(item) for item in items)
        return tuple(float(item) for item in items)
    except ValueError as exc:
        raise ConfigError(field, f"cannot parse {raw!r}: {exc}") from exc


# ============================================================================
# PRESETS
# ============================================================================


def preset(name: str) -> ExperimentConfig:
    """Configuration of a named experiment.

    Options:
        - "awgn": 10 users, parallel AWGN channels, 10⁵ iterations
        - "mai": 5 users, interference channel, 3·10⁵ iterations
        - "toy": scalar program with optimum 1; n_users and p_max are fixed at 1
          and the policy is a clamp, so the [policy] keys have no effect
        - "diag": duality diagnostics on small fixtures

    Raises:
        ConfigError: If the name is unknown.
    """
    if name == "awgn":
        return ExperimentConfig(name="awgn", out_dir="runs/awgn")
    if name == "mai":
        return ExperimentConfig(
            name="mai",
            n_iters=300_000,
            n_users=5,
            structure="joint",
            hidden=(32, 16),
            gamma_x=(0.0008,),
            gamma_theta=(0.0005,),
            gamma_lambda_r=(0.005,) * 5 + (0.0001,),
            x0=(0.0,),
            mc_n=2000,
            out_dir="runs/mai",
        )
    if name == "toy":
        return ExperimentConfig(
            name="toy",
            n_users=1,
            p_max=1.0,
            weights="equal",
            gamma_lambda_r=(0.008,),
            x0=(0.0,),
            out_dir="runs/toy",
        )
    if name == "diag":
        return ExperimentConfig(
            name="diag",
            n_iters=1,
            n_users=1,
            weights="equal",
            gamma_lambda_r=(0.008,),
            mu_s=0.1,
            mu_r=0.2,
            x0=(0.0,),
            out_dir="runs/diag",
        )
    raise ConfigError("experiment.name", f"unknown experiment {name!r}")
