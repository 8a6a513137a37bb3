import importlib.resources
import json
import logging
from dataclasses import dataclass, field, fields, replace
from os import environ as env
from pathlib import Path
from typing import Any, TypeAlias

import chevron
import dotenv

from .errors import ConfigError

logger = logging.getLogger(__name__)

try:
    dotenv.load_dotenv()
except Exception:
    logger.warning("Could not load environment variables. Continuing without them ...")

TEMPLATES_FOLDER = importlib.resources.files("walkcount").joinpath("templates")
ENV_PREFIX = "WALKCOUNT_"


@dataclass(frozen=True)
class Tolerances:
    """
    Numerical tolerances shared by every module.

    Each field can be overridden with an environment variable named
    `WALKCOUNT_TOL_<FIELD>` (e.g. `WALKCOUNT_TOL_UNITARY=1e-9`).
    """

    unitary: float = 1e-10
    """Max entry of |U†U - I| accepted by the checked constructors"""

    norm: float = 1e-10
    """Max deviation of a state norm from 1"""

    probability: float = 1e-12
    """Max deviation of a probability vector's sum from 1"""

    singular: float = 1e-12
    """|sin| below which the Fourier overlap switches to its limit value"""

    reduction: float = 1e-12
    """Max deviation between the simulated and the reduced walk operator"""

    spectrum: float = 1e-9
    """Eigenvalue agreement with a generic eigensolver"""

    @classmethod
    def from_env(cls) -> "Tolerances":
        overrides: dict[str, float] = {}
        for f in fields(cls):
            key = f"{ENV_PREFIX}TOL_{f.name.upper()}"
            if key in env:
                try:
                    overrides[f.name] = float(env[key])
                except ValueError as e:
                    raise ConfigError(f"{key} must be a float, got {env[key]!r}") from e
        return replace(cls(), **overrides)


TOLERANCES = Tolerances.from_env()
DEFAULT_SEED = int(env.get(f"{ENV_PREFIX}SEED", "20240101"))


@dataclass(frozen=True)
class CircuitOptions:
    full_qft_prep: bool = False
    """
    Prepare the phase-estimation control register with the full QFT on
    |0...0> instead of a layer of Hadamards. Both give the uniform state.
    """


CIRCUIT_OPTIONS = CircuitOptions(
    full_qft_prep=env.get(f"{ENV_PREFIX}FULL_QFT_PREP", "0") not in ("", "0", "false", "False")
)


Schema: TypeAlias = dict[str, tuple[type, Any]]

_COMMON: Schema = {
    "seed": (int, DEFAULT_SEED),
    "out": (str, "."),
    "trials": (int, 2000),
}

SCHEMAS: dict[str, Schema] = {
    "qft-verify": {"p_max": (int, 6)},
    "fourier-fig": {
        "P": (int, 8),
        "omegas": (list, [1.0, 1.5, 2.0]),
        "curves": (list, [3, 30]),
        "resolution": (float, 1e-3),
    },
    "fw-min": {"P_values": (list, [3, 30]), "resolution": (float, 1e-4)},
    "appendix-a": {"P_min": (int, 3), "P_max": (int, 64), "resolution": (float, 1e-3)},
    "grover": {"n_max": (int, 8), "angle_N": (int, 16)},
    "count": {"N": (int, 16), "k": (int, 4), "p": (int, 5)},
    "walk-count": {"n1": (int, 4), "k1": (int, 1), "p": (int, 5), "t": (int, 3), "graph": (str, None)},
    "spectrum": {"n1": (int, 40), "n2": (int, 40), "k1": (int, 2), "k2": (int, 1)},
}


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Validated parameters of a single CLI command.

    :param command: the subcommand name (a key of `SCHEMAS`)
    :param params: every key of the command's schema, filled with defaults
    """

    command: str
    params: dict[str, Any] = field(default_factory=dict)

    def __getitem__(self, key: str) -> Any:
        return self.params[key]

    def json(self) -> dict[str, Any]:
        return {"command": self.command, **self.params}


def _check_type(command: str, key: str, value: Any, expected: type) -> Any:
    if expected is float and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if expected is int and isinstance(value, bool):
        raise ConfigError(f"{command}: '{key}' must be int, got bool")
    if not isinstance(value, expected):
        raise ConfigError(
            f"{command}: '{key}' must be {expected.__name__}, got {type(value).__name__}")
    return value


def load_experiment_config(command: str, path: str | Path | None = None,
                           overrides: dict[str, Any] | None = None) -> ExperimentConfig:
    """
    Build the configuration of `command` from an optional JSON file and flag
    overrides. Flags win over the file; unknown keys are rejected.

    :raises ConfigError: on unknown commands or keys, wrong value types or
        unreadable files
    """
    if command not in SCHEMAS:
        raise ConfigError(f"Unknown command {command!r}")
    schema = _COMMON | SCHEMAS[command]

    raw: dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, "r") as f:
                raw = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"Could not read config {path}: {e}") from e
        if not isinstance(raw, dict):
            raise ConfigError(f"Config {path} must hold a JSON object")
        raw.pop("command", None)

    merged = raw | {k: v for k, v in (overrides or {}).items() if v is not None}

    unknown = sorted(set(merged) - set(schema))
    if unknown:
        raise ConfigError(f"{command}: unknown keys {unknown}")

    params = {
        key: _check_type(command, key, merged[key], expected) if key in merged else default
        for key, (expected, default) in schema.items()
    }
    if params["seed"] < 0 or params["seed"] >= 2**64:
        raise ConfigError(f"{command}: seed must fit an unsigned 64-bit integer")
    if params["trials"] < 1:
        raise ConfigError(f"{command}: trials must be positive")
    return ExperimentConfig(command=command, params=params)


def render_template(name: str, **kwargs) -> str:
    with TEMPLATES_FOLDER.joinpath(f"{name}.mustache").open() as f:
        return chevron.render(f.read(), data=kwargs).strip()
