# magblock/core/config.py
# RunConfig: defaults < config file < MAGBLOCK_WORKERS < --key value overrides.

from __future__ import annotations

import dataclasses
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from magblock.core.errors import ConfigError, MagblockError
from magblock.core.model import MIN_DIM, SystemParams
from magblock.core.operators import Mode
from magblock.core.parallel import resolve_workers

logger = logging.getLogger(__name__)

CONFIG_FILE_NAME = "magblock.json"

UNITS = ("kappa", "hz")
ENGINES = ("analytic", "numeric", "both")
MODES = ("magnon", "cavity", "both")
DEPHASING_TARGETS = ("cavity", "magnon", "combined", "both")

# Keys holding rates or frequencies; in hz mode they are read as rate/2pi in Hz.
RATE_KEYS = ("kappa_c", "kappa_m", "omega_b", "g_mb", "g_mc", "drive", "gamma_p")

# Environment-dependent keys kept out of result files.
RUNTIME_KEYS = ("workers",)

PREAMBLE_META_PREFIX = "meta."


@dataclass(frozen=True)
class RunConfig:
    """
    Fully resolved settings of one command run.

    Rate keys are stored in the unit named by `units`; `system_params()`
    converts them to units of kappa. Every detuning and squeezing key
    (`delta`, `delta_c`, `delta_m`, `lam`, the detuning ranges and `lambdas`)
    is a multiple of omega_b. gamma_p_list is in units of kappa, times in
    microseconds. dephasing_target `both` runs the cavity and magnon
    channels as separate families; `combined` puts both in one Liouvillian.
    """
    units: str = "kappa"
    kappa_hz: float = 1e6
    kappa_c: float = 1.0
    kappa_m: float = 1.0
    delta: float = 9.03
    delta_c: Optional[float] = None
    delta_m: Optional[float] = None
    omega_b: float = 1.0
    g_mb: float = 3.0
    g_mc: float = 0.5
    lam: float = 2e-4
    theta: float = 0.0
    drive: float = 0.01
    gamma_p: float = 0.0
    dim_m: int = 6
    dim_c: int = 6
    engine: str = "analytic"
    mode: str = "magnon"
    output: str = "magblock_out"
    delta_min: float = -2.0
    delta_max: float = 12.0
    n_points: int = 200
    lambdas: Tuple[float, ...] = (2e-4,)
    tau_max_us: float = 3.0
    n_tau: int = 301
    t_max_us: float = 2.0
    n_t: int = 201
    gamma_p_list: Tuple[float, ...] = (0.0, 0.1, 0.5, 1.0)
    dephasing_target: str = "both"
    lambda_min: float = 0.0
    lambda_max: float = 1e-3
    workers: int = 1
    convergence_check: bool = False

    def __post_init__(self):
        _choice("units", self.units, UNITS)
        _choice("engine", self.engine, ENGINES)
        _choice("mode", self.mode, MODES)
        _choice("dephasing_target", self.dephasing_target, DEPHASING_TARGETS)
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            values = value if isinstance(value, tuple) else (value,)
            for v in values:
                if isinstance(v, float) and not math.isfinite(v):
                    raise ConfigError(f"{f.name} must be finite, got {v}.")
        if self.kappa_hz <= 0:
            raise ConfigError(f"kappa_hz must be positive, got {self.kappa_hz}.")
        if not self.output.strip():
            raise ConfigError("output must be a non-empty path.")
        if self.delta_max <= self.delta_min:
            raise ConfigError(f"Detuning range [{self.delta_min}, {self.delta_max}] is empty.")
        if self.lambda_max < self.lambda_min or self.lambda_min < 0:
            raise ConfigError(f"Squeezing range [{self.lambda_min}, {self.lambda_max}] is invalid.")
        for name in ("n_points", "n_tau", "n_t"):
            if getattr(self, name) < 2:
                raise ConfigError(f"{name} must be at least 2, got {getattr(self, name)}.")
        for name in ("dim_m", "dim_c"):
            if getattr(self, name) < MIN_DIM:
                raise ConfigError(f"{name} must be at least {MIN_DIM}, got {getattr(self, name)}.")
        if self.tau_max_us <= 0 or self.t_max_us <= 0:
            raise ConfigError("tau_max_us and t_max_us must be positive.")
        if not self.lambdas:
            raise ConfigError("lambdas must hold at least one value.")
        if any(v < 0 for v in self.lambdas):
            raise ConfigError(f"lambdas must be non-negative, got {self.lambdas}.")
        if not self.gamma_p_list:
            raise ConfigError("gamma_p_list must hold at least one value.")
        if any(v < 0 for v in self.gamma_p_list):
            raise ConfigError(f"gamma_p_list must be non-negative, got {self.gamma_p_list}.")
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}.")

    def rate_scale(self) -> float:
        """Divisor turning a stored rate into units of kappa."""
        return self.kappa_hz if self.units == "hz" else 1.0

    def system_params(self) -> SystemParams:
        scale = self.rate_scale()
        omega_b = self.omega_b / scale
        delta_c = self.delta if self.delta_c is None else self.delta_c
        delta_m = self.delta if self.delta_m is None else self.delta_m
        try:
            return SystemParams(
                kappa_c=self.kappa_c / scale,
                kappa_m=self.kappa_m / scale,
                delta_c=delta_c * omega_b,
                delta_m=delta_m * omega_b,
                omega_b=omega_b,
                g_mb=self.g_mb / scale,
                g_mc=self.g_mc / scale,
                lam=self.lam * omega_b,
                theta=self.theta,
                drive=self.drive / scale,
                gamma_p=self.gamma_p / scale,
            )
        except MagblockError as e:
            raise ConfigError(f"Invalid physical parameters: {e}") from e

    def modes(self) -> List[Mode]:
        return [Mode.MAGNON, Mode.CAVITY] if self.mode == "both" else [Mode(self.mode)]

    def engines(self) -> List[str]:
        return ["analytic", "numeric"] if self.engine == "both" else [self.engine]

    def dephasing_targets(self) -> List[str]:
        return ["cavity", "magnon"] if self.dephasing_target == "both" else [self.dephasing_target]

    def us_to_kappa(self, t_us: float) -> float:
        """Microseconds to units of 1/kappa, kappa = 2 pi kappa_hz."""
        return t_us * 1e-6 * 2.0 * math.pi * self.kappa_hz

    def as_items(self) -> List[Tuple[str, str]]:
        """(key, text) pairs in field order, in the syntax the loader reads back."""
        return [(f.name, format_value(getattr(self, f.name))) for f in dataclasses.fields(self)
                if f.name not in RUNTIME_KEYS]

    def as_json(self) -> Dict[str, Any]:
        data = dataclasses.asdict(self)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in data.items()}


FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}
DEFAULTS = {name: f.default for name, f in FIELDS.items()}


def _choice(name: str, value: str, allowed: Sequence[str]):
    if value not in allowed:
        raise ConfigError(f"{name} must be one of {', '.join(allowed)}, got '{value}'.")


def format_value(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ",".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _kind(name: str) -> str:
    default = DEFAULTS[name]
    if isinstance(default, bool):
        return "bool"
    if isinstance(default, tuple):
        return "list"
    if isinstance(default, int):
        return "int"
    if isinstance(default, str):
        return "str"
    return "float"


def coerce(name: str, value: Any) -> Any:
    """Converts a raw file/command-line value to the type of RunConfig field `name`."""
    name = normalize_key(name)
    kind = _kind(name)
    try:
        if isinstance(value, str):
            text = value.strip()
            if text.lower() in ("none", "") and FIELDS[name].default is None:
                return None
            if kind == "bool":
                if text.lower() in ("1", "true", "yes", "on"):
                    return True
                if text.lower() in ("0", "false", "no", "off"):
                    return False
                raise ValueError(f"not a boolean: '{text}'")
            if kind == "list":
                return tuple(float(part) for part in text.split(",") if part.strip())
            if kind == "int":
                return int(text)
            if kind == "str":
                return text
            return float(text)
        if value is None and FIELDS[name].default is None:
            return None
        if kind == "list":
            items = value if isinstance(value, (list, tuple)) else [value]
            return tuple(float(v) for v in items)
        if kind == "bool":
            return bool(value)
        if kind == "int":
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(f"not an integer: {value}")
            return int(value)
        if kind == "str":
            return str(value)
        return float(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid value for '{name}': {value!r} ({e})") from e


def normalize_key(key: str) -> str:
    name = key.strip().lstrip("-").replace("-", "_")
    if name == "lambda":
        name = "lam"
    if name not in FIELDS:
        raise ConfigError(f"Unknown config key '{key}'.")
    return name


def _parse_key_value_lines(lines: Iterable[str], source: str, preamble: bool = False) -> Dict[str, str]:
    values = {}
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if preamble:
            if not line.startswith("#"):
                break
            line = line[1:].strip()
        elif line.startswith("#") or not line:
            continue
        if not line:
            continue
        if "=" not in line:
            if preamble:
                continue
            raise ConfigError(f"{source}:{number}: expected 'key = value', got '{raw.rstrip()}'.")
        key, value = (part.strip() for part in line.split("=", 1))
        if preamble and key.startswith(PREAMBLE_META_PREFIX):
            continue
        values[key] = value
    return values


def load_config_file(path: Path) -> Dict[str, Any]:
    """
    Reads a flat config file: a JSON object (*.json), the '#' preamble of a CSV
    written by magblock (*.csv), or 'key = value' lines with '#' comments.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file '{path}' does not exist.")
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Could not read config file '{path}': {e}") from e

    if path.suffix == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"Config file '{path}' is not valid JSON: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"Config file '{path}' must hold a flat JSON object.")
        nested = [k for k, v in data.items() if isinstance(v, dict)]
        if nested:
            raise ConfigError(f"Config file '{path}' must be flat, found nested keys {nested}.")
        return data
    return _parse_key_value_lines(text.splitlines(), str(path), preamble=path.suffix == ".csv")


def parse_overrides(args: Sequence[str]) -> Dict[str, str]:
    """Turns ['--n-points', '50', '--mode=cavity'] into {'n_points': '50', 'mode': 'cavity'}."""
    overrides = {}
    args = list(args)
    k = 0
    while k < len(args):
        token = args[k]
        if not token.startswith("--"):
            raise ConfigError(f"Unexpected argument '{token}', overrides look like '--key value'.")
        if "=" in token:
            key, value = token.split("=", 1)
            k += 1
        else:
            if k + 1 >= len(args):
                raise ConfigError(f"Override '{token}' is missing its value.")
            key, value = token, args[k + 1]
            k += 2
        overrides[normalize_key(key)] = value
    return overrides


def _scaled_defaults(units: str, kappa_hz: float) -> Dict[str, Any]:
    defaults = dict(DEFAULTS)
    if units == "hz":
        for key in RATE_KEYS:
            if defaults[key] is not None:
                defaults[key] = defaults[key] * kappa_hz
    return defaults


def resolve_config(config_path: Optional[Path] = None, overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """Merges defaults, the config file, MAGBLOCK_WORKERS and overrides into a RunConfig."""
    layered: Dict[str, Any] = {}
    if config_path is not None:
        for key, value in load_config_file(config_path).items():
            layered[normalize_key(key)] = value
        logger.debug("Loaded %d keys from %s", len(layered), config_path)
    override_keys = set()
    for key, value in (overrides or {}).items():
        name = normalize_key(key)
        layered[name] = value
        override_keys.add(name)

    values = {key: coerce(key, value) for key, value in layered.items()}
    units = values.get("units", DEFAULTS["units"])
    _choice("units", units, UNITS)
    merged = _scaled_defaults(units, values.get("kappa_hz", DEFAULTS["kappa_hz"]))
    merged.update(values)
    if "workers" not in override_keys:
        merged["workers"] = resolve_workers(values.get("workers", DEFAULTS["workers"]))
    return RunConfig(**merged)


def write_default_config(path: Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(RunConfig().as_json(), indent=2) + "\n", encoding="utf-8")
    return path
