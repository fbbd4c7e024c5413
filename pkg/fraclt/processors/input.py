"""
Input processing for the fraclt package.
Reads experiment files (flat key = value text with [section] headers),
layers them over environment defaults and command line overrides, and
validates the result into an ExperimentConfig.
"""

import io
import logging
import os
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Optional, Tuple, Union

from dotenv import load_dotenv
from dotenv.parser import parse_stream

from ..core.types import (
    ExperimentConfig,
    FunctionId,
    ProcessKind,
    ProcessSpec,
    SamplerType,
    VerifySettings,
)
from ..exceptions import ConfigurationError, FracltError
from ..utils import SEED_MASK, is_power_of_two

logger = logging.getLogger(__name__)

RawConfig = Dict[str, Dict[str, str]]

ENVIRONMENT_KEYS = {
    "FRACLT_THREADS": "threads",
    "FRACLT_CHOLESKY_CAP": "cholesky_cap",
    "FRACLT_OUTPUT_DIR": "output_dir",
}


def _text(value: str) -> str:
    return value.strip()


def _integer(value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigurationError(f"Expected an integer, got {value!r}")


def _real(value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigurationError(f"Expected a number, got {value!r}")


def _seed(value: str) -> int:
    seed = _integer(value)
    if not 0 <= seed <= SEED_MASK:
        raise ConfigurationError(f"Seeds are unsigned 64-bit integers, got {seed}")
    return seed


def _reals(value: str) -> Tuple[float, ...]:
    return tuple(_real(part) for part in value.split(",") if part.strip())


def _names(value: str) -> Tuple[str, ...]:
    return tuple(part.strip() for part in value.split(",") if part.strip())


def _flag(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"Expected a boolean, got {value!r}")


def _window(value: str) -> Tuple[float, float]:
    bounds = _reals(value)
    if len(bounds) != 2 or not 0.0 < bounds[0] < bounds[1]:
        raise ConfigurationError(f"Expected a window 'lo, hi' with 0 < lo < hi, got {value!r}")
    return bounds


# section -> key -> (field name, converter)
SCHEMA: Dict[str, Dict[str, Tuple[str, Callable[[str], Any]]]] = {
    "process": {
        "kind": ("kind", _text),
        "tau": ("tau", _real),
        "horizon": ("horizon", _real),
        "n_steps": ("n_steps", _integer),
        "sampler": ("sampler", _text),
    },
    "function": {
        "id": ("function_id", _text),
        "params": ("function_params", _reals),
    },
    "experiment": {
        "replicates": ("replicates", _integer),
        "seed": ("master_seed", _seed),
        "lambda_ladder": ("lambda_ladder", _reals),
        "output_dir": ("output_dir", _text),
        "threads": ("threads", _integer),
        "cholesky_cap": ("cholesky_cap", _integer),
        "write_paths": ("write_paths", _flag),
        "write_field": ("write_field", _flag),
    },
    "verify": {
        "checks": ("checks", _names),
        "nu": ("nu", _real),
        "translation_offset": ("translation_offset", _real),
        "scale_lambdas": ("scale_lambdas", _reals),
        "rate_horizon": ("rate_horizon", _real),
        "rate_steps": ("rate_steps", _integer),
        "rate_window": ("rate_window", _window),
        "lil_horizon": ("lil_horizon", _real),
        "lil_steps": ("lil_steps", _integer),
        "lil_window": ("lil_window", _window),
        "n_times": ("n_times", _integer),
        "n_levels": ("n_levels", _integer),
        "n_boot": ("n_boot", _integer),
        "min_ensemble": ("min_ensemble", _integer),
        "min_rate_replicates": ("min_rate_replicates", _integer),
        "limit_function": ("limit_function", _text),
        "limit_params": ("limit_params", _reals),
    },
}

_VERIFY_FIELDS = {name for key, (name, _) in SCHEMA["verify"].items() if key != "checks"}


class ConfigProcessor:
    """Parse, merge and validate experiment configuration"""

    def __init__(self, environ: Optional[Mapping[str, str]] = None, use_dotenv: bool = True):
        """
        Initialize the processor.

        Args:
            environ: Environment mapping (defaults to os.environ)
            use_dotenv: Read an optional .env file into the environment first
        """
        if use_dotenv and environ is None:
            load_dotenv()
        self.environ = os.environ if environ is None else environ

    def parse(self, text: str) -> RawConfig:
        """
        Split experiment text into sections of raw string values.

        Raises:
            ConfigurationError: On malformed lines, unknown sections or keys,
                or keys outside any section
        """
        sections: RawConfig = {}
        current: Optional[str] = None
        for binding in parse_stream(io.StringIO(text)):
            line = binding.original.line
            if binding.error:
                raise ConfigurationError(f"Malformed line {line}: {binding.original.string.strip()!r}")
            if binding.key is None:
                continue
            key = binding.key.strip()
            if binding.value is None and key.startswith("[") and key.endswith("]"):
                current = key[1:-1].strip()
                if current not in SCHEMA:
                    raise ConfigurationError(f"Unknown section [{current}] on line {line}")
                sections.setdefault(current, {})
                continue
            if current is None:
                raise ConfigurationError(f"Key {key!r} on line {line} is outside any section")
            if key not in SCHEMA[current]:
                raise ConfigurationError(f"Unknown key {key!r} in section [{current}]")
            if binding.value is None:
                raise ConfigurationError(f"Key {key!r} in section [{current}] has no value")
            sections[current][key] = binding.value
        return sections

    def read(self, path: Union[str, Path]) -> RawConfig:
        """Parse an experiment file"""
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigurationError(f"Cannot read config file {path}: {e}")
        return self.parse(text)

    def environment_defaults(self) -> Dict[str, Any]:
        """Experiment values supplied by FRACLT_* variables"""
        defaults: Dict[str, Any] = {}
        for variable, name in ENVIRONMENT_KEYS.items():
            value = self.environ.get(variable)
            if value:
                defaults[name] = value if name == "output_dir" else _integer(value)
        return defaults

    def build(self, raw: RawConfig, overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
        """
        Merge environment, file and overrides (in increasing priority).

        Args:
            raw: Parsed experiment file
            overrides: Already-typed values keyed by ExperimentConfig field
                name (seed as master_seed)

        Returns:
            ExperimentConfig: Validated configuration
        """
        values: Dict[str, Any] = self.environment_defaults()
        for section, entries in raw.items():
            for key, text in entries.items():
                name, convert = SCHEMA[section][key]
                values[name] = convert(text)
        values.update({k: v for k, v in (overrides or {}).items() if v is not None})

        process = ProcessSpec(
            kind=values.pop("kind", ProcessKind.FBM),
            tau=values.pop("tau", 0.5),
            horizon=values.pop("horizon", 1.0),
            n_steps=values.pop("n_steps", 1024),
            sampler=values.pop("sampler", SamplerType.CHOLESKY),
        )
        verify = VerifySettings(**{k: values.pop(k) for k in list(values) if k in _VERIFY_FIELDS})
        config = ExperimentConfig(process=process, verify=verify, **values)
        self.validate(config)
        return config

    def load(self, path: Optional[Union[str, Path]] = None, overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
        """Read, merge and validate"""
        raw = self.read(path) if path is not None else {}
        return self.build(raw, overrides)

    def validate(self, config: ExperimentConfig) -> None:
        """
        Check cross-field constraints.

        Raises:
            ConfigurationError: If the configuration is inconsistent
        """
        from ..analysis.checks import CheckRegistry

        spec = config.process
        if spec.kind not in ProcessKind.ALL:
            raise ConfigurationError(f"Unknown process kind: {spec.kind}")
        if spec.sampler not in SamplerType.ALL:
            raise ConfigurationError(f"Unknown sampler: {spec.sampler}")
        if spec.sampler == SamplerType.CIRCULANT and not is_power_of_two(spec.n_steps):
            raise ConfigurationError(
                f"The circulant sampler needs n_steps to be a power of two, got {spec.n_steps}"
            )
        if spec.sampler == SamplerType.CHOLESKY and spec.n_steps > config.cholesky_cap:
            raise ConfigurationError(
                f"n_steps={spec.n_steps} exceeds the Cholesky cap {config.cholesky_cap}"
            )
        if config.replicates < 1:
            raise ConfigurationError(f"replicates must be >= 1, got {config.replicates}")
        if config.threads < 1:
            raise ConfigurationError(f"threads must be >= 1, got {config.threads}")
        ladder = config.lambda_ladder
        if not ladder or ladder[0] != 1.0:
            raise ConfigurationError("lambda_ladder must start at 1")
        if any(b <= a for a, b in zip(ladder, ladder[1:])):
            raise ConfigurationError("lambda_ladder must be strictly increasing")
        if any(lam <= 0.0 for lam in config.verify.scale_lambdas):
            raise ConfigurationError("scale_lambdas must be positive")
        for name in config.checks:
            CheckRegistry.get(name)
        if FunctionId.COMBINATION in (config.function_id, config.verify.limit_function):
            raise ConfigurationError("Combinations cannot be configured from a file; use the API")
        try:
            config.make_function()
            config.verify.make_limit_function().require_nonzero_mean()
        except FracltError as e:
            raise ConfigurationError(f"Invalid test function: {e}")
        logger.debug("Validated configuration %s", config)
