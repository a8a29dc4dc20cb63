"""Run configuration: environment defaults, INI files and CLI overrides."""

import configparser
import dataclasses
import logging
import os
import typing
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from dotenv import load_dotenv

from .errors import ConfigError
from .models import RunConfig


# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

COMMANDS = (
    'theta-eval', 'integrate', 'invariants', 'bracket-check',
    'quantize-check', 'legendre-check', 'mathieu-bands',
)
OUTPUT_REQUIRED = ('integrate', 'mathieu-bands')
SYSTEMS = ('poly', 'theta', 'euler')
FORMATS = ('csv', 'json')
LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR')


def get_output_dir() -> Path:
    """
    Directory that relative output paths are resolved against.

    Environment Variables:
        THETA_QUANT_OUTPUT_DIR: Output directory (default: current directory)
    """
    return Path(os.environ.get("THETA_QUANT_OUTPUT_DIR", "."))


def get_log_level() -> str:
    """
    Environment Variables:
        THETA_QUANT_LOG_LEVEL: DEBUG, INFO, WARNING or ERROR (default: INFO)
    """
    level = os.environ.get("THETA_QUANT_LOG_LEVEL", "INFO").upper()
    if level not in LOG_LEVELS:
        raise ConfigError(f"Invalid log level: {level}. Must be one of {', '.join(LOG_LEVELS)}",
                          field="THETA_QUANT_LOG_LEVEL")
    return level


def get_default_threads() -> int:
    """
    Environment Variables:
        THETA_QUANT_THREADS: Worker pool size for band charts (default: 4)
    """
    raw = os.environ.get("THETA_QUANT_THREADS", "4")
    try:
        threads = int(raw)
    except ValueError:
        raise ConfigError(f"expected an integer, got {raw!r}", field="THETA_QUANT_THREADS")
    if threads < 1:
        raise ConfigError(f"must be >= 1, got {threads}", field="THETA_QUANT_THREADS")
    return threads


def parse_complex(text: str) -> complex:
    """
    Parse a complex number written with i or j, e.g. "i", "0.5+2i", "-1j".

    Raises:
        ValueError: If the text is not a complex literal
    """
    cleaned = str(text).strip().replace(' ', '').replace('I', 'j').replace('i', 'j')
    if cleaned in ('j', '+j'):
        return 1j
    if cleaned == '-j':
        return -1j
    if cleaned.endswith('j') and cleaned[-2:-1] in ('+', '-'):
        cleaned = cleaned[:-1] + '1j'
    return complex(cleaned)


def _field_types() -> Dict[str, type]:
    """Concrete type of each RunConfig field, with Optional unwrapped."""
    hints = typing.get_type_hints(RunConfig)
    types = {}
    for f in dataclasses.fields(RunConfig):
        if f.name == 'command':
            continue
        hint = hints[f.name]
        args = [a for a in typing.get_args(hint) if a is not type(None)]
        types[f.name] = args[0] if typing.get_origin(hint) is typing.Union and len(args) == 1 else hint
    return types


def _to_int(value: Any) -> int:
    if isinstance(value, float) and not value.is_integer():
        raise ValueError(f"not an integer: {value}")
    return int(value)


_CONVERTERS = {
    complex: lambda v: v if isinstance(v, complex) else parse_complex(v),
    Path: Path,
    int: _to_int,
    float: float,
    str: lambda v: str(v).strip(),
}


def _convert(name: str, field_type: type, value: Any) -> Any:
    if value is None:
        return None
    try:
        converter = _CONVERTERS[field_type]
    except KeyError:
        raise ConfigError(f"no converter for type {field_type!r}", field=name)
    try:
        return converter(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid value {value!r}: {e}", field=name)


def _read_file(path: Path, command: str) -> Dict[str, str]:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding='utf-8') as handle:
            parser.read_file(handle)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except configparser.MissingSectionHeaderError as e:
        raise ConfigError("missing [section] header", line=e.lineno)
    except configparser.DuplicateOptionError as e:
        raise ConfigError(f"duplicate option {e.option!r} in [{e.section}]", line=e.lineno)
    except configparser.DuplicateSectionError as e:
        raise ConfigError(f"duplicate section [{e.section}]", line=e.lineno)
    except configparser.ParsingError as e:
        lineno, text = e.errors[0]
        raise ConfigError(f"cannot parse {text.strip()!r}", line=lineno)

    values: Dict[str, str] = {}
    for section in ('defaults', command):
        if parser.has_section(section):
            for key, value in parser.items(section):
                values[key.replace('-', '_')] = value
    return values


def validate(config: RunConfig) -> RunConfig:
    """
    Raises:
        ConfigError: Naming the first invalid field
    """
    positive = ('tol', 'fd_tol', 'e_max')
    for name in positive:
        if getattr(config, name) <= 0:
            raise ConfigError(f"must be positive, got {getattr(config, name)}", field=name)
    if config.a_steps < 1:
        raise ConfigError(f"the A grid must be non-empty, got {config.a_steps} steps", field='a_steps')
    if config.a_max < config.a_min:
        raise ConfigError(f"a_max {config.a_max} is below a_min {config.a_min}", field='a_max')
    if config.modes < 8:
        raise ConfigError(f"must be >= 8, got {config.modes}", field='modes')
    if config.threads < 1:
        raise ConfigError(f"must be >= 1, got {config.threads}", field='threads')
    if config.truncation < 4:
        raise ConfigError(f"must be >= 4, got {config.truncation}", field='truncation')
    if config.samples < 1:
        raise ConfigError(f"must be >= 1, got {config.samples}", field='samples')
    if config.tau.imag <= 0:
        raise ConfigError(f"Im(tau) must be positive, got {config.tau}", field='tau')
    if config.system not in SYSTEMS:
        raise ConfigError(f"must be one of {', '.join(SYSTEMS)}, got {config.system!r}", field='system')
    if config.format is not None and config.format not in FORMATS:
        raise ConfigError(f"must be csv or json, got {config.format!r}", field='format')
    if config.command in OUTPUT_REQUIRED and config.out is None:
        raise ConfigError(f"an output path is required for {config.command}", field='out')
    return config


def resolve_output(path: Optional[Path]) -> Optional[Path]:
    """Place relative output paths under THETA_QUANT_OUTPUT_DIR."""
    if path is None or Path(path).is_absolute():
        return path
    return get_output_dir() / path


def load_config(
    path: Optional[Path],
    command: str,
    overrides: Optional[Mapping[str, Any]] = None,
) -> RunConfig:
    """
    Build a validated RunConfig.

    Values come from the dataclass defaults, then the [defaults] and
    [<command>] sections of the INI file, then explicit overrides (CLI flags).
    Keys may use hyphens or underscores; overrides equal to None are ignored.

    Args:
        path: Optional INI file
        command: Subcommand name
        overrides: Flag values keyed by field name

    Returns:
        Validated configuration

    Raises:
        ConfigError: With the line number for parse errors or the field name
            for validation errors
    """
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    types = _field_types()
    merged: Dict[str, Any] = {}
    if path is not None:
        for key, value in _read_file(Path(path), command).items():
            if key not in types:
                raise ConfigError("unknown option", field=key)
            merged[key] = value
    for key, value in (overrides or {}).items():
        key = key.replace('-', '_')
        if value is None:
            continue
        if key not in types:
            raise ConfigError("unknown option", field=key)
        merged[key] = value

    converted = {key: _convert(key, types[key], value) for key, value in merged.items()}
    if converted.get('format') is not None:
        converted['format'] = converted['format'].lower()
    if 'threads' not in converted:
        converted['threads'] = get_default_threads()
    config = validate(RunConfig(command=command, **converted))
    logger.debug(f"Loaded configuration for {command}: {config}")
    return config
