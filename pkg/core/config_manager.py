"""
Config Manager - configuration loading for sweeps and collocation runs

This module provides:
- Multiple formats (YAML, JSON, flat `key = value` files)
- Environment variable overrides
- Profile support (e.g. sweep.quick.yaml)
- Type coercion to the config dataclass fields
- Validation through the config's own validate()

Priority order (highest to lowest):
0. Explicit overrides passed to load() (command-line flags)
1. Environment variables {NAME}_{KEY}
2. Profile file {name}.{profile}.{yaml|yml|json|cfg|conf}
3. Base file {name}.{yaml|yml|json|cfg|conf}
4. Default values in the dataclass
"""

import configparser
import json
import logging
import os
from dataclasses import fields, is_dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Type, Union, get_args, get_origin

import yaml

from core.exceptions import ConfigError


logger = logging.getLogger('ConfigManager')

PROFILE_ENV = "LSRBF_PROFILE"
SUPPORTED_SUFFIXES = ('.yaml', '.yml', '.json', '.cfg', '.conf')
_FLAT_SECTION = "lsrbf"
_NONE_WORDS = ('', 'none', 'null')
_TRUE_WORDS = ('true', '1', 'yes', 'on')
_FALSE_WORDS = ('false', '0', 'no', 'off')


# ============================================================================
# TYPE COERCION
# ============================================================================

def _coerce(value: Any, annotation: Any) -> Any:
    """Convert a raw file/env value to the annotated field type"""
    origin = get_origin(annotation)
    args = get_args(annotation)

    if origin is Union:
        inner = [a for a in args if a is not type(None)]
        if value is None or (isinstance(value, str) and value.strip().lower() in _NONE_WORDS):
            return None
        return _coerce(value, inner[0]) if len(inner) == 1 else value

    if origin in (tuple, list):
        items = value
        if isinstance(value, str):
            items = [v for v in value.strip().strip('()[]').split(',') if v.strip()]
        element = args[0] if args else str
        converted = [_coerce(v, element) for v in items]
        return tuple(converted) if origin is tuple else converted

    if annotation is bool:
        if isinstance(value, str):
            word = value.strip().lower()
            if word in _TRUE_WORDS:
                return True
            if word in _FALSE_WORDS:
                return False
            raise ValueError(f"not a boolean: {value!r}")
        return bool(value)
    if annotation is int:
        if isinstance(value, float) and not value.is_integer():
            raise ValueError(f"not an integer: {value!r}")
        return int(float(value)) if isinstance(value, str) else int(value)
    if annotation is float:
        return float(value)
    if annotation is str:
        return str(value).strip() if isinstance(value, str) else str(value)
    return value


def coerce_fields(data: Dict, config_class: Type) -> Dict:
    """
    Keep the keys that are fields of config_class and convert their values.

    Raises:
        ConfigError: Listing every value that could not be converted
    """
    if not is_dataclass(config_class):
        return dict(data)
    types = {f.name: f.type for f in fields(config_class)}
    result, errors = {}, []
    for key, value in data.items():
        if key not in types:
            logger.debug(f"Ignoring unknown config key '{key}'")
            continue
        try:
            result[key] = _coerce(value, types[key])
        except (TypeError, ValueError) as e:
            errors.append(f"{key}: {e}")
    if errors:
        raise ConfigError("Invalid config values", errors)
    return result


# ============================================================================
# FILE FORMATS
# ============================================================================

def _read_flat(filepath: Path) -> Dict:
    """`key = value` lines with # comments, no section header"""
    parser = configparser.ConfigParser(inline_comment_prefixes=('#',), interpolation=None)
    parser.optionxform = str    # keep key case (T is not t)
    text = filepath.read_text(encoding='utf-8')
    parser.read_string(f"[{_FLAT_SECTION}]\n{text}")
    return dict(parser[_FLAT_SECTION])


def read_config_file(filepath: Union[str, Path]) -> Dict:
    """
    Raw dictionary from a YAML, JSON or flat key-value file.

    Raises:
        ConfigError: On unreadable or malformed files
    """
    filepath = Path(filepath)
    if filepath.suffix not in SUPPORTED_SUFFIXES:
        raise ConfigError(f"Unsupported config format: {filepath.suffix}")
    try:
        if filepath.suffix in ('.cfg', '.conf'):
            data = _read_flat(filepath)
        else:
            with open(filepath, 'r', encoding='utf-8') as f:
                data = yaml.safe_load(f) if filepath.suffix in ('.yaml', '.yml') else json.load(f)
    except OSError as e:
        raise ConfigError(f"Cannot read config file {filepath}", [str(e)]) from e
    except (yaml.YAMLError, json.JSONDecodeError, configparser.Error) as e:
        raise ConfigError(f"Malformed config file {filepath}", [str(e)]) from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {filepath} must hold a mapping")
    return data


def build_config(data: Dict, config_class: Type) -> Any:
    """
    Instantiate and validate a config dataclass from raw values.

    Raises:
        ConfigError: On conversion failures or validation messages
    """
    values = coerce_fields(data, config_class)
    try:
        config = config_class.from_dict(values) if hasattr(config_class, 'from_dict') else config_class(**values)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Cannot build {config_class.__name__}", [str(e)]) from e
    errors = config.validate() if hasattr(config, 'validate') else []
    if errors:
        raise ConfigError(f"Invalid {config_class.__name__}", errors)
    return config


class ConfigManager:
    """
    Hierarchical configuration loading.

    Usage:
        config_manager = ConfigManager(config_dir="config")
        config = config_manager.load("sweep", SweepConfig)

        # Override with environment variables:
        # export SWEEP_TAU=1e-6
        # export LSRBF_PROFILE=quick
    """

    def __init__(self, config_dir: Union[str, Path] = "config"):
        self.config_dir = Path(config_dir)
        self.profile = os.getenv(PROFILE_ENV, "default")
        logger.debug(f"ConfigManager: directory={self.config_dir}, profile={self.profile}")

    def _find(self, stem: str) -> Optional[Path]:
        for suffix in SUPPORTED_SUFFIXES:
            candidate = self.config_dir / f"{stem}{suffix}"
            if candidate.exists():
                return candidate
        return None

    def load(self, name: str, config_class: Type, profile: Optional[str] = None,
             overrides: Optional[Dict] = None) -> Any:
        """
        Load configuration with hierarchical override.

        Args:
            name: Config name (e.g. "sweep", "pde")
            config_class: Dataclass type to instantiate
            profile: Profile name (overrides LSRBF_PROFILE)
            overrides: Values applied last (command-line flags); None entries are skipped

        Raises:
            ConfigError: If files are malformed or the result fails validation
        """
        profile = profile or self.profile
        logger.info(f"Loading config '{name}' with profile '{profile}'")

        config_data: Dict = {}
        base_file = self._find(name)
        if base_file is not None:
            logger.info(f"  Loading base: {base_file.name}")
            config_data = read_config_file(base_file)
        else:
            logger.warning(f"  No base config found for '{name}', using defaults")

        if profile and profile != "default":
            profile_file = self._find(f"{name}.{profile}")
            if profile_file is not None:
                logger.info(f"  Loading profile: {profile_file.name}")
                config_data = self._merge_configs(config_data, read_config_file(profile_file))
            else:
                logger.warning(f"  Profile '{profile}' has no file for '{name}'")

        config_data = self._apply_env_overrides(config_data, name, config_class)
        config_data.update({k: v for k, v in (overrides or {}).items() if v is not None})
        config = build_config(config_data, config_class)
        logger.info(f"Config '{name}' loaded")
        return config

    def save(self, name: str, config: Any, format: str = "yaml", profile: Optional[str] = None) -> Path:
        """Write a config as YAML, JSON or flat key-value text"""
        data = config.to_dict() if hasattr(config, 'to_dict') else dict(config.__dict__)
        stem = f"{name}.{profile}" if profile and profile != "default" else name
        filepath = self.config_dir / f"{stem}.{format}"
        self.config_dir.mkdir(parents=True, exist_ok=True)

        with open(filepath, 'w', encoding='utf-8') as f:
            if format in ('yaml', 'yml'):
                yaml.safe_dump(data, f, default_flow_style=False, sort_keys=False)
            elif format == 'json':
                json.dump(data, f, indent=2)
            elif format in ('cfg', 'conf'):
                for key, value in data.items():
                    if isinstance(value, (list, tuple)):
                        value = ", ".join(str(v) for v in value)
                    f.write(f"{key} = {'none' if value is None else value}\n")
            else:
                raise ConfigError(f"Unsupported format: {format}")

        logger.info(f"Saved config to {filepath}")
        return filepath

    def _merge_configs(self, base: Dict, override: Dict) -> Dict:
        """Deep merge two config dictionaries"""
        result = base.copy()
        for key, value in override.items():
            if key in result and isinstance(result[key], dict) and isinstance(value, dict):
                result[key] = self._merge_configs(result[key], value)
            else:
                result[key] = value
        return result

    def _apply_env_overrides(self, config: Dict, prefix: str, config_class: Type) -> Dict:
        """
        Apply {PREFIX}_{KEY} environment variables, for every field of
        config_class (not only keys present in the files).
        """
        names = [f.name for f in fields(config_class)] if is_dataclass(config_class) else list(config)
        result = dict(config)
        applied = 0
        for key in names:
            env_key = f"{prefix.upper()}_{key.upper()}"
            if env_key in os.environ:
                result[key] = os.environ[env_key]
                logger.info(f"  Override from env: {key} = {result[key]}")
                applied += 1
        if applied:
            logger.info(f"  Applied {applied} environment override(s)")
        return result

    def list_configs(self) -> List[str]:
        """Base names of the config files in config_dir"""
        names = set()
        for filepath in self.config_dir.glob("*"):
            if filepath.suffix in SUPPORTED_SUFFIXES:
                names.add(filepath.name.split('.')[0])
        return sorted(names)

    def create_template(self, name: str, config_class: Type, format: str = "yaml") -> Path:
        """Config file holding the default values of config_class"""
        return self.save(name, config_class(), format=format)


def load_config(name: str, config_class: Type, config_dir: str = "config",
                profile: Optional[str] = None) -> Any:
    """
    Load a named config in one line.

    Example:
        from core.config_manager import load_config
        from engines.sweep_engine import SweepConfig

        config = load_config("sweep", SweepConfig)
    """
    return ConfigManager(config_dir).load(name, config_class, profile)


def load_config_file(path: Union[str, Path], config_class: Type,
                     overrides: Optional[Dict] = None) -> Any:
    """
    Load one explicit file (the CLI --config flag); overrides win over file values.

    Raises:
        ConfigError: On missing, malformed or invalid configuration
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}")
    data = read_config_file(path)
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return build_config(data, config_class)
