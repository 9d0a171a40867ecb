"""Configuration manager for binsleuth."""

import json
import logging
import os
from pathlib import Path
from typing import Optional, Union

import yaml

from ..types import BinSleuthError
from .config_models import AppConfig

CONFIG_ENV_VAR = "BINSLEUTH_CONFIG"
SEED_ENV_VAR = "BINSLEUTH_SEED"


class ConfigError(BinSleuthError):
    """Configuration could not be located or a setting is unusable."""
    pass


class ConfigManager:
    """Loads, validates and exports the application configuration."""

    def __init__(
        self,
        config_file: Optional[Union[str, Path]] = None,
        auto_load: bool = True
    ):
        """Initialize configuration manager.

        Args:
            config_file: Explicit configuration file; falls back to BINSLEUTH_CONFIG
            auto_load: Whether to load configuration automatically
        """
        self.logger = logging.getLogger(__name__)

        if config_file is None and os.environ.get(CONFIG_ENV_VAR):
            config_file = os.environ[CONFIG_ENV_VAR]

        self.config_file: Optional[Path] = Path(config_file) if config_file is not None else None
        self._config: Optional[AppConfig] = None

        if auto_load:
            self.load_config()

    def load_config(self) -> AppConfig:
        """Load configuration from file, or defaults when no file is configured.

        Raises:
            ConfigError: If a configured file does not exist
        """
        if self.config_file is None:
            self.logger.debug("No configuration file configured, using defaults")
            self._config = AppConfig()
            return self._config

        if not self.config_file.exists():
            raise ConfigError(f"Configuration file not found: {self.config_file}")

        try:
            self.logger.info(f"Loading configuration from {self.config_file}")
            with open(self.config_file, 'r', encoding='utf-8') as f:
                if self.config_file.suffix.lower() in ['.yaml', '.yml']:
                    config_data = yaml.safe_load(f) or {}
                else:
                    config_data = json.load(f)

            self._config = AppConfig(**config_data)
            self.logger.info("Configuration loaded successfully")

        except Exception as e:
            self.logger.error(f"Failed to load configuration: {e}")
            self.logger.info("Using default configuration")
            self._config = AppConfig()

        return self._config

    @property
    def config(self) -> AppConfig:
        """Get current application configuration."""
        if self._config is None:
            self._config = self.load_config()
        return self._config

    def resolve_seed(self, flag_seed: Optional[int] = None) -> int:
        """Resolve the master seed: flag, then BINSLEUTH_SEED, then the config file.

        Raises:
            ConfigError: If BINSLEUTH_SEED is not an integer in [0, 2^64)
        """
        if flag_seed is not None:
            seed = flag_seed
        elif os.environ.get(SEED_ENV_VAR):
            raw = os.environ[SEED_ENV_VAR]
            try:
                seed = int(raw, 0)
            except ValueError:
                raise ConfigError(f"{SEED_ENV_VAR} is not an integer: {raw!r}") from None
        else:
            return self.config.seed

        if not 0 <= seed < 2 ** 64:
            raise ConfigError(f"Seed {seed} outside the unsigned 64-bit range")
        return seed

    def update_config(self, **kwargs) -> bool:
        """Update configuration with new values (nested keys as section__field)."""
        try:
            current_data = self.config.model_dump()

            for key, value in kwargs.items():
                if '__' in key:
                    parts = key.split('__')
                    target = current_data
                    for part in parts[:-1]:
                        target = target.setdefault(part, {})
                    target[parts[-1]] = value
                else:
                    current_data[key] = value

            self._config = AppConfig(**current_data)
            return True

        except Exception as e:
            self.logger.error(f"Failed to update configuration: {e}")
            return False

    def dump(self, fmt: str = "yaml") -> str:
        """Render the active configuration as YAML or JSON text."""
        data = self.config.model_dump(mode="json")
        if fmt == "json":
            return json.dumps(data, indent=2, sort_keys=True) + "\n"
        return yaml.safe_dump(data, default_flow_style=False, sort_keys=True, indent=2)

    def export_config(self, export_path: Union[str, Path]) -> bool:
        """Export current configuration to the given file."""
        try:
            export_path = Path(export_path)
            export_path.parent.mkdir(parents=True, exist_ok=True)
            fmt = "yaml" if export_path.suffix.lower() in ['.yaml', '.yml'] else "json"
            export_path.write_text(self.dump(fmt), encoding='utf-8')

            self.logger.info(f"Configuration exported to {export_path}")
            return True

        except Exception as e:
            self.logger.error(f"Failed to export configuration: {e}")
            return False
