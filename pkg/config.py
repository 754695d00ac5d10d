"""
NashOverlap - Configuration
Built-in defaults merged with an optional JSON file; read with dot notation.
"""

import os
import json
import copy
import logging
from pathlib import Path
from typing import Dict, Any, Optional

CONFIG_ENV_VAR = "NASH_OVERLAP_CONFIG"

DEFAULT_CONFIG: Dict[str, Any] = {
    "phase1": {
        "r": 40,
        "k": 100,
        "beta": 0.95,
        "epsilon": 0.0,
        "max_rounds": 1000,
    },
    "phase2": {
        "alpha": 0.5,
        "max_rounds": 1000,
    },
    "run": {
        "seed": 0,
        "threads": None,  # None = available CPUs
    },
    "stats": {
        "bin_width": 0.05,
    },
    "logging": {
        "level": "INFO",
        "file": None,
    },
}


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Recursively merge override into a copy of base"""
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


class Config:
    """Run configuration for NashOverlap"""

    def __init__(self, config_file: Optional[Path] = None):
        if config_file is None:
            env_path = os.getenv(CONFIG_ENV_VAR)
            if env_path:
                config_file = Path(env_path)
            else:
                config_file = Path.home() / ".nash_overlap" / "config.json"
        self.config_file = Path(config_file)
        self._config = self._load_config()

    def _load_config(self) -> Dict[str, Any]:
        """Load configuration from file, falling back to defaults"""
        if not self.config_file.exists():
            return copy.deepcopy(DEFAULT_CONFIG)
        try:
            with open(self.config_file, 'r', encoding='utf-8') as f:
                saved_config = json.load(f)
            return _merge(DEFAULT_CONFIG, saved_config)
        except (OSError, json.JSONDecodeError) as e:
            logging.error(f"Error loading config {self.config_file}: {e}")
            return copy.deepcopy(DEFAULT_CONFIG)

    def _save_config(self):
        """Save configuration to file"""
        try:
            self.config_file.parent.mkdir(parents=True, exist_ok=True)
            with open(self.config_file, 'w', encoding='utf-8') as f:
                json.dump(self._config, f, indent=2)
        except OSError as e:
            logging.error(f"Error saving config: {e}")

    def get(self, key: str, default: Any = None) -> Any:
        """Get configuration value using dot notation"""
        value = self._config
        for k in key.split('.'):
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default
        return value

    def set(self, key: str, value: Any):
        """Set configuration value using dot notation and persist it"""
        keys = key.split('.')
        config = self._config
        for k in keys[:-1]:
            config = config.setdefault(k, {})
        config[keys[-1]] = value
        self._save_config()

    def threads(self) -> int:
        """Worker count for phase 1"""
        configured = self.get("run.threads")
        if configured:
            return int(configured)
        return os.cpu_count() or 1

    def setup_logging(self, level: Optional[str] = None):
        """Setup logging configuration (stderr, plus a file when configured)"""
        handlers = [logging.StreamHandler()]
        log_file = self.get("logging.file")
        if log_file:
            Path(log_file).parent.mkdir(parents=True, exist_ok=True)
            handlers.append(logging.FileHandler(log_file))
        logging.basicConfig(
            level=(level or self.get("logging.level", "INFO")).upper(),
            format='%(asctime)s - %(levelname)s - %(message)s',
            handlers=handlers,
            force=True,
        )


# Global instance (lazy)
_config_instance: Optional[Config] = None


def get_config() -> Config:
    """Get the global configuration"""
    global _config_instance
    if _config_instance is None:
        _config_instance = Config()
    return _config_instance


def reset_config(config_file: Optional[Path] = None) -> Config:
    """Rebuild the global configuration, optionally from a given file"""
    global _config_instance
    _config_instance = Config(config_file)
    return _config_instance
