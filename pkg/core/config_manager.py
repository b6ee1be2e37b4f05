import os
import json
import logging
from typing import Dict, Any, Optional

from dotenv import load_dotenv

# Settings every run can fall back to
DEFAULT_SETTINGS: Dict[str, Any] = {
    "output_dir": "runs",
    "scheme": "split-step",
    "resolution_scale": 1.0,
    "fft_workers": 1,
    "log_level": "INFO",
}

# Environment variables that override the settings file
ENV_OVERRIDES = {
    "ACCELWAVE_OUT": ("output_dir", str),
    "ACCELWAVE_SCHEME": ("scheme", str),
    "ACCELWAVE_THREADS": ("fft_workers", int),
    "ACCELWAVE_LOG_LEVEL": ("log_level", str),
}


class ConfigManager:
    """Manages user settings for accelwave runs"""

    def __init__(self, config_file: str = "accelwave_config.json", env_file: Optional[str] = None):
        self.config_file = config_file
        self.logger = logging.getLogger(__name__)
        load_dotenv(env_file)
        self.config = self.load_config()

    def load_config(self) -> Dict[str, Any]:
        """Load configuration from file"""
        try:
            if os.path.exists(self.config_file):
                with open(self.config_file, 'r') as f:
                    return json.load(f)
            return {}
        except Exception as e:
            logging.error(f"Error loading config: {str(e)}")
            return {}

    def save_config(self) -> bool:
        """Save current configuration to file"""
        try:
            with open(self.config_file, 'w') as f:
                json.dump(self.config, f, indent=2)
            return True
        except Exception as e:
            logging.error(f"Error saving config: {str(e)}")
            return False

    def get(self, key: str, default: Any = None) -> Any:
        """Get a setting: environment override, then settings file, then built-in default"""
        for env_name, (name, cast) in ENV_OVERRIDES.items():
            if name == key and os.environ.get(env_name):
                try:
                    return cast(os.environ[env_name])
                except ValueError:
                    self.logger.warning(f"Ignoring malformed {env_name}={os.environ[env_name]!r}")
        if key in self.config:
            return self.config[key]
        if default is not None:
            return default
        return DEFAULT_SETTINGS.get(key)

    def override(self, key: str) -> Any:
        """Value set through the environment or the settings file, None when only the default applies"""
        value = self.get(key)
        if key in self.config or any(name == key and os.environ.get(env) for env, (name, _) in ENV_OVERRIDES.items()):
            return value
        return None

    def set(self, key: str, value: Any) -> None:
        """Set a configuration value"""
        self.config[key] = value
        self.save_config()

    def delete(self, key: str) -> None:
        """Delete a configuration value"""
        if key in self.config:
            del self.config[key]
            self.save_config()

    def run_settings(self) -> Dict[str, Any]:
        """Resolved settings used to stamp a run manifest"""
        return {key: self.get(key) for key in DEFAULT_SETTINGS}
