"""Configuration module for vertical-squash."""

from src.config.settings import (
    ConfigurationError,
    Settings,
    apply_overrides,
    clear_settings_cache,
    get_settings,
    setup_logging,
)

__all__ = [
    "ConfigurationError",
    "Settings",
    "apply_overrides",
    "clear_settings_cache",
    "get_settings",
    "setup_logging",
]
