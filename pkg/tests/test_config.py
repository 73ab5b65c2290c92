"""
Unit Tests for settings.

Tests environment overrides, validation and per-run overrides.
"""

import logging

import pytest
from pydantic import ValidationError

from src.config.settings import (
    ConfigurationError,
    Settings,
    apply_overrides,
    get_settings,
    setup_logging,
)


class TestSettings:
    """Test suite for Settings."""

    # -------------------------------------------------------------------------
    # Happy Path Tests
    # -------------------------------------------------------------------------

    def test_defaults(self) -> None:
        """Test a few defaults the geometry relies on."""
        settings = get_settings()
        assert settings.genericity_tol == 1e-9
        assert settings.spot_check_every == 0
        assert settings.use_lfs is False

    def test_environment_override(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """Test that SQUASH_* variables override fields."""
        monkeypatch.setenv("SQUASH_WITNESS_RATIO", "0.05")
        assert Settings().witness_ratio == 0.05

    def test_settings_are_cached(self) -> None:
        """Test that get_settings returns one instance until cleared."""
        assert get_settings() is get_settings()

    def test_apply_overrides(self) -> None:
        """Test that per-run overrides reach every later get_settings call."""
        settings = apply_overrides({"genericity_tol": 1e-8})
        assert settings.genericity_tol == 1e-8
        assert get_settings().genericity_tol == 1e-8

    def test_log_level_normalised(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """Test that log levels are upper-cased."""
        monkeypatch.setenv("SQUASH_LOG_LEVEL", "debug")
        assert Settings().log_level == "DEBUG"

    def test_setup_logging(self) -> None:
        """Test that logging is configured at the requested level."""
        root = setup_logging(level="WARNING")
        assert root.level == logging.WARNING

    # -------------------------------------------------------------------------
    # Error Handling Tests
    # -------------------------------------------------------------------------

    def test_unknown_log_level(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """Test that an unknown log level is rejected."""
        monkeypatch.setenv("SQUASH_LOG_LEVEL", "CHATTY")
        with pytest.raises(ValidationError):
            Settings()

    def test_out_of_range_tolerance(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """Test that tolerances are bounded."""
        monkeypatch.setenv("SQUASH_GENERICITY_TOL", "0.5")
        with pytest.raises(ValidationError):
            Settings()

    def test_unknown_override(self) -> None:
        """Test that overriding an unknown field raises ConfigurationError."""
        with pytest.raises(ConfigurationError):
            apply_overrides({"bogus": 1.0})

    def test_invalid_override(self) -> None:
        """Test that an invalid override value raises ConfigurationError."""
        with pytest.raises(ConfigurationError):
            apply_overrides({"max_witnesses": 1})
