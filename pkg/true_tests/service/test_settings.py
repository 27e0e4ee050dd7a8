"""Tests for environment-driven settings."""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from src.services.errors import ConfigError
from src.services.settings import FourierVolSettings, resolve_threads


class TestSettings:
    """FOURIERVOL_ environment variables and thread resolution."""

    def test_defaults(self, monkeypatch):
        monkeypatch.delenv("FOURIERVOL_THREADS", raising=False)
        s = FourierVolSettings(_env_file=None)
        assert s.threads is None
        assert s.spot_grid_size == 256
        assert s.fejer_prefactor == "printed"

    def test_environment_overrides(self, monkeypatch):
        monkeypatch.setenv("FOURIERVOL_THREADS", "3")
        monkeypatch.setenv("FOURIERVOL_FEJER_PREFACTOR", "dirichlet")
        s = FourierVolSettings(_env_file=None)
        assert s.threads == 3
        assert s.fejer_prefactor == "dirichlet"

    def test_resolve_threads_precedence(self):
        s = FourierVolSettings(_env_file=None, threads=2)
        assert resolve_threads(5, s) == 5
        assert resolve_threads(None, s) == 2
        assert 1 <= resolve_threads(None, FourierVolSettings(_env_file=None, threads=None)) <= 4

    def test_resolve_threads_rejects_zero(self):
        with pytest.raises(ConfigError):
            resolve_threads(0, FourierVolSettings(_env_file=None))
