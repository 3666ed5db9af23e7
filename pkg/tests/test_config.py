"""
Tests for environment-driven settings.
"""

import pytest
from pydantic import ValidationError

from hdxcodes.config import Settings, get_settings


@pytest.fixture
def clean_env(monkeypatch, tmp_path):
    """Run without a stray .env file or HDX_* overrides."""
    monkeypatch.chdir(tmp_path)
    for var in ("HDX_BUDGET_RANK", "HDX_LOG_LEVEL", "HDX_THREADS"):
        monkeypatch.delenv(var, raising=False)
    return monkeypatch


def test_defaults(clean_env):
    s = Settings()
    assert s.budget_group == 500_000
    assert s.budget_rank == 8_000
    assert s.budget_enum == 2_000_000
    assert s.threads == 1
    assert s.report_schema_version == "1.0"
    assert s.log_level == "INFO"


def test_environment_override(clean_env):
    clean_env.setenv("HDX_BUDGET_RANK", "123")
    clean_env.setenv("HDX_LOG_LEVEL", "debug")
    s = Settings()
    assert s.budget_rank == 123
    assert s.log_level == "DEBUG"


def test_env_file(clean_env, tmp_path):
    (tmp_path / ".env").write_text("HDX_THREADS=4\n")
    assert Settings().threads == 4


def test_invalid_log_level(clean_env):
    with pytest.raises(ValidationError):
        Settings(log_level="LOUD")


def test_budget_must_be_positive(clean_env):
    with pytest.raises(ValidationError):
        Settings(budget_group=0)


def test_settings_are_cached():
    assert get_settings() is get_settings()
