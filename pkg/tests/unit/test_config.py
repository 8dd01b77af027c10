import logging
from collections.abc import Iterator
from pathlib import Path
from typing import Any

import pytest

from rumlem.config import NOTICE_LEVEL, Settings, configure_logging, load_config_file
from rumlem.core.errors import ConfigurationError


@pytest.fixture
def restore_logging() -> Iterator[None]:
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


def test_settings_defaults(monkeypatch: Any) -> None:
    for name in ("RUMLEM_LEXICON_DIR", "RUMLEM_VARIETIES", "RUMLEM_MODE", "RUMLEM_THRESHOLD"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.delenv("LOG_LEVEL", raising=False)
    settings = Settings()

    assert settings.lexicon_dir == "lexicons"
    assert settings.variety_list == []
    assert settings.mode == "set-of-words"
    assert settings.threshold == "0.6"
    assert settings.log_level == "NOTICE"


def test_settings_from_environment(monkeypatch: Any) -> None:
    monkeypatch.setenv("RUMLEM_LEXICON_DIR", "/srv/lexicons")
    monkeypatch.setenv("RUMLEM_VARIETIES", " vallader, ,puter ")
    monkeypatch.setenv("RUMLEM_THRESHOLD", "0.45")
    monkeypatch.setenv("CONCURRENCY_LIMIT", "2")
    # Empty values count as unset.
    monkeypatch.setenv("RUMLEM_MODE", "  ")
    settings = Settings()

    assert settings.lexicon_dir == "/srv/lexicons"
    assert settings.variety_list == ["vallader", "puter"]
    assert settings.threshold == "0.45"
    assert settings.concurrency_limit == 2
    assert settings.mode == "set-of-words"
    assert settings.as_dict()["varieties"] == ["vallader", "puter"]


def test_load_config_file(tmp_path: Path) -> None:
    path = tmp_path / "rumlem.toml"
    path.write_text(
        '[rumlem]\nlexicon_dir = "build/lexicons"\nvarieties = ["vallader"]\nthreshold = 0.5\n'
    )
    assert load_config_file(path) == {
        "lexicon_dir": "build/lexicons",
        "varieties": ["vallader"],
        "threshold": 0.5,
    }


def test_load_config_file_without_table(tmp_path: Path, caplog: Any) -> None:
    path = tmp_path / "pyproject.toml"
    path.write_text('[project]\nname = "other"\n')

    assert load_config_file(path) == {}
    assert "no [rumlem] table" in caplog.text


@pytest.mark.parametrize(
    "content,message",
    [
        ("[rumlem]\ncolour = 'blue'\n", "unknown config keys"),
        ("rumlem = 3\n", "must be a table"),
        ("[rumlem\n", "Invalid TOML"),
    ],
)
def test_load_config_file_rejects(tmp_path: Path, content: str, message: str) -> None:
    path = tmp_path / "rumlem.toml"
    path.write_text(content)
    with pytest.raises(ConfigurationError, match=message):
        load_config_file(path)


def test_load_config_file_missing(tmp_path: Path) -> None:
    with pytest.raises(ConfigurationError, match="not found"):
        load_config_file(tmp_path / "missing.toml")


@pytest.mark.usefixtures("restore_logging")
def test_configure_logging_accepts_notice() -> None:
    configure_logging("notice")
    assert logging.getLogger().level == NOTICE_LEVEL
    assert logging.getLevelName(NOTICE_LEVEL) == "NOTICE"


@pytest.mark.usefixtures("restore_logging")
def test_configure_logging_rejects_unknown_level() -> None:
    with pytest.raises(ConfigurationError, match="Unknown log level"):
        configure_logging("chatty")
