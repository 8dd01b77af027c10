import logging
import os
import sys
import tomllib
from pathlib import Path
from typing import Any

from rumlem.core.errors import ConfigurationError

NOTICE_LEVEL = 25
logging.addLevelName(NOTICE_LEVEL, "NOTICE")

logger = logging.getLogger(__name__)

# Keys accepted in the [rumlem] table of a config file.
CONFIG_KEYS = frozenset(
    {
        "lexicon_dir",
        "varieties",
        "mode",
        "threshold",
        "output_format",
        "protected_dir",
        "stopwords_dir",
    }
)


def _env(name: str, default: str) -> str:
    # Unset and empty variables both fall back to the default.
    value = os.environ.get(name, "").strip()
    return value or default


class Settings:
    def __init__(self) -> None:
        self.lexicon_dir = _env("RUMLEM_LEXICON_DIR", "lexicons")
        self.varieties = _env("RUMLEM_VARIETIES", "")
        self.mode = _env("RUMLEM_MODE", "set-of-words")
        self.threshold = _env("RUMLEM_THRESHOLD", "0.6")
        self.output_format = _env("RUMLEM_OUTPUT_FORMAT", "pretty")
        self.protected_dir = _env("RUMLEM_PROTECTED_DIR", "")
        self.stopwords_dir = _env("RUMLEM_STOPWORDS_DIR", "")
        self.concurrency_limit = int(_env("CONCURRENCY_LIMIT", "8"))
        self.log_level = _env("LOG_LEVEL", "NOTICE")

    @property
    def variety_list(self) -> list[str]:
        return [variety.strip() for variety in self.varieties.split(",") if variety.strip()]

    def as_dict(self) -> dict[str, Any]:
        return {
            "lexicon_dir": self.lexicon_dir,
            "varieties": self.variety_list,
            "mode": self.mode,
            "threshold": self.threshold,
            "output_format": self.output_format,
            "protected_dir": self.protected_dir,
            "stopwords_dir": self.stopwords_dir,
        }


settings = Settings()


def load_config_file(path: Path) -> dict[str, Any]:
    """Read the ``[rumlem]`` table of a TOML config file."""
    try:
        with path.open("rb") as f:
            document = tomllib.load(f)
    except FileNotFoundError:
        raise ConfigurationError(f"Config file not found: {path}") from None
    except tomllib.TOMLDecodeError as e:
        raise ConfigurationError(f"Invalid TOML in {path}: {e}") from None

    table = document.get("rumlem")
    if table is None:
        logger.warning("Config file %s has no [rumlem] table; ignoring it", path)
        return {}
    if not isinstance(table, dict):
        raise ConfigurationError(f"{path}: [rumlem] must be a table")

    unknown = set(table) - CONFIG_KEYS
    if unknown:
        raise ConfigurationError(f"{path}: unknown config keys {sorted(unknown)}")
    return table


def configure_logging(level: str) -> None:
    """Send log records to stderr so stdout carries only command output."""
    try:
        logging.basicConfig(
            level=level.upper(),
            stream=sys.stderr,
            format="%(levelname)s %(name)s: %(message)s",
            force=True,
        )
    except ValueError:
        raise ConfigurationError(f"Unknown log level: {level}") from None
