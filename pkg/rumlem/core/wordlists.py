"""Plain-text word lists: protected token patterns, stopwords and fallback vocabularies.

One entry per line, UTF-8. Blank lines and lines starting with ``#`` are ignored.
"""

import logging
from importlib import resources
from importlib.resources.abc import Traversable
from pathlib import Path

from rumlem.core.errors import ConfigurationError, CorruptFile

logger = logging.getLogger(__name__)


def parse_word_list(text: str) -> list[str]:
    words = []
    for line in text.splitlines():
        word = line.strip()
        if word and not word.startswith("#"):
            words.append(word)
    return words


def read_word_list(path: Path | Traversable) -> list[str]:
    try:
        return parse_word_list(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigurationError(f"Word list not found: {path}") from None
    except UnicodeDecodeError as e:
        raise CorruptFile(f"{path} is not UTF-8 text: {e}") from None


def data_dir(name: str, override: str | Path | None = None) -> Path | Traversable:
    """Directory holding the shipped ``rumlem/data/<name>`` lists, unless overridden."""
    if override:
        directory = Path(override)
        if not directory.is_dir():
            raise ConfigurationError(f"{name} directory not found: {directory}")
        return directory
    return resources.files("rumlem").joinpath("data", name)
