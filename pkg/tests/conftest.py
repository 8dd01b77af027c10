from pathlib import Path

import pytest

from rumlem.core.builder import compile_variety, read_dictionary, read_inflections
from rumlem.core.lexicon import Lexicon
from rumlem.core.model import Variety
from rumlem.core.wordlists import read_word_list

FIXTURES = Path(__file__).parent / "fixtures"
SENTENCE = "La vuolp d’eira darcheu üna jada fomantada"


def compile_fixture(variety: Variety) -> Lexicon:
    entries = read_dictionary(FIXTURES / "dictionaries" / f"{variety}.tsv")
    inflections_path = FIXTURES / "inflections" / f"{variety}.tsv"
    fallback_path = FIXTURES / "fallback" / f"{variety}.txt"
    inflections = read_inflections(inflections_path) if inflections_path.exists() else []
    fallback = read_word_list(fallback_path) if fallback_path.exists() else []
    return compile_variety(variety, entries, inflections, fallback)


@pytest.fixture
def vallader() -> Lexicon:
    return compile_fixture(Variety.VALLADER)


@pytest.fixture
def surmiran() -> Lexicon:
    return compile_fixture(Variety.SURMIRAN)


@pytest.fixture
def mini_lexicons(vallader: Lexicon, surmiran: Lexicon) -> dict[Variety, Lexicon]:
    return {Variety.SURMIRAN: surmiran, Variety.VALLADER: vallader}
