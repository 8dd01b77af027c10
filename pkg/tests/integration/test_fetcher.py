import io
from pathlib import Path
from typing import Any

import httpx
import pytest

from rumlem.core.errors import SourceUnavailable
from rumlem.core.fetcher import fetch_text, fetch_texts, is_url
from tests.conftest import SENTENCE

CORPUS_URL = "https://corpus.example.org/vallader/001.txt"


def test_is_url() -> None:
    assert is_url(CORPUS_URL)
    assert is_url("http://localhost:8000/a.txt")
    assert not is_url("samples/http.txt")
    assert not is_url("-")


@pytest.mark.asyncio
async def test_fetch_url(respx_mock: Any) -> None:
    route = respx_mock.get(CORPUS_URL).mock(return_value=httpx.Response(200, text=SENTENCE))

    assert await fetch_text(CORPUS_URL) == SENTENCE
    assert route.call_count == 1


@pytest.mark.asyncio
async def test_fetch_url_http_error(respx_mock: Any) -> None:
    respx_mock.get(CORPUS_URL).mock(return_value=httpx.Response(404))

    with pytest.raises(SourceUnavailable, match="Failed to fetch"):
        await fetch_text(CORPUS_URL)


@pytest.mark.asyncio
async def test_fetch_url_connection_error(respx_mock: Any) -> None:
    respx_mock.get(CORPUS_URL).mock(side_effect=httpx.ConnectError("connection refused"))

    with pytest.raises(SourceUnavailable):
        await fetch_text(CORPUS_URL)


@pytest.mark.asyncio
async def test_fetch_local_files(tmp_path: Path) -> None:
    path = tmp_path / "sample.txt"
    path.write_text(SENTENCE, encoding="utf-8")
    assert await fetch_text(str(path)) == SENTENCE

    with pytest.raises(SourceUnavailable, match="Input not found"):
        await fetch_text(str(tmp_path / "missing.txt"))
    with pytest.raises(SourceUnavailable, match="Input not found"):
        await fetch_text(str(tmp_path))

    latin1 = tmp_path / "latin1.txt"
    latin1.write_bytes("üna jada".encode("latin-1"))
    with pytest.raises(SourceUnavailable, match="not UTF-8"):
        await fetch_text(str(latin1))


@pytest.mark.asyncio
async def test_fetch_stdin(mocker: Any) -> None:
    mocker.patch("sys.stdin", io.StringIO(SENTENCE))
    assert await fetch_text("-") == SENTENCE


@pytest.mark.asyncio
async def test_fetch_texts_keeps_source_order(respx_mock: Any, tmp_path: Path) -> None:
    second_url = "https://corpus.example.org/surmiran/002.txt"
    respx_mock.get(CORPUS_URL).mock(return_value=httpx.Response(200, text="first"))
    respx_mock.get(second_url).mock(return_value=httpx.Response(200, text="third"))
    path = tmp_path / "second.txt"
    path.write_text("second", encoding="utf-8")

    texts = await fetch_texts([CORPUS_URL, str(path), second_url], concurrency_limit=1)
    assert texts == ["first", "second", "third"]


@pytest.mark.asyncio
async def test_fetch_texts_reads_stdin_once() -> None:
    with pytest.raises(SourceUnavailable, match="stdin"):
        await fetch_texts(["-", "-"])
