import asyncio
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

import httpx

from rumlem.config import settings
from rumlem.core.errors import SourceUnavailable

logger = logging.getLogger(__name__)

STDIN = "-"


def is_url(source: str) -> bool:
    return source.startswith(("http://", "https://"))


async def fetch_text(source: str, client: httpx.AsyncClient | None = None) -> str:
    """Read a text source: ``-`` for stdin, an http(s) URL, or a local path."""
    if source == STDIN:
        return await asyncio.to_thread(sys.stdin.read)

    if is_url(source):
        try:
            if client is None:
                async with httpx.AsyncClient() as own_client:
                    resp = await own_client.get(source)
            else:
                resp = await client.get(source)
            resp.raise_for_status()
        except httpx.HTTPError as e:
            raise SourceUnavailable(f"Failed to fetch {source}: {e}") from e
        logger.debug("Fetched %d bytes from %s", len(resp.content), source)
        return resp.text

    try:
        return Path(source).read_text(encoding="utf-8")
    except (FileNotFoundError, IsADirectoryError):
        raise SourceUnavailable(f"Input not found: {source}") from None
    except UnicodeDecodeError as e:
        raise SourceUnavailable(f"{source} is not UTF-8 text: {e}") from None


async def fetch_texts(sources: Sequence[str], concurrency_limit: int | None = None) -> list[str]:
    """Fetch several sources concurrently; results keep the order of ``sources``."""
    if list(sources).count(STDIN) > 1:
        raise SourceUnavailable("stdin can only be read once")
    semaphore = asyncio.Semaphore(concurrency_limit or settings.concurrency_limit)

    async with httpx.AsyncClient() as client:

        async def fetch_one(source: str) -> str:
            async with semaphore:
                return await fetch_text(source, client)

        return list(await asyncio.gather(*(fetch_one(source) for source in sources)))
