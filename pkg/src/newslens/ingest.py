"""Feed ingestion: RSS/Atom parsing, article-page extraction, and the
polling scheduler that drives the analysis pipeline.

Fetching goes through a pluggable fetcher so tests and offline runs can
point sources at file:// fixtures.
"""

from __future__ import annotations

import logging
import re
import time
import urllib.request
import xml.etree.ElementTree as ET
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from email.utils import parsedate_to_datetime
from html.parser import HTMLParser
from typing import Callable, Iterable, Sequence
from urllib.parse import urlparse

from .errors import MalformedFeed, NoContent

logger = logging.getLogger(__name__)

__all__ = [
    "FeedSource",
    "FeedItem",
    "Article",
    "fetch_feed",
    "extract_article",
    "UrlFetcher",
    "Scheduler",
    "CycleStats",
]

DEFAULT_POLL_INTERVAL = 7200.0  # seconds


def _require_absolute(url: str, what: str) -> None:
    parsed = urlparse(url)
    if not parsed.scheme or (not parsed.netloc and parsed.scheme != "file"):
        raise ValueError(f"{what} must be an absolute URL, got {url!r}")


@dataclass(frozen=True)
class FeedSource:
    media_name: str
    feed_url: str
    media_url: str
    poll_interval: float = DEFAULT_POLL_INTERVAL
    title_selector: str | None = None
    content_selector: str | None = None

    def __post_init__(self):
        if not self.media_name:
            raise ValueError("media_name must be non-empty")
        _require_absolute(self.feed_url, "feed_url")
        _require_absolute(self.media_url, "media_url")
        if self.poll_interval <= 0:
            raise ValueError("poll_interval must be positive")


@dataclass(frozen=True)
class FeedItem:
    url: str
    title: str = ""
    published_at: datetime | None = None


@dataclass
class Article:
    url: str
    title: str
    paragraphs: list[str]
    media_name: str
    media_url: str
    modified_at: datetime
    fetched_at: datetime
    published_at: datetime | None = None
    article_id: int | None = None
    media_id: int | None = None

    def __post_init__(self):
        if any(not p.strip() for p in self.paragraphs):
            raise ValueError("paragraphs must have no empty entries")
        if self.published_at is not None and self.fetched_at < self.published_at:
            raise ValueError("fetched_at must be >= published_at")


# -- feed parsing ------------------------------------------------------


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1].lower()


def _child_text(element: ET.Element, name: str) -> str:
    for child in element:
        if _local(child.tag) == name:
            return (child.text or "").strip()
    return ""


def _parse_rfc822(value: str) -> datetime | None:
    try:
        return parsedate_to_datetime(value)
    except (TypeError, ValueError):
        return None


def _parse_iso(value: str) -> datetime | None:
    try:
        return datetime.fromisoformat(value.replace("Z", "+00:00"))
    except ValueError:
        return None


def _atom_link(entry: ET.Element) -> str:
    fallback = ""
    for child in entry:
        if _local(child.tag) != "link":
            continue
        href = (child.get("href") or "").strip()
        if not href:
            continue
        rel = child.get("rel", "alternate")
        if rel == "alternate":
            return href
        fallback = fallback or href
    return fallback


def fetch_feed(source: FeedSource, feed_document: bytes) -> list[FeedItem]:
    """Parse an RSS 2.0 or Atom document into feed items, order preserved.

    Entries without a link are skipped: the store deduplicates on URL,
    so a linkless item cannot be ingested.
    """
    try:
        root = ET.fromstring(feed_document)
    except ET.ParseError as exc:
        raise MalformedFeed(f"{source.media_name}: not well-formed XML: {exc}") from exc
    root_tag = _local(root.tag)
    items: list[FeedItem] = []
    if root_tag == "rss":
        channel = next((c for c in root if _local(c.tag) == "channel"), None)
        if channel is None:
            raise MalformedFeed(f"{source.media_name}: rss document lacks a channel")
        for item in channel:
            if _local(item.tag) != "item":
                continue
            link = _child_text(item, "link")
            if not link:
                continue
            items.append(
                FeedItem(
                    url=link,
                    title=_child_text(item, "title"),
                    published_at=_parse_rfc822(_child_text(item, "pubdate")),
                )
            )
    elif root_tag == "feed":
        for entry in root:
            if _local(entry.tag) != "entry":
                continue
            link = _atom_link(entry)
            if not link:
                continue
            published = _parse_iso(_child_text(entry, "published")) or _parse_iso(
                _child_text(entry, "updated")
            )
            items.append(
                FeedItem(url=link, title=_child_text(entry, "title"), published_at=published)
            )
    else:
        raise MalformedFeed(f"{source.media_name}: root element {root_tag!r} is not rss or feed")
    return items


# -- page extraction ---------------------------------------------------

_VOID_TAGS = {
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link",
    "meta", "param", "source", "track", "wbr",
}


class _Node:
    __slots__ = ("tag", "attrs", "children")

    def __init__(self, tag: str, attrs: dict[str, str]):
        self.tag = tag
        self.attrs = attrs
        self.children: list = []  # _Node or str

    def iter_nodes(self) -> Iterable["_Node"]:
        for child in self.children:
            if isinstance(child, _Node):
                yield child
                yield from child.iter_nodes()

    def text(self) -> str:
        parts: list[str] = []
        for child in self.children:
            if isinstance(child, str):
                parts.append(child)
            elif child.tag not in ("script", "style"):
                parts.append(child.text())
        return "".join(parts)


class _TreeBuilder(HTMLParser):
    """Tolerant mini-DOM builder: enough structure for titles and paragraphs."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.root = _Node("#document", {})
        self._stack = [self.root]

    def handle_starttag(self, tag, attrs):
        if tag == "p":
            # an open <p> cannot contain another; close it implicitly
            for i in range(len(self._stack) - 1, 0, -1):
                if self._stack[i].tag == "p":
                    del self._stack[i:]
                    break
        node = _Node(tag, dict(attrs))
        self._stack[-1].children.append(node)
        if tag not in _VOID_TAGS:
            self._stack.append(node)

    def handle_startendtag(self, tag, attrs):
        self._stack[-1].children.append(_Node(tag, dict(attrs)))

    def handle_endtag(self, tag):
        for i in range(len(self._stack) - 1, 0, -1):
            if self._stack[i].tag == tag:
                del self._stack[i:]
                return
        # stray end tag: ignore

    def handle_data(self, data):
        if self._stack[-1].tag in ("script", "style"):
            return
        self._stack[-1].children.append(data)


_SELECTOR = re.compile(r"(?P<tag>[a-zA-Z][\w-]*)?(?:\.(?P<cls>[\w-]+)|#(?P<id>[\w-]+))?")


def _matches(node: _Node, selector: str) -> bool:
    m = _SELECTOR.fullmatch(selector.strip())
    if m is None or not selector.strip():
        return False
    tag, cls, node_id = m.group("tag"), m.group("cls"), m.group("id")
    if tag and node.tag != tag.lower():
        return False
    if cls and cls not in (node.attrs.get("class") or "").split():
        return False
    if node_id and node.attrs.get("id") != node_id:
        return False
    return True


def _first_match(root: _Node, selector: str) -> _Node | None:
    return next((n for n in root.iter_nodes() if _matches(n, selector)), None)


def _first_tag(root: _Node, tag: str) -> _Node | None:
    return next((n for n in root.iter_nodes() if n.tag == tag), None)


def _clean(text: str) -> str:
    return " ".join(text.split())


def extract_article(
    page: bytes,
    url: str,
    source: FeedSource,
    now: datetime | None = None,
) -> Article:
    """Extract title and content paragraphs from an article page.

    The content region is the source's content_selector match, else the
    first <article>, <main> or <body>. Paragraphs are the region's <p>
    elements in document order, whitespace-normalized, empties dropped.
    """
    builder = _TreeBuilder()
    builder.feed(page.decode("utf-8", errors="replace"))
    root = builder.root

    title_node = None
    if source.title_selector:
        title_node = _first_match(root, source.title_selector)
    if title_node is None:
        title_node = _first_tag(root, "h1") or _first_tag(root, "title")
    title = _clean(title_node.text()) if title_node is not None else ""

    region = None
    if source.content_selector:
        region = _first_match(root, source.content_selector)
    if region is None:
        region = _first_tag(root, "article") or _first_tag(root, "main") or _first_tag(root, "body")
    if region is None:
        region = root

    paragraphs = [_clean(n.text()) for n in region.iter_nodes() if n.tag == "p"]
    paragraphs = [p for p in paragraphs if p]
    if not paragraphs:
        raise NoContent(f"no non-empty paragraphs extracted from {url}")

    stamp = now if now is not None else datetime.now(timezone.utc)
    return Article(
        url=url,
        title=title,
        paragraphs=paragraphs,
        media_name=source.media_name,
        media_url=source.media_url,
        modified_at=stamp,
        fetched_at=stamp,
    )


# -- fetching and scheduling -------------------------------------------


class UrlFetcher:
    """Default fetcher: plain HTTP(S)/file GET with a configurable agent."""

    def __init__(self, user_agent: str = "newslens/0.1", timeout: float = 30.0):
        self.user_agent = user_agent
        self.timeout = timeout

    def fetch(self, url: str) -> bytes:
        request = urllib.request.Request(url, headers={"User-Agent": self.user_agent})
        with urllib.request.urlopen(request, timeout=self.timeout) as response:
            return response.read()


@dataclass
class CycleStats:
    source: str
    items: int = 0
    new: int = 0
    replaced: int = 0
    unchanged: int = 0
    failures: list[str] = field(default_factory=list)


class Scheduler:
    """Poll each source every poll_interval and push articles downstream.

    ``process_article(article_id)`` runs the analysis pipeline for a new
    or replaced article. One source's failure never blocks the others;
    failed cycles are retried at the next due time.
    """

    def __init__(
        self,
        sources: Sequence[FeedSource],
        store,
        process_article: Callable[[int], None],
        fetcher: UrlFetcher | None = None,
        clock: Callable[[], float] = time.time,
    ):
        if not sources:
            raise ValueError("at least one source must be configured")
        self.sources = list(sources)
        self.store = store
        self.process_article = process_article
        self.fetcher = fetcher if fetcher is not None else UrlFetcher()
        self.clock = clock
        start = self.clock()
        self._next_due = {s.media_name: start + s.poll_interval for s in self.sources}

    def run_cycle(self, source: FeedSource) -> CycleStats:
        """One fetch-extract-upsert-analyse pass over one source's feed."""
        stats = CycleStats(source=source.media_name)
        feed_bytes = self.fetcher.fetch(source.feed_url)
        items = fetch_feed(source, feed_bytes)
        stats.items = len(items)
        for item in items:
            try:
                page = self.fetcher.fetch(item.url)
                now = datetime.now(timezone.utc)
                article = extract_article(page, item.url, source, now=now)
                published = item.published_at
                if published is not None and published > article.fetched_at:
                    published = None  # refuse future publish stamps
                article.published_at = published
                if not article.title and item.title:
                    article.title = item.title
                result = self.store.upsert_article(article)
                if result.is_new:
                    stats.new += 1
                elif result.was_replacement:
                    stats.replaced += 1
                else:
                    stats.unchanged += 1
                if result.is_new or result.was_replacement:
                    self.process_article(result.article_id)
            except Exception as exc:
                logger.warning("%s: %s failed: %s", source.media_name, item.url, exc)
                stats.failures.append(f"{item.url}: {exc}")
        return stats

    def run_once(self) -> list[CycleStats]:
        """One immediate cycle for every source, concurrently, errors isolated."""
        out: list[CycleStats] = []
        with ThreadPoolExecutor(max_workers=min(8, len(self.sources))) as pool:
            futures = {pool.submit(self.run_cycle, s): s for s in self.sources}
            for future, source in futures.items():
                try:
                    out.append(future.result())
                except Exception as exc:
                    logger.warning("cycle failed for %s: %s", source.media_name, exc)
                    stats = CycleStats(source=source.media_name)
                    stats.failures.append(str(exc))
                    out.append(stats)
        return out

    def _run_cycles(self, source: FeedSource, count: int) -> int:
        # catch-up cycles for one source stay sequential
        ran = 0
        for _ in range(count):
            ran += 1
            try:
                self.run_cycle(source)
            except Exception as exc:
                logger.warning("cycle failed for %s: %s", source.media_name, exc)
        return ran

    def poll(self) -> int:
        """Run every due cycle (with catch-up) and return how many ran."""
        now = self.clock()
        due: list[tuple[FeedSource, int]] = []
        for source in self.sources:
            count = 0
            while self._next_due[source.media_name] <= now:
                count += 1
                self._next_due[source.media_name] += source.poll_interval
            if count:
                due.append((source, count))
        if not due:
            return 0
        ran = 0
        with ThreadPoolExecutor(max_workers=min(8, len(due))) as pool:
            futures = [pool.submit(self._run_cycles, s, n) for s, n in due]
            for future in futures:
                ran += future.result()
        return ran

    def seconds_until_next(self) -> float:
        return max(0.0, min(self._next_due.values()) - self.clock())

    def run_forever(self, sleep: Callable[[float], None] = time.sleep) -> None:
        while True:
            self.poll()
            sleep(max(1.0, self.seconds_until_next()))
