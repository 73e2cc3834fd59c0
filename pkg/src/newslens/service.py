"""HTTP query service: filtered search with preview, full CSV export.

Response rows carry exactly the 13 search-result fields; article body
text is never serialized by any endpoint.
"""

from __future__ import annotations

import csv
import io
import secrets
import threading
import time
from typing import Callable

from fastapi import FastAPI, HTTPException, Query, Response

from .config import Config
from .errors import InvalidFilter, StorageUnavailable
from .sentiment import Scope
from .store import CSV_FIELDS, QueryFilter, ResultRow, Store

__all__ = ["create_app", "rows_to_csv", "CSV_HEADER"]

CSV_HEADER = ",".join(CSV_FIELDS)

_SCOPES = {s.value.lower(): s for s in Scope}


def rows_to_csv(rows: list[ResultRow]) -> bytes:
    """RFC 4180 output with the fixed 13-column header, LF line endings."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for row in rows:
        writer.writerow(
            [
                row.id, row.entity, row.entity_id, row.type, row.date, row.url,
                row.ner_tool,
                "" if row.paragraph is None else row.paragraph,
                "" if row.sentence is None else row.sentence,
                row.sentiment_score, row.sentiment_tool, row.media_name, row.media_url,
            ]
        )
    return buf.getvalue().encode("utf-8")


def _row_json(row: ResultRow) -> dict:
    return {f: getattr(row, f) for f in CSV_FIELDS}


class _ExportRegistry:
    """Expiring token -> query map, safe for concurrent handlers."""

    def __init__(self, ttl: float, clock: Callable[[], float]):
        self.ttl = ttl
        self.clock = clock
        self._lock = threading.Lock()
        self._entries: dict[str, tuple[QueryFilter, float]] = {}

    def issue(self, flt: QueryFilter) -> str:
        token = secrets.token_urlsafe(16)
        with self._lock:
            now = self.clock()
            self._entries = {
                t: (f, born) for t, (f, born) in self._entries.items() if now - born <= self.ttl
            }
            self._entries[token] = (flt, now)
        return token

    def redeem(self, token: str) -> QueryFilter:
        with self._lock:
            entry = self._entries.get(token)
            if entry is None:
                raise KeyError(token)
            flt, born = entry
            if self.clock() - born > self.ttl:
                raise TimeoutError(token)
            return flt


def _parse_filter(
    store: Store,
    entity: str,
    sources: list[str] | None,
    date_from: str | None,
    date_to: str | None,
    ner_tool: str | None,
    sentiment_tool: str | None,
    scope: str | None,
) -> QueryFilter:
    source_set = None
    if sources:
        known = {m["name"] for m in store.media()}
        unknown = [s for s in sources if s not in known]
        if unknown:
            raise InvalidFilter(f"unknown sources: {unknown}")
        source_set = frozenset(sources)
    for name, value in (("from", date_from), ("to", date_to)):
        if value is not None and not _is_date(value):
            raise InvalidFilter(f"{name} must be YYYY-MM-DD, got {value!r}")
    if date_from and date_to and date_from > date_to:
        raise InvalidFilter(f"from {date_from} > to {date_to}")
    scope_value = None
    if scope:
        scope_value = _SCOPES.get(scope.lower())
        if scope_value is None:
            raise InvalidFilter(f"scope must be one of {sorted(_SCOPES)}, got {scope!r}")
    return QueryFilter(
        entity_pattern=entity or "",
        sources=source_set,
        date_from=date_from,
        date_to=date_to,
        tagger=ner_tool,
        tool=sentiment_tool,
        scope=scope_value,
    )


def _is_date(value: str) -> bool:
    parts = value.split("-")
    return len(parts) == 3 and all(p.isdigit() for p in parts) and len(parts[0]) == 4


def create_app(
    store: Store,
    config: Config | None = None,
    clock: Callable[[], float] = time.time,
) -> FastAPI:
    config = config if config is not None else Config()
    app = FastAPI(title="newslens query service", version="1")
    exports = _ExportRegistry(ttl=config.export_ttl, clock=clock)

    @app.get("/api/v1/search")
    def search(
        entity: str = "",
        sources: list[str] | None = Query(default=None),
        date_from: str | None = Query(default=None, alias="from"),
        date_to: str | None = Query(default=None, alias="to"),
        ner_tool: str | None = None,
        sentiment_tool: str | None = None,
        scope: str | None = None,
    ):
        try:
            flt = _parse_filter(
                store, entity, sources, date_from, date_to, ner_tool, sentiment_tool, scope
            )
            rows = store.query_rows(flt)
        except InvalidFilter as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        except StorageUnavailable as exc:
            raise HTTPException(status_code=503, detail=str(exc)) from exc
        token = exports.issue(flt)
        return {
            "preview": [_row_json(r) for r in rows[: config.preview_limit]],
            "total": len(rows),
            "export": token,
        }

    @app.get("/api/v1/export/{token}")
    def export(token: str):
        try:
            flt = exports.redeem(token)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail="unknown export token") from exc
        except TimeoutError as exc:
            raise HTTPException(status_code=410, detail="export token expired") from exc
        try:
            rows = store.query_rows(flt)
        except StorageUnavailable as exc:
            raise HTTPException(status_code=503, detail=str(exc)) from exc
        return Response(
            content=rows_to_csv(rows),
            media_type="text/csv; charset=utf-8",
            headers={"Content-Disposition": 'attachment; filename="results.csv"'},
        )

    @app.get("/api/v1/meta/sources")
    def meta_sources():
        return store.media()

    @app.get("/api/v1/meta/taggers")
    def meta_taggers():
        configured = [t.tagger_id for t in config.taggers]
        stored = store.ner_tools()
        tools = store.sentiment_tools()
        return {
            "ner_tools": sorted(set(configured) | set(stored)),
            "sentiment_tools": sorted(set(config.sentiment_tools) | set(tools)),
            "scopes": [s.value for s in Scope],
        }

    return app
