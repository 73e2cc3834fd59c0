"""`qc` command line: ingestion, schema migration, query service, reports."""

from __future__ import annotations

import csv
import logging
import sys

import click

from .analytics import (
    MatchMode,
    location_frequencies,
    prf,
    roster_report,
    sentiment_series,
    variant_report,
)
from .config import load_config
from .ingest import Scheduler, UrlFetcher
from .ner import Category
from .pipeline import Pipeline
from .sentiment import CONTINUOUS_TOOL
from .store import Store

logger = logging.getLogger(__name__)


def _open(config_path: str) -> tuple[Store, Pipeline]:
    config = load_config(config_path)
    store = Store(config.db_path)
    return store, Pipeline(store, config)


def _write_csv(path: str, header: list[str], rows) -> None:
    out = open(path, "w", newline="", encoding="utf-8") if path != "-" else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()


def _read_entity_file(path: str) -> list[tuple[str, str]]:
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            pairs.append((parts[0], parts[1] if len(parts) > 1 else "PERSON"))
    return pairs


@click.group()
@click.option("--verbose", is_flag=True, help="Debug logging.")
def main(verbose: bool):
    """News-corpus engine: ingest, store, serve, report."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )


@main.group()
def ingest():
    """Feed polling and article ingestion."""


def _scheduler(config_path: str) -> Scheduler:
    config = load_config(config_path)
    store = Store(config.db_path)
    pipeline = Pipeline(store, config)
    return Scheduler(
        sources=config.sources,
        store=store,
        process_article=lambda article_id: pipeline.process_article(article_id),
        fetcher=UrlFetcher(user_agent=config.user_agent),
    )


@ingest.command("once")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def ingest_once(config_path: str):
    """One fetch/extract/analyse cycle per configured source."""
    scheduler = _scheduler(config_path)
    for stats in scheduler.run_once():
        click.echo(
            f"{stats.source}: items={stats.items} new={stats.new}"
            f" replaced={stats.replaced} unchanged={stats.unchanged}"
            f" failures={len(stats.failures)}"
        )
        for failure in stats.failures:
            click.echo(f"  ! {failure}", err=True)


@ingest.command("run")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def ingest_run(config_path: str):
    """Poll feeds on their configured intervals until interrupted."""
    scheduler = _scheduler(config_path)
    click.echo(f"polling {len(scheduler.sources)} sources; ctrl-c to stop")
    scheduler.run_once()
    scheduler.run_forever()


@main.group()
def store():
    """Database maintenance."""


@store.command("migrate")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def store_migrate(config_path: str):
    """Create or update the schema."""
    config = load_config(config_path)
    Store(config.db_path).migrate()
    click.echo(f"schema ready at {config.db_path}")


@main.group()
def service():
    """Query service."""


@service.command("run")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
def service_run(config_path: str, port: int, host: str):
    """Serve /api/v1 search, export and meta endpoints."""
    import uvicorn

    from .service import create_app

    config = load_config(config_path)
    app = create_app(Store(config.db_path), config)
    uvicorn.run(app, host=host, port=port)


@main.group()
def report():
    """Validation metrics and bias reports."""


@report.command("prf")
@click.option("--gold", "gold_path", required=True, type=click.Path(exists=True))
@click.option("--predicted", "predicted_path", required=True, type=click.Path(exists=True))
@click.option(
    "--mode",
    type=click.Choice([m.value for m in MatchMode]),
    default=MatchMode.NAME_ONLY.value,
    show_default=True,
)
@click.option(
    "--gold-underreports",
    is_flag=True,
    help="Gold annotations are known-incomplete; treat recall as the headline metric.",
)
def report_prf(gold_path: str, predicted_path: str, mode: str, gold_underreports: bool):
    """Compare one predicted entity list (name<TAB>category) to gold."""
    result = prf(
        _read_entity_file(gold_path), _read_entity_file(predicted_path), MatchMode(mode)
    )
    if gold_underreports:
        click.echo(f"recall,{result.recall:.6f}")
        click.echo(f"precision,{result.precision:.6f}  # unreliable: gold under-reports")
    else:
        click.echo(f"precision,{result.precision:.6f}")
        click.echo(f"recall,{result.recall:.6f}")
    click.echo(f"f1,{result.f1:.6f}")
    click.echo(f"tp,{result.tp}")
    click.echo(f"fp,{result.fp}")
    click.echo(f"fn,{result.fn}")


@report.command("roster")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--roster", "roster_path", required=True, type=click.Path(exists=True))
@click.option("--exclude", "exclude_path", type=click.Path(exists=True))
@click.option("--out", default="-", show_default=True)
def report_roster(config_path: str, roster_path: str, exclude_path: str | None, out: str):
    """Classification counts and coverage for a roster of full names."""
    config = load_config(config_path)
    with open(roster_path, encoding="utf-8") as fh:
        roster = [line.strip() for line in fh if line.strip() and not line.startswith("#")]
    exclude: list[str] = []
    if exclude_path:
        with open(exclude_path, encoding="utf-8") as fh:
            exclude = [line.strip() for line in fh if line.strip() and not line.startswith("#")]
    rep = roster_report(roster, Store(config.db_path), exclude)
    click.echo(f"coverage,{rep.coverage:.4f}")
    _write_csv(
        out,
        ["tagger", "person", "location", "organization"],
        [
            (
                tagger,
                counts.get(Category.PERSON, 0),
                counts.get(Category.LOCATION, 0),
                counts.get(Category.ORGANIZATION, 0),
            )
            for tagger, counts in sorted(rep.classifications.items())
        ],
    )


@report.command("variants")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--tokens", required=True, help="Comma-separated name tokens, e.g. Nancy,Pelosi")
@click.option("--out", default="-", show_default=True)
def report_variants(config_path: str, tokens: str, out: str):
    """Resolved-name variants matching any token, ranked by article reach."""
    config = load_config(config_path)
    rep = variant_report([t.strip() for t in tokens.split(",") if t.strip()], Store(config.db_path))
    click.echo(f"top_share,{rep.top_share:.4f}")
    _write_csv(
        out,
        ["full_name", "category", "articles"],
        [(name, cat.value, count) for name, cat, count in rep.variants],
    )


@report.command("locations")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--sources", help="Comma-separated media names; all when omitted.")
@click.option("--from", "date_from", help="YYYY-MM-DD")
@click.option("--to", "date_to", help="YYYY-MM-DD")
@click.option("--out", default="-", show_default=True)
def report_locations(config_path, sources, date_from, date_to, out):
    """LOCATION mention frequencies as `location,count` CSV."""
    config = load_config(config_path)
    source_set = frozenset(s.strip() for s in sources.split(",")) if sources else None
    rows = location_frequencies(Store(config.db_path), source_set, date_from, date_to)
    _write_csv(out, ["location", "count"], rows)


@report.command("series")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--entity-id", required=True, type=int)
@click.option("--tool", default=CONTINUOUS_TOOL, show_default=True)
@click.option("--sources", help="Comma-separated media names; all when omitted.")
@click.option("--from", "date_from", help="YYYY-MM-DD")
@click.option("--to", "date_to", help="YYYY-MM-DD")
@click.option("--out", default="-", show_default=True)
def report_series(config_path, entity_id, tool, sources, date_from, date_to, out):
    """Per-article sentiment for one entity at all three scopes."""
    config = load_config(config_path)
    source_set = frozenset(s.strip() for s in sources.split(",")) if sources else None
    points = sentiment_series(
        entity_id, Store(config.db_path), source_set, date_from, date_to, tool
    )
    _write_csv(
        out,
        ["article_id", "date", "article_score", "paragraph_mean", "sentence_mean"],
        [
            (
                p.article_id,
                p.date,
                "" if p.article_score is None else p.article_score,
                "" if p.paragraph_mean is None else p.paragraph_mean,
                "" if p.sentence_mean is None else p.sentence_mean,
            )
            for p in points
        ],
    )


if __name__ == "__main__":
    main()
