"""Command-line interface.

Subcommands mirror the pipeline stages (ingest, detect, label, track,
interact, analyze, gaps, synth) plus ``run`` for the full pipeline from a
config file. Exit codes: 0 success, 1 validation problem, 2 runtime
failure.
"""

from __future__ import annotations

import functools
import json
import logging
import re
import sys
from pathlib import Path

import click

from . import __version__
from .analyze import WindowSpec, contemporary, foundational, transfer_matrix
from .content import load_embeddings
from .corpus import build_snapshot, load_corpus, save_corpus, snapshot_series
from .detect import DetectorParams, detect, export_cover, grid_search, import_cover
from .errors import CiteflowError, ValidationError
from .gaps import build_design, fit_gamma_glm, rank_gap_communities, residual_report
from .ingest import (
    FetchPolicy,
    SemanticScholarClient,
    expand_one_hop,
    filter_periphery,
    to_corpus,
)
from .interact import build_interaction, export_edge_list, export_matrix_csv
from .label import format_label, label_community
from .pipeline import PipelineConfig, run_pipeline
from .synth import Scenario, generate, save_ground_truth, silo_gap_scenario, tracking_scenario
from .track import export_events, export_flow, track_all

log = logging.getLogger(__name__)


def _cli_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ValidationError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
        except CiteflowError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)

    return wrapper


@click.group()
@click.version_option(version=__version__)
def main():
    """Research-area life-cycles and knowledge transfer from citations."""
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.option("--core", "core_file", required=True, type=click.Path(exists=True),
              help="File with one core paper id per line.")
@click.option("--out", "out_file", required=True, type=click.Path(),
              help="Corpus file to write.")
@click.option("--rps", default=5.0, show_default=True, help="Requests per second cap.")
@click.option("--retries", default=3, show_default=True)
@click.option("--cache", "cache_dir", type=click.Path(), default=None,
              help="Directory for cached API responses.")
@click.option("--base-url", default="https://api.semanticscholar.org/graph/v1",
              show_default=True)
@click.option("--api-key", default=None, envvar="SCHOLAR_API_KEY")
@_cli_errors
def ingest(core_file, out_file, rps, retries, cache_dir, base_url, api_key):
    """Build a corpus from a core id set via a scholarly-graph API."""
    core_ids = [
        line.strip() for line in Path(core_file).read_text("utf-8").splitlines()
        if line.strip()
    ]
    policy = FetchPolicy(requests_per_second=rps, max_retries=retries, cache_dir=cache_dir)
    client = SemanticScholarClient(base_url=base_url, api_key=api_key)
    expansion = expand_one_hop(core_ids, client, policy)
    if expansion.skipped:
        click.echo(f"skipped unknown core ids: {', '.join(expansion.skipped)}", err=True)
    retained = filter_periphery(expansion.records.values(), core_ids)
    corpus = to_corpus(
        [expansion.records[i] for i in sorted(retained) if i in expansion.records]
    )
    save_corpus(corpus, out_file)
    click.echo(
        f"wrote {len(corpus.papers)} papers, {len(corpus.edges)} edges "
        f"({len(corpus.warnings)} warnings) to {out_file}"
    )


def _parse_floats(raw: str) -> tuple[float, ...]:
    return tuple(float(x) for x in raw.split(",") if x.strip())


@main.command(name="detect")
@click.option("--corpus", "corpus_file", required=True, type=click.Path(exists=True))
@click.option("--from", "first", required=True, type=int, help="First snapshot year.")
@click.option("--to", "last", required=True, type=int, help="Last snapshot year.")
@click.option("--resolution", type=float, default=None, help="Fixed resolution.")
@click.option("--threshold", type=float, default=None, help="Fixed admission threshold.")
@click.option("--resolutions", default="0.5,1.0,1.5,2.0", show_default=True,
              help="Grid of resolutions (comma separated).")
@click.option("--thresholds", default="0.1,0.2,0.3", show_default=True,
              help="Grid of thresholds (comma separated).")
@click.option("--k", default=10, show_default=True,
              help="Communities counted by the grid-search objective.")
@click.option("--seed", default=0, show_default=True)
@click.option("--out-dir", required=True, type=click.Path())
@_cli_errors
def detect_cmd(corpus_file, first, last, resolution, threshold, resolutions,
               thresholds, k, seed, out_dir):
    """Detect overlapping communities per snapshot, seeding step to step."""
    corpus = load_corpus(corpus_file)
    series = snapshot_series(corpus, first, last)
    if resolution is not None and threshold is not None:
        params = DetectorParams(resolution, threshold, seed)
    else:
        params = grid_search(series, _parse_floats(resolutions),
                             _parse_floats(thresholds), k=k)
        params = DetectorParams(params.resolution, params.threshold, seed)
        click.echo(
            f"grid search selected resolution={params.resolution} "
            f"threshold={params.threshold}"
        )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    previous = None
    for graph in series:
        cover = detect(graph, params, seed_cover=previous)
        export_cover(cover, out / f"cover_{graph.step}.txt")
        previous = cover
        click.echo(f"step {graph.step}: {len(cover)} communities")
    with open(out / "params.json", "w", encoding="utf-8") as fh:
        json.dump(
            {"resolution": params.resolution, "threshold": params.threshold,
             "seed": params.seed, "k": k},
            fh, indent=2, sort_keys=True,
        )
        fh.write("\n")


@main.command()
@click.option("--cover", "cover_file", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_file", required=True, type=click.Path(exists=True))
@click.option("--step", required=True, type=int)
@click.option("-n", "top_n", default=5, show_default=True)
@click.option("--method", type=click.Choice(["tficf", "ctd"]), default="tficf",
              show_default=True)
@click.option("--stopwords", "stopwords_file", type=click.Path(exists=True),
              default=None, help="Replace the built-in stopword list.")
@click.option("--out", "out_file", type=click.Path(), default=None,
              help="Write CSV here instead of stdout.")
@_cli_errors
def label(cover_file, corpus_file, step, top_n, method, stopwords_file, out_file):
    """Annotate each community of a cover with its top-n terms."""
    from .label import load_stopwords

    corpus = load_corpus(corpus_file)
    graph = build_snapshot(corpus, step)
    cover = import_cover(cover_file, step, graph)
    stopwords = load_stopwords(stopwords_file) if stopwords_file else None
    lines = []
    for community in cover.communities:
        terms = label_community(community, cover, corpus, n=top_n, method=method,
                                stopwords=stopwords)
        lines.append(f"{community.id},{format_label(terms)}")
    text = "\n".join(lines) + "\n"
    if out_file:
        Path(out_file).write_text(text, "utf-8")
    else:
        click.echo(text, nl=False)


def _load_covers(covers_dir: str, corpus, validate: bool = True):
    steps = {}
    for path in sorted(Path(covers_dir).glob("cover_*.txt")):
        match = re.fullmatch(r"cover_(\d+)\.txt", path.name)
        if not match:
            continue
        step = int(match.group(1))
        graph = build_snapshot(corpus, step) if validate else None
        steps[step] = import_cover(path, step, graph)
    if not steps:
        raise ValidationError(f"no cover_<year>.txt files under {covers_dir}")
    return steps


@main.command()
@click.option("--corpus", "corpus_file", required=True, type=click.Path(exists=True))
@click.option("--covers", "covers_dir", required=True, type=click.Path(exists=True))
@click.option("--match-threshold", default=0.2, show_default=True,
              help="Jaccard similarity a front match must exceed.")
@click.option("--out-dir", required=True, type=click.Path())
@_cli_errors
def track(corpus_file, covers_dir, match_threshold, out_dir):
    """Track covers into dynamic communities and write the event log."""
    corpus = load_corpus(corpus_file)
    covers = _load_covers(covers_dir, corpus)
    cover_list = [covers[s] for s in sorted(covers)]
    dynamic, events = track_all(cover_list, match_threshold)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    export_events(events, out / "events.jsonl")
    export_flow(cover_list, out / "flow.json")
    with open(out / "dynamic_communities.json", "w", encoding="utf-8") as fh:
        json.dump(
            [
                {"id": d.id, "status": d.status,
                 "timeline": [[s, str(c)] for s, c in d.timeline]}
                for d in dynamic
            ],
            fh, indent=2, sort_keys=True,
        )
        fh.write("\n")
    click.echo(f"{len(dynamic)} dynamic communities, {len(events)} events")


@main.command()
@click.option("--corpus", "corpus_file", required=True, type=click.Path(exists=True))
@click.option("--cover", "cover_file", required=True, type=click.Path(exists=True))
@click.option("--step", required=True, type=int)
@click.option("--symmetrise", is_flag=True, default=False,
              help="Symmetrise the exported matrix.")
@click.option("--out-dir", required=True, type=click.Path())
@_cli_errors
def interact(corpus_file, cover_file, step, symmetrise, out_dir):
    """Build the community interaction network for one step."""
    corpus = load_corpus(corpus_file)
    graph = build_snapshot(corpus, step)
    cover = import_cover(cover_file, step, graph)
    net = build_interaction(cover, graph)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    export_edge_list(net, out / f"edges_{step}.txt")
    labels = {
        c.id: format_label(label_community(c, cover, corpus)) or str(c.id)
        for c in cover.communities
    }
    export_matrix_csv(net, out / f"matrix_{step}.csv", symmetrise=symmetrise,
                      labels=labels)
    click.echo(f"{len(net)} communities, {len(net.weights)} directed interactions")


@main.group()
def analyze():
    """Research-question reports over tracked communities."""


def _tracked_state(corpus_file, covers_dir, match_threshold):
    corpus = load_corpus(corpus_file)
    covers = _load_covers(covers_dir, corpus)
    graphs = {s: build_snapshot(corpus, s) for s in covers}
    nets = {s: build_interaction(covers[s], graphs[s]) for s in covers}
    dynamic, _ = track_all([covers[s] for s in sorted(covers)], match_threshold)
    return corpus, covers, nets, dynamic


@analyze.command(name="foundational")
@click.option("--corpus", "corpus_file", required=True, type=click.Path(exists=True))
@click.option("--covers", "covers_dir", required=True, type=click.Path(exists=True))
@click.option("--window", required=True, help="Year window, e.g. 2000:2010.")
@click.option("--embeddings", "embeddings_file", type=click.Path(exists=True),
              default=None)
@click.option("--match-threshold", default=0.2, show_default=True)
@click.option("-k", "top_k", default=10, show_default=True)
@_cli_errors
def analyze_foundational(corpus_file, covers_dir, window, embeddings_file,
                         match_threshold, top_k):
    """Long-lived, consistently central communities in a window."""
    start, _, end = window.partition(":")
    window_spec = WindowSpec(int(start), int(end))
    corpus, covers, nets, dynamic = _tracked_state(corpus_file, covers_dir,
                                                   match_threshold)
    store = load_embeddings(embeddings_file) if embeddings_file else None
    rows = foundational(dynamic, nets, window_spec, k=top_k, covers=covers, store=store)
    for rank, row in enumerate(rows, start=1):
        coherence = "" if row.mean_coherence is None else f" coherence={row.mean_coherence:.4f}"
        click.echo(
            f"{rank}. {row.dynamic_id} betweenness={row.mean_betweenness:.6f} "
            f"lifespan={row.lifespan}{coherence}"
        )


@analyze.command(name="contemporary")
@click.option("--corpus", "corpus_file", required=True, type=click.Path(exists=True))
@click.option("--covers", "covers_dir", required=True, type=click.Path(exists=True))
@click.option("--ref-year", required=True, type=int)
@click.option("--embeddings", "embeddings_file", type=click.Path(exists=True),
              default=None)
@click.option("--max-age", default=6.0, show_default=True)
@click.option("--min-size", default=50, show_default=True)
@click.option("--match-threshold", default=0.2, show_default=True)
@_cli_errors
def analyze_contemporary(corpus_file, covers_dir, ref_year, embeddings_file,
                         max_age, min_size, match_threshold):
    """Large, recent, coherent communities."""
    corpus, covers, nets, dynamic = _tracked_state(corpus_file, covers_dir,
                                                   match_threshold)
    store = load_embeddings(embeddings_file) if embeddings_file else None
    rows = contemporary(dynamic, corpus, ref_year, covers, store=store,
                        max_age=max_age, min_size=min_size)
    for row in rows:
        coherence = "" if row.mean_coherence is None else f" coherence={row.mean_coherence:.4f}"
        click.echo(
            f"{row.dynamic_id} size={row.size} mean_age={row.mean_age:.2f}{coherence}"
        )


@analyze.command(name="matrix")
@click.option("--corpus", "corpus_file", required=True, type=click.Path(exists=True))
@click.option("--cover", "cover_file", required=True, type=click.Path(exists=True))
@click.option("--step", required=True, type=int)
@click.option("--out", "out_file", required=True, type=click.Path())
@_cli_errors
def analyze_matrix(corpus_file, cover_file, step, out_file):
    """Percentage transfer matrix over a cover's communities."""
    corpus = load_corpus(corpus_file)
    graph = build_snapshot(corpus, step)
    cover = import_cover(cover_file, step, graph)
    net = build_interaction(cover, graph)
    ids = [c.id for c in cover.communities]
    tm = transfer_matrix(ids, ids, net)
    with open(out_file, "w", encoding="utf-8") as fh:
        fh.write("," + ",".join(str(c) for c in tm.cols) + "\n")
        for i in tm.rows:
            cells = [
                "" if i == j else repr(tm.cell(i, j)) for j in tm.cols
            ]
            fh.write(f"{i}," + ",".join(cells) + "\n")
    click.echo(f"wrote {len(ids)}x{len(ids)} matrix to {out_file}")


@main.command()
@click.option("--corpus", "corpus_file", required=True, type=click.Path(exists=True))
@click.option("--cover", "cover_file", required=True, type=click.Path(exists=True))
@click.option("--step", required=True, type=int)
@click.option("--embeddings", "embeddings_file", required=True,
              type=click.Path(exists=True))
@click.option("--k-areas", default=4, show_default=True)
@click.option("--k-partners", default=5, show_default=True)
@click.option("--out-dir", required=True, type=click.Path())
@_cli_errors
def gaps(corpus_file, cover_file, step, embeddings_file, k_areas, k_partners, out_dir):
    """Fit the interaction model and rank knowledge gaps."""
    corpus = load_corpus(corpus_file)
    graph = build_snapshot(corpus, step)
    cover = import_cover(cover_file, step, graph)
    net = build_interaction(cover, graph)
    store = load_embeddings(embeddings_file)
    design = build_design(net, store, cover)
    model = fit_gamma_glm(design.features, design.responses)
    records = residual_report(model, design.features, design.responses, design.pairs)
    areas = rank_gap_communities(records, k_areas, k_partners)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    note = ("zero-interaction pairs excluded from fit, included in ranking; "
            "residual = predicted - observed")
    with open(out / "gap_report.csv", "w", encoding="utf-8") as fh:
        fh.write(f"# {note}\n")
        fh.write("pair_a,pair_b,observed_pct,predicted_pct,residual_pct\n")
        for r in records:
            fh.write(
                f"{r.pair[0]},{r.pair[1]},{r.observed * 100!r},"
                f"{r.predicted * 100!r},{r.residual * 100!r}\n"
            )
    labels = {
        c.id: format_label(label_community(c, cover, corpus)) or str(c.id)
        for c in cover.communities
    }
    with open(out / "gap_table.txt", "w", encoding="utf-8") as fh:
        fh.write(f"# {note}\n")
        for area in areas:
            fh.write(f"== {labels.get(area.community, str(area.community))}\n")
            for rank, rec in enumerate(area.partners, start=1):
                partner = rec.pair[1] if rec.pair[0] == area.community else rec.pair[0]
                fh.write(f"{rank}. {labels.get(partner, str(partner))} "
                         f"(residual {rec.residual * 100:.4f}%)\n")
    click.echo(
        f"model converged={model.converged} iterations={model.iterations}; "
        f"top gap pair: {records[0].pair[0]} / {records[0].pair[1]}"
    )


@main.command()
@click.option("--scenario", "scenario_file", type=click.Path(exists=True), default=None)
@click.option("--preset", type=click.Choice(["tracking", "silo-gap"]), default=None,
              help="Generate a built-in scenario instead of a file.")
@click.option("--seed", default=0, show_default=True)
@click.option("--out-dir", required=True, type=click.Path())
@_cli_errors
def synth(scenario_file, preset, seed, out_dir):
    """Generate a synthetic corpus with planted ground truth."""
    if bool(scenario_file) == bool(preset):
        raise ValidationError("give exactly one of --scenario or --preset")
    if scenario_file:
        scenario = Scenario.from_json(scenario_file)
    elif preset == "tracking":
        scenario = tracking_scenario(seed)
    else:
        scenario = silo_gap_scenario(seed)
    truth = generate(scenario)
    out = Path(out_dir)
    save_ground_truth(truth, out)
    with open(out / "scenario.json", "w", encoding="utf-8") as fh:
        json.dump(scenario.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    click.echo(
        f"generated {len(truth.corpus.papers)} papers, "
        f"{len(truth.corpus.edges)} citations, "
        f"{sum(len(c) for c in truth.covers.values())} step communities"
    )


@main.command()
@click.option("--config", "config_file", required=True, type=click.Path(exists=True))
@click.option("--out-dir", required=True, type=click.Path())
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@_cli_errors
def run(config_file, out_dir, seed):
    """Run the full pipeline from a config file."""
    config = PipelineConfig.from_json(config_file)
    if seed is not None:
        config.seed = seed
    result = run_pipeline(config, out_dir)
    click.echo(f"wrote {len(result.manifest['artifacts'])} artefacts to {out_dir}")
    for notice in result.manifest["notices"]:
        click.echo(f"notice: {notice}")


if __name__ == "__main__":
    main()
