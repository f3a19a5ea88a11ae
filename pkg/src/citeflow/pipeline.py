"""End-to-end pipeline: config in, artefact directory plus manifest out.

Inputs come either from a corpus file (with optional embeddings) or from
a synthetic scenario. Every stage writes its outputs under the run
directory; the manifest records resolved parameters, content hashes of
inputs and artefacts, and any stages skipped (for example when no
embeddings are available). Paths never enter the manifest, so two runs of
the same configuration produce byte-identical manifests wherever they
land. Stages are skipped on re-runs when a signature of their parameters
and inputs matches the previous run.

Report files start with a comment line naming the parameter values they
were produced with.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .analyze import WindowSpec, contemporary, foundational, transfer_matrix
from .content import EmbeddingStore, load_embeddings, save_embeddings
from .corpus import load_corpus, save_corpus, snapshot_series
from .detect import (
    Cover,
    DetectorParams,
    detect,
    export_cover,
    grid_search,
    import_cover,
)
from .errors import ArgumentError, InsufficientDataError, UndefinedMetricError, ValidationError
from .gaps import build_design, fit_gamma_glm, rank_gap_communities, residual_report
from .interact import build_interaction, export_edge_list, export_matrix_csv, find_silos
from .label import format_label, label_community
from .synth import Scenario, generate
from .track import community_metrics, export_events, export_flow, track_all

log = logging.getLogger(__name__)


@dataclass
class PipelineConfig:
    """Resolved pipeline parameters.

    Exactly one of ``corpus_path`` or ``scenario_path`` must be given.
    """

    corpus_path: str | None = None
    embeddings_path: str | None = None
    scenario_path: str | None = None
    first: int | None = None
    last: int | None = None
    resolution: float = 1.0
    threshold: float = 0.2
    grid_resolutions: tuple[float, ...] | None = None
    grid_thresholds: tuple[float, ...] | None = None
    grid_k: int = 10
    covers_source: str = "detect"  # detect | truth | a directory of cover files
    match_threshold: float = 0.2
    foundational_window: tuple[int, int] | None = None
    recent_window: tuple[int, int] | None = None
    ref_year: int | None = None
    contemporary_max_age: float = 6.0
    contemporary_min_size: int = 50
    label_n: int = 5
    label_method: str = "tficf"
    silo_min_size: int = 10
    silo_k: int = 5
    gap_k_areas: int = 4
    gap_k_partners: int = 5
    seed: int = 0

    @classmethod
    def from_json(cls, path: str | Path) -> "PipelineConfig":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        for key in ("grid_resolutions", "grid_thresholds"):
            if data.get(key) is not None:
                data[key] = tuple(data[key])
        for key in ("foundational_window", "recent_window"):
            if data.get(key) is not None:
                data[key] = tuple(data[key])
        config = cls(**data)
        config.validate()
        return config

    def validate(self):
        if bool(self.corpus_path) == bool(self.scenario_path):
            raise ValidationError(
                "config needs exactly one of corpus_path or scenario_path"
            )
        if self.covers_source == "truth" and not self.scenario_path:
            raise ValidationError("covers_source 'truth' requires a scenario input")
        if self.label_method not in ("tficf", "ctd"):
            raise ValidationError(f"unknown label method {self.label_method!r}")

    def parameters(self) -> dict:
        """Parameter block for the manifest: everything except paths."""
        skip = {"corpus_path", "embeddings_path", "scenario_path"}
        out = {
            k: (list(v) if isinstance(v, tuple) else v)
            for k, v in dataclasses.asdict(self).items()
            if k not in skip
        }
        return out


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_csv(path: Path, header_note: str, columns: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# {header_note}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow(row)


@dataclass
class RunResult:
    manifest: dict
    out_dir: Path
    covers: dict[int, Cover] = field(default_factory=dict, repr=False)


def run_pipeline(config: PipelineConfig, out_dir: str | Path) -> RunResult:
    """Run every stage and write the manifest. Returns the manifest."""
    config.validate()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "covers").mkdir(exist_ok=True)
    (out / "nets").mkdir(exist_ok=True)
    notices: list[str] = []
    inputs: dict[str, str] = {}

    # --- inputs ---------------------------------------------------------
    truth = None
    store: EmbeddingStore | None = None
    if config.scenario_path:
        scenario = Scenario.from_json(config.scenario_path)
        if config.seed:
            scenario = dataclasses.replace(scenario, seed=config.seed)
        inputs["scenario_sha256"] = _sha256(Path(config.scenario_path))
        truth = generate(scenario)
        corpus = truth.corpus
        store = truth.store
        save_corpus(corpus, out / "corpus.jsonl")
        save_embeddings(store, out / "embeddings.jsonl")
        first = config.first if config.first is not None else scenario.first
        last = config.last if config.last is not None else scenario.last
    else:
        corpus = load_corpus(config.corpus_path)
        inputs["corpus_sha256"] = _sha256(Path(config.corpus_path))
        lo, hi = corpus.year_range()
        first = config.first if config.first is not None else lo
        last = config.last if config.last is not None else hi
        if config.embeddings_path:
            store = load_embeddings(config.embeddings_path)
            inputs["embeddings_sha256"] = _sha256(Path(config.embeddings_path))
        else:
            notices.append("no embeddings: coherence metrics and gap stage skipped")

    graphs = {g.step: g for g in snapshot_series(corpus, first, last)}

    # --- covers ---------------------------------------------------------
    if config.covers_source == "truth":
        covers = {s: c for s, c in truth.covers.items() if first <= s <= last}
        params = None
    elif config.covers_source == "detect":
        if config.grid_resolutions and config.grid_thresholds:
            params = grid_search(
                list(graphs.values()),
                config.grid_resolutions,
                config.grid_thresholds,
                k=config.grid_k,
            )
            params = dataclasses.replace(params, seed=config.seed)
        else:
            params = DetectorParams(config.resolution, config.threshold, config.seed)
        # detection dominates runtime; resume from cached covers when the
        # inputs and parameters are unchanged
        signature = hashlib.sha256(
            json.dumps(
                {
                    "inputs": inputs,
                    "params": [params.resolution, params.threshold, params.seed],
                    "range": [first, last],
                },
                sort_keys=True,
            ).encode()
        ).hexdigest()
        stage_file = out / "covers" / ".stage.json"
        covers = {}
        if stage_file.exists():
            try:
                if json.loads(stage_file.read_text())["signature"] == signature:
                    covers = {
                        step: import_cover(
                            out / "covers" / f"cover_{step}.txt", step, graphs[step]
                        )
                        for step in range(first, last + 1)
                        if (out / "covers" / f"cover_{step}.txt").exists()
                    }
                    log.info("covers stage resumed from cache")
            except (ValidationError, KeyError, json.JSONDecodeError):
                covers = {}
        if not covers:
            previous: Cover | None = None
            for step in range(first, last + 1):
                cover = detect(graphs[step], params, seed_cover=previous)
                covers[step] = cover
                previous = cover
            stage_file.write_text(json.dumps({"signature": signature}) + "\n")
    else:
        cover_dir = Path(config.covers_source)
        covers = {}
        for step in range(first, last + 1):
            path = cover_dir / f"cover_{step}.txt"
            if path.exists():
                covers[step] = import_cover(path, step, graphs[step])
        if not covers:
            raise ValidationError(f"no cover files found under {cover_dir}")
        params = None

    for step, cover in sorted(covers.items()):
        export_cover(cover, out / "covers" / f"cover_{step}.txt")
    if params is not None:
        cover_provenance = "builtin"
    elif config.covers_source == "truth":
        cover_provenance = "truth"
    else:
        cover_provenance = "external"
    with open(out / "covers" / "params.json", "w", encoding="utf-8") as fh:
        json.dump(
            {
                "source": cover_provenance,
                "resolution": params.resolution if params else None,
                "threshold": params.threshold if params else None,
                "seed": params.seed if params else None,
            },
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")

    steps = sorted(covers)
    final_step = steps[-1]
    final_cover = covers[final_step]

    # --- interaction networks -------------------------------------------
    nets = {s: build_interaction(covers[s], graphs[s]) for s in steps}
    for step in steps:
        export_edge_list(nets[step], out / "nets" / f"edges_{step}.txt")
    labels = {
        c.id: format_label(
            label_community(
                c, final_cover, corpus, n=config.label_n, method=config.label_method
            )
        )
        or str(c.id)
        for c in final_cover.communities
    }
    export_matrix_csv(
        nets[final_step], out / "matrix.csv", symmetrise=True, labels=labels
    )

    # --- labels ----------------------------------------------------------
    _write_csv(
        out / "labels.csv",
        f"step={final_step} n={config.label_n} method={config.label_method}",
        ["community", "size", "label"],
        [
            [str(c.id), len(c.members), labels[c.id]]
            for c in final_cover.communities
        ],
    )

    # --- tracking ---------------------------------------------------------
    cover_list = [covers[s] for s in steps]
    dynamic, events = track_all(cover_list, config.match_threshold)
    export_events(events, out / "events.jsonl")
    export_flow(cover_list, out / "flow.json")
    with open(out / "dynamic_communities.json", "w", encoding="utf-8") as fh:
        json.dump(
            [
                {
                    "id": d.id,
                    "status": d.status,
                    "timeline": [[s, str(c)] for s, c in d.timeline],
                }
                for d in dynamic
            ],
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")

    # --- metrics ----------------------------------------------------------
    metrics = {}
    for d in dynamic:
        bundle = community_metrics(d, covers, nets, store)
        metrics[d.id] = {
            "lifespan": bundle.lifespan,
            "size": bundle.size,
            "degree": bundle.degree,
            "betweenness": bundle.betweenness,
            "coherence": bundle.coherence,
            "stability": bundle.stability,
        }
    with open(out / "metrics.json", "w", encoding="utf-8") as fh:
        json.dump(metrics, fh, indent=2, sort_keys=True)
        fh.write("\n")

    # --- silos -------------------------------------------------------------
    silos = find_silos(nets[final_step], config.silo_min_size, config.silo_k)
    _write_csv(
        out / "silos.csv",
        f"step={final_step} min_size={config.silo_min_size} k={config.silo_k}",
        ["rank", "community", "label", "size", "degree", "density", "total_interaction"],
        [
            [
                rank,
                str(row.community),
                labels.get(row.community, str(row.community)),
                row.size,
                row.degree,
                "" if row.density is None else repr(row.density),
                repr(row.total_interaction),
            ]
            for rank, row in enumerate(silos, start=1)
        ],
    )

    # --- gaps ---------------------------------------------------------------
    if store is None:
        notices.append("gap stage skipped: embeddings unavailable")
    else:
        try:
            design = build_design(nets[final_step], store, final_cover)
            model = fit_gamma_glm(design.features, design.responses)
            records = residual_report(
                model, design.features, design.responses, design.pairs
            )
            areas = rank_gap_communities(
                records, config.gap_k_areas, config.gap_k_partners
            )
            note = (
                f"step={final_step} zero-interaction pairs excluded from fit, "
                "included in ranking; residual = predicted - observed"
            )
            _write_csv(
                out / "gap_report.csv",
                note,
                ["pair_a", "pair_b", "observed_pct", "predicted_pct", "residual_pct"],
                [
                    [
                        str(r.pair[0]),
                        str(r.pair[1]),
                        repr(r.observed * 100),
                        repr(r.predicted * 100),
                        repr(r.residual * 100),
                    ]
                    for r in records
                ],
            )
            with open(out / "gap_table.txt", "w", encoding="utf-8") as fh:
                fh.write(f"# {note}\n")
                for area in areas:
                    fh.write(f"== {labels.get(area.community, str(area.community))}\n")
                    for rank, rec in enumerate(area.partners, start=1):
                        partner = (
                            rec.pair[1] if rec.pair[0] == area.community else rec.pair[0]
                        )
                        fh.write(
                            f"{rank}. {labels.get(partner, str(partner))} "
                            f"(residual {rec.residual * 100:.4f}%)\n"
                        )
        except (InsufficientDataError, UndefinedMetricError) as exc:
            notices.append(f"gap stage skipped: {exc}")

    # --- analysis -------------------------------------------------------------
    fw = config.foundational_window or (first, last)
    window = WindowSpec(*fw)
    try:
        frows = foundational(
            dynamic, nets, window, k=config.silo_k * 2, covers=covers, store=store
        )
        _write_csv(
            out / "foundational.csv",
            f"window={window.start}-{window.end}",
            ["dynamic_id", "mean_betweenness", "lifespan", "mean_coherence"],
            [
                [
                    r.dynamic_id,
                    repr(r.mean_betweenness),
                    r.lifespan,
                    "" if r.mean_coherence is None else repr(r.mean_coherence),
                ]
                for r in frows
            ],
        )
    except ArgumentError as exc:
        notices.append(f"foundational stage skipped: {exc}")

    if config.recent_window:
        recent = WindowSpec(*config.recent_window)
        try:
            rrows = foundational(
                dynamic, nets, recent, k=config.silo_k * 2, covers=covers, store=store
            )
            _write_csv(
                out / "recent_central.csv",
                f"window={recent.start}-{recent.end}",
                ["dynamic_id", "mean_betweenness", "lifespan", "mean_coherence"],
                [
                    [
                        r.dynamic_id,
                        repr(r.mean_betweenness),
                        r.lifespan,
                        "" if r.mean_coherence is None else repr(r.mean_coherence),
                    ]
                    for r in rrows
                ],
            )
        except ArgumentError as exc:
            notices.append(f"recent-central stage skipped: {exc}")

    ref_year = config.ref_year if config.ref_year is not None else last
    crows = contemporary(
        dynamic,
        corpus,
        ref_year,
        covers,
        store=store,
        max_age=config.contemporary_max_age,
        min_size=config.contemporary_min_size,
    )
    _write_csv(
        out / "contemporary.csv",
        f"ref_year={ref_year} max_age={config.contemporary_max_age} "
        f"min_size={config.contemporary_min_size}",
        ["dynamic_id", "size", "mean_age", "mean_coherence"],
        [
            [
                r.dynamic_id,
                r.size,
                repr(r.mean_age),
                "" if r.mean_coherence is None else repr(r.mean_coherence),
            ]
            for r in crows
        ],
    )

    front_of = {d.id: d for d in dynamic}
    contemporary_fronts = [
        front_of[r.dynamic_id].front
        for r in crows
        if front_of[r.dynamic_id].last_step == final_step
    ]
    all_final = [c.id for c in final_cover.communities]
    matrix_cols = contemporary_fronts or all_final
    tm = transfer_matrix(all_final, matrix_cols, nets[final_step])
    _write_csv(
        out / "transfer.csv",
        f"step={final_step} cells=percent symmetrised",
        ["row"] + [str(c) for c in tm.cols],
        [
            [str(i)]
            + [
                "" if i == j else repr(tm.cell(i, j))
                for j in tm.cols
            ]
            for i in tm.rows
        ],
    )

    # --- manifest ----------------------------------------------------------
    artifacts = {}
    for path in sorted(out.rglob("*")):
        if path.is_file() and path.name != "manifest.json" and not path.name.startswith("."):
            artifacts[str(path.relative_to(out))] = _sha256(path)
    manifest = {
        "package": "citeflow",
        "version": __version__,
        "parameters": {
            **config.parameters(),
            "first": first,
            "last": last,
            "ref_year": ref_year,
            "foundational_window": list(fw),
        },
        "inputs": inputs,
        "notices": sorted(notices),
        "artifacts": artifacts,
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return RunResult(manifest=manifest, out_dir=out, covers=covers)
