"""Acceptance gate: one test per release criterion, stated tolerances.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one line per
criterion. Each test prints ``ACCEPTANCE PASS: <criterion>`` after its
assertions hold; a failure shows up as a normal pytest failure.
"""

import itertools
import json
import random
import time

import numpy as np
import pytest

from citeflow.analyze import contemporary
from citeflow.corpus import Corpus, Paper, build_snapshot, snapshot_series
from citeflow.detect import CommunityId, Cover, fitness
from citeflow.gaps import build_design, fit_gamma_glm, residual_report
from citeflow.interact import (
    InteractionNetwork,
    betweenness,
    build_interaction,
    find_silos,
)
from citeflow.label import ctd, label_community
from citeflow.pipeline import PipelineConfig, run_pipeline
from citeflow.synth import (
    generate,
    normalize_events,
    silo_gap_scenario,
    tracking_scenario,
)
from citeflow.track import track_all

from test_detect import fitness_oracle, random_graph
from test_gaps import synth_gamma
from test_interact import betweenness_oracle


def report(name):
    print(f"\nACCEPTANCE PASS: {name}")


def test_interaction_formula_exactness():
    started = time.monotonic()
    papers_a = [f"a{k}" for k in range(10)]
    papers_b = [f"b{k}" for k in range(10)]
    edges = [("a0", "b3"), ("a7", "b9")]
    graph = build_snapshot(
        Corpus.from_records(
            [Paper(id=p, year=2000) for p in papers_a + papers_b], edges
        ),
        2000,
    )
    cover = Cover.build(2000, [papers_a, papers_b])
    net = build_interaction(cover, graph)
    i, j = CommunityId(2000, 0), CommunityId(2000, 1)
    assert net.weight(i, j) == 0.02  # tolerance 0
    assert net.percent(i, j) == 2.0  # displayed as 2%
    elapsed = time.monotonic() - started
    assert elapsed < 1.0
    report(f"interaction formula exactness (0.02 -> 2%, {elapsed:.3f}s)")


def test_fitness_matches_bruteforce_oracle():
    started = time.monotonic()
    rng = random.Random(1234)
    checked = 0
    for _ in range(200):
        graph = random_graph(rng, 30, rng.uniform(0.03, 0.15))
        members = frozenset(rng.sample(sorted(graph.nodes), rng.randint(1, 15)))
        assert fitness(members, graph) == fitness_oracle(members, graph)
        checked += 1
    elapsed = time.monotonic() - started
    assert checked == 200 and elapsed < 5.0
    report(f"fitness oracle (200 exact matches, {elapsed:.2f}s)")


def test_snapshot_cumulativity_property():
    rng = random.Random(777)
    violations = 0
    for _ in range(100):
        n = rng.randint(5, 40)
        papers = [(f"p{i}", rng.randint(1995, 2015)) for i in range(n)]
        years = dict(papers)
        edges = set()
        for _ in range(rng.randint(0, 3 * n)):
            a, b = rng.sample(list(years), 2)
            edges.add((a, b))
        corpus = Corpus.from_records(
            [Paper(id=p, year=y) for p, y in papers], sorted(edges)
        )
        series = snapshot_series(corpus, 1995, 2015)
        for prev, cur in zip(series, series[1:]):
            if not (prev.nodes <= cur.nodes and prev.edges <= cur.edges):
                violations += 1
    assert violations == 0
    report("snapshot cumulativity (100 corpora, zero violations)")


def test_tracking_event_oracle_50_scenarios():
    started = time.monotonic()
    for seed in range(50):
        truth = generate(tracking_scenario(seed))
        _, events = track_all(truth.cover_list(), 0.2)
        got = normalize_events(events)
        true_positives = sum((got & truth.events).values())
        precision = true_positives / sum(got.values())
        recall = true_positives / sum(truth.events.values())
        assert precision == 1.0 and recall == 1.0, f"seed {seed}"
    elapsed = time.monotonic() - started
    assert elapsed < 30.0
    report(f"tracking event oracle (50 scenarios, P=R=1.0, {elapsed:.1f}s)")


def _connected_graphs_up_to_seven():
    """Exhaustive n<=5 plus sampled n in {6, 7}; >= 500 graphs total."""
    graphs = []
    for n in (3, 4, 5):
        nodes = list(range(n))
        pairs = list(itertools.combinations(nodes, 2))
        for mask in range(1, 2 ** len(pairs)):
            edges = [pairs[k] for k in range(len(pairs)) if mask >> k & 1]
            if _connected(nodes, edges):
                graphs.append((nodes, edges))
    rng = random.Random(4242)
    for n in (6, 7):
        nodes = list(range(n))
        pairs = list(itertools.combinations(nodes, 2))
        produced = 0
        while produced < 120:
            edges = [p for p in pairs if rng.random() < rng.uniform(0.25, 0.7)]
            if _connected(nodes, edges):
                graphs.append((nodes, edges))
                produced += 1
    return graphs


def _connected(nodes, edges):
    if not nodes:
        return False
    adjacency = {v: set() for v in nodes}
    for a, b in edges:
        adjacency[a].add(b)
        adjacency[b].add(a)
    seen = {nodes[0]}
    frontier = [nodes[0]]
    while frontier:
        v = frontier.pop()
        for w in adjacency[v]:
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    return len(seen) == len(nodes)


def test_betweenness_matches_bruteforce_on_small_graphs():
    graphs = _connected_graphs_up_to_seven()
    assert len(graphs) >= 500
    worst = 0.0
    for nodes, edges in graphs:
        step = 2000
        ids = {v: CommunityId(step, v) for v in nodes}
        net = InteractionNetwork(
            step,
            {ids[v]: 2 for v in nodes},
            {(ids[a], ids[b]): 1 for a, b in edges},
        )
        adjacency = {c: net.undirected_neighbors(c) for c in net.nodes}
        oracle = betweenness_oracle(net.nodes, adjacency)
        for v in net.nodes:
            diff = abs(betweenness(net, v) - oracle[v])
            worst = max(worst, diff)
            assert diff <= 1e-12
    report(
        f"betweenness oracle ({len(graphs)} connected graphs <= 7 nodes, "
        f"max diff {worst:.2e})"
    )


def test_gamma_glm_recovery_and_monotone_deviance():
    started = time.monotonic()
    true_beta = np.array([-4.0, 2.0, 1.0])
    within = 0
    for seed in range(50):
        x, y = synth_gamma(seed=seed, n=500, beta=true_beta)
        model = fit_gamma_glm(x, y)
        path = model.deviance_path
        assert all(b <= a + 1e-12 for a, b in zip(path, path[1:]))
        rel = np.abs((model.coefficients - true_beta) / true_beta)
        if (rel <= 0.05).all():
            within += 1
    elapsed = time.monotonic() - started
    assert within >= 45
    assert elapsed < 10.0
    report(
        f"gamma GLM recovery ({within}/50 seeds within 5%, deviance "
        f"monotone, {elapsed:.1f}s)"
    )


def test_planted_silo_and_gap_rank_first_in_ten_seeds():
    for seed in range(10):
        truth = generate(silo_gap_scenario(seed))
        final = max(truth.covers)
        graph = build_snapshot(truth.corpus, final)
        cover = truth.covers[final]
        net = build_interaction(cover, graph)

        silo_rows = find_silos(net, min_size=10, k=len(cover))
        assert silo_rows[0].community == truth.community_ids[(final, "quiet")]
        assert silo_rows[0].size > 10

        design = build_design(net, truth.store, cover)
        model = fit_gamma_glm(design.features, design.responses)
        records = residual_report(
            model, design.features, design.responses, design.pairs
        )
        expected = {
            truth.community_ids[(final, "gapa")],
            truth.community_ids[(final, "gapb")],
        }
        assert set(records[0].pair) == expected, f"seed {seed}"
    report("planted silo and gap at rank 1 (10/10 seeds)")


def test_labelling_hand_check():
    docs = {
        "a": "kernel kernel kernel filler0",
        "b": "kernel kernel filler1",
        "c": "filler2 filler3",
        "d": "filler4 filler5",
    }
    others = {f"x{i}": f"other{i}" for i in range(7)}
    others["x0"] = "kernel other0"
    docs.update(others)
    corpus = Corpus.from_records(
        [Paper(id=pid, year=2000, title=text) for pid, text in docs.items()], []
    )
    cover = Cover.build(
        2000, [frozenset("abcd")] + [frozenset([f"x{i}"]) for i in range(7)]
    )
    value = ctd("kernel", cover.communities[0], cover, corpus)
    import math

    assert abs(value - 5 * math.log(2) * math.log(4)) <= 1e-12

    shared_corpus = Corpus.from_records(
        [Paper(id=p, year=2000, title=f"ubiq special{p}") for p in "abc"], []
    )
    shared_cover = Cover.build(2000, [frozenset("a"), frozenset("b"), frozenset("c")])
    for community in shared_cover.communities:
        for method in ("tficf", "ctd"):
            assert "ubiq" not in label_community(
                community, shared_cover, shared_corpus, n=10, method=method
            )
    report("labelling hand-check (CTD = 5 ln2 ln4; ubiquitous term never labelled)")


def test_contemporary_filter_boundaries():
    def rows_for(years, min_size=50):
        papers = [Paper(id=f"p{i}", year=y, title="t") for i, y in enumerate(years)]
        corpus = Corpus.from_records(papers, [])
        cover = Cover.build(2023, [[p.id for p in papers]])
        dynamic, _ = track_all([cover], 0.2)
        return contemporary(dynamic, corpus, 2023, {2023: cover}, min_size=min_size)

    assert rows_for([2023] * 50) == []  # size exactly 50: excluded
    assert len(rows_for([2023] * 51)) == 1  # size 51: included
    assert len(rows_for([2017] * 60)) == 1  # mean age exactly 6: included
    assert rows_for([2017] * 99 + [2016]) == []  # mean age 6.01: excluded
    report("contemporary filter boundaries (size 50/51, age 6.00/6.01)")


def test_pipeline_determinism(tmp_path):
    scenario_file = tmp_path / "scenario.json"
    scenario_file.write_text(
        json.dumps(tracking_scenario(0).to_dict()), "utf-8"
    )
    config = PipelineConfig(scenario_path=str(scenario_file))
    run_pipeline(config, tmp_path / "one")
    run_pipeline(config, tmp_path / "two")
    first = (tmp_path / "one/manifest.json").read_bytes()
    second = (tmp_path / "two/manifest.json").read_bytes()
    assert first == second
    report("pipeline determinism (byte-identical manifests)")
