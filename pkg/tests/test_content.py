"""Embedding store and content metrics."""

import json
import math

import numpy as np
import pytest

from citeflow.content import (
    EmbeddingStore,
    centroid,
    citation_density,
    content_similarity,
    load_embeddings,
    save_embeddings,
    topic_coherence,
)
from citeflow.corpus import SnapshotGraph
from citeflow.errors import ParseError, UndefinedMetricError, ValidationError


def store_of(vectors):
    return EmbeddingStore(vectors)


class TestStoreIO:
    def test_load_uniform_dimension(self, tmp_path):
        f = tmp_path / "e.jsonl"
        f.write_text(
            json.dumps({"id": "a", "vector": [1, 0, 0, 0]}) + "\n" +
            json.dumps({"id": "b", "vector": [0, 1, 0, 0]}) + "\n",
            "utf-8",
        )
        store = load_embeddings(f)
        assert store.dimension == 4
        assert len(store) == 2

    def test_dimension_mismatch_names_offender(self, tmp_path):
        f = tmp_path / "e.jsonl"
        f.write_text(
            json.dumps({"id": "a", "vector": [1, 0, 0, 0]}) + "\n" +
            json.dumps({"id": "b", "vector": [0, 1, 0, 0, 0]}) + "\n",
            "utf-8",
        )
        with pytest.raises(ParseError, match="'b'"):
            load_embeddings(f)

    def test_non_finite_rejected(self, tmp_path):
        f = tmp_path / "e.jsonl"
        f.write_text(json.dumps({"id": "a", "vector": [1.0, None]}) + "\n", "utf-8")
        with pytest.raises(ParseError):
            load_embeddings(f)
        f.write_text('{"id": "a", "vector": [1.0, NaN]}\n', "utf-8")
        with pytest.raises(ParseError):
            load_embeddings(f)

    def test_roundtrip(self, tmp_path):
        store = store_of({"a": [1.0, 2.0], "b": [0.5, -1.0]})
        f = tmp_path / "e.jsonl"
        save_embeddings(store, f)
        again = load_embeddings(f)
        assert again.dimension == 2
        assert np.array_equal(again.vectors["b"], store.vectors["b"])

    def test_store_rejects_dimension_one(self):
        with pytest.raises(ValidationError):
            store_of({"a": [1.0]})


class TestCentroidCoherence:
    def test_single_member_centroid(self):
        store = store_of({"a": [1.0, 2.0]})
        assert np.array_equal(centroid(["a"], store), np.array([1.0, 2.0]))

    def test_opposite_vectors_cancel(self):
        store = store_of({"a": [1.0, 0.0], "b": [-1.0, 0.0]})
        assert np.array_equal(centroid(["a", "b"], store), np.zeros(2))

    def test_mean_of_two(self):
        store = store_of({"a": [1.0, 0.0], "b": [0.0, 1.0]})
        assert np.allclose(centroid(["a", "b"], store), [0.5, 0.5])

    def test_missing_members_skipped_with_warning(self, caplog):
        store = store_of({"a": [1.0, 0.0]})
        with caplog.at_level("WARNING"):
            vec = centroid(["a", "missing"], store)
        assert np.array_equal(vec, [1.0, 0.0])
        assert "skipped" in caplog.text

    def test_no_covered_members_is_error(self):
        store = store_of({"a": [1.0, 0.0]})
        with pytest.raises(UndefinedMetricError):
            centroid(["x", "y"], store)

    def test_identical_members_cohere_perfectly(self):
        store = store_of({"a": [0.3, 0.4], "b": [0.3, 0.4], "c": [0.3, 0.4]})
        assert topic_coherence(["a", "b", "c"], store) == pytest.approx(1.0)

    def test_orthogonal_pair_value(self):
        store = store_of({"a": [1.0, 0.0], "b": [0.0, 1.0]})
        assert topic_coherence(["a", "b"], store) == pytest.approx(
            math.sqrt(2) / 2, abs=1e-12
        )

    def test_single_member_coherence_is_one(self):
        store = store_of({"a": [3.0, 4.0]})
        assert topic_coherence(["a"], store) == pytest.approx(1.0)

    def test_zero_centroid_is_error(self):
        store = store_of({"a": [1.0, 0.0], "b": [-1.0, 0.0]})
        with pytest.raises(UndefinedMetricError):
            topic_coherence(["a", "b"], store)


class TestContentSimilarity:
    def test_same_singleton(self):
        store = store_of({"a": [1.0, 1.0]})
        assert content_similarity(["a"], ["a"], store) == pytest.approx(1.0)

    def test_orthogonal_singletons(self):
        store = store_of({"a": [1.0, 0.0], "b": [0.0, 1.0]})
        assert content_similarity(["a"], ["b"], store) == pytest.approx(0.0)

    def test_cross_pair_mean(self):
        store = store_of({"a": [1.0, 0.0], "b": [1.0, 0.0], "c": [0.0, 1.0]})
        assert content_similarity(["a"], ["b", "c"], store) == pytest.approx(0.5)

    def test_symmetry(self):
        rng = np.random.default_rng(3)
        store = store_of({f"p{i}": rng.normal(size=5) for i in range(6)})
        a, b = ["p0", "p1", "p2"], ["p3", "p4", "p5"]
        assert content_similarity(a, b, store) == pytest.approx(
            content_similarity(b, a, store)
        )

    def test_scale_invariance(self):
        rng = np.random.default_rng(4)
        raw = {f"p{i}": rng.normal(size=4) for i in range(5)}
        scaled = {k: [x * 7.5 for x in v] for k, v in raw.items()}
        a, b = ["p0", "p1"], ["p2", "p3", "p4"]
        assert content_similarity(a, b, store_of(raw)) == pytest.approx(
            content_similarity(a, b, store_of(scaled))
        )
        assert topic_coherence(a, store_of(raw)) == pytest.approx(
            topic_coherence(a, store_of(scaled))
        )

    def test_zero_vector_is_error_not_zero(self):
        store = store_of({"a": [0.0, 0.0], "b": [1.0, 0.0]})
        with pytest.raises(UndefinedMetricError):
            content_similarity(["a"], ["b"], store)

    def test_empty_side_is_error(self):
        store = store_of({"a": [1.0, 0.0]})
        with pytest.raises(UndefinedMetricError):
            content_similarity(["a"], ["nope"], store)


class TestCitationDensity:
    def test_two_members_one_citation(self):
        g = SnapshotGraph(2000, "ab", [("a", "b")])
        assert citation_density(["a", "b"], g) == 0.5

    def test_no_internal_edges(self):
        g = SnapshotGraph(2000, "abx", [("a", "x")])
        assert citation_density(["a", "b"], g) == 0.0

    def test_five_members_one_edge(self):
        g = SnapshotGraph(2000, "abcde", [("a", "b")])
        assert citation_density(["a", "b", "c", "d", "e"], g) == pytest.approx(0.05)

    def test_single_member_is_error(self):
        g = SnapshotGraph(2000, "ab", [("a", "b")])
        with pytest.raises(UndefinedMetricError):
            citation_density(["a"], g)

    def test_complete_directed_subgraph_is_one(self):
        g = SnapshotGraph(2000, "ab", [("a", "b"), ("b", "a")])
        assert citation_density(["a", "b"], g) == 1.0

    def test_undirected_flag_halves_denominator(self):
        g = SnapshotGraph(2000, "abc", [("a", "b")])
        assert citation_density(["a", "b", "c"], g, undirected=True) == pytest.approx(
            1 / 3
        )
