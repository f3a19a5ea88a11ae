"""Research-question workflows: foundational, contemporary, transfer matrix."""

import numpy as np
import pytest

from citeflow.analyze import WindowSpec, contemporary, foundational, transfer_matrix
from citeflow.content import EmbeddingStore
from citeflow.corpus import Corpus, Paper
from citeflow.detect import CommunityId, Cover
from citeflow.errors import ArgumentError
from citeflow.interact import InteractionNetwork
from citeflow.track import track_all


def cid(i, step):
    return CommunityId(step, i)


def chain_network(step, n, bridge_index=None):
    """Line network so middle nodes get betweenness; sizes all 12."""
    sizes = {cid(i, step): 12 for i in range(n)}
    counts = {}
    for i in range(n - 1):
        counts[(cid(i, step), cid(i + 1, step))] = 1
    return InteractionNetwork(step, sizes, counts)


class TestFoundational:
    def make_dynamic(self, steps, pools):
        covers = [
            Cover.build(step, [pool for pool in pools if pool is not None])
            for step, pools in zip(steps, pools)
        ]
        dynamic, _ = track_all(covers, 0.2)
        return covers, dynamic

    def test_bridge_community_ranks_first(self):
        # three communities in a line at each step: the middle one bridges
        pools = {
            "left": [f"l{i}" for i in range(12)],
            "mid": [f"m{i}" for i in range(12)],
            "right": [f"r{i}" for i in range(12)],
        }
        covers = [
            Cover.build(step, [pools["left"], pools["mid"], pools["right"]])
            for step in (2000, 2001, 2002)
        ]
        dynamic, _ = track_all(covers, 0.2)
        nets = {step: chain_network(step, 3) for step in (2000, 2001, 2002)}
        rows = foundational(dynamic, nets, WindowSpec(2000, 2002), k=3)
        mid_dyn = [d for d in dynamic if "m0" in d.front_members][0]
        assert rows[0].dynamic_id == mid_dyn.id
        assert rows[0].mean_betweenness == pytest.approx(1.0)
        assert rows[0].lifespan == 3

    def test_absent_steps_count_as_zero(self):
        pools = [[f"a{i}" for i in range(12)], [f"b{i}" for i in range(12)],
                 [f"c{i}" for i in range(12)]]
        full = Cover.build(2000, pools)
        partial = Cover.build(2001, pools)
        covers = [full, partial]
        dynamic, _ = track_all(covers, 0.2)
        nets = {2000: chain_network(2000, 3), 2001: chain_network(2001, 3)}
        # window includes 2002 where no net exists for anyone: scores dilute
        rows = foundational(dynamic, nets, WindowSpec(2000, 2002), k=3)
        assert rows[0].mean_betweenness == pytest.approx(2 / 3)

    def test_all_isolated_falls_back_to_lifespan(self):
        long_pool = [f"x{i}" for i in range(10)]
        short_pool = [f"y{i}" for i in range(10)]
        covers = [
            Cover.build(2000, [long_pool, short_pool]),
            Cover.build(2001, [long_pool]),
        ]
        dynamic, _ = track_all(covers, 0.2)
        nets = {
            step: InteractionNetwork(step, {c.id: 10 for c in cover.communities}, {})
            for step, cover in zip((2000, 2001), covers)
        }
        rows = foundational(dynamic, nets, WindowSpec(2000, 2001), k=2)
        assert all(r.mean_betweenness == 0.0 for r in rows)
        assert rows[0].lifespan == 2

    def test_empty_window_coverage_is_error(self):
        covers = [Cover.build(2000, [["a", "b"]])]
        dynamic, _ = track_all(covers, 0.2)
        nets = {2000: InteractionNetwork(2000, {cid(0, 2000): 2}, {})}
        with pytest.raises(ArgumentError):
            foundational(dynamic, nets, WindowSpec(1990, 1995), k=5)

    def test_ranking_invariant_to_input_permutation(self):
        pools = [[f"a{i}" for i in range(12)], [f"b{i}" for i in range(12)],
                 [f"c{i}" for i in range(12)]]
        covers = [Cover.build(step, pools) for step in (2000, 2001)]
        dynamic, _ = track_all(covers, 0.2)
        nets = {2000: chain_network(2000, 3), 2001: chain_network(2001, 3)}
        window = WindowSpec(2000, 2001)
        forward = foundational(dynamic, nets, window, k=3)
        backward = foundational(list(reversed(dynamic)), nets, window, k=3)
        assert forward == backward

    def test_window_validation(self):
        with pytest.raises(ArgumentError):
            WindowSpec(2010, 2000)


def build_front_corpus(front_years):
    papers = []
    for name, years in front_years.items():
        for i, year in enumerate(years):
            papers.append(Paper(id=f"{name}{i}", year=year, title=name))
    return Corpus.from_records(papers, [])


class TestContemporary:
    def run_filter(self, sizes_years, ref_year=2023, **kwargs):
        """sizes_years: {name: list of years} each becoming a one-step community."""
        corpus = build_front_corpus(sizes_years)
        member_sets = [
            [f"{name}{i}" for i in range(len(years))]
            for name, years in sizes_years.items()
        ]
        covers = [Cover.build(2023, member_sets)]
        dynamic, _ = track_all(covers, 0.2)
        return contemporary(dynamic, corpus, ref_year, {2023: covers[0]}, **kwargs)

    def test_all_published_at_ref_year_pass_age_filter(self):
        rows = self.run_filter({"fresh": [2023] * 60}, min_size=50)
        assert len(rows) == 1
        assert rows[0].mean_age == 0.0

    def test_size_boundary_strict(self):
        at_fifty = self.run_filter({"edge": [2023] * 50}, min_size=50)
        assert at_fifty == []
        over_fifty = self.run_filter({"edge": [2023] * 51}, min_size=50)
        assert len(over_fifty) == 1

    def test_age_boundary(self):
        exactly_six = self.run_filter({"six": [2017] * 60}, min_size=50)
        assert len(exactly_six) == 1
        # mean age 6.01: 99 papers aged 6, one aged 7
        slightly_over = self.run_filter(
            {"old": [2017] * 99 + [2016]}, min_size=50
        )
        assert slightly_over == []

    def test_coherent_recent_community_is_sole_survivor(self):
        rng = np.random.default_rng(14)
        young_ids = [f"young{i}" for i in range(60)]
        old_ids = [f"old{i}" for i in range(60)]
        papers = [Paper(id=p, year=2022, title="t") for p in young_ids]
        papers += [Paper(id=p, year=1995, title="t") for p in old_ids]
        corpus = Corpus.from_records(papers, [])
        covers = [
            Cover.build(2022, [young_ids, old_ids]),
            Cover.build(2023, [young_ids, old_ids]),
        ]
        dynamic, _ = track_all(covers, 0.2)
        centre = np.ones(4)
        vectors = {p: centre + rng.normal(0, 0.01, 4) for p in young_ids}
        vectors.update({p: rng.normal(0, 1.0, 4) for p in old_ids})
        store = EmbeddingStore(vectors)
        rows = contemporary(
            dynamic, corpus, 2023, {c.step: c for c in covers},
            store=store, min_size=50,
        )
        assert len(rows) == 1
        young_dyn = [d for d in dynamic if "young0" in d.front_members][0]
        assert rows[0].dynamic_id == young_dyn.id

    def test_filters_are_independent(self):
        # removing the size filter only enlarges the result set
        sizes_years = {"small": [2023] * 20, "large": [2023] * 60}
        strict = self.run_filter(dict(sizes_years), min_size=50)
        loose = self.run_filter(dict(sizes_years), min_size=10)
        strict_ids = {r.dynamic_id for r in strict}
        loose_ids = {r.dynamic_id for r in loose}
        assert strict_ids <= loose_ids


class TestTransferMatrix:
    def make_net(self):
        sizes = {cid(0, 2023): 10, cid(1, 2023): 10, cid(2, 2023): 4}
        counts = {(cid(0, 2023), cid(1, 2023)): 2}
        return InteractionNetwork(2023, sizes, counts)

    def test_two_percent_cell(self):
        net = self.make_net()
        tm = transfer_matrix([cid(0, 2023)], [cid(1, 2023)], net)
        assert tm.cell(cid(0, 2023), cid(1, 2023)) == 2.0

    def test_disconnected_pair_is_zero(self):
        net = self.make_net()
        tm = transfer_matrix([cid(0, 2023)], [cid(2, 2023)], net)
        assert tm.cell(cid(0, 2023), cid(2, 2023)) == 0.0

    def test_self_cell_marked_nan(self):
        net = self.make_net()
        tm = transfer_matrix([cid(0, 2023)], [cid(0, 2023)], net)
        assert np.isnan(tm.values[0, 0])

    def test_unknown_community_is_error(self):
        net = self.make_net()
        with pytest.raises(ArgumentError):
            transfer_matrix([cid(7, 2023)], [cid(0, 2023)], net)

    def test_cells_track_weights_exactly_on_dyadic_sizes(self):
        # power-of-two size products make both routes exact
        sizes = {cid(0, 2023): 4, cid(1, 2023): 8}
        counts = {(cid(0, 2023), cid(1, 2023)): 1, (cid(1, 2023), cid(0, 2023)): 2}
        net = InteractionNetwork(2023, sizes, counts)
        tm = transfer_matrix([cid(0, 2023)], [cid(1, 2023)], net)
        expected = 100 * (net.weight(cid(0, 2023), cid(1, 2023))
                          + net.weight(cid(1, 2023), cid(0, 2023)))
        assert tm.cell(cid(0, 2023), cid(1, 2023)) == expected
