import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from girthplant.errors import GirthTooSmall, InvalidParams, PreconditionViolated
from girthplant.gadget import construct_pipeline
from girthplant.graphs import VertexSet, from_edges
from girthplant.hosts import random_regular
from girthplant.kahale import (
    kahale_lemma_check,
    kahale_vector,
    layer_mass,
    verify_subsolution,
)

D = 4
C = 1 / math.sqrt(3)
MU = 2 * math.sqrt(3)


@pytest.fixture(scope="module")
def big():
    # spacing radius 2 at this size, so layers are provably trees to depth 2
    return construct_pipeline(4, random_regular(2048, 4, seed=7), 8, seed=7)


@pytest.fixture(scope="module")
def vec2(big):
    return kahale_vector(big, 2)


def regular_tree(d: int, depth: int):
    """Root 0 with d children, branching d-1 below; returns (graph, levels)."""
    edges = []
    levels = [[0]]
    nxt = 1
    for lev in range(1, depth + 1):
        new = []
        for p in levels[-1]:
            kids = d if lev == 1 else d - 1
            for _ in range(kids):
                edges.append((p, nxt))
                new.append(nxt)
                nxt += 1
        levels.append(new)
    return from_edges(nxt, edges), levels


def level_values(levels, n: int, f):
    out = np.zeros(n)
    for lev, layer in enumerate(levels):
        for v in layer:
            out[v] = f(lev)
    return out


def critical_profile(d: int):
    c = 1 / math.sqrt(d - 1)
    return lambda i: (1 + (d - 2) * i / d) * c**i


@pytest.fixture(scope="module")
def tree():
    return regular_tree(4, 4)


class TestKahaleVector:
    def test_layer_sizes(self, big, vec2):
        assert [len(l) for l in vec2.decomposition.layers] == [20, 32, 96]
        counts = Counter(
            (vec2.branch[v], h) for v, h in vec2.decomposition.membership().items()
        )
        assert counts == {
            ("U", 0): 8,
            ("V", 0): 12,
            ("U", 1): 8,
            ("V", 1): 24,
            ("U", 2): 24,
            ("V", 2): 72,
        }

    def test_values_by_branch(self, vec2):
        member = vec2.decomposition.membership()
        expected = {
            ("U", 0): 1.0,
            ("V", 0): 2 * C - C**3,
            ("U", 1): C,
            ("V", 1): 2 / 3,
            ("U", 2): C**2,
            ("V", 2): (2 / 3) * C,
        }
        for v, h in member.items():
            assert vec2.values[v] == pytest.approx(expected[(vec2.branch[v], h)])

    def test_v_branch_formula_forms_agree(self):
        # the two ways of writing the V-branch coefficient are the same number
        for d in (4, 6, 8):
            lhs = 2 / (d - 2) - 2 / ((d - 1) * (d - 2))
            assert lhs == pytest.approx(2 / (d - 1), abs=1e-12)

    def test_layer_masses_constant(self, vec2):
        lm = layer_mass(vec2.values, vec2.decomposition)
        gamma = 8
        assert lm[1] == pytest.approx(gamma * (2 * D - 3) / (D - 1), abs=1e-9)
        assert lm[2] == pytest.approx(lm[1], abs=1e-9)
        assert lm[0] == pytest.approx(gamma + 12 * (2 * C - C**3) ** 2, abs=1e-9)
        assert lm[-1] == pytest.approx(sum(lm[:-1]), abs=1e-9)

    def test_h_zero(self, big):
        vec = kahale_vector(big, 0)
        assert vec.decomposition.depth == 0
        assert len(vec.values) == 20

    def test_negative_h(self, big):
        with pytest.raises(InvalidParams):
            kahale_vector(big, -1)

    def test_determinism(self, big, vec2):
        again = kahale_vector(big, 2)
        assert again.values == vec2.values
        assert again.decomposition == vec2.decomposition

    def test_layer_merge_detected(self):
        # matching spacing 1 here: two attachment points are adjacent, so the
        # second layer cannot be a disjoint union of trees
        small = construct_pipeline(4, random_regular(256, 4, seed=11), 4, seed=11)
        assert small.min_matching_distance == 1
        kahale_vector(small, 1)
        with pytest.raises(GirthTooSmall):
            kahale_vector(small, 2)


class TestSubsolution:
    def test_slack_pattern(self, big, vec2):
        rep = verify_subsolution(big, vec2, MU)
        assert rep["ok"]
        assert rep["checked"] == 52
        assert set(rep["buckets"]) == {"U:0", "V:0", "U:1", "V:1"}
        for key in ("U:0", "V:0", "U:1"):
            b = rep["buckets"][key]
            assert abs(b["min_slack"]) < 1e-8 and abs(b["max_slack"]) < 1e-8
        r = rep["buckets"]["V:1"]
        assert r["min_slack"] == pytest.approx(C**3, abs=1e-12)
        assert r["max_slack"] == pytest.approx(C**3, abs=1e-12)

    def test_mu_zero_fails(self, big, vec2):
        rep = verify_subsolution(big, vec2, 0.0)
        assert not rep["ok"]
        assert rep["max_violation"] > 1.0


class TestLayerMass:
    def test_indicator_of_root_layer(self, vec2):
        ind = {v: 1.0 for v in vec2.decomposition.layers[0]}
        lm = layer_mass(ind, vec2.decomposition)
        assert lm == [20.0, 0.0, 0.0, 20.0]

    def test_uniform_proportional_to_sizes(self, vec2):
        ones = {v: 1.0 for h in vec2.decomposition.layers for v in h}
        lm = layer_mass(ones, vec2.decomposition)
        assert lm[:3] == [20.0, 32.0, 96.0]

    def test_dense_array_input(self, big, vec2):
        arr = np.ones(big.graph.n)
        lm = layer_mass(arr, vec2.decomposition)
        assert lm[:3] == [20.0, 32.0, 96.0]
        assert lm[-1] == pytest.approx(big.graph.n)


class TestLemmaOnTrees:
    def test_critical_slice(self, tree):
        g, levels = tree
        crit = level_values(levels, g.n, critical_profile(4))
        rep = kahale_lemma_check(g, VertexSet((0,), g.n), 3, crit, MU, g=crit)
        assert rep["ok"] and rep["b_psd"]
        s2 = (1 + 2 * 2 / 4) * C**2
        s3 = (1 + 2 * 3 / 4) * C**3
        assert rep["alpha"] == pytest.approx(0.0, abs=1e-12)
        assert rep["gamma"] == pytest.approx(s2 / s3, abs=1e-9)
        assert rep["beta"] == pytest.approx(3 * s3 / s2, abs=1e-9)
        # equality case: B annihilates s, so the bottom eigenvalue sits at 0
        assert abs(rep["b_min_eig"]) < 1e-9
        assert rep["conclusion"]["checked"]
        assert rep["conclusion"]["lhs"] == pytest.approx(1.0)
        assert rep["conclusion"]["rhs"] == pytest.approx(1.0)

    def test_geometric_slice_strict(self, tree):
        g, levels = tree
        geo = level_values(levels, g.n, lambda i: C**i)
        crit = level_values(levels, g.n, critical_profile(4))
        rep = kahale_lemma_check(g, VertexSet((0,), g.n), 3, geo, MU, g=crit)
        assert rep["ok"] and rep["b_psd"]
        assert rep["b_min_eig"] > 0.5
        assert rep["conclusion"]["checked"] and rep["conclusion"]["holds"]
        assert rep["conclusion"]["lhs"] == pytest.approx(6.25)
        assert rep["conclusion"]["rhs"] == pytest.approx(4.0)

    def test_h_one(self, tree):
        g, levels = tree
        crit = level_values(levels, g.n, critical_profile(4))
        rep = kahale_lemma_check(g, VertexSet((0,), g.n), 1, crit, MU, g=crit)
        assert rep["ok"]
        assert rep["conclusion"]["lhs"] == pytest.approx(rep["conclusion"]["rhs"])

    def test_non_eigen_g_skips_conclusion(self, tree):
        g, levels = tree
        geo = level_values(levels, g.n, lambda i: C**i)
        rep = kahale_lemma_check(g, VertexSet((0,), g.n), 3, geo, MU, g=np.ones(g.n))
        assert rep["ok"]
        assert not rep["conclusion"]["checked"]

    def test_unbalanced_valency(self):
        g, levels = regular_tree(4, 2)
        kept = [(u, v) for u, v in g.edges() if v != g.n - 1]
        pruned = from_edges(g.n - 1, kept)
        s = level_values(levels, g.n, lambda i: C**i)[: pruned.n]
        with pytest.raises(PreconditionViolated, match=r"condition \(1\)"):
            kahale_lemma_check(pruned, VertexSet((0,), pruned.n), 2, s, MU)

    def test_broken_ratio(self, tree):
        g, levels = tree
        s = level_values(levels, g.n, lambda i: C**i)
        s[levels[2][0]] *= 0.9
        with pytest.raises(PreconditionViolated, match=r"condition \(2\)"):
            kahale_lemma_check(g, VertexSet((0,), g.n), 2, s, MU)

    def test_mu_too_small(self, tree):
        g, levels = tree
        geo = level_values(levels, g.n, lambda i: C**i)
        with pytest.raises(PreconditionViolated, match=r"condition \(3\)"):
            kahale_lemma_check(g, VertexSet((0,), g.n), 3, geo, 1.0)

    def test_mu_not_positive(self, tree):
        g, levels = tree
        geo = level_values(levels, g.n, lambda i: C**i)
        with pytest.raises(PreconditionViolated, match=r"condition \(3\)"):
            kahale_lemma_check(g, VertexSet((0,), g.n), 3, geo, -2.0)

    def test_h_zero_rejected(self, tree):
        g, levels = tree
        geo = level_values(levels, g.n, lambda i: C**i)
        with pytest.raises(InvalidParams):
            kahale_lemma_check(g, VertexSet((0,), g.n), 0, geo, MU)

    @settings(max_examples=20, deadline=None)
    @given(
        d=st.integers(min_value=3, max_value=6),
        depth=st.integers(min_value=2, max_value=4),
        h_off=st.integers(min_value=1, max_value=3),
    )
    def test_critical_profile_always_passes(self, d, depth, h_off):
        h = min(h_off, depth)
        g, levels = regular_tree(d, depth)
        mu = 2 * math.sqrt(d - 1)
        crit = level_values(levels, g.n, critical_profile(d))
        rep = kahale_lemma_check(g, VertexSet((0,), g.n), h, crit, mu, g=crit)
        assert rep["ok"] and rep["b_psd"]
        assert rep["b_min_eig"] >= -1e-9 * max(rep["b_norm"], 1.0)
        assert rep["conclusion"]["checked"] and rep["conclusion"]["holds"]


class TestLemmaOnSplice:
    def test_real_slice(self, big, vec2):
        x0 = VertexSet(vec2.decomposition.layers[0], big.graph.n)
        rep = kahale_lemma_check(big.graph, x0, 2, vec2, MU)
        assert rep["ok"] and rep["b_psd"]
        assert rep["alpha"] == pytest.approx(0.0, abs=1e-12)
        assert rep["beta"] == pytest.approx(math.sqrt(3), abs=1e-9)
        assert rep["gamma"] == pytest.approx(math.sqrt(3), abs=1e-9)
        assert rep["a_term_projector"] == "P_{<=h-1}"
        assert rep["layer_sizes"] == [20, 32, 96]
