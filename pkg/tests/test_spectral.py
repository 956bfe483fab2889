import math

import numpy as np
import pytest

from girthplant.errors import DomainError, InvalidParams, SizeExceeded
from girthplant.gadget import attach_pendants, subdivide
from girthplant.graphs import girth
from girthplant.hosts import random_regular
from girthplant.spectral import (
    DirectedEdgeSpace,
    adjacency_spectrum,
    corollary_nb_to_adj,
    ihara_bass_check,
    nb_spectrum,
    nonbacktracking_matrix,
    truncate_x,
    verify_x_radius,
)

from conftest import complete_graph, cycle_graph, path_graph, star_graph


@pytest.fixture(scope="module")
def k4_gadget():
    h, u, v = subdivide(complete_graph(4))
    return attach_pendants(h, u, v, 4)


class TestAdjacencySpectrum:
    def test_k4(self, k4):
        rep = adjacency_spectrum(k4)
        assert np.allclose(rep.eigenvalues, [-1, -1, -1, 3], atol=1e-9)
        assert rep.lam == pytest.approx(1.0, abs=1e-9)

    def test_petersen(self, petersen):
        rep = adjacency_spectrum(petersen)
        assert rep.lam == pytest.approx(2.0, abs=1e-8)
        expected = [-2.0] * 4 + [1.0] * 5 + [3.0]
        assert np.allclose(sorted(rep.eigenvalues), sorted(expected), atol=1e-8)

    def test_cycle_cosines(self):
        n = 12
        rep = adjacency_spectrum(cycle_graph(n))
        expected = sorted(2 * math.cos(2 * math.pi * j / n) for j in range(n))
        assert np.allclose(rep.eigenvalues, expected, atol=1e-9)

    def test_top_eigenvalue_is_degree(self):
        g = random_regular(128, 4, seed=0)
        rep = adjacency_spectrum(g)
        assert rep.eigenvalues[-1] == pytest.approx(4.0, abs=1e-8)
        assert all(abs(v) <= 4 + 1e-8 for v in rep.eigenvalues)

    def test_dense_cap(self):
        g = cycle_graph(30)
        with pytest.raises(SizeExceeded):
            adjacency_spectrum(g, mode="dense", cap=10)

    def test_extremal_matches_dense(self):
        g = random_regular(300, 4, seed=3)
        dense = adjacency_spectrum(g, mode="dense")
        ext = adjacency_spectrum(g, mode="extremal")
        assert ext.method == "iterative"
        assert ext.eigenvalues[-1] == pytest.approx(dense.eigenvalues[-1], abs=1e-6)
        assert ext.lam == pytest.approx(dense.lam, abs=1e-6)

    def test_extremal_deflated(self):
        g = random_regular(300, 4, seed=3)
        dense = adjacency_spectrum(g, mode="dense")
        ext = adjacency_spectrum(g, mode="extremal", deflate_ones=True)
        assert ext.lam == pytest.approx(dense.lam, abs=1e-6)

    def test_small_extremal_falls_back(self, k4):
        rep = adjacency_spectrum(k4, mode="extremal")
        assert rep.method == "dense"
        assert rep.eigenvalues[-1] == pytest.approx(3.0)


class TestDirectedEdgeSpace:
    def test_reverse_involution(self, petersen):
        space = DirectedEdgeSpace.build(petersen)
        assert space.size == 2 * petersen.m
        for idx in range(space.size):
            r = space.reverse(idx)
            assert space.reverse(r) == idx
            assert space.tails[r] == space.heads[idx]
            assert space.heads[r] == space.tails[idx]

    def test_index_roundtrip(self, c6):
        space = DirectedEdgeSpace.build(c6)
        for idx in range(space.size):
            assert space.of(space.tails[idx], space.heads[idx]) == idx


class TestNonbacktracking:
    def test_row_sums_regular(self, petersen):
        mat, space = nonbacktracking_matrix(petersen)
        sums = np.asarray(mat.sum(axis=1)).ravel()
        assert np.all(sums == 2)

    def test_star_leaf_row(self):
        g = star_graph(3)
        mat, space = nonbacktracking_matrix(g)
        leaf_to_center = space.of(1, 0)
        row = mat[[leaf_to_center], :].toarray().ravel()
        assert row.sum() == 2

    def test_k4_multiset(self, k4):
        rep = nb_spectrum(k4)
        assert len(rep.eigenvalues) == 12
        vals = sorted(rep.eigenvalues, key=lambda z: (z.real, z.imag))
        reals = [z for z in vals if abs(z.imag) < 1e-9]
        complexes = [z for z in vals if abs(z.imag) >= 1e-9]
        # {2, 1} from mu = 3, +-1 twice each from m - n = 2, six complex roots
        assert sorted(round(z.real) for z in reals) == [-1, -1, 1, 1, 1, 2]
        assert len(complexes) == 6
        for z in complexes:
            assert abs(z) == pytest.approx(math.sqrt(2), abs=1e-9)
        assert rep.lam == pytest.approx(2.0, abs=1e-9)

    def test_cycle_radius_one(self):
        rep = nb_spectrum(cycle_graph(5))
        assert rep.lam == pytest.approx(1.0, abs=1e-9)

    def test_tree_nilpotent(self):
        rep = nb_spectrum(path_graph(5))
        assert all(abs(z) < 1e-9 for z in rep.eigenvalues)
        assert nb_spectrum(path_graph(5), mode="radius_only").lam == 0.0

    def test_regular_radius_is_degree_minus_one(self, petersen):
        assert nb_spectrum(petersen).lam == pytest.approx(2.0, abs=1e-9)

    def test_power_agrees_with_dense(self, k4, c6, petersen):
        for g in (k4, c6, petersen, star_graph(3), cycle_graph(5)):
            dense = nb_spectrum(g, mode="dense")
            power = nb_spectrum(g, mode="radius_only")
            assert power.lam == pytest.approx(dense.lam, abs=1e-5)

    def test_nb_cap(self, petersen):
        with pytest.raises(SizeExceeded):
            nb_spectrum(petersen, mode="dense", cap=10)


class TestIharaBass:
    def test_k4(self, k4):
        ok, report = ihara_bass_check(k4)
        assert ok and report["max_match_distance"] < 1e-9
        assert report["multiplicity_pm1"] == 2

    def test_c6(self, c6):
        ok, report = ihara_bass_check(c6)
        assert ok
        assert report["multiplicity_pm1"] == 0

    def test_petersen(self, petersen):
        ok, report = ihara_bass_check(petersen)
        assert ok
        assert report["pairs"] == 30

    def test_random_cubic(self):
        g = random_regular(14, 3, seed=6)
        ok, _ = ihara_bass_check(g)
        assert ok

    def test_irregular_rejected(self):
        with pytest.raises(InvalidParams):
            ihara_bass_check(path_graph(3))


class TestCorollary:
    def test_mu_equals_d(self):
        for d in (3, 4, 7):
            assert corollary_nb_to_adj(float(d), d) == pytest.approx(d - 1)

    def test_d4_mu4(self):
        assert corollary_nb_to_adj(4.0, 4) == pytest.approx(3.0)

    def test_boundary(self):
        with pytest.raises(DomainError):
            corollary_nb_to_adj(2 * math.sqrt(3), 4)

    def test_result_above_sqrt(self):
        lam = corollary_nb_to_adj(2 * math.sqrt(3) + 1e-6, 4)
        assert lam > math.sqrt(3)


class TestTruncateX:
    def test_depth_zero_is_core(self, k4_gadget):
        t = truncate_x(k4_gadget, 0)
        assert t.n == 10
        assert girth(t) == 6

    def test_depth_one_growth(self, k4_gadget):
        t = truncate_x(k4_gadget, 1)
        assert t.n == 10 + 4 * 1 + 6 * 2

    def test_branching_rate(self, k4_gadget):
        sizes = [truncate_x(k4_gadget, depth).n for depth in range(5)]
        added = [b - a for a, b in zip(sizes, sizes[1:])]
        for first, second in zip(added, added[1:]):
            assert second == 3 * first

    def test_interior_degrees(self, k4_gadget):
        t = truncate_x(k4_gadget, 2)
        t1_n = truncate_x(k4_gadget, 1).n
        for v in range(t1_n):
            assert t.degree(v) == 4

    def test_plain_graph_input(self, k4):
        h, u, v = subdivide(k4)
        t = truncate_x(h, 1, u_set=u, v_set=v, d=4)
        assert t.n == 26

    def test_plain_graph_needs_sides(self, k4):
        h, _, _ = subdivide(k4)
        with pytest.raises(InvalidParams):
            truncate_x(h, 1)


class TestXRadius:
    def test_increasing_below_bound(self, k4_gadget):
        bound = 2 * math.sqrt(3)
        prev = 0.0
        for depth in range(5):
            ok, lam = verify_x_radius(k4_gadget, depth)
            assert ok and lam <= bound + 1e-9
            assert lam > prev
            prev = lam

    def test_gadget_graph_is_also_bounded(self, k4_gadget):
        # depth 1 equals the full pendant gadget; its top eigenvalue obeys
        # the same subgraph bound
        rep = adjacency_spectrum(truncate_x(k4_gadget, 1))
        assert rep.eigenvalues[-1] <= 2 * math.sqrt(3) + 1e-9

    def test_nb_radius_of_truncation(self, k4_gadget):
        t = truncate_x(k4_gadget, 2)
        rep = nb_spectrum(t, mode="dense")
        assert rep.lam <= math.sqrt(3) + 1e-9
