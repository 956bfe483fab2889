"""Vertex expansion measurement, mixing and girth bounds, and the small-set
expansion audit built from them.

Expansion is lossy by design around the planted set: Psi counts every
neighbor, inside or outside the set. The boundary-only ratio shows up
separately in the small-set audit, where it is compared against the spectral
lower bound.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass

from .errors import DomainError, InvalidParams, SizeExceeded
from .graphs import INFINITE, Graph, VertexSet, from_edges, girth

EXHAUSTIVE_CAP = 2_000_000


@dataclass(frozen=True)
class ExpansionReport:
    set_size: int
    psi: float
    boundary: int
    internal_edges: int
    bound_value: float | None = None
    passed: bool = True
    witness: tuple = ()


@dataclass(frozen=True)
class BoundParams:
    """Inputs to the small-set boundary bound; lam is the spectral gap value."""

    d: int
    lam: float
    kappa: float
    alpha: float
    n: int

    def __post_init__(self):
        if self.d < 3 or self.n < 2:
            raise InvalidParams("need d >= 3 and n >= 2")
        if not 0 < self.kappa < 1:
            raise InvalidParams("kappa must lie strictly between 0 and 1")
        if self.alpha <= 0:
            raise InvalidParams("alpha must be positive")


def _members(s) -> tuple:
    if isinstance(s, VertexSet):
        return s.members
    return tuple(sorted(set(s)))


def vertex_expansion(g: Graph, s) -> ExpansionReport:
    """Psi(S) = |Gamma(S)| / |S| with Gamma free to intersect S."""
    members = _members(s)
    if not members:
        raise InvalidParams("expansion of the empty set is undefined")
    inside = set(members)
    neighborhood = set()
    e_s = 0
    for v in members:
        for w in g.adjacency[v]:
            neighborhood.add(w)
            if w in inside and v < w:
                e_s += 1
    boundary = len(neighborhood - inside)
    return ExpansionReport(
        set_size=len(members),
        psi=len(neighborhood) / len(members),
        boundary=boundary,
        internal_edges=e_s,
        witness=members,
    )


def _grow_connected(g: Graph, size: int, rng: random.Random) -> tuple:
    start = rng.randrange(g.n)
    chosen = {start}
    fringe = [w for w in g.adjacency[start] if w not in chosen]
    while len(chosen) < size and fringe:
        v = fringe.pop(rng.randrange(len(fringe)))
        if v in chosen:
            continue
        chosen.add(v)
        fringe.extend(w for w in g.adjacency[v] if w not in chosen)
    return tuple(sorted(chosen))


def _descend(g: Graph, start: tuple, max_size: int, rng: random.Random) -> ExpansionReport:
    """Greedy local moves (drop, add, swap) while Psi strictly improves."""
    best = vertex_expansion(g, start)
    for _ in range(60):
        current = set(best.witness)
        outside = sorted(
            {w for v in current for w in g.adjacency[v] if w not in current}
        )
        candidates: list[tuple] = []
        if len(current) > 1:
            for v in best.witness:
                candidates.append(tuple(sorted(current - {v})))
        adds = rng.sample(outside, min(len(outside), 8))
        if len(current) < max_size:
            for w in adds:
                candidates.append(tuple(sorted(current | {w})))
        for v in best.witness:
            for w in adds:
                candidates.append(tuple(sorted((current - {v}) | {w})))
        improved = None
        for cand in candidates:
            if not cand or len(cand) > max_size:
                continue
            rep = vertex_expansion(g, cand)
            if rep.psi < best.psi - 1e-12:
                improved = rep
                break
        if improved is None:
            return best
        best = improved
    return best


def min_vertex_expansion(
    g: Graph,
    max_size: int,
    mode: str = "exhaustive",
    trials: int = 200,
    seed: int = 0,
    initial=None,
) -> ExpansionReport:
    """Lowest Psi over sets of size <= max_size.

    Exhaustive mode enumerates every subset and is exact; sampled mode mixes
    uniform and BFS-grown connected seeds with greedy descent and reports a
    heuristic upper bound on the true minimum. Sets passed via initial join
    the sampled pool as descent starting points.
    """
    if max_size < 1 or max_size > g.n:
        raise InvalidParams("max_size must fall in [1, n]")
    if mode == "exhaustive":
        total = sum(math.comb(g.n, k) for k in range(1, max_size + 1))
        if total > EXHAUSTIVE_CAP:
            raise SizeExceeded(
                f"{total} candidate sets; exhaustive mode capped at {EXHAUSTIVE_CAP}"
            )
        best = None
        for k in range(1, max_size + 1):
            for combo in itertools.combinations(range(g.n), k):
                rep = vertex_expansion(g, combo)
                if best is None or rep.psi < best.psi:
                    best = rep
        return best
    if mode != "sampled":
        raise InvalidParams(f"unknown mode {mode!r}")
    rng = random.Random(seed)
    starts: list[tuple] = []
    for s in initial or []:
        starts.append(_members(s))
    for t in range(trials):
        size = rng.randint(1, max_size)
        if t % 2 == 0:
            starts.append(tuple(sorted(rng.sample(range(g.n), size))))
        else:
            starts.append(_grow_connected(g, size, rng))
    best = None
    for start in starts:
        rep = _descend(g, start, max_size, rng)
        if best is None or rep.psi < best.psi:
            best = rep
    return best


def expander_mixing_check(g: Graph, lam: float, s, t) -> tuple:
    """e(S, T) vs the d|S||T|/n prediction, allowance lam * sqrt(|S||T|).

    e(S, T) counts ordered pairs, so a shared edge inside S and T counts
    twice, matching the spectral statement being audited.
    """
    d = g.regular_degree()
    if d is None:
        raise InvalidParams("mixing check needs a regular graph")
    smem = set(_members(s))
    tmem = set(_members(t))
    e_st = sum(1 for x in smem for y in g.adjacency[x] if y in tmem)
    deviation = abs(e_st - d * len(smem) * len(tmem) / g.n)
    allowance = lam * math.sqrt(len(smem) * len(tmem))
    slack = allowance - deviation
    return slack >= -1e-9, slack


def build_hs(g: Graph, s) -> Graph:
    """The contracted set graph: induced edges plus one path through each
    boundary vertex's neighbors inside the set.

    Vertices are relabeled to 0..|S|-1 in sorted order. The path stands in
    for an arbitrary spanning tree of the neighbor group; existing and
    duplicated pairs collapse, so the edge count never exceeds
    d|S| - e_S - |boundary|.
    """
    members = _members(s)
    if not members:
        raise InvalidParams("cannot contract an empty set")
    inside = set(members)
    idx = {v: i for i, v in enumerate(members)}
    edges = set()
    boundary = set()
    for v in members:
        for w in g.adjacency[v]:
            if w in inside:
                if v < w:
                    edges.add((idx[v], idx[w]))
            else:
                boundary.add(w)
    for w in sorted(boundary):
        inside_nbrs = sorted(x for x in g.adjacency[w] if x in inside)
        for a, b in zip(inside_nbrs, inside_nbrs[1:]):
            edges.add((idx[a], idx[b]))
    return from_edges(len(members), sorted(edges))


def moore_bound_check(g: Graph) -> tuple:
    """girth <= 2 log_{avg_degree - 1} n + 2, defined only above degree 2."""
    if g.n == 0:
        raise InvalidParams("empty graph")
    avg = 2.0 * g.m / g.n
    if avg <= 2.0:
        raise DomainError(
            f"average degree {avg:.4f} must exceed 2 for the girth bound"
        )
    girth_val = girth(g)
    bound = 2.0 * math.log(g.n) / math.log(avg - 1.0) + 2.0
    values = {"girth": girth_val, "avg_degree": avg, "bound": bound, "n": g.n}
    return girth_val <= bound + 1e-9, values


def small_set_bound(p: BoundParams, statement_variant: bool = False) -> float:
    """Boundary-expansion lower bound for sets of size n^kappa.

    Default uses the derivation's closing form with middle term
    (d^(2 kappa / alpha) - 1)/2; the statement_variant flag swaps in the
    weaker-looking d^(kappa/alpha)/2 from the theorem statement so both
    readings stay computable side by side.
    """
    if statement_variant:
        middle = p.d ** (p.kappa / p.alpha) / 2.0
    else:
        middle = (p.d ** (2.0 * p.kappa / p.alpha) - 1.0) / 2.0
    return p.d - p.lam - middle - p.d / p.n ** (1.0 - p.kappa)


def audit_small_sets(
    g: Graph, lam: float, kappa: float, trials: int, seed: int
) -> dict:
    """Sample sets of size <= n^kappa and audit every claim at once.

    Per sample: the boundary ratio against small_set_bound, the edge-count
    identity sum_i i*n_i = d|S| - 2 e_S, the contracted-graph edge budget,
    and the halved-girth property of the contraction. alpha comes from the
    measured girth, never from the host family.
    """
    d = g.regular_degree()
    if d is None or d < 3:
        raise InvalidParams("audit needs a d-regular graph with d >= 3")
    if not 0 < kappa < 1:
        raise InvalidParams("kappa must lie strictly between 0 and 1")
    girth_val = girth(g)
    log_n = math.log(g.n) / math.log(d - 1)
    alpha = (girth_val - 4.0) / (2.0 * log_n)
    if alpha <= 0:
        raise DomainError("measured girth must exceed 4 for the small-set bound")
    bound = small_set_bound(BoundParams(d=d, lam=lam, kappa=kappa, alpha=alpha, n=g.n))
    max_size = max(1, int(g.n**kappa))
    half_girth = math.ceil(girth_val / 2)
    rng = random.Random(seed)

    ratio_violations = 0
    identity_failures = 0
    hs_edge_violations = 0
    hs_girth_failures = 0
    min_ratio = INFINITE
    for t in range(trials):
        size = rng.randint(1, max_size)
        if t % 2 == 0:
            chosen = tuple(sorted(rng.sample(range(g.n), size)))
        else:
            chosen = _grow_connected(g, size, rng)
        rep = vertex_expansion(g, chosen)
        ratio = rep.boundary / rep.set_size
        min_ratio = min(min_ratio, ratio)
        if ratio < bound - 1e-9:
            ratio_violations += 1
        inside = set(chosen)
        cross = sum(
            1 for v in chosen for w in g.adjacency[v] if w not in inside
        )
        if cross != d * rep.set_size - 2 * rep.internal_edges:
            identity_failures += 1
        hs = build_hs(g, chosen)
        if hs.m > d * rep.set_size - rep.internal_edges - rep.boundary:
            hs_edge_violations += 1
        if girth(hs) < half_girth:
            hs_girth_failures += 1

    ok = (
        ratio_violations == 0
        and identity_failures == 0
        and hs_edge_violations == 0
        and hs_girth_failures == 0
    )
    return {
        "ok": ok,
        "trials": trials,
        "d": d,
        "girth": girth_val,
        "alpha": alpha,
        "kappa": kappa,
        "lam": lam,
        "bound": bound,
        "max_size": max_size,
        "min_ratio_observed": min_ratio,
        "ratio_violations": ratio_violations,
        "identity_failures": identity_failures,
        "hs_edge_violations": hs_edge_violations,
        "hs_girth_failures": hs_girth_failures,
    }
