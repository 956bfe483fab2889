"""Exact walk-counting oracles behind the trace-method audit.

A (a x b)-linkage is a closed or open walk of a*b vertex steps split into a
segments of b steps, each segment nonbacktracking inside, with backtracking
permitted where segments meet. The quadratic form <1_uv, (B^l (B^T)^l)^k 1_uv>
counts the subfamily where consecutive segments are exact mirror images at
their joint: every joint is a forced U-turn, the opening edge is pinned to
(u, v), and closure additionally pins the final edge to (v, u). Both counters
live here so the chain

    quadratic_form == mirror count <= free linkage count <= encoding bound

can be checked end to end with integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import BudgetExceeded, InvalidParams, SizeExceeded
from .gadget import Gadget
from .graphs import Graph
from .spectral import DirectedEdgeSpace, truncate_x

QF_EDGE_CAP = 200_000
QF_POWER_CAP = 64
DEFAULT_BUDGET = 5_000_000


@dataclass(frozen=True)
class LinkageQuery:
    graph: Graph
    start_edge: tuple
    segments_a: int
    segment_len_b: int
    closed: bool = True

    def __post_init__(self):
        if self.segments_a < 1 or self.segment_len_b < 1:
            raise InvalidParams("segment counts and lengths must be at least 1")
        u, v = self.start_edge
        if not (0 <= u < self.graph.n) or v not in self.graph.adjacency[u]:
            raise InvalidParams(f"start edge ({u}, {v}) not present in the graph")


@dataclass(frozen=True)
class EncodingBoundParams:
    k: int
    ell: int
    d: int

    def __post_init__(self):
        if self.k < 1 or self.ell < 1 or self.d < 1:
            raise InvalidParams("k, ell, d must all be positive")


def _branch_budget(g: Graph, steps: int, budget: int) -> None:
    maxdeg = max((len(nbrs) for nbrs in g.adjacency), default=0)
    est = maxdeg * max(maxdeg - 1, 1) ** max(steps - 1, 0)
    if est > budget:
        raise BudgetExceeded(
            f"worst-case search space {est:.3g} exceeds budget {budget}"
        )


def count_linkages_bruteforce(q: LinkageQuery, budget: int = DEFAULT_BUDGET) -> int:
    """Count linkages by depth-first enumeration, joints free.

    Walks start at the tail of the query edge; only the vertex is pinned, the
    first step may go anywhere. Inside a segment steps may not reverse the
    previous edge; the first step of each later segment may.
    """
    g = q.graph
    a, b = q.segments_a, q.segment_len_b
    total = a * b
    _branch_budget(g, total, budget)
    start = q.start_edge[0]
    count = 0

    def dfs(v: int, prev: int, step: int) -> None:
        nonlocal count
        if step == total:
            if not q.closed or v == start:
                count += 1
            return
        inside = step % b != 0
        for w in g.adjacency[v]:
            if inside and w == prev:
                continue
            dfs(w, v, step + 1)

    dfs(start, -1, 0)
    return count


def count_mirror_linkages(q: LinkageQuery, budget: int = DEFAULT_BUDGET) -> int:
    """Count linkages under the segment-reversal convention.

    Even-indexed segments run forward, odd-indexed ones are reversals of
    forward walks, which in traversal order means: the opening edge is exactly
    the query edge, every joint repeats the previous edge backwards, and all
    other steps are nonbacktracking. A closed query must return along the
    reverse of the opening edge. This is the subfamily the quadratic form
    counts, so the two agree exactly.
    """
    if q.segments_a % 2 != 0:
        raise InvalidParams("the reversal convention pairs segments; need even a")
    g = q.graph
    a, b = q.segments_a, q.segment_len_b
    total = a * b
    _branch_budget(g, total, budget)
    u0, v0 = q.start_edge
    count = 0

    def dfs(v: int, prev: int, step: int) -> None:
        nonlocal count
        if step == total:
            if not q.closed or (v == u0 and prev == v0):
                count += 1
            return
        if step == 0:
            dfs(v0, u0, 1)
            return
        if step % b == 0:
            dfs(prev, v, step + 1)
            return
        for w in g.adjacency[v]:
            if w != prev:
                dfs(w, v, step + 1)

    dfs(u0, -1, 0)
    return count


def _edge_maps(space: DirectedEdgeSpace):
    succ: list = [[] for _ in range(space.size)]
    pred: list = [[] for _ in range(space.size)]
    g = space.graph
    for e in range(space.size):
        u = space.tails[e]
        v = space.heads[e]
        for w in g.adjacency[v]:
            if w != u:
                f = space.of(v, w)
                succ[e].append(f)
                pred[f].append(e)
    return succ, pred


def _qf_batch(g: Graph, edges: list, k: int, ell: int) -> list:
    """Quadratic forms for many pinned edges at once via int64 sparse matvecs.

    Caller guarantees every intermediate count fits in int64.
    """
    if k < 1 or ell < 0:
        raise InvalidParams("need k >= 1 and ell >= 0")
    space = DirectedEdgeSpace.build(g)
    if space.size > QF_EDGE_CAP:
        raise SizeExceeded(f"edge space {space.size} exceeds {QF_EDGE_CAP}")
    if k * max(ell, 1) > QF_POWER_CAP:
        raise SizeExceeded(f"power budget k*ell capped at {QF_POWER_CAP}")
    succ, _ = _edge_maps(space)
    rows = []
    cols = []
    for e, nxt in enumerate(succ):
        rows.extend([e] * len(nxt))
        cols.extend(nxt)
    b = sparse.csr_matrix(
        (np.ones(len(rows), dtype=np.int64), (rows, cols)),
        shape=(space.size, space.size),
    )
    bt = b.T.tocsr()
    pins = [space.of(u, w) for u, w in edges]
    x = np.zeros((space.size, len(pins)), dtype=np.int64)
    for j, e0 in enumerate(pins):
        x[e0, j] = 1
    for _ in range(k):
        for _ in range(ell):
            x = bt @ x
        for _ in range(ell):
            x = b @ x
    return [int(x[e0, j]) for j, e0 in enumerate(pins)]


def quadratic_form(g: Graph, edge: tuple, k: int, ell: int) -> int:
    """Exact integer <1_uv, (B^ell (B^T)^ell)^k 1_uv>.

    Plain Python integers throughout, so the value is exact at any size and
    there is no overflow to report.
    """
    if k < 1 or ell < 0:
        raise InvalidParams("need k >= 1 and ell >= 0")
    space = DirectedEdgeSpace.build(g)
    if space.size > QF_EDGE_CAP:
        raise SizeExceeded(f"edge space {space.size} exceeds {QF_EDGE_CAP}")
    if k * max(ell, 1) > QF_POWER_CAP:
        raise SizeExceeded(f"power budget k*ell capped at {QF_POWER_CAP}")
    u, v = edge
    if not (0 <= u < g.n) or v not in g.adjacency[u]:
        raise InvalidParams(f"edge ({u}, {v}) not present in the graph")
    e0 = space.of(u, v)
    succ, pred = _edge_maps(space)
    x = [0] * space.size
    x[e0] = 1
    for _ in range(k):
        for _ in range(ell):
            x = [sum(x[e] for e in pred[f]) for f in range(space.size)]
        for _ in range(ell):
            x = [sum(x[f] for f in succ[e]) for e in range(space.size)]
    return x[e0]


def encoding_bound_log(p: EncodingBoundParams) -> float:
    """Natural log of the linkage-count bound; safe at any parameter size."""
    k, ell, d = p.k, p.ell, p.d
    return (
        math.log(2.0)
        + 2.0 * math.log(k * (ell + 1))
        + 8.0 * k * math.log(ell + 1)
        + 2.0 * k * math.log(2.0)
        + (2.0 * k * (ell + 1) + 1) * 0.5 * math.log(d - 1)
    )


def encoding_bound(p: EncodingBoundParams) -> float:
    """The counting bound 2 (k(l+1))^2 (l+1)^{8k} 2^{2k} sqrt(d-1)^{2k(l+1)+1}."""
    if p.d < 2:
        raise InvalidParams("bound needs d >= 2")
    return math.exp(encoding_bound_log(p))


def verify_trace_bound(gadget: Gadget, depth: int, k: int, ell: int) -> dict:
    """Check quadratic_form <= encoding_bound on a truncation of the extension.

    Closed walks of 2k(ell+1) steps starting in the core stay inside the
    truncation once depth >= k(ell+1), so the comparison is exact there. The
    maximum runs over all directed edges leaving core vertices.
    """
    if depth < k * (ell + 1):
        raise InvalidParams(
            f"need depth >= k*(ell+1) = {k * (ell + 1)} to contain every walk"
        )
    trunc = truncate_x(gadget, depth)
    core_n = len(gadget.u_set.members) + len(gadget.v_set.members)
    bound = encoding_bound(EncodingBoundParams(k=k, ell=ell, d=gadget.d))
    edges = [(u, w) for u in range(core_n) for w in trunc.adjacency[u]]
    maxdeg = max(trunc.degree(v) for v in range(trunc.n))
    # entries of the iterated product stay below (maxdeg-1)^(2kl), so int64
    # matvecs are exact whenever that fits; otherwise fall back to bignums
    if (maxdeg - 1) ** (2 * k * ell) < 2**62:
        values = _qf_batch(trunc, edges, k, ell)
    else:
        values = [quadratic_form(trunc, e, k, ell) for e in edges]
    best = max(values)
    best_edge = edges[values.index(best)]
    checked = len(edges)
    return {
        "ok": best <= bound,
        "k": k,
        "ell": ell,
        "depth": depth,
        "bound": bound,
        "max_value": best,
        "argmax_edge": best_edge,
        "edges_checked": checked,
        "ratio": best / bound,
    }
