"""Gadget pipeline: high-girth core, subdivision, pendants, spaced matching, splice.

The chain runs small-to-large. A (d-1)-regular core on gamma vertices is pushed
to high girth by edge switching, subdividing it doubles the girth and yields a
(2, d-1)-biregular graph on sides (U, V), pendants lift U and V to degree d
while planting vertex expansion (d+1)/2 on U, and the splice transplants the
whole gadget into a d-regular host by deleting a well-spaced matching and
rewiring its endpoints onto the pendant vertices.
"""

from __future__ import annotations

import dataclasses
import math
import random
from collections import deque
from dataclasses import dataclass, field

from .errors import (
    DegreeViolation,
    HostTooSmall,
    InfeasibleTarget,
    InvalidParams,
    NonIntegral,
)
from .graphs import INFINITE, Graph, VertexSet, bfs_distances, from_edges, girth
from .hosts import random_regular


@dataclass(frozen=True)
class Gadget:
    """The planted graph on U + V + Q + R, d-regular on U and V, pendant on Q and R."""

    graph: Graph
    u_set: VertexSet
    v_set: VertexSet
    q_set: VertexSet
    r_set: VertexSet
    gamma: int
    d: int
    girth_h: float


@dataclass(frozen=True)
class Splice:
    """A host with the gadget spliced in over a deleted matching."""

    graph: Graph
    planted_u: VertexSet
    matching: tuple[tuple[int, int], ...]
    attachment: dict[int, tuple[int, ...]] = field(compare=False)
    host_n: int = 0
    min_matching_distance: float = 0
    meta: dict = field(default_factory=dict, compare=False)
    gadget: "Gadget | None" = field(default=None, compare=False)


def core_girth_target(gamma: int, d: int) -> int:
    """Core girth the pipeline aims for: log-scale when the Moore bound allows it."""
    target = max(3, _ceil_log(gamma, d - 1))
    while target > 3 and moore_vertices(d - 1, target) > gamma:
        target -= 1
    return target


def moore_vertices(degree: int, girth_target: int) -> int:
    """Minimum vertex count a simple degree-regular graph of that girth can have."""
    if degree < 3:
        raise InvalidParams("Moore bound needs degree >= 3")
    if girth_target < 3:
        return degree + 1
    if girth_target % 2:
        r = (girth_target - 1) // 2
        return 1 + degree * ((degree - 1) ** r - 1) // (degree - 2)
    return 2 * ((degree - 1) ** (girth_target // 2) - 1) // (degree - 2)


def _compact_cycle(seq: list[int]) -> list[int]:
    # Cut a repeated vertex out of a closed walk until the walk is simple.
    while True:
        first: dict[int, int] = {}
        cut = None
        for pos, v in enumerate(seq):
            if v in first:
                cut = (first[v], pos)
                break
            first[v] = pos
        if cut is None:
            return seq
        seq = seq[cut[0] : cut[1]]


def _shortest_cycle(adj: list[set[int]], n: int) -> tuple[float, list[int] | None]:
    """Girth of the working graph plus one witness cycle as a vertex list."""
    best = INFINITE
    witness: list[int] | None = None
    dist = [0] * n
    parent = [-1] * n
    stamp = [-1] * n
    for root in range(n):
        if best == 3:
            break
        stamp[root] = root
        dist[root] = 0
        parent[root] = -1
        queue = deque([root])
        while queue:
            x = queue.popleft()
            dx = dist[x]
            if 2 * dx + 1 >= best:
                break
            for w in adj[x]:
                if stamp[w] != root:
                    stamp[w] = root
                    dist[w] = dx + 1
                    parent[w] = x
                    queue.append(w)
                elif parent[x] != w:
                    c = dx + dist[w] + 1
                    if c < best:
                        up_x = []
                        v = x
                        while v != -1:
                            up_x.append(v)
                            v = parent[v]
                        up_w = []
                        v = w
                        while v != -1:
                            up_w.append(v)
                            v = parent[v]
                        cyc = _compact_cycle(list(reversed(up_x)) + up_w[:-1])
                        if len(cyc) >= 3:
                            best = len(cyc)
                            witness = cyc
    return best, witness


def _capped_distance(adj: list[set[int]], s: int, t: int, cap: int) -> float:
    # BFS distance from s to t, INFINITE once it would exceed cap.
    if s == t:
        return 0
    seen = {s}
    frontier = [s]
    depth = 0
    while frontier and depth < cap:
        depth += 1
        nxt = []
        for x in frontier:
            for w in adj[x]:
                if w in seen:
                    continue
                if w == t:
                    return depth
                seen.add(w)
                nxt.append(w)
        frontier = nxt
    return INFINITE


def _try_switch(
    adj: list[set[int]],
    cycle: list[int],
    girth_target: int,
    rng: random.Random,
) -> bool:
    """One 2-opt move that breaks the witness cycle without creating short ones.

    Removes a cycle edge (a, b) and a disjoint partner edge, reconnects the four
    endpoints the crossed way, and accepts only if every cycle through either
    new edge has length >= girth_target. Scans are exhaustive over shuffled
    candidates, so a False return means no single switch can make progress.
    """
    k = len(cycle)
    cycle_edges = [(cycle[i], cycle[(i + 1) % k]) for i in range(k)]
    rng.shuffle(cycle_edges)
    all_edges = [(u, v) for u in range(len(adj)) for v in adj[u] if u < v]
    for a, b in cycle_edges:
        partners = [e for e in all_edges if a not in e and b not in e]
        rng.shuffle(partners)
        for c, dd in partners:
            pairings = [(c, dd), (dd, c)]
            rng.shuffle(pairings)
            for x, y in pairings:
                if x in adj[a] or y in adj[b]:
                    continue
                adj[a].discard(b)
                adj[b].discard(a)
                adj[x].discard(y)
                adj[y].discard(x)
                adj[a].add(x)
                adj[x].add(a)
                adj[b].add(y)
                adj[y].add(b)
                # a new edge sits on a cycle shorter than the target iff its
                # endpoints stay within girth_target - 2 of each other without it
                adj[a].discard(x)
                adj[x].discard(a)
                d_ax = _capped_distance(adj, a, x, girth_target - 2)
                adj[a].add(x)
                adj[x].add(a)
                adj[b].discard(y)
                adj[y].discard(b)
                d_by = _capped_distance(adj, b, y, girth_target - 2)
                adj[b].add(y)
                adj[y].add(b)
                if d_ax == INFINITE and d_by == INFINITE:
                    return True
                adj[a].discard(x)
                adj[x].discard(a)
                adj[b].discard(y)
                adj[y].discard(b)
                adj[a].add(b)
                adj[b].add(a)
                adj[x].add(y)
                adj[y].add(x)
    return False


def high_girth_regular(
    gamma: int,
    degree: int,
    girth_target: int,
    seed: int,
    max_restarts: int = 12,
    max_steps: int | None = None,
) -> Graph:
    """A degree-regular graph on gamma vertices pushed toward the girth target.

    Random regular samples are improved by switching an edge off a shortest
    cycle against a random partner edge, accepting only switches whose new
    edges lie on no cycle shorter than the target. Each accepted switch kills
    at least one shortest cycle and creates none below target, so girth ratchets
    up; when no switch helps, a fresh sample restarts the climb. Returns the
    best graph seen; callers measure its girth rather than trusting the target.
    """
    if gamma <= 0 or gamma % 2:
        raise InvalidParams("gamma must be a positive even integer")
    if degree < 3:
        raise InvalidParams("degree must be at least 3")
    if degree >= gamma:
        raise InvalidParams("degree must be below gamma for a simple graph")
    if girth_target >= 3 and moore_vertices(degree, girth_target) > gamma:
        raise InfeasibleTarget(
            f"no {degree}-regular graph on {gamma} vertices has girth "
            f">= {girth_target}"
        )
    target = max(girth_target, 3)
    budget = max_steps if max_steps is not None else 40 + 4 * gamma
    rng = random.Random(seed)
    best_graph: Graph | None = None
    best_girth: float = 0
    for _ in range(max_restarts):
        sample = random_regular(gamma, degree, seed=rng.randrange(2**31))
        adj = [set(nbrs) for nbrs in sample.adjacency]
        for _ in range(budget):
            glen, cyc = _shortest_cycle(adj, gamma)
            if glen > best_girth:
                best_girth = glen
                best_graph = from_edges(
                    gamma, [(u, v) for u in range(gamma) for v in adj[u] if u < v]
                )
            if glen >= target or cyc is None:
                break
            if not _try_switch(adj, cyc, target, rng):
                break
        if best_girth >= target:
            break
    assert best_graph is not None
    return best_graph


def subdivide(g: Graph) -> tuple[Graph, VertexSet, VertexSet]:
    """Replace every edge by a path of length two.

    Original vertices become the U side (degree unchanged), edge-vertices the
    V side (degree 2), and the girth exactly doubles.
    """
    deg = g.regular_degree()
    if deg is None or deg < 2:
        raise InvalidParams("subdivision expects a regular graph of degree >= 2")
    edges = list(g.edges())
    out = []
    for i, (u, v) in enumerate(edges):
        mid = g.n + i
        out.append((u, mid))
        out.append((v, mid))
    h = from_edges(g.n + len(edges), out)
    u_set = VertexSet.from_iterable(range(g.n), h.n)
    v_set = VertexSet.from_iterable(range(g.n, h.n), h.n)
    return h, u_set, v_set


def attach_pendants(h: Graph, u_set: VertexSet, v_set: VertexSet, d: int) -> Gadget:
    """Hang one pendant off each U vertex and d-2 pendants off each V vertex.

    U and V vertices land on degree d; the pendants Q and R stay at degree 1.
    The neighborhood of U inside the result is exactly V + Q, which pins the
    vertex expansion of U at (d+1)/2.
    """
    if d < 3:
        raise InvalidParams("pendant attachment needs d >= 3")
    from .graphs import is_biregular

    if not is_biregular(h, u_set, v_set, d - 1, 2):
        raise InvalidParams("expected a (d-1, 2)-biregular graph on (u_set, v_set)")
    gamma = len(u_set.members)
    girth_h = girth(h)
    edges = list(h.edges())
    nxt = h.n
    q_vertices = []
    for u in u_set.members:
        edges.append((u, nxt))
        q_vertices.append(nxt)
        nxt += 1
    r_vertices = []
    for v in v_set.members:
        for _ in range(d - 2):
            edges.append((v, nxt))
            r_vertices.append(nxt)
            nxt += 1
    graph = from_edges(nxt, edges)
    for u in u_set.members:
        if graph.degree(u) != d:
            raise DegreeViolation(f"U vertex {u} has degree {graph.degree(u)} != {d}")
    for v in v_set.members:
        if graph.degree(v) != d:
            raise DegreeViolation(f"V vertex {v} has degree {graph.degree(v)} != {d}")
    return Gadget(
        graph=graph,
        u_set=u_set,
        v_set=v_set,
        q_set=VertexSet.from_iterable(q_vertices, nxt),
        r_set=VertexSet.from_iterable(r_vertices, nxt),
        gamma=gamma,
        d=d,
        girth_h=girth_h,
    )


def matching_size_k(gamma: int, d: int) -> int:
    """Number of host edges the splice consumes: gamma(d-1)(2+(d-1)(d-2))/4."""
    num = gamma * (d - 1) * (2 + (d - 1) * (d - 2))
    if num % 4:
        raise NonIntegral(f"matching size {num}/4 is not an integer")
    return num // 4


def _matching_distance(g: Graph, matching: list[tuple[int, int]]) -> float:
    """Exact minimum endpoint distance between distinct matching edges."""
    if len(matching) < 2:
        return INFINITE
    best = INFINITE
    for i, edge in enumerate(matching):
        dist = bfs_distances(g, list(edge), cutoff=best)
        for j, other in enumerate(matching):
            if j == i:
                continue
            for t in other:
                dt = dist.get(t)
                if dt is not None and dt < best:
                    best = dt
    return best


def spaced_matching(
    g: Graph, k: int, seed: int
) -> tuple[list[tuple[int, int]], float]:
    """Greedy matching of k edges pairwise far apart in a regular host.

    The spacing radius r starts at the largest value with 4k(d-1)^r <= n and is
    relaxed one step at a time if the greedy scan cannot place all k edges.
    Chosen edges block every vertex within r-1 of their endpoints, so each new
    edge sits at distance >= r from all previous ones. Returns the matching and
    its exact achieved minimum distance.
    """
    d = g.regular_degree()
    if d is None:
        raise InvalidParams("spaced matching expects a regular host")
    if k < 1:
        raise InvalidParams("k must be positive")
    n = g.n
    if 4 * k > n:
        raise HostTooSmall(f"4k = {4 * k} exceeds n = {n}")
    if d <= 2:
        r_init = n
    else:
        r_init = 0
        while 4 * k * (d - 1) ** (r_init + 1) <= n:
            r_init += 1
    edges = list(g.edges())
    rng = random.Random(seed)
    rng.shuffle(edges)
    blocked = bytearray(n)
    for r in range(r_init, -1, -1):
        for i in range(n):
            blocked[i] = 0
        chosen: list[tuple[int, int]] = []
        radius = max(r - 1, 0)
        for u, v in edges:
            if blocked[u] or blocked[v]:
                continue
            chosen.append((u, v))
            if len(chosen) == k:
                break
            for w in bfs_distances(g, [u, v], cutoff=radius):
                blocked[w] = 1
        if len(chosen) == k:
            return chosen, _matching_distance(g, chosen)
    raise HostTooSmall(
        f"could not place {k} disjoint edges even with zero spacing"
    )


def splice(
    host: Graph,
    gadget: Gadget,
    matching: list[tuple[int, int]],
    seed: int,
) -> Splice:
    """Delete the matching and wire its endpoints onto the gadget pendants.

    Every pendant vertex receives d-1 former matching endpoints and every
    endpoint is used exactly once, so the result is d-regular. The assignment
    is a seeded uniform deal of the shuffled endpoint list.
    """
    d = gadget.d
    if host.regular_degree() != d:
        raise InvalidParams("host regularity does not match the gadget degree")
    expected = matching_size_k(gadget.gamma, d)
    if len(matching) != expected:
        raise InvalidParams(
            f"matching has {len(matching)} edges, the splice needs {expected}"
        )
    norm = [(u, v) if u < v else (v, u) for u, v in matching]
    if len(set(norm)) != len(norm):
        raise InvalidParams("matching repeats an edge")
    touched = [w for e in norm for w in e]
    if len(set(touched)) != 2 * len(norm):
        raise InvalidParams("matching edges share endpoints")
    for u, v in norm:
        if not host.has_edge(u, v):
            raise InvalidParams(f"({u}, {v}) is not a host edge")

    n = host.n
    matched = set(norm)
    edges = [e for e in host.edges() if e not in matched]
    edges.extend((u + n, v + n) for u, v in gadget.graph.edges())

    pendants = [q + n for q in gadget.q_set.members]
    pendants.extend(r + n for r in gadget.r_set.members)
    slots = [p for p in pendants for _ in range(d - 1)]
    endpoints = touched[:]
    if len(slots) != len(endpoints):
        raise InvalidParams("pendant slots and matching endpoints disagree")
    rng = random.Random(seed)
    rng.shuffle(endpoints)
    attachment: dict[int, tuple[int, ...]] = {}
    for i, p in enumerate(pendants):
        ends = endpoints[i * (d - 1) : (i + 1) * (d - 1)]
        attachment[p] = tuple(sorted(ends))
        edges.extend((p, e) for e in ends)

    graph = from_edges(n + gadget.graph.n, edges)
    for v in range(graph.n):
        if graph.degree(v) != d:
            raise DegreeViolation(f"vertex {v} has degree {graph.degree(v)} != {d}")
    return Splice(
        graph=graph,
        planted_u=VertexSet.from_iterable(
            (u + n for u in gadget.u_set.members), graph.n
        ),
        matching=tuple(norm),
        attachment=attachment,
        host_n=n,
        min_matching_distance=_matching_distance(host, norm),
    )


def _ceil_log(value: int, base: int) -> int:
    # exact integer ceil(log_base(value)); avoids float fuzz at powers
    if value <= 1:
        return 0
    t = 0
    power = 1
    while power < value:
        power *= base
        t += 1
    return t


def construct_pipeline(d: int, host: Graph, gamma: int, seed: int) -> Splice:
    """End-to-end build: core, subdivision, pendants, matching, splice.

    Stage seeds are derived deterministically from the master seed. The meta
    dict on the returned splice records the measured girths and spacing that
    feed the girth lower bound min(girth of H, matching distance).
    """
    if d < 4:
        raise InvalidParams("pipeline needs d >= 4")
    if host.regular_degree() != d:
        raise InvalidParams("host must be d-regular")
    if gamma % 2 or gamma <= d - 1:
        raise InvalidParams("gamma must be even and exceed d - 1")
    if gamma**3 > host.n:
        raise InvalidParams("gamma must stay at or below host size to the 1/3")

    girth_target = core_girth_target(gamma, d)
    core = high_girth_regular(gamma, d - 1, girth_target, seed=seed * 1000003 + 1)
    core_girth = girth(core)
    h, u_set, v_set = subdivide(core)
    gadget = attach_pendants(h, u_set, v_set, d)
    k = matching_size_k(gamma, d)
    matching, achieved = spaced_matching(host, k, seed=seed * 1000003 + 2)
    sp = splice(host, gadget, matching, seed=seed * 1000003 + 3)
    meta = {
        "gamma": gamma,
        "k": k,
        "girth_target_core": girth_target,
        "girth_core": core_girth,
        "girth_h": gadget.girth_h,
        "matching_distance": achieved,
        "girth_lower_bound": min(gadget.girth_h, achieved),
    }
    return dataclasses.replace(sp, meta=meta, gadget=gadget)
