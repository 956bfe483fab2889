"""Exponentially decaying test vector around the planted core, and the
layer-dispersion machinery used to audit eigenvector mass near it.

The vector lives on distance layers around X_0 = U union V inside the spliced
graph. Layer h splits into a U branch (descendants of the per-U pendants) and
a V branch (descendants of the per-V pendants); each branch carries its own
decay formula and the two branches share every structural property the
dispersion lemma needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GirthTooSmall, InvalidParams, PreconditionViolated
from .gadget import Splice
from .graphs import Graph, VertexSet, bfs_distances


@dataclass(frozen=True)
class LayerDecomposition:
    """Vertices grouped by distance from a root set; index h holds layer X_h."""

    layers: tuple

    @property
    def depth(self) -> int:
        return len(self.layers) - 1

    def membership(self) -> dict:
        out: dict[int, int] = {}
        for h, layer in enumerate(self.layers):
            for v in layer:
                out[v] = h
        return out


@dataclass(frozen=True)
class KahaleVector:
    """Test vector values on Ball_{h_max}(X_0), with layer and branch tags."""

    values: dict = field(compare=False)
    decomposition: LayerDecomposition = None
    branch: dict = field(compare=False, default=None)
    d: int = 0
    h_max: int = 0

    @property
    def mu(self) -> float:
        return 2.0 * math.sqrt(self.d - 1)


def _value_at(vec, v: int) -> float:
    if isinstance(vec, KahaleVector):
        vec = vec.values
    if isinstance(vec, dict):
        return float(vec.get(v, 0.0))
    return float(vec[v])


def _split_x0(g: Graph, planted_u, d: int):
    """Recover the degree-2 side of the core from the planted set alone.

    Side vertices sit between exactly two planted vertices; each planted
    vertex additionally owns one pendant child, which is where the U branch
    starts.
    """
    members = planted_u.members if isinstance(planted_u, VertexSet) else planted_u
    u_set = set(members)
    if not u_set:
        raise InvalidParams("splice has an empty planted set")
    counts: dict[int, int] = {}
    for u in u_set:
        for w in g.adjacency[u]:
            if w in u_set:
                raise InvalidParams("planted set must be independent in the spliced graph")
            counts[w] = counts.get(w, 0) + 1
    if any(c > 2 for c in counts.values()):
        raise InvalidParams("a vertex touches the planted set more than twice")
    v_set = {w for w, c in counts.items() if c == 2}
    for u in u_set:
        side = sum(1 for w in g.adjacency[u] if w in v_set)
        if side != d - 1:
            raise InvalidParams(
                f"planted vertex {u} has {side} side neighbors, expected {d - 1}"
            )
    return u_set, v_set


def kahale_vector(splice: Splice, h_max: int) -> KahaleVector:
    """Assign the decaying test vector on Ball_{h_max}(X_0).

    Values: (d-1)^(-h/2) on the U branch; 2/sqrt(d-1) - (d-1)^(-3/2) on the
    degree-2 core side; 2/(d-1) * (d-1)^(-(h-1)/2) on the V branch for h >= 1.
    Layers must be disjoint trees hanging off X_0, which holds exactly when
    h_max <= floor(girth/2); any merge or intra-layer edge raises
    GirthTooSmall with the offending vertices.
    """
    if h_max < 0:
        raise InvalidParams("h_max must be nonnegative")
    g = splice.graph
    d = g.regular_degree()
    if d is None or d < 3:
        raise InvalidParams("spliced graph must be d-regular with d >= 3")
    u_set, v_set = _split_x0(g, splice.planted_u, d)
    c = 1.0 / math.sqrt(d - 1)

    values: dict[int, float] = {}
    branch: dict[int, str] = {}
    member: dict[int, int] = {}
    for u in u_set:
        values[u] = 1.0
        branch[u] = "U"
        member[u] = 0
    for v in v_set:
        values[v] = 2.0 * c - c**3
        branch[v] = "V"
        member[v] = 0
    layers = [tuple(sorted(u_set | v_set))]

    frontier = list(layers[0])
    for h in range(1, h_max + 1):
        parents: dict[int, list] = {}
        for x in frontier:
            for w in g.adjacency[x]:
                if w not in member:
                    parents.setdefault(w, []).append(x)
        for w, ps in parents.items():
            if len(ps) > 1:
                raise GirthTooSmall(
                    f"layer {h} vertex {w} reaches the root set along "
                    f"{len(ps)} distinct branches"
                )
        new_set = set(parents)
        for w in new_set:
            for z in g.adjacency[w]:
                if z in new_set:
                    raise GirthTooSmall(f"layer {h} contains the edge ({w}, {z})")
        for w, ps in parents.items():
            b = branch[ps[0]]
            branch[w] = b
            member[w] = h
            if b == "U":
                values[w] = c**h
            else:
                values[w] = (2.0 / (d - 1)) * c ** (h - 1)
        frontier = sorted(new_set)
        layers.append(tuple(frontier))

    return KahaleVector(
        values=values,
        decomposition=LayerDecomposition(layers=tuple(layers)),
        branch=branch,
        d=d,
        h_max=h_max,
    )


def verify_subsolution(splice: Splice, s: KahaleVector, mu: float, tol: float = 1e-9) -> dict:
    """Check (As)(y) <= mu * s(y) on Ball_{h_max - 1}(X_0) and map the slack.

    The report buckets slack by (branch, layer). For mu = 2 sqrt(d-1) the
    inequality is tight everywhere except the first V-branch layer, where the
    slack equals (d-1)^(-3/2).
    """
    g = splice.graph
    member = s.decomposition.membership()
    atol = tol * max(1.0, abs(mu))
    buckets: dict[str, dict] = {}
    worst = 0.0
    checked = 0
    for y, h in member.items():
        if h > s.h_max - 1:
            continue
        total = 0.0
        for z in g.adjacency[y]:
            if z not in s.values:
                raise InvalidParams(
                    f"vector does not cover the neighborhood of vertex {y}"
                )
            total += s.values[z]
        slack = mu * s.values[y] - total
        key = f"{s.branch[y]}:{h}"
        b = buckets.setdefault(
            key, {"count": 0, "min_slack": math.inf, "max_slack": -math.inf}
        )
        b["count"] += 1
        b["min_slack"] = min(b["min_slack"], slack)
        b["max_slack"] = max(b["max_slack"], slack)
        worst = min(worst, slack)
        checked += 1
    return {
        "ok": worst >= -atol,
        "mu": mu,
        "checked": checked,
        "tol": atol,
        "max_violation": -worst if worst < 0 else 0.0,
        "buckets": buckets,
    }


def layer_mass(vec, layers: LayerDecomposition) -> list:
    """Squared mass per layer, with the total squared norm appended last.

    Pure diagnostic: accepts a dict keyed by vertex or a dense array. The
    total covers the whole vector, so entries outside the decomposition show
    up as the gap between the layer sum and the final element.
    """
    if isinstance(vec, KahaleVector):
        vec = vec.values
    masses = [
        float(sum(_value_at(vec, v) ** 2 for v in layer)) for layer in layers.layers
    ]
    if isinstance(vec, dict):
        total = float(sum(x * x for x in vec.values()))
    else:
        arr = np.asarray(vec, dtype=float)
        total = float(arr @ arr)
    return [*masses, total]


def _constant_or_raise(vals, label: str, condition: str, rel_tol: float) -> float:
    arr = np.asarray(vals, dtype=float)
    mean = float(arr.mean())
    spread = float(arr.max() - arr.min()) if arr.size else 0.0
    if spread > rel_tol * max(1.0, abs(mean)):
        raise PreconditionViolated(
            f"{condition}: {label} is not constant (spread {spread:.3e})"
        )
    return mean


def kahale_lemma_check(
    w: Graph,
    x: VertexSet,
    h: int,
    s,
    mu: float,
    g=None,
    tol: float = 1e-9,
) -> dict:
    """Dispersion-lemma audit on the distance layers of x inside w.

    Verifies the three structural conditions (constant valencies between the
    top two layers, constant s-ratio across their edges, s nonnegative with
    As <= mu s on the inner ball), extracts the layer constants alpha, beta,
    gamma, assembles the comparison matrix B and certifies positive
    semidefiniteness. When g is supplied and is eigenvector-like at modulus
    mu on the inner ball, the mass-dispersion inequality between layers h-1
    and h is evaluated as well.

    The quadratic term of B uses the projector onto Ball_{h-1}, matching the
    derivation rather than the display; the report records that choice.
    """
    if h < 1:
        raise InvalidParams("h must be at least 1")
    dist = bfs_distances(w, x.members, cutoff=h)
    layers: list[list] = [[] for _ in range(h + 1)]
    for v, dv in dist.items():
        if dv <= h:
            layers[dv].append(v)
    if not layers[h] or not layers[h - 1]:
        raise InvalidParams(f"ball around the root set has no vertices at depth {h}")
    ball = sorted(v for layer in layers for v in layer)
    index = {v: i for i, v in enumerate(ball)}
    nb = len(ball)
    s_arr = np.array([_value_at(s, v) for v in ball])

    # condition (1): valencies between the two top layers
    for i in (h - 1, h):
        for j in (h - 1, h):
            seen = {
                sum(1 for z in w.adjacency[v] if dist.get(z, -1) == j)
                for v in layers[i]
            }
            if len(seen) > 1:
                raise PreconditionViolated(
                    f"condition (1): nodes of layer {i} have {sorted(seen)} "
                    f"neighbors in layer {j}"
                )

    # condition (2): constant s-ratio across layer h-1 to layer h edges
    ratios = []
    for u in layers[h - 1]:
        su = _value_at(s, u)
        for z in w.adjacency[u]:
            if dist.get(z, -1) == h:
                sz = _value_at(s, z)
                if abs(sz) < 1e-300:
                    raise PreconditionViolated(
                        "condition (2): s vanishes on a layer-h endpoint"
                    )
                ratios.append(su / sz)
    if ratios:
        _constant_or_raise(ratios, "the edge ratio s(u)/s(v)", "condition (2)", tol)

    # condition (3): nonnegativity plus the subsolution inequality inside
    if not mu > 0:
        raise PreconditionViolated("condition (3): mu must be positive")
    if float(s_arr.min()) < -tol:
        raise PreconditionViolated("condition (3): s takes a negative value")
    scale3 = tol * max(1.0, mu) * max(1.0, float(np.abs(s_arr).max()))
    for i_layer in range(h):
        for u in layers[i_layer]:
            total = sum(_value_at(s, z) for z in w.adjacency[u])
            if total > mu * _value_at(s, u) + scale3:
                raise PreconditionViolated(
                    f"condition (3): (As)({u}) = {total:.6g} exceeds "
                    f"mu*s = {mu * _value_at(s, u):.6g}"
                )

    a_mat = np.zeros((nb, nb))
    for v in ball:
        for z in w.adjacency[v]:
            if z in index:
                a_mat[index[v], index[z]] = 1.0
    mask_h = np.zeros(nb, dtype=bool)
    for v in layers[h]:
        mask_h[index[v]] = True
    mask_hm1 = np.zeros(nb, dtype=bool)
    for v in layers[h - 1]:
        mask_hm1[index[v]] = True
    mask_inner = ~mask_h

    top = s_arr[mask_h]
    below = s_arr[mask_hm1]
    if np.any(np.abs(top) < 1e-300) or np.any(np.abs(below) < 1e-300):
        raise PreconditionViolated(
            "condition (2): s must be nonvanishing on the top two layers"
        )
    ahs = a_mat @ s_arr
    gamma = _constant_or_raise(
        ahs[mask_h] / top, "(A_h s) / s on layer h", "conditions (1)-(2)", 1e-8
    )
    ahps = a_mat @ np.where(mask_h, s_arr, 0.0)
    alpha = _constant_or_raise(
        ahps[mask_h] / top, "the layer-h return constant", "conditions (1)-(2)", 1e-8
    )
    beta = _constant_or_raise(
        ahps[mask_hm1] / below, "the downward constant", "conditions (1)-(2)", 1e-8
    )

    b_mat = (
        mu**2 * np.diag(mask_inner.astype(float))
        + mu * (gamma - alpha) * np.diag(mask_h.astype(float))
        - mu * beta * np.diag(mask_hm1.astype(float))
        - a_mat @ np.diag(mask_inner.astype(float)) @ a_mat
    )
    b_eigs = np.linalg.eigvalsh(b_mat)
    b_min = float(b_eigs[0])
    b_norm = float(np.max(np.abs(b_eigs)))
    psd_ok = b_min >= -1e-9 * max(b_norm, 1.0)

    conclusion = {"checked": False, "holds": None, "lhs": None, "rhs": None}
    if g is not None:
        g_arr = np.array([_value_at(g, v) for v in ball])
        ahg = a_mat @ g_arr
        g_scale = 1e-6 * max(1.0, mu) * max(1.0, float(np.abs(g_arr).max()))
        eigenlike = all(
            abs(abs(ahg[i]) - mu * abs(g_arr[i])) <= g_scale
            for i in range(nb)
            if mask_inner[i]
        )
        if eigenlike:
            den_h = float(top @ top)
            den_hm1 = float(below @ below)
            num_h = float(g_arr[mask_h] @ g_arr[mask_h])
            num_hm1 = float(g_arr[mask_hm1] @ g_arr[mask_hm1])
            lhs = num_h / den_h
            rhs = num_hm1 / den_hm1
            conclusion = {
                "checked": True,
                "holds": lhs >= rhs - 1e-9 * max(1.0, abs(rhs)),
                "lhs": lhs,
                "rhs": rhs,
            }

    ok = psd_ok and (conclusion["holds"] is not False)
    return {
        "ok": ok,
        "alpha": alpha,
        "beta": beta,
        "gamma": gamma,
        "b_min_eig": b_min,
        "b_norm": b_norm,
        "b_psd": psd_ok,
        "a_term_projector": "P_{<=h-1}",
        "layer_sizes": [len(layer) for layer in layers],
        "conclusion": conclusion,
    }
