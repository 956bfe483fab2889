"""Adjacency and nonbacktracking spectra, plus finite truncations of the
pendant-tree extension that the gadget embeds into.

Solvers are numpy/scipy underneath, but every eigenpair that matters is
re-checked against the graph's own adjacency structure: a result only leaves
this module after its residual passes the mode's tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sparse
import scipy.sparse.linalg as sla

from .errors import (
    ConvergenceFailure,
    DomainError,
    InvalidParams,
    SizeExceeded,
)
from .gadget import Gadget
from .graphs import Graph, VertexSet, from_edges, is_biregular

DENSE_ADJ_CAP = 8192
DENSE_NB_CAP = 2000


@dataclass(frozen=True)
class DirectedEdgeSpace:
    """Index space for ordered edge pairs: undirected edge j becomes 2j and 2j+1."""

    graph: Graph
    tails: tuple[int, ...]
    heads: tuple[int, ...]
    index: dict

    @classmethod
    def build(cls, g: Graph) -> "DirectedEdgeSpace":
        tails: list[int] = []
        heads: list[int] = []
        index: dict[tuple[int, int], int] = {}
        for u, v in g.edges():
            index[(u, v)] = len(tails)
            tails.append(u)
            heads.append(v)
            index[(v, u)] = len(tails)
            tails.append(v)
            heads.append(u)
        return cls(graph=g, tails=tuple(tails), heads=tuple(heads), index=index)

    @property
    def size(self) -> int:
        return len(self.tails)

    def of(self, u: int, v: int) -> int:
        return self.index[(u, v)]

    def reverse(self, idx: int) -> int:
        return idx ^ 1


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalue summary. For adjacency reports lam = max(lam_2, -lam_n);
    for nonbacktracking reports lam is the spectral radius."""

    eigenvalues: tuple
    lam: float
    method: str
    residual: float


def adjacency_dense(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    for u, nbrs in enumerate(g.adjacency):
        for v in nbrs:
            a[u, v] = 1.0
    return a


def adjacency_sparse(g: Graph) -> sparse.csr_matrix:
    rows = []
    cols = []
    for u, nbrs in enumerate(g.adjacency):
        rows.extend([u] * len(nbrs))
        cols.extend(nbrs)
    data = np.ones(len(rows))
    return sparse.csr_matrix((data, (rows, cols)), shape=(g.n, g.n))


def _pair_residual(a, vals, vecs, picks) -> float:
    worst = 0.0
    for i in picks:
        v = vecs[:, i]
        r = np.linalg.norm(a @ v - vals[i] * v)
        worst = max(worst, float(r))
    return worst


def adjacency_spectrum(
    g: Graph,
    mode: str = "dense",
    cap: int = DENSE_ADJ_CAP,
    deflate_ones: bool = False,
) -> SpectrumReport:
    """Adjacency eigenvalues with residual-checked output.

    dense: full symmetric eigendecomposition, sampled eigenpair residuals must
    stay below 1e-9 times the max degree. extremal: Lanczos for the top three
    and bottom one eigenvalues at 1e-7 relative residual; with deflate_ones the
    all-ones direction of a regular graph is projected out first so the second
    eigenvalue becomes the dominant one.
    """
    if g.n == 0:
        raise InvalidParams("empty graph has no spectrum")
    scale = max(max((g.degree(v) for v in range(g.n)), default=1), 1)
    if mode == "dense":
        if g.n > cap:
            raise SizeExceeded(f"dense adjacency solve capped at {cap}, got {g.n}")
        a = adjacency_dense(g)
        vals, vecs = np.linalg.eigh(a)
        picks = sorted({0, 1 % g.n, g.n // 2, g.n - 1})
        residual = _pair_residual(a, vals, vecs, picks)
        if residual > 1e-9 * scale:
            raise ConvergenceFailure(
                f"dense eigensolve residual {residual:.3e} above 1e-9 * {scale}"
            )
        lam = float(max(vals[-2], -vals[0])) if g.n >= 2 else float(vals[0])
        return SpectrumReport(
            eigenvalues=tuple(float(v) for v in vals),
            lam=lam,
            method="dense",
            residual=residual,
        )
    if mode != "extremal":
        raise InvalidParams(f"unknown adjacency mode {mode!r}")
    if g.n <= 64:
        rep = adjacency_spectrum(g, mode="dense", cap=cap)
        vals = rep.eigenvalues
        keep = (vals[0], vals[-2], vals[-1]) if g.n >= 2 else vals
        return SpectrumReport(
            eigenvalues=keep, lam=rep.lam, method="dense", residual=rep.residual
        )
    a = adjacency_sparse(g)
    tol = 1e-7 * scale
    try:
        if deflate_ones:
            d = g.regular_degree()
            if d is None:
                raise InvalidParams("deflate_ones needs a regular graph")
            ones = np.ones(g.n) / math.sqrt(g.n)

            def apply(x):
                return a @ x - d * ones * (ones @ x)

            op = sla.LinearOperator((g.n, g.n), matvec=apply, dtype=float)
            top_vals, top_vecs = sla.eigsh(op, k=2, which="LA")
            lam2 = float(top_vals[-1])
            lam1 = float(d)
            res_top = float(
                np.linalg.norm(apply(top_vecs[:, -1]) - top_vals[-1] * top_vecs[:, -1])
            )
        else:
            top_vals, top_vecs = sla.eigsh(a, k=3, which="LA")
            lam1 = float(top_vals[-1])
            lam2 = float(top_vals[-2])
            res_top = _pair_residual(a, top_vals, top_vecs, [len(top_vals) - 1, len(top_vals) - 2])
        bot_vals, bot_vecs = sla.eigsh(a, k=1, which="SA")
        lam_min = float(bot_vals[0])
        res_bot = _pair_residual(a, bot_vals, bot_vecs, [0])
    except sla.ArpackNoConvergence as exc:
        raise ConvergenceFailure(
            f"Lanczos failed to converge: {exc}"
        ) from exc
    residual = max(res_top, res_bot)
    if residual > tol:
        raise ConvergenceFailure(
            f"extremal residual {residual:.3e} above {tol:.3e}"
        )
    return SpectrumReport(
        eigenvalues=(lam_min, lam2, lam1),
        lam=max(lam2, -lam_min),
        method="iterative",
        residual=residual,
    )


def nonbacktracking_matrix(g: Graph) -> tuple[sparse.csr_matrix, DirectedEdgeSpace]:
    """The 0/1 operator sending directed edge (u, v) to each (v, w) with w != u."""
    space = DirectedEdgeSpace.build(g)
    rows = []
    cols = []
    for e in range(space.size):
        u = space.tails[e]
        v = space.heads[e]
        for w in g.adjacency[v]:
            if w != u:
                rows.append(e)
                cols.append(space.of(v, w))
    data = np.ones(len(rows))
    mat = sparse.csr_matrix((data, (rows, cols)), shape=(space.size, space.size))
    return mat, space


def _nb_radius_power(
    mat: sparse.csr_matrix, seed: int = 0, rel_tol: float = 1e-6, max_len: int = 2**13
) -> tuple[float, float]:
    """Spectral radius by norm-ratio power iteration with doubling checkpoints.

    Estimates (|B^(2L) x| / |B^L x|)^(1/L) at L = 8, 16, 32, ... and stops when
    two consecutive estimates agree to rel_tol. The ratio form converges
    geometrically when the dominant eigenvalue is simple in modulus; a zero
    norm along the way certifies nilpotency and returns 0.
    """
    size = mat.shape[0]
    if size == 0:
        return 0.0, 0.0
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(size)
    x /= np.linalg.norm(x)
    log_norm = 0.0
    marks: dict[int, float] = {0: 0.0}
    step = 0
    checkpoint = 8
    prev_est = None
    while step < max_len:
        x = mat @ x
        nrm = float(np.linalg.norm(x))
        if nrm == 0.0:
            return 0.0, 0.0
        log_norm += math.log(nrm)
        x /= nrm
        step += 1
        if step == 2 * checkpoint and checkpoint in marks:
            est = math.exp((log_norm - marks[checkpoint]) / checkpoint)
            if prev_est is not None:
                delta = abs(est - prev_est)
                if delta <= rel_tol * max(est, 1e-12):
                    return est, delta
            prev_est = est
            checkpoint *= 2
        marks[step] = log_norm
    raise ConvergenceFailure(
        f"radius estimate did not stabilize within {max_len} applications"
    )


def nb_spectrum(
    g: Graph, mode: str = "dense", cap: int = DENSE_NB_CAP, seed: int = 0
) -> SpectrumReport:
    """Nonbacktracking spectrum: full complex eigenvalues or radius only."""
    mat, space = nonbacktracking_matrix(g)
    if mode == "dense":
        if space.size > cap:
            raise SizeExceeded(
                f"dense nonbacktracking solve capped at {cap}, got {space.size}"
            )
        if space.size == 0:
            return SpectrumReport(eigenvalues=(), lam=0.0, method="dense", residual=0.0)
        dense = mat.toarray()
        vals, vecs = np.linalg.eig(dense)
        order = np.lexsort((vals.imag, vals.real))
        vals = vals[order]
        vecs = vecs[:, order]
        picks = sorted({0, len(vals) // 2, len(vals) - 1})
        worst = 0.0
        for i in picks:
            r = np.linalg.norm(dense @ vecs[:, i] - vals[i] * vecs[:, i])
            worst = max(worst, float(r))
        scale = max(float(np.max(np.abs(vals))), 1.0)
        if worst > 1e-6 * scale:
            raise ConvergenceFailure(
                f"nonsymmetric eigensolve residual {worst:.3e} above 1e-6 * {scale}"
            )
        return SpectrumReport(
            eigenvalues=tuple(complex(v) for v in vals),
            lam=float(np.max(np.abs(vals))),
            method="dense",
            residual=worst,
        )
    if mode != "radius_only":
        raise InvalidParams(f"unknown nonbacktracking mode {mode!r}")
    radius, delta = _nb_radius_power(mat, seed=seed)
    return SpectrumReport(
        eigenvalues=(), lam=radius, method="iterative", residual=delta
    )


def ihara_bass_check(g: Graph, tol: float = 1e-6, cap: int = DENSE_NB_CAP):
    """Compare the nonbacktracking spectrum against its adjacency factorization.

    For a d-regular graph the multiset must be +-1 with multiplicity m - n each
    plus, for every adjacency eigenvalue mu, the two roots of
    x^2 - mu x + (d - 1). Greedy nearest matching absorbs solver reordering of
    conjugate pairs; the check passes when the worst pairing distance is
    within tol.
    """
    d = g.regular_degree()
    if d is None:
        raise InvalidParams("factorization check implemented for regular graphs")
    m = g.m
    if 2 * m > cap:
        raise SizeExceeded(f"needs dense nonbacktracking spectrum, 2m = {2 * m} > {cap}")
    nb = nb_spectrum(g, mode="dense", cap=cap)
    adj = adjacency_spectrum(g, mode="dense")
    theory: list[complex] = []
    for mu in adj.eigenvalues:
        disc = complex(mu * mu - 4 * (d - 1))
        root = np.sqrt(disc)
        theory.append((mu + root) / 2)
        theory.append((mu - root) / 2)
    theory.extend([1.0 + 0.0j] * (m - g.n))
    theory.extend([-1.0 + 0.0j] * (m - g.n))
    computed = list(nb.eigenvalues)
    if len(theory) != len(computed):
        return False, {
            "ok": False,
            "reason": "cardinality mismatch",
            "theory": len(theory),
            "computed": len(computed),
        }
    remaining = computed[:]
    worst = 0.0
    for t in theory:
        best_i = min(range(len(remaining)), key=lambda i: abs(remaining[i] - t))
        worst = max(worst, abs(remaining.pop(best_i) - t))
    ok = worst <= tol
    report = {
        "ok": ok,
        "max_match_distance": float(worst),
        "tol": tol,
        "pairs": len(theory),
        "multiplicity_pm1": m - g.n,
    }
    return ok, report


def corollary_nb_to_adj(mu: float, d: int) -> float:
    """Largest adjacency eigenvalue compatible with nonbacktracking radius data:
    (mu + sqrt(mu^2 - 4(d-1))) / 2, valid above the 2 sqrt(d-1) threshold."""
    if mu * mu <= 4 * (d - 1):
        raise DomainError(
            f"mu^2 = {mu * mu:.6g} must exceed 4(d-1) = {4 * (d - 1)}"
        )
    lam = (mu + math.sqrt(mu * mu - 4 * (d - 1))) / 2
    if not lam > math.sqrt(d - 1):
        raise DomainError("mapping applies to the dominant positive eigenvalue")
    return lam


def _resolve_sides(obj, u_set, v_set, d):
    if isinstance(obj, Gadget):
        nh = len(obj.u_set.members) + len(obj.v_set.members)
        edges = [
            (u, v)
            for u, v in obj.graph.edges()
            if u < nh and v < nh
        ]
        h = from_edges(nh, edges)
        return h, obj.u_set, obj.v_set, obj.d
    if u_set is None or v_set is None or d is None:
        raise InvalidParams("plain graph input needs u_set, v_set, and d")
    return obj, u_set, v_set, d


def truncate_x(
    obj,
    depth: int,
    u_set: VertexSet | None = None,
    v_set: VertexSet | None = None,
    d: int | None = None,
) -> Graph:
    """Finite piece of the tree extension: the biregular core plus pendant trees.

    Depth 0 is the core itself. Level 1 hangs one child off each degree-(d-1)
    side vertex and d-2 children off each degree-2 side vertex, lifting the
    core to degree d; every later level branches d-1 ways, so all internal
    vertices of the result have degree d. Any truncation is an induced subgraph
    of the infinite extension, which is what makes its spectral bounds exact.
    """
    if depth < 0:
        raise InvalidParams("depth must be nonnegative")
    h, us, vs, dd = _resolve_sides(obj, u_set, v_set, d)
    if not is_biregular(h, us, vs, dd - 1, 2):
        raise InvalidParams("core must be (d-1, 2)-biregular on (u_set, v_set)")
    edges = list(h.edges())
    nxt = h.n
    frontier: list[int] = []
    if depth >= 1:
        for u in us.members:
            edges.append((u, nxt))
            frontier.append(nxt)
            nxt += 1
        for v in vs.members:
            for _ in range(dd - 2):
                edges.append((v, nxt))
                frontier.append(nxt)
                nxt += 1
    for _ in range(2, depth + 1):
        new_frontier: list[int] = []
        for x in frontier:
            for _ in range(dd - 1):
                edges.append((x, nxt))
                new_frontier.append(nxt)
                nxt += 1
        frontier = new_frontier
    return from_edges(nxt, edges)


def verify_x_radius(
    gadget: Gadget, depth: int, tol: float = 1e-9
) -> tuple[bool, float]:
    """Measure the truncation's top adjacency eigenvalue against 2 sqrt(d-1).

    Subgraph monotonicity makes the bound exact for every depth, so a violation
    beyond tolerance falsifies the construction rather than the asymptotics.
    """
    trunc = truncate_x(gadget, depth)
    mode = "dense" if trunc.n <= DENSE_ADJ_CAP else "extremal"
    rep = adjacency_spectrum(trunc, mode=mode)
    lam_max = float(rep.eigenvalues[-1])
    bound = 2 * math.sqrt(gadget.d - 1)
    return lam_max <= bound + tol, lam_max
