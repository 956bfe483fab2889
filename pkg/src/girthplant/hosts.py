"""Host graph generators: random regular graphs and LPS Ramanujan Cayley graphs.

The LPS family X^{p,q} is built from the p+1 integer quaternions of norm p with
odd positive first coordinate, mapped to 2x2 matrices over F_q and read as a
Cayley graph of PSL_2(F_q) or PGL_2(F_q) depending on the Legendre symbol
(p|q). Everything is plain modular arithmetic on canonical projective
representatives, so no computer-algebra dependency is needed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterator

from .errors import InvalidParams, RetryExhausted
from .graphs import Graph, from_edges


@dataclass(frozen=True)
class HostSpec:
    """Declarative description of a host graph, used by experiment configs."""

    kind: str  # "random" or "lps"
    params: dict = field(default_factory=dict)

    def build(self) -> Graph:
        if self.kind == "random":
            return random_regular(
                int(self.params["n"]), int(self.params["d"]), int(self.params["seed"])
            )
        if self.kind == "lps":
            return lps_graph(int(self.params["p"]), int(self.params["q"]))
        raise InvalidParams(f"unknown host kind {self.kind!r}")

    def degree(self) -> int:
        if self.kind == "random":
            return int(self.params["d"])
        if self.kind == "lps":
            return int(self.params["p"]) + 1
        raise InvalidParams(f"unknown host kind {self.kind!r}")


def random_regular(n: int, d: int, seed: int, max_rounds: int = 400) -> Graph:
    """Sample a d-regular simple graph via the pairing model, deterministic per seed.

    Stubs are shuffled and paired; pairs that would form a loop or duplicate
    edge are thrown back and re-paired, and the whole attempt is abandoned when
    the leftover stubs cannot possibly be completed.
    """
    if n <= 0 or d < 0:
        raise InvalidParams("need n > 0 and d >= 0")
    if (n * d) % 2 != 0:
        raise InvalidParams(f"n*d must be even, got n={n} d={d}")
    if d >= n:
        raise InvalidParams(f"need d < n, got n={n} d={d}")
    rng = random.Random(seed)

    def suitable(edges: set, leftovers: dict) -> bool:
        if not leftovers:
            return True
        nodes = sorted(leftovers, reverse=True)
        for s1 in nodes:
            for s2 in nodes:
                if s1 == s2:
                    break
                # descending order plus the break guarantee s2 > s1 here
                if (s1, s2) not in edges:
                    return True
        return False

    for _ in range(max_rounds):
        edges: set[tuple[int, int]] = set()
        stubs = list(range(n)) * d
        ok = True
        repairs = 0
        while stubs:
            repairs += 1
            if repairs > 50 * (d + 2):
                ok = False
                break
            leftovers: dict[int, int] = {}
            rng.shuffle(stubs)
            it = iter(stubs)
            for s1, s2 in zip(it, it):
                if s1 > s2:
                    s1, s2 = s2, s1
                if s1 != s2 and (s1, s2) not in edges:
                    edges.add((s1, s2))
                else:
                    leftovers[s1] = leftovers.get(s1, 0) + 1
                    leftovers[s2] = leftovers.get(s2, 0) + 1
            if not suitable(edges, leftovers):
                ok = False
                break
            stubs = [v for v, count in leftovers.items() for _ in range(count)]
        if ok:
            return from_edges(n, sorted(edges))
    raise RetryExhausted(f"no valid pairing after {max_rounds} rounds (n={n}, d={d})")


def _is_prime(x: int) -> bool:
    if x < 2:
        return False
    if x % 2 == 0:
        return x == 2
    f = 3
    while f * f <= x:
        if x % f == 0:
            return False
        f += 2
    return True


def _sqrt_minus_one(q: int) -> int:
    # exists because q = 1 mod 4
    for x in range(2, q):
        if (x * x) % q == q - 1:
            return x
    raise InvalidParams(f"no square root of -1 modulo {q}")


def _norm_p_quaternions(p: int) -> list[tuple[int, int, int, int]]:
    """All (a0, a1, a2, a3) with a0 odd positive, the rest even, summing squares to p."""
    sols = []
    bound = int(p**0.5)
    evens = [x for x in range(-bound, bound + 1) if x % 2 == 0]
    for a0 in range(1, bound + 1, 2):
        r0 = p - a0 * a0
        for a1 in evens:
            if a1 * a1 > r0:
                continue
            r1 = r0 - a1 * a1
            for a2 in evens:
                if a2 * a2 > r1:
                    continue
                rem = r1 - a2 * a2
                root = int(round(rem**0.5))
                if root * root != rem or root % 2 != 0:
                    continue
                for a3 in sorted({root, -root}):
                    sols.append((a0, a1, a2, a3))
    return sols


def _canonical(mat: tuple[int, int, int, int], q: int) -> tuple[int, int, int, int]:
    """Projective representative: scale so the first nonzero entry is 1."""
    for e in mat:
        if e % q != 0:
            inv = pow(e, q - 2, q)
            return tuple((x * inv) % q for x in mat)  # type: ignore[return-value]
    raise InvalidParams("zero matrix has no projective representative")


def _mat_mul(a, b, q):
    return (
        (a[0] * b[0] + a[1] * b[2]) % q,
        (a[0] * b[1] + a[1] * b[3]) % q,
        (a[2] * b[0] + a[3] * b[2]) % q,
        (a[2] * b[1] + a[3] * b[3]) % q,
    )


def legendre_symbol(p: int, q: int) -> int:
    val = pow(p % q, (q - 1) // 2, q)
    return -1 if val == q - 1 else val


def lps_variant(p: int, q: int) -> str:
    """How the vertex set arises: "PSL2" when p is a square mod q, else the
    non-bipartite involution quotient of the PGL2 Cayley graph."""
    return "PSL2" if legendre_symbol(p, q) == 1 else "PGL2-quotient"


def _non_residue(q: int) -> int:
    for x in range(2, q):
        if pow(x, (q - 1) // 2, q) == q - 1:
            return x
    raise InvalidParams(f"no quadratic non-residue modulo {q}")


def _lps_generators(p: int, q: int) -> list[tuple[int, int, int, int]]:
    i = _sqrt_minus_one(q)
    gens = []
    for a0, a1, a2, a3 in _norm_p_quaternions(p):
        mat = (
            (a0 + i * a1) % q,
            (a2 + i * a3) % q,
            (-a2 + i * a3) % q,
            (a0 - i * a1) % q,
        )
        gens.append(_canonical(mat, q))
    if len(gens) != p + 1:
        raise InvalidParams(
            f"expected {p + 1} generator quaternions, found {len(gens)}"
        )
    if len(set(gens)) != p + 1:
        raise InvalidParams("generators collide projectively; q too small for p")
    return gens


def lps_graph(p: int, q: int) -> Graph:
    """The (p+1)-regular non-bipartite Ramanujan graph X^{p,q} on q(q^2-1)/2 vertices.

    Requires distinct primes p, q, both congruent to 1 mod 4. When (p|q) = 1
    the generators have square determinant, so the closure of the identity is
    PSL_2(F_q) and the graph is its Cayley graph. When (p|q) = -1 the Cayley
    graph lives on all of PGL_2(F_q) and is bipartite; we return its standard
    non-bipartite quotient by left multiplication with an antidiagonal
    involution w of non-square determinant. The quotient has the same degree,
    half the vertices, and its spectrum sits inside the cover's spectrum with
    the parity eigenvalue -(p+1) removed, so the Ramanujan bound survives.
    """
    for name, val in (("p", p), ("q", q)):
        if not _is_prime(val):
            raise InvalidParams(f"{name}={val} is not prime")
        if val % 4 != 1:
            raise InvalidParams(f"{name}={val} must be 1 mod 4")
    if p == q:
        raise InvalidParams("p and q must be distinct")

    gens = _lps_generators(p, q)
    if legendre_symbol(p, q) == 1:
        label = lambda mat: _canonical(mat, q)
    else:
        w = (0, 1, _non_residue(q), 0)

        def label(mat, _w=w):
            return min(_canonical(mat, q), _canonical(_mat_mul(_w, mat, q), q))

    identity = label((1, 0, 0, 1))
    index = {identity: 0}
    order = [identity]
    edges: set[tuple[int, int]] = set()
    head = 0
    while head < len(order):
        mat = order[head]
        u = index[mat]
        for gen in gens:
            nb = label(_mat_mul(mat, gen, q))
            v = index.get(nb)
            if v is None:
                v = len(order)
                index[nb] = v
                order.append(nb)
            if u == v:
                raise InvalidParams("generator acts as a scalar; degenerate parameters")
            edges.add((u, v) if u < v else (v, u))
        head += 1

    n = len(order)
    expected = q * (q * q - 1) // 2
    if n != expected:
        raise InvalidParams(
            f"closure produced {n} vertices, expected {expected} for ({p}, {q})"
        )
    g = from_edges(n, sorted(edges))
    if g.regular_degree() != p + 1:
        raise InvalidParams("generator multiplications collided; graph is not (p+1)-regular")
    return g
