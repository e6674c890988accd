"""Large cliques in graphs where non-adjacent vertices share few neighbours.

Pipeline: prune to minimum degree ``|E|/n``, grow a swap-optimal independent
set ``s_1..s_a``, and collect for each ``s_i`` the vertices whose only
neighbour in the set is ``s_i``.  Each such set plus ``s_i`` is a clique;
the largest one is returned.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .core import Graph, MeasurementSet, Space, make_rng
from .determination import closure


def prune_min_degree(g: Graph, order_seed: int | None = None) -> frozenset[int]:
    """Delete vertices of degree below ``|E|/n`` until none remain.

    The threshold is half the original average degree and never recomputed.
    The surviving set does not depend on deletion order; ``order_seed`` only
    shuffles the processing order (used to test exactly that).
    """
    m = g.num_edges
    if m == 0:
        raise ValueError("pruning needs at least one edge")
    n = g.n
    deg = [0] + [g.degree(v) for v in g.vertices()]
    alive = [False] + [True] * n
    # degree < m/n  <=>  degree * n < m
    pending = [v for v in g.vertices() if deg[v] * n < m]
    if order_seed is not None:
        make_rng(order_seed).shuffle(pending)
    queued = set(pending)
    while pending:
        v = pending.pop()
        if not alive[v]:
            continue
        alive[v] = False
        for w in g.neighbors(v):
            if alive[w]:
                deg[w] -= 1
                if deg[w] * n < m and w not in queued:
                    queued.add(w)
                    pending.append(w)
    kept = frozenset(v for v in g.vertices() if alive[v])
    if not kept:
        raise RuntimeError("internal error: pruning removed every vertex")
    return kept


def _restricted_adjacency(g: Graph, within: Iterable[int] | None) -> dict[int, frozenset[int]]:
    if within is None:
        return {v: g.neighbors(v) for v in g.vertices()}
    keep = frozenset(within)
    return {v: g.neighbors(v) & keep for v in sorted(keep)}


def _non_adjacent_pair(members: Iterable[int], adj: dict[int, frozenset[int]]) -> tuple[int, int] | None:
    pool = set(members)
    for x in sorted(pool):
        missing = pool - adj[x]
        missing.discard(x)
        if missing:
            return x, min(missing)
    return None


def swap_optimal_independent_set(g: Graph, seed: int | None = None, within: Iterable[int] | None = None) -> list[int]:
    """Maximal independent set admitting no improving 1-for-2 swap.

    Greedy in ascending degree (ties by index, or by a seeded permutation
    when ``seed`` is given), then repeatedly replaces a member ``s`` by two
    non-adjacent vertices whose unique neighbour in the set is ``s``.  Every
    swap grows the set, so at most ``n`` rounds run.
    """
    adj = _restricted_adjacency(g, within)
    verts = list(adj)
    if seed is None:
        tie = {v: v for v in verts}
    else:
        perm = make_rng(seed).permutation(len(verts))
        tie = {v: int(perm[k]) for k, v in enumerate(verts)}
    order = sorted(verts, key=lambda v: (len(adj[v]), tie[v]))

    chosen: set[int] = set()

    def fill() -> None:
        for v in order:
            if v not in chosen and not (adj[v] & chosen):
                chosen.add(v)

    fill()
    while True:
        owned: dict[int, list[int]] = {}
        for u in verts:
            if u in chosen:
                continue
            hit = adj[u] & chosen
            if len(hit) == 1:
                owned.setdefault(next(iter(hit)), []).append(u)
        for s in sorted(owned):
            xy = _non_adjacent_pair(owned[s], adj)
            if xy is not None:
                chosen.discard(s)
                chosen.update(xy)
                fill()
                break
        else:
            return sorted(chosen)


def unique_neighbor_sets(g: Graph, independent: Iterable[int], within: Iterable[int] | None = None) -> dict[int, frozenset[int]]:
    """Map each ``s`` in the set to the vertices whose only neighbour in it is ``s``."""
    adj = _restricted_adjacency(g, within)
    chosen = frozenset(independent)
    for s in chosen:
        if s not in adj:
            raise ValueError(f"vertex {s} is outside the graph")
        if adj[s] & chosen:
            raise ValueError("the given vertex set is not independent")
    out: dict[int, set[int]] = {s: set() for s in chosen}
    for u, nb in adj.items():
        hit = nb & chosen
        if len(hit) == 1:
            out[next(iter(hit))].add(u)
    return {s: frozenset(b) for s, b in sorted(out.items())}


def is_clique(g: Graph, vertices: Iterable[int]) -> bool:
    vs = set(vertices)
    return all(vs - {v} <= g.neighbors(v) for v in vs)


@dataclass(frozen=True)
class CliqueCertificate:
    pruned_vertices: frozenset[int]
    min_degree: int
    independent_set: list[int]
    b_sets: dict[int, frozenset[int]]
    clique: frozenset[int]
    k: int

    @property
    def size(self) -> int:
        return len(self.clique)


def meets_edge_threshold(num_edges: int, n: int, k: int) -> bool:
    """Exact test of ``|E| >= 8 n sqrt(k n)``."""
    return num_edges >= 0 and num_edges * num_edges >= 64 * k * n**3


def guaranteed_clique_size(num_edges: int, n: int) -> int:
    """Smallest integer at least ``|E| / (4n)``."""
    return -(-num_edges // (4 * n))


def max_nonadjacent_common(g: Graph) -> int:
    """Largest number of common neighbours over non-adjacent pairs."""
    best = 0
    for i in g.vertices():
        ni = g.neighbors(i)
        for j in range(i + 1, g.n + 1):
            if j not in ni:
                c = len(ni & g.neighbors(j))
                if c > best:
                    best = c
    return best


def extract_clique(g: Graph, k: int = 0, seed: int | None = None) -> CliqueCertificate:
    """Run prune -> swap-optimal independent set -> unique-neighbour cliques.

    The returned clique is always verified.  If non-adjacent pairs share at
    most ``k`` neighbours and ``|E| >= 8 n sqrt(k n)``, it has at least
    ``|E| / (4n)`` vertices.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if g.n == 0:
        raise ValueError("empty graph")
    pruned = prune_min_degree(g) if g.num_edges else frozenset(g.vertices())
    independent = swap_optimal_independent_set(g, seed, within=pruned)
    b_sets = unique_neighbor_sets(g, independent, within=pruned)
    best = max(independent, key=lambda s: (len(b_sets[s]), -s))
    clique = b_sets[best] | {best}
    if not is_clique(g, clique):
        raise RuntimeError("internal error: unique-neighbour set is not a clique")
    min_deg = min(len(g.neighbors(v) & pruned) for v in pruned)
    return CliqueCertificate(pruned, min_deg, independent, b_sets, frozenset(clique), k)


def corradi_bound(r: int, count: int, k: int) -> Fraction:
    """Lower bound ``r^2 N / (r + (N-1) k)`` on the size of a union of ``N``
    sets of size ``>= r`` with pairwise intersections ``<= k``."""
    if r < 1 or count < 1 or k < 0:
        raise ValueError("need r >= 1, N >= 1, k >= 0")
    return Fraction(r * r * count, r + (count - 1) * k)


@dataclass(frozen=True)
class RigidityReport:
    min_degree_ok: bool
    degree2_independent: bool
    average_degree_ok: bool

    @property
    def certified_not_rigid(self) -> bool:
        return not (self.min_degree_ok and self.degree2_independent)


def check_rigidity_necessary(g: Graph) -> RigidityReport:
    """Necessary conditions for global rigidity on the line (injective setting):
    minimum degree at least 2, degree-2 vertices pairwise non-adjacent, and
    average degree at least 12/5."""
    if g.n < 4:
        raise ValueError("the check needs at least 4 vertices")
    degs = {v: g.degree(v) for v in g.vertices()}
    twos = {v for v, d in degs.items() if d == 2}
    independent = all(not (g.neighbors(v) & twos) for v in twos)
    return RigidityReport(
        min_degree_ok=min(degs.values()) >= 2,
        degree2_independent=independent,
        average_degree_ok=5 * 2 * g.num_edges >= 12 * g.n,
    )


@dataclass(frozen=True)
class DenseReconstruction:
    vertices: list[int]
    distances: dict[tuple[int, int], Fraction]
    certificate: CliqueCertificate


def reconstruct_dense(m: MeasurementSet, space: Space = Space.LINE, seed: int | None = None) -> DenseReconstruction:
    """Find a vertex subset whose pairwise distances all follow from ``m``.

    Pairs with ``locality`` common determined neighbours are determined, so
    in the closed graph undetermined pairs share at most ``locality - 1``;
    that is the intersection bound handed to :func:`extract_clique`.
    """
    space = Space(space)
    closed = closure(m, space)
    g = closed.graph()
    cert = extract_clique(g, space.locality - 1, seed)
    verts = sorted(cert.clique)
    dist = {(a, b): closed.determined[(a, b)] for ai, a in enumerate(verts) for b in verts[ai + 1:]}
    return DenseReconstruction(verts, dist, cert)


def union_lower_bound(min_degree: int, alpha: int, k: int) -> int:
    """Bonferroni bound on the union of the unique-neighbour sets."""
    return min_degree * alpha - 2 * k * math.comb(alpha, 2)


def independence_upper_bound(n: int, min_degree: int) -> Fraction:
    return Fraction(2 * n, min_degree)
