"""Generators for the extremal and test objects.

Includes the point/line incidence graph of the projective plane (C4-free),
its clique blow-up, the three-paths gadget ``T(G)``, the 3-regular-tree
ambiguity instance, and planted line configurations.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction

from .core import Graph, PointConfig, Space, make_rng


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    return all(q % d for d in range(2, int(q**0.5) + 1))


def projective_points(q: int) -> list[tuple[int, int, int]]:
    """Normalized representatives of PG(2, q): first non-zero coordinate is 1."""
    pts = [(1, y, z) for y in range(q) for z in range(q)]
    pts += [(0, 1, z) for z in range(q)]
    pts.append((0, 0, 1))
    return pts


def gen_incidence_c4free(q: int) -> Graph:
    """Point/line incidence graph of the projective plane of prime order ``q``.

    Points are vertices ``1..N`` and lines ``N+1..2N`` with ``N = q^2+q+1``.
    """
    if not _is_prime(q):
        raise ValueError(f"order {q} is not prime")
    pts = projective_points(q)
    size = len(pts)
    edges = []
    for a, p in enumerate(pts, start=1):
        for b, line in enumerate(pts, start=1):
            if (p[0] * line[0] + p[1] * line[1] + p[2] * line[2]) % q == 0:
                edges.append((a, size + b))
    return Graph.from_edges(2 * size, edges)


def blow_up(g: Graph, k: int) -> Graph:
    """Replace each vertex by a ``k``-clique and each edge by a complete bipartite bundle.

    Vertex ``(v, a)`` with ``a`` in ``1..k`` becomes ``(v-1)*k + a``.
    """
    if k < 1:
        raise ValueError("k must be at least 1")

    def block(v: int) -> range:
        return range((v - 1) * k + 1, v * k + 1)

    edges = []
    for v in g.vertices():
        edges.extend(itertools.combinations(block(v), 2))
    for u, v in g.edges():
        edges.extend(itertools.product(block(u), block(v)))
    return Graph.from_edges(g.n * k, edges)


def gen_T(g: Graph) -> Graph:
    """Replace every edge by three parallel paths of length two.

    The midpoints of edge number ``t`` (edges in sorted order, from 0) are
    ``n + 3t + 1 .. n + 3t + 3``.
    """
    edges = sorted(g.edges())
    n = g.n
    new = []
    for t, (u, v) in enumerate(edges):
        for c in range(1, 4):
            mid = n + 3 * t + c
            new.append((u, mid))
            new.append((v, mid))
    return Graph.from_edges(n + 3 * len(edges), new)


def t_ratio_step(a: Fraction) -> Fraction:
    """Edge/vertex ratio after one application of :func:`gen_T`."""
    return 6 * a / (1 + 3 * a)


def iterate_T(g: Graph, steps: int) -> list[Graph]:
    if steps > 6:
        raise ValueError("at most 6 iterations are supported")
    out = [g]
    for _ in range(steps):
        out.append(gen_T(out[-1]))
    return out


# ---------------------------------------------------------------------------
# 3-regular tree ambiguity


def _tree_distance(a: tuple[int, ...], b: tuple[int, ...]) -> int:
    """Distance between equal-depth vertices of a rooted binary tree given as bit strings."""
    common = 0
    for x, y in zip(a, b):
        if x != y:
            break
        common += 1
    return 2 * (len(a) - common)


def _level_strings(scale: int, kind: int, count: int) -> list[tuple[int, ...]]:
    """``count`` strings of length ``3*scale``: kind 1 starts with ``2*scale``
    zeros, kind 2 ends with ``2*scale`` zeros."""
    free = scale
    if count > 2**free:
        raise ValueError(f"only {2**free} distinct strings exist at scale {scale}")
    out = []
    for x in range(count):
        bits = tuple((x >> (free - 1 - b)) & 1 for b in range(free))
        zeros = (0,) * (2 * scale)
        out.append(zeros + bits if kind == 1 else bits + zeros)
    return out


@dataclass(frozen=True)
class AmbiguityInstance:
    """Two point sets in the 3-regular tree that share every measured distance.

    Points ``1..t`` sit on one side of a deleted edge and ``t+1..2t`` on the
    other; the measured pairs are exactly the ``t^2`` cross pairs.
    """

    t: int
    r1: dict[tuple[int, int], int]
    r2: dict[tuple[int, int], int]
    measured: frozenset[tuple[int, int]]

    @property
    def points(self) -> int:
        return 2 * self.t


def gen_tree_ambiguity(t_scale: int, points_per_side: int = 2) -> AmbiguityInstance:
    """Distance matrices of the two indistinguishable configurations.

    Each side of an edge ``e`` of the 3-regular tree is a binary tree rooted at
    an endpoint of ``e``; both configurations put ``points_per_side`` vertices
    of depth ``3*t_scale`` on each side.  Cross distances are ``6*t_scale + 1``
    in both (the edge ``e`` itself is counted).
    """
    if t_scale < 1:
        raise ValueError("t_scale must be at least 1")
    t = points_per_side
    mats = []
    for kind in (1, 2):
        strings = _level_strings(t_scale, kind, t)
        sides = [(0, s) for s in strings] + [(1, s) for s in strings]
        mat = {}
        for i in range(2 * t):
            for j in range(i + 1, 2 * t):
                (si, a), (sj, b) = sides[i], sides[j]
                d = _tree_distance(a, b) if si == sj else len(a) + 1 + len(b)
                mat[(i + 1, j + 1)] = d
        mats.append(mat)
    measured = frozenset((i, j) for i in range(1, t + 1) for j in range(t + 1, 2 * t + 1))
    return AmbiguityInstance(t, mats[0], mats[1], measured)


# ---------------------------------------------------------------------------
# planted configurations


class PlantKind(enum.Enum):
    UNIFORM = "uniform"
    CLUSTERED = "clustered"
    GRID = "grid"


UNIFORM_DENOMINATOR = 10**9
CLUSTER_DENOMINATOR = 10**12
CLUSTER_WIDTH = 10**8  # in units of 1/CLUSTER_DENOMINATOR, i.e. 1e-4


def gen_planted_line(n: int, kind: PlantKind | str = PlantKind.UNIFORM, seed=0) -> PointConfig:
    """Injective rational configuration on the line.

    ``uniform``: distinct multiples of 1e-9 in [0, 1).  ``clustered``: half
    the points in [0, 1e-4), the rest in [1, 1 + 1e-4).  ``grid``: 1..n.
    """
    if n < 2:
        raise ValueError("need at least 2 points")
    kind = PlantKind(kind)
    if kind is PlantKind.GRID:
        return PointConfig(Space.LINE, tuple(Fraction(v) for v in range(1, n + 1)))
    rng = make_rng(seed)
    if kind is PlantKind.UNIFORM:
        ticks = rng.choice(UNIFORM_DENOMINATOR, size=n, replace=False)
        return PointConfig(Space.LINE, tuple(Fraction(int(x), UNIFORM_DENOMINATOR) for x in ticks))
    left = n // 2
    ticks = rng.choice(CLUSTER_WIDTH, size=n, replace=False)
    pos = [Fraction(int(x), CLUSTER_DENOMINATOR) for x in ticks[:left]]
    pos += [1 + Fraction(int(x), CLUSTER_DENOMINATOR) for x in ticks[left:]]
    order = rng.permutation(n)
    return PointConfig(Space.LINE, tuple(pos[k] for k in order))


def gen_planted_circle(n: int, seed=0) -> PointConfig:
    rng = make_rng(seed)
    ticks = rng.choice(UNIFORM_DENOMINATOR, size=n, replace=False)
    return PointConfig(Space.CIRCLE, tuple(Fraction(int(x), UNIFORM_DENOMINATOR) for x in ticks))


def cluster_gaps(cfg: PointConfig) -> tuple[Fraction, Fraction]:
    """(largest gap inside a cluster, gap between the two clusters) for a clustered config."""
    pos = sorted(cfg.positions)
    gaps = [b - a for a, b in zip(pos, pos[1:])]
    between = max(gaps)
    inside = max((g for g in gaps if g != between), default=Fraction(0))
    return inside, between
