"""Reconstruction on the line from random measurements.

Shortest-path estimates, triangle-equality voting to repair corrupted
distances, and the randomized embedding that needs only a constant expected
number of shortest-path computations.
"""
from __future__ import annotations

import enum
import heapq
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .core import (
    MeasurementSet,
    PointConfig,
    Space,
    all_distances,
    lcm_of_denominators,
    make_rng,
    pair,
)
from .determination import InconsistentInput, closure

log = logging.getLogger(__name__)

INFINITE = math.inf

# float64 holds every integer below 2**53 exactly
_EXACT_FLOAT_LIMIT = 2**53


def _dijkstra_scaled(adj: list[list[tuple[int, int]]], source: int) -> list[int | None]:
    dist: list[int | None] = [None] * len(adj)
    dist[source] = 0
    heap = [(0, source)]
    done = [False] * len(adj)
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w in adj[u]:
            nd = d + w
            old = dist[v]
            if old is None or nd < old:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def _float_path_is_exact(m: MeasurementSet) -> bool:
    _, _, w = m.scaled_arrays
    if not w:
        return False
    # scipy treats zero-weight entries as missing edges
    return min(w) > 0 and max(w) * max(m.n - 1, 1) < _EXACT_FLOAT_LIMIT


def scaled_shortest_paths(m: MeasurementSet, sources) -> tuple[np.ndarray, np.ndarray]:
    """Shortest-path distances in units of ``1 / m.scale``.

    Returns ``(dist, reach)`` of shape ``(len(sources), n + 1)``; column 0 is
    unused and ``dist`` is meaningless where ``reach`` is False.  Uses scipy's
    Dijkstra when every path sum is an integer below 2**53 (so float64 is
    exact), otherwise a heap Dijkstra on Python ints.
    """
    _, _, w = m.scaled_arrays
    if w and min(w) < 0:
        raise ValueError("negative weight")
    sources = [int(s) for s in sources]
    if _float_path_is_exact(m):
        from scipy.sparse.csgraph import dijkstra

        raw = np.atleast_2d(dijkstra(m.scaled_csr, directed=False, indices=sources))
        reach = np.isfinite(raw)
        dist = np.where(reach, raw, 0).astype(np.int64)
        return dist, reach
    adj = m.scaled_adjacency
    rows = [_dijkstra_scaled(adj, s) for s in sources]
    reach = np.array([[d is not None for d in row] for row in rows], dtype=bool)
    dist = np.array([[0 if d is None else d for d in row] for row in rows], dtype=object)
    return dist, reach


def est_from(m: MeasurementSet, source: int) -> dict[int, Fraction | float]:
    """Graph-metric distance from ``source`` to every vertex (``INFINITE`` if unreachable)."""
    if not 1 <= source <= m.n:
        raise IndexError(f"vertex {source} out of range 1..{m.n}")
    dist, reach = scaled_shortest_paths(m, [source])
    s = m.scale
    return {
        v: Fraction(int(dist[0, v]), s) if reach[0, v] else INFINITE
        for v in range(1, m.n + 1)
    }


def triangle_equality(a, b, c) -> bool:
    """The largest of three non-negative values equals the sum of the other two."""
    return a + b + c == 2 * max(a, b, c)


def int_set(u: int, v: int, est_u: Mapping, est_v: Mapping, duv) -> set[int]:
    """Vertices ``x`` with ``est_u[x] + est_v[x] == duv`` (the estimated interior)."""
    out = set()
    for x, a in est_u.items():
        if x in (u, v) or a == INFINITE:
            continue
        b = est_v.get(x, INFINITE)
        if b != INFINITE and a + b == duv:
            out.add(x)
    return out


class Status(enum.Enum):
    SUCCESS = "success"
    FAILED = "failed"


@dataclass
class EmbeddingResult:
    emb: dict[int, Fraction]
    status: Status
    iterations_used: int
    aborted_rounds: int = 0

    @property
    def succeeded(self) -> bool:
        return self.status is Status.SUCCESS


def default_rounds(n: int) -> int:
    return math.ceil(math.log(n))


def embed_line(m: MeasurementSet, seed=0, max_rounds: int | None = None) -> EmbeddingResult:
    """Embed every vertex on the line from sparse random measurements.

    Each round samples two distinct vertices ``u, v``; if at least ``n/2``
    vertices lie on a shortest ``u``-``v`` route (the estimated interior),
    trims ``ceil(n/8)`` from each end, embeds the rest by their estimate from
    ``u``, and places everything else from the two middle survivors.  A round
    is abandoned on a tie, an unreachable vertex, or a non-injective result.
    Runs ``ceil(ln n)`` rounds unless ``max_rounds`` is given.
    """
    n = m.n
    if n < 16:
        raise ValueError("need at least 16 vertices")
    rounds = default_rounds(n) if max_rounds is None else max_rounds
    rng = make_rng(seed)
    trim = -(-n // 8)
    scale = m.scale
    aborted = 0
    for r in range(1, rounds + 1):
        u, v = (int(x) + 1 for x in rng.choice(n, size=2, replace=False))
        dist, reach = scaled_shortest_paths(m, [u, v])
        if not reach[0, v]:
            aborted += 1
            continue
        eu, ev = dist[0], dist[1]
        duv = eu[v]
        mask = reach[0] & reach[1] & (eu + ev == duv)
        mask[[0, u, v]] = False
        interior = np.flatnonzero(mask)
        if 2 * len(interior) < n:
            continue
        by_u = sorted(interior.tolist(), key=lambda x: (eu[x], x))
        by_v = sorted(interior.tolist(), key=lambda x: (ev[x], x))
        dropped = set(by_u[:trim]) | set(by_v[:trim])
        core = [x for x in by_u if x not in dropped]
        if len(core) < 2:
            aborted += 1
            continue
        half = len(core) // 2
        x_u, x_v = core[half - 1], core[half]
        d2, r2 = scaled_shortest_paths(m, [x_u, x_v])
        placed = np.zeros(n + 1, dtype=bool)
        placed[core] = True
        placed[u] = True
        placed[0] = True
        rest = np.flatnonzero(~placed)
        if not (r2[0, rest].all() and r2[1, rest].all()):
            aborted += 1
            continue
        a, b = d2[0, rest], d2[1, rest]
        if np.any(a == b):
            aborted += 1
            continue
        pos = {u: 0}
        for x in core:
            pos[x] = eu[x]
        base = eu[x_u]
        for w, aw, bw in zip(rest.tolist(), a.tolist(), b.tolist()):
            pos[w] = base + aw if aw > bw else base - aw
        if len(set(pos.values())) != n:
            aborted += 1
            continue
        emb = {w: Fraction(int(x), scale) for w, x in sorted(pos.items())}
        return EmbeddingResult(emb, Status.SUCCESS, r, aborted)
    return EmbeddingResult({}, Status.FAILED, rounds, aborted)


def isometry_match(emb_a: Mapping[int, Fraction], emb_b: Mapping[int, Fraction]) -> bool:
    """True iff ``emb_b = +-emb_a + t`` for a single sign and translation."""
    if set(emb_a) != set(emb_b):
        raise ValueError("embeddings are over different vertex sets")
    if len(emb_a) < 2:
        raise ValueError("need at least two vertices")
    keys = sorted(emb_a)
    a0 = keys[0]
    a1 = next((k for k in keys[1:] if emb_a[k] != emb_a[a0]), None)
    if a1 is None:
        return len(set(emb_b.values())) == 1
    sign = Fraction(emb_b[a1] - emb_b[a0]) / (emb_a[a1] - emb_a[a0])
    if sign not in (1, -1):
        return False
    t = emb_b[a0] - sign * emb_a[a0]
    return all(emb_b[k] == sign * emb_a[k] + t for k in keys)


def config_embedding(cfg: PointConfig) -> dict[int, Fraction]:
    return {v: cfg.positions[v - 1] for v in range(1, cfg.n + 1)}


# ---------------------------------------------------------------------------
# corrupted full distance tables


def _table_size(dp: Mapping[tuple[int, int], Fraction]) -> int:
    n = max((max(k) for k in dp), default=0)
    if len(dp) != n * (n - 1) // 2:
        raise ValueError("distance table must cover every pair of 1..n exactly once")
    return n


def _integer_matrix(dp: Mapping[tuple[int, int], Fraction], n: int) -> tuple[np.ndarray, int]:
    scale = lcm_of_denominators(dp.values())
    vals = {k: v.numerator * (scale // v.denominator) for k, v in dp.items()}
    big = max(vals.values(), default=0)
    dtype = np.int64 if 4 * big < 2**62 else object
    mat = np.zeros((n, n), dtype=dtype)
    for (i, j), x in vals.items():
        mat[i - 1, j - 1] = x
        mat[j - 1, i - 1] = x
    return mat, scale


def triangle_support(dp: Mapping[tuple[int, int], Fraction]) -> dict[tuple[int, int], int]:
    """For each pair, how many third points complete it to a triangle equality."""
    n = _table_size(dp)
    mat, _ = _integer_matrix(dp, n)
    out = {}
    for i in range(n - 1):
        a = mat[i, i + 1:][:, None]
        b = mat[i][None, :]
        c = mat[i + 1:]
        eq = (a + b + c) == 2 * np.maximum(np.maximum(a, b), c)
        # z = i and z = j always satisfy the equality trivially
        counts = eq.sum(axis=1) - 2
        for off, cnt in enumerate(counts.tolist()):
            out[(i + 1, i + 2 + off)] = int(cnt)
    return out


@dataclass
class CorrectionResult:
    distances: dict[tuple[int, int], Fraction] | None
    kept: frozenset[tuple[int, int]] = field(default_factory=frozenset)
    reason: str = ""

    @property
    def succeeded(self) -> bool:
        return self.distances is not None


def correct_distances(dp: Mapping[tuple[int, int], Fraction], c: float | None = None) -> CorrectionResult:
    """Recover true line distances from a table with a few wrong entries per point.

    Keeps a value iff it forms a triangle equality with more than ``n/2``
    other points, then re-derives the discarded pairs with the line closure.
    Sound whenever each point has fewer than ``n/4`` wrong entries and ``n``
    is moderately large; ``c`` is only used to warn outside that regime.
    """
    dp = {pair(*k): Fraction(v) for k, v in dp.items()}
    n = _table_size(dp)
    if c is not None and c >= 0.25:
        log.warning("corruption fraction %s is outside the unique-recovery regime c < 1/4", c)
    support = triangle_support(dp)
    kept = frozenset(k for k, cnt in support.items() if 2 * cnt > n)
    try:
        closed = closure(MeasurementSet(n, {k: dp[k] for k in kept}), Space.LINE)
    except InconsistentInput as exc:
        return CorrectionResult(None, kept, str(exc))
    if len(closed.determined) != len(dp):
        missing = len(dp) - len(closed.determined)
        return CorrectionResult(None, kept, f"{missing} pairs left undetermined")
    return CorrectionResult(dict(sorted(closed.determined.items())), kept)


def corruption_counts(candidate: Mapping, corrupted: Mapping, n: int) -> list[int]:
    """Per-vertex number of pairs where the two tables disagree (index 0 unused)."""
    counts = [0] * (n + 1)
    for k, v in corrupted.items():
        if candidate[k] != v:
            counts[k[0]] += 1
            counts[k[1]] += 1
    return counts


def is_consistent(candidate: Mapping, corrupted: Mapping, c) -> bool:
    """Whether ``corrupted`` could arise from ``candidate`` with at most ``c*n`` bad entries per point."""
    n = _table_size(corrupted)
    counts = corruption_counts(candidate, corrupted, n)
    return max(counts) <= Fraction(c) * n


def make_random_corruption(cfg: PointConfig, c, seed=0) -> dict[tuple[int, int], Fraction]:
    """True line distances with random wrong values on at most ``floor(c n)`` pairs per point.

    Wrong values are uniform on ``(0, 2 * diameter]`` over the grid of the
    configuration's common denominator, never equal to the true value.
    """
    if cfg.space is not Space.LINE:
        raise ValueError("corruption tables are defined for line configurations")
    rng = make_rng(seed)
    n = cfg.n
    cap = math.floor(Fraction(c) * n)
    table = all_distances(cfg)
    scale = cfg.scale
    top = 2 * (max(cfg.scaled_positions) - min(cfg.scaled_positions))
    keys = list(table)
    load = [0] * (n + 1)
    for idx in rng.permutation(len(keys)).tolist():
        i, j = keys[idx]
        if load[i] >= cap or load[j] >= cap:
            continue
        truth = table[(i, j)]
        while True:
            wrong = Fraction(int(rng.integers(1, top + 1)), scale)
            if wrong != truth:
                break
        table[(i, j)] = wrong
        load[i] += 1
        load[j] += 1
    return table


def shifted_config(cfg: PointConfig, shift) -> PointConfig:
    """Move the first half of the points by ``-shift``."""
    shift = Fraction(shift)
    half = cfg.n // 2
    pos = [x - shift if v < half else x for v, x in enumerate(cfg.positions)]
    return PointConfig(cfg.space, tuple(pos))


def adversarial_pairs(n: int, seed=None) -> list[tuple[int, int]]:
    """A ``n/4``-regular bipartite pair set between ``1..n/2`` and ``n/2+1..n``.

    Uses ``n/4`` of the ``n/2`` cyclic perfect matchings; the first ``n/4``
    when ``seed`` is None, a seeded choice otherwise.
    """
    if n % 4:
        raise ValueError("n must be a multiple of 4")
    k = n // 4
    half = 2 * k
    if seed is None:
        shifts = list(range(k))
    else:
        shifts = sorted(make_rng(seed).choice(half, size=k, replace=False).tolist())
    return [(i, half + 1 + (i - 1 + t) % half) for t in shifts for i in range(1, half + 1)]


def make_adversarial_corruption(cfg: PointConfig, shift, seed=None) -> dict[tuple[int, int], Fraction]:
    """True distances, except on a regular cross pattern where the values come
    from the configuration with its first half shifted by ``-shift``."""
    if cfg.space is not Space.LINE:
        raise ValueError("corruption tables are defined for line configurations")
    table = all_distances(cfg)
    moved = shifted_config(cfg, shift)
    for i, j in adversarial_pairs(cfg.n, seed):
        table[(i, j)] = abs(moved.positions[i - 1] - moved.positions[j - 1])
    return table
