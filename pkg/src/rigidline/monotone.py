"""Monotone paths in random graphs on ``1..n``.

A path is monotone when its vertex labels strictly increase.  Its existence
from 1 to n in G(n, p) flips at ``p = ln(n)/n``; shortest-path estimates on
the line are exact precisely along such paths.
"""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import Graph, make_rng, sample_pair_indices, to_scalar

log = logging.getLogger(__name__)


def _check_vertex(g: Graph, v: int) -> None:
    if not 1 <= v <= g.n:
        raise IndexError(f"vertex {v} out of range 1..{g.n}")


def _reach_from_sorted(n: int, lo: np.ndarray, hi: np.ndarray, source: int) -> np.ndarray:
    """Ascending sweep; edges must be sorted by their larger endpoint."""
    reach = np.zeros(n + 1, dtype=bool)
    reach[source] = True
    start = np.searchsorted(hi, source, side="right")
    for i, j in zip(lo[start:].tolist(), hi[start:].tolist()):
        if reach[i]:
            reach[j] = True
    reach[:source] = False
    return reach


def _sorted_edges(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    pairs = sorted(((i, j) for i, j in g.edges()), key=lambda e: (e[1], e[0]))
    lo = np.array([e[0] for e in pairs], dtype=np.int64)
    hi = np.array([e[1] for e in pairs], dtype=np.int64)
    return lo, hi


def monotone_reach(g: Graph, source: int) -> np.ndarray:
    """Boolean mask over ``0..n`` of vertices reachable by an increasing path."""
    _check_vertex(g, source)
    lo, hi = _sorted_edges(g)
    return _reach_from_sorted(g.n, lo, hi, source)


def has_monotone_path(g: Graph, source: int, target: int) -> bool:
    _check_vertex(g, source)
    _check_vertex(g, target)
    if source > target:
        raise ValueError("source must not exceed target")
    return bool(monotone_reach(g, source)[target])


def monotone_reach_count(g: Graph, source: int) -> int:
    return int(monotone_reach(g, source).sum())


def count_monotone_paths(g: Graph, source: int, target: int) -> int:
    """Number of increasing paths from ``source`` to ``target``."""
    ways = [0] * (g.n + 1)
    ways[source] = 1
    for j in range(source + 1, target + 1):
        ways[j] = sum(ways[i] for i in g.neighbors(j) if source <= i < j)
    return ways[target] if target != source else 1


def first_moment_bound(n: int, p) -> Fraction:
    """Expected number of monotone 1 -> n paths in G(n, p): ``p (1+p)^(n-2)``."""
    p = to_scalar(p)
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    if n < 2:
        raise ValueError("need n >= 2")
    return p * (1 + p) ** (n - 2)


def critical_p(n: int, eps: float) -> float:
    return (1 + eps) * math.log(n) / n


def _sorted_gnp(n: int, p: float, rng) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = sample_pair_indices(n, p, rng)
    order = np.lexsort((lo, hi))
    return lo[order], hi[order]


def trial_seed(seed: int, index: int) -> tuple[int, int]:
    """Per-trial seed material; results never depend on scheduling."""
    return (int(seed), int(index))


def worker_count() -> int:
    env = os.environ.get("RIGIDITY_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _run(fn, tasks: list, workers: int | None) -> list:
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(tasks) < 2:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def _path_trial(task: tuple[int, float, int, int]) -> bool:
    n, p, seed, index = task
    lo, hi = _sorted_gnp(n, p, make_rng(trial_seed(seed, index)))
    return bool(_reach_from_sorted(n, lo, hi, 1)[n])


@dataclass
class ThresholdSweep:
    n: int
    epsilons: list[float]
    trials: int
    seed: int
    successes: dict[float, int]

    def p(self, eps: float) -> float:
        return min(1.0, max(0.0, critical_p(self.n, eps)))

    def fraction(self, eps: float) -> Fraction:
        return Fraction(self.successes[eps], self.trials)

    @property
    def results(self) -> dict[float, Fraction]:
        return {e: self.fraction(e) for e in self.epsilons}

    def rows(self) -> list[tuple[float, float, int, int, Fraction]]:
        return [(e, self.p(e), self.successes[e], self.trials, self.fraction(e)) for e in self.epsilons]


def threshold_sweep(n: int, epsilons: Sequence[float], trials: int, seed: int = 0, workers: int | None = None) -> ThresholdSweep:
    """Fraction of G(n, (1+eps) ln(n)/n) samples with a monotone 1 -> n path.

    Trial ``t`` of every epsilon uses seed material ``(seed, t)``, so the
    cells are coupled and reproducible under any scheduling.
    """
    if n < 10:
        raise ValueError("need n >= 10")
    if trials < 1:
        raise ValueError("need at least one trial")
    epsilons = [float(e) for e in epsilons]
    tasks = []
    for e in epsilons:
        p = critical_p(n, e)
        if p > 1:
            log.warning("p = %.4g exceeds 1 at eps = %s; clipped", p, e)
        p = min(1.0, max(0.0, p))
        tasks.extend((n, p, seed, t) for t in range(trials))
    hits = _run(_path_trial, tasks, workers)
    successes = {e: sum(hits[k * trials:(k + 1) * trials]) for k, e in enumerate(epsilons)}
    return ThresholdSweep(n, epsilons, trials, seed, successes)


def _all_sources_reach(n: int, lo: np.ndarray, hi: np.ndarray) -> list[int]:
    """Bitmask of monotone reach for every source (bit ``j`` = vertex ``j``)."""
    reach = [1 << v for v in range(n + 1)]
    # descending over the smaller endpoint: R[i] |= R[j] for i < j adjacent
    order = np.argsort(-lo, kind="stable")
    for i, j in zip(lo[order].tolist(), hi[order].tolist()):
        reach[i] |= reach[j]
    return reach


def all_far_pairs_connected(n: int, lo: np.ndarray, hi: np.ndarray, gap: int | None = None) -> bool:
    """Every pair ``i < j`` with ``j - i >= gap`` (default ``n/8``) has a monotone path."""
    if gap is None:
        gap = -(-n // 8)
    reach = _all_sources_reach(n, lo, hi)
    full = (1 << (n + 1)) - 1
    for i in range(1, n - gap + 1):
        need = full & ~((1 << (i + gap)) - 1)
        if reach[i] & need != need:
            return False
    return True


def _coverage_trial(task: tuple[int, float, int, int]) -> bool:
    n, p, seed, index = task
    lo, hi = sample_pair_indices(n, p, make_rng(trial_seed(seed, index)))
    return all_far_pairs_connected(n, lo, hi)


def coverage_counts(n: int, C: float, trials: int, seed: int = 0, workers: int | None = None) -> tuple[int, float]:
    """(successful trials, p) for :func:`pair_coverage`."""
    if C <= 0:
        raise ValueError("C must be positive")
    if trials < 1:
        raise ValueError("need at least one trial")
    p = min(1.0, C * math.log(n) / n)
    hits = _run(_coverage_trial, [(n, p, seed, t) for t in range(trials)], workers)
    return sum(hits), p


def pair_coverage(n: int, C: float, trials: int, seed: int = 0, workers: int | None = None) -> Fraction:
    """Fraction of G(n, C ln(n)/n) samples where all pairs ``n/8`` apart are monotonically connected."""
    hits, _ = coverage_counts(n, C, trials, seed, workers)
    return Fraction(hits, trials)


# ---------------------------------------------------------------------------
# randomly labelled trees


@dataclass(frozen=True)
class LabelledTree:
    """Rooted tree as a parent array; vertex 0 is the root (``parent[0] == -1``)."""

    parent: tuple[int, ...]

    def __post_init__(self):
        par = tuple(int(x) for x in self.parent)
        object.__setattr__(self, "parent", par)
        if not par or par[0] != -1:
            raise ValueError("vertex 0 must be the root")
        for v, u in enumerate(par[1:], start=1):
            if not 0 <= u < v:
                raise ValueError("parents must precede their children")

    @property
    def size(self) -> int:
        return len(self.parent)

    @property
    def depths(self) -> list[int]:
        depth = [0] * self.size
        for v in range(1, self.size):
            depth[v] = depth[self.parent[v]] + 1
        return depth

    @property
    def level_sizes(self) -> list[int]:
        depth = self.depths
        sizes = [0] * (max(depth) + 1)
        for d in depth:
            sizes[d] += 1
        return sizes

    def expected_monotone(self) -> Fraction:
        """Exact mean number of vertices with an increasing root path."""
        return sum((Fraction(r, math.factorial(i)) for i, r in enumerate(self.level_sizes)), Fraction(0))


def complete_binary_tree(depth: int) -> LabelledTree:
    return LabelledTree((-1,) + tuple((v - 1) // 2 for v in range(1, 2 ** (depth + 1) - 1)))


def star_tree(leaves: int) -> LabelledTree:
    return LabelledTree((-1,) + (0,) * leaves)


def random_recursive_tree(size: int, seed=0) -> LabelledTree:
    rng = make_rng(seed)
    return LabelledTree((-1,) + tuple(int(rng.integers(0, v)) for v in range(1, size)))


def galton_watson_tree(mean: float, depth: int, seed=0, max_size: int = 100_000) -> LabelledTree:
    """Poisson(``mean``) branching process stopped after ``depth`` generations."""
    rng = make_rng(seed)
    parent = [-1]
    frontier = [0]
    for _ in range(depth):
        nxt = []
        for u in frontier:
            for _ in range(int(rng.poisson(mean))):
                parent.append(u)
                nxt.append(len(parent) - 1)
                if len(parent) > max_size:
                    raise ValueError("branching process exceeded max_size")
        frontier = nxt
        if not frontier:
            break
    return LabelledTree(tuple(parent))


@dataclass(frozen=True)
class TreeMeanEstimate:
    mean: float
    stderr: float
    exact: Fraction
    samples: int

    @property
    def z_score(self) -> float:
        if self.stderr == 0:
            return 0.0 if self.mean == float(self.exact) else math.inf
        return (self.mean - float(self.exact)) / self.stderr


def monotone_sizes(tree: LabelledTree, samples: int, seed=0) -> np.ndarray:
    """|M_pi| for ``samples`` independent uniform labellings with the root labelled first."""
    rng = make_rng(seed)
    size = tree.size
    # labels of non-root vertices: a random permutation of 2..size, i.e. ranks of iid keys
    keys = rng.random((samples, size))
    keys[:, 0] = -1.0
    increasing = np.zeros((samples, size), dtype=bool)
    increasing[:, 0] = True
    for v in range(1, size):
        u = tree.parent[v]
        increasing[:, v] = increasing[:, u] & (keys[:, v] > keys[:, u])
    return increasing.sum(axis=1)


def labelled_tree_monotone_mean(tree: LabelledTree, samples: int, seed=0) -> TreeMeanEstimate:
    if samples < 1:
        raise ValueError("need at least one sample")
    sizes = monotone_sizes(tree, samples, seed)
    mean = float(sizes.mean())
    stderr = float(sizes.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return TreeMeanEstimate(mean, stderr, tree.expected_monotone(), samples)
