"""Numeric tower, point configurations, metrics and the measurement-graph model.

All distances are exact rationals (:class:`fractions.Fraction`).  Vertices are
labelled ``1..n`` everywhere in the public API.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping

import numpy as np

Scalar = Fraction

DEFAULT_SEED = 1729


class Space(enum.Enum):
    LINE = "line"
    CIRCLE = "circle"

    @property
    def locality(self) -> int:
        """Number of common witnesses that pins down a distance."""
        return 3 if self is Space.LINE else 5


def to_scalar(value) -> Fraction:
    """Coerce ints, Fractions, decimal strings or ``a/b`` strings exactly.

    Floats are converted through their decimal ``repr`` so ``0.3`` means 3/10.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite scalar {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a finite decimal or rational: {value!r}") from exc
    raise TypeError(f"cannot convert {type(value).__name__} to a scalar")


def format_scalar(x: Fraction) -> str:
    """Serialize exactly: finite decimal when one exists, else ``a/b``."""
    x = Fraction(x)
    den = x.denominator
    if den == 1:
        return str(x.numerator)
    twos = fives = 0
    d = den
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{x.numerator}/{den}"
    digits = max(twos, fives)
    scaled = abs(x.numerator) * (10**digits // den)
    sign = "-" if x < 0 else ""
    whole, frac = divmod(scaled, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}".rstrip("0")


def circle_distance(x: Fraction, y: Fraction) -> Fraction:
    gap = abs(x - y) % 1
    return min(gap, 1 - gap)


def metric(space: Space, x: Fraction, y: Fraction) -> Fraction:
    if space is Space.LINE:
        return abs(x - y)
    return circle_distance(x, y)


def lcm_of_denominators(values: Iterable[Fraction]) -> int:
    scale = 1
    for v in values:
        den = v.denominator
        if scale % den:
            scale = scale * den // math.gcd(scale, den)
    return scale


@dataclass(frozen=True)
class PointConfig:
    """Injective placement of ``n`` labelled points on the line or the unit circle."""

    space: Space
    positions: tuple[Fraction, ...]

    def __post_init__(self):
        pos = tuple(to_scalar(p) for p in self.positions)
        object.__setattr__(self, "positions", pos)
        if len(set(pos)) != len(pos):
            raise ValueError("positions must be pairwise distinct")
        if self.space is Space.CIRCLE and any(not (0 <= p < 1) for p in pos):
            raise ValueError("circle positions must lie in [0, 1)")

    @property
    def n(self) -> int:
        return len(self.positions)

    def position(self, i: int) -> Fraction:
        _check_index(i, self.n)
        return self.positions[i - 1]

    @cached_property
    def scale(self) -> int:
        """Common denominator of all positions."""
        return lcm_of_denominators(self.positions)

    @cached_property
    def scaled_positions(self) -> tuple[int, ...]:
        s = self.scale
        return tuple(p.numerator * (s // p.denominator) for p in self.positions)

    def rank_order(self) -> list[int]:
        """Vertex labels sorted by position (line order)."""
        return sorted(range(1, self.n + 1), key=lambda v: self.positions[v - 1])


def _check_index(i: int, n: int) -> None:
    if not 1 <= i <= n:
        raise IndexError(f"vertex {i} out of range 1..{n}")


def distance(cfg: PointConfig, i: int, j: int) -> Fraction:
    _check_index(i, cfg.n)
    _check_index(j, cfg.n)
    if i == j:
        raise ValueError("distance needs two distinct vertices")
    return metric(cfg.space, cfg.positions[i - 1], cfg.positions[j - 1])


def all_distances(cfg: PointConfig) -> dict[tuple[int, int], Fraction]:
    """Every pairwise distance keyed by ``(i, j)`` with ``i < j``."""
    pos = cfg.positions
    out = {}
    for i in range(1, cfg.n + 1):
        for j in range(i + 1, cfg.n + 1):
            out[(i, j)] = metric(cfg.space, pos[i - 1], pos[j - 1])
    return out


def pair(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class MeasurementSet:
    """The known pairs with their measured distances, as a weighted graph."""

    n: int
    weights: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean: dict[tuple[int, int], Fraction] = {}
        for (i, j), w in self.weights.items():
            _check_index(i, self.n)
            _check_index(j, self.n)
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            key = pair(i, j)
            w = to_scalar(w)
            if key in clean and clean[key] != w:
                raise ValueError(f"conflicting weights for pair {key}")
            clean[key] = w
        object.__setattr__(self, "weights", clean)

    def __len__(self) -> int:
        return len(self.weights)

    def __contains__(self, key) -> bool:
        return pair(*key) in self.weights

    def weight(self, i: int, j: int) -> Fraction:
        return self.weights[pair(i, j)]

    @cached_property
    def neighbors(self) -> tuple[frozenset[int], ...]:
        adj: list[set[int]] = [set() for _ in range(self.n + 1)]
        for i, j in self.weights:
            adj[i].add(j)
            adj[j].add(i)
        return tuple(frozenset(a) for a in adj)

    @cached_property
    def scale(self) -> int:
        return lcm_of_denominators(self.weights.values())

    @cached_property
    def scaled_arrays(self) -> tuple[np.ndarray, np.ndarray, list[int]]:
        """Edge endpoints (1-based) and integer weights ``w * scale``."""
        s = self.scale
        keys = list(self.weights)
        lo = np.fromiter((k[0] for k in keys), dtype=np.int64, count=len(keys))
        hi = np.fromiter((k[1] for k in keys), dtype=np.int64, count=len(keys))
        w = [v.numerator * (s // v.denominator) for v in self.weights.values()]
        return lo, hi, w

    @cached_property
    def scaled_adjacency(self) -> list[list[tuple[int, int]]]:
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n + 1)]
        lo, hi, w = self.scaled_arrays
        for i, j, x in zip(lo.tolist(), hi.tolist(), w):
            adj[i].append((j, x))
            adj[j].append((i, x))
        return adj

    @cached_property
    def scaled_csr(self):
        """Symmetric CSR matrix of the scaled weights (row/col 0 unused)."""
        from scipy.sparse import csr_matrix

        lo, hi, w = self.scaled_arrays
        data = np.asarray(w, dtype=np.float64)
        rows = np.concatenate([lo, hi])
        cols = np.concatenate([hi, lo])
        return csr_matrix((np.concatenate([data, data]), (rows, cols)), shape=(self.n + 1, self.n + 1))

    def graph(self) -> "Graph":
        return Graph(self.n, self.neighbors)


class Graph:
    """Simple undirected graph on ``1..n``.  Immutable once built."""

    __slots__ = ("n", "_adj")

    def __init__(self, n: int, adjacency: Iterable[Iterable[int]] | None = None):
        self.n = n
        if adjacency is None:
            adj = [frozenset()] * (n + 1)
        else:
            adj = [frozenset(a) for a in adjacency]
            if len(adj) != n + 1:
                raise ValueError("adjacency must have n + 1 entries (index 0 unused)")
        self._adj = tuple(adj)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        adj: list[set[int]] = [set() for _ in range(n + 1)]
        for i, j in edges:
            _check_index(i, n)
            _check_index(j, n)
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            adj[i].add(j)
            adj[j].add(i)
        return cls(n, adj)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        full = frozenset(range(1, n + 1))
        return cls(n, [frozenset()] + [full - {v} for v in range(1, n + 1)])

    def neighbors(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, i: int, j: int) -> bool:
        return j in self._adj[i]

    def vertices(self) -> range:
        return range(1, self.n + 1)

    def edges(self) -> Iterator[tuple[int, int]]:
        for i in range(1, self.n + 1):
            for j in self._adj[i]:
                if i < j:
                    yield (i, j)

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self._adj) // 2

    def induced_adjacency(self, keep: Iterable[int]) -> list[frozenset[int]]:
        """Adjacency of the induced subgraph, still indexed by original labels."""
        keep = frozenset(keep)
        return [self._adj[v] & keep if v in keep else frozenset() for v in range(self.n + 1)]

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self._adj == other._adj

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges})"


def common_neighbors(g: Graph, i: int, j: int) -> set[int]:
    _check_index(i, g.n)
    _check_index(j, g.n)
    if i == j:
        raise ValueError("common_neighbors needs two distinct vertices")
    return set(g.neighbors(i) & g.neighbors(j)) - {i, j}


def make_rng(seed) -> np.random.Generator:
    """Seeded PCG64 generator; ``seed`` may be an int or a tuple of ints."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_pair_indices(n: int, p: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """G(n, p) edge sample via geometric skipping over the pair enumeration.

    Returns 1-based endpoint arrays ``(lo, hi)`` with ``lo < hi``.
    """
    total = n * (n - 1) // 2
    if p <= 0 or total == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    if p >= 1:
        idx = np.arange(total, dtype=np.int64)
    else:
        chunks = []
        pos = -1
        expect = int(total * p + 6 * math.sqrt(total * p) + 16)
        while True:
            # clip so tiny p cannot overflow the running sum
            gaps = np.minimum(rng.geometric(p, size=expect), total + 1)
            steps = pos + np.cumsum(gaps, dtype=np.int64)
            inside = steps[steps < total]
            chunks.append(inside)
            if len(inside) < len(steps):
                break
            pos = int(steps[-1])
        idx = np.concatenate(chunks)
    # row i (0-based) starts at offset i*(2n - i - 1)/2
    rows = np.arange(n, dtype=np.int64)
    offsets = rows * (2 * n - rows - 1) // 2
    i0 = np.searchsorted(offsets, idx, side="right") - 1
    j0 = idx - offsets[i0] + i0 + 1
    return i0 + 1, j0 + 1


def sample_measurements(cfg: PointConfig, p, seed=DEFAULT_SEED) -> MeasurementSet:
    """Reveal each pairwise distance independently with probability ``p``."""
    p = float(p)
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    lo, hi = sample_pair_indices(cfg.n, p, make_rng(seed))
    return measurements_from_pairs(cfg, zip(lo.tolist(), hi.tolist()))


def measurements_from_pairs(cfg: PointConfig, pairs: Iterable[tuple[int, int]]) -> MeasurementSet:
    pos = cfg.scaled_positions
    s = cfg.scale
    weights = {}
    if cfg.space is Space.LINE:
        for i, j in pairs:
            weights[pair(i, j)] = Fraction(abs(pos[i - 1] - pos[j - 1]), s)
    else:
        for i, j in pairs:
            gap = abs(pos[i - 1] - pos[j - 1])
            weights[pair(i, j)] = Fraction(min(gap, s - gap), s)
    return MeasurementSet(cfg.n, weights)
