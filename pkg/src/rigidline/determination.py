"""Local determination of distances from common witnesses, and the closure.

A distance on the line is fixed by any 3 common witnesses; on the unit circle
by any 5.  Both determiners look at ``f(z) = |d(i,z) - d(z,j)|``: it never
exceeds ``d(i,j)`` and takes every smaller value at only a bounded number of
places, so a witness achieving the minimum (when not all values agree) lies on
the short arc or segment between ``i`` and ``j`` (or antipodal to it).
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .core import Graph, MeasurementSet, Space


class WitnessTriple(NamedTuple):
    z: int
    d_iz: Fraction
    d_zj: Fraction


class InconsistentInput(ValueError):
    """The measurements are not realizable: two determinations disagree."""

    def __init__(self, pair: tuple[int, int], detail: str = ""):
        self.pair = pair
        msg = f"inconsistent measurements at pair {pair}"
        super().__init__(f"{msg}: {detail}" if detail else msg)


def _validated(witnesses: Sequence[WitnessTriple], circle: bool) -> list[WitnessTriple]:
    ws = sorted((WitnessTriple(*w) for w in witnesses), key=lambda w: w.z)
    for prev, cur in zip(ws, ws[1:]):
        if prev.z == cur.z:
            raise ValueError(f"duplicate witness {cur.z}")
    for w in ws:
        if w.d_iz <= 0 or w.d_zj <= 0:
            raise ValueError(f"witness {w.z} has a non-positive distance")
        if circle and (w.d_iz > Fraction(1, 2) or w.d_zj > Fraction(1, 2)):
            raise ValueError(f"witness {w.z} has a distance above 1/2 on the unit circle")
    return ws


def _resolve(a: Sequence, b: Sequence, unit=None):
    """Core rule on parallel sequences of witness distances (sorted by witness).

    ``unit`` is the circumference for the circle rule, ``None`` for the line.
    Works for any exact number type.
    """
    f = [abs(x - y) for x, y in zip(a, b)]
    lo = min(f)
    if lo == max(f):
        return lo
    k = f.index(lo)
    s = a[k] + b[k]
    if unit is not None and 2 * s >= unit:
        return unit - s
    return s


def determine_line(witnesses: Sequence[WitnessTriple]) -> Fraction | None:
    """Distance between ``i`` and ``j`` on the line, or ``None`` with < 3 witnesses."""
    ws = _validated(witnesses, circle=False)
    if len(ws) < Space.LINE.locality:
        return None
    return _resolve([w.d_iz for w in ws], [w.d_zj for w in ws])


def determine_circle(witnesses: Sequence[WitnessTriple]) -> Fraction | None:
    """Distance on the circumference-1 circle, or ``None`` with < 5 witnesses.

    With more than five witnesses the "all values equal" branch still requires
    every witness to agree.
    """
    ws = _validated(witnesses, circle=True)
    if len(ws) < Space.CIRCLE.locality:
        return None
    return _resolve([w.d_iz for w in ws], [w.d_zj for w in ws], unit=Fraction(1))


def _first_incompatible(d, zs, a, b, unit):
    """First witness whose distances rule out ``d(i,j) = d``, or ``None``.

    On the line a witness allows ``|a-b|`` or ``a+b``; on the circle ``|a-b|``
    or the shorter way round ``a+b``.
    """
    for z, x, y in zip(zs, a, b):
        s = x + y
        if unit is not None and 2 * s > unit:
            s = unit - s
        if d != s and d != abs(x - y):
            return z
    return None


def _resolve_dense(a: np.ndarray, b: np.ndarray, zs: np.ndarray, unit):
    """Vectorized ``_resolve`` plus compatibility check on int64 arrays."""
    f = np.abs(a - b)
    lo = int(f.min())
    if lo == int(f.max()):
        d = lo
    else:
        k = int(np.argmin(f))
        d = int(a[k] + b[k])
        if unit is not None and 2 * d >= unit:
            d = unit - d
    s = a + b
    if unit is not None:
        s = np.where(2 * s > unit, unit - s, s)
    bad = (s != d) & (f != d)
    return d, (int(zs[int(np.argmax(bad))]) if bad.any() else None)


# dense int64 bookkeeping pays off only for large witness sets
_DENSE_MAX_N = 4000
_DENSE_MIN_WITNESSES = 48


@dataclass(frozen=True)
class DeterminedGraph:
    """Base measurements plus every pair derivable from them by local rules."""

    base: MeasurementSet
    space: Space
    determined: dict[tuple[int, int], Fraction]

    @property
    def n(self) -> int:
        return self.base.n

    def added(self) -> dict[tuple[int, int], Fraction]:
        return {k: v for k, v in self.determined.items() if k not in self.base.weights}

    def graph(self) -> Graph:
        return Graph.from_edges(self.n, self.determined)

    def as_measurements(self) -> MeasurementSet:
        return MeasurementSet(self.n, self.determined)


def closure(m: MeasurementSet, space: Space = Space.LINE, schedule_seed: int | None = None) -> DeterminedGraph:
    """Least fixpoint of the local determination rule over ``m``.

    ``schedule_seed`` shuffles the worklist and, when odd, processes it
    last-in-first-out; the result does not depend on it for realizable input.
    Raises :class:`InconsistentInput` when a witness contradicts a determined
    value.
    """
    space = Space(space)
    k = space.locality
    n = m.n
    scale = m.scale
    unit = scale if space is Space.CIRCLE else None
    if unit is not None:
        for key, w in m.weights.items():
            if w > Fraction(1, 2):
                raise InconsistentInput(key, "circle distance above 1/2")
    lo, hi, wl = m.scaled_arrays
    W: list[dict[int, int]] = [{} for _ in range(n + 1)]
    for i, j, x in zip(lo.tolist(), hi.tolist(), wl):
        W[i][j] = x
        W[j][i] = x
    adj: list[set[int]] = [set(a) for a in m.neighbors]
    top = max(wl, default=0)
    dense = n <= _DENSE_MAX_N and 4 * max(top, unit or 0) < 2**62
    if dense:
        Wm = np.zeros((n + 1, n + 1), dtype=np.int64)
        Am = np.zeros((n + 1, n + 1), dtype=bool)
        Wm[lo, hi] = Wm[hi, lo] = np.asarray(wl, dtype=np.int64)
        Am[lo, hi] = Am[hi, lo] = True

    initial = []
    for i in range(1, n + 1):
        adj_i = adj[i]
        if sum(len(adj[w]) for w in adj_i) < n:
            cand = set()
            for w in adj_i:
                cand |= adj[w]
            cand = sorted(j for j in cand if j > i)
        else:
            cand = range(i + 1, n + 1)
        for j in cand:
            if j not in adj_i and len(adj_i & adj[j]) >= k:
                initial.append((i, j))
    if schedule_seed is not None:
        random.Random(schedule_seed).shuffle(initial)
    work = deque(initial)
    queued = set(initial)
    take = work.pop if schedule_seed is not None and schedule_seed % 2 else work.popleft

    new: dict[tuple[int, int], int] = {}
    while work:
        i, j = take()
        queued.discard((i, j))
        if j in adj[i]:
            continue
        common = adj[i] & adj[j]
        if len(common) < k:
            continue
        Wi, Wj = W[i], W[j]
        if dense and len(common) >= _DENSE_MIN_WITNESSES:
            zs = np.flatnonzero(Am[i] & Am[j])
            d, bad = _resolve_dense(Wm[i, zs], Wm[j, zs], zs, unit)
        else:
            zs = sorted(common)
            a = [Wi[z] for z in zs]
            b = [Wj[z] for z in zs]
            d = _resolve(a, b, unit)
            bad = _first_incompatible(d, zs, a, b, unit)
        if d <= 0:
            raise InconsistentInput((i, j), "determined distance is not positive")
        if bad is not None:
            raise InconsistentInput((i, j), f"witness {bad} contradicts the determined value")
        Wi[j] = d
        Wj[i] = d
        if dense:
            Wm[i, j] = Wm[j, i] = d
            Am[i, j] = Am[j, i] = True
        new[(i, j)] = d
        adj[i].add(j)
        adj[j].add(i)
        for u, v in ((i, j), (j, i)):
            for w in adj[v] - adj[u]:
                if w != u:
                    key = (u, w) if u < w else (w, u)
                    if key not in queued:
                        queued.add(key)
                        work.append(key)

    determined = dict(m.weights)
    for key, d in new.items():
        determined[key] = Fraction(d, scale)
    return DeterminedGraph(m, space, determined)
