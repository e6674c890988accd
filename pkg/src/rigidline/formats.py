"""Plain-text file formats (all vertex labels 1-based).

measurements   ``n m`` then ``m`` lines ``i j d``
config         ``space n`` then ``n`` lines ``i x``
edge list      ``n m`` then ``m`` lines ``i j``
full table     ``n`` then ``n(n-1)/2`` lines ``i j d``
certificate    sections PRUNED / IS / BSETS / CLIQUE
ambiguity      sections [R1] / [R2] (full tables) and [P] (edge list)
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .cliques import CliqueCertificate
from .constructions import AmbiguityInstance
from .core import Graph, MeasurementSet, PointConfig, Space, format_scalar, pair, to_scalar


class FormatError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno is not None else message)


def _lines(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            out.append((no, body.split()))
    return out


def _int(tok: str, no: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"expected an integer, got {tok!r}", no) from None


def _scalar(tok: str, no: int) -> Fraction:
    try:
        return to_scalar(tok)
    except ValueError:
        raise FormatError(f"expected a decimal or a/b rational, got {tok!r}", no) from None


def _header(rows, width: int, what: str) -> tuple[int, list[str]]:
    if not rows:
        raise FormatError(f"empty {what} file", 1)
    no, toks = rows[0]
    if len(toks) != width:
        raise FormatError(f"{what} header needs {width} fields", no)
    return no, toks


def _vertex(tok: str, n: int, no: int) -> int:
    v = _int(tok, no)
    if not 1 <= v <= n:
        raise FormatError(f"vertex {v} outside 1..{n}", no)
    return v


def _weighted_rows(rows, n: int, expect: int, what: str) -> dict[tuple[int, int], Fraction]:
    body = rows[1:]
    if len(body) != expect:
        last = body[-1][0] if body else rows[0][0]
        raise FormatError(f"{what}: header promises {expect} rows, found {len(body)}", last)
    weights: dict[tuple[int, int], Fraction] = {}
    for no, toks in body:
        if len(toks) != 3:
            raise FormatError("expected 'i j d'", no)
        i, j = _vertex(toks[0], n, no), _vertex(toks[1], n, no)
        if i == j:
            raise FormatError("self-loop", no)
        d = _scalar(toks[2], no)
        if d < 0:
            raise FormatError("negative distance", no)
        key = pair(i, j)
        if key in weights:
            raise FormatError(f"pair {key} listed twice", no)
        weights[key] = d
    return weights


def parse_measurements(text: str) -> MeasurementSet:
    rows = _lines(text)
    no, toks = _header(rows, 2, "measurement")
    n, m = _int(toks[0], no), _int(toks[1], no)
    return MeasurementSet(n, _weighted_rows(rows, n, m, "measurement"))


def format_measurements(m: MeasurementSet | tuple[int, Mapping]) -> str:
    n, weights = (m.n, m.weights) if isinstance(m, MeasurementSet) else m
    lines = [f"{n} {len(weights)}"]
    lines += [f"{i} {j} {format_scalar(d)}" for (i, j), d in sorted(weights.items())]
    return "\n".join(lines) + "\n"


def parse_full_table(text: str) -> tuple[int, dict[tuple[int, int], Fraction]]:
    rows = _lines(text)
    no, toks = _header(rows, 1, "distance table")
    n = _int(toks[0], no)
    return n, _weighted_rows(rows, n, n * (n - 1) // 2, "distance table")


def format_full_table(n: int, table: Mapping[tuple[int, int], Fraction]) -> str:
    lines = [str(n)] + [f"{i} {j} {format_scalar(d)}" for (i, j), d in sorted(table.items())]
    return "\n".join(lines) + "\n"


def parse_config(text: str) -> PointConfig:
    rows = _lines(text)
    no, toks = _header(rows, 2, "config")
    try:
        space = Space(toks[0].lower())
    except ValueError:
        raise FormatError(f"unknown space {toks[0]!r}", no) from None
    n = _int(toks[1], no)
    body = rows[1:]
    if len(body) != n:
        raise FormatError(f"config header promises {n} points, found {len(body)}", body[-1][0] if body else no)
    pos: dict[int, Fraction] = {}
    for no, toks in body:
        if len(toks) != 2:
            raise FormatError("expected 'i x'", no)
        v = _vertex(toks[0], n, no)
        if v in pos:
            raise FormatError(f"point {v} listed twice", no)
        pos[v] = _scalar(toks[1], no)
    try:
        return PointConfig(space, tuple(pos[v] for v in range(1, n + 1)))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def format_config(cfg: PointConfig) -> str:
    return format_positions(cfg.space, dict(enumerate(cfg.positions, start=1)))


def format_positions(space: Space, positions: Mapping[int, Fraction]) -> str:
    lines = [f"{space.value} {len(positions)}"]
    lines += [f"{v} {format_scalar(x)}" for v, x in sorted(positions.items())]
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Graph:
    rows = _lines(text)
    no, toks = _header(rows, 2, "edge list")
    n, m = _int(toks[0], no), _int(toks[1], no)
    body = rows[1:]
    if len(body) != m:
        raise FormatError(f"edge list header promises {m} edges, found {len(body)}", body[-1][0] if body else no)
    edges = []
    for no, toks in body:
        if len(toks) != 2:
            raise FormatError("expected 'i j'", no)
        i, j = _vertex(toks[0], n, no), _vertex(toks[1], n, no)
        if i == j:
            raise FormatError("self-loop", no)
        edges.append((i, j))
    return Graph.from_edges(n, edges)


def format_edge_list(g: Graph) -> str:
    edges = sorted(g.edges())
    return "\n".join([f"{g.n} {len(edges)}"] + [f"{i} {j}" for i, j in edges]) + "\n"


def _ints(vs: Iterable[int]) -> str:
    return " ".join(str(v) for v in sorted(vs))


def format_certificate(cert: CliqueCertificate) -> str:
    lines = [f"K {cert.k}", f"MIN_DEGREE {cert.min_degree}", "PRUNED", _ints(cert.pruned_vertices), "IS", _ints(cert.independent_set), "BSETS"]
    lines += [f"{s}: {_ints(b)}".rstrip() for s, b in sorted(cert.b_sets.items())]
    lines += ["CLIQUE", _ints(cert.clique)]
    return "\n".join(lines) + "\n"


def parse_certificate(text: str) -> CliqueCertificate:
    raw = text.splitlines()
    fields: dict[str, list[str]] = {}
    current = None
    scalars = {}
    for no, line in enumerate(raw, start=1):
        stripped = line.strip()
        if stripped in ("PRUNED", "IS", "BSETS", "CLIQUE"):
            current = stripped
            fields[current] = []
        elif stripped.startswith(("K ", "MIN_DEGREE ")) and current is None:
            key, val = stripped.split()
            scalars[key] = _int(val, no)
        elif current is not None:
            fields[current].append(line)
        elif stripped:
            raise FormatError("text before the first section", no)
    for name in ("PRUNED", "IS", "BSETS", "CLIQUE"):
        if name not in fields:
            raise FormatError(f"missing section {name}")

    def ints(lines):
        return [int(t) for ln in lines for t in ln.split()]

    bsets = {}
    for line in fields["BSETS"]:
        if line.strip():
            head, _, tail = line.partition(":")
            bsets[int(head)] = frozenset(int(t) for t in tail.split())
    return CliqueCertificate(
        pruned_vertices=frozenset(ints(fields["PRUNED"])),
        min_degree=scalars.get("MIN_DEGREE", 0),
        independent_set=ints(fields["IS"]),
        b_sets=bsets,
        clique=frozenset(ints(fields["CLIQUE"])),
        k=scalars.get("K", 0),
    )


def format_ambiguity(inst: AmbiguityInstance) -> str:
    n = inst.points
    parts = ["[R1]", format_full_table(n, inst.r1), "[R2]", format_full_table(n, inst.r2), "[P]"]
    parts.append(format_edge_list(Graph.from_edges(n, inst.measured)))
    return "\n".join(p.rstrip("\n") for p in parts) + "\n"


def parse_ambiguity(text: str) -> AmbiguityInstance:
    sections: dict[str, list[str]] = {}
    current = None
    for line in text.splitlines():
        s = line.strip()
        if s in ("[R1]", "[R2]", "[P]"):
            current = s
            sections[current] = []
        elif current is not None:
            sections[current].append(line)
    if set(sections) != {"[R1]", "[R2]", "[P]"}:
        raise FormatError("ambiguity file needs [R1], [R2] and [P] sections")
    n, r1 = parse_full_table("\n".join(sections["[R1]"]))
    _, r2 = parse_full_table("\n".join(sections["[R2]"]))
    g = parse_edge_list("\n".join(sections["[P]"]))
    as_int = lambda t: {k: int(v) for k, v in t.items()}  # noqa: E731
    return AmbiguityInstance(n // 2, as_int(r1), as_int(r2), frozenset(g.edges()))
