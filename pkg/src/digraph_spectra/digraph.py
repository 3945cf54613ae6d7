"""Simple (loop-free) digraphs and the combinatorial statistics used by the bounds.

Vertices are the contiguous integers ``0..n-1``; isolated vertices exist
implicitly whenever ``n`` exceeds the largest arc endpoint.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np


class DigraphError(ValueError):
    """Raised when a digraph would violate its structural invariants."""


class DigraphParseError(DigraphError):
    """Base class for edge-list parse failures; carries the 1-based line number."""

    kind = "parse"

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class MalformedLineError(DigraphParseError):
    kind = "malformed"


class SelfLoopError(DigraphParseError):
    kind = "self-loop"


class DuplicateArcError(DigraphParseError):
    kind = "duplicate-arc"


class VertexRangeError(DigraphParseError):
    kind = "vertex-range"


@dataclass(frozen=True, eq=False)
class Digraph:
    """Immutable simple digraph.

    ``arcs`` is the set of ordered pairs; ``out_adj``/``in_adj`` are sorted
    neighbour tuples built once at construction for deterministic iteration.
    """

    n: int
    arcs: frozenset
    out_adj: tuple = field(repr=False)
    in_adj: tuple = field(repr=False)

    def __init__(self, n: int, arcs: Iterable[tuple[int, int]] = ()):
        n = int(n)
        if n < 0:
            raise DigraphError(f"vertex count must be non-negative, got {n}")
        arc_list = [(int(u), int(v)) for u, v in arcs]
        arc_set = frozenset(arc_list)
        if len(arc_set) != len(arc_list):
            raise DigraphError("duplicate arcs")
        out_adj: list[list[int]] = [[] for _ in range(n)]
        in_adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in arc_set:
            if u == v:
                raise DigraphError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise DigraphError(f"arc ({u}, {v}) has an endpoint outside [0, {n})")
            out_adj[u].append(v)
            in_adj[v].append(u)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "arcs", arc_set)
        object.__setattr__(self, "out_adj", tuple(tuple(sorted(a)) for a in out_adj))
        object.__setattr__(self, "in_adj", tuple(tuple(sorted(a)) for a in in_adj))

    @classmethod
    def from_adjacency(cls, a) -> "Digraph":
        a = np.asarray(a)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DigraphError(f"adjacency matrix must be square, got shape {a.shape}")
        rows, cols = np.nonzero(a)
        return cls(a.shape[0], zip(rows.tolist(), cols.tolist()))

    @property
    def m(self) -> int:
        return len(self.arcs)

    def has_arc(self, u: int, v: int) -> bool:
        return (u, v) in self.arcs

    def sorted_arcs(self) -> list[tuple[int, int]]:
        return sorted(self.arcs)

    def adjacency_matrix(self, dtype=float) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=dtype)
        if self.arcs:
            rows, cols = zip(*self.arcs)
            a[list(rows), list(cols)] = 1
        return a

    def __eq__(self, other):
        if not isinstance(other, Digraph):
            return NotImplemented
        return self.n == other.n and self.arcs == other.arcs

    def __hash__(self):
        return hash((self.n, self.arcs))

    def __repr__(self):
        return f"Digraph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class DegreeProfile:
    out_degrees: tuple[int, ...]
    in_degrees: tuple[int, ...]


def degree_profile(g: Digraph) -> DegreeProfile:
    return DegreeProfile(
        out_degrees=tuple(len(a) for a in g.out_adj),
        in_degrees=tuple(len(a) for a in g.in_adj),
    )


def out_neighbors(g: Digraph, u: int) -> tuple[int, ...]:
    return g.out_adj[u]


def in_neighbors(g: Digraph, u: int) -> tuple[int, ...]:
    return g.in_adj[u]


def zagreb_index(g: Digraph) -> int:
    """First out-degree Zagreb index: sum of squared out-degrees."""
    return sum(len(a) ** 2 for a in g.out_adj)


def closed_walks_2(g: Digraph) -> int:
    """Number of closed walks of length 2, i.e. twice the number of digons."""
    return sum(1 for u, v in g.arcs if (v, u) in g.arcs)


def strong_components(g: Digraph) -> list[list[int]]:
    """Strongly connected components via an iterative Tarjan search.

    Components come out in reverse topological order of the condensation:
    every arc joining two different components points from a later-listed
    component to an earlier-listed one. Vertices inside a component are
    sorted, and the roots are visited in increasing vertex order, so the
    output is fully deterministic.
    """
    n = g.n
    index = [-1] * n
    lowlink = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    components: list[list[int]] = []
    counter = 0

    for root in range(n):
        if index[root] != -1:
            continue
        # frames of (vertex, position of the next out-neighbour to explore)
        work = [(root, 0)]
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, pos = work[-1]
            succ = g.out_adj[v]
            if pos < len(succ):
                work[-1] = (v, pos + 1)
                w = succ[pos]
                if index[w] == -1:
                    index[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    lowlink[v] = min(lowlink[v], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                components.append(sorted(comp))
    return components


def is_dag(g: Digraph) -> bool:
    # loops are impossible by construction, so singleton components suffice
    return all(len(c) == 1 for c in strong_components(g))


def is_symmetric(g: Digraph) -> bool:
    return all((v, u) in g.arcs for u, v in g.arcs)


def is_out_regular(g: Digraph) -> bool:
    return len({len(a) for a in g.out_adj}) <= 1


def is_in_out_balanced(g: Digraph) -> bool:
    return all(len(o) == len(i) for o, i in zip(g.out_adj, g.in_adj))


def common_neighbors(g: Digraph, u: int, v: int) -> tuple[int, int]:
    """Return ``(|N+(u) & N+(v)|, |N-(u) & N-(v)|)`` for distinct vertices."""
    for x in (u, v):
        if not 0 <= x < g.n:
            raise DigraphError(f"vertex {x} outside [0, {g.n})")
    if u == v:
        raise DigraphError("common_neighbors requires distinct vertices")
    out_common = len(set(g.out_adj[u]).intersection(g.out_adj[v]))
    in_common = len(set(g.in_adj[u]).intersection(g.in_adj[v]))
    return out_common, in_common


def disjoint_union(*graphs: Digraph) -> Digraph:
    arcs = []
    offset = 0
    for h in graphs:
        arcs.extend((u + offset, v + offset) for u, v in h.arcs)
        offset += h.n
    return Digraph(offset, arcs)


def parse_digraph(text: str) -> Digraph:
    """Parse the edge-list format: a header ``n m`` then ``m`` lines ``u v``.

    Blank lines are ignored. Each structural problem raises its own
    :class:`DigraphParseError` subclass with the offending line number.
    """
    lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines()) if ln.strip()]
    if not lines:
        raise MalformedLineError("missing header line 'n m'", line=1)
    header_no, header = lines[0]
    n, m = _parse_int_pair(header, header_no)
    if n < 0 or m < 0:
        raise MalformedLineError("header values must be non-negative", line=header_no)
    body = lines[1:]
    if len(body) != m:
        last = body[-1][0] if body else header_no
        raise MalformedLineError(f"header declares {m} arcs but {len(body)} arc lines follow", line=last)
    seen: set[tuple[int, int]] = set()
    for line_no, tokens in body:
        u, v = _parse_int_pair(tokens, line_no)
        if u == v:
            raise SelfLoopError(f"self-loop at vertex {u}", line=line_no)
        if not (0 <= u < n and 0 <= v < n):
            raise VertexRangeError(f"arc ({u}, {v}) has an endpoint outside [0, {n})", line=line_no)
        if (u, v) in seen:
            raise DuplicateArcError(f"duplicate arc ({u}, {v})", line=line_no)
        seen.add((u, v))
    return Digraph(n, seen)


def _parse_int_pair(tokens: list[str], line_no: int) -> tuple[int, int]:
    if len(tokens) != 2:
        raise MalformedLineError(f"expected two integers, got {' '.join(tokens)!r}", line=line_no)
    try:
        return int(tokens[0]), int(tokens[1])
    except ValueError:
        raise MalformedLineError(f"expected two integers, got {' '.join(tokens)!r}", line=line_no) from None


def serialize_digraph(g: Digraph) -> str:
    out = [f"{g.n} {g.m}"]
    out.extend(f"{u} {v}" for u, v in g.sorted_arcs())
    return "\n".join(out) + "\n"
