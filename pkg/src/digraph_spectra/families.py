"""Named digraph families and seeded random generators.

Randomness: every generator takes a 64-bit seed (or a ready
:class:`numpy.random.Generator`). Seeds feed NumPy's ``PCG64`` through a
``SeedSequence``; the child stream for sample ``i`` of an experiment run with
master seed ``s`` is ``SeedSequence(s, spawn_key=(i,))`` (see
:func:`child_rng`), which is independent of the order in which samples run.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .digraph import Digraph, DigraphError, strong_components

SeedLike = Union[int, np.random.Generator]

# random_k_regular retry budget
RESAMPLE_LIMIT = 100
RESTART_LIMIT = 100


class GeneratorError(RuntimeError):
    """A random generator exhausted its retry budget."""


def make_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def child_rng(master_seed: int, sample_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(sample_index),))
    return np.random.Generator(np.random.PCG64(ss))


# ---- deterministic families -------------------------------------------------

def empty(n: int) -> Digraph:
    return Digraph(n, ())


def complete_symmetric(n: int) -> Digraph:
    return Digraph(n, ((u, v) for u in range(n) for v in range(n) if u != v))


def complete_plus_isolated(k: int, n: int) -> Digraph:
    """Complete symmetric digraph on vertices ``0..k-1`` plus ``n-k`` isolated vertices."""
    if not 0 <= k <= n:
        raise DigraphError(f"need 0 <= k <= n, got k={k}, n={n}")
    return Digraph(n, ((u, v) for u in range(k) for v in range(k) if u != v))


def digon_chain(t: int, inter_arcs: Iterable[tuple[int, int]] = ()) -> Digraph:
    """``t`` digons on vertex pairs ``(2i, 2i+1)`` plus forward arcs between them.

    Every inter-digon arc must go from a lower-indexed digon to a higher one,
    so the digons stay the strong components.
    """
    if t < 1:
        raise DigraphError(f"need at least one digon, got t={t}")
    arcs = []
    for i in range(t):
        arcs += [(2 * i, 2 * i + 1), (2 * i + 1, 2 * i)]
    for u, v in inter_arcs:
        if not (0 <= u < 2 * t and 0 <= v < 2 * t):
            raise DigraphError(f"inter-digon arc ({u}, {v}) outside the {2 * t} vertices")
        if u // 2 == v // 2:
            raise DigraphError(f"arc ({u}, {v}) lies inside a single digon")
        if u // 2 > v // 2:
            raise DigraphError(f"arc ({u}, {v}) runs from a higher to a lower digon")
        arcs.append((u, v))
    return Digraph(2 * t, arcs)


def digon_union(t: int) -> Digraph:
    return digon_chain(t, ())


def directed_cycle(k: int) -> Digraph:
    if k < 2:
        raise DigraphError(f"a directed cycle needs k >= 2, got {k}")
    return Digraph(k, ((i, (i + 1) % k) for i in range(k)))


def complete_bipartite_symmetric(t: int) -> Digraph:
    """Both orientations of every edge of K_{t,t}; parts are ``0..t-1`` and ``t..2t-1``."""
    if t < 1:
        raise DigraphError(f"need t >= 1, got {t}")
    arcs = []
    for u in range(t):
        for v in range(t, 2 * t):
            arcs += [(u, v), (v, u)]
    return Digraph(2 * t, arcs)


def rotational_tournament(n: int) -> Digraph:
    """Circulant regular tournament ``i -> i + j (mod n)`` for ``j = 1..(n-1)/2``."""
    if n < 3 or n % 2 == 0:
        raise DigraphError(f"regular tournaments need odd n >= 3, got {n}")
    half = (n - 1) // 2
    return Digraph(n, ((i, (i + j) % n) for i in range(n) for j in range(1, half + 1)))


# ---- random families --------------------------------------------------------

@dataclass(frozen=True)
class CoreCompleteParams:
    n: int
    r: int
    beta: float
    extra_arcs: int = 0

    def __post_init__(self):
        if not 1 <= self.r <= self.n:
            raise ValueError(f"need 1 <= r <= n, got r={self.r}, n={self.n}")
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        if self.extra_arcs < 0:
            raise ValueError("extra_arcs must be non-negative")


def attachment_weights(r: int, beta: float) -> np.ndarray:
    """Truncated geometric law ``(1-beta) beta^(j-1) / (1 - beta^r)``, j = 1..r."""
    j = np.arange(r)
    w = (1.0 - beta) * beta**j / (1.0 - beta**r)
    return w / w.sum()


def core_complete_random(p: CoreCompleteParams, seed: SeedLike) -> Digraph:
    """Random core-complete digraph.

    Vertices ``0..r-1`` form a complete symmetric core (vertex ``j-1`` is the
    j-th core vertex of the attachment law). Each secondary vertex forms one
    digon with a core vertex drawn from :func:`attachment_weights`. Then
    ``extra_arcs`` further arcs are drawn uniformly without replacement from
    the absent ordered pairs that are not loops and not inside the core.
    """
    rng = make_rng(seed)
    n, r = p.n, p.r
    adj = np.zeros((n, n), dtype=bool)
    adj[:r, :r] = True
    np.fill_diagonal(adj, False)
    if n > r:
        targets = rng.choice(r, size=n - r, p=attachment_weights(r, p.beta))
        secondary = np.arange(r, n)
        adj[secondary, targets] = True
        adj[targets, secondary] = True
    if p.extra_arcs:
        allowed = ~adj
        allowed[:r, :r] = False
        np.fill_diagonal(allowed, False)
        candidates = np.flatnonzero(allowed.ravel())
        if p.extra_arcs > candidates.size:
            raise GeneratorError(
                f"extra_arcs={p.extra_arcs} exceeds the {candidates.size} available ordered pairs"
            )
        picks = rng.choice(candidates, size=p.extra_arcs, replace=False)
        adj.ravel()[picks] = True
    g = Digraph.from_adjacency(adj)
    if n and len(strong_components(g)) != 1:
        raise GeneratorError("core-complete digraph is not strongly connected")
    return g


def _repaired_permutation(taken: np.ndarray, rng: np.random.Generator) -> np.ndarray | None:
    """Random permutation avoiding fixed points and already-used arcs, or None.

    Starts from a uniform permutation and repairs conflicts by random
    transpositions that leave both touched positions valid. If the repair
    stalls, the valid part is kept and the rest is completed by augmenting
    paths.
    """
    n = taken.shape[0]
    idx = np.arange(n)
    perm = rng.permutation(n)
    for _ in range(50 * n):
        bad = np.flatnonzero((perm == idx) | taken[idx, perm])
        if bad.size == 0:
            return perm
        i = int(bad[rng.integers(bad.size)])
        j = int(rng.integers(n))
        pi, pj = perm[j], perm[i]
        if pi != i and not taken[i, pi] and pj != j and not taken[j, pj]:
            perm[i], perm[j] = pi, pj
    return _complete_matching(perm, taken, rng)


def _complete_matching(perm: np.ndarray, taken: np.ndarray, rng: np.random.Generator) -> np.ndarray | None:
    """Keep the valid assignments of ``perm`` and augment the rest (BFS, random order)."""
    n = taken.shape[0]
    allowed = ~taken
    np.fill_diagonal(allowed, False)
    row_of = np.full(n, -1)
    col_of = np.full(n, -1)
    for i in range(n):
        if allowed[i, perm[i]]:
            row_of[perm[i]] = i
            col_of[i] = perm[i]
    for free in rng.permutation(np.flatnonzero(col_of < 0)):
        parent = {}  # column -> row it was reached from
        frontier = [int(free)]
        end = -1
        while frontier and end < 0:
            nxt = []
            for r in frontier:
                for c in rng.permutation(np.flatnonzero(allowed[r])):
                    c = int(c)
                    if c in parent:
                        continue
                    parent[c] = r
                    if row_of[c] < 0:
                        end = c
                        break
                    nxt.append(int(row_of[c]))
                if end >= 0:
                    break
            frontier = nxt
        if end < 0:
            return None
        c = end
        while True:
            r = parent[c]
            prev = col_of[r]
            row_of[c], col_of[r] = r, c
            if r == free:
                break
            c = int(prev)
    return col_of


def random_k_regular(n: int, k: int, seed: SeedLike) -> Digraph:
    """Random simple digraph with every in- and out-degree equal to ``k``.

    Superposes ``k`` random permutations, each repaired to avoid fixed points
    and arcs already placed. The allowed pairs always form a regular bipartite
    graph, so the augmenting-path completion cannot fail in exact arithmetic;
    the budgets below are a guard. A permutation that cannot be completed is
    resampled;
    after ``RESAMPLE_LIMIT`` failed resamples the whole construction restarts,
    and after ``RESTART_LIMIT`` restarts :class:`GeneratorError` is raised.
    """
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got n={n}, k={k}")
    rng = make_rng(seed)
    rows = np.arange(n)
    for _ in range(RESTART_LIMIT):
        taken = np.zeros((n, n), dtype=bool)
        for _layer in range(k):
            for _attempt in range(RESAMPLE_LIMIT):
                perm = _repaired_permutation(taken, rng)
                if perm is not None:
                    taken[rows, perm] = True
                    break
            else:
                break
        else:
            return Digraph.from_adjacency(taken)
    raise GeneratorError(f"random_k_regular(n={n}, k={k}) failed after {RESTART_LIMIT} restarts")


def random_digraph(n: int, p_arc: float, seed: SeedLike) -> Digraph:
    if not 0.0 <= p_arc <= 1.0:
        raise ValueError(f"p_arc must lie in [0, 1], got {p_arc}")
    rng = make_rng(seed)
    adj = rng.random((n, n)) < p_arc
    np.fill_diagonal(adj, False)
    return Digraph.from_adjacency(adj)
