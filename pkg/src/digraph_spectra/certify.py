"""Invariant checks on single digraphs and exhaustive small-order certification."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterator

import numpy as np

from .alpha import AlphaLike, as_alpha
from .bounds import (
    BoundId,
    energy_upper_km,
    energy_upper_rho_free,
    equality_witness,
    numerically_equal,
    sr_lower_m2,
    sr_lower_trace,
    sr_upper_km,
)
from .digraph import Digraph, closed_walks_2, is_symmetric, zagreb_index
from .spectral import (
    build_alpha_matrix,
    eigenvalues,
    frobenius_norm,
    is_normal_algebraic,
    is_normal_topological,
    low_energy,
    spectral_radius,
)

MAX_SCOPE = 5
BASE_ALPHAS = (Fraction(0), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(3, 4))
BOUND_SLACK = 1e-7


def alpha_grid(scope: int) -> list[Fraction]:
    """The base grid plus ``1/k`` for every ``2 <= k <= scope`` not already in it."""
    grid = list(BASE_ALPHAS)
    for k in range(2, scope + 1):
        if Fraction(1, k) not in grid:
            grid.append(Fraction(1, k))
    return grid


def enumerate_digraphs(n: int) -> Iterator[Digraph]:
    """All ``2^(n(n-1))`` labelled loop-free digraphs on ``n`` vertices."""
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    for bits in product((False, True), repeat=len(pairs)):
        yield Digraph(n, [p for p, b in zip(pairs, bits) if b])


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


def check_invariants(g: Digraph, alpha: AlphaLike, method: str = "lapack") -> list[Check]:
    """Evaluate every spectral identity, bound and equality characterisation on one digraph."""
    a = as_alpha(alpha)
    mat = build_alpha_matrix(g, a)
    spec = eigenvalues(mat, method=method)
    n, m, Z, c2 = g.n, g.m, zagreb_index(g), closed_walks_2(g)
    fro = frobenius_norm(mat)
    x, y = spec.real, spec.imag
    rho = spectral_radius(spec)
    energy = low_energy(spec)
    checks = []

    def add(name, passed, detail=""):
        checks.append(Check(name, bool(passed), detail))

    trace_tol = 1e-7 * n * max(fro, 1.0)
    m2_tol = 1e-6 * n * max(fro * fro, 1.0)
    m1 = a.value * m
    m2 = a.value**2 * Z + (1 - a.value) ** 2 * c2
    add("trace-real", abs(math.fsum(x) - m1) <= trace_tol, f"sum Re={math.fsum(x)!r}, alpha*m={m1!r}")
    add("trace-imag", abs(math.fsum(y)) <= trace_tol, f"sum Im={math.fsum(y)!r}")
    add("second-moment", abs(math.fsum(x * x - y * y) - m2) <= m2_tol, f"sum(x^2-y^2)={math.fsum(x * x - y * y)!r}, M2={m2!r}")
    add("cross-moment", abs(math.fsum(x * y)) <= m2_tol, f"sum xy={math.fsum(x * y)!r}")
    sq = math.fsum(np.abs(spec.eigenvalues) ** 2)
    add("schur", sq <= fro * fro + BOUND_SLACK, f"sum|lam|^2={sq!r}, fro^2={fro * fro!r}")
    normal, _ = is_normal_algebraic(mat)
    schur_equal = abs(sq - fro * fro) <= 1e-6 * (1.0 + fro * fro)
    add("schur-equality-iff-normal", schur_equal == normal, f"schur equality={schur_equal}, normal={normal}")
    reals = x[y == 0]
    add("perron", reals.size > 0 and reals.max() >= rho - spec.residual_tol, f"rho={rho!r}")
    if is_symmetric(g):
        add("symmetric-real-spectrum", bool(np.all(y == 0)), f"max|Im|={np.abs(y).max()!r}")

    lower = max(sr_lower_trace(n, m, a), sr_lower_m2(n, Z, c2, a))
    add("sr-lower", lower <= rho + BOUND_SLACK, f"lower={lower!r}, rho={rho!r}")
    if not a.is_one():
        upper = sr_upper_km(n, m, Z, a)
        add("sr-upper", rho <= upper + BOUND_SLACK, f"rho={rho!r}, upper={upper!r}")
    e_km = energy_upper_km(n, m, Z, c2, a, rho)
    add("energy-km", energy <= e_km + BOUND_SLACK, f"E={energy!r}, bound={e_km!r}")
    if n > 1:
        e_free = energy_upper_rho_free(n, m, Z, c2, a)
        add("energy-chain", e_km <= e_free + BOUND_SLACK, f"km={e_km!r}, rho-free={e_free!r}")

    # structural verdicts against numeric equality
    pairs = [(BoundId.SR_LOWER_M2, sr_lower_m2(n, Z, c2, a), rho)]
    if not a.is_one():
        pairs.append((BoundId.SR_UPPER_KM, sr_upper_km(n, m, Z, a), rho))
    if n > 1:
        pairs.append((BoundId.E_RHO_FREE, energy_upper_rho_free(n, m, Z, c2, a), energy))
    for bid, value, exact in pairs:
        numeric = numerically_equal(value, exact)
        predicted = equality_witness(g, a, bid, spec).predicted
        add(f"equality-{bid.value}", numeric == predicted, f"numeric={numeric}, structural={predicted}")
    predicted = equality_witness(g, a, BoundId.SR_LOWER_TRACE, spec).predicted
    numeric = numerically_equal(sr_lower_trace(n, m, a), rho)
    add("equality-SR_LOWER_TRACE-sufficient", numeric or not predicted, f"numeric={numeric}, structural={predicted}")

    if not a.is_one():
        verdict = is_normal_topological(g, a)
        add("normality-equivalence", verdict.topological == verdict.algebraic,
            f"topological={verdict.topological}, algebraic={verdict.algebraic}, witness={verdict.witness}")
    return checks


@dataclass(frozen=True)
class Finding:
    check: str
    n: int
    arcs: tuple
    alpha: str
    detail: str


@dataclass
class CertificationResult:
    scope: int
    digraphs: int = 0
    alphas: list = field(default_factory=list)
    checks: int = 0
    failures: int = 0
    failures_by_check: dict = field(default_factory=dict)
    first_failure: Finding | None = None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def summary(self) -> str:
        lines = [
            f"scope n={self.scope}: {self.digraphs} digraphs x {len(self.alphas)} alphas "
            f"({', '.join(str(a) for a in self.alphas)})",
            f"{self.checks} checks, {self.failures} failures",
        ]
        for name, count in sorted(self.failures_by_check.items()):
            lines.append(f"  FAIL {name}: {count}")
        if self.first_failure is not None:
            f = self.first_failure
            lines.append(f"first counterexample: check={f.check} n={f.n} alpha={f.alpha} arcs={list(f.arcs)}")
            lines.append(f"  {f.detail}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def certify(scope: int = 4, method: str = "lapack") -> CertificationResult:
    """Run :func:`check_invariants` on every digraph of order ``scope``."""
    if not 1 <= scope <= MAX_SCOPE:
        raise ValueError(f"scope must lie in [1, {MAX_SCOPE}], got {scope}")
    grid = alpha_grid(scope)
    result = CertificationResult(scope=scope, alphas=grid)
    for g in enumerate_digraphs(scope):
        result.digraphs += 1
        for a in grid:
            for chk in check_invariants(g, a, method):
                result.checks += 1
                if chk.passed:
                    continue
                result.failures += 1
                result.failures_by_check[chk.name] = result.failures_by_check.get(chk.name, 0) + 1
                if result.first_failure is None:
                    result.first_failure = Finding(chk.name, g.n, tuple(g.sorted_arcs()), str(a), chk.detail)
    return result
