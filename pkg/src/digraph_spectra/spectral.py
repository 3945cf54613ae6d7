"""The A_alpha matrix of a digraph and the spectral quantities derived from it."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .alpha import Alpha, AlphaLike, as_alpha
from .digraph import Digraph, closed_walks_2, degree_profile, strong_components, zagreb_index
from .eigensolver import EigensolverError, eigen_residual, eigvals

RESIDUAL_SCALE = 1e-9
NORMALITY_SCALE = 1e-9
# eigenpairs whose residual is recomputed after every solve
RESIDUAL_SPOT_CHECKS = 3


@dataclass(frozen=True, eq=False)
class AlphaMatrix:
    alpha: Alpha
    entries: np.ndarray
    source: Digraph

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues (near-real values snapped to the real axis) plus tolerance.

    ``max_residual`` is the largest recomputed ``min ||(A - lam I) v||`` over
    the spot-checked eigenvalues, or ``None`` when no check ran.
    """

    eigenvalues: np.ndarray
    residual_tol: float
    max_residual: float | None = None

    @property
    def real(self) -> np.ndarray:
        return self.eigenvalues.real

    @property
    def imag(self) -> np.ndarray:
        return self.eigenvalues.imag

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def sorted(self) -> np.ndarray:
        ev = self.eigenvalues
        order = np.lexsort((-ev.imag, -ev.real, -np.abs(ev)))
        return ev[order]

    def to_json(self) -> dict:
        # 0.0 + x turns -0.0 into 0.0 so the document is byte-stable
        pairs = [[0.0 + float(z.real), 0.0 + float(z.imag)] for z in self.sorted()]
        return {"eigenvalues": pairs, "residual_tol": self.residual_tol}

    @classmethod
    def from_json(cls, doc: dict | str) -> "Spectrum":
        if isinstance(doc, str):
            doc = json.loads(doc)
        ev = np.array([complex(re, im) for re, im in doc["eigenvalues"]], dtype=complex)
        return cls(ev, float(doc["residual_tol"]))


@dataclass(frozen=True)
class NormalityVerdict:
    algebraic: bool
    topological: bool | None
    max_commutator_entry: float
    witness: tuple | None = None
    exact: bool = False


def build_alpha_matrix(g: Digraph, alpha: AlphaLike) -> AlphaMatrix:
    """``alpha * Deg + (1 - alpha) * A`` with Deg the diagonal of out-degrees."""
    a = as_alpha(alpha)
    entries = (1.0 - a.value) * g.adjacency_matrix()
    out_deg = np.array(degree_profile(g).out_degrees, dtype=float)
    entries[np.diag_indices(g.n)] = a.value * out_deg
    entries.setflags(write=False)
    return AlphaMatrix(a, entries, g)


def frobenius_norm(mat: AlphaMatrix) -> float:
    return float(np.sqrt(np.sum(mat.entries * mat.entries)))


def default_residual_tol(mat: AlphaMatrix) -> float:
    return RESIDUAL_SCALE * mat.n * frobenius_norm(mat)


def default_normality_tol(mat: AlphaMatrix) -> float:
    fro = frobenius_norm(mat)
    return NORMALITY_SCALE * (1.0 + fro * fro)


def eigenvalues(
    mat: AlphaMatrix,
    method: str = "lapack",
    residual_tol: float | None = None,
    check: bool = True,
) -> Spectrum:
    """Full complex spectrum of an A_alpha matrix.

    The matrix is split along the strong components of its digraph, each
    block is solved, and ``RESIDUAL_SPOT_CHECKS`` eigenvalues (largest and
    smallest modulus, plus one in between) get their backward residual
    recomputed. Values with ``|Im| <= residual_tol`` are snapped to the real
    axis. Raises :class:`EigensolverError` on non-convergence, on a residual
    above ``residual_tol``, or when no real eigenvalue attains the spectral
    radius.
    """
    if mat.n < 1:
        raise ValueError("eigenvalues need n >= 1")
    tol = default_residual_tol(mat) if residual_tol is None else float(residual_tol)
    raw = eigvals(mat.entries, method=method, blocks=strong_components(mat.source))
    max_res = None
    if check:
        max_res = 0.0
        for idx in _spot_check_indices(raw):
            res = eigen_residual(mat.entries, raw[idx])
            max_res = max(max_res, res)
            if res > tol:
                raise EigensolverError(
                    f"eigenvalue {raw[idx]:.6g} has residual {res:.3g} above tolerance {tol:.3g}",
                    np.array(mat.entries),
                )
    snapped = raw.copy()
    near_real = np.abs(snapped.imag) <= tol
    snapped[near_real] = snapped[near_real].real
    spec = Spectrum(snapped, tol, max_res)
    if check:
        rho = spectral_radius(spec)
        real_vals = snapped.real[snapped.imag == 0]
        if real_vals.size == 0 or np.max(real_vals) < rho - tol:
            raise EigensolverError(
                f"no real non-negative eigenvalue attains the spectral radius {rho:.6g}",
                np.array(mat.entries),
            )
    return spec


def _spot_check_indices(vals: np.ndarray) -> list[int]:
    if vals.size == 0:
        return []
    order = np.argsort(-np.abs(vals), kind="stable")
    picks = [order[0], order[-1], order[len(order) // 2]]
    return sorted(set(int(i) for i in picks))[:RESIDUAL_SPOT_CHECKS]


def spectral_radius(spec: Spectrum) -> float:
    if len(spec) == 0:
        raise ValueError("spectral radius of an empty spectrum")
    return float(np.max(np.abs(spec.eigenvalues)))


def low_energy(spec: Spectrum) -> float:
    """Sum of the absolute real parts of the eigenvalues."""
    if len(spec) == 0:
        raise ValueError("low energy of an empty spectrum")
    return math.fsum(np.abs(spec.real))


def perron_root(spec: Spectrum) -> float:
    """The real eigenvalue closest to the spectral radius."""
    rho = spectral_radius(spec)
    reals = spec.real[spec.imag == 0]
    if reals.size == 0:
        return rho
    return float(reals[np.argmin(np.abs(reals - rho))])


def spectral_moments(mat: AlphaMatrix) -> tuple[float, float]:
    """First and second spectral moments ``(tr M, tr M^2)`` from the entries."""
    e = mat.entries
    m1 = math.fsum(np.diag(e))
    # tr(M^2) = sum_ij M_ij M_ji
    m2 = math.fsum((e * e.T).ravel())
    return m1, m2


def exact_moments(g: Digraph, alpha: AlphaLike) -> tuple[Fraction, Fraction]:
    """Combinatorial moments ``(alpha m, alpha^2 Z + (1-alpha)^2 c2)`` in exact arithmetic."""
    a = as_alpha(alpha)
    x = a.exact if a.is_exact else Fraction(a.value)
    return x * g.m, x * x * zagreb_index(g) + (1 - x) ** 2 * closed_walks_2(g)


def commutator(mat: AlphaMatrix) -> np.ndarray:
    e = mat.entries
    return e @ e.T - e.T @ e


def is_normal_algebraic(mat: AlphaMatrix, tol: float | None = None) -> tuple[bool, float]:
    if tol is None:
        tol = default_normality_tol(mat)
    if tol <= 0:
        raise ValueError("normality tolerance must be positive")
    worst = float(np.max(np.abs(commutator(mat)), initial=0.0))
    return worst <= tol, worst


def is_normal_topological(g: Digraph, alpha: AlphaLike, tol: float | None = None) -> NormalityVerdict:
    """Decide normality of A_alpha from degrees and common neighbourhoods.

    A_alpha is normal exactly when every vertex has equal in- and out-degree
    and, for every pair u != v,

        (1 - alpha) * delta_uv == alpha * Delta_uv * sigma_uv

    where delta_uv is (common out-neighbours) - (common in-neighbours),
    Delta_uv = d+(u) - d+(v) and sigma_uv = A_uv - A_vu. With an exact
    rational alpha the pairwise test is done in integers: writing
    alpha / (1 - alpha) = P/Q in lowest terms, a pair with sigma != 0 needs
    an integer k with Q*sigma*k = Delta and P*k = delta, and a pair with
    sigma == 0 needs delta == 0. A floating alpha evaluates the scaled
    residual (1-alpha)^2 delta - alpha (1-alpha) Delta sigma, i.e. the exact
    commutator entry, against the normality tolerance.

    The algebraic verdict is computed independently from the matrix and
    stored alongside for comparison.
    """
    a = as_alpha(alpha)
    if a.is_one():
        raise ValueError("the topological normality criterion needs alpha < 1")
    mat = build_alpha_matrix(g, a)
    if tol is None:
        tol = default_normality_tol(mat)
    algebraic, worst = is_normal_algebraic(mat, tol)

    prof = degree_profile(g)
    dout, din = prof.out_degrees, prof.in_degrees
    beta = 1.0 - a.value
    witness = None
    for u in range(g.n):
        imbalance = dout[u] - din[u]
        if imbalance != 0 and (a.is_exact or beta * beta * abs(imbalance) > tol):
            witness = ("degree", u)
            break

    if witness is None:
        out_bits = [_bitmask(nb) for nb in g.out_adj]
        in_bits = [_bitmask(nb) for nb in g.in_adj]
        if a.is_exact:
            ratio = a.exact / (1 - a.exact)
            P, Q = ratio.numerator, ratio.denominator
        for u in range(g.n):
            for v in range(u + 1, g.n):
                delta = (out_bits[u] & out_bits[v]).bit_count() - (in_bits[u] & in_bits[v]).bit_count()
                Delta = dout[u] - dout[v]
                sigma = int(g.has_arc(u, v)) - int(g.has_arc(v, u))
                if a.is_exact:
                    ok = _pair_condition_exact(delta, Delta, sigma, P, Q)
                else:
                    ok = abs(beta * beta * delta - a.value * beta * Delta * sigma) <= tol
                if not ok:
                    witness = ("pair", u, v)
                    break
            if witness is not None:
                break

    return NormalityVerdict(
        algebraic=algebraic,
        topological=witness is None,
        max_commutator_entry=worst,
        witness=witness,
        exact=a.is_exact,
    )


def _pair_condition_exact(delta: int, Delta: int, sigma: int, P: int, Q: int) -> bool:
    if sigma == 0:
        return delta == 0
    num = Delta * sigma  # sigma is +-1, so Q*sigma*k = Delta  <=>  Q*k = Delta*sigma
    if num % Q:
        return False
    return P * (num // Q) == delta


def _bitmask(vertices) -> int:
    bits = 0
    for v in vertices:
        bits |= 1 << v
    return bits


def normality(g: Digraph, alpha: AlphaLike) -> NormalityVerdict:
    """Normality verdict valid on the whole of [0, 1].

    At alpha = 1 the matrix is the diagonal out-degree matrix; no
    topological criterion applies there, so only the algebraic verdict is
    reported and ``topological`` is ``None``.
    """
    a = as_alpha(alpha)
    if a.is_one():
        ok, worst = is_normal_algebraic(build_alpha_matrix(g, a))
        return NormalityVerdict(ok, None, worst, None, a.is_exact)
    return is_normal_topological(g, a)
