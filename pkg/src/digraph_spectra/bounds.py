"""Spectral-radius and low-energy bounds for A_alpha matrices of digraphs.

Every bound is a closed-form function of a few integer invariants: the
order ``n``, the arc count ``m``, the out-degree Zagreb index ``Z`` and the
number ``c2`` of closed 2-walks. Each bound's extremal digraphs can also be
checked structurally (:func:`equality_witness`) and compared with numeric
equality in a :class:`BoundReport`.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .alpha import Alpha, AlphaLike, as_alpha
from .digraph import (
    Digraph,
    closed_walks_2,
    degree_profile,
    is_dag,
    is_out_regular,
    is_symmetric,
    strong_components,
    zagreb_index,
)
from .spectral import (
    Spectrum,
    build_alpha_matrix,
    eigenvalues,
    is_normal_algebraic,
    is_normal_topological,
    low_energy,
    perron_root,
    spectral_radius,
)

# radicands in (-CLAMP_TOL, 0) are rounding noise and clamp to zero
CLAMP_TOL = 1e-9
EQUALITY_RTOL = 1e-6


class BoundId(str, Enum):
    SR_LOWER_TRACE = "SR_LOWER_TRACE"
    SR_LOWER_M2 = "SR_LOWER_M2"
    SR_UPPER_KM = "SR_UPPER_KM"
    E_KM = "E_KM"
    E_RHO_FREE = "E_RHO_FREE"


class BoundDomainError(ValueError):
    """A bound was evaluated outside the hypotheses under which it holds."""


def _sqrt_clamped(x: float, what: str) -> float:
    if x < 0.0:
        if x < -CLAMP_TOL:
            raise BoundDomainError(f"negative radicand {x:.3g} in {what}")
        return 0.0
    return math.sqrt(x)


def _require_order(n: int) -> None:
    if n < 1:
        raise BoundDomainError("bounds need at least one vertex")


def _alpha_value(alpha: AlphaLike) -> float:
    return as_alpha(alpha).value


def second_moment_mix(m: int, Z: int, c2: int, alpha: AlphaLike) -> float:
    """``T = alpha^2 Z + (1-alpha)^2 (m + c2)/2``, the cap on the sum of squared real parts."""
    a = _alpha_value(alpha)
    return a * a * Z + (1.0 - a) ** 2 * (m + c2) / 2.0


def sr_lower_trace(n: int, m: int, alpha: AlphaLike) -> float:
    _require_order(n)
    return _alpha_value(alpha) * m / n


def sr_lower_m2(n: int, Z: int, c2: int, alpha: AlphaLike) -> float:
    _require_order(n)
    a = _alpha_value(alpha)
    return _sqrt_clamped((a * a * Z + (1.0 - a) ** 2 * c2) / n, "second-moment lower bound")


def sr_upper_km(n: int, m: int, Z: int, alpha: AlphaLike) -> float:
    """Upper bound on the spectral radius from the trace and Frobenius norm.

    Only valid for ``alpha < 1``.
    """
    _require_order(n)
    al = as_alpha(alpha)
    if al.is_one():
        raise BoundDomainError("the spectral-radius upper bound needs alpha < 1")
    a = al.value
    mean = a * m / n
    radicand = (n - 1) / n * (a * a * Z + (1.0 - a) ** 2 * m - (a * m) ** 2 / n)
    return mean + _sqrt_clamped(radicand, "spectral-radius upper bound")


def energy_upper_km(n: int, m: int, Z: int, c2: int, alpha: AlphaLike, rho: float) -> float:
    _require_order(n)
    t = second_moment_mix(m, Z, c2, alpha)
    return rho + _sqrt_clamped((n - 1) * (t - rho * rho), "energy upper bound")


def energy_upper_rho_free(n: int, m: int, Z: int, c2: int, alpha: AlphaLike) -> float:
    if n <= 1:
        raise BoundDomainError("the rho-free energy bound needs n > 1")
    return _sqrt_clamped(n * second_moment_mix(m, Z, c2, alpha), "rho-free energy bound")


# ---- undirected reductions (symmetric digraphs, m = c2 = 2 m') -------------

def undirected_params(g: Digraph) -> tuple[int, int]:
    """``(n', m')`` of the undirected graph underlying a symmetric digraph."""
    if not is_symmetric(g):
        raise BoundDomainError("undirected reductions need a symmetric digraph")
    return g.n, g.m // 2


def km_undirected(nprime: int, mprime: int, Z: int, alpha: AlphaLike, rho: float) -> float:
    _require_order(nprime)
    a = _alpha_value(alpha)
    radicand = (nprime - 1) * (a * a * Z + 2.0 * (1.0 - a) ** 2 * mprime - rho * rho)
    return rho + _sqrt_clamped(radicand, "undirected energy bound")


def rho_free_undirected(nprime: int, mprime: int, Z: int, alpha: AlphaLike) -> float:
    _require_order(nprime)
    a = _alpha_value(alpha)
    return _sqrt_clamped(nprime * (a * a * Z + 2.0 * (1.0 - a) ** 2 * mprime), "undirected rho-free bound")


def mcclelland(nprime: int, mprime: int) -> float:
    _require_order(nprime)
    return math.sqrt(2.0 * nprime * mprime)


def koolen_moulton_classic(nprime: int, mprime: int) -> float:
    """Classical adjacency-energy bound; needs average degree ``2m'/n' >= 1``."""
    _require_order(nprime)
    avg = 2.0 * mprime / nprime
    if avg < 1.0:
        raise BoundDomainError(f"classical bound needs 2m'/n' >= 1, got {avg:.6g}")
    return avg + _sqrt_clamped((nprime - 1) * (2.0 * mprime - avg * avg), "classical energy bound")


# ---- structural predicates for the extremal families ------------------------

def is_empty_digraph(g: Digraph) -> bool:
    return g.m == 0


def is_complete_symmetric(g: Digraph) -> bool:
    return g.m == g.n * (g.n - 1)


def complete_core_size(g: Digraph) -> int | None:
    """``k`` if ``g`` is a complete symmetric digraph on k vertices plus isolated ones.

    Arcs only touch non-isolated vertices, so ``m == k(k-1)`` over the
    ``k`` non-isolated vertices forces the complete symmetric structure.
    """
    prof = degree_profile(g)
    k = sum(1 for o, i in zip(prof.out_degrees, prof.in_degrees) if o or i)
    return k if g.m == k * (k - 1) else None


def all_components_digons(g: Digraph) -> bool:
    # a strongly connected pair of vertices is necessarily a digon
    return g.n > 0 and all(len(c) == 2 for c in strong_components(g))


def is_digon_matching(g: Digraph) -> bool:
    """Disjoint union of n/2 digons covering every vertex."""
    prof = degree_profile(g)
    return (
        g.n > 0
        and all(d == 1 for d in prof.out_degrees)
        and all(d == 1 for d in prof.in_degrees)
        and is_symmetric(g)
    )


@dataclass(frozen=True)
class EqualityWitness:
    """Structural verdict on whether a bound is attained.

    ``exact`` is False when the verdict relied on comparing a floating alpha
    against ``1/k`` with a tolerance.
    """

    predicted: bool
    case: str | None = None
    exact: bool = True


def _alpha_regime(a: Alpha) -> str:
    if a.is_zero():
        return "zero"
    if a.is_one():
        return "one"
    return "interior"


def equality_witness(
    g: Digraph,
    alpha: AlphaLike,
    bound_id: BoundId | str,
    spectrum: Spectrum | None = None,
) -> EqualityWitness:
    """Predict from structure alone whether ``g`` attains the given bound.

    For ``E_KM`` the predicate is spectral (normal matrix and equal absolute
    real parts off the Perron root) and uses ``spectrum`` when supplied.
    ``SR_LOWER_TRACE`` is only a sufficient test: its stated extremal
    families attain the bound, but the converse is not certified.
    """
    try:
        bid = BoundId(bound_id)
    except ValueError:
        raise ValueError(f"unknown bound id {bound_id!r}") from None
    a = as_alpha(alpha)
    regime = _alpha_regime(a)

    if bid is BoundId.SR_UPPER_KM:
        if regime == "one":
            raise BoundDomainError("the spectral-radius upper bound needs alpha < 1")
        if is_empty_digraph(g):
            return EqualityWitness(True, "empty")
        if is_complete_symmetric(g):
            return EqualityWitness(True, "complete-symmetric")
        k = complete_core_size(g)
        if k is not None and k >= 2:
            hit, exact = a.reciprocal_match(k)
            return EqualityWitness(hit, f"complete-{k}-plus-isolated" if hit else None, exact)
        return EqualityWitness(False)

    if bid in (BoundId.SR_LOWER_M2, BoundId.SR_LOWER_TRACE):
        if regime == "zero":
            if is_dag(g):
                return EqualityWitness(True, "dag")
            if bid is BoundId.SR_LOWER_M2 and all_components_digons(g):
                return EqualityWitness(True, "digon-components")
            return EqualityWitness(False)
        if regime == "interior":
            return EqualityWitness(is_empty_digraph(g), "empty" if is_empty_digraph(g) else None)
        return EqualityWitness(is_out_regular(g), "out-regular" if is_out_regular(g) else None)

    if bid is BoundId.E_RHO_FREE:
        if g.n <= 1:
            raise BoundDomainError("the rho-free energy bound needs n > 1")
        if is_empty_digraph(g):
            return EqualityWitness(True, "empty")
        if regime == "zero":
            hit = is_digon_matching(g)
            return EqualityWitness(hit, "digon-matching" if hit else None)
        if regime == "interior":
            return EqualityWitness(False)
        return EqualityWitness(is_out_regular(g), "out-regular" if is_out_regular(g) else None)

    # E_KM: spectral characterisation
    if a.is_one():
        normal = is_normal_algebraic(build_alpha_matrix(g, a))[0]
    else:
        normal = is_normal_topological(g, a).topological
    if not normal:
        return EqualityWitness(False)
    if spectrum is None:
        spectrum = eigenvalues(build_alpha_matrix(g, a))
    hit = equal_nonperron_real_parts(spectrum)
    return EqualityWitness(hit, "normal-equal-real-parts" if hit else None, a.is_exact)


def nonperron_real_parts(spec: Spectrum) -> np.ndarray:
    """Real parts of the spectrum with one copy of the Perron root removed."""
    root = perron_root(spec)
    ev = spec.eigenvalues
    candidates = np.flatnonzero(ev.imag == 0)
    if candidates.size == 0:
        drop = int(np.argmax(np.abs(ev)))
    else:
        drop = int(candidates[np.argmin(np.abs(ev.real[candidates] - root))])
    return np.delete(ev.real, drop)


def equal_nonperron_real_parts(spec: Spectrum, rtol: float = EQUALITY_RTOL) -> bool:
    rest = np.abs(nonperron_real_parts(spec))
    if rest.size <= 1:
        return True
    scale = max(1.0, spectral_radius(spec))
    return float(rest.max() - rest.min()) <= rtol * scale


def numerically_equal(bound: float, exact: float, rtol: float = EQUALITY_RTOL) -> bool:
    return abs(bound - exact) <= rtol * max(1.0, abs(exact))


# ---- reports ----------------------------------------------------------------

REPORT_FIELDS = (
    "alpha",
    "alpha_exact",
    "n",
    "m",
    "Z",
    "c2",
    "rho_exact",
    "energy_exact",
    "sr_lower_trace",
    "sr_lower_m2",
    "sr_upper_km",
    "energy_upper_km",
    "energy_upper_rho_free",
)

_BOUND_FIELD = {
    BoundId.SR_LOWER_TRACE: "sr_lower_trace",
    BoundId.SR_LOWER_M2: "sr_lower_m2",
    BoundId.SR_UPPER_KM: "sr_upper_km",
    BoundId.E_KM: "energy_upper_km",
    BoundId.E_RHO_FREE: "energy_upper_rho_free",
}


@dataclass
class BoundReport:
    """Exact spectral quantities next to every applicable bound.

    Bounds outside their hypotheses (``sr_upper_km`` at alpha = 1,
    ``energy_upper_rho_free`` for n <= 1) are ``None``.
    """

    alpha: float
    alpha_exact: str | None
    n: int
    m: int
    Z: int
    c2: int
    rho_exact: float
    energy_exact: float
    sr_lower_trace: float
    sr_lower_m2: float
    sr_upper_km: float | None
    energy_upper_km: float
    energy_upper_rho_free: float | None
    equality_flags: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        doc = {name: getattr(self, name) for name in REPORT_FIELDS}
        doc["equality_flags"] = {k: dict(v) for k, v in self.equality_flags.items()}
        return doc

    @staticmethod
    def csv_columns() -> list[str]:
        cols = list(REPORT_FIELDS)
        for bid in BoundId:
            cols += [f"{bid.value}_numeric_equality", f"{bid.value}_structural_match"]
        return cols

    def csv_row(self) -> list:
        row = [getattr(self, name) for name in REPORT_FIELDS]
        for bid in BoundId:
            flags = self.equality_flags.get(bid.value)
            if flags is None:
                row += ["", ""]
            else:
                row += [flags["numeric_equality"], flags["structural_match"]]
        return ["" if v is None else v for v in row]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.csv_columns())
        writer.writerow(self.csv_row())
        return buf.getvalue()


def bound_report(g: Digraph, alpha: AlphaLike, method: str = "lapack") -> BoundReport:
    if g.n < 1:
        raise BoundDomainError("bound reports need at least one vertex")
    a = as_alpha(alpha)
    spec = eigenvalues(build_alpha_matrix(g, a), method=method)
    rho = spectral_radius(spec)
    energy = low_energy(spec)
    n, m, Z, c2 = g.n, g.m, zagreb_index(g), closed_walks_2(g)

    rep = BoundReport(
        alpha=a.value,
        alpha_exact=str(a) if a.is_exact else None,
        n=n,
        m=m,
        Z=Z,
        c2=c2,
        rho_exact=rho,
        energy_exact=energy,
        sr_lower_trace=sr_lower_trace(n, m, a),
        sr_lower_m2=sr_lower_m2(n, Z, c2, a),
        sr_upper_km=None if a.is_one() else sr_upper_km(n, m, Z, a),
        energy_upper_km=energy_upper_km(n, m, Z, c2, a, rho),
        energy_upper_rho_free=energy_upper_rho_free(n, m, Z, c2, a) if n > 1 else None,
    )
    for bid in BoundId:
        value = getattr(rep, _BOUND_FIELD[bid])
        if value is None:
            continue
        exact_value = energy if bid in (BoundId.E_KM, BoundId.E_RHO_FREE) else rho
        witness = equality_witness(g, a, bid, spectrum=spec)
        rep.equality_flags[bid.value] = {
            "numeric_equality": numerically_equal(value, exact_value),
            "structural_match": witness.predicted,
            "exact": witness.exact,
            "case": witness.case,
        }
    return rep
