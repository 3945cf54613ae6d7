"""Acceptance criteria 1-9, each at its stated tolerance.

Every test records one ``criterion N: PASS|FAIL`` line; the lines are echoed
in the pytest terminal summary.
"""
import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import multiset_distance, record_acceptance
from digraph_spectra.bounds import (
    BoundId,
    energy_upper_km,
    energy_upper_rho_free,
    equal_nonperron_real_parts,
    equality_witness,
    nonperron_real_parts,
    numerically_equal,
    sr_lower_m2,
    sr_lower_trace,
    sr_upper_km,
)
from digraph_spectra.certify import enumerate_digraphs
from digraph_spectra.digraph import Digraph, closed_walks_2, zagreb_index
from digraph_spectra.experiments import (
    ExperimentConfig,
    ExperimentId,
    KRegularParams,
    emit_table,
    run_experiment,
    run_table,
    table_cells,
)
from digraph_spectra.families import (
    child_rng,
    complete_bipartite_symmetric,
    complete_symmetric,
    directed_cycle,
    random_digraph,
    rotational_tournament,
)
from digraph_spectra.spectral import (
    build_alpha_matrix,
    eigenvalues,
    frobenius_norm,
    is_normal_topological,
    low_energy,
    spectral_radius,
)

ALPHA_GRID = (Fraction(0), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(3, 4), Fraction(1))
CORPUS_SIZE = 10_000
CORPUS_SEED = 20_240_601
P_ARCS = (0.05, 0.2, 0.5)


def _report(label, ok, detail):
    record_acceptance(f"criterion {label}: {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


def _spectrum(g, alpha):
    return eigenvalues(build_alpha_matrix(g, alpha))


def _random_corpus():
    """10^4 seeded digraphs, n uniform on 1..60, p_arc cycling through P_ARCS."""
    for i in range(CORPUS_SIZE):
        rng = child_rng(CORPUS_SEED, i)
        n = int(rng.integers(1, 61))
        yield random_digraph(n, P_ARCS[i % len(P_ARCS)], rng)


# ---- 1 ----------------------------------------------------------------------

def _closed_forms():
    for n in range(2, 31):
        for alpha in ALPHA_GRID:
            a = float(alpha)
            yield f"K<->{n}", complete_symmetric(n), alpha, [n - 1] + [a * n - 1] * (n - 1)
            roots = np.exp(2j * np.pi * np.arange(n) / n)
            yield f"C{n}", directed_cycle(n), alpha, a + (1 - a) * roots
            if n % 2 == 0:
                t = n // 2
                yield f"K<->{t},{t}", complete_bipartite_symmetric(t), alpha, [t, (2 * a - 1) * t] + [a * t] * (2 * t - 2)


def test_criterion_1_closed_form_spectra():
    worst, where, count = 0.0, None, 0
    for name, g, alpha, expected in _closed_forms():
        dev = multiset_distance(_spectrum(g, alpha).eigenvalues, expected)
        count += 1
        if dev > worst:
            worst, where = dev, f"{name} alpha={alpha}"
    ok = worst <= 1e-8
    _report(1, ok, f"{count} spectra, max deviation {worst:.2e} at {where} (tol 1e-8)")
    assert ok


# ---- 2 and 3 ----------------------------------------------------------------

@pytest.fixture(scope="module")
def corpus_checks():
    """Worst normalised violations over the random corpus and alpha grid."""
    stats = {"trace": 0.0, "m2": 0.0, "schur": -math.inf, "lower": -math.inf, "upper": -math.inf,
             "km": -math.inf, "chain": -math.inf, "cases": 0, "where": {}}

    def track(key, value, g, alpha):
        if value > stats[key]:
            stats[key] = value
            stats["where"][key] = (g.n, g.m, str(alpha))

    for g in _random_corpus():
        n, m, Z, c2 = g.n, g.m, zagreb_index(g), closed_walks_2(g)
        for alpha in ALPHA_GRID:
            a = float(alpha)
            mat = build_alpha_matrix(g, alpha)
            spec = eigenvalues(mat)
            fro = frobenius_norm(mat)
            x, y = spec.real, spec.imag
            rho, energy = spectral_radius(spec), low_energy(spec)
            stats["cases"] += 1
            # identities, as ratio to their allowed tolerance (<= 1 passes)
            track("trace", abs(math.fsum(x) - a * m) / (1e-7 * n * fro) if fro else abs(math.fsum(x)), g, alpha)
            m2 = a * a * Z + (1 - a) ** 2 * c2
            track("m2", abs(math.fsum(x * x - y * y) - m2) / (1e-6 * n * fro * fro) if fro
                  else abs(math.fsum(x * x - y * y)), g, alpha)
            track("schur", math.fsum(np.abs(spec.eigenvalues) ** 2) - fro * fro, g, alpha)
            # bound sandwich, as signed excess (<= 1e-7 passes)
            track("lower", max(sr_lower_trace(n, m, alpha), sr_lower_m2(n, Z, c2, alpha)) - rho, g, alpha)
            if alpha != 1:
                track("upper", rho - sr_upper_km(n, m, Z, alpha), g, alpha)
            e_km = energy_upper_km(n, m, Z, c2, alpha, rho)
            track("km", energy - e_km, g, alpha)
            if n > 1:
                track("chain", e_km - energy_upper_rho_free(n, m, Z, c2, alpha), g, alpha)
    return stats


def test_criterion_2_moment_identities(corpus_checks):
    s = corpus_checks
    ok = s["trace"] <= 1.0 and s["m2"] <= 1.0 and s["schur"] <= 1e-7
    _report(2, ok, f"{s['cases']} (digraph, alpha) cases; worst trace/tol {s['trace']:.2e}, "
                   f"worst M2/tol {s['m2']:.2e}, worst Schur excess {s['schur']:.2e} (tol 1e-7)")
    assert ok


def test_criterion_3_bound_sandwich(corpus_checks):
    s = corpus_checks
    worst = max(s["lower"], s["upper"], s["km"], s["chain"])
    ok = worst <= 1e-7
    _report(3, ok, f"{s['cases']} cases; max excess lower-rho {s['lower']:.2e}, rho-upper {s['upper']:.2e}, "
                   f"E-km {s['km']:.2e}, km-rho_free {s['chain']:.2e} (slack 1e-7)")
    assert ok


# ---- 4 ----------------------------------------------------------------------

def test_criterion_4_exhaustive_equality_oracle():
    grid = ALPHA_GRID[:-1]
    checked = disagreements = 0
    first = None
    for g in enumerate_digraphs(4):
        n, m, Z, c2 = g.n, g.m, zagreb_index(g), closed_walks_2(g)
        for alpha in grid:
            spec = _spectrum(g, alpha)
            rho, energy = spectral_radius(spec), low_energy(spec)
            cases = (
                (BoundId.SR_UPPER_KM, sr_upper_km(n, m, Z, alpha), rho),
                (BoundId.SR_LOWER_M2, sr_lower_m2(n, Z, c2, alpha), rho),
                (BoundId.E_RHO_FREE, energy_upper_rho_free(n, m, Z, c2, alpha), energy),
            )
            for bid, bound, exact in cases:
                checked += 1
                if equality_witness(g, alpha, bid, spec).predicted != numerically_equal(bound, exact, 1e-6):
                    disagreements += 1
                    first = first or (bid.value, g.sorted_arcs(), str(alpha))
    ok = disagreements == 0
    _report(4, ok, f"4096 digraphs x {len(grid)} alphas, {checked} verdicts, {disagreements} disagreements"
                   + (f", first {first}" if first else ""))
    assert ok


# ---- 5 ----------------------------------------------------------------------

NORMALITY_ALPHAS = (Fraction(0), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(3, 4), 0.1, 0.3, 0.7, 0.9)


def _eulerian(rng, n):
    """Arc-disjoint random cycles: balanced degrees, so only the pair condition decides."""
    arcs = set()
    for _ in range(int(rng.integers(1, 2 * n))):
        length = int(rng.integers(2, n + 1))
        cyc = [int(v) for v in rng.choice(n, size=length, replace=False)]
        new = list(zip(cyc, cyc[1:] + cyc[:1]))
        if not arcs.intersection(new):
            arcs.update(new)
    return Digraph(n, arcs)


def _normality_corpus():
    yield from enumerate_digraphs(4)
    # a third each: the general random corpus, balanced digraphs, symmetric digraphs
    for i, g in enumerate(_random_corpus()):
        kind = i % 3
        if kind == 0:
            yield g
            continue
        rng = child_rng(CORPUS_SEED + 1, i)
        n = int(rng.integers(2, 13))
        if kind == 1:
            yield _eulerian(rng, n)
        else:
            upper = np.triu(rng.random((n, n)) < rng.random(), 1)
            yield Digraph.from_adjacency(upper | upper.T)


def test_criterion_5_normality_equivalence():
    total = disagreements = normal = 0
    first = None
    for g in _normality_corpus():
        for alpha in NORMALITY_ALPHAS:
            v = is_normal_topological(g, alpha)
            total += 1
            normal += v.algebraic
            if v.topological != v.algebraic:
                disagreements += 1
                first = first or (g.n, g.sorted_arcs(), str(alpha))
    ok = disagreements == 0
    _report(5, ok, f"{total} (digraph, alpha) verdicts over 4096 + {CORPUS_SIZE} digraphs, "
                   f"{normal} normal, {disagreements} disagreements" + (f", first {first}" if first else ""))
    assert ok


# ---- 6 ----------------------------------------------------------------------

def _equal_abs_condition(g, alpha):
    """Normal and equal |x_i| off the Perron root, decided two ways."""
    spec = _spectrum(g, alpha)
    structural = equality_witness(g, alpha, BoundId.E_KM, spec).predicted
    n, m, Z, c2 = g.n, g.m, zagreb_index(g), closed_walks_2(g)
    numeric = numerically_equal(energy_upper_km(n, m, Z, c2, alpha, spectral_radius(spec)), low_energy(spec))
    return structural, numeric


def test_criterion_6_named_families():
    problems = []
    tour_alphas = (Fraction(0), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(3, 4), 0.1, 0.6, 0.9)
    worst = 0.0
    for n in range(3, 16, 2):
        g = rotational_tournament(n)
        for alpha in tour_alphas:
            v = is_normal_topological(g, alpha)
            if not (v.topological and v.algebraic):
                problems.append(f"T{n} not normal at {alpha}")
            target = (float(alpha) * n - 1) / 2
            dev = float(np.max(np.abs(nonperron_real_parts(_spectrum(g, alpha)) - target)))
            worst = max(worst, dev)
            if dev > 1e-8:
                problems.append(f"T{n} alpha={alpha} real parts off by {dev:.2e}")

    sweep = [float(x) for x in np.linspace(0.0, 0.95, 20)] + [Fraction(1, 3), Fraction(1, 5), Fraction(1, 4), Fraction(1, 2)]
    families = [("C4", directed_cycle(4), 1 / 3), ("C5", directed_cycle(5), 1 / 5)]
    families += [(f"K<->{t},{t}", complete_bipartite_symmetric(t), 1 / 3) for t in range(2, 9)]
    hits = 0
    for name, g, special in families:
        for alpha in sweep:
            expected = abs(float(alpha) - special) <= 1e-12
            structural, numeric = _equal_abs_condition(g, alpha)
            spectral = equal_nonperron_real_parts(_spectrum(g, alpha))
            hits += expected
            if not (structural == numeric == spectral == expected):
                problems.append(f"{name} alpha={alpha}: expected {expected}, structural {structural}, "
                                f"numeric {numeric}, spectral {spectral}")
    ok = not problems
    _report(6, ok, f"tournaments n=3..15 odd: max real-part deviation {worst:.2e} (tol 1e-8); "
                   f"C4/C5/K<->t,t sweep of {len(sweep)} alphas, {hits} equality hits"
                   + (f"; {len(problems)} problems, first: {problems[0]}" if problems else ""))
    assert ok


# ---- 7 ----------------------------------------------------------------------

TABLE2_TARGETS = [
    # (alpha, n, k, E_KM mean, E_RHO_FREE mean, tolerance)
    (0.7, 100, 10, 0.0041, 0.0050, 0.002),
    (0.3, 60, 6, 0.1922, 0.2243, 0.02),
]
EXPERIMENT_SEED = 1


def test_criterion_7_table2_reproduction():
    parts, ok = [], True
    for alpha, n, k, want_km, want_free, tol in TABLE2_TARGETS:
        cfg = ExperimentConfig(ExperimentId.LOW_ENERGY_TABLE2, alpha, KRegularParams(n, k), 1000, EXPERIMENT_SEED)
        stats = run_experiment(cfg)
        km = stats.per_bound["E_KM"]
        free = stats.per_bound["E_RHO_FREE"]
        good = abs(km.mean - want_km) <= tol and abs(free.mean - want_free) <= tol
        ok &= good
        parts.append(f"alpha={alpha} (n,k)=({n},{k}): E_KM {km.mean:.4f}+-{km.std:.4f} vs {want_km}, "
                     f"E_RHO_FREE {free.mean:.4f}+-{free.std:.4f} vs {want_free} (tol {tol})")
    _report(7, ok, "; ".join(parts))
    assert ok


# ---- 8 ----------------------------------------------------------------------

TABLE1_PRINTED = {
    0.3: (0.9986, 0.8162, 0.5746, 0.3810, 0.3071),
    0.7: (0.6738, 0.4161, 0.2234, 0.1132, 0.0782),
}


@pytest.fixture(scope="module")
def table1_means():
    out = {}
    for alpha in TABLE1_PRINTED:
        cells = table_cells(1, alpha, samples=1000, seed=EXPERIMENT_SEED)
        assert all(params["extra_arcs"] == 2 * params["n"] for params, _ in cells)
        out[alpha] = [stats.per_bound["SR_UPPER_KM"].mean for _, stats in run_table(cells)]
    return out


def _fmt(row):
    return "[" + ", ".join(f"{x:.4f}" for x in row) + "]"


def test_criterion_8_table1_trend(table1_means):
    ok = all(all(b <= a for a, b in zip(row, row[1:])) for row in table1_means.values())
    _report("8 (trend)", ok, "beta 0.8->0.1 means at extra_arcs=2n: "
            + "; ".join(f"alpha={a} {_fmt(row)}" for a, row in table1_means.items()))
    assert ok


def test_criterion_8_table1_magnitude_band(table1_means):
    outside = []
    for alpha, row in table1_means.items():
        for beta, got, want in zip((0.8, 0.6, 0.4, 0.2, 0.1), row, TABLE1_PRINTED[alpha]):
            if not want / 2 <= got <= 2 * want:
                outside.append(f"alpha={alpha} beta={beta}: {got:.4f} vs printed {want}")
    ok = not outside
    _report("8 (band)", ok, "factor-2 band around the printed B1 rows at extra_arcs=2n"
            + (f"; {len(outside)} cells outside: " + ", ".join(outside) if outside else "; all 10 cells inside"))
    assert ok


# ---- 9 ----------------------------------------------------------------------

def test_criterion_9_determinism():
    runs = []
    for table, alpha, grid, samples in ((1, 0.3, (0.8, 0.1), 24), (2, 0.7, (6, 7), 24)):
        cells = table_cells(table, alpha, samples=samples, seed=777, grid=grid)
        echo = {"table": table, "alpha": alpha, "seed": 777}
        outputs = [emit_table(run_table(cells, workers=w), echo) for w in (1, 2, 3, 1)]
        runs.append(all(o == outputs[0] for o in outputs))
    ok = all(runs)
    _report(9, ok, "tables 1 and 2 re-run at workers 1, 2, 3, 1: CSV and JSON "
            + ("byte-identical" if ok else "differ"))
    assert ok
