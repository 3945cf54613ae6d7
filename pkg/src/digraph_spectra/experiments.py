"""Seeded Monte-Carlo comparison of bounds against exact spectral values.

Each sample ``i`` draws its digraph from the child stream
``child_rng(master_seed, i)``, so results do not depend on how samples are
spread over worker processes. Per-sample relative errors are collected in
index order and reduced with :func:`math.fsum`, which makes every statistic
bit-identical for any worker count.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Callable, Sequence, Union

from .alpha import as_alpha
from .bounds import BoundId, energy_upper_km, energy_upper_rho_free, sr_lower_m2, sr_lower_trace, sr_upper_km
from .digraph import Digraph, closed_walks_2, zagreb_index
from .families import CoreCompleteParams, child_rng, core_complete_random, random_k_regular
from .spectral import build_alpha_matrix, eigenvalues, low_energy, spectral_radius

log = logging.getLogger(__name__)

THREADS_ENV = "DIGRAPH_SPECTRA_THREADS"

TABLE1_BETAS = (0.8, 0.6, 0.4, 0.2, 0.1)
TABLE1_N = 100
TABLE1_R = 5
TABLE2_KS = (6, 7, 8, 9, 10)
DEFAULT_SAMPLES = 1000


def default_extra_arcs(n: int) -> int:
    return 2 * n


class ExperimentId(str, Enum):
    SPECTRAL_RADIUS_TABLE1 = "SPECTRAL_RADIUS_TABLE1"
    LOW_ENERGY_TABLE2 = "LOW_ENERGY_TABLE2"


class DegenerateSampleError(ValueError):
    """The exact value is not positive, so the relative error is undefined."""


class SampleError(RuntimeError):
    def __init__(self, index: int, cause: Exception):
        super().__init__(f"sample {index} failed: {cause}")
        self.index = index
        self.cause = cause


@dataclass(frozen=True)
class KRegularParams:
    n: int
    k: int


FamilyParams = Union[CoreCompleteParams, KRegularParams]


@dataclass(frozen=True)
class SampleInputs:
    """Everything a bound function may consume for one sample."""

    graph: Digraph
    alpha: float
    n: int
    m: int
    Z: int
    c2: int
    rho: float
    energy: float


BoundFunc = Callable[[SampleInputs], float]

BUILTIN_BOUNDS: dict[str, BoundFunc] = {
    BoundId.SR_UPPER_KM.value: lambda s: sr_upper_km(s.n, s.m, s.Z, s.alpha),
    BoundId.SR_LOWER_M2.value: lambda s: sr_lower_m2(s.n, s.Z, s.c2, s.alpha),
    BoundId.SR_LOWER_TRACE.value: lambda s: sr_lower_trace(s.n, s.m, s.alpha),
    BoundId.E_KM.value: lambda s: energy_upper_km(s.n, s.m, s.Z, s.c2, s.alpha, s.rho),
    BoundId.E_RHO_FREE.value: lambda s: energy_upper_rho_free(s.n, s.m, s.Z, s.c2, s.alpha),
}

# user-supplied baselines from the literature; none ship with the package
_BASELINES: dict[str, BoundFunc] = {}


def register_baseline(name: str, func: BoundFunc) -> None:
    """Register an external bound under ``name`` for use in ``bound_ids``.

    Registrations must happen before a multi-worker run starts so that the
    forked workers inherit them.
    """
    if name in BUILTIN_BOUNDS:
        raise ValueError(f"{name!r} is a built-in bound id")
    _BASELINES[name] = func


def unregister_baseline(name: str) -> None:
    _BASELINES.pop(name, None)


def resolve_bound(name: str) -> BoundFunc:
    if name in BUILTIN_BOUNDS:
        return BUILTIN_BOUNDS[name]
    if name in _BASELINES:
        return _BASELINES[name]
    raise KeyError(f"unknown bound id {name!r}")


DEFAULT_BOUNDS = {
    ExperimentId.SPECTRAL_RADIUS_TABLE1: (BoundId.SR_UPPER_KM.value,),
    ExperimentId.LOW_ENERGY_TABLE2: (BoundId.E_KM.value, BoundId.E_RHO_FREE.value),
}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment_id: ExperimentId
    alpha: float
    family_params: FamilyParams
    samples: int = DEFAULT_SAMPLES
    master_seed: int = 0
    bound_ids: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "experiment_id", ExperimentId(self.experiment_id))
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not self.bound_ids:
            object.__setattr__(self, "bound_ids", DEFAULT_BOUNDS[self.experiment_id])
        else:
            object.__setattr__(self, "bound_ids", tuple(self.bound_ids))
        expected = CoreCompleteParams if self.experiment_id is ExperimentId.SPECTRAL_RADIUS_TABLE1 else KRegularParams
        if not isinstance(self.family_params, expected):
            raise TypeError(f"{self.experiment_id.value} needs {expected.__name__}")
        as_alpha(self.alpha)

    def to_json(self) -> dict:
        return {
            "experiment_id": self.experiment_id.value,
            "alpha": self.alpha,
            "family_params": asdict(self.family_params),
            "samples": self.samples,
            "master_seed": self.master_seed,
            "bound_ids": list(self.bound_ids),
        }


@dataclass(frozen=True)
class BoundStats:
    """Population statistics of one bound's relative errors.

    ``sample_count + excluded == samples``; excluded samples had a
    non-positive exact value.
    """

    mean: float
    std: float
    min: float
    max: float
    sample_count: int
    excluded: int = 0


@dataclass(frozen=True)
class ExperimentStats:
    config: ExperimentConfig
    per_bound: dict = field(default_factory=dict)


def relative_error(bound_value: float, exact_value: float) -> float:
    if exact_value <= 0:
        raise DegenerateSampleError(f"exact value {exact_value!r} is not positive")
    return bound_value / exact_value - 1.0


def generate_sample(cfg: ExperimentConfig, index: int) -> Digraph:
    rng = child_rng(cfg.master_seed, index)
    p = cfg.family_params
    if isinstance(p, CoreCompleteParams):
        return core_complete_random(p, rng)
    return random_k_regular(p.n, p.k, rng)


def evaluate_sample(cfg: ExperimentConfig, index: int) -> tuple[float, dict[str, float]]:
    """Return ``(exact value, {bound id: bound value})`` for one sample."""
    try:
        g = generate_sample(cfg, index)
        spec = eigenvalues(build_alpha_matrix(g, cfg.alpha))
        inputs = SampleInputs(
            graph=g,
            alpha=cfg.alpha,
            n=g.n,
            m=g.m,
            Z=zagreb_index(g),
            c2=closed_walks_2(g),
            rho=spectral_radius(spec),
            energy=low_energy(spec),
        )
        values = {bid: float(resolve_bound(bid)(inputs)) for bid in cfg.bound_ids}
    except Exception as exc:
        raise SampleError(index, exc) from exc
    exact = inputs.rho if cfg.experiment_id is ExperimentId.SPECTRAL_RADIUS_TABLE1 else inputs.energy
    return exact, values


def _evaluate_chunk(cfg: ExperimentConfig, indices: Sequence[int]):
    return [evaluate_sample(cfg, i) for i in indices]


def resolve_workers(requested: int | None = None) -> int:
    cap = os.environ.get(THREADS_ENV)
    workers = requested if requested is not None else (os.cpu_count() or 1)
    if cap:
        try:
            workers = min(workers, int(cap))
        except ValueError:
            log.warning("ignoring non-integer %s=%r", THREADS_ENV, cap)
    return max(1, workers)


def _chunks(n: int, parts: int) -> list[range]:
    size = max(1, math.ceil(n / parts))
    return [range(s, min(n, s + size)) for s in range(0, n, size)]


def run_experiment(cfg: ExperimentConfig, workers: int | None = None) -> ExperimentStats:
    workers = resolve_workers(workers)
    if workers == 1:
        results = _evaluate_chunk(cfg, range(cfg.samples))
    else:
        chunks = _chunks(cfg.samples, workers * 4)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = [r for part in pool.map(_evaluate_chunk, [cfg] * len(chunks), chunks) for r in part]
    return aggregate(cfg, results)


def aggregate(cfg: ExperimentConfig, results: list[tuple[float, dict[str, float]]]) -> ExperimentStats:
    per_bound = {}
    for bid in cfg.bound_ids:
        errs = []
        excluded = 0
        for exact, values in results:
            try:
                errs.append(relative_error(values[bid], exact))
            except DegenerateSampleError:
                excluded += 1
        if excluded:
            log.warning("%s: %d degenerate samples excluded for %s", cfg.experiment_id.value, excluded, bid)
        per_bound[bid] = _summarise(errs, excluded)
    return ExperimentStats(cfg, per_bound)


def _summarise(errs: list[float], excluded: int) -> BoundStats:
    if not errs:
        nan = float("nan")
        return BoundStats(nan, nan, nan, nan, 0, excluded)
    count = len(errs)
    mean = math.fsum(errs) / count
    var = math.fsum((e - mean) ** 2 for e in errs) / count
    return BoundStats(mean, math.sqrt(var), min(errs), max(errs), count, excluded)


# ---- table layer ------------------------------------------------------------

def table_cells(
    table: int,
    alpha: float,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    grid: Sequence[float] | None = None,
    extra_arcs: int | None = None,
    bound_ids: Sequence[str] = (),
) -> list[tuple[dict, ExperimentConfig]]:
    """Grid cells for the core-complete (1) or di-regular (2) comparison."""
    cells = []
    if table == 1:
        extra = default_extra_arcs(TABLE1_N) if extra_arcs is None else int(extra_arcs)
        for beta in grid or TABLE1_BETAS:
            params = CoreCompleteParams(TABLE1_N, TABLE1_R, float(beta), extra)
            cfg = ExperimentConfig(ExperimentId.SPECTRAL_RADIUS_TABLE1, alpha, params, samples, seed, tuple(bound_ids))
            cells.append(({"alpha": alpha, "n": TABLE1_N, "r": TABLE1_R, "beta": float(beta), "extra_arcs": extra}, cfg))
    elif table == 2:
        for k in grid or TABLE2_KS:
            k = int(k)
            params = KRegularParams(10 * k, k)
            cfg = ExperimentConfig(ExperimentId.LOW_ENERGY_TABLE2, alpha, params, samples, seed, tuple(bound_ids))
            cells.append(({"alpha": alpha, "n": 10 * k, "k": k}, cfg))
    else:
        raise ValueError(f"table must be 1 or 2, got {table}")
    return cells


def run_table(cells: list[tuple[dict, ExperimentConfig]], workers: int | None = None) -> list[tuple[dict, ExperimentStats]]:
    return [(params, run_experiment(cfg, workers)) for params, cfg in cells]


def emit_table(cells: list[tuple[dict, ExperimentStats | None]], config_echo: dict | None = None) -> tuple[str, str]:
    """Render a grid of statistics as ``(csv_text, json_text)``.

    One row per (bound id, cell): ``bound_id``, the grid parameters, then
    ``mean, std, min, max, n_samples``. Raises ``ValueError`` on an empty
    grid, a cell without statistics, or a cell missing one of the bounds.
    """
    if not cells:
        raise ValueError("empty grid")
    grid_keys = list(cells[0][0])
    bound_ids: list[str] = []
    for params, stats in cells:
        if stats is None:
            raise ValueError(f"missing statistics for cell {params}")
        if list(params) != grid_keys:
            raise ValueError(f"cell {params} does not match grid columns {grid_keys}")
        for bid in stats.per_bound:
            if bid not in bound_ids:
                bound_ids.append(bid)
    for params, stats in cells:
        for bid in bound_ids:
            if bid not in stats.per_bound:
                raise ValueError(f"cell {params} is missing bound {bid}")

    columns = ["bound_id", *grid_keys, "mean", "std", "min", "max", "n_samples"]
    rows = []
    for bid in bound_ids:
        for params, stats in cells:
            s = stats.per_bound[bid]
            rows.append([bid, *(params[k] for k in grid_keys), s.mean, s.std, s.min, s.max, s.sample_count])

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])

    doc = {
        "config": config_echo or {},
        "cells": [stats.config.to_json() for _, stats in cells],
        "columns": columns,
        "rows": [dict(zip(columns, row)) for row in rows],
        "excluded": {
            bid: [stats.per_bound[bid].excluded for _, stats in cells] for bid in bound_ids
        },
    }
    return buf.getvalue(), json.dumps(doc, indent=2) + "\n"
