"""Extreme points of the perfect-secrecy slices and brute-force coupling search.

The slice constraint systems live in at most three rate dimensions with at
most a dozen inequalities, so extreme points come from exhaustive vertex
enumeration (every d-subset of active constraints plus the axis planes)
rather than an LP dependency.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

import numpy as np

from .bounds import (
    DEFAULT_TOL,
    AuxiliaryCoupling,
    CorollaryBranch,
    corollary_constraints,
    theorem_spec,
)
from .dmc import DMCModel, RateTuple
from .errors import BudgetExceededError, UsageError
from .pmf import JointPMF

DEFAULT_BUDGET = 10_000_000
VERTEX_DEDUP_TOL = 1e-9


@dataclass(frozen=True)
class ExtremePoint:
    rates: RateTuple
    objective_value: float
    branch_id: str
    empty_interior: bool = False

    def point3(self) -> tuple[float, float, float]:
        return (self.rates.r0, self.rates.r1, self.rates.r2)


def _rate_tuple_from_point(config: str, point: Sequence[float]) -> RateTuple:
    r0, r1, r2 = (max(0.0, float(v)) for v in point)
    if config == "B":
        r0 = 0.0
    if config == "C":
        r2 = 0.0
    return RateTuple(r0, r1, r2, re1=r1, re2=r2)


def _branch_vertices(
    branch: CorollaryBranch, dims: tuple[int, ...], tol: float
) -> list[tuple[float, float, float]]:
    """Feasible vertices of one branch's constraint polytope (3-vector form)."""
    d = len(dims)
    rows: list[np.ndarray] = []
    rhs: list[float] = []
    for lc in branch.constraints:
        rows.append(np.array([lc.coefs[i] for i in dims], dtype=np.float64))
        rhs.append(lc.bound)
    for k in range(d):  # axis planes r_k >= 0 as -r_k <= 0
        e = np.zeros(d)
        e[k] = -1.0
        rows.append(e)
        rhs.append(0.0)
    a = np.vstack(rows)
    b = np.asarray(rhs)

    vertices: list[np.ndarray] = []
    for subset in itertools.combinations(range(len(rows)), d):
        sub_a = a[list(subset)]
        sub_b = b[list(subset)]
        if abs(np.linalg.det(sub_a)) < 1e-12:
            continue
        v = np.linalg.solve(sub_a, sub_b)
        if np.any(v < -tol):
            continue
        if np.any(a @ v > b + tol):
            continue
        if any(np.max(np.abs(v - w)) <= VERTEX_DEDUP_TOL for w in vertices):
            continue
        vertices.append(v)

    out = []
    for v in vertices:
        full = [0.0, 0.0, 0.0]
        for k, dim in enumerate(dims):
            full[dim] = max(0.0, float(v[k]))
        out.append(tuple(full))
    return out


def _origin_feasible(branch: CorollaryBranch, tol: float) -> bool:
    return all(lc.bound >= -tol for lc in branch.constraints)


def secrecy_region_extremes(
    theorem_id: str,
    model: DMCModel,
    coupling: AuxiliaryCoupling,
    objective: Sequence[float],
    *,
    rstar: float | None = None,
    tol: float = DEFAULT_TOL,
    clamp_equivocation: bool = False,
) -> ExtremePoint:
    """Maximize objective . (R0, R1, R2) over the coupling's Re = R slice.

    Returns the best feasible vertex; ties break to the lexicographically
    largest (R0, R1, R2).  An all-zero point flagged `empty_interior` means
    even the origin fails every qualifying branch.
    """
    obj = tuple(float(v) for v in objective)
    if len(obj) != 3:
        raise UsageError("objective must be a direction over (R0, R1, R2)")
    spec = theorem_spec(theorem_id)
    dims = spec.rate_dims()
    branches = corollary_constraints(
        theorem_id,
        model,
        coupling,
        rstar=rstar,
        tol=tol,
        clamp_equivocation=clamp_equivocation,
    )
    best: tuple[float, tuple[float, float, float], str] | None = None
    for branch in branches:
        if not branch.applicable or not _origin_feasible(branch, tol):
            continue
        for point in _branch_vertices(branch, dims, tol):
            value = sum(c * v for c, v in zip(obj, point))
            key = (value, point)
            if best is None or key > (best[0], best[1]):
                best = (value, point, branch.branch_id)
    if best is None:
        return ExtremePoint(RateTuple.zero(), 0.0, "none", empty_interior=True)
    value, point, branch_id = best
    return ExtremePoint(_rate_tuple_from_point(spec.config, point), value, branch_id)


# ---------------------------------------------------------------------------
# Simplex-grid enumeration of couplings
# ---------------------------------------------------------------------------


def simplex_grid_count(cells: int, steps: int) -> int:
    """Number of grid distributions over `cells` outcomes at resolution `steps`."""
    if steps < 1:
        raise UsageError("steps must be >= 1")
    if steps == 1:
        return 1
    return math.comb(steps - 1 + cells - 1, cells - 1)


def simplex_grid(cells: int, steps: int) -> Iterator[tuple[float, ...]]:
    """Deterministic grid on the probability simplex.

    `steps` counts mass levels per cell (0, 1/(steps-1), ..., 1); `steps=1`
    degenerates to the single uniform distribution.
    """
    if steps < 1:
        raise UsageError("steps must be >= 1")
    if steps == 1:
        yield (1.0 / cells,) * cells
        return
    total = steps - 1

    def rec(remaining: int, slots: int) -> Iterator[tuple[int, ...]]:
        if slots == 1:
            yield (remaining,)
            return
        for first in range(remaining, -1, -1):
            for rest in rec(remaining - first, slots - 1):
                yield (first,) + rest

    for combo in rec(total, cells):
        yield tuple(c / total for c in combo)


def _axis_sizes(
    spec_vars: Sequence[str],
    model: DMCModel,
    aux_sizes: Mapping[str, int],
) -> dict[str, int]:
    sizes: dict[str, int] = {}
    for name in spec_vars:
        if name == "X":
            sizes[name] = model.x_size
        elif name == "X1":
            sizes[name] = model.x1_size
        elif name == "Y1":
            sizes[name] = model.y1_size
        else:
            if name not in aux_sizes:
                raise UsageError(f"aux_sizes must provide a cardinality for {name}")
            size = int(aux_sizes[name])
            if size < 1:
                raise UsageError(f"aux size for {name} must be >= 1")
            sizes[name] = size
    return sizes


def _factor_grids(
    theorem_id: str,
    model: DMCModel,
    aux_sizes: Mapping[str, int],
    steps: int,
) -> tuple[tuple[str, ...], dict[str, int], list[tuple[tuple[str, ...], tuple[str, ...], list[np.ndarray]]]]:
    """Per free factor: all grid conditionals, as arrays shaped given+targets."""
    spec = theorem_spec(theorem_id)
    sizes = _axis_sizes(spec.coupling_vars, model, aux_sizes)
    factors = []
    for targets, given in spec.pattern.factors:
        t_cells = int(np.prod([sizes[v] for v in targets]))
        g_cells = int(np.prod([sizes[v] for v in given])) if given else 1
        shape = tuple(sizes[v] for v in given) + tuple(sizes[v] for v in targets)
        if targets == ("Y1",):
            # Pinned to the channel's own relay observation law.
            table = model.y1_conditional()  # (x, x1, y1) matches (given..., target)
            factors.append((targets, given, [table.reshape(shape)]))
            continue
        per_cell = list(simplex_grid(t_cells, steps))
        tables = []
        for combo in itertools.product(per_cell, repeat=g_cells):
            tables.append(np.asarray(combo, dtype=np.float64).reshape(shape))
        factors.append((targets, given, tables))
    return spec.coupling_vars, sizes, factors


def estimate_grid_size(
    theorem_id: str,
    model: DMCModel,
    aux_sizes: Mapping[str, int],
    grid_steps: int,
) -> int:
    spec = theorem_spec(theorem_id)
    sizes = _axis_sizes(spec.coupling_vars, model, aux_sizes)
    total = 1
    for targets, given in spec.pattern.factors:
        if targets == ("Y1",):
            continue
        t_cells = int(np.prod([sizes[v] for v in targets]))
        g_cells = int(np.prod([sizes[v] for v in given])) if given else 1
        total *= simplex_grid_count(t_cells, grid_steps) ** g_cells
    return total


def coupling_grid(
    theorem_id: str,
    model: DMCModel,
    aux_sizes: Mapping[str, int],
    grid_steps: int,
) -> Iterator[AuxiliaryCoupling]:
    """Every coupling of the factorized simplex grid, in deterministic order."""
    spec_vars, sizes, factors = _factor_grids(theorem_id, model, aux_sizes, grid_steps)
    var_order = tuple(v for v in spec_vars)
    full_shape = tuple(sizes[v] for v in var_order)
    axis_of = {v: i for i, v in enumerate(var_order)}

    def expanded(table: np.ndarray, targets, given) -> np.ndarray:
        shape = [1] * len(var_order)
        for v, s in zip(tuple(given) + tuple(targets), table.shape):
            shape[axis_of[v]] = s
        # Axes of `table` are (given..., targets...); move each into place.
        src = list(range(table.ndim))
        dst = [axis_of[v] for v in tuple(given) + tuple(targets)]
        order = np.argsort(dst)
        arranged = np.transpose(table, [src[i] for i in order])
        return arranged.reshape(shape)

    choices = [f[2] for f in factors]
    metas = [(f[0], f[1]) for f in factors]
    for combo in itertools.product(*choices):
        probs = np.ones(full_shape)
        for table, (targets, given) in zip(combo, metas):
            probs = probs * expanded(table, targets, given)
        yield AuxiliaryCoupling(JointPMF(var_order, probs), theorem_id)


@dataclass(frozen=True)
class BruteForceResult:
    best: ExtremePoint
    coupling: AuxiliaryCoupling
    couplings_scanned: int


def _worker_count() -> int:
    raw = os.environ.get("RBC_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def brute_force_best(
    model: DMCModel,
    aux_sizes: Mapping[str, int],
    grid_steps: int,
    theorem_id: str,
    objective: Sequence[float],
    *,
    budget: int = DEFAULT_BUDGET,
    rstar: float | None = None,
    tol: float = DEFAULT_TOL,
    clamp_equivocation: bool = False,
) -> BruteForceResult:
    """Grid search over the bound's admissible couplings.

    Deterministic for a given `grid_steps`; refuses up front when the grid
    would exceed `budget` evaluations.  `RBC_THREADS` caps the worker pool;
    the merge is by (objective, lexicographic rates), so results do not
    depend on scheduling.
    """
    for name, size in aux_sizes.items():
        if size > 3:
            raise UsageError(f"aux size for {name} exceeds the brute-force cap of 3")
    estimated = estimate_grid_size(theorem_id, model, aux_sizes, grid_steps)
    if estimated > budget:
        raise BudgetExceededError(
            f"grid for {theorem_id} needs {estimated} evaluations, over the budget of {budget}",
            estimated=estimated,
        )
    obj = tuple(float(v) for v in objective)

    def evaluate(coupling: AuxiliaryCoupling):
        pt = secrecy_region_extremes(
            theorem_id,
            model,
            coupling,
            obj,
            rstar=rstar,
            tol=tol,
            clamp_equivocation=clamp_equivocation,
        )
        return (pt.objective_value, pt.point3()), pt, coupling

    couplings = list(coupling_grid(theorem_id, model, aux_sizes, grid_steps))
    workers = _worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(evaluate, couplings))
    else:
        results = [evaluate(c) for c in couplings]

    best_key, best_pt, best_coupling = results[0]
    for key, pt, coupling in results[1:]:
        if key > best_key:
            best_key, best_pt, best_coupling = key, pt, coupling
    return BruteForceResult(best_pt, best_coupling, len(results))
