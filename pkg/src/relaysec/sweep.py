"""Parameter sweeps, Pareto filtering, and tabular region boundaries.

Grids are inclusive-endpoint grids on [0, 1]; `*_steps` counts grid points.
Sweeps evaluate the closed forms on whole grids at once (numpy), keep the
Pareto-maximal corners, and attach full parameter provenance (alpha, beta, q,
R*, active min-branch) to every surviving point so CSV consumers can annotate
plots.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InfeasibleError, UsageError, ValidationError
from .gaussian import (
    GaussianNetwork,
    RatePair,
    StrategyParams,
    _c_baseline_arrays,
    _c_cf_arrays,
    _c_df_arrays,
    _c_nf_arrays,
    _cf_arrays,
    _df_arrays,
    _nf_arrays,
    b_baseline_norelay,
    b_cf,
    b_df,
    b_nf,
    c_baseline,
    c_cf,
    c_df,
    c_nf,
    cf_rstar_max,
)

RSTAR_POLICIES = ("max", "grid")
_NOQ = -1.0  # sentinel for "no q / no rstar" in provenance sort columns


@dataclass(frozen=True)
class GridSpec:
    """Sweep resolution: inclusive endpoint grids plus compress-forward knobs."""

    alpha_steps: int = 401
    beta_steps: int = 401
    q_values: tuple[float, ...] = (300.0,)
    rstar_policy: str = "max"
    rstar_steps: int = 8

    def __post_init__(self) -> None:
        object.__setattr__(self, "q_values", tuple(float(q) for q in self.q_values))
        if self.alpha_steps < 2 or self.beta_steps < 2:
            raise ValidationError("GridSpec: alpha_steps and beta_steps must be >= 2")
        if any(q <= 0.0 for q in self.q_values):
            raise ValidationError("GridSpec: q_values must be positive")
        if self.rstar_policy not in RSTAR_POLICIES:
            raise ValidationError(
                f"GridSpec: rstar_policy must be one of {RSTAR_POLICIES}, got {self.rstar_policy!r}"
            )
        if self.rstar_policy == "grid" and self.rstar_steps < 2:
            raise ValidationError("GridSpec: rstar_steps must be >= 2 for the grid policy")


@dataclass(frozen=True)
class Strategy:
    strategy_id: str
    config: str  # "B" or "C"
    label: str  # short name used in CSV columns / scenario files
    uses_q: bool


STRATEGIES: dict[str, Strategy] = {
    s.strategy_id: s
    for s in (
        Strategy("b_df", "B", "df", False),
        Strategy("b_nf", "B", "nf", False),
        Strategy("b_cf", "B", "cf", True),
        Strategy("b_baseline", "B", "baseline", False),
        Strategy("c_df", "C", "df", False),
        Strategy("c_nf", "C", "nf", False),
        Strategy("c_cf", "C", "cf", True),
        Strategy("c_baseline", "C", "baseline", False),
    )
}


def resolve_strategy(name: str, config: str | None = None) -> Strategy:
    """Accept either a full id ("b_df") or a short label plus config ("df", "B")."""
    if name in STRATEGIES:
        return STRATEGIES[name]
    if config is not None:
        key = f"{config.lower()}_{name}"
        if key in STRATEGIES:
            return STRATEGIES[key]
    raise UsageError(
        f"unknown strategy {name!r}"
        + (f" for model {config!r}" if config is not None else "")
    )


def evaluate_strategy(strategy_id: str, net: GaussianNetwork, sp: StrategyParams) -> RatePair:
    """Single-point evaluation of any registered strategy."""
    s = resolve_strategy(strategy_id)
    if s.config == "B":
        fn = {"df": b_df, "nf": b_nf, "cf": b_cf, "baseline": b_baseline_norelay}[s.label]
        return fn(net, sp)
    if s.label == "cf":
        return c_cf(net, sp.alpha, sp.q, sp.rstar)
    fn = {"df": c_df, "nf": c_nf, "baseline": c_baseline}[s.label]
    return fn(net, sp.alpha)


@dataclass(frozen=True)
class FrontierPoint:
    rates: RatePair
    params: StrategyParams


@dataclass(frozen=True)
class Frontier:
    strategy_id: str
    net: GaussianNetwork
    points: tuple[FrontierPoint, ...]

    def __post_init__(self) -> None:
        firsts = [p.rates.first for p in self.points]
        if any(b <= a for a, b in zip(firsts, firsts[1:])):
            raise ValidationError("Frontier: first coordinates must be strictly increasing")
        seconds = [p.rates.second for p in self.points]
        # Together with strictly increasing firsts this is Pareto-maximality.
        if any(b >= a for a, b in zip(seconds, seconds[1:])):
            raise ValidationError("Frontier: contains a dominated or duplicate point")

    def max_first(self) -> float:
        return max((p.rates.first for p in self.points), default=0.0)

    def max_second(self) -> float:
        return max((p.rates.second for p in self.points), default=0.0)


@dataclass(frozen=True)
class CurveSample:
    alpha: float
    value: float
    params: StrategyParams


@dataclass(frozen=True)
class Curve:
    strategy_id: str
    net: GaussianNetwork
    samples: tuple[CurveSample, ...]

    def __post_init__(self) -> None:
        alphas = [s.alpha for s in self.samples]
        if any(b <= a for a, b in zip(alphas, alphas[1:])):
            raise ValidationError("Curve: alphas must be strictly increasing")
        if not self.samples or self.samples[0].alpha != 0.0 or self.samples[-1].alpha != 1.0:
            raise ValidationError("Curve: alpha grid must cover [0, 1]")

    def value_at(self, alpha: float, atol: float = 1e-12) -> float:
        for s in self.samples:
            if abs(s.alpha - alpha) <= atol:
                return s.value
        raise UsageError(f"alpha {alpha} is not on the curve grid")


def _pareto_survivors(
    first: np.ndarray, second: np.ndarray, prov_cols: Sequence[np.ndarray]
) -> np.ndarray:
    """Indices of the Pareto-maximal points, ascending in the first coordinate.

    Exact coordinate duplicates collapse to the provenance-lexicographically
    smallest one (columns given most significant first).
    """
    keys = tuple(reversed(prov_cols)) + (-second, -first)
    order = np.lexsort(keys)
    ss = second[order]
    prev_best = np.concatenate(([-np.inf], np.maximum.accumulate(ss)[:-1]))
    keep = ss > prev_best
    return order[keep][::-1]


def pareto_filter(points: Sequence[RatePair]) -> list[RatePair]:
    """Exactly the Pareto-maximal subset; duplicates collapse to one point.

    Idempotent and independent of input order; result sorted by first
    coordinate ascending.
    """
    if not points:
        return []
    first = np.array([p.first for p in points], dtype=np.float64)
    second = np.array([p.second for p in points], dtype=np.float64)
    if not (np.all(np.isfinite(first)) and np.all(np.isfinite(second))):
        raise ValidationError("pareto_filter: coordinates must be finite")
    if np.any(first < 0.0) or np.any(second < 0.0):
        raise ValidationError("pareto_filter: coordinates must be nonnegative")
    keep = _pareto_survivors(first, second, ())
    return [RatePair(float(first[i]), float(second[i])) for i in keep]


def _alpha_grid(steps: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, steps)


def _rstar_values(net: GaussianNetwork, q: float, grid: GridSpec) -> list[float] | None:
    """R* values to sweep at a given q; None when CF is infeasible there."""
    limit = cf_rstar_max(net, q)
    if limit < 0.0:
        return None
    if grid.rstar_policy == "max":
        return [limit]
    return [float(v) for v in np.linspace(0.0, limit, grid.rstar_steps)]


def _b_param_slices(net: GaussianNetwork, strategy: Strategy, grid: GridSpec):
    """Yield ((q, rstar), A, B, r1, r2) over the alpha x beta grid."""
    alphas = _alpha_grid(grid.alpha_steps)
    betas = _alpha_grid(grid.beta_steps)
    A, B = np.meshgrid(alphas, betas, indexing="ij")
    if strategy.label in ("df", "baseline"):
        r1, r2 = _df_arrays(net, A, B)
        yield (None, None), A, B, r1, r2
    elif strategy.label == "nf":
        r1, r2, _, _ = _nf_arrays(net, A, B)
        yield (None, None), A, B, r1, r2
    else:
        for q in grid.q_values:
            rstars = _rstar_values(net, q, grid)
            if rstars is None:
                continue  # this q cannot pay for its own compression
            for rs in rstars:
                r1, r2, _, _ = _cf_arrays(net, A, B, q, rs)
                yield (q, rs), A, B, r1, r2


def _c_param_slices(net: GaussianNetwork, strategy: Strategy, grid: GridSpec):
    alphas = _alpha_grid(grid.alpha_steps)
    if strategy.label in ("df", "nf", "baseline"):
        fn = {
            "df": _c_df_arrays,
            "nf": _c_nf_arrays,
            "baseline": _c_baseline_arrays,
        }[strategy.label]
        r0, r1, _ = fn(net, alphas)
        yield (None, None), alphas, r0, r1
    else:
        for q in grid.q_values:
            rstars = _rstar_values(net, q, grid)
            if rstars is None:
                continue
            for rs in rstars:
                r0, r1, _ = _c_cf_arrays(net, alphas, q, rs)
                yield (q, rs), alphas, r0, r1


def sweep_frontier(strategy_id: str, net: GaussianNetwork, grid: GridSpec) -> Frontier:
    """Evaluate the strategy over the whole grid and Pareto-filter the corners."""
    strategy = resolve_strategy(strategy_id)
    net.require_ordering()
    cols: dict[str, list[np.ndarray]] = {k: [] for k in ("f", "s", "a", "b", "q", "r")}
    if strategy.config == "B":
        for (q, rs), A, B, r1, r2 in _b_param_slices(net, strategy, grid):
            n = r1.size
            cols["f"].append(r1.ravel())
            cols["s"].append(r2.ravel())
            cols["a"].append(A.ravel())
            cols["b"].append(B.ravel())
            cols["q"].append(np.full(n, q if q is not None else _NOQ))
            cols["r"].append(np.full(n, rs if rs is not None else _NOQ))
    else:
        for (q, rs), alphas, r0, r1 in _c_param_slices(net, strategy, grid):
            n = np.size(r0)
            cols["f"].append(np.ravel(r0))
            cols["s"].append(np.ravel(r1))
            cols["a"].append(np.ravel(alphas))
            cols["b"].append(np.zeros(n))
            cols["q"].append(np.full(n, q if q is not None else _NOQ))
            cols["r"].append(np.full(n, rs if rs is not None else _NOQ))
    if not cols["f"]:
        return Frontier(strategy.strategy_id, net, ())
    f, s, a, b, qc, rc = (np.concatenate(cols[k]) for k in ("f", "s", "a", "b", "q", "r"))
    keep = _pareto_survivors(f, s, (a, b, qc, rc))
    points = []
    for i in keep:
        sp = StrategyParams(
            alpha=float(a[i]),
            beta=float(b[i]),
            q=None if qc[i] == _NOQ else float(qc[i]),
            rstar=None if rc[i] == _NOQ else float(rc[i]),
        )
        active = evaluate_strategy(strategy.strategy_id, net, sp).active
        points.append(FrontierPoint(RatePair(float(f[i]), float(s[i]), active), sp))
    return Frontier(strategy.strategy_id, net, tuple(points))


def max_r1_vs_alpha(
    strategy_id: str,
    net: GaussianNetwork,
    alpha_steps: int,
    beta_steps: int,
    q: float | None = None,
    rstar_policy: str = "max",
    rstar_steps: int = 8,
) -> Curve:
    """Best confidential rate R1 per alpha, maximized over the other knobs."""
    strategy = resolve_strategy(strategy_id)
    net.require_ordering()
    if strategy.uses_q and q is None:
        raise UsageError(f"{strategy.strategy_id} needs a compression variance q")
    grid = GridSpec(
        alpha_steps=alpha_steps,
        beta_steps=beta_steps,
        q_values=(q,) if q is not None else (300.0,),
        rstar_policy=rstar_policy,
        rstar_steps=rstar_steps,
    )
    alphas = _alpha_grid(alpha_steps)

    best_val: np.ndarray | None = None
    best_meta: list[tuple[float | None, float | None, float | None]] | None = None
    if strategy.config == "B":
        for (qv, rs), _, B, r1, _ in _b_param_slices(net, strategy, grid):
            idx = np.argmax(r1, axis=1)
            vals = r1[np.arange(len(alphas)), idx]
            metas = [(float(B[i, j]), qv, rs) for i, j in enumerate(idx)]
            if best_val is None:
                best_val, best_meta = vals, metas
            else:
                switch = vals > best_val
                best_val = np.where(switch, vals, best_val)
                best_meta = [m if w else old for m, old, w in zip(metas, best_meta, switch)]
    else:
        for (qv, rs), _, _, r1 in _c_param_slices(net, strategy, grid):
            vals = np.asarray(r1)
            metas = [(None, qv, rs)] * len(alphas)
            if best_val is None:
                best_val, best_meta = vals, metas
            else:
                switch = vals > best_val
                best_val = np.where(switch, vals, best_val)
                best_meta = [m if w else old for m, old, w in zip(metas, best_meta, switch)]
    if best_val is None:
        raise InfeasibleError(
            f"compress-forward infeasible at q={q}: cf_rstar_max(q) < 0",
            limit=cf_rstar_max(net, q) if q is not None else None,
        )
    samples = tuple(
        CurveSample(
            float(al),
            float(v),
            StrategyParams(alpha=float(al), beta=m[0] if m[0] is not None else 0.0, q=m[1], rstar=m[2]),
        )
        for al, v, m in zip(alphas, best_val, best_meta)
    )
    return Curve(strategy.strategy_id, net, samples)


def region_boundary(strategy_id: str, net: GaussianNetwork, grid: GridSpec) -> Frontier:
    """Staircase of Pareto-maximal (R0max, R1max) corners over the sweep."""
    strategy = resolve_strategy(strategy_id)
    if strategy.config != "C":
        raise UsageError(
            f"region_boundary applies to the common+confidential strategies, not {strategy_id}"
        )
    return sweep_frontier(strategy_id, net, grid)


def convex_hull_filter(points: Sequence[RatePair]) -> list[RatePair]:
    """Upper-concave envelope of a frontier (optional time-sharing closure)."""
    pts = pareto_filter(points)
    if len(pts) <= 2:
        return pts
    hull: list[RatePair] = []
    for p in pts:
        while len(hull) >= 2:
            x1, y1 = hull[-2].first, hull[-2].second
            x2, y2 = hull[-1].first, hull[-1].second
            if (x2 - x1) * (p.second - y1) - (y2 - y1) * (p.first - x1) >= 0.0:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull
