"""Closed-form Gaussian strategy regions for the relay broadcast channel.

Signal model: the relay hears Y1 = X + Zr, receiver 1 hears Y = X + X1 + Z1,
receiver 2 hears Z = X + X1 + Z2, with Zr ~ N(0, Nr), Z1 ~ N(0, N1),
Z2 ~ N(0, N2), E[X^2] <= P1 and E[X1^2] <= P2.  Every formula below is valid
only under the less-noisy ordering P1 + N1 <= N2 (receiver 1 is the stronger
one); outside it the operations raise rather than extrapolate.

Two message configurations are covered:

  B ops (b_*): two confidential messages; a point is (R1max, R2max).
  C ops (c_*): one confidential + one common message; a point is (R0max, R1max).

`alpha` always allocates transmit power to the confidential layer and `beta`
(B ops only) to the common layer.  The decode-forward construction also has a
relay power split; it cancels out of every displayed rate, so it is not a
parameter here.

Negative closed-form values are clamped to zero in the returned pairs, except
`cf_rstar_max`, whose sign is the compress-forward feasibility signal.  The
`alpha`/`beta` arguments accept numpy arrays for grid sweeps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError, ModelAssumptionError, ValidationError

RSTAR_SLACK = 1e-9  # tolerance when checking R* against its budget


@dataclass(frozen=True)
class GaussianNetwork:
    """Power and noise parameters (P1, P2, N1, N2, Nr), all positive."""

    p1: float
    p2: float
    n1: float
    n2: float
    nr: float

    def __post_init__(self) -> None:
        for name in ("p1", "p2", "n1", "n2", "nr"):
            v = float(getattr(self, name))
            object.__setattr__(self, name, v)
            if not math.isfinite(v) or v <= 0.0:
                raise ValidationError(f"GaussianNetwork: {name} must be positive, got {v!r}")

    @property
    def less_noisy_to_rx1(self) -> bool:
        return self.p1 + self.n1 <= self.n2

    def require_ordering(self) -> None:
        if not self.less_noisy_to_rx1:
            raise ModelAssumptionError(
                f"closed forms require the less-noisy ordering P1 + N1 <= N2; "
                f"got P1 + N1 = {self.p1 + self.n1} > N2 = {self.n2}"
            )

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.p1, self.p2, self.n1, self.n2, self.nr)


@dataclass(frozen=True)
class StrategyParams:
    """Free coding parameters swept to trace a region.

    alpha, beta: power fractions in [0, 1]; q: compression noise variance
    (compress-forward only); rstar: pure-noise rate (compress-forward only,
    checked against `cf_rstar_max` at use time).
    """

    alpha: float
    beta: float = 0.0
    q: float | None = None
    rstar: float | None = None

    def __post_init__(self) -> None:
        for name in ("alpha", "beta"):
            v = float(getattr(self, name))
            object.__setattr__(self, name, v)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"StrategyParams: {name} must lie in [0, 1], got {v!r}")
        if self.q is not None:
            q = float(self.q)
            object.__setattr__(self, "q", q)
            if not math.isfinite(q) or q <= 0.0:
                raise ValidationError(f"StrategyParams: q must be positive, got {q!r}")
        if self.rstar is not None:
            rs = float(self.rstar)
            object.__setattr__(self, "rstar", rs)
            if not math.isfinite(rs) or rs < 0.0:
                raise ValidationError(f"StrategyParams: rstar must be >= 0, got {rs!r}")

    def key(self) -> tuple[float, float, float, float]:
        return (
            self.alpha,
            self.beta,
            self.q if self.q is not None else -1.0,
            self.rstar if self.rstar is not None else -1.0,
        )


@dataclass(frozen=True)
class RatePair:
    """(R1, R2) for B ops, (R0, R1) for C ops; `active` labels the min-branch
    taken per component, for plot annotation."""

    first: float
    second: float
    active: tuple[str, ...] = ()


def _hl(x):
    """Half the base-2 log; the building block of every Gaussian rate."""
    return 0.5 * np.log2(x)


def _clamp(x):
    return np.maximum(x, 0.0)


def _pick(*branches):
    """Left-to-right min with the index of the first minimizing branch."""
    stacked = np.stack(np.broadcast_arrays(*branches))
    idx = np.argmin(stacked, axis=0)
    # argmin returns the first minimizing index, which is the leftmost branch
    return stacked.min(axis=0), idx


def _df_arrays(net: GaussianNetwork, a, b):
    p1, _, n1, n2, _ = net.as_tuple()
    s = (1.0 - b) * p1
    r1 = _hl((s + n1) / (s * (1.0 - a) + n1)) - _hl((s * a + n2) / n2)
    r2 = _hl((s + n2) / (s * a + n2)) - _hl((s * (1.0 - a) + n1) / n1)
    return _clamp(r1), _clamp(r2)


def _nf_arrays(net: GaussianNetwork, a, b):
    p1, p2, n1, n2, _ = net.as_tuple()
    s = (1.0 - b) * p1
    secret = _hl((s + n1) / (s * (1.0 - a) + n1))
    direct = np.minimum(_hl((p1 + n1) / (s + n1)), _hl((p1 + p2 + n2) / (s + p2 + n2))) + secret
    relay_budget = min(_hl((p2 + n2) / n2), _hl((p1 + p2 + n1) / (p1 + n1)))
    secrecy = relay_budget + secret - _hl((s * a + p2 + n2) / n2)
    r1 = np.minimum(direct, secrecy)
    r2 = _hl((s + p2 + n2) / (s * a + p2 + n2)) - _hl((s * (1.0 - a) + n1) / n1)
    return _clamp(r1), _clamp(r2), direct, secrecy


def cf_rstar_max(net: GaussianNetwork, q: float) -> float:
    """Upper limit of the pure-noise rate R* for compression noise variance q.

    Returned unclamped: a negative value signals that compress-forward is
    infeasible at this q (the compression cost exceeds the relay rate).
    """
    if not (math.isfinite(q) and q > 0.0):
        raise ValidationError(f"cf_rstar_max: q must be positive, got {q!r}")
    p1, p2, n1, n2, nr = net.as_tuple()
    relay_budget = min(_hl((p2 + n2) / n2), _hl((p1 + p2 + n1) / (p1 + n1)))
    return float(relay_budget - _hl((p1 + q + nr) / q))


def _cf_arrays(net: GaussianNetwork, a, b, q: float, rstar: float):
    p1, p2, n1, n2, nr = net.as_tuple()
    s = (1.0 - b) * p1
    nq = nr + q
    eff = nq + n1
    secret = _hl((s * eff + n1 * nq) / (s * (1.0 - a) * eff + n1 * nq))
    direct = (
        np.minimum(
            _hl((p1 * eff + n1 * nq) / (s * eff + n1 * nq)),
            _hl((p1 + p2 + n2) / (s + p2 + n2)),
        )
        + secret
    )
    secrecy = rstar + secret - _hl((s * a + p2 + n2) / n2)
    r1 = np.minimum(direct, secrecy)
    r2 = _hl((s + p2 + n2) / (s * a + p2 + n2)) - _hl((s * (1.0 - a) + n1) / n1)
    return _clamp(r1), _clamp(r2), direct, secrecy


def _check_cf_params(net: GaussianNetwork, sp: StrategyParams) -> tuple[float, float]:
    if sp.q is None:
        raise ValidationError("compress-forward needs a compression variance q")
    limit = cf_rstar_max(net, sp.q)
    rstar = sp.rstar if sp.rstar is not None else max(limit, 0.0)
    if rstar > limit + RSTAR_SLACK or limit < -RSTAR_SLACK:
        raise InfeasibleError(
            f"R* = {rstar:.6g} exceeds the compress-forward budget "
            f"cf_rstar_max = {limit:.6g} at q = {sp.q:.6g}",
            limit=limit,
        )
    return sp.q, rstar


def b_df(net: GaussianNetwork, sp: StrategyParams) -> RatePair:
    """Decode-forward region corner for the two-confidential-message model."""
    net.require_ordering()
    r1, r2 = _df_arrays(net, sp.alpha, sp.beta)
    return RatePair(float(r1), float(r2))


def b_baseline_norelay(net: GaussianNetwork, sp: StrategyParams) -> RatePair:
    """Two-confidential-message corner with the relay removed.

    Coincides with `b_df` pointwise: decoding-and-forwarding cannot enlarge
    this secrecy region, so the same closed form serves both.
    """
    net.require_ordering()
    r1, r2 = _df_arrays(net, sp.alpha, sp.beta)
    return RatePair(float(r1), float(r2))


def b_nf(net: GaussianNetwork, sp: StrategyParams) -> RatePair:
    """Noise-forward corner: the relay transmits pure confusion noise."""
    net.require_ordering()
    r1, r2, direct, secrecy = _nf_arrays(net, sp.alpha, sp.beta)
    branch = "r1=direct" if direct <= secrecy else "r1=secrecy"
    return RatePair(float(r1), float(r2), (branch,))


def b_cf(net: GaussianNetwork, sp: StrategyParams) -> RatePair:
    """Compress-forward corner: quantized relay observation plus noise rate R*."""
    net.require_ordering()
    q, rstar = _check_cf_params(net, sp)
    r1, r2, direct, secrecy = _cf_arrays(net, sp.alpha, sp.beta, q, rstar)
    branch = "r1=direct" if direct <= secrecy else "r1=secrecy"
    return RatePair(float(r1), float(r2), (branch,))


def _c_df_arrays(net: GaussianNetwork, a):
    p1, p2, n1, n2, nr = net.as_tuple()
    arms = (
        _hl((p1 + nr) / (a * p1 + nr)),
        _hl((p1 + p2 + n1) / (a * p1 + n1)),
        _hl((p1 + p2 + n2) / (a * p1 + n2)),
    )
    r0, idx = _pick(*arms)
    r1 = _hl((a * p1 + n1) / n1) - _hl((a * p1 + n2) / n2)
    return _clamp(r0), _clamp(r1), idx


def _c_nf_arrays(net: GaussianNetwork, a):
    p1, p2, n1, n2, _ = net.as_tuple()
    r0, idx = _pick(
        _hl((p1 + n1) / (a * p1 + n1)),
        _hl((p1 + p2 + n2) / (a * p1 + p2 + n2)),
    )
    relay_budget = min(_hl((p2 + n2) / n2), _hl((p1 + p2 + n1) / (p1 + n1)))
    r1 = relay_budget + _hl((a * p1 + n1) / n1) - _hl((a * p1 + p2 + n2) / n2)
    return _clamp(r0), _clamp(r1), idx


def _c_cf_arrays(net: GaussianNetwork, a, q: float, rstar: float):
    p1, p2, n1, n2, nr = net.as_tuple()
    nq = nr + q
    eff = nq + n1
    r0, idx = _pick(
        _hl((p1 * eff + n1 * nq) / (a * p1 * eff + n1 * nq)),
        _hl((p1 + p2 + n2) / (a * p1 + p2 + n2)),
    )
    r1 = rstar + _hl((a * p1 * eff + n1 * nq) / (n1 * nq)) - _hl((a * p1 + p2 + n2) / n2)
    return _clamp(r0), _clamp(r1), idx


def _c_baseline_arrays(net: GaussianNetwork, a):
    p1, _, n1, n2, _ = net.as_tuple()
    r0, idx = _pick(
        _hl((p1 + n1) / (a * p1 + n1)),
        _hl((p1 + n2) / (a * p1 + n2)),
    )
    r1 = _hl((a * p1 + n1) / n1) - _hl((a * p1 + n2) / n2)
    return _clamp(r0), _clamp(r1), idx


def c_df(net: GaussianNetwork, alpha: float) -> RatePair:
    """Decode-forward corner for the common + confidential message model."""
    net.require_ordering()
    r0, r1, idx = _c_df_arrays(net, float(alpha))
    return RatePair(float(r0), float(r1), (f"r0=arm{int(idx) + 1}",))


def c_nf(net: GaussianNetwork, alpha: float) -> RatePair:
    net.require_ordering()
    r0, r1, idx = _c_nf_arrays(net, float(alpha))
    return RatePair(float(r0), float(r1), (f"r0=arm{int(idx) + 1}",))


def c_cf(net: GaussianNetwork, alpha: float, q: float, rstar: float | None = None) -> RatePair:
    net.require_ordering()
    sp = StrategyParams(alpha=float(alpha), q=q, rstar=rstar)
    qv, rs = _check_cf_params(net, sp)
    r0, r1, idx = _c_cf_arrays(net, float(alpha), qv, rs)
    return RatePair(float(r0), float(r1), (f"r0=arm{int(idx) + 1}",))


def c_baseline(net: GaussianNetwork, alpha: float) -> RatePair:
    """Relay-free secrecy capacity corner for the common + confidential model."""
    net.require_ordering()
    r0, r1, idx = _c_baseline_arrays(net, float(alpha))
    return RatePair(float(r0), float(r1), (f"r0=arm{int(idx) + 1}",))
