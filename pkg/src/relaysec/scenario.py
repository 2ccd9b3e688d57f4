"""Scenario files: JSON descriptions of a full experiment.

Schema (unknown keys are rejected):

  Gaussian scenarios (model "B" or "C"):
    {
      "model": "B",
      "net": {"p1": 5.0, "p2": 3.0, "n1": 2.0, "n2": 8.0, "nr": 2.0},
      "strategies": ["df", "nf", "cf"],            # optional, model defaults
      "grid": {"alpha_steps": 401, "beta_steps": 401,
               "q_values": [300.0], "rstar_policy": "max",
               "rstar_steps": 8},                   # optional, these defaults
      "output": "fig4.csv"                          # optional default --out
    }

  Discrete scenarios (model "DMC"); file paths resolve relative to the
  scenario file:
    {
      "model": "DMC",
      "dmc_model": "dmc_model.json",
      "coupling": "dmc_coupling.json",              # optional for searches
      "theorem": "T3",
      "rates": {"r0": 0, "r1": 0.05, "r2": 0, "re1": 0.05, "re2": 0},
      "tol": 1e-9,                                  # optional
      "output": "dmc_eval.csv"                      # optional
    }
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .bounds import AuxiliaryCoupling, theorem_spec
from .dmc import DMCModel, RateTuple
from .errors import ValidationError
from .gaussian import GaussianNetwork
from .sweep import GridSpec, resolve_strategy

DEFAULT_STRATEGIES = {"B": ("df", "nf", "cf"), "C": ("baseline", "df", "nf", "cf")}


@dataclass(frozen=True)
class Scenario:
    model: str
    net: GaussianNetwork | None = None
    strategies: tuple[str, ...] = ()
    grid: GridSpec = GridSpec()
    output: str | None = None
    dmc_model: DMCModel | None = None
    coupling: AuxiliaryCoupling | None = None
    theorem: str | None = None
    rates: RateTuple | None = None
    tol: float = 1e-9


def _reject_unknown(payload: dict, allowed: set[str], where: str) -> None:
    unknown = set(payload) - allowed
    if unknown:
        raise ValidationError(f"{where}: unknown field(s) {sorted(unknown)}")


def _parse_net(payload: object) -> GaussianNetwork:
    if not isinstance(payload, dict):
        raise ValidationError("scenario: 'net' must be an object with p1,p2,n1,n2,nr")
    _reject_unknown(payload, {"p1", "p2", "n1", "n2", "nr"}, "scenario net")
    try:
        return GaussianNetwork(**{k: float(payload[k]) for k in ("p1", "p2", "n1", "n2", "nr")})
    except KeyError as exc:
        raise ValidationError(f"scenario net: missing field {exc}") from exc


def _parse_grid(payload: object) -> GridSpec:
    if payload is None:
        return GridSpec()
    if not isinstance(payload, dict):
        raise ValidationError("scenario: 'grid' must be an object")
    allowed = {"alpha_steps", "beta_steps", "q_values", "rstar_policy", "rstar_steps"}
    _reject_unknown(payload, allowed, "scenario grid")
    kwargs = dict(payload)
    if "q_values" in kwargs:
        kwargs["q_values"] = tuple(float(q) for q in kwargs["q_values"])
    return GridSpec(**kwargs)


def _parse_rates(payload: object) -> RateTuple:
    if isinstance(payload, dict):
        _reject_unknown(payload, {"r0", "r1", "r2", "re1", "re2"}, "scenario rates")
        return RateTuple(**{k: float(v) for k, v in payload.items()})
    if isinstance(payload, (list, tuple)) and len(payload) == 5:
        return RateTuple(*(float(v) for v in payload))
    raise ValidationError(
        "scenario rates: expected {r0,r1,r2,re1,re2} object or 5-element list"
    )


def load_scenario(path: str) -> Scenario:
    """Parse and fully validate a scenario file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError(f"scenario {path}: cannot read ({exc})") from exc
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"scenario {path}: JSON parse failure at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(payload, dict):
        raise ValidationError(f"scenario {path}: top level must be an object")
    model = payload.get("model")
    if model not in ("B", "C", "DMC"):
        raise ValidationError(
            f"scenario {path}: 'model' must be one of B, C, DMC; got {model!r}"
        )

    if model in ("B", "C"):
        _reject_unknown(
            payload, {"model", "net", "strategies", "grid", "output"}, f"scenario {path}"
        )
        if "net" not in payload:
            raise ValidationError(f"scenario {path}: Gaussian scenarios need a 'net'")
        net = _parse_net(payload["net"])
        if not net.less_noisy_to_rx1:
            raise ValidationError(
                f"scenario {path}: the closed forms assume receiver 1 less noisy "
                f"(P1 + N1 <= N2), but P1 + N1 = {net.p1 + net.n1} > N2 = {net.n2}"
            )
        raw = payload.get("strategies", DEFAULT_STRATEGIES[model])
        strategies = tuple(str(s) for s in raw)
        if not strategies:
            raise ValidationError(f"scenario {path}: 'strategies' must not be empty")
        for s in strategies:
            resolve_strategy(s, model)  # raises on unknown labels
        return Scenario(
            model=model,
            net=net,
            strategies=strategies,
            grid=_parse_grid(payload.get("grid")),
            output=payload.get("output"),
        )

    _reject_unknown(
        payload,
        {"model", "dmc_model", "coupling", "theorem", "rates", "tol", "output"},
        f"scenario {path}",
    )
    if "dmc_model" not in payload or "theorem" not in payload:
        raise ValidationError(f"scenario {path}: DMC scenarios need 'dmc_model' and 'theorem'")
    theorem = str(payload["theorem"])
    theorem_spec(theorem)  # raises on unknown ids
    base = os.path.dirname(os.path.abspath(path))

    def resolve(ref: str) -> str:
        return ref if os.path.isabs(ref) else os.path.join(base, ref)

    model_path = resolve(str(payload["dmc_model"]))
    try:
        with open(model_path, "r", encoding="utf-8") as fh:
            dmc_model = DMCModel.from_json(fh.read())
    except OSError as exc:
        raise ValidationError(f"scenario {path}: cannot read dmc_model ({exc})") from exc

    coupling = None
    if "coupling" in payload:
        coupling_path = resolve(str(payload["coupling"]))
        try:
            with open(coupling_path, "r", encoding="utf-8") as fh:
                coupling = AuxiliaryCoupling.from_json(fh.read())
        except OSError as exc:
            raise ValidationError(f"scenario {path}: cannot read coupling ({exc})") from exc

    rates = _parse_rates(payload["rates"]) if "rates" in payload else RateTuple.zero()
    tol = float(payload.get("tol", 1e-9))
    if tol <= 0.0:
        raise ValidationError(f"scenario {path}: tol must be positive")
    return Scenario(
        model="DMC",
        dmc_model=dmc_model,
        coupling=coupling,
        theorem=theorem,
        rates=rates,
        tol=tol,
        output=payload.get("output"),
    )
