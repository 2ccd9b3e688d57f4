"""Discrete memoryless relay broadcast channel data types.

The channel has two inputs (transmitter X, relay X1) and three outputs
(receiver 1 sees Y, the relay sees Y1, receiver 2 sees Z), described by a
dense conditional table p(y, y1, z | x, x1).  Rate points are quintuples
(R0, R1, R2, Re1, Re2): a common-message rate, two confidential-message
rates and their equivocation components; reduced message configurations pin
the unused components at zero.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import UsageError, ValidationError
from .pmf import MASS_TOL

#: Canonical variable order used whenever a joint over several of these is built.
CANONICAL_VARS = ("U", "U1", "U2", "V", "V1", "V2", "X", "X1", "Y", "Y1", "Yh", "Z")

ADMISSIBILITY_SLACK = 1e-12


@dataclass(frozen=True)
class DMCModel:
    """Transition law p(y, y1, z | x, x1), indexed [x, x1, y, y1, z]."""

    transition: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.transition, dtype=np.float64)
        if arr.ndim != 5:
            raise ValidationError(
                f"DMCModel: transition must be indexed [x,x1,y,y1,z]; got {arr.ndim} axes"
            )
        if not np.all(np.isfinite(arr)):
            raise ValidationError("DMCModel: non-finite transition probability")
        if np.any(arr < 0.0):
            idx = np.unravel_index(int(np.argmax(arr < 0.0)), arr.shape)
            raise ValidationError(f"DMCModel: negative probability at {tuple(idx)}")
        slice_mass = arr.sum(axis=(2, 3, 4))
        bad = np.abs(slice_mass - 1.0) > MASS_TOL
        if np.any(bad):
            x, x1 = np.unravel_index(int(np.argmax(bad)), slice_mass.shape)
            raise ValidationError(
                f"DMCModel: conditional slice (x={x}, x1={x1}) sums to {slice_mass[x, x1]!r}"
            )
        object.__setattr__(self, "transition", arr)
        arr.setflags(write=False)

    @property
    def x_size(self) -> int:
        return self.transition.shape[0]

    @property
    def x1_size(self) -> int:
        return self.transition.shape[1]

    @property
    def y_size(self) -> int:
        return self.transition.shape[2]

    @property
    def y1_size(self) -> int:
        return self.transition.shape[3]

    @property
    def z_size(self) -> int:
        return self.transition.shape[4]

    def y1_conditional(self) -> np.ndarray:
        """p(y1 | x, x1), shape (x, x1, y1)."""
        return self.transition.sum(axis=(2, 4))

    def to_json(self) -> str:
        return json.dumps(
            {
                "x_size": self.x_size,
                "x1_size": self.x1_size,
                "y_size": self.y_size,
                "y1_size": self.y1_size,
                "z_size": self.z_size,
                "transition": self.transition.tolist(),
            },
            indent=2,
        )

    @classmethod
    def from_json_dict(cls, payload: dict) -> "DMCModel":
        try:
            arr = np.asarray(payload["transition"], dtype=np.float64)
            sizes = tuple(
                int(payload[k]) for k in ("x_size", "x1_size", "y_size", "y1_size", "z_size")
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"DMCModel JSON: malformed payload ({exc})") from exc
        if arr.shape != sizes:
            raise ValidationError(
                f"DMCModel JSON: transition shape {arr.shape} does not match declared sizes {sizes}"
            )
        return cls(arr)

    @classmethod
    def from_json(cls, text: str) -> "DMCModel":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(
                f"DMCModel JSON: parse failure at line {exc.lineno}: {exc.msg}"
            ) from exc
        return cls.from_json_dict(payload)


@dataclass(frozen=True)
class RateTuple:
    """A point (R0, R1, R2, Re1, Re2) in bits/channel-use.

    Equivocation components never exceed their message rates; reduced models
    keep unused components at 0.
    """

    r0: float = 0.0
    r1: float = 0.0
    r2: float = 0.0
    re1: float = 0.0
    re2: float = 0.0

    def __post_init__(self) -> None:
        for name in ("r0", "r1", "r2", "re1", "re2"):
            v = float(getattr(self, name))
            object.__setattr__(self, name, v)
            if not np.isfinite(v) or v < 0.0:
                raise ValidationError(f"RateTuple: {name} must be a finite nonnegative rate, got {v!r}")
        if self.re1 > self.r1 + ADMISSIBILITY_SLACK:
            raise ValidationError(
                f"RateTuple: admissibility Re1 <= R1 violated ({self.re1} > {self.r1})"
            )
        if self.re2 > self.r2 + ADMISSIBILITY_SLACK:
            raise ValidationError(
                f"RateTuple: admissibility Re2 <= R2 violated ({self.re2} > {self.r2})"
            )

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.r0, self.r1, self.r2, self.re1, self.re2)

    @classmethod
    def zero(cls) -> "RateTuple":
        return cls()

    def require_zero(self, *components: str) -> None:
        for name in components:
            if getattr(self, name) != 0.0:
                raise UsageError(
                    f"RateTuple: component {name} must be 0 for this message configuration"
                )
