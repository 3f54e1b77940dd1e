"""Grid functions with a role tag."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KINDS = ("density", "probability", "ratio", "observable", "stationary")

_PROB_SUM_TOL = 1e-12


@dataclass(frozen=True)
class FieldVec:
    """Per-node real values plus a tag saying what they represent.

    Probability fields are validated on construction: entries must be
    nonnegative and sum to one within 1e-12.  Values are stored as a
    float64 array and should be treated as immutable.
    """

    values: np.ndarray
    kind: str = "density"

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size == 0:
            raise ValueError("FieldVec needs a non-empty 1-D array")
        object.__setattr__(self, "values", vals)
        if self.kind not in KINDS:
            raise ValueError(f"unknown field kind {self.kind!r}, expected one of {KINDS}")
        if self.kind == "probability":
            if np.any(vals < 0.0):
                raise ValueError("probability field has negative entries")
            total = float(vals.sum())
            if abs(total - 1.0) > _PROB_SUM_TOL:
                raise ValueError(f"probability field sums to {total!r}, not 1")

    def __len__(self) -> int:
        return self.values.size

    @classmethod
    def probability(cls, values) -> "FieldVec":
        return cls(np.asarray(values, dtype=float), "probability")

    @classmethod
    def density(cls, values) -> "FieldVec":
        return cls(np.asarray(values, dtype=float), "density")

    @classmethod
    def stationary(cls, values) -> "FieldVec":
        return cls(np.asarray(values, dtype=float), "stationary")

    @classmethod
    def observable(cls, values) -> "FieldVec":
        return cls(np.asarray(values, dtype=float), "observable")

    @classmethod
    def ratio(cls, values) -> "FieldVec":
        return cls(np.asarray(values, dtype=float), "ratio")


def as_values(v) -> np.ndarray:
    """Accept a FieldVec or a plain array, return the float64 values."""
    if isinstance(v, FieldVec):
        return v.values
    return np.asarray(v, dtype=float)
