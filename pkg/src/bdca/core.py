"""Core net-benefit algebra and the domain types shared by every engine.

Net benefit is measured in net true positives per patient.  At a decision
threshold ``t`` each false positive costs ``w = t / (1 - t)`` true
positives, so a strategy with prevalence ``p``, sensitivity ``se`` and
specificity ``sp`` has net benefit ``se*p - (1 - sp)*(1 - p)*w``.

Everything here is a pure function of its arguments; no shared mutable
state, safe to call from any thread.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TREAT_ALL = "treat all"
TREAT_NONE = "treat none"
RESERVED_STRATEGY_NAMES = frozenset({TREAT_ALL, TREAT_NONE})

STRATEGY_KINDS = ("model", "binary-test", "treat-all", "treat-none")


def validate_threshold(t: float) -> float:
    """Check 0 <= t < 1 and return t as a float.

    Thresholds of 1 or more are rejected because the false-positive weight
    t/(1-t) would be infinite.
    """
    t = float(t)
    if not 0.0 <= t < 1.0:
        raise ValueError(f"decision threshold must be in [0, 1), got {t}")
    return t


def weight(t: float) -> float:
    """Odds weight w = t/(1-t) of a false positive at threshold t."""
    t = validate_threshold(t)
    return t / (1.0 - t)


@dataclass(frozen=True)
class StrategyId:
    """A named decision strategy.

    kind is one of 'model' (continuous risk score), 'binary-test'
    (scores restricted to {0, 1}), or the implicit defaults 'treat-all'
    and 'treat-none' that every analysis carries.
    """

    name: str
    kind: str = "model"

    def __post_init__(self):
        if self.kind not in STRATEGY_KINDS:
            raise ValueError(f"unknown strategy kind {self.kind!r}")

    @property
    def is_default(self) -> bool:
        return self.kind in ("treat-all", "treat-none")


TREAT_ALL_ID = StrategyId(TREAT_ALL, "treat-all")
TREAT_NONE_ID = StrategyId(TREAT_NONE, "treat-none")


@dataclass(frozen=True)
class ThresholdGrid:
    """Strictly increasing thresholds, all in [0, 1)."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.size == 0:
            raise ValueError("threshold grid must be a non-empty 1-d sequence")
        if np.any(vals < 0.0) or np.any(vals >= 1.0):
            raise ValueError("thresholds must lie in [0, 1)")
        if np.any(np.diff(vals) <= 0.0):
            raise ValueError("thresholds must be strictly increasing")
        object.__setattr__(self, "values", vals)

    @classmethod
    def default(cls) -> "ThresholdGrid":
        # 0.00 .. 0.50 in steps of 0.01 (51 points).
        return cls(np.round(np.arange(51) * 0.01, 10))

    @classmethod
    def from_range(cls, lo: float, hi: float, step: float) -> "ThresholdGrid":
        if step <= 0:
            raise ValueError("step must be positive")
        n = int(round((hi - lo) / step))
        vals = lo + step * np.arange(n + 1)
        vals = np.round(vals[vals <= hi + 1e-12], 12)
        return cls(vals)

    @property
    def weights(self) -> np.ndarray:
        return self.values / (1.0 - self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


@dataclass(frozen=True)
class RatesTriple:
    """Prevalence, sensitivity and specificity, each in [0, 1]."""

    prevalence: float
    sensitivity: float
    specificity: float

    def __post_init__(self):
        for name in ("prevalence", "sensitivity", "specificity"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")


def nb_from_rates(rates: RatesTriple, t: float) -> float:
    """Net benefit se*p - (1-sp)*(1-p)*w at threshold t."""
    w = weight(t)
    p = rates.prevalence
    return rates.sensitivity * p - (1.0 - rates.specificity) * (1.0 - p) * w


def nb_treat_all(p: float, t: float) -> float:
    """Net benefit of treating everyone: p - w*(1-p).

    Equals nb_from_rates with se=1 and sp=0.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"prevalence must be in [0, 1], got {p}")
    return p - weight(t) * (1.0 - p)


@dataclass
class NetBenefitDrawCube:
    """Aligned Monte Carlo net-benefit draws, indexed (draw, threshold, strategy).

    The strategy axis always ends with the 'treat all' and 'treat none'
    defaults; the treat-none slice is identically zero.  For binary
    outcomes every strategy and threshold within one draw index shares the
    same prevalence draw, so differences between slices are estimated with
    the correct posterior correlation.
    """

    draws: np.ndarray
    thresholds: ThresholdGrid
    strategies: list[StrategyId]
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self):
        d = np.asarray(self.draws, dtype=np.float64)
        if d.ndim != 3:
            raise ValueError("draws must have shape (draw, threshold, strategy)")
        if d.shape[1] != len(self.thresholds):
            raise ValueError("threshold axis does not match the grid")
        if d.shape[2] != len(self.strategies):
            raise ValueError("strategy axis does not match the strategy list")
        names = [s.name for s in self.strategies]
        if len(set(names)) != len(names):
            raise ValueError("strategy names must be unique")
        if TREAT_ALL not in names or TREAT_NONE not in names:
            raise ValueError("cube must include the treat all / treat none defaults")
        if not np.all(d[:, :, names.index(TREAT_NONE)] == 0.0):
            raise ValueError("treat-none slice must be identically zero")
        self.draws = d

    @property
    def draw_count(self) -> int:
        return self.draws.shape[0]

    def strategy_index(self, name: str) -> int:
        for i, s in enumerate(self.strategies):
            if s.name == name:
                return i
        raise KeyError(f"unknown strategy {name!r}")

    def slice(self, name: str) -> np.ndarray:
        """(draw, threshold) net-benefit draws of one strategy."""
        return self.draws[:, :, self.strategy_index(name)]
