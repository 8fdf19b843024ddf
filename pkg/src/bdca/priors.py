"""Prior configuration for the binary engine.

Beta priors are parameterized by mean and strength (pseudo-sample size),
which is easier to elicit than raw shape pairs.  The threshold-varying
prior encodes the monotone relationship between the decision threshold and
sensitivity/specificity: informative at the extremes of the grid, vague
inside a configurable "ignorance region" in between.

Every prior object exposes ``prevalence`` (a BetaParams) and
``se_sp(t, strategy)`` so the binary engine can stay agnostic about which
flavor it was given.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .binary import (
    UNIFORM,
    BetaParams,
    BinaryPosterior,
    cube_from_components,
    sample_components,
)
from .core import NetBenefitDrawCube, StrategyId, ThresholdGrid

DEFAULT_QUANTILES = (0.025, 0.25, 0.5, 0.75, 0.975)


@dataclass(frozen=True)
class MeanStrengthPrior:
    """Beta prior stated as a mean in (0, 1) and a strength > 0."""

    mean: float
    strength: float

    def __post_init__(self):
        if not 0.0 < self.mean < 1.0:
            raise ValueError(f"prior mean must be strictly inside (0, 1), got {self.mean}")
        if self.strength <= 0.0:
            raise ValueError(f"prior strength must be positive, got {self.strength}")


def to_beta(p: MeanStrengthPrior) -> BetaParams:
    """Beta(mean*strength, (1-mean)*strength)."""
    return BetaParams(p.mean * p.strength, (1.0 - p.mean) * p.strength)


def from_beta(b: BetaParams) -> MeanStrengthPrior:
    """Inverse of to_beta."""
    return MeanStrengthPrior(mean=b.mean, strength=b.strength)


@dataclass(frozen=True)
class UniformPrior:
    """Beta(1, 1) on every parameter at every threshold."""

    prevalence: BetaParams = UNIFORM

    def se_sp(self, t: float, strategy: StrategyId) -> tuple[BetaParams, BetaParams]:
        return UNIFORM, UNIFORM


@dataclass(frozen=True)
class FixedPrior:
    """The same se/sp prior at every threshold (natural for binary tests)."""

    se: BetaParams
    sp: BetaParams
    prevalence: BetaParams = UNIFORM

    def se_sp(self, t: float, strategy: StrategyId) -> tuple[BetaParams, BetaParams]:
        return self.se, self.sp


@dataclass(frozen=True)
class PerThresholdPrior:
    """Explicit (se, sp) Beta pairs, one per grid threshold."""

    grid: ThresholdGrid
    se: tuple[BetaParams, ...]
    sp: tuple[BetaParams, ...]
    prevalence: BetaParams = UNIFORM

    def __post_init__(self):
        if len(self.se) != len(self.grid) or len(self.sp) != len(self.grid):
            raise ValueError("need one (se, sp) prior pair per grid threshold")

    def se_sp(self, t: float, strategy: StrategyId) -> tuple[BetaParams, BetaParams]:
        idx = int(np.argmin(np.abs(self.grid.values - t)))
        if abs(self.grid.values[idx] - t) > 1e-9:
            raise KeyError(f"threshold {t} is not on this prior's grid")
        return self.se[idx], self.sp[idx]


@dataclass(frozen=True)
class ThresholdVaryingPrior:
    """Piecewise-linear mean/strength prior with an ignorance region.

    The prior mean sensitivity starts high at t_min, falls linearly to the
    region mean at a, stays flat (and vague) inside (a, b), then falls
    linearly to its minimum at t_max; the prior strength moves from its
    extreme value to the region value and back at the same rate.  The
    specificity mean mirrors the sensitivity mean (their sum is 1 at every
    threshold) with the same strength.

    Setting a == b removes the ignorance region, giving plain linear
    interpolation end to end.
    """

    t_min: float
    t_max: float
    ignorance_region: tuple[float, float]
    se_mean_at_tmin: float = 0.99
    se_mean_at_tmax: float = 0.01
    strength_at_extremes: float = 5.0
    strength_in_region: float = 2.0
    region_mean: float = 0.5
    prevalence: BetaParams = UNIFORM

    def __post_init__(self):
        a, b = self.ignorance_region
        if not self.t_min < a <= b < self.t_max:
            raise ValueError(
                "need t_min < a <= b < t_max "
                f"(got t_min={self.t_min}, region=({a}, {b}), t_max={self.t_max})"
            )

    @classmethod
    def defaults(cls, t_min: float = 0.0, t_max: float = 0.5, **kwargs) -> "ThresholdVaryingPrior":
        """Default ignorance region (0.25, 0.75) * t_max."""
        return cls(
            t_min=t_min,
            t_max=t_max,
            ignorance_region=(0.25 * t_max, 0.75 * t_max),
            **kwargs,
        )

    def mean_strength_at(self, t: float) -> tuple[float, float]:
        """(prior mean sensitivity, prior strength) at threshold t."""
        if not self.t_min <= t <= self.t_max:
            raise ValueError(f"threshold {t} outside prior range [{self.t_min}, {self.t_max}]")
        a, b = self.ignorance_region
        if t < a:
            f = (t - self.t_min) / (a - self.t_min)
            mean = self.se_mean_at_tmin + f * (self.region_mean - self.se_mean_at_tmin)
            strength = self.strength_at_extremes + f * (
                self.strength_in_region - self.strength_at_extremes
            )
        elif t <= b:
            mean, strength = self.region_mean, self.strength_in_region
        else:
            f = (t - b) / (self.t_max - b)
            mean = self.region_mean + f * (self.se_mean_at_tmax - self.region_mean)
            strength = self.strength_in_region + f * (
                self.strength_at_extremes - self.strength_in_region
            )
        return mean, strength

    def se_sp(self, t: float, strategy: StrategyId) -> tuple[BetaParams, BetaParams]:
        # Binary tests have threshold-independent se/sp, so the varying
        # construction does not apply; they get the vague region prior at
        # every threshold.
        if strategy.kind == "binary-test":
            region = to_beta(MeanStrengthPrior(self.region_mean, self.strength_in_region))
            return region, region
        return prior_at_threshold(self, t)


def prior_at_threshold(tv: ThresholdVaryingPrior, t: float) -> tuple[BetaParams, BetaParams]:
    """(sensitivity, specificity) Beta priors of the varying prior at t."""
    mean, strength = tv.mean_strength_at(t)
    se = to_beta(MeanStrengthPrior(mean, strength))
    sp = to_beta(MeanStrengthPrior(1.0 - mean, strength))
    return se, sp


def prior_only_posterior(
    prior, grid: ThresholdGrid, strategies: list[StrategyId]
) -> BinaryPosterior:
    """A BinaryPosterior whose components are the priors themselves."""
    shape = (len(grid), len(strategies))
    se_a = np.empty(shape)
    se_b = np.empty(shape)
    sp_a = np.empty(shape)
    sp_b = np.empty(shape)
    for s_idx, sid in enumerate(strategies):
        for t_idx, t in enumerate(grid):
            se, sp = prior.se_sp(float(t), sid)
            se_a[t_idx, s_idx], se_b[t_idx, s_idx] = se.alpha, se.beta
            sp_a[t_idx, s_idx], sp_b[t_idx, s_idx] = sp.alpha, sp.beta
    return BinaryPosterior(
        grid=grid,
        strategies=strategies,
        prevalence=prior.prevalence,
        prevalence_prior=prior.prevalence,
        se_alpha=se_a,
        se_beta=se_b,
        sp_alpha=sp_a,
        sp_beta=sp_b,
    )


@dataclass
class PriorPredictive:
    """Prior draws of the net-benefit pipeline plus plot-ready quantiles.

    Quantile tables are indexed (threshold, strategy, level) except for
    prevalence, which is shared and indexed (level,) only.
    """

    cube: NetBenefitDrawCube
    levels: tuple[float, ...]
    se_quantiles: np.ndarray
    sp_quantiles: np.ndarray
    prevalence_quantiles: np.ndarray
    nb_quantiles: np.ndarray = field(default=None)  # type: ignore[assignment]


def prior_predictive(
    prior,
    grid: ThresholdGrid | None = None,
    draw_count: int = 4000,
    seed: int = 0,
    strategies: list[StrategyId] | None = None,
    levels: tuple[float, ...] = DEFAULT_QUANTILES,
) -> PriorPredictive:
    """Run the sampling pipeline with priors in place of posteriors.

    The resulting quantiles show what the prior implies for sensitivity,
    specificity, prevalence and net benefit before any data are seen.
    """
    grid = grid or ThresholdGrid.default()
    if strategies is None:
        strategies = [StrategyId("model")]
    post = prior_only_posterior(prior, grid, strategies)
    p, se, sp = sample_components(post, draw_count, seed)
    cube = cube_from_components(post, p, se, sp)
    q = np.asarray(levels)
    return PriorPredictive(
        cube=cube,
        levels=tuple(levels),
        se_quantiles=np.moveaxis(np.quantile(se, q, axis=0), 0, -1),
        sp_quantiles=np.moveaxis(np.quantile(sp, q, axis=0), 0, -1),
        prevalence_quantiles=np.quantile(p, q),
        nb_quantiles=np.moveaxis(np.quantile(cube.draws, q, axis=0), 0, -1),
    )
