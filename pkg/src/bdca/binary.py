"""Exact conjugate Bayesian decision curve analysis for binary outcomes.

The disease indicator and the positive-prediction indicator are jointly
modelled with Bernoulli likelihoods whose parameters (prevalence,
sensitivity, specificity) are orthogonal, so independent Beta priors give
independent Beta posteriors in closed form.  Sampling the joint posterior
is therefore plain Monte Carlo: no MCMC anywhere in this module.

Reproducibility contract: the prevalence draw vector uses the substream
``SeedSequence([seed, 0])`` and the (threshold i, strategy j) cell uses
``SeedSequence([seed, 1, i, j])`` (sensitivity drawn before specificity),
so per-cell parallelism cannot change results.
"""

from __future__ import annotations

import warnings as _warnings
from dataclasses import dataclass, field

import numpy as np

from .core import (
    TREAT_ALL_ID,
    TREAT_NONE_ID,
    NetBenefitDrawCube,
    RatesTriple,
    StrategyId,
    ThresholdGrid,
    nb_from_rates,
    validate_threshold,
)

_PREV_STREAM = 0
_CELL_STREAM = 1


@dataclass(frozen=True)
class BetaParams:
    """Shape pair of a Beta distribution; both parameters positive."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError(f"Beta shapes must be positive, got {self}")

    @property
    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)

    @property
    def strength(self) -> float:
        """Prior pseudo-sample size alpha + beta."""
        return self.alpha + self.beta

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        # numpy routes this through a gamma-variate ratio (Johnk's method
        # when both shapes are <= 1), which stays stable for shapes < 1.
        return rng.beta(self.alpha, self.beta, size)


UNIFORM = BetaParams(1.0, 1.0)


@dataclass(frozen=True)
class ThresholdCounts:
    """Confusion counts of one strategy at one threshold."""

    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("counts must be non-negative")

    @property
    def d(self) -> int:
        return self.tp + self.fn

    @property
    def nd(self) -> int:
        return self.fp + self.tn

    @property
    def n(self) -> int:
        return self.d + self.nd


def _infer_kind(scores: np.ndarray) -> str:
    return "binary-test" if np.all((scores == 0.0) | (scores == 1.0)) else "model"


@dataclass
class BinaryDataset:
    """Disease indicators plus one risk-score column per strategy."""

    outcomes: np.ndarray
    predictions: dict[str, np.ndarray]

    def __post_init__(self):
        y = np.asarray(self.outcomes)
        if y.ndim != 1 or y.size == 0:
            raise ValueError("outcomes must be a non-empty 1-d sequence")
        if not np.all((y == 0) | (y == 1)):
            raise ValueError("outcomes must be 0/1 disease indicators")
        self.outcomes = y.astype(np.int8)
        if not self.predictions:
            raise ValueError("at least one strategy is required")
        preds = {}
        for name, scores in self.predictions.items():
            s = np.asarray(scores, dtype=np.float64)
            if s.shape != (y.size,):
                raise ValueError(
                    f"strategy {name!r} has {s.size} scores for {y.size} outcomes"
                )
            if np.any(~np.isfinite(s)) or np.any(s < 0.0) or np.any(s > 1.0):
                raise ValueError(f"strategy {name!r} has scores outside [0, 1]")
            preds[name] = s
        self.predictions = preds

    @property
    def n(self) -> int:
        return self.outcomes.size

    @property
    def n_events(self) -> int:
        return int(self.outcomes.sum())

    def strategy_ids(self) -> list[StrategyId]:
        return [StrategyId(n, _infer_kind(s)) for n, s in self.predictions.items()]


def count_at_threshold(data: BinaryDataset, strategy: str, t: float) -> ThresholdCounts:
    """Confusion counts with positive prediction meaning score > t (strict)."""
    t = validate_threshold(t)
    if strategy not in data.predictions:
        raise KeyError(f"unknown strategy {strategy!r}")
    z = data.predictions[strategy] > t
    y = data.outcomes == 1
    return ThresholdCounts(
        tp=int(np.sum(z & y)),
        fp=int(np.sum(z & ~y)),
        tn=int(np.sum(~z & ~y)),
        fn=int(np.sum(~z & y)),
    )


def counts_on_grid(
    data: BinaryDataset, strategy: str, grid: ThresholdGrid
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(tp, fp, tn, fn) integer arrays over the whole grid, via one sort."""
    if strategy not in data.predictions:
        raise KeyError(f"unknown strategy {strategy!r}")
    scores = data.predictions[strategy]
    y = data.outcomes == 1
    pos_scores = np.sort(scores[y])
    neg_scores = np.sort(scores[~y])
    d, nd = pos_scores.size, neg_scores.size
    # score > t holds for everything right of the insertion point.
    tp = d - np.searchsorted(pos_scores, grid.values, side="right")
    fp = nd - np.searchsorted(neg_scores, grid.values, side="right")
    return tp, fp, nd - fp, d - tp


def posterior_update(
    prevalence_prior: BetaParams,
    se_prior: BetaParams,
    sp_prior: BetaParams,
    counts: ThresholdCounts,
) -> tuple[BetaParams, BetaParams, BetaParams]:
    """Conjugate update of (prevalence, sensitivity, specificity) priors."""
    return (
        BetaParams(counts.d + prevalence_prior.alpha, counts.nd + prevalence_prior.beta),
        BetaParams(counts.tp + se_prior.alpha, counts.fn + se_prior.beta),
        BetaParams(counts.tn + sp_prior.alpha, counts.fp + sp_prior.beta),
    )


@dataclass
class BinaryPosterior:
    """Closed-form joint posterior over prevalence and per-cell se/sp.

    The prevalence component is shared by every threshold and strategy;
    sensitivity and specificity are stored as (threshold, strategy) shape
    arrays.  no_positives marks cells without any positive prediction,
    where the sensitivity posterior is just its prior.
    """

    grid: ThresholdGrid
    strategies: list[StrategyId]
    prevalence: BetaParams
    prevalence_prior: BetaParams
    se_alpha: np.ndarray
    se_beta: np.ndarray
    sp_alpha: np.ndarray
    sp_beta: np.ndarray
    no_positives: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        shape = (len(self.grid), len(self.strategies))
        for name in ("se_alpha", "se_beta", "sp_alpha", "sp_beta"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.shape != shape:
                raise ValueError(f"{name} must have shape {shape}")
            if np.any(arr <= 0.0):
                raise ValueError(f"{name} must be strictly positive")
            setattr(self, name, arr)
        if self.no_positives is None:
            self.no_positives = np.zeros(shape, dtype=bool)

    def sensitivity(self, t_idx: int, s_idx: int) -> BetaParams:
        return BetaParams(self.se_alpha[t_idx, s_idx], self.se_beta[t_idx, s_idx])

    def specificity(self, t_idx: int, s_idx: int) -> BetaParams:
        return BetaParams(self.sp_alpha[t_idx, s_idx], self.sp_beta[t_idx, s_idx])


class _UniformBinaryPrior:
    prevalence = UNIFORM

    def se_sp(self, t: float, strategy: StrategyId) -> tuple[BetaParams, BetaParams]:
        return UNIFORM, UNIFORM


def fit_binary(
    data: BinaryDataset, grid: ThresholdGrid | None = None, prior=None
) -> BinaryPosterior:
    """Count, update and assemble the joint posterior over the grid.

    prior is any object with a ``prevalence`` BetaParams attribute and a
    ``se_sp(t, strategy) -> (BetaParams, BetaParams)`` method; None means
    uniform Beta(1, 1) everywhere.
    """
    grid = grid or ThresholdGrid.default()
    prior = prior if prior is not None else _UniformBinaryPrior()
    strategies = data.strategy_ids()
    shape = (len(grid), len(strategies))
    se_a = np.empty(shape)
    se_b = np.empty(shape)
    sp_a = np.empty(shape)
    sp_b = np.empty(shape)
    no_pos = np.zeros(shape, dtype=bool)
    d = data.n_events
    nd = data.n - d
    for s_idx, sid in enumerate(strategies):
        tp, fp, tn, fn = counts_on_grid(data, sid.name, grid)
        no_pos[:, s_idx] = (tp + fp) == 0
        for t_idx, t in enumerate(grid):
            se_p, sp_p = prior.se_sp(float(t), sid)
            se_a[t_idx, s_idx] = tp[t_idx] + se_p.alpha
            se_b[t_idx, s_idx] = fn[t_idx] + se_p.beta
            sp_a[t_idx, s_idx] = tn[t_idx] + sp_p.alpha
            sp_b[t_idx, s_idx] = fp[t_idx] + sp_p.beta
    prev_prior = prior.prevalence
    return BinaryPosterior(
        grid=grid,
        strategies=strategies,
        prevalence=BetaParams(d + prev_prior.alpha, nd + prev_prior.beta),
        prevalence_prior=prev_prior,
        se_alpha=se_a,
        se_beta=se_b,
        sp_alpha=sp_a,
        sp_beta=sp_b,
        no_positives=no_pos,
    )


def external_prevalence(post: BinaryPosterior, d_ext: int, nd_ext: int) -> BinaryPosterior:
    """Swap in a prevalence posterior built from external counts.

    Used to adjust case-control validation data with a prevalence estimated
    (with uncertainty) from a cross-sectional source; sensitivity and
    specificity components are untouched.
    """
    if d_ext < 0 or nd_ext < 0:
        raise ValueError("external counts must be non-negative")
    prior = post.prevalence_prior
    return BinaryPosterior(
        grid=post.grid,
        strategies=post.strategies,
        prevalence=BetaParams(d_ext + prior.alpha, nd_ext + prior.beta),
        prevalence_prior=prior,
        se_alpha=post.se_alpha,
        se_beta=post.se_beta,
        sp_alpha=post.sp_alpha,
        sp_beta=post.sp_beta,
        no_positives=post.no_positives,
    )


def sample_components(
    post: BinaryPosterior, draw_count: int = 4000, seed: int = 0
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Draw (prevalence, sensitivity, specificity) from their marginals.

    Returns p with shape (draw,) and se/sp with shape (draw, threshold,
    strategy).  Marginal draws combine into valid joint draws because the
    posterior factorizes.
    """
    if draw_count < 1:
        raise ValueError("draw_count must be at least 1")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    n_t, n_s = len(post.grid), len(post.strategies)
    rng_prev = np.random.default_rng(np.random.SeedSequence([seed, _PREV_STREAM]))
    p = post.prevalence.sample(rng_prev, draw_count)
    se = np.empty((draw_count, n_t, n_s))
    sp = np.empty((draw_count, n_t, n_s))
    for t_idx in range(n_t):
        for s_idx in range(n_s):
            rng = np.random.default_rng(
                np.random.SeedSequence([seed, _CELL_STREAM, t_idx, s_idx])
            )
            se[:, t_idx, s_idx] = post.sensitivity(t_idx, s_idx).sample(rng, draw_count)
            sp[:, t_idx, s_idx] = post.specificity(t_idx, s_idx).sample(rng, draw_count)
    return p, se, sp


def cube_from_components(
    post: BinaryPosterior, p: np.ndarray, se: np.ndarray, sp: np.ndarray
) -> NetBenefitDrawCube:
    """Assemble the net-benefit cube from component draws."""
    grid = post.grid
    w = grid.weights
    n_s = len(post.strategies)
    one_minus_p = 1.0 - p
    draws = np.zeros((p.size, len(grid), n_s + 2))
    draws[:, :, :n_s] = se * p[:, None, None] - (
        w[None, :, None] * (1.0 - sp) * one_minus_p[:, None, None]
    )
    # Treat-all reuses the shared prevalence draws; treat-none stays zero.
    draws[:, :, n_s] = p[:, None] - w[None, :] * one_minus_p[:, None]

    cube_warnings = []
    for s_idx, sid in enumerate(post.strategies):
        for t_idx in np.nonzero(post.no_positives[:, s_idx])[0]:
            msg = (
                f"no positive predictions above threshold "
                f"{grid.values[t_idx]:g} for strategy {sid.name!r}; "
                f"sensitivity posterior equals its prior there"
            )
            cube_warnings.append(msg)
            _warnings.warn(msg, stacklevel=3)

    return NetBenefitDrawCube(
        draws=draws,
        thresholds=grid,
        strategies=[*post.strategies, TREAT_ALL_ID, TREAT_NONE_ID],
        warnings=cube_warnings,
    )


def sample_joint(
    post: BinaryPosterior, draw_count: int = 4000, seed: int = 0
) -> NetBenefitDrawCube:
    """Monte Carlo draws of net benefit from the joint posterior.

    One prevalence vector is drawn and shared by all thresholds and
    strategies (including treat-all), which is what makes differences
    between decision curves tightly estimated.
    """
    p, se, sp = sample_components(post, draw_count, seed)
    return cube_from_components(post, p, se, sp)


def plug_in_nb(data: BinaryDataset, strategy: str, grid: ThresholdGrid) -> np.ndarray:
    """Observed (TP - w*FP)/n over the grid; the frequentist point estimate."""
    tp, fp, _, _ = counts_on_grid(data, strategy, grid)
    return (tp - grid.weights * fp) / data.n


def plug_in_nb_from_counts(counts: ThresholdCounts, t: float) -> float:
    n = counts.n
    rates = RatesTriple(
        prevalence=counts.d / n,
        sensitivity=counts.tp / counts.d if counts.d else 0.0,
        specificity=counts.tn / counts.nd if counts.nd else 0.0,
    )
    return nb_from_rates(rates, t)
