"""Cross-entropy updates and the outer iteration loop.

The single-component update is the payoff-and-likelihood-weighted sample
mean; the mixture update additionally weights each sample by its EM
posterior, giving closed-form weight and mean updates per component.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateUpdate
from .mixture import (
    DEFAULT_WEIGHT_FLOOR,
    MixtureParam,
    SampleBatch,
    likelihood_ratio,
    log_mixture_density,
    posterior,
    sample_mixture,
)
from .rng import RngStream


@dataclass
class PilotEvaluation:
    """Per-sample quantities of one pilot batch under the sampling mixture."""

    x: np.ndarray           # (n, d)
    payoff: np.ndarray      # (n,), nonnegative
    lr: np.ndarray          # (n,), likelihood ratios, positive
    posteriors: np.ndarray  # (n, m)

    def __post_init__(self):
        n = self.x.shape[0]
        if not (self.payoff.shape == (n,) and self.lr.shape == (n,)
                and self.posteriors.shape[0] == n):
            raise ValueError("inconsistent pilot evaluation lengths")
        if np.any(self.payoff < 0):
            raise ValueError("payoffs must be nonnegative")
        if np.any(self.lr <= 0):
            raise ValueError("likelihood ratios must be positive")

    @property
    def m(self) -> int:
        return self.posteriors.shape[1]


@dataclass
class CeConfig:
    pilot_size: int = 10000
    iterations: int = 5
    weight_floor: float = DEFAULT_WEIGHT_FLOOR
    degenerate_threshold: int = 10  # min positive-payoff samples before warning


@dataclass
class IterationRecord:
    iteration: int
    theta: MixtureParam
    objective: float
    positive_payoffs: int
    warnings: list = field(default_factory=list)


def evaluate_pilot(payoff_fn, theta: MixtureParam, batch: SampleBatch) -> PilotEvaluation:
    """Evaluate payoff, likelihood ratio, and posteriors for a pilot batch."""
    return PilotEvaluation(
        x=batch.x,
        payoff=np.asarray(payoff_fn(batch.x), dtype=float),
        lr=likelihood_ratio(theta, batch.x),
        posteriors=posterior(theta, batch.x),
    )


def _fsum(values: np.ndarray) -> float:
    # compensated summation; pilot weights V*lr span a wide dynamic range
    return math.fsum(values.tolist())


def basic_update(ev: PilotEvaluation) -> np.ndarray:
    """Single-component update: the V*lr-weighted sample mean."""
    w = ev.payoff * ev.lr
    denom = _fsum(w)
    if denom <= 0:
        raise DegenerateUpdate("all payoff-weighted mass is zero")
    return np.array([_fsum(w * ev.x[:, j]) for j in range(ev.x.shape[1])]) / denom


def mixture_update(ev: PilotEvaluation, theta_prev: MixtureParam,
                   weight_floor: float = DEFAULT_WEIGHT_FLOOR) -> MixtureParam:
    """Closed-form mixture update from one pilot evaluation.

    A component whose posterior-weighted mass vanishes keeps its previous
    mean; the weight floor keeps its weight alive.  Pass weight_floor=0 to
    get the raw EM-ascent update (weights may then hit zero, which the
    MixtureParam constructor rejects, so a tiny positive floor is applied
    in that case only where needed).
    """
    w_all = ev.payoff * ev.lr
    denom = _fsum(w_all)
    if denom <= 0:
        raise DegenerateUpdate("all payoff-weighted mass is zero")
    m = ev.m
    d = ev.x.shape[1]
    weights = np.empty(m)
    means = np.array(theta_prev.means, copy=True)
    for j in range(m):
        wj = w_all * ev.posteriors[:, j]
        mass = _fsum(wj)
        weights[j] = mass / denom
        if mass > 0:
            means[j] = np.array([_fsum(wj * ev.x[:, k]) for k in range(d)]) / mass
    floor = max(weight_floor, 1e-300)
    weights = np.maximum(weights, floor)
    weights /= weights.sum()
    return MixtureParam(weights, means)


def surrogate_objective(ev: PilotEvaluation, theta: MixtureParam) -> float:
    """Sampled CE objective (1/N) sum_k V*lr * log h_theta(X_k)."""
    active = ev.payoff > 0
    if not np.any(active):
        return 0.0
    vals = (ev.payoff[active] * ev.lr[active]
            * log_mixture_density(theta, ev.x[active]))
    return _fsum(vals) / ev.x.shape[0]


def run_ce(model, theta0: MixtureParam, cfg: CeConfig, stream: RngStream):
    """Fixed-count CE iterations: sample pilot, evaluate, update.

    Returns (theta_final, trace).  DegenerateUpdate is re-raised with the
    failing iteration index attached; it signals an inadequate
    initialization.
    """
    theta = theta0
    trace = []
    for it in range(1, cfg.iterations + 1):
        batch = sample_mixture(theta, cfg.pilot_size,
                               stream.child(phase="pilot", iteration=it))
        ev = evaluate_pilot(model.payoff, theta, batch)
        warnings = []
        positive = int(np.count_nonzero(ev.payoff > 0))
        if positive < cfg.degenerate_threshold:
            warnings.append(
                f"only {positive} positive-payoff pilot samples; estimate unreliable")
        try:
            theta = mixture_update(ev, theta, cfg.weight_floor)
        except DegenerateUpdate as exc:
            raise DegenerateUpdate(str(exc), iteration=it) from exc
        trace.append(IterationRecord(
            iteration=it,
            theta=theta,
            objective=surrogate_objective(ev, theta),
            positive_payoffs=positive,
            warnings=warnings,
        ))
    return theta, trace
