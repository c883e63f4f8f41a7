"""Gaussian mean-shift tilt mixtures.

The sampling family is h(x) = sum_j w_j * phi_d(x - alpha_j), where phi_d
is the standard d-dimensional normal density.  All density work is done in
the log domain; raw densities underflow already for moderate path
dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp, ndtri

from .errors import DimensionMismatch
from .rng import RngStream

LOG_2PI = float(np.log(2.0 * np.pi))

# updated weights below this are clamped and the vector renormalized, so no
# component ever becomes unrecoverable
DEFAULT_WEIGHT_FLOOR = 1e-4


@dataclass
class MixtureParam:
    """Weights and component mean shifts of a tilt mixture."""

    weights: np.ndarray  # (m,)
    means: np.ndarray    # (m, d)

    def __post_init__(self):
        self.weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        self.means = np.atleast_2d(np.asarray(self.means, dtype=float))
        if self.weights.ndim != 1 or self.means.ndim != 2:
            raise ValueError("weights must be (m,), means must be (m, d)")
        if self.means.shape[0] != self.weights.size:
            raise DimensionMismatch(
                f"{self.weights.size} weights vs {self.means.shape[0]} components")
        if np.any(self.weights <= 0) or not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be strictly positive and finite")
        if abs(self.weights.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {self.weights.sum()}, not 1")
        if not np.all(np.isfinite(self.means)):
            raise ValueError("means must be finite")

    @property
    def m(self) -> int:
        return self.weights.size

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    @classmethod
    def single(cls, alpha) -> "MixtureParam":
        """One-component mixture (plain exponential tilt)."""
        return cls(np.array([1.0]), np.atleast_2d(np.asarray(alpha, dtype=float)))

    @classmethod
    def uniform(cls, means) -> "MixtureParam":
        """Mixture with equal weights 1/m over the given means."""
        means = np.atleast_2d(np.asarray(means, dtype=float))
        m = means.shape[0]
        return cls(np.full(m, 1.0 / m), means)

    def permuted(self, perm) -> "MixtureParam":
        perm = np.asarray(perm)
        return MixtureParam(self.weights[perm], self.means[perm])


@dataclass
class SampleBatch:
    """Draws from a mixture plus the stream that produced them.

    Component labels are diagnostics only; parameter updates use EM
    posteriors, never the labels.
    """

    x: np.ndarray        # (n, d)
    stream: RngStream
    labels: np.ndarray = field(default=None)  # (n,) int or None

    @property
    def n(self) -> int:
        return self.x.shape[0]


def _as_batch(x, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != dim:
        raise DimensionMismatch(f"expected points of dimension {dim}, got shape {x.shape}")
    return x


def log_component_density(alpha, x) -> np.ndarray:
    """log phi_d(x - alpha) for each row of x."""
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    x = _as_batch(x, alpha.size)
    diff = x - alpha
    return -0.5 * np.einsum("nd,nd->n", diff, diff) - 0.5 * alpha.size * LOG_2PI


def _log_joint(theta: MixtureParam, x) -> np.ndarray:
    """(n, m) matrix of log(w_j * phi_d(x - alpha_j))."""
    x = _as_batch(x, theta.dim)
    # ||x - a||^2 = ||x||^2 - 2 x.a + ||a||^2
    sq = np.sum(x * x, axis=1)[:, None] - 2.0 * x @ theta.means.T \
        + np.sum(theta.means * theta.means, axis=1)[None, :]
    return np.log(theta.weights)[None, :] - 0.5 * sq - 0.5 * theta.dim * LOG_2PI


def log_mixture_density(theta: MixtureParam, x) -> np.ndarray:
    """log h_theta(x) via max-shifted summation."""
    return logsumexp(_log_joint(theta, x), axis=1)


def posterior(theta: MixtureParam, x) -> np.ndarray:
    """(n, m) component posteriors h_theta(j | x); rows sum to 1."""
    lj = _log_joint(theta, x)
    lj -= lj.max(axis=1, keepdims=True)
    p = np.exp(lj)
    p /= p.sum(axis=1, keepdims=True)
    return p


def likelihood_ratio(theta: MixtureParam, x) -> np.ndarray:
    """phi_d(x) / h_theta(x); the unbiasedness correction factor."""
    x = _as_batch(x, theta.dim)
    log_f = -0.5 * np.sum(x * x, axis=1) - 0.5 * theta.dim * LOG_2PI
    return np.exp(log_f - log_mixture_density(theta, x))


def sample_mixture(theta: MixtureParam, n: int, stream: RngStream) -> SampleBatch:
    """n iid draws from h_theta.

    One uniform per sample picks the component label, then d inverse-CDF
    normals build the vector.  Parallel chunking hands chunk k the stream
    with counter offset k.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = stream.generator()
    u = np.maximum(gen.random(n), 2.0**-53)
    labels = np.searchsorted(np.cumsum(theta.weights), u)
    labels = np.minimum(labels, theta.m - 1)
    z = ndtri(np.maximum(gen.random((n, theta.dim)), 2.0**-53))
    x = z + theta.means[labels]
    return SampleBatch(x=x, stream=stream, labels=labels)
