"""Payoff models on standard-normal input spaces.

Each model maps a batch of iid N(0, I_d) inputs to nonnegative discounted
payoffs.  Models optionally expose

* a rarity embedding (`rarity_delta` / `rarity_payoff`) used by the
  staged initializer, and
* an analytical initialization map (`approx_tilts`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .errors import ApproxUnavailable, ConfigError, DimensionMismatch, EmbeddingUnavailable
from .numerics import bisect_root, cholesky, order_statistic

MAX_PYRAMID_ASSETS = 10  # 2^d mixture components; memory/pilot-coverage cap


def _batch(x, dim):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.shape[1] != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {x.shape[1]}")
    return x


@dataclass
class TwoSidedTail:
    """P{X >= a or X <= b} for scalar standard normal X, b < 0 < a."""

    a: float
    b: float

    name = "two_sided_tail"
    supports_rarity = True
    supports_approx = True

    def __post_init__(self):
        if not self.b < 0 < self.a:
            raise ConfigError("need b < 0 < a")

    @property
    def dim(self):
        return 1

    @property
    def default_components(self):
        return 2

    def payoff(self, x):
        x = _batch(x, 1)[:, 0]
        return ((x >= self.a) | (x <= self.b)).astype(float)

    def rarity_delta(self, x, n0, prev):
        return rarity_delta_two_sided(_batch(x, 1)[:, 0], self.a, self.b, n0, prev)

    def rarity_payoff(self, delta, x):
        x = _batch(x, 1)[:, 0]
        return ((x >= delta[0] * self.a) | (x <= delta[1] * self.b)).astype(float)

    def rarity_membership(self, delta, x):
        """(n, 2) indicator of reaching each side's delta-scaled set."""
        x = _batch(x, 1)[:, 0]
        return np.column_stack([x >= delta[0] * self.a, x <= delta[1] * self.b])

    def approx_tilts(self):
        return np.array([[self.a], [self.b]])


def rarity_delta_two_sided(samples, a, b, n0, prev):
    """Largest rarity pair reached by at least n0 samples per side."""
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    d1 = order_statistic(samples, n - n0 + 1) / a
    d2 = order_statistic(samples, n0) / b
    return np.maximum(np.array([d1, d2]), np.asarray(prev, dtype=float))


def rarity_delta_rainbow(prices, strike, n0, prev):
    """Per-asset rarity from terminal-price order statistics."""
    prices = np.asarray(prices, dtype=float)
    n = prices.shape[0]
    cand = np.array([order_statistic(prices[:, j], n - n0 + 1)
                     for j in range(prices.shape[1])]) / strike
    return np.maximum(cand, np.asarray(prev, dtype=float))


@dataclass
class AsianCall:
    """Discretely monitored average-price call under geometric Brownian
    motion; input coordinates are the normalized Brownian increments."""

    s0: float
    r: float
    sigma: float
    maturity: float
    n_dates: int
    strike: float
    times: np.ndarray = None  # monitoring dates; default uniform i*T/d

    name = "asian_call"
    supports_rarity = False
    supports_approx = True

    def __post_init__(self):
        if self.times is None:
            self.times = self.maturity * np.arange(1, self.n_dates + 1) / self.n_dates
        self.times = np.asarray(self.times, dtype=float)
        if self.times.size != self.n_dates or np.any(np.diff(self.times) <= 0) \
                or self.times[0] <= 0:
            raise ConfigError("monitoring dates must be increasing and positive")
        self._sqdt = np.sqrt(np.diff(self.times, prepend=0.0))

    @property
    def dim(self):
        return self.n_dates

    @property
    def default_components(self):
        return 1

    def _prices(self, x):
        x = _batch(x, self.n_dates)
        drift = (self.r - 0.5 * self.sigma ** 2) * self.times
        bridge = np.cumsum(self._sqdt * x, axis=1)
        return self.s0 * np.exp(drift[None, :] + self.sigma * bridge)

    def payoff(self, x):
        mean_price = self._prices(x).mean(axis=1)
        return np.exp(-self.r * self.maturity) * np.maximum(mean_price - self.strike, 0.0)

    def approx_tilts(self):
        """Constant shift a with E[average price] = K under N(a*1, I)."""
        drift = (self.r - 0.5 * self.sigma ** 2) * self.times
        csq = np.cumsum(self._sqdt)

        def gap(a):
            return np.mean(self.s0 * np.exp(drift + self.sigma * csq * a)) - self.strike

        lo, hi = -1.0, 1.0
        while gap(lo) > 0:
            lo *= 2
        while gap(hi) < 0:
            hi *= 2
        a = bisect_root(gap, lo, hi)
        return np.full((1, self.n_dates), a)


@dataclass
class RainbowOption:
    """Outperformance option (max_j S_T^(j) - K)^+ on correlated GBM assets."""

    s0: np.ndarray
    sigmas: np.ndarray
    corr: np.ndarray
    r: float
    maturity: float
    strike: float

    name = "rainbow"
    supports_rarity = True
    supports_approx = True

    def __post_init__(self):
        self.s0 = np.asarray(self.s0, dtype=float)
        self.sigmas = np.asarray(self.sigmas, dtype=float)
        self.corr = np.asarray(self.corr, dtype=float)
        if not np.allclose(np.diag(self.corr), 1.0):
            raise ConfigError("correlation matrix must have unit diagonal")
        self.chol = cholesky(self.corr)

    @property
    def dim(self):
        return self.s0.size

    @property
    def default_components(self):
        return self.dim

    def terminal_prices(self, x):
        """Undiscounted S_T^(j) per sample and asset."""
        cx = _batch(x, self.dim) @ self.chol.T
        expo = (self.r - 0.5 * self.sigmas ** 2) * self.maturity \
            + self.sigmas * np.sqrt(self.maturity) * cx
        return self.s0 * np.exp(expo)

    def payoff(self, x):
        disc = np.exp(-self.r * self.maturity)
        best = (disc * self.terminal_prices(x)).max(axis=1)
        return np.maximum(best - disc * self.strike, 0.0)

    def rarity_delta(self, x, n0, prev):
        return rarity_delta_rainbow(self.terminal_prices(x), self.strike, n0, prev)

    def rarity_payoff(self, delta, x):
        disc = np.exp(-self.r * self.maturity)
        prices = self.terminal_prices(x)
        delta = np.asarray(delta, dtype=float)
        h = (disc * prices - disc * delta[None, :] * self.strike).max(axis=1)
        in_set = np.any(prices > delta[None, :] * self.strike, axis=1)
        return np.maximum(h, 0.0) * in_set

    def rarity_membership(self, delta, x):
        """(n, d) indicator of each asset exceeding its delta-scaled strike."""
        return self.terminal_prices(x) > np.asarray(delta, dtype=float)[None, :] * self.strike

    def approx_tilts(self):
        """One tilt per asset, lifting that asset's mean terminal price to K."""
        d = self.dim
        tilts = np.empty((d, d))
        for j in range(d):
            eta = np.zeros(d)
            eta[j] = (np.log(self.strike / self.s0[j]) - self.r * self.maturity) \
                / (self.sigmas[j] * np.sqrt(self.maturity))
            tilts[j] = solve_triangular(self.chol, eta, lower=True)
        return tilts


@dataclass
class PyramidOption:
    """Pyramid option (sum_j |S_T^(j) - K_j| - K)^+ on correlated GBM assets."""

    s0: np.ndarray
    sigmas: np.ndarray
    asset_strikes: np.ndarray
    corr: np.ndarray
    r: float
    maturity: float
    strike: float

    name = "pyramid"
    supports_rarity = False
    supports_approx = True

    def __post_init__(self):
        self.s0 = np.asarray(self.s0, dtype=float)
        self.sigmas = np.asarray(self.sigmas, dtype=float)
        self.asset_strikes = np.asarray(self.asset_strikes, dtype=float)
        self.corr = np.asarray(self.corr, dtype=float)
        if self.dim > MAX_PYRAMID_ASSETS:
            raise ConfigError(
                f"pyramid model capped at {MAX_PYRAMID_ASSETS} assets (2^d components)")
        self.chol = cholesky(self.corr)

    @property
    def dim(self):
        return self.s0.size

    @property
    def default_components(self):
        return 2 ** self.dim

    def terminal_prices(self, x):
        cx = _batch(x, self.dim) @ self.chol.T
        expo = (self.r - 0.5 * self.sigmas ** 2) * self.maturity \
            + self.sigmas * np.sqrt(self.maturity) * cx
        return self.s0 * np.exp(expo)

    def payoff(self, x):
        spread = np.abs(self.terminal_prices(x) - self.asset_strikes).sum(axis=1)
        return np.exp(-self.r * self.maturity) * np.maximum(spread - self.strike, 0.0)

    def sign_patterns(self):
        d = self.dim
        grid = np.indices((2,) * d).reshape(d, -1).T
        return 1 - 2 * grid  # rows in {+1, -1}^d, all-plus first

    def approx_tilts(self):
        """One tilt per sign pattern of the 2^d positivity regions."""
        kbar = np.maximum(self.asset_strikes, self.s0 * np.exp(self.r * self.maturity))
        slack = max(self.strike - np.abs(kbar - self.asset_strikes).sum(), 0.0) / self.dim
        tilts = np.empty((2 ** self.dim, self.dim))
        for i, signs in enumerate(self.sign_patterns()):
            target = kbar + signs * slack
            # keep the log argument positive for deep down-moves
            target = np.maximum(target, 1e-8 * self.s0)
            eta = (np.log(target / self.s0) - self.r * self.maturity) \
                / (self.sigmas * np.sqrt(self.maturity))
            tilts[i] = solve_triangular(self.chol, eta, lower=True)
        return tilts


@dataclass
class CevDigital:
    """Digital option on the better of two correlated CEV assets.

    Both assets are simulated by Euler discretization of the driftless
    discounted dynamics; the input space is the interleaved innovation
    vector (Z_1, R_1, ..., Z_n, R_n) with W-increment sqrt(dt)*Z and
    B-increment sqrt(dt)*(rho*Z + sqrt(1-rho^2)*R).  Negative states are
    clamped to zero and absorbed.
    """

    s0: float
    h0: float
    sigma1: float
    sigma2: float
    gamma1: float
    gamma2: float
    rho: float
    r: float
    maturity: float
    strike: float
    c1: float = 1.0
    c2: float = 1.0
    n_steps: int = 50

    name = "cev_digital"
    supports_rarity = False
    supports_approx = True

    def __post_init__(self):
        if not (0.5 <= self.gamma1 <= 1.0 and 0.5 <= self.gamma2 <= 1.0):
            raise ConfigError("gamma must lie in [0.5, 1]")
        if not -1.0 < self.rho < 1.0:
            raise ConfigError("rho must lie in (-1, 1)")
        if self.n_steps < 1:
            raise ConfigError("need at least one Euler step")

    @property
    def dim(self):
        return 2 * self.n_steps

    @property
    def default_components(self):
        return 2

    def paths(self, x):
        """Terminal (S_T, H_T) for each innovation row."""
        x = _batch(x, self.dim)
        z = x[:, 0::2]
        resid = x[:, 1::2]
        dt = self.maturity / self.n_steps
        sqdt = np.sqrt(dt)
        root = np.sqrt(1.0 - self.rho ** 2)
        xs = np.full(x.shape[0], float(self.s0))
        ys = np.full(x.shape[0], float(self.h0))
        for i in range(self.n_steps):
            t = i * dt
            dw = sqdt * z[:, i]
            db = sqdt * (self.rho * z[:, i] + root * resid[:, i])
            cx = self.sigma1 * np.exp(-self.r * (1.0 - self.gamma1) * t) * xs ** self.gamma1
            cy = self.sigma2 * np.exp(-self.r * (1.0 - self.gamma2) * t) * ys ** self.gamma2
            xs = np.maximum(xs + cx * dw, 0.0)
            ys = np.maximum(ys + cy * db, 0.0)
        grow = np.exp(self.r * self.maturity)
        return grow * xs, grow * ys

    def payoff(self, x):
        # undiscounted hit probability of the better asset reaching K
        s_t, h_t = self.paths(x)
        hit = np.maximum(self.c1 * s_t, self.c2 * h_t) >= self.strike
        return hit.astype(float)

    def _drift(self, sigma, gamma, s0, cost):
        """Constant Brownian drift pushing the mean terminal level to K/cost."""
        if gamma >= 1.0:
            raise ApproxUnavailable("analytic drift needs gamma < 1")
        target = np.exp(-self.r * self.maturity) * self.strike / cost
        return (self.r / sigma) * (target ** (1.0 - gamma) - s0 ** (1.0 - gamma)) \
            / (1.0 - np.exp(-self.r * (1.0 - gamma) * self.maturity))

    def approx_tilts(self):
        """Innovation-space mean shifts for drifting W (component 1) or B
        (component 2)."""
        dt = self.maturity / self.n_steps
        sqdt = np.sqrt(dt)
        root = np.sqrt(1.0 - self.rho ** 2)
        x_drift = self._drift(self.sigma1, self.gamma1, self.s0, self.c1)
        y_drift = self._drift(self.sigma2, self.gamma2, self.h0, self.c2)
        tilt_w = np.zeros(self.dim)
        tilt_w[0::2] = x_drift * sqdt
        tilt_b = np.zeros(self.dim)
        tilt_b[0::2] = self.rho * y_drift * sqdt
        tilt_b[1::2] = root * y_drift * sqdt
        return np.vstack([tilt_w, tilt_b])


def rarity_embedding(model, delta, x):
    """delta-scaled payoff V_delta; recovers V at delta = 1."""
    if not getattr(model, "supports_rarity", False):
        raise EmbeddingUnavailable(f"{model.name} has no rarity embedding")
    return model.rarity_payoff(np.asarray(delta, dtype=float), x)
