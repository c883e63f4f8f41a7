"""Deterministic numerical utilities: Cholesky, order statistics, root
finding, and the normal CDF oracle."""

from __future__ import annotations

from typing import Callable

import numpy as np
from scipy.special import ndtr

from .errors import NoBracket, NotPositiveDefinite, RankOutOfRange


def cholesky(sigma: np.ndarray) -> np.ndarray:
    """Lower-triangular C with C @ C.T == sigma.

    Raises NotPositiveDefinite when sigma is not symmetric positive
    definite.
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise NotPositiveDefinite("matrix must be square")
    if not np.allclose(sigma, sigma.T, atol=1e-12):
        raise NotPositiveDefinite("matrix must be symmetric")
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc


def order_statistic(values, k: int) -> float:
    """k-th smallest element (1-based), ties resolved by multiplicity."""
    values = np.asarray(values, dtype=float)
    n = values.size
    if not 1 <= k <= n:
        raise RankOutOfRange(f"rank {k} outside 1..{n}")
    return float(np.partition(values, k - 1)[k - 1])


def bisect_root(g: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10) -> float:
    """Bisection root of a continuous monotone g on [lo, hi].

    The result is accurate to the final bracket width <= tol.  Raises
    NoBracket when g(lo) and g(hi) have the same strict sign.
    """
    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if glo * ghi > 0:
        raise NoBracket(f"g({lo})={glo} and g({hi})={ghi} have the same sign")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0.0:
            return mid
        if glo * gm < 0:
            hi = mid
        else:
            lo, glo = mid, gm
    return 0.5 * (lo + hi)


def normal_cdf(z) -> float:
    """Standard normal CDF, accurate to better than 1e-10."""
    return ndtr(z)
