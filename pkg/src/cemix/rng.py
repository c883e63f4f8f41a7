"""Counter-based random number streams.

Every stream is addressed by (seed, phase, iteration, counter).  The four
coordinates key a Philox generator, so streams with distinct coordinates
are statistically independent and a batch can be partitioned across
workers by handing chunk i the counter value i; the result is identical
for any worker count.

Normal variates are produced by inverse-CDF of the uniform stream rather
than ziggurat/Box-Muller so that sample i always consumes draws
[i*d, (i+1)*d) of the stream, keeping per-sample indexing exact.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.special import ndtri

PHASES = ("pilot", "init", "final_is", "baseline")
_PHASE_CODE = {name: i for i, name in enumerate(PHASES)}

# smallest uniform fed to ndtri; Generator.random can return exactly 0.0
_U_MIN = 2.0 ** -53


@dataclass(frozen=True)
class RngStream:
    """Coordinates of an independent random stream."""

    seed: int
    phase: str = "pilot"
    iteration: int = 0
    counter: int = 0

    def __post_init__(self):
        if self.phase not in _PHASE_CODE:
            raise ValueError(f"unknown phase {self.phase!r}; expected one of {PHASES}")

    def child(self, *, phase=None, iteration=None, counter=None) -> "RngStream":
        """Derive a stream with some coordinates replaced."""
        kwargs = {}
        if phase is not None:
            kwargs["phase"] = phase
        if iteration is not None:
            kwargs["iteration"] = iteration
        if counter is not None:
            kwargs["counter"] = counter
        return replace(self, **kwargs)

    def _key(self) -> int:
        # 128-bit Philox key: seed in the high 64 bits, then phase,
        # iteration, and counter
        seed = self.seed & (2**64 - 1)
        return ((seed << 64) | (_PHASE_CODE[self.phase] << 60)
                | ((self.iteration & (2**28 - 1)) << 32)
                | (self.counter & (2**32 - 1)))

    def generator(self) -> np.random.Generator:
        """Fresh generator keyed by this stream's coordinates."""
        return np.random.Generator(np.random.Philox(key=self._key()))

    def uniforms(self, shape) -> np.ndarray:
        """Uniform(0,1] draws; consumes one 64-bit word per value."""
        u = self.generator().random(shape)
        # keep strictly inside (0,1) for downstream inverse-CDF use
        return np.maximum(u, _U_MIN)

    def normals(self, n: int, d: int) -> np.ndarray:
        """(n, d) array of iid N(0,1) draws via inverse CDF."""
        if n < 1 or d < 1:
            raise ValueError("n and d must be >= 1")
        return ndtri(self.uniforms((n, d)))
