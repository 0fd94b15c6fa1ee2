"""Seeded, platform-stable random source for velocity fluctuations.

The stream is Philox-4x64-10 keyed directly with the scenario seed and a
counter starting at zero, so draw ``n`` depends only on ``(seed, n)``.
Only the raw 64-bit words are taken from numpy; the normal transform is
Box-Muller done here, which keeps the sequence independent of numpy's
distribution code (that code is allowed to change between releases).
"""

from __future__ import annotations

import math

import numpy as np

_TWO_PI = 2.0 * math.pi
_INV_2_53 = 1.0 / 9007199254740992.0


class InvalidParameter(ValueError):
    pass


class Rng:
    def __init__(self, seed: int) -> None:
        if not 0 <= seed < 2**64:
            raise InvalidParameter(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self._bits = np.random.Philox(key=seed)

    def uniform(self) -> float:
        """Uniform draw on (0, 1]."""
        raw = int(self._bits.random_raw())
        return ((raw >> 11) + 1) * _INV_2_53

    def standard_normal(self) -> float:
        u1 = self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(_TWO_PI * u2)


def draw_gaussian(rng: Rng, sigma: float) -> float:
    """Zero-mean normal sample with standard deviation ``sigma``.

    Always consumes two raw words, including when ``sigma`` is zero.
    """
    if sigma < 0:
        raise InvalidParameter(f"sigma must be >= 0, got {sigma}")
    z = rng.standard_normal()
    if sigma == 0:
        return 0.0
    return sigma * z
