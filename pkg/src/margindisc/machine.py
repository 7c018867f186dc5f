"""Block structure of the two-program-port, one-data-port discriminator.

Feeding ``n`` copies of each unknown qubit state through the program ports
and ``n'`` copies of one of them through the data port, then averaging over
state pairs, leaves two highly symmetric mixed states.  They decompose into
``n + 1`` paired angular-momentum blocks: inside block ``alpha`` the task is
plain two-state discrimination with a known overlap ``c_alpha``, and the
block is entered with probability ``p_alpha``.  This module provides those
arrays together with the two classic baselines (zero error / zero
abstention) and the global critical margin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .known_pair import critical_margin

__all__ = [
    "PortConfig",
    "JordanSpectrum",
    "overlaps",
    "weights",
    "unambiguous_baseline",
    "minimum_error_baseline",
    "jordan_spectrum",
    "global_critical_margin",
]

# All combinatorics are evaluated as products of O(1) ratios, so the cap is
# about loop counts and conditioning, not integer overflow.
_MAX_TOTAL_COPIES = 300


@dataclass(frozen=True)
class PortConfig:
    """Port loading: ``n`` copies per program port, ``nprime`` in the data port."""

    n: int
    nprime: int

    def __post_init__(self) -> None:
        if int(self.n) != self.n or int(self.nprime) != self.nprime:
            raise ValueError("port counts must be integers")
        if self.n < 1 or self.nprime < 1:
            raise ValueError("both port counts must be at least 1")

    @property
    def blocks(self) -> int:
        """Number of paired blocks, one per total angular momentum."""
        return self.n + 1

    @property
    def d_program(self) -> int:
        """Dimension of the symmetric subspace of one program port."""
        return self.n + 1

    @property
    def d_joint(self) -> int:
        """Dimension of the symmetric subspace of a program+data port pair."""
        return self.n + self.nprime + 1

    @property
    def total_qubits(self) -> int:
        return 2 * self.n + self.nprime


def _check_supported(config: PortConfig) -> None:
    if config.n + config.nprime > _MAX_TOTAL_COPIES:
        raise OverflowError(
            f"combinatorics supported up to n + nprime = {_MAX_TOTAL_COPIES}, "
            f"got {config.n + config.nprime}"
        )


def overlaps(config: PortConfig) -> np.ndarray:
    """Block overlaps ``c_alpha``, strictly increasing with ``c_{n+1} = 1``.

    ``c_alpha = C(n' + alpha - 1, n') / C(n + n', n')`` evaluated as a
    product of ``n'`` ratios, so no factorial is ever materialized.
    """
    _check_supported(config)
    n, npr = config.n, config.nprime
    out = np.empty(n + 1)
    for a in range(1, n + 2):
        prod = 1.0
        for i in range(1, npr + 1):
            prod *= (a - 1 + i) / (n + i)
        out[a - 1] = prod
    return out


def weights(config: PortConfig) -> np.ndarray:
    """Probability ``p_alpha`` of landing in block ``alpha``; sums to one."""
    n, npr = config.n, config.nprime
    alpha = np.arange(1, n + 2)
    return (2 * alpha + npr - 1) / ((n + 1) * (n + npr + 1))


def unambiguous_baseline(config: PortConfig) -> float:
    """Zero-error success probability (abstains instead of erring)."""
    n, npr = config.n, config.nprime
    return n * npr / ((n + 1) * (npr + 2))


def minimum_error_baseline(config: PortConfig) -> float:
    """Zero-abstention success probability (always answers, sometimes wrongly).

    The factorial ratio ``(n'+k)! n! / ((n'+n)! k!)`` is built as a running
    product downward from its value 1 at ``k = n``, keeping every factor O(1).
    """
    _check_supported(config)
    n, npr = config.n, config.nprime
    norm = (n + 1) * (n + npr + 1)
    ratios = np.empty(n + 1)
    ratios[n] = 1.0
    for k in range(n, 0, -1):
        ratios[k - 1] = ratios[k] * k / (npr + k)
    total = 0.0
    for k in range(n + 1):
        total += (npr + 2 * k + 1) / norm * math.sqrt(max(0.0, 1.0 - ratios[k] ** 2))
    return 0.5 + 0.5 * total


@dataclass(frozen=True)
class JordanSpectrum:
    """Per-block overlaps, weights and critical margins for a port loading.

    Arrays are 0-indexed; entry ``i`` belongs to block ``alpha = i + 1``.
    Reports and file formats use the 1-based ``alpha`` labels.  Instances
    are immutable (arrays are marked read-only) and safe to share across
    threads.
    """

    config: PortConfig
    c: np.ndarray
    p: np.ndarray
    r_crit: np.ndarray

    def __post_init__(self) -> None:
        for name in ("c", "p", "r_crit"):
            arr = np.asarray(getattr(self, name), dtype=float).copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        m = self.config.blocks
        if not (self.c.shape == self.p.shape == self.r_crit.shape == (m,)):
            raise ValueError("spectrum arrays must have one entry per block")
        if self.c[0] <= 0.0 or not np.all(np.diff(self.c) > 0):
            raise ValueError("overlaps must be positive and strictly increasing")
        if abs(self.c[-1] - 1.0) > 1e-12:
            raise ValueError("the top block must have unit overlap")
        if np.any(self.p <= 0.0) or abs(float(self.p.sum()) - 1.0) > 1e-12:
            raise ValueError("block weights must be positive and sum to one")
        if not np.all(np.diff(self.r_crit) > 0) or abs(self.r_crit[-1] - 0.5) > 1e-12:
            raise ValueError("critical margins must increase strictly to 1/2")

    @classmethod
    def from_config(cls, config: PortConfig) -> "JordanSpectrum":
        c = overlaps(config)
        r_crit = np.array([critical_margin(x) for x in c])
        return cls(config=config, c=c, p=weights(config), r_crit=r_crit)

    @property
    def blocks(self) -> int:
        return self.config.blocks

    def j_of_alpha(self, alpha: int) -> float:
        """Total angular momentum of block ``alpha`` (half-integer for odd n')."""
        if not 1 <= alpha <= self.blocks:
            raise ValueError(f"alpha must lie in 1..{self.blocks}, got {alpha}")
        return alpha + self.config.nprime / 2 - 1


def jordan_spectrum(n: int, nprime: int) -> JordanSpectrum:
    """Convenience constructor from raw port counts."""
    return JordanSpectrum.from_config(PortConfig(n, nprime))


def global_critical_margin(spectrum: JordanSpectrum) -> float:
    """Weighted average of the per-block critical margins.

    Beyond this value the optimal device stops abstaining and the success
    probability sits on the minimum-error plateau.
    """
    return float(spectrum.p @ spectrum.r_crit)
