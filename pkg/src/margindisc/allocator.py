"""Water-filling of a global error margin across discrimination blocks.

A global weak margin ``R`` is the block-probability-weighted average of
per-block margins.  The optimal split gives every unsaturated block a
margin proportional to ``1 - c_alpha``; as ``R`` grows, blocks freeze at
their critical margins in order of increasing overlap.  The freeze points
form the saturation ladder, and between consecutive rungs the maximum
success probability has the closed form::

    P(R) = sat_beta + (sqrt(R - xi_beta) + sqrt(chi_beta))**2

where ``sat_beta`` is the frozen blocks' contribution, ``xi_beta`` the
margin weight they consume, and ``chi_beta`` the remaining blocks' summed
``p_alpha (1 - c_alpha)``.  On the last rung ``chi`` vanishes and the curve
degenerates to the affine stretch ``sat + (R - xi)``.

Strong (conditional-error) margins ride on the weak solution: the global
weak and strong margins are connected by the bijection
``R_s = R_w / (P(R_w) + R_w)``, inverted piecewise on the same ladder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from ._invert import invert_increasing
from .known_pair import weak_success, weak_to_strong_margin
from .machine import JordanSpectrum

__all__ = [
    "SaturationLadder",
    "MarginAllocation",
    "build_ladder",
    "allocate_weak",
    "weak_success_global",
    "strong_global",
    "strong_condition_residual",
    "weak_curve",
    "strong_curve",
]

# Interior points per rung used to spot-check that the weak->strong margin
# map is increasing within each piece (assumed by the piecewise inversion).
_PIECE_MONOTONE_SAMPLES = 6


@dataclass(frozen=True)
class SaturationLadder:
    """Freeze points of the optimal margin split for one spectrum.

    Index ``b`` (0-based) describes rung ``beta = b + 1``: for global
    margins between ``breakpoints[b-1]`` and ``breakpoints[b]`` exactly the
    first ``b`` blocks sit at their critical margins.  The last breakpoint
    is the global critical margin.
    """

    spectrum: JordanSpectrum
    breakpoints: np.ndarray
    strong_breakpoints: np.ndarray
    xi: np.ndarray
    chi: np.ndarray
    sat_success: np.ndarray

    def __post_init__(self) -> None:
        for name in ("breakpoints", "strong_breakpoints", "xi", "chi", "sat_success"):
            arr = np.asarray(getattr(self, name), dtype=float).copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def critical_margin(self) -> float:
        return float(self.breakpoints[-1])

    @property
    def minimum_error_success(self) -> float:
        return float(self.sat_success[-1] + (self.critical_margin - self.xi[-1]))


def _success_in_piece(ladder: SaturationLadder, b: int, R: float) -> float:
    """Closed-form success on rung ``b`` (0-based), valid for R in that piece."""
    spent = max(R - float(ladder.xi[b]), 0.0)
    chi = float(ladder.chi[b])
    base = float(ladder.sat_success[b])
    if chi == 0.0:
        # last rung: only the unit-overlap block is left and the curve is affine
        return base + spent
    return base + (math.sqrt(spent) + math.sqrt(chi)) ** 2


def build_ladder(spectrum: JordanSpectrum) -> SaturationLadder:
    """Precompute breakpoints and per-rung sums for a spectrum.

    The generic breakpoint formula divides by ``1 - c`` and is 0/0 on the
    unit-overlap block, so the last rung uses the exact special form
    ``xi + p/2``, which equals the global critical margin.
    """
    c, p, rc = spectrum.c, spectrum.p, spectrum.r_crit
    m = spectrum.blocks
    xi = np.concatenate(([0.0], np.cumsum(p * rc)[:-1]))
    chi = np.cumsum((p * (1.0 - c))[::-1])[::-1]
    sat = np.concatenate(([0.0], np.cumsum(0.5 * p * (1.0 + np.sqrt(1.0 - c**2)))[:-1]))
    bps = np.empty(m)
    bps[: m - 1] = rc[: m - 1] / (1.0 - c[: m - 1]) * chi[: m - 1] + xi[: m - 1]
    bps[m - 1] = xi[m - 1] + 0.5 * p[m - 1]
    if bps[0] <= 0.0 or not np.all(np.diff(bps) > 0):
        raise ValueError("saturation ladder is not strictly increasing")

    def succ(b: int, x: float) -> float:
        spent = max(x - float(xi[b]), 0.0)
        if chi[b] == 0.0:
            return float(sat[b]) + spent
        return float(sat[b]) + (math.sqrt(spent) + math.sqrt(chi[b])) ** 2

    strong = np.empty(m)
    for b in range(m):
        strong[b] = bps[b] / (succ(b, bps[b]) + bps[b])
    # At the top rung success + margin equals one exactly, so the strong
    # breakpoint coincides with the critical margin; snap away the round-off.
    if abs(strong[m - 1] - bps[m - 1]) > 1e-12:
        raise ValueError("strong breakpoint at the critical margin is inconsistent")
    strong[m - 1] = bps[m - 1]

    # Spot-check that the weak->strong map increases within every rung; the
    # piecewise inversion in strong_global relies on it.
    lo = 0.0
    last = -1.0
    for b in range(m):
        for w in np.linspace(lo, bps[b], _PIECE_MONOTONE_SAMPLES + 2)[1:]:
            rs = w / (succ(b, float(w)) + w)
            if rs <= last:
                raise RuntimeError("weak->strong margin map is not increasing (invariant violation)")
            last = rs
        lo = bps[b]

    return SaturationLadder(
        spectrum=spectrum,
        breakpoints=bps,
        strong_breakpoints=strong,
        xi=xi,
        chi=chi,
        sat_success=sat,
    )


@dataclass(frozen=True)
class MarginAllocation:
    """One optimal split of a global margin, in both margin views.

    ``beta`` is the 1-based rung index: blocks ``alpha < beta`` are frozen
    at their critical margins.  ``error`` is the global average error
    probability actually incurred, which equals the weak-view margin.
    ``clamped`` flags requests above the critical margin, which are served
    with the minimum-error split.
    """

    R: float
    kind: Literal["weak", "strong"]
    beta: int
    r_weak: np.ndarray
    r_strong: np.ndarray
    success: float
    error: float
    abstain: float
    weak_margin: float
    clamped: bool

    def __post_init__(self) -> None:
        for name in ("r_weak", "r_strong"):
            arr = np.asarray(getattr(self, name), dtype=float).copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def frozen(self) -> np.ndarray:
        """Boolean mask over blocks frozen at their critical margins."""
        return np.arange(1, len(self.r_weak) + 1) < self.beta


def _check_global_margin(R: float) -> float:
    if not 0.0 <= R <= 1.0:
        raise ValueError(f"global margin must lie in [0, 1], got {R!r}")
    return float(R)


def _beta_index(ladder: SaturationLadder, R: float) -> int:
    """0-based rung for margin ``R``; ``m`` signals a clamped request.

    A linear scan is plenty at these sizes, and exact breakpoint hits
    resolve to the lower rung (both rungs agree there by continuity).
    """
    for b, edge in enumerate(ladder.breakpoints):
        if R <= edge:
            return b
    return len(ladder.breakpoints)


def _strong_view(spectrum: JordanSpectrum, r_weak: np.ndarray) -> np.ndarray:
    rs = np.empty_like(r_weak)
    for i in range(spectrum.blocks - 1):
        rs[i] = weak_to_strong_margin(float(spectrum.c[i]), float(r_weak[i]))
    # The unit-overlap block answers at random when it answers at all, so
    # its conditional error is pinned at 1/2 regardless of the weak margin.
    rs[-1] = 0.5
    return rs


def allocate_weak(
    spectrum: JordanSpectrum, R: float, *, ladder: SaturationLadder | None = None
) -> MarginAllocation:
    """Optimal per-block margins for a global weak margin ``R``.

    Blocks below the current rung are frozen at their critical margins; the
    rest share the remaining margin in proportion to ``1 - c_alpha``.  On
    the last rung only the unit-overlap block is unfrozen and it absorbs
    the remainder directly.  Requests above the critical margin clamp to
    the minimum-error split.
    """
    R = _check_global_margin(R)
    if ladder is None:
        ladder = build_ladder(spectrum)
    m = spectrum.blocks
    rc = spectrum.r_crit
    r_critical = ladder.critical_margin

    if R > r_critical:
        r_weak = rc.copy()
        return MarginAllocation(
            R=R,
            kind="weak",
            beta=m + 1,
            r_weak=r_weak,
            r_strong=_strong_view(spectrum, r_weak),
            success=ladder.minimum_error_success,
            error=r_critical,
            abstain=max(0.0, 1.0 - ladder.minimum_error_success - r_critical),
            weak_margin=r_critical,
            clamped=True,
        )

    b = _beta_index(ladder, R)
    r_weak = np.empty(m)
    r_weak[:b] = rc[:b]
    if b == m - 1:
        r_weak[b] = (R - float(ladder.xi[b])) / float(spectrum.p[b])
        r_weak[b] = min(max(r_weak[b], 0.0), 0.5)
    else:
        r_weak[b:] = (1.0 - spectrum.c[b:]) * (R - float(ladder.xi[b])) / float(ladder.chi[b])
    success = _success_in_piece(ladder, b, R)
    return MarginAllocation(
        R=R,
        kind="weak",
        beta=b + 1,
        r_weak=r_weak,
        r_strong=_strong_view(spectrum, r_weak),
        success=success,
        error=R,
        abstain=max(0.0, 1.0 - success - R),
        weak_margin=R,
        clamped=False,
    )


def weak_success_global(
    spectrum: JordanSpectrum, R: float, *, ladder: SaturationLadder | None = None
) -> float:
    """Maximum success probability under a global weak margin ``R``."""
    R = _check_global_margin(R)
    if ladder is None:
        ladder = build_ladder(spectrum)
    b = _beta_index(ladder, R)
    if b == spectrum.blocks:
        return ladder.minimum_error_success
    return _success_in_piece(ladder, b, R)


def _success_many(ladder: SaturationLadder, R_values: np.ndarray) -> np.ndarray:
    """Vectorized weak success; same rung choice as the scalar scan."""
    R_values = np.asarray(R_values, dtype=float)
    m = len(ladder.breakpoints)
    capped = np.minimum(R_values, ladder.critical_margin)
    b = np.minimum(np.searchsorted(ladder.breakpoints, capped, side="left"), m - 1)
    spent = np.maximum(capped - ladder.xi[b], 0.0)
    chi = ladder.chi[b]
    curved = (np.sqrt(spent) + np.sqrt(chi)) ** 2
    return ladder.sat_success[b] + np.where(chi == 0.0, spent, curved)


def strong_global(
    spectrum: JordanSpectrum, RS: float, *, ladder: SaturationLadder | None = None
) -> MarginAllocation:
    """Optimal allocation for a global *strong* (conditional-error) margin.

    The request is mapped to its weak-view equivalent by inverting
    ``RS = W / (P(W) + W)`` inside the bracketing rung, after which the
    weak machinery applies unchanged.  The critical margin is shared by
    both views, so requests at or above it clamp identically.
    """
    RS = _check_global_margin(RS)
    if ladder is None:
        ladder = build_ladder(spectrum)
    if RS == 0.0 or RS >= ladder.critical_margin:
        weak = allocate_weak(spectrum, RS, ladder=ladder)
        return replace(weak, kind="strong")

    b = 0
    while RS > ladder.strong_breakpoints[b]:
        b += 1
    lo = 0.0 if b == 0 else float(ladder.breakpoints[b - 1])
    hi = float(ladder.breakpoints[b])

    def forward(w: float) -> float:
        return w / (_success_in_piece(ladder, b, w) + w)

    if forward(lo) >= RS:
        # the request sits within cross-rung rounding of the left edge
        W = lo
    else:
        W = invert_increasing(forward, lo, hi, RS)
    weak = allocate_weak(spectrum, W, ladder=ladder)
    return replace(weak, kind="strong", R=RS)


def strong_condition_residual(spectrum: JordanSpectrum, alloc: MarginAllocation) -> float:
    """Residual of the saturated global strong condition.

    Writing the global conditional-error equality as
    ``R * P_success - (1 - R) * P_error = 0`` and expanding both sides over
    blocks (the per-block error is ``P_s,alpha * r_s / (1 - r_s)``) gives

        sum_alpha p_alpha P_s,alpha [ R - (1 - R) r_s,alpha / (1 - r_s,alpha) ]

    which vanishes exactly for optimal allocations with ``R <= R_c``.  The
    per-block successes are taken from the weak view, which stays valid on
    the unit-overlap block where the strong closed form degenerates.
    """
    if alloc.kind != "strong":
        raise ValueError("the residual is defined for strong allocations")
    R = alloc.R
    total = 0.0
    for i in range(spectrum.blocks):
        ps = weak_success(float(spectrum.c[i]), float(alloc.r_weak[i]))
        rs = float(alloc.r_strong[i])
        total += float(spectrum.p[i]) * ps * (R - (1.0 - R) * rs / (1.0 - rs))
    return total


def _pinned_grid(hi: float, pins: np.ndarray, samples: int) -> np.ndarray:
    """Monotone grid of exactly ``samples`` points on [0, hi] containing ``pins``.

    Pin values are assigned strictly increasing indices near their uniform
    positions and the stretches between consecutive pins are re-sampled
    uniformly, so the grid stays sorted and deterministic.
    """
    pin_list = sorted({float(x) for x in np.atleast_1d(pins) if 0.0 < float(x) < hi})
    if samples < len(pin_list) + 2:
        raise ValueError(
            f"need at least {len(pin_list) + 2} samples to pin every breakpoint, got {samples}"
        )
    indices: list[int] = []
    for k, value in enumerate(pin_list):
        lowest = (indices[-1] if indices else 0) + 1
        highest = samples - 2 - (len(pin_list) - 1 - k)
        target = int(round(value / hi * (samples - 1)))
        indices.append(min(max(target, lowest), highest))
    anchors = [(0, 0.0)] + list(zip(indices, pin_list)) + [(samples - 1, hi)]
    grid = np.empty(samples)
    for (i0, v0), (i1, v1) in zip(anchors[:-1], anchors[1:]):
        grid[i0 : i1 + 1] = np.linspace(v0, v1, i1 - i0 + 1)
    return grid


def weak_curve(
    spectrum: JordanSpectrum, samples: int, *, ladder: SaturationLadder | None = None
) -> np.ndarray:
    """(R, success) pairs for the weak condition on [0, 1.2 * R_c].

    Every ladder breakpoint appears exactly in the first column, so the
    piecewise structure is sampled faithfully; the range extends past the
    critical margin to show the plateau.
    """
    if ladder is None:
        ladder = build_ladder(spectrum)
    hi = min(1.0, 1.2 * ladder.critical_margin)
    grid = _pinned_grid(hi, ladder.breakpoints, samples)
    return np.column_stack((grid, _success_many(ladder, grid)))


def strong_curve(
    spectrum: JordanSpectrum, samples: int, *, ladder: SaturationLadder | None = None
) -> np.ndarray:
    """(R, success) pairs for the strong condition on [0, 1.2 * R_c]."""
    if ladder is None:
        ladder = build_ladder(spectrum)
    hi = min(1.0, 1.2 * ladder.critical_margin)
    grid = _pinned_grid(hi, ladder.strong_breakpoints, samples)
    values = np.array(
        [strong_global(spectrum, float(r), ladder=ladder).success for r in grid]
    )
    return np.column_stack((grid, values))
