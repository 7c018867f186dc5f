"""Closed forms for two-state discrimination with an error margin.

Two equiprobable pure states with overlap ``c`` are told apart by a
three-outcome measurement: label 1, label 2, or abstain.  A *weak* margin
bounds the average error probability; a *strong* margin bounds each
conditional error probability given that a label was produced.  Up to the
critical margin ``r_c`` the optimal measurement trades abstentions for
errors; beyond it nothing improves and the success probability sits on the
minimum-error plateau.

All functions are pure and total on their stated domains.  Margins above
``r_c`` evaluate to the plateau instead of raising, so sweeping callers
never need to special-case the boundary.
"""

from __future__ import annotations

import math
from typing import NamedTuple

from ._invert import invert_increasing

__all__ = [
    "DegenerateOverlapError",
    "PovmAngles",
    "OutcomeTriple",
    "critical_margin",
    "weak_success",
    "strong_success",
    "weak_phi",
    "strong_phi",
    "outcome_probabilities",
    "weak_to_strong_margin",
    "strong_to_weak_margin",
]

_HALF_PI = 0.5 * math.pi

# Both branches of the success formulas agree analytically at r == r_c.
# Evaluating the plateau branch within this pad of the join avoids
# cancellation in sqrt(1 - c) + 2 sqrt(r) for nearly identical states.
_CRITICAL_PAD = 1e-14


class DegenerateOverlapError(ValueError):
    """For identical states (c = 1) the strong-margin angle is undefined.

    The two label operators become proportional to each other, so every
    angle satisfies the margin.  Callers must use the dedicated strategy
    for indistinguishable states (abstain with some probability, answer
    uniformly at random otherwise) instead of parametrizing a measurement.
    """


class PovmAngles(NamedTuple):
    """Extremal three-outcome measurement in a two-dimensional block.

    ``phi`` is the half-space opening angle of the two label vectors
    (``pi/2 <= phi <= pi``); ``mu = 1/(1 - cos phi)`` is the largest common
    weight keeping the abstention operator positive.
    """

    phi: float
    mu: float


class OutcomeTriple(NamedTuple):
    """Success, error and abstention probabilities; they sum to one."""

    p_success: float
    p_error: float
    p_abstain: float


def _check_overlap(c: float) -> float:
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"overlap must lie in [0, 1], got {c!r}")
    return float(c)


def _check_margin(r: float) -> float:
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"error margin must lie in [0, 1], got {r!r}")
    return float(r)


def _plateau(c: float) -> float:
    """Minimum-error success probability for overlap ``c``."""
    return 0.5 * (1.0 + math.sqrt(1.0 - c * c))


def critical_margin(c: float) -> float:
    """Margin above which allowing more error buys no more success."""
    c = _check_overlap(c)
    return 0.5 * (1.0 - math.sqrt(1.0 - c * c))


def weak_success(c: float, r: float) -> float:
    """Optimal success probability under an average-error margin ``r``."""
    c = _check_overlap(c)
    r = _check_margin(r)
    if r >= critical_margin(c) - _CRITICAL_PAD:
        return _plateau(c)
    return (math.sqrt(r) + math.sqrt(1.0 - c)) ** 2


def strong_success(c: float, r: float) -> float:
    """Optimal success probability under a conditional-error margin ``r``.

    For identical states the closed form degenerates to zero below the
    critical margin: answering at all would make the conditional error 1/2.
    """
    c = _check_overlap(c)
    r = _check_margin(r)
    if r >= critical_margin(c) - _CRITICAL_PAD:
        return _plateau(c)
    root = math.sqrt(1.0 - r)
    return (root / (math.sqrt(r) - root)) ** 2 * (1.0 - c)


def weak_phi(c: float, r: float) -> PovmAngles:
    """Measurement angle saturating a weak margin ``r``.

    At ``c = 1, r = 0`` the angle degenerates to ``pi`` with ``mu = 1/2``:
    an abstain-only device, which is the correct zero-error limit.
    """
    c = _check_overlap(c)
    r = _check_margin(r)
    if r >= critical_margin(c) - _CRITICAL_PAD:
        return PovmAngles(_HALF_PI, 1.0)
    denom = math.sqrt(1.0 - c) + 2.0 * math.sqrt(r)
    phi = math.pi if denom == 0.0 else 2.0 * math.atan(math.sqrt(1.0 + c) / denom)
    return PovmAngles(phi, 1.0 / (1.0 - math.cos(phi)))


def strong_phi(c: float, r: float) -> PovmAngles:
    """Measurement angle saturating a strong margin ``r``.

    Raises :class:`DegenerateOverlapError` for ``c = 1``, where the label
    operators become proportional and the angle carries no information.
    """
    c = _check_overlap(c)
    r = _check_margin(r)
    if c == 1.0:
        raise DegenerateOverlapError(
            "identical states: the strong-margin angle is ambiguous; "
            "use the abstain-or-guess strategy instead"
        )
    if r >= critical_margin(c) - _CRITICAL_PAD:
        return PovmAngles(_HALF_PI, 1.0)
    root = math.sqrt(1.0 - r)
    sqr = math.sqrt(r)
    t = (root - sqr) / (root + sqr) * math.sqrt((1.0 + c) / (1.0 - c))
    phi = 2.0 * math.atan(t)
    return PovmAngles(phi, 1.0 / (1.0 - math.cos(phi)))


def outcome_probabilities(c: float, angles: PovmAngles) -> OutcomeTriple:
    """Outcome probabilities of the symmetric three-outcome measurement.

    With ``theta = arccos c``:

        p_success = mu * cos^2((phi - theta)/2)
        p_error   = mu * cos^2((phi + theta)/2)

    and abstention takes the rest.
    """
    c = _check_overlap(c)
    phi, mu = float(angles[0]), float(angles[1])
    if not _HALF_PI - 1e-12 <= phi <= math.pi + 1e-12:
        raise ValueError(f"phi must lie in [pi/2, pi], got {phi!r}")
    if abs(mu * (1.0 - math.cos(phi)) - 1.0) > 1e-9:
        raise ValueError("mu is inconsistent with phi: expected mu = 1/(1 - cos phi)")
    theta = math.acos(c)
    p_success = mu * math.cos(0.5 * (phi - theta)) ** 2
    p_error = mu * math.cos(0.5 * (phi + theta)) ** 2
    p_abstain = 1.0 - p_success - p_error
    if p_abstain < 0.0:
        # round-off at the no-abstention boundary
        p_abstain = 0.0
    return OutcomeTriple(p_success, p_error, p_abstain)


def weak_to_strong_margin(c: float, r_weak: float) -> float:
    """Strong margin saturated by the weak-margin-``r_weak`` measurement.

    Fixes 0 and the critical margin; strictly increasing in between.
    """
    c = _check_overlap(c)
    r_weak = _check_margin(r_weak)
    rc = critical_margin(c)
    if r_weak > rc + 1e-9:
        raise ValueError(f"weak margin {r_weak!r} exceeds the critical margin {rc!r}")
    r_weak = min(r_weak, rc)
    if r_weak == 0.0:
        return 0.0
    return r_weak / (weak_success(c, r_weak) + r_weak)


def strong_to_weak_margin(c: float, r_strong: float) -> float:
    """Inverse of :func:`weak_to_strong_margin`, found by bisection."""
    c = _check_overlap(c)
    r_strong = _check_margin(r_strong)
    rc = critical_margin(c)
    if r_strong > rc + 1e-9:
        raise ValueError(f"strong margin {r_strong!r} exceeds the critical margin {rc!r}")
    if r_strong == 0.0:
        return 0.0
    if r_strong >= rc:
        return rc
    return invert_increasing(lambda w: weak_to_strong_margin(c, w), 0.0, rc, r_strong)
