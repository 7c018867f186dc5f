"""Inversion of monotone scalar maps by bisection."""

from __future__ import annotations

from typing import Callable

from scipy.optimize import bisect

# All inverted quantities are O(1) margins, so an absolute tolerance on the
# argument is enough; double precision leaves ~3 spare digits.
XTOL = 1e-13
MAXITER = 200


class BracketingError(RuntimeError):
    """The target is not bracketed: an internal invariant was violated.

    The maps inverted here are continuous and increasing by construction,
    so failure to bracket means corrupted inputs, not a user error.
    """


def invert_increasing(
    fn: Callable[[float], float],
    lo: float,
    hi: float,
    target: float,
    xtol: float = XTOL,
    maxiter: int = MAXITER,
) -> float:
    """Solve ``fn(x) == target`` for an increasing ``fn`` on ``[lo, hi]``."""
    flo = fn(lo) - target
    if flo == 0.0:
        return float(lo)
    fhi = fn(hi) - target
    if fhi == 0.0:
        return float(hi)
    if flo > 0.0 or fhi < 0.0:
        raise BracketingError(
            f"target {target!r} not bracketed on [{lo!r}, {hi!r}] "
            f"(f-range [{flo + target!r}, {fhi + target!r}])"
        )
    try:
        root = bisect(lambda x: fn(x) - target, lo, hi, xtol=xtol, maxiter=maxiter)
    except (ValueError, RuntimeError) as exc:  # pragma: no cover - defensive
        raise BracketingError(str(exc)) from exc
    return float(root)
