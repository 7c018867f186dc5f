"""Hot numeric loops: angle-grid scans and the water-filling bisection.

Two interchangeable backends implement each kernel: a numba ``@njit`` loop
(the default whenever numba imports) and a pure-numpy version.  Set the
environment variable ``MARGINDISC_NUMBA=0`` (or ``false``/``off``) before
import to force the numpy path.  Both backends walk the identical angle
grid, so their results agree to rounding; ``benchmarks/bench_kernels.py``
times them against each other.
"""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = [
    "USE_NUMBA",
    "scan_povm",
    "kkt_margins",
    "scan_povm_numpy",
    "kkt_margins_numpy",
    "scan_povm_jit",
    "kkt_margins_jit",
]

_HALF_PI = 0.5 * math.pi
_FEASIBILITY_SLACK = 1e-15
_BISECT_STEPS = 200


def _numba_enabled() -> bool:
    flag = os.environ.get("MARGINDISC_NUMBA", "").strip().lower()
    if flag in {"0", "false", "off", "no"}:
        return False
    try:
        import numba  # noqa: F401
    except ImportError:  # pragma: no cover - numba is a declared dependency
        return False
    return True


def _grid_size(step: float) -> int:
    # covers [pi/2, pi]; the last point is clamped onto pi exactly
    return int(math.ceil(_HALF_PI / step)) + 1


def _scan_povm_loop(theta: float, r: float, conditional: bool, step: float):
    """Best feasible success on the angle grid.

    Returns ``(best_phi, best_success, min_err_phi)``; ``best_success`` is
    -1.0 when no grid point satisfies the margin, in which case the angle
    of smallest error is the refinement seed.
    """
    n = int(math.ceil(_HALF_PI / step)) + 1
    best_phi = math.nan
    best_ps = -1.0
    min_err = math.inf
    min_phi = _HALF_PI
    for i in range(n):
        phi = _HALF_PI + i * step
        if phi > math.pi:
            phi = math.pi
        mu = 1.0 / (1.0 - math.cos(phi))
        ca = math.cos(0.5 * (phi - theta))
        cb = math.cos(0.5 * (phi + theta))
        ps = mu * ca * ca
        pe = mu * cb * cb
        if conditional:
            tot = ps + pe
            err = pe / tot if tot > 0.0 else 0.0
        else:
            err = pe
        if err < min_err:
            min_err = err
            min_phi = phi
        if err <= r + _FEASIBILITY_SLACK and ps > best_ps:
            best_ps = ps
            best_phi = phi
    return best_phi, best_ps, min_phi


def scan_povm_numpy(theta: float, r: float, conditional: bool, step: float):
    """Vectorized twin of :func:`_scan_povm_loop` on the same grid."""
    phi = np.minimum(_HALF_PI + np.arange(_grid_size(step)) * step, math.pi)
    mu = 1.0 / (1.0 - np.cos(phi))
    ps = mu * np.cos(0.5 * (phi - theta)) ** 2
    pe = mu * np.cos(0.5 * (phi + theta)) ** 2
    if conditional:
        tot = ps + pe
        err = np.divide(pe, tot, out=np.zeros_like(pe), where=tot > 0.0)
    else:
        err = pe
    min_phi = float(phi[np.argmin(err)])
    feasible = err <= r + _FEASIBILITY_SLACK
    if not feasible.any():
        return math.nan, -1.0, min_phi
    best = int(np.argmax(np.where(feasible, ps, -1.0)))
    return float(phi[best]), float(ps[best]), min_phi


def _kkt_margins_loop(c, p, rcrit, R):
    """Margins maximizing the weighted success under an average-margin budget.

    Stationarity of the concave objective puts every unsaturated block at
    ``(1 - c) * u**2`` for a common multiplier-derived ``u``; saturated
    blocks stick to their critical margins.  ``u`` is bisected until the
    weighted margins meet the budget ``R``.
    """
    m = c.shape[0]
    u_hi = 1.0
    for _ in range(_BISECT_STEPS):
        total = 0.0
        for a in range(m):
            ra = (1.0 - c[a]) * u_hi * u_hi
            if ra > rcrit[a]:
                ra = rcrit[a]
            total += p[a] * ra
        if total >= R:
            break
        u_hi *= 2.0
    u_lo = 0.0
    for _ in range(_BISECT_STEPS):
        u = 0.5 * (u_lo + u_hi)
        total = 0.0
        for a in range(m):
            ra = (1.0 - c[a]) * u * u
            if ra > rcrit[a]:
                ra = rcrit[a]
            total += p[a] * ra
        if total < R:
            u_lo = u
        else:
            u_hi = u
    u = 0.5 * (u_lo + u_hi)
    out = np.empty(m)
    for a in range(m):
        ra = (1.0 - c[a]) * u * u
        out[a] = rcrit[a] if ra > rcrit[a] else ra
    return out


def kkt_margins_numpy(c, p, rcrit, R):
    """Vectorized twin of :func:`_kkt_margins_loop`."""
    scale = 1.0 - c

    def spent(u: float) -> float:
        return float(p @ np.minimum(rcrit, scale * u * u))

    u_hi = 1.0
    for _ in range(_BISECT_STEPS):
        if spent(u_hi) >= R:
            break
        u_hi *= 2.0
    u_lo = 0.0
    for _ in range(_BISECT_STEPS):
        u = 0.5 * (u_lo + u_hi)
        if spent(u) < R:
            u_lo = u
        else:
            u_hi = u
    u = 0.5 * (u_lo + u_hi)
    return np.minimum(rcrit, scale * u * u)


USE_NUMBA = _numba_enabled()

if USE_NUMBA:
    from numba import njit

    scan_povm_jit = njit(cache=True)(_scan_povm_loop)
    kkt_margins_jit = njit(cache=True)(_kkt_margins_loop)
    scan_povm = scan_povm_jit
    kkt_margins = kkt_margins_jit
else:
    scan_povm_jit = None
    kkt_margins_jit = None
    scan_povm = scan_povm_numpy
    kkt_margins = kkt_margins_numpy
