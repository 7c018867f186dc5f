"""Independent numerical checks of the closed forms.

Everything here reaches the same quantities as the analytic modules through
a different route: constrained maximization on a KKT bisection instead of
the breakpoint ladder, angle-grid scans instead of the optimal-angle
formulas, and explicit dense construction of the averaged port states
(symmetrized tensor products, eigenbases, cross-Gram singular values)
instead of the closed binomial overlaps.  A Monte Carlo driver samples
random state pairs end to end.

Dense work is capped at 10 qubits (dimension 1024); symmetrizers average
over all k! permutation operators, an O(k! * 4**k) construction that is
perfectly fine at this scale.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._kernels import kkt_margins, scan_povm
from .allocator import allocate_weak
from .known_pair import (
    OutcomeTriple,
    _check_margin,
    _check_overlap,
    weak_phi,
)
from .machine import JordanSpectrum, PortConfig, global_critical_margin

__all__ = [
    "SizeLimitError",
    "EmptyFeasibleSetError",
    "OverlapBinningError",
    "InfeasibleMarginError",
    "DenseOperator",
    "SymmetricProjector",
    "GramDecomposition",
    "MonteCarloResult",
    "symmetric_projector",
    "build_sigma",
    "jordan_overlaps_numeric",
    "concave_allocate",
    "povm_scan",
    "monte_carlo_check",
]

_HALF_PI = 0.5 * math.pi
_MAX_DENSE_QUBITS = 10
_SUPPORT_TOL = 1e-10
_BIN_TOL = 1e-8


class SizeLimitError(ValueError):
    """Dense construction requested beyond the 10-qubit cap."""


class EmptyFeasibleSetError(RuntimeError):
    """No angle satisfied the margin; cannot happen for r >= 0 (signals a bug)."""


class OverlapBinningError(RuntimeError):
    """Numeric overlaps could not be grouped unambiguously into blocks."""


class InfeasibleMarginError(ValueError):
    """Requested global margin lies outside [0, global critical margin]."""


@dataclass(frozen=True)
class DenseOperator:
    """A dense square operator with small validation helpers."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.entries, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"operator entries must be square, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.entries - self.entries.conj().T)) <= tol)

    def assert_density(self, herm_tol: float = 1e-12, eig_tol: float = 1e-10) -> None:
        """Raise unless Hermitian, unit trace and positive semidefinite."""
        if not self.is_hermitian(herm_tol):
            raise ValueError("density operator must be Hermitian")
        if abs(complex(np.trace(self.entries)).real - 1.0) > 1e-12:
            raise ValueError("density operator must have unit trace")
        if float(np.linalg.eigvalsh(self.entries).min()) < -eig_tol:
            raise ValueError("density operator must be positive semidefinite")


@dataclass(frozen=True)
class SymmetricProjector:
    """Projector onto the permutation-symmetric subspace of ``k`` qubits."""

    k: int
    projector: DenseOperator

    def __post_init__(self) -> None:
        p = self.projector.entries
        if np.max(np.abs(p @ p - p)) > 1e-10:
            raise ValueError("symmetric projector must be idempotent")
        if abs(complex(np.trace(p)).real - (self.k + 1)) > 1e-10:
            raise ValueError("symmetric projector must have trace k + 1")

    @property
    def dim_sym(self) -> int:
        return self.k + 1


@dataclass(frozen=True)
class GramDecomposition:
    """Binned cross-Gram singular values: (j label, overlap, multiplicity)."""

    block_overlaps: tuple[tuple[float, float, int], ...]

    def __post_init__(self) -> None:
        for j, value, mult in self.block_overlaps:
            if not 0.0 <= value <= 1.0 + 1e-10:
                raise ValueError(f"overlap {value!r} outside [0, 1]")
            if mult != int(2 * j + 1):
                raise ValueError("multiplicity must equal 2j + 1")

    @property
    def overlap_values(self) -> np.ndarray:
        return np.array([value for _, value, _ in self.block_overlaps])

    @property
    def multiplicities(self) -> np.ndarray:
        return np.array([mult for _, _, mult in self.block_overlaps])


def symmetric_projector(k: int) -> SymmetricProjector:
    """Average of all k! permutation operators on k qubits."""
    if k < 1:
        raise ValueError("need at least one qubit")
    dim = 2**k
    acc = np.zeros((dim, dim))
    for perm in itertools.permutations(range(k)):
        for i in range(dim):
            j = 0
            for q in range(k):
                if (i >> (k - 1 - q)) & 1:
                    j |= 1 << (k - 1 - perm[q])
            acc[j, i] += 1.0
    acc /= math.factorial(k)
    return SymmetricProjector(k=k, projector=DenseOperator(acc))


def build_sigma(config: PortConfig) -> tuple[DenseOperator, DenseOperator]:
    """Averaged port states as explicit dense matrices.

    The first state symmetrizes the program+data ports jointly and the
    second program port alone; the second state swaps the two roles.  Port
    order is program A, data, program C, so both symmetrized groups are
    contiguous qubit ranges.
    """
    total = config.total_qubits
    if total > _MAX_DENSE_QUBITS:
        raise SizeLimitError(
            f"dense construction is capped at {_MAX_DENSE_QUBITS} qubits, got {total}"
        )
    joint = symmetric_projector(config.n + config.nprime).projector.entries
    single = symmetric_projector(config.n).projector.entries
    norm = config.d_joint * config.d_program
    sigma1 = DenseOperator(np.kron(joint, single) / norm)
    sigma2 = DenseOperator(np.kron(single, joint) / norm)
    sigma1.assert_density()
    sigma2.assert_density()
    return sigma1, sigma2


def _support_basis(op: DenseOperator, tol: float) -> np.ndarray:
    w, v = np.linalg.eigh(op.entries)
    return v[:, w > tol]


def jordan_overlaps_numeric(
    sigma1: DenseOperator,
    sigma2: DenseOperator,
    *,
    support_tol: float = _SUPPORT_TOL,
    bin_tol: float = _BIN_TOL,
) -> GramDecomposition:
    """Block overlaps from first principles.

    Orthonormal bases of the two supports are paired through the singular
    values of their cross-Gram matrix; equal values (within ``bin_tol``)
    belong to one block and their count is the block dimension 2j + 1.
    """
    u1 = _support_basis(sigma1, support_tol)
    u2 = _support_basis(sigma2, support_tol)
    singulars = np.linalg.svd(u1.conj().T @ u2, compute_uv=False)
    if singulars.size and float(singulars[0]) > 1.0 + 1e-10:
        raise OverlapBinningError("cross-Gram singular value exceeds one")
    groups: list[list[float]] = []
    for value in singulars:  # descending
        if groups and groups[-1][0] / groups[-1][1] - value <= bin_tol:
            groups[-1][0] += float(value)
            groups[-1][1] += 1
        else:
            groups.append([float(value), 1])
    blocks = []
    previous = None
    for total, count in groups:
        mean = total / count
        if previous is not None and previous - mean < 10 * bin_tol:
            raise OverlapBinningError(
                "distinct overlaps collide within the binning tolerance"
            )
        previous = mean
        blocks.append(((count - 1) / 2, min(mean, 1.0), int(count)))
    blocks.reverse()
    return GramDecomposition(block_overlaps=tuple(blocks))


def concave_allocate(spectrum: JordanSpectrum, R: float) -> tuple[np.ndarray, float]:
    """Maximize the weighted success over box-constrained per-block margins.

    Solves the same program as the breakpoint ladder, but through the KKT
    stationarity conditions of the concave objective: every unsaturated
    block sits at ``(1 - c) * u**2`` for a shared multiplier variable ``u``
    fixed by bisection on the margin budget.  The unit-overlap block has a
    linear objective, so it only absorbs margin once every other block is
    saturated.
    """
    R = float(R)
    budget_cap = global_critical_margin(spectrum)
    if R < 0.0 or R > budget_cap + 1e-12:
        raise InfeasibleMarginError(
            f"margin {R!r} outside the feasible range [0, {budget_cap!r}]"
        )
    c, p, rcrit = spectrum.c, spectrum.p, spectrum.r_crit
    prefix_budget = float(p[:-1] @ rcrit[:-1])
    if R <= 0.0:
        margins = np.zeros(spectrum.blocks)
    elif R >= prefix_budget - 1e-15:
        margins = rcrit.copy()
        margins[-1] = min(0.5, max(0.0, (R - prefix_budget) / float(p[-1])))
    else:
        margins = kkt_margins(c, p, rcrit, R)
    value = float(p @ (np.sqrt(margins) + np.sqrt(1.0 - c)) ** 2)
    return margins, value


def _scan_outcome(theta: float, phi: float, conditional: bool) -> tuple[float, float]:
    """(success, constrained error) of the extremal measurement at ``phi``."""
    mu = 1.0 / (1.0 - math.cos(phi))
    ps = mu * math.cos(0.5 * (phi - theta)) ** 2
    pe = mu * math.cos(0.5 * (phi + theta)) ** 2
    if conditional:
        tot = ps + pe
        return ps, (pe / tot if tot > 0.0 else 0.0)
    return ps, pe


def _golden_min(fn, lo: float, hi: float, iters: int = 120) -> float:
    ratio = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - ratio * (b - a)
    x2 = a + ratio * (b - a)
    f1, f2 = fn(x1), fn(x2)
    for _ in range(iters):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - ratio * (b - a)
            f1 = fn(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + ratio * (b - a)
            f2 = fn(x2)
    return 0.5 * (a + b)


def povm_scan(
    c: float, r: float, kind: str = "weak", grid_step: float = 1e-5
) -> tuple[float, float]:
    """Best success over the angle grid, subject to the margin constraint.

    One refinement pass follows the grid: the optimum saturates the margin,
    so the saturation angle is bisected between the best feasible grid
    point and its infeasible neighbour.  When the whole feasible set falls
    between grid points (tiny margins), the error is minimized locally
    around the grid's least-error angle instead.
    """
    c = _check_overlap(c)
    r = _check_margin(r)
    if kind not in ("weak", "strong"):
        raise ValueError(f"kind must be 'weak' or 'strong', got {kind!r}")
    if not 0.0 < grid_step <= 1e-3:
        raise ValueError(f"grid step must lie in (0, 1e-3] rad, got {grid_step!r}")
    conditional = kind == "strong"
    theta = math.acos(c)
    best_phi, best_ps, min_err_phi = scan_povm(theta, r, conditional, grid_step)

    if best_ps >= 0.0:
        left = best_phi - grid_step
        if left >= _HALF_PI - 1e-15:
            _, err_left = _scan_outcome(theta, left, conditional)
            if err_left > r:
                lo, hi = left, best_phi
                for _ in range(80):
                    mid = 0.5 * (lo + hi)
                    if _scan_outcome(theta, mid, conditional)[1] > r:
                        lo = mid
                    else:
                        hi = mid
                ps_ref, err_ref = _scan_outcome(theta, hi, conditional)
                if err_ref <= r + 1e-12 and ps_ref > best_ps:
                    return hi, ps_ref
        return best_phi, best_ps

    # No feasible grid point: converge on the locally unimodal error minimum.
    lo = max(min_err_phi - grid_step, _HALF_PI)
    hi = min(min_err_phi + grid_step, math.pi)
    phi_star = _golden_min(lambda x: _scan_outcome(theta, x, conditional)[1], lo, hi)
    ps_star, err_star = _scan_outcome(theta, phi_star, conditional)
    if err_star <= r + 1e-12:
        return phi_star, ps_star
    raise EmptyFeasibleSetError(
        f"no angle satisfies margin {r!r} for overlap {c!r}; this should be impossible"
    )


@dataclass(frozen=True)
class MonteCarloResult:
    """Averaged outcome probabilities over sampled state pairs.

    ``rng`` records the generator algorithm so runs are reproducible from
    ``(rng, seed, trials)`` alone.
    """

    outcome: OutcomeTriple
    stderr_success: float
    stderr_error: float
    trials: int
    seed: int
    rng: str = "pcg64"


def _product_state(factors: list[np.ndarray]) -> np.ndarray:
    """Batched tensor product of per-trial single-qubit states."""
    state = factors[0]
    for f in factors[1:]:
        state = (state[:, :, None] * f[:, None, :]).reshape(state.shape[0], -1)
    return state


def _quadratic_form(v: np.ndarray, op: np.ndarray) -> np.ndarray:
    return np.einsum("ti,ti->t", v.conj(), v @ op.T).real


def _assemble_block_povm(
    spectrum: JordanSpectrum, alloc, config: PortConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Dense label operators built pairwise from the numeric Jordan bases.

    Each singular pair of the cross-Gram matrix spans a two-dimensional
    sector carrying a known-pair problem at that overlap; the sector gets
    the extremal measurement for its allocated margin.  Unit-overlap pairs
    are indistinguishable, so both labels share the abstain-or-guess weight
    given by the top block's weak margin.
    """
    sigma1, sigma2 = build_sigma(config)
    u1 = _support_basis(sigma1, _SUPPORT_TOL)
    u2 = _support_basis(sigma2, _SUPPORT_TOL)
    w, singulars, vh = np.linalg.svd(u1.conj().T @ u2)
    left = u1 @ w
    right = u2 @ vh.conj().T
    dim = sigma1.dim
    e1 = np.zeros((dim, dim), dtype=complex)
    e2 = np.zeros((dim, dim), dtype=complex)
    guess_weight = float(alloc.r_weak[-1])
    for k, overlap in enumerate(singulars):
        a = left[:, k]
        if overlap >= 1.0 - 1e-8:
            shared = guess_weight * np.outer(a, a.conj())
            e1 += shared
            e2 += shared
            continue
        i = int(np.argmin(np.abs(spectrum.c - overlap)))
        if abs(float(spectrum.c[i]) - float(overlap)) > 1e-6:
            raise OverlapBinningError(
                f"numeric overlap {overlap!r} does not match any block"
            )
        b = right[:, k]
        sym = a + b
        sym /= np.linalg.norm(sym)
        anti = a - b
        anti /= np.linalg.norm(anti)
        phi, mu = weak_phi(float(spectrum.c[i]), float(alloc.r_weak[i]))
        f1 = math.cos(0.5 * phi) * sym + math.sin(0.5 * phi) * anti
        f2 = math.cos(0.5 * phi) * sym - math.sin(0.5 * phi) * anti
        e1 += mu * np.outer(f1, f1.conj())
        e2 += mu * np.outer(f2, f2.conj())
    leftover = np.eye(dim) - e1 - e2
    if float(np.linalg.eigvalsh(leftover).min()) < -1e-10:
        raise RuntimeError("assembled POVM has a negative abstention operator")
    return e1, e2


def monte_carlo_check(
    config: PortConfig, R: float, trials: int, seed: int
) -> MonteCarloResult:
    """End-to-end average over Haar-random state pairs.

    Each trial draws a fresh state pair (two standard complex normals per
    state, normalized), loads both port patterns, and evaluates the exact
    outcome probabilities of the optimal block measurement; the only noise
    is the pair sampling itself.
    """
    if config.total_qubits > _MAX_DENSE_QUBITS:
        raise SizeLimitError(
            f"dense construction is capped at {_MAX_DENSE_QUBITS} qubits, "
            f"got {config.total_qubits}"
        )
    if trials < 10_000:
        raise ValueError(f"need at least 10000 trials, got {trials}")
    R = _check_margin(R)
    spectrum = JordanSpectrum.from_config(config)
    alloc = allocate_weak(spectrum, R)
    e1, e2 = _assemble_block_povm(spectrum, alloc, config)

    rng = np.random.default_rng(seed)
    z = rng.standard_normal((2, trials, 2)) + 1j * rng.standard_normal((2, trials, 2))
    psi1 = z[0] / np.linalg.norm(z[0], axis=1, keepdims=True)
    psi2 = z[1] / np.linalg.norm(z[1], axis=1, keepdims=True)

    n, npr = config.n, config.nprime
    p_success = np.empty(trials)
    p_error = np.empty(trials)
    chunk = max(1, 2_000_000 // 2**config.total_qubits)
    for start in range(0, trials, chunk):
        sl = slice(start, min(start + chunk, trials))
        v1 = _product_state([psi1[sl]] * n + [psi1[sl]] * npr + [psi2[sl]] * n)
        v2 = _product_state([psi1[sl]] * n + [psi2[sl]] * npr + [psi2[sl]] * n)
        p_success[sl] = 0.5 * (_quadratic_form(v1, e1) + _quadratic_form(v2, e2))
        p_error[sl] = 0.5 * (_quadratic_form(v1, e2) + _quadratic_form(v2, e1))

    p_abstain = 1.0 - p_success - p_error
    root = math.sqrt(trials)
    outcome = OutcomeTriple(
        float(p_success.mean()), float(p_error.mean()), max(0.0, float(p_abstain.mean()))
    )
    return MonteCarloResult(
        outcome=outcome,
        stderr_success=float(p_success.std(ddof=1)) / root,
        stderr_error=float(p_error.std(ddof=1)) / root,
        trials=int(trials),
        seed=int(seed),
    )
