"""Dense M-qubit layer: symmetric projectors, the projection cloner, Haar moments.

Qubit 0 is the most significant bit of a basis index (``np.kron`` order).
Everything is dense, so sizes are capped at a few qubits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .cloning_machine import OutcomeDistribution
from .conservation import CloneSpec
from .fock_algebra import QubitAmplitudes

MAX_COPIES = 12
MAX_CLONES = 10
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class DensityOperator:
    """Dense density matrix.

    ``check_psd=False`` skips the full eigenvalue check; callers that pass it
    must have established positivity some cheaper way.
    """

    matrix: np.ndarray
    check_psd: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density operator must be square, got shape {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise ValueError("matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1) > TRACE_TOL:
            raise ValueError(f"trace is {tr!r}, expected 1")
        if self.check_psd and np.linalg.eigvalsh(m).min() < -PSD_TOL:
            raise ValueError("matrix has a negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_qubits(self) -> int:
        n = self.dim.bit_length() - 1
        if 1 << n != self.dim:
            raise ValueError(f"dimension {self.dim} is not a power of two")
        return n


@dataclass(frozen=True)
class SymmetricProjector:
    copies: int
    matrix: np.ndarray

    @property
    def rank(self) -> int:
        return int(round(np.trace(self.matrix).real))


def _check_copies(copies: int, cap: int = MAX_COPIES) -> None:
    if not 1 <= copies <= cap:
        raise ValueError(f"copies must be in [1, {cap}], got {copies}")


@lru_cache(maxsize=None)
def _zero_counts(n_qubits: int) -> np.ndarray:
    idx = np.arange(1 << n_qubits)
    ones = np.zeros_like(idx)
    for bit in range(n_qubits):
        ones += (idx >> bit) & 1
    return n_qubits - ones


@lru_cache(maxsize=None)
def dicke_basis(copies: int) -> np.ndarray:
    """Columns are normalized Dicke states; column k has exactly k zeros."""
    _check_copies(copies)
    zeros = _zero_counts(copies)
    V = np.zeros((1 << copies, copies + 1))
    for k in range(copies + 1):
        V[zeros == k, k] = 1 / math.sqrt(math.comb(copies, k))
    V.setflags(write=False)
    return V


def sym_projector(copies: int) -> SymmetricProjector:
    V = dicke_basis(copies)
    return SymmetricProjector(copies, V @ V.T)


def _pure(state) -> np.ndarray:
    if isinstance(state, QubitAmplitudes):
        psi = state.as_vector()
    else:
        psi = np.asarray(state, dtype=complex).reshape(-1)
    if psi.shape != (2,):
        raise ValueError("input must be a single-qubit state vector")
    if abs(np.vdot(psi, psi).real - 1) > TRACE_TOL:
        raise ValueError("input state is not normalized")
    return psi


def _kron_power(op: np.ndarray, n: int) -> np.ndarray:
    out = np.ones((1, 1), dtype=op.dtype)
    for _ in range(n):
        out = np.kron(out, op)
    return out


def _projected_block(N: int, M: int, psi: np.ndarray) -> np.ndarray:
    """V^+ (rho^{x N} x I^{x (M-N)}) V in the Dicke basis (unnormalized)."""
    V = dicke_basis(M)
    rho_n = _kron_power(np.outer(psi, psi.conj()), N)
    # rows/cols of V split as (first N qubits, remaining M-N qubits)
    Vr = V.reshape(1 << N, 1 << (M - N), M + 1)
    return np.einsum("iak,ij,jal->kl", Vr, rho_n, Vr, optimize=True)


@lru_cache(maxsize=None)
def _reference_trace(N: int, M: int) -> float:
    return float(np.trace(_projected_block(N, M, np.array([1.0, 0.0], dtype=complex))).real)


def normalization_trace(N: int, M: int, state) -> float:
    """Trace of Pi_sym (rho^{x N} x I) Pi_sym before rescaling."""
    return float(np.trace(_projected_block(N, M, _pure(state))).real)


def projection_cloner(N: int, M: int, state) -> DensityOperator:
    """Project N copies plus M - N maximally mixed qubits onto the symmetric subspace."""
    if not 1 <= N < M <= MAX_CLONES:
        raise ValueError(f"need 1 <= N < M <= {MAX_CLONES}, got N={N}, M={M}")
    psi = _pure(state)
    block = _projected_block(N, M, psi)
    tr = np.trace(block).real
    ref = _reference_trace(N, M)
    if abs(tr - ref) > 1e-10 * ref:
        raise RuntimeError(f"normalization {tr} depends on the input (reference {ref})")
    block = block / tr
    # V is an isometry, so positivity of the Dicke block is positivity of rho
    if np.linalg.eigvalsh(block).min() < -PSD_TOL:
        raise ValueError("projected operator has a negative eigenvalue")
    V = dicke_basis(M)
    rho = V @ block @ V.T
    return DensityOperator((rho + rho.conj().T) / 2, check_psd=False)


def symmetry_defect(rho: DensityOperator) -> float:
    V = dicke_basis(rho.n_qubits)
    projected = V @ (V.T @ rho.matrix @ V) @ V.T
    return float(np.max(np.abs(projected - rho.matrix)))


def reduced_first_qubit(rho: DensityOperator) -> np.ndarray:
    n = rho.n_qubits
    r = rho.matrix.reshape(2, 1 << (n - 1), 2, 1 << (n - 1))
    return np.einsum("iaja->ij", r)


def single_copy_fidelity(output: DensityOperator, state) -> float:
    """<psi| rho_1 |psi> for the one-qubit marginal of a symmetric output."""
    defect = symmetry_defect(output)
    if defect > SYMMETRY_TOL:
        raise ValueError(f"output is not permutation symmetric (defect {defect:.3g})")
    psi = _pure(state)
    return float(np.vdot(psi, reduced_first_qubit(output) @ psi).real)


def zeros_distribution(output: DensityOperator, spec: CloneSpec, tol: float = SYMMETRY_TOL) -> OutcomeDistribution:
    """q_a = probability of measuring exactly a qubits in |0>, restricted to a in [N, M]."""
    M = output.n_qubits
    if M != spec.M:
        raise ValueError(f"output has {M} qubits but spec has M={spec.M}")
    defect = symmetry_defect(output)
    if defect > SYMMETRY_TOL:
        raise ValueError(f"output is not permutation symmetric (defect {defect:.3g})")
    diag = np.clip(np.diag(output.matrix).real, 0.0, None)
    q = np.bincount(_zero_counts(M), weights=diag, minlength=M + 1)
    below = q[: spec.N].sum()
    if below > tol:
        raise ValueError(f"mass {below:.3g} on fewer than N correct clones")
    kept = q[spec.N:]
    return OutcomeDistribution.from_sequence(spec, kept / kept.sum())


def optimal_clone_fidelity_exact(N: int, M: int) -> Fraction:
    if not M > N >= 1:
        raise ValueError(f"need M > N >= 1, got N={N}, M={M}")
    return Fraction(M * (N + 1) + N, M * (N + 2))


def optimal_clone_fidelity(N: int, M: int) -> float:
    return float(optimal_clone_fidelity_exact(N, M))


def optimal_not_fidelity_exact(N: int) -> Fraction:
    if N < 1:
        raise ValueError(f"need N >= 1, got {N}")
    return Fraction(N + 1, N + 2)


def optimal_not_fidelity(N: int) -> float:
    return float(optimal_not_fidelity_exact(N))


def haar_states(rng: np.random.Generator, count: int) -> np.ndarray:
    """``count`` Haar-random qubit vectors, one per row."""
    z = rng.standard_normal((count, 2)) + 1j * rng.standard_normal((count, 2))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def haar_moment(copies: int) -> DensityOperator:
    """Average of |psi><psi|^{x copies} over Haar-random qubits: Pi_sym / (copies + 1)."""
    _check_copies(copies)
    return DensityOperator(sym_projector(copies).matrix / (copies + 1))


def haar_moment_estimate(copies: int, samples: int, rng: np.random.Generator, batch: int = 20000):
    """Monte-Carlo mean of |psi><psi|^{x copies} and its entrywise standard errors.

    Returns ``(mean, se_real, se_imag)``.
    """
    _check_copies(copies)
    dim = 1 << copies
    total = np.zeros((dim, dim), dtype=complex)
    sq_re = np.zeros((dim, dim))
    sq_im = np.zeros((dim, dim))
    done = 0
    while done < samples:
        n = min(batch, samples - done)
        psi = haar_states(rng, n)
        vec = psi
        for _ in range(copies - 1):
            vec = np.einsum("si,sj->sij", vec, psi).reshape(n, -1)
        outer = np.einsum("si,sj->sij", vec, vec.conj())
        total += outer.sum(axis=0)
        sq_re += (outer.real**2).sum(axis=0)
        sq_im += (outer.imag**2).sum(axis=0)
        done += n
    mean = total / samples
    var_re = (sq_re / samples - mean.real**2) * samples / (samples - 1)
    var_im = (sq_im / samples - mean.imag**2) * samples / (samples - 1)
    return mean, np.sqrt(np.clip(var_re, 0, None) / samples), np.sqrt(np.clip(var_im, 0, None) / samples)


def universality_check(N: int, M: int, samples: int, seed: int) -> float:
    """Spread (max - min) of the single-copy fidelity over Haar-random inputs."""
    if samples < 2:
        raise ValueError("need at least two samples")
    rng = np.random.default_rng(seed)
    fids = [single_copy_fidelity(projection_cloner(N, M, psi), psi) for psi in haar_states(rng, samples)]
    return float(max(fids) - min(fids))
