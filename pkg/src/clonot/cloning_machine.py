"""Cloning output states, outcome statistics and the clone/NOT fidelities.

With K = M - N ancillas, a term with ``a`` correct clones has the form
|a, M-a> (clones) x |M-a, a-N> (ancillas) x |L', L'> (reservoir), so a single
amplitude per ``a`` in [N, M] describes the whole machine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .conservation import CloneSpec, reservoir_after
from .fock_algebra import NORM_TOL, SectorState

RELATION_TOL = 1e-12


def _check_spec_canonical(spec: CloneSpec) -> None:
    if spec.K != spec.M - spec.N:
        raise ValueError(f"outcome bookkeeping assumes K = M - N, got K={spec.K}")


@dataclass(frozen=True)
class CoefficientVector:
    """Amplitudes A_a for a in [N, M]; zero entries are kept."""

    spec: CloneSpec
    entries: Mapping[int, complex]

    def __post_init__(self) -> None:
        _check_spec_canonical(self.spec)
        if set(self.entries) != set(self.spec.a_range):
            raise ValueError(f"keys must be exactly {list(self.spec.a_range)}, got {sorted(self.entries)}")
        norm = sum(abs(v) ** 2 for v in self.entries.values())
        if abs(norm - 1) > NORM_TOL:
            raise ValueError(f"coefficients not normalized: sum |A|^2 = {norm!r}")
        object.__setattr__(self, "entries", {a: complex(self.entries[a]) for a in self.spec.a_range})

    @classmethod
    def from_sequence(cls, spec: CloneSpec, amps: Sequence[complex]) -> CoefficientVector:
        """``amps[i]`` is the amplitude for a = N + i."""
        return cls(spec, dict(zip(spec.a_range, amps, strict=True)))

    @classmethod
    def random(cls, spec: CloneSpec, rng: np.random.Generator) -> CoefficientVector:
        n = len(spec.a_range)
        z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        return cls.from_sequence(spec, z / np.linalg.norm(z))


@dataclass(frozen=True)
class OutcomeDistribution:
    """p_a = probability of finding ``a`` clones in the correct state."""

    spec: CloneSpec
    p: Mapping[int, float]

    def __post_init__(self) -> None:
        _check_spec_canonical(self.spec)
        bad = [a for a, v in self.p.items() if a not in self.spec.a_range and v != 0]
        if bad:
            raise ValueError(f"probability mass outside [N, M] at a = {bad}")
        if any(v < 0 for v in self.p.values()):
            raise ValueError("negative probability")
        total = sum(self.p.values())
        if abs(total - 1) > NORM_TOL:
            raise ValueError(f"probabilities sum to {total!r}")
        object.__setattr__(self, "p", {a: float(self.p.get(a, 0.0)) for a in self.spec.a_range})

    @classmethod
    def from_sequence(cls, spec: CloneSpec, probs: Sequence[float]) -> OutcomeDistribution:
        return cls(spec, dict(zip(spec.a_range, probs, strict=True)))

    def as_array(self) -> np.ndarray:
        return np.array([self.p[a] for a in self.spec.a_range])


@dataclass(frozen=True)
class FidelityReport:
    N: int
    M: int
    f_clone: float
    f_not: float
    residual: float

    def to_dict(self) -> dict:
        return {"N": self.N, "M": self.M, "f_clone": self.f_clone, "f_not": self.f_not, "residual": self.residual}

    def csv_row(self) -> list:
        return [self.N, self.M, repr(self.f_clone), repr(self.f_not), repr(self.residual)]


def input_state(N: int, L: int) -> SectorState:
    """|N, 0> x |L, L>: N particles in |0> next to a balanced reservoir."""
    return SectorState.basis((N, 0), (L, L))


def build_output_state(coeffs: CoefficientVector, L: int) -> SectorState:
    spec = coeffs.spec
    Lp = reservoir_after(L, spec.N, spec.M, spec.K)
    terms = []
    for a, amp in coeffs.entries.items():
        if amp == 0:
            continue
        terms.append((((a, spec.M - a), (spec.M - a, a - spec.N), (Lp, Lp)), amp))
    return SectorState(terms)


def outcome_distribution(coeffs: CoefficientVector) -> OutcomeDistribution:
    return OutcomeDistribution(coeffs.spec, {a: abs(v) ** 2 for a, v in coeffs.entries.items()})


def fidelity_clone(dist: OutcomeDistribution) -> float:
    M = dist.spec.M
    return sum(p * a / M for a, p in dist.p.items())


def fidelity_not(dist: OutcomeDistribution) -> float:
    N, M = dist.spec.N, dist.spec.M
    return sum(p * (a - N) / (M - N) for a, p in dist.p.items())


def clonot_residual(dist: OutcomeDistribution) -> float:
    """(M - N) F_NOT - (M F_clone - N); zero for any distribution."""
    N, M = dist.spec.N, dist.spec.M
    return (M - N) * fidelity_not(dist) - (M * fidelity_clone(dist) - N)


def fidelity_report(dist: OutcomeDistribution) -> FidelityReport:
    return FidelityReport(dist.spec.N, dist.spec.M, fidelity_clone(dist), fidelity_not(dist), clonot_residual(dist))


def not_from_clone(f_clone: float, N: int, M: int, tol: float = RELATION_TOL) -> float:
    if M <= N:
        raise ValueError(f"need M > N, got N={N}, M={M}")
    if not (N / M - tol <= f_clone <= 1 + tol):
        raise ValueError(f"f_clone={f_clone} outside attainable range [{N}/{M}, 1]")
    return (M * f_clone - N) / (M - N)


# Batched forms for sweeps: rows of ``probs`` are distributions over a = N..M.


def fidelities_batch(probs: np.ndarray, N: int, M: int) -> tuple[np.ndarray, np.ndarray]:
    probs = np.asarray(probs, dtype=float)
    a = np.arange(N, M + 1)
    if probs.shape[-1] != a.size:
        raise ValueError(f"last axis must have length M - N + 1 = {a.size}")
    return probs @ (a / M), probs @ ((a - N) / (M - N))


def residuals_batch(probs: np.ndarray, N: int, M: int) -> np.ndarray:
    f_clone, f_not = fidelities_batch(probs, N, M)
    return (M - N) * f_not - (M * f_clone - N)


def random_distributions(rng: np.random.Generator, N: int, M: int, count: int) -> np.ndarray:
    """Distributions uniform on the simplex, with some rows forced to p_M = 0."""
    probs = rng.dirichlet(np.ones(M - N + 1), size=count)
    # exercise machines that never clone perfectly
    drop = rng.random(count) < 0.25
    probs[drop, -1] = 0.0
    probs[drop] /= probs[drop].sum(axis=1, keepdims=True)
    return probs
