"""Integer bookkeeping for cloning: angular momentum, particle number, reservoir.

Each particle in |0> carries angular momentum -1 and each particle in |1>
carries +1.  Clones, ancillas and reservoir particles are all counted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .fock_algebra import OccupationConfig, SectorState


class ReservoirExhausted(ValueError):
    pass


@dataclass(frozen=True)
class CloneSpec:
    """Integers describing an N -> M cloning scenario.

    ``K`` ancillas are produced and the reservoir goes from ``L`` to
    ``Lprime`` pairs.  Use :meth:`canonical` to get the minimal ancilla count.
    """

    N: int
    M: int
    K: int
    L: int
    Lprime: int

    def __post_init__(self) -> None:
        if not self.M > self.N >= 1:
            raise ValueError(f"need M > N >= 1, got N={self.N}, M={self.M}")
        if self.K < self.M - self.N:
            raise ValueError(f"K={self.K} is below the minimum M - N = {self.M - self.N}")
        expected = reservoir_after(self.L, self.N, self.M, self.K)
        if self.Lprime != expected:
            raise ValueError(f"Lprime={self.Lprime} violates particle conservation (expected {expected})")

    @classmethod
    def canonical(cls, N: int, M: int, L: Optional[int] = None) -> CloneSpec:
        """Spec with K = M - N; ``L`` defaults to the smallest reservoir that suffices."""
        K = min_ancillas(N, M)
        if L is None:
            L = (M + K - N) // 2
        return cls(N, M, K, L, reservoir_after(L, N, M, K))

    @property
    def a_range(self) -> range:
        return range(self.N, self.M + 1)


@dataclass(frozen=True)
class LedgerReport:
    """Both sides of a conservation check.

    ``j_in``/``j_out`` are ``None`` when a ledger does not track angular
    momentum (the emission ledger) or when the terms on one side disagree.
    """

    j_in: Optional[int]
    j_out: Optional[int]
    n_in: Optional[int]
    n_out: Optional[int]
    ok: bool
    terms: tuple = field(default=(), compare=False, repr=False)

    def to_dict(self) -> dict:
        return {"j_in": self.j_in, "j_out": self.j_out, "n_in": self.n_in, "n_out": self.n_out, "ok": self.ok}


def angular_momentum(configs: Iterable[OccupationConfig]) -> int:
    return sum(c.n1 - c.n0 for c in configs)


def particle_count(configs: Iterable[OccupationConfig]) -> int:
    return sum(c.n0 + c.n1 for c in configs)


def check_constraint(a: int, b: int, spec: CloneSpec) -> bool:
    """Angular momentum balance 2(a + b) = N + K + M for a clones and b ancillas in |0>."""
    if not (0 <= a <= spec.M and 0 <= b <= spec.K):
        raise ValueError(f"a={a} or b={b} out of range for {spec}")
    return 2 * (a + b) == spec.N + spec.K + spec.M


def min_ancillas(N: int, M: int) -> int:
    if M <= N:
        raise ValueError(f"cloning needs M > N, got N={N}, M={M}")
    return M - N


def reservoir_after(L: int, N: int, M: int, K: int) -> int:
    """Reservoir pairs left after borrowing M + K - N particles."""
    if (N - M - K) % 2:
        raise ValueError(f"N - M - K = {N - M - K} must be even")
    Lprime = L + (N - M - K) // 2
    if Lprime < 0:
        raise ReservoirExhausted(f"reservoir of {L} pairs cannot supply {M + K - N} particles")
    return Lprime


def validate_emission_ledger(L: int, Lprime: int, N: int, M: int) -> LedgerReport:
    """Excitation count for a stimulated-emission cloner.

    In: N photons plus 2L excited atoms.  Out: M clone photons, M - N ancilla
    photons and 2L' excited atoms.  Balanced iff 2L - 2L' = 2M - 2N.
    """
    for name, v in (("L", L), ("Lprime", Lprime), ("N", N), ("M", M)):
        if v < 0:
            raise ValueError(f"{name} must be non-negative")
    n_in = N + 2 * L
    n_out = M + (M - N) + 2 * Lprime
    decayed, emitted = 2 * L - 2 * Lprime, 2 * M - 2 * N
    return LedgerReport(None, None, n_in, n_out, decayed == emitted,
                        terms=(("decayed", decayed), ("emitted", emitted)))


def _single(values: set[int]) -> Optional[int]:
    return next(iter(values)) if len(values) == 1 else None


def audit(state_in: SectorState, state_out: SectorState) -> LedgerReport:
    """Term-by-term check that every output term matches every input term.

    Per-term (side, config, J, n) records are kept on ``report.terms`` so that
    inputs whose terms already disagree can be inspected rather than raised.
    """
    records = []
    for side, state in (("in", state_in), ("out", state_out)):
        for comp, _ in state.terms:
            records.append((side, comp, angular_momentum(comp), particle_count(comp)))
    j = {side: {r[2] for r in records if r[0] == side} for side in ("in", "out")}
    n = {side: {r[3] for r in records if r[0] == side} for side in ("in", "out")}
    ok = len(j["in"] | j["out"]) == 1 and len(n["in"] | n["out"]) == 1
    return LedgerReport(_single(j["in"]), _single(j["out"]), _single(n["in"]), _single(n["out"]),
                        ok, terms=tuple(records))
