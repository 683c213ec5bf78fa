"""Two-mode occupation-number states and the tensor-power/mode pictures of copying.

A subsystem holds ``n0`` particles in state |0> and ``n1`` in state |1>.  A
:class:`SectorState` is a superposition over composite configurations, one
:class:`OccupationConfig` per subsystem (clones, ancillas, reservoir, ...).
"""

from __future__ import annotations

import enum
import itertools
import json
import math
from dataclasses import dataclass, field
from numbers import Number
from typing import Iterable, Sequence

import numpy as np

NORM_TOL = 1e-12
PRUNE_TOL = 1e-15


class Kind(enum.Enum):
    BOSON = "boson"
    FERMION = "fermion-mode"


@dataclass(frozen=True)
class OccupationConfig:
    n0: int
    n1: int
    kind: Kind = Kind.BOSON

    def __post_init__(self) -> None:
        for name in ("n0", "n1"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise TypeError(f"{name} must be an integer, got {value!r}")
            if value < 0:
                raise ValueError(f"{name} must be non-negative, got {value}")
            object.__setattr__(self, name, int(value))
        if self.kind is Kind.FERMION and (self.n0 > 1 or self.n1 > 1):
            raise ValueError(f"fermion mode cannot hold more than one particle: ({self.n0}, {self.n1})")

    @property
    def total(self) -> int:
        return self.n0 + self.n1

    def key(self) -> tuple[int, int, str]:
        return (self.n0, self.n1, self.kind.value)

    def __repr__(self) -> str:
        suffix = "" if self.kind is Kind.BOSON else "f"
        return f"|{self.n0},{self.n1}>{suffix}"


Composite = tuple[OccupationConfig, ...]


def _composite_key(config: Composite) -> tuple:
    return tuple(c.key() for c in config)


def _as_config(c: OccupationConfig | Sequence[int], kind: Kind) -> OccupationConfig:
    if isinstance(c, OccupationConfig):
        return c
    n0, n1 = c
    return OccupationConfig(n0, n1, kind)


@dataclass(frozen=True)
class SectorState:
    """Normalized superposition over composite occupation configurations.

    Terms are stored sorted by configuration so that equal states compare and
    serialize identically.  The probability of a term is ``|amplitude|**2``;
    a classical distribution is encoded with real amplitudes ``sqrt(p)``.
    """

    terms: tuple[tuple[Composite, complex], ...]

    def __init__(self, terms: Iterable[tuple[Sequence, Number]], kind: Kind = Kind.BOSON):
        cleaned: dict[tuple, tuple[Composite, complex]] = {}
        arity = None
        for config, amp in terms:
            comp = tuple(_as_config(c, kind) for c in config)
            if arity is None:
                arity = len(comp)
            elif len(comp) != arity:
                raise ValueError(f"mixed subsystem arity: {arity} and {len(comp)}")
            k = _composite_key(comp)
            if k in cleaned:
                raise ValueError(f"duplicate configuration {comp}")
            cleaned[k] = (comp, complex(amp))
        if not cleaned:
            raise ValueError("a state needs at least one term")
        norm = sum(abs(a) ** 2 for _, a in cleaned.values())
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: sum |A|^2 = {norm!r}")
        object.__setattr__(self, "terms", tuple(cleaned[k] for k in sorted(cleaned)))

    @classmethod
    def basis(cls, *configs, kind: Kind = Kind.BOSON) -> SectorState:
        """Single product state, e.g. ``SectorState.basis((1, 0), (3, 3))``."""
        return cls([(configs, 1.0)], kind=kind)

    @property
    def arity(self) -> int:
        return len(self.terms[0][0])

    def __len__(self) -> int:
        return len(self.terms)

    def amplitude(self, *configs, kind: Kind = Kind.BOSON) -> complex:
        key = _composite_key(tuple(_as_config(c, kind) for c in configs))
        for comp, amp in self.terms:
            if _composite_key(comp) == key:
                return amp
        return 0j

    def probabilities(self) -> dict[Composite, float]:
        return {comp: abs(amp) ** 2 for comp, amp in self.terms}

    def norm(self) -> float:
        return math.fsum(abs(a) ** 2 for _, a in self.terms)

    def to_json_obj(self) -> list[dict]:
        return [
            {"config": [[c.n0, c.n1] for c in comp], "re": amp.real, "im": amp.imag}
            for comp, amp in self.terms
        ]

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json(cls, data: str | list, kind: Kind = Kind.BOSON) -> SectorState:
        if isinstance(data, str):
            data = json.loads(data)
        return cls(
            [([tuple(c) for c in t["config"]], complex(t["re"], t["im"])) for t in data],
            kind=kind,
        )


@dataclass(frozen=True)
class QubitAmplitudes:
    """Single-qubit pure state A|0> + B|1>."""

    A: complex
    B: complex
    kind: Kind = field(default=Kind.BOSON, compare=False)

    def __post_init__(self) -> None:
        norm = abs(self.A) ** 2 + abs(self.B) ** 2
        if abs(norm - 1) > NORM_TOL:
            raise ValueError(f"|A|^2 + |B|^2 = {norm!r}, expected 1")

    def as_vector(self) -> np.ndarray:
        return np.array([self.A, self.B], dtype=complex)


def tensor(parts: Sequence[SectorState]) -> SectorState:
    if not parts:
        raise ValueError("tensor() needs at least one part")
    terms = []
    for combo in itertools.product(*(p.terms for p in parts)):
        amp = 1 + 0j
        config: list[OccupationConfig] = []
        for comp, a in combo:
            amp *= a
            config.extend(comp)
        if abs(amp) >= PRUNE_TOL:
            terms.append((tuple(config), amp))
    return SectorState(terms)


def mode_expand(q: QubitAmplitudes, copies: int) -> SectorState:
    """Second-quantized copy: (A c0^+ + B c1^+)^copies |vac> / sqrt(copies!).

    Returns sum_k sqrt(C(copies, k)) A^k B^(copies-k) |k, copies-k>.
    """
    if copies < 1:
        raise ValueError("copies must be >= 1")
    if q.kind is Kind.FERMION and copies >= 2:
        raise ValueError("a fermion mode cannot be multiply occupied")
    terms = []
    for k in range(copies, -1, -1):
        amp = math.sqrt(math.comb(copies, k)) * q.A**k * q.B ** (copies - k)
        if abs(amp) >= PRUNE_TOL:
            terms.append((((k, copies - k),), amp))
    return SectorState(terms, kind=q.kind)


def sym_expand(q: QubitAmplitudes, copies: int) -> dict[str, Number]:
    """First-quantized copy: coefficients of (A|0> + B|1>)^{tensor copies}.

    Keys are bit strings such as ``"01"``; arithmetic follows the amplitude
    types, so Fraction inputs give exact coefficients.
    """
    if copies < 1:
        raise ValueError("copies must be >= 1")
    out = {}
    for bits in itertools.product("01", repeat=copies):
        zeros = bits.count("0")
        out["".join(bits)] = q.A**zeros * q.B ** (copies - zeros)
    return out


def symmetric_to_occupation(coeffs: dict[str, Number], tol: float = NORM_TOL) -> dict[int, complex]:
    """Map a permutation-symmetric bit-string state onto |k, n-k> amplitudes.

    Strings with ``k`` zeros are summed and divided by sqrt(C(n, k)), which is
    the overlap with the normalized Dicke state.  Raises if the input is not
    symmetric, since occupation numbers cannot represent it faithfully.
    """
    if not coeffs:
        raise ValueError("empty coefficient map")
    n = len(next(iter(coeffs)))
    classes: dict[int, list[complex]] = {}
    for bits, c in coeffs.items():
        if len(bits) != n:
            raise ValueError("bit strings of unequal length")
        classes.setdefault(bits.count("0"), []).append(complex(c))
    out = {}
    for k, values in classes.items():
        ref = values[0]
        if any(abs(v - ref) > tol for v in values):
            raise ValueError(f"state is not permutation symmetric (zero count {k})")
        full = math.comb(n, k)
        # absent strings count as zero amplitude
        if len(values) != full and abs(ref) > tol:
            raise ValueError(f"state is not permutation symmetric (zero count {k})")
        out[k] = sum(values) / math.sqrt(full)
    return out


def equivalence_overlap(q: QubitAmplitudes, copies: int) -> float:
    """|<mode picture | tensor-power picture>| after mapping to occupation numbers."""
    occ = symmetric_to_occupation(sym_expand(q, copies))
    mode = mode_expand(q, copies)
    inner = 0j
    for comp, amp in mode.terms:
        inner += amp.conjugate() * occ.get(comp[0].n0, 0j)
    return abs(inner)


def zero_count_probabilities(coeffs: dict[str, Number]) -> dict[int, Number]:
    """Probability of finding k zeros, summed over bit strings."""
    out: dict[int, Number] = {}
    for bits, c in coeffs.items():
        k = bits.count("0")
        out[k] = out.get(k, 0) + abs(c) ** 2
    return out


def random_qubit(rng) -> QubitAmplitudes:
    """Haar-random qubit from a normalized pair of complex Gaussians."""
    z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    z = z / math.sqrt(float((abs(z) ** 2).sum()))
    return QubitAmplitudes(complex(z[0]), complex(z[1]))
