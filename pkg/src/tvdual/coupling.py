"""Couplings and sub-couplings of two measures on a finite space."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import PreconditionError
from .measure import PROBABILITY, GroundSpace, Measure
from .relations import EquivalenceRelation

COUPLING = "coupling"
SUB_COUPLING = "sub-coupling"

_ZERO = Fraction(0)


@dataclass(frozen=True)
class Coupling:
    """Nonnegative rational mass on ordered pairs of blocks, stored sparsely.

    ``entries`` maps ``(row_block, col_block)`` to a positive mass; absent keys
    are zero. Row sums are the first marginal, column sums the second.
    """

    space: GroundSpace
    entries: Mapping[tuple[int, int], Fraction] = field(hash=False)
    kind: str = SUB_COUPLING

    def __post_init__(self) -> None:
        n = self.space.n_blocks
        clean: dict[tuple[int, int], Fraction] = {}
        for (i, j), m in self.entries.items():
            m = Fraction(m)
            if m < 0:
                raise PreconditionError("nonnegative", f"entry ({i}, {j}) is negative")
            if not (0 <= i < n and 0 <= j < n):
                raise PreconditionError("coupling_shape", f"entry ({i}, {j}) out of range")
            if m:
                clean[(i, j)] = m
        object.__setattr__(self, "entries", clean)
        if self.kind not in (COUPLING, SUB_COUPLING):
            raise PreconditionError("coupling_kind", f"unknown kind {self.kind!r}")

    @classmethod
    def from_matrix(cls, space: GroundSpace, rows: Iterable[Iterable], kind: str = SUB_COUPLING) -> "Coupling":
        return cls(space, {(i, j): Fraction(m)
                           for i, row in enumerate(rows) for j, m in enumerate(row)}, kind)

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        return self.entries.get(key, _ZERO)

    def to_matrix(self) -> list[list[Fraction]]:
        n = self.space.n_blocks
        rows = [[_ZERO] * n for _ in range(n)]
        for (i, j), m in self.entries.items():
            rows[i][j] = m
        return rows

    @property
    def total(self) -> Fraction:
        return sum(self.entries.values(), _ZERO)

    def row_marginal(self) -> Measure:
        masses = [_ZERO] * self.space.n_blocks
        for (i, _), m in self.entries.items():
            masses[i] += m
        return Measure(self.space, tuple(masses), "sub-probability")

    def col_marginal(self) -> Measure:
        masses = [_ZERO] * self.space.n_blocks
        for (_, j), m in self.entries.items():
            masses[j] += m
        return Measure(self.space, tuple(masses), "sub-probability")

    def mass_on(self, E: EquivalenceRelation) -> Fraction:
        """Mass of the pair set E, read off the blocks' representative atoms.

        Only meaningful when E is measurable (classes are unions of blocks).
        """
        blocks = self.space.blocks
        return sum((m for (i, j), m in self.entries.items()
                    if (blocks[i][0], blocks[j][0]) in E), _ZERO)

    def diagonal_mass(self) -> Fraction:
        return sum((m for (i, j), m in self.entries.items() if i == j), _ZERO)

    def supported_on(self, E: EquivalenceRelation) -> bool:
        blocks = self.space.blocks
        return all((blocks[i][0], blocks[j][0]) in E for (i, j) in self.entries)

    def restricted_to(self, E: EquivalenceRelation) -> "Coupling":
        """The sub-coupling ``M(. & E)``."""
        blocks = self.space.blocks
        return Coupling(self.space, {k: m for k, m in self.entries.items()
                                     if (blocks[k[0]][0], blocks[k[1]][0]) in E})

    def scaled(self, factor) -> "Coupling":
        f = Fraction(factor)
        return Coupling(self.space, {k: m * f for k, m in self.entries.items()}, SUB_COUPLING)

    def __add__(self, other: "Coupling") -> "Coupling":
        if self.space != other.space:
            raise PreconditionError("same_space", "couplings on different spaces")
        out = dict(self.entries)
        for k, m in other.entries.items():
            out[k] = out.get(k, _ZERO) + m
        return Coupling(self.space, out, SUB_COUPLING)

    def dominates(self, other: "Coupling") -> bool:
        return all(self[k] >= m for k, m in other.entries.items())

    def is_subcoupling_of(self, P: Measure, P_prime: Measure) -> bool:
        return self.row_marginal().dominated_by(P) and self.col_marginal().dominated_by(P_prime)

    def is_coupling_of(self, P: Measure, P_prime: Measure) -> bool:
        return (self.row_marginal().masses == P.masses
                and self.col_marginal().masses == P_prime.masses)


def complete_subcoupling(M: Coupling, P: Measure, P_prime: Measure) -> Coupling:
    """Extend a sub-coupling to a coupling of P and P' that dominates it.

    Adds ``Q x Q' / gamma`` where Q, Q' are the marginal deficits and gamma
    their common total; returns M itself (as a coupling) when gamma is 0.
    """
    if M.space != P.space or P.space != P_prime.space:
        raise PreconditionError("same_space", "sub-coupling and marginals on different spaces")
    if P.kind != PROBABILITY or P_prime.kind != PROBABILITY:
        raise PreconditionError("probability", "P and P' must be probability measures")
    rows, cols = M.row_marginal(), M.col_marginal()
    if not (rows.dominated_by(P) and cols.dominated_by(P_prime)):
        raise PreconditionError("sub_coupling", "marginals of M are not dominated by P and P'")
    deficit = [a - b for a, b in zip(P.masses, rows.masses)]
    deficit_prime = [a - b for a, b in zip(P_prime.masses, cols.masses)]
    gamma = 1 - M.total
    if gamma == 0:
        return Coupling(M.space, M.entries, COUPLING)
    out = dict(M.entries)
    for i, a in enumerate(deficit):
        if a:
            for j, b in enumerate(deficit_prime):
                if b:
                    out[(i, j)] = out.get((i, j), _ZERO) + a * b / gamma
    return Coupling(M.space, out, COUPLING)
