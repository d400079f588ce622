"""Finite measure arithmetic over atomic sigma-algebras.

A finite sigma-algebra is always generated by a partition of the atoms, so a
:class:`GroundSpace` stores exactly that partition ("blocks") and a
:class:`Measure` stores one exact rational mass per block. Measurable sets are
unions of blocks and are passed around as sets of block indices.

Everything here is immutable and exact; floats never enter.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import chain
from typing import Iterable, Mapping, Sequence

from .errors import PreconditionError

Rational = Fraction

PROBABILITY = "probability"
SUB_PROBABILITY = "sub-probability"
SIGNED = "signed"
KINDS = (PROBABILITY, SUB_PROBABILITY, SIGNED)


def canonical_partition(blocks: Iterable[Iterable[int]], n: int) -> tuple[tuple[int, ...], ...]:
    """Sort each block and order blocks by their minimal member.

    Raises ``PreconditionError`` unless ``blocks`` is a partition of ``range(n)``
    into nonempty, disjoint pieces.
    """
    seen: set[int] = set()
    out = []
    for raw in blocks:
        block = tuple(sorted(int(i) for i in raw))
        if not block:
            raise PreconditionError("partition", "empty block")
        for i in block:
            if not 0 <= i < n:
                raise PreconditionError("partition", f"index {i} out of range for {n} atoms")
            if i in seen:
                raise PreconditionError("partition", f"index {i} appears in more than one block")
            seen.add(i)
        out.append(block)
    if len(seen) != n:
        missing = sorted(set(range(n)) - seen)
        raise PreconditionError("partition", f"blocks do not cover atoms {missing}")
    out.sort(key=lambda b: b[0])
    return tuple(out)


def _labels_from_partition(blocks: Sequence[Sequence[int]], n: int) -> tuple[int, ...]:
    label = [0] * n
    for k, block in enumerate(blocks):
        for i in block:
            label[i] = k
    return tuple(label)


@dataclass(frozen=True)
class GroundSpace:
    """Finite set of atoms with a sigma-algebra given by its atom partition.

    ``blocks=None`` means the power set (every atom its own block).
    """

    atoms: tuple[str, ...]
    blocks: tuple[tuple[int, ...], ...] = None  # type: ignore[assignment]
    _block_of: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        atoms = tuple(str(a) for a in self.atoms)
        if not atoms:
            raise PreconditionError("ground_space", "at least one atom is required")
        if len(set(atoms)) != len(atoms):
            raise PreconditionError("ground_space", "atom labels must be distinct")
        n = len(atoms)
        blocks = [(i,) for i in range(n)] if self.blocks is None else self.blocks
        blocks = canonical_partition(blocks, n)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "_block_of", _labels_from_partition(blocks, n))

    @classmethod
    def powerset(cls, atoms: Sequence[str]) -> "GroundSpace":
        return cls(tuple(atoms), None)

    @classmethod
    def trivial(cls, atoms: Sequence[str]) -> "GroundSpace":
        """The sigma-algebra {empty, everything}."""
        return cls(tuple(atoms), (tuple(range(len(atoms))),))

    def with_sigma(self, blocks: Iterable[Iterable[int]]) -> "GroundSpace":
        """Same atoms, different sigma-algebra."""
        return GroundSpace(self.atoms, tuple(tuple(b) for b in blocks))

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def block_of(self, atom: int) -> int:
        return self._block_of[atom]

    @property
    def block_labels(self) -> tuple[int, ...]:
        """``block_labels[i]`` is the index of the block containing atom ``i``."""
        return self._block_of

    def same_atoms(self, other: "GroundSpace") -> bool:
        return self.atoms == other.atoms

    def is_measurable_set(self, atoms: Iterable[int]) -> bool:
        """A set of atoms is measurable iff it is a union of blocks."""
        s = set(atoms)
        return all(set(self.blocks[self._block_of[i]]) <= s for i in s)

    def blocks_to_atoms(self, block_ids: Iterable[int]) -> frozenset[int]:
        return frozenset(chain.from_iterable(self.blocks[b] for b in block_ids))

    def atoms_to_blocks(self, atoms: Iterable[int]) -> frozenset[int]:
        """Block indices of a measurable set; raises if the set is not measurable."""
        s = set(atoms)
        if not self.is_measurable_set(s):
            raise PreconditionError("is_measurable_set", f"{sorted(s)} is not a union of blocks")
        return frozenset(self._block_of[i] for i in s)

    def refines(self, coarser: "GroundSpace") -> bool:
        """True iff every block of ``coarser`` is a union of our blocks."""
        if not self.same_atoms(coarser):
            return False
        return all(len({coarser.block_of(i) for i in b}) == 1 for b in self.blocks)

    def quotient_map(self, coarser: "GroundSpace") -> tuple[int, ...]:
        """Map each of our blocks to the block of ``coarser`` containing it."""
        if not self.refines(coarser):
            raise PreconditionError("refines", "target sigma-algebra is not coarser")
        return tuple(coarser.block_of(b[0]) for b in self.blocks)


def _check_space(a: "Measure", b: "Measure") -> None:
    if a.space != b.space:
        raise PreconditionError("same_space", "measures live on different spaces or sigma-algebras")


@dataclass(frozen=True)
class Measure:
    """Rational mass per block of ``space``; ``kind`` fixes the sign/total contract."""

    space: GroundSpace
    masses: tuple[Fraction, ...]
    kind: str = PROBABILITY

    def __post_init__(self) -> None:
        masses = tuple(Fraction(m) for m in self.masses)
        object.__setattr__(self, "masses", masses)
        if self.kind not in KINDS:
            raise PreconditionError("measure_kind", f"unknown kind {self.kind!r}")
        if len(masses) != self.space.n_blocks:
            raise PreconditionError(
                "measure_shape", f"{len(masses)} masses for {self.space.n_blocks} blocks"
            )
        if self.kind == SIGNED:
            return
        for k, m in enumerate(masses):
            if m < 0:
                raise PreconditionError("nonnegative", f"block {k} has negative mass {m}")
        total = sum(masses, Fraction(0))
        if self.kind == PROBABILITY and total != 1:
            raise PreconditionError("probability", f"total mass is {total}, expected 1")
        if self.kind == SUB_PROBABILITY and total > 1:
            raise PreconditionError("sub_probability", f"total mass {total} exceeds 1")

    @classmethod
    def from_atoms(cls, space: GroundSpace, atom_masses: Sequence, kind: str = PROBABILITY) -> "Measure":
        """Build from one mass per atom (summed within blocks)."""
        if len(atom_masses) != space.n_atoms:
            raise PreconditionError("measure_shape", "need one mass per atom")
        masses = [Fraction(0)] * space.n_blocks
        for i, m in enumerate(atom_masses):
            masses[space.block_of(i)] += Fraction(m)
        return cls(space, tuple(masses), kind)

    @classmethod
    def zero(cls, space: GroundSpace, kind: str = SUB_PROBABILITY) -> "Measure":
        return cls(space, (Fraction(0),) * space.n_blocks, kind)

    @classmethod
    def point_mass(cls, space: GroundSpace, atom: int) -> "Measure":
        masses = [Fraction(0)] * space.n_blocks
        masses[space.block_of(atom)] = Fraction(1)
        return cls(space, tuple(masses))

    @classmethod
    def uniform(cls, space: GroundSpace) -> "Measure":
        n = space.n_atoms
        return cls(space, tuple(Fraction(len(b), n) for b in space.blocks))

    @property
    def total(self) -> Fraction:
        return sum(self.masses, Fraction(0))

    def of_blocks(self, block_ids: Iterable[int]) -> Fraction:
        return sum((self.masses[b] for b in block_ids), Fraction(0))

    def of_atoms(self, atoms: Iterable[int]) -> Fraction:
        """Mass of a measurable set given by atom indices."""
        return self.of_blocks(self.space.atoms_to_blocks(atoms))

    def dominated_by(self, other: "Measure") -> bool:
        _check_space(self, other)
        return all(a <= b for a, b in zip(self.masses, other.masses))

    def as_kind(self, kind: str) -> "Measure":
        return Measure(self.space, self.masses, kind)

    def scaled(self, factor, kind: str | None = None) -> "Measure":
        f = Fraction(factor)
        return Measure(self.space, tuple(m * f for m in self.masses), kind or self.kind)

    def __sub__(self, other: "Measure") -> "Measure":
        _check_space(self, other)
        return Measure(self.space, tuple(a - b for a, b in zip(self.masses, other.masses)), SIGNED)

    def __add__(self, other: "Measure") -> "Measure":
        _check_space(self, other)
        return Measure(self.space, tuple(a + b for a, b in zip(self.masses, other.masses)), SIGNED)

    def restrict(self, coarser: GroundSpace) -> "Measure":
        """The same measure seen on a coarser sigma-algebra of the same atoms."""
        qmap = self.space.quotient_map(coarser)
        masses = [Fraction(0)] * coarser.n_blocks
        for b, m in enumerate(self.masses):
            masses[qmap[b]] += m
        return Measure(coarser, tuple(masses), self.kind)


@dataclass(frozen=True)
class JordanDecomposition:
    """Hahn sets and the two mutually singular parts of a signed measure."""

    positive_set: frozenset[int]
    negative_set: frozenset[int]
    positive_part: Measure
    negative_part: Measure


def jordan_decompose(nu: Measure) -> JordanDecomposition:
    """Split ``nu`` blockwise by sign. Zero-mass blocks go to the positive set."""
    zero = Fraction(0)
    pos = frozenset(k for k, m in enumerate(nu.masses) if m >= 0)
    neg = frozenset(range(nu.space.n_blocks)) - pos
    plus = tuple(m if k in pos else zero for k, m in enumerate(nu.masses))
    minus = tuple(-m if k in neg else zero for k, m in enumerate(nu.masses))
    kind = SUB_PROBABILITY if sum(plus) <= 1 and sum(minus) <= 1 else SIGNED
    return JordanDecomposition(pos, neg, Measure(nu.space, plus, kind), Measure(nu.space, minus, kind))


def meet(mu: Measure, mu_prime: Measure) -> Measure:
    """Largest measure dominated by both arguments, via the Jordan sets of mu - mu'.

    On the positive set of ``mu - mu_prime`` the meet agrees with ``mu_prime``,
    on the negative set with ``mu``.
    """
    _check_space(mu, mu_prime)
    if mu.kind == SIGNED or mu_prime.kind == SIGNED:
        raise PreconditionError("nonnegative", "meet is defined for nonnegative measures")
    jd = jordan_decompose(mu - mu_prime)
    masses = tuple(
        mu_prime.masses[k] if k in jd.positive_set else mu.masses[k]
        for k in range(mu.space.n_blocks)
    )
    return Measure(mu.space, masses, SUB_PROBABILITY)


def tv_over(P: Measure, P_prime: Measure) -> tuple[Fraction, frozenset[int]]:
    """Largest |P(A) - P'(A)| over measurable A, with the Hahn positive set as witness."""
    _check_space(P, P_prime)
    jd = jordan_decompose(P - P_prime)
    return jd.positive_part.total, jd.positive_set


def pushforward(mu: Measure, quotient: Sequence[int] | Mapping[int, int],
                labels: Sequence[str] | None = None) -> Measure:
    """Image of ``mu`` under a map from blocks to class indices ``0..k-1``.

    The result lives on a fresh power-set space whose atoms are the classes.
    """
    n = mu.space.n_blocks
    qmap = [quotient[b] for b in range(n)]
    k = max(qmap) + 1 if qmap else 0
    if labels is None:
        labels = [f"c{j}" for j in range(k)]
    elif len(labels) < k:
        raise PreconditionError("quotient", "fewer labels than classes")
    masses = [Fraction(0)] * len(labels)
    for b, m in enumerate(mu.masses):
        masses[qmap[b]] += m
    return Measure(GroundSpace.powerset(labels), tuple(masses), mu.kind)
