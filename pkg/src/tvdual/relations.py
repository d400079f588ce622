"""Equivalence relations on finite spaces and the Galois correspondence.

An :class:`EquivalenceRelation` is stored as its partition into classes; the set
of related pairs is derived only when asked for. The two maps of the
correspondence are

* :func:`dual_sigma`: E -> the sigma-algebra of measurable E-saturated sets,
* :func:`dual_relation`: G -> points that no set of G separates.

On a finite space every measurable equivalence relation is basic, so
:func:`is_basic` and :func:`is_measurable` always agree there. The finite
setting also gives G** = sigma(G) for any family G of measurable sets; the
strict inclusion that can occur on uncountable spaces has no finite analog.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import PreconditionError
from .measure import GroundSpace, _labels_from_partition, canonical_partition


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        x, y = self.find(x), self.find(y)
        if x == y:
            return False
        if self.rank[x] < self.rank[y]:
            x, y = y, x
        elif self.rank[x] == self.rank[y]:
            self.rank[x] += 1
        self.parent[y] = x
        return True

    def groups(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for i in range(len(self.parent)):
            out.setdefault(self.find(i), []).append(i)
        return list(out.values())


@dataclass(frozen=True)
class EquivalenceRelation:
    space: GroundSpace
    classes: tuple[tuple[int, ...], ...]
    _class_of: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        classes = canonical_partition(self.classes, self.space.n_atoms)
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "_class_of", _labels_from_partition(classes, self.space.n_atoms))

    @classmethod
    def identity(cls, space: GroundSpace) -> "EquivalenceRelation":
        return cls(space, tuple((i,) for i in range(space.n_atoms)))

    @classmethod
    def full(cls, space: GroundSpace) -> "EquivalenceRelation":
        return cls(space, (tuple(range(space.n_atoms)),))

    @classmethod
    def from_labels(cls, space: GroundSpace, labels: Sequence) -> "EquivalenceRelation":
        """Atoms with equal labels are related."""
        groups: dict = {}
        for i, lab in enumerate(labels):
            groups.setdefault(lab, []).append(i)
        return cls(space, tuple(tuple(g) for g in groups.values()))

    def class_of(self, atom: int) -> int:
        return self._class_of[atom]

    @property
    def class_labels(self) -> tuple[int, ...]:
        return self._class_of

    def __contains__(self, pair: tuple[int, int]) -> bool:
        i, j = pair
        return self._class_of[i] == self._class_of[j]

    def pairs(self) -> Iterator[tuple[int, int]]:
        for c in self.classes:
            for i in c:
                for j in c:
                    yield (i, j)

    def issubset(self, other: "EquivalenceRelation") -> bool:
        """E <= E' as pair sets, i.e. every class of E sits inside a class of E'."""
        if not self.space.same_atoms(other.space):
            return False
        return all(len({other.class_of(i) for i in c}) == 1 for c in self.classes)

    def as_space(self) -> GroundSpace:
        """The sigma-algebra whose atoms are the classes (ignores the ambient one)."""
        return GroundSpace(self.space.atoms, self.classes)

    def block_quotient(self) -> tuple[int, ...]:
        """Class index for every block of the ambient space. Requires measurability."""
        require_measurable(self)
        return tuple(self._class_of[b[0]] for b in self.space.blocks)


@dataclass(frozen=True)
class SetFamily:
    space: GroundSpace
    sets: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        n = self.space.n_atoms
        sets = tuple(frozenset(int(i) for i in s) for s in self.sets)
        for s in sets:
            if any(not 0 <= i < n for i in s):
                raise PreconditionError("set_family", f"set {sorted(s)} has atoms out of range")
        object.__setattr__(self, "sets", sets)

    @classmethod
    def atoms_of(cls, sigma: GroundSpace) -> "SetFamily":
        return cls(sigma, tuple(frozenset(b) for b in sigma.blocks))


def relation_from_pairs(space: GroundSpace, pairs: Iterable[tuple[int, int]],
                        close: bool = True) -> EquivalenceRelation:
    """Build a relation from explicit pairs.

    With ``close`` the reflexive-symmetric-transitive closure is returned. Without
    it the input (plus the diagonal, which is always implied) must already be
    symmetric and transitive.
    """
    n = space.n_atoms
    pairs = [(int(i), int(j)) for i, j in pairs]
    for i, j in pairs:
        if not (0 <= i < n and 0 <= j < n):
            raise PreconditionError("relation_from_pairs", f"pair ({i}, {j}) out of range")
    uf = UnionFind(n)
    for i, j in pairs:
        uf.union(i, j)
    rel = EquivalenceRelation(space, tuple(tuple(g) for g in uf.groups()))
    if not close:
        given = set(pairs) | {(i, i) for i in range(n)}
        for i, j in given:
            if (j, i) not in given:
                raise PreconditionError("equivalence", f"not symmetric: ({i}, {j}) without ({j}, {i})")
        missing = [p for p in rel.pairs() if p not in given]
        if missing:
            i, j = missing[0]
            raise PreconditionError("equivalence", f"not transitive: ({i}, {j}) is implied but absent")
    return rel


def dual_sigma(E: EquivalenceRelation) -> GroundSpace:
    """Atoms of the sigma-algebra of measurable E-saturated sets.

    These are the classes of the join of the block partition and the class
    partition: the smallest sets that are unions of both.
    """
    space = E.space
    uf = UnionFind(space.n_atoms)
    for part in (space.blocks, E.classes):
        for c in part:
            for i in c[1:]:
                uf.union(c[0], i)
    return space.with_sigma(uf.groups())


def dual_relation(G: SetFamily) -> EquivalenceRelation:
    """Points are related iff every set in ``G`` contains both or neither."""
    n = G.space.n_atoms
    signature = [tuple(i in s for s in G.sets) for i in range(n)]
    return EquivalenceRelation.from_labels(G.space, signature)


def is_measurable(E: EquivalenceRelation) -> bool:
    """E is a union of products of blocks iff each class is a union of blocks."""
    return all(E.space.is_measurable_set(c) for c in E.classes)


def require_measurable(E: EquivalenceRelation) -> None:
    if not is_measurable(E):
        bad = next(c for c in E.classes if not E.space.is_measurable_set(c))
        raise PreconditionError(
            "is_measurable",
            f"class {[E.space.atoms[i] for i in bad]} is not a union of sigma-algebra blocks",
        )


def is_basic(E: EquivalenceRelation) -> bool:
    """Measurability of E against the product of its own dual sigma-algebra."""
    star = dual_sigma(E)
    return is_measurable(EquivalenceRelation(star, E.classes))


def sigma_leq(coarse: GroundSpace, fine: GroundSpace) -> bool:
    """Inclusion of sigma-algebras: every measurable set of ``coarse`` is one of ``fine``."""
    return fine.refines(coarse)


def family_within(G: SetFamily, sigma: GroundSpace) -> bool:
    """G is a subset of the sigma-algebra ``sigma``."""
    return all(sigma.is_measurable_set(s) for s in G.sets)


def double_dual_relation(E: EquivalenceRelation) -> EquivalenceRelation:
    star = dual_relation(SetFamily.atoms_of(dual_sigma(E)))
    return EquivalenceRelation(E.space, star.classes)


def double_dual_sigma(G: SetFamily) -> GroundSpace:
    """Measurable sets saturated for the relation G induces."""
    return dual_sigma(dual_relation(G))
