"""Seeded random instances for batch verification."""

from __future__ import annotations

import random
from fractions import Fraction

from .chain import Chain
from .measure import GroundSpace, Measure
from .relations import EquivalenceRelation


def random_partition(rng: random.Random, items: list[int], max_parts: int | None = None) -> list[list[int]]:
    k = rng.randint(1, max_parts or len(items))
    parts: list[list[int]] = [[] for _ in range(k)]
    for x in items:
        parts[rng.randrange(k)].append(x)
    return [p for p in parts if p]


def random_space(rng: random.Random, n_atoms: int) -> GroundSpace:
    atoms = [f"w{i}" for i in range(n_atoms)]
    if rng.random() < 0.3:
        return GroundSpace.powerset(atoms)
    return GroundSpace(tuple(atoms), tuple(tuple(b) for b in random_partition(rng, list(range(n_atoms)))))


def random_measurable_relation(rng: random.Random, space: GroundSpace) -> EquivalenceRelation:
    """Classes are random unions of blocks, so the relation is measurable."""
    merged = random_partition(rng, list(range(space.n_blocks)))
    classes = [tuple(i for b in group for i in space.blocks[b]) for group in merged]
    return EquivalenceRelation(space, tuple(classes))


def coarsen(rng: random.Random, E: EquivalenceRelation) -> EquivalenceRelation:
    merged = random_partition(rng, list(range(len(E.classes))))
    return EquivalenceRelation(E.space, tuple(tuple(i for c in g for i in E.classes[c]) for g in merged))


def random_measure(rng: random.Random, space: GroundSpace, max_denominator: int = 64) -> Measure:
    """Probability measure whose masses all have denominator at most ``max_denominator``.

    A common denominator D is drawn and D units are spread over the blocks by
    uniformly random cut points, so zero masses occur naturally.
    """
    k = space.n_blocks
    D = rng.randint(1, max_denominator)
    cuts = sorted(rng.randint(0, D) for _ in range(k - 1))
    counts = [b - a for a, b in zip([0] + cuts, cuts + [D])]
    rng.shuffle(counts)
    return Measure(space, tuple(Fraction(c, D) for c in counts))


def random_instance(rng: random.Random, max_atoms: int = 40, max_denominator: int = 64):
    space = random_space(rng, rng.randint(1, max_atoms))
    E = random_measurable_relation(rng, space)
    return (random_measure(rng, space, max_denominator),
            random_measure(rng, space, max_denominator), E)


def random_chain(rng: random.Random, space: GroundSpace, max_length: int = 5) -> Chain:
    E = random_measurable_relation(rng, space)
    rels = [E]
    for _ in range(rng.randint(1, max_length) - 1):
        rels.append(coarsen(rng, rels[-1]))
    return Chain(tuple(rels))
