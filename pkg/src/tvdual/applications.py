"""Instance builders: group orbits, sequence spaces, tilting, bit flips and friends.

Everything rational except :func:`hellinger` and the truncated Poisson
instances, which use NumPy floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .chain import Chain
from .coupling import COUPLING, Coupling
from .errors import InternalDefect, PreconditionError
from .measure import GroundSpace, Measure
from .relations import EquivalenceRelation, UnionFind, dual_sigma


# --------------------------------------------------------------------------
# group actions


@dataclass(frozen=True)
class FiniteAction:
    """Permutations of the atoms generating a finite group.

    Each generator must act measurably: preimages of blocks are unions of blocks.
    """

    space: GroundSpace
    generators: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = self.space.n_atoms
        gens = tuple(tuple(int(x) for x in g) for g in self.generators)
        for k, g in enumerate(gens):
            if sorted(g) != list(range(n)):
                raise PreconditionError("bijection", f"generator {k} is not a permutation of {n} atoms")
            for block in self.space.blocks:
                pre = [i for i in range(n) if g[i] in block]
                if not self.space.is_measurable_set(pre):
                    raise PreconditionError("measurable_action", f"generator {k} is not measurable")
        object.__setattr__(self, "generators", gens)

    def preimage(self, g: Sequence[int], A: Iterable[int]) -> frozenset[int]:
        A = set(A)
        return frozenset(i for i in range(self.space.n_atoms) if g[i] in A)

    def is_invariant(self, A: Iterable[int]) -> bool:
        A = frozenset(A)
        return all(self.preimage(g, A) == A for g in self.generators)


def invariant_sigma(action: FiniteAction) -> GroundSpace:
    """Atoms of the invariant sigma-algebra, grown directly from invariance.

    For each atom the smallest invariant measurable set containing it is found
    by closing under blocks, images and preimages until nothing changes.
    """
    space = action.space
    inverses = []
    for g in action.generators:
        inv = [0] * space.n_atoms
        for i, gi in enumerate(g):
            inv[gi] = i
        inverses.append(inv)
    maps = list(action.generators) + inverses
    assigned: set[int] = set()
    blocks = []
    for start in range(space.n_atoms):
        if start in assigned:
            continue
        closure = set(space.blocks[space.block_of(start)])
        frontier = list(closure)
        while frontier:
            i = frontier.pop()
            for f in maps:
                for j in space.blocks[space.block_of(f[i])]:
                    if j not in closure:
                        closure.add(j)
                        frontier.append(j)
        assigned |= closure
        blocks.append(tuple(closure))
    return space.with_sigma(blocks)


def orbit_relation(action: FiniteAction) -> tuple[EquivalenceRelation, GroundSpace]:
    """Orbit relation of the generated group and its dual (the invariant sigma-algebra)."""
    space = action.space
    uf = UnionFind(space.n_atoms)
    for g in action.generators:
        for i, gi in enumerate(g):
            uf.union(i, gi)
    E_G = EquivalenceRelation(space, tuple(tuple(c) for c in uf.groups()))
    I_G = dual_sigma(E_G)
    if I_G != invariant_sigma(action):
        raise InternalDefect("dual of the orbit relation differs from the invariant sigma-algebra")
    return E_G, I_G


# --------------------------------------------------------------------------
# sequence spaces


@dataclass(frozen=True)
class SequenceSpace:
    """All length-``horizon`` words over ``range(alphabet)``, in lexicographic order."""

    alphabet: int
    horizon: int
    words: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    ground: GroundSpace = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.alphabet < 2:
            raise PreconditionError("alphabet", "alphabet size must be at least 2")
        if self.horizon < 1:
            raise PreconditionError("horizon", "horizon must be at least 1")
        words = tuple(product(range(self.alphabet), repeat=self.horizon))
        sep = "" if self.alphabet <= 10 else "."
        object.__setattr__(self, "words", words)
        object.__setattr__(self, "ground", GroundSpace.powerset([sep.join(map(str, w)) for w in words]))

    def index(self, word: Sequence[int]) -> int:
        k = 0
        for x in word:
            k = k * self.alphabet + x
        return k

    def relation_by(self, key) -> EquivalenceRelation:
        return EquivalenceRelation.from_labels(self.ground, [key(w) for w in self.words])

    def coordinate_action(self, perms: Iterable[Sequence[int]]) -> FiniteAction:
        """Action permuting coordinates: word w maps to (w[p[0]], ..., w[p[T-1]])."""
        gens = []
        for p in perms:
            gens.append(tuple(self.index(tuple(w[k] for k in p)) for w in self.words))
        return FiniteAction(self.ground, tuple(gens))


def cyclic_shift_action(space: SequenceSpace) -> FiniteAction:
    T = space.horizon
    return space.coordinate_action([tuple((k + 1) % T for k in range(T))])


def coordinate_permutation_action(space: SequenceSpace) -> FiniteAction:
    """The full symmetric group on coordinates, generated by adjacent transpositions."""
    T = space.horizon
    perms = []
    for k in range(T - 1):
        p = list(range(T))
        p[k], p[k + 1] = p[k + 1], p[k]
        perms.append(tuple(p))
    return space.coordinate_action(perms or [tuple(range(T))])


def eventual_equality_chain(space: SequenceSpace) -> Chain:
    """E_1 <= ... <= E_T where E_n relates words agreeing on coordinates n..T (1-based)."""
    return Chain(tuple(space.relation_by(lambda w, n=n: w[n:]) for n in range(space.horizon)))


def multiset_relation(space: SequenceSpace) -> EquivalenceRelation:
    """Words are related when one is a rearrangement of the other."""
    return space.relation_by(lambda w: tuple(sorted(w)))


def tilt_measure(base: Measure, V: Sequence) -> Measure:
    """Reweight ``base`` by the nonnegative per-block weights V and renormalize."""
    V = [Fraction(v) for v in V]
    if len(V) != base.space.n_blocks:
        raise PreconditionError("measure_shape", "need one weight per block")
    if any(v < 0 for v in V):
        raise PreconditionError("nonnegative", "tilting weights must be nonnegative")
    weighted = [v * m for v, m in zip(V, base.masses)]
    z = sum(weighted, Fraction(0))
    if z <= 0:
        raise PreconditionError("positive_integral", "the weights integrate to zero under the base measure")
    return Measure(base.space, tuple(w / z for w in weighted))


def first_bit_indicator(space: SequenceSpace, symbol: int = 1) -> list[Fraction]:
    return [Fraction(int(w[0] == symbol)) for w in space.words]


def bitflip_coupling(space: SequenceSpace) -> Coupling:
    """Uniform word paired with itself or with its complement, each half the time."""
    if space.alphabet != 2:
        raise PreconditionError("alphabet", "the bit flip needs a binary alphabet")
    w = Fraction(1, 2 ** (space.horizon + 1))
    entries = {}
    top = 2 ** space.horizon - 1
    for i in range(2 ** space.horizon):
        entries[(i, i)] = w
        entries[(i, top - i)] = w  # complementing every bit reverses the lexicographic index
    return Coupling(space.ground, entries, COUPLING)


# --------------------------------------------------------------------------
# densities 2x and 2(1-x) on [0, 1]


def asymmetry_instance(n: int) -> tuple[Measure, Measure]:
    """Cell masses of the densities 2x and 2(1 - x) on n equal cells of [0, 1]."""
    if n < 2 or n % 2:
        raise PreconditionError("even_cells", "the number of cells must be even and at least 2")
    space = GroundSpace.powerset([f"[{k}/{n},{k + 1}/{n}]" for k in range(n)])
    sq = n * n
    P = Measure(space, tuple(Fraction(2 * k + 1, sq) for k in range(n)))
    P_prime = Measure(space, tuple(Fraction(2 * (n - k) - 1, sq) for k in range(n)))
    return P, P_prime


# --------------------------------------------------------------------------
# floating-point helpers


def hellinger(mu, mu_prime, dominating=None) -> float:
    """Hellinger distance between two finite nonnegative mass vectors.

    The densities are taken against ``dominating`` (default ``mu + mu_prime``);
    entries where it vanishes must carry no mass from either argument.
    """
    mu = np.asarray(mu, dtype=float)
    mu_prime = np.asarray(mu_prime, dtype=float)
    lam = mu + mu_prime if dominating is None else np.asarray(dominating, dtype=float)
    if mu.shape != mu_prime.shape or lam.shape != mu.shape:
        raise PreconditionError("same_index_set", "mass vectors must have the same shape")
    if (mu < 0).any() or (mu_prime < 0).any() or (lam < 0).any():
        raise PreconditionError("nonnegative", "masses must be nonnegative")
    live = lam > 0
    if (mu[~live] > 0).any() or (mu_prime[~live] > 0).any():
        raise PreconditionError("dominating", "dominating measure misses some mass")
    lam = lam[live]
    diff = np.sqrt(mu[live] / lam) - np.sqrt(mu_prime[live] / lam)
    return float(np.sqrt(0.5 * np.sum(diff * diff * lam)))


def truncated_poisson_pmf(rate: float, m: int) -> np.ndarray:
    k = np.arange(m + 1)
    if rate == 0:
        return (k == 0).astype(float)
    logs = -rate + k * math.log(rate) - np.array([math.lgamma(j + 1) for j in k])
    return np.exp(logs)


MAX_POISSON_ATOMS = 250_000
MIN_TRUNCATED_MASS = 1 - 1e-9


@dataclass(frozen=True)
class PoissonTailInstance:
    """Truncated product-Poisson occupation counts under "agree outside K".

    ``P`` and ``P_prime`` are flat arrays over occupation vectors (lexicographic,
    site 0 most significant), each renormalized to total mass 1. The per-site
    normalized pmfs are kept so class masses can use the product structure.
    """

    shape: tuple[int, ...]
    outside: tuple[int, ...]
    P: np.ndarray = field(repr=False)
    P_prime: np.ndarray = field(repr=False)
    class_index: np.ndarray = field(repr=False)
    n_classes: int
    truncation_error: float
    site_pmfs: tuple[tuple[np.ndarray, np.ndarray], ...] = field(repr=False, default=())

    def class_masses(self) -> tuple[np.ndarray, np.ndarray]:
        """Law of the outside-K coordinates: the product of their per-site pmfs."""
        a, b = np.ones(1), np.ones(1)
        for s in self.outside:
            p, q = self.site_pmfs[s]
            a, b = np.multiply.outer(a, p).ravel(), np.multiply.outer(b, q).ravel()
        return a, b

    def class_masses_from_joint(self) -> tuple[np.ndarray, np.ndarray]:
        """Same masses, summed out of the joint arrays atom by atom."""
        return (np.bincount(self.class_index, weights=self.P, minlength=self.n_classes),
                np.bincount(self.class_index, weights=self.P_prime, minlength=self.n_classes))

    def solve(self) -> float:
        """Optimal ``1 - Q(E)``, evaluated as the positive part of the class-mass difference."""
        a, b = self.class_masses()
        return float(np.clip(a - b, 0, None).sum())


def poisson_tail_instance(intensities: Sequence[tuple[float, float]], inside_K: Iterable[int],
                          m: int) -> PoissonTailInstance:
    """Build the truncated instance; sites inside K are free, the rest must agree."""
    sites = len(intensities)
    inside = set(inside_K)
    if not sites:
        raise PreconditionError("sites", "need at least one site")
    if any(not 0 <= s < sites for s in inside):
        raise PreconditionError("sites", "inside_K names an unknown site")
    outside = tuple(s for s in range(sites) if s not in inside)
    if len(outside) > 3:
        raise PreconditionError("outside_sites", "at most 3 sites may lie outside K")
    if m < 0 or (m + 1) ** sites > MAX_POISSON_ATOMS:
        raise PreconditionError("truncation", f"(m+1)^sites must stay within {MAX_POISSON_ATOMS} atoms")
    pmfs, pmfs_prime, mass, mass_prime = [], [], 1.0, 1.0
    for rate, rate_prime in intensities:
        if rate < 0 or rate_prime < 0:
            raise PreconditionError("nonnegative", "intensities must be nonnegative")
        p, q = truncated_poisson_pmf(rate, m), truncated_poisson_pmf(rate_prime, m)
        mass *= p.sum()
        mass_prime *= q.sum()
        pmfs.append(p / p.sum())
        pmfs_prime.append(q / q.sum())
    if min(mass, mass_prime) < MIN_TRUNCATED_MASS:
        raise PreconditionError(
            "truncation",
            f"truncation at m={m} loses {1.0 - min(mass, mass_prime):.3e} of the mass (limit 1e-9); raise m"
        )
    shape = (m + 1,) * sites
    P, P_prime = pmfs[0], pmfs_prime[0]
    for p, q in zip(pmfs[1:], pmfs_prime[1:]):
        P = np.multiply.outer(P, p)
        P_prime = np.multiply.outer(P_prime, q)
    grid = np.indices(shape).reshape(sites, -1)
    if outside:
        class_index = np.ravel_multi_index(tuple(grid[s] for s in outside), (m + 1,) * len(outside))
        n_classes = (m + 1) ** len(outside)
    else:
        class_index = np.zeros(grid.shape[1], dtype=int)
        n_classes = 1
    return PoissonTailInstance(
        shape=shape, outside=outside, P=np.ravel(P), P_prime=np.ravel(P_prime),
        class_index=np.asarray(class_index), n_classes=n_classes,
        truncation_error=float(1.0 - min(mass, mass_prime)),
        site_pmfs=tuple(zip(pmfs, pmfs_prime)),
    )
