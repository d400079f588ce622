"""Residual iteration for increasing chains of equivalence relations.

Given E_0 <= E_1 <= ... <= E_N, the coupling for E_N is assembled step by step:
at step n the current residual marginals are coupled optimally for E_n, the
part of that coupling lying on E_n is banked, and its marginals are removed
from the residuals. After the last step the banked sub-coupling is completed
by product completion. The total banked mass equals the optimum for E_N.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .coupling import Coupling, complete_subcoupling
from .errors import InternalDefect, PreconditionError
from .measure import PROBABILITY, SUB_PROBABILITY, Measure, jordan_decompose, pushforward
from .relations import EquivalenceRelation, require_measurable
from .solver import Solution, class_masses, solve_quotient, tv_dual

_ZERO = Fraction(0)


@dataclass(frozen=True)
class Chain:
    relations: tuple[EquivalenceRelation, ...]

    def __post_init__(self) -> None:
        rels = tuple(self.relations)
        object.__setattr__(self, "relations", rels)
        if not rels:
            raise PreconditionError("chain_nonempty", "a chain needs at least one relation")
        space = rels[0].space
        for n, E in enumerate(rels):
            if E.space != space:
                raise PreconditionError("chain_space", f"relation {n} lives on a different space")
            require_measurable(E)
        for n, (a, b) in enumerate(zip(rels, rels[1:])):
            if not a.issubset(b):
                raise PreconditionError("chain_increasing", f"relation {n} is not contained in relation {n + 1}")

    @property
    def last(self) -> EquivalenceRelation:
        return self.relations[-1]

    def __len__(self) -> int:
        return len(self.relations)


@dataclass(frozen=True)
class ChainStep:
    residual_total: Fraction  # mass left in each marginal when the step starts
    success_mass: Fraction
    accumulated: Coupling
    residual: tuple[tuple[Fraction, ...], tuple[Fraction, ...]]  # (P_n, P'_n) blockwise


@dataclass(frozen=True)
class ChainTrace:
    P: Measure
    P_prime: Measure
    chain: Chain
    steps: tuple[ChainStep, ...]

    @property
    def success_masses(self) -> tuple[Fraction, ...]:
        return tuple(s.success_mass for s in self.steps)

    @property
    def residual_totals(self) -> tuple[Fraction, ...]:
        return tuple(s.residual_total for s in self.steps)


def _step(P_n: tuple, Pp_n: tuple, space, E: EquivalenceRelation) -> Coupling:
    """Optimal E-supported sub-coupling of equal-mass residuals (scaled back)."""
    r = sum(P_n, _ZERO)
    mu = Measure(space, tuple(m / r for m in P_n), PROBABILITY)
    mu_prime = Measure(space, tuple(m / r for m in Pp_n), PROBABILITY)
    sol = solve_quotient(mu, mu_prime, E)
    return sol.coupling.restricted_to(E).scaled(r)


def solve_chain(P: Measure, P_prime: Measure, chain: Chain) -> tuple[Solution, ChainTrace]:
    space = chain.last.space
    if P.space != space or P_prime.space != space:
        raise PreconditionError("same_space", "P, P' and the chain must share atoms and sigma-algebra")
    if P.kind != PROBABILITY or P_prime.kind != PROBABILITY:
        raise PreconditionError("probability", "P and P' must be probability measures")

    P_n, Pp_n = P.masses, P_prime.masses
    banked = Coupling(space, {})
    steps: list[ChainStep] = []
    for E in chain.relations:
        r, r_prime = sum(P_n, _ZERO), sum(Pp_n, _ZERO)
        if r != r_prime:
            raise InternalDefect(f"residual masses diverged: {r} vs {r_prime}")
        if r == 0:
            break
        piece = _step(P_n, Pp_n, space, E)
        banked = banked + piece
        rows, cols = piece.row_marginal().masses, piece.col_marginal().masses
        start = (P_n, Pp_n)
        P_n = tuple(a - b for a, b in zip(P_n, rows))
        Pp_n = tuple(a - b for a, b in zip(Pp_n, cols))
        if any(m < 0 for m in P_n + Pp_n):
            raise InternalDefect("residual became negative")
        steps.append(ChainStep(residual_total=r, success_mass=piece.total,
                               accumulated=banked, residual=start))

    coupling = complete_subcoupling(banked, P, P_prime)
    E_N = chain.last
    value = 1 - coupling.mass_on(E_N)

    # witness from the E_N quotient of the residuals at the last executed step
    last_p, last_q = steps[-1].residual if steps else (P.masses, P_prime.masses)
    quotient = E_N.block_quotient()
    diff = (pushforward(Measure(space, last_p, SUB_PROBABILITY), quotient)
            - pushforward(Measure(space, last_q, SUB_PROBABILITY), quotient))
    witness = tuple(E_N.classes[c] for c in sorted(jordan_decompose(diff).positive_set))
    dual_value, _ = tv_dual(P, P_prime, E_N)
    trace = ChainTrace(P, P_prime, chain, tuple(steps))
    return Solution(value=value, coupling=coupling, dual_value=dual_value, witness=witness), trace


def step_certificates(trace: ChainTrace) -> list[bool]:
    """Per step: banked mass equals the class-mass overlap of that step's residuals."""
    out = []
    space = trace.chain.last.space
    for E, step in zip(trace.chain.relations, trace.steps):
        p, q = step.residual
        pc = class_masses(Measure(space, p, SUB_PROBABILITY), E)
        qc = class_masses(Measure(space, q, SUB_PROBABILITY), E)
        out.append(step.success_mass == sum((min(a, b) for a, b in zip(pc, qc)), _ZERO))
    return out


def mass_ledger(trace: ChainTrace) -> bool:
    """Recheck the residual bookkeeping of a trace exactly.

    Every step must start with ``1 - (mass banked so far)`` in each marginal,
    and the mass never banked must not exceed the discrepancy over the dual
    sigma-algebra of the last relation.
    """
    if not trace.steps:
        return True
    banked = _ZERO
    for step in trace.steps:
        if step.success_mass < 0 or step.residual_total != 1 - banked:
            return False
        if sum(step.residual[0], _ZERO) != step.residual_total:
            return False
        banked += step.success_mass
        if step.accumulated.total != banked:
            return False
    bound, _ = tv_dual(trace.P, trace.P_prime, trace.chain.last)
    return 1 - banked <= bound


def chain_prefix(chain: Chain, n: int) -> Chain:
    return Chain(chain.relations[: n + 1])

