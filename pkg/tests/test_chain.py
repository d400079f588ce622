import dataclasses
import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tvdual import Chain, ChainTrace, EquivalenceRelation, GroundSpace, Measure, PreconditionError, mass_ledger, solve_chain, solve_quotient
from tvdual.chain import chain_prefix, step_certificates
from tvdual.random_instances import random_chain, random_measure, random_space


def grid_example():
    space = GroundSpace.powerset(["00", "01", "10", "11"])
    equality = EquivalenceRelation.identity(space)
    second = EquivalenceRelation.from_labels(space, [w[1] for w in space.atoms])
    return space, Chain((equality, second))


def test_two_step_example():
    space, chain = grid_example()
    P, Q = Measure.uniform(space), Measure.point_mass(space, 0)
    sol, trace = solve_chain(P, Q, chain)
    assert sol.value == F(1, 2) == sol.dual_value
    assert trace.success_masses == (F(1, 4), F(1, 4))
    assert trace.residual_totals == (F(1), F(3, 4))
    assert mass_ledger(trace)
    assert all(step_certificates(trace))


def test_single_relation_chain_matches_direct_solve():
    space, chain = grid_example()
    P = Measure(space, (F(1, 8), F(1, 8), F(1, 4), F(1, 2)))
    Q = Measure.uniform(space)
    E = chain.last
    sol, _ = solve_chain(P, Q, Chain((E,)))
    direct = solve_quotient(P, Q, E)
    assert sol.value == direct.value
    assert sol.coupling.mass_on(E) == direct.coupling.mass_on(E)


def test_equal_measures_finish_at_step_zero():
    space, chain = grid_example()
    P = Measure.uniform(space)
    sol, trace = solve_chain(P, P, chain)
    assert sol.value == 0
    assert trace.success_masses[0] == 1
    assert sum(trace.success_masses) == 1


def test_empty_trace_is_vacuously_balanced():
    space, chain = grid_example()
    P = Measure.uniform(space)
    assert mass_ledger(ChainTrace(P, P, chain, ()))


def test_tampered_trace_fails_the_ledger():
    space, chain = grid_example()
    _, trace = solve_chain(Measure.uniform(space), Measure.point_mass(space, 0), chain)
    bad = dataclasses.replace(trace.steps[0], success_mass=F(1, 3))
    assert not mass_ledger(dataclasses.replace(trace, steps=(bad,) + trace.steps[1:]))


def test_decreasing_chain_is_rejected():
    space, chain = grid_example()
    with pytest.raises(PreconditionError) as info:
        Chain(tuple(reversed(chain.relations)))
    assert info.value.precondition == "chain_increasing"


def test_non_measurable_link_is_rejected():
    space = GroundSpace(("a", "b"), ((0, 1),))
    with pytest.raises(PreconditionError):
        Chain((EquivalenceRelation.identity(space),))


@given(st.integers(0, 2**32 - 1))
def test_chain_matches_direct_solve(seed):
    rng = random.Random(seed)
    space = random_space(rng, rng.randint(1, 12))
    chain = random_chain(rng, space)
    P, Q = random_measure(rng, space), random_measure(rng, space)
    sol, trace = solve_chain(P, Q, chain)
    assert sol.value == solve_quotient(P, Q, chain.last, build_coupling=False).value
    assert sol.coupling.is_coupling_of(P, Q)
    assert sol.coupling.mass_on(chain.last) == sum(trace.success_masses)
    assert mass_ledger(trace)
    assert all(step_certificates(trace))
    totals = trace.residual_totals
    assert all(a >= b for a, b in zip(totals, totals[1:]))


@given(st.integers(0, 2**32 - 1))
def test_prefix_values_decrease_along_the_chain(seed):
    rng = random.Random(seed)
    space = random_space(rng, rng.randint(1, 12))
    chain = random_chain(rng, space)
    P, Q = random_measure(rng, space), random_measure(rng, space)
    values = [solve_chain(P, Q, chain_prefix(chain, n))[0].value for n in range(len(chain))]
    assert all(a >= b for a, b in zip(values, values[1:]))
    first = solve_quotient(P, Q, chain.relations[0], build_coupling=False).value
    assert values[0] == first
