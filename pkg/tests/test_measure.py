from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tvdual import GroundSpace, Measure, PreconditionError, jordan_decompose, meet, pushforward, tv_over
from tvdual.measure import SIGNED, SUB_PROBABILITY

from conftest import measures, spaces
from oracles import brute_tv


@st.composite
def measure_pairs(draw):
    space = draw(spaces())
    return draw(measures(space)), draw(measures(space))


def test_powerset_and_trivial():
    ps = GroundSpace.powerset("abc")
    assert ps.n_blocks == 3
    assert GroundSpace.trivial("abc").blocks == ((0, 1, 2),)
    assert ps.refines(GroundSpace.trivial("abc"))
    assert not GroundSpace.trivial("abc").refines(ps)


def test_blocks_are_canonicalized():
    space = GroundSpace(("a", "b", "c", "d"), ((3, 1), (2,), (0,)))
    assert space.blocks == ((0,), (1, 3), (2,))
    assert space.block_of(3) == 1


def test_bad_partitions_are_rejected():
    with pytest.raises(PreconditionError):
        GroundSpace(("a", "b"), ((0,),))
    with pytest.raises(PreconditionError):
        GroundSpace(("a", "b"), ((0, 1), (1,)))


def test_measurable_sets():
    space = GroundSpace(("a", "b", "c"), ((0, 1), (2,)))
    assert space.is_measurable_set({0, 1})
    assert not space.is_measurable_set({0})


def test_probability_must_sum_to_one():
    space = GroundSpace.powerset("ab")
    with pytest.raises(PreconditionError):
        Measure(space, (F(1, 2), F(1, 4)))
    with pytest.raises(PreconditionError):
        Measure(space, (F(3, 2), F(-1, 2)))
    Measure(space, (F(1, 2), F(1, 4)), SUB_PROBABILITY)


def test_restrict_sums_blocks():
    space = GroundSpace.powerset("abcd")
    P = Measure(space, (F(1, 8), F(1, 8), F(1, 4), F(1, 2)))
    coarse = space.with_sigma([(0, 3), (1, 2)])
    assert P.restrict(coarse).masses == (F(5, 8), F(3, 8))


def test_tv_example():
    space = GroundSpace.powerset("abc")
    P = Measure(space, (F(1, 2), F(1, 2), F(0)))
    Q = Measure(space, (F(0), F(1, 2), F(1, 2)))
    value, witness = tv_over(P, Q)
    assert value == F(1, 2)
    assert 0 in witness and 2 not in witness


def test_meet_example():
    space = GroundSpace.powerset("abc")
    P = Measure(space, (F(1, 2), F(1, 4), F(1, 4)))
    Q = Measure(space, (F(1, 4), F(1, 4), F(1, 2)))
    assert meet(P, Q).masses == (F(1, 4), F(1, 4), F(1, 4))


def test_pushforward_to_classes():
    space = GroundSpace.powerset("abcd")
    P = Measure.uniform(space)
    image = pushforward(P, [0, 0, 1, 1], labels=["x", "y"])
    assert image.masses == (F(1, 2), F(1, 2))
    assert image.space.atoms == ("x", "y")


@given(measure_pairs())
def test_jordan_reconstructs_and_is_singular(pair):
    P, Q = pair
    nu = P - Q
    jd = jordan_decompose(nu)
    assert nu.kind == SIGNED
    assert all(a - b == m for a, b, m in zip(jd.positive_part.masses, jd.negative_part.masses, nu.masses))
    assert jd.positive_set | jd.negative_set == frozenset(range(P.space.n_blocks))
    assert not jd.positive_set & jd.negative_set
    assert all(jd.negative_part.masses[k] == 0 for k in jd.positive_set)
    assert all(jd.positive_part.masses[k] == 0 for k in jd.negative_set)


@given(measure_pairs())
def test_meet_is_the_greatest_lower_bound(pair):
    P, Q = pair
    m = meet(P, Q)
    assert m.dominated_by(P) and m.dominated_by(Q)
    # blockwise min is the largest dominated measure
    assert m.masses == tuple(min(a, b) for a, b in zip(P.masses, Q.masses))
    assert m.total == 1 - tv_over(P, Q)[0]


@given(measure_pairs())
def test_tv_matches_subset_enumeration(pair):
    P, Q = pair
    value, witness = tv_over(P, Q)
    assert value == brute_tv(P.masses, Q.masses)
    assert P.of_blocks(witness) - Q.of_blocks(witness) == value


@given(measure_pairs())
def test_tv_symmetric_and_bounded(pair):
    P, Q = pair
    assert tv_over(P, Q)[0] == tv_over(Q, P)[0]
    assert 0 <= tv_over(P, Q)[0] <= 1
    assert tv_over(P, P)[0] == 0


@given(st.data())
def test_tv_triangle(data):
    space = data.draw(spaces())
    P, Q, R = (data.draw(measures(space)) for _ in range(3))
    assert tv_over(P, R)[0] <= tv_over(P, Q)[0] + tv_over(Q, R)[0]


@given(st.data())
def test_coarsening_never_increases_tv(data):
    space = data.draw(spaces())
    P, Q = data.draw(measures(space)), data.draw(measures(space))
    coarse = GroundSpace.trivial(space.atoms)
    assert tv_over(P.restrict(coarse), Q.restrict(coarse))[0] <= tv_over(P, Q)[0]
