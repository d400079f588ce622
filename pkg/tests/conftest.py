from __future__ import annotations

import os
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from tvdual import EquivalenceRelation, GroundSpace, Measure

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=500, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA


def labels_to_blocks(labels):
    groups = {}
    for i, g in enumerate(labels):
        groups.setdefault(g, []).append(i)
    return [tuple(v) for v in groups.values()]


@st.composite
def spaces(draw, max_atoms=7):
    n = draw(st.integers(1, max_atoms))
    atoms = tuple(f"a{i}" for i in range(n))
    if draw(st.booleans()):
        return GroundSpace.powerset(atoms)
    labels = draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    return GroundSpace(atoms, tuple(labels_to_blocks(labels)))


@st.composite
def measures(draw, space, max_denominator=32):
    D = draw(st.integers(1, max_denominator))
    weights = draw(st.lists(st.integers(0, D), min_size=space.n_blocks, max_size=space.n_blocks))
    total = sum(weights)
    if total == 0:
        weights[0], total = 1, 1
    return Measure(space, tuple(Fraction(w, total) for w in weights))


@st.composite
def measurable_relations(draw, space):
    labels = draw(st.lists(st.integers(0, space.n_blocks - 1),
                           min_size=space.n_blocks, max_size=space.n_blocks))
    classes = [tuple(i for b in group for i in space.blocks[b]) for group in labels_to_blocks(labels)]
    return EquivalenceRelation(space, tuple(classes))


@st.composite
def any_relations(draw, space):
    n = space.n_atoms
    labels = draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    return EquivalenceRelation(space, tuple(labels_to_blocks(labels)))


@st.composite
def instances(draw, max_atoms=7):
    space = draw(spaces(max_atoms))
    return draw(measures(space)), draw(measures(space)), draw(measurable_relations(space))
