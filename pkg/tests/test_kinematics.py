import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dkpsim.kinematics import (
    MassClass, lower, mass_shell, minkowski_dot, random_four_vector, random_timelike,
)


def test_dot_examples():
    assert minkowski_dot([1, 0, 0, 0], [1, 0, 0, 0]) == 1
    assert minkowski_dot([1, 1, 0, 0], [1, 1, 0, 0]) == 0
    assert minkowski_dot([2, 1, 0, 0], [3, 1, 0, 0]) == 5


def test_lower():
    assert np.array_equal(lower([1, 2, 3, 4]), [1, -2, -3, -4])


def test_mass_shell_classes():
    ms = mass_shell([2.0, 0, 0, 0])
    assert ms.cls is MassClass.TIMELIKE and ms.m_p == 2.0 and ms.phi_p == 1
    ms = mass_shell([-5.0, 0, 0, 3.0])
    assert ms.cls is MassClass.TIMELIKE and ms.m_p == pytest.approx(4.0) and ms.phi_p == -1
    assert mass_shell([0, 1, 0, 0]).cls is MassClass.ZERO_ENERGY
    assert mass_shell([1, 2, 0, 0]).cls is MassClass.SPACELIKE
    assert mass_shell([1, 1, 0, 0]).cls is MassClass.LIGHTLIKE
    assert mass_shell([1, 2, 0, 0]).m_p is None


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=4, max_size=4), st.floats(0.1, 10))
def test_dot_scaling(p, c):
    p = np.asarray(p)
    assert minkowski_dot(c * p, p) == pytest.approx(c * minkowski_dot(p, p), abs=1e-9)


def test_samplers(rng):
    for _ in range(50):
        p = random_timelike(rng)
        assert np.all(np.abs(p) <= 10) and minkowski_dot(p, p) >= 0.25
    for cls in MassClass:
        for _ in range(10):
            assert mass_shell(random_four_vector(rng, cls), tol=1e-9).cls is cls
