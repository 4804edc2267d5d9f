import numpy as np
import pytest
from hypothesis import given, strategies as st

from pfperiods import Cycle
from pfperiods.neumann import (NeumannConfig, action_derivatives, action_fd, action_integrals,
                               cartesian_squares, elliptic_coordinates, hamiltonian_classical,
                               potential_difference, quartic_potential)
from pfperiods.verify import FIXTURE, sorted_pair_cycles

A123 = (1.0, 2.0, 3.0)


def _unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def test_coordinate_vertices():
    assert elliptic_coordinates([1, 0, 0], A123) == (2.0, 3.0)
    assert elliptic_coordinates([0, 1, 0], A123) == (1.0, 3.0)
    assert elliptic_coordinates([0, 0, 1], A123) == (1.0, 2.0)
    assert elliptic_coordinates([0, 0, 1], A123).boundary
    assert not elliptic_coordinates(_unit([1, 1, 1]), A123).boundary


def test_potential_and_hamiltonian_examples():
    assert quartic_potential([1, 0, 0], A123) == -17
    assert quartic_potential([0, 1, 0], A123) == -23
    assert hamiltonian_classical([1, 0, 0], [0, 0, 0], A123) == 0.5
    cfg = NeumannConfig(A123, (1.0, 0.0, 0.0))
    assert cfg.energy() == 0.5 and cfg.potential() == -17


def test_hamiltonian_gauge_invariance(rng):
    for _ in range(20):
        x, y = _unit(rng.normal(size=3)), rng.normal(size=3)
        H = hamiltonian_classical(x, y, A123)
        assert abs(hamiltonian_classical(x, y + rng.normal() * x, A123) - H) <= 1e-12 * max(1, abs(H))


def test_round_trip(rng):
    a = np.array([4.0, 5.0, 6.0])
    for _ in range(100):
        x = _unit(rng.normal(size=3))
        l1, l2 = elliptic_coordinates(x, a)
        assert np.allclose(cartesian_squares(l1, l2, a), x**2, atol=1e-12)


@given(st.floats(-50, 50), st.floats(-50, 50))
def test_squares_sum_to_one(l1, l2):
    a = np.array([4.0, 5.0, 6.0])
    assert abs(cartesian_squares(l1, l2, a).sum() - 1) <= 1e-13 * max(1, l1 * l1 + l2 * l2)


def test_interlacing(rng):
    a = np.array([-1.0, 0.5, 2.0])
    x = rng.normal(size=(2000, 3))
    for xi in x / np.linalg.norm(x, axis=1)[:, None]:
        l1, l2 = elliptic_coordinates(xi, a)
        assert a[0] <= l1 <= a[1] <= l2 <= a[2]


def test_potential_offset_is_trace_squared(rng):
    for _ in range(20):
        a = np.sort(rng.uniform(-5, 5, 3))
        x = _unit(rng.normal(size=3))
        assert abs(potential_difference(x, a) + a.sum() ** 2) <= 1e-11 * max(1, a.sum() ** 2)


def test_config_validation():
    with pytest.raises(ValueError):
        NeumannConfig((1, 1, 2), (1, 0, 0))
    with pytest.raises(ValueError):
        NeumannConfig(A123, (1, 1, 0))
    with pytest.raises(ValueError):
        NeumannConfig(A123, (1, 0))


def test_actions_two_routes(fixture_cycles):
    res = action_integrals(FIXTURE, fixture_cycles)
    assert res.route_agreement <= 1e-10
    # each action is real or purely imaginary; the ovals over [1,2] and [4,5]
    # (where R > 0) carry real actions
    for c, v in zip(res.cycles, res.actions):
        assert min(abs(v.real), abs(v.imag)) <= 1e-12 * abs(v)
        if c.pair in ((2, 3), (4, 5)):
            assert abs(v.imag) <= 1e-10 * abs(v)


def test_action_linearity():
    one, two, flip = action_integrals(FIXTURE, [Cycle.branch_pair(1, 2), Cycle.branch_pair(1, 2, winding=2),
                                                Cycle.branch_pair(1, 2, sheet=-1)]).actions
    assert abs(two - 2 * one) <= 1e-12 * abs(one)
    assert abs(flip + one) <= 1e-12 * abs(one)


def test_action_derivatives_vs_fd():
    cycles = sorted_pair_cycles(FIXTURE.branch_set().points)
    for d, f in zip(action_derivatives(FIXTURE, cycles), action_fd(FIXTURE, cycles)):
        assert np.max(np.abs(d - f) / np.abs(d)) <= 1e-6
