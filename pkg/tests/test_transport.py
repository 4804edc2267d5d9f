import numpy as np
import pytest

from pfperiods import (ClearanceError, Cycle, SingularityError, fundamental_transport, monodromy,
                       path_safety, period_vector, propagate)
from pfperiods.transport import (CircleSegment, ModuliPath, default_basis, dopri45, h_circle,
                                 h_line, h_polyline, line, oracle_endpoint, trace_integral)
from pfperiods.verify import DISCRIMINANT_H1, TRANSPORT_PATH, discriminant_loop

DETOUR = h_polyline(*TRANSPORT_PATH)


def test_dopri_matches_matrix_exponential():
    from scipy.linalg import expm
    A = np.array([[0, 1], [-4, 0]], dtype=complex)
    y, steps, err = dopri45(lambda t: A, np.eye(2), 1e-12)
    assert np.allclose(y, expm(A), atol=1e-10)
    assert err <= 1e-12 and steps > 0


def test_dopri_reports_singularity():
    with pytest.raises(SingularityError) as info:
        # y = (1/2 - t)^(-1/2): algebraic blow-up like a colliding branch pair
        dopri45(lambda t: np.array([[0.5 / (0.5 - t)]]), np.ones(1), 1e-10)
    assert abs(info.value.param - 0.5) < 1e-9


def test_dopri_overflow_is_a_singularity():
    with pytest.raises(SingularityError):
        dopri45(lambda t: np.array([[1 / (t - 0.5) ** 2]]), np.ones(1), 1e-10, step_floor=1e-8)


def test_literal_real_segment_crosses_discriminant(fixture_curve):
    with pytest.raises(ClearanceError) as info:
        path_safety(h_line((-7, 6), (-6, 6)), fixture_curve)
    # crossing at h1 = -3 * 3^(2/3), i.e. t = (h1* + 7)
    assert abs(info.value.param - (DISCRIMINANT_H1 + 7)) < 1e-9


@pytest.mark.parametrize("pair", [(1, 2), (3, 4), (4, 5), (5, 6)])
def test_transport_matches_oracle(fixture_curve, fixture_e, pair):
    c = Cycle.branch_pair(*pair)
    J0 = period_vector(fixture_e, c, 1e-12).J
    res = propagate(fixture_curve, DETOUR, J0, 1e-11)
    Jo = oracle_endpoint(fixture_curve, DETOUR, c, 1e-12).J
    assert np.max(np.abs(res.J_end - Jo) / np.abs(Jo)) <= 1e-7
    assert res.max_local_error <= 1e-11
    assert np.allclose(sorted(res.branch_end[:3].real), sorted(np.roots([1, 0, -6, 6]).real))


def test_transport_linear_and_recorded(fixture_curve, fixture_e):
    J1 = period_vector(fixture_e, Cycle.branch_pair(1, 2)).J
    J2 = period_vector(fixture_e, Cycle.branch_pair(5, 6)).J
    a = propagate(fixture_curve, DETOUR, J1, 1e-11, record=True)
    b = propagate(fixture_curve, DETOUR, J2, 1e-11)
    c = propagate(fixture_curve, DETOUR, J1 + 2 * J2, 1e-11)
    assert np.allclose(c.J_end, a.J_end + 2 * b.J_end, rtol=1e-9)
    ts = [t for t, _ in a.samples]
    assert ts[0] == 0 and abs(ts[-1] - 1) < 1e-15 and np.all(np.diff(ts) > 0)


def test_branch_point_path_matches_oracle(fixture_e):
    path = ModuliPath("e", (line(6.0, 7.0 + 1.0j), line(7.0 + 1.0j, 6.5 - 0.5j)), index=6)
    c = Cycle.branch_pair(5, 6)
    J0 = period_vector(fixture_e, c, 1e-12).J
    res = propagate(fixture_e, path, J0, 1e-11)
    Jo = oracle_endpoint(fixture_e, path, c, 1e-12).J
    assert np.max(np.abs(res.J_end - Jo) / np.abs(Jo)) <= 1e-8


def test_branch_point_path_through_other_point(fixture_e):
    with pytest.raises(ClearanceError):
        path_safety(ModuliPath("e", (line(6.0, 4.0),), index=6), fixture_e)


def test_contractible_loop(fixture_curve):
    m = monodromy(fixture_curve, h_circle((-7.0, 6.0), 0.2), 1e-12)
    assert np.linalg.norm(m.M - np.eye(5)) <= 1e-8
    assert m.residual_vs_oracle <= 1e-8


def test_discriminant_loop_is_a_transvection(fixture_curve):
    m = monodromy(fixture_curve, discriminant_loop(), 1e-12)
    assert np.linalg.norm(m.M - np.eye(5)) > 1e-3
    assert m.liouville_residual <= 1e-8
    assert m.residual_vs_oracle <= 1e-8
    sv = np.linalg.svd(m.M - np.eye(5), compute_uv=False)
    assert sv[1] < 1e-7 * sv[0]          # Picard-Lefschetz: M - I has rank one
    N = m.M - np.eye(5)
    assert np.linalg.norm(N @ N) < 1e-7 * np.linalg.norm(N) ** 2   # unipotent
    assert len(m.basis) == 5 and np.linalg.matrix_rank(m.B0) == 5
    C = m.cycle_matrix
    Z = np.round(C.real)
    assert np.max(np.abs(C - Z)) <= 1e-8          # integral on cycles
    assert abs(np.linalg.det(Z)) == 1 and np.linalg.matrix_rank(Z - np.eye(5)) == 1


def test_loop_composition(fixture_curve):
    loop = discriminant_loop()
    M = monodromy(fixture_curve, loop, 1e-12, oracle=False).M
    twice = monodromy(fixture_curve, loop.then(loop), 1e-12, oracle=False).M
    back = monodromy(fixture_curve, loop.then(loop.reversed()), 1e-12, oracle=False).M
    inv = monodromy(fixture_curve, loop.reversed(), 1e-12, oracle=False).M
    assert np.linalg.norm(twice - M @ M) <= 1e-7 * np.linalg.norm(M @ M)
    assert np.linalg.norm(back - np.eye(5)) <= 1e-8
    assert np.linalg.norm(inv @ M - np.eye(5)) <= 1e-8


def test_liouville_along_open_path(fixture_curve):
    res = fundamental_transport(fixture_curve, DETOUR, 1e-12)
    expected = np.exp(trace_integral(fixture_curve, DETOUR))
    assert abs(np.linalg.det(res.Phi_end) - expected) <= 1e-8 * abs(expected)
    assert res.liouville_residual <= 1e-8


def test_path_validation():
    with pytest.raises(ValueError):
        ModuliPath("h", (line((0, 0), (1, 0)), line((2, 0), (3, 0))))     # gap
    with pytest.raises(ValueError):
        ModuliPath("h", (line((0, 0), (1, 0)),), closed=True)             # not closed
    with pytest.raises(ValueError):
        ModuliPath("x", (line((0, 0), (1, 0)),))
    with pytest.raises(ValueError):
        ModuliPath("e", (line(0, 1),))                                     # no index
    circ = CircleSegment(np.array([0, 0], dtype=complex), 1.0, 2)
    assert np.allclose(circ.point(1.0), circ.point(0.0))


def test_monodromy_requires_closed(fixture_curve):
    with pytest.raises(ValueError):
        monodromy(fixture_curve, DETOUR)


def test_default_basis_independent(fixture_e):
    cycles, B = default_basis(fixture_e)
    assert [c.pair for c in cycles] == [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6)]
    assert np.linalg.matrix_rank(B) == 5
