import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from pfperiods import (ClearanceError, ConvergenceError, Cycle, big_loop_periods,
                       deform_cycle, exactness_check, period_vector)
from pfperiods.oracle import (CircleArc, big_loop_limit, consistent_sheets, follow_sheet,
                              ref_sqrt, stadium)


def test_ref_sqrt_squares_back():
    z = np.array([1, -1, 1j, -4 - 0.1j, -4 + 0.1j])
    assert np.allclose(ref_sqrt(z) ** 2, z)
    # no cut on the negative real axis
    assert abs(ref_sqrt(-4 - 1e-14j) - ref_sqrt(-4 + 1e-14j)) < 1e-12


@pytest.mark.parametrize("k", range(1, 7))
def test_exactness(fixture_e, fixture_cycles, k):
    for c in fixture_cycles:
        assert exactness_check(fixture_e, c, k) <= 1e-10


@pytest.mark.parametrize("pair", [(2, 3), (4, 5), (1, 2), (5, 6)])
def test_real_segment_integral_oracle(fixture_e, pair):
    """|J_i| over a pair on the real axis = 2 int x^(i-1) / sqrt|R| (algebraic weights)."""
    i, j = pair
    lo, hi = sorted((fixture_e[i - 1].real, fixture_e[j - 1].real))
    others = [p.real for m, p in enumerate(fixture_e) if m not in (i - 1, j - 1)]
    J = period_vector(fixture_e, Cycle.branch_pair(i, j), 1e-12).J
    for n in range(5):
        f = lambda x: x**n / np.sqrt(abs(np.prod([x - p for p in others])))
        ref = 2 * integrate.quad(f, lo, hi, weight="alg", wvar=(-0.5, -0.5),
                                 epsabs=0, epsrel=1e-13)[0]
        assert abs(abs(J[n]) - abs(ref)) <= 1e-10 * abs(ref)


def test_real_oval_periods_are_real_or_imaginary(fixture_e, fixture_cycles):
    for c in fixture_cycles:
        J = period_vector(fixture_e, c, 1e-12).J
        small = np.minimum(np.abs(J.real), np.abs(J.imag))
        assert np.all(small <= 1e-12 * np.abs(J))


@pytest.mark.parametrize("sheet", [1, -1])
def test_big_loop_residues(fixture_e, sheet):
    J = big_loop_periods(fixture_e, sheet=sheet).J
    assert np.allclose(J, big_loop_limit(fixture_e, sheet), atol=1e-10)
    assert abs(J[2] - sheet * 2j * np.pi) < 1e-8
    assert abs(J[3] - sheet * 1j * np.pi * 15) < 1e-8


def test_big_loop_radius_independent(fixture_e):
    a = big_loop_periods(fixture_e, radius=13).J
    b = big_loop_periods(fixture_e, radius=40).J
    assert np.allclose(a, b, atol=1e-10)
    with pytest.raises(ClearanceError):
        big_loop_periods(fixture_e, radius=7)


def test_homology_relation(fixture_e):
    pairs = [(1, 2), (3, 4), (5, 6)]
    total = sum(period_vector(fixture_e, c, 1e-12).J for c in consistent_sheets(fixture_e, pairs))
    big = big_loop_periods(fixture_e).J
    assert np.linalg.norm(total - big) <= 1e-9 * np.linalg.norm(big)


@given(st.floats(0.05, 0.6), st.floats(0.1, 0.6))
def test_deformation_invariance(fixture_e, pad, width_frac):
    c = Cycle.branch_pair(4, 5)
    J1 = period_vector(fixture_e, c, 1e-12).J
    st_cycle = stadium(fixture_e, 4, 5, pad=pad, width=width_frac * 0.45, sheet_from=c)
    J2 = period_vector(fixture_e, st_cycle, 1e-12).J
    assert np.linalg.norm(J1 - J2) <= 1e-10 * np.linalg.norm(J1)


def test_orientation_sheet_and_winding(fixture_e):
    c = Cycle.branch_pair(2, 3)
    J = period_vector(fixture_e, c, 1e-12).J
    assert np.allclose(period_vector(fixture_e, c.reversed(), 1e-12).J, -J, atol=1e-13)
    assert np.allclose(period_vector(fixture_e, c.flipped(), 1e-12).J, -J, atol=1e-13)
    assert np.allclose(period_vector(fixture_e, Cycle.branch_pair(2, 3, winding=3), 1e-12).J,
                       3 * J, atol=1e-12)
    assert np.all(period_vector(fixture_e, Cycle.branch_pair(2, 3, winding=0)).J == 0)


def test_odd_enclosure_rejected(fixture_e):
    around_one = Cycle.contour([CircleArc(1.0, 0.3, 0.0, 2 * np.pi)])
    with pytest.raises(ClearanceError):
        period_vector(fixture_e, around_one)


def test_contour_through_branch_point_rejected(fixture_e):
    through = Cycle.contour([CircleArc(1.5, 0.5, 0.0, 2 * np.pi)])
    with pytest.raises(ClearanceError):
        period_vector(fixture_e, through)


def test_ellipse_enclosing_third_point_rejected(fixture_e):
    with pytest.raises(ClearanceError):
        period_vector(fixture_e, Cycle.branch_pair(2, 3, xi=3.0))
    with pytest.raises(ClearanceError):   # e_3 = 2 lies on the segment [1, 4]
        period_vector(fixture_e, Cycle.branch_pair(2, 4))


def test_convergence_failure_reported(fixture_e):
    with pytest.raises(ConvergenceError):
        period_vector(fixture_e, Cycle.branch_pair(1, 2), tol=1e-15, max_nodes=64)


def test_cycle_validation():
    with pytest.raises(ValueError):
        Cycle.branch_pair(1, 1)
    with pytest.raises(ValueError):
        Cycle.branch_pair(0, 7)
    with pytest.raises(ValueError):
        Cycle("branch_pair", pair=(1, 2), sheet=2)
    with pytest.raises(ValueError):
        Cycle.big_loop(-1)


def test_follow_sheet_is_continuous(fixture_e):
    c = Cycle.branch_pair(1, 2)
    moved = fixture_e.copy()
    moved[0] += 1e-3 * (1 + 1j)
    J0 = period_vector(fixture_e, c).J
    J1 = period_vector(moved, follow_sheet(fixture_e, moved, c)).J
    assert np.linalg.norm(J1 - J0) < 1e-2 * np.linalg.norm(J0)


def test_deform_cycle_static_motion(fixture_e):
    c = Cycle.branch_pair(3, 4)
    moved, e_end = deform_cycle(lambda t, prev: fixture_e, c)
    assert np.allclose(e_end, fixture_e)
    J0 = period_vector(fixture_e, c, 1e-12).J
    assert np.allclose(period_vector(e_end, moved, 1e-12).J, J0, rtol=1e-10, atol=1e-10)


def test_deform_cycle_swap_two_points(fixture_e):
    """Half-twist exchanging e_5 and e_6: the (5,6) cycle goes to itself up to sign."""
    c56 = (fixture_e[4] + fixture_e[5]) / 2

    def motion(t, prev):
        e = fixture_e.copy()
        rot = np.exp(1j * np.pi * t)
        e[4] = c56 + (fixture_e[4] - c56) * rot
        e[5] = c56 + (fixture_e[5] - c56) * rot
        return e

    c = Cycle.branch_pair(5, 6)
    moved, e_end = deform_cycle(motion, c)
    J_end = period_vector(e_end, moved, 1e-12).J
    J0 = period_vector(fixture_e, c, 1e-12).J
    assert min(np.linalg.norm(J_end - J0), np.linalg.norm(J_end + J0)) < 1e-9 * np.linalg.norm(J0)
