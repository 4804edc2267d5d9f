"""Connection matrices in branch-point coordinates: 2 dJ/de_k = M_k J.

    M_k = (2 / R'(e_k)) (1, e_k, ..., e_k^4)^T (G, D, C, B, A) + L(e_k)

with (A, ..., G) from :func:`coefficient_row` and L(e_k) strictly lower
triangular, L[r, c] = e_k^(r-1-c).  The factor 2 on the rank-one part comes
from dividing the exact-differential identity by A_j = R'(e_k)/e_k^j and
integrating: the j-dependent extras R'(e_k)/(2 e_k^j) of b_4, c_3, ..., g_4
are exactly what L collects.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curve import DEGENERACY_TOL, as_points, coefficient_row, delta_row, _scale
from .errors import DegenerateCurveError


@dataclass(frozen=True, eq=False)
class ConnectionMatrix:
    """5x5 connection matrix, kept together with its rank-one + triangular split.

    ``prefactor`` multiplies ``rank1`` (so ``entries = prefactor * rank1 +
    lower``); ``pole`` is the scalar whose vanishing signals a singularity.
    """

    label: str
    entries: np.ndarray = field(repr=False)
    rank1: np.ndarray = field(repr=False)
    lower: np.ndarray = field(repr=False)
    prefactor: complex = 1.0
    pole: complex = 1.0

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __matmul__(self, other):
        return self.entries @ np.asarray(other)

    def reassemble(self) -> np.ndarray:
        return self.prefactor * self.rank1 + self.lower


def lower_template(x) -> np.ndarray:
    """Strictly lower triangular L with L[r, c] = x^(r-1-c)."""
    L = np.zeros((5, 5), dtype=complex)
    for r in range(5):
        for c in range(r):
            L[r, c] = x ** (r - 1 - c)
    return L


def gm_matrix(e, k: int) -> ConnectionMatrix:
    pts = as_points(e)
    ek = complex(pts[k - 1])
    rp = delta_row(pts, k).rprime
    others = np.delete(pts, k - 1)
    if np.min(np.abs(others - ek)) < DEGENERACY_TOL * _scale(pts):
        raise DegenerateCurveError(f"e_{k} collides with another branch point")
    v = ek ** np.arange(5)
    rank1 = np.outer(v, coefficient_row(pts, k).as_row())
    pre = 2.0 / rp
    lower = lower_template(ek)
    return ConnectionMatrix(f"M{k}", pre * rank1 + lower, rank1, lower, pre, rp)


def gm_derivative(e, k: int, J) -> np.ndarray:
    """dJ/de_k = (1/2) M_k J."""
    return 0.5 * (gm_matrix(e, k).entries @ np.asarray(J, dtype=complex))


def gm_fd_residual(e, k: int, cycle, delta=1e-5, tol=1e-10) -> float:
    """||(1/2) M_k J - FD_k(J)|| / ||J|| with centered differences of oracle periods."""
    from .oracle import follow_sheet, period_vector

    pts = as_points(e)
    ek = pts[k - 1]
    J = period_vector(pts, cycle, tol).J
    plus = pts.copy(); plus[k - 1] = ek + delta
    minus = pts.copy(); minus[k - 1] = ek - delta
    Jp = period_vector(plus, follow_sheet(pts, plus, cycle), tol).J
    Jm = period_vector(minus, follow_sheet(pts, minus, cycle), tol).J
    fd = (Jp - Jm) / (2 * delta)
    return float(np.linalg.norm(gm_derivative(pts, k, J) - fd) / np.linalg.norm(J))
