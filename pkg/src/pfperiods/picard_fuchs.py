"""Connection matrices in the moduli: 2 dJ/dh_1 = U_1 J, 2 dJ/dh_2 = U_2 J.

Two independent constructions:

* :func:`pf_matrices` -- closed form in rho_alpha, h and sigma_i,

      U_1 = sum_alpha  -2 rho_a / (Phi(rho_a) (rho_a-rho_b)^2 (rho_a-rho_g)^2) S_a + L_1
      U_2 = sum_alpha  -2       / (Phi(rho_a) (rho_a-rho_b)^2 (rho_a-rho_g)^2) S_a + L_2

  with S_a = (1, rho_a, ..., rho_a^4)^T (G, D, C, B, A) and
  A = 2, B = rho_a - 3 sigma_1 / 2, C = h_1 - sigma_1 rho_a / 2 + sigma_2,
  D = (-2 rho_a^3 + rho_a^2 sigma_1 + h_2 - h_1 sigma_1 - sigma_3) / 2,
  G = -rho_a Phi(rho_a) + (h_2 rho_a - sigma_3 rho_a - h_2 sigma_1) / 2.

* :func:`pf_from_gm` -- the branch-point matrices M_1, M_2, M_3 combined with
  the inverse Jacobian of (h_3, h_1, h_2) with respect to the roots.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve import CurveSpec, _scale, min_separation
from .errors import DegenerateCurveError, DegenerateModuliError
from .gauss_manin import ConnectionMatrix, gm_matrix

# relative guards on root gaps and on |Phi(rho)|
ROOT_GAP_TOL = 1e-8
PHI_TOL = 1e-8


@dataclass(frozen=True)
class PFSystem:
    U1: ConnectionMatrix
    U2: ConnectionMatrix
    curve: CurveSpec
    route: str


def _checked_roots(curve: CurveSpec, roots=None) -> np.ndarray:
    if roots is None:
        from .curve import _cubic_roots
        rho = _cubic_roots(curve.h1, curve.h2)
    else:
        rho = np.asarray(list(roots), dtype=complex)
    scale = max(_scale(rho), _scale(curve.a))
    if min_separation(rho) < ROOT_GAP_TOL * scale:
        raise DegenerateModuliError(
            f"roots of x^3 + h1 x + h2 nearly coincide (h = {curve.h1}, {curve.h2})")
    phi = np.array([curve.phi(r) for r in rho])
    if np.min(np.abs(phi)) < PHI_TOL * scale**3:
        raise DegenerateCurveError("a root of the cubic coincides with some a_i")
    return rho


def _lower(h1, which) -> np.ndarray:
    L = np.zeros((5, 5), dtype=complex)
    if which == 1:
        L[2, 0] = L[3, 1] = L[4, 2] = -1
        L[3, 0] = L[4, 1] = CurveSpec.h3
        L[4, 0] = h1 - CurveSpec.h3**2
    else:
        L[3, 0] = L[4, 1] = -1
        L[4, 0] = CurveSpec.h3
    return L


def theorem_row(curve: CurveSpec, r: complex) -> np.ndarray:
    """(G, D, C, B, A) at root r, written in sigma_i and h."""
    s1, s2, s3 = curve.sigma
    h1, h2 = curve.h1, curve.h2
    phi = curve.phi(r)
    A = 2.0
    B = r - 1.5 * s1
    C = h1 - 0.5 * s1 * r + s2
    D = 0.5 * (-2 * r**3 + r**2 * s1 + h2 - h1 * s1 - s3)
    G = -r * phi + 0.5 * (h2 * r - s3 * r - h2 * s1)
    return np.array([G, D, C, B, A], dtype=complex)


def pf_matrices(curve: CurveSpec, roots=None) -> PFSystem:
    rho = _checked_roots(curve, roots)
    rank1 = [np.zeros((5, 5), dtype=complex) for _ in range(2)]
    for al in range(3):
        r = rho[al]
        rb, rg = np.delete(rho, al)
        w = -2.0 / (curve.phi(r) * (r - rb) ** 2 * (r - rg) ** 2)
        S = np.outer(r ** np.arange(5), theorem_row(curve, r))
        rank1[0] += r * w * S
        rank1[1] += w * S
    mats = []
    for i in (1, 2):
        L = _lower(curve.h1, i)
        mats.append(ConnectionMatrix(f"U{i}", rank1[i - 1] + L, rank1[i - 1], L))
    return PFSystem(mats[0], mats[1], curve, "theorem-closed-form")


def moduli_jacobian_inverse(rho) -> np.ndarray:
    """3x3 matrix T with (d/dh3, d/dh1, d/dh2)^T = T (d/drho1, d/drho2, d/drho3)^T.

    Rows are ( -rho_a^2 (rho_b - rho_g), -rho_a (rho_b - rho_g), -(rho_b - rho_g) ) / Delta
    over cyclic (a, b, g), Delta = (rho1-rho2)(rho3-rho1)(rho3-rho2), with
    h3 = -(rho1 + rho2 + rho3), h1 = e_2(rho), h2 = -e_3(rho).
    """
    r = np.asarray(list(rho), dtype=complex)
    delta = (r[0] - r[1]) * (r[2] - r[0]) * (r[2] - r[1])
    T = np.zeros((3, 3), dtype=complex)
    for a in range(3):
        b, g = (a + 1) % 3, (a + 2) % 3
        diff = r[b] - r[g]
        T[0, a] = -r[a] ** 2 * diff
        T[1, a] = -r[a] * diff
        T[2, a] = -diff
    return T / delta


def pf_from_gm(curve: CurveSpec, roots=None, with_h3=False):
    """U_1, U_2 by pushing M_1, M_2, M_3 through the inverse Jacobian.

    With ``with_h3`` the (discarded) d/dh3 combination is returned as a
    third value for diagnostics.
    """
    rho = _checked_roots(curve, roots)
    e = np.concatenate([rho, curve.a])
    M = [gm_matrix(e, k).entries for k in (1, 2, 3)]
    T = moduli_jacobian_inverse(rho)
    U3, U1, U2 = (sum(T[row, a] * M[a] for a in range(3)) for row in range(3))
    sys = PFSystem(ConnectionMatrix("U1", U1, U1, np.zeros((5, 5))),
                   ConnectionMatrix("U2", U2, U2, np.zeros((5, 5))),
                   curve, "eqmatrix-transform")
    return (sys, U3) if with_h3 else sys


def route_equivalence(curve: CurveSpec) -> float:
    """max relative entrywise difference between the two constructions."""
    a = pf_matrices(curve)
    b = pf_from_gm(curve)
    out = 0.0
    for x, y in ((a.U1.entries, b.U1.entries), (a.U2.entries, b.U2.entries)):
        out = max(out, float(np.max(np.abs(x - y)) / np.max(np.abs(x))))
    return out


def pf_derivatives(curve: CurveSpec, J) -> tuple[np.ndarray, np.ndarray]:
    """(dJ/dh1, dJ/dh2) = (U_1 J / 2, U_2 J / 2)."""
    sys = pf_matrices(curve)
    J = np.asarray(J, dtype=complex)
    return 0.5 * (sys.U1.entries @ J), 0.5 * (sys.U2.entries @ J)


def verify_root_identities(rho) -> np.ndarray:
    """|sum_cyc rho_a^k (rho_b - rho_g) - closed form| for k = 1..4.

    Closed forms: 0, Delta, -Delta h3, Delta (h3^2 - h1) with
    Delta = (rho1-rho2)(rho3-rho1)(rho3-rho2), h3 = -sum rho, h1 = e_2(rho).
    """
    r1, r2, r3 = (complex(x) for x in rho)
    delta = (r1 - r2) * (r3 - r1) * (r3 - r2)
    h3 = -(r1 + r2 + r3)
    h1 = r1 * r2 + r1 * r3 + r2 * r3
    closed = [0.0, delta, -delta * h3, delta * (h3**2 - h1)]
    out = []
    for k, rhs in zip(range(1, 5), closed):
        lhs = r1**k * (r2 - r3) + r2**k * (r3 - r1) + r3**k * (r1 - r2)
        out.append(abs(lhs - rhs))
    return np.array(out)


# -------------------------------------------------------------- diagnostics

def pf_fd_residuals(curve: CurveSpec, cycle, delta=1e-5, tol=1e-10) -> tuple[float, float]:
    """Relative residuals of (1/2) U_i J against centered FD of oracle periods in h_i."""
    from .oracle import follow_sheet, period_vector

    rho = curve.roots()
    e0 = curve.branch_set(rho)
    J = period_vector(e0, cycle, tol).J
    dJ = pf_derivatives(curve, J)
    out = []
    for i, d in enumerate(dJ):
        dh = np.array([delta, 0]) if i == 0 else np.array([0, delta])
        vals = []
        for sgn in (1, -1):
            c = curve.with_moduli(curve.h1 + sgn * dh[0], curve.h2 + sgn * dh[1])
            e = c.branch_set(rho)
            vals.append(period_vector(e, follow_sheet(e0, e, cycle), tol).J)
        fd = (vals[0] - vals[1]) / (2 * delta)
        out.append(float(np.linalg.norm(d - fd) / np.linalg.norm(J)))
    return out[0], out[1]


def curvature_residual(curve: CurveSpec, step=1e-5) -> float:
    """||d_h2 U1 - d_h1 U2 + (U1 U2 - U2 U1)/2|| / (||U1|| (1 + ||U2||))."""
    def U(h1, h2):
        s = pf_matrices(curve.with_moduli(h1, h2))
        return s.U1.entries, s.U2.entries

    h1, h2 = curve.h1, curve.h2
    U1, U2 = U(h1, h2)
    dU1 = (U(h1, h2 + step)[0] - U(h1, h2 - step)[0]) / (2 * step)
    dU2 = (U(h1 + step, h2)[1] - U(h1 - step, h2)[1]) / (2 * step)
    F = dU1 - dU2 + 0.5 * (U1 @ U2 - U2 @ U1)
    return float(np.linalg.norm(F) / (np.linalg.norm(U1) * (1 + np.linalg.norm(U2))))


def period_rank(curve: CurveSpec, cycles, tol=1e-10):
    """Singular values of the 5 x N matrix of period vectors (diagnostic only)."""
    from .oracle import period_vector

    e = curve.branch_set()
    P = np.column_stack([period_vector(e, c, tol).J for c in cycles])
    s = np.linalg.svd(P, compute_uv=False)
    return int(np.sum(s > 1e-8 * s[0])), s
