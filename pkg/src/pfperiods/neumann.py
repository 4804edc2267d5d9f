"""Generalised Neumann system on S^2 with a quartic separable potential (n=3, N=2).

Elliptic (spheroconical) coordinates lambda_1, lambda_2 on the unit sphere:

    x_i^2 = (a_i - lambda_1)(a_i - lambda_2) / prod_{j != i} (a_i - a_j),

and the action variables are periods of the genus-2 curve
w^2 = (x-a1)(x-a2)(x-a3)(x^3 + h1 x + h2):

    J_act = (1 / 2 pi) \\oint (x^3 + h1 x + h2) dx / w = (J4 + h1 J2 + h2 J1) / (2 pi).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curve import CurveSpec
from .oracle import Cycle, contour_integral, follow_sheet, period_vector
from .picard_fuchs import pf_matrices

UNIT_TOL = 1e-12


@dataclass(frozen=True)
class NeumannConfig:
    """Constants a1 < a2 < a3, a point x on the unit sphere and a momentum y."""

    a: tuple
    x: tuple
    y: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        x = np.asarray(self.x, dtype=float)
        if a.shape != (3,) or x.shape != (3,) or np.shape(self.y) != (3,):
            raise ValueError("a, x and y must have three components")
        if not (a[0] < a[1] < a[2]):
            raise ValueError("need a1 < a2 < a3")
        if abs(x @ x - 1) > UNIT_TOL:
            raise ValueError("x must lie on the unit sphere")

    def energy(self) -> float:
        return hamiltonian_classical(self.x, self.y, self.a)

    def potential(self) -> float:
        return quartic_potential(self.x, self.a)

    def elliptic(self) -> "EllipticPoint":
        return elliptic_coordinates(self.x, self.a)


class EllipticPoint(tuple):
    """(lambda1, lambda2) with a ``boundary`` flag (x on a coordinate plane)."""

    boundary: bool

    def __new__(cls, l1, l2, boundary=False):
        obj = super().__new__(cls, (l1, l2))
        obj.boundary = bool(boundary)
        return obj


def _denominators(a):
    a = np.asarray(a)
    return np.array([(a[i] - a[(i + 1) % 3]) * (a[i] - a[(i + 2) % 3]) for i in range(3)])


def cartesian_squares(lambda1, lambda2, a) -> np.ndarray:
    """(x1^2, x2^2, x3^2) from elliptic coordinates; sums to 1 identically."""
    a = np.asarray(a)
    return (a - lambda1) * (a - lambda2) / _denominators(a)


def elliptic_coordinates(x, a) -> EllipticPoint:
    """Roots lambda1 <= lambda2 of sum_i x_i^2 / (a_i - lambda) = 0.

    For real x and a1 < a2 < a3 the roots interlace a1 <= l1 <= a2 <= l2 <= a3;
    they are clipped into those brackets, which only removes rounding.
    """
    x2 = np.asarray(x) ** 2
    a = np.asarray(a)
    S = a.sum()
    P = np.array([a[(i + 1) % 3] * a[(i + 2) % 3] for i in range(3)])
    # sum_i x_i^2 prod_{j != i} (a_j - l) = c2 l^2 + c1 l + c0
    c2 = x2.sum()
    c1 = -(x2 * (S - a)).sum()
    c0 = (x2 * P).sum()
    disc = np.sqrt(complex(c1 * c1 - 4 * c2 * c0))
    q = -0.5 * (c1 + (disc if (np.conj(c1) * disc).real >= 0 else -disc))
    r1, r2 = q / c2, (c0 / q if q != 0 else q / c2)
    boundary = bool(np.min(np.abs(x2)) < 1e-28)
    real = np.isrealobj(x) and np.isrealobj(a)
    if real:
        l1, l2 = sorted((r1.real, r2.real))
        l1 = float(np.clip(l1, a[0], a[1]))
        l2 = float(np.clip(l2, a[1], a[2]))
        return EllipticPoint(l1, l2, boundary)
    l1, l2 = sorted((complex(r1), complex(r2)), key=lambda z: (z.real, z.imag))
    return EllipticPoint(l1, l2, boundary)


def hamiltonian_classical(x, y, a) -> float:
    """(1/2)(|y|^2 |x|^2 - <y, x>^2) + (1/2) <x, A x>."""
    x, y, a = (np.asarray(v) for v in (x, y, a))
    return 0.5 * ((y @ y) * (x @ x) - (y @ x) ** 2) + 0.5 * (x @ (a * x))


def quartic_potential(x, a) -> float:
    """U(x) = <x,Ax>^2 - 2 Tr A <x,Ax> - <x, A* x>, A* = det A . A^{-1}."""
    x, a = np.asarray(x), np.asarray(a)
    ax = x @ (a * x)
    astar = np.array([a[1] * a[2], a[0] * a[2], a[0] * a[1]])
    return ax**2 - 2 * a.sum() * ax - x @ (astar * x)


def potential_difference(x, a) -> float:
    """U(x) minus the elliptic-coordinate form l1^2 + l1 l2 + l2^2 (diagnostic)."""
    l1, l2 = elliptic_coordinates(x, a)
    return quartic_potential(x, a) - (l1**2 + l1 * l2 + l2**2)


# -------------------------------------------------------------------- actions

@dataclass
class ActionResult:
    actions: np.ndarray
    cycles: list
    h: tuple
    direct: np.ndarray = field(repr=False)
    combination: np.ndarray = field(repr=False)
    route_agreement: float = 0.0
    imag: np.ndarray | None = field(default=None, repr=False)


def action_integrals(curve: CurveSpec, cycles, tol=1e-12) -> ActionResult:
    """Actions by (i) direct quadrature of P(x)/w and (ii) (J4 + h1 J2 + h2 J1)/(2 pi).

    ``actions`` holds route (ii); ``route_agreement`` is the largest relative
    difference between the routes (absolute when the action vanishes).
    """
    e = curve.branch_set().points
    h1, h2 = curve.h1, curve.h2

    def P_over_w(lam, w):
        return ((lam**3 + h1 * lam + h2) / w)[None, :]

    direct, comb = [], []
    for cyc in cycles:
        direct.append(contour_integral(e, cyc, P_over_w, tol)[0][0] / (2 * np.pi))
        J = period_vector(e, cyc, tol).J
        comb.append((J[3] + h1 * J[1] + h2 * J[0]) / (2 * np.pi))
    direct, comb = np.array(direct), np.array(comb)
    denom = np.maximum(np.abs(comb), 1.0)
    agree = float(np.max(np.abs(direct - comb) / denom)) if len(comb) else 0.0
    return ActionResult(actions=comb, cycles=list(cycles), h=(h1, h2), direct=direct,
                        combination=comb, route_agreement=agree, imag=np.abs(comb.imag))


def action_derivatives(curve: CurveSpec, cycles, tol=1e-12) -> tuple[np.ndarray, np.ndarray]:
    """(dJ_act/dh1, dJ_act/dh2) per cycle from the Picard-Fuchs system."""
    e = curve.branch_set().points
    sys = pf_matrices(curve)
    h1, h2 = curve.h1, curve.h2
    d1, d2 = [], []
    for cyc in cycles:
        J = period_vector(e, cyc, tol).J
        g1 = 0.5 * (sys.U1.entries @ J)
        g2 = 0.5 * (sys.U2.entries @ J)
        d1.append((g1[3] + J[1] + h1 * g1[1] + h2 * g1[0]) / (2 * np.pi))
        d2.append((g2[3] + h1 * g2[1] + J[0] + h2 * g2[0]) / (2 * np.pi))
    return np.array(d1), np.array(d2)


def action_fd(curve: CurveSpec, cycles, delta=1e-5, tol=1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Centred finite differences of the actions in h1 and h2 (oracle side)."""
    rho = curve.roots()
    e0 = curve.branch_set(rho).points
    out = []
    for dh in ((delta, 0), (0, delta)):
        vals = []
        for sgn in (1, -1):
            c = curve.with_moduli(curve.h1 + sgn * dh[0], curve.h2 + sgn * dh[1])
            e = c.branch_set(rho).points
            moved = [follow_sheet(e0, e, cyc) for cyc in cycles]
            vals.append(np.array([_action_at(c, e, cyc, tol) for cyc in moved]))
        out.append((vals[0] - vals[1]) / (2 * delta))
    return out[0], out[1]


def _action_at(curve, e, cyc: Cycle, tol):
    J = period_vector(e, cyc, tol).J
    return (J[3] + curve.h1 * J[1] + curve.h2 * J[0]) / (2 * np.pi)
