"""The family of genus-2 curves  w^2 = (x-a1)(x-a2)(x-a3)(x^3 + h1 x + h2).

Branch points are indexed 1..6 throughout the public API (``k`` in
``delta_row``, ``coefficient_row``, ``gm_matrix``), matching the usual
mathematical labelling e_1..e_6.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateCurveError, DegenerateModuliError, RootTrackingError

# a curve is degenerate when min |e_i - e_j| < DEGENERACY_TOL * max |e_i|
DEGENERACY_TOL = 1e-10
AMBIGUITY_TOL = 1e-9


def _scale(points) -> float:
    s = float(np.max(np.abs(points))) if len(points) else 0.0
    return s if s > 0 else 1.0


def min_separation(points) -> float:
    """Smallest pairwise distance among ``points``."""
    p = np.asarray(points, dtype=complex)
    diff = np.abs(p[:, None] - p[None, :])
    diff[np.diag_indices(len(p))] = np.inf
    return float(diff.min())


@dataclass(frozen=True)
class RootTriple:
    """Roots of the depressed cubic, re-centred so that they sum to zero."""

    rho1: complex
    rho2: complex
    rho3: complex

    def __post_init__(self):
        r = np.array([self.rho1, self.rho2, self.rho3], dtype=complex)
        r = r - r.sum() / 3
        for name, v in zip(("rho1", "rho2", "rho3"), r):
            object.__setattr__(self, name, complex(v))

    @property
    def array(self) -> np.ndarray:
        return np.array([self.rho1, self.rho2, self.rho3], dtype=complex)

    def __iter__(self):
        return iter((self.rho1, self.rho2, self.rho3))


@dataclass(frozen=True)
class CurveSpec:
    """Fixed points ``a`` and moduli ``(h1, h2)``.

    >>> c = CurveSpec((4, 5, 6), -7, 6)
    >>> [float(round(z.real, 12)) for z in c.branch_set().points]
    [-3.0, 1.0, 2.0, 4.0, 5.0, 6.0]
    """

    a: tuple
    h1: complex
    h2: complex

    def __post_init__(self):
        a = tuple(complex(x) for x in self.a)
        if len(a) != 3:
            raise ValueError("need exactly three fixed branch points a1, a2, a3")
        if min_separation(a) <= DEGENERACY_TOL * _scale(a):
            raise DegenerateCurveError(f"fixed points are not distinct: {a}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "h1", complex(self.h1))
        object.__setattr__(self, "h2", complex(self.h2))

    @property
    def sigma(self) -> tuple[complex, complex, complex]:
        """Elementary symmetric functions (sigma1, sigma2, sigma3) of a1, a2, a3."""
        a1, a2, a3 = self.a
        return a1 + a2 + a3, a1 * a2 + a1 * a3 + a2 * a3, a1 * a2 * a3

    # h3 = -(rho1 + rho2 + rho3) is identically zero on this family
    h3 = 0.0

    def phi(self, x):
        """Phi(x) = (x-a1)(x-a2)(x-a3)."""
        a1, a2, a3 = self.a
        return (x - a1) * (x - a2) * (x - a3)

    def R(self, x):
        return self.phi(x) * (x**3 + self.h1 * x + self.h2)

    def with_moduli(self, h1, h2) -> "CurveSpec":
        return CurveSpec(self.a, h1, h2)

    def roots(self, hint: RootTriple | None = None) -> RootTriple:
        return roots_from_moduli(self.h1, self.h2, hint)

    def branch_set(self, hint: RootTriple | None = None) -> "BranchSet":
        return branch_set(self, hint)

    def is_degenerate(self) -> bool:
        pts = np.concatenate([_cubic_roots(self.h1, self.h2), self.a])
        return min_separation(pts) < DEGENERACY_TOL * _scale(pts)


@dataclass(frozen=True, eq=False)
class BranchSet:
    """Ordered list of the six branch points; position k (1-based) is e_k."""

    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.array(self.points, dtype=complex).reshape(-1)
        if p.shape != (6,):
            raise ValueError("a branch set has exactly six points")
        if not np.all(np.isfinite(p)):
            raise ValueError("branch points must be finite")
        if min_separation(p) < DEGENERACY_TOL * _scale(p):
            raise DegenerateCurveError(f"branch points not pairwise distinct: {p}")
        p.setflags(write=False)
        object.__setattr__(self, "points", p)

    def __repr__(self):
        return f"BranchSet({list(self.points)})"

    def __getitem__(self, k):
        return self.points[k]

    def __len__(self):
        return 6

    def e(self, k: int) -> complex:
        """Branch point e_k, 1-based."""
        _check_index(k)
        return complex(self.points[k - 1])

    def R(self, x):
        x = np.asarray(x, dtype=complex)
        out = np.ones_like(x)
        for p in self.points:
            out = out * (x - p)
        return out

    def scale(self) -> float:
        return _scale(self.points)

    def replace(self, k: int, value) -> "BranchSet":
        _check_index(k)
        p = self.points.copy()
        p[k - 1] = value
        return BranchSet(p)


def as_points(e) -> np.ndarray:
    if isinstance(e, BranchSet):
        return e.points
    if isinstance(e, CurveSpec):
        return e.branch_set().points
    return BranchSet(e).points


def _check_index(k):
    if not (isinstance(k, (int, np.integer)) and 1 <= k <= 6):
        raise IndexError(f"branch index must be in 1..6, got {k!r}")


# ---------------------------------------------------------------- moduli/roots

def moduli_from_roots(rho) -> tuple[complex, complex]:
    """(h1, h2) with x^3 + h1 x + h2 = (x - rho1)(x - rho2)(x - rho3)."""
    r1, r2, r3 = (complex(x) for x in rho)
    return r1 * r2 + r1 * r3 + r2 * r3, -r1 * r2 * r3


def _cubic_roots(h1, h2) -> np.ndarray:
    """Roots of z^3 + h1 z + h2, closed form plus one Newton step, unordered."""
    p, q = complex(h1), complex(h2)
    d0 = -3 * p
    d1 = 27 * q
    s = np.sqrt(complex(d1 * d1 - 4 * d0**3))
    # pick the sign that avoids cancellation
    big = d1 + s if abs(d1 + s) >= abs(d1 - s) else d1 - s
    if big == 0:
        return np.zeros(3, dtype=complex)
    C = (big / 2) ** (1 / 3)
    xi = np.exp(2j * np.pi * np.arange(3) / 3)
    Ck = xi * C
    z = -(Ck + d0 / Ck) / 3
    f = z**3 + p * z + q
    fp = 3 * z**2 + p
    ok = np.abs(fp) > 1e-300
    z[ok] -= f[ok] / fp[ok]
    return z - z.sum() / 3


def cubic_discriminant(h1, h2) -> complex:
    return -4 * complex(h1) ** 3 - 27 * complex(h2) ** 2


def canonical_order(z) -> np.ndarray:
    """Sort lexicographically by (real, imag)."""
    z = np.asarray(z, dtype=complex)
    return z[np.lexsort((z.imag, z.real))]


def match_to_hint(z, hint, tol=AMBIGUITY_TOL) -> np.ndarray:
    """Permute ``z`` to follow ``hint`` by minimal total displacement.

    Raises RootTrackingError when the best and second-best assignments are
    indistinguishable (within ``tol`` relative to the scale of the roots).
    """
    z = np.asarray(z, dtype=complex)
    hint = np.asarray(hint, dtype=complex)
    costs = []
    for perm in itertools.permutations(range(len(z))):
        costs.append((float(np.sum(np.abs(z[list(perm)] - hint))), perm))
    costs.sort(key=lambda c: c[0])
    best, second = costs[0], costs[1]
    scale = max(_scale(z), _scale(hint))
    if second[0] - best[0] < tol * scale:
        raise RootTrackingError("ambiguous root matching against hint")
    return z[list(best[1])]


def roots_from_moduli(h1, h2, hint: RootTriple | None = None) -> RootTriple:
    """Roots of x^3 + h1 x + h2.

    Canonical (real, imag) lexicographic order without ``hint``; with a hint
    the roots are matched to it by nearest-neighbour assignment, which is how
    roots are carried continuously along a path.
    """
    z = _cubic_roots(h1, h2)
    scale = _scale(z)
    if min_separation(z) < DEGENERACY_TOL * scale or np.max(np.abs(z)) == 0:
        raise DegenerateModuliError(
            f"cubic x^3 + ({h1})x + ({h2}) has a repeated root "
            f"(discriminant {cubic_discriminant(h1, h2)})"
        )
    if hint is None:
        z = canonical_order(z)
    else:
        z = match_to_hint(z, np.asarray(list(hint), dtype=complex))
    return RootTriple(*z)


def branch_set(curve: CurveSpec, hint: RootTriple | None = None) -> BranchSet:
    """(rho1, rho2, rho3, a1, a2, a3); fails for degenerate curves."""
    rho = roots_from_moduli(curve.h1, curve.h2, hint)
    return BranchSet(np.concatenate([rho.array, curve.a]))


# ------------------------------------------------------------- coefficients

@dataclass(frozen=True)
class DeltaRow:
    """Coefficients of R(x)/(x - e_k) = x^5 + d1 x^4 + ... + d5, and R'(e_k)."""

    delta: np.ndarray
    rprime: complex

    @property
    def delta1(self):
        return self.delta[0]

    @property
    def delta5(self):
        return self.delta[4]


@dataclass(frozen=True)
class CoefficientRow:
    A: complex
    B: complex
    C: complex
    D: complex
    G: complex

    def as_row(self) -> np.ndarray:
        """Ordered to act on (J1, ..., J5): (G, D, C, B, A)."""
        return np.array([self.G, self.D, self.C, self.B, self.A], dtype=complex)


def delta_row(e, k: int) -> DeltaRow:
    pts = as_points(e)
    _check_index(k)
    ek = pts[k - 1]
    others = np.delete(pts, k - 1)
    coeffs = np.array([1.0 + 0j])
    for x in others:
        coeffs = np.convolve(coeffs, [1.0, -x])
    rprime = complex(np.prod(ek - others))
    return DeltaRow(delta=coeffs[1:], rprime=rprime)


def coefficient_row(e, k: int) -> CoefficientRow:
    pts = as_points(e)
    ek = complex(pts[k - 1])
    d1, d2, d3 = delta_row(pts, k).delta[:3]
    return CoefficientRow(
        A=2.0,
        B=-0.5 * (ek - 3 * d1),
        C=-0.5 * (ek**2 + ek * d1 - 2 * d2),
        D=-0.5 * (ek**3 + ek**2 * d1 + ek * d2 - d3),
        G=-0.5 * (ek**4 + ek**3 * d1 + ek**2 * d2 + ek * d3),
    )


def discriminant(curve_or_points) -> complex:
    """prod_{i<j} (e_i - e_j)^2 over the six branch points (zero iff degenerate)."""
    if isinstance(curve_or_points, CurveSpec):
        pts = np.concatenate([_cubic_roots(curve_or_points.h1, curve_or_points.h2),
                              curve_or_points.a])
    elif isinstance(curve_or_points, BranchSet):
        pts = curve_or_points.points
    else:
        pts = np.asarray(curve_or_points, dtype=complex)
    out = 1.0 + 0j
    for i, j in itertools.combinations(range(len(pts)), 2):
        out *= (pts[i] - pts[j]) ** 2
    return complex(out)
