"""Genus-1 baseline: complete elliptic integrals and their Legendre equations.

    K(k)    = \\int_0^1 dz / sqrt((1-z^2)(1-k^2 z^2))
    Ebar(k) = \\int_0^1 z^2 dz / sqrt((1-z^2)(1-k^2 z^2))

(Ebar = (K - E)/k^2 in terms of the canonical second-kind integral E).
They satisfy the first-order system

    dK/dk    = k (K - Ebar) / (1 - k^2)
    dEbar/dk = (K - (2 - k^2) Ebar) / (k (1 - k^2))

(from dK/dk = (E - (1-k^2) K)/(k(1-k^2)), dE/dk = (E - K)/k), and K solves
the Legendre-type hypergeometric equation

    k (1 - k^2) y'' + (1 - 3 k^2) y' - k y = 0.

The variants with the coefficients ``(k^2 K - Ebar)/(k(1-k^2))``,
``k(K - Ebar)/(1-k^2)`` and ``k(1-k^2) y'' - (1+k^2) y' + k y`` that are
sometimes quoted do not hold; they are kept as ``form="printed"`` for
diagnostics only.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DegenerateCurveError

SINGULAR_TOL = 1e-10


@dataclass(frozen=True)
class EllipticModulus:
    """Modulus k with |k| < 1, away from the singular points -1, 0, 1."""

    k: complex
    allow_zero: bool = False

    def __post_init__(self):
        k = complex(self.k)
        if not np.isfinite(k):
            raise ValueError("modulus must be finite")
        if abs(k) >= 1 or min(abs(k - 1), abs(k + 1)) < SINGULAR_TOL:
            raise DegenerateCurveError(f"modulus {k} outside |k| < 1 or too close to +-1")
        if not self.allow_zero and abs(k) < SINGULAR_TOL:
            raise DegenerateCurveError("modulus too close to the singular point 0")
        object.__setattr__(self, "k", k)


def _theta_integral(k, weight, tol=1e-15, max_nodes=2**16):
    """\\int_0^{pi/2} weight(theta) / sqrt(1 - k^2 sin^2 theta) dtheta.

    z = sin(theta) removes the endpoint singularity.  The integrand is even
    and pi-periodic, so the midpoint rule over a period converges
    geometrically; the node count is doubled until successive values agree.
    """
    k = EllipticModulus(k, allow_zero=True).k
    prev = None
    n = 16
    while n <= max_nodes:
        th = (np.arange(n) + 0.5) * np.pi / n
        s2 = np.sin(th) ** 2
        val = np.pi / n * np.sum(weight(s2) / np.sqrt(1 - k * k * s2)) / 2
        if prev is not None and abs(val - prev) <= tol * abs(val):
            return complex(val)
        prev = val
        n *= 2
    raise ConvergenceError(f"quadrature for k={k} did not converge")


def K_complete(k) -> complex:
    return _theta_integral(k, lambda s2: np.ones_like(s2))


def Ebar_complete(k) -> complex:
    return _theta_integral(k, lambda s2: s2)


def agm(a, b, tol=1e-16):
    """Arithmetic-geometric mean and the sequence of c_n = (a_n - b_n)/2."""
    a, b = complex(a), complex(b)
    cs = []
    for _ in range(64):
        if abs(a - b) <= tol * abs(a):
            break
        a, b, c = (a + b) / 2, np.sqrt(a * b), (a - b) / 2
        cs.append(c)
    return a, cs


def K_agm(k) -> complex:
    """Independent oracle K = pi / (2 AGM(1, sqrt(1-k^2)))."""
    k = complex(k)
    return np.pi / (2 * agm(1, np.sqrt(1 - k * k))[0])


def E_agm(k) -> complex:
    """Canonical E(k) = K (1 - sum_n 2^(n-1) c_n^2), c_0 = k."""
    k = complex(k)
    M, cs = agm(1, np.sqrt(1 - k * k))
    s = 0.5 * k * k + sum(2.0 ** n * c * c for n, c in enumerate(cs, start=1)) / 2
    return np.pi / (2 * M) * (1 - s)


def legendre_rhs(k, K, Ebar, form="standard"):
    """Right-hand side (dK/dk, dEbar/dk) of the first-order system."""
    k = complex(k)
    if form == "printed":
        return (k * k * K - Ebar) / (k * (1 - k * k)), k * (K - Ebar) / (1 - k * k)
    return k * (K - Ebar) / (1 - k * k), (K - (2 - k * k) * Ebar) / (k * (1 - k * k))


def scaled_step(k, delta) -> float:
    """delta * min(1, 2 (1 - |k|)): keeps FD truncation bounded as k -> 1.

    Derivatives of K grow like (1 - k)^(-n) near the singular point k = 1, so
    a fixed step loses O(delta^2) accuracy there; shrinking it in proportion
    to the distance keeps the truncation error uniform.
    """
    return float(delta * min(1.0, 2 * (1 - abs(complex(k)))))


def legendre_system_residual(k, delta=1e-5, form="standard") -> tuple[float, float]:
    """|centred FD - right-hand side| for dK/dk and dEbar/dk."""
    k = EllipticModulus(k).k
    for kk in (k - delta, k + delta):
        EllipticModulus(kk)
    dK = (K_complete(k + delta) - K_complete(k - delta)) / (2 * delta)
    dE = (Ebar_complete(k + delta) - Ebar_complete(k - delta)) / (2 * delta)
    fK, fE = legendre_rhs(k, K_complete(k), Ebar_complete(k), form)
    return float(abs(dK - fK)), float(abs(dE - fE))


def hyper_residual(k, delta=1e-4, form="standard") -> float:
    """|k(1-k^2) K'' + (1-3k^2) K' - k K| with centred second differences."""
    k = EllipticModulus(k).k
    for kk in (k - delta, k + delta):
        EllipticModulus(kk)
    Km, K0, Kp = (K_complete(k + s * delta) for s in (-1, 0, 1))
    d1 = (Kp - Km) / (2 * delta)
    d2 = (Kp - 2 * K0 + Km) / delta**2
    if form == "printed":
        return float(abs(k * (1 - k * k) * d2 - (1 + k * k) * d1 + k * K0))
    return float(abs(k * (1 - k * k) * d2 + (1 - 3 * k * k) * d1 - k * K0))


def hypergeometric_series(k, terms=200) -> complex:
    """(pi/2) 2F1(1/2, 1/2; 1; k^2) by partial sums."""
    k2 = complex(k) ** 2
    term, total = 1.0 + 0j, 0j
    for m in range(terms):
        total += term
        term *= ((m + 0.5) / (m + 1)) ** 2 * k2
    return np.pi / 2 * total
