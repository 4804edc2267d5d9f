"""Verification suite: each acceptance property as a reusable, timed check.

Every check compares a formula-side quantity against an independent oracle
(contour quadrature, finite differences, exact rationals, AGM) and reports
``value`` against ``threshold``.  Random inputs come from an explicit seed.
"""
from __future__ import annotations

import functools
import inspect
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .curve import CurveSpec, _scale, min_separation
from .errors import ClearanceError, DegenerateCurveError
from .gauss_manin import gm_fd_residual
from .legendre import (K_agm, K_complete, hyper_residual, legendre_system_residual,
                       scaled_step)
from .neumann import (action_derivatives, action_fd, action_integrals, cartesian_squares,
                      elliptic_coordinates)
from .oracle import (Cycle, big_loop_periods, consistent_sheets, exactness_check, pair_ellipse,
                     period_vector, stadium)
from .picard_fuchs import (curvature_residual, pf_fd_residuals, route_equivalence,
                           verify_root_identities)
from .transport import (h_circle, h_polyline, monodromy, oracle_endpoint, propagate)

FIXTURE = CurveSpec((4.0, 5.0, 6.0), -7.0, 6.0)
# double root of x^3 + h1 x + 6 at x = 3^(1/3)
DISCRIMINANT_H1 = -3 * 3 ** (2 / 3)
TRANSPORT_PATH = ((-7.0, 6.0), (-6.5 + 0.5j, 6.0), (-6.0, 6.0))


@dataclass
class Check:
    name: str
    value: float
    threshold: float
    op: str = "<="

    def __post_init__(self):
        self.value = float(self.value) if self.value is not None else float("nan")
        self.threshold = float(self.threshold)

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.value):
            return False
        return bool(self.value <= self.threshold if self.op == "<="
                    else self.value > self.threshold)

    def as_dict(self):
        return {"value": self.value, "threshold": self.threshold, "op": self.op,
                "pass": self.passed}


@dataclass
class CriterionReport:
    number: int
    title: str
    budget: float
    checks: list = field(default_factory=list)
    runtime: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and self.runtime < self.budget

    def as_dict(self):
        return {"criterion": self.number, "title": self.title, "pass": self.passed,
                "runtime_s": round(self.runtime, 3), "budget_s": self.budget,
                "checks": {c.name: c.as_dict() for c in self.checks}}


def _timed(number, title, budget):
    def deco(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            rep = CriterionReport(number, title, budget)
            t0 = time.perf_counter()
            rep.checks = fn(*args, **kwargs)
            rep.runtime = time.perf_counter() - t0
            return rep
        return run
    return deco


# ---------------------------------------------------------------- fixtures

def sorted_pair_cycles(e, count=5):
    """Branch-pair cycles on consecutive points of the sorted branch set.

    Pairs whose confocal ellipse would enclose a third point are skipped and
    replaced by further pairs in sorted order.
    """
    pts = np.asarray(e, dtype=complex)
    order = np.lexsort((pts.imag, pts.real))
    cands = [(order[m], order[m + 1]) for m in range(5)]
    cands += [(order[i], order[j]) for i in range(6) for j in range(i + 2, 6)]
    out = []
    for i, j in cands:
        try:
            pair_ellipse(pts, int(i) + 1, int(j) + 1)
        except ClearanceError:
            continue
        out.append(Cycle.branch_pair(int(i) + 1, int(j) + 1))
        if len(out) == count:
            break
    return out


def random_curves(rng, n, min_gap=0.15):
    """Random complex curves whose branch points are well separated."""
    out = []
    while len(out) < n:
        a = rng.uniform(-3, 3, 3) + 1j * rng.uniform(-3, 3, 3)
        h1, h2 = rng.uniform(-6, 6, 2) + 1j * rng.uniform(-6, 6, 2)
        try:
            c = CurveSpec(tuple(a), h1, h2)
            e = c.branch_set().points
        except DegenerateCurveError:
            continue
        if min_separation(e) >= min_gap * _scale(e) and len(sorted_pair_cycles(e, 3)) == 3:
            out.append(c)
    return out


def random_moduli(rng, n, a=(4.0, 5.0, 6.0), min_gap=0.05):
    out = []
    while len(out) < n:
        h1, h2 = rng.uniform(-10, 10, 2) + 1j * rng.uniform(-10, 10, 2)
        try:
            c = CurveSpec(a, h1, h2)
            e = c.branch_set().points
        except DegenerateCurveError:
            continue
        if min_separation(e) >= min_gap * _scale(e):
            out.append(c)
    return out


def _curve_set(seed, n_random):
    rng = np.random.default_rng(seed)
    curves = [(FIXTURE, sorted_pair_cycles(FIXTURE.branch_set().points))]
    for c in random_curves(rng, n_random):
        curves.append((c, sorted_pair_cycles(c.branch_set().points, 3)))
    return curves


# ---------------------------------------------------------------- criteria

@_timed(1, "Gauss-Manin matrices vs finite differences of oracle periods", 30.0)
def criterion_1(seed=0, n_random=10, delta=1e-5, tol=1e-10):
    worst = 0.0
    for curve, cycles in _curve_set(seed, n_random):
        e = curve.branch_set().points
        for cyc in cycles:
            for k in range(1, 7):
                worst = max(worst, gm_fd_residual(e, k, cyc, delta, tol))
    return [Check("max ||M_k J/2 - FD_k|| / ||J||", worst, 1e-5)]


@_timed(2, "Picard-Fuchs matrices vs FD; route equivalence", 30.0)
def criterion_2(seed=0, n_random=10, delta=1e-5, tol=1e-10):
    fd, route = 0.0, 0.0
    for curve, cycles in _curve_set(seed, n_random):
        route = max(route, route_equivalence(curve))
        for cyc in cycles:
            fd = max(fd, *pf_fd_residuals(curve, cyc, delta, tol))
    return [Check("max ||U_i J/2 - FD_h_i|| / ||J||", fd, 1e-5),
            Check("route equivalence (relative)", route, 1e-12)]


@_timed(3, "Zero-curvature residual", 10.0)
def criterion_3(seed=0, n=20):
    rng = np.random.default_rng(seed + 1)
    worst = max(curvature_residual(c) for c in random_moduli(rng, n))
    return [Check("max normalized curvature", worst, 1e-4)]


@_timed(4, "Transport vs oracle, h1: -7 -> -6 (h2 = 6) via complex detour", 20.0)
def criterion_4(tol=1e-11):
    path = h_polyline(*TRANSPORT_PATH)
    e0 = FIXTURE.branch_set().points
    worst = 0.0
    for pair in ((1, 2), (3, 4), (5, 6)):
        cyc = Cycle.branch_pair(*pair)
        J0 = period_vector(e0, cyc, 1e-12).J
        J1 = propagate(FIXTURE, path, J0, tol).J_end
        Jo = oracle_endpoint(FIXTURE, path, cyc, 1e-12).J
        worst = max(worst, float(np.max(np.abs(J1 - Jo) / np.abs(Jo))))
    return [Check("max componentwise relative endpoint error", worst, 1e-7)]


def discriminant_loop(turns=1, radius=0.3):
    return h_circle((DISCRIMINANT_H1, 6.0), radius, turns=turns, phase=np.pi)


@_timed(5, "Monodromy: trivial, squared, around the discriminant", 60.0)
def criterion_5(tol=1e-12):
    I = np.eye(5)
    triv = monodromy(FIXTURE, h_circle((-7.0, 6.0), 0.2), tol, oracle=False)
    once = monodromy(FIXTURE, discriminant_loop(1), tol)
    twice = monodromy(FIXTURE, discriminant_loop(2), tol, oracle=False)
    M2 = once.M @ once.M
    return [
        Check("contractible ||M - I||", float(np.linalg.norm(triv.M - I)), 1e-8),
        Check("||M(loop^2) - M^2|| / ||M^2||",
              float(np.linalg.norm(twice.M - M2) / np.linalg.norm(M2)), 1e-7),
        Check("discriminant loop ||M - I||", float(np.linalg.norm(once.M - I)), 1e-3, ">"),
        Check("Liouville determinant residual", once.liouville_residual, 1e-8),
        Check("oracle (deformed cycles) residual", once.residual_vs_oracle, 1e-8),
    ]


def _exact_root_identities(r):
    r1, r2, r3 = r
    delta = (r1 - r2) * (r3 - r1) * (r3 - r2)
    h3 = -(r1 + r2 + r3)
    h1 = r1 * r2 + r1 * r3 + r2 * r3
    closed = [0, delta, -delta * h3, delta * (h3 ** 2 - h1)]
    lhs = [r1 ** k * (r2 - r3) + r2 ** k * (r3 - r1) + r3 ** k * (r1 - r2) for k in range(1, 5)]
    return lhs, closed


@_timed(6, "Root identities", 1.0)
def criterion_6(seed=0):
    rng = np.random.default_rng(seed + 2)
    worst = 0.0
    for _ in range(100):
        z = rng.normal(size=3) + 1j * rng.normal(size=3)
        z -= z.mean()
        worst = max(worst, float(np.max(verify_root_identities(z))))
    exact_bad, float_vs_exact = 0, 0.0
    for _ in range(10):
        p = [Fraction(int(rng.integers(-50, 51)), int(rng.integers(1, 20))) for _ in range(2)]
        r = (p[0], p[1], -p[0] - p[1])
        lhs, closed = _exact_root_identities(r)
        exact_bad += sum(a != b for a, b in zip(lhs, closed))
        fl = verify_root_identities([float(x) for x in r])
        scale = max(1.0, max(abs(float(x)) for x in r)) ** 6
        float_vs_exact = max(float_vs_exact, float(np.max(fl)) / scale)
    return [Check("max |identity residual| (random zero-sum)", worst, 1e-12),
            Check("exact-rational identity failures", float(exact_bad), 0.0),
            Check("float vs exact (scaled)", float_vs_exact, 1e-12)]


@_timed(7, "Big-loop residues", 5.0)
def criterion_7():
    e = FIXTURE.branch_set().points
    s1 = float(np.real(sum(FIXTURE.a)))
    err3, err4 = 0.0, 0.0
    for sheet in (1, -1):
        J = big_loop_periods(e, sheet=sheet).J
        err3 = max(err3, abs(J[2] - sheet * 2j * np.pi))
        err4 = max(err4, abs(J[3] - sheet * 1j * np.pi * s1))
    return [Check("|J3 - (+-)2 pi i|", err3, 1e-8),
            Check("|J4 - (+-)pi i sigma1|", err4, 1e-8)]


LEGENDRE_GRID = np.linspace(0.05, 0.95, 20)


@_timed(8, "Legendre baseline", 5.0)
def criterion_8():
    kerr = abs(K_complete(0.5) - 1.685750354812596)
    agm = max(abs(K_complete(k) - K_agm(k)) for k in LEGENDRE_GRID)
    sysr = max(max(legendre_system_residual(k, scaled_step(k, 1e-5))) for k in LEGENDRE_GRID)
    hyp = max(hyper_residual(k, scaled_step(k, 1e-4)) for k in LEGENDRE_GRID)
    return [Check("|K(0.5) - AGM value|", kerr, 1e-11),
            Check("grid max |K - K_agm|", agm, 1e-11),
            Check("grid max first-order system residual", sysr, 1e-8),
            Check("grid max hypergeometric residual", hyp, 1e-6)]


@_timed(9, "Neumann system", 20.0)
def criterion_9(seed=0, samples=10_000):
    cycles = sorted_pair_cycles(FIXTURE.branch_set().points)
    act = action_integrals(FIXTURE, cycles)
    d = action_derivatives(FIXTURE, cycles)
    f = action_fd(FIXTURE, cycles)
    der = max(float(np.max(np.abs(x - y) / np.maximum(np.abs(x), 1e-300))) for x, y in zip(d, f))
    rng = np.random.default_rng(seed + 3)
    a = np.array([4.0, 5.0, 6.0])
    lam = rng.uniform(0, 10, size=(samples, 2))
    sums = np.abs(cartesian_squares(lam[:, :1], lam[:, 1:], a).sum(axis=1) - 1)
    x = rng.normal(size=(samples, 3))
    x /= np.linalg.norm(x, axis=1)[:, None]
    bad = 0
    for xi in x:
        l1, l2 = elliptic_coordinates(xi, a)
        bad += not (a[0] <= l1 <= a[1] <= l2 <= a[2])
    return [Check("action route (i)/(ii) agreement", act.route_agreement, 1e-10),
            Check("action derivatives vs FD", der, 1e-6),
            Check("max |sum x_i^2 - 1|", float(sums.max()), 1e-13),
            Check("interlacing violations", float(bad), 0.0)]


@_timed(10, "Oracle self-tests", 20.0)
def criterion_10():
    e = FIXTURE.branch_set().points
    cycles = sorted_pair_cycles(e)
    exact = max(exactness_check(e, c, k) for c in cycles for k in range(1, 7))
    deform = 0.0
    for c in cycles:
        J1 = period_vector(e, c, 1e-12).J
        J2 = period_vector(e, stadium(e, *c.pair, sheet_from=c), 1e-12).J
        deform = max(deform, float(np.linalg.norm(J1 - J2) / np.linalg.norm(J1)))
    pairs = [(1, 2), (3, 4), (5, 6)]
    total = sum(period_vector(e, c, 1e-12).J for c in consistent_sheets(e, pairs))
    big = big_loop_periods(e).J
    hom = float(np.linalg.norm(total - big) / np.linalg.norm(big))
    return [Check("max exactness residual", exact, 1e-10),
            Check("ellipse vs stadium (relative)", deform, 1e-10),
            Check("pair cycles sum vs big loop (relative)", hom, 1e-9)]


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10)


def run_all(seed=0, only=None):
    reports = []
    for fn in CRITERIA:
        if only and fn.__name__ not in only:
            continue
        kwargs = {"seed": seed} if "seed" in inspect.signature(fn).parameters else {}
        reports.append(fn(**kwargs))
    return reports


def curve_checks(curve: CurveSpec, tol=1e-10, delta=1e-5):
    """Curve-specific subset of the suite, for ``verify --input``."""
    e = curve.branch_set().points
    cycles = sorted_pair_cycles(e, 3)
    gm = max(gm_fd_residual(e, k, c, delta, tol) for c in cycles for k in range(1, 7))
    pf = max(max(pf_fd_residuals(curve, c, delta, tol)) for c in cycles)
    exact = max(exactness_check(e, c, k) for c in cycles for k in range(1, 7))
    J = big_loop_periods(e).J
    s1 = complex(sum(curve.a))
    residue = max(abs(J[2] - 2j * np.pi), abs(J[3] - 1j * np.pi * s1))
    return [Check("max GM FD residual", gm, 1e-5),
            Check("max PF FD residual", pf, 1e-5),
            Check("route equivalence", route_equivalence(curve), 1e-12),
            Check("curvature residual", curvature_residual(curve), 1e-4),
            Check("root identities", float(np.max(verify_root_identities(curve.roots().array))),
                  1e-12 * max(1.0, float(np.max(np.abs(e)))) ** 6),
            Check("max exactness residual", exact, 1e-10),
            Check("big-loop residues J3, J4", residue, 1e-8 * max(1.0, abs(s1)))]
