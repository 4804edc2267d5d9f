"""Periods J_i = \\oint x^(i-1) dx / w by direct contour quadrature.

This module is the ground truth the connection matrices are checked against,
so it depends on nothing but the branch points.  The square root w is never
taken from a global cut system: it is continued sample to sample along the
contour, starting from a sheet choice at the contour's basepoint.

Sheet convention: at the basepoint ``z0`` of a contour, ``sheet = s`` means
``w(z0) = s * ref_sqrt(R(z0))``.  ``ref_sqrt`` is the principal root with its
cut rotated off the real axis, so real curves never sit on it.  For big loops
``s`` instead fixes the behaviour at infinity, ``w ~ s x^3``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .curve import BranchSet, CurveSpec, as_points, _scale
from .errors import ClearanceError, ConvergenceError

_REF_ANGLE = 0.5
DEFAULT_XI = float(np.arccosh(1.2))  # semi-major axis 1.2 x half the focal distance
DEFAULT_CLEARANCE = 1e-6
MAX_NODES = 2**20
_PHASE_LIMIT = np.pi / 4


def ref_sqrt(z):
    """Square root with the branch cut along arg z = 0.5 - pi (off the real axis)."""
    z = np.asarray(z, dtype=complex)
    return np.sqrt(z * np.exp(-1j * _REF_ANGLE)) * np.exp(0.5j * _REF_ANGLE)


# ------------------------------------------------------------------ contours

@dataclass(frozen=True)
class Line:
    z0: complex
    z1: complex

    def point(self, s):
        return self.z0 + (self.z1 - self.z0) * s

    def deriv(self, s):
        return np.full_like(np.asarray(s, dtype=complex), self.z1 - self.z0)

    @property
    def start(self):
        return complex(self.z0)

    def reversed(self):
        return Line(self.z1, self.z0)


@dataclass(frozen=True)
class CircleArc:
    center: complex
    radius: float
    theta0: float
    theta1: float

    def point(self, s):
        th = self.theta0 + (self.theta1 - self.theta0) * s
        return self.center + self.radius * np.exp(1j * th)

    def deriv(self, s):
        th = self.theta0 + (self.theta1 - self.theta0) * s
        return 1j * (self.theta1 - self.theta0) * self.radius * np.exp(1j * th)

    @property
    def start(self):
        return complex(self.point(0.0))

    def reversed(self):
        return CircleArc(self.center, self.radius, self.theta1, self.theta0)


@dataclass(frozen=True)
class Cycle:
    """A closed contour in the x-plane together with a sheet choice.

    kinds
      ``branch_pair``      confocal ellipse around e_i, e_j (``pair`` is 1-based)
      ``big_loop``         circle |x| = radius enclosing every branch point
      ``explicit_contour`` closed chain of :class:`Line` / :class:`CircleArc`
    """

    kind: str
    pair: tuple | None = None
    winding: int = 1
    sheet: int = 1
    radius: float | None = None
    arcs: tuple = field(default=(), repr=False)
    xi: float | None = None

    def __post_init__(self):
        if self.kind not in ("branch_pair", "big_loop", "explicit_contour"):
            raise ValueError(f"unknown cycle kind {self.kind!r}")
        if self.sheet not in (1, -1):
            raise ValueError("sheet must be +1 or -1")
        if self.kind == "branch_pair":
            i, j = self.pair
            if i == j or not (1 <= i <= 6 and 1 <= j <= 6):
                raise ValueError(f"bad branch pair {self.pair}")
        if self.kind == "big_loop" and not (self.radius and self.radius > 0):
            raise ValueError("big_loop needs a positive radius")
        if self.kind == "explicit_contour":
            if not self.arcs:
                raise ValueError("explicit contour needs at least one arc")
            end = complex(self.arcs[-1].point(1.0))
            if abs(end - self.arcs[0].start) > 1e-12 * max(1.0, abs(end)):
                raise ValueError("explicit contour is not closed")

    @classmethod
    def branch_pair(cls, i, j, winding=1, sheet=1, xi=None):
        return cls("branch_pair", pair=(int(i), int(j)), winding=winding, sheet=sheet, xi=xi)

    @classmethod
    def big_loop(cls, radius, sheet=1, winding=1):
        return cls("big_loop", radius=float(radius), sheet=sheet, winding=winding)

    @classmethod
    def contour(cls, arcs, sheet=1, winding=1):
        return cls("explicit_contour", arcs=tuple(arcs), sheet=sheet, winding=winding)

    def reversed(self) -> "Cycle":
        if self.kind == "explicit_contour":
            arcs = tuple(a.reversed() for a in reversed(self.arcs))
            return replace(self, arcs=arcs)
        return replace(self, winding=-self.winding)

    def with_sheet(self, sheet) -> "Cycle":
        return replace(self, sheet=int(sheet))

    def flipped(self) -> "Cycle":
        return replace(self, sheet=-self.sheet)


@dataclass(frozen=True)
class PeriodVector:
    """(J1, ..., J5) over one cycle, with the achieved error bound."""

    J: np.ndarray
    err: float = 0.0
    tol: float = 0.0
    nodes: int = 0

    def __array__(self, dtype=None, copy=None):
        return self.J if dtype is None else self.J.astype(dtype)

    def __iter__(self):
        return iter(self.J)

    def __getitem__(self, i):
        return self.J[i]


# ----------------------------------------------------------- ellipse geometry

def pair_ellipse(e, i, j, xi=None, clearance=DEFAULT_CLEARANCE):
    """(center, half focal vector, xi) of the confocal ellipse around e_i, e_j.

    The ellipse is x = c + d cosh(xi + i theta).  ``xi`` defaults to the 20%
    padded ellipse and is clipped to half the elliptic coordinate of the
    nearest other branch point.
    """
    pts = as_points(e)
    ei, ej = pts[i - 1], pts[j - 1]
    c = (ei + ej) / 2
    d = (ej - ei) / 2
    others = np.delete(pts, [i - 1, j - 1])
    xi_other = np.arccosh((others - c) / d).real
    scale = _scale(pts)
    if np.min(xi_other) < 1e-8:
        raise ClearanceError(f"branch point lies on the segment between e_{i} and e_{j}")
    if xi is None:
        xi = min(DEFAULT_XI, 0.5 * float(np.min(xi_other)))
    elif xi >= float(np.min(xi_other)):
        raise ClearanceError(f"ellipse around e_{i}, e_{j} encloses another branch point")
    if abs(d) * (np.cosh(xi) - 1) < clearance * scale:
        raise ClearanceError("ellipse passes within clearance of its own foci")
    return c, d, xi


def _pair_params(pts, cycle, clearance):
    i, j = cycle.pair
    c, d, xi = pair_ellipse(pts, i, j, cycle.xi, clearance)
    pt = lambda th: c + d * np.cosh(xi + 1j * th)
    dpt = lambda th: 1j * d * np.sinh(xi + 1j * th)
    return pt, dpt


def basepoint(e, cycle, clearance=DEFAULT_CLEARANCE) -> complex:
    pts = as_points(e)
    if cycle.kind == "branch_pair":
        return complex(_pair_params(pts, cycle, clearance)[0](0.0))
    if cycle.kind == "big_loop":
        return complex(cycle.radius)
    return cycle.arcs[0].start


def start_value(e, cycle, clearance=DEFAULT_CLEARANCE) -> complex:
    """w at the basepoint of ``cycle`` on its chosen sheet."""
    pts = as_points(e)
    z0 = basepoint(pts, cycle, clearance)
    if cycle.kind == "big_loop":
        return complex(cycle.sheet * z0**3 * np.prod(np.sqrt(1 - pts / z0)))
    R0 = np.prod(z0 - pts)
    return complex(cycle.sheet * ref_sqrt(R0))


def _R(pts, x):
    out = np.ones_like(x)
    for p in pts:
        out = out * (x - p)
    return out


# ---------------------------------------------------------------- discretize

def _gauss(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1) / 2, w / 2


def _nodes(pts, cycle, n, clearance):
    """Nodes in traversal order and weights so that sum f(x_m) wt_m ~ \\oint f dx."""
    if cycle.kind in ("branch_pair", "big_loop"):
        th = 2 * np.pi * np.arange(n) / n
        if cycle.kind == "branch_pair":
            pt, dpt = _pair_params(pts, cycle, clearance)
            lam, dl = pt(th), dpt(th)
        else:
            r = cycle.radius
            if r <= 2 * np.max(np.abs(pts)):
                raise ClearanceError("big loop radius must exceed 2 max|e_i|")
            lam = r * np.exp(1j * th)
            dl = 1j * lam
        return lam, dl * (2 * np.pi / n)
    s, w = _gauss(n)
    lam = np.concatenate([a.point(s) for a in cycle.arcs])
    dl = np.concatenate([a.deriv(s) * w for a in cycle.arcs])
    return lam, dl


def _track(seq, R, w0):
    """Continue sqrt(R) along ``seq`` from w0; returns (w, max phase step)."""
    p = np.sqrt(R)
    s0 = 1.0 if abs(w0 - p[0]) <= abs(w0 + p[0]) else -1.0
    step = np.sign((p[1:] * np.conj(p[:-1])).real)
    step[step == 0] = 1.0
    signs = np.concatenate([[s0], s0 * np.cumprod(step)])
    w = p * signs
    ratio = w[1:] / w[:-1]
    max_phase = float(np.max(np.abs(np.angle(ratio)))) if len(ratio) else 0.0
    return w, max_phase


def track_sqrt(contour: Callable, e, n=64, w_start=None, sheet=1, max_nodes=MAX_NODES,
               clearance=DEFAULT_CLEARANCE):
    """Sample w along a closed contour with continuous argument.

    ``contour`` maps t in [0, 1] (vectorised) to points in the x-plane, with
    contour(0) == contour(1).  Sampling is doubled until consecutive samples
    differ in phase by less than pi/4.  Returns ``(t, w)`` including the
    closing sample at t = 1.
    """
    pts = as_points(e)
    scale = _scale(pts)
    while n <= max_nodes:
        t = np.linspace(0.0, 1.0, n + 1)
        lam = np.asarray(contour(t), dtype=complex)
        dist = np.min(np.abs(lam[:, None] - pts[None, :]))
        if dist < clearance * scale:
            raise ClearanceError(f"contour passes within {dist:.3g} of a branch point")
        R = _R(pts, lam)
        w0 = sheet * ref_sqrt(R[0]) if w_start is None else w_start
        w, phase = _track(lam, R, w0)
        if phase < _PHASE_LIMIT:
            return t, w
        n *= 2
    raise ConvergenceError("could not resolve the phase of w along the contour")


def _check_clearance(pts, lam, clearance):
    dist = float(np.min(np.abs(lam[:, None] - pts[None, :])))
    if dist < clearance * _scale(pts):
        raise ClearanceError(f"contour passes within {dist:.3g} of a branch point")


def contour_integral(e, cycle: Cycle, integrand, tol=1e-10, max_nodes=MAX_NODES,
                     clearance=DEFAULT_CLEARANCE, n0=None):
    """\\oint integrand(x, w) dx over ``cycle`` with node doubling.

    ``integrand`` returns an array of shape (m, N) for N nodes.  Returns
    ``(values, err, nodes)`` with err <= tol * (1 + |value|) componentwise.
    """
    pts = as_points(e)
    probe = integrand(np.array([1.0 + 0.5j]), np.array([1.0 + 0j]))
    m = np.asarray(probe).shape[0]
    if cycle.winding == 0:
        return np.zeros(m, dtype=complex), 0.0, 0
    per_arc = cycle.kind == "explicit_contour"
    n = n0 or (8 if per_arc else 32)
    narcs = len(cycle.arcs) if per_arc else 1
    z0 = basepoint(pts, cycle, clearance)
    w_start = start_value(pts, cycle, clearance)
    prev = None
    while n * narcs <= max_nodes:
        lam, dl = _nodes(pts, cycle, n, clearance)
        _check_clearance(pts, lam, clearance)
        seq = np.concatenate([[z0], lam, [z0]])
        w, phase = _track(seq, _R(pts, seq), w_start)
        if abs(w[-1] - w_start) > 1e-6 * abs(w_start):
            if phase < _PHASE_LIMIT:
                raise ClearanceError(
                    "contour does not lift to a closed cycle (it encloses an odd "
                    "number of branch points)")
            prev = None
            n *= 2
            continue
        vals = np.asarray(integrand(lam, w[1:-1]), dtype=complex) @ dl
        if phase < _PHASE_LIMIT and prev is not None:
            diff = float(np.max(np.abs(vals - prev) / (1 + np.abs(vals))))
            if diff < tol:
                return cycle.winding * vals, abs(cycle.winding) * diff, n * narcs
        prev = vals if phase < _PHASE_LIMIT else None
        n *= 2
    raise ConvergenceError(f"quadrature did not reach tol={tol} within {max_nodes} nodes")


def _powers(lam, w):
    return lam[None, :] ** np.arange(5)[:, None] / w[None, :]


def period_vector(e, cycle: Cycle, tol=1e-10, max_nodes=MAX_NODES,
                  clearance=DEFAULT_CLEARANCE) -> PeriodVector:
    """J_i = \\oint x^(i-1) dx / w, i = 1..5."""
    vals, err, nodes = contour_integral(e, cycle, _powers, tol, max_nodes, clearance)
    return PeriodVector(J=vals, err=err, tol=tol, nodes=nodes)


def big_loop_periods(e, radius=None, sheet=1, tol=1e-12) -> PeriodVector:
    """Periods over the circle |x| = radius (default 3 max|e|), sheet w ~ sheet x^3."""
    pts = as_points(e)
    if radius is None:
        radius = 3 * float(np.max(np.abs(pts)))
    if radius <= 2 * np.max(np.abs(pts)):
        raise ClearanceError("big loop radius must exceed 2 max|e_i|")
    return period_vector(pts, Cycle.big_loop(radius, sheet), tol)


def big_loop_limit(e, sheet=1) -> np.ndarray:
    """Residues at infinity: (0, 0, 2 pi i, pi i S1, (pi i / 4)(3 S1^2 - 4 S2)) times sheet."""
    pts = as_points(e)
    S1 = pts.sum()
    S2 = sum(pts[i] * pts[j] for i in range(6) for j in range(i + 1, 6))
    return sheet * np.array([0, 0, 2j * np.pi, 1j * np.pi * S1,
                             0.25j * np.pi * (3 * S1**2 - 4 * S2)])


def exactness_check(e, cycle: Cycle, k: int, tol=1e-12) -> float:
    """|\\oint d(w / (x - e_k))|, which vanishes for every closed cycle."""
    pts = as_points(e)
    ek = pts[k - 1]

    def dF(lam, w):
        logd = 0.5 * np.sum(1 / (lam[:, None] - pts[None, :]), axis=1) - 1 / (lam - ek)
        return (w / (lam - ek) * logd)[None, :]

    vals, _, _ = contour_integral(pts, cycle, dF, tol)
    return float(abs(vals[0]))


# ----------------------------------------------------------- sheet handling

def continue_sqrt(e_from, e_to, z_from, z_to, w_from, n=64, max_n=2**16):
    """Continue w from (e_from, z_from) to (e_to, z_to) along the straight homotopy."""
    a, b = as_points(e_from), np.asarray(as_points(e_to))
    while n <= max_n:
        s = np.linspace(0, 1, n + 1)
        z = z_from + (z_to - z_from) * s
        R = np.prod(z[:, None] - ((1 - s)[:, None] * a[None, :] + s[:, None] * b[None, :]), axis=1)
        w, phase = _track(z, R, w_from)
        if phase < _PHASE_LIMIT:
            return complex(w[-1])
        n *= 2
    raise ConvergenceError("could not continue w between basepoints")


def follow_sheet(e_old, e_new, cycle: Cycle) -> Cycle:
    """Sheet of ``cycle`` on ``e_new`` continuing its sheet on ``e_old``.

    Used when the branch points move slightly (finite differences) so that
    the period vector varies continuously.
    """
    if cycle.kind == "big_loop":
        return cycle
    z_old = basepoint(e_old, cycle)
    z_new = basepoint(e_new, cycle)
    w_old = start_value(e_old, cycle)
    w_new = continue_sqrt(e_old, e_new, z_old, z_new, w_old)
    ref = ref_sqrt(np.prod(z_new - as_points(e_new)))
    return cycle.with_sheet(1 if abs(w_new - ref) <= abs(w_new + ref) else -1)


def sheet_from_value(e, cycle: Cycle, w_target) -> Cycle:
    ref = start_value(e, cycle.with_sheet(1))
    return cycle.with_sheet(1 if abs(w_target - ref) <= abs(w_target + ref) else -1)


def cut_branch(e, pairs, x):
    """w on the cut plane with cuts along the segments [e_i, e_j] of ``pairs``.

    Normalised so that w ~ x^3 at infinity; single valued off the cuts.
    """
    pts = as_points(e)
    x = np.asarray(x, dtype=complex)
    out = np.ones_like(x)
    for i, j in pairs:
        c = (pts[i - 1] + pts[j - 1]) / 2
        d = (pts[j - 1] - pts[i - 1]) / 2
        out = out * (x - c) * np.sqrt(1 - (d / (x - c)) ** 2)
    return out


def consistent_sheets(e, pairs):
    """Branch-pair cycles on the sheet of :func:`cut_branch` (sheet +1 at infinity).

    With these sheets the pair cycles sum to the positively oriented big loop.
    """
    pts = as_points(e)
    out = []
    for i, j in pairs:
        cyc = Cycle.branch_pair(i, j)
        z0 = basepoint(pts, cyc)
        out.append(sheet_from_value(pts, cyc, cut_branch(pts, pairs, z0)))
    return out


def stadium(e, i, j, pad=0.2, width=None, sheet_from: Cycle | None = None):
    """Stadium (two segments, two half circles) around e_i, e_j.

    If ``sheet_from`` is a branch_pair cycle on the same pair, the stadium's
    sheet is chosen by continuing w from that cycle's basepoint, so the two
    contours represent the same homology class.
    """
    pts = as_points(e)
    ei, ej = pts[i - 1], pts[j - 1]
    u = (ej - ei) / abs(ej - ei)
    half = abs(ej - ei) / 2
    r = width if width is not None else 0.5 * pad * half
    c = (ei + ej) / 2
    L = half * (1 + pad) - r
    ang = np.angle(u)
    p1, p2 = c + u * L, c - u * L
    arcs = [
        CircleArc(p1, r, ang - np.pi / 2, ang + np.pi / 2),
        Line(p1 + 1j * u * r, p2 + 1j * u * r),
        CircleArc(p2, r, ang + np.pi / 2, ang + 3 * np.pi / 2),
        Line(p2 - 1j * u * r, p1 - 1j * u * r),
    ]
    # start at the far end on the major axis, like the ellipse
    first = CircleArc(p1, r, ang, ang + np.pi / 2)
    last = CircleArc(p1, r, ang - np.pi / 2, ang)
    arcs = [first] + arcs[1:] + [last]
    cyc = Cycle.contour(arcs)
    if sheet_from is not None:
        z_old = basepoint(pts, sheet_from)
        w_old = start_value(pts, sheet_from)
        w_new = continue_sqrt(pts, pts, z_old, cyc.arcs[0].start, w_old)
        cyc = sheet_from_value(pts, cyc, w_new)
    return cyc


# ------------------------------------------------------ contour deformation

def winding_numbers(verts, pts):
    """Winding number of the closed polygon ``verts`` around each of ``pts``."""
    v = np.asarray(verts)
    d = v[None, :] - np.asarray(pts)[:, None]
    ang = np.angle(np.roll(d, -1, axis=1) / d)
    return np.rint(ang.sum(axis=1) / (2 * np.pi)).astype(int)


def cycle_polygon(e, cycle: Cycle, nverts=96):
    """Closed polygon (vertex 0 = basepoint, last vertex != first) tracing ``cycle``."""
    pts = as_points(e)
    if cycle.kind == "branch_pair":
        pt, _ = _pair_params(pts, cycle, DEFAULT_CLEARANCE)
        return pt(2 * np.pi * np.arange(nverts) / nverts)
    if cycle.kind == "big_loop":
        return cycle.radius * np.exp(2j * np.pi * np.arange(nverts) / nverts)
    per = max(2, nverts // len(cycle.arcs))
    s = np.arange(per) / per
    return np.concatenate([a.point(s) for a in cycle.arcs])


def _shepard(x, pts, disp):
    d2 = np.abs(x[:, None] - pts[None, :]) ** 2
    wts = 1.0 / np.maximum(d2, 1e-300)
    return (wts @ disp) / wts.sum(axis=1)


def _refine(verts, pts, ratio=0.3):
    nxt = np.roll(verts, -1)
    mid = (verts + nxt) / 2
    seg = np.abs(nxt - verts)
    dist = np.min(np.abs(mid[:, None] - pts[None, :]), axis=1)
    need = seg > ratio * dist
    if not need.any():
        return verts
    out = []
    for v, m, flag in zip(verts, mid, need):
        out.append(v)
        if flag:
            out.append(m)
    return _refine(np.array(out), pts, ratio)


def deform_cycle(branch_at: Callable, cycle: Cycle, nverts=96, nsteps=200,
                 max_vertices=50000, min_dt=1e-9) -> tuple[Cycle, np.ndarray]:
    """Carry ``cycle`` along a continuous motion of the branch points.

    ``branch_at(t, prev)`` returns the six branch points at t in [0, 1] (in a
    fixed labelling, ``prev`` being the previously accepted points, usable as
    a tracking hint).  The contour is represented as a polygon whose vertices
    are pushed by an inverse-distance-weighted interpolation of the branch
    point displacements; the winding number around every branch point is
    held fixed, so the result is isotopic to the input.  Returns the deformed
    cycle (an explicit polygon on the final branch points) and those points.
    """
    e = np.asarray(branch_at(0.0, None), dtype=complex)
    verts = _refine(cycle_polygon(e, cycle, nverts), e)
    w0 = start_value(e, cycle)
    wind0 = winding_numbers(verts, e)
    t, dt = 0.0, 1.0 / nsteps
    while t < 1.0:
        dt = min(dt, 1.0 - t)
        if dt < min_dt:
            raise ClearanceError("contour deformation stalled near a singularity", param=t)
        e_new = np.asarray(branch_at(t + dt, e), dtype=complex)
        disp = e_new - e
        dmin = float(np.min(np.abs(verts[:, None] - e[None, :])))
        sep = float(np.min(np.abs(e[:, None] - e[None, :]) + np.eye(6) * 1e300))
        if np.max(np.abs(disp)) > 0.1 * min(dmin, sep):
            dt /= 2
            continue
        v_new = verts + _shepard(verts, e, disp)
        w_cand = np.sqrt(np.prod(v_new[0] - e_new))
        if abs(w_cand + w0) < abs(w_cand - w0):
            w_cand = -w_cand
        if abs(np.angle(w_cand / w0)) > _PHASE_LIMIT or \
                np.any(winding_numbers(v_new, e_new) != wind0):
            dt /= 2
            continue
        verts = _refine(v_new, e_new)
        if len(verts) > max_vertices:
            raise ConvergenceError("deformed contour needs too many vertices")
        e, w0, t = e_new, w_cand, t + dt
        dt = min(dt * 1.5, 4.0 / nsteps)
    closed = np.append(verts, verts[0])
    arcs = tuple(Line(complex(a), complex(b)) for a, b in zip(closed[:-1], closed[1:]))
    out = Cycle.contour(arcs, winding=cycle.winding)
    return sheet_from_value(e, out, w0), e
