"""Transport of period vectors along paths in moduli space, and monodromy.

Along a path t -> h(t) the periods satisfy

    dJ/dt = (1/2) (U_1 h1'(t) + U_2 h2'(t)) J

(or (1/2) M_k e_k'(t) J for a path moving one branch point), which is
integrated with an embedded Dormand-Prince 5(4) pair.

Monodromy convention: ``M`` maps the period vector at the basepoint to its
continuation around the loop, J_after = M J_before.  Hence the loop "A then
B" has monodromy M(B) @ M(A).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .curve import (BranchSet, CurveSpec, RootTriple, _cubic_roots, _scale, canonical_order,
                    cubic_discriminant, discriminant, match_to_hint, min_separation)
from .errors import ClearanceError, SingularityError
from .gauss_manin import gm_matrix
from .oracle import Cycle, deform_cycle, pair_ellipse, period_vector
from .picard_fuchs import pf_matrices

PATH_CLEARANCE = 1e-6
STEP_FLOOR = 1e-12


# -------------------------------------------------------------------- paths

@dataclass(frozen=True)
class LineSegment:
    start: np.ndarray
    end: np.ndarray

    def point(self, t):
        return self.start + (self.end - self.start) * t

    def deriv(self, t):
        return self.end - self.start


@dataclass(frozen=True)
class CircleSegment:
    """center + radius * direction * exp(i (phase + 2 pi turns t))."""

    center: np.ndarray
    radius: float
    turns: int = 1
    direction: np.ndarray | None = None
    phase: float = 0.0

    def _dir(self):
        if self.direction is not None:
            return np.asarray(self.direction, dtype=complex)
        d = np.zeros(len(self.center), dtype=complex)
        d[0] = 1
        return d

    def point(self, t):
        return self.center + self.radius * self._dir() * np.exp(
            1j * (self.phase + 2 * np.pi * self.turns * t))

    def deriv(self, t):
        return (2j * np.pi * self.turns * self.radius * self._dir()
                * np.exp(1j * (self.phase + 2 * np.pi * self.turns * t)))


@dataclass(frozen=True)
class ModuliPath:
    """Chain of analytic segments, each parameterised by t in [0, 1].

    ``space='h'``: points are (h1, h2).  ``space='e'``: points are the single
    coordinate e_``index`` (1-based) of a branch set whose other entries stay
    fixed.
    """

    space: str
    segments: tuple
    closed: bool = False
    index: int | None = None

    def __post_init__(self):
        if self.space not in ("h", "e"):
            raise ValueError("space must be 'h' or 'e'")
        if self.space == "e" and not (self.index and 1 <= self.index <= 6):
            raise ValueError("e-space paths need an index in 1..6")
        if not self.segments:
            raise ValueError("a path needs at least one segment")
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        for a, b in zip(segs[:-1], segs[1:]):
            pa, pb = np.asarray(a.point(1.0)), np.asarray(b.point(0.0))
            if np.max(np.abs(pa - pb)) > 1e-12 * max(1.0, np.max(np.abs(pa))):
                raise ValueError("path segments are not chained continuously")
        if self.closed:
            s, e = self.start, self.end
            if np.max(np.abs(s - e)) > 1e-14 * max(1.0, np.max(np.abs(s))) * 100:
                raise ValueError("closed path does not return to its start point")

    @property
    def start(self) -> np.ndarray:
        return np.asarray(self.segments[0].point(0.0), dtype=complex)

    @property
    def end(self) -> np.ndarray:
        return np.asarray(self.segments[-1].point(1.0), dtype=complex)

    def point(self, T):
        """Point at global parameter T in [0, 1]."""
        n = len(self.segments)
        s = min(int(T * n), n - 1)
        return np.asarray(self.segments[s].point(T * n - s), dtype=complex)

    def then(self, other: "ModuliPath") -> "ModuliPath":
        return ModuliPath(self.space, self.segments + other.segments,
                          self.closed and other.closed, self.index)

    def reversed(self) -> "ModuliPath":
        segs = []
        for s in reversed(self.segments):
            if isinstance(s, LineSegment):
                segs.append(LineSegment(s.end, s.start))
            else:
                end_phase = s.phase + 2 * np.pi * s.turns
                segs.append(CircleSegment(s.center, s.radius, -s.turns, s.direction, end_phase))
        return ModuliPath(self.space, tuple(segs), self.closed, self.index)


def line(start, end) -> LineSegment:
    return LineSegment(np.atleast_1d(np.asarray(start, dtype=complex)),
                       np.atleast_1d(np.asarray(end, dtype=complex)))


def h_line(h_from, h_to) -> ModuliPath:
    return ModuliPath("h", (line(h_from, h_to),))


def h_polyline(*points) -> ModuliPath:
    return ModuliPath("h", tuple(line(a, b) for a, b in zip(points[:-1], points[1:])))


def h_circle(center, radius, turns=1, direction=(1, 0), phase=0.0) -> ModuliPath:
    seg = CircleSegment(np.asarray(center, dtype=complex), float(radius), int(turns),
                        np.asarray(direction, dtype=complex), float(phase))
    return ModuliPath("h", (seg,), closed=True)


# ----------------------------------------------------------- branch motion

class _Family:
    """Evaluates branch points and the connection along a path."""

    def __init__(self, family, path: ModuliPath):
        self.path = path
        if path.space == "h":
            if not isinstance(family, CurveSpec):
                raise TypeError("h-space paths need a CurveSpec (for a1, a2, a3)")
            self.curve = family
            self.a = np.array(family.a)
        else:
            self.base = (family.branch_set() if isinstance(family, CurveSpec)
                         else BranchSet(family)).points.copy()

    def points(self, p, hint=None) -> np.ndarray:
        """Branch points at path point ``p`` (unvalidated; may be degenerate)."""
        if self.path.space == "h":
            rho = _cubic_roots(p[0], p[1])
            rho = canonical_order(rho) if hint is None else match_to_hint(rho, hint[:3])
            return np.concatenate([rho, self.a])
        e = self.base.copy()
        e[self.path.index - 1] = p[0]
        return e

    def generator(self, p, dp, roots=None) -> np.ndarray:
        """A with dJ/dt = A J."""
        if self.path.space == "h":
            sys = pf_matrices(self.curve.with_moduli(p[0], p[1]), roots)
            return 0.5 * (sys.U1.entries * dp[0] + sys.U2.entries * dp[1])
        e = self.points(p)
        return 0.5 * gm_matrix(e, self.path.index).entries * dp[0]


def _rel_separation(e) -> float:
    return min_separation(e) / _scale(e)


@dataclass(frozen=True)
class PathSafety:
    min_discriminant: float
    min_separation: float
    t_min: float


def _vanishing_factors(fam: _Family):
    """Functions of a path point that vanish linearly where branch points collide."""
    if fam.path.space == "h":
        fs = [lambda p: cubic_discriminant(p[0], p[1])]
        fs += [lambda p, a=a: a**3 + p[0] * a + p[1] for a in fam.a]
        return fs
    k = fam.path.index - 1
    return [lambda p, x=x: p[0] - x for j, x in enumerate(fam.base) if j != k]


def _complex_zero(g, t0, iters=30):
    """Newton iteration for a zero of the analytic function g near t0 (complex t)."""
    t = complex(t0)
    for _ in range(iters):
        d = 1e-6
        dg = (g(t + d) - g(t - d)) / (2 * d)
        if dg == 0:
            break
        step = g(t) / dg
        t -= step
        if abs(step) < 1e-16 or abs(t) > 10:
            break
    return t


def path_safety(path: ModuliPath, family, clearance=PATH_CLEARANCE, samples=129) -> PathSafety:
    """Minimum over the path of |discriminant| and of the relative branch-point gap.

    The gap min|e_i - e_j| / max|e_i| is what is compared with ``clearance``.
    Because the gap has a square-root cusp at a double root, candidate
    minima are located by minimising the polynomial factors of the
    discriminant (which vanish linearly), then the gap is evaluated there.
    """
    fam = _Family(family, path)
    n = len(path.segments)
    best_sep, best_t, min_disc = np.inf, 0.0, np.inf
    ts = np.linspace(0.0, 1.0, samples)
    for s, seg in enumerate(path.segments):
        def sep(t):
            return _rel_separation(fam.points(seg.point(t)))

        cands = list(ts)
        for f in _vanishing_factors(fam) + [None]:
            g = sep if f is None else (lambda t, f=f: abs(f(seg.point(t))))
            vals = np.array([g(t) for t in ts])
            i = int(np.argmin(vals))
            lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, samples - 1)]
            res = optimize.minimize_scalar(g, bounds=(lo, hi), method="bounded",
                                           options={"xatol": 1e-15, "maxiter": 2000})
            cands.append(float(res.x))
            if f is not None:
                tz = _complex_zero(lambda t, f=f: complex(f(seg.point(t))), res.x)
                if np.isfinite(tz) and 0.0 <= tz.real <= 1.0:
                    cands.append(float(tz.real))
        for t in cands:
            pts = fam.points(seg.point(t))
            v = _rel_separation(pts)
            min_disc = min(min_disc, abs(discriminant(pts)))
            if v < best_sep:
                best_sep, best_t = v, (s + t) / n
    if best_sep < clearance:
        p = path.point(best_t)
        raise ClearanceError(
            f"path comes within relative gap {best_sep:.3g} of the discriminant "
            f"at t={best_t:.12g} (point {[complex(x) for x in p]})", param=best_t)
    return PathSafety(float(min_disc), float(best_sep), float(best_t))


# ------------------------------------------------------------- integrator

_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


def dopri45(A_of_t, y0, tol, h0=0.02, step_floor=STEP_FLOOR, on_step=None):
    """Integrate y' = A(t) y on t in [0, 1] with local relative error <= tol.

    Returns (y1, steps, max_error_ratio * tol).  ``on_step(t, y)`` is called
    after each accepted step; it may raise to abort.
    """
    y = np.array(y0, dtype=complex)
    t, h = 0.0, h0
    steps, max_err = 0, 0.0
    while t < 1.0:
        h = min(h, 1.0 - t)
        if h < step_floor:
            raise SingularityError(f"step size underflow at t={t:.12g}", param=t)
        with np.errstate(over="ignore", invalid="ignore"):
            k = []
            for i in range(7):
                yi = y + h * sum(a * kk for a, kk in zip(_A[i], k)) if i else y
                k.append(A_of_t(t + _C[i] * h) @ yi)
            y5 = y + h * sum(b * kk for b, kk in zip(_B5, k))
            y4 = y + h * sum(b * kk for b, kk in zip(_B4, k))
            ymax = np.max(np.abs(y5))
            scale = np.maximum(np.abs(y), np.abs(y5)) + 1e-6 * ymax
            ratio = float(np.max(np.abs(y5 - y4) / scale)) / tol
        if not np.isfinite(ratio):
            # overflow near a pole: reject and shrink so the floor check fires
            h *= 0.2
            continue
        if ratio <= 1.0:
            t += h
            y = y5
            steps += 1
            max_err = max(max_err, ratio * tol)
            if on_step is not None:
                on_step(t, y)
        h *= min(5.0, max(0.2, 0.9 * (ratio if ratio > 0 else 1e-10) ** -0.2))
    return y, steps, max_err


@dataclass
class TransportResult:
    J_end: np.ndarray | None = None
    Phi_end: np.ndarray | None = None
    steps: int = 0
    max_local_error: float = 0.0
    root_track: RootTriple | None = None
    branch_end: np.ndarray | None = None
    liouville_residual: float | None = None
    samples: list = field(default_factory=list, repr=False)


def _run(family, path: ModuliPath, y0, tol, check=True, record=False):
    if check:
        path_safety(path, family)
    fam = _Family(family, path)
    n = len(path.segments)
    hint = fam.points(path.start)
    y = np.array(y0, dtype=complex)
    total_steps, max_err = 0, 0.0
    samples = [(0.0, y.copy())] if record else []
    for s, seg in enumerate(path.segments):
        state = {"hint": hint}

        def A_of_t(t, seg=seg, state=state):
            return fam.generator(seg.point(t), seg.deriv(t))

        def on_step(t, yy, seg=seg, state=state, s=s):
            state["hint"] = fam.points(seg.point(t), state["hint"])
            if record:
                samples.append(((s + t) / n, yy.copy()))

        y, st, err = dopri45(A_of_t, y, tol, on_step=on_step)
        hint = state["hint"]
        total_steps += st
        max_err = max(max_err, err)
    return y, total_steps, max_err, hint, samples


def propagate(family, path: ModuliPath, J0, tol=1e-11, check=True, record=False) -> TransportResult:
    """Solve the connection ODE for one period vector along ``path``."""
    J0 = np.asarray(J0, dtype=complex)
    y, steps, err, hint, samples = _run(family, path, J0, tol, check, record)
    track = RootTriple(*hint[:3]) if path.space == "h" else None
    return TransportResult(J_end=y, steps=steps, max_local_error=err, root_track=track,
                           branch_end=hint, samples=samples)


def trace_integral(family, path: ModuliPath) -> complex:
    """\\int tr A dt along the path, by adaptive quadrature (independent of the ODE)."""
    fam = _Family(family, path)
    total = 0j
    for seg in path.segments:
        f = lambda t, seg=seg: np.trace(fam.generator(seg.point(t), seg.deriv(t)))
        re = integrate.quad(lambda t: f(t).real, 0, 1, epsabs=1e-14, epsrel=1e-13, limit=500)[0]
        im = integrate.quad(lambda t: f(t).imag, 0, 1, epsabs=1e-14, epsrel=1e-13, limit=500)[0]
        total += re + 1j * im
    return total


def fundamental_transport(family, path: ModuliPath, tol=1e-12, check=True) -> TransportResult:
    """Fundamental matrix Phi(t), Phi(0) = I, with the Liouville determinant check."""
    y, steps, err, hint, _ = _run(family, path, np.eye(5, dtype=complex), tol, check)
    expected = np.exp(trace_integral(family, path))
    liou = float(abs(np.linalg.det(y) - expected) / abs(expected))
    track = RootTriple(*hint[:3]) if path.space == "h" else None
    return TransportResult(Phi_end=y, steps=steps, max_local_error=err, root_track=track,
                           branch_end=hint, liouville_residual=liou)


# ---------------------------------------------------------------- oracle side

def branch_motion(family, path: ModuliPath):
    """``branch_at(T, prev)`` for :func:`deform_cycle`, T the global path parameter."""
    fam = _Family(family, path)
    start = fam.points(path.start)

    def branch_at(T, prev):
        return fam.points(path.point(T), start if prev is None else prev)

    return branch_at, start


def oracle_endpoint(family, path: ModuliPath, cycle: Cycle, tol=1e-11):
    """Oracle periods at the path's end over the continuously deformed ``cycle``."""
    branch_at, _ = branch_motion(family, path)
    moved, e_end = deform_cycle(branch_at, cycle)
    return period_vector(e_end, moved, tol)


def default_basis(e, tol=1e-11):
    """Five branch-pair cycles with independent period vectors.

    Consecutive pairs of the lexicographically sorted branch set come first;
    other pairs are tried in sorted order if a consecutive one is invalid or
    dependent.  Indices refer to positions in ``e``.
    """
    pts = np.asarray(e, dtype=complex)
    order = np.lexsort((pts.imag, pts.real))
    cands = [(order[m], order[m + 1]) for m in range(5)]
    cands += [(order[i], order[j]) for i in range(6) for j in range(i + 2, 6)]
    cycles, cols = [], []
    for i, j in cands:
        cyc = Cycle.branch_pair(int(i) + 1, int(j) + 1)
        try:
            pair_ellipse(pts, *cyc.pair)
        except ClearanceError:
            continue
        J = period_vector(pts, cyc, tol).J
        trial = np.column_stack(cols + [J])
        sv = np.linalg.svd(trial, compute_uv=False)
        if sv[-1] > 1e-8 * sv[0]:
            cycles.append(cyc)
            cols.append(J)
        if len(cycles) == 5:
            break
    return cycles, np.column_stack(cols)


@dataclass
class MonodromyResult:
    M: np.ndarray
    loop: ModuliPath
    residual_vs_oracle: float | None
    basis: list
    B0: np.ndarray = field(repr=False)
    B1: np.ndarray | None = field(default=None, repr=False)
    liouville_residual: float | None = None
    det: complex = 1.0

    @property
    def cycle_matrix(self) -> np.ndarray:
        """M in the cycle basis, B0^{-1} M B0: column j expresses the transported
        basis cycle j in the basis.  Integral up to quadrature error."""
        return np.linalg.solve(self.B0, self.M @ self.B0)


def monodromy(family, loop: ModuliPath, tol=1e-12, oracle=True) -> MonodromyResult:
    if not loop.closed:
        raise ValueError("monodromy needs a closed path")
    res = fundamental_transport(family, loop, tol)
    fam = _Family(family, loop)
    e0 = fam.points(loop.start)
    basis, B0 = default_basis(e0)
    B1 = None
    resid = None
    if oracle:
        branch_at, _ = branch_motion(family, loop)
        cols = []
        for cyc in basis:
            moved, e_end = deform_cycle(branch_at, cyc)
            cols.append(period_vector(e_end, moved, 1e-11).J)
        B1 = np.column_stack(cols)
        resid = float(np.linalg.norm(res.Phi_end @ B0 - B1) / np.linalg.norm(B0))
    return MonodromyResult(M=res.Phi_end, loop=loop, residual_vs_oracle=resid, basis=basis,
                           B0=B0, B1=B1, liouville_residual=res.liouville_residual,
                           det=complex(np.linalg.det(res.Phi_end)))
