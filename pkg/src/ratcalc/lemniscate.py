"""Lemniscate geometry for |r(z)| = level curves.

Grids and connected components of sublevel sets, traced contours with
phase-equidistributed quadrature nodes, separation verification and the
constructive separator searches (least-squares fit and the four-zero
two-segment family).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage, optimize

from .cpoly import Polynomial
from .errors import (
    ClearanceError,
    ConvergenceError,
    NoSeparatorError,
    ValidationError,
    WindowTooSmallError,
)
from .ratfun import RationalFunction

__all__ = [
    "Window", "GridField", "Contour", "Loop",
    "level_grid", "sublevel_components", "trace_level_curve", "level_chains",
    "contour_quadrature", "verify_separation", "proper_scale", "fit_separator",
    "two_segment_rational", "axis_min_level", "max_segment_ratio",
    "two_segment_search", "bounding_window",
]

_LOG_CLIP = 40.0  # log-scale saturation for zeros/poles on the sample grid


@dataclass(frozen=True)
class Window:
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self):
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ValidationError("window must have positive extent")

    @classmethod
    def square(cls, center=0.0, half=3.0):
        c = complex(center)
        return cls(c.real - half, c.real + half, c.imag - half, c.imag + half)

    @property
    def diameter(self):
        return float(np.hypot(self.xmax - self.xmin, self.ymax - self.ymin))

    def contains(self, z, pad=0.0):
        z = np.asarray(z, dtype=complex)
        return ((z.real >= self.xmin - pad) & (z.real <= self.xmax + pad)
                & (z.imag >= self.ymin - pad) & (z.imag <= self.ymax + pad))

    def axes(self, nx, ny):
        return (np.linspace(self.xmin, self.xmax, nx),
                np.linspace(self.ymin, self.ymax, ny))

    def mesh(self, nx, ny):
        xs, ys = self.axes(nx, ny)
        return xs[None, :] + 1j * ys[:, None]


@dataclass
class GridField:
    """Sampled |r| over a window; values[iy, ix], poles as +inf."""
    window: Window
    nx: int
    ny: int
    values: np.ndarray
    xs: np.ndarray
    ys: np.ndarray


def level_grid(r, window, nx=400, ny=400):
    if nx < 2 or ny < 2:
        raise ValidationError("grid resolution must be at least 2")
    z = window.mesh(nx, ny)
    vals = r.abs_eval(z)
    xs, ys = window.axes(nx, ny)
    return GridField(window=window, nx=nx, ny=ny, values=vals, xs=xs, ys=ys)


@dataclass
class ComponentMap:
    field: GridField
    level: float
    labels: np.ndarray
    count: int

    def label_at(self, z):
        """Component label of the grid cell nearest to z; 0 when |r| >= level."""
        z = complex(z)
        ix = int(np.clip(np.searchsorted(self.field.xs, z.real), 1, self.field.nx - 1))
        if abs(self.field.xs[ix - 1] - z.real) < abs(self.field.xs[ix] - z.real):
            ix -= 1
        iy = int(np.clip(np.searchsorted(self.field.ys, z.imag), 1, self.field.ny - 1))
        if abs(self.field.ys[iy - 1] - z.imag) < abs(self.field.ys[iy] - z.imag):
            iy -= 1
        return int(self.labels[iy, ix])

    def component_points(self, label, limit=None):
        iy, ix = np.nonzero(self.labels == label)
        pts = self.field.xs[ix] + 1j * self.field.ys[iy]
        if limit is not None and len(pts) > limit:
            step = max(1, len(pts) // limit)
            pts = pts[::step][:limit]
        return pts


def sublevel_components(field, level):
    """4-connected labeling of the region |r| < level on the grid."""
    if level <= 0:
        raise ValidationError("level must be positive")
    mask = field.values < level
    labels, count = ndimage.label(mask)
    return ComponentMap(field=field, level=level, labels=labels, count=count)


# -- marching squares -------------------------------------------------

# per-cell segment table: corner bits a=1 (bottom-left), b=2, c=4, d=8;
# edges 0 bottom, 1 right, 2 top, 3 left; cases 5 and 10 need the center
_CASES = {
    0: [], 15: [],
    1: [(3, 0)], 14: [(3, 0)],
    2: [(0, 1)], 13: [(0, 1)],
    4: [(1, 2)], 11: [(1, 2)],
    8: [(2, 3)], 7: [(2, 3)],
    3: [(3, 1)], 12: [(3, 1)],
    6: [(0, 2)], 9: [(0, 2)],
}


def _edge_point(g0, g1, z0, z1):
    t = g0 / (g0 - g1)
    return z0 + t * (z1 - z0)


def _march(r, level, window, nx, ny):
    """Extract level-curve chains on the grid.

    Returns (closed_chains, open_chains) as lists of vertex arrays.
    Saddle cells are disambiguated with an exact center evaluation.
    """
    xs, ys = window.axes(nx, ny)
    z = xs[None, :] + 1j * ys[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.log(r.abs_eval(z)) - np.log(level)
    g = np.clip(np.nan_to_num(g, nan=_LOG_CLIP, posinf=_LOG_CLIP, neginf=-_LOG_CLIP),
                -_LOG_CLIP, _LOG_CLIP)
    inside = g < 0

    # crossing points per global edge key: ('h', ix, iy) or ('v', ix, iy)
    points = {}

    def edge_key(ix, iy, e):
        if e == 0:
            return ("h", ix, iy)
        if e == 2:
            return ("h", ix, iy + 1)
        if e == 3:
            return ("v", ix, iy)
        return ("v", ix + 1, iy)

    def edge_corners(ix, iy, e):
        if e == 0:
            return (iy, ix), (iy, ix + 1)
        if e == 2:
            return (iy + 1, ix + 1), (iy + 1, ix)
        if e == 3:
            return (iy + 1, ix), (iy, ix)
        return (iy, ix + 1), (iy + 1, ix + 1)

    segments = []
    adj = {}

    def emit(ix, iy, e1, e2):
        keys = []
        for e in (e1, e2):
            k = edge_key(ix, iy, e)
            if k not in points:
                (r0c, c0), (r1c, c1) = edge_corners(ix, iy, e)
                points[k] = _edge_point(g[r0c, c0], g[r1c, c1],
                                        z[r0c, c0], z[r1c, c1])
            keys.append(k)
        sid = len(segments)
        segments.append((keys[0], keys[1]))
        adj.setdefault(keys[0], []).append(sid)
        adj.setdefault(keys[1], []).append(sid)

    cellmask = inside[:-1, :-1] | inside[:-1, 1:] | inside[1:, 1:] | inside[1:, :-1]
    activemask = cellmask & ~(inside[:-1, :-1] & inside[:-1, 1:]
                              & inside[1:, 1:] & inside[1:, :-1])
    cys, cxs = np.nonzero(activemask)
    for iy, ix in zip(cys, cxs):
        case = (int(inside[iy, ix]) | int(inside[iy, ix + 1]) << 1
                | int(inside[iy + 1, ix + 1]) << 2 | int(inside[iy + 1, ix]) << 3)
        if case in _CASES:
            for e1, e2 in _CASES[case]:
                emit(ix, iy, e1, e2)
        else:
            center = 0.5 * (z[iy, ix] + z[iy + 1, ix + 1])
            center_inside = r.abs_eval(center) < level
            if case == 5:
                pairs = [(0, 1), (2, 3)] if center_inside else [(3, 0), (1, 2)]
            else:  # case 10
                pairs = [(3, 0), (1, 2)] if center_inside else [(0, 1), (2, 3)]
            for e1, e2 in pairs:
                emit(ix, iy, e1, e2)

    # walk segment adjacency into chains
    used = np.zeros(len(segments), dtype=bool)
    closed, open_ = [], []
    for sid0 in range(len(segments)):
        if used[sid0]:
            continue
        used[sid0] = True
        k0, k1 = segments[sid0]
        chain = [k0, k1]
        # extend forward
        while True:
            nxt = [s for s in adj[chain[-1]] if not used[s]]
            if not nxt:
                break
            sid = nxt[0]
            used[sid] = True
            a, b = segments[sid]
            chain.append(b if a == chain[-1] else a)
        if chain[0] == chain[-1]:
            closed.append(np.array([points[k] for k in chain[:-1]]))
            continue
        # extend backward
        while True:
            nxt = [s for s in adj[chain[0]] if not used[s]]
            if not nxt:
                break
            sid = nxt[0]
            used[sid] = True
            a, b = segments[sid]
            chain.insert(0, b if a == chain[0] else a)
        arr = np.array([points[k] for k in chain])
        if chain[0] == chain[-1]:
            closed.append(arr[:-1])
        else:
            open_.append(arr)
    return closed, open_


def _refine_vertices(r, verts, level, tol, maxiter=30):
    z = verts.copy()
    for _ in range(maxiter):
        rv = r(z)
        err = np.abs(np.abs(rv) - level)
        if np.max(err) <= tol * max(1.0, level):
            break
        target = level * rv / np.where(np.abs(rv) == 0, 1.0, np.abs(rv))
        rp = r.rprime(z)
        ok = np.abs(rp) > 1e-300
        step = np.zeros_like(z)
        step[ok] = (rv[ok] - target[ok]) / rp[ok]
        z = z - step
    return z


@dataclass
class Loop:
    """One closed level-curve loop with phase-equidistributed quadrature.

    nodes solve r(z) = level * exp(i theta_s) for equispaced theta over
    the loop's full phase range 2 pi * winding; weights implement both
    the complex line integral and the arclength integral.
    """
    vertices: np.ndarray
    level: float
    winding: int
    nodes: np.ndarray
    r_nodes: np.ndarray
    dl_weights: np.ndarray
    absdl_weights: np.ndarray

    @property
    def closed_vertices(self):
        return np.append(self.vertices, self.vertices[:1])

    def integrate(self, f):
        return complex(np.sum(f(self.nodes) * self.dl_weights))

    def integrate_abs(self, f):
        return complex(np.sum(f(self.nodes) * self.absdl_weights))

    @property
    def length(self):
        return float(np.sum(self.absdl_weights))

    def winding_around(self, z0):
        val = np.sum(self.dl_weights / (self.nodes - z0)) / (2j * np.pi)
        return int(np.round(val.real))

    def enclosed(self, points):
        return [k for k, lam in enumerate(points) if self.winding_around(lam) != 0]


def _oriented_phases(r, verts):
    """Unwrapped phase of r along the polyline, orientation normalized so
    the phase increases (then the sublevel side stays on the left)."""
    theta = np.unwrap(np.angle(r(verts)))
    closed_jump = np.angle(r(verts[0])) - theta[-1]
    closed_jump = (closed_jump + np.pi) % (2 * np.pi) - np.pi
    total = (theta[-1] + closed_jump) - theta[0]
    if total < 0:
        verts = verts[::-1]
        theta = np.unwrap(np.angle(r(verts)))
        closed_jump = np.angle(r(verts[0])) - theta[-1]
        closed_jump = (closed_jump + np.pi) % (2 * np.pi) - np.pi
        total = (theta[-1] + closed_jump) - theta[0]
    winding = int(np.round(total / (2 * np.pi)))
    return verts, theta, winding


def _build_loop(r, verts, level, refine_tol, nodes_per_winding):
    verts, theta, winding = _oriented_phases(r, verts)
    if winding == 0:
        raise ConvergenceError("level-curve loop has zero phase winding")
    n_nodes = max(32, nodes_per_winding * winding)
    # strictly increasing phase samples for interpolation guesses
    mono = np.concatenate([[True], np.diff(theta) > 1e-12])
    tm = theta[mono]
    vm = verts[mono]
    span = 2 * np.pi * winding
    # close the phase table with the first vertex one full turn later so
    # targets on the final arc interpolate across the right gap
    end = tm[0] + span
    keep = tm < end - 1e-9
    tm = np.append(tm[keep], end)
    vm = np.append(vm[keep], vm[0])
    targets = tm[0] + span * np.arange(n_nodes) / n_nodes
    gx = np.interp(targets, tm, vm.real)
    gy = np.interp(targets, tm, vm.imag)
    nodes = gx + 1j * gy
    tau = level * np.exp(1j * targets)
    for _ in range(40):
        rv = r(nodes)
        res = rv - tau
        if np.max(np.abs(res)) <= 1e-13 * max(1.0, level):
            break
        rp = r.rprime(nodes)
        ok = np.abs(rp) > 1e-300
        step = np.zeros_like(nodes)
        step[ok] = res[ok] / rp[ok]
        nodes = nodes - step
    res = np.max(np.abs(r(nodes) - tau))
    if res > refine_tol * max(1.0, level):
        raise ConvergenceError(
            "quadrature nodes missed the level curve (residual %.2e)" % res)
    dtheta = span / n_nodes
    rp = r.rprime(nodes)
    dl = dtheta * 1j * tau / rp
    absdl = dtheta * level / np.abs(rp)
    return Loop(vertices=verts, level=level, winding=winding, nodes=nodes,
                r_nodes=tau, dl_weights=dl, absdl_weights=absdl)


@dataclass
class Contour:
    loops: list
    level: float
    window: Window
    r: RationalFunction
    nodes_per_winding: int = 256

    def integrate(self, f):
        return sum((lp.integrate(f) for lp in self.loops), 0j)

    def integrate_abs(self, f):
        return sum((lp.integrate_abs(f) for lp in self.loops), 0j)

    @property
    def n_nodes(self):
        return sum(len(lp.nodes) for lp in self.loops)

    def with_nodes(self, factor=2, refine_tol=1e-9):
        loops = [
            _build_loop(self.r, lp.vertices, self.level, refine_tol,
                        self.nodes_per_winding * factor)
            for lp in self.loops
        ]
        return Contour(loops=loops, level=self.level, window=self.window,
                       r=self.r, nodes_per_winding=self.nodes_per_winding * factor)


def trace_level_curve(r, rho, window, refine_tol=1e-9, resolution=400,
                      nodes_per_winding=256, clearance=None,
                      value_clearance=0.005):
    """Closed, oriented, quadrature-ready loops of |r(z)| = rho.

    The level must stay clear of the critical values of r, all loops must
    close inside the window, and every vertex is refined onto the curve.
    """
    if rho <= 0:
        raise ValidationError("level must be positive")
    crit = r.critical_points()
    bad = [w for _, w in crit if abs(abs(w) - rho) <= value_clearance * max(1.0, rho)]
    if bad:
        raise ClearanceError(
            "critical values %s sit on the quadrature circle |w| = %g" % (bad, rho),
            offending=bad)
    closed, open_ = _march(r, rho, window, resolution, resolution)
    if open_:
        raise WindowTooSmallError(
            "%d level-curve chains leave the window %s at level %g"
            % (len(open_), window, rho))
    if not closed:
        raise ValidationError("no level curve at level %g inside %s" % (rho, window))
    if clearance is None:
        clearance = 1e-3 * window.diameter
    loops = []
    for verts in closed:
        verts = _refine_vertices(r, verts, rho, refine_tol)
        for zc, _ in crit:
            dmin = float(np.min(np.abs(verts - zc)))
            if dmin <= clearance:
                raise ClearanceError(
                    "level curve passes within %.3g of critical point %s"
                    % (dmin, zc), offending=zc)
        loops.append(_build_loop(r, verts, rho, refine_tol, nodes_per_winding))
    loops.sort(key=lambda lp: (round(np.mean(lp.vertices).real, 9),
                               round(np.mean(lp.vertices).imag, 9)))
    return Contour(loops=loops, level=rho, window=window, r=r,
                   nodes_per_winding=nodes_per_winding)


def level_chains(r, rho, window, resolution=400, refine=True):
    """Lenient chain extraction for plotting: open chains are kept, no
    clearance or closure requirements."""
    closed, open_ = _march(r, rho, window, resolution, resolution)
    out = []
    for verts, is_closed in [(v, True) for v in closed] + [(v, False) for v in open_]:
        if refine and len(verts) > 2:
            try:
                verts = _refine_vertices(r, verts, rho, 1e-9, maxiter=6)
            except Exception:
                pass
        out.append((verts, is_closed))
    return out


def contour_quadrature(contour):
    """Concatenated quadrature data (nodes, complex dl weights, |dl| weights)."""
    nodes = np.concatenate([lp.nodes for lp in contour.loops])
    dl = np.concatenate([lp.dl_weights for lp in contour.loops])
    absdl = np.concatenate([lp.absdl_weights for lp in contour.loops])
    return nodes, dl, absdl


# -- separation -------------------------------------------------------

@dataclass
class SeparationReport:
    level: float
    max_inside: float
    min_outside: float
    slack: float
    passed: bool
    margin_inside: float
    margin_outside: float

    def as_dict(self):
        return {
            "level": self.level,
            "max_inside": self.max_inside,
            "min_outside": self.min_outside,
            "slack": self.slack,
            "passed": self.passed,
            "margin_inside": self.margin_inside,
            "margin_outside": self.margin_outside,
        }


def verify_separation(r, inside_samples, outside_samples, level, slack=1e-3):
    """Margin report for max_inside |r| < level < min_outside |r|.

    Pass requires both relative margins to clear the slack.  Poles among
    the inside samples make the report fail automatically.
    """
    inside = np.asarray(inside_samples, dtype=complex)
    outside = np.asarray(outside_samples, dtype=complex)
    if inside.size == 0 or outside.size == 0:
        raise ValidationError("sample sets must be nonempty")
    max_in = float(np.max(r.abs_eval(inside)))
    min_out = float(np.min(r.abs_eval(outside)))
    m_in = (level - max_in) / level if np.isfinite(max_in) else -np.inf
    m_out = (min_out - level) / level
    return SeparationReport(
        level=level, max_inside=max_in, min_outside=min_out, slack=slack,
        passed=bool(m_in >= slack and m_out >= slack),
        margin_inside=m_in, margin_outside=m_out)


def proper_scale(r0, R, n):
    """Multiply by 1 - (z/R)^n, forcing deg p > deg q while changing the
    function by O((z/R)^n) on compact sets well inside |z| = R."""
    if R <= 0 or n < 1:
        raise ValidationError("need R > 0 and n >= 1")
    if isinstance(r0, RationalFunction):
        p0, q0 = r0.p, r0.q
    else:
        p0, q0 = r0
        if not isinstance(p0, Polynomial):
            p0 = Polynomial(p0)
        if not isinstance(q0, Polynomial):
            q0 = Polynomial(q0)
    pc = np.zeros(n + 1, dtype=complex)
    pc[0] = 1.0
    pc[n] = -(1.0 / R) ** n
    scaler = Polynomial(pc)
    return RationalFunction(scaler * p0, q0)


def fit_separator(inside_samples, outside_samples, degrees, iterations=8,
                  slack=1e-3):
    """Least-squares rational separator: |r| < 1 on inside samples and
    |r| > 1 on outside samples.

    Linearized fit of p - t q to the two-level target t (0 inside, 2
    outside), reweighted by 1/|q| between passes; the best verified
    candidate is normalized so the margins straddle 1 symmetrically.
    Hard success means max_inside < 1/2 and min_outside > 3/2; otherwise
    any strictly separating candidate is returned.
    """
    inside = np.asarray(inside_samples, dtype=complex).ravel()
    outside = np.asarray(outside_samples, dtype=complex).ravel()
    if inside.size == 0 or outside.size == 0:
        raise ValidationError("sample sets must be nonempty")
    dp, dq = degrees
    if dp <= dq or dp < 1 or dq < 0:
        raise ValidationError("need degrees dp > dq >= 0")
    gap = np.min(np.abs(inside[:, None] - outside[None, :]))
    scale = float(np.max(np.abs(np.concatenate([inside, outside])))) + 1.0
    if gap <= 1e-9 * scale:
        raise ValidationError("inside and outside samples overlap")

    zs = np.concatenate([inside, outside])
    s = float(np.max(np.abs(zs)))
    zeta = zs / s
    Vp = np.vander(zeta, dp + 1, increasing=True)
    Vq = np.vander(zeta, dq + 1, increasing=True)

    # target profiles: the plain two-level real fit (zeros do the work)
    # plus phase-twisted levels matching a z^-m pole cluster at the
    # origin (so pole-forcing geometries are reachable by least squares)
    absz = np.abs(zs)
    unit = np.where(absz > 0, zs / np.where(absz == 0, 1.0, absz), 1.0)
    levels = np.concatenate([np.full(len(inside), 0.5),
                             np.full(len(outside), 2.0)])
    targets = [np.concatenate([np.zeros(len(inside)),
                               2.0 * np.ones(len(outside))])]
    for m in range(1, dq + 1):
        targets.append(levels * unit ** (-m))

    def candidate(vec):
        pc = vec[: dp + 1] / s ** np.arange(dp + 1)
        qc = vec[dp + 1:] / s ** np.arange(dq + 1)
        if np.linalg.norm(pc) < 1e-12 * np.linalg.norm(vec):
            return None
        if np.linalg.norm(qc) < 1e-12 * np.linalg.norm(vec):
            qc = np.array([1.0 + 0j])
        try:
            r = RationalFunction(Polynomial(pc), Polynomial(qc))
        except Exception:
            return None
        max_in = float(np.max(r.abs_eval(inside)))
        min_out = float(np.min(r.abs_eval(outside)))
        if not np.isfinite(max_in) or min_out <= 0 or max_in <= 0:
            if max_in == 0.0 and np.isfinite(min_out) and min_out > 0:
                max_in = 1e-300
            else:
                return None
        c = 1.0 / np.sqrt(max_in * min_out)
        try:
            rn = r.scaled(c)
        except Exception:
            return None
        rep = verify_separation(rn, inside, outside, 1.0, slack=slack)
        return rn, rep

    best = None
    for t in targets:
        A0 = np.hstack([Vp, -t[:, None] * Vq])
        weights = np.ones(len(zs))
        for _ in range(max(1, iterations)):
            A = A0 * weights[:, None]
            try:
                _, _, vt = np.linalg.svd(A, full_matrices=False)
            except np.linalg.LinAlgError:
                break
            got_q = None
            for row in range(1, min(4, vt.shape[0]) + 1):
                cand = candidate(vt[-row])
                if cand is None:
                    continue
                rn, rep = cand
                if rep.passed:
                    score = min(rep.margin_inside, rep.margin_outside)
                    if best is None or score > best[2]:
                        best = (rn, rep, score)
                if got_q is None:
                    got_q = rn.q
            if best is not None and best[1].max_inside < 0.5 and best[1].min_outside > 1.5:
                return best[0]
            qref = (best[0].q if best is not None else got_q)
            if qref is None:
                break
            weights = 1.0 / np.maximum(np.abs(qref(zs)), 1e-8 * qref.coefficient_scale())
            weights /= np.max(weights)
    if best is not None:
        return best[0]
    raise NoSeparatorError(
        "no separating rational of degrees (%d, %d) found for %d/%d samples"
        % (dp, dq, len(inside), len(outside)))


# -- two-segment family ----------------------------------------------

def two_segment_rational(a, b):
    """Degree-4 family with zeros at +-a +- i and poles at 0 and +-ib.

    Designed so the sublevel set splits into two tall lobes left and
    right of the imaginary axis, each containing a near-vertical segment.
    """
    if a <= 0 or b <= 0:
        raise ValidationError("parameters must be positive")
    c0 = (a * a + 1.0) ** 2
    c2 = -2.0 * (a * a - 1.0)
    p = Polynomial([c0, 0.0, c2, 0.0, 1.0])
    q = Polynomial([0.0, b * b, 0.0, 1.0])
    return RationalFunction(p, q)


def axis_min_level(a, b, y_max=30.0):
    """min over the positive imaginary axis of |r_{a,b}|, the supremum of
    levels whose sublevel set avoids the axis."""
    r = two_segment_rational(a, b)
    y = np.linspace(1e-4, y_max, 8001)
    vals = r.abs_eval(1j * y)
    i = int(np.argmin(vals))
    lo = y[max(i - 1, 0)]
    hi = y[min(i + 1, len(y) - 1)]
    res = optimize.minimize_scalar(lambda t: r.abs_eval(1j * t),
                                   bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-12})
    return float(min(res.fun, vals[i]))


def max_segment_ratio(r, level, x_hi=None, nx=400, y_cap=50.0):
    """Tallest vertical segment inside |r| < level in the right half-plane.

    For x on a grid, y(x) is the first crossing of |r| = level going up
    from the axis; returns (x0, y0, ratio) maximizing y/x, or None when
    the level admits no on-axis inside points.
    """
    if x_hi is None:
        probe = np.linspace(1e-3, 20.0, 4000)
        ok = r.abs_eval(probe) < level
        if not ok.any():
            return None
        x_hi = float(probe[ok].max())
    xs = np.linspace(1e-3, x_hi, nx)
    ok = r.abs_eval(xs) < level
    xs = xs[ok]
    if len(xs) == 0:
        return None
    ys = np.linspace(0.0, y_cap, 512)
    vals = r.abs_eval(xs[:, None] + 1j * ys[None, :])
    out = vals >= level
    out[:, 0] = False
    first = np.argmax(out, axis=1)
    never = ~out.any(axis=1)
    lo = ys[np.maximum(first - 1, 0)]
    hi = ys[first]
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        above = r.abs_eval(xs + 1j * mid) >= level
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    y_exit = 0.5 * (lo + hi)
    y_exit[never] = y_cap
    ratio = y_exit / xs
    i = int(np.argmax(ratio))
    return float(xs[i]), float(y_exit[i]), float(ratio[i])


@dataclass
class SweepResult:
    a: float
    b: float
    level: float
    x0: float
    y0: float
    ratio: float
    angle_deg: float
    found: bool
    rows: list = field(default_factory=list, repr=False)


def two_segment_search(a_range=(1.0, 1.8), b_range=(1.1, 1.9), step=0.05,
                       angle=None, level_fraction=0.98, nx=200):
    """Deterministic grid sweep of the two-segment family.

    For each (a, b) the working level is level_fraction times the on-axis
    supremum, so the two lobes provably avoid the imaginary axis; the
    objective is the steepest inscribed segment angle atan(y0/x0).
    If a target angle is given, found reports whether it was attained.
    """
    a_vals = np.round(np.arange(a_range[0], a_range[1] + step / 2, step), 10)
    b_vals = np.round(np.arange(b_range[0], b_range[1] + step / 2, step), 10)
    rows = []
    best = None
    for a in a_vals:
        for b in b_vals:
            sup = axis_min_level(a, b)
            level = level_fraction * sup
            r = two_segment_rational(a, b)
            got = max_segment_ratio(r, level, nx=nx)
            if got is None:
                continue
            x0, y0, ratio = got
            rows.append((float(a), float(b), level, x0, y0, ratio))
            if best is None or ratio > best[5]:
                best = rows[-1]
    if best is None:
        return SweepResult(a=np.nan, b=np.nan, level=np.nan, x0=np.nan,
                           y0=np.nan, ratio=np.nan, angle_deg=np.nan,
                           found=False, rows=rows)
    angle_deg = float(np.degrees(np.arctan(best[5])))
    found = True if angle is None else bool(angle_deg >= angle)
    return SweepResult(a=best[0], b=best[1], level=best[2], x0=best[3],
                       y0=best[4], ratio=best[5], angle_deg=angle_deg,
                       found=found, rows=rows)


def bounding_window(r, margin=0.75, min_half=2.0):
    """Window covering the zeros, poles and critical points of r."""
    pts = list(r.lambdas)
    if r.q.degree is not None and r.q.degree >= 1:
        pts.extend(r.q.roots())
    pts.extend(z for z, _ in r.critical_points())
    pts = np.asarray(pts, dtype=complex)
    cx = 0.5 * (pts.real.min() + pts.real.max())
    cy = 0.5 * (pts.imag.min() + pts.imag.max())
    half = 0.5 * max(pts.real.max() - pts.real.min(),
                     pts.imag.max() - pts.imag.min())
    half = max(half * (1.0 + margin), min_half)
    return Window(cx - half, cx + half, cy - half, cy + half)


def level_window(r, level, samples=64):
    """Square window sure to contain the curve |r| = level: the curve is
    the union of fibers over the circle |w| = level, so sampled fibers
    bound its reach."""
    reach = 0.0
    for t in 2.0 * np.pi * np.arange(samples) / samples:
        reach = max(reach, float(np.max(np.abs(
            r.fiber(level * np.exp(1j * t))))))
    return bounding_window(r, margin=0.75, min_half=1.1 * reach + 0.5)
