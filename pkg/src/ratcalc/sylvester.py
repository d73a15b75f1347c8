"""Sylvester equation solver driven by a separating rational function.

AX - XB = C embeds into the block matrix M = [[A, C], [0, B]], whose
spectrum is the union of the two spectra.  Given a rational function r
whose unit sublevel set keeps sigma(A) and sigma(B) in different
components, the two-valued function equal to +1 over sigma(A) and -1
over sigma(B) has a norm-convergent series in r, and applying that
series to M leaves 2X in the upper right block.
"""

from dataclasses import dataclass

import numpy as np

from .cpoly import Polynomial
from .errors import (
    ClearanceError,
    ConvergenceError,
    NoSeparatorError,
    PoleError,
    RootSolveError,
    ValidationError,
    WindowTooSmallError,
)
from .lemniscate import (
    axis_min_level,
    fit_separator,
    level_grid,
    level_window,
    sublevel_components,
    trace_level_curve,
    two_segment_rational,
)
from .matfun import mat_apply, mat_rational
from .ratfun import RationalFunction
from .represent import cauchy_coefficients

# grid labeling runs a hair below the nominal level 1: sublevel sets may
# pinch at critical points sitting exactly on |r| = 1 (two lobes with
# touching closures), and the strict-sublevel grid then bridges or splits
# them depending on alignment.  Separation at 0.995 implies separation at
# every lower level, which is all the quadrature relies on.
_LABEL_LEVEL = 0.995
_GRID_N = 360
_LEVEL_CLEAR = 0.0075
_POWER_SEED = 20260819


def _square(M, name):
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise ValidationError("%s must be a nonempty square matrix" % name)
    if not np.all(np.isfinite(M)):
        raise ValidationError("%s has nonfinite entries" % name)
    return M


@dataclass
class SylvesterProblem:
    """Equation data A (m x m), B (n x n), C (m x n), spectra disjoint."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        self.A = _square(self.A, "A")
        self.B = _square(self.B, "B")
        C = np.asarray(self.C, dtype=complex)
        if C.ndim != 2 or C.shape != (self.A.shape[0], self.B.shape[0]):
            raise ValidationError(
                "C must be %d x %d to match A and B, got shape %s"
                % (self.A.shape[0], self.B.shape[0], list(C.shape)))
        if not np.all(np.isfinite(C)):
            raise ValidationError("C has nonfinite entries")
        self.C = C
        self.eigs_a = np.linalg.eigvals(self.A)
        self.eigs_b = np.linalg.eigvals(self.B)
        gap = float(np.min(np.abs(self.eigs_a[:, None] - self.eigs_b[None, :])))
        scale = float(max(np.max(np.abs(self.eigs_a)),
                          np.max(np.abs(self.eigs_b)))) + 1.0
        if gap <= 1e-9 * scale:
            raise ValidationError(
                "spectra of A and B overlap (eigenvalue gap %.3g)" % gap)
        self.gap = gap

    @property
    def m(self):
        return self.A.shape[0]

    @property
    def n(self):
        return self.B.shape[0]


def build_block(problem):
    """M = [[A, C], [0, B]]; sigma(M) = sigma(A) union sigma(B)."""
    z = np.zeros((problem.n, problem.m), dtype=complex)
    return np.block([[problem.A, problem.C], [z, problem.B]])


def _block_hat(problem):
    # unit-Frobenius right-hand side keeps norm checks and series
    # tolerances independent of the scale of C; solve rescales at the end
    nc = float(np.linalg.norm(problem.C))
    Chat = problem.C / nc if nc > 0 else problem.C
    z = np.zeros((problem.n, problem.m), dtype=complex)
    return np.block([[problem.A, Chat], [z, problem.B]]), nc


@dataclass
class SeparationPlan:
    """A separator r together with the labeling of its sublevel
    components by which spectrum they hold.

    labels_a / labels_b are grid component ids covering sigma(A) and
    sigma(B); labels_rest are populated components holding no eigenvalue
    (the function being applied is set to 0 there).  eta is the largest
    value of |r| over the joint spectrum and controls the series decay;
    mat_norm is ||r(M)||_2 with C normalized to unit Frobenius norm.
    """

    r: RationalFunction
    eta: float
    method: str
    labels_a: tuple
    labels_b: tuple
    labels_rest: tuple
    eigs_a: np.ndarray
    eigs_b: np.ndarray
    mat_norm: float
    level: float = 1.0

    def as_dict(self):
        return {
            "method": self.method,
            "eta": self.eta,
            "level": self.level,
            "degrees": [self.r.p.degree, self.r.q.degree],
            "mat_norm": self.mat_norm,
            "components": {
                "V1": list(self.labels_a),
                "V2": list(self.labels_b),
                "V0": list(self.labels_rest),
            },
        }


def _validate_candidate(problem, r, method, strict=False):
    if strict:
        return _validate_core(problem, r, method)
    try:
        return _validate_core(problem, r, method)
    except (ValidationError, RootSolveError, ClearanceError,
            WindowTooSmallError, PoleError, ConvergenceError):
        # a search candidate may be arbitrarily degenerate; reject it
        return None


def _validate_core(problem, r, method):
    eigs = np.concatenate([problem.eigs_a, problem.eigs_b])
    eta = float(np.max(r.abs_eval(eigs)))
    if eta >= _LABEL_LEVEL:
        raise ValidationError(
            "max |r| over the joint spectrum is %.6g, not safely below 1"
            % eta)
    win = level_window(r, 1.0)
    field = level_grid(r, win, _GRID_N, _GRID_N)
    cmap = sublevel_components(field, _LABEL_LEVEL)
    la = {cmap.label_at(z) for z in problem.eigs_a}
    lb = {cmap.label_at(z) for z in problem.eigs_b}
    if 0 in la or 0 in lb:
        raise ValidationError(
            "an eigenvalue is not resolved into any sublevel component "
            "at the grid resolution")
    if la & lb:
        raise ValidationError(
            "eigenvalues of A and B share sublevel components %s"
            % sorted(la & lb))
    rest = tuple(sorted(set(range(1, cmap.count + 1)) - la - lb))
    Mhat, _ = _block_hat(problem)
    mat_norm = float(np.linalg.norm(mat_rational(r, Mhat), 2))
    return SeparationPlan(r=r, eta=eta, method=method,
                          labels_a=tuple(sorted(la)),
                          labels_b=tuple(sorted(lb)),
                          labels_rest=rest,
                          eigs_a=problem.eigs_a, eigs_b=problem.eigs_b,
                          mat_norm=mat_norm)


def _affine_joukowski(problem):
    """Two-root reference candidate: an affine chart T sends the cluster
    centroids to +-1, and (T - 1/T)/2 vanishes on them."""
    ca = complex(np.mean(problem.eigs_a))
    cb = complex(np.mean(problem.eigs_b))
    span = ca - cb
    if span == 0:
        return None
    T = Polynomial([-(ca + cb) / span, 2.0 / span])
    return RationalFunction(T * T - 1.0, 2.0 * T, lambdas=[ca, cb])


_TS_A = float(np.sqrt(2.0))
_TS_B = float(np.sqrt(3.0))


def _compose_affine(poly, w):
    out = Polynomial([poly.coeffs[-1]])
    for c in poly.coeffs[-2::-1]:
        out = out * w + c
    return out


def _two_segment_mapped(problem):
    """Quartic two-lobe candidate mapped so the lobes sit over the
    clusters and the mapped axis between them clears level 1."""
    ca = complex(np.mean(problem.eigs_a))
    cb = complex(np.mean(problem.eigs_b))
    span = ca - cb
    if span == 0:
        return None
    base = two_segment_rational(_TS_A, _TS_B)
    alpha = 2.0 * _TS_A / span
    beta = _TS_A - alpha * ca
    w = Polynomial([beta, alpha])
    roots = np.array([_TS_A + 1j, _TS_A - 1j, -_TS_A + 1j, -_TS_A - 1j])
    comp = RationalFunction(_compose_affine(base.p, w),
                            _compose_affine(base.q, w),
                            lambdas=(roots - beta) / alpha)
    return comp.scaled(1.0 / (0.98 * axis_min_level(_TS_A, _TS_B)))


def _ring(z0, radius, n=8):
    return z0 + radius * np.exp(2j * np.pi * np.arange(n) / n)


def _fit_candidates(problem, eps):
    ca = complex(np.mean(problem.eigs_a))
    cb = complex(np.mean(problem.eigs_b))
    span = ca - cb
    if span == 0:
        return
    eigs = np.concatenate([problem.eigs_a, problem.eigs_b])
    inside = [eigs]
    for z in eigs:
        inside.append(_ring(z, 0.5 * eps))
    inside = np.concatenate(inside)
    m0 = 0.5 * (ca + cb)
    rout = 2.2 * float(np.max(np.abs(eigs - m0))) + 0.5 * abs(span)
    wall = m0 + (1j * span / abs(span)) * rout * np.linspace(-1.0, 1.0, 25)
    circle = m0 + rout * np.exp(2j * np.pi * np.arange(32) / 32)
    outside = np.concatenate([wall, circle])
    for degrees in ((4, 3), (8, 5), (12, 7), (16, 9)):
        try:
            yield fit_separator(inside, outside, degrees), "fit%s" % (degrees,)
        except (NoSeparatorError, ValidationError):
            continue


def _candidates(problem, eps):
    for build, name in ((_affine_joukowski, "affine-joukowski"),
                        (_two_segment_mapped, "two-segment")):
        try:
            cand = build(problem)
        except ValidationError:
            continue
        if cand is not None:
            yield cand, name
    yield from _fit_candidates(problem, eps)


def _power_step(problem, plan):
    """Replace r by a root-jittered power of it until ||r(M)|| < 1.

    The spectral radius of r(M) is eta < 1, so powering drives the norm
    down even when transient growth holds it at 1 or above; the repeated
    numerator roots are jittered to stay simple.
    """
    base = plan.r
    lead = complex(base.p.coeffs[-1])
    for n in range(2, 7):
        rng = np.random.default_rng(_POWER_SEED + n)
        roots = np.repeat(base.lambdas, n)
        scale = np.maximum(1.0, np.abs(roots))
        # the basis weights grow like spacing^-(n-1); keep that product
        # near 1e-5 so roundoff stays below the series truncation error
        jit = 1e-5 ** (1.0 / (n - 1))
        roots = roots + jit * scale * (rng.standard_normal(roots.size)
                                       + 1j * rng.standard_normal(roots.size))
        try:
            cand = RationalFunction(
                Polynomial.from_roots(roots, lead=lead ** n),
                base.q ** n, lambdas=roots)
        except ValidationError:
            continue
        newplan = _validate_candidate(problem, cand,
                                      plan.method + "+power%d" % n)
        if newplan is not None and newplan.mat_norm < 1.0:
            return newplan
    raise NoSeparatorError(
        "separator found (eta %.4g) but the block-matrix norm stays at or "
        "above 1 after powering (norm %.4g)" % (plan.eta, plan.mat_norm))


def plan_separation(problem, r=None, eps=None):
    """Find, or validate, a rational function separating the spectra.

    With r given, its sublevel components are labeled by eigenvalue
    membership and any mixing is an error.  Otherwise candidates are
    tried cheapest first: the affine two-root chart, the mapped two-lobe
    quartic, then least-squares fits of increasing degree on the
    eigenvalue clusters dilated by eps/2 rings.  A validated candidate
    whose block-matrix norm reaches 1 is powered with jittered roots
    until the norm drops below 1.
    """
    if eps is None:
        eps = 0.25 * problem.gap
    if not 0.0 < eps < 0.5 * problem.gap:
        raise ValidationError("eps must lie in (0, gap/2)")
    if r is not None:
        plan = _validate_candidate(problem, r, "user", strict=True)
        if plan.mat_norm >= 1.0:
            plan = _power_step(problem, plan)
        return plan
    tried = []
    for cand, method in _candidates(problem, eps):
        plan = _validate_candidate(problem, cand, method)
        if plan is None:
            tried.append(method)
            continue
        if plan.mat_norm < 1.0:
            return plan
        try:
            return _power_step(problem, plan)
        except NoSeparatorError:
            tried.append(method + "+power")
    raise NoSeparatorError(
        "no candidate separates the spectra at level 1 (tried: %s)"
        % (", ".join(tried) if tried else "none"))


def _quadrature_level(r, eta):
    # balance tail decay (level high) against kernel conditioning and
    # critical-value clearance; candidates near 0.9-0.97 tried in order
    base = min(0.97, max(eta + 0.05, 0.9))
    crit = [abs(w) for _, w in r.critical_points()]
    for lvl in (base, base - 0.015, base + 0.015, base - 0.03, base + 0.03,
                0.93, 0.88, 0.95):
        if not eta + 0.02 < lvl < 0.99:
            continue
        if crit and min(abs(lvl - c) for c in crit) <= _LEVEL_CLEAR * max(1.0, lvl):
            continue
        return lvl
    raise ConvergenceError(
        "no quadrature level in (%.3g, 0.99) clears the critical values %s"
        % (eta + 0.02, ["%.4g" % c for c in sorted(crit)]))


def _classify_loop(r, lp, rho, cmap, cell, value_of, v0):
    # probe just off the loop on its sublevel side; for hole boundaries
    # that side is the surrounding component, which is the point
    verts = lp.vertices
    step = max(1, len(verts) // 12)
    for vi in range(0, len(verts), step):
        z0 = verts[vi]
        t = verts[(vi + 1) % len(verts)] - verts[vi - 1]
        if t == 0:
            continue
        nhat = 1j * t / abs(t)
        for delta in (2.5 * cell, 5.0 * cell, 1.25 * cell):
            for side in (1.0, -1.0):
                z = z0 + side * delta * nhat
                if float(r.abs_eval(z)) < 0.999 * rho:
                    cid = cmap.label_at(z)
                    if cid:
                        return value_of.get(cid, v0)
    raise ValidationError(
        "cannot attach a loop at level %g to a sublevel component" % rho)


def _loop_values(r, contour, rho, eigs_a, eigs_b, va, vb, v0=0.0):
    """Constant value per contour loop: loops fencing sigma(A) carry va,
    sigma(B) vb, eigenvalue-free components v0."""
    vals = {}
    pending = []
    for i, lp in enumerate(contour.loops):
        has_a = bool(lp.enclosed(eigs_a))
        has_b = bool(lp.enclosed(eigs_b))
        if has_a and has_b:
            raise ValidationError(
                "a loop at level %g encloses eigenvalues of both A and B; "
                "the spectra are not separated at this level" % rho)
        if has_a:
            vals[i] = va
        elif has_b:
            vals[i] = vb
        else:
            pending.append(i)
    if pending:
        field = level_grid(r, contour.window, _GRID_N, _GRID_N)
        cmap = sublevel_components(field, rho)
        value_of = {}
        for z, v in ([(z, va) for z in eigs_a] + [(z, vb) for z in eigs_b]):
            cid = cmap.label_at(z)
            if cid and value_of.setdefault(cid, v) != v:
                raise ValidationError(
                    "eigenvalues of A and B share a sublevel component "
                    "at level %g" % rho)
        cell = max(field.xs[1] - field.xs[0], field.ys[1] - field.ys[0])
        for i in pending:
            vals[i] = _classify_loop(r, contour.loops[i], rho, cmap, cell,
                                     value_of, v0)
    return [vals[i] for i in range(len(contour.loops))]


def _apply_piecewise(plan, M, va, vb, tol):
    """Apply the function equal to va over sigma(A), vb over sigma(B)
    and 0 on other components to the matrix M."""
    r = plan.r
    rho = _quadrature_level(r, plan.eta)
    contour = trace_level_curve(r, rho, level_window(r, rho))
    vals = _loop_values(r, contour, rho, plan.eigs_a, plan.eigs_b, va, vb)
    t = plan.eta / rho
    if t <= 1e-12:
        n0 = 6
    else:
        n0 = 4 + int(np.clip(np.ceil(np.log(tol / 500.0) / np.log(t)), 6, 220))
    err = None
    seen = set()
    for N in (n0, 2 * n0, 4 * n0):
        N = min(N, 240)
        if N in seen:
            continue
        seen.add(N)
        rep = cauchy_coefficients(r, None, contour, N, loop_values=vals,
                                  tol=min(tol, 1e-9))
        try:
            return mat_apply(rep, M, tol=tol), rep, rho
        except ConvergenceError as exc:
            err = exc
    raise err


@dataclass
class SolveResult:
    X: np.ndarray
    residual: float
    eta: float
    rho: float
    order: int
    n_nodes: int
    psi: np.ndarray
    plan: SeparationPlan

    def as_dict(self):
        return {
            "residual": self.residual,
            "eta": self.eta,
            "rho": self.rho,
            "truncation_order": self.order,
            "n_nodes": self.n_nodes,
            "plan": self.plan.as_dict(),
        }


def solve(problem, plan=None, tol=1e-9):
    """Solve AX - XB = C through the series of the separating function.

    The function equal to +1 over sigma(A) and -1 over sigma(B) is
    integrated into series coefficients on a level curve of the plan's
    separator and applied to the block matrix; the upper right block of
    the result is 2X.  The returned residual satisfies
    ||AX - XB - C|| <= tol (||A|| + ||B||) ||X|| + tol ||C||.
    """
    if tol <= 0:
        raise ValidationError("tol must be positive")
    if plan is None:
        plan = plan_separation(problem)
    Mhat, nc = _block_hat(problem)
    norm_ab = (float(np.linalg.norm(problem.A, 2))
               + float(np.linalg.norm(problem.B, 2)))
    psi_hat, rep, rho = _apply_piecewise(plan, Mhat, 1.0, -1.0,
                                         tol / (2.0 + norm_ab))
    m = problem.m
    X = 0.5 * nc * psi_hat[:m, m:]
    res = float(np.linalg.norm(problem.A @ X - X @ problem.B - problem.C))
    bound = tol * (norm_ab * float(np.linalg.norm(X))
                   + float(np.linalg.norm(problem.C)))
    if res > bound:
        raise ConvergenceError(
            "residual %.3g exceeds the tolerance bound %.3g" % (res, bound),
            achieved=res)
    # undo the unit-C scaling: M = S Mhat S^-1 with S = diag(I, I/nc)
    psi = psi_hat.copy()
    psi[:m, m:] *= nc
    return SolveResult(X=X, residual=res, eta=plan.eta, rho=rho,
                       order=rep.order, n_nodes=rep.n_nodes, psi=psi,
                       plan=plan)


def riesz_projection(M, plan, label="V1", tol=1e-9):
    """Spectral projection of M onto the invariant subspace of the
    labeled cluster, via the series of the 0/1 indicator."""
    M = _square(M, "M")
    if label not in ("V1", "V2"):
        raise ValidationError("label must be 'V1' or 'V2'")
    va, vb = (1.0, 0.0) if label == "V1" else (0.0, 1.0)
    Q, _, _ = _apply_piecewise(plan, M, va, vb, tol)
    return Q
