"""Scalar functions as vector-valued functions of w = r(z).

A scalar phi holomorphic near the sublevel set splits as
phi(z) = sum_j delta_j(z) f_j(r(z)); this module computes the vector
representative f pointwise (linear solve on a fiber), as a power series
(contour quadrature of the Cauchy kernel), or from derivative data at
the numerator roots (exact chain-rule recursion).
"""

import math
from dataclasses import dataclass

import numpy as np

from .cpoly import Polynomial
from .errors import (
    ClearanceError,
    ConvergenceError,
    DomainError,
    ValidationError,
)
from .ratfun import (
    RationalFunction,
    delta_derivatives_at,
    r_derivatives_at,
)

__all__ = [
    "FiberMatrix", "Representation", "PointwiseRepresentative",
    "fiber_matrix", "represent_pointwise", "cauchy_coefficients",
    "taylor_from_derivatives", "reconstruct", "convert_poly_to_rational",
]

_COND_THRESHOLD = 1e8


@dataclass
class FiberMatrix:
    """Matrix A with A[j, k] = delta_k(z_j(w)) over the fiber of w."""
    w: complex
    fiber: np.ndarray
    entries: np.ndarray
    cond: float
    near_critical: bool


def _match_to_roots(fib, lambdas):
    """Permute fiber points so index j tracks the branch through lambda_j
    (greedy nearest assignment; exact at w = 0)."""
    d = len(lambdas)
    dist = np.abs(np.asarray(lambdas)[:, None] - fib[None, :])
    order = np.full(d, -1)
    used = np.zeros(d, dtype=bool)
    for _ in range(d):
        masked = np.where(used[None, :] | (order[:, None] >= 0), np.inf, dist)
        j, i = np.unravel_index(int(np.argmin(masked)), masked.shape)
        order[j] = i
        used[i] = True
    return fib[order]


def fiber_matrix(r, w, cond_threshold=_COND_THRESHOLD):
    fib = _match_to_roots(r.fiber(complex(w)), r.lambdas)
    entries = r.delta_all(fib).T
    try:
        cond = float(abs(np.linalg.cond(entries, np.inf)))
    except np.linalg.LinAlgError:
        cond = np.inf
    return FiberMatrix(w=complex(w), fiber=fib, entries=entries, cond=cond,
                       near_critical=not np.isfinite(cond) or cond > cond_threshold)


def _phi_on(phi, pts):
    try:
        vals = np.asarray(phi(pts), dtype=complex)
        if vals.shape == pts.shape:
            return vals
    except Exception:
        pass
    return np.array([complex(phi(z)) for z in pts])


def represent_pointwise(r, phi, w, cond_threshold=_COND_THRESHOLD):
    """The unique f(w) with sum_k delta_k(z_j) f_k(w) = phi(z_j) on the fiber."""
    fm = fiber_matrix(r, w, cond_threshold)
    if fm.near_critical:
        raise ClearanceError(
            "fiber matrix at w = %s is near-singular (cond %.3g); "
            "w is too close to a critical value" % (fm.w, fm.cond),
            offending=fm.w, cond=fm.cond)
    rhs = _phi_on(phi, fm.fiber)
    f = np.linalg.solve(fm.entries, rhs)
    res = float(np.max(np.abs(fm.entries @ f - rhs)))
    if res > 1e-10 * (1.0 + float(np.max(np.abs(rhs)))):
        raise ClearanceError(
            "fiber solve residual %.3g too large at w = %s (cond %.3g)"
            % (res, fm.w, fm.cond), offending=fm.w, cond=fm.cond)
    return f


def cauchy_kernel(r, j, lam, w):
    """Kernel K_j(lam, w) whose delta-weighted sum reproduces 1/(lam - z)."""
    return (1.0 / (lam - r.lambdas[j])) * (r(lam) / (r(lam) - w))


@dataclass
class Representation:
    """Per-root power-series coefficients alpha[j, k] of f_j around w = 0,
    valid on |w| < rho, with the arclength factors L[j] controlling the
    coefficient decay |alpha[j, k]| <= L[j] * max_phi * rho^(-k)."""
    r: RationalFunction
    rho: float
    alpha: np.ndarray
    L: np.ndarray
    max_phi: float
    J: tuple = None
    n_nodes: int = 0

    @property
    def order(self):
        return self.alpha.shape[1] - 1

    @property
    def tail_bound(self):
        """Prefactor of the geometric tail: max_j L_j times the sup of |phi|."""
        return float(np.max(self.L) * self.max_phi)

    def component_value(self, w, K=None):
        """f_j(w) for all j by Horner on the stored coefficients."""
        w = np.asarray(w, dtype=complex)
        hi = self.order if K is None else min(K, self.order)
        out = np.zeros((self.alpha.shape[0],) + w.shape, dtype=complex)
        for k in range(hi, -1, -1):
            out = out * w + self.alpha[:, k][(...,) + (None,) * w.ndim]
        return out

    def tail_profile(self, abs_w, K):
        """Per-root geometric bound on |sum_{k>K} alpha[j,k] w^k|."""
        t = float(abs_w) / self.rho
        if t >= 1:
            raise DomainError("|w| = %g is outside the disc of radius %g"
                              % (abs_w, self.rho))
        return self.L * self.max_phi * t ** (K + 1) / (1.0 - t)

    def reconstruct(self, z, K=None):
        return reconstruct(self, z, K)


def reconstruct(rep, z, K_trunc=None):
    """phi(z) = sum_j delta_j(z) f_j(r(z)) from the stored series."""
    z = np.asarray(z, dtype=complex)
    w = rep.r(z)
    absw = np.abs(w)
    if np.any(absw >= rep.rho):
        raise DomainError(
            "|r(z)| = %g reaches outside the disc of radius %g"
            % (float(np.max(absw)), rep.rho))
    dv = rep.r.delta_all(z)
    fv = rep.component_value(w, K_trunc)
    out = np.sum(dv * fv, axis=0)
    return complex(out) if out.ndim == 0 else out


def _loops_for(contour, r, J):
    """Select the loops carrying the requested root subset, including
    root-free hole boundaries nested inside a selected outer loop."""
    enclosed = [tuple(lp.enclosed(r.lambdas)) for lp in contour.loops]
    d = r.d
    if J is None:
        covered = set().union(*[set(e) for e in enclosed]) if enclosed else set()
        missing = set(range(d)) - covered
        if missing:
            raise ValidationError(
                "contour does not enclose numerator roots %s; enlarge the window"
                % sorted(missing))
        return list(range(len(contour.loops))), tuple(range(d))
    Jset = set(int(j) for j in J)
    if not Jset <= set(range(d)):
        raise ValidationError("root subset %s out of range" % sorted(Jset))
    selected = [i for i, e in enumerate(enclosed) if set(e) & Jset]
    for i in selected:
        extra = set(enclosed[i]) - Jset
        if extra:
            raise ValidationError(
                "a loop around roots %s also encloses roots %s; "
                "the subset is not isolated at this level"
                % (sorted(set(enclosed[i]) & Jset), sorted(extra)))
    covered = set().union(*[set(enclosed[i]) for i in selected]) if selected else set()
    if covered != Jset:
        raise ValidationError(
            "no loop encloses roots %s at this level" % sorted(Jset - covered))
    outer = [i for i in selected if enclosed[i]]
    for i, e in enumerate(enclosed):
        if e or i in selected:
            continue
        probe = contour.loops[i].vertices[0]
        if any(contour.loops[o].winding_around(probe) != 0 for o in outer):
            selected.append(i)
    return sorted(selected), tuple(sorted(Jset))


def _alpha_once(r, phi, contour, N, loop_idxs, loop_values):
    # all d rows are integrated even when only some loops are selected:
    # the rows for roots outside the selection carry the cancellation
    # that makes the series vanish on the unselected components
    d = r.d
    alpha = np.zeros((d, N + 1), dtype=complex)
    L = np.zeros(d)
    max_phi = 0.0
    nodes_total = 0
    for i in loop_idxs:
        lp = contour.loops[i]
        nodes_total += len(lp.nodes)
        if loop_values is not None:
            vals = np.full(len(lp.nodes), complex(loop_values[i]))
        else:
            vals = _phi_on(phi, lp.nodes)
        max_phi = max(max_phi, float(np.max(np.abs(vals))))
        wk = lp.r_nodes
        inv_w_pow = np.ones_like(wk)
        base = vals * lp.dl_weights / (2j * np.pi)
        for k in range(N + 1):
            contrib = base * inv_w_pow
            for j in range(d):
                alpha[j, k] += np.sum(contrib / (lp.nodes - r.lambdas[j]))
            inv_w_pow = inv_w_pow / wk
        for j in range(d):
            L[j] += float(np.sum(lp.absdl_weights / np.abs(lp.nodes - r.lambdas[j]))) / (2 * np.pi)
    return alpha, L, max_phi, nodes_total


def cauchy_coefficients(r, phi, contour, N, J=None, loop_values=None,
                        tol=1e-9, max_doublings=6):
    """Series coefficients alpha[j, k] by contour quadrature.

    alpha[j, k] integrates phi(lam) / ((lam - lambda_j) r(lam)^k) over the
    level-curve loops around the roots in J (all roots when J is None).
    loop_values, keyed by loop index, replaces phi with a constant per
    loop (the piecewise-constant case).  Node counts are doubled until
    the coefficients move by less than 0.1 * tol.
    """
    if N < 0:
        raise ValidationError("series order must be nonnegative")
    rho = contour.level
    if rho ** (-max(N, 1)) > 1e250:
        raise ValidationError(
            "level %g is too small for %d series terms" % (rho, N))
    loop_idxs, J_eff = _loops_for(contour, r, J)
    if phi is None and loop_values is None:
        raise ValidationError("need either phi or per-loop constants")
    cur = contour
    alpha, L, max_phi, n_nodes = _alpha_once(r, phi, cur, N, loop_idxs,
                                             loop_values)
    # convergence is measured in the disc norm sup_k |change_k| rho^k:
    # the raw alpha_k carry an unavoidable rho^(-k) * eps roundoff floor
    # that is harmless wherever the series is evaluated (|w| < rho)
    pw = rho ** np.arange(N + 1)
    change = None
    for _ in range(max_doublings):
        cur = cur.with_nodes(2)
        alpha2, L2, max_phi2, n_nodes2 = _alpha_once(r, phi, cur, N, loop_idxs,
                                                     loop_values)
        scale = max(1.0, float(np.max(np.abs(alpha2) * pw)))
        change = float(np.max(np.abs(alpha2 - alpha) * pw)) / scale
        alpha, L, max_phi, n_nodes = alpha2, L2, max_phi2, n_nodes2
        if change < 0.1 * tol:
            break
    else:
        raise ConvergenceError(
            "quadrature still moving by %.3g after %d doublings"
            % (change, max_doublings), achieved=change)
    return Representation(r=r, rho=rho, alpha=alpha, L=L, max_phi=max_phi,
                          J=None if J is None else J_eff, n_nodes=n_nodes)


# -- Taylor coefficients from derivative data -------------------------

def _bell_table(x, N):
    """Partial exponential Bell polynomials B[mu][l] built from x[1..N]."""
    B = np.zeros((N + 1, N + 1), dtype=complex)
    B[0, 0] = 1.0
    for mu in range(1, N + 1):
        for l in range(1, mu + 1):
            acc = 0j
            for i in range(1, mu - l + 2):
                acc += math.comb(mu - 1, i - 1) * x[i] * B[mu - i, l - 1]
            B[mu, l] = acc
    return B


def taylor_from_derivatives(r, phi_derivs, max_depth=10):
    """Taylor coefficients f_j^(nu)(0) / nu! from phi^(nu)(lambda_j).

    phi_derivs has shape (d, N+1) with plain derivative values (not
    divided by factorials).  The triangular recursion peels the leading
    chain-rule term r'(lambda_j)^nu f_j^(nu)(0) off the nu-th derivative
    of the representation identity; everything else is lower order.
    """
    phi_derivs = np.asarray(phi_derivs, dtype=complex)
    if phi_derivs.ndim != 2 or phi_derivs.shape[0] != r.d:
        raise ValidationError("derivative data must have shape (d, N+1)")
    N = phi_derivs.shape[1] - 1
    if N > max_depth:
        raise ValidationError(
            "derivative order %d exceeds the configured depth %d"
            % (N, max_depth))
    d = r.d
    rd = np.array([r_derivatives_at(r, lam, N) for lam in r.lambdas])
    dd = np.empty((d, d, N + 1), dtype=complex)
    for j in range(d):
        for k in range(d):
            dd[j, k] = delta_derivatives_at(r, k, r.lambdas[j], N)
    bells = [_bell_table(rd[j], N) for j in range(d)]

    F = np.zeros((d, N + 1), dtype=complex)
    F[:, 0] = phi_derivs[:, 0]
    for nu in range(1, N + 1):
        for j in range(d):
            B = bells[j]
            h = 0j
            for mu in range(nu):
                comb = math.comb(nu, mu)
                inner = np.zeros(d, dtype=complex)
                for k in range(d):
                    inner[k] = np.dot(B[mu, : mu + 1], F[k, : mu + 1])
                h += comb * np.dot(dd[j, :, nu - mu], inner)
            h += np.dot(B[nu, :nu], F[j, :nu])
            F[j, nu] = (phi_derivs[j, nu] - h) / rd[j, 1] ** nu
    facts = np.array([math.factorial(nu) for nu in range(N + 1)])
    return F / facts


# -- conversion between polynomial and rational variables -------------

class PointwiseRepresentative:
    """Vector representative defined through pointwise fiber solves."""

    def __init__(self, r, phi):
        self.r = r
        self.phi = phi

    def at(self, w):
        return represent_pointwise(self.r, self.phi, w)

    def reconstruct(self, z):
        z = complex(z)
        w = self.r(z)
        dv = self.r.delta_all(np.array([z]))[:, 0]
        return complex(np.dot(dv, self.at(w)))


def convert_poly_to_rational(F, q):
    """Re-express a polynomial-variable representation over denominator q.

    F must be a Representation whose rational function has a constant
    denominator (the polynomial calculus); the result represents the
    same scalar function in the variable p/q with identical root
    indexing, realized by pointwise fiber solves against the scalar
    function that F reconstructs.
    """
    if not isinstance(F, Representation):
        raise ValidationError("expected a Representation")
    if F.r.q.degree is not None and F.r.q.degree != 0:
        raise ValidationError("source representation must use a constant denominator")
    if not isinstance(q, Polynomial):
        q = Polynomial(q)
    r_new = RationalFunction(F.r.p, q, lambdas=F.r.lambdas)
    return PointwiseRepresentative(r_new, lambda z: F.reconstruct(z))
