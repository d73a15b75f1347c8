"""Functional calculus for dense square matrices driven by a rational
function: r(A), the root-indexed partition matrices delta_j(A), power
series evaluation of phi(A) from stored coefficients, and the constant
K that turns a sup over the sublevel region into a bound on ||phi(A)||.

Everything is desk scale: dense matrices, direct solves, eigenvalues
used freely for prechecks and cross-checks.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .errors import (ClearanceError, ConvergenceError, PoleError,
                     ValidationError)
from .lemniscate import level_window, trace_level_curve
from .ratfun import RationalFunction
from .represent import Representation, fiber_matrix


def _as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError("expected a square matrix, got shape %s"
                              % (A.shape,))
    if not np.all(np.isfinite(A)):
        raise ValidationError("matrix has non-finite entries")
    return A


def polyval_matrix(poly, A) -> np.ndarray:
    """Horner evaluation of a polynomial (ascending coeffs) at a matrix."""
    A = _as_matrix(A)
    n = A.shape[0]
    c = np.asarray(poly.coeffs, dtype=complex)
    out = c[-1] * np.eye(n, dtype=complex)
    for k in range(len(c) - 2, -1, -1):
        out = out @ A + c[k] * np.eye(n, dtype=complex)
    return out


def _check_poles(r: RationalFunction, A: np.ndarray, tol: float = 1e-10):
    """Eigenvalues sitting on a zero of the denominator make q(A) singular."""
    eigs = np.linalg.eigvals(A)
    scale = r.q.coefficient_scale() * max(1.0, np.max(np.abs(eigs)) ** max(
        r.q.degree, 0))
    qe = np.abs(r.q(eigs))
    j = int(np.argmin(qe))
    if qe[j] < tol * scale:
        raise PoleError(
            "denominator vanishes at an eigenvalue estimate %s"
            % format(eigs[j], ".6g"), where=eigs[j])
    return eigs


def denominator_condition(r: RationalFunction, A) -> float:
    """Condition number of q(A), the solve behind every r(A) evaluation."""
    return float(np.linalg.cond(polyval_matrix(r.q, _as_matrix(A))))


def mat_rational(r: RationalFunction, A) -> np.ndarray:
    """r(A) = p(A) q(A)^{-1} through a linear solve (the factors commute)."""
    A = _as_matrix(A)
    _check_poles(r, A)
    P = polyval_matrix(r.p, A)
    Q = polyval_matrix(r.q, A)
    return np.linalg.solve(Q, P)


def mat_delta(r: RationalFunction, A) -> List[np.ndarray]:
    """The images delta_j(A) of the root-indexed partition of unity.

    delta_j = q(lambda_j)/p'(lambda_j) * u_j / q with the polynomial
    u_j = p/(z - lambda_j), so only one matrix inverse (of q(A)) is
    shared by all d pieces.  Their sum is the identity.
    """
    A = _as_matrix(A)
    _check_poles(r, A)
    Q = polyval_matrix(r.q, A)
    lam = np.asarray(r.lambdas)
    out = []
    for j, root in enumerate(lam):
        u_j, _ = r.p.deflate(root)
        # scale by the root-product form of p'(root): stable under
        # clustered numerator roots where the coefficient form cancels
        c_j = r.q(root) / r.pprime_at_lambda[j]
        out.append(c_j * np.linalg.solve(Q, polyval_matrix(u_j, A)))
    return out


@dataclass(frozen=True)
class SpectralRadiusReport:
    estimate: float
    eig_radius: float
    sequence: tuple  # (m, ||B^m||^(1/m)) along doubling powers

    def as_dict(self):
        return {
            "estimate": self.estimate,
            "eig_radius": self.eig_radius,
            "sequence": [[int(m), float(v)] for m, v in self.sequence],
        }


def spectral_radius_estimate(B, m_max: int = 64) -> SpectralRadiusReport:
    """Decay rate of powers: ||B^m||^(1/m) along m = 1, 2, 4, ... m_max.

    The sequence is non-increasing along doublings and converges to the
    spectral radius; the exact eigenvalue radius is reported with it.
    Powers are renormalized at every squaring so nothing overflows.
    """
    B = _as_matrix(B)
    eig_radius = float(np.max(np.abs(np.linalg.eigvals(B)))) if B.size else 0.0
    seq = []
    m = 1
    cur = B.copy()  # cur = B^m / exp(log_scale)
    log_scale = 0.0
    while m <= m_max:
        nrm = float(np.linalg.norm(cur, 2))
        if nrm == 0.0:
            seq.append((m, 0.0))
            return SpectralRadiusReport(0.0, eig_radius, tuple(seq))
        seq.append((m, float(np.exp((np.log(nrm) + log_scale) / m))))
        if 2 * m > m_max:
            break
        cur = cur / nrm
        log_scale = 2.0 * (log_scale + np.log(nrm))
        cur = cur @ cur
        m *= 2
    return SpectralRadiusReport(seq[-1][1], eig_radius, tuple(seq))


def mat_apply(rep: Representation, A, tol: float = 1e-9) -> np.ndarray:
    """phi(A) from stored series coefficients:
    sum_k (sum_j alpha[j,k] delta_j(A)) r(A)^k.

    Truncation is driven by the measured decay of ||r(A)^k||, floored at
    the exact eigenvalue rate, against the stored coefficient bounds; if
    the stored order cannot certify the requested tolerance the series
    is considered unresolved rather than silently truncated.
    """
    A = _as_matrix(A)
    r = rep.r
    W = mat_rational(r, A)
    rho_hat = float(np.max(np.abs(np.linalg.eigvals(W))))
    if rho_hat >= rep.rho:
        raise ConvergenceError(
            "series diverges: spectral radius of r(A) measured at %.6g, "
            "needs < %.6g" % (rho_hat, rep.rho), achieved=rho_hat)
    deltas = np.stack(mat_delta(r, A))
    dnorms = np.array([np.linalg.norm(D, 2) for D in deltas])
    coefsum = float(np.sum(dnorms * rep.L) * rep.max_phi)

    n = A.shape[0]
    total = np.zeros((n, n), dtype=complex)
    Wk = np.eye(n, dtype=complex)
    wnorms = [1.0]
    tail = np.inf
    for k in range(rep.order + 1):
        term = np.einsum("j,jab->ab", rep.alpha[:, k], deltas)
        total += term @ Wk
        Wk = Wk @ W
        wn = float(np.linalg.norm(Wk, 2))
        wnorms.append(wn)
        if wn == 0.0:
            return total  # powers vanish exactly, the series is finite
        win = min(k + 1, 6)
        ratio = (wnorms[-1] / wnorms[-1 - win]) ** (1.0 / win) \
            if wnorms[-1 - win] > 0 else rho_hat
        eta = max(rho_hat, ratio)
        if eta >= rep.rho:
            continue  # no certificate at this depth yet
        tail = coefsum * wn * rep.rho ** (-(k + 1)) / (1.0 - eta / rep.rho)
        if tail <= tol * max(1.0, float(np.linalg.norm(total, 2))):
            return total
    raise ConvergenceError(
        "stored series order %d cannot certify tolerance %g "
        "(decay rate %.4g against disc radius %.4g)"
        % (rep.order, tol, rho_hat, rep.rho),
        achieved=None if not np.isfinite(tail) else tail)


def _fiber_inverse_sup(r: RationalFunction, R: float, n0: int,
                       rel: float = 0.01, max_doublings: int = 5):
    """Sampled sup of the infinity norm of the inverse fiber matrix on
    |w| = R; the maximum principle puts the true sup on that circle."""
    n = max(8, int(n0))
    prev = None
    for _ in range(max_doublings + 1):
        thetas = 2.0 * np.pi * np.arange(n) / n
        cur = 0.0
        for t in thetas:
            fm = fiber_matrix(r, R * np.exp(1j * t))
            cur = max(cur, float(
                np.linalg.norm(np.linalg.inv(fm.entries), np.inf)))
        if prev is not None and abs(cur - prev) <= rel * cur:
            return cur, n
        prev = cur
        n *= 2
    raise ConvergenceError(
        "boundary sup still moving by more than %g%% at %d samples"
        % (100 * rel, n // 2), achieved=abs(cur - prev) / cur)


@dataclass(frozen=True)
class KSpectralReport:
    """Everything behind the estimate ||phi(A)|| <= K sup |phi|, the sup
    running over the closed sublevel region {|r| <= R}."""
    R: float
    C_rR: float
    delta_norms: tuple
    K: float
    s_R: float  # distance from the level curve to the nearest critical point
    n_boundary: int

    def as_dict(self):
        return {
            "R": self.R,
            "C_rR": self.C_rR,
            "delta_norms": [float(v) for v in self.delta_norms],
            "K": self.K,
            "s_R": self.s_R,
            "n_boundary": self.n_boundary,
        }


def _curve_clearance(r: RationalFunction, R: float, window=None) -> float:
    zc = [z for z, _ in r.critical_points()]
    if len(zc) == 0:
        return float("inf")
    if R == 0.0:
        lam = np.asarray(r.lambdas)
        return float(min(abs(l - c) for l in lam for c in zc))
    win = window if window is not None else level_window(r, R)
    contour = trace_level_curve(r, R, win)
    best = float("inf")
    for lp in contour.loops:
        for c in zc:
            best = min(best, float(np.min(np.abs(lp.vertices - c))))
    return best


def kspectral(r: RationalFunction, R: float, A, boundary_samples: int = 512,
              window=None) -> KSpectralReport:
    """Constant K = C(r,R) * sum_j ||delta_j(A)|| with C(r,R) the sampled
    sup of the inverse fiber matrix norm over |w| <= R.

    Requires ||r(A)||_2 <= R (the series argument needs the powers of
    r(A) controlled by R) and no critical value inside the closed disc
    of radius R (the fiber would degenerate there).
    """
    A = _as_matrix(A)
    if R < 0:
        raise ValidationError("R must be nonnegative")
    rnorm = float(np.linalg.norm(mat_rational(r, A), 2))
    if rnorm > R + 1e-10 * max(1.0, R):
        raise ValidationError(
            "hypothesis ||r(A)|| <= R fails: measured %.6g against R = %.6g"
            % (rnorm, R))
    crit = r.critical_values()
    inside = [w for w in np.atleast_1d(crit) if abs(w) <= R]
    if inside:
        raise ClearanceError(
            "critical values inside the sampling disc: "
            + ", ".join(format(w, ".6g") for w in inside),
            offending=inside)
    dnorms = tuple(float(np.linalg.norm(D, 2)) for D in mat_delta(r, A))
    if R == 0.0:
        c_sup, n_used = 1.0, 0  # the fiber matrix at w = 0 is the identity
    else:
        c_sup, n_used = _fiber_inverse_sup(r, R, boundary_samples)
    s_r = _curve_clearance(r, R, window)
    return KSpectralReport(R=float(R), C_rR=c_sup, delta_norms=dnorms,
                           K=c_sup * float(sum(dnorms)), s_R=s_r,
                           n_boundary=n_used)


def region_sup(r: RationalFunction, R: float, phi, window=None,
               resolution: int = 300) -> float:
    """Sampled sup of |phi| over the closed sublevel region {|r| <= R}:
    traced boundary nodes plus the interior grid points."""
    win = window if window is not None else level_window(r, R)
    contour = trace_level_curve(r, R, win)
    best = 0.0
    for lp in contour.loops:
        best = max(best, float(np.max(np.abs(phi(lp.nodes)))))
    z = win.mesh(resolution, resolution)
    mask = r.abs_eval(z) <= R
    if np.any(mask):
        best = max(best, float(np.max(np.abs(phi(z[mask])))))
    return best

