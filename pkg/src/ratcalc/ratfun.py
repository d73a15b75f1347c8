"""Rational functions r = p/q with simple numerator roots.

The numerator roots lambda_j index everything downstream: the rational
partition of unity delta_j, fibers of r, critical data and the exact
derivative chains used by the Taylor recursion.
"""

import numpy as np

from .cpoly import Polynomial, poly_roots, sort_roots
from .errors import PoleError, ValidationError

__all__ = ["RationalFunction", "DeltaBasis", "rat_eval", "delta_eval",
           "critical_points", "fiber"]

_SEP_TOL = 1e-8      # relative pairwise-root separation
_QROOT_TOL = 1e-12   # relative lower bound on |q(lambda_j)|
_POLE_TOL = 1e-12    # relative pole clearance for strict evaluation


class RationalFunction:
    """r = p/q with deg q < deg p and all roots of p simple.

    lambdas may be passed explicitly to fix their indexing (they must be
    roots of p); otherwise roots are computed and sorted deterministically.
    """

    def __init__(self, p, q, lambdas=None, tol=1e-8):
        if not isinstance(p, Polynomial):
            p = Polynomial(p)
        if not isinstance(q, Polynomial):
            q = Polynomial(q)
        if p.degree is None or p.degree < 1:
            raise ValidationError("numerator must have degree >= 1")
        if q.is_zero:
            raise ValidationError("denominator must be nonzero")
        if q.degree >= p.degree:
            raise ValidationError(
                "need deg q < deg p, got deg p = %d, deg q = %d"
                % (p.degree, q.degree)
            )
        self.p = p
        self.q = q
        self.d = p.degree

        if lambdas is None:
            lam = poly_roots(p, tol)
        else:
            lam = np.asarray(lambdas, dtype=complex)
            if len(lam) != self.d:
                raise ValidationError(
                    "expected %d numerator roots, got %d" % (self.d, len(lam))
                )
            res = np.abs(p(lam)) if self.d > 1 else np.array([abs(p(lam[0]))])
            if np.max(res) > tol * p.coefficient_scale() * 100:
                raise ValidationError("supplied lambdas are not roots of p")
        scale = np.max(np.abs(lam)) + 1.0
        for i in range(self.d):
            for j in range(i + 1, self.d):
                if abs(lam[i] - lam[j]) <= _SEP_TOL * scale:
                    raise ValidationError(
                        "numerator roots %s and %s are not simple enough"
                        % (lam[i], lam[j])
                    )
        qvals = np.abs(q(lam)) if self.d > 1 else np.array([abs(q(lam[0]))])
        if np.min(qvals) <= _QROOT_TOL * q.coefficient_scale() * scale ** max(q.degree, 0):
            k = int(np.argmin(qvals))
            raise ValidationError(
                "q vanishes at numerator root lambda_%d = %s" % (k, lam[k])
            )
        self.lambdas = np.array(lam)

        self.pprime = p.derivative()
        self.qprime = q.derivative()
        # p'(lambda_j) as the root-difference product: the delta scale
        # factors divide by it, and the coefficient form cancels
        # catastrophically when numerator roots cluster
        lead = p.coeffs[-1]
        self.pprime_at_lambda = np.array(
            [lead * np.prod(l - np.delete(self.lambdas, j))
             for j, l in enumerate(self.lambdas)]
        )
        # r' at the numerator roots reduces to p'/q there
        self.rprime_at_lambda = self.pprime_at_lambda / np.array(
            [q(l) for l in self.lambdas]
        )
        # u_j = p / (z - lambda_j), used for exact delta evaluation
        self._deflations = []
        for l in self.lambdas:
            u, rem = p.deflate(l)
            self._deflations.append(u)
        self._pole_scale = q.coefficient_scale()

    # -- evaluation ---------------------------------------------------

    def _qsafe(self, z):
        return self.q(z)

    def __call__(self, z):
        """Strict evaluation; raises PoleError near zeros of q."""
        z = np.asarray(z, dtype=complex)
        qv = self.q(z)
        bad = np.abs(qv) <= _POLE_TOL * self._pole_scale * (np.abs(z) + 1.0) ** max(self.q.degree, 0)
        if np.any(bad):
            where = z[bad] if z.ndim else z
            raise PoleError("evaluation at a pole of r: %s" % where, where=where)
        out = self.p(z) / qv
        return complex(out) if np.ndim(out) == 0 else out

    def abs_eval(self, z):
        """|r(z)| with poles mapped to +inf; never raises."""
        z = np.asarray(z, dtype=complex)
        pv = np.abs(self.p(z))
        qv = np.abs(self.q(z))
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(qv > 0, pv / np.where(qv == 0, 1.0, qv), np.inf)
        out = np.where((qv == 0) & (pv == 0), 0.0, out)  # cannot happen for valid r
        return float(out) if np.ndim(out) == 0 else out

    def rprime(self, z):
        z = np.asarray(z, dtype=complex)
        qv = self.q(z)
        num = self.pprime(z) * qv - self.p(z) * self.qprime(z)
        out = num / qv ** 2
        return complex(out) if np.ndim(out) == 0 else out

    # -- delta basis --------------------------------------------------

    def delta_all(self, z):
        """All delta_j(z) stacked along the first axis.

        Evaluates q(lambda_j) u_j(z) / (p'(lambda_j) q(z)), which has no
        removable singularity at the lambda_j themselves.
        """
        z = np.asarray(z, dtype=complex)
        qv = self.q(z)
        bad = np.abs(qv) <= _POLE_TOL * self._pole_scale * (np.abs(z) + 1.0) ** max(self.q.degree, 0)
        if np.any(bad):
            raise PoleError("delta basis evaluated at a pole of r", where=z)
        rows = []
        for j in range(self.d):
            l = self.lambdas[j]
            rows.append(self.q(l) * self._deflations[j](z)
                        / (self.pprime_at_lambda[j] * qv))
        return np.array(rows)

    def delta(self, j, z):
        l = self.lambdas[j]
        qv = self.q(np.asarray(z, dtype=complex))
        out = self.q(l) * self._deflations[j](z) / (self.pprime_at_lambda[j] * qv)
        return complex(out) if np.ndim(out) == 0 else out

    def delta_basis(self):
        return DeltaBasis(self)

    # -- structure ----------------------------------------------------

    def critical_points(self, tol=1e-8):
        """Finite critical points (z_c, r(z_c)), poles excluded."""
        num = self.pprime * self.q - self.p * self.qprime
        if num.is_zero or num.degree is None or num.degree < 1:
            return []
        zs = poly_roots(num, tol)
        out = []
        scale = self._pole_scale
        for z in zs:
            if abs(self.q(z)) <= 1e-9 * scale * (abs(z) + 1.0) ** max(self.q.degree, 0):
                continue
            out.append((complex(z), complex(self.p(z) / self.q(z))))
        return out

    def critical_values(self, tol=1e-8):
        return [w for _, w in self.critical_points(tol)]

    def fiber(self, w, tol=1e-8):
        """The d roots of p - w q, with multiplicity, in deterministic order."""
        shifted = self.p - complex(w) * self.q
        return poly_roots(shifted, tol)

    def scaled(self, factor):
        """Rational function factor * r; numerator roots keep their order."""
        return RationalFunction(self.p * complex(factor), self.q,
                                lambdas=self.lambdas)

    def __repr__(self):
        return "RationalFunction(deg p=%d, deg q=%s, d=%d)" % (
            self.p.degree, self.q.degree, self.d)


class DeltaBasis:
    """The rational partition of unity attached to the numerator roots."""

    def __init__(self, parent):
        if not isinstance(parent, RationalFunction):
            raise ValidationError("DeltaBasis needs a RationalFunction parent")
        self.parent = parent
        self.rprime_at_lambda = parent.rprime_at_lambda
        if np.any(np.abs(self.rprime_at_lambda) == 0):
            raise ValidationError("some lambda_j is a critical point of r")

    def eval(self, j, z):
        return self.parent.delta(j, z)

    def eval_all(self, z):
        return self.parent.delta_all(z)


# module-level wrappers keeping the operation names explicit


def rat_eval(r, z):
    return r(z)


def delta_eval(basis, j, z):
    if isinstance(basis, RationalFunction):
        basis = basis.delta_basis()
    return basis.eval(j, z)


def critical_points(r, tol=1e-8):
    return r.critical_points(tol)


def fiber(r, w, tol=1e-8):
    return r.fiber(w, tol)


# -- exact derivative chains -----------------------------------------


def rational_derivatives(num, den, z, order):
    """Values of the first `order` derivatives of num/den at z.

    Uses the exact polynomial recursion n_{m+1} = n_m' den - (m+1) n_m den',
    for which the m-th derivative value is n_m(z) / den(z)^{m+1}.
    Returns an array of length order+1 starting with the plain value.
    """
    dz = den(z)
    if abs(dz) == 0:
        raise PoleError("derivative chain evaluated at a pole", where=z)
    dprime = den.derivative()
    out = np.empty(order + 1, dtype=complex)
    n_m = num
    for m in range(order + 1):
        out[m] = n_m(z) / dz ** (m + 1)
        n_m = n_m.derivative() * den - (m + 1) * n_m * dprime
    return out


def r_derivatives_at(r, z, order):
    """(r, r', ..., r^(order)) evaluated exactly at z."""
    return rational_derivatives(r.p, r.q, z, order)


def delta_derivatives_at(r, k, z, order):
    """Derivatives of delta_k at z via the deflated numerator form."""
    l = r.lambdas[k]
    num = r._deflations[k] * (r.q(l) / r.pprime_at_lambda[k])
    return rational_derivatives(num, r.q, z, order)
