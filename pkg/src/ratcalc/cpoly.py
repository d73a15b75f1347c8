"""Dense complex polynomials: arithmetic, evaluation, roots, Lagrange bases."""

import numpy as np

from .errors import InputError, RootSolveError, ValidationError

__all__ = ["Polynomial", "poly_eval", "poly_roots", "poly_derivative", "lagrange_basis"]


def _trim(coeffs):
    c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    if c.ndim != 1:
        raise InputError("coefficients must be one-dimensional")
    n = len(c)
    while n > 1 and c[n - 1] == 0:
        n -= 1
    return np.array(c[:n])


class Polynomial:
    """Polynomial with dense complex coefficients in ascending degree order.

    Trailing zero coefficients are trimmed on construction.  The zero
    polynomial is represented by the single coefficient 0 and reports
    degree None rather than a numeric sentinel.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = _trim(coeffs)

    @property
    def degree(self):
        if len(self.coeffs) == 1 and self.coeffs[0] == 0:
            return None
        return len(self.coeffs) - 1

    @property
    def is_zero(self):
        return self.degree is None

    @classmethod
    def from_roots(cls, roots, lead=1.0):
        c = np.array([complex(lead)])
        for r in np.asarray(roots, dtype=complex):
            c = np.convolve(c, np.array([-r, 1.0]))
        return cls(c)

    @classmethod
    def one(cls):
        return cls([1.0])

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for c in self.coeffs[::-1]:
            out = out * z + c
        if out.ndim == 0:
            return complex(out)
        return out

    def __len__(self):
        return len(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return len(self.coeffs) == len(other.coeffs) and bool(
            np.all(self.coeffs == other.coeffs)
        )

    def __add__(self, other):
        if np.isscalar(other) or isinstance(other, complex):
            other = Polynomial([other])
        if not isinstance(other, Polynomial):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        a = np.zeros(n, dtype=complex)
        a[: len(self.coeffs)] = self.coeffs
        a[: len(other.coeffs)] += other.coeffs
        return Polynomial(a)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-self.coeffs)

    def __sub__(self, other):
        if np.isscalar(other):
            other = Polynomial([other])
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other) or isinstance(other, complex):
            return Polynomial(self.coeffs * complex(other))
        if not isinstance(other, Polynomial):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return Polynomial([0.0])
        return Polynomial(np.convolve(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise InputError("polynomial powers must be nonnegative integers")
        out = Polynomial([1.0])
        for _ in range(n):
            out = out * self
        return out

    def derivative(self):
        if len(self.coeffs) == 1:
            return Polynomial([0.0])
        k = np.arange(1, len(self.coeffs))
        return Polynomial(self.coeffs[1:] * k)

    def monic(self):
        if self.is_zero:
            raise ValidationError("zero polynomial has no monic form")
        return Polynomial(self.coeffs / self.coeffs[-1])

    def deflate(self, root):
        """Synthetic division by (z - root); returns (quotient, remainder)."""
        if self.is_zero:
            return Polynomial([0.0]), 0.0
        c = self.coeffs
        n = len(c)
        out = np.zeros(max(n - 1, 1), dtype=complex)
        acc = c[n - 1]
        for k in range(n - 2, -1, -1):
            out[k] = acc
            acc = c[k] + acc * root
        return Polynomial(out), complex(acc)

    def coefficient_scale(self):
        return float(np.max(np.abs(self.coeffs)))

    def roots(self, tol=1e-8):
        return poly_roots(self, tol)

    def __repr__(self):
        return "Polynomial(%s)" % (list(self.coeffs),)


def poly_eval(poly, z):
    """Horner evaluation; accepts scalars or arrays."""
    return poly(z)


def poly_derivative(poly):
    return poly.derivative()


def sort_roots(roots):
    # deterministic ordering: lexicographic by (real, imag), rounded at 1e-10
    roots = np.asarray(roots, dtype=complex)
    key = sorted(range(len(roots)),
                 key=lambda i: (round(roots[i].real, 10), round(roots[i].imag, 10)))
    return roots[key]


def _aberth(coeffs, maxiter=120):
    # simultaneous Newton-type iteration; coeffs ascending, leading nonzero
    c = coeffs / coeffs[-1]
    n = len(c) - 1
    dp = c[1:] * np.arange(1, n + 1)
    radius = 1.0 + np.max(np.abs(c[:-1]))
    k = np.arange(n)
    z = radius * np.exp(2j * np.pi * (k + 0.35) / n) * (0.6 + 0.4 * (k % 3) / 2.0)
    for _ in range(maxiter):
        # iterates can overshoot to huge values before settling; anything
        # non-finite is dropped below, so silence the intermediate overflow
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            pv = np.polyval(c[::-1], z)
            pd = np.polyval(dp[::-1], z)
            newton = np.where(pd != 0, pv / np.where(pd == 0, 1, pd), 0.0)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            s = np.sum(1.0 / diff, axis=1)
            w = newton / (1.0 - newton * s)
        w = np.where(np.isfinite(w), w, 0.0)
        z = z - w
        if np.max(np.abs(w)) < 1e-14 * (1.0 + np.max(np.abs(z))):
            break
    return z


def _polish(coeffs, roots, steps=3):
    c = coeffs
    dp = c[1:] * np.arange(1, len(c))
    z = roots.copy()
    for _ in range(steps):
        pv = np.polyval(c[::-1], z)
        pd = np.polyval(dp[::-1], z)
        ok = np.abs(pd) > 1e-300
        step = np.zeros_like(z)
        step[ok] = pv[ok] / pd[ok]
        # only keep a Newton step if it reduces the residual
        cand = z - step
        better = np.abs(np.polyval(c[::-1], cand)) < np.abs(pv)
        z = np.where(better, cand, z)
    return z


def poly_roots(poly, tol=1e-8):
    """All complex roots with multiplicity, deterministically ordered.

    Residuals are checked against tol * max|coeff|; an Aberth sweep is
    tried first and a companion-matrix solve covers what it misses
    (clustered and multiple roots in particular).
    """
    if poly.degree is None or poly.degree < 1:
        raise InputError("root finding needs degree >= 1")
    c = poly.coeffs
    scale = poly.coefficient_scale()
    thresh = tol * scale

    # intermediate overflow is routine for degenerate coefficient sets;
    # the residual check below is the arbiter
    with np.errstate(all="ignore"):
        z = _polish(c, _aberth(c))
        if np.max(np.abs(np.polyval(c[::-1], z))) <= thresh:
            return sort_roots(z)

        z = np.roots(c[::-1])
        z = _polish(c, z)
        res = np.abs(np.polyval(c[::-1], z))
    if np.max(res) > thresh:
        raise RootSolveError(
            "root residuals %.3e exceed %.3e" % (float(np.max(res)), thresh),
            residuals=res,
        )
    return sort_roots(z)


def lagrange_basis(nodes, tol=1e-12):
    """Lagrange interpolation polynomials for pairwise distinct nodes.

    basis[k](nodes[j]) is the Kronecker delta and the basis sums to the
    constant 1.  Coincident nodes are rejected naming the offending pair.
    """
    nodes = np.asarray(nodes, dtype=complex)
    n = len(nodes)
    if n == 0:
        raise InputError("need at least one node")
    sep = tol * (np.max(np.abs(nodes)) + 1.0)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(nodes[i] - nodes[j]) <= sep:
                raise ValidationError(
                    "coincident interpolation nodes %d and %d: %s ~ %s"
                    % (i, j, nodes[i], nodes[j])
                )
    basis = []
    for k in range(n):
        others = np.delete(nodes, k)
        num = Polynomial.from_roots(others)
        denom = num(nodes[k])
        basis.append(num * (1.0 / denom))
    return basis
