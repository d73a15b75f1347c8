"""Commutative algebra of component vectors over a disc of r-values.

Vector-valued functions f: M -> C^d (M a finite sample set of w points)
multiply through a deformed pointwise product

    (f * g)_m = f_m g_m - w * sum_{k != m} sigma_mk (f_m - f_k)(g_m - g_k)

whose coupling table sigma is read off the rational function that the
components represent.  The product is arranged so that vectors built by
``represent_pointwise`` multiply the way the scalar functions they encode
do: rep(phi) * rep(psi) = rep(phi*psi) on the common sample set.

Everything here acts independently per sample point, which keeps the
operator norm exact (max over samples of an induced matrix norm) and the
multiplicative functionals explicit (rows of the fiber matrix).
"""

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ClearanceError, ValidationError
from .ratfun import RationalFunction
from .represent import fiber_matrix, represent_pointwise


def _coupling_from(r: RationalFunction) -> np.ndarray:
    lam = np.asarray(r.lambdas, dtype=complex)
    d = lam.size
    sigma = np.zeros((d, d), dtype=complex)
    rp = r.rprime(lam)
    for i in range(d):
        for j in range(d):
            if i == j:
                continue
            sigma[i, j] = 1.0 / (rp[j] * (lam[i] - lam[j]))
    return sigma


@dataclass(frozen=True)
class MultiplicationTable:
    """Coupling coefficients sigma_ij; the diagonal is unused and kept zero."""

    sigma: np.ndarray
    generated_by: Optional[RationalFunction] = None

    def __post_init__(self):
        s = np.asarray(self.sigma, dtype=complex)
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise ValidationError("coupling table must be a square matrix")
        object.__setattr__(self, "sigma", s)

    @property
    def d(self) -> int:
        return self.sigma.shape[0]

    def formula_residual(self) -> float:
        """Max deviation of the stored table from its generating function."""
        if self.generated_by is None:
            raise ValidationError("table has no generating rational function")
        fresh = _coupling_from(self.generated_by)
        return float(np.max(np.abs(self.sigma - fresh)))


def table_from_rational(r: RationalFunction) -> MultiplicationTable:
    return MultiplicationTable(_coupling_from(r), generated_by=r)


@dataclass(frozen=True)
class AlgebraElement:
    """Sampled vector function: values[s] is the C^d vector at ws[s].

    All elements combined by the algebra operations must carry the
    identical sample set; binary operations enforce this.
    """

    ws: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        ws = np.atleast_1d(np.asarray(self.ws, dtype=complex))
        vals = np.asarray(self.values, dtype=complex)
        if vals.ndim == 1:
            vals = vals[None, :]
        if vals.ndim != 2 or vals.shape[0] != ws.size:
            raise ValidationError(
                "values must have shape (n_samples, d) matching the sample set")
        object.__setattr__(self, "ws", ws)
        object.__setattr__(self, "values", vals)

    @property
    def d(self) -> int:
        return self.values.shape[1]

    @property
    def n_samples(self) -> int:
        return self.ws.size

    @property
    def sup_norm(self) -> float:
        """Plain componentwise sup |f|_inf over the sample set."""
        return float(np.max(np.abs(self.values)))

    def _same_samples(self, other: "AlgebraElement"):
        if self.values.shape != other.values.shape or not np.array_equal(
                self.ws, other.ws):
            raise ValidationError("elements live on different sample sets")

    def __add__(self, other):
        self._same_samples(other)
        return AlgebraElement(self.ws, self.values + other.values)

    def __sub__(self, other):
        self._same_samples(other)
        return AlgebraElement(self.ws, self.values - other.values)

    def __mul__(self, scalar):
        return AlgebraElement(self.ws, self.values * complex(scalar))

    __rmul__ = __mul__


def unit(d: int, ws) -> AlgebraElement:
    ws = np.atleast_1d(np.asarray(ws, dtype=complex))
    return AlgebraElement(ws, np.ones((ws.size, d), dtype=complex))


def basis_element(i: int, d: int, ws) -> AlgebraElement:
    ws = np.atleast_1d(np.asarray(ws, dtype=complex))
    vals = np.zeros((ws.size, d), dtype=complex)
    vals[:, i] = 1.0
    return AlgebraElement(ws, vals)


def element_from_scalar(r: RationalFunction, phi: Callable,
                        ws) -> AlgebraElement:
    """Sample the vector representative of a scalar function at each w."""
    ws = np.atleast_1d(np.asarray(ws, dtype=complex))
    rows = [represent_pointwise(r, phi, w) for w in ws]
    return AlgebraElement(ws, np.vstack(rows))


def _check_compatible(f: AlgebraElement, g: AlgebraElement,
                      table: MultiplicationTable):
    f._same_samples(g)
    if f.d != table.d:
        raise ValidationError("element dimension does not match the table")


def polyproduct(f: AlgebraElement, g: AlgebraElement,
                table: MultiplicationTable) -> AlgebraElement:
    _check_compatible(f, g, table)
    fv, gv = f.values, g.values
    df = fv[:, :, None] - fv[:, None, :]
    dg = gv[:, :, None] - gv[:, None, :]
    cross = np.einsum("mk,smk,smk->sm", table.sigma, df, dg)
    return AlgebraElement(f.ws, fv * gv - f.ws[:, None] * cross)


def multiplication_matrices(f: AlgebraElement,
                            table: MultiplicationTable) -> np.ndarray:
    """Per-sample matrices T(w) with (f * g)(w) = T(w) g(w).

    Row m: T_mm = f_m - w sum_k sigma_mk (f_m - f_k) and
    T_mk = w sigma_mk (f_m - f_k) off the diagonal.
    """
    if f.d != table.d:
        raise ValidationError("element dimension does not match the table")
    fv = f.values
    df = fv[:, :, None] - fv[:, None, :]
    off = f.ws[:, None, None] * table.sigma[None, :, :] * df
    t = off.copy()
    idx = np.arange(f.d)
    t[:, idx, idx] = fv - off.sum(axis=2)
    return t


def operator_norm(f: AlgebraElement, table: MultiplicationTable) -> float:
    """Norm of multiplication by f: exact because the product is
    pointwise in w, so the sup over |g|_inf <= 1 is a max over samples
    of the induced infinity norm of T(w)."""
    t = multiplication_matrices(f, table)
    rowsums = np.abs(t).sum(axis=2)
    return float(np.max(rowsums))


def norm_equivalence_constant(table: MultiplicationTable, ws) -> float:
    """Largest operator norm among the idempotent basis vectors.

    Empirical gauge of how far the algebra norm sits above the sup norm
    on the given sample set; the sum of the basis norms always bounds
    ||f|| / |f|_inf from above.
    """
    ws = np.atleast_1d(np.asarray(ws, dtype=complex))
    return max(
        operator_norm(basis_element(i, table.d, ws), table)
        for i in range(table.d))


def characters(r: RationalFunction, table: MultiplicationTable, w):
    """The d multiplicative functionals at sample point w.

    Functional j has weights delta_i(z_j) over the fiber point z_j above
    w, i.e. the rows of the fiber matrix; it sends an element to the
    value of the scalar function it represents at z_j.
    """
    fm = fiber_matrix(r, w)
    if fm.near_critical:
        raise ClearanceError(
            "characters coalesce near a critical value "
            f"(w={complex(w):.6g}, fiber condition {fm.cond:.3g})")
    return [fm.entries[j].copy() for j in range(table.d)]


def character_residual(table: MultiplicationTable, w, eta) -> float:
    """Defect in the quadratic fixed-point equations the weights satisfy:
    eta_i^2 = eta_i - w sum_{j != i} (sigma_ij eta_i + sigma_ji eta_j)."""
    eta = np.asarray(eta, dtype=complex)
    s = table.sigma
    worst = 0.0
    for i in range(table.d):
        coupling = sum(s[i, j] * eta[i] + s[j, i] * eta[j]
                       for j in range(table.d) if j != i)
        worst = max(worst, abs(eta[i] ** 2 - eta[i] + complex(w) * coupling))
    return worst


def evaluate_functional(eta, f: AlgebraElement, sample_index: int) -> complex:
    """Apply a character (given as a weight vector) to f at one sample."""
    return complex(np.dot(np.asarray(eta), f.values[sample_index]))


@dataclass(frozen=True)
class GelfandReport:
    n_samples: int
    value_defect: float
    morphism_defect: float
    spectrum: np.ndarray
    passed: bool

    def as_dict(self):
        return {
            "n_samples": self.n_samples,
            "value_defect": self.value_defect,
            "morphism_defect": self.morphism_defect,
            "spectrum": [[float(s.real), float(s.imag)] for s in self.spectrum],
            "passed": bool(self.passed),
        }


def gelfand_check(r: RationalFunction, phi: Callable, zs: Sequence[complex],
                  table: Optional[MultiplicationTable] = None,
                  tol: float = 1e-9) -> GelfandReport:
    """Check that evaluation functionals recover phi from its vector form.

    For each sampled z the functional with weights delta_i(z) applied to
    the element built from phi must return phi(z); the collected values
    are the sampled spectrum of the element.  The same functionals must
    be multiplicative, which is checked on f * f.
    """
    if table is None:
        table = table_from_rational(r)
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    ws = r(zs)
    f = element_from_scalar(r, phi, ws)
    ff = polyproduct(f, f, table)
    deltas = r.delta_all(zs)  # shape (d, n)
    value_defect = 0.0
    morphism_defect = 0.0
    spectrum = np.empty(zs.size, dtype=complex)
    for s, z in enumerate(zs):
        eta = deltas[:, s]
        chi_f = complex(np.dot(eta, f.values[s]))
        chi_ff = complex(np.dot(eta, ff.values[s]))
        target = complex(phi(z))
        spectrum[s] = target
        value_defect = max(value_defect, abs(chi_f - target))
        morphism_defect = max(morphism_defect, abs(chi_ff - chi_f * chi_f))
    passed = value_defect <= tol and morphism_defect <= tol
    return GelfandReport(int(zs.size), value_defect, morphism_defect,
                         spectrum, passed)
