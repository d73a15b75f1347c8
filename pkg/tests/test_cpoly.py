import numpy as np
import pytest

from ratcalc.cpoly import Polynomial, lagrange_basis, poly_eval, poly_roots
from ratcalc.errors import InputError, ValidationError

Z2M1 = Polynomial([-1, 0, 1])          # z^2 - 1
QUARTIC = Polynomial([9, 0, -2, 0, 1])  # z^4 - 2 z^2 + 9


class TestEval:
    def test_root_value(self):
        assert poly_eval(Z2M1, 1.0) == 0

    def test_direct_arithmetic(self):
        assert poly_eval(Z2M1, 2.0) == 3

    def test_quartic_vanishes_at_its_roots(self):
        z = np.sqrt(2) + 1j
        assert abs(poly_eval(QUARTIC, z)) < 1e-12

    def test_degree_zero_exact(self):
        c = Polynomial([3.5 + 1j])
        assert c(123.0) == 3.5 + 1j

    def test_vectorized(self):
        z = np.array([0.0, 1.0, 2.0])
        assert np.allclose(Z2M1(z), [-1.0, 0.0, 3.0])

    def test_linearity(self, rng):
        a = Polynomial(rng.standard_normal(5) + 1j * rng.standard_normal(5))
        b = Polynomial(rng.standard_normal(3) + 1j * rng.standard_normal(3))
        z = complex(rng.standard_normal(), rng.standard_normal())
        lhs = poly_eval(a + b, z)
        rhs = poly_eval(a, z) + poly_eval(b, z)
        assert abs(lhs - rhs) < 1e-12 * (1 + abs(lhs))


class TestStructure:
    def test_trailing_zeros_trimmed(self):
        assert Polynomial([1, 2, 0, 0]).degree == 1

    def test_zero_poly_degree_sentinel(self):
        assert Polynomial([0, 0]).degree is None

    def test_derivative(self):
        assert Z2M1.derivative() == Polynomial([0, 2])

    def test_derivative_of_constant_is_zero_poly(self):
        assert Polynomial([4.0]).derivative().is_zero

    def test_derivative_quartic(self):
        assert QUARTIC.derivative() == Polynomial([0, -4, 0, 4])

    def test_deflate_reconstructs(self):
        quo, rem = QUARTIC.deflate(np.sqrt(2) + 1j)
        assert abs(rem) < 1e-12
        rebuilt = quo * Polynomial([-(np.sqrt(2) + 1j), 1])
        assert np.allclose(rebuilt.coeffs, QUARTIC.coeffs, atol=1e-12)

    def test_pow(self):
        assert (Z2M1 ** 2) == Polynomial([1, 0, -2, 0, 1])


class TestRoots:
    def test_quadratic(self):
        assert np.allclose(poly_roots(Z2M1), [-1, 1])

    def test_cubic_with_zero_root(self):
        # z^3 + 3z -> 0 and +-i sqrt(3)
        got = poly_roots(Polynomial([0, 3, 0, 1]))
        want = np.array([-1j * np.sqrt(3), 0, 1j * np.sqrt(3)])
        assert np.allclose(sorted(got, key=lambda z: z.imag),
                           sorted(want, key=lambda z: z.imag), atol=1e-10)

    def test_quartic_roots(self):
        got = poly_roots(QUARTIC)
        s = np.sqrt(2)
        want = np.array([-s - 1j, -s + 1j, s - 1j, s + 1j])
        assert np.allclose(got, want, atol=1e-9)

    def test_residuals_bounded(self, rng):
        for _ in range(10):
            deg = int(rng.integers(2, 13))
            c = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
            p = Polynomial(c)
            roots = poly_roots(p, tol=1e-8)
            res = np.abs(p(roots))
            assert np.max(res) <= 1e-8 * p.coefficient_scale()

    def test_monic_reconstruction(self, rng):
        for _ in range(8):
            deg = int(rng.integers(2, 13))
            c = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
            p = Polynomial(c).monic()
            rebuilt = Polynomial.from_roots(poly_roots(p))
            err = np.max(np.abs(rebuilt.coeffs - p.coeffs))
            assert err < 1e-8 * p.coefficient_scale()

    def test_double_root_found_with_multiplicity(self):
        p = Polynomial.from_roots([1j, 1j])  # (z - i)^2
        got = poly_roots(p, tol=1e-6)
        assert len(got) == 2
        assert np.allclose(got, [1j, 1j], atol=1e-5)

    def test_deterministic_order(self, rng):
        c = rng.standard_normal(9) + 1j * rng.standard_normal(9)
        p = Polynomial(c)
        a = poly_roots(p)
        b = poly_roots(p)
        assert np.array_equal(a, b)
        key = [(round(z.real, 10), round(z.imag, 10)) for z in a]
        assert key == sorted(key)

    def test_degree_zero_rejected(self):
        with pytest.raises(InputError):
            poly_roots(Polynomial([2.0]))


class TestLagrange:
    def test_two_point_basis(self):
        l1, l2 = lagrange_basis([1.0, -1.0])
        z = np.linspace(-2, 2, 7)
        assert np.allclose(l1(z), (z + 1) / 2)
        assert np.allclose(l2(z), (1 - z) / 2)
        assert l1(1.0) == pytest.approx(1.0)

    def test_partition_of_unity(self, rng):
        nodes = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        basis = lagrange_basis(nodes)
        pts = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        total = sum(b(pts) for b in basis)
        assert np.allclose(total, 1.0, atol=1e-12)

    def test_kronecker_property_quartic_nodes(self):
        s = np.sqrt(2)
        nodes = np.array([s + 1j, s - 1j, -s + 1j, -s - 1j])
        basis = lagrange_basis(nodes)
        for k, b in enumerate(basis):
            vals = b(nodes)
            want = np.zeros(4)
            want[k] = 1.0
            assert np.allclose(vals, want, atol=1e-12)

    def test_interpolation(self, rng):
        nodes = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        data = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        basis = lagrange_basis(nodes)
        interp = sum(y * b(nodes) for y, b in zip(data, basis))
        assert np.allclose(interp, data, atol=1e-10)

    def test_coincident_nodes_rejected(self):
        with pytest.raises(ValidationError) as exc:
            lagrange_basis([1.0, 1.0, 2.0])
        assert "0" in str(exc.value) and "1" in str(exc.value)
