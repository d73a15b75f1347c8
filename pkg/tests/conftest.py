import numpy as np
import pytest

from ratcalc.cpoly import Polynomial
from ratcalc.ratfun import RationalFunction


@pytest.fixture
def rng():
    return np.random.default_rng(20260819)


@pytest.fixture
def joukowski():
    # (z - 1/z)/2 as (z^2 - 1)/(2z); root order fixed so index 0 sits at +1
    return RationalFunction(Polynomial([-1, 0, 1]), Polynomial([0, 2]),
                            lambdas=[1.0, -1.0])


@pytest.fixture
def two_lobe():
    # degree-4 example: zeros at +-sqrt(2)+-i, poles at 0 and +-i*sqrt(3)
    p = Polynomial([9, 0, -2, 0, 1])
    q = Polynomial([0, 3, 0, 1])
    return RationalFunction(p, q)


def random_rational(rng, d=None, dq=None):
    """Random rational with well-separated simple roots; q roots kept away
    from the numerator roots so the structural invariants hold comfortably."""
    if d is None:
        d = int(rng.integers(2, 7))
    while True:
        lam = rng.uniform(-2.0, 2.0, d) + 1j * rng.uniform(-2.0, 2.0, d)
        sep = min(abs(a - b) for i, a in enumerate(lam) for b in lam[i + 1:]) if d > 1 else 1.0
        if sep > 0.35:
            break
    if dq is None:
        dq = int(rng.integers(0, d))
    while True:
        if dq == 0:
            q = Polynomial([rng.uniform(0.5, 2.0)])
        else:
            mu = rng.uniform(-2.5, 2.5, dq) + 1j * rng.uniform(-2.5, 2.5, dq)
            if min(abs(a - b) for a in lam for b in mu) < 0.3:
                continue
            q = Polynomial.from_roots(mu, lead=rng.uniform(0.5, 1.5))
        p = Polynomial.from_roots(lam)
        try:
            return RationalFunction(p, q)
        except Exception:
            dq = max(dq - 1, 0)


def nonpole_points(rng, r, n, box=3.0, min_q=1e-3):
    """Sample points with |q| bounded below, suitable for delta evaluation."""
    out = []
    scale = r.q.coefficient_scale()
    while len(out) < n:
        z = rng.uniform(-box, box, 4 * n) + 1j * rng.uniform(-box, box, 4 * n)
        ok = np.abs(r.q(z)) > min_q * scale
        out.extend(z[ok][: n - len(out)])
    return np.array(out)
