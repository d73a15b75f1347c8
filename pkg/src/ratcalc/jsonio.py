"""JSON encoding and decoding for the value types used by the CLI.

Complex numbers are [re, im] pairs everywhere; plain JSON numbers are
accepted on input and read as real.  Polynomial coefficients are listed
in ascending powers.  Matrices carry their shape explicitly and list
entries row-major.  Encoders emit plain JSON-ready structures; `dumps`
renders them deterministically (sorted keys, fixed indentation).
"""

import json

import numpy as np

from .cpoly import Polynomial
from .errors import InputError
from .ratfun import RationalFunction
from .represent import Representation


def encode_complex(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]


def decode_complex(obj, what="complex number"):
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return complex(obj)
    if (isinstance(obj, (list, tuple)) and len(obj) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool)
                    for v in obj)):
        return complex(obj[0], obj[1])
    raise InputError("%s must be a number or an [re, im] pair, got %r"
                     % (what, obj))


def encode_complex_list(values):
    return [encode_complex(z) for z in np.asarray(values).ravel()]


def decode_complex_list(obj, what="complex list"):
    if not isinstance(obj, list):
        raise InputError("%s must be a JSON array" % what)
    return np.array([decode_complex(v, what) for v in obj], dtype=complex)


def encode_poly(poly):
    return encode_complex_list(poly.coeffs)


def decode_poly(obj, what="polynomial"):
    coeffs = decode_complex_list(obj, what + " coefficients")
    if coeffs.size == 0:
        raise InputError("%s needs at least one coefficient" % what)
    return Polynomial(coeffs)


def encode_rational(r):
    out = {"p": encode_poly(r.p), "q": encode_poly(r.q)}
    out["lambdas"] = encode_complex_list(r.lambdas)
    return out


def decode_rational(obj, what="rational function"):
    if not isinstance(obj, dict) or "p" not in obj or "q" not in obj:
        raise InputError('%s must be an object with "p" and "q"' % what)
    p = decode_poly(obj["p"], what + " numerator")
    q = decode_poly(obj["q"], what + " denominator")
    lam = obj.get("lambdas")
    if lam is not None:
        lam = decode_complex_list(lam, what + " roots")
    return RationalFunction(p, q, lambdas=lam)


def encode_matrix(A):
    A = np.atleast_2d(np.asarray(A))
    m, n = A.shape
    entries = encode_complex_list(A.reshape(-1))
    if m == n:
        return {"n": int(n), "entries": entries}
    return {"rows": int(m), "cols": int(n), "entries": entries}


def decode_matrix(obj, what="matrix", square=False):
    if not isinstance(obj, dict):
        raise InputError("%s must be a JSON object" % what)
    if "n" in obj:
        m = n = obj["n"]
    elif "rows" in obj and "cols" in obj:
        m, n = obj["rows"], obj["cols"]
    else:
        raise InputError('%s needs "n" or "rows"/"cols"' % what)
    if not all(isinstance(v, int) and v > 0 for v in (m, n)):
        raise InputError("%s dimensions must be positive integers" % what)
    if square and m != n:
        raise InputError("%s must be square" % what)
    raw = obj.get("entries")
    # entries may be a flat row-major list of m*n values, or m rows of
    # n values; the flat reading wins when both shapes fit
    try:
        entries = decode_complex_list(raw, what + " entries")
        if entries.size != m * n:
            raise InputError("%s expects %d entries, got %d"
                             % (what, m * n, entries.size))
        return entries.reshape(m, n)
    except InputError:
        if not (isinstance(raw, list) and len(raw) == m
                and all(isinstance(row, list) and len(row) == n
                        for row in raw)):
            raise
    rows = [decode_complex_list(row, what + " row") for row in raw]
    return np.stack(rows)


def encode_representation(rep):
    return {
        "r": encode_rational(rep.r),
        "rho": float(rep.rho),
        "alpha": [encode_complex_list(row) for row in rep.alpha],
        "L": [float(v) for v in rep.L],
        "max_phi": float(rep.max_phi),
        "J": None if rep.J is None else [int(j) for j in rep.J],
        "n_nodes": int(rep.n_nodes),
    }


def decode_representation(obj, what="representation"):
    if not isinstance(obj, dict):
        raise InputError("%s must be a JSON object" % what)
    for key in ("r", "rho", "alpha", "L"):
        if key not in obj:
            raise InputError('%s is missing "%s"' % (what, key))
    r = decode_rational(obj["r"], what + " separator")
    if not isinstance(obj["alpha"], list) or not obj["alpha"]:
        raise InputError("%s coefficient table must be a nonempty array"
                         % what)
    alpha = np.array([decode_complex_list(row, what + " coefficients")
                      for row in obj["alpha"]])
    if alpha.shape[0] != r.d:
        raise InputError("%s has %d coefficient rows for a degree-%d "
                         "numerator" % (what, alpha.shape[0], r.d))
    L = np.asarray(obj["L"], dtype=float)
    if L.shape != (r.d,):
        raise InputError("%s needs one arclength factor per row" % what)
    J = obj.get("J")
    return Representation(
        r=r, rho=float(obj["rho"]), alpha=alpha, L=L,
        max_phi=float(obj.get("max_phi", 1.0)),
        J=None if J is None else tuple(int(j) for j in J),
        n_nodes=int(obj.get("n_nodes", 0)),
    )


def dumps(obj):
    """Deterministic rendering: sorted keys, two-space indent, newline."""
    return json.dumps(obj, sort_keys=True, indent=2,
                      allow_nan=False) + "\n"


def load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError("cannot read %s: %s" % (path, exc))
    except json.JSONDecodeError as exc:
        raise InputError("invalid JSON in %s: %s" % (path, exc))
