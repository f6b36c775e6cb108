"""Gram-aware linear algebra helpers.

All norms and adjoints in this package are taken against explicit Gram
matrices (the level inner products are not orthonormal in the coordinate
basis).  Norms go through generalized eigenproblems rather than through a
Cholesky change of basis, so conditioning choices never leak into tests.
Helpers accept float/complex arrays and, where meaningful, object arrays
with exact Fraction entries.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg


def kron_power(m: np.ndarray, n: int) -> np.ndarray:
    """n-fold Kronecker power of ``m``; n = 0 gives the 1x1 identity."""
    out = np.eye(1, dtype=m.dtype)
    for _ in range(n):
        out = np.kron(out, m)
    return out


def identity_matrix(n: int, exact: bool = False) -> np.ndarray:
    """Identity matrix; in exact mode an object array of Fractions."""
    if not exact:
        return np.eye(n, dtype=complex)
    from fractions import Fraction

    out = np.full((n, n), Fraction(0), dtype=object)
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def kron_apply(op, vec: np.ndarray, dim: int, legs: int) -> np.ndarray:
    """Apply ``op`` to every tensor leg of a level vector.

    ``vec`` has length dim**legs.  ``op`` is either a scalar (treated as
    scalar times identity, applied as scalar**legs in one multiplication)
    or a (dim, dim) matrix.
    """
    if np.isscalar(op):
        return op**legs * vec
    if legs == 0:
        return vec.copy()
    w = vec.reshape((dim,) * legs)
    # each tensordot contracts the last leg and moves it to the front, so
    # after `legs` rounds every leg is transformed and the order is restored
    for _ in range(legs):
        w = np.tensordot(op, w, axes=([1], [legs - 1]))
    return w.reshape(-1)


def hermitize(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2


def to_float(m: np.ndarray) -> np.ndarray:
    """Convert an exact object array to complex floats (no-op otherwise)."""
    if m.dtype == object:
        return np.asarray(m, dtype=complex)
    return m


def gram_norm(vec: np.ndarray, gram: np.ndarray) -> float:
    """Norm of a coordinate vector in the geometry defined by ``gram``."""
    v = to_float(np.asarray(vec))
    g = to_float(gram)
    val = np.real(np.conj(v).dot(g).dot(v))
    return float(np.sqrt(max(val, 0.0)))


def gram_inner(u: np.ndarray, v: np.ndarray, gram: np.ndarray):
    """Inner product <u, v> against ``gram``; linear in the second slot."""
    return np.conj(u).dot(gram).dot(v)


def min_gen_eig(m: np.ndarray, gram: np.ndarray) -> float:
    """Smallest eigenvalue of ``m`` seen as an operator in the ``gram`` geometry."""
    a = hermitize(to_float(m))
    b = hermitize(to_float(gram))
    vals = scipy.linalg.eigh(a, b, eigvals_only=True)
    return float(vals[0])


def op_norm(x: np.ndarray, gram_out: np.ndarray, gram_in: np.ndarray) -> float:
    """Operator norm of ``x`` between Gram geometries, via the pencil
    (x* G_out x, G_in)."""
    xf = to_float(x)
    a = hermitize(xf.conj().T.dot(to_float(gram_out)).dot(xf))
    b = hermitize(to_float(gram_in))
    vals = scipy.linalg.eigh(a, b, eigvals_only=True)
    return float(np.sqrt(max(vals[-1], 0.0)))


def g_adjoint(x: np.ndarray, gram_out: np.ndarray, gram_in: np.ndarray) -> np.ndarray:
    """Adjoint of ``x``: maps the gram_out space back to the gram_in space."""
    rhs = x.conj().T.dot(gram_out)
    if x.dtype == object or gram_in.dtype == object:
        return np.linalg.inv(to_float(gram_in)).dot(to_float(rhs))
    return np.linalg.solve(gram_in, rhs)


def block_diag(blocks) -> np.ndarray:
    return scipy.linalg.block_diag(*blocks)


def max_abs(m) -> float:
    arr = to_float(np.asarray(m))
    if arr.size == 0:
        return 0.0
    return float(np.max(np.abs(arr)))
