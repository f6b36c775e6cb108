"""Wick operators on the truncated Fock space.

A Wick word is the unique operator taking the vacuum to a prescribed
level-n argument while staying inside the algebra generated by the field
operators.  It is assembled from the explicit splitting formula

    W(xi_1 (x) ... (x) xi_n)
        = sum over (I, J) of f_(I,J) l(xi_I legs) l*(conj xi_J legs),

where (I, J) runs over the ordered splittings of the positions, f is the
inversion weight from the combinatorics module, creations are composed in
increasing position order and annihilations likewise.  Realized operators
are compressions to the truncated space: a summand whose image would leave
the cutoff is dropped, so identities are only asserted on source levels
whose compositions stay inside.

Basis-word operators are cached per space; arbitrary arguments are realized
as linear combinations of cached basis words, and that path is the single
canonical realization used by the multiplier layer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .combinatorics import f_coefficient, index_splittings
from .errors import BuildError, CutoffError
from .linalg import g_adjoint, identity_matrix, max_abs, to_float

__all__ = [
    "WickWord",
    "basis_word_operator",
    "field",
    "from_vector",
    "leg_label",
    "norm_bound",
    "span_operator",
    "vacuum_expectation",
    "wick_operator",
    "wick_recursion_residual",
]


@dataclass(frozen=True, eq=False)
class WickWord:
    """Realized Wick operator together with its vacuum argument."""

    fock: object
    level: int
    argument: np.ndarray
    labels: tuple
    operator: np.ndarray

    def vacuum_image(self) -> np.ndarray:
        return self.operator.dot(self.fock.vacuum())

    def adjoint_matrix(self) -> np.ndarray:
        return g_adjoint(self.operator, self.fock.full_gram, self.fock.full_gram)

    def scaled(self, factor) -> "WickWord":
        return WickWord(
            self.fock,
            self.level,
            factor * self.argument,
            self.labels,
            factor * self.operator,
        )


def leg_label(setup, v) -> int:
    """Block label of a vector supported inside a single block."""
    v = np.asarray(v)
    support = [i for i in range(setup.dim) if v[i] != 0]
    if not support:
        raise BuildError("zero tensor leg has no block label")
    labels = {setup.block_of[i] for i in support}
    if len(labels) > 1:
        raise BuildError(
            "tensor leg spans blocks %s; expand the argument into "
            "single-block legs first" % sorted(labels)
        )
    return labels.pop()


def _assemble(fock, legs, labels) -> np.ndarray:
    """Splitting-formula operator for the given legs, as a full matrix."""
    n = len(legs)
    if n > fock.n_max:
        raise CutoffError(
            "argument level %d beyond cutoff %d" % (n, fock.n_max)
        )
    out = fock._zeros((fock.total_dim, fock.total_dim))
    conj_legs = [np.conj(np.asarray(leg)) for leg in legs]
    ent = fock.setup.deformation.entries
    for k in range(n + 1):
        for left, right in index_splittings(n, k):
            coeff = f_coefficient(left, right, labels, ent)
            for m in range(k, fock.n_max + 1):
                out_level = m - k + (n - k)
                if out_level > fock.n_max:
                    continue  # compressed away with the cutoff
                cur = None
                lvl = m
                for j in reversed(right):
                    step = fock.annihilation(conj_legs[j], lvl)
                    cur = step if cur is None else step.dot(cur)
                    lvl -= 1
                for i in reversed(left):
                    step = fock.creation(legs[i], lvl)
                    cur = step if cur is None else step.dot(cur)
                    lvl += 1
                if cur is None:
                    cur = identity_matrix(fock.level_dim(m), fock.exact)
                rows = fock.level_slice(out_level)
                cols = fock.level_slice(m)
                out[rows, cols] += coeff * cur
    return out


def _tensor_argument(fock, legs) -> np.ndarray:
    arg = fock._zeros(1)
    arg[0] = 1
    for leg in legs:
        arg = np.kron(arg, np.asarray(leg))
    return arg


def wick_operator(fock, legs, labels=None) -> WickWord:
    """Wick word of a simple tensor, by the explicit splitting formula.

    ``legs`` is a sequence of single-block vectors; labels are deduced from
    their supports when not given.
    """
    legs = [np.asarray(leg) for leg in legs]
    if labels is None:
        labels = tuple(leg_label(fock.setup, leg) for leg in legs)
    else:
        labels = tuple(labels)
    operator = _assemble(fock, legs, labels)
    return WickWord(fock, len(legs), _tensor_argument(fock, legs), labels, operator)


def basis_word_operator(fock, word) -> np.ndarray:
    """Cached full-space operator of the Wick word with argument e_word."""
    word = tuple(word)
    cache = fock.__dict__.setdefault("_wick_cache", {})
    hit = cache.get(word)
    if hit is not None:
        return hit
    legs = [fock.setup.basis_vector(a) for a in word]
    mat = _assemble(fock, legs, fock.labels_of(word))
    cache[word] = mat
    return mat


def from_vector(fock, vec, n: int) -> WickWord:
    """Wick word of an arbitrary level-n argument, by basis-word linearity.

    This is the canonical realization path: every multiplier acts on the
    argument coordinates and comes back through here.
    """
    vec = np.asarray(vec)
    if vec.shape != (fock.level_dim(n),):
        raise BuildError("level-%d argument of length %d expected" % (n, fock.level_dim(n)))
    operator = fock._zeros((fock.total_dim, fock.total_dim))
    for idx in range(fock.level_dim(n)):
        if vec[idx] == 0:
            continue
        operator += vec[idx] * basis_word_operator(fock, fock.index_word(idx, n))
    return WickWord(fock, n, vec.copy(), None, operator)


def vacuum_expectation(fock, operator):
    """State value of a realized operator: vacuum-to-vacuum matrix element
    in the deformed geometry."""
    vac = fock.vacuum()
    return fock.full_inner(vac, operator.dot(vac))


def span_operator(fock, coords) -> np.ndarray:
    """Operator of the Wick-span element with the given vacuum image.

    ``coords`` are full-space coordinates; the element is the sum of the
    levelwise realizations, so span_operator(coords) applied to the vacuum
    reproduces coords.
    """
    coords = np.asarray(coords)
    if coords.shape != (fock.total_dim,):
        raise BuildError(
            "span coordinates of length %d expected" % fock.total_dim
        )
    out = fock._zeros((fock.total_dim, fock.total_dim))
    for n in range(fock.n_max + 1):
        seg = coords[fock.level_slice(n)]
        if np.any(seg != 0):
            out += from_vector(fock, seg, n).operator
    return out


def field(fock, xi) -> WickWord:
    """Self-adjoint field operator l(xi) + l*(xi) of a real vector."""
    xi = np.asarray(xi)
    if np.any(np.imag(to_float(np.atleast_1d(xi))) != 0):
        raise BuildError("field operators take real vectors")
    out = fock._zeros((fock.total_dim, fock.total_dim))
    for m in range(fock.n_max + 1):
        if m < fock.n_max:
            out[fock.level_slice(m + 1), fock.level_slice(m)] += fock.creation(xi, m)
        if m >= 1:
            out[fock.level_slice(m - 1), fock.level_slice(m)] += fock.annihilation(xi, m)
    arg = fock._zeros(fock.dim)
    arg[:] = xi
    return WickWord(fock, 1, arg, None, out)


def wick_recursion_residual(fock, first, rest, labels=None) -> float:
    """Max-entry residual of the one-step product recursion.

    Compares W(first (x) rest) against W(first) W(rest) minus the deformed
    contraction corrections, on all source levels whose compositions stay
    inside the cutoff (levels up to n_max - len(rest) - 1).
    """
    first = np.asarray(first)
    rest = [np.asarray(r) for r in rest]
    l = len(rest)
    if l + 1 > fock.n_max:
        raise CutoffError("recursion needs level %d inside the cutoff" % (l + 1))
    if labels is None:
        labels = tuple(leg_label(fock.setup, leg) for leg in [first] + rest)
    head_label, rest_labels = labels[0], tuple(labels[1:])

    lhs = wick_operator(fock, [first] + rest, labels).operator
    head = wick_operator(fock, [first], (head_label,)).operator
    body = wick_operator(fock, rest, rest_labels).operator
    rhs = head.dot(body)
    ent = fock.setup.deformation.entries
    for r in range(l):
        pairing = fock.setup.u_inner(np.conj(first), rest[r])
        weight = pairing
        for j in range(r):
            weight = weight * ent[rest_labels[r], rest_labels[j]]
        if weight == 0:
            continue
        dropped = wick_operator(
            fock, rest[:r] + rest[r + 1 :], rest_labels[:r] + rest_labels[r + 1 :]
        ).operator
        rhs = rhs - weight * dropped
    valid = fock.level_offset(fock.n_max - l)
    return max_abs(to_float(lhs - rhs)[:, :valid])


def norm_bound(fock, vec, n: int) -> float:
    """Crude rigorous operator-norm bound of the realized Wick word.

    Triangle inequality over basis words and splittings: every creation or
    annihilation leg of a basis vector is bounded by (1 - |T|)^{-1/2} in
    the deformed geometry, and the splitting weight is |f|.
    """
    vec = to_float(np.asarray(vec))
    ent = fock.setup.deformation.entries
    scale = (1 - fock.t_norm) ** (-n / 2)
    total = 0.0
    for idx in range(fock.level_dim(n)):
        c = abs(vec[idx])
        if c == 0:
            continue
        labels = fock.labels_of(fock.index_word(idx, n))
        weight = 0.0
        for k in range(n + 1):
            for left, right in index_splittings(n, k):
                weight += abs(f_coefficient(left, right, labels, ent))
        total += c * weight * scale
    return float(total)
