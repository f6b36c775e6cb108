"""Vacuum expectations of products of field operators, two independent ways.

The combinatorial route sums over pair partitions: each partition nu
contributes its crossing coefficient g_nu times the product of deformed
inner products of the paired vectors.  Odd-length words vanish.  The matrix
route multiplies the realized field operators and reads off the vacuum
component.  The pairing route is the production evaluator; the matrix route
is the oracle, and ``checked_moment`` compares the two, raising a loud
error carrying a replay record whenever they disagree beyond tolerance.

Word vectors are real and supported inside a single block each, so the
field operator of every letter is self-adjoint and no conjugation marks are
needed in the pairing products.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .combinatorics import g_coefficient, pair_partitions
from .errors import BuildError, CutoffError, InvariantError
from .linalg import identity_matrix, to_float
from .wick import leg_label, vacuum_expectation, wick_operator

__all__ = [
    "MAX_COMBINATORIAL_LENGTH",
    "MomentSpec",
    "checked_moment",
    "moment_matrix",
    "moment_pairings",
    "moment_row",
    "random_spec",
    "spec_hash",
]

MAX_COMBINATORIAL_LENGTH = 8


@dataclass(frozen=True, eq=False)
class MomentSpec:
    """A word of real single-block vectors whose joint moment is wanted."""

    vectors: tuple
    labels: tuple

    @classmethod
    def build(cls, setup, vectors, labels=None) -> "MomentSpec":
        vecs = []
        violations = []
        for pos, raw in enumerate(vectors):
            v = np.asarray(raw)
            if v.shape != (setup.dim,):
                violations.append(
                    f"vector {pos} has shape {v.shape}, expected ({setup.dim},)"
                )
                continue
            if np.any(np.imag(to_float(v)) != 0):
                violations.append(f"vector {pos} must be real")
            vecs.append(v)
        if len(vecs) > MAX_COMBINATORIAL_LENGTH:
            violations.append(
                f"word length {len(vecs)} beyond the pairing cap "
                f"{MAX_COMBINATORIAL_LENGTH}"
            )
        if violations:
            raise BuildError(violations)
        if labels is None:
            labels = tuple(leg_label(setup, v) for v in vecs)
        else:
            labels = tuple(labels)
            if len(labels) != len(vecs):
                raise BuildError("label word and vector word differ in length")
        return cls(tuple(vecs), labels)

    @property
    def l(self) -> int:
        return len(self.vectors)

    def reversed(self) -> "MomentSpec":
        return MomentSpec(self.vectors[::-1], self.labels[::-1])


def moment_pairings(spec: MomentSpec, deformation, setup):
    """Pair-partition value of the word's vacuum moment.

    Zero for odd length.  For even length l the value is the sum over all
    pair partitions of {0..l-1} of the crossing coefficient, computed from
    ``deformation.entries`` at the word's labels, times the product of
    deformed inner products of the paired vectors.
    """
    l = spec.l
    if l % 2:
        return Fraction(0) if setup.exact else complex(0)
    total = Fraction(0) if setup.exact else complex(0)
    for nu in pair_partitions(l):
        term = g_coefficient(nu, spec.labels, deformation.entries)
        for i, j in nu.pairs:
            term = term * setup.u_inner(spec.vectors[i], spec.vectors[j])
        total = total + term
    return total


def moment_matrix(spec: MomentSpec, fock):
    """Oracle value: multiply the realized field operators, read the vacuum
    component of the product applied to the vacuum.

    Exact whenever l <= 2*n_max: a nonzero vacuum-to-vacuum path climbs at
    most l/2 levels, so the cutoff never clips a contributing term.
    """
    if spec.l > 2 * fock.n_max:
        raise CutoffError(
            f"word length {spec.l} needs cutoff >= {-(-spec.l // 2)}, "
            f"have {fock.n_max}"
        )
    prod = identity_matrix(fock.total_dim, fock.exact)
    for v, label in zip(spec.vectors, spec.labels):
        prod = prod.dot(wick_operator(fock, [v], (label,)).operator)
    return vacuum_expectation(fock, prod)


def _serialize(spec: MomentSpec, deformation) -> dict:
    return {
        "labels": list(spec.labels),
        "vectors": [[repr(x) for x in v] for v in spec.vectors],
        "deformation": [[repr(x) for x in row] for row in deformation.entries],
    }


def checked_moment(spec: MomentSpec, fock, tolerance: float = 1e-9):
    """Pairing value, cross-checked against the matrix oracle.

    Raises InvariantError with a serialized replay record when the two
    routes differ by more than tolerance*(1 + |value|).
    """
    setup = fock.setup
    pairing = moment_pairings(spec, setup.deformation, setup)
    matrix = moment_matrix(spec, fock)
    gap = abs(complex(pairing - matrix))
    if gap > tolerance * (1 + abs(complex(pairing))):
        replay = _serialize(spec, setup.deformation)
        replay.update(
            {
                "pairing": repr(pairing),
                "matrix": repr(matrix),
                "gap": gap,
                "n_max": fock.n_max,
            }
        )
        raise InvariantError("moment dual-path disagreement", replay)
    return pairing


def spec_hash(spec: MomentSpec) -> str:
    """Stable 12-hex digest identifying the word in reports."""
    parts = [repr(spec.labels)]
    for v in spec.vectors:
        parts.append(",".join(repr(x) for x in v))
    digest = hashlib.sha256("|".join(parts).encode()).hexdigest()
    return digest[:12]


def random_spec(setup, rng, l: int) -> MomentSpec:
    """Random word of l unit-free real single-block vectors."""
    supports = {}
    for index, label in enumerate(setup.block_of):
        supports.setdefault(label, []).append(index)
    labels = sorted(supports)
    vectors = []
    for _ in range(l):
        label = labels[rng.integers(len(labels))]
        v = np.zeros(setup.dim)
        for index in supports[label]:
            v[index] = rng.standard_normal()
        if not np.any(v):
            v[supports[label][0]] = 1.0
        vectors.append(v)
    return MomentSpec.build(setup, vectors)


def moment_row(spec: MomentSpec, fock) -> dict:
    """One report row: digest, length, both values, absolute gap."""
    setup = fock.setup
    pairing = complex(moment_pairings(spec, setup.deformation, setup))
    matrix = complex(moment_matrix(spec, fock))
    return {
        "spec": spec_hash(spec),
        "l": spec.l,
        "pairing_re": pairing.real,
        "pairing_im": pairing.imag,
        "matrix_re": matrix.real,
        "matrix_im": matrix.imag,
        "abs_delta": abs(pairing - matrix),
    }
