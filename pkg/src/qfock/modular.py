"""Modular structure of the vacuum state on the truncated space.

The closing operator of the assignment (operator applied to vacuum) maps
x Omega to x* Omega.  Levelwise it conjugates coordinates and reverses the
leg order; its polar decomposition is explicit.  The positive part is the
tensor power of the inverse group generator, and the antiunitary part is
leg reversal composed with the -1/2 generator power.  All three are built
here per level and double-checked against each other by the test suite
rather than assumed.

Antilinear maps are stored through their linear parts: apply(v) is always
(matrix) . conj(v), so compositions reduce to matrix products with an
explicit conjugation bookkeeping.

Flow orientation.  The one-parameter flow realized here acts on a word
argument by the tensor power of A^{-iz}, which at real z = t coincides
with conjugation by the quantized group element at time -t.  With that
convention the exchange identity of the state reads

    phi(x y) = phi(y sigma_{-i}(x)),   equivalently   phi(sigma_{+i}(y) x);

placing sigma_{-i} on the left factor instead is wrong whenever some
rotation parameter exceeds 1 (the two sides then differ by the square of
the generator).  ``kms_residual`` measures the first form.  The test suite
demonstrates the failure of the misoriented form instead of silently
picking a side.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CutoffError
from .linalg import block_diag, kron_power
from .wick import WickWord, from_vector, vacuum_expectation

__all__ = [
    "ModularData",
    "kms_residual",
    "modular_flow",
]


@dataclass(frozen=True, eq=False)
class ModularData:
    """Per-level modular matrices of the vacuum state.

    Every method returns a matrix acting on one level's coordinates, except
    the ``*_full`` variants, which assemble the block-diagonal action on the
    whole truncated space.
    """

    fock: object

    def _guard(self, n: int) -> None:
        if not 0 <= n <= self.fock.n_max:
            raise CutoffError(f"level {n} outside cutoff {self.fock.n_max}")

    def reversal(self, n: int) -> np.ndarray:
        """Permutation matrix sending each basis word to its reversal."""
        self._guard(n)
        fock = self.fock
        out = fock._zeros((fock.level_dim(n), fock.level_dim(n)))
        one = Fraction(1) if fock.exact else 1.0
        for idx in range(fock.level_dim(n)):
            rev = fock.word_index(fock.index_word(idx, n)[::-1])
            out[rev, idx] = one
        return out

    def delta_power(self, z, n: int) -> np.ndarray:
        """Level-n matrix of the z-th power of the modular operator.

        The modular operator acts as the n-fold tensor power of the inverse
        generator, so its z-th power is the tensor power of A^{-z}.
        """
        self._guard(n)
        return kron_power(self.fock.setup.a_power(-z), n)

    def delta_full(self, z) -> np.ndarray:
        return block_diag(
            [self.delta_power(z, n) for n in range(self.fock.n_max + 1)]
        )

    def s_apply(self, v, n: int) -> np.ndarray:
        """Closing map on a level-n coordinate vector: conjugate the
        coordinates, then reverse the legs.  On real simple tensors this is
        a pure reversal of the factors."""
        return self.reversal(n).dot(np.conj(np.asarray(v)))

    def j_matrix(self, n: int) -> np.ndarray:
        """Linear part of the modular conjugation: reversal composed with
        the legwise -1/2 power of the generator."""
        self._guard(n)
        half = kron_power(self.fock.setup.a_power(-0.5), n)
        return self.reversal(n).dot(half)

    def j_apply(self, v, n: int) -> np.ndarray:
        return self.j_matrix(n).dot(np.conj(np.asarray(v)))

    def s_full_apply(self, v) -> np.ndarray:
        fock = self.fock
        out = fock._zeros(fock.total_dim)
        for n in range(fock.n_max + 1):
            sl = fock.level_slice(n)
            out[sl] = self.s_apply(np.asarray(v)[sl], n)
        return out

    def unitary_level(self, t: float, n: int) -> np.ndarray:
        """Level-n quantized group element: the group acts on every leg."""
        self._guard(n)
        return kron_power(self.fock.setup.u_matrix(t), n)

    def fock_unitary(self, t: float) -> np.ndarray:
        """Quantized group element on the whole truncated space."""
        return block_diag(
            [self.unitary_level(t, n) for n in range(self.fock.n_max + 1)]
        )


def modular_flow(fock, z, word: WickWord) -> WickWord:
    """Flow of a Wick word at complex time z.

    The argument is hit legwise by A^{-iz} and the word is re-realized
    through the canonical basis-word path.  At real z = t this agrees with
    conjugation by the quantized group element at time -t; at z = -i an
    eigenvector argument with generator eigenvalue lam is scaled by 1/lam.
    """
    n = word.level
    if n == 0:
        return word
    mat = kron_power(fock.setup.a_power(-1j * z), n)
    return from_vector(fock, mat.dot(word.argument), n)


def kms_residual(fock, x: WickWord, y: WickWord) -> float:
    """Exchange-identity residual |phi(x y) - phi(y sigma_{-i}(x))|.

    Exact (up to roundoff) whenever both words have level <= n_max/2, since
    no vacuum-to-vacuum path then leaves the cutoff.
    """
    flowed = modular_flow(fock, -1j, x)
    lhs = vacuum_expectation(fock, x.operator.dot(y.operator))
    rhs = vacuum_expectation(fock, y.operator.dot(flowed.operator))
    return abs(complex(lhs - rhs))
