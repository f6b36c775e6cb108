"""Truncated deformed Fock space over a finite-dimensional group model.

Level n is spanned by words (a_1, ..., a_n) over the basis indices, in
lexicographic order.  The deformation enters through the flip operator
T(e_a (x) e_b) = q_{block(a), block(b)} e_b (x) e_a, its amplifications T_i,
the quasi-multiplicative representation pi of the symmetric groups, and the
level symmetrizers P(n) = sum over pi(sigma).  The deformed level inner
product is represented by the Gram matrix (G_U tensor power) P(n).

pi(sigma) in this representation sends each basis word to a single scaled
basis word, so permutations are carried as (index map, coefficient) pairs
and P(n) assembly costs one vector pass per permutation.

Creation beyond the level cutoff raises CutoffError rather than silently
truncating; identities are only ever asserted on compositions that stay
inside the cutoff.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .combinatorics import (
    apply_adjacent,
    descents,
    f_coefficient,
    index_splittings,
    permutations_by_length,
)
from .errors import BuildError, CutoffError
from .linalg import (
    block_diag,
    gram_inner,
    identity_matrix,
    kron_power,
    max_abs,
    min_gen_eig,
    op_norm,
    to_float,
)

MAX_LEVEL = 5
MAX_LEVEL_DIM = 2048

_POSITIVITY_FLOOR = 1e-8


@dataclass(frozen=True)
class _Monomial:
    """Operator sending e_w to coeff[w] * e_{perm[w]} (w = word index)."""

    perm: np.ndarray
    coeff: np.ndarray

    def after(self, other: "_Monomial") -> "_Monomial":
        """Composition self o other (other acts first)."""
        return _Monomial(
            self.perm[other.perm], other.coeff * self.coeff[other.perm]
        )

    def matrix(self, exact: bool) -> np.ndarray:
        size = len(self.perm)
        if exact:
            out = np.full((size, size), Fraction(0), dtype=object)
        else:
            out = np.zeros((size, size), dtype=complex)
        out[self.perm, np.arange(size)] = self.coeff
        return out


class TruncatedFock:
    """Levels 0..n_max of the deformed Fock space, fully materialized.

    Immutable by convention after construction.  All matrices are dense;
    the word count of the top level is capped to keep them workable.
    """

    def __init__(self, setup, n_max: int):
        if not 1 <= n_max <= MAX_LEVEL:
            raise BuildError(
                "level cutoff must lie in [1, %d], got %r" % (MAX_LEVEL, n_max)
            )
        if setup.dim**n_max > MAX_LEVEL_DIM:
            raise BuildError(
                "top level needs %d basis words, cap is %d; lower the cutoff "
                "or the dimension" % (setup.dim**n_max, MAX_LEVEL_DIM)
            )
        self.setup = setup
        self.n_max = int(n_max)
        self.dim = setup.dim
        self.exact = setup.exact
        self._block_arr = np.array(setup.block_of, dtype=int)

        self.t_matrix = self._flip(2, 0).matrix(self.exact)
        self._pi_tables = [self._pi_table(n) for n in range(n_max + 1)]
        self.p_matrices = tuple(self._assemble_p(n) for n in range(n_max + 1))
        self.gram_levels = tuple(self._level_gram(n) for n in range(n_max + 1))
        self._check_build()
        g2 = to_float(kron_power(self.setup.u_gram, 2))
        self.t_norm = op_norm(to_float(self.t_matrix), g2, g2)
        self.full_gram = block_diag(self.gram_levels)

    # -- word bookkeeping ----------------------------------------------------

    def level_dim(self, n: int) -> int:
        return self.dim**n

    @property
    def total_dim(self) -> int:
        return sum(self.dim**n for n in range(self.n_max + 1))

    def level_offset(self, n: int) -> int:
        return sum(self.dim**m for m in range(n))

    def level_slice(self, n: int) -> slice:
        off = self.level_offset(n)
        return slice(off, off + self.level_dim(n))

    def word_index(self, word) -> int:
        idx = 0
        for a in word:
            idx = idx * self.dim + a
        return idx

    def index_word(self, idx: int, n: int) -> tuple:
        word = []
        for _ in range(n):
            idx, a = divmod(idx, self.dim)
            word.append(a)
        return tuple(reversed(word))

    def basis_words(self, n: int):
        return list(itertools.product(range(self.dim), repeat=n))

    def labels_of(self, word) -> tuple:
        return tuple(self.setup.block_of[a] for a in word)

    def _digits(self, n: int) -> np.ndarray:
        """(n, dim**n) array: digit at each position of every word index."""
        idx = np.arange(self.dim**n)
        return np.array(
            [(idx // self.dim ** (n - 1 - pos)) % self.dim for pos in range(n)]
        )

    def _zeros(self, shape) -> np.ndarray:
        if self.exact:
            return np.full(shape, Fraction(0), dtype=object)
        return np.zeros(shape, dtype=complex)

    def _check_vector(self, xi) -> np.ndarray:
        xi = np.asarray(xi)
        if xi.shape != (self.dim,):
            raise BuildError("vector of dimension %d expected" % self.dim)
        return xi

    # -- flip operators and the symmetric-group representation ----------------

    def _flip(self, n: int, i: int) -> _Monomial:
        """T_i on level n: swap legs i, i+1 with the deformation weight."""
        digits = self._digits(n)
        left, right = digits[i], digits[i + 1]
        stride = self.dim ** (n - 1 - i)
        shift = (right - left) * stride - (right - left) * (stride // self.dim)
        labels = self._block_arr
        coeff = self.setup.deformation.entries[labels[left], labels[right]]
        return _Monomial(np.arange(self.dim**n) + shift, np.array(coeff))

    def _identity_monomial(self, n: int) -> _Monomial:
        size = self.dim**n
        coeff = self._zeros(size)
        coeff[:] = Fraction(1) if self.exact else 1.0
        return _Monomial(np.arange(size), coeff)

    def _pi_table(self, n: int) -> dict:
        """pi(sigma) for every sigma in S_n, grown one adjacent flip at a time."""
        flips = [self._flip(n, i) for i in range(n - 1)]
        table = {}
        for perm in permutations_by_length(n):
            ds = descents(perm)
            if not ds:
                table[perm] = self._identity_monomial(n)
                continue
            i = ds[0]
            shorter = apply_adjacent(perm, i)
            # perm = shorter . t_i with one more inversion, so pi multiplies
            table[perm] = table[shorter].after(flips[i])
        return table

    def pi_of(self, perm, n: int) -> np.ndarray:
        """Matrix of pi(sigma) on level n."""
        if n > self.n_max:
            raise CutoffError("level %d beyond cutoff %d" % (n, self.n_max))
        perm = tuple(perm)
        if len(perm) != n:
            raise BuildError("permutation of %d letters expected" % n)
        return self._pi_tables[n][perm].matrix(self.exact)

    def t_amplified(self, i: int, n: int) -> np.ndarray:
        """T_i on level n by Kronecker assembly (independent of _flip)."""
        eye = identity_matrix(self.dim, self.exact)
        out = kron_power(eye, i)
        out = np.kron(out, self.t_matrix)
        return np.kron(out, kron_power(eye, n - i - 2))

    def _assemble_p(self, n: int) -> np.ndarray:
        out = self._zeros((self.dim**n, self.dim**n))
        cols = np.arange(self.dim**n)
        for mono in self._pi_tables[n].values():
            # one scaled permutation per sigma: row indices never repeat
            out[mono.perm, cols] += mono.coeff
        return out

    def p_matrix(self, n: int) -> np.ndarray:
        if n > self.n_max:
            raise CutoffError("level %d beyond cutoff %d" % (n, self.n_max))
        return self.p_matrices[n]

    def gram(self, n: int) -> np.ndarray:
        if n > self.n_max:
            raise CutoffError("level %d beyond cutoff %d" % (n, self.n_max))
        return self.gram_levels[n]

    def _level_gram(self, n: int) -> np.ndarray:
        return kron_power(self.setup.u_gram, n).dot(self.p_matrices[n])

    def min_p_eigenvalue(self, n: int) -> float:
        """Smallest eigenvalue of P(n) in the undeformed-power geometry."""
        return min_gen_eig(
            self.gram_levels[n], kron_power(to_float(self.setup.u_gram), n)
        )

    def _check_build(self) -> None:
        problems = []
        for n in range(self.n_max + 1):
            g = to_float(self.gram_levels[n])
            if max_abs(g - g.conj().T) > 1e-10 * max(1.0, max_abs(g)):
                problems.append("level %d Gram is not Hermitian" % n)
            elif self.min_p_eigenvalue(n) <= _POSITIVITY_FLOOR:
                problems.append("level %d symmetrizer lost strict positivity" % n)
        if problems:
            raise BuildError(problems)

    # -- creation / annihilation ----------------------------------------------

    def creation(self, xi, n: int) -> np.ndarray:
        """Matrix of prepending xi, level n -> n + 1."""
        if n >= self.n_max:
            raise CutoffError(
                "creation out of level %d would leave the cutoff %d"
                % (n, self.n_max)
            )
        xi = self._check_vector(xi)
        eye = identity_matrix(self.level_dim(n), self.exact)
        return np.kron(xi.reshape(self.dim, 1), eye)

    def annihilation(self, xi, n: int) -> np.ndarray:
        """Deformed removal of one leg, level n -> n - 1.

        Each position k contributes <xi, w_k>_U times the product of the
        weights q_{block(w_k), block(w_j)} over j < k, on the word with
        position k deleted.  Level 0 maps to the empty level: the vacuum
        is annihilated.
        """
        if not 0 <= n <= self.n_max:
            raise CutoffError("no level %d in this truncation" % n)
        xi = self._check_vector(xi)
        if n == 0:
            return self._zeros((0, 1))
        pairings = np.conj(xi).dot(self.setup.u_gram)  # <xi, e_a>_U by a
        ent = self.setup.deformation.entries
        bl = self.setup.block_of
        out = self._zeros((self.level_dim(n - 1), self.level_dim(n)))
        for idx in range(self.level_dim(n)):
            word = self.index_word(idx, n)
            for k in range(n):
                weight = pairings[word[k]]
                if weight == 0:
                    continue
                for j in range(k):
                    weight = weight * ent[bl[word[k]], bl[word[j]]]
                target = self.word_index(word[:k] + word[k + 1 :])
                out[target, idx] += weight
        return out

    # -- splitting maps ---------------------------------------------------------

    def r_star(self, n: int, k: int) -> np.ndarray:
        """Splitting map, level n + k -> (level n) tensor (level k).

        Sum over right index sets J of size k of the inversion weight
        f_{(J^c, J)} applied to the reshuffled word; the coordinate space
        is the same word space of length n + k on both sides.
        """
        total = n + k
        if total > self.n_max:
            raise CutoffError("level %d beyond cutoff %d" % (total, self.n_max))
        out = self._zeros((self.level_dim(total), self.level_dim(total)))
        ent = self.setup.deformation.entries
        for idx in range(self.level_dim(total)):
            word = self.index_word(idx, total)
            labels = self.labels_of(word)
            for left, right in index_splittings(total, k):
                coeff = f_coefficient(left, right, labels, ent)
                target = self.word_index(
                    tuple(word[p] for p in left) + tuple(word[p] for p in right)
                )
                out[target, idx] += coeff
        return out

    # -- full-space helpers -------------------------------------------------------

    def vacuum(self) -> np.ndarray:
        out = self._zeros(self.total_dim)
        out[0] = Fraction(1) if self.exact else 1.0
        return out

    def embed(self, vec, n: int) -> np.ndarray:
        """Place a level-n coordinate vector into the full space."""
        out = self._zeros(self.total_dim)
        out[self.level_slice(n)] = vec
        return out

    def extract(self, vec, n: int) -> np.ndarray:
        return np.asarray(vec)[self.level_slice(n)]

    def full_inner(self, u, v):
        """Deformed inner product on the whole truncated space."""
        return gram_inner(u, v, self.full_gram)

    def full_norm(self, v) -> float:
        return math.sqrt(abs(self.full_inner(v, v)))
