"""Wick operators: splitting formula, fields, recursion, compression.

Oracles: full-space ladder matrices assembled by hand from the fock layer,
term-by-term hand expansions for small levels, and a taller truncation of
the same space for the compression semantics.
"""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from qfock.errors import BuildError, CutoffError
from qfock.fock import TruncatedFock
from qfock.hilbert import build_space
from qfock.linalg import max_abs, op_norm, to_float
from qfock.wick import (
    basis_word_operator,
    field,
    from_vector,
    leg_label,
    norm_bound,
    wick_operator,
    wick_recursion_residual,
)

from conftest import Q_EXACT, Q_MIXED, Q_TRIVIAL, random_complex


@pytest.fixture(scope="module")
def fock_mixed():
    setup = build_space(Q_MIXED, [("rotation", 0, 2.0), ("fixed", 1)])
    return TruncatedFock(setup, 4)


@pytest.fixture(scope="module")
def fock_exact():
    setup = build_space(Q_EXACT, [("fixed", 0), ("fixed", 1)], exact=True)
    return TruncatedFock(setup, 3)


def full_creation(fock, xi):
    """Ladder oracle: creation on every admissible level at once."""
    out = np.zeros((fock.total_dim, fock.total_dim), dtype=complex)
    for m in range(fock.n_max):
        out[fock.level_slice(m + 1), fock.level_slice(m)] = to_float(
            fock.creation(xi, m)
        )
    return out


def full_annihilation(fock, xi):
    out = np.zeros((fock.total_dim, fock.total_dim), dtype=complex)
    for m in range(1, fock.n_max + 1):
        out[fock.level_slice(m - 1), fock.level_slice(m)] = to_float(
            fock.annihilation(xi, m)
        )
    return out


def state(fock, mat):
    """Vacuum expectation of a full-space operator matrix."""
    return to_float(mat.dot(fock.vacuum()))[0]


# -- level 1 -------------------------------------------------------------------

def test_level_one_is_ladder_sum(fock_mixed, rng):
    xi = random_complex(rng, fock_mixed.dim)
    xi[2] = 0  # keep the leg inside block 0
    xi[1] = xi[0] * 0.3
    word = wick_operator(fock_mixed, [xi])
    oracle = full_creation(fock_mixed, xi) + full_annihilation(
        fock_mixed, np.conj(xi)
    )
    assert max_abs(to_float(word.operator) - oracle) < 1e-12


def test_vacuum_reproduction_levels(fock_mixed, rng):
    for n in (1, 2, 3):
        vec = random_complex(rng, fock_mixed.level_dim(n))
        word = from_vector(fock_mixed, vec, n)
        image = to_float(word.vacuum_image())
        assert np.allclose(image, to_float(fock_mixed.embed(vec, n)), atol=1e-12)


def test_level_one_self_adjoint_for_real(fock_mixed):
    xi = np.array([0.7, -0.2, 0.0], dtype=complex)
    word = wick_operator(fock_mixed, [xi])
    assert max_abs(to_float(word.operator) - to_float(word.adjoint_matrix())) < 1e-11


# -- level 2 hand expansion ------------------------------------------------------

def test_level_two_expansion(fock_mixed, rng):
    # legs in blocks (0, 1); the crossing term carries q_{t2,t1}
    xi1 = np.zeros(3, dtype=complex)
    xi1[:2] = random_complex(rng, 2)
    xi2 = np.zeros(3, dtype=complex)
    xi2[2] = 1.4 - 0.2j
    q21 = Q_MIXED[1][0]
    word = wick_operator(fock_mixed, [xi1, xi2])
    assert word.labels == (0, 1)
    c1, c2 = full_creation(fock_mixed, xi1), full_creation(fock_mixed, xi2)
    a1 = full_annihilation(fock_mixed, np.conj(xi1))
    a2 = full_annihilation(fock_mixed, np.conj(xi2))
    oracle = c1 @ c2 + c1 @ a2 + q21 * (c2 @ a1) + a1 @ a2
    # sources below the cutoff boundary are compression-free
    valid = fock_mixed.level_offset(fock_mixed.n_max - 1)
    diff = to_float(word.operator) - oracle
    assert max_abs(diff[:, :valid]) < 1e-12


def test_explicit_formula_matches_basis_route(fock_mixed, rng):
    xi1 = np.zeros(3, dtype=complex)
    xi1[:2] = random_complex(rng, 2)
    xi2 = np.zeros(3, dtype=complex)
    xi2[2] = 0.8 + 0.1j
    direct = wick_operator(fock_mixed, [xi1, xi2])
    via_basis = from_vector(fock_mixed, np.kron(xi1, xi2), 2)
    assert max_abs(to_float(direct.operator - via_basis.operator)) < 1e-12


def test_linearity_in_a_leg(fock_mixed, rng):
    xi = np.zeros(3, dtype=complex)
    xi[:2] = random_complex(rng, 2)
    eta = np.zeros(3, dtype=complex)
    eta[:2] = random_complex(rng, 2)
    other = np.zeros(3, dtype=complex)
    other[2] = 1.0
    z = 0.4 - 1.1j
    lhs = wick_operator(fock_mixed, [z * xi + eta, other]).operator
    rhs = z * wick_operator(fock_mixed, [xi, other]).operator + wick_operator(
        fock_mixed, [eta, other]
    ).operator
    assert max_abs(to_float(lhs - rhs)) < 1e-11


def test_mixed_block_leg_rejected(fock_mixed):
    bad = np.array([1.0, 0.0, 1.0], dtype=complex)
    with pytest.raises(BuildError, match="spans blocks"):
        wick_operator(fock_mixed, [bad])
    with pytest.raises(BuildError, match="no block label"):
        wick_operator(fock_mixed, [np.zeros(3, dtype=complex)])


def test_argument_level_cutoff(fock_mixed):
    legs = [fock_mixed.setup.basis_vector(0)] * 5
    with pytest.raises(CutoffError):
        wick_operator(fock_mixed, legs)


# -- field operators ---------------------------------------------------------------

def test_field_matches_ladder_sum(fock_mixed):
    xi = np.array([0.3, 1.1, -0.4])
    s = field(fock_mixed, xi)
    oracle = full_creation(fock_mixed, xi) + full_annihilation(fock_mixed, xi)
    assert max_abs(to_float(s.operator) - oracle) < 1e-13
    assert np.allclose(to_float(s.vacuum_image())[fock_mixed.level_slice(1)], xi)


def test_field_self_adjoint(fock_mixed):
    xi = np.array([0.3, 1.1, -0.4])
    s = field(fock_mixed, xi)
    assert max_abs(to_float(s.operator - s.adjoint_matrix())) < 1e-11


def test_field_square_moment(fock_mixed):
    xi = np.array([0.9, -0.5, 0.7])
    s = field(fock_mixed, xi).operator
    expect = fock_mixed.setup.u_inner(xi, xi)
    assert state(fock_mixed, s.dot(s)) == pytest.approx(expect, abs=1e-12)


def test_field_rejects_complex(fock_mixed):
    with pytest.raises(BuildError, match="real"):
        field(fock_mixed, np.array([1j, 0, 0]))


def test_field_equals_level_one_wick(fock_mixed):
    xi = np.array([0.0, 0.0, 2.3])
    s = field(fock_mixed, xi)
    w = wick_operator(fock_mixed, [xi])
    assert max_abs(to_float(s.operator - w.operator)) == 0


# -- recursion -------------------------------------------------------------------

def test_recursion_single_step(fock_mixed, rng):
    xi1 = np.zeros(3, dtype=complex)
    xi1[:2] = random_complex(rng, 2)
    xi2 = np.zeros(3, dtype=complex)
    xi2[:2] = random_complex(rng, 2)
    assert wick_recursion_residual(fock_mixed, xi1, [xi2]) < 1e-10


def test_recursion_orthogonal_pair_exact_product(fock_mixed):
    # <conj(xi1), xi2>_U = 0 makes the correction vanish entirely
    xi1 = np.zeros(3, dtype=complex)
    xi1[0] = 1.0
    xi2 = np.zeros(3, dtype=complex)
    xi2[2] = 1.0
    assert fock_mixed.setup.u_inner(np.conj(xi1), xi2) == 0
    w12 = wick_operator(fock_mixed, [xi1, xi2]).operator
    prod = wick_operator(fock_mixed, [xi1]).operator.dot(
        wick_operator(fock_mixed, [xi2]).operator
    )
    valid = fock_mixed.level_offset(fock_mixed.n_max - 1)
    assert max_abs(to_float(w12 - prod)[:, :valid]) < 1e-12


def test_recursion_two_step_random(rng):
    setup = build_space(
        [[0.35, -0.15, 0.2], [-0.15, 0.5, 0.1], [0.2, 0.1, 0.25]],
        [("fixed", 0), ("fixed", 1), ("fixed", 2)],
    )
    fock = TruncatedFock(setup, 3)
    for _ in range(4):
        legs = []
        for _ in range(3):
            v = np.zeros(3, dtype=complex)
            v[int(rng.integers(0, 3))] = rng.standard_normal() + 1j * rng.standard_normal()
            legs.append(v)
        assert wick_recursion_residual(fock, legs[0], legs[1:]) < 1e-10


def test_recursion_exact_is_zero(fock_exact):
    e0 = fock_exact.setup.basis_vector(0)
    e1 = fock_exact.setup.basis_vector(1)
    assert wick_recursion_residual(fock_exact, e0, [e1, e1]) == 0


# -- compression semantics ----------------------------------------------------------

def test_truncation_is_compression():
    setup = build_space(Q_TRIVIAL, [("fixed", 0), ("fixed", 1)])
    small = TruncatedFock(setup, 3)
    tall = TruncatedFock(setup, 5)
    for word in [(0,), (0, 1), (1, 0, 0)]:
        op_small = to_float(basis_word_operator(small, word))
        op_tall = to_float(basis_word_operator(tall, word))
        keep = small.total_dim
        assert max_abs(op_small - op_tall[:keep, :keep]) < 1e-13


# -- norm bound ----------------------------------------------------------------------

def test_norm_bound_dominates_measured_norm(fock_mixed, rng):
    g = to_float(fock_mixed.full_gram)
    for n in (1, 2):
        vec = random_complex(rng, fock_mixed.level_dim(n))
        word = from_vector(fock_mixed, vec, n)
        measured = op_norm(to_float(word.operator), g, g)
        assert measured <= norm_bound(fock_mixed, vec, n) + 1e-9


# -- exact mode ------------------------------------------------------------------------

def test_exact_wick_entries(fock_exact):
    e0 = fock_exact.setup.basis_vector(0)
    e1 = fock_exact.setup.basis_vector(1)
    word = wick_operator(fock_exact, [e0, e1])
    assert word.operator.dtype == object
    image = word.vacuum_image()
    assert image[fock_exact.level_offset(2) + fock_exact.word_index((0, 1))] == 1
    # vacuum-to-vacuum entry of W(e0 (x) e1) is exactly zero
    assert word.operator[0, 0] == 0


def test_leg_label_helper(fock_mixed):
    assert leg_label(fock_mixed.setup, [1.0, 2.0, 0.0]) == 0
    assert leg_label(fock_mixed.setup, [0, 0, 3.0]) == 1
