"""Modular data: reversal, generator powers, conjugation, flow, exchange."""

from fractions import Fraction as F

import numpy as np
import pytest

from qfock.errors import CutoffError
from qfock.fock import TruncatedFock
from qfock.hilbert import DeformationMatrix, build_space
from qfock.linalg import gram_inner, max_abs, to_float
from qfock.modular import ModularData, kms_residual, modular_flow
from qfock.wick import field, from_vector, vacuum_expectation, wick_operator

MOD_Q = [[0.3, -0.2], [-0.2, 0.55]]
LAM = 2.0


@pytest.fixture(scope="module")
def fock4():
    setup = build_space(
        DeformationMatrix.build(MOD_Q),
        [("rotation", 0, LAM), ("fixed", 1)],
    )
    return TruncatedFock(setup, 4)


@pytest.fixture(scope="module")
def modular4(fock4):
    return ModularData(fock4)


@pytest.fixture(scope="module")
def exact_modular():
    setup = build_space(
        DeformationMatrix.build([[F(1, 3), F(1, 7)], [F(1, 7), F(2, 5)]]),
        [("fixed", 0), ("fixed", 1)],
        exact=True,
    )
    return ModularData(TruncatedFock(setup, 3))


def eigvec_pair(setup):
    a, b = setup.rotations[0].indices
    e = np.eye(setup.dim, dtype=complex)
    plus = (e[a] - 1j * e[b]) / np.sqrt(2)
    minus = (e[a] + 1j * e[b]) / np.sqrt(2)
    return plus, minus


def random_word(fock, rng, n):
    shape = fock.level_dim(n)
    arg = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return from_vector(fock, arg, n)


def test_reversal_permutes_words(fock4, modular4):
    rev2 = modular4.reversal(2)
    for idx in range(fock4.level_dim(2)):
        word = fock4.index_word(idx, 2)
        target = fock4.word_index(word[::-1])
        col = np.zeros(fock4.level_dim(2))
        col[target] = 1.0
        assert np.array_equal(to_float(rev2[:, idx]), col)
    assert max_abs(rev2.dot(rev2) - np.eye(9)) == 0
    assert to_float(modular4.reversal(0))[0, 0] == pytest.approx(1.0)
    assert max_abs(modular4.reversal(1) - np.eye(3)) == 0


def test_s_reverses_real_simple_tensors(modular4, rng):
    x = rng.standard_normal(3)
    y = rng.standard_normal(3)
    out = modular4.s_apply(np.kron(x, y), 2)
    assert max_abs(out - np.kron(y, x)) <= 1e-14


def test_s_is_an_involution(fock4, modular4, rng):
    for n in range(fock4.n_max + 1):
        v = rng.standard_normal(fock4.level_dim(n)) + 1j * rng.standard_normal(
            fock4.level_dim(n)
        )
        back = modular4.s_apply(modular4.s_apply(v, n), n)
        assert max_abs(back - v) <= 1e-14


def test_delta_scales_generator_eigenvectors(fock4, modular4):
    plus, _ = eigvec_pair(fock4.setup)
    image = modular4.delta_power(1, 1).dot(plus)
    assert max_abs(image - plus / LAM) <= 1e-12


def test_delta_matches_tensor_power_oracle(fock4, modular4):
    for z in (1.0, 0.5, -1.0, 0.3 + 0.7j):
        one = fock4.setup.a_power(-z)
        assert max_abs(modular4.delta_power(z, 2) - np.kron(one, one)) <= 1e-12
    assert to_float(modular4.delta_power(0.77, 0))[0, 0] == pytest.approx(1.0)


def test_delta_group_law(modular4, fock4):
    samples = (0.4, -1.0, 0.2 - 0.5j)
    for n in (2, 3):
        for z in samples:
            for w in samples:
                lhs = modular4.delta_power(z, n).dot(modular4.delta_power(w, n))
                rhs = modular4.delta_power(z + w, n)
                assert max_abs(lhs - rhs) <= 1e-11


def test_delta_imaginary_powers_are_gram_unitary(fock4, modular4):
    for t in (0.3, 1.0):
        for n in range(fock4.n_max + 1):
            m = modular4.delta_power(1j * t, n)
            g = to_float(fock4.gram(n))
            assert max_abs(np.conj(m).T.dot(g).dot(m) - g) <= 1e-11


def test_tomita_decomposition(fock4, modular4):
    # closing map = conjugation composed with positive part: linear parts
    # must satisfy reversal = j_matrix . conj(delta^{1/2}) on every level
    for n in range(fock4.n_max + 1):
        lhs = to_float(modular4.reversal(n))
        rhs = modular4.j_matrix(n).dot(np.conj(modular4.delta_power(0.5, n)))
        assert max_abs(lhs - rhs) <= 1e-11


def test_j_is_an_antiunitary_involution(fock4, modular4, rng):
    for n in range(fock4.n_max + 1):
        m = modular4.j_matrix(n)
        eye = np.eye(fock4.level_dim(n))
        assert max_abs(m.dot(np.conj(m)) - eye) <= 1e-12
        g = to_float(fock4.gram(n))
        v = rng.standard_normal(fock4.level_dim(n)) + 1j * rng.standard_normal(
            fock4.level_dim(n)
        )
        w = rng.standard_normal(fock4.level_dim(n)) + 1j * rng.standard_normal(
            fock4.level_dim(n)
        )
        lhs = gram_inner(modular4.j_apply(v, n), modular4.j_apply(w, n), g)
        rhs = np.conj(gram_inner(v, w, g))
        assert abs(lhs - rhs) <= 1e-10 * (1 + abs(rhs))


def test_j_real_tensor_formula(fock4, modular4, rng):
    half = fock4.setup.a_power(-0.5)
    x = rng.standard_normal(3)
    y = rng.standard_normal(3)
    out = modular4.j_apply(np.kron(x, y), 2)
    expected = np.kron(half.dot(y), half.dot(x))
    assert max_abs(out - expected) <= 1e-12


def test_s_matches_wick_adjoints(fock4, modular4, rng):
    # the closing map must send x Omega to x* Omega
    for n in (1, 2, 3):
        word = random_word(fock4, rng, n)
        star_vac = word.adjoint_matrix().dot(fock4.vacuum())
        closed = modular4.s_full_apply(word.vacuum_image())
        assert max_abs(star_vac - closed) <= 1e-10


def test_fock_unitary_fixes_vacuum_and_gram(fock4, modular4):
    for t in (0.0, 0.3, 1.0):
        u = modular4.fock_unitary(t)
        assert max_abs(u.dot(fock4.vacuum()) - fock4.vacuum()) <= 1e-13
        g = to_float(fock4.full_gram)
        assert max_abs(np.conj(u).T.dot(g).dot(u) - g) <= 1e-11
    assert max_abs(modular4.fock_unitary(0.0) - np.eye(fock4.total_dim)) == 0


def test_fock_unitary_intertwines_fields(fock4, modular4, rng):
    xi = rng.standard_normal(3)
    for t in (0.3, 1.0):
        u = modular4.fock_unitary(t)
        u_inv = modular4.fock_unitary(-t)
        moved = u.dot(field(fock4, xi).operator).dot(u_inv)
        direct = field(fock4, fock4.setup.u_matrix(t).dot(xi)).operator
        assert max_abs(moved - direct) <= 1e-11


def test_modular_flow_at_real_times(fock4, modular4, rng):
    word = random_word(fock4, rng, 2)
    frozen = modular_flow(fock4, 0.0, word)
    assert max_abs(frozen.operator - word.operator) <= 1e-12
    for t in (0.3, 1.0):
        flowed = modular_flow(fock4, t, word)
        u = modular4.fock_unitary(-t)
        u_inv = modular4.fock_unitary(t)
        conj = u.dot(word.operator).dot(u_inv)
        assert max_abs(flowed.operator - conj) <= 1e-11


def test_flow_scales_eigenvector_words(fock4):
    plus, _ = eigvec_pair(fock4.setup)
    word = wick_operator(fock4, [plus])
    flowed = modular_flow(fock4, -1j, word)
    assert max_abs(flowed.argument - plus / LAM) <= 1e-12
    assert max_abs(flowed.operator - word.operator / LAM) <= 1e-12


def test_exchange_identity_orientation(fock4):
    plus, minus = eigvec_pair(fock4.setup)
    x = wick_operator(fock4, [plus])
    y = wick_operator(fock4, [minus])
    assert kms_residual(fock4, x, y) <= 1e-10
    # the misoriented form (flow on the left factor) fails by 2(lam - 1)
    lhs = vacuum_expectation(fock4, x.operator.dot(y.operator))
    flowed_y = modular_flow(fock4, -1j, y)
    bad = vacuum_expectation(fock4, flowed_y.operator.dot(x.operator))
    assert abs(lhs - bad) > 2 * (LAM - 1) - 0.1


def test_exchange_identity_on_random_words(fock4, rng):
    for _ in range(10):
        x = random_word(fock4, rng, int(rng.integers(1, 3)))
        y = random_word(fock4, rng, int(rng.integers(1, 3)))
        assert kms_residual(fock4, x, y) <= 1e-10


def test_state_invariance_under_flow(fock4, modular4, rng):
    for t in (0.3, 1.0, 2.2):
        u = modular4.fock_unitary(-t)
        u_inv = modular4.fock_unitary(t)
        x = random_word(fock4, rng, 1)
        y = random_word(fock4, rng, 2)
        prod = x.operator.dot(y.operator)
        moved = u.dot(prod).dot(u_inv)
        before = vacuum_expectation(fock4, prod)
        after = vacuum_expectation(fock4, moved)
        assert abs(before - after) <= 1e-12 * (1 + abs(before))


def test_exact_mode_modular_data(exact_modular):
    md = exact_modular
    fock = md.fock
    rev = md.reversal(2)
    assert rev.dtype == object
    assert np.array_equal(md.j_matrix(2), rev)
    assert np.array_equal(md.delta_power(3, 2), np.eye(4, dtype=object) * F(1))
    # reversal swaps the coordinates of the words (0,1) and (1,0)
    v = np.array([F(1, 2), F(0), F(1, 3), F(0)], dtype=object)
    out = md.s_apply(v, 2)
    assert out[0] == F(1, 2) and out[1] == F(1, 3) and out[2] == 0


def test_level_guard(modular4):
    with pytest.raises(CutoffError):
        modular4.delta_power(1.0, 7)
