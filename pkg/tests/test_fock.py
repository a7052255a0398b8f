import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from parafock import fock
from parafock.errors import CapacityError, ConsistencyError, ParameterError, ValidationError


def exact_eye(d):
    return np.eye(d, dtype=np.int64).astype(object)


def test_variant2_p2_matrices():
    ops = fock.ladder_matrices(fock.FockSpaceSpec(2, 2))
    assert np.array_equal(ops.a_dag, [[0, 0, 0], [1, 0, 0], [0, 2, 0]])
    assert np.array_equal(ops.a, [[0, 2, 0], [0, 0, 1], [0, 0, 0]])


def test_variant1_p2_coefficients():
    ops = fock.ladder_matrices(fock.FockSpaceSpec(1, 2))
    assert [ops.a_dag[n + 1, n] for n in range(2)] == [2, 1]
    assert [ops.a[n - 1, n] for n in range(1, 3)] == [1, 2]


def test_variant4_p3_coefficients():
    ops = fock.ladder_matrices(fock.FockSpaceSpec(4, 3))
    assert np.array_equal(ops.a_dag, np.eye(4, k=-1))
    assert [ops.a[n - 1, n] for n in range(1, 4)] == [3, 4, 3]


def test_band_structure():
    for v in range(1, 6):
        ops = fock.ladder_matrices(fock.FockSpaceSpec(v, 5))
        assert np.array_equal(ops.a_dag, np.tril(np.triu(ops.a_dag, -1), -1))
        assert np.array_equal(ops.a, np.triu(np.tril(ops.a, 1), 1))
        assert np.array_equal(np.diag(ops.number_op), np.arange(6))


def test_invalid_variant():
    with pytest.raises(ParameterError):
        fock.FockSpaceSpec(6, 2)
    with pytest.raises(ParameterError):
        fock.FockSpaceSpec(1, 0)


@pytest.mark.parametrize("variant", range(1, 6))
def test_ladder_product_identity(variant):
    for p in range(1, 9):
        spec = fock.FockSpaceSpec(variant, p)
        for n in range(1, p + 1):
            lhs = spec.creation_coeff_sq(n - 1) * spec.annihilation_coeff_sq(n)
            assert lhs == (n * (p - n + 1)) ** 2


@pytest.mark.parametrize("variant", [1, 2, 4, 5])
def test_algebra_exact_integer_variants(variant):
    for p in range(1, 9):
        ops = fock.ladder_matrices(fock.FockSpaceSpec(variant, p), exact=True)
        a, ad, N = ops.a, ops.a_dag, ops.number_op
        c = fock.commutator
        assert fock.is_exact_zero(c(a, c(ad, a)) - 2 * a)
        assert fock.is_exact_zero(c(a, N) - a)
        assert fock.is_exact_zero(ad @ a - a @ ad - (2 * N - p * exact_eye(p + 1)))


def test_algebra_variant3_exact():
    for p in range(1, 9):
        ops = fock.ladder_matrices(fock.FockSpaceSpec(3, p), exact=True)
        a, ad, N = ops.a, ops.a_dag, ops.number_op
        c = fock.commutator
        assert fock.is_exact_zero(c(a, c(ad, a)) - 2 * a)
        assert fock.is_exact_zero(ad @ a - a @ ad - (2 * N - p * exact_eye(p + 1)))


def test_annihilating_vacuum():
    for v in range(1, 6):
        ops = fock.ladder_matrices(fock.FockSpaceSpec(v, 3))
        e0 = np.zeros(4)
        e0[0] = 1
        assert not np.any(ops.a @ e0)


def test_green_p1():
    g = fock.green_representation(1)
    assert np.array_equal(g.a_total, [[0, 1], [0, 0]])


def test_green_relations():
    for p in range(1, 7):
        g = fock.green_representation(p)
        eye = np.eye(g.dim, dtype=np.int64)
        for i, b in enumerate(g.bin_ops):
            assert np.array_equal(b @ b.T + b.T @ b, eye)
            assert not np.any(b @ b)
            for j, c in enumerate(g.bin_ops):
                if i != j:
                    assert not np.any(b @ c.T - c.T @ b)
        A = g.a_total
        comm = A.T @ A - A @ A.T
        assert np.array_equal(A @ comm - comm @ A, 2 * A)


def test_green_capacity():
    with pytest.raises(CapacityError):
        fock.green_representation(13)
    with pytest.raises(CapacityError):
        fock.green_representation(5, max_p=4)


def test_green_number_operator_on_embedded_states():
    for p in range(1, 7):
        g = fock.green_representation(p)
        N = g.number_op()
        for n in range(p + 1):
            vec, _ = fock.green_fock_state(fock.FockSpaceSpec(2, p), n, g)
            assert np.array_equal(N @ vec, n * vec)


def test_green_state_norm_examples():
    assert fock.green_state_norm(fock.FockSpaceSpec(2, 2), 1) == 2
    assert fock.green_state_norm(fock.FockSpaceSpec(3, 3), 2) == 1
    for v in range(1, 6):
        assert fock.green_state_norm(fock.FockSpaceSpec(v, 4), 0) == 1


def test_green_state_norm_matches_table():
    # independent table: C(p,n) scaled by the squared coefficient products
    for p in range(1, 7):
        for n in range(p + 1):
            c = math.comb(p, n)
            expected = {1: Fraction(1, c), 2: Fraction(c), 3: Fraction(1),
                        4: Fraction(math.factorial(n) ** 2 * c), 5: Fraction(1, math.factorial(n) ** 2 * c)}
            for v in range(1, 6):
                assert fock.green_state_norm(fock.FockSpaceSpec(v, p), n) == expected[v]


def test_embed_example():
    coords = fock.embed_distribution(fock.FockSpaceSpec(2, 2), np.array([0.0, 1.0, 0.0]))
    assert np.array_equal(coords, [0.0, 0.5, 0.0])


def test_embed_rejects_unnormalized():
    with pytest.raises(ValidationError):
        fock.embed_distribution(fock.FockSpaceSpec(2, 2), np.array([0.5, 0.2, 0.2]))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 5), st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_embed_round_trip_and_s_bra(variant, p, seed):
    rng = np.random.default_rng(seed)
    spec = fock.FockSpaceSpec(variant, p)
    probs = rng.dirichlet(np.ones(p + 1))
    coords = fock.embed_distribution(spec, probs)
    assert np.max(np.abs(fock.extract_probabilities(spec, coords) - probs)) <= 1e-14
    assert abs(fock.s_bra(spec) @ coords - 1.0) <= 1e-12
    for n in range(p + 1):
        assert abs(fock.dual_vector(spec, n) @ coords - probs[n]) <= 1e-14


def test_bracket_examples():
    assert fock.factorial_moment_bracket(fock.FockSpaceSpec(2, 3), 1, [0, 0, 1, 0]) == pytest.approx(2.0, abs=1e-12)
    assert fock.factorial_moment_bracket(fock.FockSpaceSpec(1, 3), 1, [0, 0, 1, 0]) == pytest.approx(2.0, abs=1e-12)
    for v in range(1, 6):
        assert fock.factorial_moment_bracket(fock.FockSpaceSpec(v, 4), 0, [0.1, 0.2, 0.3, 0.2, 0.2]) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_bracket_matrix_equals_formula(variant, p, seed):
    rng = np.random.default_rng(seed)
    probs = rng.dirichlet(np.ones(p + 1))
    for r in range(p + 1):
        # raises ConsistencyError on disagreement
        fock.factorial_moment_bracket(fock.FockSpaceSpec(variant, p), r, probs)


def test_bracket_variant2_is_factorial_moment():
    probs = np.array([0.1, 0.2, 0.3, 0.4])
    for r in range(4):
        expected = sum(probs[n] * fock.falling_factorial(n, r) for n in range(4))
        assert fock.factorial_moment_bracket(fock.FockSpaceSpec(2, 3), r, probs) == pytest.approx(expected, abs=1e-12)


def test_bracket_consistency_error(monkeypatch):
    monkeypatch.setattr(fock, "table_moment_weight", lambda spec, n, r: 0.0)
    with pytest.raises(ConsistencyError):
        fock.factorial_moment_bracket(fock.FockSpaceSpec(2, 3), 1, [0, 0, 1, 0])


def test_stated_number_relation_is_off():
    ops = fock.ladder_matrices(fock.FockSpaceSpec(2, 3), exact=True)
    stated = 3 * exact_eye(4) - fock.commutator(ops.a_dag, ops.a)
    assert not fock.is_exact_zero(stated - ops.number_op)
    assert fock.is_exact_zero(stated - 2 * (3 * exact_eye(4) - ops.number_op))
