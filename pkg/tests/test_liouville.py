from fractions import Fraction

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from oracles import bd_generator, hop_generator, linear_rates, quadratic_rates
from parafock import fock, liouville
from parafock.errors import CapacityError, ModelConstructionError, ParameterError
from parafock.lattice import Lattice


def Q_of(model):
    Q = liouville.to_probability_generator(liouville.build_liouvillian(model), model)
    return Q.toarray() if sp.issparse(Q) else Q


def test_linear_pure_death_p1():
    L = liouville.build_linear_bd(1, 0.0, 1.0)
    assert np.array_equal(L, [[0, 1], [0, -1]])


def test_linear_pure_birth_p2():
    L = liouville.build_linear_bd(2, 1.0, 0.0)
    ops = fock.ladder_matrices(fock.FockSpaceSpec(2, 2))
    assert np.array_equal(L, ops.a_dag - (2 * np.eye(3) - ops.number_op))


def test_linear_generator_example():
    m = liouville.ModelSpec("linear_bd", 2, beta=1.0, mu=1.0)
    assert np.array_equal(Q_of(m), [[-2, 1, 0], [2, -2, 2], [0, 1, -2]])


def test_quadratic_generator_example():
    m = liouville.ModelSpec("quadratic_bd", 2, beta=1.0, mu=1.0)
    assert np.array_equal(Q_of(m), [[0, 1, 0], [0, -2, 2], [0, 1, -2]])


def test_quadratic_exact_generator():
    m = liouville.ModelSpec("quadratic_bd", 2, beta=1.0, mu=1.0)
    Q = liouville.to_probability_generator(liouville.build_quadratic_bd(2, 1, 1, exact=True), m)
    assert Q.dtype == object
    assert [[int(x) for x in row] for row in Q] == [[0, 1, 0], [0, -2, 2], [0, 1, -2]]


def test_quadratic_p1_is_pure_death():
    m = liouville.ModelSpec("quadratic_bd", 1, beta=3.7, mu=1.0)
    assert np.array_equal(Q_of(m), [[0, 1], [0, -1]])


def test_quadratic_variant_difference():
    v1 = liouville.build_quadratic_bd(2, 1.0, 1.0, 1)
    v2 = liouville.build_quadratic_bd(2, 1.0, 1.0, 2)
    assert np.array_equal(v1 - v2, np.diag([0.0, 1.0, 2.0]))


def test_variant2_fails_conservation():
    m = liouville.ModelSpec("quadratic_bd", 3, beta=0.5, mu=1.0, variant=2)
    with pytest.raises(ModelConstructionError):
        liouville.to_probability_generator(liouville.build_liouvillian(m), m)


@pytest.mark.parametrize("p", [1, 2, 3, 4])
@pytest.mark.parametrize("beta,mu", [(1.0, 1.0), (0.3, 2.0), (0.0, 1.5), (2.0, 0.0)])
def test_bd_generators_match_rate_oracle(p, beta, mu):
    lin = liouville.ModelSpec("linear_bd", p, beta=beta, mu=mu)
    assert np.allclose(Q_of(lin), bd_generator(*linear_rates(p, beta, mu)), rtol=0, atol=1e-12)
    quad = liouville.ModelSpec("quadratic_bd", p, beta=beta, mu=mu)
    assert np.allclose(Q_of(quad), bd_generator(*quadratic_rates(p, beta, mu)), rtol=0, atol=1e-12)
    v2 = liouville.ModelSpec("quadratic_bd", p, beta=beta, mu=mu, variant=2)
    Q2 = liouville.to_probability_generator(liouville.build_liouvillian(v2), v2, check=False)
    # pinned: variant 2 sits exactly beta*diag(n) below the master equation
    assert np.allclose(bd_generator(*quadratic_rates(p, beta, mu)) - Q2, beta * np.diag(np.arange(p + 1)), atol=1e-12)


@pytest.mark.parametrize("p", [1, 2, 3])
@pytest.mark.parametrize("L", [1, 2, 3])
@pytest.mark.parametrize("ring", [False, True])
def test_diffusion_matches_hop_oracle(p, L, ring):
    m = liouville.ModelSpec("diffusion", p, nu=0.7, lattice=Lattice(L, "ring" if ring else "path"))
    Q, _ = hop_generator(p, 0.7, L, ring)
    assert np.allclose(Q_of(m), Q, rtol=0, atol=1e-12)


def test_diffusion_two_site_sector():
    m = liouville.ModelSpec("diffusion", 1, nu=1.0, lattice=Lattice(2))
    Q = Q_of(m)
    # states ordered (0,0),(0,1),(1,0),(1,1)
    assert np.array_equal(Q[np.ix_([2, 1], [2, 1])], [[-1, 1], [1, -1]])


def test_diffusion_sector_blocks():
    m = liouville.ModelSpec("diffusion", 2, nu=1.0, lattice=Lattice(3, "ring"))
    Q = Q_of(m)
    _, states = hop_generator(2, 1.0, 3, True)
    totals = np.array([sum(s) for s in states])
    assert not np.any(Q[totals[:, None] != totals[None, :]])


def test_diffusion_capacity():
    with pytest.raises(CapacityError):
        liouville.build_diffusion(3, 1.0, Lattice(9))


def test_diffusion_sparse_above_dense_cap():
    L = liouville.build_diffusion(3, 1.0, Lattice(7, "ring"))
    assert sp.issparse(L)
    m = liouville.ModelSpec("diffusion", 3, nu=1.0, lattice=Lattice(7, "ring"))
    Q = liouville.to_probability_generator(L, m)
    assert np.max(np.abs(np.asarray(Q.sum(axis=0)))) <= 1e-9


def test_printed_sign_gives_negative_rates():
    m = liouville.ModelSpec("diffusion", 1, nu=1.0, lattice=Lattice(2))
    L = liouville.build_diffusion(1, 1.0, Lattice(2), printed_sign=True)
    Q = liouville.to_probability_generator(L, m, check=False)
    assert Q[1, 2] == -1.0


def test_model_spec_validation():
    with pytest.raises(ParameterError):
        liouville.ModelSpec("linear_bd", 2, beta=-1.0)
    with pytest.raises(ParameterError):
        liouville.ModelSpec("quadratic_bd", 2, variant=3)
    with pytest.raises(ParameterError):
        liouville.ModelSpec("other", 2)


def test_moment_rhs_zero_generator():
    assert not np.any(liouville.moment_rhs_matrix(np.zeros((4, 4)), 1, 3))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.floats(0, 3), st.floats(0, 3), st.integers(0, 2**32 - 1))
def test_first_moment_rhs(p, beta, mu, seed):
    rng = np.random.default_rng(seed)
    probs = rng.dirichlet(np.ones(p + 1))
    spec = fock.FockSpaceSpec(2, p)
    coords = fock.embed_distribution(spec, probs)
    s = fock.s_bra(spec)
    n = np.arange(p + 1)
    mean = probs @ n
    lin = liouville.ModelSpec("linear_bd", p, beta=beta, mu=mu)
    val = s @ liouville.moment_rhs_matrix(liouville.build_liouvillian(lin), 1, p) @ coords
    assert abs(val - (-(beta + mu) * mean + beta * p)) <= 1e-10 * max(1, abs(val))
    fact2 = probs @ (n * (n - 1))
    raw2 = probs @ n**2
    v1 = s @ liouville.moment_rhs_matrix(liouville.build_quadratic_bd(p, beta, mu, 1), 1, p) @ coords
    v2 = s @ liouville.moment_rhs_matrix(liouville.build_quadratic_bd(p, beta, mu, 2), 1, p) @ coords
    lin_part = -mean * (mu - beta * (p - 1))
    assert abs(v1 - (lin_part - beta * fact2)) <= 1e-10 * max(1, abs(v1))
    assert abs(v2 - (lin_part - beta * raw2)) <= 1e-10 * max(1, abs(v2))


def test_exact_linear_generator_conserves():
    m = liouville.ModelSpec("linear_bd", 4, beta=0.5, mu=1.5)
    Q = liouville.to_probability_generator(liouville.build_linear_bd(4, Fraction(1, 2), Fraction(3, 2), exact=True), m)
    assert all(c == 0 for c in Q.sum(axis=0))
