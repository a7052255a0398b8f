"""End-to-end acceptance checks, one test per criterion, with pinned tolerances and time budgets."""
import json
import math
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest
import scipy.sparse as sp
import sympy

from oracles import bd_generator, hop_generator, linear_rates, quadratic_rates
from parafock import closed_form, diagram, evolve, fock, liouville, parasym, ssa
from parafock.lattice import Lattice
from parafock.liouville import ModelSpec


def exact_zero(m):
    return all(sympy.simplify(x) == 0 for x in np.asarray(m).ravel())


def eye(d):
    return np.eye(d, dtype=np.int64).astype(object)


# --- 1 ---------------------------------------------------------------------

@pytest.mark.criterion(1)
def test_fock_identities():
    start = time.perf_counter()
    for variant in range(1, 6):
        for p in range(1, 9):
            spec = fock.FockSpaceSpec(variant, p)
            for n in range(1, p + 1):
                # squared comparison keeps variant 3 in integers
                assert spec.creation_coeff_sq(n - 1) * spec.annihilation_coeff_sq(n) == (n * (p - n + 1)) ** 2
            ops = fock.ladder_matrices(spec, exact=True)
            a, ad, N = ops.a, ops.a_dag, ops.number_op
            c = fock.commutator
            assert exact_zero(c(a, c(ad, a)) - 2 * a)
            assert exact_zero(c(a, N) - a)
            assert exact_zero(ad @ a - a @ ad - (2 * N - p * eye(p + 1)))
    assert time.perf_counter() - start < 5


# --- 2 ---------------------------------------------------------------------

def listed_norm(variant, p, n):
    c = math.comb(p, n)
    f = math.factorial(n)
    return {1: Fraction(1, c), 2: Fraction(c), 3: Fraction(1), 4: Fraction(f * f * c), 5: Fraction(1, f * f * c)}[variant]


def listed_weight(variant, p, n, r):
    if n < r:
        return 0
    a, b = math.perm(n, r), math.perm(p - n + r, r)
    return {1: b, 2: a, 3: sympy.sqrt(a * b), 4: 1, 5: a * b}[variant]


@pytest.mark.criterion(2)
def test_norms_and_moment_brackets():
    start = time.perf_counter()
    rng = np.random.default_rng(2)
    for variant in range(1, 6):
        for p in range(1, 7):
            spec = fock.FockSpaceSpec(variant, p)
            g = fock.green_representation(p)
            for n in range(p + 1):
                assert fock.green_state_norm(spec, n, g) == listed_norm(variant, p, n)
            ops = fock.ladder_matrices(spec, exact=True)
            norms = np.array([listed_norm(variant, p, n) for n in range(p + 1)], dtype=object)
            for _ in range(3):
                w = rng.integers(1, 20, p + 1)
                probs = np.array([Fraction(int(x), int(w.sum())) for x in w], dtype=object)
                vec = probs / norms
                for r in range(p + 1):
                    value = norms @ vec
                    expected = sum(probs[n] * listed_weight(variant, p, n, r) for n in range(p + 1))
                    assert sympy.simplify(value - expected) == 0
                    vec = ops.a @ vec
                    # the float bracket must agree with the same numbers to 1e-12
                    fl = fock.factorial_moment_bracket(spec, r, probs.astype(float))
                    assert abs(fl - float(expected)) <= 1e-12 * max(1, abs(float(expected)))
    assert time.perf_counter() - start < 10


# --- 3 ---------------------------------------------------------------------

@pytest.mark.criterion(3)
def test_linear_triple_agreement():
    start = time.perf_counter()
    rng = np.random.default_rng(3)
    for _ in range(200):
        p = int(rng.integers(1, 7))
        beta, mu = float(rng.uniform(0.05, 3)), float(rng.uniform(0.05, 3))
        n0 = int(rng.integers(0, p + 1))
        T = float(rng.uniform(0, 4))
        psi = np.zeros(p + 1)
        psi[n0] = 1
        model = ModelSpec("linear_bd", p, beta=beta, mu=mu)
        Q = liouville.to_probability_generator(liouville.build_liouvillian(model), model)
        traj = evolve.evolve_distribution(Q, psi, evolve.TimeGrid(np.array([0.0, T]) if T > 0 else np.array([0.0])))
        exact = evolve.factorial_moments(traj, range(4))
        for r in range(4):
            cf = closed_form.linear_factorial_moment(p, n0, r, beta, mu, T)
            assert abs(cf - exact[r][-1]) <= 1e-8
        assert abs(exact[1][-1] - closed_form.linear_mean(p, beta, mu, n0, T)) <= 1e-10
    for seed, (p, beta, mu, n0, T) in enumerate([(2, 1.0, 1.0, 0, 5.0), (6, 0.4, 1.3, 5, 0.8), (3, 2.0, 0.5, 1, 1.5)]):
        model = ModelSpec("linear_bd", p, beta=beta, mu=mu)
        est = ssa.estimate_moments(model, n0, T, [1, 2], 100_000, seed)
        for r in (1, 2):
            exact = closed_form.linear_factorial_moment(p, n0, r, beta, mu, T)
            assert abs(est[r].mean - exact) <= 3 * est[r].std_error
    assert time.perf_counter() - start < 120


# --- 4 ---------------------------------------------------------------------

@pytest.mark.criterion(4)
def test_quadratic_spectral_sum():
    start = time.perf_counter()
    rng = np.random.default_rng(4)
    for _ in range(100):
        p = int(rng.integers(1, 11))
        beta, mu = float(rng.uniform(0.1, 1.0)), float(rng.uniform(0.5, 2.0))
        n0, T = int(rng.integers(0, p + 1)), float(rng.uniform(0, 3))
        system = diagram.build_bd_tridiagonal(p, beta, mu)
        spec = diagram.spectrum(system) if n0 else None
        psi = np.zeros(p + 1)
        psi[n0] = 1
        dist = evolve.expm_action(bd_generator(*quadratic_rates(p, beta, mu)), psi, T)
        for r in range(4):
            got = diagram.moment_by_eigendecomposition(system, n0, r, T, spec)
            assert abs(got - dist @ [math.perm(m, r) for m in range(p + 1)]) <= 1e-8
        assert abs(diagram.moment_by_eigendecomposition(system, n0, 0, T, spec) - 1) <= 1e-12
    partial, closed = diagram.lapp_geometric_check(2, 3, 1.0, 1.0, 20.0, 60)
    assert abs(partial - 1 / 24) <= 1e-12 and closed == 1 / 24
    for _ in range(100):
        p = int(rng.integers(1, 11))
        beta, mu = float(rng.uniform(0.1, 1.0)), float(rng.uniform(0.5, 2.0))
        s = beta * p * (p - 1) + float(rng.uniform(0.5, 50))
        for m in range(p + 1):
            partial, closed = diagram.lapp_geometric_check(m, p, beta, mu, s, 60)
            assert abs(partial - closed) <= 1e-12
            assert closed == 1 / (s + mu * m + beta * m * (p - m))
    assert time.perf_counter() - start < 60


# --- 5 ---------------------------------------------------------------------

LATTICES = [(1, 12, "path"), (1, 12, "ring"), (2, 7, "ring"), (3, 6, "path"), (7, 4, "ring"), (2, 5, "path")]


@pytest.mark.criterion(5)
def test_diffusion():
    start = time.perf_counter()
    rng = np.random.default_rng(5)
    for p, L, geometry in LATTICES:
        assert (p + 1) ** L <= 4096
        lat = Lattice(L, geometry)
        nu = float(rng.uniform(0.3, 1.5))
        occ = [int(x) for x in rng.integers(0, p + 1, L)]
        if sum(occ) == 0:
            occ[0] = p
        model = ModelSpec("diffusion", p, nu=nu, lattice=lat)
        Q = liouville.to_probability_generator(liouville.build_liouvillian(model), model)
        grid = evolve.TimeGrid.uniform(1.0, 5)
        traj = evolve.evolve_distribution(Q, evolve.lattice_distribution(p, occ), grid)
        means = evolve.lattice_site_factorial_moments(traj, p, L, 1)
        o = np.array(occ, dtype=float)
        m_ode, _ = evolve.moment_ode_diffusion(lat, p, nu, o, np.outer(o, o), grid)
        assert np.max(np.abs(m_ode - means)) <= 1e-8
        assert np.max(np.abs(means.sum(axis=1) - sum(occ))) <= 1e-12
        sector = diagram.build_sector(lat, p, nu, sum(occ))
        probs = diagram.sector_evolve(sector, occ, grid.points)
        for r in (1, 2):
            full = evolve.lattice_site_factorial_moments(traj, p, L, r)
            assert np.max(np.abs(diagram.sector_site_moments(sector, probs, r) - full)) <= 1e-8
        assert np.max(np.abs(diagram.sector_site_moments(sector, probs, 1).sum(axis=1) - sum(occ))) <= 1e-12
        for s in (0.2, 1.0, 3.7, 10.0, 50.0):
            f = diagram.sector_resolvent(sector, occ, s)
            assert abs(f.sum() - 1 / s) <= 1e-10
    paths = ssa.sample_paths(ModelSpec("diffusion", 2, nu=1.0, lattice=Lattice(5, "ring")), [2, 0, 1, 0, 2],
                             np.linspace(0, 3, 4), 0, 500)
    assert np.all(paths.sum(axis=2) == 5)
    assert time.perf_counter() - start < 120


# --- 6 ---------------------------------------------------------------------

@pytest.mark.criterion(6)
def test_symbolic_suite():
    start = time.perf_counter()
    for p in (1, 2, 3):
        for beta, mu in [(1, 1), (2, Fraction(1, 2)), (Fraction(1, 3), 3)]:
            comm, expected, _ = parasym.linear_commutator_check(p, beta, mu)
            assert comm == expected and parasym.is_central(comm)
            comm, expected = parasym.quadratic_commutator_check(p, beta, mu)
            assert comm == expected and parasym.is_central(comm)
        cs = parasym.coherent_state(p)
        assert all(r.is_zero() for r in parasym.eigen_residuals(cs))
        assert parasym.normalization_residual(cs).is_zero()
        mat, _ = parasym.resolution_identity_check(p)
        assert all(x == 0 for x in mat.ravel())
        for r in range(p + 1):
            assert parasym.final_term_identity(p, r).is_zero()
    v = parasym.doubled(4)
    s2 = parasym.s_polynomial(4, 2, v)
    assert len(s2.terms) == 6 and all(c == 1 and len(m) == 2 for m, c in s2.terms.items())
    assert time.perf_counter() - start < 60


# --- 7 ---------------------------------------------------------------------

def random_model(rng):
    kind = ["linear_bd", "quadratic_bd", "diffusion"][int(rng.integers(0, 3))]
    if kind == "diffusion":
        p, L = int(rng.integers(1, 4)), int(rng.integers(1, 6))
        lat = Lattice(L, ["path", "ring"][int(rng.integers(0, 2))])
        return ModelSpec(kind, p, nu=float(rng.uniform(0, 2)), lattice=lat)
    return ModelSpec(kind, int(rng.integers(1, 11)), beta=float(rng.uniform(0, 3)), mu=float(rng.uniform(0, 3)))


@pytest.mark.criterion(7)
def test_probability_structure():
    rng = np.random.default_rng(7)
    for _ in range(100):
        model = random_model(rng)
        Q = liouville.to_probability_generator(liouville.build_liouvillian(model), model)
        Qd = Q.toarray() if sp.issparse(Q) else np.asarray(Q, dtype=float)
        assert np.max(np.abs(Qd.sum(axis=0))) <= 1e-12
        off = Qd - np.diag(np.diag(Qd))
        assert off.min() >= 0
        psi = rng.dirichlet(np.ones(model.dim))
        traj = evolve.evolve_distribution(Q, psi, evolve.TimeGrid.uniform(float(rng.uniform(0.1, 5)), 8))
        assert np.max(np.abs(traj.states.sum(axis=1) - 1)) <= 1e-10
        assert traj.states.min() >= -1e-12
    for p in range(1, 7):
        for rates in (linear_rates, quadratic_rates):
            assert np.max(np.abs(bd_generator(*rates(p, 1.3, 0.7)).sum(axis=0))) <= 1e-12
    Q, _ = hop_generator(2, 1.0, 3, True)
    assert np.max(np.abs(Q.sum(axis=0))) <= 1e-12


# --- 8 ---------------------------------------------------------------------

CONFIGS = {
    "linear": {"model": {"kind": "linear_bd", "p": 4, "beta": 0.7, "mu": 1.1}, "initial": {"n": 2},
               "run": {"t_final": 3.0, "moments": [0, 1, 2, 3]}},
    "quadratic_ssa": {"model": {"kind": "quadratic_bd", "p": 5, "beta": 0.4, "mu": 1.0}, "initial": {"n": 3},
                      "run": {"t_final": 2.0, "n_outputs": 20, "method": "ssa", "replicas": 5000, "seed": 99}},
    "diffusion_ssa": {"model": {"kind": "diffusion", "p": 2, "nu": 0.6, "lattice": {"sites": 4, "geometry": "ring"}},
                      "initial": {"occupancy": [2, 1, 0, 0]},
                      "run": {"t_final": 1.0, "n_outputs": 10, "method": "ssa", "replicas": 2000, "seed": 7}},
    "diagram": {"model": {"kind": "quadratic_bd", "p": 6, "beta": 0.5, "mu": 1.2}, "initial": {"n": 4},
                "run": {"t_final": 2.0, "method": "diagram"}},
}


@pytest.mark.criterion(8)
@pytest.mark.parametrize("name", sorted(CONFIGS))
def test_deterministic_output(tmp_path, name):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(CONFIGS[name]))
    outputs = []
    for k in range(2):
        out = tmp_path / f"out{k}.csv"
        subprocess.run([sys.executable, "-m", "parafock.cli", "run", "--config", str(cfg), "--out", str(out)], check=True)
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1] and len(outputs[0]) > 0
