"""Exact time evolution of probability vectors and moment time series."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import ParameterError, ValidationError
from .fock import falling_factorial, validate_distribution
from .lattice import all_states, state_index

UNIFORMIZATION_TOL = 1e-13
# Poisson mean per uniformization step; keeps exp(-x) far from underflow.
MAX_STEP_POISSON_MEAN = 20.0


@dataclass(frozen=True)
class TimeGrid:
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or len(pts) == 0:
            raise ParameterError("time grid must be a non-empty 1-d array")
        if pts[0] != 0.0:
            raise ParameterError("time grid must start at 0")
        if np.any(np.diff(pts) <= 0):
            raise ParameterError("time grid must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, t_final, n_outputs):
        if t_final < 0:
            raise ParameterError("t_final must be >= 0")
        if n_outputs < 1:
            raise ParameterError("n_outputs must be >= 1")
        if t_final == 0 and n_outputs > 1:
            raise ParameterError("t_final = 0 admits a single output point")
        if n_outputs == 1:
            return cls(np.array([0.0]))
        return cls(np.linspace(0.0, t_final, n_outputs))

    @property
    def t_final(self):
        return float(self.points[-1])

    def __len__(self):
        return len(self.points)


@dataclass
class DistributionTrajectory:
    grid: TimeGrid
    states: np.ndarray
    moments: dict = field(default_factory=dict)


def _uniformization_rate(Q):
    diag = Q.diagonal() if sp.issparse(Q) else np.diag(Q)
    return float(np.max(np.abs(diag))) if len(diag) else 0.0


def expm_action(Q, v, t, tol=UNIFORMIZATION_TOL):
    """exp(t Q) v for a Markov generator Q by uniformization.

    Q + Lambda I is entrywise non-negative for Lambda = max |Q_ii|, so every
    term of the Poisson-weighted series is non-negative.
    """
    v = np.asarray(v, dtype=float)
    lam = _uniformization_rate(Q)
    if t == 0 or lam == 0:
        return v.copy()
    steps = max(1, math.ceil(lam * t / MAX_STEP_POISSON_MEAN))
    dt = t / steps
    for _ in range(steps):
        v = _poisson_series(Q, v, lam, dt, tol)
    return v


def _poisson_series(Q, v, lam, dt, tol):
    x = lam * dt
    weight = math.exp(-x)
    term = v
    acc = weight * term
    cum = weight
    k = 0
    k_max = int(x + 12.0 * math.sqrt(x) + 60)
    while 1.0 - cum > tol and k < k_max:
        k += 1
        term = term + (Q @ term) / lam
        weight *= x / k
        acc = acc + weight * term
        cum += weight
    # give the truncated Poisson tail to the last term so mass is conserved exactly
    return acc + (1.0 - cum) * term


def evolve_distribution(Q, psi0, grid):
    """states[k] = exp(t_k Q) psi0 on every grid point."""
    psi0 = validate_distribution(np.asarray(psi0, dtype=float))
    if Q.shape != (len(psi0), len(psi0)):
        raise ValidationError(f"generator shape {Q.shape} does not match distribution length {len(psi0)}")
    states = np.empty((len(grid), len(psi0)))
    v = psi0.copy()
    t_prev = 0.0
    for k, t in enumerate(grid.points):
        v = expm_action(Q, v, t - t_prev)
        states[k] = v
        t_prev = t
    return DistributionTrajectory(grid=grid, states=states)


def factorial_moment_weights(p, r):
    return np.array([falling_factorial(n, r) for n in range(p + 1)], dtype=float)


def factorial_moments(traj, r_list):
    """Single-site <(n)_r>(t_k) for each r."""
    p = traj.states.shape[1] - 1
    out = {}
    for r in r_list:
        if r < 0:
            raise ParameterError("moment order must be >= 0")
        out[r] = traj.states @ factorial_moment_weights(p, r)
    traj.moments.update(out)
    return out


def lattice_moments(traj, p, sites):
    """Per-site means <n_k> and pair correlations <n_j n_k> over time."""
    occ = all_states(p, sites).astype(float)
    means = traj.states @ occ
    second = np.einsum("ts,sj,sk->tjk", traj.states, occ, occ)
    return means, second


def lattice_site_factorial_moments(traj, p, sites, r):
    """<(n_k)_r>(t) for every site k, shape (times, sites)."""
    occ = all_states(p, sites)
    w = np.vectorize(lambda n: falling_factorial(int(n), r))(occ).astype(float)
    return traj.states @ w


def lattice_distribution(p, occupancy):
    """Point mass on an occupation vector, in lattice index order."""
    occupancy = list(occupancy)
    if any(n < 0 or n > p for n in occupancy):
        raise ValidationError(f"occupancy {occupancy} outside 0..{p}")
    psi = np.zeros((p + 1) ** len(occupancy))
    psi[state_index(occupancy, p)] = 1.0
    return psi


def diffusion_moment_matrix(lattice, p, nu, form="corrected"):
    """Linear system x' = M x for x = [<n_k>, <n_j n_k> (row-major)].

    The first-moment block is the discrete Laplacian nu p (adjacency - degree).
    The second-moment block uses the same transport terms plus a correction
    that depends on whether j = k, j ~ k (neighbours) or neither.

    ``form="printed"`` uses the published correction terms
    (j=k: -2 nu sum_i <n_i n_k>; j~k: -2 nu <n_j n_k> - nu p <n_j + n_k>);
    ``form="corrected"`` uses the ones obtained from the exact generator
    (j=k: nu sum_i [p <n_i + n_k> - 2 <n_i n_k>]; j~k: +2 nu <n_j n_k> - nu p <n_j + n_k>).
    """
    if form not in ("corrected", "printed"):
        raise ParameterError(f"unknown moment equation form {form!r}")
    L = lattice.sites
    lap = lattice.laplacian()
    nbr = [lattice.neighbours(k) for k in range(L)]
    adjacent = lap > 0
    size = L + L * L
    M = np.zeros((size, size))

    def s(j, k):
        return L + j * L + k

    M[:L, :L] = nu * p * lap
    for j in range(L):
        for k in range(L):
            row = s(j, k)
            # nu p sum_{i(j)} <(n_i - n_j) n_k> + nu p sum_{i(k)} <n_j (n_i - n_k)>
            for i in nbr[j]:
                M[row, s(i, k)] += nu * p
                M[row, s(j, k)] -= nu * p
            for i in nbr[k]:
                M[row, s(j, i)] += nu * p
                M[row, s(j, k)] -= nu * p
            if j == k:
                for i in nbr[k]:
                    M[row, s(i, k)] -= 2 * nu
                    if form == "corrected":
                        M[row, i] += nu * p
                        M[row, k] += nu * p
            elif adjacent[j, k]:
                M[row, s(j, k)] += (2 * nu) if form == "corrected" else (-2 * nu)
                M[row, j] -= nu * p
                M[row, k] -= nu * p
    return M


def _rk4(M, x, t_span, h_max):
    if t_span == 0:
        return x
    steps = max(1, math.ceil(t_span / h_max))
    h = t_span / steps
    for _ in range(steps):
        k1 = M @ x
        k2 = M @ (x + 0.5 * h * k1)
        k3 = M @ (x + 0.5 * h * k2)
        k4 = M @ (x + h * k3)
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return x


def moment_ode_diffusion(lattice, p, nu, means0, second0, grid, form="corrected"):
    """Integrate the closed first/second moment equations with fixed-step RK4.

    Step size is at most 1e-3 / (nu p). Returns ``(means, second)`` with
    shapes (times, L) and (times, L, L).
    """
    L = lattice.sites
    means0 = np.asarray(means0, dtype=float)
    second0 = np.asarray(second0, dtype=float)
    if means0.shape != (L,) or second0.shape != (L, L):
        raise ParameterError("initial moments do not match the lattice size")
    M = diffusion_moment_matrix(lattice, p, nu, form)
    h_max = 1e-3 / (nu * p) if nu > 0 else np.inf
    x = np.concatenate([means0, second0.ravel()])
    out = np.empty((len(grid), x.size))
    t_prev = 0.0
    for idx, t in enumerate(grid.points):
        x = _rk4(M, x, t - t_prev, h_max) if nu > 0 else x
        out[idx] = x
        t_prev = t
    return out[:, :L], out[:, L:].reshape(len(grid), L, L)
