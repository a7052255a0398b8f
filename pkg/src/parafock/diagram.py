"""Laplace-domain diagram resummation for the quadratic and lattice models.

Quadratic birth-death
---------------------
Summing neutral links on a segment with ``m`` open propagators gives a
geometric series whose closed form is ``1 / (s + mu_m + beta_m)``. Paths of the
propagator count then obey the tridiagonal recurrence

    (s + mu_m + beta_m) f_m = delta_{m,n} + beta_{m-1} f_{m-1} + mu_{m+1} f_{m+1},

i.e. ``(sI - B) f = e_n``, so moments are inverse Laplace transforms of
``sum_m (m)_r f_m`` and reduce to a spectral sum over the eigenvalues of ``B``.

Lattice diffusion
-----------------
Particle number is conserved, so the same construction runs on the sector of
occupation vectors with fixed total. The sector generator is built from the
hop rates ``nu n_i (p - n_j)`` directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import CapacityError, ConsistencyError, DegeneracyError, DomainError, ParameterError
from .evolve import expm_action
from .fock import falling_factorial
from .lattice import sector_states
from .liouville import ModelSpec, build_quadratic_bd, to_probability_generator

SECTOR_MAX_DIM = 200_000
EIGEN_GAP_TOL = 1e-10


def lapp_geometric_check(m, p, beta, mu, s, l_max):
    """Truncated neutral-link series and its closed form for a height-m segment.

    Returns ``(partial_sum, 1 / (s + mu m + beta m (p - m)))``.
    """
    if not 0 <= m <= p:
        raise ParameterError(f"height m={m} outside 0..{p}")
    nu = mu + beta * (p - 1)
    denom = s + m * nu
    link = 2 * beta * math.comb(m, 2)
    if denom <= 0 or link >= denom:
        raise DomainError(f"neutral-link series diverges: s + m nu = {denom} <= {link}")
    ratio = link / denom
    partial = sum(ratio**ell for ell in range(l_max + 1)) / denom
    closed = 1.0 / (s + mu * m + beta * m * (p - m))
    return partial, closed


def lapp_rate_identity(m, p):
    """Coefficients of (mu, beta) on both sides of m nu - 2 beta C(m,2) = mu_m + beta_m.

    Exact integers; the identity holds when the two pairs are equal.
    """
    lhs = (m, m * (p - 1) - 2 * math.comb(m, 2))
    rhs = (m, m * (p - m))
    return lhs, rhs


@dataclass
class TridiagonalSystem:
    B: np.ndarray
    p: int
    beta: float
    mu: float

    def birth(self, m):
        return self.beta * m * (self.p - m)

    def death(self, m):
        return self.mu * m


def build_bd_tridiagonal(p, beta, mu, exact=False, check=True):
    """B with B_mm = -(mu_m + beta_m), B_{m,m-1} = beta_{m-1}, B_{m,m+1} = mu_{m+1}."""
    if beta < 0 or mu < 0:
        raise ParameterError("rates must be non-negative")
    if exact:
        beta, mu = Fraction(beta), Fraction(mu)
    zero = Fraction(0) if exact else 0.0
    B = np.full((p + 1, p + 1), zero, dtype=object if exact else float)
    for m in range(p + 1):
        B[m, m] = -(mu * m + beta * m * (p - m))
        if m > 0:
            B[m, m - 1] = beta * (m - 1) * (p - m + 1)
        if m < p:
            B[m, m + 1] = mu * (m + 1)
    if check:
        model = ModelSpec("quadratic_bd", p, beta=float(beta), mu=float(mu), variant=1)
        Q = to_probability_generator(build_quadratic_bd(p, beta, mu, 1, exact=exact), model)
        same = np.all(Q == B) if exact else np.allclose(Q, B, rtol=0, atol=1e-12 * max(1.0, np.abs(B).max()))
        if not same:
            raise ConsistencyError("tridiagonal B differs from the quadratic Liouvillian generator")
    return TridiagonalSystem(B=B, p=p, beta=beta, mu=mu)


@dataclass
class Spectrum:
    eigenvalues: np.ndarray
    right: np.ndarray  # columns
    left: np.ndarray  # rows, biorthonormal to ``right``


def _check_gaps(lam):
    lam_sorted = np.sort(lam)
    if len(lam_sorted) > 1:
        gap = float(np.min(np.diff(lam_sorted)))
        if gap <= EIGEN_GAP_TOL:
            raise DegeneracyError(f"near-degenerate spectrum, minimum eigenvalue gap {gap:.3e}", gap)


def spectrum(system):
    """Eigen-decomposition of B with the absorbing empty state split off.

    State 0 is absorbing (beta_0 = mu_0 = 0), so B = [[0, u^T], [0, C]]. When all
    couplings inside C are positive, C is symmetrised by a diagonal similarity
    before diagonalisation; otherwise a general eigensolver is used.
    """
    B = np.asarray(system.B, dtype=float)
    p = system.p
    C = B[1:, 1:]
    sub = np.diag(C, -1)
    sup = np.diag(C, 1)
    if len(sub) == 0 or (np.all(sub > 0) and np.all(sup > 0)):
        # d_{m+1}/d_m = sqrt(beta_m / mu_{m+1})
        log_d = np.concatenate([[0.0], np.cumsum(0.5 * (np.log(sub) - np.log(sup)))]) if len(sub) else np.zeros(1)
        d = np.exp(log_d - log_d.max())
        S = C * (1.0 / d)[:, None] * d[None, :]
        S = 0.5 * (S + S.T)
        lam, V = np.linalg.eigh(S)
        y_right = V * d[:, None]
        y_left = V.T / d[None, :]
    else:
        lam, y_right = np.linalg.eig(C)
        if np.max(np.abs(lam.imag)) > 1e-12:
            raise DegeneracyError("complex spectrum in birth-death block", 0.0)
        lam = lam.real
        y_right = y_right.real
        y_left = np.linalg.inv(y_right)
    full = np.concatenate([[0.0], lam])
    _check_gaps(full)
    right = np.zeros((p + 1, p + 1))
    left = np.zeros((p + 1, p + 1))
    right[0, 0] = 1.0
    left[0, :] = 1.0
    for i in range(len(lam)):
        right[1:, i + 1] = y_right[:, i]
        # columns of B sum to zero, so u.y / lambda = -sum(y); avoids dividing by a small lambda
        right[0, i + 1] = -y_right[:, i].sum()
        left[i + 1, 1:] = y_left[i]
    return Spectrum(eigenvalues=full, right=right, left=left)


def moment_by_eigendecomposition(system, n0, r, T, spec=None):
    """sum_i e^{lambda_i T} [sum_m (m)_r R_{m i}] L_{i n0}, with Z(0,0) = 1."""
    p = system.p
    if not 0 <= n0 <= p:
        raise ParameterError(f"initial occupancy {n0} outside 0..{p}")
    if n0 == 0:
        return float(falling_factorial(0, r))
    spec = spec or spectrum(system)
    w = np.array([falling_factorial(m, r) for m in range(p + 1)], dtype=float)
    amplitudes = (w @ spec.right) * spec.left[:, n0]
    return float(np.sum(amplitudes * np.exp(spec.eigenvalues * T)))


def moment_by_adjugate(system, n0, r, T):
    """The spectral sum written with adjugates and eigenvalue-difference products.

    Mathematically identical to :func:`moment_by_eigendecomposition` but poorly
    conditioned; intended as an independent check for small p.
    """
    B = np.asarray(system.B, dtype=float)
    p = system.p
    lam = np.sort(np.linalg.eigvals(B).real)
    _check_gaps(lam)
    w = np.array([falling_factorial(m, r) for m in range(p + 1)], dtype=float)
    total = 0.0
    for i, li in enumerate(lam):
        M = li * np.eye(p + 1) - B
        adj_col = np.empty(p + 1)
        for m in range(p + 1):
            # Adj(M)_{m, n0} = (-1)^{m+n0} det(M without row n0, column m)
            minor = np.delete(np.delete(M, n0, axis=0), m, axis=1)
            adj_col[m] = (-1) ** (m + n0) * (np.linalg.det(minor) if minor.size else 1.0)
        denom = np.prod([li - lj for j, lj in enumerate(lam) if j != i])
        total += (w @ adj_col) / denom * math.exp(li * T)
    return float(total)


def laplace_vector(system, n0, s):
    """f = (sI - B)^{-1} e_{n0}."""
    B = np.asarray(system.B, dtype=float)
    e = np.zeros(system.p + 1)
    e[n0] = 1.0
    return np.linalg.solve(s * np.eye(system.p + 1) - B, e)


def laplace_moment(system, n0, r, s):
    f = laplace_vector(system, n0, s)
    w = np.array([falling_factorial(m, r) for m in range(system.p + 1)], dtype=float)
    return float(w @ f)


def recurrence_residual(system, n0, f, s):
    """Residual of (s + mu_m + beta_m) f_m - delta - beta_{m-1} f_{m-1} - mu_{m+1} f_{m+1}."""
    p = system.p
    res = np.empty(p + 1)
    for m in range(p + 1):
        val = (s + system.death(m) + system.birth(m)) * f[m] - (1.0 if m == n0 else 0.0)
        if m > 0:
            val -= system.birth(m - 1) * f[m - 1]
        if m < p:
            val -= system.death(m + 1) * f[m + 1]
        res[m] = val
    return res


@dataclass
class DiffusionSector:
    lattice: object
    p: int
    nu: float
    total: int
    states: np.ndarray
    codes: np.ndarray
    A: sp.csr_matrix

    @property
    def dim(self):
        return len(self.states)

    def index(self, occupancy):
        code = int(np.asarray(occupancy, dtype=np.int64) @ self._radix())
        k = int(np.searchsorted(self.codes, code))
        if k >= len(self.codes) or self.codes[k] != code:
            raise ParameterError(f"occupancy {list(occupancy)} is not in this sector")
        return k

    def _radix(self):
        L = self.lattice.sites
        return (self.p + 1) ** np.arange(L - 1, -1, -1, dtype=np.int64)

    def link_count(self):
        """pi_n = 1/2 sum_{(i,j)} n_i n_j over ordered neighbour pairs."""
        pi = np.zeros(self.dim)
        for i, j in self.lattice.ordered_pairs():
            pi += self.states[:, i] * self.states[:, j]
        return 0.5 * pi


def build_sector(lattice, p, nu, total, max_dim=SECTOR_MAX_DIM):
    states = sector_states(p, lattice.sites, total)
    D = len(states)
    if D > max_dim:
        raise CapacityError(f"sector dimension {D} exceeds cap {max_dim}")
    radix = (p + 1) ** np.arange(lattice.sites - 1, -1, -1, dtype=np.int64)
    codes = states @ radix
    rows, cols, vals = [], [], []
    out_rate = np.zeros(D)
    for i, j in lattice.ordered_pairs():
        mask = (states[:, i] > 0) & (states[:, j] < p)
        src = np.nonzero(mask)[0]
        rate = nu * states[src, i] * (p - states[src, j])
        dst = np.searchsorted(codes, codes[src] - radix[i] + radix[j])
        rows.append(dst)
        cols.append(src)
        vals.append(rate.astype(float))
        out_rate[src] += rate
    rows.append(np.arange(D))
    cols.append(np.arange(D))
    vals.append(-out_rate)
    A = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(D, D)
    )
    return DiffusionSector(lattice=lattice, p=p, nu=nu, total=total, states=states, codes=codes, A=A)


def sector_resolvent(sector, n0_vector, s):
    """f_n(s) = ((sI - A)^{-1})_{n, n0}."""
    e = np.zeros(sector.dim)
    e[sector.index(n0_vector)] = 1.0
    M = sp.csc_matrix(s * sp.identity(sector.dim) - sector.A)
    return np.atleast_1d(spla.spsolve(M, e))


def sector_recurrence_residual(sector, n0_vector, f, s):
    """Residual of the derived recurrence, evaluated state by state.

        (s + nu sum_{(i,j)} n_i (p - n_j)) f_n
            - nu sum_{(i,j)} (n_i + 1)(p - n_j + 1) f_{n^{+i,-j}} = delta_{n, n0}

    where n^{+i,-j} is n with one particle moved back from j to i.
    """
    p, nu = sector.p, sector.nu
    pairs = sector.lattice.ordered_pairs()
    n0_idx = sector.index(n0_vector)
    res = np.empty(sector.dim)
    lookup = {tuple(st): k for k, st in enumerate(sector.states.tolist())}
    for k, st in enumerate(sector.states.tolist()):
        diag = s + nu * sum(st[i] * (p - st[j]) for i, j in pairs)
        val = diag * f[k] - (1.0 if k == n0_idx else 0.0)
        for i, j in pairs:
            if st[j] == 0 or st[i] == p:
                continue
            prev = list(st)
            prev[i] += 1
            prev[j] -= 1
            val -= nu * (st[i] + 1) * (p - st[j] + 1) * f[lookup[tuple(prev)]]
        res[k] = val
    return res


def printed_recurrence_residual(sector, n0_vector, f, s):
    """Residual of the recurrence in its published form, for the deviation report.

    (s + n mu + pi_n) f_n + nu sum (n_i+1)(p-n_j+1) f_{n^{+i,-j}} = delta, with the
    undefined ``mu`` read as nu p d (d = maximum site degree).
    """
    p, nu = sector.p, sector.nu
    pairs = sector.lattice.ordered_pairs()
    d = max(sector.lattice.degree(k) for k in range(sector.lattice.sites))
    pi = sector.link_count()
    lookup = {tuple(st): k for k, st in enumerate(sector.states.tolist())}
    n0_idx = sector.index(n0_vector)
    res = np.empty(sector.dim)
    for k, st in enumerate(sector.states.tolist()):
        val = (s + sector.total * nu * p * d + pi[k]) * f[k] - (1.0 if k == n0_idx else 0.0)
        for i, j in pairs:
            if st[j] == 0 or st[i] == p:
                continue
            prev = list(st)
            prev[i] += 1
            prev[j] -= 1
            val += nu * (st[i] + 1) * (p - st[j] + 1) * f[lookup[tuple(prev)]]
        res[k] = val
    return res


def sector_site_moments(sector, probs, r):
    """Per-site <(n_k)_r> for a distribution over the sector."""
    w = np.vectorize(lambda n: falling_factorial(int(n), r))(sector.states).astype(float)
    return probs @ w


def sector_evolve(sector, n0_vector, times):
    """Distributions exp(t A) e_{n0} on an increasing list of times starting at 0."""
    v = np.zeros(sector.dim)
    v[sector.index(n0_vector)] = 1.0
    out = np.empty((len(times), sector.dim))
    t_prev = 0.0
    for k, t in enumerate(times):
        v = expm_action(sector.A, v, t - t_prev)
        out[k] = v
        t_prev = t
    return out


def diffusion_sector_resolvent_moment(lattice, p, nu, n0_vector, r, T):
    """Per-site r-th factorial moments at time T, computed on the conserved sector."""
    n0_vector = list(n0_vector)
    if len(n0_vector) != lattice.sites or any(n < 0 or n > p for n in n0_vector):
        raise ParameterError(f"initial occupancy {n0_vector} invalid for p={p}, {lattice.sites} sites")
    sector = build_sector(lattice, p, nu, sum(n0_vector))
    probs = sector_evolve(sector, n0_vector, [0.0, T])[-1] if T > 0 else sector_evolve(sector, n0_vector, [0.0])[-1]
    return sector_site_moments(sector, probs, r)
