"""Liouvillians of the three partial-exclusion models in Fock space 2.

All operators here are built from the variant-2 ladder matrices
(``a_dag|n> = (n+1)|n+1>``, ``a|n> = (p-n+1)|n-1>``). The probability-coordinate
generator is recovered by the diagonal similarity ``Q = W^-1 L W`` with
``W = diag(1/<n|n>)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .errors import CapacityError, ModelConstructionError, ParameterError
from .fock import FockSpaceSpec, falling_factorial, ladder_matrices, state_norms
from .lattice import Lattice, all_states

DENSE_MAX_DIM = 4096
DIFFUSION_MAX_DIM = 65536
CONSERVATION_TOL = 1e-9

MODEL_KINDS = ("linear_bd", "quadratic_bd", "diffusion")


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    p: int
    beta: float = 0.0
    mu: float = 0.0
    nu: float = 0.0
    variant: int = 1
    lattice: Lattice = field(default_factory=lambda: Lattice(1))

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ParameterError(f"unknown model kind {self.kind!r}")
        if self.p < 1:
            raise ParameterError(f"capacity p must be >= 1, got {self.p}")
        for name in ("beta", "mu", "nu"):
            if getattr(self, name) < 0:
                raise ParameterError(f"rate {name} must be >= 0")
        if self.variant not in (1, 2):
            raise ParameterError(f"quadratic variant must be 1 or 2, got {self.variant}")

    @property
    def sites(self):
        return self.lattice.sites if self.kind == "diffusion" else 1

    @property
    def dim(self):
        return (self.p + 1) ** self.sites

    @property
    def fock(self):
        return FockSpaceSpec(2, self.p)


def _ops(p, exact):
    ops = ladder_matrices(FockSpaceSpec(2, p), exact=exact)
    d = p + 1
    eye = np.eye(d, dtype=int).astype(object) if exact else np.eye(d)
    return ops.a, ops.a_dag, ops.number_op, eye


def _exact_rate(x):
    return x if isinstance(x, Fraction) else Fraction(x)


def build_linear_bd(p, beta, mu, exact=False):
    """beta (a_dag - (p - N)) + mu (a - N)."""
    a, a_dag, N, eye = _ops(p, exact)
    if exact:
        beta, mu = _exact_rate(beta), _exact_rate(mu)
    return beta * (a_dag - (p * eye - N)) + mu * (a - N)


def build_quadratic_bd(p, beta, mu, variant=1, exact=False):
    """Quadratic-birth Liouvillian.

    variant 1: -beta N (p - N) - mu N + beta a_dag N + mu a
    variant 2: -beta a_dag a   - mu N + beta a_dag N + mu a

    The two differ by ``beta * N``; only variant 1 conserves probability.
    """
    if variant not in (1, 2):
        raise ParameterError(f"quadratic variant must be 1 or 2, got {variant}")
    a, a_dag, N, eye = _ops(p, exact)
    if exact:
        beta, mu = _exact_rate(beta), _exact_rate(mu)
    common = -mu * N + beta * (a_dag @ N) + mu * a
    if variant == 1:
        return -beta * (N @ (p * eye - N)) + common
    return -beta * (a_dag @ a) + common


def _site_operator(op, k, sites):
    out = sp.identity(1, format="csr")
    d = op.shape[0]
    for s in range(sites):
        out = sp.kron(out, sp.csr_matrix(op) if s == k else sp.identity(d), format="csr")
    return out


def build_diffusion(p, nu, lattice, max_dim=DIFFUSION_MAX_DIM, printed_sign=False):
    """nu * sum_{(i,j)} (a_i a_j_dag - N_i (p - N_j)) over ordered neighbour pairs.

    ``printed_sign=True`` returns the negated operator, the form whose
    off-diagonal probability rates come out negative; kept for the
    verification report only.
    """
    dim = (p + 1) ** lattice.sites
    if dim > max_dim:
        raise CapacityError(f"diffusion state space {dim} exceeds cap {max_dim}")
    a, a_dag, _, _ = _ops(p, exact=False)
    states = all_states(p, lattice.sites)
    diag = np.zeros(dim)
    hop = sp.csr_matrix((dim, dim))
    for i, j in lattice.ordered_pairs():
        diag += states[:, i] * (p - states[:, j])
        hop = hop + _site_operator(a, i, lattice.sites) @ _site_operator(a_dag, j, lattice.sites)
    L = nu * (hop - sp.diags(diag))
    if printed_sign:
        L = -L
    L = sp.csr_matrix(L)
    return L.toarray() if dim <= DENSE_MAX_DIM else L


def build_liouvillian(model, exact=False):
    if model.kind == "linear_bd":
        return build_linear_bd(model.p, model.beta, model.mu, exact=exact)
    if model.kind == "quadratic_bd":
        return build_quadratic_bd(model.p, model.beta, model.mu, model.variant, exact=exact)
    return build_diffusion(model.p, model.nu, model.lattice)


def site_norms(p, sites=1, exact=False):
    """<n|n> for every (lattice) basis state, product over sites."""
    one = state_norms(FockSpaceSpec(2, p), exact=exact)
    out = one
    for _ in range(sites - 1):
        out = np.kron(out, one) if not exact else np.array(
            [x * y for x in out for y in one], dtype=object
        )
    return out


def to_probability_generator(L, model, check=True, tol=CONSERVATION_TOL):
    """Q = W^-1 L W with W = diag(1/<n|n>); columns of Q must sum to zero."""
    exact = isinstance(L, np.ndarray) and L.dtype == object
    norms = site_norms(model.p, model.sites, exact=exact)
    if sp.issparse(L):
        Q = sp.csr_matrix(sp.diags(norms) @ L @ sp.diags(1.0 / norms))
        colsum = np.asarray(Q.sum(axis=0)).ravel()
    else:
        if exact:
            Q = np.array(
                [[L[i, j] * norms[i] / norms[j] for j in range(L.shape[1])] for i in range(L.shape[0])],
                dtype=object,
            )
            colsum = Q.sum(axis=0)
        else:
            Q = L * norms[:, None] / norms[None, :]
            colsum = Q.sum(axis=0)
    if check:
        worst = max(abs(c) for c in colsum) if len(colsum) else 0
        if worst > (0 if exact else tol):
            raise ModelConstructionError(
                f"generator columns do not sum to zero (max |column sum| = {float(worst):.3e})"
            )
    return Q


def moment_rhs_matrix(L, r, p):
    """[a^r, L] in Fock-2 coordinates, so that d<(n)_r>/dt = <s|[a^r, L]|psi>."""
    if r < 1:
        raise ParameterError("moment order r must be >= 1")
    a = ladder_matrices(FockSpaceSpec(2, p), exact=isinstance(L, np.ndarray) and L.dtype == object).a
    ar = np.linalg.matrix_power(a, r) if a.dtype != object else _object_power(a, r)
    return ar @ L - L @ ar


def _object_power(m, r):
    out = np.eye(m.shape[0], dtype=int).astype(object)
    for _ in range(r):
        out = out @ m
    return out


def birth_death_rates(model):
    """Per-state (birth, death) rate arrays of a single-site model."""
    n = np.arange(model.p + 1, dtype=float)
    if model.kind == "linear_bd":
        birth = model.beta * (model.p - n)
    elif model.kind == "quadratic_bd":
        birth = model.beta * n * (model.p - n)
    else:
        raise ParameterError("birth_death_rates applies to single-site models only")
    return birth, model.mu * n


def stated_first_moment_rhs(model, probs):
    """Right-hand side of the published first-moment ODEs.

    linear:    -gamma <n> + beta p
    quadratic: -<n> (mu - beta (p-1)) - beta <n^2>

    For the quadratic model the second-moment symbol is ambiguous; both
    readings are returned as ``(factorial, raw)`` where ``factorial`` uses
    <(n)_2> and ``raw`` uses <n^2>.
    """
    probs = np.asarray(probs, dtype=float)
    n = np.arange(len(probs))
    mean = float(probs @ n)
    if model.kind == "linear_bd":
        return -(model.beta + model.mu) * mean + model.beta * model.p
    if model.kind != "quadratic_bd":
        raise ParameterError("stated moment equations exist for the birth-death models only")
    fact2 = float(probs @ np.array([falling_factorial(k, 2) for k in n]))
    raw2 = float(probs @ n**2)
    lin = -mean * (model.mu - model.beta * (model.p - 1))
    return lin - model.beta * fact2, lin - model.beta * raw2

