"""Single-site parafermionic Fock spaces and the Green representation.

A site holds at most ``p`` particles. States ``|n>`` (n = 0..p) are the unit
columns of a ``(p+1)``-dimensional space and the ladder operators act as

    a_dag |n> = p_n |n+1>,     a |n> = q_n |n-1>,

with the five normalisation choices of :data:`VARIANT_ROWS`. Every choice obeys
``p_{n-1} q_n = n (p - n + 1)``. The state norms ``<n|n>`` are carried by the
dual vectors only (``<n| -> <n|n> e_n^T``), so ladder matrices stay integer
valued (up to square roots in variant 3) and ``psi_n = <n|psi>`` holds by
construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy

from .errors import CapacityError, ConsistencyError, ParameterError, ValidationError

GREEN_MAX_P = 12
NORMALIZATION_TOL = 1e-9
BRACKET_TOL = 1e-12


def falling_factorial(n, r):
    """(n)_r = n (n-1) ... (n-r+1); zero when 0 <= n < r."""
    out = 1
    for k in range(r):
        out *= n - k
    return out


# (p_n^2, q_n^2) as functions of (n, p). Squares are integers for every variant,
# which is what the exact checks for variant 3 rely on.
_SQUARED_COEFFS = {
    1: (lambda n, p: (p - n) ** 2, lambda n, p: n**2),
    2: (lambda n, p: (n + 1) ** 2, lambda n, p: (p - n + 1) ** 2),
    3: (lambda n, p: (n + 1) * (p - n), lambda n, p: n * (p - n + 1)),
    4: (lambda n, p: 1, lambda n, p: (n * (p - n + 1)) ** 2),
    5: (lambda n, p: ((n + 1) * (p - n)) ** 2, lambda n, p: 1),
}

_COEFFS = {
    1: (lambda n, p: p - n, lambda n, p: n),
    2: (lambda n, p: n + 1, lambda n, p: p - n + 1),
    4: (lambda n, p: 1, lambda n, p: n * (p - n + 1)),
    5: (lambda n, p: (n + 1) * (p - n), lambda n, p: 1),
}


@dataclass(frozen=True)
class FockSpaceSpec:
    variant: int
    p: int

    def __post_init__(self):
        if self.variant not in (1, 2, 3, 4, 5):
            raise ParameterError(f"Fock space variant must be in 1..5, got {self.variant!r}")
        if not isinstance(self.p, (int, np.integer)) or self.p < 1:
            raise ParameterError(f"capacity p must be a positive integer, got {self.p!r}")

    @property
    def dim(self):
        return self.p + 1

    def creation_coeff(self, n, exact=False):
        """p_n, the amplitude of a_dag|n> on |n+1>."""
        if self.variant == 3:
            sq = _SQUARED_COEFFS[3][0](n, self.p)
            return sympy.sqrt(sq) if exact else math.sqrt(sq)
        return _COEFFS[self.variant][0](n, self.p)

    def annihilation_coeff(self, n, exact=False):
        """q_n, the amplitude of a|n> on |n-1>; q_0 is irrelevant (a|0> = 0)."""
        if self.variant == 3:
            sq = _SQUARED_COEFFS[3][1](n, self.p)
            return sympy.sqrt(sq) if exact else math.sqrt(sq)
        return _COEFFS[self.variant][1](n, self.p)

    def creation_coeff_sq(self, n):
        return _SQUARED_COEFFS[self.variant][0](n, self.p)

    def annihilation_coeff_sq(self, n):
        return _SQUARED_COEFFS[self.variant][1](n, self.p)


@dataclass
class LadderOperators:
    a: np.ndarray
    a_dag: np.ndarray
    number_op: np.ndarray


def ladder_matrices(spec, exact=False):
    """Matrices of a, a_dag and N for one site.

    With ``exact=True`` the arrays have ``dtype=object`` and hold Python ints
    (or sympy square roots for variant 3), so identities can be checked
    without tolerances.
    """
    if not isinstance(spec, FockSpaceSpec):
        raise ParameterError("ladder_matrices expects a FockSpaceSpec")
    d = spec.dim
    dtype = object if exact else float
    zero = 0 if exact else 0.0
    a = np.full((d, d), zero, dtype=dtype)
    a_dag = np.full((d, d), zero, dtype=dtype)
    number_op = np.full((d, d), zero, dtype=dtype)
    for n in range(d):
        number_op[n, n] = n if exact else float(n)
        if n < spec.p:
            a_dag[n + 1, n] = spec.creation_coeff(n, exact)
        if n > 0:
            a[n - 1, n] = spec.annihilation_coeff(n, exact)
    return LadderOperators(a=a, a_dag=a_dag, number_op=number_op)


def commutator(x, y):
    return x @ y - y @ x


def is_exact_zero(m):
    """True when every entry of an exact (object) array vanishes identically."""
    for v in np.asarray(m, dtype=object).ravel():
        if isinstance(v, sympy.Basic):
            if sympy.simplify(v) != 0:
                return False
        elif v != 0:
            return False
    return True


@dataclass
class GreenRep:
    p: int
    bin_ops: list
    a_total: np.ndarray

    @property
    def dim(self):
        return 2**self.p

    def number_op(self):
        """sum_i a_i^dag a_i, diagonal with the count of occupied bins."""
        return sum(b.T @ b for b in self.bin_ops)

    def parity(self, i):
        """(-1)^{N_i} for bin i."""
        b = self.bin_ops[i]
        return np.eye(self.dim, dtype=np.int64) - 2 * (b.T @ b)


def green_representation(p, max_p=GREEN_MAX_P):
    """p commuting fermionic bins on a 2^p space; bin 0 is the most significant factor."""
    if p < 1:
        raise ParameterError(f"p must be >= 1, got {p}")
    if p > max_p:
        raise CapacityError(f"Green representation with p={p} exceeds cap p <= {max_p}")
    lower = np.array([[0, 1], [0, 0]], dtype=np.int64)
    eye2 = np.eye(2, dtype=np.int64)
    bins = []
    for i in range(p):
        op = np.ones((1, 1), dtype=np.int64)
        for k in range(p):
            op = np.kron(op, lower if k == i else eye2)
        bins.append(op)
    return GreenRep(p=p, bin_ops=bins, a_total=sum(bins))


def table_state_norm(spec, n):
    """<n|n> exactly as listed for each variant (Fraction)."""
    p = spec.p
    c = math.comb(p, n)
    return {
        1: Fraction(1, c),
        2: Fraction(c),
        3: Fraction(1),
        4: Fraction(math.factorial(n) ** 2 * c),
        5: Fraction(1, math.factorial(n) ** 2 * c),
    }[spec.variant]


def green_fock_state(spec, n, green=None):
    """|n> = (a_dag)^n |0> / prod_{i<n} p_i realised in the Green representation.

    Returned unnormalised by the prefactor (integer vector) together with the
    squared prefactor denominator, so callers can stay exact.
    """
    green = green or green_representation(spec.p)
    vec = np.zeros(green.dim, dtype=np.int64)
    vec[0] = 1
    for _ in range(n):
        vec = green.a_total.T @ vec
    denom_sq = Fraction(1)
    for i in range(n):
        denom_sq *= spec.creation_coeff_sq(i)
    return vec, denom_sq


def green_state_norm(spec, n, green=None):
    """<0| a^n (a_dag)^n |0> / (prod_{i<n} p_i)^2, evaluated in the Green representation."""
    if not 0 <= n <= spec.p:
        raise ParameterError(f"occupancy n={n} outside 0..{spec.p}")
    green = green or green_representation(spec.p)
    vec, denom_sq = green_fock_state(spec, n, green)
    for _ in range(n):
        vec = green.a_total @ vec
    return Fraction(int(vec[0])) / denom_sq


def state_norms(spec, exact=False):
    norms = [table_state_norm(spec, n) for n in range(spec.dim)]
    if exact:
        return np.array(norms, dtype=object)
    return np.array([float(x) for x in norms])


def validate_distribution(probs, tol=NORMALIZATION_TOL):
    probs = np.asarray(probs)
    if probs.ndim != 1:
        raise ValidationError("a probability distribution must be a 1-d vector")
    if probs.dtype != object and not np.all(np.isfinite(probs)):
        raise ValidationError("probabilities must be finite")
    if np.any(probs < -tol):
        raise ValidationError("probabilities must be non-negative")
    total = sum(probs) if probs.dtype == object else float(np.sum(probs))
    if abs(total - 1) > tol:
        raise ValidationError(f"probabilities sum to {float(total)!r}, not 1")
    return probs


def embed_distribution(spec, probs):
    """psi_n -> psi_n / <n|n> (Fock coordinates of |psi>)."""
    probs = validate_distribution(probs)
    if len(probs) != spec.dim:
        raise ValidationError(f"expected {spec.dim} probabilities, got {len(probs)}")
    return probs / state_norms(spec, exact=probs.dtype == object)


def extract_probabilities(spec, state):
    state = np.asarray(state)
    return state * state_norms(spec, exact=state.dtype == object)


def dual_vector(spec, n, exact=False):
    """Row representing the bra <n|."""
    row = np.zeros(spec.dim, dtype=object if exact else float)
    row[n] = state_norms(spec, exact)[n]
    return row


def s_bra(spec, exact=False):
    """Row representing <s| = sum_n <n|."""
    return state_norms(spec, exact)


def table_moment_weight(spec, n, r):
    """Weight of psi_n in <s|a^r|psi> for each variant.

    The listed formulas for variants 1 and 4 omit that a^r|n> = 0 for n < r;
    the weight is zero there.
    """
    if n < r:
        return 0.0
    p = spec.p
    ff_n = falling_factorial(n, r)
    ff_c = falling_factorial(p - n + r, r)
    return {
        1: float(ff_c),
        2: float(ff_n),
        3: math.sqrt(ff_n * ff_c),
        4: 1.0,
        5: float(ff_n * ff_c),
    }[spec.variant]


def factorial_moment_bracket(spec, r, probs, tol=BRACKET_TOL):
    """<s|a^r|psi> by matrix algebra, cross-checked against the closed column formula."""
    if r < 0:
        raise ParameterError("moment order r must be >= 0")
    probs = np.asarray(probs, dtype=float)
    coords = embed_distribution(spec, probs)
    ops = ladder_matrices(spec)
    vec = coords
    for _ in range(r):
        vec = ops.a @ vec
    value = float(s_bra(spec) @ vec)
    formula = sum(probs[n] * table_moment_weight(spec, n, r) for n in range(spec.dim))
    if abs(value - formula) > tol * max(1.0, abs(formula)):
        raise ConsistencyError(
            f"variant {spec.variant}, r={r}: matrix bracket {value!r} != formula {formula!r}"
        )
    return value
