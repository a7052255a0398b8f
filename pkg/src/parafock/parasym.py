"""Exact paragrassmann algebra with operator-valued coefficients.

Generators xi_a obey xi_a xi_b = eta_ab xi_b xi_a with eta symmetric, entries
+-1 and eta_aa = -1 (so every generator squares to zero). An element is a map
from canonically ordered monomials (increasing index tuples) to coefficients.
Coefficients are ints, Fractions or object arrays of them; array coefficients
are operators on the Green representation, written to the right of the
monomial.

Each generator may carry a bin label. In a binned signature generators of the
same bin anticommute and generators of different bins commute. When the
signature is ``graded`` a generator also anticommutes with operators odd in
its own bin: moving a monomial left past an operator O replaces O by P O P,
where P is the product of bin parities (-1)^{N_b} over the monomial's
generators. In the ungraded mode generators commute with all operators.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .errors import CapacityError, ParameterError
from .fock import green_representation
from .liouville import build_linear_bd, build_quadratic_bd

COHERENT_MAX_P = 4


@dataclass(eq=False)
class Signature:
    eta: np.ndarray
    bins: tuple | None = None
    labels: tuple | None = None
    graded: bool = False
    p: int | None = None

    def __post_init__(self):
        eta = np.asarray(self.eta, dtype=np.int64)
        n = eta.shape[0]
        if eta.shape != (n, n) or not np.array_equal(eta, eta.T):
            raise ParameterError("eta must be a symmetric square matrix")
        if not np.all(np.diag(eta) == -1) or not np.all(np.abs(eta) == 1):
            raise ParameterError("eta entries must be +-1 with -1 on the diagonal")
        self.eta = eta
        if self.labels is None:
            self.labels = tuple(f"xi{i + 1}" for i in range(n))
        if self.graded and (self.bins is None or self.p is None):
            raise ParameterError("a graded signature needs bin labels and the bin count p")

    @property
    def size(self):
        return self.eta.shape[0]

    def same_as(self, other):
        return self is other or (
            np.array_equal(self.eta, other.eta) and self.bins == other.bins and self.graded == other.graded
        )

    @classmethod
    def parafermi(cls, n):
        """eta_ij = +1 for i != j."""
        return cls(np.ones((n, n), dtype=np.int64) - 2 * np.eye(n, dtype=np.int64))

    @classmethod
    def binned(cls, bins, labels=None, graded=False, p=None):
        bins = tuple(int(b) for b in bins)
        b = np.array(bins)
        eta = np.where(b[:, None] == b[None, :], -1, 1)
        return cls(eta, bins=bins, labels=labels, graded=graded, p=p if p is not None else max(bins) + 1)


@dataclass(frozen=True)
class Variables:
    """Index layout of one starred/unstarred copy of p generators."""

    sig: Signature
    star_offset: int
    plain_offset: int
    p: int

    def star(self, i):
        return generator(self.sig, self.star_offset + i)

    def plain(self, i):
        return generator(self.sig, self.plain_offset + i)

    def star_sum(self):
        return sum_elements([self.star(i) for i in range(self.p)], self.sig)

    def plain_sum(self):
        return sum_elements([self.plain(i) for i in range(self.p)], self.sig)

    def dot(self):
        """x* . x = sum_i x_i* x_i."""
        return sum_elements([self.star(i) * self.plain(i) for i in range(self.p)], self.sig)


def doubled(p, graded=False, name="x"):
    """2p generators: x_i* at index i, x_i at index p + i, both in bin i.

    Starred generators come first so the canonical order is normal order.
    """
    labels = tuple(f"{name}{i + 1}*" for i in range(p)) + tuple(f"{name}{i + 1}" for i in range(p))
    sig = Signature.binned(list(range(p)) * 2, labels=labels, graded=graded, p=p)
    return Variables(sig, 0, p, p)


def two_copies(p):
    """Generators x*, x, y*, y (4p in total); all four of bin i mutually anticommute."""
    labels = tuple(f"{v}{i + 1}{s}" for v, s in (("x", "*"), ("x", ""), ("y", "*"), ("y", "")) for i in range(p))
    sig = Signature.binned(list(range(p)) * 4, labels=labels, p=p)
    return Variables(sig, 0, p, p), Variables(sig, 2 * p, 3 * p, p)


def _is_array(c):
    return isinstance(c, np.ndarray)


def _is_zero(c):
    if _is_array(c):
        return not np.any(c != 0)
    return c == 0


def _coeff_mul(a, b):
    if _is_array(a) and _is_array(b):
        return a @ b
    return a * b


def _canonical(indices, eta):
    """Sort by adjacent swaps; returns (sign, tuple) or (0, None) on a repeat."""
    idx = list(indices)
    sign = 1
    n = len(idx)
    for i in range(n):
        for j in range(n - 1 - i):
            a, b = idx[j], idx[j + 1]
            if a == b:
                return 0, None
            if a > b:
                idx[j], idx[j + 1] = b, a
                sign *= int(eta[a, b])
    for j in range(n - 1):
        if idx[j] == idx[j + 1]:
            return 0, None
    return sign, tuple(idx)


class GrassElement:
    __slots__ = ("sig", "terms")

    def __init__(self, sig, terms=None):
        self.sig = sig
        self.terms = {}
        for mono, c in (terms or {}).items():
            if not _is_zero(c):
                self.terms[tuple(mono)] = c

    def copy(self):
        return GrassElement(self.sig, dict(self.terms))

    def is_zero(self):
        return not self.terms

    def coefficient(self, mono):
        return self.terms.get(tuple(mono), 0)

    def _check(self, other):
        if not self.sig.same_as(other.sig):
            raise ParameterError("elements belong to different signatures")

    def __add__(self, other):
        if not isinstance(other, GrassElement):
            other = scalar(self.sig, other)
        self._check(other)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            out[mono] = out[mono] + c if mono in out else c
        return GrassElement(self.sig, out)

    __radd__ = __add__

    def __neg__(self):
        return GrassElement(self.sig, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, GrassElement):
            return multiply(self, other)
        return GrassElement(self.sig, {m: c * other for m, c in self.terms.items()})

    def __rmul__(self, other):
        if isinstance(other, GrassElement):
            return multiply(other, self)
        if _is_array(other):
            return multiply(operator(self.sig, other), self)
        return GrassElement(self.sig, {m: other * c for m, c in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, GrassElement):
            other = scalar(self.sig, other)
        return (self - other).is_zero()

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms, key=lambda m: (len(m), m)):
            c = self.terms[mono]
            name = "*".join(self.sig.labels[i] for i in mono) or "1"
            parts.append(f"({c})*{name}" if not _is_array(c) else f"[{c.shape}]*{name}")
        return " + ".join(parts)


def scalar(sig, c):
    return GrassElement(sig, {(): c})


def one(sig):
    return scalar(sig, 1)


def generator(sig, i):
    if not 0 <= i < sig.size:
        raise ParameterError(f"generator index {i} outside signature of size {sig.size}")
    return GrassElement(sig, {(i,): 1})


def operator(sig, mat):
    return GrassElement(sig, {(): np.asarray(mat, dtype=object)})


def sum_elements(items, sig):
    out = GrassElement(sig)
    for x in items:
        out = out + x
    return out


def _parity_diag(sig, mono):
    d = 2**sig.p
    occ = (np.arange(d)[:, None] >> (sig.p - 1 - np.arange(sig.p))[None, :]) & 1
    sign = np.ones(d, dtype=np.int64)
    for g in mono:
        sign *= 1 - 2 * occ[:, sig.bins[g]]
    return sign


def _move_past(sig, c, mono):
    """Coefficient after moving ``mono`` left past operator ``c``."""
    if not sig.graded or not _is_array(c) or not mono:
        return c
    d = 2**sig.p
    s = _parity_diag(sig, mono).astype(object)
    out = c
    if c.shape[0] == d:
        out = s[:, None] * out
    if c.shape[1] == d:
        out = out * s[None, :]
    return out


def multiply(x, y):
    """Bilinear product with canonical reordering signs from eta."""
    x._check(y)
    out = {}
    for m1, c1 in x.terms.items():
        for m2, c2 in y.terms.items():
            sign, mono = _canonical(m1 + m2, x.sig.eta)
            if sign == 0:
                continue
            c = _coeff_mul(_move_past(x.sig, c1, m2), c2)
            if sign < 0:
                c = -c
            out[mono] = out[mono] + c if mono in out else c
    return GrassElement(x.sig, out)


def commutator(x, y):
    return multiply(x, y) - multiply(y, x)


def is_central(x):
    """True when x commutes with every generator of its signature."""
    return all(commutator(x, generator(x.sig, i)).is_zero() for i in range(x.sig.size))


def exp_nilpotent(x):
    """exp(x) as a terminating series; x must have no constant term."""
    if () in x.terms:
        raise ParameterError("exp_nilpotent needs an element without constant term")
    result = one(x.sig)
    power = one(x.sig)
    k = 0
    while True:
        k += 1
        power = multiply(power, x)
        if power.is_zero():
            return result
        result = result + power * Fraction(1, math.factorial(k))


def integrate_left(x, index):
    """int d xi_index acting from the left: move xi_index to the front, then drop it."""
    if not 0 <= index < x.sig.size:
        raise ParameterError(f"generator index {index} outside signature")
    out = {}
    eta = x.sig.eta
    for mono, c in x.terms.items():
        if index not in mono:
            continue
        pos = mono.index(index)
        sign = 1
        for g in mono[:pos]:
            sign *= int(eta[g, index])
        rest = mono[:pos] + mono[pos + 1:]
        val = c if sign > 0 else -c
        out[rest] = out[rest] + val if rest in out else val
    return GrassElement(x.sig, out)


def integrate_measure(x, measure):
    """int d xi_{m0} d xi_{m1} ... x, innermost (rightmost) differential first."""
    for idx in reversed(list(measure)):
        x = integrate_left(x, idx)
    return x


def integrate_composite(x, measure):
    """Same integral in one step: reorder each monomial to reversed(measure) + rest."""
    target = list(reversed(list(measure)))
    tset = set(target)
    out = {}
    for mono, c in x.terms.items():
        if not tset.issubset(mono):
            continue
        rest = [g for g in mono if g not in tset]
        sign = _permutation_sign(list(mono), target + rest, x.sig.eta)
        val = c if sign > 0 else -c
        key = tuple(rest)
        out[key] = out[key] + val if key in out else val
    return GrassElement(x.sig, out)


def _permutation_sign(src, dst, eta):
    # product of eta over pairs whose relative order differs between src and dst
    pos = {g: k for k, g in enumerate(dst)}
    sign = 1
    for i in range(len(src)):
        for j in range(i + 1, len(src)):
            if pos[src[i]] > pos[src[j]]:
                sign *= int(eta[src[i], src[j]])
    return sign


def berezin_measure(v):
    """Differentials d x_1* d x_1 d x_2* d x_2 ... (outer to inner)."""
    out = []
    for i in range(v.p):
        out += [v.star_offset + i, v.plain_offset + i]
    return out


# --- coherent states -------------------------------------------------------


@dataclass
class CoherentState:
    vars: Variables
    ket: GrassElement
    bra: GrassElement
    green: object = field(repr=False)


def _green_ops(p, max_p=COHERENT_MAX_P):
    if p > max_p:
        raise CapacityError(f"coherent-state expansion with p={p} exceeds cap p <= {max_p}")
    g = green_representation(p)
    ann = [b.astype(object) for b in g.bin_ops]
    return g, ann, [b.T.copy() for b in ann]


def _vacuum(dim):
    v = np.zeros((dim, 1), dtype=object)
    v[0, 0] = 1
    return v


def coherent_state(p, graded=False, ket_order="generator_first"):
    """|xi> = exp(xi . a_dag)|0> and <xi*| = <0| exp(a . xi*) expanded exactly.

    ``ket_order`` fixes how each term is written: ``"generator_first"`` uses
    xi_i a_i_dag (bra a_i xi_i*), ``"operator_first"`` uses a_i_dag xi_i
    (bra xi_i* a_i). The two agree in the ungraded mode.
    """
    if ket_order not in ("generator_first", "operator_first"):
        raise ParameterError(f"unknown ket_order {ket_order!r}")
    v = doubled(p, graded=graded)
    sig = v.sig
    g, ann, cre = _green_ops(p)
    d = g.dim
    exponent_k = GrassElement(sig)
    exponent_b = GrassElement(sig)
    for i in range(p):
        if ket_order == "generator_first":
            exponent_k = exponent_k + v.plain(i) * operator(sig, cre[i])
            exponent_b = exponent_b + operator(sig, ann[i]) * v.star(i)
        else:
            exponent_k = exponent_k + operator(sig, cre[i]) * v.plain(i)
            exponent_b = exponent_b + v.star(i) * operator(sig, ann[i])
    ket = exp_nilpotent(exponent_k) * operator(sig, _vacuum(d))
    bra = operator(sig, _vacuum(d).T) * exp_nilpotent(exponent_b)
    return CoherentState(vars=v, ket=ket, bra=bra, green=g)


def eigen_residuals(cs):
    """a_i|xi> - xi_i|xi> for each bin i."""
    sig = cs.vars.sig
    _, ann, _ = _green_ops(cs.vars.p)
    return [operator(sig, ann[i]) * cs.ket - cs.vars.plain(i) * cs.ket for i in range(cs.vars.p)]


def _as_scalar(x):
    """Collapse 1x1 array coefficients to plain numbers."""
    out = {}
    for m, c in x.terms.items():
        if _is_array(c):
            if c.shape != (1, 1):
                raise ParameterError("coefficient is not a 1x1 matrix")
            c = c[0, 0]
        out[m] = c
    return GrassElement(x.sig, out)


def normalization_residual(cs):
    """<xi*|xi> - exp(xi* . xi)."""
    overlap = _as_scalar(cs.bra * cs.ket)
    return overlap - exp_nilpotent(cs.vars.dot())


def resolution_identity_check(p, graded=False, ket_order="generator_first"):
    """int dxi* dxi exp(-xi* . xi)|xi><xi*| minus the identity, as a matrix."""
    cs = coherent_state(p, graded=graded, ket_order=ket_order)
    sig = cs.vars.sig
    integrand = exp_nilpotent(-cs.vars.dot()) * (cs.ket * cs.bra)
    result = integrate_measure(integrand, berezin_measure(cs.vars))
    d = cs.green.dim
    if set(result.terms) - {()}:
        raise ParameterError("integral left generator-dependent terms")
    mat = result.coefficient(())
    if not _is_array(mat):
        mat = np.zeros((d, d), dtype=object)
    return mat - np.eye(d, dtype=np.int64).astype(object), sig


def s_polynomial(p, n, v=None):
    """Elementary symmetric polynomial of degree n in the starred generators."""
    if not 0 <= n <= p:
        raise ParameterError(f"degree n={n} outside 0..{p}")
    v = v or doubled(p)
    out = GrassElement(v.sig)
    for combo in combinations(range(p), n):
        term = one(v.sig)
        for i in combo:
            term = term * v.star(i)
        out = out + term
    return out


def initial_term_residual(p, n, graded=False, ket_order="generator_first"):
    """<z*| (a_dag)^n |0> - n! S_n."""
    cs = coherent_state(p, graded=graded, ket_order=ket_order)
    g, _, cre = _green_ops(p)
    vec = _vacuum(g.dim)
    a_dag = sum(cre)
    for _ in range(n):
        vec = a_dag @ vec
    value = _as_scalar(cs.bra * operator(cs.vars.sig, vec))
    return value - s_polynomial(p, n, cs.vars) * math.factorial(n)


def final_term_identity(p, r, graded=False, ket_order="generator_first"):
    """<s| a^r |z> - (sum_i z_i)^r prod_i (1 + z_i), where <s| sums all basis bras."""
    if not 0 <= r <= p:
        raise ParameterError(f"r={r} outside 0..{p}")
    cs = coherent_state(p, graded=graded, ket_order=ket_order)
    sig = cs.vars.sig
    g, ann, _ = _green_ops(p)
    s_row = np.ones((1, g.dim), dtype=object)
    a = sum(ann)
    a_r = np.eye(g.dim, dtype=np.int64).astype(object)
    for _ in range(r):
        a_r = a_r @ a
    value = _as_scalar(operator(sig, s_row @ a_r) * cs.ket)
    z = cs.vars.plain_sum()
    expected = one(sig)
    for _ in range(r):
        expected = expected * z
    for i in range(p):
        expected = expected * (one(sig) + cs.vars.plain(i))
    return value - expected


# --- Liouvillian symbols ---------------------------------------------------


def _rate(x):
    return x if isinstance(x, (int, Fraction)) else Fraction(x)


def linear_symbol(v, beta, mu):
    """beta (x*.1 - p + x*.x) + mu (x - x*.x)."""
    beta, mu = _rate(beta), _rate(mu)
    dot = v.dot()
    return (v.star_sum() - v.p + dot) * beta + (v.plain_sum() - dot) * mu


def quadratic_symbol(v, beta, mu):
    """-beta (p-1) x*.x + beta (x*.x)^2 - mu x*.x + beta (x*.x) x*.1 + mu x.1."""
    beta, mu = _rate(beta), _rate(mu)
    dot = v.dot()
    return (
        dot * (-beta * (v.p - 1))
        + dot * dot * beta
        - dot * mu
        + dot * v.star_sum() * beta
        + v.plain_sum() * mu
    )


def per_bin_dot(u, w, p):
    """sum_i u_i w_i for lists of per-bin elements."""
    out = u[0] * w[0]
    for i in range(1, p):
        out = out + u[i] * w[i]
    return out


def linear_commutator_check(p, beta, mu):
    """([L(x), L(y)], 2 (mu x + beta x*) . (mu y + beta y*), literal 2 (..x..).(..x..))."""
    x, y = two_copies(p)
    beta, mu = _rate(beta), _rate(mu)
    comm = commutator(linear_symbol(x, beta, mu), linear_symbol(y, beta, mu))
    ux = [x.plain(i) * mu + x.star(i) * beta for i in range(p)]
    uy = [y.plain(i) * mu + y.star(i) * beta for i in range(p)]
    expected = per_bin_dot(ux, uy, p) * 2
    literal = per_bin_dot(ux, ux, p) * 2
    return comm, expected, literal


def quadratic_commutator_check(p, beta, mu):
    """([L(x), L(y)], 2 (beta (x*.x) x* + mu x) . (beta (y*.y) y* + mu y))."""
    x, y = two_copies(p)
    beta, mu = _rate(beta), _rate(mu)
    comm = commutator(quadratic_symbol(x, beta, mu), quadratic_symbol(y, beta, mu))
    dx, dy = x.dot(), y.dot()
    ux = [dx * x.star(i) * beta + x.plain(i) * mu for i in range(p)]
    uy = [dy * y.star(i) * beta + y.plain(i) * mu for i in range(p)]
    return comm, per_bin_dot(ux, uy, p) * 2


def symbol_to_operator(elem, v):
    """Normal-ordered operator of a symbol: x_i* -> a_i_dag, x_i -> a_i, starred on the left.

    Relies on the ``doubled`` layout, where canonical order is already normal order.
    """
    g, ann, cre = _green_ops(v.p, max_p=12)
    d = g.dim
    out = np.zeros((d, d), dtype=object)
    for mono, c in elem.terms.items():
        op = np.eye(d, dtype=np.int64).astype(object)
        for idx in mono:
            if v.star_offset <= idx < v.star_offset + v.p:
                op = op @ cre[idx - v.star_offset]
            else:
                op = op @ ann[idx - v.plain_offset]
        out = out + op * c
    return out


def symmetric_embedding(p):
    """Columns sum_{|S| = n} |S>, the image of the occupation state |n> in the bins."""
    g = green_representation(p)
    counts = np.array([bin(k).count("1") for k in range(g.dim)])
    E = np.zeros((g.dim, p + 1), dtype=object)
    for n in range(p + 1):
        E[:, n] = (counts == n).astype(np.int64)
    return E


def symbol_dual_residual(kind, p, beta, mu):
    """op(L) E - E L for L the occupation-space Liouvillian of ``kind``."""
    v = doubled(p)
    if kind == "linear_bd":
        sym = linear_symbol(v, beta, mu)
        L = build_linear_bd(p, _rate(beta), _rate(mu), exact=True)
    elif kind == "quadratic_bd":
        sym = quadratic_symbol(v, beta, mu)
        L = build_quadratic_bd(p, _rate(beta), _rate(mu), variant=1, exact=True)
    else:
        raise ParameterError(f"no symbol for model kind {kind!r}")
    E = symmetric_embedding(p)
    return symbol_to_operator(sym, v) @ E - E @ L

