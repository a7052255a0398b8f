"""Lattice geometry and occupation-vector bookkeeping."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class Lattice:
    sites: int
    geometry: str = "path"

    def __post_init__(self):
        if self.sites < 1:
            raise ParameterError(f"a lattice needs at least one site, got {self.sites}")
        if self.geometry not in ("path", "ring"):
            raise ParameterError(f"geometry must be 'path' or 'ring', got {self.geometry!r}")

    def ordered_pairs(self):
        """Distinct ordered neighbour pairs (i, j).

        A ring of L >= 3 sites has 2L of them and a path 2(L-1). Rings with
        L <= 2 have no extra bond, so they coincide with the path.
        """
        L = self.sites
        bonds = [(i, i + 1) for i in range(L - 1)]
        if self.geometry == "ring" and L >= 3:
            bonds.append((L - 1, 0))
        pairs = []
        for i, j in bonds:
            pairs.append((i, j))
            pairs.append((j, i))
        return sorted(pairs)

    def neighbours(self, k):
        return sorted({j for i, j in self.ordered_pairs() if i == k})

    def degree(self, k):
        return len(self.neighbours(k))

    def laplacian(self):
        """Graph Laplacian adjacency - degree (rows sum to zero)."""
        L = self.sites
        out = np.zeros((L, L))
        for i, j in self.ordered_pairs():
            out[i, j] += 1.0
            out[i, i] -= 1.0
        return out


def state_index(occupancy, p):
    """Mixed-radix index, site 0 most significant (matches np.kron ordering)."""
    idx = 0
    for n in occupancy:
        idx = idx * (p + 1) + int(n)
    return idx


def all_states(p, sites):
    """All occupation vectors in index order, shape ((p+1)^sites, sites)."""
    grids = np.indices((p + 1,) * sites).reshape(sites, -1).T
    return grids.astype(np.int64)


def sector_states(p, sites, total):
    """Occupation vectors with fixed total, 0 <= n_i <= p, in lexicographic order."""
    out = []
    prefix = []

    def rec(k, remaining):
        if k == sites - 1:
            if remaining <= p:
                out.append(prefix + [remaining])
            return
        # the remaining sites can absorb at most p each
        lo = max(0, remaining - p * (sites - k - 1))
        for n in range(lo, min(p, remaining) + 1):
            prefix.append(n)
            rec(k + 1, remaining - n)
            prefix.pop()

    if 0 <= total <= p * sites:
        rec(0, total)
    return np.array(out, dtype=np.int64).reshape(-1, sites)
