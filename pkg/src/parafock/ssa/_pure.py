"""Pure-Python direct-method kernels; the reference the compiled kernels must match bit for bit."""
from __future__ import annotations

import math

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
TWO_M53 = 2.0**-53


def mix64(z):
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Counter-based stream: state advances by GOLDEN, output is mix64(state)."""

    __slots__ = ("state",)

    def __init__(self, seed):
        self.state = int(seed) & MASK64

    def next_u64(self):
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def uniform(self):
        # 53-bit uniform in (0, 1); 0 is remapped so log(u) stays finite
        u = (self.next_u64() >> 11) * TWO_M53
        return u if u > 0.0 else TWO_M53


def bd_paths(birth, death, n0, grid, seeds, out):
    """Birth-death paths sampled on ``grid``; out[r, g] is the state at grid[g]."""
    G = len(grid)
    birth = [float(x) for x in birth]
    death = [float(x) for x in death]
    grid = [float(x) for x in grid]
    p = len(birth) - 1
    for rep in range(len(seeds)):
        rng = SplitMix64(int(seeds[rep]))
        n = int(n0)
        t = 0.0
        g = 0
        while g < G:
            b = birth[n]
            a0 = b + death[n]
            if a0 <= 0.0:
                while g < G:
                    out[rep, g] = n
                    g += 1
                break
            u1 = rng.uniform()
            u2 = rng.uniform()
            t_next = t - math.log(u1) / a0
            while g < G and grid[g] < t_next:
                out[rep, g] = n
                g += 1
            if g == G:
                break
            n = n + 1 if u2 * a0 < b else n - 1
            if n < 0 or n > p:
                raise AssertionError(f"occupancy {n} left [0, {p}]")
            t = t_next


def hop_paths(src, dst, nu, p, occ0, grid, seeds, out):
    """Lattice hopping paths; out[r, g, k] is the occupancy of site k at grid[g]."""
    G = len(grid)
    src = [int(x) for x in src]
    dst = [int(x) for x in dst]
    grid = [float(x) for x in grid]
    nu = float(nu)
    P = len(src)
    L = len(occ0)
    rates = [0.0] * P
    for rep in range(len(seeds)):
        rng = SplitMix64(int(seeds[rep]))
        occ = [int(x) for x in occ0]
        t = 0.0
        g = 0
        while g < G:
            a0 = 0.0
            for k in range(P):
                rates[k] = nu * float(occ[src[k]] * (p - occ[dst[k]]))
                a0 += rates[k]
            if a0 <= 0.0:
                while g < G:
                    for s in range(L):
                        out[rep, g, s] = occ[s]
                    g += 1
                break
            u1 = rng.uniform()
            u2 = rng.uniform()
            t_next = t - math.log(u1) / a0
            while g < G and grid[g] < t_next:
                for s in range(L):
                    out[rep, g, s] = occ[s]
                g += 1
            if g == G:
                break
            target = u2 * a0
            cum = 0.0
            chosen = -1
            last = -1
            for k in range(P):
                if rates[k] > 0.0:
                    last = k
                    cum += rates[k]
                    if target < cum:
                        chosen = k
                        break
            if chosen < 0:
                # rounding left target at the top of the cumulative sum
                chosen = last
            occ[src[chosen]] -= 1
            occ[dst[chosen]] += 1
            if occ[src[chosen]] < 0 or occ[dst[chosen]] > p:
                raise AssertionError("occupancy left [0, p] during a hop")
            t = t_next
