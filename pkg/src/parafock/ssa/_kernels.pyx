# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled direct-method kernels; bit-identical to parafock.ssa._pure."""
from libc.math cimport log
from libc.stdint cimport uint64_t, int64_t

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t MIX1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MIX2 = 0x94D049BB133111EBULL
cdef double TWO_M53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * MIX1
    z = (z ^ (z >> 27)) * MIX2
    return z ^ (z >> 31)


cdef inline double _uniform(uint64_t* state) noexcept nogil:
    state[0] += GOLDEN
    cdef double u = <double>(_mix64(state[0]) >> 11) * TWO_M53
    return u if u > 0.0 else TWO_M53


def mix64(z):
    return _mix64(<uint64_t>(int(z) & 0xFFFFFFFFFFFFFFFF))


def bd_paths(const double[:] birth, const double[:] death, long n0,
             const double[:] grid, const uint64_t[:] seeds, int64_t[:, :] out):
    cdef Py_ssize_t G = grid.shape[0], R = seeds.shape[0], rep, g
    cdef long p = birth.shape[0] - 1, n
    cdef uint64_t state
    cdef double t, t_next, a0, b, u1, u2
    cdef bint bad = False
    with nogil:
        for rep in range(R):
            state = seeds[rep]
            n = n0
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
                u1 = _uniform(&state)
                u2 = _uniform(&state)
                t_next = t - log(u1) / a0
                while g < G and grid[g] < t_next:
                    out[rep, g] = n
                    g += 1
                if g == G:
                    break
                if u2 * a0 < b:
                    n += 1
                else:
                    n -= 1
                if n < 0 or n > p:
                    bad = True
                    break
                t = t_next
            if bad:
                break
    if bad:
        raise AssertionError(f"occupancy left [0, {p}]")


def hop_paths(const int64_t[:] src, const int64_t[:] dst, double nu, int64_t p,
              const int64_t[:] occ0, const double[:] grid, const uint64_t[:] seeds,
              int64_t[:, :, :] out):
    cdef Py_ssize_t G = grid.shape[0], R = seeds.shape[0], P = src.shape[0]
    cdef Py_ssize_t L = occ0.shape[0], rep, g, k, s, chosen, last
    cdef uint64_t state
    cdef double t, t_next, a0, u1, u2, target, cum
    cdef bint bad = False
    cdef int64_t[:] occ = cython_zeros_i(L)
    cdef double[:] rates = cython_zeros(P)
    with nogil:
        for rep in range(R):
            state = seeds[rep]
            for s in range(L):
                occ[s] = occ0[s]
            t = 0.0
            g = 0
            while g < G:
                a0 = 0.0
                for k in range(P):
                    rates[k] = nu * <double>(occ[src[k]] * (p - occ[dst[k]]))
                    a0 += rates[k]
                if a0 <= 0.0:
                    while g < G:
                        for s in range(L):
                            out[rep, g, s] = occ[s]
                        g += 1
                    break
                u1 = _uniform(&state)
                u2 = _uniform(&state)
                t_next = t - log(u1) / a0
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
                    chosen = last
                occ[src[chosen]] -= 1
                occ[dst[chosen]] += 1
                if occ[src[chosen]] < 0 or occ[dst[chosen]] > p:
                    bad = True
                    break
                t = t_next
            if bad:
                break
    if bad:
        raise AssertionError(f"occupancy left [0, {p}] during a hop")


cdef double[:] cython_zeros(Py_ssize_t n):
    import numpy as np
    return np.zeros(n, dtype=np.float64)


cdef int64_t[:] cython_zeros_i(Py_ssize_t n):
    import numpy as np
    return np.zeros(n, dtype=np.int64)
