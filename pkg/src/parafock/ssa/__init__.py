"""Direct-method stochastic simulation for the three partial-exclusion models.

Replica ``i`` of a run with seed ``s`` draws from a SplitMix64 stream seeded
with ``mix64(s + (i + 1) * GOLDEN)``; each draw advances the stream state by
``GOLDEN`` and returns the mixed state. Uniforms take the top 53 bits, with 0
remapped to 2^-53. The constants are

    GOLDEN = 0x9E3779B97F4A7C15
    mix64:  z ^= z >> 30; z *= 0xBF58476D1CE4E5B9
            z ^= z >> 27; z *= 0x94D049BB133111EB
            z ^= z >> 31

The compiled kernels and the pure-Python fallback perform the same floating
point operations in the same order, so both produce bit-identical paths. Set
``PARAFOCK_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from ..errors import ConsistencyError, ParameterError
from ..fock import falling_factorial
from ..liouville import ModelSpec, birth_death_rates
from . import _pure
from ._pure import GOLDEN, MASK64, SplitMix64, mix64

MIN_REPLICAS = 2

_compiled = None
if os.environ.get("PARAFOCK_PURE_PYTHON", "") != "1":
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

BACKENDS = ("compiled", "python") if _compiled is not None else ("python",)
DEFAULT_BACKEND = BACKENDS[0]


def _kernels(backend):
    backend = backend or DEFAULT_BACKEND
    if backend == "python":
        return _pure
    if backend == "compiled":
        if _compiled is None:
            raise ParameterError("compiled SSA kernels are not available in this build")
        return _compiled
    raise ParameterError(f"unknown SSA backend {backend!r}")


@dataclass(frozen=True)
class RngSpec:
    seed: int

    def replica_seed(self, i):
        return mix64((self.seed + (i + 1) * GOLDEN) & MASK64)

    def replica_seeds(self, n):
        return np.array([self.replica_seed(i) for i in range(n)], dtype=np.uint64)


@dataclass(frozen=True)
class MomentEstimate:
    mean: float
    std_error: float
    replicas: int


def _check_initial(model, initial):
    if model.kind == "diffusion":
        occ = np.asarray(initial, dtype=np.int64).reshape(-1)
        if occ.shape != (model.lattice.sites,):
            raise ParameterError(f"initial occupancy must have {model.lattice.sites} entries")
        if np.any(occ < 0) or np.any(occ > model.p):
            raise ParameterError(f"initial occupancy {occ.tolist()} outside 0..{model.p}")
        return occ
    n0 = int(initial)
    if not 0 <= n0 <= model.p:
        raise ParameterError(f"initial occupancy {n0} outside 0..{model.p}")
    return n0


def sample_paths(model, initial, times, seed, replicas, backend=None):
    """States of ``replicas`` independent trajectories at each of ``times``.

    Shape (replicas, len(times)) for birth-death models and
    (replicas, len(times), sites) for diffusion.
    """
    if replicas < 1:
        raise ParameterError("replicas must be >= 1")
    initial = _check_initial(model, initial)
    grid = np.ascontiguousarray(times, dtype=np.float64)
    if grid.ndim != 1 or np.any(np.diff(grid) < 0) or (len(grid) and grid[0] < 0):
        raise ParameterError("sample times must be non-negative and non-decreasing")
    seeds = RngSpec(seed).replica_seeds(replicas)
    k = _kernels(backend)
    if model.kind == "diffusion":
        pairs = model.lattice.ordered_pairs()
        src = np.array([i for i, _ in pairs], dtype=np.int64)
        dst = np.array([j for _, j in pairs], dtype=np.int64)
        out = np.zeros((replicas, len(grid), model.lattice.sites), dtype=np.int64)
        k.hop_paths(src, dst, float(model.nu), int(model.p), initial, grid, seeds, out)
        if np.any(out.sum(axis=2) != initial.sum()):
            raise ConsistencyError("particle number changed during a hopping simulation")
    else:
        birth, death = birth_death_rates(model)
        out = np.zeros((replicas, len(grid)), dtype=np.int64)
        k.bd_paths(np.ascontiguousarray(birth), np.ascontiguousarray(death), initial, grid, seeds, out)
    if out.size and (out.min() < 0 or out.max() > model.p):
        raise ConsistencyError("sampled occupancy outside [0, p]")
    return out


def simulate(model, initial, T, rng, record_path=False):
    """One trajectory up to time T.

    Returns the terminal state, or ``(terminal, path)`` when ``record_path`` is
    set, where ``path`` lists ``(time, state)`` after every event starting from
    ``(0, initial)``. Replica 0 of ``rng`` is used.
    """
    if T < 0:
        raise ParameterError("T must be >= 0")
    if not record_path:
        out = sample_paths(model, initial, [T], rng.seed, 1)
        return int(out[0, 0]) if model.kind != "diffusion" else out[0, 0].copy()
    return _event_path(model, _check_initial(model, initial), T, SplitMix64(rng.replica_seed(0)))


def _event_path(model, initial, T, stream):
    # mirrors the kernels' draw order so the terminal state agrees with sample_paths
    p = model.p
    t = 0.0
    if model.kind == "diffusion":
        pairs = model.lattice.ordered_pairs()
        occ = [int(x) for x in initial]
        path = [(0.0, tuple(occ))]
        while True:
            rates = [model.nu * float(occ[i] * (p - occ[j])) for i, j in pairs]
            a0 = 0.0
            for r in rates:
                a0 += r
            if a0 <= 0.0:
                break
            u1, u2 = stream.uniform(), stream.uniform()
            t_next = t - math.log(u1) / a0
            if not T >= t_next:
                break
            target, cum, chosen, chosen_last = u2 * a0, 0.0, -1, -1
            for k, r in enumerate(rates):
                if r > 0.0:
                    chosen_last = k
                    cum += r
                    if target < cum:
                        chosen = k
                        break
            if chosen < 0:
                chosen = chosen_last
            i, j = pairs[chosen]
            occ[i] -= 1
            occ[j] += 1
            t = t_next
            path.append((t, tuple(occ)))
        return np.array(occ, dtype=np.int64), path
    birth, death = birth_death_rates(model)
    n = int(initial)
    path = [(0.0, n)]
    while True:
        b = float(birth[n])
        a0 = b + float(death[n])
        if a0 <= 0.0:
            break
        u1, u2 = stream.uniform(), stream.uniform()
        t_next = t - math.log(u1) / a0
        if not T >= t_next:
            break
        n = n + 1 if u2 * a0 < b else n - 1
        t = t_next
        path.append((t, n))
    return n, path


def moment_estimate(values):
    """Mean and standard error of integer samples, independent of their order."""
    values = np.asarray(values, dtype=np.int64)
    N = len(values)
    if N < MIN_REPLICAS:
        raise ParameterError(f"need at least {MIN_REPLICAS} replicas, got {N}")
    # integer sum is exact, so the mean does not depend on replica order
    total = int(values.sum())
    mean = total / N
    dev = values.astype(float) - mean
    var = math.fsum(dev * dev) / (N - 1)
    return MomentEstimate(mean=mean, std_error=math.sqrt(var / N), replicas=N)


def path_moments(paths, r_list, site=0):
    """Per-time MomentEstimate lists for each r; lattices use ``site``."""
    if paths.ndim == 3:
        paths = paths[:, :, site]
    out = {}
    for r in r_list:
        if r < 0:
            raise ParameterError("moment order must be >= 0")
        table = np.array([falling_factorial(n, r) for n in range(int(paths.max(initial=0)) + 1)], dtype=np.int64)
        vals = table[paths]
        out[r] = [moment_estimate(vals[:, g]) for g in range(paths.shape[1])]
    return out


def estimate_moments(model, initial, T, r_list, replicas, seed, site=0, backend=None):
    """r -> MomentEstimate of <(n)_r> at time T (site ``site`` for lattices)."""
    if replicas < 100:
        raise ParameterError("moment estimates need at least 100 replicas")
    paths = sample_paths(model, initial, [T], seed, replicas, backend=backend)
    return {r: est[0] for r, est in path_moments(paths, r_list, site).items()}


__all__ = [
    "BACKENDS",
    "DEFAULT_BACKEND",
    "MomentEstimate",
    "RngSpec",
    "ModelSpec",
    "estimate_moments",
    "mix64",
    "moment_estimate",
    "path_moments",
    "sample_paths",
    "simulate",
]
