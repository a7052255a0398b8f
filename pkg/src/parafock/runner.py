"""Method dispatch: factorial-moment time series for a RunConfig."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import closed_form, diagram, evolve, ssa
from .config import validate_method
from .errors import ParafockError
from .liouville import build_liouvillian, to_probability_generator


class MethodError(ParafockError):
    def __init__(self, method, exc):
        super().__init__(f"method {method}: {exc}")
        self.method = method


@dataclass
class MethodResult:
    method: str
    times: np.ndarray
    moments: dict
    std_errors: dict | None = None


def _expm(cfg, times):
    model = cfg.model
    Q = to_probability_generator(build_liouvillian(model), model)
    grid = evolve.TimeGrid(times)
    if model.kind == "diffusion":
        traj = evolve.evolve_distribution(Q, evolve.lattice_distribution(model.p, cfg.initial), grid)
        return {r: evolve.lattice_site_factorial_moments(traj, model.p, model.lattice.sites, r)[:, 0] for r in cfg.moments}
    psi0 = np.zeros(model.p + 1)
    psi0[cfg.initial] = 1.0
    traj = evolve.evolve_distribution(Q, psi0, grid)
    return evolve.factorial_moments(traj, cfg.moments)


def _closed(cfg, times):
    m = cfg.model
    return {
        r: np.array([closed_form.linear_factorial_moment(m.p, cfg.initial, r, m.beta, m.mu, t) for t in times])
        for r in cfg.moments
    }


def _diagram(cfg, times):
    m = cfg.model
    if m.kind == "quadratic_bd":
        system = diagram.build_bd_tridiagonal(m.p, m.beta, m.mu)
        spec = diagram.spectrum(system) if cfg.initial > 0 else None
        return {
            r: np.array([diagram.moment_by_eigendecomposition(system, cfg.initial, r, t, spec) for t in times])
            for r in cfg.moments
        }
    sector = diagram.build_sector(m.lattice, m.p, m.nu, sum(cfg.initial))
    probs = diagram.sector_evolve(sector, cfg.initial, times)
    return {r: diagram.sector_site_moments(sector, probs, r)[:, 0] for r in cfg.moments}


def _ode(cfg, times):
    m = cfg.model
    occ = np.asarray(cfg.initial, dtype=float)
    means, second = evolve.moment_ode_diffusion(
        m.lattice, m.p, m.nu, occ, np.outer(occ, occ), evolve.TimeGrid(times)
    )
    first = means[:, 0]
    out = {}
    for r in cfg.moments:
        if r == 0:
            out[r] = np.ones(len(times))
        elif r == 1:
            out[r] = first
        else:
            out[r] = second[:, 0, 0] - first
    return out


def run_method(cfg, method=None):
    method = method or cfg.method
    validate_method(cfg.model, method, cfg.moments)
    times = evolve.TimeGrid.uniform(cfg.t_final, cfg.n_outputs).points
    try:
        if method == "ssa":
            paths = ssa.sample_paths(cfg.model, cfg.initial, times, cfg.seed, cfg.replicas)
            est = ssa.path_moments(paths, cfg.moments, site=0)
            moments = {r: np.array([e.mean for e in est[r]]) for r in cfg.moments}
            errors = {r: np.array([e.std_error for e in est[r]]) for r in cfg.moments}
            return MethodResult(method, times, moments, errors)
        fn = {"expm": _expm, "closed": _closed, "diagram": _diagram, "ode": _ode}[method]
        moments = fn(cfg, times)
    except ParafockError as exc:
        raise MethodError(method, exc) from exc
    if 0 in moments:
        # (n)_0 = 1 in every state and the generator conserves probability, so the
        # zeroth moment is exactly 1; rounding drift in the mass is not reported here
        moments[0] = np.ones(len(times))
    return MethodResult(method, times, moments)


def format_number(x, fixed_digits=False):
    x = float(x)
    return f"{x:.17g}" if fixed_digits else repr(x)


def to_csv(result, moments, fixed_digits=False):
    header = ["time"] + [f"m{r}" for r in moments]
    if result.std_errors is not None:
        header += [f"se{r}" for r in moments]
    lines = [",".join(header)]
    for k, t in enumerate(result.times):
        row = [t] + [result.moments[r][k] for r in moments]
        if result.std_errors is not None:
            row += [result.std_errors[r][k] for r in moments]
        lines.append(",".join(format_number(v, fixed_digits) for v in row))
    return "\n".join(lines) + "\n"


def parse_csv(text):
    """Header list and float rows of a CSV written by :func:`to_csv`."""
    lines = text.rstrip("\n").split("\n")
    return lines[0].split(","), [[float(v) for v in line.split(",")] for line in lines[1:]]

