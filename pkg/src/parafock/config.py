"""JSON run configuration: parsing, defaults and validation."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ConfigError, ParafockError
from .lattice import Lattice
from .liouville import ModelSpec

METHODS = ("expm", "closed", "diagram", "ode", "ssa")
DEFAULT_N_OUTPUTS = 50
DEFAULT_TOLERANCE = 1e-8
DEFAULT_MOMENTS = (0, 1, 2)
DEFAULT_REPLICAS = 10_000
DEFAULT_SEED = 0

_KEYS = {
    "": {"model", "initial", "run"},
    "model": {"kind", "p", "beta", "mu", "nu", "variant", "lattice"},
    "model.lattice": {"sites", "geometry"},
    "initial": {"n", "occupancy"},
    "run": {"t_final", "n_outputs", "moments", "method", "replicas", "seed", "tolerance"},
}


@dataclass
class RunConfig:
    model: ModelSpec
    initial: object
    t_final: float
    n_outputs: int = DEFAULT_N_OUTPUTS
    moments: list = field(default_factory=lambda: list(DEFAULT_MOMENTS))
    method: str = "expm"
    replicas: int = DEFAULT_REPLICAS
    seed: int = DEFAULT_SEED
    tolerance: float = DEFAULT_TOLERANCE


def _check_keys(obj, path):
    if not isinstance(obj, dict):
        raise ConfigError(f"{path or 'document'}: expected an object")
    unknown = set(obj) - _KEYS[path]
    if unknown:
        where = f"{path}." if path else ""
        raise ConfigError(f"unknown key(s): {', '.join(where + k for k in sorted(unknown))}")


def _num(obj, key, path, kind=float, required=False, default=None):
    if key not in obj:
        if required:
            raise ConfigError(f"{path}.{key}: required field missing")
        return default
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{path}.{key}: expected a number, got {val!r}")
    if kind is int:
        if isinstance(val, float) and not val.is_integer():
            raise ConfigError(f"{path}.{key}: expected an integer, got {val!r}")
        return int(val)
    return float(val)


def validate_method(model, method, moments=()):
    if method not in METHODS:
        raise ConfigError(f"run.method: unknown method {method!r} (choose from {', '.join(METHODS)})")
    if method == "closed" and model.kind != "linear_bd":
        raise ConfigError("run.method: closed form unavailable for this model (linear_bd only)")
    if method == "diagram" and model.kind not in ("quadratic_bd", "diffusion"):
        raise ConfigError("run.method: diagram resummation needs quadratic_bd or diffusion")
    if method == "ode":
        if model.kind != "diffusion":
            raise ConfigError("run.method: moment ODE available for diffusion only")
        if any(r > 2 for r in moments):
            raise ConfigError("run.moments: the moment ODE closes at order 2")


def parse_config(text, for_run=True):
    """Parse and validate a JSON document into a RunConfig.

    ``for_run=False`` relaxes the rule that rejects the non-conserving
    quadratic variant 2, so it can still be inspected.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    _check_keys(doc, "")
    for section in ("model", "run"):
        if section not in doc:
            raise ConfigError(f"{section}: required section missing")
    m = doc["model"]
    _check_keys(m, "model")
    kind = m.get("kind")
    if kind not in ("linear_bd", "quadratic_bd", "diffusion"):
        raise ConfigError(f"model.kind: unknown model kind {kind!r}")
    lattice = Lattice(1)
    if "lattice" in m:
        if kind != "diffusion":
            raise ConfigError("model.lattice: only meaningful for diffusion")
        lat = m["lattice"]
        _check_keys(lat, "model.lattice")
        geometry = lat.get("geometry", "path")
        if geometry not in ("path", "ring"):
            raise ConfigError(f"model.lattice.geometry: expected 'path' or 'ring', got {geometry!r}")
        lattice = Lattice(_num(lat, "sites", "model.lattice", int, required=True), geometry)
    elif kind == "diffusion":
        raise ConfigError("model.lattice: required for diffusion")
    # rates that do not enter the chosen model must not be given
    allowed = {"linear_bd": {"beta", "mu"}, "quadratic_bd": {"beta", "mu", "variant"}, "diffusion": {"nu"}}[kind]
    for key in ("beta", "mu", "nu", "variant"):
        if key in m and key not in allowed:
            raise ConfigError(f"model.{key}: not used by model kind {kind}")
    try:
        model = ModelSpec(
            kind=kind,
            p=_num(m, "p", "model", int, required=True),
            beta=_num(m, "beta", "model", default=0.0),
            mu=_num(m, "mu", "model", default=0.0),
            nu=_num(m, "nu", "model", default=0.0),
            variant=_num(m, "variant", "model", int, default=1),
            lattice=lattice,
        )
    except ParafockError as exc:
        raise ConfigError(f"model: {exc}") from None
    if for_run and model.kind == "quadratic_bd" and model.variant == 2:
        raise ConfigError("model.variant: variant 2 does not conserve probability; use 'info' to inspect it")

    init = doc.get("initial", {})
    _check_keys(init, "initial")
    if kind == "diffusion":
        if "n" in init or "occupancy" not in init:
            raise ConfigError("initial.occupancy: required for diffusion (one entry per site)")
        occ = init["occupancy"]
        if not isinstance(occ, list) or len(occ) != lattice.sites or not all(
            isinstance(x, int) and not isinstance(x, bool) for x in occ
        ):
            raise ConfigError(f"initial.occupancy: expected {lattice.sites} integers")
        if any(x < 0 or x > model.p for x in occ):
            raise ConfigError(f"initial.occupancy: entries must lie in 0..{model.p}, got {occ}")
        initial = list(occ)
    else:
        if "occupancy" in init:
            raise ConfigError("initial.occupancy: single-site models take initial.n")
        n0 = _num(init, "n", "initial", int, default=0)
        if not 0 <= n0 <= model.p:
            raise ConfigError(f"initial.n: must lie in 0..{model.p}, got {n0}")
        initial = n0

    r = doc["run"]
    _check_keys(r, "run")
    t_final = _num(r, "t_final", "run", required=True)
    if t_final < 0:
        raise ConfigError("run.t_final: must be >= 0")
    n_outputs = _num(r, "n_outputs", "run", int, default=DEFAULT_N_OUTPUTS)
    if n_outputs < 1 or (t_final == 0 and n_outputs > 1):
        raise ConfigError("run.n_outputs: must be >= 1 (and 1 when t_final = 0)")
    moments = r.get("moments", list(DEFAULT_MOMENTS))
    if not isinstance(moments, list) or not moments or not all(
        isinstance(x, int) and not isinstance(x, bool) and x >= 0 for x in moments
    ):
        raise ConfigError("run.moments: expected a non-empty list of non-negative integers")
    if any(x > model.p for x in moments):
        raise ConfigError(f"run.moments: orders above p={model.p} vanish identically")
    method = r.get("method", "expm")
    validate_method(model, method, moments)
    replicas = _num(r, "replicas", "run", int, default=DEFAULT_REPLICAS)
    if replicas < 100:
        raise ConfigError("run.replicas: must be >= 100")
    seed = _num(r, "seed", "run", int, default=DEFAULT_SEED)
    if not 0 <= seed < 2**64:
        raise ConfigError("run.seed: must be a 64-bit unsigned integer")
    tolerance = _num(r, "tolerance", "run", default=DEFAULT_TOLERANCE)
    if tolerance <= 0:
        raise ConfigError("run.tolerance: must be > 0")
    return RunConfig(
        model=model,
        initial=initial,
        t_final=t_final,
        n_outputs=n_outputs,
        moments=moments,
        method=method,
        replicas=replicas,
        seed=seed,
        tolerance=tolerance,
    )


def load_config(path, for_run=True):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, for_run=for_run)
