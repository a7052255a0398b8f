"""Command-line entry point: run, verify, compare, info."""
from __future__ import annotations

import argparse
import itertools
import sys

import numpy as np

from . import verify as verify_mod
from .config import METHODS, load_config, validate_method
from .errors import ConfigError, ParafockError
from .liouville import build_liouvillian, to_probability_generator
from .runner import run_method, to_csv

INFO_MAX_DIM = 64
SSA_BAND = 3.0
# fraction of (time, order) points an SSA estimate must keep inside its band
SSA_MIN_COVERAGE = 0.95


def _err(msg):
    print(f"error: {msg}", file=sys.stderr)


def cmd_run(args):
    cfg = load_config(args.config)
    result = run_method(cfg)
    text = to_csv(result, cfg.moments, fixed_digits=args.fixed_digits)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify(args):
    try:
        checks = verify_mod.run_suite(args.suite)
    except KeyError as exc:
        _err(exc.args[0])
        return 2
    print(verify_mod.format_report(checks))
    return verify_mod.exit_code(checks)


def compare_results(results, moments, tolerance):
    """Pairwise comparison lines and overall pass flag."""
    lines = []
    ok = True
    for a, b in itertools.combinations(results, 2):
        if a.std_errors is not None and b.std_errors is not None:
            lines.append(f"{a.method} vs {b.method}: skipped (both stochastic)")
            continue
        if a.std_errors is None and b.std_errors is None:
            for r in moments:
                diff = float(np.max(np.abs(a.moments[r] - b.moments[r])))
                good = diff <= tolerance
                ok &= good
                lines.append(f"{a.method} vs {b.method} r={r}: max |diff| = {diff:.3e} "
                             f"(tolerance {tolerance:g}) {'PASS' if good else 'FAIL'}")
            continue
        det, sto = (a, b) if b.std_errors is not None else (b, a)
        for r in moments:
            diff = np.abs(det.moments[r] - sto.moments[r])
            se = sto.std_errors[r]
            # zero standard error means every replica agreed; fall back to the tolerance
            inside = np.where(se > 0, diff <= SSA_BAND * se, diff <= tolerance)
            coverage = float(np.mean(inside))
            good = coverage >= SSA_MIN_COVERAGE
            ok &= good
            lines.append(f"{det.method} vs {sto.method} r={r}: {coverage:.1%} of points within "
                         f"{SSA_BAND:g} s.e., max |diff| = {float(diff.max()):.3e} {'PASS' if good else 'FAIL'}")
    return lines, ok


def cmd_compare(args):
    cfg = load_config(args.config)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if len(methods) < 2 or len(set(methods)) != len(methods):
        raise ConfigError("--methods needs at least two distinct methods")
    for m in methods:
        validate_method(cfg.model, m, cfg.moments)
    tolerance = args.tolerance if args.tolerance is not None else cfg.tolerance
    results = [run_method(cfg, m) for m in methods]
    lines, ok = compare_results(results, cfg.moments, tolerance)
    print("\n".join(lines))
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def cmd_info(args):
    cfg = load_config(args.config, for_run=False)
    m = cfg.model
    print(f"model: {m.kind}, p={m.p}" + (f", variant={m.variant}" if m.kind == "quadratic_bd" else ""))
    if m.kind == "diffusion":
        print(f"lattice: {m.lattice.sites} sites, {m.lattice.geometry}, {len(m.lattice.ordered_pairs())} ordered pairs")
        print(f"rates: nu={m.nu}")
    else:
        print(f"rates: beta={m.beta}, mu={m.mu}")
    print(f"state space dimension: {m.dim}")
    valid = [meth for meth in METHODS if _method_ok(m, meth, cfg.moments)]
    print(f"methods: {', '.join(valid)}")
    if m.dim > INFO_MAX_DIM:
        print(f"generator not printed (dimension > {INFO_MAX_DIM})")
        return 0
    L = build_liouvillian(m)
    Q = to_probability_generator(L, m, check=False)
    Q = Q.toarray() if hasattr(Q, "toarray") else np.asarray(Q, dtype=float)
    colsum = Q.sum(axis=0)
    with np.printoptions(precision=6, suppress=True, linewidth=120):
        print("probability generator Q:")
        print(Q)
    worst = float(np.max(np.abs(colsum)))
    if worst > 1e-12:
        print(f"warning: column sums do not vanish (max {worst:.3e}); this generator does not conserve probability")
    return 0


def _method_ok(model, method, moments):
    try:
        validate_method(model, method, moments)
        return True
    except ConfigError:
        return False


def build_parser():
    parser = argparse.ArgumentParser(prog="parafock", description="Partial-exclusion Fock-space toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="compute factorial moments and write CSV")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out")
    p_run.add_argument("--fixed-digits", action="store_true", help="17 significant digits instead of shortest round-trip")
    p_run.set_defaults(func=cmd_run)
    p_ver = sub.add_parser("verify", help="run the self-verification suites")
    p_ver.add_argument("--suite", default="all")
    p_ver.set_defaults(func=cmd_verify)
    p_cmp = sub.add_parser("compare", help="compare methods on one configuration")
    p_cmp.add_argument("--config", required=True)
    p_cmp.add_argument("--methods", required=True)
    p_cmp.add_argument("--tolerance", type=float)
    p_cmp.set_defaults(func=cmd_compare)
    p_info = sub.add_parser("info", help="describe a model and print its generator")
    p_info.add_argument("--config", required=True)
    p_info.set_defaults(func=cmd_info)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        _err(str(exc))
        return 2
    except ParafockError as exc:
        _err(str(exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())
