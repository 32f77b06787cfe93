"""Command-line front end.

Subcommands: verify-props, projector, scan-bcs, werner-ppt, ew-maps, compose.
All numeric work is seeded and the emitted JSON/CSV is byte-stable for a
fixed configuration.  Exit codes: 0 success, 1 bad flags, 2 numerical
failure/contradiction.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import dense_ops, entanglement as ent, multilinear_maps as mm
from .sym_core import parse_partition
from .verification import proposition_suite
from .wba_algebra import (
    compose_diagrams,
    diagram_to_text,
    element_to_json,
    f_projector,
    gamma,
    parse_diagram,
    realize,
    size_guard_limit,
)


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    tolerance: float = 1e-10
    size_guard: int = 4096
    output_format: str = "text"
    parallelism: int = 1


class _Parser(argparse.ArgumentParser):
    # the flag-validation contract wants exit code 1, not argparse's 2
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(1)

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # let range/list values that start with a negative number, like
        # "-0.5:0.1:0.02" or "-0.1,0,0", pass as arguments rather than flags
        self._negative_number_matcher = re.compile(r"^-\d+(\.\d+)?([:,].*)?$")


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".wba-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _emit(text: str, out: str | None) -> None:
    if out:
        _atomic_write(out, text)
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def _parse_range(text: str) -> list[float]:
    """start:stop:step, inclusive of stop up to float fuzz."""
    try:
        start, stop, step = (float(tok) for tok in text.split(":"))
    except ValueError:
        raise ValueError(f"bad range {text!r}; expected start:stop:step") from None
    if step <= 0:
        raise ValueError("range step must be positive")
    values, i = [], 0
    while (v := start + i * step) <= stop + 1e-12:
        values.append(round(v, 12))
        i += 1
    return values


def config_from_args(args) -> RunConfig:
    return RunConfig(
        seed=args.seed,
        tolerance=args.tolerance,
        size_guard=size_guard_limit(),
        output_format=args.format,
        parallelism=args.parallelism,
    )


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_verify_props(args) -> int:
    cfg = config_from_args(args)
    cases = proposition_suite(seed=cfg.seed, tuples=args.tuples, only=args.only,
                              tol=cfg.tolerance)
    if not cases:
        print(f"no cases match --only {args.only!r}", file=sys.stderr)
        return 1
    failed = [c for c in cases if not c["passed"]]
    if cfg.output_format == "json":
        payload = [{**c, "max_dev": _fmt(c["max_dev"])} for c in cases]
        _emit(json.dumps(payload, sort_keys=True, indent=2), args.out)
    else:
        lines = [f"{'case':40s} {'max deviation':>14s}  status"]
        for c in cases:
            status = "pass" if c["passed"] else "FAIL"
            lines.append(f"{c['name']:40s} {c['max_dev']:14.3e}  {status}")
        lines.append(f"{len(cases) - len(failed)}/{len(cases)} cases passed "
                     f"(tolerance {cfg.tolerance:g})")
        _emit("\n".join(lines) + "\n", args.out)
    return 2 if failed else 0


def cmd_projector(args) -> int:
    cfg = config_from_args(args)
    mu = parse_partition(args.mu)
    alpha = parse_partition(args.alpha)
    try:
        g = gamma(mu, alpha, args.n, args.k, args.d)
        element = f_projector(mu, alpha, args.n, args.k, args.d)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    dense = realize(element, args.d, size_guard=cfg.size_guard)
    idem = dense_ops.sup_norm(dense @ dense - dense)

    rng = np.random.default_rng(cfg.seed)
    comm = 0.0
    for _ in range(args.unitaries):
        u = dense_ops.haar_unitary(args.d, rng)
        big = np.eye(1, dtype=complex)
        for _ in range(args.n - args.k):
            big = np.kron(big, u)
        for _ in range(args.k):
            big = np.kron(big, u.conj())
        comm = max(comm, dense_ops.sup_norm(dense @ big - big @ dense))

    report = {
        "n": args.n, "k": args.k, "d": args.d,
        "mu": str(mu), "alpha": str(alpha),
        "gamma": str(g),
        "terms": len(element.terms),
        "idempotence_residual": _fmt(idem),
        "commutant_residual": _fmt(comm),
        "element": json.loads(element_to_json(element)),
    }
    if args.emit_map is not None:
        n_in = args.emit_map
        if not 1 <= n_in <= args.n:
            print(f"error: --emit-map must be in 1..{args.n}", file=sys.stderr)
            return 1
        spec = mm.MapSpec(element, n_in=n_in, n_out=args.n - n_in, d=args.d)
        inputs = [dense_ops.random_psd(args.d, 1, rng) for _ in range(n_in)]
        out = mm.fast_evaluate(spec, inputs)
        report["map_inputs"] = n_in
        report["map_output_min_eig"] = _fmt(dense_ops.min_eigenvalue(out))
    if cfg.output_format == "json":
        _emit(json.dumps(report, sort_keys=True, indent=2), args.out)
    else:
        lines = [f"F_{report['mu']}({report['alpha']}) on n={args.n} sites, "
                 f"k={args.k} transposed, d={args.d}",
                 f"gamma = {report['gamma']}",
                 f"terms = {report['terms']}",
                 f"idempotence residual = {report['idempotence_residual']}",
                 f"commutant residual   = {report['commutant_residual']} "
                 f"({args.unitaries} Haar unitaries)"]
        for entry in report["element"]["terms"]:
            coeff = entry["coeff"]
            val = " + ".join(f"({c['re']:.6g}{c['im']:+.6g}i) d^{c['power']}" for c in coeff)
            lines.append(f"  [{val}]  {entry['diagram']}")
        if "map_output_min_eig" in report:
            lines.append(f"map on {report['map_inputs']} random PSD inputs: "
                         f"output min eigenvalue = {report['map_output_min_eig']}")
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_scan_bcs(args) -> int:
    cfg = config_from_args(args)
    try:
        alphas = _parse_range(args.alpha)
        betas = _parse_range(args.beta)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    budget = ent.SearchBudget(restarts=args.restarts, seed=cfg.seed)
    rows = ent.scan_bcs_region(alphas, betas, args.d, budget,
                               parallelism=max(1, cfg.parallelism))
    lines = ["alpha,beta,analytic_positive,min_eig,product_min,class"]
    for r in rows:
        lines.append(",".join([
            _fmt(r["alpha"]), _fmt(r["beta"]), str(r["analytic_positive"]).lower(),
            _fmt(r["min_eig"]), _fmt(r["product_min"]), r["class"]]))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_werner_ppt(args) -> int:
    cfg = config_from_args(args)
    try:
        rs = tuple(float(tok) for tok in args.r.split(","))
        if len(rs) != 6:
            raise ValueError("expected 6 comma-separated values r+,r-,r0,r1,r2,r3")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    checks, overall = ent.werner_ppt_conditions(rs)
    params = ent.WernerParams.from_rs(rs, args.d)
    valid = params.is_valid_state()
    rho = ent.werner_state(params)
    min_eig = dense_ops.min_eigenvalue(dense_ops.partial_transpose(rho, (1,)))
    eig_ppt = min_eig >= -1e-8
    payload = {
        "r": [_fmt(x) for x in rs],
        "d": args.d,
        "valid_state": valid,
        "conditions": dict(zip(
            ["r_minus_nonneg", "symmetric_sector", "block_diag_1", "block_diag_2",
             "block_determinant_f1", "antisymmetric_sector"], checks)),
        "overall": overall,
        "min_eig_partial_transpose_1": _fmt(min_eig),
        "eigencheck_ppt": eig_ppt,
        "consistent": (overall == eig_ppt) if valid else None,
    }
    _emit(json.dumps(payload, sort_keys=True, indent=2), args.out)
    if valid and overall != eig_ppt:
        instance = {
            "r": list(rs),
            "analytic": overall,
            "eigencheck": eig_ppt,
            "partial_transpose_matrix": dense_ops.matrix_to_json_rows(
                dense_ops.partial_transpose(rho, (1,)).mat),
        }
        print("contradiction between the analytic conditions and the eigencheck:",
              file=sys.stderr)
        print(json.dumps(instance, sort_keys=True), file=sys.stderr)
        return 2
    return 0


def cmd_ew_maps(args) -> int:
    cfg = config_from_args(args)
    rows = ent.F_ROWS + ent.G_ROWS if args.row == "all" else (args.row,)
    bad = [r for r in rows if r not in ent.F_ROWS + ent.G_ROWS]
    if bad:
        print(f"error: unknown rows {bad}; valid: {ent.F_ROWS + ent.G_ROWS}", file=sys.stderr)
        return 1
    rng = np.random.default_rng(cfg.seed)
    results = {}
    worst = 0.0
    for row in rows:
        max_dev = 0.0
        for _ in range(args.instances):
            params = ent.random_valid_werner(rng, args.d)
            a = dense_ops.random_matrix(args.d, 1, rng)
            b = dense_ops.random_matrix(args.d, 1, rng)
            closed = ent.eggeling_werner_map(row, params, a, b if row.startswith("g") else None)
            trace = ent.eggeling_werner_map_trace(row, params, a,
                                                  b if row.startswith("g") else None)
            max_dev = max(max_dev, dense_ops.sup_norm(closed.mat - trace.mat))
        results[row] = max_dev
        worst = max(worst, max_dev)
    payload = {
        "d": args.d, "instances": args.instances, "seed": cfg.seed,
        "deviation": {row: _fmt(dev) for row, dev in results.items()},
        "tolerance": _fmt(cfg.tolerance),
        "passed": worst < cfg.tolerance,
    }
    _emit(json.dumps(payload, sort_keys=True, indent=2), args.out)
    return 0 if worst < cfg.tolerance else 2


def cmd_compose(args) -> int:
    try:
        a = parse_diagram(args.left, args.n)
        b = parse_diagram(args.right, args.n)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    diag, loops = compose_diagrams(a, b)
    print(f"left   : {diagram_to_text(a)}")
    print(f"right  : {diagram_to_text(b)}")
    print(f"product: {diagram_to_text(diag)}")
    print(f"loops  : {loops}  (coefficient d^{loops})")
    return 0


# ---------------------------------------------------------------------------
# parser wiring
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wba", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tolerance", type=float, default=1e-10)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--parallelism", type=int, default=1)
    common.add_argument("--out", default=None, help="write output to this file atomically")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-props", parents=[common],
                       help="closed forms vs contraction oracle")
    p.add_argument("--only", default=None, help="run only case groups with this prefix")
    p.add_argument("--tuples", type=int, default=20)
    p.set_defaults(func=cmd_verify_props)

    p = sub.add_parser("projector", parents=[common],
                       help="build an irreducible walled-Brauer projector")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--mu", required=True, help='partition of n-k, e.g. "[2,1]"')
    p.add_argument("--alpha", required=True, help='partition of n-2k, e.g. "[2]"')
    p.add_argument("--unitaries", type=int, default=20)
    p.add_argument("--emit-map", type=int, default=None, metavar="INPUTS",
                   help="evaluate the induced map on this many random PSD inputs")
    p.set_defaults(func=cmd_projector)

    p = sub.add_parser("scan-bcs", parents=[common],
                       help="scan the kernel family over an (alpha, beta) grid")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--alpha", required=True, help="range start:stop:step")
    p.add_argument("--beta", required=True, help="range start:stop:step")
    p.add_argument("--restarts", type=int, default=16)
    p.set_defaults(func=cmd_scan_bcs)

    p = sub.add_parser("werner-ppt", parents=[common],
                       help="analytic partial-transpose conditions vs eigencheck")
    p.add_argument("--r", required=True, help='six values "r+,r-,r0,r1,r2,r3"')
    p.add_argument("--d", type=int, default=3)
    p.set_defaults(func=cmd_werner_ppt)

    p = sub.add_parser("ew-maps", parents=[common],
                       help="closed-form invariant-state maps vs trace definition")
    p.add_argument("--row", default="all",
                   help="one of f1,f2,f3,f12,f13,f23,g1,...,g23 or 'all'")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--instances", type=int, default=50)
    p.set_defaults(func=cmd_ew_maps)

    p = sub.add_parser("compose", parents=[common],
                       help="diagram calculator: product and loop count")
    p.add_argument("left", help='diagram text, e.g. "(1 2)^T{2}"')
    p.add_argument("right")
    p.add_argument("--n", type=int, required=True, help="number of sites")
    p.set_defaults(func=cmd_compose)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
