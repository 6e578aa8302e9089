"""Command-line front end: solves, reference trajectories, tables, studies, fields."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .analysis import (
    WedgeFieldConfig,
    compute_K,
    duality_pairing_check,
    error_norms,
    make_report,
    wedge_fields,
)
from .basis import hermite_family
from .meshing import build_dofmap, build_mesh, jh_constraints
from .model_problem import (
    GALERKIN,
    LEAST_SQUARES,
    ModelConfig,
    exact_pair,
    solve_model,
)
from .quadrature import gauss_legendre, required_points
from .shooting import ShootingError, evaluate_reference, shoot
from .solver import (
    FluidProps,
    JhProblem,
    SingularMatrixError,
    SolverOptions,
    assemble_jacobian,
    assemble_residual,
    newton_solve,
)

CSV_FMT = "{:.16e}"  # 17 significant digits
PRETTY_FMT = "{:.10e}"  # 11 significant digits


@dataclass(frozen=True)
class RunConfig:
    command: str
    re: float = 0.0
    alpha_deg: float = 15.0
    order: int = 4
    n_elem: int = 320
    newton_tol: float = 1e-12
    shoot_tol: float = 1e-13
    output: str = "pretty"
    out_path: str | None = None


def jh_threads() -> int:
    raw = os.environ.get("JH_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _parallel_map(fn, items):
    items = list(items)
    workers = min(jh_threads(), max(1, len(items)))
    if workers == 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _parse_int_list(text: str) -> list[int]:
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _usage_error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def _problem(args) -> JhProblem:
    return JhProblem(args.re, math.radians(args.alpha_deg))


def _solve_case(args):
    problem = _problem(args)
    fem = newton_solve(
        problem,
        build_mesh(args.nelem),
        hermite_family(args.order),
        SolverOptions(tol=args.newton_tol),
    )
    return problem, fem


def _report_nonconvergence(fem) -> int:
    print("newton iteration did not converge; residual-norm history:", file=sys.stderr)
    for i, rn in enumerate(fem.norm_history):
        print(f"  iter {i}: {rn:.3e}", file=sys.stderr)
    return 1


def _config_echo(args, command: str) -> dict:
    cfg = RunConfig(
        command=command,
        re=getattr(args, "re", 0.0),
        alpha_deg=getattr(args, "alpha_deg", 15.0),
        order=getattr(args, "order", 4),
        n_elem=getattr(args, "nelem", 320),
        newton_tol=getattr(args, "newton_tol", 1e-12),
        shoot_tol=getattr(args, "shoot_tol", 1e-13),
        output=getattr(args, "output", "pretty"),
        out_path=getattr(args, "out", None),
    )
    return asdict(cfg)


def _rows_text(header: list[str], rows: list[list], args, command: str) -> str:
    if args.output == "csv":
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(CSV_FMT.format(v) if isinstance(v, float) else str(v) for v in row))
        return "\n".join(lines) + "\n"
    if args.output == "json":
        payload = {
            "config": _config_echo(args, command),
            "rows": [dict(zip(header, row)) for row in rows],
        }
        return json.dumps(payload, indent=2) + "\n"
    widths = [max(len(h), 18) for h in header]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    for row in rows:
        cells = [
            (PRETTY_FMT.format(v) if isinstance(v, float) else str(v)).rjust(w)
            for v, w in zip(row, widths)
        ]
        lines.append("  ".join(cells))
    return "\n".join(lines) + "\n"


def cmd_solve(args) -> int:
    problem, fem = _solve_case(args)
    if not fem.converged:
        return _report_nonconvergence(fem)
    dofmap = build_dofmap(fem.mesh, fem.family, jh_constraints())
    fp1 = fem.fp_right()
    k_val = compute_K(problem, fp1)
    header = [
        "re",
        "alpha_deg",
        "order",
        "n_elem",
        "n_dofs",
        "n_constrained",
        "newton_iters",
        "residual_norm",
        "fp1",
        "K",
    ]
    row = [
        float(args.re),
        float(args.alpha_deg),
        args.order,
        args.nelem,
        dofmap.n_global,
        len(dofmap.constraints),
        fem.newton_iters,
        float(fem.final_residual_norm),
        fp1,
        k_val,
    ]
    _emit(_rows_text(header, [row], args, "solve"), args.out)
    return 0


def cmd_reference(args) -> int:
    problem = _problem(args)
    ref = shoot(problem, end_tol=args.shoot_tol)
    header = ["eta", "f", "fp", "fpp"]
    rows = [
        [float(e), float(st[0]), float(st[1]), float(st[2])]
        for e, st in zip(ref.grid, ref.states)
    ]
    _emit(_rows_text(header, rows, args, "reference"), args.out)
    return 0


def cmd_table(args) -> int:
    problem, fem = _solve_case(args)
    if not fem.converged:
        return _report_nonconvergence(fem)
    n_rows = int(round(1.0 / args.eta_step))
    etas = np.linspace(0.0, 1.0, n_rows + 1)
    f_vals = fem.evaluate(etas)[0]
    header = ["eta", "f"]
    rows = [[float(e), float(v)] for e, v in zip(etas, f_vals)]
    _emit(_rows_text(header, rows, args, "table"), args.out)
    return 0


def _convergence_csv(report) -> str:
    lines = ["n_elem,n_nodes,l2_error,h1_error"]
    for row in report.rows:
        lines.append(
            f"{row.n_elem},{row.n_elem + 1},"
            f"{CSV_FMT.format(row.l2)},{CSV_FMT.format(row.h1)}"
        )
    return "\n".join(lines) + "\n"


def _suffixed_path(path: str, suffix: str) -> str:
    root, ext = os.path.splitext(path)
    return f"{root}_{suffix}{ext or '.csv'}"


def _emit_reports(reports, labels, args) -> int:
    for report, label in zip(reports, labels):
        text = _convergence_csv(report)
        if args.out:
            _emit(text, _suffixed_path(args.out, label))
        else:
            sys.stdout.write(f"# {label}\n{text}")
        print(
            f"{label}: slope_l2 = {report.slope_l2:.3f}, slope_h1 = {report.slope_h1:.3f}",
            file=sys.stderr if args.out is None else sys.stdout,
        )
    return 0


def cmd_convergence(args) -> int:
    problem = _problem(args)
    orders = _parse_int_list(args.orders)
    nelems = sorted(_parse_int_list(args.nelems))
    ref = shoot(problem, end_tol=args.shoot_tol)
    cells = [(p, n) for p in orders for n in nelems]

    def solve_cell(cell):
        p, n = cell
        fem = newton_solve(
            problem, build_mesh(n), hermite_family(p), SolverOptions(tol=args.newton_tol)
        )
        if not fem.converged:
            raise SingularMatrixError(
                f"no convergence at p={p}, N={n}: residual {fem.final_residual_norm:.3e}"
            )
        return error_norms(fem, ref, gauss_legendre(min(16, p + 4)))

    results = _parallel_map(solve_cell, cells)
    reports = []
    labels = []
    for p in orders:
        rows = [r for (pp, _n), r in zip(cells, results) if pp == p]
        reports.append(make_report(f"re{args.re}_alpha{args.alpha_deg}", p, rows))
        labels.append(f"p{p}")
    return _emit_reports(reports, labels, args)


def cmd_model(args) -> int:
    formulation = LEAST_SQUARES if args.formulation == "least-squares" else GALERKIN
    orders = _parse_int_list(args.orders)
    nelems = sorted(_parse_int_list(args.nelems))
    rule = gauss_legendre(12)
    cells = [(p, n) for p in orders for n in nelems]

    def solve_cell(cell):
        p, n = cell
        fem = solve_model(
            ModelConfig(degree=p, n_elem=n, formulation=formulation),
            SolverOptions(tol=args.newton_tol, max_iter=10),
        )
        return error_norms(fem, exact_pair, rule)

    results = _parallel_map(solve_cell, cells)
    reports = []
    labels = []
    for p in orders:
        rows = [r for (pp, _n), r in zip(cells, results) if pp == p]
        reports.append(make_report(f"model-{formulation}", p, rows))
        labels.append(f"{formulation}_p{p}")
    return _emit_reports(reports, labels, args)


def cmd_fields(args) -> int:
    if args.r1 <= 0 or args.r2 < args.r1:
        return _usage_error("need 0 < r1 <= r2")
    if args.nr < 1 or args.ntheta < 2:
        return _usage_error("need nr >= 1 and ntheta >= 2")
    fluid = FluidProps(nu=args.nu, rho=args.rho)
    problem = JhProblem(args.re, math.radians(args.alpha_deg), fluid)
    fem = newton_solve(
        problem,
        build_mesh(args.nelem),
        hermite_family(args.order),
        SolverOptions(tol=args.newton_tol),
    )
    if not fem.converged:
        return _report_nonconvergence(fem)
    k_val = compute_K(problem, fem.fp_right())
    cfg = WedgeFieldConfig(
        problem=problem, fluid=fluid, p_star=args.pin, K=k_val, lam=problem.lam
    )
    r_vals = np.linspace(args.r1, args.r2, args.nr)
    t_vals = np.linspace(-problem.alpha, problem.alpha, args.ntheta)
    points = [(r, t) for r in r_vals for t in t_vals]
    out = wedge_fields(cfg, fem, points)
    header = ["r", "theta", "u_r", "p"]
    rows = [
        [float(r), float(t), float(u), float(pv)]
        for (r, t), (u, pv) in zip(points, out)
    ]
    _emit(_rows_text(header, rows, args, "fields"), args.out)
    return 0


def cmd_check(args) -> int:
    failures = 0

    def report(name: str, ok: bool, detail: str):
        nonlocal failures
        status = "PASS" if ok else "FAIL"
        print(f"{status} {name}: {detail}")
        if not ok:
            failures += 1

    # quadrature exactness sweep
    worst = 0.0
    for n in range(1, 17):
        rule = gauss_legendre(n)
        for k in range(0, 2 * n):
            err = abs(rule.integrate(rule.points**k) - 1.0 / (k + 1))
            worst = max(worst, err)
    report("quadrature exactness", worst < 1e-13, f"max monomial error {worst:.2e}")

    # Jacobian vs finite differences on the requested case
    problem = _problem(args)
    mesh = build_mesh(min(args.nelem, 8))
    family = hermite_family(args.order)
    dofmap = build_dofmap(mesh, family, jh_constraints())
    rule = gauss_legendre(required_points(args.order))
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(5):
        coeffs = rng.standard_normal(dofmap.n_global)
        jac = assemble_jacobian(problem, dofmap, coeffs, rule).to_dense()
        fd = np.empty_like(jac)
        for j in range(dofmap.n_global):
            step = 1e-6 * max(1.0, abs(coeffs[j]))
            up = coeffs.copy()
            up[j] += step
            dn = coeffs.copy()
            dn[j] -= step
            fd[:, j] = (
                assemble_residual(problem, dofmap, up, rule)
                - assemble_residual(problem, dofmap, dn, rule)
            ) / (2 * step)
        denom = np.maximum(1.0, np.abs(jac))
        worst = max(worst, float(np.max(np.abs(jac - fd) / denom)))
    report("jacobian finite differences", worst < 1e-6, f"max deviation {worst:.2e}")

    # duality identity on a converged solve
    fem = newton_solve(problem, build_mesh(args.nelem), family, SolverOptions(tol=args.newton_tol))
    if fem.converged:
        lhs, rhs, diff = duality_pairing_check(fem, problem)
        report("duality pairing identity", abs(diff) <= 1e-9, f"|lhs - rhs| = {abs(diff):.2e}")
        bc_ok = (
            fem.coeffs[0] == 1.0
            and fem.coeffs[1] == 0.0
            and fem.coeffs[2 * fem.mesh.n_elem] == 0.0
        )
        report("boundary conditions", bc_ok, "direct DOF reads")
    else:
        report("duality pairing identity", False, "solve did not converge")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wedgeflow",
        description="Wedge-flow profile solver (C1 Hermite FEM) with shooting cross-validation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, nelem_default=320, order_default=4):
        sp.add_argument("--re", type=float, default=0.0, help="Reynolds number")
        sp.add_argument("--alpha-deg", type=float, default=15.0, help="half-angle in degrees")
        sp.add_argument("--order", type=int, default=order_default)
        sp.add_argument("--nelem", type=int, default=nelem_default)
        sp.add_argument("--newton-tol", type=float, default=1e-12)
        sp.add_argument("--shoot-tol", type=float, default=1e-13)
        sp.add_argument("--output", choices=("csv", "json", "pretty"), default="pretty")
        sp.add_argument("--out", default=None, help="output path (default: stdout)")

    sp = sub.add_parser("solve", help="solve one case; print DOF summary, f'(1), K")
    add_common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("reference", help="write the dense shooting trajectory")
    add_common(sp)
    sp.set_defaults(func=cmd_reference, output="csv")

    sp = sub.add_parser("table", help="tabulate f(eta) on a uniform eta grid")
    add_common(sp)
    sp.add_argument("--eta-step", type=float, default=0.1)
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("convergence", help="mesh-refinement study against the oracle")
    add_common(sp)
    sp.add_argument("--orders", default="3,4")
    sp.add_argument("--nelems", default="20,40,80,160,320")
    sp.set_defaults(func=cmd_convergence)

    sp = sub.add_parser("model", help="first-order model problem study")
    add_common(sp, nelem_default=128, order_default=1)
    sp.add_argument("--orders", default="1..5")
    sp.add_argument("--nelems", default="8,16,32,64,128")
    sp.add_argument(
        "--formulation", choices=("galerkin", "least-squares"), default="galerkin"
    )
    sp.set_defaults(func=cmd_model)

    sp = sub.add_parser("fields", help="export (r, theta, u_r, p) wedge samples")
    add_common(sp)
    sp.add_argument("--r1", type=float, required=True)
    sp.add_argument("--r2", type=float, required=True)
    sp.add_argument("--nr", type=int, required=True)
    sp.add_argument("--ntheta", type=int, required=True)
    sp.add_argument("--nu", type=float, required=True, help="kinematic viscosity")
    sp.add_argument("--rho", type=float, required=True, help="density")
    sp.add_argument("--pin", type=float, default=0.0, help="pinned pressure constant p*")
    sp.set_defaults(func=cmd_fields)

    sp = sub.add_parser("check", help="run the invariant suite")
    add_common(sp, nelem_default=40)
    sp.set_defaults(func=cmd_check)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    if hasattr(args, "alpha_deg") and not (0.0 < args.alpha_deg < 90.0):
        return _usage_error(f"alpha-deg must lie in (0, 90), got {args.alpha_deg}")
    if hasattr(args, "order") and args.command not in ("model",) and args.order not in (3, 4, 5):
        return _usage_error(f"order must be 3, 4, or 5 for Hermite solves, got {args.order}")
    if hasattr(args, "nelem") and args.nelem < 1:
        return _usage_error("nelem must be positive")
    try:
        return args.func(args)
    except (ShootingError, SingularMatrixError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        return _usage_error(str(exc))


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
