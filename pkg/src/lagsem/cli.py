"""Command-line driver: run expansions and convergence studies, emit CSV/JSON.

Commands
--------
expand-exponential    scalar Laguerre expansion of e^{-at}
approximate-semigroup truncated operator series vs the exact semigroup oracle
rate-study            error-vs-m table with fitted log-log slope
resolvent-series      resolvent reconstruction from half-shifted solves
kernel-coefficients   Gaussian/Poisson kernel coefficients a_n with checks

Exit codes: 0 success, 1 usage error, 2 numeric failure, 3 assertion failure.
Floats are printed with 17 significant digits so emitted CSV re-parses to the
same bits.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional

import numpy as np

from .laguerre import laguerre_poly_sequence
from .operators import (
    SemigroupOracle,
    convolution_kernel,
    dense_operator,
    expm_oracle,
    kernel_coefficient_a_n,
    kernel_fourier_residuals,
    multiplication_operator,
    multiplication_semigroup_oracle,
    read_matrix_file,
    shift_operator,
    shift_semigroup_oracle,
)
from .quadrature import AccuracyError, laguerre_function, numeric_lp_norm
from .semigroup import (
    _fit_slope,
    _kahan_partial_sums,
    compute_coefficients,
    rate_study,
    resolvent_series,
    vector_norm,
)

USAGE_ERROR, NUMERIC_ERROR, ASSERTION_ERROR = 1, 2, 3

Q_KINDS = {
    "neg_square": lambda s: -(s ** 2),
    "neg_abs": lambda s: -np.abs(s),
    "neg_log1p_square": lambda s: -np.log1p(s ** 2),
    "neg_log1p": lambda s: -np.log1p(s),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(USAGE_ERROR)


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def write_table(header: list[str], rows: list[tuple], fmt: str, out: Optional[str]) -> None:
    if fmt == "json":
        def plain(v):
            return int(v) if isinstance(v, (int, np.integer)) else float(v)

        payload = [dict(zip(header, (plain(v) for v in row))) for row in rows]
        text = json.dumps(payload, indent=2) + "\n"
    else:
        lines = [",".join(header)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_summary(summary: dict) -> None:
    sys.stderr.write(json.dumps(summary) + "\n")


def _parse_grid(text: str) -> np.ndarray:
    try:
        n_str, l_str = text.split(":")
        n, length = int(n_str), float(l_str)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"--grid expects N:L, got {text!r}") from exc
    if n < 2 or length <= 0:
        raise argparse.ArgumentTypeError("--grid needs N >= 2 and L > 0")
    return np.linspace(0.0, length, n)


def _add_operator_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--matrix-file", help="dense matrix file (first line n, then n rows)")
    p.add_argument("--diag", help="comma-separated diagonal of A, e.g. 1,2,5")
    p.add_argument("--q-kind", choices=sorted(Q_KINDS), help="multiplication symbol q(s)")
    p.add_argument("--shift", action="store_true", help="translation semigroup on --grid")
    p.add_argument("--grid", type=_parse_grid, help="uniform grid N:L for q-kind/shift operators")
    p.add_argument("--x-kind", choices=["ones", "bump", "random"], default="ones")
    p.add_argument("--seed", type=int, default=0, help="seed for --x-kind random")


def _build_x(kind: str, grid: Optional[np.ndarray], dim: int, seed: int) -> np.ndarray:
    if kind == "ones":
        return np.ones(dim)
    if kind == "bump":
        if grid is None:
            grid = np.linspace(0.0, 1.0, dim)
        center, width = grid[-1] / 3.0, grid[-1] / 12.0
        return np.exp(-(((grid - center) / width) ** 2))
    return np.random.default_rng(seed).standard_normal(dim)


def _build_operator(args):
    """Returns (operator, oracle, grid_or_None)."""
    chosen = [bool(args.matrix_file), bool(args.diag), bool(args.q_kind), bool(args.shift)]
    if sum(chosen) != 1:
        _usage("choose exactly one of --matrix-file/--diag/--q-kind/--shift")
    if args.matrix_file:
        matrix = read_matrix_file(args.matrix_file)
        return dense_operator(matrix), expm_oracle(matrix), None
    if args.diag:
        from .operators import DiagonalOperator

        values = np.array([float(v) for v in args.diag.split(",")])
        oracle = SemigroupOracle(eval=lambda t, x: np.exp(-t * values) * np.asarray(x, float),
                                 description="diagonal semigroup")
        return DiagonalOperator(values), oracle, None
    if args.grid is None:
        _usage("--q-kind/--shift require --grid N:L")
    if args.q_kind:
        q = Q_KINDS[args.q_kind](args.grid)
        return multiplication_operator(q), multiplication_semigroup_oracle(q), args.grid
    op = shift_operator(args.grid.size, float(args.grid[-1]))
    return op, shift_semigroup_oracle(args.grid), args.grid


def _usage(message: str):
    sys.stderr.write(f"error: {message}\n")
    raise SystemExit(USAGE_ERROR)


def cmd_expand_exponential(args) -> int:
    if args.a is None or args.a <= 0:
        _usage("expand-exponential requires --a > 0")
    a, alpha = args.a, args.alpha
    ts = args.t or [1.0]
    # coefficients a^n/(a+1)^{n+alpha+1}, built in log space
    log_ratio, log_a1 = math.log(a) - math.log1p(a), math.log1p(a)
    weights = np.exp(np.arange(args.m_max + 1) * log_ratio - (alpha + 1.0) * log_a1)
    rows = []
    for t in ts:
        lag = laguerre_poly_sequence(args.m_max, alpha, float(t))
        partial = np.cumsum(weights * lag)
        exact = math.exp(-a * t)
        rows += [(m, float(t), float(partial[m]), abs(exact - float(partial[m])))
                 for m in range(args.m_max + 1)]
    write_table(["m", "t", "partial_sum", "abs_error"], rows, args.format, args.out)
    return 0


def cmd_approximate_semigroup(args) -> int:
    op, oracle, grid = _build_operator(args)
    x = _build_x(args.x_kind, grid, op.dim, args.seed)
    ts = args.t or [1.0]
    norm = "sup" if grid is not None else "l2"
    coeffs = compute_coefficients(op, x, args.alpha, args.m_max)
    rows = []
    errs_first_t = None
    final_errors = []
    for t in ts:
        lag = laguerre_poly_sequence(coeffs.m, coeffs.alpha, float(t))
        _, snaps = _kahan_partial_sums(coeffs.vectors, lag, record_at=range(coeffs.m + 1))
        reference = oracle.eval(t, x)
        errs = np.array([vector_norm(reference - snaps[m], norm) for m in range(coeffs.m + 1)])
        rows += [(m, float(t), float(errs[m])) for m in range(coeffs.m + 1)]
        if errs_first_t is None:
            errs_first_t = errs
        final_errors.append(float(errs[-1]))
    slope = _fit_slope(np.arange(1.0, args.m_max + 1.0), errs_first_t[1:])
    write_table(["m", "t", "error"], rows, args.format, args.out)
    _emit_summary({"fitted_slope": slope, "final_error": max(final_errors)})
    return 0


def cmd_rate_study(args) -> int:
    op, oracle, grid = _build_operator(args)
    x = _build_x(args.x_kind, grid, op.dim, args.seed)
    t = (args.t or [1.0])[0]
    m_list = []
    m = args.m_max
    while m >= 4:
        m_list.append(m)
        m //= 2
    m_list = sorted(set(m_list))
    record = rate_study(op, oracle, x, args.alpha, t, m_list, p=args.p,
                        norm="sup" if grid is not None else "l2")
    write_table(["m", "t", "error"], record.rows, args.format, args.out)
    summary = {"fitted_slope": record.fitted_slope, "final_error": record.rows[-1][2]}
    if record.power_norm is not None:
        summary["power_norm"] = record.power_norm
    _emit_summary(summary)
    if args.assert_slope is not None:
        slack = 0.25
        if not (record.fitted_slope <= args.assert_slope + slack):
            sys.stderr.write(
                f"slope assertion failed: fitted {record.fitted_slope:.3f} > "
                f"{args.assert_slope} + {slack}\n"
            )
            return ASSERTION_ERROR
    return 0


def cmd_resolvent_series(args) -> int:
    op, oracle, grid = _build_operator(args)
    if args.a is None or args.a <= 0:
        _usage("resolvent-series requires --a > 0")
    x = _build_x(args.x_kind, grid, op.dim, args.seed)
    direct = op.shift_solve(args.a, x)
    _, snaps = resolvent_series(op, args.a, x, args.m_max, record_at=range(args.m_max + 1))
    rows = [(m, vector_norm(snaps[m] - direct, "l2")) for m in range(args.m_max + 1)]
    write_table(["m", "error"], rows, args.format, args.out)
    return 0


def cmd_kernel_coefficients(args) -> int:
    from scipy.integrate import simpson

    from .operators import kernel_coefficient_profile

    kernel = convolution_kernel(args.kernel, args.kernel_dim)
    alpha = args.alpha
    s_values = args.s or [0.5, 1.0, 2.0]
    xi_grid = [0.5, 1.0, 1.5, 2.0, 3.0]
    u = np.linspace(1e-6, 80.0, 4001)
    rows = []
    for n in range(args.m_max + 1):
        residual_max = float(np.max(kernel_fourier_residuals(kernel, (n, alpha), xi_grid)))
        profile = kernel_coefficient_profile(kernel, (n, alpha), u)
        a_l1 = 2.0 * simpson(np.abs(profile), x=u)
        ell_l1 = numeric_lp_norm(laguerre_function((n, alpha)), 1.0,
                                 abs_tol=1e-11, rel_tol=1e-10)
        for s in s_values:
            rows.append((n, float(s), kernel_coefficient_a_n(kernel, (n, alpha), s),
                         residual_max, a_l1, ell_l1))
    write_table(["n", "s", "a_n", "fourier_residual_max", "a_l1", "ell_l1_bound"],
                rows, args.format, args.out)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="lagsem", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--alpha", type=float, default=0.0)
        p.add_argument("--m-max", type=int, default=200)
        p.add_argument("--t", type=float, action="append")
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--out", help="output path (stdout when omitted)")

    p = sub.add_parser("expand-exponential", help="scalar expansion of e^{-at}")
    common(p)
    p.add_argument("--a", type=float)
    p.set_defaults(func=cmd_expand_exponential)

    p = sub.add_parser("approximate-semigroup", help="operator series vs exact oracle")
    common(p)
    _add_operator_flags(p)
    p.set_defaults(func=cmd_approximate_semigroup)

    p = sub.add_parser("rate-study", help="convergence rates with fitted slope")
    common(p)
    _add_operator_flags(p)
    p.add_argument("--p", type=int, help="record |A^p x| alongside the study")
    p.add_argument("--assert-slope", type=float,
                   help="exit 3 unless fitted slope <= S + 0.25")
    p.set_defaults(func=cmd_rate_study)

    p = sub.add_parser("resolvent-series", help="resolvent from half-shifted solves")
    common(p)
    _add_operator_flags(p)
    p.add_argument("--a", type=float)
    p.set_defaults(func=cmd_resolvent_series)

    p = sub.add_parser("kernel-coefficients", help="Gaussian/Poisson a_n table")
    common(p)
    p.add_argument("--kernel", choices=["gaussian", "poisson"], required=True)
    p.add_argument("--kernel-dim", type=int, default=1)
    p.add_argument("--s", type=float, action="append", help="evaluation distances")
    p.set_defaults(func=cmd_kernel_coefficients)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (AccuracyError, np.linalg.LinAlgError, OverflowError, FloatingPointError) as exc:
        sys.stderr.write(f"numeric failure: {exc}\n")
        return NUMERIC_ERROR
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return NUMERIC_ERROR


if __name__ == "__main__":
    sys.exit(main())
