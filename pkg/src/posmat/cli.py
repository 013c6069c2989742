"""Command-line front end.

Exit codes: 0 on success or a passing verdict, 1 on a failing (or still
indeterminate) verdict, 2 on usage, parse and domain errors.  Every flag can
also be set through an environment variable named ``POSMAT_<FLAG>``, for
example ``POSMAT_PRECISION=256``; explicit flags win.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from . import combinatorics as comb
from . import factorizations as fz
from . import matrixlab as ml
from . import positivity as pos
from .matrix import Matrix, MatrixFormatError, identity, ingest_matrix, to_csv, to_dict
from .numerics import DEFAULT_PRECISION, INDETERMINATE, PASS, DomainError, HPReal, format_rational
from .reproduce import reproduce_paper

ENV_PREFIX = "POSMAT_"
SCHEMA = 1


class UsageError(Exception):
    pass


def _env(name: str, default):
    return os.environ.get(ENV_PREFIX + name.upper(), default)


# ---------------------------------------------------------------------------
# matrix selection


def _int_list(text: str | None, what: str):
    if not text:
        raise UsageError(f"--{what} is required for this family")
    return [int(x) for x in text.split(",")]


def _real_list(text: str | None, what: str):
    if not text:
        raise UsageError(f"--{what} is required for this family")
    return [x.strip() for x in text.split(",")]


def build_family(args) -> Matrix:
    fam, n, prec = args.family, args.n, args.precision
    sized = {
        "pascal": ml.pascal_matrix,
        "beta": ml.beta_matrix,
        "cauchy": ml.cauchy_matrix,
        "stirling1": lambda k: ml.stirling_matrix(ml.FIRST, k),
        "stirling2": lambda k: ml.stirling_matrix(ml.SECOND, k),
        "sym-stirling1": lambda k: ml.symmetrized_stirling(ml.FIRST, k),
        "sym-stirling2": lambda k: ml.symmetrized_stirling(ml.SECOND, k),
        "bell": ml.bell_matrix,
        "bell-shifted": lambda k: ml.delete_rc(ml.bell_matrix(k), k, 1),
        "bell-triangle": ml.bell_triangle_matrix,
        "bell-triangle-shifted": ml.shifted_bell_triangle_matrix,
        "factorial-hankel": ml.factorial_hankel,
        "beta-inverse": fz.beta_inverse_closed,
        "identity": identity,
        "ones": ml.ones,
    }
    if fam in sized:
        if n is None:
            raise UsageError(f"--n is required for family {fam!r}")
        minimum = 0 if fam in ("pascal", "factorial-hankel") else (2 if fam in ("bell-shifted", "bell-triangle-shifted") else 1)
        if n < minimum:
            raise UsageError(f"--n must be at least {minimum} for family {fam!r}")
        return sized[fam](n)
    if fam == "y-k":
        if n is None or args.k is None:
            raise UsageError("family 'y-k' needs --n and --k")
        return fz.y_k(n, args.k)
    if fam == "beta-indices":
        return ml.beta_matrix_on(_int_list(args.lambdas, "lambdas"))
    if fam in ("gamma", "beta-recip"):
        lam = _real_list(args.lambdas, "lambdas")
        mu = _real_list(args.mus, "mus") if args.mus else lam
        if fam == "gamma":
            return ml.gamma_matrix(lam, mu, prec)
        exact = all(_is_int(x) for x in lam + mu)
        if exact:
            return ml.beta_recip_matrix([int(x) for x in lam], [int(x) for x in mu], prec)
        return ml.beta_recip_matrix(lam, mu, prec)
    raise UsageError(f"unknown family {fam!r}")


def _is_int(text: str) -> bool:
    try:
        int(text)
        return True
    except ValueError:
        return False


FAMILIES = [
    "pascal", "beta", "cauchy", "stirling1", "stirling2", "sym-stirling1", "sym-stirling2",
    "bell", "bell-shifted", "bell-triangle", "bell-triangle-shifted", "factorial-hankel",
    "beta-inverse", "identity", "ones", "y-k", "beta-indices", "gamma", "beta-recip",
]

SEQUENCES = {
    "factorial": lambda n: [comb.factorial(k) for k in range(n + 1)],
    "bell": lambda n: [comb.bell_number(k) for k in range(n + 1)],
    "binomial": lambda n: [comb.binomial(n, k) for k in range(n + 1)],
    "stirling1": lambda n: [comb.stirling_first_unsigned(n, k) for k in range(n + 1)],
    "stirling2": lambda n: [comb.stirling_second(n, k) for k in range(n + 1)],
}


def select_matrix(args) -> Matrix:
    if getattr(args, "input", None):
        return ingest_matrix(args.input, args.input_format)
    if not args.family:
        raise UsageError("give --family or --input")
    return build_family(args)


# ---------------------------------------------------------------------------
# output


def _emit(payload: dict, text: str, fmt: str, out, csv_rows=None):
    if fmt == "json":
        out.write(json.dumps({"schema": SCHEMA, **payload}, indent=2) + "\n")
    elif fmt == "csv":
        if csv_rows is None:
            csv_rows = [[k, json.dumps(v) if isinstance(v, (dict, list)) else v] for k, v in payload.items()]
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(csv_rows)
        out.write(buf.getvalue())
    else:
        out.write(text.rstrip("\n") + "\n")


def _scalar_text(x) -> str:
    if isinstance(x, HPReal):
        return str(x)
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else format_rational(x)


def _emit_matrix(A: Matrix, fmt: str, out, label: str = "matrix"):
    if fmt == "json":
        out.write(json.dumps({"schema": SCHEMA, **to_dict(A)}) + "\n")
    elif fmt == "csv":
        out.write(to_csv(A))
    else:
        out.write(A.pretty() + "\n")


def _report_text(rep: pos.CheckReport) -> str:
    lines = [f"verdict: {rep.verdict}", f"method: {rep.method}"]
    if rep.witness:
        w = rep.witness
        lines.append(
            "witness: "
            + ", ".join(f"{k}={pos._jsonable(v)}" for k, v in w.items())
        )
    if rep.precision_bits:
        lines.append(f"precision_bits: {rep.precision_bits}")
    return "\n".join(lines)


def _report_exit(rep: pos.CheckReport) -> int:
    return 0 if rep.verdict == PASS else 1


# ---------------------------------------------------------------------------
# commands


def cmd_gen(args, out) -> int:
    if args.sequence:
        if args.n is None or args.n < 0:
            raise UsageError("--n >= 0 is required with --sequence")
        values = SEQUENCES[args.sequence](args.n)
        payload = {"sequence": args.sequence, "n": args.n, "values": [str(v) for v in values]}
        _emit(payload, " ".join(str(v) for v in values), args.format, out, [[str(v) for v in values]])
        return 0
    _emit_matrix(select_matrix(args), args.format, out)
    return 0


def cmd_det(args, out) -> int:
    A = select_matrix(args)
    if not A.is_square:
        raise UsageError("determinant needs a square matrix")
    value = fz.bareiss_det(A) if A.is_exact else fz.det_hp(A, args.precision)
    text = _scalar_text(value)
    payload = {"determinant": text}
    if not A.is_exact:
        payload["precision_bits"] = args.precision
    _emit(payload, text, args.format, out)
    return 0


def cmd_inv(args, out) -> int:
    A = select_matrix(args)
    if not A.is_exact:
        raise UsageError("inv works on exact matrices only")
    try:
        inv = fz.exact_inverse(A)
    except fz.SingularMatrixError as exc:
        _emit({"error": str(exc), "stage": exc.stage}, f"singular: {exc}", args.format, out)
        return 1
    _emit_matrix(inv, args.format, out)
    return 0


def cmd_ldl(args, out) -> int:
    if args.closed:
        if args.family == "beta":
            F = fz.beta_ldl_closed(_need_n(args))
        elif args.family == "bell":
            F = fz.bell_ldl_closed(_need_n(args))
        else:
            raise UsageError("--closed is available for families beta and bell")
    else:
        A = select_matrix(args)
        try:
            F = fz.sym_congruence_ldl(A)
        except fz.FactorizationError as exc:
            _emit({"error": str(exc), "stage": exc.stage}, f"failed: {exc}", args.format, out)
            return 1
    payload = F.to_dict()
    text = "Z:\n" + F.Z.pretty() + "\nd: " + " ".join(_scalar_text(x) for x in F.d)
    _emit(payload, text, args.format, out)
    return 0


def cmd_seb(args, out) -> int:
    if args.closed:
        if args.family == "beta":
            F = fz.beta_seb_closed(_need_n(args))
        elif args.family == "stirling1":
            F = fz.stirling_first_seb_closed(_need_n(args))
        else:
            raise UsageError("--closed is available for families beta and stirling1")
    else:
        A = select_matrix(args)
        try:
            F = fz.neville_seb(A)
        except fz.FactorizationError as exc:
            _emit({"error": str(exc), "stage": exc.stage}, f"failed: {exc}", args.format, out)
            return 1
    if args.trim:
        F = F.trimmed()
    payload = F.to_dict()

    def side(fs, letter):
        return " ".join(f"{letter}{f.index}({_scalar_text(f.param)})" for f in fs) or "-"

    text = "\n".join(
        [f"lower: {side(F.lower, 'L')}", "diag: " + " ".join(_scalar_text(x) for x in F.diagonal),
         f"upper: {side(F.upper, 'U')}"]
    )
    _emit(payload, text, args.format, out)
    return 0


def _need_n(args) -> int:
    if args.n is None or args.n < 1:
        raise UsageError("--n >= 1 is required")
    return args.n


def _tolerance(args, prec: int):
    if args.tol_exponent is None:
        return None
    return pos.tolerance_from_exponent(args.tol_exponent, prec)


def _with_retry(check, args):
    """Run an HPReal check; an indeterminate result is retried once at 2P bits."""
    prec = args.precision
    rep = check(prec, _tolerance(args, prec))
    if rep.verdict == INDETERMINATE:
        rep = check(2 * prec, _tolerance(args, 2 * prec))
        rep.details["retried_at"] = 2 * prec
    return rep


def cmd_check(args, out) -> int:
    what = args.property
    if what == "tshift":
        rep = pos.tshift_identity_check(_need_n(args))
    else:
        A = select_matrix(args)
        if what == "pd":
            rep = pos.is_pd_exact(A)
        elif what == "psd":
            rep = pos.is_psd_exact(A)
        elif what == "tp":
            rep = pos.is_tp(A, args.mode)
        elif what == "tn":
            rep = pos.is_tn(A)
        elif what == "triangular-tp":
            rep = pos.is_triangular_tp(A)
        elif what == "hankel-tp":
            rep = pos.hankel_tp_via_pd(A)
        elif what == "pd-hp":
            rep = _with_retry(lambda p, t: pos.is_pd_hp(_rebuild(args, A, p), p, t), args)
        elif what == "tp-hp":
            rep = _with_retry(lambda p, t: pos.solid_minors_hp(_rebuild(args, A, p), p, t), args)
        elif what == "infdiv-horn":
            rep = _with_retry(lambda p, t: pos.infdiv_horn(A, p, t), args)
        else:  # pragma: no cover - argparse restricts choices
            raise UsageError(f"unknown property {what!r}")
    _emit(rep.to_dict(), _report_text(rep), args.format, out)
    return _report_exit(rep)


def _rebuild(args, A: Matrix, prec: int) -> Matrix:
    """Recompute real-valued families at a new precision; exact input is converted."""
    if A.is_exact:
        return A.to_hp(prec)
    if getattr(args, "family", None) in ("gamma", "beta-recip") and not getattr(args, "input", None):
        saved = args.precision
        args.precision = prec
        try:
            return build_family(args)
        finally:
            args.precision = saved
    return A.to_hp(prec)


def _parse_grid(text: str | None):
    if not text:
        return pos.DEFAULT_GRID
    grid = []
    for tok in text.split(","):
        tok = tok.strip()
        try:
            grid.append(Fraction(tok))
        except ValueError:
            raise UsageError(f"bad grid value {tok!r}") from None
        if grid[-1] <= 0:
            raise UsageError("grid values must be positive")
    return tuple(grid)


def cmd_infdiv(args, out) -> int:
    A = select_matrix(args)
    grid = _parse_grid(args.grid)
    rep = pos.infdiv_sample(A, grid, args.precision, _tolerance(args, args.precision))
    _emit(rep.to_dict(), _report_text(rep), args.format, out)
    return _report_exit(rep)


def cmd_reproduce(args, out) -> int:
    bundle = reproduce_paper(args.precision, args.seed, args.jobs)
    text = "\n".join(
        f"{e['verdict'].upper():4} {e['name']} ({e['elapsed_s']:.3f}s)" for e in bundle["entries"]
    ) + f"\noverall: {bundle['overall']}"
    rows = [["name", "criterion", "verdict", "elapsed_s"]] + [
        [e["name"], e["criterion"], e["verdict"], e["elapsed_s"]] for e in bundle["entries"]
    ]
    payload = {k: v for k, v in bundle.items() if k != "schema"}
    _emit(payload, text, args.format, out, rows)
    return 0 if bundle["overall"] == PASS else 1


# ---------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser, matrix: bool = True):
    p.add_argument("--precision", type=int, default=int(_env("precision", DEFAULT_PRECISION)),
                   help="HPReal precision in bits (default 128)")
    tol = _env("tol_exponent", None)
    p.add_argument("--tol-exponent", type=int, default=int(tol) if tol is not None else None,
                   help="tolerance is 2**-E (default: precision/2)")
    p.add_argument("--format", choices=["json", "csv", "pretty"], default=_env("format", "pretty"))
    seed = _env("seed", 0)
    p.add_argument("--seed", type=int, default=int(seed))
    if matrix:
        p.add_argument("--family", choices=FAMILIES)
        p.add_argument("--n", type=int)
        p.add_argument("--k", type=int, help="group count for family y-k")
        p.add_argument("--lambdas", help="comma-separated row indices (gamma, beta-recip, beta-indices)")
        p.add_argument("--mus", help="comma-separated column indices (defaults to --lambdas)")
        p.add_argument("--input", help="read the matrix from a JSON or CSV file")
        p.add_argument("--input-format", choices=["json", "csv"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="posmat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("gen", help="construct a matrix or an integer sequence")
    _common(p)
    p.add_argument("--sequence", choices=sorted(SEQUENCES))
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("det", help="exact (or HPReal) determinant")
    _common(p)
    p.set_defaults(func=cmd_det)

    p = sub.add_parser("inv", help="exact inverse")
    _common(p)
    p.set_defaults(func=cmd_inv)

    p = sub.add_parser("ldl", help="Z diag(d) Z^T congruence")
    _common(p)
    p.add_argument("--closed", action="store_true", help="use the closed form (beta, bell)")
    p.set_defaults(func=cmd_ldl)

    p = sub.add_parser("seb", help="Neville bidiagonal factorization")
    _common(p)
    p.add_argument("--closed", action="store_true", help="use the closed form (beta, stirling1)")
    p.add_argument("--trim", action="store_true", help="drop zero-parameter factors")
    p.set_defaults(func=cmd_seb)

    p = sub.add_parser("check", help="positivity checks")
    p.add_argument("property", choices=[
        "pd", "psd", "tp", "tn", "triangular-tp", "hankel-tp", "pd-hp", "tp-hp", "infdiv-horn", "tshift",
    ])
    _common(p)
    p.add_argument("--mode", choices=[pos.ALL_MINORS, pos.SOLID_MINORS], default=pos.ALL_MINORS)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("infdiv", help="Hadamard-power grid search for infinite divisibility")
    _common(p)
    p.add_argument("--grid", default=_env("grid", None), help="comma-separated exponents, e.g. 1/4,0.5,2")
    p.set_defaults(func=cmd_infdiv)

    p = sub.add_parser("reproduce", help="run every claim check")
    _common(p, matrix=False)
    p.add_argument("--jobs", type=int, default=int(_env("jobs", 1)))
    p.set_defaults(func=cmd_reproduce)
    return parser


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.precision < 64:
            raise UsageError("--precision must be at least 64")
        return args.func(args, out)
    except (UsageError, MatrixFormatError, DomainError, ValueError, TypeError, IndexError, OSError) as exc:
        err.write(f"posmat: error: {exc}\n")
        return 2


def main():  # pragma: no cover
    sys.exit(run())


if __name__ == "__main__":  # pragma: no cover
    main()
