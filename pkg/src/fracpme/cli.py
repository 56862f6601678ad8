"""Command-line interface.

Exit codes: 0 success or verified, 1 usage or domain error, 2 a check ran
and refuted its claim, 3 numerical failure (quadrature or instability).

Records are ``key=value`` groups, one per line.  Where a value may contain
spaces it is the last key on its line (``entry=``, ``term=``, ``notes=``,
``text=``).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import fdsolver, pdemodel as pm, verify as vf
from .errors import DomainError, NumericalError, PreconditionError, UnsupportedFormError
from .frackernel import (PowerFunction, SampledFunction, rl_gl, rl_power,
                         rl_quadrature_many)
from .liealg import AlgebraSpec, adjoint_table, canonicalize, parse_field

DIGITS = 11
EXIT_OK, EXIT_USAGE, EXIT_REFUTED, EXIT_NUMERICAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def num(v: float) -> str:
    v = float(v)
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return f"{v:.{DIGITS}g}"


# -- output -------------------------------------------------------------------

class Output:
    def __init__(self, fmt: str, stream=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout

    def rows(self, rows: list[dict]):
        if not rows:
            return
        if self.fmt == "records":
            for row in rows:
                self.stream.write(" ".join(f"{k}={v}" for k, v in row.items()) + "\n")
            return
        keys = []
        for row in rows:
            keys.extend(k for k in row if k not in keys)
        cells = [[str(row.get(k, "")) for k in keys] for row in rows]
        widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
        self.stream.write("  ".join(k.ljust(w) for k, w in zip(keys, widths)).rstrip() + "\n")
        for c in cells:
            self.stream.write("  ".join(v.ljust(w) for v, w in zip(c, widths)).rstrip() + "\n")

    def lines(self, lines):
        for line in lines:
            self.stream.write(line + "\n")

    def reports(self, reports):
        if self.fmt == "records":
            for r in reports:
                self.lines(r.to_records(DIGITS))
            return
        self.rows([{
            "subject": r.subject, "mode": r.mode, "verdict": r.verdict,
            "max_abs": "" if r.max_abs is None else num(r.max_abs),
            "residual": "; ".join(r.terms) if r.terms else ("0" if r.mode == "symbolic" else ""),
        } for r in reports])
        for r in reports:
            if r.notes:
                self.stream.write(f"{r.subject}: {r.notes}\n")


def _exit_for(verdict: str) -> int:
    return {vf.VERIFIED: EXIT_OK, vf.REFUTED: EXIT_REFUTED}.get(verdict, EXIT_NUMERICAL)


# -- argument helpers --------------------------------------------------------------

PARAM_FLAGS = ("alpha", "r", "lam", "a", "b", "c", "kappa", "eps", "gamma", "rho")


def _add_params(p: argparse.ArgumentParser):
    g = p.add_argument_group("model parameters")
    for name in PARAM_FLAGS:
        g.add_argument(f"--{name}", type=float, default=None)


def _overrides(args) -> dict:
    return {k: getattr(args, k) for k in PARAM_FLAGS if getattr(args, k, None) is not None}


def _entry(args):
    info = pm.entry_info(args.entry)
    model = getattr(args, "model", None)
    if model is not None and pm.Model.parse(model) is not info.model:
        raise UsageError(f"entry {info.id} belongs to the {info.model.value} model")
    return info


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _algebra(args) -> AlgebraSpec:
    return AlgebraSpec(args.algebra.upper(), args.alpha, args.r)


# -- commands ------------------------------------------------------------------------

def cmd_rl_deriv(args, out: Output) -> int:
    if args.samples is not None:
        if args.method != "gl":
            raise UsageError("--samples works with --method gl only")
        if args.step is None:
            raise UsageError("--samples needs --step")
        values = np.loadtxt(args.samples, dtype=float, ndmin=1)
        d = rl_gl(args.alpha, SampledFunction(0.0, args.step, values))
        out.rows([{"t": num(tn), "value": num(v)} for tn, v in zip(d.times, d.values)])
        return EXIT_OK
    if args.power is None:
        raise UsageError("give --power P [--coeff C] or --samples FILE --step H")
    g = PowerFunction(args.coeff, args.power)
    if args.method == "power":
        d = rl_power(args.alpha, g)
        out.rows([{"coeff": num(d.coeff), "exponent": num(d.exponent)}])
        return EXIT_OK
    if args.t is None:
        raise UsageError(f"--method {args.method} needs --t")
    if args.method == "quad":
        vals, est = rl_quadrature_many(args.alpha, g, [args.t], tol=args.tol)
        out.rows([{"t": num(args.t), "value": num(vals[0]), "estimate": f"{est[0]:.3g}"}])
        return EXIT_OK
    step = args.step if args.step is not None else args.t / 1000.0
    n = int(round(args.t / step))
    if n < 1 or abs(n * step - args.t) > 1e-9 * args.t:
        raise UsageError("--t must be a positive multiple of --step")
    with np.errstate(divide="ignore"):
        values = g(step * np.arange(n + 1))
    values[0] = values[0] if np.isfinite(values[0]) else 0.0   # singular t = 0 sample
    d = rl_gl(args.alpha, SampledFunction(0.0, step, values))
    out.rows([{"t": num(args.t), "value": num(d.values[-1]), "step": num(step)}])
    return EXIT_OK


def cmd_adjoint_table(args, out: Output) -> int:
    alg = _algebra(args)
    table = adjoint_table(alg, args.epsilon)
    labels = alg.labels
    if out.fmt == "records":
        out.rows([{"row": labels[i], "col": labels[j], "entry": table[i][j].format(DIGITS)}
                  for i in range(3) for j in range(3)])
    else:
        out.rows([{"Ad": labels[i], **{labels[j]: table[i][j].format(DIGITS) for j in range(3)}}
                  for i in range(3)])
    return EXIT_OK


def cmd_canonicalize(args, out: Output) -> int:
    coeffs = _floats(args.coeffs)
    if len(coeffs) != 3:
        raise UsageError("--coeffs needs three numbers")
    rep = canonicalize(_algebra(args).element(coeffs))
    row = {"representative": rep.label}
    if rep.param is not None:
        row["gamma" if rep.label == "r16" else "rho"] = num(rep.param)
    out.rows([row])
    return EXIT_OK


def cmd_verify_solution(args, out: Output) -> int:
    _entry(args)
    grid = vf.Grid.parse(args.grid) if args.grid else vf.DEFAULT_GRID
    reports = vf.verify_entry(args.entry, numeric=args.numeric, grid=grid,
                              quad_tol=args.tol, **_overrides(args))
    out.reports(reports)
    return _exit_for(vf.overall(reports))


def cmd_verify_determining(args, out: Output) -> int:
    model = pm.Model.parse(args.model)
    params = {k: getattr(args, k) for k in ("alpha", "r", "a", "b", "c")
              if getattr(args, k) is not None}
    values = {"C2": 0} if model is pm.Model.FPME else {"D2": 0}
    if args.set:
        for item in args.set.split(","):
            key, _, val = item.partition("=")
            try:
                values[key.strip()] = float(val)
            except ValueError:
                raise UsageError(f"bad --set item {item!r}; use NAME=VALUE") from None
    rep = vf.check_determining(model, params=params, values=values)
    out.reports([rep])
    return _exit_for(rep.verdict)


def cmd_verify_transport(args, out: Output) -> int:
    info = _entry(args)
    if info.kind != "solution":
        raise UsageError(f"{info.id} is not a closed-form solution")
    params = pm.model_params(args.entry, **_overrides(args))
    base = pm.catalog(args.entry, **_overrides(args))
    X = parse_field(args.field, params.algebra())
    rep = vf.check_symmetry_transport(params, X, base, _floats(args.epsilons),
                                      subject=info.id)
    out.reports([rep])
    return _exit_for(rep.verdict)


def cmd_verify_surface(args, out: Output) -> int:
    info = pm.entry_info(args.entry)
    params = pm.model_params(args.entry, **_overrides(args))
    p = pm.entry_params(args.entry, **_overrides(args))
    X = parse_field(args.field, params.algebra(), args.param if args.param is not None
                    else p.get("gamma", p.get("rho")))
    if info.kind == "reduced":
        rec = pm.catalog(args.entry, **_overrides(args))
        profiles = [pm.profile(args.profile)] if args.profile else pm.PROFILES
        reports = [vf.check_invariant_surface(X, rec.ansatz.build(pr),
                                              subject=f"{info.id}[{pr.name}]")
                   for pr in profiles]
    else:
        sol = pm.catalog(args.entry, **_overrides(args))
        reports = [vf.check_invariant_surface(X, sol, subject=info.id)]
    out.reports(reports)
    return _exit_for(vf.overall(reports))


def _solver_setup(args):
    info = pm.entry_info(args.entry)
    if info.model is not pm.Model.FPME or info.kind != "solution":
        raise UsageError("the solver needs an FPME closed-form entry for its data")
    return pm.model_params(args.entry, **_overrides(args)), pm.catalog(args.entry, **_overrides(args))


def _parse_space(text: str):
    try:
        lo, hi, n = text.split(":")
        return float(lo), float(hi), int(n)
    except ValueError:
        raise UsageError(f"bad --grid {text!r}; expected XLO:XHI:NX") from None


def cmd_solve(args, out: Output) -> int:
    if pm.Model.parse(args.model) is not pm.Model.FPME:
        raise UsageError("only the FPME has a solver")
    params, exact = _solver_setup(args)
    x_lo, x_hi, nx = _parse_space(args.grid)
    cfg = fdsolver.config_from_solution(params, exact, x_lo, x_hi, nx, args.tend, args.nt,
                                        history_until=args.history_until)
    for w in cfg.warnings:
        sys.stderr.write(f"warning: {w}\n")
    g = fdsolver.solve_fpme(cfg)
    if args.out == "-":
        g.to_csv(sys.stdout)
    else:
        with open(args.out, "w", newline="") as fh:
            g.to_csv(fh)
    err = float(np.max(np.abs(g.values[-1] - exact(g.x, g.t[-1]))))
    if args.out != "-":
        out.rows([{"nx": cfg.nx, "nt": cfg.nt, "stability_ratio": num(cfg.stability_ratio),
                   "max_error_t_end": num(err), "out": args.out}])
    return EXIT_OK


def cmd_converge(args, out: Output) -> int:
    params, exact = _solver_setup(args)
    grid = {"nx": args.nx, "nt": args.nt, "t_end": args.tend,
            "x_lo": args.x_lo, "x_hi": args.x_hi}
    rep = fdsolver.catalog_convergence(params, exact, args.levels, **grid)
    out.lines(rep.to_records(DIGITS))
    if not rep.complete:
        return EXIT_NUMERICAL
    return EXIT_OK if rep.monotone else EXIT_REFUTED


def cmd_catalog_list(args, out: Output) -> int:
    out.rows([{"id": e.id, "model": e.model.value, "kind": e.kind, "expected": e.expected,
               "form": e.summary} for e in pm.ENTRIES.values()])
    return EXIT_OK


def cmd_catalog_show(args, out: Output) -> int:
    info = pm.entry_info(args.entry)
    params = pm.entry_params(args.entry, **_overrides(args))
    obj = pm.catalog(args.entry, **_overrides(args))
    head = {"id": info.id, "model": info.model.value, "kind": info.kind}
    head.update({k: num(v) for k, v in params.items()})
    lines = [" ".join(f"{k}={v}" for k, v in head.items())]
    if info.kind == "reduced":
        lines.append(f"generator={obj.representative.format(DIGITS)}")
        lines.append(f"variable={obj.similarity_variable}")
        lines.append(f"ansatz={obj.ansatz_text}")
        lines.append(f"text={obj.ode_text}")
        if obj.balanced_text:
            lines.append(f"balanced={obj.balanced_text}")
        for k, v in obj.params.items():
            lines.append(f"param {k}={num(v)}")
        if obj.notes:
            lines.append(f"notes={obj.notes}")
    else:
        lines.append(f"u={obj.format(DIGITS)}")
    out.lines(lines)
    return EXIT_OK


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    # --format is accepted before or after the subcommand
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("records", "table"), default=argparse.SUPPRESS,
                     help="output layout (default: table on a terminal, records otherwise)")
    parser = _Parser(prog="fracpme", description="Fractional porous medium symmetry toolkit",
                     parents=[fmt])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("rl-deriv", parents=[fmt], help="Riemann-Liouville derivative")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--power", type=float)
    p.add_argument("--coeff", type=float, default=1.0)
    p.add_argument("--samples")
    p.add_argument("--step", type=float)
    p.add_argument("--method", choices=("power", "quad", "gl"), default="power")
    p.add_argument("--t", type=float)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_rl_deriv)

    for name, func in (("adjoint-table", cmd_adjoint_table), ("canonicalize", cmd_canonicalize)):
        p = sub.add_parser(name, parents=[fmt])
        p.add_argument("--algebra", choices=("h1", "h2", "H1", "H2"), required=True)
        p.add_argument("--alpha", type=float, required=True)
        p.add_argument("--r", type=float)
        if name == "adjoint-table":
            p.add_argument("--epsilon", type=float, required=True)
        else:
            p.add_argument("--coeffs", required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("verify", parents=[fmt], help="run a verification check")
    vsub = p.add_subparsers(dest="check", required=True, parser_class=_Parser)

    q = vsub.add_parser("solution", parents=[fmt])
    q.add_argument("--model", choices=("fpme", "fdpme"))
    q.add_argument("--entry", required=True)
    q.add_argument("--numeric", action="store_true")
    q.add_argument("--grid")
    q.add_argument("--tol", type=float, default=1e-8)
    _add_params(q)
    q.set_defaults(func=cmd_verify_solution)

    q = vsub.add_parser("determining", parents=[fmt])
    q.add_argument("--model", choices=("fpme", "fdpme"), required=True)
    q.add_argument("--set", help="fix free constants, e.g. D4=1,C4=0")
    _add_params(q)
    q.set_defaults(func=cmd_verify_determining)

    q = vsub.add_parser("transport", parents=[fmt])
    q.add_argument("--model", choices=("fpme", "fdpme"))
    q.add_argument("--entry", required=True)
    q.add_argument("--field", required=True)
    q.add_argument("--epsilons", required=True)
    _add_params(q)
    q.set_defaults(func=cmd_verify_transport)

    q = vsub.add_parser("surface", parents=[fmt])
    q.add_argument("--field", required=True)
    q.add_argument("--entry", required=True)
    q.add_argument("--param", type=float, help="gamma/rho for r16/r26")
    q.add_argument("--profile", choices=[pr.name for pr in pm.PROFILES])
    _add_params(q)
    q.set_defaults(func=cmd_verify_surface)

    p = sub.add_parser("solve", parents=[fmt], help="explicit GL solver, data from a catalog entry")
    p.add_argument("--model", choices=("fpme",), default="fpme")
    p.add_argument("--entry", default="T33ii")
    p.add_argument("--grid", required=True, help="XLO:XHI:NX")
    p.add_argument("--nt", type=int, required=True)
    p.add_argument("--tend", type=float, required=True)
    p.add_argument("--history-until", type=float, default=0.0)
    p.add_argument("--out", required=True, help="CSV path, or - for stdout")
    _add_params(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("converge", parents=[fmt], help="convergence study against a catalog entry")
    p.add_argument("--entry", required=True)
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--nx", type=int, default=17)
    p.add_argument("--nt", type=int, default=100)
    p.add_argument("--tend", type=float, default=1.0)
    p.add_argument("--x-lo", type=float, default=1.0)
    p.add_argument("--x-hi", type=float, default=2.0)
    _add_params(p)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("catalog", parents=[fmt], help="catalog of exact solutions and reductions")
    csub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    q = csub.add_parser("list", parents=[fmt])
    q.set_defaults(func=cmd_catalog_list)
    q = csub.add_parser("show", parents=[fmt])
    q.add_argument("--entry", required=True)
    _add_params(q)
    q.set_defaults(func=cmd_catalog_show)
    return parser


# list-valued flags whose value may start with a minus sign
LIST_FLAGS = ("--epsilons", "--coeffs")


def _join_list_flags(argv: list[str]) -> list[str]:
    out, i = [], 0
    while i < len(argv):
        if argv[i] in LIST_FLAGS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _join_list_flags(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
        layout = getattr(args, "format", None) or ("table" if sys.stdout.isatty() else "records")
        return args.func(args, Output(layout))
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (DomainError, PreconditionError, UnsupportedFormError, LookupError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except NumericalError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
