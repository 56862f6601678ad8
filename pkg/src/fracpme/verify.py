"""Executable checks: determining equations, invariant surfaces, transport of
solutions by symmetries, and pointwise residuals of the model equations.

Every check returns a :class:`ResidualReport`; a failed claim is a
``refuted`` verdict, never an exception.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from . import pdemodel as pm
from .errors import AccuracyError, PreconditionError, UnsupportedFormError
from .frackernel import PowerFunction, rl_power, rl_quadrature_many
from .liealg import AlgebraElement, TransportedSolution, flow

VERIFIED, REFUTED, UNVERIFIABLE = "verified", "refuted", "unverifiable"
DETERMINING_TOL = 1e-14
SURFACE_TOL = 1e-8
TRANSPORT_RTOL = 1e-10
FD_REL_STEP = 1e-6


@dataclass
class ResidualReport:
    subject: str
    mode: str                                   # "symbolic" | "numeric"
    verdict: str
    terms: tuple[str, ...] = ()
    max_abs: float | None = None
    rms: float | None = None
    tolerance: float | None = None
    scale: float | None = None
    notes: str = ""
    data: object = field(default=None, repr=False, compare=False)

    @property
    def ok(self) -> bool:
        return self.verdict == VERIFIED

    def to_records(self, digits: int = 11) -> list[str]:
        """Line records: one ``key=value`` header line, one ``term=`` line per
        residual term, and a ``notes=`` line holding the rest of the line."""
        head = [f"subject={self.subject}", f"mode={self.mode}", f"verdict={self.verdict}"]
        if self.mode == "symbolic":
            head.append(f"terms={len(self.terms)}")
        for key in ("max_abs", "rms", "tolerance", "scale"):
            value = getattr(self, key)
            if value is not None:
                head.append(f"{key}={value:.{digits}g}")
        lines = [" ".join(head)]
        lines.extend(f"term={t}" for t in self.terms)
        if self.notes:
            lines.append(f"notes={self.notes}")
        return lines

    def format(self) -> str:
        return "\n".join(self.to_records())


def _worst(verdicts) -> str:
    verdicts = list(verdicts)
    if REFUTED in verdicts:
        return REFUTED
    if UNVERIFIABLE in verdicts:
        return UNVERIFIABLE
    return VERIFIED


# -- determining equations -------------------------------------------------------

t, x, u = sp.symbols("t x u")
alpha_s, r_s, a_s, b_s, c_s = sp.symbols("alpha r a b c")
N_BINOMIAL_ORDERS = 6


@dataclass(frozen=True)
class SymbolicFamily:
    """Infinitesimals ``tau, xi, eta`` as sympy expressions in ``t, x, u``."""

    tau: sp.Expr
    xi: sp.Expr
    eta: sp.Expr
    constants: tuple[sp.Symbol, ...]

    def subs(self, values: dict) -> SymbolicFamily:
        values = {sp.Symbol(str(k)) if isinstance(k, str) else k: v
                  for k, v in values.items()}
        return SymbolicFamily(self.tau.subs(values), self.xi.subs(values),
                              self.eta.subs(values),
                              tuple(c for c in self.constants if c not in values))


def general_family(model) -> SymbolicFamily:
    """The general infinitesimal generator stated for each model."""
    model = pm.Model.parse(model)
    if model is pm.Model.FPME:
        C1, C2, C3, C4 = sp.symbols("C1:5")
        return SymbolicFamily(C1 * t + C2, C3 * x + C4,
                              (2 * C3 - alpha_s * C1) / (r_s - 1) * u, (C1, C2, C3, C4))
    D1, D2, D3, D4 = sp.symbols("D1:5")
    return SymbolicFamily(D1 * t + D2, D3 + 0 * x, -alpha_s * D1 * u + D4, (D1, D2, D3, D4))


def family_from_field(X, model) -> SymbolicFamily:
    """Symbolic form of a numeric affine scaling field."""
    if isinstance(X, AlgebraElement):
        X = X.field
    return SymbolicFamily(sp.Float(X.at) * t, sp.Float(X.cx) * x + sp.Float(X.cc),
                          sp.Float(X.eu) * u + sp.Float(X.ec), ())


def determining_equations(model, fam: SymbolicFamily) -> list[tuple[str, sp.Expr]]:
    """Left-hand sides of the listed determining system, labelled."""
    model = pm.Model.parse(model)
    tau, xi, eta = fam.tau, fam.xi, fam.eta
    d = sp.diff
    Dt_tau = d(tau, t)
    binom_eqs = [
        (f"binomial n={n}",
         sp.binomial(alpha_s, n) * d(d(eta, u), t, n)
         - sp.binomial(alpha_s, n + 1) * d(tau, t, n + 1))
        for n in range(1, N_BINOMIAL_ORDERS + 1)
    ]
    structural = [("tau_x", d(tau, x)), ("tau_u", d(tau, u)), ("xi_t", d(xi, t)),
                  ("xi_u", d(xi, u))]
    initial = [("tau(t=0)", tau.subs(t, 0))]
    if model is pm.Model.FPME:
        r = r_s
        eqs = binom_eqs + [
            ("E2", (r - 1) * d(eta, x) + u * (d(eta, x, u) - d(xi, x, 2))),
            ("E3", alpha_s * Dt_tau * u - 2 * u * d(xi, x) + (r - 1) * eta),
            ("E4", alpha_s * (r - 1) * u * d(tau, t) + (r - 1) * u * d(eta, u)
             - 2 * (r - 1) * u * d(xi, x) + u ** 2 * d(eta, u, 2)
             - 2 * u ** 2 * d(xi, x, u) + (r - 1) * (r - 2) * eta),
        ] + structural + [("eta_xx", d(eta, x, 2))]
        return eqs + initial
    a, b, c = a_s, b_s, c_s
    eqs = [
        ("E1", -b * d(eta, x, 2) - c * u * (2 * d(eta, x, u) - d(xi, x, 2))
         + sp.Rational(4, 3) * c * d(eta, x)),
        ("E2", sp.Rational(2, 3) * c * d(eta, u) + sp.Rational(2, 3) * c * alpha_s * Dt_tau
         - 2 * b * d(eta, x, u) + b * d(xi, x, 2) - c * u * d(eta, u, 2)
         + 2 * c * u * d(xi, x, u) - sp.Rational(4, 3) * c * d(xi, x)),
        ("E3", -alpha_s * c * u * Dt_tau - 2 * a * d(eta, x, 2) - b * d(eta, x) - c * eta
         + 2 * c * u * d(xi, x)),
        ("E4", -a * d(eta, u) + 4 * a * d(xi, x) - a * Dt_tau),
        ("E5", -alpha_s * b * Dt_tau - 4 * a * d(eta, x, u) + 2 * a * d(xi, x, 2)
         - b * d(eta, u) + 3 * b * d(xi, x)),
    ] + binom_eqs + structural + [("eta_uu", d(eta, u, 2))]
    return eqs + initial


def _nonzero_terms(expr: sp.Expr, tol: float) -> list[sp.Expr]:
    expr = sp.expand(expr)
    if expr == 0:
        return []
    gens = sorted(expr.free_symbols, key=str)
    if not gens:
        return [expr] if abs(complex(expr)) > tol else []
    out = []
    for term in sp.Add.make_args(expr):
        coeff, _ = term.as_coeff_Mul()
        if abs(float(coeff)) > tol:
            out.append(term)
    return out


def check_determining(model, family: SymbolicFamily | None = None,
                      params: dict | None = None, values: dict | None = None,
                      tol: float = DETERMINING_TOL) -> ResidualReport:
    """Substitute a family into the determining system and expand.

    ``params`` fixes model constants (``alpha``, ``r``, ``a``, ``b``, ``c``);
    ``values`` fixes free constants of the family (``C2=0``, ``D4=1`` ...).
    Anything left symbolic must cancel identically.
    """
    model = pm.Model.parse(model)
    fam = family if family is not None else general_family(model)
    if values:
        fam = fam.subs({k: sp.nsimplify(v) for k, v in values.items()})
    subs = {sp.Symbol(k): sp.nsimplify(v) for k, v in (params or {}).items()}
    residuals = []
    for label, expr in determining_equations(model, fam):
        expr = sp.together(sp.sympify(expr).subs(subs))
        num, den = sp.fraction(expr)
        for term in _nonzero_terms(num, tol):
            residuals.append((label, sp.simplify(term / den)))
    terms = tuple(f"{label}: {sp.sstr(term)}" for label, term in residuals)
    return ResidualReport(
        subject=f"{model.value}-determining", mode="symbolic",
        verdict=REFUTED if residuals else VERIFIED, terms=terms,
        notes="" if not residuals else
        "the listed system does not vanish on the stated general generator",
        data=residuals)


# -- invariant surface ------------------------------------------------------------

@dataclass(frozen=True)
class Grid:
    x_lo: float = 1.0
    x_hi: float = 2.0
    nx: int = 8
    t_lo: float = 0.25
    t_hi: float = 1.0
    nt: int = 8

    def __post_init__(self):
        if not (0 < self.x_lo < self.x_hi and 0 < self.t_lo < self.t_hi):
            raise PreconditionError("grid ranges must be positive and increasing")
        if self.nx < 1 or self.nt < 1:
            raise PreconditionError("grid counts must be positive")

    @classmethod
    def parse(cls, text: str) -> Grid:
        """``XLO:XHI:NX,TLO:THI:NT``."""
        try:
            xs, ts = text.split(",")
            x_lo, x_hi, nx = xs.split(":")
            t_lo, t_hi, nt = ts.split(":")
            return cls(float(x_lo), float(x_hi), int(nx), float(t_lo), float(t_hi), int(nt))
        except ValueError:
            raise PreconditionError(f"bad grid {text!r}; expected XLO:XHI:NX,TLO:THI:NT") from None

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x_lo, self.x_hi, self.nx)

    @property
    def ts(self) -> np.ndarray:
        return np.linspace(self.t_lo, self.t_hi, self.nt)

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        X, T = np.meshgrid(self.xs, self.ts, indexing="ij")
        return X.ravel(), T.ravel()


DEFAULT_GRID = Grid()


def _central_dx(sol, x, t):
    h = FD_REL_STEP * np.maximum(1.0, np.abs(x))
    return (sol(x + h, t) - sol(x - h, t)) / (2 * h)


def _central_dt(sol, x, t):
    h = FD_REL_STEP * np.maximum(1.0, np.abs(t))
    h = np.minimum(h, 0.5 * t)
    return (sol(x, t + h) - sol(x, t - h)) / (2 * h)


def check_invariant_surface(X, sol, points=None, tol: float = SURFACE_TOL,
                            subject: str = "surface") -> ResidualReport:
    """Max of ``|xi Theta_x + tau Theta_t - eta|`` over ``points``."""
    if isinstance(X, AlgebraElement):
        X = X.field
    xs, ts = points if points is not None else DEFAULT_GRID.points()
    xs, ts = np.asarray(xs, float), np.asarray(ts, float)
    theta = sol(xs, ts)
    analytic = hasattr(sol, "dx") and hasattr(sol, "dt")
    th_x = sol.dx(xs, ts) if analytic else _central_dx(sol, xs, ts)
    th_t = sol.dt(xs, ts) if analytic else _central_dt(sol, xs, ts)
    res = X.xi(xs, ts, theta) * th_x + X.tau(xs, ts, theta) * th_t - X.eta(xs, ts, theta)
    res = np.abs(res)
    if not np.all(np.isfinite(res)):
        return ResidualReport(subject, "numeric", UNVERIFIABLE,
                              notes="non-finite values at the sample points")
    max_abs = float(res.max())
    return ResidualReport(subject, "numeric", VERIFIED if max_abs <= tol else REFUTED,
                          max_abs=max_abs, rms=float(np.sqrt(np.mean(res ** 2))),
                          tolerance=tol,
                          notes="" if analytic else "central differences")


# -- pointwise residual ------------------------------------------------------------

def _fd_derivatives(sol, x, ts):
    h = 1e-3 * max(1.0, abs(x))
    f = [sol(x + k * h, ts) for k in (-2, -1, 0, 1, 2)]
    dx = (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h)
    dxx = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
    return dx, dxx


def check_residual_numeric(params, sol, grid: Grid = DEFAULT_GRID,
                           quad_tol: float = 1e-8, subject: str = "solution",
                           threshold: float | None = None) -> ResidualReport:
    """LHS by quadrature of ``t -> sol(x, t)``, RHS from ``x``-derivatives.

    Verified iff ``max_abs <= threshold * scale``, ``threshold`` defaulting to
    ``10 * quad_tol`` and ``scale = max(|LHS|, |RHS|, 1)`` over the grid.
    """
    ts = grid.ts
    lhs = np.empty((grid.nx, grid.nt))
    rhs = np.empty_like(lhs)
    analytic = hasattr(sol, "dx") and hasattr(sol, "dxx")
    try:
        for i, xv in enumerate(grid.xs):          # fixed node order
            lhs[i], _ = rl_quadrature_many(params.alpha, lambda s, xv=xv: sol(xv, s),
                                           ts, tol=quad_tol)
            u = sol(xv, ts)
            if analytic:
                ux, uxx = sol.dx(xv, ts), sol.dxx(xv, ts)
            else:
                ux, uxx = _fd_derivatives(sol, xv, ts)
            rhs[i] = params.rhs(u, ux, uxx)
    except AccuracyError as exc:
        return ResidualReport(subject, "numeric", UNVERIFIABLE,
                              notes=f"quadrature failed: {exc}")
    res = np.abs(lhs - rhs)
    scale = float(max(np.abs(lhs).max(), np.abs(rhs).max(), 1.0))
    thr = (10.0 * quad_tol if threshold is None else threshold) * scale
    max_abs = float(res.max())
    return ResidualReport(subject, "numeric", VERIFIED if max_abs <= thr else REFUTED,
                          max_abs=max_abs, rms=float(np.sqrt(np.mean(res ** 2))),
                          tolerance=thr, scale=scale, data=(lhs, rhs))


# -- symbolic residual ------------------------------------------------------------

def check_solution_symbolic(params, sol, subject: str = "solution") -> ResidualReport:
    res = pm.separable_residual(params, sol)
    terms = tuple(m.format() for m in res.residual)
    return ResidualReport(subject, "symbolic", REFUTED if terms else VERIFIED,
                          terms=terms, data=res)


# -- symmetry transport ------------------------------------------------------------

def _transport_semi_analytic(params, T, base, grid: Grid):
    """Residual of the transported solution on the T-image of ``grid``.

    The ``t``-dependence stays a sum of powers, so the RL derivative is exact
    per term; ``x``-derivatives are analytic.
    """
    alpha = params.alpha
    X, S = grid.points()
    xs, ts = T.x_scale * X + T.x_shift, T.t_scale * S
    sol = TransportedSolution(T, base)
    lhs = np.zeros_like(xs)
    for m in pm.as_sum(base):
        d = rl_power(alpha, PowerFunction(T.u_scale * m.coeff / T.t_scale ** m.t_exp,
                                          m.t_exp))
        lhs = lhs + d(ts) * np.power((xs - T.x_shift) / T.x_scale, m.x_exp)
    if T.u_shift:
        lhs = lhs + rl_power(alpha, PowerFunction(T.u_shift))(ts)
    rhs = params.rhs(sol(xs, ts), sol.dx(xs, ts), sol.dxx(xs, ts))
    res = np.abs(lhs - rhs)
    scale = float(max(np.abs(lhs).max(), np.abs(rhs).max(), 1.0))
    return float(res.max()), float(np.sqrt(np.mean(res ** 2))), scale


def check_symmetry_transport(params, X: AlgebraElement, base, epsilons,
                             grid: Grid = DEFAULT_GRID,
                             subject: str = "transport") -> ResidualReport:
    """Transport an exact solution by ``flow(X, eps)`` and re-check it."""
    base_res = pm.separable_residual(params, base)
    if not base_res.is_exact:
        raise PreconditionError("the base of a transport check must be an exact solution")
    label = X.format() if isinstance(X, AlgebraElement) else str(X)
    terms, notes, verdicts = [], [], []
    worst = None
    for eps in epsilons:
        T = flow(X, eps)
        try:
            image = pm.transport_exact(T, base)
        except UnsupportedFormError:
            image = None
        if image is not None:
            res = pm.separable_residual(params, image)
            verdicts.append(VERIFIED if res.is_exact else REFUTED)
            terms.extend(f"eps={eps:g}: {m.format()}" for m in res.residual)
            continue
        max_abs, _, scale = _transport_semi_analytic(params, T, base, grid)
        ok = max_abs <= TRANSPORT_RTOL * scale
        verdicts.append(VERIFIED if ok else REFUTED)
        worst = max_abs if worst is None else max(worst, max_abs)
        notes.append(f"eps={eps:g} checked on the transformed grid")
    return ResidualReport(f"{subject}[{label}]",
                          "symbolic" if worst is None else "numeric",
                          _worst(verdicts), terms=tuple(terms), max_abs=worst,
                          notes="; ".join(notes))


# -- reductions ------------------------------------------------------------------

def check_reduction(rec: pm.ReducedODESpec, params, profiles=pm.PROFILES,
                    grid: Grid = Grid(nx=4, nt=4), quad_tol: float = 1e-9) -> ResidualReport:
    """Compare the PDE residual of the ansatz with ``factor * ODE residual``.

    The PDE side uses quadrature in ``t``; agreement for arbitrary profiles
    confirms the stored balanced equation.  The printed form is evaluated
    too and its mismatch is reported in the notes.
    """
    subject = f"{rec.case_label}-reduction"
    if rec.factor is None:
        return ResidualReport(subject, "numeric", UNVERIFIABLE, notes=rec.notes)
    worst = worst_printed = 0.0
    scale = 1.0
    for prof in profiles:
        sol = rec.ansatz.build(prof)
        num = check_residual_numeric(params, sol, grid, quad_tol, threshold=np.inf)
        if num.verdict == UNVERIFIABLE:
            return ResidualReport(subject, "numeric", UNVERIFIABLE, notes=num.notes)
        lhs, rhs = num.data
        pde = lhs - rhs
        X, S = np.meshgrid(grid.xs, grid.ts, indexing="ij")
        arg = X if rec.profile_variable == "x" else S
        bal = rec.factor(X, S) * rec.balanced_residual(prof, arg)
        pri = rec.factor(X, S) * rec.printed_residual(prof, arg)
        worst = max(worst, float(np.abs(pde - bal).max()))
        worst_printed = max(worst_printed, float(np.abs(pde - pri).max()))
        scale = max(scale, num.scale)
    thr = 10.0 * quad_tol * scale
    notes = rec.notes
    if rec.balanced_text is not None:
        notes = (f"{notes}; printed form misses by {worst_printed:.3g}"
                 if notes else f"printed form misses by {worst_printed:.3g}")
    return ResidualReport(subject, "numeric", VERIFIED if worst <= thr else REFUTED,
                          max_abs=worst, tolerance=thr, scale=scale, notes=notes)


# -- catalog driver ------------------------------------------------------------------

def _surface_reports(rec: pm.ReducedODESpec, params) -> list[ResidualReport]:
    X = rec.representative.element(params.algebra())
    return [check_invariant_surface(X, rec.ansatz.build(p),
                                    subject=f"{rec.case_label}-surface[{p.name}]")
            for p in pm.PROFILES]


def verify_entry(entry: str, *, numeric: bool = False, grid: Grid = DEFAULT_GRID,
                 quad_tol: float = 1e-8, **overrides) -> list[ResidualReport]:
    """All checks that apply to a catalog entry."""
    info = pm.entry_info(entry)
    params = pm.model_params(entry, **overrides)
    p = pm.entry_params(entry, **overrides)
    if info.kind == "reduced":
        rec = pm.catalog(entry, **overrides)
        reports = _surface_reports(rec, params)
        if rec.factor is not None:
            reports.append(check_reduction(rec, params))
        return reports
    if info.kind == "transport":
        base = pm.catalog("FDPME-case2", alpha=p["alpha"], a=p["a"], b=p["b"], c=p["c"],
                          kappa=p["kappa"])
        X = params.algebra().basis_element(3)
        return [check_symmetry_transport(params, X, base, [p["eps"]], subject=info.id)]
    sol = pm.catalog(entry, **overrides)
    reports = [check_solution_symbolic(params, sol, subject=info.id)]
    if numeric:
        reports.append(check_residual_numeric(params, sol, grid, quad_tol, subject=info.id))
    return reports


def overall(reports) -> str:
    return _worst(r.verdict for r in reports)
