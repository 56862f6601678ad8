"""The two model equations, their exact solutions and their reduced equations.

FPME:   D_t^alpha u = (u^r)_xx
FDPME:  D_t^alpha u = a u_xx^2 + b u_x u_xx + c (u u_xx - 2/3 u_x^2)

``D_t^alpha`` is the Riemann-Liouville derivative with lower terminal 0.
Closed-form solutions live in the monomial class of :mod:`fracpme.monomial`,
where both sides of either equation can be computed exactly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, PreconditionError, UnsupportedFormError
from .frackernel import (LemmaCase, PowerFunction, gamma, lemma21_solution,
                         rl_power, rl_quadrature_many)
from .liealg import AlgebraSpec, PointTransformation, Representative
from .monomial import Monomial, MonomialSum, binomial_shift


class Model(enum.Enum):
    FPME = "fpme"
    FDPME = "fdpme"

    @classmethod
    def parse(cls, value) -> Model:
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"unknown model {value!r}; use fpme or fdpme") from None


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    return alpha


@dataclass(frozen=True)
class FPMEParams:
    alpha: float
    r: float

    model = Model.FPME

    def __post_init__(self):
        object.__setattr__(self, "alpha", _check_alpha(self.alpha))
        r = float(self.r)
        if not r > 0 or r == 1.0:
            raise DomainError(f"r must be positive and different from 1, got {r}")
        object.__setattr__(self, "r", r)

    def algebra(self) -> AlgebraSpec:
        return AlgebraSpec("H1", self.alpha, self.r)

    def rhs(self, u, u_x, u_xx):
        return fpme_rhs(self, u, u_x, u_xx)

    def rhs_sum(self, u: MonomialSum) -> MonomialSum:
        """``(u^r)_xx`` in closed form."""
        return u.power(self.r).dx(2)


@dataclass(frozen=True)
class FDPMEParams:
    alpha: float
    a: float = 1.0
    b: float = 1.0
    c: float = 1.0

    model = Model.FDPME

    def __post_init__(self):
        object.__setattr__(self, "alpha", _check_alpha(self.alpha))
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def algebra(self) -> AlgebraSpec:
        return AlgebraSpec("H2", self.alpha)

    def rhs(self, u, u_x, u_xx):
        return fdpme_rhs(self, u, u_x, u_xx)

    def rhs_sum(self, u: MonomialSum) -> MonomialSum:
        ux, uxx = u.dx(), u.dx(2)
        return (uxx * uxx).scaled(self.a) + (ux * uxx).scaled(self.b) + (
            u * uxx - (ux * ux).scaled(2.0 / 3.0)).scaled(self.c)


def make_params(model, alpha: float, r: float | None = None, a: float = 1.0,
                b: float = 1.0, c: float = 1.0):
    model = Model.parse(model)
    if model is Model.FPME:
        if r is None:
            raise DomainError("the FPME needs r")
        return FPMEParams(alpha, r)
    return FDPMEParams(alpha, a, b, c)


def fpme_rhs(params: FPMEParams, u, u_x, u_xx):
    """``r(r-1) u^(r-2) u_x^2 + r u^(r-1) u_xx`` for ``u > 0``."""
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0):
        raise DomainError("the FPME right-hand side needs u > 0")
    r = params.r
    out = r * (r - 1.0) * u ** (r - 2.0) * np.square(u_x) + r * u ** (r - 1.0) * u_xx
    return float(out) if out.ndim == 0 else out


def fdpme_rhs(params: FDPMEParams, u, u_x, u_xx):
    out = (params.a * np.square(u_xx) + params.b * np.multiply(u_x, u_xx)
           + params.c * (np.multiply(u, u_xx) - (2.0 / 3.0) * np.square(u_x)))
    return float(out) if np.ndim(out) == 0 else out


# -- closed-form solutions ----------------------------------------------------

class ClosedForm:
    """Mixin: evaluation and analytic derivatives through :meth:`as_sum`."""

    def as_sum(self) -> MonomialSum:
        raise NotImplementedError

    def __call__(self, x, t):
        return self.as_sum()(x, t)

    def dx(self, x, t):
        return self.as_sum().dx()(x, t)

    def dxx(self, x, t):
        return self.as_sum().dx(2)(x, t)

    def dt(self, x, t):
        return self.as_sum().dt()(x, t)

    def format(self, digits: int = 11) -> str:
        return self.as_sum().format(digits)


@dataclass(frozen=True)
class SeparableSolution(ClosedForm):
    """``coeff * t**t_exp * x**x_exp`` on ``x > 0, t > 0``."""

    coeff: float
    t_exp: float = 0.0
    x_exp: float = 0.0

    def __post_init__(self):
        if self.coeff == 0:
            object.__setattr__(self, "t_exp", 0.0)
            object.__setattr__(self, "x_exp", 0.0)
        elif not self.t_exp > -1.0:
            raise DomainError(f"t-exponent {self.t_exp} must exceed -1")

    def as_sum(self) -> MonomialSum:
        return MonomialSum.monomial(self.coeff, self.t_exp, self.x_exp)


@dataclass(frozen=True)
class AffinePlusTime(ClosedForm):
    """``slope * x + f(t)`` with ``slope`` equal to +1 or -1."""

    slope: float
    f: PowerFunction

    def __post_init__(self):
        if self.slope not in (1, -1):
            raise DomainError("slope must be +1 or -1")

    def as_sum(self) -> MonomialSum:
        return MonomialSum([Monomial(float(self.slope), 0.0, 1.0),
                            Monomial(self.f.coeff, self.f.exponent, 0.0)])


@dataclass(frozen=True)
class MonomialSolution(ClosedForm):
    """Any finite sum of monomials, e.g. a transported catalog solution."""

    terms: MonomialSum

    def as_sum(self) -> MonomialSum:
        return self.terms


def as_sum(sol) -> MonomialSum:
    if isinstance(sol, MonomialSum):
        return sol
    if isinstance(sol, ClosedForm):
        return sol.as_sum()
    raise UnsupportedFormError(f"{type(sol).__name__} is not a closed-form solution")


def transport_exact(T: PointTransformation, sol) -> MonomialSolution:
    """Closed-form image ``u_scale * sol((x - x_shift)/x_scale, t/t_scale) + u_shift``.

    Raises :class:`UnsupportedFormError` when an ``x``-translation hits a
    non-polynomial power of ``x``.
    """
    terms = []
    for m in as_sum(sol):
        coeff = T.u_scale * m.coeff / T.t_scale ** m.t_exp
        if T.x_shift == 0:
            terms.append(Monomial(coeff / T.x_scale ** m.x_exp, m.t_exp, m.x_exp))
        else:
            terms.extend(binomial_shift(coeff, m.t_exp, m.x_exp, T.x_shift, T.x_scale))
    if T.u_shift:
        terms.append(Monomial(T.u_shift))
    return MonomialSolution(MonomialSum(terms))


@dataclass(frozen=True)
class SymbolicResidual:
    """Both sides of a model equation and ``lhs - rhs``, as monomial sums."""

    lhs: MonomialSum
    rhs: MonomialSum
    residual: MonomialSum

    @property
    def is_exact(self) -> bool:
        return self.residual.is_zero


def separable_residual(params, sol) -> SymbolicResidual:
    """Closed-form ``D_t^alpha u - RHS[u]`` for a monomial-class solution."""
    u = as_sum(sol)
    if params.model is Model.FPME and len(u) == 1 and not u.terms[0].coeff > 0:
        raise PreconditionError("FPME solutions must be positive: need coefficient > 0")
    if params.model is Model.FPME and u.is_zero:
        raise PreconditionError("FPME solutions must be positive: got u = 0")
    lhs = u.rl_t(params.alpha)
    rhs = params.rhs_sum(u)
    return SymbolicResidual(lhs, rhs, lhs - rhs)


# -- ansatz families ------------------------------------------------------------

@dataclass(frozen=True)
class Profile:
    """A smooth one-variable function with its first two derivatives."""

    name: str
    f: Callable
    df: Callable
    d2f: Callable


PROFILES = (
    Profile("1+z^2", lambda z: 1.0 + z * z, lambda z: 2.0 * z, lambda z: 2.0 + 0.0 * z),
    Profile("2+sin(z)", lambda z: 2.0 + np.sin(z), np.cos, lambda z: -np.sin(z)),
    Profile("exp(z/2)", lambda z: np.exp(0.5 * z), lambda z: 0.5 * np.exp(0.5 * z),
            lambda z: 0.25 * np.exp(0.5 * z)),
)


def profile(name: str) -> Profile:
    for p in PROFILES:
        if p.name == name:
            return p
    raise DomainError(f"unknown profile {name!r}")


@dataclass(frozen=True)
class AnsatzForm:
    """``u = f(z) * m(x, t) + slope * x`` with

    ``z = t^zt * x^zx * exp(zex * x)`` and ``m = t^mt * x^mx * exp(mex * x)``.
    """

    zt: float = 0.0
    zx: float = 0.0
    zex: float = 0.0
    mt: float = 0.0
    mx: float = 0.0
    mex: float = 0.0
    slope: float = 0.0

    def z(self, x, t):
        return np.power(t, self.zt) * np.power(x, self.zx) * np.exp(self.zex * x)

    def m(self, x, t):
        return np.power(t, self.mt) * np.power(x, self.mx) * np.exp(self.mex * x)

    def build(self, prof: Profile) -> AnsatzSolution:
        return AnsatzSolution(self, prof)


class AnsatzSolution:
    """An :class:`AnsatzForm` filled with a profile; analytic derivatives."""

    def __init__(self, form: AnsatzForm, prof: Profile):
        self.form = form
        self.profile = prof

    def _parts(self, x, t):
        F = self.form
        z, m = F.z(x, t), F.m(x, t)
        lz = F.zx / x + F.zex          # z_x / z
        lm = F.mx / x + F.mex          # m_x / m
        return z, m, lz, lm

    def __call__(self, x, t):
        z, m, _, _ = self._parts(x, t)
        return self.profile.f(z) * m + self.form.slope * x

    def dx(self, x, t):
        z, m, lz, lm = self._parts(x, t)
        p = self.profile
        return p.df(z) * z * lz * m + p.f(z) * m * lm + self.form.slope

    def dxx(self, x, t):
        F, p = self.form, self.profile
        z, m, lz, lm = self._parts(x, t)
        z_x, m_x = z * lz, m * lm
        z_xx = z * (lz * lz - F.zx / x ** 2)
        m_xx = m * (lm * lm - F.mx / x ** 2)
        return (p.d2f(z) * z_x ** 2 * m + p.df(z) * z_xx * m
                + 2.0 * p.df(z) * z_x * m_x + p.f(z) * m_xx)

    def dt(self, x, t):
        F, p = self.form, self.profile
        z, m, _, _ = self._parts(x, t)
        return p.df(z) * z * F.zt / t * m + p.f(z) * m * F.mt / t


def ansatz_family(rep: Representative, alpha: float, r: float | None = None,
                  *, printed: bool = False) -> AnsatzForm:
    """Invariant-solution family of an optimal-system representative.

    ``printed=True`` selects the sign-flipped multiplier for ``r15`` that
    fails the invariant-surface condition; it exists for regression tests.
    """
    label, alpha = rep.label, float(alpha)
    if label.startswith("r1"):
        if r is None:
            raise DomainError(f"{label} needs r")
        k = alpha / (r - 1.0)
        forms = {
            "r11": AnsatzForm(zx=1.0, mt=-k),
            "r12": AnsatzForm(zt=1.0, mx=2.0 / (r - 1.0)),
            "r13": AnsatzForm(zt=1.0),
            "r14": AnsatzForm(zt=1.0, zex=-1.0, mex=-k),
            "r15": AnsatzForm(zt=1.0, zex=1.0, mex=-k if printed else k),
        }
        if label == "r16":
            g = rep.param
            if not g:
                raise DomainError("r16 needs a nonzero gamma")
            return AnsatzForm(zt=1.0, zx=-1.0 / g, mx=(2 * g - alpha) / (g * (r - 1.0)))
    else:
        forms = {
            "r21": AnsatzForm(zx=1.0, mt=-alpha),
            "r22": AnsatzForm(zt=1.0),
            "r24": AnsatzForm(zt=1.0, slope=1.0),
            "r25": AnsatzForm(zt=1.0, slope=-1.0),
        }
        if label == "r26":
            rho = rep.param
            if not rho:
                raise DomainError("r26 needs a nonzero rho")
            return AnsatzForm(zt=1.0, zex=-1.0 / rho, mex=-alpha / rho)
    try:
        return forms[label]
    except KeyError:
        raise DomainError(f"{label} has no invariant-solution family") from None


# -- reduced equations ------------------------------------------------------------

@dataclass(frozen=True)
class ReducedODESpec:
    """Record of a similarity reduction.

    ``ode_text`` is the equation as originally printed; ``balanced_text`` is
    the form that monomial balance actually produces when they differ.
    ``balanced_residual(prof, z)`` / ``printed_residual(prof, z)`` evaluate
    the ODE residuals when the reduction is separable, and ``factor(x, t)``
    is the multiplier that links them to the PDE residual of the ansatz.
    """

    case_label: str
    model: Model
    representative: Representative
    similarity_variable: str
    ansatz_text: str
    ode_text: str
    params: dict
    ansatz: AnsatzForm
    balanced_text: str | None = None
    notes: str = ""
    balanced_residual: Callable | None = field(default=None, compare=False)
    printed_residual: Callable | None = field(default=None, compare=False)
    factor: Callable | None = field(default=None, compare=False)
    profile_variable: str = "z"


def _fpme_case1(alpha, r, **_):
    k = alpha / (r - 1.0)
    c_bal = rl_power(alpha, PowerFunction(1.0, -k)).coeff
    c_pr = r * gamma(alpha - alpha * r / (r - 1.0) + 1.0) / gamma((alpha * r + 1.0) / (1.0 - r))

    def spatial(p, x):
        f = p.f(x)
        return r * f ** (r - 2.0) * ((r - 1.0) * p.df(x) ** 2 + f * p.d2f(x))

    return ReducedODESpec(
        "FPME-case1", Model.FPME, Representative("r11"),
        "x", "u = t^(-alpha/(r-1)) f(x)",
        "r Γ(α-αr/(r-1)+1)/Γ((αr+1)/(1-r)) f^(r-2) [(r-1) f'^2 + f f''] = f",
        {"alpha": alpha, "r": r},
        ansatz_family(Representative("r11"), alpha, r),
        balanced_text="Γ(1-α/(r-1))/Γ(1-αr/(r-1)) f = r f^(r-2) [(r-1) f'^2 + f f'']",
        notes="printed Gamma coefficient does not match the power rule; balanced form stored",
        balanced_residual=lambda p, x: c_bal * p.f(x) - spatial(p, x),
        printed_residual=lambda p, x: p.f(x) - c_pr * spatial(p, x),
        factor=lambda x, t: np.power(t, -k * r),
        profile_variable="x",
    )


def _fpme_case2(alpha, r, **_):
    q = 2.0 / (r - 1.0)
    lam = 2.0 * r * (r + 1.0) / (r - 1.0) ** 2

    def residual(p, t):
        t = np.asarray(t, dtype=float)
        lhs, _ = rl_quadrature_many(alpha, p.f, t.ravel())
        return lhs.reshape(t.shape) - lam * p.f(t) ** r

    return ReducedODESpec(
        "FPME-case2", Model.FPME, Representative("r12"),
        "t", "u = x^(2/(r-1)) g(t)",
        "D_t^α g = [2r(r+1)/(r-1)^2] g^r",
        {"alpha": alpha, "r": r, "lambda": lam},
        ansatz_family(Representative("r12"), alpha, r),
        balanced_residual=residual, printed_residual=residual,
        factor=lambda x, t: np.power(x, q),
        profile_variable="t",
    )


_CASE45_ODE = ("D_z^α f = (αr)^2/(r-1)^2 f^r + αr^2/(r-1) z f^(r-1) f' "
               "+ r(r-1) z^2 f^(r-2) f'^2 + r z^2 f^(r-1) f'' + β z f^(r-1) f'")
_UNVERIFIED = "D_z^α after a non-scaling change of variables; the ODE is recorded, not checked"


def _fpme_case4(alpha, r, **_):
    beta = r * (alpha * r + r - 1.0) / (r - 1.0)
    return ReducedODESpec(
        "FPME-case4", Model.FPME, Representative("r14"),
        "z = t e^(-x)", "u = f(z) e^(-αx/(r-1))", _CASE45_ODE,
        {"alpha": alpha, "r": r, "beta": beta},
        ansatz_family(Representative("r14"), alpha, r), notes=_UNVERIFIED)


def _fpme_case5(alpha, r, **_):
    beta = r * (alpha * r + r - 1.0) / (r - 1.0)
    return ReducedODESpec(
        "FPME-case5", Model.FPME, Representative("r15"),
        "z = t e^x", "u = f(z) e^(αx/(r-1))", _CASE45_ODE,
        {"alpha": alpha, "r": r, "beta": beta},
        ansatz_family(Representative("r15"), alpha, r),
        notes="multiplier sign follows the invariants t e^x and u e^(-αx/(r-1)); "
              "the printed e^(-αx/(r-1)) is not invariant. " + _UNVERIFIED)


def _fpme_case6(alpha, r, gamma_=1.0, **_):
    g = float(gamma_)
    return ReducedODESpec(
        "FPME-case6", Model.FPME, Representative("r16", g),
        "z = t x^(-1/γ)", "u = f(z) x^((2γ-α)/(γ(r-1)))",
        "D_z^α f = (2γ-α)r/(γ(r-1)) (γr-αr+γ)/(γ(r-1)) f^r "
        "- (2γ-α)r^2/(γ^2(r-1)) z f^(r-1) f' + r(r-1)/γ^2 z^2 f^(r-2) f'^2 "
        "+ r/γ^2 z^2 f^(r-1) f''",
        {"alpha": alpha, "r": r, "gamma": g},
        ansatz_family(Representative("r16", g), alpha, r), notes=_UNVERIFIED)


def _fdpme_case1(alpha, a=1.0, b=1.0, c=1.0, **_):
    if not alpha < 0.5:
        raise DomainError("the t^(-alpha) reduction needs 0 < alpha < 1/2")
    c_bal = rl_power(alpha, PowerFunction(1.0, -alpha)).coeff
    c_pr = gamma(1.0 - alpha) / (1.0 - 2.0 * alpha)

    def rhs(p, x):
        f, f1, f2 = p.f(x), p.df(x), p.d2f(x)
        return a * f2 ** 2 + b * f1 * f2 + c * (f * f2 - (2.0 / 3.0) * f1 ** 2)

    def rhs_printed(p, x):
        f1, f2 = p.df(x), p.d2f(x)
        return a * f2 ** 2 + b * f1 * f2 + c * f2 - (2.0 / 3.0) * c * f1 ** 2

    return ReducedODESpec(
        "FDPME-case1", Model.FDPME, Representative("r21"),
        "x", "u = t^(-α) f(x)",
        "Γ(1-α)/(1-2α) f = a f''^2 + b f' f'' + c f'' - (2/3) c f'^2",
        {"alpha": alpha, "a": a, "b": b, "c": c},
        ansatz_family(Representative("r21"), alpha),
        balanced_text="Γ(1-α)/Γ(1-2α) f = a f''^2 + b f' f'' + c (f f'' - (2/3) f'^2)",
        notes="coefficient Γ(1-α)/Γ(1-2α) and the c f f'' term follow from monomial balance",
        balanced_residual=lambda p, x: c_bal * p.f(x) - rhs(p, x),
        printed_residual=lambda p, x: c_pr * p.f(x) - rhs_printed(p, x),
        factor=lambda x, t: np.power(t, -2.0 * alpha),
        profile_variable="x",
    )


def _fdpme_case5(alpha, rho=1.0, a=1.0, b=1.0, c=1.0, **_):
    rho = float(rho)
    return ReducedODESpec(
        "FDPME-case5", Model.FDPME, Representative("r26", rho),
        "z = t e^(-x/ρ)", "u = f(z) e^(-αx/ρ)",
        "D_z^α f = a((1+2α)/ρ z f' + f''/ρ^2 + α^2/ρ^2 f)^2 - (2/3)c(z f' + f)^2 "
        "+ c((1+α)/ρ^2 z f'' f + z^2 f f''/ρ^2 + α^2/ρ^2 f^2 + α/ρ^2 z f' f) "
        "- b((1+α)/ρ^2 z^2 f'^2 + z^3 f' f''/ρ^3 + α^2/ρ^3 z f f' + α/ρ^3 z^2 f'^2 "
        "+ α(1+α)/ρ^3 z f' f + α/ρ^3 z^2 f'' f + α^3/ρ^3 f^2 + α^2/ρ^3 z f f')",
        {"alpha": alpha, "rho": rho, "a": a, "b": b, "c": c},
        ansatz_family(Representative("r26", rho), alpha),
        notes="the second invariant is u e^(αx/ρ), consistent with the ansatz. " + _UNVERIFIED)


_REDUCED = {
    "FPME-case1": _fpme_case1,
    "FPME-case2": _fpme_case2,
    "FPME-case4": _fpme_case4,
    "FPME-case5": _fpme_case5,
    "FPME-case6": _fpme_case6,
    "FDPME-case1": _fdpme_case1,
    "FDPME-case5": _fdpme_case5,
}


# -- catalog ----------------------------------------------------------------------

@dataclass(frozen=True)
class EntryInfo:
    id: str
    model: Model
    kind: str            # "solution" | "reduced" | "transport"
    defaults: dict
    summary: str
    expected: str = "verified"


_FPME, _FDPME = Model.FPME, Model.FDPME

ENTRIES: dict[str, EntryInfo] = {e.id.lower(): e for e in (
    EntryInfo("T33i", _FPME, "solution", {"alpha": 0.4, "r": 3.0},
              "K t^(α/(1-r)) x^(2/(r-1)), K from the power-law ODE closed form"),
    EntryInfo("T33ii", _FPME, "solution", {"alpha": 0.5},
              "[6Γ(α+1)/Γ(2α+1)]^2 t^(2α) x^-4 at r = 1/2"),
    EntryInfo("T33iii", _FPME, "solution", {"alpha": 0.2},
              "Γ(1-α)/(12Γ(1-2α)) t^-α x^2 at r = 2"),
    EntryInfo("T33iii-paper-proof-variant", _FPME, "solution", {"alpha": 0.2},
              "[Γ(1-α)/Γ(1-2α)]^2/12 t^-α x^2 at r = 2 (squared ratio)", "refuted"),
    EntryInfo("FPME-case3", _FPME, "solution", {"alpha": 0.3, "r": 2.0, "lam": 2.0},
              "λ t^(α-1)"),
    EntryInfo("FPME-case1-reduced", _FPME, "reduced", {"alpha": 0.3, "r": 2.0},
              "u = t^(-α/(r-1)) f(x)"),
    EntryInfo("FPME-case2-reduced", _FPME, "reduced", {"alpha": 0.5, "r": 0.5},
              "u = x^(2/(r-1)) g(t)"),
    EntryInfo("FPME-case4-reduced", _FPME, "reduced", {"alpha": 0.3, "r": 2.0},
              "u = f(t e^-x) e^(-αx/(r-1))"),
    EntryInfo("FPME-case5-reduced", _FPME, "reduced", {"alpha": 0.3, "r": 2.0},
              "u = f(t e^x) e^(αx/(r-1))"),
    EntryInfo("FPME-case6-reduced", _FPME, "reduced", {"alpha": 0.3, "r": 2.0, "gamma": 0.5},
              "u = f(t x^(-1/γ)) x^((2γ-α)/(γ(r-1)))"),
    EntryInfo("FDPME-case1", _FDPME, "reduced", {"alpha": 0.3, "a": 1.0, "b": 1.0, "c": 1.0},
              "u = t^-α f(x)"),
    EntryInfo("FDPME-case2", _FDPME, "solution",
              {"alpha": 0.5, "a": 1.0, "b": 1.0, "c": 1.0, "kappa": 1.0}, "κ t^(α-1)"),
    EntryInfo("FDPME-case3", _FDPME, "solution", {"alpha": 0.5, "a": 1.0, "b": 1.0, "c": 3.0},
              "x - (2c/3) t^α/Γ(α+1)", "refuted"),
    EntryInfo("FDPME-case4", _FDPME, "solution", {"alpha": 0.5, "a": 1.0, "b": 1.0, "c": 3.0},
              "-x - (2c/3) t^α/Γ(α+1)", "refuted"),
    EntryInfo("FDPME-case5", _FDPME, "reduced",
              {"alpha": 0.3, "a": 1.0, "b": 1.0, "c": 1.0, "rho": 1.0},
              "u = f(t e^(-x/ρ)) e^(-αx/ρ)"),
    EntryInfo("FDPME-V23-transport", _FDPME, "transport",
              {"alpha": 0.5, "a": 1.0, "b": 1.0, "c": 1.0, "kappa": 1.0, "eps": 1.0},
              "κ t^(α-1) + ε, the u-translate of FDPME-case2", "refuted"),
)}


def entry_info(entry: str) -> EntryInfo:
    try:
        return ENTRIES[str(entry).lower()]
    except KeyError:
        raise LookupError(f"unknown catalog entry {entry!r}") from None


def entry_ids() -> tuple[str, ...]:
    return tuple(e.id for e in ENTRIES.values())


def entry_params(entry: str, **overrides) -> dict:
    """Defaults of ``entry`` updated with the non-``None`` overrides it knows."""
    info = entry_info(entry)
    out = dict(info.defaults)
    for key, value in overrides.items():
        if value is None:
            continue
        if key not in out:
            raise DomainError(f"{info.id} has no parameter {key!r}")
        out[key] = float(value)
    return out


def model_params(entry: str, **overrides):
    """Model parameters (:class:`FPMEParams` / :class:`FDPMEParams`) for ``entry``."""
    info = entry_info(entry)
    p = entry_params(entry, **overrides)
    if info.model is Model.FPME:
        fixed = {"t33ii": 0.5, "t33iii": 2.0, "t33iii-paper-proof-variant": 2.0}
        return FPMEParams(p["alpha"], fixed.get(info.id.lower(), p.get("r")))
    return FDPMEParams(p["alpha"], p["a"], p["b"], p["c"])


def _t33i(alpha, r):
    if not alpha / (1.0 - r) > -1.0:
        raise DomainError(f"T33i needs alpha/(1-r) > -1, got {alpha / (1.0 - r)}")
    lam = 2.0 * r * (r + 1.0) / (r - 1.0) ** 2
    g = lemma21_solution(LemmaCase.I, alpha, 0.0, lam, r)
    return SeparableSolution(g.coeff, g.exponent, 2.0 / (r - 1.0))


def _t33iii_ratio(alpha):
    if not alpha < 0.5:
        raise DomainError(f"T33iii needs alpha < 1/2, got {alpha}")
    return gamma(1.0 - alpha) / gamma(1.0 - 2.0 * alpha)


def catalog(entry: str, **overrides):
    """Exact solution (or reduced-equation record) stored under ``entry``."""
    info = entry_info(entry)
    p = entry_params(entry, **overrides)
    key = info.id
    alpha = _check_alpha(p["alpha"])
    if info.kind == "reduced":
        return reduced_ode(key, **{k: v for k, v in p.items()})
    if key == "T33i":
        FPMEParams(alpha, p["r"])
        return _t33i(alpha, p["r"])
    if key == "T33ii":
        A = (6.0 * gamma(alpha + 1.0) / gamma(2.0 * alpha + 1.0)) ** 2
        return SeparableSolution(A, 2.0 * alpha, -4.0)
    if key == "T33iii":
        return SeparableSolution(_t33iii_ratio(alpha) / 12.0, -alpha, 2.0)
    if key == "T33iii-paper-proof-variant":
        return SeparableSolution(_t33iii_ratio(alpha) ** 2 / 12.0, -alpha, 2.0)
    if key == "FPME-case3":
        FPMEParams(alpha, p["r"])
        if not p["lam"] > 0:
            raise DomainError("FPME-case3 needs lambda > 0 (positive density)")
        return SeparableSolution(p["lam"], alpha - 1.0, 0.0)
    if key == "FDPME-case2":
        return SeparableSolution(p["kappa"], alpha - 1.0, 0.0)
    if key in ("FDPME-case3", "FDPME-case4"):
        f = PowerFunction(-2.0 * p["c"] / (3.0 * gamma(alpha + 1.0)), alpha)
        return AffinePlusTime(1.0 if key == "FDPME-case3" else -1.0, f)
    if key == "FDPME-V23-transport":
        base = SeparableSolution(p["kappa"], alpha - 1.0, 0.0)
        return transport_exact(PointTransformation(u_shift=p["eps"]), base)
    raise LookupError(f"unknown catalog entry {entry!r}")  # pragma: no cover


def reduced_ode(entry: str, **params) -> ReducedODESpec:
    """Stored reduced-equation record; accepts ids with or without ``-reduced``."""
    key = str(entry).lower().removesuffix("-reduced")
    for name, builder in _REDUCED.items():
        if name.lower() == key:
            defaults = entry_info(name if name.startswith("FDPME") else name + "-reduced").defaults
            merged = dict(defaults)
            merged.update({k: float(v) for k, v in params.items() if v is not None})
            if "gamma" in merged:
                merged["gamma_"] = merged.pop("gamma")
            merged["alpha"] = _check_alpha(merged["alpha"])
            return builder(**merged)
    raise LookupError(f"unknown reduced equation {entry!r}")
