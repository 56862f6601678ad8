"""Riemann-Liouville calculus on power functions, plus numerical evaluators.

Three routes to the same derivative live here and are meant to check each
other:

* :func:`rl_power` -- exact power rule, ``D^a t^p = G(p+1)/G(p+1-a) t^(p-a)``;
* :func:`rl_quadrature` -- the defining integral, evaluated by tanh-sinh
  quadrature with an extrapolated central difference for the outer ``d/dt``;
* :func:`rl_gl` -- first-order Grünwald-Letnikov sums on uniform samples.

The lower terminal is always 0.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special
from scipy.integrate import tanhsinh

from .errors import AccuracyError, DomainError, GammaPoleError

#: Distance to a non-positive integer below which a Gamma argument is snapped
#: onto the pole.  Needed because e.g. ``(alpha - 1) + 1 - alpha`` is not 0.0
#: in floating point.
POLE_TOL = 1e-12
#: Exponent equality tolerance for monomial comparisons.
EXPONENT_TOL = 1e-12
#: Default relative tolerance for closed-form coefficient comparisons.
COEFF_RTOL = 1e-12


def _near_pole(x: float, tol: float = 0.0) -> bool:
    n = round(x)
    return n <= 0 and abs(x - n) <= tol


def snap_gamma_argument(x: float, tol: float = POLE_TOL) -> float:
    """Round ``x`` onto a Gamma pole if it is within ``tol`` of one."""
    if _near_pole(x, tol):
        return float(round(x))
    return x


def gamma(x: float) -> float:
    """Gamma function; raises :class:`GammaPoleError` at 0, -1, -2, ..."""
    x = float(x)
    if _near_pole(x):
        raise GammaPoleError(f"Gamma has a pole at x={x:g}")
    return math.gamma(x)


def reciprocal_gamma(x: float) -> float:
    """``1/Gamma(x)``, exactly 0.0 at the poles of Gamma."""
    x = float(x)
    if _near_pole(x):
        return 0.0
    try:
        g = math.gamma(x)
    except OverflowError:
        return 0.0
    if g == 0.0 or not math.isfinite(g):
        return float(special.rgamma(x))
    return 1.0 / g


def _check_order(alpha: float) -> float:
    alpha = float(alpha)
    if not alpha > 0:
        raise DomainError(f"fractional order must be positive, got alpha={alpha}")
    return alpha


@dataclass(frozen=True, eq=False)
class PowerFunction:
    """``coeff * t**exponent`` on ``t > 0``.

    All zero-coefficient values compare equal; they are normalised to
    exponent 0 on construction.
    """

    coeff: float
    exponent: float = 0.0

    def __post_init__(self):
        coeff = float(self.coeff)
        exponent = float(self.exponent)
        if coeff == 0.0:
            exponent = 0.0
        object.__setattr__(self, "coeff", coeff)
        object.__setattr__(self, "exponent", exponent)

    @property
    def is_zero(self) -> bool:
        return self.coeff == 0.0

    def __call__(self, t):
        if self.is_zero:
            return np.zeros_like(np.asarray(t, dtype=float))[()]
        return self.coeff * np.power(t, self.exponent)

    def __eq__(self, other):
        if not isinstance(other, PowerFunction):
            return NotImplemented
        return self.coeff == other.coeff and self.exponent == other.exponent

    def __hash__(self):
        return hash((self.coeff, self.exponent))

    def isclose(self, other: PowerFunction, rtol: float = COEFF_RTOL,
                etol: float = EXPONENT_TOL) -> bool:
        if self.is_zero or other.is_zero:
            return self.is_zero and other.is_zero
        scale = max(abs(self.coeff), abs(other.coeff))
        return (abs(self.coeff - other.coeff) <= rtol * scale
                and abs(self.exponent - other.exponent) <= etol)

    def __mul__(self, other):
        if isinstance(other, PowerFunction):
            return PowerFunction(self.coeff * other.coeff,
                                 self.exponent + other.exponent)
        return PowerFunction(self.coeff * float(other), self.exponent)

    __rmul__ = __mul__

    def __neg__(self):
        return PowerFunction(-self.coeff, self.exponent)

    def __pow__(self, r: float) -> PowerFunction:
        r = float(r)
        if self.is_zero:
            if r <= 0:
                raise DomainError("0 raised to a non-positive power")
            return ZERO
        if self.coeff < 0 and not r.is_integer():
            raise DomainError(
                f"negative coefficient {self.coeff} raised to non-integer power {r}")
        return PowerFunction(self.coeff ** r, self.exponent * r)

    def __repr__(self):
        return f"PowerFunction({self.coeff!r}·t^{self.exponent!r})"


ZERO = PowerFunction(0.0)


def rl_power(alpha: float, g: PowerFunction) -> PowerFunction:
    """Exact RL derivative of ``A t^p`` for ``p > -1``.

    Returns the zero function when ``p + 1 - alpha`` is a pole of Gamma, so
    ``D^a t^(a-1) = 0`` comes out of the arithmetic.
    """
    alpha = _check_order(alpha)
    if g.is_zero:
        return ZERO
    if not g.exponent > -1:
        raise DomainError(
            f"power rule needs exponent > -1, got {g.exponent}")
    shifted = snap_gamma_argument(g.exponent + 1.0 - alpha)
    coeff = g.coeff * gamma(g.exponent + 1.0) * reciprocal_gamma(shifted)
    return PowerFunction(coeff, g.exponent - alpha)


# -- quadrature route -------------------------------------------------------

_RIDDERS_CON = 1.4
_RIDDERS_NTAB = 10
_QUAD_RTOL = 1e-13
_QUAD_ATOL = 1e-14


def _scaled_integral(alpha, f, ts):
    """``t^(1-a) * int_0^1 (1-s)^(-a) f(t s) ds`` for every ``t`` in ``ts``.

    The unit interval is split at 1/2 and the upper half is reflected, so
    both kernel singularities sit at an origin where floats are dense.
    """
    ts = np.asarray(ts, dtype=float)
    # per-t magnitude so an absolute tolerance can cover integrals that
    # cancel to (nearly) zero
    probe = np.linspace(0.05, 1.0, 20)
    with np.errstate(all="ignore"):
        mag = np.nanmax(np.abs(f(ts[:, None] * probe[None, :])), axis=1)
    mag = np.where(np.isfinite(mag) & (mag > 0), mag, 1.0)

    def lower(s, t, m):
        return (1.0 - s) ** (-alpha) * f(t * s) / m

    def upper(v, t, m):
        return v ** (-alpha) * f(t * (1.0 - v)) / m

    total = np.zeros_like(ts)
    error = np.zeros_like(ts)
    for integrand in (lower, upper):
        with np.errstate(all="ignore"):
            res = tanhsinh(integrand, 0.0, 0.5, args=(ts, mag), atol=_QUAD_ATOL,
                           rtol=_QUAD_RTOL, maxlevel=12)
        integral = np.asarray(res.integral, dtype=float)
        err = np.asarray(res.error, dtype=float)
        if not np.all(np.isfinite(integral)):
            raise AccuracyError("quadrature produced non-finite values",
                                estimate=math.inf)
        total = total + integral
        error = error + np.where(np.isfinite(err), err, math.inf)
    scale = mag * ts ** (1.0 - alpha)
    return scale * total, scale * error


def _ridders(values_plus, values_minus, hs, noise):
    """Neville extrapolation of central differences (step ratio CON)."""
    fac0 = _RIDDERS_CON ** 2
    n = len(hs)
    table = np.empty((n, n))
    best, err = math.nan, math.inf
    for i in range(n):
        table[0, i] = (values_plus[i] - values_minus[i]) / (2.0 * hs[i])
        fac = fac0
        for j in range(1, i + 1):
            table[j, i] = (table[j - 1, i] * fac - table[j - 1, i - 1]) / (fac - 1.0)
            fac *= fac0
            errt = max(abs(table[j, i] - table[j - 1, i]),
                       abs(table[j, i] - table[j - 1, i - 1]))
            if errt <= err:
                err = errt
                best = table[j, i]
        if i > 0 and abs(table[i, i] - table[i - 1, i - 1]) >= 2.0 * err:
            break
    if not math.isfinite(best):
        best = table[0, 0]
    return best, err + noise / hs[-1]


def rl_quadrature_many(alpha: float, f: Callable, ts, tol: float = 1e-8):
    """Vectorised :func:`rl_quadrature` over an array of evaluation times.

    Returns ``(values, estimates)``; raises :class:`AccuracyError` if any
    estimate exceeds ``tol * max(1, |value|)``.
    """
    alpha = _check_order(alpha)
    if not alpha < 1:
        raise DomainError(f"quadrature route requires 0 < alpha < 1, got {alpha}")
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if np.any(ts <= 0):
        raise DomainError("evaluation times must be positive")

    hs = 0.25 / _RIDDERS_CON ** np.arange(_RIDDERS_NTAB)
    # rows: evaluation time, columns: step index
    steps = ts[:, None] * hs[None, :]
    nodes = np.concatenate([ts[:, None] + steps, ts[:, None] - steps], axis=1)
    vals, qerr = _scaled_integral(alpha, f, nodes.ravel())
    vals = vals.reshape(nodes.shape)
    qerr = qerr.reshape(nodes.shape)

    rgam = reciprocal_gamma(1.0 - alpha)
    out = np.empty_like(ts)
    est = np.empty_like(ts)
    n = _RIDDERS_NTAB
    for i in range(len(ts)):
        d, e = _ridders(vals[i, :n], vals[i, n:], steps[i], float(np.max(qerr[i])))
        out[i] = d * rgam
        est[i] = e * rgam
    bad = est > tol * np.maximum(1.0, np.abs(out))
    if np.any(bad):
        worst = float(np.max(est[bad]))
        raise AccuracyError(
            f"RL quadrature did not reach tol={tol:g} (estimate {worst:.3g})",
            estimate=worst)
    return out, est


def rl_quadrature(alpha: float, f: Callable, t: float, tol: float = 1e-8) -> float:
    """RL derivative of ``f`` at ``t`` straight from the defining integral.

    ``f`` must accept numpy arrays.  After ``s = t*sigma`` the expression is
    ``t^(1-a) int_0^1 (1-sigma)^(-a) f(t sigma) d sigma / Gamma(1-a)``, whose
    ``t``-derivative is taken by Richardson-extrapolated central differences.
    ``tol`` is absolute for values below 1 in magnitude and relative above.
    """
    values, _ = rl_quadrature_many(alpha, f, [t], tol)
    return float(values[0])


# -- Grünwald-Letnikov route ------------------------------------------------

def gl_weights(alpha: float, n: int) -> np.ndarray:
    """``w_k = (-1)^k binom(alpha, k)`` for ``k < n``."""
    if n < 1:
        raise DomainError("need at least one weight")
    ratios = 1.0 - (float(alpha) + 1.0) / np.arange(1, n)
    return np.concatenate([[1.0], np.cumprod(ratios)])


def gl_apply(weights: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Un-scaled GL sums ``sum_{k<=n} w_k v_{n-k}`` along the first axis."""
    values = np.asarray(values, dtype=float)
    out = np.empty_like(values)
    for n in range(values.shape[0]):
        out[n] = weights[:n + 1] @ values[n::-1]
    return out


@dataclass(frozen=True)
class SampledFunction:
    """Samples ``values[k] = f(t0 + k h)``."""

    t0: float
    h: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise DomainError("need at least 2 samples")
        if not self.h > 0 or self.t0 < 0:
            raise DomainError("require h > 0 and t0 >= 0")
        object.__setattr__(self, "values", values)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.h * np.arange(self.values.size)

    @classmethod
    def from_callable(cls, f: Callable, t_end: float, n: int) -> SampledFunction:
        """Sample ``f`` on ``n + 1`` uniform nodes of ``[0, t_end]``."""
        h = t_end / n
        return cls(0.0, h, f(h * np.arange(n + 1)))


def rl_gl(alpha: float, f: SampledFunction) -> SampledFunction:
    """First-order Grünwald-Letnikov RL derivative on the sample nodes."""
    alpha = _check_order(alpha)
    if f.t0 != 0:
        raise DomainError("GL derivative needs samples starting at t0 = 0")
    w = gl_weights(alpha, f.values.size)
    return SampledFunction(0.0, f.h, f.h ** (-alpha) * gl_apply(w, f.values))


# -- closed-form solutions of D^a g = lambda t^beta g^r ---------------------

class LemmaCase(enum.Enum):
    I = "I"      # general r
    II = "II"    # r = 1/2
    III = "III"  # r = 2

    @classmethod
    def parse(cls, value) -> LemmaCase:
        if isinstance(value, cls):
            return value
        key = {"1": "I", "2": "II", "3": "III"}.get(str(value), str(value).upper())
        try:
            return cls(key)
        except ValueError:
            raise DomainError(f"unknown case {value!r}; use I, II or III") from None


def _gamma_or_domain(x, what):
    try:
        return gamma(x)
    except GammaPoleError:
        raise DomainError(f"{what}: Gamma pole at {x:g}") from None


def lemma21_solution(case, alpha: float, beta: float, lam: float,
                     r: float | None = None) -> PowerFunction:
    """Power-law solution of ``D^alpha g = lam * t^beta * g^r`` (terminal 0).

    Case I handles general ``r`` and needs ``r`` explicitly; cases II and
    III fix ``r`` at 1/2 and 2.
    """
    case = LemmaCase.parse(case)
    alpha = _check_order(alpha)
    beta = float(beta)
    lam = float(lam)

    if case is LemmaCase.I:
        if r is None:
            raise DomainError("case I needs r")
        r = float(r)
        if not (r > 0 and r != 1):
            raise DomainError(f"case I requires r > 0 and r != 1, got r={r}")
        p = (alpha + beta) / (1.0 - r)
        if not p > -1:
            raise DomainError(
                f"case I requires (beta+alpha)/(1-r) > -1, got {p:g}")
        if lam == 0:
            raise DomainError("case I requires lambda != 0")
        num = _gamma_or_domain(p + 1.0, "case I")
        # same argument the power rule uses, so closure holds near Gamma poles
        den = _gamma_or_domain(snap_gamma_argument(p + 1.0 - alpha), "case I")
        base = num / (lam * den)   # K^(r-1) must equal this
        if base > 0:
            return PowerFunction(base ** (1.0 / (r - 1.0)), p)
        # a negative K needs K^r real and K^(r-1) < 0: r - 1 an odd integer
        if r.is_integer() and int(r - 1) % 2 == 1:
            return PowerFunction(-((-base) ** (1.0 / (r - 1.0))), p)
        raise DomainError(
            f"case I: Gamma(p+1)/(lambda Gamma(p+1-alpha)) = {base:g} "
            f"is not a real (r-1)-th power for r={r:g}")

    if case is LemmaCase.II:
        if r is not None and float(r) != 0.5:
            raise DomainError(f"case II fixes r = 1/2, got r={r}")
        if not 2 * (alpha + beta) > -1:
            raise DomainError(
                f"case II requires 2(alpha+beta) > -1, got {2 * (alpha + beta):g}")
        if lam == 0:
            raise DomainError("case II requires lambda != 0")
        root = (lam * _gamma_or_domain(alpha + 2 * beta + 1, "case II")
                / _gamma_or_domain(2 * alpha + 2 * beta + 1, "case II"))
        if root <= 0:
            # g^(1/2) is the principal root, so the bracket must be positive
            raise DomainError(
                f"case II requires lambda*Gamma(alpha+2beta+1)/Gamma(2alpha+2beta+1) > 0, "
                f"got {root:g}")
        return PowerFunction(root ** 2, 2 * (alpha + beta))

    if r is not None and float(r) != 2.0:
        raise DomainError(f"case III fixes r = 2, got r={r}")
    if not alpha + beta < 1:
        raise DomainError(f"case III requires alpha+beta < 1, got {alpha + beta:g}")
    if lam == 0:
        raise DomainError("case III requires lambda != 0")
    if _near_pole(1 - 2 * alpha - beta, POLE_TOL):
        raise DomainError(
            f"case III requires 1-2alpha-beta off the Gamma poles, got {1 - 2 * alpha - beta:g}")
    coeff = gamma(1 - alpha - beta) / (lam * gamma(1 - 2 * alpha - beta))
    return PowerFunction(coeff, -(alpha + beta))


@dataclass(frozen=True)
class FracODEResidual:
    """Both sides of ``D^alpha g = lam t^beta g^r`` as power functions."""

    lhs: PowerFunction
    rhs: PowerFunction

    def matched(self, rtol: float = COEFF_RTOL, etol: float = EXPONENT_TOL) -> bool:
        return self.lhs.isclose(self.rhs, rtol, etol)


def frac_ode_residual(alpha: float, beta: float, r: float, lam: float,
                      g: PowerFunction) -> FracODEResidual:
    lhs = rl_power(alpha, g)
    if g.is_zero or lam == 0:
        return FracODEResidual(lhs, ZERO)
    rhs = float(lam) * PowerFunction(1.0, beta) * g ** r
    return FracODEResidual(lhs, rhs)
