"""Sums of bivariate monomials ``A t^p x^q`` with like-term collection.

This is the closed universe for the exact solutions: RL derivatives in
``t`` act termwise through the power rule, and ``x``-derivatives, products
and integer powers stay inside the class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DomainError, UnsupportedFormError
from .frackernel import (COEFF_RTOL, EXPONENT_TOL, PowerFunction, gamma,
                         rl_power, snap_gamma_argument)


@dataclass(frozen=True)
class Monomial:
    """``coeff * t**t_exp * x**x_exp``.

    ``gamma_den`` is display-only: when set, the term prints as
    ``(coeff*Gamma(gamma_den)) ... / Gamma(gamma_den)``.
    """

    coeff: float
    t_exp: float = 0.0
    x_exp: float = 0.0
    gamma_den: float | None = None

    def __call__(self, x, t):
        return self.coeff * np.power(t, self.t_exp) * np.power(x, self.x_exp)

    def same_powers(self, other: Monomial, tol: float = EXPONENT_TOL) -> bool:
        return (abs(self.t_exp - other.t_exp) <= tol
                and abs(self.x_exp - other.x_exp) <= tol)

    def __mul__(self, other: Monomial) -> Monomial:
        return Monomial(self.coeff * other.coeff, self.t_exp + other.t_exp,
                        self.x_exp + other.x_exp)

    def scaled(self, factor: float) -> Monomial:
        return Monomial(self.coeff * factor, self.t_exp, self.x_exp, self.gamma_den)

    def dx(self) -> Monomial:
        return Monomial(self.coeff * self.x_exp, self.t_exp, self.x_exp - 1.0)

    def dt(self) -> Monomial:
        return Monomial(self.coeff * self.t_exp, self.t_exp - 1.0, self.x_exp)

    def format(self, digits: int = 11) -> str:
        return format_monomial(self, digits)


def _fmt_num(v: float, digits: int) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return f"{v:.{digits}g}"


def format_monomial(m: Monomial, digits: int = 11) -> str:
    coeff = m.coeff
    suffix = ""
    if m.gamma_den is not None:
        coeff = coeff * gamma(m.gamma_den)
        suffix = f"/Γ({_fmt_num(m.gamma_den, digits)})"
    parts = []
    if m.x_exp != 0:
        parts.append("x" if m.x_exp == 1 else f"x^{_fmt_num(m.x_exp, digits)}")
    if m.t_exp != 0:
        parts.append("t" if m.t_exp == 1 else f"t^{_fmt_num(m.t_exp, digits)}")
    body = "·".join(parts)
    rounded = float(f"{coeff:.{digits}g}")
    if body and rounded == 1:
        text = body
    elif body and rounded == -1:
        text = "-" + body
    elif body:
        text = f"{_fmt_num(coeff, digits)}·{body}"
    else:
        text = _fmt_num(coeff, digits)
    return text + suffix


class MonomialSum:
    """Immutable sum of :class:`Monomial` terms with like terms merged.

    A merged coefficient is dropped when it is below ``rtol`` times the
    largest contribution that went into it, so exact cancellations survive
    floating-point rounding.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Monomial] = (), rtol: float = COEFF_RTOL):
        merged: list[list] = []  # [monomial, magnitude of largest contribution]
        for term in terms:
            if term.coeff == 0:
                continue
            for slot in merged:
                if slot[0].same_powers(term):
                    m = slot[0]
                    slot[0] = Monomial(m.coeff + term.coeff, m.t_exp, m.x_exp)
                    slot[1] = max(slot[1], abs(term.coeff))
                    break
            else:
                merged.append([term, abs(term.coeff)])
        kept = [m for m, big in merged if abs(m.coeff) > rtol * big]
        kept.sort(key=lambda m: (-m.x_exp, -m.t_exp))
        self.terms = tuple(kept)

    @classmethod
    def monomial(cls, coeff, t_exp=0.0, x_exp=0.0) -> MonomialSum:
        return cls([Monomial(float(coeff), float(t_exp), float(x_exp))])

    @classmethod
    def constant(cls, c: float) -> MonomialSum:
        return cls.monomial(c)

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __call__(self, x, t):
        total = 0.0
        for m in self.terms:
            total = total + m(x, t)
        return total

    def __add__(self, other: MonomialSum) -> MonomialSum:
        if not isinstance(other, MonomialSum):
            other = MonomialSum.constant(float(other))
        return MonomialSum(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self) -> MonomialSum:
        return self.scaled(-1.0)

    def __sub__(self, other: MonomialSum) -> MonomialSum:
        return self + (-other)

    def scaled(self, factor: float) -> MonomialSum:
        return MonomialSum(m.scaled(factor) for m in self.terms)

    def __mul__(self, other):
        if not isinstance(other, MonomialSum):
            return self.scaled(float(other))
        return MonomialSum(a * b for a in self.terms for b in other.terms)

    __rmul__ = __mul__

    def power(self, r: float) -> MonomialSum:
        """``self**r``: any real ``r`` for a single positive-coefficient term,
        non-negative integers for sums."""
        r = float(r)
        if len(self.terms) == 1:
            m = self.terms[0]
            if m.coeff < 0 and not r.is_integer():
                raise DomainError("negative monomial raised to a non-integer power")
            return MonomialSum([Monomial(m.coeff ** r, m.t_exp * r, m.x_exp * r)])
        if self.is_zero:
            if r <= 0:
                raise DomainError("0 raised to a non-positive power")
            return self
        if not (r.is_integer() and r >= 0):
            raise UnsupportedFormError(
                f"a {len(self.terms)}-term sum raised to r={r} is not a monomial sum")
        out = MonomialSum.constant(1.0)
        for _ in range(int(r)):
            out = out * self
        return out

    def dx(self, order: int = 1) -> MonomialSum:
        out = self
        for _ in range(order):
            out = MonomialSum(m.dx() for m in out.terms)
        return out

    def dt(self) -> MonomialSum:
        return MonomialSum(m.dt() for m in self.terms)

    def rl_t(self, alpha: float) -> MonomialSum:
        """Termwise RL derivative in ``t``; keeps the Gamma denominator for display."""
        out = []
        for m in self.terms:
            d = rl_power(alpha, PowerFunction(m.coeff, m.t_exp))
            if d.is_zero:
                continue
            den = snap_gamma_argument(m.t_exp + 1.0 - alpha)
            out.append(Monomial(d.coeff, d.exponent, m.x_exp, gamma_den=den))
        return MonomialSum(out)

    def t_factor(self) -> PowerFunction | None:
        """The ``x``-free single term as a :class:`PowerFunction`, if that is
        what this sum is."""
        if self.is_zero:
            return PowerFunction(0.0)
        if len(self.terms) == 1 and self.terms[0].x_exp == 0:
            m = self.terms[0]
            return PowerFunction(m.coeff, m.t_exp)
        return None

    def isclose(self, other: MonomialSum) -> bool:
        return (self - other).is_zero

    def format(self, digits: int = 11) -> str:
        if self.is_zero:
            return "0"
        text = " + ".join(m.format(digits) for m in self.terms)
        return text.replace("+ -", "- ")

    def __repr__(self):
        return f"MonomialSum({self.format()})"


def binomial_shift(coeff: float, t_exp: float, x_exp: float, shift: float,
                   scale: float = 1.0) -> MonomialSum:
    """Expand ``coeff t^p ((x - shift)/scale)^q`` for a non-negative integer ``q``."""
    if not (float(x_exp).is_integer() and x_exp >= 0):
        raise UnsupportedFormError(
            f"x^{x_exp} does not stay polynomial under translation")
    q = int(x_exp)
    terms = []
    for k in range(q + 1):
        c = coeff * math.comb(q, k) * (-shift) ** (q - k) / scale ** q
        terms.append(Monomial(c, t_exp, float(k)))
    return MonomialSum(terms)
