"""The two three-dimensional symmetry algebras and their adjoint machinery.

``H1`` is spanned by the FPME generators

    V11 = t d/dt - alpha/(r-1) u d/du,  V12 = x d/dx + 2/(r-1) u d/du,  V13 = d/dx

and ``H2`` by the FDPME generators

    V21 = t d/dt - alpha u d/du,  V22 = d/dx,  V23 = d/du.

Every element of either algebra is an affine scaling field, which keeps
commutators, flows and transported solutions in closed form.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

from .errors import DomainError

ZERO_TOL = 1e-12
SERIES_TOL = 1e-15
SERIES_MAX_TERMS = 200


@dataclass(frozen=True)
class AffineScalingField:
    """``tau d/dt + xi d/dx + eta d/du`` with

    ``tau = at*t``, ``xi = cx*x + cc``, ``eta = eu*u + ec``.

    ``tau`` has no constant part, so ``tau(t=0) = 0`` holds by construction.
    """

    at: float = 0.0
    cx: float = 0.0
    cc: float = 0.0
    eu: float = 0.0
    ec: float = 0.0

    def as_vector(self) -> np.ndarray:
        return np.array([self.at, self.cx, self.cc, self.eu, self.ec])

    @classmethod
    def from_vector(cls, v) -> AffineScalingField:
        return cls(*(float(c) for c in v))

    def __add__(self, other: AffineScalingField) -> AffineScalingField:
        return AffineScalingField.from_vector(self.as_vector() + other.as_vector())

    def __mul__(self, k: float) -> AffineScalingField:
        return AffineScalingField.from_vector(float(k) * self.as_vector())

    __rmul__ = __mul__

    def tau(self, x, t, u):
        return self.at * t

    def xi(self, x, t, u):
        return self.cx * x + self.cc

    def eta(self, x, t, u):
        return self.eu * u + self.ec

    def is_zero(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.as_vector()) <= tol))


def commutator(X: AffineScalingField, Y: AffineScalingField) -> AffineScalingField:
    """Vector-field bracket ``[X, Y]^i = X(Y^i) - Y(X^i)``.

    Only the constant parts survive: the ``t`` and linear parts commute.
    """
    return AffineScalingField(
        cc=X.cc * Y.cx - Y.cc * X.cx,
        ec=X.ec * Y.eu - Y.ec * X.eu,
    )


@dataclass(frozen=True)
class AlgebraSpec:
    """One of the two algebras with its numeric parameters."""

    name: str
    alpha: float
    r: float | None = None

    def __post_init__(self):
        name = self.name.upper()
        object.__setattr__(self, "name", name)
        if name not in ("H1", "H2"):
            raise DomainError(f"unknown algebra {self.name!r}; use H1 or H2")
        if name == "H1":
            if self.r is None or float(self.r) == 1.0:
                raise DomainError("H1 requires r != 1")

    @property
    def labels(self) -> tuple[str, str, str]:
        return ("V11", "V12", "V13") if self.name == "H1" else ("V21", "V22", "V23")

    def basis(self) -> tuple[AffineScalingField, ...]:
        return tuple(basis_field(self, i) for i in (1, 2, 3))

    @property
    def structure_constants(self) -> np.ndarray:
        """``c[i, j, k]`` with ``[V_i, V_j] = sum_k c[i, j, k] V_k`` (0-based)."""
        c = np.zeros((3, 3, 3))
        if self.name == "H1":
            c[1, 2, 2] = -1.0           # [V12, V13] = -V13
            c[2, 1, 2] = 1.0
        else:
            c[0, 2, 2] = self.alpha     # [V21, V23] = alpha V23
            c[2, 0, 2] = -self.alpha
        return c

    def element(self, *coeffs) -> AlgebraElement:
        if len(coeffs) == 1:
            coeffs = tuple(coeffs[0])
        return AlgebraElement(self, tuple(float(c) for c in coeffs))

    def basis_element(self, index: int) -> AlgebraElement:
        coeffs = [0.0, 0.0, 0.0]
        coeffs[index - 1] = 1.0
        return self.element(coeffs)

    def field(self, coeffs) -> AffineScalingField:
        out = AffineScalingField()
        for c, v in zip(coeffs, self.basis()):
            out = out + c * v
        return out

    def decompose(self, X: AffineScalingField, tol: float = 1e-12) -> AlgebraElement:
        """Coefficients of ``X`` in the basis; raises if ``X`` is outside the span."""
        B = np.array([v.as_vector() for v in self.basis()]).T
        coeffs, *_ = np.linalg.lstsq(B, X.as_vector(), rcond=None)
        if np.max(np.abs(B @ coeffs - X.as_vector()), initial=0.0) > tol * max(
                1.0, np.max(np.abs(X.as_vector()))):
            raise DomainError(f"{X} is not in {self.name}")
        return self.element(coeffs)


def basis_field(algebra: AlgebraSpec, index: int) -> AffineScalingField:
    if index not in (1, 2, 3):
        raise DomainError("basis index must be 1, 2 or 3")
    alpha = float(algebra.alpha)
    if algebra.name == "H1":
        r = float(algebra.r)
        return (AffineScalingField(at=1.0, eu=-alpha / (r - 1.0)),
                AffineScalingField(cx=1.0, eu=2.0 / (r - 1.0)),
                AffineScalingField(cc=1.0))[index - 1]
    return (AffineScalingField(at=1.0, eu=-alpha),
            AffineScalingField(cc=1.0),
            AffineScalingField(ec=1.0))[index - 1]


@dataclass(frozen=True)
class AlgebraElement:
    algebra: AlgebraSpec
    coeffs: tuple[float, float, float]

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=float)

    @property
    def field(self) -> AffineScalingField:
        return self.algebra.field(self.coeffs)

    def __add__(self, other: AlgebraElement) -> AlgebraElement:
        _same_algebra(self, other)
        return self.algebra.element(self.vector + other.vector)

    def __mul__(self, k: float) -> AlgebraElement:
        return self.algebra.element(float(k) * self.vector)

    __rmul__ = __mul__

    def bracket(self, other: AlgebraElement) -> AlgebraElement:
        _same_algebra(self, other)
        c = self.algebra.structure_constants
        return self.algebra.element(np.einsum("i,j,ijk->k", self.vector, other.vector, c))

    def format(self, digits: int = 11) -> str:
        return format_combination(self.coeffs, self.algebra.labels, digits)


def _same_algebra(X: AlgebraElement, Y: AlgebraElement):
    if X.algebra != Y.algebra:
        raise DomainError(
            f"elements belong to different algebras ({X.algebra} vs {Y.algebra})")


def format_combination(coeffs, labels, digits: int = 11) -> str:
    # a unit coefficient is only elided on the leading term
    parts = []
    for c, label in zip(coeffs, labels):
        if c == 0:
            continue
        mag = abs(c)
        if not parts and float(f"{mag:.{digits}g}") == 1:
            body = label
        else:
            body = f"{mag:.{digits}g}·{label}"
        parts.append(("- " if c < 0 else "+ ") + body)
    if not parts:
        return "0"
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else "-" + text[2:]


def ad_matrix(X: AlgebraElement) -> np.ndarray:
    """Matrix of ``Y -> [X, Y]`` acting on coefficient columns."""
    c = X.algebra.structure_constants
    return np.einsum("i,ijk->kj", X.vector, c)


def adjoint(epsilon: float, X: AlgebraElement, Y: AlgebraElement,
            tol: float = SERIES_TOL) -> AlgebraElement:
    """``Ad(exp(eps X)) Y = Y - eps[X,Y] + eps^2/2 [X,[X,Y]] - ...``

    Summed as the matrix ``exp(-eps ad_X)`` by scaling and squaring: the
    series runs on ``-eps ad_X / 2^s`` (norm at most 1/2, so no cancellation)
    until the next term is below ``tol``, capped at 200 terms, then is
    squared ``s`` times.
    """
    _same_algebra(X, Y)
    M = -float(epsilon) * ad_matrix(X)
    norm = float(np.max(np.sum(np.abs(M), axis=1)))
    s = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0 else 0
    M = M / 2.0 ** s
    term = np.eye(3)
    E = term.copy()
    for k in range(1, SERIES_MAX_TERMS):
        term = M @ term / k
        E += term
        if np.max(np.abs(term)) < tol:
            break
    for _ in range(s):
        E = E @ E
    return Y.algebra.element(E @ Y.vector)


def adjoint_table(algebra: AlgebraSpec, epsilon: float) -> list[list[AlgebraElement]]:
    """Entry ``[i][j] = Ad(exp(eps V_i)) V_j``."""
    basis = [algebra.basis_element(i) for i in (1, 2, 3)]
    return [[adjoint(epsilon, Vi, Vj) for Vj in basis] for Vi in basis]


# -- optimal system ---------------------------------------------------------

@dataclass(frozen=True)
class Representative:
    label: str
    param: float | None = None

    def element(self, algebra: AlgebraSpec) -> AlgebraElement:
        return representative_element(algebra, self)

    def format(self, digits: int = 11) -> str:
        if self.param is None:
            return self.label
        name = "gamma" if self.label == "r16" else "rho"
        return f"{self.label}({name}={self.param:.{digits}g})"


_OPTIMAL = {
    "H1": {"r11": (1, 0, 0), "r12": (0, 1, 0), "r13": (0, 0, 1),
           "r14": (1, 0, 1), "r15": (1, 0, -1), "r16": None},
    "H2": {"r21": (1, 0, 0), "r22": (0, 1, 0), "r23": (0, 0, 1),
           "r24": (0, 1, 1), "r25": (0, 1, -1), "r26": None},
}


def optimal_labels(algebra: AlgebraSpec) -> tuple[str, ...]:
    return tuple(_OPTIMAL[algebra.name])


def representative_element(algebra: AlgebraSpec, rep: Representative) -> AlgebraElement:
    try:
        coeffs = _OPTIMAL[algebra.name][rep.label]
    except KeyError:
        raise DomainError(f"{rep.label!r} is not a representative of {algebra.name}") from None
    if coeffs is None:
        if rep.param is None or rep.param == 0:
            raise DomainError(f"{rep.label} needs a nonzero parameter")
        coeffs = (1.0, rep.param, 0.0)
    return algebra.element(coeffs)


def canonicalize(W: AlgebraElement, zero_tol: float = ZERO_TOL) -> Representative:
    """Optimal-system representative of the one-dimensional subalgebra spanned by ``W``.

    Equivalence is the adjoint action together with multiplication by a
    nonzero scalar.  The only adjoint-variable coordinate in either algebra
    is the third one, which is either absorbed (when the coordinate it is
    bracketed against is nonzero) or reduced to its sign.
    """
    a1, a2, a3 = (0.0 if abs(c) < zero_tol else c for c in W.coeffs)
    if a1 == a2 == a3 == 0.0:
        raise DomainError("cannot classify the zero element")
    if W.algebra.name == "H1":
        # Ad(exp(eps V13)) shifts a3 by -eps*a2; Ad(exp(eps V12)) scales a3 by e^eps
        if a1 != 0:
            if a2 != 0:
                return Representative("r16", a2 / a1)
            if a3 == 0:
                return Representative("r11")
            return Representative("r14" if a3 / a1 > 0 else "r15")
        if a2 != 0:
            return Representative("r12")
        return Representative("r13")
    # Ad(exp(eps V23)) shifts a3 by alpha*eps*a1; Ad(exp(eps V21)) scales a3 by e^(-alpha eps)
    if a1 != 0:
        if a2 != 0:
            return Representative("r26", a2 / a1)
        return Representative("r21")
    if a2 != 0:
        if a3 == 0:
            return Representative("r22")
        return Representative("r24" if a3 / a2 > 0 else "r25")
    return Representative("r23")


def canonicalizing_word(W: AlgebraElement, zero_tol: float = ZERO_TOL):
    """Adjoint steps and final scalar taking ``W`` to its representative.

    Returns ``(steps, scale)`` with ``steps`` a list of ``(eps, basis index)``
    applied left to right, such that
    ``scale * Ad(...)W == canonicalize(W).element``.
    """
    a1, a2, a3 = (0.0 if abs(c) < zero_tol else c for c in W.coeffs)
    alpha = float(W.algebra.alpha)
    steps = []
    if W.algebra.name == "H1":
        if a2 != 0 and a3 != 0:
            steps.append((a3 / a2, 3))
        elif a1 != 0 and a3 != 0:
            steps.append((math.log(abs(a1 / a3)), 2))
        lead = a1 if a1 != 0 else (a2 if a2 != 0 else a3)
        return steps, 1.0 / lead
    if a1 != 0 and a3 != 0:
        steps.append((-a3 / (alpha * a1), 3))
    elif a2 != 0 and a3 != 0:
        steps.append((math.log(abs(a3 / a2)) / alpha, 1))
    lead = a1 if a1 != 0 else (a2 if a2 != 0 else a3)
    return steps, 1.0 / lead


# -- finite transformations -------------------------------------------------

@dataclass(frozen=True)
class PointTransformation:
    """``(t, x, u) -> (t_scale t, x_scale x + x_shift, u_scale u + u_shift)``."""

    t_scale: float = 1.0
    x_scale: float = 1.0
    x_shift: float = 0.0
    u_scale: float = 1.0
    u_shift: float = 0.0

    def __post_init__(self):
        if not (self.t_scale > 0 and self.x_scale > 0 and self.u_scale > 0):
            raise DomainError("point transformation scales must be positive")

    def __call__(self, t, x, u):
        return (self.t_scale * t, self.x_scale * x + self.x_shift,
                self.u_scale * u + self.u_shift)

    def compose(self, inner: PointTransformation) -> PointTransformation:
        """``self o inner``."""
        return PointTransformation(
            self.t_scale * inner.t_scale,
            self.x_scale * inner.x_scale,
            self.x_scale * inner.x_shift + self.x_shift,
            self.u_scale * inner.u_scale,
            self.u_scale * inner.u_shift + self.u_shift,
        )

    def inverse(self) -> PointTransformation:
        return PointTransformation(
            1.0 / self.t_scale, 1.0 / self.x_scale, -self.x_shift / self.x_scale,
            1.0 / self.u_scale, -self.u_shift / self.u_scale)


IDENTITY = PointTransformation()


def _affine_flow(scale_rate: float, shift_rate: float, eps: float):
    # shift = shift_rate (e^(k eps) - 1)/k, written with exprel so tiny k is exact
    z = scale_rate * eps
    return math.exp(z), shift_rate * eps * float(special.exprel(z))


def flow(X, epsilon: float) -> PointTransformation:
    """Closed-form one-parameter group generated by an affine scaling field."""
    if isinstance(X, AlgebraElement):
        X = X.field
    eps = float(epsilon)
    x_scale, x_shift = _affine_flow(X.cx, X.cc, eps)
    u_scale, u_shift = _affine_flow(X.eu, X.ec, eps)
    return PointTransformation(math.exp(X.at * eps), x_scale, x_shift, u_scale, u_shift)


class TransportedSolution:
    """Image of the graph of ``u = base(x, t)`` under a point transformation.

    Carries analytic first/second ``x`` and first ``t`` derivatives when the
    base provides them.
    """

    def __init__(self, T: PointTransformation, base: Callable):
        self.T = T
        self.base = base

    def _pull(self, x, t):
        T = self.T
        return (x - T.x_shift) / T.x_scale, t / T.t_scale

    def __call__(self, x, t):
        X, S = self._pull(x, t)
        return self.T.u_scale * self.base(X, S) + self.T.u_shift

    def dx(self, x, t):
        X, S = self._pull(x, t)
        return self.T.u_scale * self.base.dx(X, S) / self.T.x_scale

    def dxx(self, x, t):
        X, S = self._pull(x, t)
        return self.T.u_scale * self.base.dxx(X, S) / self.T.x_scale ** 2

    def dt(self, x, t):
        X, S = self._pull(x, t)
        return self.T.u_scale * self.base.dt(X, S) / self.T.t_scale


def transport_solution(T: PointTransformation, sol: Callable) -> TransportedSolution:
    """``u~(x, t) = u_scale * sol((x - x_shift)/x_scale, t/t_scale) + u_shift``."""
    return TransportedSolution(T, sol)


def parse_field(text: str, algebra: AlgebraSpec, param: float | None = None) -> AlgebraElement:
    """Parse ``"V11+2*V12-V13"``, ``"r14"`` or ``"r16"`` (with ``param``)."""
    text = text.replace(" ", "")
    if re.fullmatch(r"r\d\d", text):
        return representative_element(algebra, Representative(text, param))
    labels = algebra.labels
    coeffs = [0.0, 0.0, 0.0]
    pos = 0
    pattern = re.compile(r"([+-]?)(?:(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+)\*?)?(V\d\d)")
    while pos < len(text):
        m = pattern.match(text, pos)
        if not m or m.end() == pos:
            raise DomainError(f"cannot parse field {text!r}")
        sign, num, label = m.groups()
        if label not in labels:
            raise DomainError(f"{label} is not a generator of {algebra.name}")
        value = float(num) if num else 1.0
        coeffs[labels.index(label)] += -value if sign == "-" else value
        pos = m.end()
    return algebra.element(coeffs)
