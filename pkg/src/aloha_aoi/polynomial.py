"""Real polynomials and rational functions in one variable.

Coefficients are stored lowest degree first (``coeffs[k]`` multiplies
``x**k``) as float64 arrays. Arithmetic is plain floating point; coefficients
whose magnitude falls below ``TRIM_TOL`` are dropped from the top end so the
degree reported is the meaningful one.
"""

from __future__ import annotations

from typing import Iterable, Union

import numpy as np
from numpy.polynomial import polynomial as P

TRIM_TOL = 1e-14
CANCEL_TOL = 1e-10
_PROBE_POINTS = (-1.0, -0.5, 0.5)
_PROBE_TOL = 1e-12

Number = Union[int, float]


class Polynomial:
    """Immutable polynomial with float coefficients, lowest degree first."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[Number] | Number = (0.0,)):
        c = np.atleast_1d(np.asarray(coeffs, dtype=float)).copy()
        if c.ndim != 1:
            raise ValueError("coefficients must be one-dimensional")
        if c.size == 0:
            c = np.zeros(1)
        nz = np.flatnonzero(np.abs(c) > TRIM_TOL)
        c = c[: nz[-1] + 1] if nz.size else np.zeros(1)
        c.setflags(write=False)
        self._c = c

    @classmethod
    def monomial(cls, degree: int, coeff: Number = 1.0) -> "Polynomial":
        c = np.zeros(degree + 1)
        c[degree] = coeff
        return cls(c)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        """Degree; the zero polynomial reports 0."""
        return self._c.size - 1

    def is_zero(self) -> bool:
        return self._c.size == 1 and self._c[0] == 0.0

    def norm(self) -> float:
        return float(np.abs(self._c).max())

    def __call__(self, x):
        return P.polyval(x, self._c)

    def deriv(self, m: int = 1) -> "Polynomial":
        return Polynomial(P.polyder(self._c, m))

    @staticmethod
    def _coerce(other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Polynomial([float(other)])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Polynomial(P.polyadd(self._c, other._c))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-self._c)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Polynomial(P.polysub(self._c, other._c))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Polynomial(P.polymul(self._c, other._c))

    __rmul__ = __mul__

    def __divmod__(self, other: "Polynomial"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q, r = P.polydiv(self._c, other._c)
        return Polynomial(q), Polynomial(r)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._c.shape == other._c.shape and bool(np.all(self._c == other._c))

    def __hash__(self):
        return hash(self._c.tobytes())

    def allclose(self, other: "Polynomial", atol: float = 1e-12) -> bool:
        n = max(self._c.size, other._c.size)
        a = np.pad(self._c, (0, n - self._c.size))
        b = np.pad(other._c, (0, n - other._c.size))
        return bool(np.all(np.abs(a - b) <= atol))

    def __repr__(self):
        return f"Polynomial({self._c.tolist()!r})"


ZERO = Polynomial([0.0])
ONE = Polynomial([1.0])
X = Polynomial([0.0, 1.0])


def poly_gcd(a: Polynomial, b: Polynomial, tol: float = CANCEL_TOL) -> Polynomial:
    """Monic greatest common divisor by the Euclidean algorithm.

    A remainder is treated as zero when its max-norm is at most ``tol``
    times the norm of the dividend; both operands are rescaled to unit
    norm at every step.
    """
    if a.is_zero():
        return b * (1.0 / b.coeffs[-1]) if not b.is_zero() else ONE
    if b.is_zero():
        return a * (1.0 / a.coeffs[-1])
    if a.degree < b.degree:
        a, b = b, a
    a = a * (1.0 / a.norm())
    b = b * (1.0 / b.norm())
    while b.degree > 0:
        _, r = divmod(a, b)
        if r.is_zero() or r.norm() <= tol * a.norm():
            return b * (1.0 / b.coeffs[-1])
        a, b = b, r * (1.0 / r.norm())
    return ONE


class RationalFunction:
    """Ratio ``num / den`` of polynomials.

    The representation is normalised so that ``den(0) == 1`` whenever the
    denominator's constant term is nonzero; this is the natural form of a
    generating function.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial | Number, den: Polynomial | Number = 1.0):
        num = num if isinstance(num, Polynomial) else Polynomial([num])
        den = den if isinstance(den, Polynomial) else Polynomial([den])
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        c0 = den.coeffs[0]
        scale = c0 if c0 != 0.0 else den.coeffs[-1]
        if scale != 1.0:
            num = num * (1.0 / scale)
            den = den * (1.0 / scale)
        self.num = num
        self.den = den

    def __call__(self, x):
        return self.num(x) / self.den(x)

    def __add__(self, other):
        other = _as_rational(other)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-_as_rational(other))

    def __rsub__(self, other):
        return _as_rational(other) - self

    def __mul__(self, other):
        other = _as_rational(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_rational(other)
        return RationalFunction(self.num * other.den, self.den * other.num)

    def deriv(self) -> "RationalFunction":
        """First derivative by the quotient rule (not reduced)."""
        n, d = self.num, self.den
        return RationalFunction(n.deriv() * d - n * d.deriv(), d * d)

    def cancel(self, tol: float = CANCEL_TOL) -> "RationalFunction":
        """Divide out the common polynomial factor of numerator and denominator."""
        if self.num.is_zero():
            return RationalFunction(ZERO, ONE)
        g = poly_gcd(self.num, self.den, tol)
        if g.degree == 0:
            return RationalFunction(self.num, self.den)
        qn, _ = divmod(self.num, g)
        qd, _ = divmod(self.den, g)
        # a near-common factor is not divided out: the reduced form must
        # reproduce the original to working precision
        for x in _PROBE_POINTS:
            lhs, rhs = qn(x) * self.den(x), self.num(x) * qd(x)
            scale = abs(qn(x) * self.den(x)) + abs(self.num(x) * qd(x))
            if abs(lhs - rhs) > _PROBE_TOL * max(scale, TRIM_TOL):
                return RationalFunction(self.num, self.den)
        return RationalFunction(qn, qd)

    def __repr__(self):
        return f"RationalFunction(num={self.num!r}, den={self.den!r})"


def _as_rational(value) -> RationalFunction:
    if isinstance(value, RationalFunction):
        return value
    if isinstance(value, Polynomial):
        return RationalFunction(value, ONE)
    return RationalFunction(Polynomial([float(value)]), ONE)
