"""Exact rational-function coefficients over the integers.

A Scalar is a quotient of multivariate integer polynomials in the even
symbols of its table, kept in lowest terms with the denominator's leading
coefficient positive under graded-lex order.  That canonical form is
maintained by the sparse field arithmetic this module wraps.
"""

from __future__ import annotations

from fractions import Fraction

import sympy
from sympy.polys.domains import ZZ


class ScalarError(ArithmeticError):
    pass


class Scalar:
    __slots__ = ("table", "f")

    def __init__(self, table, frac_element):
        self.table = table
        self.f = frac_element

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_int(cls, table, value):
        return cls(table, table.field.ground_new(ZZ(int(value))))

    @classmethod
    def from_fraction(cls, table, value):
        value = Fraction(value)
        one = table.field.ground_new(ZZ(1))
        return cls(table, one * int(value.numerator) / int(value.denominator))

    @classmethod
    def symbol(cls, table, name):
        return cls(table, table.field.gens[table.even_index(name)])

    def _coerce(self, other):
        if isinstance(other, Scalar):
            if other.table is not self.table:
                raise ScalarError("mixed symbol tables")
            return other
        if isinstance(other, int):
            return Scalar.from_int(self.table, other)
        if isinstance(other, Fraction):
            return Scalar.from_fraction(self.table, other)
        return NotImplemented

    # -- ring/field operations ---------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Scalar(self.table, self.f + other.f)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Scalar(self.table, self.f - other.f)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Scalar(self.table, other.f - self.f)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Scalar(self.table, self.f * other.f)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.f:
            raise ScalarError("division by zero scalar")
        return Scalar(self.table, self.f / other.f)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, exponent):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0 and not self.f:
            raise ScalarError("division by zero scalar")
        return Scalar(self.table, self.f ** exponent)

    def __neg__(self):
        return Scalar(self.table, -self.f)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._coerce(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.table is other.table and self.f == other.f

    def __hash__(self):
        return hash(self.f)

    def __bool__(self):
        return bool(self.f)

    @property
    def is_zero(self):
        return not self.f

    # -- structure queries --------------------------------------------------

    @property
    def numer_terms(self):
        """[(exponent tuple, int coeff)] in graded-lex descending order."""
        return [(m, int(c)) for m, c in self.f.numer.terms()]

    @property
    def denom_terms(self):
        return [(m, int(c)) for m, c in self.f.denom.terms()]

    def is_constant(self):
        return self.f.numer.is_ground and self.f.denom.is_ground

    def as_fraction(self):
        if not self.is_constant():
            raise ScalarError("scalar is not a rational constant")
        num = int(self.f.numer.coeff(1)) if self.f.numer else 0
        den = int(self.f.denom.coeff(1))
        return Fraction(num, den)

    def depends_on(self, name):
        idx = self.table.even_index(name)
        return any(m[idx] for m, _ in self.f.numer.terms()) or \
            any(m[idx] for m, _ in self.f.denom.terms())

    def is_polynomial(self):
        return self.f.denom.is_ground

    # -- calculus ------------------------------------------------------------

    def diff(self, name):
        gen = self.table.field.gens[self.table.even_index(name)]
        return Scalar(self.table, self.f.diff(gen))

    def subs_even(self, images):
        """Simultaneous substitution of even symbols by Scalars.

        ``images`` maps even-symbol names to Scalars of the same table;
        unmentioned symbols stay put.
        """
        table = self.table
        args = list(table.field.gens)
        for name, value in images.items():
            value = self._coerce(value)
            args[table.even_index(name)] = value.f
        num = _eval_poly(table, self.f.numer, args)
        den = _eval_poly(table, self.f.denom, args)
        if not den.f:
            raise ScalarError("substitution makes the denominator vanish")
        return num / den

    def integrate_monomial(self, name):
        """Antiderivative in ``name`` vanishing at 0.

        The numerator must be polynomial in ``name`` and the denominator
        free of it; used for closed-form time integration of flows.
        """
        table = self.table
        idx = table.even_index(name)
        if any(m[idx] for m, _ in self.f.denom.terms()):
            raise ScalarError(f"denominator depends on {name}")
        field = table.field
        out = field.zero
        for mono, coeff in self.f.numer.terms():
            lifted = list(mono)
            lifted[idx] += 1
            term = field(field.ring.from_dict({tuple(lifted): ZZ(int(coeff))}))
            out += term / lifted[idx]
        return Scalar(table, out / field(self.f.denom))

    def sqrt(self):
        """The root with positive leading numerator coefficient.

        Defined only when numerator and denominator are perfect squares in
        the polynomial ring (including the integer content).
        """
        num = _poly_sqrt(self.table, self.f.numer)
        den = _poly_sqrt(self.table, self.f.denom)
        if num is None or den is None:
            raise ScalarError("scalar is not a perfect square")
        root = Scalar(self.table, self.table.field(num) / self.table.field(den))
        if root.leading_sign() < 0:
            root = -root
        return root

    def leading_sign(self):
        terms = self.f.numer.terms()
        if not terms:
            return 0
        return 1 if terms[0][1] > 0 else -1

    def __repr__(self):
        return f"Scalar({self.f})"


def _eval_poly(table, poly, args):
    """Evaluate a PolyElement at Scalar-field arguments."""
    field = table.field
    total = field.zero
    for mono, coeff in poly.terms():
        term = field.ground_new(ZZ(int(coeff)))
        for idx, power in enumerate(mono):
            if power:
                term = term * args[idx] ** power
        total += term
    return Scalar(table, total)


def _poly_sqrt(table, poly):
    """Square root of a perfect-square PolyElement, or None."""
    if poly.is_ground:
        value = int(poly.coeff(1)) if poly else 0
        if value < 0:
            return None
        root = _isqrt(value)
        if root is None:
            return None
        return table.field.ring.ground_new(ZZ(root))
    expr = poly.as_expr()
    content, factors = sympy.factor_list(expr)
    content = Fraction(str(content))
    if content < 0 or content.denominator != 1:
        return None
    croot = _isqrt(content.numerator)
    if croot is None:
        return None
    ring = table.field.ring
    out = ring.ground_new(ZZ(croot))
    for base, exp in factors:
        exp = int(exp)
        if exp % 2:
            return None
        out = out * ring.from_expr(base) ** (exp // 2)
    return out


def _isqrt(value):
    import math
    root = math.isqrt(value)
    return root if root * root == value else None


def binomial_half(k):
    """Coefficient of t^k in the square-root series of 1 + t."""
    out = Fraction(1)
    for j in range(k):
        out *= Fraction(1, 2) - j
        out /= j + 1
    return out
