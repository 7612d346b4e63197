"""Canonical Grassmann-graded polynomials and their exact arithmetic.

A SuperExpr is a finite sum of (rational-function coefficient) x (ordered
monomial in odd symbols).  Keys are strictly increasing tuples of global
odd indices; no zero coefficient is ever stored, so equal expressions have
identical term dictionaries.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import Scalar, ScalarError, binomial_half
from .symbols import Parity, SymbolError


class ParityError(ValueError):
    pass


def _merge_keys(a, b):
    """Interleave two increasing index tuples, tracking the sign.

    Returns (sign, merged) or None when an index repeats (the monomial
    vanishes by nilpotency).
    """
    if not a:
        return 1, b
    if not b:
        return 1, a
    merged = []
    i = j = 0
    swaps = 0
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            return None
        if a[i] < b[j]:
            merged.append(a[i])
            i += 1
        else:
            merged.append(b[j])
            swaps += len(a) - i
            j += 1
    merged.extend(a[i:])
    merged.extend(b[j:])
    return (-1 if swaps % 2 else 1), tuple(merged)


def _sort_indices(seq):
    """Sort an odd-index sequence, returning (sign, tuple) or None."""
    items = list(seq)
    sign = 1
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1] > items[j]:
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
        if j > 0 and items[j - 1] == items[j]:
            return None
    return sign, tuple(items)


class SuperExpr:
    __slots__ = ("table", "terms")

    def __init__(self, table, terms):
        self.table = table
        self.terms = terms

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, table):
        return cls(table, {})

    @classmethod
    def one(cls, table):
        return cls(table, {(): Scalar.from_int(table, 1)})

    @classmethod
    def from_scalar(cls, scalar):
        if scalar.is_zero:
            return cls(scalar.table, {})
        return cls(scalar.table, {(): scalar})

    @classmethod
    def constant(cls, table, value):
        return cls.from_scalar(Scalar.from_fraction(table, Fraction(value)))

    @classmethod
    def symbol(cls, table, name):
        if table.is_even(name):
            return cls.from_scalar(Scalar.symbol(table, name))
        if table.is_odd(name):
            return cls(table, {(table.odd_index(name),):
                               Scalar.from_int(table, 1)})
        raise SymbolError(f"unknown symbol {name!r}")

    @classmethod
    def from_raw_terms(cls, table, raw_terms):
        """Normalize a list of (coefficient, odd-symbol name sequence)."""
        acc = {}
        for coeff, names in raw_terms:
            if isinstance(coeff, Scalar):
                c = coeff
            else:
                c = Scalar.from_fraction(table, Fraction(coeff))
            sorted_ = _sort_indices(table.odd_index(n) for n in names)
            if sorted_ is None:
                continue
            sign, key = sorted_
            if sign < 0:
                c = -c
            prev = acc.get(key)
            acc[key] = c if prev is None else prev + c
        return cls(table, {k: v for k, v in acc.items() if not v.is_zero})

    def _new(self, terms):
        return SuperExpr(self.table, terms)

    # -- basic queries -------------------------------------------------------

    @property
    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def parity(self):
        seen_even = seen_odd = False
        for key in self.terms:
            if len(key) % 2:
                seen_odd = True
            else:
                seen_even = True
        if seen_even and seen_odd:
            return Parity.MIXED
        if seen_odd:
            return Parity.ODD
        return Parity.EVEN

    def is_even(self):
        return all(len(k) % 2 == 0 for k in self.terms)

    def is_odd(self):
        return all(len(k) % 2 == 1 for k in self.terms)

    def even_part(self):
        return self._new({k: v for k, v in self.terms.items() if len(k) % 2 == 0})

    def odd_part(self):
        return self._new({k: v for k, v in self.terms.items() if len(k) % 2 == 1})

    def body(self):
        """The theta-free, aux-free part: a plain Scalar."""
        return self.terms.get((), Scalar.from_int(self.table, 0))

    def theta_degree_of_key(self, key):
        n = self.table.n_theta
        return sum(1 for i in key if i < n)

    def homogeneous_part(self, p):
        """Component of theta-degree exactly p (coordinate odds only)."""
        if p < 0:
            raise ValueError("degree must be nonnegative")
        return self._new({k: v for k, v in self.terms.items()
                          if self.theta_degree_of_key(k) == p})

    def max_theta_degree(self):
        return max((self.theta_degree_of_key(k) for k in self.terms), default=0)

    def max_odd_degree(self):
        return max((len(k) for k in self.terms), default=0)

    def theta_order(self):
        """Smallest theta-degree carrying a nonzero term (inf when zero)."""
        degrees = [self.theta_degree_of_key(k) for k in self.terms]
        return min(degrees) if degrees else float("inf")

    def coefficient(self, names):
        """Scalar coefficient of the exact odd monomial given by names."""
        sorted_ = _sort_indices(self.table.odd_index(n) for n in names)
        if sorted_ is None:
            raise ValueError("repeated odd symbol")
        sign, key = sorted_
        c = self.terms.get(key)
        if c is None:
            return Scalar.from_int(self.table, 0)
        return c if sign > 0 else -c

    def scalars(self):
        return self.terms.values()

    # -- ring operations -----------------------------------------------------

    def _check_table(self, other):
        if self.table is not other.table:
            raise SymbolError("mixed symbol tables")

    def _coerce(self, other):
        if isinstance(other, SuperExpr):
            self._check_table(other)
            return other
        if isinstance(other, Scalar):
            if other.table is not self.table:
                raise SymbolError("mixed symbol tables")
            return SuperExpr.from_scalar(other)
        if isinstance(other, (int, Fraction)):
            return SuperExpr.constant(self.table, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for key, c in other.terms.items():
            prev = out.get(key)
            total = c if prev is None else prev + c
            if total.is_zero:
                out.pop(key, None)
            else:
                out[key] = total
        return self._new(out)

    __radd__ = __add__

    def __neg__(self):
        return self._new({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = {}
        for ka, ca in self.terms.items():
            for kb, cb in other.terms.items():
                merged = _merge_keys(ka, kb)
                if merged is None:
                    continue
                sign, key = merged
                c = ca * cb
                if sign < 0:
                    c = -c
                prev = out.get(key)
                total = c if prev is None else prev + c
                if total.is_zero:
                    out.pop(key, None)
                else:
                    out[key] = total
        return self._new(out)

    def __rmul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.invert_even()

    def __pow__(self, exponent):
        if not isinstance(exponent, int) or exponent < 0:
            return NotImplemented
        out = SuperExpr.one(self.table)
        for _ in range(exponent):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            other = self._coerce(other)
        if not isinstance(other, SuperExpr):
            return NotImplemented
        return self.table is other.table and self.terms == other.terms

    def __hash__(self):
        return hash((id(self.table), frozenset(self.terms.items())))

    # -- derivatives and the Berezin integral --------------------------------

    def diff(self, name):
        """Left partial derivative (ordinary one for even symbols)."""
        table = self.table
        if table.is_even(name):
            out = {}
            for key, c in self.terms.items():
                d = c.diff(name)
                if not d.is_zero:
                    out[key] = d
            return self._new(out)
        idx = table.odd_index(name)
        out = {}
        for key, c in self.terms.items():
            if idx not in key:
                continue
            pos = key.index(idx)
            new_key = key[:pos] + key[pos + 1:]
            value = c if pos % 2 == 0 else -c
            prev = out.get(new_key)
            total = value if prev is None else prev + value
            if total.is_zero:
                out.pop(new_key, None)
            else:
                out[new_key] = total
        return self._new(out)

    def right_diff(self, name):
        """Right odd derivative; used by the Berezin integral."""
        table = self.table
        idx = table.odd_index(name)
        out = {}
        for key, c in self.terms.items():
            if idx not in key:
                continue
            pos = key.index(idx)
            new_key = key[:pos] + key[pos + 1:]
            value = c if (len(key) - 1 - pos) % 2 == 0 else -c
            prev = out.get(new_key)
            total = value if prev is None else prev + value
            if total.is_zero:
                out.pop(new_key, None)
            else:
                out[new_key] = total
        return self._new(out)

    def berezin_integral(self, odds):
        """Coefficient of the ordered product of the listed odd symbols.

        Normalized so that integrating th1*...*thn against [th1,...,thn]
        gives 1; equals iterated single-symbol extraction right-to-left.
        """
        odds = list(odds)
        if len(set(odds)) != len(odds):
            raise ValueError("integration symbols must be distinct")
        out = self
        for name in reversed(odds):
            if not self.table.is_odd(name):
                raise SymbolError(f"{name!r} is not an odd symbol")
            out = out.right_diff(name)
        return out

    # -- substitution ----------------------------------------------------------

    def substitute(self, bindings):
        """Simultaneous parity-matched substitution.

        ``bindings`` maps symbol names to SuperExprs (or Scalars / numbers
        for even symbols).  Coefficients compose through the rational
        field; denominators whose image has zero body raise.
        """
        table = self.table
        even_images = {}
        odd_images = {}
        for name, value in bindings.items():
            if isinstance(value, Scalar):
                value = SuperExpr.from_scalar(value)
            elif isinstance(value, (int, Fraction)):
                value = SuperExpr.constant(table, value)
            self._check_table(value)
            if table.is_even(name):
                if not value.is_even():
                    raise ParityError(f"even symbol {name!r} bound to odd value")
                even_images[table.even_index(name)] = value
            elif table.is_odd(name):
                if not value.is_odd():
                    raise ParityError(f"odd symbol {name!r} bound to even value")
                odd_images[table.odd_index(name)] = value
            else:
                raise SymbolError(f"unknown symbol {name!r}")

        inverse_cache = {}
        power_cache = {}
        result = SuperExpr.zero(table)
        for key, c in self.terms.items():
            piece = self._substitute_coefficient(c, even_images,
                                                 inverse_cache, power_cache)
            for idx in key:
                image = odd_images.get(idx)
                if image is None:
                    image = SuperExpr(table, {(idx,):
                                              Scalar.from_int(table, 1)})
                piece = piece * image
            result = result + piece
        return result

    def _substitute_coefficient(self, c, even_images, inverse_cache,
                                power_cache):
        table = self.table
        touched = [idx for idx in even_images
                   if any(m[idx] for m, _ in c.numer_terms)
                   or any(m[idx] for m, _ in c.denom_terms)]
        if not touched:
            return SuperExpr.from_scalar(c)
        num = _eval_poly_super(table, c.f.numer, even_images, power_cache)
        if c.f.denom.is_ground:
            den_scalar = Scalar(table, table.field(c.f.denom))
            return num * SuperExpr.from_scalar(
                Scalar.from_int(table, 1) / den_scalar)
        den_key = c.f.denom
        inv = inverse_cache.get(den_key)
        if inv is None:
            den = _eval_poly_super(table, c.f.denom, even_images, power_cache)
            if den.body().is_zero:
                raise ScalarError("substitution makes a denominator "
                                  "body vanish")
            inv = den.invert_even()
            inverse_cache[den_key] = inv
        return num * inv

    # -- inverses and square roots ----------------------------------------------

    def invert_even(self):
        """Multiplicative inverse of an even element with nonzero body."""
        if not self.is_even():
            raise ParityError("inverse needs a purely even argument")
        b = self.body()
        if b.is_zero:
            raise ScalarError("zero body is not invertible")
        binv = Scalar.from_int(self.table, 1) / b
        nil = (self - SuperExpr.from_scalar(b)) * binv
        out = SuperExpr.one(self.table)
        power = SuperExpr.one(self.table)
        sign = 1
        for _ in range(self.table.total_odds // 2 + 1):
            power = power * nil
            if power.is_zero:
                break
            sign = -sign
            out = out + power if sign > 0 else out - power
        return out * binv

    def sqrt_even(self, body_root=None):
        """Square root of an even element whose body is a perfect square.

        The body root is normalized to positive leading coefficient; the
        nilpotent remainder is handled by the finite binomial series.
        """
        if not self.is_even():
            raise ParityError("square root needs a purely even argument")
        return self.sqrt_series(body_root)

    def sqrt_series(self, body_root=None):
        """The binomial square-root series; the nilpotent part may be of
        mixed parity (powers of one element always commute)."""
        b = self.body()
        if b.is_zero:
            raise ScalarError("zero body has no invertible square root")
        if body_root is None:
            d = b.sqrt()
        else:
            d = body_root if body_root.leading_sign() > 0 else -body_root
            if d * d != b:
                raise ScalarError("supplied body root does not square back")
        u = (self - SuperExpr.from_scalar(b)) * (Scalar.from_int(self.table, 1)
                                                 / b)
        out = SuperExpr.one(self.table)
        power = SuperExpr.one(self.table)
        for k in range(1, self.table.total_odds + 2):
            power = power * u
            if power.is_zero:
                break
            out = out + Scalar.from_fraction(self.table,
                                             binomial_half(k)) * power
        root = SuperExpr.from_scalar(d) * out
        if root * root != self:
            raise ScalarError("square-root series failed to square back")
        return root

    def __repr__(self):
        from .grammar import render_expr
        return f"<{render_expr(self)}>"


def _eval_poly_super(table, poly, even_images, power_cache):
    """Evaluate a PolyElement with some generators bound to SuperExprs."""
    from sympy.polys.domains import ZZ

    total = SuperExpr.zero(table)
    ring = table.field.ring
    for mono, coeff in poly.terms():
        residual = list(mono)
        factors = []
        for idx, power in enumerate(mono):
            if power and idx in even_images:
                residual[idx] = 0
                factors.append((idx, power))
        scal = Scalar(table, table.field(
            ring.from_dict({tuple(residual): ZZ(int(coeff))})))
        piece = SuperExpr.from_scalar(scal)
        for idx, power in factors:
            key = (idx, power)
            img_pow = power_cache.get(key)
            if img_pow is None:
                img_pow = even_images[idx] ** power
                power_cache[key] = img_pow
            piece = piece * img_pow
        total = total + piece
    return total


# -- module-level operation names matching the public surface -----------------

def normalize(table, raw_terms):
    return SuperExpr.from_raw_terms(table, raw_terms)


def multiply(a, b):
    return a * b


def partial_derivative(f, name):
    return f.diff(name)


def berezin_integral(f, odds):
    return f.berezin_integral(odds)


def substitute(f, bindings):
    return f.substitute(bindings)


def homogeneous_part(f, p):
    return f.homogeneous_part(p)


def invert_even(f):
    return f.invert_even()


def sqrt_even(f, body_root=None):
    return f.sqrt_even(body_root)
