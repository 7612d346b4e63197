"""Expression grammar and deterministic rendering.

Grammar: identifiers from the symbol table, integer literals, and the
operators + - * / ^ with the usual precedence ( ^ binds tightest and is
right associative; unary minus sits between * and ^ ).  Rendering emits
canonical term order and parses back to the identical expression.
"""

from __future__ import annotations

from fractions import Fraction

from .superexpr import SuperExpr
from .symbols import SymbolError


class ParseError(ValueError):
    def __init__(self, message, line=1, column=0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


_OPERATORS = "+-*/^()"


def _tokenize(text):
    tokens = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch in _OPERATORS:
            tokens.append((ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append((int(text[i:j]), line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha():
            j = i
            while j < len(text) and text[j].isalnum():
                j += 1
            tokens.append((text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    return tokens


class _Parser:
    def __init__(self, tokens, table):
        self.tokens = tokens
        self.table = table
        self.pos = 0

    def _peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _next(self):
        tok = self._peek()
        if tok is None:
            raise ParseError("unexpected end of input", *self._last_loc())
        self.pos += 1
        return tok

    def _last_loc(self):
        if self.tokens:
            _, line, col = self.tokens[-1]
            return line, col + 1
        return 1, 1

    def parse(self):
        expr = self.expression()
        tok = self._peek()
        if tok is not None:
            raise ParseError(f"unexpected token {tok[0]!r}", tok[1], tok[2])
        return expr

    def expression(self):
        value = self.term()
        while True:
            tok = self._peek()
            if tok and tok[0] in ("+", "-"):
                self.pos += 1
                rhs = self.term()
                value = value + rhs if tok[0] == "+" else value - rhs
            else:
                return value

    def term(self):
        value = self.factor()
        while True:
            tok = self._peek()
            if tok and tok[0] in ("*", "/"):
                self.pos += 1
                rhs = self.factor()
                if tok[0] == "*":
                    value = value * rhs
                else:
                    try:
                        value = value / rhs
                    except (ArithmeticError, ValueError) as exc:
                        raise ParseError(f"bad divisor: {exc}",
                                         tok[1], tok[2]) from None
            else:
                return value

    def factor(self):
        tok = self._peek()
        if tok and tok[0] == "-":
            self.pos += 1
            return -self.factor()
        return self.power()

    def power(self):
        base = self.atom()
        tok = self._peek()
        if tok and tok[0] == "^":
            self.pos += 1
            exp_tok = self._next()
            if not isinstance(exp_tok[0], int):
                raise ParseError("exponent must be an integer literal",
                                 exp_tok[1], exp_tok[2])
            return base ** exp_tok[0]
        return base

    def atom(self):
        tok = self._next()
        value, line, col = tok
        if value == "(":
            inner = self.expression()
            closing = self._next()
            if closing[0] != ")":
                raise ParseError("expected ')'", closing[1], closing[2])
            return inner
        if isinstance(value, int):
            return SuperExpr.constant(self.table, value)
        if isinstance(value, str) and value not in _OPERATORS:
            try:
                return SuperExpr.symbol(self.table, value)
            except SymbolError:
                raise ParseError(f"unknown symbol {value!r}",
                                 line, col) from None
        raise ParseError(f"unexpected token {value!r}", line, col)


def parse_expr(text, table):
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty expression")
    return _Parser(tokens, table).parse()


# -- rendering -----------------------------------------------------------------


def _render_number(value):
    if isinstance(value, Fraction) and value.denominator != 1:
        return f"{value.numerator}/{value.denominator}"
    return str(int(value))


def _render_monomial(table, mono, coeff):
    """One even monomial with integer or fractional coefficient."""
    parts = []
    for idx, power in enumerate(mono):
        if not power:
            continue
        name = table.even_symbols[idx]
        parts.append(name if power == 1 else f"{name}^{power}")
    if not parts:
        return _render_number(coeff)
    body = "*".join(parts)
    if coeff == 1:
        return body
    if coeff == -1:
        return "-" + body
    return f"{_render_number(coeff)}*{body}"


def _render_poly(table, terms):
    if not terms:
        return "0"
    rendered = []
    for mono, coeff in terms:
        text = _render_monomial(table, mono, coeff)
        if not rendered:
            rendered.append(text)
        elif text.startswith("-"):
            rendered.append(" - " + text[1:])
        else:
            rendered.append(" + " + text)
    return "".join(rendered)


def _poly_is_atomic(table, terms):
    """True when the polynomial renders to a bare integer or symbol power."""
    if len(terms) != 1:
        return False
    mono, coeff = terms[0]
    nontrivial = [p for p in mono if p]
    if not nontrivial:
        return coeff >= 0
    return coeff == 1 and len(nontrivial) == 1


def render_scalar(scalar):
    """Canonical text for a Scalar; second value: safe as product factor."""
    table = scalar.table
    num_terms = scalar.numer_terms
    den_terms = scalar.denom_terms
    if scalar.f.denom.is_ground:
        q = int(scalar.f.denom.coeff(1))
        folded = [(m, Fraction(c, q)) for m, c in num_terms]
        return _render_poly(table, folded), len(folded) <= 1
    num = _render_poly(table, num_terms)
    if len(num_terms) > 1:
        num = f"({num})"
    den = _render_poly(table, den_terms)
    if not _poly_is_atomic(table, den_terms):
        den = f"({den})"
    return f"{num}/{den}", True


def render_expr(expr):
    """Deterministic canonical-order rendering of a SuperExpr."""
    table = expr.table
    if not expr.terms:
        return "0"
    out = []
    for key in sorted(expr.terms, key=lambda k: (len(k), k)):
        coeff = expr.terms[key]
        odd = "*".join(table.odd_name(i) for i in key)
        text, product_safe = render_scalar(coeff)
        if odd:
            if text == "1":
                text = odd
            elif text == "-1":
                text = "-" + odd
            else:
                if not product_safe:
                    text = f"({text})"
                text = f"{text}*{odd}"
        if not out:
            out.append(text)
        elif text.startswith("-"):
            out.append(" - " + text[1:])
        else:
            out.append(" + " + text)
    return "".join(out)
