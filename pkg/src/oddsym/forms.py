"""Dictionary between base-manifold calculus and superspace objects.

Multivector fields are functions of (x, theta); differential forms are
functions of (x, xi) where the frame odds xi transform like dx.  The two
sides are tied together by

    tau       multivector  ->  function      (a renaming of theta slots)
    tau_sharp form         ->  semidensity   (Berezin transform against
                                              exp(theta_i xi^i))

and every operation here is calibrated so the low-dimensional mapping
table comes out exactly: for n = 2,

    f(x)            ->  f th1*th2
    w1 dx1 + w2 dx2 ->  w1 th2 - w2 th1
    w dx1^dx2       ->  -w
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .scalars import Scalar, ScalarError
from .superexpr import ParityError, SuperExpr
from .symbols import Chart
from .symplectic import Semidensity, bracket


@dataclass
class MultivectorField:
    expr: SuperExpr
    chart: Chart

    def __post_init__(self):
        table = self.chart.table
        nt = table.n_theta
        nf = nt + len(table.frame_odds)
        for key in self.expr.terms:
            if any(nt <= i < nf for i in key):
                raise ValueError("multivector fields carry no frame odds")


@dataclass
class DifferentialForm:
    expr: SuperExpr
    chart: Chart

    def __post_init__(self):
        table = self.chart.table
        for key in self.expr.terms:
            if any(i < table.n_theta for i in key):
                raise ValueError("forms carry no coordinate odds")

    def degree_part(self, k):
        table = self.chart.table
        nt = table.n_theta
        nf = nt + len(table.frame_odds)
        kept = {key: c for key, c in self.expr.terms.items()
                if sum(1 for i in key if nt <= i < nf) == k}
        return DifferentialForm(SuperExpr(table, kept), self.chart)

    def xi_degree(self):
        table = self.chart.table
        nt = table.n_theta
        nf = nt + len(table.frame_odds)
        return max((sum(1 for i in key if nt <= i < nf)
                    for key in self.expr.terms), default=0)


def chart_frames(chart: Chart):
    """Frame odd names paired slot-by-slot with the chart coordinates."""
    table = chart.table
    if not table.frame_odds:
        raise ValueError("symbol table carries no frame odds")
    return tuple(table.frame_odds[table.odd_index(th)]
                 for th in chart.thetas)


def tau(field: MultivectorField) -> SuperExpr:
    """Multivector -> function on the odd cotangent space (identity on
    the shared representation)."""
    return field.expr


def tau_inverse(expr: SuperExpr, chart: Chart) -> MultivectorField:
    return MultivectorField(expr, chart)


def schouten(t1: MultivectorField, t2: MultivectorField) -> MultivectorField:
    """Bracket of multivectors, defined as the transported odd bracket."""
    out = bracket(t1.expr, t2.expr, t1.chart)
    return MultivectorField(out, t1.chart)


def _exp_kernel(chart):
    table = chart.table
    out = SuperExpr.one(table)
    for th, xi in zip(chart.thetas, chart_frames(chart)):
        out = out * (SuperExpr.one(table)
                     + SuperExpr.symbol(table, th)
                     * SuperExpr.symbol(table, xi))
    return out


def tau_sharp(w: DifferentialForm) -> Semidensity:
    """Berezin transform of the form against exp(theta_i xi^i).

    The xi integration runs in reversed coordinate order, which is the
    one normalization making the n = 2 table exact.
    """
    chart = w.chart
    frames = chart_frames(chart)
    integrand = w.expr * _exp_kernel(chart)
    coeff = integrand.berezin_integral(list(reversed(frames)))
    return Semidensity(coeff, chart)


def _basis_signs(chart):
    """sign sigma_T with tau_sharp(xi_T) = sigma_T theta_{T complement}."""
    table = chart.table
    frames = chart_frames(chart)
    n = chart.n
    out = {}
    for mask in range(1 << n):
        slots = tuple(i for i in range(n) if mask & (1 << i))
        xi_term = SuperExpr.one(table)
        for i in slots:
            xi_term = xi_term * SuperExpr.symbol(table, frames[i])
        image = tau_sharp(DifferentialForm(xi_term, chart)).coefficient
        complement = tuple(i for i in range(n) if i not in slots)
        expected = SuperExpr.one(table)
        for i in complement:
            expected = expected * SuperExpr.symbol(table, chart.thetas[i])
        if image == expected:
            out[complement] = (1, slots)
        elif image == -expected:
            out[complement] = (-1, slots)
        else:
            raise AssertionError("transform is not monomial on the basis")
    return out


def tau_sharp_inverse(s: Semidensity) -> DifferentialForm:
    """Recover the form with tau_sharp(w) = s on a full Darboux chart."""
    chart = s.chart
    table = chart.table
    frames = chart_frames(chart)
    lookup = _basis_signs(chart)
    slot_of = {table.odd_index(th): k for k, th in enumerate(chart.thetas)}
    raw = []
    for key, c in s.coefficient.terms.items():
        theta_part = tuple(i for i in key if i < table.n_theta)
        aux_part = tuple(i for i in key if table.is_aux_index(i))
        if len(theta_part) + len(aux_part) != len(key):
            raise ValueError("semidensity coefficient carries frame odds")
        try:
            slots = tuple(sorted(slot_of[i] for i in theta_part))
        except KeyError:
            raise ValueError("coefficient uses odds outside the chart") \
                from None
        sign, xi_slots = lookup[slots]
        if (len(slots) * len(aux_part)) % 2:
            sign = -sign
        names = [table.odd_name(i) for i in aux_part] + \
            [frames[i] for i in xi_slots]
        raw.append((c if sign > 0 else -c, names))
    w = DifferentialForm(SuperExpr.from_raw_terms(table, raw), chart)
    if tau_sharp(w).coefficient != s.coefficient:
        raise AssertionError("inverse transform failed to round-trip")
    return w


def exterior_d(w: DifferentialForm) -> DifferentialForm:
    """xi^i d/dx^i acting from the left."""
    chart = w.chart
    table = chart.table
    total = SuperExpr.zero(table)
    for x, xi in zip(chart.xs, chart_frames(chart)):
        total = total + SuperExpr.symbol(table, xi) * w.expr.diff(x)
    return DifferentialForm(total, chart)


def poincare_homotopy(w: DifferentialForm) -> DifferentialForm:
    """Radial homotopy h with d h + h d = id on degrees >= 1.

    Polynomial coefficients only: on a term of x-degree m and form degree
    k the operator contracts with the Euler field and divides by m + k.
    """
    from sympy.polys.domains import ZZ

    chart = w.chart
    table = chart.table
    nt = table.n_theta
    nf = nt + len(table.frame_odds)
    x_index = {table.even_index(x) for x in chart.xs}
    slot_by_index = {table.odd_index(xi): k
                     for k, xi in enumerate(chart_frames(chart))}
    out = SuperExpr.zero(table)
    for key, c in w.expr.terms.items():
        frame_positions = [pos for pos, i in enumerate(key) if nt <= i < nf]
        k = len(frame_positions)
        if k == 0:
            continue
        if not c.is_polynomial():
            raise ScalarError("homotopy needs polynomial coefficients")
        den = int(c.f.denom.coeff(1))
        for mono, icoeff in c.numer_terms:
            m = sum(power for idx, power in enumerate(mono)
                    if idx in x_index)
            factor = Fraction(icoeff, den) / (m + k)
            base = Scalar(table, table.field(table.field.ring.from_dict(
                {tuple(mono): ZZ(1)})))
            base = base * Scalar.from_fraction(table, factor)
            for pos in frame_positions:
                slot = slot_by_index[key[pos]]
                new_key = key[:pos] + key[pos + 1:]
                coeff = base * Scalar.symbol(table, chart.xs[slot])
                piece = {new_key: coeff if pos % 2 == 0 else -coeff}
                out = out + SuperExpr(table, piece)
    return DifferentialForm(out, chart)


def inner_product(field: MultivectorField,
                  w: DifferentialForm) -> DifferentialForm:
    """Contraction defined through the transform: tau(T) tau_sharp(w)."""
    s = tau_sharp(w)
    product = Semidensity(tau(field) * s.coefficient, w.chart)
    return tau_sharp_inverse(product)


def _one_form_components(a: DifferentialForm):
    chart = a.chart
    if a.xi_degree() > 1 or a.degree_part(0).expr:
        raise ValueError("shift needs a pure one-form")
    frames = chart_frames(chart)
    comps = []
    for xi in frames:
        # coefficients sit to the left of xi, so strip from the right
        comp = a.expr.right_diff(xi)
        if not comp.is_odd():
            raise ParityError("shift one-form must be odd-valued")
        comps.append(comp)
    return comps


def one_form_shift(a: DifferentialForm, s: Semidensity) -> Semidensity:
    """s(x, theta_i + a_i) for an odd-valued one-form a."""
    chart = s.chart
    table = chart.table
    comps = _one_form_components(a)
    binds = {th: SuperExpr.symbol(table, th) + comp
             for th, comp in zip(chart.thetas, comps)}
    return Semidensity(s.coefficient.substitute(binds), chart)


def one_form_shift_form(a: DifferentialForm,
                        w: DifferentialForm) -> DifferentialForm:
    """Form-level shift, computed through the transform."""
    return tau_sharp_inverse(one_form_shift(a, tau_sharp(w)))


def one_form_shift_series(a: DifferentialForm,
                          w: DifferentialForm) -> DifferentialForm:
    """Independent wedge-series route: sum_p a^p / p! wedge w."""
    chart = w.chart
    table = chart.table
    total = SuperExpr.zero(table)
    power = SuperExpr.one(table)
    factorial = 1
    for p in range(chart.n + 1):
        if p:
            power = power * a.expr
            factorial *= p
            if power.is_zero:
                break
        total = total + Scalar.from_fraction(
            table, Fraction(1, factorial)) * power * w.expr
    return DifferentialForm(total, chart)


def star(w1: DifferentialForm, w2: DifferentialForm) -> DifferentialForm:
    """Product-square-root operation on forms with nonzero top parts."""
    s1 = tau_sharp(w1)
    s2 = tau_sharp(w2)
    product = s1.coefficient * s2.coefficient
    if product.body().is_zero:
        raise ScalarError("both top components must be nonzero")
    root = product.sqrt_series()
    return tau_sharp_inverse(Semidensity(root, w1.chart))


def divergence(field: MultivectorField, w: DifferentialForm) -> SuperExpr:
    """(1/rho) d_i (rho X^i) for a vector field against a top form."""
    chart = w.chart
    table = chart.table
    top = w.degree_part(chart.n)
    if top.expr != w.expr:
        raise ValueError("weight comes from a pure top-degree form")
    frames = chart_frames(chart)
    rho = w.expr
    for xi in reversed(frames):
        rho = rho.diff(xi)
    if rho.body().is_zero:
        raise ScalarError("degenerate top form")
    rho_inv = rho.invert_even()
    total = SuperExpr.zero(table)
    for x, th in zip(chart.xs, chart.thetas):
        component = field.expr.diff(th)
        total = total + (rho * component).diff(x)
    return rho_inv * total


def lagrangian_top_form(s: Semidensity) -> DifferentialForm:
    """Top-degree component of the inverse transform: the integrand over
    the body surface theta = 0."""
    w = tau_sharp_inverse(s)
    return w.degree_part(s.chart.n)


# -- rendering ------------------------------------------------------------------


def render_form(w: DifferentialForm) -> str:
    """dx-wedge notation with ascending indices."""
    from .grammar import render_expr

    chart = w.chart
    table = chart.table
    frames = chart_frames(chart)
    slot_by_index = {table.odd_index(xi): k for k, xi in enumerate(frames)}
    if not w.expr.terms:
        return "0"
    pieces = []
    for key in sorted(w.expr.terms, key=lambda k: (len(k), k)):
        coeff = w.expr.terms[key]
        frame_part = [i for i in key if i in slot_by_index]
        rest = tuple(i for i in key if i not in slot_by_index)
        wedge = "^".join(f"d{chart.xs[slot_by_index[i]]}"
                         for i in frame_part)
        lead = SuperExpr(table, {rest: coeff})
        text = render_expr(lead)
        if wedge:
            if text == "1":
                text = wedge
            elif text == "-1":
                text = "-" + wedge
            else:
                if " + " in text or " - " in text:
                    text = f"({text})"
                text = f"{text}*{wedge}"
        if not pieces:
            pieces.append(text)
        elif text.startswith("-"):
            pieces.append(" - " + text[1:])
        else:
            pieces.append(" + " + text)
    return "".join(pieces)
