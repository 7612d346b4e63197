"""Delta operators on functions and semidensities, and their identities.

delta0 is the flat operator sum_i d^2/dx^i dth_i in a Darboux chart; with
a volume form rho D(x,th) the operator on functions becomes

    delta_vol f = delta0 f + (1/2) rho^{-1} {rho, f},

the log never being materialized because the bracket is a derivation in
its first slot.  On semidensities the chart expression of the intrinsic
odd operator is delta0 on the coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .scalars import Scalar
from .superexpr import ParityError, SuperExpr
from .symbols import Chart, Parity
from .symplectic import (Semidensity, SuperMap, bracket, ber_sqrt,
                         map_berezinian)


@dataclass
class VolumeForm:
    """rho(x,theta) D(x,theta) with invertible body."""

    density: SuperExpr
    chart: Chart

    def __post_init__(self):
        if not self.density.is_even():
            raise ParityError("volume density must be even")
        if self.density.body().is_zero:
            raise ValueError("volume density has vanishing body")


def delta0(f, chart: Chart):
    """sum_i d/dx^i of the left derivative d/dth_i of f."""
    total = SuperExpr.zero(chart.table)
    for x, th in zip(chart.xs, chart.thetas):
        total = total + f.diff(th).diff(x)
    return total


def _half(table):
    return Scalar.from_fraction(table, Fraction(1, 2))


def delta_vol(f, dv: VolumeForm):
    """delta0 f + (1/2) rho^{-1} {rho, f}."""
    chart = dv.chart
    rho_inv = dv.density.invert_even()
    corr = rho_inv * bracket(dv.density, f, chart)
    return delta0(f, chart) + _half(chart.table) * corr


def divergence_delta(f, dv: VolumeForm):
    """The same operator computed as half the signed divergence of the
    Hamiltonian field of f.

    Sign table pinned by exact agreement with delta_vol: the A-th term of
    the divergence carries (-1)^(p(f) p(z^A)) in front of d_A {f, z^A},
    and the density term {f, z^A} rho^{-1} d_A rho carries no extra sign.
    """
    chart = dv.chart
    table = chart.table
    feven, fodd = f.even_part(), f.odd_part()
    total = SuperExpr.zero(table)
    rho_inv = dv.density.invert_even()
    for part, p_odd in ((feven, False), (fodd, True)):
        if part.is_zero:
            continue
        names = chart.coordinate_names
        div = SuperExpr.zero(table)
        for a, name in enumerate(names):
            comp = bracket(part, SuperExpr.symbol(table, name), chart)
            piece = comp.diff(name)
            if p_odd and a >= chart.n:
                piece = -piece
            div = div + piece + comp * rho_inv * dv.density.diff(name)
        div = _half(table) * div
        total = total + (-div if p_odd else div)
    return total


def delta_sharp(s: Semidensity):
    """Coefficient-wise delta0; parity of the result is flipped."""
    if not s.chart.darboux:
        raise ValueError("the semidensity operator needs a Darboux chart")
    return Semidensity(delta0(s.coefficient, s.chart), s.chart)


def infinitesimal_action(q, s: Semidensity):
    """Anticommutator action Q * (delta s) + delta(Q * s) of an odd q."""
    if not q.is_odd():
        raise ParityError("generator must be odd")
    chart = s.chart
    return Semidensity(q * delta0(s.coefficient, chart)
                       + delta0(q * s.coefficient, chart), chart)


def bv_identity_residuals(f, g, dv: VolumeForm, fmap: SuperMap = None):
    """Residual expressions for the operator identities; all must be zero.

    bracket_leibniz and product_leibniz are the two derivation laws of
    delta_vol; chart_change compares the flat operators of two Darboux
    charts through the Berezinian correction; module_rule and
    square_formula tie delta_vol to the semidensity operator via
    sqrt(rho); ber_root_closed states the Berezinian root of a canonical
    map is annihilated by delta0.
    """
    chart = dv.chart
    table = chart.table
    for name, val in (("f", f), ("g", g)):
        if val.parity() is Parity.MIXED:
            raise ParityError(f"{name} must be homogeneous")
    pf = 1 if f.is_odd() and not f.is_zero else 0
    out = {}

    lhs = delta_vol(bracket(f, g, chart), dv)
    rhs = bracket(delta_vol(f, dv), g, chart)
    second = bracket(f, delta_vol(g, dv), chart)
    rhs = rhs - second if pf == 0 else rhs + second
    out["bracket_leibniz"] = lhs - rhs

    lhs = delta_vol(f * g, dv)
    rhs = delta_vol(f, dv) * g
    tail = f * delta_vol(g, dv) + bracket(f, g, chart)
    rhs = rhs + tail if pf == 0 else rhs - tail
    out["product_leibniz"] = lhs - rhs

    rho = dv.density
    s = rho.sqrt_even()
    lhs = delta0(f * s, chart)
    rhs = delta_vol(f, dv) * s
    tail = f * delta0(s, chart)
    rhs = rhs + tail if pf == 0 else rhs - tail
    out["module_rule"] = lhs - rhs

    nu_fn = s.invert_even() * delta0(s, chart)
    out["square_formula"] = delta_vol(delta_vol(f, dv), dv) \
        - bracket(nu_fn, f, chart)

    out["delta0_squared"] = delta0(delta0(f, chart), chart)

    if fmap is not None:
        binds = fmap.bindings()
        ber = map_berezinian(fmap)
        ber_inv = ber.invert_even()
        pulled = f.substitute(binds)
        out["chart_change"] = delta0(pulled, fmap.source) \
            - delta0(f, fmap.target).substitute(binds) \
            + _half(table) * ber_inv * bracket(ber, pulled, fmap.source)
        out["ber_root_closed"] = delta0(ber_sqrt(fmap), fmap.source)
    return out


def canonical_objects(dv: VolumeForm):
    """(sqrt dv, delta sqrt dv, their product, their ratio)."""
    chart = dv.chart
    s = dv.density.sqrt_even()
    ds = delta0(s, chart)
    return (Semidensity(s, chart), Semidensity(ds, chart), s * ds,
            s.invert_even() * ds)


def top_coefficient(s: Semidensity):
    """Signed coefficient of th_1...th_n, no constancy requirement."""
    return s.coefficient.coefficient(s.chart.thetas)


def c_invariant(s: Semidensity):
    """|c| for the top term c th_1...th_n; needs a constant top part."""
    chart = s.chart
    raw = top_coefficient(s)
    top = s.coefficient.homogeneous_part(chart.n)
    expected = SuperExpr.from_scalar(raw)
    for th in chart.thetas:
        expected = expected * SuperExpr.symbol(chart.table, th)
    if top != expected or not raw.is_constant():
        raise ValueError("top term is not a constant multiple of the "
                         "full theta monomial")
    return Scalar.from_fraction(chart.table, abs(raw.as_fraction()))


def classify_nu(s: Semidensity):
    """The odd constant nu with delta s = nu s, or None.

    nu is sought in the span of the aux odd generators with rational
    constant coefficients, the only odd constants this model has.
    """
    if not s.coefficient.is_even():
        raise ParityError("eigen-semidensity classification needs even s")
    if s.coefficient.body().is_zero:
        raise ValueError("degenerate semidensity")
    chart = s.chart
    table = chart.table
    ratio = s.coefficient.invert_even() * delta0(s.coefficient, chart)
    if ratio.is_zero:
        return SuperExpr.zero(table)
    for key, coeff in ratio.terms.items():
        if len(key) != 1 or not table.is_aux_index(key[0]) \
                or not coeff.is_constant():
            return None
    if delta0(s.coefficient, chart) != ratio * s.coefficient:
        return None
    return ratio


def moser_hamiltonian(s: Semidensity, r: Semidensity, time_name="t"):
    """-r / (s + t delta r) as a polynomial in the formal time symbol.

    The denominator body is theta-free, so the nilpotent inversion is a
    finite t-polynomial; by construction Q(t) (s + t delta r) = -r.
    """
    chart = s.chart
    table = chart.table
    if not s.coefficient.is_even():
        raise ParityError("the transported semidensity must be even")
    if s.coefficient.body().is_zero:
        raise ValueError("degenerate semidensity")
    if not r.coefficient.is_odd():
        raise ParityError("the deformation direction must be odd")
    t = SuperExpr.symbol(table, time_name)
    denom = s.coefficient + t * delta0(r.coefficient, chart)
    return -(r.coefficient * denom.invert_even())
