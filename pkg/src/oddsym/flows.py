"""Graded integration of odd Hamiltonian flows and its inverse problem.

The flow equations

    dy^i/dt = {Q, y^i} = -dQ/dth_i,      deta_j/dt = {Q, eta_j} = dQ/dx^j

are solved by Picard iteration in the nilpotent filtration: every pass
gains at least one unit of odd weight, so the iteration reaches a fixed
point after finitely many rounds and the result is an exact polynomial in
the formal time symbol.
"""

from __future__ import annotations

from fractions import Fraction

from .bv import delta0
from .scalars import Scalar, ScalarError
from .superexpr import ParityError, SuperExpr
from .symbols import Chart
from .symplectic import (CanonicityError, Semidensity, SuperMap,
                         hamiltonian_field, pullback_semidensity)


class FlowHamiltonian:
    """Odd generator with no theta-linear component.

    A theta-linear part would produce genuine even-variable differential
    equations whose solutions leave the rational function field; those
    transformations are built directly as point maps instead.
    """

    def __init__(self, expr: SuperExpr, chart: Chart, time_name=None):
        if not expr.is_odd():
            raise ParityError("flow generator must be odd")
        if not expr.homogeneous_part(1).is_zero:
            raise CanonicityError(
                "theta-linear generators are outside the integrable class")
        self.expr = expr
        self.chart = chart
        self.time_name = time_name

    def theta_profile(self):
        return sorted({expr_degree for expr_degree in
                       (self.expr.theta_degree_of_key(k)
                        for k in self.expr.terms)})


def _integrate_time(expr, time_name):
    out = {}
    for key, coeff in expr.terms.items():
        out[key] = coeff.integrate_monomial(time_name)
    return SuperExpr(expr.table, {k: v for k, v in out.items()
                                  if not v.is_zero})


def exp_flow(q, chart: Chart, t_value=1, time_name="t"):
    """Exact flow map of an odd generator, polynomial in time.

    ``t_value`` may be a rational number or the string "formal", in which
    case the map keeps the symbolic time variable.  Time-dependent
    generators are supported as polynomials in that same symbol.
    """
    if isinstance(q, FlowHamiltonian):
        q = q.expr
    else:
        q = FlowHamiltonian(q, chart, time_name).expr
    table = chart.table
    if not table.is_even(time_name):
        raise ScalarError(f"table has no even time symbol {time_name!r}")
    names = chart.coordinate_names
    coords = [SuperExpr.symbol(table, name) for name in names]
    ham = hamiltonian_field(q, chart)
    current = list(coords)
    bound = table.n_theta + len(table.frame_odds) + 2 * len(table.aux_odds) + 3
    for _ in range(bound):
        binds = dict(zip(names, current))
        new = []
        for z, component in zip(coords, ham):
            evolved = component.substitute(binds)
            new.append(z + _integrate_time(evolved, time_name))
        if new == current:
            break
        current = new
    else:
        raise CanonicityError("flow integration did not stabilize")

    time_dependent = any(c.depends_on(time_name)
                         for comp in ham for c in comp.scalars())
    minus_t = {time_name: -SuperExpr.symbol(table, time_name)}
    inverse = None
    if not time_dependent:
        inverse = [tgt.substitute(minus_t) for tgt in current]
    if t_value != "formal":
        at = {time_name: SuperExpr.constant(table, Fraction(t_value))}
        current = [tgt.substitute(at) for tgt in current]
        if inverse is not None:
            inverse = [tgt.substitute(at) for tgt in inverse]
    identity_body = [Scalar.symbol(table, x) for x in chart.xs]
    return SuperMap(chart, chart, current, body_inverse=identity_body,
                    kind="flow", params={"generator": q, "t": t_value},
                    inverse_targets=inverse, check=False)


def _delta_map(chart, components):
    """-sum_i th_i int_0^1 f^i(x, tau th) dtau on theta-degree parts."""
    table = chart.table
    total = SuperExpr.zero(table)
    for th, comp in zip(chart.thetas, components):
        for p in range(1, table.n_theta + 1):
            part = comp.homogeneous_part(p)
            if part.is_zero:
                continue
            total = total - SuperExpr.symbol(table, th) * part * \
                Scalar.from_fraction(table, Fraction(1, p + 1))
    return total


def hamiltonian_from_adjusted(fmap: SuperMap, time_name="t"):
    """The unique O(theta^2) generator whose unit-time flow is the map.

    Built by graded correction: seed with the delta map of the even
    displacement components, re-flow, and repeat; each round fixes one
    more theta-degree, and uniqueness makes the fixed point the answer.
    """
    chart = fmap.source
    table = chart.table
    n = chart.n
    for i in range(n):
        if fmap.targets[i].homogeneous_part(0) != \
                SuperExpr.symbol(table, chart.xs[i]):
            raise CanonicityError("map is not adjusted")
        if not fmap.targets[n + i].homogeneous_part(0).is_zero:
            raise CanonicityError("map is not adjusted")
    from .symplectic import is_canonical
    ok, _ = is_canonical(fmap)
    if not ok:
        raise CanonicityError("map is not canonical")

    displacement = [fmap.targets[i] - SuperExpr.symbol(table, chart.xs[i])
                    for i in range(n)]
    q = _delta_map(chart, displacement)
    for _ in range(table.n_theta + 2):
        flow = exp_flow(q, chart, 1, time_name)
        if list(flow.targets) == list(fmap.targets):
            return q
        error = [fmap.targets[i] - flow.targets[i] for i in range(n)]
        correction = _delta_map(chart, error)
        if correction.is_zero:
            raise CanonicityError(
                "no O(theta^2) generator reproduces the map")
        q = q + correction
    raise CanonicityError("generator recursion did not converge")


def moser_flow(s: Semidensity, r: Semidensity, time_name="t"):
    """Flow transporting s + delta r back to s, with its exact residual.

    The generator is r/(s + t delta r); with this sign the operational
    pull-back (substitute targets, multiply by the Berezinian root) of
    s + delta r along the unit-time flow returns s on the nose.
    """
    from .bv import delta_sharp, moser_hamiltonian

    chart = s.chart
    closed = delta_sharp(s)
    if not closed.coefficient.is_zero:
        raise CanonicityError("transported semidensity must be closed")
    if r.coefficient.theta_order() < 2:
        raise CanonicityError("deformation direction must be O(theta^2)")
    q = -moser_hamiltonian(s, r, time_name)
    flow = exp_flow(q, chart, 1, time_name)
    target = Semidensity(s.coefficient + delta0(r.coefficient, chart), chart)
    residual = pullback_semidensity(flow, target).coefficient - s.coefficient
    return flow, residual
