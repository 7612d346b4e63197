"""Constructive normalization of an odd bracket to canonical form.

The structure in the current coordinates is summarized by three matrices

    E^{ij} = {x^i, x^j}    odd, symmetric
    F_{ij} = {th_i, th_j}  odd, antisymmetric
    A^i_j  = {x^i, th_j} = delta^i_j + P^i_j   even, invertible body

and coordinates are graded by the class (p, q): E = O(theta^p),
P = O(theta^q).  Four normalization maps walk the class lattice up to
(n+1, n+1), after which F depends on x alone and is closed, and a final
gradient shift of theta kills it.  Every step recomputes the bracket in
the new coordinates through the step's exact inverse, and every class
transition is re-verified from scratch.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .scalars import Scalar, binomial_half
from .superexpr import SuperExpr
from .symbols import Chart
from .symplectic import (CanonicityError, OddSymplecticStructure,
                         ResidualReport, SuperMap, bracket, is_canonical,
                         mat_inv_even)


@dataclass
class StructureMatrices:
    E: list
    F: list
    A: list
    P: list
    p_class: int
    q_class: int

    def in_class(self, p, q):
        return self.p_class >= p and self.q_class >= q


def _matrix_order(entries, cap):
    order = cap
    for row in entries:
        for entry in row:
            order = min(order, entry.theta_order())
    return int(min(order, cap))


def structure_matrices(omega: OddSymplecticStructure, chart: Chart):
    n = chart.n
    table = chart.table
    m = omega.matrix
    E = [[m[i][j] for j in range(n)] for i in range(n)]
    F = [[m[n + i][n + j] for j in range(n)] for i in range(n)]
    A = [[m[i][n + j] for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            if E[i][j] != E[j][i]:
                raise ValueError("even-even brackets must be symmetric")
            if F[i][j] != -F[j][i]:
                raise ValueError("odd-odd brackets must be antisymmetric")
    delta = [[SuperExpr.one(table) if i == j else SuperExpr.zero(table)
              for j in range(n)] for i in range(n)]
    P = [[A[i][j] - delta[i][j] for j in range(n)] for i in range(n)]
    body = [[A[i][j].body() for j in range(n)] for i in range(n)]
    from .symplectic import scalar_mat_det
    if scalar_mat_det(body).is_zero:
        raise CanonicityError("structure body is degenerate")
    cap = table.n_theta + 1
    return StructureMatrices(E, F, A, P, _matrix_order(E, cap),
                             _matrix_order(P, cap))


def solve_R(E, F, table):
    """Symmetric odd solution of 2R + RFR = E by the square-root series.

    R = sum_k c_k (EF)^k E with sum c_k t^k = (sqrt(1+t) - 1)/t, i.e.
    c_0 = 1/2, c_1 = -1/8, ...; the series is finite by nilpotency and
    the residual is re-checked exactly.
    """
    n = len(E)
    for mat in (E, F):
        for row in mat:
            for entry in row:
                if entry and not entry.is_odd():
                    raise ValueError("structure matrices must be odd-valued")
    from .symplectic import mat_mul

    bound = max(n * (n - 1) // 2, table.total_odds // 2 + 1)
    R = [[SuperExpr.zero(table) for _ in range(n)] for _ in range(n)]
    term = E
    for k in range(bound + 1):
        coeff = Scalar.from_fraction(table, binomial_half(k + 1))
        nonzero = False
        for i in range(n):
            for j in range(n):
                piece = coeff * term[i][j]
                if piece:
                    nonzero = True
                R[i][j] = R[i][j] + piece
        if not nonzero and k > 0:
            break
        term = mat_mul(mat_mul(term, F), E)
    residual = _solve_r_residual(R, E, F, table)
    for i in range(n):
        for j in range(n):
            if not residual[i][j].is_zero:
                raise CanonicityError("series solution failed the residual")
            if R[i][j] != R[j][i]:
                raise CanonicityError("solution lost its symmetry")
    return R


def _solve_r_residual(R, E, F, table):
    from .symplectic import mat_mul

    n = len(E)
    RFR = mat_mul(mat_mul(R, F), R)
    return [[R[i][j] * 2 + RFR[i][j] - E[i][j] for j in range(n)]
            for i in range(n)]


def _theta_rescale_integral(entry, weight, table):
    """int_0^1 tau^weight entry(x, tau theta) dtau, exact on components."""
    total = SuperExpr.zero(table)
    for p in range(table.n_theta + 1):
        part = entry.homogeneous_part(p)
        if part.is_zero:
            continue
        total = total + Scalar.from_fraction(
            table, Fraction(1, p + weight + 1)) * part
    return total


def _new_structure(omega, chart, fmap):
    binds = dict(zip(fmap.source.coordinate_names, fmap.inverse_targets))
    size = 2 * chart.n
    rows = []
    for a in range(size):
        row = []
        for b in range(size):
            entry = bracket(fmap.targets[a], fmap.targets[b], chart, omega)
            row.append(entry.substitute(binds))
        rows.append(row)
    return OddSymplecticStructure(chart, rows, check=False)


def _iterate_inverse(chart, fmap_targets, update, bound):
    table = chart.table
    names = chart.coordinate_names
    current = [SuperExpr.symbol(table, name) for name in names]
    for _ in range(bound):
        new = update(dict(zip(names, current)))
        if new == current:
            break
        current = new
    else:
        raise CanonicityError("step inversion did not stabilize")
    forward = dict(zip(names, fmap_targets))
    for z, name in zip(current, names):
        # G o F = id, checked coordinate by coordinate
        if z.substitute(forward) != SuperExpr.symbol(table, name):
            raise CanonicityError("step inverse failed verification")
    return current


def darboux_step(kind, omega: OddSymplecticStructure, chart: Chart):
    """One normalization map; returns (map with inverse, new structure)."""
    table = chart.table
    n = chart.n
    sm = structure_matrices(omega, chart)
    xs = [SuperExpr.symbol(table, x) for x in chart.xs]
    ths = [SuperExpr.symbol(table, th) for th in chart.thetas]
    bound = table.total_odds + 2

    if kind == "F1":
        ainv = mat_inv_even(sm.A)
        targets = list(xs) + [
            _row_times_matrix(ths, ainv, j, table) for j in range(n)]

        def update(binds):
            a_eval = [[sm.A[i][j].substitute(binds) for j in range(n)]
                      for i in range(n)]
            return list(xs) + [
                _row_times_matrix(ths, a_eval, j, table) for j in range(n)]

    elif kind == "F2":
        if sm.q_class < 1:
            raise CanonicityError("F2 needs A = id + O(theta)")
        R = solve_R(sm.E, sm.F, table)
        targets = [xs[i] - _theta_contraction(ths, R, i, table)
                   for i in range(n)] + list(ths)

        def update(binds):
            r_eval = [[R[m][i].substitute(binds) for i in range(n)]
                      for m in range(n)]
            return [xs[i] + _theta_contraction(ths, r_eval, i, table)
                    for i in range(n)] + list(ths)

    elif kind == "F3":
        if sm.p_class < 1 or sm.q_class < 1:
            raise CanonicityError("F3 needs class at least (1,1)")
        W = [[_theta_rescale_integral(sm.E[m][i], 1, table)
              for i in range(n)] for m in range(n)]
        targets = [xs[i] - _theta_contraction(ths, W, i, table)
                   for i in range(n)] + list(ths)

        def update(binds):
            w_eval = [[W[m][i].substitute(binds) for i in range(n)]
                      for m in range(n)]
            return [xs[i] + _theta_contraction(ths, w_eval, i, table)
                    for i in range(n)] + list(ths)

    elif kind == "F4":
        if sm.p_class < table.n_theta + 1:
            raise CanonicityError("F4 needs E = 0")
        if sm.q_class < 1:
            raise CanonicityError("F4 needs P = O(theta)")
        V = [[_theta_rescale_integral(sm.P[m][j], 0, table)
              for j in range(n)] for m in range(n)]
        targets = list(xs) + [ths[j] - _theta_contraction(ths, V, j, table)
                              for j in range(n)]

        def update(binds):
            v_eval = [[V[m][j].substitute(binds) for j in range(n)]
                      for m in range(n)]
            thetas_g = [binds[name] for name in chart.thetas]
            return list(xs) + [
                ths[j] + _theta_contraction(thetas_g, v_eval, j, table)
                for j in range(n)]

    else:
        raise ValueError(f"unknown step kind {kind!r}")

    ident = [SuperExpr.symbol(table, name) for name in chart.coordinate_names]
    if targets == ident:
        fmap = SuperMap.identity(chart)
        return fmap, omega
    inverse = _iterate_inverse(chart, targets, update, bound)
    fmap = SuperMap(chart, chart, targets, kind=f"darboux-{kind}",
                    inverse_targets=inverse, check=False)
    new_omega = _new_structure(omega, chart, fmap)
    _check_transition(kind, sm, structure_matrices(new_omega, chart), chart)
    return fmap, new_omega


def _row_times_matrix(ths, matrix, j, table):
    total = SuperExpr.zero(table)
    for m in range(len(ths)):
        total = total + ths[m] * matrix[m][j]
    return total


def _theta_contraction(ths, matrix, i, table):
    total = SuperExpr.zero(table)
    for m in range(len(ths)):
        total = total + ths[m] * matrix[m][i]
    return total


def _check_transition(kind, before, after, chart):
    cap = chart.table.n_theta + 1
    ok = True
    if kind == "F1":
        ok = after.q_class >= 1 and after.p_class >= before.p_class
    elif kind == "F2":
        ok = after.p_class >= 1
    elif kind == "F3":
        ok = after.p_class >= min(before.p_class + 1, cap) \
            and after.q_class >= 1
    elif kind == "F4":
        ok = after.q_class >= min(before.q_class + 1, cap) \
            and after.p_class >= cap
    if not ok:
        raise CanonicityError(
            f"step {kind} missed its class transition "
            f"({before.p_class},{before.q_class}) -> "
            f"({after.p_class},{after.q_class})")


def two_form_potential(fmat, chart):
    """A_j with dA = F for a closed x-dependent two-form matrix.

    The degree-2 radial homotopy in closed form:
    A_j = sum_i int_0^1 x^i F_ij(t x) t dt, evaluated monomial by
    monomial as division by (x-degree + 2).
    """
    from sympy.polys.domains import ZZ

    table = chart.table
    n = chart.n
    x_index = {table.even_index(x) for x in chart.xs}
    for i in range(n):
        for j in range(n):
            entry = fmat[i][j]
            if entry.max_theta_degree() > 0:
                raise CanonicityError("two-form still depends on theta")
            for k in range(n):
                closed = fmat[i][j].diff(chart.xs[k]) \
                    + fmat[j][k].diff(chart.xs[i]) \
                    + fmat[k][i].diff(chart.xs[j])
                if not closed.is_zero:
                    raise CanonicityError("two-form is not closed")
    potential = [SuperExpr.zero(table) for _ in range(n)]
    for i in range(n):
        for j in range(n):
            entry = fmat[i][j]
            if entry.is_zero:
                continue
            for key, c in entry.terms.items():
                if not c.is_polynomial():
                    raise CanonicityError("pipeline needs polynomial data")
                den = int(c.f.denom.coeff(1))
                for mono, icoeff in c.numer_terms:
                    m = sum(p for idx, p in enumerate(mono)
                            if idx in x_index)
                    scal = Scalar(table, table.field(
                        table.field.ring.from_dict({tuple(mono): ZZ(1)})))
                    scal = scal * Scalar.from_fraction(
                        table, Fraction(icoeff, den * (m + 2)))
                    piece = SuperExpr(table, {key: scal}) * \
                        SuperExpr.symbol(table, chart.xs[i])
                    potential[j] = potential[j] + piece
    return potential


def _theta_translation(chart, shifts):
    """theta_j -> theta_j + A_j(x); unlike a special canonical map the
    shift one-form is not closed here (dA is the two-form being killed)."""
    table = chart.table
    targets = [SuperExpr.symbol(table, x) for x in chart.xs]
    targets += [SuperExpr.symbol(table, th) + a
                for th, a in zip(chart.thetas, shifts)]
    inverse = [SuperExpr.symbol(table, x) for x in chart.xs]
    inverse += [SuperExpr.symbol(table, th) - a
                for th, a in zip(chart.thetas, shifts)]
    return SuperMap(chart, chart, targets, kind="darboux-shift",
                    inverse_targets=inverse, check=False)


@dataclass
class PipelineResult:
    steps: list
    composite: SuperMap
    final_omega: OddSymplecticStructure
    report: ResidualReport

    @property
    def ok(self):
        return self.report.ok


def darboux_pipeline(omega: OddSymplecticStructure, chart: Chart):
    """Full normalization; the composite map sends the given structure to
    the canonical one, verified through the bracket residuals."""
    table = chart.table
    cap = table.n_theta + 1
    state = omega
    composite = SuperMap.identity(chart)
    steps = []

    def run(kind):
        nonlocal state, composite
        fmap, state = darboux_step(kind, state, chart)
        if not fmap.is_identity():
            steps.append((kind, fmap))
            composite = fmap.compose(composite)

    sm = structure_matrices(state, chart)
    if sm.q_class == 0:
        run("F1")
        sm = structure_matrices(state, chart)
    if sm.p_class == 0:
        run("F2")
        sm = structure_matrices(state, chart)
        if sm.q_class == 0:
            run("F1")
            sm = structure_matrices(state, chart)
    guard = 0
    while sm.p_class < cap:
        run("F3")
        new_sm = structure_matrices(state, chart)
        if new_sm.p_class <= sm.p_class:
            raise CanonicityError("normalization stalled on E")
        sm = new_sm
        guard += 1
        if guard > cap:
            raise CanonicityError("too many E-normalization steps")
    guard = 0
    while sm.q_class < cap:
        run("F4")
        new_sm = structure_matrices(state, chart)
        if new_sm.q_class <= sm.q_class:
            raise CanonicityError("normalization stalled on P")
        sm = new_sm
        guard += 1
        if guard > cap:
            raise CanonicityError("too many P-normalization steps")

    if any(entry for row in sm.F for entry in row):
        potential = two_form_potential(sm.F, chart)
        shift = _theta_translation(chart, potential)
        fmap, state = shift, _new_structure(state, chart, shift)
        steps.append(("shift", fmap))
        composite = fmap.compose(composite)

    final = structure_matrices(state, chart)
    if final.p_class < cap or final.q_class < cap or \
            any(entry for row in final.F for entry in row):
        raise CanonicityError("pipeline did not reach canonical form")
    ok, report = is_canonical(composite, omega)
    if not ok:
        raise CanonicityError("composite map failed the bracket check")
    return PipelineResult(steps, composite, state, report)
