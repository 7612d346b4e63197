"""Seeded random generators for expressions, structures and maps.

The verification suites and the test corpus both draw from here, always
through an explicit random.Random so reports stay byte-reproducible.
"""

from __future__ import annotations

import random

from .scalars import Scalar
from .superexpr import SuperExpr


def random_scalar(rng, table, coeff_degree=2, names=None, rational=False,
                  allow_zero=True):
    names = list(names if names is not None else table.even_symbols)
    total = SuperExpr.zero(table)
    for _ in range(rng.randint(0 if allow_zero else 1, 3)):
        coeff = rng.randint(-4, 4)
        if coeff == 0:
            continue
        term = SuperExpr.constant(table, coeff)
        for _ in range(rng.randint(0, coeff_degree)):
            if names:
                term = term * SuperExpr.symbol(table, rng.choice(names))
        total = total + term
    out = total.body()
    if rational and names and rng.random() < 0.4:
        den = Scalar.from_int(table, rng.choice([2, 3])) + \
            Scalar.symbol(table, rng.choice(names)) ** 2
        out = out / den
    return out


def random_expr(rng, table, theta_degree=2, coeff_degree=2, aux=False,
                rational=False, min_theta=0, thetas=None, parity=None,
                even_names=None):
    """Random SuperExpr at desk scale; deterministic under the given rng."""
    thetas = list(thetas if thetas is not None else table.coordinate_odds)
    total = SuperExpr.zero(table)
    for _ in range(rng.randint(1, 4)):
        c = random_scalar(rng, table, coeff_degree, names=even_names,
                          rational=rational, allow_zero=False)
        if c.is_zero:
            continue
        k_theta = rng.randint(min_theta, theta_degree)
        monomial = rng.sample(thetas, min(k_theta, len(thetas)))
        if aux and table.aux_odds and rng.random() < 0.5:
            monomial += rng.sample(list(table.aux_odds),
                                   rng.randint(0, len(table.aux_odds)))
        term = SuperExpr.from_scalar(c)
        for name in monomial:
            term = term * SuperExpr.symbol(table, name)
        total = total + term
    if parity is not None:
        from .symbols import Parity
        total = total.even_part() if parity is Parity.EVEN else total.odd_part()
    return total


def random_homogeneous(rng, table, parity, **kw):
    out = random_expr(rng, table, **kw)
    part = out.even_part() if parity == 0 else out.odd_part()
    return part


# -- canonical map generators ---------------------------------------------------


def random_special_map(rng, chart):
    """Gradient shift theta -> theta + dPhi with odd-constant coefficients."""
    from .symplectic import special_map

    table = chart.table
    if not table.aux_odds:
        raise ValueError("special maps need aux odd constants")
    phi = SuperExpr.zero(table)
    for _ in range(rng.randint(1, 2)):
        c = random_scalar(rng, table, coeff_degree=2, names=chart.xs,
                          allow_zero=False)
        phi = phi + SuperExpr.from_scalar(c) * \
            SuperExpr.symbol(table, rng.choice(list(table.aux_odds)))
    psis = [phi.diff(x) for x in chart.xs]
    return special_map(chart, psis)


def random_point_map(rng, chart):
    """Unipotent triangular polynomial base change (polynomial inverse)."""
    from .symplectic import point_map

    table = chart.table
    n = chart.n
    body = []
    for i in range(n):
        expr = Scalar.symbol(table, chart.xs[i])
        later = list(chart.xs[i + 1:])
        if later and rng.random() < 0.9:
            c = rng.choice([-2, -1, 1, 2, 3])
            deg = rng.randint(1, 2)
            term = Scalar.from_int(table, c)
            for _ in range(deg):
                term = term * Scalar.symbol(table, rng.choice(later))
            expr = expr + term
        body.append(expr)
    inverse = _invert_triangular_body(chart, body)
    return point_map(chart, body, inverse)


def _invert_triangular_body(chart, body):
    table = chart.table
    n = chart.n
    inverse = [None] * n
    # back-substitute: the last component is the identity on x_n
    for i in range(n - 1, -1, -1):
        correction = body[i] - Scalar.symbol(table, chart.xs[i])
        images = {chart.xs[j]: inverse[j] for j in range(i + 1, n)}
        inverse[i] = Scalar.symbol(table, chart.xs[i]) - \
            correction.subs_even(images)
    return inverse


def random_flow_hamiltonian(rng, chart, time_name=None):
    """Odd generator with vanishing theta-linear part."""
    table = chart.table
    total = SuperExpr.zero(table)
    thetas = list(chart.thetas)
    for _ in range(rng.randint(1, 3)):
        c = random_scalar(rng, table, coeff_degree=2, names=chart.xs,
                          allow_zero=False)
        term = SuperExpr.from_scalar(c)
        k = rng.choice([2, 3] if len(thetas) >= 3 else [2])
        k = min(k, len(thetas))
        for name in rng.sample(thetas, k):
            term = term * SuperExpr.symbol(table, name)
        if term.is_even() and table.aux_odds:
            term = term * SuperExpr.symbol(
                table, rng.choice(list(table.aux_odds)))
        if term.is_odd():
            total = total + term
    if time_name is not None and rng.random() < 0.5:
        total = total * SuperExpr.symbol(table, time_name)
    return total.odd_part()


def random_flow_map(rng, chart, t_values=(1,)):
    from .flows import exp_flow

    q = random_flow_hamiltonian(rng, chart)
    return exp_flow(q, chart, rng.choice(list(t_values)))


def random_canonical_map(rng, chart, classes=("special", "point", "flow")):
    """Composition of invertible canonical atoms, inverses included."""
    from .symplectic import SuperMap

    out = SuperMap.identity(chart)
    picks = rng.sample(list(classes), rng.randint(1, len(classes)))
    for kind in picks:
        if kind == "special":
            atom = random_special_map(rng, chart)
        elif kind == "point":
            atom = random_point_map(rng, chart)
        else:
            atom = random_flow_map(rng, chart)
        out = atom.compose(out)
    return out


def random_messy_map(rng, chart):
    """Invertible but generally non-canonical coordinate change."""
    from .symplectic import SuperMap, invert_map

    table = chart.table
    n = chart.n
    atoms = []
    # theta rescale by an invertible triangular scalar matrix
    mat = [[Scalar.from_int(table, 1 if i == j else 0) for j in range(n)]
           for i in range(n)]
    for i in range(n):
        if rng.random() < 0.7:
            mat[i][i] = Scalar.from_int(table, rng.choice([1, 2, 3]))
        for j in range(i + 1, n):
            if rng.random() < 0.5:
                mat[i][j] = random_scalar(rng, table, coeff_degree=1,
                                          names=chart.xs)
    targets = [SuperExpr.symbol(table, x) for x in chart.xs]
    inv_mat, _ = _scalar_inv(mat, table)
    for j in range(n):
        acc = SuperExpr.zero(table)
        for i in range(n):
            acc = acc + SuperExpr.from_scalar(mat[i][j]) * \
                SuperExpr.symbol(table, chart.thetas[i])
        targets.append(acc)
    inverse_targets = [SuperExpr.symbol(table, x) for x in chart.xs]
    for j in range(n):
        acc = SuperExpr.zero(table)
        for i in range(n):
            acc = acc + SuperExpr.from_scalar(inv_mat[i][j]) * \
                SuperExpr.symbol(table, chart.thetas[i])
        inverse_targets.append(acc)
    ident_body = [Scalar.symbol(table, x) for x in chart.xs]
    atoms.append(SuperMap(chart, chart, targets, body_inverse=ident_body,
                          kind="generic", inverse_targets=inverse_targets,
                          check=False))
    # nilpotent shear of the even coordinates
    shear = [SuperExpr.symbol(table, x) for x in chart.xs]
    for i in range(n):
        if rng.random() < 0.8 and n >= 2:
            pair = rng.sample(list(chart.thetas), 2)
            c = random_scalar(rng, table, coeff_degree=1, names=chart.xs,
                              allow_zero=False)
            shear[i] = shear[i] + SuperExpr.from_scalar(c) * \
                SuperExpr.symbol(table, pair[0]) * \
                SuperExpr.symbol(table, pair[1])
    shear += [SuperExpr.symbol(table, th) for th in chart.thetas]
    shear_map = SuperMap(chart, chart, shear, body_inverse=ident_body,
                         kind="generic", check=False)
    shear_map = SuperMap(chart, chart, shear, body_inverse=ident_body,
                         kind="generic",
                         inverse_targets=invert_map(shear_map).targets,
                         check=False)
    atoms.append(shear_map)
    if rng.random() < 0.6:
        atoms.append(random_point_map(rng, chart))
    out = atoms[0]
    for atom in atoms[1:]:
        out = atom.compose(out)
    invert_map(out)  # ensure invertibility up front
    return out


def _scalar_inv(mat, table):
    from .symplectic import scalar_mat_inv

    return scalar_mat_inv(mat)


def pushforward_structure(rng, chart, fmap=None):
    """Push the canonical bracket through an invertible map.

    Returns the structure matrix expressed in the new coordinates; used to
    manufacture non-Darboux inputs whose normalization target is known.
    """
    from .symplectic import (OddSymplecticStructure, SuperMap, bracket,
                             invert_map)

    if fmap is None:
        fmap = random_messy_map(rng, chart)
    inv = invert_map(fmap)
    binds = inv.bindings()
    size = 2 * chart.n
    rows = []
    for a in range(size):
        row = []
        for b in range(size):
            entry = bracket(fmap.targets[a], fmap.targets[b], chart)
            row.append(entry.substitute(binds))
        rows.append(row)
    return OddSymplecticStructure(chart, rows), fmap

