import random

import pytest

from oddsym.grammar import parse_expr
from oddsym.sampling import (pushforward_structure, random_canonical_map,
                             random_expr, random_messy_map, random_point_map,
                             random_special_map)
from oddsym.scalars import Scalar
from oddsym.superexpr import SuperExpr
from oddsym.symbols import Chart, standard_table
from oddsym.symplectic import (CanonicityError, OddSymplecticStructure,
                               Semidensity, SuperMap, ber_sqrt, bracket,
                               construct_map, decompose_canonical_map,
                               hamiltonian_field, invert_map, is_canonical,
                               jacobi_residual, map_berezinian,
                               pullback_semidensity)


def make_chart(n, aux=2):
    table = standard_table(n, aux=aux, extra_even=("t",))
    return Chart(table, table.even_symbols[:n], table.coordinate_odds)


@pytest.fixture
def c2():
    return make_chart(2)


@pytest.fixture
def c3():
    return make_chart(3)


def e(chart, text):
    return parse_expr(text, chart.table)


def test_bracket_canonical_pairs(c2):
    assert bracket(e(c2, "x1"), e(c2, "th1"), c2) == e(c2, "1")
    assert bracket(e(c2, "th1"), e(c2, "th1"), c2).is_zero
    assert bracket(e(c2, "th1"), e(c2, "x1"), c2) == e(c2, "-1")
    assert bracket(e(c2, "x1"), e(c2, "x2"), c2).is_zero


def test_bracket_worked_example(c2):
    # {th1*th2, x1} expands through the odd-derivative slot
    assert bracket(e(c2, "th1*th2"), e(c2, "x1"), c2) == e(c2, "th2")


def test_bracket_general_matches_canonical(c2):
    rng = random.Random(5)
    omega = OddSymplecticStructure.canonical(c2)
    for _ in range(60):
        f = random_expr(rng, c2.table, theta_degree=2, coeff_degree=2,
                        aux=True)
        g = random_expr(rng, c2.table, theta_degree=2, coeff_degree=2,
                        aux=True)
        assert bracket(f, g, c2, omega) == bracket(f, g, c2)


def test_hamiltonian_field(c2):
    dfield = hamiltonian_field(e(c2, "th1"), c2)
    assert dfield[0] == e(c2, "-1")
    assert all(v.is_zero for v in dfield[1:])
    dfield = hamiltonian_field(e(c2, "x1"), c2)
    assert dfield[2] == e(c2, "1")
    assert sum(1 for v in dfield if not v.is_zero) == 1
    assert all(v.is_zero for v in hamiltonian_field(
        SuperExpr.zero(c2.table), c2))


def test_omega_of_hamiltonian_fields(c2):
    # the structure evaluated on two Hamiltonian fields returns -{f,g}
    from oddsym.symplectic import canonical_pairing

    rng = random.Random(6)
    for _ in range(20):
        f = random_expr(rng, c2.table, theta_degree=2, coeff_degree=1)
        g = random_expr(rng, c2.table, theta_degree=2, coeff_degree=1)
        for fh in (f.even_part(), f.odd_part()):
            for gh in (g.even_part(), g.odd_part()):
                df = hamiltonian_field(fh, c2)
                dg = hamiltonian_field(gh, c2)
                field_odd = gh.is_even() and bool(gh)
                paired = canonical_pairing(df, dg, c2, field_odd)
                assert paired == -bracket(fh, gh, c2)


def test_jacobi_canonical(c3):
    assert jacobi_residual(e(c3, "x1"), e(c3, "th1"), e(c3, "x1*th1"),
                           c3).is_zero
    rng = random.Random(7)
    for _ in range(40):
        f = random_expr(rng, c3.table, theta_degree=2, coeff_degree=2,
                        aux=True).even_part()
        g = random_expr(rng, c3.table, theta_degree=2, coeff_degree=2,
                        aux=True).odd_part()
        h = random_expr(rng, c3.table, theta_degree=2, coeff_degree=2)
        for hh in (h.even_part(), h.odd_part()):
            assert jacobi_residual(f, g, hh, c3).is_zero


def test_jacobi_detects_bad_structure(c2):
    omega = OddSymplecticStructure.canonical(c2)
    rows = [list(r) for r in omega.matrix]
    bad = e(c2, "b1*x1")
    rows[0][1] = bad
    rows[1][0] = bad
    broken = OddSymplecticStructure(c2, rows)
    # hand expansion: only the {th1, {x1, x2}} leg survives and equals -b1
    res = jacobi_residual(e(c2, "x1"), e(c2, "x2"), e(c2, "th1"),
                          c2, broken)
    assert res == e(c2, "-b1")


def test_berezinian_diagonal(c2):
    table = c2.table
    zero = SuperExpr.zero(table)
    a = e(c2, "x1")
    d = e(c2, "x2")
    one = SuperExpr.one(table)
    m = [[a, zero, zero, zero], [zero, one, zero, zero],
         [zero, zero, d, zero], [zero, zero, zero, one]]
    from oddsym.symplectic import berezinian
    assert berezinian(m, 2) == e(c2, "x1/x2")
    ident = [[one if i == j else zero for j in range(4)] for i in range(4)]
    assert berezinian(ident, 2) == one


def test_point_map_berezinian_squares():
    chart = make_chart(1)
    table = chart.table
    body = [Scalar.symbol(table, "x1") ** 2]
    inverse = None
    # x -> x^2 has no global rational inverse; build the map by hand
    jac_inv = [[1 / (2 * Scalar.symbol(table, "x1"))]]
    targets = [e(chart, "x1^2"), e(chart, "th1/(2*x1)")]
    fmap = SuperMap(chart, chart, targets, check=False)
    assert map_berezinian(fmap) == e(chart, "4*x1^2")
    assert ber_sqrt(fmap) == e(chart, "2*x1")


def test_ber_sqrt_positive_branch():
    chart = make_chart(1)
    fmap = SuperMap(chart, chart, [e(chart, "2*x1"), e(chart, "th1/2")],
                    check=False)
    assert ber_sqrt(fmap) == e(chart, "2")
    ident = SuperMap.identity(chart)
    assert ber_sqrt(ident) == SuperExpr.one(chart.table)


def test_construct_special(c2):
    # gradient of b1*x1 shifts th1 only
    psis = [e(c2, "b1"), SuperExpr.zero(c2.table)]
    fmap = construct_map("special", c2, psis)
    assert fmap.targets[2] == e(c2, "th1 + b1")
    assert fmap.targets[3] == e(c2, "th2")
    ok, _ = is_canonical(fmap)
    assert ok


def test_construct_special_rejects_nonclosed(c2):
    psis = [e(c2, "b1*x2"), SuperExpr.zero(c2.table)]
    with pytest.raises(CanonicityError):
        construct_map("special", c2, psis)


def test_construct_point_scaling():
    chart = make_chart(1)
    table = chart.table
    fmap = construct_map("point", chart,
                         ([2 * Scalar.symbol(table, "x1")],
                          [Scalar.symbol(table, "x1") / 2]))
    assert fmap.targets[1] == e(chart, "th1/2")
    ok, _ = is_canonical(fmap)
    assert ok


def test_construct_point_shear(c2):
    table = c2.table
    x1, x2 = Scalar.symbol(table, "x1"), Scalar.symbol(table, "x2")
    fmap = construct_map("point", c2, ([x1 + x2, x2], [x1 - x2, x2]))
    assert fmap.targets[2] == e(c2, "th1")
    assert fmap.targets[3] == e(c2, "th2 - th1")
    ok, _ = is_canonical(fmap)
    assert ok


def test_is_canonical_detects_scaling():
    chart = make_chart(1)
    fmap = SuperMap(chart, chart, [e(chart, "2*x1"), e(chart, "th1")],
                    check=False)
    ok, report = is_canonical(fmap)
    assert not ok
    assert report.nonzero()[("x1", "th1")] == e(chart, "1")


def test_invert_special(c2):
    fmap = construct_map("special", c2, [e(c2, "b1"), e(c2, "b2")])
    inv = invert_map(fmap)
    assert inv.targets[2] == e(c2, "th1 - b1")


def test_invert_identity(c2):
    ident = SuperMap.identity(c2)
    assert invert_map(ident).targets == ident.targets


def test_invert_generic_nilpotent(c2):
    targets = [e(c2, "x1 + th1*th2"), e(c2, "x2"),
               e(c2, "th1"), e(c2, "th2 + b1*th1*th2")]
    fmap = SuperMap(c2, c2, targets, check=False)
    inv = invert_map(fmap)
    coords = [SuperExpr.symbol(c2.table, n) for n in c2.coordinate_names]
    assert list(fmap.compose(inv).targets) == coords
    assert list(inv.compose(fmap).targets) == coords


def test_invert_messy_maps(c2):
    rng = random.Random(11)
    for _ in range(8):
        fmap = random_messy_map(rng, c2)
        inv = invert_map(fmap)
        coords = [SuperExpr.symbol(c2.table, n) for n in c2.coordinate_names]
        assert list(fmap.compose(inv).targets) == coords


def test_decompose_roundtrip(c2):
    rng = random.Random(13)
    for _ in range(6):
        f_s = random_special_map(rng, c2)
        f_p = random_point_map(rng, c2)
        from oddsym.flows import exp_flow
        from oddsym.sampling import random_flow_hamiltonian
        f_adj = exp_flow(random_flow_hamiltonian(rng, c2), c2, 1)
        fmap = f_s.compose(f_p.compose(f_adj))
        gs, gp, gadj = decompose_canonical_map(fmap)
        assert gs.compose(gp.compose(gadj)).targets == fmap.targets
        assert list(gs.targets) == list(f_s.targets)
        assert list(gp.targets) == list(f_p.targets)
        assert list(gadj.targets) == list(f_adj.targets)


def test_decompose_trivial_cases(c2):
    from oddsym.flows import exp_flow

    ident = SuperMap.identity(c2)
    f_adj = exp_flow(e(c2, "b1*x1*th1*th2"), c2, 1)
    f_adj = construct_map("adjusted", c2, list(f_adj.targets))
    ok, _ = is_canonical(f_adj)
    assert ok
    gs, gp, gadj = decompose_canonical_map(f_adj)
    assert gs.targets == ident.targets and gp.targets == ident.targets
    assert gadj.targets == f_adj.targets
    f_p = random_point_map(random.Random(17), c2)
    gs, gp, gadj = decompose_canonical_map(f_p)
    assert gs.targets == ident.targets and gadj.targets == ident.targets
    assert list(gp.targets) == list(f_p.targets)


def test_pullback_identity(c2):
    s = Semidensity(e(c2, "1 + x1*th1*th2"), c2)
    assert pullback_semidensity(SuperMap.identity(c2), s) == s


def test_pullback_point_scaling():
    chart = make_chart(1)
    fmap = construct_map("point", chart,
                         ([2 * Scalar.symbol(chart.table, "x1")],
                          [Scalar.symbol(chart.table, "x1") / 2]))
    s = Semidensity(e(chart, "x1 + th1"), chart)
    pulled = pullback_semidensity(fmap, s)
    assert pulled.coefficient == e(chart, "2*(2*x1) + 2*(th1/2)")


def test_pullback_special_unit_factor(c2):
    fmap = construct_map("special", c2, [e(c2, "b1"), SuperExpr.zero(c2.table)])
    s = Semidensity(e(c2, "th1*th2"), c2)
    pulled = pullback_semidensity(fmap, s)
    assert pulled.coefficient == e(c2, "(th1 + b1)*th2")


def test_pullback_functorial(c2):
    rng = random.Random(19)
    for _ in range(6):
        f = random_canonical_map(rng, c2)
        g = random_canonical_map(rng, c2)
        s = Semidensity(random_expr(rng, c2.table, theta_degree=2,
                                    coeff_degree=1, aux=True), c2)
        combined = pullback_semidensity(f.compose(g), s)
        nested = pullback_semidensity(g, pullback_semidensity(f, s))
        assert combined == nested


def test_berezinian_multiplicative(c2):
    rng = random.Random(23)
    for _ in range(6):
        f = random_canonical_map(rng, c2)
        g = random_canonical_map(rng, c2)
        composed = f.compose(g)
        lhs = map_berezinian(composed)
        rhs = map_berezinian(f).substitute(g.bindings()) * map_berezinian(g)
        assert lhs == rhs


def test_ber_sqrt_squares_back(c2):
    rng = random.Random(29)
    for _ in range(6):
        f = random_canonical_map(rng, c2)
        root = ber_sqrt(f)
        ber = map_berezinian(f)
        assert root * root == ber
        # the numeric part of the Berezinian is positive at sample points
        body = ber.body()
        for point in ((2, 3), (1, 5), (7, 2)):
            val = body.subs_even({
                "x1": Scalar.from_fraction(c2.table, point[0]),
                "x2": Scalar.from_fraction(c2.table, point[1])})
            if not val.is_zero:
                assert val.as_fraction() > 0
                break
        else:
            raise AssertionError("no generic sample point found")


def test_ber_sqrt_cubic_flow_is_one():
    chart = make_chart(3)
    from oddsym.flows import exp_flow
    fmap = exp_flow(e(chart, "th1*th2*th3"), chart, 1)
    assert ber_sqrt(fmap) == SuperExpr.one(chart.table)


def test_canonical_samples_pass(c2):
    rng = random.Random(31)
    for _ in range(6):
        f = random_canonical_map(rng, c2)
        ok, report = is_canonical(f)
        assert ok, report.nonzero()


def test_pushforward_structure_oracle(c2):
    rng = random.Random(37)
    omega, fmap = pushforward_structure(rng, c2)
    # bracket computed through the pushed structure must agree with the
    # bracket computed upstairs and transported: check on coordinates
    inv = invert_map(fmap)
    for a in range(4):
        for b in range(4):
            upstairs = bracket(fmap.targets[a], fmap.targets[b], c2)
            assert omega.matrix[a][b] == upstairs.substitute(inv.bindings())


def test_invert_map_body_peel_path(c2):
    # non-identity body with no stored inverse: the point part is peeled
    # off through body_inverse and the unipotent remainder is iterated
    rng = random.Random(41)
    point = random_point_map(rng, c2)
    from oddsym.flows import exp_flow
    from oddsym.sampling import random_flow_hamiltonian
    flow = exp_flow(random_flow_hamiltonian(rng, c2), c2, 1)
    composite = flow.compose(point)
    stripped = SuperMap(c2, c2, composite.targets,
                        body_inverse=composite.body_inverse, check=False)
    assert stripped.inverse_targets is None
    inv = invert_map(stripped)
    coords = [SuperExpr.symbol(c2.table, n) for n in c2.coordinate_names]
    assert list(stripped.compose(inv).targets) == coords
    assert list(inv.compose(stripped).targets) == coords
