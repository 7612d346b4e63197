"""Odd Poisson brackets, canonical maps, Berezinians, semidensities.

The canonical bracket on a chart (x1..xn, th1..thn) is

    {f,g} = sum_i  df/dx^i dg/dth_i + (-1)^p(f) df/dth_i dg/dx^i

with left odd derivatives throughout.  A general structure is carried as
the full matrix of coordinate brackets and fed through the same sign
conventions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .scalars import Scalar, ScalarError
from .superexpr import ParityError, SuperExpr
from .symbols import Chart, Parity


class CanonicityError(ValueError):
    pass


# -- matrices of even SuperExprs ------------------------------------------------


def mat_mul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0])
    return [[_dot(a[i], [b[k][j] for k in range(inner)])
             for j in range(cols)] for i in range(rows)]


def _dot(row, col):
    out = row[0] * col[0]
    for x, y in zip(row[1:], col[1:]):
        out = out + x * y
    return out


def mat_det(a):
    """Determinant of a square matrix of commuting (even) entries."""
    size = len(a)
    if size == 0:
        raise ValueError("empty matrix")
    total = None
    for perm in itertools.permutations(range(size)):
        term = a[0][perm[0]]
        for i in range(1, size):
            term = term * a[i][perm[i]]
        if _perm_sign(perm) < 0:
            term = -term
        total = term if total is None else total + term
    return total


def _perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def mat_inv_even(a):
    """Inverse of a matrix of even SuperExprs with invertible-body det."""
    size = len(a)
    det = mat_det(a)
    det_inv = det.invert_even()
    if size == 1:
        return [[det_inv]]
    adj = [[None] * size for _ in range(size)]
    for i in range(size):
        for j in range(size):
            minor = [[a[r][c] for c in range(size) if c != j]
                     for r in range(size) if r != i]
            cof = mat_det(minor)
            if (i + j) % 2:
                cof = -cof
            adj[j][i] = cof * det_inv
    return adj


def scalar_mat_det(a):
    size = len(a)
    total = None
    for perm in itertools.permutations(range(size)):
        term = a[0][perm[0]]
        for i in range(1, size):
            term = term * a[i][perm[i]]
        if _perm_sign(perm) < 0:
            term = -term
        total = term if total is None else total + term
    return total


def scalar_mat_inv(a):
    size = len(a)
    det = scalar_mat_det(a)
    if det.is_zero:
        raise ScalarError("singular matrix")
    if size == 1:
        return [[1 / det]], det
    adj = [[None] * size for _ in range(size)]
    for i in range(size):
        for j in range(size):
            minor = [[a[r][c] for c in range(size) if c != j]
                     for r in range(size) if r != i]
            cof = scalar_mat_det(minor)
            if (i + j) % 2:
                cof = -cof
            adj[j][i] = cof / det
    return adj, det


# -- structures ------------------------------------------------------------------


class OddSymplecticStructure:
    """Bracket matrix Omega^{AB} = {z^A, z^B} over a chart.

    Entry parities, graded antisymmetry and invertibility of the body are
    enforced at construction.
    """

    def __init__(self, chart: Chart, matrix, check=True):
        self.chart = chart
        self.matrix = tuple(tuple(row) for row in matrix)
        size = 2 * chart.n
        if len(self.matrix) != size or any(len(r) != size for r in self.matrix):
            raise ValueError("bracket matrix must be 2n x 2n")
        self.is_canonical_matrix = self._matches_canonical()
        if check and not self.is_canonical_matrix:
            self._validate()

    @classmethod
    def canonical(cls, chart: Chart):
        n = chart.n
        table = chart.table
        zero = SuperExpr.zero(table)
        one = SuperExpr.one(table)
        m = [[zero] * (2 * n) for _ in range(2 * n)]
        for i in range(n):
            m[i][n + i] = one
            m[n + i][i] = -one
        return cls(chart, m, check=False)

    def _matches_canonical(self):
        n = self.chart.n
        table = self.chart.table
        one = SuperExpr.one(table)
        for a in range(2 * n):
            for b in range(2 * n):
                entry = self.matrix[a][b]
                if a < n and b == n + a:
                    if entry != one:
                        return False
                elif b < n and a == n + b:
                    if entry != -one:
                        return False
                elif entry:
                    return False
        return True

    def _validate(self):
        n = self.chart.n
        for a in range(2 * n):
            pa = 0 if a < n else 1
            for b in range(2 * n):
                pb = 0 if b < n else 1
                entry = self.matrix[a][b]
                want = Parity.ODD if (pa + pb + 1) % 2 else Parity.EVEN
                if entry and entry.parity() is not want:
                    raise ValueError(f"entry ({a},{b}) has wrong parity")
                # {zA,zB} = -(-1)^((pA+1)(pB+1)) {zB,zA}
                factor = -1 if ((pa + 1) * (pb + 1)) % 2 == 0 else 1
                if entry != factor * self.matrix[b][a]:
                    raise ValueError(
                        f"graded antisymmetry fails at ({a},{b})")
        body = [[self.matrix[a][b].body() for b in range(2 * n)]
                for a in range(2 * n)]
        if scalar_mat_det(body).is_zero:
            raise ValueError("structure body is degenerate")

    def entry(self, a, b):
        return self.matrix[a][b]


def _coordinate_exprs(chart):
    table = chart.table
    return [SuperExpr.symbol(table, name) for name in chart.coordinate_names]


def _canonical_bracket_homogeneous(f, g, chart, f_odd):
    table = chart.table
    total = SuperExpr.zero(table)
    for x, th in zip(chart.xs, chart.thetas):
        term = f.diff(x) * g.diff(th)
        second = f.diff(th) * g.diff(x)
        term = term - second if f_odd else term + second
        total = total + term
    return total


def _general_bracket_homogeneous(f, g, omega, f_odd):
    chart = omega.chart
    table = chart.table
    names = chart.coordinate_names
    n = chart.n
    total = SuperExpr.zero(table)
    for a, name_a in enumerate(names):
        da = f.diff(name_a)
        if da.is_zero:
            continue
        pa = 0 if a < n else 1
        # sign (-1)^(p(f)p(zA) + p(zA))
        negate = (((1 if f_odd else 0) * pa) + pa) % 2 == 1
        for b, name_b in enumerate(names):
            entry = omega.matrix[a][b]
            if not entry:
                continue
            db = g.diff(name_b)
            if db.is_zero:
                continue
            piece = da * entry * db
            total = total - piece if negate else total + piece
    return total


def bracket(f, g, chart, omega=None):
    """Odd Poisson bracket {f,g}; mixed-parity f is split term-wise."""
    if omega is not None and not omega.is_canonical_matrix:
        fn = lambda ff, odd: _general_bracket_homogeneous(ff, g, omega, odd)
    else:
        fn = lambda ff, odd: _canonical_bracket_homogeneous(ff, g, chart, odd)
    feven = f.even_part()
    fodd = f.odd_part()
    total = SuperExpr.zero(chart.table)
    if feven:
        total = total + fn(feven, False)
    if fodd:
        total = total + fn(fodd, True)
    return total


def hamiltonian_field(f, chart, omega=None):
    """Components {f, z^A} in coordinate order."""
    return [bracket(f, z, chart, omega) for z in _coordinate_exprs(chart)]


def canonical_pairing(xcomps, ycomps, chart, y_odd):
    """Evaluate the canonical two-form on two coordinate vector fields.

    The evaluation convention is pinned by the identity
    Omega(D_f, D_g) = -{f, g}: the A-summand carries (-1)^(p(Y) p(z^A)).
    The lower-index canonical matrix is Omega_{x th} = -1, Omega_{th x} = 1.
    """
    table = chart.table
    n = chart.n
    total = SuperExpr.zero(table)
    for i in range(n):
        even_piece = xcomps[i] * ycomps[n + i]
        odd_piece = xcomps[n + i] * ycomps[i]
        if y_odd:
            odd_piece = -odd_piece
        total = total - even_piece + odd_piece
    return total


def jacobi_residual(f, g, h, chart, omega=None):
    """Cyclic Jacobi combination; identically zero for closed structures."""
    def par(u):
        p = u.parity()
        if p is Parity.MIXED:
            raise ParityError("jacobi residual needs homogeneous arguments")
        return 1 if p is Parity.ODD else 0

    pf, pg, ph = par(f), par(g), par(h)
    terms = [
        (f, g, h, (pf + 1) * (ph + 1)),
        (g, h, f, (pg + 1) * (pf + 1)),
        (h, f, g, (ph + 1) * (pg + 1)),
    ]
    total = SuperExpr.zero(chart.table)
    for a, b, c, exp in terms:
        piece = bracket(a, bracket(b, c, chart, omega), chart, omega)
        total = total - piece if exp % 2 else total + piece
    return total


# -- supermaps --------------------------------------------------------------------


class SuperMap:
    """Coordinate transformation: target coordinates as source expressions.

    ``targets`` lists the images of the target chart's x's then thetas as
    functions of the source coordinates.  ``body_inverse`` optionally gives
    the inverse of the underlying even map as rational substitutions.
    """

    def __init__(self, source: Chart, target: Chart, targets,
                 body_inverse=None, kind="generic", params=None,
                 inverse_targets=None, check=True):
        self.source = source
        self.target = target
        self.targets = tuple(targets)
        self.body_inverse = tuple(body_inverse) if body_inverse else None
        self.kind = kind
        self.params = params or {}
        self.inverse_targets = tuple(inverse_targets) if inverse_targets \
            else None
        if check:
            self._validate()

    def _validate(self):
        n = self.target.n
        if len(self.targets) != 2 * n:
            raise ValueError("need one target expression per coordinate")
        for k, expr in enumerate(self.targets):
            want_odd = k >= n
            if expr.is_zero:
                continue
            if want_odd and not expr.is_odd():
                raise ParityError(f"target {k} must be odd")
            if not want_odd and not expr.is_even():
                raise ParityError(f"target {k} must be even")

    # -- basic structure ---------------------------------------------------

    @classmethod
    def identity(cls, chart: Chart):
        exprs = _coordinate_exprs(chart)
        return cls(chart, chart, exprs, kind="identity",
                   inverse_targets=exprs, check=False)

    def is_identity(self):
        return list(self.targets) == _coordinate_exprs(self.source)

    def bindings(self):
        return dict(zip(self.target.coordinate_names, self.targets))

    def apply(self, expr):
        """Pull a function on the target chart back to the source chart."""
        return expr.substitute(self.bindings())

    def compose(self, other: "SuperMap"):
        """self after other: z -> self(other(z))."""
        binds = other.bindings()
        targets = [t.substitute(binds) for t in self.targets]
        inverse = None
        if self.inverse_targets and other.inverse_targets:
            self_inv = dict(zip(self.source.coordinate_names,
                                self.inverse_targets))
            inverse = [t.substitute(self_inv) for t in other.inverse_targets]
        body_inv = None
        if self.body_inverse and other.body_inverse:
            images = {name: value for name, value in
                      zip(self.source.xs, self.body_inverse)}
            body_inv = [t.subs_even(images) for t in other.body_inverse]
        return SuperMap(other.source, self.target, targets,
                        body_inverse=body_inv, kind="generic",
                        inverse_targets=inverse, check=False)

    def body_map(self):
        """Scalar parts of the even targets."""
        return [t.body() for t in self.targets[:self.target.n]]

    def jacobian(self):
        """Left-derivative matrix, rows = targets, columns = source."""
        names = self.source.coordinate_names
        return [[t.diff(name) for name in names] for t in self.targets]

    def __eq__(self, other):
        if not isinstance(other, SuperMap):
            return NotImplemented
        return self.source == other.source and self.target == other.target \
            and list(self.targets) == list(other.targets)

    def __repr__(self):
        from .grammar import render_expr
        body = ", ".join(render_expr(t) for t in self.targets)
        return f"SuperMap[{self.kind}]({body})"


def berezinian(matrix, n):
    """Ber of a (n|n) block supermatrix of SuperExpr entries."""
    i00 = [row[:n] for row in matrix[:n]]
    i01 = [row[n:] for row in matrix[:n]]
    i10 = [row[:n] for row in matrix[n:]]
    i11 = [row[n:] for row in matrix[n:]]
    det11 = mat_det(i11)
    if det11.body().is_zero:
        raise ScalarError("odd-odd block has singular body")
    inv11 = mat_inv_even(i11)
    corr = mat_mul(mat_mul(i01, inv11), i10)
    top = [[i00[i][j] - corr[i][j] for j in range(n)] for i in range(n)]
    return mat_det(top) * det11.invert_even()


def map_berezinian(fmap: SuperMap):
    return berezinian(fmap.jacobian(), fmap.target.n)


def ber_sqrt(fmap: SuperMap):
    """Square root of the Berezinian of a canonical map.

    The body of the Berezinian must equal the square of the determinant of
    the underlying even Jacobian; the root keeps the positive-leading
    branch of that determinant.
    """
    ber = map_berezinian(fmap)
    body_jac = [[b.diff(x) for x in fmap.source.xs]
                for b in fmap.body_map()]
    detb = scalar_mat_det(body_jac)
    if ber.body() != detb * detb:
        raise CanonicityError(
            "Berezinian body is not the square of the even Jacobian "
            "determinant; the map cannot be canonical")
    return ber.sqrt_even(body_root=detb)


# -- canonical map constructors -----------------------------------------------


def special_map(chart: Chart, psis):
    """theta_i -> theta_i + Psi_i(x) with a closed odd-valued Psi."""
    table = chart.table
    psis = list(psis)
    if len(psis) != chart.n:
        raise ValueError("need one shift per theta")
    for psi in psis:
        if psi.is_zero:
            continue
        if not psi.is_odd():
            raise ParityError("shift components must be odd-valued")
        for key in psi.terms:
            if any(not table.is_aux_index(i) for i in key):
                raise ValueError("shift components must be functions of x "
                                 "with odd-constant coefficients")
    for i in range(chart.n):
        for j in range(i + 1, chart.n):
            closed = psis[j].diff(chart.xs[i]) - psis[i].diff(chart.xs[j])
            if not closed.is_zero:
                raise CanonicityError("shift one-form is not closed")
    targets = [SuperExpr.symbol(table, x) for x in chart.xs]
    targets += [SuperExpr.symbol(table, th) + psi
                for th, psi in zip(chart.thetas, psis)]
    inverse = [SuperExpr.symbol(table, x) for x in chart.xs]
    inverse += [SuperExpr.symbol(table, th) - psi
                for th, psi in zip(chart.thetas, psis)]
    identity_body = [Scalar.symbol(table, x) for x in chart.xs]
    return SuperMap(chart, chart, targets, body_inverse=identity_body,
                    kind="special", params={"psis": tuple(psis)},
                    inverse_targets=inverse, check=False)


def point_map(chart: Chart, body, body_inverse):
    """Lift of an invertible base map: theta transforms by the inverse
    transposed Jacobian so that the canonical bracket is preserved."""
    table = chart.table
    body = [b if isinstance(b, Scalar) else Scalar.from_fraction(table, b)
            for b in body]
    body_inverse = [b if isinstance(b, Scalar)
                    else Scalar.from_fraction(table, b) for b in body_inverse]
    if len(body) != chart.n or len(body_inverse) != chart.n:
        raise ValueError("need n body components and n inverse components")
    forward = {x: b for x, b in zip(chart.xs, body)}
    backward = {x: b for x, b in zip(chart.xs, body_inverse)}
    for x, g, f in zip(chart.xs, body_inverse, body):
        if g.subs_even(forward) != Scalar.symbol(table, x) or \
                f.subs_even(backward) != Scalar.symbol(table, x):
            raise CanonicityError("body inverse does not invert the body")
    jac = [[b.diff(x) for x in chart.xs] for b in body]
    inv_jac, _ = scalar_mat_inv(jac)
    targets = [SuperExpr.from_scalar(b) for b in body]
    for i in range(chart.n):
        acc = SuperExpr.zero(table)
        for m in range(chart.n):
            acc = acc + SuperExpr.from_scalar(inv_jac[m][i]) * \
                SuperExpr.symbol(table, chart.thetas[m])
        targets.append(acc)
    inv_jac_b = [[b.diff(x) for x in chart.xs] for b in body_inverse]
    inv_inv, _ = scalar_mat_inv(inv_jac_b)
    inverse_targets = [SuperExpr.from_scalar(b) for b in body_inverse]
    for i in range(chart.n):
        acc = SuperExpr.zero(table)
        for m in range(chart.n):
            acc = acc + SuperExpr.from_scalar(inv_inv[m][i]) * \
                SuperExpr.symbol(table, chart.thetas[m])
        inverse_targets.append(acc)
    return SuperMap(chart, chart, targets, body_inverse=tuple(body_inverse),
                    kind="point", params={"body": tuple(body),
                                          "inverse": tuple(body_inverse)},
                    inverse_targets=inverse_targets, check=False)


def adjusted_map(chart: Chart, targets):
    """Wrap target expressions after checking the adjusted shape."""
    table = chart.table
    targets = list(targets)
    n = chart.n
    for i in range(n):
        fixed = targets[i].homogeneous_part(0)
        if fixed != SuperExpr.symbol(table, chart.xs[i]):
            raise CanonicityError("x targets must reduce to x at theta=0")
        if not targets[n + i].homogeneous_part(0).is_zero:
            raise CanonicityError("theta targets must vanish at theta=0")
    return SuperMap(chart, chart, targets, kind="adjusted")


def construct_map(kind, chart, data):
    if kind == "special":
        return special_map(chart, data)
    if kind == "point":
        return point_map(chart, data[0], data[1])
    if kind == "adjusted":
        return adjusted_map(chart, data)
    raise ValueError(f"unknown map kind {kind!r}")


# -- canonicity -----------------------------------------------------------------


@dataclass
class ResidualReport:
    residuals: dict

    @property
    def ok(self):
        return all(v.is_zero for v in self.residuals.values())

    def nonzero(self):
        return {k: v for k, v in self.residuals.items() if not v.is_zero}


def is_canonical(fmap: SuperMap, omega=None, omega_target=None):
    """Check {F^A, F^B} = Omega_target^{AB} o F entry by entry."""
    source, target = fmap.source, fmap.target
    if omega_target is None:
        omega_target = OddSymplecticStructure.canonical(target)
    binds = fmap.bindings()
    n = target.n
    residuals = {}
    names = target.coordinate_names
    for a in range(2 * n):
        for b in range(a, 2 * n):
            lhs = bracket(fmap.targets[a], fmap.targets[b], source, omega)
            rhs = omega_target.matrix[a][b]
            if not rhs.is_zero:
                rhs = rhs.substitute(binds)
            residuals[(names[a], names[b])] = lhs - rhs
    report = ResidualReport(residuals)
    return report.ok, report


# -- inversion -------------------------------------------------------------------


def _odd_weight(table, key):
    return sum(2 if table.is_aux_index(i) else 1 for i in key)


def invert_map(fmap: SuperMap):
    """Inverse map, verified by substitution on both sides.

    Closed forms cover the tagged classes; otherwise the even body must be
    the identity (or carry rational inverse substitutions) and the graded
    fixed-point iteration finishes by nilpotency.
    """
    if fmap.inverse_targets is not None:
        out = SuperMap(fmap.target, fmap.source, fmap.inverse_targets,
                       kind=fmap.kind, check=False)
        _check_inverse(fmap, out)
        return out
    table = fmap.source.table
    coords = _coordinate_exprs(fmap.source)
    body = fmap.body_map()
    body_is_id = all(b == Scalar.symbol(table, x)
                     for b, x in zip(body, fmap.source.xs))
    if not body_is_id:
        if not fmap.body_inverse:
            raise CanonicityError("body inverse unavailable")
        pmap = point_map(fmap.source, body, list(fmap.body_inverse))
        p_inv = invert_map(pmap)
        unipotent = SuperMap(fmap.source, fmap.target,
                             [t.substitute(p_inv.bindings())
                              for t in fmap.targets], check=False)
        u_inv = invert_map(unipotent)
        composed = p_inv.compose(u_inv)
        out = SuperMap(fmap.target, fmap.source, composed.targets,
                       check=False)
        _check_inverse(fmap, out)
        return out
    corrections = [t - z for t, z in zip(fmap.targets, coords)]
    for k, corr in enumerate(corrections):
        for key in corr.terms:
            if _odd_weight(table, key) < 2:
                raise CanonicityError(
                    "graded inversion needs corrections of odd weight >= 2")
    guesses = list(coords)
    names = fmap.source.coordinate_names
    for _ in range(table.n_theta + len(table.frame_odds)
                   + 2 * len(table.aux_odds) + 2):
        binds = dict(zip(names, guesses))
        new = [z - corr.substitute(binds)
               for z, corr in zip(coords, corrections)]
        if new == guesses:
            break
        guesses = new
    else:
        raise CanonicityError("graded inversion did not stabilize")
    out = SuperMap(fmap.target, fmap.source, guesses, check=False)
    _check_inverse(fmap, out)
    return out


def _check_inverse(fmap, inverse):
    coords = _coordinate_exprs(fmap.source)
    if list(fmap.compose(inverse).targets) != coords or \
            list(inverse.compose(fmap).targets) != coords:
        raise CanonicityError("inverse check by substitution failed")


# -- the decomposition into special, point, adjusted ------------------------------


def decompose_canonical_map(fmap: SuperMap):
    """Split a canonical map as F = F_special o F_point o F_adjusted."""
    ok, report = is_canonical(fmap)
    if not ok:
        raise CanonicityError("map is not canonical")
    chart = fmap.source
    table = chart.table
    n = chart.n
    psis_raw = [fmap.targets[n + i].homogeneous_part(0) for i in range(n)]
    body = fmap.body_map()
    for i in range(n):
        drift = fmap.targets[i].homogeneous_part(0) - \
            SuperExpr.from_scalar(body[i])
        if not drift.is_zero:
            raise CanonicityError(
                "even targets carry nilpotent theta-free drift; "
                "not in the supported decomposition class")
    body_is_id = all(b == Scalar.symbol(table, x)
                     for b, x in zip(body, chart.xs))
    if body_is_id:
        f_point = SuperMap.identity(chart)
        inverse_body = {x: Scalar.symbol(table, x) for x in chart.xs}
    else:
        if not fmap.body_inverse:
            raise CanonicityError("body inverse unavailable")
        f_point = point_map(chart, body, list(fmap.body_inverse))
        inverse_body = dict(zip(chart.xs, fmap.body_inverse))
    psis = [psi.substitute(inverse_body) for psi in psis_raw]
    if all(psi.is_zero for psi in psis):
        f_special = SuperMap.identity(chart)
    else:
        f_special = special_map(chart, psis)
    middle = invert_map(f_special).compose(fmap)
    f_adj_targets = invert_map(f_point).compose(middle).targets
    f_adj = adjusted_map(chart, f_adj_targets)
    recomposed = f_special.compose(f_point.compose(f_adj))
    if list(recomposed.targets) != list(fmap.targets):
        raise CanonicityError("decomposition failed to recompose")
    return f_special, f_point, f_adj


# -- semidensities ------------------------------------------------------------------


@dataclass
class Semidensity:
    """Coefficient of sqrt(D(x,theta)) on a chart."""

    coefficient: SuperExpr
    chart: Chart

    def parity(self):
        return self.coefficient.parity()

    def __eq__(self, other):
        if not isinstance(other, Semidensity):
            return NotImplemented
        return self.chart == other.chart and \
            self.coefficient == other.coefficient

    def __repr__(self):
        from .grammar import render_expr
        return f"Semidensity({render_expr(self.coefficient)})"


def pullback_semidensity(fmap: SuperMap, s: Semidensity):
    """Coefficient -> (coefficient o F) * Ber^(1/2)(dF/dz)."""
    coeff = s.coefficient.substitute(fmap.bindings()) * ber_sqrt(fmap)
    return Semidensity(coeff, fmap.source)
