"""The constructive fiber-product trick for cylinders.

Given two plain-fiber surfaces with simple roots whose quotients are the same
line with r origins, the classes c and c' of the two torsors are both reached
by pole-clearing push maps from an auxiliary class c0 with deeper poles.  The
fiber product of either surface with the auxiliary torsor trivializes in two
ways (both total spaces are affine), and chaining the two trivializations on
each side produces an explicit polynomial isomorphism between the cylinders
over the two surfaces.  Every emitted isomorphism is returned as a checked
certificate: well-definedness and the two round trips are verified by exact
ideal membership, and every splitting is re-verified by direct expansion.

Chart conventions: over the line with r origins every glued object carries
one chart per branch with local ring Q[x, <fiber coordinates>]; the pair
(i, j) transition adds the class part g_ij to each fiber coordinate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Mapping, Optional, Sequence

from .cech import CechClass, divide_by_power, surface_class
from .errors import NoSplittingFound, NotComparable, UnsupportedError
from .fibration import DanielewskiSurface, MultifoldCurve, relatively_connected_quotient
from .ideals import (
    IdealPresentation,
    IsoCertificate,
    PolyMap,
    normal_form,
    unchecked_certificate,
    verify_iso_certificate,
)
from .linsolve import solve_linear
from .ratpoly import Exponent, MultiPoly, grevlex_key, ring_embed, substitute

DEFAULT_SCHEDULE = (2, 4, 6, 8)
CYLINDER_RING = ("x", "y", "z", "w")


# -- Laurent-in-x with polynomial fiber coordinates ----------------------

# keys are (x exponent, fiber exponent tuple); values are rationals
XLTerms = dict


def _xl_from_poly(p: MultiPoly) -> XLTerms:
    """Reinterpret a chart polynomial; the first ring variable is the base."""
    out: XLTerms = {}
    for exp, coeff in p.terms.items():
        out[(exp[0], exp[1:])] = coeff
    return out


def _xl_add_scaled(acc: XLTerms, other: XLTerms, scale: Fraction) -> None:
    for key, coeff in other.items():
        val = acc.get(key, Fraction(0)) + scale * coeff
        if val:
            acc[key] = val
        else:
            acc.pop(key, None)


def _laurent_pow(g: dict, n: int) -> dict:
    out = {0: Fraction(1)}
    for _ in range(n):
        nxt: dict = {}
        for e1, c1 in out.items():
            for e2, c2 in g.items():
                nxt[e1 + e2] = nxt.get(e1 + e2, Fraction(0)) + c1 * c2
        out = {e: c for e, c in nxt.items() if c}
    return out


def _xl_monomial_shifted(exp: Exponent, shifts: Sequence[Optional[dict]]) -> XLTerms:
    """Expand x^a * prod f_k^(b_k) after substituting f_k -> f_k + g_k(x).

    ``shifts[k]`` is the Laurent term dict of g_k (or None for no shift).
    """
    a, fibers = exp[0], exp[1:]
    out: XLTerms = {(a, tuple(0 for _ in fibers)): Fraction(1)}
    for k, b in enumerate(fibers):
        if b == 0:
            continue
        g = shifts[k]
        factor_terms: list[tuple[int, int, Fraction]] = []  # (fiber exp, x exp, coeff)
        if g is None:
            factor_terms.append((b, 0, Fraction(1)))
        else:
            for l in range(b + 1):
                binomial = Fraction(comb(b, l))
                for ge, gc in _laurent_pow(g, l).items():
                    factor_terms.append((b - l, ge, binomial * gc))
        nxt: XLTerms = {}
        for (xe, fib), coeff in out.items():
            for fexp, ge, fc in factor_terms:
                new_fib = list(fib)
                new_fib[k] = fexp
                key = (xe + ge, tuple(new_fib))
                val = nxt.get(key, Fraction(0)) + coeff * fc
                if val:
                    nxt[key] = val
                else:
                    nxt.pop(key, None)
        out = nxt
    return out


def _xl_substituted_poly(p: MultiPoly, shifts: Sequence[Optional[dict]]) -> XLTerms:
    out: XLTerms = {}
    for exp, coeff in p.terms.items():
        _xl_add_scaled(out, _xl_monomial_shifted(exp, shifts), coeff)
    return out


# -- glued models ---------------------------------------------------------


@dataclass(frozen=True)
class FiberCoordinate:
    """One fiber coordinate per chart, glued by the parts of a class."""

    name: str
    transitions: CechClass


@dataclass(frozen=True)
class GluedModel:
    """Chart-and-transition presentation of a torsor (or fiber product).

    Chart i has coordinate ring Q[base, c_1, ..., c_k]; crossing from chart i
    to chart j adds the pair part of each coordinate's class.  Optional named
    global functions carry one chart expression each, which must agree under
    the transitions (see ``verify_global_functions``).
    """

    curve: MultifoldCurve
    coordinates: tuple[FiberCoordinate, ...]
    global_functions: tuple[tuple[str, tuple[MultiPoly, ...]], ...] = ()

    @property
    def n_charts(self) -> int:
        if not self.curve.marked_points:
            return 1
        return len(self.curve.marked_points[0].branches)

    @property
    def chart_ring(self) -> tuple[str, ...]:
        return (self.curve.base_variable,) + tuple(c.name for c in self.coordinates)

    def transition_shifts(self, i: int, j: int) -> list[Optional[dict]]:
        """Laurent term dicts substituted into chart-j coordinates to express
        them in chart-i coordinates (f_j = f_i + g_ij)."""
        shifts: list[Optional[dict]] = []
        for coord in self.coordinates:
            g = coord.transitions.part(Fraction(0), i, j)
            shifts.append(dict(g.terms) if not g.is_zero() else None)
        return shifts

    def branch_pairs(self) -> list[tuple[int, int]]:
        return list(itertools.combinations(range(self.n_charts), 2))


def _require_cylinder_curve(curve: MultifoldCurve) -> None:
    if not curve.is_scheme():
        raise UnsupportedError("chart models need reduced branches (scheme case)")
    if len(curve.marked_points) > 1:
        raise UnsupportedError("chart models support a single marked point")
    if curve.marked_points and curve.marked_points[0].location != 0:
        raise UnsupportedError("chart models expect the marked point at 0")


def torsor_to_glued(c: CechClass, coordinate: str = "v") -> GluedModel:
    """One chart per branch with the fiber coordinate glued by the class."""
    _require_cylinder_curve(c.curve)
    return GluedModel(c.curve, (FiberCoordinate(coordinate, c),))


def with_coordinate(model: GluedModel, coordinate: str, c: CechClass) -> GluedModel:
    """Adjoin a fiber coordinate; used to form fiber products chart-wise."""
    if c.curve != model.curve:
        raise ValueError("classes live on different curves")
    return GluedModel(model.curve, model.coordinates + (FiberCoordinate(coordinate, c),))


def verify_global_functions(model: GluedModel) -> bool:
    """Exact transition agreement of every named global function."""
    for _, charts in model.global_functions:
        for i, j in model.branch_pairs():
            shifts = model.transition_shifts(i, j)
            lhs = _xl_substituted_poly(charts[j], shifts)
            rhs = _xl_from_poly(charts[i])
            if lhs != rhs:
                return False
    return True


def attach_surface_functions(model: GluedModel, surface: DanielewskiSurface) -> GluedModel:
    """Attach the embedding coordinates x, y, z as global functions.

    On chart i: y = y_i + x^n v and z = v * prod_{j != i}(y_i - y_j + x^n v);
    agreement under the transitions and vanishing of the defining equation
    are verified exactly on every chart.
    """
    if len(model.coordinates) != 1:
        raise ValueError("expected the one-coordinate torsor model of a surface")
    if model.coordinates[0].transitions != surface_class(surface):
        raise ValueError("model transitions do not match the surface class")
    ring = model.chart_ring
    x = MultiPoly.var(ring, ring[0])
    v = MultiPoly.var(ring, ring[1])
    values = surface.root_values()
    n = surface.n
    xs, ys, zs = [], [], []
    for i in range(model.n_charts):
        y_i = MultiPoly.const(ring, values[i]) + x ** n * v
        z_i = v
        for j, val in enumerate(values):
            if j != i:
                z_i = z_i * (MultiPoly.const(ring, values[i] - val) + x ** n * v)
        xs.append(x)
        ys.append(y_i)
        zs.append(z_i)
        # the defining equation vanishes identically on the chart
        f = surface.defining_polynomial
        image = substitute(f, {"x": x, "y": y_i, "z": z_i})
        if not image.is_zero():
            raise RuntimeError(f"chart {i} does not satisfy the defining equation")
    attached = GluedModel(
        model.curve,
        model.coordinates,
        (("x", tuple(xs)), ("y", tuple(ys)), ("z", tuple(zs))),
    )
    if not verify_global_functions(attached):
        raise RuntimeError("surface functions disagree under transitions")
    return attached


# -- the splitting solver --------------------------------------------------


@dataclass(frozen=True)
class Splitting:
    """Per-chart polynomials with h_j - h_i = g_ij across every overlap."""

    chart_ring: tuple[str, ...]
    per_chart: tuple[MultiPoly, ...]
    degree_bound: int


def _monomials_up_to(ring_size: int, bound: int) -> list[Exponent]:
    exps = [
        exp
        for exp in itertools.product(range(bound + 1), repeat=ring_size)
        if sum(exp) <= bound
    ]
    exps.sort(key=grevlex_key)
    return exps


def verify_splitting(model: GluedModel, pullback: CechClass, splitting: Splitting) -> bool:
    """Independent re-check of the defining identity by direct expansion."""
    for i, j in model.branch_pairs():
        shifts = model.transition_shifts(i, j)
        lhs = _xl_substituted_poly(splitting.per_chart[j], shifts)
        _xl_add_scaled(lhs, _xl_from_poly(splitting.per_chart[i]), Fraction(-1))
        g = pullback.part(Fraction(0), i, j)
        zero_fiber = tuple(0 for _ in model.coordinates)
        expected = {(e, zero_fiber): c for e, c in g.terms.items()}
        if lhs != expected:
            return False
    return True


def splitting_solve(
    model: GluedModel,
    pullback: CechClass,
    schedule: Sequence[int] = DEFAULT_SCHEDULE,
) -> Splitting:
    """Find per-chart polynomials splitting the pulled-back class.

    The ansatz runs over all chart monomials of total degree at most the
    current bound; the overlap identities are linear in the unknown
    coefficients and are solved exactly, raising the bound on failure.  The
    returned splitting is the canonical solution of the reduced system (free
    coefficients pinned to zero) and is re-verified by direct expansion.
    Failure at every bound raises NoSplittingFound; that does not certify
    that no splitting exists.
    """
    if pullback.curve != model.curve:
        raise ValueError("pullback class lives on a different curve")
    n_charts = model.n_charts
    ring = model.chart_ring
    if n_charts == 1:
        if not pullback.is_zero():
            raise ValueError("nonzero class on a single-chart model cannot split")
        return Splitting(ring, (MultiPoly.zero(ring),), 0)
    zero_fiber = tuple(0 for _ in model.coordinates)
    for bound in schedule:
        monomials = _monomials_up_to(len(ring), bound)
        unknowns = [(chart, exp) for chart in range(n_charts) for exp in monomials]
        rows: dict[tuple, tuple[dict, Fraction]] = {}

        def row_for(pair, key):
            tag = (pair, key)
            if tag not in rows:
                rows[tag] = ({}, Fraction(0))
            return tag

        for pair in model.branch_pairs():
            i, j = pair
            shifts = model.transition_shifts(i, j)
            for exp in monomials:
                expansion = _xl_monomial_shifted(exp, shifts)
                for key, coeff in expansion.items():
                    tag = row_for(pair, key)
                    coeffs, rhs = rows[tag]
                    coeffs[(j, exp)] = coeffs.get((j, exp), Fraction(0)) + coeff
                key = (exp[0], exp[1:])
                tag = row_for(pair, key)
                coeffs, rhs = rows[tag]
                coeffs[(i, exp)] = coeffs.get((i, exp), Fraction(0)) - 1
            g = pullback.part(Fraction(0), i, j)
            for e, coeff in g.terms.items():
                tag = row_for(pair, (e, zero_fiber))
                coeffs, _ = rows[tag]
                rows[tag] = (coeffs, coeff)
        system = [rows[tag] for tag in sorted(rows)]
        solution = solve_linear(system, unknowns)
        if solution is None:
            continue
        per_chart = []
        for chart in range(n_charts):
            terms = {
                exp: solution[(chart, exp)]
                for exp in monomials
                if solution[(chart, exp)]
            }
            per_chart.append(MultiPoly(ring, terms))
        splitting = Splitting(ring, tuple(per_chart), bound)
        if not verify_splitting(model, pullback, splitting):
            raise RuntimeError("solver produced a splitting that fails re-verification")
        return splitting
    raise NoSplittingFound(schedule)


# -- re-expression in embedded coordinates ---------------------------------


def _divide_by_y_poly(terms: Mapping, p_dense: list[Fraction], y_idx: int, ring_size: int):
    """Divide a polynomial (as a term dict) by a monic polynomial in y.

    ``p_dense`` lists the coefficients of P ascending in y; returns (quotient
    terms, remainder terms) with y-degree of the remainder below deg P.
    """
    r_deg = len(p_dense) - 1
    work = dict(terms)
    quotient: dict = {}
    while True:
        candidates = [exp for exp in work if exp[y_idx] >= r_deg]
        if not candidates:
            break
        exp = max(candidates, key=grevlex_key)
        coeff = work[exp]
        q_exp = list(exp)
        q_exp[y_idx] -= r_deg
        q_exp = tuple(q_exp)
        quotient[q_exp] = quotient.get(q_exp, Fraction(0)) + coeff
        for k, pc in enumerate(p_dense):
            if not pc:
                continue
            t_exp = list(q_exp)
            t_exp[y_idx] += k
            t_exp = tuple(t_exp)
            val = work.get(t_exp, Fraction(0)) - coeff * pc
            if val:
                work[t_exp] = val
            else:
                work.pop(t_exp, None)
    return quotient, work


def _surface_p_dense(surface: DanielewskiSurface) -> list[Fraction]:
    """Coefficients of P(y) = prod (y - y_i), ascending."""
    coeffs = [Fraction(1)]
    for root in surface.root_values():
        nxt = [Fraction(0)] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            nxt[k + 1] += c
            nxt[k] -= root * c
        coeffs = nxt
    return coeffs


def _divide_once_by_x(terms, surface, ring):
    """Given H with [H] in x*A for A the cylinder algebra of the surface,
    return H' with H = x*H' modulo the defining equation.

    Writes H = x*Q + R(y, z, w); regularity forces P(y) | R, and P = x^n z
    modulo the equation turns the quotient into x^(n-1) z * D.
    """
    x_idx, y_idx, z_idx = 0, 1, 2
    q_terms: dict = {}
    r_terms: dict = {}
    for exp, coeff in terms.items():
        if exp[x_idx] == 0:
            r_terms[exp] = coeff
        else:
            lowered = list(exp)
            lowered[x_idx] -= 1
            q_terms[tuple(lowered)] = coeff
    p_dense = _surface_p_dense(surface)
    d_terms, rem = _divide_by_y_poly(r_terms, p_dense, y_idx, len(ring))
    if rem:
        raise RuntimeError("chart expression is not regular on the surface")
    for exp, coeff in d_terms.items():
        lifted = list(exp)
        lifted[x_idx] += surface.n - 1
        lifted[z_idx] += 1
        key = tuple(lifted)
        q_terms[key] = q_terms.get(key, Fraction(0)) + coeff
    return {k: v for k, v in q_terms.items() if v}


def cylinder_presentation(surface: DanielewskiSurface) -> IdealPresentation:
    """The cylinder over a surface, embedded in A^4 with coordinate w."""
    f = ring_embed(surface.defining_polynomial, CYLINDER_RING)
    return IdealPresentation(CYLINDER_RING, [f])


def _chart_assignment(surface, chart: int, chart_ring) -> dict:
    """Embedding coordinates of the cylinder restricted to one chart."""
    x = MultiPoly.var(chart_ring, chart_ring[0])
    v = MultiPoly.var(chart_ring, chart_ring[1])
    t = MultiPoly.var(chart_ring, chart_ring[2])
    values = surface.root_values()
    y_i = MultiPoly.const(chart_ring, values[chart]) + x ** surface.n * v
    z_i = v
    for j, val in enumerate(values):
        if j != chart:
            z_i = z_i * (MultiPoly.const(chart_ring, values[chart] - val) + x ** surface.n * v)
    return {"x": x, "y": y_i, "z": z_i, "w": t}


def reexpress_on_cylinder(
    chart_exprs: Sequence[MultiPoly], surface: DanielewskiSurface
) -> MultiPoly:
    """Convert per-chart expressions of a global function into embedded form.

    Chart 0 writes the function as a polynomial in (x, v, t) with
    v = (y - y_0)/x^n; clearing the denominator and dividing back by x modulo
    the defining equation yields a polynomial in (x, y, z, w), reduced to its
    normal form.  Agreement with every chart expression is then verified
    exactly (the charts are honest polynomial rings).
    """
    chart_ring = chart_exprs[0].ring
    base = chart_exprs[0]
    n = surface.n
    y0 = surface.root_values()[0]
    v_degree = max(0, base.degree_in(chart_ring[1]))
    clear_power = n * v_degree
    # substitute v -> (y - y0), padding with x^(clear_power - n*b) per term
    terms: dict = {}
    for exp, coeff in base.terms.items():
        a, b, c = exp
        pad = clear_power - n * b
        for k in range(b + 1):
            binom = Fraction(comb(b, k)) * (-y0) ** (b - k)
            key = (a + pad, k, 0, c)
            val = terms.get(key, Fraction(0)) + coeff * binom
            if val:
                terms[key] = val
            else:
                terms.pop(key, None)
    for _ in range(clear_power):
        terms = _divide_once_by_x(terms, surface, CYLINDER_RING)
    candidate = MultiPoly(CYLINDER_RING, terms)
    presentation = cylinder_presentation(surface)
    candidate = normal_form(candidate, [presentation.generators[0]])
    for chart, expr in enumerate(chart_exprs):
        assignment = _chart_assignment(surface, chart, chart_ring)
        if substitute(candidate, assignment) != expr:
            raise RuntimeError(f"re-expressed function disagrees on chart {chart}")
    return candidate


# -- the cylinder isomorphism ----------------------------------------------


@dataclass(frozen=True)
class CylinderConstruction:
    """Full record of one run of the fiber-product trick."""

    source: DanielewskiSurface
    target: DanielewskiSurface
    source_class: CechClass
    target_class: CechClass
    aux_class: CechClass
    aux_power: int
    split_aux_over_source: Splitting
    split_source_over_aux: Splitting
    split_aux_over_target: Splitting
    split_target_over_aux: Splitting
    fiber_product: GluedModel
    certificate: IsoCertificate


def _require_comparable(source: DanielewskiSurface, target: DanielewskiSurface) -> None:
    for s in (source, target):
        try:
            surface_class(s)
        except UnsupportedError as exc:
            raise UnsupportedError(f"cylinder construction needs torsor classes: {exc}")
    q1 = relatively_connected_quotient(source)
    q2 = relatively_connected_quotient(target)
    if len(q1.marked_points) != len(q2.marked_points):
        raise NotComparable("quotient curves have different marked points")
    if q1.marked_points:
        b1 = len(q1.marked_points[0].branches)
        b2 = len(q2.marked_points[0].branches)
        if q1.marked_points[0].location != q2.marked_points[0].location or b1 != b2:
            raise NotComparable("quotient curves have different branch data")


def _transport(c: CechClass, curve: MultifoldCurve) -> CechClass:
    """Carry a class to a combinatorially equal curve (branch ids may differ)."""
    if c.curve == curve:
        return c
    if len(c.curve.marked_points) != len(curve.marked_points):
        raise NotComparable("cannot transport between different curve shapes")
    for p1, p2 in zip(c.curve.marked_points, curve.marked_points):
        if p1.location != p2.location or len(p1.branches) != len(p2.branches):
            raise NotComparable("cannot transport between different curve shapes")
    return CechClass(curve, dict(c.parts))


def _chart_composites(
    splittings: tuple[Splitting, Splitting, Splitting, Splitting],
    n_charts: int,
    chart_ring: tuple[str, ...],
):
    """Per-chart forward data: the two coordinates of the composite map.

    With p = aux split over the first surface, q = first-class split over the
    auxiliary torsor, q2 = second-class split over the auxiliary torsor and
    p2 = aux split over the second surface, chart i sends (x, v, t) to
    (x, u, s) where w = t + p_i(x, v), u = v - q_i(x, w) + q2_i(x, w) and
    s = w - p2_i(x, u).
    """
    p, q, p2, q2 = splittings
    x = MultiPoly.var(chart_ring, chart_ring[0])
    v = MultiPoly.var(chart_ring, chart_ring[1])
    t = MultiPoly.var(chart_ring, chart_ring[2])
    us, ss = [], []
    for i in range(n_charts):
        p_i = substitute(p.per_chart[i], {p.chart_ring[0]: x, p.chart_ring[1]: v})
        w_expr = t + p_i
        sub_w = {q.chart_ring[0]: x, q.chart_ring[1]: w_expr}
        q_i = substitute(q.per_chart[i], sub_w)
        q2_i = substitute(q2.per_chart[i], {q2.chart_ring[0]: x, q2.chart_ring[1]: w_expr})
        u_expr = v - q_i + q2_i
        p2_i = substitute(p2.per_chart[i], {p2.chart_ring[0]: x, p2.chart_ring[1]: u_expr})
        s_expr = w_expr - p2_i
        us.append(u_expr)
        ss.append(s_expr)
    return us, ss


def _images_from_composites(us, ss, target: DanielewskiSurface, chart_ring):
    """Embedded images of (x, y, z, w) of the target cylinder, per chart."""
    x = MultiPoly.var(chart_ring, chart_ring[0])
    values = target.root_values()
    n = target.n
    y_charts, z_charts, w_charts = [], [], []
    for i, (u_expr, s_expr) in enumerate(zip(us, ss)):
        y_i = MultiPoly.const(chart_ring, values[i]) + x ** n * u_expr
        z_i = u_expr
        for j, val in enumerate(values):
            if j != i:
                z_i = z_i * (MultiPoly.const(chart_ring, values[i] - val) + x ** n * u_expr)
        y_charts.append(y_i)
        z_charts.append(z_i)
        w_charts.append(s_expr)
    return y_charts, z_charts, w_charts


def cylinder_construction(
    source: DanielewskiSurface,
    target: DanielewskiSurface,
    schedule: Sequence[int] = DEFAULT_SCHEDULE,
) -> CylinderConstruction:
    """Build and certify an isomorphism of cylinders over the two surfaces."""
    _require_comparable(source, target)
    c_src = surface_class(source)
    c_tgt = surface_class(target)
    model_src = torsor_to_glued(c_src, "v")
    model_tgt = torsor_to_glued(c_tgt, "u")
    # The auxiliary torsor deepens the class of the SHALLOWER surface: its
    # pole then sits between the two class poles (or just above both), which
    # keeps all four splittings inside the degree schedule in either
    # direction of the pair.  Any nonzero-part class works for the trick
    # since its total space is affine.
    shallow_class = c_src if source.n <= target.n else _transport(c_tgt, c_src.curve)
    failure: Optional[NoSplittingFound] = None
    for aux_power in (1, 2, 3):
        c_aux = divide_by_power(shallow_class, aux_power)
        model_aux = torsor_to_glued(c_aux, "w")
        try:
            split_p = splitting_solve(model_src, c_aux, schedule)
            split_q = splitting_solve(model_aux, c_src, schedule)
            split_p2 = splitting_solve(model_tgt, _transport(c_aux, c_tgt.curve), schedule)
            split_q2 = splitting_solve(model_aux, _transport(c_tgt, c_src.curve), schedule)
        except NoSplittingFound as exc:
            failure = exc
            continue
        break
    else:
        raise failure
    n_charts = model_src.n_charts

    src_chart_ring = ("x", "v", "t")
    us, ss = _chart_composites((split_p, split_q, split_p2, split_q2), n_charts, src_chart_ring)
    y_ch, z_ch, w_ch = _images_from_composites(us, ss, target, src_chart_ring)
    forward_images = {
        "x": ring_embed(MultiPoly.var(("x",), "x"), CYLINDER_RING),
        "y": reexpress_on_cylinder(y_ch, source),
        "z": reexpress_on_cylinder(z_ch, source),
        "w": reexpress_on_cylinder(w_ch, source),
    }

    # Backward: on chart i of the target cylinder, w = s + p2_i(x, u),
    # v = u - q2_i(x, w) + q_i(x, w), t = w - p_i(x, v).
    tgt_chart_ring = ("x", "u", "s")
    x = MultiPoly.var(tgt_chart_ring, "x")
    u = MultiPoly.var(tgt_chart_ring, "u")
    s_var = MultiPoly.var(tgt_chart_ring, "s")
    vs_back, ts_back = [], []
    for i in range(n_charts):
        p2_i = substitute(split_p2.per_chart[i], {split_p2.chart_ring[0]: x, split_p2.chart_ring[1]: u})
        w_expr = s_var + p2_i
        q2_i = substitute(split_q2.per_chart[i], {split_q2.chart_ring[0]: x, split_q2.chart_ring[1]: w_expr})
        q_i = substitute(split_q.per_chart[i], {split_q.chart_ring[0]: x, split_q.chart_ring[1]: w_expr})
        v_expr = u - q2_i + q_i
        p_i = substitute(split_p.per_chart[i], {split_p.chart_ring[0]: x, split_p.chart_ring[1]: v_expr})
        vs_back.append(v_expr)
        ts_back.append(w_expr - p_i)
    yb_ch, zb_ch, wb_ch = _images_from_composites(vs_back, ts_back, source, tgt_chart_ring)
    backward_images = {
        "x": ring_embed(MultiPoly.var(("x",), "x"), CYLINDER_RING),
        "y": reexpress_on_cylinder(yb_ch, target),
        "z": reexpress_on_cylinder(zb_ch, target),
        "w": reexpress_on_cylinder(wb_ch, target),
    }

    src_pres = cylinder_presentation(source)
    tgt_pres = cylinder_presentation(target)
    forward = PolyMap(src_pres, tgt_pres, forward_images)
    backward = PolyMap(tgt_pres, src_pres, backward_images)
    certificate = verify_iso_certificate(unchecked_certificate(forward, backward))
    if not certificate.is_valid():
        raise RuntimeError("cylinder isomorphism failed certificate verification")

    fiber_product = with_coordinate(model_src, "w", c_aux)
    return CylinderConstruction(
        source=source,
        target=target,
        source_class=c_src,
        target_class=c_tgt,
        aux_class=c_aux,
        aux_power=aux_power,
        split_aux_over_source=split_p,
        split_source_over_aux=split_q,
        split_aux_over_target=split_p2,
        split_target_over_aux=split_q2,
        fiber_product=fiber_product,
        certificate=certificate,
    )


def cylinder_iso(
    source: DanielewskiSurface,
    target: DanielewskiSurface,
    schedule: Sequence[int] = DEFAULT_SCHEDULE,
) -> IsoCertificate:
    """Certified isomorphism between the cylinders over two surfaces."""
    return cylinder_construction(source, target, schedule).certificate


# -- counterexample emission -------------------------------------------------


@dataclass(frozen=True)
class InvariantReport:
    """Torsor invariants separating the two surfaces, plus the caveat that
    non-isomorphism of the abstract surfaces additionally relies on the
    uniqueness of the affine-type fibration (established elsewhere)."""

    source_profile: tuple
    target_profile: tuple
    orbit_equivalent: bool
    caveat: str


@dataclass(frozen=True)
class CounterexamplePair:
    source: DanielewskiSurface
    partner: DanielewskiSurface
    construction: CylinderConstruction
    invariants: InvariantReport


CAVEAT = (
    "the torsor classes are inequivalent; non-isomorphism of the surfaces "
    "holds modulo uniqueness of the affine-type fibration on each"
)


def counterexample_pair(
    surface: DanielewskiSurface, schedule: Sequence[int] = DEFAULT_SCHEDULE
) -> CounterexamplePair:
    """Emit a partner surface with isomorphic cylinder but inequivalent class.

    Deepening the defining exponent multiplies the torsor class by 1/x, which
    changes every pole order; the cylinders stay isomorphic by the fiber
    product trick.  Line-bundle input is refused: cancellation holds there.
    """
    from .cech import orbit_equivalent, pole_profile
    from .fibration import LineBundle, build_surface, classify_cancellation

    if isinstance(classify_cancellation(surface), LineBundle):
        raise ValueError(
            "the fibration is a line bundle over the base; cancellation holds "
            "and no counterexample partner exists"
        )
    partner = build_surface(surface.n + 1, surface.roots, surface.variant)
    construction = cylinder_construction(surface, partner, schedule)
    c_src = construction.source_class
    c_tgt = construction.target_class
    invariants = InvariantReport(
        source_profile=pole_profile(c_src),
        target_profile=pole_profile(c_tgt),
        orbit_equivalent=orbit_equivalent(c_src, c_tgt),
        caveat=CAVEAT,
    )
    return CounterexamplePair(surface, partner, construction, invariants)
