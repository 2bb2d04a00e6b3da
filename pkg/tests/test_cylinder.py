"""Glued models, the splitting solver, and certified cylinder isomorphisms."""

from fractions import Fraction

import pytest

from danielewski.cech import class_normal_form, divide_by_power, surface_class, zero_class
from danielewski.cylinder import (
    CYLINDER_RING,
    CylinderConstruction,
    Splitting,
    attach_surface_functions,
    counterexample_pair,
    cylinder_construction,
    cylinder_iso,
    cylinder_presentation,
    reexpress_on_cylinder,
    splitting_solve,
    torsor_to_glued,
    verify_global_functions,
    verify_splitting,
    with_coordinate,
)
from danielewski.errors import NoSplittingFound, NotComparable, UnsupportedError
from danielewski.fibration import MarkedPoint, MultifoldCurve, Variant, build_surface
from danielewski.ratpoly import MultiPoly, laurent_from_str, poly_from_str


def origins(r):
    branches = tuple((f"b{i}", 1) for i in range(r))
    return MultifoldCurve("x", (MarkedPoint(Fraction(0), branches),))


DOUBLE = origins(2)


def lp(text):
    return laurent_from_str(text, "x")


def single(curve, text):
    return class_normal_form({(0, (0, 1)): lp(text)}, curve)


def s_family(k):
    """x^(k+1) z = y^2 - 1."""
    return build_surface(k + 1, [(1, 1), (-1, 1)], Variant.PLAIN)


# -- glued models -----------------------------------------------------------


def test_torsor_to_glued_danielewski():
    model = torsor_to_glued(single(DOUBLE, "2*x^-1"))
    assert model.n_charts == 2
    assert model.chart_ring == ("x", "v")
    shifts = model.transition_shifts(0, 1)
    assert shifts == [{-1: Fraction(2)}]


def test_torsor_to_glued_trivial_class():
    model = torsor_to_glued(zero_class(DOUBLE))
    assert model.n_charts == 2
    assert model.transition_shifts(0, 1) == [None]


def test_torsor_to_glued_triple_origin():
    s = build_surface(2, [(1, 1), (-1, 1), (4, 1)], Variant.PLAIN)
    model = torsor_to_glued(surface_class(s))
    assert model.n_charts == 3
    assert model.branch_pairs() == [(0, 1), (0, 2), (1, 2)]
    # triple consistency is inherited from the class; transition data present
    assert model.transition_shifts(0, 2) == [{-2: Fraction(-3)}]


def test_attach_surface_functions_s0():
    s = s_family(0)
    model = attach_surface_functions(torsor_to_glued(surface_class(s)), s)
    funcs = dict(model.global_functions)
    ring = model.chart_ring
    assert funcs["y"][0] == poly_from_str("x*v + 1", ring)
    assert funcs["y"][1] == poly_from_str("x*v - 1", ring)
    assert funcs["z"][0] == poly_from_str("x*v^2 + 2*v", ring)
    assert funcs["z"][1] == poly_from_str("x*v^2 - 2*v", ring)
    assert verify_global_functions(model)


def test_attach_surface_functions_s1():
    s = s_family(1)
    model = attach_surface_functions(torsor_to_glued(surface_class(s)), s)
    funcs = dict(model.global_functions)
    ring = model.chart_ring
    assert funcs["y"][0] == poly_from_str("x^2*v + 1", ring)
    assert funcs["z"][0] == poly_from_str("x^2*v^2 + 2*v", ring)


def test_attach_rejects_mismatched_model():
    s0, s1 = s_family(0), s_family(1)
    model = torsor_to_glued(surface_class(s0))
    with pytest.raises(ValueError):
        attach_surface_functions(model, s1)


def test_fiber_product_transitions_consistent():
    s = s_family(0)
    c = surface_class(s)
    model = with_coordinate(torsor_to_glued(c, "v"), "w", divide_by_power(c, 1))
    assert model.chart_ring == ("x", "v", "w")
    assert model.transition_shifts(0, 1) == [{-1: Fraction(2)}, {-2: Fraction(2)}]


# -- splitting solver --------------------------------------------------------


def test_split_base_only_chart_fails():
    """A nonzero class cannot split with chart functions of x alone."""
    curve = DOUBLE
    model = torsor_to_glued(zero_class(curve), "v")
    # strip the fiber coordinate: model with zero coordinates simulates the
    # bare chart cover of the curve
    from danielewski.cylinder import GluedModel

    bare = GluedModel(curve, ())
    with pytest.raises(NoSplittingFound) as info:
        splitting_solve(bare, single(curve, "2*x^-1"))
    assert info.value.bounds == (2, 4, 6, 8)


def test_split_over_surface_charts_found_at_bound_four():
    s = s_family(0)
    c = surface_class(s)
    model = torsor_to_glued(c, "v")
    pullback = divide_by_power(c, 1)  # 2*x^-2
    splitting = splitting_solve(model, pullback)
    assert splitting.degree_bound == 4
    assert verify_splitting(model, pullback, splitting)


def test_split_reference_solution_verifies():
    """The hand solution h1 = 3/2 v^2 - 1/2 x v^3 with h0 its regular part
    after v -> v + 2/x splits 2 x^-2 over the charts of x z = y^2 - 1."""
    s = s_family(0)
    c = surface_class(s)
    model = torsor_to_glued(c, "v")
    ring = model.chart_ring
    h1 = poly_from_str("3/2*v^2 - 1/2*x*v^3", ring)
    h0 = poly_from_str("-3/2*v^2 - 1/2*x*v^3", ring)
    reference = Splitting(ring, (h0, h1), 4)
    assert verify_splitting(model, divide_by_power(c, 1), reference)


def test_split_zero_class_is_zero():
    s = s_family(0)
    model = torsor_to_glued(surface_class(s), "v")
    splitting = splitting_solve(model, zero_class(model.curve))
    assert all(h.is_zero() for h in splitting.per_chart)


def test_split_linear_cases():
    # a class with pole at most the transition pole splits linearly
    s = s_family(1)  # transitions 2*x^-2
    c = surface_class(s)
    model = torsor_to_glued(c, "w")
    shallow = single(c.curve, "2*x^-1")
    splitting = splitting_solve(model, shallow)
    assert splitting.degree_bound == 2
    assert verify_splitting(model, shallow, splitting)


def test_split_triple_origin():
    s = build_surface(1, [(0, 1), (1, 1), (3, 1)], Variant.PLAIN)
    c = surface_class(s)
    model = torsor_to_glued(c, "v")
    pullback = divide_by_power(c, 1)
    splitting = splitting_solve(model, pullback)
    assert verify_splitting(model, pullback, splitting)


# -- re-expression ------------------------------------------------------------


def test_reexpress_global_functions():
    """Chart expressions of y, z and the cylinder coordinate re-embed exactly."""
    s = s_family(0)
    chart_ring = ("x", "v", "t")
    x = MultiPoly.var(chart_ring, "x")
    v = MultiPoly.var(chart_ring, "v")
    t = MultiPoly.var(chart_ring, "t")
    y_ch = [1 + x * v, -1 + x * v]
    z_ch = [v * (2 + x * v), v * (x * v - 2)]
    w_ch = [t, t]
    assert reexpress_on_cylinder(y_ch, s) == poly_from_str("y", CYLINDER_RING)
    assert reexpress_on_cylinder(z_ch, s) == poly_from_str("z", CYLINDER_RING)
    assert reexpress_on_cylinder(w_ch, s) == poly_from_str("w", CYLINDER_RING)


def test_reexpress_detects_non_global_data():
    s = s_family(0)
    chart_ring = ("x", "v", "t")
    v = MultiPoly.var(chart_ring, "v")
    with pytest.raises(RuntimeError):
        reexpress_on_cylinder([v, v], s)  # v alone is not global


# -- cylinder isomorphisms -----------------------------------------------------


def test_cylinder_iso_danielewski_pair():
    cert = cylinder_iso(s_family(0), s_family(1))
    assert cert.flags == (True, True, True, True)
    # the classical contraction shape: x stays, w-image is affine in w
    assert cert.forward.images["x"] == poly_from_str("x", CYLINDER_RING)


def test_cylinder_iso_same_surface_is_identity():
    cert = cylinder_iso(s_family(0), s_family(0))
    for name in CYLINDER_RING:
        assert cert.forward.images[name] == poly_from_str(name, CYLINDER_RING)
        assert cert.backward.images[name] == poly_from_str(name, CYLINDER_RING)
    assert cert.is_valid()


def test_cylinder_iso_symmetry_both_directions():
    a, b = s_family(0), s_family(1)
    assert cylinder_iso(a, b).is_valid()
    assert cylinder_iso(b, a).is_valid()


def test_cylinder_iso_different_roots_same_branch_count():
    a = build_surface(1, [(0, 1), (1, 1)], Variant.PLAIN)
    b = build_surface(2, [(1, 1), (-1, 1)], Variant.PLAIN)
    assert cylinder_iso(a, b).is_valid()


def test_cylinder_iso_not_comparable():
    a = build_surface(1, [(0, 1), (1, 1)], Variant.PLAIN)
    b = build_surface(1, [(0, 1), (1, 1), (2, 1)], Variant.PLAIN)
    with pytest.raises(NotComparable):
        cylinder_iso(a, b)


def test_cylinder_iso_rejects_equivariant_track():
    a = build_surface(2, [(0, 2)], Variant.SHIFTED)
    b = build_surface(3, [(0, 2)], Variant.SHIFTED)
    with pytest.raises(UnsupportedError):
        cylinder_iso(a, b)


def test_construction_record_contents():
    con = cylinder_construction(s_family(0), s_family(1))
    assert isinstance(con, CylinderConstruction)
    assert con.aux_power == 1
    assert con.source_class.part(0, 0, 1) == lp("2*x^-1")
    assert con.target_class.part(0, 0, 1) == lp("2*x^-2")
    assert con.aux_class.part(0, 0, 1) == lp("2*x^-2")
    assert con.fiber_product.chart_ring == ("x", "v", "w")
    # every stored splitting satisfies its identity (re-verified independently)
    model_src = torsor_to_glued(con.source_class, "v")
    assert verify_splitting(model_src, con.aux_class, con.split_aux_over_source)


def test_rational_roots_pair():
    a = build_surface(1, [(Fraction(1, 2), 1), (Fraction(-3, 2), 1)], Variant.PLAIN)
    b = build_surface(2, [(Fraction(1, 2), 1), (Fraction(-3, 2), 1)], Variant.PLAIN)
    assert cylinder_iso(a, b).is_valid()


# -- counterexample pipeline ----------------------------------------------------


def test_counterexample_danielewski():
    s = build_surface(1, [(1, 1), (-1, 1)], Variant.PLAIN)
    pair = counterexample_pair(s)
    assert pair.partner.n == 2 and pair.partner.roots == s.roots
    assert pair.construction.certificate.is_valid()
    assert pair.invariants.source_profile == ((Fraction(0), (0, 1), 1),)
    assert pair.invariants.target_profile == ((Fraction(0), (0, 1), 2),)
    assert pair.invariants.orbit_equivalent is False
    assert "uniqueness" in pair.invariants.caveat


def test_counterexample_original_equation():
    s = build_surface(1, [(0, 1), (1, 1)], Variant.PLAIN)
    pair = counterexample_pair(s)
    assert pair.partner.equation_str() == "x^2 z = y (y - 1)"
    assert pair.construction.certificate.is_valid()


def test_counterexample_refuses_line_bundle():
    s = build_surface(1, [(0, 1)], Variant.PLAIN)
    with pytest.raises(ValueError, match="line bundle"):
        counterexample_pair(s)


def test_cylinder_presentation_embeds_surface():
    s = s_family(0)
    pres = cylinder_presentation(s)
    assert pres.ring == CYLINDER_RING
    assert pres.generators == (poly_from_str("x*z - y^2 + 1", CYLINDER_RING),)
