"""JSON interchange: analysis reports and replayable proof objects.

All rationals serialize as strings ``p/q`` and polynomials in their canonical
text form; documents are rendered with sorted keys so byte-identical output
for identical input is guaranteed.  Proof objects restrict presentations to a
single generator: division by one polynomial is canonical, so every recorded
claim can be replayed by plain polynomial arithmetic, with no basis
computation on the verifier's side.
"""

from __future__ import annotations

import json

from .cech import CechClass, equivariant_class, pic_group, surface_class
from .cylinder import CounterexamplePair, CylinderConstruction, Splitting
from .errors import UnsupportedError
from .fibration import (
    DanielewskiSurface,
    MarkedPoint,
    MultifoldCurve,
    Variant,
    classify_cancellation,
    degenerate_fibers,
    relatively_connected_quotient,
    LineBundle,
)
from .ideals import (
    Claim,
    IdealPresentation,
    IsoCertificate,
    PolyMap,
    normal_form,
    substitute_reduced,
)
from .ratpoly import (
    LaurentPoly,
    MultiPoly,
    as_fraction,
    fraction_str,
    poly_from_str,
    substitute,
)

REPORT_SCHEMA = "danielewski.report/1"
PROOF_SCHEMA = "danielewski.proof/1"
COCYCLE_SCHEMA = "danielewski.cocycle/1"


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# -- primitive encoders -------------------------------------------------


def laurent_to_json(g: LaurentPoly) -> list:
    return [[e, fraction_str(c)] for e, c in sorted(g.terms.items(), reverse=True)]


def laurent_from_json(data, variable: str, center) -> LaurentPoly:
    return LaurentPoly(variable, {int(e): as_fraction(c) for e, c in data}, center)


def curve_to_json(curve: MultifoldCurve) -> dict:
    return {
        "base_variable": curve.base_variable,
        "marked_points": [
            {
                "location": fraction_str(pt.location),
                "branches": [{"id": b, "multiplicity": m} for b, m in pt.branches],
            }
            for pt in curve.marked_points
        ],
    }


def curve_from_json(data) -> MultifoldCurve:
    points = tuple(
        MarkedPoint(
            as_fraction(pt["location"]),
            tuple((b["id"], int(b["multiplicity"])) for b in pt["branches"]),
        )
        for pt in data["marked_points"]
    )
    return MultifoldCurve(data["base_variable"], points)


def class_to_json(c: CechClass) -> dict:
    parts = [
        {
            "location": fraction_str(location),
            "pair": list(pair),
            "terms": laurent_to_json(g),
        }
        for (location, pair), g in c.sorted_items()
    ]
    return {"curve": curve_to_json(c.curve), "parts": parts, "display": class_display(c)}


def class_from_json(data) -> CechClass:
    curve = curve_from_json(data["curve"])
    parts = {}
    for entry in data["parts"]:
        location = as_fraction(entry["location"])
        pair = tuple(int(i) for i in entry["pair"])
        parts[(location, pair)] = laurent_from_json(
            entry["terms"], curve.base_variable, location
        )
    return CechClass(curve, parts)


def class_display(c: CechClass) -> str:
    if c.is_zero():
        return "0"
    chunks = []
    for (location, pair), g in c.sorted_items():
        chunks.append(f"g_{pair[0]}{pair[1]}@{fraction_str(location)} = {g}")
    if len(chunks) == 1:
        return str(next(iter(c.parts.values())))
    return "; ".join(chunks)


def presentation_to_json(p: IdealPresentation) -> dict:
    return {"ring": list(p.ring), "generators": [str(g) for g in p.generators]}


def presentation_from_json(data) -> IdealPresentation:
    ring = tuple(data["ring"])
    gens = [poly_from_str(text, ring) for text in data["generators"]]
    return IdealPresentation(ring, gens)


def map_to_json(m: PolyMap) -> dict:
    return {"images": {name: str(poly) for name, poly in sorted(m.images.items())}}


def claim_to_json(c: Claim) -> dict:
    doc = {
        "name": c.name,
        "ideal": c.ideal,
        "kind": c.kind,
        "subject": c.subject,
        "residual": str(c.residual),
        "ok": c.ok,
    }
    if c.polynomial is not None:
        doc["polynomial"] = str(c.polynomial)
    if c.cofactors is not None:
        doc["cofactors"] = [str(q) for q in c.cofactors]
    return doc


def certificate_to_json(cert: IsoCertificate) -> dict:
    return {
        "source": presentation_to_json(cert.forward.source),
        "target": presentation_to_json(cert.forward.target),
        "forward": map_to_json(cert.forward),
        "backward": map_to_json(cert.backward),
        "flags": {
            "forward_well_defined": cert.forward_well_defined,
            "backward_well_defined": cert.backward_well_defined,
            "backward_forward_identity": cert.backward_forward_identity,
            "forward_backward_identity": cert.forward_backward_identity,
        },
        "claims": [claim_to_json(c) for c in cert.evidence],
    }


def surface_to_json(s: DanielewskiSurface) -> dict:
    return {
        "equation": s.equation_str(),
        "n": s.n,
        "variant": s.variant.value,
        "roots": [[fraction_str(r), m] for r, m in s.roots],
        "smooth": s.smooth,
    }


def splitting_to_json(s: Splitting) -> dict:
    return {
        "chart_ring": list(s.chart_ring),
        "degree_bound": s.degree_bound,
        "per_chart": [str(h) for h in s.per_chart],
    }


# -- analysis report -----------------------------------------------------


def _cocycle_section(surface: DanielewskiSurface) -> dict:
    if surface.variant is Variant.PLAIN and surface.simple_roots:
        c = surface_class(surface)
        return {"track": "scheme", **class_to_json(c)}
    if len(surface.roots) == 1 and surface.roots[0][1] >= 2 and surface.n >= 2:
        m = surface.roots[0][1]
        eq = equivariant_class(surface.n, m)
        section = {
            "track": "equivariant",
            "m": eq.m,
            "weight": eq.weight,
            "pole_order": eq.pole_order(),
            "symbolic_only": eq.symbolic_only,
        }
        if eq.cover_class is not None:
            section["cover"] = class_to_json(eq.cover_class)
        else:
            section["symbolic_support"] = [
                {"pair": [i, j], "exponent": e, "coefficient": tag}
                for (i, j, e, tag) in eq.symbolic_support
            ]
        return section
    return {"track": "unavailable", "reason": "no computational track for this family member"}


def analysis_report(surface: DanielewskiSurface) -> dict:
    fibers = degenerate_fibers(surface)
    quotient = relatively_connected_quotient(surface)
    classification = classify_cancellation(surface)
    try:
        picard = pic_group(quotient)
        picard_doc = {
            "free_rank": picard.free_rank,
            "torsion": list(picard.torsion),
            "display": str(picard),
        }
    except UnsupportedError:
        picard_doc = None
    return {
        "schema": REPORT_SCHEMA,
        "surface": surface_to_json(surface),
        "fibers": [
            {
                "location": fraction_str(f.base_point),
                "components": [
                    {"label": label, "multiplicity": m} for label, m in f.components
                ],
                "reduced": f.reduced,
                "irreducible": f.irreducible,
                "degenerate": f.degenerate,
            }
            for f in fibers
        ],
        "generic_fiber": {"reduced": True, "irreducible": True},
        "quotient": {
            **curve_to_json(quotient),
            "is_scheme": quotient.is_scheme(),
            "equals_base": quotient.equals_base(),
        },
        "picard_group": picard_doc,
        "cocycle": _cocycle_section(surface),
        "classification": (
            "line_bundle" if isinstance(classification, LineBundle) else "counterexample_candidate"
        ),
    }


# -- proof objects ----------------------------------------------------------


def construction_to_json(con: CylinderConstruction) -> dict:
    return {
        "source_class": class_to_json(con.source_class),
        "target_class": class_to_json(con.target_class),
        "aux_class": class_to_json(con.aux_class),
        "aux_power": con.aux_power,
        "splittings": {
            "aux_over_source": splitting_to_json(con.split_aux_over_source),
            "source_over_aux": splitting_to_json(con.split_source_over_aux),
            "aux_over_target": splitting_to_json(con.split_aux_over_target),
            "target_over_aux": splitting_to_json(con.split_target_over_aux),
        },
        "fiber_product": {
            "chart_ring": list(con.fiber_product.chart_ring),
            "coordinates": [
                {"name": f.name, "class": class_to_json(f.transitions)}
                for f in con.fiber_product.coordinates
            ],
        },
    }


def cylinder_proof(con: CylinderConstruction, kind: str = "cylinder_iso") -> dict:
    return {
        "schema": PROOF_SCHEMA,
        "kind": kind,
        "source_surface": surface_to_json(con.source),
        "target_surface": surface_to_json(con.target),
        "construction": construction_to_json(con),
        "certificate": certificate_to_json(con.certificate),
    }


def counterexample_proof(pair: CounterexamplePair) -> dict:
    doc = cylinder_proof(pair.construction, kind="counterexample")
    doc["invariants"] = {
        "source_profile": [
            [fraction_str(loc), list(p), order] for loc, p, order in pair.invariants.source_profile
        ],
        "target_profile": [
            [fraction_str(loc), list(p), order] for loc, p, order in pair.invariants.target_profile
        ],
        "orbit_equivalent": pair.invariants.orbit_equivalent,
        "caveat": pair.invariants.caveat,
    }
    return doc


# -- replay verification ------------------------------------------------------


def verify_proof(doc: dict) -> tuple[bool, list[str]]:
    """Replay every exact identity recorded in a proof object.

    Needs only polynomial arithmetic and division by single stated
    generators; returns (ok, failure descriptions).  Any mismatch between
    recorded and recomputed data is reported, including tampered
    coefficients anywhere in the maps, claims, or splittings.
    """
    failures: list[str] = []
    if doc.get("schema") != PROOF_SCHEMA:
        return False, [f"unsupported schema {doc.get('schema')!r}"]
    cert = doc["certificate"]
    source = presentation_from_json(cert["source"])
    target = presentation_from_json(cert["target"])
    if len(source.generators) != 1 or len(target.generators) != 1:
        return False, ["replay requires single-generator presentations"]

    def parse_images(section, ring):
        return {name: poly_from_str(text, ring) for name, text in section["images"].items()}

    forward = parse_images(cert["forward"], source.ring)
    backward = parse_images(cert["backward"], target.ring)
    for name in target.ring:
        if name not in forward:
            failures.append(f"forward image missing for {name}")
    for name in source.ring:
        if name not in backward:
            failures.append(f"backward image missing for {name}")
    if failures:
        return False, failures

    presentations = {"source": source, "target": target}
    maps = {"source": forward, "target": backward}

    for claim_doc in cert["claims"]:
        name = claim_doc["name"]
        which = claim_doc["ideal"]
        pres = presentations[which]
        ring = pres.ring
        residual = poly_from_str(claim_doc["residual"], ring)
        if not claim_doc["ok"] or not residual.is_zero():
            failures.append(f"{name}: claim recorded as failing")
            continue
        if claim_doc["kind"] == "generator_pullback":
            other = presentations["target" if which == "source" else "source"]
            k = int(claim_doc["subject"])
            member = substitute(other.generators[k], maps[which])
            stated = poly_from_str(claim_doc["polynomial"], ring)
            if member != stated:
                failures.append(f"{name}: recorded pullback does not match the maps")
                continue
            rebuilt = residual
            for cof_text, gen in zip(claim_doc["cofactors"], pres.generators):
                rebuilt = rebuilt + poly_from_str(cof_text, ring) * gen
            if rebuilt != member:
                failures.append(f"{name}: cofactor identity fails")
        elif claim_doc["kind"] == "round_trip":
            var = claim_doc["subject"]
            if which == "source":
                outer, inner = backward[var], forward
            else:
                outer, inner = forward[var], backward
            composite = substitute_reduced(outer, inner, list(pres.generators))
            check = normal_form(
                composite - MultiPoly.var(ring, var), list(pres.generators)
            )
            if not check.is_zero():
                failures.append(f"{name}: composite is not the identity modulo the ideal")
        else:
            failures.append(f"{name}: unknown claim kind {claim_doc['kind']!r}")

    flags = cert["flags"]
    if not all(flags.get(key) is True for key in (
        "forward_well_defined", "backward_well_defined",
        "backward_forward_identity", "forward_backward_identity",
    )):
        failures.append("certificate flags are not all true")

    construction = doc.get("construction")
    if construction:
        failures.extend(_verify_construction(construction))
    return not failures, failures


def _verify_construction(construction: dict) -> list[str]:
    """Re-check the splitting identities stored with the proof."""
    from .cylinder import GluedModel, FiberCoordinate, verify_splitting

    failures: list[str] = []
    try:
        c_src = class_from_json(construction["source_class"])
        c_tgt = class_from_json(construction["target_class"])
        c_aux = class_from_json(construction["aux_class"])
    except Exception as exc:  # malformed class data
        return [f"construction classes unreadable: {exc}"]

    def replay(tag: str, transitions: CechClass, pullback: CechClass):
        data = construction["splittings"][tag]
        ring = tuple(data["chart_ring"])
        per_chart = tuple(poly_from_str(text, ring) for text in data["per_chart"])
        splitting = Splitting(ring, per_chart, int(data["degree_bound"]))
        model = GluedModel(transitions.curve, (FiberCoordinate(ring[1], transitions),))
        if pullback.curve != transitions.curve:
            pullback = CechClass(transitions.curve, dict(pullback.parts))
        if not verify_splitting(model, pullback, splitting):
            failures.append(f"splitting {tag}: identity fails on re-expansion")

    replay("aux_over_source", c_src, c_aux)
    replay("source_over_aux", c_aux, c_src)
    replay("aux_over_target", c_tgt, c_aux)
    replay("target_over_aux", c_aux, c_tgt)
    return failures
