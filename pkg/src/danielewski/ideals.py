"""Exact certificate engine for ideals in polynomial rings over Q.

Provides reduced Groebner bases (Buchberger with pair-elimination criteria),
ideal membership with explicit cofactor witnesses, the Jacobian smoothness
criterion for hypersurfaces in A^3, and verification of polynomial maps and
isomorphism certificates between affine varieties given by generators.

Everything is computed over exact rationals; a membership verdict is an
unconditional identity ``f = sum(cofactor_i * generator_i)`` that third
parties can replay by plain polynomial arithmetic.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Sequence

from .errors import RingMismatchError
from .ratpoly import ORDER_KEYS, Exponent, MultiPoly, substitute

# -- monomial helpers -------------------------------------------------


def _divides(a: Exponent, b: Exponent) -> bool:
    return all(x <= y for x, y in zip(a, b))

def _quotient(b: Exponent, a: Exponent) -> Exponent:
    return tuple(y - x for x, y in zip(a, b))

def _lcm(a: Exponent, b: Exponent) -> Exponent:
    return tuple(max(x, y) for x, y in zip(a, b))

def _product(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


def _neg_key(order: str):
    """Heap key that pops the largest monomial first."""
    if order == "grevlex":
        return lambda exp: (-sum(exp), tuple(reversed(exp)))
    if order == "lex":
        return lambda exp: tuple(-e for e in exp)
    raise ValueError(f"unknown term order {order!r}")


def leading_term(f: MultiPoly, order: str = "grevlex") -> tuple[Exponent, Fraction]:
    if f.is_zero():
        raise ValueError("zero polynomial has no leading term")
    key = ORDER_KEYS[order]
    exp = max(f.terms, key=key)
    return exp, f.terms[exp]


# -- division ----------------------------------------------------------


def reduce_full(
    f: MultiPoly,
    basis: Sequence[MultiPoly],
    order: str = "grevlex",
) -> tuple[list[dict[Exponent, Fraction]], MultiPoly]:
    """Fully reduce ``f`` modulo ``basis``.

    Returns ``(quotients, remainder)`` with
    ``f == sum_i quotients[i] * basis[i] + remainder`` exactly and no term of
    the remainder divisible by any leading term of the basis.  Reduction
    always uses the first applicable basis element, so the output is
    deterministic for a fixed basis order.
    """
    neg = _neg_key(order)
    lts = [leading_term(g, order) for g in basis]
    work: dict[Exponent, Fraction] = dict(f.terms)
    heap: list[tuple] = [(neg(exp), exp) for exp in work]
    heapq.heapify(heap)
    remainder: dict[Exponent, Fraction] = {}
    quotients: list[dict[Exponent, Fraction]] = [dict() for _ in basis]
    while heap:
        _, exp = heapq.heappop(heap)
        coeff = work.get(exp)
        if not coeff:
            continue
        for i, (lexp, lcoeff) in enumerate(lts):
            if _divides(lexp, exp):
                q_exp = _quotient(exp, lexp)
                q_coeff = coeff / lcoeff
                qd = quotients[i]
                qd[q_exp] = qd.get(q_exp, Fraction(0)) + q_coeff
                for gexp, gcoeff in basis[i].terms.items():
                    tgt = _product(q_exp, gexp)
                    old = work.get(tgt, Fraction(0))
                    new = old - q_coeff * gcoeff
                    if new:
                        if not old:
                            heapq.heappush(heap, (neg(tgt), tgt))
                        work[tgt] = new
                    else:
                        work.pop(tgt, None)
                break
        else:
            remainder[exp] = coeff
            del work[exp]
    return quotients, MultiPoly(f.ring, remainder)


class _FastBasis:
    """Integer-scaled division data for repeated fraction-free reduction.

    Pseudo-reduction multiplies the work polynomial by the divisor's integer
    leading coefficient instead of dividing, tracking one global rational
    scale; the final remainder is rescaled exactly and coincides with the
    remainder of classical division (same divisor-selection rule).
    """

    def __init__(self, basis: Sequence[MultiPoly], order: str):
        self.order = order
        self.neg = _neg_key(order)
        self.elements: list[tuple[Exponent, int, dict]] = []
        for g in basis:
            self.append(g)

    def append(self, g: MultiPoly) -> None:
        from math import lcm

        den = 1
        for c in g.terms.values():
            den = lcm(den, c.denominator)
        gi = {e: int(c * den) for e, c in g.terms.items()}
        lt_exp, _ = leading_term(g, self.order)
        self.elements.append((lt_exp, gi[lt_exp], gi))

    def remainder(self, f: MultiPoly) -> MultiPoly:
        from math import gcd, lcm

        if f.is_zero() or not self.elements:
            return f
        den = 1
        for c in f.terms.values():
            den = lcm(den, c.denominator)
        work = {e: int(c * den) for e, c in f.terms.items()}
        scale = Fraction(1, den)
        neg = self.neg
        heap = [(neg(exp), exp) for exp in work]
        heapq.heapify(heap)
        done: set = set()
        steps = 0
        while heap:
            _, exp = heapq.heappop(heap)
            coeff = work.get(exp)
            if not coeff or exp in done:
                continue
            for lt_exp, lt_coeff, gi in self.elements:
                if _divides(lt_exp, exp):
                    q_exp = _quotient(exp, lt_exp)
                    if lt_coeff == 1 or lt_coeff == -1:
                        q = coeff * lt_coeff
                    else:
                        # pseudo-step: scale everything by the leading coefficient
                        for key in work:
                            work[key] *= lt_coeff
                        scale = scale / lt_coeff
                        q = coeff
                    for ge, gc in gi.items():
                        tgt = _product(q_exp, ge)
                        old = work.get(tgt, 0)
                        new = old - q * gc
                        if new:
                            if not old and tgt not in done:
                                heapq.heappush(heap, (neg(tgt), tgt))
                            work[tgt] = new
                        else:
                            work.pop(tgt, None)
                    break
            else:
                done.add(exp)
            steps += 1
            if steps % 64 == 0 and work:
                shrink = 0
                for v in work.values():
                    shrink = gcd(shrink, v)
                    if shrink == 1:
                        break
                if shrink > 1:
                    work = {e: v // shrink for e, v in work.items()}
                    scale = scale * shrink
        return MultiPoly(f.ring, {e: c * scale for e, c in work.items() if c})


def normal_form(f: MultiPoly, basis: Sequence[MultiPoly], order: str = "grevlex") -> MultiPoly:
    return _FastBasis(basis, order).remainder(f)


# -- presentations and bases -------------------------------------------


@dataclass(frozen=True)
class IdealPresentation:
    """An ideal in a named ring, given by a finite list of generators."""

    ring: tuple[str, ...]
    generators: tuple[MultiPoly, ...]

    def __init__(self, ring: Iterable[str], generators: Iterable[MultiPoly]):
        ring = tuple(ring)
        gens = tuple(generators)
        if not gens:
            raise ValueError("at least one generator is required")
        kept = []
        for g in gens:
            if g.ring != ring:
                raise RingMismatchError(f"generator ring {g.ring} does not match {ring}")
            if not g.is_zero():
                kept.append(g)
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "generators", tuple(kept))


@dataclass(frozen=True)
class GroebnerBasis:
    """A reduced Groebner basis: monic, self-reduced, canonically sorted."""

    ring: tuple[str, ...]
    order: str
    basis: tuple[MultiPoly, ...]

    def is_unit_ideal(self) -> bool:
        return len(self.basis) == 1 and self.basis[0] == MultiPoly.const(self.ring, 1)

    def is_self_reduced(self) -> bool:
        for i, g in enumerate(self.basis):
            lexp, _ = leading_term(g, self.order)
            for j, h in enumerate(self.basis):
                if i == j:
                    continue
                if any(_divides(lexp, exp) for exp in h.terms):
                    return False
        return True


def _s_poly_parts(fi, fj, order):
    (ei, ci) = leading_term(fi, order)
    (ej, cj) = leading_term(fj, order)
    lcm = _lcm(ei, ej)
    mi = MultiPoly.monomial(fi.ring, _quotient(lcm, ei), Fraction(1) / ci)
    mj = MultiPoly.monomial(fj.ring, _quotient(lcm, ej), Fraction(1) / cj)
    return mi, mj, lcm


def _content_scale(poly: MultiPoly) -> Fraction:
    """Scale factor making the coefficients coprime integers.

    Rescaling basis elements does not change the ideal and keeps the rational
    arithmetic in Buchberger from blowing up Euclid-style.
    """
    from math import gcd, lcm

    nums = [abs(c.numerator) for c in poly.terms.values()]
    dens = [c.denominator for c in poly.terms.values()]
    num_gcd = 0
    for a in nums:
        num_gcd = gcd(num_gcd, a)
    den_lcm = 1
    for b in dens:
        den_lcm = lcm(den_lcm, b)
    return Fraction(den_lcm, num_gcd) if num_gcd else Fraction(1)


def _gm_update(pairs: set, lts: list[Exponent], t: int) -> set:
    """Gebauer-Moller pair update when element ``t`` joins the basis.

    Installs the new pairs (i, t) pruned by the M (strictly smaller lcm with
    the same partner), F (one representative per lcm, none if some member of
    the class is coprime), and B (coprime leading terms) criteria, and drops
    old pairs whose lcm is properly covered by the newcomer.
    """
    lt_t = lts[t]
    lcms = {i: _lcm(lts[i], lt_t) for i in range(t)}
    survivors = [
        i
        for i in range(t)
        if not any(
            j != i and _divides(lcms[j], lcms[i]) and lcms[j] != lcms[i] for j in range(t)
        )
    ]
    by_lcm: dict[Exponent, list[int]] = {}
    for i in survivors:
        by_lcm.setdefault(lcms[i], []).append(i)
    new_pairs = []
    for lcm_exp, members in by_lcm.items():
        if any(lcms[i] == _product(lts[i], lt_t) for i in members):
            continue  # a coprime member kills the whole class
        new_pairs.append((min(members), t))
    kept_old = set()
    for i, j in pairs:
        l = _lcm(lts[i], lts[j])
        if _divides(lt_t, l) and _lcm(lts[i], lt_t) != l and _lcm(lts[j], lt_t) != l:
            continue
        kept_old.add((i, j))
    kept_old.update(new_pairs)
    return kept_old


def _buchberger(gens: Sequence[MultiPoly], order: str, ring: tuple[str, ...], trace: bool):
    """Buchberger's algorithm with Gebauer-Moller pair elimination.

    Returns ``(basis, traces)``; each trace is the cofactor vector of the
    basis element over the original generators (``None`` entries when tracing
    is disabled).  S-polynomial reduction runs fraction-free unless traces
    are requested.
    """
    key = ORDER_KEYS[order]
    basis: list[MultiPoly] = []
    traces: list = []
    lts: list[Exponent] = []
    fast = _FastBasis([], order)
    n_gens = len(gens)

    def unit_vector(k: int) -> list[MultiPoly]:
        return [
            MultiPoly.const(ring, 1) if i == k else MultiPoly.zero(ring)
            for i in range(n_gens)
        ]

    pairs: set[tuple[int, int]] = set()

    def add_element(poly: MultiPoly, vec):
        nonlocal pairs
        scale = _content_scale(poly)
        poly = poly * scale
        basis.append(poly)
        traces.append([v * scale for v in vec] if trace else None)
        lts.append(leading_term(poly, order)[0])
        fast.append(poly)
        pairs = _gm_update(pairs, lts, len(basis) - 1)

    for k, g in enumerate(gens):
        if not g.is_zero():
            add_element(g, unit_vector(k) if trace else None)

    while pairs:
        i, j = min(pairs, key=lambda p: (key(_lcm(lts[p[0]], lts[p[1]])), p))
        pairs.discard((i, j))
        mi, mj, _ = _s_poly_parts(basis[i], basis[j], order)
        s_poly = mi * basis[i] - mj * basis[j]
        if trace:
            quots, remainder = reduce_full(s_poly, basis, order)
        else:
            quots, remainder = None, fast.remainder(s_poly)
        if remainder.is_zero():
            continue
        vec = None
        if trace:
            vec = [mi * a - mj * b for a, b in zip(traces[i], traces[j])]
            for t, qd in enumerate(quots):
                if qd:
                    q = MultiPoly(ring, qd)
                    vec = [a - q * b for a, b in zip(vec, traces[t])]
        add_element(remainder, vec)

    return basis, traces


def _reduced_basis(gens, order, ring, trace: bool):
    basis, traces = _buchberger(gens, order, ring, trace)
    if not basis:
        return [], []
    key = ORDER_KEYS[order]
    indices = sorted(range(len(basis)), key=lambda i: key(leading_term(basis[i], order)[0]))
    kept: list[int] = []
    for i in indices:
        lexp = leading_term(basis[i], order)[0]
        if not any(_divides(leading_term(basis[k], order)[0], lexp) for k in kept):
            kept.append(i)
    polys = [basis[i] for i in kept]
    vecs = [list(traces[i]) if trace else None for i in kept]
    # Tail-reduce every element against the others; leading terms are already
    # pairwise non-divisible, so one full-reduction pass yields the reduced basis.
    for idx in range(len(polys)):
        others = [polys[k] for k in range(len(polys)) if k != idx]
        if trace:
            quots, remainder = reduce_full(polys[idx], others, order)
            other_vecs = [vecs[k] for k in range(len(polys)) if k != idx]
            vec = vecs[idx]
            for t, qd in enumerate(quots):
                if qd:
                    q = MultiPoly(remainder.ring, qd)
                    vec = [a - q * b for a, b in zip(vec, other_vecs[t])]
            vecs[idx] = vec
        else:
            remainder = _FastBasis(others, order).remainder(polys[idx])
        polys[idx] = remainder
    for idx in range(len(polys)):
        _, lcoeff = leading_term(polys[idx], order)
        inv = Fraction(1) / lcoeff
        polys[idx] = polys[idx] * inv
        if trace:
            vecs[idx] = [v * inv for v in vecs[idx]]
    final = sorted(
        range(len(polys)), key=lambda i: key(leading_term(polys[i], order)[0]), reverse=True
    )
    return [polys[i] for i in final], [vecs[i] for i in final]


@lru_cache(maxsize=None)
def _groebner_cached(ideal: IdealPresentation, order: str):
    polys, _ = _reduced_basis(ideal.generators, order, ideal.ring, trace=False)
    return tuple(polys)


@lru_cache(maxsize=None)
def _groebner_traced(ideal: IdealPresentation, order: str):
    polys, vecs = _reduced_basis(ideal.generators, order, ideal.ring, trace=True)
    return tuple(polys), tuple(tuple(v) for v in vecs)


def groebner_basis(ideal: IdealPresentation, order: str = "grevlex") -> GroebnerBasis:
    """Reduced Groebner basis; deterministic and generator-order independent."""
    if order not in ORDER_KEYS:
        raise ValueError(f"unknown term order {order!r}")
    return GroebnerBasis(ideal.ring, order, _groebner_cached(ideal, order))


def ideal_member(f: MultiPoly, ideal: IdealPresentation, order: str = "grevlex") -> bool:
    """True iff the normal form of ``f`` modulo the ideal is zero."""
    if f.ring != ideal.ring:
        raise RingMismatchError(f"ring mismatch: {f.ring} vs {ideal.ring}")
    basis = _groebner_cached(ideal, order)
    if not basis:
        return f.is_zero()
    return normal_form(f, basis, order).is_zero()


def ideal_member_witness(
    f: MultiPoly, ideal: IdealPresentation, order: str = "grevlex"
) -> tuple[bool, tuple[MultiPoly, ...], MultiPoly]:
    """Membership with an explicit identity certificate.

    Returns ``(member, cofactors, remainder)`` satisfying
    ``f == sum(cofactors[i] * ideal.generators[i]) + remainder`` exactly; the
    verdict is ``remainder == 0``.
    """
    if f.ring != ideal.ring:
        raise RingMismatchError(f"ring mismatch: {f.ring} vs {ideal.ring}")
    basis, traces = _groebner_traced(ideal, order)
    ring = ideal.ring
    if not basis:
        return f.is_zero(), tuple(), f
    quots, remainder = reduce_full(f, basis, order)
    cofactors = [MultiPoly.zero(ring) for _ in ideal.generators]
    for t, qd in enumerate(quots):
        if qd:
            q = MultiPoly(ring, qd)
            cofactors = [c + q * tr for c, tr in zip(cofactors, traces[t])]
    return remainder.is_zero(), tuple(cofactors), remainder


def substitute_reduced(
    g: MultiPoly,
    images: Mapping[str, MultiPoly],
    division_basis: Sequence[MultiPoly],
    order: str = "grevlex",
) -> MultiPoly:
    """Normal form of ``substitute(g, images)`` modulo the basis.

    Every intermediate power and product is reduced immediately, so the
    computation never materializes the raw composite; the result is in the
    same residue class as the plain substitution and equals its normal form.
    A single integer generator with unit leading coefficient enables an
    integer-scaled fast path (one denominator per polynomial, no per-term
    rational normalization).
    """
    ring = division_basis[0].ring if division_basis else next(iter(images.values())).ring
    fast = _fast_reduction_context(division_basis, order)
    if fast is not None:
        return _substitute_reduced_int(g, images, ring, fast, order)

    def reduce(p: MultiPoly) -> MultiPoly:
        return normal_form(p, division_basis, order) if division_basis else p

    base_cache: dict[str, MultiPoly] = {}
    power_cache: dict[tuple[str, int], MultiPoly] = {}

    def power(name: str, e: int) -> MultiPoly:
        key = (name, e)
        if key in power_cache:
            return power_cache[key]
        if name not in base_cache:
            img = images[name]
            if img.ring != ring:
                from .ratpoly import ring_embed

                img = ring_embed(img, ring)
            base_cache[name] = reduce(img)
        if e == 1:
            result = base_cache[name]
        else:
            result = reduce(power(name, e - 1) * base_cache[name])
        power_cache[key] = result
        return result

    acc = MultiPoly.zero(ring)
    for exp, coeff in g.terms.items():
        term = MultiPoly.const(ring, coeff)
        for name, e in zip(g.ring, exp):
            if e:
                term = reduce(term * power(name, e))
        acc = acc + term
    return reduce(acc)


def _fast_reduction_context(division_basis, order):
    """Integer reduction data for a single generator with unit leading term."""
    if len(division_basis) != 1:
        return None
    f = division_basis[0]
    if any(c.denominator != 1 for c in f.terms.values()):
        return None
    lt_exp, lt_coeff = leading_term(f, order)
    if lt_coeff not in (1, -1):
        return None
    f_terms = {e: int(c) for e, c in f.terms.items()}
    return (f_terms, lt_exp, int(lt_coeff))


def _int_reduce(work: dict, ctx, order) -> dict:
    """In-place full reduction of an integer term dict by the context generator."""
    f_terms, lt_exp, lt_sign = ctx
    neg = _neg_key(order)
    heap = [(neg(exp), exp) for exp in work if _divides(lt_exp, exp)]
    heapq.heapify(heap)
    while heap:
        _, exp = heapq.heappop(heap)
        coeff = work.get(exp)
        if not coeff or not _divides(lt_exp, exp):
            continue
        q_exp = _quotient(exp, lt_exp)
        q = coeff * lt_sign
        for fe, fc in f_terms.items():
            tgt = _product(q_exp, fe)
            old = work.get(tgt, 0)
            new = old - q * fc
            if new:
                if not old and _divides(lt_exp, tgt):
                    heapq.heappush(heap, (neg(tgt), tgt))
                work[tgt] = new
            else:
                work.pop(tgt, None)
    return work


def _int_normalize(terms: dict, den: int) -> tuple[dict, int]:
    from math import gcd

    if not terms:
        return {}, 1
    g = den
    for v in terms.values():
        g = gcd(g, v)
        if g == 1:
            return terms, den
    return {e: v // g for e, v in terms.items()}, den // g


def _substitute_reduced_int(g, images, ring, ctx, order) -> MultiPoly:
    from math import lcm

    from .ratpoly import ring_embed

    def to_int(p: MultiPoly) -> tuple[dict, int]:
        den = 1
        for c in p.terms.values():
            den = lcm(den, c.denominator)
        return {e: int(c * den) for e, c in p.terms.items()}, den

    def mul(a, b):
        (ta, da), (tb, db) = a, b
        out: dict = {}
        for e1, c1 in ta.items():
            for e2, c2 in tb.items():
                key = _product(e1, e2)
                out[key] = out.get(key, 0) + c1 * c2
        out = {e: c for e, c in out.items() if c}
        return _int_normalize(_int_reduce(out, ctx, order), da * db)

    base_cache: dict = {}
    power_cache: dict = {}

    def power(name, e):
        key = (name, e)
        if key in power_cache:
            return power_cache[key]
        if name not in base_cache:
            img = images[name]
            if img.ring != ring:
                img = ring_embed(img, ring)
            terms, den = to_int(img)
            base_cache[name] = _int_normalize(_int_reduce(dict(terms), ctx, order), den)
        result = base_cache[name] if e == 1 else mul(power(name, e - 1), base_cache[name])
        power_cache[key] = result
        return result

    acc_terms: dict = {}
    acc_den = 1
    for exp, coeff in g.terms.items():
        term = ({(0,) * len(ring): coeff.numerator}, coeff.denominator)
        for name, e in zip(g.ring, exp):
            if e:
                term = mul(term, power(name, e))
        t_terms, t_den = term
        common = lcm(acc_den, t_den)
        sa, st = common // acc_den, common // t_den
        merged = {e: c * sa for e, c in acc_terms.items()}
        for e, c in t_terms.items():
            merged[e] = merged.get(e, 0) + c * st
        acc_terms = {e: c for e, c in merged.items() if c}
        acc_den = common
    acc_terms, acc_den = _int_normalize(_int_reduce(acc_terms, ctx, order), acc_den)
    return MultiPoly(ring, {e: Fraction(c, acc_den) for e, c in acc_terms.items()})


def jacobian_smooth(f: MultiPoly) -> bool:
    """Smoothness of the hypersurface ``f = 0`` in A^3 by the Jacobian criterion.

    True iff 1 lies in the ideal generated by ``f`` and its three partials.
    Membership of 1 is invariant under field extension, so a ``True`` verdict
    certifies smoothness over any extension of Q.
    """
    if len(f.ring) != 3:
        raise ValueError(f"expected a polynomial in 3 variables, got ring {f.ring}")
    if f.is_constant():
        raise ValueError("surface equation must be nonconstant")
    from .ratpoly import partial_derivative

    gens = [f] + [partial_derivative(f, v) for v in f.ring]
    ideal = IdealPresentation(f.ring, [g for g in gens if not g.is_zero()])
    return groebner_basis(ideal).is_unit_ideal()


# -- polynomial maps and isomorphism certificates -----------------------


@dataclass(frozen=True, eq=False)
class PolyMap:
    """A morphism of presented affine varieties, written contravariantly.

    ``images`` sends each target-ring variable to a polynomial in the source
    ring; geometrically the map goes from the source variety to the target
    variety.  Well-definedness is a checked property (see verify_morphism),
    never an assumption.
    """

    source: IdealPresentation
    target: IdealPresentation
    images: Mapping[str, MultiPoly]

    def __post_init__(self):
        for name in self.target.ring:
            if name not in self.images:
                raise ValueError(f"no image for target variable {name!r}")
        for name, poly in self.images.items():
            if poly.ring != self.source.ring:
                raise RingMismatchError(
                    f"image of {name!r} lives in {poly.ring}, expected {self.source.ring}"
                )
        object.__setattr__(self, "images", dict(self.images))

    def pull_back(self, g: MultiPoly) -> MultiPoly:
        """Substitute the images into a polynomial of the target ring."""
        if g.ring != self.target.ring:
            raise RingMismatchError(f"ring mismatch: {g.ring} vs {self.target.ring}")
        result = substitute(g, dict(self.images))
        if result.ring != self.source.ring:
            # embeds e.g. constants; force the declared source ring
            from .ratpoly import ring_embed

            result = ring_embed(result, self.source.ring)
        return result

    def __eq__(self, other):
        if not isinstance(other, PolyMap):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and dict(self.images) == dict(other.images)
        )

    def __hash__(self):
        return hash((self.source, self.target, tuple(sorted(self.images.items()))))


def identity_map(presentation: IdealPresentation) -> PolyMap:
    images = {v: MultiPoly.var(presentation.ring, v) for v in presentation.ring}
    return PolyMap(presentation, presentation, images)


def verify_morphism(pmap: PolyMap, order: str = "grevlex") -> bool:
    """True iff every target generator pulls back into the source ideal."""
    return all(
        ideal_member(pmap.pull_back(g), pmap.source, order) for g in pmap.target.generators
    )


@dataclass(frozen=True)
class Claim:
    """One checked membership claim with its replayable witness.

    ``generator_pullback`` claims carry the claimed member and an exact
    cofactor identity ``polynomial == sum(cofactors * generators) + residual``.
    ``round_trip`` claims store the normal form of the composite minus the
    identity (computed with incremental reduction); replaying them needs only
    division by the stated generators, never a basis computation.  A claim
    holds iff its residual is zero.
    """

    name: str
    ideal: str  # "source" or "target"
    kind: str  # "generator_pullback" or "round_trip"
    subject: str  # generator index or variable name
    polynomial: Optional[MultiPoly]  # claimed member (pullback claims only)
    residual: MultiPoly
    cofactors: Optional[tuple[MultiPoly, ...]]
    ok: bool


@dataclass(frozen=True, eq=False)
class IsoCertificate:
    """A pair of polynomial maps plus machine-checked inverse-ness flags.

    The four flags are (forward well-defined, backward well-defined,
    backward-after-forward is the identity modulo the source ideal,
    forward-after-backward is the identity modulo the target ideal).  They
    are only ever set by ``verify_iso_certificate``.
    """

    forward: PolyMap
    backward: PolyMap
    forward_well_defined: Optional[bool] = None
    backward_well_defined: Optional[bool] = None
    backward_forward_identity: Optional[bool] = None
    forward_backward_identity: Optional[bool] = None
    evidence: tuple[Claim, ...] = field(default=())

    @property
    def flags(self) -> tuple:
        return (
            self.forward_well_defined,
            self.backward_well_defined,
            self.backward_forward_identity,
            self.forward_backward_identity,
        )

    def is_valid(self) -> bool:
        return all(flag is True for flag in self.flags)


def unchecked_certificate(forward: PolyMap, backward: PolyMap) -> IsoCertificate:
    if forward.source != backward.target or forward.target != backward.source:
        raise ValueError("forward and backward maps do not pair up structurally")
    return IsoCertificate(forward=forward, backward=backward)


def verify_iso_certificate(cert: IsoCertificate, order: str = "grevlex") -> IsoCertificate:
    """Compute all four flags and attach membership witnesses.

    The composition checks require, for each source variable w, that
    substituting the forward images into backward.images[w] differs from w
    by a member of the source ideal (and symmetrically for the target).
    """
    forward, backward = cert.forward, cert.backward
    if forward.source != backward.target or forward.target != backward.source:
        raise ValueError("forward and backward maps do not pair up structurally")
    claims: list[Claim] = []

    def pullback_claim(name: str, which: str, ideal: IdealPresentation, k: int, poly: MultiPoly) -> bool:
        ok, cofactors, residual = ideal_member_witness(poly, ideal, order)
        claims.append(
            Claim(name, which, "generator_pullback", str(k), poly, residual, cofactors, ok)
        )
        return ok

    def round_trip_claim(
        name: str, which: str, ideal: IdealPresentation, var: str,
        outer: MultiPoly, inner_images: Mapping[str, MultiPoly],
    ) -> bool:
        basis = _groebner_cached(ideal, order)
        composite = substitute_reduced(outer, dict(inner_images), basis, order)
        residual = normal_form(composite - MultiPoly.var(ideal.ring, var), basis, order)
        ok = residual.is_zero()
        claims.append(Claim(name, which, "round_trip", var, None, residual, None, ok))
        return ok

    fwd_ok = True
    for k, g in enumerate(forward.target.generators):
        ok = pullback_claim(
            f"forward_well_defined[{k}]", "source", forward.source, k, forward.pull_back(g)
        )
        fwd_ok = fwd_ok and ok
    bwd_ok = True
    for k, g in enumerate(backward.target.generators):
        ok = pullback_claim(
            f"backward_well_defined[{k}]", "target", backward.source, k, backward.pull_back(g)
        )
        bwd_ok = bwd_ok and ok

    comp1 = True
    for name in forward.source.ring:
        ok = round_trip_claim(
            f"round_trip_source[{name}]", "source", forward.source, name,
            backward.images[name], forward.images,
        )
        comp1 = comp1 and ok
    comp2 = True
    for name in forward.target.ring:
        ok = round_trip_claim(
            f"round_trip_target[{name}]", "target", backward.source, name,
            forward.images[name], backward.images,
        )
        comp2 = comp2 and ok

    return IsoCertificate(
        forward=forward,
        backward=backward,
        forward_well_defined=fwd_ok,
        backward_well_defined=bwd_ok,
        backward_forward_identity=comp1,
        forward_backward_identity=comp2,
        evidence=tuple(claims),
    )
