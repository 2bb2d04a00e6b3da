"""Exact sparse polynomial arithmetic over the rationals.

Two value types live here:

``MultiPoly``
    A multivariate polynomial over an ordered ring of named variables,
    stored as a map from exponent tuples to nonzero ``Fraction``
    coefficients.  The zero polynomial is the empty map.

``LaurentPoly``
    A univariate Laurent polynomial in powers of ``(x - c)`` for a rational
    expansion point ``c``, stored as a map from integer exponents to nonzero
    coefficients.  The strictly negative exponents form the principal part.

Both types are immutable after construction; all operations are pure and
return new values, so instances can be shared freely between threads.

Terms are ordered by graded reverse lexicographic order on the declared
variable order.  The canonical text form (``sorted_terms`` order, ``^`` for
powers, explicit ``*``, rationals as ``p/q``) is the interchange format used
by the CLI and by JSON documents.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .errors import ParseError, RingMismatchError

Exponent = tuple[int, ...]


def as_fraction(value) -> Fraction:
    """Coerce an int, Fraction, or "p/q" string to an exact rational."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a rational number")


def fraction_str(q: Fraction) -> str:
    """Render a rational in the ``p/q`` interchange form (``p`` if integral)."""
    q = as_fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def grevlex_key(exp: Exponent):
    """Sort key realizing graded reverse lexicographic order (ascending)."""
    return (sum(exp), tuple(-e for e in reversed(exp)))


def lex_key(exp: Exponent):
    """Sort key realizing lexicographic order (ascending)."""
    return tuple(exp)


ORDER_KEYS = {"grevlex": grevlex_key, "lex": lex_key}


class MultiPoly:
    """Immutable sparse multivariate polynomial with rational coefficients."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Iterable[str], terms: Mapping[Exponent, Fraction]):
        ring = tuple(ring)
        clean: dict[Exponent, Fraction] = {}
        for exp, coeff in terms.items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != len(ring):
                raise ValueError(f"exponent {exp} does not match ring arity {len(ring)}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            coeff = as_fraction(coeff)
            if coeff != 0:
                clean[exp] = coeff
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("MultiPoly is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, ring: Iterable[str]) -> "MultiPoly":
        return cls(ring, {})

    @classmethod
    def const(cls, ring: Iterable[str], value) -> "MultiPoly":
        ring = tuple(ring)
        return cls(ring, {(0,) * len(ring): as_fraction(value)})

    @classmethod
    def var(cls, ring: Iterable[str], name: str) -> "MultiPoly":
        ring = tuple(ring)
        if name not in ring:
            raise RingMismatchError(f"variable {name!r} not in ring {ring}")
        exp = tuple(1 if v == name else 0 for v in ring)
        return cls(ring, {exp: Fraction(1)})

    @classmethod
    def monomial(cls, ring: Iterable[str], exp: Exponent, coeff=1) -> "MultiPoly":
        return cls(ring, {tuple(exp): as_fraction(coeff)})

    # -- basic queries ------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(exp) == 0 for exp in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()), Fraction(0))

    def total_degree(self) -> int:
        """Total degree; the zero polynomial reports -1."""
        if not self.terms:
            return -1
        return max(sum(exp) for exp in self.terms)

    def degree_in(self, name: str) -> int:
        idx = self.ring.index(name)
        if not self.terms:
            return -1
        return max(exp[idx] for exp in self.terms)

    def variables_used(self) -> tuple[str, ...]:
        used = [False] * len(self.ring)
        for exp in self.terms:
            for i, e in enumerate(exp):
                if e:
                    used[i] = True
        return tuple(v for v, u in zip(self.ring, used) if u)

    def sorted_terms(self, order: str = "grevlex") -> list[tuple[Exponent, Fraction]]:
        key = ORDER_KEYS[order]
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    # -- arithmetic ---------------------------------------------------

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.ring != self.ring:
                raise RingMismatchError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.const(self.ring, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for exp, coeff in other.terms.items():
            out[exp] = out.get(exp, Fraction(0)) + coeff
        return MultiPoly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for exp, coeff in other.terms.items():
            out[exp] = out.get(exp, Fraction(0)) - coeff
        return MultiPoly(self.ring, out)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = as_fraction(other)
            if c == 0:
                return MultiPoly.zero(self.ring)
            return MultiPoly(self.ring, {e: co * c for e, co in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                out[exp] = out.get(exp, Fraction(0)) + c1 * c2
        return MultiPoly(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = MultiPoly.const(self.ring, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            items = tuple(sorted(self.terms.items(), key=lambda t: grevlex_key(t[0])))
            object.__setattr__(self, "_hash", hash((self.ring, items)))
        return self._hash

    # -- text form ----------------------------------------------------

    def _monomial_str(self, exp: Exponent) -> str:
        pieces = []
        for name, e in zip(self.ring, exp):
            if e == 0:
                continue
            pieces.append(name if e == 1 else f"{name}^{e}")
        return "*".join(pieces)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        chunks: list[str] = []
        for exp, coeff in self.sorted_terms():
            mono = self._monomial_str(exp)
            mag = abs(coeff)
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{fraction_str(mag)}*{mono}"
            else:
                body = fraction_str(mag)
            if not chunks:
                chunks.append(body if coeff > 0 else f"-{body}")
            else:
                chunks.append(f"+ {body}" if coeff > 0 else f"- {body}")
        return " ".join(chunks)

    def __repr__(self) -> str:
        return f"MultiPoly({self.ring}, {self})"


def ring_union(*rings: Iterable[str]) -> tuple[str, ...]:
    """Ordered union of variable lists, keeping first appearances."""
    seen: dict[str, None] = {}
    for ring in rings:
        for name in ring:
            seen.setdefault(name, None)
    return tuple(seen)


def ring_embed(f: MultiPoly, target_ring: Iterable[str]) -> MultiPoly:
    """Reinterpret ``f`` in a larger ring containing all its variables."""
    target_ring = tuple(target_ring)
    positions = []
    for name in f.ring:
        if name not in target_ring:
            raise RingMismatchError(f"variable {name!r} missing from target ring {target_ring}")
        positions.append(target_ring.index(name))
    out: dict[Exponent, Fraction] = {}
    for exp, coeff in f.terms.items():
        new = [0] * len(target_ring)
        for pos, e in zip(positions, exp):
            new[pos] = e
        out[tuple(new)] = coeff
    return MultiPoly(target_ring, out)


def poly_arith(lhs: MultiPoly, rhs: MultiPoly, op: str) -> MultiPoly:
    """Exact ring operation; ``op`` is one of ``add``, ``sub``, ``mul``."""
    if lhs.ring != rhs.ring:
        raise RingMismatchError(f"ring mismatch: {lhs.ring} vs {rhs.ring}")
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    raise ValueError(f"unknown operation {op!r}")


def partial_derivative(f: MultiPoly, name: str) -> MultiPoly:
    """Formal partial derivative with respect to a ring variable."""
    if name not in f.ring:
        raise RingMismatchError(f"variable {name!r} not in ring {f.ring}")
    idx = f.ring.index(name)
    out: dict[Exponent, Fraction] = {}
    for exp, coeff in f.terms.items():
        e = exp[idx]
        if e == 0:
            continue
        new = list(exp)
        new[idx] = e - 1
        key = tuple(new)
        out[key] = out.get(key, Fraction(0)) + coeff * e
    return MultiPoly(f.ring, out)


def substitute(f: MultiPoly, assignment: Mapping[str, MultiPoly]) -> MultiPoly:
    """Substitute polynomials for variables.

    Unassigned variables map to themselves.  The result lives in the ordered
    union of the image rings (source variables first, then new names in the
    order they appear in each image ring).
    """
    for name in assignment:
        if name not in f.ring:
            raise RingMismatchError(f"assigned variable {name!r} not in ring {f.ring}")
    pieces: list[tuple[str, ...]] = []
    for name in f.ring:
        if name in assignment:
            pieces.append(assignment[name].ring)
        else:
            pieces.append((name,))
    target = ring_union(*pieces)
    images = {}
    for name in f.ring:
        if name in assignment:
            images[name] = ring_embed(assignment[name], target)
        else:
            images[name] = MultiPoly.var(target, name)
    result = MultiPoly.zero(target)
    power_cache: dict[tuple[str, int], MultiPoly] = {}
    for exp, coeff in f.terms.items():
        term = MultiPoly.const(target, coeff)
        for name, e in zip(f.ring, exp):
            if e == 0:
                continue
            key = (name, e)
            if key not in power_cache:
                power_cache[key] = images[name] ** e
            term = term * power_cache[key]
        result = result + term
    return result


class LaurentPoly:
    """Immutable Laurent polynomial in powers of ``(variable - center)``."""

    __slots__ = ("variable", "center", "terms", "_hash")

    def __init__(self, variable: str, terms: Mapping[int, Fraction], center=0):
        clean: dict[int, Fraction] = {}
        for exp, coeff in terms.items():
            coeff = as_fraction(coeff)
            if coeff != 0:
                clean[int(exp)] = coeff
        object.__setattr__(self, "variable", variable)
        object.__setattr__(self, "center", as_fraction(center))
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentPoly is immutable")

    @classmethod
    def zero(cls, variable: str, center=0) -> "LaurentPoly":
        return cls(variable, {}, center)

    @classmethod
    def monomial(cls, variable: str, exp: int, coeff=1, center=0) -> "LaurentPoly":
        return cls(variable, {exp: as_fraction(coeff)}, center)

    def is_zero(self) -> bool:
        return not self.terms

    def min_exponent(self) -> int:
        if not self.terms:
            raise ValueError("zero Laurent polynomial has no exponents")
        return min(self.terms)

    def max_exponent(self) -> int:
        if not self.terms:
            raise ValueError("zero Laurent polynomial has no exponents")
        return max(self.terms)

    def pole_order(self) -> int:
        """Order of the pole at the center (0 if regular there)."""
        if not self.terms:
            return 0
        return max(0, -min(self.terms))

    def _compatible(self, other: "LaurentPoly"):
        if self.variable != other.variable or self.center != other.center:
            raise RingMismatchError(
                f"Laurent mismatch: ({self.variable}, center {self.center}) vs "
                f"({other.variable}, center {other.center})"
            )

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly(self.variable, {0: as_fraction(other)}, self.center)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        self._compatible(other)
        out = dict(self.terms)
        for exp, coeff in other.terms.items():
            out[exp] = out.get(exp, Fraction(0)) + coeff
        return LaurentPoly(self.variable, out, self.center)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.variable, {e: -c for e, c in self.terms.items()}, self.center)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly(self.variable, {0: as_fraction(other)}, self.center)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = as_fraction(other)
            return LaurentPoly(self.variable, {e: co * c for e, co in self.terms.items()}, self.center)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        self._compatible(other)
        out: dict[int, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                out[e1 + e2] = out.get(e1 + e2, Fraction(0)) + c1 * c2
        return LaurentPoly(self.variable, out, self.center)

    __rmul__ = __mul__

    def shift_exponents(self, k: int) -> "LaurentPoly":
        """Multiply by ``(variable - center)^k`` (k may be negative)."""
        return LaurentPoly(self.variable, {e + k: c for e, c in self.terms.items()}, self.center)

    def times_poly(self, s: MultiPoly) -> "LaurentPoly":
        """Multiply by a polynomial in the Laurent variable, re-expanded at the center."""
        return self * poly_to_laurent(s, self.variable, self.center)

    def split(self) -> tuple["LaurentPoly", "LaurentPoly"]:
        """Decompose into (regular part, principal part)."""
        regular = {e: c for e, c in self.terms.items() if e >= 0}
        principal = {e: c for e, c in self.terms.items() if e < 0}
        return (
            LaurentPoly(self.variable, regular, self.center),
            LaurentPoly(self.variable, principal, self.center),
        )

    def principal_part(self) -> "LaurentPoly":
        return self.split()[1]

    def regular_part(self) -> "LaurentPoly":
        return self.split()[0]

    def is_principal(self) -> bool:
        return all(e < 0 for e in self.terms)

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return (
            self.variable == other.variable
            and self.center == other.center
            and self.terms == other.terms
        )

    def __hash__(self):
        if self._hash is None:
            items = tuple(sorted(self.terms.items()))
            object.__setattr__(self, "_hash", hash((self.variable, self.center, items)))
        return self._hash

    def _base_str(self) -> str:
        if self.center == 0:
            return self.variable
        sign = "-" if self.center > 0 else "+"
        return f"({self.variable} {sign} {fraction_str(abs(self.center))})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        base = self._base_str()
        chunks: list[str] = []
        for exp in sorted(self.terms, reverse=True):
            coeff = self.terms[exp]
            mag = abs(coeff)
            if exp == 0:
                body = fraction_str(mag)
            else:
                mono = base if exp == 1 else f"{base}^{exp}"
                body = mono if mag == 1 else f"{fraction_str(mag)}*{mono}"
            if not chunks:
                chunks.append(body if coeff > 0 else f"-{body}")
            else:
                chunks.append(f"+ {body}" if coeff > 0 else f"- {body}")
        return " ".join(chunks)

    def __repr__(self) -> str:
        return f"LaurentPoly({self})"


def laurent_split(f: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    """Split into (regular, principal); ``f == regular + principal`` exactly."""
    return f.split()


def poly_to_laurent(s: MultiPoly, variable: str, center=0) -> LaurentPoly:
    """Re-expand a univariate polynomial in powers of ``(variable - center)``.

    ``s`` must involve no variable other than ``variable``.
    """
    used = s.variables_used()
    if any(name != variable for name in used):
        raise RingMismatchError(f"polynomial uses {used}, expected only {variable!r}")
    center = as_fraction(center)
    idx = s.ring.index(variable) if variable in s.ring else None
    # Coefficient list in ascending powers of the variable.
    coeffs: dict[int, Fraction] = {}
    for exp, coeff in s.terms.items():
        e = exp[idx] if idx is not None else 0
        coeffs[e] = coeffs.get(e, Fraction(0)) + coeff
    if center == 0:
        return LaurentPoly(variable, coeffs, 0)
    # Taylor shift by repeated synthetic division by (x - center).
    degree = max(coeffs) if coeffs else 0
    work = [coeffs.get(i, Fraction(0)) for i in range(degree + 1)]
    shifted: list[Fraction] = []
    while work:
        d = len(work) - 1
        if d == 0:
            shifted.append(work[0])
            break
        quotient = [Fraction(0)] * d
        quotient[d - 1] = work[d]
        for i in range(d - 1, 0, -1):
            quotient[i - 1] = work[i] + center * quotient[i]
        shifted.append(work[0] + center * quotient[0])
        work = quotient
    return LaurentPoly(variable, {i: c for i, c in enumerate(shifted)}, center)


# -- text parsing -----------------------------------------------------


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.items: list[tuple[str, str, int]] = []
        self._scan()
        self.index = 0

    def _scan(self):
        text = self.text
        i = 0
        while i < len(text):
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if ch.isdigit():
                j = i
                while j < len(text) and text[j].isdigit():
                    j += 1
                self.items.append(("int", text[i:j], i))
                i = j
                continue
            if ch.isalpha() or ch == "_":
                j = i
                while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                self.items.append(("name", text[i:j], i))
                i = j
                continue
            if ch in "+-*/^()=":
                self.items.append((ch, ch, i))
                i += 1
                continue
            raise ParseError(f"unexpected character {ch!r}", i)

    def peek(self):
        if self.index < len(self.items):
            return self.items[self.index]
        return ("end", "", len(self.text))

    def next(self):
        tok = self.peek()
        self.index += 1
        return tok

    def expect(self, kind: str):
        tok = self.next()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}", tok[2])
        return tok


def _parse_unsigned_rational(toks: _Tokens) -> Fraction:
    tok = toks.expect("int")
    value = Fraction(int(tok[1]))
    if toks.peek()[0] == "/":
        toks.next()
        den = toks.expect("int")
        if int(den[1]) == 0:
            raise ParseError("zero denominator", den[2])
        value = value / int(den[1])
    return value


def _parse_exponent(toks: _Tokens, allow_negative: bool) -> int:
    toks.expect("^")
    sign = 1
    if toks.peek()[0] == "-":
        if not allow_negative:
            raise ParseError("negative exponent not allowed here", toks.peek()[2])
        toks.next()
        sign = -1
    tok = toks.expect("int")
    return sign * int(tok[1])


def poly_from_str(text: str, ring: Iterable[str]) -> MultiPoly:
    """Parse the canonical text form of a polynomial in the given ring."""
    ring = tuple(ring)
    toks = _Tokens(text)
    result = MultiPoly.zero(ring)
    sign = 1
    tok = toks.peek()
    if tok[0] in "+-":
        toks.next()
        sign = -1 if tok[0] == "-" else 1
    while True:
        coeff = Fraction(sign)
        exp = [0] * len(ring)
        saw_factor = False
        while True:
            tok = toks.peek()
            if tok[0] == "int":
                coeff *= _parse_unsigned_rational(toks)
                saw_factor = True
            elif tok[0] == "name":
                toks.next()
                if tok[1] not in ring:
                    raise ParseError(f"unknown variable {tok[1]!r}", tok[2])
                e = 1
                if toks.peek()[0] == "^":
                    e = _parse_exponent(toks, allow_negative=False)
                exp[ring.index(tok[1])] += e
                saw_factor = True
            else:
                raise ParseError(f"expected a term, found {tok[1]!r}", tok[2])
            if toks.peek()[0] == "*":
                toks.next()
                continue
            break
        if not saw_factor:
            raise ParseError("empty term", toks.peek()[2])
        result = result + MultiPoly.monomial(ring, tuple(exp), coeff)
        tok = toks.peek()
        if tok[0] == "end":
            return result
        if tok[0] in "+-":
            toks.next()
            sign = -1 if tok[0] == "-" else 1
            continue
        raise ParseError(f"expected '+' or '-', found {tok[1]!r}", tok[2])


def laurent_from_str(text: str, variable: str, center=0) -> LaurentPoly:
    """Parse a Laurent polynomial; exponents may be negative.

    The base symbol is either the bare variable (center 0) or the literal
    ``(variable - c)`` matching the given expansion point.
    """
    center = as_fraction(center)
    toks = _Tokens(text)
    terms: dict[int, Fraction] = {}
    sign = 1
    tok = toks.peek()
    if tok[0] in "+-":
        toks.next()
        sign = -1 if tok[0] == "-" else 1

    def parse_base(tok0) -> None:
        # consumes a variable or "(var - c)" token group; returns nothing
        if tok0[0] == "name":
            toks.next()
            if tok0[1] != variable:
                raise ParseError(f"unknown variable {tok0[1]!r}", tok0[2])
            if center != 0:
                raise ParseError(f"bare {variable!r} but expansion center is {center}", tok0[2])
            return
        toks.expect("(")
        name = toks.expect("name")
        if name[1] != variable:
            raise ParseError(f"unknown variable {name[1]!r}", name[2])
        op = toks.next()
        if op[0] not in "+-":
            raise ParseError("expected '+' or '-' inside shifted base", op[2])
        value = _parse_unsigned_rational(toks)
        stated = -value if op[0] == "+" else value
        if stated != center:
            raise ParseError(f"expansion point {stated} does not match {center}", op[2])
        toks.expect(")")

    while True:
        coeff = Fraction(sign)
        exponent = 0
        saw_factor = False
        while True:
            tok = toks.peek()
            if tok[0] == "int":
                coeff *= _parse_unsigned_rational(toks)
                saw_factor = True
            elif tok[0] in ("name", "("):
                parse_base(tok)
                e = 1
                if toks.peek()[0] == "^":
                    e = _parse_exponent(toks, allow_negative=True)
                exponent += e
                saw_factor = True
            else:
                raise ParseError(f"expected a term, found {tok[1]!r}", tok[2])
            if toks.peek()[0] == "*":
                toks.next()
                continue
            break
        if not saw_factor:
            raise ParseError("empty term", toks.peek()[2])
        terms[exponent] = terms.get(exponent, Fraction(0)) + coeff
        tok = toks.peek()
        if tok[0] == "end":
            return LaurentPoly(variable, terms, center)
        if tok[0] in "+-":
            toks.next()
            sign = -1 if tok[0] == "-" else 1
            continue
        raise ParseError(f"expected '+' or '-', found {tok[1]!r}", tok[2])
