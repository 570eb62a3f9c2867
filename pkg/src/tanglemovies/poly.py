"""Exact sparse Laurent polynomials in the two variables v, z.

Two coefficient domains are provided:

* :class:`LaurentPoly` — coefficients are exact rationals (integers in all
  published values; halves occur transiently in single cusp-move
  contributions, and they cancel in every closed loop).
* :class:`Poly2` — coefficients in the two-element field, used by the
  Kauffman-variant evaluations.

Values are immutable; all operations return new objects.  The canonical text
form of a polynomial is its terms ``c*v^a*z^b`` joined by `` + ``, sorted
lexicographically by the exponent pair ``(a, b)``, with ``c`` a signed decimal
integer (or ``p/q`` for the transient non-integral case).  The empty
polynomial prints as ``0``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, Iterator, Mapping, Tuple, Union

Exponent = Tuple[int, int]
Scalar = Union[int, Fraction]

_TERM_RE = re.compile(
    r"""^(?P<c>[+-]?\d+(?:/\d+)?)\*v\^(?P<a>[+-]?\d+)\*z\^(?P<b>[+-]?\d+)$"""
)


def _as_scalar(c: Scalar) -> Scalar:
    """Normalize a rational coefficient: integral Fractions become ints."""
    if isinstance(c, Fraction):
        if c.denominator == 1:
            return int(c)
        return c
    return c


class LaurentPoly:
    """A sparse Laurent polynomial in v and z with exact coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Exponent, Scalar] = ()):
        clean: Dict[Exponent, Scalar] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for (a, b), c in items:
            c = _as_scalar(c)
            if c:
                key = (int(a), int(b))
                c0 = clean.get(key, 0) + c
                c0 = _as_scalar(c0)
                if c0:
                    clean[key] = c0
                elif key in clean:
                    del clean[key]
        self._terms = clean

    # -- constructors -----------------------------------------------------

    @staticmethod
    def zero() -> "LaurentPoly":
        return _ZERO

    @staticmethod
    def one() -> "LaurentPoly":
        return _ONE

    @staticmethod
    def monomial(c: Scalar, a: int = 0, b: int = 0) -> "LaurentPoly":
        return LaurentPoly({(a, b): c})

    @staticmethod
    def integer(c: Scalar) -> "LaurentPoly":
        return LaurentPoly({(0, 0): c})

    # -- inspection --------------------------------------------------------

    @property
    def terms(self) -> Mapping[Exponent, Scalar]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, a: int, b: int) -> Scalar:
        return self._terms.get((a, b), 0)

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self._terms.values())

    def key(self) -> Tuple[Tuple[int, int, Scalar], ...]:
        """A hashable canonical key (exponents sorted)."""
        return tuple((a, b, c) for (a, b), c in sorted(self._terms.items()))

    # -- ring operations ---------------------------------------------------

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if not self._terms:
            return other
        if not other._terms:
            return self
        out = dict(self._terms)
        for e, c in other._terms.items():
            c0 = _as_scalar(out.get(e, 0) + c)
            if c0:
                out[e] = c0
            elif e in out:
                del out[e]
        res = LaurentPoly.__new__(LaurentPoly)
        res._terms = out
        return res

    def __neg__(self) -> "LaurentPoly":
        res = LaurentPoly.__new__(LaurentPoly)
        res._terms = {e: -c for e, c in self._terms.items()}
        return res

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other: Union["LaurentPoly", Scalar]) -> "LaurentPoly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        out: Dict[Exponent, Scalar] = {}
        for (a1, b1), c1 in self._terms.items():
            for (a2, b2), c2 in other._terms.items():
                e = (a1 + a2, b1 + b2)
                c0 = _as_scalar(out.get(e, 0) + c1 * c2)
                if c0:
                    out[e] = c0
                elif e in out:
                    del out[e]
        res = LaurentPoly.__new__(LaurentPoly)
        res._terms = out
        return res

    def __rmul__(self, other: Scalar) -> "LaurentPoly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c: Scalar) -> "LaurentPoly":
        c = _as_scalar(c)
        if not c:
            return _ZERO
        res = LaurentPoly.__new__(LaurentPoly)
        res._terms = {e: _as_scalar(k * c) for e, k in self._terms.items()}
        return res

    def shift(self, a: int, b: int = 0) -> "LaurentPoly":
        """Multiply by the monomial v^a z^b."""
        res = LaurentPoly.__new__(LaurentPoly)
        res._terms = {(x + a, y + b): c for (x, y), c in self._terms.items()}
        return res

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            raise ValueError("negative powers of general polynomials are not defined")
        out = _ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- comparison / hashing ------------------------------------------------

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LaurentPoly) and self._terms == other._terms

    def __hash__(self) -> int:
        return hash(self.key())

    def __bool__(self) -> bool:
        return bool(self._terms)

    # -- text form -----------------------------------------------------------

    def serialize(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (a, b) in sorted(self._terms):
            c = self._terms[(a, b)]
            parts.append(f"{c}*v^{a}*z^{b}")
        return " + ".join(parts)

    __str__ = serialize

    def __repr__(self) -> str:
        return f"LaurentPoly({self.serialize()!r})"

    @staticmethod
    def parse(text: str) -> "LaurentPoly":
        text = text.strip()
        if text == "0" or not text:
            return _ZERO
        terms: Dict[Exponent, Scalar] = {}
        compact = "".join(text.split())
        for raw in _split_terms(compact):
            m = _TERM_RE.match(raw)
            if not m:
                raise ValueError(f"unparseable polynomial term: {raw!r}")
            cs = m.group("c")
            c: Scalar = Fraction(cs) if "/" in cs else int(cs)
            e = (int(m.group("a")), int(m.group("b")))
            terms[e] = _as_scalar(terms.get(e, 0) + c)
        return LaurentPoly(terms)


def _split_terms(compact: str) -> Iterator[str]:
    """Split a whitespace-free polynomial string at additive term boundaries.

    A '+' or '-' separates terms only when it directly follows a digit (signs
    inside exponents follow '^'; a leading sign belongs to the first term).
    """
    start = 0
    for i in range(1, len(compact)):
        if compact[i] == "+" and compact[i - 1].isdigit():
            yield compact[start:i]
            start = i + 1
        elif compact[i] == "-" and compact[i - 1].isdigit():
            yield compact[start:i]
            start = i
    yield compact[start:]


_ZERO = LaurentPoly()
_ONE = LaurentPoly({(0, 0): 1})


def delta() -> LaurentPoly:
    """The value of a split trivial two-component piece: (v - v^-1)/z."""
    return LaurentPoly({(1, -1): 1, (-1, -1): -1})


DELTA = delta()
V = LaurentPoly({(1, 0): 1})
Z = LaurentPoly({(0, 1): 1})
ONE = _ONE
ZERO = _ZERO


def v_power(n: int) -> LaurentPoly:
    return LaurentPoly({(n, 0): 1})


class Poly2:
    """A sparse Laurent polynomial in v, z with coefficients mod 2.

    Stored as the frozenset of exponent pairs with coefficient 1.
    """

    __slots__ = ("_support",)

    def __init__(self, support: Iterable[Exponent] = ()):
        seen: Dict[Exponent, int] = {}
        for e in support:
            e = (int(e[0]), int(e[1]))
            seen[e] = seen.get(e, 0) ^ 1
        self._support = frozenset(e for e, bit in seen.items() if bit)

    @staticmethod
    def zero() -> "Poly2":
        return _ZERO2

    @staticmethod
    def one() -> "Poly2":
        return _ONE2

    @staticmethod
    def monomial(a: int = 0, b: int = 0) -> "Poly2":
        return Poly2([(a, b)])

    @staticmethod
    def from_laurent(p: LaurentPoly) -> "Poly2":
        support = []
        for e, c in p.terms.items():
            if not isinstance(c, int):
                raise ValueError("cannot reduce a non-integral coefficient mod 2")
            if c % 2:
                support.append(e)
        return Poly2(support)

    @property
    def support(self) -> FrozenSet[Exponent]:
        return self._support

    def is_zero(self) -> bool:
        return not self._support

    def __add__(self, other: "Poly2") -> "Poly2":
        if not isinstance(other, Poly2):
            return NotImplemented
        res = Poly2.__new__(Poly2)
        res._support = self._support ^ other._support
        return res

    __sub__ = __add__

    def __neg__(self) -> "Poly2":
        return self

    def __mul__(self, other: "Poly2") -> "Poly2":
        if not isinstance(other, Poly2):
            return NotImplemented
        acc: Dict[Exponent, int] = {}
        for (a1, b1) in self._support:
            for (a2, b2) in other._support:
                e = (a1 + a2, b1 + b2)
                acc[e] = acc.get(e, 0) ^ 1
        res = Poly2.__new__(Poly2)
        res._support = frozenset(e for e, bit in acc.items() if bit)
        return res

    def shift(self, a: int, b: int = 0) -> "Poly2":
        res = Poly2.__new__(Poly2)
        res._support = frozenset((x + a, y + b) for (x, y) in self._support)
        return res

    def __pow__(self, n: int) -> "Poly2":
        out = _ONE2
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Poly2) and self._support == other._support

    def __hash__(self) -> int:
        return hash(self._support)

    def __bool__(self) -> bool:
        return bool(self._support)

    def key(self) -> Tuple[Exponent, ...]:
        return tuple(sorted(self._support))

    def serialize(self) -> str:
        if not self._support:
            return "0"
        return " + ".join(f"1*v^{a}*z^{b}" for (a, b) in sorted(self._support))

    __str__ = serialize

    def __repr__(self) -> str:
        return f"Poly2({self.serialize()!r})"

    @staticmethod
    def parse(text: str) -> "Poly2":
        p = LaurentPoly.parse(text)
        return Poly2.from_laurent(p)


_ZERO2 = Poly2()
_ONE2 = Poly2([(0, 0)])


def delta_mod2() -> Poly2:
    """The mod-2 split-circle factor: (v + v^-1)/z + 1."""
    return Poly2([(1, -1), (-1, -1), (0, 0)])


DELTA2 = delta_mod2()
