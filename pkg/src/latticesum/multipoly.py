"""Sparse multivariate polynomials over Fraction, plus the text parser.

Monomials are exponent tuples; the zero polynomial is the empty dict.
Used for input polynomials p(x1..xn) and for the exact dilation
polynomial I(h1..hd).
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import ParseError


class MultiPoly:
    """Polynomial in ``nvars`` variables with Fraction coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        self.terms = {}
        if terms:
            for exp, c in terms.items():
                c = Fraction(c)
                if c != 0:
                    self.terms[tuple(exp)] = self.terms.get(tuple(exp), Fraction(0)) + c
            self.terms = {e: c for e, c in self.terms.items() if c != 0}

    @classmethod
    def constant(cls, nvars: int, c) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: Fraction(c)})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "MultiPoly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): Fraction(1)})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return (
            isinstance(other, MultiPoly)
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return MultiPoly(self.nvars, out)

    def __neg__(self):
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return MultiPoly(self.nvars, {e: c * other for e, c in self.terms.items()})
        if other.nvars != self.nvars:
            raise ValueError("variable count mismatch")
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return MultiPoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = MultiPoly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def _coerce(self, other):
        if isinstance(other, (int, Fraction)):
            return MultiPoly.constant(self.nvars, other)
        return other

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=0)

    def coefficient(self, exponents) -> Fraction:
        return self.terms.get(tuple(exponents), Fraction(0))

    def evaluate(self, point):
        """Exact evaluation at a point of Fractions (or floats)."""
        total = 0
        for e, c in self.terms.items():
            term = c
            for x, k in zip(point, e):
                if k:
                    term *= x ** k
            total += term
        return total

    def substitute(self, images: list) -> "MultiPoly":
        """Compose: replace variable i by the polynomial images[i].

        All images must share a common variable space.
        """
        nv = images[0].nvars
        powers = [{0: MultiPoly.constant(nv, 1)} for _ in range(self.nvars)]

        def pow_of(i, k):
            cache = powers[i]
            if k not in cache:
                cache[k] = pow_of(i, k - 1) * images[i]
            return cache[k]

        total = MultiPoly(nv)
        for e, c in self.terms.items():
            term = MultiPoly.constant(nv, c)
            for i, k in enumerate(e):
                if k:
                    term = term * pow_of(i, k)
            total = total + term
        return total

    def __repr__(self):
        if not self.terms:
            return "MultiPoly(0)"
        bits = []
        for e, c in sorted(self.terms.items()):
            mono = "*".join(
                f"x{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k
            )
            bits.append(f"{c}" + (f"*{mono}" if mono else ""))
        return "MultiPoly(" + " + ".join(bits) + ")"


_TOKEN = re.compile(r"\s*([+-]|\d+/\d+|\d+|x\d+|\^|\*)")


def parse_polynomial(text: str, nvars: int) -> MultiPoly:
    """Parse the grammar: sum of terms ``c*x1^a1*...*xn^an``.

    Coefficients may be integers or rationals ``p/q``; factors may appear
    in any order; a bare coefficient or a bare monomial is a valid term.
    """
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ParseError(f"bad character at {pos!r} in polynomial: {text[pos:]!r}")
            break
        tokens.append(m.group(1))
        pos = m.end()
    if not tokens:
        raise ParseError("empty polynomial")

    poly = MultiPoly(nvars)
    i = 0
    while i < len(tokens):
        sign = Fraction(1)
        while i < len(tokens) and tokens[i] in "+-":
            if tokens[i] == "-":
                sign = -sign
            i += 1
        if i >= len(tokens):
            raise ParseError("dangling sign in polynomial")
        coeff = sign
        exps = [0] * nvars
        expect_factor = True
        while i < len(tokens):
            tok = tokens[i]
            if tok in "+-" and not expect_factor:
                break
            if tok == "*":
                expect_factor = True
                i += 1
                continue
            if not expect_factor:
                raise ParseError(f"missing '*' before {tok!r}")
            if tok.startswith("x"):
                idx = int(tok[1:]) - 1
                if not 0 <= idx < nvars:
                    raise ParseError(f"variable {tok} out of range for dimension {nvars}")
                power = 1
                if i + 1 < len(tokens) and tokens[i + 1] == "^":
                    if i + 2 >= len(tokens) or not tokens[i + 2].isdigit():
                        raise ParseError("bad exponent")
                    power = int(tokens[i + 2])
                    i += 2
                exps[idx] += power
            else:
                coeff *= Fraction(tok)
            expect_factor = False
            i += 1
        if expect_factor:
            raise ParseError("trailing operator in polynomial")
        poly = poly + MultiPoly(nvars, {tuple(exps): coeff})
    return poly


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"
