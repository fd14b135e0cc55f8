"""Exact rational functions in the chart variables (x, y, u, p, q).

A :class:`RationalFn` is a reduced quotient of two polynomials with rational
coefficients. Polynomials are sparse and kept in graded-lexicographic order
with ``x < y < u < p < q``; the denominator is made monic with respect to
that order, so two values are equal as functions iff their canonical forms
are identical. Polynomial arithmetic and GCDs are delegated to FLINT.

The surface grammar used by :func:`parse` and produced by
:meth:`RationalFn.to_text`::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom (('^' | '**') exponent)?
    exponent := ['-'] INT | '(' ['-'] INT ')'
    atom   := NUMBER | x | y | u | p | q | '(' expr ')'
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence, Union

import flint

from .errors import ExprSyntaxError, PoleAtPoint, UnknownVariable, ZeroDenominator

VARIABLES: tuple[str, ...] = ("x", "y", "u", "p", "q")
NVARS = 5

# FLINT's deglex breaks ties on the first generator, so listing q first makes
# its leading term the grlex leading term for x < y < u < p < q.
_CTX = flint.fmpq_mpoly_ctx.get(tuple(reversed(VARIABLES)), "deglex")
_ZERO = _CTX.from_dict({})
_ONE = _CTX.from_dict({(0,) * NVARS: 1})

Number = Union[int, Fraction]
Scalar = Union["RationalFn", int, Fraction]


def var_index(v: int | str) -> int:
    if isinstance(v, str):
        try:
            return VARIABLES.index(v)
        except ValueError:
            raise UnknownVariable(f"unknown chart variable {v!r}") from None
    if not 0 <= v < NVARS:
        raise ValueError(f"variable index {v} out of range")
    return v


def _to_fmpq(c: Number) -> flint.fmpq:
    c = Fraction(c)
    return flint.fmpq(c.numerator, c.denominator)


def _from_fmpq(c) -> Fraction:
    return Fraction(int(c.p), int(c.q))


class Point5(NamedTuple):
    x: Fraction
    y: Fraction
    u: Fraction
    p: Fraction
    q: Fraction

    @classmethod
    def of(cls, *coords: Number | str) -> "Point5":
        if len(coords) == 1 and not isinstance(coords[0], (int, Fraction, str)):
            coords = tuple(coords[0])
        if len(coords) != NVARS:
            raise ValueError(f"a chart point has {NVARS} coordinates, got {len(coords)}")
        return cls(*(Fraction(c) for c in coords))

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self) + ")"


class RationalFn:
    """Immutable canonical quotient ``num/den`` of FLINT polynomials."""

    __slots__ = ("_num", "_den", "_hash")

    def __init__(self, value: Scalar | str = 0):
        if isinstance(value, RationalFn):
            num, den = value._num, value._den
        elif isinstance(value, str):
            parsed = parse(value)
            num, den = parsed._num, parsed._den
        else:
            num, den = _CTX.from_dict({(0,) * NVARS: _to_fmpq(value)}), _ONE
        self._num = num
        self._den = den
        self._hash = None

    # construction -------------------------------------------------------

    @classmethod
    def _raw(cls, num, den) -> "RationalFn":
        obj = cls.__new__(cls)
        obj._num = num
        obj._den = den
        obj._hash = None
        return obj

    @classmethod
    def _reduce(cls, num, den) -> "RationalFn":
        if den.is_zero():
            raise ZeroDenominator("denominator is identically zero")
        if num.is_zero():
            return cls._raw(_ZERO, _ONE)
        if not den.is_constant():
            g = num.gcd(den)
            if not g.is_constant():
                num = num / g
                den = den / g
        lc = den.leading_coefficient()
        if lc != 1:
            num = num / lc
            den = den / lc
        return cls._raw(num, den)

    @classmethod
    def constant(cls, c: Number) -> "RationalFn":
        return cls(c)

    @classmethod
    def variable(cls, v: int | str) -> "RationalFn":
        i = var_index(v)
        return cls._raw(_CTX.gens()[NVARS - 1 - i], _ONE)

    @classmethod
    def from_terms(cls, terms: dict[tuple[int, ...], Number]) -> "RationalFn":
        """Polynomial from ``{(ex, ey, eu, ep, eq): coeff}``."""
        data = {tuple(reversed(m)): _to_fmpq(c) for m, c in terms.items() if c}
        return cls._raw(_CTX.from_dict(data), _ONE)

    # structure ----------------------------------------------------------

    @property
    def numerator(self) -> "RationalFn":
        return RationalFn._raw(self._num, _ONE)

    @property
    def denominator(self) -> "RationalFn":
        return RationalFn._raw(self._den, _ONE)

    def is_zero(self) -> bool:
        return self._num.is_zero()

    def is_constant(self) -> bool:
        return self._num.is_constant() and self._den.is_constant()

    def is_polynomial(self) -> bool:
        return self._den.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        if self._num.is_zero():
            return Fraction(0)
        return _from_fmpq(self._num.leading_coefficient()) / _from_fmpq(self._den.leading_coefficient())

    @property
    def size(self) -> int:
        """Number of stored terms in numerator and denominator."""
        return len(self._num) + len(self._den)

    def total_degree(self) -> int:
        dn = self._num.total_degree() if not self._num.is_zero() else 0
        return max(dn, self._den.total_degree())

    def terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        """Numerator terms as ``((ex, ey, eu, ep, eq), coeff)`` in descending grlex order."""
        return [(tuple(reversed(m)), _from_fmpq(c)) for m, c in self._num.terms()]

    def depends_on(self, v: int | str) -> bool:
        name = VARIABLES[var_index(v)]
        return not (self._num.derivative(name).is_zero() and self._den.derivative(name).is_zero())

    # arithmetic ---------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "RationalFn | None":
        if isinstance(other, RationalFn):
            return other
        if isinstance(other, (int, Fraction)):
            return RationalFn(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o._num.is_zero():
            return self
        if self._num.is_zero():
            return o
        if self._den == o._den:
            return RationalFn._reduce(self._num + o._num, self._den)
        if self._den.is_constant() and o._den.is_constant():
            return RationalFn._reduce(self._num * o._den + o._num * self._den, self._den * o._den)
        g = self._den.gcd(o._den)
        if g.is_constant():
            return RationalFn._reduce(self._num * o._den + o._num * self._den, self._den * o._den)
        a = self._den / g
        b = o._den / g
        return RationalFn._reduce(self._num * b + o._num * a, a * o._den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFn._raw(-self._num, self._den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return RationalFn(0)
            return RationalFn._raw(self._num * _to_fmpq(other), self._den)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self._num.is_zero() or o._num.is_zero():
            return RationalFn(0)
        n1, d1, n2, d2 = self._num, self._den, o._num, o._den
        if not d2.is_constant():
            g = n1.gcd(d2)
            if not g.is_constant():
                n1, d2 = n1 / g, d2 / g
        if not d1.is_constant():
            g = n2.gcd(d1)
            if not g.is_constant():
                n2, d1 = n2 / g, d1 / g
        num, den = n1 * n2, d1 * d2
        lc = den.leading_coefficient()
        if lc != 1:
            num, den = num / lc, den / lc
        return RationalFn._raw(num, den)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFn":
        if self._num.is_zero():
            raise ZeroDenominator("division by an identically zero expression")
        return RationalFn._reduce(self._den, self._num)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDenominator("division by zero")
            return RationalFn._raw(self._num / _to_fmpq(other), self._den)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        return RationalFn._raw(self._num ** n, self._den ** n)

    def diff(self, v: int | str) -> "RationalFn":
        name = VARIABLES[var_index(v)]
        dn = self._num.derivative(name)
        if self._den.is_constant():
            return RationalFn._raw(dn, self._den)
        dd = self._den.derivative(name)
        if dd.is_zero():
            return RationalFn._reduce(dn, self._den)
        return RationalFn._reduce(dn * self._den - self._num * dd, self._den * self._den)

    # evaluation and substitution ----------------------------------------

    def evaluate(self, point: Sequence[Number]) -> Fraction:
        vals = [_to_fmpq(c) for c in reversed(tuple(point))]
        den = self._den(*vals)
        if den == 0:
            raise PoleAtPoint(f"denominator vanishes at {tuple(str(Fraction(c)) for c in point)}")
        return _from_fmpq(self._num(*vals)) / _from_fmpq(den)

    def compose(self, images: Sequence["RationalFn"]) -> "RationalFn":
        """Substitute ``images[i]`` for the i-th chart variable."""
        images = [RationalFn(g) for g in images]
        if all(g.is_polynomial() for g in images):
            polys = [g._num / g._den.leading_coefficient() for g in reversed(images)]
            return RationalFn._reduce(self._num.compose(*polys), self._den.compose(*polys))
        return _compose_poly(self._num, images) / _compose_poly(self._den, images)

    # comparison and output ----------------------------------------------

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._num == o._num and self._den == o._den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((str(self._num), str(self._den)))
        return self._hash

    def __bool__(self):
        return not self._num.is_zero()

    def to_text(self) -> str:
        num = _poly_text(self._num)
        if self._den.is_one():
            return num
        return f"({num})/({_poly_text(self._den)})"

    def to_latex(self) -> str:
        num = _poly_latex(self._num)
        if self._den.is_one():
            return num
        return r"\frac{%s}{%s}" % (num, _poly_latex(self._den))

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"RationalFn({self.to_text()!r})"

    def __reduce__(self):
        return (parse, (self.to_text(),))


def _compose_poly(poly, images: list[RationalFn]) -> RationalFn:
    powers: dict[tuple[int, int], RationalFn] = {}

    def power(i: int, e: int) -> RationalFn:
        key = (i, e)
        if key not in powers:
            powers[key] = images[i] ** e
        return powers[key]

    total = RationalFn(0)
    for mono, c in poly.terms():
        term = RationalFn(_from_fmpq(c))
        for i, e in enumerate(reversed(mono)):
            if e:
                term = term * power(i, int(e))
        total = total + term
    return total


def _poly_text(poly) -> str:
    if poly.is_zero():
        return "0"
    out = []
    for k, (mono, c) in enumerate(poly.terms()):
        c = _from_fmpq(c)
        factors = []
        for name, e in zip(VARIABLES, reversed(mono)):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{int(e)}")
        a = abs(c)
        if not factors:
            body = str(a)
        elif a == 1:
            body = "*".join(factors)
        else:
            body = str(a) + "*" + "*".join(factors)
        if k == 0:
            out.append("-" + body if c < 0 else body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


def _poly_latex(poly) -> str:
    if poly.is_zero():
        return "0"
    out = []
    for k, (mono, c) in enumerate(poly.terms()):
        c = _from_fmpq(c)
        sign = "-" if c < 0 else "+"
        c = abs(c)
        factors = []
        for name, e in zip(VARIABLES, reversed(mono)):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{{{e}}}")
        mono_tex = " ".join(factors)
        if c == 1 and mono_tex:
            coeff = ""
        elif c.denominator == 1:
            coeff = str(c.numerator)
        else:
            coeff = r"\frac{%d}{%d}" % (c.numerator, c.denominator)
        body = f"{coeff} {mono_tex}".strip()
        if k == 0:
            out.append(("-" if sign == "-" else "") + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


def as_rational(value: Scalar | str) -> RationalFn:
    if isinstance(value, RationalFn):
        return value
    return RationalFn(value)


# parsing -------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = list(self._tokenize(text))
        self.i = 0

    def _tokenize(self, text: str):
        i, n = 0, len(text)
        while i < n:
            ch = text[i]
            if ch.isspace():
                i += 1
            elif ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
                j = i
                while j < n and text[j].isdigit():
                    j += 1
                if j < n and text[j] == ".":
                    j += 1
                    while j < n and text[j].isdigit():
                        j += 1
                yield ("num", text[i:j], i)
                i = j
            elif ch.isalpha() or ch == "_":
                j = i
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                yield ("id", text[i:j], i)
                i = j
            elif text.startswith("**", i):
                yield ("op", "^", i)
                i += 2
            elif ch in "+-*/^()":
                yield ("op", ch, i)
                i += 1
            else:
                raise ExprSyntaxError(f"unexpected character {ch!r}", text, i)
        yield ("end", "", n)

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, pos = self.take()
        if text != value or kind != "op":
            raise ExprSyntaxError(f"expected {value!r}", self.text, pos)

    def parse(self) -> RationalFn:
        kind, _, pos = self.peek()
        if kind == "end":
            raise ExprSyntaxError("empty expression", self.text, pos)
        value = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {text!r}", self.text, pos)
        return value

    def expr(self) -> RationalFn:
        value = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> RationalFn:
        value = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            _, op, pos = self.take()
            rhs = self.unary()
            if op == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    raise ZeroDenominator(f"division by an identically zero expression at column {pos + 1}")
                value = value / rhs
        return value

    def unary(self) -> RationalFn:
        kind, text, _ = self.peek()
        if kind == "op" and text in ("-", "+"):
            self.take()
            value = self.unary()
            return -value if text == "-" else value
        return self.power()

    def power(self) -> RationalFn:
        base = self.atom()
        kind, text, pos = self.peek()
        if kind == "op" and text == "^":
            self.take()
            exponent = self.exponent()
            if exponent < 0 and base.is_zero():
                raise ZeroDenominator(f"negative power of zero at column {pos + 1}")
            base = base ** exponent
            kind, text, pos = self.peek()
            if kind == "op" and text == "^":
                raise ExprSyntaxError("chained exponents need parentheses", self.text, pos)
        return base

    def exponent(self) -> int:
        kind, text, pos = self.peek()
        paren = kind == "op" and text == "("
        if paren:
            self.take()
        sign = 1
        kind, text, pos = self.peek()
        if kind == "op" and text == "-":
            self.take()
            sign = -1
        kind, text, pos = self.take()
        if kind != "num" or not text.isdigit():
            raise ExprSyntaxError("exponent must be an integer", self.text, pos)
        if paren:
            self.expect(")")
        return sign * int(text)

    def atom(self) -> RationalFn:
        kind, text, pos = self.take()
        if kind == "num":
            return RationalFn(Fraction(text))
        if kind == "id":
            if text not in VARIABLES:
                raise UnknownVariable(f"unknown identifier {text!r}", self.text, pos)
            return RationalFn.variable(text)
        if kind == "op" and text == "(":
            value = self.expr()
            self.expect(")")
            return value
        if kind == "end":
            raise ExprSyntaxError("unexpected end of input", self.text, pos)
        raise ExprSyntaxError(f"unexpected {text!r}", self.text, pos)


def parse(text: str) -> RationalFn:
    """Parse an expression in the chart grammar into canonical form."""
    return _Parser(text).parse()


def diff(f: Scalar, v: int | str) -> RationalFn:
    return as_rational(f).diff(v)


def evaluate(f: Scalar, point: Sequence[Number]) -> Fraction:
    return as_rational(f).evaluate(point)


# zero testing --------------------------------------------------------------

SZ_SAMPLE_SIZE = 2 * 10**6


def random_point(rng: random.Random, size: int = SZ_SAMPLE_SIZE) -> Point5:
    """Uniform point with integer coordinates in ``[-size/2, size/2)``."""
    half = size // 2
    return Point5.of(*(rng.randrange(-half, half) for _ in range(NVARS)))


def schwartz_zippel_bound(degree: int, trials: int, size: int = SZ_SAMPLE_SIZE) -> float:
    """Upper bound on the probability that a nonzero polynomial passes all trials."""
    return (min(degree, size) / size) ** trials


def probably_zero(f: RationalFn, *, seed: int, trials: int = 3) -> bool:
    """Randomized evaluation check. ``False`` is certain; ``True`` is only probable."""
    rng = random.Random(seed)
    num = f.numerator
    for _ in range(trials):
        if num.evaluate(random_point(rng)) != 0:
            return False
    return True


def is_zero(f: Scalar, *, seed: int | None = None, trials: int = 2) -> bool:
    """Exact zero test.

    With a seed, a randomized pre-check runs first and may answer ``False``
    early. A ``True`` answer always comes from the canonical numerator.
    """
    f = as_rational(f)
    if seed is not None and not probably_zero(f, seed=seed, trials=trials):
        return False
    return f.is_zero()


def all_zero(values: Iterable[Scalar]) -> bool:
    return all(as_rational(v).is_zero() for v in values)


X, Y, U, P, Q = (RationalFn.variable(v) for v in VARIABLES)
