"""Exact truncated Taylor jets in the five chart variables.

A :class:`Jet` stores the Taylor coefficients of a scalar about a fixed
rational point up to some total degree. Coefficients are exact ``gmpy2.mpq``
values kept in numpy object arrays, so arithmetic is vectorised without ever
leaving the rationals.

Jets implement the same small interface as
:class:`~pmainv.symbolic.RationalFn` (ring operations, ``diff``,
``is_zero``), which lets the calculus and invariant code run pointwise when
the symbolic expressions would be far too large. Each ``diff`` lowers the
order by one, and the value at the point stays exact as long as the order
is nonnegative.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import gmpy2
import numpy as np

from .errors import PoleAtPoint
from .symbolic import NVARS, RationalFn, as_rational

mpq = gmpy2.mpq


def _monomials(degree: int) -> list[tuple[int, ...]]:
    """Exponent tuples of one total degree, in a fixed order."""
    out = []
    for combo in itertools.combinations_with_replacement(range(NVARS), degree):
        e = [0] * NVARS
        for v in combo:
            e[v] += 1
        out.append(tuple(e))
    return out


class _Tables:
    """Index tables for jets up to order K in a graded monomial order.

    The order is graded, so the monomials of degree <= k form a prefix of
    length ``n_le[k]`` regardless of K.
    """

    def __init__(self, K: int):
        self.K = K
        monos: list[tuple[int, ...]] = []
        self.n_le = []
        for d in range(K + 1):
            monos.extend(_monomials(d))
            self.n_le.append(len(monos))
        self.monos = monos
        self.index = {m: i for i, m in enumerate(monos)}
        self.deg = [sum(m) for m in monos]
        # shift[i][j] = index of monos[i] + monos[j] for j < n_le[K - deg i]
        self.shift = []
        for i, m in enumerate(monos):
            lim = self.n_le[K - self.deg[i]]
            self.shift.append(
                np.array([self.index[tuple(a + b for a, b in zip(m, monos[j]))] for j in range(lim)], dtype=np.intp)
            )
        # d/dx_v: out[i] = (m_v + 1) * a[index(m + e_v)] for deg m <= K-1
        self.dsrc = []
        self.dfac = []
        n = self.n_le[K - 1] if K >= 1 else 0
        for v in range(NVARS):
            src = np.empty(n, dtype=np.intp)
            fac = np.empty(n, dtype=object)
            for i in range(n):
                m = list(monos[i])
                m[v] += 1
                src[i] = self.index[tuple(m)]
                fac[i] = m[v]
            self.dsrc.append(src)
            self.dfac.append(fac)
        self.unit = [self.index[tuple(1 if k == v else 0 for k in range(NVARS))] if K >= 1 else None for v in range(NVARS)]


@lru_cache(maxsize=None)
def tables(K: int) -> _Tables:
    return _Tables(K)


def _zeros(n: int) -> np.ndarray:
    out = np.empty(n, dtype=object)
    out[:] = mpq(0)
    return out


def _mpq(c) -> "gmpy2.mpq":
    if isinstance(c, Fraction):
        return mpq(c.numerator, c.denominator)
    if isinstance(c, int):
        return mpq(c)
    return mpq(c)


class Jet:
    __slots__ = ("a", "order", "point", "T")

    def __init__(self, coeffs: np.ndarray, order: int, point: tuple, T: _Tables):
        self.a = coeffs
        self.order = order
        self.point = point
        self.T = T

    # construction ---------------------------------------------------------

    @classmethod
    def constant(cls, c, point: Sequence, order: int) -> "Jet":
        T = tables(max(order, 0))
        a = _zeros(T.n_le[order]) if order >= 0 else _zeros(0)
        if order >= 0:
            a[0] = _mpq(c)
        return cls(a, order, tuple(point), T)

    @classmethod
    def from_rational(cls, f, point: Sequence, order: int) -> "Jet":
        """Taylor jet of a rational function about ``point``."""
        f = as_rational(f)
        point = tuple(Fraction(c) for c in point)
        if f.is_constant():
            return cls.constant(f.constant_value(), point, order)
        num = _poly_jet(f._num, point, order)
        if f.is_polynomial():
            return num
        den = _poly_jet(f._den, point, order)
        if den.a[0] == 0:
            raise PoleAtPoint(f"{f.to_text()} has a pole at {tuple(str(c) for c in point)}")
        return num / den

    @classmethod
    def variable(cls, v: int, point: Sequence, order: int) -> "Jet":
        j = cls.constant(Fraction(point[v]), point, order)
        if order >= 1:
            j.a[j.T.unit[v]] = mpq(1)
        return j

    def _like(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        if isinstance(other, RationalFn):
            return Jet.from_rational(other, self.point, self.order)
        return None

    # structure ------------------------------------------------------------

    def _n(self, k: int | None = None) -> int:
        k = self.order if k is None else k
        return self.T.n_le[k] if k >= 0 else 0

    def value(self) -> Fraction:
        if self.order < 0:
            raise ValueError("jet has no remaining exact value (order < 0)")
        c = self.a[0]
        return Fraction(int(c.numerator), int(c.denominator))

    def gradient(self) -> list[Fraction]:
        if self.order < 1:
            raise ValueError("jet order too low for a gradient")
        out = []
        for v in range(NVARS):
            c = self.a[self.T.unit[v]]
            out.append(Fraction(int(c.numerator), int(c.denominator)))
        return out

    def coefficient(self, exponents: Sequence[int]) -> Fraction:
        i = self.T.index[tuple(exponents)]
        if i >= self._n():
            raise ValueError("coefficient beyond the jet order")
        c = self.a[i]
        return Fraction(int(c.numerator), int(c.denominator))

    def is_zero(self) -> bool:
        """True when every retained coefficient vanishes.

        This says nothing about the truncated tail; callers use it only at
        orders high enough for the identity being checked.
        """
        return not any(c != 0 for c in self.a[: self._n()])

    def is_constant(self) -> bool:
        return not any(c != 0 for c in self.a[1 : self._n()])

    def truncate(self, order: int) -> "Jet":
        order = min(order, self.order)
        return Jet(self.a[: self._n(order)].copy(), order, self.point, self.T)

    @property
    def size(self) -> int:
        return self._n()

    # arithmetic -----------------------------------------------------------

    def _common(self, other: "Jet"):
        k = min(self.order, other.order)
        T = self.T if self.T.K >= other.T.K else other.T
        return k, T

    def __add__(self, other):
        o = self._like(other)
        if o is None:
            a = self.a.copy()
            if self.order >= 0:
                a[0] = a[0] + _mpq(other)
            return Jet(a, self.order, self.point, self.T)
        k, T = self._common(o)
        n = T.n_le[k] if k >= 0 else 0
        return Jet(self.a[:n] + o.a[:n], k, self.point, T)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.a, self.order, self.point, self.T)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._like(other)
        if o is None:
            return Jet(self.a * _mpq(other), self.order, self.point, self.T)
        k, T = self._common(o)
        if k < 0:
            return Jet(_zeros(0), k, self.point, T)
        return Jet(_mul(self.a, o.a, k, T), k, self.point, T)

    __rmul__ = __mul__

    def inverse(self) -> "Jet":
        if self.order < 0:
            return self
        b0 = self.a[0]
        if b0 == 0:
            raise PoleAtPoint("division by a jet vanishing at the base point")
        return Jet(_inverse(self.a, self.order, self.T), self.order, self.point, self.T)

    def __truediv__(self, other):
        o = self._like(other)
        if o is None:
            c = _mpq(other)
            if c == 0:
                raise ZeroDivisionError("jet divided by zero")
            return Jet(self.a / c, self.order, self.point, self.T)
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = Jet.constant(1, self.point, self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def diff(self, v: int) -> "Jet":
        k = self.order - 1
        if k < 0:
            return Jet(_zeros(0), k, self.point, self.T)
        n = self.T.n_le[k]
        T = self.T
        return Jet(T.dfac[v][:n] * self.a[T.dsrc[v][:n]], k, self.point, T)

    def __repr__(self):
        try:
            v = self.value()
        except ValueError:
            v = "?"
        return f"Jet(value={v}, order={self.order})"

    def to_text(self) -> str:
        return str(self.value())

    to_latex = to_text


def _mul(a: np.ndarray, b: np.ndarray, k: int, T: _Tables) -> np.ndarray:
    n = T.n_le[k]
    a = a[:n]
    b = b[:n]
    nza = np.flatnonzero(a)
    nzb = np.flatnonzero(b)
    if len(nza) > len(nzb):
        a, b, nza = b, a, nzb
    out = _zeros(n)
    for i in nza:
        m = T.n_le[k - T.deg[i]]
        out[T.shift[i][:m]] += a[i] * b[:m]
    return out


def _inverse(b: np.ndarray, k: int, T: _Tables) -> np.ndarray:
    """Newton iteration y <- y (2 - b y), doubling the valid order each step."""
    y = _zeros(1)
    y[0] = 1 / b[0]
    cur = 0
    while cur < k:
        t = min(2 * cur + 1, k)
        n = T.n_le[t]
        yp = _zeros(n)
        yp[: len(y)] = y
        e = -_mul(b, yp, t, T)
        e[0] = e[0] + 2
        y = _mul(yp, e, t, T)
        cur = t
    return y


def _poly_jet(poly, point: tuple, order: int) -> Jet:
    """Jet of a flint polynomial (reversed variable order) about ``point``."""
    T = tables(max(order, 0))
    a = _zeros(T.n_le[order]) if order >= 0 else _zeros(0)
    if order < 0:
        return Jet(a, order, point, T)
    ctx = poly.context()
    gens = ctx.gens()
    # ctx position j holds chart variable NVARS-1-j
    shifted = poly.compose(*[gens[j] + _to_fmpq(point[NVARS - 1 - j]) for j in range(NVARS)])
    for exps, c in zip(shifted.monoms(), shifted.coeffs()):
        e = tuple(int(exps[NVARS - 1 - i]) for i in range(NVARS))
        if sum(e) > order:
            continue
        a[T.index[e]] = mpq(int(c.p), int(c.q))
    return Jet(a, order, point, T)


def _to_fmpq(c: Fraction):
    import flint

    return flint.fmpq(c.numerator, c.denominator)


def jet_field(X, point: Sequence, order: int):
    """Componentwise jets of a vector field or 1-form with RationalFn entries."""
    return X.map(lambda c: Jet.from_rational(c, point, order))


# jets over a prime field ---------------------------------------------------

DEFAULT_PRIME = 134217689  # largest prime below 2^27; 162 * p^2 fits in int64


@lru_cache(maxsize=None)
def _pairs(K: int):
    """All (i, j) with deg i + deg j <= K, sorted by the index of monos[i] + monos[j].

    Because the monomial order is graded, the pairs feeding targets of
    degree <= k form a prefix; ``ends[k]`` is its length and ``starts`` the
    first pair of each target.
    """
    T = tables(K)
    I, J, tgt = [], [], []
    for i in range(len(T.monos)):
        s = T.shift[i]
        I.extend([i] * len(s))
        J.extend(range(len(s)))
        tgt.extend(s.tolist())
    order = np.argsort(np.asarray(tgt), kind="stable")
    I = np.asarray(I, dtype=np.intp)[order]
    J = np.asarray(J, dtype=np.intp)[order]
    tgt = np.asarray(tgt, dtype=np.intp)[order]
    starts = np.searchsorted(tgt, np.arange(len(T.monos)), side="left")
    ends = [int(np.searchsorted(tgt, T.n_le[k], side="left")) for k in range(K + 1)]
    return I, J, starts, ends


def _to_mod(c, p: int) -> int:
    c = Fraction(c)
    den = c.denominator % p
    if den == 0:
        raise PoleAtPoint(f"denominator of {c} vanishes modulo {p}")
    return (c.numerator % p) * pow(den, p - 2, p) % p


class ModJet:
    """Truncated Taylor jet with coefficients in GF(p).

    Same interface as :class:`Jet`; values are residues. A nonzero residue
    certifies a nonzero rational value, which is how these jets are used.
    """

    __slots__ = ("a", "order", "point", "T", "p")

    def __init__(self, coeffs: np.ndarray, order: int, point: tuple, T: _Tables, p: int):
        self.a = coeffs
        self.order = order
        self.point = point
        self.T = T
        self.p = p

    @classmethod
    def constant(cls, c, point: Sequence, order: int, p: int = DEFAULT_PRIME) -> "ModJet":
        T = tables(max(order, 0))
        a = np.zeros(T.n_le[order] if order >= 0 else 0, dtype=np.int64)
        if order >= 0:
            a[0] = _to_mod(c, p)
        return cls(a, order, tuple(point), T, p)

    @classmethod
    def from_rational(cls, f, point: Sequence, order: int, p: int = DEFAULT_PRIME) -> "ModJet":
        f = as_rational(f)
        point = tuple(Fraction(c) for c in point)
        if f.is_constant():
            return cls.constant(f.constant_value(), point, order, p)
        num = cls._from_poly(f._num, point, order, p)
        if f.is_polynomial():
            return num
        den = cls._from_poly(f._den, point, order, p)
        if den.a[0] == 0:
            raise PoleAtPoint(f"{f.to_text()} has a pole at the point modulo {p}")
        return num / den

    @classmethod
    def _from_poly(cls, poly, point: tuple, order: int, p: int) -> "ModJet":
        q = _poly_jet(poly, point, order)
        inverses: dict[int, int] = {1: 1}
        vals = np.empty(len(q.a), dtype=np.int64)
        for i, c in enumerate(q.a):
            d = int(c.denominator)
            inv = inverses.get(d)
            if inv is None:
                if d % p == 0:
                    raise PoleAtPoint(f"denominator {d} vanishes modulo {p}")
                inv = inverses[d] = pow(d, p - 2, p)
            vals[i] = int(c.numerator) % p * inv % p
        return cls(vals, order, point, q.T, p)

    def _wrap(self, a, order=None, T=None) -> "ModJet":
        return ModJet(a, self.order if order is None else order, self.point, T or self.T, self.p)

    def _like(self, other):
        if isinstance(other, ModJet):
            return other
        if isinstance(other, RationalFn):
            return ModJet.from_rational(other, self.point, self.order, self.p)
        return None

    def _n(self, k: int | None = None) -> int:
        k = self.order if k is None else k
        return self.T.n_le[k] if k >= 0 else 0

    def value(self) -> int:
        if self.order < 0:
            raise ValueError("jet has no remaining exact value (order < 0)")
        return int(self.a[0])

    def gradient(self) -> list[int]:
        if self.order < 1:
            raise ValueError("jet order too low for a gradient")
        return [int(self.a[self.T.unit[v]]) for v in range(NVARS)]

    def is_zero(self) -> bool:
        return not self.a[: self._n()].any()

    def is_constant(self) -> bool:
        return not self.a[1 : self._n()].any()

    @property
    def size(self) -> int:
        return self._n()

    def _common(self, other: "ModJet"):
        k = min(self.order, other.order)
        T = self.T if self.T.K >= other.T.K else other.T
        return k, T

    def __add__(self, other):
        o = self._like(other)
        if o is None:
            a = self.a.copy()
            if self.order >= 0:
                a[0] = (a[0] + _to_mod(other, self.p)) % self.p
            return self._wrap(a)
        k, T = self._common(o)
        n = T.n_le[k] if k >= 0 else 0
        return self._wrap((self.a[:n] + o.a[:n]) % self.p, k, T)

    __radd__ = __add__

    def __neg__(self):
        return self._wrap((-self.a) % self.p)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._like(other)
        if o is None:
            return self._wrap(self.a * _to_mod(other, self.p) % self.p)
        k, T = self._common(o)
        if k < 0:
            return self._wrap(np.zeros(0, dtype=np.int64), k, T)
        return self._wrap(_mul_mod(self.a, o.a, k, T, self.p), k, T)

    __rmul__ = __mul__

    def inverse(self) -> "ModJet":
        if self.order < 0:
            return self
        b0 = int(self.a[0])
        if b0 == 0:
            raise PoleAtPoint("division by a jet vanishing at the base point (mod p)")
        p, T, k = self.p, self.T, self.order
        y = np.array([pow(b0, p - 2, p)], dtype=np.int64)
        cur = 0
        while cur < k:
            t = min(2 * cur + 1, k)
            yp = np.zeros(T.n_le[t], dtype=np.int64)
            yp[: len(y)] = y
            e = (-_mul_mod(self.a, yp, t, T, p)) % p
            e[0] = (e[0] + 2) % p
            y = _mul_mod(yp, e, t, T, p)
            cur = t
        return self._wrap(y)

    def __truediv__(self, other):
        o = self._like(other)
        if o is None:
            c = _to_mod(other, self.p)
            if c == 0:
                raise ZeroDivisionError("jet divided by zero")
            return self._wrap(self.a * pow(c, self.p - 2, self.p) % self.p)
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = ModJet.constant(1, self.point, self.order, self.p)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def diff(self, v: int) -> "ModJet":
        k = self.order - 1
        if k < 0:
            return self._wrap(np.zeros(0, dtype=np.int64), k)
        n = self.T.n_le[k]
        fac = self.T.dfac[v][:n].astype(np.int64)
        return self._wrap(fac * self.a[self.T.dsrc[v][:n]] % self.p, k)

    def __repr__(self):
        return f"ModJet(order={self.order}, p={self.p})"


def _mul_mod(a: np.ndarray, b: np.ndarray, k: int, T: _Tables, p: int) -> np.ndarray:
    I, J, starts, ends = _pairs(T.K)
    n = T.n_le[k]
    e = ends[k]
    prod = a[I[:e]] * b[J[:e]]
    return np.add.reduceat(prod, starts[:n]) % p
