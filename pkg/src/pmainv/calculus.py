"""Coordinate calculus on the contact chart (x, y, u, p, q).

Vector fields and 1-forms are 5-tuples of scalars. All operations only use
ring arithmetic and ``scalar.diff(i)``, so they work unchanged for
:class:`~pmainv.symbolic.RationalFn` and for the truncated Taylor jets of
:mod:`pmainv.jets`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterator, Sequence

from .errors import IdentityViolation, NotInvertible
from .symbolic import NVARS, VARIABLES, RationalFn, as_rational, var_index


def _is_zero(s) -> bool:
    if isinstance(s, (int, float)):
        return s == 0
    return s.is_zero()


class _Tuple5:
    __slots__ = ("c",)
    _labels: tuple[str, ...] = ()

    def __init__(self, components: Sequence):
        comps = tuple(as_rational(c) if isinstance(c, (int, Fraction, str)) else c for c in components)
        if len(comps) != NVARS:
            raise ValueError(f"expected {NVARS} components, got {len(comps)}")
        self.c = comps

    def __iter__(self) -> Iterator:
        return iter(self.c)

    def __getitem__(self, i):
        return self.c[i]

    def __len__(self):
        return NVARS

    def __add__(self, other):
        return type(self)([a + b for a, b in zip(self.c, other.c)])

    def __sub__(self, other):
        return type(self)([a - b for a, b in zip(self.c, other.c)])

    def __neg__(self):
        return type(self)([-a for a in self.c])

    def __mul__(self, s):
        if isinstance(s, _Tuple5):
            return NotImplemented
        return type(self)([a * s for a in self.c])

    __rmul__ = __mul__

    def __truediv__(self, s):
        return type(self)([a / s for a in self.c])

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return all(_is_zero(a - b) for a, b in zip(self.c, other.c))

    __hash__ = None

    def is_zero(self) -> bool:
        return all(_is_zero(a) for a in self.c)

    def map(self, fn: Callable):
        return type(self)([fn(a) for a in self.c])

    def to_text(self) -> list[str]:
        return [a.to_text() for a in self.c]

    def _pretty(self, latex: bool = False) -> str:
        parts = []
        for a, label in zip(self.c, self._labels):
            if _is_zero(a):
                continue
            s = a.to_latex() if latex else a.to_text()
            parts.append(f"({s}){label}")
        return " + ".join(parts) if parts else "0"

    def __str__(self):
        return self._pretty()


class VectorField(_Tuple5):
    """Components along (d/dx, d/dy, d/du, d/dp, d/dq)."""

    _labels = tuple(f"∂{v}" for v in VARIABLES)

    @classmethod
    def coordinate(cls, v: int | str) -> "VectorField":
        i = var_index(v)
        return cls([1 if k == i else 0 for k in range(NVARS)])

    @classmethod
    def zero(cls) -> "VectorField":
        return cls([0] * NVARS)

    def __call__(self, f):
        """Directional derivative of a scalar."""
        total = None
        for k, a in enumerate(self.c):
            if _is_zero(a):
                continue
            term = a * f.diff(k)
            total = term if total is None else total + term
        if total is None:
            return f * 0
        return total

    def __repr__(self):
        return f"VectorField({self.to_text()})"

    def to_latex(self) -> str:
        return self._pretty(latex=True).replace("∂", r"\partial_")


class OneForm(_Tuple5):
    """Components along (dx, dy, du, dp, dq)."""

    _labels = tuple(f"d{v}" for v in VARIABLES)

    @classmethod
    def zero(cls) -> "OneForm":
        return cls([0] * NVARS)

    def __call__(self, X: VectorField):
        return interior(X, self)

    def __repr__(self):
        return f"OneForm({self.to_text()})"

    def to_latex(self) -> str:
        return self._pretty(latex=True)


def bracket(X: VectorField, Y: VectorField) -> VectorField:
    return VectorField([X(Y[k]) - Y(X[k]) for k in range(NVARS)])


def lie_field(Z: VectorField, Y: VectorField) -> VectorField:
    """L_Z Y = [Z, Y]."""
    return bracket(Z, Y)


def lie_form(Z: VectorField, w: OneForm) -> OneForm:
    """L_Z w = i_Z dw + d(i_Z w), in coordinates."""
    comps = []
    for j in range(NVARS):
        acc = Z(w[j])
        for k in range(NVARS):
            if _is_zero(w[k]) or _is_zero(Z[k]):
                continue
            acc = acc + w[k] * Z[k].diff(j)
        comps.append(acc)
    return OneForm(comps)


def interior(X: VectorField, w: OneForm):
    total = None
    for a, b in zip(X.c, w.c):
        if _is_zero(a) or _is_zero(b):
            continue
        total = a * b if total is None else total + a * b
    if total is None:
        return X[0] * 0
    return total


def d_pairing(w: OneForm, X: VectorField, Y: VectorField):
    """dw(X, Y) from the coordinate exterior derivative."""
    total = X[0] * 0
    for j in range(NVARS):
        for k in range(j + 1, NVARS):
            c = w[k].diff(j) - w[j].diff(k)
            if _is_zero(c):
                continue
            total = total + c * (X[j] * Y[k] - X[k] * Y[j])
    return total


def lie_iterates(Z: VectorField, start, n: int, step=None) -> list:
    """[start, L_Z start, ..., L_Z^n start]."""
    if step is None:
        step = lie_form if isinstance(start, OneForm) else lie_field
    out = [start]
    for _ in range(n):
        out.append(step(Z, out[-1]))
    return out


def contact_form() -> OneForm:
    """U = du - p dx - q dy."""
    x, y, u, p, q = (RationalFn.variable(v) for v in VARIABLES)
    return OneForm([-p, -q, 1, 0, 0])


def proportionality_factor(w: OneForm, base: OneForm):
    """Scalar lam with ``w = lam * base``, or ``None`` if they are not proportional."""
    k = next((i for i in range(NVARS) if not _is_zero(base[i])), None)
    if k is None:
        raise ValueError("base form is zero")
    lam = w[k] / base[k]
    if (w - base * lam).is_zero():
        return lam
    return None


def contact_field(f) -> tuple[VectorField, RationalFn]:
    """Contact field with generating function f, and its multiplier lam = f_u.

    The identity ``L_{X_f} U = lam U`` is checked exactly before returning.
    """
    f = as_rational(f)
    p, q = RationalFn.variable("p"), RationalFn.variable("q")
    fx, fy, fu, fp, fq = (f.diff(i) for i in range(NVARS))
    X = VectorField([-fp, -fq, f - p * fp - q * fq, fx + p * fu, fy + q * fu])
    U = contact_form()
    lam = proportionality_factor(lie_form(X, U), U)
    if lam is None:
        raise IdentityViolation("L_X U is not proportional to U for a generated contact field")
    return X, lam


# diffeomorphisms -----------------------------------------------------------


class Diffeo:
    """Rational chart map with an explicitly supplied inverse.

    ``images[k]`` is the k-th coordinate of the image point as a function of
    the source chart; ``inverse`` likewise for the inverse map. Both
    compositions are checked to be the identity when the map is built.
    """

    __slots__ = ("images", "inverse", "_jac", "name")

    def __init__(self, images: Sequence, inverse: Sequence, name: str = ""):
        self.images = tuple(as_rational(g) for g in images)
        self.inverse = tuple(as_rational(g) for g in inverse)
        self.name = name
        self._jac = None
        if len(self.images) != NVARS or len(self.inverse) != NVARS:
            raise NotInvertible(f"a chart map needs {NVARS} images and {NVARS} inverse components")
        ids = [RationalFn.variable(v) for v in VARIABLES]
        fwd = [g.compose(self.inverse) for g in self.images]
        bwd = [g.compose(self.images) for g in self.inverse]
        if fwd != ids or bwd != ids:
            raise NotInvertible("declared inverse does not compose to the identity")

    @classmethod
    def identity(cls) -> "Diffeo":
        ids = [RationalFn.variable(v) for v in VARIABLES]
        return cls(ids, ids, name="identity")

    def inverted(self) -> "Diffeo":
        return Diffeo(self.inverse, self.images, name=f"inverse({self.name})" if self.name else "")

    def __call__(self, point: Sequence) -> tuple:
        return tuple(g.evaluate(point) for g in self.images)

    def jacobian(self) -> list[list[RationalFn]]:
        """``J[k][j] = d(image_k)/d(x_j)``."""
        if self._jac is None:
            self._jac = [[g.diff(j) for j in range(NVARS)] for g in self.images]
        return self._jac

    def pull_function(self, f):
        """f o Phi."""
        return as_rational(f).compose(self.images)

    def push_function(self, f):
        """f o Phi^{-1}."""
        return as_rational(f).compose(self.inverse)

    def to_dict(self) -> dict:
        return {
            "images": [g.to_text() for g in self.images],
            "inverse": [g.to_text() for g in self.inverse],
        }


def pushforward(phi: Diffeo, X: VectorField) -> VectorField:
    """(Phi_* X)_k = X(Phi_k) o Phi^{-1}."""
    return VectorField([phi.push_function(X(g)) for g in phi.images])


def pullback(phi: Diffeo, w: OneForm) -> OneForm:
    """(Phi^* w)_j = sum_k (w_k o Phi) d(Phi_k)/dx_j."""
    J = phi.jacobian()
    pulled = [phi.pull_function(a) for a in w]
    comps = []
    for j in range(NVARS):
        acc = RationalFn(0)
        for k in range(NVARS):
            if pulled[k].is_zero():
                continue
            acc = acc + pulled[k] * J[k][j]
        comps.append(acc)
    return OneForm(comps)


def legendre_map() -> Diffeo:
    """Partial Legendre transform (x, y, u, p, q) -> (p, y, u - x p, -x, q)."""
    x, y, u, p, q = (RationalFn.variable(v) for v in VARIABLES)
    return Diffeo([p, y, u - x * p, -x, q], [-p, y, u - x * p, x, q], name="legendre")


def translation(shift: Sequence) -> Diffeo:
    ids = [RationalFn.variable(v) for v in VARIABLES]
    shift = [as_rational(s) for s in shift]
    return Diffeo(
        [g + s for g, s in zip(ids, shift)],
        [g - s for g, s in zip(ids, shift)],
        name="translation",
    )


def chart_swap() -> Diffeo:
    """Exchange (x, p) with (y, q). A contact map fixing U."""
    x, y, u, p, q = (RationalFn.variable(v) for v in VARIABLES)
    return Diffeo([y, x, u, q, p], [y, x, u, q, p], name="swap")


def contact_multiplier(phi: Diffeo):
    """lam with Phi^* U = lam U, or None if Phi is not a contact map."""
    U = contact_form()
    return proportionality_factor(pullback(phi, U), U)
