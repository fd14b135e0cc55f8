"""Parabolic Monge-Ampere equations and their Monge distributions.

An equation N(rt - s^2) + A r + B s + C t + D = 0 is stored as the
coefficient quintuple (N, A, B, C, D) of rational functions of
(x, y, u, p, q). Parabolic means the discriminant B^2 - 4AC + 4ND vanishes
identically; such an equation is encoded by a Lagrangian plane field
<X1, X2> inside the contact distribution.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .calculus import (
    VectorField,
    bracket,
    chart_swap,
    contact_form,
    d_pairing,
    interior,
    pushforward,
)
from .errors import (
    DegenerateEquation,
    IdentityViolation,
    NotInContactPlane,
    NotLagrangian,
    NotParabolic,
    RankDeficient,
)
from .symbolic import VARIABLES, RationalFn, as_rational, parse

COEFF_NAMES = ("N", "A", "B", "C", "D")


@dataclass(frozen=True)
class MAEquation:
    """Coefficients of N(rt - s^2) + A r + B s + C t + D = 0.

    Construction is lenient: degenerate or non-parabolic quintuples are
    representable so that the classifier can report them.
    """

    N: RationalFn
    A: RationalFn
    B: RationalFn
    C: RationalFn
    D: RationalFn
    name: str = field(default="", compare=False)

    def __post_init__(self):
        for k in COEFF_NAMES:
            object.__setattr__(self, k, as_rational(getattr(self, k)))

    @classmethod
    def from_strings(cls, N: str, A: str, B: str, C: str, D: str, name: str = "") -> "MAEquation":
        return cls(parse(N), parse(A), parse(B), parse(C), parse(D), name=name)

    @property
    def coefficients(self) -> tuple[RationalFn, ...]:
        return (self.N, self.A, self.B, self.C, self.D)

    @property
    def discriminant(self) -> RationalFn:
        return discriminant(self)

    def is_degenerate(self) -> bool:
        return all(c.is_zero() for c in (self.N, self.A, self.B, self.C))

    def is_parabolic(self) -> bool:
        return self.discriminant.is_zero()

    def scaled(self, g) -> "MAEquation":
        g = as_rational(g)
        if g.is_zero():
            raise ValueError("scale factor must be nonzero")
        return MAEquation(*(g * c for c in self.coefficients), name=self.name)

    def swapped(self) -> "MAEquation":
        """The same equation in the chart with x<->y, p<->q (so r<->t)."""
        sw = chart_swap().images
        N, A, B, C, D = (c.compose(sw) for c in self.coefficients)
        return MAEquation(N, C, B, A, D, name=self.name)

    def to_dict(self) -> dict:
        return {k: c.to_text() for k, c in zip(COEFF_NAMES, self.coefficients)}

    def __str__(self):
        parts = [f"{k} = {c.to_text()}" for k, c in zip(COEFF_NAMES, self.coefficients)]
        return "; ".join(parts)


def discriminant(E: MAEquation) -> RationalFn:
    return E.B * E.B - 4 * E.A * E.C + 4 * E.N * E.D


def common_factor(E1: MAEquation, E2: MAEquation) -> RationalFn | None:
    """g with E2 = g * E1 coefficientwise, or None."""
    k = next((i for i, c in enumerate(E1.coefficients) if not c.is_zero()), None)
    if k is None:
        return None
    g = E2.coefficients[k] / E1.coefficients[k]
    if g.is_zero():
        return None
    if all((b - g * a).is_zero() for a, b in zip(E1.coefficients, E2.coefficients)):
        return g
    return None


@dataclass(frozen=True)
class MongeFrame:
    X1: VectorField
    X2: VectorField
    X3: VectorField
    M1: RationalFn
    M2: RationalFn
    Z: VectorField
    X: VectorField | None
    normalization: str
    complement: str | None
    division_locus: tuple[RationalFn, ...] = ()

    def check(self) -> None:
        """Re-verify the frame identities exactly; raise IdentityViolation on failure."""
        U = contact_form()
        if not (interior(self.X1, U).is_zero() and interior(self.X2, U).is_zero()):
            raise IdentityViolation("frame leaves the contact distribution")
        if not d_pairing(U, self.X1, self.X2).is_zero():
            raise IdentityViolation("frame is not Lagrangian")
        if bracket(self.X1, self.X2) != self.X3:
            raise IdentityViolation("X3 differs from [X1, X2]")
        if self.X1 * self.M1 - self.X2 * self.M2 != self.Z:
            raise IdentityViolation("Z differs from M1 X1 - M2 X2")

    def with_complement(self, which: str) -> "MongeFrame":
        X = _pick_complement(self.Z, self.X1, self.X2, self.M1, self.M2, which)
        return MongeFrame(
            self.X1, self.X2, self.X3, self.M1, self.M2, self.Z, X, self.normalization, which, self.division_locus
        )

    def complement_field(self) -> VectorField:
        if self.X is None:
            raise RankDeficient("Z vanishes identically, so no complement X with rank{Z, X} = 2 exists")
        return self.X


def _pick_complement(Z, X1, X2, M1, M2, which: str) -> VectorField:
    # Z = M1 X1 - M2 X2, so {Z, X2} has rank 2 iff M1 != 0 and {Z, X1} iff M2 != 0.
    if which == "X2":
        if M1.is_zero():
            raise RankDeficient("Z is proportional to X2")
        return X2
    if which == "X1":
        if M2.is_zero():
            raise RankDeficient("Z is proportional to X1")
        return X1
    raise ValueError(f"unknown complement choice {which!r}")


def _frame_normalized_N(A, B, C, D) -> tuple[VectorField, VectorField, RationalFn, RationalFn]:
    x, y, u, p, q = (RationalFn.variable(v) for v in VARIABLES)
    half_B = B / 2
    X1 = VectorField([1, 0, p, -C, half_B])
    X2 = VectorField([0, 1, q, half_B, -A])
    M1 = -X1(A) - X2(B) / 2
    M2 = X1(B) / 2 + X2(C)
    return X1, X2, M1, M2


def _frame_normalized_A(B, C, D) -> tuple[VectorField, VectorField, RationalFn, RationalFn]:
    x, y, u, p, q = (RationalFn.variable(v) for v in VARIABLES)
    half_B = B / 2
    X1 = VectorField([1, half_B, p + half_B * q, -D, 0])
    X2 = VectorField([0, 0, 0, half_B, -1])
    M1 = -X2(B) / 2
    M2 = X1(B) / 2 + X2(D)
    return X1, X2, M1, M2


def monge_distribution(E: MAEquation, complement: str = "auto") -> MongeFrame:
    """Monge frame of a parabolic equation.

    ``complement`` picks the field X paired with Z downstream: ``"auto"``
    takes X2 when {Z, X2} has rank 2 and X1 otherwise.
    """
    if E.is_degenerate():
        raise DegenerateEquation("N, A, B and C all vanish identically; the equation is not of second order")
    if not E.is_parabolic():
        raise NotParabolic(f"discriminant is {discriminant(E).to_text()}, not identically zero")
    locus: list[RationalFn] = []
    if not E.N.is_zero():
        n = E.N
        if not n.is_constant():
            locus.append(n)
        X1, X2, M1, M2 = _frame_normalized_N(E.A / n, E.B / n, E.C / n, E.D / n)
        normalization = "N=1"
    elif not E.A.is_zero():
        a = E.A
        if not a.is_constant():
            locus.append(a)
        X1, X2, M1, M2 = _frame_normalized_A(E.B / a, E.C / a, E.D / a)
        normalization = "A=1"
    else:
        inner = monge_distribution(E.swapped())
        sw = chart_swap()
        X1 = pushforward(sw, inner.X1)
        X2 = pushforward(sw, inner.X2)
        M1 = inner.M1.compose(sw.images)
        M2 = inner.M2.compose(sw.images)
        locus = [c.compose(sw.images) for c in inner.division_locus]
        normalization = "swap"
    X3 = bracket(X1, X2)
    Z = X1 * M1 - X2 * M2
    if M1.is_zero() and M2.is_zero():
        X, chosen = None, None
    elif complement == "auto":
        chosen = "X2" if not M1.is_zero() else "X1"
        X = _pick_complement(Z, X1, X2, M1, M2, chosen)
    else:
        chosen = complement
        X = _pick_complement(Z, X1, X2, M1, M2, chosen)
    frame = MongeFrame(X1, X2, X3, M1, M2, Z, X, normalization, chosen, tuple(locus))
    frame.check()
    return frame


def contact_plane_components(X: VectorField) -> tuple[RationalFn, RationalFn, RationalFn, RationalFn]:
    """Coordinates of a contact-plane field in the frame (D_x, D_y, d_p, d_q)."""
    return X[0], X[1], X[3], X[4]


def reconstruct_equation(X1: VectorField, X2: VectorField, name: str = "") -> MAEquation:
    """Equation whose Monge distribution is <X1, X2>.

    Expands det[R1; R2; X1; X2] in (r, s, t), where R1 = D_x + r d_p + s d_q
    and R2 = D_y + s d_p + t d_q span an R-plane, all written in the
    contact-plane frame.
    """
    U = contact_form()
    if not (interior(X1, U).is_zero() and interior(X2, U).is_zero()):
        raise NotInContactPlane("X1 and X2 must be annihilated by U = du - p dx - q dy")
    if not d_pairing(U, X1, X2).is_zero():
        raise NotLagrangian("dU(X1, X2) does not vanish")
    a1, b1, c1, d1 = contact_plane_components(X1)
    a2, b2, c2, d2 = contact_plane_components(X2)
    minors = [
        a1 * b2 - a2 * b1,
        a1 * c2 - a2 * c1,
        a1 * d2 - a2 * d1,
        b1 * c2 - b2 * c1,
        b1 * d2 - b2 * d1,
        c1 * d2 - c2 * d1,
    ]
    if all(m.is_zero() for m in minors):
        raise RankDeficient("X1 and X2 are linearly dependent")
    N = minors[0]
    A = -minors[2]
    B = minors[1] - minors[4]
    C = minors[3]
    D = minors[5]
    E = MAEquation(N, A, B, C, D, name=name)
    if not E.is_parabolic():
        raise IdentityViolation("reconstructed equation is not parabolic")
    return E


# named equations -----------------------------------------------------------


def _v():
    return tuple(RationalFn.variable(v) for v in VARIABLES)


def uxx_equation() -> MAEquation:
    return MAEquation(0, 1, 0, 0, 0, name="u_xx = 0")


def monge_ampere_equation() -> MAEquation:
    return MAEquation(1, 0, 0, 0, 0, name="rt - s^2 = 0")


def heat_equation() -> MAEquation:
    x, y, u, p, q = _v()
    return MAEquation(0, 1, 0, 0, -q, name="r - q = 0")


def laplace_equation() -> MAEquation:
    return MAEquation(0, 1, 0, 1, 0, name="r + t = 0")


def example_coefficients() -> tuple[RationalFn, RationalFn, RationalFn, RationalFn]:
    x, y, u, p, q = _v()
    a1 = x * y * u - (x - y) * q
    a2 = -(x - y) * x - (u + x * p) * y**2
    a3 = x**2 * u + (u + x * p) * y * q
    a4 = -(q + x * u) * x * u - (u + x * p) * q**2
    return a1, a2, a3, a4


def example_fields() -> tuple[VectorField, VectorField]:
    """Lagrangian frame of the worked generic example."""
    x, y, u, p, q = _v()
    a1, a2, a3, a4 = example_coefficients()
    X1 = VectorField([a1, 0, a1 * p, a2, a3])
    X2 = VectorField([0, a1, a1 * q, a3, a4])
    return X1, X2


def example_directing_field() -> VectorField:
    x, y, u, p, q = _v()
    return VectorField([q, y, q * p + y * q, x, -x * u])


def example_equation() -> MAEquation:
    """The worked generic example, with the r-coefficient equal to -a1 a4.

    This is the sign forced by reconstruction from its Lagrangian frame;
    with +a1 a4 the discriminant does not vanish.
    """
    x, y, u, p, q = _v()
    a1, a2, a3, a4 = example_coefficients()
    D = x * a1 * (x * y * u * p - x * u - x * p * q + y * u**2 - u * q)
    return MAEquation(a1**2, -a1 * a4, 2 * a1 * a3, -a1 * a2, D, name="example")


def example_equation_as_printed() -> MAEquation:
    x, y, u, p, q = _v()
    a1, a2, a3, a4 = example_coefficients()
    D = x * a1 * (x * y * u * p - x * u - x * p * q + y * u**2 - u * q)
    return MAEquation(a1**2, a1 * a4, 2 * a1 * a3, -a1 * a2, D, name="example (printed sign)")


def simple_generic_equation() -> MAEquation:
    """Small generic equation: Z = d_x + p d_u + (xy + q) d_p."""
    x, y, u, p, q = _v()
    return MAEquation(1, x, 0, -(x * y + q), -x * (x * y + q), name="simple generic")


# random families -----------------------------------------------------------


def random_polynomial(rng: random.Random, degree: int = 2, terms: int = 3, coeff: int = 3) -> RationalFn:
    """Sparse random polynomial with small integer coefficients."""
    out: dict[tuple[int, ...], int] = {}
    while len(out) < terms:
        d = rng.randint(0, degree)
        e = [0] * 5
        for _ in range(d):
            e[rng.randrange(5)] += 1
        c = rng.choice([k for k in range(-coeff, coeff + 1) if k])
        out[tuple(e)] = c
    return RationalFn.from_terms(out)


def random_parabolic(rng: random.Random, family: str = "N", degree: int = 2, terms: int = 2) -> MAEquation:
    """Random parabolic equation.

    ``family="N"``: N = 1, random A, B, C and D = (4AC - B^2)/4.
    ``family="A"``: N = 0, random nonzero A, random B, D and C = B^2/(4A).
    """
    rp = lambda: random_polynomial(rng, degree, terms)  # noqa: E731
    if family == "N":
        A, B, C = rp(), rp(), rp()
        return MAEquation(1, A, B, C, (4 * A * C - B * B) / 4, name="random N=1")
    if family == "A":
        A = rp()
        while A.is_zero():
            A = rp()
        B, D = rp(), rp()
        return MAEquation(0, A, B, B * B / (4 * A), D, name="random quasilinear")
    raise ValueError(f"unknown family {family!r}")


def directing_pair(a, b) -> tuple[VectorField, VectorField]:
    """Lagrangian pair (Z, X) whose directing field is Z = D_x + a d_p + b d_q.

    Here D_x = d_x + p d_u and X = D_y + b d_p + d d_q. Any d makes the pair
    Lagrangian; d = Z(b) - (D_y + b d_p)(a) is the choice for which Z spans
    the directing line of <Z, X>.
    """
    x, y, u, p, q = _v()
    a, b = as_rational(a), as_rational(b)
    Z = VectorField([1, 0, p, a, b])
    Y = VectorField([0, 1, q, b, 0])
    d = Z(b) - Y(a)
    return Z, VectorField([0, 1, q, b, d])


def random_directing_pair(rng: random.Random, degree: int = 2, terms: int = 2) -> tuple[VectorField, VectorField]:
    x, y, u, p, q = _v()
    a = q + random_polynomial(rng, degree, terms)
    b = random_polynomial(rng, degree, terms)
    return directing_pair(a, b)
