"""Projective invariants of generic parabolic Monge-Ampere equations.

The pipeline runs on the directing field Z, a complement X of Z in the
Monge distribution, and the contact form U:

    pairings a_kl = Z^k(X) interior Z^l(U)
    -> decomposition coefficients r_i (of Z^4 U) and rho_i (of Z^4 X)
    -> Wilczynski coefficients p_i, q_i
    -> normalized P_i, Q_i
    -> semi-invariants Theta_3, Theta_4, Theta_31 and Lambda_3, Lambda_4, Lambda_31
    -> absolute invariants kappa, tau, gamma.

Every step only needs ring operations and partial derivatives, so it runs
either on exact rational functions or on exact Taylor jets at a point
(:mod:`pmainv.jets`). The second mode is used when closed forms outgrow the
size ceiling.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from .calculus import OneForm, VectorField, contact_form, interior, lie_field, lie_form
from .errors import (
    IdentityViolation,
    NotGeneric,
    PoleAtPoint,
    SingularFrame,
    SizeCeilingExceeded,
    VanishingSemiInvariant,
)
from .jets import Jet, ModJet
from .pma import MAEquation, MongeFrame
from .symbolic import RationalFn, as_rational

DEFAULT_CEILING = 20_000
VARIANTS = ("classical", "printed")
DEFAULT_VARIANT = "classical"

# Jet order needed so that first derivatives of the deepest invariants
# (Theta_31, Lambda_31, N1^2 of gamma_3) survive: each application of Z costs
# one order, and those quantities sit eight applications deep.
POINTWISE_ORDER = 9


def _zero(s) -> bool:
    if isinstance(s, (int, Fraction)):
        return s == 0
    return s.is_zero()


class _Guard:
    """Raises SizeCeilingExceeded when a symbolic intermediate grows too large."""

    def __init__(self, ceiling: int | None):
        self.ceiling = ceiling
        self.peak = 0

    def __call__(self, stage: str, *values):
        if self.ceiling is None:
            return
        for v in values:
            items = v.c if isinstance(v, (VectorField, OneForm)) else (v,)
            for s in items:
                if isinstance(s, RationalFn):
                    n = s.size
                    self.peak = max(self.peak, n)
                    if n > self.ceiling:
                        raise SizeCeilingExceeded(stage, n, self.ceiling)

    def predict(self, stage: str, a, b):
        """Refuse a product of a and b whose naive term count is far past the ceiling.

        Checked before the work is done, so a hopeless closed form fails fast
        instead of exhausting memory inside the polynomial kernel.
        """
        if self.ceiling is None:
            return
        est = _max_size(a) * _max_size(b)
        if est > PREDICT_FACTOR * self.ceiling:
            raise SizeCeilingExceeded(stage, est, self.ceiling)


def _max_size(v) -> int:
    items = v.c if isinstance(v, (VectorField, OneForm)) else (v,)
    return max((s.size for s in items if isinstance(s, RationalFn)), default=1)


# a product estimate this many times the ceiling is refused outright
PREDICT_FACTOR = 25


# pairings ------------------------------------------------------------------


@dataclass
class PairingMatrix:
    alpha: list[list[Any]]

    def __getitem__(self, kl: tuple[int, int]):
        k, l = kl
        return self.alpha[k][l]


def iterates(Z: VectorField, X: VectorField, U: OneForm, n: int = 4, guard: _Guard | None = None):
    fields = [X]
    forms = [U]
    for k in range(n):
        if guard is not None:
            guard.predict(f"Z^{k + 1}", Z, fields[-1])
            guard.predict(f"Z^{k + 1}", Z, forms[-1])
        fields.append(lie_field(Z, fields[-1]))
        forms.append(lie_form(Z, forms[-1]))
        if guard is not None:
            guard(f"Z^{k + 1}", fields[-1], forms[-1])
    return fields, forms


def pairing_matrix(
    fields: list[VectorField], forms: list[OneForm], check: bool = True, guard: _Guard | None = None
) -> PairingMatrix:
    """alpha[k][l] = Z^k(X) interior Z^l(U), with the structural identities checked."""
    n = len(fields)
    if guard is not None:
        for k in range(n):
            for l in range(n):
                guard.predict(f"pairing alpha[{k}][{l}]", fields[k], forms[l])
    alpha = [[interior(fields[k], forms[l]) for l in range(n)] for k in range(n)]
    if check:
        for k in range(n):
            for l in range(n):
                if k + l <= 2 and not _zero(alpha[k][l]):
                    raise IdentityViolation(f"pairing alpha[{k}][{l}] should vanish")
        for k in range(1, 4):
            if not _zero(alpha[k][3 - k] + alpha[k - 1][4 - k]):
                raise IdentityViolation(f"alternation fails between alpha[{k}][{3 - k}] and alpha[{k - 1}][{4 - k}]")
        if _zero(alpha[3][0]):
            raise SingularFrame("Z^3(X) interior U vanishes")
    return PairingMatrix(alpha)


# decomposition coefficients ------------------------------------------------


@dataclass
class CoeffQuad:
    """Four coefficients indexed 1..4 through ``[i]``; rho carries rho5 too."""

    values: tuple
    flavor: str
    rho5: Any = None

    def __getitem__(self, i: int):
        if not 1 <= i <= 4:
            raise IndexError("coefficients are indexed 1..4")
        return self.values[i - 1]

    def __iter__(self):
        return iter(self.values)


def _div(num, den, what: str):
    if _zero(den):
        raise SingularFrame(f"{what}: required pairing vanishes")
    return num / den


def r_coeffs(a: PairingMatrix) -> CoeffQuad:
    """Z^4 U + r1 Z^3 U + r2 Z^2 U + r3 Z U + r4 U = 0, solved by pairing with Z^k X."""
    r1 = -_div(a[0, 4], a[0, 3], "r1")
    r2 = -_div(a[1, 4] + r1 * a[1, 3], a[1, 2], "r2")
    r3 = -_div(a[2, 4] + r1 * a[2, 3] + r2 * a[2, 2], a[2, 1], "r3")
    r4 = -_div(a[3, 4] + r1 * a[3, 3] + r2 * a[3, 2] + r3 * a[3, 1], a[3, 0], "r4")
    return CoeffQuad((r1, r2, r3, r4), "r")


def rho_coeffs(a: PairingMatrix) -> CoeffQuad:
    """Z^4 X + rho1 Z^3 X + ... + rho4 X = -rho5 Z, solved by pairing with Z^l U."""
    p1 = -_div(a[4, 0], a[3, 0], "rho1")
    p2 = -_div(a[4, 1] + p1 * a[3, 1], a[2, 1], "rho2")
    p3 = -_div(a[4, 2] + p1 * a[3, 2] + p2 * a[2, 2], a[1, 2], "rho3")
    p4 = -_div(a[4, 3] + p1 * a[3, 3] + p2 * a[2, 3] + p3 * a[1, 3], a[0, 3], "rho4")
    return CoeffQuad((p1, p2, p3, p4), "rho")


def form_residual(forms: list[OneForm], r: CoeffQuad) -> OneForm:
    return forms[4] + forms[3] * r[1] + forms[2] * r[2] + forms[1] * r[3] + forms[0] * r[4]


def field_residual(fields: list[VectorField], rho: CoeffQuad) -> VectorField:
    return fields[4] + fields[3] * rho[1] + fields[2] * rho[2] + fields[1] * rho[3] + fields[0] * rho[4]


def check_r(forms: list[OneForm], r: CoeffQuad) -> None:
    if not form_residual(forms, r).is_zero():
        raise IdentityViolation("Z^4(U) is not reproduced by the r coefficients")


def attach_rho5(Z: VectorField, fields: list[VectorField], rho: CoeffQuad) -> CoeffQuad:
    """Recover rho5 from W = -rho5 Z and check the remaining components."""
    W = field_residual(fields, rho)
    k = next((i for i in range(5) if not _zero(Z[i])), None)
    if k is None:
        raise SingularFrame("Z vanishes")
    rho5 = -W[k] / Z[k]
    if not (W + Z * rho5).is_zero():
        raise IdentityViolation("Z^4(X) decomposition leaves a part outside span{Z, X, ..., Z^3 X}")
    return CoeffQuad(rho.values, "rho", rho5)


def wilczynski(c: CoeffQuad) -> CoeffQuad:
    flavor = {"r": "p", "rho": "q"}[c.flavor]
    return CoeffQuad((c[1] / 4, c[2] / 6, c[3] / 4, c[4]), flavor, c.rho5)


# normalization and semi-invariants ----------------------------------------


def normalize(c: CoeffQuad, Z: Callable, variant: str = DEFAULT_VARIANT) -> CoeffQuad:
    """Coefficients of the equation after eliminating the subleading term.

    ``variant="printed"`` replaces -p1^2 in P2 by -Z(p1)^2; the classical
    form is the one compatible with gauge covariance.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    p1, p2, p3, p4 = c.values
    z1 = Z(p1)
    z2 = Z(z1)
    z3 = Z(z2)
    sq = p1 * p1
    if variant == "classical":
        P2 = p2 - z1 - sq
    else:
        P2 = p2 - z1 - z1 * z1
    P3 = p3 - z2 - 3 * p1 * p2 + 2 * sq * p1
    P4 = (
        p4
        - 4 * p1 * p3
        - 3 * sq * sq
        - z3
        + 3 * z1 * z1
        + 6 * sq * z1
        + 6 * sq * p2
        - 6 * z1 * p2
    )
    flavor = {"p": "P", "q": "Q"}[c.flavor]
    return CoeffQuad((None, P2, P3, P4), flavor)


@dataclass
class SemiInvariants:
    s3: Any
    s4: Any
    s31: Any


def semi_invariants(P: CoeffQuad, Z: Callable) -> SemiInvariants:
    """Theta (from P) or Lambda (from Q): weights 3, 4 and 8 under Z -> fZ."""
    P2, P3, P4 = P[2], P[3], P[4]
    zP2 = Z(P2)
    s3 = P3 - Fraction(3, 2) * zP2
    s4 = P4 - 2 * Z(P3) + Fraction(6, 5) * Z(zP2) - Fraction(81, 25) * P2 * P2
    z = Z(s3)
    s31 = 6 * s3 * Z(z) - 7 * z * z - Fraction(108, 5) * P2 * s3 * s3
    return SemiInvariants(s3, s4, s31)


# graded scalars ------------------------------------------------------------


class GradedScalar:
    """``rational * base^(grade/3)`` with ``base`` one of Theta_3 or Lambda_3."""

    __slots__ = ("rational", "grade", "base", "base_name")

    def __init__(self, rational, grade: int, base, base_name: str = "Theta3"):
        self.rational = rational
        self.grade = int(grade)
        self.base = base
        self.base_name = base_name

    def _same_base(self, other: "GradedScalar"):
        if other.base_name != self.base_name:
            raise ValueError(f"cannot combine graded scalars over {self.base_name} and {other.base_name}")

    def __mul__(self, other):
        if isinstance(other, GradedScalar):
            self._same_base(other)
            return GradedScalar(self.rational * other.rational, self.grade + other.grade, self.base, self.base_name)
        return GradedScalar(self.rational * other, self.grade, self.base, self.base_name)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, GradedScalar):
            self._same_base(other)
            return GradedScalar(self.rational / other.rational, self.grade - other.grade, self.base, self.base_name)
        return GradedScalar(self.rational / other, self.grade, self.base, self.base_name)

    def __add__(self, other: "GradedScalar"):
        self._same_base(other)
        if other.grade != self.grade:
            raise ValueError("sum of graded scalars needs equal grades")
        return GradedScalar(self.rational + other.rational, self.grade, self.base, self.base_name)

    def __neg__(self):
        return GradedScalar(-self.rational, self.grade, self.base, self.base_name)

    def __sub__(self, other):
        return self + (-other)

    def cube(self):
        """The rational function (rational * base^(grade/3))^3."""
        r3 = self.rational * self.rational * self.rational
        if self.grade >= 0:
            return r3 * self.base**self.grade
        return r3 / self.base ** (-self.grade)

    def gradient_row(self) -> list[Fraction]:
        """Gradient up to the nonzero factor base^(grade/3), at a jet's base point."""
        r, b = self.rational, self.base
        gr, gb = r.gradient(), b.gradient()
        rv, bv = r.value(), b.value()
        e = Fraction(self.grade, 3)
        return [gr[j] + e * rv * gb[j] / bv for j in range(5)]

    def real_value(self, rational_value=None, base_value=None) -> float:
        rv = self.rational.value() if rational_value is None else rational_value
        bv = self.base.value() if base_value is None else base_value
        root = math.copysign(abs(float(bv)) ** (1.0 / 3.0), float(bv))
        return float(rv) * root**self.grade

    def __repr__(self):
        return f"GradedScalar(grade={self.grade}, base={self.base_name})"


def apply_N(s: GradedScalar, Z: Callable) -> GradedScalar:
    """N = base^(-1/3) Z on a graded scalar; the grade drops by one."""
    if _zero(s.base):
        raise VanishingSemiInvariant(s.base_name)
    r = s.rational
    rat = Z(r) + Fraction(s.grade, 3) * r * Z(s.base) / s.base
    return GradedScalar(rat, s.grade - 1, s.base, s.base_name)


# the report ----------------------------------------------------------------


@dataclass
class InvariantChain:
    """Every intermediate of one run, symbolic or pointwise."""

    Z: VectorField
    X: VectorField
    U: OneForm
    fields: list
    forms: list
    alpha: PairingMatrix
    r: CoeffQuad
    rho: CoeffQuad
    p: CoeffQuad
    q: CoeffQuad
    P: CoeffQuad
    Q: CoeffQuad
    theta: SemiInvariants
    lam: SemiInvariants
    variant: str
    peak_size: int = 0


def run_chain(
    Z: VectorField,
    X: VectorField,
    U: OneForm | None = None,
    *,
    variant: str = DEFAULT_VARIANT,
    ceiling: int | None = None,
    check: bool = True,
) -> InvariantChain:
    U = contact_form() if U is None else U
    guard = _Guard(ceiling)
    fields, forms = iterates(Z, X, U, 4, guard)
    alpha = pairing_matrix(fields, forms, check=check, guard=guard)
    r = r_coeffs(alpha)
    rho = rho_coeffs(alpha)
    guard("decomposition", *r.values, *rho.values)
    if check:
        check_r(forms, r)
        rho = attach_rho5(Z, fields, rho)
    p, q = wilczynski(r), wilczynski(rho)
    P = normalize(p, Z, variant)
    guard("normalization P", *P.values[1:])
    Q = normalize(q, Z, variant)
    guard("normalization Q", *Q.values[1:])
    theta = semi_invariants(P, Z)
    guard("Theta", theta.s3, theta.s4, theta.s31)
    lam = semi_invariants(Q, Z)
    guard("Lambda", lam.s3, lam.s4, lam.s31)
    return InvariantChain(Z, X, U, fields, forms, alpha, r, rho, p, q, P, Q, theta, lam, variant, guard.peak)


INVARIANT_NAMES = ("kappa1", "kappa2", "tau1", "tau2", "gamma3", "gamma4", "gamma31")


@dataclass
class InvariantReport:
    mode: str  # "symbolic" or "pointwise"
    chain: InvariantChain
    graded: dict[str, GradedScalar]
    rational: dict[str, Any]
    choices: dict[str, Any] = field(default_factory=dict)
    point: tuple | None = None

    @property
    def theta(self) -> SemiInvariants:
        return self.chain.theta

    @property
    def lam(self) -> SemiInvariants:
        return self.chain.lam

    def N1(self, s: GradedScalar) -> GradedScalar:
        return apply_N1(s, self)

    def N2(self, s: GradedScalar) -> GradedScalar:
        return apply_N2(s, self)

    def quantities(self) -> dict[str, Any]:
        """Named scalars: semi-invariants and the rational invariants."""
        th, la = self.theta, self.lam
        out = {
            "Theta3": th.s3,
            "Theta4": th.s4,
            "Theta31": th.s31,
            "Lambda3": la.s3,
            "Lambda4": la.s4,
            "Lambda31": la.s31,
        }
        out.update(self.rational)
        return out


def _build_report(chain: InvariantChain, mode: str, choices: dict, point=None) -> InvariantReport:
    th, la = chain.theta, chain.lam
    if _zero(th.s3):
        raise VanishingSemiInvariant("Theta3")
    if _zero(la.s3):
        raise VanishingSemiInvariant("Lambda3")
    T3, L3 = th.s3, la.s3
    graded = {
        "kappa1": GradedScalar(th.s4, -4, T3, "Theta3"),
        "kappa2": GradedScalar(th.s31, -8, T3, "Theta3"),
        "tau1": GradedScalar(la.s4, -4, L3, "Lambda3"),
        "tau2": GradedScalar(la.s31, -8, L3, "Lambda3"),
        "gamma3": GradedScalar(L3 / T3, 0, T3, "Theta3"),
    }
    rational = {
        "kappa1_cubed": graded["kappa1"].cube(),
        "kappa2_cubed": graded["kappa2"].cube(),
        "tau1_cubed": graded["tau1"].cube(),
        "tau2_cubed": graded["tau2"].cube(),
        "gamma3": L3 / T3,
        "gamma4": _div(la.s4, th.s4, "gamma4"),
        "gamma31": _div(la.s31, th.s31, "gamma31"),
    }
    return InvariantReport(mode, chain, graded, rational, choices, point)


def apply_N1(s: GradedScalar, report: InvariantReport) -> GradedScalar:
    if s.base_name != "Theta3":
        raise ValueError("N1 acts on scalars graded by Theta3")
    return apply_N(s, report.chain.Z)


def apply_N2(s: GradedScalar, report: InvariantReport) -> GradedScalar:
    if s.base_name == "Lambda3":
        return apply_N(s, report.chain.Z)
    if s.grade != 0:
        raise ValueError("N2 acts on grade-0 scalars or on scalars graded by Lambda3")
    return apply_N(GradedScalar(s.rational, 0, report.lam.s3, "Lambda3"), report.chain.Z)


def frame_inputs(frame: MongeFrame) -> tuple[VectorField, VectorField]:
    return frame.Z, frame.complement_field()


def jet_inputs(Z: VectorField, X: VectorField, point, order: int = POINTWISE_ORDER):
    Zj = Z.map(lambda c: Jet.from_rational(c, point, order))
    Xj = X.map(lambda c: Jet.from_rational(c, point, order))
    U = contact_form().map(lambda c: Jet.from_rational(c, point, order))
    return Zj, Xj, U


def report_from_fields(
    Z: VectorField,
    X: VectorField,
    U: OneForm | None = None,
    *,
    mode: str = "auto",
    variant: str = DEFAULT_VARIANT,
    ceiling: int | None = DEFAULT_CEILING,
    point=None,
    order: int = POINTWISE_ORDER,
    seed: int = 0,
    choices: dict | None = None,
) -> InvariantReport:
    """Invariants of the triple (Z, X, U).

    ``mode="symbolic"`` insists on closed forms (SizeCeilingExceeded past
    the ceiling; pass ``ceiling=None`` for no limit), ``"pointwise"``
    evaluates exact jets at ``point`` (random when omitted), and ``"auto"``
    falls back from symbolic to pointwise when the ceiling is hit.
    """
    choices = dict(choices or {})
    choices["variant"] = variant
    if mode in ("symbolic", "auto"):
        try:
            chain = run_chain(Z, X, U, variant=variant, ceiling=ceiling)
            choices["ceiling"] = ceiling
            return _build_report(chain, "symbolic", choices)
        except SizeCeilingExceeded as exc:
            if mode == "symbolic":
                raise
            choices["fallback"] = f"{exc.stage} reached {exc.size} terms"
    if U is not None and not all(isinstance(c, RationalFn) for c in U):
        raise ValueError("pointwise mode needs a rational contact form")
    return pointwise_report(Z, X, U, point=point, order=order, seed=seed, variant=variant, choices=choices)


def pointwise_report(
    Z: VectorField,
    X: VectorField,
    U: OneForm | None = None,
    *,
    point=None,
    order: int = POINTWISE_ORDER,
    seed: int = 0,
    variant: str = DEFAULT_VARIANT,
    choices: dict | None = None,
    attempts: int = 10,
    prime: int | None = None,
) -> InvariantReport:
    """Exact values (and low-order Taylor data) of the invariants at a point.

    Points where a denominator or a semi-invariant vanishes are skipped when
    the point is chosen at random. With ``prime`` the jets live in GF(prime):
    the same chain runs much faster and yields residues of the exact values.
    """

    def lift(c, pt):
        if prime is None:
            return Jet.from_rational(c, pt, order)
        return ModJet.from_rational(c, pt, order, prime)

    choices = dict(choices or {})
    choices["variant"] = variant
    rng = random.Random(seed)
    U = contact_form() if U is None else U
    last: Exception | None = None
    vanishing: dict[str, int] = {}
    for _ in range(1 if point is not None else attempts):
        pt = tuple(Fraction(c) for c in point) if point is not None else _random_small_point(rng)
        try:
            Zj = Z.map(lambda c: lift(c, pt))
            Xj = X.map(lambda c: lift(c, pt))
            Uj = U.map(lambda c: lift(c, pt))
            chain = run_chain(Zj, Xj, Uj, variant=variant, check=True)
            choices["order"] = order
            if prime is not None:
                choices["prime"] = prime
            return _build_report(chain, "pointwise", choices, pt)
        except (PoleAtPoint, SingularFrame, ZeroDivisionError) as exc:
            last = exc
        except VanishingSemiInvariant as exc:
            vanishing[exc.which] = vanishing.get(exc.which, 0) + 1
            last = exc
    if point is not None and last is not None:
        raise last
    if vanishing:
        raise VanishingSemiInvariant(max(vanishing, key=vanishing.get))
    raise SingularFrame(f"no regular point found in {attempts} attempts: {last}")


def _random_small_point(rng: random.Random, bound: int = 20) -> tuple:
    return tuple(Fraction(rng.randint(-bound, bound)) for _ in range(5))


def invariant_report(
    E: MAEquation,
    *,
    mode: str = "auto",
    variant: str = DEFAULT_VARIANT,
    complement: str = "auto",
    ceiling: int | None = DEFAULT_CEILING,
    point=None,
    order: int = POINTWISE_ORDER,
    seed: int = 0,
) -> InvariantReport:
    from .classify import classify

    cl = classify(E, seed=seed)
    if cl.verdict != "Generic":
        raise NotGeneric(f"equation classifies as {cl.verdict}")
    frame = cl.frame
    if complement != "auto":
        frame = frame.with_complement(complement)
    Z, X = frame_inputs(frame)
    choices = {"complement": frame.complement, "normalization": frame.normalization, "gauge": "frame"}
    return report_from_fields(
        Z, X, mode=mode, variant=variant, ceiling=ceiling, point=point, order=order, seed=seed, choices=choices
    )


# gauge transformations -----------------------------------------------------


def gauge(Z: VectorField, U: OneForm, f, h) -> tuple[VectorField, OneForm]:
    """Barred pair for Z = f Zbar and U = h Ubar."""
    f, h = as_rational(f), as_rational(h)
    if f.is_zero() or h.is_zero():
        raise ValueError("gauge factors must be nonzero")
    return Z / f, U / h


def gauge_law(p: CoeffQuad, f, h, Z: Callable) -> CoeffQuad:
    """Barred Wilczynski coefficients, by substituting U = h Ubar and Z = f Zbar.

    Z^j(U) is expanded in the basis Zbar^k(Ubar): applying Z to
    c * Zbar^k(Ubar) gives Z(c) Zbar^k(Ubar) + c f Zbar^(k+1)(Ubar). The
    relation for U then becomes a relation for Ubar, normalized to a
    leading coefficient 1.
    """
    rows = [[h]]
    for _ in range(4):
        cur = rows[-1]
        nxt = [None] * (len(cur) + 1)
        for k, c in enumerate(cur):
            t = Z(c)
            nxt[k] = t if nxt[k] is None else nxt[k] + t
            nxt[k + 1] = f * c if nxt[k + 1] is None else nxt[k + 1] + f * c
        rows.append(nxt)
    weights = (1, 4 * p[1], 6 * p[2], 4 * p[3], p[4])
    total = [None] * 5
    for j, w in enumerate(weights):
        for k, c in enumerate(rows[4 - j]):
            term = c * w
            total[k] = term if total[k] is None else total[k] + term
    lead = total[4]
    rb = [total[4 - i] / lead for i in range(1, 5)]
    return CoeffQuad((rb[0] / 4, rb[1] / 6, rb[2] / 4, rb[3]), p.flavor)


# Tabulated transformation law for p under (f, h): coefficient, index of p (0 for none), factors
# D^k(g) as (g, k), and the powers of h and f in the denominator.
PRINTED_GAUGE_LAW: dict[int, list[tuple]] = {
    1: [
        (Fraction(1), 0, [("h", 1)], 1, 0),
        (Fraction(1), 1, [], 0, 1),
        (Fraction(3, 2), 0, [("f", 1)], 0, 1),
    ],
    2: [
        (Fraction(1), 2, [], 0, 2),
        (Fraction(2), 1, [("f", 1)], 0, 2),
        (Fraction(2, 3), 1, [("h", 1)], 1, 1),
        (Fraction(3), 0, [("h", 1), ("f", 1)], 1, 1),
        (Fraction(7, 6), 0, [("f", 1), ("f", 1)], 0, 2),
        (Fraction(2, 3), 0, [("f", 2)], 0, 1),
        (Fraction(1), 0, [("h", 2)], 1, 0),
    ],
    3: [
        (Fraction(1), 3, [], 0, 3),
        (Fraction(3), 2, [("h", 1)], 1, 2),
        (Fraction(3, 2), 2, [("f", 1)], 0, 3),
        (Fraction(1), 1, [("f", 1), ("f", 1)], 0, 3),
        (Fraction(1), 1, [("f", 2)], 0, 2),
        (Fraction(6), 1, [("h", 1), ("f", 1)], 1, 2),
        (Fraction(3), 1, [("h", 2)], 1, 1),
        (Fraction(1, 4), 0, [("f", 3)], 0, 1),
        (Fraction(1, 4), 0, [("f", 1), ("f", 1), ("f", 1)], 0, 3),
        (Fraction(1), 0, [("h", 3)], 1, 0),
        (Fraction(9, 2), 0, [("f", 1), ("h", 2)], 1, 1),
        (Fraction(7, 2), 0, [("h", 1), ("f", 1), ("f", 1)], 1, 2),
        (Fraction(2), 0, [("h", 1), ("f", 2)], 1, 1),
        (Fraction(1), 0, [("f", 2), ("f", 1)], 0, 2),
    ],
    4: [
        (Fraction(1), 4, [], 0, 4),
        (Fraction(4), 3, [("h", 1)], 1, 3),
        (Fraction(6), 2, [("f", 2)], 1, 2),
        (Fraction(6), 2, [("h", 1), ("f", 1)], 1, 3),
        (Fraction(4), 1, [("h", 3)], 1, 1),
        (Fraction(4), 1, [("h", 1), ("f", 2)], 1, 2),
        (Fraction(4), 1, [("h", 1), ("f", 1), ("f", 1)], 1, 3),
        (Fraction(1), 0, [("h", 4)], 1, 0),
        (Fraction(12), 1, [("f", 1), ("h", 2)], 1, 2),
        (Fraction(6), 0, [("f", 1), ("h", 3)], 1, 1),
        (Fraction(7), 0, [("f", 1), ("f", 1), ("h", 2)], 1, 2),
        (Fraction(1), 0, [("h", 1), ("f", 3)], 1, 1),
        (Fraction(4), 0, [("h", 1), ("f", 2), ("f", 1)], 1, 2),
        (Fraction(1), 0, [("f", 1), ("f", 1), ("f", 1), ("h", 1)], 1, 3),
        (Fraction(4), 0, [("h", 2), ("f", 2)], 1, 1),
    ],
}

READINGS = ("Z", "Zbar")


def _corrected_table() -> dict[int, list[tuple]]:
    table = {i: list(terms) for i, terms in PRINTED_GAUGE_LAW.items()}
    table[2][2] = (Fraction(2), 1, [("h", 1)], 1, 1)
    table[4][2] = (Fraction(6), 2, [("h", 2)], 1, 2)
    return table


# The tabulated law with two of its terms repaired; exact under
# the Zbar reading.
CORRECTED_GAUGE_LAW = _corrected_table()


def printed_gauge_law(
    p: CoeffQuad, f, h, Z: Callable, reading: str = "Z", table: dict | None = None
) -> CoeffQuad:
    """The tabulated p -> pbar formulas, with D read as Z or as Zbar = Z/f."""
    table = PRINTED_GAUGE_LAW if table is None else table
    if reading not in READINGS:
        raise ValueError(f"unknown reading {reading!r}")
    if not isinstance(f, (RationalFn, Jet, ModJet)):
        f = as_rational(f)
    if not isinstance(h, (RationalFn, Jet, ModJet)):
        h = as_rational(h)
    D = Z if reading == "Z" else (lambda s: Z(s) / f)
    derivs = {"f": [f], "h": [h]}
    for g in ("f", "h"):
        for _ in range(4):
            derivs[g].append(D(derivs[g][-1]))
    out = []
    for i in range(1, 5):
        acc = None
        for c, pi, factors, hp, fp in table[i]:
            t = c * (p[pi] if pi else f / f)
            for g, k in factors:
                t = t * derivs[g][k]
            t = t / (h**hp * f**fp)
            acc = t if acc is None else acc + t
        out.append(acc)
    return CoeffQuad(tuple(out), p.flavor)


def audit_gauge_law(
    p: CoeffQuad, pbar: CoeffQuad, f, h, Z: Callable, table: dict | None = None
) -> dict[str, list[bool]]:
    """For each reading, whether each tabulated pbar_i equals the recomputed one."""
    result = {}
    for reading in READINGS:
        printed = printed_gauge_law(p, f, h, Z, reading, table)
        result[reading] = [_zero(printed[i] - pbar[i]) for i in range(1, 5)]
    return result


def variant_arbiter(Z: VectorField, X: VectorField, gauges: list[tuple], U: OneForm | None = None) -> dict[str, bool]:
    """Which normalization variants give exact weight laws for Theta under all gauges."""
    U = contact_form() if U is None else U
    verdict = {}
    for variant in VARIANTS:
        base = run_chain(Z, X, U, variant=variant)
        ok = True
        for f, h in gauges:
            Zb, Ub = gauge(Z, U, f, h)
            try:
                g = run_chain(Zb, X, Ub, variant=variant, ceiling=DEFAULT_CEILING * 10)
            except SizeCeilingExceeded:
                ok = False
                break
            f = as_rational(f)
            th, tb = base.theta, g.theta
            if not ((tb.s3 * f**3 - th.s3).is_zero() and (tb.s4 * f**4 - th.s4).is_zero()):
                ok = False
                break
            if not (tb.s31 * f**8 - th.s31).is_zero():
                ok = False
                break
        verdict[variant] = ok
    return verdict
