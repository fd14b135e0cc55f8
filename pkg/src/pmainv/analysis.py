"""Independence certificates, signature comparison and contact covariance."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from . import linalg
from .calculus import Diffeo, contact_form, contact_multiplier, legendre_map, pushforward, translation
from .classify import classify
from .errors import (
    IdentityViolation,
    NotContact,
    NotGeneric,
    NoWitnessFound,
    PoleAtPoint,
    RankDeficient,
    SingularFrame,
    SizeCeilingExceeded,
    VanishingSemiInvariant,
)
from .invariants import (
    DEFAULT_CEILING,
    DEFAULT_VARIANT,
    POINTWISE_ORDER,
    GradedScalar,
    InvariantReport,
    frame_inputs,
    gauge,
    pointwise_report,
    report_from_fields,
)
from .jets import DEFAULT_PRIME, ModJet
from .pma import MAEquation, MongeFrame, common_factor, monge_distribution, random_polynomial, reconstruct_equation
from .symbolic import RationalFn, random_point

QUINTUPLES: dict[str, tuple[str, ...]] = {
    "1": ("kappa1", "kappa2", "tau1", "tau2", "gamma3"),
    "2": ("gamma3", "N1gamma3", "N1^2gamma3", "kappa1", "kappa2"),
}

# rational invariants compared and transported
RATIONAL_INVARIANTS = (
    "kappa1_cubed",
    "kappa2_cubed",
    "tau1_cubed",
    "tau2_cubed",
    "gamma3",
    "gamma4",
    "gamma31",
)

WITNESS_BOUND = 20

_SKIP = (PoleAtPoint, SingularFrame, VanishingSemiInvariant, ZeroDivisionError)


def _generic_frame(E: MAEquation, seed: int = 0) -> MongeFrame:
    cl = classify(E, seed=seed)
    if cl.verdict != "Generic":
        raise NotGeneric(f"{E.name or 'equation'} classifies as {cl.verdict}")
    return cl.frame


# independence --------------------------------------------------------------


@dataclass
class IndependenceCertificate:
    quintuple_id: str
    names: tuple[str, ...]
    witness_points: list[tuple]
    rank_at_witness: int
    method: str = "exact-rational-rank-after-row-scaling"
    seed: int = 0
    trials: int = 0
    skipped: int = 0
    screen_rank: int | None = None
    prime: int | None = None

    @property
    def valid(self) -> bool:
        return self.rank_at_witness == len(self.names)

    def to_dict(self) -> dict:
        return {
            "quintuple_id": self.quintuple_id,
            "names": list(self.names),
            "witness_points": [[str(c) for c in pt] for pt in self.witness_points],
            "rank_at_witness": self.rank_at_witness,
            "valid": self.valid,
            "method": self.method,
            "seed": self.seed,
            "trials": self.trials,
            "skipped": self.skipped,
            "screen_rank": self.screen_rank,
            "prime": self.prime,
        }


def quintuple_scalars(report: InvariantReport, names: Sequence[str]) -> list[GradedScalar]:
    """The graded scalars named in a quintuple, N1 iterates included."""
    g = dict(report.graded)
    if any(n.startswith("N1") for n in names):
        g["N1gamma3"] = report.N1(g["gamma3"])
        g["N1^2gamma3"] = report.N1(g["N1gamma3"])
    try:
        return [g[n] for n in names]
    except KeyError as exc:
        raise ValueError(f"unknown invariant {exc.args[0]!r}") from None


def scaled_row(s: GradedScalar) -> list:
    """Gradient of r * base^(e/3) divided by base^(e/3), at the jet's base point.

    Exact rationals for :class:`Jet`, residues for :class:`ModJet`.
    """
    r, b = s.rational, s.base
    if not isinstance(r, ModJet):
        return s.gradient_row()
    p = r.p
    gr, rv = r.gradient(), r.value()
    if s.grade == 0:
        return gr
    gb, bv = b.gradient(), b.value()
    if bv == 0:
        raise VanishingSemiInvariant(s.base_name)
    c = s.grade * pow(3, p - 2, p) * rv * pow(bv, p - 2, p) % p
    return [(gr[j] + c * gb[j]) % p for j in range(5)]


def jacobian_rank(functions: Sequence, point: Sequence) -> int:
    """Exact rank of the Jacobian of rational functions at a rational point.

    Constant functions contribute zero rows.
    """
    rows = []
    for f in functions:
        f = f if isinstance(f, RationalFn) else RationalFn(f)
        rows.append([f.diff(j).evaluate(point) for j in range(5)])
    return linalg.rank(rows)


def _small_point(rng: random.Random, bound: int) -> tuple:
    return tuple(Fraction(rng.randint(-bound, bound)) for _ in range(5))


def independence(
    E: MAEquation | None,
    quintuple: str = "1",
    *,
    fields: tuple | None = None,
    budget: int = 200,
    seed: int = 0,
    bound: int = WITNESS_BOUND,
    prime: int | None = DEFAULT_PRIME,
    variant: str = DEFAULT_VARIANT,
) -> IndependenceCertificate:
    """Certify functional independence of a quintuple at a rational witness.

    Candidates are screened with jets over GF(prime); a full rank residue
    matrix already proves full rational rank. The best candidate is then
    recomputed with exact rational jets, and that exact rank is what the
    certificate records. ``prime=None`` skips screening.
    """
    names = QUINTUPLES.get(quintuple)
    if names is None:
        raise ValueError(f"unknown quintuple {quintuple!r}; choose from {sorted(QUINTUPLES)}")
    Z, X = fields if fields is not None else frame_inputs(_generic_frame(E, seed))
    rng = random.Random(seed)
    best_rank, best_point = -1, None
    trials = skipped = 0
    for trials in range(1, budget + 1):
        pt = _small_point(rng, bound)
        try:
            rep = pointwise_report(Z, X, point=pt, prime=prime, variant=variant)
            rows = [scaled_row(s) for s in quintuple_scalars(rep, names)]
        except _SKIP:
            skipped += 1
            continue
        rk = linalg.rank_mod_p(rows, prime) if prime is not None else linalg.rank(rows)
        if rk > best_rank:
            best_rank, best_point = rk, pt
        if rk == len(names):
            break
    cert = IndependenceCertificate(quintuple, names, [], 0, seed=seed, trials=trials, skipped=skipped, prime=prime)
    if best_point is None:
        raise NoWitnessFound(f"no regular candidate point among {budget} trials", cert)
    cert.screen_rank = best_rank
    cert.witness_points = [best_point]
    if prime is None:
        cert.rank_at_witness = best_rank
    else:
        rep = pointwise_report(Z, X, point=best_point, variant=variant)
        rows = [scaled_row(s) for s in quintuple_scalars(rep, names)]
        cert.rank_at_witness = linalg.rank(rows)
    if not cert.valid:
        raise NoWitnessFound(
            f"best exact rank {cert.rank_at_witness} < {len(names)} after {trials} trials (inconclusive)", cert
        )
    return cert


# signatures and comparison -------------------------------------------------


@dataclass
class InvariantFlag:
    """What is known about one invariant.

    ``status`` is "constant" (exact, with ``value``), "nonconstant"
    (certified by a nonzero derivative), or "unknown". ``samples`` holds
    exact values, or residues modulo ``prime``, at sample points.
    """

    status: str
    value: Fraction | None = None
    samples: list[tuple[tuple, Any]] = field(default_factory=list)
    prime: int | None = None

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "value": None if self.value is None else str(self.value),
            "samples": [{"point": [str(c) for c in pt], "value": str(v)} for pt, v in self.samples],
            "prime": self.prime,
        }


@dataclass
class Signature:
    flags: dict[str, InvariantFlag]
    mode: str
    independent: int  # lower bound for the number of independent rational invariants

    @property
    def constants(self) -> dict[str, Fraction]:
        return {k: f.value for k, f in self.flags.items() if f.status == "constant"}

    @property
    def nonconstant(self) -> int:
        return sum(f.status == "nonconstant" for f in self.flags.values())

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "independent": self.independent,
            "flags": {k: f.to_dict() for k, f in self.flags.items()},
        }


def signature(
    E: MAEquation,
    *,
    seed: int = 0,
    ceiling: int | None = DEFAULT_CEILING,
    points: int = 3,
    prime: int = DEFAULT_PRIME,
    variant: str = DEFAULT_VARIANT,
) -> Signature:
    """Constancy flags of the rational invariants.

    Closed forms give exact flags. Otherwise jets over GF(prime) are taken at
    a few points: a nonzero residue of a derivative certifies non-constancy,
    and sampled residues are kept for comparison against exact constants.
    """
    frame = _generic_frame(E, seed)
    Z, X = frame_inputs(frame)
    try:
        rep = report_from_fields(Z, X, mode="symbolic", ceiling=ceiling, variant=variant)
    except SizeCeilingExceeded:
        rep = None
    flags: dict[str, InvariantFlag] = {}
    if rep is not None:
        for n in RATIONAL_INVARIANTS:
            v = rep.rational[n]
            flags[n] = InvariantFlag("constant", v.constant_value()) if v.is_constant() else InvariantFlag("nonconstant")
        rng = random.Random(seed)
        indep = 0
        for _ in range(8):
            try:
                indep = max(indep, jacobian_rank([rep.rational[n] for n in RATIONAL_INVARIANTS], random_point(rng, 1000)))
                break
            except PoleAtPoint:
                continue
        return Signature(flags, "symbolic", indep)
    flags = {n: InvariantFlag("unknown", prime=prime) for n in RATIONAL_INVARIANTS}
    rng = random.Random(seed)
    indep = 0
    found = 0
    for _ in range(20 * points):
        if found == points:
            break
        pt = _small_point(rng, WITNESS_BOUND)
        try:
            rep = pointwise_report(Z, X, point=pt, prime=prime, variant=variant)
            vals = {n: rep.rational[n] for n in RATIONAL_INVARIANTS}
            grads = {n: v.gradient() for n, v in vals.items()}
        except _SKIP:
            continue
        found += 1
        for n in RATIONAL_INVARIANTS:
            flags[n].samples.append((pt, vals[n].value()))
            if any(grads[n]):
                flags[n].status = "nonconstant"
        indep = max(indep, linalg.rank_mod_p([grads[n] for n in RATIONAL_INVARIANTS], prime))
    if not found:
        raise SingularFrame("no regular sample point for the invariants")
    return Signature(flags, "pointwise", indep)


def _residue(c: Fraction, p: int) -> int | None:
    if c.denominator % p == 0:
        return None
    return c.numerator % p * pow(c.denominator, p - 2, p) % p


def _obstruction(a: InvariantFlag, b: InvariantFlag) -> str | None:
    """Reason why a constant a cannot match b, or None."""
    if a.status != "constant":
        return None
    if b.status == "nonconstant":
        return f"constant {a.value} on one side, non-constant on the other"
    if b.status == "constant":
        return f"different constants {a.value} and {b.value}" if a.value != b.value else None
    for pt, v in b.samples:
        if b.prime is None:
            if v != a.value:
                return f"constant {a.value} against value {v} at {tuple(str(c) for c in pt)}"
        else:
            r = _residue(a.value, b.prime)
            if r is not None and r != v:
                return f"constant {a.value} against a different residue mod {b.prime} at {tuple(str(c) for c in pt)}"
    return None


@dataclass
class Comparison:
    verdict: str  # "DistinctCertified" or "NotDistinguished"
    reasons: dict[str, str]
    signatures: tuple[Signature, Signature]

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "reasons": dict(self.reasons),
            "signatures": [s.to_dict() for s in self.signatures],
        }


def compare(E1: MAEquation, E2: MAEquation, *, seed: int = 0, ceiling: int | None = DEFAULT_CEILING) -> Comparison:
    """One-sided test: an invariant constant for one equation and not that constant for the other.

    DistinctCertified is a proof of inequivalence; NotDistinguished asserts
    nothing.
    """
    s1 = signature(E1, seed=seed, ceiling=ceiling)
    s2 = signature(E2, seed=seed, ceiling=ceiling)
    reasons = {}
    for n in RATIONAL_INVARIANTS:
        why = _obstruction(s1.flags[n], s2.flags[n]) or _obstruction(s2.flags[n], s1.flags[n])
        if why:
            reasons[n] = why
    verdict = "DistinctCertified" if reasons else "NotDistinguished"
    return Comparison(verdict, reasons, (s1, s2))


# contact covariance --------------------------------------------------------


@dataclass
class CovarianceResult:
    mode: str
    residuals: dict[str, Any]  # exact zero test per invariant, or per-point differences
    transformed: MAEquation
    points: list[tuple] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        if self.mode == "symbolic":
            return all(r.is_zero() for r in self.residuals.values())
        return all(all(d == 0 for d in ds) for ds in self.residuals.values())

    def to_dict(self) -> dict:
        if self.mode == "symbolic":
            res = {k: v.to_text() for k, v in self.residuals.items()}
        else:
            res = {k: [str(d) for d in ds] for k, ds in self.residuals.items()}
        return {
            "mode": self.mode,
            "passed": self.passed,
            "residuals": res,
            "points": [[str(c) for c in pt] for pt in self.points],
            "transformed": self.transformed.to_dict(),
        }


def transform_equation(E: MAEquation, phi: Diffeo) -> MAEquation:
    """Image of E under a contact map, via its Monge distribution."""
    if contact_multiplier(phi) is None:
        raise NotContact(f"{phi.name or 'map'} does not pull U back to a multiple of U")
    frame = monge_distribution(E)
    X1, X2 = pushforward(phi, frame.X1), pushforward(phi, frame.X2)
    return reconstruct_equation(X1, X2, name=f"{E.name}'" if E.name else "")


def covariance_check(
    E: MAEquation,
    phi: Diffeo,
    *,
    mode: str = "auto",
    points: int = 8,
    seed: int = 0,
    ceiling: int | None = DEFAULT_CEILING,
    order: int = POINTWISE_ORDER - 1,
    variant: str = DEFAULT_VARIANT,
) -> CovarianceResult:
    """Check I' o Phi = I for the rational invariants of E and of its image E'.

    Symbolically the residuals are rational functions that must vanish
    identically. In pointwise mode both sides are exact rational values at
    ``points`` random points p and Phi(p).
    """
    E2 = transform_equation(E, phi)
    Z1, X1 = frame_inputs(_generic_frame(E, seed))
    Z2, X2 = frame_inputs(_generic_frame(E2, seed))
    if mode in ("symbolic", "auto"):
        try:
            lim = None if mode == "symbolic" else ceiling
            r1 = report_from_fields(Z1, X1, mode="symbolic", ceiling=lim, variant=variant)
            r2 = report_from_fields(Z2, X2, mode="symbolic", ceiling=lim, variant=variant)
            residuals = {n: phi.pull_function(r2.rational[n]) - r1.rational[n] for n in RATIONAL_INVARIANTS}
            return CovarianceResult("symbolic", residuals, E2)
        except SizeCeilingExceeded:
            if mode == "symbolic":
                raise
    rng = random.Random(seed)
    residuals: dict[str, list] = {n: [] for n in RATIONAL_INVARIANTS}
    used: list[tuple] = []
    for _ in range(20 * points):
        if len(used) == points:
            break
        pt = _small_point(rng, WITNESS_BOUND)
        try:
            image = phi(pt)
            r1 = pointwise_report(Z1, X1, point=pt, order=order, variant=variant)
            r2 = pointwise_report(Z2, X2, point=image, order=order, variant=variant)
            diffs = {n: r2.rational[n].value() - r1.rational[n].value() for n in RATIONAL_INVARIANTS}
        except _SKIP:
            continue
        used.append(pt)
        for n, d in diffs.items():
            residuals[n].append(d)
    if len(used) < points:
        raise SingularFrame(f"only {len(used)} regular sample points found")
    return CovarianceResult("pointwise", residuals, E2, used)


# verification suite --------------------------------------------------------


@dataclass
class Check:
    name: str
    passed: bool
    mode: str
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "mode": self.mode, "detail": self.detail}


@dataclass
class Verification:
    verdict: str
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


def _values(rep: InvariantReport) -> dict[str, Any]:
    out = {}
    for n in RATIONAL_INVARIANTS:
        v = rep.rational[n]
        out[n] = v if isinstance(v, RationalFn) else v.value()
    return out


def _same(a: dict, b: dict) -> list[str]:
    bad = []
    for n in a:
        d = a[n] - b[n]
        if not (d.is_zero() if isinstance(d, RationalFn) else d == 0):
            bad.append(n)
    return bad


def _reports(pairs, *, ceiling, seed, variant, order):
    """Reports for several (Z, X, U) triples, all symbolic or all at one shared point."""
    try:
        return "symbolic", [
            report_from_fields(Z, X, U, mode="symbolic", ceiling=ceiling, variant=variant) for Z, X, U in pairs
        ], None
    except SizeCeilingExceeded:
        pass
    rng = random.Random(seed)
    last: Exception | None = None
    for _ in range(20):
        pt = _small_point(rng, WITNESS_BOUND)
        try:
            reps = [pointwise_report(Z, X, U, point=pt, order=order, variant=variant) for Z, X, U in pairs]
            return "pointwise", reps, pt
        except _SKIP as exc:
            last = exc
    raise SingularFrame(f"no regular sample point: {last}")


def verify_equation(
    E: MAEquation,
    *,
    seed: int = 0,
    ceiling: int | None = DEFAULT_CEILING,
    variant: str = DEFAULT_VARIANT,
    contact_points: int = 2,
    order: int = POINTWISE_ORDER - 1,
) -> Verification:
    """Re-derive every identity the pipeline relies on for one equation.

    Symbolic wherever closed forms stay under the ceiling, otherwise exact
    jets at random rational points; each check records its mode.
    """
    cl = classify(E, seed=seed)
    checks: list[Check] = []
    if cl.frame is None:
        return Verification(cl.verdict, checks)
    frame = cl.frame

    def run(name: str, fn):
        try:
            mode, detail = fn()
            checks.append(Check(name, True, mode, detail))
        except (IdentityViolation, AssertionError) as exc:
            checks.append(Check(name, False, "symbolic", str(exc)))

    run("frame", lambda: (frame.check(), ("symbolic", "U(X1) = U(X2) = dU(X1, X2) = 0, [X1, X2] = X3"))[1])

    def roundtrip():
        g = common_factor(E, reconstruct_equation(frame.X1, frame.X2))
        assert g is not None, "reconstructed coefficients are not proportional"
        return "symbolic", f"common factor {g.to_text()}"

    run("round trip", roundtrip)
    if cl.verdict != "Generic":
        return Verification(cl.verdict, checks)

    Z, X = frame_inputs(frame)
    U = contact_form()

    def identities():
        mode, reps, pt = _reports([(Z, X, U)], ceiling=ceiling, seed=seed, variant=variant, order=order)
        where = "" if pt is None else f" at {tuple(str(c) for c in pt)}"
        return mode, "pairing identities and decomposition residuals" + where

    run("chain identities", identities)

    def representative():
        others = [w for w in ("X1", "X2") if w != frame.complement]
        alt = None
        for w in others:
            try:
                alt = frame.with_complement(w).complement_field()
                break
            except RankDeficient:
                continue
        if alt is None:
            return "symbolic", "only one admissible complement"
        mode, (a, b), _ = _reports([(Z, X, U), (Z, alt, U)], ceiling=ceiling, seed=seed, variant=variant, order=order)
        bad = _same(_values(a), _values(b))
        assert not bad, f"complement choice changes {bad}"
        return mode, "X1 and X2 complements agree"

    run("representative independence", representative)

    def gauge_check():
        rng = random.Random(seed)
        f = 1 + random_polynomial(rng, 1, 2)
        h = 2 + random_polynomial(rng, 1, 2)
        Zb, Ub = gauge(Z, U, f, h)
        mode, (a, b), pt = _reports([(Z, X, U), (Zb, X, Ub)], ceiling=ceiling, seed=seed, variant=variant, order=order)
        bad = _same(_values(a), _values(b))
        fv = f if mode == "symbolic" else f.evaluate(pt)
        t, tb = a.theta, b.theta
        pairs = [(t.s3, tb.s3, 3), (t.s4, tb.s4, 4), (t.s31, tb.s31, 8)]
        for base, barred, w in pairs:
            if mode == "pointwise":
                base, barred = base.value(), barred.value()
            d = barred * fv**w - base
            if not (d.is_zero() if isinstance(d, RationalFn) else d == 0):
                bad.append(f"Theta weight {w}")
        assert not bad, f"gauge ({f.to_text()}, {h.to_text()}) breaks {bad}"
        return mode, f"f = {f.to_text()}, h = {h.to_text()}"

    run("gauge covariance", gauge_check)
    for phi in (translation([1, -1, 2, 0, 0]), legendre_map()):

        def contact(phi=phi):
            res = covariance_check(E, phi, seed=seed, ceiling=ceiling, points=contact_points, variant=variant, order=order)
            assert res.passed, f"{phi.name}: residuals do not vanish"
            return res.mode, phi.name

        run(f"contact covariance ({phi.name})", contact)
    return Verification(cl.verdict, checks)
