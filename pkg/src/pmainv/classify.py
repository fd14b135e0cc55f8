"""Integrable / generic / special classification of parabolic equations."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from . import linalg
from .calculus import OneForm, VectorField, contact_form, interior, lie_form
from .errors import DegenerateEquation, IdentityViolation, NotParabolic, PoleAtPoint, ZNotInContactPlane
from .pma import MAEquation, MongeFrame, monge_distribution
from .symbolic import RationalFn, random_point

VERDICTS = ("NotParabolic", "Degenerate", "Integrable", "Generic", "Special")


@dataclass
class RankSequence:
    ranks: tuple[int, ...]
    method: list[str]
    minors: list[RationalFn] = field(default_factory=list)

    @property
    def type(self) -> int:
        return type_from_ranks(self.ranks)


def type_from_ranks(ranks) -> int:
    """First r at which the rank of {U, ..., Z^r(U)} stops growing, capped at 3."""
    for r in range(1, len(ranks)):
        if ranks[r] == ranks[r - 1]:
            return r - 1
    return len(ranks) - 1


def _point_rank(rows: list[OneForm], rng: random.Random, tries: int = 8) -> int:
    """Rank at a random rational point; a lower bound for the generic rank."""
    best = 0
    for _ in range(tries):
        pt = random_point(rng, 2000)
        try:
            vals = [[c.evaluate(pt) for c in w] for w in rows]
        except PoleAtPoint:
            continue
        best = max(best, linalg.rank(vals))
        if best == len(rows):
            break
    return best


def rank_sequence(Z: VectorField, U: OneForm | None = None, *, seed: int = 0, max_r: int = 3) -> RankSequence:
    """Generic ranks of {U, Z(U), ..., Z^r(U)} for r = 0..max_r.

    Full rank is certified by an exact evaluation at a random point; a
    deficient point rank is confirmed by fraction-field elimination.
    """
    U = contact_form() if U is None else U
    if not interior(Z, U).is_zero():
        raise ZNotInContactPlane("U(Z) does not vanish identically")
    forms = [U]
    for _ in range(max_r):
        forms.append(lie_form(Z, forms[-1]))
    rng = random.Random(seed)
    ranks: list[int] = []
    method: list[str] = []
    minors: list[RationalFn] = []
    for r in range(max_r + 1):
        rows = forms[: r + 1]
        pr = _point_rank(rows, rng)
        if pr == r + 1:
            ranks.append(pr)
            method.append("point")
            continue
        red, piv = linalg.row_echelon([list(w) for w in rows], full=True)
        ranks.append(len(piv))
        method.append("elimination")
        minors.extend(red[i][j] for i, j in piv if not red[i][j].is_constant())
    for a, b in zip(ranks, ranks[1:]):
        if b not in (a, a + 1):
            raise IdentityViolation(f"rank sequence {ranks} jumps by more than one")
    if ranks[0] != 1:
        raise IdentityViolation("U has rank 0")
    return RankSequence(tuple(ranks), method, minors)


def _wedge_minors(rows: list[VectorField]) -> list[RationalFn]:
    out = []
    for cols in itertools.combinations(range(5), 3):
        M = [[row[c] for c in cols] for row in rows]
        out.append(linalg.determinant(M))
    return out


def is_integrable(frame: MongeFrame) -> bool:
    """X3 lies in span{X1, X2}: every 3x3 minor of (X1, X2, X3) vanishes."""
    if frame.X3.is_zero():
        return True
    return all(m.is_zero() for m in _wedge_minors([frame.X1, frame.X2, frame.X3]))


@dataclass
class Classification:
    verdict: str
    type_of_Z: int | None = None
    form_ranks: tuple[int, ...] | None = None
    singular_locus: list[RationalFn] = field(default_factory=list)
    frame: MongeFrame | None = None
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "type_of_Z": self.type_of_Z,
            "form_ranks": list(self.form_ranks) if self.form_ranks is not None else None,
            "singular_locus": [f.to_text() for f in self.singular_locus],
        }


def _locus(items) -> list[RationalFn]:
    """Nonconstant factors, numerators and denominators, without repeats."""
    seen: list[RationalFn] = []
    for f in items:
        for g in (f.numerator, f.denominator):
            if g.is_constant():
                continue
            monic = g / RationalFn(g.terms()[0][1])
            if monic not in seen:
                seen.append(monic)
    return seen


def classify(E: MAEquation, *, seed: int = 0) -> Classification:
    try:
        frame = monge_distribution(E)
    except NotParabolic as exc:
        return Classification("NotParabolic", message=str(exc))
    except DegenerateEquation as exc:
        return Classification("Degenerate", message=str(exc))
    base_locus = list(frame.division_locus)
    base_locus += [c.denominator for c in frame.Z if not c.denominator.is_constant()]
    if is_integrable(frame):
        return Classification("Integrable", None, None, _locus(base_locus), frame)
    if frame.Z.is_zero():
        raise IdentityViolation("non-integrable frame with vanishing directing field")
    seq = rank_sequence(frame.Z, seed=seed)
    t = seq.type
    verdict = "Generic" if t == 3 else "Special"
    return Classification(verdict, t, seq.ranks, _locus(base_locus + seq.minors), frame)
