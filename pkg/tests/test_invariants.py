from __future__ import annotations

from fractions import Fraction

import pytest
import sympy

from conftest import CONSTANT_KAPPA_PAIR, SMALL_PAIRS
from pmainv import linalg
from pmainv.calculus import contact_form
from pmainv.errors import NotGeneric, SingularFrame, SizeCeilingExceeded, VanishingSemiInvariant
from pmainv.invariants import (
    CORRECTED_GAUGE_LAW,
    PRINTED_GAUGE_LAW,
    CoeffQuad,
    GradedScalar,
    audit_gauge_law,
    gauge,
    gauge_law,
    invariant_report,
    normalize,
    pairing_matrix,
    report_from_fields,
    run_chain,
    variant_arbiter,
)
from pmainv.jets import DEFAULT_PRIME
from pmainv.pma import directing_pair, example_equation, heat_equation, simple_generic_equation
from pmainv.symbolic import RationalFn, X, Y, U, P, Q, parse

GAUGES = [("1+x^2", "2+y*p"), ("3", "1+u"), ("x-2*q", "1"), ("2+p", "x*y-1"), ("1", "5+q^2"), ("y+4", "u-3")]
EXAMPLE_POINT = (1, 2, 1, 1, 3)
EXAMPLE_KAPPA1_CUBED = Fraction(
    -228446187539649835512470902421216, 1224213499073849422596362760375
)


def chain_of(pair, **kw):
    Z, Xf = directing_pair(*pair)
    return Z, Xf, run_chain(Z, Xf, **kw)


@pytest.mark.parametrize("pair", SMALL_PAIRS)
def test_pairing_identities(pair):
    Z, Xf, ch = chain_of(pair)
    a = ch.alpha
    for k in range(5):
        for l in range(5):
            if k + l <= 2:
                assert a[k, l].is_zero()
    for k in range(1, 4):
        assert (a[k, 3 - k] + a[k - 1, 4 - k]).is_zero()
    assert not a[3, 0].is_zero()


def test_pairing_check_rejects_bad_input():
    Z, Xf = directing_pair(*SMALL_PAIRS[0])
    U0 = contact_form()
    # with X = Z every pairing vanishes, alpha[3][0] included
    with pytest.raises(SingularFrame):
        pairing_matrix([Z] * 5, [U0] * 5)


@pytest.mark.parametrize("pair", SMALL_PAIRS)
def test_r_matches_linear_solve(pair):
    Z, Xf, ch = chain_of(pair)
    f = ch.forms
    sol = linalg.solve([list(f[3]), list(f[2]), list(f[1]), list(f[0])], [-c for c in f[4]])
    assert sol is not None
    assert tuple(sol) == tuple(ch.r.values)


@pytest.mark.parametrize("pair", SMALL_PAIRS)
def test_rho_decomposition(pair):
    Z, Xf, ch = chain_of(pair)
    fl, rho = ch.fields, ch.rho
    W = fl[4] + fl[3] * rho[1] + fl[2] * rho[2] + fl[1] * rho[3] + fl[0] * rho[4] + Z * rho.rho5
    assert W.is_zero()


def test_normalize_with_vanishing_p1():
    Zop = lambda s: s.diff("x")  # noqa: E731
    c = CoeffQuad((RationalFn(0), X * Y, U, P * Q), "p")
    Pn = normalize(c, Zop)
    assert (Pn[2], Pn[3], Pn[4]) == (X * Y, U, P * Q)


def test_normalize_variants_differ_only_in_P2():
    Zop = lambda s: s.diff("x")  # noqa: E731
    c = CoeffQuad((X * X, Y, U, P), "p")
    a, b = normalize(c, Zop, "classical"), normalize(c, Zop, "printed")
    assert a[3] == b[3] and a[4] == b[4]
    assert a[2] - b[2] == 4 * X * X - X**4
    with pytest.raises(ValueError):
        normalize(c, Zop, "other")


@pytest.mark.parametrize("pair", SMALL_PAIRS)
def test_constant_rescale_scales_P2(pair):
    Z, Xf, ch = chain_of(pair)
    Zb, Ub = gauge(Z, contact_form(), 2, 1)
    chb = run_chain(Zb, Xf, Ub)
    # Z = 2 Zbar
    assert chb.P[2] == ch.P[2] / 4


@pytest.mark.parametrize("pair", SMALL_PAIRS)
def test_h_only_gauge_leaves_P_unchanged(pair):
    Z, Xf, ch = chain_of(pair)
    for h in ("2+y*p", "1+u", "x*y-1"):
        Zb, Ub = gauge(Z, contact_form(), 1, parse(h))
        chb = run_chain(Zb, Xf, Ub)
        assert [chb.P[i] for i in (2, 3, 4)] == [ch.P[i] for i in (2, 3, 4)]


@pytest.mark.parametrize("pair", SMALL_PAIRS)
def test_theta_weights(pair):
    Z, Xf, ch = chain_of(pair)
    for fs, hs in GAUGES:
        f, h = parse(fs), parse(hs)
        Zb, Ub = gauge(Z, contact_form(), f, h)
        tb = run_chain(Zb, Xf, Ub).theta
        assert tb.s3 * f**3 == ch.theta.s3
        assert tb.s4 * f**4 == ch.theta.s4
        assert tb.s31 * f**8 == ch.theta.s31


@pytest.mark.parametrize("pair", SMALL_PAIRS)
def test_gauge_law_matches_recomputation(pair):
    Z, Xf, ch = chain_of(pair)
    for fs, hs in GAUGES[:3]:
        f, h = parse(fs), parse(hs)
        Zb, Ub = gauge(Z, contact_form(), f, h)
        pb = run_chain(Zb, Xf, Ub).p
        law = gauge_law(ch.p, f, h, Z)
        assert tuple(law.values) == tuple(pb.values)


def test_printed_table_audit():
    Z, Xf, ch = chain_of(("q+x*y", "y*p"))
    f, h = parse("1+x^2"), parse("2+y*p")
    Zb, Ub = gauge(Z, contact_form(), f, h)
    pb = run_chain(Zb, Xf, Ub).p
    assert audit_gauge_law(ch.p, pb, f, h, Z) == {
        "Z": [False, False, False, False],
        "Zbar": [True, False, True, False],
    }
    assert audit_gauge_law(ch.p, pb, f, h, Z, CORRECTED_GAUGE_LAW)["Zbar"] == [True] * 4


def test_printed_table_exact_for_constant_gauge():
    Z, Xf, ch = chain_of(("q+x*y", "y*p"))
    Zb, Ub = gauge(Z, contact_form(), 3, 5)
    pb = run_chain(Zb, Xf, Ub).p
    audit = audit_gauge_law(ch.p, pb, 3, 5, Z)
    assert audit["Z"] == audit["Zbar"] == [True] * 4


def _formal_rows():
    F, H, p = sympy.symbols("f0:6"), sympy.symbols("h0:6"), sympy.symbols("p1:5")

    def D(e):
        return sum(sympy.diff(e, F[k]) * F[k + 1] + sympy.diff(e, H[k]) * H[k + 1] for k in range(5))

    rows = [[H[0]]]
    for _ in range(4):
        cur = rows[-1]
        nxt = [0] * (len(cur) + 1)
        for k, c in enumerate(cur):
            nxt[k] += D(c)
            nxt[k + 1] += F[0] * c
        rows.append(nxt)
    weights = (1, 4 * p[0], 6 * p[1], 4 * p[2], p[3])
    total = [0] * 5
    for j, w in enumerate(weights):
        for k, c in enumerate(rows[4 - j]):
            total[k] += c * w
    lead = sympy.expand(total[4])
    rb = [total[4 - i] / lead for i in range(1, 5)]
    pbar = [rb[0] / 4, rb[1] / 6, rb[2] / 4, rb[3]]
    # Zbar = Z/f acting on the formal derivatives
    Df, Dh = {0: F[0]}, {0: H[0]}
    for k in range(1, 5):
        Df[k] = sympy.expand(D(Df[k - 1]) / F[0])
        Dh[k] = sympy.expand(D(Dh[k - 1]) / F[0])
    return F[0], H[0], p, pbar, Df, Dh


@pytest.mark.slow
def test_corrected_table_formal():
    f, h, p, pbar, Df, Dh = _formal_rows()
    for table, expected in ((CORRECTED_GAUGE_LAW, [True] * 4), (PRINTED_GAUGE_LAW, [True, False, True, False])):
        got = []
        for i in range(1, 5):
            acc = 0
            for c, pi, factors, hp, fp in table[i]:
                t = sympy.Rational(c.numerator, c.denominator) * (p[pi - 1] if pi else 1)
                for g, k in factors:
                    t *= (Df if g == "f" else Dh)[k]
                acc += t / (h**hp * f**fp)
            got.append(sympy.simplify(acc - pbar[i - 1]) == 0)
        assert got == expected


@pytest.mark.parametrize("pair", SMALL_PAIRS + [CONSTANT_KAPPA_PAIR])
def test_duality_identities(pair):
    Z, Xf, ch = chain_of(pair)
    assert ch.lam.s3 == -ch.theta.s3
    assert ch.lam.s4 == ch.theta.s4
    assert ch.lam.s31 == ch.theta.s31


def test_constant_kappa_fixture_values():
    Z, Xf = directing_pair(*CONSTANT_KAPPA_PAIR)
    rep = report_from_fields(Z, Xf, mode="symbolic")
    q = rep.rational
    assert q["kappa1_cubed"] == RationalFn(Fraction(-12348, 625))
    assert q["kappa2_cubed"] == RationalFn(Fraction(444528, 25))
    assert q["tau1_cubed"] == q["kappa1_cubed"]
    assert q["gamma3"] == RationalFn(-1)


@pytest.mark.parametrize("pair", SMALL_PAIRS)
def test_cube_relations(pair):
    Z, Xf = directing_pair(*pair)
    rep = report_from_fields(Z, Xf, mode="symbolic")
    T3, T4, T31 = rep.theta.s3, rep.theta.s4, rep.theta.s31
    assert rep.rational["kappa1_cubed"] * T3**4 == T4**3
    assert rep.rational["kappa2_cubed"] * T3**8 == T31**3
    assert rep.graded["gamma3"].cube() == rep.rational["gamma3"] ** 3


@pytest.mark.parametrize("pair", SMALL_PAIRS)
def test_N_operators(pair):
    Z, Xf = directing_pair(*pair)
    rep = report_from_fields(Z, Xf, mode="symbolic")
    T3, L3 = rep.theta.s3, rep.lam.s3
    k1 = rep.graded["kappa1"]
    c = k1.cube()
    # N1(s)^3 Theta3 = Z(s)^3 with Z(s) = Z(s^3) / (3 s^2)
    assert rep.N1(k1).cube() * T3 * 27 * c * c == Z(c) ** 3
    s = GradedScalar(c, 0, T3)
    n1, n2 = rep.N1(s).cube(), rep.N2(s).cube()
    assert n1 * T3 == n2 * L3
    assert n1 / n2 == rep.rational["gamma3"]


def test_graded_scalar_rules():
    a = GradedScalar(X, 3, Y)
    b = GradedScalar(U, -1, Y)
    assert (a * b).grade == 2
    assert (a / b).cube() == X**3 / U**3 * Y**4
    with pytest.raises(ValueError):
        a + b
    with pytest.raises(ValueError):
        a * GradedScalar(X, 0, Y, "Lambda3")
    assert GradedScalar(X, 3, Y).real_value(Fraction(2), Fraction(-8)) == pytest.approx(-16.0)


def test_vanishing_theta3():
    with pytest.raises(VanishingSemiInvariant):
        invariant_report(simple_generic_equation(), mode="symbolic")


def test_not_generic():
    with pytest.raises(NotGeneric):
        invariant_report(heat_equation())


def test_variant_arbiter_prefers_classical():
    Z, Xf = directing_pair(*SMALL_PAIRS[0])
    gauges = [(parse(f), parse(h)) for f, h in GAUGES[:3]]
    assert variant_arbiter(Z, Xf, gauges) == {"classical": True, "printed": False}


def test_symbolic_agrees_with_pointwise():
    Z, Xf = directing_pair(*SMALL_PAIRS[1])
    sym = report_from_fields(Z, Xf, mode="symbolic")
    pt = (2, -1, 3, 1, 2)
    pw = report_from_fields(Z, Xf, mode="pointwise", point=pt)
    for name in ("kappa1_cubed", "kappa2_cubed", "gamma3", "gamma4"):
        assert pw.rational[name].value() == sym.rational[name].evaluate(pt)


def test_example_needs_pointwise():
    with pytest.raises(SizeCeilingExceeded):
        invariant_report(example_equation(), mode="symbolic")


@pytest.mark.slow
def test_example_exact_value_and_residue():
    rep = invariant_report(example_equation(), mode="pointwise", point=EXAMPLE_POINT)
    assert rep.rational["kappa1_cubed"].value() == EXAMPLE_KAPPA1_CUBED
    assert rep.rational["gamma3"].value() == -1
    c = EXAMPLE_KAPPA1_CUBED
    assert c.numerator * pow(c.denominator, -1, DEFAULT_PRIME) % DEFAULT_PRIME == 64576729


def test_example_residue_mod_p():
    from pmainv.invariants import pointwise_report
    from pmainv.classify import classify
    from pmainv.invariants import frame_inputs

    Z, Xf = frame_inputs(classify(example_equation()).frame)
    rep = pointwise_report(Z, Xf, point=EXAMPLE_POINT, prime=DEFAULT_PRIME)
    assert rep.rational["kappa1_cubed"].value() == 64576729
    assert rep.choices["prime"] == DEFAULT_PRIME
