from __future__ import annotations

import pytest

from conftest import CONSTANT_KAPPA_PAIR, SMALL_PAIRS, small_equation
from pmainv.analysis import (
    QUINTUPLES,
    compare,
    covariance_check,
    independence,
    jacobian_rank,
    signature,
    transform_equation,
    verify_equation,
)
from pmainv.calculus import Diffeo, legendre_map, translation
from pmainv.errors import NotContact, NotGeneric, NoWitnessFound
from pmainv.pma import common_factor, heat_equation
from pmainv.symbolic import P, Q, U, X, Y


def test_jacobian_rank():
    pt = (1, 2, 3, 4, 5)
    assert jacobian_rank([1, 2, 3, 4, 5], pt) == 0
    assert jacobian_rank([X, Y, U, P, Q], pt) == 5
    assert jacobian_rank([X, Y, X + Y, X * Y, Y * Y], pt) == 2


def test_quintuple_ids():
    assert set(QUINTUPLES) == {"1", "2"}
    with pytest.raises(ValueError):
        independence(small_equation(*SMALL_PAIRS[0]), "3")


@pytest.mark.parametrize("quintuple", ["1", "2"])
def test_independence_inconclusive_on_small_equation(quintuple):
    E = small_equation(*SMALL_PAIRS[0])
    with pytest.raises(NoWitnessFound) as exc:
        independence(E, quintuple, budget=4)
    cert = exc.value.certificate
    assert cert is not None and not cert.valid
    # oracle: Jacobian rank of the closed-form rational invariants
    assert cert.rank_at_witness == cert.screen_rank == signature(E).independent
    assert cert.to_dict()["names"] == list(QUINTUPLES[quintuple])


def test_independence_rejects_special():
    with pytest.raises(NotGeneric):
        independence(heat_equation(), "1", budget=1)


def test_exact_and_screened_ranks_agree():
    E = small_equation(*SMALL_PAIRS[1])
    with pytest.raises(NoWitnessFound) as a:
        independence(E, "1", budget=2, prime=None)
    with pytest.raises(NoWitnessFound) as b:
        independence(E, "1", budget=2)
    assert a.value.certificate.rank_at_witness == b.value.certificate.rank_at_witness


def test_signature_symbolic():
    sig = signature(small_equation(*CONSTANT_KAPPA_PAIR))
    assert sig.mode == "symbolic"
    assert sig.flags["kappa1_cubed"].status == "constant"
    assert sig.flags["gamma3"].value == -1
    sig2 = signature(small_equation(*SMALL_PAIRS[0]))
    assert sig2.flags["kappa1_cubed"].status == "nonconstant"
    assert sig2.flags["gamma3"].status == "constant"


def test_compare_cases():
    A = small_equation(*CONSTANT_KAPPA_PAIR)
    B = small_equation(*SMALL_PAIRS[0])
    c = compare(A, B)
    assert c.verdict == "DistinctCertified"
    assert "kappa1_cubed" in c.reasons
    assert compare(B, B).verdict == "NotDistinguished"
    assert compare(B, B.scaled(3)).verdict == "NotDistinguished"


def test_compare_pointwise_side():
    A = small_equation(*CONSTANT_KAPPA_PAIR)
    B = small_equation(*SMALL_PAIRS[0])
    c = compare(A, B, ceiling=10)
    assert c.signatures[1].mode == "pointwise"
    assert c.verdict == "DistinctCertified"


def test_transform_requires_contact_map():
    E = small_equation(*SMALL_PAIRS[0])
    bad = Diffeo([X, Y, U, P, 2 * Q], [X, Y, U, P, Q / 2])
    with pytest.raises(NotContact):
        transform_equation(E, bad)


def test_identity_transform():
    E = small_equation(*SMALL_PAIRS[0])
    ident = Diffeo([X, Y, U, P, Q], [X, Y, U, P, Q])
    assert common_factor(E, transform_equation(E, ident)) is not None
    assert covariance_check(E, ident).passed


@pytest.mark.parametrize("phi", [legendre_map(), translation([1, -1, 2, 0, 0])], ids=["legendre", "translation"])
@pytest.mark.parametrize("pair", SMALL_PAIRS[:2])
def test_covariance_symbolic(pair, phi):
    res = covariance_check(small_equation(*pair), phi)
    assert res.mode == "symbolic"
    assert res.passed


def test_covariance_pointwise():
    res = covariance_check(small_equation(*SMALL_PAIRS[0]), legendre_map(), mode="pointwise", points=3)
    assert res.mode == "pointwise" and len(res.points) == 3
    assert res.passed


def test_verify_small_equation():
    v = verify_equation(small_equation(*SMALL_PAIRS[1]))
    assert v.passed, [c for c in v.checks if not c.passed]
    assert v.verdict == "Generic"
    names = [c.name for c in v.checks]
    assert len(names) == len(set(names)) >= 5


def test_verify_special_equation():
    v = verify_equation(heat_equation())
    assert v.passed
    assert v.verdict == "Special"
