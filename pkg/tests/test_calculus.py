from __future__ import annotations


import pytest

from conftest import random_rational
from pmainv.calculus import (
    Diffeo,
    OneForm,
    VectorField,
    bracket,
    chart_swap,
    contact_field,
    contact_form,
    contact_multiplier,
    d_pairing,
    interior,
    legendre_map,
    lie_form,
    proportionality_factor,
    pullback,
    pushforward,
    translation,
)
from pmainv.errors import NotInvertible
from pmainv.symbolic import P, Q, U, X, Y, RationalFn


def random_field(rng, **kw) -> VectorField:
    return VectorField([random_rational(rng, **kw) for _ in range(5)])


def random_form(rng, **kw) -> OneForm:
    return OneForm([random_rational(rng, **kw) for _ in range(5)])


def test_coordinate_brackets():
    dp = VectorField.coordinate("p")
    assert bracket(dp, VectorField([0, 0, P, 0, 0])) == VectorField.coordinate("u")
    assert bracket(dp, dp).is_zero()


def test_lie_form_of_contact_form():
    dp = VectorField.coordinate("p")
    assert lie_form(dp, contact_form()) == OneForm([-1, 0, 0, 0, 0])


def test_bracket_antisymmetric(rng):
    for _ in range(5):
        A, B = random_field(rng, with_den=False), random_field(rng, with_den=False)
        assert bracket(A, B) == -bracket(B, A)


def test_interior_lie_commutator(rng):
    for _ in range(5):
        A, Z = random_field(rng, with_den=False), random_field(rng, with_den=False)
        w = random_form(rng, with_den=False)
        # L_Z (i_A w) = i_[Z,A] w + i_A L_Z w
        assert Z(interior(A, w)) == interior(bracket(Z, A), w) + interior(A, lie_form(Z, w))


def test_d_pairing_cartan(rng):
    for _ in range(5):
        A, B = random_field(rng, with_den=False), random_field(rng, with_den=False)
        w = random_form(rng, with_den=False)
        expected = A(interior(B, w)) - B(interior(A, w)) - interior(bracket(A, B), w)
        assert d_pairing(w, A, B) == expected


def test_contact_field_of_constant_and_u():
    X1, lam = contact_field(1)
    assert X1 == VectorField.coordinate("u") and lam == 0
    Xu, lam = contact_field(U)
    assert lam == 1


def test_contact_field_preserves_contact_structure(rng):
    for _ in range(5):
        f = random_rational(rng, with_den=False)
        Xf, lam = contact_field(f)
        assert interior(Xf, contact_form()) == f
        assert lie_form(Xf, contact_form()) == contact_form() * lam


def test_proportionality_factor():
    w = contact_form() * (X + 1)
    assert proportionality_factor(w, contact_form()) == X + 1
    assert proportionality_factor(OneForm([1, 0, 0, 0, 0]), contact_form()) is None


def test_contact_maps():
    assert contact_multiplier(legendre_map()) == 1
    assert contact_multiplier(chart_swap()) == 1
    assert contact_multiplier(translation([1, 2, 3, 0, 0])) == 1
    # shifting p alone is not contact
    assert contact_multiplier(translation([0, 0, 0, 1, 0])) is None


def test_diffeo_inverse_checked():
    with pytest.raises(NotInvertible):
        Diffeo([X, Y, U, P, Q], [X + 1, Y, U, P, Q])
    with pytest.raises(NotInvertible):
        Diffeo([X, Y, U, P], [X, Y, U, P])


def test_pushforward_respects_brackets(rng):
    phi = legendre_map()
    for _ in range(3):
        A, B = random_field(rng, with_den=False), random_field(rng, with_den=False)
        assert pushforward(phi, bracket(A, B)) == bracket(pushforward(phi, A), pushforward(phi, B))


def test_pullback_pushforward_pairing(rng):
    phi = legendre_map()
    A = random_field(rng, with_den=False)
    w = random_form(rng, with_den=False)
    # (Phi^* w)(A) = w(Phi_* A) o Phi
    assert interior(A, pullback(phi, w)) == phi.pull_function(interior(pushforward(phi, A), w))


def test_rational_fields_commutator():
    A = VectorField([X / (Y + 1), 0, P, 0, Q / (X + 2)])
    Z = VectorField([1, Y * U, 0, 1 / (P + 3), 0])
    w = OneForm([Q, 0, -1 / (U + 1), 0, X])
    assert Z(interior(A, w)) == interior(bracket(Z, A), w) + interior(A, lie_form(Z, w))


def test_inverted_map_round_trip():
    phi = legendre_map()
    psi = phi.inverted()
    pt = (1, 2, 3, 4, 5)
    assert psi(phi(pt)) == tuple(RationalFn(c).constant_value() for c in pt)
