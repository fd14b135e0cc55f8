from __future__ import annotations

import random

import pytest

from pmainv.pma import directing_pair, reconstruct_equation
from pmainv.symbolic import RationalFn, X, Y, U, P, Q

# directing pairs (a, b) of small generic equations with nonvanishing Theta3
SMALL_PAIRS = [("q+x*u", "p"), ("q+y^2", "x*p"), ("q+x*y", "y*p")]
CONSTANT_KAPPA_PAIR = ("q+x^2*y", "x")


def small_equation(a: str, b: str):
    Z, Xf = directing_pair(a, b)
    return reconstruct_equation(Z, Xf, name=f"({a}, {b})")


@pytest.fixture
def rng():
    return random.Random(20240611)


def random_rational(rng: random.Random, degree: int = 2, terms: int = 3, with_den: bool = True) -> RationalFn:
    gens = [X, Y, U, P, Q]

    def poly():
        acc = RationalFn(rng.randint(-3, 3))
        for _ in range(terms):
            m = RationalFn(rng.choice([-3, -2, -1, 1, 2, 3]))
            for _ in range(rng.randint(1, degree)):
                m = m * rng.choice(gens)
            acc = acc + m
        return acc

    num = poly()
    if not with_den:
        return num
    den = poly()
    while den.is_zero():
        den = poly()
    return num / den


# acceptance verdict lines, printed once at the end of the session
ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, passed: bool, detail: str = "") -> None:
    line = f"{criterion} {'PASS' if passed else 'FAIL'}" + (f"  {detail}" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[0][1:])):
            terminalreporter.write_line(line)
