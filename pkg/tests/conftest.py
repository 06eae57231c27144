from __future__ import annotations

import pytest

from defarg import Signature, parse_formula, parse_theory_text
from defarg.inconsistency import ArgumentUnit, ElementDomain
from defarg.protocol import Participant, SessionConfig

TWEETY_TEXT = """\
atoms: b, p, f
background: p -> b
d1: b ~> f
d2: p ~> ~f
"""

# two overlapping scopes plus one nested inside the second; the payload
# atom w doubles every cell so both packet halves can be populated
FIXTURE_E_TEXT = """\
atoms: a, a1, a2, w
background: a2 -> a1
dA: a ~> w
dB: a1 ~> w
dC: a2 ~> w
"""


@pytest.fixture
def tweety():
    return parse_theory_text(TWEETY_TEXT)


@pytest.fixture
def fixture_e():
    return parse_theory_text(FIXTURE_E_TEXT)


@pytest.fixture
def symmetric_domain():
    return ElementDomain(("x", "a", "b", "c"))


@pytest.fixture
def symmetric_units():
    return [
        ArgumentUnit(id="A", elements=frozenset({"x", "a"})),
        ArgumentUnit(id="B", elements=frozenset({"x", "b"})),
        ArgumentUnit(id="C", elements=frozenset({"x", "c"})),
        ArgumentUnit(id="Y", elements=frozenset({"a", "b", "c"})),
    ]


@pytest.fixture
def symmetric_config():
    return SessionConfig(
        participants=(
            Participant("p1", "One"),
            Participant("p2", "Two"),
            Participant("arb", "Arbiter", "arbiter"),
        ),
        elements=("x", "a", "b", "c"),
    )


@pytest.fixture
def formula_config():
    return SessionConfig(
        participants=(
            Participant("p1", "One"),
            Participant("p2", "Two"),
            Participant("arb", "Arbiter", "arbiter"),
        ),
        atoms=("b", "p", "f"),
    )


def parse(text: str, sig: Signature):
    return parse_formula(text, sig)
