from __future__ import annotations

import pytest

from defarg.defaults import (
    BlockOutsideScopeError,
    DefaultRule,
    DefaultTheoryError,
    DefaultTheoryRecord,
    DuplicateRuleError,
    SizePolicy,
    UnsatisfiablePointError,
    UnsatisfiableScopeError,
    attach,
    block_inheritance,
    check_consistency_conditions,
    check_size_gate,
    valid_defaults,
    valid_positive_conclusions,
    visible_defaults,
)
from defarg.logic import Signature, is_consistent, parse_formula

from .oracles import brute_valid_ids


def parse(text, sig):
    return parse_formula(text, sig)


# --- attach ------------------------------------------------------------


def test_attach_collects_scopes():
    sig = Signature(["b", "p", "f"])
    theory = DefaultTheoryRecord(
        signature=sig, background=(parse("p -> b", sig),)
    )
    theory = attach(theory, DefaultRule("d1", parse("b", sig), parse("f", sig)))
    assert [d.id for d in theory.defaults] == ["d1"]
    theory = attach(theory, DefaultRule("d2", parse("p", sig), parse("~f", sig)))
    assert [d.id for d in theory.defaults] == ["d1", "d2"]


def test_attach_duplicate_id():
    sig = Signature(["b", "f"])
    theory = DefaultTheoryRecord(signature=sig)
    theory = attach(theory, DefaultRule("d1", parse("b", sig), parse("f", sig)))
    with pytest.raises(DuplicateRuleError):
        attach(theory, DefaultRule("d1", parse("b", sig), parse("~f", sig)))


def test_attach_unsatisfiable_scope():
    sig = Signature(["b", "f"])
    theory = DefaultTheoryRecord(signature=sig)
    with pytest.raises(UnsatisfiableScopeError):
        attach(theory, DefaultRule("d1", parse("b & ~b", sig), parse("f", sig)))


def test_attach_scope_empty_under_background():
    sig = Signature(["b", "f"])
    theory = DefaultTheoryRecord(signature=sig, background=(parse("~b", sig),))
    with pytest.raises(UnsatisfiableScopeError):
        attach(theory, DefaultRule("d1", parse("b", sig), parse("f", sig)))


def test_attach_checks_exception_sets_inside_scope():
    sig = Signature(["b", "p", "f"])
    theory = DefaultTheoryRecord(signature=sig, background=(parse("p -> b", sig),))
    # p is inside b only modulo the background
    attach(
        theory,
        DefaultRule("d1", parse("b", sig), parse("f", sig), exception_sets=(parse("p", sig),)),
    )
    with pytest.raises(DefaultTheoryError):
        attach(
            theory,
            DefaultRule("d2", parse("p", sig), parse("~f", sig), exception_sets=(parse("b", sig),)),
        )


def test_attach_enforces_surprise_budget_cap():
    sig = Signature(["b", "f"])
    theory = DefaultTheoryRecord(signature=sig)
    with pytest.raises(DefaultTheoryError):
        attach(
            theory,
            DefaultRule("d1", parse("b", sig), parse("f", sig), surprise_budget=0.2),
        )


# --- consistency conditions ---------------------------------------------


def test_inconsistent_background_violation():
    sig = Signature(["p"])
    theory = DefaultTheoryRecord(signature=sig, background=(parse("p & ~p", sig),))
    report = check_consistency_conditions(theory)
    assert not report.passed
    assert "background" in report.violations[0]


def test_same_point_conflict_violation():
    sig = Signature(["b", "f"])
    theory = DefaultTheoryRecord(signature=sig)
    theory = attach(theory, DefaultRule("d1", parse("b", sig), parse("f", sig)))
    theory = attach(theory, DefaultRule("d2", parse("b", sig), parse("~f", sig)))
    report = check_consistency_conditions(theory)
    assert not report.passed
    assert "d1" in report.violations[0] and "d2" in report.violations[0]


def test_negative_default_consistent_when_violator_exists():
    sig = Signature(["b", "f"])
    theory = DefaultTheoryRecord(signature=sig)
    theory = attach(
        theory, DefaultRule("d1", parse("b", sig), parse("f", sig), negative=True)
    )
    assert check_consistency_conditions(theory).passed


def test_negative_default_violation_when_conclusion_forced():
    # the background forces every scope member under the conclusion, so
    # denying the regularity has no witness
    sig = Signature(["b", "f"])
    theory = DefaultTheoryRecord(signature=sig, background=(parse("b -> f", sig),))
    theory = attach(
        theory, DefaultRule("d1", parse("b", sig), parse("f", sig), negative=True)
    )
    assert not check_consistency_conditions(theory).passed


# --- size gate -----------------------------------------------------------


def gate_setup():
    sig = Signature(["x", "y", "e", "s"], atom_cap=20)
    universe = sig.universe()
    return sig, universe


def test_size_gate_most_passes():
    # 10-element scope, 9 satisfy: build over a 4-atom universe by weights
    sig = Signature(["x", "y"])
    universe = sig.universe()
    rule = DefaultRule("d", parse("x", sig), parse("y", sig), surprise_budget=0.1)
    policy = SizePolicy(tau_most=0.7, tau_small=0.3, eps_very_small=0.1)
    # scope = {10, 11}; weights make |scope|=10 with 9 in y
    weights = {"11": 9.0, "10": 1.0}
    report = check_size_gate(rule, universe, policy, weights=weights)
    assert report.passed and not report.hard_failed
    assert report.most_ratio == pytest.approx(0.9)


def test_size_gate_hard_fail_on_empty_overlap():
    sig = Signature(["x", "y"])
    rule = DefaultRule("d", parse("x", sig), parse("~x", sig))
    report = check_size_gate(rule, sig.universe(), SizePolicy())
    assert report.hard_failed and not report.passed


def test_size_gate_exception_union_too_big():
    sig = Signature(["x", "e", "y"])
    rule = DefaultRule(
        "d",
        parse("x", sig),
        parse("y", sig),
        exception_sets=(parse("x & e", sig),),
        surprise_budget=0.0,
    )
    policy = SizePolicy(tau_most=0.51, tau_small=0.4, eps_very_small=0.0)
    # weights: scope 10 elements, 6 in the exception set
    weights = {"111": 3.0, "101": 1.0, "110": 3.0, "100": 3.0}
    report = check_size_gate(rule, sig.universe(), policy, weights=weights)
    assert not report.passed
    assert report.exception_ratio == pytest.approx(0.6)


# --- visibility ----------------------------------------------------------


def test_visible_tweety(tweety):
    sig = tweety.signature
    assert visible_defaults(tweety, parse("p", sig)) == {"d1", "d2"}
    assert visible_defaults(tweety, parse("b", sig)) == {"d1"}
    assert visible_defaults(tweety, parse("~b", sig)) == frozenset()


def test_visible_unsatisfiable_point(tweety):
    sig = tweety.signature
    with pytest.raises(UnsatisfiablePointError):
        visible_defaults(tweety, parse("p & ~b", sig))


# --- validity ------------------------------------------------------------


def test_valid_tweety_specificity(tweety):
    sig = tweety.signature
    result = valid_defaults(tweety, parse("p", sig))
    assert result.valid == {"d2"}
    assert result.eliminated == (("d1", "default-phase"),)
    assert result.valid == brute_valid_ids(tweety, parse("p", sig))


def test_valid_tweety_no_conflict(tweety):
    sig = tweety.signature
    result = valid_defaults(tweety, parse("b", sig))
    assert result.valid == {"d1"}
    assert result.eliminated == ()


def test_valid_nixon_symmetric_elimination():
    sig = Signature(["q", "r", "pa"])
    theory = DefaultTheoryRecord(signature=sig)
    theory = attach(theory, DefaultRule("dq", parse("q", sig), parse("pa", sig)))
    theory = attach(theory, DefaultRule("dr", parse("r", sig), parse("~pa", sig)))
    result = valid_defaults(theory, parse("q & r", sig))
    assert result.visible == {"dq", "dr"}
    assert result.valid == frozenset()
    assert {rid for rid, _ in result.eliminated} == {"dq", "dr"}
    assert result.valid == brute_valid_ids(theory, parse("q & r", sig))


def test_valid_classical_phase_elimination():
    # the point itself contradicts the less specific conclusion
    sig = Signature(["b", "f"])
    theory = DefaultTheoryRecord(signature=sig)
    theory = attach(theory, DefaultRule("d1", parse("b", sig), parse("f", sig)))
    result = valid_defaults(theory, parse("b & ~f", sig))
    assert result.valid == frozenset()
    assert result.eliminated == (("d1", "classical-phase"),)


def test_valid_output_consistent_with_point(tweety):
    sig = tweety.signature
    beta = parse("p", sig)
    result = valid_defaults(tweety, beta)
    contents = valid_positive_conclusions(tweety, result)
    assert is_consistent([*tweety.background, beta, *contents], sig)


def test_negative_default_cancels_less_specific_positive():
    sig = Signature(["b", "p", "f"])
    theory = DefaultTheoryRecord(signature=sig, background=(parse("p -> b", sig),))
    theory = attach(theory, DefaultRule("d1", parse("b", sig), parse("f", sig)))
    theory = attach(
        theory, DefaultRule("d2", parse("p", sig), parse("f", sig), negative=True)
    )
    result = valid_defaults(theory, parse("p", sig))
    # the denial blocks flying without concluding not-flying
    assert result.valid == {"d2"}
    assert ("d1", "default-phase") in result.eliminated
    assert valid_positive_conclusions(theory, result) == []


def test_negative_default_loses_to_more_specific_positive():
    sig = Signature(["b", "p", "f"])
    theory = DefaultTheoryRecord(signature=sig, background=(parse("p -> b", sig),))
    theory = attach(
        theory, DefaultRule("d1", parse("b", sig), parse("f", sig), negative=True)
    )
    theory = attach(theory, DefaultRule("d2", parse("p", sig), parse("f", sig)))
    result = valid_defaults(theory, parse("p", sig))
    assert "d2" in result.valid  # the more specific positive stands


def test_valid_with_custom_strength_order(tweety):
    # the elimination order is pluggable: flipping it makes the broad
    # bird rule beat the penguin rule at p
    sig = tweety.signature

    def broad_wins(a, b):
        return tweety.scope_models(b).is_strict_subset(tweety.scope_models(a))

    result = valid_defaults(tweety, parse("p", sig), stronger=broad_wins)
    assert result.valid == {"d1"}
    assert result.eliminated == (("d2", "default-phase"),)


# --- inheritance blocks ---------------------------------------------------


def quaker_theory():
    sig = Signature(["q", "r", "pa"])
    theory = DefaultTheoryRecord(signature=sig)
    theory = attach(theory, DefaultRule("dq", parse("q", sig), parse("pa", sig)))
    return sig, theory


def test_block_hides_default_below_subset():
    sig, theory = quaker_theory()
    theory = block_inheritance(theory, "dq", parse("q & r", sig))
    assert visible_defaults(theory, parse("q & r", sig)) == frozenset()
    assert visible_defaults(theory, parse("q & ~r", sig)) == {"dq"}
    assert visible_defaults(theory, parse("q", sig)) == {"dq"}


def test_block_outside_scope_rejected():
    sig, theory = quaker_theory()
    with pytest.raises(BlockOutsideScopeError):
        block_inheritance(theory, "dq", parse("r", sig))


def test_block_requires_homogeneous_rule():
    sig = Signature(["q", "pa"])
    theory = DefaultTheoryRecord(signature=sig)
    theory = attach(
        theory,
        DefaultRule("dq", parse("q", sig), parse("pa", sig), homogeneous=False),
    )
    with pytest.raises(DefaultTheoryError):
        block_inheritance(theory, "dq", parse("q & pa", sig))


def test_blocks_never_add_visibility():
    sig, theory = quaker_theory()
    blocked = block_inheritance(theory, "dq", parse("q & r", sig))
    for text in ("q", "q & r", "q & ~r", "q & pa"):
        beta = parse(text, sig)
        assert visible_defaults(blocked, beta) <= visible_defaults(theory, beta)
