"""Defaults as rich, attackable objects.

A default rule on a scope X says most of X falls under the conclusion,
with named exception sets, a small budget for unexplained "surprise"
violations, and a homogeneity presumption (it passes down to subsets
unless explicitly blocked).  A negative-polarity rule states the absence
of the corresponding positive regularity without asserting its opposite.

The theory record collects background formulas (inviolable), rules and
inheritance blocks; queries compute which defaults are visible at a
point and which survive conflict elimination there (the valid ones).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Literal, Mapping, Sequence

from .inconsistency import ArgumentUnit, minimal_inconsistent_subsets
from .logic import (
    Formula,
    ModelSet,
    Signature,
    conjoin,
    format_formula,
    is_consistent,
    models,
    models_of_all,
)

Provenance = Literal["plain", "expert", "agreed", "confirmed"]


class DefaultTheoryError(ValueError):
    pass


class DuplicateRuleError(DefaultTheoryError):
    pass


class UnsatisfiableScopeError(DefaultTheoryError):
    pass


class UnsatisfiablePointError(DefaultTheoryError):
    pass


class BlockOutsideScopeError(DefaultTheoryError):
    pass


class ConsistencyConditionError(DefaultTheoryError):
    pass


@dataclass(frozen=True)
class SizePolicy:
    """Numerical interpretation of "most", "small" and "very small"."""

    tau_most: float = 0.7
    tau_small: float = 0.3
    eps_very_small: float = 0.05

    def __post_init__(self):
        if not 0.5 < self.tau_most <= 1:
            raise DefaultTheoryError("tau_most must lie in (0.5, 1]")
        if not 0 <= self.eps_very_small <= self.tau_small < 0.5:
            raise DefaultTheoryError(
                "need 0 <= eps_very_small <= tau_small < 0.5"
            )


@dataclass(frozen=True)
class DefaultRule:
    """A default (scope : conclusion) with its attackable components.

    `negative=True` flips the polarity: the rule denies the regularity
    "most of scope satisfies conclusion" without asserting that most of
    the scope violates it.
    """

    id: str
    scope: Formula
    conclusion: Formula
    negative: bool = False
    exception_sets: tuple[Formula, ...] = ()
    surprise_budget: float = 0.05
    homogeneous: bool = True
    provenance: Provenance = "plain"

    def __post_init__(self):
        if not 0 <= self.surprise_budget <= 1:
            raise DefaultTheoryError("surprise budget must lie in [0, 1]")


@dataclass(frozen=True)
class SizeGateReport:
    passed: bool
    hard_failed: bool
    most_ratio: float
    exception_ratio: float
    surprise_ratio: float
    messages: tuple[str, ...]


@dataclass(frozen=True)
class ConsistencyReport:
    passed: bool
    violations: tuple[str, ...]


EliminationCause = Literal["classical-phase", "default-phase"]


@dataclass(frozen=True)
class ValidityResult:
    point: Formula
    visible: frozenset[str]
    eliminated: tuple[tuple[str, EliminationCause], ...]
    valid: frozenset[str]


@dataclass(frozen=True)
class DefaultTheoryRecord:
    """Immutable theory: signature, background, rules, blocks, policy."""

    signature: Signature
    background: tuple[Formula, ...] = ()
    defaults: tuple[DefaultRule, ...] = ()
    inheritance_blocks: tuple[tuple[str, Formula], ...] = ()
    size_policy: SizePolicy = field(default_factory=SizePolicy)

    def rule(self, rule_id: str) -> DefaultRule:
        for d in self.defaults:
            if d.id == rule_id:
                return d
        raise DefaultTheoryError(f"unknown default id {rule_id!r}")

    def background_models(self) -> ModelSet:
        return models_of_all(self.background, self.signature)

    def scope_models(self, rule: DefaultRule) -> ModelSet:
        """The rule's scope within the background-restricted universe."""
        return models(rule.scope, self.signature) & self.background_models()


def attach(theory: DefaultTheoryRecord, rule: DefaultRule) -> DefaultTheoryRecord:
    """Extend the theory with a rule; its scope joins the attachment family.

    Rejects duplicate ids and scopes with no model inside the
    background-restricted universe (a default on an empty set says
    nothing and cannot meet any reading of "most").  Exception sets must
    sit inside the scope, and the surprise budget inside the policy's
    "very small" threshold.
    """
    if any(d.id == rule.id for d in theory.defaults):
        raise DuplicateRuleError(f"default id {rule.id!r} already attached")
    scope = theory.scope_models(rule)
    if not scope:
        raise UnsatisfiableScopeError(
            f"scope of {rule.id!r} has no models under the background"
        )
    for exc in rule.exception_sets:
        exc_models = models(exc, theory.signature) & theory.background_models()
        if not exc_models.issubset(scope):
            raise DefaultTheoryError(
                f"exception set {format_formula(exc)!r} of {rule.id!r} "
                "is not inside the rule's scope"
            )
    if rule.surprise_budget > theory.size_policy.eps_very_small:
        raise DefaultTheoryError(
            f"surprise budget of {rule.id!r} exceeds the policy's "
            f"very-small threshold {theory.size_policy.eps_very_small}"
        )
    return replace(theory, defaults=theory.defaults + (rule,))


def block_inheritance(
    theory: DefaultTheoryRecord, default_id: str, subset: Formula
) -> DefaultTheoryRecord:
    """Stop the rule from passing down to the given subset of its scope."""
    rule = theory.rule(default_id)
    if not rule.homogeneous:
        raise DefaultTheoryError(
            f"default {default_id!r} is not homogeneous; there is no "
            "downward inheritance to block"
        )
    sub = models(subset, theory.signature) & theory.background_models()
    if not sub.issubset(theory.scope_models(rule)):
        raise BlockOutsideScopeError(
            f"block formula {format_formula(subset)!r} is not inside "
            f"the scope of {default_id!r}"
        )
    return replace(
        theory,
        inheritance_blocks=theory.inheritance_blocks + ((default_id, subset),),
    )


# ---------------------------------------------------------------------------
# consistency conditions
# ---------------------------------------------------------------------------


def _consistency_unit(rule: DefaultRule) -> Formula:
    """The classical content checked for a rule at its own point.

    A positive rule needs a model of its conclusion there; a negative
    rule needs a model of the conclusion's negation (it claims the
    regularity fails, so some scope member must violate it).
    """
    from .logic import Not

    return Not(rule.conclusion) if rule.negative else rule.conclusion


def check_consistency_conditions(theory: DefaultTheoryRecord) -> ConsistencyReport:
    """Background consistent, and per attachment point the attached
    defaults are jointly satisfiable there together with the background.

    Violations are returned, never raised.
    """
    violations: list[str] = []
    sig = theory.signature
    if not is_consistent(list(theory.background), sig):
        violations.append("background theory is classically inconsistent")
    else:
        bg = theory.background_models()
        groups: dict[int, list[DefaultRule]] = {}
        for d in theory.defaults:
            key = (models(d.scope, sig) & bg).mask
            groups.setdefault(key, []).append(d)
        for rules in groups.values():
            point = models(rules[0].scope, sig) & bg
            joint = point
            for d in rules:
                joint = joint & models(_consistency_unit(d), sig)
            if not joint:
                ids = ", ".join(d.id for d in rules)
                violations.append(
                    f"defaults at scope {format_formula(rules[0].scope)!r} "
                    f"({ids}) have no common model with the background"
                )
    return ConsistencyReport(passed=not violations, violations=tuple(violations))


def require_consistency_conditions(theory: DefaultTheoryRecord) -> None:
    report = check_consistency_conditions(theory)
    if not report.passed:
        raise ConsistencyConditionError("; ".join(report.violations))


# ---------------------------------------------------------------------------
# size gate
# ---------------------------------------------------------------------------


def _measure(carrier: ModelSet, weights: Mapping[str, float] | None) -> float:
    if weights is None:
        return float(len(carrier))
    return sum(weights.get(v.bits(), 1.0) for v in carrier)


def check_size_gate(
    rule: DefaultRule,
    universe: ModelSet,
    policy: SizePolicy,
    weights: Mapping[str, float] | None = None,
) -> SizeGateReport:
    """Numerical gate for one rule over an explicit finite universe.

    The scope must mostly satisfy the conclusion, the union of declared
    exception sets must stay small, and the leftover surprise members
    (violators outside every exception set) must stay very small, also
    fitting the rule's own declared budget.  A scope with no satisfying
    member at all hard-fails regardless of thresholds.  `weights` maps
    valuation bitstrings to weights (unlisted members weigh 1).
    """
    sig = universe.signature
    scope = models(rule.scope, sig) & universe
    if not scope:
        return SizeGateReport(False, True, 0.0, 0.0, 0.0,
                              ("scope is empty in this universe",))
    conclusion = models(rule.conclusion, sig) & universe
    if rule.negative:
        conclusion = universe - conclusion
    scope_size = _measure(scope, weights)
    inside = scope & conclusion
    if not inside:
        return SizeGateReport(
            False, True, 0.0, 0.0, 0.0,
            ("no scope member satisfies the conclusion",),
        )
    exceptions = sig.empty()
    for exc in rule.exception_sets:
        exceptions = exceptions | (models(exc, sig) & universe)
    exceptions = exceptions & scope
    surprise = (scope - conclusion) - exceptions
    most_ratio = _measure(inside, weights) / scope_size
    exception_ratio = _measure(exceptions, weights) / scope_size
    surprise_ratio = _measure(surprise, weights) / scope_size
    surprise_bound = min(policy.eps_very_small, rule.surprise_budget)
    messages = []
    if most_ratio < policy.tau_most:
        messages.append(
            f"only {most_ratio:.3f} of the scope satisfies the conclusion "
            f"(need >= {policy.tau_most})"
        )
    if exception_ratio > policy.tau_small:
        messages.append(
            f"exception sets cover {exception_ratio:.3f} of the scope "
            f"(allowed <= {policy.tau_small})"
        )
    if surprise_ratio > surprise_bound:
        messages.append(
            f"surprise members cover {surprise_ratio:.3f} of the scope "
            f"(allowed <= {surprise_bound})"
        )
    return SizeGateReport(
        passed=not messages,
        hard_failed=False,
        most_ratio=most_ratio,
        exception_ratio=exception_ratio,
        surprise_ratio=surprise_ratio,
        messages=tuple(messages),
    )


# ---------------------------------------------------------------------------
# visibility and validity
# ---------------------------------------------------------------------------


def _point_models(theory: DefaultTheoryRecord, beta: Formula) -> ModelSet:
    point = models(beta, theory.signature) & theory.background_models()
    if not point:
        raise UnsatisfiablePointError(
            f"point {format_formula(beta)!r} has no models under the background"
        )
    return point


def visible_defaults(theory: DefaultTheoryRecord, beta: Formula) -> frozenset[str]:
    """Ids of defaults whose scope is entailed at `beta` (modulo the
    background), minus those blocked there by an inheritance block."""
    point = _point_models(theory, beta)
    sig = theory.signature
    bg = theory.background_models()
    out = set()
    for d in theory.defaults:
        if not point.issubset(models(d.scope, sig) & bg):
            continue
        blocked = any(
            rule_id == d.id and point.issubset(models(block, sig) & bg)
            for rule_id, block in theory.inheritance_blocks
        )
        if not blocked:
            out.add(d.id)
    return frozenset(out)


SpecificityOrder = Callable[[DefaultRule, DefaultRule], bool]


def scope_specificity(theory: DefaultTheoryRecord) -> SpecificityOrder:
    """stronger(a, b): a's scope is strictly inside b's, modulo background."""

    def stronger(a: DefaultRule, b: DefaultRule) -> bool:
        return theory.scope_models(a).is_strict_subset(theory.scope_models(b))

    return stronger


def _weakest(rules: Sequence[DefaultRule], stronger: SpecificityOrder) -> list[DefaultRule]:
    # weakest = not strictly stronger-dominated by anything in the set,
    # i.e. nobody here has a strictly *larger* scope
    return [a for a in rules if not any(stronger(a, b) for b in rules if b is not a)]


_CLASSICAL_UNIT = "#classical"


def valid_defaults(
    theory: DefaultTheoryRecord,
    beta: Formula,
    stronger: SpecificityOrder | None = None,
) -> ValidityResult:
    """Two-phase elimination of the weakest conflicting defaults at `beta`.

    Phase one resolves every minimal inconsistent subset that involves
    the classical information (background plus the point itself, treated
    as one inviolable block): the least specific defaults of each such
    subset are dropped simultaneously.  Phase two recomputes the minimal
    inconsistent subsets among the surviving defaults' contents alone
    and drops the weakest again.  What remains is valid at `beta`.

    Negative-polarity defaults contribute no content; a surviving
    negative rule instead cancels every visible positive rule with the
    same conclusion and a scope at least as large as its own.

    `stronger` may replace the scope-inclusion specificity order.
    """
    _point_models(theory, beta)
    if stronger is None:
        stronger = scope_specificity(theory)
    sig = theory.signature
    visible = visible_defaults(theory, beta)
    eliminated: list[tuple[str, EliminationCause]] = []
    by_id = {d.id: d for d in theory.defaults}

    positives = [by_id[i] for i in sorted(visible) if not by_id[i].negative]
    negatives = [by_id[i] for i in sorted(visible) if by_id[i].negative]

    # cancellation by negative defaults (a conflict the classical MIS
    # machinery cannot see, since negatives assert nothing)
    cancelled: set[str] = set()
    for neg in negatives:
        neg_conclusion = models(neg.conclusion, sig) & theory.background_models()
        for pos in positives:
            pos_conclusion = models(pos.conclusion, sig) & theory.background_models()
            if pos_conclusion.mask != neg_conclusion.mask:
                continue
            if theory.scope_models(neg).issubset(theory.scope_models(pos)):
                cancelled.add(pos.id)
    for rid in sorted(cancelled):
        eliminated.append((rid, "default-phase"))
    positives = [d for d in positives if d.id not in cancelled]

    def survivors_units(rules: Sequence[DefaultRule]) -> list[ArgumentUnit]:
        return [ArgumentUnit(id=d.id, formula=d.conclusion) for d in rules]

    # phase 1: minimal inconsistent subsets involving the classical block
    classical = conjoin([*theory.background, beta])
    units = [ArgumentUnit(id=_CLASSICAL_UNIT, formula=classical)]
    units += survivors_units(positives)
    report = minimal_inconsistent_subsets(units, sig=sig, cap=len(units))
    drop: set[str] = set()
    for subset in report.mis:
        if _CLASSICAL_UNIT not in subset:
            continue
        members = [by_id[i] for i in subset if i != _CLASSICAL_UNIT]
        drop.update(d.id for d in _weakest(members, stronger))
    for rid in sorted(drop):
        eliminated.append((rid, "classical-phase"))
    positives = [d for d in positives if d.id not in drop]

    # phase 2: recompute over the surviving default contents only
    report = minimal_inconsistent_subsets(
        survivors_units(positives), sig=sig, cap=max(len(positives), 1)
    )
    drop = set()
    for subset in report.mis:
        members = [by_id[i] for i in subset]
        drop.update(d.id for d in _weakest(members, stronger))
    for rid in sorted(drop):
        eliminated.append((rid, "default-phase"))

    valid = visible - {rid for rid, _ in eliminated}
    return ValidityResult(
        point=beta,
        visible=visible,
        eliminated=tuple(eliminated),
        valid=frozenset(valid),
    )


def valid_positive_conclusions(
    theory: DefaultTheoryRecord, result: ValidityResult
) -> list[Formula]:
    """Conclusions contributed by the valid defaults (positives only)."""
    out = []
    for d in theory.defaults:
        if d.id in result.valid and not d.negative:
            out.append(d.conclusion)
    return out
