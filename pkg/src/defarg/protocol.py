"""Arbiter-mediated argumentation sessions.

One arbiter checks consistency after every move and points out the
culprits: the minimal inconsistent subsets of the committed assertions.
Participants may retract (unanimously), or attack and defend the
members of the surviving culprit sets along the components of the
attacked object (a fact, a classical rule, or a default and its parts).
A surviving culprit set with every member defended is a deadlock and
the arbiter declares failure.

States are immutable; every operation returns a new state plus the
events it raised.  A session is a single serialized command stream;
concurrent sessions are independent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Literal, Sequence

from .defaults import (
    DefaultRule,
    DefaultTheoryRecord,
    DefaultTheoryError,
    SizePolicy,
    attach,
    block_inheritance,
)
from .inconsistency import (
    ArgumentUnit,
    ElementDomain,
    InconsistencyReport,
    minimal_inconsistent_subsets,
)
from .logic import (
    Formula,
    Not,
    Signature,
    Top,
    format_formula,
    is_consistent,
    parse_formula,
)

TRANSCRIPT_VERSION = "defarg-transcript v1"

MoveKind = Literal[
    "AssertFact",
    "AssertClassicalRule",
    "AssertDefault",
    "Attack",
    "Defend",
    "Elaborate",
    "Confirm",
    "Agree",
    "ExpertOpinion",
    "RetractProposal",
    "RetractVote",
    "ArbiterQuestion",
    "ArbiterTargetChoice",
]

ASSERTIVE_KINDS = ("AssertFact", "AssertClassicalRule", "AssertDefault", "ExpertOpinion")

AttackComponent = Literal[
    "rule-itself",
    "prerequisite",
    "exception-membership",
    "surprise-membership",
    "size-notion",
    "conclusion",
    "applicability",
    "expert-language",
]

AttackMode = Literal["prove-negation", "argue-consistent-negation", "roundabout"]

Phase = Literal["open", "retraction-vote", "attack-defense", "failed", "closed"]


class ProtocolError(ValueError):
    pass


class PhaseError(ProtocolError):
    pass


class UnknownMoveError(ProtocolError):
    pass


class IllegalComponentError(ProtocolError):
    pass


class VerificationError(ProtocolError):
    pass


class VoteError(ProtocolError):
    pass


class TranscriptError(ProtocolError):
    pass


@dataclass(frozen=True)
class Participant:
    id: str
    name: str
    role: Literal["participant", "arbiter"] = "participant"


@dataclass(frozen=True)
class SessionConfig:
    """Participants, content mode and the policies of one session.

    `atoms` configures a formula session; `elements` an extensional one
    (explicit element sets, no rules or defaults).
    """

    participants: tuple[Participant, ...]
    atoms: tuple[str, ...] = ()
    elements: tuple[str, ...] = ()
    size_policy: SizePolicy = field(default_factory=SizePolicy)
    preference_variant: str = "subset"
    unit_cap: int = 16

    def __post_init__(self):
        arbiters = [p for p in self.participants if p.role == "arbiter"]
        others = [p for p in self.participants if p.role != "arbiter"]
        if len(arbiters) != 1:
            raise ProtocolError("a session needs exactly one arbiter")
        if not others:
            raise ProtocolError("a session needs at least one participant")
        if bool(self.atoms) == bool(self.elements):
            raise ProtocolError("configure either atoms or elements, not both")

    @property
    def arbiter(self) -> Participant:
        return next(p for p in self.participants if p.role == "arbiter")

    @property
    def voters(self) -> tuple[Participant, ...]:
        return tuple(p for p in self.participants if p.role != "arbiter")

    @property
    def extensional(self) -> bool:
        return bool(self.elements)

    def signature(self) -> Signature:
        return Signature(self.atoms)

    def domain(self) -> ElementDomain:
        return ElementDomain(self.elements)


@dataclass(frozen=True)
class Move:
    id: str
    author: str
    kind: MoveKind
    payload: dict[str, Any]
    based_on: tuple[str, ...] = ()

    def to_json(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "author": self.author,
            "kind": self.kind,
            "payload": self.payload,
            "based_on": list(self.based_on),
        }

    @staticmethod
    def from_json(data: dict[str, Any]) -> "Move":
        return Move(
            id=data["id"],
            author=data["author"],
            kind=data["kind"],
            payload=data["payload"],
            based_on=tuple(data.get("based_on", ())),
        )


@dataclass(frozen=True)
class AttackDescriptor:
    target: str
    component: AttackComponent
    mode: AttackMode
    claim: str | None = None  # formula text, meaning depends on mode


@dataclass(frozen=True)
class Verdict:
    outcome: Literal["consistent", "deadlock-failure", "closed-by-agreement"]
    surviving: tuple[str, ...]
    theory_text: str


Proposal = tuple[str, str, tuple[tuple[str, bool], ...]]  # proposal id, target id, votes


@dataclass(frozen=True)
class SessionState:
    config: SessionConfig
    moves: tuple[Move, ...] = ()
    retracted: frozenset[str] = frozenset()
    contested: frozenset[str] = frozenset()
    defended: frozenset[str] = frozenset()
    surprise_marks: tuple[tuple[str, str], ...] = ()  # (default move id, case text)
    phase: Phase = "open"
    report: InconsistencyReport = field(
        default_factory=lambda: InconsistencyReport((), (), {})
    )
    open_proposal: Proposal | None = None
    verdict: Verdict | None = None

    def move(self, move_id: str) -> Move:
        for m in self.moves:
            if m.id == move_id:
                return m
        raise UnknownMoveError(f"unknown move id {move_id!r}")

    def next_move_id(self) -> str:
        return f"m{len(self.moves) + 1}"

    def hanging(self) -> frozenset[str]:
        """Moves whose justification chain reaches a retracted move."""
        out: set[str] = set()
        changed = True
        while changed:
            changed = False
            for m in self.moves:
                if m.id in out or m.id in self.retracted:
                    continue
                if any(b in self.retracted or b in out for b in m.based_on):
                    out.add(m.id)
                    changed = True
        return frozenset(out)

    def active_assertions(self) -> list[Move]:
        return [
            m
            for m in self.moves
            if m.kind in ASSERTIVE_KINDS and m.id not in self.retracted
        ]

    def culprit_ids(self) -> frozenset[str]:
        return self.report.involved_ids()


# ---------------------------------------------------------------------------
# theory reconstruction (formula sessions)
# ---------------------------------------------------------------------------


def _default_rule_from_move(move: Move, sig: Signature) -> DefaultRule:
    p = move.payload
    if move.kind == "ExpertOpinion":
        # a black-box default: opaque scope, expert provenance
        scope_text = p.get("scope", "top")
        return DefaultRule(
            id=move.id,
            scope=parse_formula(scope_text, sig) if scope_text else Top(),
            conclusion=parse_formula(p["conclusion"], sig),
            provenance="expert",
        )
    return DefaultRule(
        id=move.id,
        scope=parse_formula(p["scope"], sig),
        conclusion=parse_formula(p["conclusion"], sig),
        negative=bool(p.get("negative", False)),
        exception_sets=tuple(
            parse_formula(t, sig) for t in p.get("exceptions", ())
        ),
        surprise_budget=float(p.get("surprise", 0.05)),
        homogeneous=bool(p.get("homogeneous", True)),
        provenance=p.get("provenance", "plain"),
    )


def session_theory(state: SessionState) -> DefaultTheoryRecord:
    """Rebuild the default theory from the unretracted commitments.

    Background collects facts and classical rules alike; defaults keep
    their asserting move's id.  Elaborations are replayed in order.
    """
    if state.config.extensional:
        raise ProtocolError("extensional sessions carry no default theory")
    sig = state.config.signature()
    theory = DefaultTheoryRecord(
        signature=sig, size_policy=state.config.size_policy
    )
    background: list[Formula] = []
    for m in state.moves:
        if m.id in state.retracted:
            continue
        if m.kind in ("AssertFact", "AssertClassicalRule"):
            background.append(parse_formula(m.payload["formula"], sig))
    theory = replace(theory, background=tuple(background))
    for m in state.moves:
        if m.id in state.retracted:
            continue
        if m.kind in ("AssertDefault", "ExpertOpinion"):
            theory = attach(theory, _default_rule_from_move(m, sig))
        elif m.kind == "Elaborate":
            theory = _apply_elaboration(theory, m, sig)
        elif m.kind in ("Agree", "Confirm"):
            theory = _note_endorsement(theory, m)
    return theory


def _note_endorsement(theory: DefaultTheoryRecord, move: Move) -> DefaultTheoryRecord:
    """Agreement and confirmation upgrade a plain rule's provenance."""
    target = move.payload.get("target")
    if not any(d.id == target for d in theory.defaults):
        return theory
    rule = theory.rule(target)
    if rule.provenance == "expert":
        return theory  # the black box stays a black box
    if move.kind == "Confirm":
        upgraded = replace(rule, provenance="confirmed")
    elif rule.provenance == "plain":
        upgraded = replace(rule, provenance="agreed")
    else:
        return theory
    defaults = tuple(upgraded if d.id == target else d for d in theory.defaults)
    return replace(theory, defaults=defaults)


def _apply_elaboration(
    theory: DefaultTheoryRecord, move: Move, sig: Signature
) -> DefaultTheoryRecord:
    p = move.payload
    edit = p.get("edit")
    if edit == "add-exception-set":
        target = p["target"]
        rule = theory.rule(target)
        new_rule = replace(
            rule,
            exception_sets=rule.exception_sets
            + (parse_formula(p["formula"], sig),),
        )
        defaults = tuple(new_rule if d.id == target else d for d in theory.defaults)
        return replace(theory, defaults=defaults)
    if edit == "narrow-rule":
        target = p["target"]
        rule = theory.rule(target)
        from .logic import And

        new_rule = replace(rule, scope=And(rule.scope, parse_formula(p["formula"], sig)))
        defaults = tuple(new_rule if d.id == target else d for d in theory.defaults)
        return replace(theory, defaults=defaults)
    if edit == "add-block":
        return block_inheritance(theory, p["target"], parse_formula(p["formula"], sig))
    if edit in ("mark-surprise", "negate-premise"):
        # mark-surprise stays an annotation (the rule and its exception
        # sets are untouched by definition); negate-premise lands as a
        # separate fact assertion, not a theory edit here
        return theory
    raise ProtocolError(f"unknown elaboration edit {edit!r}")


# ---------------------------------------------------------------------------
# the arbiter's report
# ---------------------------------------------------------------------------


def _classical_units(state: SessionState) -> list[ArgumentUnit]:
    units = []
    for m in state.active_assertions():
        if state.config.extensional:
            if m.kind != "AssertFact":
                continue
            units.append(
                ArgumentUnit(id=m.id, elements=frozenset(m.payload["elements"]))
            )
        elif m.kind in ("AssertFact", "AssertClassicalRule"):
            units.append(
                ArgumentUnit(
                    id=m.id,
                    formula=parse_formula(
                        m.payload["formula"], state.config.signature()
                    ),
                )
            )
    return units


def compute_report(state: SessionState) -> InconsistencyReport:
    """Minimal inconsistent subsets over the committed assertions.

    Classical contents are analysed jointly.  Defaults join the
    analysis point by point (every default translated to a model of its
    own scope meeting its conclusion), so same-point conflicts surface
    as culprit sets while cross-point conflicts stay with the validity
    machinery.
    """
    cap = state.config.unit_cap
    classical = _classical_units(state)
    all_ids = [m.id for m in state.active_assertions()]
    if state.config.extensional:
        report = minimal_inconsistent_subsets(
            classical, domain=state.config.domain(), cap=cap
        )
        return replace(report, unit_ids=tuple(all_ids))
    sig = state.config.signature()
    mis: dict[frozenset[str], None] = {}
    base = minimal_inconsistent_subsets(classical, sig=sig, cap=cap)
    for s in base.mis:
        mis.setdefault(s)
    default_moves = [
        m
        for m in state.active_assertions()
        if m.kind in ("AssertDefault", "ExpertOpinion")
    ]
    by_point: dict[str, list[Move]] = {}
    for m in default_moves:
        rule = _default_rule_from_move(m, sig)
        key = format_formula(rule.scope)
        by_point.setdefault(key, []).append(m)
    for point_moves in by_point.values():
        units = list(classical)
        for m in point_moves:
            rule = _default_rule_from_move(m, sig)
            content = Not(rule.conclusion) if rule.negative else rule.conclusion
            from .logic import And

            units.append(ArgumentUnit(id=m.id, formula=And(rule.scope, content)))
        local = minimal_inconsistent_subsets(units, sig=sig, cap=cap)
        point_ids = {m.id for m in point_moves}
        for s in local.mis:
            if s & point_ids:
                mis.setdefault(s)
    ordered = tuple(
        sorted(mis, key=lambda s: (len(s), tuple(sorted(s))))
    )
    freq = {i: sum(1 for s in ordered if i in s) for i in all_ids}
    return InconsistencyReport(
        unit_ids=tuple(all_ids), mis=ordered, frequencies=freq
    )


# ---------------------------------------------------------------------------
# opening a session
# ---------------------------------------------------------------------------


def open_session(
    config: SessionConfig, seed_theory: str | None = None
) -> tuple[SessionState, list[dict]]:
    """Fresh session; a seed theory file is replayed as arbiter moves."""
    state, events, _ = open_session_records(config, seed_theory)
    return state, events


def open_session_records(
    config: SessionConfig, seed_theory: str | None = None
) -> tuple[SessionState, list[dict], list[dict]]:
    """open_session plus the per-move transcript records of the seeding."""
    recorder = _Recorder(SessionState(config=config))
    events: list[dict] = []
    if seed_theory:
        from .theoryfile import parse_theory_text

        parsed = parse_theory_text(seed_theory)
        if tuple(parsed.signature.atoms) != tuple(config.atoms):
            raise ProtocolError("seed theory signature differs from session atoms")
        arbiter = config.arbiter.id
        for f in parsed.background:
            events += recorder.move(
                arbiter, "AssertClassicalRule", {"formula": format_formula(f)}
            )
        for rule in parsed.defaults:
            payload = {
                "scope": format_formula(rule.scope),
                "conclusion": format_formula(rule.conclusion),
                "negative": rule.negative,
                "exceptions": [format_formula(e) for e in rule.exception_sets],
                "surprise": rule.surprise_budget,
                "homogeneous": rule.homogeneous,
            }
            events += recorder.move(arbiter, "AssertDefault", payload)
        for rule_id, block in parsed.inheritance_blocks:
            # seed rule ids were renamed to move ids on replay
            move_id = _seed_rule_move_id(recorder.state, parsed, rule_id)
            events += recorder.move(
                arbiter,
                "Elaborate",
                {
                    "edit": "add-block",
                    "target": move_id,
                    "formula": format_formula(block),
                },
            )
    return recorder.state, events, recorder.records


def _seed_rule_move_id(state, parsed, rule_id: str) -> str:
    index = [d.id for d in parsed.defaults].index(rule_id)
    default_moves = [
        m for m in state.moves if m.kind in ("AssertDefault", "ExpertOpinion")
    ]
    return default_moves[index].id


# ---------------------------------------------------------------------------
# move submission
# ---------------------------------------------------------------------------

_PHASE_PERMITS: dict[str, tuple[Phase, ...]] = {
    "AssertFact": ("open",),
    "AssertClassicalRule": ("open",),
    "AssertDefault": ("open",),
    "ExpertOpinion": ("open",),
    "Attack": ("open", "attack-defense"),
    "Defend": ("open", "attack-defense"),
    "Elaborate": ("open", "attack-defense"),
    "Confirm": ("open", "attack-defense", "retraction-vote"),
    "Agree": ("open", "attack-defense", "retraction-vote"),
    "ArbiterQuestion": ("open", "attack-defense", "retraction-vote"),
    "ArbiterTargetChoice": ("attack-defense",),
    "RetractProposal": ("retraction-vote",),
    "RetractVote": ("retraction-vote",),
}

_ATTACKABLE_COMPONENTS: dict[str, tuple[AttackComponent, ...]] = {
    "AssertFact": ("conclusion",),
    "AssertClassicalRule": ("prerequisite", "conclusion", "applicability"),
    "AssertDefault": (
        "rule-itself",
        "prerequisite",
        "exception-membership",
        "surprise-membership",
        "size-notion",
        "conclusion",
        "applicability",
    ),
    "ExpertOpinion": ("expert-language", "conclusion"),
}


def attackable_components(move: Move) -> tuple[AttackComponent, ...]:
    return _ATTACKABLE_COMPONENTS.get(move.kind, ())


def submit_move(
    state: SessionState,
    author: str,
    kind: MoveKind,
    payload: dict[str, Any] | None = None,
    based_on: Sequence[str] = (),
) -> tuple[SessionState, list[dict]]:
    """Validate, commit and react to one move.

    Commits the move, recomputes the arbiter's report after assertive
    or theory-changing moves, and on fresh culprits emits a culprit
    event and enters the retraction vote.
    """
    payload = dict(payload or {})
    if state.phase in ("failed", "closed"):
        raise PhaseError(f"session is {state.phase}; no further moves")
    if kind not in _PHASE_PERMITS:
        raise ProtocolError(f"unknown move kind {kind!r}")
    if state.phase not in _PHASE_PERMITS[kind]:
        raise PhaseError(f"{kind} is not allowed in phase {state.phase!r}")
    if author not in {p.id for p in state.config.participants}:
        raise ProtocolError(f"unknown participant {author!r}")
    if kind in ("ArbiterQuestion", "ArbiterTargetChoice"):
        if author != state.config.arbiter.id:
            raise ProtocolError(f"{kind} is reserved for the arbiter")
    for ref in based_on:
        state.move(ref)  # raises on dangling references

    move = Move(
        id=state.next_move_id(),
        author=author,
        kind=kind,
        payload=payload,
        based_on=tuple(based_on),
    )
    events: list[dict] = []

    if kind in ASSERTIVE_KINDS:
        state = _commit_assertion(state, move)
        state, events = _refresh_report(state, last_id=move.id)
    elif kind == "Attack":
        state, events = _commit_attack(state, move)
    elif kind == "Defend":
        state, events = _commit_defense(state, move)
    elif kind == "Elaborate":
        state = _commit_elaboration(state, move)
        state, events = _refresh_report(state, last_id=None)
    elif kind == "RetractProposal":
        state, events = _commit_proposal(state, move)
    elif kind == "RetractVote":
        state, events = _commit_vote(state, move)
    elif kind in ("Confirm", "Agree"):
        target = payload.get("target")
        if target:
            state.move(target)
        state = replace(state, moves=state.moves + (move,))
        events = [{"type": "noted", "kind": kind, "target": target}]
    elif kind in ("ArbiterQuestion", "ArbiterTargetChoice"):
        state = replace(state, moves=state.moves + (move,))
        events = []
    return state, events


def _commit_assertion(state: SessionState, move: Move) -> SessionState:
    active = len(state.active_assertions())
    if active >= state.config.unit_cap:
        raise ProtocolError(
            f"the session already carries {active} assertions; "
            f"the analyzer cap is {state.config.unit_cap}"
        )
    if state.config.extensional:
        if move.kind != "AssertFact":
            raise ProtocolError(
                f"{move.kind} needs a formula session, not an extensional one"
            )
        elements = move.payload.get("elements")
        if not isinstance(elements, list) or not elements:
            raise ProtocolError("extensional assertion needs an element list")
        state.config.domain().mask(elements)  # validates membership
    else:
        if move.kind in ("AssertFact", "AssertClassicalRule"):
            parse_formula(move.payload["formula"], state.config.signature())
        else:
            _default_rule_from_move(move, state.config.signature())
    candidate = replace(state, moves=state.moves + (move,))
    if not state.config.extensional and move.kind in (
        "AssertDefault",
        "ExpertOpinion",
    ):
        try:
            session_theory(candidate)  # attach-level validation
        except DefaultTheoryError as exc:
            raise ProtocolError(str(exc)) from None
    return candidate


def _refresh_report(
    state: SessionState, last_id: str | None
) -> tuple[SessionState, list[dict]]:
    report = compute_report(state)
    state = replace(state, report=report)
    events: list[dict] = []
    if report.mis:
        event = {
            "type": "culprits",
            "mis": [sorted(s) for s in report.mis],
            "frequencies": {
                k: v for k, v in sorted(report.frequencies.items()) if v
            },
        }
        if last_id is not None:
            from .inconsistency import last_argument_check

            event["last_in_all"] = last_argument_check(report, last_id)
        events.append(event)
        if state.phase == "open":
            state = replace(state, phase="retraction-vote")
            events.append({"type": "phase", "phase": "retraction-vote"})
    return state, events


def _premise_formulas(state: SessionState, refs: Iterable[str]) -> list[Formula]:
    sig = state.config.signature()
    out = []
    for ref in refs:
        m = state.move(ref)
        if m.id in state.retracted:
            raise VerificationError(f"premise {ref} was retracted")
        if m.kind in ("AssertFact", "AssertClassicalRule"):
            out.append(parse_formula(m.payload["formula"], sig))
        else:
            raise VerificationError(f"premise {ref} carries no classical content")
    return out


def _target_content(state: SessionState, target: Move, component: str) -> Formula | None:
    if state.config.extensional:
        return None
    sig = state.config.signature()
    if target.kind in ("AssertFact", "AssertClassicalRule"):
        return parse_formula(target.payload["formula"], sig)
    rule = _default_rule_from_move(target, sig)
    if component == "prerequisite":
        return rule.scope
    if component == "conclusion":
        return rule.conclusion
    if component == "rule-itself":
        from .logic import Implies

        return Implies(rule.scope, rule.conclusion)
    return None  # membership/size/expert components carry no single formula


def _commit_attack(state: SessionState, move: Move) -> tuple[SessionState, list[dict]]:
    p = move.payload
    target = state.move(p["target"])
    component = p.get("component")
    mode = p.get("mode", "argue-consistent-negation")
    if mode not in ("prove-negation", "argue-consistent-negation", "roundabout"):
        raise ProtocolError(f"unknown attack mode {mode!r}")
    legal = attackable_components(target)
    if not legal:
        raise IllegalComponentError(f"{target.kind} moves cannot be attacked")
    if component not in legal:
        raise IllegalComponentError(
            f"component {component!r} cannot be attacked on a {target.kind}"
            + (
                "; classical rules themselves are beyond attack"
                if target.kind == "AssertClassicalRule" and component == "rule-itself"
                else ""
            )
        )
    content = _target_content(state, target, component)
    if content is not None:
        sig = state.config.signature()
        premises = _premise_formulas(state, move.based_on)
        if mode == "prove-negation":
            from .logic import entails

            if not entails(premises, Not(content), sig):
                raise VerificationError(
                    "the cited premises do not prove the negation"
                )
        elif mode == "argue-consistent-negation":
            if not is_consistent([*premises, Not(content)], sig):
                raise VerificationError(
                    "the negation is not even consistent with the cited premises"
                )
        elif mode == "roundabout":
            claim_text = p.get("claim")
            if not claim_text:
                raise VerificationError("a roundabout attack needs a claim")
            claim = parse_formula(claim_text, sig)
            from .logic import entails

            if not entails([*premises, content], claim, sig):
                raise VerificationError(
                    "the claim does not follow from the target and premises"
                )
        else:
            raise ProtocolError(f"unknown attack mode {mode!r}")
    state = replace(
        state,
        moves=state.moves + (move,),
        contested=state.contested | {target.id},
        defended=state.defended - {target.id},
    )
    return state, [
        {"type": "status", "move": target.id, "contested": True}
    ]


def _commit_defense(state: SessionState, move: Move) -> tuple[SessionState, list[dict]]:
    p = move.payload
    target = state.move(p["target"])
    if target.kind not in ASSERTIVE_KINDS:
        raise ProtocolError("only assertions can be defended")
    mode = p.get("mode", "argue-consistent")
    if state.config.extensional:
        support = p.get("support", [])
        domain = state.config.domain()
        if mode == "prove":
            if not support:
                raise VerificationError("a proof defense needs a support set")
            inter = domain.universe_mask
            for ref in support:
                m = state.move(ref)
                if m.id in state.retracted:
                    raise VerificationError(f"support {ref} was retracted")
                inter &= domain.mask(m.payload["elements"])
            target_mask = domain.mask(target.payload["elements"])
            if not inter or inter & ~target_mask:
                raise VerificationError("the cited sets do not support the target")
        elif mode == "argue-consistent":
            if not domain.mask(target.payload["elements"]):
                raise VerificationError("the target set is empty")
        else:
            raise ProtocolError(f"unknown defense mode {mode!r}")
    else:
        sig = state.config.signature()
        content = _target_content(state, target, "conclusion")
        if target.kind in ("AssertFact", "AssertClassicalRule"):
            content = parse_formula(target.payload["formula"], sig)
        premises = _premise_formulas(state, move.based_on)
        if mode == "prove":
            from .logic import entails

            if not entails(premises, content, sig):
                raise VerificationError("the cited premises do not prove the target")
        elif mode == "argue-consistent":
            if not is_consistent([*premises, content], sig):
                raise VerificationError(
                    "the target is not consistent with the cited premises"
                )
        else:
            raise ProtocolError(f"unknown defense mode {mode!r}")
    state = replace(
        state,
        moves=state.moves + (move,),
        defended=state.defended | {target.id},
    )
    return state, [{"type": "status", "move": target.id, "defended": True}]


def _commit_elaboration(state: SessionState, move: Move) -> SessionState:
    if state.config.extensional:
        raise ProtocolError("elaborations need a formula session")
    edit = move.payload.get("edit")
    target = move.payload.get("target")
    if target:
        target_move = state.move(target)
        if edit != "negate-premise" and target_move.kind not in (
            "AssertDefault",
            "ExpertOpinion",
        ):
            raise ProtocolError(f"elaboration {edit!r} must target a default")
    candidate = replace(state, moves=state.moves + (move,))
    if edit == "mark-surprise":
        candidate = replace(
            candidate,
            surprise_marks=state.surprise_marks
            + ((target, move.payload.get("formula", "")),),
        )
    try:
        session_theory(candidate)  # validates the edit end to end
    except DefaultTheoryError as exc:
        raise ProtocolError(str(exc)) from None
    return candidate


def _commit_proposal(state: SessionState, move: Move) -> tuple[SessionState, list[dict]]:
    target = move.payload.get("target")
    state.move(target)
    if target not in state.culprit_ids():
        raise VoteError(f"move {target!r} is not in any minimal inconsistent set")
    if state.open_proposal is not None:
        raise VoteError("another retraction proposal is still open")
    state = replace(
        state,
        moves=state.moves + (move,),
        open_proposal=(move.id, target, ()),
    )
    return state, [{"type": "proposal", "target": target}]


def _commit_vote(state: SessionState, move: Move) -> tuple[SessionState, list[dict]]:
    if state.open_proposal is None:
        raise VoteError("no retraction proposal is open")
    proposal_id, target, votes = state.open_proposal
    voter = move.author
    if voter not in {p.id for p in state.config.voters}:
        raise VoteError("only non-arbiter participants vote")
    if any(v == voter for v, _ in votes):
        raise VoteError(f"{voter} already voted on this proposal")
    yes = bool(move.payload.get("yes", False))
    votes = votes + ((voter, yes),)
    state = replace(
        state,
        moves=state.moves + (move,),
        open_proposal=(proposal_id, target, votes),
    )
    events: list[dict] = []
    if not yes:
        state = replace(state, open_proposal=None)
        events.append({"type": "proposal-failed", "target": target})
        return state, events
    if len(votes) == len(state.config.voters):
        state = replace(
            state,
            retracted=state.retracted | {target},
            open_proposal=None,
        )
        state, refresh_events = _refresh_report(state, last_id=None)
        events.append(
            {
                "type": "retraction",
                "target": target,
                "hanging": sorted(state.hanging()),
            }
        )
        events += refresh_events
        if not state.report.mis:
            state = replace(state, phase="open")
            events.append({"type": "phase", "phase": "open"})
    return state, events


# ---------------------------------------------------------------------------
# named operations (thin wrappers over move submission)
# ---------------------------------------------------------------------------


def propose_retraction(
    state: SessionState, author: str, move_id: str
) -> tuple[SessionState, list[dict]]:
    return submit_move(state, author, "RetractProposal", {"target": move_id})


def cast_vote(
    state: SessionState, participant: str, yes: bool
) -> tuple[SessionState, list[dict]]:
    return submit_move(state, participant, "RetractVote", {"yes": yes})


def record_attack(
    state: SessionState,
    author: str,
    descriptor: AttackDescriptor,
    based_on: Sequence[str] = (),
) -> tuple[SessionState, list[dict]]:
    payload: dict[str, Any] = {
        "target": descriptor.target,
        "component": descriptor.component,
        "mode": descriptor.mode,
    }
    if descriptor.claim is not None:
        payload["claim"] = descriptor.claim
    return submit_move(state, author, "Attack", payload, based_on=based_on)


def record_defense(
    state: SessionState,
    author: str,
    move_id: str,
    mode: str = "argue-consistent",
    support: Sequence[str] = (),
    based_on: Sequence[str] = (),
) -> tuple[SessionState, list[dict]]:
    payload: dict[str, Any] = {"target": move_id, "mode": mode}
    if support:
        payload["support"] = list(support)
    return submit_move(state, author, "Defend", payload, based_on=based_on)


# ---------------------------------------------------------------------------
# arbiter operations
# ---------------------------------------------------------------------------


def enter_attack_defense(state: SessionState) -> tuple[SessionState, list[dict]]:
    if state.phase not in ("retraction-vote", "open"):
        raise PhaseError(f"cannot enter attack-defense from {state.phase!r}")
    if not state.report.mis:
        raise PhaseError("no minimal inconsistent set to attack or defend")
    state = replace(state, phase="attack-defense", open_proposal=None)
    return state, [{"type": "phase", "phase": "attack-defense"}]


def resume_open(state: SessionState) -> tuple[SessionState, list[dict]]:
    """Continue asserting although culprit sets may remain untreated."""
    if state.phase not in ("retraction-vote", "attack-defense"):
        raise PhaseError(f"cannot resume the open phase from {state.phase!r}")
    state = replace(state, phase="open", open_proposal=None)
    return state, [{"type": "phase", "phase": "open"}]


def choose_target(
    state: SessionState,
    policy: Literal["max-frequency", "last-asserted", "manual"] = "max-frequency",
    chosen: str | None = None,
) -> tuple[SessionState, str, list[dict]]:
    """The arbiter picks the culprit to be attacked or defended.

    max-frequency takes the id occurring in the most culprit sets,
    last-asserted breaks ties; manual defers to an explicit choice.
    """
    if state.phase != "attack-defense":
        raise PhaseError("target choice happens in the attack-defense phase")
    culprits = state.culprit_ids()
    if not culprits:
        raise ProtocolError("no minimal inconsistent set; nothing to choose")

    def seq(move_id: str) -> int:
        return [m.id for m in state.moves].index(move_id)

    if policy == "max-frequency":
        best = max(
            culprits,
            key=lambda i: (state.report.frequencies.get(i, 0), seq(i)),
        )
    elif policy == "last-asserted":
        best = max(culprits, key=seq)
    elif policy == "manual":
        if chosen is None or chosen not in culprits:
            raise ProtocolError("manual policy needs a culprit id")
        best = chosen
    else:
        raise ProtocolError(f"unknown target policy {policy!r}")
    state, _ = submit_move(
        state,
        author=state.config.arbiter.id,
        kind="ArbiterTargetChoice",
        payload={"policy": policy, "target": best},
    )
    return state, best, [{"type": "target-chosen", "target": best, "policy": policy}]


def detect_deadlock(state: SessionState) -> tuple[SessionState, Verdict | None, list[dict]]:
    """Failure verdict iff some surviving culprit set is fully defended."""
    if state.phase != "attack-defense":
        raise PhaseError("deadlock detection happens in the attack-defense phase")
    for s in state.report.mis:
        if s and s <= state.defended and not (s & state.retracted):
            verdict = Verdict(
                outcome="deadlock-failure",
                surviving=tuple(m.id for m in state.active_assertions()),
                theory_text=_theory_snapshot(state),
            )
            state = replace(state, phase="failed", verdict=verdict)
            return state, verdict, [
                {"type": "verdict", "outcome": "deadlock-failure"}
            ]
    return state, None, []


def close_session(
    state: SessionState, by_agreement: bool = False
) -> tuple[SessionState, Verdict, list[dict]]:
    if state.phase in ("failed", "closed"):
        raise PhaseError(f"session is already {state.phase}")
    outcome = (
        "consistent"
        if state.report.consistent and not by_agreement
        else "closed-by-agreement"
    )
    verdict = Verdict(
        outcome=outcome,
        surviving=tuple(m.id for m in state.active_assertions()),
        theory_text=_theory_snapshot(state),
    )
    state = replace(state, phase="closed", verdict=verdict)
    return state, verdict, [{"type": "verdict", "outcome": outcome}]


def _theory_snapshot(state: SessionState) -> str:
    if state.config.extensional:
        lines = []
        for m in state.active_assertions():
            members = ", ".join(sorted(m.payload["elements"]))
            lines.append(f"{m.id} = {{{members}}}")
        return "\n".join(lines)
    from .theoryfile import format_theory_text

    return format_theory_text(session_theory(state))


# ---------------------------------------------------------------------------
# transcripts
# ---------------------------------------------------------------------------


def _config_to_json(config: SessionConfig) -> dict:
    return {
        "participants": [
            {"id": p.id, "name": p.name, "role": p.role}
            for p in config.participants
        ],
        "atoms": list(config.atoms),
        "elements": list(config.elements),
        "size_policy": {
            "tau_most": config.size_policy.tau_most,
            "tau_small": config.size_policy.tau_small,
            "eps_very_small": config.size_policy.eps_very_small,
        },
        "preference_variant": config.preference_variant,
        "unit_cap": config.unit_cap,
    }


def _config_from_json(data: dict) -> SessionConfig:
    return SessionConfig(
        participants=tuple(
            Participant(p["id"], p["name"], p["role"]) for p in data["participants"]
        ),
        atoms=tuple(data.get("atoms", ())),
        elements=tuple(data.get("elements", ())),
        size_policy=SizePolicy(**data["size_policy"]),
        preference_variant=data.get("preference_variant", "subset"),
        unit_cap=data.get("unit_cap", 16),
    )


@dataclass
class _Recorder:
    """Collects replayable operation records alongside a session."""

    state: SessionState
    records: list[dict] = field(default_factory=list)

    def move(self, author: str, kind: MoveKind, payload=None, based_on=()):
        self.state, events = submit_move(
            self.state, author=author, kind=kind, payload=payload, based_on=based_on
        )
        self.records.append(
            {
                "op": "move",
                "move": self.state.moves[-1].to_json(),
                "events": events,
            }
        )
        return events

    def command(self, name: str, **args):
        self.state, events = apply_command(self.state, name, **args)
        self.records.append({"op": "command", "name": name, "args": args, "events": events})
        return events


def apply_command(state: SessionState, name: str, **args) -> tuple[SessionState, list[dict]]:
    if name == "enter-attack-defense":
        return enter_attack_defense(state)
    if name == "resume-open":
        return resume_open(state)
    if name == "choose-target":
        state, _, events = choose_target(
            state, policy=args.get("policy", "max-frequency"), chosen=args.get("chosen")
        )
        return state, events
    if name == "detect-deadlock":
        state, _, events = detect_deadlock(state)
        return state, events
    if name == "close":
        state, _, events = close_session(state, by_agreement=args.get("by_agreement", False))
        return state, events
    raise ProtocolError(f"unknown command {name!r}")


def save_transcript(state: SessionState, records: Sequence[dict]) -> str:
    """Render header, config and the op records, one JSON line each."""
    lines = [TRANSCRIPT_VERSION, json.dumps(_config_to_json(state.config), sort_keys=True)]
    for record in records:
        lines.append(json.dumps(record, sort_keys=True))
    return "\n".join(lines) + "\n"


def load_transcript(text: str) -> tuple[SessionState, list[dict]]:
    """Replay a transcript; events must reproduce exactly.

    Returns the final state and the replayed records.  Raises
    TranscriptError (with a line number) on malformed or divergent
    input.
    """
    lines = text.splitlines()
    if not lines or lines[0].strip() != TRANSCRIPT_VERSION:
        raise TranscriptError(
            f"line 1: expected header {TRANSCRIPT_VERSION!r}"
        )
    if len(lines) < 2:
        raise TranscriptError("line 2: missing session config")
    try:
        config = _config_from_json(json.loads(lines[1]))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise TranscriptError(f"line 2: bad session config ({exc})") from None
    state = SessionState(config=config)
    records: list[dict] = []
    for lineno, raw in enumerate(lines[2:], start=3):
        if not raw.strip():
            continue
        try:
            record = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise TranscriptError(f"line {lineno}: {exc}") from None
        try:
            if record["op"] == "move":
                move = Move.from_json(record["move"])
                state, events = submit_move(
                    state,
                    author=move.author,
                    kind=move.kind,
                    payload=move.payload,
                    based_on=move.based_on,
                )
                if state.moves[-1].id != move.id:
                    raise TranscriptError(
                        f"line {lineno}: move id {move.id} diverges on replay"
                    )
            elif record["op"] == "command":
                state, events = apply_command(
                    state, record["name"], **record.get("args", {})
                )
            else:
                raise TranscriptError(f"line {lineno}: unknown op {record['op']!r}")
        except (ProtocolError, KeyError) as exc:
            if isinstance(exc, TranscriptError):
                raise
            raise TranscriptError(f"line {lineno}: {exc}") from None
        if record.get("events") != events:
            raise TranscriptError(
                f"line {lineno}: replay produced different events"
            )
        records.append(record)
    return state, records


# ---------------------------------------------------------------------------
# state view (wire format)
# ---------------------------------------------------------------------------


def state_view(state: SessionState) -> dict:
    """JSON-ready projection consumed by the console and the CLI."""
    hanging = state.hanging()
    return {
        "seq": len(state.moves),
        "phase": state.phase,
        "participants": [
            {"id": p.id, "name": p.name, "role": p.role}
            for p in state.config.participants
        ],
        "moves": [
            {
                **m.to_json(),
                "retracted": m.id in state.retracted,
                "hanging": m.id in hanging,
                "contested": m.id in state.contested,
                "defended": m.id in state.defended,
                "attackable_components": list(attackable_components(m)),
            }
            for m in state.moves
        ],
        "mis": [sorted(s) for s in state.report.mis],
        "frequencies": {
            k: v for k, v in sorted(state.report.frequencies.items()) if v
        },
        "open_proposal": (
            {
                "proposal": state.open_proposal[0],
                "target": state.open_proposal[1],
                "votes": [
                    {"voter": v, "yes": yes} for v, yes in state.open_proposal[2]
                ],
            }
            if state.open_proposal
            else None
        ),
        "verdict": (
            {
                "outcome": state.verdict.outcome,
                "surviving": list(state.verdict.surviving),
                "theory": state.verdict.theory_text,
            }
            if state.verdict
            else None
        ),
    }
