"""Text format for default theories.

    # comments and blank lines are skipped
    atoms: b, p, f
    background: p -> b
    d1: b ~> f
    d2: p ~> ~f [except: p & q] [surprise: 0.05] [neg] [homogeneous: false]
    block d2 at p & q

One `atoms:` line comes first.  `background:` lines add inviolable
formulas.  A default line is `id: SCOPE ~> CONCLUSION` followed by any
of the bracketed options; `[neg]` flips the polarity, `[homogeneous]`
without a value means true.  `block ID at FORMULA` records an
inheritance block.
"""

from __future__ import annotations

import re

from .defaults import (
    DefaultRule,
    DefaultTheoryRecord,
    SizePolicy,
    attach,
    block_inheritance,
)
from .logic import (
    Formula,
    LogicError,
    Signature,
    format_formula,
    parse_formula,
)


class TheoryFileError(ValueError):
    def __init__(self, message: str, lineno: int):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


_OPTION = re.compile(r"\[([a-z-]+)(?::\s*([^\]]*))?\]")
_DEFAULT_LINE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(.*)$")
_BLOCK_LINE = re.compile(r"^block\s+([A-Za-z_][A-Za-z0-9_]*)\s+at\s+(.*)$")


def parse_theory_text(
    text: str, size_policy: SizePolicy | None = None
) -> DefaultTheoryRecord:
    """Parse theory text; raises TheoryFileError with the line number."""
    sig: Signature | None = None
    theory: DefaultTheoryRecord | None = None
    pending_blocks: list[tuple[str, Formula, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("atoms:"):
            if sig is not None:
                raise TheoryFileError("duplicate atoms line", lineno)
            names = [
                n for chunk in line[len("atoms:"):].split(",")
                for n in chunk.split()
            ]
            try:
                sig = Signature(names)
            except LogicError as exc:
                raise TheoryFileError(str(exc), lineno) from None
            theory = DefaultTheoryRecord(
                signature=sig, size_policy=size_policy or SizePolicy()
            )
            continue
        if sig is None or theory is None:
            raise TheoryFileError("the atoms line must come first", lineno)
        if line.startswith("background:"):
            formula = _parse(line[len("background:"):], sig, lineno)
            theory = DefaultTheoryRecord(
                signature=theory.signature,
                background=theory.background + (formula,),
                defaults=theory.defaults,
                inheritance_blocks=theory.inheritance_blocks,
                size_policy=theory.size_policy,
            )
            continue
        block = _BLOCK_LINE.match(line)
        if block:
            pending_blocks.append(
                (block.group(1), _parse(block.group(2), sig, lineno), lineno)
            )
            continue
        default = _DEFAULT_LINE.match(line)
        if default:
            theory = _parse_default(theory, default.group(1), default.group(2), lineno)
            continue
        raise TheoryFileError(f"unrecognized line {line!r}", lineno)
    if theory is None:
        raise TheoryFileError("empty theory: no atoms line", 1)
    for rule_id, formula, lineno in pending_blocks:
        try:
            theory = block_inheritance(theory, rule_id, formula)
        except ValueError as exc:
            raise TheoryFileError(str(exc), lineno) from None
    return theory


def _parse(text: str, sig: Signature, lineno: int) -> Formula:
    try:
        return parse_formula(text.strip(), sig)
    except LogicError as exc:
        raise TheoryFileError(str(exc), lineno) from None


def _parse_default(
    theory: DefaultTheoryRecord, rule_id: str, rest: str, lineno: int
) -> DefaultTheoryRecord:
    sig = theory.signature
    options: dict[str, str | None] = {}
    exceptions: tuple[Formula, ...] = ()
    body = rest
    for m in _OPTION.finditer(rest):
        options[m.group(1)] = m.group(2)
    body = _OPTION.sub("", rest).strip()
    if "~>" not in body:
        raise TheoryFileError(f"default {rule_id!r} is missing '~>'", lineno)
    scope_text, conclusion_text = body.split("~>", 1)
    negative = False
    surprise = 0.05
    homogeneous = True
    for key, value in options.items():
        if key == "except":
            exceptions = tuple(
                _parse(part, sig, lineno)
                for part in (value or "").split(",")
                if part.strip()
            )
        elif key == "surprise":
            try:
                surprise = float(value or "")
            except ValueError:
                raise TheoryFileError(f"bad surprise value {value!r}", lineno) from None
        elif key == "neg":
            negative = True
        elif key == "homogeneous":
            homogeneous = value is None or value.strip() in ("true", "yes", "1")
        else:
            raise TheoryFileError(f"unknown option [{key}]", lineno)
    rule = DefaultRule(
        id=rule_id,
        scope=_parse(scope_text, sig, lineno),
        conclusion=_parse(conclusion_text, sig, lineno),
        negative=negative,
        exception_sets=exceptions,
        surprise_budget=surprise,
        homogeneous=homogeneous,
    )
    try:
        return attach(theory, rule)
    except ValueError as exc:
        raise TheoryFileError(str(exc), lineno) from None


def format_theory_text(theory: DefaultTheoryRecord) -> str:
    """Canonical text rendering; parses back to an equal theory."""
    lines = [f"atoms: {', '.join(theory.signature.atoms)}"]
    for f in theory.background:
        lines.append(f"background: {format_formula(f)}")
    for d in theory.defaults:
        line = f"{d.id}: {format_formula(d.scope)} ~> {format_formula(d.conclusion)}"
        if d.exception_sets:
            line += f" [except: {', '.join(format_formula(e) for e in d.exception_sets)}]"
        if d.surprise_budget != 0.05:
            line += f" [surprise: {d.surprise_budget}]"
        if not d.homogeneous:
            line += " [homogeneous: false]"
        if d.negative:
            line += " [neg]"
        lines.append(line)
    for rule_id, block in theory.inheritance_blocks:
        lines.append(f"block {rule_id} at {format_formula(block)}")
    return "\n".join(lines) + "\n"
