"""Minimal inconsistent subsets of a family of argument units.

The arbiter's detection instrument: given a family of units (formulas
over one signature, or explicit element sets over one finite domain),
find every jointly inconsistent subset all of whose proper subsets are
consistent.  Joint inconsistency is emptiness of the intersection of the
units' carriers, which coincides with classical inconsistency in the
formula case.

Enumeration walks subsets in increasing cardinality and prunes supersets
of discovered culprit sets, so results are exact at the configured cap.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .logic import Formula, Signature, models

DEFAULT_UNIT_CAP = 16


class AnalyzerError(ValueError):
    pass


class UnitCapExceededError(AnalyzerError):
    def __init__(self, size: int, cap: int):
        super().__init__(f"family has {size} units; the subset scan is capped at {cap}")


class UnknownUnitError(AnalyzerError):
    def __init__(self, unit_id: str):
        super().__init__(f"unknown unit id {unit_id!r}")


@dataclass(frozen=True)
class ElementDomain:
    """Ordered finite universe for extensional argument units."""

    elements: tuple[str, ...]

    def __init__(self, elements: Iterable[str]):
        elements = tuple(elements)
        if len(set(elements)) != len(elements):
            raise AnalyzerError("duplicate domain elements")
        object.__setattr__(self, "elements", elements)

    def mask(self, members: Iterable[str]) -> int:
        out = 0
        for m in members:
            try:
                out |= 1 << self.elements.index(m)
            except ValueError:
                raise AnalyzerError(f"element {m!r} not in domain") from None
        return out

    def names(self, mask: int) -> list[str]:
        return [e for i, e in enumerate(self.elements) if (mask >> i) & 1]

    @property
    def universe_mask(self) -> int:
        return (1 << len(self.elements)) - 1


@dataclass(frozen=True)
class ArgumentUnit:
    """One attackable unit: a formula, or an explicit element set.

    Exactly one of `formula` / `elements` is set; a family must be
    uniform in mode and share its signature or domain.
    """

    id: str
    formula: Formula | None = None
    elements: frozenset[str] | None = None

    def __post_init__(self):
        if (self.formula is None) == (self.elements is None):
            raise AnalyzerError(
                f"unit {self.id!r} needs exactly one of formula/elements"
            )


def unit_carriers(
    units: Sequence[ArgumentUnit],
    sig: Signature | None = None,
    domain: ElementDomain | None = None,
) -> tuple[list[int], int]:
    """Carrier bitmask per unit plus the universe mask.

    Formula units need `sig`; extensional units need `domain`.
    """
    if not units:
        if sig is not None:
            return [], sig.universe().mask
        if domain is not None:
            return [], domain.universe_mask
        return [], 1
    extensional = units[0].elements is not None
    carriers = []
    for u in units:
        if (u.elements is not None) != extensional:
            raise AnalyzerError("mixed intensional/extensional family")
        if extensional:
            if domain is None:
                raise AnalyzerError("extensional units need an element domain")
            carriers.append(domain.mask(u.elements))
        else:
            if sig is None:
                raise AnalyzerError("formula units need a signature")
            carriers.append(models(u.formula, sig).mask)
    universe = domain.universe_mask if extensional else sig.universe().mask
    return carriers, universe


@dataclass(frozen=True)
class InconsistencyReport:
    """All minimal inconsistent subsets (as id sets) plus per-id counts.

    `mis` is sorted by cardinality, then lexicographically by the sorted
    id tuple; no listed set is a subset of another.
    """

    unit_ids: tuple[str, ...]
    mis: tuple[frozenset[str], ...]
    frequencies: dict[str, int]

    @property
    def consistent(self) -> bool:
        return not self.mis

    def involved_ids(self) -> frozenset[str]:
        out: set[str] = set()
        for s in self.mis:
            out |= s
        return frozenset(out)


def _sorted_mis(found: Iterable[frozenset[str]]) -> tuple[frozenset[str], ...]:
    return tuple(sorted(found, key=lambda s: (len(s), tuple(sorted(s)))))


def minimal_inconsistent_subsets(
    units: Sequence[ArgumentUnit],
    sig: Signature | None = None,
    domain: ElementDomain | None = None,
    cap: int = DEFAULT_UNIT_CAP,
) -> InconsistencyReport:
    """Every minimal jointly inconsistent subset of the family.

    The empty family (and any jointly consistent family) yields an
    empty report.  Raises UnitCapExceededError above `cap` units.
    """
    if len(units) > cap:
        raise UnitCapExceededError(len(units), cap)
    ids = [u.id for u in units]
    if len(set(ids)) != len(ids):
        raise AnalyzerError("duplicate unit ids")
    carriers, _ = unit_carriers(units, sig=sig, domain=domain)
    found: list[frozenset[int]] = []
    n = len(units)
    for size in range(1, n + 1):
        for combo in combinations(range(n), size):
            combo_set = frozenset(combo)
            if any(prev <= combo_set for prev in found):
                continue
            inter = -1
            for i in combo:
                inter &= carriers[i]
            if inter == 0:
                found.append(combo_set)
    mis = _sorted_mis(frozenset(ids[i] for i in s) for s in found)
    freq = {i: sum(1 for s in mis if i in s) for i in ids}
    return InconsistencyReport(unit_ids=tuple(ids), mis=mis, frequencies=freq)


def last_argument_check(report: InconsistencyReport, last_id: str) -> bool:
    """True iff `last_id` occurs in every minimal inconsistent subset.

    Vacuously true for an empty report.  When the family was consistent
    before `last_id` arrived, this must hold; a False therefore flags a
    stale or foreign report.
    """
    if last_id not in report.unit_ids:
        raise UnknownUnitError(last_id)
    return all(last_id in s for s in report.mis)


def support_sets(
    units: Sequence[ArgumentUnit],
    target: ArgumentUnit,
    sig: Signature | None = None,
    domain: ElementDomain | None = None,
) -> list[frozenset[str]]:
    """Minimal subsets whose joint intersection is non-empty and inside
    the target's content: the semantic arguments *for* the target.

    The empty subset counts (its intersection is the universe), so a
    universal target has `{}` as its unique minimal support.  A unit
    with the target's own id is never used to support it.
    """
    candidates = [u for u in units if u.id != target.id]
    carriers, universe = unit_carriers([*candidates, target], sig=sig, domain=domain)
    target_carrier = carriers[-1]
    carriers = carriers[:-1]
    ids = [u.id for u in candidates]
    found: list[frozenset[int]] = []
    n = len(candidates)
    for size in range(0, n + 1):
        for combo in combinations(range(n), size):
            combo_set = frozenset(combo)
            if any(prev <= combo_set for prev in found):
                continue
            inter = universe
            for i in combo:
                inter &= carriers[i]
            if inter and inter & ~target_carrier == 0:
                found.append(combo_set)
    return sorted(
        (frozenset(ids[i] for i in s) for s in found),
        key=lambda s: (len(s), tuple(sorted(s))),
    )


def format_report(report: InconsistencyReport) -> str:
    """Structured text rendering for arbiter display and transcripts."""
    lines = [f"units: {', '.join(report.unit_ids)}"]
    if report.consistent:
        lines.append("minimal inconsistent subsets: none")
    else:
        lines.append(f"minimal inconsistent subsets: {len(report.mis)}")
        for s in report.mis:
            lines.append("  {" + ", ".join(sorted(s)) + "}")
        lines.append("frequencies:")
        for uid in report.unit_ids:
            if report.frequencies.get(uid):
                lines.append(f"  {uid}: {report.frequencies[uid]}")
    return "\n".join(lines)
