"""Relevance hierarchy: where defaults can change.

From the family of scope model sets we build every "relevant" set (a
non-empty intersection-minus-union of family members), keep the finest
ones (the cells, which partition the universe) and order the cells by
exceptionality: a cell sits below another when the family members
containing it are a strict subset of those containing the other.

The construction depends only on which sets carry defaults, never on
what those defaults conclude.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .defaults import DefaultTheoryRecord, require_consistency_conditions
from .logic import ModelSet, format_formula, models


class HierarchyError(ValueError):
    pass


@dataclass(frozen=True)
class AttachmentFamily:
    """Distinct scope model sets, in attachment declaration order.

    Declaration order fixes the cell code bit positions, so codes are
    reproducible across runs.  The universe is the background-restricted
    model space; every member lives inside it.
    """

    members: tuple[tuple[str, ModelSet], ...]
    universe: ModelSet

    def __post_init__(self):
        labels = [label for label, _ in self.members]
        if len(set(labels)) != len(labels):
            raise HierarchyError("duplicate attachment labels")
        for label, carrier in self.members:
            if not carrier.issubset(self.universe):
                raise HierarchyError(f"attachment {label!r} leaves the universe")

    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.members)


@dataclass(frozen=True)
class RelevantSet:
    """carrier = (intersection of builders_x) - (union of builders_y).

    Empty builders_x means the universe; empty builders_y means nothing
    removed.  Distinct builder expressions with one carrier are
    deduplicated, keeping the first in canonical enumeration order
    (fewest builders first).
    """

    carrier: ModelSet
    builders_x: tuple[str, ...]
    builders_y: tuple[str, ...]

    def expression(self) -> str:
        x = " & ".join(self.builders_x) if self.builders_x else "U"
        for y in self.builders_y:
            x += f" - {y}"
        return x


@dataclass(frozen=True)
class Cell:
    """A finest relevant set with its membership bit code.

    Bit i (leftmost = family member 0) is 1 iff the carrier lies inside
    member i.  The cells are pairwise disjoint and cover the universe.
    """

    carrier: ModelSet
    code: str

    def expression(self, family: AttachmentFamily) -> str:
        labels = family.labels()
        positives = [labels[i] for i, b in enumerate(self.code) if b == "1"]
        negatives = [labels[i] for i, b in enumerate(self.code) if b == "0"]
        text = " & ".join(positives) if positives else "U"
        for label in negatives:
            text += f" - {label}"
        return text


@dataclass(frozen=True)
class HierarchyOrder:
    """Strict partial order on cell codes plus its transitive reduction."""

    pairs: frozenset[tuple[str, str]]
    hasse: frozenset[tuple[str, str]]

    def below(self, x: str, y: str) -> bool:
        return (x, y) in self.pairs

    def direct_successors(self, code: str) -> frozenset[str]:
        return frozenset(y for x, y in self.hasse if x == code)


def attachment_family(theory: DefaultTheoryRecord) -> AttachmentFamily:
    """One member per distinct scope model set, in declaration order.

    The theory must pass its consistency conditions.
    """
    require_consistency_conditions(theory)
    universe = theory.background_models()
    members: list[tuple[str, ModelSet]] = []
    seen: set[int] = set()
    for rule in theory.defaults:
        carrier = models(rule.scope, theory.signature) & universe
        if carrier.mask in seen:
            continue
        seen.add(carrier.mask)
        members.append((format_formula(rule.scope), carrier))
    return AttachmentFamily(members=tuple(members), universe=universe)


def relevant_sets(family: AttachmentFamily) -> list[RelevantSet]:
    """All non-empty differences (intersection minus union) over the
    family, deduplicated by carrier; the universe and the empty union
    are admissible builders."""
    if not family.universe:
        raise HierarchyError("degenerate family: empty universe")
    n = len(family.members)
    intersections: list[tuple[ModelSet, tuple[str, ...]]] = []
    unions: list[tuple[ModelSet, tuple[str, ...]]] = []
    seen_i: set[int] = set()
    seen_u: set[int] = set()
    for size in range(0, n + 1):
        for combo in combinations(range(n), size):
            inter = family.universe
            union = family.universe.signature.empty()
            for i in combo:
                inter = inter & family.members[i][1]
                union = union | family.members[i][1]
            labels = tuple(family.members[i][0] for i in combo)
            if inter.mask not in seen_i:
                seen_i.add(inter.mask)
                intersections.append((inter, labels))
            if union.mask not in seen_u:
                seen_u.add(union.mask)
                unions.append((union, labels))
    out: list[RelevantSet] = []
    seen_carriers: set[int] = set()
    for inter, labels_x in intersections:
        for union, labels_y in unions:
            carrier = inter - union
            if not carrier or carrier.mask in seen_carriers:
                continue
            seen_carriers.add(carrier.mask)
            out.append(
                RelevantSet(carrier=carrier, builders_x=labels_x, builders_y=labels_y)
            )
    return out


def finest_cells(family: AttachmentFamily, rel: list[RelevantSet]) -> list[Cell]:
    """The inclusion-minimal relevant sets, bit-coded by membership.

    Sorted by code (as a binary string) for reproducible output.
    """
    carriers = [r.carrier for r in rel]
    cells = []
    for r in rel:
        if any(
            other.mask != r.carrier.mask and other.issubset(r.carrier)
            for other in carriers
        ):
            continue
        code = "".join(
            "1" if r.carrier.issubset(member) else "0"
            for _, member in family.members
        )
        cells.append(Cell(carrier=r.carrier, code=code))
    return sorted(cells, key=lambda c: c.code)


def cell_order(cells: list[Cell]) -> HierarchyOrder:
    """X below Y iff the members containing X are a strict subset of
    those containing Y; the reduction keeps only direct successors."""

    def ones(code: str) -> frozenset[int]:
        return frozenset(i for i, b in enumerate(code) if b == "1")

    codes = [c.code for c in cells]
    pairs = frozenset(
        (x, y) for x in codes for y in codes if ones(x) < ones(y)
    )
    hasse = frozenset(
        (x, y)
        for (x, y) in pairs
        if not any((x, z) in pairs and (z, y) in pairs for z in codes)
    )
    return HierarchyOrder(pairs=pairs, hasse=hasse)


def export_dot(family: AttachmentFamily, cells: list[Cell], order: HierarchyOrder) -> str:
    """Deterministic graph-description text for the cell hierarchy."""
    lines = ["digraph cells {", "  rankdir=BT;"]
    for cell in sorted(cells, key=lambda c: c.code):
        label = f"{cell.code}\\n{cell.expression(family)}"
        lines.append(f'  "{cell.code}" [label="{label}"];')
    for x, y in sorted(order.hasse):
        lines.append(f'  "{x}" -> "{y}";')
    lines.append("}")
    return "\n".join(lines)


def format_cells(family: AttachmentFamily, cells: list[Cell]) -> str:
    """Cell table: code, set expression, size; one line per cell."""
    return "\n".join(
        f"{c.code}\t{c.expression(family)}\t{len(c.carrier)}"
        for c in sorted(cells, key=lambda c: c.code)
    )
