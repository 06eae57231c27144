"""Preferential order over models, built packetwise from the hierarchy.

Each cell splits into mu (members satisfying every default valid there)
and o (the unexcused exceptions).  Packets are ordered by two clauses:
mu(X) below mu(Y) when X is below Y in the hierarchy, and mu(X) below
o(Y) when X is below Y, equal to Y, or a direct successor of Y.  Empty
packets are simply omitted; closure repairs the gaps.  Inside an
o-packet an interior quality order compares how well members satisfy
the valid defaults; mu-packets are flat.  The resulting element order
is lexicographic in spirit: first the hierarchy, then quality.

Minimal models of a query under this order give the default
consequences; classification puts an individual as low in the
hierarchy as its facts allow, preferring mu over o within the cell.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal, Mapping, Sequence

from .defaults import DefaultTheoryRecord, valid_defaults
from .hierarchy import (
    AttachmentFamily,
    Cell,
    HierarchyOrder,
    attachment_family,
    cell_order,
    finest_cells,
    relevant_sets,
)
from .logic import Atom, Formula, ModelSet, Not, conjoin, models

Variant = Literal["subset", "cardinality", "priority", "lexicographic-specificity"]

PacketKind = Literal["mu", "o"]
Packet = tuple[str, PacketKind]


class PreferenceError(ValueError):
    pass


class EmptyQueryError(PreferenceError):
    pass


class OrderCycleError(PreferenceError):
    pass


@dataclass(frozen=True)
class PreferenceConfig:
    """Interior-order variant plus the o-packet placement switch.

    `priority_list` is required (and must cover the valid defaults in
    play) only for the priority variant.  `radical_o` lifts every
    o-packet above every mu-packet instead of the default placement
    just above the direct successors.
    """

    variant: Variant = "subset"
    priority_list: tuple[str, ...] | None = None
    radical_o: bool = False

    def __post_init__(self):
        if (self.variant == "priority") != (self.priority_list is not None):
            raise PreferenceError(
                "priority_list must be given exactly for the priority variant"
            )


@dataclass(frozen=True)
class CellPartition:
    """mu/o split of one cell under its valid defaults."""

    cell: Cell
    mu: ModelSet
    o: ModelSet
    valid_ids: frozenset[str]


@dataclass(frozen=True)
class ModelOrderRelation:
    """Strict order on valuations, stored packetwise.

    `base_pairs` are the generating packet pairs; `packet_closure` their
    transitive closure; `inner_orders` the interior quality pairs per
    o-packet (cell code -> set of (better index, worse index)).
    """

    signature_atoms: tuple[str, ...]
    base_pairs: frozenset[tuple[Packet, Packet]]
    packet_closure: frozenset[tuple[Packet, Packet]]
    packet_members: Mapping[Packet, ModelSet]
    inner_orders: Mapping[str, frozenset[tuple[int, int]]]
    packet_of: Mapping[int, Packet]

    def covered(self) -> int:
        mask = 0
        for ms in self.packet_members.values():
            mask |= ms.mask
        return mask

    def lt(self, m: int, m_prime: int) -> bool:
        """m strictly below (preferred to) m_prime, valuation indices."""
        if m == m_prime:
            return False
        p, q = self.packet_of.get(m), self.packet_of.get(m_prime)
        if p is None or q is None:
            return False
        if p != q:
            return (p, q) in self.packet_closure
        if p[1] == "o":
            return (m, m_prime) in self.inner_orders.get(p[0], frozenset())
        return False

    def element_pairs(self) -> frozenset[tuple[int, int]]:
        """The full strict order, materialized (small universes only)."""
        out: set[tuple[int, int]] = set()
        for p, q in self.packet_closure:
            for a in self.packet_members[p]:
                for b in self.packet_members[q]:
                    out.add((a.index, b.index))
        for pairs in self.inner_orders.values():
            out |= pairs
        for a, b in out:
            if a == b or ((b, a) in out):
                raise OrderCycleError(f"order contains a cycle through {a}")
        return frozenset(out)


@dataclass(frozen=True)
class ConsequenceVerdict:
    holds: bool
    minimal_models: ModelSet
    witnesses: tuple[tuple[str, str, PacketKind], ...]  # (bits, cell, packet)


@dataclass(frozen=True)
class ClassificationResult:
    """Lowest-cell placement of an individual given its facts.

    One selection per chosen cell: (cell code, packet kind, members of
    that packet compatible with the facts).  `conclusions` are the
    literals true across every selected model.
    """

    selections: tuple[tuple[str, PacketKind, ModelSet], ...]
    models: ModelSet
    conclusions: tuple[Formula, ...]


# ---------------------------------------------------------------------------
# cell partitions
# ---------------------------------------------------------------------------


def cell_formula(family: AttachmentFamily, cell: Cell) -> Formula:
    """The cell's defining formula: entailed scopes conjoined with the
    negations of the non-containing ones."""
    parts: list[Formula] = []
    from .logic import parse_formula

    sig = family.universe.signature
    for bit, (label, _) in zip(cell.code, family.members):
        scope = parse_formula(label, sig)
        parts.append(scope if bit == "1" else Not(scope))
    return conjoin(parts)


def split_cell(
    cell: Cell,
    valid_ids: Iterable[str],
    theory: DefaultTheoryRecord,
) -> CellPartition:
    """mu = members satisfying every valid default's conclusion; o = rest.

    Negative-polarity rules impose no constraint.  With no valid
    defaults, o is empty: everything vacuously complies.
    """
    valid_ids = frozenset(valid_ids)
    mu = cell.carrier
    for rule_id in sorted(valid_ids):
        rule = theory.rule(rule_id)
        if rule.negative:
            continue
        mu = mu & models(rule.conclusion, theory.signature)
    return CellPartition(
        cell=cell, mu=mu, o=cell.carrier - mu, valid_ids=valid_ids
    )


def _satisfied_ids(
    theory: DefaultTheoryRecord, valuation_index: int, rule_ids: Sequence[str]
) -> frozenset[str]:
    sat = set()
    for rid in rule_ids:
        rule = theory.rule(rid)
        if rule.negative:
            continue
        if (models(rule.conclusion, theory.signature).mask >> valuation_index) & 1:
            sat.add(rid)
    return frozenset(sat)


def inner_order(
    partition: CellPartition,
    theory: DefaultTheoryRecord,
    config: PreferenceConfig,
) -> frozenset[tuple[int, int]]:
    """Strict quality order on the o-packet: (better, worse) index pairs.

    subset: strictly more satisfied defaults (by inclusion) is better.
    cardinality: strictly more satisfied defaults (by count) is better.
    priority: lexicographic along the configured priority list.
    lexicographic-specificity: most specific scope decides first;
    incomparable scopes tie-break by scope size, then id.
    """
    rule_ids = sorted(
        rid for rid in partition.valid_ids if not theory.rule(rid).negative
    )
    members = [v.index for v in partition.o]
    sat = {m: _satisfied_ids(theory, m, rule_ids) for m in members}
    pairs: set[tuple[int, int]] = set()

    if config.variant == "priority":
        missing = set(rule_ids) - set(config.priority_list or ())
        if missing:
            raise PreferenceError(
                f"priority list does not cover defaults: {sorted(missing)}"
            )
        ranked = [r for r in (config.priority_list or ()) if r in rule_ids]
    elif config.variant == "lexicographic-specificity":
        ranked = sorted(
            rule_ids,
            key=lambda rid: (len(theory.scope_models(theory.rule(rid))), rid),
        )
    else:
        ranked = rule_ids

    for m in members:
        for m2 in members:
            if m == m2:
                continue
            if config.variant == "subset":
                if sat[m2] < sat[m]:
                    pairs.add((m, m2))
            elif config.variant == "cardinality":
                if len(sat[m2]) < len(sat[m]):
                    pairs.add((m, m2))
            else:
                for rid in ranked:
                    a, b = rid in sat[m], rid in sat[m2]
                    if a != b:
                        if a:
                            pairs.add((m, m2))
                        break
    return frozenset(pairs)


# ---------------------------------------------------------------------------
# packet and element order
# ---------------------------------------------------------------------------


def packet_order(
    cells: list[Cell],
    hierarchy: HierarchyOrder,
    partitions: Mapping[str, CellPartition],
    radical_o: bool = False,
) -> frozenset[tuple[Packet, Packet]]:
    """Generating packet pairs; packets with empty content are omitted.

    Default placement: mu(X) < mu(Y) iff X below Y; mu(X) < o(Y) iff X
    below Y, X = Y, or X a direct successor of Y.  Radical placement
    instead puts every o above every mu and orders the o-packets among
    themselves by the hierarchy.
    """
    for cell in cells:
        if cell.code not in partitions:
            raise PreferenceError(f"no partition for cell {cell.code}")
    codes = [c.code for c in cells]
    nonempty: dict[Packet, ModelSet] = {}
    for code in codes:
        part = partitions[code]
        if part.mu:
            nonempty[(code, "mu")] = part.mu
        if part.o:
            nonempty[(code, "o")] = part.o
    pairs: set[tuple[Packet, Packet]] = set()
    for x in codes:
        for y in codes:
            mu_x, mu_y = (x, "mu"), (y, "mu")
            o_x, o_y = (x, "o"), (y, "o")
            below = hierarchy.below(x, y)
            if below and mu_x in nonempty and mu_y in nonempty:
                pairs.add((mu_x, mu_y))
            if radical_o:
                if below and o_x in nonempty and o_y in nonempty:
                    pairs.add((o_x, o_y))
                if mu_x in nonempty and o_y in nonempty:
                    pairs.add((mu_x, o_y))
            else:
                direct = x in hierarchy.direct_successors(y)
                if (below or x == y or direct) and mu_x in nonempty and o_y in nonempty:
                    pairs.add((mu_x, o_y))
    return frozenset(pairs)


def _transitive_closure(
    pairs: frozenset[tuple[Packet, Packet]]
) -> frozenset[tuple[Packet, Packet]]:
    succ: dict[Packet, set[Packet]] = {}
    for a, b in pairs:
        succ.setdefault(a, set()).add(b)
    closure: set[tuple[Packet, Packet]] = set(pairs)
    changed = True
    while changed:
        changed = False
        for a in list(succ):
            reach = succ[a]
            new = set()
            for b in list(reach):
                new |= succ.get(b, set())
            if not new <= reach:
                reach |= new
                changed = True
        closure = {(a, b) for a, bs in succ.items() for b in bs}
    return frozenset(closure)


def element_order(
    signature_atoms: Sequence[str],
    base_pairs: frozenset[tuple[Packet, Packet]],
    packet_members: Mapping[Packet, ModelSet],
    inner_orders: Mapping[str, frozenset[tuple[int, int]]],
) -> ModelOrderRelation:
    """Extend packet pairs and interior orders to valuations.

    The result must be a strict partial order; a cycle (possible only
    through a malformed interior order or packet graph) raises.
    """
    closure = _transitive_closure(base_pairs)
    for p, q in closure:
        if p == q:
            raise OrderCycleError(f"packet order has a cycle at {p}")
    packet_of: dict[int, Packet] = {}
    for packet, ms in packet_members.items():
        for v in ms:
            if v.index in packet_of:
                raise PreferenceError(f"valuation {v.bits()} in two packets")
            packet_of[v.index] = packet
    for code, pairs in inner_orders.items():
        for a, b in pairs:
            if (b, a) in pairs or a == b:
                raise OrderCycleError(f"interior order cycle in o({code})")
    return ModelOrderRelation(
        signature_atoms=tuple(signature_atoms),
        base_pairs=base_pairs,
        packet_closure=closure,
        packet_members=dict(packet_members),
        inner_orders=dict(inner_orders),
        packet_of=packet_of,
    )


def minimal_models(query: ModelSet, order: ModelOrderRelation) -> ModelSet:
    """Members of the query with no strictly smaller member inside it.

    The query is first restricted to the order's universe; an empty
    restriction is an error.
    """
    mask = query.mask & order.covered()
    if mask == 0:
        raise EmptyQueryError("query has no models inside the ordered universe")
    member_indices = [v.index for v in ModelSet(query.signature, mask)]
    minimal = 0
    for m in member_indices:
        if not any(order.lt(m2, m) for m2 in member_indices if m2 != m):
            minimal |= 1 << m
    return ModelSet(query.signature, minimal)


# ---------------------------------------------------------------------------
# full pipeline over a theory
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PreferenceStructure:
    """Everything derived from one theory and one preference config."""

    theory: DefaultTheoryRecord
    family: AttachmentFamily
    cells: tuple[Cell, ...]
    hierarchy: HierarchyOrder
    partitions: Mapping[str, CellPartition]
    order: ModelOrderRelation

    def cell_of(self, valuation_index: int) -> str | None:
        packet = self.order.packet_of.get(valuation_index)
        return packet[0] if packet else None


def build_structure(
    theory: DefaultTheoryRecord, config: PreferenceConfig | None = None
) -> PreferenceStructure:
    """Family, cells, hierarchy, partitions and the element order."""
    config = config or PreferenceConfig()
    family = attachment_family(theory)
    rel = relevant_sets(family)
    cells = finest_cells(family, rel)
    hierarchy = cell_order(cells)
    partitions: dict[str, CellPartition] = {}
    inner: dict[str, frozenset[tuple[int, int]]] = {}
    for cell in cells:
        beta = cell_formula(family, cell)
        validity = valid_defaults(theory, beta)
        part = split_cell(cell, validity.valid, theory)
        partitions[cell.code] = part
        inner[cell.code] = inner_order(part, theory, config)
    base = packet_order(cells, hierarchy, partitions, radical_o=config.radical_o)
    members: dict[Packet, ModelSet] = {}
    for code, part in partitions.items():
        if part.mu:
            members[(code, "mu")] = part.mu
        if part.o:
            members[(code, "o")] = part.o
    order = element_order(theory.signature.atoms, base, members, inner)
    return PreferenceStructure(
        theory=theory,
        family=family,
        cells=tuple(cells),
        hierarchy=hierarchy,
        partitions=partitions,
        order=order,
    )


def default_holds(
    gamma: Formula,
    psi: Formula,
    structure: PreferenceStructure,
) -> ConsequenceVerdict:
    """psi holds by default given gamma: true in every minimal model."""
    sig = structure.theory.signature
    query = models(gamma, sig)
    minima = minimal_models(query, structure.order)
    psi_models = models(psi, sig)
    witnesses = []
    for v in minima:
        packet = structure.order.packet_of[v.index]
        witnesses.append((v.bits(), packet[0], packet[1]))
    return ConsequenceVerdict(
        holds=minima.issubset(psi_models),
        minimal_models=minima,
        witnesses=tuple(witnesses),
    )


def _literal_conclusions(sig_atoms: Sequence[str], selected: ModelSet) -> tuple[Formula, ...]:
    out: list[Formula] = []
    n = len(sig_atoms)
    for i, atom in enumerate(sig_atoms):
        bit = n - 1 - i
        values = {(v.index >> bit) & 1 for v in selected}
        if values == {1}:
            out.append(Atom(atom))
        elif values == {0}:
            out.append(Not(Atom(atom)))
    return tuple(out)


def classify_individual(
    theory: DefaultTheoryRecord,
    facts: Sequence[Formula],
    config: PreferenceConfig | None = None,
    structure: PreferenceStructure | None = None,
) -> ClassificationResult:
    """Place an individual as low in the hierarchy as the facts allow.

    Among the cells compatible with the facts, the hierarchy-minimal
    ones are selected (all of them, on incomparable ties).  Within a
    cell the mu-packet is preferred; only when the facts exclude every
    compliant member does the individual land in o, where the interior
    order picks the best-quality members.  Conclusions are the literals
    shared by every selected model.
    """
    structure = structure or build_structure(theory, config)
    sig = theory.signature
    fact_models = theory.background_models()
    for f in facts:
        fact_models = fact_models & models(f, sig)
    if not fact_models:
        raise EmptyQueryError("facts are inconsistent with the background")
    compatible = [
        c for c in structure.cells if c.carrier.intersection(fact_models)
    ]
    hierarchy = structure.hierarchy
    lowest = [
        c
        for c in compatible
        if not any(
            hierarchy.below(other.code, c.code) for other in compatible
        )
    ]
    selections: list[tuple[str, PacketKind, ModelSet]] = []
    union_mask = 0
    for cell in lowest:
        part = structure.partitions[cell.code]
        mu_hit = part.mu & fact_models
        if mu_hit:
            selections.append((cell.code, "mu", mu_hit))
            union_mask |= mu_hit.mask
            continue
        o_hit = part.o & fact_models
        inner = structure.order.inner_orders.get(cell.code, frozenset())
        indices = [v.index for v in o_hit]
        best = [
            m
            for m in indices
            if not any((m2, m) in inner for m2 in indices if m2 != m)
        ]
        best_mask = 0
        for m in best:
            best_mask |= 1 << m
        selections.append((cell.code, "o", ModelSet(sig, best_mask)))
        union_mask |= best_mask
    union = ModelSet(sig, union_mask)
    return ClassificationResult(
        selections=tuple(sorted(selections, key=lambda s: s[0])),
        models=union,
        conclusions=_literal_conclusions(sig.atoms, union),
    )


def format_order(structure: PreferenceStructure) -> str:
    """Packet graph and element pairs as sorted text lines."""
    lines = ["packets:"]
    for (code, kind), ms in sorted(structure.order.packet_members.items()):
        lines.append(f"  {kind}({code}) = {{{', '.join(ms.bitstrings())}}}")
    lines.append("packet pairs:")
    for (a, b) in sorted(structure.order.base_pairs):
        lines.append(f"  {a[1]}({a[0]}) < {b[1]}({b[0]})")
    lines.append("element pairs:")
    n = len(structure.order.signature_atoms)
    for a, b in sorted(structure.order.element_pairs()):
        lines.append(f"  {a:0{n}b} < {b:0{n}b}")
    return "\n".join(lines)
