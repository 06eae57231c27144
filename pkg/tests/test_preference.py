from __future__ import annotations

import pytest

from defarg.defaults import DefaultRule, DefaultTheoryRecord, attach
from defarg.hierarchy import attachment_family, cell_order, finest_cells, relevant_sets
from defarg.logic import Signature, models, parse_formula
from defarg.preference import (
    CellPartition,
    EmptyQueryError,
    PreferenceConfig,
    PreferenceError,
    build_structure,
    classify_individual,
    default_holds,
    format_order,
    inner_order,
    minimal_models,
    packet_order,
    split_cell,
)

from .oracles import brute_element_relation, brute_minimal_models


def parse(text, sig):
    return parse_formula(text, sig)


def cells_of(theory):
    family = attachment_family(theory)
    cells = finest_cells(family, relevant_sets(family))
    return family, cells, cell_order(cells)


# --- split_cell -------------------------------------------------------------


def test_split_tweety_cell_10(tweety):
    sig = tweety.signature
    _, cells, _ = cells_of(tweety)
    cell10 = next(c for c in cells if c.code == "10")
    part = split_cell(cell10, {"d1"}, tweety)
    assert part.mu.bitstrings() == ["101"]
    assert part.o.bitstrings() == ["100"]


def test_split_tweety_cell_11(tweety):
    sig = tweety.signature
    _, cells, _ = cells_of(tweety)
    cell11 = next(c for c in cells if c.code == "11")
    part = split_cell(cell11, {"d2"}, tweety)
    assert part.mu.bitstrings() == ["110"]
    assert part.o.bitstrings() == ["111"]


def test_split_no_valid_defaults_empty_o(tweety):
    _, cells, _ = cells_of(tweety)
    cell00 = next(c for c in cells if c.code == "00")
    part = split_cell(cell00, set(), tweety)
    assert not part.o
    assert part.mu.mask == cell00.carrier.mask


# --- inner order ------------------------------------------------------------


def two_default_theory():
    sig = Signature(["s", "t", "u"])
    theory = DefaultTheoryRecord(signature=sig)
    theory = attach(theory, DefaultRule("d1", parse("s", sig), parse("t", sig)))
    theory = attach(theory, DefaultRule("d2", parse("s", sig), parse("u", sig)))
    return sig, theory


def o_partition(sig, theory, cell_code="1"):
    # a hand-built packet: the whole scope is the cell, everything in o
    family = attachment_family(theory)
    cells = finest_cells(family, relevant_sets(family))
    cell = next(c for c in cells if c.code == cell_code)
    return CellPartition(
        cell=cell, mu=sig.empty(), o=cell.carrier, valid_ids=frozenset({"d1", "d2"})
    )


def test_inner_order_subset_variant():
    sig, theory = two_default_theory()
    part = o_partition(sig, theory)
    order = inner_order(part, theory, PreferenceConfig(variant="subset"))
    both = sig.valuation("111").index  # satisfies d1 and d2
    one = sig.valuation("110").index  # satisfies d1 only
    other = sig.valuation("101").index  # satisfies d2 only
    none = sig.valuation("100").index
    assert (both, one) in order and (both, none) in order
    assert (one, none) in order
    assert (one, other) not in order and (other, one) not in order


def test_inner_order_cardinality_variant():
    sig, theory = two_default_theory()
    part = o_partition(sig, theory)
    order = inner_order(part, theory, PreferenceConfig(variant="cardinality"))
    one = sig.valuation("110").index
    other = sig.valuation("101").index
    none = sig.valuation("100").index
    assert (one, other) not in order and (other, one) not in order  # equal counts
    assert (one, none) in order and (other, none) in order


def test_inner_order_priority_variant():
    sig, theory = two_default_theory()
    part = o_partition(sig, theory)
    config = PreferenceConfig(variant="priority", priority_list=("d2", "d1"))
    order = inner_order(part, theory, config)
    one = sig.valuation("110").index  # d1 only
    other = sig.valuation("101").index  # d2 only
    assert (other, one) in order  # d2 outranks d1
    assert (one, other) not in order


def test_inner_order_priority_incomplete():
    sig, theory = two_default_theory()
    part = o_partition(sig, theory)
    config = PreferenceConfig(variant="priority", priority_list=("d2",))
    with pytest.raises(PreferenceError):
        inner_order(part, theory, config)


def test_inner_order_lexicographic_specificity():
    sig = Signature(["b", "p", "t", "u"])
    theory = DefaultTheoryRecord(signature=sig, background=(parse("p -> b", sig),))
    theory = attach(theory, DefaultRule("broad", parse("b", sig), parse("t", sig)))
    theory = attach(theory, DefaultRule("narrow", parse("p", sig), parse("u", sig)))
    family = attachment_family(theory)
    cells = finest_cells(family, relevant_sets(family))
    cell = next(c for c in cells if c.code == "11")
    part = CellPartition(
        cell=cell, mu=sig.empty(), o=cell.carrier,
        valid_ids=frozenset({"broad", "narrow"}),
    )
    config = PreferenceConfig(variant="lexicographic-specificity")
    order = inner_order(part, theory, config)
    only_narrow = sig.valuation("1101").index  # satisfies narrow (u), not broad (t)
    only_broad = sig.valuation("1110").index  # satisfies broad, not narrow
    assert (only_narrow, only_broad) in order
    assert (only_broad, only_narrow) not in order


# --- packet order -------------------------------------------------------------


PAPER_MU_CHAIN_PAIRS = [
    (("000", "mu"), ("100", "mu")), (("100", "mu"), ("110", "mu")),
    (("110", "mu"), ("111", "mu")),
    (("000", "mu"), ("010", "mu")), (("010", "mu"), ("011", "mu")),
    (("011", "mu"), ("111", "mu")),
    (("010", "mu"), ("110", "mu")),
]

PAPER_MU_O_PAIRS = [
    (("100", "mu"), ("000", "o")), (("010", "mu"), ("000", "o")),
    (("110", "mu"), ("100", "o")), (("110", "mu"), ("010", "o")),
    (("011", "mu"), ("010", "o")), (("111", "mu"), ("110", "o")),
    (("111", "mu"), ("011", "o")),
]


def full_partitions(theory):
    """Every packet populated: mu gets the w-half of each cell."""
    sig = theory.signature
    family, cells, order = cells_of(theory)
    w = models(parse("w", sig), sig)
    parts = {
        c.code: CellPartition(
            cell=c, mu=c.carrier & w, o=c.carrier - w, valid_ids=frozenset()
        )
        for c in cells
    }
    return family, cells, order, parts


def test_packet_order_fixture_e_generating_pairs(fixture_e):
    _, cells, order, parts = full_partitions(fixture_e)
    base = packet_order(cells, order, parts)
    for pair in PAPER_MU_CHAIN_PAIRS + PAPER_MU_O_PAIRS:
        assert pair in base
    for code in ("000", "100", "010", "011", "110", "111"):
        assert ((code, "mu"), (code, "o")) in base  # same-cell clause
    assert len(base) == 37


def test_packet_order_tweety_omits_empty(tweety):
    structure = build_structure(tweety)
    packets = set(structure.order.packet_members)
    assert ("00", "o") not in packets  # empty, omitted
    base = structure.order.base_pairs
    assert (("00", "mu"), ("10", "mu")) in base
    assert (("10", "mu"), ("11", "mu")) in base
    assert (("00", "mu"), ("11", "mu")) in base  # closure intact


def test_packet_order_radical_variant(tweety):
    structure = build_structure(tweety, PreferenceConfig(radical_o=True))
    base = structure.order.base_pairs
    # every o sits above every mu, including hierarchy-unrelated ones
    for mu_code in ("00", "10", "11"):
        for o_code in ("10", "11"):
            assert ((mu_code, "mu"), (o_code, "o")) in base
    assert (("10", "o"), ("11", "o")) in base  # o's own hierarchy


def test_o_packets_have_no_outgoing_pairs(fixture_e):
    _, cells, order, parts = full_partitions(fixture_e)
    base = packet_order(cells, order, parts)
    for (a, b) in base:
        assert a[1] == "mu"


# --- element order --------------------------------------------------------------


def test_element_order_tweety_clauses(tweety):
    structure = build_structure(tweety)
    sig = tweety.signature
    lt = structure.order.lt
    b_npf = sig.valuation("101").index  # mu(10)
    pb_nf = sig.valuation("110").index  # mu(11)
    b_np_nf = sig.valuation("100").index  # o(10)
    assert lt(b_npf, pb_nf)  # mu(10) below mu(11)
    assert lt(pb_nf, b_np_nf)  # direct successor clause
    assert not lt(b_npf, b_npf)


def test_element_order_matches_brute_force(tweety):
    structure = build_structure(tweety)
    relation = structure.order.element_pairs()
    assert relation == frozenset(brute_element_relation(structure))


def test_element_order_strict(fixture_e):
    structure = build_structure(fixture_e)
    pairs = structure.order.element_pairs()
    for a, b in pairs:
        assert a != b
        assert (b, a) not in pairs
        for c, d in pairs:
            if b == c:
                assert (a, d) in pairs


def test_mu_packets_flat(tweety):
    structure = build_structure(tweety)
    for (code, kind), ms in structure.order.packet_members.items():
        if kind != "mu":
            continue
        for v in ms:
            for u in ms:
                assert not structure.order.lt(v.index, u.index)


# --- minimal models and consequence ----------------------------------------------


def test_minimal_models_tweety(tweety):
    sig = tweety.signature
    structure = build_structure(tweety)
    assert minimal_models(models(parse("b", sig), sig), structure.order).bitstrings() == ["101"]
    assert minimal_models(models(parse("p", sig), sig), structure.order).bitstrings() == ["110"]
    top = minimal_models(models(parse("top", sig), sig), structure.order)
    assert top.bitstrings() == ["000", "001"]  # the least cell's mu


def test_minimal_models_empty_query(tweety):
    sig = tweety.signature
    structure = build_structure(tweety)
    with pytest.raises(EmptyQueryError):
        minimal_models(models(parse("p & ~b", sig), sig), structure.order)


def test_minimal_models_agrees_with_oracle(tweety):
    sig = tweety.signature
    structure = build_structure(tweety)
    relation = brute_element_relation(structure)
    covered = set(structure.order.packet_of)
    for text in ("b", "p", "b | ~b", "~f", "b & ~f"):
        query = models(parse(text, sig), sig)
        mine = {v.index for v in minimal_models(query, structure.order)}
        assert mine == brute_minimal_models(query, relation, covered)


def test_default_holds_tweety(tweety):
    sig = tweety.signature
    structure = build_structure(tweety)
    assert default_holds(parse("b", sig), parse("f", sig), structure).holds
    assert default_holds(parse("p", sig), parse("~f", sig), structure).holds
    assert not default_holds(parse("p", sig), parse("f", sig), structure).holds
    assert default_holds(parse("b", sig), parse("b", sig), structure).holds


def test_default_holds_witnesses(tweety):
    sig = tweety.signature
    structure = build_structure(tweety)
    verdict = default_holds(parse("b", sig), parse("f", sig), structure)
    assert verdict.witnesses == (("101", "10", "mu"),)


def test_duplicate_default_does_not_move_minima(tweety):
    sig = tweety.signature
    duped = attach(
        tweety, DefaultRule("d1copy", parse("b", sig), parse("f", sig))
    )
    config = PreferenceConfig(variant="cardinality")
    s1 = build_structure(tweety, config)
    s2 = build_structure(duped, config)
    for text in ("b", "p", "top", "b & ~f"):
        q = models(parse(text, sig), sig)
        assert minimal_models(q, s1.order).mask == minimal_models(q, s2.order).mask


# --- classification ----------------------------------------------------------------


def test_classify_bird(tweety):
    sig = tweety.signature
    result = classify_individual(tweety, [parse("b", sig)])
    assert [(code, kind) for code, kind, _ in result.selections] == [("10", "mu")]
    from defarg.logic import format_formula

    assert "f" in {format_formula(f) for f in result.conclusions}


def test_classify_penguin(tweety):
    sig = tweety.signature
    result = classify_individual(tweety, [parse("p", sig)])
    assert [(code, kind) for code, kind, _ in result.selections] == [("11", "mu")]
    from defarg.logic import format_formula

    assert "~f" in {format_formula(f) for f in result.conclusions}


def test_classify_surprise_individual(tweety):
    sig = tweety.signature
    result = classify_individual(tweety, [parse("b", sig), parse("~f", sig)])
    assert [(code, kind) for code, kind, _ in result.selections] == [("10", "o")]
    from defarg.logic import format_formula

    assert "f" not in {format_formula(f) for f in result.conclusions}


def test_classify_inconsistent_facts(tweety):
    sig = tweety.signature
    with pytest.raises(EmptyQueryError):
        classify_individual(tweety, [parse("p", sig), parse("~b", sig)])


def test_classify_conclusions_jointly_satisfiable(tweety):
    sig = tweety.signature
    result = classify_individual(tweety, [parse("b", sig)])
    from defarg.logic import is_consistent

    assert is_consistent(list(result.conclusions), sig)


def test_classify_incomparable_cells_union():
    sig = Signature(["q", "r", "pa"])
    theory = DefaultTheoryRecord(signature=sig)
    theory = attach(theory, DefaultRule("dq", parse("q", sig), parse("pa", sig)))
    theory = attach(theory, DefaultRule("dr", parse("r", sig), parse("~pa", sig)))
    result = classify_individual(theory, [parse("q | r", sig)])
    codes = {code for code, _, _ in result.selections}
    assert codes == {"10", "01"}  # both one-scope cells, incomparable


def test_blocked_inheritance_reaches_consequences():
    # with both scopes attached, the overlap is its own cell; blocking
    # the first rule there turns the symmetric standoff into the other
    # rule's conclusion
    from defarg.defaults import block_inheritance
    from defarg.theoryfile import parse_theory_text

    theory = parse_theory_text("atoms: q, r, pa\ndq: q ~> pa\ndr: r ~> ~pa\n")
    sig = theory.signature
    overlap = parse("q & r", sig)
    standoff = build_structure(theory)
    assert not default_holds(overlap, parse("pa", sig), standoff).holds
    assert not default_holds(overlap, parse("~pa", sig), standoff).holds

    blocked = block_inheritance(theory, "dq", overlap)
    structure = build_structure(blocked)
    assert default_holds(overlap, parse("~pa", sig), structure).holds
    assert not default_holds(overlap, parse("pa", sig), structure).holds
    # away from the blocked subset the first rule still fires
    assert default_holds(parse("q & ~r", sig), parse("pa", sig), structure).holds


def test_block_inside_one_cell_is_point_level_only():
    # a block strictly inside a single attachment's cell cannot refine
    # the packetwise order (cells come from attachment scopes alone);
    # it still silences the rule for point queries
    from defarg.defaults import block_inheritance, valid_defaults
    from defarg.theoryfile import parse_theory_text

    theory = parse_theory_text("atoms: q, r, pa\ndq: q ~> pa\n")
    sig = theory.signature
    blocked = block_inheritance(theory, "dq", parse("q & r", sig))
    assert valid_defaults(blocked, parse("q & r", sig)).valid == frozenset()
    structure = build_structure(blocked)
    assert {c.code for c in structure.cells} == {"0", "1"}
    assert default_holds(parse("q & r", sig), parse("pa", sig), structure).holds


# --- dump format ---------------------------------------------------------------


def test_format_order_golden_tweety(tweety):
    structure = build_structure(tweety)
    text = format_order(structure)
    assert "mu(10) < o(10)" in text
    assert "mu(11) < o(10)" in text
    assert text == format_order(build_structure(tweety))  # deterministic
