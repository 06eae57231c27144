"""Command line front end.

    defarg check THEORY [--at FORMULA]
    defarg hierarchy THEORY [--dot]
    defarg query THEORY minimal GAMMA
    defarg query THEORY holds GAMMA PSI
    defarg query THEORY classify FACT [FACT ...]
    defarg session --participants a,b --arbiter arb (--atoms p,q | --elements x,y)
    defarg replay TRANSCRIPT
    defarg serve [--host H] [--port P]
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .defaults import check_consistency_conditions, valid_defaults
from .hierarchy import export_dot, format_cells
from .logic import format_formula, parse_formula
from .preference import (
    PreferenceConfig,
    build_structure,
    classify_individual,
    default_holds,
    format_order,
    minimal_models,
)
from .protocol import (
    Participant,
    SessionConfig,
    load_transcript,
    save_transcript,
    state_view,
)
from .theoryfile import parse_theory_text


def _load_theory(path: str):
    return parse_theory_text(Path(path).read_text(encoding="utf-8"))


def cmd_check(args) -> int:
    theory = _load_theory(args.theory)
    report = check_consistency_conditions(theory)
    if report.passed:
        print("consistency conditions: pass")
    else:
        print("consistency conditions: FAIL")
        for v in report.violations:
            print(f"  - {v}")
        return 1
    points = [args.at] if args.at else None
    if points is None:
        seen = set()
        points = []
        for d in theory.defaults:
            text = format_formula(d.scope)
            if text not in seen:
                seen.add(text)
                points.append(text)
    for text in points:
        beta = parse_formula(text, theory.signature)
        result = valid_defaults(theory, beta)
        print(f"at {text}:")
        print(f"  visible: {', '.join(sorted(result.visible)) or '-'}")
        print(f"  valid:   {', '.join(sorted(result.valid)) or '-'}")
        for rule_id, cause in result.eliminated:
            print(f"  eliminated: {rule_id} ({cause})")
    return 0


def cmd_hierarchy(args) -> int:
    theory = _load_theory(args.theory)
    structure = build_structure(theory)
    if args.dot:
        print(export_dot(structure.family, list(structure.cells), structure.hierarchy))
        return 0
    print("cells (code, expression, size):")
    print(format_cells(structure.family, list(structure.cells)))
    print("order (below < above):")
    for x, y in sorted(structure.hierarchy.pairs):
        print(f"  {x} < {y}")
    print("direct successors:")
    for x, y in sorted(structure.hierarchy.hasse):
        print(f"  {x} -> {y}")
    print(format_order(structure))
    return 0


def cmd_query(args) -> int:
    theory = _load_theory(args.theory)
    config = PreferenceConfig(variant=args.variant)
    structure = build_structure(theory, config)
    sig = theory.signature
    if args.verb == "minimal":
        from .logic import models

        gamma = parse_formula(args.gamma, sig)
        minima = minimal_models(models(gamma, sig), structure.order)
        print("minimal models:", " ".join(minima.bitstrings()))
    elif args.verb == "holds":
        gamma = parse_formula(args.gamma, sig)
        psi = parse_formula(args.psi, sig)
        verdict = default_holds(gamma, psi, structure)
        print("holds" if verdict.holds else "does not hold")
        for bits, cell, kind in verdict.witnesses:
            print(f"  minimal model {bits} from {kind}({cell})")
        return 0 if verdict.holds else 1
    else:
        facts = [parse_formula(t, sig) for t in args.facts]
        result = classify_individual(theory, facts, structure=structure)
        for code, kind, ms in result.selections:
            print(f"cell {code}, packet {kind}: {' '.join(ms.bitstrings())}")
        print(
            "conclusions:",
            ", ".join(format_formula(f) for f in result.conclusions) or "-",
        )
    return 0


def cmd_session(args) -> int:
    from .service import run_stdio

    participants = [
        Participant(p, p, "participant") for p in args.participants.split(",") if p
    ]
    participants.append(Participant(args.arbiter, args.arbiter, "arbiter"))
    config = SessionConfig(
        participants=tuple(participants),
        atoms=tuple(a for a in (args.atoms or "").split(",") if a),
        elements=tuple(e for e in (args.elements or "").split(",") if e),
    )
    seed = Path(args.seed).read_text(encoding="utf-8") if args.seed else None
    entry = run_stdio(config, seed_theory=seed)
    if args.transcript:
        Path(args.transcript).write_text(
            save_transcript(entry.state, entry.records), encoding="utf-8"
        )
    return 0


def cmd_replay(args) -> int:
    text = Path(args.transcript).read_text(encoding="utf-8")
    state, records = load_transcript(text)
    if args.verify:
        if save_transcript(state, records) != text:
            print("transcript does not round-trip", file=sys.stderr)
            return 1
        print("round-trip: ok")
    print(json.dumps(state_view(state), indent=2, sort_keys=True))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="defarg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="consistency conditions and validity report")
    p.add_argument("theory")
    p.add_argument("--at", help="report validity at this formula")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("hierarchy", help="cells, orders and the packet graph")
    p.add_argument("theory")
    p.add_argument("--dot", action="store_true", help="emit graph-description text")
    p.set_defaults(func=cmd_hierarchy)

    p = sub.add_parser("query", help="minimal models, consequence, classification")
    p.add_argument("theory")
    p.add_argument(
        "--variant",
        default="subset",
        choices=["subset", "cardinality", "priority", "lexicographic-specificity"],
    )
    qsub = p.add_subparsers(dest="verb", required=True)
    q = qsub.add_parser("minimal")
    q.add_argument("gamma")
    q = qsub.add_parser("holds")
    q.add_argument("gamma")
    q.add_argument("psi")
    q = qsub.add_parser("classify")
    q.add_argument("facts", nargs="+")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("session", help="interactive stdio session loop")
    p.add_argument("--participants", required=True, help="comma separated ids")
    p.add_argument("--arbiter", default="arbiter")
    p.add_argument("--atoms", help="formula session signature")
    p.add_argument("--elements", help="extensional session domain")
    p.add_argument("--seed", help="theory file preloaded as arbiter moves")
    p.add_argument("--transcript", help="write the transcript here on exit")
    p.set_defaults(func=cmd_session)

    p = sub.add_parser("replay", help="replay a transcript file")
    p.add_argument("transcript")
    p.add_argument("--verify", action="store_true", help="check lossless round-trip")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("serve", help="run the HTTP session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8420)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
