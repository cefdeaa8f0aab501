"""Command-line front end wiring ingestion, generation, checking, and
reporting into one pipeline.

Exit codes: 0 success (for `check`: containment holds), 1 a property is
violated, 2 operational error (unreadable input, invalid model, cyclic
high-level model, atom mismatch, missing external tool, engine divergence).
"""

from __future__ import annotations

import argparse
import sys

from . import checker, ingest, ltl, nusmv, semantics, smv

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_ERROR = 2


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (OSError, ingest.IngestError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (
        ltl.GenerationError,
        smv.SmvGenerationError,
        smv.AtomMismatchError,
        semantics.StateCapExceeded,
        checker.UnknownAtomError,
        checker.OracleError,
        nusmv.ToolNotFound,
        nusmv.ToolRunError,
        nusmv.OutputParseError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="containcheck",
        description=(
            "Check that a low-level behavior model contains the behavior of "
            "its high-level counterpart."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="parse and validate a model file")
    p_validate.add_argument("model", help=".behavior or .json model file")
    p_validate.set_defaults(handler=cmd_validate)

    p_ltl = sub.add_parser(
        "gen-ltl", help="compile a high-level model to LTLSPEC properties"
    )
    p_ltl.add_argument("high", help="high-level model file")
    p_ltl.add_argument("-o", "--out", help="output file (default: stdout)")
    p_ltl.add_argument(
        "--join-mode",
        choices=("always", "simultaneous"),
        default="always",
        help="join template variant (default: %(default)s)",
    )
    p_ltl.set_defaults(handler=cmd_gen_ltl)

    p_smv = sub.add_parser(
        "gen-smv", help="compile a low-level model to an SMV description"
    )
    p_smv.add_argument("low", help="low-level model file")
    p_smv.add_argument("-o", "--out", help="output file (default: stdout)")
    p_smv.add_argument(
        "--embed-ltl",
        metavar="HIGH",
        help="also embed the LTLSPEC lines generated from this high-level model",
    )
    p_smv.add_argument(
        "--join-mode",
        choices=("always", "simultaneous"),
        default="always",
        help="join template variant for --embed-ltl (default: %(default)s)",
    )
    p_smv.set_defaults(handler=cmd_gen_smv)

    p_check = sub.add_parser(
        "check", help="check containment of the high-level model in the low-level one"
    )
    p_check.add_argument("high", help="high-level model file")
    p_check.add_argument("low", help="low-level model file")
    p_check.add_argument(
        "--engine",
        choices=("internal", "nusmv", "both"),
        default="internal",
        help="checking engine; 'both' also asserts verdict agreement",
    )
    p_check.add_argument(
        "--format", choices=("text", "json"), default="text", help="report format"
    )
    p_check.add_argument(
        "--cap",
        type=int,
        default=semantics.DEFAULT_STATE_CAP,
        help="state-space exploration cap (default: %(default)s)",
    )
    p_check.add_argument(
        "--depth",
        type=int,
        help=(
            "additionally cross-check internal verdicts with the brute-force "
            "lasso enumeration up to this depth; divergence is an error"
        ),
    )
    p_check.add_argument(
        "--join-mode",
        choices=("always", "simultaneous"),
        default="always",
        help="join template variant (default: %(default)s)",
    )
    p_check.add_argument(
        "--dump-states",
        action="store_true",
        help="dump the reachable states of the low-level system to stderr",
    )
    p_check.add_argument("--nusmv-path", help="path to the external checker binary")
    p_check.set_defaults(handler=cmd_check)
    return parser


def cmd_validate(args) -> int:
    path = args.model
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    result = (
        ingest.parse_json(text) if path.endswith(".json") else ingest.parse_dsl(text, path)
    )
    if isinstance(result, list):
        for error in result:
            print(str(error), file=sys.stderr)
        return EXIT_ERROR
    print(f"{result.name}: valid ({len(result.nodes)} nodes, {len(result.edges)} edges)")
    return EXIT_OK


def cmd_gen_ltl(args) -> int:
    model = ingest.load_model(args.high)
    properties = ltl.generate_properties(model, join_mode=args.join_mode)
    text = ltl.render_ltlspec(properties)
    _write_output(text, args.out)
    return EXIT_OK


def cmd_gen_smv(args) -> int:
    model = ingest.load_model(args.low)
    if args.embed_ltl:
        high = ingest.load_model(args.embed_ltl)
        properties = ltl.generate_properties(high, join_mode=args.join_mode)
        text = smv.bundle_check_file(model, properties)
    else:
        text = smv.render_smv(smv.generate_smv(model))
    _write_output(text, args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    if args.cap < 1:
        print("error: --cap must be positive", file=sys.stderr)
        return EXIT_ERROR
    high = ingest.load_model(args.high)
    low = ingest.load_model(args.low)
    properties = ltl.generate_properties(high, join_mode=args.join_mode)
    # Surfaces the atom mismatch before any engine runs, and doubles as the
    # external engine's input.
    bundle = smv.bundle_check_file(low, properties)

    internal_verdicts = None
    if args.engine in ("internal", "both"):
        module = smv.generate_smv(low)
        system = semantics.build_system(module)
        if args.dump_states:
            _dump_states(system, args.cap)
        internal_verdicts = checker.check_all(system, properties, cap=args.cap)
        if args.depth is not None:
            for verdict, prop in zip(internal_verdicts, properties):
                oracle = checker.oracle_check(system, prop.formula, args.depth)
                if oracle.holds != verdict.holds:
                    print(
                        "error: internal and brute-force verdicts diverge on "
                        f"{ltl.render_formula(prop.formula)}",
                        file=sys.stderr,
                    )
                    return EXIT_ERROR

    external_verdicts = None
    if args.engine in ("nusmv", "both"):
        raw = nusmv.run_check(bundle, path_override=args.nusmv_path)
        external_verdicts = nusmv.parse_output(raw)

    if args.engine == "both":
        internal_vector = [v.holds for v in internal_verdicts]
        external_vector = [v.holds for v in external_verdicts]
        if internal_vector != external_vector:
            print(
                f"error: engine verdicts diverge (internal {internal_vector}, "
                f"external {external_vector})",
                file=sys.stderr,
            )
            return EXIT_ERROR

    verdicts = internal_verdicts if internal_verdicts is not None else external_verdicts
    sys.stdout.write(checker.render_report(verdicts, format=args.format))
    return EXIT_OK if all(v.holds for v in verdicts) else EXIT_VIOLATION


def _dump_states(system: semantics.TransitionSystem, cap: int) -> None:
    reach = semantics.reachable_states(system, cap=cap)
    for state in reach.order:
        pairs = ", ".join(f"{n} = {v}" for n, v in system.state_items(state))
        print(pairs, file=sys.stderr)


def _write_output(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    sys.exit(main())
