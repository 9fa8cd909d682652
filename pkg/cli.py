# cli.py
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from exceptions import MuSatError
from models.report import Construction, PipelineReport, Verdict
from services.export import render
from services.formula_service import analyze, parse_clean
from services.pipeline import STAGES, build_stage, decide_sat, model_check, run_pipeline
from services.semantics import load_kripke
from utils import configure_logging

logger = logging.getLogger(__name__)

FRAGMENT_CHOICES = ["auto"] + [c.value for c in Construction if c != Construction.UNSUPPORTED]


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _construction(choice: str) -> Optional[Construction]:
    return None if choice == "auto" else Construction(choice)


def _print_stats(report: PipelineReport, style: str) -> None:
    if style == "json":
        print(report.model_dump_json(indent=2, exclude={"witness"}))
        return
    rows = [("formula", report.formula), ("fragment", report.fragment.best_fragment.value),
            ("construction", report.construction.value), ("verdict", report.verdict.value)]
    rows += [(f"size.{k}", v) for k, v in report.sizes.items()]
    rows += [(f"bound.{k}", f"{v:.0f}") for k, v in report.bounds.items()]
    rows += [(f"time.{k}", f"{v:.4f}s") for k, v in report.timings.items()]
    if report.fallbacks:
        rows.append(("fallbacks", ", ".join(report.fallbacks)))
    width = max(len(name) for name, _ in rows)
    for name, value in rows:
        print(f"{name.ljust(width)}  {value}")


def _dump_dot(text: str, construction: Optional[Construction], sat_mode: bool, directory: str) -> None:
    run = run_pipeline(text, construction, sat_mode)
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for name, value in (("apt", run.apt), ("arena", run.arena), ("tracking", run.tracking),
                        ("h", run.h), ("game", run.product.game)):
        (out / f"{name}.dot").write_text(render(value, "dot"))
    logger.info(f"Wrote DOT dumps to {out}")


def cmd_sat(args) -> int:
    text = _read(args.file)
    construction = _construction(args.fragment)
    sat_mode = not args.literal_letters
    report = decide_sat(text, construction, sat_mode=sat_mode, verify=not args.no_verify)
    print(report.verdict.value)
    if report.witness is not None:
        if args.witness:
            Path(args.witness).write_text(report.witness.model_dump_json(indent=2))
            print(f"witness written to {args.witness}")
        else:
            print(report.witness.model_dump_json(indent=2))
    if args.stats:
        _print_stats(report, args.stats)
    if args.dump_dot:
        _dump_dot(text, construction, sat_mode, args.dump_dot)
    return 0 if report.verdict == Verdict.SAT else 1


def cmd_classify(args) -> int:
    _, fragment = analyze(parse_clean(_read(args.file)))
    print(fragment.best_fragment.value)
    return 0


def cmd_mc(args) -> int:
    kripke = load_kripke(_read(args.kripke))
    holds = model_check(_read(args.formula), kripke)
    print("true" if holds else "false")
    return 0 if holds else 1


def cmd_dump(args) -> int:
    value = build_stage(_read(args.file), args.stage, _construction(args.fragment), not args.literal_letters)
    print(render(value, args.format), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mu-sat", description="Satisfiability for the modal mu-calculus")
    commands = parser.add_subparsers(dest="command", required=True)

    sat = commands.add_parser("sat", help="decide satisfiability")
    sat.add_argument("file", help="formula file, - for stdin")
    sat.add_argument("--fragment", choices=FRAGMENT_CHOICES, default="auto")
    sat.add_argument("--witness", metavar="OUT", help="write the witness structure as JSON")
    sat.add_argument("--stats", choices=["json", "table"])
    sat.add_argument("--dump-dot", metavar="DIR")
    sat.add_argument("--literal-letters", action="store_true", help="branch over all letters in the arena")
    sat.add_argument("--no-verify", action="store_true")
    sat.set_defaults(handler=cmd_sat)

    classify = commands.add_parser("classify", help="print the most specific fragment")
    classify.add_argument("file")
    classify.set_defaults(handler=cmd_classify)

    mc = commands.add_parser("mc", help="model check a Kripke structure")
    mc.add_argument("formula")
    mc.add_argument("kripke")
    mc.set_defaults(handler=cmd_mc)

    dump = commands.add_parser("dump", help="print an intermediate object")
    dump.add_argument("stage", choices=STAGES)
    dump.add_argument("file")
    dump.add_argument("--format", choices=["json", "dot", "pgsolver"], default="json")
    dump.add_argument("--fragment", choices=FRAGMENT_CHOICES, default="auto")
    dump.add_argument("--literal-letters", action="store_true")
    dump.set_defaults(handler=cmd_dump)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    configure_logging()
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    try:
        return args.handler(args)
    except (MuSatError, ValidationError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
