"""Command-line driver for the generation pipeline.

Subcommands mirror the pipeline stages:

    nlgen generate  --schema S --data D [--profile fluent|plain] ...
    nlgen plan      --schema S --data D
    nlgen sentplan  --plan P [--profile fluent|plain]
    nlgen realize   --sentences F [--lexicon L]

plan/sentplan/realize read and write the canonical JSON serializations,
so their composition is byte-identical to generate.  "-" reads a stage
input from stdin.  Generated text is the only stdout content; diagnostics
go to stderr as a single "stage: message" line, and each failing stage
has its own exit code (1 parse, 2 traverse, 3 sentplan, 4 realize,
5 I/O).
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path

from . import ir, realize, schema, sentplan
from .errors import (
    DataError,
    NlgenError,
    SchemaParseError,
    SerializationError,
    TemplateError,
)
from .lexicon import Lexicon, default_lexicon, load_lexicon

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_TRAVERSE = 2
EXIT_SENTPLAN = 3
EXIT_REALIZE = 4
EXIT_IO = 5


class _StageFailure(Exception):
    def __init__(self, stage: str, code: int, message: str):
        super().__init__(message)
        self.stage = stage
        self.code = code


def _fail(stage: str, code: int, message: str) -> _StageFailure:
    first_line = str(message).splitlines()[0] if str(message) else "error"
    return _StageFailure(stage, code, first_line)


def _read_text(path: str, stage: str = "io") -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _fail(stage, EXIT_IO, f"cannot read {path}: {exc}")


def _write_text(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise _fail("io", EXIT_IO, f"cannot write {path}: {exc}")


def _load_schema(path: str) -> schema.SchemaDef:
    source = _read_text(path)
    try:
        return schema.parse_schema(source)
    except SchemaParseError as exc:
        raise _fail("parse", EXIT_PARSE, f"{path}: {exc}")


def _load_data(path: str) -> schema.DataRecordSet:
    text = _read_text(path)
    try:
        return schema.load_data(text)
    except DataError as exc:
        raise _fail("parse", EXIT_PARSE, f"{path}: {exc}")


def _load_lexicon(path: str | None) -> Lexicon:
    if path is None:
        return default_lexicon()
    text = _read_text(path)
    try:
        return load_lexicon(text)
    except DataError as exc:
        raise _fail("parse", EXIT_PARSE, f"{path}: {exc}")


def _load_templates(path: str | None) -> dict[str, realize.Template]:
    if path is None:
        text = resources.files("nlgen").joinpath("data/templates.txt") \
            .read_text(encoding="utf-8")
    else:
        text = _read_text(path)
    try:
        return realize.parse_templates(text)
    except TemplateError as exc:
        raise _fail("parse", EXIT_PARSE, str(exc))


def _make_plan(args) -> ir.DocumentPlan:
    schema_def = _load_schema(args.schema)
    data = _load_data(args.data)
    try:
        return schema.traverse(schema_def, data)
    except NlgenError as exc:
        raise _fail("traverse", EXIT_TRAVERSE, str(exc))


def _plan_sentences(plan: ir.DocumentPlan, profile: str):
    try:
        return sentplan.plan_sentences(plan, profile)
    except NlgenError as exc:
        raise _fail("sentplan", EXIT_SENTPLAN, str(exc))


def _realize_document(plans, lex: Lexicon) -> str:
    try:
        return realize.realize_document(plans, lex)
    except NlgenError as exc:
        raise _fail("realize", EXIT_REALIZE, str(exc))


def _emit(text: str) -> None:
    if text:
        sys.stdout.write(text + "\n")


def _generate_one(args, schema_path: str, data_path: str,
                  lex: Lexicon) -> str:
    plan_args = argparse.Namespace(schema=schema_path, data=data_path)
    plan = _make_plan(plan_args)
    plans = _plan_sentences(plan, args.profile)
    if getattr(args, "dump_plan", None):
        _write_text(args.dump_plan, ir.document_plan_to_json(plan))
    if getattr(args, "dump_sentences", None):
        _write_text(args.dump_sentences, ir.sentence_plans_to_json(plans))
    return _realize_document(plans, lex)


def cmd_generate(args) -> int:
    lex = _load_lexicon(args.lexicon)
    _load_templates(args.templates)  # validate the template library
    if args.batch:
        batch_dir = Path(args.batch)
        if not batch_dir.is_dir():
            raise _fail("io", EXIT_IO, f"not a directory: {args.batch}")
        data_files = sorted(batch_dir.glob("*.json"))
        if not data_files:
            raise _fail("io", EXIT_IO,
                        f"no .json data files in {args.batch}")

        def run(data_file: Path) -> tuple[Path, str]:
            text = _generate_one(args, args.schema, str(data_file), lex)
            return data_file, text

        with ThreadPoolExecutor(max_workers=4) as pool:
            for data_file, text in pool.map(run, data_files):
                _write_text(str(data_file.with_suffix(".txt")),
                            text + "\n" if text else "")
        return EXIT_OK
    if not args.data:
        raise _fail("io", EXIT_IO, "either --data or --batch is required")
    _emit(_generate_one(args, args.schema, args.data, lex))
    return EXIT_OK


def cmd_plan(args) -> int:
    plan = _make_plan(args)
    sys.stdout.write(ir.document_plan_to_json(plan))
    return EXIT_OK


def cmd_sentplan(args) -> int:
    text = _read_text(args.plan)
    try:
        plan = ir.document_plan_from_json(text)
    except SerializationError as exc:
        raise _fail("sentplan", EXIT_SENTPLAN, str(exc))
    plans = _plan_sentences(plan, args.profile)
    sys.stdout.write(ir.sentence_plans_to_json(plans))
    return EXIT_OK


def cmd_realize(args) -> int:
    lex = _load_lexicon(args.lexicon)
    text = _read_text(args.sentences)
    try:
        plans = ir.sentence_plans_from_json(text)
    except SerializationError as exc:
        raise _fail("realize", EXIT_REALIZE, str(exc))
    _emit(_realize_document(plans, lex))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlgen",
        description="Generate English documents from structured data "
                    "through a schema-driven three-stage pipeline.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="run the full pipeline")
    gen.add_argument("--schema", required=True, help="schema file")
    gen.add_argument("--data", help="data file (JSON)")
    gen.add_argument("--profile", choices=sentplan.PROFILES,
                     default="fluent")
    gen.add_argument("--templates", help="template library override")
    gen.add_argument("--lexicon", help="lexicon file override")
    gen.add_argument("--dump-plan", metavar="PATH",
                     help="write the document plan JSON here")
    gen.add_argument("--dump-sentences", metavar="PATH",
                     help="write the sentence plans JSON here")
    gen.add_argument("--batch", metavar="DIR",
                     help="generate one document per .json file in DIR, "
                          "writing .txt files next to them")
    gen.set_defaults(func=cmd_generate)

    plan = sub.add_parser("plan", help="stage 1: schema + data to "
                                       "document plan JSON")
    plan.add_argument("--schema", required=True)
    plan.add_argument("--data", required=True)
    plan.set_defaults(func=cmd_plan)

    sp = sub.add_parser("sentplan", help="stage 2: document plan JSON to "
                                         "sentence plans JSON")
    sp.add_argument("--plan", required=True,
                    help="document plan file, or - for stdin")
    sp.add_argument("--profile", choices=sentplan.PROFILES,
                    default="fluent")
    sp.set_defaults(func=cmd_sentplan)

    rz = sub.add_parser("realize", help="stage 3: sentence plans JSON to "
                                        "text")
    rz.add_argument("--sentences", required=True,
                    help="sentence plans file, or - for stdin")
    rz.add_argument("--lexicon", help="lexicon file override")
    rz.set_defaults(func=cmd_realize)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _StageFailure as failure:
        print(f"{failure.stage}: {failure}", file=sys.stderr)
        return failure.code


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
