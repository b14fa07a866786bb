"""Command-line front end.

Exit statuses: 0 success, 2 the script failed (or got stuck), 3 type or
configuration error, 4 parse error or unreadable file, 5 out of fuel.
"""
from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .evaluator import (CHECKS, DEFAULT_FUEL, Configuration, Evaluator, Failed, Finished,
                        FuelExhausted, Stuck)
from .exprs import Expr, FormulaT, free_vars, substitute
from .model import LanguageDef
from .script import parse_script, print_expr
from .stdlib import ASSETS, label_map_expr, paper_maps
from .syntax import ParseError, export_json, parse_language, parse_maps, print_language
from .typesys import ConfigError, typecheck_config

EXIT_OK, EXIT_FAILED, EXIT_TYPE, EXIT_PARSE, EXIT_FUEL = 0, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, status: int, message: str):
        self.status = status
        super().__init__(message)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ltr", description="Transform language definitions.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("run", "run a script and print the resulting language"),
                        ("check", "type-check a script"),
                        ("export", "print a language, optionally transformed, as JSON")):
        c = sub.add_parser(name, help=help_)
        c.add_argument("--lang", required=True, help="language definition (.lang)")
        src = c.add_mutually_exclusive_group(required=name != "export")
        src.add_argument("--script", help="transformation script (.ltr)")
        src.add_argument("--asset", choices=sorted(ASSETS), help="shipped transformation")
        c.add_argument("--maps", help="label maps; the shipped ones are used if omitted")
        c.add_argument("--out", help="write the result here instead of stdout")
        c.add_argument("--check-mode", choices=sorted(CHECKS), default="structural")
        c.add_argument("--trace", action="store_true", help="print each configuration to stderr")
        c.add_argument("--fuel", type=_positive, default=DEFAULT_FUEL)
        c.add_argument("--format", choices=("text", "json"),
                       default="json" if name == "export" else "text")
        c.add_argument("--keep-generated", action="store_true",
                       help="do not reset generated names on grammar changes")
        c.add_argument("--rename-all", action="store_true",
                       help="uniquefy renames single occurrences too")
    return p


def _positive(s: str) -> int:
    n = int(s)
    if n <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(EXIT_PARSE, f"{path}: {exc.strerror or exc}") from None


def _formula_preds(e) -> set[str]:
    out = set()
    if isinstance(e, FormulaT):
        out.add(e.pred)
    for _, child in e.children():
        if hasattr(child, "children") and not hasattr(child, "sub"):
            out |= _formula_preds(child)
    return out


def load(args) -> tuple[LanguageDef, Optional[Expr]]:
    """Parse inputs and bind label maps; the script is not yet checked."""
    try:
        lang = parse_language(_read(args.lang), args.lang)
        maps = parse_maps(_read(args.maps), args.maps) if args.maps else paper_maps()
        if args.asset:
            lang, e = ASSETS[args.asset].with_maps(maps).prepare(lang)
            return lang, e
        if args.script:
            e = parse_script(_read(args.script), lang, args.script)
            # predicates the script emits must be known to the language check
            new = sorted(_formula_preds(e) - set(lang.preds))
            if new:
                lang = lang.declare(preds=new)
            binds = [(n, label_map_expr(maps[n], lang)) for n in sorted(free_vars(e)) if n in maps]
            return lang, substitute(e, binds)
        return lang, None
    except ParseError as exc:
        raise CliError(EXIT_PARSE, str(exc)) from None
    except KeyError as exc:
        raise CliError(EXIT_TYPE, str(exc.args[0])) from None


def execute(args, lang: LanguageDef, e: Expr, err) -> LanguageDef:
    check = CHECKS[args.check_mode]
    try:
        e = typecheck_config(frozenset(), lang, e, check)
    except ConfigError as exc:
        raise CliError(EXIT_TYPE, str(exc)) from None
    ev = Evaluator(check, preserve_generated=args.keep_generated,
                   only_repeated=not args.rename_all)

    def show(c: Configuration) -> None:
        gen = ", ".join(sorted(map(str, c.generated)))
        print(f"{{{gen}}} ; {print_expr(c.expr)}", file=err)

    c0 = Configuration.initial(lang, e)
    if args.trace:
        show(c0)
    res = ev.run(c0, args.fuel, on_step=show if args.trace else None)
    out = res.outcome
    if isinstance(out, Finished):
        return out.config.language
    if isinstance(out, FuelExhausted):
        raise CliError(EXIT_FUEL, f"out of fuel after {res.steps} steps")
    if isinstance(out, Stuck):
        raise CliError(EXIT_FAILED, f"evaluation stuck: {out.reason}")
    assert isinstance(out, Failed)
    raise CliError(EXIT_FAILED, f"script failed after {res.steps} steps; language left unchanged")


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        lang, e = load(args)
        if args.command == "check":
            try:
                typecheck_config(frozenset(), lang, e, CHECKS[args.check_mode])
            except ConfigError as exc:
                raise CliError(EXIT_TYPE, str(exc)) from None
            print("Language", file=out)
            return EXIT_OK
        if e is not None:
            lang = execute(args, lang, e, err)
        text = export_json(lang) + "\n" if args.format == "json" else print_language(lang)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            out.write(text)
        return EXIT_OK
    except CliError as exc:
        print(f"ltr: {exc}", file=err)
        return exc.status


if __name__ == "__main__":
    sys.exit(main())
