"""Concrete syntax for language definitions, label-map files and JSON export.

A ``.lang`` file looks like::

    # simply typed lambda calculus
    ops: B arrow lam app
    preds: |- -->

    Types T ::= B | (arrow T T).

    G |- e1 : (arrow T1 T2)
    G |- e2 : T1
    ---
    G |- (app e1 e2) : T2

Terms are parenthesised prefix applications, ``(bind x e)`` is a unary
binder and ``(subst e v x)`` is ``e[v/x]``. Any identifier that is not a
declared operator is a meta-variable; ``T1'`` carries one prime and
``X#3`` is a generated variable.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .model import (Binder, Constructor, Formula, LanguageDef, MetaVar, Production,
                    Rule, Subst, Term, Var, mv)

MIXFIX = frozenset({"|-", "⊢"})
RESERVED_TERM_HEADS = frozenset({"bind", "subst"})


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


class ParseError(Exception):
    def __init__(self, span: SourceSpan, message: str, expected: Iterable[str] = ()):
        self.span = span
        self.message = message or "parse error"
        self.expected = tuple(expected)
        super().__init__(f"{span}: {self.message}")


# -- lexer -------------------------------------------------------------------

SYMBOL_CHARS = "-<>=|:!&*+/^~⊢⟶→⊔≤≥∘"

_TOKEN_RE = re.compile(
    r"""
    (?P<NEWLINE>\n)
  | (?P<SPACE>[ \t\r\f\v]+)
  | (?P<COMMENT>\#[^\n]*)
  | (?P<STRING>"(?:[^"\\\n]|\\.)*")
  | (?P<META>\?[^\W\d]\w*(?:\#\d+)?'*)
  | (?P<IDENT>[^\W\d]\w*(?:\#\d+)?'*)
  | (?P<RSEQ>;r(?!\w))
  | (?P<ELLIPSIS>\.\.\.)
  | (?P<PUNCT>[()\[\]{},;@.])
  | (?P<SYM>[""" + re.escape(SYMBOL_CHARS) + r"""]+)
  """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int
    space_before: bool = field(default=True, compare=False)


def tokenize(text: str, file: str = "<input>", keep_newlines: bool = False) -> list[Token]:
    tokens: list[Token] = []
    pos, line, col = 0, 1, 1
    space = True
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(SourceSpan(file, line, col), f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        s = m.group()
        if kind == "COMMENT" and not space:
            # '#' glued to a previous token is not a comment
            raise ParseError(SourceSpan(file, line, col), "unexpected '#'")
        if kind == "NEWLINE":
            if keep_newlines:
                tokens.append(Token("NEWLINE", s, line, col, space))
            line, col = line + 1, 1
            space = True
        elif kind in ("SPACE", "COMMENT"):
            col += len(s)
            space = True
        else:
            tokens.append(Token(kind, s, line, col, space))
            col += len(s)
            space = False
        pos = m.end()
    tokens.append(Token("EOF", "", line, col, True))
    return tokens


def is_dashes(tok: Token) -> bool:
    return tok.kind == "SYM" and len(tok.text) >= 3 and set(tok.text) == {"-"}


def is_symbolic(name: str) -> bool:
    return not re.fullmatch(r"[^\W\d]\w*", name)


class TokenStream:
    def __init__(self, tokens: list[Token], file: str):
        self.toks = tokens
        self.i = 0
        self.file = file

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "EOF":
            self.i += 1
        return t

    def span(self, tok: Optional[Token] = None) -> SourceSpan:
        t = tok or self.tok
        return SourceSpan(self.file, t.line, t.column)

    def error(self, message: str, expected: Iterable[str] = ()) -> ParseError:
        t = self.tok
        found = "end of input" if t.kind == "EOF" else repr(t.text)
        return ParseError(self.span(), f"{message} (found {found})", expected)

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind not in ("STRING", "EOF")

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}", [text])
        return self.next()

    def skip_newlines(self) -> None:
        while self.tok.kind == "NEWLINE":
            self.next()


# -- language files ----------------------------------------------------------

class _LangParser:
    def __init__(self, text: str, file: str):
        self.ts = TokenStream(tokenize(text, file, keep_newlines=True), file)
        self.ops: list[str] = []
        self.preds: list[str] = []

    def parse(self) -> LanguageDef:
        ts = self.ts
        grammar: list[Production] = []
        rules: list[Rule] = []
        while True:
            ts.skip_newlines()
            t = ts.tok
            if t.kind == "EOF":
                break
            if t.kind == "IDENT" and t.text in ("ops", "preds") and ts.peek().text == ":":
                self._header()
            elif t.kind == "IDENT" and ts.peek().kind == "IDENT" and ts.peek(2).text == "::=":
                prod = self._production()
                if any(p.category == prod.category for p in grammar):
                    raise ParseError(ts.span(t), f"category {prod.category!r} defined twice")
                grammar.append(prod)
            else:
                rules.append(self._rule())
        return LanguageDef(tuple(grammar), tuple(rules), tuple(self.ops), tuple(self.preds))

    def _header(self) -> None:
        ts = self.ts
        which = ts.next().text
        ts.next()
        target = self.ops if which == "ops" else self.preds
        other = self.preds if which == "ops" else self.ops
        while ts.tok.kind in ("IDENT", "SYM"):
            t = ts.next()
            if t.text in other:
                raise ParseError(ts.span(t), f"{t.text!r} declared as both operator and predicate")
            if t.text in RESERVED_TERM_HEADS:
                raise ParseError(ts.span(t), f"{t.text!r} is reserved")
            if t.text not in target:
                target.append(t.text)
        if ts.tok.kind not in ("NEWLINE", "EOF"):
            raise ts.error("expected a name in declaration list")

    def _production(self) -> Production:
        ts = self.ts
        cat = ts.next().text
        x = mv(ts.next().text)
        ts.next()  # ::=
        alts = [self._term()]
        while True:
            ts.skip_newlines()
            if ts.at("|"):
                ts.next()
                ts.skip_newlines()
                alts.append(self._term())
            else:
                break
        ts.expect(".")
        return Production(cat, x, tuple(alts))

    def _rule(self) -> Rule:
        ts = self.ts
        prems = []
        while True:
            ts.skip_newlines()
            if is_dashes(ts.tok):
                ts.next()
                break
            if ts.tok.kind == "EOF":
                raise ts.error("expected a premise or '---'", ["---"])
            prems.append(self._formula())
        ts.skip_newlines()
        concl = self._formula()
        return Rule(tuple(prems), concl)

    def _formula(self) -> Formula:
        ts = self.ts
        if ts.at("(") and ts.peek().text in self.preds:
            ts.next()
            pred = ts.next().text
            args = []
            while not ts.at(")"):
                ts.skip_newlines()
                if ts.at(")"):
                    break
                args.append(self._term())
            ts.expect(")")
            return Formula(pred, tuple(args))
        left = self._term()
        t = ts.tok
        if t.kind == "SYM" and t.text in self.preds:
            ts.next()
            mid = self._term()
            if t.text in MIXFIX:
                ts.expect(":")
                return Formula(t.text, (left, mid, self._term()))
            return Formula(t.text, (left, mid))
        raise ts.error("expected a predicate", self.preds)

    def _term(self) -> Term:
        ts = self.ts
        t = ts.tok
        if t.kind == "IDENT":
            ts.next()
            if t.text in self.ops:
                return Constructor(t.text, ())
            if t.text in self.preds:
                raise ParseError(ts.span(t), f"predicate {t.text!r} used as a term")
            if t.text in RESERVED_TERM_HEADS:
                raise ParseError(ts.span(t), f"{t.text!r} is reserved")
            return Var(mv(t.text))
        if t.text == "(" and t.kind == "PUNCT":
            ts.next()
            head = ts.tok
            if head.text == "bind":
                ts.next()
                x = self._metavar()
                body = self._term()
                ts.expect(")")
                return Binder(x, body)
            if head.text == "subst":
                ts.next()
                target = self._term()
                repl = self._term()
                x = self._metavar()
                ts.expect(")")
                return Subst(target, repl, x)
            if head.kind in ("IDENT", "SYM") and head.text in self.ops:
                ts.next()
                args = []
                while not ts.at(")"):
                    args.append(self._term())
                ts.next()
                return Constructor(head.text, tuple(args))
            raise ts.error("expected a declared operator, 'bind' or 'subst'", self.ops)
        raise ts.error("expected a term")

    def _metavar(self) -> MetaVar:
        t = self.ts.tok
        if t.kind != "IDENT" or t.text in self.ops:
            raise self.ts.error("expected a meta-variable")
        self.ts.next()
        return mv(t.text)


def parse_language(text: str, file: str = "<input>") -> LanguageDef:
    return _LangParser(text, file).parse()


def used_names(lang: LanguageDef) -> tuple[list[str], list[str]]:
    ops: dict[str, None] = {}
    preds: dict[str, None] = {}

    def term(t: Term) -> None:
        if isinstance(t, Constructor):
            ops[t.op] = None
            for a in t.args:
                term(a)
        elif isinstance(t, Binder):
            term(t.body)
        elif isinstance(t, Subst):
            term(t.target)
            term(t.replacement)

    def form(f: Formula) -> None:
        preds[f.pred] = None
        for a in f.args:
            term(a)

    for p in lang.grammar:
        for a in p.alternatives:
            term(a)
    for r in lang.rules:
        for f in r.premises:
            form(f)
        form(r.conclusion)
    return list(ops), list(preds)


def print_term(t: Term) -> str:
    if isinstance(t, Var):
        return str(t.var)
    if isinstance(t, Constructor):
        if not t.args and not is_symbolic(t.op):
            return t.op
        return "(" + " ".join([t.op, *map(print_term, t.args)]) + ")"
    if isinstance(t, Binder):
        return f"(bind {t.bound} {print_term(t.body)})"
    if isinstance(t, Subst):
        return f"(subst {print_term(t.target)} {print_term(t.replacement)} {t.var})"
    raise TypeError(type(t).__name__)


def print_formula(f: Formula) -> str:
    args = [print_term(a) for a in f.args]
    if f.pred in MIXFIX and len(args) == 3:
        return f"{args[0]} {f.pred} {args[1]} : {args[2]}"
    if is_symbolic(f.pred) and f.pred not in MIXFIX and len(args) == 2:
        return f"{args[0]} {f.pred} {args[1]}"
    return "(" + " ".join([f.pred, *args]) + ")"


def print_rule(r: Rule) -> str:
    lines = [print_formula(p) for p in r.premises]
    lines.append("---")
    lines.append(print_formula(r.conclusion))
    return "\n".join(lines)


def print_language(lang: LanguageDef) -> str:
    ops_used, preds_used = used_names(lang)
    ops = list(dict.fromkeys([*lang.ops, *ops_used]))
    preds = list(dict.fromkeys([*lang.preds, *preds_used]))
    blocks = []
    header = []
    if ops:
        header.append("ops: " + " ".join(ops))
    if preds:
        header.append("preds: " + " ".join(preds))
    if header:
        blocks.append("\n".join(header))
    if lang.grammar:
        blocks.append("\n".join(
            f"{p.category} {p.metavar} ::= " + " | ".join(print_term(a) for a in p.alternatives) + "."
            for p in lang.grammar))
    blocks.extend(print_rule(r) for r in lang.rules)
    return "\n\n".join(blocks) + "\n" if blocks else ""


# -- JSON --------------------------------------------------------------------

def _mv_json(x: MetaVar) -> dict:
    d = {"kind": "var", "base": x.base, "primes": x.primes}
    if x.fresh is not None:
        d["fresh"] = x.fresh
    return d


def term_json(t: Term) -> dict:
    if isinstance(t, Var):
        return _mv_json(t.var)
    if isinstance(t, Constructor):
        return {"kind": "op", "op": t.op, "args": [term_json(a) for a in t.args]}
    if isinstance(t, Binder):
        return {"kind": "bind", "var": _mv_json(t.bound), "body": term_json(t.body)}
    if isinstance(t, Subst):
        return {"kind": "subst", "target": term_json(t.target),
                "replacement": term_json(t.replacement), "var": _mv_json(t.var)}
    raise TypeError(type(t).__name__)


def formula_json(f: Formula) -> dict:
    return {"kind": "formula", "pred": f.pred, "args": [term_json(a) for a in f.args]}


def language_json(lang: LanguageDef) -> dict:
    return {
        "grammar": [
            {"category": p.category, "metavar": _mv_json(p.metavar),
             "alternatives": [term_json(a) for a in p.alternatives]}
            for p in lang.grammar],
        "rules": [
            {"kind": "rule", "premises": [formula_json(f) for f in r.premises],
             "conclusion": formula_json(r.conclusion)}
            for r in lang.rules],
    }


def export_json(lang: LanguageDef) -> str:
    return json.dumps(language_json(lang), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


# -- label-map files ---------------------------------------------------------

LabelMap = dict[str, tuple[str, ...]]


def parse_maps(text: str, file: str = "<maps>") -> dict[str, LabelMap]:
    """Parse ``name: key = label label ...`` lines into named label maps.

    Repeated names accumulate entries; a repeated key within one map is an
    error.
    """
    maps: dict[str, LabelMap] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = re.sub(r"(^|\s)#.*$", "", raw).strip()
        if not line:
            continue
        m = re.fullmatch(r"(\w+)\s*:\s*(\S+)\s*=\s*(.*)", line)
        if m is None:
            raise ParseError(SourceSpan(file, lineno, 1), "expected 'name: key = label ...'")
        name, key, labels = m.group(1), m.group(2), m.group(3).split()
        if not labels:
            raise ParseError(SourceSpan(file, lineno, 1), f"no labels for {key!r}")
        entry = maps.setdefault(name, {})
        if key in entry:
            raise ParseError(SourceSpan(file, lineno, 1), f"{key!r} listed twice in {name!r}")
        entry[key] = tuple(labels)
    return maps
