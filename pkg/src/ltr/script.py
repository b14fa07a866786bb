"""Concrete syntax of transformation scripts.

Precedence, loosest first::

    e1 ; e2                    sequence (right-assoc)
    e1 ;r e2                   rule composition (right-assoc)
    if/let/match/uniquefy, setRules e, Cat X ::= e, selector bodies
                               extend as far right as possible
    a <: b, a = b, G |- e : T  formula templates (any symbolic predicate)
    a @ b                      append (right-assoc)
    just e, head e, ...        prefix keywords
    e(k), e[p]: body, e(keep)[p]: body
                               postfix, no whitespace before ( or [
    atoms

``?T`` is a meta-variable literal. ``(h a b)`` is a template whose head is
resolved against the language: a predicate gives a formula, an operator a
term, a script variable a late-bound template. A single argument is the
whole argument list, two or more are collected into a list.
``(p1 @ p2 --- c)`` is a rule template.
"""
from __future__ import annotations

from typing import Iterable, Optional

from . import derived
from .exprs import (ERROR, GETRULES, NEWVAR, NIL, NOTHING, SKIP, And, Append, AddSyntax,
                    BindT, BoolExpr, CatNameRef, Concat, Cons, ConsStar, Eq, Error, Expr,
                    Fold, FormulaT, GetOpt, GetRules, Head, If, IsEmpty, IsIn, IsNothing,
                    IsVar, Just, MapGet, MapKeys, MapLit, MetaVarE, NewSyntax, NewVar, Nil,
                    Not, Nothing, OpNameLit, Or, PCons, PHeadVar, PNil, POp, PPred, PVar,
                    PWild, Pattern, PredNameLit, RuleSeq, RuleT, Select, Seq, SetRules, Skip,
                    StrLit, SubstT, Tail, TermT, Tick, Uniquefy, Var, VarApp, VarsOf, mklist, plist,
                    pattern_binders, MalformedPattern)
from .model import LanguageDef, mv
from .syntax import MIXFIX, ParseError, SourceSpan, Token, TokenStream, is_dashes, is_symbolic, tokenize
from .ttypes import PRIMS, ListT, MapT, MaybeT, TType

KEYWORDS = frozenset("""
skip nil cons head tail map mapKeys just nothing get getRules setRules keep uniquefy
fold newVar tick vars if then else in isEmpty isNothing and or not error let match
with concat isVar overlap opname predname bind subst
""".split())
SPECIAL = frozenset({"self", "premises", "conclusion"})

# symbols that never act as an infix predicate
RESERVED_SYMBOLS = frozenset({"=>", "::=", "==", "!=", ":", "|"})

# keywords that can start an expression
_EXPR_KEYWORDS = frozenset("""
skip nil cons head tail map mapKeys just nothing get getRules setRules uniquefy fold
newVar tick vars if error let match concat opname predname
""".split())

class Names:
    """Operator, predicate and category names the parser resolves against."""

    def __init__(self, ops: Iterable[str] = (), preds: Iterable[str] = (),
                 categories: Iterable[str] = ()):
        self.ops = frozenset(ops)
        self.preds = frozenset(preds)
        self.categories = frozenset(categories)

    @classmethod
    def of(cls, lang: Optional[LanguageDef], extra_preds: Iterable[str] = ()) -> "Names":
        if lang is None:
            return cls(preds=extra_preds)
        from .syntax import used_names
        ops, preds = used_names(lang)
        return cls([*lang.ops, *ops], [*lang.preds, *preds, *extra_preds], lang.categories)


def _unary(name: str):
    from . import exprs
    return {
        "just": exprs.Just, "head": exprs.Head, "tail": exprs.Tail, "get": exprs.GetOpt,
        "mapKeys": exprs.MapKeys, "vars": exprs.VarsOf, "concat": derived.expand_concat,
        "setRules": exprs.SetRules,
    }[name]


UNARY_KEYWORDS = frozenset({"just", "head", "tail", "get", "mapKeys", "vars", "concat"})


class ScriptParser:
    def __init__(self, text: str, names: Names, file: str = "<script>"):
        self.ts = TokenStream(tokenize(text, file), file)
        self.names = names

    # helpers ---------------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.ts.tok

    def _span(self, tok: Optional[Token] = None) -> SourceSpan:
        return self.ts.span(tok)

    def _kw(self, word: str) -> bool:
        return self.tok.kind == "IDENT" and self.tok.text == word

    def _glued(self, text: str) -> bool:
        """Next token is ``text`` with no whitespace before it."""
        t = self.tok
        return t.kind == "PUNCT" and t.text == text and not t.space_before

    def _ident(self, what: str = "an identifier") -> Token:
        t = self.tok
        if t.kind != "IDENT" or t.text in KEYWORDS:
            raise self.ts.error(f"expected {what}")
        return self.ts.next()

    def _infix_pred(self) -> Optional[str]:
        t = self.tok
        if t.kind == "SYM" and t.text not in RESERVED_SYMBOLS and not is_dashes(t):
            return t.text
        return None

    def _starts_expr(self, t: Token) -> bool:
        if t.kind in ("META", "STRING"):
            return True
        if t.kind == "PUNCT":
            return t.text in ("(", "[")
        if t.kind == "IDENT":
            return t.text not in KEYWORDS or t.text in _EXPR_KEYWORDS
        return False

    # entry -----------------------------------------------------------------

    def parse(self) -> Expr:
        if self.tok.kind == "EOF":
            raise self.ts.error("empty script")
        e = self.seq()
        if self.tok.kind != "EOF":
            raise self.ts.error("unexpected token")
        return e

    def seq(self) -> Expr:
        start = self.tok
        e = self.rseq()
        if self.ts.at(";") and self.tok.kind == "PUNCT":
            self.ts.next()
            return Seq(e, self.seq(), span=self._span(start))
        return e

    def rseq(self) -> Expr:
        start = self.tok
        e = self.stmt()
        if self.tok.kind == "RSEQ":
            self.ts.next()
            return RuleSeq(e, self.rseq(), span=self._span(start))
        return e

    def stmt(self) -> Expr:
        t = self.tok
        sp = self._span(t)
        ts = self.ts
        if t.kind == "IDENT":
            w = t.text
            if w == "if":
                ts.next()
                c = self.bool_expr()
                ts.expect("then")
                a = self.rseq()
                ts.expect("else")
                return If(c, a, self.rseq(), span=sp)
            if w == "let":
                ts.next()
                x = self._ident("a variable name").text
                ts.expect("=")
                e1 = self.rseq()
                ts.expect("in")
                return derived.expand_let(x, e1, self.rseq(), span=sp)
            if w == "match":
                ts.next()
                e1 = self.rseq()
                ts.expect("with")
                p = self.pattern()
                ts.expect("=>")
                return derived.expand_match(e1, p, self.rseq(), span=sp)
            if w == "uniquefy":
                return self._uniquefy()
            if w == "setRules" and not self._glued_call():
                ts.next()
                return SetRules(self.stmt(), span=sp)
            if (w not in KEYWORDS and ts.peek().kind in ("IDENT", "META")
                    and ts.peek(2).text == "::="):
                return self._grammar_instr()
        return self.formula()

    def _glued_call(self) -> bool:
        nxt = self.ts.peek()
        return nxt.kind == "PUNCT" and nxt.text == "(" and not nxt.space_before

    def _uniquefy(self) -> Expr:
        ts = self.ts
        sp = self._span()
        ts.next()
        ts.expect("(")
        lf = self.seq()
        ts.expect(",")
        m = self.seq()
        ts.expect(",")
        if self.tok.kind != "STRING":
            raise ts.error("expected a label string")
        label = _string(ts.next())
        ts.expect(")")
        ts.expect("=>")
        ts.expect("(")
        x = self._ident("a variable name").text
        ts.expect(",")
        y = self._ident("a variable name").text
        ts.expect(")")
        ts.expect(":")
        return Uniquefy(lf, m, label, x, y, self.rseq(), span=sp)

    def _grammar_instr(self) -> Expr:
        ts = self.ts
        sp = self._span()
        cat = ts.next().text
        xt = ts.next()
        x = mv(xt.text[1:] if xt.kind == "META" else xt.text)
        ts.next()  # ::=
        if self.tok.kind == "ELLIPSIS":
            ts.next()
            return AddSyntax(cat, x, self.stmt(), span=sp)
        return NewSyntax(cat, x, self.stmt(), span=sp)

    def formula(self) -> Expr:
        start = self.tok
        left = self.app()
        pred = self._infix_pred()
        if pred is None:
            return left
        self.ts.next()
        mid = self.app()
        if pred in MIXFIX:
            self.ts.expect(":")
            right = self.app()
            return FormulaT(pred, mklist([left, mid, right]), span=self._span(start))
        return FormulaT(pred, mklist([left, mid]), span=self._span(start))

    def app(self) -> Expr:
        start = self.tok
        e = self.unary()
        if self.tok.kind == "PUNCT" and self.tok.text == "@":
            self.ts.next()
            return Append(e, self.app(), span=self._span(start))
        return e

    def unary(self) -> Expr:
        t = self.tok
        sp = self._span(t)
        if t.kind == "IDENT" and not self._glued_call():
            if t.text in UNARY_KEYWORDS:
                self.ts.next()
                return _unary(t.text)(self.unary(), span=sp)
            if t.text == "fold":
                self.ts.next()
                pred = self.ts.next()
                if pred.kind not in ("IDENT", "SYM"):
                    raise ParseError(self._span(pred), "expected a predicate name after fold")
                return Fold(pred.text, self.unary(), span=sp)
        return self.postfix()

    def postfix(self) -> Expr:
        e = self.atom()
        ts = self.ts
        while True:
            sp = self._span()
            if self._glued("("):
                if ts.peek().text == "keep" and ts.peek(2).text == ")":
                    ts.next(); ts.next(); ts.next()
                    if not self._glued("["):
                        raise ts.error("expected '[' after (keep)")
                    e = self._selector(e, keep=True)
                    continue
                ts.next()
                k = self.seq()
                ts.expect(")")
                e = MapGet(e, k, span=sp)
            elif self._glued("["):
                e = self._selector(e, keep=False)
            else:
                return e

    def _selector(self, lst: Expr, keep: bool) -> Expr:
        ts = self.ts
        sp = self._span()
        ts.expect("[")
        p = self.pattern()
        ts.expect("]")
        ts.expect(":")
        body = self.rseq()
        return Select(lst, p, body, keep, span=sp)

    def _call_args(self, n: int) -> list[Expr]:
        self.ts.expect("(")
        args = [self.seq()]
        for _ in range(n - 1):
            self.ts.expect(",")
            args.append(self.seq())
        self.ts.expect(")")
        return args

    def atom(self) -> Expr:
        ts = self.ts
        t = self.tok
        sp = self._span(t)
        if t.kind == "META":
            ts.next()
            return MetaVarE(mv(t.text[1:]), span=sp)
        if t.kind == "STRING":
            ts.next()
            return StrLit(_string(t), span=sp)
        if t.kind == "PUNCT" and t.text == "[":
            ts.next()
            items = []
            if not ts.at("]"):
                items.append(self.seq())
                while ts.at(","):
                    ts.next()
                    items.append(self.seq())
            ts.expect("]")
            return _with_span(mklist(items), sp)
        if t.kind == "PUNCT" and t.text == "(":
            return self._paren()
        if t.kind != "IDENT":
            raise ts.error("expected an expression")
        w = t.text
        if w in KEYWORDS:
            return self._keyword_atom(w, sp)
        ts.next()
        if w in SPECIAL:
            return Var(w, span=sp)
        if w in self.names.categories:
            return CatNameRef(w, span=sp)
        if w in self.names.ops:
            return TermT(w, NIL, span=sp)
        if w in self.names.preds:
            return PredNameLit(w, span=sp)
        return Var(w, span=sp)

    def _keyword_atom(self, w: str, sp: SourceSpan) -> Expr:
        ts = self.ts
        simple = {"nil": NIL, "skip": SKIP, "error": ERROR, "nothing": NOTHING,
                  "newVar": NEWVAR, "getRules": GETRULES}
        if w in simple:
            ts.next()
            return _with_span(simple[w], sp)
        if w in ("if", "let", "match", "uniquefy") or (w == "setRules" and not self._glued_call()):
            return self.stmt()
        if w in UNARY_KEYWORDS or w == "setRules":
            if not self._glued_call():
                raise ts.error(f"'{w}' needs an argument")
            ts.next()
            (a,) = self._call_args(1)
            return _unary(w)(a, span=sp)
        if w == "cons":
            ts.next()
            star = self.tok.kind == "SYM" and self.tok.text == "*" and not self.tok.space_before
            if star:
                ts.next()
            a, b = self._call_args(2)
            return ConsStar(a, b, span=sp) if star else Cons(a, b, span=sp)
        if w == "map":
            ts.next()
            a, b = self._call_args(2)
            return MapLit(a, b, span=sp)
        if w == "tick":
            ts.next()
            a, b = self._call_args(2)
            return Tick(a, b, span=sp)
        if w == "fold":
            ts.next()
            ts.expect("(")
            pred = ts.next()
            ts.expect(",")
            e = self.seq()
            ts.expect(")")
            return Fold(pred.text, e, span=sp)
        if w in ("opname", "predname"):
            ts.next()
            ts.expect("(")
            name = ts.next()
            if name.kind not in ("IDENT", "SYM"):
                raise ParseError(self._span(name), "expected a name")
            ts.expect(")")
            return (OpNameLit if w == "opname" else PredNameLit)(name.text, span=sp)
        raise ts.error(f"unexpected keyword '{w}'")

    def _paren(self) -> Expr:
        ts = self.ts
        open_tok = ts.next()
        sp = self._span(open_tok)
        h = self.tok
        nxt = ts.peek()
        if h.kind in ("IDENT", "SYM") and h.text not in KEYWORDS - {"bind", "subst"}:
            if h.text == "bind" and nxt.kind == "META":
                ts.next()
                x = mv(ts.next().text[1:])
                body = self.seq()
                ts.expect(")")
                return BindT(x, body, span=sp)
            if h.text == "subst":
                ts.next()
                target = self.unary()
                repl = self.unary()
                x = ts.next()
                if x.kind != "META":
                    raise ParseError(self._span(x), "expected a meta-variable literal")
                ts.expect(")")
                return SubstT(target, repl, mv(x.text[1:]), span=sp)
            is_template = (h.kind == "SYM" and not is_dashes(h)) or (
                self._starts_expr(nxt) and nxt.space_before and h.text not in SPECIAL)
            if h.kind == "SYM" and (h.text in RESERVED_SYMBOLS or is_dashes(h)):
                is_template = False
            if is_template and nxt.kind == "PUNCT" and nxt.text == ")":
                is_template = h.kind == "SYM" or h.text in self.names.ops
            if is_template:
                return self._template(sp)
        if is_dashes(self.tok):
            ts.next()
            concl = self.seq()
            ts.expect(")")
            return RuleT(NIL, concl, span=sp)
        e = self.seq()
        if is_dashes(self.tok):
            ts.next()
            concl = self.seq()
            ts.expect(")")
            return RuleT(e, concl, span=sp)
        ts.expect(")")
        return e

    def _template(self, sp: SourceSpan) -> Expr:
        ts = self.ts
        head = ts.next().text
        args = []
        while not ts.at(")"):
            args.append(self.unary())
        ts.next()
        arg = args[0] if len(args) == 1 else mklist(args)
        if head in self.names.preds or (is_symbolic(head) and head not in self.names.ops):
            return FormulaT(head, arg, span=sp)
        if head in self.names.ops:
            return TermT(head, arg, span=sp)
        return VarApp(head, arg, span=sp)

    # booleans --------------------------------------------------------------

    def bool_expr(self) -> BoolExpr:
        sp = self._span()
        left = self.bool_and()
        if self._kw("or"):
            self.ts.next()
            return Or(left, self.bool_expr(), span=sp)
        return left

    def bool_and(self) -> BoolExpr:
        sp = self._span()
        left = self.bool_not()
        if self._kw("and"):
            self.ts.next()
            return And(left, self.bool_and(), span=sp)
        return left

    def bool_not(self) -> BoolExpr:
        sp = self._span()
        if self._kw("not"):
            self.ts.next()
            return Not(self.bool_not(), span=sp)
        return self.bool_atom()

    def bool_atom(self) -> BoolExpr:
        ts = self.ts
        t = self.tok
        sp = self._span(t)
        if t.kind == "IDENT" and t.text in ("isEmpty", "isNothing", "isVar"):
            ts.next()
            if self.tok.kind == "PUNCT" and self.tok.text == "(" and not self.tok.space_before:
                (a,) = self._call_args(1)
            else:
                a = self.unary()
            return {"isEmpty": IsEmpty, "isNothing": IsNothing,
                    "isVar": derived.expand_is_var}[t.text](a, span=sp)
        if t.kind == "IDENT" and t.text == "overlap":
            ts.next()
            a, b = self._call_args(2)
            return derived.expand_overlap(a, b, span=sp)
        if t.kind == "PUNCT" and t.text == "(":
            # a parenthesised guard, or an expression operand of == / in
            save = ts.i
            try:
                ts.next()
                b = self.bool_expr()
                ts.expect(")")
                if not (self._kw("in") or ts.at("==") or ts.at("!=")):
                    return b
            except ParseError:
                pass
            ts.i = save
        left = self.app()
        if self._kw("in"):
            ts.next()
            return IsIn(left, self.app(), span=sp)
        if ts.at("=="):
            ts.next()
            return Eq(left, self.app(), span=sp)
        if ts.at("!="):
            ts.next()
            return Not(Eq(left, self.app()), span=sp)
        raise ts.error("expected a boolean guard", ["==", "in", "isEmpty", "isNothing"])

    # patterns --------------------------------------------------------------

    def pattern(self) -> Pattern:
        left = self.pattern_atom()
        pred = self._infix_pred()
        if pred is None:
            return left
        self.ts.next()
        mid = self.pattern_atom()
        if pred in MIXFIX:
            self.ts.expect(":")
            return PPred(pred, plist([left, mid, self.pattern_atom()]))
        return PPred(pred, plist([left, mid]))

    def pattern_atom(self) -> Pattern:
        ts = self.ts
        t = self.tok
        if t.kind == "IDENT":
            if t.text == "_":
                ts.next()
                return PWild()
            if t.text == "nil":
                ts.next()
                return PNil()
            if t.text == "cons":
                ts.next()
                ts.expect("(")
                h = self.pattern()
                ts.expect(",")
                tl = self.pattern()
                ts.expect(")")
                return PCons(h, tl)
            if t.text in KEYWORDS or t.text in SPECIAL:
                raise ts.error("expected a pattern")
            ts.next()
            if t.text in self.names.ops:
                return POp(t.text, PNil())
            ann = None
            if self._glued_colon():
                ts.next()
                ann = self.type_expr()
            return PVar(t.text, ann)
        if t.kind == "PUNCT" and t.text == "[":
            ts.next()
            items = []
            tail: Pattern = PNil()
            if not ts.at("]"):
                items.append(self.pattern())
                while ts.at(","):
                    ts.next()
                    items.append(self.pattern())
            ts.expect("]")
            return plist(items) if isinstance(tail, PNil) else tail
        if t.kind == "PUNCT" and t.text == "(":
            ts.next()
            h = self.tok
            nxt = ts.peek()
            head_form = (h.kind == "SYM" and h.text not in RESERVED_SYMBOLS and not is_dashes(h)) or (
                h.kind == "IDENT" and h.text not in KEYWORDS and h.text not in SPECIAL
                and nxt.space_before and self._starts_pattern(nxt))
            if h.kind == "IDENT" and h.text in self.names.ops and nxt.text == ")":
                head_form = True
            if head_form:
                ts.next()
                subs = []
                while not ts.at(")"):
                    subs.append(self.pattern())
                ts.next()
                sub = PNil() if not subs else subs[0] if len(subs) == 1 else plist(subs)
                name = h.text
                if name in self.names.preds or (h.kind == "SYM" and name not in self.names.ops):
                    return PPred(name, sub)
                if name in self.names.ops:
                    return POp(name, sub)
                return PHeadVar(name, sub)
            p = self.pattern()
            ts.expect(")")
            return p
        raise ts.error("expected a pattern")

    def _glued_colon(self) -> bool:
        t = self.tok
        return t.kind == "SYM" and t.text == ":" and not t.space_before

    def _starts_pattern(self, t: Token) -> bool:
        if t.kind == "PUNCT":
            return t.text in ("(", "[")
        return t.kind == "IDENT" and (t.text not in KEYWORDS or t.text in ("nil", "cons"))

    def type_expr(self) -> TType:
        ts = self.ts
        t = ts.next()
        if t.kind == "PUNCT" and t.text == "(":
            ty = self.type_expr()
            ts.expect(")")
            return ty
        if t.text in PRIMS:
            return PRIMS[t.text]
        if t.text == "List":
            return ListT(self.type_expr())
        if t.text == "Maybe":
            return MaybeT(self.type_expr())
        if t.text == "Map":
            return MapT(self.type_expr(), self.type_expr())
        raise ParseError(self._span(t), f"unknown type {t.text!r}")


def _string(t: Token) -> str:
    import json
    return json.loads(t.text)


def _with_span(e: Expr, sp: SourceSpan) -> Expr:
    from dataclasses import replace
    return replace(e, span=sp)


def parse_script(text: str, lang: Optional[LanguageDef] = None, file: str = "<script>",
                 names: Optional[Names] = None) -> Expr:
    """Parse a script, resolving template heads against ``lang``'s names."""
    p = ScriptParser(text, names or Names.of(lang), file)
    try:
        e = p.parse()
        _check_patterns(e)
    except MalformedPattern as exc:
        raise ParseError(SourceSpan(file, 1, 1), str(exc)) from None
    except RecursionError:
        raise ParseError(p._span(), "script nested too deeply") from None
    return e


def _check_patterns(e) -> None:
    if isinstance(e, Select):
        pattern_binders(e.pattern)
    for _, child in e.children():
        if isinstance(child, Expr) or isinstance(child, BoolExpr):
            _check_patterns(child)


# -- printing ----------------------------------------------------------------

def print_expr(e) -> str:
    """Concrete syntax for ``e``; parses back to an equal expression given
    the same names (derived forms print in expanded form)."""
    return _pe(e)


def _atomic(e) -> bool:
    return isinstance(e, (Var, MetaVarE, StrLit, CatNameRef, Nil, Skip, Error, Nothing, NewVar,
                          GetRules, TermT, FormulaT, VarApp, RuleT, BindT, SubstT, MapGet,
                          MapLit, Tick, Cons, ConsStar, OpNameLit, PredNameLit)) or (
        isinstance(e, Cons))


def _pa(e) -> str:
    s = _pe(e)
    return s if _atomic(e) else f"({s})"


def _items(e) -> Optional[list]:
    out = []
    while isinstance(e, Cons):
        out.append(e.head)
        e = e.tail
    return out if isinstance(e, Nil) else None


def _args(e) -> str:
    items = _items(e)
    if items is not None and len(items) != 1:
        return " ".join(_pa(i) for i in items) if len(items) >= 2 else "[]"
    if items is not None:
        return "[" + _pe(items[0]) + "]"
    return _pa(e)


def _pe(e) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, MetaVarE):
        return "?" + str(e.var)
    if isinstance(e, StrLit):
        import json
        return json.dumps(e.value, ensure_ascii=False)
    if isinstance(e, OpNameLit):
        return f"opname({e.name})"
    if isinstance(e, PredNameLit):
        return f"predname({e.name})"
    if isinstance(e, CatNameRef):
        return e.name
    if isinstance(e, Skip):
        return "skip"
    if isinstance(e, Error):
        return "error"
    if isinstance(e, NewVar):
        return "newVar"
    if isinstance(e, GetRules):
        return "getRules"
    if isinstance(e, Nil):
        return "nil"
    if isinstance(e, Nothing):
        return "nothing"
    if isinstance(e, TermT):
        if isinstance(e.args, Nil) and not is_symbolic(e.op):
            return e.op
        return f"({e.op} {_args(e.args)})"
    if isinstance(e, FormulaT):
        return f"({e.pred} {_args(e.args)})"
    if isinstance(e, VarApp):
        return f"({e.head} {_args(e.args)})"
    if isinstance(e, BindT):
        return f"(bind ?{e.var} {_pe(e.body)})"
    if isinstance(e, SubstT):
        return f"(subst {_pa(e.target)} {_pa(e.replacement)} ?{e.var})"
    if isinstance(e, RuleT):
        return f"({_pe(e.premises)} --- {_pe(e.conclusion)})"
    if isinstance(e, Cons):
        items = _items(e)
        if items is not None:
            return "[" + ", ".join(_pe(i) for i in items) + "]"
        return f"cons({_pe(e.head)}, {_pe(e.tail)})"
    if isinstance(e, ConsStar):
        return f"cons*({_pe(e.opt)}, {_pe(e.rest)})"
    if isinstance(e, Head):
        return f"head({_pe(e.e)})"
    if isinstance(e, Tail):
        return f"tail({_pe(e.e)})"
    if isinstance(e, Append):
        return f"{_pa(e.left)} @ {_pe(e.right) if isinstance(e.right, Append) else _pa(e.right)}"
    if isinstance(e, Concat):
        return f"concat({_pe(e.e)})"
    if isinstance(e, MapLit):
        return f"map({_pe(e.keys)}, {_pe(e.values)})"
    if isinstance(e, MapGet):
        return f"{_pa(e.map)}({_pe(e.key)})"
    if isinstance(e, MapKeys):
        return f"mapKeys({_pe(e.e)})"
    if isinstance(e, Just):
        return f"just({_pe(e.e)})"
    if isinstance(e, GetOpt):
        return f"get({_pe(e.e)})"
    if isinstance(e, NewSyntax):
        return f"{e.category} ?{e.metavar} ::= {_pe(e.e)}"
    if isinstance(e, AddSyntax):
        return f"{e.category} ?{e.metavar} ::= ... {_pe(e.e)}"
    if isinstance(e, SetRules):
        return f"setRules({_pe(e.e)})"
    if isinstance(e, Select):
        keep = "(keep)" if e.keep else ""
        return f"{_pa(e.lst)}{keep}[{print_pattern(e.pattern)}]: {_pe(e.body)}"
    if isinstance(e, Uniquefy):
        import json
        return (f"uniquefy({_pe(e.lf)}, {_pe(e.m)}, {json.dumps(e.label)}) => "
                f"({e.xbind}, {e.ybind}): {_pe(e.body)}")
    if isinstance(e, If):
        return f"if {_pb(e.cond)} then {_pe(e.then)} else {_pe(e.else_)}"
    if isinstance(e, Seq):
        return f"{_pa(e.first)}; {_pe(e.second)}"
    if isinstance(e, RuleSeq):
        return f"{_pa(e.first)} ;r {_pe(e.second) if isinstance(e.second, RuleSeq) else _pa(e.second)}"
    if isinstance(e, Tick):
        return f"tick({_pe(e.e)}, {_pe(e.ref)})"
    if isinstance(e, Fold):
        return f"fold({e.pred}, {_pe(e.e)})"
    if isinstance(e, VarsOf):
        return f"vars({_pe(e.e)})"
    if isinstance(e, BoolExpr):
        return _pb(e)
    raise TypeError(f"cannot print {type(e).__name__}")


def _pb(b) -> str:
    if isinstance(b, Eq):
        return f"{_pa(b.left)} == {_pa(b.right)}"
    if isinstance(b, IsIn):
        return f"{_pa(b.elem)} in {_pa(b.lst)}"
    if isinstance(b, IsEmpty):
        return f"isEmpty({_pe(b.e)})"
    if isinstance(b, IsNothing):
        return f"isNothing({_pe(b.e)})"
    if isinstance(b, IsVar):
        return f"isVar({_pe(b.e)})"
    if isinstance(b, And):
        return f"({_pb(b.left)}) and ({_pb(b.right)})"
    if isinstance(b, Or):
        return f"({_pb(b.left)}) or ({_pb(b.right)})"
    if isinstance(b, Not):
        return f"not({_pb(b.b)})"
    raise TypeError(f"cannot print {type(b).__name__}")


def print_pattern(p: Pattern) -> str:
    if isinstance(p, PVar):
        return p.name if p.annotation is None else f"{p.name}:({p.annotation})"
    if isinstance(p, PWild):
        return "_"
    if isinstance(p, PNil):
        return "nil"
    if isinstance(p, (PPred, POp, PHeadVar)):
        name = p.pred if isinstance(p, PPred) else p.op if isinstance(p, POp) else p.name
        if isinstance(p, POp) and isinstance(p.sub, PNil) and not is_symbolic(name):
            return name
        items = _pitems(p.sub)
        if items is not None and len(items) >= 2:
            return f"({name} " + " ".join(_ppa(i) for i in items) + ")"
        if items is not None and len(items) == 1:
            return f"({name} [{print_pattern(items[0])}])"
        return f"({name} {_ppa(p.sub)})"
    if isinstance(p, PCons):
        items = _pitems(p)
        if items is not None:
            return "[" + ", ".join(print_pattern(i) for i in items) + "]"
        return f"cons({print_pattern(p.head)}, {print_pattern(p.tail)})"
    raise TypeError(type(p).__name__)


def _ppa(p: Pattern) -> str:
    s = print_pattern(p)
    return s


def _pitems(p: Pattern) -> Optional[list]:
    out = []
    while isinstance(p, PCons):
        out.append(p.head)
        p = p.tail
    return out if isinstance(p, PNil) else None
