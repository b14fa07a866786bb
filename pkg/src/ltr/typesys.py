"""Static typing of transformation scripts.

``elaborate`` both checks a script and returns a copy in which every
selector knows whether it ranges over rules; that decides whether its body
rebinds ``premises`` and ``conclusion``.

Empty lists, ``nothing``, ``error`` and friends get the wildcard type
``?``, which is compatible with anything and is refined by context.
"""
from __future__ import annotations

from dataclasses import replace
from typing import Callable, Mapping, Optional

from .exprs import (And, Eq, Expr, IsEmpty, IsIn, IsNothing, IsVar, Not, Or, PCons, PHeadVar, PNil,
                    POp, PPred, PVar, PWild, Pattern, MalformedPattern)
from .model import LanguageDef, vars_of
from .ttypes import (ANY, BOOL, FORMULA, LANGUAGE, OPNAME, PREDNAME, RULE, STRING, TERM, AnyT,
                     ListT, MapT, MaybeT, TType, type_equal)

TypeEnv = Mapping[str, TType]

RULE_ENV = {"self": RULE, "premises": ListT(FORMULA), "conclusion": FORMULA}


class TransformTypeError(Exception):
    def __init__(self, expr, message: str, expected: Optional[TType] = None,
                 found: Optional[TType] = None):
        self.expr = expr
        self.expected = expected
        self.found = found
        self.message = message
        self.span = getattr(expr, "span", None)
        super().__init__(self.render())

    def render(self) -> str:
        from .script import print_expr, print_pattern
        where = str(self.span) if self.span is not None else "<script>"
        try:
            shown = print_pattern(self.expr) if isinstance(self.expr, Pattern) else print_expr(self.expr)
        except TypeError:
            shown = type(self.expr).__name__
        if len(shown) > 120:
            shown = shown[:117] + "..."
        if self.expected is not None and self.found is not None:
            return f"{where}: expected {self.expected}, found {self.found} in {shown}"
        return f"{where}: {self.message} in {shown}"


def unify(a: TType, b: TType) -> Optional[TType]:
    """Most specific type compatible with both, treating ``?`` as a hole."""
    if isinstance(a, AnyT):
        return b
    if isinstance(b, AnyT):
        return a
    if isinstance(a, ListT) and isinstance(b, ListT):
        e = unify(a.elem, b.elem)
        return None if e is None else ListT(e)
    if isinstance(a, MaybeT) and isinstance(b, MaybeT):
        e = unify(a.elem, b.elem)
        return None if e is None else MaybeT(e)
    if isinstance(a, MapT) and isinstance(b, MapT):
        k, v = unify(a.key, b.key), unify(a.value, b.value)
        return None if k is None or v is None else MapT(k, v)
    return a if type_equal(a, b) else None


class _Checker:
    def __init__(self, categories: Optional[set] = None):
        self.categories = categories

    # helpers ---------------------------------------------------------------

    def expect(self, env, e, want: TType):
        t, e2 = self.check(env, e)
        u = unify(t, want)
        if u is None:
            raise TransformTypeError(e, "type mismatch", want, t)
        return u, e2

    def expect_list(self, env, e) -> tuple[TType, Expr]:
        t, e2 = self.check(env, e)
        if isinstance(t, AnyT):
            return ANY, e2
        if not isinstance(t, ListT):
            raise TransformTypeError(e, "expected a list", ListT(ANY), t)
        return t.elem, e2

    def one_of(self, env, e, options: tuple[TType, ...]):
        t, e2 = self.check(env, e)
        if isinstance(t, AnyT):
            return ANY, e2
        for o in options:
            if unify(t, o) is not None:
                return unify(t, o), e2
        raise TransformTypeError(e, "type mismatch", options[0], t)

    # expressions -----------------------------------------------------------

    def check(self, env, e) -> tuple[TType, Expr]:
        meth = getattr(self, "t_" + type(e).__name__, None)
        if meth is None:
            raise TransformTypeError(e, f"no typing rule for {type(e).__name__}")
        try:
            return meth(env, e)
        except TransformTypeError as exc:
            # report the nearest enclosing source location
            if exc.span is None and getattr(e, "span", None) is not None:
                exc.span = e.span
                exc.args = (exc.render(),)
            raise

    def t_Var(self, env, e):
        if e.name not in env:
            raise TransformTypeError(e, f"unbound variable {e.name!r}")
        return env[e.name], e

    def t_MetaVarE(self, env, e):
        return TERM, e

    def t_StrLit(self, env, e):
        return STRING, e

    def t_OpNameLit(self, env, e):
        return OPNAME, e

    def t_PredNameLit(self, env, e):
        return PREDNAME, e

    def t_CatNameRef(self, env, e):
        if self.categories is not None and e.name not in self.categories:
            raise TransformTypeError(e, f"unknown category {e.name!r}")
        return ListT(TERM), e

    def t_Skip(self, env, e):
        return LANGUAGE, e

    def t_Error(self, env, e):
        return ANY, e

    def t_NewVar(self, env, e):
        return TERM, e

    def t_GetRules(self, env, e):
        return ListT(RULE), e

    def _term_args(self, env, args):
        return self.expect(env, args, ListT(TERM))[1]

    def t_TermT(self, env, e):
        return TERM, replace(e, args=self._term_args(env, e.args))

    def t_FormulaT(self, env, e):
        return FORMULA, replace(e, args=self._term_args(env, e.args))

    def t_VarApp(self, env, e):
        h = env.get(e.head)
        if h is None:
            raise TransformTypeError(e, f"unbound template head {e.head!r}")
        args = self._term_args(env, e.args)
        if h == OPNAME:
            return TERM, replace(e, args=args)
        if h == PREDNAME:
            return FORMULA, replace(e, args=args)
        raise TransformTypeError(e, "template head must name an operator or predicate", OPNAME, h)

    def t_BindT(self, env, e):
        return TERM, replace(e, body=self.expect(env, e.body, TERM)[1])

    def t_SubstT(self, env, e):
        return TERM, replace(e, target=self.expect(env, e.target, TERM)[1],
                             replacement=self.expect(env, e.replacement, TERM)[1])

    def t_RuleT(self, env, e):
        c = self.expect(env, e.conclusion, FORMULA)[1]
        p = self.expect(env, e.premises, ListT(FORMULA))[1]
        return RULE, replace(e, premises=p, conclusion=c)

    def t_Nil(self, env, e):
        return ListT(ANY), e

    def t_Cons(self, env, e):
        th, h = self.check(env, e.head)
        tt, t = self.expect(env, e.tail, ListT(th))
        return tt, replace(e, head=h, tail=t)

    def t_Head(self, env, e):
        el, x = self.expect_list(env, e.e)
        return el, replace(e, e=x)

    def t_Tail(self, env, e):
        el, x = self.expect_list(env, e.e)
        return ListT(el), replace(e, e=x)

    def t_Append(self, env, e):
        tl, l = self.expect(env, e.left, ListT(ANY))
        tr, r = self.expect(env, e.right, tl)
        return tr, replace(e, left=l, right=r)

    def t_Concat(self, env, e):
        t, x = self.expect(env, e.e, ListT(ListT(ANY)))
        return t.elem if isinstance(t, ListT) else ListT(ANY), replace(e, e=x)

    def t_MapLit(self, env, e):
        k, ks = self.expect_list(env, e.keys)
        v, vs = self.expect_list(env, e.values)
        return MapT(k, v), replace(e, keys=ks, values=vs)

    def _map(self, env, e):
        t, x = self.expect(env, e, MapT(ANY, ANY))
        if isinstance(t, AnyT):
            t = MapT(ANY, ANY)
        return t, x

    def t_MapGet(self, env, e):
        t, m = self._map(env, e.map)
        _, k = self.expect(env, e.key, t.key)
        return t.value, replace(e, map=m, key=k)

    def t_MapKeys(self, env, e):
        t, m = self._map(env, e.e)
        return ListT(t.key), replace(e, e=m)

    def t_Just(self, env, e):
        t, x = self.check(env, e.e)
        return MaybeT(t), replace(e, e=x)

    def t_Nothing(self, env, e):
        return MaybeT(ANY), e

    def t_GetOpt(self, env, e):
        t, x = self.expect(env, e.e, MaybeT(ANY))
        return t.elem if isinstance(t, MaybeT) else ANY, replace(e, e=x)

    def t_ConsStar(self, env, e):
        to, o = self.expect(env, e.opt, MaybeT(ANY))
        el = to.elem if isinstance(to, MaybeT) else ANY
        tr, r = self.expect(env, e.rest, ListT(el))
        return tr, replace(e, opt=o, rest=r)

    def t_NewSyntax(self, env, e):
        return LANGUAGE, replace(e, e=self.expect(env, e.e, ListT(TERM))[1])

    t_AddSyntax = t_NewSyntax

    def t_SetRules(self, env, e):
        return LANGUAGE, replace(e, e=self.expect(env, e.e, ListT(RULE))[1])

    def t_Select(self, env, e):
        el, lst = self.expect_list(env, e.lst)
        binds = self.pattern(env, e.pattern, el)
        inner = dict(env)
        if el == RULE:
            inner.update(RULE_ENV)
        elif isinstance(el, AnyT):
            # the list can only be nil or error, so the body never runs;
            # shield all three names since the element kind is unknown
            inner.update({k: ANY for k in RULE_ENV})
        else:
            inner["self"] = el
        inner.update(binds)
        tb, body = self.check(inner, e.body)
        tb = unify(tb, MaybeT(ANY))
        if tb is None:
            raise TransformTypeError(e.body, "selector body must be optional", MaybeT(ANY),
                                     self.check(inner, e.body)[0])
        out = tb.elem if isinstance(tb, MaybeT) else ANY
        if e.keep:
            u = unify(out, el)
            if u is None:
                raise TransformTypeError(e.body, "keep-selector body must preserve the element type",
                                         MaybeT(el), tb)
            out = u
        return ListT(out), replace(e, lst=lst, body=body, rule_elems=None if isinstance(el, AnyT) else el == RULE)

    def t_Uniquefy(self, env, e):
        _, lf = self.expect(env, e.lf, ListT(FORMULA))
        tm, m = self._map(env, e.m)
        if unify(tm.key, OPNAME) is None and unify(tm.key, PREDNAME) is None:
            raise TransformTypeError(e.m, "label map keys must be operator or predicate names",
                                     MapT(PREDNAME, ListT(STRING)), tm)
        if unify(tm.value, ListT(STRING)) is None:
            raise TransformTypeError(e.m, "label map values must be string lists",
                                     MapT(tm.key, ListT(STRING)), tm)
        inner = dict(env)
        inner[e.xbind] = ListT(FORMULA)
        inner[e.ybind] = MapT(TERM, ListT(TERM))
        tb, body = self.check(inner, e.body)
        return tb, replace(e, lf=lf, m=m, body=body)

    def t_If(self, env, e):
        c = self.boolean(env, e.cond)
        ta, a = self.check(env, e.then)
        tb, b = self.expect(env, e.else_, ta)
        return tb, replace(e, cond=c, then=a, else_=b)

    def t_Seq(self, env, e):
        _, a = self.expect(env, e.first, LANGUAGE)
        tb, b = self.check(env, e.second)
        return tb, replace(e, first=a, second=b)

    def t_RuleSeq(self, env, e):
        _, a = self.expect(env, e.first, RULE)
        inner = dict(env)
        inner.update(RULE_ENV)
        _, b = self.expect(inner, e.second, RULE)
        return RULE, replace(e, first=a, second=b)

    def t_Tick(self, env, e):
        t, a = self.one_of(env, e.e, (TERM, ListT(TERM)))
        _, r = self.expect(env, e.ref, ListT(TERM))
        return t, replace(e, e=a, ref=r)

    def t_Fold(self, env, e):
        return ListT(FORMULA), replace(e, e=self.expect(env, e.e, ListT(TERM))[1])

    def t_VarsOf(self, env, e):
        opts = (TERM, FORMULA, RULE, ListT(TERM), ListT(FORMULA), ListT(RULE))
        return ListT(TERM), replace(e, e=self.one_of(env, e.e, opts)[1])

    # guards ----------------------------------------------------------------

    def boolean(self, env, b):
        if isinstance(b, Eq):
            tl, l = self.check(env, b.left)
            _, r = self.expect(env, b.right, tl)
            return replace(b, left=l, right=r)
        if isinstance(b, IsIn):
            te, x = self.check(env, b.elem)
            _, l = self.expect(env, b.lst, ListT(te))
            return replace(b, elem=x, lst=l)
        if isinstance(b, IsEmpty):
            return replace(b, e=self.expect(env, b.e, ListT(ANY))[1])
        if isinstance(b, IsNothing):
            return replace(b, e=self.expect(env, b.e, MaybeT(ANY))[1])
        if isinstance(b, IsVar):
            return replace(b, e=self.expect(env, b.e, TERM)[1])
        if isinstance(b, (And, Or)):
            return replace(b, left=self.boolean(env, b.left), right=self.boolean(env, b.right))
        if isinstance(b, Not):
            return replace(b, b=self.boolean(env, b.b))
        t, _ = self.check(env, b) if isinstance(b, Expr) else (None, None)
        raise TransformTypeError(b, "expected a boolean guard", BOOL, t)

    # patterns --------------------------------------------------------------

    def pattern(self, env, p: Pattern, expected: TType) -> dict:
        try:
            return self._pattern(env, p, expected)
        except MalformedPattern as exc:
            raise TransformTypeError(p, str(exc)) from None

    def _pattern(self, env, p: Pattern, t: TType) -> dict:
        if isinstance(p, PWild):
            return {}
        if isinstance(p, PVar):
            if p.annotation is None:
                return {p.name: t}
            u = unify(p.annotation, t)
            if u is None:
                raise TransformTypeError(p, "annotation mismatch", t, p.annotation)
            return {p.name: u}
        if isinstance(p, PPred):
            self._want(p, t, (FORMULA, RULE))
            return self._pattern(env, p.sub, ListT(TERM))
        if isinstance(p, POp):
            self._want(p, t, (TERM,))
            return self._pattern(env, p.sub, ListT(TERM))
        if isinstance(p, PHeadVar):
            known = env.get(p.name)
            if known in (OPNAME, PREDNAME):
                self._want(p, t, (TERM,) if known == OPNAME else (FORMULA, RULE))
                return self._pattern(env, p.sub, ListT(TERM))
            self._want(p, t, (TERM, FORMULA, RULE))
            head = OPNAME if t == TERM or isinstance(t, AnyT) else PREDNAME
            return self._disjoint(p, {p.name: head}, self._pattern(env, p.sub, ListT(TERM)))
        if isinstance(p, PNil):
            self._want(p, t, (ListT(ANY),))
            return {}
        if isinstance(p, PCons):
            self._want(p, t, (ListT(ANY),))
            el = t.elem if isinstance(t, ListT) else ANY
            return self._disjoint(p, self._pattern(env, p.head, el), self._pattern(env, p.tail, ListT(el)))
        raise TransformTypeError(p, f"unknown pattern {type(p).__name__}")

    def _want(self, p, t: TType, options) -> None:
        if not any(unify(t, o) is not None for o in options):
            raise TransformTypeError(p, "pattern does not fit", options[0], t)

    def _disjoint(self, p, a: dict, b: dict) -> dict:
        dup = a.keys() & b.keys()
        if dup:
            raise TransformTypeError(p, f"variable {sorted(dup)[0]!r} bound twice in pattern")
        return {**a, **b}


# -- public API --------------------------------------------------------------

def elaborate(e: Expr, env: Optional[TypeEnv] = None,
              lang: Optional[LanguageDef] = None) -> tuple[TType, Expr]:
    """Type ``e`` and return its type with the annotated expression."""
    cats = set(lang.categories) if lang is not None else None
    return _Checker(cats).check(dict(env or {}), e)


def typecheck_expr(env: TypeEnv, e: Expr) -> TType:
    return elaborate(e, env)[0]


def typecheck_pattern(env: TypeEnv, p: Pattern, expected: TType) -> dict:
    return _Checker().pattern(dict(env), p, expected)


class ConfigError(Exception):
    """``kind`` is one of ``disjointness``, ``language`` or ``type``."""

    def __init__(self, kind: str, message: str):
        self.kind = kind
        super().__init__(message)


def typecheck_config(generated, lang: LanguageDef, e: Expr,
                     check: Optional[Callable[[LanguageDef], list]] = None) -> Expr:
    """Check a whole configuration; returns the elaborated expression."""
    clash = set(generated) & set(vars_of(lang))
    if clash:
        raise ConfigError("disjointness",
                          "generated variables occur in the language: "
                          + ", ".join(sorted(map(str, clash))))
    if check is not None:
        problems = check(lang)
        if problems:
            raise ConfigError("language", "; ".join(map(str, problems)))
    try:
        t, e2 = elaborate(e, lang=None)
    except TransformTypeError as exc:
        raise ConfigError("type", str(exc)) from exc
    if unify(t, LANGUAGE) is None:
        raise ConfigError("type", str(TransformTypeError(e, "script must transform a language",
                                                          LANGUAGE, t)))
    return e2
