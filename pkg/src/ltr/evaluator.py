"""Small-step evaluation of transformation scripts.

A configuration is ``(generated, language, expr)``. ``step`` finds the
leftmost-innermost redex in evaluation position, performs one atomic
reduction and, if the language changed, runs the language check; a
failed check discards the step and yields ``error`` with the old state.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Union

from .exprs import (ERROR, NIL, And, Append, AddSyntax, BindT, BoolExpr, CatNameRef, Concat, Cons,
                    ConsStar, Eq, Error, Expr, Fold, FormulaT, GetOpt, GetRules, Head, If, IsEmpty,
                    IsIn, IsNothing, IsVar, Just, MapGet, MapKeys, MapLit, MetaVarE, NewSyntax,
                    NewVar, Nil, Not, Nothing, OpNameLit, Or, PCons, PHeadVar, PNil, POp, PPred,
                    PVar, PWild, Pattern, PredNameLit, RuleSeq, RuleT, Select, Seq, SetRules, Skip,
                    StrLit, SubstT, Tail, TermT, Tick, Uniquefy, VarsOf, is_term_value, mklist,
                    substitute, to_expr, to_formula, to_rule, to_term, unlist)
from .model import (Constructor, LanguageDef, MetaVar, grammar_lookup, grammar_production,
                    grammar_replace, tick_name, vars_of)
from .ttypes import (FORMULA, LANGUAGE, OPNAME, PREDNAME, RULE, STRING, TERM, AnyT, ListT, MapT,
                     MaybeT, TType)
from .uniquefy import UniquefyFailure, uniquefy_formulas

DEFAULT_FUEL = 1_000_000
TRACE_CAP = 10_000


@dataclass(frozen=True)
class Configuration:
    generated: frozenset
    language: LanguageDef
    expr: Expr

    @classmethod
    def initial(cls, language: LanguageDef, expr: Expr) -> "Configuration":
        return cls(frozenset(), language, expr)


@dataclass(frozen=True)
class Stepped:
    config: Configuration


@dataclass(frozen=True)
class Finished:
    config: Configuration

    @property
    def value(self) -> Expr:
        return self.config.expr


@dataclass(frozen=True)
class Failed:
    config: Configuration


@dataclass(frozen=True)
class Stuck:
    """No rule applies to a non-value; impossible for well-typed scripts."""
    config: Configuration
    reason: str


@dataclass(frozen=True)
class FuelExhausted:
    config: Configuration


StepOutcome = Union[Stepped, Finished, Failed, Stuck]


# -- language checks ---------------------------------------------------------

LangCheck = Callable[[LanguageDef], list]


def check_language_structural(lang: LanguageDef) -> list[str]:
    """Arity consistency, declared predicates, unique categories."""
    problems: list[str] = []
    arity: dict[str, tuple[int, str]] = {}

    def note(name: str, n: int, where: str) -> None:
        seen = arity.get(name)
        if seen is None:
            arity[name] = (n, where)
        elif seen[0] != n:
            problems.append(f"{where}: {name!r} used with {n} arguments, "
                            f"but with {seen[0]} in {seen[1]}")

    def term(t, where: str) -> None:
        if isinstance(t, Constructor):
            note(t.op, len(t.args), where)
            for a in t.args:
                term(a, where)
        elif hasattr(t, "body"):
            term(t.body, where)
        elif hasattr(t, "target"):
            term(t.target, where)
            term(t.replacement, where)

    seen_cats: set[str] = set()
    for p in lang.grammar:
        where = f"production {p.category}"
        if p.category in seen_cats:
            problems.append(f"{where}: category defined twice")
        seen_cats.add(p.category)
        for a in p.alternatives:
            term(a, where)
    declared = set(lang.preds)
    for i, r in enumerate(lang.rules, 1):
        where = f"rule {i}"
        for f in (*r.premises, r.conclusion):
            if f.pred not in declared:
                problems.append(f"{where}: undeclared predicate {f.pred!r}")
            note(f.pred, len(f.args), where)
            for a in f.args:
                term(a, where)
    return problems


def check_none(lang: LanguageDef) -> list[str]:
    return []


CHECKS = {"structural": check_language_structural, "none": check_none}


# -- matching ----------------------------------------------------------------

def value_has_type(v: Expr, t: TType) -> bool:
    if isinstance(t, AnyT):
        return True
    if t == TERM:
        return is_term_value(v)
    if t == FORMULA:
        return isinstance(v, FormulaT)
    if t == RULE:
        return isinstance(v, RuleT)
    if t == STRING:
        return isinstance(v, StrLit)
    if t == OPNAME:
        return isinstance(v, OpNameLit)
    if t == PREDNAME:
        return isinstance(v, PredNameLit)
    if t == LANGUAGE:
        return isinstance(v, Skip)
    if isinstance(t, ListT):
        try:
            return all(value_has_type(x, t.elem) for x in unlist(v))
        except ValueError:
            return False
    if isinstance(t, MaybeT):
        return isinstance(v, Nothing) or (isinstance(v, Just) and value_has_type(v.e, t.elem))
    if isinstance(t, MapT):
        return isinstance(v, MapLit)
    return False


def match(v: Expr, p: Pattern) -> Optional[dict]:
    """Bindings making ``p`` equal to ``v``, or None."""
    out: dict = {}
    return out if _match(v, p, out) else None


def _match(v: Expr, p: Pattern, out: dict) -> bool:
    if isinstance(p, PWild):
        return True
    if isinstance(p, PVar):
        if p.annotation is not None and not value_has_type(v, p.annotation):
            return False
        out[p.name] = v
        return True
    if isinstance(v, RuleT) and isinstance(p, (PPred, PHeadVar)):
        v = v.conclusion
    if isinstance(p, PPred):
        return isinstance(v, FormulaT) and v.pred == p.pred and _match(v.args, p.sub, out)
    if isinstance(p, POp):
        return isinstance(v, TermT) and v.op == p.op and _match(v.args, p.sub, out)
    if isinstance(p, PHeadVar):
        if isinstance(v, TermT):
            out[p.name] = OpNameLit(v.op)
        elif isinstance(v, FormulaT):
            out[p.name] = PredNameLit(v.pred)
        else:
            return False
        return _match(v.args, p.sub, out)
    if isinstance(p, PNil):
        return isinstance(v, Nil)
    if isinstance(p, PCons):
        return isinstance(v, Cons) and _match(v.head, p.head, out) and _match(v.tail, p.tail, out)
    return False


def subs_for_rule(r: RuleT) -> list[tuple[str, Expr]]:
    return [("self", r), ("premises", r.premises), ("conclusion", r.conclusion)]


# -- fresh names -------------------------------------------------------------

FRESH_BASE = "X"


def fresh_var(c: Configuration) -> tuple[MetaVar, Configuration]:
    """Smallest ``X#n`` outside the generated set and the language.

    Generated names are never primed, so they cannot coincide with a
    name produced by ticking.
    """
    used = {x.fresh for x in c.generated if x.base == FRESH_BASE and x.primes == 0}
    used |= {x.fresh for x in vars_of(c.language) if x.base == FRESH_BASE and x.primes == 0}
    n = 1
    while n in used:
        n += 1
    x = MetaVar(FRESH_BASE, 0, n)
    return x, replace(c, generated=c.generated | {x})


# -- decomposition -----------------------------------------------------------

@dataclass(frozen=True)
class Decomposition:
    path: tuple  # (node, field) pairs from the root down
    redex: object
    error: bool = False

    def plug(self, x):
        for node, name in reversed(self.path):
            x = replace(node, **{name: x})
        return x


def _ready(b: BoolExpr) -> bool:
    for name in b._ctx:
        child = getattr(b, name)
        if isinstance(child, BoolExpr):
            if not _ready(child):
                return False
        elif not child.is_value:
            return False
    return True


def decompose(e) -> Optional[Decomposition]:
    """Split ``e`` into an evaluation context and a redex.

    Returns None for values. ``error`` is set when an ``error`` sits in
    evaluation position, in which case the whole expression fails.
    """
    if isinstance(e, Expr) and e.is_value:
        return None
    path: list = []
    node = e
    while True:
        for name in node._ctx:
            child = getattr(node, name)
            if isinstance(child, Error):
                return Decomposition(tuple(path), child, error=True)
            if isinstance(child, BoolExpr):
                if _ready(child):
                    continue
            elif child.is_value:
                continue
            path.append((node, name))
            node = child
            break
        else:
            return Decomposition(tuple(path), node)


# -- atomic steps ------------------------------------------------------------

class _Stuck(Exception):
    pass


class _LangRejected(Exception):
    pass


def _names_map(v: Expr) -> dict[str, tuple[str, ...]]:
    if not isinstance(v, MapLit):
        raise _Stuck("label map is not a map")
    out: dict[str, tuple[str, ...]] = {}
    for k, labels in zip(unlist(v.keys), unlist(v.values)):
        if not isinstance(k, (OpNameLit, PredNameLit)):
            raise _Stuck("label map key is not a name")
        out.setdefault(k.name, tuple(s.value for s in unlist(labels)))
    return out


class Evaluator:
    """Reduction engine.

    ``preserve_generated`` keeps the generated-name set across grammar
    instructions instead of resetting it. ``only_repeated`` is passed to
    uniquefy.
    """

    def __init__(self, check: LangCheck = check_language_structural, *,
                 preserve_generated: bool = False, only_repeated: bool = True):
        self.check = check
        self.preserve_generated = preserve_generated
        self.only_repeated = only_repeated

    def step(self, c: Configuration) -> StepOutcome:
        e = c.expr
        if isinstance(e, Error):
            return Failed(c)
        d = decompose(e)
        if d is None:
            return Finished(c)
        if d.error:
            return Stepped(replace(c, expr=ERROR))
        try:
            new, gen, lang = self.atomic(d.redex, c.generated, c.language)
        except _Stuck as exc:
            return Stuck(c, str(exc))
        if lang is not c.language and lang != c.language and self.check(lang):
            # the step would break the language: discard it
            return Stepped(replace(c, expr=ERROR))
        return Stepped(Configuration(gen, lang, d.plug(new)))

    def run(self, c: Configuration, fuel: int = DEFAULT_FUEL, trace: bool = False,
            on_step: Optional[Callable[[Configuration], None]] = None) -> "RunResult":
        steps = 0
        log: list[Configuration] = [c] if trace else []
        while True:
            out = self.step(c)
            if not isinstance(out, Stepped):
                return RunResult(out, steps, log)
            if steps >= fuel:
                return RunResult(FuelExhausted(c), steps, log)
            c = out.config
            steps += 1
            if trace and len(log) < TRACE_CAP:
                log.append(c)
            if on_step is not None:
                on_step(c)

    # one atomic reduction; every evaluation-position child is a value
    def atomic(self, e, gen: frozenset, lang: LanguageDef) -> tuple[Expr, frozenset, LanguageDef]:
        if isinstance(e, If):
            return (e.then if self.truth(e.cond) else e.else_), gen, lang
        if isinstance(e, NewVar):
            x, c = fresh_var(Configuration(gen, lang, e))
            return MetaVarE(x), c.generated, lang
        if isinstance(e, GetRules):
            return mklist(to_expr(r) for r in lang.rules), gen, lang
        if isinstance(e, CatNameRef):
            alts = grammar_lookup(lang, e.name)
            return (ERROR if alts is None else mklist(to_expr(a) for a in alts)), gen, lang
        if isinstance(e, SetRules):
            rules = [to_rule(r) for r in self._list(e.e)]
            new = lang.with_rules(rules)
            # names now used by the language are no longer merely generated
            return Skip(), gen - set(vars_of(new)), new
        if isinstance(e, (NewSyntax, AddSyntax)):
            return self._syntax(e, gen, lang)
        return self.pure(e), gen, lang

    def _syntax(self, e, gen, lang):
        terms = [to_term(t) for t in self._list(e.e)]
        if isinstance(e, AddSyntax):
            prod = grammar_production(lang, e.category)
            if prod is None:
                return ERROR, gen, lang
            if prod.metavar != e.metavar and self.check is not check_none:
                return ERROR, gen, lang
            terms = [*prod.alternatives, *terms]
        new = grammar_replace(lang, e.category, e.metavar, terms)
        gen2 = gen - set(vars_of(new)) if self.preserve_generated else frozenset()
        return Skip(), gen2, new

    def _list(self, v) -> list:
        try:
            return unlist(v)
        except ValueError:
            raise _Stuck(f"expected a list, found {type(v).__name__}") from None

    def pure(self, e) -> Expr:
        """Steps that do not touch the generated set or the language."""
        if isinstance(e, Seq):
            if isinstance(e.first, Skip):
                return e.second
            raise _Stuck("left of ';' is not skip")
        if isinstance(e, RuleSeq):
            if not isinstance(e.first, RuleT):
                raise _Stuck("left of ';r' is not a rule")
            return substitute(e.second, subs_for_rule(e.first))
        if isinstance(e, Select):
            return self._select(e)
        if isinstance(e, ConsStar):
            if isinstance(e.opt, Nothing):
                return e.rest
            if isinstance(e.opt, Just):
                return Cons(e.opt.e, e.rest)
            raise _Stuck("cons* needs an option")
        if isinstance(e, Head):
            xs = self._list(e.e)
            return xs[0] if xs else ERROR
        if isinstance(e, Tail):
            if isinstance(e.e, Cons):
                return e.e.tail
            self._list(e.e)
            return ERROR
        if isinstance(e, Append):
            return mklist(self._list(e.left) + self._list(e.right))
        if isinstance(e, Concat):
            return mklist([x for xs in self._list(e.e) for x in self._list(xs)])
        if isinstance(e, MapLit):
            # both sides are values but the lengths differ
            return ERROR
        if isinstance(e, MapGet):
            if not isinstance(e.map, MapLit):
                raise _Stuck("lookup in a non-map")
            for k, v in zip(unlist(e.map.keys), unlist(e.map.values)):
                if k == e.key:
                    return v
            return ERROR
        if isinstance(e, MapKeys):
            if not isinstance(e.e, MapLit):
                raise _Stuck("mapKeys of a non-map")
            return e.e.keys
        if isinstance(e, GetOpt):
            if isinstance(e.e, Just):
                return e.e.e
            if isinstance(e.e, Nothing):
                return ERROR
            raise _Stuck("get of a non-option")
        if isinstance(e, Uniquefy):
            return self._uniquefy(e)
        if isinstance(e, Tick):
            return self._tick(e.e, e.ref)
        if isinstance(e, Fold):
            ts = self._list(e.e)
            if len(ts) < 2:
                return NIL
            return Cons(FormulaT(e.pred, mklist(ts[:2])), Fold(e.pred, mklist(ts[1:])))
        if isinstance(e, VarsOf):
            return mklist(MetaVarE(x) for x in vars_of(self._model(e.e)))
        raise _Stuck(f"no rule for {type(e).__name__}")

    def _model(self, v):
        if isinstance(v, (Cons, Nil)):
            return [self._model(x) for x in unlist(v)]
        try:
            if isinstance(v, FormulaT):
                return to_formula(v)
            if isinstance(v, RuleT):
                return to_rule(v)
            return to_term(v)
        except ValueError as exc:
            raise _Stuck(str(exc)) from None

    def _select(self, e: Select) -> Expr:
        if isinstance(e.lst, Nil):
            return NIL
        if not isinstance(e.lst, Cons):
            raise _Stuck("selector over a non-list")
        v, rest = e.lst.head, e.lst.tail
        tail = replace(e, lst=rest)
        theta = match(v, e.pattern)
        if theta is None:
            return Cons(v, tail) if e.keep else tail
        binds = list(theta.items())
        binds += subs_for_rule(v) if isinstance(v, RuleT) else [("self", v)]
        return ConsStar(substitute(e.body, binds), tail)

    def _uniquefy(self, e: Uniquefy) -> Expr:
        lf = [to_formula(f) for f in self._list(e.lf)]
        m = _names_map(e.m)
        try:
            out, mr = uniquefy_formulas(lf, m, e.label, only_repeated=self.only_repeated)
        except UniquefyFailure:
            return ERROR
        ymap = MapLit(mklist(MetaVarE(k) for k in mr),
                      mklist(mklist(MetaVarE(x) for x in xs) for xs in mr.values()))
        return substitute(e.body, [(e.xbind, mklist(to_expr(f) for f in out)), (e.ybind, ymap)])

    def _tick(self, v, ref) -> Expr:
        if isinstance(v, MetaVarE):
            return If(IsIn(v, VarsOf(ref)), MetaVarE(tick_name(v.var)), v)
        if isinstance(v, TermT):
            return TermT(v.op, Tick(v.args, ref))
        if isinstance(v, BindT):
            return BindT(v.var, Tick(v.body, ref))
        if isinstance(v, SubstT):
            return SubstT(Tick(v.target, ref), Tick(v.replacement, ref), v.var)
        if isinstance(v, Cons):
            return Cons(Tick(v.head, ref), Tick(v.tail, ref))
        if isinstance(v, Nil):
            return NIL
        raise _Stuck("tick of a non-term")

    def truth(self, b: BoolExpr) -> bool:
        if isinstance(b, Eq):
            return b.left == b.right
        if isinstance(b, IsIn):
            return b.elem in self._list(b.lst)
        if isinstance(b, IsEmpty):
            return len(self._list(b.e)) == 0
        if isinstance(b, IsNothing):
            if not isinstance(b.e, (Just, Nothing)):
                raise _Stuck("isNothing of a non-option")
            return isinstance(b.e, Nothing)
        if isinstance(b, IsVar):
            if not is_term_value(b.e):
                raise _Stuck("isVar of a non-term")
            return isinstance(b.e, MetaVarE)
        if isinstance(b, And):
            return self.truth(b.left) & self.truth(b.right)
        if isinstance(b, Or):
            return self.truth(b.left) | self.truth(b.right)
        if isinstance(b, Not):
            return not self.truth(b.b)
        raise _Stuck(f"not a guard: {type(b).__name__}")


@dataclass
class RunResult:
    outcome: object
    steps: int
    trace: list = field(default_factory=list)


def step(c: Configuration, check: LangCheck = check_language_structural) -> StepOutcome:
    return Evaluator(check).step(c)


def run(c: Configuration, check: LangCheck = check_language_structural,
        fuel: int = DEFAULT_FUEL, trace: bool = False) -> RunResult:
    return Evaluator(check).run(c, fuel, trace)


def step_atomic(c: Configuration, check: LangCheck = check_language_structural) -> Optional[Configuration]:
    """Apply one rule at the root of ``c.expr``; None when none applies."""
    if isinstance(c.expr, Expr) and c.expr.is_value:
        return None
    try:
        new, gen, lang = Evaluator(check).atomic(c.expr, c.generated, c.language)
    except _Stuck:
        return None
    return Configuration(gen, lang, new)
