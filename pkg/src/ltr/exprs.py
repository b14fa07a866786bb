"""Transformation-script AST, patterns, values and substitution.

Values are not a separate representation: an expression *is* a value when
it matches the value grammar (``Expr.is_value``), which is computed once per
node. Terms, formulae and rules of the language being transformed are
embedded as template nodes whose argument lists are ``Cons``/``Nil`` chains.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from functools import cached_property
from typing import Any, ClassVar, Iterable, Iterator, Mapping, Optional, Sequence

from . import model
from .model import Binder, Constructor, Formula, MetaVar, Rule, Subst, Term

SELF = "self"
PREMISES = "premises"
CONCLUSION = "conclusion"
SPECIAL_NAMES = frozenset({SELF, PREMISES, CONCLUSION})


class MalformedPattern(ValueError):
    pass


@dataclass(frozen=True)
class Node:
    span: Any = field(default=None, compare=False, repr=False, kw_only=True)

    # evaluation-context positions, in the order they are reduced
    _ctx: ClassVar[tuple[str, ...]] = ()

    def children(self) -> Iterator[tuple[str, Any]]:
        for f in fields(self):
            if f.name == "span":
                continue
            v = getattr(self, f.name)
            if isinstance(v, (Node, Pattern)):
                yield f.name, v


class Expr(Node):
    @cached_property
    def is_value(self) -> bool:
        return False


class BoolExpr(Node):
    pass


def _values(*xs: Expr) -> bool:
    return all(x.is_value for x in xs)


# -- atoms -------------------------------------------------------------------

@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class MetaVarE(Expr):
    var: MetaVar

    @cached_property
    def is_value(self) -> bool:
        return True


@dataclass(frozen=True)
class StrLit(Expr):
    value: str

    @cached_property
    def is_value(self) -> bool:
        return True


@dataclass(frozen=True)
class OpNameLit(Expr):
    name: str

    @cached_property
    def is_value(self) -> bool:
        return True


@dataclass(frozen=True)
class PredNameLit(Expr):
    name: str

    @cached_property
    def is_value(self) -> bool:
        return True


@dataclass(frozen=True)
class CatNameRef(Expr):
    name: str


@dataclass(frozen=True)
class Skip(Expr):
    @cached_property
    def is_value(self) -> bool:
        return True


@dataclass(frozen=True)
class Error(Expr):
    pass


@dataclass(frozen=True)
class NewVar(Expr):
    pass


@dataclass(frozen=True)
class GetRules(Expr):
    pass


# -- templates ---------------------------------------------------------------

@dataclass(frozen=True)
class TermT(Expr):
    op: str
    args: Expr
    _ctx = ("args",)

    @cached_property
    def is_value(self) -> bool:
        return self.args.is_value


@dataclass(frozen=True)
class VarApp(Expr):
    """``x e`` with ``x`` a script variable bound to an OpName or PredName."""
    head: str
    args: Expr


@dataclass(frozen=True)
class BindT(Expr):
    var: MetaVar
    body: Expr
    _ctx = ("body",)

    @cached_property
    def is_value(self) -> bool:
        return self.body.is_value


@dataclass(frozen=True)
class SubstT(Expr):
    target: Expr
    replacement: Expr
    var: MetaVar
    _ctx = ("target", "replacement")

    @cached_property
    def is_value(self) -> bool:
        return _values(self.target, self.replacement)


@dataclass(frozen=True)
class FormulaT(Expr):
    pred: str
    args: Expr
    _ctx = ("args",)

    @cached_property
    def is_value(self) -> bool:
        return self.args.is_value


@dataclass(frozen=True)
class RuleT(Expr):
    premises: Expr
    conclusion: Expr
    # conclusion first, then premises
    _ctx = ("conclusion", "premises")

    @cached_property
    def is_value(self) -> bool:
        return _values(self.premises, self.conclusion)


# -- lists, maps, options ----------------------------------------------------

@dataclass(frozen=True)
class Nil(Expr):
    @cached_property
    def is_value(self) -> bool:
        return True


@dataclass(frozen=True)
class Cons(Expr):
    head: Expr
    tail: Expr
    _ctx = ("head", "tail")

    @cached_property
    def is_value(self) -> bool:
        return _values(self.head, self.tail)


@dataclass(frozen=True)
class Head(Expr):
    e: Expr
    _ctx = ("e",)


@dataclass(frozen=True)
class Tail(Expr):
    e: Expr
    _ctx = ("e",)


@dataclass(frozen=True)
class Append(Expr):
    left: Expr
    right: Expr
    _ctx = ("left", "right")


@dataclass(frozen=True)
class Concat(Expr):
    e: Expr
    _ctx = ("e",)


@dataclass(frozen=True)
class MapLit(Expr):
    keys: Expr
    values: Expr
    _ctx = ("keys", "values")

    @cached_property
    def is_value(self) -> bool:
        if not _values(self.keys, self.values):
            return False
        try:
            return len(unlist(self.keys)) == len(unlist(self.values))
        except ValueError:
            return False


@dataclass(frozen=True)
class MapGet(Expr):
    map: Expr
    key: Expr
    _ctx = ("map", "key")


@dataclass(frozen=True)
class MapKeys(Expr):
    e: Expr
    _ctx = ("e",)


@dataclass(frozen=True)
class Just(Expr):
    e: Expr
    _ctx = ("e",)

    @cached_property
    def is_value(self) -> bool:
        return self.e.is_value


@dataclass(frozen=True)
class Nothing(Expr):
    @cached_property
    def is_value(self) -> bool:
        return True


@dataclass(frozen=True)
class GetOpt(Expr):
    e: Expr
    _ctx = ("e",)


@dataclass(frozen=True)
class ConsStar(Expr):
    """Prepend the content of an option to a list; ``nothing`` is dropped."""
    opt: Expr
    rest: Expr
    _ctx = ("opt",)


# -- language instructions ---------------------------------------------------

@dataclass(frozen=True)
class NewSyntax(Expr):
    category: str
    metavar: MetaVar
    e: Expr
    _ctx = ("e",)


@dataclass(frozen=True)
class AddSyntax(Expr):
    category: str
    metavar: MetaVar
    e: Expr
    _ctx = ("e",)


@dataclass(frozen=True)
class SetRules(Expr):
    e: Expr
    _ctx = ("e",)


# -- control -----------------------------------------------------------------

@dataclass(frozen=True)
class Select(Expr):
    lst: Expr
    pattern: "Pattern"
    body: Expr
    keep: bool = False
    # Set by elaboration: True when the iterated elements are rules. Decides
    # whether premises/conclusion are rebound (and thus shielded) in the body.
    rule_elems: Optional[bool] = field(default=None, compare=False)
    _ctx = ("lst",)


@dataclass(frozen=True)
class Uniquefy(Expr):
    lf: Expr
    m: Expr
    label: str
    xbind: str
    ybind: str
    body: Expr
    _ctx = ("lf", "m")


@dataclass(frozen=True)
class If(Expr):
    cond: BoolExpr
    then: Expr
    else_: Expr
    _ctx = ("cond",)


@dataclass(frozen=True)
class Seq(Expr):
    first: Expr
    second: Expr
    _ctx = ("first",)


@dataclass(frozen=True)
class RuleSeq(Expr):
    first: Expr
    second: Expr
    _ctx = ("first",)


@dataclass(frozen=True)
class Tick(Expr):
    e: Expr
    ref: Expr
    _ctx = ("e", "ref")


@dataclass(frozen=True)
class Fold(Expr):
    pred: str
    e: Expr
    _ctx = ("e",)


@dataclass(frozen=True)
class VarsOf(Expr):
    e: Expr
    _ctx = ("e",)


# -- boolean guards ----------------------------------------------------------

@dataclass(frozen=True)
class Eq(BoolExpr):
    left: Expr
    right: Expr
    _ctx = ("left", "right")


@dataclass(frozen=True)
class IsIn(BoolExpr):
    elem: Expr
    lst: Expr
    _ctx = ("elem", "lst")


@dataclass(frozen=True)
class IsEmpty(BoolExpr):
    e: Expr
    _ctx = ("e",)


@dataclass(frozen=True)
class IsNothing(BoolExpr):
    e: Expr
    _ctx = ("e",)


@dataclass(frozen=True)
class IsVar(BoolExpr):
    e: Expr
    _ctx = ("e",)


@dataclass(frozen=True)
class And(BoolExpr):
    left: BoolExpr
    right: BoolExpr
    _ctx = ("left", "right")


@dataclass(frozen=True)
class Or(BoolExpr):
    left: BoolExpr
    right: BoolExpr
    _ctx = ("left", "right")


@dataclass(frozen=True)
class Not(BoolExpr):
    b: BoolExpr
    _ctx = ("b",)


# -- patterns ----------------------------------------------------------------

class Pattern:
    pass


@dataclass(frozen=True)
class PVar(Pattern):
    name: str
    annotation: Any = None  # a TransformType, or None to take the expected type


@dataclass(frozen=True)
class PWild(Pattern):
    pass


@dataclass(frozen=True)
class PPred(Pattern):
    pred: str
    sub: Pattern


@dataclass(frozen=True)
class POp(Pattern):
    op: str
    sub: Pattern


@dataclass(frozen=True)
class PHeadVar(Pattern):
    name: str
    sub: Pattern


@dataclass(frozen=True)
class PNil(Pattern):
    pass


@dataclass(frozen=True)
class PCons(Pattern):
    head: Pattern
    tail: Pattern


NIL = Nil()
NOTHING = Nothing()
SKIP = Skip()
ERROR = Error()
NEWVAR = NewVar()
GETRULES = GetRules()


def plist(items: Sequence[Pattern]) -> Pattern:
    out: Pattern = PNil()
    for p in reversed(items):
        out = PCons(p, out)
    return out


def pattern_binders(p: Pattern) -> list[str]:
    """Binder names of ``p`` left to right; duplicates are malformed."""
    out: list[str] = []

    def go(q: Pattern) -> None:
        if isinstance(q, PVar):
            out.append(q.name)
        elif isinstance(q, PHeadVar):
            out.append(q.name)
            go(q.sub)
        elif isinstance(q, (PPred, POp)):
            go(q.sub)
        elif isinstance(q, PCons):
            go(q.head)
            go(q.tail)

    go(p)
    if len(set(out)) != len(out):
        dup = next(n for n in out if out.count(n) > 1)
        raise MalformedPattern(f"duplicate pattern variable {dup!r}")
    return out


# -- lists and model conversion ---------------------------------------------

def mklist(items: Iterable[Expr]) -> Expr:
    out: Expr = NIL
    for x in reversed(list(items)):
        out = Cons(x, out)
    return out


def unlist(e: Expr) -> list[Expr]:
    out = []
    while isinstance(e, Cons):
        out.append(e.head)
        e = e.tail
    if not isinstance(e, Nil):
        raise ValueError(f"not a list: {type(e).__name__}")
    return out


def to_expr(x) -> Expr:
    """Embed a model term, formula, rule or a sequence of them."""
    if isinstance(x, model.Var):
        return MetaVarE(x.var)
    if isinstance(x, Constructor):
        return TermT(x.op, mklist(to_expr(a) for a in x.args))
    if isinstance(x, Binder):
        return BindT(x.bound, to_expr(x.body))
    if isinstance(x, Subst):
        return SubstT(to_expr(x.target), to_expr(x.replacement), x.var)
    if isinstance(x, Formula):
        return FormulaT(x.pred, mklist(to_expr(a) for a in x.args))
    if isinstance(x, Rule):
        return RuleT(mklist(to_expr(p) for p in x.premises), to_expr(x.conclusion))
    if isinstance(x, (list, tuple)):
        return mklist(to_expr(i) for i in x)
    raise TypeError(f"cannot embed {type(x).__name__}")


def to_term(e: Expr) -> Term:
    if isinstance(e, MetaVarE):
        return model.Var(e.var)
    if isinstance(e, TermT):
        return Constructor(e.op, tuple(to_term(a) for a in unlist(e.args)))
    if isinstance(e, BindT):
        return Binder(e.var, to_term(e.body))
    if isinstance(e, SubstT):
        return Subst(to_term(e.target), to_term(e.replacement), e.var)
    raise ValueError(f"not a term value: {type(e).__name__}")


def to_formula(e: Expr) -> Formula:
    if not isinstance(e, FormulaT):
        raise ValueError(f"not a formula value: {type(e).__name__}")
    return Formula(e.pred, tuple(to_term(a) for a in unlist(e.args)))


def to_rule(e: Expr) -> Rule:
    if not isinstance(e, RuleT):
        raise ValueError(f"not a rule value: {type(e).__name__}")
    return Rule(tuple(to_formula(p) for p in unlist(e.premises)), to_formula(e.conclusion))


def is_term_value(e: Expr) -> bool:
    return isinstance(e, (MetaVarE, TermT, BindT, SubstT)) and e.is_value


def classify_value(e: Expr) -> Optional[str]:
    """Kind of value ``e`` is, or None when it is not a value."""
    if not e.is_value:
        return None
    if isinstance(e, (MetaVarE, TermT, BindT, SubstT)):
        return "term"
    return {
        FormulaT: "formula", RuleT: "rule", StrLit: "string", OpNameLit: "opname",
        PredNameLit: "predname", Nil: "nil", Cons: "cons", MapLit: "map",
        Just: "just", Nothing: "nothing", Skip: "skip",
    }[type(e)]


# -- substitution ------------------------------------------------------------

def substitute(e, bindings: Sequence[tuple[str, Expr]] | Mapping[str, Expr]):
    """Replace free script variables by closed values.

    Iterated substitution with closed values equals simultaneous
    substitution where the first binding of a name wins. Inside the right
    operand of ``;r`` and inside selector bodies the names the construct
    rebinds at run time are left alone.
    """
    if isinstance(bindings, Mapping):
        env = dict(bindings)
    else:
        env = {}
        for name, v in bindings:
            env.setdefault(name, v)
    if not env:
        return e
    return _subst(e, env)


def _without(env: dict, names: Iterable[str]) -> dict:
    names = set(names)
    if not names & env.keys():
        return env
    return {k: v for k, v in env.items() if k not in names}


def _subst(e, env: dict):
    if not env:
        return e
    if isinstance(e, Expr) and e.is_value:
        return e
    if isinstance(e, Var):
        return env.get(e.name, e)
    if isinstance(e, VarApp):
        args = _subst(e.args, env)
        h = env.get(e.head)
        if isinstance(h, OpNameLit):
            return TermT(h.name, args, span=e.span)
        if isinstance(h, PredNameLit):
            return FormulaT(h.name, args, span=e.span)
        return replace(e, args=args)
    if isinstance(e, Select):
        pat = subst_pattern(e.pattern, env)
        shielded = set(pattern_binders(pat)) | {SELF}
        if e.rule_elems is not False:
            shielded |= SPECIAL_NAMES
        return replace(e, lst=_subst(e.lst, env), pattern=pat,
                       body=_subst(e.body, _without(env, shielded)))
    if isinstance(e, Uniquefy):
        return replace(e, lf=_subst(e.lf, env), m=_subst(e.m, env),
                       body=_subst(e.body, _without(env, (e.xbind, e.ybind))))
    if isinstance(e, RuleSeq):
        return replace(e, first=_subst(e.first, env),
                       second=_subst(e.second, _without(env, SPECIAL_NAMES)))
    changes = {}
    for name, child in e.children():
        new = _subst(child, env) if isinstance(child, Node) else child
        if new is not child:
            changes[name] = new
    return replace(e, **changes) if changes else e


def subst_pattern(p: Pattern, env: Mapping[str, Expr]) -> Pattern:
    """Resolve head variables that are bound to operator/predicate names."""
    if isinstance(p, PHeadVar):
        sub = subst_pattern(p.sub, env)
        h = env.get(p.name)
        if isinstance(h, OpNameLit):
            return POp(h.name, sub)
        if isinstance(h, PredNameLit):
            return PPred(h.name, sub)
        return p if sub is p.sub else PHeadVar(p.name, sub)
    if isinstance(p, (PPred, POp)):
        sub = subst_pattern(p.sub, env)
        return p if sub is p.sub else replace(p, sub=sub)
    if isinstance(p, PCons):
        h, t = subst_pattern(p.head, env), subst_pattern(p.tail, env)
        return p if (h is p.head and t is p.tail) else PCons(h, t)
    return p


def free_vars(e) -> set[str]:
    """Free script variables (including unresolved template heads)."""
    if isinstance(e, Expr) and e.is_value:
        return set()
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, VarApp):
        return {e.head} | free_vars(e.args)
    if isinstance(e, Select):
        bound = set(pattern_binders(e.pattern)) | {SELF}
        if e.rule_elems is not False:
            bound |= SPECIAL_NAMES
        return free_vars(e.lst) | (free_vars(e.body) - bound)
    if isinstance(e, Uniquefy):
        return free_vars(e.lf) | free_vars(e.m) | (free_vars(e.body) - {e.xbind, e.ybind})
    if isinstance(e, RuleSeq):
        return free_vars(e.first) | (free_vars(e.second) - SPECIAL_NAMES)
    out: set[str] = set()
    for _, child in e.children():
        if isinstance(child, Node):
            out |= free_vars(child)
    return out

