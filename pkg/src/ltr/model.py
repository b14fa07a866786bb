"""Language definitions: grammars, inference rules, formulae and terms.

Everything here is immutable. Terms are first-order trees with unary
binders and explicit substitution nodes; meta-variables carry a prime
counter so that ticking is total and injective.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Optional, Sequence, Union


@dataclass(frozen=True, order=True)
class MetaVar:
    base: str
    primes: int = 0
    fresh: Optional[int] = None

    def __post_init__(self):
        if not self.base:
            raise ValueError("meta-variable base must be non-empty")
        if self.primes < 0:
            raise ValueError("negative prime count")

    def __str__(self) -> str:
        tag = f"#{self.fresh}" if self.fresh is not None else ""
        return f"{self.base}{tag}{chr(39) * self.primes}"


class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    var: MetaVar


@dataclass(frozen=True)
class Constructor(Term):
    op: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class Binder(Term):
    bound: MetaVar
    body: Term


@dataclass(frozen=True)
class Subst(Term):
    """``target[replacement/var]``"""
    target: Term
    replacement: Term
    var: MetaVar


@dataclass(frozen=True)
class Formula:
    pred: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class Rule:
    premises: tuple[Formula, ...]
    conclusion: Formula


@dataclass(frozen=True)
class Production:
    category: str
    metavar: MetaVar
    alternatives: tuple[Term, ...]


@dataclass(frozen=True)
class LanguageDef:
    """A grammar paired with an ordered list of rules.

    ``ops`` and ``preds`` are the declared operator and predicate names.
    They drive parsing and the structural language check but are not part
    of structural equality.
    """
    grammar: tuple[Production, ...] = ()
    rules: tuple[Rule, ...] = ()
    ops: tuple[str, ...] = field(default=(), compare=False)
    preds: tuple[str, ...] = field(default=(), compare=False)

    @property
    def categories(self) -> tuple[str, ...]:
        return tuple(p.category for p in self.grammar)

    def with_rules(self, rules: Iterable[Rule]) -> "LanguageDef":
        return replace(self, rules=tuple(rules))

    def declare(self, ops: Iterable[str] = (), preds: Iterable[str] = ()) -> "LanguageDef":
        return replace(
            self,
            ops=_merge(self.ops, ops),
            preds=_merge(self.preds, preds),
        )


def _merge(old: Sequence[str], new: Iterable[str]) -> tuple[str, ...]:
    out = list(old)
    for n in new:
        if n not in out:
            out.append(n)
    return tuple(out)


Subject = Union[Term, Formula, Rule, Production, LanguageDef, Sequence]


def _walk_vars(x) -> Iterator[MetaVar]:
    if isinstance(x, Var):
        yield x.var
    elif isinstance(x, Constructor):
        for a in x.args:
            yield from _walk_vars(a)
    elif isinstance(x, Binder):
        yield x.bound
        yield from _walk_vars(x.body)
    elif isinstance(x, Subst):
        yield from _walk_vars(x.target)
        yield from _walk_vars(x.replacement)
        yield x.var
    elif isinstance(x, Formula):
        for a in x.args:
            yield from _walk_vars(a)
    elif isinstance(x, Rule):
        for p in x.premises:
            yield from _walk_vars(p)
        yield from _walk_vars(x.conclusion)
    elif isinstance(x, Production):
        yield x.metavar
        for a in x.alternatives:
            yield from _walk_vars(a)
    elif isinstance(x, LanguageDef):
        for p in x.grammar:
            yield from _walk_vars(p)
        for r in x.rules:
            yield from _walk_vars(r)
    elif isinstance(x, (list, tuple)):
        for item in x:
            yield from _walk_vars(item)
    else:
        raise TypeError(f"no meta-variables in {type(x).__name__}")


def vars_of(subject: Subject) -> list[MetaVar]:
    """All meta-variables of ``subject`` in depth-first, left-to-right order.

    Bound variables of binders are included. Duplicates keep their first
    position.
    """
    return list(dict.fromkeys(_walk_vars(subject)))


def tick_name(x: MetaVar) -> MetaVar:
    return replace(x, primes=x.primes + 1)


def term_equal(a: Term, b: Term) -> bool:
    return a == b


def grammar_lookup(lang: LanguageDef, category: str) -> Optional[tuple[Term, ...]]:
    for p in lang.grammar:
        if p.category == category:
            return p.alternatives
    return None


def grammar_production(lang: LanguageDef, category: str) -> Optional[Production]:
    for p in lang.grammar:
        if p.category == category:
            return p
    return None


def grammar_replace(lang: LanguageDef, category: str, metavar: MetaVar,
                    alternatives: Sequence[Term]) -> LanguageDef:
    """Drop any production for ``category`` and insert the new one.

    The replacement keeps the position of the removed production so that
    printing stays stable; new categories go at the end.
    """
    new = Production(category, metavar, tuple(alternatives))
    grammar = list(lang.grammar)
    for i, p in enumerate(grammar):
        if p.category == category:
            grammar[i] = new
            break
    else:
        grammar.append(new)
    return replace(lang, grammar=tuple(grammar))


def mv(name: str) -> MetaVar:
    """Parse ``T1''`` / ``X#3`` style names into a MetaVar."""
    primes = len(name) - len(name.rstrip("'"))
    core = name[: len(name) - primes] if primes else name
    fresh = None
    if "#" in core:
        core, idx = core.split("#", 1)
        fresh = int(idx)
    return MetaVar(core, primes, fresh)


def var(name: str) -> Var:
    return Var(mv(name))


def op(name: str, *args: Term) -> Constructor:
    return Constructor(name, tuple(args))


def formula(pred: str, *args: Term) -> Formula:
    return Formula(pred, tuple(args))
