"""Positional renaming of meta-variables in a list of formulae.

A label map assigns a label to each argument position of some operator
and predicate names. Variables found under positions carrying the target
label get fresh primed copies, and the replacement map records, per
original variable, the copies in the order they were introduced.
"""
from __future__ import annotations

from collections import Counter
from typing import Mapping, Optional, Sequence

from .model import Binder, Constructor, Formula, MetaVar, Subst, Term, Var, tick_name, vars_of

LabelMap = Mapping[str, Sequence[str]]
ReplacementMap = dict[MetaVar, list[MetaVar]]


class UniquefyFailure(Exception):
    """A name's argument count differs from the length of its label list."""


def zip_labels(args: Sequence[Term], labels: Sequence[str]) -> list[tuple[Term, str]]:
    if len(args) != len(labels):
        raise UniquefyFailure(f"{len(args)} arguments but {len(labels)} labels")
    return list(zip(args, labels))


class _Renamer:
    def __init__(self, rename: Optional[set], avoid: set):
        self.rename = rename  # None: rename every occurrence
        self.used = set(avoid)
        self.mr: ReplacementMap = {}

    def fresh_tick(self, x: MetaVar) -> MetaVar:
        y = tick_name(x)
        while y in self.used:
            y = tick_name(y)
        self.used.add(y)
        return y

    def var(self, x: MetaVar) -> MetaVar:
        if self.rename is not None and x not in self.rename:
            return x
        if x in self.mr:
            y = self.fresh_tick(self.mr[x][-1])
            self.mr[x].append(y)
        else:
            y = self.fresh_tick(x)
            self.mr[x] = [y]
        return y

    def term(self, t: Term) -> Term:
        if isinstance(t, Var):
            return Var(self.var(t.var))
        if isinstance(t, Constructor):
            return Constructor(t.op, tuple(self.term(a) for a in t.args))
        if isinstance(t, Binder):
            return Binder(t.bound, self.term(t.body))
        if isinstance(t, Subst):
            return Subst(self.term(t.target), self.term(t.replacement), t.var)
        raise TypeError(type(t).__name__)


def replace_term(t: Term, mr: ReplacementMap) -> tuple[Term, ReplacementMap]:
    """Rename every variable occurrence in ``t``, extending ``mr``."""
    r = _Renamer(None, vars_of(t) + [y for ys in mr.values() for y in ys] + list(mr))
    r.mr = {k: list(v) for k, v in mr.items()}
    return r.term(t), r.mr


class _Walker:
    def __init__(self, m: LabelMap, target: str, on_target):
        self.m = m
        self.target = target
        self.on_target = on_target

    def formula(self, f: Formula) -> Formula:
        return Formula(f.pred, self._args(f.pred, f.args))

    def term(self, t: Term) -> Term:
        if isinstance(t, Constructor):
            return Constructor(t.op, self._args(t.op, t.args))
        # variables, binders and substitutions outside target positions stay
        return t

    def _args(self, name: str, args: tuple[Term, ...]) -> tuple[Term, ...]:
        if name in self.m:
            pairs = zip_labels(args, self.m[name])
            return tuple(self.on_target(a) if lab == self.target else a for a, lab in pairs)
        return tuple(self.term(a) for a in args)


def uniquefy_formulas(lf: Sequence[Formula], m: LabelMap, target: str,
                      mr: Optional[ReplacementMap] = None, *, only_repeated: bool = True,
                      avoid: Sequence[MetaVar] = ()) -> tuple[list[Formula], ReplacementMap]:
    """Rename variables under ``target``-labelled positions, left to right.

    With ``only_repeated`` a variable is renamed only when it occurs at
    least twice across all target positions, so single occurrences keep
    their name and need no constraint linking them back. Copies are
    primed versions of the original that avoid every variable of ``lf``,
    ``avoid`` and the copies already made.

    Raises UniquefyFailure on an arity mismatch with the label map.
    """
    lf = list(lf)
    rename: Optional[set] = None
    if only_repeated:
        counts: Counter = Counter()

        def count(t: Term) -> Term:
            counts.update(_occurrences(t))
            return t

        walker = _Walker(m, target, count)
        for f in lf:
            walker.formula(f)
        rename = {x for x, n in counts.items() if n >= 2}
    prior = mr or {}
    r = _Renamer(rename, [*vars_of(lf), *avoid, *prior, *(y for ys in prior.values() for y in ys)])
    r.mr = {k: list(v) for k, v in prior.items()}
    walker = _Walker(m, target, r.term)
    out = [walker.formula(f) for f in lf]
    return out, r.mr


def _occurrences(t: Term):
    if isinstance(t, Var):
        yield t.var
    elif isinstance(t, Constructor):
        for a in t.args:
            yield from _occurrences(a)
    elif isinstance(t, Binder):
        yield from _occurrences(t.body)
    elif isinstance(t, Subst):
        yield from _occurrences(t.target)
        yield from _occurrences(t.replacement)


def arity_mismatch(lf: Sequence[Formula], m: LabelMap) -> bool:
    """True iff uniquefy would fail on ``lf`` under ``m`` for any target.

    Only names reached by the traversal are checked: arguments under
    labelled positions are not inspected further.
    """
    try:
        walker = _Walker(m, "\0never", lambda t: t)
        for f in lf:
            walker.formula(f)
    except UniquefyFailure:
        return True
    return False
