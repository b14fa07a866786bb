"""Derived script forms, expanded into core syntax by the parser.

Internal binders are named with a ``%`` prefix, which the lexer never
produces, so expansions cannot capture user variables.
"""
from __future__ import annotations

import itertools

from .exprs import (ERROR, Concat, Expr, Head, If, IsEmpty, IsIn, IsVar, Just, Not,
                    NOTHING, Pattern, PVar, Select, Var, VarsOf, mklist)

_counter = itertools.count(1)


def gensym(hint: str) -> str:
    return f"%{hint}{next(_counter)}"


def expand_let(x: str, e1: Expr, e2: Expr, span=None) -> Expr:
    """``let x = e1 in e2``: a one-element selector whose body always matches."""
    return Head(Select(mklist([e1]), PVar(x), Just(e2)), span=span)


def expand_match(e1: Expr, p: Pattern, e2: Expr, span=None) -> Expr:
    """Single-branch match; error when ``p`` does not match ``e1``."""
    g = gensym("m")
    hits = Select(mklist([e1]), p, Just(e2))
    return expand_let(g, hits, If(IsEmpty(Var(g)), ERROR, Head(Var(g))), span=span)


def expand_concat(e: Expr, span=None) -> Expr:
    # flattening needs a fold, which selectors cannot express; kept primitive
    return Concat(e, span=span)


def expand_overlap(e1: Expr, e2: Expr, span=None):
    """True iff the two terms share a meta-variable."""
    g = gensym("o")
    common = Select(VarsOf(e1), PVar(g),
                    If(IsIn(Var(g), VarsOf(e2)), Just(Var(g)), NOTHING),
                    rule_elems=False)
    return Not(IsEmpty(common), span=span)


def expand_is_var(e: Expr, span=None):
    return IsVar(e, span=span)
