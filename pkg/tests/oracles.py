"""Independent reference computations used by the tests.

Nothing here imports the engine's algorithms; only the data model and the
language parser (to write expected rules readably) are shared.
"""
from __future__ import annotations

from ltr.model import Binder, Constructor, Formula, MetaVar, Rule, Subst, Var


def fold_pairs(pred: str, terms: list) -> list[Formula]:
    """Consecutive pairs joined by ``pred``."""
    return [Formula(pred, (a, b)) for a, b in zip(terms, terms[1:])]


class Renaming:
    """A partial bijection between variables, grown on demand."""

    def __init__(self, fixed=()):
        self.fwd: dict = {x: x for x in fixed}
        self.bwd: dict = {x: x for x in fixed}

    def pair(self, a: MetaVar, b: MetaVar) -> bool:
        if a in self.fwd or b in self.bwd:
            return self.fwd.get(a) == b and self.bwd.get(b) == a
        self.fwd[a] = b
        self.bwd[b] = a
        return True


def _same(x, y, ren: Renaming) -> bool:
    if type(x) is not type(y):
        return False
    if isinstance(x, Var):
        return ren.pair(x.var, y.var)
    if isinstance(x, Constructor):
        return x.op == y.op and len(x.args) == len(y.args) and all(
            _same(a, b, ren) for a, b in zip(x.args, y.args))
    if isinstance(x, Binder):
        return ren.pair(x.bound, y.bound) and _same(x.body, y.body, ren)
    if isinstance(x, Subst):
        return (_same(x.target, y.target, ren) and _same(x.replacement, y.replacement, ren)
                and ren.pair(x.var, y.var))
    if isinstance(x, Formula):
        return x.pred == y.pred and len(x.args) == len(y.args) and all(
            _same(a, b, ren) for a, b in zip(x.args, y.args))
    if isinstance(x, Rule):
        return len(x.premises) == len(y.premises) and all(
            _same(a, b, ren) for a, b in zip(x.premises, y.premises)) and _same(
            x.conclusion, y.conclusion, ren)
    raise TypeError(type(x).__name__)


def equal_up_to_renaming(x, y, fixed=()) -> bool:
    """Structural equality modulo a bijection on variables; ``fixed``
    variables must map to themselves."""
    return _same(x, y, Renaming(fixed))


def same_rule_set(xs, ys, fixed=()) -> bool:
    """Premises compared as a set (order-insensitive), each rule up to renaming."""
    from itertools import permutations
    if len(xs.premises) != len(ys.premises):
        return False
    for perm in permutations(ys.premises):
        if equal_up_to_renaming(Rule(xs.premises, xs.conclusion), Rule(tuple(perm), ys.conclusion), fixed):
            return True
    return False


# -- uniquefy oracles --------------------------------------------------------

def has_arity_mismatch(formulas, labels: dict) -> bool:
    """Scan the positions uniquefy visits for a name whose argument count
    differs from its label count."""
    def scan_args(name, args) -> bool:
        if name in labels:
            return len(args) != len(labels[name])
        return any(scan_term(a) for a in args)

    def scan_term(t) -> bool:
        return isinstance(t, Constructor) and scan_args(t.op, t.args)

    return any(scan_args(f.pred, f.args) for f in formulas)


def target_positions(formulas, labels: dict, target: str):
    """Yield ``(formula index, path, is_target)`` for every argument slot
    the traversal decides on; paths index into ``args`` tuples."""
    def walk_args(i, name, args, path):
        if name in labels:
            for k, (a, lab) in enumerate(zip(args, labels[name])):
                yield i, path + (k,), lab == target
        else:
            for k, a in enumerate(args):
                if isinstance(a, Constructor):
                    yield from walk_args(i, a.op, a.args, path + (k,))
                else:
                    yield i, path + (k,), False

    for i, f in enumerate(formulas):
        yield from walk_args(i, f.pred, f.args, ())


def at_path(f: Formula, path):
    node = f
    for k in path:
        node = node.args[k]
    return node


def reverse_substitute(x, back: dict):
    if isinstance(x, Var):
        return Var(back.get(x.var, x.var))
    if isinstance(x, Constructor):
        return Constructor(x.op, tuple(reverse_substitute(a, back) for a in x.args))
    if isinstance(x, Binder):
        return Binder(x.bound, reverse_substitute(x.body, back))
    if isinstance(x, Subst):
        return Subst(reverse_substitute(x.target, back), reverse_substitute(x.replacement, back), x.var)
    if isinstance(x, Formula):
        return Formula(x.pred, tuple(reverse_substitute(a, back) for a in x.args))
    raise TypeError(type(x).__name__)


def all_vars(x, out=None) -> set:
    out = set() if out is None else out
    if isinstance(x, Var):
        out.add(x.var)
    elif isinstance(x, (Constructor, Formula)):
        for a in x.args:
            all_vars(a, out)
    elif isinstance(x, Binder):
        out.add(x.bound)
        all_vars(x.body, out)
    elif isinstance(x, Subst):
        out.add(x.var)
        all_vars(x.target, out)
        all_vars(x.replacement, out)
    elif isinstance(x, (list, tuple)):
        for i in x:
            all_vars(i, out)
    return out


# -- expected rules written as language text ---------------------------------

def rules_from_text(text: str, lang) -> list:
    """Parse rules using the operator and predicate names of ``lang``."""
    from ltr.syntax import parse_language, used_names
    ops, preds = used_names(lang)
    header = "ops: " + " ".join(sorted(set(lang.ops) | set(ops))) + "\n"
    header += "preds: " + " ".join(sorted(set(lang.preds) | set(preds))) + "\n"
    return list(parse_language(header + text).rules)


def find_rule(rules, expected, fixed=()) -> bool:
    return any(same_rule_set(r, expected, fixed) for r in rules)
