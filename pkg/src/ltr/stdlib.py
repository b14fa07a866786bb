"""Shipped transformation scripts and fixtures."""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping, Optional

from .derived import expand_concat, expand_is_var, expand_let, expand_match, expand_overlap
from .exprs import Expr, MapLit, OpNameLit, PredNameLit, StrLit, mklist, substitute
from .model import Constructor, LanguageDef
from .script import parse_script
from .syntax import LabelMap, parse_language, parse_maps, used_names

__all__ = [
    "ASSETS", "TransformAsset", "asset_add_subtyping", "asset_big_step",
    "asset_explicit_equality", "all_ops_map", "expand_concat", "expand_is_var", "expand_let",
    "expand_match", "expand_overlap", "label_map_expr", "load_fixture", "read_asset",
]


def read_asset(filename: str) -> str:
    return resources.files("ltr").joinpath("assets").joinpath(filename).read_text(encoding="utf-8")


def load_fixture(name: str) -> LanguageDef:
    """``stlc``, ``stlc_if``, ``stlc_pairs`` or ``tiny``."""
    return parse_language(read_asset(f"{name}.lang"), f"{name}.lang")


def paper_maps() -> dict[str, LabelMap]:
    return parse_maps(read_asset("paper.maps"), "paper.maps")


def all_ops_map(lang: LanguageDef) -> LabelMap:
    """Label every argument of every non-nullary operator ``"yes"``."""
    arity: dict[str, int] = {}

    def walk(t) -> None:
        if isinstance(t, Constructor):
            arity.setdefault(t.op, len(t.args))
            for a in t.args:
                walk(a)

    for p in lang.grammar:
        for a in p.alternatives:
            walk(a)
    for r in lang.rules:
        for f in (*r.premises, r.conclusion):
            for a in f.args:
                walk(a)
    return {op: ("yes",) * n for op, n in arity.items() if n > 0}


def label_map_expr(lm: LabelMap, lang: Optional[LanguageDef] = None) -> MapLit:
    """A script map value; keys naming predicates of ``lang`` become
    predicate names, all others operator names."""
    preds: set[str] = set()
    if lang is not None:
        preds = set(lang.preds) | set(used_names(lang)[1])
    keys = [PredNameLit(k) if k in preds else OpNameLit(k) for k in lm]
    vals = [mklist(StrLit(s) for s in labels) for labels in lm.values()]
    return MapLit(mklist(keys), mklist(vals))


@dataclass(frozen=True)
class TransformAsset:
    name: str
    filename: str
    required_maps: tuple[str, ...] = ()
    extra_preds: tuple[str, ...] = ()
    maps: Mapping[str, LabelMap] = field(default_factory=dict, compare=False)

    @property
    def source(self) -> str:
        return read_asset(self.filename)

    def with_maps(self, maps: Mapping[str, LabelMap]) -> "TransformAsset":
        return TransformAsset(self.name, self.filename, self.required_maps, self.extra_preds,
                              {**self.maps, **maps})

    def missing_maps(self) -> list[str]:
        return [m for m in self.required_maps if m not in self.maps]

    def prepare(self, lang: LanguageDef) -> tuple[LanguageDef, Expr]:
        """Declare the predicates the script emits and bind its maps.

        ``allOps`` is derived from the language when not supplied.
        """
        maps = dict(self.maps)
        if "allOps" in self.required_maps and "allOps" not in maps:
            maps["allOps"] = all_ops_map(lang)
        missing = [m for m in self.required_maps if m not in maps]
        if missing:
            raise KeyError(f"asset {self.name!r} needs map(s): {', '.join(missing)}")
        lang = lang.declare(preds=self.extra_preds)
        e = parse_script(self.source, lang, self.filename)
        binds = [(name, label_map_expr(maps[name], lang)) for name in self.required_maps]
        return lang, substitute(e, binds)


ASSETS: dict[str, TransformAsset] = {
    "add-subtyping": TransformAsset("add-subtyping", "add_subtyping.ltr",
                                    ("mode", "variance"), ("<:", "join", "=")),
    "big-step": TransformAsset("big-step", "big_step.ltr"),
    "explicit-equality": TransformAsset("explicit-equality", "explicit_equality.ltr",
                                        ("allOps",), ("=",)),
}


def asset_add_subtyping(mode: LabelMap, variance: LabelMap) -> TransformAsset:
    return ASSETS["add-subtyping"].with_maps({"mode": mode, "variance": variance})


def asset_big_step() -> TransformAsset:
    return ASSETS["big-step"]


def asset_explicit_equality(all_ops: Optional[LabelMap] = None) -> TransformAsset:
    a = ASSETS["explicit-equality"]
    return a.with_maps({"allOps": all_ops}) if all_ops is not None else a
