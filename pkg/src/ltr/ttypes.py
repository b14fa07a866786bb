"""The type language of transformation scripts."""
from __future__ import annotations

from dataclasses import dataclass


class TType:
    __slots__ = ()


@dataclass(frozen=True)
class Prim(TType):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class ListT(TType):
    elem: TType

    def __str__(self) -> str:
        return f"List {_wrap(self.elem)}"


@dataclass(frozen=True)
class MapT(TType):
    key: TType
    value: TType

    def __str__(self) -> str:
        return f"Map {_wrap(self.key)} {_wrap(self.value)}"


@dataclass(frozen=True)
class MaybeT(TType):
    elem: TType

    def __str__(self) -> str:
        return f"Maybe {_wrap(self.elem)}"


@dataclass(frozen=True)
class AnyT(TType):
    """Type of nil, nothing, error and empty maps before context fixes it."""

    def __str__(self) -> str:
        return "?"


def _wrap(t: TType) -> str:
    return f"({t})" if isinstance(t, (ListT, MapT, MaybeT)) else str(t)


LANGUAGE = Prim("Language")
RULE = Prim("Rule")
FORMULA = Prim("Formula")
TERM = Prim("Term")
STRING = Prim("String")
OPNAME = Prim("OpName")
PREDNAME = Prim("PredName")
BOOL = Prim("Bool")  # only for guards; no expression has this type
ANY = AnyT()

PRIMS = {t.name: t for t in (LANGUAGE, RULE, FORMULA, TERM, STRING, OPNAME, PREDNAME)}
TYPE_KEYWORDS = frozenset(PRIMS) | {"List", "Map", "Maybe"}


def type_equal(a: TType, b: TType) -> bool:
    return a == b
