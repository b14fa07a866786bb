"""Transformations of language definitions (grammars plus inference rules)."""
from .model import (Binder, Constructor, Formula, LanguageDef, MetaVar, Production, Rule, Subst,
                    Term, Var, vars_of)
from .syntax import ParseError, export_json, parse_language, print_language
from .script import parse_script, print_expr
from .typesys import TransformTypeError, elaborate, typecheck_config
from .evaluator import Configuration, Evaluator, check_language_structural

__all__ = [
    "Binder", "Configuration", "Constructor", "Evaluator", "Formula", "LanguageDef", "MetaVar",
    "ParseError", "Production", "Rule", "Subst", "Term", "TransformTypeError", "Var",
    "check_language_structural", "elaborate", "export_json", "parse_language", "parse_script",
    "print_expr", "print_language", "typecheck_config", "vars_of",
]

__version__ = "0.1.0"
