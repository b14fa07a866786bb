"""Shared test helpers for running shipped transformations."""
from __future__ import annotations

from ltr.evaluator import Configuration, Evaluator, Finished, check_language_structural
from ltr.stdlib import ASSETS, paper_maps
from ltr.typesys import typecheck_config


def run_asset(name: str, lang, maps=None, fuel: int = 1_000_000):
    """Run a shipped script; returns (prepared input language, result)."""
    asset = ASSETS[name].with_maps(paper_maps() if maps is None else maps)
    lang, e = asset.prepare(lang)
    e = typecheck_config(frozenset(), lang, e, check_language_structural)
    res = Evaluator(check_language_structural).run(Configuration.initial(lang, e), fuel)
    assert isinstance(res.outcome, Finished), res.outcome
    return lang, res.outcome.config.language
