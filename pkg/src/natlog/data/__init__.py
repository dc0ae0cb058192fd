"""Bundled tables: lexicon, lemma exceptions, rewrites, lexical resource, corpora."""

from __future__ import annotations

import functools
from importlib import resources
from typing import Dict, List, Tuple


def data_path(name: str):
    return resources.files(__package__) / name


def _rows(name: str, columns: int) -> List[Tuple[str, ...]]:
    out = []
    text = data_path(name).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != columns:
            raise ValueError(f"{name} line {lineno}: expected {columns} columns, got {len(parts)}")
        out.append(tuple(parts))
    return out


@functools.lru_cache(maxsize=None)
def load_lemma_exceptions() -> Dict[str, str]:
    return {word: lemma for word, lemma in _rows("lemma_exceptions.tsv", 2)}


@functools.lru_cache(maxsize=None)
def load_rewrites() -> Tuple[Tuple[Tuple[str, ...], Tuple[str, ...]], ...]:
    return tuple(
        (tuple(match.split()), tuple(replacement.split()))
        for match, replacement in _rows("rewrites.tsv", 2)
    )


@functools.lru_cache(maxsize=None)
def default_lexicon():
    from ..syntax import Lexicon

    return Lexicon.from_tsv(data_path("lexicon.tsv"))


def mini_corpus_path():
    return data_path("mini_corpus.tsv")


def default_resource_path():
    return data_path("lexical_resource.tsv")
