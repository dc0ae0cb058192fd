"""Sentence normalization: lemmatize, then flatten limited syntactic variation.

Three transformations run before parsing, each a pure function on token
sequences and each the identity outside its pattern:

1. passive to active ("a guitar be play by a man" -> "a man play a guitar";
   agentless passives gain the agent "a person"),
2. existential clauses to base form ("there be no girl dancing" ->
   "no girl be dancing"),
3. table-driven lexical rewrites ("someone" -> "some person", ...).

Lemmatization lowercases, strips inflection with an exception table plus
suffix rules, and keeps each token's original surface so later stages can
distinguish e.g. progressive "playing" from participial "played".
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .core import Token
from .data import load_lemma_exceptions, load_rewrites
from .syntax import (
    POS_ADJ,
    POS_ADV,
    POS_DET,
    POS_NOUN,
    POS_PREP,
    POS_PRON,
    POS_VERB_I,
    POS_VERB_T,
    Lexicon,
)

VOWELS = "aeiou"

# Suffix-bearing words that are not inflected forms.
ING_KEEP = {
    "thing", "something", "anything", "nothing", "everything", "ring", "king",
    "wing", "spring", "string", "morning", "evening", "during", "ceiling",
    "building", "clothing", "painting", "wedding", "during", "sibling",
}
S_KEEP = {
    "is", "this", "his", "its", "us", "bus", "gas", "yes", "lens", "plus",
    "thus", "as", "was", "has", "chaos", "tennis", "series", "species",
    "glasses",
}


@dataclass(frozen=True)
class TransformConfig:
    enable_pass2act: bool = True
    enable_existential: bool = True
    enable_lexical_rewrites: bool = True

    @staticmethod
    def none() -> "TransformConfig":
        return TransformConfig(False, False, False)


@dataclass(frozen=True)
class TaggedToken:
    lemma: str
    surface: str
    index: int
    pos: str

    def to_token(self) -> Token:
        return Token(self.lemma, self.surface, self.index)


def _strip_final_e_candidate(stem: str) -> str:
    """Restore a dropped final 'e' on consonant-vowel-consonant stems."""
    if len(stem) >= 3:
        a, b, c = stem[-3], stem[-2], stem[-1]
        if a not in VOWELS and b in VOWELS and c not in VOWELS and c not in "wxy":
            return stem + "e"
    return stem


def _lemma_of(word: str, exceptions: Dict[str, str]) -> str:
    if word in exceptions:
        return exceptions[word]
    if word.endswith("ing") and len(word) > 4 and word not in ING_KEEP:
        stem = word[:-3]
        if len(stem) >= 2 and stem[-1] == stem[-2] and stem[-1] not in VOWELS + "sl":
            return stem[:-1]
        return _strip_final_e_candidate(stem)
    if word.endswith("ied") and len(word) > 4:
        return word[:-3] + "y"
    if word.endswith("ed") and len(word) > 3:
        stem = word[:-2]
        if len(stem) >= 2 and stem[-1] == stem[-2] and stem[-1] not in VOWELS + "sl":
            return stem[:-1]
        if stem.endswith(("s", "x", "z", "ch", "sh")):
            return stem
        return _strip_final_e_candidate(stem)
    if word.endswith("ies") and len(word) > 4:
        return word[:-3] + "y"
    if word.endswith("es") and len(word) > 3 and word[:-2].endswith(("ss", "x", "z", "ch", "sh", "o")):
        return word[:-2]
    if word.endswith("s") and len(word) > 3 and word not in S_KEEP and not word.endswith("ss"):
        return word[:-1]
    return word


def strip_ing(word: str, exceptions: Optional[Dict[str, str]] = None) -> str:
    """Neutralize a progressive suffix only ("talking" -> "talk")."""
    if not word.endswith("ing") or len(word) <= 4 or word in ING_KEEP:
        return word
    if exceptions is None:
        exceptions = load_lemma_exceptions()
    if word in exceptions:
        return exceptions[word]
    stem = word[:-3]
    if len(stem) >= 2 and stem[-1] == stem[-2] and stem[-1] not in VOWELS + "sl":
        return stem[:-1]
    return _strip_final_e_candidate(stem)


_TOKEN_RE = re.compile(r"[A-Za-z][A-Za-z_'-]*|\d+")


def lemmatize(sentence: str, exceptions: Optional[Dict[str, str]] = None) -> Tuple[Token, ...]:
    """Lowercase, split, and strip inflection; unknown words pass through."""
    if exceptions is None:
        exceptions = load_lemma_exceptions()
    tokens: List[Token] = []
    for match in _TOKEN_RE.finditer(sentence):
        surface = match.group(0)
        word = surface.lower()
        if word.endswith("'s"):
            word = word[:-2]
        word = word.replace("'", "")
        if not word:
            continue
        lemma = _lemma_of(word, exceptions)
        tokens.append(Token(lemma=lemma, surface=surface, index=len(tokens)))
    return tuple(tokens)


CLOSED_CLASS = {
    "be": "COP",
    "do": "AUX",
    "not": "NEG",
    "that": "REL",
    "there": "EX",
    "by": POS_PREP,
}


def tag_tokens(tokens: Sequence[Token], lexicon: Lexicon) -> Tuple[TaggedToken, ...]:
    """Attach a coarse part of speech to each token."""
    tagged = []
    for i, tok in enumerate(tokens):
        lemma = tok.lemma
        if lemma in CLOSED_CLASS:
            pos = CLOSED_CLASS[lemma]
        elif lexicon.has_pos(lemma, POS_DET):
            pos = POS_DET
        elif lexicon.has_pos(lemma, POS_PREP):
            pos = POS_PREP
        elif lexicon.has_pos(lemma, POS_VERB_T):
            pos = POS_VERB_T
        elif lexicon.has_pos(lemma, POS_VERB_I):
            pos = POS_VERB_I
        elif lexicon.has_pos(lemma, POS_NOUN):
            pos = POS_NOUN
        elif lexicon.has_pos(lemma, POS_ADJ):
            pos = POS_ADJ
        elif lexicon.has_pos(lemma, POS_ADV):
            pos = POS_ADV
        elif lexicon.has_pos(lemma, POS_PRON):
            pos = POS_PRON
        elif lemma.endswith("ly"):
            pos = POS_ADV
        else:
            pos = POS_NOUN
        tagged.append(TaggedToken(lemma, tok.surface, i, pos))
    return tuple(tagged)


def _reindex(tagged: Sequence[TaggedToken]) -> Tuple[TaggedToken, ...]:
    return tuple(TaggedToken(t.lemma, t.surface, i, t.pos) for i, t in enumerate(tagged))


def _is_verbish(tok: TaggedToken) -> bool:
    return tok.pos in (POS_VERB_I, POS_VERB_T, "COP", "AUX", "NEG") or tok.surface.lower().endswith("ing")


def _np_chunk_end(tagged: Sequence[TaggedToken], start: int, allow_pp: bool = True) -> int:
    """End index (exclusive) of a flat noun-phrase chunk starting at ``start``."""
    i = start
    if i < len(tagged) and tagged[i].pos == POS_DET:
        i += 1
    saw_nominal = False
    while i < len(tagged) and tagged[i].pos in (POS_ADJ, POS_NOUN, POS_PRON) and not _is_verbish(tagged[i]):
        saw_nominal = True
        i += 1
    if not saw_nominal:
        return start
    if allow_pp and i < len(tagged) and tagged[i].pos == POS_PREP and tagged[i].lemma != "by":
        inner = _np_chunk_end(tagged, i + 1, allow_pp=False)
        if inner > i + 1:
            i = inner
    return i


def passive_to_active(tagged: Sequence[TaggedToken]) -> Tuple[TaggedToken, ...]:
    """Rewrite ``NP1 be V (by NP2)?`` as ``NP2 V NP1``; agentless gains "a person"."""
    tokens = list(tagged)
    # Collapse stacked copulas left by progressive passives ("be be play").
    collapsed: List[TaggedToken] = []
    for tok in tokens:
        if tok.lemma == "be" and collapsed and collapsed[-1].lemma == "be":
            continue
        collapsed.append(tok)
    tokens = list(_reindex(collapsed))

    be_idx = next((i for i, t in enumerate(tokens) if t.lemma == "be"), None)
    if be_idx is None or be_idx == 0 or be_idx + 1 >= len(tokens):
        return tuple(tokens)
    verb = tokens[be_idx + 1]
    if verb.pos not in (POS_VERB_T, POS_VERB_I):
        return tuple(tokens)
    surface = verb.surface.lower()
    if surface.endswith("ing"):
        return tuple(tokens)  # progressive, not passive
    participial = surface != verb.lemma or verb.pos == POS_VERB_T
    if not participial:
        return tuple(tokens)
    rest = tokens[be_idx + 2 :]
    subject = tokens[:be_idx]
    if rest and rest[0].lemma == "by":
        agent = [TaggedToken(t.lemma, t.surface, 0, t.pos) for t in rest[1:]]
        if not agent:
            return tuple(tokens)
        out = agent + [verb] + subject
    elif not rest and verb.pos == POS_VERB_T:
        out = [
            TaggedToken("a", "a", 0, POS_DET),
            TaggedToken("person", "person", 0, POS_NOUN),
            verb,
            *subject,
        ]
    else:
        return tuple(tokens)
    return _reindex(out)


def existential_to_base(tagged: Sequence[TaggedToken]) -> Tuple[TaggedToken, ...]:
    """Rewrite ``there be Det N X`` as ``Det N be X``."""
    tokens = list(tagged)
    if len(tokens) < 4 or tokens[0].lemma != "there" or tokens[1].lemma != "be":
        return tuple(tokens)
    if tokens[2].pos != POS_DET:
        return tuple(tokens)
    np_end = _np_chunk_end(tokens, 2)
    if np_end <= 2:
        return tuple(tokens)
    out = tokens[2:np_end] + [tokens[1]] + tokens[np_end:]
    return _reindex(out)


def lexical_rewrites(
    tagged: Sequence[TaggedToken], table: Optional[Sequence[Tuple[Tuple[str, ...], Tuple[str, ...]]]] = None
) -> Tuple[TaggedToken, ...]:
    """Apply multiword rewrites left to right, longest match first."""
    if table is None:
        table = load_rewrites()
    rules = sorted(table, key=lambda rule: -len(rule[0]))
    out: List[TaggedToken] = []
    lemmas = [t.lemma for t in tagged]
    i = 0
    while i < len(lemmas):
        hit = None
        for match, replacement in rules:
            if tuple(lemmas[i : i + len(match)]) == match:
                hit = (match, replacement)
                break
        if hit is None:
            out.append(tagged[i])
            i += 1
        else:
            match, replacement = hit
            for lemma in replacement:
                out.append(TaggedToken(lemma, lemma, 0, POS_NOUN))
            i += len(match)
    return _reindex(out)


def preprocess_sentence(
    sentence: str,
    lexicon: Lexicon,
    config: TransformConfig = TransformConfig(),
    rewrites: Optional[Sequence[Tuple[Tuple[str, ...], Tuple[str, ...]]]] = None,
) -> Tuple[Token, ...]:
    """Lemmatize then apply the enabled transformations; returns tokens."""
    tagged = tag_tokens(lemmatize(sentence), lexicon)
    if config.enable_pass2act:
        tagged = passive_to_active(tagged)
    if config.enable_existential:
        tagged = existential_to_base(tagged)
    if config.enable_lexical_rewrites:
        tagged = lexical_rewrites(tagged, rewrites)
        tagged = tag_tokens([t.to_token() for t in tagged], lexicon)
    return tuple(t.to_token() for t in tagged)
