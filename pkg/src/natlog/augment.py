"""Turn generated sentences into labeled training pairs, filter, sample, export.

Every entailment node of a premise's sentence base becomes an
(input, node, ENTAILMENT) pair and every contradiction becomes an
(input, boxed sentence, CONTRADICTION) pair. No neutral pairs exist: the
engine never generates neutral sentences. The class skew this creates is
left to the downstream consumer (see the evaluation harness's confidence
threshold).

Quality control is the stated rule only: drop sentences containing a
bigram of repeated words. A hook (``extra_filters``) exists for anything
stronger; no language-model filter is bundled, on purpose.
"""

from __future__ import annotations

import csv
import os
import random
import tempfile
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

from .core import NliLabel, Phrase, ProblemRecord
from .engine import SearchConfig, expand
from .errors import NoParseError, OovError
from .kb import LexicalResource, build_kb
from .polarizer import polarize
from .preprocess import TransformConfig, preprocess_sentence
from .syntax import Lexicon, parse_fragment

ALLOWED_FRACTIONS = (0.25, 0.5, 1.0)


@dataclass(frozen=True)
class GeneratedPair:
    premise: Phrase
    hypothesis: Phrase
    label: NliLabel
    source_id: str
    depth: int

    def __post_init__(self):
        if self.label is NliLabel.NEUTRAL:
            raise ValueError("generated pairs are entailing or contradicting only")
        if self.premise == self.hypothesis:
            raise ValueError("generated pair must change the sentence")


def generate_pairs(
    problems: Sequence[ProblemRecord],
    resource: Optional[LexicalResource] = None,
    config: SearchConfig = SearchConfig(),
    transforms: TransformConfig = TransformConfig(),
    lexicon: Optional[Lexicon] = None,
) -> Tuple[List[GeneratedPair], List[str]]:
    """Run generation from each problem's premise; returns (pairs, diagnostics)."""
    if lexicon is None:
        from .data import default_lexicon

        lexicon = default_lexicon()
    pairs: List[GeneratedPair] = []
    seen = set()
    diagnostics: List[str] = []
    for problem in problems:
        premise_tokens = preprocess_sentence(problem.premise, lexicon, transforms)
        hypothesis_tokens = preprocess_sentence(problem.hypothesis, lexicon, transforms)
        try:
            premise_ps = polarize(parse_fragment(premise_tokens, lexicon))
        except (NoParseError, OovError) as exc:
            diagnostics.append(f"{problem.id}: premise outside fragment: {exc}")
            continue
        kb = build_kb(
            premise_ps,
            tuple(t.lemma for t in hypothesis_tokens),
            resource,
            lexicon=lexicon,
        )
        base = expand(premise_ps, kb, config, lexicon)
        premise = premise_ps.lemmas()
        for sentence, proof in base.entailments.items():
            if sentence == premise:
                continue
            key = (premise, sentence, NliLabel.ENTAIL)
            if key in seen:
                continue
            seen.add(key)
            pairs.append(GeneratedPair(premise, sentence, NliLabel.ENTAIL, problem.id, len(proof.steps)))
        for sentence, proof in base.contradictions.items():
            key = (premise, sentence, NliLabel.CONTRADICT)
            if key in seen:
                continue
            seen.add(key)
            pairs.append(GeneratedPair(premise, sentence, NliLabel.CONTRADICT, problem.id, len(proof.steps)))
    return pairs, diagnostics


def has_repeated_bigram(sentence: Sequence[str]) -> bool:
    return any(a == b for a, b in zip(sentence, sentence[1:]))


def filter_repeated_bigrams(pairs: Iterable[GeneratedPair]) -> List[GeneratedPair]:
    """Drop pairs whose premise or hypothesis repeats a word back to back."""
    return [
        pair
        for pair in pairs
        if not has_repeated_bigram(pair.premise) and not has_repeated_bigram(pair.hypothesis)
    ]


def apply_filters(
    pairs: Iterable[GeneratedPair],
    extra_filters: Sequence[Callable[[GeneratedPair], bool]] = (),
) -> List[GeneratedPair]:
    """Bigram filter plus any user-supplied keep-predicates."""
    kept = filter_repeated_bigrams(pairs)
    for keep in extra_filters:
        kept = [pair for pair in kept if keep(pair)]
    return kept


def sample_fraction(pairs: Sequence[GeneratedPair], fraction: float, seed: int = 0) -> List[GeneratedPair]:
    """Seeded uniform sample of floor(fraction * n) pairs, original order kept."""
    if fraction == 1.0:
        return list(pairs)
    count = int(fraction * len(pairs))
    rng = random.Random(seed)
    chosen = sorted(rng.sample(range(len(pairs)), count))
    return [pairs[i] for i in chosen]


EXPORT_HEADER = ["pair_ID", "sentence_A", "sentence_B", "entailment_label", "source_id", "depth"]


def export_pairs(pairs: Sequence[GeneratedPair], destination) -> None:
    """Write the TSV (header always present); atomic via temp file + rename."""
    destination = os.fspath(destination)
    directory = os.path.dirname(destination) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, delimiter="\t", lineterminator="\n")
            writer.writerow(EXPORT_HEADER)
            for i, pair in enumerate(pairs, start=1):
                writer.writerow(
                    [
                        str(i),
                        " ".join(pair.premise),
                        " ".join(pair.hypothesis),
                        pair.label.to_judgment(),
                        pair.source_id,
                        str(pair.depth),
                    ]
                )
        os.replace(tmp, destination)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
