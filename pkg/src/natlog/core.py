"""Shared domain vocabulary: polarity algebra, tokens, labels, relations, proofs.

Polarity marks how a sentence position behaves under replacement:

* ``UP`` (rendered ``↑``): replacing the span with something denoting a
  bigger set preserves truth.
* ``DOWN`` (``↓``): replacing with something denoting a smaller set
  preserves truth.
* ``FLAT`` (``=``): neither direction is licensed.

``Mono`` is the corresponding property of a function's argument slot;
``compose`` projects a parent polarity through a slot.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

Phrase = Tuple[str, ...]

UP_ARROW = "↑"
DOWN_ARROW = "↓"
FLAT_ARROW = "="


class Polarity(enum.Enum):
    UP = "up"
    DOWN = "down"
    FLAT = "flat"

    def render(self) -> str:
        return _POLARITY_ARROW[self]

    @staticmethod
    def parse(arrow: str) -> "Polarity":
        try:
            return _ARROW_POLARITY[arrow]
        except KeyError:
            raise ValueError(f"not a polarity arrow: {arrow!r}") from None


_POLARITY_ARROW = {Polarity.UP: UP_ARROW, Polarity.DOWN: DOWN_ARROW, Polarity.FLAT: FLAT_ARROW}
_ARROW_POLARITY = {v: k for k, v in _POLARITY_ARROW.items()}


class Mono(enum.Enum):
    """Monotonicity of a function's argument slot."""

    UP_SLOT = "+"
    DOWN_SLOT = "-"
    FLAT_SLOT = "="

    def render(self) -> str:
        return self.value

    @staticmethod
    def parse(mark: str) -> "Mono":
        for m in Mono:
            if m.value == mark:
                return m
        raise ValueError(f"not a monotonicity mark: {mark!r}")


def compose(parent: Polarity, slot: Mono) -> Polarity:
    """Project ``parent`` polarity through an argument slot.

    Flat absorbs in both directions; a down slot flips up/down.
    """
    if parent is Polarity.FLAT or slot is Mono.FLAT_SLOT:
        return Polarity.FLAT
    if slot is Mono.UP_SLOT:
        return parent
    return Polarity.DOWN if parent is Polarity.UP else Polarity.UP


class NliLabel(enum.Enum):
    ENTAIL = "E"
    CONTRADICT = "C"
    NEUTRAL = "N"

    @staticmethod
    def from_judgment(value: str) -> "NliLabel":
        try:
            return _JUDGMENT_LABEL[value.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown entailment judgment: {value!r}") from None

    def to_judgment(self) -> str:
        return _LABEL_JUDGMENT[self]


_JUDGMENT_LABEL = {
    "ENTAILMENT": NliLabel.ENTAIL,
    "CONTRADICTION": NliLabel.CONTRADICT,
    "NEUTRAL": NliLabel.NEUTRAL,
    "E": NliLabel.ENTAIL,
    "C": NliLabel.CONTRADICT,
    "N": NliLabel.NEUTRAL,
}
_LABEL_JUDGMENT = {
    NliLabel.ENTAIL: "ENTAILMENT",
    NliLabel.CONTRADICT: "CONTRADICTION",
    NliLabel.NEUTRAL: "NEUTRAL",
}


@dataclass(frozen=True)
class Token:
    """One sentence position: lowercase lemma plus the original surface form."""

    lemma: str
    surface: str
    index: int

    def __post_init__(self):
        if not self.lemma or any(ch.isspace() for ch in self.lemma):
            raise ValueError(f"lemma must be nonempty and whitespace-free: {self.lemma!r}")
        if self.index < 0:
            raise ValueError("token index must be >= 0")


class RelationKind(enum.Enum):
    LEQ = "LEQ"
    PERP = "PERP"


class Provenance(enum.Enum):
    HARD_CODED = "hard-coded"
    LEXICAL_RESOURCE = "lexical-resource"
    PHRASE_RULE = "phrase-rule"
    PREMISE_EXTRACTION = "premise-extraction"
    USER_SUPPLIED = "user-supplied"


@dataclass(frozen=True)
class Relation:
    """``lhs <= rhs`` (denotation subset) or ``lhs ⊥ rhs`` (disjoint denotations)."""

    kind: RelationKind
    lhs: Phrase
    rhs: Phrase
    provenance: Provenance = Provenance.USER_SUPPLIED

    def __post_init__(self):
        if not self.lhs or not self.rhs:
            raise ValueError("relation phrases must be nonempty")

    @staticmethod
    def leq(lhs: Sequence[str], rhs: Sequence[str], provenance=Provenance.USER_SUPPLIED) -> "Relation":
        return Relation(RelationKind.LEQ, tuple(lhs), tuple(rhs), provenance)

    @staticmethod
    def perp(lhs: Sequence[str], rhs: Sequence[str], provenance=Provenance.USER_SUPPLIED) -> "Relation":
        return Relation(RelationKind.PERP, tuple(lhs), tuple(rhs), provenance)


class EditDirection(enum.Enum):
    ENTAILING = "entailing"
    CONTRADICTING = "contradicting"


@dataclass(frozen=True)
class Edit:
    """One replacement: ``before`` at ``span`` becomes ``after``.

    ``span`` is a half-open token index range on the sentence the edit
    applies to; an empty span encodes pure insertion.
    """

    span: Tuple[int, int]
    before: Phrase
    after: Phrase
    rule: str
    direction: EditDirection

    def __post_init__(self):
        start, end = self.span
        if start < 0 or end < start:
            raise ValueError(f"invalid span: {self.span}")
        if self.before == self.after:
            raise ValueError("edit must change the sentence")

    def apply(self, sentence: Sequence[str]) -> Phrase:
        start, end = self.span
        if end > len(sentence):
            raise ValueError(f"span {self.span} out of range for sentence of length {len(sentence)}")
        if tuple(sentence[start:end]) != self.before:
            raise ValueError(
                f"edit expects {self.before} at {self.span}, found {tuple(sentence[start:end])}"
            )
        return tuple(sentence[:start]) + self.after + tuple(sentence[end:])


@dataclass(frozen=True)
class ProofStep:
    before: Phrase
    edit: Edit
    after: Phrase


@dataclass(frozen=True)
class Proof:
    """An ordered chain of edits from a premise to a matched sentence."""

    steps: Tuple[ProofStep, ...]
    verdict: NliLabel

    def __post_init__(self):
        for step in self.steps:
            if step.edit.apply(step.before) != step.after:
                raise ValueError("proof step does not replay")
        for prev, nxt in zip(self.steps, self.steps[1:]):
            if prev.after != nxt.before:
                raise ValueError("proof steps are not chained")

    @property
    def start(self) -> Optional[Phrase]:
        return self.steps[0].before if self.steps else None

    @property
    def end(self) -> Optional[Phrase]:
        return self.steps[-1].after if self.steps else None

    def replay(self, start: Sequence[str]) -> Phrase:
        sentence = tuple(start)
        for step in self.steps:
            sentence = step.edit.apply(sentence)
        return sentence

    def render(self) -> str:
        lines = [
            "{} --[{}: {}:{} '{}'->'{}']--> {}".format(
                " ".join(step.before),
                step.edit.rule,
                step.edit.span[0],
                step.edit.span[1],
                " ".join(step.edit.before) or "(nothing)",
                " ".join(step.edit.after) or "(nothing)",
                " ".join(step.after),
            )
            for step in self.steps
        ]
        lines.append(f"verdict: {self.verdict.to_judgment()}")
        return "\n".join(lines)


@dataclass(frozen=True)
class ProblemRecord:
    """One premise-hypothesis classification problem."""

    id: str
    premise: str
    hypothesis: str
    gold: Optional[NliLabel] = None

    def __post_init__(self):
        if not self.premise.strip() or not self.hypothesis.strip():
            raise ValueError(f"problem {self.id!r}: premise and hypothesis must be nonempty")


def render_polarized(units: Iterable[Tuple[str, Polarity]]) -> str:
    """Serialize (lemma, polarity) pairs as ``lemma↑ lemma↓ lemma=`` text."""
    return " ".join(f"{lemma}{pol.render()}" for lemma, pol in units)


def parse_polarized(text: str) -> Tuple[Tuple[str, Polarity], ...]:
    """Inverse of :func:`render_polarized`."""
    units = []
    for chunk in text.split():
        lemma, arrow = chunk[:-1], chunk[-1]
        if not lemma:
            raise ValueError(f"malformed polarized unit: {chunk!r}")
        units.append((lemma, Polarity.parse(arrow)))
    return tuple(units)
