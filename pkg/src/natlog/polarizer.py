"""Arrow tagging: assign a polarity to every token and constituent.

The root of a derivation is upward. At each application node the function
child keeps the node's polarity while the argument child receives the
composition of the node's polarity with the monotonicity mark on the
function's argument slot. A token's polarity is the polarity of its leaf.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .core import Polarity, Token, compose, render_polarized
from .errors import NotAConstituentError
from .syntax import Apply, Category, Derivation, Leaf, derivation_to_document

Span = Tuple[int, int]


@dataclass(frozen=True)
class Constituent:
    span: Span
    category: Category
    polarity: Polarity


@dataclass(frozen=True)
class PolarizedSentence:
    tokens: Tuple[Token, ...]
    token_polarity: Tuple[Polarity, ...]
    constituents: Tuple[Constituent, ...]
    source: Derivation

    def lemmas(self) -> Tuple[str, ...]:
        return tuple(tok.lemma for tok in self.tokens)

    def units(self) -> Tuple[Tuple[str, Polarity], ...]:
        return tuple(zip(self.lemmas(), self.token_polarity))

    def render(self) -> str:
        return render_polarized(self.units())

    def spans(self) -> Dict[Span, Constituent]:
        return {c.span: c for c in self.constituents}


def polarize(derivation: Derivation) -> PolarizedSentence:
    """Tag every node of ``derivation`` with a polarity, starting upward."""
    constituents: List[Constituent] = []
    token_pol: Dict[int, Polarity] = {}
    tokens: Dict[int, Token] = {}

    def walk(node: Derivation, polarity: Polarity, offset: int) -> Span:
        if isinstance(node, Leaf):
            span = (offset, offset + 1)
            tokens[offset] = node.token
            token_pol[offset] = polarity
            constituents.append(Constituent(span, node.cat, polarity))
            return span
        fn_pol = polarity
        arg_pol = compose(polarity, node.fn.cat.slot_mono)
        first, second = node.children_in_order
        first_pol = fn_pol if first is node.fn else arg_pol
        second_pol = fn_pol if second is node.fn else arg_pol
        left_span = walk(first, first_pol, offset)
        right_span = walk(second, second_pol, left_span[1])
        span = (left_span[0], right_span[1])
        constituents.append(Constituent(span, node.cat, polarity))
        return span

    walk(derivation, Polarity.UP, 0)
    ordered = tuple(tokens[i] for i in range(len(tokens)))
    pols = tuple(token_pol[i] for i in range(len(tokens)))
    constituents.sort(key=lambda c: (c.span[0], -c.span[1]))
    return PolarizedSentence(ordered, pols, tuple(constituents), derivation)


def polarity_of_span(sentence: PolarizedSentence, span: Span) -> Polarity:
    """Polarity of a constituent span (single tokens are leaf constituents)."""
    for constituent in sentence.constituents:
        if constituent.span == tuple(span):
            return constituent.polarity
    raise NotAConstituentError(f"span {span} is not a constituent of {' '.join(sentence.lemmas())!r}")


def polarized_to_document(sentence: PolarizedSentence) -> dict:
    """Derivation document with a ``pol`` arrow on every node."""
    pols: Dict[int, Polarity] = {}

    def walk(node: Derivation, polarity: Polarity) -> None:
        pols[id(node)] = polarity
        if isinstance(node, Apply):
            walk(node.fn, polarity)
            walk(node.arg, compose(polarity, node.fn.cat.slot_mono))

    walk(sentence.source, Polarity.UP)
    return derivation_to_document(sentence.source, polarities=pols)
