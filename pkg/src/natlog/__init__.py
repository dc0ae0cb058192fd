"""Monotonicity-based natural logic: polarity tagging, replacement generation,
search-based entailment classification, data augmentation, and evaluation."""

from .core import (
    Edit,
    EditDirection,
    Mono,
    NliLabel,
    Polarity,
    ProblemRecord,
    Proof,
    ProofStep,
    Relation,
    RelationKind,
    Token,
    compose,
    parse_polarized,
    render_polarized,
)
from .engine import (
    ClassifyResult,
    SearchConfig,
    SentenceBase,
    classify,
    expand,
    generate_contradictions,
    generate_entailments,
    search,
    sentence_equivalent,
)
from .kb import KnowledgeBase, LexicalResource, build_kb, derive_phrase_relations, extract_from_premise
from .polarizer import PolarizedSentence, polarity_of_span, polarize
from .preprocess import (
    TransformConfig,
    existential_to_base,
    lemmatize,
    lexical_rewrites,
    passive_to_active,
    preprocess_sentence,
    tag_tokens,
)
from .syntax import Category, Lexicon, load_derivation, parse_category, parse_fragment, yield_of

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
