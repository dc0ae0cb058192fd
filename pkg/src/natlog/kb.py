"""Build and query the pair-scoped knowledge base of subset and disjointness facts.

The base always contains the hard-coded quantifier chains

    every = all = each <= most <= many <= a_few = several <= some = a
    the <= some = a

plus the disjoint pairs on/off and up/down. Lexical-resource relations are
admitted only when both sides occur in the current premise-hypothesis pair,
which sidesteps word-sense errors. Phrase relations (adj+n <= n, n+PP <= n,
n+RelCl <= n, VP+AdvP/PP <= VP) are read off the premise's constituents,
and premises of the shape "every n1 be a n2" contribute n1 <= n2.

The subset order is queried through its reflexive-transitive closure,
computed eagerly at build time (relation sets are tiny).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .core import Phrase, Provenance, Relation, RelationKind
from .data import default_resource_path
from .errors import BuildError, SchemaError
from .syntax import (
    POS_ADJ,
    POS_ADV,
    POS_VERB_I,
    Apply,
    Leaf,
    Lexicon,
)

HARD_CODED_EQUALITIES = [
    ("every", "all"),
    ("all", "each"),
    ("a_few", "several"),
    ("some", "a"),
]
HARD_CODED_CHAIN = [
    ("every", "most"),
    ("most", "many"),
    ("many", "a_few"),
    ("several", "some"),
    ("the", "some"),
]
HARD_CODED_PERP = [("on", "off"), ("up", "down")]


def hard_coded_relations() -> List[Relation]:
    rels = []
    for a, b in HARD_CODED_EQUALITIES:
        rels.append(Relation.leq((a,), (b,), Provenance.HARD_CODED))
        rels.append(Relation.leq((b,), (a,), Provenance.HARD_CODED))
    for a, b in HARD_CODED_CHAIN:
        rels.append(Relation.leq((a,), (b,), Provenance.HARD_CODED))
    for a, b in HARD_CODED_PERP:
        rels.append(Relation.perp((a,), (b,), Provenance.HARD_CODED))
    return rels


@dataclass(frozen=True)
class LexicalResource:
    """Per-lemma hypernyms, antonyms, synonyms (a small curated table)."""

    hypernyms: Dict[str, FrozenSet[str]]
    antonyms: Dict[str, FrozenSet[str]]
    synonyms: Dict[str, FrozenSet[str]]

    def __post_init__(self):
        for lemma, ants in self.antonyms.items():
            if lemma in ants:
                raise ValueError(f"{lemma!r} cannot be its own antonym")

    @staticmethod
    def empty() -> "LexicalResource":
        return LexicalResource({}, {}, {})

    @staticmethod
    def from_rows(rows: Iterable[Tuple[str, str, str]]) -> "LexicalResource":
        hyp: Dict[str, Set[str]] = {}
        ant: Dict[str, Set[str]] = {}
        syn: Dict[str, Set[str]] = {}
        for lemma, rel, target in rows:
            if rel == "hyp":
                hyp.setdefault(lemma, set()).add(target)
            elif rel == "ant":
                ant.setdefault(lemma, set()).add(target)
                ant.setdefault(target, set()).add(lemma)
            elif rel == "syn":
                syn.setdefault(lemma, set()).add(target)
                syn.setdefault(target, set()).add(lemma)
            else:
                raise SchemaError(f"unknown lexical relation {rel!r}")
        freeze = lambda d: {k: frozenset(v) for k, v in d.items()}
        return LexicalResource(freeze(hyp), freeze(ant), freeze(syn))

    @staticmethod
    def from_tsv(path) -> "LexicalResource":
        rows = []
        with open(path, encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise SchemaError(f"lexical resource line {lineno}: expected 3 columns")
                rows.append(tuple(parts))
        return LexicalResource.from_rows(rows)

    @staticmethod
    def bundled() -> "LexicalResource":
        return LexicalResource.from_tsv(default_resource_path())


class KnowledgeBase:
    """Immutable after construction; queries go through the eager closure."""

    def __init__(
        self,
        relations: Sequence[Relation],
        insertable_adjectives: Sequence[str] = (),
        insertable_adverbs: Sequence[str] = (),
        insertable_relcl_verbs: Sequence[str] = (),
        validate: bool = True,
    ):
        self.relations: Tuple[Relation, ...] = tuple(relations)
        self.insertable_adjectives = tuple(sorted(set(insertable_adjectives)))
        self.insertable_adverbs = tuple(sorted(set(insertable_adverbs)))
        self.insertable_relcl_verbs = tuple(sorted(set(insertable_relcl_verbs)))
        self._leq_edges: Set[Tuple[Phrase, Phrase]] = set()
        self._perp: Set[Tuple[Phrase, Phrase]] = set()
        self.provenance: Dict[Tuple[str, Phrase, Phrase], Provenance] = {}
        for rel in self.relations:
            key = (rel.kind.value, rel.lhs, rel.rhs)
            self.provenance.setdefault(key, rel.provenance)
            if rel.kind is RelationKind.LEQ:
                self._leq_edges.add((rel.lhs, rel.rhs))
            else:
                self._perp.add((rel.lhs, rel.rhs))
                self._perp.add((rel.rhs, rel.lhs))
        self._above: Dict[Phrase, Set[Phrase]] = {}
        self._below: Dict[Phrase, Set[Phrase]] = {}
        self._compute_closure()
        if validate:
            self._check_consistency()

    def _compute_closure(self) -> None:
        nodes = set()
        for a, b in self._leq_edges:
            nodes.add(a)
            nodes.add(b)
        above = {n: {n} for n in nodes}
        for a, b in self._leq_edges:
            above[a].add(b)
        changed = True
        while changed:
            changed = False
            for n in nodes:
                extra = set()
                for m in above[n]:
                    extra |= above.get(m, set())
                if not extra <= above[n]:
                    above[n] |= extra
                    changed = True
        self._above = above
        below: Dict[Phrase, Set[Phrase]] = {n: set() for n in nodes}
        for a in nodes:
            for b in above[a]:
                below.setdefault(b, set()).add(a)
        self._below = below

    def _check_consistency(self) -> None:
        for a, b in self._perp:
            if a == b:
                raise BuildError(f"phrase {a} marked contradictory to itself")
            if b in self._above.get(a, ()) and a in self._above.get(b, ()):
                raise BuildError(f"equality chain between {a} and {b} conflicts with a perp link")

    # -- queries --------------------------------------------------------

    def query_leq(self, a: Sequence[str], b: Sequence[str]) -> bool:
        a, b = tuple(a), tuple(b)
        if a == b:
            return True
        return b in self._above.get(a, ())

    def query_perp(self, a: Sequence[str], b: Sequence[str]) -> bool:
        return (tuple(a), tuple(b)) in self._perp

    def above(self, phrase: Sequence[str]) -> List[Phrase]:
        """Phrases strictly above ``phrase`` in the closure (bigger sets)."""
        phrase = tuple(phrase)
        return sorted(p for p in self._above.get(phrase, ()) if p != phrase)

    def below(self, phrase: Sequence[str]) -> List[Phrase]:
        phrase = tuple(phrase)
        return sorted(p for p in self._below.get(phrase, ()) if p != phrase)

    def perp_of(self, phrase: Sequence[str]) -> List[Phrase]:
        phrase = tuple(phrase)
        return sorted(b for a, b in self._perp if a == phrase)

    def leq_pairs(self) -> List[Tuple[Phrase, Phrase]]:
        return sorted(self._leq_edges)

    def perp_pairs(self) -> List[Tuple[Phrase, Phrase]]:
        seen = set()
        out = []
        for a, b in sorted(self._perp):
            if (b, a) in seen:
                continue
            seen.add((a, b))
            out.append((a, b))
        return out

    @staticmethod
    def from_relations(relations: Sequence[Relation], validate: bool = True, **kwargs) -> "KnowledgeBase":
        return KnowledgeBase(relations, validate=validate, **kwargs)


def derive_phrase_relations(sentence) -> List[Relation]:
    """Modifier-dropping relations read off the constituent tree.

    Emits whole <= head for every application of an intersective modifier:
    adj+n <= n, n+PP <= n, n+RelCl <= n, VP+AdvP/PP <= VP. Auxiliary
    wrappers (be, do) and downward wrappers (not) are skipped.
    """
    lemmas = sentence.lemmas()
    relations: List[Relation] = []

    def span_of(node, offset):
        if isinstance(node, Leaf):
            return (offset, offset + 1)
        first, second = node.children_in_order
        left = span_of_cached(first, offset)
        right = span_of_cached(second, left[1])
        return (left[0], right[1])

    spans: Dict[int, Tuple[int, int]] = {}

    def span_of_cached(node, offset):
        sp = span_of(node, offset)
        spans[id(node)] = sp
        return sp

    span_of_cached(sentence.source, 0)

    def walk(node):
        if isinstance(node, Leaf):
            return
        fn, arg = node.fn, node.arg
        walk(fn)
        walk(arg)
        cat = fn.cat
        if cat.is_atomic:
            return
        is_modifier = cat.result.skeleton() == cat.argument.skeleton()
        if not is_modifier:
            return
        if isinstance(fn, Leaf) and fn.lemma in ("be", "do", "not"):
            return
        if cat.slot_mono.value == "-":
            return
        whole = spans[id(node)]
        head = spans[id(arg)]
        whole_phrase = tuple(lemmas[whole[0] : whole[1]])
        head_phrase = tuple(lemmas[head[0] : head[1]])
        if whole_phrase != head_phrase:
            relations.append(Relation.leq(whole_phrase, head_phrase, Provenance.PHRASE_RULE))

    walk(sentence.source)
    # Deterministic order, duplicates removed.
    seen = set()
    out = []
    for rel in relations:
        key = (rel.lhs, rel.rhs)
        if key not in seen:
            seen.add(key)
            out.append(rel)
    return out


def extract_from_premise(premise) -> List[Relation]:
    """From premises of the shape "every n1 be a n2", extract n1 <= n2."""
    lemmas = premise.lemmas()
    if len(lemmas) == 5 and lemmas[0] == "every" and lemmas[2] == "be" and lemmas[3] == "a":
        n1, n2 = lemmas[1], lemmas[4]
        if n1 != n2:
            return [Relation.leq((n1,), (n2,), Provenance.PREMISE_EXTRACTION)]
    return []


def resource_relations(resource: LexicalResource, vocabulary: Set[str]) -> List[Relation]:
    """Resource relations restricted to the pair vocabulary."""
    rels: List[Relation] = []
    for lemma in sorted(vocabulary):
        for target in sorted(resource.hypernyms.get(lemma, ())):
            if target in vocabulary:
                rels.append(Relation.leq((lemma,), (target,), Provenance.LEXICAL_RESOURCE))
        for target in sorted(resource.synonyms.get(lemma, ())):
            if target in vocabulary:
                rels.append(Relation.leq((lemma,), (target,), Provenance.LEXICAL_RESOURCE))
                rels.append(Relation.leq((target,), (lemma,), Provenance.LEXICAL_RESOURCE))
        for target in sorted(resource.antonyms.get(lemma, ())):
            if target in vocabulary:
                rels.append(Relation.perp((lemma,), (target,), Provenance.LEXICAL_RESOURCE))
    return rels


def build_kb(
    premise,
    hypothesis: Sequence[str],
    resource: Optional[LexicalResource] = None,
    extra: Sequence[Relation] = (),
    lexicon: Optional[Lexicon] = None,
) -> KnowledgeBase:
    """Assemble the knowledge base for one premise-hypothesis pair.

    ``premise`` is a polarized sentence; ``hypothesis`` a lemma sequence.
    ``extra`` relations are added verbatim (user relations, or phrase
    relations derived from a parsed hypothesis).
    """
    if resource is None:
        resource = LexicalResource.empty()
    if lexicon is None:
        from .data import default_lexicon

        lexicon = default_lexicon()
    vocabulary = set(premise.lemmas()) | set(hypothesis)
    relations: List[Relation] = []
    relations.extend(hard_coded_relations())
    relations.extend(resource_relations(resource, vocabulary))
    relations.extend(derive_phrase_relations(premise))
    relations.extend(extract_from_premise(premise))
    relations.extend(extra)
    adjectives = sorted(l for l in vocabulary if lexicon.has_pos(l, POS_ADJ))
    adverbs = sorted(l for l in vocabulary if lexicon.has_pos(l, POS_ADV))
    relcl_verbs = sorted(l for l in vocabulary if lexicon.has_pos(l, POS_VERB_I))
    return KnowledgeBase(
        relations,
        insertable_adjectives=adjectives,
        insertable_adverbs=adverbs,
        insertable_relcl_verbs=relcl_verbs,
    )


def load_relations_tsv(path) -> List[Relation]:
    """User relations file: columns kind (LEQ|PERP), lhs, rhs; '_' joins words."""
    rels = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise SchemaError(f"relations line {lineno}: expected 3 columns")
            kind, lhs, rhs = parts
            lhs_phrase = tuple(lhs.split("_")) if lhs not in ("a_few", "next_to") else (lhs,)
            rhs_phrase = tuple(rhs.split("_")) if rhs not in ("a_few", "next_to") else (rhs,)
            if kind == "LEQ":
                rels.append(Relation.leq(lhs_phrase, rhs_phrase, Provenance.USER_SUPPLIED))
            elif kind == "PERP":
                rels.append(Relation.perp(lhs_phrase, rhs_phrase, Provenance.USER_SUPPLIED))
            else:
                raise SchemaError(f"relations line {lineno}: unknown kind {kind!r}")
    return rels
