"""Generation and search: produce entailments and contradictions, find the hypothesis.

Entailments come from polarity-licensed replacement: upward spans are
replaced by knowledge-base phrases denoting bigger sets, downward spans by
phrases denoting smaller sets or by inserted modifiers (adjectives,
adverbs, relative clauses, duplicated prepositional phrases). Flat spans
are never touched.

Contradictions come from four rules:

1. a sentence-initial "no" becomes "some"/"a" and vice versa;
2. a direct object's determiner in {a, some, the, every} becomes "no",
   and an object "no" becomes "some"/"a";
3. the main verb is negated ("not" after the copula, "do not" before a
   lexical verb), or an existing negation is removed;
4. a span is swapped with a knowledge-base contradictory phrase
   (on/off, antonyms from the lexical resource).

Rules 2 and 3 only fire for subject quantifiers under which verb-phrase
denial is genuinely inconsistent with the original (existential subjects
read as coreferential, plus every/all/each/any/no/the/most); rule 4 only
under coreferential (existential or bare) subjects. Rule 1 is safe for
any subject.

The search is depth-first with re-parsing and re-polarization at every
node, a visited set, and deterministic expansion order (span, then
replacement).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .core import (
    Edit,
    EditDirection,
    NliLabel,
    Phrase,
    Proof,
    ProofStep,
)
from .errors import NatlogError, NoParseError, OovError
from .kb import KnowledgeBase, LexicalResource, build_kb, derive_phrase_relations
from .polarizer import PolarizedSentence, polarize
from .preprocess import TransformConfig, preprocess_sentence, strip_ing
from .syntax import Apply, Derivation, Leaf, Lexicon, fuse_multiwords, parse_fragment
from .core import Polarity

REFERENTIAL_SUBJECTS = {"a", "some", "the"}  # plus bare subjects
UNIVERSAL_SUBJECTS = {"every", "all", "each", "any", "no"}
RULE23_SUBJECTS = {"a", "some", "every", "all", "each", "any", "no", "the", "most"}
OBJECT_FLIP_TO_NO = {"a", "some", "the", "every"}
_SELF_ROOT = object()


@dataclass(frozen=True)
class SearchConfig:
    depth: int = 2
    max_generated: int = 10000
    equivalence_set: FrozenSet[str] = frozenset({"a", "be", "ing"})

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("search depth must be >= 1")


@dataclass
class SentenceBase:
    """Generated entailments and contradictions, each with its proof."""

    entailments: Dict[Phrase, Proof] = field(default_factory=dict)
    contradictions: Dict[Phrase, Proof] = field(default_factory=dict)
    cap_exceeded: bool = False
    unparsed: List[Phrase] = field(default_factory=list)

    def size(self) -> int:
        return len(self.entailments) + len(self.contradictions)


def sentence_equivalent(
    s1: Sequence[str], s2: Sequence[str], equivalence_set: FrozenSet[str] = frozenset({"a", "be", "ing"})
) -> bool:
    """True when the sentences differ only in equivalence-set tokens.

    Tokens in the set are deleted; when the set contains "ing" the
    progressive suffix is also neutralized, so "talk" matches "talking".
    """
    strip_suffix = "ing" in equivalence_set

    def normalize(tokens):
        out = []
        for tok in tokens:
            if tok in equivalence_set:
                continue
            out.append(strip_ing(tok) if strip_suffix else tok)
        return tuple(out)

    return normalize(s1) == normalize(s2)


# ---------------------------------------------------------------------------
# Structure helpers (engine-local, independent of the oracle's analysis)
# ---------------------------------------------------------------------------


def _node_spans(derivation: Derivation) -> Dict[int, Tuple[int, int]]:
    spans: Dict[int, Tuple[int, int]] = {}

    def walk(node: Derivation, offset: int) -> Tuple[int, int]:
        if isinstance(node, Leaf):
            spans[id(node)] = (offset, offset + 1)
            return spans[id(node)]
        first, second = node.children_in_order
        left = walk(first, offset)
        right = walk(second, left[1])
        spans[id(node)] = (left[0], right[1])
        return spans[id(node)]

    walk(derivation, 0)
    return spans


@dataclass
class _Structure:
    subject_det: Optional[str]  # None = bare subject
    vp: Derivation
    vp_span: Tuple[int, int]
    be_index: Optional[int]
    not_span: Optional[Tuple[int, int]]  # covers "do not" when applicable
    verb_index: Optional[int]
    object_det: Optional[Tuple[str, int]]  # (lemma, token index)


def _structure_of(sentence: PolarizedSentence) -> Optional[_Structure]:
    root = sentence.source
    if not isinstance(root, Apply) or root.cat.skeleton() != "S":
        return None
    spans = _node_spans(root)
    if root.fn.cat.skeleton() == "S/(S\\NP)":
        det = root.fn.fn.lemma if isinstance(root.fn, Apply) and isinstance(root.fn.fn, Leaf) else None
        vp = root.arg
    else:
        det = None
        vp = root.fn

    be_index = None
    not_span = None
    verb_index = None
    object_det = None

    def walk(node: Derivation):
        nonlocal be_index, not_span, verb_index, object_det
        if isinstance(node, Leaf):
            return
        # Do not descend into nominal material (relative clauses etc.).
        for child in node.children_in_order:
            if child.cat.skeleton() in ("NP", "N"):
                continue
            if isinstance(child, Leaf):
                skel = child.cat.skeleton()
                if child.lemma == "be" and be_index is None:
                    be_index = spans[id(child)][0]
                elif child.lemma == "not" and not_span is None:
                    start = spans[id(child)][0]
                    not_span = (start, start + 1)
                elif (
                    skel in ("S\\NP", "(S\\NP)/NP")
                    and child.lemma not in ("be", "do", "not")
                    and verb_index is None
                ):
                    verb_index = spans[id(child)][0]
            else:
                walk(child)
        if (
            isinstance(node.fn, Leaf)
            and node.fn.cat.skeleton() == "(S\\NP)/NP"
            and node.fn.lemma not in ("be", "do")
            and object_det is None
            and isinstance(node.arg, Apply)
            and isinstance(node.arg.fn, Leaf)
            and node.arg.fn.cat.skeleton() == "NP/N"
        ):
            object_det = (node.arg.fn.lemma, spans[id(node.arg.fn)][0])

    if isinstance(vp, Leaf):
        if vp.lemma not in ("be", "do", "not"):
            verb_index = spans[id(vp)][0]
    else:
        walk(vp)
    lemmas = sentence.lemmas()
    if not_span is not None:
        start = not_span[0]
        if start > 0 and lemmas[start - 1] == "do":
            not_span = (start - 1, start + 1)
    return _Structure(det, vp, spans[id(vp)], be_index, not_span, verb_index, object_det)


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------


def _emit(
    out: List[Tuple[Phrase, Edit]],
    seen: Set[Phrase],
    lemmas: Tuple[str, ...],
    span: Tuple[int, int],
    after: Phrase,
    rule: str,
    direction: EditDirection,
) -> None:
    before = tuple(lemmas[span[0] : span[1]])
    if before == after:
        return
    edit = Edit(span=span, before=before, after=after, rule=rule, direction=direction)
    sentence = edit.apply(lemmas)
    if sentence in seen or sentence == lemmas:
        return
    seen.add(sentence)
    out.append((sentence, edit))


def generate_entailments(
    sentence: PolarizedSentence, kb: KnowledgeBase, lexicon: Optional[Lexicon] = None
) -> List[Tuple[Phrase, Edit]]:
    """One-replacement entailments of a polarized sentence.

    Insertions are validated by re-parsing: the candidate is kept only when
    the inserted tokens land in a downward position of the new sentence
    (insertion under a nested negation would broaden, not narrow, and the
    parser may attach a span elsewhere than intended).
    """
    lemmas = sentence.lemmas()
    out: List[Tuple[Phrase, Edit]] = []
    seen: Set[Phrase] = set()
    inserted: List[Tuple[Phrase, Edit]] = []
    for constituent in sentence.constituents:
        span = constituent.span
        phrase = tuple(lemmas[span[0] : span[1]])
        skel = constituent.category.skeleton()
        if constituent.polarity is Polarity.UP:
            for other in kb.above(phrase):
                _emit(out, seen, lemmas, span, other, "replace-up", EditDirection.ENTAILING)
        elif constituent.polarity is Polarity.DOWN:
            for other in kb.below(phrase):
                _emit(out, seen, lemmas, span, other, "replace-down", EditDirection.ENTAILING)
            if skel == "N" or (skel == "NP" and not _starts_with_det(sentence, span)):
                for adj in kb.insertable_adjectives:
                    _emit(inserted, seen, lemmas, (span[0], span[0]), (adj,), "insert-adj", EditDirection.ENTAILING)
                for verb in kb.insertable_relcl_verbs:
                    _emit(inserted, seen, lemmas, (span[1], span[1]), ("that", verb), "insert-relcl", EditDirection.ENTAILING)
            if skel == "S\\NP":
                for adv in kb.insertable_adverbs:
                    _emit(inserted, seen, lemmas, (span[1], span[1]), (adv,), "insert-adv", EditDirection.ENTAILING)
                for pp in _pp_phrases(sentence):
                    _emit(inserted, seen, lemmas, (span[1], span[1]), pp, "insert-pp", EditDirection.ENTAILING)
    if inserted:
        lexicon = _default(lexicon)
        for sent, edit in inserted:
            if _insertion_is_downward(sent, edit, lexicon):
                out.append((sent, edit))
    return out


def _insertion_is_downward(sentence: Phrase, edit: Edit, lexicon: Lexicon) -> bool:
    try:
        reparsed = polarize(parse_fragment(sentence, lexicon))
    except (NoParseError, OovError):
        return False
    start = edit.span[0]
    width = len(edit.after)
    if reparsed.lemmas() != sentence:
        return False
    return all(
        reparsed.token_polarity[i] is Polarity.DOWN for i in range(start, start + width)
    )


DET_LEMMAS = RULE23_SUBJECTS | {
    "few", "many", "several", "a_few",
    "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
}


def _starts_with_det(sentence: PolarizedSentence, span: Tuple[int, int]) -> bool:
    return sentence.lemmas()[span[0]] in DET_LEMMAS


def _pp_phrases(sentence: PolarizedSentence) -> List[Phrase]:
    lemmas = sentence.lemmas()
    phrases = []
    for constituent in sentence.constituents:
        skel = constituent.category.skeleton()
        if skel in ("N\\N", "NP\\NP", "(S\\NP)\\(S\\NP)", "PP"):
            phrase = tuple(lemmas[constituent.span[0] : constituent.span[1]])
            if phrase and phrase not in phrases:
                phrases.append(phrase)
    return sorted(phrases)


def generate_contradictions(
    sentence: PolarizedSentence, kb: KnowledgeBase, root_subject=_SELF_ROOT
) -> List[Tuple[Phrase, Edit]]:
    """Contradictory sentences by the four rules above.

    ``root_subject`` is the subject determiner of the search's root premise
    (None for a bare subject). A contradiction produced at a deeper node
    must contradict the root, so which rules fire depends on the root's
    subject class: under a referential root (a/some/the/bare) the topic is
    fixed and all rules apply; under a universal root (every/all/each/any/
    no) verb-phrase denial and quantifier flips remain safe but perp swaps
    do not; under any other root, rules 2-4 apply at the root only.
    """
    lemmas = sentence.lemmas()
    out: List[Tuple[Phrase, Edit]] = []
    seen: Set[Phrase] = set()
    structure = _structure_of(sentence)
    subject = structure.subject_det if structure is not None else None
    at_root = root_subject is _SELF_ROOT
    if at_root:
        root_subject = subject
    referential_root = root_subject is None or root_subject in REFERENTIAL_SUBJECTS
    universal_root = root_subject in UNIVERSAL_SUBJECTS

    # Rule 1: flip a sentence-initial no/some/a (safe under any root whose
    # truth settles whether the restrictor and scope intersect).
    first = lemmas[0]
    if first == "no":
        for repl in ("some", "a"):
            _emit(out, seen, lemmas, (0, 1), (repl,), "flip-subject-quantifier", EditDirection.CONTRADICTING)
    elif first in ("some", "a"):
        _emit(out, seen, lemmas, (0, 1), ("no",), "flip-subject-quantifier", EditDirection.CONTRADICTING)

    if structure is None:
        return out
    coupled = referential_root
    # Verb-phrase denial and object flips must contradict the root premise.
    # Referential roots fix the topic; universal roots keep the restrictor
    # narrowing only while the node subject is still universal (a weakened
    # existential subject may range outside the root's restrictor).
    rule23_ok = (subject is None or subject in RULE23_SUBJECTS) and (
        referential_root
        or (universal_root and subject in UNIVERSAL_SUBJECTS)
        or at_root
    )

    # Rule 2: flip the direct object's determiner to/from "no".
    if rule23_ok and structure.object_det is not None:
        det, index = structure.object_det
        if det in OBJECT_FLIP_TO_NO:
            _emit(out, seen, lemmas, (index, index + 1), ("no",), "flip-object-quantifier", EditDirection.CONTRADICTING)
        elif det == "no":
            for repl in ("some", "a"):
                _emit(out, seen, lemmas, (index, index + 1), (repl,), "flip-object-quantifier", EditDirection.CONTRADICTING)

    # Rule 3: negate the main verb, or remove the negation.
    if rule23_ok:
        if structure.not_span is not None:
            _emit(out, seen, lemmas, structure.not_span, (), "remove-negation", EditDirection.CONTRADICTING)
        elif structure.be_index is not None:
            pos = structure.be_index + 1
            _emit(out, seen, lemmas, (pos, pos), ("not",), "negate-verb", EditDirection.CONTRADICTING)
        elif structure.verb_index is not None:
            pos = structure.vp_span[0]
            _emit(out, seen, lemmas, (pos, pos), ("do", "not"), "negate-verb", EditDirection.CONTRADICTING)

    # Rule 4: swap a positively occurring span with a contradictory phrase.
    # Disjoint denotations only clash where the sentence asserts membership,
    # so only upward spans qualify (under negation both versions can hold).
    if coupled:
        for constituent in sentence.constituents:
            if constituent.polarity is not Polarity.UP:
                continue
            span = constituent.span
            phrase = tuple(lemmas[span[0] : span[1]])
            for other in kb.perp_of(phrase):
                _emit(out, seen, lemmas, span, other, "swap-contradictory", EditDirection.CONTRADICTING)
    return out


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------


class _CapExceeded(NatlogError):
    pass


class _Hit(Exception):
    def __init__(self, proof: Proof):
        self.proof = proof


class _Expander:
    def __init__(self, kb: KnowledgeBase, config: SearchConfig, lexicon: Lexicon,
                 matcher: Optional[Callable[[Phrase], bool]] = None):
        self.kb = kb
        self.config = config
        self.lexicon = lexicon
        self.matcher = matcher
        self.base = SentenceBase()
        self.visited: Set[Phrase] = set()
        self._parse_cache: Dict[Phrase, Optional[PolarizedSentence]] = {}
        self._root_subject = None

    def repolarize(self, lemmas: Phrase) -> Optional[PolarizedSentence]:
        if lemmas not in self._parse_cache:
            try:
                self._parse_cache[lemmas] = polarize(parse_fragment(lemmas, self.lexicon))
            except (NoParseError, OovError):
                self._parse_cache[lemmas] = None
        return self._parse_cache[lemmas]

    def _check_cap(self):
        if self.base.size() > self.config.max_generated:
            self.base.cap_exceeded = True
            raise _CapExceeded("sentence base exceeded max_generated")

    def run(self, premise_ps: PolarizedSentence) -> Optional[Proof]:
        premise = premise_ps.lemmas()
        structure = _structure_of(premise_ps)
        self._root_subject = structure.subject_det if structure is not None else None
        root_proof = Proof((), NliLabel.ENTAIL)
        self.base.entailments[premise] = root_proof
        self.visited.add(premise)
        self._parse_cache[premise] = premise_ps
        try:
            if self.matcher and self.matcher(premise):
                return root_proof
            self._expand(premise_ps, (), 0)
        except _Hit as hit:
            return hit.proof
        except _CapExceeded:
            pass
        return None

    def _expand(self, ps: PolarizedSentence, steps: Tuple[ProofStep, ...], depth: int) -> None:
        lemmas = ps.lemmas()
        root = _SELF_ROOT if depth == 0 else self._root_subject
        for sent, edit in generate_contradictions(ps, self.kb, root_subject=root):
            if sent in self.base.contradictions or sent in self.base.entailments:
                continue
            proof = Proof(steps + (ProofStep(lemmas, edit, sent),), NliLabel.CONTRADICT)
            self.base.contradictions[sent] = proof
            self._check_cap()
            if self.matcher and self.matcher(sent):
                raise _Hit(proof)
        if depth >= self.config.depth:
            return
        for sent, edit in generate_entailments(ps, self.kb):
            if sent in self.visited:
                continue
            self.visited.add(sent)
            proof = Proof(steps + (ProofStep(lemmas, edit, sent),), NliLabel.ENTAIL)
            self.base.entailments[sent] = proof
            self._check_cap()
            if self.matcher and self.matcher(sent):
                raise _Hit(proof)
            child = self.repolarize(sent)
            if child is None:
                self.base.unparsed.append(sent)
                continue
            self._expand(child, proof.steps, depth + 1)


def expand(
    premise: PolarizedSentence,
    kb: KnowledgeBase,
    config: SearchConfig = SearchConfig(),
    lexicon: Optional[Lexicon] = None,
) -> SentenceBase:
    """The full sentence base up to the configured depth (no hypothesis)."""
    expander = _Expander(kb, config, _default(lexicon))
    expander.run(premise)
    return expander.base


def search(
    premise: PolarizedSentence,
    hypothesis: Sequence[str],
    kb: KnowledgeBase,
    config: SearchConfig = SearchConfig(),
    lexicon: Optional[Lexicon] = None,
) -> Tuple[NliLabel, Optional[Proof], SentenceBase]:
    """Depth-first search for the hypothesis among entailments/contradictions."""
    goal = fuse_multiwords(tuple(hypothesis))
    matcher = lambda sent: sentence_equivalent(sent, goal, config.equivalence_set)
    expander = _Expander(kb, config, _default(lexicon), matcher=matcher)
    proof = expander.run(premise)
    if proof is not None:
        return proof.verdict, proof, expander.base
    return NliLabel.NEUTRAL, None, expander.base


def _default(lexicon: Optional[Lexicon]) -> Lexicon:
    if lexicon is not None:
        return lexicon
    from .data import default_lexicon

    return default_lexicon()


# ---------------------------------------------------------------------------
# End-to-end classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassifyResult:
    label: NliLabel
    proof: Optional[Proof]
    diagnostics: Tuple[str, ...] = ()
    base: Optional[SentenceBase] = None


def classify(
    problem,
    resource: Optional[LexicalResource] = None,
    config: SearchConfig = SearchConfig(),
    transforms: TransformConfig = TransformConfig(),
    lexicon: Optional[Lexicon] = None,
    extra_relations: Sequence = (),
) -> ClassifyResult:
    """Preprocess, parse, polarize, build the knowledge base, and search.

    Parse failures are diagnostics, not errors: the verdict falls back to
    Neutral, mirroring a search that cannot find the hypothesis.
    """
    lexicon = _default(lexicon)
    premise_tokens = preprocess_sentence(problem.premise, lexicon, transforms)
    hypothesis_tokens = preprocess_sentence(problem.hypothesis, lexicon, transforms)
    premise_lemmas = fuse_multiwords(tuple(t.lemma for t in premise_tokens))
    hypothesis_lemmas = fuse_multiwords(tuple(t.lemma for t in hypothesis_tokens))
    if sentence_equivalent(premise_lemmas, hypothesis_lemmas, config.equivalence_set):
        return ClassifyResult(NliLabel.ENTAIL, Proof((), NliLabel.ENTAIL))
    try:
        premise_ps = polarize(parse_fragment(premise_tokens, lexicon))
    except (NoParseError, OovError) as exc:
        return ClassifyResult(NliLabel.NEUTRAL, None, (f"premise outside fragment: {exc}",))
    extra = list(extra_relations)
    try:
        hypothesis_ps = polarize(parse_fragment(hypothesis_tokens, lexicon))
        extra.extend(derive_phrase_relations(hypothesis_ps))
    except (NoParseError, OovError) as exc:
        return ClassifyResult(NliLabel.NEUTRAL, None, (f"hypothesis outside fragment: {exc}",))
    kb = build_kb(premise_ps, hypothesis_lemmas, resource, extra=extra, lexicon=lexicon)
    label, proof, base = search(premise_ps, hypothesis_lemmas, kb, config, lexicon)
    diagnostics = ("sentence base capped; verdict defaulted to neutral",) if base.cap_exceeded else ()
    return ClassifyResult(label, proof, diagnostics, base)
