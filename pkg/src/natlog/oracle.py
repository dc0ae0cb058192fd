"""Brute-force finite-model semantics for the fragment.

This module is the independent ground truth: sentences are evaluated over
small models (domain size <= 6) with standard generalized-quantifier
clauses:

    every/all/each/any  restrictor <= scope
    some/a              intersection nonempty
    no                  intersection empty
    most                |R & S| > |R - S|
    many                |R & S| >= ceil(|R| / 2)
    a_few/several       |R & S| >= 1
    few                 |R & S| <= 1
    the                 |R| = 1 and R <= S
    two..ten            |R & S| >= n

Modifiers are intersective, negation is complement, and "without" is the
complement of the "with" relation image. Quantified restrictors carry the
usual nonemptiness presupposition ("the" additionally requires a singleton
restrictor); entailment checks skip models where a presupposition of either
sentence fails, which is the standard (Strawson) reading under which
quantifier-chain replacements such as every -> most are truth-preserving.

Contradiction checks additionally honor the topic-coreference discipline of
sentence-pair annotation: when both sentences have existential subjects
("a", "some", or a bare nominal) they are read as describing the same
individual, and indefinite noun phrases at matching positions inside the
two verb phrases are read as describing the same participants. A pair
counts as contradictory when no model and no shared choice of witnesses
makes both sentences true.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .core import Phrase, RelationKind
from .errors import UninterpretedLemmaError, UnsatisfiableKbError
from .kb import KnowledgeBase
from .syntax import Apply, Category, Derivation, Leaf

# Vocabulary kinds understood by the model sampler.
NOUN, ADJ, ADV, IVERB, TVERB, PREP = "noun", "adj", "adv", "iverb", "tverb", "prep"
UNARY_KINDS = (NOUN, ADJ, ADV, IVERB)
BINARY_KINDS = (TVERB, PREP)

EXISTENTIAL_DETS = {"a", "some"}
REFERENTIAL_DETS = {"a", "some", "the"}  # subjects read as describing one topic
UNIVERSAL_DETS = {"every", "all", "each", "any"}
NUMERAL_DETS = {"one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
                "six": 6, "seven": 7, "eight": 8, "nine": 9, "ten": 10}
STRUCTURAL_LEMMAS = {"be", "do", "not", "that"}
FEW_THRESHOLD = 1


@dataclass(frozen=True)
class FiniteModel:
    domain: FrozenSet[int]
    noun_ext: Dict[str, FrozenSet[int]] = field(default_factory=dict)
    iverb_ext: Dict[str, FrozenSet[int]] = field(default_factory=dict)
    tverb_ext: Dict[str, FrozenSet[Tuple[int, int]]] = field(default_factory=dict)
    adj_ext: Dict[str, FrozenSet[int]] = field(default_factory=dict)
    adv_ext: Dict[str, FrozenSet[int]] = field(default_factory=dict)
    prep_ext: Dict[str, FrozenSet[Tuple[int, int]]] = field(default_factory=dict)

    def unary(self, lemma: str) -> FrozenSet[int]:
        for table in (self.noun_ext, self.adj_ext, self.iverb_ext, self.adv_ext):
            if lemma in table:
                return table[lemma]
        raise UninterpretedLemmaError(lemma)

    def binary(self, lemma: str) -> FrozenSet[Tuple[int, int]]:
        for table in (self.prep_ext, self.tverb_ext):
            if lemma in table:
                return table[lemma]
        raise UninterpretedLemmaError(lemma)

    def render(self) -> str:
        """Entity-by-predicate membership table for failure reports."""
        lines = [f"domain: {sorted(self.domain)}"]
        for name, table in (
            ("noun", self.noun_ext),
            ("adj", self.adj_ext),
            ("adv", self.adv_ext),
            ("iverb", self.iverb_ext),
        ):
            for lemma in sorted(table):
                lines.append(f"  {name} {lemma}: {sorted(table[lemma])}")
        for name, table in (("tverb", self.tverb_ext), ("prep", self.prep_ext)):
            for lemma in sorted(table):
                lines.append(f"  {name} {lemma}: {sorted(table[lemma])}")
        return "\n".join(lines)


def quant_holds(det: str, restrictor: FrozenSet[int], scope: FrozenSet[int]) -> bool:
    inter = restrictor & scope
    if det in UNIVERSAL_DETS:
        return restrictor <= scope
    if det in EXISTENTIAL_DETS or det is None:
        return bool(inter)
    if det == "no":
        return not inter
    if det == "most":
        return len(inter) > len(restrictor - scope)
    if det == "many":
        return len(inter) >= math.ceil(len(restrictor) / 2)
    if det in ("a_few", "several"):
        return len(inter) >= 1
    if det == "few":
        return len(inter) <= FEW_THRESHOLD
    if det == "the":
        return len(restrictor) == 1 and restrictor <= scope
    if det in NUMERAL_DETS:
        return len(inter) >= NUMERAL_DETS[det]
    raise UninterpretedLemmaError(det)


# ---------------------------------------------------------------------------
# Sentence structure
# ---------------------------------------------------------------------------


@dataclass
class NPNode:
    """An NP occurrence: its determiner (None = bare), restrictor tree, position."""

    det: Optional[str]
    restrictor: Derivation
    ordinal: int
    zone: str = "vp"  # "subject" for NPs inside the subject's restrictor

    @property
    def coupleable(self) -> bool:
        return self.det is None or self.det in REFERENTIAL_DETS


@dataclass
class SentenceShape:
    subject: NPNode
    vp: Derivation
    np_nodes: List[NPNode]  # inner NPs, subject-restrictor ones first
    np_by_id: Dict[int, NPNode]


def _np_of(node: Derivation) -> Optional[Tuple[Optional[str], Derivation]]:
    """(det, restrictor) if ``node`` denotes an NP, else None."""
    skel = node.cat.skeleton()
    if isinstance(node, Leaf):
        if skel == "NP":
            return (None, node)
        return None
    if skel == "NP" and isinstance(node.fn, Leaf) and node.fn.cat.skeleton() == "NP/N":
        return (node.fn.lemma, node.arg)
    if skel == "NP":
        return (None, node)  # bare nominal with modifiers
    return None


def analyze(derivation: Derivation) -> SentenceShape:
    """Split a sentence derivation into subject NP and verb phrase."""
    if not isinstance(derivation, Apply) or derivation.cat.skeleton() != "S":
        raise ValueError("not a sentence derivation")
    fn, arg = derivation.fn, derivation.arg
    if fn.cat.skeleton() == "S/(S\\NP)":
        # Quantified subject: fn = Apply(det, restrictor).
        det = fn.fn.lemma if isinstance(fn, Apply) and isinstance(fn.fn, Leaf) else None
        restrictor = fn.arg if isinstance(fn, Apply) else fn
        subject = NPNode(det, restrictor, ordinal=-1)
        vp = arg
    else:
        # Bare subject: fn is the VP (backward application).
        np = _np_of(arg)
        det, restrictor = np if np else (None, arg)
        subject = NPNode(det, restrictor, ordinal=-1)
        vp = fn
    np_nodes: List[NPNode] = []
    np_by_id: Dict[int, NPNode] = {}

    # Register exactly the NP nodes the evaluator will quantify over: the
    # arguments of leaves taking an NP (verbs, prepositions, copular "be"),
    # in textual order, so positions align across a sentence pair. NPs in
    # the subject's restrictor and in the verb phrase are kept in separate
    # zones: pair alignment never crosses the subject/VP boundary.
    def walk(node: Derivation, zone: str):
        if isinstance(node, Leaf):
            return
        fn, arg = node.fn, node.arg
        eligible = (
            isinstance(fn, Leaf)
            and not fn.cat.is_atomic
            and fn.cat.argument.skeleton() == "NP"
        )
        for child in node.children_in_order:
            if child is arg and eligible:
                found = _np_of(child)
                det, restrictor = found if found else (None, child)
                npn = NPNode(det, restrictor, ordinal=len(np_nodes), zone=zone)
                np_nodes.append(npn)
                np_by_id[id(child)] = npn
            walk(child, zone)

    walk(subject.restrictor, "subject")
    walk(vp, "vp")
    return SentenceShape(subject, vp, np_nodes, np_by_id)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


class _Eval:
    """Evaluator with an optional witness assignment for coupled NPs.

    ``sigma`` maps NP ordinals (within the VP, textual order) to entities;
    a bound indefinite NP denotes exactly its witness.
    """

    def __init__(self, model: FiniteModel, shape: Optional[SentenceShape] = None,
                 sigma: Optional[Dict[int, int]] = None):
        self.model = model
        self.shape = shape
        self.sigma = sigma or {}

    def nominal_set(self, node: Derivation) -> FrozenSet[int]:
        """Extension of a noun-like tree (N or bare-NP nominal)."""
        model = self.model
        if isinstance(node, Leaf):
            if node.lemma in ("something", "anything", "sth"):
                return frozenset(model.domain)
            return model.unary(node.lemma)
        fn, arg = node.fn, node.arg
        fcat = fn.cat
        if not fcat.is_atomic and fcat.result.skeleton() == fcat.argument.skeleton():
            head = self.nominal_set(arg)
            return head & self.modifier_set(fn)
        raise UninterpretedLemmaError(" ".join(l.lemma for l in _leaves(node)))

    def modifier_set(self, mod: Derivation) -> FrozenSet[int]:
        """Entities passing an intersective modifier (adj, PP, relative clause)."""
        model = self.model
        if isinstance(mod, Leaf):
            return model.unary(mod.lemma)
        # PP modifier: Apply(prep, NP); relative clause: Apply(that, VP).
        fn, arg = mod.fn, mod.arg
        if isinstance(fn, Leaf) and fn.lemma == "that":
            return self.vp_set(arg)
        if isinstance(fn, Leaf):
            return self.prep_image(fn.lemma, arg)
        raise UninterpretedLemmaError(" ".join(l.lemma for l in _leaves(mod)))

    def prep_image(self, prep: str, np_node: Derivation) -> FrozenSet[int]:
        """{x : NP holds of {y : (x, y) in prep pairs}}; "without" complements "with"."""
        model = self.model
        negate = prep == "without"
        pairs = model.binary("with") if negate else model.binary(prep)
        out = set()
        for x in model.domain:
            image = frozenset(y for (a, y) in pairs if a == x)
            holds = self.np_holds(np_node, image)
            if negate:
                holds = not holds
            if holds:
                out.add(x)
        return frozenset(out)

    def np_holds(self, np_node: Derivation, predicate: FrozenSet[int]) -> bool:
        found = _np_of(np_node)
        if found is None:
            raise UninterpretedLemmaError(" ".join(l.lemma for l in _leaves(np_node)))
        det, restrictor = found
        rset = self.nominal_set(restrictor)
        if self.shape is not None:
            npn = self.shape.np_by_id.get(id(np_node))
            if npn is not None and npn.ordinal in self.sigma:
                witness = self.sigma[npn.ordinal]
                return witness in rset and witness in predicate
        return quant_holds(det, rset, predicate)

    def vp_set(self, vp: Derivation) -> FrozenSet[int]:
        model = self.model
        if isinstance(vp, Leaf):
            lemma = vp.lemma
            for table in (model.iverb_ext, model.adj_ext, model.noun_ext, model.adv_ext):
                if lemma in table:
                    return table[lemma]
            raise UninterpretedLemmaError(lemma)
        fn, arg = vp.fn, vp.arg
        if isinstance(fn, Leaf) and fn.lemma in ("be", "do"):
            if arg.cat.skeleton() in ("S\\NP", "PP"):
                return self.vp_set(arg) if arg.cat.skeleton() == "S\\NP" else self.pp_set(arg)
            if arg.cat.skeleton() == "NP":
                # Predicate nominal: x satisfies it iff the NP holds of {x}.
                return frozenset(x for x in model.domain if self.np_holds(arg, frozenset({x})))
            raise UninterpretedLemmaError(fn.lemma)
        if isinstance(fn, Leaf) and fn.lemma == "not":
            inner = arg
            if inner.cat.skeleton() == "PP":
                return frozenset(model.domain) - self.pp_set(inner)
            return frozenset(model.domain) - self.vp_set(inner)
        fcat = fn.cat
        if not fcat.is_atomic and fcat.result.skeleton() == fcat.argument.skeleton():
            # VP adjunct (adverb or PP) or pre-verbal adverb.
            head = self.vp_set(arg)
            return head & self.modifier_set(fn)
        if isinstance(fn, Leaf) and fcat.skeleton() == "(S\\NP)/NP":
            pairs = model.binary(fn.lemma)
            out = set()
            for x in model.domain:
                image = frozenset(y for (a, y) in pairs if a == x)
                if self.np_holds(arg, image):
                    out.add(x)
            return frozenset(out)
        raise UninterpretedLemmaError(" ".join(l.lemma for l in _leaves(vp)))

    def pp_set(self, pp: Derivation) -> FrozenSet[int]:
        if isinstance(pp, Apply) and isinstance(pp.fn, Leaf):
            return self.prep_image(pp.fn.lemma, pp.arg)
        raise UninterpretedLemmaError(" ".join(l.lemma for l in _leaves(pp)))


def _leaves(node: Derivation) -> List[Leaf]:
    if isinstance(node, Leaf):
        return [node]
    left, right = node.children_in_order
    return _leaves(left) + _leaves(right)


def eval_sentence(model: FiniteModel, sentence: Derivation) -> bool:
    """Truth of a fragment sentence in ``model``."""
    shape = analyze(sentence)
    ev = _Eval(model, shape)
    scope = ev.vp_set(shape.vp)
    restrictor = ev.nominal_set(shape.subject.restrictor)
    return quant_holds(shape.subject.det, restrictor, scope)


def presuppositions_hold(model: FiniteModel, sentence: Derivation) -> bool:
    """Quantified restrictors nonempty; "the" restrictors singletons."""
    shape = analyze(sentence)
    ev = _Eval(model, shape)

    def check(det, restrictor) -> bool:
        if det is None:
            return True
        rset = ev.nominal_set(restrictor)
        if det == "the":
            return len(rset) == 1
        return bool(rset)

    if not check(shape.subject.det, shape.subject.restrictor):
        return False
    for npn in shape.np_nodes:
        if npn.det is not None and not check(npn.det, npn.restrictor):
            return False
    return True


# ---------------------------------------------------------------------------
# Model generation
# ---------------------------------------------------------------------------


def infer_vocabulary(*derivations: Derivation) -> Dict[str, str]:
    """Lemma -> kind map read off derivation leaves."""
    vocab: Dict[str, str] = {}
    for derivation in derivations:
        for leaf in _leaves(derivation):
            lemma = leaf.lemma
            if lemma in STRUCTURAL_LEMMAS or lemma in ("something", "anything", "sth"):
                continue
            skel = leaf.cat.skeleton()
            if skel in ("N", "NP"):
                vocab.setdefault(lemma, NOUN)
            elif skel == "S\\NP":
                vocab.setdefault(lemma, IVERB)
            elif skel == "(S\\NP)/NP":
                vocab.setdefault(lemma, TVERB)
            elif skel in ("N/N", "NP/NP"):
                vocab.setdefault(lemma, ADJ)
            elif skel.endswith("/NP"):
                if lemma == "without":
                    vocab.setdefault("with", PREP)
                else:
                    vocab.setdefault(lemma, PREP)
            elif "(S\\NP)" in skel and leaf.cat.skeleton() not in ("S/(S\\NP)",):
                if skel in ("(S\\NP)/(S\\NP)", "(S\\NP)\\(S\\NP)"):
                    vocab.setdefault(lemma, ADV)
    return vocab


def _word_constraints(kb: KnowledgeBase, vocab: Dict[str, str]):
    """Single-lemma kb relations enforceable on extensions, split by arity."""
    leq_unary, leq_binary, perp_unary, perp_binary = [], [], [], []

    def arity(lemma):
        kind = vocab.get(lemma)
        if kind in UNARY_KINDS:
            return 1
        if kind in BINARY_KINDS:
            return 2
        return None

    for a, b in kb.leq_pairs():
        if len(a) == 1 and len(b) == 1:
            ar_a, ar_b = arity(a[0]), arity(b[0])
            if ar_a == ar_b == 1:
                leq_unary.append((a[0], b[0]))
            elif ar_a == ar_b == 2:
                leq_binary.append((a[0], b[0]))
    for a, b in kb.perp_pairs():
        if len(a) == 1 and len(b) == 1:
            ar_a, ar_b = arity(a[0]), arity(b[0])
            if ar_a == ar_b == 1:
                perp_unary.append((a[0], b[0]))
            elif ar_a == ar_b == 2:
                perp_binary.append((a[0], b[0]))
    return leq_unary, leq_binary, perp_unary, perp_binary


def check_model_satisfies(kb: KnowledgeBase, model: FiniteModel, vocab: Dict[str, str]) -> bool:
    """Independent re-check that extensions respect word-level kb relations."""
    leq_u, leq_b, perp_u, perp_b = _word_constraints(kb, vocab)

    def ext(lemma):
        kind = vocab[lemma]
        table = {NOUN: model.noun_ext, ADJ: model.adj_ext, ADV: model.adv_ext,
                 IVERB: model.iverb_ext, TVERB: model.tverb_ext, PREP: model.prep_ext}[kind]
        return table[lemma]

    for a, b in leq_u + leq_b:
        if not ext(a) <= ext(b):
            return False
    for a, b in perp_u + perp_b:
        if ext(a) & ext(b):
            return False
    return True


def _detect_unsat(kb: KnowledgeBase, vocab: Dict[str, str]) -> Optional[str]:
    for a, b in kb.perp_pairs():
        if len(a) == 1 and len(b) == 1 and a[0] in vocab and b[0] in vocab:
            if kb.query_leq(a, b) and kb.query_leq(b, a):
                if vocab.get(a[0]) == NOUN or vocab.get(b[0]) == NOUN:
                    return f"{a[0]} and {b[0]} are equal, disjoint, and must be inhabited"
    return None


def models_satisfying(
    kb: KnowledgeBase,
    vocabulary: Dict[str, str],
    count: int,
    seed: int = 0,
    max_domain: int = 5,
) -> List[FiniteModel]:
    """Seeded pseudo-random models whose extensions respect the kb.

    Noun extensions are kept nonempty (quantified talk about empty kinds is
    infelicitous and the replacement chains assume inhabited restrictors).
    """
    reason = _detect_unsat(kb, vocabulary)
    if reason is not None:
        raise UnsatisfiableKbError(reason)
    rng = random.Random(seed)
    leq_u, leq_b, perp_u, perp_b = _word_constraints(kb, vocabulary)
    models: List[FiniteModel] = []
    failures = 0
    while len(models) < count:
        if failures > 200 + 50 * count:
            raise UnsatisfiableKbError("could not sample a model satisfying the knowledge base")
        size = rng.randint(1, max_domain)
        domain = frozenset(range(size))
        ext: Dict[str, Set] = {}
        for lemma, kind in vocabulary.items():
            if kind in UNARY_KINDS:
                ext[lemma] = {x for x in domain if rng.random() < 0.6}
            else:
                ext[lemma] = {(x, y) for x in domain for y in domain if rng.random() < 0.45}
        # Enforce subset constraints by union propagation (closure edges).
        for _ in range(2):
            for a, b in leq_u + leq_b:
                ext[b] |= ext[a]
        # Enforce disjointness by carving the overlap out of one side.
        for a, b in perp_u + perp_b:
            overlap = ext[a] & ext[b]
            ext[b] -= overlap
        ok = True
        for a, b in leq_u + leq_b:
            if not ext[a] <= ext[b]:
                ok = False
        for a, b in perp_u + perp_b:
            if ext[a] & ext[b]:
                ok = False
        for lemma, kind in vocabulary.items():
            if kind == NOUN and not ext[lemma]:
                ok = False
        if not ok:
            failures += 1
            continue
        model = FiniteModel(
            domain=domain,
            noun_ext={l: frozenset(ext[l]) for l, k in vocabulary.items() if k == NOUN},
            adj_ext={l: frozenset(ext[l]) for l, k in vocabulary.items() if k == ADJ},
            adv_ext={l: frozenset(ext[l]) for l, k in vocabulary.items() if k == ADV},
            iverb_ext={l: frozenset(ext[l]) for l, k in vocabulary.items() if k == IVERB},
            tverb_ext={l: frozenset(ext[l]) for l, k in vocabulary.items() if k == TVERB},
            prep_ext={l: frozenset(ext[l]) for l, k in vocabulary.items() if k == PREP},
        )
        models.append(model)
    return models


def enumerate_models(vocabulary: Dict[str, str], max_domain: int = 3) -> Iterable[FiniteModel]:
    """Exhaustively enumerate models for small unary vocabularies."""
    for size in range(1, max_domain + 1):
        domain = tuple(range(size))
        lemmas = sorted(vocabulary)
        spaces = []
        for lemma in lemmas:
            if vocabulary[lemma] in UNARY_KINDS:
                spaces.append([frozenset(c) for r in range(size + 1)
                               for c in itertools.combinations(domain, r)])
            else:
                cells = [(x, y) for x in domain for y in domain]
                spaces.append([frozenset(c) for r in range(len(cells) + 1)
                               for c in itertools.combinations(cells, r)])
        for combo in itertools.product(*spaces):
            ext = dict(zip(lemmas, combo))
            yield FiniteModel(
                domain=frozenset(domain),
                noun_ext={l: ext[l] for l in lemmas if vocabulary[l] == NOUN},
                adj_ext={l: ext[l] for l in lemmas if vocabulary[l] == ADJ},
                adv_ext={l: ext[l] for l in lemmas if vocabulary[l] == ADV},
                iverb_ext={l: ext[l] for l in lemmas if vocabulary[l] == IVERB},
                tverb_ext={l: ext[l] for l in lemmas if vocabulary[l] == TVERB},
                prep_ext={l: ext[l] for l in lemmas if vocabulary[l] == PREP},
            )


def _enumeration_cost(vocabulary: Dict[str, str], max_domain: int = 3) -> int:
    total = 0
    for size in range(1, max_domain + 1):
        per = 1
        for kind in vocabulary.values():
            per *= 2 ** (size if kind in UNARY_KINDS else size * size)
        total += per
    return total


@dataclass(frozen=True)
class NoCounterexample:
    checked: int
    skipped: int = 0


@dataclass(frozen=True)
class Counterexample:
    model: FiniteModel
    checked: int = 0


def _candidate_models(kb, vocab, sample_size, seed, exhaustive_limit=60000):
    if _enumeration_cost(vocab) <= exhaustive_limit:
        for model in enumerate_models(vocab):
            if check_model_satisfies(kb, model, vocab):
                yield model
    else:
        yield from models_satisfying(kb, vocab, sample_size, seed)


def entails_under(
    kb: KnowledgeBase,
    premise: Derivation,
    hypothesis: Derivation,
    sample_size: int = 300,
    seed: int = 0,
):
    """Search for a model where the premise is true and the hypothesis false."""
    vocab = infer_vocabulary(premise, hypothesis)
    checked = skipped = 0
    for model in _candidate_models(kb, vocab, sample_size, seed):
        if not (presuppositions_hold(model, premise) and presuppositions_hold(model, hypothesis)):
            skipped += 1
            continue
        if not eval_sentence(model, premise):
            continue
        checked += 1
        if not eval_sentence(model, hypothesis):
            return Counterexample(model, checked)
    return NoCounterexample(checked, skipped)


def _joint_witnessed_satisfiable(model: FiniteModel, p: Derivation, c: Derivation) -> bool:
    """Can both sentences be true of one shared subject and shared participants?"""
    shape_p, shape_c = analyze(p), analyze(c)
    ev0 = _Eval(model)
    # Couple the k-th inner NP of each sentence (subject-restrictor NPs
    # first, then VP NPs) when both can describe one participant. The
    # candidate sets ignore nesting and are supersets of the admissible
    # witnesses; the full evaluation below validates each assignment.
    pairs = []
    for zone in ("subject", "vp"):
        zone_p = [n for n in shape_p.np_nodes if n.zone == zone]
        zone_c = [n for n in shape_c.np_nodes if n.zone == zone]
        for np_p, np_c in zip(zone_p, zone_c):
            if np_p.coupleable and np_c.coupleable:
                wit_p = ev0.nominal_set(np_p.restrictor)
                wit_c = ev0.nominal_set(np_c.restrictor)
                pairs.append((np_p.ordinal, np_c.ordinal, sorted(wit_p & wit_c)))
    choices = [options for (_, _, options) in pairs]
    assignments = itertools.product(*choices) if pairs else [()]
    for assignment in assignments:
        sigma_p = {pairs[i][0]: assignment[i] for i in range(len(pairs))}
        sigma_c = {pairs[i][1]: assignment[i] for i in range(len(pairs))}
        ev_p = _Eval(model, shape_p, sigma_p)
        ev_c = _Eval(model, shape_c, sigma_c)
        shared_subjects = ev_p.nominal_set(shape_p.subject.restrictor) & ev_c.nominal_set(
            shape_c.subject.restrictor
        )
        if not shared_subjects:
            continue
        if shared_subjects & ev_p.vp_set(shape_p.vp) & ev_c.vp_set(shape_c.vp):
            return True
    return False


def _referential_subject(derivation: Derivation) -> bool:
    shape = analyze(derivation)
    return shape.subject.det is None or shape.subject.det in REFERENTIAL_DETS


def pair_contradictory_in_model(model: FiniteModel, premise: Derivation, contradiction: Derivation) -> bool:
    """Whether the pair is contradictory in one premise-true model.

    Referential-subject pairs are judged under the topic-coreference
    discipline; otherwise the second sentence must simply be false.
    The caller is responsible for premise truth and presuppositions.
    """
    if _referential_subject(premise) and _referential_subject(contradiction):
        return not _joint_witnessed_satisfiable(model, premise, contradiction)
    return not eval_sentence(model, contradiction)


def contradicts_under(
    kb: KnowledgeBase,
    premise: Derivation,
    contradiction: Derivation,
    sample_size: int = 300,
    seed: int = 0,
):
    """Search for a premise-true model where the pair is jointly satisfiable.

    With two referential-subject sentences (a/some/the or bare) the pair is
    evaluated under the topic-coreference discipline (shared subject
    witness, positionally coupled indefinites); otherwise plain truth of
    the second sentence in a premise-true model is a counterexample.
    """
    vocab = infer_vocabulary(premise, contradiction)
    coupled = _referential_subject(premise) and _referential_subject(contradiction)
    checked = skipped = 0
    for model in _candidate_models(kb, vocab, sample_size, seed):
        if not (presuppositions_hold(model, premise) and presuppositions_hold(model, contradiction)):
            skipped += 1
            continue
        if not eval_sentence(model, premise):
            continue
        checked += 1
        if coupled:
            if _joint_witnessed_satisfiable(model, premise, contradiction):
                return Counterexample(model, checked)
        else:
            if eval_sentence(model, contradiction):
                return Counterexample(model, checked)
    return NoCounterexample(checked, skipped)
