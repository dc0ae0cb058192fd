import pytest
from hypothesis import given, settings, strategies as st

from natlog.core import Provenance, Relation
from natlog.data import default_lexicon
from natlog.errors import BuildError
from natlog.kb import (
    KnowledgeBase,
    LexicalResource,
    build_kb,
    derive_phrase_relations,
    extract_from_premise,
    hard_coded_relations,
    resource_relations,
)
from natlog.polarizer import polarize
from natlog.syntax import parse_fragment


@pytest.fixture(scope="module")
def lexicon():
    return default_lexicon()


def polarized(sentence, lexicon):
    return polarize(parse_fragment(sentence.split(), lexicon))


# -- closure ------------------------------------------------------------------


def brute_force_closure(edges, nodes):
    """Reflexive-transitive closure by fixpoint over explicit paths."""
    reach = {n: {n} for n in nodes}
    changed = True
    while changed:
        changed = False
        for a, b in edges:
            for n in nodes:
                if a in reach[n] and b not in reach[n]:
                    reach[n].add(b)
                    changed = True
    return reach


@settings(max_examples=150, deadline=None)
@given(
    st.lists(
        st.tuples(st.integers(0, 11), st.integers(0, 11)),
        max_size=24,
    )
)
def test_query_leq_matches_brute_force_closure(pairs):
    edges = [((f"n{a}",), (f"n{b}",)) for a, b in pairs]
    nodes = sorted({p for e in edges for p in e})
    kb = KnowledgeBase([Relation.leq(a, b) for a, b in edges], validate=False)
    reach = brute_force_closure(edges, nodes)
    for a in nodes:
        for b in nodes:
            assert kb.query_leq(a, b) == (b in reach[a]), (a, b)


def test_query_leq_reflexive_even_for_unknown_phrases():
    kb = KnowledgeBase([])
    assert kb.query_leq(("unseen",), ("unseen",))
    assert not kb.query_leq(("unseen",), ("other",))


def test_equality_chains_queryable_both_ways():
    kb = KnowledgeBase(hard_coded_relations())
    assert kb.query_leq(("every",), ("all",))
    assert kb.query_leq(("all",), ("every",))
    assert kb.query_leq(("every",), ("some",))  # via most, many, a_few
    assert kb.query_leq(("the",), ("a",))
    assert not kb.query_leq(("some",), ("every",))


def test_query_perp_symmetric():
    kb = KnowledgeBase(hard_coded_relations())
    assert kb.query_perp(("on",), ("off",))
    assert kb.query_perp(("off",), ("on",))
    assert not kb.query_perp(("on",), ("on",))


def test_build_error_on_equality_meeting_perp():
    rels = [
        Relation.leq(("x",), ("y",)),
        Relation.leq(("y",), ("x",)),
        Relation.perp(("x",), ("y",)),
    ]
    with pytest.raises(BuildError):
        KnowledgeBase(rels)
    # Unvalidated construction still possible (used by the model sampler tests).
    KnowledgeBase(rels, validate=False)


def test_self_perp_rejected():
    with pytest.raises(BuildError):
        KnowledgeBase([Relation.perp(("on",), ("on",))])


# -- resource guard -----------------------------------------------------------


def test_resource_relations_restricted_to_pair_vocabulary():
    resource = LexicalResource.from_rows(
        [("semanticist", "hyp", "linguist"), ("swim", "hyp", "move"), ("bank", "hyp", "institution")]
    )
    vocab = {"semanticist", "linguist", "swim", "move", "bank"}
    rels = resource_relations(resource, vocab)
    pairs = {(r.lhs, r.rhs) for r in rels}
    assert (("semanticist",), ("linguist",)) in pairs
    assert (("swim",), ("move",)) in pairs
    assert not any("institution" in r.lhs + r.rhs for r in rels)
    assert all(r.provenance is Provenance.LEXICAL_RESOURCE for r in rels)


def test_build_kb_paper_example(lexicon):
    resource = LexicalResource.from_rows(
        [("semanticist", "hyp", "linguist"), ("swim", "hyp", "move")]
    )
    premise = polarized("every semanticist swim", lexicon)
    kb = build_kb(premise, ("every", "linguist", "move"), resource, lexicon=lexicon)
    assert kb.query_leq(("semanticist",), ("linguist",))
    assert kb.query_leq(("swim",), ("move",))


def test_build_kb_without_resource_has_only_hard_coded_and_structural(lexicon):
    premise = polarized("a dog swim", lexicon)
    kb = build_kb(premise, ("a", "cat", "run"), LexicalResource.empty(), lexicon=lexicon)
    word_rels = [
        r for r in kb.relations
        if r.provenance in (Provenance.LEXICAL_RESOURCE, Provenance.USER_SUPPLIED)
    ]
    assert word_rels == []
    assert kb.query_leq(("every",), ("most",))


def test_no_resource_relation_mentions_out_of_pair_lemma(lexicon):
    resource = LexicalResource.bundled()
    premise = polarized("a poodle be swim", lexicon)
    kb = build_kb(premise, ("a", "dog", "be", "swim"), resource, lexicon=lexicon)
    vocab = {"a", "poodle", "be", "swim", "dog"}
    for rel in kb.relations:
        if rel.provenance is Provenance.LEXICAL_RESOURCE:
            for lemma in rel.lhs + rel.rhs:
                assert lemma in vocab, rel


# -- phrase relations ----------------------------------------------------------


def phrase_pairs(sentence, lexicon):
    rels = derive_phrase_relations(polarized(sentence, lexicon))
    return {(" ".join(r.lhs), " ".join(r.rhs)) for r in rels}


def test_adj_noun_phrase_relation(lexicon):
    pairs = phrase_pairs("a schoolgirl with a black bag be on a crowded train", lexicon)
    assert ("black bag", "bag") in pairs
    assert ("crowded train", "train") in pairs
    assert ("schoolgirl with a black bag", "schoolgirl") in pairs


def test_relative_clause_phrase_relation(lexicon):
    pairs = phrase_pairs("every dog that bite swim", lexicon)
    assert ("dog that bite", "dog") in pairs


def test_vp_adjunct_phrase_relation(lexicon):
    pairs = phrase_pairs("a girl dance happily", lexicon)
    assert ("dance happily", "dance") in pairs
    pairs = phrase_pairs("a man be talk to a woman", lexicon)
    assert ("talk to a woman", "talk") in pairs


def test_negation_never_yields_phrase_relation(lexicon):
    pairs = phrase_pairs("a woman be not cook something", lexicon)
    assert not any("not" in lhs.split() for lhs, _ in pairs)


# -- premise extraction ---------------------------------------------------------


def test_extract_every_n1_be_a_n2(lexicon):
    rels = extract_from_premise(polarized("every poodle be a dog", lexicon))
    assert [(r.lhs, r.rhs) for r in rels] == [(("poodle",), ("dog",))]
    assert rels[0].provenance is Provenance.PREMISE_EXTRACTION


def test_extract_requires_every_and_copula(lexicon):
    assert extract_from_premise(polarized("every linguist swim", lexicon)) == []
    assert extract_from_premise(polarized("a poodle be a dog", lexicon)) == []


# -- insertion candidates ---------------------------------------------------------


def test_insertion_candidates_from_pair_vocabulary(lexicon):
    premise = polarized("all schoolgirl be on the train", lexicon)
    kb = build_kb(
        premise,
        tuple("all happy schoolgirl be on the train".split()),
        LexicalResource.empty(),
        lexicon=lexicon,
    )
    assert "happy" in kb.insertable_adjectives
    assert kb.insertable_adverbs == ()
