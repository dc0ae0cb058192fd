import pytest
from hypothesis import given, settings, strategies as st

from natlog.core import EditDirection, NliLabel, Polarity, ProblemRecord, Relation
from natlog.data import default_lexicon
from natlog.engine import (
    SearchConfig,
    classify,
    expand,
    generate_contradictions,
    generate_entailments,
    search,
    sentence_equivalent,
)
from natlog.kb import KnowledgeBase, LexicalResource, build_kb
from natlog.polarizer import polarity_of_span, polarize
from natlog.syntax import parse_fragment

from randgen import make_rng, random_kb, random_premise


@pytest.fixture(scope="module")
def lexicon():
    return default_lexicon()


@pytest.fixture(scope="module")
def resource():
    return LexicalResource.bundled()


def polarized(sentence, lexicon):
    return polarize(parse_fragment(sentence.split(), lexicon))


def sentences(generated):
    return {" ".join(s) for s, _ in generated}


# -- entailment generation ------------------------------------------------------


def test_one_step_entailments_match_generation_example(lexicon):
    kb = KnowledgeBase(
        [
            Relation.leq(("semanticist",), ("linguist",)),
            Relation.leq(("swim",), ("move",)),
            Relation.leq(("every",), ("most",)),
        ]
    )
    out = generate_entailments(polarized("every linguist swim", lexicon), kb)
    assert sentences(out) == {
        "most linguist swim",
        "every semanticist swim",
        "every linguist move",
    }


def test_figure2_depth1_nodes(lexicon, resource):
    premise = polarized("a schoolgirl with a black bag be on a crowded train", lexicon)
    kb = build_kb(
        premise,
        tuple("a girl with a black bag be on a crowded train".split()),
        resource,
        lexicon=lexicon,
    )
    out = sentences(generate_entailments(premise, kb))
    assert "a schoolgirl be on a crowded train" in out
    assert "a schoolgirl with a bag be on a crowded train" in out
    assert "a girl with a black bag be on a crowded train" in out


def test_empty_kb_generates_nothing(lexicon):
    kb = KnowledgeBase([])
    assert generate_entailments(polarized("a dog swim", lexicon), kb) == []


def test_flat_spans_never_replaced(lexicon):
    kb = KnowledgeBase([Relation.leq(("linguist",), ("person",))])
    # "most" has a flat restrictor slot after re-polarization.
    out = sentences(generate_entailments(polarized("most linguist swim", lexicon), kb))
    assert "most person swim" not in out


def test_downward_insertion_from_vocabulary(lexicon, resource):
    premise = polarized("all schoolgirl be on the train", lexicon)
    kb = build_kb(
        premise, tuple("all happy schoolgirl be on the train".split()), resource, lexicon=lexicon
    )
    out = sentences(generate_entailments(premise, kb))
    assert "all happy schoolgirl be on the train" in out


def test_insertion_never_lands_inside_determiner(lexicon):
    kb = KnowledgeBase([], insertable_adjectives=["large"])
    out = sentences(generate_entailments(polarized("no man be eat a mushroom", lexicon), kb))
    assert "no large man be eat a mushroom" in out
    assert "no man be eat a large mushroom" in out
    assert not any("large a" in s or "a large large" in s for s in out)


def test_pp_duplication_under_downward_vp(lexicon):
    premise = polarized("no man rapidly be chop some mushroom with a knife", lexicon)
    kb = KnowledgeBase([])
    out = sentences(generate_entailments(premise, kb))
    assert any(s.endswith("with a knife with a knife") for s in out)


# -- contradiction generation ------------------------------------------------------


def test_contradictions_figure2(lexicon, resource):
    node = polarized("a schoolgirl be on a crowded train", lexicon)
    kb = KnowledgeBase([])
    out = sentences(generate_contradictions(node, kb))
    assert "no schoolgirl be on a crowded train" in out
    node2 = polarized("a schoolgirl with a bag be on a crowded train", lexicon)
    out2 = sentences(generate_contradictions(node2, kb))
    assert "a schoolgirl with a bag be not on a crowded train" in out2


def test_contradiction_no_to_some(lexicon):
    out = sentences(generate_contradictions(polarized("no panda be climb", lexicon), KnowledgeBase([])))
    assert "some panda be climb" in out
    assert "a panda be climb" in out


def test_contradiction_rule1_is_involutive(lexicon):
    kb = KnowledgeBase([])
    for sentence in ["no panda be climb", "some panda be climb", "a panda be climb"]:
        start = tuple(sentence.split())
        outputs = [
            s
            for s, e in generate_contradictions(polarized(sentence, lexicon), kb)
            if e.rule == "flip-subject-quantifier"
        ]
        for out in outputs:
            back = [
                s
                for s, e in generate_contradictions(polarized(" ".join(out), lexicon), kb)
                if e.rule == "flip-subject-quantifier"
            ]
            assert start in back, (sentence, out)


def test_contradiction_object_flip(lexicon):
    out = sentences(generate_contradictions(polarized("every man be eat a cake", lexicon), KnowledgeBase([])))
    assert "every man be eat no cake" in out
    out2 = sentences(generate_contradictions(polarized("every man be eat no cake", lexicon), KnowledgeBase([])))
    assert "every man be eat some cake" in out2


def test_contradiction_negation_insert_and_remove(lexicon):
    out = sentences(generate_contradictions(polarized("the man be sing", lexicon), KnowledgeBase([])))
    assert "the man be not sing" in out
    out2 = sentences(generate_contradictions(polarized("the man be not sing", lexicon), KnowledgeBase([])))
    assert "the man be sing" in out2
    out3 = sentences(generate_contradictions(polarized("a man do not run", lexicon), KnowledgeBase([])))
    assert "a man run" in out3
    out4 = sentences(generate_contradictions(polarized("a man run", lexicon), KnowledgeBase([])))
    assert "a man do not run" in out4


def test_contradiction_perp_swap_needs_coreferential_subject(lexicon):
    kb = KnowledgeBase([Relation.perp(("man",), ("woman",))])
    out = sentences(generate_contradictions(polarized("a man be dance", lexicon), kb))
    assert "a woman be dance" in out
    out2 = sentences(generate_contradictions(polarized("every man be dance", lexicon), kb))
    assert "every woman be dance" not in out2


def test_rules_2_and_3_gated_by_subject_class(lexicon):
    kb = KnowledgeBase([])
    out = sentences(generate_contradictions(polarized("few man be sing", lexicon), kb))
    assert "few man be not sing" not in out
    out2 = sentences(generate_contradictions(polarized("several man be sing", lexicon), kb))
    assert "several man be not sing" not in out2


def test_contradiction_edits_marked(lexicon):
    for _, edit in generate_contradictions(polarized("a man be sing", lexicon), KnowledgeBase([])):
        assert edit.direction is EditDirection.CONTRADICTING


# -- sentence equivalence -----------------------------------------------------------


def test_sentence_equivalent_examples():
    assert sentence_equivalent(("a", "man", "be", "talk"), ("a", "man", "talk"))
    assert sentence_equivalent(("a", "man", "talk"), ("a", "man", "be", "talk"))
    assert sentence_equivalent(("a", "man", "walk"), ("a", "man", "walk"))
    assert not sentence_equivalent(("a", "man", "walk"), ("a", "man", "run"))


def test_sentence_equivalent_neutralizes_progressive():
    assert sentence_equivalent(("a", "man", "be", "talking"), ("a", "man", "talk"))
    assert not sentence_equivalent(("something",), ("someth",))


@given(st.lists(st.sampled_from(["a", "be", "man", "walk", "dog"]), max_size=6))
def test_sentence_equivalent_reflexive_and_symmetric(tokens):
    tokens = tuple(tokens)
    assert sentence_equivalent(tokens, tokens)
    other = tuple(t for t in tokens if t not in ("a", "be"))
    assert sentence_equivalent(tokens, other)
    assert sentence_equivalent(other, tokens)


# -- search -----------------------------------------------------------------------


def test_search_sick_340(lexicon, resource):
    premise = polarized("a schoolgirl with a black bag be on a crowded train", lexicon)
    hypothesis = tuple("a girl with a black bag be on a crowded train".split())
    kb = build_kb(premise, hypothesis, resource, lexicon=lexicon)
    label, proof, base = search(premise, hypothesis, kb)
    assert label is NliLabel.ENTAIL
    assert len(proof.steps) == 1
    assert proof.steps[0].edit.before == ("schoolgirl",)
    assert proof.steps[0].edit.after == ("girl",)


def test_search_contradiction_via_entailment_step(lexicon, resource):
    premise = polarized("a girl play a flute", lexicon)
    hypothesis = tuple("no woman play a flute".split())
    kb = build_kb(premise, hypothesis, resource, lexicon=lexicon)
    label, proof, base = search(premise, hypothesis, kb)
    assert label is NliLabel.CONTRADICT
    assert proof.replay(premise.lemmas()) == hypothesis


def test_search_neutral_returns_base(lexicon):
    premise = polarized("a dog swim", lexicon)
    kb = build_kb(premise, ("a", "cat", "run"), LexicalResource.empty(), lexicon=lexicon)
    label, proof, base = search(premise, ("a", "cat", "run"), kb)
    assert label is NliLabel.NEUTRAL
    assert proof is None
    assert premise.lemmas() in base.entailments


def test_figure2_depth1_boxes_present_in_base(lexicon, resource):
    premise = polarized("a schoolgirl with a black bag be on a crowded train", lexicon)
    hypothesis = tuple("no girl be on a train".split())  # not findable; forces full expansion
    kb = build_kb(premise, hypothesis, resource, lexicon=lexicon)
    config = SearchConfig(depth=1)
    label, proof, base = search(premise, hypothesis, kb, config)
    contradictions = {" ".join(s) for s in base.contradictions}
    assert "no schoolgirl be on a crowded train" in contradictions
    assert "a schoolgirl with a bag be not on a crowded train" in contradictions


def test_cap_exceeded_falls_back_to_neutral(lexicon, resource):
    premise = polarized("a schoolgirl with a black bag be on a crowded train", lexicon)
    hypothesis = tuple("a girl be happy".split())
    kb = build_kb(premise, hypothesis, resource, lexicon=lexicon)
    label, proof, base = search(premise, hypothesis, kb, SearchConfig(depth=2, max_generated=5))
    assert label is NliLabel.NEUTRAL
    assert base.cap_exceeded


def test_depth_monotonicity_on_random_premises(lexicon):
    rng = make_rng(11)
    checked = 0
    for _ in range(500):
        premise_tokens = random_premise(rng)
        kb = random_kb(rng)
        premise = polarized(" ".join(premise_tokens), lexicon)
        shallow = expand(premise, kb, SearchConfig(depth=1), lexicon)
        deep = expand(premise, kb, SearchConfig(depth=2), lexicon)
        assert set(shallow.entailments) <= set(deep.entailments), premise_tokens
        checked += 1
    assert checked == 500


def test_proof_replay_and_polarity_licensing(lexicon):
    rng = make_rng(23)
    for _ in range(120):
        premise_tokens = random_premise(rng)
        kb = random_kb(rng)
        premise = polarized(" ".join(premise_tokens), lexicon)
        base = expand(premise, kb, SearchConfig(depth=2), lexicon)
        for sentence, proof in list(base.entailments.items()) + list(base.contradictions.items()):
            assert proof.replay(premise.lemmas()) == sentence
            for step in proof.steps:
                if step.edit.direction is EditDirection.CONTRADICTING:
                    continue
                before = polarize(parse_fragment(step.before, lexicon))
                span = step.edit.span
                if step.edit.rule == "replace-up":
                    assert polarity_of_span(before, span) is Polarity.UP
                elif step.edit.rule == "replace-down":
                    assert polarity_of_span(before, span) is Polarity.DOWN
                else:
                    spans = {
                        c.span: c.polarity
                        for c in before.constituents
                    }
                    touching = [
                        pol
                        for (start, end), pol in spans.items()
                        if start == span[0] or end == span[0]
                    ]
                    assert Polarity.DOWN in touching, (step.edit, step.before)


def test_search_is_deterministic(lexicon, resource):
    problem = ProblemRecord("x", "A man is playing a guitar", "A man is playing an instrument")
    first = classify(problem, resource)
    second = classify(problem, resource)
    assert first.label == second.label
    assert first.proof.steps == second.proof.steps


# -- classify -----------------------------------------------------------------------


def test_classify_premise_equals_hypothesis(lexicon, resource):
    problem = ProblemRecord("eq", "A man is talking", "A man is talking")
    result = classify(problem, resource)
    assert result.label is NliLabel.ENTAIL
    assert result.proof.steps == ()


def test_classify_unparseable_hypothesis_is_neutral_with_diagnostic(resource):
    problem = ProblemRecord("oov", "A man is talking", "Zygomorphic quuxes frobnicate")
    result = classify(problem, resource)
    assert result.label is NliLabel.NEUTRAL
    assert any("hypothesis" in d for d in result.diagnostics)


def test_classify_existential_preprocessing(resource):
    problem = ProblemRecord("219", "There is no girl in white dancing", "A girl in white is dancing")
    result = classify(problem, resource)
    assert result.label is NliLabel.CONTRADICT


def test_classify_never_flips_between_runs(lexicon, resource):
    rng = make_rng(5)
    for _ in range(40):
        tokens = random_premise(rng)
        problem = ProblemRecord("r", " ".join(tokens), " ".join(random_premise(rng)))
        labels = {classify(problem, resource).label for _ in range(2)}
        assert len(labels) == 1
