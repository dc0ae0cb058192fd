import csv

import pytest

from natlog.augment import (
    GeneratedPair,
    apply_filters,
    export_pairs,
    filter_repeated_bigrams,
    generate_pairs,
    has_repeated_bigram,
    sample_fraction,
)
from natlog.core import NliLabel, ProblemRecord
from natlog.data import mini_corpus_path
from natlog.evalharness import load_corpus
from natlog.kb import LexicalResource


@pytest.fixture(scope="module")
def resource():
    return LexicalResource.bundled()


@pytest.fixture(scope="module")
def mini_pairs(resource):
    problems = load_corpus(mini_corpus_path())
    pairs, diagnostics = generate_pairs(problems, resource)
    return pairs, diagnostics


def pair(premise, hypothesis, label=NliLabel.ENTAIL, source="t", depth=1):
    return GeneratedPair(tuple(premise.split()), tuple(hypothesis.split()), label, source, depth)


def test_generated_pair_validation():
    with pytest.raises(ValueError):
        pair("a dog swim", "a dog swim")
    with pytest.raises(ValueError):
        GeneratedPair(("a",), ("b",), NliLabel.NEUTRAL, "t", 1)


def test_generate_pairs_table6_style_rows(resource):
    problems = [
        ProblemRecord("g1", "A woman is not cooking something", "A person is not cooking something"),
        ProblemRecord("g2", "No panda is climbing", "Some panda is climbing"),
    ]
    pairs, diagnostics = generate_pairs(problems, resource)
    assert diagnostics == []
    as_text = {(" ".join(p.premise), " ".join(p.hypothesis), p.label) for p in pairs}
    assert (
        "a woman be not cook something",
        "a person be not cook something",
        NliLabel.ENTAIL,
    ) in as_text
    assert ("no panda be climb", "some panda be climb", NliLabel.CONTRADICT) in as_text


def test_generate_pairs_skips_unparseable_with_diagnostic(resource):
    problems = [ProblemRecord("bad", "Colorless green ideas sleep furiously and and", "x y")]
    pairs, diagnostics = generate_pairs(problems, resource)
    assert pairs == []
    assert len(diagnostics) == 1


def test_generate_pairs_never_pairs_premise_with_itself(mini_pairs):
    pairs, _ = mini_pairs
    assert pairs
    for p in pairs:
        assert p.premise != p.hypothesis
        assert p.label in (NliLabel.ENTAIL, NliLabel.CONTRADICT)


def test_repeated_bigram_filter():
    kept = filter_repeated_bigrams(
        [
            pair("a man be walk", "young young man be walk"),
            pair("a man be walk", "a man be talk"),
            pair(
                "a south african plane be not fly in a blue sky",
                "a south african plane be not fly in a very blue sky in a blue sky",
            ),
        ]
    )
    texts = [" ".join(p.hypothesis) for p in kept]
    assert "young young man be walk" not in texts
    assert "a man be talk" in texts
    # Duplicated prepositional phrases are NOT adjacent-duplicate words: the
    # stated filter keeps them (a documented limitation).
    assert "a south african plane be not fly in a very blue sky in a blue sky" in texts


def test_filter_output_has_no_adjacent_duplicates(mini_pairs):
    pairs, _ = mini_pairs
    for p in apply_filters(pairs):
        assert not has_repeated_bigram(p.premise)
        assert not has_repeated_bigram(p.hypothesis)


def test_extra_filter_hook():
    pairs = [pair("a man be walk", "a man be talk"), pair("a man be walk", "a man move")]
    kept = apply_filters(pairs, extra_filters=[lambda p: "move" not in p.hypothesis])
    assert len(kept) == 1


def test_sample_fraction_sizes_and_determinism():
    pairs = [pair("a man be walk", f"a man be walk p{i}") for i in range(1000)]
    quarter = sample_fraction(pairs, 0.25, seed=7)
    assert len(quarter) == 250
    assert sample_fraction(pairs, 0.25, seed=7) == quarter
    assert sample_fraction(pairs, 1.0, seed=3) == pairs
    halves = sample_fraction(pairs, 0.5, seed=1), sample_fraction(pairs, 0.5, seed=2)
    assert len(halves[0]) == len(halves[1]) == 500
    assert halves[0] != halves[1]


def test_export_pairs_round_trips_through_corpus_loader(tmp_path, mini_pairs):
    pairs, _ = mini_pairs
    kept = apply_filters(pairs)
    out = tmp_path / "pairs.tsv"
    export_pairs(kept, out)
    with open(out, encoding="utf-8", newline="") as handle:
        rows = list(csv.reader(handle, delimiter="\t"))
    assert rows[0] == ["pair_ID", "sentence_A", "sentence_B", "entailment_label", "source_id", "depth"]
    assert len(rows) == len(kept) + 1
    assert all(row[3] in ("ENTAILMENT", "CONTRADICTION") for row in rows[1:])
    reloaded = load_corpus(out)
    assert len(reloaded) == len(kept)
    assert {p.gold for p in reloaded} <= {NliLabel.ENTAIL, NliLabel.CONTRADICT}


def test_export_empty_list_writes_header_only(tmp_path):
    out = tmp_path / "empty.tsv"
    export_pairs([], out)
    assert out.read_text(encoding="utf-8") == "pair_ID\tsentence_A\tsentence_B\tentailment_label\tsource_id\tdepth\n"
