import json
import random

import pytest

from natlog.data import default_lexicon
from natlog.errors import CombinationError, NoParseError, OovError, SchemaError
from natlog.syntax import (
    Apply,
    Leaf,
    Lexicon,
    derivation_to_document,
    fuse_multiwords,
    load_derivation,
    parse_category,
    parse_fragment,
    yield_of,
)


@pytest.fixture(scope="module")
def lexicon():
    return default_lexicon()


# -- categories -------------------------------------------------------------


def test_category_parse_render_round_trip():
    for text in [
        "N",
        "S\\NP[+]",
        "(S\\NP[+])/NP[+]",
        "(N\\N[+])/NP[-]",
        "(S/(S\\NP[+])[+])/N[-]",
        "(S\\NP[+])\\(S\\NP[+])[+]",
    ]:
        cat = parse_category(text)
        assert parse_category(cat.render()) == cat


def test_category_mark_defaults_to_up():
    cat = parse_category("(S\\NP)/NP[-]")
    assert cat.slot_mono.value == "-"
    assert cat.result.slot_mono.value == "+"


def test_category_rejects_garbage():
    for bad in ["", "X", "S/", "(S\\NP", "N[+]", "S\\NP[?]"]:
        with pytest.raises(ValueError):
            parse_category(bad)


# -- fragment parsing -------------------------------------------------------


def test_parse_every_linguist_swim(lexicon):
    tree = parse_fragment(["every", "linguist", "swim"], lexicon)
    assert tree.cat.skeleton() == "S"
    assert yield_of(tree) == ("every", "linguist", "swim")
    # Quantifier applies to the restrictor first, then to the scope.
    assert isinstance(tree, Apply)
    assert yield_of(tree.fn) == ("every", "linguist")
    assert yield_of(tree.arg) == ("swim",)


def test_parse_figure2_contradiction_sentence(lexicon):
    tree = parse_fragment("no schoolgirl be on a crowded train".split(), lexicon)
    assert tree.cat.skeleton() == "S"
    assert yield_of(tree) == tuple("no schoolgirl be on a crowded train".split())


def test_parse_rejects_bad_order(lexicon):
    with pytest.raises(NoParseError):
        parse_fragment(["linguist", "every", "swim"], lexicon)


def test_parse_names_oov_token(lexicon):
    with pytest.raises(OovError) as excinfo:
        parse_fragment(["every", "zyzzyva", "swim"], lexicon)
    assert "zyzzyva" in str(excinfo.value)


def test_yield_of_leaf_and_figure2_premise(lexicon):
    leaf = parse_fragment(["people", "swim"], lexicon)
    assert yield_of(leaf) == ("people", "swim")
    tree = parse_fragment("a schoolgirl with a black bag be on a crowded train".split(), lexicon)
    assert yield_of(tree) == ("a", "schoolgirl", "with", "a", "black", "bag", "be", "on", "a", "crowded", "train")


def test_parse_is_deterministic(lexicon):
    a = parse_fragment("a man be talk to a woman".split(), lexicon)
    b = parse_fragment("a man be talk to a woman".split(), lexicon)
    assert a == b


@pytest.mark.parametrize(
    "sentence",
    [
        "every linguist swim",
        "no schoolgirl be on a crowded train",
        "a schoolgirl with a black bag be on a crowded train",
        "few people be eat at red table in a restaurant without light",
        "a woman be not cook something",
        "every poodle be a dog",
        "a man on stage be sing into a microphone",
        "every dog that bite swim",
        "two girl be sit",
        "the train be crowded",
        "a man do not run",
        "no man rapidly be chop some mushroom with a knife",
    ],
)
def test_parse_round_trips_through_yield(sentence, lexicon):
    tokens = tuple(sentence.split())
    tree = parse_fragment(tokens, lexicon)
    assert yield_of(tree) == fuse_multiwords(tokens)
    again = parse_fragment(yield_of(tree), lexicon)
    assert again == tree


def test_fuse_multiwords():
    assert fuse_multiwords(("a", "few", "dog", "swim")) == ("a_few", "dog", "swim")
    assert fuse_multiwords(("a", "dog", "swim")) == ("a", "dog", "swim")


# -- derivation documents ---------------------------------------------------


def test_load_derivation_leaf():
    tree = load_derivation({"leaf": {"lemma": "linguist", "surface": "linguists", "cat": "N"}})
    assert isinstance(tree, Leaf)
    assert tree.token.surface == "linguists"


def test_load_derivation_three_leaf_sentence():
    doc = {
        "apply": {
            "cat": "S",
            "fn": {
                "apply": {
                    "cat": "S/(S\\NP[+])",
                    "fn": {"leaf": {"lemma": "every", "cat": "(S/(S\\NP[+])[+])/N[-]"}},
                    "arg": {"leaf": {"lemma": "linguist", "cat": "N"}},
                }
            },
            "arg": {"leaf": {"lemma": "swim", "cat": "S\\NP[+]"}},
        }
    }
    tree = load_derivation(doc)
    assert tree.cat.skeleton() == "S"
    assert yield_of(tree) == ("every", "linguist", "swim")


def test_load_derivation_round_trips(lexicon):
    tree = parse_fragment("a schoolgirl with a black bag be on a crowded train".split(), lexicon)
    doc = derivation_to_document(tree)
    again = load_derivation(json.dumps(doc))
    assert yield_of(again) == yield_of(tree)
    assert again.cat.skeleton() == tree.cat.skeleton()


def test_load_derivation_rejects_mismatched_categories():
    doc = {
        "apply": {
            "cat": "N",
            "fn": {"leaf": {"lemma": "black", "cat": "N"}},
            "arg": {"leaf": {"lemma": "bag", "cat": "N"}},
        }
    }
    with pytest.raises(CombinationError):
        load_derivation(doc)


def test_load_derivation_schema_errors_carry_path():
    with pytest.raises(SchemaError) as excinfo:
        load_derivation({"apply": {"cat": "S", "fn": {"leaf": {"cat": "N"}}, "arg": {"leaf": {"lemma": "x", "cat": "N"}}}})
    assert "/fn" in str(excinfo.value)
    with pytest.raises(SchemaError):
        load_derivation("this is not json")
    with pytest.raises(SchemaError):
        load_derivation({"neither": {}})


def test_load_derivation_fuzzed_corruptions_all_rejected(lexicon):
    tree = parse_fragment("a schoolgirl with a black bag be on a crowded train".split(), lexicon)
    doc = derivation_to_document(tree)
    rng = random.Random(7)
    rejected = 0
    attempts = 0

    def corrupt(node, mode):
        node = json.loads(json.dumps(node))
        targets = []

        def collect(n, path):
            targets.append((n, path))
            body = n.get("apply")
            if body:
                collect(body["fn"], path + "/fn")
                collect(body["arg"], path + "/arg")

        collect(node, "")
        victim, _ = targets[rng.randrange(len(targets))]
        body = victim.get("apply") or victim.get("leaf")
        if mode == 0:
            body["cat"] = "garbage("
        elif mode == 1 and "apply" in victim:
            body["cat"] = "N" if body["cat"] != "N" else "PP"
        elif mode == 2:
            body.pop("cat")
        elif mode == 3 and "leaf" in victim:
            body["lemma"] = 17
        else:
            victim.clear()
            victim["unknown"] = {}
        return node

    for i in range(60):
        bad = corrupt(doc, i % 5)
        if bad == doc:
            continue
        attempts += 1
        try:
            load_derivation(bad)
        except (SchemaError, CombinationError):
            rejected += 1
    assert attempts > 0
    assert rejected == attempts


def test_lexicon_contains_marked_quantifiers(lexicon):
    for det in ["every", "all", "each", "most", "many", "a_few", "several", "some", "a", "no", "the", "few"]:
        marks = lexicon.det_marks(det)
        assert marks is not None, det
    restrictor, scope = lexicon.det_marks("every")
    assert restrictor.value == "-" and scope.value == "+"
    restrictor, scope = lexicon.det_marks("no")
    assert restrictor.value == "-" and scope.value == "-"
    restrictor, scope = lexicon.det_marks("the")
    assert restrictor.value == "=" and scope.value == "+"
