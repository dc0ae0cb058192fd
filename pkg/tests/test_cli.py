import json

import pytest

from natlog.cli import main
from natlog.data import mini_corpus_path


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_polarize_sentence(capsys):
    code, out, err = run(capsys, "polarize", "Every linguist swims")
    assert code == 0
    assert out.strip() == "every↑ linguist↓ swim↑"


def test_polarize_requires_input(capsys):
    code, out, err = run(capsys, "polarize")
    assert code == 2
    assert "sentence" in err


def test_polarize_oov_exits_nonzero_and_names_word(capsys):
    code, out, err = run(capsys, "polarize", "Every zyzzyva swims")
    assert code == 1
    assert "zyzzyva" in err


def test_classify_pair_with_trace(capsys):
    code, out, err = run(
        capsys,
        "classify",
        "A schoolgirl with a black bag is on a crowded train",
        "A girl with a black bag is on a crowded train",
        "--trace",
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "ENTAILMENT"
    assert "'schoolgirl'->'girl'" in lines[1]


def test_classify_identical_pair(capsys):
    code, out, _ = run(capsys, "classify", "A man is talking", "A man is talking")
    assert code == 0
    assert out.strip() == "ENTAILMENT"


def test_classify_unparseable_hypothesis_neutral(capsys):
    code, out, _ = run(capsys, "classify", "A man is talking", "Gallimaufry xylotomy")
    assert code == 0
    assert out.splitlines()[0] == "NEUTRAL"
    assert "note:" in out


def test_generate_prints_sentence_base(capsys):
    code, out, _ = run(capsys, "generate", "No panda is climbing")
    assert code == 0
    assert "# entailments" in out and "# contradictions" in out
    assert "some panda be climb" in out


def test_eval_mini_corpus(capsys, tmp_path):
    out_dir = tmp_path / "run"
    code, out, _ = run(
        capsys, "eval", str(mini_corpus_path()), "--out-dir", str(out_dir)
    )
    assert code == 0
    assert "engine" in out
    assert (out_dir / "report.txt").exists()
    assert (out_dir / "traces.txt").exists()
    report = (out_dir / "report.txt").read_text(encoding="utf-8")
    assert "accuracy\t100.00" in report


def test_eval_with_overlay(capsys, tmp_path):
    overlay = tmp_path / "overlay.tsv"
    overlay.write_text("pair_ID\tcorrected_label\n9041\tNEUTRAL\n", encoding="utf-8")
    code, out, _ = run(capsys, "eval", str(mini_corpus_path()), "--overlay", str(overlay))
    assert code == 0
    assert "corrections applied: 0" in out  # same label, nothing changes


def test_eval_missing_file_nonzero(capsys):
    code, _, err = run(capsys, "eval", "/nonexistent/corpus.tsv")
    assert code == 1
    assert "error" in err


def test_augment_rejects_odd_fraction(capsys, tmp_path):
    code, _, err = run(
        capsys, "augment", str(mini_corpus_path()), "--fraction", "0.9",
        "--out", str(tmp_path / "x.tsv"),
    )
    assert code == 2
    assert "fraction" in err


def test_augment_deterministic_outputs(capsys, tmp_path):
    out_a = tmp_path / "a.tsv"
    out_b = tmp_path / "b.tsv"
    code_a, stats_a, _ = run(
        capsys, "augment", str(mini_corpus_path()), "--fraction", "0.25",
        "--seed", "0", "--out", str(out_a),
    )
    code_b, stats_b, _ = run(
        capsys, "augment", str(mini_corpus_path()), "--fraction", "0.25",
        "--seed", "0", "--out", str(out_b),
    )
    assert code_a == code_b == 0
    assert stats_a == stats_b
    assert out_a.read_bytes() == out_b.read_bytes()
    assert "E=" in stats_a and "C=" in stats_a


def test_kb_dump(capsys):
    code, out, _ = run(capsys, "kb-dump", "every linguist swims", "every semanticist swims")
    assert code == 0
    assert "LEQ\tsemanticist\tlinguist" in out
    assert "PERP\toff\ton" in out or "PERP\ton\toff" in out


def test_config_file_with_flag_override(capsys, tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"depth": 1, "transforms": "none"}), encoding="utf-8")
    # Existential transform disabled by config: 219 becomes unparseable -> N.
    code, out, _ = run(
        capsys, "--config", str(config),
        "classify", "There is no girl in white dancing", "A girl in white is dancing",
    )
    assert code == 0
    assert out.splitlines()[0] == "NEUTRAL"
    # Flag overrides the config file.
    code, out, _ = run(
        capsys, "--config", str(config),
        "classify", "There is no girl in white dancing", "A girl in white is dancing",
        "--transforms", "all",
    )
    assert code == 0
    assert out.splitlines()[0] == "CONTRADICTION"
