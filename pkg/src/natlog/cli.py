"""Command-line surface: polarize, classify, generate, augment, eval, kb-dump.

Configuration precedence: command-line flags > JSON config file > defaults.
All randomness flows through a single seed (default 0), so repeated runs
are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from .augment import ALLOWED_FRACTIONS, apply_filters, export_pairs, generate_pairs, sample_fraction
from .core import NliLabel, ProblemRecord
from .data import default_lexicon
from .engine import SearchConfig, classify, expand
from .errors import NatlogError
from .evalharness import (
    AlwaysNeutralBackoff,
    GoldOracleBackoff,
    LexicalOverlapBackoff,
    PipelineConfig,
    apply_corrections,
    load_corpus,
    load_overlay,
    run_pipeline,
)
from .kb import LexicalResource, build_kb, load_relations_tsv
from .polarizer import polarize
from .preprocess import TransformConfig, preprocess_sentence
from .syntax import Lexicon, parse_fragment


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="natlog", description="Monotonicity-based natural logic engine")
    parser.add_argument("--config", help="JSON config file; flags override its values")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--lexicon", help="lexicon TSV (defaults to the bundled one)")
        p.add_argument("--resource", help="lexical resource TSV (defaults to the bundled one)")
        p.add_argument("--relations", help="extra relations TSV")
        p.add_argument("--rewrites", help="rewrite table TSV")
        p.add_argument("--depth", type=int, help="search depth (default 2)")
        p.add_argument("--max-generated", type=int, help="sentence base cap (default 10000)")
        p.add_argument("--transforms", help="comma list from {pass2act,existential,rewrites}, or 'all'/'none'")
        p.add_argument("--seed", type=int, help="random seed (default 0)")

    p = sub.add_parser("polarize", help="print the arrow-tagged sentence")
    common(p)
    p.add_argument("sentence", nargs="?", help="raw sentence (or use --file)")
    p.add_argument("--file", help="file with one sentence per line")

    p = sub.add_parser("classify", help="classify a premise-hypothesis pair or a corpus")
    common(p)
    p.add_argument("premise", nargs="?")
    p.add_argument("hypothesis", nargs="?")
    p.add_argument("--corpus", help="SICK-format TSV to classify")
    p.add_argument("--trace", action="store_true", help="print the proof trace")

    p = sub.add_parser("generate", help="print the sentence base for one sentence")
    common(p)
    p.add_argument("sentence")
    p.add_argument("--hypothesis", default="", help="optional hypothesis (adds its vocabulary)")

    p = sub.add_parser("augment", help="generate labeled training pairs from a corpus")
    common(p)
    p.add_argument("corpus")
    p.add_argument("--fraction", type=float, default=1.0)
    p.add_argument("--allow-any-fraction", action="store_true")
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval", help="classify a corpus and print the report")
    common(p)
    p.add_argument("corpus")
    p.add_argument("--overlay", help="corrected-label overlay TSV")
    p.add_argument("--mode", choices=["engine", "hybrid"], default="engine")
    p.add_argument("--backoff", choices=["neutral", "overlap", "gold"], default="neutral")
    p.add_argument("--threshold", type=float, default=0.95)
    p.add_argument("--out-dir", help="write report.txt and traces.txt here")

    p = sub.add_parser("kb-dump", help="print the knowledge base for a pair")
    common(p)
    p.add_argument("premise")
    p.add_argument("hypothesis")
    return parser


def _merge_config(args: argparse.Namespace) -> dict:
    config = {}
    if args.config:
        with open(args.config, encoding="utf-8") as handle:
            config = json.load(handle)
    merged = dict(config)
    for key, value in vars(args).items():
        if value is not None and key not in ("config", "command"):
            merged[key] = value
    merged.setdefault("seed", 0)
    merged.setdefault("depth", 2)
    merged.setdefault("max_generated", 10000)
    return merged


def _transforms_from(merged: dict) -> TransformConfig:
    spec = merged.get("transforms")
    if spec in (None, "all"):
        return TransformConfig()
    if spec == "none":
        return TransformConfig.none()
    parts = {part.strip() for part in str(spec).split(",") if part.strip()}
    unknown = parts - {"pass2act", "existential", "rewrites"}
    if unknown:
        raise NatlogError(f"unknown transforms: {sorted(unknown)}")
    return TransformConfig(
        enable_pass2act="pass2act" in parts,
        enable_existential="existential" in parts,
        enable_lexical_rewrites="rewrites" in parts,
    )


def _load_context(merged: dict):
    lexicon = Lexicon.from_tsv(merged["lexicon"]) if merged.get("lexicon") else default_lexicon()
    resource = (
        LexicalResource.from_tsv(merged["resource"]) if merged.get("resource") else LexicalResource.bundled()
    )
    extra = load_relations_tsv(merged["relations"]) if merged.get("relations") else []
    search = SearchConfig(depth=merged["depth"], max_generated=merged["max_generated"])
    return lexicon, resource, extra, search, _transforms_from(merged)


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cmd_polarize(merged: dict) -> int:
    lexicon, _, _, _, transforms = _load_context(merged)
    sentences = []
    if merged.get("file"):
        with open(merged["file"], encoding="utf-8") as handle:
            sentences = [line.strip() for line in handle if line.strip()]
    elif merged.get("sentence"):
        sentences = [merged["sentence"]]
    if not sentences:
        print("error: provide a sentence or --file", file=sys.stderr)
        return 2
    for sentence in sentences:
        tokens = preprocess_sentence(sentence, lexicon, transforms)
        print(polarize(parse_fragment(tokens, lexicon)).render())
    return 0


def _cmd_classify(merged: dict) -> int:
    lexicon, resource, extra, search, transforms = _load_context(merged)
    problems = []
    if merged.get("corpus"):
        problems = load_corpus(merged["corpus"])
    elif merged.get("premise") and merged.get("hypothesis"):
        problems = [ProblemRecord("cli", merged["premise"], merged["hypothesis"], None)]
    else:
        print("error: provide PREMISE HYPOTHESIS or --corpus", file=sys.stderr)
        return 2
    for problem in problems:
        result = classify(problem, resource, search, transforms, lexicon, extra)
        prefix = f"{problem.id}\t" if merged.get("corpus") else ""
        print(f"{prefix}{result.label.to_judgment()}")
        if merged.get("trace") and result.proof is not None and result.proof.steps:
            print(result.proof.render())
        for diagnostic in result.diagnostics:
            print(f"note: {diagnostic}")
    return 0


def _cmd_generate(merged: dict) -> int:
    lexicon, resource, extra, search, transforms = _load_context(merged)
    tokens = preprocess_sentence(merged["sentence"], lexicon, transforms)
    premise = polarize(parse_fragment(tokens, lexicon))
    hypothesis = tuple(
        t.lemma for t in preprocess_sentence(merged.get("hypothesis", ""), lexicon, transforms)
    )
    kb = build_kb(premise, hypothesis, resource, extra=extra, lexicon=lexicon)
    base = expand(premise, kb, search, lexicon)
    print("# entailments")
    for sentence in base.entailments:
        print(" ".join(sentence))
    print("# contradictions")
    for sentence in base.contradictions:
        print(" ".join(sentence))
    return 0


def _cmd_augment(merged: dict) -> int:
    lexicon, resource, extra, search, transforms = _load_context(merged)
    fraction = merged.get("fraction", 1.0)
    if fraction not in ALLOWED_FRACTIONS and not merged.get("allow_any_fraction"):
        print(
            f"error: fraction must be one of {ALLOWED_FRACTIONS} (use --allow-any-fraction to override)",
            file=sys.stderr,
        )
        return 2
    problems = load_corpus(merged["corpus"])
    pairs, diagnostics = generate_pairs(problems, resource, search, transforms, lexicon)
    kept = apply_filters(pairs)
    sampled = sample_fraction(kept, fraction, merged["seed"])
    export_pairs(sampled, merged["out"])
    entail = sum(1 for p in sampled if p.label is NliLabel.ENTAIL)
    contradict = len(sampled) - entail
    print(
        f"generated={len(pairs)} filtered={len(pairs) - len(kept)} "
        f"exported={len(sampled)} E={entail} C={contradict}"
    )
    for diagnostic in diagnostics:
        print(f"note: {diagnostic}")
    return 0


def _cmd_eval(merged: dict) -> int:
    lexicon, resource, extra, search, transforms = _load_context(merged)
    problems = load_corpus(merged["corpus"])
    if merged.get("overlay"):
        problems, changed = apply_corrections(problems, load_overlay(merged["overlay"]))
        print(f"corrections applied: {len(changed)}")
    backoff = None
    if merged.get("mode") == "hybrid":
        name = merged.get("backoff", "neutral")
        if name == "neutral":
            backoff = AlwaysNeutralBackoff()
        elif name == "overlap":
            backoff = LexicalOverlapBackoff()
        else:
            backoff = GoldOracleBackoff({p.id: p.gold for p in problems})
            for problem in problems:
                backoff.register(problem)
    config = PipelineConfig(
        resource=resource,
        search=search,
        transforms=transforms,
        lexicon=lexicon,
        backoff=backoff,
        threshold=merged.get("threshold", 0.95),
        extra_relations=extra,
    )
    output = run_pipeline(problems, config)
    system = "engine" if backoff is None else "hybrid"
    print(output.report.render_table(system))
    print()
    print(output.report.render_per_label())
    if merged.get("out_dir"):
        os.makedirs(merged["out_dir"], exist_ok=True)
        _atomic_write(os.path.join(merged["out_dir"], "report.txt"), output.report.render_kv() + "\n")
        output.write_traces(os.path.join(merged["out_dir"], "traces.txt"))
    return 0


def _cmd_kb_dump(merged: dict) -> int:
    lexicon, resource, extra, search, transforms = _load_context(merged)
    premise_tokens = preprocess_sentence(merged["premise"], lexicon, transforms)
    hypothesis_tokens = preprocess_sentence(merged["hypothesis"], lexicon, transforms)
    premise = polarize(parse_fragment(premise_tokens, lexicon))
    kb = build_kb(premise, tuple(t.lemma for t in hypothesis_tokens), resource, extra=extra, lexicon=lexicon)
    for lhs, rhs in kb.leq_pairs():
        print(f"LEQ\t{'_'.join(lhs)}\t{'_'.join(rhs)}")
    for lhs, rhs in kb.perp_pairs():
        print(f"PERP\t{'_'.join(lhs)}\t{'_'.join(rhs)}")
    return 0


_COMMANDS = {
    "polarize": _cmd_polarize,
    "classify": _cmd_classify,
    "generate": _cmd_generate,
    "augment": _cmd_augment,
    "eval": _cmd_eval,
    "kb-dump": _cmd_kb_dump,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        merged = _merge_config(args)
        return _COMMANDS[args.command](merged)
    except NatlogError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
