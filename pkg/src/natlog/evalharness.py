"""Corpus ingestion, metrics, the hybrid rule, and the end-to-end harness.

The hybrid rule: trust the symbolic engine whenever it answers Entail or
Contradict; only its Neutral verdicts are delegated to a backoff
classifier, and a backoff Entail/Contradict whose confidence falls below
the threshold (default 0.95) is demoted back to Neutral. Confidence equal
to the threshold keeps the label (strictly "not confident enough").
"""

from __future__ import annotations

import csv
import os
import tempfile
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Protocol, Sequence, Tuple

from .core import NliLabel, ProblemRecord
from .engine import ClassifyResult, SearchConfig, classify
from .errors import MissingPredictionError, SchemaError, UnknownIdError
from .kb import LexicalResource
from .preprocess import TransformConfig
from .syntax import Lexicon

LABELS = (NliLabel.ENTAIL, NliLabel.CONTRADICT, NliLabel.NEUTRAL)


# ---------------------------------------------------------------------------
# Corpus IO
# ---------------------------------------------------------------------------

_JUDGMENT_COLUMNS = ("entailment_judgment", "entailment_label")


def load_corpus(path) -> List[ProblemRecord]:
    """Read a SICK-format TSV (pair_ID, sentence_A, sentence_B, judgment)."""
    problems: List[ProblemRecord] = []
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle, delimiter="\t")
        if reader.fieldnames is None:
            raise SchemaError("corpus file is empty")
        judgment_col = next((c for c in _JUDGMENT_COLUMNS if c in reader.fieldnames), None)
        required = {"pair_ID", "sentence_A", "sentence_B"}
        missing = required - set(reader.fieldnames)
        if missing or judgment_col is None:
            raise SchemaError(f"corpus header missing columns: {sorted(missing) or _JUDGMENT_COLUMNS}")
        for lineno, row in enumerate(reader, start=2):
            try:
                gold = NliLabel.from_judgment(row[judgment_col])
            except ValueError as exc:
                raise SchemaError(f"line {lineno}: {exc}") from exc
            try:
                problems.append(
                    ProblemRecord(
                        id=row["pair_ID"].strip(),
                        premise=row["sentence_A"],
                        hypothesis=row["sentence_B"],
                        gold=gold,
                    )
                )
            except ValueError as exc:
                raise SchemaError(f"line {lineno}: {exc}") from exc
    return problems


def load_overlay(path) -> Dict[str, NliLabel]:
    """Corrected-label overlay: columns pair_ID, corrected_label."""
    overlay: Dict[str, NliLabel] = {}
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle, delimiter="\t")
        if reader.fieldnames is None or {"pair_ID", "corrected_label"} - set(reader.fieldnames):
            raise SchemaError("overlay header must have pair_ID and corrected_label")
        for lineno, row in enumerate(reader, start=2):
            try:
                overlay[row["pair_ID"].strip()] = NliLabel.from_judgment(row["corrected_label"])
            except ValueError as exc:
                raise SchemaError(f"line {lineno}: {exc}") from exc
    return overlay


@dataclass(frozen=True)
class CorrectionRecord:
    problem_id: str
    old: Optional[NliLabel]
    new: NliLabel


def apply_corrections(
    problems: Sequence[ProblemRecord], overlay: Dict[str, NliLabel]
) -> Tuple[List[ProblemRecord], List[CorrectionRecord]]:
    """Replace gold labels for overlaid ids; unknown ids are an error."""
    by_id = {p.id: p for p in problems}
    for problem_id in overlay:
        if problem_id not in by_id:
            raise UnknownIdError(problem_id)
    changed: List[CorrectionRecord] = []
    out: List[ProblemRecord] = []
    for problem in problems:
        new = overlay.get(problem.id)
        if new is not None and new != problem.gold:
            changed.append(CorrectionRecord(problem.id, problem.gold, new))
            problem = ProblemRecord(problem.id, problem.premise, problem.hypothesis, new)
        out.append(problem)
    return out, changed


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EvalReport:
    accuracy: float  # percent
    per_label: Dict[NliLabel, Tuple[float, float]]  # label -> (P, R), percents
    macro_precision: float
    macro_recall: float
    counts: Dict[Tuple[NliLabel, NliLabel], int]  # (gold, predicted) -> count
    degenerate_precision: Tuple[NliLabel, ...] = ()  # labels never predicted

    def total(self) -> int:
        return sum(self.counts.values())

    def render_table(self, system: str = "engine") -> str:
        width = max(len(system), 6)
        lines = [
            f"{'system':<{width}}  {'P':>7} {'R':>7} {'acc.':>7}",
            f"{system:<{width}}  {self.macro_precision:>7.2f} {self.macro_recall:>7.2f} {self.accuracy:>7.2f}",
        ]
        return "\n".join(lines)

    def render_per_label(self) -> str:
        lines = ["label  P       R"]
        for label in LABELS:
            p, r = self.per_label[label]
            flag = " (no predictions)" if label in self.degenerate_precision else ""
            lines.append(f"{label.value}      {p:7.2f} {r:7.2f}{flag}")
        return "\n".join(lines)

    def render_kv(self) -> str:
        lines = [f"accuracy\t{self.accuracy:.2f}"]
        for label in LABELS:
            p, r = self.per_label[label]
            lines.append(f"precision_{label.value}\t{p:.2f}")
            lines.append(f"recall_{label.value}\t{r:.2f}")
        lines.append(f"macro_precision\t{self.macro_precision:.2f}")
        lines.append(f"macro_recall\t{self.macro_recall:.2f}")
        for gold in LABELS:
            for predicted in LABELS:
                lines.append(f"count_{gold.value}_{predicted.value}\t{self.counts[(gold, predicted)]}")
        return "\n".join(lines)


def evaluate(predictions: Dict[str, NliLabel], gold: Sequence[ProblemRecord]) -> EvalReport:
    """Confusion matrix, accuracy, per-label and macro precision/recall."""
    counts = {(g, p): 0 for g in LABELS for p in LABELS}
    for problem in gold:
        if problem.id not in predictions:
            raise MissingPredictionError(problem.id)
        if problem.gold is None:
            raise ValueError(f"problem {problem.id} has no gold label")
        counts[(problem.gold, predictions[problem.id])] += 1
    total = sum(counts.values())
    correct = sum(counts[(label, label)] for label in LABELS)
    accuracy = 100.0 * correct / total if total else 0.0
    per_label: Dict[NliLabel, Tuple[float, float]] = {}
    degenerate: List[NliLabel] = []
    for label in LABELS:
        predicted = sum(counts[(g, label)] for g in LABELS)
        actual = sum(counts[(label, p)] for p in LABELS)
        if predicted == 0:
            precision = 0.0
            degenerate.append(label)
        else:
            precision = 100.0 * counts[(label, label)] / predicted
        recall = 100.0 * counts[(label, label)] / actual if actual else 0.0
        per_label[label] = (precision, recall)
    macro_p = sum(per_label[l][0] for l in LABELS) / len(LABELS)
    macro_r = sum(per_label[l][1] for l in LABELS) / len(LABELS)
    return EvalReport(accuracy, per_label, macro_p, macro_r, counts, tuple(degenerate))


# ---------------------------------------------------------------------------
# Backoff classifiers and the hybrid rule
# ---------------------------------------------------------------------------


class BackoffClassifier(Protocol):
    def classify(self, premise: str, hypothesis: str) -> Tuple[NliLabel, Dict[NliLabel, float]]:
        """Label plus a confidence per label; confidences sum to 1."""
        ...


class AlwaysNeutralBackoff:
    """Keeps every delegated verdict Neutral."""

    def classify(self, premise: str, hypothesis: str):
        return NliLabel.NEUTRAL, {NliLabel.ENTAIL: 0.0, NliLabel.CONTRADICT: 0.0, NliLabel.NEUTRAL: 1.0}


class LexicalOverlapBackoff:
    """Toy confidence model: token overlap read as entailment confidence."""

    def classify(self, premise: str, hypothesis: str):
        p = set(premise.lower().split())
        h = set(hypothesis.lower().split())
        overlap = len(p & h) / len(p | h) if p | h else 0.0
        confidences = {NliLabel.ENTAIL: overlap, NliLabel.CONTRADICT: 0.0, NliLabel.NEUTRAL: 1.0 - overlap}
        label = max(LABELS, key=lambda l: confidences[l])
        return label, confidences


class GoldOracleBackoff:
    """Testing stub that answers with the gold label at fixed confidence."""

    def __init__(self, gold: Dict[str, NliLabel], confidence: float = 1.0):
        self._by_pair: Dict[Tuple[str, str], NliLabel] = {}
        self._gold = gold
        self.confidence = confidence

    def register(self, problem: ProblemRecord) -> None:
        if problem.gold is not None:
            self._by_pair[(problem.premise, problem.hypothesis)] = problem.gold

    def classify(self, premise: str, hypothesis: str):
        label = self._by_pair.get((premise, hypothesis), NliLabel.NEUTRAL)
        rest = (1.0 - self.confidence) / 2
        confidences = {l: rest for l in LABELS}
        confidences[label] = self.confidence
        return label, confidences


def hybrid_classify(
    problem: ProblemRecord,
    engine_result: Tuple[NliLabel, object],
    backoff: BackoffClassifier,
    threshold: float = 0.95,
) -> NliLabel:
    """Engine E/C verdicts stand; Neutral defers to the backoff with a floor."""
    engine_label = engine_result[0]
    if engine_label in (NliLabel.ENTAIL, NliLabel.CONTRADICT):
        return engine_label
    label, confidences = backoff.classify(problem.premise, problem.hypothesis)
    if label in (NliLabel.ENTAIL, NliLabel.CONTRADICT) and confidences[label] < threshold:
        return NliLabel.NEUTRAL
    return label


# ---------------------------------------------------------------------------
# End-to-end harness
# ---------------------------------------------------------------------------


@dataclass
class PipelineConfig:
    resource: Optional[LexicalResource] = None
    search: SearchConfig = field(default_factory=SearchConfig)
    transforms: TransformConfig = field(default_factory=TransformConfig)
    lexicon: Optional[Lexicon] = None
    backoff: Optional[BackoffClassifier] = None
    threshold: float = 0.95
    extra_relations: Sequence = ()


@dataclass
class PipelineOutput:
    report: EvalReport
    predictions: Dict[str, NliLabel]
    traces: Dict[str, str]

    def write_traces(self, path) -> None:
        path = os.fspath(path)
        directory = os.path.dirname(path) or "."
        fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                for problem_id in sorted(self.traces, key=_id_key):
                    handle.write(f"== problem {problem_id}\n{self.traces[problem_id]}\n")
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def _id_key(problem_id: str):
    return (0, int(problem_id)) if problem_id.isdigit() else (1, problem_id)


def run_pipeline(corpus: Sequence[ProblemRecord], config: PipelineConfig) -> PipelineOutput:
    """Classify every problem (engine alone or hybrid) and build the report."""
    predictions: Dict[str, NliLabel] = {}
    traces: Dict[str, str] = {}
    for problem in corpus:
        result: ClassifyResult = classify(
            problem,
            resource=config.resource,
            config=config.search,
            transforms=config.transforms,
            lexicon=config.lexicon,
            extra_relations=config.extra_relations,
        )
        label = result.label
        if config.backoff is not None:
            label = hybrid_classify(problem, (result.label, result.proof), config.backoff, config.threshold)
        predictions[problem.id] = label
        lines = []
        if result.proof is not None and result.proof.steps:
            lines.append(result.proof.render())
        else:
            lines.append(f"verdict: {label.to_judgment()}")
        for diagnostic in result.diagnostics:
            lines.append(f"note: {diagnostic}")
        traces[problem.id] = "\n".join(lines)
    report = evaluate(predictions, corpus)
    return PipelineOutput(report, predictions, traces)
