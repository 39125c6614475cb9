"""Recommendation-quality metrics over judge verdicts: top-k precision,
binary-relevance nDCG, satisfied counts, intra-list diversity, attribute
satisfaction rates, and confidence-based aggregation across judge runs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .embedding import Vector, cosine_similarity

SATISFIED = "satisfied"
UNSATISFIED = "unsatisfied"
ATTR_SATISFIED = "satisfied"
ATTR_NOT_SATISFIED = "not_satisfied"
ATTR_NOT_MENTIONED = "not_mentioned"


@dataclass(frozen=True)
class AttributeAssessment:
    status: str  # satisfied | not_satisfied | not_mentioned
    rationale: str = ""


@dataclass(frozen=True)
class JudgeVerdict:
    """Per-item satisfaction label with confidence in [0, 1] and
    attribute-level assessments."""

    item_id: str
    label: str  # satisfied | unsatisfied
    confidence: float
    attributes: Mapping[str, AttributeAssessment] = field(default_factory=dict)

    @property
    def relevant(self) -> int:
        return 1 if self.label == SATISFIED else 0

    def to_json(self) -> dict:
        return {
            "item_id": self.item_id,
            "label": self.label,
            "confidence": self.confidence,
            "attributes": {
                name: {"status": a.status, "rationale": a.rationale}
                for name, a in sorted(self.attributes.items())
            },
        }


def _relevance_prefix(verdicts: Sequence[JudgeVerdict], k: int) -> list[int]:
    if k <= 0:
        raise ValueError("k must be positive")
    rel = [v.relevant for v in verdicts[:k]]
    rel.extend(0 for _ in range(k - len(rel)))  # short lists pad with misses
    return rel


def satisfied_count_at_k(verdicts: Sequence[JudgeVerdict], k: int) -> int:
    return sum(_relevance_prefix(verdicts, k))


def precision_at_k(verdicts: Sequence[JudgeVerdict], k: int) -> float:
    return satisfied_count_at_k(verdicts, k) / k


def ndcg_at_k(verdicts: Sequence[JudgeVerdict], k: int) -> float:
    """Binary-relevance nDCG with DCG = sum (2^rel - 1) / log2(i + 1);
    all-zero relevance is defined as 0."""
    rel = _relevance_prefix(verdicts, k)
    dcg = sum((2**r - 1) / math.log2(i + 1) for i, r in enumerate(rel, start=1))
    ideal = sorted(rel, reverse=True)
    idcg = sum((2**r - 1) / math.log2(i + 1) for i, r in enumerate(ideal, start=1))
    if idcg == 0.0:
        return 0.0
    return dcg / idcg


def ild(vectors: Sequence[Vector]) -> float:
    """Intra-list diversity: mean pairwise (1 - cosine) over the items'
    description embeddings, clamped to [0, 1]. Fewer than 2 items -> 0."""
    n = len(vectors)
    if n < 2:
        return 0.0
    total = 0.0
    pairs = 0
    for i in range(n):
        for j in range(i + 1, n):
            total += 1.0 - cosine_similarity(vectors[i], vectors[j])
            pairs += 1
    return max(0.0, min(1.0, total / pairs))


def attr_sat_rate(verdicts: Sequence[JudgeVerdict]) -> dict[str, float]:
    """Per-attribute satisfaction rate over non-null assessments; attributes
    never assessed stay out of the map."""
    satisfied: dict[str, int] = {}
    assessed: dict[str, int] = {}
    for verdict in verdicts:
        for name, assessment in verdict.attributes.items():
            if assessment.status == ATTR_NOT_MENTIONED:
                continue
            assessed[name] = assessed.get(name, 0) + 1
            if assessment.status == ATTR_SATISFIED:
                satisfied[name] = satisfied.get(name, 0) + 1
    return {name: satisfied.get(name, 0) / count for name, count in sorted(assessed.items())}


def confidence_filter_and_reassess(
    verdict_runs: Sequence[Sequence[JudgeVerdict]],
    tau: float = 0.51,
) -> tuple[list[JudgeVerdict], list[JudgeVerdict]]:
    """Aggregate repeated judge runs per item: majority label, ties broken
    by the higher mean confidence among the tied labels' votes, aggregate
    confidence = mean over runs.

    Returns (raw, filtered) verdict lists in presentation order; the
    filtered list keeps only items whose aggregate confidence reaches tau.
    """
    if not verdict_runs:
        return [], []
    base = [v.item_id for v in verdict_runs[0]]
    for run in verdict_runs[1:]:
        if [v.item_id for v in run] != base:
            raise ValueError("judge runs cover different item lists")

    raw: list[JudgeVerdict] = []
    for idx, item_id in enumerate(base):
        votes = [run[idx] for run in verdict_runs]
        sat = [v for v in votes if v.label == SATISFIED]
        unsat = [v for v in votes if v.label != SATISFIED]
        if len(sat) > len(unsat):
            label = SATISFIED
        elif len(unsat) > len(sat):
            label = UNSATISFIED
        else:
            mean_sat = sum(v.confidence for v in sat) / len(sat) if sat else 0.0
            mean_unsat = sum(v.confidence for v in unsat) / len(unsat) if unsat else 0.0
            label = SATISFIED if mean_sat > mean_unsat else UNSATISFIED
        confidence = sum(v.confidence for v in votes) / len(votes)
        raw.append(JudgeVerdict(item_id, label, confidence, votes[0].attributes))
    filtered = [v for v in raw if v.confidence >= tau]
    return raw, filtered


@dataclass
class MetricsReport:
    """Aggregate metrics for one evaluation cell, raw and
    confidence-filtered."""

    precision_at_k: dict[int, float] = field(default_factory=dict)
    ndcg_at_k: dict[int, float] = field(default_factory=dict)
    satisfied_count_at_k: dict[int, float] = field(default_factory=dict)
    ild: float = 0.0
    attr_sat: dict[str, float] = field(default_factory=dict)
    filtered_precision_at_k: dict[int, float] = field(default_factory=dict)
    filtered_ndcg_at_k: dict[int, float] = field(default_factory=dict)
    confidence_tau: float = 0.51
    question_relevance: float | None = None
    question_newness: float | None = None
    preference_echo: float | None = None

    def to_json(self) -> dict:
        return {
            "precision_at_k": {str(k): v for k, v in sorted(self.precision_at_k.items())},
            "ndcg_at_k": {str(k): v for k, v in sorted(self.ndcg_at_k.items())},
            "satisfied_count_at_k": {
                str(k): v for k, v in sorted(self.satisfied_count_at_k.items())
            },
            "ild": self.ild,
            "attr_sat": dict(sorted(self.attr_sat.items())),
            "filtered_precision_at_k": {
                str(k): v for k, v in sorted(self.filtered_precision_at_k.items())
            },
            "filtered_ndcg_at_k": {
                str(k): v for k, v in sorted(self.filtered_ndcg_at_k.items())
            },
            "confidence_tau": self.confidence_tau,
            "question_relevance": self.question_relevance,
            "question_newness": self.question_newness,
            "preference_echo": self.preference_echo,
        }
