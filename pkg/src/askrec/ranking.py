"""Candidate ranking: embedding similarity with MMR, and coverage-risk
greedy selection over pros/cons phrase alignments.

MMR picks argmax of ``lam * sim(q, c) - (1 - lam) * max_{s in S} sim(c, s)``
each round, so lam = 1 degenerates to a plain similarity sort.

The coverage-risk objective for a set S is

    sum_j max_{v in S} Pos_j(v)  -  lam * sum_r max_{v in S} Neg_r(v)

built greedily by marginal gain; the coverage half is monotone submodular,
which gives the usual (1 - 1/e) guarantee when the risk weight is zero.
Alignments are hinge-thresholded cosines: max(0, cos - tau), taken over an
item's pros (for liked features) or cons (for disliked ones).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .embedding import EmbeddingStore, Vector, build_query_text, cosine_similarity


@dataclass(frozen=True)
class ScoredCandidate:
    """One ranked item; relevance is strategy-specific (similarity for the
    first MMR pick, the selection objective afterwards; marginal gain for
    coverage-risk)."""

    item_id: str
    relevance: float
    selection_rank: int

    def to_json(self) -> dict:
        return {"id": self.item_id, "score": self.relevance, "rank": self.selection_rank}


def _unit_rows(vectors: Sequence[Vector]) -> np.ndarray:
    rows = np.zeros((len(vectors), vectors[0].dimension if vectors else 0))
    for i, v in enumerate(vectors):
        if v.norm > 0:
            rows[i] = v.components / v.norm
    return rows


def mmr_select(
    query: Vector,
    candidates: Sequence[tuple[str, Vector]],
    k: int,
    lam: float = 0.85,
) -> list[ScoredCandidate]:
    """Greedy MMR over (id, vector) candidates, ties by input order.

    The first pick is the plain similarity argmax; every later pick trades
    query similarity against redundancy with the already-selected set.
    Returns min(k, n) picks with contiguous selection ranks from 1.
    """
    if not candidates or k < 1:
        return []
    ids = [c[0] for c in candidates]
    rows = _unit_rows([c[1] for c in candidates])
    if query.norm > 0:
        sims_q = rows @ (query.components / query.norm)
    else:
        sims_q = np.zeros(len(ids))

    n = len(ids)
    take = min(k, n)
    selected: list[ScoredCandidate] = []
    remaining = np.ones(n, dtype=bool)
    max_to_selected = np.full(n, -np.inf)

    first = int(np.argmax(np.where(remaining, sims_q, -np.inf)))
    selected.append(ScoredCandidate(ids[first], float(sims_q[first]), 1))
    remaining[first] = False
    max_to_selected = np.maximum(max_to_selected, rows @ rows[first])

    while len(selected) < take:
        scores = lam * sims_q - (1.0 - lam) * max_to_selected
        scores = np.where(remaining, scores, -np.inf)
        pick = int(np.argmax(scores))
        selected.append(ScoredCandidate(ids[pick], float(scores[pick]), len(selected) + 1))
        remaining[pick] = False
        max_to_selected = np.maximum(max_to_selected, rows @ rows[pick])
    return selected


def phrase_alignment(
    feature: Vector,
    item_phrases: Sequence[Vector],
    tau: float = 0.6,
) -> float:
    """Best hinge-thresholded cosine of a feature against an item's phrase
    list: max_k max(0, cos(feature, phrase_k) - tau); 0 when the list is
    empty."""
    best = 0.0
    for phrase in item_phrases:
        score = max(0.0, cosine_similarity(feature, phrase) - tau)
        if score > best:
            best = score
    return best


def alignment_table(
    features: Sequence[Vector],
    items_phrases: Sequence[Sequence[Vector]],
    tau: float = 0.6,
) -> np.ndarray:
    """(features x items) matrix of phrase_alignment scores."""
    table = np.zeros((len(features), len(items_phrases)))
    for j, feature in enumerate(features):
        for v, phrases in enumerate(items_phrases):
            table[j, v] = phrase_alignment(feature, phrases, tau)
    return table


def coverage_risk_objective(
    pos_table: np.ndarray,
    neg_table: np.ndarray,
    subset: Sequence[int],
    lam: float = 0.5,
) -> float:
    """Set-level objective value for an explicit subset (column indices)."""
    if len(subset) == 0:
        return 0.0
    cols = list(subset)
    coverage = float(pos_table[:, cols].max(axis=1).sum()) if pos_table.size else 0.0
    risk = float(neg_table[:, cols].max(axis=1).sum()) if neg_table.size else 0.0
    return coverage - lam * risk


def coverage_risk_greedy(
    item_ids: Sequence[str],
    pos_table: np.ndarray,
    neg_table: np.ndarray,
    k: int,
    lam: float = 0.5,
) -> list[ScoredCandidate]:
    """Greedy marginal-gain selection; ties by input (catalog) order.

    Each pick maximizes the marginal coverage gain minus lam times the
    marginal risk increase, both measured against the selected set's
    current per-feature maxima. Negative-gain picks are still taken so the
    list always reaches min(k, n); relevance records each pick's gain, so
    the scores telescope to the set objective.
    """
    n = len(item_ids)
    if n == 0 or k < 1:
        return []
    pos = pos_table if pos_table.size else np.zeros((0, n))
    neg = neg_table if neg_table.size else np.zeros((0, n))

    take = min(k, n)
    best_pos = np.zeros(pos.shape[0])
    best_neg = np.zeros(neg.shape[0])
    remaining = np.ones(n, dtype=bool)
    selected: list[ScoredCandidate] = []

    while len(selected) < take:
        cov_gain = np.maximum(pos - best_pos[:, None], 0.0).sum(axis=0)
        risk_gain = np.maximum(neg - best_neg[:, None], 0.0).sum(axis=0)
        gains = np.where(remaining, cov_gain - lam * risk_gain, -np.inf)
        pick = int(np.argmax(gains))
        selected.append(ScoredCandidate(item_ids[pick], float(gains[pick]), len(selected) + 1))
        remaining[pick] = False
        if pos.shape[0]:
            best_pos = np.maximum(best_pos, pos[:, pick])
        if neg.shape[0]:
            best_neg = np.maximum(best_neg, neg[:, pick])
    return selected


STRATEGY_ES = "es"
STRATEGY_CR = "cr"


def rank(
    strategy: str,
    *,
    filters,
    liked: Sequence[str],
    disliked: Sequence[str],
    candidate_ids: Sequence[str],
    store: EmbeddingStore,
    schema_order: Sequence[str],
    k: int,
    mmr_lambda: float = 0.85,
    cr_lambda: float = 0.5,
    align_tau: float = 0.6,
) -> list[ScoredCandidate]:
    """Dispatch to the selected strategy.

    ES ranks by similarity to a query built from filters and preferences,
    diversified with MMR. CR runs coverage-risk greedy over the phrase
    preferences; with no phrases its objective is identically zero, so it
    falls back to ES as the informative tie-break.
    """
    if not candidate_ids:
        return []
    if strategy == STRATEGY_CR and (liked or disliked):
        pos = alignment_table(
            [store.embed_query(p) for p in liked],
            [store.pros[i] for i in candidate_ids],
            align_tau,
        )
        neg = alignment_table(
            [store.embed_query(p) for p in disliked],
            [store.cons[i] for i in candidate_ids],
            align_tau,
        )
        return coverage_risk_greedy(candidate_ids, pos, neg, k, cr_lambda)
    if strategy not in (STRATEGY_ES, STRATEGY_CR):
        raise ValueError(f"unknown ranking strategy: {strategy!r}")
    query_text = build_query_text(filters, liked, disliked, schema_order)
    query = store.embed_query(query_text)
    pairs = [(i, store.description[i]) for i in candidate_ids]
    return mmr_select(query, pairs, k, mmr_lambda)
