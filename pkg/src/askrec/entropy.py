"""Shannon entropy over candidate attribute distributions.

Entropy is the shared uncertainty signal: it decides which follow-up
question to ask (high entropy = the answer would split the candidates
well) and which dimension to diversify the final grid along. Continuous
dimensions are tertile-binned before counting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .catalog import CONTINUOUS, Binning, Catalog, discretize


@dataclass(frozen=True)
class ValueDistribution:
    """Empirical value counts for one dimension over a candidate set.

    ``total`` counts only candidates that have a value; missing values
    never enter the distribution.
    """

    dimension: str
    counts: Mapping[str, int]
    total: int

    def shares(self) -> dict[str, float]:
        if self.total == 0:
            return {}
        return {v: c / self.total for v, c in self.counts.items()}

    def distinct(self) -> int:
        return len(self.counts)


@dataclass(frozen=True)
class DimensionEntropy:
    dimension: str
    raw_bits: float
    normalized: float
    distinct_values: int

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "raw_bits": self.raw_bits,
            "normalized": self.normalized,
            "distinct_values": self.distinct_values,
        }


@dataclass(frozen=True)
class EntropyReport:
    """Per-dimension entropies over one candidate set, in schema order."""

    entries: Mapping[str, DimensionEntropy]
    distributions: Mapping[str, ValueDistribution]

    def get(self, dimension: str) -> DimensionEntropy | None:
        return self.entries.get(dimension)

    def score(self, dimension: str, mode: str = "normalized") -> float:
        entry = self.entries.get(dimension)
        if entry is None:
            return 0.0
        return entry.normalized if mode == "normalized" else entry.raw_bits

    def to_json(self) -> dict:
        return {
            "dimensions": [e.to_json() for e in self.entries.values()],
            "distributions": {
                d: {"counts": dict(dist.counts), "total": dist.total}
                for d, dist in self.distributions.items()
            },
        }


def value_distribution(
    catalog: Catalog,
    candidate_ids: Sequence[str],
    dimension: str,
    binning: Binning | None = None,
) -> ValueDistribution:
    """Count values of ``dimension`` over the candidates, first-seen order.

    Continuous dimensions are counted by tertile bin label; pass a
    precomputed ``binning`` to reuse one, otherwise it is derived from the
    candidate values themselves.
    """
    spec = catalog.schema_by_name[dimension]
    counts: dict[str, int] = {}
    if spec.kind == CONTINUOUS:
        if binning is None:
            binning = discretize(catalog, dimension, candidate_ids)
        for item_id in candidate_ids:
            label = binning.label_for(item_id)
            if label is not None:
                counts[label] = counts.get(label, 0) + 1
    else:
        for item_id in candidate_ids:
            value = catalog.value(item_id, dimension)
            if value is not None:
                counts[str(value)] = counts.get(str(value), 0) + 1
    return ValueDistribution(dimension, counts, sum(counts.values()))


def shannon_entropy(dist: ValueDistribution) -> float:
    """H = -sum p(v) log2 p(v), in bits, with 0 * log 0 = 0."""
    if dist.total == 0:
        return 0.0
    h = 0.0
    for count in dist.counts.values():
        if count == 0:
            continue
        p = count / dist.total
        h -= p * math.log2(p)
    return h


def normalized_entropy(dist: ValueDistribution) -> float:
    """H / log2(#distinct values); 0 for empty or single-valued
    distributions, 1 exactly on uniform ones."""
    distinct = dist.distinct()
    if distinct < 2:
        return 0.0
    return shannon_entropy(dist) / math.log2(distinct)


def compute_entropy_report(
    catalog: Catalog,
    candidate_ids: Sequence[str],
    dimensions: Sequence[str] | None = None,
) -> EntropyReport:
    dims = tuple(dimensions) if dimensions is not None else catalog.dimensions()
    entries: dict[str, DimensionEntropy] = {}
    dists: dict[str, ValueDistribution] = {}
    for dim in dims:
        dist = value_distribution(catalog, candidate_ids, dim)
        entries[dim] = DimensionEntropy(
            dimension=dim,
            raw_bits=shannon_entropy(dist),
            normalized=normalized_entropy(dist),
            distinct_values=dist.distinct(),
        )
        dists[dim] = dist
    return EntropyReport(entries, dists)


def select_question_dimension(
    catalog: Catalog,
    candidate_ids: Sequence[str],
    specified: Sequence[str],
    asked: Sequence[str],
    threshold: float = 0.3,
    mode: str = "normalized",
    report: EntropyReport | None = None,
) -> str | None:
    """Pick the highest-entropy dimension not yet specified or asked.

    Returns None when nothing qualifies or the best score falls below
    ``threshold`` (the interview then moves straight to recommendation).
    Ties break by schema declaration order. ``mode`` selects normalized
    (default) or raw-bits entropy for both ranking and the threshold.
    """
    excluded = set(specified) | set(asked)
    available = [d for d in catalog.dimensions() if d not in excluded]
    if not available:
        return None
    if report is None:
        report = compute_entropy_report(catalog, candidate_ids, available)
    best_dim: str | None = None
    best_score = -1.0
    for dim in available:
        score = report.score(dim, mode)
        if score > best_score:
            best_dim, best_score = dim, score
    if best_dim is None or best_score < threshold:
        return None
    return best_dim


def select_diversification_dimension(
    catalog: Catalog,
    ranked_ids: Sequence[str],
    specified: Sequence[str],
    report: EntropyReport | None = None,
) -> str | None:
    """Highest normalized-entropy dimension the user has not constrained,
    measured over the ranked result set. None when every unconstrained
    dimension is single-valued (flat-list fallback)."""
    unspecified = [d for d in catalog.dimensions() if d not in set(specified)]
    if not unspecified or not ranked_ids:
        return None
    if report is None:
        report = compute_entropy_report(catalog, ranked_ids, unspecified)
    best_dim: str | None = None
    best_score = 0.0
    for dim in unspecified:
        score = report.score(dim, "normalized")
        if score > best_score:
            best_dim, best_score = dim, score
    return best_dim
