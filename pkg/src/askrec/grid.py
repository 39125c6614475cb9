"""Present a ranked list as an r x n grid partitioned along one
high-uncertainty dimension, with human-readable row labels."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .catalog import CONTINUOUS, Catalog, discretize
from .entropy import EntropyReport, select_diversification_dimension
from .ranking import ScoredCandidate


@dataclass(frozen=True)
class GridRow:
    label: str
    items: tuple[ScoredCandidate, ...]


@dataclass(frozen=True)
class Grid:
    """Rows are partitions by value on ``dimension`` (None = flat list),
    largest partition first; within a row the ranking order is intact."""

    dimension: str | None
    rows: tuple[GridRow, ...]

    def flatten(self) -> list[ScoredCandidate]:
        """Row-major flattening; this is the list the metrics score."""
        return [item for row in self.rows for item in row.items]

    def item_ids(self) -> list[str]:
        return [sc.item_id for sc in self.flatten()]

    def to_json(self, catalog: Catalog | None = None) -> dict:
        def attributes(item_id: str) -> dict:
            if catalog is None:
                return {}
            item = catalog.item(item_id)
            return {k: v for k, v in item.attributes.items()}

        return {
            "dimension": self.dimension,
            "rows": [
                {
                    "label": row.label,
                    "items": [
                        {**sc.to_json(), "attributes": attributes(sc.item_id)}
                        for sc in row.items
                    ],
                }
                for row in self.rows
            ],
        }

    @staticmethod
    def from_json(data: Mapping) -> "Grid":
        rows = tuple(
            GridRow(
                label=row["label"],
                items=tuple(
                    ScoredCandidate(item["id"], float(item["score"]), int(item["rank"]))
                    for item in row["items"]
                ),
            )
            for row in data["rows"]
        )
        return Grid(dimension=data.get("dimension"), rows=rows)


def _categorical_label(value: str) -> str:
    # Keep acronyms as stored ("SUV", "AWD"); capitalize plain words.
    return value if any(ch.isupper() for ch in value) else value.capitalize()


def bucket_grid(
    ranked: Sequence[ScoredCandidate],
    dimension: str | None,
    r: int,
    n: int,
    catalog: Catalog,
) -> Grid:
    """Partition the ranked list by value on ``dimension`` and keep the
    top-n of the first min(r, #partitions) partitions.

    Partitions sort by size descending, ties by best-ranked member and then
    label. Items missing a value on the dimension stay out of the grid.
    With dimension=None the grid is a single unlabeled row of the top r*n.
    """
    if dimension is None:
        top = tuple(ranked[: r * n])
        return Grid(dimension=None, rows=(GridRow("", top),) if top else ())

    spec = catalog.schema_by_name[dimension]
    if spec.kind == CONTINUOUS:
        binning = discretize(catalog, dimension, [sc.item_id for sc in ranked])
        label_of = binning.label_for
    else:
        def label_of(item_id: str) -> str | None:
            value = catalog.value(item_id, dimension)
            return None if value is None else _categorical_label(str(value))

    partitions: dict[str, list[ScoredCandidate]] = {}
    for sc in ranked:
        label = label_of(sc.item_id)
        if label is None:
            continue
        partitions.setdefault(label, []).append(sc)

    ordered = sorted(
        partitions.items(),
        key=lambda kv: (-len(kv[1]), min(sc.selection_rank for sc in kv[1]), kv[0]),
    )
    rows = tuple(
        GridRow(label=label, items=tuple(items[:n])) for label, items in ordered[:r]
    )
    return Grid(dimension=dimension, rows=rows)


def present(
    catalog: Catalog,
    ranked: Sequence[ScoredCandidate],
    specified: Sequence[str],
    r: int = 3,
    n: int = 3,
    report: EntropyReport | None = None,
) -> Grid:
    """Pick the diversification dimension for this ranked set and bucket it.

    r = n = 3 by default so the grid carries exactly nine items when the
    partitions allow, matching the @9 evaluation cut.
    """
    dimension = select_diversification_dimension(
        catalog, [sc.item_id for sc in ranked], specified, report=report
    )
    return bucket_grid(ranked, dimension, r, n, catalog)
