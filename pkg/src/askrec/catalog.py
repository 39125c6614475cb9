"""Item catalog: schema, loading, filtering, relaxation, and tertile binning.

The catalog is an immutable attribute table (categorical + continuous
columns) plus per-item free text and pros/cons phrase lists. All
downstream stages (entropy, ranking, presentation) read from it and
never mutate it, so concurrent sessions can share one instance.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

CATEGORICAL = "categorical"
CONTINUOUS = "continuous"


class CatalogError(ValueError):
    """Malformed catalog data or a schema violation."""


@dataclass(frozen=True)
class AttributeSchema:
    """One catalog dimension.

    ``relaxation_rank`` orders progressive filter relaxation: lower ranks
    are cosmetic and get dropped first, higher ranks are fundamental and
    survive longest. Ties break lexicographically by name.
    """

    name: str
    kind: str
    unit: str | None = None
    relaxation_rank: int = 0
    question_label: str = ""

    def __post_init__(self) -> None:
        if self.kind not in (CATEGORICAL, CONTINUOUS):
            raise CatalogError(f"unknown attribute kind: {self.kind!r}")
        if not self.question_label:
            object.__setattr__(self, "question_label", self.name.replace("_", " "))


@dataclass(frozen=True)
class Item:
    """One catalog row. Missing attribute values are stored as None."""

    id: str
    attributes: Mapping[str, object]
    description: str = ""
    pros: tuple[str, ...] = ()
    cons: tuple[str, ...] = ()


# --------------------------------------------------------------------------
# Filter predicates
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Equals:
    value: str

    def matches(self, value: object) -> bool:
        return isinstance(value, str) and value.casefold() == self.value.casefold()

    def to_json(self) -> dict:
        return {"op": "equals", "value": self.value}


@dataclass(frozen=True)
class OneOf:
    values: tuple[str, ...]

    def matches(self, value: object) -> bool:
        if not isinstance(value, str):
            return False
        folded = value.casefold()
        return any(folded == v.casefold() for v in self.values)

    def to_json(self) -> dict:
        return {"op": "one_of", "values": list(self.values)}


@dataclass(frozen=True)
class Range:
    """Numeric interval with inclusive, optionally open, ends."""

    lo: float | None = None
    hi: float | None = None

    def matches(self, value: object) -> bool:
        if not isinstance(value, (int, float)):
            return False
        if self.lo is not None and value < self.lo:
            return False
        if self.hi is not None and value > self.hi:
            return False
        return True

    def to_json(self) -> dict:
        return {"op": "range", "lo": self.lo, "hi": self.hi}


Predicate = Equals | OneOf | Range


def predicate_from_json(data: Mapping) -> Predicate:
    op = data.get("op")
    if op == "equals":
        return Equals(str(data["value"]))
    if op == "one_of":
        return OneOf(tuple(str(v) for v in data["values"]))
    if op == "range":
        lo = data.get("lo")
        hi = data.get("hi")
        return Range(None if lo is None else float(lo), None if hi is None else float(hi))
    raise CatalogError(f"unknown predicate op: {op!r}")


@dataclass(frozen=True)
class FilterSet:
    """At most one predicate per dimension."""

    entries: Mapping[str, Predicate] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", dict(self.entries))

    def dimensions(self) -> tuple[str, ...]:
        return tuple(self.entries)

    def get(self, dimension: str) -> Predicate | None:
        return self.entries.get(dimension)

    def without(self, dimensions: Iterable[str]) -> "FilterSet":
        drop = set(dimensions)
        return FilterSet({d: p for d, p in self.entries.items() if d not in drop})

    def validate(self, catalog: "Catalog") -> None:
        for dim, pred in self.entries.items():
            spec = catalog.schema_by_name.get(dim)
            if spec is None:
                raise CatalogError(f"filter on unknown dimension {dim!r}")
            if isinstance(pred, Range) and spec.kind != CONTINUOUS:
                raise CatalogError(f"range predicate on categorical dimension {dim!r}")
            if isinstance(pred, (Equals, OneOf)) and spec.kind != CATEGORICAL:
                raise CatalogError(f"token predicate on continuous dimension {dim!r}")

    def to_json(self) -> dict:
        return {dim: pred.to_json() for dim, pred in sorted(self.entries.items())}

    @staticmethod
    def from_json(data: Mapping) -> "FilterSet":
        return FilterSet({dim: predicate_from_json(p) for dim, p in data.items()})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FilterSet) and dict(self.entries) == dict(other.entries)

    def __hash__(self) -> int:  # frozen dataclass contract
        return hash(tuple(sorted((d, repr(p)) for d, p in self.entries.items())))


@dataclass(frozen=True)
class CandidateSet:
    """Items surviving the (possibly relaxed) filters, in catalog order."""

    item_ids: tuple[str, ...]
    source_filters: FilterSet
    relaxed_dimensions: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.item_ids)


# --------------------------------------------------------------------------
# Catalog
# --------------------------------------------------------------------------


class Catalog:
    """Immutable item table with a declared attribute schema."""

    def __init__(self, schema: Sequence[AttributeSchema], items: Sequence[Item]):
        names = [s.name for s in schema]
        if len(set(names)) != len(names):
            raise CatalogError("duplicate dimension names in schema")
        self.schema: tuple[AttributeSchema, ...] = tuple(schema)
        self.schema_by_name: dict[str, AttributeSchema] = {s.name: s for s in schema}
        normalized = []
        seen_ids = set()
        for item in items:
            if item.id in seen_ids:
                raise CatalogError(f"duplicate item id {item.id!r}")
            seen_ids.add(item.id)
            attrs = {name: item.attributes.get(name) for name in names}
            normalized.append(
                Item(item.id, attrs, item.description, tuple(item.pros), tuple(item.cons))
            )
        self.items: tuple[Item, ...] = tuple(normalized)
        self._by_id: dict[str, Item] = {it.id: it for it in self.items}

    def __len__(self) -> int:
        return len(self.items)

    def dimensions(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.schema)

    def item(self, item_id: str) -> Item:
        return self._by_id[item_id]

    def value(self, item_id: str, dimension: str) -> object:
        return self._by_id[item_id].attributes.get(dimension)

    def relaxation_order(self, dimensions: Iterable[str]) -> list[str]:
        """Dimensions sorted least-important first (rank, then name)."""
        return sorted(
            dimensions,
            key=lambda d: (self.schema_by_name[d].relaxation_rank, d),
        )


# --------------------------------------------------------------------------
# Loading
# --------------------------------------------------------------------------

_MISSING_TOKENS = {"", "na", "n/a", "null", "none"}
_NUMERIC_CELL = re.compile(r"(-?\d+(?:\.\d+)?)\s*([kK])?\s*([A-Za-z]*)\s*")


def _parse_continuous(raw: str) -> float | None:
    s = raw.strip()
    if s.casefold() in _MISSING_TOKENS:
        return None
    s = s.replace("$", "").replace(",", "")
    m = _NUMERIC_CELL.fullmatch(s)
    if m is None:
        raise ValueError(f"not a number: {raw!r}")
    value = float(m.group(1))
    if m.group(2):
        value *= 1000.0
    return value


def _split_phrases(raw: str) -> tuple[str, ...]:
    return tuple(p.strip() for p in raw.split("|") if p.strip())


def load_schema(path: str | Path) -> tuple[list[AttributeSchema], dict]:
    """Read the sidecar schema file; returns (attributes, column config)."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    attrs = [
        AttributeSchema(
            name=col["name"],
            kind=col["kind"],
            unit=col.get("unit"),
            relaxation_rank=int(col.get("relaxation_rank", 0)),
            question_label=col.get("question_label", ""),
        )
        for col in data["attributes"]
    ]
    columns = {
        "id": data.get("id_column", "id"),
        "description": data.get("description_column"),
        "pros": data.get("pros_column"),
        "cons": data.get("cons_column"),
    }
    return attrs, columns


def load_catalog(
    source: str | Path | io.TextIOBase,
    schema: Sequence[AttributeSchema],
    *,
    id_column: str = "id",
    description_column: str | None = "description",
    pros_column: str | None = "pros",
    cons_column: str | None = "cons",
) -> Catalog:
    """Load a comma-delimited catalog whose header matches the schema.

    Raises CatalogError naming the offending row (1-based data rows) and
    column on malformed cells, and on header/schema mismatches.
    """
    if isinstance(source, (str, Path)):
        stream: io.TextIOBase = open(source, "r", encoding="utf-8", newline="")
        close = True
    else:
        stream, close = source, False
    try:
        reader = csv.DictReader(stream)
        header = reader.fieldnames or []
        special = {id_column, description_column, pros_column, cons_column} - {None}
        known = {s.name for s in schema} | special
        unknown = [c for c in header if c not in known]
        if unknown:
            raise CatalogError(f"unknown column(s) in header: {', '.join(unknown)}")
        missing = [s.name for s in schema if s.name not in header]
        if missing:
            raise CatalogError(f"schema column(s) absent from header: {', '.join(missing)}")
        if id_column not in header:
            raise CatalogError(f"id column {id_column!r} absent from header")

        items: list[Item] = []
        for row_index, row in enumerate(reader, start=1):
            attrs: dict[str, object] = {}
            for spec in schema:
                raw = row.get(spec.name) or ""
                if spec.kind == CONTINUOUS:
                    try:
                        attrs[spec.name] = _parse_continuous(raw)
                    except ValueError:
                        raise CatalogError(
                            f"row {row_index}, column {spec.name}: "
                            f"cannot parse {raw!r} as a number"
                        ) from None
                else:
                    token = raw.strip()
                    attrs[spec.name] = token if token.casefold() not in _MISSING_TOKENS else None
            items.append(
                Item(
                    id=str(row[id_column]).strip(),
                    attributes=attrs,
                    description=(row.get(description_column) or "").strip()
                    if description_column
                    else "",
                    pros=_split_phrases(row.get(pros_column) or "") if pros_column else (),
                    cons=_split_phrases(row.get(cons_column) or "") if cons_column else (),
                )
            )
        return Catalog(schema, items)
    finally:
        if close:
            stream.close()


def load_catalog_with_sidecar(csv_path: str | Path, schema_path: str | Path) -> Catalog:
    attrs, columns = load_schema(schema_path)
    return load_catalog(
        csv_path,
        attrs,
        id_column=columns["id"],
        description_column=columns["description"],
        pros_column=columns["pros"],
        cons_column=columns["cons"],
    )


# --------------------------------------------------------------------------
# Filtering and relaxation
# --------------------------------------------------------------------------


def _item_matches(item: Item, filters: FilterSet) -> bool:
    for dim, pred in filters.entries.items():
        value = item.attributes.get(dim)
        if value is None or not pred.matches(value):
            return False
    return True


def apply_filters(catalog: Catalog, filters: FilterSet) -> CandidateSet:
    """Exact predicate scan preserving catalog order. Empty result is valid."""
    filters.validate(catalog)
    ids = tuple(it.id for it in catalog.items if _item_matches(it, filters))
    return CandidateSet(item_ids=ids, source_filters=filters)


def relax_filters(catalog: Catalog, filters: FilterSet) -> CandidateSet:
    """Progressively drop predicates (lowest relaxation_rank first) until
    the result is non-empty. Call only when apply_filters came back empty.

    Returns the first non-empty candidate set with the dropped dimensions
    recorded in drop order; if every predicate must go, returns the full
    catalog with all filter dimensions listed.
    """
    filters.validate(catalog)
    order = catalog.relaxation_order(filters.dimensions())
    relaxed: list[str] = []
    for dim in order:
        relaxed.append(dim)
        remaining = filters.without(relaxed)
        ids = tuple(it.id for it in catalog.items if _item_matches(it, remaining))
        if ids:
            return CandidateSet(item_ids=ids, source_filters=filters,
                                relaxed_dimensions=tuple(relaxed))
    return CandidateSet(
        item_ids=tuple(it.id for it in catalog.items),
        source_filters=filters,
        relaxed_dimensions=tuple(order),
    )


# --------------------------------------------------------------------------
# Continuous-attribute binning
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Binning:
    """Equal-frequency (tertile) bins over a candidate set's values.

    ``assignments`` maps item id -> bin label; items missing the value do
    not appear. ``boundaries`` holds the inner tertile cut points actually
    used (0, 1, or 2 of them).
    """

    dimension: str
    boundaries: tuple[float, ...]
    labels: tuple[str, ...]
    assignments: Mapping[str, str]

    def label_for(self, item_id: str) -> str | None:
        return self.assignments.get(item_id)


def _compact_number(v: float, compact_thousands: bool) -> str:
    # Unitless quantities (e.g. model years) stay verbatim.
    if compact_thousands and abs(v) >= 1000:
        text = f"{v / 1000:.1f}".rstrip("0").rstrip(".")
        return f"{text}K"
    if float(v).is_integer():
        return str(int(v))
    return f"{v:g}"


def format_quantity(v: float, unit: str | None) -> str:
    """Human-readable scalar with its unit, e.g. '$30K' or '45K miles'."""
    text = _compact_number(v, compact_thousands=unit is not None)
    if unit == "USD":
        return f"${text}"
    if unit:
        return f"{text} {unit}"
    return text


def _range_label(lo: float, hi: float, unit: str | None) -> str:
    if lo == hi:
        return format_quantity(lo, unit)
    a = _compact_number(lo, compact_thousands=unit is not None)
    b = _compact_number(hi, compact_thousands=unit is not None)
    if unit == "USD":
        return f"${a}–${b}"
    if unit:
        return f"{a}–{b} {unit}"
    return f"{a}–{b}"


def discretize(
    catalog: Catalog,
    dimension: str,
    candidate_ids: Sequence[str],
    k: int = 3,
) -> Binning:
    """Quantile-bin a continuous dimension into at most ``k`` equal-frequency
    bins over the candidate values. Boundary ties go to the lower bin, so the
    split is deterministic and order-independent. Bin labels carry readable
    ranges built from the member values ("$20K–$30K" style).
    """
    spec = catalog.schema_by_name.get(dimension)
    if spec is None or spec.kind != CONTINUOUS:
        raise CatalogError(f"discretize needs a continuous dimension, got {dimension!r}")
    valued = [
        (item_id, float(catalog.value(item_id, dimension)))  # type: ignore[arg-type]
        for item_id in candidate_ids
        if catalog.value(item_id, dimension) is not None
    ]
    if not valued:
        return Binning(dimension, (), (), {})

    values = sorted(v for _, v in valued)
    n = len(values)
    if values[0] == values[-1]:
        label = format_quantity(values[0], spec.unit)
        return Binning(dimension, (), (label,), {item_id: label for item_id, _ in valued})

    cuts = sorted({values[math.ceil(i * n / k) - 1] for i in range(1, k)})
    # A cut equal to the global max would leave the top bin empty.
    cuts = [c for c in cuts if c < values[-1]]

    def bin_index(v: float) -> int:
        for i, cut in enumerate(cuts):
            if v <= cut:
                return i
        return len(cuts)

    members: dict[int, list[float]] = {}
    raw_assignments: dict[str, int] = {}
    for item_id, v in valued:
        idx = bin_index(v)
        raw_assignments[item_id] = idx
        members.setdefault(idx, []).append(v)

    labels: dict[int, str] = {
        idx: _range_label(min(vals), max(vals), spec.unit) for idx, vals in members.items()
    }
    ordered_labels = tuple(labels[idx] for idx in sorted(labels))
    assignments = {item_id: labels[idx] for item_id, idx in raw_assignments.items()}
    return Binning(dimension, tuple(cuts), ordered_labels, assignments)
