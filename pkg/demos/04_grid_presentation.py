#!/usr/bin/env python3
"""From a ranked list to a labeled exploration grid.

Instead of a flat top-9, results are partitioned along the unconstrained
dimension with the highest normalized entropy, so each row shows one side
of a trade-off the buyer hasn't decided yet.
"""

from askrec import Equals, FilterSet, apply_filters, present, rank
from askrec.embedding import EmbeddingStore, HashingEmbedder
from askrec.fixtures import load_default_catalog

catalog = load_default_catalog()
store = EmbeddingStore(catalog, HashingEmbedder())

filters = FilterSet({"body": Equals("SUV")})
candidates = apply_filters(catalog, filters).item_ids
ranked = rank(
    "es",
    filters=filters,
    liked=["comfortable seats"],
    disliked=[],
    candidate_ids=candidates,
    store=store,
    schema_order=catalog.dimensions(),
    k=9,
)

grid = present(catalog, ranked, specified=filters.dimensions(), r=3, n=3)
print(f"diversified along: {grid.dimension}\n")
for row in grid.rows:
    print(f"[{row.label}]")
    for sc in row.items:
        item = catalog.item(sc.item_id)
        print(
            f"   {item.attributes['year']:.0f} {item.attributes['make']} "
            f"{item.attributes['fuel']} - ${item.attributes['price']:.0f}"
        )
print("\nrows are partitions by value, largest first; each keeps ranking order")

flat = present(catalog, ranked, specified=list(catalog.dimensions()))
print(f"with every dimension constrained there is nothing to diversify: "
      f"dimension={flat.dimension}, one row of {len(flat.flatten())}")
