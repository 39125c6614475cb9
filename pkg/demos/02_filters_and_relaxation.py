#!/usr/bin/env python3
"""Hard filters, empty results, and progressive relaxation.

When a filter combination matches nothing, predicates are dropped one at
a time, most cosmetic first (lowest relaxation_rank), until something
survives - and the dropped dimensions are disclosed, never hidden.
"""

from askrec import Equals, FilterSet, Range, apply_filters, relax_filters
from askrec.fixtures import load_default_catalog

catalog = load_default_catalog()

reasonable = FilterSet({"body": Equals("SUV"), "price": Range(hi=30000)})
result = apply_filters(catalog, reasonable)
print(f"SUVs under $30k: {len(result.item_ids)} matches")

impossible = FilterSet(
    {
        "exterior_color": Equals("green"),
        "fuel": Equals("diesel"),
        "body": Equals("minivan"),
        "price": Range(hi=9000),
    }
)
result = apply_filters(catalog, impossible)
print(f"green diesel minivans under $9k: {len(result.item_ids)} matches")

relaxed = relax_filters(catalog, impossible)
print(f"\nafter relaxation: {len(relaxed.item_ids)} matches")
print(f"dropped (in order): {list(relaxed.relaxed_dimensions)}")

order = catalog.relaxation_order(impossible.dimensions())
print(f"full relaxation order for these filters: {order}")
print("(exterior color goes first; price would be the last to give way)")

sample = relaxed.item_ids[0]
item = catalog.item(sample)
print(f"\nexample survivor: {item.id} -> "
      f"{item.attributes['exterior_color']} {item.attributes['fuel']} "
      f"{item.attributes['body']}, ${item.attributes['price']:.0f}")
