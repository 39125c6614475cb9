#!/usr/bin/env python3
"""The two ranking strategies side by side.

Embedding similarity ranks by cosine against a query built from the
session state, with MMR keeping near-duplicates out of the list.
Coverage-risk greedy instead optimizes a set objective over the buyer's
liked and disliked feature phrases, matched against each item's pros and
cons with a thresholded cosine.
"""

from askrec import Equals, FilterSet, Range, apply_filters, rank
from askrec.embedding import EmbeddingStore, HashingEmbedder
from askrec.fixtures import load_default_catalog
from askrec.metrics import ild

catalog = load_default_catalog()
store = EmbeddingStore(catalog, HashingEmbedder())

filters = FilterSet({"body": Equals("SUV"), "price": Range(hi=35000)})
candidates = apply_filters(catalog, filters).item_ids
print(f"{len(candidates)} candidates\n")


def show(label, scored):
    print(label)
    for sc in scored:
        item = catalog.item(sc.item_id)
        print(
            f"  #{sc.selection_rank} {sc.item_id} score={sc.relevance:+.3f} "
            f"{item.attributes['make']} {item.attributes['fuel']}"
        )
    vectors = [store.description[sc.item_id] for sc in scored]
    print(f"  intra-list diversity: {ild(vectors):.3f}\n")


common = dict(
    filters=filters,
    candidate_ids=candidates,
    store=store,
    schema_order=catalog.dimensions(),
    k=9,
)

show("ES with MMR (lambda = 0.85):",
     rank("es", liked=["excellent fuel economy"], disliked=[], **common))
show("ES without MMR (lambda = 1, pure similarity):",
     rank("es", liked=["excellent fuel economy"], disliked=[], mmr_lambda=1.0, **common))
show("CR over phrase preferences:",
     rank("cr", liked=["excellent fuel economy", "spacious cargo area"],
          disliked=["road noise at highway speeds"], **common))
print("CR with no phrases falls back to ES ordering:")
es = rank("es", liked=[], disliked=[], **common)
cr = rank("cr", liked=[], disliked=[], **common)
print(f"  identical: {[s.item_id for s in es] == [s.item_id for s in cr]}")
