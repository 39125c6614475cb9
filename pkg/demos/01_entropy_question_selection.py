#!/usr/bin/env python3
"""Which follow-up question is worth asking?

Walks through the uncertainty math on the bundled car catalog: value
distributions per dimension, raw and normalized entropy, and the argmax
selection with its minimum-entropy threshold.
"""

from askrec import (
    Equals,
    FilterSet,
    apply_filters,
    compute_entropy_report,
    select_question_dimension,
)
from askrec.fixtures import load_default_catalog

catalog = load_default_catalog()

# A buyer said "used SUV" - what do we still not know about the matches?
filters = FilterSet({"body": Equals("SUV"), "condition": Equals("used")})
candidates = apply_filters(catalog, filters)
print(f"{len(candidates.item_ids)} used SUVs survive the filters\n")

report = compute_entropy_report(catalog, candidates.item_ids)
print(f"{'dimension':18s} {'distinct':>8s} {'H (bits)':>9s} {'H_norm':>7s}")
for dim, entry in report.entries.items():
    print(
        f"{dim:18s} {entry.distinct_values:8d} {entry.raw_bits:9.4f} {entry.normalized:7.4f}"
    )

specified = filters.dimensions()
picked = select_question_dimension(
    catalog, candidates.item_ids, specified=specified, asked=[], threshold=0.3
)
print(f"\nnext question dimension: {picked}")
print("(highest normalized entropy among dimensions the buyer hasn't constrained)")

# Once nearly everything is pinned down, the threshold stops the interview.
asked = [d for d in catalog.dimensions() if d not in specified and d != "interior_color"]
leftover = select_question_dimension(
    catalog, candidates.item_ids, specified=specified, asked=asked, threshold=0.99999
)
print(f"with a draconian threshold nothing qualifies: {leftover}")

# The distribution context that a generated question quotes:
dist = report.distributions["fuel"]
shares = ", ".join(
    f"{round(100 * c / dist.total)}% {v}"
    for v, c in sorted(dist.counts.items(), key=lambda kv: -kv[1])[:3]
)
print(f"\nfuel mix a question would quote: {shares}")
