#!/usr/bin/env python3
"""One complete conversation through the dialogue engine.

The engine parses each message, merges filters, retrieves candidates,
and either asks the most informative question or hands over a grid once
questions stop being worth their cost.
"""

from askrec import DialogueEngine, EngineConfig
from askrec.fixtures import load_default_catalog

engine = DialogueEngine(load_default_catalog(), EngineConfig(max_questions=2))
state = engine.new_session(strategy="es")

script = [
    "Looking for a used SUV under $30k",
    "under 60,000 miles would be best",
    "hybrid would be ideal",
]

for text in script:
    print(f"user > {text}")
    result = engine.advance_turn(state, text)
    if result.kind == "question":
        print(f"agent> {result.question.question_text}")
        print(f"       (dimension: {result.question.dimension}, "
              f"{result.candidate_count} candidates in play)\n")
        continue
    print(f"agent> here are {len(result.grid.flatten())} options, "
          f"grouped by {result.grid.dimension}:")
    if result.relaxed_dimensions:
        print(f"       note: had to relax {list(result.relaxed_dimensions)}")
    for row in result.grid.rows:
        ids = ", ".join(sc.item_id for sc in row.items)
        print(f"       [{row.label}] {ids}")
    break

print("\nfinal session state:")
print("  filters:", state.filters.to_json())
print("  asked:", state.asked_dimensions)
print("  phase:", state.phase)

print("\nimpatience cuts the interview short:")
state2 = engine.new_session()
result = engine.advance_turn(state2, "whatever, just show me cars under $20k")
print(f"  first response kind: {result.kind} "
      f"({len(result.grid.flatten())} items straight away)")
