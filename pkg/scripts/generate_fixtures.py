#!/usr/bin/env python3
"""Regenerate the bundled synthetic car catalog and persona suite.

Everything is drawn from one seeded generator, so reruns are byte-stable.
Output lands in src/askrec/data/ (override with --out).
"""

from __future__ import annotations

import argparse
import csv
import json
from pathlib import Path

import numpy as np

SEED = 20240811
N_ITEMS = 1000
N_SHORT = 30
N_LONG = 20

MAKES = ["Toyota", "Honda", "Ford", "BMW", "Subaru", "Hyundai", "Kia", "Chevrolet", "Audi", "Mazda"]
MODELS = {
    "Toyota": ["RAV4", "Camry", "Corolla", "Highlander"],
    "Honda": ["CR-V", "Civic", "Accord", "Pilot"],
    "Ford": ["Escape", "F-150", "Edge", "Fusion"],
    "BMW": ["X3", "3 Series", "X5", "5 Series"],
    "Subaru": ["Outback", "Forester", "Crosstrek", "Impreza"],
    "Hyundai": ["Tucson", "Elantra", "Santa Fe", "Sonata"],
    "Kia": ["Sportage", "Sorento", "Forte", "Telluride"],
    "Chevrolet": ["Equinox", "Silverado", "Malibu", "Traverse"],
    "Audi": ["Q5", "A4", "Q7", "A6"],
    "Mazda": ["CX-5", "Mazda3", "CX-9", "Mazda6"],
}
BODIES = ["SUV", "sedan", "hatchback", "truck", "coupe", "minivan", "wagon"]
BODY_W = [0.32, 0.26, 0.12, 0.12, 0.06, 0.06, 0.06]
FUELS = ["gasoline", "hybrid", "electric", "diesel"]
FUEL_W = [0.52, 0.24, 0.16, 0.08]
TRANSMISSIONS = ["automatic", "manual", "CVT"]
TRANS_W = [0.72, 0.12, 0.16]
DRIVETRAINS = ["FWD", "AWD", "RWD"]
DRIVE_W = [0.48, 0.37, 0.15]
EXT_COLORS = ["black", "white", "silver", "blue", "red", "gray", "green"]
INT_COLORS = ["black", "beige", "gray", "brown"]
CONDITIONS = ["used", "new"]
COND_W = [0.68, 0.32]

BODY_BASE_PRICE = {
    "SUV": 34000, "sedan": 27000, "hatchback": 22000, "truck": 38000,
    "coupe": 31000, "minivan": 33000, "wagon": 28000,
}
FUEL_PRICE_ADJ = {"gasoline": 0, "hybrid": 3000, "electric": 8500, "diesel": 2000}
MAKE_PRICE_ADJ = {
    "Toyota": 1500, "Honda": 1200, "Ford": 0, "BMW": 13000, "Subaru": 800,
    "Hyundai": -1500, "Kia": -1800, "Chevrolet": -500, "Audi": 11000, "Mazda": 0,
}

GENERIC_PROS = [
    "comfortable seats", "responsive steering", "good visibility",
    "reliable engine", "strong resale value", "intuitive infotainment",
    "great safety ratings", "smooth transmission", "low maintenance costs",
    "sporty handling", "generous standard features", "easy to park",
]
GENERIC_CONS = [
    "road noise at highway speeds", "stiff ride", "small trunk",
    "cramped rear seats", "expensive maintenance", "dated infotainment",
    "weak base engine", "firm seats", "noticeable wind noise",
    "slow acceleration", "average sound system", "thirsty in city driving",
]

# phrased like the review-derived pros/cons so semantic matching can fire
LIKED_PHRASES = [
    "excellent fuel economy", "a quiet cabin", "spacious cargo area",
    "comfortable seats", "great safety ratings", "low maintenance costs",
    "confident handling in snow", "smooth ride quality", "instant acceleration",
]
DISLIKED_PHRASES = [
    "road noise at highway speeds", "a stiff ride", "cramped rear seats",
    "expensive maintenance", "dated infotainment", "slow acceleration",
]


def pick(rng, options, weights=None, size=None):
    p = None
    if weights is not None:
        w = np.asarray(weights, dtype=float)
        p = w / w.sum()
    choice = rng.choice(len(options), size=size, replace=size is not None and size > len(options), p=p)
    if size is None:
        return options[int(choice)]
    return [options[int(i)] for i in np.atleast_1d(choice)]


def make_item(rng, index: int) -> dict:
    make = pick(rng, MAKES)
    model = pick(rng, MODELS[make])
    body = pick(rng, BODIES, BODY_W)
    fuel = pick(rng, FUELS, FUEL_W)
    transmission = pick(rng, TRANSMISSIONS, TRANS_W)
    drivetrain = pick(rng, DRIVETRAINS, DRIVE_W)
    ext = pick(rng, EXT_COLORS)
    intr = pick(rng, INT_COLORS)
    condition = pick(rng, CONDITIONS, COND_W)

    if condition == "new":
        year = int(rng.integers(2023, 2026))
        mileage = int(rng.integers(0, 120))
    else:
        year = int(rng.integers(2012, 2025))
        age = max(1, 2026 - year)
        mileage = int(age * rng.integers(7000, 16000))

    base = BODY_BASE_PRICE[body] + FUEL_PRICE_ADJ[fuel] + MAKE_PRICE_ADJ[make]
    price = float(base)
    if condition == "used":
        price *= 0.88 ** max(1, 2026 - year)
    price *= float(rng.uniform(0.9, 1.1))
    price = max(4000, int(round(price / 50.0)) * 50)

    pros_pool = list(GENERIC_PROS)
    cons_pool = list(GENERIC_CONS)
    if fuel in ("hybrid", "electric"):
        pros_pool += ["excellent fuel economy", "quiet cabin", "low running costs"]
    if fuel == "electric":
        pros_pool += ["instant acceleration", "zero tailpipe emissions"]
        cons_pool += ["limited charging network", "long road trips need planning"]
    if fuel == "gasoline" and body in ("truck", "SUV"):
        cons_pool += ["poor fuel economy"]
    if body in ("SUV", "truck", "minivan", "wagon"):
        pros_pool += ["spacious cargo area", "roomy back seats", "high seating position"]
    if body == "truck":
        pros_pool += ["strong towing capacity"]
    if body in ("coupe", "hatchback", "sedan"):
        cons_pool += ["tight rear headroom"]
    if drivetrain == "AWD":
        pros_pool += ["confident handling in snow"]
    if make in ("BMW", "Audi"):
        pros_pool += ["premium interior materials", "smooth ride quality"]
        cons_pool += ["pricey options", "expensive maintenance"]

    n_pros = int(rng.integers(3, 6))
    n_cons = int(rng.integers(1, 4))
    pros = pick(rng, sorted(set(pros_pool)), size=n_pros)
    cons = pick(rng, sorted(set(cons_pool)), size=n_cons)
    pros = list(dict.fromkeys(pros))
    cons = list(dict.fromkeys(cons))

    description = (
        f"{year} {make} {model} {body}, {fuel}, {drivetrain}, {transmission} "
        f"transmission, {ext} exterior with {intr} interior, {condition}, "
        f"{mileage} miles. Known for {pros[0]} and {pros[1 % len(pros)]}."
    )
    return {
        "id": f"car-{index:04d}",
        "make": make,
        "body": body,
        "fuel": fuel,
        "condition": condition,
        "transmission": transmission,
        "drivetrain": drivetrain,
        "exterior_color": ext,
        "interior_color": intr,
        "year": year,
        "mileage": mileage,
        "price": price,
        "description": description,
        "pros": "|".join(pros),
        "cons": "|".join(cons),
    }


SCHEMA = {
    "id_column": "id",
    "description_column": "description",
    "pros_column": "pros",
    "cons_column": "cons",
    "attributes": [
        {"name": "make", "kind": "categorical", "relaxation_rank": 4, "question_label": "make"},
        {"name": "body", "kind": "categorical", "relaxation_rank": 6, "question_label": "body style"},
        {"name": "fuel", "kind": "categorical", "relaxation_rank": 5, "question_label": "fuel type"},
        {"name": "condition", "kind": "categorical", "relaxation_rank": 7, "question_label": "condition"},
        {"name": "transmission", "kind": "categorical", "relaxation_rank": 2, "question_label": "transmission"},
        {"name": "drivetrain", "kind": "categorical", "relaxation_rank": 3, "question_label": "drivetrain"},
        {"name": "exterior_color", "kind": "categorical", "relaxation_rank": 0, "question_label": "exterior color"},
        {"name": "interior_color", "kind": "categorical", "relaxation_rank": 1, "question_label": "interior color"},
        {"name": "year", "kind": "continuous", "relaxation_rank": 8, "question_label": "model year"},
        {"name": "mileage", "kind": "continuous", "unit": "miles", "relaxation_rank": 9, "question_label": "mileage"},
        {"name": "price", "kind": "continuous", "unit": "USD", "relaxation_rank": 10, "question_label": "price"},
    ],
}

ANSWER_TEMPLATES = {
    "make": "{v} would be my first choice",
    "body": "probably a {v} for us",
    "fuel": "{v} would be ideal",
    "condition": "{v} is what we are after",
    "transmission": "definitely {v} for me",
    "drivetrain": "{v} would suit our roads well",
    "exterior_color": "{v} on the outside would be nice",
    "interior_color": "{v} for the interior works best",
}
FALLBACK_ANSWER = "I'm flexible on that one."

# hidden constraints lean toward the dimensions the entropy policy tends
# to ask about (tertile-binned continuous ones), with some categoricals
HIDDEN_DIMS = ["mileage", "year", "fuel", "make", "transmission", "drivetrain"]
HIDDEN_W = [0.28, 0.28, 0.18, 0.10, 0.08, 0.08]
MILEAGE_CAPS = [40000, 60000, 80000]
YEAR_FLOORS = [2016, 2018, 2020]


def hidden_constraint(rng, dim):
    """Returns (predicate json, scripted answer) for one hidden dimension."""
    if dim == "mileage":
        cap = int(pick(rng, MILEAGE_CAPS))
        return (
            {"op": "range", "lo": None, "hi": float(cap)},
            f"under {cap:,} miles would be best",
        )
    if dim == "year":
        floor = int(pick(rng, YEAR_FLOORS))
        return ({"op": "range", "lo": float(floor), "hi": None}, f"{floor} or newer ideally")
    if dim == "fuel":
        value = pick(rng, FUELS, FUEL_W)
    elif dim == "make":
        value = pick(rng, MAKES)
    elif dim == "transmission":
        value = pick(rng, TRANSMISSIONS, TRANS_W)
    else:
        value = pick(rng, DRIVETRAINS, DRIVE_W)
    return ({"op": "equals", "value": str(value)}, ANSWER_TEMPLATES[dim].format(v=value))

SHORT_TEMPLATES = [
    ("Looking for a used SUV under $30k", {"body": "SUV", "condition": "used", "price": 30000}),
    ("Need a {make} {body} under ${pk}k", {"make": None, "body": None, "price": None}),
    ("{fuel} {body} under ${pk}k please", {"fuel": None, "body": None, "price": None}),
    ("Shopping for a {condition} {body}", {"condition": None, "body": None}),
    ("Want a {make} under ${pk}k", {"make": None, "price": None}),
    ("Looking for a {fuel} car", {"fuel": None}),
    ("Need a {condition} {make} soon", {"condition": None, "make": None}),
    ("A {body} under ${pk}k would be great", {"body": None, "price": None}),
]

LONG_OPENERS = [
    "I'm shopping for a {condition} {make} {body} for my family.",
    "We just moved out to the suburbs and need a {condition} {body}, ideally a {make}.",
    "After years with my old commuter I'm finally replacing it with a {condition} {make} {body}.",
    "My daily drive is about an hour each way, so I'm hunting for a {condition} {make} {body}.",
]


def build_short(rng, idx: int, template, slots) -> dict:
    values: dict[str, object] = {}
    fills: dict[str, object] = {}
    for dim, fixed in slots.items():
        if fixed is not None:
            values[dim] = fixed
            continue
        if dim == "make":
            values[dim] = pick(rng, MAKES)
        elif dim == "body":
            values[dim] = pick(rng, BODIES, BODY_W)
        elif dim == "fuel":
            values[dim] = pick(rng, FUELS, FUEL_W)
        elif dim == "condition":
            values[dim] = pick(rng, CONDITIONS, COND_W)
        elif dim == "price":
            values[dim] = int(rng.integers(18, 46)) * 1000
    fills.update(values)
    if "price" in values:
        fills["pk"] = int(values["price"]) // 1000
    query = template.format(**fills)

    constraints: dict[str, dict] = {}
    for dim, value in values.items():
        if dim == "price":
            constraints[dim] = {"op": "range", "lo": None, "hi": float(value)}
        else:
            constraints[dim] = {"op": "equals", "value": str(value)}

    # one or two hidden constraints revealed only if asked
    candidates = [d for d, w in zip(HIDDEN_DIMS, HIDDEN_W) if d not in values]
    weights = [w for d, w in zip(HIDDEN_DIMS, HIDDEN_W) if d not in values]
    hidden = pick(rng, candidates, weights, size=int(rng.integers(1, 3)))
    hidden = list(dict.fromkeys(hidden))
    answer_script = {"*": FALLBACK_ANSWER}
    for dim in hidden:
        pred, answer = hidden_constraint(rng, dim)
        constraints[dim] = pred
        answer_script[dim] = answer

    max_price = float(values.get("price", 80000))
    return {
        "persona_id": f"p{idx:03d}",
        "initial_query": query,
        "hard_constraints": constraints,
        "liked_truth": [],
        "disliked_truth": [],
        "answer_script": answer_script,
        "style": "patient",
        "max_price": max_price,
    }


def build_long(rng, idx: int) -> dict:
    make = pick(rng, MAKES)
    body = pick(rng, BODIES, BODY_W)
    condition = pick(rng, CONDITIONS, COND_W)
    price = int(rng.integers(22, 60)) * 1000
    liked = pick(rng, LIKED_PHRASES, size=2)
    liked = list(dict.fromkeys(liked))
    disliked = [pick(rng, DISLIKED_PHRASES)]
    opener = pick(rng, LONG_OPENERS).format(condition=condition, make=make, body=body)
    query = (
        f"{opener} My budget is around ${price // 1000},000. "
        f"I want {liked[0]}" + (f" and {liked[1]}" if len(liked) > 1 else "") + ", "
        f"and I hate {disliked[0]}."
    )
    constraints = {
        "make": {"op": "equals", "value": make},
        "body": {"op": "equals", "value": body},
        "condition": {"op": "equals", "value": condition},
        "price": {"op": "range", "lo": None, "hi": float(price)},
    }
    answer_script = {"*": FALLBACK_ANSWER}
    hidden = pick(rng, ["mileage", "year", "fuel", "transmission", "drivetrain"],
                  [0.3, 0.3, 0.2, 0.1, 0.1], size=int(rng.integers(1, 3)))
    for dim in dict.fromkeys(hidden):
        pred, answer = hidden_constraint(rng, dim)
        constraints[dim] = pred
        answer_script[dim] = answer
    return {
        "persona_id": f"p{idx:03d}",
        "initial_query": query,
        "hard_constraints": constraints,
        "liked_truth": liked,
        "disliked_truth": disliked,
        "answer_script": answer_script,
        "style": "patient",
        "max_price": float(price),
    }


def generate(out_dir: Path) -> None:
    rng = np.random.default_rng(SEED)
    out_dir.mkdir(parents=True, exist_ok=True)
    persona_dir = out_dir / "personas"
    persona_dir.mkdir(exist_ok=True)

    rows = [make_item(rng, i) for i in range(N_ITEMS)]
    fieldnames = list(rows[0].keys())
    with (out_dir / "cars.csv").open("w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)
    (out_dir / "cars.schema.json").write_text(
        json.dumps(SCHEMA, indent=2) + "\n", encoding="utf-8"
    )

    personas = []
    for i in range(N_SHORT):
        template, slots = SHORT_TEMPLATES[i % len(SHORT_TEMPLATES)]
        personas.append(build_short(rng, i, template, dict(slots)))
    for i in range(N_SHORT, N_SHORT + N_LONG):
        personas.append(build_long(rng, i))

    # a few impatient shoppers: some bail on the first question, some
    # signal it in the opening message
    for i in (4, 12, 33):
        personas[i]["style"] = "impatient"
    personas[20]["initial_query"] = "whatever, just show me good cars under $25k"
    personas[20]["hard_constraints"] = {"price": {"op": "range", "lo": None, "hi": 25000.0}}
    personas[20]["max_price"] = 25000.0
    personas[20]["style"] = "impatient"
    # one persona whose constraints cannot all be met: forces relaxation
    personas[26]["initial_query"] = "Need a green diesel minivan under $9k"
    personas[26]["hard_constraints"] = {
        "exterior_color": {"op": "equals", "value": "green"},
        "fuel": {"op": "equals", "value": "diesel"},
        "body": {"op": "equals", "value": "minivan"},
        "price": {"op": "range", "lo": None, "hi": 9000.0},
    }
    personas[26]["max_price"] = 9000.0

    for persona in personas:
        path = persona_dir / f"{persona['persona_id']}.json"
        path.write_text(json.dumps(persona, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {len(rows)} items and {len(personas)} personas to {out_dir}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out",
        type=Path,
        default=Path(__file__).resolve().parents[1] / "src" / "askrec" / "data",
    )
    args = parser.parse_args()
    generate(args.out)
