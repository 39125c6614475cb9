"""Persona-driven simulation: scripted shoppers talk to the engine, a
deterministic constraint oracle judges the recommendations, and the suite
runner aggregates metrics across strategies, ablations, and seeds.

The judge scores only the persona's hard constraints (plus its price
ceiling), so every verdict is exactly reproducible; soft liked/disliked
phrases surface as an unscored "preference echo" diagnostic instead.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .catalog import CONTINUOUS, Catalog, FilterSet, Item, Range
from .config import EngineConfig
from .dialogue import DialogueEngine, QuestionSpec, SessionState
from .embedding import EmbeddingStore
from .grid import Grid
from .metrics import (
    ATTR_NOT_MENTIONED,
    ATTR_NOT_SATISFIED,
    ATTR_SATISFIED,
    SATISFIED,
    UNSATISFIED,
    AttributeAssessment,
    JudgeVerdict,
    MetricsReport,
    attr_sat_rate,
    confidence_filter_and_reassess,
    ild,
    ndcg_at_k,
    precision_at_k,
    satisfied_count_at_k,
)
from .ranking import phrase_alignment

IMPATIENT_REPLY = "whatever, just show me what you have"
SHORT_QUERY_MAX_WORDS = 10


@dataclass(frozen=True)
class Persona:
    """Simulated shopper: a visible initial query plus hidden ground truth
    (constraints, phrase preferences, a price ceiling) and scripted answers
    for every dimension the agent might ask about."""

    persona_id: str
    initial_query: str
    hard_constraints: FilterSet
    liked_truth: tuple[str, ...] = ()
    disliked_truth: tuple[str, ...] = ()
    answer_script: Mapping[str, str] = field(default_factory=dict)
    style: str = "patient"
    max_price: float | None = None

    def query_type(self) -> str:
        return "short" if len(self.initial_query.split()) < SHORT_QUERY_MAX_WORDS else "long"

    def answer_for(self, dimension: str) -> str:
        if self.style == "impatient":
            return IMPATIENT_REPLY
        answer = self.answer_script.get(dimension) or self.answer_script.get("*")
        return answer or "any of them would work for me"

    def validate(self, catalog: Catalog) -> None:
        self.hard_constraints.validate(catalog)
        if "*" not in self.answer_script:
            missing = [d for d in catalog.dimensions() if d not in self.answer_script]
            if missing:
                raise ValueError(
                    f"persona {self.persona_id} answer_script misses {missing} "
                    "and has no '*' fallback"
                )

    def to_json(self) -> dict:
        return {
            "persona_id": self.persona_id,
            "initial_query": self.initial_query,
            "hard_constraints": self.hard_constraints.to_json(),
            "liked_truth": list(self.liked_truth),
            "disliked_truth": list(self.disliked_truth),
            "answer_script": dict(self.answer_script),
            "style": self.style,
            "max_price": self.max_price,
        }

    @staticmethod
    def from_json(data: Mapping) -> "Persona":
        return Persona(
            persona_id=data["persona_id"],
            initial_query=data["initial_query"],
            hard_constraints=FilterSet.from_json(data.get("hard_constraints", {})),
            liked_truth=tuple(data.get("liked_truth", ())),
            disliked_truth=tuple(data.get("disliked_truth", ())),
            answer_script=dict(data.get("answer_script", {})),
            style=data.get("style", "patient"),
            max_price=data.get("max_price"),
        )


def load_personas(directory: str | Path) -> list[Persona]:
    """Read every *.json persona record in the directory, sorted by name."""
    personas = []
    for path in sorted(Path(directory).glob("*.json")):
        personas.append(Persona.from_json(json.loads(path.read_text(encoding="utf-8"))))
    return personas


# --------------------------------------------------------------------------
# Simulation
# --------------------------------------------------------------------------


@dataclass
class SimulationResult:
    persona_id: str
    transcript: list[dict]
    questions: list[QuestionSpec]
    grid: Grid | None
    relaxed_dimensions: tuple[str, ...]
    state: SessionState | None = None
    error: str | None = None


def simulate(persona: Persona, engine: DialogueEngine, max_turns: int = 10) -> SimulationResult:
    """Drive one full conversation; deterministic given persona + engine.

    Engine failures abort the run but keep the partial transcript."""
    state = engine.new_session(session_id=f"sim-{persona.persona_id}")
    transcript: list[dict] = []
    questions: list[QuestionSpec] = []
    text = persona.initial_query
    grid: Grid | None = None
    relaxed: tuple[str, ...] = ()
    error: str | None = None
    for _ in range(max_turns):
        try:
            result = engine.advance_turn(state, text)
        except Exception as exc:  # preserve the partial transcript
            error = f"{type(exc).__name__}: {exc}"
            break
        user_record = state.history[-2]
        transcript.append(
            {"speaker": "user", "text": user_record.text, "delta": user_record.delta}
        )
        if result.kind == "question":
            assert result.question is not None
            questions.append(result.question)
            transcript.append(
                {
                    "speaker": "agent",
                    "kind": "question",
                    "dimension": result.question.dimension,
                    "text": result.question.question_text,
                }
            )
            text = persona.answer_for(result.question.dimension)
            continue
        grid = result.grid
        relaxed = result.relaxed_dimensions
        transcript.append(
            {
                "speaker": "agent",
                "kind": "recommendations",
                "grid": grid.to_json() if grid else None,
                "relaxed_dimensions": list(relaxed),
            }
        )
        break
    return SimulationResult(
        persona_id=persona.persona_id,
        transcript=transcript,
        questions=questions,
        grid=grid,
        relaxed_dimensions=relaxed,
        state=state,
        error=error,
    )


# --------------------------------------------------------------------------
# Deterministic judging
# --------------------------------------------------------------------------


def _price_dimension(catalog: Catalog) -> str | None:
    for spec in catalog.schema:
        if spec.kind == CONTINUOUS and (spec.unit or "").casefold() == "usd":
            return spec.name
    return None


def judge(persona: Persona, item: Item, catalog: Catalog) -> JudgeVerdict:
    """Constraint oracle: per attribute, satisfied iff the persona's hard
    constraint holds on the item's value (missing value fails), not
    mentioned when the persona has no constraint there. The overall label
    is satisfied iff every mentioned attribute is; confidence is the
    fraction of mentioned attributes satisfied (1.0 when none are)."""
    constraints = dict(persona.hard_constraints.entries)
    price_dim = _price_dimension(catalog)
    if persona.max_price is not None and price_dim and price_dim not in constraints:
        constraints[price_dim] = Range(hi=float(persona.max_price))

    assessments: dict[str, AttributeAssessment] = {}
    mentioned = 0
    satisfied = 0
    for dim in catalog.dimensions():
        pred = constraints.get(dim)
        if pred is None:
            assessments[dim] = AttributeAssessment(ATTR_NOT_MENTIONED)
            continue
        mentioned += 1
        value = item.attributes.get(dim)
        if value is not None and pred.matches(value):
            satisfied += 1
            assessments[dim] = AttributeAssessment(
                ATTR_SATISFIED, f"{dim}={value} meets the stated constraint"
            )
        else:
            assessments[dim] = AttributeAssessment(
                ATTR_NOT_SATISFIED, f"{dim}={value} violates the stated constraint"
            )
    label = SATISFIED if satisfied == mentioned else UNSATISFIED
    confidence = satisfied / mentioned if mentioned else 1.0
    return JudgeVerdict(item.id, label, confidence, assessments)


def question_judge(question: QuestionSpec, prior_events: Sequence[Mapping], catalog: Catalog) -> dict:
    """Binary relevance/newness oracle for one follow-up question.

    Newness fails when the dimension was already asked or already
    constrained by the user's earlier turns; relevance fails only for
    out-of-schema dimensions (always passes for the deterministic engine,
    kept for external question generators)."""
    asked_before: set[str] = set()
    constrained_before: set[str] = set()
    for event in prior_events:
        if event.get("speaker") == "agent" and event.get("kind") == "question":
            asked_before.add(event["dimension"])
        if event.get("speaker") == "user":
            delta = event.get("delta") or {}
            constrained_before.update((delta.get("filter_delta") or {}).keys())
    return {
        "relevance": question.dimension in set(catalog.dimensions()),
        "newness": question.dimension not in (asked_before | constrained_before),
    }


# --------------------------------------------------------------------------
# Suite runner
# --------------------------------------------------------------------------

ABLATIONS = ("none", "mmr", "entropyq", "both")
ABLATION_LABELS = {
    "none": "Full",
    "mmr": "-MMR",
    "entropyq": "-EntropyQ",
    "both": "-MMR and EntropyQ",
}


def ablated_config(base: EngineConfig, strategy: str, ablation: str) -> EngineConfig:
    """MMR is disabled by pinning its lambda to 1 (pure similarity sort);
    entropy questioning is disabled by fixed schema-order questioning."""
    config = EngineConfig(**vars(base))
    config.strategy = strategy
    if ablation in ("mmr", "both"):
        config.mmr_lambda = 1.0
    if ablation in ("entropyq", "both"):
        config.question_policy = "fixed"
    return config


def subsample_catalog(catalog: Catalog, seed: int, fraction: float) -> Catalog:
    """Seeded row subsample (order-preserving); the per-seed variation in
    the shipped suite plays the role of run-to-run noise."""
    n = len(catalog)
    keep = max(1, int(round(fraction * n)))
    if keep >= n:
        return catalog
    rng = np.random.default_rng(seed)
    idx = sorted(rng.choice(n, size=keep, replace=False).tolist())
    return Catalog(catalog.schema, [catalog.items[i] for i in idx])


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values) if values else 0.0


def _std(values: Sequence[float]) -> float:
    if len(values) < 2:
        return 0.0
    m = _mean(values)
    return math.sqrt(sum((v - m) ** 2 for v in values) / (len(values) - 1))


def evaluate_simulation(
    sim: SimulationResult,
    persona: Persona,
    catalog: Catalog,
    store: EmbeddingStore,
    ks: Sequence[int] = (9,),
    confidence_tau: float = 0.51,
    align_tau: float = 0.6,
) -> dict:
    """Score one finished simulation: verdict metrics, ILD, question
    pass/fail counts, and the preference-echo diagnostic."""
    assert sim.grid is not None
    flat_ids = sim.grid.item_ids()
    verdicts = [judge(persona, catalog.item(i), catalog) for i in flat_ids]
    raw, filtered = confidence_filter_and_reassess([verdicts], tau=confidence_tau)

    scores: dict[str, object] = {"verdicts": raw}
    for k in ks:
        scores[f"precision@{k}"] = precision_at_k(raw, k)
        scores[f"ndcg@{k}"] = ndcg_at_k(raw, k)
        scores[f"sat@{k}"] = float(satisfied_count_at_k(raw, k))
        scores[f"filtered_precision@{k}"] = precision_at_k(filtered, k) if filtered else 0.0
        scores[f"filtered_ndcg@{k}"] = ndcg_at_k(filtered, k) if filtered else 0.0
    scores["ild"] = ild(store.description_vectors(flat_ids))

    judgments = []
    prior: list[Mapping] = []
    for event in sim.transcript:
        if event.get("kind") == "question":
            spec = QuestionSpec(event["dimension"], "", event["text"])
            judgments.append(question_judge(spec, prior, catalog))
        prior.append(event)
    scores["question_results"] = judgments

    liked = list(sim.state.liked) if sim.state else []
    if liked and flat_ids:
        echoed = 0
        for phrase in liked:
            vec = store.embed_query(phrase)
            if any(
                phrase_alignment(vec, store.pros[item_id], align_tau) > 0
                for item_id in flat_ids
            ):
                echoed += 1
        scores["preference_echo"] = echoed / len(liked)
    else:
        scores["preference_echo"] = None
    return scores


@dataclass
class SuiteReport:
    """mean +/- std per metric for every (query type, strategy, ablation)
    cell, over the seed runs."""

    cells: dict = field(default_factory=dict)
    seeds: tuple[int, ...] = ()
    sample_fraction: float = 1.0
    ks: tuple[int, ...] = (9,)
    persona_counts: dict = field(default_factory=dict)

    def cell(self, query_type: str, strategy: str, ablation: str) -> dict:
        return self.cells[query_type][strategy][ablation]

    def to_json(self) -> dict:
        return {
            "seeds": list(self.seeds),
            "sample_fraction": self.sample_fraction,
            "ks": list(self.ks),
            "persona_counts": dict(sorted(self.persona_counts.items())),
            "cells": self.cells,
        }

    def to_markdown(self, k: int = 9) -> str:
        lines = [
            "| Query Type | Method | Config | Prec@%d | NDCG@%d | Sat@%d | ILD |" % (k, k, k),
            "|---|---|---|---|---|---|---|",
        ]

        def fmt(stats: dict | None) -> str:
            if not stats:
                return "-"
            return f"{stats['mean']:.3f} ±{stats['std']:.3f}"

        for query_type in sorted(self.cells):
            for strategy in sorted(self.cells[query_type]):
                for ablation in ABLATIONS:
                    cell = self.cells[query_type][strategy].get(ablation)
                    if cell is None:
                        continue
                    lines.append(
                        "| %s | %s | %s | %s | %s | %s | %s |"
                        % (
                            query_type.capitalize(),
                            strategy.upper(),
                            ABLATION_LABELS[ablation],
                            fmt(cell.get(f"precision@{k}")),
                            fmt(cell.get(f"ndcg@{k}")),
                            fmt(cell.get(f"sat@{k}")),
                            fmt(cell.get("ild")),
                        )
                    )
        return "\n".join(lines) + "\n"


def run_suite(
    personas: Sequence[Persona],
    catalog: Catalog,
    base_config: EngineConfig | None = None,
    strategies: Sequence[str] = ("es", "cr"),
    ablations: Sequence[str] = ABLATIONS,
    seeds: Sequence[int] = (0, 1, 2),
    ks: Sequence[int] = (9,),
    sample_fraction: float = 0.8,
    store: EmbeddingStore | None = None,
) -> SuiteReport:
    """Run every persona through every (strategy, ablation) cell across the
    seeded catalog subsamples and aggregate mean +/- std per query type.

    Fully deterministic: same inputs and seeds give a byte-identical
    report."""
    base = base_config or EngineConfig()
    if store is None:
        from .embedding import HashingEmbedder

        store = EmbeddingStore(catalog, HashingEmbedder(base.embedding_dim))
    subcatalogs = {seed: subsample_catalog(catalog, seed, sample_fraction) for seed in seeds}

    by_type: dict[str, list[Persona]] = {}
    for persona in personas:
        by_type.setdefault(persona.query_type(), []).append(persona)

    scalar_keys = (
        [f"precision@{k}" for k in ks]
        + [f"ndcg@{k}" for k in ks]
        + [f"sat@{k}" for k in ks]
        + [f"filtered_precision@{k}" for k in ks]
        + [f"filtered_ndcg@{k}" for k in ks]
        + ["ild"]
    )

    cells: dict = {}
    for query_type in sorted(by_type):
        group = by_type[query_type]
        cells[query_type] = {}
        for strategy in strategies:
            cells[query_type][strategy] = {}
            for ablation in ablations:
                config = ablated_config(base, strategy, ablation)
                per_seed: dict[str, list[float]] = {key: [] for key in scalar_keys}
                per_seed["question_newness"] = []
                per_seed["question_relevance"] = []
                per_seed["preference_echo"] = []
                attr_totals: list[JudgeVerdict] = []
                for seed in seeds:
                    engine = DialogueEngine(subcatalogs[seed], config=config, store=store)
                    persona_scores = []
                    question_results: list[dict] = []
                    echoes: list[float] = []
                    for persona in group:
                        sim = simulate(persona, engine)
                        if sim.error or sim.grid is None:
                            raise RuntimeError(
                                f"simulation failed for {persona.persona_id}: {sim.error}"
                            )
                        scores = evaluate_simulation(
                            sim, persona, subcatalogs[seed], store, ks,
                            base.confidence_tau, base.align_tau,
                        )
                        persona_scores.append(scores)
                        question_results.extend(scores["question_results"])
                        attr_totals.extend(scores["verdicts"])
                        if scores["preference_echo"] is not None:
                            echoes.append(scores["preference_echo"])
                    for key in scalar_keys:
                        per_seed[key].append(_mean([s[key] for s in persona_scores]))
                    if question_results:
                        per_seed["question_newness"].append(
                            _mean([1.0 if q["newness"] else 0.0 for q in question_results])
                        )
                        per_seed["question_relevance"].append(
                            _mean([1.0 if q["relevance"] else 0.0 for q in question_results])
                        )
                    if echoes:
                        per_seed["preference_echo"].append(_mean(echoes))

                cell = {
                    key: {"mean": _mean(values), "std": _std(values)}
                    for key, values in per_seed.items()
                    if values
                }
                cell["attr_sat"] = attr_sat_rate(attr_totals)
                cells[query_type][strategy][ablation] = cell

    return SuiteReport(
        cells=cells,
        seeds=tuple(seeds),
        sample_fraction=sample_fraction,
        ks=tuple(ks),
        persona_counts={qt: len(group) for qt, group in by_type.items()},
    )
