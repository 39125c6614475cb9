from __future__ import annotations

import json
import math

import numpy as np
import pytest

from askrec.catalog import Equals, FilterSet, Range
from askrec.config import EngineConfig
from askrec.dialogue import DialogueEngine, QuestionSpec
from askrec.embedding import HashingEmbedder, Vector
from askrec.evalsim import (
    Persona,
    ablated_config,
    judge,
    load_personas,
    question_judge,
    run_suite,
    simulate,
    subsample_catalog,
)
from askrec.fixtures import default_personas_dir
from askrec.metrics import (
    ATTR_NOT_MENTIONED,
    ATTR_NOT_SATISFIED,
    ATTR_SATISFIED,
    AttributeAssessment,
    JudgeVerdict,
    attr_sat_rate,
    confidence_filter_and_reassess,
    ild,
    ndcg_at_k,
    precision_at_k,
    satisfied_count_at_k,
)

from conftest import make_catalog, make_item


def verdicts_from(rels, confidences=None):
    confidences = confidences or [1.0] * len(rels)
    return [
        JudgeVerdict(f"i{i}", "satisfied" if r else "unsatisfied", c)
        for i, (r, c) in enumerate(zip(rels, confidences))
    ]


class TestPrecision:
    def test_all_satisfied(self):
        assert precision_at_k(verdicts_from([1] * 9), 9) == 1.0

    def test_two_of_three(self):
        assert precision_at_k(verdicts_from([1, 0, 1]), 3) == pytest.approx(2 / 3)

    def test_none_satisfied(self):
        assert precision_at_k(verdicts_from([0, 0, 0]), 3) == 0.0

    def test_short_list_padded_with_misses(self):
        assert precision_at_k(verdicts_from([1]), 9) == pytest.approx(1 / 9)

    def test_k_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            precision_at_k(verdicts_from([1]), 0)

    def test_precision_times_k_equals_satisfied_count(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            rels = list(rng.integers(0, 2, size=rng.integers(1, 12)))
            k = int(rng.integers(1, 12))
            v = verdicts_from(rels)
            assert precision_at_k(v, k) * k == pytest.approx(satisfied_count_at_k(v, k))


class TestNdcg:
    def test_all_relevant_is_one(self):
        assert ndcg_at_k(verdicts_from([1, 1, 1]), 3) == pytest.approx(1.0)

    def test_hand_computed_zero_one_at_two(self):
        # DCG = 0 + 1/log2(3); IDCG = 1 -> 1/log2(3)
        expected = 1 / math.log2(3)
        assert expected == pytest.approx(0.6309297535714575, rel=1e-12)
        assert ndcg_at_k(verdicts_from([0, 1]), 2) == pytest.approx(expected, rel=1e-12)

    def test_all_zero_is_zero_by_convention(self):
        assert ndcg_at_k(verdicts_from([0, 0]), 2) == 0.0

    def test_bounded_and_prefix_orderings_score_one(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            rels = list(rng.integers(0, 2, size=rng.integers(1, 10)))
            k = len(rels)
            value = ndcg_at_k(verdicts_from(rels), k)
            assert 0.0 <= value <= 1.0 + 1e-12
            ones = sum(rels)
            if rels == sorted(rels, reverse=True) and ones:
                assert value == pytest.approx(1.0)
            elif ones and rels != sorted(rels, reverse=True):
                assert value < 1.0


class TestIld:
    def test_duplicates_score_zero(self):
        v = Vector(np.array([1.0, 2.0, 0.5]))
        assert ild([v, v, v]) == pytest.approx(0.0, abs=1e-12)

    def test_pairwise_orthogonal_scores_one(self):
        vs = [Vector(np.eye(3)[i]) for i in range(3)]
        assert ild(vs) == pytest.approx(1.0, abs=1e-12)

    def test_fewer_than_two_items_zero(self):
        assert ild([]) == 0.0
        assert ild([Vector(np.ones(3))]) == 0.0

    def test_matches_double_loop_oracle(self):
        rng = np.random.default_rng(2)
        vs = [Vector(rng.normal(size=6)) for _ in range(7)]
        got = ild(vs)

        def naive_cos(a, b):
            dot = float(np.dot(a, b))
            return dot / (float(np.linalg.norm(a)) * float(np.linalg.norm(b)))

        total, pairs = 0.0, 0
        for i in range(7):
            for j in range(i + 1, 7):
                total += 1 - naive_cos(vs[i].components, vs[j].components)
                pairs += 1
        want = min(1.0, max(0.0, total / pairs))
        assert got == pytest.approx(want, rel=1e-12)

    def test_permutation_invariant(self):
        rng = np.random.default_rng(3)
        vs = [Vector(rng.normal(size=5)) for _ in range(6)]
        shuffled = list(vs)
        rng.shuffle(shuffled)
        assert ild(vs) == pytest.approx(ild(shuffled), abs=1e-12)


class TestAttrSat:
    def verdict(self, item_id, statuses):
        return JudgeVerdict(
            item_id,
            "satisfied",
            1.0,
            {k: AttributeAssessment(v) for k, v in statuses.items()},
        )

    def test_counts_non_null_assessments(self):
        verdicts = [
            self.verdict("a", {"price": ATTR_SATISFIED, "fuel": ATTR_NOT_MENTIONED}),
            self.verdict("b", {"price": ATTR_SATISFIED}),
            self.verdict("c", {"price": ATTR_SATISFIED}),
            self.verdict("d", {"price": ATTR_NOT_SATISFIED}),
        ]
        rates = attr_sat_rate(verdicts)
        assert rates["price"] == pytest.approx(0.75)
        assert "fuel" not in rates

    def test_all_satisfied_everywhere(self):
        verdicts = [self.verdict("a", {"price": ATTR_SATISFIED, "body": ATTR_SATISFIED})]
        assert attr_sat_rate(verdicts) == {"body": 1.0, "price": 1.0}


class TestConfidenceAggregation:
    def test_single_run_identity(self):
        run = verdicts_from([1, 0], [1.0, 1.0])
        raw, filtered = confidence_filter_and_reassess([run], tau=0.51)
        assert [v.label for v in raw] == [v.label for v in run]
        assert len(filtered) == 2

    def test_majority_vote(self):
        runs = [verdicts_from([1]), verdicts_from([0]), verdicts_from([1])]
        raw, _ = confidence_filter_and_reassess(runs)
        assert raw[0].label == "satisfied"

    def test_tie_broken_by_higher_mean_confidence(self):
        sat = JudgeVerdict("i0", "satisfied", 0.9)
        unsat = JudgeVerdict("i0", "unsatisfied", 0.6)
        raw, _ = confidence_filter_and_reassess([[sat], [unsat]])
        assert raw[0].label == "satisfied"
        raw, _ = confidence_filter_and_reassess(
            [[JudgeVerdict("i0", "satisfied", 0.4)], [JudgeVerdict("i0", "unsatisfied", 0.8)]]
        )
        assert raw[0].label == "unsatisfied"

    def test_low_confidence_items_leave_filtered_view(self):
        run = verdicts_from([1, 1], [0.5, 0.9])
        raw, filtered = confidence_filter_and_reassess([run], tau=0.51)
        assert len(raw) == 2
        assert [v.item_id for v in filtered] == ["i1"]

    def test_inconsistent_item_sets_rejected(self):
        with pytest.raises(ValueError):
            confidence_filter_and_reassess(
                [[JudgeVerdict("a", "satisfied", 1.0)], [JudgeVerdict("b", "satisfied", 1.0)]]
            )


class TestJudge:
    def suv_persona(self):
        return Persona(
            persona_id="p",
            initial_query="q",
            hard_constraints=FilterSet({"body": Equals("SUV"), "price": Range(hi=30000)}),
        )

    def test_all_constraints_met(self):
        catalog = make_catalog([make_item(0, body="SUV", price=25000.0)])
        verdict = judge(self.suv_persona(), catalog.item("i0"), catalog)
        assert verdict.label == "satisfied"
        assert verdict.confidence == 1.0

    def test_half_met_yields_half_confidence(self):
        catalog = make_catalog([make_item(0, body="SUV", price=35000.0)])
        verdict = judge(self.suv_persona(), catalog.item("i0"), catalog)
        assert verdict.label == "unsatisfied"
        assert verdict.confidence == pytest.approx(0.5)
        assert verdict.attributes["price"].status == ATTR_NOT_SATISFIED
        assert verdict.attributes["body"].status == ATTR_SATISFIED

    def test_no_constraints_vacuously_satisfied(self):
        catalog = make_catalog([make_item(0, body="SUV", price=10.0)])
        persona = Persona("p", "q", FilterSet())
        verdict = judge(persona, catalog.item("i0"), catalog)
        assert verdict.label == "satisfied"
        assert verdict.confidence == 1.0
        assert all(a.status == ATTR_NOT_MENTIONED for a in verdict.attributes.values())

    def test_missing_value_fails_constraint(self):
        catalog = make_catalog([make_item(0, body=None, price=10000.0)])
        persona = Persona("p", "q", FilterSet({"body": Equals("SUV")}))
        verdict = judge(persona, catalog.item("i0"), catalog)
        assert verdict.label == "unsatisfied"

    def test_max_price_acts_as_price_ceiling(self):
        catalog = make_catalog([make_item(0, body="SUV", price=45000.0)])
        persona = Persona("p", "q", FilterSet(), max_price=30000.0)
        verdict = judge(persona, catalog.item("i0"), catalog)
        assert verdict.attributes["price"].status == ATTR_NOT_SATISFIED


class TestQuestionJudge:
    def catalog(self):
        return make_catalog([make_item(0, color="red", fuel="gas")])

    def q(self, dim):
        return QuestionSpec(dim, "", f"about {dim}?")

    def test_fresh_dimension_passes_both(self):
        result = question_judge(self.q("fuel"), [], self.catalog())
        assert result == {"relevance": True, "newness": True}

    def test_repeat_of_asked_dimension_fails_newness(self):
        prior = [{"speaker": "agent", "kind": "question", "dimension": "fuel", "text": "?"}]
        result = question_judge(self.q("fuel"), prior, self.catalog())
        assert result["newness"] is False

    def test_user_constrained_dimension_fails_newness(self):
        prior = [
            {
                "speaker": "user",
                "text": "red please",
                "delta": {"filter_delta": {"color": {"op": "equals", "value": "red"}}},
            }
        ]
        result = question_judge(self.q("color"), prior, self.catalog())
        assert result["newness"] is False
        assert result["relevance"] is True

    def test_out_of_schema_dimension_fails_relevance(self):
        result = question_judge(self.q("warp"), [], self.catalog())
        assert result["relevance"] is False


@pytest.fixture(scope="module")
def persona_pool():
    return load_personas(default_personas_dir())


class TestSimulate:
    def test_patient_persona_bounded_by_k(self, cars, car_store, persona_pool):
        engine = DialogueEngine(cars, EngineConfig(max_questions=2), store=car_store)
        persona = next(p for p in persona_pool if p.style == "patient")
        sim = simulate(persona, engine)
        assert sim.error is None
        assert len(sim.questions) <= 2
        assert sim.grid is not None

    def test_impatient_persona_gets_grid_within_one_question(self, cars, car_store, persona_pool):
        engine = DialogueEngine(cars, EngineConfig(max_questions=2), store=car_store)
        impatient = [p for p in persona_pool if p.style == "impatient"]
        assert impatient
        for persona in impatient:
            sim = simulate(persona, engine)
            assert sim.grid is not None
            assert len(sim.questions) <= 1

    def test_same_persona_identical_transcripts(self, cars, car_store, persona_pool):
        engine = DialogueEngine(cars, EngineConfig(max_questions=2), store=car_store)
        persona = persona_pool[0]
        a = simulate(persona, engine)
        b = simulate(persona, engine)
        assert json.dumps(a.transcript, sort_keys=True) == json.dumps(b.transcript, sort_keys=True)

    def test_engine_error_preserves_partial_transcript(self, cars, car_store, persona_pool):
        class BrokenStore:
            def __getattr__(self, name):
                raise RuntimeError("store offline")

        engine = DialogueEngine(cars, EngineConfig(max_questions=0), store=BrokenStore())
        sim = simulate(persona_pool[0], engine)
        assert sim.error is not None
        assert sim.grid is None


class TestSuite:
    def test_small_suite_report_structure(self, cars, car_store, persona_pool):
        report = run_suite(
            persona_pool[:4],
            cars,
            EngineConfig(),
            strategies=("es",),
            ablations=("none",),
            seeds=(0,),
            store=car_store,
        )
        assert report.persona_counts
        for query_type, strategies in report.cells.items():
            cell = strategies["es"]["none"]
            assert "precision@9" in cell
            assert 0.0 <= cell["precision@9"]["mean"] <= 1.0
        table = report.to_markdown()
        assert "| Query Type |" in table

    def test_zero_personas_empty_table(self, cars, car_store):
        report = run_suite([], cars, EngineConfig(), strategies=("es",),
                           ablations=("none",), seeds=(0,), store=car_store)
        assert report.cells == {}
        assert report.to_markdown().count("\n") == 2  # header rows only

    def test_fixed_seed_byte_identical_report(self, cars, car_store, persona_pool):
        kwargs = dict(
            strategies=("es",),
            ablations=("none", "mmr"),
            seeds=(0,),
            store=car_store,
        )
        a = run_suite(persona_pool[:6], cars, EngineConfig(), **kwargs)
        b = run_suite(persona_pool[:6], cars, EngineConfig(), **kwargs)
        assert json.dumps(a.to_json(), sort_keys=True) == json.dumps(b.to_json(), sort_keys=True)

    def test_ablated_config_flags(self):
        base = EngineConfig()
        assert ablated_config(base, "es", "mmr").mmr_lambda == 1.0
        assert ablated_config(base, "es", "entropyq").question_policy == "fixed"
        both = ablated_config(base, "cr", "both")
        assert both.mmr_lambda == 1.0 and both.question_policy == "fixed"
        assert both.strategy == "cr"
        assert base.mmr_lambda == 0.85  # base untouched

    def test_subsample_is_deterministic_and_order_preserving(self, cars):
        a = subsample_catalog(cars, 3, 0.5)
        b = subsample_catalog(cars, 3, 0.5)
        assert [it.id for it in a.items] == [it.id for it in b.items]
        ids = [it.id for it in a.items]
        assert ids == sorted(ids, key=lambda x: int(x.split("-")[1]))
        assert len(a) == 500


class TestEvaluateSimulation:
    def test_preference_echo_reported_for_phrase_personas(self, cars, car_store, persona_pool):
        from askrec.evalsim import evaluate_simulation

        engine = DialogueEngine(cars, EngineConfig(strategy="cr"), store=car_store)
        persona = next(p for p in persona_pool if p.liked_truth)
        sim = simulate(persona, engine)
        scores = evaluate_simulation(sim, persona, cars, car_store)
        assert scores["preference_echo"] is not None
        assert 0.0 <= scores["preference_echo"] <= 1.0

    def test_preference_echo_absent_without_phrases(self, cars, car_store, persona_pool):
        from askrec.evalsim import evaluate_simulation

        engine = DialogueEngine(cars, EngineConfig(), store=car_store)
        persona = next(p for p in persona_pool if not p.liked_truth and p.style == "patient")
        sim = simulate(persona, engine)
        scores = evaluate_simulation(sim, persona, cars, car_store)
        assert scores["preference_echo"] is None


class TestPersonaRecords:
    def test_bundled_personas_valid_against_catalog(self, cars, persona_pool):
        assert len(persona_pool) == 50
        for persona in persona_pool:
            persona.validate(cars)
            assert persona.style in ("patient", "impatient")

    def test_query_type_split_exists(self, persona_pool):
        types = {p.query_type() for p in persona_pool}
        assert types == {"short", "long"}

    def test_round_trip(self, persona_pool):
        p = persona_pool[0]
        assert Persona.from_json(p.to_json()) == p
