"""Turn-level conversation loop: parse, retrieve, question-or-stop, rank,
present. Sessions ask at most k follow-up questions, never repeat a
dimension, and hand over to recommendations as soon as further questions
stop being informative or the user runs out of patience."""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .catalog import CONTINUOUS, Binning, Catalog, FilterSet, discretize
from .config import EngineConfig
from .embedding import EmbeddingStore, HashingEmbedder
from .entropy import (
    EntropyReport,
    ValueDistribution,
    compute_entropy_report,
    select_question_dimension,
)
from .grid import Grid, present
from .parsing import IMPATIENT, ParserAdapter, RuleBasedParser, merge_filters
from .ranking import ScoredCandidate, rank

PHASE_INTERVIEWING = "interviewing"
PHASE_RECOMMENDING = "recommending"
PHASE_DONE = "done"


class SessionDone(RuntimeError):
    """A message arrived after the session already produced its grid."""


@dataclass(frozen=True)
class TurnRecord:
    speaker: str  # "user" | "agent"
    text: str
    delta: dict | None = None  # ParsedTurn JSON for user turns

    def to_json(self) -> dict:
        return {"speaker": self.speaker, "text": self.text, "delta": self.delta}


@dataclass(frozen=True)
class QuestionSpec:
    dimension: str
    distribution_context: str
    question_text: str

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "distribution_context": self.distribution_context,
            "question_text": self.question_text,
        }


@dataclass
class SessionState:
    """Conversation-scoped accumulator; one instance per session."""

    session_id: str
    max_questions: int = 2
    strategy: str = "es"
    filters: FilterSet = field(default_factory=FilterSet)
    liked: list[str] = field(default_factory=list)
    disliked: list[str] = field(default_factory=list)
    patience: str = "patient"
    asked_dimensions: list[str] = field(default_factory=list)
    history: list[TurnRecord] = field(default_factory=list)
    phase: str = PHASE_INTERVIEWING

    @property
    def questions_asked(self) -> int:
        return len(self.asked_dimensions)

    def clone(self) -> "SessionState":
        return SessionState(
            session_id=self.session_id,
            max_questions=self.max_questions,
            strategy=self.strategy,
            filters=FilterSet(dict(self.filters.entries)),
            liked=list(self.liked),
            disliked=list(self.disliked),
            patience=self.patience,
            asked_dimensions=list(self.asked_dimensions),
            history=list(self.history),
            phase=self.phase,
        )

    def replace_with(self, other: "SessionState") -> None:
        self.__dict__.update(other.__dict__)

    def snapshot(self) -> dict:
        return {
            "session_id": self.session_id,
            "max_questions": self.max_questions,
            "strategy": self.strategy,
            "filters": self.filters.to_json(),
            "liked": list(self.liked),
            "disliked": list(self.disliked),
            "patience": self.patience,
            "asked_dimensions": list(self.asked_dimensions),
            "questions_asked": self.questions_asked,
            "phase": self.phase,
            "history": [r.to_json() for r in self.history],
        }


@dataclass(frozen=True)
class TurnResult:
    kind: str  # "question" | "recommendations"
    question: QuestionSpec | None = None
    grid: Grid | None = None
    relaxed_dimensions: tuple[str, ...] = ()
    entropy: EntropyReport | None = None
    candidate_count: int = 0


def should_stop(
    state: SessionState,
    report: EntropyReport,
    tau_h: float,
    k: int,
    mode: str = "normalized",
) -> bool:
    """Interview ends when k questions were asked, no available dimension
    clears the entropy threshold, or the user signalled impatience."""
    if state.patience == IMPATIENT:
        return True
    if state.questions_asked >= k:
        return True
    excluded = set(state.filters.dimensions()) | set(state.asked_dimensions)
    return not any(
        report.score(dim, mode) >= tau_h
        for dim in report.entries
        if dim not in excluded
    )


def generate_question_template(
    catalog: Catalog,
    dimension: str,
    distribution: ValueDistribution,
    binning: Binning | None = None,
) -> QuestionSpec:
    """Deterministic question text quoting the candidate-set statistics.

    Categorical dimensions quote the top-3 value shares; continuous ones
    quote the tertile boundaries.
    """
    spec = catalog.schema_by_name[dimension]
    label = spec.question_label
    if spec.kind == CONTINUOUS:
        from .catalog import format_quantity

        if binning is not None and len(binning.boundaries) >= 2:
            lo = format_quantity(binning.boundaries[0], spec.unit)
            hi = format_quantity(binning.boundaries[1], spec.unit)
            context = f"between {lo} and {hi}"
            text = f"What's your budget/range for {label}? Most options fall {context}."
        elif binning is not None and len(binning.boundaries) == 1:
            mid = format_quantity(binning.boundaries[0], spec.unit)
            context = f"around {mid}"
            text = f"What's your budget/range for {label}? Most options fall {context}."
        else:
            context = ""
            text = f"What's your budget/range for {label}?"
        return QuestionSpec(dimension, context, text)

    ranked_values = sorted(
        distribution.counts.items(), key=lambda kv: -kv[1]
    )[:3]
    total = distribution.total or 1
    context = ", ".join(f"{round(100 * c / total)}% {v}" for v, c in ranked_values)
    text = f"Do you have a preference for {label}? Options here are {context}."
    return QuestionSpec(dimension, context, text)


class DialogueEngine:
    """Owns one catalog plus its precomputed embeddings; stateless across
    sessions beyond that shared read-only data."""

    def __init__(
        self,
        catalog: Catalog,
        config: EngineConfig | None = None,
        parser: ParserAdapter | None = None,
        store: EmbeddingStore | None = None,
    ):
        self.catalog = catalog
        self.config = config or EngineConfig()
        self.parser = parser or RuleBasedParser(
            catalog,
            hint_words={
                "interior_color": ("interior", "inside", "cabin", "seats"),
                "exterior_color": ("exterior", "paint", "outside"),
            },
        )
        self.store = store or EmbeddingStore(catalog, HashingEmbedder(self.config.embedding_dim))

    def new_session(
        self,
        session_id: str | None = None,
        strategy: str | None = None,
        max_questions: int | None = None,
    ) -> SessionState:
        return SessionState(
            session_id=session_id or uuid.uuid4().hex,
            strategy=strategy or self.config.strategy,
            max_questions=self.config.max_questions if max_questions is None else max_questions,
        )

    # -- question policy ----------------------------------------------------

    def _next_dimension(
        self,
        state: SessionState,
        candidate_ids: Sequence[str],
        report: EntropyReport,
    ) -> str | None:
        if self.config.question_policy == "fixed":
            # Fixed-script ablation: walk schema order, skipping only
            # dimensions already asked (not ones the user constrained).
            for dim in self.catalog.dimensions():
                if dim in state.asked_dimensions:
                    continue
                if report.distributions[dim].total == 0:
                    continue
                return dim
            return None
        return select_question_dimension(
            self.catalog,
            candidate_ids,
            specified=state.filters.dimensions(),
            asked=state.asked_dimensions,
            threshold=self.config.tau_h,
            mode=self.config.entropy_mode,
            report=report,
        )

    def _interview_over(self, state: SessionState, report: EntropyReport) -> bool:
        if self.config.question_policy == "fixed":
            if state.patience == IMPATIENT or state.questions_asked >= state.max_questions:
                return True
            return all(
                dim in state.asked_dimensions or report.distributions[dim].total == 0
                for dim in self.catalog.dimensions()
            )
        return should_stop(
            state, report, self.config.tau_h, state.max_questions, self.config.entropy_mode
        )

    # -- the turn loop --------------------------------------------------------

    def advance_turn(self, state: SessionState, user_text: str) -> TurnResult:
        """Run one conversation turn. The state mutates only on success;
        any failure leaves it untouched."""
        if state.phase == PHASE_DONE:
            raise SessionDone(f"session {state.session_id} already finished")
        if not user_text or not user_text.strip():
            raise ValueError("empty message")

        work = state.clone()
        parsed = self.parser.parse(user_text, history=[r.to_json() for r in work.history])
        parsed.filter_delta.validate(self.catalog)
        work.filters = merge_filters(work.filters, parsed.filter_delta)
        for phrase in parsed.liked:
            if phrase not in work.liked:
                work.liked.append(phrase)
        for phrase in parsed.disliked:
            if phrase not in work.disliked:
                work.disliked.append(phrase)
        if parsed.patience == IMPATIENT:
            work.patience = IMPATIENT
        work.history.append(TurnRecord("user", user_text, parsed.to_json()))

        from .catalog import apply_filters, relax_filters

        candidates = apply_filters(self.catalog, work.filters)
        if not candidates.item_ids and len(self.catalog):
            candidates = relax_filters(self.catalog, work.filters)
        report = compute_entropy_report(self.catalog, candidates.item_ids)

        if not self._interview_over(work, report):
            dimension = self._next_dimension(work, candidates.item_ids, report)
            if dimension is not None:
                question = self._build_question(dimension, candidates.item_ids, report)
                work.asked_dimensions.append(dimension)
                work.history.append(TurnRecord("agent", question.question_text, None))
                result = TurnResult(
                    kind="question",
                    question=question,
                    relaxed_dimensions=candidates.relaxed_dimensions,
                    entropy=report,
                    candidate_count=len(candidates.item_ids),
                )
                state.replace_with(work)
                return result

        work.phase = PHASE_RECOMMENDING
        ranked = rank(
            work.strategy,
            filters=work.filters,
            liked=work.liked,
            disliked=work.disliked,
            candidate_ids=candidates.item_ids,
            store=self.store,
            schema_order=self.catalog.dimensions(),
            k=self.config.rank_k,
            mmr_lambda=self.config.mmr_lambda,
            cr_lambda=self.config.cr_lambda,
            align_tau=self.config.align_tau,
        )
        grid = present(
            self.catalog,
            ranked,
            specified=work.filters.dimensions(),
            r=self.config.grid_rows,
            n=self.config.grid_cols,
        )
        work.phase = PHASE_DONE
        work.history.append(TurnRecord("agent", "recommendations", None))
        result = TurnResult(
            kind="recommendations",
            grid=grid,
            relaxed_dimensions=candidates.relaxed_dimensions,
            entropy=report,
            candidate_count=len(candidates.item_ids),
        )
        state.replace_with(work)
        return result

    def _build_question(
        self, dimension: str, candidate_ids: Sequence[str], report: EntropyReport
    ) -> QuestionSpec:
        distribution = report.distributions[dimension]
        binning = None
        if self.catalog.schema_by_name[dimension].kind == CONTINUOUS:
            binning = discretize(self.catalog, dimension, candidate_ids)
        return generate_question_template(self.catalog, dimension, distribution, binning)

    def liked_matches(self, liked: Sequence[str], item_ids: Sequence[str]) -> dict[str, list[str]]:
        """Which of the session's liked phrases align with each item's pros
        (thresholded cosine > 0); feeds the UI's item detail view."""
        from .ranking import phrase_alignment

        vectors = [(phrase, self.store.embed_query(phrase)) for phrase in liked]
        return {
            item_id: [
                phrase
                for phrase, vec in vectors
                if phrase_alignment(vec, self.store.pros[item_id], self.config.align_tau) > 0
            ]
            for item_id in item_ids
        }


class SessionStore:
    """In-memory session registry with per-session turn locks and an
    optional append-only JSON-lines event log for replay."""

    def __init__(self, log_dir: str | Path | None = None):
        self._states: dict[str, SessionState] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        self.log_dir = Path(log_dir) if log_dir else None
        if self.log_dir:
            self.log_dir.mkdir(parents=True, exist_ok=True)

    def add(self, state: SessionState) -> None:
        with self._registry_lock:
            self._states[state.session_id] = state
            self._locks[state.session_id] = threading.Lock()

    def get(self, session_id: str) -> SessionState | None:
        with self._registry_lock:
            return self._states.get(session_id)

    def lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks[session_id]

    def log_event(self, session_id: str, event: Mapping) -> None:
        if not self.log_dir:
            return
        path = self.log_dir / f"{session_id}.jsonl"
        with path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, sort_keys=True) + "\n")
