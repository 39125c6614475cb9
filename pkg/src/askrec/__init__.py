"""askrec: entropy-guided conversational recommendation.

The library keeps uncertainty over the live candidate set as the shared
signal across the whole pipeline: it picks which follow-up question to
ask, how to rank under leftover ambiguity (embedding similarity with MMR,
or coverage-risk greedy selection), and how to present results as a grid
diversified along the most uncertain unconstrained dimension. A persona
simulation harness and an HTTP session API sit on top.
"""

from .catalog import (
    AttributeSchema,
    Binning,
    CandidateSet,
    Catalog,
    CatalogError,
    Equals,
    FilterSet,
    Item,
    OneOf,
    Range,
    apply_filters,
    discretize,
    load_catalog,
    load_catalog_with_sidecar,
    load_schema,
    relax_filters,
)
from .config import EngineConfig, ServiceConfig, load_engine_config, load_service_config
from .dialogue import (
    DialogueEngine,
    QuestionSpec,
    SessionState,
    SessionStore,
    TurnResult,
    generate_question_template,
    should_stop,
)
from .embedding import (
    CachingProvider,
    EmbeddingCache,
    EmbeddingStore,
    HashingEmbedder,
    Vector,
    build_query_text,
    cosine_similarity,
)
from .entropy import (
    EntropyReport,
    ValueDistribution,
    compute_entropy_report,
    normalized_entropy,
    select_diversification_dimension,
    select_question_dimension,
    shannon_entropy,
    value_distribution,
)
from .evalsim import (
    Persona,
    SimulationResult,
    SuiteReport,
    judge,
    load_personas,
    question_judge,
    run_suite,
    simulate,
)
from .grid import Grid, GridRow, bucket_grid, present
from .metrics import (
    JudgeVerdict,
    MetricsReport,
    attr_sat_rate,
    confidence_filter_and_reassess,
    ild,
    ndcg_at_k,
    precision_at_k,
    satisfied_count_at_k,
)
from .parsing import (
    ParsedTurn,
    RuleBasedParser,
    detect_impatience,
    merge_filters,
)
from .ranking import (
    ScoredCandidate,
    coverage_risk_greedy,
    coverage_risk_objective,
    mmr_select,
    phrase_alignment,
    rank,
)

__version__ = "0.1.0"
