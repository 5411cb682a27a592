"""Toolkit for Task-Method-Knowledge (TMK) models of procedural skills.

Parse and validate model bundles, execute method state machines, compute
structural and similarity metrics, drive the generate-validate-refine
authoring loop, and serve the whole toolkit over HTTP.
"""

from .bundle import load_bundle, parse_model_bundle, serialize_model, write_bundle
from .conditions import (
    ConditionAst,
    PredicateEnv,
    evaluate,
    is_trivial,
    parse_condition,
    print_condition,
)
from .diffing import ModelDiff, apply_diff, diff_models
from .errors import (
    EmptyTranscript,
    EvalError,
    GenerationFailed,
    GuardParseError,
    InvalidJudgeResponse,
    KindMismatch,
    MissingComponent,
    NonPositiveBaseline,
    ParseError,
    SkillMismatch,
    TmkError,
    TooManyPredicates,
    TransportError,
    UnknownMethod,
    UnknownPredicate,
)
from .fsm import (
    ExecutionTrace,
    Outcome,
    OutcomeTable,
    ReachabilityReport,
    check_reachability,
    enumerate_outcomes,
    trace,
)
from .model import (
    Concept,
    GoalInvocation,
    Instance,
    KnowledgeSpec,
    MethodSpec,
    Organizer,
    Parameter,
    Relation,
    State,
    TaskSpec,
    TmkModel,
    Transition,
    canonical_flatten,
    overall_text,
)
from .pipeline import (
    BundleTexts,
    GenerationLog,
    JudgeScores,
    MockGenerationClient,
    MockJudgeClient,
    PromptBundle,
    RefinementSession,
    assemble_generation_prompt,
    generate_raw_model,
    judge_model,
    normalize_judge_score,
    refinement_reduction,
)
from .reporting import ReportOutput, emit_report
from .similarity import (
    CorpusAggregate,
    SimilarityReport,
    aggregate,
    compare_models,
    cosine,
    dict_symmetric_similarity,
    overall_similarity,
    per_field_similarity,
    vectorize,
)
from .static_metrics import StaticReport, Transcript, analyze
from .validation import ValidationReport, Violation, validate_schema

__version__ = "0.1.0"

__all__ = [
    "BundleTexts",
    "Concept",
    "ConditionAst",
    "CorpusAggregate",
    "EmptyTranscript",
    "EvalError",
    "ExecutionTrace",
    "GenerationFailed",
    "GenerationLog",
    "GoalInvocation",
    "GuardParseError",
    "Instance",
    "InvalidJudgeResponse",
    "JudgeScores",
    "KindMismatch",
    "KnowledgeSpec",
    "MethodSpec",
    "MissingComponent",
    "MockGenerationClient",
    "MockJudgeClient",
    "ModelDiff",
    "NonPositiveBaseline",
    "Organizer",
    "Outcome",
    "OutcomeTable",
    "Parameter",
    "ParseError",
    "PredicateEnv",
    "PromptBundle",
    "ReachabilityReport",
    "RefinementSession",
    "Relation",
    "ReportOutput",
    "SimilarityReport",
    "SkillMismatch",
    "State",
    "StaticReport",
    "TaskSpec",
    "TmkError",
    "TmkModel",
    "TooManyPredicates",
    "Transcript",
    "Transition",
    "TransportError",
    "UnknownMethod",
    "UnknownPredicate",
    "ValidationReport",
    "Violation",
    "aggregate",
    "analyze",
    "apply_diff",
    "assemble_generation_prompt",
    "canonical_flatten",
    "check_reachability",
    "compare_models",
    "cosine",
    "dict_symmetric_similarity",
    "diff_models",
    "emit_report",
    "enumerate_outcomes",
    "evaluate",
    "generate_raw_model",
    "is_trivial",
    "judge_model",
    "load_bundle",
    "normalize_judge_score",
    "overall_similarity",
    "overall_text",
    "parse_condition",
    "parse_model_bundle",
    "per_field_similarity",
    "print_condition",
    "refinement_reduction",
    "serialize_model",
    "trace",
    "validate_schema",
    "vectorize",
    "write_bundle",
]
