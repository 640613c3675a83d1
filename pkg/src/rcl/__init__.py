"""RCL: declarative models of roles, rights, activities, procedures, and
process traces, with a materializing rule reasoner and temporal views."""

from .model import (
    Category,
    Fact,
    FactStore,
    Interval,
    RclError,
    RelationSig,
    assert_fact,
    canonical_export,
    categorize,
    empty_store,
    retract_fact,
)
from .lexer import SourceSpan, Token, tokenize
from .parser import Ast, Diagnostic, parse, parse_source, serialize
from .validate import validate
from .loader import LoadedModel, load_source
from .rules import (
    Atom,
    ChainSpec,
    Derivation,
    Explanation,
    Rule,
    RulePlan,
    compile_rules,
    desugar_chain,
    explain,
    infer_closure,
    naive_closure,
    permitted_activities,
)
from .temporal import (
    SnapView,
    SpanView,
    holds_at,
    participants,
    snapshot,
    span_query,
)
from .procedures import (
    Event,
    Procedure,
    ProcessTrace,
    RealizationReport,
    Step,
    check_realization,
    compose_traces,
    enabled_steps,
)
from .fixture import fixture_path, load_fixture

__version__ = "0.1.0"

__all__ = [
    "Ast",
    "Atom",
    "Category",
    "ChainSpec",
    "Derivation",
    "Diagnostic",
    "Event",
    "Explanation",
    "Fact",
    "FactStore",
    "Interval",
    "LoadedModel",
    "Procedure",
    "ProcessTrace",
    "RclError",
    "RealizationReport",
    "RelationSig",
    "Rule",
    "RulePlan",
    "SnapView",
    "SourceSpan",
    "SpanView",
    "Step",
    "Token",
    "assert_fact",
    "canonical_export",
    "categorize",
    "check_realization",
    "compile_rules",
    "compose_traces",
    "desugar_chain",
    "empty_store",
    "enabled_steps",
    "explain",
    "fixture_path",
    "holds_at",
    "infer_closure",
    "load_fixture",
    "load_source",
    "naive_closure",
    "parse",
    "parse_source",
    "participants",
    "permitted_activities",
    "retract_fact",
    "serialize",
    "snapshot",
    "span_query",
    "tokenize",
    "validate",
]
