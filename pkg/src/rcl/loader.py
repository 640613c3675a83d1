"""One-stop loading: source text to validated store and compiled rule plan."""

from __future__ import annotations

from dataclasses import dataclass

from .model import FactStore
from .parser import Ast, Diagnostic, parse_source
from .rules import RulePlan, compile_rules, infer_closure
from .validate import desugared_rules, validate


@dataclass
class LoadedModel:
    source: str
    ast: Ast
    diagnostics: list[Diagnostic]
    #: base store; None when any diagnostic is an error
    store: FactStore | None
    #: compiled rules and chains; None whenever the store is None
    plan: RulePlan | None

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == "error"]

    def closure(self) -> FactStore:
        """The store with derived facts materialized."""
        if self.store is None or self.plan is None:
            raise ValueError("model did not validate; no closure available")
        return infer_closure(self.store, self.plan)


def load_source(source: str) -> LoadedModel:
    """Tokenize, parse, validate, and compile a model in one pass."""
    ast, diagnostics = parse_source(source)
    store, more = validate(ast)
    diagnostics = diagnostics + more
    plan = None
    if store is not None and not any(d.severity == "error" for d in diagnostics):
        plan = compile_rules(store, desugared_rules(store, ast))
    else:
        store = None
    return LoadedModel(
        source=source, ast=ast, diagnostics=diagnostics, store=store, plan=plan
    )
