"""Semantic analysis: turn a parsed model into a populated fact store.

Checks, in declaration order: names are declared before use and never
redeclared, facts satisfy relation signatures, bearers are independent
continuants bearing roles, procedure steps reference declared activity
kinds, roles, and states, and rules and chains are safe with statically
sound head signatures.

Declaring a state individual also registers a state predicate of the same
name over independent continuants, which is what step guards consult.
Trace declarations register the trace as a process, one activity occurrence
per event, and the existence and participation facts tying them together.
Finally, every individual without explicit existence bounds receives an
eternal exists fact, so temporal views are total.
"""

from __future__ import annotations

from .lexer import SourceSpan
from .model import (
    BUILTIN_KINDS,
    BUILTIN_RELATIONS,
    Category,
    Fact,
    FactStore,
    RelationSig,
)
from .parser import (
    Ast,
    ChainDecl,
    Diagnostic,
    FactDecl,
    IndividualDecl,
    KindDecl,
    ProcedureDecl,
    RelationDecl,
    RuleDecl,
    TraceDecl,
)
from .procedures import occurrence_id, trace_facts
from .rules import CATEGORY_TESTS, Atom, Rule, desugar_chain, is_var, rule_problems

_STATE_SIG = RelationSig(Category.INDEPENDENT, Category.INDEPENDENT)


class _Validator:
    def __init__(self) -> None:
        self.kinds: dict[str, Category] = dict(BUILTIN_KINDS)
        self.individuals: dict[str, str] = {}
        self.relations: dict[str, RelationSig] = dict(BUILTIN_RELATIONS)
        self.base: set[Fact] = set()
        self.diagnostics: list[Diagnostic] = []

    def error(self, message: str, span: SourceSpan) -> None:
        self.diagnostics.append(Diagnostic("error", message, span))

    def snapshot(self) -> FactStore:
        return FactStore(
            kinds=self.kinds,
            individuals=self.individuals,
            relations=self.relations,
            base=frozenset(self.base),
            derived=frozenset(),
        )

    # -- naming ------------------------------------------------------------

    def is_taken(self, name: str) -> bool:
        return name in self.kinds or name in self.individuals or name in self.relations

    def declare_fresh(self, name: str, span: SourceSpan) -> bool:
        if self.is_taken(name):
            self.error(f"duplicate declaration of {name!r}", span)
            return False
        return True

    def category_of(self, name: str) -> Category | None:
        if name in self.kinds:
            return self.kinds[name]
        if name in self.individuals:
            return self.kinds[self.individuals[name]]
        return None

    def require_individual(
        self, name: str, node: Category, what: str, span: SourceSpan
    ) -> bool:
        if name not in self.individuals:
            self.error(f"unknown {what} {name!r}", span)
            return False
        category = self.category_of(name)
        if category is None or not category.is_under(node):
            self.error(f"{what} {name!r} is not categorized under {node.value}", span)
            return False
        return True

    # -- declarations --------------------------------------------------------

    def add_kind(self, decl: KindDecl) -> None:
        if self.declare_fresh(decl.name, decl.span):
            self.kinds[decl.name] = decl.category

    def add_individual(self, decl: IndividualDecl) -> None:
        if decl.kind not in self.kinds:
            self.error(f"unknown kind {decl.kind!r}", decl.span)
            return
        if not self.declare_fresh(decl.name, decl.span):
            return
        self.individuals[decl.name] = decl.kind
        # state individuals double as state predicates for guards and facts
        if self.kinds[decl.kind].is_under(Category.STATE):
            self.relations[decl.name] = _STATE_SIG

    def add_relation(self, decl: RelationDecl) -> None:
        if not self.declare_fresh(decl.name, decl.span):
            return
        if decl.name == "bears":
            if not Category.INDEPENDENT.is_under(decl.subject) and not decl.subject.is_under(
                Category.INDEPENDENT
            ):
                self.error(
                    "bears subject category must admit independent continuants",
                    decl.span,
                )
            if not decl.obj.is_under(Category.ROLE):
                self.error("bears object category must be under Role", decl.span)
        self.relations[decl.name] = RelationSig(decl.subject, decl.obj, decl.base_only)

    def add_fact(self, decl: FactDecl) -> None:
        sig = self.relations.get(decl.predicate)
        if sig is None:
            self.error(f"unknown relation {decl.predicate!r}", decl.span)
            return
        ok = True
        for arg in (decl.subject, decl.obj):
            if arg not in self.individuals:
                self.error(f"unknown individual {arg!r}", decl.span)
                ok = False
        if not ok:
            return
        subject_cat = self.category_of(decl.subject)
        obj_cat = self.category_of(decl.obj)
        if decl.predicate == "bears":
            if not subject_cat.is_under(Category.INDEPENDENT):
                self.error(
                    "bearer must be an independent continuant, "
                    f"got {decl.subject!r}",
                    decl.span,
                )
                return
            if not obj_cat.is_under(Category.ROLE):
                self.error(f"bears object must be a role, got {decl.obj!r}", decl.span)
                return
        if not subject_cat.is_under(sig.subject):
            self.error(
                f"{decl.predicate} subject {decl.subject!r} is {subject_cat.path}, "
                f"expected {sig.subject.path}",
                decl.span,
            )
            return
        if not obj_cat.is_under(sig.obj):
            self.error(
                f"{decl.predicate} object {decl.obj!r} is {obj_cat.path}, "
                f"expected {sig.obj.path}",
                decl.span,
            )
            return
        self.base.add(Fact(decl.predicate, decl.subject, decl.obj, decl.extent))

    # -- rules and chains ----------------------------------------------------

    def _static_bound(self, variable: str, body: tuple[Atom, ...]) -> Category | None:
        """Meet of the categories the body imposes on a variable; None when
        the constraints are contradictory (the rule can never bind it)."""
        bound: Category | None = None
        unsatisfiable = False
        for atom in body:
            if atom.is_test:
                constraints = (
                    [CATEGORY_TESTS[atom.predicate]]
                    if atom.args[0] == variable and atom.predicate in CATEGORY_TESTS
                    else []
                )
            else:
                sig = self.relations.get(atom.predicate)
                if sig is None:
                    continue
                constraints = [
                    position
                    for term, position in zip(atom.args, (sig.subject, sig.obj))
                    if term == variable
                ]
            for node in constraints:
                if bound is None or bound.is_under(node):
                    bound = node if bound is None else bound
                elif node.is_under(bound):
                    bound = node
                else:
                    unsatisfiable = True
        return None if unsatisfiable else bound

    def check_head_soundness(self, rule: Rule, span: SourceSpan) -> None:
        sig = self.relations.get(rule.head.predicate)
        if sig is None:
            return
        for term, required in zip(rule.head.args, (sig.subject, sig.obj)):
            if is_var(term):
                bound = self._static_bound(term, rule.body)
                if bound is not None and not bound.is_under(required):
                    self.error(
                        f"rule {rule.name} head argument {term} is only known to be "
                        f"{bound.path}, but {rule.head.predicate} requires "
                        f"{required.path}",
                        span,
                    )
            else:
                category = self.category_of(term)
                if category is not None and not category.is_under(required):
                    self.error(
                        f"rule {rule.name} head constant {term!r} violates the "
                        f"signature of {rule.head.predicate}",
                        span,
                    )

    def add_rule(self, decl: RuleDecl) -> None:
        problems = rule_problems(self.snapshot(), decl.rule)
        for _, message in problems:
            self.error(message, decl.span)
        if not problems:
            self.check_head_soundness(decl.rule, decl.span)

    def add_chain(self, decl: ChainDecl) -> None:
        chain = decl.chain
        missing = [
            name
            for name in (chain.derived, chain.first, chain.second)
            if name not in self.relations
        ]
        for name in missing:
            self.error(f"unknown relation {name!r} in chain", decl.span)
        if missing:
            return
        if self.relations[chain.derived].base_only:
            self.error(
                f"chain head {chain.derived!r} is declared base-only", decl.span
            )
            return
        self.check_head_soundness(desugar_chain(self.snapshot(), chain), decl.span)

    # -- procedures and traces -------------------------------------------------

    def add_procedure(self, decl: ProcedureDecl) -> None:
        proc = decl.procedure
        if not self.declare_fresh(proc.name, decl.span):
            return
        self.individuals[proc.name] = "procedure"
        for step in proc.steps:
            self.require_individual(
                step.activity, Category.ACTIVITY_KIND,
                f"step {step.name} activity", decl.span,
            )
            self.require_individual(
                step.role, Category.ROLE, f"step {step.name} role", decl.span
            )
            if step.guard is not None:
                self.require_individual(
                    step.guard, Category.STATE, f"step {step.name} guard", decl.span
                )

    def add_trace(self, decl: TraceDecl) -> None:
        trace = decl.trace
        if not self.declare_fresh(trace.name, decl.span):
            return
        self.individuals[trace.name] = "process"
        ok = True
        for event in trace.events:
            ok &= self.require_individual(
                event.activity, Category.ACTIVITY_KIND, "event activity", decl.span
            )
            ok &= self.require_individual(
                event.actor, Category.INDEPENDENT, "event actor", decl.span
            )
        for i in range(1, len(trace.events) + 1):
            eid = occurrence_id(trace.name, i)
            if not self.declare_fresh(eid, decl.span):
                ok = False
                continue
            self.individuals[eid] = "occurrence"
        if ok:
            self.base.update(trace_facts(trace))

    # -- finishing ---------------------------------------------------------

    def add_default_existence(self) -> None:
        explicit = {
            fact.subject
            for fact in self.base
            if fact.predicate == "exists" and fact.subject == fact.obj
        }
        for name in self.individuals:
            if name not in explicit:
                self.base.add(Fact("exists", name, name))


def validate(ast: Ast) -> tuple[FactStore | None, list[Diagnostic]]:
    """Check a model and build its base store.

    The store is returned only when there are no errors; diagnostics carry
    every failure with the offending declaration's span.
    """
    v = _Validator()
    for decl in ast.decls:
        if isinstance(decl, KindDecl):
            v.add_kind(decl)
        elif isinstance(decl, IndividualDecl):
            v.add_individual(decl)
        elif isinstance(decl, RelationDecl):
            v.add_relation(decl)
        elif isinstance(decl, FactDecl):
            v.add_fact(decl)
        elif isinstance(decl, RuleDecl):
            v.add_rule(decl)
        elif isinstance(decl, ChainDecl):
            v.add_chain(decl)
        elif isinstance(decl, ProcedureDecl):
            v.add_procedure(decl)
        elif isinstance(decl, TraceDecl):
            v.add_trace(decl)
    if any(d.severity == "error" for d in v.diagnostics):
        return None, v.diagnostics
    v.add_default_existence()
    return v.snapshot(), v.diagnostics


def desugared_rules(store: FactStore, ast: Ast) -> list[Rule]:
    """Explicit rules plus every chain rewritten as its rule, in order."""
    rules: list[Rule] = list(ast.rules())
    for chain in ast.chains():
        rules.append(desugar_chain(store, chain))
    return rules
