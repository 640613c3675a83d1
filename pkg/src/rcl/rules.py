"""Rule reasoner: safe Horn rules, property chains, and the derived-fact fixpoint.

Rules have one binary head atom and a non-empty body mixing binary relation
atoms with unary category tests (role(?x), rights(?y), activity(?z)). A
category test holds for individuals whose kind attaches at or under the
named taxonomy node; tests are evaluated against declarations, never stored
as facts.

The production path is semi-naive evaluation with per-round delta sets.
`naive_closure` is the deliberately simple reference implementation kept
in-tree as the test oracle; it shares nothing with the semi-naive path
beyond the fact datatypes.

Temporal semantics: a derived fact's extent is the intersection of its
premises' extents (eternal premises do not constrain); derivations whose
intersection is empty are discarded.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .model import (
    Category,
    EMPTY_EXTENT,
    Fact,
    FactStore,
    Interval,
    RclError,
    SignatureViolation,
    UnknownEntity,
    UnknownRelation,
    fact_sort_key,
    intersect_extents,
)


class UnsafeRule(RclError):
    """A head variable does not occur in the body, or the body is empty."""


class HeadNotDerivable(RclError):
    """Rule head predicate is declared base-only (or is not a relation)."""


class FactNotInClosure(RclError):
    """explain() was asked about a fact the closure does not contain."""


class NotARole(RclError):
    """permitted_activities() target is not categorized under Role."""


#: Unary test name -> taxonomy node. "rights" mirrors the canonical rule's
#: spelling; the rest follow the category keywords.
CATEGORY_TESTS: dict[str, Category] = {
    "continuant": Category.CONTINUANT,
    "independent": Category.INDEPENDENT,
    "person": Category.INDEPENDENT,
    "dependent": Category.DEPENDENT,
    "realizable": Category.REALIZABLE,
    "role": Category.ROLE,
    "procedure": Category.PROCEDURE,
    "right": Category.RIGHT,
    "rights": Category.RIGHT,
    "occurrent": Category.OCCURRENT,
    "process": Category.PROCESS,
    "occurrence": Category.ACTIVITY_OCCURRENCE,
    "region": Category.TEMPORAL_REGION,
    "universal": Category.UNIVERSAL,
    "activity": Category.ACTIVITY_KIND,
    "state": Category.STATE,
}


def is_var(term: str) -> bool:
    return term.startswith("?")


@dataclass(frozen=True)
class Atom:
    """Relation atom (2 args) or category test (1 arg). Terms are entity
    names, or variables written with a leading '?'."""

    predicate: str
    args: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.args) not in (1, 2):
            raise ValueError(f"atom arity must be 1 or 2, got {len(self.args)}")

    @property
    def is_test(self) -> bool:
        return len(self.args) == 1

    def variables(self) -> set[str]:
        return {t for t in self.args if is_var(t)}

    def __str__(self) -> str:
        return f"{self.predicate}({', '.join(self.args)})"


@dataclass(frozen=True)
class Rule:
    """Safe Horn clause: head holds wherever all body atoms hold."""

    name: str
    head: Atom
    body: tuple[Atom, ...]

    def variables(self) -> set[str]:
        vs = self.head.variables()
        for atom in self.body:
            vs |= atom.variables()
        return vs

    def __str__(self) -> str:
        return f"{self.head} :- {', '.join(str(a) for a in self.body)}."


@dataclass(frozen=True)
class ChainSpec:
    """Property chain `derived = first o second`: composing second then
    first yields derived. Desugars to one Horn rule."""

    name: str
    derived: str
    first: str
    second: str


@dataclass(frozen=True)
class Derivation:
    """One-step justification: replaying `rule` on `premises` yields the
    conclusion. Premises list the matched relation facts in body order;
    category tests contribute no premises."""

    conclusion: Fact
    rule: str
    premises: tuple[Fact, ...]


@dataclass(frozen=True)
class Explanation:
    """Everything the closure says about one fact: base membership or the
    full set of one-step derivations."""

    fact: Fact
    is_base: bool
    derivations: tuple[Derivation, ...]


def desugar_chain(store: FactStore, chain: ChainSpec) -> Rule:
    """Rewrite a property chain as the equivalent safe rule.

    `chain d = f o s` becomes `d(?a, ?c) :- s(?a, ?b), f(?b, ?c).`
    """
    for name in (chain.derived, chain.first, chain.second):
        if name not in store.relations:
            raise UnknownRelation(f"unknown relation {name!r} in chain {chain.name}")
    return Rule(
        name=chain.name,
        head=Atom(chain.derived, ("?a", "?c")),
        body=(Atom(chain.second, ("?a", "?b")), Atom(chain.first, ("?b", "?c"))),
    )


#: problem code -> exception raised by compile_rules
_PROBLEM_ERRORS = {
    "unsafe-rule": UnsafeRule,
    "head-not-derivable": HeadNotDerivable,
    "unknown-relation": UnknownRelation,
    "unknown-entity": UnknownEntity,
}


def rule_problems(store: FactStore, rule: Rule) -> list[tuple[str, str]]:
    """All (code, message) reasons a rule cannot be compiled against this
    store's declarations; empty means the rule is admissible."""
    problems: list[tuple[str, str]] = []
    if not rule.body:
        problems.append(("unsafe-rule", f"rule {rule.name} has an empty body"))
    body_vars: set[str] = set()
    for atom in rule.body:
        body_vars |= atom.variables()
    unsafe = sorted(rule.head.variables() - body_vars)
    if unsafe:
        problems.append((
            "unsafe-rule",
            f"unsafe rule {rule.name}: head variable {', '.join(unsafe)} not in body",
        ))
    head_sig = store.relations.get(rule.head.predicate)
    if len(rule.head.args) != 2 or head_sig is None:
        problems.append((
            "unknown-relation",
            f"rule {rule.name} head {rule.head.predicate!r} is not a declared relation",
        ))
    elif head_sig.base_only:
        problems.append((
            "head-not-derivable",
            f"rule {rule.name} head {rule.head.predicate!r} is declared base-only",
        ))
    for atom in rule.body:
        if atom.is_test:
            if atom.predicate not in CATEGORY_TESTS:
                problems.append((
                    "unknown-relation",
                    f"rule {rule.name}: unknown category test {atom.predicate!r}",
                ))
        elif atom.predicate not in store.relations:
            problems.append((
                "unknown-relation",
                f"rule {rule.name}: unknown relation {atom.predicate!r}",
            ))
    for atom in (rule.head, *rule.body):
        for term in atom.args:
            if not is_var(term) and term not in store.individuals:
                problems.append((
                    "unknown-entity",
                    f"rule {rule.name}: unknown individual {term!r} in {atom}",
                ))
    return problems


@dataclass(frozen=True)
class CompiledRule:
    rule: Rule
    #: body atoms reordered so each join shares a bound variable when possible
    ordered_body: tuple[Atom, ...]


@dataclass(frozen=True)
class RulePlan:
    rules: tuple[CompiledRule, ...]
    #: True when some rule body mentions a predicate derivable by the plan;
    #: when False a single evaluation round reaches the fixpoint.
    recursive: bool


def _order_body(body: Sequence[Atom]) -> tuple[Atom, ...]:
    """Greedy join order: relation atoms first, each sharing a variable with
    the already-bound prefix when possible; category tests run once their
    variable is bound. Ordering affects speed only, never the closure."""
    remaining = list(body)
    ordered: list[Atom] = []
    bound: set[str] = set()

    def shares(atom: Atom) -> bool:
        return bool(atom.variables() & bound)

    while remaining:
        pick = None
        if bound:
            pick = next((a for a in remaining if not a.is_test and shares(a)), None)
            if pick is None:
                pick = next((a for a in remaining if a.is_test and shares(a)), None)
        if pick is None:
            pick = next((a for a in remaining if not a.is_test), remaining[0])
        ordered.append(pick)
        remaining.remove(pick)
        bound |= pick.variables()
    return tuple(ordered)


def compile_rules(store: FactStore, rules: Iterable[Rule]) -> RulePlan:
    """Validate and order rules for evaluation.

    Raises UnsafeRule, HeadNotDerivable, UnknownRelation, or UnknownEntity
    on the first inadmissible rule.
    """
    compiled: list[CompiledRule] = []
    heads: set[str] = set()
    for rule in rules:
        for code, message in rule_problems(store, rule):
            raise _PROBLEM_ERRORS[code](message)
        compiled.append(CompiledRule(rule=rule, ordered_body=_order_body(rule.body)))
        heads.add(rule.head.predicate)
    recursive = any(
        not atom.is_test and atom.predicate in heads
        for cr in compiled
        for atom in cr.rule.body
    )
    return RulePlan(rules=tuple(compiled), recursive=recursive)


def _individuals_under(store: FactStore, node: Category) -> list[str]:
    return sorted(
        name
        for name, kind in store.individuals.items()
        if store.kinds[kind].is_under(node)
    )


def _entity_under(store: FactStore, name: str, node: Category) -> bool:
    return name in store.individuals and store.category_of(name).is_under(node)


def _match_pair(atom: Atom, fact: Fact, subst: dict[str, str]) -> dict[str, str] | None:
    out = subst
    for term, value in zip(atom.args, (fact.subject, fact.obj)):
        if is_var(term):
            bound = out.get(term)
            if bound is None:
                if out is subst:
                    out = dict(subst)
                out[term] = value
            elif bound != value:
                return None
        elif term != value:
            return None
    return out


def _eval_body(
    store: FactStore,
    facts_of,
    atoms: Sequence[Atom],
    index: int,
    subst: dict[str, str],
    premises: tuple[Fact, ...],
    delta_at: int | None,
    delta: Sequence[Fact] | None,
) -> Iterator[tuple[dict[str, str], tuple[Fact, ...]]]:
    """Enumerate substitutions satisfying atoms[index:], optionally pinning
    one atom position to the delta set (semi-naive restriction)."""
    if index == len(atoms):
        yield subst, premises
        return
    atom = atoms[index]
    if atom.is_test:
        node = CATEGORY_TESTS[atom.predicate]
        term = atom.args[0]
        if is_var(term) and term not in subst:
            for name in _individuals_under(store, node):
                yield from _eval_body(
                    store, facts_of, atoms, index + 1,
                    {**subst, term: name}, premises, delta_at, delta,
                )
        else:
            value = subst[term] if is_var(term) else term
            if _entity_under(store, value, node):
                yield from _eval_body(
                    store, facts_of, atoms, index + 1, subst, premises, delta_at, delta,
                )
        return
    if index == delta_at and delta is not None:
        source = [f for f in delta if f.predicate == atom.predicate]
    else:
        source = facts_of(atom.predicate)
    for fact in source:
        new_subst = _match_pair(atom, fact, subst)
        if new_subst is not None:
            yield from _eval_body(
                store, facts_of, atoms, index + 1,
                new_subst, premises + (fact,), delta_at, delta,
            )


def _ground_head(head: Atom, subst: dict[str, str]) -> tuple[str, str]:
    args = tuple(subst[t] if is_var(t) else t for t in head.args)
    return args[0], args[1]


def _check_head_signature(store: FactStore, rule_name: str, fact: Fact) -> None:
    sig = store.relations[fact.predicate]
    for arg, expected, side in (
        (fact.subject, sig.subject, "subject"),
        (fact.obj, sig.obj, "object"),
    ):
        if not store.category_of(arg).is_under(expected):
            raise SignatureViolation(
                f"rule {rule_name} derived {fact.predicate}({fact.subject}, "
                f"{fact.obj}) whose {side} violates the declared signature"
            )


def infer_closure(store: FactStore, plan: RulePlan) -> FactStore:
    """Least fixpoint of the plan's rules over the base facts.

    Derived facts are recomputed from scratch (any existing derived set is
    ignored), carry the deriving rule's name as provenance, and inherit the
    intersection of their premises' extents. Deterministic: equal stores
    and plans always produce equal closures.
    """
    full: dict[str, list[Fact]] = {}
    for fact in sorted(store.base, key=fact_sort_key):
        full.setdefault(fact.predicate, []).append(fact)
    derived: set[Fact] = set()

    def facts_of(predicate: str) -> list[Fact]:
        return full.get(predicate, [])

    def derive(cr: CompiledRule, delta_at: int | None, delta: list[Fact] | None,
               out: list[Fact]) -> None:
        for subst, premises in _eval_body(
            store, facts_of, cr.ordered_body, 0, {}, (), delta_at, delta
        ):
            extent = intersect_extents(p.extent for p in premises)
            if extent is EMPTY_EXTENT:
                continue
            subject, obj = _ground_head(cr.rule.head, subst)
            candidate = Fact(
                cr.rule.head.predicate, subject, obj, extent, derived_by=cr.rule.name
            )
            if candidate in store.base or candidate in derived:
                continue
            _check_head_signature(store, cr.rule.name, candidate)
            derived.add(candidate)
            out.append(candidate)

    delta: list[Fact] = []
    for cr in plan.rules:
        derive(cr, None, None, delta)
    for fact in delta:
        full.setdefault(fact.predicate, []).append(fact)
    while delta and plan.recursive:
        next_delta: list[Fact] = []
        for cr in plan.rules:
            relational = [i for i, a in enumerate(cr.ordered_body) if not a.is_test]
            for position in relational:
                derive(cr, position, delta, next_delta)
        for fact in next_delta:
            full.setdefault(fact.predicate, []).append(fact)
        delta = next_delta
    return FactStore(
        kinds=dict(store.kinds),
        individuals=dict(store.individuals),
        relations=dict(store.relations),
        base=store.base,
        derived=frozenset(derived),
    )


def naive_closure(store: FactStore, rules: Sequence[Rule]) -> FactStore:
    """Reference oracle: re-join every rule over all facts each round until
    nothing changes. Shares no evaluation machinery with infer_closure; the
    extent intersection is recomputed inline."""
    derived: set[Fact] = set()

    def substitutions(body, i, subst, premises, facts):
        if i == len(body):
            yield subst, premises
            return
        atom = body[i]
        if len(atom.args) == 1:
            node = CATEGORY_TESTS[atom.predicate]
            term = atom.args[0]
            candidates = (
                [subst[term]] if (is_var(term) and term in subst)
                else ([term] if not is_var(term) else sorted(store.individuals))
            )
            for name in candidates:
                if name in store.individuals and store.category_of(name).is_under(node):
                    s2 = dict(subst)
                    if is_var(term):
                        s2[term] = name
                    yield from substitutions(body, i + 1, s2, premises, facts)
            return
        for fact in facts:
            if fact.predicate != atom.predicate:
                continue
            s2 = dict(subst)
            ok = True
            for term, value in zip(atom.args, (fact.subject, fact.obj)):
                if is_var(term):
                    if term in s2 and s2[term] != value:
                        ok = False
                        break
                    s2[term] = value
                elif term != value:
                    ok = False
                    break
            if ok:
                yield from substitutions(body, i + 1, s2, premises + [fact], facts)

    changed = True
    while changed:
        changed = False
        facts = sorted(store.base | derived, key=fact_sort_key)
        for rule in rules:
            for subst, premises in substitutions(rule.body, 0, {}, [], facts):
                starts = [
                    p.extent.start for p in premises
                    if p.extent is not None and p.extent.start is not None
                ]
                ends = [
                    p.extent.end for p in premises
                    if p.extent is not None and p.extent.end is not None
                ]
                start = max(starts) if starts else None
                end = min(ends) if ends else None
                if start is not None and end is not None and start > end:
                    continue
                extent = None if (start is None and end is None) else Interval(start, end)
                args = tuple(subst[t] if is_var(t) else t for t in rule.head.args)
                candidate = Fact(
                    rule.head.predicate, args[0], args[1], extent, derived_by=rule.name
                )
                if candidate not in store.base and candidate not in derived:
                    derived.add(candidate)
                    changed = True
    return FactStore(
        kinds=dict(store.kinds),
        individuals=dict(store.individuals),
        relations=dict(store.relations),
        base=store.base,
        derived=frozenset(derived),
    )


def permitted_activities(
    store: FactStore, role: str, at: int | None = None
) -> set[str]:
    """Activities the role may perform, per the closure's permitted_activity
    facts; `at` restricts to facts holding at that tick."""
    if role not in store.individuals:
        raise UnknownEntity(f"unknown individual {role!r}")
    if not store.category_of(role).is_under(Category.ROLE):
        raise NotARole(f"{role!r} is not categorized under Role")
    return {
        fact.obj
        for fact in store.iter_matching("permitted_activity", role, None)
        if at is None or fact.extent is None or fact.extent.contains(at)
    }


def explain(store: FactStore, plan: RulePlan, fact: Fact) -> Explanation:
    """All one-step derivations of a closure fact.

    Base facts explain as themselves (is_base, no derivations). Premises are
    searched over the full closure, so multi-step derivations surface as
    chains of one-step explanations.
    """
    if fact in store.base:
        return Explanation(fact=fact, is_base=True, derivations=())
    if fact not in store.derived:
        raise FactNotInClosure(
            f"{fact.predicate}({fact.subject}, {fact.obj}) is not in the closure"
        )
    full: dict[str, list[Fact]] = {}
    for f in sorted(store.facts(), key=fact_sort_key):
        full.setdefault(f.predicate, []).append(f)

    def facts_of(predicate: str) -> list[Fact]:
        return full.get(predicate, [])

    found: dict[tuple, Derivation] = {}
    for cr in plan.rules:
        rule = cr.rule
        if rule.head.predicate != fact.predicate:
            continue
        subst: dict[str, str] = {}
        ok = True
        for term, value in zip(rule.head.args, (fact.subject, fact.obj)):
            if is_var(term):
                if subst.get(term, value) != value:
                    ok = False
                    break
                subst[term] = value
            elif term != value:
                ok = False
                break
        if not ok:
            continue
        for _, premises in _eval_body(
            store, facts_of, rule.body, 0, subst, (), None, None
        ):
            extent = intersect_extents(p.extent for p in premises)
            if extent is EMPTY_EXTENT or extent != fact.extent:
                continue
            key = (rule.name, tuple(p.core() for p in premises))
            if key not in found:
                found[key] = Derivation(conclusion=fact, rule=rule.name, premises=premises)
    ordered = sorted(
        found.values(),
        key=lambda d: (d.rule, tuple(fact_sort_key(p) for p in d.premises)),
    )
    return Explanation(fact=fact, is_base=False, derivations=tuple(ordered))
