"""Shared test helpers: independent oracles and seeded model generators.

The oracles here deliberately reimplement semantics from scratch (plain
loops, no indexes, no shared evaluation code) so they can stand as
references for the production paths.
"""

from __future__ import annotations

import itertools
import random

from rcl.model import (
    BUILTIN_KINDS,
    BUILTIN_RELATIONS,
    Category,
    Fact,
    FactStore,
    Interval,
    RelationSig,
)
from rcl.procedures import Event, Procedure, ProcessTrace, Step
from rcl.rules import Atom, Rule

RULE_1 = Rule(
    "rule_1",
    Atom("permitted_activity", ("?x", "?z")),
    (
        Atom("role", ("?x",)),
        Atom("rights", ("?y",)),
        Atom("activity", ("?z",)),
        Atom("has_right", ("?x", "?y")),
        Atom("has_activity", ("?y", "?z")),
    ),
)

INHERIT_CHAIN_RULE = Rule(
    "chain_1",
    Atom("has_right", ("?a", "?c")),
    (Atom("belongs_to", ("?a", "?b")), Atom("has_right", ("?b", "?c"))),
)


def make_store(
    individuals: dict[str, str],
    relations: dict[str, RelationSig],
    facts: set[Fact],
    kinds: dict[str, Category] | None = None,
) -> FactStore:
    all_kinds = dict(BUILTIN_KINDS)
    if kinds:
        all_kinds.update(kinds)
    return FactStore(
        kinds=all_kinds,
        individuals=dict(individuals),
        relations={**BUILTIN_RELATIONS, **relations},
        base=frozenset(facts),
        derived=frozenset(),
    )


def random_extent(rng: random.Random, eternal_chance: float = 0.3) -> Interval | None:
    if rng.random() < eternal_chance:
        return None
    a = rng.randint(0, 50)
    b = rng.randint(a, 50)
    return Interval(a, b)


def random_rights_store(rng: random.Random) -> tuple[FactStore, list[Rule]]:
    """A store in the roles/rights/activities shape with up to 60 facts,
    plus the rules active over it (rule_1, sometimes the inheritance chain)."""
    n_roles = rng.randint(1, 10)
    n_rights = rng.randint(1, 10)
    n_acts = rng.randint(1, 10)
    individuals: dict[str, str] = {}
    for i in range(n_roles):
        individuals[f"r{i}"] = "role"
    for i in range(n_rights):
        individuals[f"g{i}"] = "right"
    for i in range(n_acts):
        individuals[f"a{i}"] = "activity"
    relations = {
        "has_right": RelationSig(Category.ROLE, Category.RIGHT),
        "has_activity": RelationSig(Category.RIGHT, Category.ACTIVITY_KIND, base_only=True),
        "belongs_to": RelationSig(Category.ROLE, Category.ROLE, base_only=True),
        "permitted_activity": RelationSig(Category.ROLE, Category.ACTIVITY_KIND),
    }
    facts: set[Fact] = set()
    n_facts = rng.randint(0, 60)
    for _ in range(n_facts):
        which = rng.random()
        extent = random_extent(rng)
        if which < 0.4:
            facts.add(Fact(
                "has_right",
                f"r{rng.randrange(n_roles)}",
                f"g{rng.randrange(n_rights)}",
                extent,
            ))
        elif which < 0.8:
            facts.add(Fact(
                "has_activity",
                f"g{rng.randrange(n_rights)}",
                f"a{rng.randrange(n_acts)}",
                extent,
            ))
        else:
            facts.add(Fact(
                "belongs_to",
                f"r{rng.randrange(n_roles)}",
                f"r{rng.randrange(n_roles)}",
                extent,
            ))
    rules = [RULE_1]
    if rng.random() < 0.5:
        rules.append(INHERIT_CHAIN_RULE)
    return make_store(individuals, relations, facts), rules


# -- realization oracle ---------------------------------------------------


def _oracle_guard(store: FactStore, guard: str, t: int) -> bool:
    for f in store.base:
        if f.predicate == guard and (f.extent is None or f.extent.contains(t)):
            return True
    return False


def _oracle_bears(store: FactStore, actor: str, role: str, t: int) -> bool:
    for f in store.base | store.derived:
        if (
            f.predicate == "bears"
            and f.subject == actor
            and f.obj == role
            and (f.extent is None or f.extent.contains(t))
        ):
            return True
    return False


def _oracle_step_ok(store: FactStore, step: Step, event: Event) -> bool:
    if event.activity != step.activity:
        return False
    if step.guard is not None and not _oracle_guard(store, step.guard, event.time):
        return False
    return _oracle_bears(store, event.actor, step.role, event.time)


def oracle_realized(store: FactStore, proc: Procedure, trace: ProcessTrace) -> bool:
    """Exhaustive enumeration over order-preserving injective assignments."""
    events = trace.events
    for combo in itertools.combinations(range(len(events)), len(proc.steps)):
        if not all(
            _oracle_step_ok(store, step, events[ei])
            for step, ei in zip(proc.steps, combo)
        ):
            continue
        if proc.max_duration is not None:
            span = events[combo[-1]].time - events[combo[0]].time
            if span > proc.max_duration:
                continue
        return True
    return False


def oracle_assignments(
    store: FactStore, proc: Procedure, trace: ProcessTrace
) -> list[tuple[int, ...]]:
    """Every valid assignment, in lexicographic order."""
    events = trace.events
    out = []
    for combo in itertools.combinations(range(len(events)), len(proc.steps)):
        if not all(
            _oracle_step_ok(store, step, events[ei])
            for step, ei in zip(proc.steps, combo)
        ):
            continue
        if proc.max_duration is not None:
            if events[combo[-1]].time - events[combo[0]].time > proc.max_duration:
                continue
        out.append(combo)
    return out


# -- realization case generator --------------------------------------------


def random_realization_case(
    rng: random.Random,
) -> tuple[FactStore, Procedure, ProcessTrace]:
    n_persons = rng.randint(1, 3)
    n_roles = rng.randint(1, 3)
    n_acts = rng.randint(1, 4)
    n_states = rng.randint(1, 2)
    individuals: dict[str, str] = {}
    for i in range(n_persons):
        individuals[f"p{i}"] = "person"
    for i in range(n_roles):
        individuals[f"r{i}"] = "role"
    for i in range(n_acts):
        individuals[f"act{i}"] = "activity"
    for i in range(n_states):
        individuals[f"s{i}"] = "state"
    relations = {
        "bears": RelationSig(Category.INDEPENDENT, Category.ROLE, base_only=True),
    }
    for i in range(n_states):
        relations[f"s{i}"] = RelationSig(Category.INDEPENDENT, Category.INDEPENDENT)
    facts: set[Fact] = set()
    for _ in range(rng.randint(1, 6)):
        facts.add(Fact(
            "bears",
            f"p{rng.randrange(n_persons)}",
            f"r{rng.randrange(n_roles)}",
            random_extent(rng, eternal_chance=0.6),
        ))
    for i in range(n_states):
        if rng.random() < 0.8:
            facts.add(Fact(f"s{i}", "p0", "p0", random_extent(rng, eternal_chance=0.4)))
    store = make_store(individuals, relations, facts)

    n_steps = rng.randint(1, 4)
    steps = tuple(
        Step(
            name=f"st{i}",
            activity=f"act{rng.randrange(n_acts)}",
            role=f"r{rng.randrange(n_roles)}",
            guard=f"s{rng.randrange(n_states)}" if rng.random() < 0.4 else None,
        )
        for i in range(n_steps)
    )
    max_duration = rng.randint(1, 30) if rng.random() < 0.5 else None
    proc = Procedure("proc", steps, max_duration)

    n_events = rng.randint(0, 8)
    times = sorted(rng.randint(0, 50) for _ in range(n_events))
    events = tuple(
        Event(t, f"act{rng.randrange(n_acts)}", f"p{rng.randrange(n_persons)}")
        for t in times
    )
    trace = ProcessTrace("tr", events)
    return store, proc, trace


def constructed_realizing_case(
    rng: random.Random,
) -> tuple[FactStore, Procedure, ProcessTrace]:
    """A case built to realize: each step gets a matching event in order,
    actors bear the roles eternally, guards hold over the full horizon."""
    n_steps = rng.randint(1, 4)
    individuals = {"p0": "person", "s0": "state"}
    relations = {
        "bears": RelationSig(Category.INDEPENDENT, Category.ROLE, base_only=True),
        "s0": RelationSig(Category.INDEPENDENT, Category.INDEPENDENT),
    }
    facts: set[Fact] = {Fact("s0", "p0", "p0")}
    steps = []
    events = []
    t = rng.randint(0, 5)
    for i in range(n_steps):
        individuals[f"r{i}"] = "role"
        individuals[f"act{i}"] = "activity"
        facts.add(Fact("bears", "p0", f"r{i}"))
        guard = "s0" if rng.random() < 0.5 else None
        steps.append(Step(f"st{i}", f"act{i}", f"r{i}", guard))
        if rng.random() < 0.5:  # noise event the assignment must skip
            events.append(Event(t, f"act{rng.randrange(n_steps)}", "p0"))
            t += rng.randint(0, 2)
        events.append(Event(t, f"act{i}", "p0"))
        t += rng.randint(1, 3)
    store = make_store(individuals, relations, facts)
    proc = Procedure("proc", tuple(steps), None)
    trace = ProcessTrace("tr", tuple(events))
    return store, proc, trace


def random_suffix_trace(rng: random.Random, trace: ProcessTrace, store: FactStore) -> ProcessTrace:
    """Events appendable after the trace, drawn from the store's vocabulary."""
    activities = sorted(
        n for n, k in store.individuals.items()
        if store.kinds[k] is Category.ACTIVITY_KIND
    )
    persons = sorted(
        n for n, k in store.individuals.items()
        if store.kinds[k] is Category.INDEPENDENT
    )
    start = (trace.events[-1].time if trace.events else 0) + rng.randint(0, 3)
    events = []
    t = start
    for _ in range(rng.randint(1, 4)):
        events.append(Event(t, rng.choice(activities), rng.choice(persons)))
        t += rng.randint(0, 3)
    return ProcessTrace("suffix", tuple(events))
