"""Core model: category taxonomy, temporal facts, and the immutable fact store.

The taxonomy is a fixed tree splitting entities into continuants (things
that persist through time), occurrents (things that unfold in time), and
universals (activity kinds and states used as vocabulary). User models
declare kinds attached to taxonomy nodes, individuals of those kinds,
binary relations with category signatures, and facts over the individuals.

Facts optionally carry a closed integer interval (abstract ticks) telling
when they hold; a fact with no interval is eternal. Stores are values:
every operation that changes a store returns a new one, which makes them
safe to share between readers and keeps inference reproducible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator


class RclError(Exception):
    """Base class for all model and engine errors."""


class UnknownKind(RclError):
    """Name is not a declared kind or individual."""


class UnknownEntity(RclError):
    """Fact argument names an undeclared individual."""


class UnknownRelation(RclError):
    """Fact predicate names an undeclared relation."""


class SignatureViolation(RclError):
    """Fact argument does not satisfy the relation's category signature."""


class CannotRetractDerived(RclError):
    """Only base facts can be retracted; derived facts disappear on re-inference."""


class BadIdentifier(RclError):
    """Identifier does not match [a-z][a-z0-9_]*."""


class DuplicateDeclaration(RclError):
    """A name was declared twice."""


_IDENT_RE = re.compile(r"[a-z][a-z0-9_]*\Z")


def check_identifier(name: str) -> str:
    """Return the name if it is a valid entity identifier, else raise."""
    if not _IDENT_RE.match(name):
        raise BadIdentifier(f"invalid identifier {name!r}")
    return name


class Category(Enum):
    """Fixed taxonomy node. ENTITY is an internal root used only for the
    signatures of built-in relations; no kind ever attaches to it."""

    ENTITY = "Entity"
    CONTINUANT = "Continuant"
    INDEPENDENT = "Independent"
    DEPENDENT = "Dependent"
    REALIZABLE = "Realizable"
    ROLE = "Role"
    PROCEDURE = "Procedure"
    RIGHT = "Right"
    OCCURRENT = "Occurrent"
    PROCESS = "Process"
    ACTIVITY_OCCURRENCE = "ActivityOccurrence"
    TEMPORAL_REGION = "TemporalRegion"
    UNIVERSAL = "Universal"
    ACTIVITY_KIND = "ActivityKind"
    STATE = "State"

    @property
    def parent(self) -> "Category | None":
        return _PARENT[self]

    @property
    def path(self) -> str:
        """Full taxonomy path, e.g. 'Continuant/Dependent/Realizable/Role'.

        The internal ENTITY root is not part of any path.
        """
        names: list[str] = []
        node: Category | None = self
        while node is not None and node is not Category.ENTITY:
            names.append(node.value)
            node = node.parent
        return "/".join(reversed(names))

    def is_under(self, ancestor: "Category") -> bool:
        """True when this node equals or descends from `ancestor`."""
        node: Category | None = self
        while node is not None:
            if node is ancestor:
                return True
            node = node.parent
        return False


_PARENT: dict[Category, Category | None] = {
    Category.ENTITY: None,
    Category.CONTINUANT: Category.ENTITY,
    Category.INDEPENDENT: Category.CONTINUANT,
    Category.DEPENDENT: Category.CONTINUANT,
    Category.REALIZABLE: Category.DEPENDENT,
    Category.ROLE: Category.REALIZABLE,
    Category.PROCEDURE: Category.REALIZABLE,
    Category.RIGHT: Category.DEPENDENT,
    Category.OCCURRENT: Category.ENTITY,
    Category.PROCESS: Category.OCCURRENT,
    Category.ACTIVITY_OCCURRENCE: Category.OCCURRENT,
    Category.TEMPORAL_REGION: Category.OCCURRENT,
    Category.UNIVERSAL: Category.ENTITY,
    Category.ACTIVITY_KIND: Category.UNIVERSAL,
    Category.STATE: Category.UNIVERSAL,
}


@dataclass(frozen=True)
class Interval:
    """Temporal extent over integer ticks. A None bound is open (unbounded).

    Closed bounds are inclusive on both ends.
    """

    start: int | None
    end: int | None

    def __post_init__(self) -> None:
        if self.start is not None and self.end is not None and self.start > self.end:
            raise ValueError(f"interval start {self.start} after end {self.end}")

    def contains(self, t: int) -> bool:
        if self.start is not None and t < self.start:
            return False
        if self.end is not None and t > self.end:
            return False
        return True

    def overlaps(self, other: "Interval") -> bool:
        if self.start is not None and other.end is not None and other.end < self.start:
            return False
        if self.end is not None and other.start is not None and other.start > self.end:
            return False
        return True


#: Sentinel returned by intersect_extents when the intersection is empty.
EMPTY_EXTENT = object()


def intersect_extents(extents):
    """Intersect extents, where None means eternal (no constraint).

    Returns None when every input is eternal, EMPTY_EXTENT when the
    intersection is empty, and an Interval otherwise.
    """
    start: int | None = None
    end: int | None = None
    for extent in extents:
        if extent is None:
            continue
        if extent.start is not None and (start is None or extent.start > start):
            start = extent.start
        if extent.end is not None and (end is None or extent.end < end):
            end = extent.end
    if start is not None and end is not None and start > end:
        return EMPTY_EXTENT
    if start is None and end is None:
        return None
    return Interval(start, end)


@dataclass(frozen=True)
class Fact:
    """Binary fact, optionally bounded in time.

    Identity (equality, hashing) covers predicate, arguments, and extent.
    `derived_by` records provenance: None for base facts, the deriving rule
    name otherwise. Provenance is excluded from identity so that the same
    core fact is never stored twice.
    """

    predicate: str
    subject: str
    obj: str
    extent: Interval | None = None
    derived_by: str | None = field(default=None, compare=False)

    @property
    def is_base(self) -> bool:
        return self.derived_by is None

    def core(self) -> tuple[str, str, str, Interval | None]:
        return (self.predicate, self.subject, self.obj, self.extent)


@dataclass(frozen=True)
class RelationSig:
    """Category signature of a declared relation.

    `base_only` relations may not appear as rule or chain heads.
    """

    subject: Category
    obj: Category
    base_only: bool = False


BUILTIN_KINDS: dict[str, Category] = {
    "role": Category.ROLE,
    "right": Category.RIGHT,
    "activity": Category.ACTIVITY_KIND,
    "person": Category.INDEPENDENT,
    "state": Category.STATE,
    "process": Category.PROCESS,
    "procedure": Category.PROCEDURE,
    "occurrence": Category.ACTIVITY_OCCURRENCE,
}

BUILTIN_RELATIONS: dict[str, RelationSig] = {
    "exists": RelationSig(Category.ENTITY, Category.ENTITY),
    "participates_in": RelationSig(Category.CONTINUANT, Category.OCCURRENT),
    "part_of": RelationSig(Category.OCCURRENT, Category.OCCURRENT),
}


@dataclass(frozen=True, eq=True)
class FactStore:
    """Immutable world state: declarations plus base and derived fact sets.

    The store is read under a closed-world assumption: a fact absent from
    base and derived is false for query purposes.
    """

    kinds: dict[str, Category]
    individuals: dict[str, str]
    relations: dict[str, RelationSig]
    base: frozenset[Fact]
    derived: frozenset[Fact]

    def __hash__(self):  # dict fields are unhashable; stores are values, not keys
        raise TypeError("FactStore is not hashable")

    def is_declared(self, name: str) -> bool:
        return name in self.kinds or name in self.individuals or name in self.relations

    def category_of(self, name: str) -> Category:
        """Taxonomy attachment of a kind, or of an individual's kind."""
        if name in self.kinds:
            return self.kinds[name]
        if name in self.individuals:
            return self.kinds[self.individuals[name]]
        raise UnknownKind(f"unknown kind or individual {name!r}")

    def facts(self) -> frozenset[Fact]:
        """Base and derived facts together (the closure once it is computed)."""
        return self.base | self.derived

    def iter_matching(
        self,
        predicate: str | None = None,
        subject: str | None = None,
        obj: str | None = None,
    ) -> Iterator[Fact]:
        """Iterate facts (base and derived) matching the given components."""
        for fact in self.facts():
            if predicate is not None and fact.predicate != predicate:
                continue
            if subject is not None and fact.subject != subject:
                continue
            if obj is not None and fact.obj != obj:
                continue
            yield fact

    def holds(self, predicate: str, subject: str, obj: str, t: int | None) -> bool:
        """Closed-world holds-at test; tolerant of undeclared predicates.

        With t=None, extent filtering is disabled (the eternal view).
        """
        for fact in self.iter_matching(predicate, subject, obj):
            if t is None or fact.extent is None or fact.extent.contains(t):
                return True
        return False


def empty_store() -> FactStore:
    """A store containing only the built-in kinds and relations."""
    return FactStore(
        kinds=dict(BUILTIN_KINDS),
        individuals={},
        relations=dict(BUILTIN_RELATIONS),
        base=frozenset(),
        derived=frozenset(),
    )


def categorize(store: FactStore, name: str) -> Category:
    """Taxonomy node a declared kind (or an individual's kind) attaches to."""
    return store.category_of(name)


def check_fact(store: FactStore, fact: Fact) -> None:
    """Raise unless the fact is well formed against the store's declarations."""
    sig = store.relations.get(fact.predicate)
    if sig is None:
        raise UnknownRelation(f"unknown relation {fact.predicate!r}")
    for arg in (fact.subject, fact.obj):
        if arg not in store.individuals:
            raise UnknownEntity(f"unknown individual {arg!r}")
    subject_cat = store.category_of(fact.subject)
    obj_cat = store.category_of(fact.obj)
    if fact.predicate == "bears":
        # The bearer relation is special-cased so the error states the
        # ontological constraint, not just a signature mismatch.
        if not subject_cat.is_under(Category.INDEPENDENT):
            raise SignatureViolation(
                f"bearer must be an independent continuant, got {fact.subject!r}"
            )
        if not obj_cat.is_under(Category.ROLE):
            raise SignatureViolation(f"bears object must be a role, got {fact.obj!r}")
    if not subject_cat.is_under(sig.subject):
        raise SignatureViolation(
            f"{fact.predicate} subject {fact.subject!r} is {subject_cat.path}, "
            f"expected {sig.subject.path}"
        )
    if not obj_cat.is_under(sig.obj):
        raise SignatureViolation(
            f"{fact.predicate} object {fact.obj!r} is {obj_cat.path}, "
            f"expected {sig.obj.path}"
        )


def assert_fact(store: FactStore, fact: Fact) -> FactStore:
    """Add a base fact, returning a new store with derived facts cleared.

    Idempotent for duplicates (set semantics). Any base change invalidates
    the derived set wholesale; callers re-infer when they need the closure.
    """
    if not fact.is_base:
        raise ValueError(f"only base facts can be asserted, got derived({fact.derived_by})")
    check_fact(store, fact)
    return FactStore(
        kinds=dict(store.kinds),
        individuals=dict(store.individuals),
        relations=dict(store.relations),
        base=store.base | {fact},
        derived=frozenset(),
    )


def retract_fact(store: FactStore, fact: Fact) -> FactStore:
    """Remove a base fact, returning a new store with derived facts cleared.

    Retracting an absent fact is a no-op (still clears derived).
    """
    if not fact.is_base:
        raise CannotRetractDerived(
            f"cannot retract derived fact {fact.predicate}({fact.subject}, {fact.obj})"
        )
    return FactStore(
        kinds=dict(store.kinds),
        individuals=dict(store.individuals),
        relations=dict(store.relations),
        base=store.base - {fact},
        derived=frozenset(),
    )


def _extent_sort_key(extent: Interval | None):
    if extent is None:
        return (0, 0, 0, 0, 0)
    start = (0, 0) if extent.start is None else (1, extent.start)
    end = (0, extent.end) if extent.end is not None else (1, 0)
    return (1, *start, *end)


def fact_sort_key(fact: Fact):
    """Canonical ordering: (predicate, subject, object, extent)."""
    return (fact.predicate, fact.subject, fact.obj, _extent_sort_key(fact.extent))


def format_extent(extent: Interval | None) -> str:
    if extent is None:
        return ""
    start = "*" if extent.start is None else str(extent.start)
    end = "*" if extent.end is None else str(extent.end)
    return f"[{start}, {end}]"


def format_fact(fact: Fact) -> str:
    """One canonical line: `predicate(subject, object) [start, end] # base|derived`.

    Eternal facts omit the extent part.
    """
    parts = [f"{fact.predicate}({fact.subject}, {fact.obj})"]
    if fact.extent is not None:
        parts.append(format_extent(fact.extent))
    parts.append("# base" if fact.is_base else "# derived")
    return " ".join(parts)


def canonical_export(store: FactStore) -> str:
    """Deterministic text form of all facts, one line each, sorted.

    Equal stores export byte-identical text. The export carries facts only;
    declarations are not encoded.
    """
    lines = [format_fact(f) for f in sorted(store.facts(), key=fact_sort_key)]
    if not lines:
        return ""
    return "\n".join(lines) + "\n"
