"""Temporal views over a store: snapshots of continuants, spans of occurrents.

A snapshot at tick t is the continuant side of the world: every closure fact
holding at t whose subject and object both categorize under Continuant. A
span query over a window is the occurrent side: every occurrent individual
whose existence extent overlaps the window, plus the participation links
tying continuants into those occurrents.

Existence extents come from `exists` facts. The validator gives every
individual an eternal one unless the model (or a trace) supplies bounds, so
both views are total over declared individuals.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    Category,
    Fact,
    FactStore,
    Interval,
    RclError,
    UnknownRelation,
    fact_sort_key,
    format_extent,
    format_fact,
)


class EmptyWindow(RclError):
    """Span query window has start after end."""


class NotAnOccurrent(RclError):
    """participants() target does not categorize under Occurrent."""


@dataclass(frozen=True)
class SnapView:
    """Continuant-only facts holding at one time point, canonically sorted."""

    at: int
    facts: tuple[Fact, ...]


@dataclass(frozen=True)
class SpanView:
    """Occurrents overlapping a window, with their participation links."""

    window: Interval
    occurrents: tuple[str, ...]
    links: tuple[Fact, ...]


def holds_at(store: FactStore, predicate: str, subject: str, obj: str, t: int) -> bool:
    """True when some closure fact matches the triple and holds at t.

    Eternal facts hold at every t. The predicate must be declared.
    """
    if predicate not in store.relations:
        raise UnknownRelation(f"unknown relation {predicate!r}")
    return store.holds(predicate, subject, obj, t)


def _is_continuant_fact(store: FactStore, fact: Fact) -> bool:
    return store.category_of(fact.subject).is_under(Category.CONTINUANT) and (
        store.category_of(fact.obj).is_under(Category.CONTINUANT)
    )


def snapshot(store: FactStore, t: int) -> SnapView:
    """The continuant state of the world at tick t."""
    selected = [
        fact
        for fact in store.facts()
        if (fact.extent is None or fact.extent.contains(t))
        and _is_continuant_fact(store, fact)
    ]
    return SnapView(at=t, facts=tuple(sorted(selected, key=fact_sort_key)))


def existence_extents(store: FactStore, name: str) -> list[Interval | None]:
    """Extents of the individual's exists facts; empty means no exists fact
    was recorded (treated as permanent existence by callers)."""
    return [f.extent for f in store.iter_matching("exists", name, name)]


def span_query(store: FactStore, window: Interval) -> SpanView:
    """Occurrents whose existence overlaps the window, plus participation."""
    if window.start is not None and window.end is not None and window.start > window.end:
        raise EmptyWindow(f"window start {window.start} after end {window.end}")
    occurrents: list[str] = []
    for name in sorted(store.individuals):
        if not store.category_of(name).is_under(Category.OCCURRENT):
            continue
        extents = existence_extents(store, name)
        if not extents:
            extents = [None]
        if any(extent is None or extent.overlaps(window) for extent in extents):
            occurrents.append(name)
    listed = set(occurrents)
    links = sorted(
        (
            fact
            for fact in store.iter_matching("participates_in", None, None)
            if fact.obj in listed
        ),
        key=fact_sort_key,
    )
    return SpanView(window=window, occurrents=tuple(occurrents), links=tuple(links))


def participants(store: FactStore, occurrent: str) -> set[str]:
    """Continuants linked into an occurrent via participates_in."""
    if occurrent not in store.individuals or not store.category_of(occurrent).is_under(
        Category.OCCURRENT
    ):
        raise NotAnOccurrent(f"{occurrent!r} is not categorized under Occurrent")
    return {f.subject for f in store.iter_matching("participates_in", None, occurrent)}


def render_snapshot(store: FactStore, view: SnapView) -> str:
    lines = [f"snapshot t={view.at}"]
    lines.extend(format_fact(fact) for fact in view.facts)
    return "\n".join(lines) + "\n"


def render_span(store: FactStore, view: SpanView) -> str:
    """Header plus the exists facts of listed occurrents and their links,
    all in the canonical export line format."""
    lines = [f"span {format_extent(view.window)}"]
    shown: list[Fact] = []
    listed = set(view.occurrents)
    for fact in store.iter_matching("exists", None, None):
        if fact.subject in listed and fact.obj in listed:
            shown.append(fact)
    shown.extend(view.links)
    lines.extend(format_fact(fact) for fact in sorted(shown, key=fact_sort_key))
    return "\n".join(lines) + "\n"
