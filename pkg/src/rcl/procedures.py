"""Procedures as realizable specifications, and the trace realization checker.

A procedure is a strictly sequential list of guarded steps with an optional
duration bound; a process trace is a time-ordered list of events. The trace
realizes the procedure when its steps map, in order and injectively, onto
events with the right activity kinds, performed by actors bearing the right
roles at the right times, under guards that hold at those times, within the
duration bound.

The checker reports the earliest realization (lexicographically smallest
event-index vector). When none exists it names the first step that the
greedy-earliest extension cannot serve and the strongest reason seen there:
guard-false over role-not-borne over missing-event. If steps can all be
served but every complete assignment overruns the bound, the report is
duration-exceeded against the final step.

Two stratification rules keep checking reproducible: guards consult base
facts only, while role bearing consults the closure (so chain-derived bears
facts count).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .model import Fact, FactStore, Interval, RclError


class OverlapViolation(RclError):
    """compose_traces arguments overlap in time."""


class InvalidPrefix(RclError):
    """enabled_steps was given a matched assignment that is not a valid
    order-preserving prefix of the procedure."""


class UnknownProcedure(RclError):
    """No procedure with that name in the model."""


class UnknownTrace(RclError):
    """No trace with that name in the model."""


MISSING_EVENT = "missing-event"
ROLE_NOT_BORNE = "role-not-borne"
GUARD_FALSE = "guard-false"
DURATION_EXCEEDED = "duration-exceeded"

#: weakest to strongest; reporting picks the strongest reason encountered
_REASON_STRENGTH = {MISSING_EVENT: 0, ROLE_NOT_BORNE: 1, GUARD_FALSE: 2}


@dataclass(frozen=True)
class Step:
    """One step: an activity kind, the role its actor must bear, and an
    optional state guard that must hold at the event time."""

    name: str
    activity: str
    role: str
    guard: str | None = None


@dataclass(frozen=True)
class Procedure:
    name: str
    steps: tuple[Step, ...]
    max_duration: int | None = None

    def __post_init__(self) -> None:
        if not self.steps:
            raise ValueError(f"procedure {self.name} has no steps")
        names = [s.name for s in self.steps]
        if len(set(names)) != len(names):
            raise ValueError(f"procedure {self.name} has duplicate step names")
        if self.max_duration is not None and self.max_duration <= 0:
            raise ValueError(f"procedure {self.name} max duration must be positive")


@dataclass(frozen=True)
class Event:
    time: int
    activity: str
    actor: str


@dataclass(frozen=True)
class ProcessTrace:
    """Time-ordered activity occurrences. `parts` names component traces
    when this trace was built by composition."""

    name: str
    events: tuple[Event, ...]
    parts: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        times = [e.time for e in self.events]
        if any(a > b for a, b in zip(times, times[1:])):
            raise ValueError(f"trace {self.name} event times must be non-decreasing")


@dataclass(frozen=True)
class RealizationReport:
    realized: bool
    #: (step name, 0-based event index) pairs, present iff realized
    assignment: tuple[tuple[str, int], ...] | None
    failure_step: str | None
    failure_reason: str | None


def occurrence_id(trace_name: str, index: int) -> str:
    """Identifier of the occurrence generated for 1-based event `index`."""
    return f"{trace_name}_e{index}"


def trace_facts(trace: ProcessTrace) -> tuple[Fact, ...]:
    """Existence, participation, and part-of facts a trace contributes.

    The trace process exists over [first event, last event]; each event
    occurrence exists at its instant with its actor participating; composed
    traces link their parts via part_of.
    """
    facts: list[Fact] = []
    if trace.events:
        facts.append(
            Fact(
                "exists", trace.name, trace.name,
                Interval(trace.events[0].time, trace.events[-1].time),
            )
        )
    for i, event in enumerate(trace.events, start=1):
        eid = occurrence_id(trace.name, i)
        instant = Interval(event.time, event.time)
        facts.append(Fact("exists", eid, eid, instant))
        facts.append(Fact("participates_in", event.actor, eid, instant))
    for part in trace.parts:
        facts.append(Fact("part_of", part, trace.name))
    return tuple(facts)


def _role_borne(store: FactStore, actor: str, role: str, t: int) -> bool:
    # closure lookup, so chain-derived bears facts count
    return store.holds("bears", actor, role, t)


def _some_bearer(store: FactStore, role: str, t: int) -> bool:
    for fact in store.iter_matching("bears", None, role):
        if fact.extent is None or fact.extent.contains(t):
            return True
    return False


def _guard_holds(store: FactStore, guard: str, t: int) -> bool:
    # guards are stratified below inference: base facts only
    for fact in store.base:
        if fact.predicate == guard and (fact.extent is None or fact.extent.contains(t)):
            return True
    return False


def _admit(store: FactStore, step: Step, event: Event) -> str | None:
    """None when the event can serve the step, else the failure reason."""
    if event.activity != step.activity:
        return MISSING_EVENT
    if step.guard is not None and not _guard_holds(store, step.guard, event.time):
        return GUARD_FALSE
    if not _role_borne(store, event.actor, step.role, event.time):
        return ROLE_NOT_BORNE
    return None


def check_realization(
    store: FactStore, proc: Procedure, trace: ProcessTrace
) -> RealizationReport:
    """Decide realization and report it deterministically.

    Search is exhaustive over order-preserving injective assignments (in
    lexicographic order, with duration pruning), so a realization is found
    whenever one exists, and the one reported is the earliest.
    """
    steps = proc.steps
    events = trace.events
    admissible: dict[tuple[int, int], bool] = {}

    def admits(si: int, ei: int) -> bool:
        key = (si, ei)
        if key not in admissible:
            admissible[key] = _admit(store, steps[si], events[ei]) is None
        return admissible[key]

    def search(si: int, start: int, first_time: int | None) -> list[int] | None:
        if si == len(steps):
            return []
        for ei in range(start, len(events)):
            if not admits(si, ei):
                continue
            t0 = events[ei].time if first_time is None else first_time
            if proc.max_duration is not None and events[ei].time - t0 > proc.max_duration:
                # later events only widen the span; no extension can recover
                break
            rest = search(si + 1, ei + 1, t0)
            if rest is not None:
                return [ei] + rest
        return None

    indices = search(0, 0, None)
    if indices is not None:
        assignment = tuple((steps[i].name, ei) for i, ei in enumerate(indices))
        return RealizationReport(
            realized=True, assignment=assignment, failure_step=None, failure_reason=None
        )

    # Greedy-earliest walk ignoring the duration bound locates the blocking
    # step; if it completes, only the duration bound can have failed.
    cursor = 0
    for step in steps:
        chosen = None
        strongest = MISSING_EVENT
        for ei in range(cursor, len(events)):
            reason = _admit(store, step, events[ei])
            if reason is None:
                chosen = ei
                break
            if events[ei].activity == step.activity:
                if _REASON_STRENGTH[reason] > _REASON_STRENGTH[strongest]:
                    strongest = reason
        if chosen is None:
            return RealizationReport(
                realized=False,
                assignment=None,
                failure_step=step.name,
                failure_reason=strongest,
            )
        cursor = chosen + 1
    return RealizationReport(
        realized=False,
        assignment=None,
        failure_step=steps[-1].name,
        failure_reason=DURATION_EXCEEDED,
    )


def enabled_steps(
    store: FactStore, proc: Procedure, matched: Mapping[str, Event], t: int
) -> set[Step]:
    """The next step, when its guard holds at t and anyone bears its role.

    Sequencing is strict: only the single next unmatched step can ever be
    enabled. `matched` must assign a prefix of the procedure's steps to
    events with matching activities in non-decreasing time order.
    """
    k = len(matched)
    if k > len(proc.steps):
        raise InvalidPrefix("more matched steps than the procedure has")
    prefix = proc.steps[:k]
    if {s.name for s in prefix} != set(matched):
        raise InvalidPrefix("matched steps are not a prefix of the procedure")
    last_time: int | None = None
    for step in prefix:
        event = matched[step.name]
        if event.activity != step.activity:
            raise InvalidPrefix(f"step {step.name} matched to a {event.activity} event")
        if last_time is not None and event.time < last_time:
            raise InvalidPrefix("matched events are not in time order")
        last_time = event.time
    if k == len(proc.steps):
        return set()
    step = proc.steps[k]
    if step.guard is not None and not _guard_holds(store, step.guard, t):
        return set()
    if not _some_bearer(store, step.role, t):
        return set()
    return {step}


def compose_traces(a: ProcessTrace, b: ProcessTrace) -> ProcessTrace:
    """Concatenate two traces into a composite with part_of links.

    The second trace must start no earlier than the first ends.
    """
    if a.events and b.events and a.events[-1].time > b.events[0].time:
        raise OverlapViolation(
            f"trace {b.name} starts at {b.events[0].time}, before {a.name} "
            f"ends at {a.events[-1].time}"
        )
    return ProcessTrace(
        name=f"{a.name}_{b.name}",
        events=a.events + b.events,
        parts=(a.name, b.name),
    )


def render_report(report: RealizationReport, trace: ProcessTrace) -> str:
    """`REALIZED step=event ...` or `FAILED step=<name> reason=<reason>`."""
    if report.realized:
        pairs = " ".join(
            f"{step}={occurrence_id(trace.name, ei + 1)}"
            for step, ei in report.assignment
        )
        return f"REALIZED {pairs}"
    return f"FAILED step={report.failure_step} reason={report.failure_reason}"
