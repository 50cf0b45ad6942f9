"""Events, logs, the sublog relation and the shuffle-merge operator.

Everything here is immutable and purely functional; this module is the
substrate for machines, protocols and the simulator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Mapping, Tuple

from .errors import InvalidLog, VectorOutOfRange

# Event types are plain (case-sensitive, nonempty) identifier strings.
EventType = str
# A log type is a finite sequence of event types; may be empty.
LogType = Tuple[EventType, ...]
# Maps source index -> highest sequence number present (absent = 0).
PrefixVector = Mapping[int, int]


@dataclass(frozen=True, order=True)
class EventId:
    """Globally unique identity of an event: emitting source and per-source seq."""

    source: int
    seq: int


@dataclass(frozen=True)
class Event:
    id: EventId
    etype: EventType
    # Opaque payload stand-in; never inspected by any semantic operation.
    meta: str | None = field(default=None, compare=False)


def ev(source: int, seq: int, etype: EventType, meta: str | None = None) -> Event:
    return Event(EventId(source, seq), etype, meta)


@dataclass(frozen=True)
class Log:
    """A duplicate-free sequence of events, per-source ordered by increasing seq."""

    entries: Tuple[Event, ...] = ()

    def __post_init__(self):
        seen = set()
        last_seq: Dict[int, int] = {}
        for e in self.entries:
            if e.id in seen:
                raise InvalidLog(f"duplicate event id {e.id}")
            seen.add(e.id)
            prev = last_seq.get(e.id.source)
            if prev is not None and e.id.seq <= prev:
                raise InvalidLog(
                    f"source {e.id.source}: seq {e.id.seq} after {prev}"
                )
            last_seq[e.id.source] = e.id.seq

    @classmethod
    def of(cls, *events: Event) -> "Log":
        return cls(tuple(events))

    def __iter__(self) -> Iterator[Event]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def ids(self) -> frozenset[EventId]:
        return frozenset(e.id for e in self.entries)

    def append(self, events: Iterable[Event]) -> "Log":
        return Log(self.entries + tuple(events))


EMPTY_LOG = Log()


def log_type_of(l: Log) -> LogType:
    return tuple(e.etype for e in l)


def is_sublog(l1: Log, l2: Log) -> bool:
    """Order-preserving, per-source downward-complete containment of l1 in l2."""
    pos = {e.id: i for i, e in enumerate(l2.entries)}
    prev = -1
    for e in l1:
        i = pos.get(e.id)
        if i is None or i <= prev:
            return False
        prev = i
    ids1 = {e.id for e in l1}
    # Per-source prefix: l1's slice of each source must be an l2-order prefix.
    per_source_seen: Dict[int, bool] = {}
    for e in reversed(l2.entries):
        src = e.id.source
        if e.id in ids1:
            per_source_seen[src] = True
        elif per_source_seen.get(src):
            # an event of this source missing from l1 precedes one present in l1
            return False
    return True


def merge(l1: Log, l2: Log) -> List[Log]:
    """All logs containing exactly the union of events with both inputs as sublogs.

    Returns a duplicate-free list in a canonical (lexicographic-interleaving)
    order; empty when the inputs order shared events inconsistently.
    """
    e1, e2 = l1.entries, l2.entries
    ids1 = {e.id for e in e1}
    ids2 = {e.id for e in e2}
    candidates: List[Tuple[Event, ...]] = []

    def rec(i: int, j: int, acc: Tuple[Event, ...]) -> None:
        if i == len(e1) and j == len(e2):
            candidates.append(acc)
            return
        if i < len(e1) and j < len(e2) and e1[i].id == e2[j].id:
            rec(i + 1, j + 1, acc + (e1[i],))
            return
        if i < len(e1) and e1[i].id not in ids2:
            rec(i + 1, j, acc + (e1[i],))
        if j < len(e2) and e2[j].id not in ids1:
            rec(i, j + 1, acc + (e2[j],))
        # both heads shared but unequal: conflicting orders, dead branch

    rec(0, 0, ())
    out: List[Log] = []
    for acc in candidates:
        try:
            m = Log(acc)
        except InvalidLog:
            continue
        if is_sublog(l1, m) and is_sublog(l2, m):
            out.append(m)
    return out


def prefix_vector(l: Log) -> Dict[int, int]:
    v: Dict[int, int] = {}
    for e in l:
        v[e.id.source] = max(v.get(e.id.source, 0), e.id.seq)
    return v


def restrict_to_vector(global_log: Log, v: PrefixVector) -> Log:
    have = prefix_vector(global_log)
    for src, seq in v.items():
        if seq > have.get(src, 0):
            raise VectorOutOfRange(
                f"vector asks for source {src} seq {seq}, log has {have.get(src, 0)}"
            )
    return Log(tuple(e for e in global_log if e.id.seq <= v.get(e.id.source, 0)))


def filter_log_type(t: Iterable[EventType], allowed) -> LogType:
    allowed = frozenset(allowed)
    return tuple(x for x in t if x in allowed)


def vector_leq(v1: PrefixVector, v2: PrefixVector) -> bool:
    return all(seq <= v2.get(src, 0) for src, seq in v1.items() if seq > 0)


def sublogs(l: Log) -> Iterator[Log]:
    """All sublogs of l, one per componentwise-valid prefix vector."""
    top = prefix_vector(l)
    sources = sorted(top)

    def walk(k: int, v: Dict[int, int]) -> Iterator[Log]:
        if k == len(sources):
            yield restrict_to_vector(l, v)
            return
        src = sources[k]
        for seq in range(top[src] + 1):
            yield from walk(k + 1, {**v, src: seq})

    if not sources:
        yield EMPTY_LOG
        return
    yield from walk(0, {})
