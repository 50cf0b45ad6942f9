"""Swarm protocols (global types) as finite automata.

Transitions carry a role, a command name and the nonempty sequence of
event types the command emits.  The first emitted type of each branch is
its guard; log-determinism requires guards to be pairwise distinct per
state.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Set, Tuple

from .errors import AmbiguousCommand, CommandNotEnabled, InvalidProtocol, UnknownState
from .eventlog import EMPTY_LOG, EventType, Log, LogType
from .machine import CommandLabel, SeqAllocator


@dataclass(frozen=True)
class ProtocolTransition:
    source: str
    target: str
    role: str
    command: CommandLabel

    @property
    def guard(self) -> EventType:
        return self.command.emits[0]


@dataclass(frozen=True)
class LogDeterminismVerdict:
    ok: bool
    state: Optional[str] = None
    etype: Optional[EventType] = None


@dataclass(frozen=True)
class SwarmProtocol:
    initial: str
    transitions: Tuple[ProtocolTransition, ...]

    @classmethod
    def build(
        cls,
        initial: str,
        transitions: Iterable[Tuple[str, str, str, str, Iterable[EventType]]],
    ) -> "SwarmProtocol":
        """Transitions given as (source, target, role, command, emits) tuples."""
        g = cls(
            initial,
            tuple(
                ProtocolTransition(src, tgt, role, CommandLabel(cmd, tuple(emits)))
                for src, tgt, role, cmd, emits in transitions
            ),
        )
        verdict = check_log_determinism(g)
        if not verdict.ok:
            raise InvalidProtocol(
                f"state {verdict.state!r} has two branches guarded by {verdict.etype!r}"
            )
        unreachable = g.states - g.reachable_states()
        if unreachable:
            raise InvalidProtocol(f"unreachable states: {sorted(unreachable)}")
        return g

    @cached_property
    def states(self) -> FrozenSet[str]:
        out = {self.initial}
        for t in self.transitions:
            out.add(t.source)
            out.add(t.target)
        return frozenset(out)

    @cached_property
    def _by_source(self) -> Dict[str, Tuple[ProtocolTransition, ...]]:
        out: Dict[str, List[ProtocolTransition]] = {}
        for t in self.transitions:
            out.setdefault(t.source, []).append(t)
        return {s: tuple(ts) for s, ts in out.items()}

    def reachable_states(self) -> FrozenSet[str]:
        seen = {self.initial}
        queue = deque([self.initial])
        while queue:
            s = queue.popleft()
            for t in self._by_source.get(s, ()):
                if t.target not in seen:
                    seen.add(t.target)
                    queue.append(t.target)
        return frozenset(seen)

    def branches(self, state: str) -> Tuple[ProtocolTransition, ...]:
        if state not in self.states:
            raise UnknownState(state)
        return self._by_source.get(state, ())

    def branch_by_guard(self, state: str, guard: EventType) -> Optional[ProtocolTransition]:
        for t in self.branches(state):
            if t.guard == guard:
                return t
        return None


class Subscription:
    """Role to observed-event-type assignment; unknown roles observe nothing."""

    def __init__(self, mapping: Mapping[str, Iterable[EventType]]):
        self._map: Dict[str, FrozenSet[EventType]] = {
            r: frozenset(ts) for r, ts in mapping.items()
        }

    @classmethod
    def universal(cls, g: SwarmProtocol, extra_roles: Iterable[str] = ()) -> "Subscription":
        types = event_types(g)
        roles_ = {t.role for t in g.transitions} | set(extra_roles)
        return cls({r: types for r in roles_})

    def __call__(self, role: str) -> FrozenSet[EventType]:
        return self._map.get(role, frozenset())

    def roles(self) -> FrozenSet[str]:
        return frozenset(self._map)

    def as_dict(self) -> Dict[str, FrozenSet[EventType]]:
        return dict(self._map)

    def __eq__(self, other) -> bool:
        return isinstance(other, Subscription) and self._map == other._map

    def __repr__(self) -> str:
        return f"Subscription({self._map!r})"


@dataclass(frozen=True)
class ProtocolConfig:
    state: str
    pending: LogType = ()


def check_log_determinism(g: SwarmProtocol) -> LogDeterminismVerdict:
    seen: Set[Tuple[str, EventType]] = set()
    for t in g.transitions:
        key = (t.source, t.guard)
        if key in seen:
            return LogDeterminismVerdict(False, t.source, t.guard)
        seen.add(key)
    return LogDeterminismVerdict(True)


def active_roles(g: SwarmProtocol, state: str) -> FrozenSet[str]:
    return frozenset(t.role for t in g.branches(state))


def roles(g: SwarmProtocol, state: str, sub: Subscription) -> FrozenSet[str]:
    """Roles that, from `state` on, may invoke a command or observe an event."""
    if state not in g.states:
        raise UnknownState(state)
    out: Set[str] = set()
    seen = {state}
    queue = deque([state])
    while queue:
        s = queue.popleft()
        for t in g.branches(s):
            out.add(t.role)
            emitted = set(t.command.emits)
            for r in sub.roles():
                if emitted & sub(r):
                    out.add(r)
            if t.target not in seen:
                seen.add(t.target)
                queue.append(t.target)
    return frozenset(out)


def event_types(g: SwarmProtocol) -> FrozenSet[EventType]:
    return frozenset(t for tr in g.transitions for t in tr.command.emits)


def guards(g: SwarmProtocol) -> FrozenSet[EventType]:
    return frozenset(tr.guard for tr in g.transitions)


def protocol_delta(g: SwarmProtocol, l: Log, start: Optional[ProtocolConfig] = None) -> ProtocolConfig:
    """Fold the log over protocol states with a pending queue for block tails.

    Total on all logs: events matching neither the pending head nor a
    branch guard are dropped.
    """
    cfg = start if start is not None else ProtocolConfig(g.initial)
    state, pending = cfg.state, cfg.pending
    for e in l:
        if pending:
            if e.etype == pending[0]:
                pending = pending[1:]
            continue
        branch = g.branch_by_guard(state, e.etype)
        if branch is not None:
            state = branch.target
            pending = branch.command.emits[1:]
    return ProtocolConfig(state, pending)


def _resolve_command(
    g: SwarmProtocol, state: str, cmd: str, guard: Optional[EventType]
) -> ProtocolTransition:
    matches = [t for t in g.branches(state) if t.command.name == cmd]
    if guard is not None:
        matches = [t for t in matches if t.guard == guard]
    if not matches:
        raise CommandNotEnabled(f"command {cmd!r} not enabled at state {state!r}")
    if len(matches) > 1:
        raise AmbiguousCommand(
            f"command {cmd!r} labels several branches at {state!r}; qualify by guard"
        )
    return matches[0]


def protocol_step(
    g: SwarmProtocol,
    l: Log,
    cmd: str,
    alloc: SeqAllocator,
    guard: Optional[EventType] = None,
) -> Log:
    cfg = protocol_delta(g, l)
    if cfg.pending:
        raise CommandNotEnabled(
            f"emission block incomplete, pending {cfg.pending!r}"
        )
    branch = _resolve_command(g, cfg.state, cmd, guard)
    return l.append(alloc.fresh_block(branch.command.emits))


def enumerate_run_paths(
    g: SwarmProtocol, max_steps: int
) -> Iterator[Tuple[Tuple[ProtocolTransition, ...], Log]]:
    """All transition paths of length <= max_steps with their sequential logs."""

    def walk(state: str, path: Tuple[ProtocolTransition, ...], log: Log, alloc: SeqAllocator):
        yield path, log
        if len(path) == max_steps:
            return
        for t in g.branches(state):
            nxt = SeqAllocator(alloc.source, alloc.next_seq)
            yield from walk(t.target, path + (t,), log.append(nxt.fresh_block(t.command.emits)), nxt)

    yield from walk(g.initial, (), EMPTY_LOG, SeqAllocator(1))


def enumerate_runs(g: SwarmProtocol, max_steps: int) -> Set[LogType]:
    out: Set[LogType] = set()
    for path, _log in enumerate_run_paths(g, max_steps):
        out.add(tuple(t for tr in path for t in tr.command.emits))
    return out


def protocol_bisimilarity_classes(g: SwarmProtocol) -> Dict[str, int]:
    """Partition refinement over branch labels (role, command name, emits)."""
    states = sorted(g.states)
    seed: Dict[object, int] = {}
    blocks: Dict[str, int] = {}
    for s in states:
        key = frozenset((t.role, t.command) for t in g.branches(s))
        if key not in seed:
            seed[key] = len(seed)
        blocks[s] = seed[key]
    while True:
        order: Dict[object, int] = {}
        new: Dict[str, int] = {}
        for s in states:
            sig = (
                blocks[s],
                tuple(sorted(
                    (t.role, t.command.name, t.command.emits, blocks[t.target])
                    for t in g.branches(s)
                )),
            )
            if sig not in order:
                order[sig] = len(order)
            new[s] = order[sig]
        if new == blocks:
            return new
        blocks = new
