"""Deterministic machines (local types) as finite automata.

Commands are attached to states as self-loop capabilities; only event
consumption changes state.  The transition function drops events the
current state has no edge for, so it is total on every log.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from .errors import CommandNotEnabled, InvalidMachine, UnknownState
from .eventlog import Event, EventId, EventType, Log, LogType


@dataclass(frozen=True)
class CommandLabel:
    name: str
    emits: LogType

    def __post_init__(self):
        if not self.emits:
            raise InvalidMachine(f"command {self.name!r} emits no events")


@dataclass(frozen=True)
class MachineTransition:
    source: str
    etype: EventType
    target: str


@dataclass(frozen=True)
class DeterminismVerdict:
    ok: bool
    state: Optional[str] = None
    etype: Optional[EventType] = None


@dataclass(frozen=True)
class Machine:
    initial: str
    transitions: Tuple[MachineTransition, ...]
    # (state, label) pairs; a state may carry several distinctly named commands
    commands: Tuple[Tuple[str, CommandLabel], ...] = ()

    @classmethod
    def build(
        cls,
        initial: str,
        transitions: Iterable[Tuple[str, EventType, str]],
        commands: Mapping[str, Iterable[CommandLabel]] | None = None,
    ) -> "Machine":
        trans = tuple(MachineTransition(s, t, q) for s, t, q in transitions)
        cmds: List[Tuple[str, CommandLabel]] = []
        for state, labels in sorted((commands or {}).items()):
            labels = sorted(labels, key=lambda c: c.name)
            names = [c.name for c in labels]
            if len(set(names)) != len(names):
                raise InvalidMachine(f"duplicate command name at state {state!r}")
            cmds.extend((state, c) for c in labels)
        m = cls(initial, trans, tuple(cmds))
        verdict = check_deterministic(m)
        if not verdict.ok:
            raise InvalidMachine(
                f"state {verdict.state!r} has two transitions on {verdict.etype!r}"
            )
        unreachable = m.states - m.reachable_states()
        if unreachable:
            raise InvalidMachine(f"unreachable states: {sorted(unreachable)}")
        return m

    @cached_property
    def states(self) -> FrozenSet[str]:
        out = {self.initial}
        for t in self.transitions:
            out.add(t.source)
            out.add(t.target)
        out.update(state for state, _ in self.commands)
        return frozenset(out)

    @cached_property
    def _trans_map(self) -> Dict[Tuple[str, EventType], str]:
        return {(t.source, t.etype): t.target for t in self.transitions}

    @cached_property
    def _cmd_map(self) -> Dict[str, Tuple[CommandLabel, ...]]:
        out: Dict[str, List[CommandLabel]] = {}
        for state, label in self.commands:
            out.setdefault(state, []).append(label)
        return {s: tuple(ls) for s, ls in out.items()}

    def reachable_states(self) -> FrozenSet[str]:
        seen = {self.initial}
        queue = deque([self.initial])
        succ: Dict[str, List[str]] = {}
        for t in self.transitions:
            succ.setdefault(t.source, []).append(t.target)
        while queue:
            s = queue.popleft()
            for q in succ.get(s, ()):
                if q not in seen:
                    seen.add(q)
                    queue.append(q)
        return frozenset(seen)

    def ready(self, state: str) -> FrozenSet[EventType]:
        if state not in self.states:
            raise UnknownState(state)
        return frozenset(t.etype for t in self.transitions if t.source == state)

    def commands_at(self, state: str) -> FrozenSet[CommandLabel]:
        if state not in self.states:
            raise UnknownState(state)
        return frozenset(self._cmd_map.get(state, ()))

    def step(self, state: str, etype: EventType) -> Optional[str]:
        return self._trans_map.get((state, etype))

    def delta(self, log: Log, start: Optional[str] = None) -> str:
        """Fold the log from `start` (default: initial), dropping unmatched events."""
        state = self.initial if start is None else start
        for e in log:
            nxt = self._trans_map.get((state, e.etype))
            if nxt is not None:
                state = nxt
        return state

    def enabled_commands(self, log: Log) -> FrozenSet[CommandLabel]:
        return self.commands_at(self.delta(log))

    def invoke(self, local: Log, cmd: str, alloc: "SeqAllocator") -> Log:
        for label in self.enabled_commands(local):
            if label.name == cmd:
                return local.append(alloc.fresh_block(label.emits))
        raise CommandNotEnabled(f"command {cmd!r} not enabled")

    def is_terminal(self, state: str) -> bool:
        return not self.ready(state) and not self.commands_at(state)

    def at(self, state: str) -> "Machine":
        """The sub-machine rooted at `state` (reachability-restricted)."""
        if state not in self.states:
            raise UnknownState(state)
        keep = Machine(state, self.transitions, self.commands).reachable_states()
        return Machine(
            state,
            tuple(t for t in self.transitions if t.source in keep),
            tuple(sc for sc in self.commands if sc[0] in keep),
        )


class SeqAllocator:
    """Allocates consecutive per-source sequence numbers for fresh events.

    Confined to a single simulation run; never share across concurrent runs.
    """

    def __init__(self, source: int, next_seq: int = 1):
        self.source = source
        self.next_seq = next_seq

    def fresh_block(self, emits: LogType) -> Tuple[Event, ...]:
        block = []
        for etype in emits:
            block.append(Event(EventId(self.source, self.next_seq), etype))
            self.next_seq += 1
        return tuple(block)


def check_deterministic(m: Machine) -> DeterminismVerdict:
    seen = set()
    for t in m.transitions:
        key = (t.source, t.etype)
        if key in seen:
            return DeterminismVerdict(False, t.source, t.etype)
        seen.add(key)
    return DeterminismVerdict(True)


@dataclass(frozen=True)
class EquivalenceResult:
    equivalent: bool
    # shortest distinguishing event-type sequence, when not equivalent
    counterexample: Optional[LogType] = None

    def __bool__(self) -> bool:
        return self.equivalent


def equivalent(m1: Machine, m2: Machine) -> EquivalenceResult:
    """Bisimilarity of deterministic machines, state names immaterial.

    Related states must carry equal command-label sets and matching outgoing
    event types with related successors; BFS yields a shortest witness.
    """
    start = (m1.initial, m2.initial)
    seen = {start}
    queue = deque([(start, ())])
    while queue:
        (s1, s2), path = queue.popleft()
        if m1.commands_at(s1) != m2.commands_at(s2):
            return EquivalenceResult(False, tuple(path))
        r1, r2 = m1.ready(s1), m2.ready(s2)
        if r1 != r2:
            return EquivalenceResult(False, tuple(path))
        for etype in sorted(r1):
            pair = (m1.step(s1, etype), m2.step(s2, etype))
            if pair not in seen:
                seen.add(pair)
                queue.append((pair, path + (etype,)))
    return EquivalenceResult(True)


def _refine(blocks: Dict[str, int], signature) -> Dict[str, int]:
    while True:
        sigs = {s: (blocks[s], signature(s, blocks)) for s in blocks}
        order: Dict[object, int] = {}
        new: Dict[str, int] = {}
        for s in blocks:  # insertion order keeps numbering deterministic
            sig = sigs[s]
            if sig not in order:
                order[sig] = len(order)
            new[s] = order[sig]
        if new == blocks:
            return new
        blocks = new


def bisimilarity_classes(m: Machine) -> Dict[str, int]:
    """Partition refinement over (command set, outgoing edges)."""
    states = sorted(m.states)
    seed: Dict[object, int] = {}
    blocks: Dict[str, int] = {}
    for s in states:
        key = (m.commands_at(s), m.ready(s))
        if key not in seed:
            seed[key] = len(seed)
        blocks[s] = seed[key]

    def signature(s: str, b: Dict[str, int]):
        return tuple(sorted((t, b[m.step(s, t)]) for t in m.ready(s)))

    return _refine(blocks, signature)


def minimize(m: Machine) -> Machine:
    """Merge bisimilar states; restrict to the reachable part."""
    reach = m.reachable_states()
    sub = Machine(
        m.initial,
        tuple(t for t in m.transitions if t.source in reach and t.target in reach),
        tuple(sc for sc in m.commands if sc[0] in reach),
    )
    classes = bisimilarity_classes(sub)

    # name blocks by BFS discovery order for stable output
    names: Dict[int, str] = {}

    def name_of(block: int) -> str:
        if block not in names:
            names[block] = f"s{len(names)}"
        return names[block]

    rep: Dict[int, str] = {}
    order = deque([sub.initial])
    seen = {sub.initial}
    initial_name = name_of(classes[sub.initial])
    rep[classes[sub.initial]] = sub.initial
    transitions = []
    commands: Dict[str, List[CommandLabel]] = {}
    edges_done = set()
    while order:
        s = order.popleft()
        b = classes[s]
        if rep.setdefault(b, s) != s:
            continue
        sname = name_of(b)
        commands.setdefault(sname, sorted(sub.commands_at(s), key=lambda c: c.name))
        for etype in sorted(sub.ready(s)):
            q = sub.step(s, etype)
            qname = name_of(classes[q])
            if (sname, etype) not in edges_done:
                edges_done.add((sname, etype))
                transitions.append((sname, etype, qname))
            if q not in seen:
                seen.add(q)
                order.append(q)
    return Machine.build(initial_name, transitions, commands)
