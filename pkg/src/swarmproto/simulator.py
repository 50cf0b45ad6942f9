"""Operational semantics of swarms: command invocation and propagation.

A swarm state is a global log plus, per member, the prefix vector
identifying its local sublog.  Local rule: a member appends a freshly
emitted block to its local log and the result is merged into the global
log at a chosen interleaving.  Prop rule: a member's vector grows toward
the global one.  Exploration enumerates both rules exhaustively or
samples random traces, with pluggable monitors.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field, replace
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .efftypes import FAITHFUL, check_fidelity
from .errors import (
    CommandNotEnabled,
    InterleavingOutOfRange,
    NoProgress,
    ReplayDivergence,
    VectorOutOfRange,
)
from .eventlog import (
    EMPTY_LOG,
    Log,
    is_sublog,
    merge,
    prefix_vector,
    restrict_to_vector,
)
from .machine import Machine, SeqAllocator
from .projection import project
from .protocol import Subscription, SwarmProtocol

COHERENCE = "coherence"
FIDELITY = "fidelity"
DEADLOCK = "deadlock"
DEFAULT_MONITORS = (COHERENCE, FIDELITY)

Vector = Tuple[Tuple[int, int], ...]  # sorted (source, seq) pairs, seq > 0


def _as_vector(v: Mapping[int, int]) -> Vector:
    return tuple(sorted((s, q) for s, q in v.items() if q > 0))


@dataclass(frozen=True)
class Member:
    machine: Machine
    role: str


@dataclass(frozen=True)
class Realisation:
    protocol: SwarmProtocol
    subscription: Subscription = field(compare=False)
    members: Tuple[Member, ...] = ()
    complete: bool = False


@dataclass(frozen=True)
class SwarmState:
    realisation: Realisation
    global_log: Log = EMPTY_LOG
    vectors: Tuple[Vector, ...] = ()
    # per source, end seq of every emission block, for --atomic-prop
    block_ends: Tuple[Tuple[int, Tuple[int, ...]], ...] = ()

    def key(self):
        return (
            tuple((e.id, e.etype) for e in self.global_log),
            self.vectors,
            self.block_ends,
        )

    def local_log(self, i: int) -> Log:
        return restrict_to_vector(self.global_log, dict(self.vectors[i]))

    def member_state(self, i: int) -> str:
        return self.realisation.members[i].machine.delta(self.local_log(i))

    def saturated(self) -> bool:
        top = _as_vector(prefix_vector(self.global_log))
        return all(v == top for v in self.vectors)


@dataclass(frozen=True)
class Step:
    kind: str  # "local" or "prop"
    member: int
    command: Optional[str] = None
    interleaving: Optional[int] = None
    vector: Optional[Vector] = None


@dataclass(frozen=True)
class Trace:
    roles: Tuple[str, ...]
    steps: Tuple[Step, ...]
    global_log: Log


def new_realisation(g: SwarmProtocol, sub: Subscription, roles_: Sequence[str]) -> SwarmState:
    members = tuple(Member(project(g, r, sub), r) for r in roles_)
    protocol_roles = {t.role for t in g.transitions}
    real = Realisation(g, sub, members, protocol_roles <= set(roles_))
    return SwarmState(real, EMPTY_LOG, tuple(() for _ in members), ())


def step_local(s: SwarmState, i: int, cmd: str, interleaving: int) -> SwarmState:
    member = s.realisation.members[i]
    local = s.local_log(i)
    label = next(
        (c for c in member.machine.enabled_commands(local) if c.name == cmd), None
    )
    if label is None:
        raise CommandNotEnabled(f"member {i}: command {cmd!r} not enabled")
    source = i + 1
    next_seq = prefix_vector(s.global_log).get(source, 0) + 1
    block = SeqAllocator(source, next_seq).fresh_block(label.emits)
    new_local = local.append(block)
    options = merge(s.global_log, new_local)
    if not 0 <= interleaving < len(options):
        raise InterleavingOutOfRange(
            f"interleaving {interleaving} of {len(options)}"
        )
    ends = dict(s.block_ends)
    ends[source] = ends.get(source, ()) + (next_seq + len(block) - 1,)
    vectors = list(s.vectors)
    vectors[i] = _as_vector(prefix_vector(new_local))
    return replace(
        s,
        global_log=options[interleaving],
        vectors=tuple(vectors),
        block_ends=tuple(sorted(ends.items())),
    )


def step_prop(s: SwarmState, i: int, target: Mapping[int, int]) -> SwarmState:
    gv = prefix_vector(s.global_log)
    cur = dict(s.vectors[i])
    tgt = {src: q for src, q in target.items() if q > 0}
    for src, q in tgt.items():
        if q > gv.get(src, 0):
            raise VectorOutOfRange(f"source {src}: seq {q} beyond global")
    for src, q in cur.items():
        if tgt.get(src, 0) < q:
            raise VectorOutOfRange(f"source {src}: propagation cannot retract")
    if _as_vector(tgt) == _as_vector(cur):
        raise NoProgress("target vector equals the member's current vector")
    vectors = list(s.vectors)
    vectors[i] = _as_vector(tgt)
    return replace(s, vectors=tuple(vectors))


def saturate(s: SwarmState) -> SwarmState:
    top = _as_vector(prefix_vector(s.global_log))
    return replace(s, vectors=tuple(top for _ in s.vectors))


def apply_step(s: SwarmState, step: Step) -> SwarmState:
    if step.kind == "local":
        return step_local(s, step.member, step.command, step.interleaving)
    if step.kind == "prop":
        return step_prop(s, step.member, dict(step.vector or ()))
    raise ValueError(f"unknown step kind {step.kind!r}")


def _prop_targets(s: SwarmState, i: int, atomic: bool) -> List[Vector]:
    gv = prefix_vector(s.global_log)
    cur = dict(s.vectors[i])
    sources = sorted(gv)
    choices: List[List[int]] = []
    ends = dict(s.block_ends)
    for src in sources:
        lo, hi = cur.get(src, 0), gv[src]
        if atomic:
            allowed = [q for q in ends.get(src, ()) if lo <= q <= hi]
            vals = sorted({lo, *allowed})
        else:
            vals = list(range(lo, hi + 1))
        choices.append(vals)
    out: List[Vector] = []
    for combo in product(*choices):
        v = _as_vector(dict(zip(sources, combo)))
        if v != s.vectors[i]:
            out.append(v)
    return out


def enumerate_successors(
    s: SwarmState, atomic_prop: bool = False
) -> List[Tuple[Step, SwarmState]]:
    out: List[Tuple[Step, SwarmState]] = []
    for i, member in enumerate(s.realisation.members):
        local = s.local_log(i)
        for label in sorted(member.machine.enabled_commands(local), key=lambda c: c.name):
            k = 0
            while True:
                try:
                    nxt = step_local(s, i, label.name, k)
                except InterleavingOutOfRange:
                    break
                out.append((Step("local", i, label.name, k), nxt))
                k += 1
    for i in range(len(s.realisation.members)):
        for v in _prop_targets(s, i, atomic_prop):
            nxt = step_prop(s, i, dict(v))
            out.append((Step("prop", i, vector=v), nxt))
    return out


@dataclass(frozen=True)
class Violation:
    monitor: str
    detail: str
    trace: Trace


@dataclass(frozen=True)
class ExplorationReport:
    mode: str
    depth: int
    visited: int
    violations: Tuple[Violation, ...]
    capped: bool = False
    globals_seen: Tuple[Log, ...] = ()
    trace: Optional[Trace] = None  # random mode only


def check_coherence(s: SwarmState) -> Optional[str]:
    union = set()
    for i in range(len(s.realisation.members)):
        local = s.local_log(i)
        if not is_sublog(local, s.global_log):
            return f"member {i}: local log is not a sublog of the global log"
        union |= local.ids()
    if union != s.global_log.ids():
        return "global log contains events beyond the union of local logs"
    return None


def _check_monitors(
    s: SwarmState,
    monitors: Iterable[str],
    successors: Optional[List] = None,
    atomic_prop: bool = False,
) -> List[Tuple[str, str]]:
    found: List[Tuple[str, str]] = []
    monitors = set(monitors)
    if COHERENCE in monitors:
        detail = check_coherence(s)
        if detail:
            found.append((COHERENCE, detail))
    if FIDELITY in monitors:
        verdict = check_fidelity(
            s.global_log, s.realisation.protocol, s.realisation.subscription
        )
        if verdict.status != FAITHFUL:
            found.append((
                FIDELITY,
                f"global log pending block remainder {list(verdict.remainder)}",
            ))
    if DEADLOCK in monitors:
        succ = successors
        if succ is None:
            succ = enumerate_successors(s, atomic_prop)
        if not succ:
            stuck = [
                i
                for i in range(len(s.realisation.members))
                if not s.realisation.members[i].machine.is_terminal(s.member_state(i))
            ]
            if stuck:
                found.append((
                    DEADLOCK,
                    f"no step possible but members {stuck} are not terminal",
                ))
    return found


def explore(
    s: SwarmState,
    depth: int,
    mode: str = "exhaustive",
    seed: int = 0,
    monitors: Iterable[str] = DEFAULT_MONITORS,
    atomic_prop: bool = False,
    node_cap: int = 500_000,
) -> ExplorationReport:
    monitors = tuple(monitors)
    if mode == "random":
        return _explore_random(s, depth, seed, monitors, atomic_prop)

    violations: List[Violation] = []
    globals_seen: List[Log] = []
    global_keys: Set[tuple] = set()
    roles_ = tuple(m.role for m in s.realisation.members)
    seen = {s.key()}
    queue = deque([(s, (), 0)])
    visited = 0
    capped = False
    while queue:
        cur, path, d = queue.popleft()
        visited += 1
        if visited > node_cap:
            capped = True
            break
        gk = tuple((e.id, e.etype) for e in cur.global_log)
        if gk not in global_keys:
            global_keys.add(gk)
            globals_seen.append(cur.global_log)
        expand = d < depth
        succ = (
            enumerate_successors(cur, atomic_prop)
            if expand or DEADLOCK in monitors
            else None
        )
        for mon, detail in _check_monitors(cur, monitors, succ, atomic_prop):
            violations.append(Violation(
                mon, detail, Trace(roles_, tuple(path), cur.global_log)
            ))
        if expand:
            for step, nxt in succ:
                k = nxt.key()
                if k not in seen:
                    seen.add(k)
                    queue.append((nxt, path + (step,), d + 1))
    return ExplorationReport(
        "exhaustive", depth, visited, tuple(violations), capped, tuple(globals_seen)
    )


def _explore_random(
    s: SwarmState,
    depth: int,
    seed: int,
    monitors: Tuple[str, ...],
    atomic_prop: bool,
) -> ExplorationReport:
    rng = random.Random(seed)
    roles_ = tuple(m.role for m in s.realisation.members)
    violations: List[Violation] = []
    globals_seen: List[Log] = [s.global_log]
    path: Tuple[Step, ...] = ()
    cur = s
    visited = 1

    def check(state: SwarmState, succ) -> None:
        for mon, detail in _check_monitors(state, monitors, succ, atomic_prop):
            violations.append(Violation(
                mon, detail, Trace(roles_, path, state.global_log)
            ))

    succ = enumerate_successors(cur, atomic_prop)
    check(cur, succ)
    for _ in range(depth):
        if not succ:
            break
        step, cur = succ[rng.randrange(len(succ))]
        path = path + (step,)
        visited += 1
        if cur.global_log != globals_seen[-1]:
            globals_seen.append(cur.global_log)
        succ = enumerate_successors(cur, atomic_prop)
        check(cur, succ)
    trace = Trace(roles_, path, cur.global_log)
    return ExplorationReport(
        "random", depth, visited, tuple(violations), False, tuple(globals_seen), trace
    )


def replay(g: SwarmProtocol, sub: Subscription, trace: Trace) -> SwarmState:
    s = new_realisation(g, sub, trace.roles)
    for step in trace.steps:
        s = apply_step(s, step)
    if s.global_log != trace.global_log:
        raise ReplayDivergence(
            "recomputed global log differs from the recorded one"
        )
    return s
