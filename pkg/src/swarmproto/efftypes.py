"""Effective types, log equivalence, eventual fidelity and admissibility.

The effective type of a log is the sequence of event types a swarm
actually interprets: guards chosen at protocol states plus the block
tails some currently-active role observes.  A log is faithful when the
fold ends with no block half-consumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Set, Tuple

from .errors import BoundExceeded
from .eventlog import EventType, Log, LogType, filter_log_type
from .protocol import (
    ProtocolConfig,
    ProtocolTransition,
    Subscription,
    SwarmProtocol,
    active_roles,
    roles,
)

FAITHFUL = "Faithful"
PENDING = "Pending"


@dataclass(frozen=True)
class EffTypeResult:
    etype: LogType
    final_config: ProtocolConfig
    # transitions taken during the fold, in order
    path: Tuple[ProtocolTransition, ...] = ()


def _pending_filter(g: SwarmProtocol, branch: ProtocolTransition, sub: Subscription) -> LogType:
    observers: FrozenSet[str] = active_roles(g, branch.target)
    observed: Set[EventType] = set()
    for r in observers:
        observed |= sub(r)
    return filter_log_type(branch.command.emits[1:], observed)


def effective_type(l: Log, g: SwarmProtocol, sub: Subscription) -> EffTypeResult:
    state = g.initial
    pending: LogType = ()
    out: List[EventType] = []
    path: List[ProtocolTransition] = []
    for e in l:
        if pending:
            if e.etype == pending[0]:
                out.append(e.etype)
                pending = pending[1:]
            continue
        branch = g.branch_by_guard(state, e.etype)
        if branch is None:
            continue
        subscribed = any(e.etype in sub(r) for r in roles(g, state, sub))
        if not subscribed:
            continue
        out.append(e.etype)
        path.append(branch)
        state = branch.target
        pending = _pending_filter(g, branch, sub)
    return EffTypeResult(tuple(out), ProtocolConfig(state, pending), tuple(path))


def log_equivalent(l1: Log, l2: Log, g: SwarmProtocol, sub: Subscription) -> bool:
    return effective_type(l1, g, sub).etype == effective_type(l2, g, sub).etype


@dataclass(frozen=True)
class FidelityVerdict:
    status: str  # FAITHFUL or PENDING
    witness: Tuple[ProtocolTransition, ...] = ()
    remainder: LogType = ()

    def __bool__(self) -> bool:
        return self.status == FAITHFUL


def check_fidelity(l: Log, g: SwarmProtocol, sub: Subscription) -> FidelityVerdict:
    res = effective_type(l, g, sub)
    if not res.final_config.pending:
        return FidelityVerdict(FAITHFUL, res.path)
    # the last block is half-consumed; only complete blocks are witnessed
    return FidelityVerdict(PENDING, res.path[:-1], res.final_config.pending)


def admissibility_oracle(
    l: Log, g: SwarmProtocol, sub: Subscription, bound: int, node_cap: int = 200_000
) -> bool:
    """Can l be decomposed into emission blocks of at most `bound` consistent runs?

    Consistent runs form a tree of protocol transitions: shared prefixes
    are shared invocations, divergence points are concurrent choices.
    Each tree edge must claim an index-increasing group of l's events
    whose types equal the transition's emitted sequence, all events
    claimed exactly once.  Event identity (sources) is not inspected.
    """
    n = len(l)
    etypes = tuple(e.etype for e in l)
    nodes_seen = 0

    # leaves: protocol states of the open tree tips; used: bitmask over l
    def search(leaves: Tuple[str, ...], used: int) -> bool:
        nonlocal nodes_seen
        nodes_seen += 1
        if nodes_seen > node_cap:
            raise BoundExceeded(
                f"admissibility search exceeded {node_cap} nodes"
            )
        if used == (1 << n) - 1:
            return True
        # extend the lexicographically first leaf deterministically enough:
        # try extending each leaf, and also splitting a leaf by taking a
        # branch while keeping the leaf available for another run
        for li, state in enumerate(leaves):
            for t in g.branches(state):
                for mask in _block_masks(etypes, t.command.emits, used):
                    # extend this run
                    nxt = leaves[:li] + (t.target,) + leaves[li + 1:]
                    if search(nxt, used | mask):
                        return True
                    # fork: keep this tip as a separate (shorter) run
                    if len(leaves) < bound:
                        forked = leaves + (t.target,)
                        if search(forked, used | mask):
                            return True
        return False

    return search((g.initial,), 0)


def _block_masks(etypes: Tuple[EventType, ...], emits: LogType, used: int) -> List[int]:
    """Bitmasks of index-increasing unused positions spelling out `emits`."""
    out: List[int] = []

    def rec(k: int, start: int, mask: int) -> None:
        if k == len(emits):
            out.append(mask)
            return
        for i in range(start, len(etypes)):
            if not (used >> i) & 1 and not (mask >> i) & 1 and etypes[i] == emits[k]:
                rec(k + 1, i + 1, mask | (1 << i))

    rec(0, 0, 0)
    return out
