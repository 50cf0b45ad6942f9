"""Projection of a swarm protocol onto one role under a subscription.

A protocol state where the role neither acts nor observes anything
downstream projects to the terminal machine; otherwise the role's own
branches become commands and each branch contributes an input chain
consuming the emitted types the role subscribes to.
"""

from __future__ import annotations

from collections import deque
from typing import Dict, List, Set, Tuple

from .errors import NondeterministicProjection, NotProjectable
from .eventlog import EventType, filter_log_type
from .machine import CommandLabel, Machine, minimize
from .protocol import Subscription, SwarmProtocol, roles

_ZERO = "zero"


def project(g: SwarmProtocol, r: str, sub: Subscription) -> Machine:
    involved: Dict[str, bool] = {
        s: r in roles(g, s, sub) for s in g.reachable_states()
    }

    def name(s: str) -> str:
        return f"st:{s}" if involved[s] else _ZERO

    transitions: List[Tuple[str, EventType, str]] = []
    commands: Dict[str, List[CommandLabel]] = {}
    seen: Set[str] = {g.initial}
    queue = deque([g.initial])
    while queue:
        s = queue.popleft()
        for t in g.branches(s):
            if t.target not in seen:
                seen.add(t.target)
                queue.append(t.target)
        if not involved[s]:
            continue
        sname = name(s)
        commands[sname] = [t.command for t in g.branches(s) if t.role == r]
        heads: Set[EventType] = set()
        for idx, t in enumerate(g.branches(s)):
            filtered = filter_log_type(t.command.emits, sub(r))
            tname = name(t.target)
            if not filtered:
                if tname == _ZERO:
                    # unobservable branch into a state the role has left
                    continue
                raise NotProjectable(
                    s,
                    t.command.name,
                    f"role {r!r} observes none of {t.command.emits!r} "
                    "but stays involved in the continuation",
                )
            if filtered[0] in heads:
                raise NondeterministicProjection(s, filtered[0])
            heads.add(filtered[0])
            cur = sname
            for k in range(len(filtered) - 1):
                nxt = f"ch:{s}:{idx}:{k}"
                transitions.append((cur, filtered[k], nxt))
                cur = nxt
            transitions.append((cur, filtered[-1], tname))
    raw = Machine.build(name(g.initial), transitions, commands)
    return minimize(raw)
