"""Well-formedness of a protocol/subscription pair.

Four checks: log-determinism, causal consistency, determinacy and
confusion-freeness.  Each failure yields a diagnostic pinpointing the
state, branch and role or event type that witnesses it.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple

from .eventlog import EventType
from .protocol import (
    ProtocolTransition,
    Subscription,
    SwarmProtocol,
    active_roles,
    check_log_determinism,
    event_types,
    guards,
    protocol_bisimilarity_classes,
    roles,
)

LOG_DETERMINISM = "LogDeterminism"
CAUSAL_CONSISTENCY_1 = "CausalConsistency1"
CAUSAL_CONSISTENCY_2 = "CausalConsistency2"
DETERMINACY = "Determinacy"
CONFUSION_FREENESS = "ConfusionFreeness"


@dataclass(frozen=True)
class WfDiagnostic:
    rule: str
    state: Optional[str] = None
    branch: Optional[str] = None  # command name of the offending transition
    role: Optional[str] = None
    etype: Optional[EventType] = None
    detail: str = ""


def _reachable_in_order(g: SwarmProtocol) -> List[str]:
    seen = {g.initial}
    order = [g.initial]
    queue = deque([g.initial])
    while queue:
        s = queue.popleft()
        for t in g.branches(s):
            if t.target not in seen:
                seen.add(t.target)
                order.append(t.target)
                queue.append(t.target)
    return order


def check_causal_consistency(g: SwarmProtocol, sub: Subscription) -> List[WfDiagnostic]:
    out: List[WfDiagnostic] = []
    for s in _reachable_in_order(g):
        for t in g.branches(s):
            emitted = frozenset(t.command.emits)
            if not emitted & sub(t.role):
                out.append(WfDiagnostic(
                    CAUSAL_CONSISTENCY_1, s, t.command.name, t.role,
                    detail=(
                        f"role {t.role!r} invokes {t.command.name!r} but observes "
                        f"none of its emitted event types"
                    ),
                ))
            cont_roles = roles(g, t.target, sub)
            for r in sorted(active_roles(g, t.target)):
                seen_by_r = emitted & sub(r)
                if not seen_by_r:
                    out.append(WfDiagnostic(
                        CAUSAL_CONSISTENCY_2, s, t.command.name, r,
                        detail=(
                            f"role {r!r} must choose after {t.command.name!r} "
                            f"but observes none of its emitted event types"
                        ),
                    ))
                    continue
                for r2 in sorted(cont_roles):
                    missing = sorted((emitted & sub(r2)) - seen_by_r)
                    if missing:
                        out.append(WfDiagnostic(
                            CAUSAL_CONSISTENCY_2, s, t.command.name, r,
                            etype=missing[0],
                            detail=(
                                f"role {r2!r} observes {missing} from "
                                f"{t.command.name!r} which deciding role {r!r} "
                                f"does not; {r!r} must subscribe to the event "
                                f"type {missing[0]!r}"
                            ),
                        ))
    return out


def check_determinacy(g: SwarmProtocol, sub: Subscription) -> List[WfDiagnostic]:
    out: List[WfDiagnostic] = []
    for s in _reachable_in_order(g):
        for t in g.branches(s):
            for r in sorted(roles(g, t.target, sub)):
                if t.guard not in sub(r):
                    out.append(WfDiagnostic(
                        DETERMINACY, s, t.command.name, r, t.guard,
                        detail=(
                            f"role {r!r} is involved after {t.command.name!r} "
                            f"but does not observe its guard {t.guard!r}"
                        ),
                    ))
    return out


@dataclass(frozen=True)
class InvarianceVerdict:
    ok: bool
    etype: EventType
    # representative states, one per bisimilarity class emitting the type
    states: Tuple[str, ...] = ()


def check_invariance(g: SwarmProtocol, etype: EventType) -> InvarianceVerdict:
    if etype not in event_types(g):
        return InvarianceVerdict(True, etype)
    classes = protocol_bisimilarity_classes(g)
    reps: Dict[int, str] = {}
    for s in _reachable_in_order(g):
        for t in g.branches(s):
            if etype in t.command.emits:
                reps.setdefault(classes[s], s)
    states = tuple(reps[c] for c in sorted(reps))
    return InvarianceVerdict(len(states) <= 1, etype, states)


def check_confusion_freeness(g: SwarmProtocol) -> List[WfDiagnostic]:
    out: List[WfDiagnostic] = []
    for t in sorted(guards(g)):
        v = check_invariance(g, t)
        if not v.ok:
            out.append(WfDiagnostic(
                CONFUSION_FREENESS, v.states[0], etype=t,
                detail=(
                    f"guard {t!r} is emitted from non-bisimilar states "
                    f"{list(v.states)}; a consumer cannot tell which choice it "
                    "witnesses"
                ),
            ))
    return out


@dataclass(frozen=True)
class WfReport:
    ok: bool
    diagnostics: Tuple[WfDiagnostic, ...]


def check_well_formed(g: SwarmProtocol, sub: Subscription) -> WfReport:
    diags: List[WfDiagnostic] = []
    ld = check_log_determinism(g)
    if not ld.ok:
        diags.append(WfDiagnostic(
            LOG_DETERMINISM, ld.state, etype=ld.etype,
            detail=f"two branches at {ld.state!r} share guard {ld.etype!r}",
        ))
    diags.extend(check_causal_consistency(g, sub))
    diags.extend(check_determinacy(g, sub))
    diags.extend(check_confusion_freeness(g))
    return WfReport(not diags, tuple(diags))
