"""Parsing, validation and serialization of the tool's file formats.

Protocol, machine and subscription documents are JSON; logs are plain
text with one `source:seq:EventType` line per event; traces are JSON
bundles of initial configuration, steps and resulting global log.
Serialization is canonical (sorted keys, stable list orders) so repeated
runs produce byte-identical output.
"""

from __future__ import annotations

import json
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from .errors import DocumentError, InvalidLog, InvalidMachine, InvalidProtocol
from .eventlog import Event, EventId, Log
from .machine import CommandLabel, Machine
from .protocol import Subscription, SwarmProtocol, event_types
from .simulator import Step, Trace


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise DocumentError(msg)


def _str_field(obj: Mapping, key: str, where: str) -> str:
    _require(key in obj, f"{where}: missing field {key!r}")
    v = obj[key]
    _require(isinstance(v, str) and v != "", f"{where}: field {key!r} must be a nonempty string")
    return v


def _str_list(v, where: str) -> List[str]:
    _require(isinstance(v, list) and all(isinstance(x, str) and x for x in v),
             f"{where}: expected a list of nonempty strings")
    return list(v)


# -- protocol ----------------------------------------------------------------

def parse_protocol(obj) -> Tuple[str, SwarmProtocol]:
    _require(isinstance(obj, dict), "protocol document must be a JSON object")
    name = obj.get("name", "protocol")
    initial = _str_field(obj, "initial", "protocol")
    raw = obj.get("transitions")
    _require(isinstance(raw, list), "protocol: 'transitions' must be a list")
    transitions = []
    for i, t in enumerate(raw):
        where = f"protocol transition {i}"
        _require(isinstance(t, dict), f"{where}: must be an object")
        emits = _str_list(t.get("logType"), f"{where}: logType")
        _require(len(emits) > 0, f"{where}: logType must be nonempty")
        transitions.append((
            _str_field(t, "from", where),
            _str_field(t, "to", where),
            _str_field(t, "role", where),
            _str_field(t, "command", where),
            emits,
        ))
    try:
        return name, SwarmProtocol.build(initial, transitions)
    except InvalidProtocol as e:
        raise DocumentError(f"protocol does not validate: {e}") from e


def serialize_protocol(g: SwarmProtocol, name: str = "protocol") -> dict:
    return {
        "name": name,
        "initial": g.initial,
        "transitions": sorted(
            (
                {
                    "from": t.source,
                    "to": t.target,
                    "role": t.role,
                    "command": t.command.name,
                    "logType": list(t.command.emits),
                }
                for t in g.transitions
            ),
            key=lambda d: (d["from"], d["logType"][0]),
        ),
    }


# -- machine -----------------------------------------------------------------

def parse_machine(obj) -> Machine:
    _require(isinstance(obj, dict), "machine document must be a JSON object")
    initial = _str_field(obj, "initial", "machine")
    states = obj.get("states")
    _require(isinstance(states, dict), "machine: 'states' must be an object")
    transitions = []
    commands: Dict[str, List[CommandLabel]] = {}
    for sname, body in states.items():
        where = f"machine state {sname!r}"
        _require(isinstance(body, dict), f"{where}: must be an object")
        for c in body.get("commands", []):
            _require(isinstance(c, dict), f"{where}: command must be an object")
            emits = _str_list(c.get("logType"), f"{where}: command logType")
            _require(len(emits) > 0, f"{where}: command logType must be nonempty")
            commands.setdefault(sname, []).append(
                CommandLabel(_str_field(c, "name", where), tuple(emits))
            )
        trans = body.get("transitions", {})
        _require(isinstance(trans, dict), f"{where}: 'transitions' must be an object")
        for etype, target in trans.items():
            _require(isinstance(target, str) and target,
                     f"{where}: transition target must be a state name")
            transitions.append((sname, etype, target))
    declared = set(states)
    if declared:
        _require(initial in declared, "machine: initial must be a declared state")
        targets = {t for _, _, t in transitions}
        _require(targets <= declared,
                 "machine: transition targets must be declared states")
    try:
        return Machine.build(initial, transitions, commands)
    except InvalidMachine as e:
        raise DocumentError(f"machine does not validate: {e}") from e


def serialize_machine(m: Machine) -> dict:
    states: Dict[str, dict] = {}
    for s in sorted(m.states):
        body: Dict[str, object] = {}
        cmds = sorted(m.commands_at(s), key=lambda c: c.name)
        if cmds:
            body["commands"] = [
                {"name": c.name, "logType": list(c.emits)} for c in cmds
            ]
        trans = {t.etype: t.target for t in m.transitions if t.source == s}
        if trans:
            body["transitions"] = dict(sorted(trans.items()))
        states[s] = body
    return {"initial": m.initial, "states": states}


# -- subscription ------------------------------------------------------------

def parse_subscription(obj) -> Subscription:
    _require(isinstance(obj, dict), "subscription document must be a JSON object")
    mapping: Dict[str, List[str]] = {}
    for role, types in obj.items():
        lst = _str_list(types, f"subscription for role {role!r}")
        _require(len(set(lst)) == len(lst),
                 f"subscription for role {role!r} has duplicates")
        mapping[role] = lst
    return Subscription(mapping)


def serialize_subscription(sub: Subscription) -> dict:
    return {r: sorted(ts) for r, ts in sub.as_dict().items()}


# -- logs --------------------------------------------------------------------

def parse_log_lines(text: str, universe: Optional[Iterable[str]] = None) -> Log:
    allowed = frozenset(universe) if universe is not None else None
    events = []
    for ln, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split(":")
        _require(len(parts) == 3, f"log line {ln}: expected source:seq:EventType")
        src_s, seq_s, etype = parts
        _require(src_s.isdigit() and seq_s.isdigit(),
                 f"log line {ln}: source and seq must be naturals")
        _require(etype != "", f"log line {ln}: empty event type")
        if allowed is not None:
            _require(etype in allowed,
                     f"log line {ln}: unknown event type {etype!r}")
        events.append(Event(EventId(int(src_s), int(seq_s)), etype))
    try:
        return Log(tuple(events))
    except InvalidLog as e:
        raise DocumentError(f"log does not validate: {e}") from e


def serialize_log(l: Log) -> str:
    return "".join(f"{e.id.source}:{e.id.seq}:{e.etype}\n" for e in l)


def log_lines(l: Log) -> List[str]:
    return [f"{e.id.source}:{e.id.seq}:{e.etype}" for e in l]


# -- traces ------------------------------------------------------------------

def parse_trace(obj) -> Tuple[SwarmProtocol, Subscription, Trace]:
    _require(isinstance(obj, dict), "trace document must be a JSON object")
    init = obj.get("initial")
    _require(isinstance(init, dict), "trace: 'initial' must be an object")
    _, g = parse_protocol(init.get("protocol"))
    sub = parse_subscription(init.get("subscription"))
    roles_ = _str_list(init.get("roles"), "trace roles")
    steps = []
    raw_steps = obj.get("steps", [])
    _require(isinstance(raw_steps, list), "trace: 'steps' must be a list")
    for i, st in enumerate(raw_steps):
        where = f"trace step {i}"
        _require(isinstance(st, dict), f"{where}: must be an object")
        kind = _str_field(st, "kind", where)
        _require(kind in ("local", "prop"), f"{where}: kind must be local or prop")
        member = st.get("member")
        _require(isinstance(member, int) and member >= 0,
                 f"{where}: member must be a natural")
        if kind == "local":
            cmd = _str_field(st, "command", where)
            inter = st.get("interleaving", 0)
            _require(isinstance(inter, int) and inter >= 0,
                     f"{where}: interleaving must be a natural")
            steps.append(Step("local", member, cmd, inter))
        else:
            vec = st.get("vector")
            _require(isinstance(vec, dict), f"{where}: vector must be an object")
            pairs = []
            for src, seq in vec.items():
                _require(str(src).isdigit() and isinstance(seq, int) and seq >= 0,
                         f"{where}: vector entries must be naturals")
                pairs.append((int(src), seq))
            steps.append(Step(
                "prop", member,
                vector=tuple(sorted((s, q) for s, q in pairs if q > 0)),
            ))
    universe = event_types(g) | {t for ts in sub.as_dict().values() for t in ts}
    global_log = parse_log_lines("\n".join(obj.get("global", [])), universe)
    return g, sub, Trace(tuple(roles_), tuple(steps), global_log)


def serialize_trace(
    g: SwarmProtocol, sub: Subscription, trace: Trace, name: str = "protocol"
) -> dict:
    steps = []
    for st in trace.steps:
        if st.kind == "local":
            steps.append({
                "kind": "local",
                "member": st.member,
                "command": st.command,
                "interleaving": st.interleaving,
            })
        else:
            steps.append({
                "kind": "prop",
                "member": st.member,
                "vector": {str(src): seq for src, seq in (st.vector or ())},
            })
    return {
        "initial": {
            "protocol": serialize_protocol(g, name),
            "subscription": serialize_subscription(sub),
            "roles": list(trace.roles),
        },
        "steps": steps,
        "global": log_lines(trace.global_log),
    }


# -- DOT export --------------------------------------------------------------

def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def dot_protocol(g: SwarmProtocol, name: str = "protocol") -> str:
    lines = [f'digraph "{_dot_escape(name)}" {{', "  rankdir=LR;"]
    lines.append(f'  __start [shape=point, label=""];')
    for s in sorted(g.states):
        lines.append(f'  "{_dot_escape(s)}" [shape=circle];')
    lines.append(f'  __start -> "{_dot_escape(g.initial)}";')
    for t in sorted(g.transitions, key=lambda t: (t.source, t.guard)):
        label = f"{t.command.name}@{t.role}<{','.join(t.command.emits)}>"
        lines.append(
            f'  "{_dot_escape(t.source)}" -> "{_dot_escape(t.target)}" '
            f'[label="{_dot_escape(label)}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def dot_machine(m: Machine, name: str = "machine") -> str:
    lines = [f'digraph "{_dot_escape(name)}" {{', "  rankdir=LR;"]
    lines.append(f'  __start [shape=point, label=""];')
    for s in sorted(m.states):
        lines.append(f'  "{_dot_escape(s)}" [shape=circle];')
    lines.append(f'  __start -> "{_dot_escape(m.initial)}";')
    for s in sorted(m.states):
        # commands render as self-loops labeled name/types
        for c in sorted(m.commands_at(s), key=lambda c: c.name):
            label = f"{c.name}/{','.join(c.emits)}"
            lines.append(
                f'  "{_dot_escape(s)}" -> "{_dot_escape(s)}" '
                f'[label="{_dot_escape(label)}", style=dashed];'
            )
    for t in sorted(m.transitions, key=lambda t: (t.source, t.etype)):
        lines.append(
            f'  "{_dot_escape(t.source)}" -> "{_dot_escape(t.target)}" '
            f'[label="{_dot_escape(t.etype + "?")}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
