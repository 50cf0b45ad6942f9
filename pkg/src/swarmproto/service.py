"""HTTP service exposing the workbench operations.

Every endpoint takes the JSON documents defined in `documents` inside a
pydantic envelope and returns a deterministic, canonically ordered JSON
body.  Domain verdicts (not well-formed, not projectable, monitor
violations) are 200 responses carrying the verdict; malformed documents
are 400 errors.
"""

from __future__ import annotations

from typing import Any, Dict, List, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import documents as docs
from .efftypes import check_fidelity, effective_type
from .errors import (
    DocumentError,
    NondeterministicProjection,
    NotProjectable,
    ReplayDivergence,
    SwarmError,
)
from .machine import equivalent
from .projection import project
from .protocol import ProtocolTransition, event_types
from .simulator import (
    DEFAULT_MONITORS,
    ExplorationReport,
    Trace,
    explore,
    new_realisation,
    replay,
)
from .wellformed import check_well_formed

app = FastAPI(title="swarmproto", version="0.1.0")


def _parse(fn, *args):
    try:
        return fn(*args)
    except DocumentError as e:
        raise HTTPException(status_code=400, detail=str(e)) from e


class CheckRequest(BaseModel):
    protocol: Dict[str, Any]
    subscription: Dict[str, Any]


class DiagnosticModel(BaseModel):
    rule: str
    state: Optional[str] = None
    branch: Optional[str] = None
    role: Optional[str] = None
    etype: Optional[str] = None
    detail: str = ""


class CheckResponse(BaseModel):
    ok: bool
    diagnostics: List[DiagnosticModel]


@app.post("/check", response_model=CheckResponse)
def check(req: CheckRequest) -> CheckResponse:
    _, g = _parse(docs.parse_protocol, req.protocol)
    sub = _parse(docs.parse_subscription, req.subscription)
    report = check_well_formed(g, sub)
    return CheckResponse(
        ok=report.ok,
        diagnostics=[DiagnosticModel(**d.__dict__) for d in report.diagnostics],
    )


class ProjectRequest(BaseModel):
    protocol: Dict[str, Any]
    subscription: Dict[str, Any]
    role: str
    format: str = Field(default="json", pattern="^(json|dot)$")


class ProjectResponse(BaseModel):
    ok: bool
    machine: Optional[Dict[str, Any]] = None
    dot: Optional[str] = None
    error: Optional[str] = None


@app.post("/project", response_model=ProjectResponse)
def project_endpoint(req: ProjectRequest) -> ProjectResponse:
    _, g = _parse(docs.parse_protocol, req.protocol)
    sub = _parse(docs.parse_subscription, req.subscription)
    try:
        m = project(g, req.role, sub)
    except (NotProjectable, NondeterministicProjection) as e:
        return ProjectResponse(ok=False, error=str(e))
    if req.format == "dot":
        return ProjectResponse(ok=True, dot=docs.dot_machine(m, req.role))
    return ProjectResponse(ok=True, machine=docs.serialize_machine(m))


class CheckMachineRequest(BaseModel):
    protocol: Dict[str, Any]
    subscription: Dict[str, Any]
    role: str
    machine: Dict[str, Any]


class CheckMachineResponse(BaseModel):
    ok: bool
    equivalent: Optional[bool] = None
    counterexample: Optional[List[str]] = None
    error: Optional[str] = None


@app.post("/check-machine", response_model=CheckMachineResponse)
def check_machine(req: CheckMachineRequest) -> CheckMachineResponse:
    _, g = _parse(docs.parse_protocol, req.protocol)
    sub = _parse(docs.parse_subscription, req.subscription)
    m = _parse(docs.parse_machine, req.machine)
    try:
        projected = project(g, req.role, sub)
    except (NotProjectable, NondeterministicProjection) as e:
        return CheckMachineResponse(ok=False, error=str(e))
    res = equivalent(m, projected)
    return CheckMachineResponse(
        ok=res.equivalent,
        equivalent=res.equivalent,
        counterexample=None if res.equivalent else list(res.counterexample or ()),
    )


class SimulateRequest(BaseModel):
    protocol: Dict[str, Any]
    subscription: Dict[str, Any]
    roles: List[str]
    depth: int = 5
    mode: str = Field(default="exhaustive", pattern="^(exhaustive|random)$")
    seed: int = 0
    atomic_prop: bool = False
    monitors: List[str] = Field(default_factory=lambda: list(DEFAULT_MONITORS))


class SimulateResponse(BaseModel):
    ok: bool
    report: Dict[str, Any]


def _transition_dict(t: ProtocolTransition) -> Dict[str, Any]:
    return {
        "from": t.source,
        "to": t.target,
        "role": t.role,
        "command": t.command.name,
        "logType": list(t.command.emits),
    }


def _report_dict(report: ExplorationReport) -> Dict[str, Any]:
    out: Dict[str, Any] = {
        "mode": report.mode,
        "depth": report.depth,
        "visited": report.visited,
        "capped": report.capped,
        "distinctGlobalLogs": len(report.globals_seen),
        "violations": [
            {
                "monitor": v.monitor,
                "detail": v.detail,
                "trace": {
                    "roles": list(v.trace.roles),
                    "steps": [
                        {
                            "kind": st.kind,
                            "member": st.member,
                            **({"command": st.command,
                                "interleaving": st.interleaving}
                               if st.kind == "local" else
                               {"vector": {str(s): q for s, q in (st.vector or ())}}),
                        }
                        for st in v.trace.steps
                    ],
                    "global": docs.log_lines(v.trace.global_log),
                },
            }
            for v in report.violations
        ],
    }
    if report.trace is not None:
        out["trace"] = {
            "roles": list(report.trace.roles),
            "steps": [
                {
                    "kind": st.kind,
                    "member": st.member,
                    **({"command": st.command, "interleaving": st.interleaving}
                       if st.kind == "local" else
                       {"vector": {str(s): q for s, q in (st.vector or ())}}),
                }
                for st in report.trace.steps
            ],
            "global": docs.log_lines(report.trace.global_log),
        }
    return out


@app.post("/simulate", response_model=SimulateResponse)
def simulate(req: SimulateRequest) -> SimulateResponse:
    _, g = _parse(docs.parse_protocol, req.protocol)
    sub = _parse(docs.parse_subscription, req.subscription)
    if req.depth < 0:
        raise HTTPException(status_code=400, detail="depth must be a natural")
    try:
        state = new_realisation(g, sub, req.roles)
    except (NotProjectable, NondeterministicProjection) as e:
        raise HTTPException(status_code=400, detail=str(e)) from e
    report = explore(
        state,
        depth=req.depth,
        mode=req.mode,
        seed=req.seed,
        monitors=req.monitors,
        atomic_prop=req.atomic_prop,
    )
    return SimulateResponse(ok=not report.violations, report=_report_dict(report))


class FidelityRequest(BaseModel):
    protocol: Dict[str, Any]
    subscription: Dict[str, Any]
    log: Optional[List[str]] = None
    trace: Optional[Dict[str, Any]] = None


class FidelityResponse(BaseModel):
    ok: bool
    status: str
    effectiveType: List[str]
    witness: List[Dict[str, Any]]
    remainder: List[str]


@app.post("/fidelity", response_model=FidelityResponse)
def fidelity(req: FidelityRequest) -> FidelityResponse:
    _, g = _parse(docs.parse_protocol, req.protocol)
    sub = _parse(docs.parse_subscription, req.subscription)
    if (req.log is None) == (req.trace is None):
        raise HTTPException(
            status_code=400, detail="provide exactly one of 'log' and 'trace'"
        )
    if req.log is not None:
        universe = event_types(g) | {
            t for ts in sub.as_dict().values() for t in ts
        }
        log = _parse(docs.parse_log_lines, "\n".join(req.log), universe)
    else:
        tg, tsub, trace = _parse(docs.parse_trace, req.trace)
        try:
            replay(tg, tsub, trace)
        except (SwarmError, ReplayDivergence) as e:
            raise HTTPException(
                status_code=400, detail=f"trace does not replay: {e}"
            ) from e
        log = trace.global_log
    verdict = check_fidelity(log, g, sub)
    eff = effective_type(log, g, sub)
    return FidelityResponse(
        ok=bool(verdict),
        status=verdict.status,
        effectiveType=list(eff.etype),
        witness=[_transition_dict(t) for t in verdict.witness],
        remainder=list(verdict.remainder),
    )


class GraphRequest(BaseModel):
    protocol: Dict[str, Any]
    subscription: Optional[Dict[str, Any]] = None
    role: Optional[str] = None


class GraphResponse(BaseModel):
    ok: bool
    dot: Optional[str] = None
    error: Optional[str] = None


@app.post("/graph", response_model=GraphResponse)
def graph(req: GraphRequest) -> GraphResponse:
    name, g = _parse(docs.parse_protocol, req.protocol)
    if req.role is None:
        return GraphResponse(ok=True, dot=docs.dot_protocol(g, name))
    if req.subscription is None:
        raise HTTPException(
            status_code=400, detail="graphing a projection requires a subscription"
        )
    sub = _parse(docs.parse_subscription, req.subscription)
    try:
        m = project(g, req.role, sub)
    except (NotProjectable, NondeterministicProjection) as e:
        return GraphResponse(ok=False, error=str(e))
    return GraphResponse(ok=True, dot=docs.dot_machine(m, req.role))
