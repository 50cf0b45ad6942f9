"""Command-line front end.

Each subcommand is a thin client: it loads the input files, posts them to
the in-process HTTP service and renders the response.  Machine-readable
reports go to stdout, human diagnostics to stderr.  Exit codes: 0 for a
positive verdict, 1 for a negative one, 2 for malformed inputs or usage
errors.
"""

from __future__ import annotations

import json
import sys
import warnings
from typing import Any, Dict, Optional

import click

# the in-process client import warns about the httpx backend; irrelevant here
warnings.filterwarnings("ignore", category=DeprecationWarning, module="fastapi.*")
with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from fastapi.testclient import TestClient

from .documents import canonical_json
from .service import app


def _fail(msg: str) -> None:
    click.echo(f"error: {msg}", err=True)
    sys.exit(2)


def _load_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        _fail(f"cannot read {path}: {e.strerror or e}")
    except json.JSONDecodeError as e:
        _fail(f"{path} is not valid JSON: {e}")


def _load_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        _fail(f"cannot read {path}: {e.strerror or e}")


def _post(path: str, payload: Dict[str, Any]) -> Dict[str, Any]:
    with TestClient(app, raise_server_exceptions=True) as client:
        resp = client.post(path, json=payload)
    if resp.status_code != 200:
        detail = resp.json().get("detail", resp.text)
        _fail(str(detail))
    return resp.json()


@click.group()
def main() -> None:
    """Verification and simulation workbench for swarm protocols."""


@main.command()
@click.argument("protocol", type=click.Path())
@click.argument("subscription", type=click.Path())
def check(protocol: str, subscription: str) -> None:
    """Check a protocol/subscription pair for well-formedness."""
    body = _post("/check", {
        "protocol": _load_json(protocol),
        "subscription": _load_json(subscription),
    })
    click.echo(canonical_json(body), nl=False)
    for d in body["diagnostics"]:
        click.echo(f"{d['rule']}: {d['detail']}", err=True)
    sys.exit(0 if body["ok"] else 1)


@main.command()
@click.argument("protocol", type=click.Path())
@click.argument("subscription", type=click.Path())
@click.argument("role")
@click.option("--format", "fmt", type=click.Choice(["json", "dot"]), default="json")
def project(protocol: str, subscription: str, role: str, fmt: str) -> None:
    """Project the protocol onto a role, as a machine document or DOT graph."""
    body = _post("/project", {
        "protocol": _load_json(protocol),
        "subscription": _load_json(subscription),
        "role": role,
        "format": fmt,
    })
    if not body["ok"]:
        click.echo(body["error"], err=True)
        sys.exit(1)
    if fmt == "dot":
        click.echo(body["dot"], nl=False)
    else:
        click.echo(canonical_json(body["machine"]), nl=False)
    sys.exit(0)


@main.command("check-machine")
@click.argument("protocol", type=click.Path())
@click.argument("subscription", type=click.Path())
@click.argument("role")
@click.argument("machine", type=click.Path())
def check_machine(protocol: str, subscription: str, role: str, machine: str) -> None:
    """Check a machine document for equivalence with the role's projection."""
    body = _post("/check-machine", {
        "protocol": _load_json(protocol),
        "subscription": _load_json(subscription),
        "role": role,
        "machine": _load_json(machine),
    })
    click.echo(canonical_json(body), nl=False)
    if body.get("error"):
        click.echo(body["error"], err=True)
    elif not body["ok"]:
        cex = " ".join(body.get("counterexample") or []) or "(empty sequence)"
        click.echo(f"not equivalent; distinguishing sequence: {cex}", err=True)
    sys.exit(0 if body["ok"] else 1)


@main.command()
@click.argument("protocol", type=click.Path())
@click.argument("subscription", type=click.Path())
@click.option("--roles", required=True,
              help="Comma-separated role names, one member per entry.")
@click.option("--depth", type=int, default=5, show_default=True)
@click.option("--mode", type=click.Choice(["exhaustive", "random"]),
              default="exhaustive", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--atomic-prop", is_flag=True,
              help="Restrict propagation to whole emission blocks.")
@click.option("--monitor", "monitors", multiple=True,
              type=click.Choice(["coherence", "fidelity", "deadlock"]),
              help="Monitors to evaluate (default: coherence, fidelity).")
def simulate(protocol: str, subscription: str, roles: str, depth: int,
             mode: str, seed: int, atomic_prop: bool, monitors) -> None:
    """Explore the swarm semantics exhaustively or at random."""
    role_list = [r.strip() for r in roles.split(",") if r.strip()]
    if not role_list:
        _fail("--roles must name at least one role")
    body = _post("/simulate", {
        "protocol": _load_json(protocol),
        "subscription": _load_json(subscription),
        "roles": role_list,
        "depth": depth,
        "mode": mode,
        "seed": seed,
        "atomic_prop": atomic_prop,
        "monitors": list(monitors) or ["coherence", "fidelity"],
    })
    click.echo(canonical_json(body["report"]), nl=False)
    for v in body["report"]["violations"]:
        click.echo(f"{v['monitor']}: {v['detail']}", err=True)
    sys.exit(0 if body["ok"] else 1)


@main.command()
@click.argument("protocol", type=click.Path())
@click.argument("subscription", type=click.Path())
@click.option("--log", "log_file", type=click.Path(), default=None,
              help="Log file, one source:seq:EventType line per event.")
@click.option("--trace", "trace_file", type=click.Path(), default=None,
              help="Trace JSON document; its global log is checked.")
def fidelity(protocol: str, subscription: str,
             log_file: Optional[str], trace_file: Optional[str]) -> None:
    """Decide eventual fidelity of a global log against the protocol."""
    if (log_file is None) == (trace_file is None):
        _fail("provide exactly one of --log and --trace")
    payload: Dict[str, Any] = {
        "protocol": _load_json(protocol),
        "subscription": _load_json(subscription),
    }
    if log_file is not None:
        payload["log"] = _load_text(log_file).splitlines()
    else:
        payload["trace"] = _load_json(trace_file)
    body = _post("/fidelity", payload)
    click.echo(canonical_json(body), nl=False)
    if body["ok"]:
        click.echo("Faithful", err=True)
    else:
        click.echo(f"Pending; remainder: {' '.join(body['remainder'])}", err=True)
    sys.exit(0 if body["ok"] else 1)


@main.command()
@click.argument("protocol", type=click.Path())
@click.option("--subscription", type=click.Path(), default=None)
@click.option("--role", default=None,
              help="Graph this role's projection instead of the protocol.")
def graph(protocol: str, subscription: Optional[str], role: Optional[str]) -> None:
    """Export the protocol (or a projection) as a DOT graph."""
    payload: Dict[str, Any] = {"protocol": _load_json(protocol)}
    if role is not None:
        if subscription is None:
            _fail("--role requires --subscription")
        payload["role"] = role
        payload["subscription"] = _load_json(subscription)
    body = _post("/graph", payload)
    if not body["ok"]:
        click.echo(body["error"], err=True)
        sys.exit(1)
    click.echo(body["dot"], nl=False)
    sys.exit(0)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
