"""Verification and simulation workbench for swarm protocols.

Global behavioural types for local-first software over replicated event
logs: projection to per-role machines, well-formedness checking, the
swarm operational semantics, and eventual-fidelity verification.
"""

from .errors import (
    AmbiguousCommand,
    BoundExceeded,
    CommandNotEnabled,
    DocumentError,
    InterleavingOutOfRange,
    InvalidLog,
    InvalidMachine,
    InvalidProtocol,
    NondeterministicProjection,
    NoProgress,
    NotProjectable,
    ReplayDivergence,
    SwarmError,
    UnknownState,
    VectorOutOfRange,
)
from .eventlog import (
    EMPTY_LOG,
    Event,
    EventId,
    Log,
    ev,
    filter_log_type,
    is_sublog,
    log_type_of,
    merge,
    prefix_vector,
    restrict_to_vector,
    sublogs,
    vector_leq,
)
from .machine import (
    CommandLabel,
    Machine,
    SeqAllocator,
    check_deterministic,
    equivalent,
    minimize,
)
from .projection import project
from .protocol import (
    ProtocolConfig,
    ProtocolTransition,
    Subscription,
    SwarmProtocol,
    active_roles,
    check_log_determinism,
    enumerate_run_paths,
    enumerate_runs,
    event_types,
    guards,
    protocol_delta,
    protocol_step,
    roles,
)
from .wellformed import (
    check_causal_consistency,
    check_confusion_freeness,
    check_determinacy,
    check_invariance,
    check_well_formed,
)
from .efftypes import (
    admissibility_oracle,
    check_fidelity,
    effective_type,
    log_equivalent,
)
from .simulator import (
    ExplorationReport,
    Realisation,
    Step,
    SwarmState,
    Trace,
    enumerate_successors,
    explore,
    new_realisation,
    replay,
    saturate,
    step_local,
    step_prop,
)

__version__ = "0.1.0"
