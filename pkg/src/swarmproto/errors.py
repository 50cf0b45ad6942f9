"""Exception types shared across the workbench."""


class SwarmError(Exception):
    """Base class for all workbench errors."""


class UnknownState(SwarmError):
    pass


class InvalidLog(SwarmError):
    """A sequence of events violates the log invariants."""


class VectorOutOfRange(SwarmError):
    """A prefix vector references sequence numbers absent from the log."""


class NoProgress(SwarmError):
    """A propagation step would not deliver any new event."""


class CommandNotEnabled(SwarmError):
    """A command was invoked in a state where it is not enabled."""


class AmbiguousCommand(SwarmError):
    """A plain command name matches more than one branch; qualify by guard."""


class InterleavingOutOfRange(SwarmError):
    """The requested merge interleaving index does not exist."""


class InvalidMachine(SwarmError):
    """A machine definition violates its structural invariants."""


class InvalidProtocol(SwarmError):
    """A swarm protocol definition violates its structural invariants."""


class NotProjectable(SwarmError):
    def __init__(self, state, branch, reason=""):
        self.state = state
        self.branch = branch
        super().__init__(
            f"state {state!r}, branch {branch!r} cannot be projected"
            + (f": {reason}" if reason else "")
        )


class NondeterministicProjection(SwarmError):
    def __init__(self, state, etype):
        self.state = state
        self.etype = etype
        super().__init__(
            f"two surviving branches at state {state!r} start with event type {etype!r}"
        )


class BoundExceeded(SwarmError):
    """The admissibility search space is too large for the given bounds."""


class ReplayDivergence(SwarmError):
    """Replaying a trace produced a global log different from the recorded one."""


class DocumentError(SwarmError):
    """A JSON/text document does not parse or validate."""
