"""Shared protocol/subscription fixtures used across the test suite."""

from swarmproto import Log, Subscription, SwarmProtocol, ev

# -- ride protocol: Select, Arrive, Receipt ----------------------------------

RIDE_TYPES = ["Selected", "PassengerID", "Arrived", "Receipt"]


def ride_protocol() -> SwarmProtocol:
    return SwarmProtocol.build("s0", [
        ("s0", "s1", "P", "Select", ["Selected", "PassengerID"]),
        ("s1", "s2", "T", "Arrive", ["Arrived"]),
        ("s2", "s3", "O", "Receipt", ["Receipt"]),
    ])


def ride_sub_lossy() -> Subscription:
    """The taxi does not observe PassengerID; causal consistency fails."""
    return Subscription({
        "P": ["Selected", "Arrived"],
        "T": ["Selected", "Arrived"],
        "O": ["Selected", "PassengerID", "Arrived", "Receipt"],
    })


def ride_sub_fixed() -> Subscription:
    return Subscription({
        "P": ["Selected", "Arrived"],
        "T": ["Selected", "Arrived", "PassengerID"],
        "O": ["Selected", "PassengerID", "Arrived", "Receipt"],
    })


# -- full taxi protocol with an auction loop ---------------------------------

TAXI_TYPES = [
    "Requested", "Bid", "BidderID", "Selected", "PassengerID", "Arrived",
    "Cancelled", "Started", "Path", "Finished", "Receipt",
]


def taxi_protocol() -> SwarmProtocol:
    return SwarmProtocol.build("G0", [
        ("G0", "G1", "P", "Request", ["Requested"]),
        ("G1", "G1", "T", "Offer", ["Bid", "BidderID"]),
        ("G1", "G2", "P", "Select", ["Selected", "PassengerID"]),
        ("G2", "G3", "T", "Arrive", ["Arrived"]),
        ("G2", "G5", "P", "Cancel", ["Cancelled"]),
        ("G3", "G4", "P", "Start", ["Started"]),
        ("G4", "G4", "T", "Record", ["Path"]),
        ("G4", "G6", "P", "Finish", ["Finished"]),
        ("G6", "G7", "O", "Receipt", ["Receipt"]),
        ("G5", "G7", "O", "Receipt", ["Receipt"]),
    ])


def taxi_sub() -> Subscription:
    office = [t for t in TAXI_TYPES if t not in ("BidderID", "PassengerID")]
    return Subscription({"P": TAXI_TYPES, "T": TAXI_TYPES, "O": office})


def auction_protocol() -> SwarmProtocol:
    """Auction variant with single-event bids, for stray-late-bid logs."""
    return SwarmProtocol.build("G0", [
        ("G0", "G1", "P", "Request", ["Requested"]),
        ("G1", "G1", "T", "Offer", ["Bid"]),
        ("G1", "G2", "P", "Select", ["Selected", "PassengerID"]),
        ("G2", "G3", "T", "Arrive", ["Arrived"]),
    ])


def auction_sub() -> Subscription:
    types = ["Requested", "Bid", "Selected", "PassengerID", "Arrived"]
    return Subscription({"P": types, "T": types})


# -- divergent choice: two roles may decide concurrently ---------------------

def divergent_protocol() -> SwarmProtocol:
    return SwarmProtocol.build("top", [
        ("top", "s1", "T", "Arrive", ["Arrived"]),
        ("top", "s3", "P", "Cancel", ["Cancelled"]),
        ("s1", "s2", "P", "Finish", ["Finished"]),
        ("s2", "end", "O", "Receipt", ["Receipt"]),
        ("s3", "end", "O", "Receipt", ["Receipt"]),
    ])


def divergent_sub() -> Subscription:
    """Causal-consistent but the office cannot identify the Arrive branch."""
    return Subscription({
        "T": ["Arrived"],
        "P": ["Arrived", "Finished", "Cancelled"],
        "O": ["Finished", "Cancelled", "Receipt"],
    })


# -- ambiguous decision: one guard emitted from two distinct choices ---------

def ambiguous_protocol() -> SwarmProtocol:
    return SwarmProtocol.build("top", [
        ("top", "a1", "T", "Arrive", ["Arrived"]),
        ("top", "b1", "P", "Cancel", ["Finished"]),
        ("a1", "a2", "P", "Finish", ["Finished", "Rating"]),
        ("a2", "end", "O", "Receipt", ["Receipt"]),
        ("b1", "end", "O", "Receipt", ["Receipt"]),
    ])


# -- two-step block protocol for effective-type corner cases -----------------

def block_protocol() -> SwarmProtocol:
    return SwarmProtocol.build("g0", [
        ("g0", "g1", "R", "c", ["a", "b"]),
        ("g1", "g2", "S", "d", ["c"]),
    ])


def block_sub() -> Subscription:
    return Subscription({"R": ["a", "b"], "S": ["a", "c"]})


# -- anomaly fixtures --------------------------------------------------------

def double_invoke_protocol() -> SwarmProtocol:
    """Linear c;c by one role; two replicas can each invoke once."""
    return SwarmProtocol.build("g0", [
        ("g0", "g1", "R", "c", ["t"]),
        ("g1", "g2", "R", "c2", ["t"]),
    ])


def racing_choice_protocol() -> SwarmProtocol:
    return SwarmProtocol.build("g0", [
        ("g0", "g1", "A", "c1", ["a", "c"]),
        ("g0", "g2", "B", "c2", ["b", "c"]),
    ])


# -- small well-formed fixtures for exploration ------------------------------

def pingpong_protocol() -> SwarmProtocol:
    return SwarmProtocol.build("G0", [
        ("G0", "G1", "A", "ping", ["Ping"]),
        ("G1", "G0", "B", "pong", ["Pong"]),
    ])


def choice_protocol() -> SwarmProtocol:
    return SwarmProtocol.build("G0", [
        ("G0", "G1", "A", "left", ["L"]),
        ("G0", "G2", "B", "right", ["R"]),
        ("G1", "G3", "C", "ackl", ["AckL"]),
        ("G2", "G3", "C", "ackr", ["AckR"]),
    ])


# -- sample log from the sublog examples -------------------------------------

def sample_log() -> Log:
    """⟨a, b, d, c, e⟩ with sources 0,1,1,2,1."""
    return Log.of(
        ev(0, 1, "a"), ev(1, 1, "b"), ev(1, 2, "d"), ev(2, 1, "c"), ev(1, 3, "e"),
    )
