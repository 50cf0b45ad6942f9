import pytest

from swarmproto import (
    BoundExceeded,
    EMPTY_LOG,
    Log,
    SeqAllocator,
    Subscription,
    admissibility_oracle,
    check_fidelity,
    effective_type,
    ev,
    log_equivalent,
    log_type_of,
    merge,
    project,
    protocol_delta,
)
from swarmproto.efftypes import FAITHFUL, PENDING
from swarmproto.eventlog import sublogs
from swarmproto.protocol import active_roles, enumerate_run_paths

from fixtures import (
    auction_protocol,
    auction_sub,
    block_protocol,
    block_sub,
    double_invoke_protocol,
    pingpong_protocol,
    racing_choice_protocol,
    ride_protocol,
    ride_sub_fixed,
)


class TestEffectiveType:
    def test_single_guard(self):
        g, sub = block_protocol(), block_sub()
        assert effective_type(Log.of(ev(1, 1, "a")), g, sub).etype == ("a",)

    def test_unobserved_tail_dropped(self):
        g, sub = block_protocol(), block_sub()
        l = Log.of(ev(1, 1, "a"), ev(1, 2, "b"))
        assert effective_type(l, g, sub).etype == ("a",)

    def test_reordered_tail_after_next_guard(self):
        g, sub = block_protocol(), block_sub()
        l = Log.of(ev(1, 1, "a"), ev(2, 1, "c"), ev(1, 2, "b"))
        assert effective_type(l, g, sub).etype == ("a", "c")

    def test_racing_choice_only_first_guard_counts(self):
        g = racing_choice_protocol()
        sub = Subscription.universal(g)
        l = Log.of(ev(2, 1, "b"), ev(1, 1, "a"), ev(1, 2, "c"), ev(2, 2, "c"))
        assert effective_type(l, g, sub).etype == ("b",)

    def test_empty_log(self):
        g, sub = block_protocol(), block_sub()
        res = effective_type(EMPTY_LOG, g, sub)
        assert res.etype == () and res.final_config.state == "g0"


class TestLogEquivalence:
    def test_tail_invisible(self):
        g, sub = block_protocol(), block_sub()
        assert log_equivalent(
            Log.of(ev(1, 1, "a")), Log.of(ev(1, 1, "a"), ev(1, 2, "b")), g, sub,
        )

    def test_reflexive(self):
        g, sub = block_protocol(), block_sub()
        l = Log.of(ev(1, 1, "a"))
        assert log_equivalent(l, l, g, sub)

    def test_stray_late_bid_equivalent(self):
        g, sub = auction_protocol(), auction_sub()
        l_auc = Log.of(
            ev(1, 1, "Requested"), ev(2, 1, "Bid"), ev(3, 1, "Bid"),
            ev(1, 2, "Selected"), ev(2, 2, "Bid"), ev(1, 3, "PassengerID"),
        )
        l2 = Log.of(
            ev(1, 1, "Requested"), ev(2, 1, "Bid"), ev(3, 1, "Bid"),
            ev(1, 2, "Selected"), ev(1, 3, "PassengerID"),
        )
        assert log_type_of(l_auc) != log_type_of(l2)
        assert log_equivalent(l_auc, l2, g, sub)
        assert effective_type(l_auc, g, sub).etype == log_type_of(l2)


class TestFidelity:
    def test_empty_faithful(self):
        g, sub = block_protocol(), block_sub()
        v = check_fidelity(EMPTY_LOG, g, sub)
        assert v.status == FAITHFUL and v.witness == ()

    def test_double_invocation_faithful(self):
        g = double_invoke_protocol()
        sub = Subscription.universal(g)
        l = Log.of(ev(1, 1, "t"), ev(2, 1, "t"))
        v = check_fidelity(l, g, sub)
        assert v.status == FAITHFUL
        assert [t.command.name for t in v.witness] == ["c", "c2"]

    def test_cut_mid_block_pending(self):
        g, sub = ride_protocol(), ride_sub_fixed()
        v = check_fidelity(Log.of(ev(1, 1, "Selected")), g, sub)
        assert v.status == PENDING
        assert v.remainder == ("PassengerID",)
        assert v.witness == ()

    def test_block_compositionality(self):
        g, sub = ride_protocol(), ride_sub_fixed()
        l1 = Log.of(ev(1, 1, "Selected"), ev(1, 2, "PassengerID"))
        l2 = Log.of(ev(2, 1, "Arrived"))
        whole = l1.append(l2.entries)
        pre = effective_type(l1, g, sub)
        assert pre.final_config.pending == ()
        full = effective_type(whole, g, sub).etype
        assert full[: len(pre.etype)] == pre.etype

    def test_sequential_runs_faithful_with_expected_type(self):
        for g, sub in (
            (ride_protocol(), ride_sub_fixed()),
            (auction_protocol(), auction_sub()),
        ):
            for path, log in enumerate_run_paths(g, 4):
                v = check_fidelity(log, g, sub)
                assert v.status == FAITHFUL
                assert v.witness == path
                expected = []
                for t in path:
                    observed = set()
                    for r in active_roles(g, t.target):
                        observed |= sub(r)
                    expected.append(t.guard)
                    expected.extend(x for x in t.command.emits[1:] if x in observed)
                assert effective_type(log, g, sub).etype == tuple(expected)


class TestAdmissibility:
    def test_sequential_runs_admissible(self):
        g, sub = ride_protocol(), ride_sub_fixed()
        for _, log in enumerate_run_paths(g, 3):
            assert admissibility_oracle(log, g, sub, bound=1)

    def test_reordered_across_blocks_admissible(self):
        g, sub = block_protocol(), block_sub()
        l = Log.of(ev(1, 1, "a"), ev(2, 1, "c"), ev(1, 2, "b"))
        assert admissibility_oracle(l, g, sub, bound=3)

    def test_inverted_block_order_banned(self):
        g, sub = block_protocol(), block_sub()
        l = Log.of(ev(2, 1, "b"), ev(1, 1, "a"), ev(1, 2, "c"))
        assert not admissibility_oracle(l, g, sub, bound=3)

    def test_concurrent_choices_admissible(self):
        g = racing_choice_protocol()
        sub = Subscription.universal(g)
        l = Log.of(ev(2, 1, "b"), ev(1, 1, "a"), ev(1, 2, "c"), ev(2, 2, "c"))
        assert admissibility_oracle(l, g, sub, bound=2)
        assert not admissibility_oracle(l, g, sub, bound=1)

    def test_bound_exceeded(self):
        g, sub = auction_protocol(), auction_sub()
        events = [ev(1, 1, "Requested")] + [
            ev(2, i, "Bid") for i in range(1, 9)
        ]
        # completing the decomposition needs one search node per block
        with pytest.raises(BoundExceeded):
            admissibility_oracle(Log(tuple(events)), g, sub, bound=8, node_cap=5)


class TestLocalExtensionPreservesFidelity:
    def test_block_extension_of_faithful_logs(self):
        g, sub = ride_protocol(), ride_sub_fixed()
        projections = {r: project(g, r, sub) for r in "PTO"}
        for _, log in enumerate_run_paths(g, 2):
            for r, m in projections.items():
                for s in sublogs(log):
                    for label in m.enabled_commands(s):
                        block = SeqAllocator(9).fresh_block(label.emits)
                        new_local = s.append(block)
                        for merged in merge(log, new_local):
                            v = check_fidelity(merged, g, sub)
                            assert v.status == FAITHFUL, (r, label.name)
