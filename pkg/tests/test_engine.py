import pytest
from hypothesis import given, settings, strategies as st

from petribench.engine import (ExploreOptions, IncompleteExploration, Liveness, build_graph,
                               count_states, explore, explore_with, find_deadlock, live_transitions,
                               place_bound, transition_liveness)
from petribench.models import generate
from petribench.net import NetBuilder, StructuralError, enabled

from .oracle import StateSpace, TooBig, bounded_random_nets, random_net


def cycle_with_trap():
    b = NetBuilder("trap")
    b.place("a", 1)
    b.place("b")
    b.place("sink")
    b.transition("ab", {"a": 1}, {"b": 1})
    b.transition("ba", {"b": 1}, {"a": 1})
    b.transition("fall", {"b": 1}, {"sink": 1})
    b.transition("stay", {"sink": 1}, {"sink": 1})
    return b.build()


def test_explore_small():
    r = explore(generate("Philosophers", 5))
    assert r.count == 243 and r.exhausted and r.dead_marking is not None
    assert r.place_bounds and max(r.place_bounds) == 1


def test_both_kernels_give_same_result():
    net = generate("Lamport", 2)
    a = explore(net, ExploreOptions(kernel="cython"))
    b = explore(net, ExploreOptions(kernel="python"))
    assert (a.count, a.place_bounds, a.fired, a.dead_count) == (b.count, b.place_bounds, b.fired,
                                                                 b.dead_count)


def test_width_restart_is_transparent():
    b = NetBuilder("wide")
    b.place("budget", 1000)
    b.place("c")
    b.transition("t", {"budget": 1}, {"c": 1})
    r = explore(b.build())
    assert r.count == 1001 and r.width_bytes == 2 and r.place_bounds == (1000, 1000)


def test_budget_gives_partial_result():
    r = explore(generate("Philosophers", 10), ExploreOptions(max_states=100))
    assert r.count == 100 and r.partial and r.stop_reason == "max_states"
    with pytest.raises(IncompleteExploration):
        count_states(generate("Philosophers", 10), ExploreOptions(max_states=100))


def test_monotone_budget():
    net = generate("Peterson", 2)
    counts = [explore(net, ExploreOptions(max_states=k)).count for k in (10, 100, 1000, 10**6)]
    assert counts == sorted(counts)
    assert counts[-1] == 20754


def test_invalid_net_is_rejected():
    from petribench.net import PetriNet
    with pytest.raises(StructuralError):
        explore(PetriNet("bad", [("p", 0)], ["t"], {"t": {"q": 1}}, {}))


def test_options_validation():
    with pytest.raises(ValueError):
        ExploreOptions(max_states=0)
    with pytest.raises(ValueError):
        ExploreOptions(order="random")
    assert ExploreOptions().with_(order="dfs").order == "dfs"


def test_find_deadlock():
    net = generate("Philosophers", 5)
    dead = find_deadlock(net)
    assert dead is not None
    assert not any(enabled(net, dead, t) for t in net.transition_names)
    assert find_deadlock(cycle_with_trap()) is None
    with pytest.raises(IncompleteExploration):
        find_deadlock(generate("Peterson", 2), ExploreOptions(max_states=10))


def test_place_bound():
    assert place_bound(generate("RwMutex", (2, 3)), 0) >= 1


def test_liveness_levels():
    net = cycle_with_trap()
    assert transition_liveness(net, "ab", Liveness.L1)
    assert not transition_liveness(net, "ab", Liveness.L4)
    assert transition_liveness(net, "stay", Liveness.L4)
    assert not transition_liveness(net, "stay", "L0")
    g = build_graph(net)
    assert live_transitions(g) == [False, False, False, True]
    assert len(g.bottom_components()) == 1


def test_graph_matches_explore():
    net = generate("Lamport", 2)
    g = build_graph(net)
    assert g.n_states == explore(net).count == 380
    assert g.successors(0)


def test_explore_with_streams_all_states():
    net = generate("Eratosthenes", 10)
    total = []
    r, _ = explore_with(net, ExploreOptions(), lambda block, first: total.append(len(block)) or False,
                        batch=4)
    assert sum(total) == r.count == 32


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_liveness_and_deadlock_match_oracle(seed):
    net = random_net(seed, max_places=4, max_transitions=4)
    try:
        oracle = StateSpace(net, 400)
    except TooBig:
        return
    g = build_graph(net, ExploreOptions(max_states=10**5))
    assert live_transitions(g) == oracle.live()
    dead = find_deadlock(net)
    assert (dead is None) == (not oracle.dead())
    # Every marking without successors is dead and vice versa.
    with_succ = {s for s, _, _ in oracle.edges}
    assert (len(with_succ) == oracle.count) == (dead is None)


@pytest.mark.parametrize("net", bounded_random_nets(10, seed=500, limit=2000), ids=lambda n: n.name)
def test_order_independence(net):
    a = explore(net, ExploreOptions(order="bfs"))
    b = explore(net, ExploreOptions(order="dfs"))
    assert (a.count, a.place_bounds, a.fired) == (b.count, b.place_bounds, b.fired)
