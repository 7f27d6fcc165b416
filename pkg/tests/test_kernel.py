import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from petribench.kernel import AVAILABLE, KERNEL
from petribench.kernel_common import (WidthOverflow, compile_net, decode_marking, encode_marking,
                                      max_value_for_width, next_width, width_for)
from petribench.net import NetBuilder

from .oracle import StateSpace, TooBig, bounded_random_nets, random_net

KERNELS = sorted(AVAILABLE)


def make(net, kernel, **kw):
    return AVAILABLE[kernel](net.n_places, *compile_net(net), net.initial, **kw)


def counter(limit_tokens):
    b = NetBuilder("counter")
    b.place("c", 0)
    b.place("budget", limit_tokens)
    b.transition("inc", {"budget": 1}, {"c": 1})
    return b.build()


def test_cython_kernel_is_built_and_selected():
    assert "cython" in AVAILABLE
    assert KERNEL == "cython"


def test_encoding_round_trip():
    m = (0, 1, 255, 7)
    assert encode_marking(m, 1) == bytes([0, 1, 255, 7])
    assert encode_marking((258,), 2) == b"\x02\x01"
    for w in (1, 2, 4, 8):
        assert decode_marking(encode_marking(m, w), w) == m
    with pytest.raises(WidthOverflow):
        encode_marking((256,), 1)


def test_widths():
    assert width_for(255) == 1 and width_for(256) == 2 and width_for(2**40) == 8
    assert next_width(1) == 2 and next_width(4) == 8
    assert max_value_for_width(8) == 2**63 - 1


@pytest.mark.parametrize("kernel", KERNELS)
def test_overflow_is_signalled(kernel):
    b = NetBuilder("grow")
    b.place("c", 250)
    b.transition("inc", {}, {"c": 1})
    ex = make(b.build(), kernel, width=1)
    with pytest.raises(WidthOverflow):
        ex.run()
    with pytest.raises(WidthOverflow):
        make(counter(300), kernel, width=1)
    ex = make(counter(300), kernel, width=2)
    ex.run()
    assert ex.count == 301 and ex.exhausted


@pytest.mark.parametrize("kernel", KERNELS)
def test_max_states_budget(kernel):
    ex = make(counter(50), kernel)
    ex.run(max_states=10)
    assert ex.count == 10 and not ex.exhausted and ex.stop_reason == "max_states"


@pytest.mark.parametrize("kernel", KERNELS)
def test_callback_sees_every_state_once(kernel):
    net = bounded_random_nets(1, seed=3)[0]
    seen = []
    ex = make(net, kernel)

    def cb(a, b):
        seen.append((a, b))
        return False
    ex.run(callback=cb, batch=4)
    covered = [i for a, b in seen for i in range(a, b)]
    assert covered == list(range(ex.count))


@pytest.mark.parametrize("kernel", KERNELS)
def test_callback_can_stop(kernel):
    ex = make(counter(100), kernel)
    ex.run(callback=lambda a, b: True, batch=5)
    assert not ex.exhausted and ex.stop_reason == "callback"


@pytest.mark.parametrize("kernel", KERNELS)
def test_deadline(kernel):
    ex = make(counter(10), kernel)
    ex.run(deadline=0.0 + 1e-9)
    assert ex.stop_reason in ("timeout", "")


@pytest.mark.parametrize("kernel", KERNELS)
def test_edges_and_markings(kernel):
    net = counter(3)
    ex = make(net, kernel, store_graph=True)
    ex.run()
    assert ex.markings().tolist() == [[0, 3], [1, 2], [2, 1], [3, 0]]
    assert ex.edges().tolist() == [[0, 0, 1], [1, 0, 2], [2, 0, 3]]
    assert ex.dead_index == 3 and ex.dead_count == 1
    assert list(ex.bounds()) == [3, 3]


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), order=st.sampled_from(["bfs", "dfs"]))
def test_kernels_agree_with_oracle(seed, order):
    net = random_net(seed)
    try:
        oracle = StateSpace(net, 3000)
    except TooBig:
        return
    results = []
    for k in KERNELS:
        ex = make(net, k, order=order, width=8, store_graph=True)
        ex.run()
        assert ex.count == oracle.count
        assert tuple(ex.bounds()) == oracle.bounds()
        states = {tuple(r) for r in ex.markings().tolist()}
        assert states == set(oracle.states)
        results.append((ex.count, ex.n_edges, ex.dead_count))
    assert len(set(results)) == 1
    assert results[0][1] == len(oracle.edges)
    assert results[0][2] == len(oracle.dead())


def test_stored_bytes_scale_with_width():
    net = counter(20)
    small = make(net, "cython", width=1)
    small.run()
    big = make(net, "cython", width=8)
    big.run()
    assert big.stored_bytes() > small.stored_bytes()


def test_pure_fallback_selected_by_env():
    import os
    import subprocess
    import sys
    env = dict(os.environ, PETRIBENCH_PURE="1")
    out = subprocess.run([sys.executable, "-c", "from petribench.kernel import KERNEL; print(KERNEL)"],
                         capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "python"
