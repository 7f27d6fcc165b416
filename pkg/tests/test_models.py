import pytest

from petribench.models import ModelFamily, ModelParams, family_info, generate, list_instances
from petribench.net import validate

from .oracle import StateSpace


def test_params_parse_and_render():
    assert str(ModelParams.parse("r10w20")) == "r10w20"
    assert ModelParams.parse((10, 20)) == ModelParams(r=10, w=20)
    assert ModelParams.parse("7") == ModelParams(n=7)
    assert ModelParams.parse(7).scale == 7
    assert ModelParams.parse("r10w20").scale == 20
    with pytest.raises(ValueError):
        ModelParams.parse("r10")


def test_family_parse_is_lenient():
    assert ModelFamily.parse("shared-memory") is ModelFamily.SharedMemory
    assert ModelFamily.parse("RWMUTEX") is ModelFamily.RwMutex


def test_official_lists():
    assert [p.n for p in list_instances("Kanban")] == [5, 10, 20, 50, 100, 200, 500, 1000]
    assert list_instances("Philosophers")[-1].n == 100000
    assert str(list_instances("RwMutex")[0]) == "r10w10"
    assert len(list_instances("RwMutex")) == 12


@pytest.mark.parametrize("family, bad", [("Philosophers", "r10w10"), ("RwMutex", 5),
                                         ("Peterson", 1), ("Philosophers", 0)])
def test_generate_rejects_bad_params(family, bad):
    with pytest.raises(ValueError):
        generate(family, bad)


@pytest.mark.parametrize("family", list(ModelFamily))
def test_smallest_instance_is_valid(family):
    p = list_instances(family)[0]
    net = generate(family, p)
    assert validate(net) == []
    assert net.n_places > 0 and net.n_transitions > 0


def test_generation_is_pure():
    assert generate("Lamport", 2) == generate("Lamport", 2)


# Counts below are computed by the brute-force oracle on tiny instances
# that fall outside the published table.
@pytest.mark.parametrize("family, p", [("Philosophers", 2), ("Philosophers", 3), ("TokenRing", 2),
                                       ("TokenRing", 3), ("Eratosthenes", 7), ("FMS", 2),
                                       ("Kanban", 1), ("SharedMemory", 2), ("RwMutex", (2, 3)),
                                       ("SimpleLbs", 2), ("Peterson", 2), ("Lamport", 2)])
def test_engine_agrees_with_oracle(family, p):
    from petribench.engine import explore
    net = generate(family, p)
    oracle = StateSpace(net, 10**5)
    r = explore(net)
    assert r.exhausted
    assert r.count == oracle.count
    assert r.place_bounds == oracle.bounds()
    assert r.fired == oracle.fired()


@pytest.mark.parametrize("w", [1, 2, 5])
def test_rwmutex_law(w):
    from petribench.engine import count_states
    for r in (1, 2, 4):
        assert count_states(generate("RwMutex", (r, w))) == 2**r + w


def test_family_info_fields():
    info = family_info("SimpleLbs")
    assert info.minimum == 2 and not info.pair
    assert family_info("RwMutex").pair
