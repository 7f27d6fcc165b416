import pytest
from hypothesis import given, settings, strategies as st

from petribench.models import generate
from petribench.pnml import PnmlError, parse_pnml, read_pnml_file, write_pnml, write_pnml_file

from .oracle import random_net

SIMPLE = """<?xml version="1.0"?>
<pnml xmlns="http://www.pnml.org/version-2009/grammar/pnml">
  <net id="n" type="http://www.pnml.org/version-2009/grammar/ptnet">
    <page id="pg">
      <place id="p"><initialMarking><text>2</text></initialMarking></place>
      <place id="q"/>
      <page id="inner">
        <transition id="t"/>
      </page>
      <arc id="a1" source="p" target="t"><inscription><text>2</text></inscription></arc>
      <arc id="a2" source="t" target="q"/>
      <arc id="a3" source="t" target="q"/>
    </page>
  </net>
</pnml>"""


def test_parse_simple():
    net = parse_pnml(SIMPLE)
    assert net.place_names == ("p", "q") or list(net.place_names) == ["p", "q"]
    assert tuple(net.initial) == (2, 0)
    assert net.pre_named("t") == {"p": 2}
    assert net.post_named("t") == {"q": 2}  # parallel arcs add up


def test_namespace_is_optional():
    bare = SIMPLE.replace(' xmlns="http://www.pnml.org/version-2009/grammar/pnml"', "")
    assert parse_pnml(bare) == parse_pnml(SIMPLE)


@pytest.mark.parametrize("mutate, message", [
    (lambda s: s.replace("ptnet", "symmetricnet"), "unsupported net type"),
    (lambda s: s.replace('<place id="q"/>', '<place id="q"><type><text>x</text></type></place>'),
     "unsupported net type"),
    (lambda s: s.replace('target="q"/>', 'target="zz"/>', 1), "undeclared"),
    (lambda s: s.replace('source="t" target="q"/>', 'source="p" target="q"/>', 1), "same kind"),
    (lambda s: s.replace("<text>2</text></initialMarking>", "<text>two</text></initialMarking>"),
     "integer"),
    (lambda s: s.replace("<text>2</text></initialMarking>", "<text>-1</text></initialMarking>"),
     "negative"),
    (lambda s: s[:50], "malformed"),
])
def test_rejections(mutate, message):
    with pytest.raises(PnmlError, match=message):
        parse_pnml(mutate(SIMPLE))


def test_writer_omits_defaults():
    text = write_pnml(generate("Philosophers", 5)).decode()
    assert "<inscription>" not in text
    assert text.startswith("<?xml")


def test_file_round_trip(tmp_path):
    net = generate("RwMutex", (3, 4))
    path = tmp_path / "m.pnml"
    write_pnml_file(net, path)
    assert read_pnml_file(path) == net


def test_output_is_deterministic():
    net = generate("Lamport", 2)
    assert write_pnml(net) == write_pnml(generate("Lamport", 2))


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_random_round_trip(seed):
    net = random_net(seed, max_weight=3, max_tokens=5)
    assert parse_pnml(write_pnml(net)) == net
