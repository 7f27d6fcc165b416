"""PNML reader and writer for place/transition nets.

Accepted structure::

    pnml / net[@type] / page* / (place | transition | arc)

A place may carry ``initialMarking/text`` (default 0); an arc may carry
``inscription/text`` (default 1). Nested pages are flattened. Element ids are
used as place and transition names. Nets typed as symmetric or high-level,
or carrying colour declarations, are rejected.
"""
from __future__ import annotations

import xml.etree.ElementTree as ET

from .net import PetriNet, validate

PNML_NAMESPACE = "http://www.pnml.org/version-2009/grammar/pnml"
PT_NET_TYPE = "http://www.pnml.org/version-2009/grammar/ptnet"

_COLOURED_TYPES = ("symmetricnet", "highlevelnet", "coloured", "colored", "pt-hlpng")
_COLOURED_TAGS = {"declaration", "declarations", "hlinitialMarking", "hlinscription",
                  "condition", "type"}


class PnmlError(ValueError):
    """The document is not an acceptable P/T-net PNML file."""


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1] if isinstance(tag, str) else ""


def _child(elem, name):
    for c in elem:
        if _local(c.tag) == name:
            return c
    return None


def _text_of(elem, name):
    c = _child(elem, name)
    if c is None:
        return None
    t = _child(c, "text")
    if t is None or t.text is None:
        return None
    return t.text.strip()


def _int_value(raw, what):
    try:
        v = int(raw)
    except (TypeError, ValueError):
        raise PnmlError(f"{what}: expected an integer, got {raw!r}") from None
    return v


def parse_pnml(data: bytes | str) -> PetriNet:
    """Parse a PNML document holding exactly one P/T net."""
    try:
        root = ET.fromstring(data)
    except ET.ParseError as e:
        raise PnmlError(f"malformed XML: {e}") from None
    if _local(root.tag) != "pnml":
        raise PnmlError(f"root element is <{_local(root.tag)}>, expected <pnml>")
    nets = [c for c in root if _local(c.tag) == "net"]
    if len(nets) != 1:
        raise PnmlError(f"expected exactly one <net>, found {len(nets)}")
    net_el = nets[0]
    ntype = (net_el.get("type") or "").lower()
    if any(k in ntype for k in _COLOURED_TYPES):
        raise PnmlError(f"unsupported net type {net_el.get('type')!r}")
    net_name = _text_of(net_el, "name") or net_el.get("id") or "net"

    places: list[tuple[str, int]] = []
    transitions: list[str] = []
    arcs: list[tuple[str, str, str, int]] = []

    def walk(container):
        for el in container:
            tag = _local(el.tag)
            if tag in _COLOURED_TAGS:
                raise PnmlError(f"unsupported net type: coloured construct <{tag}>")
            if tag == "page":
                walk(el)
            elif tag == "place":
                for c in el:
                    if _local(c.tag) in _COLOURED_TAGS:
                        raise PnmlError("unsupported net type: coloured place "
                                        f"{el.get('id')!r}")
                pid = el.get("id")
                if not pid:
                    raise PnmlError("place without id")
                raw = _text_of(el, "initialMarking")
                k = 0 if raw in (None, "") else _int_value(raw, f"initial marking of {pid!r}")
                places.append((pid, k))
            elif tag == "transition":
                tid = el.get("id")
                if not tid:
                    raise PnmlError("transition without id")
                if _child(el, "condition") is not None:
                    raise PnmlError(f"unsupported net type: guarded transition {tid!r}")
                transitions.append(tid)
            elif tag == "arc":
                for c in el:
                    if _local(c.tag) in _COLOURED_TAGS:
                        raise PnmlError(f"unsupported net type: coloured arc {el.get('id')!r}")
                src, dst = el.get("source"), el.get("target")
                if not src or not dst:
                    raise PnmlError(f"arc {el.get('id')!r} lacks source or target")
                raw = _text_of(el, "inscription")
                w = 1 if raw in (None, "") else _int_value(raw, f"weight of arc {el.get('id')!r}")
                arcs.append((el.get("id") or "", src, dst, w))

    walk(net_el)

    place_ids = {p for p, _ in places}
    trans_ids = set(transitions)
    pre: dict[str, dict[str, int]] = {}
    post: dict[str, dict[str, int]] = {}
    for aid, src, dst, w in arcs:
        if src in place_ids and dst in trans_ids:
            row = pre.setdefault(dst, {})
            row[src] = row.get(src, 0) + w
        elif src in trans_ids and dst in place_ids:
            row = post.setdefault(src, {})
            row[dst] = row.get(dst, 0) + w
        elif src not in place_ids | trans_ids or dst not in place_ids | trans_ids:
            missing = src if src not in place_ids | trans_ids else dst
            raise PnmlError(f"arc {aid!r} references undeclared node {missing!r}")
        else:
            raise PnmlError(f"arc {aid!r} connects two nodes of the same kind")

    net = PetriNet(net_name, places, transitions, pre, post)
    problems = validate(net)
    if problems:
        raise PnmlError("invalid net: " + "; ".join(problems))
    return net


def write_pnml(net: PetriNet, namespace: str = PNML_NAMESPACE) -> bytes:
    """Serialize ``net``: places, then transitions, then arcs, each in net order."""
    problems = validate(net)
    if problems:
        raise ValueError("cannot write an invalid net: " + "; ".join(problems))
    ET.register_namespace("", namespace)
    q = (lambda t: f"{{{namespace}}}{t}") if namespace else (lambda t: t)

    root = ET.Element(q("pnml"))
    net_el = ET.SubElement(root, q("net"), {"id": net.name or "net", "type": PT_NET_TYPE})
    _named(net_el, q, net.name)
    page = ET.SubElement(net_el, q("page"), {"id": "page0"})
    for name, k in zip(net.place_names, net.initial):
        el = ET.SubElement(page, q("place"), {"id": name})
        _named(el, q, name)
        if k:
            _text(ET.SubElement(el, q("initialMarking")), q, str(k))
    for name in net.transition_names:
        el = ET.SubElement(page, q("transition"), {"id": name})
        _named(el, q, name)
    for i, (src, dst, w) in enumerate(net.arcs()):
        el = ET.SubElement(page, q("arc"), {"id": f"a{i}", "source": src, "target": dst})
        if w != 1:
            _text(ET.SubElement(el, q("inscription")), q, str(w))
    ET.indent(root, space="  ")
    return ET.tostring(root, encoding="utf-8", xml_declaration=True) + b"\n"


def _text(parent, q, value):
    t = ET.SubElement(parent, q("text"))
    t.text = value


def _named(parent, q, value):
    _text(ET.SubElement(parent, q("name")), q, value)


def read_pnml_file(path) -> PetriNet:
    with open(path, "rb") as f:
        return parse_pnml(f.read())


def write_pnml_file(net: PetriNet, path, namespace: str = PNML_NAMESPACE) -> None:
    with open(path, "wb") as f:
        f.write(write_pnml(net, namespace))
