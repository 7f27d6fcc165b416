"""Place/Transition nets and the firing rule."""
from __future__ import annotations

from typing import Iterable, Mapping, Sequence, Union

# Token counts are stored as non-negative signed 64-bit values.
MAX_TOKENS = 2**63 - 1

Marking = tuple  # dense tuple of ints, indexed by place order
TransitionRef = Union[str, int]


class NetError(Exception):
    """Base class for net-level errors."""


class StructuralError(NetError):
    """Raised for references to places or transitions that do not exist."""


class PreconditionError(NetError):
    """Raised when firing a transition that is not enabled."""


class TokenOverflowError(NetError):
    """A token count would exceed ``MAX_TOKENS``."""


class PetriNet:
    """An immutable weighted P/T net with an initial marking.

    Parameters
    ----------
    name : str
        Net identifier.
    places : sequence of (name, initial_tokens)
        Places in their canonical order.
    transitions : sequence of str
        Transition names in their canonical order.
    pre, post : mapping
        ``transition name -> {place name: weight}``. Missing transitions have
        no arcs on that side.

    The constructor does not reject malformed input; call :func:`validate`
    to list structural problems. Arcs that reference unknown nodes are kept
    aside so that they can be reported.
    """

    __slots__ = (
        "name", "place_names", "initial", "transition_names",
        "_pre", "_post", "_place_index", "_trans_index", "_dangling", "_cache",
    )

    def __init__(
        self,
        name: str,
        places: Sequence[tuple[str, int]],
        transitions: Sequence[str],
        pre: Mapping[str, Mapping[str, int]] | None = None,
        post: Mapping[str, Mapping[str, int]] | None = None,
    ):
        self.name = name
        self.place_names = tuple(p for p, _ in places)
        self.initial = tuple(int(k) for _, k in places)
        self.transition_names = tuple(transitions)
        self._place_index = {p: i for i, p in enumerate(self.place_names)}
        self._trans_index = {t: i for i, t in enumerate(self.transition_names)}
        self._dangling: list[str] = []
        self._pre = self._arcs(pre or {}, "pre")
        self._post = self._arcs(post or {}, "post")
        self._cache: dict = {}

    def _arcs(self, arcs, side):
        out = [() for _ in self.transition_names]
        for t, row in arcs.items():
            ti = self._trans_index.get(t)
            if ti is None:
                self._dangling.append(f"{side} arcs of unknown transition {t!r}")
                continue
            vec = []
            for p, w in row.items():
                pi = self._place_index.get(p)
                if pi is None:
                    self._dangling.append(f"{side} arc of {t!r} references unknown place {p!r}")
                    continue
                vec.append((pi, int(w)))
            vec.sort()
            out[ti] = tuple(vec)
        return tuple(out)

    # -- shape -----------------------------------------------------------
    @property
    def n_places(self) -> int:
        return len(self.place_names)

    @property
    def n_transitions(self) -> int:
        return len(self.transition_names)

    @property
    def initial_marking(self) -> Marking:
        return self.initial

    def place_index(self, place: str | int) -> int:
        if isinstance(place, int):
            if 0 <= place < self.n_places:
                return place
        elif place in self._place_index:
            return self._place_index[place]
        raise StructuralError(f"unknown place {place!r}")

    def transition_index(self, t: TransitionRef) -> int:
        if isinstance(t, int):
            if 0 <= t < self.n_transitions:
                return t
        elif t in self._trans_index:
            return self._trans_index[t]
        raise StructuralError(f"unknown transition {t!r}")

    def pre(self, t: TransitionRef) -> tuple[tuple[int, int], ...]:
        """Sparse input vector of ``t`` as ``(place index, weight)`` pairs."""
        return self._pre[self.transition_index(t)]

    def post(self, t: TransitionRef) -> tuple[tuple[int, int], ...]:
        return self._post[self.transition_index(t)]

    def pre_named(self, t: TransitionRef) -> dict[str, int]:
        return {self.place_names[p]: w for p, w in self.pre(t)}

    def post_named(self, t: TransitionRef) -> dict[str, int]:
        return {self.place_names[p]: w for p, w in self.post(t)}

    def arcs(self) -> Iterable[tuple[str, str, int]]:
        """Yield ``(source, target, weight)`` for every arc, pre arcs first per transition."""
        for ti, t in enumerate(self.transition_names):
            for p, w in self._pre[ti]:
                yield self.place_names[p], t, w
            for p, w in self._post[ti]:
                yield t, self.place_names[p], w

    # -- equality --------------------------------------------------------
    def _key(self):
        places = sorted(zip(self.place_names, self.initial))
        arcs = sorted(
            (t, tuple(sorted(self.pre_named(t).items())), tuple(sorted(self.post_named(t).items())))
            for t in self.transition_names
        )
        return self.name, tuple(places), arcs

    def __eq__(self, other):
        if not isinstance(other, PetriNet):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash((self.name, self.n_places, self.n_transitions))

    def __repr__(self):
        return f"PetriNet({self.name!r}, places={self.n_places}, transitions={self.n_transitions})"


def _check_marking(net: PetriNet, m) -> None:
    if len(m) != net.n_places:
        raise StructuralError(
            f"marking has {len(m)} entries, net {net.name!r} has {net.n_places} places"
        )


def enabled(net: PetriNet, m: Marking, t: TransitionRef) -> bool:
    _check_marking(net, m)
    return all(m[p] >= w for p, w in net.pre(t))


def fire(net: PetriNet, m: Marking, t: TransitionRef) -> Marking:
    """Return the marking reached by firing ``t`` at ``m``; ``m`` is left untouched."""
    _check_marking(net, m)
    ti = net.transition_index(t)
    out = list(m)
    for p, w in net.pre(ti):
        if out[p] < w:
            raise PreconditionError(
                f"transition {net.transition_names[ti]!r} is not enabled "
                f"(place {net.place_names[p]!r} holds {out[p]}, needs {w})"
            )
        out[p] -= w
    for p, w in net.post(ti):
        out[p] += w
        if out[p] > MAX_TOKENS:
            raise TokenOverflowError(f"place {net.place_names[p]!r} exceeds {MAX_TOKENS} tokens")
    return tuple(out)


def successors(net: PetriNet, m: Marking) -> list[tuple[str, Marking]]:
    """Enabled transitions with their target markings, in transition order."""
    _check_marking(net, m)
    out = []
    for ti, t in enumerate(net.transition_names):
        if all(m[p] >= w for p, w in net.pre(ti)):
            out.append((t, fire(net, m, ti)))
    return out


def validate(net: PetriNet) -> list[str]:
    """List every violated structural invariant; an empty list means the net is valid."""
    problems = list(net._dangling)
    for kind, names in (("place", net.place_names), ("transition", net.transition_names)):
        seen = set()
        for n in names:
            if not isinstance(n, str) or not n:
                problems.append(f"{kind} with empty or non-string name {n!r}")
            elif n in seen:
                problems.append(f"duplicate {kind} name {n!r}")
            seen.add(n)
    if set(net.place_names) & set(net.transition_names):
        for n in sorted(set(net.place_names) & set(net.transition_names)):
            problems.append(f"name {n!r} is used by both a place and a transition")
    for p, k in zip(net.place_names, net.initial):
        if k < 0:
            problems.append(f"place {p!r} has negative initial marking {k}")
        elif k > MAX_TOKENS:
            problems.append(f"place {p!r} initial marking exceeds {MAX_TOKENS}")
    for side, arcs in (("input", net._pre), ("output", net._post)):
        for ti, row in enumerate(arcs):
            for p, w in row:
                if w < 1:
                    problems.append(
                        f"{side} arc between {net.place_names[p]!r} and "
                        f"{net.transition_names[ti]!r} has weight {w}"
                    )
    return problems


class NetBuilder:
    """Incremental construction helper used by the model generators."""

    def __init__(self, name: str):
        self.name = name
        self._places: dict[str, int] = {}
        self._trans: dict[str, tuple[dict, dict]] = {}

    def place(self, name: str, tokens: int = 0) -> str:
        if name in self._places:
            raise ValueError(f"duplicate place {name!r}")
        self._places[name] = tokens
        return name

    def transition(self, name: str, pre: Mapping[str, int], post: Mapping[str, int]) -> str:
        if name in self._trans:
            raise ValueError(f"duplicate transition {name!r}")
        self._trans[name] = (dict(pre), dict(post))
        return name

    def build(self) -> PetriNet:
        return PetriNet(
            self.name,
            list(self._places.items()),
            list(self._trans),
            {t: pre for t, (pre, _) in self._trans.items() if pre},
            {t: post for t, (_, post) in self._trans.items() if post},
        )


def reverse_fire(net: PetriNet, m: Marking, t: TransitionRef) -> Marking:
    """Undo a firing of ``t``: ``m + pre(t) - post(t)``."""
    ti = net.transition_index(t)
    out = list(m)
    for p, w in net.pre(ti):
        out[p] += w
    for p, w in net.post(ti):
        out[p] -= w
    return tuple(out)
