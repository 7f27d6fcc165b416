"""Brute-force reference implementations used as test oracles.

Nothing here calls the package's firing rule, kernels or evaluator: markings
are plain tuples, the state space is a Python set, and formulae are decided
by direct recursion over the full enumeration.
"""
from __future__ import annotations

import random
from collections import deque

from petribench.formula import (And, Bound, Compare, Deadlock, Fireable, LivenessAtom, Not, Or,
                                Reach, Safe, Tokens)
from petribench.net import NetBuilder

_OPS = {"<=": lambda a, b: a <= b, "<": lambda a, b: a < b, "=": lambda a, b: a == b,
        ">=": lambda a, b: a >= b, ">": lambda a, b: a > b, "!=": lambda a, b: a != b}


class TooBig(Exception):
    pass


class StateSpace:
    def __init__(self, net, limit=10**5):
        self.net = net
        self.places = list(net.place_names)
        self.trans = list(net.transition_names)
        self.pre = [dict(net.pre(i)) for i in range(len(self.trans))]
        self.post = [dict(net.post(i)) for i in range(len(self.trans))]
        init = tuple(net.initial)
        self.states = [init]
        self.index = {init: 0}
        self.edges = []  # (src, t, dst)
        queue = deque([init])
        while queue:
            m = queue.popleft()
            src = self.index[m]
            for t in range(len(self.trans)):
                if not self.can_fire(m, t):
                    continue
                nxt = list(m)
                for p, w in self.pre[t].items():
                    nxt[p] -= w
                for p, w in self.post[t].items():
                    nxt[p] += w
                nxt = tuple(nxt)
                if nxt not in self.index:
                    if len(self.states) >= limit:
                        raise TooBig(net.name)
                    self.index[nxt] = len(self.states)
                    self.states.append(nxt)
                    queue.append(nxt)
                self.edges.append((src, t, self.index[nxt]))

    def can_fire(self, m, t):
        return all(m[p] >= w for p, w in self.pre[t].items())

    @property
    def count(self):
        return len(self.states)

    def bounds(self):
        return tuple(max(s[i] for s in self.states) for i in range(len(self.places)))

    def fired(self):
        return frozenset(self.trans[t] for _, t, _ in self.edges)

    def dead(self):
        return [m for m in self.states if not any(self.can_fire(m, t) for t in range(len(self.trans)))]

    def live(self):
        """L4 per transition: from every state, some path reaches an edge labelled t."""
        n = self.count
        pred = [[] for _ in range(n)]
        for s, _, d in self.edges:
            pred[d].append(s)
        out = []
        for t in range(len(self.trans)):
            good = {s for s, tt, _ in self.edges if tt == t}
            stack = list(good)
            while stack:
                d = stack.pop()
                for s in pred[d]:
                    if s not in good:
                        good.add(s)
                        stack.append(s)
            out.append(len(good) == n)
        return out

    # formulae --------------------------------------------------------
    def pred(self, p, m):
        if isinstance(p, Compare):
            left = m[self.places.index(p.left.place)]
            right = m[self.places.index(p.right.place)] if isinstance(p.right, Tokens) else p.right
            return _OPS[p.op](left, right)
        if isinstance(p, Fireable):
            return self.can_fire(m, self.trans.index(p.transition))
        if isinstance(p, Not):
            return not self.pred(p.arg, m)
        if isinstance(p, And):
            return self.pred(p.left, m) and self.pred(p.right, m)
        if isinstance(p, Or):
            return self.pred(p.left, m) or self.pred(p.right, m)
        raise TypeError(p)

    def formula(self, f):
        try:
            if isinstance(f, Deadlock):
                return bool(self.dead())
            if isinstance(f, Safe):
                return all(b <= 1 for b in self.bounds())
            if isinstance(f, Bound):
                return _OPS[f.op](self.bounds()[self.places.index(f.place)], f.k)
            if isinstance(f, LivenessAtom):
                ti = self.trans.index(f.transition)
                if f.level == "L4":
                    return self.live()[ti]
                fired = self.trans[ti] in self.fired()
                return not fired if f.level == "L0" else fired
            if isinstance(f, Reach):
                vals = [self.pred(f.pred, m) for m in self.states]
                return any(vals) if f.quantifier == "EF" else all(vals)
        except ValueError:  # unknown name
            return None
        raise TypeError(f)

    def vector(self, fs):
        return "".join({True: "T", False: "F", None: "."}[self.formula(f)] for f in fs.formulae())


def random_net(seed, max_places=6, max_transitions=6, max_weight=2, max_tokens=2, name=None):
    """A seeded random P/T net; may be unbounded."""
    rng = random.Random(seed)
    b = NetBuilder(name or f"rnd{seed}")
    n_p = rng.randint(1, max_places)
    n_t = rng.randint(1, max_transitions)
    places = [b.place(f"p{i}", rng.randint(0, max_tokens)) for i in range(n_p)]
    for j in range(n_t):
        pre = {p: rng.randint(1, max_weight) for p in rng.sample(places, rng.randint(0, min(3, n_p)))}
        post = {p: rng.randint(1, max_weight) for p in rng.sample(places, rng.randint(0, min(3, n_p)))}
        b.transition(f"t{j}", pre, post)
    return b.build()


def bounded_random_nets(count, seed=0, limit=10**4, **kw):
    """``count`` random nets whose state spaces hold at most ``limit`` markings."""
    out = []
    s = seed
    while len(out) < count:
        net = random_net(s, **kw)
        s += 1
        try:
            StateSpace(net, limit)
        except TooBig:
            continue
        out.append(net)
    return out
