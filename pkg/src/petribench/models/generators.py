"""Net generators, one function per family.

Each generator is a pure function of its scaling value. Place and transition
names follow the usual benchmark conventions, with ``_i`` suffixes for
replicated components.
"""
from __future__ import annotations

from ..net import NetBuilder, PetriNet


def philosophers(n: int) -> PetriNet:
    """Dining philosophers who pick up either fork first.

    Each philosopher has five places: thinking, its own fork, holding the
    left fork, holding the right fork, and eating.
    """
    b = NetBuilder(f"Philosophers-{n}")
    for i in range(n):
        b.place(f"Think_{i}", 1)
        b.place(f"Fork_{i}", 1)
        b.place(f"Catch1_{i}")
        b.place(f"Catch2_{i}")
        b.place(f"Eat_{i}")
    for i in range(n):
        left, right = f"Fork_{i}", f"Fork_{(i + 1) % n}"
        think, c1, c2, eat = f"Think_{i}", f"Catch1_{i}", f"Catch2_{i}", f"Eat_{i}"
        b.transition(f"TakeLeft_{i}", {think: 1, left: 1}, {c1: 1})
        b.transition(f"TakeRight_{i}", {think: 1, right: 1}, {c2: 1})
        b.transition(f"TakeRightSecond_{i}", {c1: 1, right: 1}, {eat: 1})
        b.transition(f"TakeLeftSecond_{i}", {c2: 1, left: 1}, {eat: 1})
        if left == right:
            b.transition(f"Release_{i}", {eat: 1}, {think: 1, left: 2})
        else:
            b.transition(f"Release_{i}", {eat: 1}, {think: 1, left: 1, right: 1})
    return b.build()


def fms(n: int) -> PetriNet:
    """Flexible manufacturing system with three part types and three machine pools."""
    b = NetBuilder(f"FMS-{n}")
    for p in ("P1", "P1wM1", "P1M1", "P1d", "P1s", "P1wP2", "P12", "P12wM3", "P12M3",
              "P12s", "P2", "P2wM2", "P2M2", "P2d", "P2s", "P2wP1", "P3", "P3M2", "P3s"):
        b.place(p, n if p in ("P1", "P2", "P3") else 0)
    b.place("M1", 3)
    b.place("M2", 1)
    b.place("M3", 2)
    arcs = [
        ("tP1", {"P1": 1}, {"P1wM1": 1}),
        ("tM1", {"P1wM1": 1, "M1": 1}, {"P1M1": 1}),
        ("tP1M1", {"P1M1": 1}, {"M1": 1, "P1d": 1}),
        ("tP1e", {"P1d": 1}, {"P1s": 1}),
        ("tP1j", {"P1d": 1}, {"P1wP2": 1}),
        ("tP1s", {"P1s": 1}, {"P1": 1}),
        ("tx", {"P1wP2": 1, "P2wP1": 1}, {"P12": 1}),
        ("tP12", {"P12": 1}, {"P12wM3": 1}),
        ("tM3", {"P12wM3": 1, "M3": 1}, {"P12M3": 1}),
        ("tP12M3", {"P12M3": 1}, {"M3": 1, "P12s": 1}),
        ("tP12s", {"P12s": 1}, {"P1": 1, "P2": 1}),
        ("tP2", {"P2": 1}, {"P2wM2": 1}),
        ("tM2", {"P2wM2": 1, "M2": 1}, {"P2M2": 1}),
        ("tP2M2", {"P2M2": 1}, {"M2": 1, "P2d": 1}),
        ("tP2e", {"P2d": 1}, {"P2s": 1}),
        ("tP2j", {"P2d": 1}, {"P2wP1": 1}),
        ("tP2s", {"P2s": 1}, {"P2": 1}),
        ("tP3", {"P3": 1}, {"P3M2": 1}),
        ("tP3M2", {"P3M2": 1}, {"P3s": 1}),
        ("tP3s", {"P3s": 1}, {"P3": 1}),
    ]
    for name, pre, post in arcs:
        b.transition(name, pre, post)
    return b.build()


def kanban(n: int) -> PetriNet:
    """Four-cell Kanban line; every cell starts with ``n`` kanban cards."""
    b = NetBuilder(f"Kanban-{n}")
    for i in range(1, 5):
        b.place(f"Pm{i}")
        b.place(f"Pback{i}")
        b.place(f"Pkan{i}", n)
        b.place(f"Pout{i}")
    b.transition("tin1", {"Pkan1": 1}, {"Pm1": 1})
    for i in range(1, 5):
        b.transition(f"tredo{i}", {f"Pm{i}": 1}, {f"Pback{i}": 1})
        b.transition(f"tok{i}", {f"Pm{i}": 1}, {f"Pout{i}": 1})
        b.transition(f"tback{i}", {f"Pback{i}": 1}, {f"Pm{i}": 1})
    b.transition("tsynch1_23", {"Pout1": 1, "Pkan2": 1, "Pkan3": 1},
                 {"Pkan1": 1, "Pm2": 1, "Pm3": 1})
    b.transition("tsynch4_23", {"Pout2": 1, "Pout3": 1, "Pkan4": 1},
                 {"Pkan2": 1, "Pkan3": 1, "Pm4": 1})
    b.transition("tout4", {"Pout4": 1}, {"Pkan4": 1})
    return b.build()


def shared_memory(n: int) -> PetriNet:
    """``n`` processors, each with a local memory, sharing one external bus."""
    b = NetBuilder(f"SharedMemory-{n}")
    b.place("Ext_Bus", 1)
    for p in range(n):
        b.place(f"Active_{p}", 1)
        b.place(f"Memory_{p}", 1)
        b.place(f"Queue_{p}")
        b.place(f"OwnMemAcc_{p}")
    for p in range(n):
        for q in range(n):
            if p != q:
                b.place(f"Ext_Mem_Acc_{p}_{q}")
    for p in range(n):
        act, mem, queue, own = f"Active_{p}", f"Memory_{p}", f"Queue_{p}", f"OwnMemAcc_{p}"
        b.transition(f"Begin_Own_Acc_{p}", {act: 1, mem: 1}, {own: 1, mem: 1})
        b.transition(f"End_Own_Acc_{p}", {own: 1}, {act: 1})
        b.transition(f"Req_Ext_Acc_{p}", {act: 1}, {queue: 1})
        for q in range(n):
            if p == q:
                continue
            acc = f"Ext_Mem_Acc_{p}_{q}"
            b.transition(f"Begin_Ext_Acc_{p}_{q}",
                         {queue: 1, f"Memory_{q}": 1, "Ext_Bus": 1}, {acc: 1})
            b.transition(f"End_Ext_Acc_{p}_{q}",
                         {acc: 1}, {act: 1, f"Memory_{q}": 1, "Ext_Bus": 1})
    return b.build()


def token_ring(n: int) -> PetriNet:
    """Self-stabilizing token ring with machines ``0..n`` and ``n+1`` local values.

    ``State_i_v`` holds the token when machine ``i`` has value ``v``. Machine
    0 increments its value when it equals its predecessor's; any other machine
    copies a differing predecessor value.
    """
    k = n + 1
    b = NetBuilder(f"TokenRing-{n}")
    for i in range(k):
        for v in range(k):
            b.place(f"State_{i}_{v}", 1 if v == i else 0)
    last = n
    for v in range(k):
        b.transition(f"Bottom_{v}",
                     {f"State_0_{v}": 1, f"State_{last}_{v}": 1},
                     {f"State_0_{(v + 1) % k}": 1, f"State_{last}_{v}": 1})
    for i in range(1, k):
        for a in range(k):
            for c in range(k):
                if a == c:
                    continue
                b.transition(f"Copy_{i}_{a}_{c}",
                             {f"State_{i - 1}_{a}": 1, f"State_{i}_{c}": 1},
                             {f"State_{i - 1}_{a}": 1, f"State_{i}_{a}": 1})
    return b.build()


def peterson(n: int) -> PetriNet:
    """Generalized Peterson mutual exclusion: ``n + 1`` processes climb ``n`` levels."""
    nproc, ntour = n + 1, n
    b = NetBuilder(f"Peterson-{n}")
    procs, tours = range(nproc), range(ntour)
    for i in procs:
        b.place(f"Idle_{i}", 1)
        b.place(f"WantF_{i}", 1)
        b.place(f"WantT_{i}")
        b.place(f"CS_{i}")
        for j in tours:
            b.place(f"AskForSection_{i}_{j}")
            b.place(f"TestTurn_{i}_{j}")
            b.place(f"EndTurn_{i}_{j}")
            for k in procs:
                b.place(f"BeginLoop_{i}_{j}_{k}")
                b.place(f"TestIdentity_{i}_{j}_{k}")
                b.place(f"TestAlone_{i}_{j}_{k}")
                b.place(f"IsEndLoop_{i}_{j}_{k}")
    for j in tours:
        for k in procs:
            b.place(f"Turn_{j}_{k}", 1 if k == 0 else 0)

    for i in procs:
        b.transition(f"Ask_{i}", {f"Idle_{i}": 1, f"WantF_{i}": 1},
                     {f"WantT_{i}": 1, f"AskForSection_{i}_0": 1})
        for j in tours:
            ask, test = f"AskForSection_{i}_{j}", f"TestTurn_{i}_{j}"
            for k in procs:
                turn = f"Turn_{j}_{k}"
                post = {test: 1, f"Turn_{j}_{i}": 1}
                b.transition(f"UpdateTurn_{i}_{j}_{k}", {ask: 1, turn: 1}, post)
            b.transition(f"TurnEqual_{i}_{j}", {test: 1, f"Turn_{j}_{i}": 1},
                         {f"BeginLoop_{i}_{j}_0": 1, f"Turn_{j}_{i}": 1})
            for k in procs:
                if k != i:
                    b.transition(f"TurnDiff_{i}_{j}_{k}", {test: 1, f"Turn_{j}_{k}": 1},
                                 {f"EndTurn_{i}_{j}": 1, f"Turn_{j}_{k}": 1})
            for k in procs:
                begin, ident = f"BeginLoop_{i}_{j}_{k}", f"TestIdentity_{i}_{j}_{k}"
                alone, endl = f"TestAlone_{i}_{j}_{k}", f"IsEndLoop_{i}_{j}_{k}"
                b.transition(f"ContinueLoop_{i}_{j}_{k}", {begin: 1}, {ident: 1})
                if k == i:
                    b.transition(f"Identity_{i}_{j}_{k}", {ident: 1}, {endl: 1})
                else:
                    b.transition(f"NotIdentity_{i}_{j}_{k}", {ident: 1}, {alone: 1})
                    b.transition(f"Alone1_{i}_{j}_{k}", {alone: 1, f"WantF_{k}": 1},
                                 {endl: 1, f"WantF_{k}": 1})
                    for m in tours:
                        other = f"AskForSection_{k}_{m}"
                        if m < j:
                            b.transition(f"Alone2_{i}_{j}_{k}_{m}", {alone: 1, other: 1},
                                         {endl: 1, other: 1})
                        else:
                            b.transition(f"NotAlone_{i}_{j}_{k}_{m}", {alone: 1, other: 1},
                                         {test: 1, other: 1})
                if k < nproc - 1:
                    b.transition(f"Loop_{i}_{j}_{k}", {endl: 1},
                                 {f"BeginLoop_{i}_{j}_{k + 1}": 1})
                else:
                    b.transition(f"EndLoop_{i}_{j}", {endl: 1}, {f"EndTurn_{i}_{j}": 1})
            if j < ntour - 1:
                b.transition(f"ProgressTurn_{i}_{j}", {f"EndTurn_{i}_{j}": 1},
                             {f"AskForSection_{i}_{j + 1}": 1})
            else:
                b.transition(f"AccessCS_{i}", {f"EndTurn_{i}_{j}": 1}, {f"CS_{i}": 1})
        b.transition(f"BecomeIdle_{i}", {f"CS_{i}": 1, f"WantT_{i}": 1},
                     {f"Idle_{i}": 1, f"WantF_{i}": 1})
    return b.build()


_LAMPORT_PCS = ("start", "setx", "ify0", "setbi5", "awaity", "sety", "ifxi", "setbi11",
                "fordo", "await13", "ifyi", "CS", "setbi24")


def lamport(n: int) -> PetriNet:
    """Lamport's fast mutual exclusion for processes ``1..n``.

    Shared variables ``x`` and ``y`` range over ``0..n`` and are encoded one
    place per value; each boolean ``b_i`` uses a true and a false place.
    """
    b = NetBuilder(f"Lamport-{n}")
    pids = range(1, n + 1)
    vals = range(n + 1)
    for v in vals:
        b.place(f"x_{v}", 1 if v == 0 else 0)
    for v in vals:
        b.place(f"y_{v}", 1 if v == 0 else 0)
    for i in pids:
        for pc in _LAMPORT_PCS:
            b.place(f"at_{pc}_{i}", 1 if pc == "start" else 0)
        b.place(f"bF_{i}", 1)
        b.place(f"bT_{i}")
        for j in pids:
            b.place(f"wait_{i}_{j}", 1)
            b.place(f"done_{i}_{j}")

    def step(name, src, dst, pre=None, post=None):
        b.transition(name, {src: 1, **(pre or {})}, {dst: 1, **(post or {})})

    for i in pids:
        pc = {p: f"at_{p}_{i}" for p in _LAMPORT_PCS}
        bF, bT = f"bF_{i}", f"bT_{i}"
        step(f"setbi2_{i}", pc["start"], pc["setx"], {bF: 1}, {bT: 1})
        for v in vals:
            if v == i:
                step(f"setx_{i}_{v}", pc["setx"], pc["ify0"], {f"x_{v}": 1}, {f"x_{v}": 1})
            else:
                step(f"setx_{i}_{v}", pc["setx"], pc["ify0"], {f"x_{v}": 1}, {f"x_{i}": 1})
        step(f"yeq0_{i}", pc["ify0"], pc["sety"], {"y_0": 1}, {"y_0": 1})
        for v in vals:
            if v:
                step(f"yne0_{i}_{v}", pc["ify0"], pc["setbi5"], {f"y_{v}": 1}, {f"y_{v}": 1})
        step(f"setbi5_{i}", pc["setbi5"], pc["awaity"], {bT: 1}, {bF: 1})
        step(f"awaity_{i}", pc["awaity"], pc["start"], {"y_0": 1}, {"y_0": 1})
        for v in vals:
            if v == i:
                step(f"sety_{i}_{v}", pc["sety"], pc["ifxi"], {f"y_{v}": 1}, {f"y_{v}": 1})
            else:
                step(f"sety_{i}_{v}", pc["sety"], pc["ifxi"], {f"y_{v}": 1}, {f"y_{i}": 1})
        step(f"xeqi_{i}", pc["ifxi"], pc["CS"], {f"x_{i}": 1}, {f"x_{i}": 1})
        for v in vals:
            if v != i:
                step(f"xnei_{i}_{v}", pc["ifxi"], pc["setbi11"], {f"x_{v}": 1}, {f"x_{v}": 1})
        step(f"setbi11_{i}", pc["setbi11"], pc["fordo"], {bT: 1}, {bF: 1})
        step(f"fordo_{i}", pc["fordo"], pc["await13"])
        for j in pids:
            step(f"await13_{i}_{j}", pc["await13"], pc["await13"],
                 {f"wait_{i}_{j}": 1, f"bF_{j}": 1}, {f"done_{i}_{j}": 1, f"bF_{j}": 1})
        step(f"forod_{i}", pc["await13"], pc["ifyi"],
             {f"done_{i}_{j}": 1 for j in pids}, {f"wait_{i}_{j}": 1 for j in pids})
        step(f"yeqi_{i}", pc["ifyi"], pc["CS"], {f"y_{i}": 1}, {f"y_{i}": 1})
        for v in vals:
            if v != i:
                step(f"ynei_{i}_{v}", pc["ifyi"], pc["awaity"], {f"y_{v}": 1}, {f"y_{v}": 1})
        for v in vals:
            if v == 0:
                step(f"sety0_{i}_{v}", pc["CS"], pc["setbi24"], {"y_0": 1}, {"y_0": 1})
            else:
                step(f"sety0_{i}_{v}", pc["CS"], pc["setbi24"], {f"y_{v}": 1}, {"y_0": 1})
        step(f"setbi24T_{i}", pc["setbi24"], pc["start"], {bT: 1}, {bF: 1})
        step(f"setbi24F_{i}", pc["setbi24"], pc["start"], {bF: 1}, {bF: 1})
    return b.build()


def eratosthenes(n: int) -> PetriNet:
    """Sieve over ``2..n``: a number is crossed out by any proper divisor still present."""
    b = NetBuilder(f"Eratosthenes-{n}")
    for k in range(2, n + 1):
        b.place(f"Num_{k}", 1)
    for k in range(2, n + 1):
        for d in range(2, k):
            if k % d == 0:
                b.transition(f"Remove_{k}_by_{d}", {f"Num_{d}": 1, f"Num_{k}": 1},
                             {f"Num_{d}": 1})
    return b.build()


def rw_mutex(r: int, w: int) -> PetriNet:
    """``r`` readers with one semaphore each; a writer must take every semaphore."""
    b = NetBuilder(f"RwMutex-r{r}w{w}")
    for i in range(r):
        b.place(f"IdleR_{i}", 1)
        b.place(f"Reading_{i}")
        b.place(f"Mutex_{i}", 1)
    for j in range(w):
        b.place(f"IdleW_{j}", 1)
        b.place(f"Writing_{j}")
    for i in range(r):
        b.transition(f"BeginRead_{i}", {f"IdleR_{i}": 1, f"Mutex_{i}": 1}, {f"Reading_{i}": 1})
        b.transition(f"EndRead_{i}", {f"Reading_{i}": 1}, {f"IdleR_{i}": 1, f"Mutex_{i}": 1})
    sems = {f"Mutex_{i}": 1 for i in range(r)}
    for j in range(w):
        b.transition(f"BeginWrite_{j}", {f"IdleW_{j}": 1, **sems}, {f"Writing_{j}": 1})
        b.transition(f"EndWrite_{j}", {f"Writing_{j}": 1}, {f"IdleW_{j}": 1, **sems})
    return b.build()
