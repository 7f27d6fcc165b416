"""Simple load balancer: clients, one balancer, two servers.

A client sends a request and waits for the reply. The balancer forwards each
request to the least loaded server (the first one on a tie), tracking each
server's load as a one-hot counter. Servers serve queued requests one at a
time, reply to the client, then notify the balancer, which decrements that
server's load, acknowledges, and may move one queued request from an
overloaded server to the other.
"""
from __future__ import annotations

from ..net import NetBuilder, PetriNet

SERVERS = (1, 2)


def simple_lbs(n: int, *, balance_after: str = "notification", threshold: int = 1,
               tie: str = "first", server_ack: bool = True, client_receive: bool = True,
               direct_route: bool = True, may_skip_balance: bool = False,
               notify_first: bool = False, reply_first: bool = True) -> PetriNet:
    """Build the ``n``-client instance.

    The keyword options select among structural variants of the protocol;
    the defaults give 832 markings for two clients.
    """
    b = NetBuilder(f"SimpleLbs-{n}")
    clients = range(1, n + 1)
    # A server's load counts routed requests whose notification the balancer has
    # not consumed yet, so it may exceed n by one.
    total = n + len(SERVERS)
    loads = range(n + 2)
    for c in clients:
        b.place(f"client_idle_{c}", 1)
        b.place(f"client_waiting_{c}")
        b.place(f"client_request_{c}")
        if client_receive:
            b.place(f"client_ack_{c}")
    b.place("lb_idle", 1)
    b.place("lb_balancing")
    if not direct_route:
        for c in clients:
            b.place(f"lb_routing_{c}")
    for s in SERVERS:
        for k in loads:
            b.place(f"lb_load_{s}_{k}", 1 if k == 0 else 0)
    for s in SERVERS:
        b.place(f"server_idle_{s}", 1)
        b.place(f"server_notification_{s}")
        if reply_first:
            b.place(f"server_notifying_{s}")
        if server_ack:
            b.place(f"server_wait_ack_{s}")
            b.place(f"server_notification_ack_{s}")
        for c in clients:
            b.place(f"server_waiting_{s}_{c}")
            b.place(f"server_processing_{s}_{c}")
            b.place(f"server_replying_{s}_{c}")

    after_route = "lb_balancing" if balance_after in ("route", "both") else "lb_idle"
    after_notif = "lb_balancing" if balance_after in ("notification", "both") else "lb_idle"

    for c in clients:
        done = f"client_ack_{c}" if client_receive else f"client_idle_{c}"
        b.transition(f"client_send_{c}", {f"client_idle_{c}": 1},
                     {f"client_waiting_{c}": 1, f"client_request_{c}": 1})
        if client_receive:
            b.transition(f"client_receive_{c}", {f"client_waiting_{c}": 1, done: 1},
                         {f"client_idle_{c}": 1})

    def targets(i, j):
        if i < j:
            return (1,)
        if j < i:
            return (2,)
        return (1, 2) if tie == "both" else (1,)

    for c in clients:
        req = f"client_request_{c}"
        for i in loads:
            for j in loads:
                if i + j >= total:
                    continue
                for s in targets(i, j):
                    ni, nj = (i + 1, j) if s == 1 else (i, j + 1)
                    pre = {f"lb_load_1_{i}": 1, f"lb_load_2_{j}": 1}
                    post = {f"lb_load_1_{ni}": 1, f"lb_load_2_{nj}": 1,
                            f"server_waiting_{s}_{c}": 1, after_route: 1}
                    if direct_route:
                        pre.update({"lb_idle": 1, req: 1})
                    else:
                        pre[f"lb_routing_{c}"] = 1
                    b.transition(f"lb_route_{c}_to_{s}_{i}_{j}", pre, post)
        if not direct_route:
            b.transition(f"lb_receive_client_{c}", {"lb_idle": 1, req: 1},
                         {f"lb_routing_{c}": 1})

    for i in loads:
        for j in loads:
            if i + j > total:
                continue
            reads = {f"lb_load_1_{i}": 1, f"lb_load_2_{j}": 1}
            if abs(i - j) < threshold or may_skip_balance:
                b.transition(f"lb_no_balance_{i}_{j}", {"lb_balancing": 1, **reads},
                             {"lb_idle": 1, **reads})
            if abs(i - j) >= threshold:
                hi, lo = (1, 2) if i > j else (2, 1)
                ni, nj = (i - 1, j + 1) if hi == 1 else (i + 1, j - 1)
                for c in clients:
                    b.transition(
                        f"lb_balance_{c}_{hi}_to_{lo}_{i}_{j}",
                        {"lb_balancing": 1, **reads, f"server_waiting_{hi}_{c}": 1},
                        {"lb_idle": 1, f"lb_load_1_{ni}": 1, f"lb_load_2_{nj}": 1,
                         f"server_waiting_{lo}_{c}": 1},
                    )

    for s in SERVERS:
        finished = f"server_wait_ack_{s}" if server_ack else f"server_idle_{s}"
        for c in clients:
            done = f"client_ack_{c}" if client_receive else f"client_idle_{c}"
            proc = f"server_processing_{s}_{c}"
            b.transition(f"server_start_{s}_{c}",
                         {f"server_idle_{s}": 1, f"server_waiting_{s}_{c}": 1}, {proc: 1})
            if reply_first:
                b.transition(f"server_reply_{s}_{c}", {proc: 1},
                             {done: 1, f"server_notifying_{s}": 1})
            elif notify_first:
                b.transition(f"server_notify_{s}_{c}", {proc: 1},
                             {f"server_replying_{s}_{c}": 1, f"server_notification_{s}": 1})
                b.transition(f"server_reply_{s}_{c}", {f"server_replying_{s}_{c}": 1},
                             {done: 1, finished: 1})
            else:
                b.transition(f"server_reply_{s}_{c}", {proc: 1},
                             {done: 1, f"server_notification_{s}": 1, finished: 1})
        if reply_first:
            b.transition(f"server_notify_{s}", {f"server_notifying_{s}": 1},
                         {f"server_notification_{s}": 1, finished: 1})
        for k in loads:
            if k == 0:
                continue
            post = {f"lb_load_{s}_{k - 1}": 1, after_notif: 1}
            if server_ack:
                post[f"server_notification_ack_{s}"] = 1
            b.transition(f"lb_receive_notification_{s}_{k}",
                         {"lb_idle": 1, f"server_notification_{s}": 1, f"lb_load_{s}_{k}": 1},
                         post)
        if server_ack:
            b.transition(f"server_receive_ack_{s}",
                         {f"server_wait_ack_{s}": 1, f"server_notification_ack_{s}": 1},
                         {f"server_idle_{s}": 1})
    return b.build()
