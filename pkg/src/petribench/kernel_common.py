"""Pieces shared by the compiled and pure-Python exploration kernels."""
from __future__ import annotations

import numpy as np

from .net import MAX_TOKENS, PetriNet

WIDTHS = (1, 2, 4, 8)


class WidthOverflow(Exception):
    """A token count no longer fits the per-place encoding width."""


def max_value_for_width(width: int) -> int:
    if width == 8:
        return MAX_TOKENS
    return (1 << (8 * width)) - 1


def width_for(value: int) -> int:
    for w in WIDTHS:
        if value <= max_value_for_width(w):
            return w
    raise ValueError(f"{value} does not fit in 8 bytes")


def next_width(width: int) -> int:
    return WIDTHS[WIDTHS.index(width) + 1]


def encode_marking(m, width: int) -> bytes:
    """Canonical key of a marking: each place on ``width`` bytes, little-endian."""
    limit = max_value_for_width(width)
    out = bytearray()
    for v in m:
        if v < 0 or v > limit:
            raise WidthOverflow(width)
        out += int(v).to_bytes(width, "little")
    return bytes(out)


def decode_marking(data: bytes, width: int) -> tuple[int, ...]:
    return tuple(int.from_bytes(data[i:i + width], "little") for i in range(0, len(data), width))


def compile_net(net: PetriNet):
    """Compressed sparse arrays ``(pre_ptr, pre_place, pre_w, post_ptr, post_place, post_w)``."""
    cached = net._cache.get("csr")
    if cached is not None:
        return cached

    def pack(side):
        ptr, places, weights = [0], [], []
        for t in range(net.n_transitions):
            for p, w in side(t):
                places.append(p)
                weights.append(w)
            ptr.append(len(places))
        return (np.asarray(ptr, dtype=np.int64), np.asarray(places, dtype=np.int64),
                np.asarray(weights, dtype=np.int64))

    out = pack(net.pre) + pack(net.post)
    net._cache["csr"] = out
    return out
