"""Synthetic workloads for exercising confinement.

Run as ``python -m petribench.workloads <kind> [arg]``:

``noop``          exit immediately
``busy SECONDS``  spin on the CPU (forever when omitted)
``alloc MIB``     grow resident memory in 4 MiB steps up to MIB, then hold it
``sleep SECONDS`` sleep
"""
from __future__ import annotations

import sys
import time

CHUNK = 4 * 1024 * 1024


def busy(seconds: float | None = None) -> None:
    end = None if seconds is None else time.monotonic() + seconds
    x = 0
    while end is None or time.monotonic() < end:
        for _ in range(10000):
            x += 1


def alloc(mib: int, step_pause: float = 0.005, hold: float = 30.0) -> None:
    blocks = []
    target = mib * 1024 * 1024
    total = 0
    while total < target:
        b = bytearray(CHUNK)
        # Touch every page so the memory is actually resident.
        for i in range(0, CHUNK, 4096):
            b[i] = 1
        blocks.append(b)
        total += CHUNK
        time.sleep(step_pause)
    time.sleep(hold)


def argv(kind: str, *args) -> list[str]:
    """Command line that runs workload ``kind`` in a fresh interpreter."""
    return [sys.executable, "-m", "petribench.workloads", kind, *map(str, args)]


def main(args=None) -> int:
    args = list(sys.argv[1:] if args is None else args)
    if not args:
        print(__doc__, file=sys.stderr)
        return 2
    kind, rest = args[0], args[1:]
    if kind == "noop":
        return 0
    if kind == "busy":
        busy(float(rest[0]) if rest else None)
    elif kind == "alloc":
        alloc(int(rest[0]) if rest else 128)
    elif kind == "sleep":
        time.sleep(float(rest[0]) if rest else 1.0)
    else:
        print(f"unknown workload {kind!r}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
