# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled state-space exploration kernel.

Markings are stored back to back in one growable byte buffer, each place
encoded on ``width`` bytes, little-endian, unsigned. An open-addressing
table of state indices deduplicates them. Breadth-first order is simply a
cursor over the store; depth-first order keeps an explicit stack.
"""
from libc.stdlib cimport malloc, realloc, free, calloc
from libc.string cimport memcmp, memset
from libc.stdint cimport int64_t, uint64_t, uint8_t

import numpy as np
from time import monotonic

from .kernel_common import WidthOverflow, max_value_for_width
from .net import TokenOverflowError

cdef enum:
    EMPTY = -1

cdef inline uint64_t _hash(const uint8_t *data, Py_ssize_t n) nogil:
    cdef uint64_t h = 1469598103934665603ULL
    cdef Py_ssize_t i
    for i in range(n):
        h ^= data[i]
        h *= 1099511628211ULL
    h ^= h >> 29
    h *= 0xbf58476d1ce4e5b9ULL
    h ^= h >> 32
    return h


cdef class Explorer:
    """Explores the reachable markings of one net.

    The constructor takes the net in compressed sparse form: for transition
    ``t`` its input arcs are ``pre_place[pre_ptr[t]:pre_ptr[t+1]]`` with the
    matching weights, and likewise for output arcs.
    """

    cdef int n_places, n_trans, width
    cdef int64_t maxval
    cdef Py_ssize_t state_size
    cdef int64_t *pre_ptr
    cdef int64_t *pre_place
    cdef int64_t *pre_w
    cdef int64_t *post_ptr
    cdef int64_t *post_place
    cdef int64_t *post_w
    cdef int64_t *initial
    cdef uint8_t *store
    cdef int64_t store_cap
    cdef int64_t _count
    cdef int64_t *table
    cdef int64_t table_size
    cdef int64_t *_bounds
    cdef uint8_t *_fired
    cdef int64_t *edge_buf
    cdef int64_t _n_edges, edge_cap
    cdef int64_t *stack
    cdef int64_t sp, stack_cap
    cdef int64_t cursor
    cdef bint dfs, store_graph, started
    cdef int64_t *cur
    cdef uint8_t *scratch
    cdef public int64_t dead_index
    cdef public int64_t dead_count
    cdef public bint exhausted
    cdef public str stop_reason

    def __cinit__(self, int n_places, pre_ptr, pre_place, pre_w, post_ptr, post_place, post_w,
                  initial, int width=1, str order="bfs", bint store_graph=False):
        cdef Py_ssize_t i
        if width not in (1, 2, 4, 8):
            raise ValueError("width must be 1, 2, 4 or 8")
        self.n_places = n_places
        self.n_trans = len(pre_ptr) - 1
        self.width = width
        self.maxval = max_value_for_width(width)
        self.state_size = n_places * width
        self.dfs = order == "dfs"
        self.store_graph = store_graph
        self.pre_ptr = self._copy(pre_ptr)
        self.pre_place = self._copy(pre_place)
        self.pre_w = self._copy(pre_w)
        self.post_ptr = self._copy(post_ptr)
        self.post_place = self._copy(post_place)
        self.post_w = self._copy(post_w)
        self.initial = self._copy(initial)
        for i in range(n_places):
            if self.initial[i] > self.maxval:
                raise WidthOverflow(width)
        self.store_cap = 1024
        self.store = <uint8_t *> malloc(self.store_cap * max(self.state_size, 1))
        self.table_size = 2048
        self.table = <int64_t *> malloc(self.table_size * sizeof(int64_t))
        for i in range(self.table_size):
            self.table[i] = EMPTY
        self._bounds = <int64_t *> calloc(max(n_places, 1), sizeof(int64_t))
        self._fired = <uint8_t *> calloc(max(self.n_trans, 1), 1)
        self.edge_cap = 1024 if store_graph else 0
        self.edge_buf = <int64_t *> malloc(max(self.edge_cap, 1) * 3 * sizeof(int64_t))
        self.stack_cap = 1024
        self.stack = <int64_t *> malloc(self.stack_cap * sizeof(int64_t))
        self.cur = <int64_t *> malloc(max(n_places, 1) * sizeof(int64_t))
        self.scratch = <uint8_t *> malloc(max(self.state_size, 1))
        if (self.store == NULL or self.table == NULL or self._bounds == NULL or self._fired == NULL
                or self.edge_buf == NULL or self.stack == NULL or self.cur == NULL
                or self.scratch == NULL):
            raise MemoryError()
        self._count = 0
        self._n_edges = 0
        self.sp = 0
        self.cursor = 0
        self.dead_index = -1
        self.dead_count = 0
        self.exhausted = False
        self.started = False
        self.stop_reason = ""

    cdef int64_t *_copy(self, values) except NULL:
        arr = np.ascontiguousarray(values, dtype=np.int64)
        cdef int64_t[::1] view = arr
        cdef Py_ssize_t n = arr.shape[0], i
        cdef int64_t *out = <int64_t *> malloc(max(n, 1) * sizeof(int64_t))
        if out == NULL:
            raise MemoryError()
        for i in range(n):
            out[i] = view[i]
        return out

    def __dealloc__(self):
        free(self.pre_ptr); free(self.pre_place); free(self.pre_w)
        free(self.post_ptr); free(self.post_place); free(self.post_w)
        free(self.initial); free(self.store); free(self.table); free(self._bounds)
        free(self._fired); free(self.edge_buf); free(self.stack); free(self.cur)
        free(self.scratch)

    # -- encoding ------------------------------------------------------
    cdef inline void _encode(self, const int64_t *m, uint8_t *dst) nogil:
        cdef Py_ssize_t i, b
        cdef uint64_t v
        if self.width == 1:
            for i in range(self.n_places):
                dst[i] = <uint8_t> m[i]
        else:
            for i in range(self.n_places):
                v = <uint64_t> m[i]
                for b in range(self.width):
                    dst[i * self.width + b] = <uint8_t> (v >> (8 * b))

    cdef inline void _decode(self, int64_t idx, int64_t *m) nogil:
        cdef const uint8_t *src = self.store + idx * self.state_size
        cdef Py_ssize_t i, b
        cdef uint64_t v
        if self.width == 1:
            for i in range(self.n_places):
                m[i] = src[i]
        else:
            for i in range(self.n_places):
                v = 0
                for b in range(self.width):
                    v |= (<uint64_t> src[i * self.width + b]) << (8 * b)
                m[i] = <int64_t> v

    # -- store ---------------------------------------------------------
    cdef int _grow_table(self) except -1:
        cdef int64_t new_size = self.table_size * 2
        cdef int64_t *t = <int64_t *> malloc(new_size * sizeof(int64_t))
        cdef int64_t i, h, mask = new_size - 1
        if t == NULL:
            raise MemoryError()
        for i in range(new_size):
            t[i] = EMPTY
        for i in range(self._count):
            h = <int64_t> (_hash(self.store + i * self.state_size, self.state_size) & <uint64_t> mask)
            while t[h] != EMPTY:
                h = (h + 1) & mask
            t[h] = i
        free(self.table)
        self.table = t
        self.table_size = new_size
        return 0

    cdef int64_t _insert(self, const int64_t *m, bint *is_new, int64_t max_states) except -2:
        """Index of marking ``m``, adding it when unseen; -1 when the budget forbids adding."""
        cdef int64_t mask = self.table_size - 1
        cdef int64_t h, idx, i
        cdef uint8_t *slot
        self._encode(m, self.scratch)
        h = <int64_t> (_hash(self.scratch, self.state_size) & <uint64_t> mask)
        while True:
            idx = self.table[h]
            if idx == EMPTY:
                break
            if memcmp(self.store + idx * self.state_size, self.scratch, self.state_size) == 0:
                is_new[0] = False
                return idx
            h = (h + 1) & mask
        if max_states >= 0 and self._count >= max_states:
            is_new[0] = False
            return -1
        if self._count == self.store_cap:
            slot = <uint8_t *> realloc(self.store, self.store_cap * 2 * max(self.state_size, 1))
            if slot == NULL:
                raise MemoryError()
            self.store = slot
            self.store_cap *= 2
        idx = self._count
        slot = self.store + idx * self.state_size
        for i in range(self.state_size):
            slot[i] = self.scratch[i]
        self.table[h] = idx
        self._count += 1
        for i in range(self.n_places):
            if m[i] > self._bounds[i]:
                self._bounds[i] = m[i]
        is_new[0] = True
        if self._count * 2 > self.table_size:
            self._grow_table()
        return idx

    cdef int _push(self, int64_t idx) except -1:
        cdef int64_t *s
        if self.sp == self.stack_cap:
            s = <int64_t *> realloc(self.stack, self.stack_cap * 2 * sizeof(int64_t))
            if s == NULL:
                raise MemoryError()
            self.stack = s
            self.stack_cap *= 2
        self.stack[self.sp] = idx
        self.sp += 1
        return 0

    cdef int _edge(self, int64_t src, int64_t t, int64_t dst) except -1:
        cdef int64_t *e
        if self._n_edges == self.edge_cap:
            e = <int64_t *> realloc(self.edge_buf, self.edge_cap * 2 * 3 * sizeof(int64_t))
            if e == NULL:
                raise MemoryError()
            self.edge_buf = e
            self.edge_cap *= 2
        self.edge_buf[3 * self._n_edges] = src
        self.edge_buf[3 * self._n_edges + 1] = t
        self.edge_buf[3 * self._n_edges + 2] = dst
        self._n_edges += 1
        return 0

    # -- main loop -----------------------------------------------------
    def run(self, int64_t max_states=-1, double deadline=-1.0, callback=None,
            int64_t batch=65536, bint stop_on_deadlock=False):
        """Explore until the frontier empties or a budget or callback stops it.

        ``deadline`` is an absolute ``time.monotonic()`` value. ``callback``
        receives ``(start, stop)`` index ranges of newly stored states and
        returns true to halt exploration. Raises ``WidthOverflow`` when a
        token count does not fit the current width.
        """
        cdef int64_t s, t, k, p, w, idx, expanded = 0, last_cb
        cdef int64_t *cur = self.cur
        cdef bint ok, any_enabled, is_new, overflow
        if self.started:
            raise RuntimeError("an Explorer runs once")
        self.started = True
        for k in range(self.n_places):
            cur[k] = self.initial[k]
        idx = self._insert(cur, &is_new, max_states if max_states >= 1 else -1)
        if self.dfs:
            self._push(0)
        last_cb = 0
        self.stop_reason = ""
        while True:
            if self.dfs:
                if self.sp == 0:
                    break
                self.sp -= 1
                s = self.stack[self.sp]
            else:
                if self.cursor >= self._count:
                    break
                s = self.cursor
                self.cursor += 1
            self._decode(s, cur)
            any_enabled = False
            for t in range(self.n_trans):
                ok = True
                for k in range(self.pre_ptr[t], self.pre_ptr[t + 1]):
                    if cur[self.pre_place[k]] < self.pre_w[k]:
                        ok = False
                        break
                if not ok:
                    continue
                any_enabled = True
                self._fired[t] = 1
                for k in range(self.pre_ptr[t], self.pre_ptr[t + 1]):
                    cur[self.pre_place[k]] -= self.pre_w[k]
                overflow = False
                for k in range(self.post_ptr[t], self.post_ptr[t + 1]):
                    p = self.post_place[k]
                    w = self.post_w[k]
                    if cur[p] > self.maxval - w:
                        overflow = True
                    cur[p] += w
                if overflow:
                    if self.width == 8:
                        raise TokenOverflowError("token count exceeds 2**63-1")
                    raise WidthOverflow(self.width)
                idx = self._insert(cur, &is_new, max_states if max_states >= 1 else -1)
                for k in range(self.post_ptr[t], self.post_ptr[t + 1]):
                    cur[self.post_place[k]] -= self.post_w[k]
                for k in range(self.pre_ptr[t], self.pre_ptr[t + 1]):
                    cur[self.pre_place[k]] += self.pre_w[k]
                if idx < 0:
                    self.stop_reason = "max_states"
                    break
                if is_new and self.dfs:
                    self._push(idx)
                if self.store_graph:
                    self._edge(s, t, idx)
            if self.stop_reason:
                if self.dfs:
                    self._push(s)
                break
            if not any_enabled:
                self.dead_count += 1
                if self.dead_index < 0:
                    self.dead_index = s
                if stop_on_deadlock:
                    self.stop_reason = "deadlock"
                    break
            expanded += 1
            if deadline >= 0 and (expanded & 1023) == 0 and monotonic() > deadline:
                self.stop_reason = "timeout"
                break
            if callback is not None and self._count - last_cb >= batch:
                k = last_cb
                last_cb = self._count
                if callback(k, last_cb):
                    self.stop_reason = "callback"
                    break
        if callback is not None and self._count > last_cb and self.stop_reason != "callback":
            if callback(last_cb, self._count):
                self.stop_reason = "callback"
        self.exhausted = not self.stop_reason
        return self.exhausted

    # -- accessors -----------------------------------------------------
    @property
    def count(self):
        return self._count

    @property
    def n_edges(self):
        return self._n_edges

    @property
    def width_bytes(self):
        return self.width

    @property
    def frontier_size(self):
        return self.sp if self.dfs else self._count - self.cursor

    def bounds(self):
        return [self._bounds[i] for i in range(self.n_places)]

    def fired(self):
        return [bool(self._fired[i]) for i in range(self.n_trans)]

    def marking(self, int64_t idx):
        if idx < 0 or idx >= self._count:
            raise IndexError(idx)
        self._decode(idx, self.cur)
        return tuple(self.cur[i] for i in range(self.n_places))

    def markings(self, int64_t start=0, int64_t stop=-1):
        """Decode states ``start..stop`` into an ``(n, places)`` int64 array."""
        if stop < 0 or stop > self._count:
            stop = self._count
        if start < 0:
            start = 0
        cdef int64_t n = max(stop - start, 0), i, j
        out = np.empty((n, self.n_places), dtype=np.int64)
        if n == 0 or self.n_places == 0:
            return out
        cdef int64_t[:, ::1] view = out
        for i in range(n):
            self._decode(start + i, &view[i, 0])
        return out

    def edges(self):
        """Stored edges as an ``(n, 3)`` array of (source, transition, target)."""
        out = np.empty((self._n_edges, 3), dtype=np.int64)
        cdef int64_t[:, ::1] view = out
        cdef int64_t i
        for i in range(self._n_edges):
            view[i, 0] = self.edge_buf[3 * i]
            view[i, 1] = self.edge_buf[3 * i + 1]
            view[i, 2] = self.edge_buf[3 * i + 2]
        return out

    def stored_bytes(self):
        """Bytes held by the marking store, index table and edge list."""
        return (self._count * self.state_size + self.table_size * 8 + self._n_edges * 24)
