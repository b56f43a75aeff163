"""Compiled depth-first search over numberings (resumable, GIL-free)."""
from __future__ import annotations

import math

import numpy as np
from numba import njit

# state layout
DEPTH, NODES, LEAVES, DONE, START = range(5)
STATE_SIZE = 5


@njit(nogil=True, cache=True)
def _release(used, anti, cs, label):
    used[label] = False
    if cs:
        used[anti[label]] = False


@njit(nogil=True, cache=True)
def init_task(vecs, anti, cs, slot_w, prefix, choice, used, part, state):
    """Load a task whose first ``len(prefix)`` slots are already assigned."""
    start = prefix.shape[0]
    choice[:] = -1
    used[:] = False
    part[0, :] = 0.0
    for d in range(start):
        c = prefix[d]
        choice[d] = c
        used[c] = True
        if cs:
            used[anti[c]] = True
        for k in range(3):
            part[d + 1, k] = part[d, k] + slot_w[d] * vecs[c, k]
    state[DEPTH] = start
    state[NODES] = 0
    state[LEAVES] = 0
    state[DONE] = 0
    state[START] = start


@njit(nogil=True, cache=True)
def run(vecs, anti, cs, slot_w, suffix, fixed, choice, used, part, state,
        best, tol, bounding, first_hit, max_steps, best_choice):
    """Advance the search by at most ``max_steps`` moves.

    In normal mode ``best`` is the incumbent leaf norm and improvements are written
    to ``best_choice``.  In ``first_hit`` mode ``best`` is a threshold and the search
    stops at the first leaf (in enumeration order) whose norm reaches it.
    Returns the (possibly improved) incumbent.
    """
    n_slots = slot_w.shape[0]
    n_labels = vecs.shape[0]
    start = state[START]
    d = state[DEPTH]
    nodes = state[NODES]
    leaves = state[LEAVES]
    steps = 0
    while d >= start:
        if steps >= max_steps:
            break
        steps += 1
        if d == n_slots:
            leaves += 1
            x = part[d, 0]
            y = part[d, 1]
            z = part[d, 2]
            norm = math.sqrt(x * x + y * y + z * z)
            if first_hit:
                if norm >= best:
                    best_choice[:] = choice
                    state[DONE] = 2
                    best = norm
                    break
            elif norm > best:
                best = norm
                best_choice[:] = choice
            d -= 1
            _release(used, anti, cs, choice[d])
            continue
        if fixed[d] >= 0:
            c = fixed[d] if choice[d] < 0 and not used[fixed[d]] else n_labels
        else:
            c = choice[d] + 1
            while c < n_labels and used[c]:
                c += 1
        if c >= n_labels:
            choice[d] = -1
            d -= 1
            if d >= start:
                _release(used, anti, cs, choice[d])
            continue
        choice[d] = c
        w = slot_w[d]
        x = part[d, 0] + w * vecs[c, 0]
        y = part[d, 1] + w * vecs[c, 1]
        z = part[d, 2] + w * vecs[c, 2]
        if bounding and math.sqrt(x * x + y * y + z * z) + suffix[d + 1] < best - tol:
            continue
        part[d + 1, 0] = x
        part[d + 1, 1] = y
        part[d + 1, 2] = z
        used[c] = True
        if cs:
            used[anti[c]] = True
        d += 1
        if d < n_slots:
            nodes += 1
    state[DEPTH] = d
    state[NODES] = nodes
    state[LEAVES] = leaves
    if d < start and state[DONE] == 0:
        state[DONE] = 1
    return best


def warmup() -> None:
    """Trigger compilation on a tiny problem."""
    vecs = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])
    anti = np.array([1, 0], dtype=np.int64)
    slot_w = np.array([1.0])
    suffix = np.array([1.0, 0.0])
    fixed = np.array([-1], dtype=np.int64)
    for cs in (False, True):
        choice = np.full(1, -1, dtype=np.int64)
        used = np.zeros(2, dtype=np.bool_)
        part = np.zeros((2, 3))
        state = np.zeros(STATE_SIZE, dtype=np.int64)
        init_task(vecs, anti, cs, slot_w, np.zeros(0, dtype=np.int64), choice, used, part, state)
        run(vecs, anti, cs, slot_w, suffix, fixed, choice, used, part, state,
            -1.0, 0.0, True, False, 10, np.zeros(1, dtype=np.int64))
