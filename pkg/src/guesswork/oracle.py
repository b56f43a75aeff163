"""Brute-force reference for the numbering maximization, and seeded random channels.

Nothing here reuses the solver's tree machinery: numberings are listed with
``itertools`` and scored in bulk with numpy.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .model import GuessworkError, QubitCqChannel, validate_channel
from .score import as_cost, tie_tolerance
from .symmetry import find_antipode

DEFAULT_CAP = 2_000_000_000
_BATCH = 200_000


class CapExceeded(GuessworkError):
    pass


def _double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def regime_leaf_count(size: int, transitive: bool, cs: bool) -> int:
    if cs:
        return _double_factorial(size - 2) if transitive else _double_factorial(size)
    return math.factorial(size - 1) if transitive else math.factorial(size)


def _anchor(centered: np.ndarray, cs: bool) -> int:
    size = len(centered)
    if cs:
        weights = [abs(centered[t] - centered[size - 1 - t]) if t < size - 1 - t else -1.0 for t in range(size)]
    else:
        weights = list(np.abs(centered))
    return int(np.argmax(weights))


def _numberings(size: int, anchor: int | None, antipode) -> "itertools.chain":
    """Every admissible numbering, in lexicographic order."""
    if antipode is None:
        for n in itertools.permutations(range(size)):
            if anchor is None or n[anchor] == 0:
                yield n
        return
    half = size // 2

    def rec(prefix, used):
        t = len(prefix)
        if t == half:
            n = list(prefix) + [antipode[m] for m in reversed(prefix)]
            yield tuple(n)
            return
        for m in range(size):
            if m in used or (anchor == t and m != 0):
                continue
            yield from rec(prefix + (m,), used | {m, antipode[m]})

    yield from rec((), frozenset())


def brute_force_norm(channel: QubitCqChannel, centered=None, regime="general",
                     cap: int = DEFAULT_CAP) -> tuple[float, tuple[int, ...]]:
    """Exact ``max |sum_t g0(t) r_{n(t)}| / M`` over the regime's numbering set.

    ``centered`` defaults to the centered identity cost.  ``regime`` names the
    feasible set (``general``, ``transitive``, ``cs`` or ``transitive_cs``); the
    caller is responsible for the reduction being valid for the channel.
    Returns the e_norm and the lexicographically smallest maximizer.
    """
    size = channel.size
    if centered is None:
        centered = as_cost(None, size).centered
    g0 = np.asarray(centered, float)
    regime = str(getattr(regime, "value", regime)).replace("-", "_")
    transitive = regime in ("transitive", "transitive_cs")
    cs = regime in ("cs", "transitive_cs")
    antipode = None
    if cs:
        antipode = find_antipode(channel.bloch)
        if antipode is None or size % 2:
            raise GuessworkError("CS enumeration needs a centrally symmetric channel")
    count = regime_leaf_count(size, transitive, cs)
    if count > cap:
        raise CapExceeded(f"{count} numberings exceed the cap of {cap}")
    anchor = _anchor(g0, cs) if transitive else None

    tie = tie_tolerance(g0)
    best = -1.0
    cand = np.zeros((0, size), dtype=np.int64)
    cand_norms = np.zeros(0)
    gen = _numberings(size, anchor, antipode)
    while True:
        batch = list(itertools.islice(gen, _BATCH))
        if not batch:
            break
        arr = np.array(batch, dtype=np.int64)
        v = np.einsum("t,ntk->nk", g0, channel.bloch[arr])
        norms = np.sqrt(np.einsum("nk,nk->n", v, v))
        best = max(best, float(norms.max()))
        cand = np.concatenate([cand, arr])
        cand_norms = np.concatenate([cand_norms, norms])
        keep = cand_norms >= best - tie
        cand, cand_norms = cand[keep], cand_norms[keep]
    lexmin = min(tuple(int(x) for x in row) for row in cand)
    return best / size, lexmin


def random_channel(size: int, seed: int, surface_only: bool = True) -> QubitCqChannel:
    """Random Bloch vectors from numpy's PCG64 generator seeded with ``seed``.

    Directions are normalized standard normals (uniform on the sphere); interior
    points get a radius drawn uniformly from [0, 1].
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    size = int(size)
    g = rng.standard_normal((max(size, 0), 3))
    v = g / np.linalg.norm(g, axis=1, keepdims=True)
    if not surface_only:
        v *= rng.uniform(0.0, 1.0, size=(len(v), 1))
    # clip rounding overshoot of unit vectors
    norms = np.linalg.norm(v, axis=1, keepdims=True)
    v = np.where(norms > 1.0, v / norms, v)
    return validate_channel([f"s{i}" for i in range(size)], v, name=f"random-{size}-{seed}")
