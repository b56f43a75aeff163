"""Branch and bound over numberings for the uniform-prior qubit guesswork.

The search assigns Bloch vectors to query positions one *slot* at a time.  In the
general regime a slot is a single position; when the channel is centrally
symmetric (CS) a slot is a pair of mirrored positions ``(t, M-1-t)`` holding
antipodal states, so its contribution to ``v`` is ``(g0[t] - g0[M-1-t]) r_m``.
For a transitive channel the heaviest slot is pinned to label 0.
"""
from __future__ import annotations

import enum
import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernel
from .model import CostFunction, GuessworkError, QubitCqChannel
from .score import NotBalanced, as_cost, tie_tolerance
from .symmetry import SymmetryInfo, symmetries_or_trivial

log = logging.getLogger(__name__)

CHUNK_STEPS = 2_000_000


class Regime(str, enum.Enum):
    GENERAL = "general"
    TRANSITIVE = "transitive"
    CS = "cs"
    TRANSITIVE_CS = "transitive_cs"

    @property
    def transitive(self) -> bool:
        return self in (Regime.TRANSITIVE, Regime.TRANSITIVE_CS)

    @property
    def cs(self) -> bool:
        return self in (Regime.CS, Regime.TRANSITIVE_CS)

    @classmethod
    def parse(cls, value) -> "Regime | None":
        if value is None or isinstance(value, Regime):
            return value
        value = str(value).lower().replace("-", "_")
        return None if value == "auto" else cls(value)


class RegimeNotApplicable(GuessworkError):
    pass


def select_regime(info: SymmetryInfo, cost: CostFunction, forced=None) -> Regime:
    cs_ok = info.centrally_symmetric and cost.is_balanced
    forced = Regime.parse(forced)
    if forced is None:
        if info.transitive:
            return Regime.TRANSITIVE_CS if cs_ok else Regime.TRANSITIVE
        return Regime.CS if cs_ok else Regime.GENERAL
    if forced.transitive and not info.transitive:
        raise RegimeNotApplicable("channel is not transitive")
    if forced.cs and not info.centrally_symmetric:
        raise RegimeNotApplicable("channel is not centrally symmetric")
    if forced.cs and not cost.is_balanced:
        raise RegimeNotApplicable("the CS reduction needs a balanced cost")
    return forced


@dataclass(frozen=True, eq=False)
class SearchPlan:
    """Slot layout of one search: which positions each depth fills and with what weight."""

    vecs: np.ndarray
    centered: np.ndarray
    regime: Regime
    antipode: np.ndarray
    slot_pos: np.ndarray
    slot_w: np.ndarray
    suffix: np.ndarray  # suffix[d] = sum of |slot_w| over slots d..end
    fixed: np.ndarray  # label pinned at each depth, -1 if free

    @classmethod
    def build(cls, channel: QubitCqChannel, cost: CostFunction, regime: Regime,
              info: SymmetryInfo | None = None, order: str = "search") -> "SearchPlan":
        size = channel.size
        g0 = np.asarray(cost.centered, float)
        if regime.cs:
            if info is None or info.antipode is None:
                raise RegimeNotApplicable("CS regime needs the antipode map")
            antipode = np.asarray(info.antipode, dtype=np.int64)
            pos = np.array([t for t in range(size) if t < size - 1 - t], dtype=np.int64)
            w = g0[pos] - g0[size - 1 - pos]
        else:
            antipode = np.arange(size, dtype=np.int64)
            pos = np.arange(size, dtype=np.int64)
            w = g0.copy()
        anchor = int(pos[np.argmax(np.abs(w))])  # first maximal weight, smallest position
        if order == "search":
            perm = np.argsort(-np.abs(w), kind="stable")
        elif order == "lex":
            perm = np.arange(len(pos))
        else:
            raise ValueError(order)
        pos, w = pos[perm], w[perm]
        suffix = np.concatenate([np.cumsum(np.abs(w)[::-1])[::-1], [0.0]])
        fixed = np.full(len(pos), -1, dtype=np.int64)
        if regime.transitive:
            fixed[np.flatnonzero(pos == anchor)[0]] = 0
        return cls(np.ascontiguousarray(channel.bloch, dtype=float), g0, regime, antipode,
                   pos, w, suffix, fixed)

    @property
    def size(self) -> int:
        return len(self.vecs)

    @property
    def depth(self) -> int:
        return len(self.slot_pos)

    def numbering(self, slot_labels) -> tuple[int, ...]:
        n = [-1] * self.size
        for t, m in zip(self.slot_pos, slot_labels):
            n[int(t)] = int(m)
            if self.regime.cs:
                n[self.size - 1 - int(t)] = int(self.antipode[m])
        return tuple(n)


@dataclass(frozen=True, eq=False)
class SearchNode:
    """A set of numberings sharing the labels of the first ``len(labels)`` slots."""

    plan: SearchPlan
    labels: tuple[int, ...]
    partial_v: np.ndarray
    remaining: frozenset

    @classmethod
    def root(cls, plan: SearchPlan) -> "SearchNode":
        return cls(plan, (), np.zeros(3), frozenset(range(plan.size)))

    @property
    def depth(self) -> int:
        return len(self.labels)

    @property
    def t_star(self) -> int | None:
        """First free position in search order, or None at a leaf."""
        return None if self.is_leaf else int(self.plan.slot_pos[self.depth])

    @property
    def is_leaf(self) -> bool:
        return self.depth == self.plan.depth

    def numbering(self) -> tuple[int, ...]:
        return self.plan.numbering(self.labels)


def branch(node: SearchNode) -> list[SearchNode]:
    """One child per admissible label for the next slot, in increasing label order."""
    if node.is_leaf:
        return []
    plan, d = node.plan, node.depth
    pinned = int(plan.fixed[d])
    labels = sorted(node.remaining) if pinned < 0 else ([pinned] if pinned in node.remaining else [])
    children = []
    for m in labels:
        removed = {m, int(plan.antipode[m])} if plan.regime.cs else {m}
        children.append(SearchNode(plan, node.labels + (m,),
                                   node.partial_v + plan.slot_w[d] * plan.vecs[m],
                                   node.remaining - removed))
    return children


def bound(node: SearchNode) -> float:
    """Upper bound on ``|v(n)|`` over every completion (unassigned states have norm <= 1)."""
    return float(np.linalg.norm(node.partial_v)) + float(node.plan.suffix[node.depth])


def greedy_init(plan: SearchPlan) -> tuple[tuple[int, ...], float]:
    """Fill slots heaviest first, each time taking the label that maximizes ``|v|``.

    Returns the numbering and its e_norm (``|v| / M``).
    """
    node = SearchNode.root(plan)
    while not node.is_leaf:
        best_child, best_norm = None, -1.0
        for child in branch(node):
            norm = float(np.linalg.norm(child.partial_v))
            if norm > best_norm:
                best_child, best_norm = child, norm
        node = best_child
    return node.numbering(), float(np.linalg.norm(node.partial_v)) / plan.size


@dataclass(eq=False)
class SolveResult:
    value: float
    best_numbering: tuple[int, ...]
    best_norm: float
    nodes_expanded: int
    leaves_visited: int
    wall_time: float
    regime: Regime
    bound_only: bool = False
    greedy_norm: float = float("nan")
    threads: int = 1
    tiebreak_nodes: int = 0
    incumbent_trace: list = field(default_factory=list)

    def labels(self, channel: QubitCqChannel) -> list:
        return [channel.labels[i] for i in self.best_numbering]


class _Task:
    def __init__(self, plan: SearchPlan, prefix: tuple[int, ...]):
        self.choice = np.full(plan.depth, -1, dtype=np.int64)
        self.used = np.zeros(plan.size, dtype=np.bool_)
        self.part = np.zeros((plan.depth + 1, 3))
        self.state = np.zeros(_kernel.STATE_SIZE, dtype=np.int64)
        self.best_choice = np.full(plan.depth, -1, dtype=np.int64)
        _kernel.init_task(plan.vecs, plan.antipode, plan.regime.cs, plan.slot_w,
                          np.asarray(prefix, dtype=np.int64), self.choice, self.used, self.part, self.state)

    def step(self, plan: SearchPlan, best: float, tol: float, bounding: bool,
             first_hit: bool = False, steps: int = CHUNK_STEPS) -> float:
        return _kernel.run(plan.vecs, plan.antipode, plan.regime.cs, plan.slot_w, plan.suffix,
                           plan.fixed, self.choice, self.used, self.part, self.state,
                           best, tol, bounding, first_hit, steps, self.best_choice)

    @property
    def done(self) -> bool:
        return bool(self.state[_kernel.DONE])


def _split(plan: SearchPlan, threads: int) -> tuple[list[SearchNode], int]:
    """Task roots at depth 1 past any pinned slot, or one deeper when fan-out is small."""
    frontier = [SearchNode.root(plan)]
    expanded = 0
    target_depth = 1 + int(plan.fixed[0] >= 0)
    while frontier and frontier[0].depth < min(target_depth, plan.depth):
        nxt = []
        for node in frontier:
            expanded += 1
            nxt.extend(branch(node))
        frontier = nxt
        if frontier and frontier[0].depth == target_depth and len(frontier) < 4 * threads \
                and target_depth < plan.depth:
            target_depth += 1
    return frontier, expanded


class _Incumbent:
    def __init__(self, norm: float, slots, trace_start: float):
        self.norm = norm
        self.slots = slots
        self.lock = threading.Lock()
        self.trace = [(0.0, norm)]
        self.t0 = trace_start

    def offer(self, norm: float, slots) -> None:
        with self.lock:
            if norm > self.norm:
                self.norm = norm
                self.slots = tuple(int(x) for x in slots)
                self.trace.append((time.perf_counter() - self.t0, norm))


def solve(channel: QubitCqChannel, cost=None, threads: int = 1, regime=None,
          time_budget: float | None = None, bounding: bool = True,
          info: SymmetryInfo | None = None) -> SolveResult:
    """Exact maximin guesswork of a qubit channel under a balanced cost.

    ``regime`` is ``None``/``"auto"`` or one of :class:`Regime`; forcing a reduction
    the channel does not admit raises :class:`RegimeNotApplicable`.  When the time
    budget runs out the incumbent is returned with ``bound_only=True``: its value
    is then an upper bound on the guesswork.
    """
    t0 = time.perf_counter()
    cost = as_cost(cost, channel.size)
    if not cost.is_balanced:
        raise NotBalanced(f"cost {cost.values.tolist()} is not balanced")
    if info is None:
        info = symmetries_or_trivial(channel)
    regime = select_regime(info, cost, regime)
    threads = max(1, int(threads))
    plan = SearchPlan.build(channel, cost, regime, info, order="search")
    size = channel.size
    tol = 2 * tie_tolerance(plan.centered)
    deadline = None if time_budget is None else t0 + time_budget

    greedy_n, greedy_norm = greedy_init(plan)
    greedy_slots = tuple(greedy_n[int(t)] for t in plan.slot_pos)
    start_norm = greedy_norm * size if bounding else -1.0
    inc = _Incumbent(start_norm, greedy_slots, t0)
    roots, root_nodes = _split(plan, threads)
    counters = np.zeros(2, dtype=np.int64)
    counter_lock = threading.Lock()
    timed_out = threading.Event()

    def work(node: SearchNode) -> None:
        if timed_out.is_set():
            return
        task = _Task(plan, node.labels)
        local = inc.norm
        while not task.done:
            local = task.step(plan, max(local, inc.norm), tol, bounding)
            if local > inc.norm:
                inc.offer(local, task.best_choice)
            if deadline is not None and time.perf_counter() > deadline:
                timed_out.set()
                break
        with counter_lock:
            counters[0] += task.state[_kernel.NODES]
            counters[1] += task.state[_kernel.LEAVES]

    if threads == 1:
        for node in roots:
            work(node)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, roots))
    nodes = int(counters[0]) + root_nodes
    leaves = int(counters[1])
    best_norm_abs = inc.norm

    if timed_out.is_set():
        log.warning("time budget of %ss exceeded; returning incumbent as a bound", time_budget)
        numbering = plan.numbering(inc.slots)
        best_norm = best_norm_abs / size
        return SolveResult(cost.mean - best_norm, numbering, best_norm, nodes, leaves,
                           time.perf_counter() - t0, regime, True, greedy_norm, threads,
                           0, inc.trace)

    numbering, tie_nodes = _lexmin_optimum(channel, cost, regime, info, best_norm_abs)
    best_norm = best_norm_abs / size
    return SolveResult(cost.mean - best_norm, numbering, best_norm, nodes, leaves,
                       time.perf_counter() - t0, regime, False, greedy_norm, threads,
                       tie_nodes, inc.trace)


def _lexmin_optimum(channel, cost, regime, info, best_abs: float) -> tuple[tuple[int, ...], int]:
    """Lexicographically smallest numbering whose ``|v|`` ties with the optimum."""
    plan = SearchPlan.build(channel, cost, regime, info, order="lex")
    tie = tie_tolerance(plan.centered)
    task = _Task(plan, ())
    while not task.done:
        task.step(plan, best_abs - tie, tie, True, first_hit=True)
    if task.state[_kernel.DONE] != 2:
        raise GuessworkError("tie-break pass found no optimal leaf")
    return plan.numbering(task.best_choice), int(task.state[_kernel.NODES])


def count_leaves(channel: QubitCqChannel, regime, cost=None) -> int:
    """Size of the regime's numbering tree (search with bounding disabled)."""
    return solve(channel, cost, regime=regime, bounding=False).leaves_visited
