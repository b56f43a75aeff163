"""Core domain types: qubit c-q channels, priors, costs, numberings, measurements.

States are stored as Bloch vectors, so a qubit state is ``(I + r.s) / 2`` and an
effect is ``c0 I + c.s``.  All types are immutable once built.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

INPUT_TOL = 1e-12
AGGREGATE_TOL = 1e-9


class GuessworkError(ValueError):
    """Base class for every validation error raised by the package."""


class DuplicateLabel(GuessworkError):
    pass


class BlochNormExceeded(GuessworkError):
    pass


class LengthMismatch(GuessworkError):
    pass


class TooFewStates(GuessworkError):
    pass


class InvalidPrior(GuessworkError):
    pass


class InvalidNumbering(GuessworkError):
    pass


class InvalidEffect(GuessworkError):
    pass


class AlphabetMismatch(GuessworkError):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class QubitCqChannel:
    """Labeled set of qubit states given as Bloch vectors (shape ``(M, 3)``)."""

    labels: tuple
    bloch: np.ndarray
    name: str | None = None

    @property
    def size(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QubitCqChannel):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.bloch, other.bloch)

    def __hash__(self) -> int:
        return hash((self.labels, self.bloch.tobytes()))

    def index(self, label) -> int:
        return self.labels.index(label)

    def transformed(self, matrix: np.ndarray) -> "QubitCqChannel":
        """Apply a 3x3 linear map to every Bloch vector (e.g. a rotation or a shrink)."""
        return validate_channel(self.labels, self.bloch @ np.asarray(matrix, float).T, name=self.name)


def validate_channel(labels: Sequence, vectors, name: str | None = None) -> QubitCqChannel:
    """Build a :class:`QubitCqChannel`, rejecting (never repairing) bad input."""
    labels = tuple(labels)
    vecs = np.array(vectors, dtype=float)
    if vecs.ndim == 1 and vecs.size == 0:
        vecs = vecs.reshape(0, 3)
    if vecs.ndim != 2 or vecs.shape[1] != 3:
        raise LengthMismatch(f"expected an (M, 3) array of Bloch vectors, got shape {vecs.shape}")
    if len(labels) != len(vecs):
        raise LengthMismatch(f"{len(labels)} labels but {len(vecs)} Bloch vectors")
    if len(set(labels)) != len(labels):
        dup = next(lab for lab in labels if labels.count(lab) > 1)
        raise DuplicateLabel(f"label {dup!r} appears more than once")
    if len(labels) < 2:
        raise TooFewStates("a channel needs at least two states")
    if not np.all(np.isfinite(vecs)):
        raise BlochNormExceeded("Bloch vectors must be finite")
    norms = np.linalg.norm(vecs, axis=1)
    bad = np.flatnonzero(norms > 1.0 + INPUT_TOL)
    if bad.size:
        i = int(bad[0])
        raise BlochNormExceeded(f"state {labels[i]!r} has Bloch norm {norms[i]!r} > 1")
    return QubitCqChannel(labels, _frozen(vecs), name)


def uniform_prior(size: int) -> np.ndarray:
    return np.full(size, 1.0 / size)


def validate_prior(weights, size: int) -> np.ndarray:
    p = np.array(weights, dtype=float)
    if p.shape != (size,):
        raise InvalidPrior(f"prior has shape {p.shape}, expected ({size},)")
    if np.any(p < 0) or np.any(p > 1):
        raise InvalidPrior("prior weights must lie in [0, 1]")
    if abs(p.sum() - 1.0) > INPUT_TOL * max(1, size):
        raise InvalidPrior(f"prior sums to {p.sum()!r}, not 1")
    return _frozen(p)


@dataclass(frozen=True, eq=False)
class CostFunction:
    """Cost ``gamma(t)`` of succeeding at query ``t`` (0-based positions internally)."""

    values: np.ndarray
    mean: float = field(init=False)
    centered: np.ndarray = field(init=False)
    rearrangement: np.ndarray = field(init=False)
    rearranged: np.ndarray = field(init=False)

    def __post_init__(self):
        vals = _frozen(np.array(self.values, dtype=float).reshape(-1))
        if vals.size == 0 or not np.all(np.isfinite(vals)):
            raise GuessworkError("cost must be a non-empty list of finite reals")
        object.__setattr__(self, "values", vals)
        mean = float(vals.mean())
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "centered", _frozen(vals - mean))
        order = np.argsort(-vals, kind="stable")
        object.__setattr__(self, "rearrangement", _frozen(order))
        object.__setattr__(self, "rearranged", _frozen(vals[order]))

    @classmethod
    def identity(cls, size: int) -> "CostFunction":
        return cls(np.arange(1, size + 1, dtype=float))

    def __len__(self) -> int:
        return self.values.size

    @property
    def is_balanced(self) -> bool:
        v = self.values
        return bool(np.all(np.abs(v + v[::-1] - 2 * self.mean) <= INPUT_TOL * max(1.0, abs(self.mean))))

    @property
    def is_nondecreasing(self) -> bool:
        return bool(np.all(np.diff(self.values) >= -INPUT_TOL))


def validate_numbering(order, size: int) -> tuple[int, ...]:
    """A numbering maps query position ``t`` to label index ``order[t]``."""
    n = tuple(int(i) for i in order)
    if sorted(n) != list(range(size)):
        raise InvalidNumbering(f"{n} is not a permutation of range({size})")
    return n


def inverse_numbering(n: Sequence[int]) -> np.ndarray:
    inv = np.empty(len(n), dtype=np.int64)
    inv[np.asarray(n)] = np.arange(len(n))
    return inv


@dataclass(frozen=True)
class Effect:
    """Qubit effect ``c0 I + c.s``; its eigenvalues are ``c0 +- |c|``."""

    c0: float
    c: tuple[float, float, float]

    @classmethod
    def from_vector(cls, c0: float, c) -> "Effect":
        return cls(float(c0), tuple(float(x) for x in c))

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.c)

    def eigenvalues(self) -> tuple[float, float]:
        r = float(np.linalg.norm(self.c))
        return self.c0 - r, self.c0 + r

    def prob(self, bloch) -> np.ndarray:
        """Born probability ``Tr[E rho]`` for one or many Bloch vectors."""
        return self.c0 + np.asarray(bloch) @ self.vector


@dataclass(frozen=True)
class NumberingMeasurement:
    """Finite POVM whose outcomes are numberings; effects must sum to the identity."""

    outcomes: tuple[tuple[tuple[int, ...], Effect], ...]

    def __post_init__(self):
        if not self.outcomes:
            raise InvalidEffect("measurement has no outcomes")
        size = len(self.outcomes[0][0])
        seen = set()
        for n, eff in self.outcomes:
            validate_numbering(n, size)
            if n in seen:
                raise InvalidEffect(f"numbering {n} appears twice")
            seen.add(n)
            lo, hi = eff.eigenvalues()
            if lo < -INPUT_TOL or hi > 1 + INPUT_TOL:
                raise InvalidEffect(f"effect for {n} has eigenvalues ({lo}, {hi}) outside [0, 1]")
        c0 = sum(e.c0 for _, e in self.outcomes)
        c = np.sum([e.vector for _, e in self.outcomes], axis=0)
        if abs(c0 - 1) > AGGREGATE_TOL or np.linalg.norm(c) > AGGREGATE_TOL:
            raise InvalidEffect(f"effects sum to {c0} I + {c}.s, not the identity")

    @classmethod
    def from_pairs(cls, pairs) -> "NumberingMeasurement":
        return cls(tuple((tuple(int(i) for i in n), e) for n, e in pairs))

    @property
    def size(self) -> int:
        return len(self.outcomes[0][0])

    @property
    def numberings(self) -> list[tuple[int, ...]]:
        return [n for n, _ in self.outcomes]

    @property
    def effects(self) -> list[Effect]:
        return [e for _, e in self.outcomes]

    def outcome_probabilities(self, bloch) -> np.ndarray:
        """Matrix ``P[k, m] = Tr[pi(n_k) sigma(m)]`` for Bloch rows ``m``."""
        c0 = np.array([e.c0 for e in self.effects])
        c = np.array([e.c for e in self.effects])
        return c0[:, None] + c @ np.asarray(bloch, float).T


def blind_measurement(size: int) -> NumberingMeasurement:
    """Single outcome with effect I: query labels in index order, ignoring the state."""
    return NumberingMeasurement(((tuple(range(size)), Effect(1.0, (0.0, 0.0, 0.0))),))
