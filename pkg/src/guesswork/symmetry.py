"""Symmetry detection for qubit channels.

A label permutation ``g`` is a symmetry when it preserves the Gram matrix
``r_i . r_j``; it is then realized by an orthogonal 3x3 matrix ``R_g`` with
``R_g r_m = r_{g(m)}``.  Improper matrices (det -1) are kept: on qubit states they
act as anti-unitaries, which still map states to states.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .model import AGGREGATE_TOL, GuessworkError, QubitCqChannel

logger = logging.getLogger(__name__)

GRAM_TOL = 1e-9
MAX_GROUP_ORDER = 5040


class NotCentrallySymmetric(GuessworkError):
    pass


class GroupTooLarge(GuessworkError):
    pass


@dataclass(frozen=True, eq=False)
class SymmetryElement:
    perm: tuple[int, ...]
    realization: np.ndarray


@dataclass(frozen=True, eq=False)
class SymmetryInfo:
    group: tuple[SymmetryElement, ...]
    transitive: bool
    centrally_symmetric: bool
    antipode: tuple[int, ...] | None

    @property
    def order(self) -> int:
        return len(self.group)

    def orbits(self) -> list[list[int]]:
        size = len(self.group[0].perm)
        seen, out = set(), []
        for i in range(size):
            if i in seen:
                continue
            orb = sorted({g.perm[i] for g in self.group})
            seen.update(orb)
            out.append(orb)
        return out


def _gram_permutations(gram: np.ndarray, tol: float, cap: int) -> list[tuple[int, ...]]:
    size = len(gram)
    # Row signatures prune candidate images before the backtracking search
    sig = [np.sort(row) for row in gram]
    compatible = [
        [j for j in range(size)
         if abs(gram[i, i] - gram[j, j]) <= tol and np.all(np.abs(sig[i] - sig[j]) <= tol)]
        for i in range(size)
    ]
    found: list[tuple[int, ...]] = []
    image = [-1] * size
    taken = [False] * size

    def extend(i: int) -> None:
        if i == size:
            found.append(tuple(image))
            if len(found) > cap:
                raise GroupTooLarge(f"symmetry group has more than {cap} elements")
            return
        for j in compatible[i]:
            if taken[j]:
                continue
            ok = True
            for k in range(i):
                if abs(gram[i, k] - gram[j, image[k]]) > tol:
                    ok = False
                    break
            if ok:
                image[i] = j
                taken[j] = True
                extend(i + 1)
                taken[j] = False
        image[i] = -1

    extend(0)
    return found


def _realize(vectors: np.ndarray, perm: tuple[int, ...]) -> np.ndarray:
    """Orthogonal map sending row ``m`` to row ``perm[m]``; identity off the span."""
    u, s, _ = np.linalg.svd(vectors.T, full_matrices=True)
    rank = int(np.sum(s > GRAM_TOL))
    if rank == 0:
        return np.eye(3)
    basis = u[:, :rank]
    src = vectors @ basis
    dst = vectors[list(perm)] @ basis
    # orthogonal Procrustes on the spanned subspace
    a, _, bt = np.linalg.svd(dst.T @ src)
    q = a @ bt
    return basis @ q @ basis.T + (np.eye(3) - basis @ basis.T)


def find_antipode(vectors: np.ndarray, tol: float = AGGREGATE_TOL) -> tuple[int, ...] | None:
    """Fixed-point-free involution ``m -> mbar`` with ``r_mbar = -r_m``, if one exists."""
    size = len(vectors)
    anti = [-1] * size
    for i in range(size):
        if anti[i] >= 0:
            continue
        match = -1
        for j in range(size):
            if j != i and anti[j] < 0 and np.all(np.abs(vectors[j] + vectors[i]) <= tol):
                match = j
                break
        if match < 0:
            return None
        anti[i], anti[match] = match, i
    return tuple(anti)


def detect_symmetries(channel: QubitCqChannel, max_order: int = MAX_GROUP_ORDER) -> SymmetryInfo:
    """Full Gram-preserving permutation group of the channel, with transitivity and CS flags."""
    vecs = channel.bloch
    gram = vecs @ vecs.T
    perms = _gram_permutations(gram, GRAM_TOL, max_order)
    group = []
    for p in perms:
        r = _realize(vecs, p)
        if not np.allclose(vecs @ r.T, vecs[list(p)], atol=GRAM_TOL, rtol=0):
            raise GuessworkError(f"permutation {p} preserves the Gram matrix but has no orthogonal realization")
        group.append(SymmetryElement(p, r))
    _check_closure(group)
    transitive = {g.perm[0] for g in group} == set(range(channel.size))
    antipode = find_antipode(vecs)
    return SymmetryInfo(tuple(group), transitive, antipode is not None, antipode)


def symmetries_or_trivial(channel: QubitCqChannel, max_order: int = MAX_GROUP_ORDER) -> SymmetryInfo:
    """``detect_symmetries``, falling back to the identity group when the group is too large.

    Only degenerate channels (many coincident states) hit the cap. The fallback
    gives up the transitive reduction but keeps the antipodal one, which needs no group.
    """
    try:
        return detect_symmetries(channel, max_order)
    except GroupTooLarge:
        logger.info("symmetry group exceeds %d elements; searching without it", max_order)
        identity = SymmetryElement(tuple(range(channel.size)), np.eye(3))
        antipode = find_antipode(channel.bloch)
        return SymmetryInfo((identity,), False, antipode is not None, antipode)


def _check_closure(group: list[SymmetryElement]) -> None:
    index = {g.perm: g for g in group}
    for g in group:
        inv = tuple(np.argsort(g.perm))
        if inv not in index:
            raise GuessworkError("symmetry group is not closed under inverses")
        for h in group:
            gh = tuple(g.perm[i] for i in h.perm)
            if gh not in index:
                raise GuessworkError("symmetry group is not closed under composition")


def antipodal_pairing(info: SymmetryInfo, channel: QubitCqChannel) -> list[tuple[int, int]]:
    if not info.centrally_symmetric or info.antipode is None:
        raise NotCentrallySymmetric("channel is not centrally symmetric")
    return [(m, mbar) for m, mbar in enumerate(info.antipode) if m < mbar]
