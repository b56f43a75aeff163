"""The seven highly symmetric informationally complete (HSIC) qubit channels, plus JSON I/O."""
from __future__ import annotations

import enum
import itertools
import json
from pathlib import Path

import numpy as np

from .model import GuessworkError, QubitCqChannel, validate_channel, validate_prior

PHI = (1 + np.sqrt(5.0)) / 2


class ParseError(GuessworkError):
    pass


class ValidationError(GuessworkError):
    pass


class HsicFamily(enum.Enum):
    TETRAHEDRON = ("tetrahedron", 4)
    OCTAHEDRON = ("octahedron", 6)
    CUBE = ("cube", 8)
    ICOSAHEDRON = ("icosahedron", 12)
    DODECAHEDRON = ("dodecahedron", 20)
    CUBOCTAHEDRON = ("cuboctahedron", 12)
    ICOSIDODECAHEDRON = ("icosidodecahedron", 30)

    def __init__(self, family_name: str, vertex_count: int):
        self.family_name = family_name
        self.vertex_count = vertex_count

    @classmethod
    def from_name(cls, name: str) -> "HsicFamily":
        for fam in cls:
            if fam.family_name == name.lower():
                return fam
        raise KeyError(f"unknown HSIC family {name!r}; choose from {[f.family_name for f in cls]}")


FAMILY_NAMES = tuple(f.family_name for f in HsicFamily)


def _cyclic(v):
    return [(v[0], v[1], v[2]), (v[1], v[2], v[0]), (v[2], v[0], v[1])]


def _signs(v):
    """All sign flips of the nonzero coordinates of ``v`` (no duplicates)."""
    out = []
    for s in itertools.product((1, -1), repeat=3):
        w = tuple(si * vi for si, vi in zip(s, v))
        if w not in out:
            out.append(w)
    return out


def _vertices(family: HsicFamily) -> list[tuple[float, float, float]]:
    if family is HsicFamily.TETRAHEDRON:
        return [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
    if family is HsicFamily.OCTAHEDRON:
        return [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    if family is HsicFamily.CUBE:
        return _signs((1, 1, 1))
    if family is HsicFamily.ICOSAHEDRON:
        return [c for s in _signs((0, 1, PHI)) for c in _cyclic(s)]
    if family is HsicFamily.DODECAHEDRON:
        return _signs((1, 1, 1)) + [c for s in _signs((0, 1 / PHI, PHI)) for c in _cyclic(s)]
    if family is HsicFamily.CUBOCTAHEDRON:
        return [c for s in _signs((1, 1, 0)) for c in _cyclic(s)]
    if family is HsicFamily.ICOSIDODECAHEDRON:
        axes = [c for s in _signs((1, 0, 0)) for c in _cyclic(s)]
        return axes + [c for s in _signs((0.5, PHI / 2, PHI**2 / 2)) for c in _cyclic(s)]
    raise KeyError(family)


def generate_hsic(family: HsicFamily | str) -> QubitCqChannel:
    """Unit Bloch vectors at the vertices of the named polyhedron, labeled ``v0, v1, ...``."""
    if isinstance(family, str):
        family = HsicFamily.from_name(family)
    v = np.array(_vertices(family), dtype=float)
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    assert len(v) == family.vertex_count
    return validate_channel([f"v{i}" for i in range(len(v))], v, name=family.family_name)


def channel_to_dict(channel: QubitCqChannel, prior=None) -> dict:
    # repr() of a Python float round-trips exactly
    d = {"labels": list(channel.labels), "bloch": [[float(x) for x in row] for row in channel.bloch]}
    if prior is not None:
        d["prior"] = [float(p) for p in prior]
    if channel.name:
        d["name"] = channel.name
    return d


def channel_from_dict(data) -> tuple[QubitCqChannel, np.ndarray | None]:
    if not isinstance(data, dict) or "labels" not in data or "bloch" not in data:
        raise ParseError("channel JSON needs 'labels' and 'bloch' keys")
    try:
        channel = validate_channel(data["labels"], data["bloch"], name=data.get("name"))
        prior = None if data.get("prior") is None else validate_prior(data["prior"], channel.size)
    except GuessworkError as exc:
        raise ValidationError(f"{type(exc).__name__}: {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc)) from exc
    return channel, prior


def load_channel(path, with_prior: bool = False):
    """Read a channel JSON file; returns ``(channel, prior)`` when ``with_prior`` is set."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    channel, prior = channel_from_dict(data)
    return (channel, prior) if with_prior else channel


def save_channel(channel: QubitCqChannel, path, prior=None) -> None:
    Path(path).write_text(json.dumps(channel_to_dict(channel, prior), indent=2) + "\n")


def resolve_channel(spec: str) -> QubitCqChannel:
    """A family name or a path to a channel JSON file."""
    try:
        return generate_hsic(spec)
    except KeyError:
        return load_channel(spec)
