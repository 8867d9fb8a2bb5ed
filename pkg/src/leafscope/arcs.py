"""Finite unions of closed arcs on the unit circle with explicit measure bookkeeping."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi
_EPS = 1e-15


def _normalize(pieces) -> tuple[tuple[float, float], ...]:
    """Sort and merge non-wrapping pieces ``0 <= s < e <= 2pi``."""
    clean = sorted((float(s), float(e)) for s, e in pieces if e - s > _EPS)
    merged: list[list[float]] = []
    for s, e in clean:
        if merged and s <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], e)
        else:
            merged.append([s, e])
    return tuple((s, e) for s, e in merged)


def _split(start: float, length: float):
    """Pieces of the arc ``[start, start + length]`` inside ``[0, 2pi]``."""
    if length >= TWO_PI:
        return [(0.0, TWO_PI)]
    s = start % TWO_PI
    e = s + length
    if e <= TWO_PI:
        return [(s, e)]
    return [(s, TWO_PI), (0.0, e - TWO_PI)]


@dataclass(frozen=True)
class BoundaryArcSet:
    """Union of closed arcs, stored as sorted disjoint pieces of ``[0, 2pi]``.

    Arcs through angle 0 are kept as two pieces; ``arcs`` rejoins them.
    """

    pieces: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "pieces", _normalize(self.pieces))

    @classmethod
    def full(cls) -> "BoundaryArcSet":
        return cls(((0.0, TWO_PI),))

    @classmethod
    def empty(cls) -> "BoundaryArcSet":
        return cls(())

    @classmethod
    def from_arcs(cls, arcs) -> "BoundaryArcSet":
        """From ``(start, end)`` angle pairs traversed counterclockwise."""
        pieces = []
        for s, e in arcs:
            pieces += _split(s, (e - s) if e - s >= TWO_PI else (e - s) % TWO_PI)
        return cls(tuple(pieces))

    @classmethod
    def window(cls, center: float, half_width: float) -> "BoundaryArcSet":
        return cls(tuple(_split(center - half_width, 2.0 * half_width)))

    @property
    def measure(self) -> float:
        return math.fsum(e - s for s, e in self.pieces)

    @property
    def arcs(self) -> list[tuple[float, float]]:
        p = list(self.pieces)
        if len(p) >= 2 and p[0][0] == 0.0 and p[-1][1] == TWO_PI:
            first, last = p.pop(0), p.pop()
            p.append((last[0], first[1] + TWO_PI))
        elif len(p) == 1 and p[0] == (0.0, TWO_PI):
            return [(0.0, TWO_PI)]
        return p

    def __len__(self) -> int:
        return len(self.arcs)

    def is_empty(self) -> bool:
        return not self.pieces

    def union(self, other: "BoundaryArcSet") -> "BoundaryArcSet":
        return BoundaryArcSet(self.pieces + other.pieces)

    def complement(self) -> "BoundaryArcSet":
        out, cur = [], 0.0
        for s, e in self.pieces:
            if s > cur:
                out.append((cur, s))
            cur = max(cur, e)
        if cur < TWO_PI:
            out.append((cur, TWO_PI))
        return BoundaryArcSet(tuple(out))

    def intersection(self, other: "BoundaryArcSet") -> "BoundaryArcSet":
        out = []
        i = j = 0
        a, b = self.pieces, other.pieces
        while i < len(a) and j < len(b):
            s = max(a[i][0], b[j][0])
            e = min(a[i][1], b[j][1])
            if e > s:
                out.append((s, e))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return BoundaryArcSet(tuple(out))

    def difference(self, other: "BoundaryArcSet") -> "BoundaryArcSet":
        return self.intersection(other.complement())

    def contains(self, angle) -> np.ndarray | bool:
        t = np.mod(np.asarray(angle, dtype=float), TWO_PI)
        hit = np.zeros(t.shape, dtype=bool)
        for s, e in self.pieces:
            hit |= (t >= s) & (t <= e)
        return bool(hit) if hit.ndim == 0 else hit

    def expanded(self, margin: float) -> "BoundaryArcSet":
        """Closed ``margin``-neighbourhood."""
        return BoundaryArcSet.from_arcs([(s - margin, e + margin) for s, e in self.arcs]) if self.pieces else self

    def sample(self, per_arc: int) -> np.ndarray:
        """``per_arc`` equally spaced angles on each arc, endpoints included."""
        out = [np.linspace(s, e, per_arc) for s, e in self.arcs]
        return np.mod(np.concatenate(out), TWO_PI) if out else np.zeros(0)

    def largest_arcs(self) -> list[tuple[float, float]]:
        return sorted(self.arcs, key=lambda se: -(se[1] - se[0]))

    def as_pairs(self) -> list[list[float]]:
        return [[s, e] for s, e in self.arcs]
