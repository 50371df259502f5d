"""
Chord linearization of the BPR flow-weighted travel time y*T(y).

T(y) = (l/v) * (1 + 0.15 * (y/u)^4). The chords between breakpoints
r*eps (r = 0..n_L, eps = 2u/n_L) give slopes alpha_r and intercepts xi_r;
the congestion epigraph is g >= alpha_r * f + xi_r for every piece.
The max of the chords is exact at breakpoints and lies above the
convex curve between them.
"""

from functools import lru_cache
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..exceptions import ModelBuildError
from ..models import ArcRecord

BPR_ALPHA = 0.15
BPR_BETA = 4


def bpr_time(length: float, speed: float, capacity: float, y) -> np.ndarray:
    """Travel time T(y) in hours; vectorized over y."""
    y = np.asarray(y, dtype=float)
    return (length / speed) * (1.0 + BPR_ALPHA * (y / capacity) ** BPR_BETA)


def arc_time(arc: ArcRecord, y) -> np.ndarray:
    if arc.capacity is None:
        raise ModelBuildError(f"arc {arc.key} has no capacity; derive constants first")
    return bpr_time(arc.length, arc.speed, arc.capacity, y)


class BprPieces(BaseModel):
    model_config = ConfigDict(frozen=True)

    width: float  # eps, v/h
    heights: Tuple[float, ...]  # t_r, r = 0..n_L, (v/h)-h
    slopes: Tuple[float, ...]  # alpha_r, r = 1..n_L, h
    intercepts: Tuple[float, ...]  # xi_r, r = 1..n_L

    @property
    def n_pieces(self) -> int:
        return len(self.slopes)

    def envelope(self, y) -> np.ndarray:
        """max_r(alpha_r * y + xi_r), the value g takes at optimality."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        lines = np.outer(y, np.asarray(self.slopes)) + np.asarray(self.intercepts)
        return lines.max(axis=1)


@lru_cache(maxsize=4096)
def _pieces(length: float, speed: float, capacity: float, n_pieces: int) -> BprPieces:
    if capacity <= 0 or speed <= 0 or n_pieces < 1:
        raise ModelBuildError(f"degenerate BPR arc (u={capacity}, v={speed}, n_L={n_pieces})")
    eps = 2.0 * capacity / n_pieces
    y = eps * np.arange(n_pieces + 1)
    t = y * bpr_time(length, speed, capacity, y)
    alpha = np.diff(t) / eps
    r = np.arange(1, n_pieces + 1)
    xi = t[1:] - alpha * r * eps
    return BprPieces(
        width=float(eps),
        heights=tuple(float(v) for v in t),
        slopes=tuple(float(v) for v in alpha),
        intercepts=tuple(float(v) for v in xi),
    )


def build_pieces(arc: ArcRecord, n_pieces: int) -> BprPieces:
    if arc.capacity is None:
        raise ModelBuildError(f"arc {arc.key} has no capacity; derive constants first")
    return _pieces(arc.length, arc.speed, arc.capacity, n_pieces)
