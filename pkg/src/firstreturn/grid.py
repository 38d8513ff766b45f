"""Uniform random walks on d-dimensional boxes with three boundary rules.

Each step picks one of the 2d signed unit moves with probability 1/(2d) and
then resolves collisions with the wall: periodic wraps around, stay-still
cancels the move (mass accrues to the diagonal), reflecting bounces one unit
back inside.  States are indexed row-major with the last coordinate fastest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .chain import StateIndex, StochasticMatrix, from_entry_arrays
from .errors import Overflow, OutOfRange, SpecInvalid

#: Default cap on the number of grid states (memory guard for the sparse matrix).
STATE_CAP = 10_000_000

#: A grid point is a tuple of per-axis coordinates.
GridPoint = tuple[int, ...]


class Boundary(str, Enum):
    PERIODIC = "periodic"
    STAY_STILL = "stay"
    REFLECTING = "reflect"


@dataclass(frozen=True)
class GridSpec:
    """Box dimensions plus a boundary-condition tag.

    Raises :class:`SpecInvalid` on construction when the dimensions are
    empty, non-positive, below 2 under reflecting walls, or describe a
    single-state chain.
    """

    dims: tuple[int, ...]
    boundary: Boundary

    def __post_init__(self) -> None:
        object.__setattr__(self, "dims", tuple(int(n) for n in self.dims))
        object.__setattr__(self, "boundary", Boundary(self.boundary))
        if len(self.dims) == 0:
            raise SpecInvalid("dims must have at least one axis")
        min_side = 2 if self.boundary is Boundary.REFLECTING else 1
        for n in self.dims:
            if n < min_side:
                raise SpecInvalid(
                    f"side length {n} < {min_side} for boundary {self.boundary.value}"
                )
        if self.n_states < 2:
            raise SpecInvalid("grid must have at least 2 states")

    @property
    def n_states(self) -> int:
        return math.prod(self.dims)

    @property
    def ndim(self) -> int:
        return len(self.dims)


def _check_point(spec: GridSpec, p: Sequence[int]) -> GridPoint:
    p = tuple(int(c) for c in p)
    if len(p) != spec.ndim:
        raise OutOfRange(f"point {p} has {len(p)} coordinates, expected {spec.ndim}")
    for c, n in zip(p, spec.dims):
        if not 0 <= c < n:
            raise OutOfRange(f"point {p} outside grid {spec.dims}")
    return p


def point_to_index(spec: GridSpec, p: Sequence[int]) -> StateIndex:
    """Row-major flat index of ``p`` (last coordinate fastest)."""
    p = _check_point(spec, p)
    idx = 0
    for c, n in zip(p, spec.dims):
        idx = idx * n + c
    return idx


def index_to_point(spec: GridSpec, i: StateIndex) -> GridPoint:
    """Inverse of :func:`point_to_index`."""
    if not 0 <= i < spec.n_states:
        raise OutOfRange(f"index {i} outside [0, {spec.n_states})")
    coords = []
    for n in reversed(spec.dims):
        i, c = divmod(i, n)
        coords.append(c)
    return tuple(reversed(coords))


def classify_vertex(spec: GridSpec, p: Sequence[int]) -> int:
    """Number of binding coordinates of ``p`` (those equal to 0 or n_i - 1).

    0 means internal, 1 a face/edge point, d a full corner.  A periodic grid
    has no boundary, so the count is 0 for every point.
    """
    p = _check_point(spec, p)
    if spec.boundary is Boundary.PERIODIC:
        return 0
    return sum(1 for c, n in zip(p, spec.dims) if c == 0 or c == n - 1)


def build_grid_chain(spec: GridSpec, state_cap: int = STATE_CAP) -> StochasticMatrix:
    """Transition matrix of the uniform walk on ``spec``.

    Each of the 2d signed unit moves carries probability 1/(2d) before
    boundary resolution; parallel moves landing on the same target are summed
    into one entry.  Raises :class:`Overflow` when the state count exceeds
    ``state_cap``.
    """
    n_total = spec.n_states
    if n_total > state_cap:
        raise Overflow(f"{n_total} states exceed the cap of {state_cap}")

    d = spec.ndim
    move_prob = 1.0 / (2 * d)
    coords = np.indices(spec.dims).reshape(d, n_total)
    strides = np.array(
        [math.prod(spec.dims[i + 1 :]) for i in range(d)], dtype=np.int64
    )
    flat = np.arange(n_total, dtype=np.int64)

    targets = []
    for axis in range(d):
        n_i = spec.dims[axis]
        c = coords[axis].astype(np.int64)
        for delta in (1, -1):
            t = c + delta
            off = (t < 0) | (t >= n_i)
            if spec.boundary is Boundary.PERIODIC:
                t = np.where(t < 0, n_i - 1, np.where(t >= n_i, 0, t))
            elif spec.boundary is Boundary.STAY_STILL:
                t = np.where(off, c, t)
            else:  # reflecting: one unit past the wall maps one unit inside
                t = np.where(t < 0, 1, np.where(t >= n_i, n_i - 2, t))
            targets.append(flat + (t - c) * strides[axis])

    rows = np.tile(flat, 2 * d)
    cols = np.concatenate(targets)

    # Sum parallel moves that reach the same target.  All addends equal
    # 1/(2d) and are combined in sorted order, so equal multiplicities give
    # bit-identical entries (this is what makes symmetry exact).
    key = rows * np.int64(n_total) + cols
    order = np.argsort(key, kind="stable")
    key = key[order]
    boundaries = np.flatnonzero(np.r_[True, np.diff(key) != 0])
    probs = np.add.reduceat(np.full(key.shape[0], move_prob), boundaries)
    uniq = key[boundaries]
    return from_entry_arrays(n_total, uniq // n_total, uniq % n_total, probs)
