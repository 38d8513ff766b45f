"""Sparse row-stochastic transition matrices with validated construction.

A :class:`StochasticMatrix` stores the transition matrix of a random walk on
a finite directed graph in CSR form (row-major, zeros never stored).  The
validating constructors (:func:`from_sparse_rows`, :func:`load_graph_file`)
guarantee the invariants that every downstream computation relies on: rows
sum to 1 within ``ROW_SUM_TOL``, indices are sorted and in range, and the
support graph is strongly connected, so return to any origin is certain.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import breadth_first_order

from .errors import (
    DuplicateEntry,
    IndexOutOfRange,
    NegativeProbability,
    NotStronglyConnected,
    ParseError,
    RowSumError,
    TooSmall,
)

#: Absolute tolerance on |row sum - 1|.  Inputs come from exact dyadic
#: boundary rules (halves, quarters, 1/(2d)), so anything larger signals a
#: construction bug rather than roundoff.
ROW_SUM_TOL = 1e-12

#: A state is addressed by its integer index in [0, n_states).
StateIndex = int


@dataclass(frozen=True)
class Violation:
    """One violated invariant found by :func:`validate`.

    ``kind`` names the matching error class (``"RowSumError"``,
    ``"NotStronglyConnected"``, ...), ``rows`` lists the offending row
    indices where that makes sense.
    """

    kind: str
    rows: tuple[int, ...]
    message: str


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """Row-stochastic transition matrix in CSR storage.

    Instances are immutable after construction and safe to share across
    concurrent readers.  Build them through :func:`from_sparse_rows` or
    :func:`load_graph_file`; direct instantiation skips validation and is
    only meant for :func:`validate` tests.
    """

    n_states: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    labels: tuple[str, ...] | None = None

    @property
    def nnz(self) -> int:
        return int(self.data.shape[0])

    def row_entries(self, x: StateIndex) -> list[tuple[int, float]]:
        """Stored ``(column, probability)`` pairs of row ``x``."""
        lo, hi = int(self.indptr[x]), int(self.indptr[x + 1])
        return [(int(c), float(p)) for c, p in zip(self.indices[lo:hi], self.data[lo:hi])]

    def probability(self, x: StateIndex, y: StateIndex) -> float:
        """U_{x,y}, zero when the entry is not stored."""
        lo, hi = int(self.indptr[x]), int(self.indptr[x + 1])
        pos = np.searchsorted(self.indices[lo:hi], y)
        if pos < hi - lo and self.indices[lo + pos] == y:
            return float(self.data[lo + pos])
        return 0.0

    def csr(self) -> sp.csr_matrix:
        """CSR view sharing this matrix's arrays."""
        return sp.csr_matrix(
            (self.data, self.indices, self.indptr),
            shape=(self.n_states, self.n_states),
            copy=False,
        )

    def dense(self) -> np.ndarray:
        """Dense copy; intended for small oracle computations."""
        return self.csr().toarray()

    def row_sums(self) -> np.ndarray:
        sums = np.zeros(self.n_states)
        counts = np.diff(self.indptr)
        nonempty = counts > 0
        if nonempty.any():
            starts = self.indptr[:-1][nonempty]
            sums[nonempty] = np.add.reduceat(self.data, starts)
        return sums


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _strongly_connected(matrix: sp.csr_matrix) -> bool:
    # Forward plus backward reachability from state 0: both covering all
    # states is equivalent to strong connectivity.
    n = matrix.shape[0]
    fwd = breadth_first_order(matrix, 0, directed=True, return_predecessors=False)
    if fwd.shape[0] < n:
        return False
    bwd = breadth_first_order(matrix.T, 0, directed=True, return_predecessors=False)
    return bwd.shape[0] == n


def from_entry_arrays(
    n: int,
    rows: np.ndarray,
    cols: np.ndarray,
    probs: np.ndarray,
    labels: Sequence[str] | None = None,
) -> StochasticMatrix:
    """Array-based validating constructor (fast path for generators).

    Parameters
    ----------
    n : int
        Number of states, at least 2.
    rows, cols : integer arrays
        Entry coordinates; no (row, col) pair may repeat.
    probs : float array
        Transition probabilities; exact zeros are dropped, everything else
        must be positive and rows must sum to 1 within ``ROW_SUM_TOL``.
    labels : sequence of str, optional
        Display names, length ``n``.

    Raises
    ------
    TooSmall, IndexOutOfRange, NegativeProbability, DuplicateEntry,
    RowSumError, NotStronglyConnected
    """
    if n < 2:
        raise TooSmall(f"need at least 2 states, got n={n}")
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    probs = np.asarray(probs, dtype=np.float64)
    if not (rows.shape == cols.shape == probs.shape) or rows.ndim != 1:
        raise ParseError("rows, cols and probs must be 1-d arrays of equal length")

    bad = (rows < 0) | (rows >= n) | (cols < 0) | (cols >= n)
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise IndexOutOfRange(
            f"entry ({int(rows[k])}, {int(cols[k])}) outside [0, {n})"
        )
    neg = probs < 0
    if neg.any():
        k = int(np.flatnonzero(neg)[0])
        raise NegativeProbability(
            f"entry ({int(rows[k])}, {int(cols[k])}) has probability {probs[k]!r}"
        )

    keep = probs != 0.0
    rows, cols, probs = rows[keep], cols[keep], probs[keep]

    order = np.lexsort((cols, rows))
    rows, cols, probs = rows[order], cols[order], probs[order]
    if rows.shape[0] > 1:
        dup = (np.diff(rows) == 0) & (np.diff(cols) == 0)
        if dup.any():
            k = int(np.flatnonzero(dup)[0])
            raise DuplicateEntry(f"duplicate entry at ({int(rows[k])}, {int(cols[k])})")

    counts = np.bincount(rows, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])

    sums = np.zeros(n)
    nonempty = counts > 0
    if nonempty.any():
        sums[nonempty] = np.add.reduceat(probs, indptr[:-1][nonempty])
    off = ~(np.abs(sums - 1.0) <= ROW_SUM_TOL)  # catches NaN as well
    if off.any():
        bad_rows = np.flatnonzero(off)[:10]
        detail = ", ".join(f"row {int(r)} sums to {sums[r]!r}" for r in bad_rows)
        raise RowSumError(detail)

    matrix = StochasticMatrix(
        n_states=n,
        indptr=_freeze(indptr),
        indices=_freeze(cols),
        data=_freeze(probs),
        labels=tuple(labels) if labels is not None else None,
    )
    if not _strongly_connected(matrix.csr()):
        raise NotStronglyConnected("transition graph is not strongly connected")
    return matrix


def from_sparse_rows(
    n: int,
    entries: Iterable[tuple[int, int, float]],
    labels: Sequence[str] | None = None,
) -> StochasticMatrix:
    """Build a validated chain from ``(row, col, prob)`` triples.

    Zero-probability entries are dropped; rows are stored sorted by column.
    See :func:`from_entry_arrays` for the raised errors.
    """
    ent = list(entries)
    rows = np.array([e[0] for e in ent], dtype=np.int64)
    cols = np.array([e[1] for e in ent], dtype=np.int64)
    probs = np.array([e[2] for e in ent], dtype=np.float64)
    return from_entry_arrays(n, rows, cols, probs, labels)


def validate(matrix: StochasticMatrix) -> list[Violation]:
    """Check every :class:`StochasticMatrix` invariant, without raising.

    Returns one :class:`Violation` per broken invariant (empty list when the
    instance is valid).  The report is empty exactly when
    :func:`from_sparse_rows` would have accepted the raw entries.
    """
    out: list[Violation] = []
    n = matrix.n_states
    if n < 2:
        out.append(Violation("TooSmall", (), f"n_states={n} < 2"))

    idx = matrix.indices
    in_range = (idx >= 0) & (idx < n)
    if not in_range.all():
        rows = _rows_of_entries(matrix, np.flatnonzero(~in_range))
        out.append(Violation("IndexOutOfRange", rows, "column index outside [0, n)"))

    bad_rows: list[int] = []
    dup_rows: list[int] = []
    for x in range(n):
        lo, hi = int(matrix.indptr[x]), int(matrix.indptr[x + 1])
        d = np.diff(idx[lo:hi])
        if (d == 0).any():
            dup_rows.append(x)
        elif (d < 0).any():
            bad_rows.append(x)
    if dup_rows:
        out.append(Violation("DuplicateEntry", tuple(dup_rows), "repeated column within a row"))
    if bad_rows:
        out.append(Violation("UnsortedColumns", tuple(bad_rows), "columns not strictly increasing"))

    nonpos = ~((matrix.data > 0.0) & (matrix.data <= 1.0))
    if nonpos.any():
        rows = _rows_of_entries(matrix, np.flatnonzero(nonpos))
        out.append(Violation("NegativeProbability", rows, "stored probability outside (0, 1]"))

    sums = matrix.row_sums()
    off = np.flatnonzero(~(np.abs(sums - 1.0) <= ROW_SUM_TOL))
    if off.shape[0]:
        out.append(
            Violation(
                "RowSumError",
                tuple(int(r) for r in off),
                f"row sums deviate from 1 by more than {ROW_SUM_TOL}",
            )
        )

    if n >= 2 and not _strongly_connected(matrix.csr()):
        out.append(Violation("NotStronglyConnected", (), "graph is not strongly connected"))
    return out


def _rows_of_entries(matrix: StochasticMatrix, entry_positions: np.ndarray) -> tuple[int, ...]:
    rows = np.searchsorted(matrix.indptr, entry_positions, side="right") - 1
    return tuple(int(r) for r in np.unique(rows))


# --- graph file I/O ------------------------------------------------------
#
# Schema (UTF-8, one JSON document per file):
#   { "n": <int >= 2>,
#     "labels": [<string>, ...],                      # optional, length n
#     "rows": [ [ [<col:int>, <prob:float>], ... ], ... ] }   # length n
#
# Probabilities round-trip bit-exactly: json emits the shortest decimal
# that parses back to the identical 64-bit float.


def load_graph_file(path: str | Path) -> StochasticMatrix:
    """Load and validate a graph JSON file.

    Raises :class:`ParseError` for malformed documents, plus every
    :func:`from_sparse_rows` error for invalid chains.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from exc

    if not isinstance(doc, dict):
        raise ParseError("top-level document must be an object")
    if not isinstance(doc.get("n"), int) or isinstance(doc.get("n"), bool):
        raise ParseError('"n" must be an integer')
    n = doc["n"]
    rows_field = doc.get("rows")
    if not isinstance(rows_field, list) or len(rows_field) != n:
        raise ParseError('"rows" must be a list of length n')
    labels = doc.get("labels")
    if labels is not None:
        if (
            not isinstance(labels, list)
            or len(labels) != n
            or not all(isinstance(s, str) for s in labels)
        ):
            raise ParseError('"labels" must be a list of n strings')

    entries: list[tuple[int, int, float]] = []
    for x, row in enumerate(rows_field):
        if not isinstance(row, list):
            raise ParseError(f"row {x} is not a list")
        for item in row:
            if not (isinstance(item, (list, tuple)) and len(item) == 2):
                raise ParseError(f"row {x} entry {item!r} is not a [col, prob] pair")
            col, prob = item
            if not isinstance(col, int) or isinstance(col, bool):
                raise ParseError(f"row {x} column {col!r} is not an integer")
            if not isinstance(prob, (int, float)) or isinstance(prob, bool):
                raise ParseError(f"row {x} probability {prob!r} is not a number")
            entries.append((x, col, float(prob)))
    return from_sparse_rows(n, entries, labels)


def to_json_document(matrix: StochasticMatrix) -> str:
    """Serialize a chain to the graph JSON schema (round-trip exact)."""
    doc: dict = {"n": matrix.n_states}
    if matrix.labels is not None:
        doc["labels"] = list(matrix.labels)
    doc["rows"] = [matrix.row_entries(x) for x in range(matrix.n_states)]
    return json.dumps(doc) + "\n"


def save_graph_file(matrix: StochasticMatrix, path: str | Path) -> None:
    Path(path).write_text(to_json_document(matrix), encoding="utf-8")
