"""Code matrices for output-coded multiclass classification.

Matrices are built by truncating a {0,1} Sylvester-type Hadamard matrix of
dimension 2^k down to a square num_classes x num_classes block.  Each row is
a class codeword; each column defines one binary classifier.  Decoding picks
the row nearest in Hamming distance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BitMatrix = np.ndarray
"""2-D uint8 array with entries in {0, 1}, rows stored contiguously."""

KEEP_BOTTOM_RIGHT = "keep-bottom-right"
KEEP_TOP_LEFT = "keep-top-left"

# Deleting initial rows/columns (keeping the bottom-right block) is the
# orientation whose (m, r) pairs match the reference 10- and 26-class codes;
# the fixture test in tests/test_code_matrix.py gates this choice.
DEFAULT_ORIENTATION = KEEP_BOTTOM_RIGHT

SYLVESTER_MAX_K = 16

_MATRIX_CHUNK = 256


@dataclass(frozen=True, eq=False)
class CodeMatrix:
    """A class-by-classifier bit matrix with its distance parameters.

    d is the minimum Hamming distance over all row pairs and m = floor(d / 2);
    any pattern of fewer than m bit errors decodes to the original row.
    r = m / n is the correction ratio.
    """

    matrix: BitMatrix
    d: int
    m: int

    @classmethod
    def from_matrix(cls, matrix: BitMatrix) -> "CodeMatrix":
        matrix = _as_bits(matrix)
        matrix.setflags(write=False)
        d = min_row_distance(matrix)
        return cls(matrix=matrix, d=d, m=d // 2)

    @property
    def num_classes(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        """Codeword length = number of binary classifiers."""
        return self.matrix.shape[1]

    @property
    def r(self) -> float:
        return self.m / self.n


def _as_bits(matrix) -> np.ndarray:
    a = np.asarray(matrix)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.isin(a, (0, 1)).all():
        raise ValueError("matrix entries must be 0 or 1")
    return a.astype(np.uint8)


def sylvester_hadamard(k: int) -> BitMatrix:
    """{0,1} Hadamard matrix of dimension 2^k by repeated doubling.

    Entry (i, j) is 0 where the +-1 Hadamard entry is +1; equivalently the
    parity of popcount(i AND j).  Any two distinct rows differ in exactly
    2^(k-1) positions.
    """
    if k < 0:
        raise ValueError(f"k={k} must be non-negative")
    if k > SYLVESTER_MAX_K:
        raise ValueError(f"k={k} exceeds practical cap {SYLVESTER_MAX_K}")
    h = np.zeros((1, 1), dtype=np.uint8)
    for _ in range(k):
        h = np.block([[h, h], [h, 1 - h]]).astype(np.uint8)
    return h


def min_row_distance(matrix: BitMatrix) -> int:
    """Minimum Hamming distance over all unordered row pairs."""
    a = _as_bits(matrix).astype(np.int32)
    rows = a.shape[0]
    if rows < 2:
        raise ValueError("need at least 2 rows")
    # d(i, j) = |i| + |j| - 2 i.j, computed blockwise to bound memory.
    sums = a.sum(axis=1)
    best = None
    for start in range(0, rows, _MATRIX_CHUNK):
        blk = a[start : start + _MATRIX_CHUNK]
        dots = blk @ a.T
        dist = sums[start : start + _MATRIX_CHUNK, None] + sums[None, :] - 2 * dots
        i = np.arange(start, start + blk.shape[0])[:, None]
        dist = np.where(i == np.arange(rows)[None, :], np.iinfo(np.int32).max, dist)
        blk_min = int(dist.min())
        best = blk_min if best is None else min(best, blk_min)
    return best


def build_code_matrix(
    num_classes: int, orientation: str = DEFAULT_ORIENTATION
) -> CodeMatrix:
    """Square code matrix for num_classes classes.

    Takes the smallest Hadamard dimension 2^k >= num_classes and deletes
    2^k - num_classes rows and columns: from the top-left corner under
    keep-bottom-right (the default), from the bottom-right corner under
    keep-top-left.
    """
    if num_classes < 2:
        raise ValueError(f"num_classes={num_classes} must be at least 2")
    k = 0
    while (1 << k) < num_classes:
        k += 1
    h = sylvester_hadamard(k)
    if orientation == KEEP_BOTTOM_RIGHT:
        block = h[-num_classes:, -num_classes:]
    elif orientation == KEEP_TOP_LEFT:
        block = h[:num_classes, :num_classes]
    else:
        raise ValueError(f"unknown orientation {orientation!r}")
    return CodeMatrix.from_matrix(block)


def decode(word, code: CodeMatrix, report_ties: bool = False):
    """Index of the codeword nearest to word in Hamming distance.

    Ties always resolve to the lowest row index; with report_ties=True the
    result is (index, tie_flag) instead of a bare index.
    """
    w = np.asarray(word)
    if w.ndim != 1 or w.shape[0] != code.n:
        raise ValueError(f"word length {w.shape} does not match code n={code.n}")
    if not np.isin(w, (0, 1)).all():
        raise ValueError("word entries must be 0 or 1")
    dist = (code.matrix != w.astype(np.uint8)).sum(axis=1)
    idx = int(dist.argmin())
    if report_ties:
        return idx, int((dist == dist[idx]).sum()) > 1
    return idx


def to_text(code: CodeMatrix) -> str:
    """Serialize as a header line "n d m" followed by one row of 0/1
    characters per class."""
    lines = [f"{code.n} {code.d} {code.m}"]
    lines += ["".join(str(b) for b in row) for row in code.matrix]
    return "\n".join(lines) + "\n"


def from_text(text: str) -> CodeMatrix:
    """Parse the to_text format, recomputing and checking d and m."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty code matrix text")
    parts = lines[0].split()
    if len(parts) != 3:
        raise ValueError(f"bad header {lines[0]!r}; expected 'n d m'")
    n, d, m = (int(p) for p in parts)
    rows = lines[1:]
    if any(len(row) != n for row in rows):
        raise ValueError(f"rows must all have length n={n}")
    matrix = np.array([[int(ch) for ch in row] for row in rows], dtype=np.uint8)
    code = CodeMatrix.from_matrix(matrix)
    if (code.d, code.m) != (d, m):
        raise ValueError(
            f"header claims d={d} m={m} but matrix has d={code.d} m={code.m}"
        )
    return code
