"""Min-plus and max-plus matrices over the extended naturals.

The scalar layer fixes -inf as absorbing for addition (the strongest claim
in the interface reading); each matrix carries its semiring tag and
operations refuse to mix the two.
"""

from __future__ import annotations

from dataclasses import dataclass

from .kernel import (
    NEG_INF,
    POS_INF,
    ExtNat,
    SchedAlgebraError,
    check_extnat,
    ext_add,
    ext_max,
    ext_min,
    format_extnat,
)

MIN_PLUS = "min-plus"
MAX_PLUS = "max-plus"

add = ext_add
minimum = ext_min
maximum = ext_max


class MatrixError(SchedAlgebraError):
    """Dimension or semiring mismatch in a matrix operation."""


@dataclass(frozen=True)
class TropicalMatrix:
    rows: int
    cols: int
    entries: tuple[ExtNat, ...]
    semiring: str

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise MatrixError("matrix dimensions must be nonnegative")
        if len(self.entries) != self.rows * self.cols:
            raise MatrixError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )
        if self.semiring not in (MIN_PLUS, MAX_PLUS):
            raise MatrixError(f"unknown semiring {self.semiring!r}")
        for value in self.entries:
            check_extnat(value)

    def __getitem__(self, index: tuple[int, int]) -> ExtNat:
        i, j = index
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"entry ({i}, {j}) outside {self.rows}x{self.cols}")
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[ExtNat, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple[ExtNat, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> list[list[ExtNat]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def __str__(self) -> str:
        return format_matrix(self)

    @property
    def _combine(self):
        return ext_min if self.semiring == MIN_PLUS else ext_max

    @property
    def _neutral(self) -> ExtNat:
        # identity of the min/max reduction: the "no path" value
        return POS_INF if self.semiring == MIN_PLUS else NEG_INF


def matrix(rows_data, semiring: str) -> TropicalMatrix:
    """Build a matrix from a list of rows."""
    rows_data = [list(r) for r in rows_data]
    n_rows = len(rows_data)
    n_cols = len(rows_data[0]) if rows_data else 0
    if any(len(r) != n_cols for r in rows_data):
        raise MatrixError("ragged rows")
    flat = tuple(value for row in rows_data for value in row)
    return TropicalMatrix(n_rows, n_cols, flat, semiring)


def identity(n: int, semiring: str) -> TropicalMatrix:
    """Unit of matrix multiplication: 0 diagonal, no-path elsewhere."""
    off = POS_INF if semiring == MIN_PLUS else NEG_INF
    entries = tuple(0 if i == j else off for i in range(n) for j in range(n))
    return TropicalMatrix(n, n, entries, semiring)


def constant(rows: int, cols: int, value: ExtNat, semiring: str) -> TropicalMatrix:
    return TropicalMatrix(rows, cols, (value,) * (rows * cols), semiring)


def _check_same_semiring(a: TropicalMatrix, b: TropicalMatrix):
    if a.semiring != b.semiring:
        raise MatrixError(f"semiring mismatch: {a.semiring} vs {b.semiring}")


def mat_mul(a: TropicalMatrix, b: TropicalMatrix) -> TropicalMatrix:
    """Tropical product: reduce sums of entry pairs by min or max."""
    _check_same_semiring(a, b)
    if a.cols != b.rows:
        raise MatrixError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    combine = a._combine
    neutral = a._neutral
    entries = []
    for i in range(a.rows):
        row = a.row(i)
        for j in range(b.cols):
            acc = neutral
            for k in range(a.cols):
                acc = combine(acc, ext_add(row[k], b.entries[k * b.cols + j]))
            entries.append(acc)
    return TropicalMatrix(a.rows, b.cols, tuple(entries), a.semiring)


def _pointwise(a: TropicalMatrix, b: TropicalMatrix, op) -> TropicalMatrix:
    _check_same_semiring(a, b)
    if (a.rows, a.cols) != (b.rows, b.cols):
        raise MatrixError(
            f"dimension mismatch: {a.rows}x{a.cols} vs {b.rows}x{b.cols}"
        )
    entries = tuple(op(x, y) for x, y in zip(a.entries, b.entries))
    return TropicalMatrix(a.rows, a.cols, entries, a.semiring)


def mat_meet(a: TropicalMatrix, b: TropicalMatrix) -> TropicalMatrix:
    """Pointwise minimum."""
    return _pointwise(a, b, ext_min)


def mat_join(a: TropicalMatrix, b: TropicalMatrix) -> TropicalMatrix:
    """Pointwise maximum."""
    return _pointwise(a, b, ext_max)


def closure(n: TropicalMatrix) -> TropicalMatrix:
    """Kleene closure Id meet N meet N^2 meet ... in min-plus.

    Stabilises within the matrix dimension for nonnegative weights; rejects
    -inf entries, which would admit ever-decreasing cycles.
    """
    if n.semiring != MIN_PLUS:
        raise MatrixError("closure is defined on min-plus matrices")
    if n.rows != n.cols:
        raise MatrixError("closure needs a square matrix")
    if any(value == NEG_INF for value in n.entries):
        raise MatrixError("closure rejects -inf entries")
    acc = identity(n.rows, MIN_PLUS)
    for _ in range(n.rows):
        nxt = mat_meet(acc, mat_mul(acc, n))
        if nxt == acc:
            return acc
        acc = nxt
    return acc


def kron(a: TropicalMatrix, b: TropicalMatrix) -> TropicalMatrix:
    """Kronecker product: block (i, j) is ``a[i, j]`` tropically scaling ``b``
    (entrywise addition)."""
    _check_same_semiring(a, b)
    rows = a.rows * b.rows
    cols = a.cols * b.cols
    entries = []
    for i in range(rows):
        ai, bi = divmod(i, b.rows)
        for j in range(cols):
            aj, bj = divmod(j, b.cols)
            entries.append(ext_add(a[ai, aj], b[bi, bj]))
    return TropicalMatrix(rows, cols, tuple(entries), a.semiring)


def format_matrix(m: TropicalMatrix) -> str:
    body = "; ".join(
        ", ".join(format_extnat(value) for value in m.row(i)) for i in range(m.rows)
    )
    return f"[{body}]"


def parse_matrix(text: str, semiring: str) -> TropicalMatrix:
    """Row-major bracket syntax: ``[r11, r12; r21, r22]``."""
    stripped = text.strip()
    if not (stripped.startswith("[") and stripped.endswith("]")):
        raise MatrixError(f"matrix literal must be bracketed: {text!r}")
    rows_data = []
    for row_text in stripped[1:-1].split(";"):
        row = []
        for cell in row_text.split(","):
            cell = cell.strip()
            if cell == "-inf":
                row.append(NEG_INF)
            elif cell == "+inf":
                row.append(POS_INF)
            else:
                try:
                    row.append(int(cell))
                except ValueError:
                    raise MatrixError(f"bad matrix entry {cell!r}") from None
        rows_data.append(row)
    return matrix(rows_data, semiring)
