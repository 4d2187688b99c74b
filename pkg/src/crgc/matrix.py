"""Dense matrices over a finite field: Vandermonde construction,
multiplication, and Gauss-Jordan inversion.

Pivoting takes the first nonzero entry in the column; there is no
magnitude to prefer in a finite field, and arithmetic is exact, so a
failed pivot search is the definition of singularity.  All matrices are
immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass

from .galois import FieldElement, FieldSpec


class ShapeError(ValueError):
    """Operand dimensions do not fit the operation."""


class SingularMatrixError(ValueError):
    """Square matrix has no inverse."""


@dataclass(frozen=True)
class Matrix:
    spec: FieldSpec
    rows: int
    cols: int
    entries: tuple[FieldElement, ...]  # row-major

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise ShapeError("negative dimensions")
        if len(self.entries) != self.rows * self.cols:
            raise ShapeError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} "
                f"entries, got {len(self.entries)}"
            )
        for e in self.entries:
            if e.spec != self.spec:
                raise ValueError("entry from a different field")

    @classmethod
    def from_rows(cls, spec: FieldSpec, rows) -> "Matrix":
        rows = [list(r) for r in rows]
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ShapeError("ragged rows")
        flat = tuple(e for r in rows for e in r)
        return cls(spec, nrows, ncols, flat)

    @classmethod
    def identity(cls, spec: FieldSpec, size: int) -> "Matrix":
        one, zero = spec.one, spec.zero
        flat = tuple(one if i == j else zero for i in range(size) for j in range(size))
        return cls(spec, size, size, flat)

    @classmethod
    def zeros(cls, spec: FieldSpec, rows: int, cols: int) -> "Matrix":
        return cls(spec, rows, cols, (spec.zero,) * (rows * cols))

    def at(self, i: int, j: int) -> FieldElement:
        return self.entries[i * self.cols + j]

    def __getitem__(self, ij) -> FieldElement:
        return self.at(*ij)

    def row(self, i: int) -> tuple[FieldElement, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def col(self, j: int) -> tuple[FieldElement, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def transpose(self) -> "Matrix":
        flat = tuple(self.at(i, j) for j in range(self.cols) for i in range(self.rows))
        return Matrix(self.spec, self.cols, self.rows, flat)

    def columns_submatrix(self, indices) -> "Matrix":
        idx = list(indices)
        flat = tuple(self.at(i, j) for i in range(self.rows) for j in idx)
        return Matrix(self.spec, self.rows, len(idx), flat)

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeError("entrywise addition needs equal shapes")
        flat = tuple(a + b for a, b in zip(self.entries, other.entries))
        return Matrix(self.spec, self.rows, self.cols, flat)

    def __mul__(self, other: "Matrix") -> "Matrix":
        return mat_mul(self, other)

    def inverse(self) -> "Matrix":
        return invert(self)

    def values(self) -> list[list[int]]:
        """Integer view of the entries, row-major, for tests and dumps."""
        return [[e.value for e in self.row(i)] for i in range(self.rows)]


def vandermonde(k: int, points) -> Matrix:
    """k x n matrix whose (i, j) entry is points[j]**i."""
    pts = list(points)
    if k < 1:
        raise ShapeError("need at least one row")
    if len(set(p.value for p in pts)) != len(pts):
        raise ValueError("evaluation points must be pairwise distinct")
    spec = pts[0].spec
    flat = []
    row = [spec.one] * len(pts)
    for i in range(k):
        if i:
            row = [r * p for r, p in zip(row, pts)]
        flat.extend(row)
    return Matrix(spec, k, len(pts), tuple(flat))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if a.cols != b.rows:
        raise ShapeError(f"inner dimensions differ: {a.cols} vs {b.rows}")
    if a.spec != b.spec:
        raise ValueError("operands live in different fields")
    spec = a.spec
    mul = spec.mul_i
    add = spec.add_i
    flat = []
    bt = [b.col(j) for j in range(b.cols)]
    for i in range(a.rows):
        arow = a.row(i)
        for bcol in bt:
            acc = 0
            for x, y in zip(arow, bcol):
                acc = add(acc, mul(x.value, y.value))
            flat.append(FieldElement(spec, acc))
    return Matrix(spec, a.rows, b.cols, tuple(flat))


def invert(a: Matrix) -> Matrix:
    if a.rows != a.cols:
        raise ShapeError("only square matrices can be inverted")
    n = a.rows
    spec = a.spec
    # Augmented [A | I] as mutable integer rows.
    aug = []
    for i in range(n):
        row = [e.value for e in a.row(i)]
        row += [1 if i == j else 0 for j in range(n)]
        aug.append(row)
    mul, sub, inv = spec.mul_i, spec.sub_i, spec.inv_i
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise SingularMatrixError(f"no pivot in column {col}")
        aug[col], aug[piv] = aug[piv], aug[col]
        scale = inv(aug[col][col])
        aug[col] = [mul(scale, v) for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [sub(v, mul(factor, w)) for v, w in zip(aug[r], aug[col])]
    flat = tuple(FieldElement(spec, aug[i][n + j]) for i in range(n) for j in range(n))
    return Matrix(spec, n, n, flat)
