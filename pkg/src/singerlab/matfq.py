"""Dense exact linear algebra over the fields in ffield.

Matrices hold integer element codes in an int64 numpy array. Prime fields
get vectorized add/mul/matmul with an overflow guard; extension fields fall
back to scalar loops over the field's code arithmetic. Everything here is
deterministic: pivots are always the first nonzero entry in scan order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FieldMismatch, InvalidInput, ShapeMismatch, SingularMatrix
from .ffield import DensePoly, Field, FieldCtx, poly_trim, roots_in_extension


def _vec_ok(F: Field, inner: int) -> bool:
    return F.m == 1 and inner * (F.p - 1) ** 2 < 2**62


@dataclass
class Matrix:
    """A matrix of element codes over a fixed field."""

    field: Field
    a: np.ndarray

    @staticmethod
    def from_rows(field: Field, rows) -> "Matrix":
        try:
            arr = np.array(rows, dtype=np.int64)
        except (TypeError, ValueError) as exc:
            raise InvalidInput(f"matrix rows are not rectangular integers: {exc}") from exc
        if arr.ndim != 2:
            raise InvalidInput("matrix rows must form a rectangle")
        if arr.size and (arr.min() < 0 or arr.max() >= field.order):
            raise InvalidInput("entry code out of range for the field")
        return Matrix(field, arr)

    @staticmethod
    def zeros(field: Field, r: int, c: int) -> "Matrix":
        return Matrix(field, np.zeros((r, c), dtype=np.int64))

    @staticmethod
    def identity(field: Field, n: int) -> "Matrix":
        return Matrix(field, np.eye(n, dtype=np.int64))

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    def copy(self) -> "Matrix":
        return Matrix(self.field, self.a.copy())

    def tolist(self) -> list[list[int]]:
        return [[int(x) for x in row] for row in self.a]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Matrix)
            and self.field == other.field
            and self.a.shape == other.a.shape
            and bool((self.a == other.a).all())
        )

    def _peer(self, other: "Matrix") -> None:
        if self.field != other.field:
            raise FieldMismatch("matrices over different fields")

    # -- ring operations ----------------------------------------------------

    def __add__(self, other: "Matrix") -> "Matrix":
        self._peer(other)
        if self.shape != other.shape:
            raise ShapeMismatch(f"{self.shape} + {other.shape}")
        F = self.field
        if F.m == 1:
            return Matrix(F, (self.a + other.a) % F.p)
        out = np.empty_like(self.a)
        for i in range(self.a.shape[0]):
            for j in range(self.a.shape[1]):
                out[i, j] = F.add(int(self.a[i, j]), int(other.a[i, j]))
        return Matrix(F, out)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def __neg__(self) -> "Matrix":
        F = self.field
        if F.m == 1:
            return Matrix(F, (-self.a) % F.p)
        out = np.empty_like(self.a)
        for i in range(self.a.shape[0]):
            for j in range(self.a.shape[1]):
                out[i, j] = F.neg(int(self.a[i, j]))
        return Matrix(F, out)

    def scale(self, c: int) -> "Matrix":
        F = self.field
        if F.m == 1:
            return Matrix(F, (self.a * c) % F.p)
        out = np.empty_like(self.a)
        for i in range(self.a.shape[0]):
            for j in range(self.a.shape[1]):
                out[i, j] = F.mul(c, int(self.a[i, j]))
        return Matrix(F, out)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._peer(other)
        r, k = self.shape
        k2, c = other.shape
        if k != k2:
            raise ShapeMismatch(f"{self.shape} @ {other.shape}")
        F = self.field
        if _vec_ok(F, k):
            return Matrix(F, (self.a @ other.a) % F.p)
        out = np.zeros((r, c), dtype=np.int64)
        for i in range(r):
            arow = self.a[i]
            for j in range(c):
                acc = 0
                for t in range(k):
                    x = int(arow[t])
                    if x:
                        acc = F.add(acc, F.mul(x, int(other.a[t, j])))
                out[i, j] = acc
        return Matrix(F, out)

    def pow(self, e: int) -> "Matrix":
        n, n2 = self.shape
        if n != n2:
            raise ShapeMismatch("matrix power needs a square matrix")
        if e < 0:
            return self.inv().pow(-e)
        result = Matrix.identity(self.field, n)
        base = self
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def transpose(self) -> "Matrix":
        return Matrix(self.field, self.a.T.copy())

    def map_entries(self, fn) -> "Matrix":
        """Apply a code-to-code function entrywise (e.g. a Frobenius twist)."""
        out = np.empty_like(self.a)
        for i in range(self.a.shape[0]):
            for j in range(self.a.shape[1]):
                out[i, j] = fn(int(self.a[i, j]))
        return Matrix(self.field, out)

    # -- elimination --------------------------------------------------------

    def rref(self) -> tuple["Matrix", list[int]]:
        """Reduced row echelon form and its pivot columns."""
        F = self.field
        a = self.a.copy()
        r, c = a.shape
        pivots: list[int] = []
        row = 0
        for col in range(c):
            piv = None
            for i in range(row, r):
                if a[i, col]:
                    piv = i
                    break
            if piv is None:
                continue
            if piv != row:
                a[[row, piv]] = a[[piv, row]]
            inv = F.inv(int(a[row, col]))
            for j in range(col, c):
                a[row, j] = F.mul(inv, int(a[row, j]))
            for i in range(r):
                if i != row and a[i, col]:
                    t = int(a[i, col])
                    for j in range(col, c):
                        a[i, j] = F.sub(int(a[i, j]), F.mul(t, int(a[row, j])))
            pivots.append(col)
            row += 1
            if row == r:
                break
        return Matrix(F, a), pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def det(self) -> int:
        n, n2 = self.shape
        if n != n2:
            raise ShapeMismatch("determinant needs a square matrix")
        F = self.field
        a = self.a.copy()
        det = 1
        for col in range(n):
            piv = None
            for i in range(col, n):
                if a[i, col]:
                    piv = i
                    break
            if piv is None:
                return 0
            if piv != col:
                a[[col, piv]] = a[[piv, col]]
                det = F.neg(det)
            pval = int(a[col, col])
            det = F.mul(det, pval)
            inv = F.inv(pval)
            for i in range(col + 1, n):
                if a[i, col]:
                    t = F.mul(inv, int(a[i, col]))
                    for j in range(col, n):
                        a[i, j] = F.sub(int(a[i, j]), F.mul(t, int(a[col, j])))
        return det

    def inv(self) -> "Matrix":
        n, n2 = self.shape
        if n != n2:
            raise ShapeMismatch("inverse needs a square matrix")
        F = self.field
        aug = np.concatenate([self.a.copy(), np.eye(n, dtype=np.int64)], axis=1)
        red, pivots = Matrix(F, aug).rref()
        if pivots != list(range(n)):
            raise SingularMatrix("matrix is not invertible")
        return Matrix(F, red.a[:, n:].copy())

    def is_invertible(self) -> bool:
        n, n2 = self.shape
        return n == n2 and self.rank() == n


def mat_arith(A: Matrix, B: Matrix | None, op: str) -> Matrix:
    """Single-entry dispatch mirroring field_arith, for matrices."""
    if op == "neg":
        return -A
    if op == "inv":
        return A.inv()
    if op == "transpose":
        return A.transpose()
    if B is None:
        raise InvalidInput(f"binary op {op!r} needs two operands")
    if op == "add":
        return A + B
    if op == "sub":
        return A - B
    if op == "mul":
        return A @ B
    raise InvalidInput(f"unknown op {op!r}")


def kron(A: Matrix, B: Matrix) -> Matrix:
    """Kronecker product, left factor major: entry ((i,k),(j,l)) = A[i,j] B[k,l]."""
    A._peer(B)
    F = A.field
    if F.m == 1 and (F.p - 1) ** 2 < 2**62:
        return Matrix(F, np.kron(A.a, B.a) % F.p)
    ra, ca = A.shape
    rb, cb = B.shape
    out = np.zeros((ra * rb, ca * cb), dtype=np.int64)
    for i in range(ra):
        for j in range(ca):
            x = int(A.a[i, j])
            if x:
                for k in range(rb):
                    for l in range(cb):
                        out[i * rb + k, j * cb + l] = F.mul(x, int(B.a[k, l]))
    return Matrix(F, out)


def kernel_basis(A: Matrix) -> list[list[int]]:
    """Basis of the right null space, one vector per free column.

    Vectors come out in free-column order with a 1 in their free position,
    so the result is deterministic and echelon-shaped.
    """
    F = A.field
    red, pivots = A.rref()
    r, c = A.shape
    pivot_set = set(pivots)
    free = [j for j in range(c) if j not in pivot_set]
    basis = []
    for fc in free:
        v = [0] * c
        v[fc] = 1
        for row_idx, pc in enumerate(pivots):
            v[pc] = F.neg(int(red.a[row_idx, fc]))
        basis.append(v)
    return basis


def companion_matrix(F: Field, monic: DensePoly) -> Matrix:
    """Companion matrix of a monic polynomial: subdiagonal ones, negated
    low coefficients in the last column."""
    monic = poly_trim(monic)
    if not monic or monic[-1] != 1:
        raise InvalidInput("companion matrix needs a monic polynomial")
    n = len(monic) - 1
    a = np.zeros((n, n), dtype=np.int64)
    for i in range(1, n):
        a[i, i - 1] = 1
    for i in range(n):
        a[i, n - 1] = F.neg(monic[i])
    return Matrix(F, a)


# ---------------------------------------------------------------------------
# characteristic polynomial and eigenpairs
# ---------------------------------------------------------------------------


def _hessenberg(A: Matrix) -> np.ndarray:
    """Similarity-reduce to upper Hessenberg form (copy; original untouched)."""
    F = A.field
    h = A.a.copy()
    n = h.shape[0]
    for j in range(n - 2):
        piv = None
        for i in range(j + 1, n):
            if h[i, j]:
                piv = i
                break
        if piv is None:
            continue
        if piv != j + 1:
            h[[j + 1, piv]] = h[[piv, j + 1]]
            h[:, [j + 1, piv]] = h[:, [piv, j + 1]]
        inv = F.inv(int(h[j + 1, j]))
        for i in range(j + 2, n):
            if h[i, j]:
                t = F.mul(int(h[i, j]), inv)
                for k in range(n):
                    h[i, k] = F.sub(int(h[i, k]), F.mul(t, int(h[j + 1, k])))
                for k in range(n):
                    h[k, j + 1] = F.add(int(h[k, j + 1]), F.mul(t, int(h[k, i])))
    return h


def char_poly(A: Matrix) -> DensePoly:
    """Monic characteristic polynomial det(xI - A), low coefficients first."""
    n, n2 = A.shape
    if n != n2:
        raise ShapeMismatch("characteristic polynomial needs a square matrix")
    F = A.field
    h = _hessenberg(A)
    # p_m = det of the leading m x m block of (xI - H), by last-column expansion
    polys: list[list[int]] = [[1]]
    for m in range(1, n + 1):
        diag = int(h[m - 1, m - 1])
        prev = polys[m - 1]
        cur = [0] * (m + 1)
        for i, c in enumerate(prev):  # (x - diag) * p_{m-1}
            cur[i + 1] = F.add(cur[i + 1], c)
            cur[i] = F.sub(cur[i], F.mul(diag, c))
        run = 1  # product of subdiagonal entries h[m-t, m-t-1]
        for k in range(1, m):
            run = F.mul(run, int(h[m - k, m - k - 1]))
            if run == 0:
                break
            coef = F.mul(int(h[m - 1 - k, m - 1]), run)
            if coef:
                for i, c in enumerate(polys[m - 1 - k]):
                    cur[i] = F.sub(cur[i], F.mul(coef, c))
        polys.append(cur)
    return tuple(polys[n])


def embed_matrix(ctx: FieldCtx, A: Matrix) -> Matrix:
    """Push a matrix over F_q into F_{q^d} through the tower embedding."""
    if A.field != ctx.base:
        raise FieldMismatch("matrix is not over the tower's base field")
    if ctx.f == 1:
        return Matrix(ctx.ext, A.a.copy())
    return Matrix(ctx.ext, A.a.copy()).map_entries(ctx.embed)


def eigenpairs_over_extension(
    ctx: FieldCtx, A: Matrix
) -> list[tuple[int, int, list[list[int]]]]:
    """Eigenvalues of A (over F_q) that lie in F_{q^d}, with eigenspaces.

    Returns (eigenvalue code in ext, algebraic multiplicity, kernel basis of
    A - lam I over ext), in the deterministic root order of
    roots_in_extension.
    """
    cp = char_poly(A)
    ext = ctx.ext
    a_ext = embed_matrix(ctx, A)
    n = A.shape[0]
    out = []
    for lam, mult in roots_in_extension(ctx, cp):
        shifted = a_ext - Matrix.identity(ext, n).scale(lam)
        out.append((lam, mult, kernel_basis(shifted)))
    return out


def random_invertible(F: Field, n: int, rng) -> Matrix:
    """Uniformly sampled invertible matrix by rejection."""
    while True:
        a = np.array(
            [[rng.randrange(F.order) for _ in range(n)] for _ in range(n)],
            dtype=np.int64,
        )
        M = Matrix(F, a)
        if M.is_invertible():
            return M
