"""Sparse matrices over F_p with exact rank, row echelon form and kernels.

Elimination keeps a fully reduced echelon basis of the row space and feeds
rows through it in batches: a batch is reduced against the basis with one
sparse-times-dense product, and only the surviving rows go through dense
Gauss-Jordan. Pivots are chosen least column first, then least row.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True, eq=False)
class FpMatrix:
    rows: int
    cols: int
    p: int
    r: np.ndarray
    c: np.ndarray
    v: np.ndarray

    @classmethod
    def from_coo(cls, rows, cols, p, r, c, v) -> "FpMatrix":
        """Sum duplicate entries mod p and drop zeros."""
        r = np.asarray(r, dtype=np.int64)
        c = np.asarray(c, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64) % p
        if r.size:
            key = r * cols + c
            order = np.argsort(key, kind="stable")
            key, v = key[order], v[order]
            uniq, start = np.unique(key, return_index=True)
            v = np.add.reduceat(v, start) % p if uniq.size else v[:0]
            keep = v != 0
            r, c, v = uniq[keep] // cols, uniq[keep] % cols, v[keep]
        return cls(rows, cols, p, r, c, v)

    @classmethod
    def from_dense(cls, a, p) -> "FpMatrix":
        a = np.asarray(a, dtype=np.int64) % p
        r, c = np.nonzero(a)
        return cls(a.shape[0], a.shape[1], p, r, c, a[r, c])

    @classmethod
    def zeros(cls, rows, cols, p) -> "FpMatrix":
        e = np.zeros(0, dtype=np.int64)
        return cls(rows, cols, p, e, e, e)

    @classmethod
    def identity(cls, k, p) -> "FpMatrix":
        i = np.arange(k)
        return cls(k, k, p, i, i, np.ones(k, dtype=np.int64))

    @property
    def nnz(self) -> int:
        return int(self.v.size)

    @property
    def T(self) -> "FpMatrix":
        return FpMatrix(self.cols, self.rows, self.p, self.c, self.r, self.v)

    def to_csr(self) -> sp.csr_matrix:
        return sp.csr_matrix((self.v, (self.r, self.c)), shape=(self.rows, self.cols), dtype=np.int64)

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.rows, self.cols), dtype=np.int64)
        a[self.r, self.c] = self.v
        return a

    def __matmul__(self, other: "FpMatrix") -> "FpMatrix":
        prod = (self.to_csr() @ other.to_csr()).tocoo()
        return FpMatrix.from_coo(self.rows, other.cols, self.p, prod.row, prod.col, prod.data)

    def is_zero(self) -> bool:
        return self.nnz == 0

    def __eq__(self, other):
        if not isinstance(other, FpMatrix):
            return NotImplemented
        a, b = FpMatrix.from_coo(self.rows, self.cols, self.p, self.r, self.c, self.v), \
            FpMatrix.from_coo(other.rows, other.cols, other.p, other.r, other.c, other.v)
        return (a.rows, a.cols, a.p) == (b.rows, b.cols, b.p) and np.array_equal(a.r, b.r) \
            and np.array_equal(a.c, b.c) and np.array_equal(a.v, b.v)


def _matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """a @ b mod p through float64 BLAS; exact while inner sums stay below 2**53."""
    assert a.shape[1] * (p - 1) ** 2 < 2**53
    return np.rint(a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64) % p


def _inverses(p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inv[a] = pow(a, -1, p)
    return inv


def dense_rref(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of a dense matrix over F_p (returns nonzero rows, pivot columns)."""
    a = np.array(a, dtype=np.int64) % p
    inv = _inverses(p)
    m, n = a.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(a[r:, c])
        if not nz.size:
            continue
        k = r + nz[0]
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = (a[r] * inv[a[r, c]]) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit] = (a[hit] - col[hit, None] * a[r]) % p
        pivots.append(c)
        r += 1
    return a[:r], pivots


class Echelon:
    """Fully reduced row-echelon basis of a growing subspace of F_p^n."""

    def __init__(self, n: int, p: int):
        self.n = n
        self.p = p
        self.basis = np.zeros((0, n), dtype=np.int64)
        self.pivots = np.zeros(0, dtype=np.int64)

    @property
    def rank(self) -> int:
        return int(self.pivots.size)

    def reduce(self, x: np.ndarray) -> np.ndarray:
        """Residue of rows of x modulo the current span (dense, 2-D)."""
        x = np.atleast_2d(np.asarray(x, dtype=np.int64)) % self.p
        if not self.rank:
            return x
        return (x - _matmul_mod(x[:, self.pivots], self.basis, self.p)) % self.p

    def _reduce_sparse(self, block: sp.csr_matrix) -> np.ndarray:
        dense = block.toarray()
        if self.rank:
            dense -= block[:, self.pivots] @ self.basis
            dense %= self.p
        return dense

    def _absorb(self, residue: np.ndarray) -> int:
        residue = residue[residue.any(axis=1)]
        if not residue.size:
            return 0
        new, new_piv = dense_rref(residue, self.p)
        if not new_piv:
            return 0
        new_piv = np.asarray(new_piv, dtype=np.int64)
        if self.rank:
            self.basis = (self.basis - _matmul_mod(self.basis[:, new_piv], new, self.p)) % self.p
        basis = np.vstack([self.basis, new])
        pivots = np.concatenate([self.pivots, new_piv])
        order = np.argsort(pivots, kind="stable")
        self.basis, self.pivots = basis[order], pivots[order]
        return len(new_piv)

    def add_rows(self, x) -> int:
        """Add dense rows to the span; returns the rank gained."""
        return self._absorb(self.reduce(x))

    def add_matrix(self, M: FpMatrix, batch_cells: int = 1 << 22) -> "Echelon":
        csr = M.to_csr()
        max_batch = max(1, batch_cells // max(1, self.n))
        batch = min(32, max_batch)
        start = 0
        while start < M.rows:
            block = csr[start:start + batch]
            gained = self._absorb(self._reduce_sparse(block))
            start += block.shape[0]
            if self.rank == self.n:
                break
            # dense Gauss-Jordan cost grows with the gain; widen the batch only while little is new
            batch = min(max_batch, batch * 2) if gained * 8 < batch else max(32, batch // 2)
        return self

    def kernel_basis(self) -> np.ndarray:
        """Basis of {x : basis @ x = 0}, one vector per free column in increasing order."""
        free = np.setdiff1d(np.arange(self.n), self.pivots)
        K = np.zeros((free.size, self.n), dtype=np.int64)
        K[np.arange(free.size), free] = 1
        if self.rank:
            K[:, self.pivots] = (-self.basis[:, free].T) % self.p
        return K

    def contains(self, x) -> np.ndarray:
        return ~self.reduce(x).any(axis=1)


def row_echelon(M: FpMatrix) -> Echelon:
    return Echelon(M.cols, M.p).add_matrix(M)


def fp_rank(M: FpMatrix) -> int:
    """Exact rank over F_p; eliminates along the shorter dimension."""
    if M.nnz == 0:
        return 0
    if M.cols > M.rows:
        M = M.T
    return row_echelon(M).rank


def nullspace(M: FpMatrix) -> np.ndarray:
    """Basis (rows) of the right kernel {x : M x = 0}."""
    return row_echelon(M).kernel_basis()


def solve_in_span(vectors: np.ndarray, targets: np.ndarray, p: int) -> Optional[np.ndarray]:
    """Coefficients a with a @ vectors == targets row by row, or None if some target is outside the span.

    ``vectors`` must be linearly independent.
    """
    vectors = np.atleast_2d(np.asarray(vectors, dtype=np.int64)) % p
    targets = np.atleast_2d(np.asarray(targets, dtype=np.int64)) % p
    k = vectors.shape[0]
    if k == 0:
        return np.zeros((targets.shape[0], 0), dtype=np.int64) if not targets.any() else None
    aug = np.hstack([vectors, np.eye(k, dtype=np.int64)])
    reduced, piv = dense_rref(aug, p)
    n = vectors.shape[1]
    piv = [c for c in piv if c < n]
    if len(piv) != k:
        raise ValueError("vectors are linearly dependent")
    lhs, track = reduced[:, :n], reduced[:, n:]
    coeff = targets[:, piv]
    if ((targets - coeff @ lhs) % p).any():
        return None
    return (coeff @ track) % p
