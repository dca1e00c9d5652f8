import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import pandas as pd
import scipy.sparse as sparse

from src.errors import DataError
from src.models import FloatArray, IntArray

logger = logging.getLogger(__name__)

NORM_TOL = 1e-12
NORM_MAX_ITER = 10_000
NORM_SEED = 0


@dataclass(frozen=True, eq=False)
class GroupBlock:
    """Dense block A_g restricted to the global feature columns it touches."""

    columns: IntArray
    block: FloatArray

    @property
    def n_rows(self) -> int:
        return self.block.shape[0]


@dataclass(frozen=True, eq=False)
class GroupLinearOperator:
    """Vertical stack of group blocks A_g, stored flattened as a CSR matrix.

    Rows group_ptr[g]:group_ptr[g + 1] of the matrix belong to group g. The
    operator is immutable and safe to share between workers.
    """

    p: int
    matrix: sparse.csr_matrix
    group_ptr: IntArray

    @classmethod
    def from_blocks(cls, p: int, blocks: Sequence[GroupBlock]) -> "GroupLinearOperator":
        rows: list[IntArray] = []
        cols: list[IntArray] = []
        vals: list[FloatArray] = []
        group_ptr = np.zeros(len(blocks) + 1, dtype=np.int64)
        offset = 0
        for g, b in enumerate(blocks):
            if b.block.ndim != 2 or b.block.shape[1] != b.columns.size:
                raise DataError(
                    f"group {g}: block shape {b.block.shape} does not match {b.columns.size} columns"
                )
            if b.columns.size and (b.columns.min() < 0 or b.columns.max() >= p):
                raise DataError(f"group {g}: column index outside [0, {p})")
            r, c = np.nonzero(b.block)
            rows.append(r + offset)
            cols.append(b.columns[c])
            vals.append(b.block[r, c])
            offset += b.n_rows
            group_ptr[g + 1] = offset

        matrix = sparse.coo_matrix(
            (
                np.concatenate(vals) if vals else np.zeros(0),
                (
                    np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64),
                    np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64),
                ),
            ),
            shape=(offset, p),
        ).tocsr()
        return cls(p=p, matrix=matrix, group_ptr=group_ptr)

    @property
    def n_groups(self) -> int:
        return self.group_ptr.size - 1

    @property
    def total_rows(self) -> int:
        return int(self.group_ptr[-1])

    @cached_property
    def row_group(self) -> IntArray:
        """Group id of every row."""
        return np.repeat(np.arange(self.n_groups), np.diff(self.group_ptr))

    def group_rows(self) -> IntArray:
        return np.diff(self.group_ptr)

    @property
    def groups(self) -> Iterator[GroupBlock]:
        for g in range(self.n_groups):
            sub = self.matrix[self.group_ptr[g] : self.group_ptr[g + 1]]
            columns = np.unique(sub.indices).astype(np.int64)
            yield GroupBlock(columns=columns, block=sub[:, columns].toarray())

    def apply(self, v: FloatArray) -> FloatArray:
        if v.shape != (self.p,):
            raise DataError(f"apply: expected a vector of length {self.p}, got shape {v.shape}")
        return self.matrix @ v

    def apply_adjoint(self, y: FloatArray) -> FloatArray:
        if y.shape != (self.total_rows,):
            raise DataError(
                f"apply_adjoint: expected a vector of length {self.total_rows}, got shape {y.shape}"
            )
        return self.matrix.T @ y

    def group_norms(self, v: FloatArray) -> FloatArray:
        """||A_g v||_2 for every group, in group order."""
        return self.stacked_group_norms(self.apply(v))

    def stacked_group_norms(self, y: FloatArray) -> FloatArray:
        squared = np.bincount(self.row_group, weights=y * y, minlength=self.n_groups)
        return np.sqrt(squared)

    def spectral_norm(self, tol: float = NORM_TOL) -> float:
        """||A||_2 by power iteration on A^T A."""
        if tol <= 0:
            raise DataError(f"tol must be positive, got {tol}")
        if self.total_rows == 0 or self.matrix.nnz == 0:
            return 0.0

        rng = np.random.default_rng(NORM_SEED)
        x = rng.standard_normal(self.p)
        x /= np.linalg.norm(x)
        previous = 0.0
        rayleigh = 0.0
        for it in range(1, NORM_MAX_ITER + 1):
            y = self.matrix.T @ (self.matrix @ x)
            rayleigh = float(x @ y)
            norm_y = float(np.linalg.norm(y))
            if norm_y == 0.0:
                return 0.0
            if abs(rayleigh - previous) <= tol * rayleigh:
                logger.debug("power iteration converged after %d iterations", it)
                break
            previous = rayleigh
            x = y / norm_y
        else:
            logger.warning(
                "power iteration hit %d iterations without reaching tol=%g",
                NORM_MAX_ITER,
                tol,
            )
        return float(np.sqrt(rayleigh))

    @cached_property
    def norm(self) -> float:
        """Cached ||A||_2, reused by every Lipschitz and mu_opt evaluation."""
        return self.spectral_norm(NORM_TOL)

    def to_triplets(self) -> pd.DataFrame:
        coo = self.matrix.tocoo()
        return pd.DataFrame({"row": coo.row, "col": coo.col, "value": coo.data})
