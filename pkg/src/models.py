from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import TypeAlias

import numpy as np
import numpy.typing as npt
import pandas as pd

from src.errors import DataError

FloatArray: TypeAlias = npt.NDArray[np.float64]
IntArray: TypeAlias = npt.NDArray[np.int64]
BoolArray: TypeAlias = npt.NDArray[np.bool_]


@dataclass(frozen=True)
class GridMask:
    """Boolean mask over an (ni, nj, nk) grid.

    In-mask cells are numbered with i varying fastest, then j, then k. A 2D
    image is a grid with nk = 1.
    """

    dims: tuple[int, int, int]
    inside: BoolArray

    def __post_init__(self) -> None:
        if len(self.dims) != 3 or any(d < 1 for d in self.dims):
            raise DataError(f"grid dims must be three positive integers, got {self.dims}")
        if self.inside.shape != self.dims:
            raise DataError(
                f"mask shape {self.inside.shape} does not match dims {self.dims}"
            )

    @classmethod
    def from_dims(cls, dims: tuple[int, ...]) -> GridMask:
        full = tuple(dims) + (1,) * (3 - len(dims))
        return cls(dims=(full[0], full[1], full[2]), inside=np.ones(full, dtype=bool))

    @classmethod
    def from_array(cls, inside: npt.ArrayLike) -> GridMask:
        arr = np.asarray(inside, dtype=bool)
        if arr.ndim == 2:
            arr = arr[:, :, np.newaxis]
        if arr.ndim != 3:
            raise DataError(f"mask array must be 2D or 3D, got {arr.ndim}D")
        return cls(dims=(arr.shape[0], arr.shape[1], arr.shape[2]), inside=arr)

    @property
    def p(self) -> int:
        return int(self.inside.sum())

    @property
    def is_2d(self) -> bool:
        return self.dims[2] == 1

    @cached_property
    def index_map(self) -> IntArray:
        """Feature index of every cell, -1 outside the mask."""
        flat = self.inside.ravel(order="F")
        index = np.cumsum(flat, dtype=np.int64) - 1
        index[~flat] = -1
        return index.reshape(self.dims, order="F")

    def to_image(self, v: FloatArray) -> FloatArray:
        if v.shape != (self.p,):
            raise DataError(f"expected {self.p} features, got shape {v.shape}")
        image = np.full(self.dims, np.nan)
        image[self.inside] = v[self.index_map[self.inside]]
        return image


@dataclass(frozen=True)
class TriangleMesh:
    vertex_coords: FloatArray
    triangles: IntArray

    def __post_init__(self) -> None:
        if self.vertex_coords.ndim != 2 or self.vertex_coords.shape[1] != 3:
            raise DataError(
                f"vertex coordinates must be (n, 3), got {self.vertex_coords.shape}"
            )
        if self.triangles.size == 0:
            return
        if self.triangles.ndim != 2 or self.triangles.shape[1] != 3:
            raise DataError(f"triangles must be (m, 3), got {self.triangles.shape}")
        n = self.vertex_coords.shape[0]
        bad = (self.triangles < 0) | (self.triangles >= n)
        if bad.any():
            row = int(np.argwhere(bad)[0, 0])
            raise DataError(
                f"triangle {row} {self.triangles[row].tolist()} references a vertex outside [0, {n})"
            )
        t = self.triangles
        degenerate = (t[:, 0] == t[:, 1]) | (t[:, 1] == t[:, 2]) | (t[:, 0] == t[:, 2])
        if degenerate.any():
            row = int(np.argmax(degenerate))
            raise DataError(f"triangle {row} {t[row].tolist()} repeats a vertex")

    @property
    def n_vertices(self) -> int:
        return self.vertex_coords.shape[0]

    def neighbors(self) -> list[IntArray]:
        """Sorted adjacent vertices of every vertex (symmetric by construction)."""
        adjacent: list[set[int]] = [set() for _ in range(self.n_vertices)]
        for a, b, c in self.triangles.tolist():
            adjacent[a].update((b, c))
            adjacent[b].update((a, c))
            adjacent[c].update((a, b))
        return [np.array(sorted(s), dtype=np.int64) for s in adjacent]


@dataclass(frozen=True)
class PenaltyWeights:
    l1: float
    l2: float
    tv: float

    def __post_init__(self) -> None:
        if not (self.l2 > 0):
            raise DataError(f"l2 weight must be positive, got {self.l2}")
        if self.l1 < 0 or self.tv < 0:
            raise DataError(
                f"l1 and tv weights must be non-negative, got l1={self.l1}, tv={self.tv}"
            )

    @classmethod
    def from_ratios(
        cls, global_weight: float, l1_ratio: float, tv_ratio: float
    ) -> PenaltyWeights:
        if global_weight <= 0:
            raise DataError(f"global weight must be positive, got {global_weight}")
        for name, r in (("l1_ratio", l1_ratio), ("tv_ratio", tv_ratio)):
            if not 0.0 <= r <= 1.0:
                raise DataError(f"{name} must lie in [0, 1], got {r}")
        if l1_ratio + tv_ratio >= 1.0:
            raise DataError(
                f"l1_ratio + tv_ratio must be < 1 to keep l2 positive, got {l1_ratio + tv_ratio}"
            )
        return cls(
            l1=global_weight * l1_ratio,
            l2=global_weight * (1.0 - l1_ratio - tv_ratio),
            tv=global_weight * tv_ratio,
        )

    @property
    def global_weight(self) -> float:
        return self.l1 + self.l2 + self.tv

    def ratios(self) -> tuple[float, float, float]:
        total = self.global_weight
        return total, self.l1 / total, self.tv / total

    @property
    def gamma(self) -> float:
        """TV weight of the problem divided through by l2."""
        return self.tv / self.l2

    @property
    def kappa(self) -> float:
        """l1 weight of the problem divided through by l2."""
        return self.l1 / self.l2


@dataclass(frozen=True)
class ContinuationRecord:
    continuation: int
    mu: float
    eps: float
    eps_mu: float
    fista_iters: int
    gap: float
    objective: float
    eps_reached: float
    clamped: bool = False


TRACE_COLUMNS = [
    "continuation",
    "mu",
    "eps",
    "eps_mu",
    "fista_iters",
    "gap",
    "objective",
    "eps_reached",
    "clamped",
]


@dataclass
class SolverTrace:
    records: list[ContinuationRecord] = field(default_factory=list)

    def append(self, record: ContinuationRecord) -> None:
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def total_fista_iters(self) -> int:
        return sum(r.fista_iters for r in self.records)

    @property
    def final_eps(self) -> float:
        return self.records[-1].eps_reached if self.records else math.inf

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [[getattr(r, c) for c in TRACE_COLUMNS] for r in self.records],
            columns=TRACE_COLUMNS,
        )


@dataclass(frozen=True)
class SpcaModel:
    """Fitted loadings V (p x K), unit components U (n x K) and fit metadata.

    V carries the component scale: training data is approximated by
    means + U @ V.T.
    """

    V: FloatArray
    U: FloatArray
    means: FloatArray
    explained_variance: FloatArray
    residual_energy: FloatArray
    weights: PenaltyWeights
    eps: float
    seed: int
    traces: list[list[SolverTrace]] = field(default_factory=list)
    truncated: bool = False

    @property
    def n_components(self) -> int:
        return self.V.shape[1]

    @property
    def n_features(self) -> int:
        return self.V.shape[0]


@dataclass(frozen=True)
class SyntheticDataset:
    X: FloatArray
    U_true: FloatArray
    V_true: FloatArray
    snr: float
    seed: int
    grid: GridMask

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]


@dataclass(frozen=True)
class MatchResult:
    """Pairs estimated component est_index[k] with reference ref_index[k]."""

    est_index: IntArray
    ref_index: IntArray
    signs: FloatArray
    score: float
    complete: bool

    @property
    def permutation(self) -> dict[int, int]:
        return {int(e): int(r) for e, r in zip(self.est_index, self.ref_index)}
