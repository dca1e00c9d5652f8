"""CSV matrices with JSON sidecars for datasets, models, traces and operators."""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from src.errors import DataError
from src.models import FloatArray, PenaltyWeights, SolverTrace, SpcaModel, SyntheticDataset
from src.structure import GroupLinearOperator

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
DATA_FILE = "X.csv"
META_FILE = "meta.json"


def write_matrix(path: Path, matrix: FloatArray) -> None:
    frame = pd.DataFrame(np.atleast_2d(matrix) if matrix.ndim == 1 else matrix)
    frame.to_csv(path, header=False, index=False, float_format=FLOAT_FORMAT)


def read_matrix(path: Path) -> FloatArray:
    if not path.exists():
        raise DataError(f"missing matrix file {path}")
    if path.stat().st_size == 0:
        return np.zeros((0, 0))
    try:
        frame = pd.read_csv(path, header=None, dtype=np.float64, float_precision="round_trip")
    except ValueError as e:
        raise DataError(f"{path}: non-numeric matrix entries") from e
    return frame.to_numpy()


def _write_json(path: Path, payload: dict[str, Any]) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _read_json(path: Path) -> dict[str, Any]:
    if not path.exists():
        raise DataError(f"missing metadata file {path}")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise DataError(f"{path}: invalid JSON ({e})") from e


@dataclass(frozen=True, eq=False)
class LoadedData:
    """Data matrix read from disk, with ground truth when the directory has it."""

    name: str
    X: FloatArray
    meta: dict[str, Any]
    V_true: FloatArray | None = None
    U_true: FloatArray | None = None

    @property
    def structure(self) -> str | None:
        return self.meta.get("structure")


def write_dataset(directory: Path, dataset: SyntheticDataset) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    write_matrix(directory / DATA_FILE, dataset.X)
    write_matrix(directory / "U_true.csv", dataset.U_true)
    write_matrix(directory / "V_true.csv", dataset.V_true)
    ni, nj, _ = dataset.grid.dims
    _write_json(
        directory / META_FILE,
        {
            "n": dataset.X.shape[0],
            "p": dataset.X.shape[1],
            "seed": dataset.seed,
            "snr": dataset.snr if np.isfinite(dataset.snr) else "inf",
            "structure": f"grid {ni}x{nj}",
        },
    )
    logger.info("wrote dataset seed=%d to %s", dataset.seed, directory)


def read_dataset(path: Path) -> LoadedData:
    """Reads a dataset directory, or a bare CSV file with an optional sidecar."""
    if path.is_dir():
        data_path, meta_path = path / DATA_FILE, path / META_FILE
    else:
        data_path, meta_path = path, path.with_suffix(".json")

    X = read_matrix(data_path)
    meta = _read_json(meta_path) if meta_path.exists() else {}
    if meta and (meta.get("n"), meta.get("p")) != X.shape:
        raise DataError(
            f"{data_path}: matrix is {X.shape}, metadata says n={meta.get('n')} p={meta.get('p')}"
        )

    v_path = data_path.parent / "V_true.csv"
    u_path = data_path.parent / "U_true.csv"
    return LoadedData(
        name=path.stem if not path.is_dir() else path.name,
        X=X,
        meta=meta,
        V_true=read_matrix(v_path) if path.is_dir() and v_path.exists() else None,
        U_true=read_matrix(u_path) if path.is_dir() and u_path.exists() else None,
    )


def write_model(directory: Path, model: SpcaModel, structure: str | None = None) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    write_matrix(directory / "U.csv", model.U)
    write_matrix(directory / "V.csv", model.V)
    write_matrix(directory / "means.csv", model.means)
    global_weight, l1_ratio, tv_ratio = model.weights.ratios()
    _write_json(
        directory / "model.json",
        {
            "K": model.n_components,
            "p": model.n_features,
            "weights": {"l1": model.weights.l1, "l2": model.weights.l2, "tv": model.weights.tv},
            "ratios": {
                "global_weight": global_weight,
                "l1_ratio": l1_ratio,
                "tv_ratio": tv_ratio,
            },
            "eps": model.eps,
            "seed": model.seed,
            "explained_variance": model.explained_variance.tolist(),
            "residual_energy": model.residual_energy.tolist(),
            "truncated": model.truncated,
            "structure": structure,
        },
    )

    trace_dir = directory / "traces"
    trace_dir.mkdir(exist_ok=True)
    for k, traces in enumerate(model.traces, start=1):
        for i, trace in enumerate(traces, start=1):
            write_trace(trace_dir / f"component{k}_alternation{i}.csv", trace)
    logger.info("wrote %d-component model to %s", model.n_components, directory)


def write_trace(path: Path, trace: SolverTrace) -> None:
    trace.to_frame().to_csv(path, index=False, float_format=FLOAT_FORMAT)


def read_model(directory: Path) -> tuple[SpcaModel, dict[str, Any]]:
    meta = _read_json(directory / "model.json")
    k = int(meta["K"])
    p = int(meta["p"])
    V = read_matrix(directory / "V.csv") if k else np.zeros((p, 0))
    U = read_matrix(directory / "U.csv") if k else np.zeros((0, 0))
    means = read_matrix(directory / "means.csv").ravel()
    weights = meta["weights"]
    model = SpcaModel(
        V=V.reshape(p, k),
        U=U,
        means=means,
        explained_variance=np.array(meta["explained_variance"], dtype=np.float64),
        residual_energy=np.array(meta["residual_energy"], dtype=np.float64),
        weights=PenaltyWeights(l1=weights["l1"], l2=weights["l2"], tv=weights["tv"]),
        eps=float(meta["eps"]),
        seed=int(meta["seed"]),
        truncated=bool(meta["truncated"]),
    )
    return model, meta


def write_operator_csv(path: Path, op: GroupLinearOperator) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    op.to_triplets().to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.info("wrote operator %s: %d rows, %d nonzeros", path, op.total_rows, op.matrix.nnz)


def write_table(path: Path, frame: pd.DataFrame) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.info("wrote %s (%d rows)", path, len(frame))
