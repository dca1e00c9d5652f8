import logging
from pathlib import Path
from typing import final

import numpy as np
import pandas as pd

from src.errors import DataError
from src.models import FloatArray, GridMask, SpcaModel, TriangleMesh
from src.parser import Structure

logger = logging.getLogger(__name__)

GRAY_MAX = 255
GRAY_ZERO = 128
GRAY_OUTSIDE = 0


def to_gray(image: FloatArray) -> np.ndarray:
    """Scales in-mask values to 1..255 symmetrically so that exact zeros land on 128.

    This is min-max scaling over [-max|v|, max|v|], not [min v, max v], so zero
    stays mid-gray for one-signed loadings too.
    NaN cells (outside the mask) become 0.
    """
    inside = ~np.isnan(image)
    gray = np.full(image.shape, GRAY_OUTSIDE, dtype=np.int64)
    if not inside.any():
        return gray
    values = image[inside]
    scale = float(np.max(np.abs(values)))
    if scale == 0:
        gray[inside] = GRAY_ZERO
        return gray
    scaled = GRAY_ZERO + np.rint(values / scale * (GRAY_MAX - GRAY_ZERO))
    gray[inside] = np.clip(scaled, 1, GRAY_MAX).astype(np.int64)
    return gray


def format_pgm(gray: np.ndarray) -> str:
    height, width = gray.shape
    rows = "\n".join(" ".join(str(int(x)) for x in row) for row in gray)
    return f"P2\n{width} {height}\n{GRAY_MAX}\n{rows}\n"


@final
class LoadingMapBuilder:
    """Writes loading maps of a fitted model next to its structure.

    Grids get one PGM per component (and per z-slice in 3D), with image rows
    running along j and columns along i. Meshes get a single per-vertex CSV.
    """

    def __init__(self, model: SpcaModel, structure: Structure):
        expected = structure.p if isinstance(structure, GridMask) else structure.n_vertices
        if model.n_features != expected:
            raise DataError(
                f"model has {model.n_features} features, structure has {expected}"
            )
        self._model: SpcaModel = model
        self._structure: Structure = structure

    def build(self, directory: Path) -> list[Path]:
        directory.mkdir(parents=True, exist_ok=True)
        if isinstance(self._structure, TriangleMesh):
            written = [self._write_vertex_table(directory, self._structure)]
        else:
            written = self._write_grid_maps(directory, self._structure)
        logger.info("wrote %d map file(s) to %s", len(written), directory)
        return written

    def _write_grid_maps(self, directory: Path, grid: GridMask) -> list[Path]:
        written: list[Path] = []
        for k in range(self._model.n_components):
            image = grid.to_image(self._model.V[:, k])
            for z in range(grid.dims[2]):
                suffix = "" if grid.is_2d else f"_z{z + 1}"
                path = directory / f"component{k + 1}{suffix}.pgm"
                _ = path.write_text(format_pgm(to_gray(image[:, :, z].T)))
                written.append(path)
        return written

    def _write_vertex_table(self, directory: Path, mesh: TriangleMesh) -> Path:
        logger.warning("mesh structure: writing per-vertex CSV instead of images")
        frame = pd.DataFrame(mesh.vertex_coords, columns=["x", "y", "z"])
        frame.insert(0, "vertex", np.arange(mesh.n_vertices))
        for k in range(self._model.n_components):
            frame[f"component{k + 1}"] = self._model.V[:, k]
        path = directory / "loadings_per_vertex.csv"
        frame.to_csv(path, index=False, float_format="%.17g")
        return path
