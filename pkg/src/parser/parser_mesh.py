import logging
from pathlib import Path
from typing import final

from typing_extensions import override

import numpy as np

from src.errors import DataError
from src.models import TriangleMesh
from src.parser.parser_base import Parser

logger = logging.getLogger(__name__)


@final
class ParserMesh(Parser):
    """Reads OFF-like text: optional ``OFF`` line, ``n_vertices n_triangles``,
    the vertex coordinates, then one index triple per triangle (an optional
    leading ``3`` is accepted).
    """

    def __init__(self, path: Path):
        self._path = path

    def _tokens(self) -> list[list[str]]:
        rows: list[list[str]] = []
        for line in self._path.read_text().splitlines():
            content = line.split("#", 1)[0].strip()
            if content:
                rows.append(content.split())
        if rows and rows[0] == ["OFF"]:
            rows = rows[1:]
        return rows

    @override
    def parse(self) -> TriangleMesh:
        rows = self._tokens()
        if not rows or len(rows[0]) < 2:
            raise DataError(f"{self._path}: missing 'n_vertices n_triangles' line")
        try:
            n_vertices, n_triangles = int(rows[0][0]), int(rows[0][1])
        except ValueError as e:
            raise DataError(f"{self._path}: bad count line {rows[0]}") from e

        body = rows[1:]
        if len(body) != n_vertices + n_triangles:
            raise DataError(
                f"{self._path}: expected {n_vertices + n_triangles} data lines, found {len(body)}"
            )

        try:
            coords = np.array([[float(x) for x in r[:3]] for r in body[:n_vertices]])
            faces = [r[1:4] if len(r) == 4 else r[:3] for r in body[n_vertices:]]
            triangles = np.array([[int(x) for x in f] for f in faces], dtype=np.int64)
        except ValueError as e:
            raise DataError(f"{self._path}: malformed vertex or triangle line") from e

        mesh = TriangleMesh(
            vertex_coords=coords.reshape(n_vertices, 3),
            triangles=triangles.reshape(n_triangles, 3),
        )
        logger.info(
            "read mesh %s: %d vertices, %d triangles", self._path, n_vertices, n_triangles
        )
        return mesh
