import logging
import re
from pathlib import Path
from typing import final

from typing_extensions import override

import numpy as np

from src.errors import DataError
from src.models import GridMask
from src.parser.parser_base import Parser

logger = logging.getLogger(__name__)

_HEADER = re.compile(r"^\s*GRID\s+(\d+)\s+(\d+)\s+(\d+)\s*$")


@final
class ParserMask(Parser):
    """Reads a ``GRID ni nj nk`` header followed by ni*nj*nk 0/1 values, i fastest."""

    def __init__(self, path: Path):
        self._path = path

    @override
    def parse(self) -> GridMask:
        lines = self._path.read_text().splitlines()
        if not lines:
            raise DataError(f"{self._path}: empty mask file")

        header = _HEADER.match(lines[0])
        if header is None:
            raise DataError(f"{self._path}: expected 'GRID ni nj nk' header, got {lines[0]!r}")
        dims = (int(header.group(1)), int(header.group(2)), int(header.group(3)))

        tokens = " ".join(lines[1:]).split()
        expected = dims[0] * dims[1] * dims[2]
        if len(tokens) != expected:
            raise DataError(
                f"{self._path}: header announces {expected} cells, found {len(tokens)} values"
            )
        if any(t not in ("0", "1") for t in tokens):
            raise DataError(f"{self._path}: mask values must be 0 or 1")

        inside = np.array([t == "1" for t in tokens], dtype=bool).reshape(dims, order="F")
        mask = GridMask(dims=dims, inside=inside)
        logger.info("read mask %s: dims=%s p=%d", self._path, dims, mask.p)
        return mask
