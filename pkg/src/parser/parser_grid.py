from typing import final

from typing_extensions import override

from src.errors import DataError
from src.models import GridMask
from src.parser.parser_base import Parser


@final
class ParserGrid(Parser):
    """Full grid given by its dimensions, e.g. ``--grid 50x50``."""

    def __init__(self, dims: tuple[int, ...]):
        self._dims = dims

    @classmethod
    def from_string(cls, text: str) -> "ParserGrid":
        try:
            dims = tuple(int(x) for x in text.lower().split("x"))
        except ValueError as e:
            raise DataError(f"grid size must look like WxH or WxHxD, got {text!r}") from e
        if not 1 <= len(dims) <= 3 or any(d < 1 for d in dims):
            raise DataError(f"grid size must look like WxH or WxHxD, got {text!r}")
        return cls(dims)

    @override
    def parse(self) -> GridMask:
        return GridMask.from_dims(self._dims)
