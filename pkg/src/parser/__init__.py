from src.parser.parser_base import Parser, Structure, build_tv_operator
from src.parser.parser_grid import ParserGrid
from src.parser.parser_mask import ParserMask
from src.parser.parser_mesh import ParserMesh

__all__ = [
    "Parser",
    "ParserGrid",
    "ParserMask",
    "ParserMesh",
    "Structure",
    "build_tv_operator",
]
