from abc import ABC, abstractmethod
from typing import TypeAlias

from src.models import GridMask, TriangleMesh
from src.structure import GroupLinearOperator, build_grid_tv_operator, build_mesh_tv_operator

Structure: TypeAlias = GridMask | TriangleMesh


class Parser(ABC):
    @abstractmethod
    def parse(self) -> Structure:
        pass

    def operator(self) -> GroupLinearOperator:
        return build_tv_operator(self.parse())


def build_tv_operator(structure: Structure) -> GroupLinearOperator:
    if isinstance(structure, GridMask):
        return build_grid_tv_operator(structure)
    return build_mesh_tv_operator(structure)
