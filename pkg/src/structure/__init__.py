from src.structure.grid import build_grid_tv_operator
from src.structure.mesh import build_mesh_tv_operator
from src.structure.operator import GroupBlock, GroupLinearOperator

__all__ = [
    "GroupBlock",
    "GroupLinearOperator",
    "build_grid_tv_operator",
    "build_mesh_tv_operator",
]
