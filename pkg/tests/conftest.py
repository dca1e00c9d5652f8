import numpy as np
import pytest
from scipy.spatial import ConvexHull

from src.models import GridMask, PenaltyWeights, TriangleMesh
from src.structure import GroupLinearOperator, build_grid_tv_operator
from src.synthdata import generate_dataset


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def chain_op() -> GroupLinearOperator:
    """Four pixels in a row: three forward differences."""
    return build_grid_tv_operator(GridMask.from_dims((4, 1)))


@pytest.fixture
def grid_op() -> GroupLinearOperator:
    return build_grid_tv_operator(GridMask.from_dims((10, 10)))


@pytest.fixture
def tv_weights() -> PenaltyWeights:
    return PenaltyWeights.from_ratios(1.0, 0.1, 0.5)


@pytest.fixture
def icosahedron() -> TriangleMesh:
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    coords = []
    for a in (-1.0, 1.0):
        for b in (-phi, phi):
            coords += [(0.0, a, b), (a, b, 0.0), (b, 0.0, a)]
    vertices = np.array(coords)
    hull = ConvexHull(vertices)
    return TriangleMesh(vertex_coords=vertices, triangles=hull.simplices.astype(np.int64))


@pytest.fixture
def tiny_dataset():
    return generate_dataset(seed=3, n=40, side=16, snr=1.0)


@pytest.fixture
def small_op() -> GroupLinearOperator:
    return build_grid_tv_operator(GridMask.from_dims((5, 5)))
