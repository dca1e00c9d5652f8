import logging

import numpy as np
import scipy.sparse as sparse

from src.errors import DataError
from src.models import GridMask, IntArray
from src.structure.operator import GroupLinearOperator

logger = logging.getLogger(__name__)

_FORWARD_STEPS = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def _feature_coords(mask: GridMask) -> IntArray:
    """Grid coordinates of every feature, ordered by feature index."""
    coords = np.argwhere(mask.inside)
    features = mask.index_map[tuple(coords.T)]
    return coords[np.argsort(features)]


def build_grid_tv_operator(mask: GridMask) -> GroupLinearOperator:
    """Forward-difference TV operator: one group per in-mask voxel.

    Group g holds one row per in-mask forward neighbour of g in the i, j and k
    directions (in that order), with -1 at g and +1 at the neighbour.
    """
    p = mask.p
    if p == 0:
        raise DataError("no features: the mask has no in-mask cell")

    coords = _feature_coords(mask)
    dims = np.array(mask.dims)
    neighbours = np.full((p, len(_FORWARD_STEPS)), -1, dtype=np.int64)
    for d, step in enumerate(_FORWARD_STEPS):
        shifted = coords + np.array(step)
        in_grid = np.all(shifted < dims, axis=1)
        target = np.full(p, -1, dtype=np.int64)
        target[in_grid] = mask.index_map[tuple(shifted[in_grid].T)]
        neighbours[:, d] = target

    valid = neighbours >= 0
    group_ptr = np.zeros(p + 1, dtype=np.int64)
    group_ptr[1:] = np.cumsum(valid.sum(axis=1))

    owner = np.repeat(np.arange(p, dtype=np.int64), valid.sum(axis=1))
    target = neighbours[valid]
    n_rows = owner.size
    row = np.repeat(np.arange(n_rows, dtype=np.int64), 2)
    col = np.column_stack([owner, target]).ravel()
    val = np.tile([-1.0, 1.0], n_rows)
    matrix = sparse.csr_matrix((val, (row, col)), shape=(n_rows, p))

    logger.debug("grid TV operator: dims=%s p=%d rows=%d", mask.dims, p, n_rows)
    return GroupLinearOperator(p=p, matrix=matrix, group_ptr=group_ptr)
