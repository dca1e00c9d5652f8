import logging

import numpy as np

from src.models import FloatArray, TriangleMesh
from src.structure.operator import GroupBlock, GroupLinearOperator

logger = logging.getLogger(__name__)

RANK_TOL = 1e-10


def gradient_rows(edges: FloatArray) -> FloatArray:
    """Least-squares gradient weights for values sampled along edge vectors.

    ``edges`` holds neighbour_coords - g_coords, one edge per row. With full
    rank the result is pinv(edges) (3 x m) so the rows are the gradient in
    ambient coordinates; with rank r < 3 only r rows are kept, expressed in an
    orthonormal basis of the spanned directions.
    """
    if edges.shape[0] == 0:
        return np.zeros((0, 0))
    u, s, _vt = np.linalg.svd(edges, full_matrices=False)
    rank = int(np.sum(s > RANK_TOL * s[0])) if s.size and s[0] > 0 else 0
    if rank == 0:
        return np.zeros((0, edges.shape[0]))
    if rank == edges.shape[1]:
        return np.linalg.pinv(edges)
    return u[:, :rank].T / s[:rank, np.newaxis]


def build_mesh_tv_operator(mesh: TriangleMesh) -> GroupLinearOperator:
    """One group per vertex estimating the first-order spatial gradient.

    Columns of group g are g followed by its adjacent vertices; the column of g
    is minus the row sums so constant fields map to zero.
    """
    blocks: list[GroupBlock] = []
    rank_deficient = 0
    for g, nbrs in enumerate(mesh.neighbors()):
        if nbrs.size == 0:
            blocks.append(
                GroupBlock(columns=np.zeros(0, dtype=np.int64), block=np.zeros((0, 0)))
            )
            continue
        edges = mesh.vertex_coords[nbrs] - mesh.vertex_coords[g]
        weights = gradient_rows(edges)
        if weights.shape[0] < 3:
            rank_deficient += 1
        block = np.hstack([-weights.sum(axis=1, keepdims=True), weights])
        blocks.append(GroupBlock(columns=np.concatenate([[g], nbrs]), block=block))

    if rank_deficient:
        logger.debug("%d vertices have rank-deficient neighbourhoods", rank_deficient)
    return GroupLinearOperator.from_blocks(mesh.n_vertices, blocks)
