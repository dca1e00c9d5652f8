import numpy as np
import pytest

from src.errors import DataError
from src.models import GridMask, TriangleMesh
from src.structure import (
    GroupBlock,
    GroupLinearOperator,
    build_grid_tv_operator,
    build_mesh_tv_operator,
)


def test_two_by_two_hand_case():
    op = build_grid_tv_operator(GridMask.from_dims((2, 2)))
    v = np.array([0.0, 1.0, 0.0, 1.0])

    assert op.group_rows().tolist() == [2, 1, 1, 0]
    np.testing.assert_allclose(op.group_norms(v), [1.0, 0.0, 1.0, 0.0])
    assert op.group_norms(v).sum() == pytest.approx(2.0)


@pytest.mark.parametrize("w, h", [(3, 3), (5, 2), (7, 4), (1, 6)])
def test_full_grid_row_count(w, h):
    op = build_grid_tv_operator(GridMask.from_dims((w, h)))
    assert op.total_rows == (w - 1) * h + w * (h - 1)
    assert op.n_groups == w * h


def test_three_dimensional_row_count():
    op = build_grid_tv_operator(GridMask.from_dims((3, 4, 2)))
    assert op.total_rows == 2 * 4 * 2 + 3 * 3 * 2 + 3 * 4 * 1


def test_masked_neighbours_are_skipped():
    inside = np.ones((3, 3), dtype=bool)
    inside[1, 1] = False
    mask = GridMask.from_array(inside)
    op = build_grid_tv_operator(mask)

    assert op.p == 8
    # every difference touches two in-mask cells
    dense = op.matrix.toarray()
    np.testing.assert_allclose(dense.sum(axis=1), 0.0)
    assert op.total_rows == 8


def test_empty_mask_is_rejected():
    mask = GridMask.from_array(np.zeros((3, 3), dtype=bool))
    with pytest.raises(DataError, match="no features"):
        build_grid_tv_operator(mask)


def test_adjoint_identity(rng, grid_op):
    for _ in range(10):
        v = rng.standard_normal(grid_op.p)
        y = rng.standard_normal(grid_op.total_rows)
        lhs = grid_op.apply(v) @ y
        rhs = v @ grid_op.apply_adjoint(y)
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


def test_apply_rejects_wrong_length(chain_op):
    with pytest.raises(DataError):
        chain_op.apply(np.zeros(5))
    with pytest.raises(DataError):
        chain_op.apply_adjoint(np.zeros(2))


def test_chain_spectral_norm(chain_op):
    assert chain_op.norm == pytest.approx(2.0 * np.sin(3.0 * np.pi / 8.0), rel=1e-9)


@pytest.mark.parametrize("dims", [(10, 10), (7, 5, 3), (13, 9)])
def test_spectral_norm_matches_dense_svd(dims):
    op = build_grid_tv_operator(GridMask.from_dims(dims))
    oracle = np.linalg.svd(op.matrix.toarray(), compute_uv=False)[0]
    assert op.spectral_norm() == pytest.approx(oracle, rel=1e-6)


def test_spectral_norm_of_zero_operator():
    op = GroupLinearOperator.from_blocks(
        3, [GroupBlock(columns=np.zeros(0, dtype=np.int64), block=np.zeros((0, 0)))] * 3
    )
    assert op.norm == 0.0


def test_from_blocks_round_trips_groups():
    blocks = [
        GroupBlock(columns=np.array([0, 2]), block=np.array([[1.0, -1.0], [0.5, 2.0]])),
        GroupBlock(columns=np.array([1]), block=np.array([[3.0]])),
    ]
    op = GroupLinearOperator.from_blocks(3, blocks)

    assert op.group_rows().tolist() == [2, 1]
    recovered = list(op.groups)
    np.testing.assert_array_equal(recovered[0].columns, [0, 2])
    np.testing.assert_allclose(recovered[0].block, blocks[0].block)
    np.testing.assert_allclose(recovered[1].block, [[3.0]])


def test_from_blocks_rejects_out_of_range_column():
    with pytest.raises(DataError):
        GroupLinearOperator.from_blocks(
            2, [GroupBlock(columns=np.array([0, 2]), block=np.ones((1, 2)))]
        )


def test_triplets_export(chain_op):
    frame = chain_op.to_triplets()
    assert list(frame.columns) == ["row", "col", "value"]
    assert len(frame) == 6
    assert sorted(frame["value"].tolist()) == [-1.0] * 3 + [1.0] * 3


def test_mesh_operator_recovers_linear_field(icosahedron):
    op = build_mesh_tv_operator(icosahedron)
    slope = np.array([0.3, -1.2, 2.5])
    v = icosahedron.vertex_coords @ slope

    assert op.group_rows().tolist() == [3] * icosahedron.n_vertices
    gradients = op.apply(v).reshape(-1, 3)
    np.testing.assert_allclose(gradients, np.tile(slope, (icosahedron.n_vertices, 1)), atol=1e-8)


def test_mesh_operator_annihilates_constants(icosahedron):
    op = build_mesh_tv_operator(icosahedron)
    np.testing.assert_allclose(op.apply(np.full(op.p, 4.2)), 0.0, atol=1e-12)


def test_flat_mesh_keeps_two_rows_per_vertex():
    coords = np.array(
        [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]]
    )
    mesh = TriangleMesh(vertex_coords=coords, triangles=np.array([[0, 1, 2], [1, 3, 2]]))
    op = build_mesh_tv_operator(mesh)

    assert op.group_rows().tolist() == [2, 2, 2, 2]
    # in-plane linear field: gradient norm equals the slope norm
    v = coords @ np.array([2.0, -1.0, 0.0])
    np.testing.assert_allclose(op.group_norms(v), np.sqrt(5.0), rtol=1e-10)


def test_isolated_vertex_has_empty_group():
    coords = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [5.0, 5.0, 5.0]])
    mesh = TriangleMesh(vertex_coords=coords, triangles=np.array([[0, 1, 2]]))
    op = build_mesh_tv_operator(mesh)
    assert op.group_rows()[3] == 0


def test_triangle_with_bad_index_is_rejected():
    coords = np.zeros((3, 3))
    with pytest.raises(DataError, match="outside"):
        TriangleMesh(vertex_coords=coords, triangles=np.array([[0, 1, 3]]))


def test_tv_ignores_added_constants(rng, grid_op):
    for _ in range(20):
        v = rng.standard_normal(grid_op.p)
        c = float(rng.uniform(-50.0, 50.0))
        assert grid_op.group_norms(v + c).sum() == pytest.approx(
            grid_op.group_norms(v).sum(), rel=1e-10
        )


def test_tv_is_positively_homogeneous(rng, grid_op, icosahedron):
    mesh_op = build_mesh_tv_operator(icosahedron)
    for op in (grid_op, mesh_op):
        v = rng.standard_normal(op.p)
        tv = op.group_norms(v).sum()
        for c in (-3.0, -0.5, 0.0, 2.0, 1e3):
            assert op.group_norms(c * v).sum() == pytest.approx(abs(c) * tv, rel=1e-12, abs=1e-12)


def test_removing_a_voxel_never_adds_rows(rng):
    inside = rng.random((6, 5, 3)) > 0.2
    rows = build_grid_tv_operator(GridMask.from_array(inside)).total_rows
    for flat in rng.permutation(np.flatnonzero(inside.ravel()))[:20]:
        smaller = inside.copy()
        smaller.flat[flat] = False
        if not smaller.any():
            continue
        assert build_grid_tv_operator(GridMask.from_array(smaller)).total_rows <= rows
