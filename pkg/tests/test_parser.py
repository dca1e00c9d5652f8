import numpy as np
import pytest

from src.errors import DataError
from src.models import GridMask
from src.parser import ParserGrid, ParserMask, ParserMesh, build_tv_operator


def test_mask_file_is_read_i_fastest(tmp_path):
    path = tmp_path / "mask.txt"
    path.write_text("GRID 3 2 1\n1 1 0\n0 1 1\n")
    mask = ParserMask(path).parse()

    assert mask.dims == (3, 2, 1)
    assert mask.p == 4
    assert not mask.inside[2, 0, 0]
    assert not mask.inside[0, 1, 0]
    assert mask.index_map[1, 1, 0] == 2


def test_three_dimensional_mask_reads_back(tmp_path):
    inside = np.random.default_rng(7).random((4, 3, 2)) > 0.3
    mask = GridMask.from_array(inside)
    path = tmp_path / "mask.txt"
    values = mask.inside.ravel(order="F").astype(int)
    rows = [" ".join(map(str, values[i : i + 4])) for i in range(0, values.size, 4)]
    path.write_text("\n".join(["GRID 4 3 2", *rows]) + "\n")

    np.testing.assert_array_equal(ParserMask(path).parse().inside, inside)


@pytest.mark.parametrize(
    "content, message",
    [
        ("", "empty"),
        ("GRID 2 2\n1 1 1 1\n", "header"),
        ("GRID 2 2 1\n1 1 1\n", "announces 4 cells"),
        ("GRID 2 2 1\n1 2 1 1\n", "0 or 1"),
    ],
)
def test_bad_mask_files(tmp_path, content, message):
    path = tmp_path / "mask.txt"
    path.write_text(content)
    with pytest.raises(DataError, match=message):
        ParserMask(path).parse()


def test_mesh_file_with_comments(tmp_path):
    path = tmp_path / "mesh.off"
    path.write_text(
        "OFF\n"
        "# a unit square split in two\n"
        "4 2 0\n"
        "0 0 0\n1 0 0\n0 1 0\n1 1 0\n"
        "3 0 1 2\n"
        "1 3 2  # no leading count\n"
    )
    mesh = ParserMesh(path).parse()

    assert mesh.n_vertices == 4
    assert mesh.triangles.tolist() == [[0, 1, 2], [1, 3, 2]]
    assert [n.tolist() for n in mesh.neighbors()] == [[1, 2], [0, 2, 3], [0, 1, 3], [1, 2]]


def test_closed_mesh_reads_back(tmp_path, icosahedron):
    lines = ["OFF", f"{icosahedron.n_vertices} {len(icosahedron.triangles)} 0"]
    lines += [" ".join(repr(float(x)) for x in row) for row in icosahedron.vertex_coords]
    lines += ["3 " + " ".join(map(str, t)) for t in icosahedron.triangles.tolist()]
    path = tmp_path / "ico.off"
    path.write_text("\n".join(lines) + "\n")
    mesh = ParserMesh(path).parse()

    np.testing.assert_array_equal(mesh.triangles, icosahedron.triangles)
    np.testing.assert_array_equal(mesh.vertex_coords, icosahedron.vertex_coords)


def test_mesh_with_missing_lines(tmp_path):
    path = tmp_path / "mesh.off"
    path.write_text("3 1\n0 0 0\n1 0 0\n")
    with pytest.raises(DataError, match="expected 4 data lines"):
        ParserMesh(path).parse()


def test_grid_size_string():
    assert ParserGrid.from_string("50x40").parse().dims == (50, 40, 1)
    assert ParserGrid.from_string("4x3x2").parse().p == 24
    with pytest.raises(DataError):
        ParserGrid.from_string("50by40")
    with pytest.raises(DataError):
        ParserGrid.from_string("0x4")


def test_parser_builds_matching_operator(tmp_path):
    path = tmp_path / "mask.txt"
    path.write_text("GRID 2 2 1\n1 1\n1 1\n")
    op = ParserMask(path).operator()
    assert op.total_rows == build_tv_operator(GridMask.from_dims((2, 2))).total_rows == 4
