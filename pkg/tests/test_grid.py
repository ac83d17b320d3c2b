import json
import math

import pytest

from cooppath.grid import GridError, GridSpec, Position, Vertex, build_grid


def test_smallest_grid():
    g = build_grid(GridSpec(2, 2, 1.0, 1.0, "four"))
    assert g.n_vertices == 4
    edges = list(g.edges())
    assert len(edges) == 4
    assert all(length == pytest.approx(1.0) for _, _, length in edges)


def test_eight_connected_center():
    g = build_grid(GridSpec(3, 3, 2.0, 2.0, "eight"))
    assert g.n_vertices == 9
    center = Vertex(1, 1)
    nbrs = g.neighbors(center)
    assert len(nbrs) == 8
    diagonals = [length for v, length in nbrs if v.col != 1 and v.row != 1]
    assert all(length == pytest.approx(math.sqrt(2.0)) for length in diagonals)


def test_twenty_grid_pitch_and_edges():
    g = build_grid(GridSpec(20, 20, 20.0, 20.0, "four"))
    assert g.n_vertices == 400
    pitch = 20.0 / 19.0
    assert g.spec.pitch_x == pytest.approx(pitch)
    lengths = {round(length, 12) for _, _, length in g.edges()}
    assert lengths == {round(pitch, 12)}
    # exhaustive enumeration: interior vertices have 4 neighbors
    assert len(g.neighbors(Vertex(10, 10))) == 4


def test_corner_neighbor_counts():
    g4 = build_grid(GridSpec(4, 4, 3.0, 3.0, "four"))
    g8 = build_grid(GridSpec(4, 4, 3.0, 3.0, "eight"))
    assert len(g4.neighbors(Vertex(0, 0))) == 2
    assert len(g8.neighbors(Vertex(0, 0))) == 3


def test_interior_eight_neighbor_lengths():
    g = build_grid(GridSpec(3, 3, 2.0, 2.0, "eight"))
    nbrs = g.neighbors(Vertex(1, 1))
    straight = sum(1 for _, length in nbrs if length == pytest.approx(1.0))
    diagonal = sum(1 for _, length in nbrs if length == pytest.approx(math.sqrt(2.0)))
    assert straight == 4 and diagonal == 4


def test_neighbor_order_is_row_col_sorted_and_stable():
    g = build_grid(GridSpec(5, 5, 4.0, 4.0, "eight"))
    for v in (Vertex(0, 0), Vertex(2, 2), Vertex(4, 1)):
        nbrs = g.neighbors(v)
        keys = [(n.row, n.col) for n, _ in nbrs]
        assert keys == sorted(keys)
    g2 = build_grid(GridSpec(5, 5, 4.0, 4.0, "eight"))
    dump = lambda graph: json.dumps(
        [[(n.col, n.row, length) for n, length in graph.neighbors(graph.vertex_at(vi))]
         for vi in range(graph.n_vertices)]
    )
    assert dump(g) == dump(g2)


def test_edges_are_symmetric_and_embedded_in_bounds():
    g = build_grid(GridSpec(6, 4, 5.0, 3.0, "eight"))
    for u in (Vertex(0, 0), Vertex(3, 2), Vertex(5, 3)):
        for v, length in g.neighbors(u):
            back = dict((w, l) for w, l in g.neighbors(v))
            assert u in back and back[u] == length
    for vi in range(g.n_vertices):
        p = g.position_of_index(vi)
        assert 0.0 <= p.x <= 5.0 and 0.0 <= p.y <= 3.0


def test_nearest_vertex():
    g = build_grid(GridSpec(3, 3, 2.0, 2.0, "four"))
    assert g.nearest_vertex(Position(1.0, 1.0)) == Vertex(1, 1)
    assert g.nearest_vertex(Position(0.0, 2.0)) == Vertex(0, 2)
    # exact midpoint: the smaller (row, col) wins
    assert g.nearest_vertex(Position(0.5, 0.0)) == Vertex(0, 0)
    assert g.nearest_vertex(Position(1.0, 0.5)) == Vertex(1, 0)


def test_nearest_vertex_out_of_bounds():
    g = build_grid(GridSpec(3, 3, 2.0, 2.0, "four"))
    with pytest.raises(GridError):
        g.nearest_vertex(Position(-0.1, 0.0))
    with pytest.raises(GridError):
        g.nearest_vertex(Position(0.0, 2.5))


def test_invalid_specs_rejected():
    with pytest.raises(GridError):
        GridSpec(1, 5, 1.0, 1.0, "four")
    with pytest.raises(GridError):
        GridSpec(3, 3, 0.0, 1.0, "four")
    with pytest.raises(GridError):
        GridSpec(3, 3, 1.0, 1.0, "six")


def test_out_of_range_vertex_queries():
    g = build_grid(GridSpec(3, 3, 2.0, 2.0, "four"))
    with pytest.raises(GridError):
        g.neighbors(Vertex(3, 0))
    with pytest.raises(GridError):
        g.vertex_index(Vertex(0, -1))
