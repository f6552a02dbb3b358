import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pg3.field import FieldTooLarge, field_of_order, make_field
from pg3.space import (EvenCharacteristic, GeometryCacheMismatch, IdenticalPoints, PointNotOnPlane,
                       build_geometry, verify_geometry_cache, write_geometry_cache)

from conftest import geometry


def closed_forms(q):
    n = (q**4 - 1) // (q - 1)
    return n, (q * q + 1) * (q * q + q + 1), n


@pytest.mark.parametrize("q", [3, 5, 9])
def test_counts(q):
    g = geometry(q)
    assert (g.n_points, g.n_lines, g.n_planes) == closed_forms(q)


def test_closed_form_counts_frozen():
    assert closed_forms(3) == (40, 130, 40)
    assert closed_forms(5) == (156, 806, 156)
    assert closed_forms(9) == (820, 7462, 820)


def test_even_and_large_rejected():
    with pytest.raises(FieldTooLarge):
        build_geometry(field_of_order(17))
    with pytest.raises(EvenCharacteristic):
        build_geometry(type("F", (), {"p": 2, "q": 4})())


def test_points_canonical_and_lexicographic(g3):
    pts = [tuple(r) for r in g3.point_coords.tolist()]
    assert pts == sorted(pts)
    assert all(next(c for c in p if c) == 1 for p in pts)
    # brute-force oracle: canonical representatives of all nonzero vectors
    oracle = sorted({p for p in itertools.product(range(3), repeat=4)
                     if any(p) and next(c for c in p if c) == 1})
    assert pts == oracle


def test_line_through_basis_points(g3):
    a, b = g3.point_id((1, 0, 0, 0)), g3.point_id((0, 1, 0, 0))
    line = g3.line_through(a, b)
    got = {tuple(g3.point(i).coords) for i in line.point_ids}
    assert got == {(1, 0, 0, 0), (0, 1, 0, 0), (1, 1, 0, 0), (1, 2, 0, 0)}
    assert g3.line_through(g3.point(a), g3.point(b)) == line


def test_identical_points(g3):
    with pytest.raises(IdenticalPoints):
        g3.line_through(5, 5)


def test_pluecker_relation(g5):
    F = g5.field
    for p01, p02, p03, p12, p13, p23 in g5.line_pluecker.tolist():
        s = F.add(F.sub(F.mul(p01, p23), F.mul(p02, p13)), F.mul(p03, p12))
        assert s == 0


def test_lines_ranked_by_sorted_point_ids(g3):
    rows = [tuple(r) for r in g3.line_points.tolist()]
    assert rows == sorted(rows)
    assert all(list(r) == sorted(r) for r in rows)


@pytest.mark.parametrize("q", [3, 5])
def test_line_point_sets_are_spans(q):
    """Every pair of points on a stored line spans exactly that stored line."""
    g = geometry(q)
    F = g.field
    for l in range(g.n_lines):
        a, b = g.line_points[l][:2]
        u, v = g.point_coords[a].tolist(), g.point_coords[b].tolist()
        span = {g.point_id([F.add(F.mul(s, u[i]), F.mul(t, v[i])) for i in range(4)])
                for s in range(q) for t in range(q) if s or t}
        assert span == set(g.line_points[l].tolist())


def test_pencil(g3):
    for pi in (0, 7, 39):
        for x in g3.plane_points[pi].tolist():
            pen = g3.pencil(x, pi)
            assert len(pen) == 4
            assert all(g3.point_on_line(x, l) and g3.line_in_plane(l, pi) for l in pen)
    off = next(x for x in range(40) if not g3.point_on_plane(x, 0))
    with pytest.raises(PointNotOnPlane):
        g3.pencil(off, 0)


@pytest.mark.parametrize("q,k", [(3, 4), (5, 6)])
def test_planes_through(q, k):
    g = geometry(q)
    for l in range(0, g.n_lines, 7):
        planes = g.planes_through(l)
        assert len(planes) == k
        assert all(g.line_in_plane(l, pi) for pi in planes)
        others = set(range(g.n_planes)) - set(planes)
        assert not any(g.line_in_plane(l, pi) for pi in others)


@pytest.mark.parametrize("q", [3, 5])
def test_double_counting(q):
    g = geometry(q)
    k = q * q + q + 1
    assert g.incidence.sum() == g.n_points * k
    assert g.incidence.sum(axis=0).tolist() == [k] * g.n_planes
    assert np.bincount(g.line_points.ravel()).tolist() == [k] * g.n_points
    assert np.bincount(g.line_planes.ravel()).tolist() == [k] * g.n_planes
    assert g.plane_lines.shape == (g.n_planes, k)


def test_incidence_by_dot_product(g3):
    pts = g3.point_coords
    dots = (pts @ pts.T) % 3 == 0
    assert np.array_equal(dots, g3.incidence)


@pytest.mark.parametrize("q", [3, 5])
def test_two_lines_in_a_plane_meet(q):
    g = geometry(q)
    for pi in (0, g.n_planes - 1):
        lines = g.lines_in(pi)
        for a, b in itertools.combinations(lines, 2):
            assert len(set(g.points_of(a)) & set(g.points_of(b))) == 1


def test_duality_points_vs_planes(g3):
    x = 11
    planes = np.flatnonzero(g3.incidence[x]).tolist()
    assert len(planes) == 13
    lines_thru = set(g3.lines_through(x))
    assert lines_thru == {l for pi in planes for l in g3.lines_in(pi) if g3.point_on_line(x, l)}


def test_line_of_mask(g3):
    for l in (0, 64, 129):
        mask = np.zeros(40, dtype=bool)
        mask[g3.line_points[l]] = True
        assert g3.line_of_mask(mask) == l
    mask = np.zeros(40, dtype=bool)
    mask[[0, 1, 2, 13]] = True
    assert g3.line_of_mask(mask) is None


def test_fingerprint_deterministic():
    a = build_geometry(make_field(3, 2)).fingerprint()
    b = build_geometry(make_field(3, 2)).fingerprint()
    assert a == b and len(a) == 64
    assert a != geometry(3).fingerprint()


def test_arrays_frozen(g3):
    with pytest.raises(ValueError):
        g3.line_points[0, 0] = 1


def test_geometry_cache(tmp_path, g3, g5):
    path = tmp_path / "g.txt"
    write_geometry_cache(g3, path)
    assert path.read_text().splitlines()[0] == "pg3-geom v1 p=3 e=1 poly="
    verify_geometry_cache(g3, path)
    with pytest.raises(GeometryCacheMismatch):
        verify_geometry_cache(g5, path)
    text = path.read_text().splitlines()
    text[1], text[2] = text[2], text[1]
    path.write_text("\n".join(text) + "\n")
    with pytest.raises(GeometryCacheMismatch):
        verify_geometry_cache(g3, path)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 155), st.integers(0, 155))
def test_line_through_is_symmetric_and_incident(a, b):
    g = geometry(5)
    if a == b:
        return
    l = g.line_through(a, b)
    assert l == g.line_through(b, a)
    assert a in l.point_ids and b in l.point_ids
