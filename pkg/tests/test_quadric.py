import itertools
import random

import numpy as np
import pytest

from pg3 import field as gf
from pg3.quadric import (DegenerateForm, LineClass, NotHyperbolic, QuadricError, census, classify_line,
                         classify_lines, distribution_table, family_counts, format_census, make_quadric,
                         random_invertible_matrix, secant_family, standard_gram, transform_gram,
                         transformed_quadric)

from conftest import geometry, secants, standard


def brute_zero_count(q, form):
    """Count canonical projective points with form(x) == 0 mod q (prime q)."""
    n = 0
    for x in itertools.product(range(q), repeat=4):
        if any(x) and next(c for c in x if c) == 1 and form(x) % q == 0:
            n += 1
    return n


@pytest.mark.parametrize("q,pts,gens", [(3, 16, 8), (5, 36, 12)])
def test_standard_sizes(q, pts, gens):
    Q = standard(q)
    assert len(Q.point_ids) == pts == (q + 1) ** 2
    assert len(Q.generator_ids) == gens == 2 * (q + 1)


def test_standard_points(g3):
    Q = standard(3)
    assert Q.contains(g3.point_id((1, 0, 0, 0)))
    assert not Q.contains(g3.point_id((1, 0, 0, 1)))
    # Segre oracle: rank-1 2x2 matrices [[x0, x1], [x2, x3]]
    seg = {g3.point_id(((a * c) % 3, (a * d) % 3, (b * c) % 3, (b * d) % 3))
           for a, b, c, d in itertools.product(range(3), repeat=4) if (a or b) and (c or d)}
    assert seg == set(Q.point_ids)


def test_identity_gram_q3(g3):
    n = brute_zero_count(3, lambda x: sum(v * v for v in x))
    ident = [[int(i == j) for j in range(4)] for i in range(4)]
    if n == 16:
        assert len(make_quadric(g3, ident).point_ids) == 16
    else:
        with pytest.raises(NotHyperbolic):
            make_quadric(g3, ident)
    assert n == 16


def test_elliptic_rejected(g3):
    # diagonal forms with q^2+1 zeros are elliptic; find one by brute force
    hit = False
    for diag in ((1, 1, 1, 2), (1, 1, 2, 2)):
        n = brute_zero_count(3, lambda x: sum(d * v * v for d, v in zip(diag, x)))
        G = [[diag[i] if i == j else 0 for j in range(4)] for i in range(4)]
        if n == 10:
            hit = True
            with pytest.raises(NotHyperbolic):
                make_quadric(g3, G)
    assert hit


def test_degenerate(g3):
    G = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 0]]
    with pytest.raises(DegenerateForm):
        make_quadric(g3, G)


def test_malformed_gram(g3):
    with pytest.raises(QuadricError):
        make_quadric(g3, [[0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    with pytest.raises(QuadricError):
        make_quadric(g3, [[5, 0, 0, 0]] * 4)


@pytest.mark.parametrize("q", [3, 5, 7])
def test_census(q):
    c = census(standard(q))
    assert c["secant"] == q * q * (q + 1) ** 2 // 2
    assert c["generator"] == 2 * (q + 1)
    # each quadric point has q-1 tangents: its tangent plane pencil minus the two generators
    assert c["tangent"] == (q + 1) ** 2 * (q - 1)
    assert sum(c.values()) == geometry(q).n_lines
    # incidences (quadric point, line through it), counted by line class
    k = q * q + q + 1
    assert 2 * c["secant"] + c["tangent"] + (q + 1) * c["generator"] == (q + 1) ** 2 * k


def test_format_census():
    assert format_census(census(standard(3))) == "external=18 tangent=32 secant=72 generator=8"


def test_classify_line_examples(g3):
    Q = standard(3)
    cls = classify_lines(Q)
    assert classify_line(Q, Q.generator_ids[0]) is LineClass.GENERATOR
    for l in range(g3.n_lines):
        n = len(set(g3.points_of(l)) & set(Q.point_ids))
        assert cls[l] == (3 if n == 4 else n)


def test_secant_family_q3(g3):
    S = secants(3)
    assert len(S) == 72
    t = family_counts(S)
    Q = standard(3)
    assert set(t.point_counts[Q.point_mask].tolist()) == {9}
    assert set(t.point_counts[~Q.point_mask].tolist()) == {6}
    assert set(t.plane_counts.tolist()) == {6, 9}


def test_distribution_q3():
    t = distribution_table(standard(3))
    tangent = t.plane_counts == 9
    assert set(t.pencil_counts[tangent].ravel().tolist()) <= {0, 3}
    assert set(t.pencil_counts[~tangent].ravel().tolist()) <= {1, 2, 3}


@pytest.mark.parametrize("seed", range(10))
def test_transform_invariance(seed, g3):
    Q = transformed_quadric(g3, seed)
    assert len(Q.point_ids) == 16
    assert census(Q) == census(standard(3))


def test_transform_maps_points(g3):
    F = g3.field
    M = random_invertible_matrix(F, random.Random(3))
    G2 = transform_gram(F, standard_gram(F), M)
    Q, Q2 = standard(3), make_quadric(g3, G2)
    # x on Q2 iff M x on Q
    for x in range(40):
        v = g3.point_coords[x].tolist()
        Mx = [sum(M[i][j] * v[j] for j in range(4)) % 3 for i in range(4)]
        assert Q2.contains(x) == Q.contains(g3.point_id(Mx))


def test_generator_pairs(g3):
    """Two generators from opposite rulings meet in a point and span a plane of the quadric."""
    Q = standard(3)
    gens = Q.generator_ids
    meets = [len(set(g3.points_of(a)) & set(g3.points_of(b))) for a, b in itertools.combinations(gens, 2)]
    assert sorted(set(meets)) == [0, 1]
    assert meets.count(1) == 16  # (q+1)^2 opposite-ruling pairs
    a, b = next((a, b) for a, b in itertools.combinations(gens, 2)
                if set(g3.points_of(a)) & set(g3.points_of(b)))
    common = set(g3.planes_through(a)) & set(g3.planes_through(b))
    assert len(common) == 1


def test_mtgm_matches_numpy():
    F = gf.make_field(5)
    rng = random.Random(1)
    M = random_invertible_matrix(F, rng)
    G = standard_gram(F)
    ref = (np.array(M).T @ np.array(G) @ np.array(M)) % 5
    assert transform_gram(F, G, M) == ref.tolist()
