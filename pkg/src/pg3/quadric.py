"""Hyperbolic quadrics of PG(3,q), line classification and secant families."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass

import numpy as np

from . import field as gf
from .family import LineFamily
from .space import Geometry


class QuadricError(ValueError):
    pass


class DegenerateForm(QuadricError):
    pass


class NotHyperbolic(QuadricError):
    pass


class InternalInvariantBroken(AssertionError):
    pass


class LineClass(enum.IntEnum):
    EXTERNAL = 0
    TANGENT = 1
    SECANT = 2
    GENERATOR = 3


def form_values(geom: Geometry, gram) -> np.ndarray:
    """x^T G x for every point of the geometry."""
    F = geom.field
    X = geom.point_coords
    acc = np.zeros(geom.n_points, dtype=np.int64)
    for i in range(4):
        for j in range(4):
            g = gram[i][j]
            if g:
                acc = F.add_table[acc, F.mul_table[F.mul_table[g, X[:, i]], X[:, j]]]
    return acc


@dataclass(eq=False)
class Quadric:
    geom: Geometry
    gram: tuple[tuple[int, ...], ...]
    point_mask: np.ndarray
    generator_ids: tuple[int, ...]

    @property
    def point_ids(self) -> list[int]:
        return np.flatnonzero(self.point_mask).tolist()

    def contains(self, x: int) -> bool:
        return bool(self.point_mask[x])

    def gram_flat(self) -> list[int]:
        return [v for row in self.gram for v in row]


def standard_gram(F: gf.FieldSpec) -> tuple[tuple[int, ...], ...]:
    """Gram matrix with x^T G x = 2(x0 x3 - x1 x2)."""
    m1 = F.neg(1)
    return ((0, 0, 0, 1), (0, 0, m1, 0), (0, m1, 0, 0), (1, 0, 0, 0))


def make_quadric(geom: Geometry, gram) -> Quadric:
    F = geom.field
    G = [[int(v) for v in row] for row in gram]
    if len(G) != 4 or any(len(r) != 4 for r in G):
        raise QuadricError("gram must be 4x4")
    if any(not 0 <= v < F.q for r in G for v in r):
        raise QuadricError(f"gram entries must be elements of GF({F.q})")
    if any(G[i][j] != G[j][i] for i in range(4) for j in range(4)):
        raise QuadricError("gram must be symmetric")
    if gf.det(F, G) == 0:
        raise DegenerateForm("gram matrix is singular")
    q = geom.q
    mask = form_values(geom, G) == 0
    n = int(mask.sum())
    if n != (q + 1) ** 2:
        raise NotHyperbolic(f"{n} points, a hyperbolic quadric has {(q + 1) ** 2}")
    meet = mask[geom.line_points].sum(axis=1)
    gens = np.flatnonzero(meet == q + 1)
    if len(gens) != 2 * (q + 1):
        raise InternalInvariantBroken(f"{len(gens)} generators, expected {2 * (q + 1)}")
    per_point = np.bincount(geom.line_points[gens].ravel(), minlength=geom.n_points)
    if not np.array_equal(per_point[mask], np.full(n, 2)) or per_point[~mask].any():
        raise InternalInvariantBroken("a quadric point is not on exactly two generators")
    mask.setflags(write=False)
    return Quadric(geom, tuple(tuple(r) for r in G), mask, tuple(gens.tolist()))


def standard_hyperbolic(geom: Geometry) -> Quadric:
    """The quadric x0 x3 = x1 x2."""
    return make_quadric(geom, standard_gram(geom.field))


def intersection_sizes(quad: Quadric) -> np.ndarray:
    return quad.point_mask[quad.geom.line_points].sum(axis=1)


def classify_lines(quad: Quadric) -> np.ndarray:
    """LineClass value of every line, as an int array."""
    q = quad.geom.q
    sizes = intersection_sizes(quad)
    out = np.where(sizes == q + 1, int(LineClass.GENERATOR), sizes)
    bad = ~np.isin(sizes, (0, 1, 2, q + 1))
    if bad.any():
        l = int(np.flatnonzero(bad)[0])
        raise InternalInvariantBroken(f"line {l} meets the quadric in {int(sizes[l])} points")
    return out


def classify_line(quad: Quadric, l) -> LineClass:
    lid = l.id if hasattr(l, "id") else int(l)
    n = int(quad.point_mask[quad.geom.line_points[lid]].sum())
    q = quad.geom.q
    if n == q + 1:
        return LineClass.GENERATOR
    if n not in (0, 1, 2):
        raise InternalInvariantBroken(f"line {lid} meets the quadric in {n} points")
    return LineClass(n)


def census(quad: Quadric) -> dict[str, int]:
    counts = np.bincount(classify_lines(quad), minlength=4)
    return {c.name.lower(): int(counts[c]) for c in LineClass}


def format_census(c: dict[str, int]) -> str:
    return " ".join(f"{k}={c[k]}" for k in ("external", "tangent", "secant", "generator"))


def secant_family(quad: Quadric) -> LineFamily:
    return LineFamily(quad.geom, classify_lines(quad) == LineClass.SECANT)


@dataclass
class DistributionTable:
    point_counts: np.ndarray   # secants through each point
    plane_counts: np.ndarray   # secants inside each plane
    pencil_counts: np.ndarray  # [plane, local point] secants of that pencil


def family_counts(family: LineFamily) -> DistributionTable:
    g = family.geom
    m = family.members
    ids = np.flatnonzero(m)
    return DistributionTable(
        point_counts=np.bincount(g.line_points[ids].ravel(), minlength=g.n_points),
        plane_counts=np.bincount(g.line_planes[ids].ravel(), minlength=g.n_planes),
        pencil_counts=m[g.pencils].sum(axis=2),
    )


def distribution_table(quad: Quadric) -> DistributionTable:
    """Secant counts per point, plane and pencil, checked against the known
    distribution for a hyperbolic quadric."""
    q = quad.geom.q
    t = family_counts(secant_family(quad))
    on = quad.point_mask
    if not ((t.point_counts[on] == q * q).all() and (t.point_counts[~on] == q * (q + 1) // 2).all()):
        raise InternalInvariantBroken("point secant counts off the expected distribution")
    tangent = t.plane_counts == q * q
    secant = t.plane_counts == q * (q + 1) // 2
    if not (tangent | secant).all():
        raise InternalInvariantBroken("plane secant counts off the expected distribution")
    if not np.isin(t.pencil_counts[tangent], (0, q)).all():
        raise InternalInvariantBroken("pencil count in a tangent plane not in {0, q}")
    if not np.isin(t.pencil_counts[secant], ((q - 1) // 2, (q + 1) // 2, q)).all():
        raise InternalInvariantBroken("pencil count in a secant plane not in {(q-1)/2, (q+1)/2, q}")
    return t


# -- projective transforms --------------------------------------------------------

def random_invertible_matrix(F: gf.FieldSpec, rng: random.Random) -> list[list[int]]:
    while True:
        M = [[rng.randrange(F.q) for _ in range(4)] for _ in range(4)]
        if gf.det(F, M):
            return M


def transform_gram(F: gf.FieldSpec, gram, M) -> list[list[int]]:
    """M^T G M."""
    return gf.matmul(F, gf.matmul(F, gf.transpose(M), gram), M)


def transformed_quadric(geom: Geometry, seed: int) -> Quadric:
    F = geom.field
    M = random_invertible_matrix(F, random.Random(seed))
    return make_quadric(geom, transform_gram(F, standard_gram(F), M))
