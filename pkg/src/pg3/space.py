"""Points, lines and planes of PG(3,q) with dense integer ids.

Points and planes are canonical 4-tuples (first nonzero coordinate 1) ranked
lexicographically under the field's integer encoding; plane i has the same
coordinate tuple as point i.  Lines are ranked by their sorted point-id
tuples.  All incidence data is stored as dense numpy index arrays:

    line_points[l]   sorted ids of the q+1 points on line l
    line_planes[l]   sorted ids of the q+1 planes through l
    point_lines[x]   sorted ids of the q^2+q+1 lines through x
    plane_points[p]  sorted ids of the q^2+q+1 points of plane p
    plane_lines[p]   sorted ids of the q^2+q+1 lines in plane p
    pencils[p, k]    the q+1 line ids through plane_points[p, k] inside p
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .field import GEOMETRY_MAX_Q, FieldSpec, FieldTooLarge, make_field


class GeometryError(ValueError):
    pass


class EvenCharacteristic(GeometryError):
    pass


class IdenticalPoints(GeometryError):
    pass


class PointNotOnPlane(GeometryError):
    pass


class GeometryCacheMismatch(GeometryError):
    pass


@dataclass(frozen=True)
class Point:
    id: int
    coords: tuple[int, int, int, int]


@dataclass(frozen=True)
class Plane:
    id: int
    dual_coords: tuple[int, int, int, int]


@dataclass(frozen=True)
class Line:
    id: int
    point_ids: tuple[int, ...]
    pluecker: tuple[int, int, int, int, int, int]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def _invert_incidence(rows: np.ndarray, n_targets: int) -> np.ndarray:
    """Given rows[i] = targets of i (each target hit equally often), list the
    sources of every target in ascending order."""
    flat = rows.ravel()
    src = np.repeat(np.arange(rows.shape[0]), rows.shape[1])
    order = np.argsort(flat, kind="stable")
    per = flat.size // n_targets
    return src[order].reshape(n_targets, per)


class Geometry:
    """PG(3,q) over a tabled field.  Immutable after construction."""

    def __init__(self, field: FieldSpec):
        self.field = field
        q = self.q = field.q
        F = field
        self.n_points = q**3 + q**2 + q + 1
        self.n_planes = self.n_points
        self.n_lines = (q**2 + 1) * (q**2 + q + 1)
        self.plane_size = q**2 + q + 1

        # points: canonical tuples in lexicographic order == ascending base-q key
        pts = []
        for lead in range(4):
            for rest in itertools.product(range(q), repeat=3 - lead):
                pts.append((0,) * lead + (1,) + rest)
        pts.sort()
        coords = np.array(pts, dtype=np.int64)
        keys = ((coords[:, 0] * q + coords[:, 1]) * q + coords[:, 2]) * q + coords[:, 3]
        key_to_id = np.full(q**4, -1, dtype=np.int64)
        key_to_id[keys] = np.arange(len(pts))
        self.point_coords = _frozen(coords)
        self._key_to_id = _frozen(key_to_id)

        # lines from reduced row echelon 2x4 matrices
        addt, mult = F.add_table, F.mul_table
        all_pts, all_pl = [], []
        for i, j in itertools.combinations(range(4), 2):
            free1 = [k for k in range(i + 1, 4) if k != j]
            free2 = list(range(j + 1, 4))
            nfree = len(free1) + len(free2)
            prod = list(itertools.product(range(q), repeat=nfree))
            combos = np.array(prod, dtype=np.int64).reshape(len(prod), nfree)
            m = len(combos)
            r1 = np.zeros((m, 4), dtype=np.int64)
            r2 = np.zeros((m, 4), dtype=np.int64)
            r1[:, i] = 1
            r2[:, j] = 1
            for c, k in enumerate(free1):
                r1[:, k] = combos[:, c]
            for c, k in enumerate(free2):
                r2[:, k] = combos[:, len(free1) + c]
            # points r1 + t*r2 for every t, plus r2
            t = np.arange(q)
            span = addt[r1[:, None, :], mult[t[None, :, None], r2[:, None, :]]]
            lp = np.concatenate([span, r2[:, None, :]], axis=1)
            all_pts.append(self._ids_of(lp.reshape(-1, 4)).reshape(m, q + 1))
            all_pl.append(self._pluecker(r1, r2))
        line_points = np.sort(np.concatenate(all_pts), axis=1)
        pl = np.concatenate(all_pl)
        order = np.lexsort(line_points.T[::-1])
        line_points = line_points[order]
        pl = pl[order]
        self.line_points = _frozen(line_points)
        self.line_pluecker = _frozen(pl)
        self._pluecker_index = {tuple(r): k for k, r in enumerate(pl.tolist())}

        # planes through a line are the points of its dual line
        neg = F.neg_table
        dual_pl = np.stack([pl[:, 5], neg[pl[:, 4]], pl[:, 3], pl[:, 2], neg[pl[:, 1]], pl[:, 0]], axis=1)
        dual_pl = self._normalize(dual_pl)
        dual_line = np.array([self._pluecker_index[tuple(r)] for r in dual_pl.tolist()], dtype=np.int64)
        self.line_planes = _frozen(line_points[dual_line])

        self.point_lines = _frozen(_invert_incidence(self.line_points, self.n_points))
        self.plane_lines = _frozen(_invert_incidence(self.line_planes, self.n_planes))

        inc = self._dot_matrix(coords, coords) == 0
        self.incidence = _frozen(inc)  # incidence[point, plane]
        self.plane_points = _frozen(np.nonzero(inc.T)[1].reshape(self.n_planes, self.plane_size))
        local = np.full((self.n_planes, self.n_points), -1, dtype=np.int64)
        np.put_along_axis(local, self.plane_points,
                          np.broadcast_to(np.arange(self.plane_size), self.plane_points.shape), axis=1)
        self.plane_local = _frozen(local)

        # per plane: local index of every point of every line in that plane
        lp_in_plane = self.line_points[self.plane_lines]  # (planes, lines, q+1)
        pidx = np.arange(self.n_planes)[:, None, None]
        self.plane_line_local = _frozen(local[pidx, lp_in_plane])
        keys = (pidx * self.plane_size + self.plane_line_local).ravel()
        line_rep = np.repeat(self.plane_lines.ravel(), q + 1)
        order = np.argsort(keys, kind="stable")
        self.pencils = _frozen(line_rep[order].reshape(self.n_planes, self.plane_size, q + 1))

        self._self_check()

    # -- construction helpers ---------------------------------------------

    def _normalize(self, v: np.ndarray) -> np.ndarray:
        """Scale rows so the first nonzero entry is 1 (rows assumed nonzero)."""
        first = np.argmax(v != 0, axis=1)
        lead = v[np.arange(len(v)), first]
        return self.field.mul_table[self.field.inv_table[lead][:, None], v]

    def _ids_of(self, v: np.ndarray) -> np.ndarray:
        q = self.q
        keys = ((v[:, 0] * q + v[:, 1]) * q + v[:, 2]) * q + v[:, 3]
        ids = self._key_to_id[keys]
        if (ids < 0).any():
            raise AssertionError("non-canonical point vector")
        return ids

    def _pluecker(self, r1: np.ndarray, r2: np.ndarray) -> np.ndarray:
        F = self.field
        cols = []
        for i, j in itertools.combinations(range(4), 2):
            a = F.mul_table[r1[:, i], r2[:, j]]
            b = F.mul_table[r1[:, j], r2[:, i]]
            cols.append(F.add_table[a, F.neg_table[b]])
        return self._normalize(np.stack(cols, axis=1))

    def _dot_matrix(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        F = self.field
        acc = np.zeros((len(A), len(B)), dtype=np.int64)
        for k in range(4):
            acc = F.add_table[acc, F.mul_table[A[:, k][:, None], B[:, k][None, :]]]
        return acc

    def _self_check(self):
        q = self.q
        assert self.line_points.shape == (self.n_lines, q + 1)
        assert self.line_planes.shape == (self.n_lines, q + 1)
        assert self.point_lines.shape == (self.n_points, q**2 + q + 1)
        assert self.plane_lines.shape == (self.n_planes, q**2 + q + 1)
        assert self.pencils.shape == (self.n_planes, self.plane_size, q + 1)
        assert (self.incidence.sum(axis=0) == self.plane_size).all()
        assert (self.incidence.sum(axis=1) == self.plane_size).all()
        # planes through each line contain the line
        for k in range(q + 1):
            assert self.incidence[self.line_points, self.line_planes[:, [k]]].all()

    # -- queries ----------------------------------------------------------

    def normalize(self, coords) -> tuple[int, int, int, int]:
        c = [int(x) for x in coords]
        lead = next((x for x in c if x), None)
        if lead is None:
            raise GeometryError("zero vector is not a projective point")
        s = self.field.inv(lead)
        return tuple(self.field.mul(s, x) for x in c)

    def point_id(self, coords) -> int:
        c = self.normalize(coords)
        q = self.q
        return int(self._key_to_id[((c[0] * q + c[1]) * q + c[2]) * q + c[3]])

    plane_id = point_id

    def point(self, i: int) -> Point:
        return Point(int(i), tuple(int(x) for x in self.point_coords[i]))

    def plane(self, i: int) -> Plane:
        return Plane(int(i), tuple(int(x) for x in self.point_coords[i]))

    def line(self, i: int) -> Line:
        return Line(int(i), tuple(int(x) for x in self.line_points[i]),
                    tuple(int(x) for x in self.line_pluecker[i]))

    def _as_point_id(self, x) -> int:
        return x.id if isinstance(x, Point) else int(x)

    def _as_plane_id(self, x) -> int:
        return x.id if isinstance(x, Plane) else int(x)

    def _as_line_id(self, x) -> int:
        return x.id if isinstance(x, Line) else int(x)

    def line_through(self, a, b) -> Line:
        """The unique line through two distinct points (ids or Points)."""
        ia, ib = self._as_point_id(a), self._as_point_id(b)
        if ia == ib:
            raise IdenticalPoints(f"point {ia} given twice")
        F = self.field
        u, v = self.point_coords[ia].tolist(), self.point_coords[ib].tolist()
        pl = [F.sub(F.mul(u[i], v[j]), F.mul(u[j], v[i])) for i, j in itertools.combinations(range(4), 2)]
        lead = next(c for c in pl if c)
        s = F.inv(lead)
        return self.line(self._pluecker_index[tuple(F.mul(s, c) for c in pl)])

    def line_id_through(self, a: int, b: int) -> int:
        return self.line_through(a, b).id

    def point_on_plane(self, x, pi) -> bool:
        return bool(self.incidence[self._as_point_id(x), self._as_plane_id(pi)])

    def line_in_plane(self, l, pi) -> bool:
        return bool(self.incidence[self.line_points[self._as_line_id(l)], self._as_plane_id(pi)].all())

    def point_on_line(self, x, l) -> bool:
        return self._as_point_id(x) in self.line_points[self._as_line_id(l)]

    def pencil(self, x, pi) -> list[int]:
        """Line ids through point x inside plane pi."""
        ix, ip = self._as_point_id(x), self._as_plane_id(pi)
        k = self.plane_local[ip, ix]
        if k < 0:
            raise PointNotOnPlane(f"point {ix} is not on plane {ip}")
        return self.pencils[ip, k].tolist()

    def planes_through(self, l) -> list[int]:
        return self.line_planes[self._as_line_id(l)].tolist()

    def lines_through(self, x) -> list[int]:
        return self.point_lines[self._as_point_id(x)].tolist()

    def lines_in(self, pi) -> list[int]:
        return self.plane_lines[self._as_plane_id(pi)].tolist()

    def points_of(self, l) -> list[int]:
        return self.line_points[self._as_line_id(l)].tolist()

    def line_of_mask(self, mask: np.ndarray) -> int | None:
        """Id of the line whose point set equals the boolean point mask, if any."""
        ids = np.flatnonzero(mask)
        if len(ids) != self.q + 1:
            return None
        l = self.line_id_through(int(ids[0]), int(ids[1]))
        return l if np.array_equal(self.line_points[l], ids) else None

    def fingerprint(self) -> str:
        """SHA-256 over all id-bearing tables."""
        h = hashlib.sha256()
        for a in (self.point_coords, self.line_points, self.line_pluecker,
                  self.line_planes, self.plane_lines, self.pencils):
            h.update(np.ascontiguousarray(a, dtype=np.int64).tobytes())
        return h.hexdigest()

    def __repr__(self):
        return f"Geometry(PG(3,{self.q}))"


def build_geometry(field: FieldSpec, max_q: int = GEOMETRY_MAX_Q) -> Geometry:
    if field.p == 2:
        raise EvenCharacteristic("q must be odd")
    if field.q > max_q or field.q > 13:
        raise FieldTooLarge(f"q={field.q} exceeds the geometry cap {min(max_q, 13)}")
    return Geometry(field)


# -- optional geometry cache file ---------------------------------------------

def geometry_header(field: FieldSpec) -> str:
    return f"pg3-geom v1 p={field.p} e={field.e} poly={field.poly_header}"


def write_geometry_cache(geom: Geometry, path) -> None:
    lines = [geometry_header(geom.field)]
    lines += [" ".join(str(c) for c in row) for row in geom.point_coords.tolist()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_geometry_cache(path) -> tuple[FieldSpec, list[tuple[int, ...]]]:
    text = Path(path).read_text().splitlines()
    if not text:
        raise GeometryCacheMismatch("empty geometry cache")
    parts = text[0].split(" ")
    if parts[:2] != ["pg3-geom", "v1"] or len(parts) != 5:
        raise GeometryCacheMismatch(f"bad header {text[0]!r}")
    kv = dict(p.split("=", 1) for p in parts[2:])
    field = make_field(int(kv["p"]), int(kv["e"]))
    if kv["poly"] != field.poly_header:
        raise GeometryCacheMismatch(f"poly={kv['poly']} differs from canonical {field.poly_header}")
    pts = [tuple(int(x) for x in row.split()) for row in text[1:] if row.strip()]
    return field, pts


def verify_geometry_cache(geom: Geometry, path) -> None:
    """Raise GeometryCacheMismatch unless the cache pins the same point ids."""
    field, pts = read_geometry_cache(path)
    if field != geom.field:
        raise GeometryCacheMismatch(f"cache is for GF({field.q}), geometry is GF({geom.q})")
    if pts != [tuple(r) for r in geom.point_coords.tolist()]:
        raise GeometryCacheMismatch("point id assignment differs from cache")
