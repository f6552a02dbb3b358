"""Recognizer for secant-line families of hyperbolic quadrics in PG(3,q), q odd.

A line family S is run through the pipeline

    P1 -> P2 -> per-plane analysis -> black structure -> conclusion

and the first failing stage produces a :class:`Violation` naming the failed
property (or lemma label) together with the smallest offending ids.  A
family passing every stage is either the secant family of a unique
hyperbolic quadric, recovered explicitly as a Gram matrix, or belongs to
the exceptional branch in which the black points form a single line.

Terminology: a point is *black* when it lies on q^2 lines of S; a plane is
*tangent* when it contains q^2 lines of S and *secant* when it contains
q(q+1)/2; the *pole* of a tangent plane is its unique point on no line of
S inside the plane.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import field as gf
from .family import LineFamily
from .quadric import Quadric, QuadricError, make_quadric, secant_family
from .space import Geometry

TANGENT = 1
SECANT = 2

SECANT_FAMILY = "SecantFamily"
HYPOTHETICAL_FAMILY = "HypotheticalFamily"
VIOLATION = "Violation"


@dataclass
class Violation:
    kind: str
    ids: dict = field(default_factory=dict)
    detail: str = ""

    def to_json(self) -> dict:
        return {"kind": self.kind, "ids": dict(self.ids), "detail": self.detail}

    def __str__(self):
        ids = " ".join(f"{k}={v}" for k, v in self.ids.items())
        return f"{self.kind} {ids}: {self.detail}" if ids else f"{self.kind}: {self.detail}"


class StructureViolation(Exception):
    def __init__(self, kind: str, ids: dict | None = None, detail: str = ""):
        self.violation = Violation(kind, dict(ids or {}), detail)
        super().__init__(str(self.violation))


class PreconditionError(ValueError):
    pass


def _half(q: int):
    return (q - 1) // 2, (q + 1) // 2


def _sizes(q: int):
    """(lines through a non-black point, lines through a black point)."""
    return q * (q + 1) // 2, q * q


# -- P1 / P2 -----------------------------------------------------------------------

@dataclass
class PointProfile:
    counts: np.ndarray
    black: np.ndarray

    @property
    def h_size(self) -> int:
        return int(self.black.sum())


@dataclass
class PlaneProfile:
    counts: np.ndarray
    plane_type: np.ndarray
    pencil_counts: np.ndarray  # [plane, local point index]

    def tangent_ids(self) -> list[int]:
        return np.flatnonzero(self.plane_type == TANGENT).tolist()

    def secant_ids(self) -> list[int]:
        return np.flatnonzero(self.plane_type == SECANT).tolist()


def point_counts(family: LineFamily) -> np.ndarray:
    g = family.geom
    return np.bincount(g.line_points[family.members].ravel(), minlength=g.n_points)


def plane_counts(family: LineFamily) -> np.ndarray:
    g = family.geom
    return np.bincount(g.line_planes[family.members].ravel(), minlength=g.n_planes)


def pencil_counts(family: LineFamily) -> np.ndarray:
    return family.members[family.geom.pencils].sum(axis=2)


def check_P1(family: LineFamily) -> PointProfile | Violation:
    q = family.geom.q
    low, high = _sizes(q)
    counts = point_counts(family)
    bad = np.flatnonzero((counts != low) & (counts != high))
    if len(bad):
        x = int(bad[0])
        return Violation("P1", {"point": x, "count": int(counts[x])},
                         f"point lies on {int(counts[x])} lines, allowed {low} or {high}")
    for value in (low, high):
        if not (counts == value).any():
            return Violation("P1", {"point": 0, "count": int(counts[0])},
                             f"no point lies on exactly {value} lines")
    black = counts == high
    black.setflags(write=False)
    return PointProfile(counts, black)


def check_P2(family: LineFamily) -> PlaneProfile | Violation:
    g = family.geom
    q = g.q
    low, high = _sizes(q)
    counts = plane_counts(family)
    bad = np.flatnonzero((counts != low) & (counts != high))
    if len(bad):
        p = int(bad[0])
        return Violation("P2", {"plane": p, "count": int(counts[p])},
                         f"plane contains {int(counts[p])} lines, allowed {low} or {high}")
    ptype = np.where(counts == high, TANGENT, SECANT)
    pc = pencil_counts(family)
    a, b = _half(q)
    ok = np.where((ptype == TANGENT)[:, None], np.isin(pc, (0, q)), np.isin(pc, (a, b, q)))
    if not ok.all():
        p, k = (int(v) for v in np.argwhere(~ok)[0])
        kind = "P2a" if ptype[p] == TANGENT else "P2b"
        allowed = "0 or q" if kind == "P2a" else "(q-1)/2, (q+1)/2 or q"
        return Violation(kind, {"plane": p, "point": int(g.plane_points[p, k]), "count": int(pc[p, k])},
                         f"pencil contains {int(pc[p, k])} lines, allowed {allowed}")
    return PlaneProfile(counts, ptype, pc)


# -- plane analysis ------------------------------------------------------------------

def _plane_row(family: LineFamily, plane: int, profile: PlaneProfile | None) -> np.ndarray:
    if profile is not None:
        return profile.pencil_counts[plane]
    return family.members[family.geom.pencils[plane]].sum(axis=1)


def analyze_tangent_plane(family: LineFamily, plane: int, profile: PlaneProfile | None = None) -> int:
    """Return the pole of a tangent plane, checking the pencil structure around it."""
    g = family.geom
    q = g.q
    in_plane = family.members[g.plane_lines[plane]]
    if int(in_plane.sum()) != q * q:
        raise PreconditionError(f"plane {plane} is not a tangent plane")
    row = _plane_row(family, plane, profile)
    zeros = np.flatnonzero(row == 0)
    if len(zeros) != 1:
        raise StructureViolation("size-a_pi", {"plane": plane, "points": g.plane_points[plane, zeros].tolist()},
                                 f"{len(zeros)} points on no line of the plane, expected exactly 1")
    off = np.flatnonzero((row != 0) & (row != q))
    if len(off):
        k = int(off[0])
        raise StructureViolation("size-a_pi", {"plane": plane, "point": int(g.plane_points[plane, k]),
                                               "count": int(row[k])},
                                 f"point on {int(row[k])} lines of the plane, expected {q}")
    k0 = int(zeros[0])
    pole = int(g.plane_points[plane, k0])
    outside = g.plane_lines[plane][~in_plane]
    if not np.array_equal(outside, g.pencils[plane, k0]):
        stray = sorted(set(outside.tolist()) - set(g.pencils[plane, k0].tolist()))
        raise StructureViolation("cor-pole", {"plane": plane, "pole": pole, "lines": stray},
                                 "non-member lines of the plane do not all pass through the pole")
    return pole


@dataclass
class SecantPlaneAnalysis:
    plane: int
    alpha: np.ndarray  # point masks over all point ids
    beta: np.ndarray
    gamma: np.ndarray
    triples: np.ndarray  # (|alpha(l)|, |beta(l)|, |gamma(l)|) per line of plane_lines[plane]

    def __iter__(self):
        return iter((self.alpha, self.beta, self.gamma))


def line_triples(q: int, row: np.ndarray, local: np.ndarray) -> np.ndarray:
    """Per-line counts of points in the three secant-plane classes.

    `row` holds in-plane counts per local point, `local` the local point
    indices of every line of the plane.
    """
    a, b = _half(q)
    c = row[local]
    return np.stack([(c == a).sum(-1), (c == b).sum(-1), (c == q).sum(-1)], axis=-1)


def admissible_triples(q: int) -> tuple[set, set]:
    """Allowed (alpha, beta, gamma) counts for member / non-member lines."""
    a, b = _half(q)
    return {(a, a, 2), (0, q, 1)}, {(b, b, 0), (q, 0, 1)}


def analyze_secant_plane(family: LineFamily, plane: int,
                         profile: PlaneProfile | None = None) -> SecantPlaneAnalysis:
    g = family.geom
    q = g.q
    a, b = _half(q)
    lines = g.plane_lines[plane]
    in_plane = family.members[lines]
    if int(in_plane.sum()) != q * (q + 1) // 2:
        raise PreconditionError(f"plane {plane} is not a secant plane")
    row = _plane_row(family, plane, profile)
    pts = g.plane_points[plane]
    off = np.flatnonzero(~np.isin(row, (a, b, q)))
    if len(off):
        k = int(off[0])
        raise StructureViolation("P2b", {"plane": plane, "point": int(pts[k]), "count": int(row[k])},
                                 "pencil count outside (q-1)/2, (q+1)/2, q")
    triples = line_triples(q, row, g.plane_line_local[plane])
    member_ok, other_ok = admissible_triples(q)
    for i, (l, m) in enumerate(zip(lines.tolist(), in_plane.tolist())):
        t = tuple(int(v) for v in triples[i])
        if t not in (member_ok if m else other_ok):
            raise StructureViolation("points-l", {"plane": plane, "line": l, "triple": list(t)},
                                     f"{'member' if m else 'non-member'} line has triple {t}, "
                                     f"admissible {sorted(member_ok if m else other_ok)}")
    gamma_l = triples[:, 2]
    if (gamma_l >= 3).any():
        i = int(np.flatnonzero(gamma_l >= 3)[0])
        raise StructureViolation("cor-arc", {"plane": plane, "line": int(lines[i])},
                                 "three collinear points in the count-q class")
    two = np.flatnonzero((gamma_l == 2) & ~in_plane)
    if len(two):
        raise StructureViolation("cor-arc", {"plane": plane, "line": int(lines[two[0]])},
                                 "line through two count-q points is not a member")
    n_alpha, n_beta, k = int((row == a).sum()), int((row == b).sum()), int((row == q).sum())
    if n_alpha != k * (k - 1) // 2:
        raise StructureViolation("recall", {"plane": plane, "alpha": n_alpha, "gamma": k},
                                 f"|alpha| = {n_alpha}, expected k(k-1)/2 = {k * (k - 1) // 2}")
    if k != q + 1:
        raise StructureViolation("lem-oval", {"plane": plane, "gamma": k}, f"|gamma| = {k}, expected {q + 1}")
    if not np.array_equal(in_plane, gamma_l == 2):
        i = int(np.flatnonzero(in_plane != (gamma_l == 2))[0])
        raise StructureViolation("lem-oval", {"plane": plane, "line": int(lines[i])},
                                 "members of the plane are not exactly the secants of the oval")
    if n_alpha != (q * q + q) // 2 or n_beta != (q * q - q) // 2:
        raise StructureViolation("size-alpha-beta", {"plane": plane, "alpha": n_alpha, "beta": n_beta},
                                 f"expected |alpha| = {(q * q + q) // 2}, |beta| = {(q * q - q) // 2}")
    masks = []
    for v in (a, b, q):
        m = np.zeros(g.n_points, dtype=bool)
        m[pts[row == v]] = True
        masks.append(m)
    return SecantPlaneAnalysis(plane, masks[0], masks[1], masks[2], triples)


def _analyze_plane(family, profile, plane):
    try:
        if profile.plane_type[plane] == TANGENT:
            return analyze_tangent_plane(family, plane, profile)
        return analyze_secant_plane(family, plane, profile)
    except StructureViolation as exc:
        return exc


def analyze_planes(family: LineFamily, profile: PlaneProfile, threads: int = 1) -> dict[int, int]:
    """Analyze every plane in id order; return the poles of the tangent planes.

    With threads > 1 all planes are analyzed concurrently and the violation
    of the smallest plane id is raised, matching the sequential result.
    """
    planes = range(family.geom.n_planes)
    work = lambda p: _analyze_plane(family, profile, p)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(work, planes))
    else:
        results = map(work, planes)
    poles = {}
    for p, res in zip(planes, results):
        if isinstance(res, StructureViolation):
            raise res
        if profile.plane_type[p] == TANGENT:
            poles[p] = res
    return poles


# -- black structure ------------------------------------------------------------------

@dataclass
class BlackStructure:
    lam: int
    mu: int
    black: np.ndarray
    black_lines: tuple[int, ...]
    poles: dict[int, int]
    tangent_shapes: dict[int, tuple[int, ...]]  # plane -> black lines making up its black set

    @property
    def h_size(self) -> int:
        return int(self.black.sum())


def secant_size_from_lambda(q: int, lam: int) -> int:
    return lam * (q * q - q) // 2 + (q**4 + q**3 + q**2 + q) // 2


def secant_size_from_mu(q: int, mu: int) -> int:
    return mu * (q * q - q) // 2 + (q**4 + 2 * q**2 + q) // 2


def black_line_ids(geom: Geometry, black: np.ndarray) -> np.ndarray:
    return np.flatnonzero(black[geom.line_points].all(axis=1))


def tangent_plane_shape(geom: Geometry, black: np.ndarray, plane: int) -> tuple[int, tuple[int, ...]]:
    """Classify the black points of a plane.

    Returns (case, black lines of the plane) where case is 1 for a single
    line, 2 for a line plus a point, 3 for two lines, 4 for the whole plane
    and 0 for anything else.
    """
    pts = geom.plane_points[plane]
    hp = black[pts]
    lines = geom.plane_lines[plane]
    full = black[geom.line_points[lines]].all(axis=1)
    bl = tuple(lines[full].tolist())
    n = int(hp.sum())
    if n == len(pts):
        return 4, bl
    covered = np.zeros(geom.n_points, dtype=bool)
    for l in bl:
        covered[geom.line_points[l]] = True
    extra = int(hp.sum()) - int(covered[pts].sum())
    if len(bl) == 1 and extra == 0:
        return 1, bl
    if len(bl) == 1 and extra == 1:
        return 2, bl
    if len(bl) == 2 and extra == 0:
        return 3, bl
    return 0, bl


def check_black_line_counts(family: LineFamily, black: np.ndarray) -> None:
    """Every line carries 0, 1, 2 or q+1 black points; two-point lines are members."""
    g = family.geom
    q = g.q
    b = black[g.line_points].sum(axis=1)
    bad = np.flatnonzero(~np.isin(b, (0, 1, 2, q + 1)))
    if len(bad):
        l = int(bad[0])
        raise StructureViolation("0-1-2-q+1", {"line": l, "black_points": int(b[l])},
                                 f"line carries {int(b[l])} black points")
    bad = np.flatnonzero((b == 2) & ~family.members)
    if len(bad):
        raise StructureViolation("0-1-2-q+1", {"line": int(bad[0]), "black_points": 2},
                                 "line with two black points is not a member")


def black_structure(family: LineFamily, points: PointProfile, planes: PlaneProfile,
                    poles: dict[int, int] | None = None) -> BlackStructure:
    g = family.geom
    q = g.q
    black = points.black
    s_size = len(family)
    tangent = planes.plane_type == TANGENT

    t = tangent[g.line_planes].sum(axis=1)
    b = black[g.line_points].sum(axis=1)
    bad = np.flatnonzero(t != b)
    if len(bad):
        l = int(bad[0])
        raise StructureViolation("lem-plane-point", {"line": l, "tangent_planes": int(t[l]), "black_points": int(b[l])},
                                 "tangent planes through the line differ from black points on it")

    on_plane_black = black[g.plane_points]
    stray = on_plane_black & (planes.pencil_counts != q) & ~tangent[:, None]
    if stray.any():
        p, k = (int(v) for v in np.argwhere(stray)[0])
        raise StructureViolation("lem-black", {"plane": p, "point": int(g.plane_points[p, k])},
                                 "black point of a secant plane outside the oval")

    per_plane = on_plane_black.sum(axis=1)
    sec_ids = np.flatnonzero(~tangent)
    tan_ids = np.flatnonzero(tangent)
    lam = int(per_plane[sec_ids[0]])
    diff = sec_ids[per_plane[sec_ids] != lam]
    if len(diff):
        raise StructureViolation("lem-black-secant", {"plane": int(diff[0]), "reference_plane": int(sec_ids[0])},
                                 f"{int(per_plane[diff[0]])} black points vs {lam}")
    if secant_size_from_lambda(q, lam) != s_size:
        raise StructureViolation("eq-4", {"lambda": lam, "s_size": s_size},
                                 f"{secant_size_from_lambda(q, lam)} != {s_size}")
    mu = int(per_plane[tan_ids[0]])
    diff = tan_ids[per_plane[tan_ids] != mu]
    if len(diff):
        raise StructureViolation("lem-black-tangent", {"plane": int(diff[0]), "reference_plane": int(tan_ids[0])},
                                 f"{int(per_plane[diff[0]])} black points vs {mu}")
    if secant_size_from_mu(q, mu) != s_size:
        raise StructureViolation("eq-5", {"mu": mu, "s_size": s_size},
                                 f"{secant_size_from_mu(q, mu)} != {s_size}")
    if mu != lam + q:
        raise StructureViolation("eq-6", {"lambda": lam, "mu": mu}, f"mu = {mu} != lambda + q = {lam + q}")

    check_black_line_counts(family, black)
    h = int(black.sum())
    if h != lam * (q + 1):
        raise StructureViolation("lem-size-H", {"h_size": h, "lambda": lam}, f"|H| = {h} != {lam * (q + 1)}")

    if poles is None:
        poles = {int(p): int(g.plane_points[p, np.flatnonzero(planes.pencil_counts[p] == 0)[0]])
                 for p in tan_ids}
    shapes = {}
    for p in tan_ids.tolist():
        hp = int(per_plane[p])
        min_hit = int(black[g.line_points[g.plane_lines[p]]].sum(axis=1).min())
        case, bl = tangent_plane_shape(g, black, p)
        if min_hit < 1 or hp < q + 1 or (hp == q + 1) != (case == 1):
            raise StructureViolation("bose-burton-plane", {"plane": p, "h_plane": hp},
                                     "black set of a tangent plane is not a blocking set of the expected form")
        if not bl:
            raise StructureViolation("exis-line", {"plane": p}, "tangent plane contains no black line")
        if case not in (1, 3):
            raise StructureViolation("to-use", {"plane": p, "case": case, "lines": list(bl)},
                                     "black set is neither a line nor two intersecting lines")
        if case == 3:
            x = np.intersect1d(g.line_points[bl[0]], g.line_points[bl[1]])
            if int(x[0]) != poles[p]:
                raise StructureViolation("pole-inters", {"plane": p, "pole": poles[p], "intersection": int(x[0])},
                                         "pole is not the intersection of the two black lines")
        shapes[p] = bl
    return BlackStructure(lam, mu, black, tuple(black_line_ids(g, black).tolist()), poles, shapes)


# -- generalized quadrangle and quadric recovery ----------------------------------------

def check_gq(geom: Geometry, point_mask: np.ndarray, line_ids, s: int, t: int) -> Violation | None:
    """Check the GQ(s,t) axioms for points `point_mask` and lines `line_ids`."""
    pts = np.flatnonzero(point_mask)
    lines = np.asarray(list(line_ids), dtype=np.int64)
    if len(lines) == 0:
        return Violation("GQ-Q1", {}, "no lines")
    K = point_mask[geom.line_points[lines]]
    on = K.sum(axis=1)
    if (on != s + 1).any():
        i = int(np.flatnonzero(on != s + 1)[0])
        return Violation("GQ-Q1", {"line": int(lines[i]), "points": int(on[i])}, f"line has {int(on[i])} points, expected {s + 1}")
    if not np.isin(geom.line_points[lines], pts).all():
        return Violation("GQ-Q1", {}, "a line leaves the point set")
    inc = np.zeros((len(pts), len(lines)), dtype=np.int64)  # point x line
    pos = np.full(geom.n_points, -1)
    pos[pts] = np.arange(len(pts))
    for j, l in enumerate(lines.tolist()):
        inc[pos[geom.line_points[l]], j] = 1
    deg = inc.sum(axis=1)
    if (deg != t + 1).any():
        i = int(np.flatnonzero(deg != t + 1)[0])
        return Violation("GQ-Q1", {"point": int(pts[i]), "lines": int(deg[i])}, f"point on {int(deg[i])} lines, expected {t + 1}")
    common = inc.T @ inc
    np.fill_diagonal(common, 0)
    if (common > 1).any():
        i, j = (int(v) for v in np.argwhere(common > 1)[0])
        return Violation("GQ-Q2", {"lines": [int(lines[i]), int(lines[j])]}, "two lines share more than one point")
    meets = (common > 0).astype(np.int64)
    through = inc @ meets  # [x, L] = lines through x meeting L
    bad = (inc == 0) & (through != 1)
    if bad.any():
        i, j = (int(v) for v in np.argwhere(bad)[0])
        return Violation("GQ-Q3", {"point": int(pts[i]), "line": int(lines[j]), "count": int(through[i, j])},
                         f"{int(through[i, j])} lines through the point meet the line, expected 1")
    return None


def split_rulings(geom: Geometry, line_ids) -> tuple[list[int], list[int]] | Violation:
    """Split lines into two classes of pairwise disjoint lines, every line of
    one class meeting every line of the other."""
    lines = list(line_ids)
    if not lines:
        return Violation("two-rulings", {}, "no black lines")
    sets = {l: set(geom.line_points[l].tolist()) for l in lines}
    first = lines[0]
    r1 = [l for l in lines if l == first or not (sets[l] & sets[first])]
    r2 = [l for l in lines if l != first and sets[l] & sets[first]]
    n = geom.q + 1
    if len(r1) != n or len(r2) != n:
        return Violation("two-rulings", {"sizes": [len(r1), len(r2)]}, f"classes of sizes {len(r1)}, {len(r2)}, expected {n}")
    for cls in (r1, r2):
        for i, a in enumerate(cls):
            for c in cls[i + 1:]:
                if sets[a] & sets[c]:
                    return Violation("two-rulings", {"lines": [a, c]}, "two lines of one ruling meet")
    for a in r1:
        for c in r2:
            if len(sets[a] & sets[c]) != 1:
                return Violation("two-rulings", {"lines": [a, c]}, "lines of different rulings do not meet")
    return r1, r2


_MONOMIALS = [(i, j) for i in range(4) for j in range(i, 4)]


def recover_gram(geom: Geometry, point_mask: np.ndarray) -> tuple[list[list[int]] | None, int]:
    """Solve for quadratic forms vanishing on the given points.

    Returns (normalized Gram matrix, dimension of the solution space); the
    matrix is None unless the solution space is one-dimensional.
    """
    F = geom.field
    rows = []
    for x in geom.point_coords[point_mask].tolist():
        rows.append([F.mul(x[i], x[j]) for i, j in _MONOMIALS])
    basis = gf.nullspace(F, rows, ncols=len(_MONOMIALS))
    if len(basis) != 1:
        return None, len(basis)
    coef = dict(zip(_MONOMIALS, basis[0]))
    half = F.inv(F.add(1, 1))
    G = [[0] * 4 for _ in range(4)]
    for (i, j), c in coef.items():
        if i == j:
            G[i][i] = c
        else:
            G[i][j] = G[j][i] = F.mul(c, half)
    lead = next(v for r in G for v in r if v)
    s = F.inv(lead)
    return [[F.mul(s, v) for v in r] for r in G], 1


# -- report ---------------------------------------------------------------------------

@dataclass
class CharaxReport:
    verdict: str
    s_size: int
    lam: int | None = None
    mu: int | None = None
    h_size: int | None = None
    violation: Violation | None = None
    quadric: Quadric | None = None
    black_lines: tuple[int, ...] = ()
    h_line: int | None = None

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "lambda": self.lam,
            "mu": self.mu,
            "h_size": self.h_size,
            "s_size": self.s_size,
            "witness": self.violation.to_json() if self.violation else None,
            "recovered_gram": self.quadric.gram_flat() if self.quadric else None,
        }

    def to_text(self) -> str:
        stat = lambda v: "-" if v is None else str(v)
        rows = [f"verdict={self.verdict}",
                f"lambda={stat(self.lam)} mu={stat(self.mu)} h_size={stat(self.h_size)} s_size={self.s_size}"]
        if self.violation:
            rows.append(f"violation={self.violation}")
        if self.quadric:
            rows.append("recovered_gram=" + ",".join(map(str, self.quadric.gram_flat())))
        if self.h_line is not None:
            rows.append(f"h_line={self.h_line}")
        return "\n".join(rows) + "\n"


def conclude(family: LineFamily, bs: BlackStructure) -> CharaxReport:
    """Final stage: decide the verdict from the black structure."""
    g = family.geom
    q = g.q
    s_size = len(family)
    stats = dict(s_size=s_size, lam=bs.lam, mu=bs.mu, h_size=bs.h_size)
    black = bs.black

    h_line = g.line_of_mask(black)
    if h_line is not None:
        if h_line in family:
            raise StructureViolation("hypothetical-line", {"line": h_line}, "black line is a member of the family")
        expected = (q**4 + q**3 + 2 * q * q) // 2
        if s_size != expected:
            raise StructureViolation("hypothetical-size", {"s_size": s_size}, f"|S| = {s_size}, expected {expected}")
        return CharaxReport(HYPOTHETICAL_FAMILY, h_line=h_line, black_lines=(h_line,), **stats)

    if bs.lam != q + 1 or bs.mu != 2 * q + 1:
        raise StructureViolation("size-S-H", {"lambda": bs.lam, "mu": bs.mu},
                                 f"expected lambda = {q + 1}, mu = {2 * q + 1}")
    if s_size != q * q * (q + 1) ** 2 // 2 or bs.h_size != (q + 1) ** 2:
        raise StructureViolation("size-S-H", {"s_size": s_size, "h_size": bs.h_size}, "sizes of S and H")
    lines = np.asarray(bs.black_lines, dtype=np.int64)
    per_point = np.bincount(g.line_points[lines].ravel(), minlength=g.n_points) if len(lines) else np.zeros(g.n_points, int)
    over = np.flatnonzero(black & (per_point > 2))
    if len(over):
        raise StructureViolation("black-line-3", {"point": int(over[0]), "black_lines": int(per_point[over[0]])},
                                 "black point on more than two black lines")
    off = np.flatnonzero(black & (per_point != 2))
    if len(off):
        raise StructureViolation("black-line-2", {"point": int(off[0]), "black_lines": int(per_point[off[0]])},
                                 "black point not on exactly two black lines")
    v = check_gq(g, black, bs.black_lines, q, 1)
    if v is not None:
        raise StructureViolation("GQ-axioms", {"axiom": v.kind, **v.ids}, v.detail)
    r = split_rulings(g, bs.black_lines)
    if isinstance(r, Violation):
        raise StructureViolation(r.kind, r.ids, r.detail)
    gram, dim = recover_gram(g, black)
    if gram is None:
        raise StructureViolation("hyperbolic", {"solution_dim": dim}, f"{dim}-dimensional space of forms vanishing on H")
    try:
        quad = make_quadric(g, gram)
    except QuadricError as exc:
        raise StructureViolation("hyperbolic", {}, f"recovered form rejected: {exc}") from None
    if not np.array_equal(quad.point_mask, black):
        raise StructureViolation("hyperbolic", {}, "recovered quadric has points outside H")
    expected = secant_family(quad)
    if not np.array_equal(expected.members, family.members):
        l = int(np.flatnonzero(expected.members != family.members)[0])
        raise StructureViolation("final-lemma", {"line": l}, "family differs from the secants of the recovered quadric")
    return CharaxReport(SECANT_FAMILY, quadric=quad, black_lines=bs.black_lines, **stats)


def reconstruct(family: LineFamily, threads: int = 1) -> CharaxReport:
    s_size = len(family)
    pp = check_P1(family)
    if isinstance(pp, Violation):
        return CharaxReport(VIOLATION, s_size=s_size, violation=pp)
    stats = dict(s_size=s_size, h_size=pp.h_size)
    pl = check_P2(family)
    if isinstance(pl, Violation):
        return CharaxReport(VIOLATION, violation=pl, **stats)
    try:
        poles = analyze_planes(family, pl, threads=threads)
        bs = black_structure(family, pp, pl, poles)
        return conclude(family, bs)
    except StructureViolation as exc:
        return CharaxReport(VIOLATION, violation=exc.violation, **stats)
