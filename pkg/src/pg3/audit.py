"""Exhaustive lemma audit over concrete line families.

Every registered check recomputes its quantities directly from incidence
counts (it does not reuse the recognizer's stage results), so the audit is
an independent cross-check of :mod:`pg3.charax`.  Checks are keyed by the
labels of the lemmas they verify.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from . import charax
from .family import LineFamily
from .field import FieldError, field_of_order
from .quadric import QuadricError, make_quadric, secant_family, standard_hyperbolic, transformed_quadric
from .space import Geometry, GeometryError, build_geometry

SAMPLE_FROM_Q = 11
SAMPLE_FRACTION = 0.1
SAMPLE_SEED = 0


class GeometryMissing(ValueError):
    pass


class NotAFailure(ValueError):
    pass


@dataclass
class Failure:
    witness: dict
    lhs: object
    rhs: object
    relation: str
    message: str = ""


@dataclass
class Outcome:
    cases: int
    failure: Failure | None = None
    notes: dict = field(default_factory=dict)


@dataclass
class LemmaCheck:
    name: str
    scope: str
    status: str
    counterexample: dict
    cases_checked: int
    notes: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "scope": self.scope, "status": self.status,
                "counterexample": self.counterexample, "cases_checked": self.cases_checked,
                "notes": self.notes}


@dataclass(frozen=True)
class Lemma:
    name: str
    statement: str
    run: Callable[["AuditContext"], Outcome]
    plane_scoped: bool = False


REGISTRY: list[Lemma] = []


def lemma(name: str, statement: str, plane_scoped: bool = False):
    def deco(fn):
        REGISTRY.append(Lemma(name, statement, fn, plane_scoped))
        return fn
    return deco


def lemma_by_name(name: str) -> Lemma:
    for lem in REGISTRY:
        if lem.name == name:
            return lem
    raise KeyError(name)


class AuditContext:
    """Counts of one family, computed once and shared by all checks."""

    def __init__(self, family: LineFamily, planes: np.ndarray | None = None):
        g = self.geom = family.geom
        self.family = family
        q = self.q = g.q
        self.a, self.b = (q - 1) // 2, (q + 1) // 2
        self.low, self.high = q * (q + 1) // 2, q * q
        self.members = family.members
        self.s_size = int(family.members.sum())
        self.scope = np.ones(g.n_planes, dtype=bool)
        if planes is not None:
            self.scope[:] = False
            self.scope[planes] = True

    @cached_property
    def point_counts(self):
        return charax.point_counts(self.family)

    @cached_property
    def black(self):
        return self.point_counts == self.high

    @cached_property
    def plane_counts(self):
        return charax.plane_counts(self.family)

    @cached_property
    def tangent(self):
        return self.plane_counts == self.high

    @cached_property
    def secant(self):
        return self.plane_counts == self.low

    def tangent_ids(self):
        return np.flatnonzero(self.tangent & self.scope)

    def secant_ids(self):
        return np.flatnonzero(self.secant & self.scope)

    @cached_property
    def pencil(self):
        return charax.pencil_counts(self.family)

    @cached_property
    def in_plane(self):
        return self.members[self.geom.plane_lines]

    @cached_property
    def triples(self):
        g = self.geom
        c = self.pencil[np.arange(g.n_planes)[:, None, None], g.plane_line_local]
        return np.stack([(c == self.a).sum(-1), (c == self.b).sum(-1), (c == self.q).sum(-1)], axis=-1)

    @cached_property
    def black_on_line(self):
        return self.black[self.geom.line_points].sum(axis=1)

    @cached_property
    def black_in_plane(self):
        return self.black[self.geom.plane_points]

    @cached_property
    def black_per_plane(self):
        return self.black_in_plane.sum(axis=1)

    @cached_property
    def poles(self):
        """Pole of each plane with exactly one zero pencil, else -1."""
        g = self.geom
        zero = self.pencil == 0
        out = np.full(g.n_planes, -1)
        one = zero.sum(axis=1) == 1
        out[one] = g.plane_points[one, np.argmax(zero[one], axis=1)]
        return out

    @cached_property
    def black_lines(self):
        return charax.black_line_ids(self.geom, self.black)

    @cached_property
    def shapes(self):
        return {int(p): charax.tangent_plane_shape(self.geom, self.black, int(p)) for p in self.tangent_ids()}

    @cached_property
    def theta(self):
        """Lines of S meeting each plane in exactly one point, counted through its points."""
        g = self.geom
        return (self.point_counts[g.plane_points] - self.pencil).sum(axis=1)

    @cached_property
    def recovered(self):
        gram, dim = charax.recover_gram(self.geom, self.black)
        if gram is None:
            return None, f"{dim}-dimensional solution space"
        try:
            return make_quadric(self.geom, gram), ""
        except QuadricError as exc:
            return None, str(exc)


def _first(mask) -> int | None:
    idx = np.flatnonzero(mask)
    return int(idx[0]) if len(idx) else None


# -- hypotheses -----------------------------------------------------------------------

@lemma("P1", "every point lies on q(q+1)/2 or q^2 lines of S, and both counts occur")
def _p1(ctx):
    c = ctx.point_counts
    x = _first((c != ctx.low) & (c != ctx.high))
    if x is not None:
        return Outcome(len(c), Failure({"point": x}, int(c[x]), [ctx.low, ctx.high], "in"))
    for v in (ctx.low, ctx.high):
        if not (c == v).any():
            return Outcome(len(c), Failure({"value": v}, 0, 0, ">", "no point attains this count"))
    return Outcome(len(c))


@lemma("P2", "every plane contains q(q+1)/2 or q^2 lines of S")
def _p2(ctx):
    c = ctx.plane_counts
    p = _first((c != ctx.low) & (c != ctx.high))
    if p is not None:
        return Outcome(len(c), Failure({"plane": p}, int(c[p]), [ctx.low, ctx.high], "in"))
    return Outcome(len(c))


def _pencil_check(ctx, planes, allowed):
    rows = ctx.pencil[planes]
    ok = np.isin(rows, allowed)
    if not ok.all():
        i, k = (int(v) for v in np.argwhere(~ok)[0])
        p = int(planes[i])
        return Outcome(rows.size, Failure({"plane": p, "point": int(ctx.geom.plane_points[p, k])},
                                          int(rows[i, k]), list(allowed), "in"))
    return Outcome(rows.size)


@lemma("P2a", "pencils of a plane with q^2 lines of S contain 0 or q of them", plane_scoped=True)
def _p2a(ctx):
    return _pencil_check(ctx, ctx.tangent_ids(), (0, ctx.q))


@lemma("P2b", "pencils of a plane with q(q+1)/2 lines of S contain (q-1)/2, (q+1)/2 or q of them",
       plane_scoped=True)
def _p2b(ctx):
    return _pencil_check(ctx, ctx.secant_ids(), (ctx.a, ctx.b, ctx.q))


# -- tangent and secant planes --------------------------------------------------------

@lemma("lem-plane-point", "tangent planes through a line = black points on the line")
def _plane_point(ctx):
    t = ctx.tangent[ctx.geom.line_planes].sum(axis=1)
    b = ctx.black_on_line
    l = _first(t != b)
    if l is not None:
        return Outcome(len(t), Failure({"line": l}, int(t[l]), int(b[l]), "==", "tangent planes vs black points"))
    return Outcome(len(t))


@lemma("both-plane-types-exist", "tangent and secant planes both exist")
def _both_types(ctx):
    nt, ns = int(ctx.tangent.sum()), int(ctx.secant.sum())
    if nt == 0 or ns == 0:
        return Outcome(1, Failure({}, [nt, ns], [">0", ">0"], ">", "tangent / secant plane counts"))
    return Outcome(1, notes={"tangent": nt, "secant": ns})


@lemma("cor-plane", "every line of a tangent plane carries a black point", plane_scoped=True)
def _cor_plane(ctx):
    g = ctx.geom
    planes = ctx.tangent_ids()
    hits = ctx.black_on_line[g.plane_lines[planes]]
    if (hits == 0).any():
        i, k = (int(v) for v in np.argwhere(hits == 0)[0])
        return Outcome(hits.size, Failure({"plane": int(planes[i]), "line": int(g.plane_lines[planes[i], k])},
                                          0, 1, ">="))
    return Outcome(hits.size)


@lemma("cor-plane-1", "every black point lies in some tangent plane")
def _cor_plane_1(ctx):
    pts = np.flatnonzero(ctx.black)
    has = ctx.geom.incidence[pts][:, ctx.tangent].any(axis=1)
    x = _first(~has)
    if x is not None:
        return Outcome(len(pts), Failure({"point": int(pts[x])}, 0, 1, ">=", "tangent planes through the point"))
    return Outcome(len(pts))


@lemma("size-a_pi", "a tangent plane has exactly one point on no line of S inside it, "
       "the other q^2+q points lie on q such lines", plane_scoped=True)
def _size_a(ctx):
    planes = ctx.tangent_ids()
    for p in planes.tolist():
        row = ctx.pencil[p]
        zeros = int((row == 0).sum())
        on_q = int((row == ctx.q).sum())
        if zeros != 1 or on_q != ctx.q * ctx.q + ctx.q:
            return Outcome(len(planes), Failure({"plane": p}, [zeros, on_q], [1, ctx.q * ctx.q + ctx.q], "=="))
    return Outcome(len(planes))


@lemma("cor-pole", "the non-member lines of a tangent plane are the lines through its pole", plane_scoped=True)
def _cor_pole(ctx):
    g = ctx.geom
    n = 0
    for p in ctx.tangent_ids().tolist():
        pole = int(ctx.poles[p])
        if pole < 0:
            continue
        n += 1
        outside = sorted(g.plane_lines[p][~ctx.in_plane[p]].tolist())
        pencil = g.pencil(pole, p)
        if outside != pencil:
            return Outcome(n, Failure({"plane": p, "pole": pole}, outside, pencil, "=="))
    return Outcome(n)


@lemma("points-l", "class counts (alpha, beta, gamma) on a line of a secant plane take one of the "
       "two admissible triples for its membership", plane_scoped=True)
def _points_l(ctx):
    g = ctx.geom
    member_ok, other_ok = charax.admissible_triples(ctx.q)
    seen = Counter()
    n = 0
    for p in ctx.secant_ids().tolist():
        for k, l in enumerate(g.plane_lines[p].tolist()):
            t = tuple(int(v) for v in ctx.triples[p, k])
            m = bool(ctx.in_plane[p, k])
            n += 1
            seen[("member" if m else "non-member", t)] += 1
            ok = member_ok if m else other_ok
            if t not in ok:
                return Outcome(n, Failure({"plane": p, "line": l}, list(t), sorted(ok), "in",
                                          "member line" if m else "non-member line"))
    return Outcome(n, notes={f"{k[0]} {k[1]}": v for k, v in sorted(seen.items())})


@lemma("cor-arc", "the count-q points of a secant plane form an arc and its secants are members",
       plane_scoped=True)
def _cor_arc(ctx):
    planes = ctx.secant_ids()
    g = ctx.geom
    for p in planes.tolist():
        gl = ctx.triples[p, :, 2]
        if int((ctx.pencil[p] == ctx.q).sum()) == 0:
            return Outcome(len(planes), Failure({"plane": p}, 0, 1, ">=", "arc is empty"))
        k = _first(gl >= 3)
        if k is not None:
            return Outcome(len(planes), Failure({"plane": p, "line": int(g.plane_lines[p, k])}, int(gl[k]), 2, "<="))
        k = _first((gl == 2) & ~ctx.in_plane[p])
        if k is not None:
            return Outcome(len(planes), Failure({"plane": p, "line": int(g.plane_lines[p, k])}, False, True, "==",
                                                "secant of the arc is a member"))
    return Outcome(len(planes))


@lemma("recall", "|alpha| = k(k-1)/2 where k = |gamma| in a secant plane", plane_scoped=True)
def _recall(ctx):
    planes = ctx.secant_ids()
    for p in planes.tolist():
        row = ctx.pencil[p]
        k = int((row == ctx.q).sum())
        na = int((row == ctx.a).sum())
        if na != k * (k - 1) // 2:
            return Outcome(len(planes), Failure({"plane": p}, na, k * (k - 1) // 2, "=="))
    return Outcome(len(planes))


@lemma("lem-oval", "gamma of a secant plane is an oval and the members inside the plane are "
       "exactly its secant lines", plane_scoped=True)
def _lem_oval(ctx):
    planes = ctx.secant_ids()
    g = ctx.geom
    for p in planes.tolist():
        k = int((ctx.pencil[p] == ctx.q).sum())
        if k != ctx.q + 1:
            return Outcome(len(planes), Failure({"plane": p}, k, ctx.q + 1, "==", "|gamma|"))
        sec = ctx.triples[p, :, 2] == 2
        j = _first(sec != ctx.in_plane[p])
        if j is not None:
            return Outcome(len(planes), Failure({"plane": p, "line": int(g.plane_lines[p, j])},
                                                bool(ctx.in_plane[p, j]), bool(sec[j]), "==",
                                                "membership vs secant of gamma"))
    return Outcome(len(planes))


@lemma("size-alpha-beta", "|alpha| = (q^2+q)/2 and |beta| = (q^2-q)/2 in a secant plane", plane_scoped=True)
def _size_ab(ctx):
    planes = ctx.secant_ids()
    q = ctx.q
    for p in planes.tolist():
        row = ctx.pencil[p]
        got = [int((row == ctx.a).sum()), int((row == ctx.b).sum())]
        want = [(q * q + q) // 2, (q * q - q) // 2]
        if got != want:
            return Outcome(len(planes), Failure({"plane": p}, got, want, "=="))
    return Outcome(len(planes))


# -- black points ---------------------------------------------------------------------

def _black_in_secant(ctx):
    g = ctx.geom
    planes = ctx.secant_ids()
    bp = ctx.black_in_plane[planes]
    return planes, bp, ctx.pencil[planes]


@lemma("lem-black", "black points of a secant plane lie on its oval", plane_scoped=True)
def _lem_black(ctx):
    planes, bp, rows = _black_in_secant(ctx)
    bad = bp & (rows != ctx.q)
    if bad.any():
        i, k = (int(v) for v in np.argwhere(bad)[0])
        p = int(planes[i])
        return Outcome(int(bp.sum()), Failure({"plane": p, "point": int(ctx.geom.plane_points[p, k])},
                                              int(rows[i, k]), ctx.q, "==", "in-plane lines through the black point"))
    return Outcome(int(bp.sum()))


@lemma("coro-lem-black", "a black point of a secant plane lies on exactly q member lines of that plane",
       plane_scoped=True)
def _coro_lem_black(ctx):
    g = ctx.geom
    planes, bp, _ = _black_in_secant(ctx)
    n = 0
    for i, p in enumerate(planes.tolist()):
        for k in np.flatnonzero(bp[i]).tolist():
            x = int(g.plane_points[p, k])
            through = int(ctx.members[g.pencil(x, p)].sum())
            n += 1
            if through != ctx.q:
                return Outcome(n, Failure({"plane": p, "point": x}, through, ctx.q, "=="))
    return Outcome(n)


@lemma("coro-black", "a secant plane holds at most q+1 black points", plane_scoped=True)
def _coro_black(ctx):
    planes = ctx.secant_ids()
    lam = ctx.black_per_plane[planes]
    i = _first(lam > ctx.q + 1)
    if i is not None:
        return Outcome(len(planes), Failure({"plane": int(planes[i])}, int(lam[i]), ctx.q + 1, "<="))
    return Outcome(len(planes))


@lemma("lem-black-secant", "the number of black points is the same in every secant plane "
       "(and the single-point lines through it satisfy the double count)", plane_scoped=True)
def _black_secant(ctx):
    q = ctx.q
    planes = ctx.secant_ids()
    if not len(planes):
        return Outcome(0)
    lam = ctx.black_per_plane[planes]
    for i, p in enumerate(planes.tolist()):
        want = int(lam[i]) * (q * q - q) // 2 + q**3 * (q + 1) // 2
        if int(ctx.theta[p]) != want:
            return Outcome(i + 1, Failure({"plane": p}, int(ctx.theta[p]), want, "==",
                                          "lines of S meeting the plane in one point"))
        if lam[i] != lam[0]:
            return Outcome(i + 1, Failure({"plane": p, "reference_plane": int(planes[0])}, int(lam[i]), int(lam[0]), "=="))
    return Outcome(len(planes), notes={"lambda": int(lam[0])})


@lemma("eq-4", "lambda (q^2-q)/2 + (q^4+q^3+q^2+q)/2 = |S|", plane_scoped=True)
def _eq4(ctx):
    planes = ctx.secant_ids()
    for i, p in enumerate(planes.tolist()):
        lhs = charax.secant_size_from_lambda(ctx.q, int(ctx.black_per_plane[p]))
        if lhs != ctx.s_size:
            return Outcome(i + 1, Failure({"plane": p}, lhs, ctx.s_size, "=="))
    return Outcome(len(planes))


@lemma("lem-black-tangent", "the number of black points is the same in every tangent plane, "
       "with the double count holding whether or not the pole is black", plane_scoped=True)
def _black_tangent(ctx):
    q = ctx.q
    planes = ctx.tangent_ids()
    if not len(planes):
        return Outcome(0)
    mu = ctx.black_per_plane[planes]
    cases = Counter()
    half = q * (q + 1) // 2 - q
    for i, p in enumerate(planes.tolist()):
        m = int(mu[i])
        pole = int(ctx.poles[p])
        if pole >= 0 and ctx.black[pole]:
            cases["pole black"] += 1
            want = q * q + (m - 1) * (q * q - q) + (q * q + q + 1 - m) * half
        else:
            cases["pole not black"] += 1
            want = m * (q * q - q) + q * (q + 1) // 2 + (q * q + q - m) * half
        closed = m * (q * q - q) // 2 + (q**4 + q) // 2
        if int(ctx.theta[p]) != want or want != closed:
            return Outcome(i + 1, Failure({"plane": p}, int(ctx.theta[p]), [want, closed], "==",
                                          "lines of S meeting the plane in one point"))
        if m != mu[0]:
            return Outcome(i + 1, Failure({"plane": p, "reference_plane": int(planes[0])}, m, int(mu[0]), "=="))
    return Outcome(len(planes), notes={"mu": int(mu[0]), **cases})


@lemma("eq-5", "mu (q^2-q)/2 + (q^4+2q^2+q)/2 = |S|", plane_scoped=True)
def _eq5(ctx):
    planes = ctx.tangent_ids()
    for i, p in enumerate(planes.tolist()):
        lhs = charax.secant_size_from_mu(ctx.q, int(ctx.black_per_plane[p]))
        if lhs != ctx.s_size:
            return Outcome(i + 1, Failure({"plane": p}, lhs, ctx.s_size, "=="))
    return Outcome(len(planes))


@lemma("eq-6", "mu = lambda + q", plane_scoped=True)
def _eq6(ctx):
    sec, tan = ctx.secant_ids(), ctx.tangent_ids()
    if not len(sec):
        return Outcome(0)
    lam = int(ctx.black_per_plane[sec[0]])
    for i, p in enumerate(tan.tolist()):
        mu = int(ctx.black_per_plane[p])
        if mu != lam + ctx.q:
            return Outcome(i + 1, Failure({"plane": p, "reference_plane": int(sec[0])}, mu, lam + ctx.q, "=="))
    return Outcome(len(tan))


@lemma("0-1-2-q+1", "a line carries 0, 1, 2 or q+1 black points, and one with exactly two is a member")
def _zero_one_two(ctx):
    b = ctx.black_on_line
    l = _first(~np.isin(b, (0, 1, 2, ctx.q + 1)))
    if l is not None:
        return Outcome(len(b), Failure({"line": l}, int(b[l]), [0, 1, 2, ctx.q + 1], "in", "part (i)"))
    l = _first((b == 2) & ~ctx.members)
    if l is not None:
        return Outcome(len(b), Failure({"line": l}, False, True, "==", "part (ii): two black points, membership"))
    return Outcome(len(b), notes={f"{k} black": int((b == k).sum()) for k in (0, 1, 2, ctx.q + 1)})


@lemma("lem-size-H", "|H| = lambda (q+1) <= (q+1)^2, counted through the planes on an external line "
       "of each secant plane's oval", plane_scoped=True)
def _size_h(ctx):
    g = ctx.geom
    q = ctx.q
    h = int(ctx.black.sum())
    planes = ctx.secant_ids()
    for i, p in enumerate(planes.tolist()):
        k = _first(ctx.triples[p, :, 2] == 0)
        if k is None:
            return Outcome(i + 1, Failure({"plane": p}, 0, 1, ">=", "external lines of the oval"))
        l = int(g.plane_lines[p, k])
        through = g.line_planes[l]
        if not ctx.secant[through].all() or ctx.black_on_line[l]:
            return Outcome(i + 1, Failure({"plane": p, "line": l}, int(ctx.secant[through].sum()), q + 1, "==",
                                          "secant planes through an external line"))
        total = int(ctx.black_per_plane[through].sum())
        lam = int(ctx.black_per_plane[p])
        if total != h or h != lam * (q + 1) or h > (q + 1) ** 2:
            return Outcome(i + 1, Failure({"plane": p, "line": l}, [total, h], [h, lam * (q + 1)], "==",
                                          "black points over the planes through the line"))
    return Outcome(len(planes), notes={"h_size": h})


@lemma("bose-burton-plane", "the black set of a tangent plane blocks every line of the plane, so it has "
       "at least q+1 points, with equality exactly when it is a line", plane_scoped=True)
def _bose_burton(ctx):
    g = ctx.geom
    q = ctx.q
    planes = ctx.tangent_ids()
    for i, p in enumerate(planes.tolist()):
        hits = ctx.black_on_line[g.plane_lines[p]]
        size = int(ctx.black_per_plane[p])
        is_line = g.line_of_mask(ctx.black & g.incidence[:, p]) is not None
        if hits.min() < 1:
            return Outcome(i + 1, Failure({"plane": p, "line": int(g.plane_lines[p, int(np.argmin(hits))])},
                                          0, 1, ">=", "black points on the line"))
        if size < q + 1 or (size == q + 1) != is_line:
            return Outcome(i + 1, Failure({"plane": p}, [size, is_line], [q + 1, size == q + 1], "==",
                                          "size of the black set and whether it is a line"))
    return Outcome(len(planes))


@lemma("exis-line", "the black set of a tangent plane contains a line", plane_scoped=True)
def _exis_line(ctx):
    planes = ctx.tangent_ids()
    for i, p in enumerate(planes.tolist()):
        if not ctx.shapes[p][1]:
            return Outcome(i + 1, Failure({"plane": p}, 0, 1, ">=", "black lines in the plane"))
    return Outcome(len(planes))


@lemma("to-use", "the black set of a tangent plane is a line or two intersecting lines; a line plus a "
       "point and the whole plane never occur", plane_scoped=True)
def _to_use(ctx):
    planes = ctx.tangent_ids()
    seen = Counter()
    for i, p in enumerate(planes.tolist()):
        case, lines = ctx.shapes[p]
        seen[f"case {case}"] += 1
        if case not in (1, 3):
            return Outcome(i + 1, Failure({"plane": p, "lines": list(lines)}, case, [1, 3], "in", "shape case"))
    return Outcome(len(planes), notes=dict(sorted(seen.items())))


@lemma("pole-inters", "when the black set of a tangent plane is two lines, the pole is their meet",
       plane_scoped=True)
def _pole_inters(ctx):
    g = ctx.geom
    n = 0
    for p in ctx.tangent_ids().tolist():
        case, lines = ctx.shapes[p]
        if case != 3:
            continue
        n += 1
        x = int(np.intersect1d(g.line_points[lines[0]], g.line_points[lines[1]])[0])
        if int(ctx.poles[p]) != x:
            return Outcome(n, Failure({"plane": p, "pole": int(ctx.poles[p]), "point": x}, int(ctx.poles[p]), x, "=="))
    return Outcome(n)


def _black_line_degree(ctx):
    g = ctx.geom
    pts = np.flatnonzero(ctx.black)
    deg = np.bincount(g.line_points[ctx.black_lines].ravel(), minlength=g.n_points)
    return pts, deg[pts]


@lemma("black-line-3", "a black point lies on at most two black lines")
def _black_line_3(ctx):
    pts, deg = _black_line_degree(ctx)
    i = _first(deg > 2)
    if i is not None:
        return Outcome(len(pts), Failure({"point": int(pts[i])}, int(deg[i]), 2, "<="))
    return Outcome(len(pts))


@lemma("black-line-2", "a black point lies on exactly two black lines")
def _black_line_2(ctx):
    pts, deg = _black_line_degree(ctx)
    i = _first(deg != 2)
    if i is not None:
        return Outcome(len(pts), Failure({"point": int(pts[i])}, int(deg[i]), 2, "=="))
    return Outcome(len(pts))


@lemma("size-S-H", "|S| = q^2(q+1)^2/2 and |H| = (q+1)^2 when tangent planes hold two black lines")
def _size_s_h(ctx):
    q = ctx.q
    got = [ctx.s_size, int(ctx.black.sum())]
    want = [q * q * (q + 1) ** 2 // 2, (q + 1) ** 2]
    if got != want:
        return Outcome(1, Failure({}, got, want, "=="))
    return Outcome(1)


@lemma("GQ-axioms", "black points and black lines satisfy (Q1) (Q2) (Q3) for a GQ of order (q,1)")
def _gq(ctx):
    pts = int(ctx.black.sum())
    nl = len(ctx.black_lines)
    v = charax.check_gq(ctx.geom, ctx.black, ctx.black_lines, ctx.q, 1)
    cases = pts + nl + pts * nl
    if v is not None:
        return Outcome(cases, Failure({"axiom": v.kind, **v.ids}, v.detail, "holds", "==", v.kind))
    return Outcome(cases)


@lemma("two-rulings", "the black lines split into two classes of q+1 pairwise disjoint lines")
def _rulings(ctx):
    nl = len(ctx.black_lines)
    r = charax.split_rulings(ctx.geom, ctx.black_lines.tolist())
    if isinstance(r, charax.Violation):
        return Outcome(max(nl * (nl - 1) // 2, 1), Failure(dict(r.ids), r.detail, "two rulings", "=="))
    return Outcome(nl * (nl - 1) // 2)


@lemma("hyperbolic", "the black points are the point set of a hyperbolic quadric")
def _hyperbolic(ctx):
    quad, why = ctx.recovered
    if quad is None:
        return Outcome(1, Failure({}, why, "hyperbolic quadric", "=="))
    if not np.array_equal(quad.point_mask, ctx.black):
        x = _first(quad.point_mask != ctx.black)
        return Outcome(1, Failure({"point": x}, bool(ctx.black[x]), bool(quad.point_mask[x]), "==",
                                  "black vs on recovered quadric"))
    return Outcome(1, notes={"gram": quad.gram_flat()})


@lemma("final-lemma", "S is exactly the set of secant lines of the recovered quadric")
def _final(ctx):
    quad, why = ctx.recovered
    if quad is None:
        return Outcome(1, Failure({}, why, "hyperbolic quadric", "==", "no quadric recovered"))
    sec = secant_family(quad).members
    l = _first(sec != ctx.members)
    if l is not None:
        return Outcome(1, Failure({"line": l}, bool(ctx.members[l]), bool(sec[l]), "==", "member vs secant"))
    return Outcome(ctx.geom.n_lines)


# -- driver ---------------------------------------------------------------------------

def geometry_for(q: int) -> Geometry:
    try:
        return build_geometry(field_of_order(q, max_q=13))
    except (FieldError, GeometryError) as exc:
        raise GeometryMissing(f"no geometry for q={q}: {exc}") from None


def default_families(geom: Geometry, seeds: int = 10) -> list[LineFamily]:
    fams = [secant_family(standard_hyperbolic(geom))]
    fams += [secant_family(transformed_quadric(geom, s)) for s in range(seeds)]
    return fams


def sampled_planes(geom: Geometry) -> np.ndarray | None:
    if geom.q < SAMPLE_FROM_Q:
        return None
    k = math.ceil(SAMPLE_FRACTION * geom.n_planes)
    return np.array(sorted(random.Random(SAMPLE_SEED).sample(range(geom.n_planes), k)))


def _run_family(family: LineFamily, planes) -> list[Outcome]:
    ctx = AuditContext(family, planes)
    return [lem.run(ctx) for lem in REGISTRY]


def run_audit(q: int | Geometry, families: list[LineFamily] | None = None, seeds: int = 10,
              threads: int = 1) -> list[LemmaCheck]:
    geom = q if isinstance(q, Geometry) else geometry_for(q)
    if families is None:
        families = default_families(geom, seeds)
    if not families:
        raise ValueError("no families to audit")
    for f in families:
        if f.geom.field != geom.field:
            raise GeometryMissing(f"family over PG(3,{f.geom.q}) audited at q={geom.q}")
    planes = sampled_planes(geom)
    work = lambda f: _run_family(f, planes)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            per_family = list(pool.map(work, families))
    else:
        per_family = [work(f) for f in families]

    checks = []
    for i, lem in enumerate(REGISTRY):
        sampled = planes is not None and lem.plane_scoped
        scope = f"q={geom.q} families={len(families)} " + ("sampled" if sampled else "exhaustive")
        cases = 0
        counter = {}
        notes = {}
        for fi, outs in enumerate(per_family):
            out = outs[i]
            cases += out.cases
            if out.failure is not None and not counter:
                fl = out.failure
                counter = {"family": fi, "witness": fl.witness, "lhs": fl.lhs, "rhs": fl.rhs,
                           "relation": fl.relation, "message": fl.message}
            if fi == 0:
                notes = out.notes
        status = "fail" if counter else "pass"
        if not counter and cases == 0:
            status, counter = "fail", {"family": None, "witness": {}, "message": "vacuous: no cases checked"}
        checks.append(LemmaCheck(lem.name, scope, status, counter, cases, notes))
    return checks


def all_passed(checks: list[LemmaCheck]) -> bool:
    return all(c.status == "pass" for c in checks)


def format_checks(checks: list[LemmaCheck]) -> str:
    rows = []
    for c in checks:
        rows.append(f"{c.status.upper():4} {c.name:24} cases={c.cases_checked} [{c.scope}]")
    return "\n".join(rows) + "\n"


def _describe(geom: Geometry, key: str, value) -> str:
    if key in ("point", "pole", "intersection") and isinstance(value, int) and value >= 0:
        return f"{key} {value} = {geom.point(value).coords}"
    if key in ("plane", "reference_plane") and isinstance(value, int):
        return f"{key} {value} = dual {geom.plane(value).dual_coords}"
    if key == "line" and isinstance(value, int):
        ln = geom.line(value)
        return f"line {value} = points {list(ln.point_ids)} pluecker {ln.pluecker}"
    if key == "lines" and isinstance(value, list):
        return "lines " + "; ".join(f"{l}: {list(geom.line(l).point_ids)}" for l in value)
    if key == "points" and isinstance(value, list):
        return "points " + "; ".join(f"{x}: {geom.point(x).coords}" for x in value)
    return f"{key} = {value}"


def replay(check: LemmaCheck, family: LineFamily) -> str:
    """Re-run a failed check on `family` and render the witness."""
    if check.status != "fail":
        raise NotAFailure(f"check {check.name} did not fail")
    lem = lemma_by_name(check.name)
    geom = family.geom
    out = lem.run(AuditContext(family, sampled_planes(geom) if lem.plane_scoped else None))
    rows = [f"lemma {lem.name}: {lem.statement}", f"family |S|={len(family)} over PG(3,{geom.q})"]
    if out.failure is None:
        rows.append(f"not reproduced on this family ({out.cases} cases pass)")
        if check.counterexample.get("message"):
            rows.append(f"recorded: {check.counterexample['message']}")
        return "\n".join(rows) + "\n"
    f = out.failure
    rows.append("witness:")
    rows += [f"  {_describe(geom, k, v)}" for k, v in f.witness.items()]
    if f.message:
        rows.append(f"  ({f.message})")
    holds = {"==": f.lhs == f.rhs, "<=": _le(f.lhs, f.rhs), ">=": _le(f.rhs, f.lhs), ">": False,
             "in": f.lhs in f.rhs if isinstance(f.rhs, list) else False}.get(f.relation, False)
    rows.append(f"violated: {f.lhs} {f.relation} {f.rhs} is {holds}")
    return "\n".join(rows) + "\n"


def _le(a, b):
    try:
        return a <= b
    except TypeError:
        return False
