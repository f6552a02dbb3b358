"""Line families (candidate sets S) and the text family file format.

File layout::

    pg3-family v1 p=<p> e=<e> poly=<c0,...> n=<count>
    <line id>
    ...

Line ids are decimal, strictly increasing, one per row.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .field import FieldError, make_field
from .space import Geometry, build_geometry


class FamilyFormatError(ValueError):
    pass


@dataclass(eq=False)
class LineFamily:
    geom: Geometry
    members: np.ndarray  # bool, one entry per line id

    def __post_init__(self):
        m = np.asarray(self.members, dtype=bool)
        if m.shape != (self.geom.n_lines,):
            raise ValueError(f"member mask must have length {self.geom.n_lines}")
        m = m.copy()
        m.setflags(write=False)
        self.members = m

    @classmethod
    def from_ids(cls, geom: Geometry, ids) -> "LineFamily":
        mask = np.zeros(geom.n_lines, dtype=bool)
        ids = np.asarray(list(ids), dtype=np.int64)
        if ids.size and (ids.min() < 0 or ids.max() >= geom.n_lines):
            raise ValueError("line id out of range")
        mask[ids] = True
        return cls(geom, mask)

    @classmethod
    def empty(cls, geom: Geometry) -> "LineFamily":
        return cls(geom, np.zeros(geom.n_lines, dtype=bool))

    @classmethod
    def full(cls, geom: Geometry) -> "LineFamily":
        return cls(geom, np.ones(geom.n_lines, dtype=bool))

    def ids(self) -> list[int]:
        return np.flatnonzero(self.members).tolist()

    def __len__(self):
        return int(self.members.sum())

    def __contains__(self, line_id) -> bool:
        return bool(self.members[int(line_id)])

    def __eq__(self, other):
        if not isinstance(other, LineFamily):
            return NotImplemented
        return self.geom is other.geom and np.array_equal(self.members, other.members)

    def __repr__(self):
        return f"LineFamily(PG(3,{self.geom.q}), |S|={len(self)})"

    def swapped(self, remove, add) -> "LineFamily":
        mask = self.members.copy()
        for l in remove:
            if not mask[l]:
                raise ValueError(f"line {l} is not a member")
            mask[l] = False
        for l in add:
            if mask[l]:
                raise ValueError(f"line {l} is already a member")
            mask[l] = True
        return LineFamily(self.geom, mask)


def perturb(family: LineFamily, swaps: int, seed: int = 0) -> LineFamily:
    """Swap `swaps` members for non-members, chosen by a seeded shuffle."""
    rng = random.Random(seed)
    inside = family.ids()
    outside = np.flatnonzero(~family.members).tolist()
    if swaps > min(len(inside), len(outside)):
        raise ValueError(f"cannot perform {swaps} swaps")
    rng.shuffle(inside)
    rng.shuffle(outside)
    return family.swapped(sorted(inside[:swaps]), sorted(outside[:swaps]))


def random_family(geom: Geometry, size: int, seed: int = 0) -> LineFamily:
    rng = random.Random(seed)
    return LineFamily.from_ids(geom, rng.sample(range(geom.n_lines), size))


# -- file format ----------------------------------------------------------------

def family_header(family: LineFamily) -> str:
    F = family.geom.field
    return f"pg3-family v1 p={F.p} e={F.e} poly={F.poly_header} n={len(family)}"


def dumps_family(family: LineFamily) -> str:
    rows = [family_header(family)] + [str(i) for i in family.ids()]
    return "\n".join(rows) + "\n"


def write_family(family: LineFamily, path) -> None:
    Path(path).write_text(dumps_family(family))


def parse_header(line: str) -> dict:
    parts = line.rstrip("\n").split(" ")
    if len(parts) < 2 or parts[0] != "pg3-family":
        raise FamilyFormatError("bad header: magic must be 'pg3-family'")
    if parts[1] != "v1":
        raise FamilyFormatError(f"bad header field version: {parts[1]!r}")
    fields = {}
    for tok in parts[2:]:
        key, sep, val = tok.partition("=")
        if not sep:
            raise FamilyFormatError(f"bad header token {tok!r}")
        fields[key] = val
    for key in ("p", "e", "poly", "n"):
        if key not in fields:
            raise FamilyFormatError(f"bad header: missing field {key}")
    out = {}
    for key in ("p", "e", "n"):
        try:
            out[key] = int(fields[key])
        except ValueError:
            raise FamilyFormatError(f"bad header field {key}: {fields[key]!r}") from None
    out["poly"] = fields["poly"]
    return out


def loads_family(text: str, geom: Geometry | None = None) -> LineFamily:
    rows = text.split("\n")
    if rows and rows[-1] == "":
        rows.pop()
    if not rows:
        raise FamilyFormatError("empty family file")
    hdr = parse_header(rows[0])
    try:
        field = make_field(hdr["p"], hdr["e"], max_q=13)
    except FieldError as exc:
        raise FamilyFormatError(f"bad header field p/e: {exc}") from None
    if hdr["poly"] != field.poly_header:
        raise FamilyFormatError(f"bad header field poly: {hdr['poly']!r} (expected {field.poly_header!r})")
    if geom is None:
        geom = build_geometry(field)
    elif geom.field != field:
        raise FamilyFormatError(f"bad header field p/e: file is GF({field.q}), geometry is GF({geom.q})")
    ids = []
    for k, row in enumerate(rows[1:], start=2):
        if not row.isdigit():
            raise FamilyFormatError(f"line {k}: not a decimal line id: {row!r}")
        v = int(row)
        if v >= geom.n_lines:
            raise FamilyFormatError(f"line {k}: line id {v} out of range")
        if ids and v == ids[-1]:
            raise FamilyFormatError(f"line {k}: duplicate line id {v}")
        if ids and v < ids[-1]:
            raise FamilyFormatError(f"line {k}: ids not strictly increasing")
        ids.append(v)
    if len(ids) != hdr["n"]:
        raise FamilyFormatError(f"bad header field n: declares {hdr['n']}, body has {len(ids)}")
    return LineFamily.from_ids(geom, ids)


def read_family(path, geom: Geometry | None = None) -> LineFamily:
    return loads_family(Path(path).read_text(), geom)
