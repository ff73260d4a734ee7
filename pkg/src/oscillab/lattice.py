"""Finite grid domains, cell-mass measures, and axis-aligned box families.

Everything downstream reduces integrals to weighted sums over cells and
suprema to maxima over a finite family of boxes.  Sums go through one
correctly rounded primitive and every family carries a canonical order,
so repeated runs are bit-reproducible.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import BadParams, EmptyBase, ZeroMass, ZeroMassBaseSet

BASE_KINDS = ("dyadic-cubes", "all-cubes", "dyadic-rectangles", "all-rectangles")
DYADIC_KINDS = ("dyadic-cubes", "dyadic-rectangles")
CUBE_KINDS = ("dyadic-cubes", "all-cubes")
RECTANGLE_KINDS = ("dyadic-rectangles", "all-rectangles")


def fsum(values) -> float:
    """Correctly rounded sum of an array, iterated in canonical row-major order.

    The result is the true real sum rounded once, so independent code paths
    that add the same multiset of cell values agree bit for bit.
    """
    arr = np.ascontiguousarray(values, dtype=float)
    return math.fsum(arr.ravel().tolist())


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridDomain:
    """Finite grid of cells; each side is a power of two.

    ``split`` tags a 2-d grid as the product of two one-axis factors, the
    shape rectangle bases are built over.
    """

    sides: tuple[int, ...]
    split: tuple[int, int] | None = None

    def __post_init__(self):
        sides = tuple(int(s) for s in self.sides)
        object.__setattr__(self, "sides", sides)
        if not 1 <= len(sides) <= 2:
            raise BadParams(f"only 1-d and 2-d grids are supported, got dims={len(sides)}")
        for s in sides:
            if not _is_pow2(s):
                raise BadParams(f"every side must be a power of two, got {s}")
        if self.split is not None:
            split = tuple(int(x) for x in self.split)
            object.__setattr__(self, "split", split)
            if len(sides) != 2 or sum(split) != 2 or min(split) < 1:
                raise BadParams(f"split must be (1, 1) on a 2-d grid, got {split}")

    @property
    def dims(self) -> int:
        return len(self.sides)

    @property
    def num_cells(self) -> int:
        n = 1
        for s in self.sides:
            n *= s
        return n

    def levels(self) -> tuple[int, ...]:
        return tuple(s.bit_length() - 1 for s in self.sides)

    def max_level(self) -> int:
        return max(self.levels())

    def full_box(self) -> "BaseSet":
        return BaseSet((0,) * self.dims, self.sides)

    def to_dict(self) -> dict:
        d: dict = {"sides": list(self.sides)}
        if self.split is not None:
            d["split"] = list(self.split)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GridDomain":
        split = d.get("split")
        return cls(tuple(d["sides"]), tuple(split) if split else None)


@dataclass(frozen=True)
class BaseSet:
    """Half-open axis-aligned box of whole cells: lo <= cell < hi."""

    lo: tuple[int, ...]
    hi: tuple[int, ...]

    def __post_init__(self):
        lo = tuple(int(x) for x in self.lo)
        hi = tuple(int(x) for x in self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if len(lo) != len(hi) or not lo:
            raise BadParams(f"corner ranks differ: {lo} vs {hi}")
        if any(l < 0 for l in lo) or any(h <= l for l, h in zip(lo, hi)):
            raise BadParams(f"empty or negative box {lo}..{hi}")

    @property
    def dims(self) -> int:
        return len(self.lo)

    def sides(self) -> tuple[int, ...]:
        return tuple(h - l for l, h in zip(self.lo, self.hi))

    def cell_count(self) -> int:
        n = 1
        for s in self.sides():
            n *= s
        return n

    def slices(self) -> tuple[slice, ...]:
        return tuple(slice(l, h) for l, h in zip(self.lo, self.hi))

    def contains_cell(self, cell: tuple[int, ...]) -> bool:
        return all(l <= c < h for l, c, h in zip(self.lo, cell, self.hi))

    def contains_box(self, other: "BaseSet") -> bool:
        return all(l <= ol and oh <= h
                   for l, h, ol, oh in zip(self.lo, self.hi, other.lo, other.hi))

    def is_dyadic(self) -> bool:
        """Corner and side aligned to the side's own scale, per axis."""
        return all(_is_pow2(s) and l % s == 0 for l, s in zip(self.lo, self.sides()))

    def sort_key(self):
        # Canonical order: scale descending, then lexicographic corner.
        return tuple(-s for s in self.sides()), self.lo

    def label(self) -> str:
        return "x".join(f"{l}:{h}" for l, h in zip(self.lo, self.hi))

    def to_dict(self) -> dict:
        return {"lo": list(self.lo), "hi": list(self.hi)}

    @classmethod
    def from_dict(cls, d: dict) -> "BaseSet":
        return cls(tuple(d["lo"]), tuple(d["hi"]))


@dataclass(frozen=True, eq=False)
class Measure:
    """Nonnegative mass per cell with positive total.

    ``kind`` is a provenance tag: uniform, density-over-uniform, or general.
    """

    domain: GridDomain
    masses: np.ndarray
    kind: str = "general"

    def __post_init__(self):
        masses = np.ascontiguousarray(self.masses, dtype=float)
        if masses.shape != self.domain.sides:
            raise BadParams(f"mass shape {masses.shape} != domain {self.domain.sides}")
        if not np.all(np.isfinite(masses)) or np.any(masses < 0):
            raise BadParams("masses must be finite and nonnegative")
        if fsum(masses) <= 0.0:
            raise BadParams("total mass must be positive")
        masses.setflags(write=False)
        object.__setattr__(self, "masses", masses)

    @classmethod
    def uniform(cls, domain: GridDomain) -> "Measure":
        return cls(domain, np.ones(domain.sides), kind="uniform")

    @classmethod
    def density(cls, domain: GridDomain, density: np.ndarray) -> "Measure":
        """Density times the uniform unit cell mass."""
        return cls(domain, np.asarray(density, dtype=float), kind="density-over-uniform")

    @classmethod
    def general(cls, domain: GridDomain, masses: np.ndarray) -> "Measure":
        return cls(domain, np.asarray(masses, dtype=float), kind="general")

    @property
    def total_mass(self) -> float:
        return fsum(self.masses)

    @property
    def digest(self) -> str:
        cached = getattr(self, "_digest", None)
        if cached is None:
            h = hashlib.sha256()
            h.update(repr(self.domain.sides).encode())
            h.update(self.kind.encode())
            h.update(self.masses.tobytes())
            cached = h.hexdigest()[:16]
            object.__setattr__(self, "_digest", cached)
        return cached

    def mass_of(self, box: BaseSet) -> float:
        return fsum(self.masses[box.slices()])


@dataclass(frozen=True, eq=False)
class BaseFamily:
    """Canonically ordered family of boxes attached to one domain.

    Each member has positive measure for the measure it was built against;
    zero-mass candidates are dropped (and counted) at construction.
    """

    kind: str
    domain: GridDomain
    min_scale: int
    sets: tuple[BaseSet, ...]
    dropped_zero_mass: int = 0
    _mass_cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def base_id(self) -> str:
        cached = getattr(self, "_base_id", None)
        if cached is None:
            h = hashlib.sha256()
            token = json.dumps(
                {"kind": self.kind, "domain": self.domain.to_dict(),
                 "min_scale": self.min_scale, "n": len(self.sets)},
                sort_keys=True)
            h.update(token.encode())
            cached = h.hexdigest()[:12]
            object.__setattr__(self, "_base_id", cached)
        return cached

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    def full_domain_member(self) -> BaseSet | None:
        full = self.domain.full_box()
        return full if full in set(self.sets) else None

    def set_masses(self, measure: Measure) -> np.ndarray:
        """Per-set measure, aligned with ``sets``; cached per measure digest."""
        key = measure.digest
        got = self._mass_cache.get(key)
        if got is None:
            got = np.array([fsum(measure.masses[b.slices()]) for b in self.sets])
            got.setflags(write=False)
            self._mass_cache[key] = got
        return got

    def to_dict(self) -> dict:
        return {"kind": self.kind, "domain": self.domain.to_dict(),
                "min_scale": self.min_scale}


def _axis_dyadic_intervals(side: int, min_scale: int):
    out = []
    level = side.bit_length() - 1
    for s in range(min_scale, level + 1):
        step = 1 << s
        for lo in range(0, side, step):
            out.append((lo, lo + step))
    return out


def _axis_all_intervals(side: int, min_len: int):
    out = []
    for length in range(min_len, side + 1):
        for lo in range(0, side - length + 1):
            out.append((lo, lo + length))
    return out


def _candidate_sets(domain: GridDomain, kind: str, min_scale: int) -> list[BaseSet]:
    sides = domain.sides
    if kind == "dyadic-cubes":
        if domain.dims == 1:
            return [BaseSet((lo,), (hi,))
                    for lo, hi in _axis_dyadic_intervals(sides[0], min_scale)]
        if sides[0] != sides[1]:
            raise BadParams("dyadic-cubes in 2-d needs a square domain "
                            "(the full domain must itself be a cube)")
        out = []
        level = sides[0].bit_length() - 1
        for s in range(min_scale, level + 1):
            step = 1 << s
            for i in range(0, sides[0], step):
                for j in range(0, sides[1], step):
                    out.append(BaseSet((i, j), (i + step, j + step)))
        return out
    if kind == "all-cubes":
        min_len = 1 << min_scale
        if domain.dims == 1:
            return [BaseSet((lo,), (hi,))
                    for lo, hi in _axis_all_intervals(sides[0], min_len)]
        out = []
        for length in range(min_len, min(sides) + 1):
            for i in range(0, sides[0] - length + 1):
                for j in range(0, sides[1] - length + 1):
                    out.append(BaseSet((i, j), (i + length, j + length)))
        return out
    # Rectangle kinds: product of one interval per factor of the split.
    if domain.dims != 2 or domain.split is None:
        raise BadParams(f"{kind} needs a 2-d domain with a declared split")
    if kind == "dyadic-rectangles":
        ax0 = _axis_dyadic_intervals(sides[0], min_scale)
        ax1 = _axis_dyadic_intervals(sides[1], min_scale)
    else:
        min_len = 1 << min_scale
        ax0 = _axis_all_intervals(sides[0], min_len)
        ax1 = _axis_all_intervals(sides[1], min_len)
    return [BaseSet((a0, b0), (a1, b1)) for a0, a1 in ax0 for b0, b1 in ax1]


def build_base(domain: GridDomain, measure: Measure, kind: str,
               min_scale: int = 0) -> BaseFamily:
    """Enumerate every box of the requested kind with positive measure.

    Zero-mass candidates are dropped (counted in ``dropped_zero_mass``);
    a zero-mass *mandated* member (the full domain, for dyadic kinds)
    raises ``ZeroMassBaseSet`` instead.  The result is sorted canonically:
    scale descending, then lexicographic corner.
    """
    if kind not in BASE_KINDS:
        raise BadParams(f"unknown base kind {kind!r}")
    if measure.domain != domain:
        raise BadParams("measure was built for a different domain")
    if min_scale < 0:
        raise BadParams("min_scale must be >= 0")
    usable = min(domain.sides) if kind in CUBE_KINDS else max(domain.sides)
    if (1 << min_scale) > usable:
        raise BadParams(f"min_scale {min_scale} exceeds the domain scale")

    candidates = _candidate_sets(domain, kind, min_scale)
    full = domain.full_box()
    kept, dropped = [], 0
    for b in candidates:
        if fsum(measure.masses[b.slices()]) > 0.0:
            kept.append(b)
        else:
            if kind in DYADIC_KINDS and b == full:
                raise ZeroMassBaseSet("the full domain is mandated for dyadic "
                                      "kinds but has zero mass")
            dropped += 1
    if not kept:
        raise EmptyBase("no base set has positive mass")
    kept.sort(key=BaseSet.sort_key)
    return BaseFamily(kind=kind, domain=domain, min_scale=min_scale,
                      sets=tuple(kept), dropped_zero_mass=dropped)


def average(f: np.ndarray, box: BaseSet, measure: Measure) -> float:
    """Measure-weighted mean of ``f`` over ``box``, correctly rounded."""
    sl = box.slices()
    mass = fsum(measure.masses[sl])
    if mass <= 0.0:
        raise ZeroMass(f"set {box.label()} has zero mass")
    f = np.asarray(f, dtype=float)
    return fsum(f[sl] * measure.masses[sl]) / mass


def weighted_box_sum(f: np.ndarray, box: BaseSet, weights: np.ndarray) -> float:
    """Correctly rounded sum of f * weights over the box."""
    sl = box.slices()
    return fsum(np.asarray(f, dtype=float)[sl] * weights[sl])


def iter_dyadic_boxes(domain: GridDomain, min_scale: int = 0):
    """All products of per-axis dyadic intervals (the full dyadic lattice).

    For 1-d this is the binary tree of intervals; for 2-d it includes
    mixed-scale boxes, which is the lattice single-axis doubling lives on.
    """
    per_axis = [_axis_dyadic_intervals(s, min_scale) for s in domain.sides]
    if domain.dims == 1:
        for lo, hi in per_axis[0]:
            yield BaseSet((lo,), (hi,))
    else:
        for a0, a1 in per_axis[0]:
            for b0, b1 in per_axis[1]:
                yield BaseSet((a0, b0), (a1, b1))


def axis_parent(box: BaseSet, axis: int, domain: GridDomain) -> BaseSet | None:
    """Dyadic father of ``box`` along one axis (side doubled), or None at the top."""
    s = box.sides()[axis]
    if not (_is_pow2(s) and box.lo[axis] % s == 0):
        raise BadParams(f"{box.label()} is not dyadic along axis {axis}")
    if 2 * s > domain.sides[axis]:
        return None
    lo = list(box.lo)
    hi = list(box.hi)
    lo[axis] = (box.lo[axis] // (2 * s)) * (2 * s)
    hi[axis] = lo[axis] + 2 * s
    return BaseSet(tuple(lo), tuple(hi))


def simultaneous_children(box: BaseSet) -> list[BaseSet]:
    """Bisect every axis with at least two cells, preserving the aspect ratio.

    Returns [] for a single cell.  If only one axis is still divisible the
    step degenerates to a single bisection.
    """
    splittable = [a for a, s in enumerate(box.sides()) if s >= 2]
    if not splittable:
        return []
    pieces = [box]
    for a in splittable:
        nxt = []
        for b in pieces:
            mid = b.lo[a] + (b.hi[a] - b.lo[a]) // 2
            lo1, hi1 = list(b.lo), list(b.hi)
            hi1[a] = mid
            lo2, hi2 = list(b.lo), list(b.hi)
            lo2[a] = mid
            nxt.append(BaseSet(tuple(lo1), tuple(hi1)))
            nxt.append(BaseSet(tuple(lo2), tuple(hi2)))
        pieces = nxt
    pieces.sort(key=BaseSet.sort_key)
    return pieces


# ---------------------------------------------------------------------------
# Serialization: cell fields as CSV, descriptors as JSON.

def write_field_csv(path, domain: GridDomain, values: np.ndarray) -> None:
    """Header line ``dims,side0[,side1]`` then one value per cell, row-major."""
    values = np.asarray(values, dtype=float)
    if values.shape != domain.sides:
        raise BadParams(f"value shape {values.shape} != domain {domain.sides}")
    lines = [",".join([str(domain.dims)] + [str(s) for s in domain.sides])]
    lines.extend(repr(float(v)) for v in values.ravel(order="C"))
    Path(path).write_text("\n".join(lines) + "\n")


def read_field_csv(path) -> tuple[GridDomain, np.ndarray]:
    text = Path(path).read_text()
    rows = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not rows:
        raise BadParams(f"{path}: empty field file")
    head = rows[0].split(",")
    try:
        dims = int(head[0])
        sides = tuple(int(x) for x in head[1:])
    except ValueError as exc:
        raise BadParams(f"{path}: bad header {rows[0]!r}") from exc
    if len(sides) != dims:
        raise BadParams(f"{path}: header says dims={dims} but lists {len(sides)} sides")
    domain = GridDomain(sides)
    flat: list[float] = []
    for ln in rows[1:]:
        flat.extend(float(tok) for tok in ln.replace(",", " ").split())
    if len(flat) != domain.num_cells:
        raise BadParams(f"{path}: expected {domain.num_cells} cells, got {len(flat)}")
    return domain, np.array(flat).reshape(domain.sides)


def write_domain_json(path, domain: GridDomain) -> None:
    Path(path).write_text(json.dumps(domain.to_dict(), sort_keys=True, indent=2) + "\n")


def read_domain_json(path) -> GridDomain:
    return GridDomain.from_dict(json.loads(Path(path).read_text()))
