"""Finite boxes of the integer lattice and the discrete calculus on them.

Fields live on the box {x in Z^N : max_i |x_i| <= R} and are extended by
zero outside, which makes the discrete Laplacian the Dirichlet one.  Site
enumeration is lexicographic in the coordinates (axis 0 most significant),
so index arithmetic matches row-major reshapes and Kronecker assembly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidInputError


@dataclass(frozen=True)
class BoxDomain:
    """Truncation box {max-norm <= radius} of Z^N with a fixed site order."""

    dimension: int
    radius: int

    def __post_init__(self):
        if self.dimension < 1:
            raise InvalidInputError(f"dimension must be >= 1, got {self.dimension}")
        if self.radius < 0:
            raise InvalidInputError(f"radius must be >= 0, got {self.radius}")

    @property
    def side(self) -> int:
        return 2 * self.radius + 1

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.side,) * self.dimension

    @property
    def site_count(self) -> int:
        return self.side ** self.dimension

    @cached_property
    def sites(self) -> np.ndarray:
        """All sites as an (site_count, N) int array in enumeration order."""
        grids = np.meshgrid(*[np.arange(-self.radius, self.radius + 1)] * self.dimension,
                            indexing="ij")
        out = np.stack([g.ravel() for g in grids], axis=1)
        out.flags.writeable = False
        return out

    @cached_property
    def squared_norms(self) -> np.ndarray:
        """Euclidean |x|^2 per site."""
        out = (self.sites.astype(np.int64) ** 2).sum(axis=1).astype(float)
        out.flags.writeable = False
        return out

    @cached_property
    def graph_norms(self) -> np.ndarray:
        """Graph (l1) distance to the origin per site."""
        out = np.abs(self.sites.astype(np.int64)).sum(axis=1).astype(float)
        out.flags.writeable = False
        return out

    def contains(self, site) -> bool:
        site = np.asarray(site, dtype=int)
        if site.shape != (self.dimension,):
            raise InvalidInputError(
                f"site has shape {site.shape}, expected ({self.dimension},)")
        return bool(np.all(np.abs(site) <= self.radius))

    def index_of(self, site) -> int:
        """Enumeration index of an in-box site."""
        site = np.asarray(site, dtype=int)
        if not self.contains(site):
            raise InvalidInputError(f"site {tuple(site)} outside box of radius {self.radius}")
        return int(np.ravel_multi_index(tuple(site + self.radius), self.shape))

    def site_of(self, index: int) -> np.ndarray:
        if not 0 <= index < self.site_count:
            raise InvalidInputError(f"index {index} out of range [0, {self.site_count})")
        return np.array(np.unravel_index(index, self.shape)) - self.radius


@dataclass(frozen=True)
class LatticeField:
    """Real field on a box, implicitly zero outside it."""

    box: BoxDomain
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.box.site_count,):
            raise InvalidInputError(
                f"values have shape {values.shape}, expected ({self.box.site_count},)")
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("field values must be finite (no NaN/Inf)")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def grid(self) -> np.ndarray:
        """Values reshaped to the (side,)*N grid (read-only view)."""
        return self.values.reshape(self.box.shape)

    def at(self, site) -> float:
        """Value at a site, 0 outside the box."""
        site = np.asarray(site, dtype=int)
        if site.shape != (self.box.dimension,):
            raise InvalidInputError(
                f"site has shape {site.shape}, expected ({self.box.dimension},)")
        if not np.all(np.abs(site) <= self.box.radius):
            return 0.0
        return float(self.values[self.box.index_of(site)])


def zero_field(box: BoxDomain) -> LatticeField:
    return LatticeField(box, np.zeros(box.site_count))


def delta_field(box: BoxDomain, site=None) -> LatticeField:
    """Indicator of a single site (the origin by default)."""
    values = np.zeros(box.site_count)
    site = np.zeros(box.dimension, dtype=int) if site is None else np.asarray(site, dtype=int)
    values[box.index_of(site)] = 1.0
    return LatticeField(box, values)


def _check_same_box(u: LatticeField, v: LatticeField):
    if u.box != v.box:
        raise InvalidInputError("fields live on different boxes")


def _padded(u: LatticeField) -> np.ndarray:
    return np.pad(u.grid, 1)


def laplacian_apply(u: LatticeField) -> LatticeField:
    """Discrete Laplacian  (Delta u)(x) = sum_{y~x} (u(y) - u(x)),  u = 0 off-box.

    Summed as neighbor differences, so constant fields give exact zeros at
    interior sites.
    """
    gp = _padded(u)
    n = u.box.dimension
    core = tuple(slice(1, -1) for _ in range(n))
    out = np.zeros(u.box.shape)
    for axis in range(n):
        for step in (1, -1):
            sl = list(core)
            sl[axis] = slice(1 + step, gp.shape[axis] - 1 + step)
            out += gp[tuple(sl)] - u.grid
    return LatticeField(u.box, out.ravel())


def carre_du_champ(u: LatticeField, site, v: LatticeField | None = None) -> float:
    """Pointwise gradient form  Gamma(u,v)(x) = 1/2 sum_{y~x} (u(y)-u(x))(v(y)-v(x)).

    With v omitted this is the squared gradient length Gamma(u)(x).  The site
    must lie inside the box; neighbors outside contribute through the zero
    extension.
    """
    if v is None:
        v = u
    _check_same_box(u, v)
    site = np.asarray(site, dtype=int)
    if not u.box.contains(site):
        raise InvalidInputError(f"site {tuple(site)} outside box")
    ux, vx = u.at(site), v.at(site)
    total = 0.0
    for axis in range(u.box.dimension):
        for step in (1, -1):
            y = site.copy()
            y[axis] += step
            total += (u.at(y) - ux) * (v.at(y) - vx)
    return 0.5 * total


def dirichlet_form(u: LatticeField, v: LatticeField) -> float:
    """Bilinear Dirichlet form: sum over lattice edges meeting the box of
    (u(y)-u(x))(v(y)-v(x)).  Equals (-Delta u, v)_2 by summation by parts."""
    _check_same_box(u, v)
    gu, gv = _padded(u), _padded(v)
    total = 0.0
    for axis in range(u.box.dimension):
        total += float(np.sum(np.diff(gu, axis=axis) * np.diff(gv, axis=axis)))
    return total


def dirichlet_energy(u: LatticeField) -> float:
    """Total squared gradient, summed over the box enlarged by one layer."""
    return dirichlet_form(u, u)


def lp_norm(u: LatticeField, p: float) -> float:
    """Counting-measure l^p norm; p = inf gives the max of |u|."""
    if p == np.inf:
        return float(np.max(np.abs(u.values))) if u.values.size else 0.0
    if p < 1:
        raise InvalidInputError(f"p must satisfy p >= 1 or p = inf, got {p}")
    return float(np.sum(np.abs(u.values) ** p) ** (1.0 / p))


def inner_l2(u: LatticeField, v: LatticeField) -> float:
    _check_same_box(u, v)
    return float(u.values @ v.values)


def translate(u: LatticeField, shift) -> LatticeField:
    """Shifted field  result(x) = u(x + shift),  truncated to the same box."""
    shift = np.asarray(shift, dtype=int)
    if shift.shape != (u.box.dimension,):
        raise InvalidInputError(
            f"shift has shape {shift.shape}, expected ({u.box.dimension},)")
    out = np.zeros(u.box.shape)
    src = []
    dst = []
    side = u.box.side
    for s in shift:
        # destination index d maps to source index d + s
        lo, hi = max(0, -s), min(side, side - s)
        if lo >= hi:
            return zero_field(u.box)
        dst.append(slice(lo, hi))
        src.append(slice(lo + s, hi + s))
    out[tuple(dst)] = u.grid[tuple(src)]
    return LatticeField(u.box, out.ravel())


def write_field(u: LatticeField, path) -> None:
    """Dump one line per site: "x_1 ... x_N value" in enumeration order."""
    with open(path, "w", encoding="utf-8") as fh:
        for site, value in zip(u.box.sites, u.values):
            coords = " ".join(str(int(c)) for c in site)
            fh.write(f"{coords} {value:.17g}\n")


def read_field(path) -> LatticeField:
    """Read a field dump back; box geometry is inferred from the sites."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            rows.append(([int(t) for t in parts[:-1]], float(parts[-1])))
    if not rows:
        raise InvalidInputError(f"empty field file: {path}")
    dimension = len(rows[0][0])
    radius = max(max(abs(c) for c in site) for site, _ in rows)
    box = BoxDomain(dimension, radius)
    if len(rows) != box.site_count:
        raise InvalidInputError(
            f"field file has {len(rows)} sites, expected {box.site_count} "
            f"for a radius-{radius} box in dimension {dimension}")
    values = np.empty(box.site_count)
    for site, value in rows:
        values[box.index_of(site)] = value
    return LatticeField(box, values)
