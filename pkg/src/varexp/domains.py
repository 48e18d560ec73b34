"""Domains, measurable regions and deterministic quadrature grids.

Points are real coordinate arrays of shape ``(m, d)``.  Planar points may
also be given as complex numbers, ``x + iy``; :func:`as_points` converts.

The unit disk carries the normalized measure ``dA = dx dy / pi`` so that
``|D| = 1``; the half-plane and half-spaces carry plain Lebesgue measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyRegionError, RegionOutsideDomainError, ValidationError

# Cut cells of curved regions are resolved by this many sub-samples per axis.
_SUBSAMPLES = {1: 64, 2: 16, 3: 8}


def as_points(z, dim=None):
    """Coerce complex numbers, tuples or arrays into an ``(m, d)`` float array."""
    a = np.asarray(z)
    if a.ndim == 0 and dim == 2:
        a = a.astype(np.complex128)
    if np.iscomplexobj(a):
        a = np.atleast_1d(a).ravel()
        pts = np.stack([a.real, a.imag], axis=-1).astype(np.float64)
    else:
        pts = np.atleast_2d(np.asarray(a, dtype=np.float64))
    if dim is not None and pts.shape[-1] != dim:
        raise ValidationError(f"expected {dim}-dimensional points, got shape {pts.shape}")
    return pts


@dataclass(frozen=True)
class Domain:
    """One of the open sets D, R^2_+ or R^n_+."""

    kind: str
    n: int = 2

    def __post_init__(self):
        if self.kind not in ("disk", "halfplane", "halfspace"):
            raise ValidationError(f"unknown domain kind {self.kind!r}")
        if self.kind != "halfspace" and self.n != 2:
            raise ValidationError(f"{self.kind} is two-dimensional")
        if self.n < 2:
            raise ValidationError("half-space dimension must be at least 2")

    @classmethod
    def disk(cls):
        return cls("disk")

    @classmethod
    def halfplane(cls):
        return cls("halfplane")

    @classmethod
    def halfspace(cls, n):
        return cls("halfspace", int(n))

    @property
    def dim(self):
        return self.n

    @property
    def normalization(self):
        return 1.0 / math.pi if self.kind == "disk" else 1.0

    @property
    def name(self):
        return f"halfspace{self.n}" if self.kind == "halfspace" else self.kind

    def contains(self, points, strict=True):
        pts = as_points(points, self.dim)
        if self.kind == "disk":
            r = np.hypot(pts[:, 0], pts[:, 1])
            return r < 1.0 if strict else r <= 1.0
        last = pts[:, -1]
        return last > 0.0 if strict else last >= 0.0

    def contains_region(self, region, strict=True):
        if region.dim != self.dim:
            return False
        if self.kind == "disk":
            far = region.farthest_distance(np.zeros(2))
            return far < 1.0 if strict else far <= 1.0
        low = region.lowest(self.dim - 1)
        return low > 0.0 if strict else low >= 0.0


def _ball_volume(dim, radius):
    return math.pi ** (dim / 2) / math.gamma(dim / 2 + 1) * radius**dim


def _point_box_distance(q, lo, hi):
    return float(np.linalg.norm(q - np.clip(q, lo, hi)))


class Region:
    """Compact measurable subset of R^d with closed-form Lebesgue measure."""

    dim: int

    def lebesgue_measure(self) -> float:
        raise NotImplementedError

    def contains(self, points):
        raise NotImplementedError

    def bbox(self):
        raise NotImplementedError

    def farthest_distance(self, q):
        raise NotImplementedError

    def nearest_distance(self, q):
        raise NotImplementedError

    def lowest(self, axis):
        return float(self.bbox()[0][axis])

    def contains_region(self, other: "Region") -> bool:
        raise NotImplementedError

    def boundary_samples(self, resolution):
        raise NotImplementedError

    def descriptor(self) -> str:
        raise NotImplementedError

    def _classify(self, centers, half_diag):
        """Split grid cells into (fully inside, possibly cut) masks."""
        raise NotImplementedError

    def sample_point(self, rng):
        lo, hi = self.bbox()
        for _ in range(10_000):
            q = lo + (hi - lo) * rng.random(self.dim)
            if self.contains(q)[0]:
                return q
        raise EmptyRegionError(f"could not sample a point in {self.descriptor()}")


@dataclass(frozen=True)
class Box(Region):
    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in np.ravel(self.lo))
        hi = tuple(float(v) for v in np.ravel(self.hi))
        if len(lo) != len(hi) or not lo:
            raise ValidationError("box corners must have equal, positive dimension")
        if any(b < a for a, b in zip(lo, hi)):
            raise ValidationError(f"box corners out of order: {lo} > {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self):
        return len(self.lo)

    def lebesgue_measure(self):
        return float(np.prod(np.subtract(self.hi, self.lo)))

    def contains(self, points):
        pts = as_points(points, self.dim)
        return np.all((pts >= self.lo) & (pts <= self.hi), axis=1)

    def bbox(self):
        return np.array(self.lo), np.array(self.hi)

    def corners(self):
        axes = [np.unique([a, b]) for a, b in zip(self.lo, self.hi)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def farthest_distance(self, q):
        return float(np.max(np.linalg.norm(self.corners() - np.asarray(q), axis=1)))

    def nearest_distance(self, q):
        lo, hi = self.bbox()
        return _point_box_distance(np.asarray(q, dtype=float), lo, hi)

    def contains_region(self, other):
        lo, hi = other.bbox()
        return bool(np.all(lo >= self.lo) and np.all(hi <= self.hi))

    def overlaps(self, other: "Box") -> bool:
        """True when the interiors intersect."""
        return all(a1 < b2 and a2 < b1 for a1, b1, a2, b2 in zip(self.lo, self.hi, other.lo, other.hi))

    def boundary_samples(self, resolution):
        axes = [np.linspace(a, b, resolution + 1) if b > a else np.array([a]) for a, b in zip(self.lo, self.hi)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def descriptor(self):
        return "box " + " ".join(repr(v) for v in self.lo + self.hi)

    def _classify(self, centers, half_diag):
        full = np.ones(len(centers), dtype=bool)
        return full, ~full


@dataclass(frozen=True)
class DiskSet(Region):
    """Closed disk (closed ball when the center has more than two coordinates)."""

    center: tuple
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center)
        if np.iscomplexobj(c):
            c = np.array([c.real, c.imag]).ravel()
        object.__setattr__(self, "center", tuple(float(v) for v in np.ravel(c)))
        object.__setattr__(self, "radius", float(self.radius))
        if self.radius < 0:
            raise ValidationError("radius must be non-negative")

    @property
    def dim(self):
        return len(self.center)

    def lebesgue_measure(self):
        return _ball_volume(self.dim, self.radius)

    def contains(self, points):
        pts = as_points(points, self.dim)
        return np.linalg.norm(pts - self.center, axis=1) <= self.radius

    def bbox(self):
        c = np.array(self.center)
        return c - self.radius, c + self.radius

    def farthest_distance(self, q):
        return float(np.linalg.norm(np.subtract(self.center, q))) + self.radius

    def nearest_distance(self, q):
        return max(0.0, float(np.linalg.norm(np.subtract(self.center, q))) - self.radius)

    def contains_region(self, other):
        return other.farthest_distance(np.array(self.center)) <= self.radius

    def boundary_samples(self, resolution):
        c = np.array(self.center)
        m = 4 * resolution
        if self.dim == 2:
            t = 2 * np.pi * np.arange(m) / m
            return c + self.radius * np.stack([np.cos(t), np.sin(t)], axis=-1)
        # Fibonacci lattice on the sphere; higher dimensions use axis points only
        if self.dim == 3:
            i = np.arange(m) + 0.5
            phi = np.arccos(1 - 2 * i / m)
            theta = np.pi * (1 + 5**0.5) * i
            dirs = np.stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)], axis=-1)
        else:
            eye = np.eye(self.dim)
            dirs = np.concatenate([eye, -eye])
        return c + self.radius * dirs

    def descriptor(self):
        return "disk " + " ".join(repr(v) for v in self.center + (self.radius,))

    def _classify(self, centers, half_diag):
        d = np.linalg.norm(centers - self.center, axis=1)
        full = d + half_diag <= self.radius
        cut = ~full & (d - half_diag <= self.radius)
        return full, cut


@dataclass(frozen=True)
class Annulus(Region):
    """Closed planar annulus ``inner <= |z - center| <= outer``."""

    center: tuple
    inner: float
    outer: float

    def __post_init__(self):
        c = np.asarray(self.center)
        if np.iscomplexobj(c):
            c = np.array([c.real, c.imag]).ravel()
        object.__setattr__(self, "center", tuple(float(v) for v in np.ravel(c)))
        object.__setattr__(self, "inner", float(self.inner))
        object.__setattr__(self, "outer", float(self.outer))
        if len(self.center) != 2:
            raise ValidationError("annulus is planar")
        if not 0 <= self.inner < self.outer:
            raise ValidationError("annulus needs 0 <= inner < outer")

    dim = 2

    def lebesgue_measure(self):
        return math.pi * (self.outer**2 - self.inner**2)

    def contains(self, points):
        r = np.linalg.norm(as_points(points, 2) - self.center, axis=1)
        return (r >= self.inner) & (r <= self.outer)

    def bbox(self):
        c = np.array(self.center)
        return c - self.outer, c + self.outer

    def farthest_distance(self, q):
        return float(np.linalg.norm(np.subtract(self.center, q))) + self.outer

    def nearest_distance(self, q):
        d = float(np.linalg.norm(np.subtract(self.center, q)))
        if d < self.inner:
            return self.inner - d
        return max(0.0, d - self.outer)

    def contains_region(self, other):
        c = np.array(self.center)
        if other.farthest_distance(c) > self.outer:
            return False
        if isinstance(other, Box):
            lo, hi = other.bbox()
            return _point_box_distance(c, lo, hi) >= self.inner
        if isinstance(other, DiskSet):
            return np.linalg.norm(np.subtract(other.center, c)) - other.radius >= self.inner
        if isinstance(other, Union):
            return all(self.contains_region(m) for m in other.members)
        return False

    def boundary_samples(self, resolution):
        m = 4 * resolution
        t = 2 * np.pi * np.arange(m) / m
        ring = np.stack([np.cos(t), np.sin(t)], axis=-1)
        c = np.array(self.center)
        return np.concatenate([c + self.inner * ring, c + self.outer * ring])

    def descriptor(self):
        return "annulus " + " ".join(repr(v) for v in self.center + (self.inner, self.outer))

    def _classify(self, centers, half_diag):
        d = np.linalg.norm(centers - self.center, axis=1)
        full = (d + half_diag <= self.outer) & (d - half_diag >= self.inner)
        cut = ~full & (d - half_diag <= self.outer) & (d + half_diag >= self.inner)
        return full, cut


@dataclass(frozen=True)
class Union(Region):
    """Finite union of pairwise disjoint regions (disjointness checked by sampling)."""

    members: tuple = field(default_factory=tuple)

    def __post_init__(self):
        members = tuple(self.members)
        object.__setattr__(self, "members", members)
        if not members:
            raise ValidationError("union needs at least one member")
        dims = {m.dim for m in members}
        if len(dims) != 1:
            raise ValidationError("union members must share a dimension")
        for i, a in enumerate(members):
            nodes, _ = _raw_grid(a, 12)
            for b in members[i + 1 :]:
                if nodes.size and np.any(b.contains(nodes)):
                    raise ValidationError(f"union members overlap: {a.descriptor()} / {b.descriptor()}")

    @property
    def dim(self):
        return self.members[0].dim

    def lebesgue_measure(self):
        return math.fsum(m.lebesgue_measure() for m in self.members)

    def contains(self, points):
        pts = as_points(points, self.dim)
        out = np.zeros(len(pts), dtype=bool)
        for m in self.members:
            out |= m.contains(pts)
        return out

    def bbox(self):
        los, his = zip(*(m.bbox() for m in self.members))
        return np.min(los, axis=0), np.max(his, axis=0)

    def farthest_distance(self, q):
        return max(m.farthest_distance(q) for m in self.members)

    def nearest_distance(self, q):
        return min(m.nearest_distance(q) for m in self.members)

    def lowest(self, axis):
        return min(m.lowest(axis) for m in self.members)

    def contains_region(self, other):
        if isinstance(other, Union):
            return all(self.contains_region(o) for o in other.members)
        return any(m.contains_region(other) for m in self.members)

    def boundary_samples(self, resolution):
        return np.concatenate([m.boundary_samples(resolution) for m in self.members])

    def descriptor(self):
        return " | ".join(m.descriptor() for m in self.members)


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Nodes and positive weights realizing ``dA`` on a region."""

    region: Region
    domain: Domain
    nodes: np.ndarray
    weights: np.ndarray
    resolution: int
    tensor_shape: tuple | None = None

    def __len__(self):
        return len(self.weights)

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)


def _raw_grid(region, resolution):
    """Lebesgue-weighted nodes for a region, in lexicographic cell order."""
    if isinstance(region, Union):
        parts = [_raw_grid(m, resolution) for m in region.members]
        return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])
    lo, hi = region.bbox()
    d = region.dim
    h = (hi - lo) / resolution
    cell = float(np.prod(h))
    axes = [lo[i] + h[i] * (np.arange(resolution) + 0.5) for i in range(d)]
    mesh = np.meshgrid(*axes, indexing="ij")
    centers = np.stack([m.ravel() for m in mesh], axis=-1)
    if isinstance(region, Box):
        return centers, np.full(len(centers), cell)

    full, cut = region._classify(centers, 0.5 * float(np.linalg.norm(h)))
    sub = _SUBSAMPLES.get(d, 4)
    offs = [h[i] * ((np.arange(sub) + 0.5) / sub - 0.5) for i in range(d)]
    omesh = np.meshgrid(*offs, indexing="ij")
    offsets = np.stack([m.ravel() for m in omesh], axis=-1)

    weights = np.where(full, cell, 0.0)
    nodes = centers.copy()
    cut_idx = np.flatnonzero(cut)
    for start in range(0, len(cut_idx), 2048):
        idx = cut_idx[start : start + 2048]
        pts = centers[idx, None, :] + offsets[None, :, :]
        inside = region.contains(pts.reshape(-1, d)).reshape(len(idx), -1)
        count = inside.sum(axis=1)
        weights[idx] = cell * count / offsets.shape[0]
        hit = count > 0
        # centroid of the covered sub-samples; lies in the region for convex cuts
        centroid = (pts * inside[..., None]).sum(axis=1)[hit] / count[hit, None]
        nodes[idx[hit]] = centroid
    keep = weights > 0
    nodes, weights = nodes[keep], weights[keep]
    inside = region.contains(nodes)
    nodes, weights = nodes[inside], weights[inside]
    if weights.size:
        weights = weights * (region.lebesgue_measure() / weights.sum())
    return nodes, weights


def measure(region: Region, domain: Domain) -> float:
    """Measure of ``region`` under the domain's (normalized) Lebesgue measure."""
    if not domain.contains_region(region, strict=False):
        raise RegionOutsideDomainError(f"{region.descriptor()} is not contained in {domain.name}")
    return region.lebesgue_measure() * domain.normalization


def build_grid(region: Region, domain: Domain, resolution: int) -> QuadratureGrid:
    """Midpoint tensor grid over the region's bounding box.

    Cells fully inside the region keep their midpoint; cells cut by a curved
    boundary are weighted by their sub-sampled coverage and represented by the
    centroid of the covered part.  Weights are finally scaled so that they sum
    to the exact measure of the region.
    """
    if int(resolution) != resolution or resolution < 2:
        raise ValidationError(f"resolution must be an integer >= 2, got {resolution}")
    resolution = int(resolution)
    if region.dim != domain.dim:
        raise ValidationError(f"region dimension {region.dim} does not match {domain.name}")
    if not domain.contains_region(region, strict=True):
        raise RegionOutsideDomainError(f"{region.descriptor()} touches or leaves {domain.name}")
    if region.lebesgue_measure() <= 0:
        raise EmptyRegionError(f"{region.descriptor()} has zero measure")
    nodes, weights = _raw_grid(region, resolution)
    if not weights.size:
        raise EmptyRegionError(f"no grid nodes inside {region.descriptor()}")
    shape = (resolution,) * region.dim if isinstance(region, Box) else None
    return QuadratureGrid(region, domain, nodes, weights * domain.normalization, resolution, shape)


def neighborhood_halfplane(tau, gamma) -> Box:
    """The rectangle around ``tau = alpha + i beta`` on which Re (conj(z) - w)^2 < 0.

    ``[alpha - (beta-gamma)/2, alpha + (beta-gamma)/2] x [beta - gamma, beta + gamma]``
    """
    alpha, beta = as_points(tau, 2)[0]
    gamma = float(gamma)
    if not beta > 0:
        raise ValidationError(f"tau must lie in the upper half-plane, got beta={beta}")
    if not 0 < gamma < beta:
        raise ValidationError(f"need 0 < gamma < beta, got gamma={gamma}, beta={beta}")
    half = (beta - gamma) / 2
    return Box((alpha - half, beta - gamma), (alpha + half, beta + gamma))


def inscribed_box(region: Region) -> Box:
    """A box contained in ``region`` (not necessarily the largest)."""
    if isinstance(region, Box):
        return region
    if isinstance(region, DiskSet):
        c = np.array(region.center)
        s = region.radius / math.sqrt(region.dim)
        return Box(c - s, c + s)
    if isinstance(region, Annulus):
        c = np.array(region.center)
        mid = np.array([(region.inner + region.outer) / 2, 0.0])
        s = (region.outer - region.inner) / (2 * math.sqrt(2))
        return Box(c + mid - s, c + mid + s)
    if isinstance(region, Union):
        return inscribed_box(region.members[0])
    raise ValidationError(f"cannot inscribe a box in {region!r}")


def closed_samples(region: Region, resolution: int):
    """Interior grid nodes together with boundary points of the closed region."""
    if isinstance(region, Box):
        return region.boundary_samples(resolution)
    nodes, _ = _raw_grid(region, resolution)
    return np.concatenate([nodes, region.boundary_samples(resolution)])
