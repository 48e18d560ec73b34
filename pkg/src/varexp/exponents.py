"""Variable exponents p(.), their essential bounds, log-Hoelder moduli and gap sets."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domains import Box, Domain, QuadratureGrid, Region, _raw_grid, as_points, build_grid
from .errors import (
    EmptyRegionError,
    ExponentLocallyConstantError,
    PointOutsideDomainError,
    ValidationError,
)


@dataclass(frozen=True)
class Constant:
    value: float

    def __call__(self, pts):
        return np.full(len(pts), float(self.value))

    def describe(self):
        return f"constant({self.value!r})"


@dataclass(frozen=True)
class TwoLevel:
    """``value_minus`` on ``region_minus``, ``value_plus`` on ``region_plus``, ``background`` elsewhere."""

    region_minus: Region
    value_minus: float
    region_plus: Region
    value_plus: float
    background: float

    def __call__(self, pts):
        out = np.full(len(pts), float(self.background))
        out[self.region_plus.contains(pts)] = self.value_plus
        out[self.region_minus.contains(pts)] = self.value_minus
        return out

    def describe(self):
        return (
            f"two_level({self.region_minus.descriptor()} -> {self.value_minus!r}; "
            f"{self.region_plus.descriptor()} -> {self.value_plus!r}; background {self.background!r})"
        )


@dataclass(frozen=True)
class Radial:
    """``p(z) = sum_j coeffs[j] |z - center|^j``."""

    coeffs: tuple
    center: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if self.center is not None:
            object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if not self.coeffs:
            raise ValidationError("radial exponent needs at least one coefficient")

    def radius(self, pts):
        c = np.zeros(pts.shape[1]) if self.center is None else np.asarray(self.center)
        return np.linalg.norm(pts - c, axis=1)

    def profile(self, r):
        return np.polynomial.polynomial.polyval(r, self.coeffs)

    def __call__(self, pts):
        return self.profile(self.radius(pts))

    def profile_range(self, r0, r1):
        """Exact min/max of the radial profile on ``[r0, r1]``."""
        poly = np.polynomial.Polynomial(self.coeffs)
        cands = [r0, r1]
        for root in poly.deriv().roots():
            if abs(root.imag) < 1e-14 and r0 <= root.real <= r1:
                cands.append(root.real)
        vals = poly(np.array(cands))
        return float(vals.min()), float(vals.max())

    def describe(self):
        return f"radial({', '.join(repr(c) for c in self.coeffs)})"


@dataclass(frozen=True, eq=False)
class GridSampled:
    """Piecewise-constant exponent: value of the nearest grid node."""

    grid: QuadratureGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64).copy()
        if vals.shape != (len(self.grid),):
            raise ValidationError("grid-sampled values must align with grid nodes")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __call__(self, pts):
        nodes = self.grid.nodes
        out = np.empty(len(pts))
        for start in range(0, len(pts), 512):
            chunk = pts[start : start + 512]
            d2 = ((chunk[:, None, :] - nodes[None, :, :]) ** 2).sum(axis=-1)
            out[start : start + 512] = self.values[np.argmin(d2, axis=1)]
        return out

    def describe(self):
        return f"grid_sampled({len(self.values)} nodes)"


@dataclass(frozen=True)
class ExponentField:
    """An exponent ``p(.)`` in the class P(X): ``1 < p_- <= p_+ < infinity``.

    Membership is checked at construction.
    """

    domain: Domain
    rule: object

    def __post_init__(self):
        rule = self.rule
        if isinstance(rule, TwoLevel):
            for region in (rule.region_minus, rule.region_plus):
                if not self.domain.contains_region(region, strict=False):
                    raise ValidationError(f"{region.descriptor()} is not inside {self.domain.name}")
            nodes, _ = _raw_grid(rule.region_minus, 12)
            if np.any(rule.region_plus.contains(nodes)):
                raise ValidationError("two-level regions must be disjoint")
        if isinstance(rule, GridSampled) and rule.grid.domain != self.domain:
            raise ValidationError("grid-sampled exponent lives on a different domain")
        lo, hi = self.global_bounds()
        if not (1.0 < lo and hi < math.inf):
            raise ValidationError(f"exponent outside P(X): p_- = {lo}, p_+ = {hi}")

    def __call__(self, points):
        pts = as_points(points, self.domain.dim)
        if not np.all(self.domain.contains(pts)):
            raise PointOutsideDomainError(f"point outside {self.domain.name}")
        return self.rule(pts)

    def describe(self):
        return self.rule.describe()

    @property
    def is_constant(self):
        return isinstance(self.rule, Constant)

    def global_bounds(self):
        """(p_-, p_+) over the whole domain, computed analytically."""
        rule = self.rule
        if isinstance(rule, Constant):
            return float(rule.value), float(rule.value)
        if isinstance(rule, TwoLevel):
            vals = (rule.value_minus, rule.value_plus, rule.background)
            return float(min(vals)), float(max(vals))
        if isinstance(rule, Radial):
            if self.domain.kind != "disk":
                if any(c != 0 for c in rule.coeffs[1:]):
                    raise ValidationError("a non-constant radial exponent is unbounded on a half-space")
                return rule.coeffs[0], rule.coeffs[0]
            c = 0.0 if rule.center is None else float(np.linalg.norm(rule.center))
            return rule.profile_range(max(0.0, c - 1.0), c + 1.0)
        if isinstance(rule, GridSampled):
            return float(rule.values.min()), float(rule.values.max())
        raise ValidationError(f"unsupported exponent rule {rule!r}")


def eval_exponent(p: ExponentField, z) -> float:
    """Value of ``p`` at a single point."""
    return float(p(z)[0])


def _sample_region(p, region, resolution):
    if region.lebesgue_measure() <= 0:
        raise EmptyRegionError(f"{region.descriptor()} has zero measure")
    if int(resolution) != resolution or resolution < 2:
        raise ValidationError("resolution must be an integer >= 2")
    grid = build_grid(region, p.domain, int(resolution))
    return grid, p(grid.nodes)


def sampled_bounds(p: ExponentField, points):
    vals = p(points)
    if vals.size == 0:
        raise EmptyRegionError("no sample points")
    return float(vals.min()), float(vals.max())


def essential_bounds(p: ExponentField, region: Region | None, resolution: int):
    """(p_-, p_+) of ``p`` on ``region``; ``region=None`` means the whole domain.

    Constant and two-level rules return exact rule values; other rules return
    grid extrema.
    """
    if region is None:
        return p.global_bounds()
    if isinstance(p.rule, Constant):
        if region.lebesgue_measure() <= 0:
            raise EmptyRegionError(f"{region.descriptor()} has zero measure")
        return float(p.rule.value), float(p.rule.value)
    _, vals = _sample_region(p, region, resolution)
    if isinstance(p.rule, TwoLevel):
        rule = p.rule
        present = set(vals.tolist())
        for sub, v in ((rule.region_minus, rule.value_minus), (rule.region_plus, rule.value_plus)):
            if region.contains_region(sub) and sub.lebesgue_measure() > 0:
                present.add(float(v))
        return min(present), max(present)
    return float(vals.min()), float(vals.max())


def log_holder_modulus(p: ExponentField, region: Region, resolution: int, chunk: int = 256) -> float:
    """``sup |p(z1) - p(z2)| log(e + 1/|z1 - z2|)`` over distinct grid nodes."""
    grid, vals = _sample_region(p, region, resolution)
    if isinstance(p.rule, Constant):
        return 0.0
    nodes = grid.nodes
    best = 0.0
    for start in range(0, len(nodes), chunk):
        a = nodes[start : start + chunk]
        dist = np.zeros((len(a), len(nodes)))
        for axis in range(nodes.shape[1]):
            dist += (a[:, axis, None] - nodes[None, :, axis]) ** 2
        np.sqrt(dist, out=dist)
        jump = np.abs(vals[start : start + chunk, None] - vals[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            term = jump * np.log(math.e + 1.0 / dist)
        term[dist == 0] = 0.0
        best = max(best, float(term.max()))
    return best


@dataclass(frozen=True)
class GapSets:
    minus: Region
    plus: Region
    s_minus: float
    s_plus: float

    def __iter__(self):
        return iter((self.minus, self.plus, self.s_minus, self.s_plus))


def _box_values(p, box, resolution):
    pts = np.concatenate([box.boundary_samples(max(2, resolution)), _raw_grid(box, max(2, resolution))[0]])
    return p(pts)


def find_gap_sets(p: ExponentField, tau, neighborhood: Region, resolution: int) -> GapSets:
    """Disjoint K-, K+ inside ``neighborhood`` with ``sup_{K-} p < inf_{K+} p``.

    Two-level rules whose level sets lie in the neighborhood return those sets.
    Otherwise sampled values are split at their 10% / 90% quantiles and small
    boxes are placed around witness nodes (lowest / highest values, nearest to
    ``tau`` on ties), shrinking until a box stays inside its quantile band.
    Bands too thin to hold a box are widened to 25% and then 40%.

    Raises :class:`ExponentLocallyConstantError` when no gap is resolved.
    """
    tau = as_points(tau, p.domain.dim)[0]
    if not neighborhood.contains(tau)[0]:
        raise ValidationError("tau must lie in the neighborhood")
    rule = p.rule
    if isinstance(rule, TwoLevel) and rule.value_minus != rule.value_plus:
        sets = [(rule.value_minus, rule.region_minus), (rule.value_plus, rule.region_plus)]
        if all(neighborhood.contains_region(r) for _, r in sets):
            (lo_v, lo_r), (hi_v, hi_r) = sorted(sets, key=lambda s: s[0])
            return GapSets(lo_r, hi_r, float(lo_v), float(hi_v))

    grid, vals = _sample_region(p, neighborhood, resolution)
    vmin, vmax = float(vals.min()), float(vals.max())
    if vmax - vmin <= 1e-12 * max(1.0, abs(vmax)):
        raise ExponentLocallyConstantError(
            f"exponent is constant on {neighborhood.descriptor()} at resolution {resolution}"
        )
    nodes = grid.nodes
    dist = np.linalg.norm(nodes - tau, axis=1)
    lo_nb, hi_nb = neighborhood.bbox()
    cell = (hi_nb - lo_nb) / resolution
    # half-widths in cells; sub-cell boxes resolve quantile bands thinner than a cell
    halves = [cell * m / 2 for m in (resolution // 4, resolution // 8, 7, 5, 3, 1, 0.5, 0.25, 0.125) if m > 0]

    def grow(mask, key, accept, avoid=None):
        idx = np.flatnonzero(mask)
        order = idx[np.lexsort((dist[idx], key[idx]))]
        for half in halves:
            for i in order:
                box = Box(nodes[i] - half, nodes[i] + half)
                if not neighborhood.contains_region(box):
                    continue
                if avoid is not None and box.overlaps(avoid):
                    continue
                if accept(_box_values(p, box, 8)):
                    return box
        return None

    # widen the bands when the outer deciles are too thin to hold a box
    for level in (0.1, 0.25, 0.4):
        lo_cut, hi_cut = np.quantile(vals, [level, 1 - level])
        if not lo_cut < hi_cut:
            span = vmax - vmin
            lo_cut, hi_cut = vmin + level * span, vmax - level * span
        minus = grow(vals <= lo_cut, vals, lambda v: v.max() <= lo_cut)
        if minus is None:
            continue
        plus = grow(vals >= hi_cut, -vals, lambda v: v.min() >= hi_cut, avoid=minus)
        if plus is not None:
            break
    else:
        raise ExponentLocallyConstantError(
            f"no separated gap sets found in {neighborhood.descriptor()} at resolution {resolution}"
        )
    s_minus = float(_box_values(p, minus, resolution).max())
    s_plus = float(_box_values(p, plus, resolution).min())
    if not s_minus < s_plus:
        raise ExponentLocallyConstantError("gap sets do not separate the exponent")
    return GapSets(minus, plus, s_minus, s_plus)
