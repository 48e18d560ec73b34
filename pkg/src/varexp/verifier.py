"""Numerical checks of the pointwise lower bounds ``Re(T chi_E)(z) >= c |E|``.

For each kernel the constant is the infimum of the real part of the kernel
over ``K x K``; the kernel ids already carry their sign and normalizing
constant, so positivity of that infimum is exactly the hypothesis needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domains import Box, Region, as_points, build_grid, closed_samples, measure
from .errors import NonPositiveInfimumError, ValidationError
from .modular import Indicator
from .operators import HarmonicHalfSpace, kernel_values, project_many

_PAIR_CHUNK = 1 << 22


def default_infimum_resolution(dim: int) -> int:
    # pair count grows like resolution^(2 dim)
    return {2: 16, 3: 6}.get(dim, 4)


def _pairwise_min_real(kid, pts):
    """Minimum of Re K(z, w) over all ordered pairs of ``pts``."""
    rows = max(1, _PAIR_CHUNK // len(pts))
    best = np.inf
    for start in range(0, len(pts), rows):
        vals = kernel_values(kid, pts[start : start + rows, None, :], pts[None, :, :])
        best = min(best, float(np.min(np.real(vals))))
    return best


def kernel_infimum(kid, K: Region, resolution: int | None = None) -> float:
    """Grid infimum of ``Re K(z, w)`` over ``K x K``, refined once, smaller value kept.

    Samples are the region's grid nodes plus points on its boundary.
    Raises :class:`NonPositiveInfimumError` when the infimum is not positive.
    """
    if resolution is None:
        resolution = default_infimum_resolution(K.dim)
    if int(resolution) != resolution or resolution < 4:
        raise ValidationError("kernel_infimum needs resolution >= 4")
    if not kid.domain.contains_region(K, strict=True):
        raise ValidationError(f"{K.descriptor()} is not strictly inside {kid.domain.name}")
    values = []
    for res in (int(resolution), 2 * int(resolution)):
        values.append(_pairwise_min_real(kid, closed_samples(K, res)))
    c = min(values)
    if not c > 0:
        raise NonPositiveInfimumError(f"kernel infimum {c:.6g} <= 0 on {K.descriptor()}; shrink K", c)
    return c


@dataclass(frozen=True)
class Trial:
    E: Box
    z: np.ndarray
    measure: float
    lhs: float
    bound: float
    margin: float
    lhs_refined: float


@dataclass
class LemmaReport:
    kernel_id: object
    neighborhood: Region
    c_tau: float
    trials: list = field(default_factory=list)
    min_margin: float = np.inf
    tol_quadrature: float = 0.0

    @property
    def verified(self):
        return self.min_margin >= -self.tol_quadrature


def _random_box(rng, K, min_side, attempts=10_000):
    lo, hi = K.bbox()
    extent = hi - lo
    for _ in range(attempts):
        side = min_side + (extent / 2 - min_side) * rng.random(len(lo))
        side = np.maximum(side, min_side)
        corner = lo + (extent - side) * rng.random(len(lo))
        box = Box(corner, corner + side)
        if K.contains_region(box):
            return box
    raise ValidationError(f"could not inscribe a box with sides >= {min_side} in {K.descriptor()}")


def verify_lower_bound(kid, K: Region, trials: int, resolution: int = 32, seed: int = 0,
                       infimum_resolution: int | None = None) -> LemmaReport:
    """Check ``Re(T chi_E)(z) >= c_tau |E|`` on random boxes ``E`` in ``K`` and random ``z`` in ``K``.

    Each trial draws from its own stream spawned from ``seed``.  Every left-hand
    side is recomputed on a grid of twice the resolution; the largest change
    is the quadrature tolerance the margins are judged against.
    """
    if trials < 1:
        raise ValidationError("need at least one trial")
    c = kernel_infimum(kid, K, infimum_resolution)
    domain = kid.domain
    lo, hi = K.bbox()
    min_side = 4 * (hi - lo) / resolution
    report = LemmaReport(kid, K, c)
    for child in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.default_rng(child)
        E = _random_box(rng, K, min_side)
        z = K.sample_point(rng)
        f = Indicator(E, domain)
        lhs = float(np.real(project_many(kid, f, z, build_grid(E, domain, resolution))[0]))
        fine = float(np.real(project_many(kid, f, z, build_grid(E, domain, 2 * resolution))[0]))
        mE = measure(E, domain)
        bound = c * mE
        report.trials.append(Trial(E, z, mE, lhs, bound, lhs - bound, fine))
    report.min_margin = min(t.margin for t in report.trials)
    report.tol_quadrature = max(abs(t.lhs_refined - t.lhs) for t in report.trials)
    return report


def halfplane_negativity_check(K: Box, resolution: int = 16) -> float:
    """Max of ``Re (conj(z) - w)^2 = (a-c)^2 - (b+d)^2`` over sampled ``z, w`` in ``K``.

    Samples include the corners, where the maximum of a rectangle is attained.
    """
    if K.lo == K.hi:
        pts = np.array([K.lo])
    else:
        pts = K.boundary_samples(resolution)
    a, b = pts[:, None, 0], pts[:, None, 1]
    c, d = pts[None, :, 0], pts[None, :, 1]
    return float(np.max((a - c) ** 2 - (b + d) ** 2))


def harmonic_diagonal(n: int, xn: float) -> float:
    """``(n (x_n + y_n) - |x - ybar|^2) / |x - ybar|^{n+2}`` at ``y = x``, i.e.
    ``(n - 2 x_n) / (2^{n+1} x_n^{n+1})`` (no normalizing constant)."""
    return (n - 2.0 * xn) / (2.0 ** (n + 1) * xn ** (n + 1))


@dataclass(frozen=True)
class HarmonicNeighborhood:
    box: Box
    c: float
    shifted: bool


def harmonic_neighborhood(n: int, x, resolution: int | None = None) -> HarmonicNeighborhood:
    """Search for a box near ``x`` on which the harmonic kernel is positive.

    Cubes centered at ``x`` are tried first.  Where the kernel vanishes or is
    negative on the diagonal at ``x`` (``x_n >= n/2``) no such cube exists, and
    the center is moved towards the boundary along the last axis.
    """
    kid = HarmonicHalfSpace(n)
    x = as_points(x, n)[0]
    if not x[-1] > 0:
        raise ValidationError("x must lie in the open half-space")
    for t in (1.0, 0.95, 0.9, 0.8, 0.7, 0.6, 0.5):
        center = x.copy()
        center[-1] *= t
        for frac in (0.2, 0.1, 0.05, 0.025):
            half = frac * center[-1]
            box = Box(center - half, center + half)
            try:
                c = kernel_infimum(kid, box, resolution)
            except NonPositiveInfimumError:
                continue
            return HarmonicNeighborhood(box, c, t != 1.0)
    raise NonPositiveInfimumError(f"no positive neighborhood found near {x}")

