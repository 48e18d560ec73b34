"""Modular ``rho_p(f) = int |f|^{p(z)} dA`` and the Luxemburg norm."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domains import Domain, QuadratureGrid, Region, as_points
from .errors import DomainMismatchError, NonConvergenceError, ValidationError
from .exponents import ExponentField
from .summation import compensated_sum

DEFAULT_TOL = 1e-10
MAX_BISECTIONS = 200


class SampledFunction:
    """A function on a domain that can be evaluated at quadrature nodes."""

    domain: Domain

    def values(self, grid: QuadratureGrid):
        if grid.domain != self.domain:
            raise DomainMismatchError(f"function on {self.domain.name}, grid on {grid.domain.name}")
        return self.at(grid.nodes)

    def at(self, points):
        raise NotImplementedError


@dataclass(frozen=True)
class Indicator(SampledFunction):
    region: Region
    domain: Domain

    def at(self, points):
        return self.region.contains(as_points(points, self.domain.dim)).astype(np.float64)


@dataclass(frozen=True)
class ScaledIndicator(SampledFunction):
    k: float
    region: Region
    domain: Domain

    def __post_init__(self):
        if not self.k > 0:
            raise ValidationError("scaled indicator needs k > 0")

    def at(self, points):
        return self.k * self.region.contains(as_points(points, self.domain.dim)).astype(np.float64)


@dataclass(frozen=True)
class Polynomial(SampledFunction):
    """``w -> sum_j coeffs[j] w^j`` on a planar domain."""

    coeffs: tuple
    domain: Domain

    def __post_init__(self):
        if self.domain.dim != 2:
            raise ValidationError("holomorphic polynomials live on planar domains")
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))

    def at(self, points):
        pts = as_points(points, 2)
        w = pts[:, 0] + 1j * pts[:, 1]
        return np.polynomial.polynomial.polyval(w, self.coeffs)


@dataclass(frozen=True, eq=False)
class PointwiseTable(SampledFunction):
    grid: QuadratureGrid
    table: np.ndarray

    def __post_init__(self):
        vals = np.array(self.table, copy=True)
        if vals.shape != (len(self.grid),):
            raise ValidationError("table values must align one-to-one with grid nodes")
        vals.setflags(write=False)
        object.__setattr__(self, "table", vals)

    @property
    def domain(self):
        return self.grid.domain

    def values(self, grid):
        if grid is not self.grid and not (
            grid.domain == self.grid.domain and np.array_equal(grid.nodes, self.grid.nodes)
        ):
            raise DomainMismatchError("pointwise table is tied to a different grid")
        return self.table

    def at(self, points):
        pts = as_points(points, self.grid.domain.dim)
        out = np.empty(len(pts), dtype=self.table.dtype)
        for i, q in enumerate(pts):
            hit = np.flatnonzero(np.all(self.grid.nodes == q, axis=1))
            if not hit.size:
                raise ValidationError("pointwise table queried away from its nodes")
            out[i] = self.table[hit[0]]
        return out


def _check(p, grid):
    if p.domain != grid.domain:
        raise DomainMismatchError(f"exponent on {p.domain.name}, grid on {grid.domain.name}")


def modular_terms(abs_values, exponents, weights, log_scale=0.0):
    """Summands ``w |c f|^p`` with ``log c = log_scale``, formed as ``exp(p (log c + log|f|))``."""
    a = np.asarray(abs_values, dtype=np.float64)
    out = np.zeros_like(a)
    nz = a > 0
    out[nz] = weights[nz] * np.exp(exponents[nz] * (log_scale + np.log(a[nz])))
    return out


def modular(f: SampledFunction, p: ExponentField, grid: QuadratureGrid) -> float:
    """``sum_i w_i |f(x_i)|^{p(x_i)}`` in node order, compensated."""
    _check(p, grid)
    vals = np.abs(f.values(grid))
    return compensated_sum(modular_terms(vals, p(grid.nodes), grid.weights))


def luxemburg_norm(f: SampledFunction, p: ExponentField, grid: QuadratureGrid, tol: float = DEFAULT_TOL) -> float:
    """``inf{lam > 0 : rho_p(f / lam) <= 1}`` by bisection on ``log lam``.

    ``lam -> rho_p(f / lam)`` is continuous and strictly decreasing, so the
    infimum is the root of ``rho_p(f / lam) = 1``.  The root lies between
    ``rho^{1/p_+}`` and ``rho^{1/p_-}`` (bounds over the support of ``f``).
    """
    if not tol > 0:
        raise ValidationError("tol must be positive")
    _check(p, grid)
    a = np.abs(f.values(grid))
    support = a > 0
    if not support.any():
        return 0.0
    a, pv, w = a[support], p(grid.nodes)[support], grid.weights[support]
    rho = compensated_sum(modular_terms(a, pv, w))
    if not math.isfinite(rho):
        raise ValidationError("modular is not finite")

    def excess(log_lam):
        return compensated_sum(modular_terms(a, pv, w, -log_lam)) - 1.0

    p_lo, p_hi = float(pv.min()), float(pv.max())
    ends = sorted((math.log(rho) / p_lo, math.log(rho) / p_hi))
    lo, hi = ends[0] - 1e-12, ends[1] + 1e-12
    # widen against rounding at the bracket ends
    step = 1e-9
    for _ in range(MAX_BISECTIONS):
        if excess(lo) >= 0 and excess(hi) <= 0:
            break
        if excess(lo) < 0:
            lo -= step
        if excess(hi) > 0:
            hi += step
        step *= 2
    else:
        raise NonConvergenceError("could not bracket the Luxemburg norm")
    log_tol = math.log1p(tol)
    for _ in range(MAX_BISECTIONS):
        if hi - lo <= log_tol:
            return math.exp(0.5 * (lo + hi))
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
    raise NonConvergenceError(f"bisection did not reach tol={tol} in {MAX_BISECTIONS} steps")
