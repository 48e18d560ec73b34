"""Projection kernels on D, R^2_+ and R^n_+, their quadrature projections,
and finite-difference holomorphy / harmonicity residuals.

Kernels (``z`` the target point, ``w`` the integration variable):

* Bergman disk:        ``1 / (1 - conj(w) z)^2``          (with dA = dx dy / pi)
* Bergman half-plane:  ``-1/pi * 1 / (z - conj(w))^2``    (plain Lebesgue)
* harmonic half-space: ``c_n (n (x_n + y_n) - |x - ybar|^2) / |x - ybar|^{n+2}``,
  ``ybar = (y', -y_n)``, ``c_n = 2 Gamma(n/2) / pi^{n/2}``.
  With the linear numerator this is not harmonic in ``x``; the classical
  reproducing kernel has ``n (x_n + y_n)^2``.  Only positivity near the
  diagonal is used downstream.

``kernel`` evaluates with numpy broadcasting.  ``project_many`` uses fused
compiled loops that accumulate each target in node order with Neumaier
compensation; the two routes are independent implementations of the same
formulas and are cross-checked in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .domains import Domain, QuadratureGrid, as_points
from .errors import DomainMismatchError, SingularConfigurationError, ValidationError
from .modular import SampledFunction


def gamma_half_integer(n: int) -> float:
    """``Gamma(n/2)`` for integer ``n >= 1`` by ``Gamma(x+1) = x Gamma(x)``."""
    if int(n) != n or n < 1:
        raise ValidationError("gamma_half_integer needs a positive integer")
    n = int(n)
    if n % 2 == 0:
        x, g = 1.0, 1.0
    else:
        x, g = 0.5, math.sqrt(math.pi)
    while x < n / 2:
        g *= x
        x += 1.0
    return g


@dataclass(frozen=True)
class BergmanDisk:
    @property
    def domain(self):
        return Domain.disk()

    @property
    def name(self):
        return "bergman_disk"


@dataclass(frozen=True)
class BergmanHalfPlane:
    @property
    def domain(self):
        return Domain.halfplane()

    @property
    def name(self):
        return "bergman_halfplane"


@dataclass(frozen=True)
class HarmonicHalfSpace:
    n: int
    constant: float = field(init=False, repr=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValidationError("harmonic half-space dimension must be an integer >= 2")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "constant", 2.0 * gamma_half_integer(self.n) / math.pi ** (self.n / 2))

    @property
    def domain(self):
        return Domain.halfspace(self.n)

    @property
    def name(self):
        return f"harmonic{self.n}"


KernelId = BergmanDisk | BergmanHalfPlane | HarmonicHalfSpace


def kernel_from_name(name: str, n: int | None = None):
    name = name.strip().lower()
    if name in ("bergman_disk", "disk"):
        return BergmanDisk()
    if name in ("bergman_halfplane", "halfplane"):
        return BergmanHalfPlane()
    if name.startswith("harmonic"):
        suffix = name[len("harmonic") :].lstrip("_")
        dim = int(suffix) if suffix else n
        if dim is None:
            raise ValidationError("harmonic kernel needs a dimension")
        return HarmonicHalfSpace(dim)
    raise ValidationError(f"unknown kernel {name!r}")


def _complex(pts):
    return pts[..., 0] + 1j * pts[..., 1]


def _check_open(kid, pts, label):
    if not np.all(kid.domain.contains(pts.reshape(-1, kid.domain.dim))):
        raise SingularConfigurationError(f"{label} must lie in the open {kid.domain.name}")


def kernel_values(kid, z, w):
    """Kernel on broadcast arrays of points ``z[..., d]``, ``w[..., d]``."""
    z = np.asarray(z, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if isinstance(kid, BergmanDisk):
        return 1.0 / (1.0 - np.conj(_complex(w)) * _complex(z)) ** 2
    if isinstance(kid, BergmanHalfPlane):
        return (-1.0 / math.pi) / (_complex(z) - np.conj(_complex(w))) ** 2
    if isinstance(kid, HarmonicHalfSpace):
        diff = z - w
        diff = np.concatenate([diff[..., :-1], (z[..., -1] + w[..., -1])[..., None]], axis=-1)
        r2 = (diff**2).sum(axis=-1)
        num = kid.n * (z[..., -1] + w[..., -1]) - r2
        return kid.constant * num / r2 ** ((kid.n + 2) / 2)
    raise ValidationError(f"unknown kernel {kid!r}")


def kernel(kid, z, w):
    """Kernel value ``K(z, w)``; complex for Bergman kernels, real for the harmonic one.

    Scalar inputs give a scalar; point arrays broadcast pairwise.
    """
    dim = kid.domain.dim
    zp, wp = as_points(z, dim), as_points(w, dim)
    _check_open(kid, zp, "z")
    _check_open(kid, wp, "w")
    vals = kernel_values(kid, zp, wp)
    if vals.size == 1:
        v = vals.reshape(-1)[0]
        return float(v) if isinstance(kid, HarmonicHalfSpace) else complex(v)
    return vals


@njit(cache=True)
def _acc(s, c, x):
    t = s + x
    if abs(s) >= abs(x):
        c += (s - t) + x
    else:
        c += (x - t) + s
    return t, c


@njit(cache=True)
def _project_disk(zs, ws, coef_re, coef_im):
    out = np.empty((zs.shape[0], 2))
    for i in range(zs.shape[0]):
        zx, zy = zs[i, 0], zs[i, 1]
        sr, cr, si, ci = 0.0, 0.0, 0.0, 0.0
        for j in range(ws.shape[0]):
            wx, wy = ws[j, 0], ws[j, 1]
            # u = 1 - conj(w) z
            ur = 1.0 - (wx * zx + wy * zy)
            ui = -(wx * zy - wy * zx)
            # 1/u^2 = conj(u)^2 / |u|^4
            m2 = ur * ur + ui * ui
            kr = (ur * ur - ui * ui) / (m2 * m2)
            ki = (-2.0 * ur * ui) / (m2 * m2)
            sr, cr = _acc(sr, cr, kr * coef_re[j] - ki * coef_im[j])
            si, ci = _acc(si, ci, kr * coef_im[j] + ki * coef_re[j])
        out[i, 0] = sr + cr
        out[i, 1] = si + ci
    return out


@njit(cache=True)
def _project_halfplane(zs, ws, coef_re, coef_im):
    out = np.empty((zs.shape[0], 2))
    scale = -1.0 / np.pi
    for i in range(zs.shape[0]):
        zx, zy = zs[i, 0], zs[i, 1]
        sr, cr, si, ci = 0.0, 0.0, 0.0, 0.0
        for j in range(ws.shape[0]):
            # u = z - conj(w)
            ur = zx - ws[j, 0]
            ui = zy + ws[j, 1]
            m2 = ur * ur + ui * ui
            kr = scale * (ur * ur - ui * ui) / (m2 * m2)
            ki = scale * (-2.0 * ur * ui) / (m2 * m2)
            sr, cr = _acc(sr, cr, kr * coef_re[j] - ki * coef_im[j])
            si, ci = _acc(si, ci, kr * coef_im[j] + ki * coef_re[j])
        out[i, 0] = sr + cr
        out[i, 1] = si + ci
    return out


@njit(cache=True)
def _project_harmonic(xs, ys, coef_re, coef_im, n, const):
    out = np.empty((xs.shape[0], 2))
    half_power = (n + 2) / 2.0
    last = n - 1
    for i in range(xs.shape[0]):
        sr, cr, si, ci = 0.0, 0.0, 0.0, 0.0
        for j in range(ys.shape[0]):
            r2 = 0.0
            for a in range(last):
                d = xs[i, a] - ys[j, a]
                r2 += d * d
            s = xs[i, last] + ys[j, last]
            r2 += s * s
            k = const * (n * s - r2) / r2**half_power
            sr, cr = _acc(sr, cr, k * coef_re[j])
            si, ci = _acc(si, ci, k * coef_im[j])
        out[i, 0] = sr + cr
        out[i, 1] = si + ci
    return out


def project_many(kid, f: SampledFunction, points, grid: QuadratureGrid):
    """``sum_j w_j K(z, x_j) f(x_j)`` for every target ``z`` in ``points``.

    Returns a complex array (real-valued in substance for the harmonic kernel).
    """
    if grid.domain != kid.domain:
        raise DomainMismatchError(f"{kid.name} needs a grid on {kid.domain.name}, got {grid.domain.name}")
    pts = as_points(points, kid.domain.dim)
    _check_open(kid, pts, "target point")
    coef = np.asarray(grid.weights * f.values(grid), dtype=np.complex128)
    cre = np.ascontiguousarray(coef.real)
    cim = np.ascontiguousarray(coef.imag)
    nodes = np.ascontiguousarray(grid.nodes)
    pts = np.ascontiguousarray(pts)
    if isinstance(kid, BergmanDisk):
        raw = _project_disk(pts, nodes, cre, cim)
    elif isinstance(kid, BergmanHalfPlane):
        raw = _project_halfplane(pts, nodes, cre, cim)
    else:
        raw = _project_harmonic(pts, nodes, cre, cim, kid.n, kid.constant)
    return raw[:, 0] + 1j * raw[:, 1]


def project(kid, f: SampledFunction, z, grid: QuadratureGrid) -> complex:
    """Projection of ``f`` evaluated at the single point ``z``."""
    return complex(project_many(kid, f, z, grid)[0])


def _as_field(values, ndim):
    a = values.table if hasattr(values, "table") else values
    grid = getattr(values, "grid", None)
    a = np.asarray(a)
    if grid is not None:
        if grid.tensor_shape is None:
            raise ValidationError("residuals need a table on a tensor (box) grid")
        a = a.reshape(grid.tensor_shape)
    if a.ndim != ndim and ndim != -1:
        raise ValidationError(f"expected a {ndim}-d array of samples")
    return a


def holomorphy_residual(values, spacing: float) -> float:
    """Max Cauchy-Riemann residual ``|u_x - v_y| + |u_y + v_x|`` by central differences.

    ``values[i, j]`` is the field at ``x_0 + i h + i (y_0 + j h)``.
    """
    a = _as_field(values, 2)
    if min(a.shape) < 3:
        raise ValidationError("need at least a 3 x 3 grid")
    h2 = 2.0 * spacing
    u, v = a.real, a.imag
    ux = (u[2:, 1:-1] - u[:-2, 1:-1]) / h2
    uy = (u[1:-1, 2:] - u[1:-1, :-2]) / h2
    vx = (v[2:, 1:-1] - v[:-2, 1:-1]) / h2
    vy = (v[1:-1, 2:] - v[1:-1, :-2]) / h2
    return float(np.max(np.abs(ux - vy) + np.abs(uy + vx)))


def harmonicity_residual(values, spacing: float) -> float:
    """Max magnitude of the (2n+1)-point discrete Laplacian over interior nodes."""
    a = np.real(_as_field(values, -1))
    if a.ndim < 1 or min(a.shape) < 3:
        raise ValidationError("need at least 3 samples along every axis")
    inner = tuple(slice(1, -1) for _ in range(a.ndim))
    lap = np.zeros(tuple(s - 2 for s in a.shape))
    for axis in range(a.ndim):
        fwd = list(inner)
        bwd = list(inner)
        fwd[axis] = slice(2, None)
        bwd[axis] = slice(None, -2)
        lap += a[tuple(fwd)] - 2.0 * a[inner] + a[tuple(bwd)]
    return float(np.max(np.abs(lap))) / spacing**2
