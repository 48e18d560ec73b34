"""Blow-up experiments for the modular inequality ``rho_p(T f) <= C rho_p(f)``.

For witness sets ``K-`` (low exponent) and ``K+`` (high exponent) inside a
neighborhood where the kernel is positive, the test functions ``k chi_{K-}``
give

    lhs(k) = int_{K+} |k T chi_{K-}|^{p(z)} dA   ~  k^{s+}
    rhs(k) = int     (k chi_{K-})^{p(z)}   dA   ~  k^{s-}

so ``lhs / rhs`` grows like ``k^{s+ - s-}`` and no constant ``C`` can work
unless the exponent is constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domains import Box, Region, build_grid, inscribed_box, measure
from .errors import ExponentLocallyConstantError, ScheduleError, ValidationError
from .exponents import ExponentField, find_gap_sets
from .modular import Indicator, modular_terms
from .operators import project_many
from .summation import compensated_sum
from .verifier import kernel_infimum

SLOPE_THRESHOLD = 0.1
K_MAX = 1e8


@dataclass
class FalsificationReport:
    kernel_id: object
    exponent: str
    K_minus: Region
    K_plus: Region
    s_minus: float
    s_plus: float
    c_tau: float
    measure_minus: float
    measure_plus: float
    k_schedule: list
    lhs: list
    rhs: list
    ratios: list
    fitted_slope: float
    predicted_slope: float
    verdict: str
    gap_found: bool = True

    @property
    def violated(self):
        return self.verdict == "Violated"


def geometric_schedule(k_min: float, k_max: float, count: int) -> list:
    if count < 2 or not 0 < k_min < k_max:
        raise ScheduleError("geometric schedule needs count >= 2 and 0 < k_min < k_max")
    return [float(k) for k in np.geomspace(k_min, k_max, count)]


def _check_schedule(ks):
    ks = [float(k) for k in ks]
    if len(ks) < 4:
        raise ScheduleError(f"k schedule too short ({len(ks)} values, need >= 4)")
    if any(not b > a for a, b in zip(ks, ks[1:])) or ks[0] <= 0:
        raise ScheduleError("k schedule must be positive and strictly increasing")
    if ks[-1] / ks[0] < 1e4 * (1 - 1e-12):
        raise ScheduleError("k schedule must span at least four decades")
    if ks[-1] > K_MAX:
        raise ScheduleError(f"k values above {K_MAX:g} risk overflow")
    return ks


def _fallback_split(K):
    """Two separated boxes inside K, used when no exponent gap exists."""
    box = inscribed_box(K)
    lo, hi = np.array(box.lo), np.array(box.hi)
    width = hi[0] - lo[0]
    lo_m, hi_m = lo.copy(), hi.copy()
    hi_m[0] = lo[0] + 0.4 * width
    lo_p, hi_p = lo.copy(), hi.copy()
    lo_p[0] = lo[0] + 0.6 * width
    return Box(lo_m, hi_m), Box(lo_p, hi_p)


def fit_slope(ks, ratios):
    """Least-squares slope of ``log ratio`` against ``log k`` over the top half of the schedule."""
    start = len(ks) // 2
    x = np.log(np.asarray(ks[start:]))
    y = np.log(np.asarray(ratios[start:]))
    return float(np.polyfit(x, y, 1)[0])


def falsify(kid, p: ExponentField, tau, K: Region, k_schedule, resolution: int = 64,
            slope_threshold: float = SLOPE_THRESHOLD, infimum_resolution: int | None = None) -> FalsificationReport:
    """Run the scaling experiment for ``kid`` and exponent ``p`` around ``tau``.

    Verdict ``Violated`` requires a fitted slope of at least ``slope_threshold``
    and strictly increasing ratios over the top half of the schedule.  When
    no gap sets exist the report uses two fixed boxes inside ``K`` and is
    ``Bounded`` with predicted slope 0.
    """
    ks = _check_schedule(k_schedule)
    if p.domain != kid.domain:
        raise ValidationError(f"exponent on {p.domain.name}, kernel on {kid.domain.name}")
    domain = kid.domain
    c = kernel_infimum(kid, K, infimum_resolution)
    try:
        K_minus, K_plus, s_minus, s_plus = find_gap_sets(p, tau, K, resolution)
        gap = True
    except ExponentLocallyConstantError:
        K_minus, K_plus = _fallback_split(K)
        gap = False

    g_minus = build_grid(K_minus, domain, resolution)
    g_plus = build_grid(K_plus, domain, resolution)
    p_minus_nodes = p(g_minus.nodes)
    p_plus_nodes = p(g_plus.nodes)
    if not gap:
        s_minus, s_plus = float(p_minus_nodes.max()), float(p_plus_nodes.min())

    # T chi_{K-} on the K+ nodes, shared by every k
    table = np.abs(project_many(kid, Indicator(K_minus, domain), g_plus.nodes, g_minus))
    ones = np.ones(len(g_minus))

    lhs, rhs = [], []
    for k in ks:
        lk = math.log(k)
        lhs.append(compensated_sum(modular_terms(table, p_plus_nodes, g_plus.weights, lk)))
        rhs.append(compensated_sum(modular_terms(ones, p_minus_nodes, g_minus.weights, lk)))
    ratios = [a / b for a, b in zip(lhs, rhs)]
    slope = fit_slope(ks, ratios)
    top = ratios[len(ks) // 2 :]
    increasing = all(b > a for a, b in zip(top, top[1:]))
    verdict = "Violated" if gap and slope >= slope_threshold and increasing else "Bounded"
    return FalsificationReport(
        kernel_id=kid,
        exponent=p.describe(),
        K_minus=K_minus,
        K_plus=K_plus,
        s_minus=s_minus,
        s_plus=s_plus,
        c_tau=c,
        measure_minus=measure(K_minus, domain),
        measure_plus=measure(K_plus, domain),
        k_schedule=ks,
        lhs=lhs,
        rhs=rhs,
        ratios=ratios,
        fitted_slope=slope,
        predicted_slope=(s_plus - s_minus) if gap else 0.0,
        verdict=verdict,
        gap_found=gap,
    )


def contradiction_scale(s_minus, s_plus, c_measure_minus, measure_plus, measure_minus, C):
    """Infimum of the ``k`` with ``k c|K-| > 1``, ``k > 1`` and
    ``|K+| (k c|K-|)^{s+} > C |K-| k^{s-}``.

    Closed form: the last condition is ``k^{s+ - s-} > C |K-| / (|K+| (c|K-|)^{s+})``.
    """
    if not s_plus > s_minus:
        raise ValidationError("contradiction needs s_plus > s_minus")
    if not (C > 0 and c_measure_minus > 0 and measure_plus > 0 and measure_minus > 0):
        raise ValidationError("constants and measures must be positive")
    log_k3 = (math.log(C * measure_minus) - math.log(measure_plus) - s_plus * math.log(c_measure_minus)) / (
        s_plus - s_minus
    )
    return max(1.0, 1.0 / c_measure_minus, math.exp(log_k3))


def _chain_holds(k, s_minus, s_plus, cm, m_plus, m_minus, C):
    return k > 1 and k * cm > 1 and m_plus * (k * cm) ** s_plus > C * m_minus * k**s_minus


def proof_chain_check(kid, p: ExponentField, report: FalsificationReport, C_hypothetical: float):
    """Witness scale at which ``rho_p(T f) <= C rho_p(f)`` fails for ``C = C_hypothetical``.

    Returns ``(k_star, lhs_bound, rhs_bound)`` with
    ``lhs_bound = |K+| (k_star c |K-|)^{s+}`` and ``rhs_bound = C |K-| k_star^{s-}``.
    ``k_star`` is the first schedule value satisfying all conditions, otherwise
    the closed-form threshold nudged just above itself.
    """
    if not report.violated:
        raise ValidationError("proof chain needs a report with verdict Violated")
    if report.kernel_id != kid or report.exponent != p.describe():
        raise ValidationError("report was produced for a different kernel or exponent")
    if not C_hypothetical > 0:
        raise ValidationError("hypothetical constant must be positive")
    args = (report.s_minus, report.s_plus, report.c_tau * report.measure_minus,
            report.measure_plus, report.measure_minus, C_hypothetical)
    k_star = next((k for k in report.k_schedule if _chain_holds(k, *args)), None)
    if k_star is None:
        k_star = contradiction_scale(*args) * (1 + 1e-9)
    s_minus, s_plus, cm, m_plus, m_minus, C = args
    return k_star, m_plus * (k_star * cm) ** s_plus, C * m_minus * k_star**s_minus
