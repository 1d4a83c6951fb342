"""
pivotbench Diagnostics App - Concentration of Measure

The concentration function of the unit sphere S^(d-1) has the closed form

    alpha_d(eps) = int_eps^(pi/2) cos^(d-2) x dx / (2 int_0^(pi/2) cos^(d-2) x dx)

evaluated here numerically. The integrand is rescaled by its value at the
lower limit and computed in log-space, so large d never underflows.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from apps.metrics.distances import MetricKind, distances_to
from common.exceptions import ValidationError
from common.utils import lower_median

logger = logging.getLogger(__name__)

HALF_PI = math.pi / 2
INTEGRATION_TOLERANCE = 1e-12


def _check_dimension(d):
    if isinstance(d, bool) or int(d) != d or d < 2:
        raise ValidationError(f'sphere dimension must be an integer >= 2, got {d!r}')
    return int(d)


@lru_cache(maxsize=4096)
def _scaled_tail(d, eps):
    """int_eps^(pi/2) (cos x / cos eps)^(d-2) dx."""
    if eps >= HALF_PI:
        return 0.0
    power = d - 2
    if power == 0:
        return HALF_PI - eps
    log_base = math.log(math.cos(eps))

    def integrand(x):
        c = math.cos(x)
        if c <= 0.0:
            return 0.0
        return math.exp(power * (math.log(c) - log_base))

    value, _ = integrate.quad(
        integrand, eps, HALF_PI,
        epsabs=INTEGRATION_TOLERANCE, epsrel=INTEGRATION_TOLERANCE, limit=500,
    )
    return value


def sphere_concentration(d, eps):
    """
    alpha_d(eps) for geodesic radius eps in [0, pi/2]; result in [0, 1/2].

    alpha_d(0) is exactly 1/2 and alpha_2(eps) = 1/2 - eps/pi.
    """
    d = _check_dimension(d)
    eps = float(eps)
    if not 0.0 <= eps <= HALF_PI:
        raise ValidationError(f'eps must lie in [0, pi/2], got {eps!r}')
    if eps == 0.0:
        return 0.5
    half = _scaled_tail(d, 0.0)
    tail = _scaled_tail(d, eps)
    if tail == 0.0:
        return 0.0
    log_alpha = (d - 2) * math.log(math.cos(eps)) + math.log(tail) - math.log(2.0 * half)
    return min(0.5, math.exp(log_alpha))


def sphere_gaussian_bound(d, eps):
    """The Gaussian-type sphere bound exp(-(d - 1) eps^2 / 2)."""
    d = _check_dimension(d)
    return math.exp(-(d - 1) * eps * eps / 2.0)


@dataclass(frozen=True)
class LevyBound:
    raw: float
    reported: float


def levy_bound(C, c, d, eps):
    """
    Normal Levy family bound C exp(-c eps^2 d).

    The reported value is capped at 1/2, the largest a concentration function
    can take; the raw value is kept alongside.
    """
    if C <= 0 or c <= 0:
        raise ValidationError('Levy constants C and c must be positive')
    if eps < 0:
        raise ValidationError('eps must be >= 0')
    if d < 1:
        raise ValidationError('d must be >= 1')
    raw = C * math.exp(-c * eps * eps * d)
    return LevyBound(raw=raw, reported=min(raw, 0.5))


@dataclass(frozen=True)
class LipschitzReport:
    median: float
    deviation_fraction: float
    bound: float


def lipschitz_deviation(ds, pivot_id, eps, counter, alpha=None):
    """
    Deviation of f = rho(., p) from its median over the whole dataset.

    bound is 2 alpha(eps). alpha defaults to the exact sphere value when the
    dataset is searched under the geodesic metric, and is otherwise taken
    from the caller (nan when unknown). Charges n.
    """
    if isinstance(pivot_id, bool) or int(pivot_id) != pivot_id or not 0 <= pivot_id < ds.n:
        raise ValidationError(f'pivot id {pivot_id!r} out of range for n={ds.n}')
    if eps <= 0:
        raise ValidationError('eps must be > 0')
    values = distances_to(ds.metric, ds.points[int(pivot_id)], ds.points, counter)
    median = lower_median(values)
    fraction = float(np.count_nonzero(np.abs(values - median) > eps)) / ds.n
    if alpha is None and ds.metric == MetricKind.GEODESIC:
        alpha = sphere_concentration(ds.dim, min(eps, HALF_PI))
    bound = math.nan if alpha is None else 2.0 * alpha
    return LipschitzReport(median=median, deviation_fraction=fraction, bound=bound)
