"""
pivotbench Diagnostics App - Closed-form Bounds

Calculators for the VC dimension of pivot-induced ball families, the
sample size needed for uniform convergence, and Hoeffding's inequality.
Everything here is pure and never touches a metric.
"""

import math
from dataclasses import dataclass

from django.db import models
from django.utils.translation import gettext_lazy as _

from common.exceptions import ValidationError


class SpaceKind(models.TextChoices):
    L2 = 'l2', _('Euclidean space')
    LINF = 'linf', _('l-infinity space')
    HAMMING = 'hamming', _('Hamming cube')


@dataclass(frozen=True)
class BoundInputs:
    """Parameters of the sample-size bound: VC bound, accuracy and confidence."""

    delta: float
    eps: float
    eta: float

    def __post_init__(self):
        if self.delta < 1:
            raise ValidationError(f'VC dimension bound must be >= 1, got {self.delta!r}')
        for name in ('eps', 'eta'):
            value = getattr(self, name)
            if not 0 < value < 1:
                raise ValidationError(f'{name} must lie in (0, 1), got {value!r}')


def vc_bound(space, d, k):
    """
    Upper bound on the VC dimension of k-pivot discard sets in dimension d.

    l2: k (8d + 12) ln(6k); linf: k (16d + 4) ln(6k);
    hamming: k (8d + 8 log2 d + 4) ln(6k).
    """
    space = SpaceKind(space)
    if d < 1 or k < 1:
        raise ValidationError('d and k must be >= 1')
    if space == SpaceKind.L2:
        width = 8 * d + 12
    elif space == SpaceKind.LINF:
        width = 16 * d + 4
    else:
        width = 8 * d + 8 * math.log2(d) + 4
    return k * width * math.log(6 * k)


def sample_size_bound(b):
    """n >= (128 / eps^2) (delta ln(2 e^2 / eps) + ln(8 / eta)); callers take the ceiling."""
    return (128.0 / (b.eps * b.eps)) * (
        b.delta * math.log(2.0 * math.e ** 2 / b.eps) + math.log(8.0 / b.eta)
    )


def hoeffding_bound(n, eps):
    """2 exp(-2 n eps^2); may exceed 1 and is reported raw."""
    if n < 0:
        raise ValidationError('n must be >= 0')
    if eps <= 0:
        raise ValidationError('eps must be > 0')
    return 2.0 * math.exp(-2.0 * n * eps * eps)
