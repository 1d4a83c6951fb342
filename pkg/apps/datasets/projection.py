"""
pivotbench Datasets App - 2-D Projections

Projecting a high-dimensional sample onto two coordinates is the empirical
view of the observable diameter: uniform sphere samples collapse into a small
core around the origin as d grows, whichever axes are chosen.
"""

import numpy as np

from common.exceptions import ValidationError


def project2d(ds, i, j):
    """
    The (x_i, x_j) pairs of every point, in dataset order.

    Returns:
        np.ndarray of shape (n, 2)
    """
    for axis in (i, j):
        if not 0 <= axis < ds.dim:
            raise ValidationError(f'axis {axis} out of range for dimension {ds.dim}')
    if i == j:
        raise ValidationError('projection axes must differ')
    return np.column_stack((ds.points[:, i], ds.points[:, j]))


def projected_spread(projection):
    """Per-axis standard deviation of a projection (the shrinking-core measure)."""
    return tuple(float(s) for s in np.std(projection, axis=0))
