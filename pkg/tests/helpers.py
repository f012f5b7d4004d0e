"""Shared helpers for the test suite: samplers and finite differences."""

from __future__ import annotations

import math

import numpy as np

from jm3body.conformal import PotentialKind, conformal_v
from jm3body.coords import MassConfig, Space


def random_shape(rng, signed_xi2: bool = True, q_floor: float = 0.3, s2e_floor: float = 0.3):
    """Random (eta, xi2) away from collisions and chart poles."""
    while True:
        eta = rng.uniform(0.05, math.pi / 2.0 - 0.05)
        if signed_xi2:
            xi2 = rng.uniform(-math.pi, math.pi)
        else:
            xi2 = rng.uniform(0.0, math.pi)
        if math.sin(2.0 * eta) < s2e_floor:
            continue
        v = conformal_v(eta, xi2)
        if min(2.0 / v[0], 2.0 / v[1], 2.0 / v[2]) >= q_floor:
            return eta, xi2


def random_point(rng, space: Space, r_range=(0.5, 2.0), **kw) -> np.ndarray:
    """Random interior chart point of a space, away from degeneracies."""
    eta, xi2 = random_shape(rng, signed_xi2=space in (Space.C2, Space.S3), **kw)
    vals = {
        "eta": eta,
        "xi2": xi2,
        "r": rng.uniform(*r_range),
        "xi1": rng.uniform(0.1, 2.0 * math.pi - 0.1),
    }
    return np.array([vals[name] for name in space.coord_names])

def fd_metric_derivative(fld, x: np.ndarray, step: float = 1e-6) -> np.ndarray:
    """Central-difference derivative of the metric components."""
    n = len(x)
    g0, _ = fld.metric(x)
    out = np.empty(g0.shape + (n,))
    for k in range(n):
        xp = x.copy()
        xp[k] += step
        xm = x.copy()
        xm[k] -= step
        gp, _ = fld.metric(xp)
        gm, _ = fld.metric(xm)
        out[:, :, k] = (gp - gm) / (2.0 * step)
    return out


def pullback(g: np.ndarray, jac: np.ndarray) -> np.ndarray:
    """Metric components after a chart change with Jacobian d(new)/d(old)."""
    jinv = np.linalg.inv(jac)
    return jinv.T @ g @ jinv
