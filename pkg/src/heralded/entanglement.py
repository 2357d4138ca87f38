"""van Loock-Furusawa separability test adapted to the two-squeezer scheme.

With nullifiers N1 = t X1 + rho X2 and
N2 = -rho (X1 cos(phi/2) + Y1 sin(phi/2)) + t (X2 cos(phi/2) + Y2 sin(phi/2)),
separable states obey  <dN1^2> + <dN2^2> >= |[u1, v1]| + |[u2, v2]|,
which for this scheme reads  e^{-2r}/2 + e^{-2r}/2 >= 2 t rho sin(phi/2).
A violation certifies entanglement; the converse is not claimed, so the
report says "separable by this criterion" rather than "separable".
"""

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class EntanglementReport:
    degree: float
    entangled: bool
    nullifier_variance_sum: float


def entanglement_degree(r, phi, t):
    if r < 0 or not 0 <= phi <= math.pi or not 0 <= t <= 1:
        raise ValueError("need r >= 0, 0 <= phi <= pi, 0 <= t <= 1")
    degree = 2 * t * math.sqrt(1 - t * t) * math.sin(phi / 2) * math.exp(2 * r)
    return EntanglementReport(
        degree=degree,
        entangled=degree > 1,
        nullifier_variance_sum=math.exp(-2 * r),
    )


def entangled_t_interval(r, phi):
    """(t_low, t_high) where the criterion certifies entanglement, or None."""
    s = math.sin(phi / 2)
    if s == 0:
        return None
    c = math.exp(-2 * r) / (2 * s)  # need t*rho > c, and t*rho <= 1/2
    disc = 1 - 4 * c * c
    if disc <= 0:
        return None
    root = math.sqrt(disc)
    return math.sqrt((1 - root) / 2), math.sqrt((1 + root) / 2)


def separability_boundary(r, phi_samples):
    """Rows (phi, t_low, t_high) on a uniform phi grid over [0, pi]; NaNs where nothing is certified."""
    if phi_samples < 2:
        raise ValueError("phi_samples must be >= 2")
    rows = []
    for phi in np.linspace(0, math.pi, phi_samples):
        interval = entangled_t_interval(r, float(phi))
        lo, hi = interval if interval else (math.nan, math.nan)
        rows.append((float(phi), lo, hi))
    return rows


def degree_grid(r, phis, ts):
    """Entanglement degree on the outer grid phis x ts (shape (len(phis), len(ts)))."""
    phis = np.asarray(phis, dtype=float)[:, None]
    ts = np.asarray(ts, dtype=float)[None, :]
    return 2 * ts * np.sqrt(1 - ts * ts) * np.sin(phis / 2) * math.exp(2 * r)
