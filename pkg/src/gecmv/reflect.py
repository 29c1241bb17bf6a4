"""(B, zeta)-reflectivity certificates."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .models import CoefficientSequence, complexify_rho


@dataclass(frozen=True)
class ReflectivityCertificate:
    B: float
    zeta: float
    effective_window: int
    max_alpha_dev: float
    max_rho_dev: float
    rho_bound: float
    pass_: bool

    def as_row(self):
        return {"B": self.B, "zeta": self.zeta, "window": self.effective_window,
                "dev_alpha": self.max_alpha_dev, "dev_rho": self.max_rho_dev, "pass": int(self.pass_)}


def certify(seq: CoefficientSequence, B: float, zeta: float,
            data_window: tuple[int, int] | None = None) -> ReflectivityCertificate:
    """Check |(R_zeta alpha)_n - conj(alpha_n)| < exp(-B|zeta|) for |zeta - n| <= exp(B|zeta|).

    The radius is clipped so that both n and its mirror image stay inside the
    data window. The rho deviation is that of the complexified convention,
    |rho_{2zeta-n} + conj(rho_n)|, reported beside its a-priori bound
    2 r0 / sqrt(1 - r0^2) * exp(-B|zeta|).
    """
    two_z = int(round(2 * zeta))
    if abs(two_z - 2 * zeta) > 1e-12:
        raise ValueError("zeta must be a half-integer")
    lo, hi = data_window if data_window is not None else seq.window
    room = min(zeta - lo, hi - zeta)
    if room < 0:
        raise ValueError("center outside the data window")
    log_radius = B * abs(zeta)
    radius = room if log_radius > math.log(room + 1.0) else min(room, math.exp(log_radius))
    n = np.arange(math.ceil(zeta - radius), math.floor(zeta + radius) + 1)
    if len(n) == 0:
        raise ValueError("empty window")
    a, a_ref = seq.alpha(n), seq.alpha(two_z - n)
    dev_a = float(np.max(np.abs(a_ref - np.conj(a))))
    rc, rc_ref = complexify_rho(a), complexify_rho(a_ref)
    dev_r = float(np.max(np.abs(rc_ref + np.conj(rc))))
    tol = math.exp(-log_radius)
    r0 = float(np.max(np.abs(np.concatenate([a, a_ref]))))
    rho_bound = 2 * r0 / math.sqrt(1 - r0 * r0) * tol
    return ReflectivityCertificate(B, zeta, int(radius), dev_a, dev_r, rho_bound, dev_a < tol)
