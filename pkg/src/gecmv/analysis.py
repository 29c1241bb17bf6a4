"""Lyapunov exponents, reflectivity, resonance exponents and the 2L < B criterion."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import mpmath
import numpy as np

from .models import CoefficientSequence, ModelError
from .operator import MAX_DENSE_SITES, WindowError, truncate_unitary
from .reflect import ReflectivityCertificate, certify

__all__ = [
    "LyapunovEstimate", "lyapunov", "lyapunov_grid", "reflectivity_scan", "certify",
    "ReflectivityCertificate", "GroupElement", "DeltaEstimate", "delta_estimate", "uamo_group",
    "liouville_phase", "uamo_le_closed_form", "CriterionVerdict", "js_criterion", "ipr_diagnostics",
    "spectral_grid", "golden_mean", "LiouvillePhase",
]

_CHUNK = 4096
_RENORM_EVERY = 8


@dataclass(frozen=True)
class LyapunovEstimate:
    z: complex
    value: float
    n: int
    stderr: float
    convergence: tuple[tuple[int, float], ...] = ()
    samples: int = 1

    @property
    def uncertainty(self) -> float:
        """max(sample stderr, change over the last doubling of n)."""
        drift = abs(self.convergence[-1][1] - self.convergence[-2][1]) if len(self.convergence) > 1 else 0.0
        return max(self.stderr, drift)


def _spectral_norm(p11, p12, p21, p22):
    s = np.abs(p11) ** 2 + np.abs(p12) ** 2 + np.abs(p21) ** 2 + np.abs(p22) ** 2
    d = np.abs(p11 * p22 - p12 * p21)
    return np.sqrt(0.5 * (s + np.sqrt(np.maximum(s * s - 4 * d * d, 0.0))))


def _log_norm_segment(seq, zs, k0, n, checkpoints=()):
    """log ||N_{k0+n-1} ... N_{k0}|| for every z, plus values at checkpoint lengths."""
    zs = np.asarray(zs, dtype=complex)
    zi = 1.0 / zs
    p11 = np.ones_like(zs)
    p12 = np.zeros_like(zs)
    p21 = np.zeros_like(zs)
    p22 = np.ones_like(zs)
    logs = np.zeros(zs.shape)
    marks = {}
    checkpoints = set(checkpoints)
    done = 0
    while done < n:
        K = min(_CHUNK, n - done)
        ks = np.arange(k0 + done, k0 + done + K)
        a1, a0, am = seq.alpha(2 * ks + 1), seq.alpha(2 * ks), seq.alpha(2 * ks - 1)
        r1, r0, rm = seq.rho(2 * ks + 1), seq.rho(2 * ks), seq.rho(2 * ks - 1)
        if np.any(np.abs(r1 * r0) <= 1e-12):
            raise ArithmeticError("rho product below floor")
        pref = 1.0 / (r1 * r0)
        ca1, ca0, crm = np.conj(a1), np.conj(a0), np.conj(rm)
        # N = pref * (const + z * zc + z^-1 * zic), entrywise
        c11, i11 = pref * (ca0 * am + ca1 * a0), pref * ca1 * am
        c12, i12 = -pref * ca0 * crm, -pref * ca1 * crm
        c21, i21 = -pref * a0 * r1, -pref * am * r1
        i22 = pref * crm * r1
        for j in range(K):
            e11 = pref[j] * zs + c11[j] + i11[j] * zi
            e12 = c12[j] + i12[j] * zi
            e21 = c21[j] + i21[j] * zi
            e22 = i22[j] * zi
            p11, p12, p21, p22 = (e11 * p11 + e12 * p21, e11 * p12 + e12 * p22,
                                  e21 * p11 + e22 * p21, e21 * p12 + e22 * p22)
            step = done + j + 1
            if step % _RENORM_EVERY == 0 or step in checkpoints or step == n:
                peak = np.maximum(np.maximum(np.abs(p11), np.abs(p12)), np.maximum(np.abs(p21), np.abs(p22)))
                logs += np.log(peak)
                p11, p12, p21, p22 = p11 / peak, p12 / peak, p21 / peak, p22 / peak
                if step in checkpoints:
                    marks[step] = logs + np.log(_spectral_norm(p11, p12, p21, p22))
        done += K
    return logs + np.log(_spectral_norm(p11, p12, p21, p22)), marks


def lyapunov_grid(seq: CoefficientSequence, zs, n: int, samples: int = 1, start: int = 0,
                  stride: int | None = None) -> list[LyapunovEstimate]:
    """Birkhoff-average estimate of L(z) = lim (1/2n) log ||N^n_z|| on a grid of z.

    ``samples`` orbit segments of n factors start at start, start+stride, ...
    (stride defaults to n, i.e. consecutive segments).
    """
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    if np.any(np.abs(np.abs(zs) - 1.0) > 1e-12):
        warnings.warn("Lyapunov exponent requested off the unit circle", stacklevel=2)
    if n < 1 or samples < 1:
        raise ValueError("n and samples must be positive")
    stride = n if stride is None else stride
    checkpoints = []
    c = n
    while c >= 1000 and len(checkpoints) < 12:
        checkpoints.append(c)
        c //= 2
    checkpoints = sorted(set(checkpoints) - {n})
    per_sample = []
    traces = []
    for s in range(samples):
        total, marks = _log_norm_segment(seq, zs, start + s * stride, n, checkpoints)
        per_sample.append(total / (2 * n))
        traces.append({k: v / (2 * k) for k, v in marks.items()})
    vals = np.array(per_sample)
    mean = vals.mean(axis=0)
    stderr = vals.std(axis=0, ddof=1) / math.sqrt(samples) if samples > 1 else np.zeros_like(mean)
    out = []
    for i, z in enumerate(zs):
        trace = tuple((k, float(np.mean([t[k][i] for t in traces]))) for k in checkpoints) + ((n, float(mean[i])),)
        out.append(LyapunovEstimate(complex(z), float(mean[i]), n, float(stderr[i]), trace, samples))
    return out


def lyapunov(seq: CoefficientSequence, z: complex, n: int, samples: int = 1, start: int = 0,
             stride: int | None = None) -> LyapunovEstimate:
    return lyapunov_grid(seq, [z], n, samples, start, stride)[0]


def reflectivity_scan(seq: CoefficientSequence, B_grid: Sequence[float], zetas: Sequence[float],
                      data_window: tuple[int, int] | None = None) -> list[ReflectivityCertificate]:
    return [certify(seq, B, zeta, data_window) for B in B_grid for zeta in zetas]


# ---------------------------------------------------------------- resonances

@dataclass(frozen=True)
class GroupElement:
    """Element of T^d x Z_q: torus coordinates (floats or mpf) and a residue mod q."""

    torus: tuple = ()
    cyclic: int = 0
    q: int = 1

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("cyclic order must be positive")
        object.__setattr__(self, "cyclic", int(self.cyclic) % self.q)


def _torus_dist(x):
    x = x - mpmath.floor(x) if isinstance(x, mpmath.mpf) else x % 1.0
    return min(x, 1 - x)


@dataclass(frozen=True)
class DeltaEstimate:
    beta: GroupElement
    omega: GroupElement
    nmin: int
    nmax: int
    value: float
    witness: int
    infinite: bool = False


_NEAR_ZERO = 1e-6


def delta_estimate(beta: GroupElement, omega: GroupElement, nmax: int, nmin: int = 1) -> DeltaEstimate:
    """max over nmin <= |n| <= nmax of -log|||2 omega + n beta||| / |n|.

    |||.||| is the max of the torus distances and of 1[cyclic part != 0].
    Distances that look tiny in double precision are recomputed with mpmath
    at the current mp.dps, so high-precision phases are resolved correctly.
    An exact zero returns +inf with the witnessing n.
    """
    if nmin < 1 or nmax < nmin:
        raise ValueError("need 1 <= nmin <= nmax")
    if beta.q != omega.q or len(beta.torus) != len(omega.torus):
        raise ValueError("beta and omega live in different groups")
    q = beta.q
    n = np.concatenate([np.arange(nmin, nmax + 1), -np.arange(nmin, nmax + 1)])
    dist = np.zeros(len(n))
    cyc = (2 * omega.cyclic + n * beta.cyclic) % q
    dist[cyc != 0] = 1.0
    two_omega = [_frac(2 * w) for w in omega.torus]
    for b, tw in zip(beta.torus, two_omega):
        bf = float(_frac(b))
        x = (float(tw) + n * bf) % 1.0
        dist = np.maximum(dist, np.minimum(x, 1.0 - x))
    # refine near-zero candidates in high precision
    for i in np.nonzero(dist < _NEAR_ZERO)[0]:
        d = 1.0 if cyc[i] else 0.0
        for b, tw in zip(beta.torus, two_omega):
            d = max(d, _torus_dist(mpmath.mpf(tw) + int(n[i]) * mpmath.mpf(b)))
        dist[i] = float(d) if d > 0 else 0.0
        if d > 0 and dist[i] == 0.0:
            # below double range: keep the log exactly
            return _delta_with_logs(beta, omega, n, dist, cyc, two_omega, nmin, nmax)
    return _finish(beta, omega, n, np.log(np.where(dist > 0, dist, 1.0)), dist == 0, nmin, nmax)


def _frac(x):
    if isinstance(x, mpmath.mpf):
        return x - mpmath.floor(x)
    return float(x) % 1.0


def _delta_with_logs(beta, omega, n, dist, cyc, two_omega, nmin, nmax):
    logs = np.log(np.where(dist > 0, dist, 1.0))
    zero = dist == 0
    for i in np.nonzero(dist < _NEAR_ZERO)[0]:
        d = mpmath.mpf(1) if cyc[i] else mpmath.mpf(0)
        for b, tw in zip(beta.torus, two_omega):
            d = max(d, _torus_dist(mpmath.mpf(tw) + int(n[i]) * mpmath.mpf(b)))
        zero[i] = d == 0
        logs[i] = float(mpmath.log(d)) if d > 0 else 0.0
    return _finish(beta, omega, n, logs, zero, nmin, nmax)


def _finish(beta, omega, n, logs, zero, nmin, nmax):
    if np.any(zero):
        i = int(np.nonzero(zero)[0][0])
        return DeltaEstimate(beta, omega, nmin, nmax, math.inf, int(n[i]), True)
    rates = -logs / np.abs(n)
    i = int(np.argmax(rates))
    return DeltaEstimate(beta, omega, nmin, nmax, float(rates[i]), int(n[i]))


def uamo_group(Phi, theta):
    """beta = (Phi/2, 1), omega = (theta, 0) in T x Z_2."""
    return GroupElement((Phi / 2,), 1, 2), GroupElement((theta,), 0, 2)


def golden_mean(dps: int | None = None):
    with mpmath.workdps(dps or mpmath.mp.dps):
        return (mpmath.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class LiouvillePhase:
    theta: object               # mpf
    levels: tuple[int, ...]     # n with ||2 theta + n Phi|| < exp(-rate n) / 2
    rate: float
    dps: int


def _convergent_denominators(Phi, limit):
    """Continued-fraction denominators of Phi up to ``limit`` (exact ints)."""
    x = Phi - mpmath.floor(Phi)
    q_prev, q = 0, 1
    out = [1]
    while q < limit and x != 0:
        x = 1 / x
        a = int(mpmath.floor(x))
        x -= a
        q_prev, q = q, a * q + q_prev
        out.append(q)
    return out


def liouville_phase(Phi, rate: float, n_first: int = 1, n_last: int = 10**5, dps: int | None = None) -> LiouvillePhase:
    """Phase theta with ||2 theta + n_k Phi|| < exp(-rate n_k) along levels n_1 < n_2 < ...

    Each level adds the correction -(q Phi - p) for the first convergent
    denominator q of Phi with ||q Phi|| < exp(-rate n_k) / 4, so
    n_{k+1} = n_k + q. Levels are generated until n exceeds ``n_last``; the
    correction that would define the next level is still included, so every
    recorded level is resolved to the working precision. ``dps`` defaults to
    what that needs.
    """
    if dps is None:
        dps = int(rate * n_last / math.log(10)) + 60
    with mpmath.workdps(dps):
        Phi = mpmath.mpf(Phi)
        x = -n_first * Phi
        x -= mpmath.floor(x)
        levels = [n_first]
        n = n_first
        while True:
            target = mpmath.exp(-rate * n) / 4
            qs = _convergent_denominators(Phi, mpmath.mpf(10) ** (dps // 2))
            q = next((qq for qq in qs if _torus_dist(qq * Phi) < target), None)
            if q is None:
                if n <= n_last:
                    raise ArithmeticError("precision too low to resolve the next level")
                break
            corr = q * Phi
            corr -= mpmath.nint(corr)
            x -= corr
            n += q
            if n > n_last:
                break
            levels.append(n)
        x -= mpmath.floor(x)
        return LiouvillePhase(x / 2, tuple(levels), rate, dps)


def uamo_le_closed_form(lambda1: float, lambda2: float) -> float:
    """log[lambda2 (1 + lambda1') / (lambda1 (1 + lambda2'))]."""
    for v in (lambda1, lambda2):
        if not 0.0 < v < 1.0:
            raise ModelError("coupling constants must lie in (0,1)")
    l1p, l2p = math.sqrt(1 - lambda1**2), math.sqrt(1 - lambda2**2)
    return math.log(lambda2 * (1 + l1p) / (lambda1 * (1 + l2p)))


# ---------------------------------------------------------------- criterion

@dataclass(frozen=True)
class CriterionVerdict:
    z: complex
    L: float
    L_err: float
    B: float
    B_err: float
    verdict: str

    def as_row(self):
        return {"z_re": self.z.real, "z_im": self.z.imag, "L": self.L, "B": self.B, "verdict": self.verdict}


def js_criterion(L: LyapunovEstimate | float, B: float, L_err: float | None = None, B_err: float = 0.0,
                 z: complex = 1.0) -> CriterionVerdict:
    """'no-eigenvalue' iff 2 (L + L_err) < B - B_err; never asserts eigenvalues exist."""
    if isinstance(L, LyapunovEstimate):
        z = L.z
        L_err = L.uncertainty if L_err is None else L_err
        L = L.value
    L_err = 0.0 if L_err is None else L_err
    ok = 2 * (L + L_err) < B - B_err
    return CriterionVerdict(complex(z), float(L), float(L_err), float(B), float(B_err),
                            "no-eigenvalue" if ok else "inconclusive")


# ---------------------------------------------------------------- finite volume

_PENCIL_PHASE = np.exp(0.5j * (math.sqrt(5) - 1))
_EIG_RESIDUAL = 1e-8


def _unitary_eig(U):
    """Eigenpairs of a unitary via the Hermitian part of c U (shared eigenvectors).

    Falls back to a general eigensolver if some Rayleigh-quotient residual
    ||U v - lambda v|| exceeds 1e-8 (near-degenerate clusters).
    """
    H = 0.5 * (_PENCIL_PHASE * U + np.conj(_PENCIL_PHASE) * U.conj().T)
    _, V = np.linalg.eigh(H)
    lam = np.einsum("ij,ij->j", V.conj(), U @ V)
    if np.max(np.linalg.norm(U @ V - V * lam, axis=0)) > _EIG_RESIDUAL:
        lam, V = np.linalg.eig(U)
        V = V / np.linalg.norm(V, axis=0)
    return lam, V


def ipr_diagnostics(seq: CoefficientSequence, window: tuple[int, int]):
    """Eigenvalues of the cut unitary on the window and sum |psi|^4 per eigenvector."""
    if window[1] - window[0] + 1 > MAX_DENSE_SITES:
        raise WindowError(f"window exceeds {MAX_DENSE_SITES} sites")
    evals, vecs = _unitary_eig(truncate_unitary(seq, window).matrix)
    ipr = np.sum(np.abs(vecs) ** 4, axis=0)
    order = np.argsort(np.angle(evals), kind="stable")
    return evals[order], ipr[order]


def spectral_grid(seq: CoefficientSequence, window: tuple[int, int], count: int) -> np.ndarray:
    """``count`` points of the unit circle taken from the spectrum of a cut unitary."""
    U = truncate_unitary(seq, window).matrix
    ev = np.linalg.eigvals(U)
    ang = np.sort(np.angle(ev))
    # midpoints of count equal blocks: avoids the extreme angles, where cut
    # boundaries tend to leave isolated eigenvalues
    pick = ang[((np.arange(count) + 0.5) * len(ang) / count).astype(int)]
    return np.exp(1j * pick)
