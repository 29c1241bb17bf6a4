"""Transfer matrices of E u = z u, their scaled products, solutions and Wronskians.

All 2x2 matrices are plain complex ndarrays. Site-indexed helpers accept an
int or an int array for ``n`` (array input gives a stack of shape (len, 2, 2)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .models import CoefficientSequence
from .reflect import ReflectivityCertificate, certify

RHO_FLOOR = 1e-12
SIGMA = np.array([[0, 1], [1, 0]], dtype=complex)
_RESCALE_HI = 2.0**64
_RESCALE_LO = 2.0**-64
_OVERFLOW = 1e250


class CocycleError(ArithmeticError):
    pass


class SolutionOverflow(CocycleError):
    def __init__(self, msg, partial):
        super().__init__(msg)
        self.partial = partial


def _check(rho_prod, z):
    if np.any(np.abs(rho_prod) <= RHO_FLOOR):
        raise CocycleError("rho product below floor")
    if np.any(np.asarray(z) == 0):
        raise CocycleError("z = 0")


def _stack(a11, a12, a21, a22, scalar):
    out = np.stack([np.stack([a11, a12], -1), np.stack([a21, a22], -1)], -2)
    return out[0] if scalar else out


def _sites(seq, n, offsets):
    scalar = np.ndim(n) == 0
    n = np.atleast_1d(np.asarray(n, dtype=np.int64))
    a = {j: seq.alpha(2 * n + j) for j in offsets}
    r = {j: seq.rho(2 * n + j) for j in offsets}
    return a, r, scalar


def xfrak(a2, a1, a0, r2, r1, r0, z):
    """The generic transfer pattern shared by M and N."""
    zi = 1.0 / z
    ca1, ca0, cr0 = np.conj(a1), np.conj(a0), np.conj(r0)
    pref = 1.0 / (r2 * r1)
    return np.stack([
        np.stack([pref * (zi + a2 * ca1 + a1 * ca0 + a2 * ca0 * z), pref * (-cr0 * a1 - cr0 * a2 * z)], -1),
        np.stack([pref * (-r2 * ca1 - r2 * ca0 * z), pref * (r2 * cr0 * z)], -1),
    ], -2)


def transfer_M(seq: CoefficientSequence, n, z: complex):
    """[u(2n+1), u(2n)] = M_{n,z} [u(2n-1), u(2n-2)]."""
    a, r, scalar = _sites(seq, n, (0, -1, -2))
    _check(r[0] * r[-1], z)
    a0, am, amm = a[0], a[-1], a[-2]
    pref = 1.0 / (r[0] * r[-1])
    crmm = np.conj(r[-2])
    return _stack(pref * (1 / z + a0 * np.conj(am) + am * np.conj(amm) + a0 * np.conj(amm) * z),
                  pref * (-crmm * am - crmm * a0 * z),
                  pref * (-r[0] * np.conj(am) - r[0] * np.conj(amm) * z),
                  pref * (r[0] * crmm * z), scalar)


def det_M(seq, n):
    return np.conj(seq.rho(2 * n - 1)) * np.conj(seq.rho(2 * n - 2)) / (seq.rho(2 * n) * seq.rho(2 * n - 1))


def transfer_N(seq: CoefficientSequence, n, z: complex):
    """[u(2n+2), u(2n+1)] = N_{n,z} [u(2n), u(2n-1)]."""
    a, r, scalar = _sites(seq, n, (1, 0, -1))
    _check(r[1] * r[0], z)
    pref = 1.0 / (r[1] * r[0])
    ca1, ca0, crm = np.conj(a[1]), np.conj(a[0]), np.conj(r[-1])
    zi = 1.0 / z
    return _stack(pref * (z + ca0 * a[-1] + ca1 * a[-1] * zi + ca1 * a[0]),
                  pref * (-ca0 * crm - ca1 * crm * zi),
                  pref * (-a[0] * r[1] - a[-1] * r[1] * zi),
                  pref * (crm * r[1] * zi), scalar)


def det_N(seq, n):
    return np.conj(seq.rho(2 * n)) * np.conj(seq.rho(2 * n - 1)) / (seq.rho(2 * n + 1) * seq.rho(2 * n))


def transfer_N_inv(seq: CoefficientSequence, n, z: complex):
    """Closed form of N_{n,z}^{-1}."""
    a, r, scalar = _sites(seq, n, (1, 0, -1))
    cr0, crm = np.conj(r[0]), np.conj(r[-1])
    _check(cr0 * crm, z)
    pref = 1.0 / (cr0 * crm)
    ca1, ca0 = np.conj(a[1]), np.conj(a[0])
    zi = 1.0 / z
    return _stack(pref * (crm * r[1] * zi),
                  pref * (ca0 * crm + ca1 * crm * zi),
                  pref * (a[0] * r[1] + a[-1] * r[1] * zi),
                  pref * (z + ca0 * a[-1] + ca1 * a[-1] * zi + ca1 * a[0]), scalar)


def transfer_N_mirror(seq: CoefficientSequence, n, z: complex):
    """sigma N_{n,z} sigma: [u(2n+1), u(2n+2)] from [u(2n-1), u(2n)]."""
    a, r, scalar = _sites(seq, n, (1, 0, -1))
    _check(r[1] * r[0], z)
    pref = 1.0 / (r[1] * r[0])
    ca1, ca0, crm = np.conj(a[1]), np.conj(a[0]), np.conj(r[-1])
    zi = 1.0 / z
    return _stack(pref * (crm * r[1] * zi),
                  pref * (-a[0] * r[1] - a[-1] * r[1] * zi),
                  pref * (-ca0 * crm - ca1 * crm * zi),
                  pref * (z + ca0 * a[-1] + ca1 * a[-1] * zi + ca1 * a[0]), scalar)


_FLAVORS = {"M": transfer_M, "N": transfer_N, "N_inv": transfer_N_inv, "N_mirror": transfer_N_mirror}


@dataclass(frozen=True)
class ScaledProduct:
    """unit * exp(log_scale); the unit's largest entry has modulus in [1/2, 1)."""

    unit: np.ndarray
    log_scale: float

    def value(self) -> np.ndarray:
        return self.unit * math.exp(self.log_scale)

    def log_norm(self) -> float:
        return math.log(np.linalg.norm(self.unit, 2)) + self.log_scale

    def __matmul__(self, other: "ScaledProduct") -> "ScaledProduct":
        return _normalize(self.unit @ other.unit, self.log_scale + other.log_scale)


def _normalize(P, log_scale):
    peak = float(np.max(np.abs(P)))
    if peak == 0.0 or not math.isfinite(peak):
        raise CocycleError("degenerate or non-finite product")
    _, e = math.frexp(peak)
    return ScaledProduct(P * 2.0**-e, log_scale + e * math.log(2.0))


def product_scaled(seq: CoefficientSequence, z: complex, rng: tuple[int, int], flavor: str = "N") -> ScaledProduct:
    """Ordered product of the factors k = rng[0] .. rng[1]-1.

    M, N and N_mirror multiply later factors on the left (propagation order);
    N_inv multiplies them on the right, so flavor N_inv over a range is the
    inverse of flavor N over the same range.
    """
    k0, k1 = rng
    if k1 <= k0:
        return ScaledProduct(np.eye(2, dtype=complex), 0.0)
    mats = _FLAVORS[flavor](seq, np.arange(k0, k1), z)
    left = flavor != "N_inv"
    p11, p12, p21, p22 = 1 + 0j, 0j, 0j, 1 + 0j
    e_total = 0
    for A in mats:
        a11, a12, a21, a22 = complex(A[0, 0]), complex(A[0, 1]), complex(A[1, 0]), complex(A[1, 1])
        if left:
            p11, p12, p21, p22 = (a11 * p11 + a12 * p21, a11 * p12 + a12 * p22,
                                  a21 * p11 + a22 * p21, a21 * p12 + a22 * p22)
        else:
            p11, p12, p21, p22 = (p11 * a11 + p12 * a21, p11 * a12 + p12 * a22,
                                  p21 * a11 + p22 * a21, p21 * a12 + p22 * a22)
        peak = max(abs(p11), abs(p12), abs(p21), abs(p22))
        if not _RESCALE_LO <= peak <= _RESCALE_HI:
            if peak == 0.0 or not math.isfinite(peak):
                raise CocycleError("degenerate or non-finite product")
            _, e = math.frexp(peak)
            s = 2.0**-e
            p11, p12, p21, p22 = p11 * s, p12 * s, p21 * s, p22 * s
            e_total += e
    return _normalize(np.array([[p11, p12], [p21, p22]]), e_total * math.log(2.0))


def naive_product(mats, left: bool = True) -> np.ndarray:
    P = np.eye(2, dtype=complex)
    for A in mats:
        P = A @ P if left else P @ A
    return P


# ---------------------------------------------------------------- solutions

@dataclass(frozen=True)
class SolutionSlice:
    """u(k) for k = start .. start+len(values)-1 at spectral parameter z."""

    z: complex
    start: int
    values: np.ndarray

    @property
    def stop(self) -> int:
        return self.start + len(self.values) - 1

    def __call__(self, k):
        k = np.asarray(k, dtype=np.int64)
        if np.any(k < self.start) or np.any(k > self.stop):
            raise IndexError("site outside the solution slice")
        out = self.values[k - self.start]
        return complex(out) if out.ndim == 0 else out

    def phi(self, n) -> np.ndarray:
        """Phi(n) = [u(2n), u(2n-1)]."""
        return np.array([self(2 * n), self(2 * n - 1)])

    def reflected(self, m: int) -> "SolutionSlice":
        """u_i(k) = u(4m - k - 1)."""
        return SolutionSlice(self.z, 4 * m - self.stop - 1, self.values[::-1].copy())

    def scaled(self, c) -> "SolutionSlice":
        return SolutionSlice(self.z, self.start, self.values * c)

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def __add__(self, other):
        lo, hi = max(self.start, other.start), min(self.stop, other.stop)
        return SolutionSlice(self.z, lo, self(np.arange(lo, hi + 1)) + other(np.arange(lo, hi + 1)))

    def __sub__(self, other):
        return self + other.scaled(-1.0)


def propagate(seq: CoefficientSequence, z: complex, u0: tuple[complex, complex],
              rng: tuple[int, int]) -> SolutionSlice:
    """Solution of E u = z u with u(0), u(-1) = u0, on sites rng[0]..rng[1].

    Uses N forward and the closed-form N^{-1} backward.
    """
    lo, hi = rng
    if lo > -1 or hi < 0:
        raise ValueError("range must contain sites -1 and 0")
    _check(1.0, z)
    n_hi = (hi - 1) // 2 + 1          # N_{n} produces sites 2n+1, 2n+2
    n_lo = (lo + 1) // 2              # N_{n}^{-1} produces 2n, 2n-1
    vals: dict[int, complex] = {0: complex(u0[0]), -1: complex(u0[1])}

    def partial():
        ks = sorted(k for k in vals if lo <= k <= hi)
        return SolutionSlice(z, ks[0], np.array([vals[k] for k in ks]))

    if n_hi > 0:
        Ns = transfer_N(seq, np.arange(0, n_hi), z)
        x, y = vals[0], vals[-1]
        for n, A in enumerate(Ns):
            x, y = A[0, 0] * x + A[0, 1] * y, A[1, 0] * x + A[1, 1] * y
            if abs(x) > _OVERFLOW or abs(y) > _OVERFLOW:
                raise SolutionOverflow("solution exceeds the overflow budget", partial())
            vals[2 * n + 2], vals[2 * n + 1] = complex(x), complex(y)
    if n_lo < 0:
        Ninv = transfer_N_inv(seq, np.arange(-1, n_lo - 1, -1), z)
        x, y = vals[0], vals[-1]
        for j, A in enumerate(Ninv):
            n = -1 - j
            x, y = A[0, 0] * x + A[0, 1] * y, A[1, 0] * x + A[1, 1] * y
            if abs(x) > _OVERFLOW or abs(y) > _OVERFLOW:
                raise SolutionOverflow("solution exceeds the overflow budget", partial())
            vals[2 * n], vals[2 * n - 1] = complex(x), complex(y)
    ks = np.arange(lo, hi + 1)
    return SolutionSlice(z, lo, np.array([vals[int(k)] for k in ks]))


def propagate_M(seq: CoefficientSequence, z: complex, u0, hi: int) -> SolutionSlice:
    """Forward solution on sites -1..hi via the M recursion.

    u(1) comes from the first coordinate relation at site 0; after that
    [u(2n+1), u(2n)] = M_{n,z} [u(2n-1), u(2n-2)] needs u(-2) only through
    M_1, which maps [u(1), u(0)].
    """
    u_0, u_m1 = complex(u0[0]), complex(u0[1])
    a_m1, a_0 = seq.alpha(-1), seq.alpha(0)
    r_m1, r_0 = seq.rho(-1), seq.rho(0)
    u_1 = (np.conj(r_m1) * u_m1 - a_m1 * u_0 - a_0 * z * u_0) / (r_0 * z)
    vals = {-1: u_m1, 0: u_0, 1: u_1}
    n_hi = hi // 2 + 1
    if n_hi > 1:
        Ms = transfer_M(seq, np.arange(1, n_hi), z)
        x, y = u_1, u_0
        for j, A in enumerate(Ms):
            n = j + 1
            x, y = A[0, 0] * x + A[0, 1] * y, A[1, 0] * x + A[1, 1] * y
            vals[2 * n + 1], vals[2 * n] = complex(x), complex(y)
    return SolutionSlice(z, -1, np.array([vals[k] for k in range(-1, hi + 1)]))


def eigen_residual(seq: CoefficientSequence, u: SolutionSlice) -> np.ndarray:
    """|[E u](n) - z u(n)| on the interior sites of the slice."""
    from .operator import apply
    # [E u](n) reads u at 2(n//2)-1 .. 2(n//2)+2
    ns = np.arange(u.start + 2, u.stop - 1)
    return np.abs(apply(seq, u.values, ns, u.start) - u.z * u(ns))


# ---------------------------------------------------------------- Wronskians

def _gauge_phase(seq, ns):
    """G(n) = prod_{k=0}^{2n} rho_k / conj(rho_k), continued to negative n so W is constant."""
    ns = np.asarray(ns, dtype=np.int64)
    lo, hi = min(int(ns.min()) * 2 + 1, 0), max(int(ns.max()) * 2, -1)
    sites = np.arange(lo, hi + 1)
    r = seq.rho(sites)
    ph = r / np.conj(r)
    ph /= np.abs(ph)
    out = np.empty(len(ns), dtype=complex)
    zero = -lo
    # cumulative forward products from site 0, backward from site -1
    fwd = np.cumprod(ph[zero:]) if hi >= 0 else np.array([], dtype=complex)
    bwd = np.cumprod(np.conj(ph[:zero][::-1])) if lo < 0 else np.array([], dtype=complex)
    for i, n in enumerate(ns):
        top = 2 * n
        if top >= 0:
            out[i] = fwd[top]
        else:
            # prod_{k=2n+1}^{-1} conj(ph_k)
            out[i] = bwd[-2 * n - 2]
    return out


def wronskian(seq: CoefficientSequence, u: SolutionSlice, v: SolutionSlice, n):
    """W(u, v)(n) = rho_{2n+1} G(n) (u(2n+2) v(2n+1) - u(2n+1) v(2n+2))."""
    scalar = np.ndim(n) == 0
    ns = np.atleast_1d(np.asarray(n, dtype=np.int64))
    D = u(2 * ns + 2) * v(2 * ns + 1) - u(2 * ns + 1) * v(2 * ns + 2)
    W = seq.rho(2 * ns + 1) * _gauge_phase(seq, ns) * D
    return complex(W[0]) if scalar else W


def wronskian_origin(seq, u: SolutionSlice, v: SolutionSlice) -> complex:
    return np.conj(seq.rho(-1)) * (u(0) * v(-1) - u(-1) * v(0))


@dataclass(frozen=True)
class DriftTable:
    n: np.ndarray
    W: np.ndarray
    drift: np.ndarray          # |W(n) - W(m)|
    max_pairwise: float
    l1: float                  # sum_n |W(n)| over the table
    certificate: ReflectivityCertificate


def _reflection_range(m, radius_sites, u: SolutionSlice):
    """n with |m - n| <= radius and every site used by W(u, u_i)(n) inside u."""
    # W(n) reads u at 2n+1, 2n+2 and at 4m-2n-2, 4m-2n-3
    n_lo = max(m - radius_sites, u.start // 2, -((u.stop - 4 * m + 2) // 2))
    n_hi = min(m + radius_sites, (u.stop - 2) // 2, (4 * m - 3 - u.start) // 2)
    return np.arange(n_lo, n_hi + 1)


def wronskian_drift(seq: CoefficientSequence, z: complex, m: int, B: float,
                    u: SolutionSlice | None = None, u0=(1.0, 0.5j), radius: int | None = 64,
                    normalize: bool = True) -> DriftTable:
    """Drift of W(u, u_i)(n) over |m - n| <= exp(B zeta)/2 - 1 for the center zeta = 2m - 1.

    ``u`` defaults to the solution with initial data ``u0``; with ``normalize``
    it is scaled to unit l2 norm on the sites it covers. ``radius`` caps the
    window (None: no cap); solutions grow like exp(L |n|), so wide windows
    overflow in double precision.
    """
    if m < 1:
        raise NotImplementedError("only centers zeta = 2m - 1 with m >= 1 are implemented")
    zeta = 2 * m - 1
    cert = certify(seq, B, zeta)
    if not cert.pass_:
        raise ValueError(f"sequence is not ({B}, {zeta})-reflective: deviation {cert.max_alpha_dev:.3g}")
    lemma_r = 0.5 * math.exp(min(B * zeta, 50.0)) - 1
    r = int(min(lemma_r, (cert.effective_window - 2) // 2))
    if radius is not None:
        r = min(r, radius)
    if r < 1:
        raise ValueError("window too short")
    if u is None:
        span = 2 * r + 8
        u = propagate(seq, z, u0, (min(-1, 2 * m - 1 - 2 * span), 2 * m - 1 + 2 * span))
    if normalize:
        u = u.scaled(1.0 / u.norm())
    ui = u.reflected(m)
    ns = _reflection_range(m, r, u)
    if len(ns) < 2:
        raise ValueError("window too short")
    W = wronskian(seq, u, ui, ns)
    ref = W[np.searchsorted(ns, m)] if ns[0] <= m <= ns[-1] else W[0]
    diffs = np.abs(W[:, None] - W[None, :]) if len(W) <= 4000 else np.abs(W - ref)[:, None]
    return DriftTable(ns, W, np.abs(W - ref), float(diffs.max()), float(np.sum(np.abs(W))), cert)


def _long_wronskian_parts(seq, z, u: SolutionSlice, m: int, n: int):
    A, R = seq.alpha, seq.rho
    c = np.conj
    q = 4 * m - 2 * n          # reflected anchor
    U = u
    a2n1, a2n, a2np1 = A(2 * n - 1), A(2 * n), A(2 * n + 1)
    r2n1, r2n, r2np1 = R(2 * n - 1), R(2 * n), R(2 * n + 1)
    aq1, aq2, aq3 = A(q - 1), A(q - 2), A(q - 3)
    rq1, rq2, rq3 = R(q - 1), R(q - 2), R(q - 3)
    brackets = [
        c(r2n) * a2n1 + rq2 * c(aq1),
        c(r2n) * c(r2n1) - rq2 * rq1,
        r2n * c(a2np1) + c(rq2) * aq3,
        r2np1 * r2n - c(rq2) * c(rq3),
        c(aq2) * aq2 - c(a2n) * a2n,
        c(aq2) * rq2 + c(r2n) * a2n,
        aq2 * c(rq2) + c(a2n) * r2n,
        aq2 * c(aq2) - c(a2n) * a2n,
    ]
    terms = [
        brackets[0] * U(q - 1) * U(2 * n),
        -brackets[1] * U(q) * U(2 * n),
        -brackets[2] * U(q - 2) * U(2 * n + 1),
        -brackets[3] * U(q - 3) * U(2 * n + 1),
        z * brackets[4] * U(q - 2) * U(2 * n),
        z * brackets[5] * U(q - 1) * U(2 * n),
        -z * brackets[6] * U(q - 2) * U(2 * n + 1),
        z * brackets[7] * U(q - 1) * U(2 * n + 1),
    ]
    return brackets, complex(sum(terms))


def long_wronskian_brackets(seq, z, u: SolutionSlice, m: int, n: int):
    """The eight bracketed coefficient differences of the reflected Wronskian step."""
    return np.array(_long_wronskian_parts(seq, z, u, m, n)[0])


def appendix_identity_check(seq: CoefficientSequence, z: complex, u: SolutionSlice, m: int, n: int,
                            complex_level: bool = False) -> float:
    """| |W(u,u_i)(n) - W(u,u_i)(n-1)| - |eight-term expression| / |rho_2n| |.

    With ``complex_level`` the signed inner expressions are compared instead:
    rho_{2n+1} rho_{2n} D(n) - conj(rho_{2n} rho_{2n-1}) D(n-1) against the
    eight-term sum, where D is the bare 2x2 determinant.
    """
    ui = u.reflected(m)
    _, rhs = _long_wronskian_parts(seq, z, u, m, n)
    r2n = seq.rho(2 * n)
    if complex_level:
        D = lambda k: u(2 * k + 2) * ui(2 * k + 1) - u(2 * k + 1) * ui(2 * k + 2)
        inner = (seq.rho(2 * n + 1) * r2n * D(n)
                 - np.conj(r2n) * np.conj(seq.rho(2 * n - 1)) * D(n - 1))
        return float(abs(inner - rhs))
    W = wronskian(seq, u, ui, np.array([n - 1, n]))
    return float(abs(abs(W[1] - W[0]) - abs(rhs) / abs(r2n)))


# ---------------------------------------------------------------- reflected solutions

def phi_vectors(u: SolutionSlice, m: int):
    """(Phi^+(m), Phi^-(m), s): Phi^pm = Phi +- Phi_i with u_i reflected through 2m - 1/2.

    s is the sign with the smaller ||Phi^s(m)||.
    """
    ui = u.reflected(m)
    up, um = u + ui, u - ui
    # u^pm(2m-1) = +- u^pm(2m) holds identically
    if up(2 * m - 1) != up(2 * m) or um(2 * m - 1) != -um(2 * m):
        raise AssertionError("reflected combination lost its parity")
    phip, phim = up.phi(m), um.phi(m)
    s = "+" if np.linalg.norm(phip) <= np.linalg.norm(phim) else "-"
    return phip, phim, s


def inverse_vs_mirror(seq: CoefficientSequence, z: complex, m: int):
    """([N^m]^{-1}, mirrored product over k = m .. 2m-1) as ScaledProducts."""
    return product_scaled(seq, z, (0, m), "N_inv"), product_scaled(seq, z, (m, 2 * m), "N_mirror")


@dataclass(frozen=True)
class PhiZeroSplit:
    direct: np.ndarray          # Phi^s(0) read off u
    first: np.ndarray           # [N^m]^{-1} Phi^s(m)
    second: np.ndarray          # -+ ([N^m]^{-1} - mirror) Phi_i(m)
    gap_norm: float             # || [N^m]^{-1} - mirror ||
    sign: str


def phi_zero_split(seq: CoefficientSequence, u: SolutionSlice, m: int, sign: str | None = None) -> PhiZeroSplit:
    """Phi^s(0) = [N^m]^{-1} Phi^s(m) -+ ([N^m]^{-1} - mirror) Phi_i(m)."""
    phip, phim, s = phi_vectors(u, m)
    s = sign or s
    inv, mir = inverse_vs_mirror(seq, u.z, m)
    Ninv, Nmir = inv.value(), mir.value()
    ui = u.reflected(m)
    phi_s = phip if s == "+" else phim
    sgn = 1.0 if s == "+" else -1.0
    direct = u.phi(0) + sgn * ui.phi(0)
    first = Ninv @ phi_s
    second = -sgn * (Ninv - Nmir) @ ui.phi(m)
    return PhiZeroSplit(direct, first, second, float(np.linalg.norm(Ninv - Nmir, 2)), s)


def telescoping_bound(As, Bs):
    """(||prod A - prod B||, sum_i ||A_n..A_{i+1}|| ||A_i - B_i|| ||B_{i-1}..B_1||), later factors left."""
    n = len(As)
    lhs = np.linalg.norm(naive_product(As) - naive_product(Bs), 2)
    rhs = 0.0
    for i in range(n):
        rhs += (np.linalg.norm(naive_product(As[i + 1:]), 2) * np.linalg.norm(As[i] - Bs[i], 2)
                * np.linalg.norm(naive_product(Bs[:i]), 2))
    return float(lhs), float(rhs)


def write_solution(u: SolutionSlice, path) -> None:
    with open(path, "w") as fh:
        fh.write("n,re_u,im_u\n")
        for k, val in zip(range(u.start, u.stop + 1), u.values):
            fh.write(f"{k},{val.real:.17g},{val.imag:.17g}\n")


def write_drift(table: DriftTable, path) -> None:
    with open(path, "w") as fh:
        fh.write("n,drift\n")
        for k, d in zip(table.n, table.drift):
            fh.write(f"{k},{d:.17g}\n")
