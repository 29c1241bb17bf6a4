"""The GECMV matrix: band storage, coordinate action, LM factorization, finite unitary cuts."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .models import CoefficientSequence

MAX_DENSE_SITES = 4096


class WindowError(ValueError):
    pass


def theta_block(alpha: complex, rho: complex, tol: float = 1e-9) -> np.ndarray:
    """Theta(alpha, rho) = [[conj(alpha), rho], [conj(rho), -alpha]]."""
    if abs(abs(alpha) ** 2 + abs(rho) ** 2 - 1.0) > tol:
        raise ValueError("(alpha, rho) is not on the unit 3-sphere")
    return np.array([[np.conj(alpha), rho], [np.conj(rho), -alpha]], dtype=complex)


def _row_entries(alpha, rho, rows):
    """The four nonzero entries of each row, at columns 2k-1 .. 2k+2 where k = row // 2."""
    rows = np.asarray(rows, dtype=np.int64)
    k = rows // 2
    e = 2 * k
    a_m, a_0, a_1 = alpha(e - 1), alpha(e), alpha(e + 1)
    r_m, r_0, r_1 = rho(e - 1), rho(e), rho(e + 1)
    even = np.stack([np.conj(a_0) * np.conj(r_m), -np.conj(a_0) * a_m,
                     r_0 * np.conj(a_1), r_0 * r_1], axis=-1)
    odd = np.stack([np.conj(r_0) * np.conj(r_m), -np.conj(r_0) * a_m,
                    -a_0 * np.conj(a_1), -a_0 * r_1], axis=-1)
    return np.where((rows % 2 == 0)[:, None], even, odd), e - 1


@dataclass(frozen=True)
class GECMVBand:
    """Rows a..b of the GECMV matrix; row r holds columns col0[r]..col0[r]+3."""

    rows: np.ndarray
    col0: np.ndarray
    entries: np.ndarray

    def row(self, r: int):
        i = r - int(self.rows[0])
        return np.arange(self.col0[i], self.col0[i] + 4), self.entries[i]

    def matvec(self, u: np.ndarray, start: int) -> np.ndarray:
        """(E u)(r) for every stored row; u[k - start] = u(k) must cover columns."""
        idx = self.col0[:, None] + np.arange(4)[None, :] - start
        if idx.min() < 0 or idx.max() >= len(u):
            raise WindowError("vector does not cover the band's columns")
        return np.einsum("ij,ij->i", self.entries, np.asarray(u)[idx])

    def to_dense(self, lo: int, hi: int) -> np.ndarray:
        """Dense block on rows and columns lo..hi (entries outside dropped)."""
        size = hi - lo + 1
        out = np.zeros((size, size), dtype=complex)
        for i, r in enumerate(self.rows):
            if not lo <= r <= hi:
                continue
            for j in range(4):
                c = self.col0[i] + j
                if lo <= c <= hi:
                    out[r - lo, c - lo] = self.entries[i, j]
        return out

    def coo(self):
        """(row, col, value) triples of the stored entries."""
        rows = np.repeat(self.rows, 4)
        cols = (self.col0[:, None] + np.arange(4)[None, :]).ravel()
        return rows, cols, self.entries.ravel()


def build_gecmv(seq: CoefficientSequence, window: tuple[int, int]) -> GECMVBand:
    a, b = window
    if b - a + 1 < 4:
        raise WindowError("window must contain at least 4 sites")
    rows = np.arange(a, b + 1)
    entries, col0 = _row_entries(seq.alpha, seq.rho, rows)
    return GECMVBand(rows, col0, entries)


def apply(seq: CoefficientSequence, u, n, start: int = 0):
    """[E u](n) from the coordinate formulas; u[k - start] = u(k)."""
    u = np.asarray(u)
    n_arr = np.atleast_1d(np.asarray(n, dtype=np.int64))
    k = n_arr // 2
    lo, hi = 2 * k - 1 - start, 2 * k + 2 - start
    if lo.min() < 0 or hi.max() >= len(u):
        raise WindowError("u lacks support on n-1 .. n+2")
    e = 2 * k
    um, u0, u1, u2 = (u[2 * k + j - start] for j in (-1, 0, 1, 2))
    a_m, a_0, a_1 = seq.alpha(e - 1), seq.alpha(e), seq.alpha(e + 1)
    r_m, r_0, r_1 = seq.rho(e - 1), seq.rho(e), seq.rho(e + 1)
    left = np.conj(r_m) * um - a_m * u0
    right = np.conj(a_1) * u1 + r_1 * u2
    out = np.where(n_arr % 2 == 0,
                   np.conj(a_0) * left + r_0 * right,
                   np.conj(r_0) * left - a_0 * right)
    return complex(out[0]) if np.ndim(n) == 0 else out


def lm_factors(seq: CoefficientSequence, lo: int, hi: int, cut: bool = False):
    """Dense L and M on sites lo..hi.

    Blocks straddling the window edge are dropped unless ``cut``, in which case
    the edge coefficient is replaced by 1 so the boundary block is diagonal.
    """
    size = hi - lo + 1
    L = np.zeros((size, size), dtype=complex)
    M = np.zeros((size, size), dtype=complex)
    for mat, parity in ((L, 0), (M, 1)):
        first = lo - 1 if (lo - 1) % 2 == parity else lo
        for j in range(first, hi + 1, 2):
            inside = (j >= lo, j + 1 <= hi)
            if all(inside):
                mat[j - lo:j - lo + 2, j - lo:j - lo + 2] = theta_block(seq.alpha(j), seq.rho(j))
            elif cut:
                # alpha_j = 1: Theta(1, 0) = diag(1, -1)
                if inside[0]:
                    mat[j - lo, j - lo] = 1.0
                elif inside[1]:
                    mat[j + 1 - lo, j + 1 - lo] = -1.0
    return L, M


def lm_check(seq: CoefficientSequence, window: tuple[int, int]) -> float:
    """max |E - LM| over the interior rows of the window."""
    a, b = window
    if b - a + 1 < 4:
        raise WindowError("window must contain at least 4 sites")
    pad = 3
    lo, hi = a - pad, b + pad
    L, M = lm_factors(seq, lo, hi)
    LM = L @ M
    band = build_gecmv(seq, (a, b))
    E = band.to_dense(lo, hi)
    return float(np.max(np.abs(E[a - lo:b - lo + 1] - LM[a - lo:b - lo + 1])))


def lm_eigen_residuals(seq: CoefficientSequence, u, z: complex, ks, start: int = 0):
    """Residuals of the two coordinate relations of M u = z L* u at sites 2k, 2k+1."""
    u = np.asarray(u)
    ks = np.asarray(ks, dtype=np.int64)
    e = 2 * ks

    def U(j):
        return u[j - start]

    a_m, a_0, a_1 = seq.alpha(e - 1), seq.alpha(e), seq.alpha(e + 1)
    r_m, r_0, r_1 = seq.rho(e - 1), seq.rho(e), seq.rho(e + 1)
    r1 = np.conj(r_m) * U(e - 1) - a_m * U(e) - z * (a_0 * U(e) + r_0 * U(e + 1))
    r2 = np.conj(a_1) * U(e + 1) + r_1 * U(e + 2) - z * (np.conj(r_0) * U(e) - np.conj(a_0) * U(e + 1))
    return np.abs(r1), np.abs(r2)


@dataclass(frozen=True)
class TruncatedUnitary:
    matrix: np.ndarray
    sites: tuple[int, int]
    boundary: str = "alpha=1 at sites a-1 and b"

    def unitarity_residual(self) -> float:
        U = self.matrix
        return float(np.max(np.abs(U.conj().T @ U - np.eye(len(U)))))


def truncate_unitary(seq: CoefficientSequence, window: tuple[int, int]) -> TruncatedUnitary:
    """Finite unitary on sites a..b, decoupled by setting alpha_{a-1} = alpha_b = 1."""
    a, b = window
    if b - a < 8:
        raise WindowError("truncation needs b - a >= 8")
    if a % 2 or not b % 2:
        raise WindowError("window must start on an even site and end on an odd site")
    if b - a + 1 > MAX_DENSE_SITES:
        raise WindowError(f"dense truncations are capped at {MAX_DENSE_SITES} sites")
    L, M = lm_factors(seq, a, b, cut=True)
    return TruncatedUnitary(L @ M, (a, b))


def find_diagonal_gauge(seq_a: CoefficientSequence, seq_b: CoefficientSequence,
                        window: tuple[int, int], tol: float = 1e-13):
    """Unimodular diagonal Lambda with Lambda E_a Lambda* = E_b on the window.

    Phases propagate along the band graph (BFS over entries with |E_a| > tol);
    disconnected pieces get phase 1 at their first site. Returns the phases
    (site a first) and the max entrywise residual over the band.
    """
    a, b = window
    band_a = build_gecmv(seq_a, window)
    band_b = build_gecmv(seq_b, window)
    size = b - a + 1
    adj: list[list[tuple[int, complex]]] = [[] for _ in range(size)]
    for i, r in enumerate(band_a.rows):
        for j in range(4):
            c = int(band_a.col0[i] + j)
            ea, eb = band_a.entries[i, j], band_b.entries[i, j]
            if a <= c <= b and c != r and abs(ea) > tol:
                # lam_r * conj(lam_c) = eb / ea
                ratio = eb / ea
                ratio /= abs(ratio) if abs(ratio) > 0 else 1.0
                adj[r - a].append((c - a, ratio))
                adj[c - a].append((r - a, np.conj(ratio)))
    phases = np.zeros(size, dtype=complex)
    seen = np.zeros(size, dtype=bool)
    for root in range(size):
        if seen[root]:
            continue
        phases[root], seen[root] = 1.0, True
        queue = deque([root])
        while queue:
            r = queue.popleft()
            for c, ratio in adj[r]:
                if not seen[c]:
                    phases[c] = np.conj(ratio) * phases[r]
                    seen[c] = True
                    queue.append(c)
    rows, cols, ea = band_a.coo()
    _, _, eb = band_b.coo()
    keep = (cols >= a) & (cols <= b)
    pr, pc = phases[rows[keep] - a], phases[cols[keep] - a]
    residual = float(np.max(np.abs(pr * ea[keep] * np.conj(pc) - eb[keep])))
    return phases, residual


def write_band(band: GECMVBand, path) -> None:
    """Coordinate list: row, col, re, im with 17 significant digits."""
    rows, cols, vals = band.coo()
    with open(path, "w") as fh:
        fh.write("row,col,re,im\n")
        for r, c, v in zip(rows, cols, vals):
            fh.write(f"{r},{c},{v.real:.17g},{v.imag:.17g}\n")
