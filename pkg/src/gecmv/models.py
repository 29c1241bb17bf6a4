"""Verblunsky coefficient sequences for the UAMO, mosaic and subshift models.

A sequence is a pure function of the integer site index. ``alpha`` and ``rho``
accept a Python int or an integer ndarray and are vectorized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

RHO_CONVENTIONS = ("standard", "complex")
ROW_TOL = 1e-12

# two-sided Thue-Morse element used by subshift_sequence in substitution mode
TM_CONVENTION = "S_TM^2 fixed point with seed ba.ab: w(n) = t(n), w(-n-1) = t(n)"


class ModelError(ValueError):
    pass


def standard_rho(alpha):
    """sqrt(1 - |alpha|^2), rejecting |alpha| >= 1."""
    a = np.asarray(alpha)
    mod2 = np.abs(a) ** 2
    if np.any(mod2 >= 1.0):
        raise ModelError("Verblunsky coefficient with |alpha| >= 1")
    out = np.sqrt(1.0 - mod2).astype(complex)
    return out if out.ndim else complex(out)


def complexify_rho(alpha):
    """i * sqrt(1 - |alpha|^2)."""
    return 1j * standard_rho(alpha)


_RHO = {"standard": standard_rho, "complex": complexify_rho}


def _as_index(n):
    if isinstance(n, (int, np.integer)):
        return int(n), True
    return np.asarray(n, dtype=np.int64), False


class CoefficientSequence:
    """n -> (alpha_n, rho_n) on the 3-sphere.

    ``alpha_fn`` maps an int64 array of sites to complex values. ``rho_fn`` is
    optional; when omitted rho follows ``rho_convention``. ``window`` is the
    addressable range used for ``r0`` and the unit-sphere check.
    """

    def __init__(
        self,
        alpha_fn: Callable[[np.ndarray], np.ndarray],
        rho_convention: str = "standard",
        rho_fn: Callable[[np.ndarray], np.ndarray] | None = None,
        window: tuple[int, int] = (-1000, 1000),
        label: str = "",
        meta: Mapping | None = None,
        validate: bool = True,
    ):
        if rho_fn is None and rho_convention not in RHO_CONVENTIONS:
            raise ModelError(f"unknown rho convention {rho_convention!r}")
        self._alpha_fn = alpha_fn
        self._rho_fn = rho_fn
        self.rho_convention = "custom" if rho_fn is not None else rho_convention
        self.window = (int(window[0]), int(window[1]))
        self.label = label
        self.meta = dict(meta or {})
        self._r0 = None
        if validate:
            self.check()

    def alpha(self, n):
        idx, scalar = _as_index(n)
        vals = np.asarray(self._alpha_fn(np.atleast_1d(idx)), dtype=complex)
        return complex(vals[0]) if scalar else vals.reshape(np.shape(idx))

    def rho(self, n):
        idx, scalar = _as_index(n)
        sites = np.atleast_1d(idx)
        if self._rho_fn is not None:
            vals = np.asarray(self._rho_fn(sites), dtype=complex)
        else:
            vals = np.asarray(_RHO[self.rho_convention](self._alpha_fn(sites)), dtype=complex)
        return complex(vals[0]) if scalar else vals.reshape(np.shape(idx))

    def sites(self):
        return np.arange(self.window[0], self.window[1] + 1)

    @property
    def r0(self) -> float:
        if self._r0 is None:
            self._r0 = float(np.max(np.abs(self.alpha(self.sites()))))
        return self._r0

    @property
    def c0(self) -> float:
        return math.sqrt(1.0 - self.r0**2)

    def check(self):
        n = self.sites()
        a, r = self.alpha(n), self.rho(n)
        if np.any(np.abs(a) >= 1.0):
            raise ModelError(f"{self.label}: |alpha| >= 1 inside window")
        err = np.max(np.abs(np.abs(a) ** 2 + np.abs(r) ** 2 - 1.0))
        if err > ROW_TOL:
            raise ModelError(f"{self.label}: |alpha|^2+|rho|^2 off by {err:.3g}")

    def with_rho(self, convention: str) -> "CoefficientSequence":
        return CoefficientSequence(self._alpha_fn, convention, window=self.window,
                                   label=self.label, meta=self.meta)

    def with_window(self, window) -> "CoefficientSequence":
        return CoefficientSequence(self._alpha_fn, self.rho_convention if self._rho_fn is None else "standard",
                                   rho_fn=self._rho_fn, window=window, label=self.label, meta=self.meta)

    def shifted(self, k: int) -> "CoefficientSequence":
        """n -> (alpha_{n+k}, rho_{n+k})."""
        k = int(k)
        rho_fn = None if self._rho_fn is None else (lambda n: self._rho_fn(n + k))
        return CoefficientSequence(lambda n: self._alpha_fn(n + k), self.rho_convention if rho_fn is None else "standard",
                                   rho_fn=rho_fn, window=(self.window[0] - k, self.window[1] - k),
                                   label=f"{self.label}<<{k}", meta=self.meta)

    def __repr__(self):
        return f"CoefficientSequence({self.label!r}, rho={self.rho_convention}, window={self.window})"


def from_arrays(alpha: np.ndarray, start: int, rho: np.ndarray | None = None,
                rho_convention: str = "standard", fill: complex = 0.0, label: str = "array"):
    """Finite data placed at sites start..start+len-1, ``fill`` elsewhere."""
    alpha = np.asarray(alpha, dtype=complex)
    stop = start + len(alpha)

    def alpha_fn(n):
        out = np.full(n.shape, fill, dtype=complex)
        inside = (n >= start) & (n < stop)
        out[inside] = alpha[n[inside] - start]
        return out

    rho_fn = None
    if rho is not None:
        rho = np.asarray(rho, dtype=complex)
        fill_rho = complex(standard_rho(fill))

        def rho_fn(n):
            out = np.full(n.shape, fill_rho, dtype=complex)
            inside = (n >= start) & (n < stop)
            out[inside] = rho[n[inside] - start]
            return out

    return CoefficientSequence(alpha_fn, rho_convention, rho_fn=rho_fn,
                               window=(start, stop - 1), label=label)


def constant_sequence(value: complex, rho_convention="standard", window=(-1000, 1000)):
    value = complex(value)
    return CoefficientSequence(lambda n: np.full(n.shape, value, dtype=complex),
                               rho_convention, window=window, label=f"constant({value})")


def free_sequence(rho_convention="standard", window=(-1000, 1000)):
    return constant_sequence(0.0, rho_convention, window)


# ---------------------------------------------------------------- UAMO / mosaic

@dataclass(frozen=True)
class UamoParams:
    lambda1: float
    lambda2: float
    Phi: float
    theta: float

    def __post_init__(self):
        for name in ("lambda1", "lambda2"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ModelError(f"{name} must lie in (0,1), got {v}")
        # all formulas are 1-periodic in the frequency
        object.__setattr__(self, "Phi", float(self.Phi) % 1.0)

    @property
    def lambda1p(self) -> float:
        return math.sqrt(1.0 - self.lambda1**2)

    @property
    def lambda2p(self) -> float:
        return math.sqrt(1.0 - self.lambda2**2)


@dataclass(frozen=True)
class MosaicParams(UamoParams):
    s: int = 1

    def __post_init__(self):
        super().__post_init__()
        if int(self.s) != self.s or self.s < 1:
            raise ModelError(f"mosaic period s must be a positive integer, got {self.s}")


def _uamo_alpha(p: UamoParams, s: int = 1):
    l1p, l2, Phi, theta = p.lambda1p, p.lambda2, p.Phi, p.theta

    def alpha_fn(n):
        out = np.full(n.shape, l1p, dtype=complex)
        odd = (n % 2) == 1
        k = (n[odd] + 1) // 2            # site 2k-1
        vals = l2 * np.cos(2 * np.pi * (k * Phi + theta))
        if s > 1:
            vals = np.where(k % s == 0, vals, 0.0)
        out[odd] = vals
        return out

    return alpha_fn


def uamo_sequence(p: UamoParams, rho_convention="standard", window=(-1000, 1000)):
    """alpha_{2k-1} = lambda2 cos(2 pi (k Phi + theta)), alpha_{2k} = lambda1'."""
    return CoefficientSequence(_uamo_alpha(p), rho_convention, window=window,
                               label=f"uamo{tuple(vars(p).values())}", meta={"model": "uamo", "params": vars(p)})


def mosaic_sequence(p: MosaicParams, rho_convention="standard", window=(-1000, 1000)):
    """UAMO variant: the cosine sits on sites 2k-1 with k in sZ, zero on the other odd sites."""
    return CoefficientSequence(_uamo_alpha(p, p.s), rho_convention, window=window,
                               label=f"mosaic(s={p.s})", meta={"model": "mosaic", "params": vars(p)})


# ---------------------------------------------------------------- subshifts

@dataclass(frozen=True)
class SubshiftWord:
    symbols: str
    coding: Mapping[str, complex] = field(default_factory=dict)

    def __post_init__(self):
        for letter, value in self.coding.items():
            if abs(complex(value)) >= 1.0:
                raise ModelError(f"coding of {letter!r} has modulus >= 1")

    def coded(self) -> np.ndarray:
        missing = set(self.symbols) - set(self.coding)
        if missing:
            raise ModelError(f"no coding for letters {sorted(missing)}")
        return np.array([complex(self.coding[c]) for c in self.symbols])

    def __len__(self):
        return len(self.symbols)


THUE_MORSE_MAX_K = 24
_SUBST = {"a": "ab", "b": "ba"}


def thue_morse_word(k: int, coding: Mapping[str, complex] | None = None,
                    max_k: int = THUE_MORSE_MAX_K) -> SubshiftWord:
    """S_TM^k(a) for the substitution a -> ab, b -> ba."""
    if k < 0:
        raise ModelError("k must be nonnegative")
    if k > max_k:
        raise MemoryError(f"Thue-Morse word of order {k} exceeds the cap 2^{max_k}")
    word = "a"
    for _ in range(k):
        word = "".join(map(_SUBST.__getitem__, word))
    return SubshiftWord(word, dict(coding or {}))


def thue_morse_letters(n) -> np.ndarray:
    """0/1 letters (a/b) of the two-sided element, vectorized over sites."""
    n = np.asarray(n, dtype=np.int64)
    m = np.where(n >= 0, n, -n - 1).astype(np.uint64)
    bits = np.zeros(m.shape, dtype=np.uint64)
    while np.any(m):
        bits ^= m & np.uint64(1)
        m >>= np.uint64(1)
    return bits.astype(np.int64)


def subshift_sequence(w: SubshiftWord, repeat_mode: str = "periodic", rho_convention="standard",
                      window=(-1000, 1000)):
    """Coded subshift element: periodic repetition of ``w`` or the two-sided Thue-Morse point."""
    if len(w) == 0:
        raise ModelError("empty word")
    if repeat_mode == "periodic":
        coded = w.coded()
        L = len(coded)
        return CoefficientSequence(lambda n: coded[n % L], rho_convention, window=window,
                                   label=f"periodic({w.symbols[:16]})",
                                   meta={"model": "subshift", "repeat_mode": "periodic"})
    if repeat_mode == "substitution":
        try:
            table = np.array([complex(w.coding["a"]), complex(w.coding["b"])])
        except KeyError as exc:
            raise ModelError("substitution mode needs codings for 'a' and 'b'") from exc
        return CoefficientSequence(lambda n: table[thue_morse_letters(n)], rho_convention, window=window,
                                   label="thue-morse", meta={"model": "subshift", "repeat_mode": "substitution",
                                                              "convention": TM_CONVENTION})
    raise ModelError(f"unknown repeat mode {repeat_mode!r}")


def palindrome_scan(w: SubshiftWord | str, max_len: int) -> dict[str, int]:
    """Palindromic factors of length <= max_len, each with its first occurrence.

    Expands around every center, so the cost is O(n * max_len).
    """
    s = w.symbols if isinstance(w, SubshiftWord) else w
    if max_len > len(s):
        raise ModelError("max_len exceeds word length")
    found: dict[str, int] = {}
    n = len(s)
    for center in range(2 * n - 1):
        lo, hi = center // 2, center // 2 + center % 2
        while lo >= 0 and hi < n and s[lo] == s[hi] and hi - lo + 1 <= max_len:
            pal = s[lo:hi + 1]
            if pal not in found or lo < found[pal]:
                found[pal] = lo
            lo -= 1
            hi += 1
    return found


def symmetrize(seq: CoefficientSequence, center: float = 0.0) -> CoefficientSequence:
    """Exactly reflection-symmetric copy: beta_{2c-n} = conj(beta_n).

    Sites right of the center keep their values; a site sitting on the center
    keeps only its real part.
    """
    two_c = int(round(2 * center))
    if abs(two_c - 2 * center) > 1e-12:
        raise ModelError("center must be a half-integer")
    src = seq._alpha_fn

    def alpha_fn(n):
        right = 2 * n > two_c
        vals = src(np.where(right, n, two_c - n))
        vals = np.where(right, vals, np.conj(vals))
        return np.where(2 * n == two_c, vals.real + 0j, vals)

    conv = seq.rho_convention if seq.rho_convention in RHO_CONVENTIONS else "complex"
    return CoefficientSequence(alpha_fn, conv, window=seq.window, label=f"sym({seq.label},{center})",
                               meta={**seq.meta, "symmetric_center": center})


def reflection_deviation(seq: CoefficientSequence, center: float, sites) -> np.ndarray:
    """|(R_center alpha)_n - conj(alpha_n)| on the given sites."""
    n = np.asarray(sites, dtype=np.int64)
    two_c = int(round(2 * center))
    return np.abs(seq.alpha(two_c - n) - np.conj(seq.alpha(n)))


MODEL_SCHEMAS = {
    "uamo": {"lambda1": "float in (0,1)", "lambda2": "float in (0,1)", "Phi": "float", "theta": "float"},
    "mosaic": {"s": "int >= 1", "lambda1": "float in (0,1)", "lambda2": "float in (0,1)",
               "Phi": "float", "theta": "float"},
    "subshift": {"word": "str (periodic) or Thue-Morse order k (substitution)",
                 "coding": "{letter: [re, im]}", "repeat_mode": "periodic|substitution"},
    "custom": {"alpha": "list of [re, im] on sites start.. ", "start": "int", "fill": "[re, im]"},
    "free": {},
}


def _cplx(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


def sequence_from_spec(spec: Mapping) -> CoefficientSequence:
    """Build a sequence from the JSON object {model, params, rho_convention, window}."""
    model = spec["model"]
    params = dict(spec.get("params", {}))
    rho = spec.get("rho_convention", "standard")
    window = tuple(spec.get("window", (-1000, 1000)))
    if model == "uamo":
        return uamo_sequence(UamoParams(**params), rho, window)
    if model == "mosaic":
        return mosaic_sequence(MosaicParams(**params), rho, window)
    if model == "subshift":
        coding = {k: _cplx(v) for k, v in params["coding"].items()}
        mode = params.get("repeat_mode", "periodic")
        word = params.get("word", "ab")
        if mode == "substitution" and isinstance(word, int):
            w = thue_morse_word(word, coding)
        else:
            w = SubshiftWord(str(word), coding)
        return subshift_sequence(w, mode, rho, window)
    if model == "custom":
        alpha = np.array([_cplx(v) for v in params["alpha"]])
        seq = from_arrays(alpha, int(params.get("start", 0)), fill=_cplx(params.get("fill", 0.0)),
                          rho_convention=rho)
        return seq.with_window(window)
    if model == "free":
        return free_sequence(rho, window)
    raise ModelError(f"unknown model {model!r}")
