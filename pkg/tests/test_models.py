import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gecmv.models import (ModelError, MosaicParams, SubshiftWord, UamoParams, complexify_rho,
                          constant_sequence, free_sequence, mosaic_sequence, palindrome_scan,
                          reflection_deviation, sequence_from_spec, standard_rho, subshift_sequence,
                          symmetrize, thue_morse_letters, thue_morse_word, uamo_sequence)

from conftest import GOLDEN, random_sequence

lam = st.floats(0.01, 0.99)


def test_uamo_even_site_is_lambda1_prime():
    s = uamo_sequence(UamoParams(0.8, 0.5, 0.3, 0.0))
    assert s.alpha(0) == pytest.approx(0.6, abs=1e-15)


def test_uamo_half_period_cosine():
    s = uamo_sequence(UamoParams(0.3, 0.5, 0.5, 0.0))
    assert s.alpha(1) == pytest.approx(-0.5, abs=1e-15)


def test_uamo_r0_bound():
    s = uamo_sequence(UamoParams(0.6, 0.9, GOLDEN, 0.13), window=(-10**4, 10**4))
    assert s.r0 <= max(0.8, 0.9) + 1e-15
    assert s.r0 == pytest.approx(max(0.8, 0.9 * np.max(np.abs(np.cos(2 * np.pi * (np.arange(-5000, 5001) * GOLDEN + 0.13))))))


@settings(max_examples=30, deadline=None)
@given(lam, lam, st.floats(0, 1), st.floats(-3, 3))
def test_uamo_theta_period_one(l1, l2, Phi, theta):
    a = uamo_sequence(UamoParams(l1, l2, Phi, theta), window=(-50, 50))
    b = uamo_sequence(UamoParams(l1, l2, Phi, theta + 1.0), window=(-50, 50))
    n = np.arange(-50, 51)
    assert np.allclose(a.alpha(n), b.alpha(n), atol=1e-12)


def test_uamo_rejects_bad_coupling():
    with pytest.raises(ModelError):
        UamoParams(1.0, 0.5, 0.3, 0.0)
    with pytest.raises(ModelError):
        UamoParams(0.5, 0.0, 0.3, 0.0)


def test_mosaic_s1_equals_uamo():
    p = UamoParams(0.4, 0.7, GOLDEN, 0.21)
    n = np.arange(-300, 301)
    assert np.array_equal(mosaic_sequence(MosaicParams(0.4, 0.7, GOLDEN, 0.21, s=1)).alpha(n),
                          uamo_sequence(p).alpha(n))


def test_mosaic_inactive_sites_vanish():
    s = mosaic_sequence(MosaicParams(0.4, 0.7, GOLDEN, 0.21, s=2))
    assert s.alpha(1) == 0          # k = 1 odd
    assert s.rho(1) == 1
    assert s.alpha(3) != 0          # k = 2
    assert s.alpha(2) == pytest.approx(math.sqrt(1 - 0.16))


def test_mosaic_active_fraction():
    s = mosaic_sequence(MosaicParams(0.4, 0.7, GOLDEN, 0.21, s=3))
    n = np.arange(-100, 101)
    odd = n[n % 2 == 1]
    k = (odd + 1) // 2
    active = np.abs(s.alpha(odd)) > 0
    assert np.array_equal(active, k % 3 == 0)


def test_mosaic_rejects_bad_period():
    with pytest.raises(ModelError):
        MosaicParams(0.4, 0.7, GOLDEN, 0.2, s=0)


@pytest.mark.parametrize("conv", ["standard", "complex"])
def test_unit_sphere(conv, rng):
    s = uamo_sequence(UamoParams(0.3, 0.95, GOLDEN, 0.4), conv)
    n = s.sites()
    assert np.max(np.abs(np.abs(s.alpha(n)) ** 2 + np.abs(s.rho(n)) ** 2 - 1)) < 1e-12
    assert s.c0 >= math.sqrt(1 - s.r0**2) - 1e-15


def test_complex_rho_is_i_times_standard():
    a = np.array([0.3, 0.5j, -0.2 + 0.1j])
    assert np.allclose(complexify_rho(a), 1j * standard_rho(a))


def test_rho_rejects_outside_disk():
    with pytest.raises(ModelError):
        standard_rho(1.0)
    with pytest.raises(ModelError):
        constant_sequence(1.2)


def test_deterministic(rng):
    s = uamo_sequence(UamoParams(0.3, 0.95, GOLDEN, 0.4))
    n = rng.integers(-1000, 1000, 50)
    assert np.array_equal(s.alpha(n), s.alpha(n))
    assert isinstance(s.alpha(3), complex)


def test_shifted_and_free():
    s = uamo_sequence(UamoParams(0.3, 0.95, GOLDEN, 0.4))
    t = s.shifted(5)
    assert t.alpha(2) == s.alpha(7)
    f = free_sequence()
    assert f.alpha(10) == 0 and f.rho(10) == 1


def test_thue_morse_recursion():
    swap = str.maketrans("ab", "ba")
    w = thue_morse_word(0).symbols
    for k in range(1, 12):
        w = w + w.translate(swap)
        assert thue_morse_word(k).symbols == w


def test_thue_morse_cap():
    with pytest.raises(MemoryError):
        thue_morse_word(30)


def test_thue_morse_two_sided_letters():
    w = thue_morse_word(10).symbols
    letters = thue_morse_letters(np.arange(len(w)))
    assert "".join("ab"[v] for v in letters) == w
    n = np.arange(0, 500)
    # reflection symmetric about -1/2
    assert np.array_equal(thue_morse_letters(-n - 1), thue_morse_letters(n))


def test_thue_morse_sequence_coding():
    w = SubshiftWord("ab", {"a": 0.2, "b": -0.4j})
    s = subshift_sequence(w, "substitution")
    assert s.alpha(0) == 0.2 and s.alpha(1) == -0.4j and s.alpha(-1) == 0.2 and s.alpha(-2) == -0.4j
    dev = reflection_deviation(s.with_rho("standard"), -0.5, np.arange(-200, 200))
    # coding values are not real, so conj symmetry needs a real coding
    assert np.max(dev) > 0
    s_real = subshift_sequence(SubshiftWord("ab", {"a": 0.2, "b": -0.4}), "substitution")
    assert np.max(reflection_deviation(s_real, -0.5, np.arange(-200, 200))) == 0


def test_periodic_subshift():
    s = subshift_sequence(SubshiftWord("aab", {"a": 0.1, "b": 0.5}))
    assert [s.alpha(k) for k in range(-3, 3)] == [0.1, 0.1, 0.5, 0.1, 0.1, 0.5]


def test_subshift_coding_checked():
    with pytest.raises(ModelError):
        SubshiftWord("ab", {"a": 1.0, "b": 0.0})
    with pytest.raises(ModelError):
        subshift_sequence(SubshiftWord("ac", {"a": 0.1}))


def _brute_palindromes(s, max_len):
    out = {}
    for i in range(len(s)):
        for L in range(1, max_len + 1):
            f = s[i:i + L]
            if len(f) == L and f == f[::-1] and f not in out:
                out[f] = i
    return out


@settings(max_examples=40, deadline=None)
@given(st.text(alphabet="abc", min_size=1, max_size=40), st.integers(1, 40))
def test_palindrome_scan_matches_brute_force(word, max_len):
    max_len = min(max_len, len(word))
    assert palindrome_scan(word, max_len) == _brute_palindromes(word, max_len)


def test_symmetrize_zero_deviation(rng):
    s = random_sequence(rng, 300, rho="convention")
    for center in (0.0, 0.5, 7.0, -3.5):
        t = symmetrize(s, center)
        dev = reflection_deviation(t, center, np.arange(-120, 120))
        assert np.max(dev) == 0.0


def test_sequence_from_spec():
    s = sequence_from_spec({"model": "uamo", "params": {"lambda1": 0.6, "lambda2": 0.9, "Phi": GOLDEN,
                                                         "theta": 0.1}, "window": [-50, 50]})
    assert s.window == (-50, 50)
    t = sequence_from_spec({"model": "subshift", "params": {"word": 6, "repeat_mode": "substitution",
                                                            "coding": {"a": [0.1, 0], "b": [-0.3, 0]}}})
    assert t.alpha(3) == pytest.approx(0.1)
    c = sequence_from_spec({"model": "custom", "params": {"alpha": [[0.1, 0.2], 0.3], "start": 4}})
    assert c.alpha(4) == 0.1 + 0.2j and c.alpha(5) == 0.3
    with pytest.raises(ModelError):
        sequence_from_spec({"model": "nope"})
