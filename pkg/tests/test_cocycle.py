import math

import numpy as np
import pytest

from gecmv.cocycle import (SIGMA, CocycleError, SolutionOverflow, appendix_identity_check, det_M, det_N,
                           eigen_residual, inverse_vs_mirror, long_wronskian_brackets, naive_product,
                           phi_vectors, phi_zero_split, product_scaled, propagate, propagate_M,
                           telescoping_bound, transfer_M, transfer_N, transfer_N_inv, transfer_N_mirror,
                           wronskian, wronskian_drift, wronskian_origin, write_solution, xfrak)
from gecmv.models import UamoParams, free_sequence, from_arrays, symmetrize, uamo_sequence

from conftest import GOLDEN, random_sequence, random_z


def test_free_transfer_matrices():
    s = free_sequence()
    z = np.exp(0.7j)
    assert np.allclose(transfer_M(s, 3, z), np.diag([1 / z, z]))
    assert np.allclose(transfer_N(s, 3, z), np.diag([z, 1 / z]))
    assert det_N(s, 2) == 1


def test_determinants(rng):
    s = random_sequence(rng, 200)
    n = np.arange(-50, 50)
    z = random_z(rng)
    assert np.max(np.abs(np.linalg.det(transfer_M(s, n, z)) - det_M(s, n))) < 1e-12
    assert np.max(np.abs(np.linalg.det(transfer_N(s, n, z)) - det_N(s, n))) < 1e-12


def test_inverse_and_mirror(rng):
    s = random_sequence(rng, 200)
    n = np.arange(-50, 50)
    z = random_z(rng)
    N = transfer_N(s, n, z)
    assert np.max(np.abs(transfer_N_inv(s, n, z) - np.linalg.inv(N))) < 1e-11
    assert np.max(np.abs(transfer_N_mirror(s, n, z) - SIGMA @ N @ SIGMA)) < 1e-13


def test_generic_pattern_gives_M(rng):
    s = random_sequence(rng, 200)
    z = random_z(rng)
    n = 7
    A, R = s.alpha, s.rho
    X = xfrak(A(2 * n), A(2 * n - 1), A(2 * n - 2), R(2 * n), R(2 * n - 1), R(2 * n - 2), z)
    assert np.allclose(X, transfer_M(s, n, z), atol=1e-14)


def test_scalar_and_stacked_agree(rng):
    s = random_sequence(rng, 100)
    z = random_z(rng)
    assert np.array_equal(transfer_N(s, 4, z), transfer_N(s, np.arange(3, 6), z)[1])


def test_singular_inputs():
    s = free_sequence()
    with pytest.raises(CocycleError):
        transfer_N(s, 0, 0.0)


def test_scaled_product_matches_naive(rng):
    s = random_sequence(rng, 200, coupling=0.5)
    z = random_z(rng)
    sp = product_scaled(s, z, (-20, 20), "N")
    naive = naive_product(transfer_N(s, np.arange(-20, 20), z))
    assert np.allclose(sp.value(), naive, rtol=1e-12, atol=1e-12 * np.abs(naive).max())
    inv = product_scaled(s, z, (-20, 20), "N_inv").value()
    assert np.allclose(inv @ naive, np.eye(2), atol=1e-9)
    assert 0.5 <= np.abs(sp.unit).max() < 1.0


def test_scaled_product_survives_overflow():
    s = uamo_sequence(UamoParams(0.2, 0.95, GOLDEN, 0.1), window=(-10, 6000))
    sp = product_scaled(s, np.exp(0.4j), (0, 5000), "N")
    assert math.isfinite(sp.log_norm()) and sp.log_norm() > 700


def test_propagation_solves_equation(rng):
    s = random_sequence(rng, 400, coupling=0.4)
    z = random_z(rng)
    u = propagate(s, z, (1.0, -0.5j), (-101, 100))
    assert u.start == -101 and u.stop == 100
    assert np.max(eigen_residual(s, u)) < 1e-10 * max(1.0, np.abs(u.values).max())


def test_m_route_matches_n_route(rng):
    s = random_sequence(rng, 400, coupling=0.4)
    z = random_z(rng)
    u = propagate(s, z, (1.0, 0.2), (-1, 80))
    v = propagate_M(s, z, (1.0, 0.2), 80)
    assert np.max(np.abs(u.values - v.values)) < 1e-12 * np.abs(u.values).max()


def test_overflow_budget():
    s = uamo_sequence(UamoParams(0.1, 0.95, GOLDEN, 0.1), window=(-10, 40000))
    with pytest.raises(SolutionOverflow) as exc:
        propagate(s, np.exp(0.4j), (1.0, 0.0), (-1, 30000))
    assert exc.value.partial.stop > 100


@pytest.mark.parametrize("rho", ["random", "convention"])
def test_wronskian_constant(rng, rho):
    s = random_sequence(rng, 600, coupling=0.3, rho=rho)
    z = random_z(rng)
    u = propagate(s, z, (1.0, 0.5), (-200, 200))
    v = propagate(s, z, (0.3j, -1.0), (-200, 200))
    W = wronskian(s, u, v, np.arange(-99, 99))
    scale = np.abs(u.values).max() * np.abs(v.values).max()
    assert np.max(np.abs(W - wronskian_origin(s, u, v))) < 1e-12 * scale


def test_reflected_solution_indexing(rng):
    s = random_sequence(rng, 100)
    u = propagate(s, random_z(rng), (1.0, 0.5), (-10, 30))
    ui = u.reflected(3)
    for k in range(-10, 20):
        if u.start <= 11 - k <= u.stop:
            assert ui(k) == u(11 - k)


def test_appendix_identity(rng):
    worst = 0.0
    for _ in range(30):
        s = random_sequence(rng, 100, coupling=0.6, rho="convention", convention="complex")
        z = random_z(rng)
        u = propagate(s, z, tuple(rng.normal(size=2) + 1j * rng.normal(size=2)), (-40, 40))
        m, n = int(rng.integers(1, 5)), int(rng.integers(1, 6))
        worst = max(worst, appendix_identity_check(s, z, u, m, n),
                    appendix_identity_check(s, z, u, m, n, complex_level=True))
    assert worst < 1e-10


def test_brackets_vanish_under_exact_symmetry():
    m, n = 6, 3
    base = uamo_sequence(UamoParams(0.5, 0.8, GOLDEN, 0.17), "complex")
    s = symmetrize(base, 2 * m - 1)
    u = propagate(s, np.exp(0.3j), (1.0, 0.2j), (-1, 60))
    b = long_wronskian_brackets(s, u.z, u, m, n)
    assert np.max(np.abs(b)) < 1e-14


def test_wronskian_drift_symmetric():
    m = 12
    s = symmetrize(uamo_sequence(UamoParams(0.5, 0.8, GOLDEN, 0.17), "complex"), 2 * m - 1)
    table = wronskian_drift(s, np.exp(0.3j), m, 0.3, radius=10)
    assert table.max_pairwise < 1e-12 * max(1.0, np.abs(table.W).max())
    assert table.l1 <= 2 + 1e-9
    assert table.certificate.pass_


def test_wronskian_drift_needs_reflectivity():
    s = uamo_sequence(UamoParams(0.5, 0.8, GOLDEN, 0.17), "complex")
    with pytest.raises(ValueError):
        wronskian_drift(s, np.exp(0.3j), 12, 1.0)
    with pytest.raises(NotImplementedError):
        wronskian_drift(s, np.exp(0.3j), 0, 1.0)


def test_phi_vectors_and_split():
    m = 5
    s = symmetrize(uamo_sequence(UamoParams(0.5, 0.8, GOLDEN, 0.17), "complex"), 2 * m - 1)
    u = propagate(s, np.exp(0.9j), (1.0, 0.4j), (-1, 4 * m + 4))
    phip, phim, sign = phi_vectors(u, m)
    assert phip[0] == phip[1] and phim[0] == -phim[1]
    sp = phi_zero_split(s, u, m)
    scale = np.abs(u.values).max()
    assert np.max(np.abs(sp.direct - sp.first - sp.second)) < 1e-12 * scale
    # exact symmetry: the inverse product equals the mirrored one
    assert sp.gap_norm < 1e-10 * scale


def test_inverse_equals_mirror_under_symmetry():
    m = 8
    s = symmetrize(uamo_sequence(UamoParams(0.5, 0.8, GOLDEN, 0.17), "complex"), 2 * m - 1)
    inv, mir = inverse_vs_mirror(s, np.exp(1.1j), m)
    a, b = inv.value(), mir.value()
    assert np.max(np.abs(a - b)) < 1e-12 * np.abs(a).max()


def test_telescoping_bound(rng):
    s = random_sequence(rng, 100)
    t = random_sequence(rng, 100)
    z = random_z(rng)
    As, Bs = list(transfer_N(s, np.arange(0, 10), z)), list(transfer_N(t, np.arange(0, 10), z))
    lhs, rhs = telescoping_bound(As, Bs)
    assert lhs <= rhs * (1 + 1e-12)
    lhs, rhs = telescoping_bound(As, As)
    assert lhs == 0 and rhs == 0


def test_write_solution(tmp_path, rng):
    s = random_sequence(rng, 50)
    u = propagate(s, 1j, (1.0, 0.0), (-3, 4))
    write_solution(u, tmp_path / "u.csv")
    data = np.loadtxt(tmp_path / "u.csv", delimiter=",", skiprows=1)
    assert np.array_equal(data[:, 1] + 1j * data[:, 2], u.values)


def test_window_from_arrays_fill():
    s = from_arrays(np.array([0.5, 0.5]), 0, fill=0.0)
    assert s.alpha(10) == 0 and s.rho(10) == 1
