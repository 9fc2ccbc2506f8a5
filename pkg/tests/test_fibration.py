from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mirrorcell.errors import InvalidParameterError, VerificationError
from mirrorcell.fibration import (
    BasePoint,
    FiberSample,
    FibrationParams,
    InfinityPoint,
    coordinate_section_count,
    coordinate_section_points,
    enumerate_infinity_points,
    euler_identity_check,
    jacobian_report,
    map_f,
    preimage_union_check,
    preimage_union_report,
    sample_base_point,
    sample_fiber_points,
    transversality_at_infinity,
    verification_report,
)

DESK = [FibrationParams(k, ell, r) for ell in (2, 3, 4) for r in (1, 2, 3) for k in range(ell + 1)]


def affine_residual(y, z, p):
    lead = np.prod(y[: p.k]) if p.k else 1.0
    return max(abs(lead * (y[i] ** p.r - y[-1] ** p.r) - z[i]) for i in range(p.ell - 1))


def homogeneous_residual(P, z, p):
    """Residuals of the closed-fiber equations at a max-normalized homogeneous point."""
    P = P / P[np.argmax(np.abs(P))]
    y0, y = P[0], P[1:]
    r = p.r
    lead = np.prod(y[: p.k]) if p.k else 1.0
    d1 = y[0] ** r - y[-1] ** r
    res = [abs(lead * d1 - z[0] * y0 ** (p.k + r))]
    res += [abs(z[i] * d1 - z[0] * (y[i] ** r - y[-1] ** r)) for i in range(1, p.ell - 1)]
    return max(res)


# -- map_f ---------------------------------------------------------------------

def test_map_f_examples():
    y = np.array([3 + 1j, -2j, 0.5, 1 - 1j])
    assert map_f(y, FibrationParams(0, 4, 1)) == pytest.approx(y[:-1] - y[-1])
    assert map_f([1, -1], FibrationParams(0, 2, 2)) == pytest.approx([0])
    assert map_f([2, 1], FibrationParams(1, 2, 1)) == pytest.approx([2])


def test_map_f_batches():
    p = FibrationParams(2, 3, 3)
    Y = np.random.default_rng(0).standard_normal((5, 3)) + 0j
    Z = map_f(Y, p)
    assert Z.shape == (5, 2)
    assert Z[3] == pytest.approx(map_f(Y[3], p))


@st.composite
def equivariance_cases(draw):
    ell = draw(st.integers(2, 5))
    k = draw(st.integers(0, ell))
    r = draw(st.integers(1, 4))
    perm = list(draw(st.permutations(range(k)))) + list(draw(st.permutations(range(k, ell))))
    coords = st.floats(-2, 2, allow_nan=False)
    y = np.array([complex(draw(coords), draw(coords)) for _ in range(ell)])
    return FibrationParams(k, ell, r), np.array(perm), y


@given(equivariance_cases())
def test_map_f_equivariance(case):
    p, perm, y = case
    z = np.append(map_f(y, p), 0)
    # permuting y acts on z by z'_i = z_s(i) - z_s(l)
    expected = (z[perm] - z[perm[-1]])[:-1]
    assert np.allclose(map_f(y[perm], p), expected, atol=1e-9)


# -- base points and sampling -------------------------------------------------------

def test_base_point_sampling():
    z = sample_base_point(2, seed=3)
    assert z.z.shape == (1,) and abs(z.z[0]) >= 0.1
    z3 = sample_base_point(3, seed=3)
    assert z3.margin() >= 0.1 and z3.z[0] != z3.z[1]
    assert np.array_equal(sample_base_point(4, seed=11).z, sample_base_point(4, seed=11).z)
    assert not np.array_equal(sample_base_point(4, seed=11).z, sample_base_point(4, seed=12).z)
    with pytest.raises(InvalidParameterError):
        sample_base_point(1)
    with pytest.raises(InvalidParameterError):
        BasePoint([1.0, 1.0])


def test_params_validation():
    for bad in [(0, 1, 1), (3, 2, 1), (0, 2, 0), (-1, 3, 1)]:
        with pytest.raises(InvalidParameterError):
            FibrationParams(*bad)
    assert FibrationParams(1, 3, 2).bezout == 6


@pytest.mark.parametrize("k,r,eq", [
    (0, 1, lambda y: y[0] - y[1] - 1),
    (0, 2, lambda y: y[0] ** 2 - y[1] ** 2 - 1),
    (1, 1, lambda y: y[0] * (y[0] - y[1]) - 1),
])
def test_fiber_sample_examples(k, r, eq):
    p = FibrationParams(k, 2, r)
    pts = sample_fiber_points([1.0], p, 30, seed=5)
    assert len(pts) == 30
    for s in pts:
        assert abs(eq(s.y)) <= 1e-12 * max(1, np.abs(s.y).max() ** (k + r))
        assert s.min_hyperplane_distance > 0
    if k == 0 and r == 2:
        assert min(min(abs(s.y[0] - s.y[1]), abs(s.y[0] + s.y[1])) for s in pts) > 1e-3


@pytest.mark.parametrize("p", DESK, ids=str)
def test_fiber_samples_on_desk_grid(p):
    for b in range(3):
        z = sample_base_point(p.ell, seed=100 + b)
        pts = sample_fiber_points(z, p, 100, seed=b)
        assert len(pts) == 100
        for s in pts:
            assert affine_residual(s.y, z.z, p) <= 1e-9
            assert s.residual <= 1e-9
            assert s.jacobian_ratio > 1e-6
            assert s.min_hyperplane_distance > 0
            assert np.allclose(map_f(s.y, p), z.z, atol=1e-9)


def test_sampling_is_deterministic():
    p = FibrationParams(2, 3, 2)
    z = sample_base_point(3, seed=1)
    a = np.array([s.y for s in sample_fiber_points(z, p, 20, seed=9)])
    b = np.array([s.y for s in sample_fiber_points(z, p, 20, seed=9)])
    assert np.array_equal(a, b)


def test_sampling_rejects_mismatched_base_point():
    with pytest.raises(InvalidParameterError):
        sample_fiber_points([1.0, 2.0], FibrationParams(0, 2, 1), 3)


# -- Jacobian -------------------------------------------------------------------

@pytest.mark.parametrize("ell", [2, 3, 4, 5])
def test_linear_jacobian_ratio(ell):
    p = FibrationParams(0, ell, 1)
    z = sample_base_point(ell, seed=2)
    ratios = {round(s.jacobian_ratio, 12) for s in sample_fiber_points(z, p, 10, seed=1)}
    # J = (I | -1): singular values 1 (ell - 2 times) and sqrt(ell)
    expected = 1.0 if ell == 2 else 1 / np.sqrt(ell)
    assert ratios == {round(expected, 12)}
    assert expected > 0.3


def test_single_row_jacobian_ratio_is_one():
    p = FibrationParams(0, 2, 2)
    s = FiberSample(np.array([np.sqrt(2), 1.0 + 0j]), 0.0, 1.0, 1.0)
    assert jacobian_report(s, p) == 1.0


# -- points at infinity -------------------------------------------------------------

def test_infinity_examples():
    pts = enumerate_infinity_points(sample_base_point(3, 0), FibrationParams(1, 3, 2))
    assert len(pts) == 6
    assert sum(p.family == "coordinate(1)" for p in pts) == 2
    conic = enumerate_infinity_points([1.0], FibrationParams(0, 2, 2))
    got = sorted(tuple(np.round(p.coords.real, 12)) for p in conic)
    assert got == [(0.0, -1.0, 1.0), (0.0, 1.0, 1.0)]


def _projectively_distinct(P):
    U = P / np.linalg.norm(P, axis=1, keepdims=True)
    G = np.abs(U.conj() @ U.T)
    np.fill_diagonal(G, 0)
    return np.sqrt(1 - G.max() ** 2) > 1e-6 if len(P) > 1 else True


@pytest.mark.parametrize("p", DESK, ids=str)
def test_infinity_points_on_desk_grid(p):
    for b in range(3):
        z = sample_base_point(p.ell, seed=200 + b)
        pts = enumerate_infinity_points(z, p)
        assert len(pts) == p.k * p.r ** (p.ell - 2) + p.r ** (p.ell - 1) == p.bezout
        P = np.array([q.coords for q in pts])
        assert np.all(P[:, 0] == 0)
        assert max(homogeneous_residual(q, z.z, p) for q in P) <= 1e-9
        assert _projectively_distinct(P)
        assert all(transversality_at_infinity(q, z, p) for q in pts)


def test_transversality_example_conic():
    p = FibrationParams(0, 2, 2)
    pt = InfinityPoint(np.array([0, 1, 1], dtype=complex), "diagonal")
    assert transversality_at_infinity(pt, [1.0], p)


def test_corrupted_point_is_rejected():
    p = FibrationParams(1, 3, 2)
    z = sample_base_point(3, 0)
    q = enumerate_infinity_points(z, p)[0]
    bad = q.coords.copy()
    bad[2] += 0.1
    with pytest.raises(VerificationError):
        transversality_at_infinity(InfinityPoint(bad, q.family), z, p)


# -- sections -------------------------------------------------------------------------

@pytest.mark.parametrize("k,ell,r,i,count", [(1, 2, 1, 2, 2), (0, 3, 2, 3, 4), (2, 3, 1, 3, 3)])
def test_section_count_examples(k, ell, r, i, count):
    z = sample_base_point(ell, seed=4)
    assert coordinate_section_count(z, FibrationParams(k, ell, r), i) == count


@pytest.mark.parametrize("p", DESK, ids=str)
def test_section_counts_symmetric(p):
    z = sample_base_point(p.ell, seed=7)
    counts = {coordinate_section_count(z, p, i) for i in range(p.k + 1, p.ell + 1)}
    assert counts <= {p.bezout}
    for i in range(p.k + 1, p.ell + 1):
        P = coordinate_section_points(z, p, i)
        assert np.all(P[:, i] == 0)
        Y = P[:, 1:] / P[:, :1]
        assert max(affine_residual(y, z.z, p) for y in Y) <= 1e-9


def test_section_index_validation():
    with pytest.raises(InvalidParameterError):
        coordinate_section_count(sample_base_point(3), FibrationParams(2, 3, 1), 2)


# -- Euler identity and preimages --------------------------------------------------------

def test_euler_examples():
    assert euler_identity_check(FibrationParams(0, 2, 3), [1.0])
    assert euler_identity_check(FibrationParams(1, 2, 1), [1.0])
    from mirrorcell import kernels

    F, Fa, Fb = kernels.euler_terms(np.array([1.0 + 0j]), np.array([0j]), np.array([1.0 + 0j]), 1)
    assert F[0] == 1 and 1 * Fa[0] + 0 * Fb[0] == 2


@pytest.mark.parametrize("p", [FibrationParams(k, max(k, 2), r) for k in range(4) for r in (1, 2, 3)], ids=str)
def test_euler_identity_sampled(p):
    for b in range(3):
        assert euler_identity_check(p, sample_base_point(p.ell, seed=b), trials=50, seed=b, tol=1e-10)


def test_preimage_examples():
    assert map_f([0, 5], FibrationParams(1, 2, 1))[0] == 0
    assert map_f([1, -1], FibrationParams(0, 2, 2))[0] == 0


@pytest.mark.parametrize("p", DESK, ids=str)
def test_preimage_union(p):
    rep = preimage_union_report(p, trials=200, seed=1)
    assert rep["on_wall"] == rep["off_wall"] == 200
    assert rep["pass"]
    assert preimage_union_check(p, trials=20, seed=2)


# -- report ---------------------------------------------------------------------------------

def test_verification_report_passes_and_is_stable():
    p = FibrationParams(1, 3, 2)
    rep = verification_report(p, seed=7)
    assert rep["pass"]
    for key in ("samples", "max_residual", "min_jacobian_ratio", "infinity_count", "bezout",
                "section_counts", "preimage_check"):
        assert rep[key]["pass"]
    assert rep["samples"]["value"] == 300
    assert rep == verification_report(p, seed=7)
