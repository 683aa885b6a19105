import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ballwav import tiling


def test_schwartz_bump_values():
    assert tiling.schwartz_s(0.0) == pytest.approx(math.exp(-1.0), rel=1e-15)
    assert tiling.schwartz_s(0.5) == pytest.approx(math.exp(-4.0 / 3.0), rel=1e-15)
    assert tiling.schwartz_s(1.0) == 0.0
    assert tiling.schwartz_s(-1.0) == 0.0
    assert tiling.schwartz_s(3.7) == 0.0
    arr = tiling.schwartz_s(np.array([-0.3, 0.3]))
    assert arr[0] == arr[1]


@given(st.floats(-2.0, 2.0))
def test_schwartz_bump_bounded_by_center(t):
    assert tiling.schwartz_s(t) <= tiling.schwartz_s(0.0)
    assert tiling.schwartz_s(t) >= 0.0


def test_cutoff_flat_regions_exact():
    for lam in (2.0, 3.0, 1.7):
        assert tiling.k_lambda(lam, 0.0) == 1.0
        assert tiling.k_lambda(lam, 1.0 / lam) == 1.0
        assert tiling.k_lambda(lam, 0.3 / lam) == 1.0
        assert tiling.k_lambda(lam, 1.0) == 0.0
        assert tiling.k_lambda(lam, 17.0) == 0.0


def test_cutoff_strictly_decreasing_in_transition():
    assert tiling.k_lambda(2.0, 0.6) > tiling.k_lambda(2.0, 0.75)
    assert tiling.k_lambda(2.0, 0.75) > tiling.k_lambda(2.0, 0.9)
    assert 0.0 < tiling.k_lambda(2.0, 0.9) < 1.0


def test_cutoff_argument_errors():
    with pytest.raises(ValueError):
        tiling.k_lambda(1.0, 0.5)
    with pytest.raises(ValueError):
        tiling.k_lambda(2.0, -0.1)


@pytest.mark.parametrize("lam", [2.0, 3.0, 1.7])
def test_cutoff_interpolant_matches_quadrature(lam):
    # the tabulated fast path against the defining integral, mid region
    ts = np.linspace(1.0 / lam + 1e-3, 1.0 - 1e-3, 23)
    fast = tiling._k_eval(lam, ts)
    slow = np.array([tiling.k_lambda(lam, t) for t in ts])
    assert np.max(np.abs(fast - slow)) < 5e-11


def test_cutoff_interpolant_monotone():
    ts = np.linspace(0.0, 1.1, 4001)
    vals = tiling._k_eval(2.0, ts)
    assert np.all(np.diff(vals) <= 1e-15)
    assert vals[0] == 1.0 and vals[-1] == 0.0


def test_generator_values():
    kappa, eta, hybrid = tiling.generators(2.0, 2.0, 1.0, 0.25)
    assert kappa == pytest.approx(1.0, abs=1e-14)
    assert eta == 0.0
    kappa2, eta2, hybrid2 = tiling.generators(2.0, 3.0, 0.2, 0.1)
    assert eta2 == 1.0
    assert hybrid2 == pytest.approx(1.0, abs=1e-14)
    assert kappa2 == 0.0


@given(st.floats(1.05, 4.0), st.floats(1.0, 1e6))
@settings(max_examples=200)
def test_ceil_log_is_smallest_exponent(base, x):
    j = tiling._ceil_log(base, x)
    assert tiling._pow(base, j) >= x
    if j > 0:
        assert tiling._pow(base, j - 1) < x


def test_params_scale_counts():
    p = tiling.make_tiling_params(2.0, 2.0, 5, 5)
    assert p.J == 2 and p.Jp == 2
    big = tiling.make_tiling_params(2.0, 2.0, 128, 128)
    assert big.J == 7 and big.Jp == 7
    assert len(big.scales) == 64
    offset = tiling.make_tiling_params(2.0, 2.0, 128, 128, J0=3, J0p=5)
    assert offset.scales[0] == (3, 5) and offset.scales[-1] == (7, 7)
    assert len(offset.scales) == 5 * 3


def test_params_validation():
    with pytest.raises(ValueError):
        tiling.make_tiling_params(1.0, 2.0, 16, 16)
    with pytest.raises(ValueError):
        tiling.make_tiling_params(2.0, 2.0, 1, 16)
    with pytest.raises(ValueError):
        tiling.make_tiling_params(2.0, 2.0, 16, 16, J0=4)
    with pytest.raises(ValueError):
        tiling.make_tiling_params(2.0, 2.0, 16, 16, J0p=99)
    # direct construction cannot smuggle in an inconsistent max scale
    with pytest.raises(ValueError):
        tiling.TilingParams(lam=2.0, nu=2.0, J0=0, J0p=0, L=16, P=16, J=3, Jp=4)


def test_kernel_bandlimits():
    p = tiling.make_tiling_params(2.0, 3.0, 128, 128)
    assert p.J == 7 and p.Jp == 5
    assert tiling.kernel_bandlimits(p, 3, 2) == (16, 27)
    # the top scale clamps at the band-limit
    assert tiling.kernel_bandlimits(p, 7, 5) == (128, 128)
    with pytest.raises(ValueError):
        tiling.kernel_bandlimits(p, 8, 0)
    with pytest.raises(ValueError):
        tiling.kernel_bandlimits(p, 0, 6)


def test_wavelet_kernel_compact_support():
    # scale j covers only degrees strictly between lam^(j-1) and lam^(j+1)
    kern = tiling.build_tiling(tiling.make_tiling_params(2.0, 2.0, 16, 16))
    psi22 = kern.psi_scale(2, 2)
    inside_l = np.array([3, 4, 5, 6, 7])
    inside_p = np.array([3, 4, 5, 6, 7])
    assert np.all(psi22[np.ix_(inside_l, inside_p)] > 0.0)
    assert np.all(psi22[:3, :] == 0.0)
    assert np.all(psi22[8:, :] == 0.0)
    assert np.all(psi22[:, :3] == 0.0)
    assert np.all(psi22[:, 8:] == 0.0)


@pytest.mark.parametrize("lam", [2.0, 3.0])
@pytest.mark.parametrize("nu", [2.0, 3.0])
def test_admissibility_identity(lam, nu):
    kern = tiling.build_tiling(tiling.make_tiling_params(lam, nu, 16, 16))
    ells = np.arange(16.0)
    total = kern.phi**2 + np.sum(kern.psi**2, axis=(0, 1))
    residual = 4.0 * np.pi / (2.0 * ells[:, None] + 1.0) * total - 1.0
    assert np.max(np.abs(residual)) < 1e-10


def test_psi_matches_generator_products():
    lam, nu = 2.0, 2.0
    kern = tiling.build_tiling(tiling.make_tiling_params(lam, nu, 16, 16))
    for j in (1, 3):
        for jp in (2, 4):
            block = kern.psi_scale(j, jp)
            for l in (1, 5, 11):
                for p in (3, 7, 13):
                    ka = tiling.generators(lam, nu, l / lam**j, 0.0)[0]
                    kb = tiling.generators(nu, lam, p / nu**jp, 0.0)[0]
                    fac = math.sqrt((2.0 * l + 1.0) / (4.0 * math.pi))
                    assert block[l, p] == pytest.approx(fac * ka * kb, abs=1e-10)


def test_phi_matches_closed_form():
    params = tiling.make_tiling_params(2.0, 2.0, 16, 16, J0=1, J0p=2)
    kern = tiling.build_tiling(params)
    for l in (0, 1, 4, 9):
        for p in (0, 2, 6, 15):
            a = tiling.k_lambda(2.0, l / 2.0**1)
            b = tiling.k_lambda(2.0, p / 2.0**2)
            fac = math.sqrt((2.0 * l + 1.0) / (4.0 * math.pi))
            expect = fac * math.sqrt(a + b - a * b)
            assert kern.phi[l, p] == pytest.approx(expect, abs=1e-10)


def test_psi_scale_range_errors():
    kern = tiling.build_tiling(tiling.make_tiling_params(2.0, 2.0, 16, 16, J0=1))
    with pytest.raises(ValueError):
        kern.psi_scale(0, 0)
    with pytest.raises(ValueError):
        kern.psi_scale(5, 0)
    assert kern.psi_scale(4, 4).shape == (16, 16)
