"""Harmonic tiling of the joint (angular degree, radial order) index plane.

Wavelet kernels are built from a smooth bump supported on one dyadic-like
octave per axis, so that the squared kernels plus a scaling function sum to
exactly one at every (l, p): the telescoping identity that makes the frame
tight. Dilation factors lambda (angular) and nu (radial) need not be equal
or integer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator


def schwartz_s(t):
    """Smooth bump e^{-1/(1-t^2)} on (-1, 1), zero outside."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape)
    inside = np.abs(t) < 1.0
    ti = t[inside]
    out[inside] = np.exp(-1.0 / (1.0 - ti * ti))
    return out if t.ndim else float(out)


def _s_sq(lam, u):
    """s_lambda(u)^2: the bump mapped onto [1/lambda, 1]."""
    arg = 2.0 * lam / (lam - 1.0) * (u - 1.0 / lam) - 1.0
    s = schwartz_s(arg)
    return s * s


@lru_cache(maxsize=None)
def _k_norm(lam):
    val, _ = quad(lambda u: _s_sq(lam, u) / u, 1.0 / lam, 1.0,
                  epsabs=1e-14, epsrel=1e-12, limit=200)
    return val


def k_lambda(lam, t):
    """Monotone cutoff: 1 below 1/lambda, 0 above 1, smooth between.

    Direct adaptive quadrature of the defining integral ratio; the tabulated
    fast path used by build_tiling is checked against this in the tests.
    """
    if lam <= 1.0:
        raise ValueError("dilation must exceed 1")
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t <= 1.0 / lam:
        return 1.0
    if t >= 1.0:
        return 0.0
    num, _ = quad(lambda u: _s_sq(lam, u) / u, t, 1.0,
                  epsabs=1e-14, epsrel=1e-12, limit=200)
    return num / _k_norm(lam)


@lru_cache(maxsize=None)
def _k_interp(lam):
    """Monotone cubic interpolant of k on a dense log grid over [1/lam, 1].

    Segment integrals by fixed-order Gauss-Legendre in log coordinates,
    accumulated from the right; interpolation error is far below the
    admissibility tolerance.
    """
    n_seg, order = 8192, 8
    v = np.linspace(-math.log(lam), 0.0, n_seg + 1)
    xg, wg = np.polynomial.legendre.leggauss(order)
    mid = 0.5 * (v[1:] + v[:-1])
    half = 0.5 * (v[1:] - v[:-1])
    nodes = mid[:, None] + half[:, None] * xg[None, :]
    seg = _s_sq(lam, np.exp(nodes)) @ wg * half
    tail = np.zeros(n_seg + 1)
    tail[:-1] = np.cumsum(seg[::-1])[::-1]
    return PchipInterpolator(np.exp(v), tail / tail[0])


def _k_eval(lam, t):
    """Vectorized k_lambda via the cached interpolant, exact in the flat regions."""
    t = np.asarray(t, dtype=float)
    out = np.empty(t.shape)
    lo = t <= 1.0 / lam
    hi = t >= 1.0
    mid = ~(lo | hi)
    out[lo] = 1.0
    out[hi] = 0.0
    if mid.any():
        out[mid] = _k_interp(lam)(t[mid])
    return out


def generators(lam, nu, t, tp):
    """Generating-function triple (kappa_lam(t), eta_lam(t), eta_hybrid(t, tp)).

    The hybrid radicand is analytically nonnegative; a dip below -1e-12
    would mean the cutoff tables are inconsistent and raises.
    """
    ka = k_lambda(lam, t)
    kas = k_lambda(lam, t / lam)
    kb = k_lambda(nu, tp)
    kbs = k_lambda(nu, tp / nu)
    kappa_rad = kas - ka
    hybrid_rad = kas * kb + ka * kbs - ka * kb
    for rad in (kappa_rad, hybrid_rad):
        if rad < -1e-12:
            raise ArithmeticError("generator radicand negative: %g" % rad)
    kappa = math.sqrt(max(kappa_rad, 0.0))
    eta = math.sqrt(ka)
    hybrid = math.sqrt(max(hybrid_rad, 0.0))
    return kappa, eta, hybrid


def _pow(base, n):
    """base**n, exact when base is an integer-valued float."""
    if n < 0:
        return 1.0 / _pow(base, -n)
    if float(base).is_integer():
        return float(round(base) ** n)
    return float(base) ** n


def _iceil(v):
    """Ceiling robust to upward float drift of exactly-integer powers."""
    return int(math.ceil(v - 1e-12 * abs(v)))


def _ceil_log(base, x):
    """Smallest integer j with base**j >= x, for x >= 1."""
    j = _iceil(math.log(x) / math.log(base))
    while _pow(base, j) < x:
        j += 1
    while j > 0 and _pow(base, j - 1) >= x:
        j -= 1
    return j


@dataclass(frozen=True)
class TilingParams:
    """Dilations, scale range, and band-limits of one tiling.

    lam and nu are the angular and radial dilation factors (the former is
    spelled lam because of the Python keyword). J and Jp are the largest
    scales, fixed by the band-limits; construct via make_tiling_params.
    """

    lam: float
    nu: float
    J0: int
    J0p: int
    L: int
    P: int
    J: int
    Jp: int

    def __post_init__(self):
        if self.lam <= 1.0 or self.nu <= 1.0:
            raise ValueError("dilation factors must exceed 1")
        if self.L < 2 or self.P < 2:
            raise ValueError("band-limits must be >= 2")
        if self.J != _ceil_log(self.lam, self.L - 1):
            raise ValueError("J inconsistent with band-limit")
        if self.Jp != _ceil_log(self.nu, self.P - 1):
            raise ValueError("Jp inconsistent with band-limit")
        if not 0 <= self.J0 < self.J:
            raise ValueError("J0 must satisfy 0 <= J0 < J")
        if not 0 <= self.J0p < self.Jp:
            raise ValueError("J0p must satisfy 0 <= J0p < Jp")

    @property
    def scales(self):
        return [(j, jp)
                for j in range(self.J0, self.J + 1)
                for jp in range(self.J0p, self.Jp + 1)]


def make_tiling_params(lam, nu, L, P, J0=0, J0p=0):
    """TilingParams with the max scales derived from the band-limits."""
    if lam <= 1.0 or nu <= 1.0:
        raise ValueError("dilation factors must exceed 1")
    if L < 2 or P < 2:
        raise ValueError("band-limits must be >= 2")
    J = _ceil_log(lam, L - 1)
    Jp = _ceil_log(nu, P - 1)
    return TilingParams(lam=float(lam), nu=float(nu), J0=int(J0), J0p=int(J0p),
                        L=int(L), P=int(P), J=J, Jp=Jp)


@dataclass(frozen=True)
class TilingKernels:
    """Tabulated wavelet kernels psi[j, jp, l, p] and scaling kernel phi[l, p].

    Scale axes are offset by (J0, J0p); use psi_scale for absolute indices.
    Admissibility is checked at construction, so holding a TilingKernels is
    proof of a tight frame.
    """

    params: TilingParams
    psi: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)

    def psi_scale(self, j, jp):
        p = self.params
        if not (p.J0 <= j <= p.J and p.J0p <= jp <= p.Jp):
            raise ValueError("scale out of range")
        return self.psi[j - p.J0, jp - p.J0p]


def build_tiling(params):
    """Tabulate all kernels and verify the sum-to-one identity pointwise.

    The cutoff values k(l / lam^j) are shared between the wavelet and
    scaling kernels, so the identity telescopes exactly up to rounding.
    """
    lam, nu, L, P = params.lam, params.nu, params.L, params.P
    ells = np.arange(L, dtype=float)
    ps = np.arange(P, dtype=float)
    A = np.stack([_k_eval(lam, ells / _pow(lam, j))
                  for j in range(params.J0, params.J + 2)])
    B = np.stack([_k_eval(nu, ps / _pow(nu, jp))
                  for jp in range(params.J0p, params.Jp + 2)])
    ka = np.sqrt(np.clip(A[1:] - A[:-1], 0.0, None))
    kb = np.sqrt(np.clip(B[1:] - B[:-1], 0.0, None))
    fac = np.sqrt((2.0 * ells + 1.0) / (4.0 * np.pi))
    psi = np.einsum("jl,kp->jklp", ka, kb) * fac[None, None, :, None]
    a = A[0][:, None]
    b = B[0][None, :]
    phi = fac[:, None] * np.sqrt(np.clip(a + b - a * b, 0.0, None))
    total = phi * phi + np.sum(psi * psi, axis=(0, 1))
    residual = np.abs(4.0 * np.pi / (2.0 * ells[:, None] + 1.0) * total - 1.0)
    worst = float(residual.max())
    if worst > 1e-10:
        raise ArithmeticError("admissibility residual %g exceeds 1e-10" % worst)
    return TilingKernels(params=params, psi=psi, phi=phi)


def kernel_bandlimits(params, j, jp):
    """Effective band-limits (Lj, Pjp) of the wavelet kernel at scale (j, jp)."""
    if not (params.J0 <= j <= params.J and params.J0p <= jp <= params.Jp):
        raise ValueError("scale out of range")
    Lj = min(_iceil(_pow(params.lam, j + 1)), params.L)
    Pjp = min(_iceil(_pow(params.nu, jp + 1)), params.P)
    return Lj, Pjp
