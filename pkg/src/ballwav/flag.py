"""Separable harmonic transform on the solid ball, plus the Bessel bridge.

A ball signal sampled on (radial node, theta, phi) maps to coefficients
f[p, lm] by running the spherical transform shell by shell and the radial
analysis along each (l, m) line; both orders commute. The bridge evaluates
the analytic overlap of the radial basis with spherical Bessel functions,
giving Fourier-Bessel coefficients of band-limited signals as finite sums.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from . import laguerre, sht


def sqrt4pi_factor(L):
    """sqrt(4 pi / (2l+1)) per packed (l, m) index."""
    ell, _ = sht._lm_arrays(L)
    return np.sqrt(4.0 * np.pi / (2.0 * ell + 1.0))


@dataclass(frozen=True)
class BallScheme:
    """Product of a radial and an angular scheme; samples live on P shells."""

    radial: laguerre.RadialScheme
    angular: sht.AngularScheme
    R: float

    @property
    def L(self):
        return self.angular.L

    @property
    def P(self):
        return self.radial.P

    @property
    def tau(self):
        return self.radial.tau

    @property
    def grid_shape(self):
        return (self.radial.P,) + self.angular.grid_shape


@dataclass(frozen=True)
class BallSignal:
    scheme: BallScheme
    values: np.ndarray


@dataclass(frozen=True)
class FlagCoeffs:
    """values[p, l*l+l+m]; p-major layout matching the radial transform stride."""

    L: int
    P: int
    values: np.ndarray
    real: bool = False


def build_ball_scheme(L, P, tau=1.0):
    radial = laguerre.build_radial_scheme(P, tau)
    angular = sht.build_angular_scheme(L)
    return BallScheme(radial=radial, angular=angular, R=float(radial.nodes[-1]))


def _coeff_array(coeffs):
    return coeffs.values if isinstance(coeffs, FlagCoeffs) else np.asarray(coeffs)


def flag_analysis(scheme, signal):
    """Coefficients of a sampled ball signal; exact at band-limits (L, P).

    Accepts a BallSignal or a bare array (..., P, n_theta, n_phi); leading
    axes are batched through untouched.
    """
    vals = signal.values if isinstance(signal, BallSignal) else np.asarray(signal)
    if vals.shape[-3:] != scheme.grid_shape:
        raise ValueError("signal grid does not match scheme")
    shells = sht.sht_forward(scheme.angular, vals)
    out = np.einsum("pi,...il->...pl", scheme.radial.weighted_basis, shells)
    if isinstance(signal, BallSignal):
        return FlagCoeffs(L=scheme.L, P=scheme.P, values=out)
    return out


def flag_synthesis(scheme, coeffs):
    """Evaluate coefficients on the scheme grid (inverse of flag_analysis)."""
    vals = _coeff_array(coeffs)
    Pc = vals.shape[-2]
    if Pc > scheme.P or vals.shape[-1] > scheme.L**2:
        raise ValueError("coefficient band-limits exceed scheme")
    S = scheme.radial.node_synthesis[:, :Pc]
    at_nodes = np.einsum("ip,...pl->...il", S, vals)
    grid = sht.sht_inverse(scheme.angular, at_nodes)
    if isinstance(coeffs, FlagCoeffs):
        return BallSignal(scheme=scheme, values=grid)
    return grid


def ball_energy_quadrature(scheme, signal):
    """Quadrature of integral |f|^2 r^2 dr dOmega over the ball grid."""
    vals = signal.values if isinstance(signal, BallSignal) else np.asarray(signal)
    q = scheme.radial.radial_quad_weights
    w = scheme.angular.theta_weights * (2.0 * np.pi / scheme.angular.n_phi)
    return np.einsum("i,t,...itp->...", q, w, np.abs(vals) ** 2)


def ball_convolve_axisym(f, h):
    """Convolution against an axisymmetric kernel, in coefficient space."""
    fv = _coeff_array(f)
    hv = _coeff_array(h)
    if fv.shape != hv.shape:
        raise ValueError("band-limits of f and h do not match")
    L = int(np.sqrt(fv.shape[-1]))
    ell, m = sht._lm_arrays(L)
    if np.any(np.abs(hv[..., m != 0]) > 0):
        raise ValueError("kernel is not axisymmetric: nonzero coefficients at m != 0")
    h_ell = hv[..., ell * ell + ell]
    out = sqrt4pi_factor(L) * fv * np.conj(h_ell)
    if isinstance(f, FlagCoeffs):
        return FlagCoeffs(L=f.L, P=f.P, values=out, real=False)
    return out


def random_coeffs(L, P, seed, real=False):
    """Unit-variance Gaussian coefficients; conjugate-symmetric when real."""
    rng = np.random.default_rng(seed)
    vals = (rng.standard_normal((P, L * L))
            + 1j * rng.standard_normal((P, L * L))) / np.sqrt(2.0)
    if real:
        _, m_of = sht._lm_arrays(L)
        zero = m_of == 0
        vals[:, zero] = np.sqrt(2.0) * vals[:, zero].real
        pos = np.where(m_of > 0)[0]
        neg = pos - 2 * m_of[pos]
        vals[:, neg] = (-1.0) ** m_of[pos] * np.conj(vals[:, pos])
    return FlagCoeffs(L=L, P=P, values=vals, real=real)


# ---------------------------------------------------------------------------
# Bessel bridge


def _cpj_table(P):
    """c^p_j for j <= p < P, by the recurrence; zero above the diagonal."""
    C = np.zeros((P, P + 2))
    for p in range(P):
        C[p, 0] = (p + 1) * (p + 2) / 2.0
        for j in range(1, p + 1):
            C[p, j] = -(p - j + 1) / (j * (j + 2.0)) * C[p, j - 1]
    return C


@dataclass(frozen=True)
class BesselBridge:
    """Tables for the overlap of the radial basis with spherical Bessels.

    The moment sum alternates and loses digits as p and tau*k grow; values
    are usable without the precision flag for p up to a few tens.
    """

    L: int
    P: int
    tau: float
    cpj: np.ndarray = field(repr=False)


def build_bessel_bridge(L, P, tau=1.0):
    if L < 1 or P < 1:
        raise ValueError("band-limits must be >= 1")
    return BesselBridge(L=L, P=P, tau=float(tau), cpj=_cpj_table(P))


def _gauss_series(a, b, c, w, n_terms=None):
    """sum_n (a)_n (b)_n / (c)_n w^n / n!, with the sum of |terms|.

    Terminating when n_terms is given (b a nonpositive integer); otherwise
    runs to convergence (requires w < 1 or a positive-term convergent case).
    """
    total = 1.0
    abs_total = 1.0
    term = 1.0
    n = 0
    converged = n_terms is not None
    limit = n_terms if n_terms is not None else 200000
    while n < limit:
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * w
        total += term
        abs_total += abs(term)
        n += 1
        if n_terms is None and abs(term) <= 1e-18 * abs(total):
            converged = True
            break
    return total, abs_total, converged


def _mu_moment(ell, j, k, tau):
    """Moment mu^l_j(k) = integral r^(j) shapes against j_l, closed form.

    Returns (value, condition) with condition = sum|terms|/|sum| of the
    hypergeometric series actually evaluated.
    """
    kt = tau * k
    z4 = 4.0 * kt * kt
    om = 1.0 / (1.0 + z4)  # = 1 - w
    w = z4 * om
    a = (j + ell + 1) / 2.0
    b = (j + ell) / 2.0 + 1.0
    c = ell + 1.5
    d = j - ell
    if d >= 1 and d % 2 == 1:
        S, A, _ = _gauss_series(a, c - b, c, w, n_terms=(d - 1) // 2)
        F, cond = om**a * S, A / abs(S) if S != 0 else np.inf
    elif d >= 2:
        S, A, _ = _gauss_series(c - a, b, c, w, n_terms=(d - 2) // 2)
        F, cond = om**b * S, A / abs(S) if S != 0 else np.inf
    else:
        S, A, ok = _gauss_series(a, c - b, c, w)
        F, cond = om**a * S, 1.0 if ok else np.inf
    if ell == 0:
        lead = 1.0
    elif k == 0.0:
        return 0.0, 1.0
    else:
        lead = kt**ell
    pref = np.sqrt(np.pi) * np.exp(
        j * np.log(2.0) + gammaln(j + ell + 1.0) - gammaln(ell + 1.5)
    )
    return pref * lead * tau**1.5 * F, cond


def jlp(bridge, ell, p, k, return_flag=False):
    """Overlap of radial basis order p with the spherical Bessel j_l(k r).

    Compensated summation over the bridge coefficients; when return_flag is
    true, also returns whether the estimated relative error exceeds 1e-8
    (alternating-sum cancellation, growing with p and tau*k).
    """
    if not (0 <= ell < bridge.L and 0 <= p < bridge.P):
        raise ValueError("(ell, p) out of bridge range")
    if k < 0:
        raise ValueError("k must be nonnegative")
    total = 0.0
    comp = 0.0
    abs_total = 0.0
    for j in range(p + 1):
        mu, cond = _mu_moment(ell, j + 2, k, bridge.tau)
        term = bridge.cpj[p, j] * mu
        if term != 0.0:
            abs_total += abs(term) * cond
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
    norm = 1.0 / np.sqrt((p + 1.0) * (p + 2.0))
    value = norm * total
    if not return_flag:
        return value
    if total == 0.0:
        flagged = abs_total > 0.0
    else:
        flagged = not np.isfinite(value) or (
            np.finfo(float).eps * abs_total / abs(total) > 1e-8
        )
    return value, flagged


@dataclass(frozen=True)
class FourierBesselTable:
    """f~_lm(k) values on the requested k list, with precision flags."""

    L: int
    ks: np.ndarray
    values: np.ndarray
    flagged: np.ndarray


def fourier_bessel(bridge, coeffs, ks):
    """Fourier-Bessel coefficients sqrt(2/pi) sum_p f[p, lm] j_lp(k)."""
    fv = _coeff_array(coeffs)
    P, n_lm = fv.shape[-2], fv.shape[-1]
    L = int(np.sqrt(n_lm))
    if P > bridge.P or L > bridge.L:
        raise ValueError("coefficient band-limits exceed bridge tables")
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    if np.any(ks < 0) or not np.all(np.isfinite(ks)):
        raise ValueError("ks must be finite and nonnegative")
    ell_of, _ = sht._lm_arrays(L)
    jl = np.empty((L, P, ks.size))
    fl = np.empty((L, P, ks.size), dtype=bool)
    for ell in range(L):
        for p in range(P):
            for ik, k in enumerate(ks):
                jl[ell, p, ik], fl[ell, p, ik] = jlp(bridge, ell, p, k, return_flag=True)
    vals = np.sqrt(2.0 / np.pi) * np.einsum("pl,lpk->lk", fv, jl[ell_of])
    contributes = (np.abs(fv.T) > 0)[:, :, None]
    flagged = np.any(contributes & fl[ell_of], axis=1)
    return FourierBesselTable(L=L, ks=ks, values=vals, flagged=flagged)
