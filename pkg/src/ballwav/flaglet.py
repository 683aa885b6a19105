"""Wavelet analysis and synthesis on the ball.

Each scale is a harmonic product of the signal coefficients with one tiling
kernel, mapped back to real space. In multiresolution mode a scale is
sampled only at its own band-limits, which is lossless because the kernel
vanishes outside them; the scaling part always stays at full resolution.
The frame is tight, so synthesis is the adjoint accumulation and the round
trip is exact for band-limited signals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import flag, sht, tiling


@lru_cache(maxsize=64)
def _cached_scheme(L, P, tau):
    return flag.build_ball_scheme(L, P, tau)


def _packed_kernel(kern2d, L_red, P_red):
    """Kernel block (l, p) -> (p, packed lm) at reduced band-limits."""
    ell_of, _ = sht._lm_arrays(L_red)
    return kern2d[ell_of, :P_red].T


def _to_real(values, what):
    resid = float(np.max(np.abs(values.imag)))
    bound = 1e-10 * max(1.0, float(np.max(np.abs(values.real))))
    if resid > bound:
        raise ArithmeticError(
            "%s imaginary residue %g exceeds %g for real input" % (what, resid, bound)
        )
    return values.real.copy()


@dataclass(frozen=True)
class WaveletCoeffSet:
    """Scaling signal plus one ball signal per wavelet scale.

    wavelets maps (j, jp) to a BallSignal whose scheme is the reduced one
    when multires is set, the full one otherwise.
    """

    params: tiling.TilingParams
    scaling: flag.BallSignal
    wavelets: dict
    multires: bool

    @property
    def scales(self):
        return self.params.scales


def _check_match(scheme, kernels):
    prm = kernels.params
    if scheme.L != prm.L or scheme.P != prm.P:
        raise ValueError("kernel band-limits do not match scheme")


def flaglet_analysis(scheme, signal, kernels, multires=False):
    """Decompose a band-limited ball signal into wavelet and scaling parts."""
    _check_match(scheme, kernels)
    vals = signal.values if isinstance(signal, flag.BallSignal) else np.asarray(signal)
    real_in = not np.iscomplexobj(vals)
    f = flag.flag_analysis(scheme, vals.astype(complex))
    fac = flag.sqrt4pi_factor(scheme.L)
    prm = kernels.params

    w_phi = fac[None, :] * f * _packed_kernel(kernels.phi, scheme.L, scheme.P)
    s_vals = flag.flag_synthesis(scheme, w_phi)
    if real_in:
        s_vals = _to_real(s_vals, "scaling coefficients")
    scaling = flag.BallSignal(scheme=scheme, values=s_vals)

    wavelets = {}
    for j, jp in prm.scales:
        psi = kernels.psi_scale(j, jp)
        if multires:
            Lj, Pjp = tiling.kernel_bandlimits(prm, j, jp)
            sub = _cached_scheme(Lj, Pjp, scheme.tau)
        else:
            Lj, Pjp, sub = scheme.L, scheme.P, scheme
        w = fac[None, : Lj * Lj] * f[:Pjp, : Lj * Lj] * _packed_kernel(psi, Lj, Pjp)
        w_vals = flag.flag_synthesis(sub, w)
        if real_in:
            w_vals = _to_real(w_vals, "wavelet (%d, %d)" % (j, jp))
        wavelets[(j, jp)] = flag.BallSignal(scheme=sub, values=w_vals)
    return WaveletCoeffSet(params=prm, scaling=scaling, wavelets=wavelets,
                           multires=multires)


def flaglet_synthesis(coeffs, kernels, scheme):
    """Reconstruct the ball signal from a WaveletCoeffSet (exact round trip)."""
    _check_match(scheme, kernels)
    if coeffs.params != kernels.params:
        raise ValueError("coefficient set was built with different tiling params")
    prm = kernels.params
    fac = flag.sqrt4pi_factor(scheme.L)
    real_in = not np.iscomplexobj(coeffs.scaling.values)

    acc = np.zeros((scheme.P, scheme.L * scheme.L), dtype=complex)
    g = flag.flag_analysis(scheme, coeffs.scaling.values.astype(complex))
    acc += fac[None, :] * g * _packed_kernel(kernels.phi, scheme.L, scheme.P)
    for j, jp in prm.scales:
        w = coeffs.wavelets[(j, jp)]
        sub = w.scheme
        real_in = real_in and not np.iscomplexobj(w.values)
        g = flag.flag_analysis(sub, w.values.astype(complex))
        psi = kernels.psi_scale(j, jp)
        Lj, Pjp = sub.L, sub.P
        acc[:Pjp, : Lj * Lj] += (
            fac[None, : Lj * Lj] * g * _packed_kernel(psi, Lj, Pjp)
        )
    out = flag.flag_synthesis(scheme, acc)
    if real_in:
        out = _to_real(out, "reconstruction")
    return flag.BallSignal(scheme=scheme, values=out)
