"""Command-line surface: round-trip checks, benchmarks, denoising, kernels.

Heavy imports are deferred into the command bodies so that --threads can pin
the BLAS/OpenMP pools before numpy first loads. Exit codes: 0 ok, 1 tolerance
exceeded, 2 usage, 3 file-format error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from dataclasses import dataclass

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_USAGE = 2
EXIT_FORMAT = 3

CSV_HEADER = "L,P,N_samples,t_synthesis_s,t_analysis_s,t_c_s,epsilon_max"


@dataclass(frozen=True)
class BenchRecord:
    L: int
    P: int
    N_samples: int
    t_synthesis_s: float
    t_analysis_s: float
    t_c_s: float
    epsilon_max: float

    def csv_row(self):
        return "%d,%d,%d,%.6e,%.6e,%.6e,%.3e" % (
            self.L, self.P, self.N_samples, self.t_synthesis_s,
            self.t_analysis_s, self.t_c_s, self.epsilon_max)


def _record(L, P, n_samples, t_syn, t_ana, eps):
    return BenchRecord(L=L, P=P, N_samples=n_samples, t_synthesis_s=t_syn,
                       t_analysis_s=t_ana, t_c_s=0.5 * (t_syn + t_ana),
                       epsilon_max=eps)


def time_flag_roundtrip(L, P, tau=1.0, seed=0, reps=1):
    """BenchRecord for the harmonic transform pair, setup excluded."""
    import numpy as np
    from . import flag

    scheme = flag.build_ball_scheme(L, P, tau)
    warm = flag.random_coeffs(L, P, seed + 10**6).values
    flag.flag_analysis(scheme, flag.flag_synthesis(scheme, warm))
    t_syn = t_ana = 0.0
    eps = 0.0
    for rep in range(reps):
        f = flag.random_coeffs(L, P, seed + rep).values
        t0 = time.perf_counter()
        sig = flag.flag_synthesis(scheme, f)
        t1 = time.perf_counter()
        rec = flag.flag_analysis(scheme, sig)
        t2 = time.perf_counter()
        t_syn += t1 - t0
        t_ana += t2 - t1
        eps = max(eps, float(np.max(np.abs(rec - f))))
    n = P * scheme.angular.n_theta * scheme.angular.n_phi
    return _record(L, P, n, t_syn / reps, t_ana / reps, eps)


def time_flaglet_roundtrip(L, P, tau=1.0, seed=0, reps=1, multires=False,
                           lam=2.0, nu=2.0, J0=0, J0p=0):
    """BenchRecord for the wavelet transform pair; signal prep not timed."""
    import numpy as np
    from . import flag, flaglet, tiling

    scheme = flag.build_ball_scheme(L, P, tau)
    kernels = tiling.build_tiling(tiling.make_tiling_params(lam, nu, L, P,
                                                            J0=J0, J0p=J0p))
    warm = flag.flag_synthesis(scheme, flag.random_coeffs(L, P, seed + 10**6).values)
    flaglet.flaglet_synthesis(
        flaglet.flaglet_analysis(scheme, warm, kernels, multires=multires),
        kernels, scheme)
    t_syn = t_ana = 0.0
    eps = 0.0
    for rep in range(reps):
        f = flag.random_coeffs(L, P, seed + rep).values
        sig = flag.flag_synthesis(scheme, f)
        t0 = time.perf_counter()
        ws = flaglet.flaglet_analysis(scheme, sig, kernels, multires=multires)
        t1 = time.perf_counter()
        rec = flaglet.flaglet_synthesis(ws, kernels, scheme)
        t2 = time.perf_counter()
        t_ana += t1 - t0
        t_syn += t2 - t1
        eps = max(eps, float(np.max(np.abs(flag.flag_analysis(scheme, rec.values) - f))))
    n = P * scheme.angular.n_theta * scheme.angular.n_phi
    return _record(L, P, n, t_syn / reps, t_ana / reps, eps)


def fit_loglog_slope(sizes, times):
    """Least-squares slope of log(time) against log(size)."""
    import numpy as np

    return float(np.polyfit(np.log(np.asarray(sizes, float)),
                            np.log(np.asarray(times, float)), 1)[0])


def _set_threads(n):
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                "NUMEXPR_NUM_THREADS", "VECLIB_MAXIMUM_THREADS"):
        os.environ[var] = str(n)


def _tiling_kernels(args, L, P):
    from . import tiling

    params = tiling.make_tiling_params(args.lam, args.nu, L, P,
                                       J0=args.J0, J0p=args.J0p)
    return tiling.build_tiling(params)


def cmd_roundtrip(args):
    if args.transform == "flag":
        rec = time_flag_roundtrip(args.L, args.P, args.tau, args.seed)
        tol = args.tol if args.tol is not None else 1e-10
    else:
        rec = time_flaglet_roundtrip(args.L, args.P, args.tau, args.seed,
                                     multires=args.multires, lam=args.lam,
                                     nu=args.nu, J0=args.J0, J0p=args.J0p)
        tol = args.tol if args.tol is not None else 1e-9
    print(CSV_HEADER)
    print(rec.csv_row())
    if rec.epsilon_max > tol:
        print("tolerance exceeded: %.3e > %.3e" % (rec.epsilon_max, tol),
              file=sys.stderr)
        return EXIT_TOLERANCE
    return EXIT_OK


def cmd_bench(args):
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    if args.Lmin > args.Lmax:
        raise UsageError("--Lmin must not exceed --Lmax")
    for v in (args.Lmin, args.Lmax):
        if v < 4 or v & (v - 1):
            raise UsageError("sweep bounds must be powers of two >= 4")
    sizes = []
    q = args.Lmin
    while q <= args.Lmax:
        sizes.append(q)
        q *= 2
    print(CSV_HEADER)
    records = []
    for q in sizes:
        if args.transform == "flag":
            rec = time_flag_roundtrip(q, q, args.tau, args.seed, reps=args.reps)
        else:
            rec = time_flaglet_roundtrip(q, q, args.tau, args.seed,
                                         reps=args.reps, multires=args.multires,
                                         lam=args.lam, nu=args.nu,
                                         J0=args.J0, J0p=args.J0p)
        records.append(rec)
        print(rec.csv_row())
    slope = fit_loglog_slope(sizes, [r.t_c_s for r in records])
    print("# fitted_slope=%.3f" % slope)
    return EXIT_OK


def _load_clean_coeffs(path):
    from . import ballfile

    bf = ballfile.read_ballfile(path)
    if bf.kind == ballfile.KIND_SAMPLES:
        from . import flag

        signal = ballfile.unpack_samples(bf)
        coeffs = flag.flag_analysis(signal.scheme, signal)
        return coeffs, signal.scheme, bf.kind
    if bf.kind == ballfile.KIND_COEFFS:
        from . import flag, flaglet

        coeffs, tau = ballfile.unpack_coeffs(bf)
        return coeffs, flaglet._cached_scheme(bf.L, bf.P, tau), bf.kind
    raise ballfile.BallFileError("denoise needs a samples or coefficient file")


def cmd_denoise(args):
    from . import ballfile, denoise, flag

    clean, scheme, kind = _load_clean_coeffs(args.input)
    kernels = _tiling_kernels(args, scheme.L, scheme.P)
    if args.sigma == 0.0:
        # no noise to remove; pass the input through untouched
        den, snr_in, snr_out = clean, float("inf"), float("inf")
    else:
        model = denoise.NoiseModel(sigma=args.sigma, L=scheme.L, P=scheme.P,
                                   seed=args.seed)
        noise = denoise.generate_noise(model)
        sigma_eff = args.sigma
        if args.snr_in is not None:
            noise, alpha = denoise.scale_noise_to_snr(clean, noise, args.snr_in)
            sigma_eff = args.sigma * alpha
        noisy = flag.FlagCoeffs(L=scheme.L, P=scheme.P,
                                values=clean.values + noise.values)
        model_eff = denoise.NoiseModel(sigma=sigma_eff, L=scheme.L, P=scheme.P,
                                       seed=args.seed)
        den, snr_in, snr_out = denoise.denoise_pipeline(
            scheme, kernels, clean, noisy, model_eff,
            multires=args.multires, multiplier=args.multiplier)
    if kind == ballfile.KIND_SAMPLES:
        out = ballfile.pack_samples(flag.flag_synthesis(scheme, den))
    else:
        out = ballfile.pack_coeffs(den, scheme.tau)
    ballfile.write_ballfile(args.output, out)
    print("snr_in_db,snr_out_db")
    print("%s,%s" % (_db(snr_in), _db(snr_out)))
    return EXIT_OK


def _db(value):
    return "inf" if math.isinf(value) else "%.4f" % value


def cmd_kernels(args):
    import numpy as np
    from . import tiling

    kernels = _tiling_kernels(args, args.L, args.P)
    prm = kernels.params
    lines = ["# J=%d Jp=%d" % (prm.J, prm.Jp), "kind,j,jp,ell,p,value"]
    for j, jp in prm.scales:
        block = kernels.psi_scale(j, jp)
        for ell, p in zip(*np.nonzero(block)):
            lines.append("psi,%d,%d,%d,%d,%.17g" % (j, jp, ell, p, block[ell, p]))
    for ell, p in zip(*np.nonzero(kernels.phi)):
        lines.append("phi,,,%d,%d,%.17g" % (ell, p, kernels.phi[ell, p]))
    q = 4.0 * np.pi / (2.0 * np.arange(prm.L)[:, None] + 1.0)
    resid = np.abs(q * (kernels.phi**2 + np.sum(kernels.psi**2, axis=(0, 1))) - 1.0)
    lines.append("# max_admissibility_residual=%.3e" % float(resid.max()))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_synth(args):
    from . import ballfile, denoise, flag, flaglet

    if args.kind == "sparse":
        scheme = flaglet._cached_scheme(args.L, args.P, args.tau)
        kernels = _tiling_kernels(args, args.L, args.P)
        coeffs = denoise.make_sparse_signal(scheme, kernels,
                                            n_atoms=args.atoms, seed=args.seed)
    else:
        coeffs = flag.random_coeffs(args.L, args.P, args.seed, real=True)
    ballfile.write_ballfile(args.out, ballfile.pack_coeffs(coeffs, args.tau))
    print("wrote %s (kind=coeffs, L=%d, P=%d)" % (args.out, args.L, args.P))
    return EXIT_OK


class UsageError(Exception):
    pass


def _add_tiling_flags(p):
    p.add_argument("--lambda", dest="lam", type=float, default=2.0,
                   help="angular dilation factor (> 1)")
    p.add_argument("--nu", type=float, default=2.0,
                   help="radial dilation factor (> 1)")
    p.add_argument("--J0", type=int, default=0, help="lowest angular scale")
    p.add_argument("--J0p", type=int, default=0, help="lowest radial scale")


def build_parser():
    top = argparse.ArgumentParser(prog="ballwav",
                                  description="exact transforms on the ball")
    top.add_argument("--threads", type=int, default=1,
                     help="BLAS/OpenMP thread count (set before numpy loads)")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("roundtrip", help="transform a random signal there and back")
    p.add_argument("--transform", choices=("flag", "flaglet"), default="flag")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--P", type=int, required=True)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=None,
                   help="failure gate on epsilon_max (default 1e-10 flag, 1e-9 flaglet)")
    p.add_argument("--multires", action="store_true")
    _add_tiling_flags(p)
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("bench", help="timing sweep over power-of-two band-limits")
    p.add_argument("--transform", choices=("flag", "flaglet"), default="flag")
    p.add_argument("--Lmin", type=int, default=8)
    p.add_argument("--Lmax", type=int, default=64)
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--multires", action="store_true")
    _add_tiling_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("denoise", help="add model noise, threshold, report SNRs")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--snr-in", dest="snr_in", type=float, default=None,
                   help="rescale the noise to this input SNR in dB")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--multiplier", type=float, default=3.0)
    p.add_argument("--full-res", dest="multires", action="store_false")
    _add_tiling_flags(p)
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("kernels", help="export tiling kernels as CSV")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--P", type=int, required=True)
    p.add_argument("--out", default=None)
    _add_tiling_flags(p)
    p.set_defaults(func=cmd_kernels)

    p = sub.add_parser("synth", help="write a synthetic test signal")
    p.add_argument("--kind", choices=("sparse", "gaussian"), default="sparse")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--P", type=int, required=True)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--atoms", type=int, default=6)
    p.add_argument("--out", required=True)
    _add_tiling_flags(p)
    p.set_defaults(func=cmd_synth)
    return top


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    _set_threads(args.threads)
    try:
        return args.func(args)
    except UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_FORMAT
    except Exception as exc:
        from . import ballfile

        if isinstance(exc, ballfile.BallFileError):
            print("format error: %s" % exc, file=sys.stderr)
            return EXIT_FORMAT
        raise


if __name__ == "__main__":
    sys.exit(main())
