"""Command-line interface.

Exit codes: 0 on success, 1 on I/O failure (missing or unreadable files),
2 on invalid arguments or data (mixed dimensions, unknown patterns, filters
larger than the image; argparse errors land here too).
"""

import argparse
import os
import sys

import numpy as np

from . import formats, metrics, ops, sim, solver, trainer


def _parse_coherence(text):
    """'0.7' -> constant, '0.3:0.9' -> linear left-to-right ramp."""
    if ":" in text:
        lo, hi = text.split(":", 1)
        return (float(lo), float(hi))
    return float(text)


def cmd_train(args):
    names = sorted(
        f for f in os.listdir(args.input_dir) if f.lower().endswith(".cimg")
    )
    if not names:
        raise ValueError(f"no .cimg rasters found in {args.input_dir}")
    images = [formats.read_cimg(os.path.join(args.input_dir, f)) for f in names]
    shapes = {im.shape for im in images}
    if len(shapes) != 1:
        raise ValueError(f"rasters mix dimensions: {sorted(shapes)}")
    config = trainer.TrainConfig(
        lmbda=args.lmbda,
        rho=args.rho,
        sigma=args.sigma,
        num_filters=args.filters,
        filter_size=args.filter_size,
        outer_iters=args.iters,
        seed=args.seed,
    )
    bank, trace = trainer.learn_dictionary(images, config)
    formats.write_cdic(args.out, bank)
    trace_path = args.trace or args.out + ".trace.txt"
    formats.write_trace_txt(trace_path, trace)
    print(f"trained {args.filters} filters of {args.filter_size}x{args.filter_size} "
          f"from {len(images)} rasters -> {args.out}")
    return 0


def cmd_denoise(args):
    image = formats.read_cimg(args.input)
    bank = formats.read_cdic(args.dict)
    if bank.shape[1] > min(image.shape):
        raise ValueError(
            f"dictionary filter size {bank.shape[1]} exceeds image {image.shape}"
        )
    config = solver.SolverConfig(
        lmbda=args.lmbda,
        mu=args.mu,
        rho=args.rho,
        max_iters=args.iters,
        tol=args.tol,
    )
    stack, trace = solver.encode(image, bank, config)
    restored = ops.convolve_sum(bank, stack)
    formats.write_cimg(args.out, restored)
    if args.png:
        formats.render_phase_png(args.png, restored)
    status = "converged" if trace.converged else "iteration cap"
    print(f"restored {args.input} -> {args.out} ({len(trace)} iterations, {status})")
    return 0


def cmd_simulate(args):
    spec = sim.PatternSpec(
        kind=args.kind,
        rows=args.rows,
        cols=args.cols,
        coherence=_parse_coherence(args.coherence),
        seed=args.seed,
    )
    scene = sim.make_pattern(spec)
    noisy = sim.simulate_interferogram(scene, args.seed)
    formats.write_cimg(args.out_prefix + ".truth.cimg", scene.clean_interferogram())
    formats.write_cimg(args.out_prefix + ".noisy.cimg", noisy)
    formats.write_cimg(
        args.out_prefix + ".coh.cimg", scene.coherence.astype(np.complex128)
    )
    print(f"simulated {args.kind} scene ({args.rows}x{args.cols}) -> "
          f"{args.out_prefix}.{{truth,noisy,coh}}.cimg")
    return 0


def cmd_metrics(args):
    truth = formats.read_cimg(args.truth)
    estimate = formats.read_cimg(args.estimate)
    value = metrics.psnr(truth, estimate)
    print(f"PSNR [dB]: {value:.2f}")
    if args.out_prefix:
        resid = metrics.residual_phase(truth, estimate)
        formats.write_cimg(args.out_prefix + ".residual.cimg", resid.astype(complex))
        cmap = metrics.colinearity_map(np.angle(estimate), args.window)
        formats.write_cimg(args.out_prefix + ".colinearity.cimg", cmap.astype(complex))
    return 0


def _mc_methods(args):
    methods = []
    for name in args.methods.split(","):
        name = name.strip()
        if name == "identity":
            methods.append((name, lambda im: im))
        elif name == "boxcar":
            window = args.window
            methods.append((name, lambda im, w=window: sim.boxcar_filter(im, w)))
        elif name == "csc":
            if not args.dict:
                raise ValueError("method 'csc' requires --dict")
            bank = formats.read_cdic(args.dict)
            config = solver.SolverConfig(
                lmbda=args.lmbda, mu=args.mu, rho=args.rho,
                max_iters=args.iters, tol=args.tol,
            )
            methods.append(
                (name, lambda im, b=bank, c=config: solver.denoise(im, b, c))
            )
        else:
            raise ValueError(f"unknown method {name!r}")
    return methods


def cmd_mc_step(args):
    named = _mc_methods(args)
    results = sim.mc_step_experiment(
        trials=args.trials,
        coherence=args.coherence,
        methods=[fn for _, fn in named],
        seed=args.seed,
        profile_len=args.profile_len,
        rows=args.rows,
    )
    for (name, _), (mean, std) in zip(named, results):
        path = f"{args.out_prefix}.{name}.csv"
        formats.write_profile_csv(path, mean, std)
        print(f"{name}: wrote {path}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="phasecsc",
        description="Complex convolutional sparse coding for interferometric "
        "phase restoration",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="learn a filter dictionary from clean rasters")
    p.add_argument("input_dir", help="directory of .cimg rasters, equal dimensions")
    p.add_argument("--out", required=True, help="output .cdic path")
    p.add_argument("--filters", type=int, default=16)
    p.add_argument("--filter-size", type=int, default=8)
    p.add_argument("--lambda", dest="lmbda", type=float, default=0.2)
    p.add_argument("--rho", type=float, default=2.0)
    p.add_argument("--sigma", type=float, default=2.0)
    p.add_argument("--iters", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trace", help="objective trace path (default: OUT.trace.txt)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("denoise", help="restore a raster with a trained dictionary")
    p.add_argument("input", help="noisy .cimg raster")
    p.add_argument("--dict", required=True, help=".cdic dictionary")
    p.add_argument("--out", required=True, help="restored .cimg path")
    p.add_argument("--lambda", dest="lmbda", type=float, default=2.5)
    p.add_argument("--mu", type=float, default=5.0,
                   help="gradient penalty; 0 selects the plain coder")
    p.add_argument("--rho", type=float, default=None, help="default 10*lambda")
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--iters", type=int, default=300)
    p.add_argument("--png", help="also render the phase to this PNG")
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("simulate", help="generate truth/noisy interferogram pairs")
    p.add_argument("--kind", required=True, choices=sim.PATTERN_KINDS)
    p.add_argument("--rows", type=int, default=256)
    p.add_argument("--cols", type=int, default=256)
    p.add_argument("--coherence", default="1.0",
                   help="constant '0.7' or column ramp '0.3:0.9'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("metrics", help="PSNR and residual/colinearity rasters")
    p.add_argument("truth", help="ground truth .cimg")
    p.add_argument("estimate", help="restored .cimg")
    p.add_argument("--window", type=int, default=7)
    p.add_argument("--out-prefix", help="write residual/colinearity rasters")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("mc-step", help="Monte-Carlo step restoration profiles")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--coherence", type=float, default=0.3)
    p.add_argument("--methods", default="identity,boxcar",
                   help="comma list: identity, boxcar, csc")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--profile-len", type=int, default=256)
    p.add_argument("--rows", type=int, default=32)
    p.add_argument("--window", type=int, default=5, help="boxcar window")
    p.add_argument("--dict", help=".cdic dictionary for the csc method")
    p.add_argument("--lambda", dest="lmbda", type=float, default=2.5)
    p.add_argument("--mu", type=float, default=5.0)
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--iters", type=int, default=300)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_mc_step)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, formats.FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
