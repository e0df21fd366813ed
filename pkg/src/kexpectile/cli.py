"""Command-line interface: ``kexpectile {cluster,simulate,benchmark,segment,eval}``."""

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import io
from .benchmark import ALGORITHMS, format_report, run_benchmark
from .clustering import TauSpec, adaptive_tau_cluster, fixed_tau_cluster, kmeans
from .exceptions import DegeneratePartitionError
from .expectile import TAU_RULES
from .metrics import adjusted_rand_index, davies_bouldin, mse_image, psnr, silhouette
from .simgen import FAMILIES, SampleSpec, generate

MODES = ("kmeans", "fixed", "adaptive")


class CLIError(Exception):
    """Problem with the command line or its inputs; reported without a traceback."""


def _run_mode(data, k, mode, tau, seed, max_iter, tol, tau_update="median"):
    if mode == "fixed" and tau is None:
        raise CLIError("--tau is required with --mode fixed")
    if mode != "fixed" and tau is not None:
        raise CLIError(f"--tau is only valid with --mode fixed, not --mode {mode}")
    if not 1 <= k <= data.shape[0]:
        raise CLIError(f"--k must lie between 1 and {data.shape[0]}, got {k}")
    if mode == "kmeans":
        return kmeans(data, k, seed=seed, max_iter=max_iter, tol=tol)
    if mode == "fixed":
        try:
            spec = TauSpec.parse(tau)
        except (ValueError, OSError) as exc:
            raise CLIError(f"--tau: {exc}") from None
        return fixed_tau_cluster(data, k, spec, seed=seed, max_iter=max_iter, tol=tol)
    return adaptive_tau_cluster(data, k, seed=seed, max_iter=max_iter, tol=tol, tau_update=tau_update)


def _read(reader, path, flag):
    try:
        return reader(path)
    except (OSError, ValueError) as exc:
        raise CLIError(f"{flag} {path}: {exc}") from None


def cmd_cluster(args):
    data = _read(lambda p: io.read_csv_matrix(p, has_header=args.header), args.input, "--input")
    scaling = None
    if args.scale:
        try:
            data, scaling = io.scale_by_std(data)
        except ValueError as exc:
            raise CLIError(f"--scale: {exc}") from None
    result = _run_mode(data, args.k, args.mode, args.tau, args.seed, args.max_iter, args.tol,
                       args.tau_update)
    centers = result.centroids if scaling is None else scaling.invert(result.centroids)
    io.write_labels_csv(args.labels_out, result.membership)
    io.write_csv_matrix(args.centers_out, centers)
    if args.tau_out:
        io.write_csv_matrix(args.tau_out, result.tau)
    print(f"objective: {result.objective:.10g}")
    print(f"iterations: {result.iterations}")
    print(f"converged: {str(result.converged).lower()}")
    if not result.converged:
        print(f"warning: no convergence within {args.max_iter} iterations", file=sys.stderr)
    if args.k >= 2:
        print(f"silhouette: {silhouette(data, result.membership):.6f}")
        try:
            print(f"davies_bouldin: {davies_bouldin(data, result.membership):.6f}")
        except DegeneratePartitionError as exc:
            print(f"davies_bouldin: undefined ({exc})")
    return 0


def cmd_simulate(args):
    try:
        spec = SampleSpec(args.family, args.n, args.p, args.kclusters, args.seed)
    except (ValueError, TypeError) as exc:
        raise CLIError(str(exc)) from None
    ds = generate(spec)
    io.write_csv_matrix(args.data_out, ds.data)
    io.write_labels_csv(args.labels_out, ds.labels)
    return 0


def cmd_benchmark(args):
    algorithms = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    unknown = [a for a in algorithms if a not in ALGORITHMS]
    if unknown or not algorithms:
        raise CLIError(f"--algorithms: unknown algorithm(s) {unknown}; choose from {', '.join(ALGORITHMS)}")
    try:
        rows = run_benchmark(args.family, args.n, args.p, args.kclusters, args.reps,
                             algorithms, args.seed, jobs=args.jobs)
    except (ValueError, TypeError) as exc:
        raise CLIError(str(exc)) from None
    Path(args.report).write_text(format_report(rows), encoding="utf-8")
    for row in rows:
        print(f"{row.algorithm}: mean ARIx100 {row.mean_ari_x100:.2f} (std {row.std_ari_x100:.2f})")
    return 0


def _fmt_psnr(value):
    return "inf" if math.isinf(value) else f"{value:.4f}"


def cmd_segment(args):
    image = _read(io.read_ppm, args.image, "--image")
    data = io.image_to_matrix(image)
    result = _run_mode(data, args.k, args.mode, args.tau, args.seed, args.max_iter, args.tol,
                       args.tau_update)
    segmented = io.recolor(image, result.membership, result.centroids)
    out = segmented
    if args.only_cluster is not None:
        if not 0 <= args.only_cluster < args.k:
            raise CLIError(f"--only-cluster must lie between 0 and {args.k - 1}")
        mask = (result.membership != args.only_cluster).reshape(image.height, image.width)
        pixels = segmented.pixels.copy()
        pixels[mask] = 0
        out = io.RasterImage(pixels)
    io.write_ppm(args.out, out)
    if args.metrics:
        rgb = mse_image(image, segmented)
        gray = mse_image(io.to_grayscale(image), io.to_grayscale(segmented))
        print(f"rgb_mse: {rgb:.4f}")
        print(f"rgb_psnr: {_fmt_psnr(psnr(rgb))}")
        print(f"gray_mse: {gray:.4f}")
        print(f"gray_psnr: {_fmt_psnr(psnr(gray))}")
    return 0


def cmd_eval(args):
    pred = _read(io.read_labels_csv, args.pred, "--pred")
    truth = _read(io.read_labels_csv, args.truth, "--truth")
    if pred.shape != truth.shape:
        raise CLIError(f"--pred has {pred.size} labels but --truth has {truth.size}")
    try:
        value = adjusted_rand_index(pred, truth)
    except ValueError as exc:
        raise CLIError(str(exc)) from None
    print(f"{value:.6f}")
    return 0


def _add_run_options(parser):
    parser.add_argument("--k", type=int, required=True, help="number of clusters")
    parser.add_argument("--mode", choices=MODES, default="adaptive")
    parser.add_argument("--tau", help="fixed-mode tau: s:0.3 | d:0.1,0.8,0.9 | c:0.2,0.7,... | m:@file.csv")
    parser.add_argument("--tau-update", choices=TAU_RULES, default="median",
                        help="adaptive-mode tau update rule")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-iter", type=int, default=300)
    parser.add_argument("--tol", type=float, default=1e-6)


def build_parser():
    parser = argparse.ArgumentParser(prog="kexpectile", description="K-expectile clustering toolkit")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="cluster the rows of a CSV matrix")
    p.add_argument("--input", required=True)
    p.add_argument("--header", action="store_true", help="skip the first CSV line")
    p.add_argument("--scale", action="store_true", help="divide columns by their standard deviation first")
    p.add_argument("--labels-out", required=True)
    p.add_argument("--centers-out", required=True)
    p.add_argument("--tau-out")
    _add_run_options(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("simulate", help="write a synthetic dataset with ground-truth labels")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--kclusters", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--data-out", required=True)
    p.add_argument("--labels-out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("benchmark", help="mean ARI over repeated simulations")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--kclusters", type=int, required=True)
    p.add_argument("--reps", type=int, default=50)
    p.add_argument("--algorithms", default="kexpectile,kmeans")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1, help="worker processes (output is identical)")
    p.add_argument("--report", required=True)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("segment", help="segment a binary PPM image by pixel clustering")
    p.add_argument("--image", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--only-cluster", type=int)
    p.add_argument("--metrics", action="store_true", help="print MSE and PSNR (RGB and grayscale)")
    _add_run_options(p)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("eval", help="score a label file against ground truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--metric", choices=("ari",), default="ari")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"kexpectile {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"kexpectile {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
