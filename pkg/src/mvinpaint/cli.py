"""Command line interface.

Subcommands: generate, mask, inpaint, render, compare.  Exit codes: 0 on
success, 1 for usage errors, 2 for file/format problems, 3 for numerical
failures.  Every run writes a JSON run summary (parameters, layer log,
timings) to stderr, or to --log PATH when given.  Outputs are bitwise
deterministic for identical invocations, independent of --threads.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from .config import SolverConfig
from .errors import (
    ConfigError,
    CutLocusError,
    DimensionMismatch,
    EigenConvergenceError,
    FileFormatError,
    GraphBuildError,
    NotPositiveDefinite,
    SolverError,
    TangentBaseMismatch,
)
from .driver import inpaint
from .fileio import read_mask, read_mvi, write_mask, write_mvi
from .metrics import compare
from .render import render
from .synthetic import cut_mask, generate_sphere_image, generate_spd_image

USAGE_ERROR = 1
DATA_ERROR = 2
NUMERICAL_ERROR = 3

_DATA_ERRORS = (FileNotFoundError, IsADirectoryError, PermissionError,
                FileFormatError, DimensionMismatch)
_NUMERICAL_ERRORS = (SolverError, GraphBuildError, CutLocusError,
                     NotPositiveDefinite, EigenConvergenceError,
                     TangentBaseMismatch)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _parse_rect(text):
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("expected i0,j0,height,width")
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError("rectangle entries must be integers")


def _parse_sigma(text):
    if text == "auto":
        return "auto"
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError('sigma must be a number or "auto"')
    if not value > 0.0:
        raise argparse.ArgumentTypeError("sigma must be positive")
    return value


def _default_threads():
    env = os.environ.get("MVG_THREADS")
    if env:
        try:
            n = int(env)
            if n >= 1:
                return n
        except ValueError:
            pass
    return None


def build_parser():
    top = _Parser(prog="mvinpaint",
                  description="Nonlocal inpainting of manifold-valued images.")
    sub = top.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic test image")
    g.add_argument("--manifold", required=True, choices=("s2", "spd2"),
                   help="which synthetic family to generate")
    g.add_argument("--rows", type=int, required=True, help="grid rows")
    g.add_argument("--cols", type=int, required=True, help="grid columns")
    g.add_argument("-o", "--output", required=True, help="output .mvi path")

    m = sub.add_parser("mask", help="write a rectangular-hole PBM mask")
    m.add_argument("--rows", type=int, required=True, help="grid rows")
    m.add_argument("--cols", type=int, required=True, help="grid columns")
    m.add_argument("--rect", type=_parse_rect, required=True,
                   help="unknown rectangle as i0,j0,height,width")
    m.add_argument("-o", "--output", required=True, help="output .pbm path")

    p = sub.add_parser("inpaint", help="fill the masked pixels of an image")
    p.add_argument("-i", "--input", required=True, help="input .mvi image")
    p.add_argument("-m", "--mask", required=True, help="input .pbm mask (1 = unknown)")
    p.add_argument("-o", "--output", required=True, help="output .mvi path")
    p.add_argument("--k", type=int, default=25, help="neighbors per vertex (default: %(default)s)")
    p.add_argument("--p", type=int, default=12, help="patch radius (default: %(default)s)")
    p.add_argument("--r", type=int, default=32, help="search window radius (default: %(default)s)")
    p.add_argument("--sigma", type=_parse_sigma, default="auto",
                   help='weight scale, positive or "auto" (default: %(default)s)')
    p.add_argument("--tau", type=float, default=0.1, help="Euler step size (default: %(default)s)")
    p.add_argument("--eps", type=float, default=1e-7,
                   help="relative-change stopping threshold (default: %(default)s)")
    p.add_argument("--max-iter", type=int, default=1000,
                   help="iteration cap per solve (default: %(default)s)")
    p.add_argument("--cumulative-active", action="store_true",
                   help="keep earlier layers active in later solves")
    p.add_argument("--threads", type=int, default=None,
                   help="worker cap for graph building (default: MVG_THREADS or machine parallelism)")

    r = sub.add_parser("render", help="render an image to .ppm or .svg")
    r.add_argument("-i", "--input", required=True, help="input .mvi image")
    r.add_argument("-m", "--mask", default=None, help="optional .pbm mask; unknown pixels render gray")
    r.add_argument("-o", "--output", required=True, help="output path ending in .ppm or .svg")

    c = sub.add_parser("compare", help="geodesic error of a result vs a reference")
    c.add_argument("-a", "--result", required=True, help="result .mvi image")
    c.add_argument("-b", "--truth", required=True, help="reference .mvi image")
    c.add_argument("-m", "--mask", required=True, help=".pbm mask naming the compared (unknown) pixels")

    for sp in (g, m, p, r, c):
        sp.add_argument("--log", default=None, help="write the JSON run summary here instead of stderr")
    return top


def _cmd_generate(args, summary):
    if args.rows < 1 or args.cols < 1:
        raise _UsageError("rows and cols must be positive")
    if args.manifold == "s2":
        img = generate_sphere_image(args.rows, args.cols)
    else:
        img = generate_spd_image(args.rows, args.cols)
    write_mvi(img, args.output)
    summary["output"] = args.output
    return 0


def _cmd_mask(args, summary):
    if args.rows < 1 or args.cols < 1:
        raise _UsageError("rows and cols must be positive")
    try:
        mask = cut_mask(args.rows, args.cols, args.rect)
    except DimensionMismatch as e:
        raise _UsageError(str(e))
    write_mask(mask, args.output)
    summary["output"] = args.output
    summary["unknown_pixels"] = int((~mask.known).sum())
    return 0


def _cmd_inpaint(args, summary):
    img = read_mvi(args.input)
    mask = read_mask(args.mask)
    if mask.known.shape != (img.rows, img.cols):
        raise DimensionMismatch(
            f"mask is {mask.rows}x{mask.cols} but image is {img.rows}x{img.cols}"
        )
    cfg = SolverConfig(
        k=args.k, p=args.p, r=args.r, sigma=args.sigma, tau=args.tau,
        eps=args.eps, max_iter=args.max_iter,
        cumulative_active=args.cumulative_active,
        threads=args.threads if args.threads is not None else _default_threads(),
    )
    try:
        cfg.validate()
    except ConfigError as e:
        raise _UsageError(str(e))
    t0 = time.perf_counter()
    result, front = inpaint(img, mask, cfg)
    solve_s = time.perf_counter() - t0
    write_mvi(result, args.output)
    summary["output"] = args.output
    summary["layers"] = [
        {
            "index": rec.index,
            "border_size": rec.border_size,
            "active_size": rec.active_size,
            "iterations": rec.iterations,
            "residual": rec.residual,
        }
        for rec in front.log
    ]
    summary["timings"]["solve_s"] = solve_s
    return 0


def _cmd_render(args, summary):
    img = read_mvi(args.input)
    mask = read_mask(args.mask) if args.mask else None
    if args.output.endswith(".ppm"):
        style = "ppm"
    elif args.output.endswith(".svg"):
        style = "svg"
    else:
        raise _UsageError("output must end in .ppm or .svg")
    render(img, mask, args.output, style)
    summary["output"] = args.output
    summary["style"] = style
    return 0


def _cmd_compare(args, summary):
    result = read_mvi(args.result)
    truth = read_mvi(args.truth)
    mask = read_mask(args.mask)
    report = compare(result, truth, mask)
    sys.stdout.write(report.text())
    summary["report"] = {
        "pixels": report.pixels,
        "mean": report.mean,
        "max": report.max,
        "rms": report.rms,
    }
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "mask": _cmd_mask,
    "inpaint": _cmd_inpaint,
    "render": _cmd_render,
    "compare": _cmd_compare,
}


def _emit_summary(summary, log_path):
    text = json.dumps(summary, sort_keys=True)
    if log_path:
        try:
            with open(log_path, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
            return
        except OSError:
            pass
    sys.stderr.write(text + "\n")


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        sys.stderr.write(f"usage error: {e}\n")
        return USAGE_ERROR
    except SystemExit as e:  # argparse --help exits 0
        return 0 if e.code in (0, None) else USAGE_ERROR

    summary = {
        "command": args.command,
        "parameters": {
            k: v for k, v in vars(args).items() if k not in ("command", "log")
        },
        "timings": {},
        "status": "ok",
    }
    t0 = time.perf_counter()
    try:
        code = _COMMANDS[args.command](args, summary)
    except _UsageError as e:
        summary["status"] = "error"
        summary["error"] = str(e)
        summary["exit_code"] = USAGE_ERROR
        summary["timings"]["total_s"] = time.perf_counter() - t0
        _emit_summary(summary, args.log)
        sys.stderr.write(f"usage error: {e}\n")
        return USAGE_ERROR
    except _DATA_ERRORS as e:
        summary["status"] = "error"
        summary["error"] = str(e)
        summary["exit_code"] = DATA_ERROR
        summary["timings"]["total_s"] = time.perf_counter() - t0
        _emit_summary(summary, args.log)
        sys.stderr.write(f"data error: {e}\n")
        return DATA_ERROR
    except _NUMERICAL_ERRORS as e:
        summary["status"] = "error"
        summary["error"] = str(e)
        summary["exit_code"] = NUMERICAL_ERROR
        summary["timings"]["total_s"] = time.perf_counter() - t0
        _emit_summary(summary, args.log)
        sys.stderr.write(f"numerical error: {e}\n")
        return NUMERICAL_ERROR
    summary["timings"]["total_s"] = time.perf_counter() - t0
    _emit_summary(summary, args.log)
    return code


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
