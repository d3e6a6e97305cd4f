"""Command-line interface.

Subcommands cover dataset generation, the individual pipeline stages and
the end-to-end benchmark.  Every long flag can instead come from a JSON
config file passed as ``--config FILE`` whose keys are the flag names with
underscores; explicit flags win over the file.

Exit codes: 0 success, 2 parameter or schema error, 3 pipeline-stage
failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import serialize
from .detect import DetectorNoise, TemplateDetector, simulate_detections
from .errors import AudiogridError, RectificationError, SchemaError
from .grid import DEFAULT_GRID
from .hough import hough_segments
from .imaging import binarize
from .interpret import InterpretConfig, interpret
from .metrics import compute_metrics
from .overlay import render_overlay
from .pipeline import PipelineConfig, run_on_manifest
from .rectify import (
    approx_quadrilateral,
    estimate_rectification_from_lines,
    fit_to_canvas,
    rectify_from_quad,
    warp_image,
)
from .synth import DistortionRanges, RenderStyle, generate_dataset
from .synth.raster import draw_segment


def _noise_from_args(args) -> DetectorNoise:
    return DetectorNoise(
        jitter_sigma=args.noise_sigma,
        p_misclass=args.p_misclass,
        p_false_negative=args.p_false_negative,
        false_positive_rate=args.false_positive_rate,
        seed=args.noise_seed,
    )


def _add_noise_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--noise-sigma", type=float, default=0.0,
                   help="centroid jitter sigma in pixels")
    p.add_argument("--p-misclass", type=float, default=0.0,
                   help="probability a box's class is resampled")
    p.add_argument("--p-false-negative", type=float, default=0.0,
                   help="probability a box is dropped")
    p.add_argument("--false-positive-rate", type=float, default=0.0,
                   help="expected spurious boxes per image")
    p.add_argument("--noise-seed", type=int, default=0)


def cmd_generate(args) -> int:
    distortion = None
    if args.distort:
        distortion = DistortionRanges(
            angle=(args.angle_min, args.angle_max),
            rotation=(-args.rotation_max, args.rotation_max),
            lighting_magnitude=(0.0, args.lighting_max),
            noise_sigma=(0.0, args.pixel_noise_max),
            occlusion_count=args.occlusions,
            fold_probability=args.fold_prob,
        )
    manifest = generate_dataset(
        args.out, args.count, args.seed, distortion=distortion, p_mark=args.p_mark
    )
    print(f"wrote {manifest['count']} images to {args.out}")
    return 0


def cmd_rectify(args) -> int:
    img = serialize.load_gray_image(args.input)
    if args.method == "lines":
        h = estimate_rectification_from_lines(img, seed=args.seed)
    else:
        if not args.polygon:
            raise ValueError("--polygon FILE is required with --method quad")
        polygon = serialize.load_polygon(args.polygon)
        h = rectify_from_quad(approx_quadrilateral(polygon))
    h = fit_to_canvas(h, (img.shape[1], img.shape[0]))
    out = warp_image(img, h)
    serialize.save_gray_image(args.out, out)
    if args.dump_debug:
        dbg = Path(args.dump_debug)
        dbg.mkdir(parents=True, exist_ok=True)
        mask = binarize(img)
        serialize.save_gray_image(dbg / "binarized.png", mask)
        seg_img = np.stack([img] * 3, axis=-1)
        for s in hough_segments(mask):
            draw_segment(seg_img, s.x1, s.y1, s.x2, s.y2, (220, 40, 40), 2.0)
        serialize.save_gray_image(dbg / "segments.png", seg_img)
        serialize.save_gray_image(dbg / "rectified.png", out)
    print(f"rectified image written to {args.out}")
    return 0


def cmd_detect(args) -> int:
    if args.method == "file":
        if not args.detections:
            raise ValueError("--detections FILE is required with --method file")
        detections = serialize.load_detections(args.detections)
    elif args.method == "simulate":
        if not args.detections:
            raise ValueError("--detections FILE (ground truth) is required with --method simulate")
        data = json.loads(Path(args.detections).read_text())
        if isinstance(data, dict) and "level4" in data:
            gt = serialize.bundle_from_obj(data, where=args.detections).level4
        else:
            gt = serialize.detections_from_obj(data, where=args.detections)
        detections = simulate_detections(list(gt), _noise_from_args(args))
    else:
        img = serialize.load_gray_image(args.input)
        detector = TemplateDetector(
            threshold=args.threshold,
            scales=tuple(float(s) for s in args.scales.split(",")),
        ).fit()
        detections = detector.predict(img)
    serialize.save_detections(args.out, detections)
    print(f"wrote {len(detections)} detections to {args.out}")
    return 0


def cmd_interpret(args) -> int:
    detections = serialize.load_detections(args.detections)
    config = InterpretConfig(
        projection=args.projection,
        score_threshold=args.score_threshold,
        seed=args.seed,
    )
    audiogram, diagnostics = interpret(detections, DEFAULT_GRID, config)
    serialize.save_interpretation(args.out, audiogram, diagnostics)
    print(f"interpreted {len(audiogram)} marks -> {args.out}")
    return 0


def cmd_run(args) -> int:
    noise = _noise_from_args(args)
    if noise == DetectorNoise():
        noise = None
    config = PipelineConfig(
        rectify=args.rectify,
        detect=args.detect,
        noise=noise,
        interpret_config=InterpretConfig(projection=args.projection),
        quad_round_radius=args.quad_round_radius,
        seed=args.seed,
    )
    report, results, stems = run_on_manifest(args.manifest, config)
    Path(args.out).write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    if args.save_predictions:
        pred_dir = Path(args.save_predictions)
        pred_dir.mkdir(parents=True, exist_ok=True)
        for result, stem in zip(results, stems):
            serialize.save_audiogram(pred_dir / f"{stem}.json", result.prediction)
    rec = "n/a" if report.recall is None else f"{report.recall:.3f}"
    prec = "n/a" if report.precision is None else f"{report.precision:.3f}"
    print(f"recall={rec} precision={prec} over {report.n_images} images -> {args.out}")
    return 0


def cmd_evaluate(args) -> int:
    pred_dir, gt_dir = Path(args.pred), Path(args.gt)
    pairs = []
    pred_files = sorted(pred_dir.glob("*.json"))
    if not pred_files:
        raise ValueError(f"no prediction JSON files in {pred_dir}")
    for pf in pred_files:
        gf = gt_dir / pf.name
        if not gf.exists():
            raise SchemaError(f"missing ground truth for {pf.name} in {gt_dir}")
        pred = serialize.load_audiogram(pf)
        gt_data = json.loads(gf.read_text())
        if isinstance(gt_data, dict) and "level1" in gt_data:
            gt = serialize.bundle_from_obj(gt_data, where=str(gf)).level1
        else:
            gt = serialize.audiogram_from_obj(gt_data, where=str(gf))
        pairs.append((pred, gt))
    report = compute_metrics(pairs, {"pred": str(pred_dir), "gt": str(gt_dir)})
    Path(args.out).write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    rec = "n/a" if report.recall is None else f"{report.recall:.3f}"
    print(f"recall={rec} over {report.n_images} images -> {args.out}")
    return 0


def cmd_overlay(args) -> int:
    img = serialize.load_gray_image(args.image)
    detections = serialize.load_detections(args.detections)
    diagnostics = None
    if args.interpretation:
        _, diagnostics = serialize.load_interpretation(args.interpretation)
    canvas = render_overlay(img, detections, diagnostics)
    serialize.save_gray_image(args.out, canvas[:, :, ::-1])  # RGB -> BGR for the writer
    print(f"overlay written to {args.out}")
    return 0


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="audiogrid",
        description="Recover (frequency, hearing level) data from audiogram chart images.",
    )
    parser.add_argument("--config", help="JSON file supplying defaults for the flags")
    sub = parser.add_subparsers(dest="command", required=True)
    commands: dict[str, argparse.ArgumentParser] = {}

    p = sub.add_parser("generate", help="render a synthetic dataset with ground truth")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--distort", action=argparse.BooleanOptionalAction, default=True,
                   help="apply perspective/lighting/noise distortions")
    p.add_argument("--angle-min", type=float, default=0.0)
    p.add_argument("--angle-max", type=float, default=45.0)
    p.add_argument("--rotation-max", type=float, default=10.0)
    p.add_argument("--lighting-max", type=float, default=0.3)
    p.add_argument("--pixel-noise-max", type=float, default=4.0)
    p.add_argument("--occlusions", type=int, default=0)
    p.add_argument("--fold-prob", type=float, default=0.0)
    p.add_argument("--p-mark", type=float, default=0.9)
    p.set_defaults(func=cmd_generate)
    commands["generate"] = p

    p = sub.add_parser("rectify", help="remove perspective distortion from an image")
    p.add_argument("--input", required=True)
    p.add_argument("--method", choices=["lines", "quad"], default="lines")
    p.add_argument("--polygon", help="chart-region polygon JSON (quad method)")
    p.add_argument("--out", required=True)
    p.add_argument("--dump-debug", help="directory for intermediate debug images")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_rectify)
    commands["rectify"] = p

    p = sub.add_parser("detect", help="produce detections JSON for an image")
    p.add_argument("--input", help="rectified grayscale image (template method)")
    p.add_argument("--method", choices=["template", "simulate", "file"], required=True)
    p.add_argument("--detections",
                   help="input detections (file method) or ground truth (simulate)")
    p.add_argument("--threshold", type=float, default=0.8)
    p.add_argument("--scales", default="1.0", help="comma-separated template scales")
    _add_noise_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_detect)
    commands["detect"] = p

    p = sub.add_parser("interpret", help="turn detections into audiogram values")
    p.add_argument("--detections", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--projection", choices=["orthogonal", "oblique"], default="orthogonal")
    p.add_argument("--score-threshold", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_interpret)
    commands["interpret"] = p

    p = sub.add_parser("run", help="end-to-end benchmark over a dataset manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--rectify", choices=["lines", "quad", "none"], default="lines")
    p.add_argument("--detect", choices=["template", "simulate"], default="simulate")
    p.add_argument("--projection", choices=["orthogonal", "oblique"], default="orthogonal")
    p.add_argument("--quad-round-radius", type=float, default=None)
    p.add_argument("--save-predictions", help="directory for per-image prediction JSON")
    _add_noise_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_run)
    commands["run"] = p

    p = sub.add_parser("evaluate", help="compare prediction JSONs against ground truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)
    commands["evaluate"] = p

    p = sub.add_parser("overlay", help="draw detections and fits onto an image")
    p.add_argument("--image", required=True)
    p.add_argument("--detections", required=True)
    p.add_argument("--interpretation")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_overlay)
    commands["overlay"] = p

    return parser, commands


def _apply_config_file(argv, commands) -> None:
    if "--config" not in argv:
        return
    path = argv[argv.index("--config") + 1]
    try:
        cfg = json.loads(Path(path).read_text())
        if not isinstance(cfg, dict):
            raise ValueError("config file must hold a JSON object")
    except (OSError, json.JSONDecodeError, ValueError, IndexError) as exc:
        raise SchemaError(f"config file {path}: {exc}") from exc
    for sp in commands.values():
        dests = {a.dest for a in sp._actions}
        sp.set_defaults(**{k: v for k, v in cfg.items() if k in dests})


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, commands = build_parser()
    try:
        _apply_config_file(argv, commands)
        args = parser.parse_args(argv)
        return args.func(args)
    except (SchemaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AudiogridError as exc:
        print(f"pipeline failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
