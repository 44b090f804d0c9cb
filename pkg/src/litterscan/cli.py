"""Command-line front end.

Subcommands compose through the annotation file format: `detect` writes a
detections file that `eval`, `density`, and `stats` accept unchanged.
Output files are written next to a `.incomplete` marker path and renamed
into place only when the command finishes, so an aborted run never leaves
a truncated file under the requested name.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from litterscan.dataset import (
    SequenceManifest,
    dataset_stats,
    decimate,
    load_annotations,
    save_annotations,
)
from litterscan.detect import DetectorConfig, DetectorError, JitterParams
from litterscan.evaluation import DEFAULT_IOU_THRESHOLD, evaluate
from litterscan.geomap import (
    DEFAULT_CAMERA_HEIGHT_M,
    DEFAULT_CAPTURE_FPS,
    DEFAULT_CELL_SIZE_M,
    DEFAULT_FRAME_OVERLAP,
    DEFAULT_SPEED_KMH,
    DEFAULT_SWATH_WIDTH_M,
    CameraFootprint,
    accumulate_density,
    locate_box,
    save_geojson,
    swath_length_from_motion,
)
from litterscan.merge import MergeConfig
from litterscan.pipeline import PipelineConfig, run_pipeline
from litterscan.taxonomy import Taxonomy, default_taxonomy, load_taxonomy
from litterscan.tiling import FrameSpec, WindowSpec, plan_tiles, save_plan


def _parse_window(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}")


def _load_taxonomy(args: argparse.Namespace) -> Taxonomy:
    if getattr(args, "taxonomy", None):
        return load_taxonomy(args.taxonomy)
    return default_taxonomy()


def _atomic_write(path: str | Path, write):
    """Write via a `.incomplete` sibling, renaming only on success."""
    final = Path(path)
    tmp = final.with_name(final.name + ".incomplete")
    write(tmp)
    os.replace(tmp, final)


def _build_config(args: argparse.Namespace) -> PipelineConfig:
    """Start from --config (if given), then apply explicit flag overrides."""
    cfg = PipelineConfig.load(args.config) if args.config else PipelineConfig()
    window = cfg.window
    if args.window is not None:
        window = WindowSpec(args.window[0], args.window[1], window.min_overlap)
    if args.min_overlap is not None:
        window = WindowSpec(window.width, window.height, args.min_overlap)
    merge = cfg.merge
    if args.merge_threshold is not None:
        merge = MergeConfig(args.merge_threshold, merge.overlap_measure)
    detector = cfg.detector
    if args.detector is not None or args.seed is not None or args.drop_rate is not None:
        kind = args.detector if args.detector is not None else detector.kind
        jitter = detector.jitter
        updates = {}
        if args.seed is not None:
            updates["seed"] = args.seed
        if args.drop_rate is not None:
            updates["drop_rate"] = args.drop_rate
        if args.shift_sigma is not None:
            updates["shift_sigma"] = args.shift_sigma
        if updates:
            jitter = dataclasses.replace(jitter, **updates)
        command = tuple(args.external_command) if args.external_command else detector.external_command
        detector = DetectorConfig(
            kind=kind,
            jitter=jitter,
            external_command=command,
            external_timeout=detector.external_timeout,
            external_workers=detector.external_workers,
        )
    return PipelineConfig(
        window=window,
        merge=merge,
        detector=detector,
        iou_threshold=args.iou_threshold if args.iou_threshold is not None else cfg.iou_threshold,
        thresholds=cfg.thresholds,
        methods=cfg.methods,
        workers=args.workers if args.workers is not None else cfg.workers,
    )


def cmd_tile_plan(args: argparse.Namespace) -> int:
    frame = FrameSpec(args.frame[0], args.frame[1])
    window = WindowSpec(
        args.window[0] if args.window else WindowSpec().width,
        args.window[1] if args.window else WindowSpec().height,
        args.min_overlap if args.min_overlap is not None else WindowSpec().min_overlap,
    )
    plan = plan_tiles(frame, window)
    if args.out:
        _atomic_write(args.out, lambda p: save_plan(plan, p))
    else:
        json.dump(plan.to_dict(), sys.stdout, indent=2)
        print()
    print(f"{len(plan.tiles)} tiles for {frame.width}x{frame.height}", file=sys.stderr)
    return 0


def cmd_detect(args: argparse.Namespace) -> int:
    taxonomy = _load_taxonomy(args)
    manifest = load_annotations(args.manifest, taxonomy)
    config = _build_config(args)
    images_root = args.images_root or Path(args.manifest).parent
    try:
        result = run_pipeline(manifest, taxonomy, config, images_root)
    except DetectorError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    _atomic_write(args.out, lambda p: save_annotations(result.detections, p))
    if args.report and result.report is not None:
        _atomic_write(args.report, lambda p: result.report.save_json(p))
    print(f"{result.frame_count} frames in {result.elapsed_s:.2f}s "
          f"({result.fps:.2f} frames/s)")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    taxonomy = _load_taxonomy(args)
    det = load_annotations(args.detections, taxonomy)
    gt = load_annotations(args.truth, taxonomy)
    if len(det.frames) != len(gt.frames):
        print(
            f"error: {len(det.frames)} detection frames vs {len(gt.frames)} truth frames",
            file=sys.stderr,
        )
        return 1
    methods = {name: "pixel" for name in args.pixel_category or []}
    report = evaluate(
        det.frames,
        gt.frames,
        taxonomy,
        iou_threshold=args.iou_threshold
        if args.iou_threshold is not None
        else DEFAULT_IOU_THRESHOLD,
        methods=methods,
    )
    if args.out:
        _atomic_write(args.out, lambda p: report.save_json(p))
    if args.csv:
        _atomic_write(args.csv, lambda p: report.save_csv(p))
    for cat in report.per_category:
        zero = cat.points[0]
        prec = "n/a" if zero.precision is None else f"{zero.precision:.4f}"
        rec = "n/a" if zero.recall is None else f"{zero.recall:.4f}"
        print(f"{cat.name} [{cat.method}]  P={prec} R={rec} (threshold 0)")
    if not args.out and not args.csv:
        json.dump(report.to_dict(), sys.stdout, indent=2)
        print()
    return 0


def cmd_density(args: argparse.Namespace) -> int:
    taxonomy = _load_taxonomy(args)
    manifest = load_annotations(args.detections, taxonomy)
    swath_length = (
        args.swath_length_m
        if args.swath_length_m is not None
        else swath_length_from_motion(args.speed_kmh, args.fps, args.overlap)
    )
    with_pose = [f for f in manifest.frames if f.pose is not None]
    if not with_pose:
        print("error: no frame in the detections file carries a pose", file=sys.stderr)
        return 1
    footprints: dict[tuple[int, int], CameraFootprint] = {}
    located: list[tuple[str, object]] = []
    for f in with_pose:
        fp = footprints.setdefault(
            (f.width, f.height),
            CameraFootprint(
                frame=FrameSpec(f.width, f.height),
                height_m=args.height_m,
                swath_width_m=args.swath_width_m,
                swath_length_m=swath_length,
            ),
        )
        for entry in f.boxes:
            category = taxonomy.get(entry.class_id).report_category
            located.append((category, locate_box(entry.box, f.pose, fp)))
    grid = accumulate_density(located, origin=with_pose[0].pose, cell_size_m=args.cell_size_m)
    _atomic_write(args.out, lambda p: save_geojson(grid, p))
    skipped = len(manifest.frames) - len(with_pose)
    note = f", {skipped} frames without pose skipped" if skipped else ""
    print(f"{len(grid.cells)} occupied cells from {len(with_pose)} frames{note}")
    return 0


def cmd_decimate(args: argparse.Namespace) -> int:
    taxonomy = _load_taxonomy(args)
    manifest = load_annotations(args.manifest, taxonomy)
    out = decimate(manifest, args.target_rate)
    _atomic_write(args.out, lambda p: save_annotations(out, p))
    print(
        f"{len(manifest.frames)} frames at {manifest.capture_rate} fps -> "
        f"{len(out.frames)} frames at {out.capture_rate} fps"
    )
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    taxonomy = _load_taxonomy(args)
    manifest = load_annotations(args.manifest, taxonomy)
    stats = dataset_stats(manifest, taxonomy)
    print(f"frames: {stats.frame_count}")
    print(f"boxes: {stats.box_count}")
    print(
        f"boxes per frame: min {stats.min_boxes_per_frame}, "
        f"max {stats.max_boxes_per_frame}, mean {stats.mean_boxes_per_frame:.2f}"
    )
    print("per class:")
    for class_id in sorted(stats.per_class):
        name = taxonomy.get(class_id).name
        print(f"  {class_id:3d} {name}: {stats.per_class[class_id]}")
    print("per report category:")
    for name in sorted(stats.per_category):
        print(f"  {name}: {stats.per_category[name]}")
    return 0


def cmd_annotate(args: argparse.Namespace) -> int:
    from litterscan.server import serve_annotations

    taxonomy = _load_taxonomy(args)
    serve_annotations(
        args.manifest,
        bind=args.bind,
        taxonomy=taxonomy,
        images_root=args.images_root,
        assets_dir=args.assets,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="litterscan",
        description="Tile, detect, merge, evaluate, and map street-litter detections.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_taxonomy(p: argparse.ArgumentParser) -> None:
        p.add_argument("--taxonomy", help="path to a taxonomy JSON file")

    p = sub.add_parser("tile-plan", help="print or save the tile layout for a frame size")
    p.add_argument("--frame", type=_parse_window, default=(1920, 1480), metavar="WxH")
    p.add_argument("--window", type=_parse_window, metavar="WxH")
    p.add_argument("--min-overlap", type=float)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_tile_plan)

    p = sub.add_parser("detect", help="run the tiling/detection/merge pipeline")
    p.add_argument("manifest")
    p.add_argument("-o", "--out", required=True, help="detections file to write")
    p.add_argument("--report", help="also write an evaluation report (JSON)")
    p.add_argument("--config", help="pipeline config JSON")
    p.add_argument("--workers", type=int)
    p.add_argument("--window", type=_parse_window, metavar="WxH")
    p.add_argument("--min-overlap", type=float)
    p.add_argument("--merge-threshold", type=float)
    p.add_argument("--iou-threshold", type=float)
    p.add_argument("--detector", choices=["replay", "jitter", "external"])
    p.add_argument("--seed", type=int)
    p.add_argument("--drop-rate", type=float)
    p.add_argument("--shift-sigma", type=float)
    p.add_argument("--external-command", nargs="+", metavar="ARG")
    p.add_argument("--images-root", help="directory image paths are relative to")
    add_taxonomy(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("eval", help="score a detections file against ground truth")
    p.add_argument("detections")
    p.add_argument("truth")
    p.add_argument("--iou-threshold", type=float)
    p.add_argument(
        "--pixel-category",
        action="append",
        metavar="NAME",
        help="score this report category by pixel masks instead of boxes",
    )
    p.add_argument("-o", "--out", help="report JSON path")
    p.add_argument("--csv", help="report CSV path")
    add_taxonomy(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("density", help="aggregate detections into a GeoJSON density grid")
    p.add_argument("detections")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--cell-size-m", type=float, default=DEFAULT_CELL_SIZE_M)
    p.add_argument("--height-m", type=float, default=DEFAULT_CAMERA_HEIGHT_M)
    p.add_argument("--swath-width-m", type=float, default=DEFAULT_SWATH_WIDTH_M)
    p.add_argument("--swath-length-m", type=float, help="override the motion-derived value")
    p.add_argument("--speed-kmh", type=float, default=DEFAULT_SPEED_KMH)
    p.add_argument("--fps", type=float, default=DEFAULT_CAPTURE_FPS)
    p.add_argument("--overlap", type=float, default=DEFAULT_FRAME_OVERLAP)
    add_taxonomy(p)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("decimate", help="reduce a manifest to a lower frame rate")
    p.add_argument("manifest")
    p.add_argument("--target-rate", type=float, required=True)
    p.add_argument("-o", "--out", required=True)
    add_taxonomy(p)
    p.set_defaults(func=cmd_decimate)

    p = sub.add_parser("stats", help="summarize an annotation file")
    p.add_argument("manifest")
    add_taxonomy(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("annotate", help="serve the annotation API and browser client")
    p.add_argument("manifest")
    p.add_argument("--bind", default="127.0.0.1:8000", metavar="ADDR:PORT")
    p.add_argument("--images-root")
    p.add_argument("--assets", help="directory with the built browser client")
    add_taxonomy(p)
    p.set_defaults(func=cmd_annotate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
