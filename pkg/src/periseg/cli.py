"""Command-line front-end.

Exit codes: 0 success, 1 usage error, 2 processing error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import evaluation, phantom, rotation, segmentation
from .imagecore import ImageError, load_image, save_image
from .preprocess import pipeline_stages, preprocess_pipeline
from .projection import detect_valleys, smooth_profile, vertical_projection
from .segmentation import render_overlay, segment


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _check_overwrite(path: Path, force: bool) -> None:
    if path.exists() and not force:
        raise FileExistsError(f"{path} exists (use --force to overwrite)")


def _load_cfg(args) -> segmentation.SegmentationConfig:
    values = cfgmod.load_config_file(args.config) if args.config else {}
    return cfgmod.build_segmentation_config(values, mode=getattr(args, "mode", None))


def _build_parser() -> _Parser:
    p = _Parser(prog="periseg", description="Periapical radiograph tooth segmentation")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--config", help="key=value config file")
        sp.add_argument("--force", action="store_true", help="allow overwriting outputs")

    sp = sub.add_parser("preprocess", help="run the enhancement cascade")
    sp.add_argument("input")
    sp.add_argument("output")
    sp.add_argument("--dump-stages", metavar="DIR", help="also write each stage's image")
    add_common(sp)

    sp = sub.add_parser("project", help="emit projection profile and valleys")
    sp.add_argument("input")
    add_common(sp)

    sp = sub.add_parser("rotation", help="emit the rotation estimate as JSON")
    sp.add_argument("input")
    add_common(sp)

    sp = sub.add_parser("segment", help="segment one image")
    sp.add_argument("input")
    sp.add_argument("--mode", choices=[rotation.MODE_LINE_ROTATE, rotation.MODE_IMAGE_ROTATE])
    sp.add_argument("--json-out", help="write the result JSON here as well")
    sp.add_argument("--overlay-out", help="overlay PNG path (default <input>_overlay.png)")
    add_common(sp)

    sp = sub.add_parser("evaluate", help="metrics report from a counting-matrix CSV")
    sp.add_argument("matrix")
    sp.add_argument("--json", action="store_true", help="JSON instead of the text table")

    sp = sub.add_parser("synth", help="generate phantom images")
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--spec", help="JSON file with one spec or a list of specs")
    group.add_argument("--default-batch", action="store_true", help="the shipped 51-phantom batch")
    sp.add_argument("--out-dir", required=True)
    sp.add_argument("--force", action="store_true")

    sp = sub.add_parser("bench", help="segment a phantom manifest and report metrics")
    sp.add_argument("manifest")
    sp.add_argument("--mode", choices=[rotation.MODE_LINE_ROTATE, rotation.MODE_IMAGE_ROTATE])
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--config", help="key=value config file")
    return p


def _cmd_preprocess(args) -> int:
    cfg = _load_cfg(args)
    img = load_image(args.input)
    out_path = Path(args.output)
    _check_overwrite(out_path, args.force)
    if args.dump_stages:
        stage_dir = Path(args.dump_stages)
        stage_dir.mkdir(parents=True, exist_ok=True)
        out = img
        for name, out in pipeline_stages(img, cfg.butterworth, cfg.homomorphic, cfg.smoothing):
            save_image(out, stage_dir / f"stage_{name}.pgm")
    else:
        out = preprocess_pipeline(img, cfg.butterworth, cfg.homomorphic, cfg.smoothing)
    save_image(out, out_path)
    return 0


def _cmd_project(args) -> int:
    cfg = _load_cfg(args)
    img = load_image(args.input)
    pre = preprocess_pipeline(img, cfg.butterworth, cfg.homomorphic, cfg.smoothing)
    profile = smooth_profile(vertical_projection(pre), cfg.profile_window)
    valleys = detect_valleys(profile, cfg.min_separation, cfg.edge_margin)
    sys.stdout.write(profile.to_text())
    print("# valleys:", " ".join(str(x) for x in valleys.positions))
    return 0


def _cmd_rotation(args) -> int:
    cfg = _load_cfg(args)
    img = load_image(args.input)
    pre = preprocess_pipeline(img, cfg.butterworth, cfg.homomorphic, cfg.smoothing)
    rep = rotation.iterate_rotation_report(pre, cfg.trace, cfg.tol, cfg.max_iter)
    est = rotation.estimate_rotation(pre, cfg.trace)
    doc = est.to_json_dict(iterations=rep.iterations)
    print(json.dumps(doc, indent=2))
    return 0


def _cmd_segment(args) -> int:
    cfg = _load_cfg(args)
    img = load_image(args.input)
    res = segment(img, cfg)
    doc = json.dumps(res.to_json_dict(), indent=2)
    print(doc)
    if args.json_out:
        path = Path(args.json_out)
        _check_overwrite(path, args.force)
        path.write_text(doc + "\n")
    if args.overlay_out:
        overlay_path = Path(args.overlay_out)
    else:
        overlay_path = Path(str(Path(args.input).with_suffix("")) + "_overlay.png")
    _check_overwrite(overlay_path, args.force)
    rgb = render_overlay(img, res)
    from PIL import Image

    Image.fromarray(rgb.astype(np.uint8), mode="RGB").save(overlay_path)
    return 0


def _cmd_evaluate(args) -> int:
    m = evaluation.load_csv(args.matrix)
    rep = evaluation.report(m)
    if args.json:
        print(evaluation.report_to_json(rep))
    else:
        sys.stdout.write(rep.to_table())
    return 0


def _cmd_synth(args) -> int:
    if args.default_batch:
        specs = phantom.default_batch_specs()
    else:
        doc = json.loads(Path(args.spec).read_text())
        docs = doc if isinstance(doc, list) else [doc]
        specs = [phantom.PhantomSpec.from_json_dict(d) for d in docs]
    manifest = phantom.batch(specs, args.out_dir, force=args.force)
    print(manifest)
    return 0


def _cmd_bench(args) -> int:
    cfg = _load_cfg(args)
    manifest_path = Path(args.manifest)
    doc = json.loads(manifest_path.read_text())
    pairs = []
    for entry in doc["phantoms"]:
        img = load_image(manifest_path.parent / entry["image"])
        truth = phantom.load_truth(manifest_path.parent / entry["truth"])
        res = segment(img, cfg)
        pairs.append(segmentation.count_correct(res, truth))
    m = evaluation.accumulate(pairs)
    rep = evaluation.report(m)
    if args.json:
        print(evaluation.report_to_json(rep))
    else:
        sys.stdout.write(rep.to_table())
    return 0


_COMMANDS = {
    "preprocess": _cmd_preprocess,
    "project": _cmd_project,
    "rotation": _cmd_rotation,
    "segment": _cmd_segment,
    "evaluate": _cmd_evaluate,
    "synth": _cmd_synth,
    "bench": _cmd_bench,
}


def run(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except (ImageError, evaluation.MatrixError, cfgmod.ConfigError, ValueError,
            OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {args.command}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))
