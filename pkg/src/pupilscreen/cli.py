"""Command-line frontend.

Exit codes: 0 success, 1 usage error, 2 data error (bad file or manifest),
3 evaluation error (e.g. only one class present). Errors go to stderr as a
single JSON object so batch scripts can parse failures.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .ellipse import fit_ellipse
from .errors import OneClassOnly, PupilScreenError
from .evaluation import (
    SynthSpec,
    evaluate_manifest,
    generate_synth_corpus,
    score_histogram,
    sweep_d,
)
from .maskio import read_gray, read_mask, write_mask
from .pipeline import (
    PipelineConfig,
    SEGMENTER_CLASSICAL,
    SEGMENTER_EXTERNAL,
    read_manifest,
    score_face,
)
from .raster import fill_holes, largest_component, outer_boundary, segment_pupil_classical

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_EVALUATION = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors are exit 1 here
        raise UsageError(message)


def _dump(obj) -> str:
    return json.dumps(obj, indent=None, separators=(", ", ": "))


def _emit_error(kind: str, detail: str) -> None:
    print(_dump({"error": kind, "detail": detail}), file=sys.stderr)


def _write_json(path: Path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(str(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _add_config_flags(parser: argparse.ArgumentParser, segmenter_default=SEGMENTER_EXTERNAL):
    parser.add_argument("--d", type=int, default=4, help="boundary band distance in pixels")
    parser.add_argument("--threshold", type=float, default=0.85,
                        help="aggregate BIoU at or above which the verdict is real")
    parser.add_argument("--segmenter", choices=[SEGMENTER_EXTERNAL, SEGMENTER_CLASSICAL],
                        default=segmenter_default,
                        help="treat inputs as ready-made masks or as eye crops to segment")
    parser.add_argument("--min-area", type=int, default=25, dest="min_area",
                        help="minimum pupil area in pixels")
    parser.add_argument("--percentile", type=float, default=8.0,
                        help="dark-intensity percentile for the classical segmenter")
    parser.add_argument("--require-both-eyes", action="store_true",
                        help="aggregate only when both eyes are measurable")


def _config_from_args(args) -> PipelineConfig:
    try:
        return PipelineConfig(
            d=args.d,
            threshold=args.threshold,
            segmenter=args.segmenter,
            min_pupil_area=args.min_area,
            dark_percentile=args.percentile,
            require_both_eyes=args.require_both_eyes,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def build_parser() -> _Parser:
    parser = _Parser(prog="pupilscreen",
                     description="Score pupil shape regularity to flag GAN-generated faces")
    parser.add_argument("--version", action="version", version=f"pupilscreen {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_segment = sub.add_parser("segment", help="run the classical pupil segmenter on one eye crop")
    p_segment.add_argument("--eye", required=True, help="input eye crop (PGM/PNG)")
    p_segment.add_argument("--out", required=True, help="output pupil mask (PGM)")
    p_segment.add_argument("--percentile", type=float, default=8.0)
    p_segment.add_argument("--min-area", type=int, default=25, dest="min_area")

    p_fit = sub.add_parser("fit", help="fit an ellipse to one pupil mask")
    p_fit.add_argument("--mask", required=True, help="input pupil mask (PGM/PNG)")
    p_fit.add_argument("--json", required=True, dest="json_out", help="output fit report path")

    p_score = sub.add_parser("score", help="score one face from its two eye inputs")
    p_score.add_argument("--left", default=None, help="left eye input (omit if missing)")
    p_score.add_argument("--right", default=None, help="right eye input (omit if missing)")
    p_score.add_argument("--face-id", default="", dest="face_id")
    _add_config_flags(p_score)

    p_eval = sub.add_parser("evaluate", help="score a manifest and emit ROC/AUC reports")
    p_eval.add_argument("--manifest", required=True)
    p_eval.add_argument("--outdir", required=True)
    p_eval.add_argument("--bins", type=int, default=20, help="histogram bin count")
    _add_config_flags(p_eval)

    p_sweep = sub.add_parser("sweep-d", help="AUC as a function of the band distance")
    p_sweep.add_argument("--manifest", required=True)
    p_sweep.add_argument("--outdir", required=True)
    p_sweep.add_argument("--d", required=True, dest="d_list",
                         help="comma-separated band distances, e.g. 1,2,4,8")
    p_sweep.add_argument("--threshold", type=float, default=0.85)
    p_sweep.add_argument("--segmenter", choices=[SEGMENTER_EXTERNAL, SEGMENTER_CLASSICAL],
                         default=SEGMENTER_EXTERNAL)
    p_sweep.add_argument("--min-area", type=int, default=25, dest="min_area")
    p_sweep.add_argument("--percentile", type=float, default=8.0)
    p_sweep.add_argument("--require-both-eyes", action="store_true")

    p_synth = sub.add_parser("synth", help="generate the seeded synthetic mask corpus")
    p_synth.add_argument("--spec", default=None,
                         help="JSON spec file; omitted keys fall back to defaults")
    p_synth.add_argument("--outdir", required=True)

    p_serve = sub.add_parser("serve", help="run the HTTP scoring service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)

    return parser


def _cmd_segment(args) -> int:
    eye = read_gray(args.eye)
    mask = segment_pupil_classical(eye, dark_percentile=args.percentile, min_area=args.min_area)
    write_mask(args.out, mask)
    print(_dump({
        "command": "segment",
        "config": {"dark_percentile": args.percentile, "min_pupil_area": args.min_area},
        "eye": args.eye,
        "out": args.out,
        "area_px": int(mask.sum()),
    }))
    return EXIT_OK


def _cmd_fit(args) -> int:
    mask = read_mask(args.mask)
    processed = fill_holes(largest_component(mask))
    report = fit_ellipse(outer_boundary(processed))
    _write_json(Path(args.json_out), report.to_json_dict())
    print(_dump({"command": "fit", "mask": args.mask, "json": args.json_out,
                 "rms": report.rms_algebraic_distance, "n_points": report.n_points}))
    return EXIT_OK


def _cmd_score(args) -> int:
    if args.left is None and args.right is None:
        raise UsageError("score needs at least one of --left/--right")
    config = _config_from_args(args)
    reader = read_gray if config.segmenter == SEGMENTER_CLASSICAL else read_mask
    left = reader(args.left) if args.left else None
    right = reader(args.right) if args.right else None
    face = score_face(left, right, config, face_id=args.face_id)
    payload = face.to_json_dict()
    payload["config"] = config.to_json_dict()
    print(_dump(payload))
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    if args.bins < 2:
        raise UsageError(f"--bins must be >= 2, got {args.bins}")
    config = _config_from_args(args)
    entries = read_manifest(args.manifest)
    result = evaluate_manifest(entries, config)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    with open(outdir / "scores.jsonl", "w", encoding="utf-8") as fh:
        for face in result.faces:
            fh.write(_dump(face.to_json_dict()) + "\n")
    _write_csv(
        outdir / "roc.csv",
        ("fpr", "tpr", "threshold"),
        [(repr(fpr), repr(tpr), repr(t))
         for (fpr, tpr), t in zip(result.curve.points, result.curve.thresholds)],
    )
    _write_csv(
        outdir / "hist.csv",
        ("bin_lo", "bin_hi", "real_frac", "gan_frac"),
        [tuple(repr(v) for v in row) for row in score_histogram(result.scores, bins=args.bins)],
    )
    _write_json(outdir / "metrics.json", {
        "auc": result.curve.auc,
        "n_real": result.n_real,
        "n_gan": result.n_gan,
        "d": config.d,
        "threshold": config.threshold,
    })
    _write_json(outdir / "config.json", config.to_json_dict())
    print(_dump({"command": "evaluate", "config": config.to_json_dict(),
                 "outdir": str(outdir), "auc": result.curve.auc,
                 "n_real": result.n_real, "n_gan": result.n_gan}))
    return EXIT_OK


def _parse_d_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise UsageError(f"bad --d list {text!r}: {exc}") from exc
    if not values or any(v < 1 for v in values):
        raise UsageError(f"--d needs comma-separated integers >= 1, got {text!r}")
    return values


def _cmd_sweep(args) -> int:
    d_values = _parse_d_list(args.d_list)
    try:
        # band distance comes from the sweep list; the config's own d is unused
        config = PipelineConfig(
            d=d_values[0],
            threshold=args.threshold,
            segmenter=args.segmenter,
            min_pupil_area=args.min_area,
            dark_percentile=args.percentile,
            require_both_eyes=args.require_both_eyes,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    entries = read_manifest(args.manifest)
    pairs = sweep_d(entries, d_values, config)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    _write_csv(outdir / "sweep.csv", ("d", "auc"), [(d, repr(auc)) for d, auc in pairs])
    _write_json(outdir / "config.json", {**config.to_json_dict(), "d_values": d_values})
    print(_dump({"command": "sweep-d", "config": config.to_json_dict(),
                 "d_values": d_values, "outdir": str(outdir)}))
    return EXIT_OK


def _cmd_synth(args) -> int:
    if args.spec is None:
        spec = SynthSpec()
    else:
        try:
            data = json.loads(Path(args.spec).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise PupilScreenError(f"spec file is not valid JSON: {exc}") from exc
        spec = SynthSpec.from_json_dict(data)
    manifest = generate_synth_corpus(spec, args.outdir)
    print(_dump({"command": "synth", "config": spec.to_json_dict(),
                 "manifest": str(manifest)}))
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


_HANDLERS = {
    "segment": _cmd_segment,
    "fit": _cmd_fit,
    "score": _cmd_score,
    "evaluate": _cmd_evaluate,
    "sweep-d": _cmd_sweep,
    "synth": _cmd_synth,
    "serve": _cmd_serve,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _HANDLERS[args.command](args)
    except UsageError as exc:
        _emit_error("UsageError", str(exc))
        return EXIT_USAGE
    except OneClassOnly as exc:
        _emit_error("OneClassOnly", str(exc))
        return EXIT_EVALUATION
    except PupilScreenError as exc:
        _emit_error(type(exc).__name__, str(exc))
        return EXIT_DATA
    except OSError as exc:
        _emit_error("IOError", str(exc))
        return EXIT_DATA


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
