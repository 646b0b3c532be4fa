"""Command-line front end.

    jndmark embed COVER WATERMARK --q 2467 --beta 0.007 -o marked.png
    jndmark extract marked.png --q 2467 --wm-size 12x12 -o recovered.pbm [--reference wm.pbm]
    jndmark attack marked.png jpeg:q=45 -o attacked.png
    jndmark sweep COVER WATERMARK --betas 0.001,0.002 -o curve.csv
    jndmark evaluate original.png modified.png

Every command that writes files also writes a JSON run manifest (by default
next to its main output) recording inputs, the fully resolved configuration,
outputs and headline metrics. Exit status: 0 success, 2 invalid input or
usage, 3 file I/O failure, 4 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__, attacks, metrics
from .errors import EmptySweep, InvalidDetectorParameters, IOFailure, MissingSize, UnwritableDestination, ValidationError
from .features import CssParams, DetectorChoice
from .imaging import load_image, load_watermark, save_image, save_watermark
from .mask import ADDITIVE, LUMINANCE_MODES, dump_mask_rows, mask_image
from .watermark import EmbedConfig, embed_detailed, extract

log = logging.getLogger("jndmark")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_INTERNAL = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None
    return values


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}") from None


def parse_size(text: str) -> tuple[int, int]:
    """``"WxH"`` -> ``(width, height)``."""
    w, sep, h = text.lower().partition("x")
    try:
        width, height = int(w), int(h)
    except ValueError:
        raise MissingSize(f"watermark size must look like WxH, got {text!r}") from None
    if not sep or width < 1 or height < 1:
        raise MissingSize(f"watermark size must be at least 1x1, got {text!r}")
    return width, height


def _detector(args) -> DetectorChoice:
    params = {}
    for item in args.detector_param or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise InvalidDetectorParameters(f"--detector-param expects key=value, got {item!r}")
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise InvalidDetectorParameters(f"--detector-param {key} needs a number, got {value!r}") from None
    return DetectorChoice(args.detector, params)


def _config(args, beta: float | None = None) -> EmbedConfig:
    return EmbedConfig(
        beta=args.beta if beta is None else beta,
        prime_q=args.q,
        luminance_mode=getattr(args, "mode", ADDITIVE),
        threshold=getattr(args, "threshold", 0.0),
        detector=_detector(args) if hasattr(args, "detector") else DetectorChoice(),
        css=CssParams(),
    )


def _json_value(x):
    if isinstance(x, float) and not np.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    if isinstance(x, dict):
        return {k: _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    return x


def _write_text(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise UnwritableDestination(f"cannot write {path}: {exc.strerror or exc}") from exc


def write_manifest(path, command: str, inputs: dict, config: dict, outputs: dict, results: dict) -> None:
    manifest = {
        "command": command,
        "version": __version__,
        "inputs": {k: str(v) for k, v in inputs.items()},
        "config": config,
        "outputs": {k: str(v) for k, v in outputs.items()},
        "metrics": results,
    }
    text = json.dumps(_json_value(manifest), indent=2, sort_keys=True) + "\n"
    _write_text(Path(path), text)


def _manifest_path(args, main_output: Path) -> Path:
    return Path(args.manifest) if args.manifest else main_output.with_name(main_output.name + ".manifest.json")


def cmd_embed(args) -> int:
    cfg = _config(args)
    cover = load_image(args.cover)
    wm = load_watermark(args.watermark)
    out = Path(args.output)
    result = embed_detailed(cover, wm, cfg)
    save_image(result.image, out)
    outputs = {"image": out}
    if args.mask_dump:
        prefix = Path(args.mask_dump)
        rows = args.mask_rows if args.mask_rows is not None else list(range(result.mask.normalized.shape[0]))
        save_image(mask_image(result.mask), prefix.with_name(prefix.name + ".png"))
        dump_mask_rows(result.mask, rows, prefix.with_name(prefix.name + ".csv"))
        outputs["mask_image"] = prefix.with_name(prefix.name + ".png")
        outputs["mask_csv"] = prefix.with_name(prefix.name + ".csv")
    report = metrics.quality_report(cover, result.image).to_dict()
    write_manifest(
        _manifest_path(args, out),
        "embed",
        {"cover": args.cover, "watermark": args.watermark},
        {**cfg.to_dict(), "watermark_size": [int(wm.shape[1]), int(wm.shape[0])]},
        outputs,
        report,
    )
    print(json.dumps(_json_value(report), sort_keys=True))
    return EXIT_OK


def cmd_extract(args) -> int:
    if not args.wm_size:
        raise MissingSize("--wm-size WxH is required")
    size = parse_size(args.wm_size)
    cfg = EmbedConfig(beta=0.0, prime_q=args.q, threshold=args.threshold)
    img = load_image(args.image)
    reference = load_watermark(args.reference) if args.reference else None
    report = extract(img, size, cfg, reference=reference)
    out = Path(args.output)
    save_watermark(report.recovered, out)
    report_path = Path(args.report) if args.report else out.with_suffix(".json")
    body = report.to_dict()
    _write_text(report_path, json.dumps(_json_value(body), indent=2, sort_keys=True) + "\n")
    inputs = {"image": args.image}
    if args.reference:
        inputs["reference"] = args.reference
    config = {"prime_q": cfg.prime_q, "threshold": cfg.threshold, "wm_size": list(size), "mid_band_zigzag": [6, 27]}
    write_manifest(_manifest_path(args, out), "extract", inputs, config, {"recovered": out, "report": report_path}, {"ber": report.ber})
    print(json.dumps({"ber": report.ber}))
    return EXIT_OK


def cmd_attack(args) -> int:
    spec, seed = attacks.parse_attack(args.spec)
    if args.seed is not None:
        seed = args.seed
    img = load_image(args.image)
    result = attacks.apply_attack(img, spec, seed)
    out = Path(args.output)
    save_image(result.attacked, out)
    config = {"attack": spec.to_dict(), "seed": result.seed}
    report = metrics.quality_report(img, result.attacked).to_dict()
    write_manifest(_manifest_path(args, out), "attack", {"image": args.image}, config, {"image": out}, report)
    return EXIT_OK


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, (int, str)) else ("inf" if np.isinf(v) else f"{v:.6f}") for v in row])
    return buf.getvalue()


def cmd_sweep(args) -> int:
    if (args.betas is None) == (args.jpeg_qs is None):
        raise ValidationError("give exactly one of --betas or --jpeg-qs")
    values = args.betas if args.betas is not None else args.jpeg_qs
    if not values:
        raise EmptySweep("the sweep list is empty")
    cover = load_image(args.cover)
    wm = load_watermark(args.watermark)
    size = (wm.shape[1], wm.shape[0])
    base = _config(args)
    # the mask depends only on the cover, so it is computed once
    first = embed_detailed(cover, wm, base)
    mask = first.mask
    rows = []
    if args.betas is not None:
        header = ["beta", "psnr_db", "wpsnr_db", "clean_ber"]
        for beta in values:
            cfg = _config(args, beta)
            marked = embed_detailed(cover, wm, cfg, mask).image
            rows.append([
                float(beta),
                metrics.psnr(cover, marked),
                metrics.wpsnr(cover, marked),
                extract(marked, size, cfg, reference=wm).ber,
            ])
    else:
        header = ["quality", "ber"]
        for q in values:
            attacked = attacks.jpeg_attack(first.image, q).attacked
            rows.append([int(q), extract(attacked, size, base, reference=wm).ber])
    out = Path(args.output)
    _write_text(out, _csv_text(header, rows))
    config = {**base.to_dict(), "betas": args.betas, "jpeg_qs": args.jpeg_qs}
    write_manifest(
        _manifest_path(args, out),
        "sweep",
        {"cover": args.cover, "watermark": args.watermark},
        config,
        {"csv": out},
        {"rows": len(rows)},
    )
    return EXIT_OK


def cmd_evaluate(args) -> int:
    a = load_image(args.original)
    b = load_image(args.modified)
    report = metrics.quality_report(a, b).to_dict()
    print(json.dumps(_json_value(report), sort_keys=True))
    if args.manifest:
        write_manifest(args.manifest, "evaluate", {"original": args.original, "modified": args.modified}, {}, {}, report)
    return EXIT_OK


def _add_embed_options(p) -> None:
    p.add_argument("cover")
    p.add_argument("watermark")
    p.add_argument("--q", type=int, default=2467, help="d-sequence prime key (default 2467)")
    p.add_argument("--beta", type=float, default=0.007, help="embedding strength (default 0.007)")
    p.add_argument("--mode", choices=LUMINANCE_MODES, default=ADDITIVE, help="luminance handling in the mask")
    p.add_argument("--detector", choices=("phase-congruency", "gradient-hysteresis"), default="phase-congruency")
    p.add_argument("--detector-param", action="append", metavar="KEY=VALUE", help="override an edge detector parameter")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="jndmark", description="JND-masked DCT watermarking of grayscale images")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("embed", help="watermark a cover image")
    _add_embed_options(p)
    p.add_argument("-o", "--output", required=True, help="watermarked image (.png or .pgm)")
    p.add_argument("--mask-dump", metavar="PREFIX", help="also write PREFIX.png and PREFIX.csv with the normalised mask")
    p.add_argument("--mask-rows", type=_int_list, help="block rows for the mask CSV (default: all)")
    p.add_argument("--manifest", help="manifest path (default: OUTPUT.manifest.json)")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", help="blindly recover a watermark")
    p.add_argument("image")
    p.add_argument("--q", type=int, default=2467)
    p.add_argument("--wm-size", metavar="WxH", help="watermark width x height in bits")
    p.add_argument("--threshold", type=float, default=0.0, help="decision level T (default 0)")
    p.add_argument("--reference", help="original watermark, to report the bit error rate")
    p.add_argument("-o", "--output", required=True, help="recovered watermark (.pbm)")
    p.add_argument("--report", help="JSON correlation report (default: OUTPUT with .json suffix)")
    p.add_argument("--manifest")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("attack", help="apply one attack, e.g. jpeg:q=45 or gauss:var=2%%:seed=1")
    p.add_argument("image")
    p.add_argument("spec")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--seed", type=int, help="overrides a seed given in the spec")
    p.add_argument("--manifest")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("sweep", help="CSV curves over beta or JPEG quality")
    _add_embed_options(p)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--betas", type=_float_list, help="comma-separated strengths")
    group.add_argument("--jpeg-qs", type=_int_list, help="comma-separated JPEG qualities (embeds at --beta)")
    p.add_argument("-o", "--output", required=True, help="CSV file")
    p.add_argument("--manifest")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("evaluate", help="print PSNR/WPSNR of MODIFIED against ORIGINAL as JSON")
    p.add_argument("original")
    p.add_argument("modified")
    p.add_argument("--manifest", help="also write a run manifest here")
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"jndmark {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IOFailure as exc:
        print(f"jndmark {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to the internal-error status
        log.debug("internal error", exc_info=True)
        print(f"jndmark {args.command}: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
