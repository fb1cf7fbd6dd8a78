"""Command-line interface: ``aqm <subcommand> [options]``.

Defaults can be supplied in a JSON config file, named with ``--config`` or the
``AQM_CONFIG`` environment variable. Its keys are option names with dashes
replaced by underscores. Flags override the config file, which overrides the
built-in defaults.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

from aqm.adapt import MAX_DIMENSION, DisplayGeometry, adapt_fwm, exponent_field, parse_dimensions
from aqm.csf import CsfParams, build_fwm
from aqm.qm import (
    IDENTITY_MODEL,
    InterModelParams,
    adaptive_matrices,
    default_matrices,
    hevc_fitted_model,
)
from aqm.scaling_list import ScalingListError, emit_scaling_list, write_atomic

CONFIG_ENV = "AQM_CONFIG"
DEFAULT_LADDER = (22, 27, 32, 37)
DEFAULT_QP = 30
DEFAULT_DISPLAY = "3840x2160"


class CliError(Exception):
    """Validation or I/O failure reported as ``aqm: error: ...`` with a nonzero exit."""

    def __init__(self, message, code=2):
        super().__init__(message)
        self.code = code


# -- argument types -----------------------------------------------------------


def _dimensions(text):
    try:
        return parse_dimensions(str(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0 or not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text!r}")
    return value


def _qp_list(text):
    if isinstance(text, (list, tuple)):
        items = list(text)
    else:
        items = [tok for tok in str(text).replace(" ", "").split(",") if tok]
    try:
        ladder = [int(tok) for tok in items]
    except ValueError:
        raise argparse.ArgumentTypeError(f"QP ladder must be comma-separated integers, got {text!r}") from None
    if not ladder:
        raise argparse.ArgumentTypeError("QP ladder is empty")
    bad = [qp for qp in ladder if not 0 <= qp <= 51]
    if bad:
        raise argparse.ArgumentTypeError(f"QPs must lie in [0, 51], got {bad}")
    if len(set(ladder)) != len(ladder):
        raise argparse.ArgumentTypeError(f"QP ladder has duplicates: {ladder}")
    return ladder


def _size_list(text):
    try:
        sizes = sorted({int(tok) for tok in str(text).split(",") if tok})
    except ValueError:
        raise argparse.ArgumentTypeError(f"sizes must be comma-separated integers, got {text!r}") from None
    if not sizes or any(s not in (8, 16, 32) for s in sizes):
        raise argparse.ArgumentTypeError(f"sizes must be drawn from 8,16,32, got {text!r}")
    return sizes


# -- shared option groups -----------------------------------------------------


def _csf_options():
    parser = argparse.ArgumentParser(add_help=False)
    group = parser.add_argument_group("CSF model")
    group.add_argument("--dot-pitch", type=_positive_float, default=0.25, help="display dot pitch in mm (default 0.25)")
    group.add_argument("--distance", type=_positive_float, default=512.0, help="viewing distance in mm (default 512)")
    group.add_argument("--symmetry", type=float, default=0.7, help="oblique-effect symmetry parameter s (default 0.7)")
    group.add_argument("--f-max", type=_positive_float, default=8.0, help="lowpass cutoff in cycles/degree (default 8)")
    return parser


def _geometry_options(display_default=None):
    parser = argparse.ArgumentParser(add_help=False)
    group = parser.add_argument_group("display geometry")
    group.add_argument("--display", type=_dimensions, default=display_default, metavar="WxH", help="target display resolution")
    group.add_argument(
        "--max",
        type=_dimensions,
        default=(MAX_DIMENSION, MAX_DIMENSION),
        metavar="WxH",
        help=f"theoretical maximum dimensions (default {MAX_DIMENSION}x{MAX_DIMENSION})",
    )
    return parser


def _inter_options():
    parser = argparse.ArgumentParser(add_help=False)
    group = parser.add_argument_group("inter matrix model")
    group.add_argument(
        "--inter-model",
        choices=("identity", "hevc-fit"),
        default="identity",
        help="affine intra->inter model: identity, or least squares on the HEVC default pair",
    )
    group.add_argument("--inter-slope", type=float, default=None, help="explicit slope (overrides --inter-model)")
    group.add_argument("--inter-intercept", type=float, default=None, help="explicit intercept (overrides --inter-model)")
    return parser


def _output_options(default_format="text", figure=False):
    parser = argparse.ArgumentParser(add_help=False)
    group = parser.add_argument_group("output")
    group.add_argument("--format", choices=("text", "json"), default=default_format)
    group.add_argument("--output", "-o", default=None, help="write to this file instead of stdout")
    if figure:
        group.add_argument("--figure", default=None, help="also render a matplotlib figure to this path")
    return parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help=f"JSON config file (default: ${CONFIG_ENV})")

    parser = argparse.ArgumentParser(
        prog="aqm",
        description="Display-adaptive quantization matrices and a DCT codec harness.",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser(
        "fwm",
        parents=[common, _csf_options(), _geometry_options(), _output_options()],
        help="print the frequency weighting matrix",
    )
    p.add_argument("--size", type=int, default=8, help="matrix dimension N (default 8)")
    p.set_defaults(func=cmd_fwm)

    for name, display_default, helptext in (
        ("qm", None, "print intra and inter quantization matrices"),
        ("aqm", DEFAULT_DISPLAY, "adaptive matrices (qm with --display, default 3840x2160)"),
    ):
        p = sub.add_parser(
            name,
            parents=[common, _csf_options(), _geometry_options(display_default), _inter_options(), _output_options(figure=True)],
            help=helptext,
        )
        p.add_argument("--sizes", type=_size_list, default=[8], help="comma-separated sizes from 8,16,32 (default 8)")
        p.set_defaults(func=cmd_qm)

    p = sub.add_parser(
        "wcurve",
        parents=[common, _output_options(figure=True)],
        help="tabulate display parameter w against normalised hypotenuse p",
    )
    p.add_argument("--samples", type=int, default=100, help="number of evenly spaced p values in (0, 1] (default 100)")
    p.add_argument("--display", type=_dimensions, action="append", default=None, metavar="WxH", help="add a row for this display (repeatable)")
    p.add_argument("--max", type=_dimensions, default=(MAX_DIMENSION, MAX_DIMENSION), metavar="WxH")
    p.set_defaults(func=cmd_wcurve)

    p = sub.add_parser(
        "scaling-list",
        parents=[common, _csf_options(), _geometry_options(), _inter_options(), _output_options()],
        help="emit a layer's scaling-list document",
    )
    p.add_argument("--layer-id", type=int, default=0, help="layer id written into every section (default 0)")
    p.add_argument("--sizes", type=_size_list, default=[8, 16, 32], help="sizes to emit (default 8,16,32)")
    p.set_defaults(func=cmd_scaling_list)

    p = sub.add_parser(
        "simulate",
        parents=[common, _csf_options(), _geometry_options(DEFAULT_DISPLAY), _output_options("json", figure=True)],
        help="code an image with default, adaptive and flat matrices and report quality",
    )
    p.add_argument("input", nargs="?", default=None, help="PGM (P5) or planar YUV 4:2:0 file; omit for a synthetic texture")
    p.add_argument("--yuv-size", type=_dimensions, default=None, metavar="WxH", help="frame size of raw YUV input")
    p.add_argument("--frame", type=int, default=0, help="YUV frame index (default 0)")
    p.add_argument("--synthetic-size", type=int, default=256, help="side of the synthetic texture (default 256)")
    p.add_argument("--seed", type=int, default=0, help="synthetic texture seed (default 0)")
    p.add_argument("--qp-ladder", type=_qp_list, default=list(DEFAULT_LADDER), help="comma-separated QPs (default 22,27,32,37)")
    p.add_argument("--qp", type=int, default=DEFAULT_QP, help="QP of the headline SSIM comparison (default 30)")
    p.add_argument("--block-size", type=int, choices=(8, 16, 32), default=8)
    p.add_argument("--recon-dir", default=None, help="write reconstructions at --qp as PGM files here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser(
        "bdrate",
        parents=[common, _output_options()],
        help="BD-rate of a test RD curve against an anchor",
    )
    p.add_argument("anchor", help="CSV (rate,quality columns) or JSON list of {rate, quality}")
    p.add_argument("test")
    p.set_defaults(func=cmd_bdrate)

    return parser


# -- configuration ------------------------------------------------------------


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            config = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc.strerror}", code=1) from None
    except json.JSONDecodeError as exc:
        raise CliError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(config, dict):
        raise CliError(f"config {path} must hold a JSON object")
    return config


def _apply_config(parser, argv, config):
    """Re-parse ``argv`` with config values installed as subparser defaults."""
    command = next((a for a in argv if not a.startswith("-")), None)
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    sub = subparsers.choices.get(command)
    if sub is None:
        return
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in config.items():
        dest = key.replace("-", "_")
        action = actions.get(dest)
        if action is None or dest in ("help", "config"):
            # keys meant for other subcommands are allowed; unknown ones are not
            known = any(dest in {a.dest for a in p._actions} for p in subparsers.choices.values())
            if not known:
                raise CliError(f"unknown config key {key!r}")
            continue
        if action.type is not None and value is not None:
            try:
                if isinstance(action, argparse._AppendAction) and isinstance(value, list):
                    value = [action.type(str(v)) for v in value]
                elif action.type is _qp_list:
                    value = _qp_list(value)
                else:
                    value = action.type(str(value))
            except argparse.ArgumentTypeError as exc:
                raise CliError(f"config key {key!r}: {exc}") from None
        if action.choices is not None and value not in action.choices:
            raise CliError(f"config key {key!r}: {value!r} not in {sorted(action.choices)}")
        defaults[dest] = value
    sub.set_defaults(**defaults)


# -- helpers ------------------------------------------------------------------


def _csf_params(args, n=8):
    try:
        return CsfParams(
            dot_pitch=args.dot_pitch,
            viewing_distance=args.distance,
            symmetry=args.symmetry,
            f_max=args.f_max,
            n=n,
        )
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _geometry(args):
    if args.display is None:
        return None
    try:
        return DisplayGeometry(*args.display, *args.max)
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _inter_model(args):
    model = hevc_fitted_model() if args.inter_model == "hevc-fit" else IDENTITY_MODEL
    if args.inter_slope is not None or args.inter_intercept is not None:
        model = InterModelParams(
            model.slope if args.inter_slope is None else args.inter_slope,
            model.intercept if args.inter_intercept is None else args.inter_intercept,
        )
    return model


def _geometry_dict(geom):
    if geom is None:
        return None
    return {
        "width": geom.width,
        "height": geom.height,
        "max_width": geom.max_width,
        "max_height": geom.max_height,
        "h_a": geom.h_a,
        "h_t": geom.h_t,
        "p": geom.p,
        "w": geom.w,
    }


def _json_float(x):
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


def _dumps(obj):
    return json.dumps(obj, indent=2) + "\n"


def _emit(args, text):
    if args.output is None:
        sys.stdout.write(text)
        return
    try:
        write_atomic(args.output, text)
    except OSError as exc:
        raise CliError(f"cannot write {args.output}: {exc.strerror}", code=1) from None


def _render(path, draw, *draw_args, **draw_kwargs):
    """Render a figure through a temp file so a failed draw leaves no file."""
    directory = os.path.dirname(os.path.abspath(path))
    suffix = os.path.splitext(path)[1] or ".png"
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".aqm-", suffix=suffix)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}", code=1) from None
    os.close(fd)
    try:
        draw(*draw_args, tmp, **draw_kwargs)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _matrix_text(values, fmt):
    return "\n".join(" ".join(fmt(v) for v in row) for row in values)


# -- subcommands --------------------------------------------------------------


def cmd_fwm(args):
    if args.size < 2:
        raise CliError(f"--size must be >= 2, got {args.size}")
    params = _csf_params(args, n=args.size)
    fwm = build_fwm(params)
    geom = _geometry(args)
    if geom is not None:
        fwm = adapt_fwm(fwm, exponent_field(geom, params.n))
    if args.format == "json":
        doc = {
            "kind": fwm.kind,
            "size": fwm.size,
            "params": {
                "a": params.a,
                "b": params.b,
                "c": params.c,
                "d": params.d,
                "dot_pitch": params.dot_pitch,
                "viewing_distance": params.viewing_distance,
                "symmetry": params.symmetry,
                "f_max": params.f_max,
            },
            "geometry": _geometry_dict(geom),
            "values": fwm.values.tolist(),
        }
        return _dumps(doc)
    return _matrix_text(fwm.values, lambda v: f"{v:.4f}") + "\n"


def _matrices_for(args):
    params = _csf_params(args)
    geom = _geometry(args)
    model = _inter_model(args)
    try:
        if geom is None:
            return geom, model, default_matrices(params, model, sizes=args.sizes)
        return geom, model, adaptive_matrices(geom, params, model, sizes=args.sizes)
    except ValueError as exc:
        raise CliError(str(exc)) from None


def cmd_qm(args):
    geom, model, matrices = _matrices_for(args)
    provenance = "default" if geom is None else "adaptive"
    ordered = [matrices[(s, k)] for s in args.sizes for k in ("intra", "inter")]
    if args.figure:
        label = provenance if geom is None else f"{provenance} {geom.label}"
        eights = [(f"{label} {m.kind} {m.size}x{m.size}", m) for m in ordered if m.size == 8] or [
            (f"{label} {m.kind} {m.size}x{m.size}", m) for m in ordered[:2]
        ]
        from aqm.plotting import plot_matrices

        _render(args.figure, plot_matrices, eights)
    if args.format == "json":
        doc = {
            "provenance": provenance,
            "geometry": _geometry_dict(geom),
            "inter_model": {"slope": model.slope, "intercept": model.intercept},
            "matrices": [
                {"size": m.size, "kind": m.kind, "dc": m.dc, "values": m.values.tolist()} for m in ordered
            ],
        }
        return _dumps(doc)
    blocks = []
    for m in ordered:
        header = f"# {m.size}x{m.size} {m.kind} {provenance}"
        if geom is not None:
            header += f" {geom.label}"
        blocks.append(header + "\n" + _matrix_text(m.values, str))
    return "\n\n".join(blocks) + "\n"


def cmd_wcurve(args):
    if args.samples < 2:
        raise CliError(f"--samples must be >= 2, got {args.samples}")
    max_w, max_h = args.max
    h_t = math.hypot(max_w, max_h)
    rows = [(k / args.samples, "") for k in range(1, args.samples + 1)]
    displays = []
    for width, height in args.display or []:
        try:
            geom = DisplayGeometry(width, height, max_w, max_h)
        except ValueError as exc:
            raise CliError(str(exc)) from None
        displays.append((geom.label, geom.p, geom.w))
        rows.append((geom.p, geom.label))
    rows.sort(key=lambda r: (r[0], r[1]))
    table = [(p, h_t ** (-p), label) for p, label in rows]
    if args.figure:
        from aqm.plotting import plot_wcurve

        sampled = [(p, w) for p, w, label in table if not label]
        _render(
            args.figure,
            plot_wcurve,
            [p for p, _ in sampled],
            [w for _, w in sampled],
            displays=displays,
        )
    if args.format == "json":
        doc = {
            "h_t": h_t,
            "rows": [{"p": p, "w": w, "display": label or None} for p, w, label in table],
        }
        return _dumps(doc)
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n")
    writer.writerow(["p", "w", "display"])
    for p, w, label in table:
        writer.writerow([repr(p), repr(w), label])
    return buf.getvalue()


def cmd_scaling_list(args):
    if args.layer_id < 0:
        raise CliError(f"--layer-id must be >= 0, got {args.layer_id}")
    _, _, matrices = _matrices_for(args)
    try:
        return emit_scaling_list(matrices, args.layer_id, fmt=args.format)
    except ScalingListError as exc:
        raise CliError(str(exc)) from None


def _load_image(args):
    from aqm.simulate import read_pgm, read_yuv420, synthetic_texture

    if args.input is None:
        if args.synthetic_size < 11:
            raise CliError("--synthetic-size must be >= 11")
        return synthetic_texture(args.synthetic_size, args.seed), f"synthetic:{args.synthetic_size}:{args.seed}"
    try:
        if args.yuv_size is not None or args.input.lower().endswith(".yuv"):
            if args.yuv_size is None:
                raise CliError("raw YUV input needs --yuv-size WxH")
            return read_yuv420(args.input, *args.yuv_size, frame=args.frame)[0], args.input
        return read_pgm(args.input), args.input
    except OSError as exc:
        raise CliError(f"cannot read {args.input}: {exc.strerror or exc}", code=1) from None
    except ValueError as exc:
        raise CliError(str(exc), code=1) from None


def run_simulation(img, geometry, params, ladder, headline_qp, block_size=8):
    """Code ``img`` at every ladder QP with default, adaptive and flat matrices.

    Returns a JSON-ready dict plus the reconstructions at ``headline_qp``.
    """
    from aqm.simulate import QuantConfig, bd_rate, code_image, flat_matrix, ssim

    choices = {
        "default": default_matrices(params)[(block_size, "intra")],
        "adaptive": adaptive_matrices(geometry, params)[(block_size, "intra")],
        "flat": flat_matrix(block_size),
    }
    qps = sorted(set(ladder) | {headline_qp})
    curves, recons, rd = {}, {}, {}
    for name, qm in choices.items():
        points = []
        for qp in qps:
            recon, point = code_image(img, QuantConfig(qp, qm))
            entry = {"qp": qp, "rate": point.rate, "psnr": _json_float(point.quality), "ssim": ssim(img, recon)}
            if qp in ladder:
                points.append(entry)
                rd.setdefault(name, []).append(point)
            if qp == headline_qp:
                recons[name] = recon
                headline = entry
        curves[name] = {"points": points, "headline": headline}

    bd = {}
    for name in ("adaptive", "flat"):
        try:
            bd[f"{name}_vs_default"] = bd_rate(rd["default"], rd[name])
        except ValueError as exc:
            bd[f"{name}_vs_default"] = None
            bd[f"{name}_vs_default_error"] = str(exc)

    head = {name: curves[name]["headline"] for name in choices}
    report = {
        "image": {"width": img.width, "height": img.height},
        "geometry": _geometry_dict(geometry),
        "block_size": block_size,
        "qp_ladder": list(ladder),
        "headline_qp": headline_qp,
        "matrices": {
            name: {"provenance": qm.provenance, "values": qm.values.tolist()} for name, qm in choices.items()
        },
        "headline": {
            name: {"psnr": h["psnr"], "ssim": h["ssim"], "rate": h["rate"], "qp": headline_qp}
            for name, h in head.items()
        },
        "curves": {name: curves[name]["points"] for name in choices},
        "bd_rate_percent": bd,
    }
    return report, recons


def cmd_simulate(args):
    img, source = _load_image(args)
    if min(img.width, img.height) < 11:
        raise CliError(f"image {img.width}x{img.height} is too small for SSIM (min 11)")
    if not 0 <= args.qp <= 51:
        raise CliError(f"--qp must lie in [0, 51], got {args.qp}")
    if len(args.qp_ladder) < 4:
        raise CliError("BD-rate needs a QP ladder of at least 4 points")
    geometry = _geometry(args)
    if geometry is None:
        raise CliError("simulate needs a target --display")
    params = _csf_params(args)
    report, recons = run_simulation(img, geometry, params, args.qp_ladder, args.qp, args.block_size)
    report = {"source": source, **report}

    if args.recon_dir:
        from aqm.simulate import write_pgm

        os.makedirs(args.recon_dir, exist_ok=True)
        for name, recon in recons.items():
            write_pgm(os.path.join(args.recon_dir, f"recon_{name}_qp{args.qp}.pgm"), recon)
    if args.figure:
        from aqm.plotting import plot_rd_curves

        curves = {name: [pt for pt in pts if pt["psnr"] != "inf"] for name, pts in report["curves"].items()}
        _render(args.figure, plot_rd_curves, curves, title=f"{source} ({geometry.label} adaptive)")

    if args.format == "json":
        return _dumps(report)
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n")
    writer.writerow(["matrix", "qp", "rate", "psnr", "ssim"])
    for name, points in report["curves"].items():
        for pt in points:
            writer.writerow([name, pt["qp"], pt["rate"], repr(pt["psnr"]), repr(pt["ssim"])])
    for key, value in report["bd_rate_percent"].items():
        if not key.endswith("_error"):
            buf.write(f"# bd_rate {key} {value!r}\n")
    for name, h in report["headline"].items():
        buf.write(f"# headline qp={h['qp']} {name} ssim={h['ssim']!r} psnr={h['psnr']!r}\n")
    return buf.getvalue()


def read_rd_points(path):
    """RD points from a CSV with ``rate`` and ``quality`` (or ``psnr``) columns, or JSON."""
    from aqm.simulate import RdPoint

    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", code=1) from None
    try:
        if text.lstrip().startswith(("[", "{")):
            rows = json.loads(text)
            if isinstance(rows, dict):
                rows = rows["points"]
        else:
            rows = list(csv.DictReader(io.StringIO(text)))
        return [
            RdPoint(rate=float(r["rate"]), quality=float(r["quality"] if "quality" in r else r["psnr"]))
            for r in rows
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"{path}: malformed RD points ({exc})") from None


def cmd_bdrate(args):
    from aqm.simulate import bd_rate

    anchor = read_rd_points(args.anchor)
    test = read_rd_points(args.test)
    try:
        value = bd_rate(anchor, test)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    if args.format == "json":
        return _dumps({"anchor": args.anchor, "test": args.test, "bd_rate_percent": value})
    return f"{value!r}\n"


# -- entry point --------------------------------------------------------------


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        pre = argparse.ArgumentParser(add_help=False)
        pre.add_argument("--config", default=None)
        known, _ = pre.parse_known_args(argv)
        config_path = known.config or os.environ.get(CONFIG_ENV)
        if config_path:
            _apply_config(parser, argv, _load_config(config_path))
        args = parser.parse_args(argv)
        text = args.func(args)
        _emit(args, text)
    except CliError as exc:
        print(f"aqm: error: {exc}", file=sys.stderr)
        return exc.code
    return 0


if __name__ == "__main__":
    sys.exit(main())
