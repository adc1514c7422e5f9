"""``specseg`` command line: spectrum, block-annot, biou, gradcheck, flops.

Option precedence is flags over ``--config`` file (``key = value`` lines)
over built-in defaults.  Exit codes: 0 success, 2 usage error, 3 invalid
input, 4 numerical envelope exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import boundary, fourier, formats, segmap, spectral_ce, spectral_grad, truncation
from .errors import DimensionError, EnvelopeError, FormatError, SpecsegError
from .iou import mean_iou
from .svg import line_plot

logger = logging.getLogger("specseg")

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_ENVELOPE = 0, 2, 3, 4


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- helpers

def _float_list(text):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).replace(",", " ").split()]


def _int_list(text):
    return [int(round(v)) for v in _float_list(text)]


def _bool(text):
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _num(v: float) -> str:
    return repr(float(v))


def _write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_num(v) if isinstance(v, (float, np.floating)) else v for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8", newline="")


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _load_config(path) -> dict:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


# option name -> (converter, default), per command
COMMON = {
    "classes": (int, None),
    "nu": (_int_list, None),
    "seed": (int, 0),
    "plot": (_bool, False),
    "out": (str, "specseg_out"),
}

COMMANDS = {
    "spectrum": {
        "input": (str, None),
        "logits": (str, None),
        "alpha": (float, 2.0),
        "size": (int, 64),
        "smoothness": (int, 4),
        "binning": (str, "chebyshev"),
        "jobs": (int, 1),
    },
    "block-annot": {
        "input": (str, None),
        "alpha": (float, 2.0),
        "size": (int, 64),
        "smoothness": (int, 4),
        "method": (str, "vote"),
        "jobs": (int, 1),
    },
    "biou": {
        "t0": (float, -4.0),
        "t1": (float, 4.0),
        "tb0": (float, None),
        "tb1": (float, None),
        "sigma": (float, None),
        "d": (float, 2.0),
        "nu": (_float_list, None),
    },
    "gradcheck": {
        "n": (int, 16),
        "kernel_scale": (float, 0.01),
        "h": (float, 1e-6),
    },
    "flops": {
        "spec": (str, None),
        "sizes": (_int_list, None),
        "prune": (float, 0.0),
        "miou": (str, None),
    },
}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="file of 'key = value' lines")
    p.add_argument("--classes", help="number of classes C")
    p.add_argument("--nu", help="comma-separated band limits")
    p.add_argument("--seed", help="random seed")
    p.add_argument("--plot", action="store_const", const="true", help="also write SVG plots")
    p.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="specseg", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="CE decomposition and R(nu) of a label map")
    _add_common(p)
    p.add_argument("--input", nargs="+", help="PGM label map(s); synthetic map if omitted")
    p.add_argument("--logits", help="SPSG logits tensor (single input only)")
    p.add_argument("--alpha", help="synthetic logit scale alpha * one_hot")
    p.add_argument("--size", help="side of the synthetic map")
    p.add_argument("--smoothness", help="band limit of the synthetic map noise")
    p.add_argument("--binning", choices=["chebyshev", "euclidean"])
    p.add_argument("--jobs", help="worker threads for multiple inputs")

    p = sub.add_parser("block-annot", help="block-wise annotations and their IoU / R")
    _add_common(p)
    p.add_argument("--input", nargs="+", help="PGM label map(s); synthetic map if omitted")
    p.add_argument("--alpha")
    p.add_argument("--size")
    p.add_argument("--smoothness")
    p.add_argument("--method", choices=["vote", "lowpass"])
    p.add_argument("--jobs")

    p = sub.add_parser("biou", help="1-D Gaussian boundary IoU versus band limit")
    _add_common(p)
    p.add_argument("--t0", help="segment S start")
    p.add_argument("--t1", help="segment S end")
    p.add_argument("--tb0", help="segment B start (default: t0)")
    p.add_argument("--tb1", help="segment B end (default: t1)")
    p.add_argument("--sigma", help="Gaussian width (default: d/2)")
    p.add_argument("--d", help="boundary width")

    p = sub.add_parser("gradcheck", help="finite-difference spectral Jacobians")
    _add_common(p)
    p.add_argument("--n", help="signal length N")
    p.add_argument("--kernel-scale", dest="kernel_scale")
    p.add_argument("--fd-step", dest="h", help="finite-difference step")

    p = sub.add_parser("flops", help="FLOPs, relative drop and FPI for feature sizes")
    _add_common(p)
    p.add_argument("--spec", help="network cost spec file")
    p.add_argument("--sizes", help="comma-separated decoder feature sides")
    p.add_argument("--prune", help="encoder channel pruning rate")
    p.add_argument("--miou", help="size:miou pairs, e.g. 129:0.651,33:0.633")
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge defaults, config file and flags into typed settings."""
    table = dict(COMMON)
    table.update(COMMANDS[args.command])
    cfg_file = _load_config(args.config) if getattr(args, "config", None) else {}
    unknown = set(cfg_file) - set(table)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    settings = {}
    for key, (conv, default) in table.items():
        raw = getattr(args, key, None)
        if raw is None:
            raw = cfg_file.get(key)
        if raw is None:
            settings[key] = default
            continue
        if key == "input" and isinstance(raw, str):
            raw = raw.split()
        try:
            settings[key] = [conv(v) for v in raw] if isinstance(raw, list) and conv is str else conv(raw)
        except ValueError as exc:
            raise UsageError(f"bad value for {key}: {raw!r}") from exc
    if settings["nu"] is not None and any(v < 0 for v in settings["nu"]):
        raise UsageError("band limits must be non-negative")
    settings["command"] = args.command
    return settings


def _out_dir(settings) -> Path:
    out = Path(settings["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _input_maps(settings):
    """Yield ``(stem, LabelMap)``; a seeded synthetic map when no input is given."""
    if settings["input"]:
        for path in settings["input"]:
            yield Path(path).stem, formats.load_pgm(path, settings["classes"])
    else:
        rng = np.random.default_rng(settings["seed"])
        c = settings["classes"] or 4
        size = settings["size"]
        yield "synthetic", segmap.random_blob_map((size, size), c, rng, settings["smoothness"])


def _fan_out(fn, items, jobs):
    items = list(items)
    if jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


# ---------------------------------------------------------------- spectrum

def _radial_mean(values: np.ndarray, radius: np.ndarray, nbins: int) -> np.ndarray:
    sums = np.bincount(radius.ravel(), weights=values.ravel(), minlength=nbins)
    counts = np.bincount(radius.ravel(), minlength=nbins)
    return sums[:nbins] / np.maximum(counts[:nbins], 1)


def spectrum_table(label_map: segmap.LabelMap, logits: np.ndarray, binning: str = "chebyshev"):
    """Rows ``(nu, |b|, |y_hat|, L_ce, R)`` for ``nu = 0..Nyquist`` and a summary."""
    annot = segmap.one_hot(label_map)
    dec = spectral_ce.ce_decompose(logits, annot, binning=binning)
    axes = tuple(range(1, annot.ndim))
    b = np.abs(fourier.dft(annot, axes=axes)).mean(axis=0)
    y = fourier.dft(logits, axes=axes)
    yp = fourier.dft(segmap.log_partition(logits))
    y_hat = np.abs(yp[None] - y).mean(axis=0)
    nyq = dec.nyquist
    radius = dec.radius if binning == "chebyshev" else fourier.euclidean_radius(dec.components.shape)
    b_r = _radial_mean(b, radius, nyq + 1)
    y_r = _radial_mean(y_hat, radius, nyq + 1)
    b_r = b_r / b_r.max() if b_r.max() > 0 else b_r
    y_r = y_r / y_r.max() if y_r.max() > 0 else y_r
    profile = np.zeros(nyq + 1)
    n = min(nyq + 1, dec.radial_profile.size)
    profile[:n] = dec.radial_profile[:n]
    rows = []
    for nu in range(nyq + 1):
        rows.append((nu, float(b_r[nu]), float(y_r[nu]), float(profile[nu]),
                     spectral_ce.discrepancy_R(dec, nu)))
    summary = {
        "ce_spatial": spectral_ce.ce_spatial(logits, annot),
        "ce_spectral_total": dec.total,
        "imag_residue": dec.imag_residue,
        "nyquist": nyq,
        "shape": list(label_map.shape),
        "num_classes": label_map.num_classes,
        "binning": binning,
    }
    return rows, summary


def cmd_spectrum(settings) -> int:
    out = _out_dir(settings)
    maps = list(_input_maps(settings))
    if settings["logits"] and len(maps) != 1:
        raise UsageError("--logits needs exactly one --input")

    def run(item):
        stem, label_map = item
        if settings["logits"]:
            logits = formats.load_tensor(settings["logits"])
            if label_map.labels.ndim == 2 and logits.shape[1:] != label_map.shape:
                raise DimensionError("logits and label map sizes differ")
            if logits.shape[0] != label_map.num_classes:
                label_map = segmap.LabelMap(label_map.labels, logits.shape[0])
        else:
            logits = settings["alpha"] * segmap.one_hot(label_map)
        rows, summary = spectrum_table(label_map, logits, settings["binning"])
        summary["source"] = stem
        prefix = "" if len(maps) == 1 else f"{stem}_"
        _write_csv(out / f"{prefix}spectrum.csv", ["nu", "abs_b", "abs_y_hat", "L_ce", "R"],
                   rows + [("total", "", "", summary["ce_spectral_total"], "")])
        _write_json(out / f"{prefix}spectrum.json", summary)
        if settings["plot"]:
            nus = [r[0] for r in rows]
            svg = line_plot(
                {"|b|": (nus, [r[1] for r in rows]), "|y_hat|": (nus, [r[2] for r in rows]),
                 "R": (nus, [r[4] for r in rows])},
                title=f"spectral CE profile ({stem})", xlabel="nu", ylabel="value", log_y=True,
            )
            (out / f"{prefix}spectrum.svg").write_text(svg, encoding="utf-8")
        return stem

    _fan_out(run, maps, settings["jobs"])
    return EXIT_OK


# ---------------------------------------------------------------- block-annot

def _default_nus(shape):
    half = min(shape) // 2
    nus = []
    nu = 1
    while nu < half:
        nus.append(nu)
        nu *= 2
    nus.append(half)
    return nus


def cmd_block_annot(settings) -> int:
    out = _out_dir(settings)
    maps = list(_input_maps(settings))

    def run(item):
        stem, label_map = item
        prefix = "" if len(maps) == 1 else f"{stem}_"
        nus = settings["nu"] or _default_nus(label_map.shape)
        if any(v < 1 for v in nus):
            raise UsageError("block annotations need nu >= 1")
        annot = segmap.one_hot(label_map)
        dec = spectral_ce.ce_decompose(settings["alpha"] * annot, annot)
        rows = []
        for nu in sorted(nus):
            blk = segmap.block_annotation(label_map, nu, method=settings["method"])
            formats.save_pgm(blk, out / f"{prefix}block_nu{nu}.pgm")
            rows.append((nu, mean_iou(blk, label_map), spectral_ce.discrepancy_R(dec, nu)))
        _write_csv(out / f"{prefix}block_annot.csv", ["nu", "iou", "R"], rows)
        if settings["plot"]:
            xs = [r[0] for r in rows]
            svg = line_plot({"mIoU": (xs, [r[1] for r in rows]), "R": (xs, [r[2] for r in rows])},
                            title=f"block-wise annotation ({stem})", xlabel="nu_max", ylabel="value")
            (out / f"{prefix}block_annot.svg").write_text(svg, encoding="utf-8")
        return stem

    _fan_out(run, maps, settings["jobs"])
    return EXIT_OK


# ---------------------------------------------------------------- biou

def cmd_biou(settings) -> int:
    out = _out_dir(settings)
    sigma = settings["sigma"] if settings["sigma"] is not None else settings["d"] / 2.0
    tb0 = settings["t0"] if settings["tb0"] is None else settings["tb0"]
    tb1 = settings["t1"] if settings["tb1"] is None else settings["tb1"]
    try:
        ms = boundary.GaussianBoundaryModel(settings["t0"], settings["t1"], sigma)
        mb = boundary.GaussianBoundaryModel(tb0, tb1, sigma)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    nus = settings["nu"]
    if nus is None:
        nus = [k * 0.25 / sigma for k in range(1, 33)]
    rows = []
    for nu in sorted(nus):
        if nu <= 0:
            continue
        numeric = boundary.boundary_overlap_numeric(ms, mb, nu)
        closed = boundary.boundary_overlap_closed(ms, mb, nu)
        approx = boundary.boundary_overlap_approx(ms, mb, nu)
        biou = boundary.boundary_iou_spectral(ms, mb, nu) if numeric > 0 else math.nan
        rows.append((float(nu), numeric, closed, approx, biou))
    _write_csv(out / "biou.csv", ["nu_limit", "numeric", "closed", "approx", "boundary_iou"], rows)
    xs = [r[0] * sigma for r in rows]
    svg = line_plot(
        {"numeric": (xs, [r[1] for r in rows]), "closed": (xs, [r[2] for r in rows]),
         "approx": (xs, [r[3] for r in rows])},
        title="band-limited boundary overlap", xlabel="nu_limit * sigma", ylabel="overlap",
    )
    (out / "biou.svg").write_text(svg, encoding="utf-8")
    return EXIT_OK


# ---------------------------------------------------------------- gradcheck

def gradcheck_report(n: int, kernel_scale: float, seed: int, h: float = 1e-6):
    """FD spectral Jacobians of conv / ReLU / upsample / full layer, plus the delta form."""
    if n < 4:
        raise UsageError("gradcheck needs N >= 4")
    rng = np.random.default_rng(seed)
    # smooth input with |x| < 1, as the layer approximation assumes
    raw = fourier.idft(fourier.band_limit(fourier.dft(rng.standard_normal(n)), max(1, n // 4))).real
    x = 0.9 * raw / np.max(np.abs(raw))
    layer = spectral_grad.ToyConvLayer(kernel_scale * rng.uniform(-1.0, 1.0, n))

    def conv(v):
        return layer.preactivation(v)

    jacs = {
        "conv": spectral_grad.fd_jacobian_spectral(conv, x, h),
        "relu": spectral_grad.fd_jacobian_spectral(spectral_grad.relu_map(x), x, h),
        "upsample": spectral_grad.fd_jacobian_spectral(spectral_grad.upsample_map, x, h),
        "layer": spectral_grad.fd_jacobian_spectral(lambda v: spectral_grad.forward(layer, v), x, h),
        "delta": spectral_grad.layer_jacobian_delta(layer),
    }
    rows_of_interest = sorted({0, n // 4, n // 2})
    ratios = {name: spectral_grad.off_diagonal_ratio(j) for name, j in jacs.items()}
    full = spectral_grad.layer_jacobian_full(layer, x)
    half_k = 0.5 * layer.spectrum
    diag = np.diagonal(jacs["layer"])
    summary = {
        "n": n,
        "kernel_scale": kernel_scale,
        "seed": seed,
        "rows": rows_of_interest,
        "off_diagonal_ratio": ratios,
        "diagonal_rel_error": float(np.max(np.abs(diag - half_k) / np.abs(half_k))),
        "full_form_max_abs_error": float(np.max(np.abs(full - jacs["layer"]))),
    }
    return jacs, rows_of_interest, summary


def cmd_gradcheck(settings) -> int:
    out = _out_dir(settings)
    jacs, rows_of_interest, summary = gradcheck_report(
        settings["n"], settings["kernel_scale"], settings["seed"], settings["h"]
    )
    for name, jac in jacs.items():
        rows = []
        for i in rows_of_interest:
            for j in range(jac.shape[1]):
                v = jac[i, j]
                rows.append((i, j, float(v.real), float(v.imag), float(abs(v))))
        _write_csv(out / f"jacobian_{name}.csv", ["nu_i", "nu_j", "re", "im", "abs"], rows)
    _write_json(out / "gradcheck.json", summary)
    if settings["plot"]:
        n = settings["n"]
        js = list(range(n))
        for name in ("conv", "relu", "upsample", "layer"):
            jac = jacs[name]
            series = {f"nu_i={i}": (js, list(np.abs(jac[i]))) for i in rows_of_interest}
            svg = line_plot(series, title=f"|dy(nu_i)/dx(nu_j)| {name}", xlabel="nu_j", ylabel="magnitude")
            (out / f"jacobian_{name}.svg").write_text(svg, encoding="utf-8")
    return EXIT_OK


# ---------------------------------------------------------------- flops

def _miou_pairs(text):
    if not text:
        return {}
    pairs = {}
    for item in str(text).replace(" ", "").split(","):
        if not item:
            continue
        size, value = item.split(":")
        pairs[int(size)] = float(value)
    return pairs


def cmd_flops(settings) -> int:
    out = _out_dir(settings)
    if not settings["spec"]:
        raise UsageError("flops needs --spec")
    spec = truncation.load_cost_spec(settings["spec"])
    if settings["prune"]:
        spec = spec.pruned(settings["prune"])
    try:
        mious = _miou_pairs(settings["miou"])
    except ValueError as exc:
        raise UsageError(f"bad --miou value: {settings['miou']!r}") from exc
    base_side = spec.decoder_base_side
    sizes = settings["sizes"] or [int(base_side)]
    base = truncation.flops_total(spec, base_side)
    rows = []
    for size in sizes:
        report = truncation.flops_total(spec, size, baseline=base, miou=mious.get(size))
        rows.append((size, report.flops_total, report.relative_flops_drop,
                     "" if report.fpi is None else report.fpi))
    _write_csv(out / "flops.csv", ["size", "flops", "relative_drop", "fpi"], rows)
    return EXIT_OK


HANDLERS = {
    "spectrum": cmd_spectrum,
    "block-annot": cmd_block_annot,
    "biou": cmd_biou,
    "gradcheck": cmd_gradcheck,
    "flops": cmd_flops,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        settings = resolve_config(args)
        return HANDLERS[args.command](settings)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"specseg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EnvelopeError as exc:
        print(f"specseg: numerical envelope exceeded: {exc}", file=sys.stderr)
        return EXIT_ENVELOPE
    except (SpecsegError, OSError, ValueError) as exc:
        print(f"specseg: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
