"""Command line interface.

Subcommands cover the full workflow: ``segment`` (patches, consensus
stitching, instances, optional full analysis, batch over a directory),
``roi``, ``quantify``, ``compare`` (method agreement between two feature
tables), ``bench`` and ``synth``.

Option precedence is: built-in defaults, then a JSON config file
(``--config``), then explicit command line flags.  Every run writes a
``manifest.json`` recording the merged parameters next to its artifacts.
"""

import argparse
import csv
import json
import sys
import traceback
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from types import SimpleNamespace

import numpy as np

from . import __version__, kernels
from .bench import (
    run_benchmark,
    speedup,
    write_benchmark_csv,
    write_benchmark_json,
    write_stage_svg,
)
from .errors import InputFileNotFoundError, KeyMismatchError, MaskWriteError, PipelineError
from .instances import filter_small_instances, fp_binary_mask, label_components
from .imgio import (
    DEFAULT_PIXEL_SIZE_UM,
    Image,
    SemanticMap,
    load_tiff,
    read_instance_map,
    read_roi_mask,
    read_semantic_map,
    write_instance_map,
    write_roi_mask,
    write_semantic_map,
)
from .morphometry import quantify, write_records_csv, write_summary_json
from .pipeline import analyze_semantic, segment_image
from .providers import create_provider
from .roi import RoiMask, RoiParams, detect_roi, upsample_nearest
from .stats import compare_series
from .synth import SynthSpec, generate_voronoi_semantic, write_ground_truth_json

_ROI_DEFAULTS = {
    "dilation_radius": 5,
    "dilation_iterations": 10,
    "erosion_iterations": 2,
    "min_roi_area": 20000,
    "upsample": "before",
}

DEFAULTS = {
    "segment": {
        "input": None,
        "input_dir": None,
        "pattern": "*.tif",
        "provider": None,
        "out": None,
        "channel": 0,
        "z_mode": "max",
        "z_index": None,
        "pixel_size_um": DEFAULT_PIXEL_SIZE_UM,
        "patch_size": 384,
        "overlap": 256,
        "connectivity": 8,
        "min_instance_area": 0,
        "semantic_format": "png",
        "analyze": False,
        "jobs": 1,
        **_ROI_DEFAULTS,
    },
    "roi": {
        "semantic": None,
        "out": None,
        "scale_factor": 1,
        "connectivity": 8,
        **_ROI_DEFAULTS,
    },
    "quantify": {
        "instances": None,
        "semantic": None,
        "roi": None,
        "out": None,
        "pixel_size_um": DEFAULT_PIXEL_SIZE_UM,
        "connectivity": 8,
        **_ROI_DEFAULTS,
    },
    "compare": {
        "a": None,
        "b": None,
        "out": None,
        "key": "image",
        "margin": 0.10,
        "margin_basis": None,
        "features": None,
    },
    "bench": {
        "semantic": None,
        "out": None,
        "width": 1024,
        "height": 1024,
        "seeds": 150,
        "thickness": 1,
        "rng_seed": 0,
        "iterations": 5,
        "warmup": 1,
        "pixel_size_um": DEFAULT_PIXEL_SIZE_UM,
        "patch_size": 384,
        "overlap": 256,
        "connectivity": 8,
        "compare_backends": False,
        "baseline": None,
        **_ROI_DEFAULTS,
    },
    "synth": {
        "width": 512,
        "height": 512,
        "seeds": 40,
        "thickness": 1,
        "rng_seed": 0,
        "out": None,
    },
}


def _add_roi_flags(sub):
    sub.add_argument("--dilation-radius", type=int, help="disc radius for ROI dilation")
    sub.add_argument("--dilation-iterations", type=int, help="ROI dilation passes")
    sub.add_argument("--erosion-iterations", type=int, help="ROI erosion passes")
    sub.add_argument("--min-roi-area", type=int, help="drop ROI components below this many px")
    sub.add_argument(
        "--upsample",
        choices=("before", "after"),
        help="restore full resolution before or after ROI morphology",
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="podoquant",
        description="Podocyte segmentation post-processing and morphometry",
        argument_default=argparse.SUPPRESS,
    )
    parser.add_argument("--version", action="version", version=f"podoquant {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    seg = subs.add_parser("segment", argument_default=argparse.SUPPRESS,
                          help="segment an image (or a directory) via patches")
    seg.add_argument("--input", help="input TIFF")
    seg.add_argument("--input-dir", help="directory of input TIFFs (batch mode)")
    seg.add_argument("--pattern", help="glob for batch inputs (default *.tif)")
    seg.add_argument("--provider", help="provider spec, e.g. mask:seg.png or const:1; "
                                        "{stem} expands to the input stem in batch mode")
    seg.add_argument("--out", help="output directory")
    seg.add_argument("--channel", type=int, help="channel index (default 0)")
    seg.add_argument("--z-mode", choices=("max", "slice"), help="stack handling (default max)")
    seg.add_argument("--z-index", type=int, help="Z plane for --z-mode slice")
    seg.add_argument("--pixel-size-um", type=float, help="pixel edge in micrometers")
    seg.add_argument("--patch-size", type=int, help="square patch edge (default 384)")
    seg.add_argument("--overlap", type=int, help="patch overlap (default 256)")
    seg.add_argument("--connectivity", type=int, choices=(4, 8), help="instance connectivity")
    seg.add_argument("--min-instance-area", type=int,
                     help="drop foot-process instances below this many px")
    seg.add_argument("--semantic-format", choices=("png", "tif"), help="semantic map format")
    seg.add_argument("--analyze", action="store_true",
                     help="also run ROI detection and morphometry per image")
    seg.add_argument("--jobs", type=int, help="parallel workers in batch mode")
    _add_roi_flags(seg)
    seg.add_argument("--config", help="JSON config file")
    seg.set_defaults(_runner=_run_segment)

    roi = subs.add_parser("roi", argument_default=argparse.SUPPRESS,
                          help="detect the analysis ROI from a semantic map")
    roi.add_argument("--semantic", help="semantic map (8-bit, values 0/1/2)")
    roi.add_argument("--out", help="output directory")
    roi.add_argument("--scale-factor", type=int,
                     help="declared scale of the stored map (default 1)")
    roi.add_argument("--connectivity", type=int, choices=(4, 8))
    _add_roi_flags(roi)
    roi.add_argument("--config", help="JSON config file")
    roi.set_defaults(_runner=_run_roi)

    quant = subs.add_parser("quantify", argument_default=argparse.SUPPRESS,
                            help="morphometry from instance, semantic and ROI maps")
    quant.add_argument("--instances", help="instance map (32-bit TIFF)")
    quant.add_argument("--semantic", help="semantic map (8-bit, values 0/1/2)")
    quant.add_argument("--roi", help="ROI mask (8-bit 0/255); computed when omitted")
    quant.add_argument("--out", help="output directory")
    quant.add_argument("--pixel-size-um", type=float)
    quant.add_argument("--connectivity", type=int, choices=(4, 8))
    _add_roi_flags(quant)
    quant.add_argument("--config", help="JSON config file")
    quant.set_defaults(_runner=_run_quantify)

    comp = subs.add_parser("compare", argument_default=argparse.SUPPRESS,
                           help="method agreement between two feature CSVs")
    comp.add_argument("--a", help="first feature CSV")
    comp.add_argument("--b", help="second feature CSV")
    comp.add_argument("--out", help="output directory")
    comp.add_argument("--key", help="join column (default image)")
    comp.add_argument("--margin", type=float, help="TOST margin fraction (default 0.10)")
    comp.add_argument("--margin-basis", choices=("a", "b"),
                      help="series whose mean anchors the absolute margin")
    comp.add_argument("--features", help="comma-separated columns (default: all shared numeric)")
    comp.add_argument("--config", help="JSON config file")
    comp.set_defaults(_runner=_run_compare)

    ben = subs.add_parser("bench", argument_default=argparse.SUPPRESS,
                          help="time the pipeline stages")
    ben.add_argument("--semantic", help="semantic map to replay (default: synthetic)")
    ben.add_argument("--out", help="output directory")
    ben.add_argument("--width", type=int, help="synthetic map width")
    ben.add_argument("--height", type=int, help="synthetic map height")
    ben.add_argument("--seeds", type=int, help="synthetic seed count")
    ben.add_argument("--thickness", type=int, help="synthetic SD band half-width")
    ben.add_argument("--rng-seed", type=int, help="synthetic RNG seed")
    ben.add_argument("--iterations", type=int, help="timed passes (default 5)")
    ben.add_argument("--warmup", type=int, help="untimed passes (default 1)")
    ben.add_argument("--pixel-size-um", type=float)
    ben.add_argument("--patch-size", type=int)
    ben.add_argument("--overlap", type=int)
    ben.add_argument("--connectivity", type=int, choices=(4, 8))
    ben.add_argument("--compare-backends", action="store_true",
                     help="run both kernel backends and report the speedup")
    ben.add_argument("--baseline", help="bench.json of a previous run to compute speedup against")
    _add_roi_flags(ben)
    ben.add_argument("--config", help="JSON config file")
    ben.set_defaults(_runner=_run_bench)

    syn = subs.add_parser("synth", argument_default=argparse.SUPPRESS,
                          help="generate a synthetic semantic map with ground truth")
    syn.add_argument("--width", type=int)
    syn.add_argument("--height", type=int)
    syn.add_argument("--seeds", type=int)
    syn.add_argument("--thickness", type=int)
    syn.add_argument("--rng-seed", type=int)
    syn.add_argument("--out", help="output directory")
    syn.add_argument("--config", help="JSON config file")
    syn.set_defaults(_runner=_run_synth)

    return parser


def _merge_options(args):
    """Layer defaults, config file values and explicit flags."""
    merged = dict(DEFAULTS[args.command])
    config_path = getattr(args, "config", None)
    if config_path is not None:
        path = Path(config_path)
        if not path.is_file():
            raise InputFileNotFoundError(f"config file not found: {path}")
        try:
            loaded = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValueError(f"cannot parse config {path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ValueError(f"config {path} must hold a JSON object")
        for key, value in loaded.items():
            norm = key.replace("-", "_")
            if norm in merged:
                merged[norm] = _coerce_config_value(norm, value, merged[norm])
    for key, value in vars(args).items():
        if key in ("command", "config") or key.startswith("_"):
            continue
        merged[key] = value
    return SimpleNamespace(**merged)


def _coerce_config_value(key, value, default):
    if default is None or value is None:
        return value
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ValueError(f"config key {key!r} must be a boolean, got {value!r}")
        return value
    if isinstance(default, int) and isinstance(value, bool):
        raise ValueError(f"config key {key!r} must be a number, got {value!r}")
    if isinstance(default, (int, float)) and isinstance(value, (int, float)):
        return type(default)(value)
    if isinstance(default, str) and isinstance(value, str):
        return value
    if type(default) is type(value):
        return value
    raise ValueError(f"config key {key!r} has incompatible value {value!r}")


def _require(ns, *names):
    for name in names:
        if getattr(ns, name) is None:
            raise ValueError(f"--{name.replace('_', '-')} is required")


def _roi_params(ns):
    return RoiParams(
        dilation_radius=ns.dilation_radius,
        dilation_iterations=ns.dilation_iterations,
        erosion_iterations=ns.erosion_iterations,
        min_component_area=ns.min_roi_area,
        upsample_first=ns.upsample == "before",
    )


def _float_cell(value):
    return "" if value is None else repr(float(value))


def _write_manifest(out_dir, command, ns, inputs, outputs):
    params = {}
    for key, value in sorted(vars(ns).items()):
        params[key] = str(value) if isinstance(value, Path) else value
    payload = {
        "tool": "podoquant",
        "version": __version__,
        "command": command,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "kernel_backend": kernels.get_backend(),
        "parameters": params,
        "inputs": inputs,
        "outputs": outputs,
    }
    path = Path(out_dir) / "manifest.json"
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise MaskWriteError(f"cannot write manifest {path}: {exc}") from exc


def _load_segment_input(ns, input_path, provider):
    if input_path is not None:
        return load_tiff(
            input_path,
            channel=ns.channel,
            z_mode=ns.z_mode,
            z_index=ns.z_index,
            pixel_size_um=ns.pixel_size_um,
        )
    expected = provider.expected_image_size()
    if expected is None:
        raise ValueError("--input is required unless the provider is bound to an image size")
    width, height = expected
    return Image(np.zeros((height, width), dtype=np.float32), pixel_size_um=ns.pixel_size_um)


_FEATURE_COLUMNS = (
    "image",
    "instance_count",
    "mean_area_um2",
    "mean_perimeter_um",
    "mean_circularity",
    "sd_length_um",
    "roi_area_um2",
    "sd_length_density_per_um",
)


def _segment_one(ns, input_path, stem, out_dir):
    provider_spec = ns.provider.replace("{stem}", stem)
    provider = create_provider(provider_spec, ns.patch_size)
    image = _load_segment_input(ns, input_path, provider)
    result = segment_image(
        image,
        provider,
        patch_size=ns.patch_size,
        overlap=ns.overlap,
        connectivity=ns.connectivity,
        min_instance_area_px=ns.min_instance_area,
    )
    semantic = result.semantic
    instances = result.instances
    if semantic.scale_factor > 1:
        # CLI artifacts are always full resolution.
        semantic = upsample_nearest(semantic, semantic.scale_factor)
        instances = label_components(fp_binary_mask(semantic), ns.connectivity)
        if ns.min_instance_area > 0:
            instances = filter_small_instances(instances, ns.min_instance_area)
    out_dir = Path(out_dir)
    semantic_name = f"semantic.{ns.semantic_format}"
    outputs = [semantic_name, "instances.tif"]
    write_semantic_map(semantic, out_dir / semantic_name)
    row = None
    if ns.analyze:
        instances, roi_mask, table = analyze_semantic(
            semantic,
            ns.pixel_size_um,
            roi_params=_roi_params(ns),
            connectivity=ns.connectivity,
            min_instance_area_px=ns.min_instance_area,
        )
        write_instance_map(instances, out_dir / "instances.tif")
        write_roi_mask(roi_mask.bits, out_dir / "roi.png")
        write_records_csv(table, out_dir / "morphometry.csv")
        write_summary_json(table, out_dir / "summary.json",
                           roi_params=_roi_params_dict(ns))
        outputs += ["roi.png", "morphometry.csv", "summary.json"]
        if table.roi_area_um2 == 0:
            print(f"warning: empty ROI for {stem}; density undefined", file=sys.stderr)
        summary = table.summarize("mean")
        row = {
            "image": stem,
            "instance_count": len(table.records),
            "mean_area_um2": _float_cell(summary["area_um2"]),
            "mean_perimeter_um": _float_cell(summary["perimeter_um"]),
            "mean_circularity": _float_cell(summary["circularity"]),
            "sd_length_um": _float_cell(table.sd_length_um),
            "roi_area_um2": _float_cell(table.roi_area_um2),
            "sd_length_density_per_um": _float_cell(table.sd_length_density_per_um),
        }
    else:
        write_instance_map(instances, out_dir / "instances.tif")
    _write_manifest(
        out_dir,
        "segment",
        ns,
        inputs={"image": str(input_path) if input_path else None, "provider": provider_spec},
        outputs=sorted(outputs) + ["manifest.json"],
    )
    return row


def _run_segment(ns):
    _require(ns, "provider", "out")
    out = Path(ns.out)
    if ns.input_dir is None:
        stem = Path(ns.input).stem if ns.input else "image"
        _segment_one(ns, ns.input, stem, out)
        return 0
    in_dir = Path(ns.input_dir)
    if not in_dir.is_dir():
        raise InputFileNotFoundError(f"input directory not found: {in_dir}")
    inputs = sorted(p for p in in_dir.glob(ns.pattern) if p.is_file())
    if not inputs:
        raise InputFileNotFoundError(f"no inputs matching {ns.pattern!r} in {in_dir}")
    jobs = max(1, int(ns.jobs))
    rows = []
    if jobs == 1:
        for path in inputs:
            rows.append(_segment_one(ns, path, path.stem, out / path.stem))
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(_segment_one, ns, path, path.stem, out / path.stem)
                for path in inputs
            ]
            rows = [f.result() for f in futures]
    if ns.analyze:
        rows = sorted((r for r in rows if r), key=lambda r: r["image"])
        path = out / "features.csv"
        with path.open("w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=_FEATURE_COLUMNS)
            writer.writeheader()
            writer.writerows(rows)
    return 0


def _roi_params_dict(ns):
    return {
        "dilation_radius": ns.dilation_radius,
        "dilation_iterations": ns.dilation_iterations,
        "erosion_iterations": ns.erosion_iterations,
        "min_roi_area": ns.min_roi_area,
        "upsample": ns.upsample,
    }


def _run_roi(ns):
    _require(ns, "semantic", "out")
    semantic = read_semantic_map(ns.semantic)
    if ns.scale_factor != 1:
        semantic = SemanticMap(semantic.labels, scale_factor=ns.scale_factor)
    roi_mask = detect_roi(semantic, _roi_params(ns), ns.connectivity)
    out = Path(ns.out)
    write_roi_mask(roi_mask.bits, out / "roi.png")
    _write_manifest(out, "roi", ns, inputs={"semantic": str(ns.semantic)},
                    outputs=["manifest.json", "roi.png"])
    return 0


def _run_quantify(ns):
    _require(ns, "instances", "semantic", "out")
    instances = read_instance_map(ns.instances)
    semantic = read_semantic_map(ns.semantic)
    if ns.roi is not None:
        roi_mask = RoiMask(read_roi_mask(ns.roi))
    else:
        roi_mask = detect_roi(semantic, _roi_params(ns), ns.connectivity)
    table = quantify(instances, semantic, roi_mask, ns.pixel_size_um)
    out = Path(ns.out)
    write_records_csv(table, out / "morphometry.csv")
    write_summary_json(table, out / "summary.json",
                       roi_params=None if ns.roi is not None else _roi_params_dict(ns))
    outputs = ["manifest.json", "morphometry.csv", "summary.json"]
    if ns.roi is None:
        write_roi_mask(roi_mask.bits, out / "roi.png")
        outputs.append("roi.png")
    if table.roi_area_um2 == 0:
        print("warning: empty ROI; slit-diaphragm density undefined", file=sys.stderr)
    _write_manifest(
        out,
        "quantify",
        ns,
        inputs={"instances": str(ns.instances), "semantic": str(ns.semantic),
                "roi": str(ns.roi) if ns.roi else None},
        outputs=sorted(outputs),
    )
    return 0


def _read_feature_csv(path, key):
    path = Path(path)
    if not path.is_file():
        raise InputFileNotFoundError(f"feature CSV not found: {path}")
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or key not in reader.fieldnames:
            raise KeyMismatchError(f"{path} lacks the key column {key!r}")
        rows = list(reader)
    if not rows:
        raise KeyMismatchError(f"{path} holds no rows")
    keys = [row[key] for row in rows]
    if len(set(keys)) != len(keys):
        raise KeyMismatchError(f"{path} repeats key values")
    columns = [c for c in reader.fieldnames if c != key]
    return {row[key]: row for row in rows}, columns


def _numeric_columns(table, columns):
    numeric = []
    for col in columns:
        try:
            for row in table.values():
                float(row[col])
        except (TypeError, ValueError):
            continue
        numeric.append(col)
    return numeric


def _run_compare(ns):
    _require(ns, "a", "b", "out", "margin_basis")
    table_a, cols_a = _read_feature_csv(ns.a, ns.key)
    table_b, cols_b = _read_feature_csv(ns.b, ns.key)
    if set(table_a) != set(table_b):
        only_a = sorted(set(table_a) - set(table_b))
        only_b = sorted(set(table_b) - set(table_a))
        raise KeyMismatchError(
            f"tables do not share keys (only in a: {only_a}, only in b: {only_b})"
        )
    keys = sorted(table_a)
    shared = [c for c in cols_a if c in cols_b]
    numeric = [c for c in _numeric_columns(table_a, shared)
               if c in _numeric_columns(table_b, shared)]
    if ns.features:
        wanted = [c.strip() for c in ns.features.split(",") if c.strip()]
        missing = [c for c in wanted if c not in numeric]
        if missing:
            raise ValueError(f"features not present as numeric columns: {missing}")
        numeric = wanted
    if not numeric:
        raise ValueError("no shared numeric columns to compare")
    reports = {}
    scatter_rows = []
    for col in numeric:
        a = np.array([float(table_a[k][col]) for k in keys])
        b = np.array([float(table_b[k][col]) for k in keys])
        try:
            report = compare_series(a, b, ns.margin, ns.margin_basis)
        except PipelineError as exc:
            reports[col] = {"error": str(exc)}
            continue
        reports[col] = report
        for k, va, vb in zip(keys, a, b):
            scatter_rows.append(
                (col, k, repr(float((va + vb) / 2.0)), repr(float(va - vb)))
            )
    out = Path(ns.out)
    out.mkdir(parents=True, exist_ok=True)
    stats_path = out / "stats.json"
    stats_path.write_text(json.dumps(reports, indent=2, sort_keys=True) + "\n")
    with (out / "bland_altman.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["feature", ns.key, "mean", "diff"])
        writer.writerows(scatter_rows)
    _write_manifest(out, "compare", ns, inputs={"a": str(ns.a), "b": str(ns.b)},
                    outputs=["bland_altman.csv", "manifest.json", "stats.json"])
    return 0


def _bench_semantic(ns):
    if ns.semantic is not None:
        return read_semantic_map(ns.semantic), {"semantic": str(ns.semantic)}
    spec = SynthSpec(width=ns.width, height=ns.height, n_seeds=ns.seeds,
                     sd_thickness=ns.thickness, rng_seed=ns.rng_seed)
    semantic, _ = generate_voronoi_semantic(spec)
    return semantic, {"semantic": f"synthetic:{ns.width}x{ns.height}:{ns.seeds}"}


def _run_bench(ns):
    _require(ns, "out")
    semantic, inputs = _bench_semantic(ns)
    out = Path(ns.out)
    roi_params = _roi_params(ns)

    def run(backend_label):
        return run_benchmark(
            semantic,
            ns.pixel_size_um,
            patch_size=ns.patch_size,
            overlap=ns.overlap,
            connectivity=ns.connectivity,
            roi_params=roi_params,
            iterations=ns.iterations,
            warmup=ns.warmup,
            backend=backend_label,
        )

    outputs = ["manifest.json"]
    if ns.compare_backends:
        available = kernels.available_backends()
        if "compiled" not in available:
            raise ValueError("compiled kernel backend is not available in this build")
        active = kernels.get_backend()
        results = {}
        try:
            for backend in ("python", "compiled"):
                kernels.set_backend(backend)
                results[backend] = run(backend)
        finally:
            kernels.set_backend(active)
        for backend, report in results.items():
            write_benchmark_json(report, out / f"bench_{backend}.json")
            write_benchmark_csv(report, out / f"bench_{backend}.csv")
            write_stage_svg(report, out / f"bench_{backend}.svg")
            outputs += [f"bench_{backend}.json", f"bench_{backend}.csv", f"bench_{backend}.svg"]
        ratios = {}
        for stage in results["python"].samples:
            base = results["python"].mean(stage)
            cand = results["compiled"].mean(stage)
            if base is not None and cand is not None and cand > 0:
                ratios[stage] = speedup(base, cand)
        (out / "speedup.json").parent.mkdir(parents=True, exist_ok=True)
        (out / "speedup.json").write_text(
            json.dumps({"speedup_python_over_compiled": ratios}, indent=2, sort_keys=True) + "\n"
        )
        outputs.append("speedup.json")
        for backend, report in results.items():
            if report.invalid:
                print(f"warning: {backend} run aborted: {report.error}", file=sys.stderr)
    else:
        report = run(kernels.get_backend())
        write_benchmark_json(report, out / "bench.json")
        write_benchmark_csv(report, out / "bench.csv")
        write_stage_svg(report, out / "bench.svg")
        outputs += ["bench.json", "bench.csv", "bench.svg"]
        if ns.baseline is not None:
            base_path = Path(ns.baseline)
            if not base_path.is_file():
                raise InputFileNotFoundError(f"baseline bench JSON not found: {base_path}")
            baseline = json.loads(base_path.read_text())
            base_mean = baseline.get("stages", {}).get("end_to_end", {}).get("mean_s")
            cand_mean = report.mean("end_to_end")
            if base_mean is None or cand_mean is None:
                raise ValueError("baseline or current run lacks end_to_end timings")
            (out / "speedup.json").write_text(
                json.dumps({"speedup_vs_baseline": speedup(base_mean, cand_mean)},
                           indent=2, sort_keys=True) + "\n"
            )
            outputs.append("speedup.json")
        if report.invalid:
            print(f"warning: benchmark aborted: {report.error}", file=sys.stderr)
    _write_manifest(out, "bench", ns, inputs=inputs, outputs=sorted(outputs))
    return 0


def _run_synth(ns):
    _require(ns, "out")
    spec = SynthSpec(width=ns.width, height=ns.height, n_seeds=ns.seeds,
                     sd_thickness=ns.thickness, rng_seed=ns.rng_seed)
    semantic, truth = generate_voronoi_semantic(spec)
    out = Path(ns.out)
    write_semantic_map(semantic, out / "semantic.png")
    write_ground_truth_json(truth, out / "ground_truth.json")
    _write_manifest(out, "synth", ns, inputs={},
                    outputs=["ground_truth.json", "manifest.json", "semantic.png"])
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        ns = _merge_options(args)
        return args._runner(ns)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:  # pragma: no cover - defensive
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
