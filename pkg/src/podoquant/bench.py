"""Benchmark harness for the per-image pipeline.

Times each stage (provider calls, stitching, instance labeling, ROI
detection, morphometry) plus the end-to-end wall time over repeated
iterations with untimed warmup runs.  The timer is injectable so the
arithmetic is testable without a clock.
"""

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import MaskWriteError, NonPositiveTimeError, PipelineError
from .imgio import Image
from .instances import fp_binary_mask, label_components
from .morphometry import quantify
from .providers import MaskLoaderProvider
from .roi import RoiParams, detect_roi
from .tiling import extract_patch, plan_patches, stitch_consensus

STAGES = ("provider", "stitch", "instances", "roi", "morphometry", "end_to_end")


@dataclass
class BenchReport:
    """Per-stage timing samples of one benchmark run."""

    samples: dict
    iterations: int
    warmup: int
    backend: str = ""
    invalid: bool = False
    error: str = ""

    def mean(self, stage):
        values = self.samples.get(stage, [])
        return float(np.mean(values)) if values else None

    def stddev(self, stage):
        """Sample standard deviation; None below two samples."""
        values = self.samples.get(stage, [])
        return float(np.std(values, ddof=1)) if len(values) >= 2 else None

    def to_json_dict(self):
        stats = {
            stage: {
                "mean_s": self.mean(stage),
                "stddev_s": self.stddev(stage),
                "samples_s": list(self.samples.get(stage, [])),
            }
            for stage in STAGES
        }
        return {
            "iterations": self.iterations,
            "warmup": self.warmup,
            "backend": self.backend,
            "invalid": self.invalid,
            "error": self.error,
            "stages": stats,
        }


def speedup(baseline_mean, candidate_mean):
    """How many times faster the candidate is than the baseline."""
    if not candidate_mean > 0:
        raise NonPositiveTimeError(f"candidate mean must be positive, got {candidate_mean}")
    return baseline_mean / candidate_mean


def run_pipeline_once(image, provider, patch_size, overlap, connectivity,
                      roi_params, pixel_size_um, timer):
    """One timed pass; returns stage durations in seconds."""
    durations = {}
    t_start = timer()
    t0 = timer()
    plan = plan_patches(image.width, image.height, patch_size, overlap)
    patches = []
    for origin in plan.origins:
        patch = extract_patch(image, origin, patch_size)
        patches.append((provider.segment_patch(patch, origin), origin))
    t1 = timer()
    durations["provider"] = t1 - t0
    t0 = timer()
    semantic = stitch_consensus(patches, image.width, image.height)
    t1 = timer()
    durations["stitch"] = t1 - t0
    t0 = timer()
    instances = label_components(fp_binary_mask(semantic), connectivity)
    t1 = timer()
    durations["instances"] = t1 - t0
    t0 = timer()
    roi_mask = detect_roi(semantic, roi_params, connectivity)
    t1 = timer()
    durations["roi"] = t1 - t0
    t0 = timer()
    quantify(instances, semantic, roi_mask, pixel_size_um)
    t1 = timer()
    durations["morphometry"] = t1 - t0
    durations["end_to_end"] = timer() - t_start
    return durations


def run_benchmark(semantic, pixel_size_um, patch_size=384, overlap=256,
                  connectivity=8, roi_params=RoiParams(), iterations=5,
                  warmup=1, timer=time.perf_counter, backend=""):
    """Benchmark the pipeline replaying a fixed semantic map.

    The provider is a mask loader over ``semantic``, so timings measure the
    post-processing stages, not a model.  Warmup passes run the same code
    untimed.  A pipeline error aborts the run; the partial report comes
    back flagged invalid with the error message attached.
    """
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    if warmup < 0:
        raise ValueError(f"warmup must be >= 0, got {warmup}")
    image = Image(
        np.zeros((semantic.height * semantic.scale_factor,
                  semantic.width * semantic.scale_factor), dtype=np.float32),
        pixel_size_um=pixel_size_um,
    )
    provider = MaskLoaderProvider(semantic, patch_size)
    report = BenchReport(
        samples={stage: [] for stage in STAGES},
        iterations=iterations,
        warmup=warmup,
        backend=backend,
    )
    try:
        for _ in range(warmup):
            run_pipeline_once(image, provider, patch_size, overlap, connectivity,
                              roi_params, pixel_size_um, timer)
        for _ in range(iterations):
            durations = run_pipeline_once(image, provider, patch_size, overlap,
                                          connectivity, roi_params, pixel_size_um,
                                          timer)
            for stage, value in durations.items():
                report.samples[stage].append(value)
    except PipelineError as exc:
        report.invalid = True
        report.error = str(exc)
    return report


def write_benchmark_csv(report, path):
    """Stage timing summary as CSV (stage, mean_s, stddev_s, n)."""
    path = Path(path)
    lines = ["stage,mean_s,stddev_s,n"]
    for stage in STAGES:
        mean = report.mean(stage)
        sd = report.stddev(stage)
        n = len(report.samples.get(stage, []))
        lines.append(
            f"{stage},{'' if mean is None else repr(mean)},"
            f"{'' if sd is None else repr(sd)},{n}"
        )
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise MaskWriteError(f"cannot write benchmark CSV {path}: {exc}") from exc


def write_benchmark_json(report, path):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(report.to_json_dict(), indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise MaskWriteError(f"cannot write benchmark JSON {path}: {exc}") from exc


def write_stage_svg(report, path):
    """Bar chart of stage means as a small standalone SVG."""
    stages = [s for s in STAGES if report.samples.get(s)]
    means = [report.mean(s) for s in stages]
    top = max(means) if means else 1.0
    if top <= 0:
        top = 1.0
    bar_w, gap, height, label_h = 90, 18, 220, 40
    width = gap + len(stages) * (bar_w + gap)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height + label_h}" viewBox="0 0 {width} {height + label_h}">',
        f'<rect width="{width}" height="{height + label_h}" fill="white"/>',
    ]
    for i, (stage, mean) in enumerate(zip(stages, means)):
        x = gap + i * (bar_w + gap)
        bar_h = 0 if top == 0 else (mean / top) * (height - 30)
        y = height - bar_h
        parts.append(
            f'<rect x="{x}" y="{y:.2f}" width="{bar_w}" height="{bar_h:.2f}" fill="#4878a8"/>'
        )
        parts.append(
            f'<text x="{x + bar_w / 2}" y="{y - 6:.2f}" font-size="11" '
            f'text-anchor="middle">{mean:.4g}s</text>'
        )
        parts.append(
            f'<text x="{x + bar_w / 2}" y="{height + 16}" font-size="11" '
            f'text-anchor="middle">{stage}</text>'
        )
    parts.append("</svg>")
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(parts) + "\n")
    except OSError as exc:
        raise MaskWriteError(f"cannot write benchmark SVG {path}: {exc}") from exc
