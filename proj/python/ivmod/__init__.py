# Copyright (C) 2026 The ivmod Authors
# SPDX-License-Identifier: Apache-2.0
"""Image-wise vulnerability metrics for object detectors under bit faults."""

from ._ivmod import (
    ArgumentError,
    Box,
    ConfigError,
    DataError,
    Detection,
    apply_fault,
    apply_fault_bits,
    assign,
    average_precision,
    classify_image,
    classify_value,
    generate_scene,
    infer,
    iou,
    mean_average_precision,
    nms,
    rasterize,
    rates,
    run_campaign,
    severity,
    simulate_pr,
    track,
)

__all__ = [
    "ArgumentError",
    "Box",
    "ConfigError",
    "DataError",
    "Detection",
    "apply_fault",
    "apply_fault_bits",
    "assign",
    "average_precision",
    "classify_image",
    "classify_value",
    "generate_scene",
    "infer",
    "iou",
    "mean_average_precision",
    "nms",
    "rasterize",
    "rates",
    "run_campaign",
    "severity",
    "simulate_pr",
    "track",
]
