"""Wavelet-based structural break estimation for panel data."""

from ._core import (
    ChowTest,
    FitResult,
    PanelDataset,
    RegressorJumps,
    SawError,
    SegmentRow,
    dot_transform,
    fit,
    generate,
    haar_decompose,
    haar_reconstruct,
    hausdorff,
    inv_sqrt,
    load_panel,
    make_panel,
    monte_carlo,
    parse_panel,
    true_beta,
)

__all__ = [
    "ChowTest",
    "FitResult",
    "PanelDataset",
    "RegressorJumps",
    "SawError",
    "SegmentRow",
    "dot_transform",
    "fit",
    "generate",
    "haar_decompose",
    "haar_reconstruct",
    "hausdorff",
    "inv_sqrt",
    "load_panel",
    "make_panel",
    "monte_carlo",
    "parse_panel",
    "true_beta",
]
