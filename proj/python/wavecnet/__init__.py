# SPDX-License-Identifier: Apache-2.0
# Copyright 2026 The wavecnet Authors
"""Wavelet transforms, wavelet down-sampling networks and robustness metrics."""

from ._wavecnet import (
    corrupt,
    corruption_error,
    denoise_image,
    dwt2d,
    dwt2d_madds,
    get_wavelet,
    idwt2d,
    idwt2d_madds,
    mean_ce,
    model_madds,
    read_tensor,
    run_cli,
    soft_shrink,
    validate_filterbank,
    wavelet_names,
    write_tensor,
)

__version__ = "0.1.0"

__all__ = [
    "corrupt",
    "corruption_error",
    "denoise_image",
    "dwt2d",
    "dwt2d_madds",
    "get_wavelet",
    "idwt2d",
    "idwt2d_madds",
    "mean_ce",
    "model_madds",
    "read_tensor",
    "run_cli",
    "soft_shrink",
    "validate_filterbank",
    "wavelet_names",
    "write_tensor",
]
