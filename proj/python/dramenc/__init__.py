"""DRAM data-bus encoding simulator.

Codec primitives (DBI, one-hot index, data table), a channel simulator that
encodes, counts energy and decodes cache-line streams under the ORG, DBI,
BDE_ORG, MBDC and ZAC_DEST schemes, PSNR/SSIM, trace files, and the
run/sweep report drivers.
"""

from ._dramenc import (
    ChipCodec,
    ConfigError,
    DataTable,
    DesyncError,
    Frame,
    FrameType,
    InputError,
    MalformedFrame,
    Scheme,
    build_mask,
    count_termination,
    dbi_decode,
    dbi_encode,
    default_config,
    energy_joules,
    ohe_decode,
    ohe_encode,
    psnr,
    read_image,
    read_trace,
    run,
    similarity_preset_bits,
    simulate,
    split_cache_line,
    ssim,
    sweep,
    write_pnm,
    write_trace,
)

__all__ = [
    "ChipCodec",
    "ConfigError",
    "DataTable",
    "DesyncError",
    "Frame",
    "FrameType",
    "InputError",
    "MalformedFrame",
    "Scheme",
    "build_mask",
    "count_termination",
    "dbi_decode",
    "dbi_encode",
    "default_config",
    "energy_joules",
    "ohe_decode",
    "ohe_encode",
    "psnr",
    "read_image",
    "read_trace",
    "run",
    "similarity_preset_bits",
    "simulate",
    "split_cache_line",
    "ssim",
    "sweep",
    "write_pnm",
    "write_trace",
]

__version__ = "1.0.0"
