"""Landmark-driven motion retargeting and conditioning toolkit."""

from .audio import (
    AugmentationPlan,
    FeatureSequence,
    Waveform,
    add_noise,
    apply_gain,
    augment,
    context_window,
    read_wav,
    time_shift,
    write_wav,
)
from .conditioning import (
    PartMask,
    RenderOptions,
    RlsConfig,
    apply_mask,
    mouth_exclusion_mask,
    plan_masks,
    rasterize_frame,
    rasterize_sequence,
    sample_mask,
)
from .errors import FormatError, GeometryError, MimicError, NumericalError
from .landmarks import (
    AffineTransform,
    FacePart,
    FacePartition,
    LandmarkFrame,
    LandmarkSequence,
    ParseReport,
    default_partition,
    load_partition,
    parse_mediapipe_export,
    read_canonical,
    to_pixel,
    validate_partition,
    write_canonical,
)
from .losses import (
    LossBreakdown,
    pixel_mse,
    spatial_loss,
    timestep_weight,
    total_objective,
    weight_schedule,
)
from .quality import SsimParams, landmark_rmse, mean_ssim_sequence, ssim
from .retarget import (
    ResidualSet,
    RetargetOptions,
    apply_transform,
    estimate_residuals,
    estimate_similarity,
    retarget_sequence,
)

__version__ = "0.1.0"

__all__ = [
    "AffineTransform",
    "AugmentationPlan",
    "FacePart",
    "FacePartition",
    "FeatureSequence",
    "FormatError",
    "GeometryError",
    "LandmarkFrame",
    "LandmarkSequence",
    "LossBreakdown",
    "MimicError",
    "NumericalError",
    "ParseReport",
    "PartMask",
    "RenderOptions",
    "ResidualSet",
    "RetargetOptions",
    "RlsConfig",
    "SsimParams",
    "Waveform",
    "add_noise",
    "apply_gain",
    "apply_mask",
    "apply_transform",
    "augment",
    "context_window",
    "default_partition",
    "estimate_residuals",
    "estimate_similarity",
    "landmark_rmse",
    "load_partition",
    "mean_ssim_sequence",
    "mouth_exclusion_mask",
    "parse_mediapipe_export",
    "pixel_mse",
    "plan_masks",
    "rasterize_frame",
    "rasterize_sequence",
    "read_canonical",
    "read_wav",
    "retarget_sequence",
    "sample_mask",
    "spatial_loss",
    "ssim",
    "time_shift",
    "timestep_weight",
    "to_pixel",
    "total_objective",
    "validate_partition",
    "weight_schedule",
    "write_canonical",
    "write_wav",
]
