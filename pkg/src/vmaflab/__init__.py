"""Full-reference video metrics (VMAF-style engine, SSIM, PSNR), contrast
operators, and an NSGA-II search for parameters that raise VMAF while
holding SSIM."""

from .enhance import HistEq, Identity, UnsharpMask, apply_transform, hist_equalize, unsharp_mask
from .features import FeatureVector, extract_features
from .media import Clip, Frame, VideoMeta, load_clip, save_clip
from .metrics import MetricScore, psnr_clip, psnr_frame, si_ti, ssim_clip, ssim_frame
from .model import VmafModel, parse_model, score_clip_pair

__version__ = "0.1.0"

__all__ = [
    "Clip", "Frame", "VideoMeta", "load_clip", "save_clip",
    "MetricScore", "psnr_frame", "ssim_frame", "psnr_clip", "ssim_clip", "si_ti",
    "FeatureVector", "extract_features",
    "VmafModel", "parse_model", "score_clip_pair",
    "UnsharpMask", "HistEq", "Identity", "unsharp_mask", "hist_equalize", "apply_transform",
]
