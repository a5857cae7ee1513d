"""Python bindings for the gansmooth C++ core."""

from ._gansmooth import (
    GansmoothError,
    Measure,
    grad_phi_mmd,
    inf_conv,
    js,
    kl,
    legendre,
    mmd_sq,
    moreau,
    ns_kl,
    pasch_hausdorff,
    phi_mmd,
    sample_target,
    smoothness_report,
    theoretical_lr,
    train_particles,
    truncated_series_norm,
    verify,
    w1,
)

__all__ = [
    "GansmoothError",
    "Measure",
    "grad_phi_mmd",
    "inf_conv",
    "js",
    "kl",
    "legendre",
    "mmd_sq",
    "moreau",
    "ns_kl",
    "pasch_hausdorff",
    "phi_mmd",
    "sample_target",
    "smoothness_report",
    "theoretical_lr",
    "train_particles",
    "truncated_series_norm",
    "verify",
    "w1",
]
