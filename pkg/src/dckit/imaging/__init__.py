"""Imaging calculus, blur operators, SSIM and PGM I/O."""
from .blur import convolve, convolve_adjoint, disk_kernel, operator_norm
from .calculus import (
    GradField,
    PhiFamily,
    f2_smooth_gradient,
    f2_smooth_value,
    grad,
    grad_adjoint,
    grad_norms,
    phi_deriv,
    phi_eval,
    tv,
    tv_phi,
)
from .data import add_gaussian_noise, center_crop, resize, test_image
from .io import pgm_parse, pgm_read, pgm_write
from .metrics import ssim, ssim_map

__all__ = [
    "GradField",
    "PhiFamily",
    "add_gaussian_noise",
    "center_crop",
    "convolve",
    "convolve_adjoint",
    "disk_kernel",
    "f2_smooth_gradient",
    "f2_smooth_value",
    "grad",
    "grad_adjoint",
    "grad_norms",
    "operator_norm",
    "pgm_parse",
    "pgm_read",
    "pgm_write",
    "phi_deriv",
    "phi_eval",
    "resize",
    "ssim",
    "ssim_map",
    "test_image",
    "tv",
    "tv_phi",
]
