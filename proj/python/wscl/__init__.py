"""Spectral contrastive learning with noisy label graphs."""

from ._wscl import (
    WsclError,
    closed_form_label_graph,
    eigh,
    gamma_threshold,
    gd_train,
    generate_world,
    label_graph,
    mf_loss,
    mix,
    noise_coefficients,
    noisy_bound,
    normalize,
    predict_label_spectrum,
    run_sweep_json,
    semi_bound,
    top_k_factor,
)

__all__ = [
    "WsclError",
    "closed_form_label_graph",
    "eigh",
    "gamma_threshold",
    "gd_train",
    "generate_world",
    "label_graph",
    "mf_loss",
    "mix",
    "noise_coefficients",
    "noisy_bound",
    "normalize",
    "predict_label_spectrum",
    "run_sweep_json",
    "semi_bound",
    "top_k_factor",
]
