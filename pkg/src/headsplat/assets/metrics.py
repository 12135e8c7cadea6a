"""Attribute-quality metrics reusing the training-time regularizer formulas."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError

DEFAULT_WEIGHTS = {
    "lambda_pos": 0.25,
    "lambda_scale": 0.5,
    "lambda_opacity": 1.0,
    "lambda_pos_d": 1.5,
    "lambda_scale_d": 1.5,
}

_BETA_EPS = 1e-6


@dataclass(frozen=True)
class RegularizerReport:
    l_pos: float
    l_scale: float
    l_opacity: float      # Beta(1/2,1/2) negative-log-density form; may be negative
    l_pos_d: float
    l_scale_d: float
    weights: dict
    weighted_total: float

    def as_dict(self) -> dict:
        return {
            "l_pos": self.l_pos, "l_scale": self.l_scale,
            "l_opacity": self.l_opacity, "l_pos_d": self.l_pos_d,
            "l_scale_d": self.l_scale_d, "weights": dict(self.weights),
            "weighted_total": self.weighted_total,
            "opacity_loss_form": "mean 0.5*(log(a+eps)+log(1-a+eps)), eps=1e-6",
        }


def regularizer_metrics(position_offsets, log_scales, opacities,
                        residual_positions, residual_log_scales,
                        weights=None) -> RegularizerReport:
    """L2 position/scale terms, Beta opacity term, and their weighted sum.

    Positions and scales are mean squared row norms; the opacity term is the
    Beta(1/2, 1/2) negative log density, which drives opacities toward {0, 1}.
    """
    pos = np.asarray(position_offsets, dtype=np.float64)
    scl = np.asarray(log_scales, dtype=np.float64)
    opa = np.asarray(opacities, dtype=np.float64)
    pos_d = np.asarray(residual_positions, dtype=np.float64)
    scl_d = np.asarray(residual_log_scales, dtype=np.float64)
    n = pos.shape[0]
    for name, arr in (("log_scales", scl), ("opacities", opa),
                      ("residual_positions", pos_d),
                      ("residual_log_scales", scl_d)):
        if arr.shape[0] != n:
            raise ParameterError(f"{name} count does not match position_offsets")

    w = dict(DEFAULT_WEIGHTS)
    if weights:
        w.update(weights)

    l_pos = float(np.mean(np.sum(pos ** 2, axis=1)))
    l_scale = float(np.mean(np.sum(scl ** 2, axis=1)))
    l_opacity = float(np.mean(0.5 * (np.log(opa + _BETA_EPS)
                                     + np.log(1.0 - opa + _BETA_EPS))))
    l_pos_d = float(np.mean(np.sum(pos_d ** 2, axis=1)))
    l_scale_d = float(np.mean(np.sum(scl_d ** 2, axis=1)))
    total = (w["lambda_pos"] * l_pos + w["lambda_scale"] * l_scale
             + w["lambda_opacity"] * l_opacity
             + w["lambda_pos_d"] * l_pos_d + w["lambda_scale_d"] * l_scale_d)
    return RegularizerReport(l_pos=l_pos, l_scale=l_scale, l_opacity=l_opacity,
                             l_pos_d=l_pos_d, l_scale_d=l_scale_d,
                             weights=w, weighted_total=total)
