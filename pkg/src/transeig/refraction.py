"""Refraction-index models and the coefficient bundles the forms need.

Two admissible regimes: "above" (n > 1 everywhere) and "below" (n < 1).
Each model carries a stabilization constant mu chosen so that the
leading coefficient of the broken bending form stays nonnegative:
inv_contrast - mu >= 0 with inv_contrast = 1/(n-1) above, 1/(1-n) below.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

REGIME_ABOVE = "above"  # n > 1
REGIME_BELOW = "below"  # n < 1

_REGIME_MARGIN = 1e-8


class RegimeError(Exception):
    """n(x) leaves its declared regime (crosses or touches 1)."""


@dataclass(frozen=True)
class Coefficients:
    """Pointwise coefficient values used by the bilinear forms.

    lead = inv_contrast - mu multiplies the Laplacian product;
    mass_ratio = n/(n-1) (or n/(1-n)) weights the coupling mass term;
    grad_inv_contrast and grad_mass_ratio feed the product-rule expansion
    of the gradient form (both equal -grad_n/(n-1)^2 above, +grad_n/(1-n)^2
    below).
    """

    n: np.ndarray
    grad_n: np.ndarray
    inv_contrast: np.ndarray
    lead: np.ndarray
    mass_ratio: np.ndarray
    grad_inv_contrast: np.ndarray
    grad_mass_ratio: np.ndarray


@dataclass(frozen=True)
class RefractionModel:
    """n(x) with its gradient, regime tag and stabilization constant."""

    kind: str  # "constant" | "affine" | "custom"
    value: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    regime: str
    mu: float
    params: tuple = field(default=())

    def coefficients_at(self, points: np.ndarray) -> Coefficients:
        return coefficients_at(self, points)


def _sample_extent(value, bbox, resolution=64):
    (x0, x1), (y0, y1) = bbox
    xs = np.linspace(x0, x1, resolution)
    ys = np.linspace(y0, y1, resolution)
    grid = np.array([[x, y] for x in xs for y in ys])
    return value(grid)


def make_model(kind: str, params, mu: Optional[float] = None,
               bbox=((0.0, 1.0), (0.0, 1.0))) -> RefractionModel:
    """Build a refraction model; classify its regime; default mu if omitted.

    kind "constant": params is the scalar n.
    kind "affine": params = (a, b, c) for n = a + b*x1 + c*x2.
    kind "custom": params = (value_fn, gradient_fn), vectorized over (N,2).

    When mu is omitted it defaults to the sampled minimum of 1/(n-1)
    (n > 1) or 1/(1-n) (n < 1) over a 64 x 64 grid on `bbox`.
    """
    if kind == "constant":
        nval = float(params if np.isscalar(params) else params[0])
        value = lambda p: np.full(len(np.atleast_2d(p)), nval)
        gradient = lambda p: np.zeros((len(np.atleast_2d(p)), 2))
        params_t = (nval,)
    elif kind == "affine":
        a, b, c = (float(v) for v in params)
        value = lambda p: a + b * np.atleast_2d(p)[:, 0] + c * np.atleast_2d(p)[:, 1]
        gradient = lambda p: np.tile([b, c], (len(np.atleast_2d(p)), 1))
        params_t = (a, b, c)
    elif kind == "custom":
        value, gradient = params
        params_t = ()
    else:
        raise ValueError(f"unknown refraction kind {kind!r}")

    samples = _sample_extent(value, bbox)
    lo, hi = float(samples.min()), float(samples.max())
    if lo > 1.0 + _REGIME_MARGIN:
        regime = REGIME_ABOVE
        default_mu = float(np.min(1.0 / (samples - 1.0)))
    elif hi < 1.0 - _REGIME_MARGIN:
        regime = REGIME_BELOW
        default_mu = float(np.min(1.0 / (1.0 - samples)))
    else:
        raise RegimeError(f"n(x) range [{lo:.6g}, {hi:.6g}] crosses 1; "
                          "neither regime applies")
    mu = default_mu if mu is None else float(mu)
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    return RefractionModel(kind, value, gradient, regime, mu, params_t)


def coefficients_at(model: RefractionModel, points: np.ndarray) -> Coefficients:
    """Evaluate the coefficient bundle; raise if the regime fails pointwise."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    n = np.asarray(model.value(points), dtype=float)
    grad_n = np.asarray(model.gradient(points), dtype=float)
    if model.regime == REGIME_ABOVE:
        if np.any(n <= 1.0 + _REGIME_MARGIN):
            raise RegimeError(f"n <= 1 at a quadrature point (min {n.min():.6g})")
        inv_contrast = 1.0 / (n - 1.0)
        mass_ratio = n / (n - 1.0)
        dcoef = -1.0 / (n - 1.0) ** 2
    else:
        if np.any(n >= 1.0 - _REGIME_MARGIN):
            raise RegimeError(f"n >= 1 at a quadrature point (max {n.max():.6g})")
        inv_contrast = 1.0 / (1.0 - n)
        mass_ratio = n / (1.0 - n)
        dcoef = 1.0 / (1.0 - n) ** 2
    lead = inv_contrast - model.mu
    if np.any(lead < -1e-12):
        raise RegimeError(f"inv_contrast - mu = {lead.min():.3e} < 0; "
                          "mu is too large for this n(x)")
    grad_coef = grad_n * dcoef[:, None]
    return Coefficients(n, grad_n, inv_contrast, lead, mass_ratio,
                        grad_coef, grad_coef)
