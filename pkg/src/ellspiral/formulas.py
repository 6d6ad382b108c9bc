"""
Closed-form dimensions of S_{p,q} and the Hölder-image / profile bounds.

Every function returns a :class:`DimensionValue` carrying the number together
with a label naming the case that produced it.  At a branch boundary the
right-hand branch is used (the case intervals are half-open on the right).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .geometry import SpiralParams


@dataclass(frozen=True)
class DimensionValue:
    value: float
    branch: str

    def __float__(self):
        return self.value


def _theta(theta, closed_right=True):
    theta = float(theta)
    ok = 0.0 <= theta <= 1.0 if closed_right else 0.0 <= theta < 1.0
    if not ok:
        rng = "[0, 1]" if closed_right else "[0, 1)"
        raise DomainError(f"theta must lie in {rng}, got {theta}")
    return theta


def _alpha(alpha, open_right=False):
    alpha = float(alpha)
    ok = 0.0 < alpha < 1.0 if open_right else 0.0 < alpha <= 1.0
    if not ok:
        raise DomainError(f"alpha must lie in (0, {'1)' if open_right else '1]'}, got {alpha}")
    return alpha


def hausdorff_dimension(params: SpiralParams) -> DimensionValue:
    """Countable union of rectifiable turns: Hausdorff and packing dimension 1."""
    return DimensionValue(1.0, "countable-stability")


def intermediate_dimension(params: SpiralParams, theta: float) -> DimensionValue:
    r"""θ-intermediate dimension.

    For p < 1 this is ``(p + q + 2θ(1-p)) / (p + q + θ(1-p))``; for p >= 1 it is 1.
    θ = 0 gives the Hausdorff dimension 1 and θ = 1 the box dimension.
    """
    theta = _theta(theta)
    p, q = params.p, params.q
    if p >= 1.0:
        return DimensionValue(1.0, "p>=1")
    gap = theta * (1.0 - p)
    return DimensionValue((p + q + 2.0 * gap) / (p + q + gap), "p<1")


def box_dimension(params: SpiralParams) -> DimensionValue:
    p, q = params.p, params.q
    if p >= 1.0:
        return DimensionValue(1.0, "p>=1")
    return DimensionValue((2.0 + q - p) / (1.0 + q), "p<1")


def phase_transitions(params: SpiralParams) -> tuple[float, float]:
    """The two non-differentiable points ``(p/(1+q), q/(1+q))`` of the Assouad spectrum."""
    return params.p / (1.0 + params.q), params.q / (1.0 + params.q)


def assouad_spectrum(params: SpiralParams, theta: float) -> DimensionValue:
    """Assouad spectrum for θ in [0, 1).

    Branch 1 (θ < p/(1+q)) depends on whether p < 1; branch 2 interpolates up
    to the second breakpoint q/(1+q), after which the spectrum equals 2.
    """
    theta = _theta(theta, closed_right=False)
    p, q = params.p, params.q
    first, second = phase_transitions(params)
    if theta < first:
        if p < 1.0:
            value = (2.0 + q - p) / ((1.0 + q) * (1.0 - theta))
            return DimensionValue(value, "branch1:p<1")
        value = (p - theta * (p - 1.0)) / (p * (1.0 - theta))
        return DimensionValue(value, "branch1:p>=1")
    if theta < second:
        value = (2.0 + q - theta * (1.0 + q)) / ((1.0 + q) * (1.0 - theta))
        return DimensionValue(value, "branch2")
    return DimensionValue(2.0, "branch3")


def assouad_dimension(params: SpiralParams) -> DimensionValue:
    return DimensionValue(2.0, "maximal")


def holder_image_box_bound(params: SpiralParams, alpha: float, theta: float) -> DimensionValue:
    """Upper bound on the upper θ-intermediate dimension of ``f(S_{p,q})`` for an
    α-Hölder map ``f`` into the plane."""
    alpha = _alpha(alpha)
    theta = _theta(theta)
    if alpha <= 0.5:
        return DimensionValue(2.0, "alpha<=1/2")
    p, q = params.p, params.q
    if p >= 1.0:
        return DimensionValue(1.0 / alpha, "p>=1")
    gap = theta * (1.0 - p)
    return DimensionValue((p + q + 2.0 * gap) / (alpha * (p + q) + gap), "p<1")


def profile_upper_bound(params: SpiralParams, alpha: float, theta: float) -> DimensionValue:
    """Upper bound on the upper 2α-dimension profile of S_{p,q} (requires p <= 1).

    α = 1 is accepted as the continuous extension, which returns the
    θ-intermediate dimension itself.
    """
    if params.p > 1.0:
        raise DomainError(f"profile bound requires p <= 1, got p={params.p}")
    alpha = _alpha(alpha)
    theta = _theta(theta)
    if alpha <= 0.5:
        return DimensionValue(2.0 * alpha, "alpha<=1/2")
    p, q = params.p, params.q
    gap = theta * (1.0 - p)
    value = alpha * (p + q + 2.0 * gap) / (alpha * (p + q) + gap)
    return DimensionValue(value, "alpha=1:extension" if alpha == 1.0 else "1/2<alpha<1")


QUANTITIES = {
    "intermediate": intermediate_dimension,
    "box": box_dimension,
    "assouad_spectrum": assouad_spectrum,
    "assouad": assouad_dimension,
    "hausdorff": hausdorff_dimension,
    "holder_image": holder_image_box_bound,
    "profile": profile_upper_bound,
}


def record(quantity: str, params: SpiralParams, theta=None, alpha=None) -> dict:
    """JSON-ready record ``{p, q, theta?, alpha?, quantity, value, branch}``."""
    fn = QUANTITIES[quantity]
    args = [a for a in (alpha, theta) if a is not None]
    dv = fn(params, *args)
    out = {"p": params.p, "q": params.q}
    if theta is not None:
        out["theta"] = float(theta)
    if alpha is not None:
        out["alpha"] = float(alpha)
    out.update(quantity=quantity, value=dv.value, branch=dv.branch)
    if not math.isfinite(dv.value):
        raise DomainError(f"{quantity} is not finite here")
    return out
