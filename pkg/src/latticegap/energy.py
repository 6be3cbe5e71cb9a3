"""The energy functional, its l2 gradient, and Nehari residuals.

With A = -Delta + V split into X^+ (+) X^-, w the Hardy weight and F the
primitive of the nonlinearity,

    J_rho(u) = 1/2 ||u^+||^2 - 1/2 ||u^-||^2 - 1/2 rho sum w u^2 - sum F(x, u)

where ||.|| is the equivalent norm (|A| u, u)_2.  The Gateaux derivative is
represented in l2 by  A u - rho w u - f(., u).  A field belongs to the
Nehari-Pankov set when its gradient vanishes along u itself and along all
of X^-; ground states minimize J_rho there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, RhoOutOfRangeError
from .hardy import EUCLIDEAN_WEIGHT, HardyWeight, InequalityConstants, weighted_mass
from .lattice import LatticeField
from .nonlinearity import Nonlinearity
from .spectral import SpectralSplit, split_inner


@dataclass(frozen=True)
class EnergyReport:
    """J_rho(u) with its three contributions (value = quadratic - hardy - nonlinear)."""

    value: float
    quadratic: float
    hardy: float
    nonlinear: float


@dataclass(frozen=True)
class NehariResidual:
    """Sizes of the constraint violations defining the Nehari-Pankov set."""

    along_u: float      # <J'(u), u>
    along_minus: float  # || P J'(u) ||_2, X^- component of the gradient
    full: float         # || J'(u) ||_2


def _check(split: SpectralSplit, u: LatticeField, rho: float):
    if u.box != split.box:
        raise InvalidInputError("field box does not match the split's box")
    if rho < 0:
        raise InvalidInputError(f"rho must be >= 0, got {rho}")


def evaluate_energy(split: SpectralSplit, model: Nonlinearity, u: LatticeField,
                    rho: float, weight: HardyWeight = EUCLIDEAN_WEIGHT) -> EnergyReport:
    _check(split, u, rho)
    coords = split.to_coords(u)
    quadratic = 0.5 * float(np.sum(split.eigenvalues * coords ** 2))
    hardy = 0.5 * weighted_mass(u, rho, weight)
    nonlinear = float(np.sum(model.F(u.values, split.box.sites)))
    return EnergyReport(value=quadratic - hardy - nonlinear,
                        quadratic=quadratic, hardy=hardy, nonlinear=nonlinear)


def gradient(split: SpectralSplit, model: Nonlinearity, u: LatticeField,
             rho: float, weight: HardyWeight = EUCLIDEAN_WEIGHT) -> LatticeField:
    """l2 representative of the Gateaux derivative: A u - rho w u - f(., u)."""
    _check(split, u, rho)
    values = split.operator @ u.values - model.f(u.values, split.box.sites)
    if rho > 0:
        values = values - rho * weight.on_box(split.box) * u.values
    return LatticeField(split.box, values)


def nehari_residual(split: SpectralSplit, model: Nonlinearity, u: LatticeField,
                    rho: float, weight: HardyWeight = EUCLIDEAN_WEIGHT) -> NehariResidual:
    _check(split, u, rho)
    grad = gradient(split, model, u, rho, weight)
    coords = split.to_coords(grad)
    return NehariResidual(
        along_u=float(grad.values @ u.values),
        along_minus=float(np.linalg.norm(coords[:split.negative_count])),
        full=float(np.linalg.norm(grad.values)))


def rho_norm_plus(split: SpectralSplit, u_plus: LatticeField, rho: float,
                  constants: InequalityConstants | None = None,
                  weight: HardyWeight = EUCLIDEAN_WEIGHT) -> float:
    """Squared rho-modified norm  ||u||^2 - rho sum w u^2  on X^+.

    The input must lie in X^+ (projection residual below 1e-10).  When the
    box constants are supplied the admissibility bound rho < rho_plus/kappa
    is enforced; the norm is then positive definite.
    """
    _check(split, u_plus, rho)
    coords = split.to_coords(u_plus)
    minus_part = float(np.linalg.norm(coords[:split.negative_count]))
    if minus_part > 1e-10 * (1.0 + float(np.linalg.norm(u_plus.values))):
        raise InvalidInputError(
            f"input is not in X^+ (projection residual {minus_part:.3e})")
    if constants is not None and rho >= constants.rho_plus / constants.kappa:
        raise RhoOutOfRangeError(
            f"rho = {rho} >= rho_plus/kappa = {constants.rho_plus / constants.kappa}")
    return split_inner(split, u_plus, u_plus) - weighted_mass(u_plus, rho, weight)
