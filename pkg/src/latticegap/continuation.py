"""Coupling sweep: solve the ground state along a descending list of Hardy
couplings ending at 0, then compare levels and recentered fields against
the rho = 0 baseline.

Two theorem-backed facts are checked downstream: the baseline level
dominates (c_0 >= c_rho for admissible rho > 0), and levels and recentered
ground states converge to the baseline as rho -> 0+.  The superquadratic
density G(x, u) = 1/2 f(x, u) u - F(x, u) ties the level to the solution:
at a critical point J_rho(u) = sum G(x, u).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InvalidInputError, LatticeGapError
from .hardy import EUCLIDEAN_WEIGHT, HardyWeight
from .lattice import LatticeField, translate
from .nonlinearity import Nonlinearity
from .solver import SolverConfig, solve_ground_state
from .spectral import SpectralSplit, split_norm


def superquadratic_mass(model: Nonlinearity, u: LatticeField,
                        sites: np.ndarray | None = None) -> float:
    """sum_x G(x, u) with G = 1/2 f u - F; equals J_rho(u) - 1/2 <J'(u), u>."""
    sites = u.box.sites if sites is None else sites
    vals = u.values
    return float(np.sum(0.5 * model.f(vals, sites) * vals - model.F(vals, sites)))


def recenter(u: LatticeField):
    """Translate u so the maximizer of |u| sits at the origin.

    Ties are broken by the lexicographically smallest maximizing site, which
    is the first one in enumeration order.  Returns (field, shift) with
    result(x) = u(x + shift).
    """
    magnitudes = np.abs(u.values)
    peak = float(magnitudes.max())
    if peak == 0.0:
        raise InvalidInputError("cannot recenter the zero field")
    index = int(np.flatnonzero(magnitudes == peak)[0])
    shift = u.box.sites[index].copy()
    return translate(u, shift), shift


@dataclass(frozen=True)
class SweepPlan:
    """Descending coupling list ending at 0, plus warm-start policy."""

    rho_values: tuple[float, ...]
    box_radii: tuple[int, ...] = ()
    warm_start: bool = True

    def __post_init__(self):
        values = tuple(float(r) for r in self.rho_values)
        if len(values) < 1:
            raise InvalidInputError("sweep plan needs at least one coupling")
        if any(r < 0 for r in values):
            raise InvalidInputError("couplings must be >= 0")
        if values[-1] != 0.0:
            raise InvalidInputError("sweep plan must end at rho = 0")
        if any(a <= b for a, b in zip(values, values[1:])):
            raise InvalidInputError("couplings must be strictly descending")
        object.__setattr__(self, "rho_values", values)


@dataclass
class SweepRecord:
    """One solved coupling: level, residuals, recentering and baseline distance."""

    rho: float
    c_rho: float
    residual_full: float
    residual_along_u: float
    residual_along_minus: float
    shift: tuple[int, ...]
    sum_G: float
    u_norm: float                  # equivalent norm of the solution
    d_to_baseline: float = np.nan  # equivalent-norm distance to the baseline
    d_l2: float = np.nan
    field: LatticeField | None = None

    def to_dict(self) -> dict:
        return {"rho": self.rho, "c_rho": self.c_rho,
                "residual_full": self.residual_full,
                "residual_along_u": self.residual_along_u,
                "residual_along_minus": self.residual_along_minus,
                "shift": list(int(s) for s in self.shift),
                "sum_G": self.sum_G, "u_norm": self.u_norm,
                "d_to_baseline": self.d_to_baseline, "d_l2": self.d_l2}


def sweep_rho(plan: SweepPlan, split: SpectralSplit, model: Nonlinearity,
              config: SolverConfig | None = None,
              weight: HardyWeight = EUCLIDEAN_WEIGHT,
              constants=None) -> list[SweepRecord]:
    """Solve along the plan, warm-starting each coupling from the previous one.

    The final (rho = 0) record is the baseline; distances to it are filled in
    a second pass once it is known.  A failing solve aborts the sweep with
    the partial records attached to the raised error.
    """
    config = config or SolverConfig()
    records: list[SweepRecord] = []
    warm = None
    for rho in plan.rho_values:
        try:
            result = solve_ground_state(
                split, model, rho, config, weight=weight, constants=constants,
                warm_start=warm if plan.warm_start else None)
        except LatticeGapError as exc:
            err = ConvergenceError(f"sweep aborted at rho = {rho}: {exc}")
            err.partial_records = records
            raise err from exc
        warm = result.u
        records.append(SweepRecord(
            rho=rho, c_rho=result.c_rho,
            residual_full=result.residual_full,
            residual_along_u=result.residual_along_u,
            residual_along_minus=result.residual_along_minus,
            shift=result.recenter_shift,
            sum_G=superquadratic_mass(model, result.u),
            u_norm=split_norm(split, result.u),
            field=result.u))
    baseline = records[-1]
    for rec in records:
        diff = LatticeField(split.box, rec.field.values - baseline.field.values)
        rec.d_to_baseline = split_norm(split, diff)
        rec.d_l2 = float(np.linalg.norm(diff.values))
    return records


def convergence_report(records: list[SweepRecord], baseline: SweepRecord,
                       gap_floor: float = 1e-12, slope_flag: float = 0.5,
                       final_gap_frac: float = 0.02,
                       final_dist_frac: float = 0.05,
                       ordering_tol: float = 1e-8) -> dict:
    """Tabulate the sweep against the baseline and fit the level-gap decay.

    The least-squares slope of log|c_rho - c_0| against log rho is reported
    (not asserted); slopes below `slope_flag` are flipped to suspicious.
    Gaps at or below `gap_floor` are excluded from the fit; if fewer than two
    points survive the slope is "indeterminate".
    """
    positive = sorted((r for r in records if r.rho > 0), key=lambda r: -r.rho)
    if len(positive) < 3:
        raise InvalidInputError(
            f"need at least 3 positive-coupling records, got {len(positive)}")
    if baseline.rho != 0.0:
        raise InvalidInputError("baseline record must have rho = 0")
    c0 = baseline.c_rho
    gaps = [abs(r.c_rho - c0) for r in positive]
    usable = [(np.log(r.rho), np.log(g))
              for r, g in zip(positive, gaps) if g > gap_floor]
    if len(usable) >= 2:
        xs, ys = np.array([p[0] for p in usable]), np.array([p[1] for p in usable])
        slope = float(np.polyfit(xs, ys, 1)[0])
        slope_out: float | str = slope
        suspicious = slope < slope_flag
    else:
        slope_out = "indeterminate"
        suspicious = False
    ordering_ok = all(r.c_rho <= c0 + ordering_tol for r in positive)
    diffs = np.diff(gaps)
    gaps_non_increasing = bool(np.all(diffs <= ordering_tol))
    final_gap_ok = gaps[-1] <= final_gap_frac * c0
    final_dist_ok = positive[-1].d_to_baseline <= final_dist_frac * baseline.u_norm
    return {
        "c0": c0,
        "records": [r.to_dict() for r in positive] + [baseline.to_dict()],
        "slope": slope_out,
        "usable_fit_points": len(usable),
        "flags": {
            "level_ordering_ok": ordering_ok,
            "gaps_non_increasing": gaps_non_increasing,
            "final_gap_ok": bool(final_gap_ok),
            "final_distance_ok": bool(final_dist_ok),
            "slope_suspicious": bool(suspicious),
        },
        "thresholds": {
            "gap_floor": gap_floor, "slope_flag": slope_flag,
            "final_gap_frac": final_gap_frac, "final_dist_frac": final_dist_frac,
            "ordering_tol": ordering_tol,
        },
    }
