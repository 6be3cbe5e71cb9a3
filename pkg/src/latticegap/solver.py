"""Ground-state computation by the reduced min-max.

For each unit direction w in X^+ the energy is maximized over the slab
R+ w (+) X^- (the inner problem); the resulting reduced value is then
minimized over the unit sphere of X^+ (the outer problem); a damped Newton
iteration on the full gradient polishes the incumbent to the final
residual.  The inner maximizer is not assumed unique: a sampled
perturbation certificate replaces the uniqueness assumption.

All solver internals work in eigencoordinates of the split, where the
equivalent norm is diagonal (||u||^2 = sum |lambda_i| c_i^2) and the
positive/negative projections are index slices.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .energy import evaluate_energy, nehari_residual
from .errors import (ConvergenceError, DegenerateProblemError,
                     InvalidInputError, ModelHypothesisError,
                     PostConditionError, RhoOutOfRangeError,
                     SingularJacobianError)
from .hardy import EUCLIDEAN_WEIGHT, HardyWeight, compute_constants
from .lattice import LatticeField
from .nonlinearity import Nonlinearity, validate_hypotheses
from .spectral import SpectralSplit


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances, iteration caps and multistart policy."""

    inner_tol: float = 1e-10      # projected gradient norm of the inner problem
    outer_tol: float = 1e-5       # full gradient norm before polishing
    polish_tol: float = 1e-8      # final ||J'(u)||_2 <= polish_tol (1 + ||u||_2)
    polish_entry: float = 1e-2    # largest residual accepted by the polisher
    max_inner: int = 2000
    max_outer: int = 400
    max_polish: int = 60
    newton_switch: float = 1e-3   # inner residual at which Newton acceleration starts
    armijo: float = 1e-4
    backtrack_shrink: float = 0.5
    max_backtracks: int = 50
    multistart: int = 5
    seed: int = 0
    certify: bool = True
    certificate_samples: int = 200
    certificate_tol: float = 1e-6
    validate_model: bool = True
    t_cap: float = 1e6            # scalar growth beyond this flags a degenerate direction
    # Dirichlet walls support boundary-pinned critical points below the bulk
    # soliton level; a threshold on the squared-mass fraction in the outer
    # layers restricts the search to interior states (None = box-global).
    max_boundary_mass: float | None = None
    boundary_layers: int = 1

    def __post_init__(self):
        for name in ("inner_tol", "outer_tol", "polish_tol"):
            if getattr(self, name) <= 0:
                raise InvalidInputError(f"{name} must be > 0")
        if self.inner_tol > self.outer_tol:
            raise InvalidInputError("inner_tol must be <= outer_tol")
        if self.multistart < 1:
            raise InvalidInputError("multistart must be >= 1")


@dataclass
class InnerMaxState:
    """Maximizer of the energy over R+ w (+) X^- for a unit w in X^+."""

    w: LatticeField
    t: float
    v: LatticeField
    value: float
    grad_norm: float
    iterations: int
    degenerate: bool = False
    reason: str | None = None
    certified: bool | None = None
    # eigencoordinates kept for warm starts
    _wp: np.ndarray | None = None
    _vm: np.ndarray | None = None


@dataclass
class GroundStateResult:
    """Converged ground state with its level and exit diagnostics."""

    u: LatticeField
    c_rho: float
    residual_full: float
    residual_along_u: float
    residual_along_minus: float
    outer_iterations: int
    inner_iterations: int
    polish_iterations: int
    start_index: int
    recenter_shift: tuple[int, ...]
    trace: list[dict] = dataclass_field(default_factory=list)
    polish_residuals: list[float] = dataclass_field(default_factory=list)
    diagnostics: dict = dataclass_field(default_factory=dict)


class _Workspace:
    """Cached arrays for energy evaluations in eigencoordinates."""

    def __init__(self, split: SpectralSplit, model: Nonlinearity, rho: float,
                 weight: HardyWeight):
        self.split = split
        self.model = model
        self.rho = float(rho)
        self.E = split.eigenvectors
        self.lam = split.eigenvalues
        self.abs_lam = split.abs_eigenvalues
        self.nneg = split.negative_count
        self.sites = split.box.sites
        self.w = weight.on_box(split.box) if rho > 0 else None

    def embed(self, t: float, wp: np.ndarray, vm: np.ndarray) -> np.ndarray:
        coords = np.empty(self.lam.size)
        coords[:self.nneg] = vm
        coords[self.nneg:] = t * wp
        return coords

    def site_values(self, coords: np.ndarray) -> np.ndarray:
        return self.E @ coords

    def value(self, coords: np.ndarray, u: np.ndarray | None = None) -> float:
        if u is None:
            u = self.site_values(coords)
        out = 0.5 * float(np.sum(self.lam * coords ** 2))
        out -= float(np.sum(self.model.F(u, self.sites)))
        if self.rho > 0:
            out -= 0.5 * self.rho * float(np.sum(self.w * u * u))
        return out

    def grad(self, coords: np.ndarray, u: np.ndarray | None = None) -> np.ndarray:
        if u is None:
            u = self.site_values(coords)
        r = self.model.f(u, self.sites)
        if self.rho > 0:
            r = r + self.rho * self.w * u
        return self.lam * coords - self.E.T @ r

    def hess_diag_site(self, u: np.ndarray) -> np.ndarray:
        d = self.model.df(u, self.sites)
        if self.rho > 0:
            d = d + self.rho * self.w
        return np.asarray(d, dtype=float)

    def hess_mv(self, d_site: np.ndarray, dcoords: np.ndarray) -> np.ndarray:
        du = self.E @ dcoords
        return self.lam * dcoords - self.E.T @ (d_site * du)


def unit_plus_direction(split: SpectralSplit, seed_field: LatticeField) -> LatticeField:
    """Project a field onto X^+ and normalize it in the equivalent norm."""
    coords = split.to_coords(seed_field)
    coords[:split.negative_count] = 0.0
    norm = np.sqrt(np.sum(split.abs_eigenvalues * coords ** 2))
    if norm < 1e-14:
        raise InvalidInputError("field has no X^+ component to normalize")
    return split.from_coords(coords / norm)


def boundary_mass_fraction(box, values: np.ndarray, layers: int = 1) -> float:
    """Fraction of the squared mass sitting within `layers` of the box walls."""
    outer = np.max(np.abs(box.sites), axis=1) > box.radius - layers
    total = float(np.sum(values ** 2))
    return float(np.sum(values[outer] ** 2)) / total if total > 0 else 0.0


def _inner_residual(t, gt, gv):
    along_t = abs(gt) if t > 0.0 else max(gt, 0.0)
    return max(along_t, float(np.linalg.norm(gv)))


def _inner_core(ws: _Workspace, wp: np.ndarray, t: float, vm: np.ndarray,
                cfg: SolverConfig):
    """Maximize value over (t >= 0, vm).  Returns (t, vm, value, res, iters, reason)."""
    nneg = ws.nneg
    coords = ws.embed(t, wp, vm)
    u = ws.site_values(coords)
    val = ws.value(coords, u)
    alpha = 1.0
    for it in range(cfg.max_inner):
        g = ws.grad(coords, u)
        gt = float(g[nneg:] @ wp)
        gv = g[:nneg]
        res = _inner_residual(t, gt, gv)
        if res <= cfg.inner_tol:
            return t, vm, val, res, it, None
        if t > cfg.t_cap or val > 1e12:
            return t, vm, val, res, it, "unbounded ascent: no superquadratic confinement"
        if t <= 1e-12 and gt <= 0.0 and np.linalg.norm(gv) <= cfg.inner_tol:
            return 0.0, vm, val, res, it, "t collapsed to zero: infeasible direction"

        stepped = False
        if res <= cfg.newton_switch:
            s = _inner_newton_step(ws, wp, coords, u, gt, gv, res)
            if s is not None:
                st, sv = s
                for k in range(cfg.max_backtracks):
                    damp = cfg.backtrack_shrink ** k
                    t_try = max(t + damp * st, 0.0)
                    vm_try = vm + damp * sv
                    c_try = ws.embed(t_try, wp, vm_try)
                    u_try = ws.site_values(c_try)
                    g_try = ws.grad(c_try, u_try)
                    res_try = _inner_residual(
                        t_try, float(g_try[nneg:] @ wp), g_try[:nneg])
                    if res_try < res:
                        t, vm, coords, u = t_try, vm_try, c_try, u_try
                        val = ws.value(coords, u)
                        stepped = True
                        break
        if not stepped:
            # metric-preconditioned ascent with Armijo backtracking
            dt = gt
            dv = gv / ws.abs_lam[:nneg]
            for k in range(cfg.max_backtracks):
                t_try = max(t + alpha * dt, 0.0)
                vm_try = vm + alpha * dv
                pred = gt * (t_try - t) + float(gv @ (vm_try - vm))
                c_try = ws.embed(t_try, wp, vm_try)
                u_try = ws.site_values(c_try)
                val_try = ws.value(c_try, u_try)
                if val_try >= val + cfg.armijo * pred and pred >= 0.0:
                    t, vm, coords, u, val = t_try, vm_try, c_try, u_try, val_try
                    alpha = min(alpha * 1.5, 4.0)
                    stepped = True
                    break
                alpha *= cfg.backtrack_shrink
            if not stepped:
                raise ConvergenceError(
                    f"inner maximization stalled at residual {res:.3e}")
    raise ConvergenceError(
        f"inner maximization exceeded {cfg.max_inner} iterations")


def _inner_newton_step(ws, wp, coords, u, gt, gv, res):
    """Inexact Newton step on the reduced gradient via preconditioned CG.

    Solves (-H_red) s = r for r = (gt, gv); -H_red is positive definite near
    the maximizer for models with nonnegative df.  Returns None when CG hits
    non-positive curvature immediately.
    """
    nneg = ws.nneg
    d_site = ws.hess_diag_site(u)

    def neg_hess(svec):
        st, sv = svec[0], svec[1:]
        dcoords = ws.embed(st, wp, sv)
        hc = ws.hess_mv(d_site, dcoords)
        out = np.empty(svec.size)
        out[0] = hc[nneg:] @ wp
        out[1:] = hc[:nneg]
        return -out

    r = np.empty(1 + nneg)
    r[0] = gt
    r[1:] = gv
    precond = np.empty_like(r)
    precond[0] = 1.0
    precond[1:] = ws.abs_lam[:nneg]
    s = np.zeros_like(r)
    resid = r.copy()
    z = resid / precond
    p = z.copy()
    rz = float(resid @ z)
    target = max(min(0.5, np.sqrt(res)) * np.linalg.norm(r), 1e-300)
    for _ in range(200):
        hp = neg_hess(p)
        curv = float(p @ hp)
        if curv <= 1e-14 * float(p @ p):
            break
        gamma = rz / curv
        s = s + gamma * p
        resid = resid - gamma * hp
        if np.linalg.norm(resid) <= target:
            break
        z = resid / precond
        rz_new = float(resid @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    if float(s @ r) <= 0.0:
        return None
    return float(s[0]), s[1:]


def _certify_inner(ws, wp, t, vm, value, rng, n_samples=50, radius=2.0):
    """Check the maximizer against random (t', v') in a trust box around it."""
    worst = 0.0
    for _ in range(n_samples):
        t_try = max(t + rng.uniform(-radius, radius), 0.0)
        dv = rng.standard_normal(ws.nneg)
        norm = np.sqrt(np.sum(ws.abs_lam[:ws.nneg] * dv ** 2))
        if norm > 0:
            dv *= rng.uniform(0.0, radius) / norm
        val = ws.value(ws.embed(t_try, wp, vm + dv))
        worst = max(worst, val - value)
    return worst <= 1e-9 * (1.0 + abs(value)), worst


def inner_maximize(split: SpectralSplit, model: Nonlinearity, rho: float,
                   w: LatticeField, warm: InnerMaxState | None = None,
                   config: SolverConfig | None = None,
                   weight: HardyWeight = EUCLIDEAN_WEIGHT,
                   certify: bool = False) -> InnerMaxState:
    """Maximize the energy over the slab R+ w (+) X^-.

    `w` must be a unit X^+ field in the equivalent norm.  A degenerate
    direction (scalar part collapsing to 0, or no superquadratic confinement)
    is reported through the state's `degenerate` flag, not raised.
    """
    cfg = config or SolverConfig()
    ws = _Workspace(split, model, rho, weight)
    wc = split.to_coords(w)
    minus = float(np.linalg.norm(wc[:ws.nneg]))
    norm = float(np.sqrt(np.sum(ws.abs_lam * wc ** 2)))
    if minus > 1e-8 * (1.0 + norm):
        raise InvalidInputError(f"w is not in X^+ (minus part {minus:.3e})")
    if abs(norm - 1.0) > 1e-8:
        raise InvalidInputError(f"w must be unit in the equivalent norm, got {norm!r}")
    wp = wc[ws.nneg:]
    if warm is None:
        t0, vm0 = 1.0, np.zeros(ws.nneg)
    elif isinstance(warm, InnerMaxState):
        t0, vm0 = max(float(warm.t), 0.0), warm._vm.copy()
    else:
        t0, v_field = warm
        t0 = max(float(t0), 0.0)
        vm0 = split.to_coords(v_field)[:ws.nneg]
    t, vm, val, res, iters, reason = _inner_core(ws, wp, t0, vm0, cfg)
    if reason is None and t <= 1e-12:
        reason = "t collapsed to zero: infeasible direction"
    if reason is not None:
        # degenerate direction: no interior maximizer; report the origin
        return InnerMaxState(
            w=w, t=0.0, v=split.from_coords(np.zeros(ws.lam.size)),
            value=0.0, grad_norm=res, iterations=iters,
            degenerate=True, reason=reason, _wp=wp, _vm=np.zeros(ws.nneg))
    state = InnerMaxState(
        w=w, t=t, v=split.from_coords(ws.embed(0.0, np.zeros_like(wp), vm)),
        value=val, grad_norm=res, iterations=iters,
        degenerate=False, reason=None, _wp=wp, _vm=vm)
    if certify and not state.degenerate:
        rng = np.random.default_rng(cfg.seed + 977)
        ok, worst = _certify_inner(ws, wp, t, vm, val, rng)
        state.certified = ok
        if not ok:
            raise PostConditionError(
                f"inner maximizer failed its perturbation certificate by {worst:.3e}")
    return state


@dataclass
class _StartResult:
    index: int
    status: str                 # "converged", "stalled", "degenerate", "failed"
    value: float = np.inf
    res_full: float = np.inf
    t: float = 0.0
    wp: np.ndarray | None = None
    vm: np.ndarray | None = None
    outer_iterations: int = 0
    inner_iterations: int = 0
    trace: list = dataclass_field(default_factory=list)
    reason: str | None = None


def _metric_norm_plus(ws, x):
    return float(np.sqrt(np.sum(ws.abs_lam[ws.nneg:] * x ** 2)))


def _outer_single(ws: _Workspace, wp0: np.ndarray, cfg: SolverConfig,
                  index: int, warm=None) -> _StartResult:
    nneg = ws.nneg
    lam_pos = ws.lam[nneg:]
    wp = wp0.copy()
    out = _StartResult(index=index, status="failed")
    try:
        t, vm = warm if warm is not None else (1.0, np.zeros(nneg))
        t, vm, val, _, its, reason = _inner_core(ws, wp, t, vm, cfg)
        out.inner_iterations += its
    except ConvergenceError as exc:
        out.reason = str(exc)
        return out
    if reason is not None:
        out.status, out.reason = "degenerate", reason
        return out

    alpha = 1.0
    for it in range(cfg.max_outer):
        coords = ws.embed(t, wp, vm)
        u = ws.site_values(coords)
        g = ws.grad(coords, u)
        res_full = float(np.linalg.norm(g))
        res_minus = float(np.linalg.norm(g[:nneg]))
        out.trace.append({"iter": it, "level": val, "residual_full": res_full,
                          "residual_minus": res_minus, "t": t})
        out.outer_iterations = it
        out.value, out.res_full, out.t, out.wp, out.vm = val, res_full, t, wp, vm
        if res_full <= cfg.outer_tol * (1.0 + float(np.linalg.norm(coords))):
            out.status = "converged"
            return out

        # Riemannian gradient of the reduced value on the X^+ unit sphere
        d = t * g[nneg:] / lam_pos
        d -= float(np.sum(lam_pos * d * wp)) * wp
        dnorm2 = float(np.sum(lam_pos * d ** 2))
        if dnorm2 <= (1e-14 * max(1.0, abs(val))) ** 2:
            out.status = "stalled"
            return out

        accepted = False
        for _ in range(cfg.max_backtracks):
            wp_try = wp - alpha * d
            norm = _metric_norm_plus(ws, wp_try)
            if norm < 1e-14:
                alpha *= cfg.backtrack_shrink
                continue
            wp_try /= norm
            try:
                t2, vm2, val2, _, its, reason = _inner_core(ws, wp_try, t, vm.copy(), cfg)
                out.inner_iterations += its
            except ConvergenceError:
                alpha *= cfg.backtrack_shrink
                continue
            if reason is not None:
                alpha *= cfg.backtrack_shrink
                continue
            if val2 <= val - cfg.armijo * alpha * dnorm2:
                wp, t, vm, val = wp_try, t2, vm2, val2
                alpha = min(alpha * 1.5, 8.0)
                accepted = True
                break
            alpha *= cfg.backtrack_shrink
        if not accepted:
            out.status = "stalled"
            return out
    out.status = "stalled"
    return out


def outer_minimize(split: SpectralSplit, model: Nonlinearity, rho: float,
                   config: SolverConfig | None = None,
                   weight: HardyWeight = EUCLIDEAN_WEIGHT,
                   warm_start: LatticeField | None = None) -> GroundStateResult:
    """Minimize the reduced functional over unit X^+ directions (multistart).

    Returns the least-level candidate before Newton polishing.  Ties within
    1e-10 are broken by the smaller l2 norm.  Raises DegenerateProblemError
    when every start collapses.
    """
    cfg = config or SolverConfig()
    ws = _Workspace(split, model, rho, weight)
    npos = split.positive_count
    starts: list[tuple[np.ndarray, tuple | None]] = []
    if warm_start is not None:
        coords = split.to_coords(warm_start)
        wp = coords[ws.nneg:]
        t0 = _metric_norm_plus(ws, wp)
        if t0 < 1e-12:
            raise InvalidInputError("warm start has no X^+ component")
        starts.append((wp / t0, (t0, coords[:ws.nneg].copy())))
    else:
        # deterministic starts: lowest positive eigenvector, and the X^+
        # part of a centered bump (biases one basin toward interior states)
        lowest = np.zeros(npos)
        lowest[0] = 1.0 / np.sqrt(ws.abs_lam[ws.nneg])
        starts.append((lowest, None))
        if cfg.multistart >= 2:
            origin = split.box.index_of(np.zeros(split.box.dimension, dtype=int))
            bump = ws.E[origin, ws.nneg:].copy()
            starts.append((bump / _metric_norm_plus(ws, bump), None))
        rng = np.random.default_rng(cfg.seed)
        for _ in range(cfg.multistart - 2):
            wp = rng.standard_normal(npos)
            starts.append((wp / _metric_norm_plus(ws, wp), None))

    results = [_outer_single(ws, wp, cfg, i, warm)
               for i, (wp, warm) in enumerate(starts)]
    usable = [r for r in results if r.status in ("converged", "stalled")]
    boundary = {}
    if cfg.max_boundary_mass is not None:
        for r in usable:
            values = ws.site_values(ws.embed(r.t, r.wp, r.vm))
            boundary[r.index] = boundary_mass_fraction(
                split.box, values, cfg.boundary_layers)
        interior = [r for r in usable if boundary[r.index] <= cfg.max_boundary_mass]
        if not interior:
            raise ConvergenceError(
                "every candidate is boundary-localized (mass fractions "
                + ", ".join(f"{boundary[r.index]:.2e}" for r in usable)
                + f" all above {cfg.max_boundary_mass}); increase the box radius")
        usable = interior
    if not usable:
        if all(r.status == "degenerate" for r in results):
            raise DegenerateProblemError("degenerate: no nontrivial critical point")
        raise ConvergenceError(
            "no start converged: " + "; ".join(r.reason or r.status for r in results))

    def l2_of(r):
        return float(np.linalg.norm(ws.embed(r.t, r.wp, r.vm)))

    best = min(usable, key=lambda r: (round(r.value / 1e-10), l2_of(r)))
    coords = ws.embed(best.t, best.wp, best.vm)
    u = split.from_coords(coords)
    g = ws.grad(coords)
    levels = sorted(r.value for r in usable)
    distinct = bool(levels and (levels[-1] - levels[0]) >
                    1e-6 * max(1.0, abs(levels[0])))
    # translation-family diagnostic: candidates at the same level should
    # agree in l2 after recentering; a mismatch is flagged, never failed
    # (box ground states need not be unique, even up to translation)
    family_gap = 0.0
    if len(usable) > 1:
        from .continuation import recenter
        centered = [recenter(split.from_coords(ws.embed(r.t, r.wp, r.vm)))[0].values
                    for r in usable
                    if abs(r.value - best.value) <= 1e-6 * max(1.0, abs(best.value))]
        for i in range(len(centered)):
            for j in range(i + 1, len(centered)):
                family_gap = max(family_gap, float(np.linalg.norm(
                    centered[i] - centered[j])))
    return GroundStateResult(
        u=u, c_rho=best.value,
        residual_full=float(np.linalg.norm(g)),
        residual_along_u=float(g @ coords),
        residual_along_minus=float(np.linalg.norm(g[:ws.nneg])),
        outer_iterations=best.outer_iterations,
        inner_iterations=best.inner_iterations,
        polish_iterations=0, start_index=best.index,
        recenter_shift=(0,) * split.box.dimension,
        trace=best.trace,
        diagnostics={
            "start_levels": [None if r.status not in ("converged", "stalled")
                             else r.value for r in results],
            "start_statuses": [r.status for r in results],
            "start_boundary_mass": {str(k): v for k, v in boundary.items()},
            "distinct_levels_flag": distinct,
            "translation_family_gap": family_gap,
            "translation_family_flag": bool(family_gap > 1e-4),
        })


def _polish_core(split, model, rho, values, cfg, weight):
    ws_w = weight.on_box(split.box) if rho > 0 else None
    sites = split.box.sites
    A = split.operator

    def grad_site(u):
        r = A @ u - model.f(u, sites)
        if rho > 0:
            r = r - rho * ws_w * u
        return r

    u = values.copy()
    r = grad_site(u)
    rn = float(np.linalg.norm(r))
    if rn > cfg.polish_entry * (1.0 + float(np.linalg.norm(u))):
        raise InvalidInputError(
            f"residual {rn:.3e} too large for local Newton polishing")
    history = [rn]
    fails = 0
    for it in range(cfg.max_polish):
        if rn <= cfg.polish_tol * (1.0 + float(np.linalg.norm(u))):
            return u, history, it
        d = model.df(u, sites)
        if rho > 0:
            d = d + rho * ws_w
        jac = (A - sp.diags(np.asarray(d, dtype=float))).tocsc()
        try:
            delta = spla.splu(jac).solve(-r)
        except RuntimeError as exc:
            raise SingularJacobianError(f"polish Jacobian singular: {exc}") from exc
        best = None
        for k in range(10):
            s = 0.5 ** k
            u_try = u + s * delta
            r_try = grad_site(u_try)
            rn_try = float(np.linalg.norm(r_try))
            if best is None or rn_try < best[0]:
                best = (rn_try, u_try, r_try)
            if rn_try < rn:
                break
        if best[0] >= rn:
            fails += 1
            if fails >= 10:
                raise ConvergenceError(
                    f"Newton polish diverged: residual stuck at {rn:.3e}")
        else:
            fails = 0
        rn, u, r = best
        history.append(rn)
    if rn <= cfg.polish_tol * (1.0 + float(np.linalg.norm(u))):
        return u, history, cfg.max_polish
    raise ConvergenceError(
        f"Newton polish exceeded {cfg.max_polish} iterations (residual {rn:.3e})")


def polish_newton(split: SpectralSplit, model: Nonlinearity, rho: float,
                  u0: LatticeField, config: SolverConfig | None = None,
                  weight: HardyWeight = EUCLIDEAN_WEIGHT) -> GroundStateResult:
    """Damped Newton on the full gradient from a near-critical start.

    The Jacobian is A - rho W - diag(df(., u)); steps are damped by halving
    until the residual decreases.  Starting at an exact solution returns the
    input unchanged after zero iterations.
    """
    cfg = config or SolverConfig()
    if u0.box != split.box:
        raise InvalidInputError("field box does not match the split's box")
    values, history, iters = _polish_core(split, model, rho, u0.values, cfg, weight)
    u = LatticeField(split.box, values)
    res = nehari_residual(split, model, u, rho, weight)
    return GroundStateResult(
        u=u, c_rho=evaluate_energy(split, model, u, rho, weight).value,
        residual_full=res.full,
        residual_along_u=res.along_u,
        residual_along_minus=res.along_minus,
        outer_iterations=0, inner_iterations=0, polish_iterations=iters,
        start_index=-1, recenter_shift=(0,) * split.box.dimension,
        polish_residuals=history)


def maximality_certificate(split: SpectralSplit, model: Nonlinearity,
                           u: LatticeField, rho: float, n_samples: int = 200,
                           seed: int = 0, tol: float = 1e-6,
                           t_range: tuple[float, float] = (0.0, 3.0),
                           v_scale: float = 3.0,
                           weight: HardyWeight = EUCLIDEAN_WEIGHT):
    """Sampled check that J(u) >= J(t u + v) - tol over the slab through u.

    Returns (ok, worst_excess).  At a Nehari point the inequality holds for
    every t >= 0 and v in X^-.
    """
    ws = _Workspace(split, model, rho, weight)
    cu = split.to_coords(u)
    base = ws.value(cu)
    unorm = float(np.sqrt(np.sum(ws.abs_lam * cu ** 2)))
    rng = np.random.default_rng(seed)
    worst = -np.inf
    for _ in range(n_samples):
        t = rng.uniform(*t_range)
        dv = rng.standard_normal(ws.nneg)
        norm = np.sqrt(np.sum(ws.abs_lam[:ws.nneg] * dv ** 2))
        if norm > 0:
            dv *= rng.uniform(0.0, v_scale * max(unorm, 1.0)) / norm
        coords = t * cu
        coords[:ws.nneg] += dv
        worst = max(worst, ws.value(coords) - base)
    return worst <= tol, worst


def _sampled_sphere_floor(ws: _Workspace, rng, n_samples: int = 50):
    """Rough positive lower level on a small X^+ sphere (sanity floor)."""
    npos = ws.lam.size - ws.nneg
    dirs = rng.standard_normal((n_samples, npos))
    for i in range(n_samples):
        dirs[i] /= _metric_norm_plus(ws, dirs[i])
    radius = 1.0
    for _ in range(40):
        values = [ws.value(ws.embed(radius, d, np.zeros(ws.nneg))) for d in dirs]
        if min(values) > 0.0:
            # one extra halving for margin; the sampled min only estimates the inf
            radius *= 0.5
            values = [ws.value(ws.embed(radius, d, np.zeros(ws.nneg))) for d in dirs]
            if min(values) > 0.0:
                return float(min(values))
        radius *= 0.5
    return 0.0


def solve_ground_state(split: SpectralSplit, model: Nonlinearity, rho: float,
                       config: SolverConfig | None = None,
                       weight: HardyWeight = EUCLIDEAN_WEIGHT,
                       constants=None,
                       warm_start: LatticeField | None = None) -> GroundStateResult:
    """Full pipeline: outer min-max, Newton polish, recentering, exit checks.

    Post-conditions enforced on the returned state: both Nehari residuals at
    the polish tolerance, positive level above the sampled sphere floor, and
    (by default) the sampled maximality certificate.
    """
    cfg = config or SolverConfig()
    if rho < 0:
        raise InvalidInputError(f"rho must be >= 0, got {rho}")
    if cfg.validate_model:
        report = validate_hypotheses(model)
        if not report.all_passed:
            raise ModelHypothesisError(
                "nonlinearity fails hypotheses: " + ", ".join(report.failed_names()))
    if rho > 0:
        if constants is None:
            constants = split._cache.get(("constants", weight.metric))
            if constants is None:
                constants = compute_constants(split, weight)
                split._cache[("constants", weight.metric)] = constants
        cap = 0.9 * constants.rho_max
        if rho > cap * (1.0 + 1e-12):
            raise RhoOutOfRangeError(
                f"rho = {rho} exceeds 0.9 * rho_max = {cap}")

    candidate = outer_minimize(split, model, rho, cfg, weight, warm_start)
    polished = polish_newton(split, model, rho, candidate.u, cfg, weight)

    u, shift = polished.u, (0,) * split.box.dimension
    polish_iters = polished.polish_iterations
    history = polished.polish_residuals
    peak = int(np.argmax(np.abs(u.values)))
    peak_site = split.box.sites[peak]
    if np.any(peak_site != 0):
        from .continuation import recenter
        try:
            moved, shift_arr = recenter(u)
            repolished = polish_newton(split, model, rho, moved, cfg, weight)
            u = repolished.u
            shift = tuple(int(s) for s in shift_arr)
            polish_iters += repolished.polish_iterations
            history = history + repolished.polish_residuals
        except (InvalidInputError, ConvergenceError, SingularJacobianError):
            u, shift = polished.u, (0,) * split.box.dimension

    ws = _Workspace(split, model, rho, weight)
    coords = split.to_coords(u)
    level = evaluate_energy(split, model, u, rho, weight).value
    res = nehari_residual(split, model, u, rho, weight)
    res_full, res_along_u, res_minus = res.full, res.along_u, res.along_minus
    l2 = float(np.linalg.norm(u.values))
    plus_norm = _metric_norm_plus(ws, coords[ws.nneg:])

    problems = []
    if res_full > cfg.polish_tol * (1.0 + l2):
        problems.append(f"full residual {res_full:.3e}")
    if abs(res_along_u) > cfg.polish_tol * (1.0 + l2 ** 2):
        problems.append(f"residual along u {res_along_u:.3e}")
    if res_minus > cfg.polish_tol:
        problems.append(f"residual along X^- {res_minus:.3e}")
    if plus_norm <= 1e-8:
        problems.append("u has no X^+ component")
    if not level > 0.0:
        problems.append(f"level {level!r} not positive")
    bmass = boundary_mass_fraction(split.box, u.values, cfg.boundary_layers)
    if cfg.max_boundary_mass is not None and bmass > cfg.max_boundary_mass:
        problems.append(
            f"boundary mass fraction {bmass:.3e} above {cfg.max_boundary_mass}")
    floor = _sampled_sphere_floor(ws, np.random.default_rng(cfg.seed + 1259))
    if level < 0.5 * floor:
        problems.append(f"level {level:.6e} below half the sphere floor {floor:.6e}")
    certified = None
    if cfg.certify:
        certified, worst = maximality_certificate(
            split, model, u, rho, n_samples=cfg.certificate_samples,
            seed=cfg.seed + 3571, tol=cfg.certificate_tol, weight=weight)
        if not certified:
            problems.append(f"maximality certificate violated by {worst:.3e}")
    if problems:
        raise PostConditionError("not a Nehari point: " + "; ".join(problems))

    diagnostics = dict(candidate.diagnostics)
    diagnostics["sphere_floor"] = floor
    diagnostics["certified"] = certified
    diagnostics["boundary_mass"] = bmass
    return GroundStateResult(
        u=u, c_rho=level, residual_full=res_full,
        residual_along_u=res_along_u, residual_along_minus=res_minus,
        outer_iterations=candidate.outer_iterations,
        inner_iterations=candidate.inner_iterations,
        polish_iterations=polish_iters, start_index=candidate.start_index,
        recenter_shift=shift, trace=candidate.trace,
        polish_residuals=history, diagnostics=diagnostics)
