"""Configuration-driven command line front end.

Subcommands: certify-gap, constants, solve, sweep, validate.  Configuration
is a flat UTF-8 key-value file with dotted sections ("solver.polish_tol =
1e-8"); unknown keys are rejected so typos cannot silently change an
experiment.  All outputs are plain files with floats printed at 17
significant digits; a fixed seed reproduces them byte for byte.

Exit status: 0 on success, 2 when the configured problem violates a
structural hypothesis (no spectral gap at 0, coupling out of range, model
hypothesis failure, stale certification) or the configuration is invalid,
1 on numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, replace
from pathlib import Path


from . import jsonio
from .continuation import SweepPlan, SweepRecord, convergence_report, sweep_rho
from .errors import (CertificationMissingError, ConfigError, HypothesisError,
                     InvalidInputError, LatticeGapError)
from .hardy import (HardyWeight, InequalityConstants, best_hardy_constant,
                    rho_plus)
from .lattice import BoxDomain, write_field
from .nonlinearity import PowerNonlinearity, validate_hypotheses
from .solver import SolverConfig, solve_ground_state
from .spectral import (assemble_operator, bloch_band_edges,
                       checkerboard_potential, constant_potential,
                       spectral_split)

_MAX_SITES = 5000


@dataclass
class RunConfig:
    dimension: int = 3
    radius: int = 4
    potential_kind: str = "checkerboard"
    amplitude: float = 1.0
    potential_shift: float | None = None
    nonlinearity_kind: str = "power"
    p: float = 4.0
    hardy_metric: str = "euclidean"
    rho_mode: str = "fraction"
    rho_values: tuple[float, ...] = (0.0,)
    bloch_grid: int = 8
    seed: int = 0
    threads: int = 1
    out_dir: str = "out"
    solver: SolverConfig = None

    def potential(self):
        if self.potential_kind == "checkerboard":
            return checkerboard_potential(self.dimension, self.amplitude,
                                          self.potential_shift)
        return constant_potential(self.dimension,
                                  0.0 if self.potential_shift is None
                                  else self.potential_shift)

    def potential_fingerprint(self) -> dict:
        shift = self.potential_shift
        if shift is None and self.potential_kind == "checkerboard":
            shift = -2.0 * self.dimension
        return {"kind": self.potential_kind, "amplitude": self.amplitude,
                "shift": 0.0 if shift is None else float(shift),
                "dimension": self.dimension}

    def box(self) -> BoxDomain:
        if self.radius < 2:
            raise ConfigError(f"box.radius must be >= 2, got {self.radius}")
        box = BoxDomain(self.dimension, self.radius)
        if box.site_count > _MAX_SITES:
            raise ConfigError(
                f"box has {box.site_count} sites, above the budget of {_MAX_SITES}")
        return box

    def model(self):
        return PowerNonlinearity(self.p)

    def weight(self) -> HardyWeight:
        return HardyWeight(self.hardy_metric)


def _parse_scalar(caster, key, raw):
    try:
        return caster(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r} ({exc})") from exc


def _parse_float_list(raw: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in raw.replace(",", " ").split())


_KEYS = {
    "dimension": int,
    "box.radius": int,
    "potential.kind": str,
    "potential.amplitude": float,
    "potential.shift": float,
    "nonlinearity.kind": str,
    "nonlinearity.p": float,
    "hardy.metric": str,
    "rho.mode": str,
    "rho.values": _parse_float_list,
    "bloch.grid": int,
    "seed": int,
    "threads": int,
    "output.dir": str,
    "solver.inner_tol": float,
    "solver.outer_tol": float,
    "solver.polish_tol": float,
    "solver.polish_entry": float,
    "solver.max_inner": int,
    "solver.max_outer": int,
    "solver.max_polish": int,
    "solver.newton_switch": float,
    "solver.multistart": int,
    "solver.certificate_samples": int,
    "solver.certificate_tol": float,
    "solver.max_boundary_mass": float,
    "solver.boundary_layers": int,
}


def parse_config(path) -> RunConfig:
    """Strict parse of a flat "key = value" file; unknown keys are errors."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, raw = stripped.partition("=")
        key, raw = key.strip(), raw.strip()
        if key not in _KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        if key in values:
            raise ConfigError(f"{path}:{lineno}: duplicate config key {key!r}")
        values[key] = _parse_scalar(_KEYS[key], key, raw)

    cfg = RunConfig()
    cfg.dimension = values.get("dimension", cfg.dimension)
    cfg.radius = values.get("box.radius", cfg.radius)
    cfg.potential_kind = values.get("potential.kind", cfg.potential_kind)
    cfg.amplitude = values.get("potential.amplitude", cfg.amplitude)
    cfg.potential_shift = values.get("potential.shift", cfg.potential_shift)
    cfg.nonlinearity_kind = values.get("nonlinearity.kind", cfg.nonlinearity_kind)
    cfg.p = values.get("nonlinearity.p", cfg.p)
    cfg.hardy_metric = values.get("hardy.metric", cfg.hardy_metric)
    cfg.rho_mode = values.get("rho.mode", cfg.rho_mode)
    cfg.rho_values = values.get("rho.values", cfg.rho_values)
    cfg.bloch_grid = values.get("bloch.grid", cfg.bloch_grid)
    cfg.seed = values.get("seed", cfg.seed)
    cfg.threads = values.get("threads", cfg.threads)
    cfg.out_dir = values.get("output.dir", cfg.out_dir)

    if cfg.dimension < 1:
        raise ConfigError(f"dimension must be >= 1, got {cfg.dimension}")
    if cfg.potential_kind not in ("checkerboard", "constant"):
        raise ConfigError(f"unknown potential.kind {cfg.potential_kind!r}")
    if cfg.potential_kind == "constant" and "potential.amplitude" in values:
        raise ConfigError("potential.amplitude is not used by the constant potential")
    if cfg.nonlinearity_kind != "power":
        raise ConfigError(f"unknown nonlinearity.kind {cfg.nonlinearity_kind!r}")
    if not cfg.p > 2:
        raise ConfigError(f"nonlinearity.p must be > 2, got {cfg.p}")
    if cfg.hardy_metric not in ("euclidean", "graph"):
        raise ConfigError(f"unknown hardy.metric {cfg.hardy_metric!r}")
    if cfg.rho_mode not in ("fraction", "absolute"):
        raise ConfigError(f"rho.mode must be fraction or absolute, got {cfg.rho_mode!r}")
    if cfg.threads < 1:
        raise ConfigError(f"threads must be >= 1, got {cfg.threads}")

    solver_kwargs = {key.split(".", 1)[1]: val for key, val in values.items()
                     if key.startswith("solver.")}
    try:
        cfg.solver = SolverConfig(seed=cfg.seed, **solver_kwargs)
    except InvalidInputError as exc:
        raise ConfigError(f"bad solver settings: {exc}") from exc
    return cfg


def _hardy_commands_need_n3(cfg: RunConfig):
    if cfg.dimension < 3:
        raise ConfigError(
            f"Hardy-dependent commands require dimension >= 3, got {cfg.dimension}")


def _write_json(out: Path, name: str, obj) -> Path:
    path = out / name
    jsonio.dump(obj, path)
    return path


def _certify(cfg: RunConfig, out: Path, write_bands: bool):
    """Band table + box split; writes gap.json (and bands.csv for certify-gap)."""
    table = bloch_band_edges(cfg.potential(), grid=cfg.bloch_grid,
                             threads=cfg.threads)
    box = cfg.box()
    operator = assemble_operator(box, cfg.potential())
    split = spectral_split(box, operator, table.gap)
    if write_bands:
        table.to_csv(out / "bands.csv")
    payload = {"potential": cfg.potential_fingerprint(),
               "box_radius": cfg.radius, "grid": cfg.bloch_grid,
               "sigma_minus": table.sigma_minus, "sigma_plus": table.sigma_plus,
               "intrusions": split.intrusions,
               "smallest_abs_eigenvalue": split.smallest_abs_eigenvalue}
    _write_json(out, "gap.json", payload)
    return table, split


def _ensure_split(cfg: RunConfig, out: Path):
    """Reuse a matching gap.json or certify inline; stale files are an error."""
    path = out / "gap.json"
    if path.exists():
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise CertificationMissingError(
                f"unreadable gap.json ({exc}); re-run certify-gap") from exc
        if (data.get("potential") != cfg.potential_fingerprint()
                or data.get("box_radius") != cfg.radius):
            raise CertificationMissingError(
                "gap.json does not match this configuration; re-run certify-gap")
        box = cfg.box()
        operator = assemble_operator(box, cfg.potential())
        return spectral_split(box, operator,
                              (data["sigma_minus"], data["sigma_plus"]))
    _, split = _certify(cfg, out, write_bands=False)
    return split


def _ensure_constants(cfg: RunConfig, out: Path, split) -> InequalityConstants:
    path = out / "constants.json"
    fingerprint = {"potential": cfg.potential_fingerprint(), "R": cfg.radius,
                   "metric": cfg.hardy_metric}
    if path.exists():
        data = json.loads(path.read_text(encoding="utf-8"))
        if data.get("fingerprint") == json.loads(jsonio.dumps(fingerprint)):
            return InequalityConstants(
                dimension=data["N"], radius=data["R"], kappa=data["kappa"],
                rho_plus=data["rho_plus"], rho_tilde_plus=data["rho_tilde_plus"],
                rho_max=data["rho_max"], metric=data["metric"])
        raise CertificationMissingError(
            "constants.json does not match this configuration; re-run constants")
    return _compute_constants(cfg, out, split, fingerprint)


def _compute_constants(cfg, out, split, fingerprint) -> InequalityConstants:
    weight = cfg.weight()
    hardy = best_hardy_constant(split.box, weight)
    rp = rho_plus(split)
    tilde = min(rp.value, 1.0)
    constants = InequalityConstants(
        dimension=cfg.dimension, radius=cfg.radius, kappa=hardy.kappa,
        rho_plus=rp.value, rho_tilde_plus=tilde, rho_max=tilde / hardy.kappa,
        metric=cfg.hardy_metric)
    write_field(hardy.witness, out / "kappa_witness.field")
    write_field(rp.witness, out / "rho_plus_witness.field")
    payload = constants.to_dict()
    payload["witnesses"] = {"kappa": "kappa_witness.field",
                            "rho_plus": "rho_plus_witness.field"}
    payload["fingerprint"] = fingerprint
    _write_json(out, "constants.json", payload)
    return constants


def _resolve_rhos(cfg: RunConfig, constants) -> tuple[float, ...]:
    if cfg.rho_mode == "absolute":
        return cfg.rho_values
    return tuple(f * constants.rho_max if f > 0 else 0.0 for f in cfg.rho_values)


def _needs_constants(cfg: RunConfig) -> bool:
    # any positive coupling needs rho_max, both for fraction resolution and
    # for the admissibility check
    return any(r > 0 for r in cfg.rho_values)


def cmd_certify_gap(cfg: RunConfig, out: Path) -> int:
    _certify(cfg, out, write_bands=True)
    return 0


def cmd_constants(cfg: RunConfig, out: Path) -> int:
    _hardy_commands_need_n3(cfg)
    split = _ensure_split(cfg, out)
    _ensure_constants(cfg, out, split)
    return 0


def cmd_validate(cfg: RunConfig, out: Path) -> int:
    report = validate_hypotheses(cfg.model())
    _write_json(out, "hypothesis_report.json", report.to_dict())
    return 0


def _record_line(record: dict) -> str:
    parts = [f'"{k}": ' + (f"{v:.17g}" if isinstance(v, float) else str(v))
             for k, v in record.items()]
    return "{" + ", ".join(parts) + "}"


def cmd_solve(cfg: RunConfig, out: Path) -> int:
    _hardy_commands_need_n3(cfg)
    if len(cfg.rho_values) != 1:
        raise ConfigError("solve needs exactly one rho value")
    split = _ensure_split(cfg, out)
    constants = None
    if _needs_constants(cfg):
        constants = _ensure_constants(cfg, out, split)
    rho = _resolve_rhos(cfg, constants)[0] if constants is not None \
        else cfg.rho_values[0]
    result = solve_ground_state(split, cfg.model(), rho, cfg.solver,
                                weight=cfg.weight(), constants=constants)
    write_field(result.u, out / "solution.field")
    with open(out / "run_log.jsonl", "w", encoding="utf-8") as fh:
        for record in result.trace:
            fh.write(_record_line(record) + "\n")
    _write_json(out, "solve_summary.json", {
        "rho": rho, "c_rho": result.c_rho,
        "residual_full": result.residual_full,
        "residual_along_u": result.residual_along_u,
        "residual_along_minus": result.residual_along_minus,
        "outer_iterations": result.outer_iterations,
        "polish_iterations": result.polish_iterations,
        "start_index": result.start_index,
        "recenter_shift": [int(s) for s in result.recenter_shift]})
    return 0


def _write_sweep_csv(records: list[SweepRecord], dimension: int, path) -> None:
    shift_cols = ",".join(f"shift_x{i + 1}" for i in range(dimension))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"rho,c_rho,residual,{shift_cols},d_to_baseline,sum_G\n")
        for r in records:
            shift = ",".join(str(int(s)) for s in r.shift)
            fh.write(f"{r.rho:.17g},{r.c_rho:.17g},{r.residual_full:.17g},"
                     f"{shift},{r.d_to_baseline:.17g},{r.sum_G:.17g}\n")


def cmd_sweep(cfg: RunConfig, out: Path) -> int:
    _hardy_commands_need_n3(cfg)
    split = _ensure_split(cfg, out)
    constants = None
    if _needs_constants(cfg):
        constants = _ensure_constants(cfg, out, split)
    rhos = _resolve_rhos(cfg, constants) if constants is not None else cfg.rho_values
    plan = SweepPlan(rho_values=rhos)
    records = sweep_rho(plan, split, cfg.model(), cfg.solver,
                        weight=cfg.weight(), constants=constants)
    _write_sweep_csv(records, cfg.dimension, out / "sweep.csv")
    write_field(records[-1].field, out / "baseline.field")
    report = convergence_report(records[:-1], records[-1])
    _write_json(out, "report.json", report)
    return 0


_COMMANDS = {
    "certify-gap": cmd_certify_gap,
    "constants": cmd_constants,
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="latticegap",
        description="Ground states of gapped discrete Schrodinger equations "
                    "with Hardy weights")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="path to the run config")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    args = parser.parse_args(argv)
    try:
        cfg = parse_config(args.config)
        if args.threads is not None:
            if args.threads < 1:
                raise ConfigError(f"threads must be >= 1, got {args.threads}")
            cfg.threads = args.threads
        if args.seed is not None:
            cfg.seed = args.seed
            cfg.solver = replace(cfg.solver, seed=args.seed)
        out = Path(args.out if args.out is not None else cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](cfg, out)
    except (ConfigError, HypothesisError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except LatticeGapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
