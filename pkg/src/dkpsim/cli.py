"""Batch command-line front end.

Every subcommand reads an optional JSON config (``--config``), applies the
command-line overrides, runs, writes a JSON report into ``--out`` and exits
with 0 when all tolerances pass, 1 when one fails and 2 on usage or config
errors. Identical config and seed give byte-identical reports.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import algebra, evolution, multiparticle, rotation, states, symmetries
from .errors import ConfigError, DKPError, ToleranceFailure

log = logging.getLogger("dkpsim")

SCHEMA_VERSION = 1
EXPERIMENTS = ("verify-algebra", "evolve", "lightcone", "two-particle", "exchange-phase", "symmetries")

DEFAULT_TOLERANCES = {
    "algebra": 1e-14,
    "quasi_norm_drift": 1e-10,
    "mode_grid": 1e-9,
    "leakage": 1e-3,
    "swap": 1e-12,
    "conservation": 1e-12,
    "momentum_drift": 1e-12,
    "symmetry_match": 1e-10,
    "equation_residual": 1e-9,
}


# -- config ---------------------------------------------------------------------------

@dataclass
class GridConfig:
    extents: list = field(default_factory=lambda: [2 * math.pi] * 4)
    points: list = field(default_factory=lambda: [8, 8, 8, 8])


@dataclass
class PotentialConfig:
    kind: str = "none"  # none | constant | cosine
    amplitude: list = field(default_factory=lambda: [0.0, 0.0, 0.0, 0.0])
    q: float = 0.0


@dataclass
class TauConfig:
    dtau: float = 0.05
    steps: int = 10


@dataclass
class LightconeConfig:
    source_width: float = 3.0
    tau: float = 2.0
    t_max: float = 6.0
    t_samples: int = 64
    extent: float = 24.0
    resolutions: list = field(default_factory=lambda: [32, 64, 128])
    target_points: int = 64


@dataclass
class TwoParticleConfig:
    construction: str = "modes"  # modes | jabs
    n_states: int = 10
    modes_per_factor: int = 2
    sign: int = 0  # 0 picks +1 for DKP kinds and -1 for Dirac
    k: str = "1"
    l: str = "1"
    kappa: float = 2.0
    xi: float = 1.0


@dataclass
class SymmetryConfig:
    check: list = field(default_factory=lambda: ["C", "P", "T", "TPC"])
    q: float = 0.7


@dataclass
class ExperimentConfig:
    schema_version: int = SCHEMA_VERSION
    experiment: str = "verify-algebra"
    rep: str = "spin1"
    seed: int = 0
    grid: GridConfig = field(default_factory=GridConfig)
    modes: Optional[dict] = None
    random_modes: int = 3
    potential: PotentialConfig = field(default_factory=PotentialConfig)
    tau: TauConfig = field(default_factory=TauConfig)
    lightcone: LightconeConfig = field(default_factory=LightconeConfig)
    two_particle: TwoParticleConfig = field(default_factory=TwoParticleConfig)
    symmetries: SymmetryConfig = field(default_factory=SymmetryConfig)
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    out: str = "out"

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        return _build(cls, d, "config")

    def tol(self, name: str, scale: float = 1.0) -> float:
        return float(self.tolerances[name]) * scale


def _build(cls, d, where: str):
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected an object, got {type(d).__name__}")
    known = {f.name: f for f in dataclasses.fields(cls)}
    unknown = set(d) - set(known)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    kwargs = {}
    for name, value in d.items():
        f = known[name]
        default = f.default_factory() if f.default_factory is not dataclasses.MISSING else f.default
        if dataclasses.is_dataclass(default):
            kwargs[name] = _build(type(default), value, f"{where}.{name}")
        else:
            kwargs[name] = value
    cfg = cls(**kwargs)
    _validate(cfg, where)
    return cfg


def _validate(cfg, where: str) -> None:
    if isinstance(cfg, ExperimentConfig):
        if cfg.schema_version != SCHEMA_VERSION:
            raise ConfigError(f"{where}: schema_version {cfg.schema_version} is not {SCHEMA_VERSION}")
        if cfg.experiment not in EXPERIMENTS:
            raise ConfigError(f"{where}: unknown experiment {cfg.experiment!r}")
        if cfg.rep not in {k.value for k in algebra.Kind}:
            raise ConfigError(f"{where}: unknown rep {cfg.rep!r}")
        if not isinstance(cfg.seed, int):
            raise ConfigError(f"{where}: seed must be an integer")
        unknown = set(cfg.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ConfigError(f"{where}: unknown tolerances {sorted(unknown)}")
        cfg.tolerances = {**DEFAULT_TOLERANCES, **cfg.tolerances}
    elif isinstance(cfg, GridConfig):
        if len(cfg.extents) != 4 or len(cfg.points) != 4:
            raise ConfigError(f"{where}: extents and points need four entries")
    elif isinstance(cfg, PotentialConfig):
        if cfg.kind not in ("none", "constant", "cosine"):
            raise ConfigError(f"{where}: unknown potential kind {cfg.kind!r}")
        if len(cfg.amplitude) != 4:
            raise ConfigError(f"{where}: amplitude needs four entries")
    elif isinstance(cfg, TauConfig):
        if not isinstance(cfg.steps, int) or cfg.steps < 0:
            raise ConfigError(f"{where}: steps must be a non-negative integer")
    elif isinstance(cfg, TwoParticleConfig):
        if cfg.construction not in ("modes", "jabs"):
            raise ConfigError(f"{where}: construction must be 'modes' or 'jabs'")
        if cfg.sign not in (-1, 0, 1):
            raise ConfigError(f"{where}: sign must be -1, 0 or 1")


def load_config(path: Optional[str]) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    try:
        text = Path(path).read_text()
        data = json.loads(text)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    try:
        return ExperimentConfig.from_dict(data)
    except TypeError as exc:
        raise ConfigError(f"config {path}: {exc}") from exc


# -- output helpers ------------------------------------------------------------------------

def _clean(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path: Path, obj: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n")


def write_array(path: Path, data: np.ndarray, component_order: list) -> None:
    """Little-endian complex128 array plus a JSON sidecar ``<name>.json``."""
    path.parent.mkdir(parents=True, exist_ok=True)
    arr = np.ascontiguousarray(data, dtype="<c16")
    path.write_bytes(arr.tobytes())
    write_json(path.with_suffix(path.suffix + ".json"),
               {"dims": list(arr.shape), "dtype": "<c16", "component_order": component_order})


def read_array(path: Path) -> np.ndarray:
    meta = json.loads(Path(str(path) + ".json").read_text())
    return np.frombuffer(Path(path).read_bytes(), dtype=meta["dtype"]).reshape(meta["dims"])


COMPONENTS = {
    "spin1": ["A0", "A1", "A2", "A3", "e1", "e2", "e3", "b1", "b2", "b3"],
    "spin0": ["phi0", "phi1", "phi2", "phi3", "phi4"],
    "dirac": ["psi1", "psi2", "psi3", "psi4"],
}


# -- experiments --------------------------------------------------------------------------------

def _check(report: dict, name: str, value: float, tol: float) -> None:
    ok = bool(np.isfinite(value) and value <= tol)
    report.setdefault("checks", {})[name] = {"value": float(value), "tol": float(tol), "pass": ok}


def run_verify_algebra(cfg: ExperimentConfig, scale: float, out: Path) -> dict:
    rep = algebra.build_representation(cfg.rep)
    report: dict = {"experiment": "verify-algebra", "rep": cfg.rep}
    tol = cfg.tol("algebra", scale)
    if rep.kind.is_dkp:
        exact = algebra.check_meson_algebra(rep, exact=True)
        flt = algebra.check_meson_algebra(rep, exact=False)
        eta = algebra.eta_identities(rep)
        gens = algebra.lorentz_generators(rep, tol=1.0)
        report.update(meson_exact=exact.residual, meson_float=flt.residual, eta_identities=eta,
                      generator_residual=algebra.generator_residual(rep, gens),
                      beta0_multiplicities=algebra.beta0_multiplicities(rep))
        _check(report, "meson_exact", exact.residual, 0.0)
        _check(report, "meson_float", flt.residual, tol)
        for k, v in eta.items():
            _check(report, f"eta_{k}", v, 0.0)
        _check(report, "generators", report["generator_residual"], tol)
    else:
        res = algebra.check_clifford_algebra(rep)
        report.update(clifford=res)
        _check(report, "clifford", res, tol)
    write_json(out / "verify-algebra.json", report)
    return report


def _potential_field(cfg: ExperimentConfig, spec: evolution.GridSpec) -> Optional[np.ndarray]:
    pc = cfg.potential
    if pc.kind == "none" or pc.q == 0:
        return None
    amp = np.asarray(pc.amplitude, dtype=float)
    shape = spec.points + (4,)
    if pc.kind == "constant":
        return np.broadcast_to(amp, shape).copy()
    x = spec.coordinates()
    # one smooth lattice harmonic per component
    phase = 2 * np.pi * x / np.asarray(spec.extents)
    return amp * np.cos(phase + np.roll(phase, 1, axis=-1))


def _initial_modes(cfg: ExperimentConfig, rep, box, rng) -> states.ModeWavefunction:
    if cfg.modes is not None:
        return states.ModeWavefunction.from_dict(cfg.modes, rep)
    return states.random_mode_wavefunction(rep, rng, cfg.random_modes, box=box, nmax=1)


def run_evolve(cfg: ExperimentConfig, scale: float, out: Path) -> dict:
    rep = algebra.build_representation(cfg.rep)
    rng = np.random.default_rng(cfg.seed)
    spec = evolution.GridSpec(tuple(cfg.grid.extents), tuple(cfg.grid.points))
    psi_modes = _initial_modes(cfg, rep, spec.box, rng)
    grid = evolution.GridWavefunction.from_modes(psi_modes, spec)
    A = _potential_field(cfg, spec)
    q = cfg.potential.q
    rows = [(0, 0.0, grid.quasi_norm(), 0.0)]
    worst_step = 0.0
    cur = grid
    for step in range(1, cfg.tau.steps + 1):
        prev = cur.quasi_norm()
        if A is None:
            cur = evolution.evolve_grid_free(cur, cfg.tau.dtau, 1)
        else:
            cur = evolution.evolve_grid_potential(cur, A, q, cfg.tau.dtau, 1)
        qn = cur.quasi_norm()
        drift = abs(qn - prev) / max(abs(prev), 1e-300)
        worst_step = max(worst_step, drift)
        rows.append((step, cur.tau, qn, drift))
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "quasi_norm.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "tau", "quasi_norm", "relative_step_drift"])
        for r in rows:
            w.writerow([r[0], repr(float(r[1])), repr(float(r[2])), repr(float(r[3]))])
    write_array(out / "final_state.bin", cur.data, ["x0", "x1", "x2", "x3", COMPONENTS[cfg.rep]])
    report: dict = {"experiment": "evolve", "rep": cfg.rep, "grid": spec.to_dict(),
                    "tau_final": cur.tau, "quasi_norm_initial": rows[0][2],
                    "quasi_norm_final": rows[-1][2], "max_step_drift": worst_step,
                    "spacelike_growth": evolution.spacelike_growth(spec, cur.tau),
                    "initial_modes": psi_modes.to_dict()}
    _check(report, "quasi_norm_drift", worst_step, cfg.tol("quasi_norm_drift", scale))
    if A is None:
        ref = evolution.GridWavefunction.from_modes(psi_modes.evolve(cur.tau), spec)
        err = float(np.max(np.abs(cur.data - ref.data)) / max(np.max(np.abs(ref.data)), 1e-300))
        report["mode_grid_error"] = err
        _check(report, "mode_grid", err, cfg.tol("mode_grid", scale))
    write_json(out / "evolve.json", report)
    return report


def run_lightcone(cfg: ExperimentConfig, scale: float, out: Path) -> dict:
    rep = algebra.build_representation(cfg.rep)
    lc = cfg.lightcone
    runs = []
    for n in lc.resolutions:
        spec = evolution.GridSpec((lc.t_max, lc.extent, lc.extent, lc.extent), (lc.t_samples, n, n, n))
        runs.append(evolution.causality_support_check(rep, spec, lc.source_width, lc.tau).to_dict())
    leak = {r["points"]: r["leakage"] for r in runs}
    samples = []
    for t, r, tau in [(2.0, 1.0, 1.0), (1.0, 1.0, 1.0), (3.0, 0.5, 0.2), (0.5, 2.0, 0.0)]:
        kv = evolution.lightcone_kernel(t, r, tau)
        samples.append({"t": t, "r": r, "tau": tau, "value": kv.value, "region": kv.region})
    decreasing = all(b["leakage"] < a["leakage"] for a, b in zip(runs, runs[1:]))
    report: dict = {"experiment": "lightcone", "rep": cfg.rep, "runs": runs,
                    "kernel_samples": samples, "decreasing": decreasing}
    target = leak.get(lc.target_points, max(leak.values()))
    _check(report, "leakage", target, cfg.tol("leakage", scale))
    _check(report, "decreasing", 0.0 if decreasing else 1.0, 0.0)
    write_json(out / "lightcone.json", report)
    return report


def _two_particle_states(cfg: ExperimentConfig, rep, rng, box):
    tp = cfg.two_particle
    sign = tp.sign or (1 if rep.kind.is_dkp else -1)
    if tp.construction == "jabs":
        zeta = states.random_mode_wavefunction(rep, rng, 1, box=box, nmax=1)
        phi = states.random_mode_wavefunction(rep, rng, 1, box=box, nmax=1)
        return [rotation.jabs_construct(zeta, phi, tp.k, tp.l, tp.kappa, tp.xi)]
    out = []
    for _ in range(tp.n_states):
        a = states.random_mode_wavefunction(rep, rng, tp.modes_per_factor, box=box)
        b = states.random_mode_wavefunction(rep, rng, tp.modes_per_factor, box=box)
        out.append(multiparticle.symmetrize(a, b, sign, box=box))
    return out


def run_two_particle(cfg: ExperimentConfig, scale: float, out: Path) -> dict:
    rep = algebra.build_representation(cfg.rep)
    rng = np.random.default_rng(cfg.seed)
    box = states.Box(tuple(cfg.grid.extents))
    schedule = list(rng.uniform(-1, 1, size=cfg.tau.steps) * cfg.tau.dtau * 10)
    series, cons, drift, marg = [], 0.0, 0.0, []
    for st in _two_particle_states(cfg, rep, rng, box):
        p0 = multiparticle.energy_momentum_expectation(st, "first", 0.0, box)
        cur, tau = st, 0.0
        res = [st.swap_residual()]
        x, y = rng.uniform(0, 2 * np.pi, (2, 4))
        for dt in schedule:
            cur = multiparticle.evolve_two_particle(cur, dt, tol=math.inf)
            tau += dt
            res.append(cur.swap_residual())
            cons = max(cons, multiparticle.conservation_residual(cur, x, y, 0.0, relative=True))
            p = multiparticle.energy_momentum_expectation(cur, "first", 0.0, box)
            drift = max(drift, float(np.max(np.abs(p - p0)) / max(np.max(np.abs(p0)), 1e-300)))
        series.append(res)
        marg.append(multiparticle.marginal_current(st, "first", x, 0.0, box))
    swap = max(max(s) for s in series)
    report: dict = {"experiment": "two-particle", "rep": cfg.rep, "schedule": schedule,
                    "swap_residual_series": series, "conservation_residual": cons,
                    "momentum_drift": drift, "marginal_currents": marg,
                    "construction": cfg.two_particle.construction}
    _check(report, "swap", swap, cfg.tol("swap", scale))
    _check(report, "conservation", cons, cfg.tol("conservation", scale))
    _check(report, "momentum_drift", drift, cfg.tol("momentum_drift", scale))
    write_json(out / "two-particle.json", report)
    return report


def run_exchange_phase(cfg: ExperimentConfig, scale: float, out: Path, spin: str,
                       k: Optional[str], l: Optional[str]) -> dict:
    kind = {"0": "spin0", "1": "spin1", "half": "dirac"}[spin]
    default = "1/2" if spin == "half" else spin
    k = k or default
    l = l or default
    rep = algebra.build_representation(kind)
    factor = rotation.exchange_phase(l)
    rng = np.random.default_rng(cfg.seed)
    box = states.Box(tuple(cfg.grid.extents))
    zeta = states.random_mode_wavefunction(rep, rng, 1, box=box, nmax=1)
    phi = states.random_mode_wavefunction(rep, rng, 1, box=box, nmax=1)
    st = rotation.jabs_construct(zeta, phi, k, l, cfg.two_particle.kappa, cfg.two_particle.xi)
    res = st.swap_residual()
    report: dict = {"experiment": "exchange-phase", "spin": spin, "k": k, "l": l, "factor": factor,
                    "verdict": st.symmetry.value, "swap_residual": res}
    _check(report, "swap", res, cfg.tol("swap", scale))
    print(f"exchange factor {factor.real:+.0f}: {st.symmetry.value}")
    write_json(out / "exchange-phase.json", report)
    return report


def run_symmetries(cfg: ExperimentConfig, scale: float, out: Path, check: Optional[list]) -> dict:
    rep = algebra.build_representation(cfg.rep)
    rng = np.random.default_rng(cfg.seed)
    spec = evolution.GridSpec(tuple(cfg.grid.extents), tuple(cfg.grid.points))
    psi = states.random_mode_wavefunction(rep, rng, cfg.random_modes, box=spec.box, nmax=1)
    grid = evolution.GridWavefunction.from_modes(psi, spec)
    x = spec.coordinates()
    phase = 2 * np.pi * x / np.asarray(spec.extents)
    A = 0.3 * np.cos(phase + np.roll(phase, 1, axis=-1))
    q = cfg.symmetries.q
    kinds = check or cfg.symmetries.check
    if kinds == ["all"]:
        kinds = [s.value for s in symmetries.SymmetryKind]
    table = {}
    report: dict = {"experiment": "symmetries", "rep": cfg.rep}
    small = 1e-5
    for name in kinds:
        s = symmetries.SymmetryKind(name)
        A2, q2 = symmetries.transform_potential(s, A, q)
        lhs = evolution.evolve_grid_potential(symmetries.apply_symmetry(s, grid), A2, q2,
                                              symmetries.transform_dtau(s, cfg.tau.dtau), cfg.tau.steps)
        rhs = symmetries.apply_symmetry(s, evolution.evolve_grid_potential(grid, A, q, cfg.tau.dtau, cfg.tau.steps))
        match = float(np.max(np.abs(lhs.data - rhs.data)) / np.max(np.abs(rhs.data)))
        a = symmetries.apply_symmetry(s, grid)
        b = symmetries.apply_symmetry(s, evolution.evolve_grid_free(grid, symmetries.transform_dtau(s, small)))
        eq = symmetries.residual(rep, a, b)
        table[s.value] = {"split_step_match": match, "free_equation_residual": eq,
                          "intertwining": symmetries.intertwining_residual(rep, s)}
        _check(report, f"{s.value}_match", match, cfg.tol("symmetry_match", scale))
        _check(report, f"{s.value}_residual", eq, cfg.tol("equation_residual", scale))
    report["table"] = table
    write_json(out / "symmetries.json", report)
    return report


# -- entry point ---------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dkpsim", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config")
    common.add_argument("--rep", choices=[k.value for k in algebra.Kind], help="representation override")
    common.add_argument("--seed", type=int, help="seed override")
    common.add_argument("--out", help="output directory override")
    common.add_argument("--tol-scale", type=float, default=1.0, help="multiply every tolerance")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, parents=[common])
        if name == "exchange-phase":
            p.add_argument("--spin", choices=["0", "1", "half"], default="1")
            p.add_argument("--k")
            p.add_argument("--l")
        if name == "symmetries":
            p.add_argument("--check", nargs="+", help="'all' or any of C P T TPC")
    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        cfg.experiment = args.command
        if args.rep:
            cfg.rep = args.rep
        if args.seed is not None:
            cfg.seed = args.seed
        if args.out:
            cfg.out = args.out
        if args.tol_scale <= 0:
            raise ConfigError("--tol-scale must be positive")
        out = Path(cfg.out)
        scale = args.tol_scale
        if args.command == "verify-algebra":
            report = run_verify_algebra(cfg, scale, out)
        elif args.command == "evolve":
            report = run_evolve(cfg, scale, out)
        elif args.command == "lightcone":
            report = run_lightcone(cfg, scale, out)
        elif args.command == "two-particle":
            report = run_two_particle(cfg, scale, out)
        elif args.command == "exchange-phase":
            report = run_exchange_phase(cfg, scale, out, args.spin, args.k, args.l)
        else:
            report = run_symmetries(cfg, scale, out, args.check)
        write_json(out / "config.json", cfg.to_dict())
        failed = [k for k, v in report.get("checks", {}).items() if not v["pass"]]
        if failed:
            raise ToleranceFailure(f"tolerance failures: {', '.join(failed)}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ToleranceFailure as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except DKPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    log.info("all checks passed")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
