"""Named scenarios, layered configuration, CSV output and the ``otoc-lab`` CLI.

Configuration layers, lowest to highest precedence: field defaults, scenario
defaults, config file (YAML mapping), ``--key value`` flags. Sites in a
config are 1-based like the model's own labelling; everything below the
runner is 0-based.
"""
from __future__ import annotations

import argparse
import dataclasses
import math
import sys
import time
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from otoc_lab import holographic as holo
from otoc_lab.hamiltonians import (
    RNG_NAME,
    OpenSystemParams,
    PowerLawIsingParams,
    build_all_to_all_ising,
    build_power_law_ising,
    derive_seeds,
    draw_perturbation,
    perturbed_hamiltonian,
)
from otoc_lab.propagate import PropagationError, PropagatorConfig
from otoc_lab.protocols import (
    ButterflyPair,
    DepolarizationParams,
    GlobalXRotation,
    HamiltonianEvolution,
    apply_operator,
    control_depolarized_x,
    depolarized_v_expectation,
    ideal_series,
    interferometric_series,
    make_ideal_evolution,
    make_imperfect_evolution,
    open_system_otoc_series,
    recover_otoc_from_control,
    shot_averaged_renormalization,
    weak_series,
)
from otoc_lab.qstate import PauliString, StateVector, make_all_plus_x, make_all_plus_y, make_random_state

__version__ = "0.1.0"

SCENARIOS = (
    "ideal",
    "interferometric",
    "weak",
    "depolarize",
    "control-depolarize",
    "open-system",
    "floquet-shots",
    "holographic",
)
INITIAL_STATES = ("plus-y", "plus-x", "random")
CSV_HEADER = "t,re_ideal,im_ideal,re_imperfect,im_imperfect,re_renorm,im_renorm,unstable"

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class RunConfig:
    scenario: str
    # power-law Ising chain (also each chain of the open system)
    n: int = 14
    J: float = 1.0
    zeta: float = 6.0
    ell0: int = 5
    hx: float = 1.05
    hz_amplitude: float = 0.375
    epsilon: float = 0.2
    model_seed: int = 0
    state_seed: int = 0
    shot_seed: int = 0
    initial_state: str = "plus-y"
    # 1-based; w_site 0 means "last site"
    w_site: int = 0
    w_axis: str = "X"
    v_site: int = 1
    v_axis: str = "X"
    t_start: float = 0.0
    t_end: float = 20.0
    dt: float = 0.25
    n_shots: int = 1
    denominator_floor: float = 1e-3
    # open system
    n_system: int = 7
    jc: float = 0.1
    # Floquet pulse duration
    floquet_dt: float = 0.2
    # depolarization scenarios
    phi: float = 0.5
    p: float = 0.9
    q: float = 0.9
    # holographic model
    beta: float = 2 * math.pi
    delta_op: float = 1.0
    g: float = 1e-5
    # propagator
    tolerance: float = 1e-10
    max_krylov_dim: int = 64

    @property
    def chain_length(self) -> int:
        return self.n_system if self.scenario == "open-system" else self.n

    @property
    def register_size(self) -> int:
        return 2 * self.n_system if self.scenario == "open-system" else self.n

    @property
    def w_index(self) -> int:
        return (self.w_site or self.chain_length) - 1

    @property
    def v_index(self) -> int:
        return self.v_site - 1

    def times(self) -> np.ndarray:
        count = int(round((self.t_end - self.t_start) / self.dt)) + 1
        ts = self.t_start + self.dt * np.arange(count)
        return ts[ts <= self.t_end + 1e-9 * max(1.0, abs(self.t_end))]

    def ising_params(self) -> PowerLawIsingParams:
        n = self.chain_length
        # short chains cannot host the full coupling range
        return PowerLawIsingParams(n, self.J, self.zeta, min(self.ell0, n - 1), self.hx, self.hz_amplitude)

    def propagator(self) -> PropagatorConfig:
        return PropagatorConfig(tolerance=self.tolerance, max_krylov_dim=self.max_krylov_dim)


SCENARIO_DEFAULTS: dict[str, dict[str, Any]] = {
    "ideal": {"n": 14},
    "interferometric": {"n": 14},
    "weak": {"n": 12},
    "depolarize": {"n": 5, "initial_state": "plus-x", "v_site": 2},
    "control-depolarize": {"n": 14},
    "open-system": {"n_system": 7, "jc": 0.1},
    "floquet-shots": {"n": 12, "n_shots": 100, "dt": 0.2, "floquet_dt": 0.2},
    "holographic": {"epsilon": 0.1, "t_start": -5.0, "t_end": 20.0, "dt": 0.05},
}

_FIELDS = {f.name: f for f in fields(RunConfig)}
_TYPES = {"int": int, "float": float, "str": str}


def _coerce(key: str, value: Any) -> Any:
    kind = _TYPES[_FIELDS[key].type]
    if isinstance(value, str) and kind is not str:
        try:
            value = float(value)
        except ValueError as e:
            raise ConfigError(key, f"cannot parse {value!r} as a number") from e
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or value != int(value):
            raise ConfigError(key, f"expected an integer, got {value!r}")
        return int(value)
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(key, f"expected a number, got {value!r}")
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(key, f"expected a string, got {value!r}")
    return value


def _validate(cfg: RunConfig) -> None:
    def need(ok, key, msg):
        if not ok:
            raise ConfigError(key, msg)

    need(cfg.scenario in SCENARIOS, "scenario", f"unknown scenario {cfg.scenario!r}")
    need(cfg.dt > 0 and math.isfinite(cfg.dt), "dt", f"must be positive, got {cfg.dt}")
    need(cfg.t_end > cfg.t_start, "t_end", f"must exceed t_start ({cfg.t_end} <= {cfg.t_start})")
    need(cfg.epsilon >= 0, "epsilon", f"must be non-negative, got {cfg.epsilon}")
    need(cfg.n_shots >= 1, "n_shots", f"must be at least 1, got {cfg.n_shots}")
    need(cfg.denominator_floor > 0, "denominator_floor", "must be positive")
    need(cfg.initial_state in INITIAL_STATES, "initial_state", f"must be one of {INITIAL_STATES}")
    need(cfg.tolerance > 0, "tolerance", "must be positive")
    need(cfg.max_krylov_dim >= 2, "max_krylov_dim", "must be at least 2")
    for key in ("w_axis", "v_axis"):
        need(getattr(cfg, key).upper() in ("X", "Y", "Z"), key, "must be X, Y or Z")
    if cfg.scenario == "holographic":
        need(cfg.beta > 0, "beta", "must be positive")
        need(cfg.delta_op > 0, "delta_op", "must be positive")
        need(cfg.g >= 0, "g", "must be non-negative")
        return
    need(cfg.t_start >= 0, "t_start", "must be non-negative")
    need(cfg.chain_length >= 2, "n_system" if cfg.scenario == "open-system" else "n", "need at least 2 sites")
    need(cfg.register_size <= 24, "n", f"register of {cfg.register_size} qubits is too large")
    need(0 <= cfg.w_site <= cfg.chain_length, "w_site", f"must lie in 1..{cfg.chain_length}")
    need(1 <= cfg.v_site <= cfg.chain_length, "v_site", f"must lie in 1..{cfg.chain_length}")
    need(0 <= cfg.p <= 1, "p", "must lie in [0, 1]")
    need(0 <= cfg.q <= 1, "q", "must lie in [0, 1]")
    if cfg.scenario == "floquet-shots":
        need(cfg.floquet_dt > 0, "floquet_dt", "must be positive")
        for key in ("t_start", "dt"):
            k = getattr(cfg, key) / cfg.floquet_dt
            need(abs(k - round(k)) < 1e-9, key, f"must be a multiple of floquet_dt={cfg.floquet_dt}")


def parse_config(scenario: str | None = None, path: str | Path | None = None, overrides: dict[str, Any] | None = None) -> RunConfig:
    """Resolve a RunConfig from scenario defaults, an optional YAML file and flag overrides."""
    layers: dict[str, Any] = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as e:
            raise ConfigError("config", f"cannot read {path}: {e}") from e
        try:
            data = yaml.safe_load(text) or {}
        except yaml.YAMLError as e:
            raise ConfigError("config", f"{path} is not valid YAML: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError("config", f"{path} must hold a key-value mapping")
        layers.update(data)
    layers.update(overrides or {})
    if scenario is not None:
        layers["scenario"] = scenario
    if "scenario" not in layers:
        raise ConfigError("scenario", "missing scenario")
    name = layers["scenario"]
    if name not in SCENARIOS:
        raise ConfigError("scenario", f"unknown scenario {name!r}")
    for key in layers:
        if key not in _FIELDS:
            raise ConfigError(key, "unknown key")
    values = dict(SCENARIO_DEFAULTS[name])
    values.update({k: v for k, v in layers.items() if k != "scenario"})
    values = {k: _coerce(k, v) for k, v in values.items()}
    for key in ("w_axis", "v_axis"):
        if key in values:
            values[key] = values[key].upper()
    cfg = RunConfig(scenario=name, **values)
    _validate(cfg)
    return cfg


# --- records ---------------------------------------------------------------------

@dataclass
class RunRecord:
    config: RunConfig
    t: np.ndarray
    ideal: np.ndarray
    imperfect: np.ndarray
    renormalized: np.ndarray
    unstable: np.ndarray
    wall_clock: float = 0.0
    version: str = __version__
    extra: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        size = len(self.t)
        for name in ("ideal", "imperfect", "renormalized", "unstable"):
            if len(getattr(self, name)) != size:
                raise ValueError(f"column {name} has {len(getattr(self, name))} rows, grid has {size}")

    def __len__(self):
        return len(self.t)


def _initial_state(cfg: RunConfig) -> StateVector:
    n = cfg.register_size
    if cfg.initial_state == "plus-y":
        return make_all_plus_y(n)
    if cfg.initial_state == "plus-x":
        return make_all_plus_x(n)
    return make_random_state(n, cfg.state_seed)


def _pair(cfg: RunConfig) -> ButterflyPair:
    return ButterflyPair.paulis(cfg.w_index, cfg.v_index, cfg.w_axis, cfg.v_axis)


def _from_series(cfg, s, extra=None):
    return dict(t=s.t, ideal=s.ideal, imperfect=s.imperfect, renormalized=s.renormalized, unstable=s.unstable, extra=extra or {})


def _run_ideal(cfg):
    evo = make_ideal_evolution(cfg.ising_params(), None, cfg.propagator())
    f = ideal_series(_initial_state(cfg), evo, _pair(cfg), cfg.times())
    return dict(t=cfg.times(), ideal=f, imperfect=f, renormalized=f, unstable=np.zeros(f.size, dtype=bool))


def _run_interferometric(cfg):
    params = cfg.ising_params()
    seeds = derive_seeds(cfg.model_seed, 2)
    pc = cfg.propagator()
    s = interferometric_series(
        _initial_state(cfg),
        make_ideal_evolution(params, None, pc),
        make_imperfect_evolution(params, cfg.epsilon, seeds, None, pc),
        _pair(cfg),
        cfg.times(),
        cfg.denominator_floor,
    )
    return _from_series(cfg, s, {"h1_seed": seeds[0], "h2_seed": seeds[1]})


def _run_weak(cfg):
    params = cfg.ising_params()
    base = build_power_law_ising(params)
    seeds = derive_seeds(cfg.model_seed, 3)
    hs = [perturbed_hamiltonian(base, draw_perturbation(cfg.epsilon, params.n, sd)) for sd in seeds]
    s = weak_series(_initial_state(cfg), base, *hs, _pair(cfg), cfg.times(), cfg.denominator_floor, cfg.propagator())
    return _from_series(cfg, s, {"h1_seed": seeds[0], "h2_seed": seeds[1], "h3_seed": seeds[2]})


def _run_depolarize(cfg):
    h = build_all_to_all_ising(cfg.n, cfg.J)
    psi = _initial_state(cfg)
    w = GlobalXRotation(cfg.phi)
    v_op = PauliString.single(cfg.v_index, cfg.v_axis)
    # psi must be a V eigenstate; read off the eigenvalue
    v_eig = np.vdot(psi.amps, apply_operator(v_op, psi.amps, psi.n)).real
    dp = DepolarizationParams(cfg.p, cfg.q, float(round(v_eig)))
    pc = cfg.propagator()
    evo = HamiltonianEvolution(h, h, pc)
    ts = cfg.times()
    ideal = ideal_series(psi, evo, ButterflyPair(w, v_op), ts)
    f_1v = depolarized_v_expectation(psi, h, None, v_op, dp, 0.0, pc)
    imperfect, renorm, unstable = [], [], []
    for t in ts:
        f_wv = depolarized_v_expectation(psi, h, w, v_op, dp, float(t), pc)
        imperfect.append(f_wv)
        unstable.append(abs(f_1v) < cfg.denominator_floor)
        with np.errstate(divide="ignore", invalid="ignore"):
            renorm.append(dp.v**2 * np.complex128(f_wv) / np.complex128(f_1v))
    return dict(t=ts, ideal=ideal, imperfect=np.array(imperfect), renormalized=np.array(renorm), unstable=np.array(unstable), extra={"v_eigenvalue": dp.v})


def _run_control_depolarize(cfg):
    params = cfg.ising_params()
    h = build_power_law_ising(params)
    psi = _initial_state(cfg)
    pair = _pair(cfg)
    pc = cfg.propagator()
    ts = cfg.times()
    ideal = ideal_series(psi, HamiltonianEvolution(h, h, pc), pair, ts)
    x_11 = control_depolarized_x(psi, h, ButterflyPair(None, None), cfg.p, 0.0, pc)
    imperfect = np.array([control_depolarized_x(psi, h, pair, cfg.p, float(t), pc) for t in ts])
    unstable = np.full(ts.size, abs(x_11) < cfg.denominator_floor)
    if x_11 == 0:
        renorm = np.full(ts.size, np.nan)
    else:
        renorm = np.array([recover_otoc_from_control(x, x_11) for x in imperfect])
    return dict(t=ts, ideal=ideal, imperfect=imperfect, renormalized=renorm, unstable=unstable)


def _run_open_system(cfg):
    chain = cfg.ising_params()
    s = open_system_otoc_series(
        OpenSystemParams(chain, chain, cfg.jc),
        _pair(cfg),
        _initial_state(cfg),
        cfg.times(),
        cfg.denominator_floor,
        cfg.propagator(),
    )
    return _from_series(cfg, s)


def _run_floquet_shots(cfg):
    avg = shot_averaged_renormalization(
        _initial_state(cfg),
        cfg.ising_params(),
        _pair(cfg),
        cfg.times(),
        cfg.epsilon,
        cfg.n_shots,
        cfg.shot_seed,
        cfg.floquet_dt,
        cfg.denominator_floor,
        cfg.propagator(),
    )
    return _from_series(cfg, avg.series)


def _run_holographic(cfg):
    p = holo.HolographicParams(cfg.beta, cfg.delta_op, cfg.g, cfg.epsilon)
    ts = cfg.times()
    d = holo.holographic_series(p, ts)
    return dict(
        t=ts,
        ideal=d["ideal"],
        imperfect=d["imperfect"],
        renormalized=d["renormalized"],
        unstable=d["denominator"] < cfg.denominator_floor,
    )


_DISPATCH = {
    "ideal": _run_ideal,
    "interferometric": _run_interferometric,
    "weak": _run_weak,
    "depolarize": _run_depolarize,
    "control-depolarize": _run_control_depolarize,
    "open-system": _run_open_system,
    "floquet-shots": _run_floquet_shots,
    "holographic": _run_holographic,
}


def run_scenario(cfg: RunConfig) -> RunRecord:
    _validate(cfg)
    start = time.perf_counter()
    cols = _DISPATCH[cfg.scenario](cfg)
    return RunRecord(
        config=cfg,
        t=np.asarray(cols["t"], dtype=float),
        ideal=np.asarray(cols["ideal"], dtype=complex),
        imperfect=np.asarray(cols["imperfect"], dtype=complex),
        renormalized=np.asarray(cols["renormalized"], dtype=complex),
        unstable=np.asarray(cols["unstable"], dtype=bool),
        wall_clock=time.perf_counter() - start,
        extra=cols.get("extra", {}),
    )


# --- CSV ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def csv_rows(rec: RunRecord) -> list[str]:
    real_only = rec.config.scenario == "holographic"
    rows = []
    for k in range(len(rec)):
        vals = [rec.t[k]]
        for col in (rec.ideal, rec.imperfect, rec.renormalized):
            vals += [col[k].real, 0.0 if real_only else col[k].imag]
        rows.append(",".join(_fmt(v) for v in vals) + f",{int(rec.unstable[k])}")
    return rows


def _header(rec: RunRecord) -> list[str]:
    lines = [f"# otoc-lab {rec.version}", f"# rng: {RNG_NAME}"]
    lines += [f"# {k}: {v!r}" for k, v in dataclasses.asdict(rec.config).items()]
    if rec.config.scenario != "holographic":
        lines.append(f"# ell0_used: {rec.config.ising_params().ell0}")
    lines += [f"# {k}: {v!r}" for k, v in rec.extra.items()]
    lines.append(f"# wall_clock_s: {rec.wall_clock:.3f}")
    return lines


def write_csv(rec: RunRecord, path: str | Path) -> None:
    path = Path(path)
    text = "\n".join(_header(rec) + [CSV_HEADER] + csv_rows(rec)) + "\n"
    try:
        path.write_text(text)
    except OSError as e:
        raise OSError(f"cannot write {path}: {e}") from e


def write_semilog(rec: RunRecord, path: str | Path) -> None:
    """Companion file of ``|1 - value|`` columns for log-scale plots."""
    path = Path(path)
    lines = ["t,abs_1m_ideal,abs_1m_imperfect,abs_1m_renorm"]
    for k in range(len(rec)):
        vals = (rec.t[k], abs(1 - rec.ideal[k]), abs(1 - rec.imperfect[k]), abs(1 - rec.renormalized[k]))
        lines.append(",".join(_fmt(v) for v in vals))
    try:
        path.write_text("\n".join(lines) + "\n")
    except OSError as e:
        raise OSError(f"cannot write {path}: {e}") from e


def read_csv(path: str | Path) -> dict[str, np.ndarray]:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln and not ln.startswith("#")]
    names = lines[0].split(",")
    data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]]).reshape(-1, len(names))
    return {name: data[:, k] for k, name in enumerate(names)}


# --- CLI ------------------------------------------------------------------------------

def _split_overrides(extra: list[str]) -> dict[str, str]:
    out: dict[str, str] = {}
    i = 0
    while i < len(extra):
        tok = extra[i]
        if not tok.startswith("--"):
            raise ConfigError(tok, "expected --key value")
        key = tok[2:]
        if "=" in key:
            key, val = key.split("=", 1)
        else:
            if i + 1 >= len(extra):
                raise ConfigError(key, "missing value")
            i += 1
            val = extra[i]
        out[key.replace("-", "_")] = val
        i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="otoc-lab", description="Run an OTOC renormalization scenario and write a CSV.")
    ap.add_argument("scenario", choices=SCENARIOS)
    ap.add_argument("--config", help="YAML file of RunConfig fields")
    ap.add_argument("--out", required=True, help="output CSV path")
    ap.add_argument("--semilog", help="optional companion CSV of |1 - value|")
    args, extra = ap.parse_known_args(argv)
    try:
        cfg = parse_config(args.scenario, args.config, _split_overrides(extra))
    except ConfigError as e:
        print(f"otoc-lab: configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        rec = run_scenario(cfg)
    except (PropagationError, ArithmeticError, FloatingPointError) as e:
        print(f"otoc-lab: numerical error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    write_csv(rec, args.out)
    if args.semilog:
        write_semilog(rec, args.semilog)
    print(f"wrote {len(rec)} rows to {args.out} ({rec.wall_clock:.2f} s)")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
