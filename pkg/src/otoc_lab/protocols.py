"""OTOCs measured with imperfect forward/backward evolution, and their renormalization.

Every correlator on a pure state is computed as an inner product of two
branch states, e.g. the ideal OTOC

    F_t = <psi| W_t^dag V^dag W_t V |psi>,   W_t = U^dag W U,

is ``<U^dag W U psi| V^dag |U^dag W U V psi>``. Mixed-state channels
(depolarization of the system or of the interferometer's control qubit)
enter only through their known mixture weights.
"""
from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from otoc_lab.hamiltonians import (
    HamiltonianSpec,
    OpenSystemParams,
    PowerLawIsingParams,
    build_open_system,
    build_power_law_ising,
    derive_seeds,
    draw_perturbation,
    floquet_from_ising,
    perturbed_hamiltonian,
)
from otoc_lab.propagate import (
    DEFAULT_CONFIG,
    FloquetPulses,
    PropagationError,
    PropagatorConfig,
    expm_multiply_array,
)
from otoc_lab.qstate import (
    PauliString,
    SingleQubitUnitary,
    StateVector,
    apply_pauli_array,
    apply_single_array,
)

DEFAULT_FLOOR = 1e-3


# --- butterfly operators ------------------------------------------------------

@dataclass(frozen=True)
class GlobalXRotation:
    """``exp(-i phi sum_j sigma^x_j)``, a product of single-qubit rotations."""

    phi: float


Operator = Union[None, PauliString, SingleQubitUnitary, GlobalXRotation]
IDENTITY: Operator = None


def _rx(phi: float) -> np.ndarray:
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, -1j * s], [-1j * s, c]])


def apply_operator(op: Operator, amps: np.ndarray, n: int, dagger: bool = False) -> np.ndarray:
    if op is None:
        return amps
    if isinstance(op, PauliString):
        if abs(abs(op.coeff) - 1.0) > 1e-12:
            raise ValueError(f"butterfly Pauli string must have unit coefficient, got {op.coeff}")
        # real +-1 coefficient: the string is its own adjoint
        return apply_pauli_array(amps, n, op)
    if isinstance(op, SingleQubitUnitary):
        m = op.matrix.conj().T if dagger else op.matrix
        return apply_single_array(amps, n, op.site, m)
    if isinstance(op, GlobalXRotation):
        m = _rx(-op.phi if dagger else op.phi)
        for site in range(n):
            amps = apply_single_array(amps, n, site, m)
        return amps
    raise TypeError(f"unsupported operator {op!r}")


def operator_sites(op: Operator, n: int) -> set[int]:
    if op is None:
        return set()
    if isinstance(op, PauliString):
        return set(op.sites)
    if isinstance(op, SingleQubitUnitary):
        return {op.site}
    return set(range(n))


@dataclass(frozen=True)
class ButterflyPair:
    w: Operator = None
    v: Operator = None

    @classmethod
    def paulis(cls, w_site: int, v_site: int, w_axis: str = "X", v_axis: str = "X") -> "ButterflyPair":
        return cls(PauliString.single(w_site, w_axis), PauliString.single(v_site, v_axis))


# --- evolution pairs ------------------------------------------------------------

class Evolution:
    """Implemented forward ``U_1`` and backward ``U_2^dag`` unitaries of one protocol run."""

    def forward(self, amps: np.ndarray, t: float) -> np.ndarray:
        raise NotImplementedError

    def backward(self, amps: np.ndarray, t: float) -> np.ndarray:
        raise NotImplementedError


class HamiltonianEvolution(Evolution):
    """``U_1 = exp(-i H_1 t)``, ``U_2^dag = exp(+i H_2 t)``; ``H_2`` defaults to ``H_1``."""

    def __init__(self, h1: HamiltonianSpec, h2: HamiltonianSpec | None = None, cfg: PropagatorConfig = DEFAULT_CONFIG):
        h2 = h1 if h2 is None else h2
        if h1.n != h2.n:
            raise ValueError(f"H1 acts on {h1.n} qubits, H2 on {h2.n}")
        self.h1, self.h2, self.cfg = h1, h2, cfg
        self.n = h1.n
        self._b1, self._b2 = h1.norm_bound(), h2.norm_bound()

    def forward(self, amps, t):
        return expm_multiply_array(self.h1.operator, amps, t, self._b1, self.cfg)

    def backward(self, amps, t):
        return expm_multiply_array(self.h2.operator, amps, -t, self._b2, self.cfg)


class FloquetEvolution(Evolution):
    """Floquet forward/backward with ``t`` a whole number of ``dt`` steps."""

    def __init__(self, f1, f2=None):
        f2 = f1 if f2 is None else f2
        if not math.isclose(f1.dt, f2.dt):
            raise ValueError("forward and backward Floquet models use different dt")
        self.p1, self.p2 = FloquetPulses(f1), FloquetPulses(f2)
        self.n = f1.n
        self.dt = f1.dt

    def steps(self, t: float) -> int:
        k = round(t / self.dt)
        if abs(k * self.dt - t) > 1e-9 * max(1.0, abs(t)):
            raise ValueError(f"time {t} is not a multiple of the Floquet step {self.dt}")
        if k < 0:
            raise ValueError(f"negative time {t}")
        return k

    def forward(self, amps, t):
        return self.p1.forward(amps, self.steps(t))

    def backward(self, amps, t):
        return self.p2.backward(amps, self.steps(t))


def _check_n(psi: StateVector, *hs) -> None:
    for h in hs:
        if h.n != psi.n:
            raise ValueError(f"operator acts on {h.n} qubits, state has {psi.n}")


def _branch_overlap(evo: Evolution, fwd_psi: np.ndarray, fwd_vpsi: np.ndarray, t: float, pair: ButterflyPair, n: int) -> complex:
    """``<U2^dag W U1 psi| V^dag |U2^dag W U1 V psi>`` from the forward-evolved branches."""
    a = evo.backward(apply_operator(pair.w, fwd_psi, n), t)
    b = evo.backward(apply_operator(pair.w, fwd_vpsi, n), t)
    return complex(np.vdot(apply_operator(pair.v, a, n), b))


# --- point correlators -----------------------------------------------------------

def ideal_otoc(psi: StateVector, h: HamiltonianSpec, pair: ButterflyPair, t: float, cfg: PropagatorConfig = DEFAULT_CONFIG) -> complex:
    _check_n(psi, h)
    return interferometric_otoc(psi, h, h, pair, t, cfg)


def interferometric_otoc(
    psi: StateVector,
    h1: HamiltonianSpec,
    h2: HamiltonianSpec,
    pair: ButterflyPair,
    t: float,
    cfg: PropagatorConfig = DEFAULT_CONFIG,
) -> complex:
    """``<psi| U1^dag W^dag U2 V^dag U2^dag W U1 V |psi>`` with ``U1 = e^{-iH1 t}``, ``U2^dag = e^{+iH2 t}``."""
    _check_n(psi, h1, h2)
    evo = HamiltonianEvolution(h1, h2, cfg)
    n = psi.n
    u_psi = evo.forward(psi.amps, t)
    u_vpsi = evo.forward(apply_operator(pair.v, psi.amps, n), t)
    return _branch_overlap(evo, u_psi, u_vpsi, t, pair, n)


def weak_otoc(
    psi: StateVector,
    h1: HamiltonianSpec,
    h2: HamiltonianSpec,
    h3: HamiltonianSpec,
    a: Operator,
    b: Operator,
    c: Operator,
    d: Operator,
    t: float,
    cfg: PropagatorConfig = DEFAULT_CONFIG,
) -> complex:
    """``Tr(U1^dag U2 U3^dag A^dag U3 B^dag U2^dag C U1 D rho)`` for ``rho = |psi><psi|``."""
    _check_n(psi, h1, h2, h3)
    n = psi.n
    b1, b2, b3 = h1.norm_bound(), h2.norm_bound(), h3.norm_bound()

    def u1(x):
        return expm_multiply_array(h1.operator, x, t, b1, cfg)

    def u2dag(x):
        return expm_multiply_array(h2.operator, x, -t, b2, cfg)

    def u3(x):
        return expm_multiply_array(h3.operator, x, t, b3, cfg)

    bra = apply_operator(a, u3(u2dag(u1(psi.amps))), n)
    ket = u1(apply_operator(d, psi.amps, n))
    ket = u2dag(apply_operator(c, ket, n))
    ket = u3(apply_operator(b, ket, n, dagger=True))
    return complex(np.vdot(bra, ket))


# --- renormalization ---------------------------------------------------------------

def renormalize_interferometric(numerator: complex, denominator: complex, floor: float = DEFAULT_FLOOR) -> tuple[complex, bool]:
    """``F^int(W,V) / F^int(1,V)``; the flag marks ``|denominator| < floor``."""
    if not floor > 0:
        raise ValueError(f"floor must be positive, got {floor}")
    unstable = abs(denominator) < floor
    with np.errstate(divide="ignore", invalid="ignore"):
        value = complex(np.complex128(numerator) / np.complex128(denominator))
    return value, bool(unstable)


def renormalize_weak(f_wvwv: complex, f_1v1v: complex, f_w1w1: complex, floor: float = DEFAULT_FLOOR) -> tuple[complex, bool]:
    """``F^weak(W,V,W,V) / (F^weak(1,V,1,V) F^weak(W,1,W,1))``."""
    if not floor > 0:
        raise ValueError(f"floor must be positive, got {floor}")
    unstable = abs(f_1v1v) < floor or abs(f_w1w1) < floor
    with np.errstate(divide="ignore", invalid="ignore"):
        value = complex(np.complex128(f_wvwv) / (np.complex128(f_1v1v) * np.complex128(f_w1w1)))
    return value, bool(unstable)


# --- decoherence ------------------------------------------------------------------------

@dataclass(frozen=True)
class DepolarizationParams:
    p: float
    q: float
    v: float = 1.0

    def __post_init__(self):
        if not (0 <= self.p <= 1 and 0 <= self.q <= 1):
            raise ValueError(f"survival probabilities must lie in [0, 1], got p={self.p}, q={self.q}")
        if self.v == 0:
            raise ValueError("eigenvalue v must be nonzero")


def depolarized_v_expectation(
    psi: StateVector,
    h: HamiltonianSpec,
    w: Operator,
    v_op: Operator,
    dp: DepolarizationParams,
    t: float,
    cfg: PropagatorConfig = DEFAULT_CONFIG,
) -> complex:
    """``Tr(V rho')`` with ``rho' = pq W_t rho W_t^dag + (1 - pq) 1/d``.

    ``V`` must be traceless, so the maximally mixed branch contributes nothing.
    """
    _check_n(psi, h)
    n = psi.n
    if not isinstance(v_op, PauliString) or not v_op.factors:
        raise ValueError("V must be a traceless Pauli string")
    vpsi = apply_operator(v_op, psi.amps, n)
    if np.linalg.norm(vpsi - dp.v * psi.amps) > 1e-10:
        raise ValueError(f"state is not in the v={dp.v} eigenspace of V")
    evo = HamiltonianEvolution(h, h, cfg)
    wt_psi = evo.backward(apply_operator(w, evo.forward(psi.amps, t), n), t)
    return dp.p * dp.q * complex(np.vdot(wt_psi, apply_operator(v_op, wt_psi, n)))


def recover_otoc_from_depolarization(f_wv: complex, f_1v: complex, v: float) -> complex:
    """``v^2 F^dep(W,V) / F^dep(1,V)``; exact for any survival probabilities."""
    if f_1v == 0:
        raise ZeroDivisionError("F^dep(1, V) vanishes (fully depolarized)")
    return v * v * f_wv / f_1v


def control_depolarized_x(
    psi: StateVector, h: HamiltonianSpec, pair: ButterflyPair, p: float, t: float, cfg: PropagatorConfig = DEFAULT_CONFIG
) -> float:
    """Control-qubit ``<X>`` after the interferometer when the control starts in
    ``p|+><+| + (1-p) 1/2``; equals ``p Re F_t``."""
    if not 0 <= p <= 1:
        raise ValueError(f"survival probability must lie in [0, 1], got {p}")
    _check_n(psi, h)
    n = psi.n
    evo = HamiltonianEvolution(h, h, cfg)

    def w_t(x):
        return evo.backward(apply_operator(pair.w, evo.forward(x, t), n), t)

    branch0 = apply_operator(pair.v, w_t(psi.amps), n)  # V W_t psi, control |0>
    branch1 = w_t(apply_operator(pair.v, psi.amps, n))  # W_t V psi, control |1>
    # reduced control state: (1/2)[[<0|0>, p<1|0>], [p<0|1>, <1|1>]] in the branch amplitudes
    rho_c = 0.5 * np.array(
        [
            [np.vdot(branch0, branch0), p * np.vdot(branch1, branch0)],
            [p * np.vdot(branch0, branch1), np.vdot(branch1, branch1)],
        ]
    )
    return float(np.trace(np.array([[0, 1], [1, 0]]) @ rho_c).real)


def recover_otoc_from_control(x_wv: float, x_11: float) -> float:
    if x_11 == 0:
        raise ZeroDivisionError("<X>(1,1,p) vanishes (fully depolarized control)")
    return x_wv / x_11


# --- time series -----------------------------------------------------------------------------

@dataclass(frozen=True)
class OtocPoint:
    t: float
    ideal: complex
    imperfect: complex
    renormalization_denominators: tuple[complex, ...]
    renormalized: complex
    unstable: bool = False


@dataclass
class OtocSeries:
    points: list[OtocPoint]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        ts = [p.t for p in self.points]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("series times must be strictly increasing")

    def __len__(self):
        return len(self.points)

    @property
    def t(self) -> np.ndarray:
        return np.array([p.t for p in self.points])

    @property
    def ideal(self) -> np.ndarray:
        return np.array([p.ideal for p in self.points])

    @property
    def imperfect(self) -> np.ndarray:
        return np.array([p.imperfect for p in self.points])

    @property
    def renormalized(self) -> np.ndarray:
        return np.array([p.renormalized for p in self.points])

    @property
    def unstable(self) -> np.ndarray:
        return np.array([p.unstable for p in self.points])


def _check_times(times: Sequence[float]) -> np.ndarray:
    ts = np.asarray(times, dtype=float)
    if ts.ndim != 1 or ts.size == 0:
        raise ValueError("time grid must be a non-empty 1-D sequence")
    if ts[0] < 0 or np.any(np.diff(ts) <= 0):
        raise ValueError("time grid must be non-negative and strictly increasing")
    return ts


@contextmanager
def _at_time(t: float):
    try:
        yield
    except PropagationError as e:
        if e.t is None:
            e.t = t
        raise


def _forward_sweep(evo: Evolution, states: Sequence[np.ndarray], times: np.ndarray):
    """Yield ``(t, [U1(t) s for s in states])``, stepping incrementally along the grid."""
    cur = list(states)
    last = 0.0
    for t in times:
        if t > last:
            with _at_time(float(t)):
                cur = [evo.forward(s, t - last) for s in cur]
            last = t
        yield float(t), cur


def interferometric_components(psi: StateVector, evo: Evolution, pair: ButterflyPair, times: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """``F^int(W,V)`` and ``F^int(1,V)`` on a grid."""
    ts = _check_times(times)
    n = psi.n
    no_w = ButterflyPair(None, pair.v)
    num, den = [], []
    for t, (u_psi, u_vpsi) in _forward_sweep(evo, [psi.amps, apply_operator(pair.v, psi.amps, n)], ts):
        with _at_time(t):
            num.append(_branch_overlap(evo, u_psi, u_vpsi, t, pair, n))
            den.append(_branch_overlap(evo, u_psi, u_vpsi, t, no_w, n))
    return np.array(num), np.array(den)


def ideal_series(psi: StateVector, evo: Evolution, pair: ButterflyPair, times: Sequence[float]) -> np.ndarray:
    ts = _check_times(times)
    n = psi.n
    out = []
    for t, (u_psi, u_vpsi) in _forward_sweep(evo, [psi.amps, apply_operator(pair.v, psi.amps, n)], ts):
        with _at_time(t):
            out.append(_branch_overlap(evo, u_psi, u_vpsi, t, pair, n))
    return np.array(out)


def _assemble(ts, ideal, imperfect, denominators, floor, metadata) -> OtocSeries:
    points = []
    for k, t in enumerate(ts):
        dens = tuple(complex(d[k]) for d in denominators)
        if len(dens) == 1:
            value, unstable = renormalize_interferometric(imperfect[k], dens[0], floor)
        else:
            value, unstable = renormalize_weak(imperfect[k], dens[0], dens[1], floor)
        points.append(OtocPoint(float(t), complex(ideal[k]), complex(imperfect[k]), dens, value, unstable))
    return OtocSeries(points, dict(metadata))


def interferometric_series(
    psi: StateVector,
    ideal_evo: Evolution,
    imperfect_evo: Evolution,
    pair: ButterflyPair,
    times: Sequence[float],
    floor: float = DEFAULT_FLOOR,
    metadata: dict | None = None,
) -> OtocSeries:
    ts = _check_times(times)
    ideal = ideal_series(psi, ideal_evo, pair, ts)
    num, den = interferometric_components(psi, imperfect_evo, pair, ts)
    return _assemble(ts, ideal, num, [den], floor, metadata or {})


def weak_components(
    psi: StateVector,
    h1: HamiltonianSpec,
    h2: HamiltonianSpec,
    h3: HamiltonianSpec,
    pair: ButterflyPair,
    times: Sequence[float],
    cfg: PropagatorConfig = DEFAULT_CONFIG,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``F^weak(W,V,W,V)``, ``F^weak(1,V,1,V)`` and ``F^weak(W,1,W,1)`` on a grid."""
    ts = _check_times(times)
    _check_n(psi, h1, h2, h3)
    n = psi.n
    w, v = pair.w, pair.v
    b2, b3 = h2.norm_bound(), h3.norm_bound()
    fwd = HamiltonianEvolution(h1, h1, cfg)
    out = ([], [], [])
    for t, (u_psi, u_vpsi) in _forward_sweep(fwd, [psi.amps, apply_operator(v, psi.amps, n)], ts):

        def u2dag(x):
            return expm_multiply_array(h2.operator, x, -t, b2, cfg)

        def u3(x):
            return expm_multiply_array(h3.operator, x, t, b3, cfg)

        with _at_time(t):
            bra = u3(u2dag(u_psi))
            # (A,B,C,D) = (W,V,W,V), (1,V,1,V), (W,1,W,1)
            k_wvwv = u3(apply_operator(v, u2dag(apply_operator(w, u_vpsi, n)), n, dagger=True))
            k_1v1v = u3(apply_operator(v, u2dag(u_vpsi), n, dagger=True))
            k_w1w1 = u3(u2dag(apply_operator(w, u_psi, n)))
        out[0].append(np.vdot(apply_operator(w, bra, n), k_wvwv))
        out[1].append(np.vdot(bra, k_1v1v))
        out[2].append(np.vdot(apply_operator(w, bra, n), k_w1w1))
    return tuple(np.array(o, dtype=complex) for o in out)


def weak_series(
    psi: StateVector,
    h: HamiltonianSpec,
    h1: HamiltonianSpec,
    h2: HamiltonianSpec,
    h3: HamiltonianSpec,
    pair: ButterflyPair,
    times: Sequence[float],
    floor: float = DEFAULT_FLOOR,
    cfg: PropagatorConfig = DEFAULT_CONFIG,
    metadata: dict | None = None,
) -> OtocSeries:
    ts = _check_times(times)
    ideal = ideal_series(psi, HamiltonianEvolution(h, h, cfg), pair, ts)
    f_wvwv, f_1v1v, f_w1w1 = weak_components(psi, h1, h2, h3, pair, ts, cfg)
    return _assemble(ts, ideal, f_wvwv, [f_1v1v, f_w1w1], floor, metadata or {})


def open_system_otoc_series(
    p: OpenSystemParams,
    pair: ButterflyPair,
    psi: StateVector,
    times: Sequence[float],
    floor: float = DEFAULT_FLOOR,
    cfg: PropagatorConfig = DEFAULT_CONFIG,
    metadata: dict | None = None,
) -> OtocSeries:
    """Ideal: full reversal of ``H_SE``. Imperfect: forward ``H_SE``, backward
    ``exp(+i H_2 t)`` with only the system chain reversed."""
    n = 2 * p.nS
    for op in (pair.w, pair.v):
        if any(s >= p.nS for s in operator_sites(op, n)):
            raise ValueError("butterfly operators must act on system qubits only")
    if psi.n != n:
        raise ValueError(f"open-system state must have {n} qubits, got {psi.n}")
    h_se, h2 = build_open_system(p)
    meta = {"model": "open-system", "nS": p.nS, "Jc": p.Jc}
    meta.update(metadata or {})
    return interferometric_series(
        psi, HamiltonianEvolution(h_se, h_se, cfg), HamiltonianEvolution(h_se, h2, cfg), pair, times, floor, meta
    )


# --- shot averaging -------------------------------------------------------------------------------

@dataclass
class ShotAverage:
    series: OtocSeries
    numerators: np.ndarray  # (n_shots, n_times)
    denominators: np.ndarray

    def average_of_ratios(self) -> np.ndarray:
        return np.mean(self.numerators / self.denominators, axis=0)


def shot_seeds(base_seed: int, n_shots: int) -> list[tuple[int, int]]:
    """Per-shot ``(H1 seed, H2 seed)``; shot ``s`` derives from ``base_seed + s``."""
    return [tuple(derive_seeds(base_seed + s, 2)) for s in range(n_shots)]


def make_imperfect_evolution(
    params: PowerLawIsingParams,
    epsilon: float,
    seeds: tuple[int, int],
    floquet_dt: float | None = None,
    cfg: PropagatorConfig = DEFAULT_CONFIG,
) -> Evolution:
    d1 = draw_perturbation(epsilon, params.n, seeds[0])
    d2 = draw_perturbation(epsilon, params.n, seeds[1])
    if floquet_dt is not None:
        return FloquetEvolution(floquet_from_ising(params, d1, floquet_dt), floquet_from_ising(params, d2, floquet_dt))
    base = build_power_law_ising(params)
    return HamiltonianEvolution(perturbed_hamiltonian(base, d1), perturbed_hamiltonian(base, d2), cfg)


def make_ideal_evolution(params: PowerLawIsingParams, floquet_dt: float | None = None, cfg: PropagatorConfig = DEFAULT_CONFIG) -> Evolution:
    if floquet_dt is not None:
        return FloquetEvolution(floquet_from_ising(params, None, floquet_dt))
    h = build_power_law_ising(params)
    return HamiltonianEvolution(h, h, cfg)


def shot_averaged_renormalization(
    psi: StateVector,
    params: PowerLawIsingParams,
    pair: ButterflyPair,
    times: Sequence[float],
    epsilon: float,
    n_shots: int,
    base_seed: int,
    floquet_dt: float | None = 0.20,
    floor: float = DEFAULT_FLOOR,
    cfg: PropagatorConfig = DEFAULT_CONFIG,
    map_fn: Callable = map,
) -> ShotAverage:
    """Average ``F^int(W,V)`` and ``F^int(1,V)`` separately over shots with fresh
    perturbations, then take the ratio of the averages.

    ``map_fn`` may be a parallel map; results are aggregated in shot order.
    """
    if n_shots < 1:
        raise ValueError(f"n_shots must be at least 1, got {n_shots}")
    ts = _check_times(times)
    seeds = shot_seeds(base_seed, n_shots)

    def one_shot(s):
        evo = make_imperfect_evolution(params, epsilon, s, floquet_dt, cfg)
        return interferometric_components(psi, evo, pair, ts)

    results = list(map_fn(one_shot, seeds))
    nums = np.array([r[0] for r in results])
    dens = np.array([r[1] for r in results])
    ideal = ideal_series(psi, make_ideal_evolution(params, floquet_dt, cfg), pair, ts)
    num_avg = _ordered_mean(nums)
    den_avg = _ordered_mean(dens)
    meta = {"epsilon": epsilon, "n_shots": n_shots, "base_seed": base_seed, "floquet_dt": floquet_dt}
    return ShotAverage(_assemble(ts, ideal, num_avg, [den_avg], floor, meta), nums, dens)


def _ordered_mean(a: np.ndarray) -> np.ndarray:
    # compensated sums in a fixed order, independent of how shots were scheduled
    re = [math.fsum(col) / a.shape[0] for col in a.real.T]
    im = [math.fsum(col) / a.shape[0] for col in a.imag.T]
    return np.array(re) + 1j * np.array(im)


def estimate_scrambling_time(series: OtocSeries | Sequence[tuple[float, complex]], threshold: float = 0.5) -> float:
    """First grid time with ``|1 - ideal| >= threshold``; ``inf`` if never reached."""
    if not 0 < threshold < 1:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    if isinstance(series, OtocSeries):
        pairs = list(zip(series.t, series.ideal))
    else:
        pairs = list(series)
    if not pairs:
        raise ValueError("empty series")
    for t, f in pairs:
        if abs(1 - f) >= threshold:
            return float(t)
    return math.inf
