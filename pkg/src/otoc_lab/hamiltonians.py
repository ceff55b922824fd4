"""Hamiltonian families: power-law quantum Ising chain, random perturbations,
all-to-all Ising, two-chain open system, and the Floquet pulse split.

Sites are 0-based in every ``PauliString``. Sign patterns that the model
defines on 1-based sites (the staggered longitudinal field) are converted
here.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable

import numpy as np

from otoc_lab.qstate import MAX_QUBITS, PauliString

RNG_NAME = "numpy.random.default_rng (PCG64)"


@dataclass(frozen=True)
class PowerLawIsingParams:
    n: int = 14
    J: float = 1.0
    zeta: float = 6.0
    ell0: int = 5
    hx: float = 1.05
    hz_amplitude: float = 0.375

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need at least 2 sites, got n={self.n}")
        if not 1 <= self.ell0 < self.n:
            raise ValueError(f"ell0 must satisfy 1 <= ell0 < n, got ell0={self.ell0}, n={self.n}")
        if not (np.isfinite(self.J) and np.isfinite(self.zeta)):
            raise ValueError("J and zeta must be finite")


@dataclass(frozen=True, eq=False)
class HamiltonianSpec:
    n: int
    terms: tuple[PauliString, ...]

    def __post_init__(self):
        if not 1 <= self.n <= MAX_QUBITS:
            raise ValueError(f"qubit count must be in [1, {MAX_QUBITS}], got {self.n}")
        terms = tuple(self.terms)
        for t in terms:
            t.check_sites(self.n)
            if not np.isfinite(t.coeff):
                raise ValueError(f"non-finite coefficient in {t}")
        object.__setattr__(self, "terms", terms)

    def __eq__(self, other):
        if not isinstance(other, HamiltonianSpec):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, self.terms))

    def __len__(self):
        return len(self.terms)

    def __add__(self, other: "HamiltonianSpec") -> "HamiltonianSpec":
        if self.n != other.n:
            raise ValueError(f"qubit count mismatch: {self.n} vs {other.n}")
        return HamiltonianSpec(self.n, self.terms + other.terms)

    def scaled(self, factor: float) -> "HamiltonianSpec":
        return HamiltonianSpec(self.n, tuple(PauliString(factor * t.coeff, t.factors) for t in self.terms))

    def norm_bound(self) -> float:
        """Triangle-inequality bound on the operator norm."""
        return float(sum(abs(t.coeff) for t in self.terms))

    def is_hermitian(self) -> bool:
        return all(isinstance(t.coeff, float) for t in self.terms)

    @cached_property
    def operator(self):
        from otoc_lab.propagate import PauliSumOperator

        return PauliSumOperator.from_terms(self.n, self.terms)

    def to_dense(self) -> np.ndarray:
        """Dense matrix by brute-force Kronecker products (test/oracle use only)."""
        single = {
            "I": np.eye(2, dtype=complex),
            "X": np.array([[0, 1], [1, 0]], dtype=complex),
            "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
            "Z": np.array([[1, 0], [0, -1]], dtype=complex),
        }
        dim = 1 << self.n
        out = np.zeros((dim, dim), dtype=complex)
        for t in self.terms:
            labels = ["I"] * self.n
            for s, a in t.factors:
                labels[s] = a
            m = np.ones((1, 1), dtype=complex)
            # kron(left, right): left factor is the more significant qubit
            for s in range(self.n):
                m = np.kron(single[labels[s]], m)
            out += t.coeff * m
        return out


@dataclass(frozen=True)
class PerturbationDraw:
    epsilon: float
    eta_zz: np.ndarray = field(repr=False)
    eta_x: np.ndarray = field(repr=False)
    eta_z: np.ndarray = field(repr=False)
    seed: int = 0

    def __post_init__(self):
        for name in ("eta_zz", "eta_x", "eta_z"):
            a = np.array(getattr(self, name), dtype=float)
            if a.size and np.max(np.abs(a)) > 0.5:
                raise ValueError(f"{name} values must lie in [-1/2, 1/2]")
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if self.eta_zz.size != self.eta_x.size - 1 or self.eta_z.size != self.eta_x.size:
            raise ValueError("inconsistent perturbation array lengths")

    @property
    def n(self) -> int:
        return self.eta_x.size


@dataclass(frozen=True)
class OpenSystemParams:
    system: PowerLawIsingParams
    env: PowerLawIsingParams
    Jc: float = 0.1

    def __post_init__(self):
        if self.system.n != self.env.n:
            raise ValueError(f"system and environment chains must have equal length ({self.system.n} vs {self.env.n})")

    @property
    def nS(self) -> int:
        return self.system.n


@dataclass(frozen=True)
class FloquetSpec:
    z_hamiltonian: HamiltonianSpec
    x_hamiltonian: HamiltonianSpec
    dt: float = 0.20

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"pulse duration must be positive, got {self.dt}")
        if self.z_hamiltonian.n != self.x_hamiltonian.n:
            raise ValueError("pulse Hamiltonians act on different qubit counts")
        if any(set(t.axes) - {"Z"} for t in self.z_hamiltonian.terms):
            raise ValueError("z pulse may only contain Z-axis Paulis")
        if any(set(t.axes) - {"X"} for t in self.x_hamiltonian.terms):
            raise ValueError("x pulse may only contain X-axis Paulis")

    @property
    def n(self) -> int:
        return self.z_hamiltonian.n


def zz(i: int, j: int, c: float) -> PauliString:
    return PauliString(c, ((i, "Z"), (j, "Z")))


def build_power_law_ising(p: PowerLawIsingParams, offset: int = 0) -> HamiltonianSpec:
    """``-sum J/l^zeta Z_r Z_{r+l} - hx sum X_r - sum hz_r Z_r`` with ``hz_r = hz_amplitude (-1)^r``
    on 1-based ``r``. ``offset`` shifts every site (used to place a chain inside a larger register)."""
    terms = []
    for ell in range(1, p.ell0 + 1):
        c = -p.J / ell**p.zeta
        for r in range(p.n - ell):
            terms.append(zz(r + offset, r + ell + offset, c))
    for r in range(p.n):
        terms.append(PauliString.single(r + offset, "X", -p.hx))
    for r in range(p.n):
        # 0-based r is site r+1 in the model's labelling
        terms.append(PauliString.single(r + offset, "Z", -p.hz_amplitude * (-1) ** (r + 1)))
    return HamiltonianSpec(p.n + offset, tuple(terms))


def draw_perturbation(epsilon: float, n: int, seed: int) -> PerturbationDraw:
    if epsilon < 0:
        raise ValueError(f"epsilon must be non-negative, got {epsilon}")
    rng = np.random.default_rng(seed)
    eta_zz = rng.uniform(-0.5, 0.5, n - 1)
    eta_x = rng.uniform(-0.5, 0.5, n)
    eta_z = rng.uniform(-0.5, 0.5, n)
    return PerturbationDraw(float(epsilon), eta_zz, eta_x, eta_z, int(seed))


def derive_seeds(seed: int, count: int) -> list[int]:
    """Independent child seeds for the several Hamiltonians of one run."""
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(count, dtype=np.uint64)]


def perturbation_terms(d: PerturbationDraw, offset: int = 0) -> list[PauliString]:
    eps = d.epsilon
    terms = [zz(r + offset, r + 1 + offset, eps * e) for r, e in enumerate(d.eta_zz)]
    terms += [PauliString.single(r + offset, "X", eps * e) for r, e in enumerate(d.eta_x)]
    terms += [PauliString.single(r + offset, "Z", eps * e) for r, e in enumerate(d.eta_z)]
    return terms


def perturbed_hamiltonian(base: HamiltonianSpec, d: PerturbationDraw) -> HamiltonianSpec:
    if d.n != base.n:
        raise ValueError(f"perturbation drawn for {d.n} sites, Hamiltonian has {base.n}")
    if d.epsilon == 0:
        return base
    return HamiltonianSpec(base.n, base.terms + tuple(perturbation_terms(d)))


def build_all_to_all_ising(n: int, J: float = 1.0) -> HamiltonianSpec:
    """``(J/n) sum_{i<j} Z_i Z_j``."""
    if n < 2:
        raise ValueError(f"all-to-all Ising needs n >= 2, got {n}")
    return HamiltonianSpec(n, tuple(zz(i, j, J / n) for i, j in combinations(range(n), 2)))


def coupling_terms(nS: int, Jc: float) -> list[PauliString]:
    return [zz(i, i + nS, Jc) for i in range(nS)]


def build_open_system(p: OpenSystemParams) -> tuple[HamiltonianSpec, HamiltonianSpec]:
    """Return ``(H_SE, H_2)`` on ``2 nS`` qubits, with ``H_2 = H_S - H_E - Jc sum Z_i Z_{i+nS}``.

    The protocol's backward step applies ``exp(+i H_2 t)``, which reverses the
    system chain only.
    """
    nS = p.nS
    n = 2 * nS
    hs = build_power_law_ising(p.system).terms
    he = build_power_law_ising(p.env, offset=nS).terms
    hc = tuple(coupling_terms(nS, p.Jc)) if p.Jc != 0 else ()
    forward = HamiltonianSpec(n, hs + he + hc)
    backward = HamiltonianSpec(n, hs + tuple(PauliString(-t.coeff, t.factors) for t in he + hc))
    return forward, backward


def split_axes(terms: Iterable[PauliString], n: int) -> tuple[HamiltonianSpec, HamiltonianSpec]:
    z_terms, x_terms = [], []
    for t in terms:
        axes = set(t.axes)
        if axes <= {"Z"}:
            z_terms.append(t)
        elif axes == {"X"}:
            x_terms.append(t)
        else:
            raise ValueError(f"term {t} mixes axes; cannot assign it to a pulse")
    return HamiltonianSpec(n, tuple(z_terms)), HamiltonianSpec(n, tuple(x_terms))


def floquet_from_ising(p: PowerLawIsingParams, d: PerturbationDraw | None = None, dt: float = 0.20) -> FloquetSpec:
    h = build_power_law_ising(p)
    if d is not None:
        h = perturbed_hamiltonian(h, d)
    z, x = split_axes(h.terms, h.n)
    return FloquetSpec(z, x, dt)
