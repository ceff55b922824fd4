"""Dense state vectors of n qubits and matrix-free Pauli / single-qubit kernels.

Qubit ``j`` is bit ``j`` of the amplitude index (little-endian), so the
computational basis state ``|b_{n-1} ... b_1 b_0>`` lives at index
``sum_j b_j 2**j``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

MAX_QUBITS = 24
NORM_TOL = 1e-10
UNITARY_TOL = 1e-12

AXES = ("X", "Y", "Z")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class StateVector:
    n: int
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not 1 <= self.n <= MAX_QUBITS:
            raise ValueError(f"qubit count must be in [1, {MAX_QUBITS}], got {self.n}")
        amps = np.asarray(self.amps)
        if amps.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} amplitudes, got shape {amps.shape}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm={norm!r})")
        object.__setattr__(self, "amps", _frozen(amps))

    @classmethod
    def from_array(cls, amps, normalize: bool = True) -> "StateVector":
        amps = np.asarray(amps, dtype=np.complex128)
        n = int(amps.size).bit_length() - 1
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(n, amps)

    @property
    def dim(self) -> int:
        return 1 << self.n

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


@dataclass(frozen=True)
class PauliString:
    """``coeff * prod_j sigma^{axis_j}_{site_j}``; an empty factor list is ``coeff * 1``."""

    coeff: float
    factors: tuple[tuple[int, str], ...] = ()

    def __post_init__(self):
        factors = tuple((int(s), str(a).upper()) for s, a in self.factors)
        sites = [s for s, _ in factors]
        if len(set(sites)) != len(sites):
            raise ValueError(f"repeated site in Pauli string {factors}")
        for s, a in factors:
            if s < 0:
                raise ValueError(f"negative site {s}")
            if a not in AXES:
                raise ValueError(f"unknown Pauli axis {a!r}")
        object.__setattr__(self, "factors", tuple(sorted(factors)))
        object.__setattr__(self, "coeff", float(self.coeff))

    @classmethod
    def single(cls, site: int, axis: str, coeff: float = 1.0) -> "PauliString":
        return cls(coeff, ((site, axis),))

    @property
    def sites(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self.factors)

    @property
    def axes(self) -> str:
        return "".join(a for _, a in self.factors)

    def masks(self) -> tuple[int, int, int]:
        """Return ``(xmask, zmask, n_y)`` with the operator equal to
        ``coeff * i**n_y * X^xmask Z^zmask`` (Z applied first)."""
        x = z = ny = 0
        for s, a in self.factors:
            if a in "XY":
                x |= 1 << s
            if a in "YZ":
                z |= 1 << s
            if a == "Y":
                ny += 1
        return x, z, ny

    def check_sites(self, n: int) -> None:
        for s in self.sites:
            if s >= n:
                raise ValueError(f"site {s} out of range for {n} qubits")


@dataclass(frozen=True)
class SingleQubitUnitary:
    site: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.shape != (2, 2):
            raise ValueError(f"single-qubit matrix must be 2x2, got {m.shape}")
        if np.max(np.abs(m.conj().T @ m - np.eye(2))) > UNITARY_TOL:
            raise ValueError("matrix is not unitary")
        if self.site < 0:
            raise ValueError(f"negative site {self.site}")
        object.__setattr__(self, "matrix", _frozen(m))

    def dagger(self) -> "SingleQubitUnitary":
        return SingleQubitUnitary(self.site, self.matrix.conj().T)


# --- constructors ---------------------------------------------------------

def make_basis_state(n: int, bitstring: int) -> StateVector:
    if not 0 <= bitstring < (1 << n):
        raise ValueError(f"bitstring {bitstring} out of range for {n} qubits")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[bitstring] = 1.0
    return StateVector(n, amps)


def product_state(single: Sequence[complex], n: int) -> StateVector:
    """Tensor power of one normalized single-qubit state."""
    q = np.asarray(single, dtype=np.complex128)
    q = q / np.linalg.norm(q)
    amps = np.ones(1, dtype=np.complex128)
    for _ in range(n):
        # new qubit becomes the most significant bit
        amps = np.kron(q, amps)
    return StateVector(n, amps)


def make_all_plus_y(n: int) -> StateVector:
    return product_state((1.0, 1.0j), n)


def make_all_plus_x(n: int) -> StateVector:
    return product_state((1.0, 1.0), n)


def make_random_state(n: int, seed: int) -> StateVector:
    rng = np.random.default_rng(seed)
    dim = 1 << n
    amps = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector(n, amps / np.linalg.norm(amps))


# --- array kernels ----------------------------------------------------------

def _site_view(amps: np.ndarray, n: int, site: int) -> np.ndarray:
    # axis 1 of the view is the bit of `site`
    return amps.reshape(1 << (n - site - 1), 2, 1 << site)


def pauli_phase(n: int, xmask: int, zmask: int, ny: int, coeff: complex = 1.0) -> np.ndarray:
    """Coefficient vector ``c`` with ``(P psi)[m] = c[m] * psi[m ^ xmask]``."""
    idx = np.arange(1 << n, dtype=np.int64) ^ xmask
    sign = np.ones(1 << n)
    for j in range(n):
        if zmask >> j & 1:
            sign *= 1 - 2 * ((idx >> j) & 1)
    return coeff * (1j) ** ny * sign


def flip_bits(amps: np.ndarray, n: int, xmask: int) -> np.ndarray:
    """``out[m] = amps[m ^ xmask]``."""
    if xmask == 0:
        return amps
    if xmask & (xmask - 1) == 0:
        site = xmask.bit_length() - 1
        return _site_view(amps, n, site)[:, ::-1, :].reshape(-1)
    return amps[np.arange(1 << n, dtype=np.int64) ^ xmask]


def apply_pauli_array(amps: np.ndarray, n: int, p: PauliString) -> np.ndarray:
    p.check_sites(n)
    x, z, ny = p.masks()
    if x == 0 and z == 0:
        return p.coeff * amps
    return pauli_phase(n, x, z, ny, p.coeff) * flip_bits(amps, n, x)


def apply_single_array(amps: np.ndarray, n: int, site: int, matrix: np.ndarray) -> np.ndarray:
    if not 0 <= site < n:
        raise ValueError(f"site {site} out of range for {n} qubits")
    v = _site_view(amps, n, site)
    return np.einsum("ab,ibj->iaj", matrix, v).reshape(-1)


# --- value-semantics interface ------------------------------------------------

def apply_pauli_string(psi: StateVector, p: PauliString) -> StateVector:
    """Return ``p|psi>``; the result is normalized only when ``|coeff| == 1``."""
    out = apply_pauli_array(psi.amps, psi.n, p)
    if abs(abs(p.coeff) - 1.0) > NORM_TOL:
        # non-unit coefficients leave the unit sphere; return the raw vector
        return _UnnormalizedState(psi.n, out)
    return StateVector(psi.n, out)


def apply_single_qubit(psi: StateVector, u: SingleQubitUnitary) -> StateVector:
    return StateVector(psi.n, apply_single_array(psi.amps, psi.n, u.site, u.matrix))


def inner_product(a: StateVector, b: StateVector) -> complex:
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n} qubits")
    return complex(np.vdot(a.amps, b.amps))


def expectation(psi: StateVector, p: PauliString) -> complex:
    return complex(np.vdot(psi.amps, apply_pauli_array(psi.amps, psi.n, p)))


@dataclass(frozen=True)
class _UnnormalizedState(StateVector):
    # Pauli strings with |coeff| != 1 scale the norm; skip the unit-norm check.
    def __post_init__(self):
        amps = np.asarray(self.amps)
        if amps.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} amplitudes, got shape {amps.shape}")
        object.__setattr__(self, "amps", _frozen(amps))
