"""Matrix-free action of exp(-iHt) on state vectors.

``H`` is applied through Pauli-string kernels grouped by X-flip mask. The
exponential uses Lanczos (H is Hermitian) with an a-posteriori error
estimate and adaptive time substepping. The Floquet stepper is exact: each
pulse Hamiltonian is diagonal in the Z basis or in the X basis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal

from otoc_lab.qstate import PauliString, StateVector, flip_bits, pauli_phase

if TYPE_CHECKING:
    from otoc_lab.hamiltonians import FloquetSpec, HamiltonianSpec


class PropagationError(ArithmeticError):
    """Krylov iteration failed to reach the requested accuracy."""

    def __init__(self, message: str, residual: float, t: float | None = None):
        super().__init__(message, residual)
        self.message = message
        self.residual = residual
        self.t = t

    def __str__(self):
        at = "" if self.t is None else f" at t={self.t:g}"
        return f"{self.message}{at} (achieved residual {self.residual:.3e})"


@dataclass(frozen=True)
class PropagatorConfig:
    tolerance: float = 1e-10
    max_krylov_dim: int = 64
    # max |tau| * ||H||_bound per internal substep
    substep_max: float = 40.0

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_krylov_dim < 2:
            raise ValueError("max_krylov_dim must be at least 2")
        if not self.substep_max > 0:
            raise ValueError("substep_max must be positive")


DEFAULT_CONFIG = PropagatorConfig()


class PauliSumOperator:
    """Hermitian sum of Pauli strings as ``diag * psi + sum_k c_k * psi[m ^ x_k]``."""

    def __init__(self, n: int, diagonal: np.ndarray, flips: list[tuple[int, np.ndarray | complex]]):
        self.n = n
        self.diagonal = diagonal
        self.flips = flips

    @classmethod
    def from_terms(cls, n: int, terms: Sequence[PauliString]) -> "PauliSumOperator":
        dim = 1 << n
        diagonal = np.zeros(dim)
        groups: dict[int, np.ndarray] = {}
        for t in terms:
            x, z, ny = t.masks()
            if t.coeff == 0:
                continue
            if x == 0:
                diagonal += pauli_phase(n, 0, z, ny, t.coeff).real
            else:
                c = pauli_phase(n, x, z, ny, t.coeff)
                groups[x] = groups[x] + c if x in groups else c
        flips: list[tuple[int, np.ndarray | complex]] = []
        for x, c in groups.items():
            if np.all(c == c[0]):
                c0 = c[0]
                flips.append((x, float(c0.real) if c0.imag == 0 else complex(c0)))
            else:
                flips.append((x, c))
        return cls(n, diagonal, flips)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diagonal * v
        for x, c in self.flips:
            out += c * flip_bits(v, self.n, x)
        return out

    __call__ = matvec

    def is_diagonal(self) -> bool:
        return not self.flips


def _expm_tridiag_e1(alpha: np.ndarray, beta: np.ndarray, tau: float) -> np.ndarray:
    """``exp(-i tau T) e_1`` for the real symmetric tridiagonal ``T``."""
    if alpha.size == 1:
        return np.array([np.exp(-1j * tau * alpha[0])])
    w, s = eigh_tridiagonal(alpha, beta)
    return s @ (np.exp(-1j * tau * w) * s[0])


def _lanczos_step(matvec, v: np.ndarray, tau: float, m_max: int, tol: float, scale: float):
    """One Krylov approximation of ``exp(-i tau H) v`` for unit ``v``.

    Returns ``(result, error_estimate)``; ``result`` is None when the error
    estimate never fell below ``tol`` within ``m_max`` vectors.
    """
    dim = v.size
    m_max = min(m_max, dim)
    Q = np.empty((m_max, dim), dtype=np.complex128)
    Q[0] = v
    alpha = np.zeros(m_max)
    beta = np.zeros(m_max)
    err = math.inf
    for j in range(m_max):
        w = matvec(Q[j])
        alpha[j] = np.vdot(Q[j], w).real
        # full reorthogonalization, twice is enough
        for _ in range(2):
            w -= Q[: j + 1].T @ (Q[: j + 1] @ w.conj()).conj()
        b = float(np.linalg.norm(w))
        y = _expm_tridiag_e1(alpha[: j + 1], beta[:j], tau)
        if b <= 1e-13 * scale:
            # invariant subspace reached: the projection is exact
            return y @ Q[: j + 1], 0.0
        err = b * abs(y[j]) * max(abs(tau), 1.0)
        if err <= tol:
            return y @ Q[: j + 1], err
        if j + 1 < m_max:
            beta[j] = b
            Q[j + 1] = w / b
    return None, err


def expm_multiply_array(
    op: PauliSumOperator, v: np.ndarray, t: float, norm_bound: float, cfg: PropagatorConfig = DEFAULT_CONFIG
) -> np.ndarray:
    """``exp(-i t H) v``; the output is rescaled to exactly ``||v||``."""
    if t == 0:
        return v.copy()
    if op.is_diagonal():
        return np.exp(-1j * t * op.diagonal) * v
    v_norm = float(np.linalg.norm(v))
    if v_norm == 0:
        return v.copy()
    scale = max(norm_bound, 1e-300)
    direction = math.copysign(1.0, t)
    remaining = abs(t)
    tau = min(remaining, cfg.substep_max / scale)
    tau_max = tau
    min_tau = abs(t) * 1e-12
    w = v / v_norm
    while remaining > 0:
        tau = min(tau, remaining)
        # per-substep budget so the sum over substeps stays below tolerance
        budget = cfg.tolerance * max(tau / abs(t), 1e-3)
        out, err = _lanczos_step(op.matvec, w, direction * tau, cfg.max_krylov_dim, budget, scale)
        if out is None:
            if tau <= min_tau:
                raise PropagationError("Krylov substep did not converge", err)
            tau *= 0.5
            continue
        w = out / np.linalg.norm(out)
        remaining -= tau
        if remaining < 1e-15 * abs(t):
            break
        tau = min(tau * 1.25, tau_max)
    return w * v_norm


def evolve(psi: StateVector, h: "HamiltonianSpec", t: float, cfg: PropagatorConfig = DEFAULT_CONFIG) -> StateVector:
    """Return ``exp(-i H t) psi`` (negative ``t`` gives ``exp(+i H |t|) psi``)."""
    if h.n != psi.n:
        raise ValueError(f"Hamiltonian acts on {h.n} qubits, state has {psi.n}")
    if not math.isfinite(t):
        raise ValueError(f"non-finite time {t}")
    return StateVector(psi.n, expm_multiply_array(h.operator, psi.amps, t, h.norm_bound(), cfg))


def _hadamard_all(v: np.ndarray, n: int) -> np.ndarray:
    """Walsh-Hadamard transform (H on every qubit), orthonormal."""
    a = v.reshape((2,) * n)
    for axis in range(n):
        a0 = np.take(a, 0, axis=axis)
        a1 = np.take(a, 1, axis=axis)
        a = np.stack([a0 + a1, a0 - a1], axis=axis)
    return a.reshape(-1) * 2 ** (-n / 2)


class FloquetPulses:
    """Precomputed phase vectors for the two pulse unitaries of a FloquetSpec."""

    def __init__(self, f: "FloquetSpec"):
        self.n = f.n
        self.dt = f.dt
        z_diag = f.z_hamiltonian.operator.diagonal
        # X-only strings become Z-only strings after Hadamards on every qubit
        x_as_z = [PauliString(t.coeff, tuple((s, "Z") for s, _ in t.factors)) for t in f.x_hamiltonian.terms]
        x_diag = PauliSumOperator.from_terms(f.n, x_as_z).diagonal
        self.z_phase = np.exp(-1j * f.dt * z_diag)
        self.x_phase = np.exp(-1j * f.dt * x_diag)

    def forward(self, v: np.ndarray, steps: int) -> np.ndarray:
        for _ in range(steps):
            v = self.z_phase * v
            v = _hadamard_all(self.x_phase * _hadamard_all(v, self.n), self.n)
        return v

    def backward(self, v: np.ndarray, steps: int) -> np.ndarray:
        zc, xc = self.z_phase.conj(), self.x_phase.conj()
        for _ in range(steps):
            v = _hadamard_all(xc * _hadamard_all(v, self.n), self.n)
            v = zc * v
        return v


def evolve_floquet(psi: StateVector, f: "FloquetSpec", steps: int, direction: str = "forward") -> StateVector:
    """Forward: ``(e^{-iH_x dt} e^{-iH_z dt})^steps``; backward: its exact inverse."""
    if steps < 0:
        raise ValueError(f"steps must be non-negative, got {steps}")
    if f.n != psi.n:
        raise ValueError(f"Floquet model acts on {f.n} qubits, state has {psi.n}")
    pulses = FloquetPulses(f)
    if direction == "forward":
        out = pulses.forward(psi.amps, steps)
    elif direction == "backward":
        out = pulses.backward(psi.amps, steps)
    else:
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")
    return StateVector(psi.n, out / np.linalg.norm(out))
