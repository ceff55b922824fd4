"""Renormalized out-of-time-ordered correlators under imperfect time reversal."""
from otoc_lab.hamiltonians import (
    FloquetSpec,
    HamiltonianSpec,
    OpenSystemParams,
    PerturbationDraw,
    PowerLawIsingParams,
    build_all_to_all_ising,
    build_open_system,
    build_power_law_ising,
    derive_seeds,
    draw_perturbation,
    floquet_from_ising,
    perturbed_hamiltonian,
)
from otoc_lab.propagate import PropagationError, PropagatorConfig, evolve, evolve_floquet
from otoc_lab.qstate import (
    PauliString,
    SingleQubitUnitary,
    StateVector,
    apply_pauli_string,
    apply_single_qubit,
    expectation,
    inner_product,
    make_all_plus_x,
    make_all_plus_y,
    make_basis_state,
    make_random_state,
)
from otoc_lab.runner import __version__

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
