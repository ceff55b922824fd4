import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from otoc_lab.hamiltonians import (
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
from otoc_lab.qstate import PauliString


def expected_ising_terms(n, ell0):
    # count by brute-force enumeration of all (r, r + l) pairs
    zz = sum(1 for ell in range(1, ell0 + 1) for r in range(n) if r + ell < n)
    return zz + 2 * n


def test_default_params():
    p = PowerLawIsingParams()
    assert (p.n, p.J, p.zeta, p.ell0, p.hx, p.hz_amplitude) == (14, 1.0, 6.0, 5, 1.05, 0.375)


@pytest.mark.parametrize("n,ell0", [(2, 1), (5, 4), (8, 5), (14, 5)])
def test_term_count(n, ell0):
    h = build_power_law_ising(PowerLawIsingParams(n=n, ell0=ell0))
    assert len(h) == expected_ising_terms(n, ell0)


def test_coefficients():
    h = build_power_law_ising(PowerLawIsingParams(n=6, ell0=3))
    coeffs = {(t.sites, t.axes): t.coeff for t in h.terms}
    assert coeffs[((0, 1), "ZZ")] == -1.0
    assert np.isclose(coeffs[((1, 4), "ZZ")], -1 / 3**6)
    assert ((0, 4), "ZZ") not in coeffs
    assert coeffs[((2,), "X")] == -1.05
    # staggered field: site 1 (index 0) has hz = -0.375, so the term is +0.375 Z
    assert coeffs[((0,), "Z")] == 0.375
    assert coeffs[((1,), "Z")] == -0.375


def test_invalid_params():
    with pytest.raises(ValueError):
        PowerLawIsingParams(n=5, ell0=5)
    with pytest.raises(ValueError):
        PowerLawIsingParams(n=1, ell0=1)
    with pytest.raises(ValueError):
        HamiltonianSpec(2, (PauliString.single(2, "X"),))


def test_draw_is_seeded_and_bounded():
    a, b = draw_perturbation(0.2, 10, 3), draw_perturbation(0.2, 10, 3)
    assert np.array_equal(a.eta_zz, b.eta_zz) and np.array_equal(a.eta_z, b.eta_z)
    assert a.eta_zz.size == 9 and a.eta_x.size == 10
    assert np.all(np.abs(np.concatenate([a.eta_zz, a.eta_x, a.eta_z])) <= 0.5)
    with pytest.raises(ValueError):
        draw_perturbation(-0.1, 4, 0)
    with pytest.raises(ValueError):
        PerturbationDraw(0.1, np.zeros(2), np.array([0.7, 0, 0]), np.zeros(3))


def test_derived_seeds_independent():
    s = derive_seeds(0, 3)
    assert len(set(s)) == 3 and s == derive_seeds(0, 3)
    assert derive_seeds(1, 2) != s[:2]


def test_zero_epsilon_is_unperturbed():
    base = build_power_law_ising(PowerLawIsingParams(n=6))
    assert perturbed_hamiltonian(base, draw_perturbation(0.0, 6, 11)) == base


def test_perturbation_adds_scaled_terms():
    base = build_power_law_ising(PowerLawIsingParams(n=4, ell0=2))
    d = draw_perturbation(0.3, 4, 5)
    h = perturbed_hamiltonian(base, d)
    diff = h.to_dense() - base.to_dense()
    assert np.allclose(diff, diff.conj().T)
    assert np.isclose(np.trace(diff @ diff).real / 16, 0.09 * np.sum(np.concatenate([d.eta_zz, d.eta_x, d.eta_z]) ** 2))


def test_all_to_all():
    h = build_all_to_all_ising(5, 1.0)
    assert len(h) == 10
    assert all(np.isclose(t.coeff, 0.2) and t.axes == "ZZ" for t in h.terms)


def test_open_system_structure():
    chain = PowerLawIsingParams(n=7, ell0=5)
    fwd, bwd = build_open_system(OpenSystemParams(chain, chain, 0.1))
    assert fwd.n == bwd.n == 14
    # two chains plus one coupling per system site
    assert len(fwd) == len(bwd) == 2 * expected_ising_terms(7, 5) + 7 == 75


def test_open_system_dense():
    chain = PowerLawIsingParams(n=4, ell0=2)
    fwd, bwd = build_open_system(OpenSystemParams(chain, chain, 0.1))
    hs = build_power_law_ising(chain).to_dense()
    dense_s = np.kron(np.eye(2**4), hs)
    dense_e = np.kron(hs, np.eye(2**4))
    coupling = fwd.to_dense() - dense_s - dense_e
    assert np.allclose(bwd.to_dense(), dense_s - dense_e - coupling)


def test_open_system_needs_equal_chains():
    with pytest.raises(ValueError):
        OpenSystemParams(PowerLawIsingParams(n=5, ell0=2), PowerLawIsingParams(n=6, ell0=2))


def test_floquet_split_sums_to_h():
    p = PowerLawIsingParams(n=5, ell0=3)
    d = draw_perturbation(0.2, 5, 1)
    f = floquet_from_ising(p, d, 0.2)
    h = perturbed_hamiltonian(build_power_law_ising(p), d)
    assert np.allclose(f.z_hamiltonian.to_dense() + f.x_hamiltonian.to_dense(), h.to_dense())
    assert np.allclose(np.diag(np.diag(f.z_hamiltonian.to_dense())), f.z_hamiltonian.to_dense())


def test_operator_matches_dense():
    h = perturbed_hamiltonian(build_power_law_ising(PowerLawIsingParams(n=5, ell0=3)), draw_perturbation(0.3, 5, 2))
    v = np.random.default_rng(0).standard_normal(32) + 0j
    assert np.allclose(h.operator.matvec(v), h.to_dense() @ v)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 7), st.floats(0.0, 1.0), st.integers(0, 2**32 - 1))
def test_hamiltonian_hermitian(n, eps, seed):
    h = perturbed_hamiltonian(build_power_law_ising(PowerLawIsingParams(n=n, ell0=min(5, n - 1))), draw_perturbation(eps, n, seed))
    assert h.is_hermitian()
    if n <= 5:
        m = h.to_dense()
        assert np.allclose(m, m.conj().T)
    assert h.norm_bound() >= 0
