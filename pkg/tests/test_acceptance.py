"""Acceptance checks, one test per criterion. Each prints a PASS/FAIL line with
the measured quantity. Run standalone with ``python tests/test_acceptance.py``."""
import math
import time

import numpy as np
import pytest
from scipy.linalg import expm

from otoc_lab import holographic as holo
from otoc_lab.hamiltonians import (
    HamiltonianSpec,
    OpenSystemParams,
    PowerLawIsingParams,
    build_all_to_all_ising,
    build_power_law_ising,
    derive_seeds,
    draw_perturbation,
    perturbed_hamiltonian,
)
from otoc_lab.propagate import evolve
from otoc_lab.protocols import (
    ButterflyPair,
    DepolarizationParams,
    GlobalXRotation,
    HamiltonianEvolution,
    control_depolarized_x,
    depolarized_v_expectation,
    estimate_scrambling_time,
    ideal_otoc,
    ideal_series,
    interferometric_components,
    interferometric_series,
    make_ideal_evolution,
    make_imperfect_evolution,
    open_system_otoc_series,
    recover_otoc_from_control,
    recover_otoc_from_depolarization,
    shot_averaged_renormalization,
    shot_seeds,
    weak_components,
    weak_series,
)
from otoc_lab.qstate import PauliString, make_all_plus_x, make_all_plus_y, make_random_state

RESULTS: dict[int, bool] = {}


@pytest.fixture
def report(capsys):
    def _report(k: int, ok: bool, detail: str):
        RESULTS[k] = bool(ok)
        with capsys.disabled():
            print(f"\n[criterion {k:2d}] {'PASS' if ok else 'FAIL'}: {detail}")
        return ok

    return _report


def _random_hamiltonian(n, rng, n_terms=10):
    terms = []
    for _ in range(n_terms):
        labels = rng.choice(list("IXYZ"), size=n)
        terms.append(PauliString(rng.normal(), tuple((s, a) for s, a in enumerate(labels) if a != "I")))
    return HamiltonianSpec(n, tuple(terms))


def test_c01_propagator_oracle(report):
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    worst = 0.0
    for k in range(20):
        n = 2 + k % 5
        h = _random_hamiltonian(n, rng)
        dense = h.to_dense()
        psi = make_random_state(n, k)
        for t in (0.1, 1.0, 5.0):
            err = np.linalg.norm(evolve(psi, h, t).amps - expm(-1j * t * dense) @ psi.amps)
            worst = max(worst, err)
    elapsed = time.perf_counter() - start
    ok = worst < 1e-9 and elapsed < 60
    report(1, ok, f"max 2-norm error {worst:.2e} (< 1e-9), {elapsed:.1f} s")
    assert ok


def test_c02_perfect_evolution_degenerates(report):
    n = 8
    params = PowerLawIsingParams(n=n)
    h = build_power_law_ising(params)
    psi = make_all_plus_y(n)
    pair = ButterflyPair.paulis(n - 1, 0)
    ts = np.arange(0, 10.0001, 0.25)
    start = time.perf_counter()
    ideal = ideal_series(psi, HamiltonianEvolution(h), pair, ts)
    evo0 = make_imperfect_evolution(params, 0.0, tuple(derive_seeds(1, 2)))
    num, den = interferometric_components(psi, evo0, pair, ts)
    hs = [perturbed_hamiltonian(h, draw_perturbation(0.0, n, s)) for s in derive_seeds(2, 3)]
    f_weak, d1, d2 = weak_components(psi, *hs, pair, ts)
    elapsed = time.perf_counter() - start
    err_int = max(np.max(np.abs(num - ideal)), np.max(np.abs(num / den - ideal)))
    err_weak = max(np.max(np.abs(f_weak - ideal)), np.max(np.abs(f_weak / (d1 * d2) - ideal)))
    ok = err_int < 5e-10 and err_weak < 5e-10 and elapsed < 120
    report(2, ok, f"interferometric err {err_int:.2e}, weak err {err_weak:.2e} (< 5e-10), {elapsed:.1f} s")
    assert ok


def test_c03_depolarization_recovery(report):
    n = 5
    h = build_all_to_all_ising(n)
    psi = make_all_plus_x(n)
    v = PauliString.single(1, "X")
    rng = np.random.default_rng(3)
    pq = rng.uniform(0.05, 1.0, size=(10, 2))
    worst = 0.0
    for phi in (0.1, 0.5):
        w = GlobalXRotation(phi)
        for t in (0.5, 1.7, 4.0):
            f = ideal_otoc(psi, h, ButterflyPair(w, v), t)
            for p, q in pq:
                dp = DepolarizationParams(p, q)
                f_wv = depolarized_v_expectation(psi, h, w, v, dp, t)
                f_1v = depolarized_v_expectation(psi, h, None, v, dp, t)
                worst = max(worst, abs(recover_otoc_from_depolarization(f_wv, f_1v, dp.v) - f))
    ok = worst < 1e-8
    report(3, ok, f"max |recovered - ideal| {worst:.2e} over 60 combinations (< 1e-8)")
    assert ok


def test_c04_control_qubit_recovery(report):
    n = 6
    h = build_power_law_ising(PowerLawIsingParams(n=n))
    psi = make_all_plus_y(n)
    pair = ButterflyPair.paulis(n - 1, 0)
    ps = np.random.default_rng(4).uniform(0.05, 1.0, 10)
    worst = 0.0
    for t in (1.0, 3.0, 6.0):
        f = ideal_otoc(psi, h, pair, t)
        for p in ps:
            x = control_depolarized_x(psi, h, pair, p, t)
            x11 = control_depolarized_x(psi, h, ButterflyPair(), p, t)
            worst = max(worst, abs(recover_otoc_from_control(x, x11) - f.real))
    ok = worst < 1e-8
    report(4, ok, f"max |<X> ratio - Re F| {worst:.2e} over 30 combinations (< 1e-8)")
    assert ok


def test_c05_identity_v_collapses(report):
    n = 8
    params = PowerLawIsingParams(n=n)
    h = build_power_law_ising(params)
    psi = make_all_plus_y(n)
    pair = ButterflyPair(PauliString.single(n - 1, "X"), None)
    ts = np.linspace(0, 9, 10)
    err_int = err_weak = 0.0
    for k, eps in enumerate((0.1, 0.2, 0.3)):
        evo = make_imperfect_evolution(params, eps, tuple(derive_seeds(10 + k, 2)))
        num, _ = interferometric_components(psi, evo, pair, ts)
        err_int = max(err_int, np.max(np.abs(num - 1)))
        hs = [perturbed_hamiltonian(h, draw_perturbation(eps, n, s)) for s in derive_seeds(20 + k, 3)]
        s = weak_series(psi, h, *hs, pair, ts)
        err_weak = max(err_weak, np.max(np.abs(s.renormalized - 1)))
    ok = err_int < 1e-9 and err_weak < 1e-9
    report(5, ok, f"max |F^int(V=1) - 1| {err_int:.2e}, max |weak renormalized - 1| {err_weak:.2e} (< 1e-9)")
    assert ok


N_PROPERTY = 10
PROPERTY_SEEDS = range(5)


def _property_runs(epsilon, ts):
    params = PowerLawIsingParams(n=N_PROPERTY)
    psi = make_all_plus_y(N_PROPERTY)
    pair = ButterflyPair.paulis(N_PROPERTY - 1, 0)
    ideal_evo = make_ideal_evolution(params)
    return [
        interferometric_series(psi, ideal_evo, make_imperfect_evolution(params, epsilon, tuple(derive_seeds(s, 2))), pair, ts)
        for s in PROPERTY_SEEDS
    ]


def test_c06_renormalized_tracks_ideal(report):
    start = time.perf_counter()
    ts = np.arange(0, 6.0001, 0.25)
    runs = _property_runs(0.2, ts)
    ideal = runs[0].ideal
    t_star = estimate_scrambling_time(list(zip(ts, ideal)))
    sel = (ts > 0) & (ts < t_star)
    dev_r = np.array([np.abs(r.renormalized - ideal) for r in runs])[:, sel]
    dev_i = np.array([np.abs(r.imperfect - ideal) for r in runs])[:, sel]
    med_r, med_i = np.median(dev_r, axis=0), np.median(dev_i, axis=0)
    elapsed = time.perf_counter() - start
    ok = bool(np.all(med_r < med_i)) and med_r.max() < 0.1 and elapsed < 600
    report(
        6,
        ok,
        f"t*={t_star:g}; median|R-I| < median|imp-I| at {np.sum(med_r < med_i)}/{sel.sum()} points; "
        f"max median|R-I| {med_r.max():.3f} (< 0.1); pooled max over seeds {dev_r.max():.3f}; {elapsed:.0f} s",
    )
    assert ok


def test_c07_growth_rate(report):
    ts = np.arange(0, 4.5001, 0.05)
    runs = _property_runs(0.1, ts)
    window, limit = (1e-5, 1e-2), 0.10
    try:
        slope_ideal = holo.fit_deficit_exponent(ts, 1 - runs[0].ideal, window)
        slopes = [holo.fit_deficit_exponent(ts, 1 - r.renormalized, window) for r in runs]
    except ValueError:
        window, limit = (1e-6, 1e-2), 0.15
        slope_ideal = holo.fit_deficit_exponent(ts, 1 - runs[0].ideal, window)
        slopes = [holo.fit_deficit_exponent(ts, 1 - r.renormalized, window) for r in runs]
    rel = np.abs(np.array(slopes) - slope_ideal) / abs(slope_ideal)
    ok = float(np.median(rel)) < limit
    per_seed = ", ".join(f"{x:.3f}" for x in rel)
    report(7, ok, f"ideal slope {slope_ideal:.3f}; median relative difference {np.median(rel):.3f} (< {limit}); per seed [{per_seed}]")
    assert ok


def test_c08_holographic_exponent(report):
    start = time.perf_counter()
    p = holo.HolographicParams(beta=2 * math.pi, delta_op=1.0, g=1e-5, epsilon=0.1)
    t = np.arange(-5, 20, 0.005)
    window = (1e-6, 1e-3)
    slope_ren = holo.fit_deficit_exponent(t, holo.renormalized_deficit(p, t), window)
    slope_ideal = holo.fit_deficit_exponent(t, holo.ideal_deficit(p, t), window)
    target = (1 + p.epsilon) * p.rate
    err_ren = abs(slope_ren - target) / target
    err_ideal = abs(slope_ideal - p.rate) / p.rate
    elapsed = time.perf_counter() - start
    ok = err_ren < 0.03 and err_ideal < 0.01 and elapsed < 1
    report(
        8,
        ok,
        f"renormalized slope {slope_ren:.4f} vs (1+eps)*2pi/beta={target:.4f} (rel err {err_ren:.3f}, need < 0.03); "
        f"ideal slope {slope_ideal:.5f} (rel err {err_ideal:.1e}, need < 0.01)",
    )
    assert ok


def test_c09_holographic_limits(report):
    p = holo.HolographicParams(beta=2 * math.pi, delta_op=1.0, g=1e-5, epsilon=0.1)
    small = abs(holo.shot_avg_a2(p, 1e-12 / p.epsilon) - 1)
    large = abs(holo.shot_avg_a2(p, 50 * p.beta / p.epsilon) - 0.5)
    t = np.linspace(-10, 100, 100)
    alpha0 = np.max(np.abs(holo.shot_avg_a1(p, t, 0.0) - holo.shot_avg_a2(p, t)))
    ok = small < 1e-9 and large < 1e-9 and alpha0 < 1e-12
    report(9, ok, f"|A2(0)-1| {small:.1e}, |A2(50 beta)-0.5| {large:.1e} (< 1e-9); max |A1(alpha=0)-A2| {alpha0:.1e} (< 1e-12)")
    assert ok


def test_c10_shot_averaging(report):
    n = 8
    params = PowerLawIsingParams(n=n)
    psi = make_all_plus_y(n)
    pair = ButterflyPair.paulis(n - 1, 0)
    ts = np.arange(0, 6.0001, 0.2)
    avg = shot_averaged_renormalization(psi, params, pair, ts, 0.2, 20, 0, floquet_dt=0.2)
    gap = np.max(np.abs(avg.series.renormalized - avg.average_of_ratios()))
    one = shot_averaged_renormalization(psi, params, pair, ts, 0.2, 1, 7, floquet_dt=0.2)
    single = interferometric_series(
        psi, make_ideal_evolution(params, 0.2), make_imperfect_evolution(params, 0.2, shot_seeds(7, 1)[0], 0.2), pair, ts
    )
    err_one = np.max(np.abs(one.series.renormalized - single.renormalized))
    ok = gap > 1e-6 and err_one < 1e-12
    report(10, ok, f"max |ratio of averages - average of ratios| {gap:.2e} (> 1e-6); n_shots=1 vs single run {err_one:.1e} (< 1e-12)")
    assert ok


def test_c11_open_system(report):
    start = time.perf_counter()
    nS = 5
    chain = PowerLawIsingParams(n=nS, ell0=4)
    ts = np.arange(0, 5.0001, 0.25)
    s = open_system_otoc_series(OpenSystemParams(chain, chain, 0.1), ButterflyPair.paulis(nS - 1, 0), make_all_plus_y(2 * nS), ts)
    t_star = estimate_scrambling_time(s)
    sel = s.t < t_star
    lhs = np.abs(s.renormalized - s.ideal)[sel]
    rhs = np.abs(s.imperfect - s.ideal)[sel] + 0.02
    elapsed = time.perf_counter() - start
    ok = bool(np.all(lhs <= rhs)) and elapsed < 300
    excess = lhs - (rhs - 0.02)
    k = int(np.argmax(excess))
    report(
        11,
        ok,
        f"t*={t_star:g}; holds at {np.sum(lhs <= rhs)}/{sel.sum()} points; largest |R-I| - |imp-I| is {excess[k]:.4f} "
        f"at t={s.t[sel][k]:g} (allowed 0.02); {elapsed:.0f} s",
    )
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-rN"]))
