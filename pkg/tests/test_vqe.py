from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vbcircuits.ansatz import AnsatzSpec, builtin_template
from vbcircuits.models import (exact_2site_energy, ising_observable, meanfield_2site_energy,
                               sweep_couplings)
from vbcircuits.optimizer import bfgs
from vbcircuits.pauli import Observable, StructureError, expectation
from vbcircuits.simulator import StateVector
from vbcircuits.solver import ground_energy
from vbcircuits.vqe import (VqeProblem, energy_and_gradient, final_state, gradient, minimize,
                            objective, restart_start, sampled_expectation, solve,
                            with_warm_start)


def problem(name, n, a, reps, **kw):
    return VqeProblem(ising_observable(n, a), AnsatzSpec(builtin_template(name, n), reps), **kw)


def test_quadratic_bowl_converges_fast():
    c = np.array([0.7, -1.3])
    for a, x0 in ((np.diag([1.0, 10.0]), np.zeros(2)),
                  (np.array([[3.0, 1.0], [1.0, 2.0]]), np.array([5.0, 5.0]))):
        res = bfgs(lambda x: (0.5 * (x - c) @ a @ (x - c), a @ (x - c)), x0)
        np.testing.assert_allclose(res.x, c, atol=1e-10)
        assert res.converged
        assert res.iterations <= 5


def test_higher_dimensional_bowl():
    rng = np.random.default_rng(0)
    m = rng.normal(size=(5, 5))
    a = m @ m.T + 5 * np.eye(5)
    b = rng.normal(size=5)
    res = bfgs(lambda x: (0.5 * x @ a @ x - b @ x, a @ x - b), np.zeros(5))
    np.testing.assert_allclose(res.x, np.linalg.solve(a, b), atol=1e-8)
    assert res.converged


def test_rosenbrock():
    def fg(v):
        x, y = v
        f = (1 - x) ** 2 + 100 * (y - x * x) ** 2
        g = np.array([-2 * (1 - x) - 400 * x * (y - x * x), 200 * (y - x * x)])
        return f, g
    res = bfgs(fg, np.array([-1.2, 1.0]))
    np.testing.assert_allclose(res.x, [1.0, 1.0], atol=1e-6)
    assert res.iterations <= 200


def test_bfgs_never_returns_worse_point():
    res = bfgs(lambda x: (float(np.cos(x[0])), np.array([-np.sin(x[0])])), np.array([0.3]),
               max_iterations=1)
    assert res.fun <= math.cos(0.3)


def test_two_site_reaches_exact_energy():
    for a in (0.0, 0.3, 0.5, 0.8, 1.0):
        J, h = sweep_couplings(a)
        res = solve(problem("unit2", 2, a, 1))
        assert res.energy == pytest.approx(exact_2site_energy(J, h), abs=1e-8)


def test_reps_zero_reaches_meanfield():
    for a in (0.1, 0.25, 0.5, 0.75, 0.9):
        J, h = sweep_couplings(a)
        res = solve(problem("unit2", 2, a, 0))
        assert res.energy == pytest.approx(meanfield_2site_energy(J, h), abs=1e-8)


def test_parameter_shift_matches_finite_differences():
    rng = np.random.default_rng(7)
    for name, n, reps in (("unit2", 2, 2), ("4q", 4, 2), ("C", 6, 1)):
        p = problem(name, n, 0.4, reps)
        fd = VqeProblem(p.hamiltonian, p.spec, gradient_mode="finite_difference")
        for _ in range(34):
            x = rng.uniform(0, 2 * math.pi, p.n_parameters)
            np.testing.assert_allclose(gradient(p, x), gradient(fd, x), atol=1e-6)


def test_single_rotation_energy_and_gradient():
    spec = AnsatzSpec(builtin_template("unit2"), 0)
    h = Observable.from_terms([(1.0, "ZI")])
    p = VqeProblem(h, spec)
    for t in np.linspace(-3, 3, 13):
        e, g = energy_and_gradient(p, [t, 0.4])
        assert e == pytest.approx(math.cos(t), abs=1e-14)
        assert g[0] == pytest.approx(-math.sin(t), abs=1e-14)
        assert g[1] == pytest.approx(0.0, abs=1e-14)
    assert objective(p, [math.pi / 2, 0.0]) == pytest.approx(0.0, abs=1e-15)
    assert objective(p, [math.pi, 0.0]) == pytest.approx(-1.0)


def test_gradient_vanishes_at_converged_optimum():
    p = problem("4q", 4, 0.35, 2, restarts=2)
    res = solve(p)
    assert res.converged
    assert np.linalg.norm(gradient(p, res.parameters)) <= 1e-5


def test_energy_and_gradient_consistency():
    p = problem("4q", 4, 0.6, 3)
    x = restart_start(p, 0)
    e, g = energy_and_gradient(p, x)
    assert e == objective(p, x)
    assert e == pytest.approx(expectation(final_state(p, x), p.hamiltonian), abs=1e-14)
    assert g.shape == (p.n_parameters,)


def test_parameter_count_checked():
    p = problem("unit2", 2, 0.5, 1)
    with pytest.raises(StructureError):
        objective(p, [0.0, 1.0])
    with pytest.raises(StructureError):
        VqeProblem(ising_observable(4, 0.5), AnsatzSpec(builtin_template("unit2"), 1))
    with pytest.raises(StructureError):
        VqeProblem(p.hamiltonian, p.spec, strategy="annealed")
    with pytest.raises(StructureError):
        VqeProblem(p.hamiltonian, p.spec, restarts=0)


def test_deterministic_for_fixed_seed():
    a = solve(problem("4q", 4, 0.4, 2, restarts=3, seed=5))
    b = solve(problem("4q", 4, 0.4, 2, restarts=3, seed=5))
    assert a.energy == b.energy
    assert np.array_equal(a.parameters, b.parameters)
    assert a.restart_energies == b.restart_energies


def test_restart_streams_are_independent_of_count():
    p3 = problem("4q", 4, 0.4, 2, restarts=3, seed=2)
    p5 = problem("4q", 4, 0.4, 2, restarts=5, seed=2)
    assert np.array_equal(restart_start(p3, 1), restart_start(p5, 1))
    x = restart_start(p3, 0)
    assert np.all((x >= 0) & (x < 2 * math.pi))


def test_more_restarts_never_worse():
    energies = [solve(problem("4q", 4, 0.3, 1, restarts=r, seed=1)).energy for r in (1, 3, 6)]
    assert energies[0] >= energies[1] >= energies[2]


def test_best_restart_reported():
    res = solve(problem("4q", 4, 0.3, 1, restarts=4))
    assert res.energy == min(res.restart_energies)
    assert res.restart_energies[res.restart_index] == res.energy


@settings(max_examples=15, deadline=None)
@given(st.floats(0.0, 1.0), st.integers(0, 3))
def test_variational_bound(a, reps):
    p = problem("4q", 4, a, reps, restarts=1, max_iterations=20)
    res = solve(p)
    assert res.energy >= ground_energy(p.hamiltonian) - 1e-10


def test_warm_start_is_a_single_local_run():
    p = problem("4q", 4, 0.5, 2, strategy="adiabatic")
    cold = solve(p)
    warm = solve(with_warm_start(problem("4q", 4, 0.55, 2, strategy="adiabatic"),
                                 cold.parameters))
    assert len(warm.restart_energies) == 1
    assert warm.energy <= objective(problem("4q", 4, 0.55, 2), cold.parameters) + 1e-12


def test_minimize_from_optimum_stays():
    p = problem("unit2", 2, 0.5, 1)
    best = solve(p)
    again = minimize(p, best.parameters)
    assert again.energy == pytest.approx(best.energy, abs=1e-12)


def test_sampled_expectation_statistics():
    h = ising_observable(2, 0.5)
    psi = StateVector(2, np.array([0.6, 0.0, 0.0, 0.8]))
    exact = expectation(psi, h)
    shots = 20_000
    est = [sampled_expectation(psi, h, shots, seed=s) for s in range(20)]
    # each term has variance <= 1, so |error| <= sum|c| / sqrt(shots) per sigma
    sigma = sum(abs(c) for c, _ in h.terms) / math.sqrt(shots)
    assert abs(np.mean(est) - exact) <= 5 * sigma / math.sqrt(20)
    assert sampled_expectation(psi, h, shots, seed=3) == est[3]


def test_sampled_expectation_on_eigenstates_is_exact():
    zz = Observable.from_terms([(0.7, "ZZ"), (0.1, "II")])
    assert sampled_expectation(StateVector.basis("01"), zz, 10, seed=0) == pytest.approx(-0.6)
    xx = Observable.from_terms([(1.0, "XX")])
    plus = StateVector(2, np.full(4, 0.5))
    assert sampled_expectation(plus, xx, 10, seed=0) == pytest.approx(1.0)
    yy = Observable.from_terms([(1.0, "Y")])
    plus_i = StateVector(1, np.array([1, 1j]) / math.sqrt(2))
    assert sampled_expectation(plus_i, yy, 10, seed=0) == pytest.approx(1.0)


def test_shot_mode_problem_runs():
    p = problem("unit2", 2, 0.5, 1, shots=2000, restarts=1, max_iterations=5)
    res = solve(p)
    assert np.isfinite(res.energy)
