"""Diagonalization oracle: matrix structure, convergence, thermodynamics."""

import math

import numpy as np
import pytest

from quartic_vpe.core import ModelParams
from quartic_vpe.errors import ConvergenceError, ValidationError
from quartic_vpe.spectrum import (
    ExactResult,
    build_hamiltonian,
    diagonalize,
    exact_free_energy,
)
from quartic_vpe.variational import solve_gap

RNG = np.random.default_rng(1729)


class TestHamiltonian:
    def test_symmetric_and_banded(self):
        p = ModelParams(m=1.0, omega=1.0, lam=1.0, beta=1.0)
        h = build_hamiltonian(p, nu=2.0, n_basis=40)
        assert np.allclose(h, h.T, atol=0.0)
        # x^4 connects |n> to |n +/- 4> at most
        for i in range(40):
            for j in range(40):
                if abs(i - j) > 4:
                    assert h[i, j] == 0.0

    def test_parity_selection(self):
        # x^2 and x^4 preserve parity: no odd |i - j| couplings
        p = ModelParams(m=1.0, omega=1.0, lam=1.0, beta=1.0)
        h = build_hamiltonian(p, nu=1.3, n_basis=30)
        odd = [(i, j) for i in range(30) for j in range(30) if (i - j) % 2 == 1]
        assert all(h[i, j] == 0.0 for i, j in odd)

    def test_harmonic_limit(self):
        # vanishing quartic coupling in the matched basis gives the
        # ladder spectrum omega (n + 1/2)
        p = ModelParams(m=1.0, omega=1.5, lam=1e-14, beta=1.0)
        spec = diagonalize(p, nu=1.5, n_basis=64)
        lowest = spec.eigenvalues[:20]
        expected = 1.5 * (np.arange(20) + 0.5)
        assert np.max(np.abs(lowest - expected)) < 1e-10

    def test_validation(self):
        p = ModelParams(m=1.0, omega=1.0, lam=1.0, beta=1.0)
        with pytest.raises(ValidationError):
            build_hamiltonian(p, nu=0.0, n_basis=32)
        with pytest.raises(ValidationError):
            build_hamiltonian(p, nu=1.0, n_basis=4)


class TestSpectrum:
    def test_eigenvalues_ascending_and_positive(self):
        for _ in range(10):
            p = ModelParams(
                m=float(RNG.uniform(0.3, 3.0)),
                omega=float(RNG.uniform(0.0, 3.0)),
                lam=float(RNG.uniform(0.05, 20.0)),
                beta=1.0,
            )
            spec = diagonalize(p, nu=solve_gap(p).omega_big, n_basis=64)
            eigs = spec.eigenvalues
            assert np.all(np.diff(eigs) > 0.0)
            assert eigs[0] > 0.0

    def test_eigenvalues_increase_with_coupling(self):
        base = ModelParams(m=1.0, omega=1.0, lam=1.0, beta=1.0)
        more = ModelParams(m=1.0, omega=1.0, lam=2.0, beta=1.0)
        nu = solve_gap(base).omega_big
        a = diagonalize(base, nu, 128).eigenvalues[:30]
        b = diagonalize(more, nu, 128).eigenvalues[:30]
        assert np.all(b > a)

    def test_ground_state_stable_under_doubling(self):
        p = ModelParams(m=1.0, omega=1.0, lam=1.0, beta=1.0)
        nu = solve_gap(p).omega_big
        small = diagonalize(p, nu, 64)
        large = diagonalize(p, nu, 128, prev_eigs=small.eigenvalues)
        assert abs(large.eigenvalues[0] - small.eigenvalues[0]) < 1e-10
        assert large.converged_count >= 12

    def test_converged_count_self_comparison(self):
        p = ModelParams(m=1.0, omega=1.0, lam=1.0, beta=1.0)
        spec = diagonalize(p, nu=2.0, n_basis=32)
        again = diagonalize(p, nu=2.0, n_basis=32, prev_eigs=spec.eigenvalues)
        assert again.converged_count == 32


class TestExactFreeEnergy:
    def test_known_values(self):
        # strong-coupling dimensionless point z = 10 at unit reduced
        # temperature, quoted to 12 digits in the reference literature
        p = ModelParams(m=1.0, omega=math.sqrt(20.0), lam=1.0, beta=1.0)
        assert exact_free_energy(p, tol=1e-11) == pytest.approx(
            2.26225951564, abs=1e-9
        )
        # unit coupling at beta = 5
        p = ModelParams(m=1.0, omega=1.0, lam=1.0, beta=5.0)
        assert exact_free_energy(p) == pytest.approx(0.803758, abs=1e-5)

    def test_basis_frequency_independence(self):
        # the truncation converges to the same physics from any
        # reasonable basis frequency
        p = ModelParams(m=1.0, omega=1.0, lam=2.0, beta=2.0)
        w = solve_gap(p).omega_big
        values = [exact_free_energy(p, tol=1e-10, nu=s * w) for s in (0.5, 1.0, 2.0)]
        assert max(values) - min(values) < 1e-8

    def test_full_output_diagnostics(self):
        p = ModelParams(m=1.0, omega=1.0, lam=1.0, beta=2.0)
        res = exact_free_energy(p, tol=1e-9, full_output=True)
        assert isinstance(res, ExactResult)
        assert res.step < 1e-9
        assert res.basis_size >= 64
        assert res.value == pytest.approx(exact_free_energy(p, tol=1e-9), abs=0.0)

    def test_free_energy_decreasing_and_concave_in_temperature(self):
        p0 = ModelParams(m=1.0, omega=1.0, lam=1.0, beta=1.0)
        temps = np.linspace(0.4, 3.0, 9)
        values = [
            exact_free_energy(ModelParams(m=1.0, omega=1.0, lam=1.0, beta=1.0 / t))
            for t in temps
        ]
        diffs = np.diff(values)
        assert np.all(diffs < 0.0)
        assert np.all(np.diff(diffs) < 0.0)

    def test_variational_bound_spot_check(self):
        for _ in range(5):
            p = ModelParams(
                m=1.0,
                omega=float(RNG.uniform(0.0, 2.0)),
                lam=float(RNG.uniform(0.2, 10.0)),
                beta=float(RNG.uniform(0.3, 8.0)),
            )
            assert solve_gap(p).f0 >= exact_free_energy(p)

    def test_non_convergence_reports_partial(self):
        p = ModelParams(m=1.0, omega=1.0, lam=1.0, beta=2.0)
        with pytest.raises(ConvergenceError) as err:
            exact_free_energy(p, tol=1e-14, n_basis_start=8, n_basis_cap=16)
        assert err.value.value is not None and math.isfinite(err.value.value)

    def test_validation(self):
        p = ModelParams(m=1.0, omega=1.0, lam=1.0, beta=2.0)
        with pytest.raises(ValidationError):
            exact_free_energy(p, tol=0.0)
        with pytest.raises(ValidationError):
            exact_free_energy(p, n_basis_start=4)
        with pytest.raises(ValidationError):
            exact_free_energy(p, n_basis_start=128, n_basis_cap=64)