"""Exact free energy by Hamiltonian diagonalization in a harmonic-oscillator basis.

H = p^2/(2m) + (1/2) m omega^2 x^2 + lambda x^4 is represented in the
eigenbasis of a harmonic oscillator with basis frequency nu (default: the
variational Omega, which keeps the required basis size small):

    H = nu (n + 1/2) delta_{nn'} + (1/2) m (omega^2 - nu^2) (x^2)_{nn'}
        + lambda (x^4)_{nn'},

with x_{n,n+1} = sqrt((n+1)/(2 m nu)) and x^2, x^4 formed by explicit matrix
products.  The free energy is the truncated Boltzmann sum

    F = -T ln sum_K e^{-beta E_K},

summed until e^{-beta (E_K - E_0)} < 1e-16, with the basis size doubled until
F is stable.  This route shares nothing with the variational/series formulas
and serves as their end-to-end oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ModelParams
from .errors import ConvergenceError, ValidationError
from .variational import solve_gap

__all__ = [
    "ExactResult",
    "Spectrum",
    "build_hamiltonian",
    "diagonalize",
    "exact_free_energy",
]

BOLTZMANN_CUT = 1e-16


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of the truncated Hamiltonian.

    converged_count is how many of the lowest eigenvalues agreed (relative to
    the spectral spread) with the previous, half-size basis; eigenvalues above
    it carry truncation error.
    """

    eigenvalues: np.ndarray
    basis_size: int
    basis_frequency: float
    converged_count: int


@dataclass(frozen=True)
class ExactResult:
    """Converged free energy with its own convergence diagnostics."""

    value: float
    step: float
    basis_size: int


def build_hamiltonian(params: ModelParams, nu: float, n_basis: int) -> np.ndarray:
    """Dense symmetric Hamiltonian matrix in the (m, nu) oscillator basis."""
    if nu <= 0.0:
        raise ValidationError(f"basis frequency must be positive, got {nu}")
    if n_basis < 8:
        raise ValidationError(f"basis size must be >= 8, got {n_basis}")
    n = np.arange(n_basis)
    x = np.zeros((n_basis, n_basis))
    off = np.sqrt((n[:-1] + 1.0) / (2.0 * params.m * nu))
    x[n[:-1], n[:-1] + 1] = off
    x[n[:-1] + 1, n[:-1]] = off
    x2 = x @ x
    x4 = x2 @ x2
    h = np.diag(nu * (n + 0.5)) + 0.5 * params.m * (params.omega**2 - nu**2) * x2
    h += params.lam * x4
    return h


def diagonalize(
    params: ModelParams,
    nu: float,
    n_basis: int,
    prev_eigs: np.ndarray | None = None,
    spectral_tol: float = 1e-10,
) -> Spectrum:
    """Eigenvalues of the truncated H, with convergence count vs a smaller basis."""
    h = build_hamiltonian(params, nu, n_basis)
    eigs = np.linalg.eigvalsh(h)
    converged = 0
    if prev_eigs is not None:
        k = min(len(prev_eigs), len(eigs))
        scale = max(1.0, float(eigs[k - 1] - eigs[0]))
        close = np.abs(eigs[:k] - prev_eigs[:k]) < spectral_tol * scale
        converged = int(np.argmin(close)) if not close.all() else k
    return Spectrum(
        eigenvalues=eigs,
        basis_size=n_basis,
        basis_frequency=nu,
        converged_count=converged,
    )


def _boltzmann_free_energy(eigs: np.ndarray, beta: float) -> tuple[float, int]:
    """F = E_0 - T ln sum e^{-beta (E - E_0)}, truncated at the 1e-16 tail."""
    e0 = float(eigs[0])
    shifted = beta * (eigs - e0)
    keep = shifted < -math.log(BOLTZMANN_CUT)
    n_kept = int(np.sum(keep))
    z = float(np.sum(np.exp(-shifted[keep])))
    return e0 - math.log(z) / beta, n_kept


def exact_free_energy(
    params: ModelParams,
    tol: float = 1e-9,
    nu: float | None = None,
    n_basis_start: int = 64,
    n_basis_cap: int = 2048,
    full_output: bool = False,
) -> float | ExactResult:
    """Free energy from the diagonalization oracle, basis-doubled until stable.

    With ``full_output`` the achieved doubling step |Delta F| and the final
    basis size are returned alongside the value.  Raises ConvergenceError
    (with the partial value and the last step size as the error bound) if the
    cap is hit before |Delta F| < tol, or if the Boltzmann sum needs more
    levels than the basis reliably converges.
    """
    if tol <= 0.0:
        raise ValidationError(f"tol must be positive, got {tol}")
    if n_basis_start < 8 or n_basis_cap < n_basis_start:
        raise ValidationError("need 8 <= n_basis_start <= n_basis_cap")
    if nu is None:
        nu = solve_gap(params).omega_big
    n_basis = n_basis_start
    f = math.nan
    prev_f = None
    prev_eigs = None
    while n_basis <= n_basis_cap:
        spec = diagonalize(params, nu, n_basis, prev_eigs=prev_eigs)
        f, n_kept = _boltzmann_free_energy(spec.eigenvalues, params.beta)
        # the Boltzmann sum must not reach into the unconverged top of the basis
        tail_ok = n_kept <= max(spec.converged_count, n_basis // 2)
        if prev_f is not None and tail_ok and abs(f - prev_f) < tol:
            if full_output:
                return ExactResult(value=f, step=abs(f - prev_f), basis_size=n_basis)
            return f
        prev_f, prev_eigs = f, spec.eigenvalues
        n_basis *= 2
    bound = abs(f - prev_f) if prev_f is not None else math.inf
    raise ConvergenceError(
        f"exact free energy not stable to {tol:.1e} at basis cap {n_basis_cap}",
        value=f,
        bound=bound,
    )
