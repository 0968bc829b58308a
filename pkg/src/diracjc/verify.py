"""Closed-form vs. numerical-oracle equivalence checks.

Each check returns the worst residual it saw and the tolerance it must stay
under. The CLI ``verify`` command runs them all.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import dirac2d as d2
from . import propagator as prop
from .fockspace import DOWN, FockSpace, ModeLayout, SpinorState, chiral_number_state, coherent_state, interior_indices

__all__ = ["CheckResult", "run_verification"]

XI_SET = (0.05, 0.5, 2.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual < self.tolerance)


def _spectrum_equivalence(n_max: int, rng) -> float:
    space = FockSpace(n_max)
    worst = 0.0
    for xi in XI_SET:
        params = d2.PhysParams.from_xi(xi)
        evals = prop.diagonalize(d2.build_hamiltonian_jc(params, space)).eigenvalues
        for n_l in range(1, n_max - 1):
            e = d2.spectrum(params, n_l).energy_plus
            for target in (e, -e):
                worst = max(worst, float(np.min(np.abs(evals - target))))
    return worst


def _form_equivalence(n_max: int, rng) -> float:
    space = FockSpace(n_max)
    inner = np.ix_(interior_indices(space), interior_indices(space))
    worst = 0.0
    for omega in (0.0, 0.3, 1.0):
        params = d2.PhysParams(omega=omega)
        cart = d2.build_hamiltonian_cartesian(params, space).entries
        jc = d2.build_hamiltonian_jc(params, space).entries
        partner = d2.build_hamiltonian_cartesian(params, space, partner=True).entries
        ajc = d2.build_hamiltonian_ajc(params, space).entries
        worst = max(worst, np.max(np.abs((cart - jc)[inner])), np.max(np.abs((partner - ajc)[inner])))
    return float(worst)


def _chiral_basis_equivalence(n_max: int, rng) -> float:
    space = FockSpace(n_max)
    left = FockSpace(n_max, ModeLayout.SINGLE_CHIRAL_LEFT)
    right = FockSpace(n_max, ModeLayout.SINGLE_CHIRAL_RIGHT)
    worst = 0.0
    for omega in (0.0, 0.3, 1.0):
        params = d2.PhysParams(omega=omega)
        cart, labels = d2.to_chiral_basis(d2.build_hamiltonian_cartesian(params, space))
        jc = d2.lift_single_chiral(d2.build_hamiltonian_jc(params, left), labels)
        partner, _ = d2.to_chiral_basis(d2.build_hamiltonian_cartesian(params, space, partner=True))
        ajc = d2.lift_single_chiral(d2.build_hamiltonian_ajc(params, right), labels)
        worst = max(worst, np.max(np.abs(cart - jc)), np.max(np.abs(partner - ajc)))
    return float(worst)


def _dynamics_equivalence(n_max: int, rng, samples: int = 50) -> float:
    space = FockSpace(n_max)
    worst = 0.0
    for _ in range(samples):
        xi = float(rng.uniform(0.01, 3.0))
        n_l = int(rng.integers(1, n_max - 1))
        t = float(rng.uniform(0.0, 10.0))
        params = d2.PhysParams.from_xi(xi)
        decomp = prop.diagonalize(d2.build_hamiltonian_jc(params, space))
        psi0 = SpinorState.product(chiral_number_state(space, n_l - 1), DOWN, space)
        numeric = prop.evolve(decomp, psi0, t).amplitudes
        exact = d2.evolve_closed_form(params, n_l, t, space).amplitudes
        worst = max(worst, float(np.linalg.norm(numeric - exact)))
    return worst


def _zitter_observables(n_max: int, rng) -> float:
    space = FockSpace(n_max)
    times = np.linspace(0.0, 8.0, 200)
    worst = 0.0
    for xi, n_l in ((2.0, 1), (0.5, min(3, n_max - 2))):
        params = d2.PhysParams.from_xi(xi)
        decomp = prop.diagonalize(d2.build_hamiltonian_jc(params, space))
        psi0 = SpinorState.product(chiral_number_state(space, n_l - 1), DOWN, space)
        numeric = prop.angular_momentum_trajectory(
            decomp, psi0, d2.orbital_lz(space), d2.spin_sz(space), times)
        exact = d2.zitterbewegung_trace(params, n_l, times)
        for col in ("lz", "sz", "jz"):
            worst = max(worst, float(np.max(np.abs(getattr(numeric, col) - getattr(exact, col)))))
    return worst


def _jz_conservation(n_max: int, rng) -> float:
    space = FockSpace(n_max)
    params = d2.PhysParams.from_xi(0.5)
    decomp = prop.diagonalize(d2.build_hamiltonian_cartesian(params, space))
    psi0 = SpinorState.product(chiral_number_state(space, 1), DOWN, space)
    trace = prop.angular_momentum_trajectory(
        decomp, psi0, d2.orbital_lz(space), d2.spin_sz(space), np.linspace(0, 20, 100))
    return float(np.ptp(trace.jz))


def _eigenstate_residual(n_max: int, rng) -> float:
    space = FockSpace(n_max)
    worst = 0.0
    for xi in XI_SET:
        params = d2.PhysParams.from_xi(xi)
        h = d2.build_hamiltonian_jc(params, space).entries
        for n_l in range(1, n_max - 1):
            e = d2.spectrum(params, n_l).energy_plus
            for sign in (1, -1):
                v = d2.eigenstate(params, space, n_l, sign).amplitudes
                worst = max(worst, float(np.max(np.abs(h @ v - sign * e * v))))
    return worst


def _collapse_revival(n_max: int, rng) -> float:
    z, xi = 1.0, 0.1
    space = FockSpace(max(n_max, 20), ModeLayout.SINGLE_CHIRAL_LEFT)
    params = d2.PhysParams.from_xi(xi)
    times = np.linspace(0.0, 50.0, 200)
    psi0 = SpinorState.product(coherent_state(z, space), DOWN, space)
    decomp = prop.diagonalize(d2.build_hamiltonian_jc(params, space))
    numeric = prop.angular_momentum_trajectory(
        decomp, psi0, d2.orbital_lz(space), d2.spin_sz(space), times)
    series = d2.collapse_revival_trace(params, z, times)
    return float(max(np.max(np.abs(numeric.sz - series.sz)), np.max(np.abs(numeric.lz - series.lz))))


def _random_hermitian(rng, dim: int) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2


def _propagator_invariants(n_max: int, rng, samples: int = 10) -> float:
    worst = 0.0
    for _ in range(samples):
        dim = int(rng.integers(2, 80))
        decomp = prop.diagonalize(_random_hermitian(rng, dim))
        psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        psi /= np.linalg.norm(psi)
        t1, t2 = rng.uniform(-3, 3, size=2)
        one = prop.evolve(decomp, psi, t1)
        both = prop.evolve(decomp, one, t2)
        back = prop.evolve(decomp, prop.evolve(decomp, psi, t1), -t1)
        worst = max(
            worst,
            abs(np.linalg.norm(one) - 1.0),
            float(np.max(np.abs(both - prop.evolve(decomp, psi, t1 + t2)))),
            float(np.max(np.abs(back - psi))),
            decomp.reconstruction_residual(),
        )
    return float(worst)


CHECKS: list[tuple[str, Callable, float]] = [
    ("spectrum_equivalence", _spectrum_equivalence, 1e-10),
    ("form_equivalence", _form_equivalence, 1e-10),
    ("chiral_basis_equivalence", _chiral_basis_equivalence, 1e-10),
    ("dynamics_equivalence", _dynamics_equivalence, 1e-9),
    ("zitterbewegung_observables", _zitter_observables, 1e-9),
    ("jz_conservation", _jz_conservation, 1e-10),
    ("eigenstate_residual", _eigenstate_residual, 1e-10),
    ("collapse_revival_series", _collapse_revival, 1e-7),
    ("propagator_invariants", _propagator_invariants, 1e-10),
]


def run_verification(n_max: int = 12, seed: int = 0) -> list[CheckResult]:
    if n_max < 4:
        raise ValueError("verification needs n_max >= 4")
    rng = np.random.default_rng(seed)
    return [CheckResult(name, fn(n_max, rng), tol) for name, fn, tol in CHECKS]
