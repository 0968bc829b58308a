"""The 2+1 dimensional Dirac oscillator and its Jaynes-Cummings form.

Matrix builders (Cartesian, left-chiral JC, right-chiral partner) live next
to the closed-form results (spectrum, doublet dynamics, Zitterbewegung and
collapse/revival observables). The closed-form evaluators are scalar
formulas and never build a Hamiltonian matrix.

Conventions
-----------
Spin-up is the upper spinor component and sits first in the basis. The
left circular quantum carries ``L_z = -ħ``, so ``|n_l>`` has angular
momentum ``-n_l ħ``. With ``g = 2i mc²√ξ/ħ`` the left-chiral Hamiltonian is::

    H = ħ g |↑><↓| a_l† + ħ g* |↓><↑| a_l + mc² σ_z

which couples ``|n_l - 1>|↓>`` to ``|n_l>|↑>``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammainc
from scipy.stats import poisson

from .fockspace import (
    DOWN,
    UP,
    FockSpace,
    ModeLayout,
    OperatorMatrix,
    SpinorState,
    TailTooLarge,
    angular_momentum_lz,
    cartesian_operators,
    chiral_basis,
    chiral_mode,
    chiral_number_state,
    spin_extend,
    spin_operator,
)
from .propagator import HERMITIAN_TOL, ObservableTrace

__all__ = [
    "PhysParams",
    "HamiltonianForm",
    "HamiltonianMatrix",
    "DoubletEigensystem",
    "ExpansionRegimeWarning",
    "build_hamiltonian_cartesian",
    "build_hamiltonian_jc",
    "build_hamiltonian_ajc",
    "to_chiral_basis",
    "lift_single_chiral",
    "spin_sz",
    "orbital_lz",
    "spectrum",
    "eigenstate",
    "zitterbewegung_frequency",
    "nonrelativistic_frequency",
    "doublet_amplitudes",
    "evolve_closed_form",
    "zitterbewegung_trace",
    "nonrelativistic_residual",
    "revival_terms",
    "collapse_revival_trace",
]

SERIES_TAIL_TOL = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class ExpansionRegimeWarning(UserWarning):
    """ξ is outside the range where the first-order expansion is meaningful."""


@dataclass(frozen=True)
class PhysParams:
    """Mass, light speed, oscillator frequency and ħ; everything else is derived."""

    m: float = 1.0
    c: float = 1.0
    omega: float = 0.0
    hbar: float = 1.0

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError(f"mass must be positive, got {self.m!r}")
        if not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c!r}")
        if not self.omega >= 0:
            raise ValueError(f"omega must be non-negative, got {self.omega!r}")
        if not self.hbar > 0:
            raise ValueError(f"hbar must be positive, got {self.hbar!r}")

    @classmethod
    def from_xi(cls, xi: float, m: float = 1.0, c: float = 1.0, hbar: float = 1.0) -> "PhysParams":
        if xi < 0:
            raise ValueError("xi must be non-negative")
        return cls(m=m, c=c, omega=xi * m * c * c / hbar, hbar=hbar)

    @property
    def rest_energy(self) -> float:
        return self.m * self.c ** 2

    @property
    def xi(self) -> float:
        return self.hbar * self.omega / self.rest_energy

    @property
    def delta_width(self) -> float:
        """Oscillator ground-state width ``√(ħ/mω)``; infinite for ω = 0."""
        if self.omega == 0:
            return math.inf
        return math.sqrt(self.hbar / (self.m * self.omega))

    @property
    def coupling(self) -> complex:
        """JC coupling ``g = 2i mc²√ξ/ħ``."""
        return 2j * self.rest_energy * math.sqrt(self.xi) / self.hbar


class HamiltonianForm(enum.Enum):
    CARTESIAN = "cartesian"
    JC_LEFT = "jc"
    AJC_RIGHT = "ajc"


@dataclass(frozen=True)
class HamiltonianMatrix:
    entries: np.ndarray
    form: HamiltonianForm
    params: PhysParams
    space: FockSpace

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.shape != (self.space.full_dim, self.space.full_dim):
            raise ValueError(f"Hamiltonian shape {entries.shape} does not match space")
        err = np.max(np.abs(entries - entries.conj().T))
        if err > HERMITIAN_TOL:
            raise ValueError(f"{self.form.value} Hamiltonian is not Hermitian ({err:.3g})")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)


@dataclass(frozen=True)
class DoubletEigensystem:
    """``±E`` and the real amplitudes of ``|±E> = α|n_l>|↑> ∓ iβ|n_l-1>|↓>`` (β, α swap for ``-E``)."""

    n_l: int
    energy_plus: float
    energy_minus: float
    alpha: float
    beta: float


# Matrix builders


def _spin_dim_ok(space: FockSpace, need: int = 2) -> None:
    if space.n_max < need:
        raise ValueError(f"n_max must be at least {need}, got {space.n_max}")


def build_hamiltonian_cartesian(params: PhysParams, space: FockSpace, *, partner: bool = False,
                                width: Optional[float] = None) -> HamiltonianMatrix:
    """``Σ_j c σ_j (p_j - i m ω σ_z r_j) + mc² σ_z`` on the two-mode space.

    Positions and momenta come from the Cartesian ladders with length scale
    ``width`` (default: the oscillator width ``√(ħ/mω)``)::

        r = width (a + a†)/√2,     p = iħ (a† - a)/(√2 width)

    ``partner=True`` substitutes ω → -ω (the right-handed chiral partner);
    the ladder width still uses ``|ω|``. With ω = 0 and the default width the
    momentum terms vanish; pass an explicit ``width`` to get the free Dirac
    Hamiltonian in a finite basis.
    """
    if not space.two_mode:
        raise ValueError("the Cartesian Hamiltonian needs the two-mode layout")
    _spin_dim_ok(space)
    w = params.delta_width if width is None else float(width)
    if not w > 0:
        raise ValueError("width must be positive")
    a_x, a_y = cartesian_operators(space)
    hbar, m, c = params.hbar, params.m, params.c
    omega = -params.omega if partner else params.omega

    def quadratures(a: OperatorMatrix) -> tuple[np.ndarray, np.ndarray]:
        ad = a.entries.conj().T
        if math.isinf(w):
            zero = np.zeros_like(a.entries)
            return zero, zero
        r = w * (a.entries + ad) / math.sqrt(2)
        p = 1j * hbar * (ad - a.entries) / (math.sqrt(2) * w)
        return r, p

    x, p_x = quadratures(a_x)
    y, p_y = quadratures(a_y)
    h = np.zeros((space.full_dim, space.full_dim), dtype=complex)
    for s_j, r_j, p_j in ((SIGMA_X, x, p_x), (SIGMA_Y, y, p_y)):
        h += c * np.kron(s_j, p_j)
        h += -1j * m * omega * c * np.kron(s_j @ SIGMA_Z, r_j)
    h += m * c * c * np.kron(SIGMA_Z, np.eye(space.dim))
    return HamiltonianMatrix(h, HamiltonianForm.CARTESIAN, params, space)


def _chiral_hamiltonian(params: PhysParams, space: FockSpace, chirality: str) -> np.ndarray:
    a = chiral_mode(space, chirality)
    hg = params.hbar * params.coupling
    rest = params.rest_energy * spin_operator(space, "z").entries
    if chirality == "left":
        coupling = spin_operator(space, "raise", a.dag, hg).entries
    else:
        coupling = spin_operator(space, "raise", a, np.conj(hg)).entries
    return coupling + coupling.conj().T + rest


def build_hamiltonian_jc(params: PhysParams, space: FockSpace) -> HamiltonianMatrix:
    """Left-chiral JC form ``ħ g |↑><↓| a_l† + h.c. + mc² σ_z``.

    Works on the two-mode layout or the single left-chiral layout. On the
    two-mode layout it equals :func:`build_hamiltonian_cartesian` entry by entry.
    """
    h = _chiral_hamiltonian(params, space, "left")
    return HamiltonianMatrix(h, HamiltonianForm.JC_LEFT, params, space)


def build_hamiltonian_ajc(params: PhysParams, space: FockSpace) -> HamiltonianMatrix:
    """Right-chiral partner ``ħ g* |↑><↓| a_r + ħ g |↓><↑| a_r† + mc² σ_z``.

    The coupling phase is the one produced by ω → -ω in the Cartesian form.
    """
    h = _chiral_hamiltonian(params, space, "right")
    return HamiltonianMatrix(h, HamiltonianForm.AJC_RIGHT, params, space)


def to_chiral_basis(h, max_total: Optional[int] = None) -> tuple[np.ndarray, list]:
    """Matrix of a two-mode operator in the circular number basis.

    Returns ``(U† H U, labels)`` with ``labels[k] = (n_l, n_r, spin)``,
    restricted to ``n_l + n_r <= max_total`` (default ``n_max - 1``, the
    interior).
    """
    space = h.space
    if max_total is None:
        max_total = space.n_max - 1
    u, boson_labels = chiral_basis(space, max_total)
    u_full = np.kron(np.eye(2), u)
    labels = [(n_l, n_r, s) for s in (UP, DOWN) for n_l, n_r in boson_labels]
    return u_full.conj().T @ h.entries @ u_full, labels


def lift_single_chiral(h: HamiltonianMatrix, labels: list) -> np.ndarray:
    """Embed a single-chiral-layout operator into chiral ``(n_l, n_r, spin)`` labels.

    The spectator chirality enters as an identity factor.
    """
    space = h.space
    if space.two_mode:
        raise ValueError("expected a single-chiral layout")
    active = 0 if space.layout is ModeLayout.SINGLE_CHIRAL_LEFT else 1
    out = np.zeros((len(labels), len(labels)), dtype=complex)
    for i, li in enumerate(labels):
        for j, lj in enumerate(labels):
            if li[1 - active] != lj[1 - active]:
                continue
            if li[active] > space.n_max or lj[active] > space.n_max:
                raise ValueError("labels exceed the single-mode cutoff")
            out[i, j] = h.entries[space.index(li[active], spin=li[2]),
                                  space.index(lj[active], spin=lj[2])]
    return out


def spin_sz(space: FockSpace, hbar: float = 1.0) -> OperatorMatrix:
    return spin_operator(space, "z", scale=hbar / 2)


def orbital_lz(space: FockSpace, hbar: float = 1.0) -> OperatorMatrix:
    """Spin-extended ``L_z ⊗ I``."""
    return spin_extend(angular_momentum_lz(space, hbar))


# Closed forms


def _check_n_l(n_l: int) -> int:
    if int(n_l) != n_l or n_l < 1:
        raise ValueError(f"doublet index n_l must be a positive integer, got {n_l!r}")
    return int(n_l)


def spectrum(params: PhysParams, n_l: int) -> DoubletEigensystem:
    """Doublet energies ``±mc²√(1 + 4ξ n_l)`` and eigenvector amplitudes."""
    n_l = _check_n_l(n_l)
    mc2 = params.rest_energy
    e = mc2 * math.sqrt(1 + 4 * params.xi * n_l)
    alpha = math.sqrt((e + mc2) / (2 * e))
    beta = math.sqrt((e - mc2) / (2 * e))
    return DoubletEigensystem(n_l, e, -e, alpha, beta)


def eigenstate(params: PhysParams, space: FockSpace, n_l: int, sign: int = +1) -> SpinorState:
    """``|+E> = α|n_l>|↑> - iβ|n_l-1>|↓>``, ``|-E> = β|n_l>|↑> + iα|n_l-1>|↓>``."""
    d = spectrum(params, n_l)
    upper = chiral_number_state(space, n_l)
    lower = chiral_number_state(space, n_l - 1)
    if sign > 0:
        cu, cd = d.alpha, -1j * d.beta
    else:
        cu, cd = d.beta, 1j * d.alpha
    return SpinorState(np.concatenate([cu * upper, cd * lower]), space)


def zitterbewegung_frequency(params: PhysParams, n_l) -> np.ndarray | float:
    """``ω_{n_l} = (mc²/ħ)√(1 + 4ξ n_l)``."""
    return params.rest_energy / params.hbar * np.sqrt(1 + 4 * params.xi * np.asarray(n_l, dtype=float))


def nonrelativistic_frequency(params: PhysParams, n_l: int) -> float:
    """First-order frequency ``mc²(1 + 2ξ n_l)/ħ``."""
    return params.rest_energy * (1 + 2 * params.xi * n_l) / params.hbar


def doublet_amplitudes(params: PhysParams, n_l: int, t) -> tuple:
    """``(c_down, c_up)`` on ``|n_l-1>|↓>`` and ``|n_l>|↑>`` starting from ``|n_l-1>|↓>``."""
    n_l = _check_n_l(n_l)
    root = math.sqrt(1 + 4 * params.xi * n_l)
    phase = zitterbewegung_frequency(params, n_l) * np.asarray(t, dtype=float)
    c_down = np.cos(phase) + 1j * np.sin(phase) / root
    c_up = math.sqrt(4 * params.xi * n_l) / root * np.sin(phase)
    return c_down, c_up


def evolve_closed_form(params: PhysParams, n_l: int, t: float,
                       space: Optional[FockSpace] = None) -> SpinorState:
    """Doublet state at time ``t`` from ``|n_l-1>|↓>``, embedded in ``space``.

    ``space`` defaults to the single left-chiral layout with cutoff ``n_l``.
    """
    n_l = _check_n_l(n_l)
    if space is None:
        space = FockSpace(n_l, ModeLayout.SINGLE_CHIRAL_LEFT)
    c_down, c_up = doublet_amplitudes(params, n_l, float(t))
    amps = np.concatenate([c_up * chiral_number_state(space, n_l),
                           c_down * chiral_number_state(space, n_l - 1)])
    return SpinorState(amps, space)


def zitterbewegung_trace(params: PhysParams, n_l: int, times) -> ObservableTrace:
    """``<L_z>, <S_z>, <J_z>`` for the doublet started in ``|n_l-1>|↓>``."""
    n_l = _check_n_l(n_l)
    times = np.asarray(times, dtype=float).ravel()
    if not times.size:
        raise ValueError("times must be non-empty")
    hbar, xi = params.hbar, params.xi
    amp = 4 * xi * n_l / (1 + 4 * xi * n_l)
    swing = amp * hbar * np.sin(zitterbewegung_frequency(params, n_l) * times) ** 2
    lz = -(n_l - 1) * hbar - swing
    sz = -hbar / 2 + swing
    jz = np.full_like(times, hbar * (0.5 - n_l))
    return ObservableTrace(times, lz, sz, jz)


def nonrelativistic_residual(params: PhysParams, n_l: int, t) -> float | np.ndarray:
    """Largest deviation of the first-order ``<L_z>, <S_z>`` from the exact ones.

    The exact and expanded laws share the ``-(n_l-1)ħ`` and ``-ħ/2``
    offsets, so both observables give the same deviation; the max is taken
    anyway. Emits :class:`ExpansionRegimeWarning` for ξ >= 0.25.
    """
    n_l = _check_n_l(n_l)
    xi, hbar = params.xi, params.hbar
    if xi >= 0.25:
        warnings.warn(f"xi = {xi:g} is outside the nonrelativistic expansion regime",
                      ExpansionRegimeWarning, stacklevel=2)
    t = np.asarray(t, dtype=float)
    exact = 4 * xi * n_l / (1 + 4 * xi * n_l) * hbar * np.sin(zitterbewegung_frequency(params, n_l) * t) ** 2
    first = 4 * xi * n_l * hbar * np.sin(nonrelativistic_frequency(params, n_l) * t) ** 2
    lz_err = np.abs((-(n_l - 1) * hbar - exact) - (-(n_l - 1) * hbar - first))
    sz_err = np.abs((-hbar / 2 + exact) - (-hbar / 2 + first))
    res = np.maximum(lz_err, sz_err)
    return float(res) if res.ndim == 0 else res


def revival_terms(z: complex, n_terms: Optional[int] = None) -> int:
    """Number of series terms needed so the dropped Poisson weight is below 1e-12.

    With an explicit ``n_terms`` the bound is checked and
    :class:`~diracjc.fockspace.TailTooLarge` raised if it fails.
    """
    lam = abs(z) ** 2

    def tail(n: int) -> float:
        # P(N >= n), N ~ Poisson(|z|²)
        if n <= 0:
            return 1.0
        return 0.0 if lam == 0 else float(gammainc(n, lam))

    if n_terms is not None:
        if n_terms < 1 or tail(n_terms) >= SERIES_TAIL_TOL:
            raise TailTooLarge(f"{n_terms} terms drop Poisson weight {tail(n_terms):.3g} "
                               f"for |z|^2 = {lam:g}")
        return int(n_terms)
    n = max(1, int(math.ceil(lam)))
    while tail(n) >= SERIES_TAIL_TOL:
        n += 1
    return n


def collapse_revival_trace(params: PhysParams, z: complex, times,
                           n_terms: Optional[int] = None) -> ObservableTrace:
    """Series for ``<S_z>`` and ``<L_z>`` from the circular coherent state ``|z>|↓>``.

    Each Fock component ``|n>|↓>`` runs its own doublet (index ``n + 1``)
    with Poisson weight ``e^{-|z|²}|z|^{2n}/n!``. ``<J_z>`` is
    ``-ħ(|z|² + 1/2)`` at all times.
    """
    times = np.asarray(times, dtype=float).ravel()
    n_terms = revival_terms(z, n_terms)
    hbar, xi = params.hbar, params.xi
    lam = abs(z) ** 2
    n = np.arange(n_terms)
    weights = poisson.pmf(n, lam) if lam > 0 else (n == 0).astype(float)
    k = n + 1
    amp = 4 * xi * k / (1 + 4 * xi * k)
    freqs = zitterbewegung_frequency(params, k)
    swing = hbar * (np.sin(np.outer(times, freqs)) ** 2 @ (weights * amp))
    sz = -hbar / 2 + swing
    lz = -hbar * lam - swing
    jz = np.full_like(times, -hbar * (lam + 0.5))
    return ObservableTrace(times, lz, sz, jz)
