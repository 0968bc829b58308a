"""Dirac-oscillator parameters <-> single trapped-ion laser settings.

Frequencies quoted in "Hz" (``omega_rabi``, ``delta``, ``nu``) are used
as angular frequencies (s^-1) throughout; the correspondence formulas carry
no 2π factors.

Spin labels: the upper spinor component is the excited level ``|e>`` and
the lower one the ground level ``|g>``, so ``σ_z = |e><e| - |g><g|`` and the
Pauli matrices are the standard ones in the ``(e, g)`` basis.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import scipy.constants

from .dirac2d import PhysParams

__all__ = [
    "FEASIBLE_MAX_HZ",
    "InfeasibleParametersWarning",
    "IonTrapParams",
    "PulseSetting",
    "dirac_from_trap",
    "trap_from_dirac",
    "zitterbewegung_frequency_hz",
    "pulse_table",
    "target_hamiltonian_terms",
    "shelving_probability",
    "read_trap_file",
    "write_trap_file",
    "format_trap_file",
    "parse_trap_file",
]

# Available ranges for Ω̃ and δ.
FEASIBLE_MAX_HZ = 1e6
HBAR_SI = scipy.constants.hbar


class InfeasibleParametersWarning(UserWarning):
    """Requested settings fall outside the experimentally available ranges."""


@dataclass(frozen=True)
class IonTrapParams:
    """Isotropic trap and laser settings (same η, Ω̃ for the x and y modes)."""

    eta: float
    omega_rabi: float
    delta: float
    delta_width_motional: float = 1.0
    nu_x: Optional[float] = None
    nu_y: Optional[float] = None
    ion_mass: Optional[float] = None
    wave_number: Optional[float] = None

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta!r}")
        if not self.omega_rabi >= 0:
            raise ValueError(f"omega_rabi must be non-negative, got {self.omega_rabi!r}")
        if not self.delta >= 0:
            raise ValueError(f"delta must be non-negative, got {self.delta!r}")
        if not self.delta_width_motional > 0:
            raise ValueError("delta_width_motional must be positive")
        if self.ion_mass is not None and self.wave_number is not None:
            for name in ("nu_x", "nu_y"):
                nu = getattr(self, name)
                if nu is None:
                    continue
                expected = lamb_dicke(self.wave_number, self.ion_mass, nu)
                if abs(expected - self.eta) > 1e-9 * expected:
                    raise ValueError(
                        f"eta = {self.eta!r} disagrees with k·sqrt(hbar/(2 M {name})) = {expected!r}"
                    )


def lamb_dicke(wave_number: float, ion_mass: float, nu: float) -> float:
    """``η = k √(ħ / 2Mν)`` in SI units."""
    if not (wave_number > 0 and ion_mass > 0 and nu > 0):
        raise ValueError("wave number, mass and trap frequency must be positive")
    return wave_number * math.sqrt(HBAR_SI / (2 * ion_mass * nu))


@dataclass(frozen=True)
class PulseSetting:
    axis: str
    detuning: float
    phase_red: float
    phase_blue: float
    produced_term: tuple


def dirac_from_trap(trap: IonTrapParams, hbar: float = 1.0) -> PhysParams:
    """Dirac-oscillator parameters realized by ``trap``.

    ``c = √2 η Ω̃ Δ̃``, ``mc² = ħδ`` and ``mωc = √2 ħ η Ω̃ / Δ̃``, which gives
    ``ξ = 2(ηΩ̃/δ)²`` and an oscillator width equal to ``Δ̃``.

    With ``Ω̃ = 0`` the speed of light is not fixed by the trap; ``c`` is
    then set to 1 and only ``mc² = ħδ`` and ``ω = 0`` carry meaning.
    """
    if trap.delta == 0:
        raise ValueError("delta = 0 maps to an infinite mass (mc^2 = hbar*delta); "
                         "the Dirac oscillator needs a detuned drive")
    w = trap.delta_width_motional
    coupling = math.sqrt(2) * trap.eta * trap.omega_rabi
    c = coupling * w if trap.omega_rabi > 0 else 1.0
    m = hbar * trap.delta / c ** 2
    omega = hbar * coupling / (w * m * c)
    return PhysParams(m=m, c=c, omega=omega, hbar=hbar)


def zitterbewegung_frequency_hz(params: PhysParams, n_l: int = 1) -> float:
    """``ω_{n_l} = (mc²/ħ)√(1 + 4ξ n_l)``; for ``n_l = 1`` this is ``δ√(1+4ξ)``."""
    return params.rest_energy / params.hbar * math.sqrt(1 + 4 * params.xi * n_l)


def trap_from_dirac(target_xi: float, target_omega1: float, eta: float,
                    delta_width_motional: float = 1.0) -> IonTrapParams:
    """Detuning and coupling reaching ``(ξ, ω₁)`` for a fixed Lamb-Dicke parameter.

    ``δ = ω₁/√(1+4ξ)`` and ``Ω̃ = δ√(ξ/2)/η``. Settings beyond the
    available 10^6 Hz range raise :class:`InfeasibleParametersWarning`
    but are still returned.
    """
    if not target_xi > 0:
        raise ValueError("target_xi must be positive")
    if not target_omega1 > 0:
        raise ValueError("target_omega1 must be positive")
    if not eta > 0:
        raise ValueError("eta must be positive")
    delta = target_omega1 / math.sqrt(1 + 4 * target_xi)
    omega_rabi = delta * math.sqrt(target_xi / 2) / eta
    for name, value in (("delta", delta), ("omega_rabi", omega_rabi)):
        if value > FEASIBLE_MAX_HZ:
            warnings.warn(f"{name} = {value:.4g} Hz exceeds the available {FEASIBLE_MAX_HZ:.0e} Hz",
                          InfeasibleParametersWarning, stacklevel=2)
    return IonTrapParams(eta=eta, omega_rabi=omega_rabi, delta=delta,
                         delta_width_motional=delta_width_motional)


def pulse_table(trap: IonTrapParams) -> list[PulseSetting]:
    """Four sideband configurations whose sum builds the Dirac oscillator.

    Each row drives one motional axis with a red (JC) and a blue (AJC)
    sideband at phases ``(phase_red, phase_blue)``. Only the first row is
    detuned, supplying the ``ħδ σ_z`` mass term.
    """
    half, three_half = math.pi / 2, 3 * math.pi / 2
    return [
        PulseSetting("x", trap.delta, three_half, half, ("sigma_x*p_x", "sigma_z")),
        PulseSetting("y", 0.0, 0.0, math.pi, ("sigma_y*p_y",)),
        PulseSetting("x", 0.0, half, half, ("sigma_y*x",)),
        PulseSetting("y", 0.0, 0.0, 0.0, ("sigma_x*y",)),
    ]


def target_hamiltonian_terms() -> frozenset:
    """Operator content of ``c(σ_x p_x + σ_y p_y) + mωc(σ_x y - σ_y x) + mc² σ_z``."""
    return frozenset({"sigma_x*p_x", "sigma_y*p_y", "sigma_x*y", "sigma_y*x", "sigma_z"})


def shelving_probability(sz_expectation: float, hbar: float = 1.0) -> float:
    """Excited-state population from ``<S_z> = (ħ/2)(2 P_e - 1)``."""
    half = hbar / 2
    if not -half <= sz_expectation <= half:
        raise ValueError(f"<S_z> = {sz_expectation!r} is outside [-hbar/2, hbar/2]")
    return sz_expectation / hbar + 0.5


# key = value parameter files

_FILE_KEYS = {
    "eta": "eta",
    "omega_rabi_hz": "omega_rabi",
    "delta_hz": "delta",
    "delta_width": "delta_width_motional",
    "nu_x_hz": "nu_x",
    "nu_y_hz": "nu_y",
    "ion_mass_kg": "ion_mass",
    "wave_number_per_m": "wave_number",
}


def parse_trap_file(text: str) -> IonTrapParams:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if key not in _FILE_KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        if _FILE_KEYS[key] in values:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[_FILE_KEYS[key]] = float(value)
        except ValueError:
            raise ValueError(f"line {lineno}: {key} is not a number: {value.strip()!r}") from None
    missing = [k for k, f in _FILE_KEYS.items() if f in ("eta", "omega_rabi", "delta") and f not in values]
    if missing:
        raise ValueError(f"missing required keys: {', '.join(missing)}")
    return IonTrapParams(**values)


def format_trap_file(trap: IonTrapParams) -> str:
    lines = []
    for key, attr in _FILE_KEYS.items():
        value = getattr(trap, attr)
        if value is not None:
            lines.append(f"{key} = {value!r}")
    return "\n".join(lines) + "\n"


def read_trap_file(path) -> IonTrapParams:
    return parse_trap_file(Path(path).read_text())


def write_trap_file(trap: IonTrapParams, path) -> None:
    Path(path).write_text(format_trap_file(trap))
