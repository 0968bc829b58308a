"""2+1 Dirac oscillator, its Jaynes-Cummings form, and trapped-ion settings."""

from .fockspace import FockSpace, ModeLayout, OperatorMatrix, SpinorState, TailTooLarge
from .dirac2d import (
    HamiltonianForm,
    HamiltonianMatrix,
    PhysParams,
    build_hamiltonian_ajc,
    build_hamiltonian_cartesian,
    build_hamiltonian_jc,
    collapse_revival_trace,
    spectrum,
    zitterbewegung_trace,
)
from .propagator import NonHermitian, ObservableTrace, diagonalize, evolve, expectation
from .iontrap import IonTrapParams, dirac_from_trap, pulse_table, shelving_probability, trap_from_dirac

__version__ = "0.1.0"
