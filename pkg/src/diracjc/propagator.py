"""Numerical time evolution by exact diagonalization.

This module is the independent check on the closed-form dynamics and must
not import anything from :mod:`diracjc.dirac2d`. Hamiltonians are taken
duck-typed: anything exposing ``.entries`` (and optionally ``.params.hbar``
and ``.space``) or a bare square array.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .fockspace import OperatorMatrix, SpinorState

__all__ = [
    "HERMITIAN_TOL",
    "NonHermitian",
    "ObservableTrace",
    "EigenDecomposition",
    "diagonalize",
    "evolve",
    "expectation",
    "trajectory",
    "angular_momentum_trajectory",
]

HERMITIAN_TOL = 1e-12


class NonHermitian(ValueError):
    pass


@dataclass(frozen=True)
class ObservableTrace:
    """Angular-momentum expectations along a time grid, in units of ħ·(caller's ħ)."""

    times: np.ndarray
    lz: np.ndarray
    sz: np.ndarray
    jz: np.ndarray

    def __post_init__(self):
        for name in ("times", "lz", "sz", "jz"):
            arr = np.array(getattr(self, name), dtype=float).ravel()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = self.times.shape[0]
        if not all(getattr(self, k).shape == (n,) for k in ("lz", "sz", "jz")):
            raise ValueError("trace columns must all match the time grid")
        if n and np.max(np.abs(self.jz - self.lz - self.sz)) > 1e-10:
            raise ValueError("trace violates jz = lz + sz")

    def __len__(self):
        return self.times.shape[0]


def _matrix(obj: Any) -> np.ndarray:
    return np.asarray(getattr(obj, "entries", obj), dtype=complex)


def _check_hermitian(mat: np.ndarray, what: str) -> None:
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"{what} is not a square matrix: {mat.shape}")
    err = np.max(np.abs(mat - mat.conj().T)) if mat.size else 0.0
    if err > HERMITIAN_TOL:
        raise NonHermitian(f"{what} is not Hermitian (max |H - H†| = {err:.3g})")


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source: Any = None
    hbar: float = 1.0

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruction_residual(self) -> float:
        v = self.eigenvectors
        h = (v * self.eigenvalues) @ v.conj().T
        return float(np.max(np.abs(h - _matrix(self.source))))

    def unitarity_residual(self) -> float:
        v = self.eigenvectors
        return float(np.max(np.abs(v.conj().T @ v - np.eye(self.dim))))


def diagonalize(h, hbar: float | None = None) -> EigenDecomposition:
    """Full spectrum and orthonormal eigenbasis of a Hermitian matrix.

    ``hbar`` defaults to ``h.params.hbar`` when present, else 1.
    """
    mat = _matrix(h)
    _check_hermitian(mat, "Hamiltonian")
    if hbar is None:
        hbar = getattr(getattr(h, "params", None), "hbar", 1.0)
    w, v = np.linalg.eigh(mat)
    for arr in (w, v):
        arr.setflags(write=False)
    return EigenDecomposition(w, v, h, float(hbar))


def _as_vector(psi, dim: int) -> np.ndarray:
    vec = np.asarray(getattr(psi, "amplitudes", psi), dtype=complex).ravel()
    if vec.shape != (dim,):
        raise ValueError(f"state has dimension {vec.shape[0]}, Hamiltonian has {dim}")
    return vec


def _wrap(vec: np.ndarray, like):
    if isinstance(like, SpinorState):
        return SpinorState(vec, like.space)
    return vec


def evolve(decomp: EigenDecomposition, psi0, t: float):
    """``ψ(t) = V exp(-iΛt/ħ) V† ψ0``. Returns the same kind as ``psi0``."""
    vec = _as_vector(psi0, decomp.dim)
    v = decomp.eigenvectors
    coeff = v.conj().T @ vec
    phases = np.exp(-1j * decomp.eigenvalues * (t / decomp.hbar))
    return _wrap(v @ (phases * coeff), psi0)


def expectation(psi, op) -> float:
    """Real expectation ``<ψ|O|ψ>`` of a Hermitian operator."""
    mat = _matrix(op)
    _check_hermitian(mat, f"operator {getattr(op, 'label', '')!r}".strip())
    vec = _as_vector(psi, mat.shape[0])
    val = np.vdot(vec, mat @ vec)
    if abs(val.imag) > HERMITIAN_TOL:
        raise NonHermitian(f"expectation has imaginary part {val.imag:.3g}")
    return float(val.real)


def trajectory(decomp: EigenDecomposition, psi0, ops: Sequence, times) -> np.ndarray:
    """Expectation of every operator at every time; shape ``(len(times), len(ops))``.

    One diagonalization serves the whole grid: operators are rotated into
    the eigenbasis once and each time point only needs phase factors.
    """
    times = np.asarray(times, dtype=float).ravel()
    vec = _as_vector(psi0, decomp.dim)
    v = decomp.eigenvectors
    mats = [_matrix(op) for op in ops]
    for op, mat in zip(ops, mats):
        _check_hermitian(mat, f"operator {getattr(op, 'label', '')!r}")
        if mat.shape[0] != decomp.dim:
            raise ValueError(f"operator has dimension {mat.shape[0]}, Hamiltonian has {decomp.dim}")
    out = np.empty((times.shape[0], len(mats)))
    if not times.size or not mats:
        return out
    coeff = v.conj().T @ vec
    # (dim, n_times) amplitudes in the eigenbasis
    amps = np.exp(-1j * np.outer(decomp.eigenvalues, times / decomp.hbar)) * coeff[:, None]
    for k, mat in enumerate(mats):
        rotated = v.conj().T @ mat @ v
        vals = np.sum(amps.conj() * (rotated @ amps), axis=0)
        if np.max(np.abs(vals.imag)) > HERMITIAN_TOL:
            raise NonHermitian("trajectory expectation acquired an imaginary part")
        out[:, k] = vals.real
    return out


def angular_momentum_trajectory(decomp: EigenDecomposition, psi0, lz: OperatorMatrix,
                                sz: OperatorMatrix, times) -> ObservableTrace:
    """``<L_z>``, ``<S_z>`` and ``<J_z> = <L_z + S_z>`` along ``times``.

    ``jz`` is evaluated from the summed operator, not by adding columns.
    """
    lz_m, sz_m = _matrix(lz), _matrix(sz)
    vals = trajectory(decomp, psi0, [lz_m, sz_m, lz_m + sz_m], times)
    return ObservableTrace(np.asarray(times, dtype=float), vals[:, 0], vals[:, 1], vals[:, 2])
