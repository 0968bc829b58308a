"""Truncated bosonic Fock spaces with a spin-1/2 factor.

Basis ordering
--------------
Two-mode (Cartesian) bosonic index is ``n_x * (n_max + 1) + n_y``. Single
chiral layouts use the occupation number itself. The spin factor is the
outermost tensor factor, ordered (spin-up, spin-down), so the full index of
``|bosons>|spin>`` is ``spin * dim + bosonic_index`` with ``spin`` 0 for up.

All identities between ladder operators are exact only on the *interior*
subspace (total quanta <= n_max - 1); the top Fock level breaks the canonical
commutator.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg
from scipy.special import gammainc

__all__ = [
    "TailTooLarge",
    "ModeLayout",
    "FockSpace",
    "OperatorMatrix",
    "SpinorState",
    "UP",
    "DOWN",
    "build_ladder",
    "cartesian_operators",
    "chiral_operators",
    "chiral_mode",
    "number_operator",
    "angular_momentum_lz",
    "spin_operator",
    "spin_extend",
    "interior_indices",
    "chiral_number_state",
    "chiral_basis",
    "coherent_tail",
    "coherent_state",
    "displacement",
    "displacement_sequence",
]

UP = 0
DOWN = 1

COHERENT_TAIL_TOL = 1e-10
NORM_TOL = 1e-12


class TailTooLarge(ValueError):
    """The Fock cutoff cannot hold the requested coherent amplitude."""


class ModeLayout(enum.Enum):
    TWO_MODE_CARTESIAN = "two-mode"
    SINGLE_CHIRAL_LEFT = "left"
    SINGLE_CHIRAL_RIGHT = "right"


@dataclass(frozen=True)
class FockSpace:
    """Truncated bosonic space, ``n_max`` quanta per mode."""

    n_max: int
    layout: ModeLayout = ModeLayout.TWO_MODE_CARTESIAN

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 0:
            raise ValueError(f"n_max must be a non-negative integer, got {self.n_max!r}")
        if not isinstance(self.layout, ModeLayout):
            object.__setattr__(self, "layout", ModeLayout(self.layout))

    @property
    def two_mode(self) -> bool:
        return self.layout is ModeLayout.TWO_MODE_CARTESIAN

    @property
    def dim(self) -> int:
        """Bosonic dimension (without spin)."""
        n = self.n_max + 1
        return n * n if self.two_mode else n

    @property
    def full_dim(self) -> int:
        return 2 * self.dim

    def index(self, *quanta: int, spin: Optional[int] = None) -> int:
        """Basis index of ``|quanta>`` (and ``|spin>`` if given)."""
        n = self.n_max + 1
        if self.two_mode:
            if len(quanta) != 2:
                raise ValueError("two-mode layout needs (n_x, n_y)")
            n_x, n_y = quanta
            if not (0 <= n_x < n and 0 <= n_y < n):
                raise IndexError(f"({n_x}, {n_y}) outside cutoff {self.n_max}")
            idx = n_x * n + n_y
        else:
            if len(quanta) != 1:
                raise ValueError("single-mode layout needs one occupation number")
            (idx,) = quanta
            if not 0 <= idx < n:
                raise IndexError(f"{idx} outside cutoff {self.n_max}")
        if spin is None:
            return idx
        if spin not in (UP, DOWN):
            raise ValueError("spin must be UP (0) or DOWN (1)")
        return spin * self.dim + idx

    def labels(self, index: int) -> tuple:
        """Inverse of :meth:`index` on the spin-extended basis.

        Returns ``(n_x, n_y, spin)`` or ``(n, spin)``.
        """
        if not 0 <= index < self.full_dim:
            raise IndexError(index)
        spin, idx = divmod(index, self.dim)
        if self.two_mode:
            n_x, n_y = divmod(idx, self.n_max + 1)
            return n_x, n_y, spin
        return idx, spin

    def total_quanta(self) -> np.ndarray:
        """Total bosonic quanta of every bosonic basis state."""
        n = np.arange(self.n_max + 1)
        if self.two_mode:
            return np.add.outer(n, n).ravel()
        return n


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense operator on a :class:`FockSpace` (bosonic or spin-extended)."""

    entries: np.ndarray
    space: Optional[FockSpace] = None
    label: str = ""

    def __post_init__(self):
        entries = _freeze(self.entries)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError(f"operator {self.label!r} is not square: {entries.shape}")
        if self.space is not None and entries.shape[0] not in (self.space.dim, self.space.full_dim):
            raise ValueError(
                f"operator {self.label!r} has shape {entries.shape}, "
                f"space has dim {self.space.dim} (spin-extended {self.space.full_dim})"
            )
        object.__setattr__(self, "entries", entries)

    @property
    def spin_extended(self) -> bool:
        return self.space is not None and self.entries.shape[0] == self.space.full_dim

    @property
    def dag(self) -> "OperatorMatrix":
        label = self.label[:-1] if self.label.endswith("†") else self.label + "†"
        return OperatorMatrix(self.entries.conj().T, self.space, label)

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            return OperatorMatrix(self.entries @ other.entries, self.space,
                                  f"{self.label}{other.label}")
        return self.entries @ np.asarray(other)


@dataclass(frozen=True)
class SpinorState:
    """Normalized state over ``spin ⊗ bosons`` (spin outermost)."""

    amplitudes: np.ndarray
    space: FockSpace

    def __post_init__(self):
        amps = _freeze(self.amplitudes).ravel()
        if amps.shape != (self.space.full_dim,):
            raise ValueError(
                f"spinor needs {self.space.full_dim} amplitudes, got {amps.shape[0]}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"spinor state is not normalized (norm = {norm!r})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def product(cls, bosonic: np.ndarray, spin: int, space: FockSpace) -> "SpinorState":
        """``|bosonic>|spin>`` for a bosonic vector of length ``space.dim``."""
        bosonic = np.asarray(bosonic, dtype=complex)
        if bosonic.shape != (space.dim,):
            raise ValueError(f"bosonic vector must have length {space.dim}")
        amps = np.zeros(space.full_dim, dtype=complex)
        amps[spin * space.dim:(spin + 1) * space.dim] = bosonic
        return cls(amps, space)

    @property
    def up(self) -> np.ndarray:
        return self.amplitudes[: self.space.dim]

    @property
    def down(self) -> np.ndarray:
        return self.amplitudes[self.space.dim:]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def build_ladder(n_max: int) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Single-mode annihilation and creation matrices with cutoff ``n_max``."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1 for a ladder operator")
    a = np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1)
    a = OperatorMatrix(a, None, "a")
    return a, a.dag


def _require_two_mode(space: FockSpace, what: str) -> None:
    if not space.two_mode:
        raise ValueError(f"{what} needs the two-mode Cartesian layout, got {space.layout.value}")


def cartesian_operators(space: FockSpace) -> tuple[OperatorMatrix, OperatorMatrix]:
    """``(a_x, a_y)`` on the two-mode space."""
    _require_two_mode(space, "cartesian_operators")
    a, _ = build_ladder(space.n_max)
    eye = np.eye(space.n_max + 1)
    a_x = OperatorMatrix(np.kron(a.entries, eye), space, "a_x")
    a_y = OperatorMatrix(np.kron(eye, a.entries), space, "a_y")
    return a_x, a_y


def chiral_operators(space: FockSpace) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Circular annihilators ``a_l = (a_x + i a_y)/√2`` and ``a_r = (a_x - i a_y)/√2``.

    Creation operators are the conjugate transposes (``.dag``).
    """
    _require_two_mode(space, "chiral_operators")
    a_x, a_y = cartesian_operators(space)
    s = 1 / math.sqrt(2)
    a_l = OperatorMatrix(s * (a_x.entries + 1j * a_y.entries), space, "a_l")
    a_r = OperatorMatrix(s * (a_x.entries - 1j * a_y.entries), space, "a_r")
    return a_l, a_r


def chiral_mode(space: FockSpace, chirality: str) -> OperatorMatrix:
    """Annihilator of the ``"left"`` or ``"right"`` circular mode in any layout carrying it."""
    if chirality not in ("left", "right"):
        raise ValueError("chirality must be 'left' or 'right'")
    if space.two_mode:
        a_l, a_r = chiral_operators(space)
        return a_l if chirality == "left" else a_r
    if space.layout.value != chirality:
        raise ValueError(f"{space.layout.value}-chiral layout has no {chirality} mode")
    a, _ = build_ladder(space.n_max)
    return OperatorMatrix(a.entries, space, "a_l" if chirality == "left" else "a_r")


def number_operator(op: OperatorMatrix) -> OperatorMatrix:
    return OperatorMatrix(op.entries.conj().T @ op.entries, op.space, f"n[{op.label}]")


def angular_momentum_lz(space: FockSpace, hbar: float = 1.0) -> OperatorMatrix:
    """Orbital ``L_z = ħ(a_r† a_r - a_l† a_l)`` (bosonic part only).

    A left quantum carries ``-ħ``. Single chiral layouts get the obvious
    diagonal restriction.
    """
    if space.two_mode:
        a_l, a_r = chiral_operators(space)
        lz = number_operator(a_r).entries - number_operator(a_l).entries
    else:
        sign = -1.0 if space.layout is ModeLayout.SINGLE_CHIRAL_LEFT else 1.0
        lz = sign * np.diag(np.arange(space.n_max + 1, dtype=float))
    return OperatorMatrix(hbar * lz, space, "L_z")


_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    # |up><down| and |down><up|
    "raise": np.array([[0, 1], [0, 0]], dtype=complex),
    "lower": np.array([[0, 0], [1, 0]], dtype=complex),
    "i": np.eye(2, dtype=complex),
}


def spin_operator(space: FockSpace, which: str, bosonic: Optional[OperatorMatrix] = None,
                  scale: complex = 1.0) -> OperatorMatrix:
    """``scale * sigma_which ⊗ bosonic`` on the spin-extended space.

    ``which`` is one of ``x, y, z, raise, lower, i``; ``bosonic`` defaults
    to the identity.
    """
    sigma = _PAULI[which]
    boson = np.eye(space.dim) if bosonic is None else bosonic.entries
    label = f"σ_{which}" + (f"⊗{bosonic.label}" if bosonic is not None else "")
    return OperatorMatrix(scale * np.kron(sigma, boson), space, label)


def spin_extend(op: OperatorMatrix) -> OperatorMatrix:
    """``I_spin ⊗ op``."""
    if op.spin_extended:
        return op
    return OperatorMatrix(np.kron(np.eye(2), op.entries), op.space, op.label)


def interior_indices(space: FockSpace, spin_extended: bool = True) -> np.ndarray:
    """Basis indices with total quanta <= n_max - 1."""
    idx = np.flatnonzero(space.total_quanta() <= space.n_max - 1)
    if spin_extended:
        idx = np.concatenate([idx, idx + space.dim])
    return idx


def chiral_number_state(space: FockSpace, n_l: int, n_r: int = 0) -> np.ndarray:
    """Bosonic vector of ``|n_l, n_r>`` in circular quanta.

    Exact whenever ``n_l + n_r <= n_max``.
    """
    if n_l < 0 or n_r < 0:
        raise ValueError("occupations must be non-negative")
    if not space.two_mode:
        n = n_l if space.layout is ModeLayout.SINGLE_CHIRAL_LEFT else n_r
        other = n_r if space.layout is ModeLayout.SINGLE_CHIRAL_LEFT else n_l
        if other:
            raise ValueError(f"{space.layout.value}-chiral layout cannot hold the other chirality")
        vec = np.zeros(space.dim, dtype=complex)
        vec[space.index(n)] = 1.0
        return vec
    if n_l + n_r > space.n_max:
        raise ValueError(f"|{n_l}, {n_r}> exceeds cutoff {space.n_max}")
    a_l, a_r = chiral_operators(space)
    vec = np.zeros(space.dim, dtype=complex)
    vec[0] = 1.0
    for k in range(1, n_l + 1):
        vec = a_l.dag.entries @ vec / math.sqrt(k)
    for k in range(1, n_r + 1):
        vec = a_r.dag.entries @ vec / math.sqrt(k)
    return vec


def chiral_basis(space: FockSpace, max_total: Optional[int] = None) -> tuple[np.ndarray, list]:
    """Cartesian-to-chiral basis change on the two-mode space.

    Returns ``(U, labels)``: the columns of ``U`` are ``|n_l, n_r>`` for all
    ``n_l + n_r <= max_total`` (default ``n_max``), written in the Cartesian
    basis, and ``labels[k] = (n_l, n_r)``. ``U`` has orthonormal columns.
    """
    _require_two_mode(space, "chiral_basis")
    if max_total is None:
        max_total = space.n_max
    if max_total > space.n_max:
        raise ValueError("chiral states above n_max quanta are not representable")
    a_l, a_r = chiral_operators(space)
    ldag, rdag = a_l.dag.entries, a_r.dag.entries
    labels, columns = [], []
    left = np.zeros(space.dim, dtype=complex)
    left[0] = 1.0
    for n_l in range(max_total + 1):
        if n_l:
            left = ldag @ left / math.sqrt(n_l)
        vec = left
        for n_r in range(max_total - n_l + 1):
            if n_r:
                vec = rdag @ vec / math.sqrt(n_r)
            labels.append((n_l, n_r))
            columns.append(vec)
    return np.column_stack(columns), labels


def coherent_tail(z: complex, n_max: int) -> float:
    """Poisson weight ``e^{-|z|²} Σ_{n>n_max} |z|^{2n}/n!`` lost to the cutoff."""
    lam = abs(z) ** 2
    if lam == 0.0:
        return 0.0
    return float(gammainc(n_max + 1, lam))


def _two_mode_tail(z: complex, n_max: int) -> float:
    # box truncation keeps n_x <= n_max and n_y <= n_max, each mode carries |z|²/2
    t = coherent_tail(z / math.sqrt(2), n_max)
    return 1.0 - (1.0 - t) ** 2


def _check_tail(z: complex, space: FockSpace) -> None:
    tail = _two_mode_tail(z, space.n_max) if space.two_mode else coherent_tail(z, space.n_max)
    if tail >= COHERENT_TAIL_TOL:
        raise TailTooLarge(
            f"coherent amplitude |z|={abs(z):.6g} loses {tail:.3g} of its weight above "
            f"n_max={space.n_max}; increase n_max"
        )


def _single_mode_coherent(alpha: complex, n_max: int) -> np.ndarray:
    n = np.arange(n_max + 1)
    log_fact = np.array([math.lgamma(k + 1) for k in n])
    if alpha == 0:
        vec = np.zeros(n_max + 1, dtype=complex)
        vec[0] = 1.0
        return vec
    mag = np.exp(n * math.log(abs(alpha)) - 0.5 * log_fact)
    return mag * np.exp(1j * n * np.angle(alpha))


def coherent_state(z: complex, space: FockSpace, mode: str = "left") -> np.ndarray:
    """Bosonic part of a circular coherent state, amplitudes ``∝ z^n/√n!`` on ``|n>_mode``.

    On the two-mode layout the state is written through its product form
    ``|z/√2>_x |∓iz/√2>_y`` (upper sign for ``left``), i.e. its projection
    onto the box ``n_x, n_y <= n_max``. Renormalized after truncation.
    """
    z = complex(z)
    _check_tail(z, space)
    if space.two_mode:
        if mode not in ("left", "right"):
            raise ValueError("mode must be 'left' or 'right'")
        phase = -1j if mode == "left" else 1j
        s = 1 / math.sqrt(2)
        vec = np.kron(_single_mode_coherent(s * z, space.n_max),
                      _single_mode_coherent(phase * s * z, space.n_max))
    else:
        if space.layout.value != mode:
            raise ValueError(f"{space.layout.value}-chiral layout cannot hold a {mode} coherent state")
        vec = _single_mode_coherent(z, space.n_max)
    return vec / np.linalg.norm(vec)


def displacement(alpha: complex, space: FockSpace, axis: str, pad: Optional[int] = None) -> OperatorMatrix:
    """Cartesian displacement ``D_axis(alpha) = exp(alpha a† - alpha* a)``.

    The exponential is taken in a padded single-mode space (cutoff
    ``n_max + pad``) and then projected onto the box, so low-lying columns
    carry the untruncated matrix elements. Exactly unitary only on columns
    whose displaced image stays below the cutoff.
    """
    _require_two_mode(space, "displacement")
    if axis not in ("x", "y"):
        raise ValueError("axis must be 'x' or 'y'")
    n = space.n_max + 1
    if pad is None:
        pad = space.n_max + 20
    a, a_dag = build_ladder(space.n_max + pad)
    gen = alpha * a_dag.entries - np.conj(alpha) * a.entries
    d = scipy.linalg.expm(gen)[:n, :n]
    eye = np.eye(n)
    full = np.kron(d, eye) if axis == "x" else np.kron(eye, d)
    return OperatorMatrix(full, space, f"D_{axis}")


def displacement_sequence(z: complex, space: FockSpace) -> OperatorMatrix:
    """Two Cartesian displacements preparing the left circular coherent state ``|z>_l``.

    ``D_l(z) = D_x(z/√2) D_y(-i z/√2)``; the ``1/√2`` follows from
    ``a_l† = (a_x† - i a_y†)/√2``.
    """
    z = complex(z)
    _check_tail(z, space)
    s = 1 / math.sqrt(2)
    d_x = displacement(s * z, space, "x")
    d_y = displacement(-1j * s * z, space, "y")
    return OperatorMatrix(d_x.entries @ d_y.entries, space, "D_l")
