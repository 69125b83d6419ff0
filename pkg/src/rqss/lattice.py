"""Lattice geometry, subsquare indexing and the dense state vector.

Vertices of the 3^n x 3^n lattice are stored row-major, ``x * 3^n + y``, so
the level-k subsquares of a state reshaped to ``(A, 3^k, A, 3^k)`` (with
``A = 3^(n-k)``) are indexed as ``[alpha, lx, beta, ly]``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

DEFAULT_MAX_N = 7
NORM_TOL = 1e-10


class GuardError(ValueError):
    """Raised when a lattice would exceed the configured memory guard."""


class UnitarityError(RuntimeError):
    """Raised when a state's norm drifts away from 1."""


def max_n() -> int:
    return int(os.environ.get("RQSS_MAX_N", DEFAULT_MAX_N))


@dataclass(frozen=True)
class LatticeGeometry:
    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValueError(f"recursion depth must be a positive integer, got {self.n!r}")
        if self.n > max_n():
            raise GuardError(f"n={self.n} exceeds memory guard n <= {max_n()} (set RQSS_MAX_N to override)")

    @property
    def side(self) -> int:
        return 3**self.n

    @property
    def N(self) -> int:
        return 9**self.n

    def check_level(self, kappa: int) -> None:
        if not 1 <= kappa <= self.n:
            raise ValueError(f"level {kappa} outside 1..{self.n}")

    def blocks(self, kappa: int) -> int:
        """Number of subsquares per axis at level ``kappa``."""
        return 3 ** (self.n - kappa)

    def block_view(self, amplitudes: np.ndarray, kappa: int) -> np.ndarray:
        a, m = self.blocks(kappa), 3**kappa
        return amplitudes.reshape(a, m, a, m)


class SubsquareId(NamedTuple):
    kappa: int
    alpha: int
    beta: int


def flat_index(x: int, y: int, geometry: LatticeGeometry) -> int:
    side = geometry.side
    if not (0 <= x < side and 0 <= y < side):
        raise IndexError(f"vertex ({x}, {y}) outside the {side}x{side} lattice")
    return x * side + y


def coords(index: int, geometry: LatticeGeometry) -> tuple[int, int]:
    if not 0 <= index < geometry.N:
        raise IndexError(f"index {index} outside 0..{geometry.N - 1}")
    return divmod(index, geometry.side)


def subsquare_of(x: int, y: int, kappa: int, geometry: LatticeGeometry) -> tuple[SubsquareId, tuple[int, int]]:
    """Level-``kappa`` subsquare containing ``(x, y)`` and the local offset inside it."""
    flat_index(x, y, geometry)
    geometry.check_level(kappa)
    m = 3**kappa
    return SubsquareId(kappa, x // m, y // m), (x % m, y % m)


def subsquare_indices(sq: SubsquareId, geometry: LatticeGeometry) -> np.ndarray:
    m = 3**sq.kappa
    xs = sq.alpha * m + np.arange(m)
    ys = sq.beta * m + np.arange(m)
    return (xs[:, None] * geometry.side + ys[None, :]).ravel()


@dataclass
class QuantumState:
    """Dense amplitude vector over the 9^n lattice vertices.

    Operators act in place on ``amplitudes``; use :meth:`copy` to keep a
    snapshot. The norm is never silently restored.
    """

    geometry: LatticeGeometry
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (self.geometry.N,):
            raise ValueError(f"expected {self.geometry.N} amplitudes, got shape {self.amplitudes.shape}")

    @classmethod
    def basis(cls, geometry: LatticeGeometry, x: int, y: int) -> "QuantumState":
        amps = np.zeros(geometry.N, dtype=np.complex128)
        amps[flat_index(x, y, geometry)] = 1.0
        return cls(geometry, amps)

    @classmethod
    def random(cls, geometry: LatticeGeometry, rng: np.random.Generator) -> "QuantumState":
        amps = rng.normal(size=geometry.N) + 1j * rng.normal(size=geometry.N)
        return cls(geometry, amps / np.linalg.norm(amps))

    def copy(self) -> "QuantumState":
        return QuantumState(self.geometry, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def check_norm(self, tol: float = NORM_TOL) -> None:
        drift = abs(self.norm() - 1.0)
        if drift > tol:
            raise UnitarityError(f"norm drift {drift:.3e} exceeds {tol:.0e}")

    def grid(self) -> np.ndarray:
        side = self.geometry.side
        return self.amplitudes.reshape(side, side)

    def __getitem__(self, xy: tuple[int, int]) -> complex:
        return complex(self.amplitudes[flat_index(*xy, self.geometry)])


def uss_state(sq: SubsquareId, geometry: LatticeGeometry) -> QuantumState:
    """Uniform superposition over the vertices of one subsquare."""
    geometry.check_level(sq.kappa)
    nb = geometry.blocks(sq.kappa)
    if not (0 <= sq.alpha < nb and 0 <= sq.beta < nb):
        raise IndexError(f"subsquare {sq} outside the level-{sq.kappa} grid")
    amps = np.zeros(geometry.N, dtype=np.complex128)
    amps[subsquare_indices(sq, geometry)] = 3.0 ** (-sq.kappa)
    return QuantumState(geometry, amps)


def inner_product(a: QuantumState, b: QuantumState) -> complex:
    if a.geometry != b.geometry:
        raise ValueError(f"geometry mismatch: n={a.geometry.n} vs n={b.geometry.n}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))
