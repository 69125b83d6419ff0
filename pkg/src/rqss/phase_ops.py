"""Primitive unitaries on the lattice and lattice-time-step accounting.

Every local operator costs one step: a single ``L_b`` layer (applied to all
subsquares and transverse lines simultaneously), the simultaneous phase on
the subsquare origins, and the target phase. Composite operators bill the
sum of their parts whichever path computes them.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Union

import numpy as np

from .lattice import LatticeGeometry, QuantumState

KINDS = ("selective_phase_target", "selective_phase_origin_block", "L_b", "S_kx", "S_ky", "S_k", "big_S")


def phase_coefficient(theta: float) -> complex:
    """f = 1 + exp(i theta); the rotation applies phase pi + theta."""
    return 1.0 + np.exp(1j * theta)


@dataclass(frozen=True)
class PhaseGate:
    theta: float

    @property
    def f(self) -> complex:
        return phase_coefficient(self.theta)

    @property
    def eigenphase(self) -> complex:
        """Factor picked up by the selected state, ``1 - f``."""
        return 1.0 - self.f


@dataclass
class CostLedger:
    steps: int = 0
    breakdown: Counter = field(default_factory=Counter)

    def bill(self, kind: str, count: int = 1) -> None:
        self.steps += count
        self.breakdown[kind] += count

    def __iadd__(self, other: "CostLedger") -> "CostLedger":
        self.steps += other.steps
        self.breakdown.update(other.breakdown)
        return self


def _bill(ledger: Optional[CostLedger], kind: str, count: int = 1) -> None:
    if ledger is not None:
        ledger.bill(kind, count)


def sk_cost(kappa: int) -> int:
    return 2 * (3**kappa - 1)


def big_s_cost(kappa: int) -> int:
    return 2 * sk_cost(kappa) + 1


@dataclass(frozen=True)
class OperatorRequest:
    kind: str
    level: int = 0
    adjoint: bool = False
    phase: float = 0.0
    b: int = 0
    axis: str = "x"
    target: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.axis not in ("x", "y"):
            raise ValueError(f"axis must be 'x' or 'y', got {self.axis!r}")

    def dagger(self) -> "OperatorRequest":
        return replace(self, adjoint=not self.adjoint)


# --- selective phases -------------------------------------------------------

def apply_selective_phase(state: QuantumState, chi: Union[QuantumState, int], theta: float,
                          ledger: Optional[CostLedger] = None) -> QuantumState:
    """psi <- psi - f <chi|psi> |chi>.

    A basis-state ``chi`` (flat index) is local and bills one step; for a
    general state the caller accounts for its decomposition.
    """
    f = phase_coefficient(theta)
    amps = state.amplitudes
    if isinstance(chi, (int, np.integer)):
        amps[chi] -= f * amps[chi]
        _bill(ledger, "selective_phase_target")
        return state
    c = chi.amplitudes
    norm = np.linalg.norm(c)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"reflection state must be unit norm, got {norm}")
    amps -= (f * np.vdot(c, amps)) * c
    return state


def apply_origin_phase(state: QuantumState, kappa: int, theta: float,
                       ledger: Optional[CostLedger] = None) -> QuantumState:
    """Simultaneous selective phase on the local (0, 0) vertex of every level-kappa subsquare."""
    state.geometry.check_level(kappa)
    v = state.geometry.block_view(state.amplitudes, kappa)
    v[:, 0, :, 0] *= 1.0 - phase_coefficient(theta)
    _bill(ledger, "selective_phase_origin_block")
    return state


# --- L_b and the superposition builders -------------------------------------

def lb_angle(kappa: int, b: int) -> float:
    m = 3**kappa - b + 1
    return float(np.arccos(1.0 / np.sqrt(m)))


def apply_Lb(state: QuantumState, kappa: int, b: int, axis: str = "x", adjoint: bool = False,
             ledger: Optional[CostLedger] = None) -> QuantumState:
    """Real Givens rotation between local columns b-1 and b of every subsquare.

    |b-1> -> (|b-1> + sqrt(m-1)|b>)/sqrt(m) with m = 3^kappa - b + 1.
    """
    state.geometry.check_level(kappa)
    if not 1 <= b <= 3**kappa - 1:
        raise ValueError(f"b={b} outside 1..{3**kappa - 1}")
    m = 3**kappa - b + 1
    c = 1.0 / np.sqrt(m)
    s = np.sqrt((m - 1) / m)
    if adjoint:
        s = -s
    v = state.geometry.block_view(state.amplitudes, kappa)
    if axis == "x":
        lo, hi = v[:, b - 1, :, :], v[:, b, :, :]
    else:
        lo, hi = v[:, :, :, b - 1], v[:, :, :, b]
    a0, a1 = lo.copy(), hi.copy()
    lo[...] = c * a0 - s * a1
    hi[...] = s * a0 + c * a1
    _bill(ledger, "L_b")
    return state


def _apply_S_axis(state, kappa, axis, adjoint, ledger):
    bs = range(1, 3**kappa)
    for b in (reversed(bs) if adjoint else bs):
        apply_Lb(state, kappa, b, axis, adjoint, ledger)
    return state


def apply_Skx(state: QuantumState, kappa: int, adjoint: bool = False,
              ledger: Optional[CostLedger] = None) -> QuantumState:
    return _apply_S_axis(state, kappa, "x", adjoint, ledger)


def apply_Sky(state: QuantumState, kappa: int, adjoint: bool = False,
              ledger: Optional[CostLedger] = None) -> QuantumState:
    return _apply_S_axis(state, kappa, "y", adjoint, ledger)


def apply_Sk(state: QuantumState, kappa: int, adjoint: bool = False,
             ledger: Optional[CostLedger] = None) -> QuantumState:
    """S_k = S_kx S_ky: maps the origin of every subsquare to its uniform superposition."""
    if adjoint:
        apply_Skx(state, kappa, True, ledger)
        apply_Sky(state, kappa, True, ledger)
    else:
        apply_Sky(state, kappa, False, ledger)
        apply_Skx(state, kappa, False, ledger)
    return state


# --- parallel subsquare reflection ------------------------------------------

def _neumaier(rows: np.ndarray) -> np.ndarray:
    """Compensated sum over the leading axis, vectorised over the rest."""
    total = np.zeros(rows.shape[1:], dtype=rows.dtype)
    comp = np.zeros_like(total)
    for r in rows:
        t = total + r
        big = np.abs(total.real) >= np.abs(r.real)
        comp.real += np.where(big, (total.real - t.real) + r.real, (r.real - t.real) + total.real)
        big = np.abs(total.imag) >= np.abs(r.imag)
        comp.imag += np.where(big, (total.imag - t.imag) + r.imag, (r.imag - t.imag) + total.imag)
        total = t
    return total + comp


def block_overlaps(state: QuantumState, kappa: int) -> np.ndarray:
    """<s_kappa^{alpha beta}|psi> for every subsquare, shape (A, A)."""
    v = state.geometry.block_view(state.amplitudes, kappa)
    line_sums = v.sum(axis=3)  # (A, m, A)
    return _neumaier(np.moveaxis(line_sums, 1, 0)) * 3.0 ** (-kappa)


def apply_bigS(state: QuantumState, kappa: int, delta: float, adjoint: bool = False, path: str = "fast",
               ledger: Optional[CostLedger] = None) -> QuantumState:
    """Product of I^delta over all level-kappa uniform superpositions.

    ``path="circuit"`` runs S_k, the origin phase and S_k^dagger gate by gate;
    ``path="fast"`` applies the equivalent block projection directly. Both
    bill 4*3^kappa - 3 steps.
    """
    state.geometry.check_level(kappa)
    theta = -delta if adjoint else delta
    if path == "circuit":
        apply_Sk(state, kappa, True, ledger)
        apply_origin_phase(state, kappa, theta, ledger)
        apply_Sk(state, kappa, False, ledger)
        return state
    if path != "fast":
        raise ValueError(f"unknown path {path!r}")
    ov = block_overlaps(state, kappa)
    v = state.geometry.block_view(state.amplitudes, kappa)
    v -= (phase_coefficient(theta) * 3.0 ** (-kappa)) * ov[:, None, :, None]
    _bill(ledger, "L_b", 2 * sk_cost(kappa))
    _bill(ledger, "selective_phase_origin_block")
    return state


# --- request dispatch and dense oracle ---------------------------------------

def apply_request(state: QuantumState, req: OperatorRequest, ledger: Optional[CostLedger] = None,
                  path: str = "fast") -> QuantumState:
    """Apply the ideal (error-free) operator named by ``req``."""
    if req.kind == "selective_phase_target":
        theta = -req.phase if req.adjoint else req.phase
        return apply_selective_phase(state, req.target, theta, ledger)
    if req.kind == "selective_phase_origin_block":
        theta = -req.phase if req.adjoint else req.phase
        return apply_origin_phase(state, req.level, theta, ledger)
    if req.kind == "L_b":
        return apply_Lb(state, req.level, req.b, req.axis, req.adjoint, ledger)
    if req.kind == "S_kx":
        return apply_Skx(state, req.level, req.adjoint, ledger)
    if req.kind == "S_ky":
        return apply_Sky(state, req.level, req.adjoint, ledger)
    if req.kind == "S_k":
        return apply_Sk(state, req.level, req.adjoint, ledger)
    return apply_bigS(state, req.level, req.phase, req.adjoint, path, ledger)


def dense_matrix(apply: Union[OperatorRequest, Callable[[QuantumState], QuantumState]],
                 geometry: LatticeGeometry) -> np.ndarray:
    """Explicit N x N matrix of an operator, column by column (n <= 2 only)."""
    if geometry.n > 2:
        raise ValueError(f"dense oracle limited to n <= 2, got n={geometry.n}")
    if isinstance(apply, OperatorRequest):
        req = apply
        apply = lambda st: apply_request(st, req)  # noqa: E731
    N = geometry.N
    M = np.empty((N, N), dtype=np.complex128)
    for j in range(N):
        e = np.zeros(N, dtype=np.complex128)
        e[j] = 1.0
        M[:, j] = apply(QuantumState(geometry, e)).amplitudes
    return M
