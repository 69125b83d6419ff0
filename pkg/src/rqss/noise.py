"""Systematic, reproducible and reversible gate errors.

Requested target phases pick up ``epsilon``, subsquare phases ``delta``; the
superposition builders become ``E^dagger S_k`` and ``S_k^dagger E`` for a fixed
nearest-neighbour unitary ``E``. Asking for an adjoint always yields the exact
adjoint of the realized forward gate.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from . import phase_ops as ops
from .lattice import LatticeGeometry, QuantumState
from .phase_ops import CostLedger, OperatorRequest

ERROR_FIELDS = ("epsilon", "delta", "nu", "seed", "straddle", "phase_errors", "local_errors")


@dataclass(frozen=True)
class ErrorConfig:
    epsilon: float = 0.0
    delta: float = 0.0
    nu: float = 0.0
    seed: int = 0
    straddle: bool = False
    phase_errors: bool = True
    local_errors: bool = True

    def __post_init__(self):
        if self.nu < 0:
            raise ValueError(f"local error strength must be >= 0, got {self.nu}")

    @property
    def Delta(self) -> float:
        return max(abs(self.epsilon), abs(self.delta))

    def to_json(self) -> dict:
        d = asdict(self)
        return {k: d[k] for k in ERROR_FIELDS}

    @classmethod
    def from_json(cls, d: dict) -> "ErrorConfig":
        unknown = set(d) - set(ERROR_FIELDS)
        if unknown:
            raise ValueError(f"unknown error config fields: {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True)
class LocalErrorOperator:
    """E = Y_odd Y_even X_odd X_even, each factor a layer of disjoint
    nearest-neighbour real rotations.

    ``angles[layer][x, y]`` rotates the pair starting at (x, y) towards
    (x+1, y) for x-layers or (x, y+1) for y-layers.
    """

    geometry: LatticeGeometry
    nu: float
    seed: int
    straddle: bool

    @cached_property
    def angles(self) -> dict[str, np.ndarray]:
        side = self.geometry.side
        rng = np.random.default_rng(self.seed)
        out = {}
        for name in ("x0", "x1", "y0", "y1"):
            u = rng.uniform(-1.0, 1.0, size=(side, side))
            start = np.arange(side)
            ok = (start % 2 == int(name[1])) & (start + 1 < side)
            if not self.straddle:
                ok &= start % 3 != 2
            mask = ok[:, None] if name[0] == "x" else ok[None, :]
            out[name] = np.where(mask, self.nu * u, 0.0)
        return out

    @property
    def is_identity(self) -> bool:
        return self.nu == 0.0

    def _layer(self, grid: np.ndarray, name: str, sign: float) -> None:
        side = self.geometry.side
        p = int(name[1])
        starts = np.arange(p, side - 1, 2)
        if starts.size == 0:
            return
        ang = self.angles[name]
        if name[0] == "x":
            th = sign * ang[starts, :]
            a0, a1 = grid[starts, :].copy(), grid[starts + 1, :].copy()
            grid[starts, :] = np.cos(th) * a0 - np.sin(th) * a1
            grid[starts + 1, :] = np.sin(th) * a0 + np.cos(th) * a1
        else:
            th = sign * ang[:, starts]
            a0, a1 = grid[:, starts].copy(), grid[:, starts + 1].copy()
            grid[:, starts] = np.cos(th) * a0 - np.sin(th) * a1
            grid[:, starts + 1] = np.sin(th) * a0 + np.cos(th) * a1

    def apply(self, state: QuantumState, adjoint: bool = False) -> QuantumState:
        if self.is_identity:
            return state
        grid = state.grid()
        order = ["x0", "x1", "y0", "y1"]
        if adjoint:
            for name in reversed(order):
                self._layer(grid, name, -1.0)
        else:
            for name in order:
                self._layer(grid, name, 1.0)
        return state


def build_local_error(nu: float, seed: int, geometry: LatticeGeometry, straddle: bool = False) -> LocalErrorOperator:
    if nu < 0:
        raise ValueError(f"nu must be >= 0, got {nu}")
    return LocalErrorOperator(geometry, float(nu), int(seed), bool(straddle))


class ErrorModel:
    """Realizes requested operators under a fixed :class:`ErrorConfig`."""

    def __init__(self, config: ErrorConfig, geometry: LatticeGeometry, path: str = "fast"):
        self.config = config
        self.geometry = geometry
        self.path = path
        nu = config.nu if config.local_errors else 0.0
        self.local = build_local_error(nu, config.seed, geometry, config.straddle)

    def phase_offset(self, kind: str) -> float:
        if not self.config.phase_errors:
            return 0.0
        if kind == "selective_phase_target":
            return self.config.epsilon
        if kind in ("selective_phase_origin_block", "big_S"):
            return self.config.delta
        return 0.0

    def effective_gate(self, req: OperatorRequest) -> Callable[..., QuantumState]:
        """Callable ``(state, ledger=None) -> state`` applying the realized operator.

        The ledger is billed for the requested operator only.
        """
        realized = OperatorRequest(req.kind, req.level, req.adjoint, req.phase + self.phase_offset(req.kind),
                                   req.b, req.axis, req.target)
        local = self.local
        path = self.path

        if req.kind in ("S_k", "big_S") and not local.is_identity:
            def gate(state: QuantumState, ledger: Optional[CostLedger] = None) -> QuantumState:
                if req.kind == "S_k" and not req.adjoint:
                    ops.apply_request(state, realized, ledger, path)
                    return local.apply(state, adjoint=True)
                if req.kind == "S_k":
                    local.apply(state)
                    return ops.apply_request(state, realized, ledger, path)
                # E^dagger S I S^dagger E
                local.apply(state)
                ops.apply_request(state, realized, ledger, path)
                return local.apply(state, adjoint=True)
            return gate

        def gate(state: QuantumState, ledger: Optional[CostLedger] = None) -> QuantumState:
            return ops.apply_request(state, realized, ledger, path)
        return gate

    def apply(self, state: QuantumState, req: OperatorRequest, ledger: Optional[CostLedger] = None) -> QuantumState:
        return self.effective_gate(req)(state, ledger)
