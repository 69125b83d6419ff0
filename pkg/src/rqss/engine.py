"""Recursive construction of psi_k = U_k|t>, amplitude amplification and search."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .analytic import auto_iterations
from .lattice import LatticeGeometry, QuantumState, flat_index
from .noise import ErrorConfig, ErrorModel
from .phase_ops import CostLedger, OperatorRequest, apply_selective_phase

Amplification = Union[str, int]  # "auto", "scan" or a fixed iteration count


@dataclass
class SearchParams:
    n: int
    target: Optional[tuple[int, int]] = None
    errors: ErrorConfig = field(default_factory=ErrorConfig)
    amplification: Amplification = "auto"
    fastpath: bool = True
    scan_max: int = 0  # 0 -> 3 * auto j + 3
    through_n: bool = False  # diagnostic: also build psi_n

    def __post_init__(self):
        self.geometry = LatticeGeometry(self.n)
        if self.target is None:
            c = self.geometry.side // 2
            self.target = (c, c)
        self.target = tuple(int(v) for v in self.target)
        self.target_index = flat_index(*self.target, self.geometry)
        if not (self.amplification in ("auto", "scan") or
                (isinstance(self.amplification, int) and self.amplification >= 0)):
            raise ValueError(f"amplification must be 'auto', 'scan' or a non-negative int, got {self.amplification!r}")

    @property
    def Delta(self) -> float:
        return self.errors.Delta

    @property
    def centered(self) -> bool:
        return self.target[0] % 3 == 1 and self.target[1] % 3 == 1

    def error_model(self) -> ErrorModel:
        return ErrorModel(self.errors, self.geometry, "fast" if self.fastpath else "circuit")


@dataclass
class RecursionTrace:
    alpha: list[complex] = field(default_factory=list)  # alpha[k-1] = <s_k^tau|psi_{k-1}>
    residual: list[float] = field(default_factory=list)  # largest amplitude of psi_{k-1} outside H_k^tau
    steps: list[int] = field(default_factory=list)  # steps[k] = T[U_k]

    @property
    def omega(self) -> np.ndarray:
        return np.abs(np.asarray(self.alpha)) ** 2

    @property
    def max_residual(self) -> float:
        return max(self.residual, default=0.0)


@dataclass
class SearchResult:
    params: SearchParams
    success_probability: float
    iterations: int
    total_steps: int
    ledger: CostLedger
    trace: RecursionTrace
    scan: list[float] = field(default_factory=list)

    @property
    def target_warning(self) -> bool:
        return not self.params.centered


def _target_request(t: int, adjoint: bool = False) -> OperatorRequest:
    return OperatorRequest("selective_phase_target", target=t, adjoint=adjoint)


def apply_U(state: QuantumState, kappa: int, model: ErrorModel, target: int, adjoint: bool = False,
            ledger: Optional[CostLedger] = None) -> QuantumState:
    """U_k = U_{k-1} I(t) U_{k-1}^dagger S(s_k) U_{k-1}, U_0 = 1, with realized gates."""
    if kappa == 0:
        return state
    state.geometry.check_level(kappa)
    big = OperatorRequest("big_S", level=kappa, adjoint=adjoint)
    tph = _target_request(target, adjoint)
    if not adjoint:
        apply_U(state, kappa - 1, model, target, False, ledger)
        model.apply(state, big, ledger)
        apply_U(state, kappa - 1, model, target, True, ledger)
        model.apply(state, tph, ledger)
        apply_U(state, kappa - 1, model, target, False, ledger)
    else:
        apply_U(state, kappa - 1, model, target, True, ledger)
        model.apply(state, tph, ledger)
        apply_U(state, kappa - 1, model, target, False, ledger)
        model.apply(state, big, ledger)
        apply_U(state, kappa - 1, model, target, True, ledger)
    state.check_norm()
    return state


def _tau_block(state: QuantumState, kappa: int, target: tuple[int, int]) -> tuple[complex, float]:
    """Overlap with the level-k u.s.s. containing the target, and the largest
    amplitude outside that subsquare."""
    m = 3**kappa
    grid = state.grid()
    a, b = target[0] // m, target[1] // m
    block = grid[a * m:(a + 1) * m, b * m:(b + 1) * m]
    overlap = complex(math.fsum(block.real.ravel()) + 1j * math.fsum(block.imag.ravel())) / m
    outside = np.abs(grid).copy()
    outside[a * m:(a + 1) * m, b * m:(b + 1) * m] = 0.0
    return overlap, float(outside.max(initial=0.0))


def build_psi(params: SearchParams, model: Optional[ErrorModel] = None,
              ledger: Optional[CostLedger] = None) -> tuple[QuantumState, RecursionTrace]:
    """Iterate psi_k = I^eps(psi_{k-1}) S^delta(s_k) psi_{k-1} from psi_0 = |t>.

    Returns psi_{n-1} (psi_n with ``through_n``) and the per-level trace,
    which always extends to alpha_n. The reflection about psi_{k-1} is a
    rank-1 update billed as U_{k-1} I(t) U_{k-1}^dagger.
    """
    model = model or params.error_model()
    ledger = ledger if ledger is not None else CostLedger()
    n = params.n
    top = n if params.through_n else n - 1
    eps = model.phase_offset("selective_phase_target")
    psi = QuantumState.basis(params.geometry, *params.target)
    trace = RecursionTrace(steps=[ledger.steps])
    for kappa in range(1, top + 1):
        alpha, resid = _tau_block(psi, kappa, params.target)
        trace.alpha.append(alpha)
        trace.residual.append(resid)
        prev = psi.copy()
        t_prev = trace.steps[-1]
        model.apply(psi, OperatorRequest("big_S", level=kappa), ledger)
        apply_selective_phase(psi, prev, eps)
        ledger.bill("U_conjugation", 2 * t_prev)
        ledger.bill("selective_phase_target")
        psi.check_norm()
        trace.steps.append(ledger.steps)
    if top < n:
        alpha, resid = _tau_block(psi, n, params.target)
        trace.alpha.append(alpha)
        trace.residual.append(resid)
    return psi, trace


def amplify(params: SearchParams, trace: Optional[RecursionTrace] = None,
            model: Optional[ErrorModel] = None) -> SearchResult:
    """Amplify <t|U_{n-1}^dagger|s_n> by iterating U^dagger S(s_n) U I(t) on U^dagger|s_n>."""
    model = model or params.error_model()
    if trace is None:
        _, trace = build_psi(params, model)
    n, t = params.n, params.target_index
    alpha_n = trace.alpha[n - 1]

    policy = params.amplification
    if policy == "auto":
        j_run = auto_iterations(alpha_n)
    elif policy == "scan":
        j_run = params.scan_max or 3 * auto_iterations(alpha_n) + 3
    else:
        j_run = int(policy)

    ledger = CostLedger()
    state = QuantumState.basis(params.geometry, 0, 0)
    model.apply(state, OperatorRequest("S_k", level=n), ledger)
    apply_U(state, n - 1, model, t, adjoint=True, ledger=ledger)
    prep_steps = ledger.steps
    probs = [abs(state.amplitudes[t]) ** 2]
    best = (probs[0], 0)
    for j in range(1, j_run + 1):
        model.apply(state, _target_request(t), ledger)
        apply_U(state, n - 1, model, t, False, ledger)
        model.apply(state, OperatorRequest("big_S", level=n), ledger)
        apply_U(state, n - 1, model, t, True, ledger)
        p = abs(state.amplitudes[t]) ** 2
        probs.append(p)
        if policy == "scan" and p > best[0]:
            best = (p, j)
    if policy == "scan":
        p, j = best
        per = (ledger.steps - prep_steps) // j_run if j_run else 0
        total = prep_steps + j * per
        return SearchResult(params, float(p), j, total, ledger, trace, scan=[float(q) for q in probs])
    return SearchResult(params, float(probs[-1]), j_run, ledger.steps, ledger, trace, scan=[float(q) for q in probs])


def run_search(params: SearchParams) -> SearchResult:
    model = params.error_model()
    _, trace = build_psi(params, model)
    if abs(trace.alpha[params.n - 1]) == 0:
        raise ValueError("degenerate amplitude: |alpha_n| = 0")
    return amplify(params, trace, model)
