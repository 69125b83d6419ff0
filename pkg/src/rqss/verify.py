"""Self-check suite behind ``rqss verify``.

Each check returns ``(ok, detail)``. Expected values that could be computed
by the code under test are frozen constants here, so a broken primitive
cannot validate itself.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import phase_ops as ops
from .analytic import alpha_recursion, cost_formula, omega_lower_bound
from .engine import SearchParams, apply_U, build_psi
from .lattice import LatticeGeometry, QuantumState
from .noise import ErrorConfig, ErrorModel
from .phase_ops import CostLedger, OperatorRequest

ALPHA2_ZERO_ERROR = -23 / 81
COST_U = {0: 0, 1: 10, 2: 64, 3: 298, 4: 1216, 5: 4618}
COST_BIG_S = {1: 9, 2: 33, 3: 105, 4: 321, 5: 969}


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str
    seconds: float


def all_requests(n: int, target: int) -> list[OperatorRequest]:
    reqs = [OperatorRequest("selective_phase_target", target=target, phase=0.3)]
    for k in range(1, n + 1):
        reqs += [OperatorRequest("selective_phase_origin_block", level=k, phase=-0.2),
                 OperatorRequest("S_kx", level=k), OperatorRequest("S_ky", level=k), OperatorRequest("S_k", level=k),
                 OperatorRequest("big_S", level=k, phase=0.1)]
        for b in range(1, 3**k):
            reqs += [OperatorRequest("L_b", level=k, b=b, axis="x"), OperatorRequest("L_b", level=k, b=b, axis="y")]
    return reqs


def check_dense_unitarity():
    worst = 0.0
    for n in (1, 2):
        g = LatticeGeometry(n)
        t = g.N // 2
        for cfg in (ErrorConfig(), ErrorConfig(0.1, -0.2, 0.05, 3)):
            model = ErrorModel(cfg, g)
            for req in all_requests(n, t):
                M = ops.dense_matrix(lambda st: model.apply(st, req), g)
                worst = max(worst, np.abs(M.conj().T @ M - np.eye(g.N)).max())
    return worst <= 1e-10, f"max |M^dagger M - 1| = {worst:.2e}"


def check_path_equivalence():
    rng = np.random.default_rng(7)
    worst = 0.0
    for n in (1, 2):
        g = LatticeGeometry(n)
        for k in range(1, n + 1):
            for _ in range(100):
                st = QuantumState.random(g, rng)
                a = ops.apply_bigS(st.copy(), k, 0.17, path="circuit")
                b = ops.apply_bigS(st.copy(), k, 0.17, path="fast")
                worst = max(worst, np.abs(a.amplitudes - b.amplitudes).max())
    return worst <= 1e-10, f"max circuit/fast difference = {worst:.2e}"


def check_costs(max_level: int = 3):
    g = LatticeGeometry(max_level)
    model = ErrorModel(ErrorConfig(), g)
    for k in range(1, max_level + 1):
        led = CostLedger()
        ops.apply_bigS(QuantumState.basis(g, 0, 0), k, 0.0, ledger=led)
        if led.steps != COST_BIG_S[k]:
            return False, f"T[bigS_{k}] = {led.steps}, expected {COST_BIG_S[k]}"
    for k in range(0, max_level + 1):
        led = CostLedger()
        apply_U(QuantumState.basis(g, 1, 1), k, model, 0, ledger=led)
        if led.steps != COST_U[k] or led.steps != cost_formula(k):
            return False, f"T[U_{k}] = {led.steps}, expected {COST_U[k]}"
    return True, f"T[U_k], T[bigS_k] exact for k <= {max_level}"


def check_alpha2():
    _, tr = build_psi(SearchParams(2))
    a1, a2 = tr.alpha
    ok = abs(a1 - 1 / 3) <= 1e-12 and abs(a2 - ALPHA2_ZERO_ERROR) <= 1e-12
    return ok, f"alpha_1 = {a1.real:.12f}, alpha_2 = {a2.real:.12f} (expected {ALPHA2_ZERO_ERROR:.12f})"


def check_adjoint_cancellation():
    rng = np.random.default_rng(11)
    g = LatticeGeometry(2)
    worst = 0.0
    for cfg in (ErrorConfig(), ErrorConfig(0.2, 0.1, 0.08, 5, True)):
        model = ErrorModel(cfg, g)
        for req in all_requests(2, 40):
            st = QuantumState.random(g, rng)
            out = model.apply(model.apply(st.copy(), req), req.dagger())
            worst = max(worst, np.abs(out.amplitudes - st.amplitudes).max())
    return worst <= 1e-12, f"max |Z^dagger Z psi - psi| = {worst:.2e}"


def check_recursion_fidelity(ns=(2, 3), grid=(-0.3, 0.0, 0.3)):
    worst = 0.0
    for n in ns:
        for e in grid:
            for d in grid:
                _, tr = build_psi(SearchParams(n, errors=ErrorConfig(e, d)))
                model = alpha_recursion(n, e, d).alpha
                worst = max(worst, np.abs(np.asarray(tr.alpha) - model).max())
    return worst <= 1e-9, f"max |alpha_sim - alpha_model| = {worst:.2e} over n in {list(ns)}"


def check_orthogonality(ns=(3,)):
    worst = 0.0
    for n in ns:
        for cfg in (ErrorConfig(2.0, -1.3), ErrorConfig(math.pi, -math.pi), ErrorConfig(0.2, 0.1, 0.1, 9)):
            _, tr = build_psi(SearchParams(n, errors=cfg))
            worst = max(worst, tr.max_residual)
    return worst <= 1e-10, f"max orthogonality residual = {worst:.2e}"


def check_bound(ns=(4, 5)):
    for n in ns:
        D = 0.1 / math.sqrt(n)
        for e, d in ((D, D), (D, -D), (-D, D)):
            _, tr = build_psi(SearchParams(n, errors=ErrorConfig(e, d)))
            w = tr.omega[-1]
            if w < omega_lower_bound(n, D):
                return False, f"n={n}: omega_n={w:.5f} below bound {omega_lower_bound(n, D):.5f}"
    return True, f"omega_n above lower bound for n in {list(ns)}"


QUICK: list[tuple[str, Callable]] = [
    ("dense unitarity (n<=2)", check_dense_unitarity),
    ("circuit vs fast path equivalence", check_path_equivalence),
    ("cost ledger closed forms", check_costs),
    ("base amplitudes alpha_1, alpha_2", check_alpha2),
    ("error reversibility", check_adjoint_cancellation),
    ("recursion fidelity (n<=3)", check_recursion_fidelity),
]
FULL: list[tuple[str, Callable]] = [
    ("cost ledger closed forms (k<=5)", lambda: check_costs(5)),
    ("recursion fidelity grid (n<=5)",
     lambda: check_recursion_fidelity((3, 4, 5), tuple(np.linspace(-0.3, 0.3, 5)))),
    ("orthogonality invariant", lambda: check_orthogonality((3, 4))),
    ("robustness lower bound", check_bound),
]


def verify(level: str = "quick", echo: Callable[[str], None] = print) -> list[CheckResult]:
    checks = QUICK + (FULL if level == "full" else [])
    results = []
    for name, fn in checks:
        start = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as err:  # a crashing check is a failed check
            ok, detail = False, f"{type(err).__name__}: {err}"
        res = CheckResult(name, bool(ok), detail, time.perf_counter() - start)
        results.append(res)
        echo(f"[{'PASS' if res.ok else 'FAIL'}] {name}: {detail} ({res.seconds:.2f}s)")
    return results
