"""Closed-form amplitude recursions, robustness bound and step counts."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .phase_ops import big_s_cost, phase_coefficient, sk_cost


@dataclass
class AmplitudeTrace:
    n: int
    epsilon: float
    delta: float
    alpha: np.ndarray  # alpha[k-1] = alpha_k

    @property
    def omega(self) -> np.ndarray:
        return np.abs(self.alpha) ** 2

    @property
    def omega_tilde(self) -> np.ndarray:
        return 1.0 - 2.0 * self.omega


def alpha_recursion(n: int, epsilon: float, delta: float, alpha1: complex = 1 / 3) -> AmplitudeTrace:
    """Exact complex iteration alpha_{k+1} = (alpha_k/3)(1 - fe - fd + fe fd |alpha_k|^2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    fe, fd = phase_coefficient(epsilon), phase_coefficient(delta)
    alpha = np.empty(n, dtype=np.complex128)
    alpha[0] = alpha1
    for k in range(1, n):
        a = alpha[k - 1]
        alpha[k] = (a / 3) * (1 - fe - fd + fe * fd * abs(a) ** 2)
    return AmplitudeTrace(n, epsilon, delta, alpha)


@dataclass
class OmegaTrace:
    omega: np.ndarray
    clamped: list[int] = field(default_factory=list)  # levels where the ratio went negative


def omega_ratio(omega: float, epsilon: float, delta: float, cross_term: bool = False) -> float:
    """omega_{k+1}/omega_k to second order in the phase errors.

    The default truncation drops the term
    ``2 eps delta omega (3 - 4 omega)/9``, so it is only O(Delta^4)-accurate
    when ``eps * delta == 0``; ``cross_term=True`` restores it.
    """
    wt = 1.0 - 2.0 * omega
    r = (1 - 4 * omega / 3) ** 2 - (wt / 9) * (epsilon**2 + delta**2 + wt * (epsilon - delta) ** 2)
    if cross_term:
        r += 2 * epsilon * delta * omega * (3 - 4 * omega) / 9
    return r


def omega_recursion(n: int, epsilon: float, delta: float, omega1: float = 1 / 9,
                    cross_term: bool = False) -> OmegaTrace:
    """Second-order small-error model for omega_k = |alpha_k|^2.

    Outside the small-error regime the ratio can go negative; it is clamped
    to 0 and the level recorded rather than raised.
    """
    if max(abs(epsilon), abs(delta)) > 0.5:
        raise ValueError("second-order model requires |epsilon|, |delta| <= 0.5")
    omega = np.empty(n)
    omega[0] = omega1
    clamped = []
    for k in range(1, n):
        r = omega_ratio(omega[k - 1], epsilon, delta, cross_term)
        if r < 0:
            clamped.append(k + 1)
            r = 0.0
        omega[k] = omega[k - 1] * r
    return OmegaTrace(omega, clamped)


def omega_lower_bound(n: int, Delta: float) -> float:
    return 11 / (150 * n) - Delta**2 / 15


def cost_formula(kappa: int) -> int:
    """T[U_k] = (4k - 1) 3^k + 1."""
    if kappa < 0:
        raise ValueError("kappa must be >= 0")
    return (4 * kappa - 1) * 3**kappa + 1


def cost_recursion(kappa: int) -> int:
    t = 0
    for k in range(1, kappa + 1):
        t = 3 * t + 4 * 3**k - 2
    return t


def auto_iterations(alpha_n: complex) -> int:
    a = abs(alpha_n)
    if a == 0:
        raise ValueError("degenerate amplitude: |alpha_n| = 0")
    return max(0, round(math.pi / (4 * math.asin(min(a, 1.0))) - 0.5))


@dataclass
class ComplexityBreakdown:
    n: int
    iterations: int
    preparation: int
    per_iteration: int
    total: int
    sqrtN_lnN: float
    sqrtN_ln3N: float


def total_complexity(n: int, iterations: int | None = None) -> ComplexityBreakdown:
    """Step count of preparation plus ``iterations`` amplification rounds.

    With ``iterations=None`` the auto policy on the zero-error amplitude is used.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if iterations is None:
        iterations = auto_iterations(alpha_recursion(n, 0.0, 0.0).alpha[-1])
    tu = cost_formula(n - 1)
    prep = sk_cost(n) + tu
    per = 2 * tu + big_s_cost(n) + 1
    N = 9**n
    return ComplexityBreakdown(n, iterations, prep, per, prep + iterations * per,
                               math.sqrt(N) * math.log(N), math.sqrt(N) * math.log(N) ** 3)
