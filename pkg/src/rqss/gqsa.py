"""General quantum search: spectral moments, performance parameters, AKR cost
model, a dense iteration simulator and phase-error sensitivity sweeps."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np
import scipy.linalg

from .analytic import alpha_recursion

MAX_DENSE_DIM = 4096


class SpectrumError(ValueError):
    pass


@dataclass
class GqsaSpectrum:
    """Eigenphases of D_s with target weights |<l|t>|^2; row ``s_index`` is |s>."""

    theta: np.ndarray
    weight: np.ndarray
    s_index: int

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        self.weight = np.asarray(self.weight, dtype=float)
        if self.theta.shape != self.weight.shape:
            raise SpectrumError("theta and weight lengths differ")
        if np.any(np.abs(self.theta) > math.pi + 1e-12):
            raise SpectrumError("eigenphases must lie in [-pi, pi]")
        if self.theta[self.s_index] != 0.0:
            raise SpectrumError("the s entry must have theta = 0")
        if np.any(self.weight < 0):
            raise SpectrumError("weights must be non-negative")
        total = self.weight.sum()
        if abs(total - 1.0) > 1e-10:
            raise SpectrumError(f"weights sum to {total}, expected 1")

    @property
    def overlap(self) -> float:
        """|<s|t>|."""
        return math.sqrt(self.weight[self.s_index])

    @property
    def others(self) -> np.ndarray:
        return np.arange(self.theta.size) != self.s_index

    @property
    def theta_min(self) -> float:
        return float(np.abs(self.theta[self.others]).min())

    @classmethod
    def grover(cls, N: int) -> "GqsaSpectrum":
        return cls(np.array([0.0, math.pi]), np.array([1 / N, 1 - 1 / N]), 0)

    @classmethod
    def synthetic(cls, N: int, lambda2: float, asymmetry: float = 0.0) -> "GqsaSpectrum":
        """Pair of eigenphases +-theta0 carrying the off-s weight, chosen so the
        second moment equals ``lambda2``; ``asymmetry`` in [-1, 1] skews the
        weights and produces a first moment ``asymmetry * W * cot(theta0/2)``."""
        w_off = 1 - 1 / N
        if lambda2 <= 0:
            return cls.grover(N)
        theta0 = 2 * math.atan(math.sqrt(w_off / lambda2))
        w = np.array([1 / N, w_off * (1 + asymmetry) / 2, w_off * (1 - asymmetry) / 2])
        return cls(np.array([0.0, theta0, -theta0]), w, 0)

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "GqsaSpectrum":
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["theta", "weight"]:
                raise SpectrumError(f"{path}: expected header 'theta,weight'")
            rows = [(float(r["theta"]), float(r["weight"])) for r in reader]
        zeros = [i for i, (th, _) in enumerate(rows) if th == 0.0]
        if len(zeros) != 1:
            raise SpectrumError(f"{path}: need exactly one theta=0 row marking |s>, found {len(zeros)}")
        th, w = zip(*rows)
        return cls(np.array(th), np.array(w), zeros[0])

    def to_csv(self, path: Union[str, Path]) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["theta", "weight"])
            for th, wt in zip(self.theta, self.weight):
                w.writerow([repr(float(th)), repr(float(wt))])


def _cot_half(theta):
    return np.sin(theta) / (1 - np.cos(theta))


def moments(spectrum: GqsaSpectrum) -> tuple[float, float]:
    th = spectrum.theta[spectrum.others]
    w = spectrum.weight[spectrum.others]
    if np.any(th == 0.0):
        raise SpectrumError("eigenphase 0 outside the s eigenvector: cot singularity")
    c = _cot_half(th)
    return float(np.sum(w * c)), float(np.sum(w * c * c))


@dataclass
class GqsaReport:
    lambda1: float
    lambda2: float
    phi: float
    A: float
    B: float
    eta: float
    P_m: float
    q_m: float
    overlap: float
    T: Optional[float] = None


def gqsa_performance(spectrum: GqsaSpectrum, phi: float, N: Optional[float] = None) -> GqsaReport:
    """Peak overlap and iteration count of iterating D_s I_t^phi on |s>.

    ``phi`` is reduced to [0, 2 pi): the gate depends on it only mod 2 pi,
    while sin(phi/2) in the cost formula would otherwise flip sign.
    """
    phi = math.fmod(phi, 2 * math.pi)
    if phi < 0:
        phi += 2 * math.pi
    sh = math.sin(phi / 2)
    if abs(sh) < 1e-15:
        raise ValueError("degenerate phase: sin(phi/2) = 0")
    ts = spectrum.overlap
    if ts <= 0:
        raise SpectrumError("|<s|t>| must be positive")
    l1, l2 = moments(spectrum)
    A = math.cos(phi / 2) / sh + l1
    B = math.sqrt(1 + l2)
    two_eta = math.atan2(2 * B * ts, A)  # cot(2 eta) = A / (2 B ts), 2 eta in (0, pi)
    sin2 = math.sin(two_eta)
    rep = GqsaReport(l1, l2, phi, A, B, two_eta / 2, (sin2 / (B * sh)) ** 2,
                     math.pi * B * sin2 / (4 * ts), ts)
    rep.T = akr_time(rep, N if N is not None else 1 / ts**2).t_akr
    return rep


@dataclass
class AkrTime:
    t_akr: float
    t_gqsa: float
    diverged: bool


def akr_time(report: GqsaReport, N: float, t_iteration: float = 1.0, t_target: float = 1.0) -> AkrTime:
    """AKR step count and the generic GQSA cost with T[I_s] = 2 sqrt(N)."""
    sqN = math.sqrt(N)
    s2 = math.sin(2 * report.eta)
    if s2 <= 0:
        return AkrTime(math.inf, math.inf, True)
    sh = math.sin(report.phi / 2)
    t_akr = sqN * report.B * sh * (math.pi * report.B / 2 + 1 / s2)
    t_gqsa = (2 * report.q_m * t_iteration + 2 * sqN + t_target) / math.sqrt(report.P_m)
    return AkrTime(t_akr, t_gqsa, False)


def compensating_phase(lambda1: float) -> float:
    """phi' in (0, 2 pi) with cot(phi'/2) = -lambda1."""
    return 2 * math.atan2(1.0, -lambda1)


# --- dense iteration --------------------------------------------------------

def iterate_gqsa(diffusion, phi: float, q: int, s: np.ndarray, t: Union[int, np.ndarray]) -> tuple[np.ndarray, int]:
    """|<t|(D_s I_t^phi)^k|s>| for k = 0..q and the argmax k.

    ``diffusion`` is an explicit unitary or ``"grover"`` (2|s><s| - 1).
    """
    s = np.asarray(s, dtype=np.complex128)
    dim = s.size
    if dim > MAX_DENSE_DIM:
        raise ValueError(f"dimension {dim} exceeds {MAX_DENSE_DIM}")
    if isinstance(t, (int, np.integer)):
        tv = np.zeros(dim, dtype=np.complex128)
        tv[t] = 1.0
    else:
        tv = np.asarray(t, dtype=np.complex128)

    if isinstance(diffusion, str):
        if diffusion != "grover":
            raise ValueError(f"unknown diffusion {diffusion!r}")
        D = lambda v: 2 * np.vdot(s, v) * s - v  # noqa: E731
    else:
        M = np.asarray(diffusion, dtype=np.complex128)
        if M.shape != (dim, dim):
            raise ValueError("diffusion shape does not match s")
        if np.max(np.abs(M @ s - s)) > 1e-10:
            raise ValueError("invalid diffusion: D_s|s> != |s>")
        D = lambda v: M @ v  # noqa: E731

    g = 1 - np.exp(1j * phi)
    psi = s.copy()
    trace = np.empty(q + 1)
    trace[0] = abs(np.vdot(tv, psi))
    for k in range(1, q + 1):
        psi = D(psi - g * np.vdot(tv, psi) * tv)
        trace[k] = abs(np.vdot(tv, psi))
    return trace, int(np.argmax(trace))


def spectrum_from_unitary(D: np.ndarray, s: np.ndarray, t: np.ndarray, tol: float = 1e-8) -> GqsaSpectrum:
    """Eigen-decompose a normal D with D|s> = |s> via complex Schur form."""
    T, Z = scipy.linalg.schur(np.asarray(D, dtype=np.complex128), output="complex")
    lam = np.diag(T)
    theta = np.angle(lam)
    w = np.abs(Z.conj().T @ np.asarray(t, dtype=np.complex128)) ** 2
    s_ov = np.abs(Z.conj().T @ np.asarray(s, dtype=np.complex128))
    s_index = int(np.argmax(s_ov))
    if abs(theta[s_index]) > tol:
        raise SpectrumError("s is not an eigenvector with eigenvalue 1")
    theta[s_index] = 0.0
    return GqsaSpectrum(theta, w / w.sum(), s_index)


def random_orthogonal_diffusion(dim: int, overlap: float, rng: np.random.Generator,
                                min_angle: float = math.pi / 4) -> tuple[np.ndarray, np.ndarray, int, GqsaSpectrum]:
    """Random real orthogonal D with D|s> = |s>, rotation angles in [min_angle, pi].

    Returns ``(D, s, t, spectrum)`` with t = e_0 and <s|t> = ``overlap``; the
    spectrum is exact (built from the rotation planes, not diagonalised).
    """
    if dim % 2 == 0:
        raise ValueError("dim must be odd (s plus rotation planes)")
    t = 0
    s = rng.normal(size=dim)
    s[0] = 0
    s *= math.sqrt(1 - overlap**2) / np.linalg.norm(s)
    s[0] = overlap
    # orthonormal basis of the complement of s
    Q, _ = np.linalg.qr(np.column_stack([s, rng.normal(size=(dim, dim - 1))]))
    Q = Q[:, 1:]
    angles = rng.uniform(min_angle, math.pi, size=(dim - 1) // 2)
    R = np.zeros((dim - 1, dim - 1))
    for i, a in enumerate(angles):
        c, sn = math.cos(a), math.sin(a)
        R[2 * i:2 * i + 2, 2 * i:2 * i + 2] = [[c, -sn], [sn, c]]
    D = np.outer(s, s) + Q @ R @ Q.T
    tq = Q[t, :]  # components of e_t along the complement basis
    plane_w = (tq[0::2] ** 2 + tq[1::2] ** 2) / 2
    theta = np.concatenate([[0.0], angles, -angles])
    weight = np.concatenate([[overlap**2], plane_w, plane_w])
    return D, s, t, GqsaSpectrum(theta, weight, 0)


# --- sweeps ------------------------------------------------------------------

SWEEP_COLUMNS = ("epsilon", "A", "eta", "P_m", "q_m", "T_AKR", "epsilon_recursive", "omega_n_recursive")


def sensitivity_sweep(spectrum: GqsaSpectrum, eps_grid, N: Optional[float] = None,
                      n_recursive: Optional[int] = None) -> list[dict]:
    """Evaluate the GQSA model at phi = pi + eps over a grid.

    With ``n_recursive`` each row also carries the recursive algorithm's
    analytic omega_n at the grid rescaled to |eps| <= 0.1/sqrt(n).
    """
    eps_grid = [float(e) for e in eps_grid]
    N = N if N is not None else 1 / spectrum.weight[spectrum.s_index]
    scale = None
    if n_recursive is not None:
        top = max((abs(e) for e in eps_grid), default=0.0)
        scale = (0.1 / math.sqrt(n_recursive)) / top if top > 0 else 0.0
    rows = []
    for eps in eps_grid:
        rep = gqsa_performance(spectrum, math.pi + eps, N)
        row = {"epsilon": eps, "A": rep.A, "eta": rep.eta, "P_m": rep.P_m, "q_m": rep.q_m, "T_AKR": rep.T,
               "epsilon_recursive": None, "omega_n_recursive": None}
        if scale is not None:
            er = eps * scale
            row["epsilon_recursive"] = er
            row["omega_n_recursive"] = float(alpha_recursion(n_recursive, er, er).omega[-1])
        rows.append(row)
    return rows
