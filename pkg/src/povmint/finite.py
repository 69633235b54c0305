"""Finite measure spaces: counting constraints, frames, and reconstruction
of a density family from its classical probability table p_ij = tr(rho_i rho_j)."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .operators import is_density


@dataclass(frozen=True)
class FiniteMeasure:
    """Point weights nu_i > 0; resolution forces sum nu_i = n."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or np.any(w <= 0):
            raise ValueError("weights must be a 1-D array of positives")
        object.__setattr__(self, "weights", w)

    @property
    def count(self) -> int:
        return len(self.weights)

    def total(self) -> float:
        return float(self.weights.sum())


@dataclass(frozen=True)
class ProbTable:
    """Symmetric table p_ij with the row-sum constraint sum_j nu_j p_ij = 1."""

    p: np.ndarray
    measure: FiniteMeasure
    n: int

    def validate(self, tol: float = 1e-8):
        p = np.asarray(self.p, dtype=float)
        nn = self.measure.count
        if p.shape != (nn, nn):
            raise ValueError(f"table must be {nn}x{nn}, got {p.shape}")
        if np.any(p < -tol) or np.any(p > 1 + tol):
            raise ValueError("probabilities must lie in [0, 1]")
        if np.max(np.abs(p - p.T)) > tol:
            raise ValueError("table must be symmetric")
        rows = p @ self.measure.weights
        if np.max(np.abs(rows - 1.0)) > tol:
            raise ValueError(
                f"row sums sum_j nu_j p_ij must equal 1 (worst defect "
                f"{np.max(np.abs(rows - 1.0)):.3g})")
        if abs(self.measure.total() - self.n) > tol:
            raise ValueError("weights must sum to the Hilbert dimension n")

    def to_json(self) -> str:
        return json.dumps({
            "p": np.asarray(self.p, dtype=float).ravel().tolist(),
            "nu": self.measure.weights.tolist(),
            "n": self.n,
        })

    @classmethod
    def from_json(cls, text: str) -> "ProbTable":
        data = json.loads(text)
        nu = np.asarray(data["nu"], dtype=float)
        size = len(nu)
        p = np.asarray(data["p"], dtype=float).reshape(size, size)
        return cls(p, FiniteMeasure(nu), int(data["n"]))


@dataclass(frozen=True)
class FeasibilityReport:
    n_min: int
    n_max: float
    free_parameters: str
    notes: str = ""


def feasibility_bounds(n: int, rank_one: bool = False) -> FeasibilityReport:
    """Allowed number of points N for a resolving family in dimension n.

    Full-rank: 1 <= N <= 2n^2 - 2 with (N-1)(n^2-1) free parameters.
    Rank-one: the quadratic N^2 - N(4n-1) + 2n^2 - n <= 0 brackets N
    (discriminant 8n^2 - 4n + 1), together with the frame requirement N >= n.
    """
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    if n == 1:
        return FeasibilityReport(1, 0, "0",
                                 "degenerate: n^2 - 1 = 0, only trivial families")
    if not rank_one:
        return FeasibilityReport(1, 2 * n * n - 2, "(N-1)(n^2-1)")
    disc = math.sqrt(8 * n * n - 4 * n + 1)
    lo = 0.5 * ((4 * n - 1) - disc)
    hi = 0.5 * ((4 * n - 1) + disc)
    return FeasibilityReport(
        max(int(math.ceil(lo)), n), hi, "2N(n-1) - (n^2-1)",
        "upper root carries +sqrt; both printed bounds share the -sqrt sign")


def count_free_parameters(n: int, size: int, rank_one: bool = False) -> int:
    """Free-variable ledger after the resolution constraint."""
    if rank_one:
        return 2 * size * (n - 1) - (n * n - 1)
    return (size - 1) * (n * n - 1)


def parseval_check(vectors, weights) -> float:
    """Max-norm defect of sum_i nu_i |x_i><x_i| = I for unit vectors x_i."""
    vecs = np.asarray(vectors, dtype=complex)
    w = np.asarray(weights, dtype=float)
    if np.max(np.abs(np.linalg.norm(vecs, axis=1) - 1.0)) > 1e-10:
        raise ValueError("frame vectors must be unit")
    n = vecs.shape[1]
    frame = np.einsum("i,ij,ik->jk", w, vecs, vecs.conj())
    return float(np.max(np.abs(frame - np.eye(n))))


def resolution_defect(rhos, measure: FiniteMeasure) -> float:
    total = sum(w * np.asarray(r, dtype=complex)
                for w, r in zip(measure.weights, rhos))
    return float(np.max(np.abs(total - np.eye(total.shape[0]))))


def gram_probabilities(rhos, measure: FiniteMeasure,
                       tol: float = 1e-10) -> ProbTable:
    """Table p_ij = tr(rho_i rho_j) of a resolving family."""
    defect = resolution_defect(rhos, measure)
    if defect > tol:
        raise ValueError(f"family does not resolve the identity "
                         f"(defect {defect:.3g})")
    size = measure.count
    n = np.asarray(rhos[0]).shape[0]
    p = np.empty((size, size))
    for i in range(size):
        for j in range(size):
            p[i, j] = float(np.trace(
                np.asarray(rhos[i]) @ np.asarray(rhos[j])).real)
    table = ProbTable(p, measure, n)
    table.validate(tol=max(tol * 100, 1e-8))
    return table


@dataclass
class ReconstructionResult:
    rhos: list
    residual: float
    resolution: float
    converged: bool
    restarts_used: int


def _params_to_rhos(x: np.ndarray, size: int, n: int, k: int):
    """Unpack optimizer variables into densities rho = B B^dag / tr(B B^dag)."""
    per = 2 * n * k
    rhos = []
    for i in range(size):
        chunk = x[i * per:(i + 1) * per]
        b = (chunk[:n * k] + 1.0j * chunk[n * k:]).reshape(n, k)
        m = b @ b.conj().T
        rhos.append(m / np.trace(m).real)
    return rhos


def reconstruct(table: ProbTable, rank_one: bool = False, seed: int = 0,
                restarts: int = 8, penalty: float = 10.0,
                max_nfev: int = 4000, tol: float = 1e-8) -> ReconstructionResult:
    """Recover densities reproducing the table, up to unitary gauge freedom.

    Penalized nonlinear least squares over the factorized parametrization
    rho_i = B_i B_i^dag / tr(B_i B_i^dag): residuals are the upper-triangle
    trace mismatches plus `penalty` times the resolution defect entries.
    Restarts are deterministic per (seed, restart index); the winner has the
    lowest residual, ties broken by resolution defect.
    """
    table.validate()
    size, n = table.measure.count, table.n
    bounds = feasibility_bounds(n, rank_one)
    if not bounds.n_min <= size <= bounds.n_max:
        raise ValueError(
            f"infeasible configuration: N={size} outside "
            f"[{bounds.n_min}, {bounds.n_max}] for n={n}"
            + (" (rank one)" if rank_one else ""))
    k = 1 if rank_one else n
    nu = table.measure.weights
    target = np.asarray(table.p, dtype=float)
    iu = np.triu_indices(size)
    eye = np.eye(n)

    def residuals(x):
        rhos = _params_to_rhos(x, size, n, k)
        p = np.array([[np.trace(rhos[i] @ rhos[j]).real for j in range(size)]
                      for i in range(size)])
        res_p = (p - target)[iu]
        total = sum(w * r for w, r in zip(nu, rhos)) - eye
        return np.concatenate([
            res_p,
            penalty * total.real[np.triu_indices(n)],
            penalty * total.imag[np.triu_indices(n, k=1)],
        ])

    rng = np.random.default_rng(seed)
    n_res = len(iu[0]) + n * (n + 1) // 2 + n * (n - 1) // 2
    method = "lm" if n_res >= size * 2 * n * k else "trf"
    best = None
    used = 0
    for attempt in range(restarts):
        x0 = rng.standard_normal(size * 2 * n * k)
        sol = least_squares(residuals, x0, method=method, max_nfev=max_nfev)
        rhos = _params_to_rhos(sol.x, size, n, k)
        table_res = float(np.sqrt(np.sum(
            (np.array([[np.trace(rhos[i] @ rhos[j]).real
                        for j in range(size)] for i in range(size)])
             - target)[iu] ** 2)))
        defect = resolution_defect(rhos, table.measure)
        used = attempt + 1
        cand = (table_res, defect, rhos)
        if best is None or cand[:2] < best[:2]:
            best = cand
        if best[0] < tol and best[1] < 100 * tol:
            break
    table_res, defect, rhos = best
    assert all(is_density(r, tol=1e-8, eig_slack=1e-7).ok for r in rhos)
    return ReconstructionResult(rhos, table_res, defect,
                                table_res < tol, used)
