"""Weyl-Heisenberg quantization on a truncated Fock space.

Displaced thermal states rho_T(z) = D(z) rho_T D(z)^dag over the complex
plane with measure d^2 z / pi = dJ dgamma / (2 pi) in action-angle
coordinates z = sqrt(J) e^{i gamma}.  Displacement matrix elements are
analytic (associated Laguerre polynomials), so the truncated density is
exact entrywise up to the thermal tail t^dim.

The default radial rule converts Gauss-Laguerre nodes to plain-dJ weights;
since every matrix element of rho_T(sqrt(J)) is (polynomial) * e^{-J} (times
sqrt(J) for odd-parity entries), these rules integrate the resolution of
identity and polynomial symbols essentially exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DensityFamily
from .numerics import (PoleError, QuadratureRule, bessel_i, hyp2f1_terminating,
                       laguerre, make_rule, product_rule)


@dataclass(frozen=True)
class ThermalParams:
    """Boltzmann factor t = exp(-hbar omega / k_B T) and Fock truncation."""

    t: float
    dim: int

    def __post_init__(self):
        if not 0.0 <= self.t < 1.0:
            raise ValueError(f"t must lie in [0, 1), got {self.t}")
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")

    @property
    def truncation_deficit(self) -> float:
        """Thermal mass beyond the truncation: t^dim."""
        return self.t ** self.dim

    @property
    def s(self) -> float:
        """s = -coth(hbar omega / 2 k_B T) = -(1+t)/(1-t)."""
        return -(1.0 + self.t) / (1.0 - self.t)

    def weights(self) -> np.ndarray:
        return (1.0 - self.t) * self.t ** np.arange(self.dim)


def fock_ladder(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Lowering and raising matrices a, a^dag with a|e_n> = sqrt(n)|e_{n-1}>."""
    a = np.diag(np.sqrt(np.arange(1, dim)), k=1).astype(complex)
    return a, a.conj().T


def displacement(z: complex, dim: int) -> np.ndarray:
    """Truncated displacement operator D(z) with analytic matrix elements.

    D_mn(z) = sqrt(n!/m!) z^{m-n} e^{-|z|^2/2} L_n^{(m-n)}(|z|^2) for m >= n,
    and D_mn(z) = conj(D_nm(-z)) below the diagonal.
    """
    z = complex(z)
    x = abs(z) ** 2
    d = np.zeros((dim, dim), dtype=complex)
    # log-factorial ratios keep sqrt(n!/m!) finite at large dim
    lf = np.concatenate([[0.0], np.cumsum(np.log(np.arange(1, dim)))])
    gauss = math.exp(-0.5 * x)
    for m in range(dim):
        for n in range(m + 1):
            amp = math.exp(0.5 * (lf[n] - lf[m])) * gauss * laguerre(n, m - n, x)
            d[m, n] = amp * z ** (m - n)
            if m != n:
                d[n, m] = amp * (-z.conjugate()) ** (m - n)
    return d


def _displacement_scaled_real(sqrt_j_squared: float, dim: int) -> np.ndarray:
    """D(sqrt(J)) without its e^{-J/2} factor, for real displacements.

    Entry (m, n), m >= n: sqrt(n!/m!) J^{(m-n)/2} L_n^{(m-n)}(J); the
    matrix is symmetric up to the (-1)^{m-n} sign below the diagonal.
    """
    x = sqrt_j_squared
    d = np.zeros((dim, dim))
    lf = np.concatenate([[0.0], np.cumsum(np.log(np.arange(1, dim)))])
    for m in range(dim):
        for n in range(m + 1):
            amp = math.exp(0.5 * (lf[n] - lf[m]) + 0.5 * (m - n) * math.log(x)
                           if x > 0 else 0.5 * (lf[n] - lf[m]))
            if x == 0 and m != n:
                amp = 0.0
            val = amp * laguerre(n, m - n, x)
            d[m, n] = val
            d[n, m] = val * (-1.0) ** (m - n)
    return d


def thermal_density(params: ThermalParams) -> np.ndarray:
    """Diagonal thermal state (1-t) diag(1, t, t^2, ...)."""
    return np.diag(params.weights()).astype(complex)


def displaced_thermal(z: complex, params: ThermalParams,
                      strict: bool = True) -> np.ndarray:
    """Displaced thermal density D(z) rho_T D(z)^dag.

    With strict=True the displacement is rejected once |z|^2 >= dim/4, where
    truncation visibly corrupts the state; internal quadrature paths relax
    the guard because their weights suppress the corrupted region.
    """
    z = complex(z)
    if strict and abs(z) ** 2 >= params.dim / 4.0:
        raise ValueError(
            f"|z|^2 = {abs(z) ** 2:.3g} exceeds the dim/4 truncation threshold")
    d = displacement(z, params.dim)
    return (d * params.weights()) @ d.conj().T


def rho_scaled_real(j: float, params: ThermalParams) -> np.ndarray:
    """rho_T(sqrt(J)) * e^J: every entry is a polynomial in J (times sqrt(J)
    for odd-parity entries), which makes Gauss-Laguerre radial rules exact."""
    d = _displacement_scaled_real(j, params.dim)
    return (d * params.weights()) @ d.T


def purity_closed(t: float) -> float:
    """tr rho_T(z)^2 = (1-t)/(1+t), independent of z."""
    return (1.0 - t) / (1.0 + t)


# ---------------------------------------------------------------------------
# Probability kernel: matrix route, series route, and the Bessel compact form.


def plane_prob_matrix(z0: complex, z: complex, params: ThermalParams) -> float:
    """tr(rho_T(z0) rho_T(z)) on the truncated space."""
    r0 = displaced_thermal(z0, params)
    r1 = displaced_thermal(z, params)
    return float(np.trace(r0 @ r1).real)


def plane_prob_series(z0: complex, z: complex, t: float, n_max: int = 40,
                      printed: bool = False) -> float:
    """Double Laguerre series for the probability kernel.

    The cross-term weight is n!/n'! (the ratio printed as n/n' is a typo:
    it must reproduce |D_{n'n}|^2, whose prefactor is factorial).  Pass
    printed=True to evaluate the typo variant for comparison.
    """
    x = abs(complex(z) - complex(z0)) ** 2
    total = sum(t ** (2 * n) * laguerre(n, 0, x) ** 2 for n in range(n_max + 1))
    lf = np.concatenate([[0.0], np.cumsum(np.log(np.arange(1, n_max + 1)))])
    for n in range(n_max + 1):
        for np_ in range(n + 1, n_max + 1):
            ratio = n / np_ if printed else math.exp(lf[n] - lf[np_])
            total += (2.0 * t ** (n + np_) * ratio * x ** (np_ - n)
                      * laguerre(n, np_ - n, x) ** 2)
    return (1.0 - t) ** 2 * math.exp(-x) * total


def laguerre_square_sum(t: float, x: float, n_max: int = 200) -> float:
    """Partial sum sum_n t^{2n} (L_n(x))^2 (the diagonal part of the kernel)."""
    return math.fsum(t ** (2 * n) * laguerre(n, 0, x) ** 2
                     for n in range(n_max + 1))


def laguerre_square_closed(t: float, x: float, printed: bool = False) -> float:
    """Closed form of sum_n t^{2n} L_n(x)^2 via a modified Bessel function.

    The exponent is -2 x t^2/(1-t^2); the printed variant -x t^2/(1-t^2)
    (missing the factor 2) is kept for comparison.
    """
    u = t * t / (1.0 - t * t)
    expo = -x * u if printed else -2.0 * x * u
    return math.exp(expo) / (1.0 - t * t) * bessel_i(0, 2.0 * t * x / (1.0 - t * t))


def plane_hs_closed(t: float, prob: float, printed: bool = False) -> float:
    """Hilbert-Schmidt distance from the kernel value: sqrt(2((1-t)/(1+t) - p)).

    The printed variant squares the purity term; the definition
    tr((rho - rho')^2) = 2(tr rho_T^2 - p) has it unsquared.
    """
    pur = purity_closed(t)
    gap = (pur * pur if printed else pur) - prob
    return math.sqrt(2.0 * max(gap, 0.0))


# ---------------------------------------------------------------------------
# Quadrature over the plane and the POVM family.


def plane_rule(dim: int, n_j: int | None = None, n_gamma: int | None = None,
               j_max: float | None = None) -> QuadratureRule:
    """Product rule for dJ dgamma / (2 pi); nodes are (J, gamma) pairs.

    By default the radial factor converts Gauss-Laguerre nodes/weights to a
    plain-dJ rule on [0, inf), exact for the (polynomial)*e^{-J} radial
    profiles of the thermal family.  Passing j_max switches to a
    Gauss-Legendre rule on [0, j_max] for truncation-convergence studies.
    """
    if n_j is None:
        n_j = dim + 16
    if n_gamma is None:
        n_gamma = max(2 * dim + 32, 64)
    if j_max is None:
        base = make_rule("gauss-laguerre", n_j)
        # convert weights to plain dJ in log space: w * e^J overflows at the
        # outermost nodes even though the product is moderate
        radial = QuadratureRule(base.nodes,
                                np.exp(np.log(base.weights) + base.nodes),
                                "gauss-laguerre-dJ", {})
    else:
        radial = make_rule("gauss-legendre", n_j, a=0.0, b=float(j_max))
    angular = make_rule("periodic-trapezoid", n_gamma,
                        scale=1.0 / (2.0 * math.pi))
    return product_rule(radial, angular)


def plane_family(params: ThermalParams, rule: QuadratureRule | None = None,
                 tol: float = 1e-6) -> DensityFamily:
    """The displaced-thermal POVM family on (J, gamma) nodes.

    Radial matrices are cached per J; angles enter only as diagonal phases
    (rotation covariance of the displacement operator).
    """
    if rule is None:
        rule = plane_rule(params.dim)
    cache: dict[float, np.ndarray] = {}
    modes = np.arange(params.dim)

    def evaluate(node):
        j, gamma = float(node[0]), float(node[1])
        base = cache.get(j)
        if base is None:
            base = displaced_thermal(math.sqrt(j), params, strict=False)
            cache[j] = base
        phases = np.exp(1.0j * modes * gamma)
        return phases[:, None] * base * phases.conj()[None, :]

    return DensityFamily(params.dim, evaluate, rule,
                         label=f"plane(t={params.t}, dim={params.dim})", tol=tol)


# ---------------------------------------------------------------------------
# Closed-form quantized operators.


def q_matrix(dim: int) -> np.ndarray:
    a, adag = fock_ladder(dim)
    return (a + adag) / math.sqrt(2.0)


def p_matrix(dim: int) -> np.ndarray:
    a, adag = fock_ladder(dim)
    return (a - adag) / (1.0j * math.sqrt(2.0))


def quadratic_shift(params: ThermalParams) -> float:
    """A_{q^2} - Q^2 = -s/2 with s = -(1+t)/(1-t)."""
    return -params.s / 2.0


def oscillator_expected(params: ThermalParams) -> np.ndarray:
    """A_{|z|^2} = a^dag a + (1-s)/2."""
    a, adag = fock_ladder(params.dim)
    return adag @ a + (1.0 - params.s) / 2.0 * np.eye(params.dim)


def energy_gap() -> float:
    """E_0 - E_m = (1-s)/2 - (-s/2) = 1/2, independent of temperature."""
    return 0.5


def torus_unitary(theta: float, dim: int, nu: float = 0.0) -> np.ndarray:
    """Diagonal torus representation e^{i(n+nu) theta}."""
    return np.diag(np.exp(1.0j * (np.arange(dim) + nu) * theta))


def parity_op(dim: int) -> np.ndarray:
    return np.diag((-1.0) ** np.arange(dim)).astype(complex)


# ---------------------------------------------------------------------------
# Phase operator.


def _radial_integrals(params: ThermalParams, n_j: int | None = None) -> np.ndarray:
    """R[m, m'] = int_0^inf [rho_T(sqrt(J))]_{mm'} dJ, exactly per parity.

    Even-parity entries are polynomial * e^{-J} (Gauss-Laguerre alpha=0
    exact); odd-parity entries carry an extra sqrt(J) (alpha=1/2 exact).
    """
    if n_j is None:
        n_j = params.dim + 8
    rule0 = make_rule("gauss-laguerre", n_j)
    rule_h = make_rule("gauss-laguerre", n_j, alpha=0.5)
    acc0 = np.zeros((params.dim, params.dim))
    acc_h = np.zeros((params.dim, params.dim))
    for x, w in zip(rule0.nodes, rule0.weights):
        acc0 += w * rho_scaled_real(float(x), params)
    for x, w in zip(rule_h.nodes, rule_h.weights):
        acc_h += w * rho_scaled_real(float(x), params) / math.sqrt(float(x))
    parity = (np.add.outer(np.arange(params.dim), np.arange(params.dim)) % 2)
    return np.where(parity == 0, acc0, acc_h)


def phase_operator(params: ThermalParams, n_j: int | None = None) -> np.ndarray:
    """Quantized angle via exact angular integrals (the quadrature route).

    int_0^{2pi} gamma e^{i k gamma} dgamma equals 2 pi^2 at k=0 and
    -2 pi i / k otherwise, so A_g = pi diag(R_mm) + i R_mm' / (m'-m).
    """
    r = _radial_integrals(params, n_j)
    dim = params.dim
    out = (math.pi * np.diag(np.diag(r))).astype(complex)
    for m in range(dim):
        for mp in range(dim):
            if m != mp:
                out[m, mp] = 1.0j * r[m, mp] / (mp - m)
    return out


def phase_operator_printed(params: ThermalParams) -> np.ndarray:
    """The published matrix route, evaluated verbatim.

    F_mm'(t) = (1-t) Gamma((m+m')/2 + 1) / sqrt(m m') * (1-t)^{(m'-m)/2}
               * 2F1(-m, (m'-m)/2; -(m+m')/2; t).
    The sqrt(m m') denominator diverges at index 0, so rows/columns at
    m = 0 are left as NaN; hypergeometric pole cases are NaN as well.
    The quadrature route is the normative one.
    """
    t, dim = params.t, params.dim
    out = (math.pi * np.eye(dim)).astype(complex)
    for m in range(dim):
        for mp in range(dim):
            if m == mp:
                continue
            if m == 0 or mp == 0:
                out[m, mp] = complex(math.nan, math.nan)
                continue
            try:
                f21 = hyp2f1_terminating(m, (mp - m) / 2.0, -(m + mp) / 2.0, t)
            except PoleError:
                out[m, mp] = complex(math.nan, math.nan)
                continue
            f = ((1.0 - t) * math.gamma((m + mp) / 2.0 + 1.0)
                 / math.sqrt(m * mp) * (1.0 - t) ** ((mp - m) / 2.0) * f21)
            out[m, mp] = 1.0j * f / (mp - m)
    return out


def phase_covariance_defect(params: ThermalParams, theta0: float,
                            n_j: int | None = None) -> float:
    """Defect of U_T(theta0) A_g U_T(-theta0) = A_{g(. - theta0 mod 2pi)}.

    The translated angle function has the same analytic angular integrals
    up to the phase e^{i(m-m') theta0}, evaluated here independently.
    """
    r = _radial_integrals(params, n_j)
    dim = params.dim
    a = phase_operator(params, n_j)
    u = torus_unitary(theta0, dim)
    lhs = u @ a @ u.conj().T
    # translated symbol: int (gamma - theta0 mod 2pi) e^{ik gamma} dgamma
    #   = 2 pi^2 (k=0) or -2 pi i e^{i k theta0} / k
    rhs = (math.pi * np.diag(np.diag(r))).astype(complex)
    for m in range(dim):
        for mp in range(dim):
            if m != mp:
                rhs[m, mp] = (1.0j * r[m, mp] / (mp - m)
                              * np.exp(1.0j * (m - mp) * theta0))
    return float(np.max(np.abs(lhs - rhs)))


# ---------------------------------------------------------------------------
# Covariance suite.


def covariance_defects(params: ThermalParams, z0: complex = 0.5,
                       theta: float = 0.7,
                       rule: QuadratureRule | None = None,
                       block: int | None = None) -> dict[str, float]:
    """Defects of the four covariance identities on test functions.

    Translation and rotation use a displaced Gaussian bump, parity an even
    pairing of the same bump, conjugation a complex mixture.  Defects are
    max-norm on the protected block (top-left dim/2 square by default).
    """
    from .core import quantize

    fam = plane_family(params, rule)
    dim = params.dim
    if block is None:
        block = dim // 2

    def z_of(node):
        return math.sqrt(float(node[0])) * np.exp(1.0j * float(node[1]))

    center = 0.3 + 0.2j

    def bump(z):
        return math.exp(-abs(z - center) ** 2)

    def sub(m):
        return m[:block, :block]

    out: dict[str, float] = {}

    a_f = quantize(fam, lambda nd: bump(z_of(nd)))

    d0 = displacement(complex(z0), dim)
    lhs = d0 @ a_f @ d0.conj().T
    rhs = quantize(fam, lambda nd: bump(z_of(nd) - z0))
    out["translation"] = float(np.max(np.abs(sub(lhs - rhs))))

    u = torus_unitary(theta, dim)
    lhs = u @ a_f @ u.conj().T
    rhs = quantize(fam, lambda nd: bump(np.exp(-1.0j * theta) * z_of(nd)))
    out["rotation"] = float(np.max(np.abs(sub(lhs - rhs))))

    p = parity_op(dim)
    lhs = p @ a_f @ p
    rhs = quantize(fam, lambda nd: bump(-z_of(nd)))
    out["parity"] = float(np.max(np.abs(sub(lhs - rhs))))

    def cf(z):
        return z ** 2 + 1.0j * math.exp(-abs(z) ** 2)

    a_c = quantize(fam, lambda nd: cf(z_of(nd)))
    rhs = quantize(fam, lambda nd: np.conj(cf(z_of(nd))))
    out["conjugation"] = float(np.max(np.abs(sub(a_c.conj().T - rhs))))
    return out
