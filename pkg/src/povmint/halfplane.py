"""Affine-group (half-plane) construction: Laguerre basis, UIR, admissibility.

The Hilbert space is L^2(R+, dx) with the orthonormal basis
e_n(x) = sqrt(n!/Gamma(n+alpha+1)) e^{-x/2} x^{alpha/2} L_n^{(alpha)}(x),
and the affine group Aff+(R) = {(q, p): q > 0} acts by
(U(q,p) psi)(x) = e^{ipx} psi(x/q) / sqrt(q).

Matrix elements of U(q,p) in this basis reduce to finite sums of Gamma
integrals, so the group quadrature only has to resolve the (smooth) group
variables: q through the substitution q = e^u, p through p = tan(v).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import DensityFamily, GroupOrbitSpec
from .numerics import (QuadratureRule, bessel_i, hyp2f1_terminating, laguerre,
                       make_rule)


@dataclass(frozen=True)
class AffineParams:
    """Basis parameter alpha > 0, Boltzmann factor t, basis truncation."""

    alpha: float
    t: float
    dim: int

    def __post_init__(self):
        if self.alpha <= 0.0:
            raise ValueError(f"resolution requires alpha > 0, got {self.alpha}")
        if not 0.0 <= self.t < 1.0:
            raise ValueError(f"t must lie in [0, 1), got {self.t}")

    def weights(self) -> np.ndarray:
        return (1.0 - self.t) * self.t ** np.arange(self.dim)


def basis_norm(n: int, alpha: float) -> float:
    return math.exp(0.5 * (math.lgamma(n + 1) - math.lgamma(n + alpha + 1)))


def basis_fn(n: int, alpha: float, x) -> np.ndarray:
    """Laguerre basis function e_n(x) on the half-line."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("basis functions live on x >= 0")
    return (basis_norm(n, alpha) * np.exp(-0.5 * x) * x ** (0.5 * alpha)
            * laguerre(n, alpha, x))


def gram_defect(alpha: float, dim: int, n_nodes: int | None = None) -> float:
    """Max-norm defect of the basis Gram matrix under a Gauss-Laguerre rule.

    The integrand e_n e_n' is (polynomial) * x^alpha e^{-x}, so the rule is
    exact once n_nodes > dim.
    """
    if n_nodes is None:
        n_nodes = dim + 4
    rule = make_rule("gauss-laguerre", n_nodes, alpha=alpha)
    norms = np.array([basis_norm(n, alpha) for n in range(dim)])
    polys = np.stack([laguerre(n, alpha, rule.nodes) for n in range(dim)])
    gram = norms[:, None] * norms[None, :] * np.einsum(
        "k,nk,mk->nm", rule.weights, polys, polys)
    return float(np.max(np.abs(gram - np.eye(dim))))


def inverse_moment(n: int, alpha: float) -> float:
    """int e_n(x)^2 dx / x = 1/alpha, independent of n.

    Term-by-term the Gauss-Laguerre(alpha-1) integral of the squared basis
    polynomial telescopes to Gamma(alpha)/Gamma(alpha+1) for every degree.
    """
    if alpha <= 0.0:
        raise ValueError("the inverse moment diverges for alpha <= 0")
    rule = make_rule("gauss-laguerre", n + 4, alpha=alpha - 1.0)
    vals = laguerre(n, alpha, rule.nodes)
    return basis_norm(n, alpha) ** 2 * float(rule.weights @ vals ** 2)


def affine_action(q: float, p: float, psi: Callable) -> Callable:
    """The UIR action (U(q,p) psi)(x) = e^{ipx} psi(x/q) / sqrt(q)."""
    if q <= 0.0:
        raise ValueError(f"q must be positive, got {q}")

    def out(x):
        x = np.asarray(x, dtype=float)
        return np.exp(1.0j * p * x) * np.asarray(psi(x / q)) / math.sqrt(q)

    return out


def group_product(g: tuple[float, float], g0: tuple[float, float]):
    """Affine multiplication (q, p)(q0, p0) = (q q0, p0/q + p)."""
    q, p = g
    q0, p0 = g0
    return (q * q0, p0 / q + p)


def group_inverse(g: tuple[float, float]):
    q, p = g
    return (1.0 / q, -p * q)


def _monomial_coeffs(n: int, alpha: float) -> np.ndarray:
    """Coefficients c_a of L_n^{(alpha)}(x) = sum_a c_a x^a."""
    c = np.empty(n + 1)
    for a in range(n + 1):
        c[a] = ((-1.0) ** a * math.exp(
            math.lgamma(n + alpha + 1) - math.lgamma(a + alpha + 1)
            - math.lgamma(n - a + 1) - math.lgamma(a + 1)))
    return c


def _f21_tracked(m: int, b: float, c: float, x: complex) -> tuple[complex, float]:
    """Terminating 2F1(-m, b; c; x) plus the largest term magnitude.

    The max term bounds the cancellation suffered by the alternating sum,
    so the caller can pick the better-conditioned of two representations.
    """
    term = complex(1.0)
    re, im, biggest = [1.0], [0.0], 1.0
    for k in range(m):
        term = term * (k - m) * (b + k) * x / ((c + k) * (k + 1))
        re.append(term.real)
        im.append(term.imag)
        biggest = max(biggest, abs(term))
    return complex(math.fsum(re), math.fsum(im)), biggest


def overlap_block(q: float, p: float, alpha: float, rows: int,
                  cols: int) -> np.ndarray:
    """Matrix elements M[i, n] = <e_i | U(q,p) | e_n>, evaluated analytically.

    Each element is a Laplace transform of a product of two Laguerre
    polynomials, which collapses to a terminating hypergeometric sum of
    min(i, n)+1 terms: with s = (1 + 1/q)/2 - ip and
    zeta = (1/q) / ((s-1)(s-1/q)),

        M[i, n] = sqrt(Gamma(i+a+1) Gamma(n+a+1) / (i! n! Gamma(a+1)^2))
                  q^{-a/2-1/2} (s-1)^i (s-1/q)^n s^{-(i+n+a+1)}
                  2F1(-i, -n; a+1; zeta),      a = alpha,

    with the connection-formula partner 2F1(-i, -n; -i-n-a; 1-zeta) (carrying
    Gamma(i+n+a+1)/sqrt(...) in place of the Gamma ratio above) used as a
    fallback: the two sums lose accuracy in complementary (q, p) regions, so
    each element keeps whichever route cancelled less.
    """
    if q <= 0.0:
        raise ValueError(f"q must be positive, got {q}")
    if q == 1.0 and p == 0.0:
        return np.eye(rows, cols, dtype=complex)
    s = complex(0.5 * (1.0 + 1.0 / q), -p)
    log_s = cmath.log(s)
    log_s1 = cmath.log(s - 1.0)
    log_sq = cmath.log(s - 1.0 / q)
    zeta = (1.0 / q) / ((s - 1.0) * (s - 1.0 / q))
    z = 1.0 - zeta
    lf = np.array([math.lgamma(k + 1.0) for k in range(rows + cols)])
    lg = np.array([math.lgamma(k + alpha + 1.0) for k in range(rows + cols)])
    lga1 = math.lgamma(alpha + 1.0)
    base = -math.log(q) * (0.5 * alpha + 0.5)
    out = np.empty((rows, cols), dtype=complex)
    for i in range(rows):
        for n in range(cols):
            lo, hi = (i, n) if i <= n else (n, i)
            powers = (base + i * log_s1 + n * log_sq
                      - (i + n + alpha + 1.0) * log_s)
            half = 0.5 * (lg[i] - lf[i] + lg[n] - lf[n])
            f21, big = _f21_tracked(lo, -float(hi), alpha + 1.0, zeta)
            val = f21 * cmath.exp(half - lga1 + powers)
            # predicted cancellation error = max term * route amplitude
            err_a = math.log(big) + half - lga1 + powers.real
            if big > 1e6 * max(abs(f21), 1e-300):
                f21b, bigb = _f21_tracked(lo, -float(hi), -(i + n + alpha), z)
                err_b = math.log(bigb) + lg[i + n] - half + powers.real
                if err_b < err_a:
                    val = f21b * cmath.exp(lg[i + n] - half + powers)
            out[i, n] = val
    return out


def overlap_block_monomial(q: float, p: float, alpha: float, rows: int,
                           cols: int) -> np.ndarray:
    """Cross-check route for :func:`overlap_block` via monomial expansion.

    Expanding both Laguerre polynomials in monomials reduces each element to
    sum_{a,b} c_a d_b q^{-b} Gamma(alpha+a+b+1) / (sigma - ip)^{alpha+a+b+1}
    with sigma = (1 + 1/q)/2, times q^{-alpha/2 - 1/2} and the norms.  The
    alternating double sum loses roughly max(rows, cols) bits to
    cancellation, so it is only trustworthy for indices up to ~16.
    """
    if q <= 0.0:
        raise ValueError(f"q must be positive, got {q}")
    sigma = 0.5 * (1.0 + 1.0 / q)
    log_base = complex(np.log(complex(sigma, -p)))
    nmax = max(rows, cols)
    coeffs = [_monomial_coeffs(n, alpha) for n in range(nmax)]
    norms = np.array([basis_norm(n, alpha) for n in range(nmax)])
    powers = np.arange(rows + cols - 1)
    gam = np.exp(np.array([math.lgamma(alpha + k + 1) for k in powers])
                 - (alpha + powers + 1) * log_base)
    # G[a, b] = Gamma(alpha+a+b+1) (sigma - ip)^{-(alpha+a+b+1)}
    g = gam[np.add.outer(np.arange(rows), np.arange(cols))]
    cr = np.zeros((rows, rows))
    for i in range(rows):
        cr[i, : i + 1] = coeffs[i]
    cc = np.zeros((cols, cols))
    qb = q ** (-np.arange(cols, dtype=float))
    for n in range(cols):
        cc[n, : n + 1] = coeffs[n]
    pref = q ** (-0.5 * alpha - 0.5)
    return (pref * norms[:rows, None] * norms[None, :cols]
            * np.einsum("ia,ab,nb,b->in", cr, g, cc, qb))


def affine_group_rule(n_u: int = 64, u_max: float = 14.0,
                      n_v: int = 64) -> QuadratureRule:
    """Rule for dq dp on the half-plane; nodes are (q, p) pairs.

    q = e^u with Gauss-Legendre in u over [-u_max, u_max]; p = tan(v) with
    Gauss-Legendre in v over (-pi/2, pi/2).  Weights carry the Jacobians.
    """
    ru = make_rule("gauss-legendre", n_u, a=-u_max, b=u_max)
    rv = make_rule("gauss-legendre", n_v, a=-0.5 * math.pi, b=0.5 * math.pi)
    qs = np.exp(ru.nodes)
    ps = np.tan(rv.nodes)
    wq = ru.weights * qs
    wp = rv.weights / np.cos(rv.nodes) ** 2
    nodes = np.column_stack([np.repeat(qs, n_v), np.tile(ps, n_u)])
    weights = np.repeat(wq, n_v) * np.tile(wp, n_u)
    return QuadratureRule(nodes, weights, "affine-exp-tan",
                          {"n_u": n_u, "u_max": u_max, "n_v": n_v})


def affine_orbit_spec(params: AffineParams,
                      rule: QuadratureRule | None = None) -> GroupOrbitSpec:
    """Group-orbit description of the thermal family for the core engine.

    The returned unitary map is the truncated overlap block, exactly unitary
    only in the infinite-basis limit; admissibility sums need only its first
    row, which is exact.
    """
    if rule is None:
        rule = affine_group_rule()
    dim, alpha = params.dim, params.alpha
    fiducial = np.diag(params.weights()).astype(complex)
    probe = np.zeros((dim, dim), dtype=complex)
    probe[0, 0] = 1.0

    def unitary(node):
        return overlap_block(float(node[0]), float(node[1]), alpha, dim, dim)

    def translate(g0, g):
        return group_product(group_inverse(tuple(g0)), tuple(g))

    return GroupOrbitSpec(unitary, fiducial, rule, probe, translate)


def c_rho_quadrature(params: AffineParams,
                     rule: QuadratureRule | None = None) -> float:
    """Admissibility constant by direct group quadrature.

    Only the first overlap row enters, so this is exact in the basis
    truncation up to the thermal tail t^dim.
    """
    if rule is None:
        rule = affine_group_rule()
    w = params.weights()
    vals = np.empty(rule.size)
    for k, (q, p) in enumerate(rule.nodes):
        row = overlap_block(float(q), float(p), params.alpha, 1, params.dim)[0]
        vals[k] = float(w @ (np.abs(row) ** 2))
    return float(rule.integrate(vals))


def c_rho_derived(alpha: float) -> float:
    """2 pi / alpha: each basis state has the same admissibility integral."""
    return 2.0 * math.pi / alpha


def c_rho_printed(alpha: float, t: float) -> float:
    """The published closed form 2 pi (1-t) / alpha, kept for comparison.

    It coincides with the derived constant only at t = 0: the thermal
    weights (1-t) t^n multiply identical per-state integrals 2 pi / alpha,
    so their sum carries no (1-t) factor.
    """
    return 2.0 * math.pi * (1.0 - t) / alpha


def thermal_kernel(x: float, y: float, params: AffineParams,
                   printed: bool = False) -> float:
    """Integral kernel of rho_T on L^2(R+).

    Corrected form (from the Hille-Hardy bilinear sum):
        K_T(x,y) = t^{-alpha/2} e^{-(1+t)(x+y)/(2(1-t))}
                   I_alpha(2 sqrt(t x y)/(1-t)).
    The printed variant keeps a (1-t) prefactor and the exponent
    -t(x+y)/(2(1-t)); it fails the trace and eigenfunction checks.
    """
    t, alpha = params.t, params.alpha
    if not 0.0 < t < 1.0:
        raise ValueError("thermal kernel needs t in (0, 1)")
    if x < 0 or y < 0:
        raise ValueError("kernel arguments must be nonnegative")
    arg = 2.0 * math.sqrt(t * x * y) / (1.0 - t)
    if printed:
        return ((1.0 - t) * t ** (-0.5 * alpha)
                * math.exp(-0.5 * t * (x + y) / (1.0 - t)) * bessel_i(alpha, arg))
    return (t ** (-0.5 * alpha)
            * math.exp(-0.5 * (1.0 + t) * (x + y) / (1.0 - t))
            * bessel_i(alpha, arg))


def kernel_trace(params: AffineParams, n_nodes: int = 200,
                 x_max: float = 160.0, printed: bool = False) -> float:
    """Quadrature of int K_T(x, x) dx; equals tr rho_T = 1 for the
    corrected kernel."""
    rule = make_rule("gauss-legendre", n_nodes, a=0.0, b=x_max)
    vals = np.array([thermal_kernel(float(x), float(x), params, printed)
                     for x in rule.nodes])
    return float(rule.integrate(vals))


def kernel_eigen_ratio(n: int, params: AffineParams, x: float,
                       n_nodes: int = 200, y_max: float = 160.0,
                       printed: bool = False) -> float:
    """(int K_T(x, y) e_n(y) dy) / e_n(x); equals (1-t) t^n for the
    corrected kernel."""
    rule = make_rule("gauss-legendre", n_nodes, a=0.0, b=y_max)
    vals = np.array([thermal_kernel(x, float(y), params, printed)
                     * basis_fn(n, params.alpha, float(y))
                     for y in rule.nodes])
    return float(rule.integrate(vals)) / basis_fn(n, params.alpha, x)


def affine_family(params: AffineParams, rule: QuadratureRule | None = None,
                  c_rho: float | None = None, tol: float = 1e-3) -> DensityFamily:
    """The thermal orbit family rho_T(q,p) with measure dq dp / c_rho."""
    spec = affine_orbit_spec(params, rule)
    if c_rho is None:
        c_rho = c_rho_quadrature(params, spec.group_rule)
    norm_rule = QuadratureRule(spec.group_rule.nodes,
                               spec.group_rule.weights / c_rho,
                               spec.group_rule.kind + "/c_rho", {})
    return DensityFamily(params.dim, spec.orbit_density, norm_rule,
                         label=f"halfplane(alpha={params.alpha}, t={params.t})",
                         tol=tol)


def affine_resolution_check(params: AffineParams, block: int = 4,
                            rule: QuadratureRule | None = None,
                            c_rho: float | None = None) -> np.ndarray:
    """Leading block of int rho_T(q,p) dq dp / c_rho; should be the identity.

    Each element is a double group integral; only the first `block` overlap
    rows are computed per node.
    """
    if rule is None:
        rule = affine_group_rule()
    if c_rho is None:
        c_rho = c_rho_quadrature(params, rule)
    w = params.weights()
    acc = np.zeros((block, block), dtype=complex)
    for (q, p), wk in zip(rule.nodes, rule.weights):
        m = overlap_block(float(q), float(p), params.alpha, block, params.dim)
        acc += wk * ((m * w) @ m.conj().T)
    return acc / c_rho
