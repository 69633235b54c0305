"""Sphere POVM from spin-1/2 transport: quaternions, SU(2), closed forms.

The family rho_r(theta, phi) is the SU(2) transport of diag((1+r)/2, (1-r)/2)
to the direction (theta, phi), carried by the measure sin(theta) dtheta dphi
/ (2 pi) on the 2-sphere (total measure 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DensityFamily
from .numerics import QuadratureRule, make_rule, product_rule

SIGMA = [
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1.0j], [1.0j, 0.0]]),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
]


@dataclass(frozen=True)
class Quaternion:
    """Real quaternion (scalar, 3-vector) with the Hamilton product."""

    q0: float
    qv: tuple[float, float, float]

    def __mul__(self, other: "Quaternion") -> "Quaternion":
        a0, av = self.q0, np.asarray(self.qv)
        b0, bv = other.q0, np.asarray(other.qv)
        s = a0 * b0 - float(av @ bv)
        v = a0 * bv + b0 * av + np.cross(av, bv)
        return Quaternion(s, tuple(v))

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.q0, tuple(-c for c in self.qv))

    def norm(self) -> float:
        return math.sqrt(self.q0 ** 2 + sum(c * c for c in self.qv))

    def inverse(self) -> "Quaternion":
        n2 = self.q0 ** 2 + sum(c * c for c in self.qv)
        if n2 == 0.0:
            raise ZeroDivisionError("zero quaternion has no inverse")
        c = self.conjugate()
        return Quaternion(c.q0 / n2, tuple(v / n2 for v in c.qv))

    def to_matrix(self) -> np.ndarray:
        """2x2 image under e_a -> (-1)^(a+1) i sigma_a."""
        m = self.q0 * np.eye(2, dtype=complex)
        for a, (sign, comp) in enumerate(zip((1.0, -1.0, 1.0), self.qv)):
            m = m + comp * sign * 1.0j * SIGMA[a]
        return m


QUAT_ONE = Quaternion(1.0, (0.0, 0.0, 0.0))
QUAT_E = [Quaternion(0.0, tuple(np.eye(3)[a])) for a in range(3)]


def rotate_vector_rodrigues(omega: float, n_hat, v) -> np.ndarray:
    """Rotate v about unit axis n_hat by omega via the Rodrigues formula."""
    n = np.asarray(n_hat, dtype=float)
    if abs(np.linalg.norm(n) - 1.0) > 1e-12:
        raise ValueError("axis must be a unit vector")
    v = np.asarray(v, dtype=float)
    return (math.cos(omega) * v + math.sin(omega) * np.cross(n, v)
            + (1.0 - math.cos(omega)) * float(n @ v) * n)


def rotate_vector_quaternion(omega: float, n_hat, v) -> np.ndarray:
    """Same rotation through conjugation (0, v') = xi (0, v) xi_bar."""
    n = np.asarray(n_hat, dtype=float)
    if abs(np.linalg.norm(n) - 1.0) > 1e-12:
        raise ValueError("axis must be a unit vector")
    xi = Quaternion(math.cos(0.5 * omega), tuple(math.sin(0.5 * omega) * n))
    out = xi * Quaternion(0.0, tuple(np.asarray(v, dtype=float))) * xi.conjugate()
    return np.asarray(out.qv)


def xi_north(theta: float, phi: float) -> Quaternion:
    """Unit quaternion rotating the north pole k to direction (theta, phi).

    The rotation axis is u_phi = (-sin phi, cos phi, 0), the angle theta.
    """
    axis = (-math.sin(phi), math.cos(phi), 0.0)
    return Quaternion(math.cos(0.5 * theta),
                      tuple(math.sin(0.5 * theta) * c for c in axis))


def direction(theta: float, phi: float) -> np.ndarray:
    """Unit vector with spherical coordinates (theta, phi)."""
    return np.array([math.sin(theta) * math.cos(phi),
                     math.sin(theta) * math.sin(phi),
                     math.cos(theta)])


def rho_sphere(r: float, theta: float, phi: float) -> np.ndarray:
    """Closed-form sphere density, 2x2 complex."""
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"r must lie in [0, 1], got {r}")
    ct, st = math.cos(theta), math.sin(theta)
    e = complex(math.cos(phi), math.sin(phi))
    return 0.5 * np.array([[1.0 + r * ct, r * st * e],
                           [r * st * e.conjugate(), 1.0 - r * ct]])


def rho_sphere_transport(r: float, theta: float, phi: float) -> np.ndarray:
    """Same density via SU(2) transport of the polar diagonal matrix."""
    xi = xi_north(theta, phi).to_matrix()
    polar = np.diag([(1.0 + r) / 2.0, (1.0 - r) / 2.0]).astype(complex)
    return xi @ polar @ xi.conj().T


def spin_state(theta: float, phi: float) -> np.ndarray:
    """Spin-1/2 coherent state (cos(theta/2), sin(theta/2) e^{-i phi})."""
    return np.array([math.cos(0.5 * theta),
                     math.sin(0.5 * theta) * complex(math.cos(phi), -math.sin(phi))])


def sphere_rule(n_theta: int = 8, n_phi: int = 8) -> QuadratureRule:
    """Product rule for sin(theta) dtheta dphi / (2 pi): Gauss-Legendre in
    cos(theta) times a trapezoid in phi.  Nodes are (u, phi) pairs, u = cos theta."""
    ru = make_rule("gauss-legendre", n_theta, a=-1.0, b=1.0)
    rphi = make_rule("periodic-trapezoid", n_phi, offset=0.5,
                     scale=1.0 / (2.0 * math.pi))
    return product_rule(ru, rphi)


def sphere_family(r: float, n_theta: int = 8, n_phi: int = 8,
                  tol: float = 1e-12) -> DensityFamily:
    """The sphere POVM family; nodes are (cos theta, phi) pairs."""

    def evaluate(node):
        u, phi = node
        return rho_sphere(r, math.acos(float(np.clip(u, -1.0, 1.0))), phi)

    return DensityFamily(2, evaluate, sphere_rule(n_theta, n_phi),
                         label=f"sphere(r={r})", tol=tol)


def quantize_azimuth(r: float, n_u: int = 16) -> np.ndarray:
    """Quantized azimuthal angle with the angular integral done analytically.

    The sawtooth phi aliases any equispaced angular rule at first order, so
    the phi moments int phi e^{ik phi} dphi (= 2 pi^2 at k=0, -2 pi i / k
    else) are inserted exactly; the residual u-integrals are handled by
    Gauss-Legendre (diagonal, polynomial) and Gauss-Chebyshev of the second
    kind (off-diagonal, weight sqrt(1-u^2)).
    """
    gl = make_rule("gauss-legendre", n_u, a=-1.0, b=1.0)
    diag_plus = float(gl.integrate(0.5 * (1.0 + r * gl.nodes)))
    diag_minus = float(gl.integrate(0.5 * (1.0 - r * gl.nodes)))
    j = np.arange(1, n_u + 1)
    cheb_w = math.pi / (n_u + 1) * np.sin(j * math.pi / (n_u + 1)) ** 2
    i_u = float(cheb_w.sum())  # int sqrt(1-u^2) du, Gauss-Chebyshev II
    off = (1.0 / (2.0 * math.pi)) * (-2.0j * math.pi) * (0.5 * r) * i_u
    return np.array([[math.pi * diag_plus, off],
                     [off.conjugate(), math.pi * diag_minus]])


def aq_matrix(r: float) -> np.ndarray:
    """Quantized azimuthal angle: pi I + (pi r / 4) sigma_2."""
    return math.pi * np.eye(2, dtype=complex) + (math.pi * r / 4.0) * SIGMA[1]


def ap_matrix(r: float) -> np.ndarray:
    """Quantized p = cos theta: (r/3) sigma_3."""
    return (r / 3.0) * SIGMA[2]


def sphere_prob(r: float, dir0, dir1) -> float:
    """Probability kernel (1/2)(1 + r^2 n0.n1) for unit directions n0, n1."""
    return 0.5 * (1.0 + r * r * float(np.asarray(dir0) @ np.asarray(dir1)))


def sphere_hs_distance(r: float, dir0, dir1) -> float:
    """Hilbert-Schmidt distance ||r n0 - r n1|| / sqrt(2)."""
    d = r * (np.asarray(dir0, dtype=float) - np.asarray(dir1, dtype=float))
    return float(np.linalg.norm(d)) / math.sqrt(2.0)


def sphere_pseudo_distance(r: float, dir0, dir1) -> float:
    """Pseudo-distance sqrt(-ln[(1 + r^2 n0.n1)/(1 + r^2)])."""
    num = 1.0 + r * r * float(np.asarray(dir0) @ np.asarray(dir1))
    if num <= 0.0:
        return math.inf
    return math.sqrt(max(-math.log(num / (1.0 + r * r)), 0.0))
