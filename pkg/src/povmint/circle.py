"""Real 2x2 density matrices on the unit circle.

The family is rho_{r,phi}(theta) = (1/2)(I + r S(2(phi+theta))) with
S(F) = [[cos F, sin F], [sin F, -cos F]], carried by the measure dtheta/pi
on [0, 2pi).  Everything here is a trigonometric polynomial of degree two,
so small trapezoid rules are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DensityFamily
from .numerics import make_rule

SIGMA2 = np.array([[0.0, -1.0j], [1.0j, 0.0]])


@dataclass(frozen=True)
class CircleDensityParams:
    """Disk radius r in [0,1], orientation phi mod pi, transport angle theta."""

    r: float
    phi: float
    theta: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.r <= 1.0:
            raise ValueError(f"r must lie in [0, 1], got {self.r}")
        phi = 0.0 if self.r == 0.0 else self.phi % math.pi
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "theta", self.theta % (2.0 * math.pi))


def _spin_part(big_phi: float) -> np.ndarray:
    c, s = math.cos(big_phi), math.sin(big_phi)
    return np.array([[c, s], [s, -c]])


def rotation2(omega: float) -> np.ndarray:
    """Plane rotation matrix by angle omega."""
    c, s = math.cos(omega), math.sin(omega)
    return np.array([[c, -s], [s, c]])


def rho_circle(r: float, phi: float, theta: float = 0.0) -> np.ndarray:
    """2x2 real density (1/2)(I + r S(2(phi+theta)))."""
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"r must lie in [0, 1], got {r}")
    return 0.5 * (np.eye(2) + r * _spin_part(2.0 * (phi + theta)))


def angle_ket(angle: float) -> np.ndarray:
    """Unit vector (cos angle, sin angle); rho at r=1 is its projector."""
    return np.array([math.cos(angle), math.sin(angle)])


def from_ab(a: float, b: float) -> tuple[CircleDensityParams, float]:
    """Parameters (r, phi) and top eigenvalue lambda of M(a,b)=[[a,b],[b,1-a]]."""
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"a must lie in [0, 1], got {a}")
    delta = a * (1.0 - a) - b * b
    if delta < -1e-14:
        raise ValueError(f"det constraint violated: a(1-a) - b^2 = {delta} < 0")
    lam = 0.5 * (1.0 + math.sqrt(max(1.0 - 4.0 * delta, 0.0)))
    r = 2.0 * lam - 1.0
    phi = 0.0 if r < 1e-14 else 0.5 * math.atan2(2.0 * b, 2.0 * a - 1.0)
    return CircleDensityParams(r, phi), lam


def to_ab(params: CircleDensityParams) -> tuple[float, float]:
    """Inverse of from_ab (theta folded into the orientation)."""
    m = rho_circle(params.r, params.phi, params.theta)
    return float(m[0, 0]), float(m[0, 1])


def product_and_algebra(p1: CircleDensityParams, p2: CircleDensityParams):
    """Closed-form product, commutator and anticommutator of two densities.

    With F = 2(phi+theta) the product is
        rho rho' = (1/2)[rho + rho' + (r r'/2) Rot(F - F') - I/2],
    the commutator is -i (r r'/2) sin(F - F') sigma_2 and the anticommutator
    is rho + rho' + ((r r'/2) cos(F - F') - 1/2) I.
    """
    f1 = 2.0 * (p1.phi + p1.theta)
    f2 = 2.0 * (p2.phi + p2.theta)
    r1, r2 = p1.r, p2.r
    rho1 = rho_circle(p1.r, p1.phi, p1.theta)
    rho2 = rho_circle(p2.r, p2.phi, p2.theta)
    delta = f1 - f2
    product = 0.5 * (rho1 + rho2 + 0.5 * r1 * r2 * rotation2(delta)
                     - 0.5 * np.eye(2))
    commutator = -1.0j * (0.5 * r1 * r2) * math.sin(delta) * SIGMA2
    anticommutator = rho1 + rho2 + (0.5 * r1 * r2 * math.cos(delta) - 0.5) * np.eye(2)
    return product, commutator, anticommutator


def circle_rule(n: int = 16, offset: float = 0.5):
    """Trapezoid rule on [0, 2pi) with weight 1/pi (total measure 2).

    The default half-spacing offset keeps nodes away from the angle
    function's jump at theta = 0.
    """
    return make_rule("periodic-trapezoid", n, offset=offset, scale=1.0 / math.pi)


def circle_family(r: float, phi: float = 0.0, n: int = 16,
                  tol: float = 1e-12) -> DensityFamily:
    """The circle POVM family theta -> rho_{r,phi}(theta) with dtheta/pi."""
    return DensityFamily(
        2, lambda theta: rho_circle(r, phi, theta), circle_rule(n),
        label=f"circle(r={r}, phi={phi})", tol=tol)


def fourier_quantize(mean: float, cc: float, cs: float,
                     r: float, phi: float = 0.0) -> np.ndarray:
    """Quantized operator from doubled-angle Fourier data of f.

    mean = (1/2pi) int f dtheta, cc = (1/pi) int f cos 2theta dtheta,
    cs = (1/pi) int f sin 2theta dtheta.  The orientation phi rotates the
    coefficient pair before it enters the matrix.
    """
    c2, s2 = math.cos(2.0 * phi), math.sin(2.0 * phi)
    cc_phi = cc * c2 - cs * s2
    cs_phi = cs * c2 + cc * s2
    return mean * np.eye(2) + 0.5 * r * np.array([[cc_phi, cs_phi],
                                                  [cs_phi, -cc_phi]])


def angle_operator(r: float, phi: float = 0.0) -> np.ndarray:
    """Quantization of the angle function g(theta) = theta on [0, 2pi).

    The Fourier data (mean pi, cc 0, cs -1) is analytic; trapezoid sums
    converge only at first order across the jump, so the closed form is
    the accurate route.
    """
    return fourier_quantize(math.pi, 0.0, -1.0, r, phi)


def circle_prob(r: float, theta0: float, theta: float) -> float:
    """Probability kernel (1/2)(1 + r^2 cos 2(theta - theta0))."""
    return 0.5 * (1.0 + r * r * math.cos(2.0 * (theta - theta0)))


def circle_hs_distance(r: float, theta: float, thetap: float) -> float:
    """Hilbert-Schmidt distance sqrt(2) r |sin(theta - theta')|."""
    return math.sqrt(2.0) * r * abs(math.sin(theta - thetap))


def circle_pseudo_distance(r: float, theta: float, thetap: float) -> float:
    """Pseudo-distance sqrt(-ln[(1 + r^2 cos 2(theta-theta'))/(1 + r^2)])."""
    num = 1.0 + r * r * math.cos(2.0 * (theta - thetap))
    if num <= 0.0:
        return math.inf
    return math.sqrt(max(-math.log(num / (1.0 + r * r)), 0.0))
