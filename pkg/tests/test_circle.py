"""Circle geometry: closed forms, the 2x2 algebra, marginal integrals."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from povmint import circle, core, operators
from povmint.numerics import make_rule

RNG = np.random.default_rng(12345)


def random_params():
    return circle.CircleDensityParams(RNG.uniform(0.0, 1.0),
                                      RNG.uniform(0.0, 2.0 * math.pi),
                                      RNG.uniform(0.0, 2.0 * math.pi))


class TestParams:
    def test_phi_canonicalized_mod_pi(self):
        p = circle.CircleDensityParams(0.5, math.pi + 0.2)
        assert_allclose(p.phi, 0.2, atol=1e-14)

    def test_r_zero_forces_phi_zero(self):
        assert circle.CircleDensityParams(0.0, 1.3).phi == 0.0

    def test_rejects_bad_r(self):
        with pytest.raises(ValueError):
            circle.CircleDensityParams(1.5, 0.0)


class TestDensity:
    def test_is_density(self):
        for _ in range(25):
            p = random_params()
            assert operators.is_density(circle.rho_circle(p.r, p.phi,
                                                          p.theta)).ok

    def test_purity(self):
        # tr rho^2 = (1 + r^2) / 2
        for r in (0.0, 0.4, 1.0):
            rho = circle.rho_circle(r, 0.7)
            assert_allclose(operators.purity(rho), 0.5 * (1 + r * r),
                            rtol=1e-14)

    def test_pure_case_is_angle_projector(self):
        phi = 0.8
        rho = circle.rho_circle(1.0, phi)
        ket = circle.angle_ket(phi)
        assert_allclose(rho, np.outer(ket, ket), atol=1e-14)

    def test_ab_round_trip(self):
        for _ in range(25):
            p = random_params()
            a, b = circle.to_ab(p)
            q, lam = circle.from_ab(a, b)
            assert_allclose(circle.rho_circle(q.r, q.phi),
                            circle.rho_circle(p.r, p.phi, p.theta), atol=1e-12)
            assert_allclose(lam, 0.5 * (1 + p.r), rtol=1e-12)

    def test_from_ab_rejects_indefinite(self):
        with pytest.raises(ValueError):
            circle.from_ab(0.5, 0.9)


class TestAlgebra:
    def test_product_commutator_anticommutator(self):
        for _ in range(100):
            p1, p2 = random_params(), random_params()
            m1 = circle.rho_circle(p1.r, p1.phi, p1.theta)
            m2 = circle.rho_circle(p2.r, p2.phi, p2.theta)
            prod, comm, anti = circle.product_and_algebra(p1, p2)
            assert_allclose(m1 @ m2, prod, atol=1e-13)
            assert_allclose(m1 @ m2 - m2 @ m1, comm, atol=1e-13)
            assert_allclose(m1 @ m2 + m2 @ m1, anti, atol=1e-13)

    @pytest.mark.xfail(strict=True, reason="published commutator closed form "
                       "omits the factor 1/2 in r r'/2 sin; see the decisions "
                       "ledger")
    def test_published_commutator_variant(self):
        p1 = circle.CircleDensityParams(0.8, 0.3)
        p2 = circle.CircleDensityParams(0.6, 1.1)
        m1 = circle.rho_circle(p1.r, p1.phi)
        m2 = circle.rho_circle(p2.r, p2.phi)
        delta = 2.0 * (p1.phi - p2.phi)
        printed = -1.0j * p1.r * p2.r * math.sin(delta) * circle.SIGMA2
        assert_allclose(m1 @ m2 - m2 @ m1, printed, atol=1e-13)

    def test_rotation_covariance(self):
        # Rot(w) rho Rot(-w) advances the orientation by w
        p = circle.CircleDensityParams(0.7, 0.4)
        w = 0.95
        rot = circle.rotation2(w)
        lhs = rot @ circle.rho_circle(p.r, p.phi) @ rot.T
        assert_allclose(lhs, circle.rho_circle(p.r, p.phi + w), atol=1e-13)


class TestMarginalIntegrals:
    """The four closed integrals of the doubled-angle density R(r, Phi)."""

    @staticmethod
    def big_r(r, big_phi):
        return circle.rho_circle(r, 0.0, 0.5 * big_phi)

    def test_full_angle_marginal(self):
        rule = make_rule("periodic-trapezoid", 16, scale=1.0 / math.pi)
        total = rule.integrate(np.stack([self.big_r(0.7, t)
                                         for t in rule.nodes]))
        assert_allclose(total, np.eye(2), atol=1e-12)

    def test_rotated_marginal(self):
        theta = 0.9
        rule = make_rule("periodic-trapezoid", 16, scale=1.0 / math.pi)
        total = rule.integrate(np.stack([self.big_r(0.7, theta + 2.0 * w)
                                         for w in rule.nodes]))
        assert_allclose(total, np.eye(2), atol=1e-12)

    def test_radial_marginal(self):
        theta = 1.3
        rule = make_rule("gauss-legendre", 8, a=0.0, b=1.0)
        total = rule.integrate(np.stack([r * self.big_r(r, theta)
                                         for r in rule.nodes]))
        want = self.big_r(1.0, theta) / 3.0 + np.eye(2) / 12.0
        assert_allclose(total, want, atol=1e-12)

    def test_disk_integral(self):
        radial = make_rule("gauss-legendre", 8, a=0.0, b=1.0)
        angular = make_rule("periodic-trapezoid", 16, scale=2.0 / math.pi)
        total = np.zeros((2, 2))
        for r, wr in zip(radial.nodes, radial.weights):
            for t, wt in zip(angular.nodes, angular.weights):
                total = total + wr * wt * r * self.big_r(r, t)
        assert_allclose(total, np.eye(2), atol=1e-12)


class TestQuantization:
    def test_resolution_exact(self):
        for r in (0.0, 0.3, 0.7, 1.0):
            fam = circle.circle_family(r, 0.4)
            assert core.check_resolution(fam).defect < 1e-13

    def test_fourier_quantize_matches_quadrature(self):
        r, phi = 0.8, 0.5
        fam = circle.circle_family(r, phi, n=32)
        f = lambda th: 1.5 + 0.7 * math.cos(2 * th) - 0.2 * math.sin(2 * th)
        want = circle.fourier_quantize(1.5, 0.7, -0.2, r, phi)
        assert_allclose(core.quantize(fam, f), want, atol=1e-13)

    def test_angle_operator_eigensystem(self):
        for r in (0.1, 0.5, 0.9):
            phi = 0.3
            vals, vecs = operators.eig_hermitian(circle.angle_operator(r, phi))
            assert_allclose(vals, [math.pi - r / 2.0, math.pi + r / 2.0],
                            atol=1e-12)
            # eigenvectors are the angle kets at phi +/- pi/4, up to phase
            for col, angle in ((0, phi + math.pi / 4), (1, phi - math.pi / 4)):
                overlap = abs(vecs[:, col].conj() @ circle.angle_ket(angle))
                assert_allclose(overlap, 1.0, atol=1e-12)

    def test_angle_operator_beats_trapezoid(self):
        # quadrature of the discontinuous angle function stalls at O(1/n)
        r, phi = 0.8, 0.0
        fam = circle.circle_family(r, phi, n=64)
        quad = core.quantize(fam, lambda th: th)
        closed = circle.angle_operator(r, phi)
        assert np.max(np.abs(quad - closed)) > 1e-5


class TestKernelsAndDistances:
    def test_prob_kernel_closed_form(self):
        fam = circle.circle_family(0.7, 0.0)
        for _ in range(20):
            t0, t1 = RNG.uniform(0, 2 * math.pi, size=2)
            assert_allclose(core.prob_kernel(fam, t0, t1),
                            circle.circle_prob(0.7, t0, t1), atol=1e-13)

    def test_hs_distance_closed_form(self):
        r, phi = 0.6, 0.2
        for _ in range(20):
            t0, t1 = RNG.uniform(0, 2 * math.pi, size=2)
            got = operators.hs_distance(circle.rho_circle(r, phi, t0),
                                        circle.rho_circle(r, phi, t1))
            assert_allclose(got, circle.circle_hs_distance(r, t0, t1),
                            atol=1e-13)

    def test_pseudo_distance_closed_form(self):
        r, phi = 0.6, 0.2
        for _ in range(20):
            t0, t1 = RNG.uniform(0, 2 * math.pi, size=2)
            got = operators.pseudo_distance(circle.rho_circle(r, phi, t0),
                                            circle.rho_circle(r, phi, t1))
            assert_allclose(got, circle.circle_pseudo_distance(r, t0, t1),
                            atol=1e-12)

    def test_pure_orthogonal_states_infinite_pseudo_distance(self):
        assert circle.circle_pseudo_distance(1.0, 0.0, math.pi / 2) == math.inf

    def test_small_separation_slope(self):
        # delta ~ sqrt(2) r / sqrt(1+r^2) |dtheta| as dtheta -> 0
        r, eps = 0.8, 1e-3
        slope = circle.circle_pseudo_distance(r, 0.4, 0.4 + eps) / eps
        want = math.sqrt(2.0) * r / math.sqrt(1.0 + r * r)
        assert abs(slope / want - 1.0) < 1e-2

    @pytest.mark.xfail(strict=True, reason="published small-separation "
                       "constant 2r/sqrt(1+r^2) overshoots by sqrt(2); see "
                       "the decisions ledger")
    def test_published_small_separation_variant(self):
        r, eps = 0.8, 1e-3
        slope = circle.circle_pseudo_distance(r, 0.4, 0.4 + eps) / eps
        printed = 2.0 * r / math.sqrt(1.0 + r * r)
        assert abs(slope / printed - 1.0) < 1e-2
