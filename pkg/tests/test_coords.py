"""Chart maps: Jacobi splitting, Hopf angles, special points, velocities."""

import cmath
import math

import numpy as np
import pytest

from jm3body.conformal import pair_channels
from jm3body.coords import (
    ChartPoint,
    MassConfig,
    PlanarConfig,
    Space,
    hopf_from_rescaled,
    hopf_velocity_from_zdot,
    is_collinear_angles,
    jacobi_from_positions,
    jacobi_from_rescaled,
    positions_from_jacobi,
    quotient_xi2,
    relabel_rescaled,
    rescaled_from_hopf,
    rescaled_from_jacobi,
    shape_cartesian,
    special_point,
    theta_phi_from_hopf,
    zdot_from_hopf,
)
from jm3body.errors import ChartSingular, ZeroSize

from helpers import random_point

EQUAL = MassConfig.equal()
UNEQUAL = MassConfig(1.0, 2.0, 3.0)


def random_config(rng) -> PlanarConfig:
    vals = rng.uniform(-2.0, 2.0, size=6)
    return PlanarConfig(
        complex(vals[0], vals[1]), complex(vals[2], vals[3]), complex(vals[4], vals[5])
    )


class TestJacobi:
    def test_equal_mass_example(self):
        config = PlanarConfig(0.0, 1.0, 1j)
        J1, J2, J3 = jacobi_from_positions(config, EQUAL)
        assert J1 == pytest.approx(1.0)
        assert J2 == pytest.approx(1j - 0.5)
        assert J3 == pytest.approx((1.0 + 1j) / 3.0)

    @pytest.mark.parametrize("masses", [EQUAL, UNEQUAL])
    def test_round_trip(self, masses):
        rng = np.random.default_rng(11)
        for _ in range(150):
            config = random_config(rng)
            back = positions_from_jacobi(*jacobi_from_positions(config, masses), masses)
            assert np.allclose(back.positions, config.positions, atol=1e-13)

    @pytest.mark.parametrize("masses", [EQUAL, UNEQUAL])
    def test_rescaled_round_trip(self, masses):
        rng = np.random.default_rng(12)
        for _ in range(100):
            config = random_config(rng)
            J1, J2, _ = jacobi_from_positions(config, masses)
            z1, z2 = rescaled_from_jacobi(J1, J2, masses)
            K1, K2 = jacobi_from_rescaled(z1, z2, masses)
            assert K1 == pytest.approx(J1, abs=1e-13)
            assert K2 == pytest.approx(J2, abs=1e-13)

    @pytest.mark.parametrize("masses", [EQUAL, UNEQUAL])
    def test_size_is_moment_of_inertia(self, masses):
        rng = np.random.default_rng(13)
        for _ in range(100):
            config = random_config(rng)
            z1, z2 = config.rescaled(masses)
            r_sq = abs(z1) ** 2 + abs(z2) ** 2
            assert r_sq == pytest.approx(config.moment_of_inertia(masses), rel=1e-12)

    @pytest.mark.parametrize("masses", [EQUAL, UNEQUAL])
    def test_kinetic_energy_matches_body_frame(self, masses):
        # The rescaling turns the mass metric into the flat one.
        rng = np.random.default_rng(14)
        for _ in range(100):
            config = random_config(rng)
            vel = random_config(rng)  # reuse as velocity triple
            J1d, J2d, J3d = jacobi_from_positions(vel, masses)
            z1d, z2d = rescaled_from_jacobi(J1d, J2d, masses)
            body = (
                masses.m1 * abs(vel.x1) ** 2
                + masses.m2 * abs(vel.x2) ** 2
                + masses.m3 * abs(vel.x3) ** 2
            )
            cm = masses.M3 * abs(J3d) ** 2
            assert abs(z1d) ** 2 + abs(z2d) ** 2 == pytest.approx(body - cm, rel=1e-10, abs=1e-12)


class TestHopf:
    def test_reference_point(self):
        p = hopf_from_rescaled(1j / math.sqrt(2.0), 1.0 / math.sqrt(2.0))
        assert p.r == pytest.approx(1.0)
        assert p.eta == pytest.approx(math.pi / 4.0)
        assert p.xi1 == pytest.approx(math.pi / 4.0)
        assert p.xi2 == pytest.approx(math.pi / 4.0)

    def test_triple_collision_raises(self):
        with pytest.raises(ZeroSize):
            hopf_from_rescaled(0.0, 0.0)

    def test_round_trip_through_chart(self):
        rng = np.random.default_rng(21)
        for _ in range(400):
            z1 = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            z2 = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            if abs(z1) < 1e-3 or abs(z2) < 1e-3:
                continue
            p = hopf_from_rescaled(z1, z2)
            assert 0.0 <= p.eta <= math.pi / 2.0
            assert -math.pi <= p.xi2 <= math.pi
            assert abs(p.xi2) - 1e-9 <= p.xi1 <= 2.0 * math.pi - abs(p.xi2) + 1e-9
            w1, w2 = rescaled_from_hopf(p)
            assert w1 == pytest.approx(z1, abs=1e-12)
            assert w2 == pytest.approx(z2, abs=1e-12)

    def test_chart_matches_pair_separations(self):
        # d_ij**2 / r**2 must equal the pair-channel quadric of the angles.
        rng = np.random.default_rng(22)
        for masses in (EQUAL, UNEQUAL):
            channels = pair_channels(masses)
            for _ in range(100):
                config = random_config(rng)
                z1, z2 = config.rescaled(masses)
                p = hopf_from_rescaled(z1, z2)
                r_sq = p.r**2
                d12, d23, d31 = config.separations()
                for ch, d in zip(channels, (d12, d23, d31)):
                    assert ch.separation_sq(p.eta, p.xi2) == pytest.approx(
                        d * d / r_sq, rel=1e-10, abs=1e-12
                    )


class TestShapeSphere:
    def test_equilateral_is_half_radius_pole(self):
        w = shape_cartesian(special_point("L4"))
        assert np.allclose(w, [0.0, 0.5, 0.0], atol=1e-15)
        w5 = shape_cartesian(special_point("L5"))
        assert np.allclose(w5, [0.0, -0.5, 0.0], atol=1e-15)

    def test_sphere_radius(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            x = random_point(rng, Space.C2)
            p = ChartPoint.from_coords(Space.C2, x)
            w = shape_cartesian(p)
            assert np.linalg.norm(w) == pytest.approx(0.5 * p.r**2, rel=1e-12)

    def test_collinear_shapes_on_equator(self):
        for label in ("E1", "E2", "E3"):
            p = special_point(label)
            _, phi = theta_phi_from_hopf(p.eta, p.xi2)
            assert phi == pytest.approx(0.0, abs=1e-12)
            assert is_collinear_angles(p.eta, p.xi2)

    def test_pole_is_singular_for_latitude_chart(self):
        p = special_point("L4")
        with pytest.raises(ChartSingular) as err:
            theta_phi_from_hopf(p.eta, p.xi2)
        assert err.value.phi == pytest.approx(math.pi / 2.0)

    def test_equilateral_not_collinear(self):
        p = special_point("L4")
        assert not is_collinear_angles(p.eta, p.xi2)

    def test_quotient_azimuth(self):
        assert quotient_xi2(0.3) == pytest.approx(0.3)
        assert quotient_xi2(-0.3) == pytest.approx(math.pi - 0.3)


class TestSpecialPoints:
    def test_euler_latitude_is_pi_over_six(self):
        p = special_point("E1")
        assert p.eta == pytest.approx(math.pi / 6.0, abs=1e-12)

    def test_collision_directions_are_binary_collisions(self):
        # C_k puts the complementary pair at zero separation but r = 1.
        for label, pair_index in (("C1", 1), ("C2", 2), ("C3", 0)):
            p = special_point(label, Space.C2)
            z1, z2 = rescaled_from_hopf(p)
            config = positions_from_jacobi(*jacobi_from_rescaled(z1, z2, EQUAL), 0.0, EQUAL)
            seps = config.separations()
            assert seps[pair_index] == pytest.approx(0.0, abs=1e-12)
            assert min(s for i, s in enumerate(seps) if i != pair_index) > 0.1

    def test_equilateral_has_equal_separations(self):
        p = special_point("L4", Space.C2)
        z1, z2 = rescaled_from_hopf(p)
        config = positions_from_jacobi(*jacobi_from_rescaled(z1, z2, EQUAL), 0.0, EQUAL)
        d12, d23, d31 = config.separations()
        assert d12 == pytest.approx(d23, rel=1e-12)
        assert d23 == pytest.approx(d31, rel=1e-12)

    def test_euler_has_middle_body(self):
        # E3: body 3 sits at the midpoint of bodies 1, 2.
        p = special_point("E3", Space.C2)
        z1, z2 = rescaled_from_hopf(p)
        config = positions_from_jacobi(*jacobi_from_rescaled(z1, z2, EQUAL), 0.0, EQUAL)
        mid = 0.5 * (config.x1 + config.x2)
        assert config.x3 == pytest.approx(mid, abs=1e-12)


class TestVelocities:
    def test_pushforward_matches_finite_difference(self):
        rng = np.random.default_rng(41)
        for _ in range(100):
            x = random_point(rng, Space.C2)
            v = rng.uniform(-1.0, 1.0, size=4)
            zd1, zd2 = zdot_from_hopf(x, v)
            dt = 1e-7
            p_plus = ChartPoint.from_coords(Space.C2, x + dt * v)
            p_minus = ChartPoint.from_coords(Space.C2, x - dt * v)
            w1p, w2p = rescaled_from_hopf(p_plus)
            w1m, w2m = rescaled_from_hopf(p_minus)
            assert zd1 == pytest.approx((w1p - w1m) / (2 * dt), rel=1e-6, abs=1e-7)
            assert zd2 == pytest.approx((w2p - w2m) / (2 * dt), rel=1e-6, abs=1e-7)

    def test_pullback_round_trip(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            x = random_point(rng, Space.C2)
            v = rng.uniform(-1.0, 1.0, size=4)
            zd1, zd2 = zdot_from_hopf(x, v)
            back = hopf_velocity_from_zdot(x, zd1, zd2)
            assert np.allclose(back, v, atol=1e-10)


class TestRelabelling:
    @pytest.mark.parametrize("masses", [EQUAL, UNEQUAL])
    @pytest.mark.parametrize("perm", [(2, 3, 1), (3, 1, 2), (2, 1, 3), (1, 3, 2)])
    def test_relabel_preserves_geometry(self, masses, perm):
        rng = np.random.default_rng(43)
        for _ in range(50):
            config = random_config(rng).centered(masses)
            z1, z2 = config.rescaled(masses)
            z1n, z2n, new_masses = relabel_rescaled(z1, z2, masses, perm)
            # Size is invariant, separations permute along with the bodies.
            assert abs(z1n) ** 2 + abs(z2n) ** 2 == pytest.approx(
                abs(z1) ** 2 + abs(z2) ** 2, rel=1e-10
            )
            new_config = positions_from_jacobi(
                *jacobi_from_rescaled(z1n, z2n, new_masses), 0.0, new_masses
            )
            old = config.separations()
            new = new_config.separations()
            # separation of new bodies (a, b) = separation of old (perm[a-1], perm[b-1])
            pairs = {(1, 2): 0, (2, 3): 1, (1, 3): 2}
            for (a, b), idx in pairs.items():
                key = tuple(sorted((perm[a - 1], perm[b - 1])))
                assert new[idx] == pytest.approx(old[pairs[key]], rel=1e-9, abs=1e-12)


class TestChartPoint:
    def test_space_field_validation(self):
        with pytest.raises(ValueError):
            ChartPoint.s2(0.3, 0.2).coords()  # fine
            ChartPoint(Space.S2, 0.3, 0.2, r=1.0)
        with pytest.raises(ValueError):
            ChartPoint(Space.C2, 0.3, 0.2, r=None, xi1=0.1)
        with pytest.raises(ValueError):
            ChartPoint(Space.C2, 0.3, 0.2, r=-1.0, xi1=0.1)
        with pytest.raises(ValueError):
            ChartPoint.s2(2.0, 0.2)

    def test_coords_round_trip(self):
        rng = np.random.default_rng(44)
        for space in Space:
            for _ in range(25):
                x = random_point(rng, space)
                p = ChartPoint.from_coords(space, x)
                assert np.allclose(p.coords(), x)
