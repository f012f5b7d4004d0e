"""Curvature engine: model-space oracles, closed forms, limits, submersions."""

import math

import numpy as np
import pytest

from jm3body.conformal import PotentialKind
from jm3body.coords import MassConfig, Space, special_point
from jm3body.curvature import (
    CurvatureReport,
    bianchi_residual,
    biquadratic,
    christoffel,
    curvature_report,
    directional_limit,
    extrapolate_to_zero,
    metric_compatibility_residual,
    named_planes,
    oneill_residual,
    orthonormal_frame,
    plane_vectors,
    ricci,
    riemann,
    scalar_closed_form,
    scalar_closed_grid,
    scalar_curvature,
    scalar_field_numeric,
    scalar_from_frame_sections,
    scalar_relations_residual,
    sectional,
    shape_sphere_factors,
    shape_sphere_scalar_factored,
    special_limits,
)
from jm3body.errors import ChartSingular, DegeneratePlane, InvalidQuotient
from jm3body.metrics import (
    MetricField,
    NearCollisionKind,
    kepler_metric,
    near_collision_metric,
    oscillator_metric,
)

from helpers import random_point, random_shape

EQUAL = MassConfig.equal()
UNEQUAL = MassConfig(1.0, 2.0, 3.0)
INV = PotentialKind.INVERSE_SQUARE
NEWT = PotentialKind.NEWTONIAN


@pytest.fixture(scope="module")
def limits():
    return special_limits()


class TestModelSpaces:
    """Bare kinetic metrics have known constant curvature."""

    def test_half_radius_shape_sphere(self):
        fld = MetricField(Space.S2, potential=None)
        rng = np.random.default_rng(71)
        for _ in range(10):
            x = random_point(rng, Space.S2)
            assert scalar_curvature(fld, x) == pytest.approx(8.0, rel=1e-6)
            u = rng.uniform(-1, 1, size=2)
            v = rng.uniform(-1, 1, size=2)
            assert sectional(fld, x, u, v) == pytest.approx(4.0, rel=1e-6)

    def test_conformal_constant_rescales(self):
        fld = MetricField(Space.S2, potential=None, conformal_const=2.0)
        x = np.array([0.6, 0.9])
        assert scalar_curvature(fld, x) == pytest.approx(4.0, rel=1e-6)

    def test_unit_round_three_sphere(self):
        fld = MetricField(Space.S3, potential=None)
        rng = np.random.default_rng(72)
        for _ in range(10):
            x = random_point(rng, Space.S3)
            assert scalar_curvature(fld, x) == pytest.approx(6.0, rel=1e-6)
            u = rng.uniform(-1, 1, size=3)
            v = rng.uniform(-1, 1, size=3)
            assert sectional(fld, x, u, v) == pytest.approx(1.0, rel=1e-5)

    def test_flat_configuration_space(self):
        fld = MetricField(Space.C2, potential=None)
        rng = np.random.default_rng(73)
        for _ in range(10):
            x = random_point(rng, Space.C2)
            assert np.max(np.abs(riemann(fld, x))) < 1e-7

    def test_cone_over_half_sphere(self):
        # Rotation quotient of flat C2: radial planes flat, spherical
        # planes carry (4 - 1) / r**2.
        fld = MetricField(Space.R3, potential=None)
        x = np.array([1.7, 0.7, 1.1])
        r_sq = 1.7**2
        assert scalar_curvature(fld, x) == pytest.approx(6.0 / r_sq, rel=1e-6)
        for plane, expected in (("r_eta", 0.0), ("r_xi2", 0.0), ("eta_xi2", 3.0 / r_sq)):
            u, v = plane_vectors(fld, x, plane)
            assert sectional(fld, x, u, v) == pytest.approx(expected, rel=1e-6, abs=1e-8)


class TestRadialModelCurvature:
    @pytest.mark.parametrize(
        "energy,k,m",
        [(1.0, 1.0, 1.0), (-0.4, 1.3, 0.8), (2.0, 0.5, 1.5)],
    )
    def test_kepler_scalar(self, energy, k, m):
        fld = kepler_metric(energy, k=k, m=m)
        for r in (0.7, 1.0, 1.9):
            if energy * r + k <= 0 or energy + k / r <= 0:
                continue
            expected = -k * energy / (m * (energy * r + k) ** 3)
            assert scalar_curvature(fld, np.array([r, 0.4])) == pytest.approx(
                expected, rel=1e-6, abs=1e-9
            )

    def test_kepler_reference_value(self):
        fld = kepler_metric(1.0)
        assert scalar_curvature(fld, np.array([1.0, 0.2])) == pytest.approx(-0.125, rel=1e-7)

    def test_kepler_zero_energy_flat(self):
        fld = kepler_metric(0.0)
        for r in (0.5, 1.0, 2.0):
            assert abs(scalar_curvature(fld, np.array([r, 0.3]))) < 1e-8

    @pytest.mark.parametrize("energy,k,r", [(1.0, 1.0, 0.5), (1.0, -1.0, 0.8), (0.7, 0.9, 1.0)])
    def test_oscillator_scalar(self, energy, k, r):
        fld = oscillator_metric(energy, k=k)
        expected = 16.0 * energy * k / (2.0 * energy - k * r * r) ** 3
        assert scalar_curvature(fld, np.array([r, 0.6])) == pytest.approx(
            expected, rel=1e-6, abs=1e-9
        )


class TestTensorInvariants:
    FIELDS = [
        MetricField(Space.C2, INV, 0.4),
        MetricField(Space.C2, NEWT, -0.5, UNEQUAL),
        MetricField(Space.R3, NEWT, -0.6),
        MetricField(Space.S3, INV, 0.0),
        MetricField(Space.S2, INV, 0.0, UNEQUAL),
    ]

    @pytest.mark.parametrize("fld", FIELDS, ids=str)
    def test_riemann_symmetries(self, fld):
        rng = np.random.default_rng(74)
        for _ in range(8):
            x = random_point(rng, fld.space)
            try:
                riem = riemann(fld, x)
            except Exception:
                continue
            # antisymmetry in the plane slots is exact by construction
            assert np.max(np.abs(riem + riem.transpose(0, 1, 3, 2))) < 1e-12
            assert bianchi_residual(fld, x) < 1e-5

    @pytest.mark.parametrize("fld", FIELDS, ids=str)
    def test_christoffel_metric_compatibility(self, fld):
        rng = np.random.default_rng(75)
        for _ in range(8):
            x = random_point(rng, fld.space)
            try:
                res = metric_compatibility_residual(fld, x)
            except Exception:
                continue
            assert res < 1e-10

    @pytest.mark.parametrize("fld", FIELDS, ids=str)
    def test_scalar_equals_frame_section_sum(self, fld):
        rng = np.random.default_rng(76)
        for _ in range(6):
            x = random_point(rng, fld.space)
            try:
                direct = scalar_curvature(fld, x)
            except Exception:
                continue
            assert scalar_from_frame_sections(fld, x) == pytest.approx(
                direct, rel=1e-6, abs=1e-6
            )

    def test_biquadratic_pair_swap_symmetry(self):
        fld = MetricField(Space.C2, INV, 0.0)
        rng = np.random.default_rng(77)
        x = random_point(rng, Space.C2)
        report = curvature_report(fld, x)
        for _ in range(10):
            u = rng.uniform(-1, 1, size=4)
            v = rng.uniform(-1, 1, size=4)
            # pair-swap symmetry holds up to finite-difference noise
            assert report.biquadratic(u, v) == pytest.approx(
                report.biquadratic(v, u), rel=1e-5, abs=1e-6
            )

    def test_degenerate_plane_raises(self):
        fld = MetricField(Space.S2, INV, 0.0)
        x = np.array([0.7, 0.9])
        u = np.array([1.0, 0.4])
        with pytest.raises(DegeneratePlane):
            sectional(fld, x, u, 2.0 * u)

    def test_pole_is_chart_singular(self):
        fld = MetricField(Space.R3, INV, 0.0)
        with pytest.raises(ChartSingular):
            scalar_curvature(fld, np.array([1.0, math.pi / 2.0, 0.3]))

    def test_orthonormal_frame_property(self):
        rng = np.random.default_rng(78)
        fld = MetricField(Space.C2, INV, 0.0)
        x = random_point(rng, Space.C2)
        g, _ = fld.metric(x)
        E = orthonormal_frame(g)
        assert np.allclose(E.T @ g @ E, np.eye(4), atol=1e-12)


class TestClosedForms:
    CASES = [
        (Space.C2, INV, EQUAL),
        (Space.R3, INV, EQUAL),
        (Space.S3, INV, EQUAL),
        (Space.S2, INV, EQUAL),
        (Space.C2, INV, UNEQUAL),
        (Space.R3, INV, UNEQUAL),
        (Space.S3, INV, UNEQUAL),
        (Space.S2, INV, UNEQUAL),
        (Space.C2, NEWT, EQUAL),
        (Space.R3, NEWT, EQUAL),
        (Space.C2, NEWT, UNEQUAL),
        (Space.R3, NEWT, UNEQUAL),
    ]

    @pytest.mark.parametrize("space,potential,masses", CASES)
    def test_closed_matches_numeric(self, space, potential, masses):
        if potential is NEWT and space in (Space.S3, Space.S2):
            pytest.skip("no scaling quotient")
        fld = MetricField(space, potential, 0.0, masses)
        rng = np.random.default_rng(79)
        r = 1.4
        for _ in range(12):
            eta, xi2 = random_shape(rng, signed_xi2=space in (Space.C2, Space.S3))
            vals = {"r": r, "eta": eta, "xi1": 0.8, "xi2": xi2}
            x = np.array([vals[n] for n in space.coord_names])
            closed = scalar_closed_form(space, eta, xi2, potential, masses, r=r)
            numeric = scalar_curvature(fld, x)
            assert numeric == pytest.approx(closed, rel=1e-5, abs=1e-7)

    def test_newtonian_quotient_rejected(self):
        with pytest.raises(InvalidQuotient):
            scalar_closed_form(Space.S2, 0.7, 0.3, NEWT)

    def test_grid_variant_matches_pointwise(self):
        rng = np.random.default_rng(80)
        etas = rng.uniform(0.4, 1.1, size=9)
        xi2s = rng.uniform(0.3, 2.8, size=9)
        for space in (Space.C2, Space.R3, Space.S3, Space.S2):
            grid = scalar_closed_grid(space, etas, xi2s, INV, r=1.2)
            for i in range(9):
                assert grid[i] == pytest.approx(
                    scalar_closed_form(space, etas[i], xi2s[i], INV, r=1.2), rel=1e-12
                )
        for space in (Space.C2, Space.R3):
            grid = scalar_closed_grid(space, etas, xi2s, NEWT, r=1.2)
            for i in range(9):
                assert grid[i] == pytest.approx(
                    scalar_closed_form(space, etas[i], xi2s[i], NEWT, r=1.2), rel=1e-12
                )

    def test_equilateral_values(self):
        L4 = special_point("L4")
        assert scalar_closed_form(Space.S2, L4.eta, L4.xi2) == pytest.approx(0.0, abs=1e-12)
        assert scalar_closed_form(Space.R3, L4.eta, L4.xi2) == pytest.approx(-8.0 / 3.0)
        assert scalar_closed_form(Space.S3, L4.eta, L4.xi2) == pytest.approx(-10.0 / 3.0)
        assert scalar_closed_form(Space.C2, L4.eta, L4.xi2) == pytest.approx(-6.0)

    @pytest.mark.parametrize("label", ["E1", "E2"])
    def test_euler_values(self, label):
        p = special_point(label)
        assert scalar_closed_form(Space.S2, p.eta, p.xi2) == pytest.approx(-40.0 / 27.0)
        assert scalar_closed_form(Space.R3, p.eta, p.xi2) == pytest.approx(-128.0 / 27.0)
        assert scalar_closed_form(Space.S3, p.eta, p.xi2) == pytest.approx(-140.0 / 27.0)
        assert scalar_closed_form(Space.C2, p.eta, p.xi2) == pytest.approx(-76.0 / 9.0)

    def test_newtonian_equilateral_values(self):
        L4 = special_point("L4")
        assert scalar_closed_form(Space.C2, L4.eta, L4.xi2, NEWT, r=1.0) == pytest.approx(-1.5)
        assert scalar_closed_form(Space.R3, L4.eta, L4.xi2, NEWT, r=1.0) == pytest.approx(0.5)
        # Both scale like 1/r at fixed shape.
        assert scalar_closed_form(Space.C2, L4.eta, L4.xi2, NEWT, r=2.5) == pytest.approx(-0.6)

    def test_configuration_space_bound(self):
        # R_C2 <= -4 / (G m**3) everywhere (equality only at the Euler shapes)
        rng = np.random.default_rng(81)
        for _ in range(300):
            eta, xi2 = random_shape(rng, q_floor=0.05, s2e_floor=0.05)
            assert scalar_closed_form(Space.C2, eta, xi2) <= -4.0 + 1e-9


class TestFactoredForm:
    def test_euler_axis_factors(self):
        A, B, C = shape_sphere_factors(math.pi / 2.0, 0.0)
        assert A == pytest.approx(8.0)
        assert B == pytest.approx(960.0)
        assert C == pytest.approx(-5184.0)
        value = shape_sphere_scalar_factored(math.pi / 2.0, 0.0)
        assert value == pytest.approx(-40.0 / 27.0, rel=1e-12)

    def test_zero_sets(self):
        L4 = special_point("L4")
        _, B, _ = shape_sphere_factors(L4.eta, L4.xi2)
        assert B == pytest.approx(0.0, abs=1e-10)
        A, _, _ = shape_sphere_factors(0.0, 0.4)
        assert A == pytest.approx(0.0, abs=1e-12)

    def test_sign_definite_factors(self):
        rng = np.random.default_rng(82)
        etas = rng.uniform(1e-3, math.pi / 2.0 - 1e-3, size=500)
        xi2s = rng.uniform(-math.pi, math.pi, size=500)
        A, B, C = shape_sphere_factors(etas, xi2s)
        assert np.all(A >= -1e-12)
        assert np.all(B >= -1e-9)
        assert np.all(C < 0.0)

    def test_matches_derivative_form(self):
        rng = np.random.default_rng(83)
        for _ in range(200):
            eta, xi2 = random_shape(rng)
            derivative_form = scalar_closed_form(Space.S2, eta, xi2)
            factored = float(shape_sphere_scalar_factored(eta, xi2))
            assert factored == pytest.approx(derivative_form, rel=1e-9, abs=1e-11)


class TestScalarRelations:
    def test_inverse_square_relations(self):
        rng = np.random.default_rng(84)
        for _ in range(100):
            eta, xi2 = random_shape(rng)
            rel = scalar_relations_residual(eta, xi2)
            scale = max(abs(v) for v in rel.values.values()) + 1.0
            for key, res in rel.residuals.items():
                assert abs(res) < 1e-9 * scale, key
            assert rel.chain_ok

    def test_newtonian_relation(self):
        rng = np.random.default_rng(85)
        for _ in range(100):
            eta, xi2 = random_shape(rng)
            rel = scalar_relations_residual(eta, xi2, potential=NEWT, r=1.7)
            assert abs(rel.residuals["r3_from_c2"]) < 1e-10
            assert rel.chain_ok
            assert set(rel.values) == {"C2", "R3"}

    def test_scaling_in_G_and_m(self):
        eta, xi2 = 0.7, 0.9
        base = scalar_relations_residual(eta, xi2)
        scaled = scalar_relations_residual(eta, xi2, G=2.0, m=1.5)
        factor = 2.0 * 1.5**3
        for key in base.values:
            assert scaled.values[key] == pytest.approx(base.values[key] / factor, rel=1e-12)


class TestONeill:
    ROTATION_PLANES = ("r_eta", "r_xi", "eta_xi")
    SCALE_PLANES = ("eta_xi2", "eta_xi1", "xi1_xi2")

    @pytest.mark.parametrize("plane", ROTATION_PLANES + SCALE_PLANES)
    def test_zero_energy_inverse_square(self, plane):
        rng = np.random.default_rng(86)
        for _ in range(10):
            x = random_point(rng, Space.C2)
            assert abs(oneill_residual(x, plane)) < 1e-5

    @pytest.mark.parametrize("plane", ROTATION_PLANES)
    @pytest.mark.parametrize(
        "potential,energy,masses",
        [
            (INV, -0.8, EQUAL),
            (INV, 0.7, EQUAL),
            (NEWT, -0.4, EQUAL),
            (NEWT, 0.0, UNEQUAL),
        ],
    )
    def test_rotation_quotient_any_energy(self, plane, potential, energy, masses):
        rng = np.random.default_rng(87)
        done = 0
        while done < 6:
            x = random_point(rng, Space.C2, r_range=(1.2, 2.0))
            try:
                res = oneill_residual(x, plane, potential, energy, masses)
            except Exception:
                continue
            done += 1
            assert abs(res) < 1e-5

    def test_unknown_plane_rejected(self):
        with pytest.raises(ValueError):
            oneill_residual(np.array([1.0, 0.7, 0.5, 0.3]), "r_chi")

    def test_bracket_correction_is_essential(self):
        # Dropping the vertical-bracket term must break the comparison.
        rng = np.random.default_rng(88)
        x = random_point(rng, Space.C2)
        full = oneill_residual(x, "eta_xi")
        fld = MetricField(Space.C2, INV, 0.0)
        base = MetricField(Space.R3, INV, 0.0)
        u, v = plane_vectors(fld, x, "eta_xi")
        K_tot = sectional(fld, x, u, v)
        ub, vb = plane_vectors(base, x[[0, 1, 3]], "eta_xi2")
        K_base = sectional(base, x[[0, 1, 3]], ub, vb)
        assert abs(K_base - K_tot) > 1e-3  # the correction is genuinely nonzero
        assert abs(full) < 1e-5


class TestReports:
    def test_report_contents(self):
        fld = MetricField(Space.R3, INV, 0.0)
        x = np.array([1.3, 0.7, 1.9])
        report = curvature_report(fld, x)
        assert isinstance(report, CurvatureReport)
        assert set(report.sectional) == set(named_planes(fld))
        assert report.scalar == pytest.approx(scalar_curvature(fld, x), rel=1e-9)
        assert np.allclose(report.christoffel, christoffel(fld, x))
        assert np.allclose(report.ricci, ricci(fld, x), atol=1e-10)
        total = sum(report.sectional.values())
        # scalar equals twice the sum over unordered coordinate planes only
        # for orthogonal frames; here just check the report is self-consistent
        u, v = plane_vectors(fld, x, "eta_xi2")
        assert report.sectional["eta_xi2"] == pytest.approx(
            report.biquadratic(u, v)
            / (
                (u @ report.g @ u) * (v @ report.g @ v)
                - (u @ report.g @ v) ** 2
            ),
            rel=1e-12,
        )
        assert total == total  # finite

    def test_field_grid_matches_pointwise(self):
        fld = MetricField(Space.S2, INV, 0.0)
        etas = np.array([0.5, 0.8, 1.1])
        xi2s = np.array([0.4, 1.3])
        grid = scalar_field_numeric(fld, etas, xi2s)
        assert grid.shape == (3, 2)
        for i, eta in enumerate(etas):
            for j, xi2 in enumerate(xi2s):
                direct = scalar_curvature(fld, np.array([eta, xi2]))
                assert grid[i, j] == pytest.approx(direct, rel=1e-10)


class TestSpecialLimits:
    L4_EXPECTED = {
        "K_r_eta": -2.0 / 3.0,
        "K_r_xi": -2.0 / 3.0,
        "K_eta_xi": -1.0,
        "K_eta_xi2": -1.0,
        "K_eta_xi1": -1.0 / 3.0,
        "K_xi1_xi2": -1.0 / 3.0,
    }
    C3_EXPECTED = {
        "K_r_eta": -2.0,
        "K_r_xi": 0.0,
        "K_eta_xi": 0.0,
        "K_eta_xi2": -2.0,
        "K_eta_xi1": -2.0,
        "K_xi1_xi2": 0.0,
    }
    BINARY_SETS = {
        "K_r_eta": (0.0, -2.0),
        "K_r_xi": (-2.0, 0.0),
        "K_eta_xi2": (0.0, -0.5),
        "K_eta_xi1": (0.0, -2.0),
        "K_xi1_xi2": (-2.0, 0.0),
    }

    def test_equilateral_point(self, limits):
        for quantity, expected in self.L4_EXPECTED.items():
            assert limits[("L4", quantity)] == pytest.approx(expected, abs=1e-6), quantity
        assert limits[("L4", "R_S2")] == pytest.approx(0.0, abs=1e-10)

    def test_collision_axis(self, limits):
        for quantity, expected in self.C3_EXPECTED.items():
            assert limits[("C3", quantity)] == pytest.approx(expected, abs=1e-4), quantity
        assert limits[("C3", "R_C2")] == pytest.approx(-12.0, abs=1e-4)

    @pytest.mark.parametrize("label", ["C1", "C2"])
    def test_binary_collision_directional_sets(self, limits, label):
        for quantity, expected_set in self.BINARY_SETS.items():
            got = sorted(
                (
                    limits[(label, f"{quantity}@eta")],
                    limits[(label, f"{quantity}@xi2")],
                )
            )
            want = sorted(expected_set)
            assert got == pytest.approx(want, abs=1e-4), (label, quantity)
        # the mixed-rotation plane tends to zero along both directions
        assert limits[(label, "K_eta_xi@eta")] == pytest.approx(0.0, abs=1e-4)
        assert limits[(label, "K_eta_xi@xi2")] == pytest.approx(0.0, abs=1e-4)

    def test_near_collision_models(self, limits):
        assert limits[("PAIR_S2", "R")] == pytest.approx(0.0, abs=1e-7)
        assert limits[("PAIR_S2", "K_lam_chi")] == pytest.approx(0.0, abs=1e-7)
        assert limits[("PAIR_R3", "R")] == pytest.approx(-4.0, rel=1e-6)
        assert limits[("PAIR_R3", "K_kappa_lam")] == pytest.approx(-2.0, rel=1e-6)
        assert limits[("PAIR_R3", "K_kappa_chi")] == pytest.approx(0.0, abs=1e-7)
        assert limits[("PAIR_R3", "K_lam_chi")] == pytest.approx(0.0, abs=1e-7)
        assert limits[("PAIR_C2", "R")] == pytest.approx(-12.0, rel=1e-6)
        for plane in ("kappa_lam", "kappa_xim", "lam_xim"):
            assert limits[("PAIR_C2", f"K_{plane}")] == pytest.approx(-2.0, rel=1e-6)
        for plane in ("kappa_xip", "lam_xip", "xim_xip"):
            assert limits[("PAIR_C2", f"K_{plane}")] == pytest.approx(0.0, abs=1e-7)
        assert limits[("PAIR_S3", "R")] == pytest.approx(-4.0, rel=1e-6)
        assert limits[("PAIR_S3", "K_lam_xim")] == pytest.approx(-2.0, rel=1e-6)
        assert limits[("PAIR_S3", "K_lam_xip")] == pytest.approx(0.0, abs=1e-7)
        assert limits[("PAIR_S3", "K_xim_xip")] == pytest.approx(0.0, abs=1e-7)

    def test_extrapolation_helper(self):
        assert extrapolate_to_zero(lambda t: 3.0 + 2.0 * t - t**2) == pytest.approx(3.0, abs=1e-10)
        assert extrapolate_to_zero(lambda t: math.cos(t)) == pytest.approx(1.0, abs=1e-9)


class TestNewtonianNearCollision:
    """Leading curvatures at a binary collision for the Newtonian potential."""

    def test_full_configuration_metric(self):
        # eta small enough for the asymptotic constants, large enough for
        # the nearly degenerate rotation block to stay well conditioned
        fld = MetricField(Space.C2, NEWT, 0.0)
        eta, r = 3e-4, 0.8
        rho = math.sqrt(2.0) * eta * r
        x = np.array([r, eta, 0.6, 0.2])
        step = 1e-6
        assert scalar_curvature(fld, x, step) * rho == pytest.approx(-3.0, rel=2e-3)
        expected = {
            "r_eta": -1.0,
            "eta_xi1": -1.0,
            "eta_xi2": -1.0,
            "r_xi1": -0.5,
            "r_xi2": -0.5,
            "xi1_xi2": 0.5,
        }
        riem = riemann(fld, x, step)
        g, _ = fld.metric(x)
        for plane, want in expected.items():
            u, v = plane_vectors(fld, x, plane)
            K = sectional(fld, x, u, v, g=g, riem=riem)
            assert K * rho == pytest.approx(want, abs=2e-3), plane

    def test_full_rotation_quotient_metric(self):
        fld = MetricField(Space.R3, NEWT, 0.0)
        eta, r = 1e-4, 0.8
        rho = math.sqrt(2.0) * eta * r
        x = np.array([r, eta, 0.2])
        step = 1e-6
        assert scalar_curvature(fld, x, step) * rho == pytest.approx(-1.0, rel=1e-3)
        riem = riemann(fld, x, step)
        g, _ = fld.metric(x)
        u, v = plane_vectors(fld, x, "r_eta")
        assert sectional(fld, x, u, v, g=g, riem=riem) * rho == pytest.approx(-1.0, rel=2e-3)
        u, v = plane_vectors(fld, x, "r_xi2")
        assert sectional(fld, x, u, v, g=g, riem=riem) * rho == pytest.approx(0.5, rel=2e-3)
        # the mixed shape/rotation plane stays finite; the constant is per
        # unit size and scales like 1/r
        u, v = plane_vectors(fld, x, "eta_xi2")
        finite = sectional(fld, x, u, v, g=g, riem=riem)
        assert finite == pytest.approx(-2.0 * math.sqrt(2.0 / 3.0) / r, rel=1e-3)

    @pytest.mark.parametrize(
        "kind",
        [NearCollisionKind.NEWTONIAN_C2, NearCollisionKind.NEWTONIAN_R3],
    )
    def test_models_reproduce_leading_curvature(self, kind):
        model = near_collision_metric(kind)
        eta, r = 1e-4, 1.1
        rho = math.sqrt(2.0) * eta * r
        vals = {"r": r, "eta": eta, "xi1": 0.6, "xi2": 0.2}
        x = np.array([vals[n] for n in model.coord_names])
        want = -3.0 if kind is NearCollisionKind.NEWTONIAN_C2 else -1.0
        assert scalar_curvature(model, x, step=1e-6) * rho == pytest.approx(want, rel=1e-3)

    def test_model_finite_mixed_plane_limit(self):
        model = near_collision_metric(NearCollisionKind.NEWTONIAN_R3)
        r = 1.1

        def K_at(t):
            x = np.array([r, t, 0.2])
            u, v = plane_vectors(model, x, "eta_xi2")
            return sectional(model, x, u, v, step=min(1e-6, t / 50.0))

        limit = extrapolate_to_zero(K_at, t0=0.02, ratio=0.6, levels=5)
        assert limit == pytest.approx(-2.0 * math.sqrt(2.0 / 3.0) / r, abs=1e-4)
