import numpy as np
import pytest

from cwenofv.cweno import (
    CWenoConfig, blend, compute_p0, custom_tau, default_linear_weights,
    fixed_eps, max_valid_epsilon_exponent, nonlinear_weights, power_of_dx,
    tau_preset, validate_parameters, TAU_DECAY_ORDERS,
)
from cwenofv.errors import DegreeViolation, MismatchedCells, UnknownPreset
from cwenofv.poly import Poly, cell_1d, cell_average, from_physical_coeffs

rng = np.random.default_rng(1234)

CELL = cell_1d(0.0, 0.1)


def cwz3(m_hat=2.0, power=2, i0="opt"):
    return CWenoConfig(mode="cwz", d=default_linear_weights(2), power=power,
                       epsilon=power_of_dx(m_hat), lam=tau_preset("tau3_hat"), i0=i0)


class TestComputeP0:
    def test_all_equal(self):
        popt = from_physical_coeffs(1, 2, [1.0, 2.0, 3.0], CELL)
        lows = [Poly(1, 1, popt.coeffs[:2], CELL) for _ in range(2)]
        # forcing quadratic part to zero in the lows: P0 absorbs it
        d = (0.5, 0.25, 0.25)
        p0 = compute_p0(popt, lows, d)
        recomposed = d[0] * p0.coeffs
        for dk, p in zip(d[1:], lows):
            recomposed[:2] += dk * p.coeffs
        assert recomposed == pytest.approx(popt.coeffs, rel=1e-13)

    def test_direct_substitution(self):
        popt = Poly(1, 2, [0.0, 0.0, 1.0], CELL)  # xi^2
        p1 = Poly(1, 1, [0.0, 0.0], CELL)
        p0 = compute_p0(popt, [p1], (0.5, 0.5))
        assert p0.coeffs == pytest.approx([0.0, 0.0, 2.0])

    def test_conservation(self):
        # when all inputs share the central average, so does P0
        ubar = 0.37

        def with_average(p, target):
            c = p.coeffs.copy()
            c[0] += target - cell_average(p, CELL)
            return Poly(p.n, p.degree, c, CELL)

        popt = with_average(from_physical_coeffs(1, 2, rng.standard_normal(3), CELL), ubar)
        lows = [with_average(from_physical_coeffs(1, 1, rng.standard_normal(2), CELL), ubar)
                for _ in range(2)]
        p0 = compute_p0(popt, lows, (0.75, 0.125, 0.125))
        assert cell_average(p0, CELL) == pytest.approx(ubar, rel=1e-13)

    def test_degree_violation(self):
        popt = Poly(1, 2, np.ones(3), CELL)
        bad = Poly(1, 2, np.ones(3), CELL)
        with pytest.raises(DegreeViolation):
            compute_p0(popt, [bad], (0.5, 0.5))

    def test_mismatched_cells(self):
        popt = Poly(1, 2, np.ones(3), CELL)
        other = Poly(1, 1, np.ones(2), cell_1d(1.0, 0.1))
        with pytest.raises(MismatchedCells):
            compute_p0(popt, [other], (0.5, 0.5))


class TestWeights:
    def test_equal_indicators_give_linear_weights(self):
        cfg = cwz3()
        ws = nonlinear_weights(cfg, [0.3, 0.3, 0.3], 0.01)
        assert ws.omega == pytest.approx(cfg.d, rel=1e-14)

    def test_zero_tau_gives_linear_weights(self):
        cfg = cwz3()
        # indicators chosen so lambda . I = 0
        ws = nonlinear_weights(cfg, [0.2, 0.1, 0.3], 0.01)
        assert ws.tau == pytest.approx(0.0, abs=1e-16)
        assert ws.omega == pytest.approx(cfg.d, rel=1e-14)

    def test_normalization_and_box(self):
        for mode in ("cw", "cwz"):
            cfg = CWenoConfig(mode=mode, d=default_linear_weights(3), power=2,
                              epsilon=power_of_dx(2),
                              lam=tau_preset("tau5_hat") if mode == "cwz" else None)
            for _ in range(200):
                I = rng.uniform(0, 10, size=4)
                ws = nonlinear_weights(cfg, I, rng.uniform(1e-3, 0.1))
                assert abs(ws.omega.sum() - 1.0) <= 1e-14
                assert np.all(ws.omega >= 0) and np.all(ws.omega <= 1)
                assert np.all(np.isfinite(ws.omega))

    def test_cw_scale_invariance(self):
        cfg = CWenoConfig(mode="cw", d=(0.75, 0.125, 0.125), power=2,
                          epsilon=fixed_eps(1e-6))
        I = np.array([0.01, 0.5, 0.002])
        w1 = nonlinear_weights(cfg, I, 0.01).omega
        s = 37.0
        cfg2 = CWenoConfig(mode="cw", d=(0.75, 0.125, 0.125), power=2,
                           epsilon=fixed_eps(1e-6 * s))
        w2 = nonlinear_weights(cfg2, I * s, 0.01).omega
        assert w2 == pytest.approx(w1, rel=1e-13)

    def test_cwz_scale_invariance(self):
        # scaling I and eps by a common factor scales tau equally and
        # leaves the weights unchanged
        cfg = cwz3()
        I = np.array([0.01, 0.5, 0.002])
        w1 = nonlinear_weights(cfg, I, 0.05).omega
        s = 37.0
        eps = cfg.epsilon(0.05) * s
        cfg2 = CWenoConfig(mode="cwz", d=cfg.d, power=2, epsilon=fixed_eps(eps),
                           lam=cfg.lam)
        w2 = nonlinear_weights(cfg2, I * s, 0.05).omega
        assert w2 == pytest.approx(w1, rel=1e-13)

    def test_critical_point_magnitudes(self):
        # order-3 blend at an order-1 critical point, dx = 5e-2, l=2, m=2:
        # the indicators follow the quartic expansion terms, tau ~ 1.4e-3
        # and max|omega - d| ~ 1.7e-2
        u2 = -11.83414388347792  # second derivative at the critical point
        dx = 5e-2
        I1 = 0.25 * u2**2 * dx**4
        I0 = 13.0 / 12.0 * u2**2 * dx**4
        ws = nonlinear_weights(cwz3(), [I0, I1, I1], dx)
        assert ws.tau == pytest.approx(1.4e-3, rel=0.1)
        assert np.max(np.abs(ws.omega - np.array(cwz3().d))) == pytest.approx(1.7e-2, rel=0.12)


class TestResidualExpansion:
    def test_p0_indicator_expansion_coefficient(self):
        # for smooth data the residual candidate's indicator expands as
        # B1 + (5/12 u'u''' + 13/(12 d0^2) u''^2) dx^4 + ...
        from cwenofv.poly import StencilData, fit_constrained_ls
        from cwenofv.smoothness import bm_reference, build_system, indicator

        TWO_PI = 2 * np.pi
        d1 = TWO_PI * np.cos(0.7)
        d2 = -TWO_PI**2 * np.sin(0.7)
        d3 = -TWO_PI**3 * np.cos(0.7)
        F = lambda x: -np.cos(TWO_PI * x + 0.7) / TWO_PI

        def interp(offsets, dx, deg):
            cells = [cell_1d(o * dx, dx) for o in offsets]
            vals = np.array([(F(o * dx + dx / 2) - F(o * dx - dx / 2)) / dx
                             for o in offsets])
            st = StencilData(cells=cells, values=vals, central=list(offsets).index(0))
            return fit_constrained_ls(st, deg)

        for d0 in (0.5, 0.75):
            d = (d0, (1 - d0) / 2, (1 - d0) / 2)
            dx = 2e-3
            popt = interp([-1, 0, 1], dx, 2)
            p0 = compute_p0(popt, [interp([-1, 0], dx, 1), interp([0, 1], dx, 1)], d)
            got = (indicator(p0, build_system(1, 2)) - bm_reference(1, (d1,), dx)) / dx**4
            expect = 5 / 12 * d1 * d3 + 13 / (12 * d0**2) * d2**2
            assert got == pytest.approx(expect, rel=1e-3)


class TestTauPresets:
    def test_vectors(self):
        assert tau_preset("tau3_hat") == (-2.0, 1.0, 1.0)
        assert tau_preset("tau5_hat") == (-6.0, 1.0, 4.0, 1.0)
        assert tau_preset("tau7_hat") == (0.0, -1.0, -3.0, 3.0, 1.0)
        assert tau_preset("tau9_hat") == (-5.0, 1.0, 3.0, -3.0, 3.0, 1.0)
        assert tau_preset("tau11_hat") == (-210.0, 0.0, 36.0, 126.0, 46.0, 1.0, 1.0)
        assert tau_preset("tau3_2d") == (-4.0, 1.0, 1.0, 1.0, 1.0)
        assert tau_preset("tau3_2d_b") == (0.0, 1.0, -1.0, 1.0, -1.0)
        assert tau_preset("db3") == (0.0, 1.0, -1.0)
        assert tau_preset("db5") == (0.0, 1.0, 0.0, -1.0)

    def test_zero_sum(self):
        for name in TAU_DECAY_ORDERS:
            assert sum(tau_preset(name)) == pytest.approx(0.0, abs=1e-14)

    def test_unknown(self):
        with pytest.raises(UnknownPreset):
            tau_preset("tau42")
        with pytest.raises(UnknownPreset):
            tau_preset("tau5_hat", m=2)

    def test_custom(self):
        assert custom_tau([1, -2, 1]) == (1.0, -2.0, 1.0)
        with pytest.raises(ValueError):
            custom_tau([1.0, 1.0])


class TestBlend:
    def test_linear_weight_blend_recovers_optimal(self):
        d = (0.75, 0.125, 0.125)
        popt = from_physical_coeffs(1, 2, rng.standard_normal(3), CELL)
        lows = [from_physical_coeffs(1, 1, rng.standard_normal(2), CELL) for _ in range(2)]
        p0 = compute_p0(popt, lows, d)
        ws = nonlinear_weights(cwz3(), [0.1, 0.1, 0.1], 0.01)  # omega == d
        rec = blend([p0] + lows, ws)
        assert rec.coeffs == pytest.approx(popt.coeffs, rel=1e-13, abs=1e-15)

    def test_degenerate_weights(self):
        p0 = Poly(1, 2, [1.0, 2.0, 3.0], CELL)
        p1 = Poly(1, 1, [4.0, 5.0], CELL)
        ws = nonlinear_weights(cwz3(), [0, 1e9, 1e9], 1.0)
        # omega_0 ~ 1 when the others oscillate
        rec = blend([p0, p1, p1], ws)
        assert rec.coeffs == pytest.approx(p0.coeffs, rel=1e-6)

    def test_average_preserved(self):
        polys = [from_physical_coeffs(1, 2, rng.standard_normal(3), CELL)]
        polys += [from_physical_coeffs(1, 1, rng.standard_normal(2), CELL) for _ in range(2)]
        ws = nonlinear_weights(cwz3(), rng.uniform(0, 1, 3), 0.01)
        rec = blend(polys, ws)
        expect = sum(w * cell_average(p, CELL) for w, p in zip(ws.omega, polys))
        assert cell_average(rec, CELL) == pytest.approx(expect, rel=1e-13)


# printed sensitivity-bound table: max m_hat per (r, power)
SENSITIVITY_TABLE = {
    2: [3, 3, 3, 3, 3, 3],
    3: [5, 5, 5, 5, 5, 5],
    4: [6, 7, 7, 7, 7, 7],
    5: [5, 6, 7, 7, 7, 7],
    6: [5, 7, 7, 8, 8, 8],
}
THETA_BY_R = {2: 4, 3: 6, 4: 7, 5: 8, 6: 9}


class TestValidator:
    def test_order7_examples(self):
        # r=4: M=3, G=6, g=3, theta=7
        ok, _ = validate_parameters(3, 6, 3, 1, 6, 7)
        assert ok
        ok, why = validate_parameters(3, 6, 3, 1, 7, 7)
        assert not ok and why == "tau-margin"
        ok, _ = validate_parameters(3, 6, 3, 2, 7, 7)
        assert ok

    def test_order3_all_pass(self):
        for power in range(1, 7):
            for m_hat in range(0, 4):
                ok, _ = validate_parameters(1, 2, 1, power, m_hat, 4)
                assert ok

    def test_order9_power1(self):
        assert max_valid_epsilon_exponent(5, 1, 8) == 5

    def test_full_table(self):
        for r, row in SENSITIVITY_TABLE.items():
            for power in range(1, 7):
                assert max_valid_epsilon_exponent(r, power, THETA_BY_R[r]) == row[power - 1], \
                    f"r={r} power={power}"

    def test_m_hat_cap(self):
        ok, why = validate_parameters(1, 2, 1, 1, 4, 4)
        assert not ok and why == "m-hat-cap"
