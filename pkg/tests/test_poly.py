import numpy as np
import pytest

from cwenofv.errors import RankDeficient, StencilTooSmall
from cwenofv.poly import (
    CellGeometry, Poly, StencilData, cell_1d, cell_2d, cell_average,
    eval_poly, fit_constrained_ls, from_physical_coeffs, multi_indices,
    poly_dim, to_physical_coeffs,
)

rng = np.random.default_rng(20240901)


def random_poly(n, degree, cell=None, scale=1.0):
    if cell is None:
        cell = cell_1d(0.0, 1.0) if n == 1 else cell_2d((0.0, 0.0), 1.0, 1.0)
    return Poly(n, degree, scale * rng.standard_normal(poly_dim(n, degree)), cell)


def naive_eval(p, x):
    # independent oracle: plain python product/sum over monomials
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xi = (x - p.cell.center) / p.cell.extents
    total = 0.0
    for a, alpha in zip(p.coeffs, multi_indices(p.n, p.degree)):
        term = a
        for ax, e in enumerate(alpha):
            term *= xi[ax] ** e
    # note: intentionally no Horner structure anywhere
        total += term
    return total


def gauss_average(p, cell, npts=5):
    x, w = np.polynomial.legendre.leggauss(npts)
    x = 0.5 * x
    w = 0.5 * w
    if p.n == 1:
        pts = cell.center[0] + cell.extents[0] * x
        vals = np.array([naive_eval(p, [t]) for t in pts])
        return float(w @ vals)
    acc = 0.0
    for i in range(npts):
        for j in range(npts):
            pt = cell.center + cell.extents * np.array([x[i], x[j]])
            acc += w[i] * w[j] * naive_eval(p, pt)
    return acc


def uniform_stencil_1d(offsets, dx, values, center=0.0):
    cells = [cell_1d(center + o * dx, dx) for o in offsets]
    return StencilData(cells=cells, values=np.asarray(values, float),
                       central=list(offsets).index(0))


def patch_3x3(h, k, values):
    cells = []
    offs = [(-1, -1), (0, -1), (1, -1), (-1, 0), (0, 0), (1, 0), (-1, 1), (0, 1), (1, 1)]
    for ox, oy in offs:
        cells.append(cell_2d((ox * h, oy * k), h, k))
    return StencilData(cells=cells, values=np.asarray(values, float), central=4)


class TestEval:
    def test_constant(self):
        p = Poly(1, 0, [5.0], cell_1d(0.3, 0.2))
        assert eval_poly(p, [1.7]) == 5.0

    def test_identity_local(self):
        p = Poly(1, 1, [0.0, 1.0], cell_1d(0.0, 1.0))
        assert eval_poly(p, [0.5]) == 0.5

    def test_center_value_is_constant_coefficient(self):
        p = random_poly(2, 3, cell_2d((0.7, -0.3), 0.4, 0.9))
        assert eval_poly(p, p.cell.center) == p.coeffs[0]

    def test_matches_naive_oracle(self):
        for _ in range(20):
            p = random_poly(1, 4, cell_1d(rng.uniform(-1, 1), rng.uniform(0.1, 2)))
            x = rng.uniform(-2, 2, size=1)
            assert eval_poly(p, x) == pytest.approx(naive_eval(p, x), rel=1e-14)
        for _ in range(20):
            p = random_poly(2, 3, cell_2d(rng.uniform(-1, 1, 2), 0.7, 1.3))
            x = rng.uniform(-2, 2, size=2)
            assert eval_poly(p, x) == pytest.approx(naive_eval(p, x), rel=1e-13)


class TestCellAverage:
    def test_odd_moment_vanishes(self):
        dx = 0.37
        p = from_physical_coeffs(1, 1, [0.0, 1.0], cell_1d(0.0, dx))
        assert cell_average(p, p.cell) == pytest.approx(0.0, abs=1e-16)

    def test_quadratic_moment(self):
        dx = 0.37
        p = from_physical_coeffs(1, 2, [0.0, 0.0, 1.0], cell_1d(0.0, dx))
        assert cell_average(p, p.cell) == pytest.approx(dx**2 / 12, rel=1e-14)

    def test_2d_against_gauss(self):
        for _ in range(15):
            p = random_poly(2, 3, cell_2d(rng.uniform(-1, 1, 2), 0.8, 0.5))
            target = CellGeometry(rng.uniform(-1, 1, 2), rng.uniform(0.2, 1.5, 2))
            assert cell_average(p, target) == pytest.approx(
                gauss_average(p, target), rel=1e-13, abs=1e-15)


class TestFit:
    def test_constant_data(self):
        st = uniform_stencil_1d([-1, 0, 1], 0.1, [3.5, 3.5, 3.5])
        p = fit_constrained_ls(st, 2)
        assert p.coeffs == pytest.approx([3.5, 0, 0], abs=1e-13)

    def test_linear_reproduction(self):
        # averages of u(x) = x over three cells of width dx
        dx = 0.2
        st = uniform_stencil_1d([-1, 0, 1], dx, [-dx, 0.0, dx])
        p = fit_constrained_ls(st, 2)
        assert eval_poly(p, [0.13]) == pytest.approx(0.13, abs=1e-14)
        assert p.coeffs[2] == pytest.approx(0.0, abs=1e-13)

    def test_2d_matches_normal_equations(self):
        h, k = 0.3, 0.45
        vals = rng.standard_normal(9)
        st = patch_3x3(h, k, vals)
        p = fit_constrained_ls(st, 2)

        # oracle: explicit normal equations in the same zero-mean basis
        from cwenofv.poly import central_moments, monomial_averages
        base = st.cells[4]
        mom = central_moments(2, 2)
        A = np.array([(monomial_averages(base, c, 2) - mom)[1:] for c in st.cells])
        b = vals - vals[4]
        c = np.linalg.solve(A.T @ A, A.T @ b)
        expect = np.concatenate([[vals[4] - c @ mom[1:]], c])
        assert p.coeffs == pytest.approx(expect, rel=1e-11, abs=1e-13)

    def test_polynomial_reproduction_2d(self):
        q = random_poly(2, 2, cell_2d((0.0, 0.0), 0.25, 0.4))
        st = patch_3x3(0.25, 0.4, [cell_average(q, c) for c in patch_3x3(0.25, 0.4, np.zeros(9)).cells])
        p = fit_constrained_ls(st, 2)
        assert p.coeffs == pytest.approx(q.coeffs, rel=1e-11, abs=1e-12)

    def test_conservation(self):
        for _ in range(10):
            vals = rng.standard_normal(5)
            st = uniform_stencil_1d([-2, -1, 0, 1, 2], 0.13, vals)
            p = fit_constrained_ls(st, 2)
            u0 = vals[2]
            assert abs(cell_average(p, st.cells[2]) - u0) <= 1e-14 * abs(u0) + 1e-14

    def test_affine_invariance(self):
        vals = rng.standard_normal(3)
        st0 = uniform_stencil_1d([-1, 0, 1], 0.2, vals)
        st1 = uniform_stencil_1d([-1, 0, 1], 0.2, vals + 7.0)
        p0 = fit_constrained_ls(st0, 2)
        p1 = fit_constrained_ls(st1, 2)
        x = np.array([0.07])
        assert eval_poly(p1, x) == pytest.approx(eval_poly(p0, x) + 7.0, rel=1e-13)

    def test_scaling_covariance(self):
        vals = rng.standard_normal(3)
        for s in (1.0, 10.0, 0.01):
            st = uniform_stencil_1d([-1, 0, 1], 0.2 * s, vals)
            p = fit_constrained_ls(st, 2)
            assert eval_poly(p, [0.1 * 0.2 * s]) == pytest.approx(
                eval_poly(fit_constrained_ls(uniform_stencil_1d([-1, 0, 1], 0.2, vals), 2),
                          [0.1 * 0.2]), rel=1e-12)

    def test_stencil_too_small(self):
        st = uniform_stencil_1d([-1, 0], 0.1, [0.0, 1.0])
        with pytest.raises(StencilTooSmall):
            fit_constrained_ls(st, 2)

    def test_rank_deficient(self):
        # four collinear cells cannot determine an x-slope in 2D
        cells = [cell_2d((0.0, o * 0.1), 0.1, 0.1) for o in (-1, 0, 1, 2)]
        st = StencilData(cells=cells, values=rng.standard_normal(4), central=1)
        with pytest.raises(RankDeficient):
            fit_constrained_ls(st, 1)


class TestPhysicalBasis:
    def test_round_trip(self):
        for n, deg in ((1, 4), (2, 3)):
            cell = cell_1d(0.4, 0.3) if n == 1 else cell_2d((0.4, -0.2), 0.3, 0.7)
            p = random_poly(n, deg, cell)
            phys = to_physical_coeffs(p)
            back = from_physical_coeffs(n, deg, phys, cell)
            assert back.coeffs == pytest.approx(p.coeffs, rel=1e-13, abs=1e-13)

    def test_physical_agrees_pointwise(self):
        p = random_poly(1, 3, cell_1d(0.2, 0.5))
        phys = to_physical_coeffs(p)
        x = 0.37
        direct = sum(b * x**k for k, b in enumerate(phys))
        assert eval_poly(p, [x]) == pytest.approx(direct, rel=1e-12)
