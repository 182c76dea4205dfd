"""Third-order 2D CWENO/CWENOZ on uniform Cartesian grids.

One degree-2 polynomial over the 3x3 patch is blended with four degree-1
sector polynomials (NE, SE, SW, NW); each sector fits the central average
exactly and its three neighbours in the least-squares sense.
"""

from dataclasses import dataclass

import numpy as np

from .cweno import (CWenoConfig, blend, compute_p0, default_linear_weights,
                    nonlinear_weights, power_of_dx, tau_preset)
from .errors import InsufficientGhosts
from .poly import StencilData, cell_2d, fit_constrained_ls
from .smoothness import build_system, indicator

# patch offsets (ox, oy), row-major from the south-west corner
PATCH_OFFSETS = ((-1, -1), (0, -1), (1, -1),
                 (-1, 0), (0, 0), (1, 0),
                 (-1, 1), (0, 1), (1, 1))

SECTOR_OFFSETS = {
    "NE": ((0, 0), (0, 1), (1, 0), (1, 1)),
    "SE": ((0, 0), (0, -1), (1, 0), (1, -1)),
    "SW": ((0, 0), (0, -1), (-1, 0), (-1, -1)),
    "NW": ((0, 0), (0, 1), (-1, 0), (-1, 1)),
}
SECTOR_ORDER = ("NE", "SE", "SW", "NW")

DEFAULT_PARAMS_2D = (2, 2)  # power, m_hat


def config_2d(mode="cwz", power=None, m_hat=None, eps=None, i0="opt",
              tau="tau3_2d", d=None) -> CWenoConfig:
    if power is None:
        power = DEFAULT_PARAMS_2D[0]
    if m_hat is None:
        m_hat = DEFAULT_PARAMS_2D[1]
    lam = None
    if mode == "cwz":
        lam = tau_preset(tau, m=4) if isinstance(tau, str) else tuple(tau)
    epsilon = eps if eps is not None else power_of_dx(m_hat)
    return CWenoConfig(mode=mode, d=d or default_linear_weights(4), power=power,
                       epsilon=epsilon, lam=lam, i0=i0)


@dataclass
class Recon2DScheme:
    config: CWenoConfig

    def __post_init__(self):
        if len(self.config.d) != 5:
            raise ValueError("the 2D order-3 blend takes five linear weights")
        self.system = build_system(2, 2)

    @property
    def order(self):
        return 3


def scheme_2d(**kwargs) -> Recon2DScheme:
    return Recon2DScheme(config=config_2d(**kwargs))


@dataclass
class ScalarField2D:
    """Cell averages on a uniform 2D grid with ghost layers.

    values has shape (ny + 2*ghost, nx + 2*ghost), indexed [iy, ix].
    """

    values: np.ndarray
    h: float
    k: float
    ghost: int
    x0: float = 0.0
    y0: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise ValueError("2D field expects a 2D value array")

    @property
    def nx(self):
        return self.values.shape[1] - 2 * self.ghost

    @property
    def ny(self):
        return self.values.shape[0] - 2 * self.ghost

    def center(self, i, j):
        return np.array([self.x0 + (i + 0.5) * self.h, self.y0 + (j + 0.5) * self.k])

    def cell(self, i, j):
        return cell_2d(self.center(i, j), self.h, self.k)

    def patch_values(self, i, j, offsets):
        g = self.ghost
        return np.array([self.values[g + j + oy, g + i + ox] for ox, oy in offsets])


def fit_patch(field: ScalarField2D, i, j):
    """Optimal (degree-2) and sector (degree-1) fits for interior cell (i, j)."""
    if field.ghost < 1:
        raise InsufficientGhosts("the 3x3 patch needs one ghost layer")
    base = field.cell(i, j)

    def cells_for(offsets):
        return [cell_2d(base.center + np.array([ox * field.h, oy * field.k]), field.h, field.k)
                for ox, oy in offsets]

    st = StencilData(cells=cells_for(PATCH_OFFSETS),
                     values=field.patch_values(i, j, PATCH_OFFSETS), central=4)
    popt = fit_constrained_ls(st, 2)
    sectors = {}
    for name in SECTOR_ORDER:
        offs = SECTOR_OFFSETS[name]
        st = StencilData(cells=cells_for(offs),
                         values=field.patch_values(i, j, offs), central=0)
        sectors[name] = fit_constrained_ls(st, 1)
    return popt, sectors


def reconstruct_cell_2d(scheme: Recon2DScheme, field: ScalarField2D, i, j,
                        with_weights=False):
    """Blend polynomial for interior cell (i, j)."""
    cfg = scheme.config
    popt, sectors = fit_patch(field, i, j)
    lows = [sectors[name] for name in SECTOR_ORDER]
    p0 = compute_p0(popt, lows, cfg.d)
    I_sec = [indicator(p, scheme.system) for p in lows]
    I_opt = indicator(popt, scheme.system)
    I0 = I_opt if cfg.i0 == "opt" else indicator(p0, scheme.system)
    rho = float(np.hypot(field.h, field.k))
    ws = nonlinear_weights(cfg, [I0] + I_sec, rho)
    rec = blend([p0] + lows, ws)
    if with_weights:
        return rec, ws
    return rec


def reconstruct_field_2d(scheme: Recon2DScheme, field: ScalarField2D):
    """Blend polynomials for all interior cells, row-major list of lists."""
    return [[reconstruct_cell_2d(scheme, field, i, j) for i in range(field.nx)]
            for j in range(field.ny)]


_GAUSS2 = 1.0 / (2.0 * np.sqrt(3.0))


def face_gauss_points(cell, side):
    """Two-point Gauss rule on one face; weights sum to the face length."""
    cx, cy = cell.center
    h, k = cell.extents
    if side in ("E", "W"):
        x = cx + (0.5 if side == "E" else -0.5) * h
        pts = np.array([[x, cy - _GAUSS2 * k], [x, cy + _GAUSS2 * k]])
        w = np.array([0.5 * k, 0.5 * k])
    elif side in ("N", "S"):
        y = cy + (0.5 if side == "N" else -0.5) * k
        pts = np.array([[cx - _GAUSS2 * h, y], [cx + _GAUSS2 * h, y]])
        w = np.array([0.5 * h, 0.5 * h])
    else:
        raise ValueError(f"unknown side {side!r}")
    return pts, w


def field_from_function_2d(u, nx, ny, h, k, ghost, x0=0.0, y0=0.0, npts=5):
    """Field with Gauss-quadrature cell averages of u(x, y)."""
    xq, wq = np.polynomial.legendre.leggauss(npts)
    ix = np.arange(-ghost, nx + ghost)
    iy = np.arange(-ghost, ny + ghost)
    xc = x0 + (ix + 0.5) * h
    yc = y0 + (iy + 0.5) * k
    X = xc[None, :, None, None] + 0.5 * h * xq[None, None, :, None]
    Y = yc[:, None, None, None] + 0.5 * k * xq[None, None, None, :]
    W = 0.25 * np.outer(wq, wq)
    vals = np.einsum("jiab,ab->ji", u(X, Y), W)
    return ScalarField2D(values=vals, h=h, k=k, ghost=ghost, x0=x0, y0=y0)


def tau_study_2d(scheme: Recon2DScheme, u, center, dxs, anis=1.0):
    """Global indicator tau of the cell at `center` over a grid-size sweep."""
    taus = []
    for dx in dxs:
        h = float(dx)
        k = float(dx) * anis
        f = field_from_function_2d(u, 1, 1, h, k, ghost=1,
                                   x0=center[0] - 0.5 * h, y0=center[1] - 0.5 * k)
        _, ws = reconstruct_cell_2d(scheme, f, 0, 0, with_weights=True)
        taus.append(ws.tau)
    return np.array(taus)
