"""Benchmark catalogue: initial data, domains, boundary rules, defaults."""

import numpy as np

from .physics import Euler1D, Euler2D, LinearAdvection1D
from .solver import (BoundarySpec1D, BoundarySpec2D, Grid1D, Grid2D, StepRegion,
                     dirichlet, dmr_top, field_1d, field_2d, freeflow, periodic,
                     reflective, symmetry_axis)

GAMMA = 1.4


# -- 1D initial data ----------------------------------------------------------

def lf_datum(x):
    """Low-frequency advection profile."""
    return np.sin(2 * np.pi * x)


def lf_datum_antideriv(x):
    return -np.cos(2 * np.pi * x) / (2 * np.pi)


def hf_datum(x):
    """High-frequency advection profile."""
    return np.sin(2 * np.pi * x) + np.sin(30 * np.pi * x) * np.exp(-80.0 * x**2)


JS_A = 0.5
JS_Z = -0.7
JS_DELTA = 0.005
JS_ALPHA = 10.0
JS_BETA = np.log(2.0) / (36.0 * JS_DELTA**2)


def jiang_shu_datum(x):
    """Composite profile: Gaussian, square, triangle and half-ellipse."""
    x = np.asarray(x, dtype=float)

    def G(x, b, z):
        return np.exp(-b * (x - z) ** 2)

    def F(x, a, c):
        return np.sqrt(np.maximum(1.0 - a**2 * (x - c) ** 2, 0.0))

    out = np.zeros_like(x)
    m = (x >= -0.8) & (x <= -0.6)
    out[m] = (G(x[m], JS_BETA, JS_Z - JS_DELTA) + G(x[m], JS_BETA, JS_Z + JS_DELTA)
              + 4.0 * G(x[m], JS_BETA, JS_Z)) / 6.0
    m = (x >= -0.4) & (x <= -0.2)
    out[m] = 1.0
    m = (x >= 0.0) & (x <= 0.2)
    out[m] = 1.0 - np.abs(10.0 * (x[m] - 0.1))
    m = (x >= 0.4) & (x <= 0.6)
    out[m] = (F(x[m], JS_ALPHA, JS_A - JS_DELTA) + F(x[m], JS_ALPHA, JS_A + JS_DELTA)
              + 4.0 * F(x[m], JS_ALPHA, JS_A)) / 6.0
    return out


def double_step_averages(centers, dx, lo=0.25, hi=0.75):
    """Exact cell averages of the indicator of [lo, hi]."""
    left = np.asarray(centers) - dx / 2
    right = left + dx
    overlap = np.minimum(right, hi) - np.maximum(left, lo)
    return np.clip(overlap, 0.0, None) / dx


SHU_OSHER_LEFT = (3.857143, 2.629369, 10.333333)


def shu_osher_init(model: Euler1D, x):
    rho = np.where(x < -4.0, SHU_OSHER_LEFT[0], 1.0 + 0.2 * np.sin(5.0 * x))
    u = np.where(x < -4.0, SHU_OSHER_LEFT[1], 0.0)
    p = np.where(x < -4.0, SHU_OSHER_LEFT[2], 1.0)
    return model.conserved(rho, u, p)


# -- 2D initial data ----------------------------------------------------------

VORTEX_BETA = 5.0


def vortex_primitives(x, y, beta=VORTEX_BETA, gamma=GAMMA):
    r2 = x**2 + y**2
    dT = -(gamma - 1.0) * beta**2 / (8.0 * gamma * np.pi**2) * np.exp(1.0 - r2)
    T = 1.0 + dT
    rho = T ** (1.0 / (gamma - 1.0))
    p = T ** (gamma / (gamma - 1.0))
    du = -beta / (2.0 * np.pi) * np.exp(0.5 * (1.0 - r2)) * y
    dv = beta / (2.0 * np.pi) * np.exp(0.5 * (1.0 - r2)) * x
    return rho, 1.0 + du, 1.0 + dv, p


FFS_STATE = (GAMMA, 3.0, 0.0, 1.0)

DMR_POST = (8.0, 8.25 * np.sqrt(3.0) / 2.0, -8.25 / 2.0, 116.5)
DMR_PRE = (1.4, 0.0, 0.0, 1.0)

SB_STATE_A = (11.0 / 3.0, 2.7136021011998722, 0.0, 10.0)  # shocked inflow
SB_STATE_B = (0.1, 0.0, 0.0, 1.0)                          # bubble
SB_STATE_C = (1.0, 0.0, 0.0, 1.0)                          # ambient
SB_CENTER = (0.3, 0.0)
SB_RADIUS = 0.2


def gauss_averages_2d(fn, grid: Grid2D, npts=5):
    """(J, ny+2g, nx+2g) Gauss cell averages of primitive-producing fn(x, y)."""
    xq, wq = np.polynomial.legendre.leggauss(npts)
    g = grid.ghost
    xc = grid.xcenters(np.arange(-g, grid.nx + g))
    yc = grid.ycenters(np.arange(-g, grid.ny + g))
    W = 0.25 * np.outer(wq, wq)
    X = xc[None, :, None, None] + 0.5 * grid.h * xq[None, None, :, None]
    Y = yc[:, None, None, None] + 0.5 * grid.k * xq[None, None, None, :]
    vals = fn(X, Y)  # (J, ny+2g, nx+2g, q, q)
    return np.einsum("cjiab,ab->cji", vals, W)


# -- benchmark setups ---------------------------------------------------------

def setup_advection(datum, antideriv, N, ghost):
    grid = Grid1D(n=N, dx=1.0 / N, x0=-0.5, ghost=ghost)
    f = field_1d(grid, 1)
    x = grid.centers()
    if antideriv is not None:
        f.set_interior(((antideriv(x + grid.dx / 2) - antideriv(x - grid.dx / 2))
                        / grid.dx)[None, :])
    else:
        from .recon1d import gauss_cell_averages
        f.set_interior(gauss_cell_averages(datum, x, grid.dx)[None, :])
    return f, LinearAdvection1D(1.0), BoundarySpec1D(periodic(), periodic())


def setup_jiang_shu(N, ghost):
    grid = Grid1D(n=N, dx=2.0 / N, x0=-1.0, ghost=ghost)
    f = field_1d(grid, 1)
    from .recon1d import gauss_cell_averages
    f.set_interior(gauss_cell_averages(jiang_shu_datum, grid.centers(), grid.dx)[None, :])
    return f, LinearAdvection1D(1.0), BoundarySpec1D(periodic(), periodic())


def setup_tv_step(N, ghost):
    grid = Grid1D(n=N, dx=1.0 / N, x0=0.0, ghost=ghost)
    f = field_1d(grid, 1)
    f.set_interior(double_step_averages(grid.centers(), grid.dx)[None, :])
    return f, LinearAdvection1D(1.0), BoundarySpec1D(periodic(), periodic())


def setup_shu_osher(N, ghost):
    grid = Grid1D(n=N, dx=10.0 / N, x0=-5.0, ghost=ghost)
    model = Euler1D(GAMMA)
    f = field_1d(grid, 3)
    from .recon1d import gauss_cell_averages
    x = grid.centers()
    xq, wq = np.polynomial.legendre.leggauss(5)
    pts = x[:, None] + 0.5 * grid.dx * xq[None, :]
    U = shu_osher_init(model, pts)  # (3, n, 5)
    f.set_interior(0.5 * (U @ wq))
    return f, model, BoundarySpec1D(freeflow(), freeflow())


def setup_vortex(N, ghost=2):
    grid = Grid2D(nx=N, ny=N, h=10.0 / N, k=10.0 / N, x0=-5.0, y0=-5.0, ghost=ghost)
    model = Euler2D(GAMMA)

    def fn(X, Y):
        return model.conserved(*vortex_primitives(X, Y))

    f = field_2d(grid, 4)
    f.data[:] = gauss_averages_2d(fn, grid)
    bc = BoundarySpec2D(periodic(), periodic(), periodic(), periodic())
    return f, model, bc


def setup_ffs(nx=480, ny=160, ghost=2):
    grid = Grid2D(nx=nx, ny=ny, h=3.0 / nx, k=1.0 / ny, x0=0.0, y0=0.0, ghost=ghost)
    model = Euler2D(GAMMA)
    f = field_2d(grid, 4)
    f.data[:] = model.conserved(*FFS_STATE)[:, None, None]
    i_start = int(round(0.6 / grid.h))
    j_top = int(round(0.2 / grid.k))
    f.step = StepRegion(i_start=i_start, j_top=j_top)
    bc = BoundarySpec2D(west=dirichlet(model.conserved(*FFS_STATE)),
                        east=freeflow(), south=reflective(), north=reflective())
    return f, model, bc


def setup_dmr(nx=640, ny=200, ghost=2):
    grid = Grid2D(nx=nx, ny=ny, h=3.5 / nx, k=1.0 / ny, x0=0.0, y0=0.0, ghost=ghost)
    model = Euler2D(GAMMA)
    post = model.conserved(*DMR_POST)
    pre = model.conserved(*DMR_PRE)
    f = field_2d(grid, 4)
    X, Y = np.meshgrid(grid.xcenters(np.arange(-ghost, nx + ghost)),
                       grid.ycenters(np.arange(-ghost, ny + ghost)))
    shocked = X < 1.0 / 6.0 + Y / np.sqrt(3.0)
    f.data[:] = np.where(shocked[None], post[:, None, None], pre[:, None, None])
    bc = BoundarySpec2D(west=dirichlet(post), east=freeflow(),
                        south=reflective(), north=dmr_top(post, pre))
    return f, model, bc


def setup_shock_bubble(nx=680, ny=200, ghost=2, half=True):
    """Shock hitting a light round bubble; by default the upper half domain
    with a symmetry axis at y = 0 (centres anchored so that half and full
    grids carry bitwise-identical coordinates)."""
    h = 1.7 / nx
    model = Euler2D(GAMMA)
    if half:
        k = 0.5 / ny
        grid = Grid2D(nx=nx, ny=ny, h=h, k=k, x0=-0.1, y0=0.0, ghost=ghost,
                      y_ref=0.0, j_ref=0)
        south = symmetry_axis()
    else:
        k = 0.5 / (ny // 2)
        grid = Grid2D(nx=nx, ny=ny, h=h, k=k, x0=-0.1, y0=-0.5, ghost=ghost,
                      y_ref=0.0, j_ref=ny // 2)
        south = reflective()
    f = field_2d(grid, 4)
    X, Y = np.meshgrid(grid.xcenters(np.arange(-ghost, nx + ghost)),
                       grid.ycenters(np.arange(-ghost, ny + ghost)))
    state = np.where(X < 0.0, np.asarray(model.conserved(*SB_STATE_A))[:, None, None],
                     np.asarray(model.conserved(*SB_STATE_C))[:, None, None])
    bubble = (X - SB_CENTER[0]) ** 2 + (Y - SB_CENTER[1]) ** 2 < SB_RADIUS**2
    state = np.where(bubble[None], np.asarray(model.conserved(*SB_STATE_B))[:, None, None],
                     state)
    f.data[:] = state
    bc = BoundarySpec2D(west=dirichlet(model.conserved(*SB_STATE_A)),
                        east=freeflow(), south=south, north=reflective())
    return f, model, bc


BENCHMARKS = ("advect-lf", "advect-hf", "jiang-shu", "tv-step", "crit-point",
              "shu-osher", "vortex", "ffs", "dmr", "shock-bubble",
              "recon-accuracy-2d")

DEFAULT_FINAL_TIME = {
    "advect-lf": 1.0, "advect-hf": 1.0, "jiang-shu": 8.0, "tv-step": 1.0,
    "shu-osher": 1.8, "vortex": 10.0, "ffs": 4.0, "dmr": 0.2, "shock-bubble": 0.4,
}

DESK_GRIDS = {
    "advect-lf": (50, 100, 200, 400, 800),
    "advect-hf": (100, 200, 400, 800, 1600),
    "jiang-shu": (400,),
    "tv-step": (100, 200, 400, 800, 1600),
    "crit-point": (20, 40, 80, 160),
    "shu-osher": (800,),
    "vortex": (50, 100, 200),
    "ffs": ((480, 160),),
    "dmr": ((640, 200),),
    "shock-bubble": ((680, 200),),
    "recon-accuracy-2d": (20, 40, 80, 160),
}

# paper-scale resolutions, behind an explicit flag
FULL_GRIDS = {
    "ffs": ((3480, 1280),),
    "dmr": ((5120, 1600),),
    "shock-bubble": ((2720, 800),),
}
