"""Semidiscrete finite-volume solver: boundary rules, flux assembly and
SSPRK3 / five-stage-free RK5 time integration with CFL control."""

from dataclasses import dataclass

import numpy as np

from . import kernels2d
from .errors import InadmissibleState, SimulationBlowup, UnsupportedCombination
from .physics import llf_flux
from .recon1d import Recon1DScheme, _apply_operator, batch_reconstruct
from .recon2d import Recon2DScheme


# -- grids and fields ---------------------------------------------------------

@dataclass
class Grid1D:
    n: int
    dx: float
    x0: float = 0.0
    ghost: int = 3

    def centers(self):
        return self.x0 + (np.arange(self.n) + 0.5) * self.dx


@dataclass
class Grid2D:
    nx: int
    ny: int
    h: float
    k: float
    x0: float = 0.0
    y0: float = 0.0
    ghost: int = 2
    # optional exact anchoring of the centre formula: when (ref, index)
    # anchors are given, centers are ref + (i - i_ref + 0.5) * spacing,
    # which makes mirror-symmetric grids bitwise symmetric
    x_ref: float = None
    i_ref: int = 0
    y_ref: float = None
    j_ref: int = 0

    def xcenters(self, idx=None):
        i = np.arange(self.nx) if idx is None else np.asarray(idx)
        if self.x_ref is None:
            return self.x0 + (i + 0.5) * self.h
        return self.x_ref + (i - self.i_ref + 0.5) * self.h

    def ycenters(self, idx=None):
        j = np.arange(self.ny) if idx is None else np.asarray(idx)
        if self.y_ref is None:
            return self.y0 + (j + 0.5) * self.k
        return self.y_ref + (j - self.j_ref + 0.5) * self.k


@dataclass
class Field1D:
    grid: Grid1D
    data: np.ndarray  # (J, n + 2*ghost)
    t: float = 0.0

    @property
    def nvars(self):
        return self.data.shape[0]

    def interior(self):
        g = self.grid.ghost
        return self.data[:, g: g + self.grid.n]

    def set_interior(self, values):
        g = self.grid.ghost
        self.data[:, g: g + self.grid.n] = values


@dataclass
class StepRegion:
    """Rectangular solid block: interior cells with ix >= i_start, iy < j_top."""

    i_start: int
    j_top: int


@dataclass
class Field2D:
    grid: Grid2D
    data: np.ndarray  # (J, ny + 2*ghost, nx + 2*ghost)
    t: float = 0.0
    step: StepRegion = None

    @property
    def nvars(self):
        return self.data.shape[0]

    def interior(self):
        g = self.grid.ghost
        return self.data[:, g: g + self.grid.ny, g: g + self.grid.nx]

    def set_interior(self, values):
        g = self.grid.ghost
        self.data[:, g: g + self.grid.ny, g: g + self.grid.nx] = values

    def fluid_mask(self):
        """Boolean interior mask, False inside the solid step."""
        mask = np.ones((self.grid.ny, self.grid.nx), dtype=bool)
        if self.step is not None:
            mask[: self.step.j_top, self.step.i_start:] = False
        return mask


def field_1d(grid: Grid1D, nvars) -> Field1D:
    return Field1D(grid=grid, data=np.zeros((nvars, grid.n + 2 * grid.ghost)))


def field_2d(grid: Grid2D, nvars) -> Field2D:
    return Field2D(grid=grid, data=np.zeros(
        (nvars, grid.ny + 2 * grid.ghost, grid.nx + 2 * grid.ghost)))


# -- boundary rules -----------------------------------------------------------

@dataclass(frozen=True)
class BCRule:
    kind: str          # periodic | freeflow | reflective | dirichlet |
                       # dmr_top | symmetry
    state: tuple = None
    aux: tuple = None  # extra parameters (e.g. shock states for dmr_top)


def periodic():
    return BCRule("periodic")


def freeflow():
    return BCRule("freeflow")


def reflective():
    return BCRule("reflective")


def symmetry_axis():
    return BCRule("symmetry")


def dirichlet(state):
    return BCRule("dirichlet", state=tuple(float(s) for s in state))


def dmr_top(post, pre):
    return BCRule("dmr_top", state=tuple(float(s) for s in post),
                  aux=tuple(float(s) for s in pre))


@dataclass(frozen=True)
class BoundarySpec1D:
    left: BCRule
    right: BCRule

    def __post_init__(self):
        if (self.left.kind == "periodic") != (self.right.kind == "periodic"):
            raise UnsupportedCombination("periodic boundaries come in pairs")


@dataclass(frozen=True)
class BoundarySpec2D:
    west: BCRule
    east: BCRule
    south: BCRule
    north: BCRule

    def __post_init__(self):
        for a, b in ((self.west, self.east), (self.south, self.north)):
            if (a.kind == "periodic") != (b.kind == "periodic"):
                raise UnsupportedCombination("periodic boundaries come in pairs")


def _velocity_component(model, axis):
    comps = getattr(model, "ndim", 1)
    if model.nvars == 1:
        return None  # scalar field: mirror without sign flip
    return 1 + axis if comps >= axis + 1 else None


def apply_boundary_1d(field: Field1D, bc: BoundarySpec1D, model):
    g = field.grid.ghost
    n = field.grid.n
    d = field.data
    for side, rule in (("left", bc.left), ("right", bc.right)):
        if rule.kind == "periodic":
            if side == "left":
                d[:, :g] = d[:, n: n + g]
            else:
                d[:, n + g:] = d[:, g: 2 * g]
        elif rule.kind == "freeflow":
            if side == "left":
                d[:, :g] = d[:, g: g + 1]
            else:
                d[:, n + g:] = d[:, n + g - 1: n + g]
        elif rule.kind in ("reflective", "symmetry"):
            flip = _velocity_component(model, 0)
            if side == "left":
                d[:, :g] = d[:, g: 2 * g][:, ::-1]
                if flip is not None:
                    d[flip, :g] *= -1.0
            else:
                d[:, n + g:] = d[:, n: n + g][:, ::-1]
                if flip is not None:
                    d[flip, n + g:] *= -1.0
        elif rule.kind == "dirichlet":
            state = np.asarray(rule.state)[:, None]
            if side == "left":
                d[:, :g] = state
            else:
                d[:, n + g:] = state
        else:
            raise UnsupportedCombination(f"rule {rule.kind!r} not available in 1D")


def _dmr_shock_x(t):
    """x-position of the oblique shock trace on the top boundary y = 1."""
    return 1.0 / 6.0 + (1.0 + 20.0 * t) / np.sqrt(3.0)


def apply_boundary_2d(field: Field2D, bc: BoundarySpec2D, model, t=None):
    g = field.grid.ghost
    nx, ny = field.grid.nx, field.grid.ny
    d = field.data
    t = field.t if t is None else t

    # x-direction sides first, then y (corner ghosts take the y rule)
    for side, rule in (("west", bc.west), ("east", bc.east)):
        sl_ghost = np.s_[:, :, :g] if side == "west" else np.s_[:, :, nx + g:]
        if rule.kind == "periodic":
            src = d[:, :, nx: nx + g] if side == "west" else d[:, :, g: 2 * g]
            d[sl_ghost] = src
        elif rule.kind == "freeflow":
            src = d[:, :, g: g + 1] if side == "west" else d[:, :, nx + g - 1: nx + g]
            d[sl_ghost] = src
        elif rule.kind in ("reflective", "symmetry"):
            flip = _velocity_component(model, 0)
            if side == "west":
                d[:, :, :g] = d[:, :, g: 2 * g][:, :, ::-1]
                if flip is not None:
                    d[flip, :, :g] *= -1.0
            else:
                d[:, :, nx + g:] = d[:, :, nx: nx + g][:, :, ::-1]
                if flip is not None:
                    d[flip, :, nx + g:] *= -1.0
        elif rule.kind == "dirichlet":
            d[sl_ghost] = np.asarray(rule.state)[:, None, None]
        else:
            raise UnsupportedCombination(f"rule {rule.kind!r} not available on x sides")

    for side, rule in (("south", bc.south), ("north", bc.north)):
        sl_ghost = np.s_[:, :g, :] if side == "south" else np.s_[:, ny + g:, :]
        if rule.kind == "periodic":
            src = d[:, ny: ny + g, :] if side == "south" else d[:, g: 2 * g, :]
            d[sl_ghost] = src
        elif rule.kind == "freeflow":
            src = d[:, g: g + 1, :] if side == "south" else d[:, ny + g - 1: ny + g, :]
            d[sl_ghost] = src
        elif rule.kind in ("reflective", "symmetry"):
            flip = _velocity_component(model, 1)
            if side == "south":
                d[:, :g, :] = d[:, g: 2 * g, :][:, ::-1, :]
                if flip is not None:
                    d[flip, :g, :] *= -1.0
            else:
                d[:, ny + g:, :] = d[:, ny: ny + g, :][:, ::-1, :]
                if flip is not None:
                    d[flip, ny + g:, :] *= -1.0
        elif rule.kind == "dirichlet":
            d[sl_ghost] = np.asarray(rule.state)[:, None, None]
        elif rule.kind == "dmr_top":
            if side != "north":
                raise UnsupportedCombination("the oblique-shock rule fills the top side")
            post = np.asarray(rule.state)
            pre = np.asarray(rule.aux)
            xs = _dmr_shock_x(t)
            xcs = field.grid.xcenters(np.arange(-g, nx + g))
            sel = xcs < xs
            for row in range(g):
                d[:, ny + g + row, :] = np.where(sel[None, :], post[:, None], pre[:, None])
        else:
            raise UnsupportedCombination(f"rule {rule.kind!r} not available on y sides")


def fill_step_ghosts(field: Field2D, model):
    """Mirror states into the solid step so wall faces see reflected flow.

    Two layers next to each wall are filled; the overlap at the corner is
    taken by the vertical-wall mirror (fixed, documented order).
    """
    if field.step is None:
        return
    g = field.grid.ghost
    i0 = g + field.step.i_start   # first solid column (absolute)
    j1 = g + field.step.j_top     # first fluid row above the step (absolute)
    d = field.data
    uflip = _velocity_component(model, 0)
    vflip = _velocity_component(model, 1)
    # top wall of the step: mirror rows j1, j1+1 downwards (v flips)
    for layer in range(2):
        dst = j1 - 1 - layer
        src = j1 + layer
        d[:, dst, i0:] = d[:, src, i0:]
        if vflip is not None:
            d[vflip, dst, i0:] *= -1.0
    # left wall of the step: mirror columns i0-1, i0-2 rightwards (u flips);
    # overwrites the corner overlap
    for layer in range(2):
        dst = i0 + layer
        src = i0 - 1 - layer
        d[:, :j1, dst] = d[:, :j1, src]
        if uflip is not None:
            d[uflip, :j1, dst] *= -1.0


# -- right-hand sides ---------------------------------------------------------

def semidiscrete_rhs_1d(field: Field1D, scheme: Recon1DScheme, model,
                        bc: BoundarySpec1D):
    """Flux-difference RHS with single-point face traces in 1D."""
    apply_boundary_1d(field, bc, model)
    g = field.grid.ghost
    n = field.grid.n
    if g < scheme.g + 1:
        raise InadmissibleState(
            f"grid ghost width {g} too small for the order-{scheme.order} scheme")
    J = field.nvars
    uL = np.empty((J, n + 1))
    uR = np.empty((J, n + 1))
    for c in range(J):
        batch = batch_reconstruct(scheme, field.data[c], g - 1, n + 2, field.grid.dx)
        vals = _apply_operator(scheme.face_rows, batch.coeffs)  # (2, n+2)
        uL[c] = vals[1, : n + 1]
        uR[c] = vals[0, 1:]
    F = llf_flux(uL, uR, model, axis=0)
    return -(F[:, 1:] - F[:, :-1]) / field.grid.dx


def semidiscrete_rhs_2d(field: Field2D, scheme: Recon2DScheme, model,
                        bc: BoundarySpec2D):
    """Flux-difference RHS with 2-point Gauss face traces in 2D."""
    apply_boundary_2d(field, bc, model)
    fill_step_ghosts(field, model)
    g = field.grid.ghost
    if g < 2:
        raise InadmissibleState("the 2D solver needs two ghost layers")
    cfg = scheme.config
    d = np.asarray(cfg.d)
    lam = np.asarray(cfg.lam) if cfg.lam is not None else np.zeros(5)
    rho = float(np.hypot(field.grid.h, field.grid.k))
    eps = cfg.epsilon(rho)
    cwz = cfg.mode == "cwz"
    i0p0 = cfg.i0 == "p0"
    rhs = np.empty((field.nvars, field.grid.ny, field.grid.nx))
    if model.name == "euler2d":
        kernels2d.rhs_euler2d(field.data, model.gamma, field.grid.h, field.grid.k,
                              d, lam, cfg.power, eps, cwz, i0p0, g, rhs)
    elif model.name == "advection2d":
        kernels2d.rhs_advection2d(field.data, model.a[0], model.a[1],
                                  field.grid.h, field.grid.k,
                                  d, lam, cfg.power, eps, cwz, i0p0, g, rhs)
    else:
        raise UnsupportedCombination(f"no 2D flux kernel for model {model.name!r}")
    if field.step is not None:
        rhs[:, ~field.fluid_mask()] = 0.0
    return rhs


# -- time steppers ------------------------------------------------------------

def ssprk3_step(field, dt, rhs_fn):
    """Three-stage strong-stability-preserving step in convex form."""
    t0 = field.t
    u0 = field.interior().copy()
    k = rhs_fn(field)
    field.set_interior(u0 + dt * k)
    field.t = t0 + dt
    k = rhs_fn(field)
    field.set_interior(0.75 * u0 + 0.25 * (field.interior() + dt * k))
    field.t = t0 + 0.5 * dt
    k = rhs_fn(field)
    field.set_interior(u0 / 3.0 + (2.0 / 3.0) * (field.interior() + dt * k))
    field.t = t0 + dt
    return field


# classical six-stage fifth-order tableau (c, A, b)
RK5_C = (0.0, 0.25, 0.25, 0.5, 0.75, 1.0)
RK5_A = (
    (),
    (0.25,),
    (0.125, 0.125),
    (0.0, -0.5, 1.0),
    (3.0 / 16.0, 0.0, 0.0, 9.0 / 16.0),
    (-3.0 / 7.0, 2.0 / 7.0, 12.0 / 7.0, -12.0 / 7.0, 8.0 / 7.0),
)
RK5_B = (7.0 / 90.0, 0.0, 32.0 / 90.0, 12.0 / 90.0, 32.0 / 90.0, 7.0 / 90.0)


def rk5_step(field, dt, rhs_fn):
    """Six-stage fifth-order explicit Runge-Kutta step."""
    t0 = field.t
    u0 = field.interior().copy()
    ks = []
    for s in range(6):
        acc = u0.copy()
        for a, k in zip(RK5_A[s], ks):
            if a != 0.0:
                acc += (dt * a) * k
        field.set_interior(acc)
        field.t = t0 + RK5_C[s] * dt
        ks.append(rhs_fn(field))
    acc = u0.copy()
    for b, k in zip(RK5_B, ks):
        if b != 0.0:
            acc += (dt * b) * k
    field.set_interior(acc)
    field.t = t0 + dt
    return field


def cfl_dt(field, model, cfl):
    """dt = cfl / sum_axes(alpha_axis / dx_axis), global max wave speeds."""
    U = field.interior()
    if isinstance(field, Field1D):
        model.check_admissible(U)
        alpha = float(np.max(model.max_wavespeed(U, axis=0)))
        return cfl / (alpha / field.grid.dx)
    if field.step is not None:
        mask = field.fluid_mask()
        Um = U[:, mask]
        model.check_admissible(Um)
        ax = float(np.max(model.max_wavespeed(Um, axis=0)))
        ay = float(np.max(model.max_wavespeed(Um, axis=1)))
    else:
        model.check_admissible(U)
        ax = float(np.max(model.max_wavespeed(U, axis=0)))
        ay = float(np.max(model.max_wavespeed(U, axis=1)))
    return cfl / (ax / field.grid.h + ay / field.grid.k)


def _check_state(field, model, step):
    U = field.interior()
    if isinstance(field, Field2D) and field.step is not None:
        U = U[:, field.fluid_mask()]
    if not np.all(np.isfinite(U)):
        idx = int(np.argmax(~np.isfinite(U)))
        raise SimulationBlowup(f"NaN/Inf after step {step}", time=field.t, cell=idx)
    try:
        model.check_admissible(U)
    except InadmissibleState as exc:
        raise SimulationBlowup(
            f"inadmissible state after step {step}: {exc}", time=field.t) from exc


def integrate(field, rhs_fn, model, T, cfl=0.45, method="ssprk3",
              callback=None, max_steps=10_000_000):
    """Advance field.t to T with CFL-controlled steps (final step clipped)."""
    stepper = ssprk3_step if method == "ssprk3" else rk5_step
    step = 0
    while field.t < T - 1e-14 * max(1.0, abs(T)):
        dt = cfl_dt(field, model, cfl)
        if field.t + dt > T:
            dt = T - field.t
        stepper(field, dt, rhs_fn)
        step += 1
        _check_state(field, model, step)
        if callback is not None:
            callback(field, step)
        if step >= max_steps:
            raise SimulationBlowup("step budget exceeded", time=field.t)
    return field
