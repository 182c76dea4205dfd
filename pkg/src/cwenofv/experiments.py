"""Experiment driver: declarative specs, error tables, total variation,
and field dumps for the benchmark catalogue."""

import hashlib
import time
from dataclasses import dataclass, field as dc_field, fields as dc_fields

import numpy as np

from . import benchmarks as bm
from .cweno import fixed_eps
from .errors import NonPositiveError, SpecError
from .recon1d import critical_point_study, gauss_cell_averages, scheme_1d
from .recon2d import (face_gauss_points, field_from_function_2d,
                      reconstruct_cell_2d, scheme_2d, tau_study_2d)
from .solver import (Field1D, Field2D, integrate, semidiscrete_rhs_1d,
                     semidiscrete_rhs_2d)


@dataclass
class ExperimentSpec:
    """Declarative description of one study."""

    benchmark: str
    grids: tuple = None
    order: int = 3
    mode: str = "cwz"
    tau: str = None
    power: int = None
    m_hat: float = None
    eps_fixed: float = None
    i0: str = "opt"
    d0: float = None
    final_time: float = None
    cfl: float = 0.45
    method: str = None
    output: str = None
    reference: bool = False
    full_scale: bool = False

    def __post_init__(self):
        if self.benchmark not in bm.BENCHMARKS:
            raise SpecError(f"unknown benchmark {self.benchmark!r}")
        if self.mode not in ("cw", "cwz"):
            raise SpecError(f"unknown mode {self.mode!r}")
        if self.grids is None:
            self.grids = (bm.FULL_GRIDS if self.full_scale else bm.DESK_GRIDS).get(
                self.benchmark, bm.DESK_GRIDS[self.benchmark])
        self.grids = tuple(self.grids)
        if len(self.grids) >= 3:
            if list(self._grid_cells()) != sorted(set(self._grid_cells())):
                raise SpecError("convergence studies need strictly increasing grids")
        if self.final_time is None:
            self.final_time = bm.DEFAULT_FINAL_TIME.get(self.benchmark)
        if self.method is None:
            self.method = "rk5" if self.order >= 5 else "ssprk3"

    def _grid_cells(self):
        return [g[0] * g[1] if isinstance(g, tuple) else g for g in self.grids]

    def scheme_string(self):
        bits = [f"{self.mode}{self.order}"]
        if self.mode == "cwz":
            bits.append(f"tau={self.tau or 'default'}")
        bits.append(f"l={self.power if self.power is not None else 'default'}")
        if self.eps_fixed is not None:
            bits.append(f"eps={self.eps_fixed:g}")
        else:
            bits.append(f"mhat={self.m_hat if self.m_hat is not None else 'default'}")
        bits.append(f"i0={self.i0}")
        return ",".join(bits)

    def spec_hash(self):
        text = "\n".join(f"{f.name}={getattr(self, f.name)}" for f in dc_fields(self))
        return hashlib.sha256(text.encode()).hexdigest()[:12]

    def scheme_kwargs(self):
        kw = dict(mode=self.mode, i0=self.i0)
        if self.tau is not None:
            kw["tau"] = self.tau
        if self.power is not None:
            kw["power"] = self.power
        if self.eps_fixed is not None:
            kw["eps"] = fixed_eps(self.eps_fixed)
        elif self.m_hat is not None:
            kw["m_hat"] = self.m_hat
        if self.d0 is not None:
            m = (self.order + 1) // 2 if self.benchmark != "recon-accuracy-2d" else 4
            if self.benchmark in ("vortex", "ffs", "dmr", "shock-bubble"):
                m = 4
            kw["d"] = (self.d0,) + ((1.0 - self.d0) / m,) * m
        return kw


@dataclass
class StudyResult:
    benchmark: str
    scheme: str
    spec_hash: str
    columns: tuple                 # error-column names
    resolutions: list
    errors: list                   # list of tuples, one per row
    walltimes: list
    timestamp: str = dc_field(default_factory=lambda: time.strftime("%Y-%m-%dT%H:%M:%S"))

    def rates(self):
        out = []
        for c in range(len(self.columns)):
            col = []
            for i in range(len(self.resolutions)):
                if i == 0 or not (self.errors[i][c] > 0 and self.errors[i - 1][c] > 0):
                    col.append(np.nan)
                else:
                    col.append(np.log(self.errors[i - 1][c] / self.errors[i][c])
                               / np.log(self.resolutions[i] / self.resolutions[i - 1]))
            out.append(col)
        return out

    def to_csv(self, stream):
        cols = ["cells"]
        for name in self.columns:
            cols += [name, f"{name}_rate"]
        stream.write(",".join(cols) + "\n")
        rates = self.rates()
        for i, res in enumerate(self.resolutions):
            row = [str(res)]
            for c in range(len(self.columns)):
                row.append(f"{self.errors[i][c]:.5e}")
                r = rates[c][i]
                row.append("" if np.isnan(r) else f"{r:.2f}")
            stream.write(",".join(row) + "\n")


def estimate_order(errors, resolutions):
    """Pairwise rates plus a least-squares slope over the last three points."""
    errors = np.asarray(errors, dtype=float)
    res = np.asarray(resolutions, dtype=float)
    if errors.size < 2:
        raise NonPositiveError("need at least two error values")
    if np.any(errors <= 0):
        raise NonPositiveError("errors must be strictly positive")
    pair = np.full(errors.size, np.nan)
    for i in range(1, errors.size):
        pair[i] = np.log(errors[i - 1] / errors[i]) / np.log(res[i] / res[i - 1])
    tail = slice(-3, None) if errors.size >= 3 else slice(None)
    slope = -np.polyfit(np.log(res[tail]), np.log(errors[tail]), 1)[0]
    return float(slope), pair


def total_variation(values):
    """Sum of absolute jumps including the periodic wrap pair."""
    v = np.asarray(values, dtype=float).ravel()
    return float(np.sum(np.abs(np.diff(v))) + abs(v[0] - v[-1]))


# -- field dumps --------------------------------------------------------------

def dump_field_2d(field: Field2D, path, style="grid", component=0):
    """Write a 2D field: plain-text grid dump or a schlieren PGM image."""
    grid = field.grid
    if style == "grid":
        with open(path, "w") as fh:
            fh.write(f"{grid.nx} {grid.ny} {grid.x0:.17g} {grid.y0:.17g} "
                     f"{grid.h:.17g} {grid.k:.17g} {field.t:.17g} {field.nvars}\n")
            U = field.interior()
            for c in range(field.nvars):
                for j in range(grid.ny):
                    fh.write(" ".join(f"{x:.17g}" for x in U[c, j]) + "\n")
    elif style == "schlieren":
        rho = field.interior()[component]
        gx = np.zeros_like(rho)
        gy = np.zeros_like(rho)
        gx[:, 1:-1] = (rho[:, 2:] - rho[:, :-2]) / (2 * grid.h)
        gx[:, 0] = (rho[:, 1] - rho[:, 0]) / grid.h
        gx[:, -1] = (rho[:, -1] - rho[:, -2]) / grid.h
        gy[1:-1, :] = (rho[2:, :] - rho[:-2, :]) / (2 * grid.k)
        gy[0, :] = (rho[1, :] - rho[0, :]) / grid.k
        gy[-1, :] = (rho[-1, :] - rho[-2, :]) / grid.k
        mag = np.hypot(gx, gy)
        peak = mag.max()
        if peak == 0:
            img = np.full_like(mag, 255.0)
        else:
            img = 255.0 * np.exp(-10.0 * mag / peak)
        img8 = np.clip(np.rint(img), 0, 255).astype(np.uint8)[::-1, :]  # north up
        with open(path, "wb") as fh:
            fh.write(f"P5\n{grid.nx} {grid.ny}\n255\n".encode())
            fh.write(img8.tobytes())
    else:
        raise ValueError(f"unknown dump style {style!r}")


def load_field_2d(path):
    """Inverse of the grid-style dump; returns (data, header dict)."""
    with open(path) as fh:
        head = fh.readline().split()
        nx, ny = int(head[0]), int(head[1])
        x0, y0, h, k, t = map(float, head[2:7])
        nv = int(head[7])
        data = np.empty((nv, ny, nx))
        for c in range(nv):
            for j in range(ny):
                data[c, j] = np.array(fh.readline().split(), dtype=float)
    return data, dict(nx=nx, ny=ny, x0=x0, y0=y0, h=h, k=k, t=t, nvars=nv)


# -- benchmark runners --------------------------------------------------------

def _l1_error(field, reference):
    """Discrete 1-norm (cell-volume weighted) per component."""
    U = field.interior()
    if isinstance(field, Field1D):
        vol = field.grid.dx
    else:
        vol = field.grid.h * field.grid.k
    return np.sum(np.abs(U - reference), axis=tuple(range(1, U.ndim))) * vol


def _advection_exact_averages(datum, antideriv, grid, T):
    x = grid.centers()
    if antideriv is not None:
        return ((antideriv(x + grid.dx / 2 - T) - antideriv(x - grid.dx / 2 - T))
                / grid.dx)[None, :]
    # non-periodic datum formulas: wrap the shifted coordinate into the domain
    L = grid.n * grid.dx

    def shifted(s):
        return datum(((s - T - grid.x0) % L) + grid.x0)

    return gauss_cell_averages(shifted, x, grid.dx)[None, :]


def _run_1d_advection(spec, datum, antideriv):
    sch = scheme_1d(spec.order, **spec.scheme_kwargs())
    rows = []
    for N in spec.grids:
        f, model, bc = bm.setup_advection(datum, antideriv, N, ghost=sch.r)
        t0 = time.perf_counter()
        integrate(f, lambda fld: semidiscrete_rhs_1d(fld, sch, model, bc),
                  model, T=spec.final_time, cfl=spec.cfl, method=spec.method)
        wall = time.perf_counter() - t0
        exact = _advection_exact_averages(datum, antideriv, f.grid, spec.final_time)
        rows.append((N, tuple(_l1_error(f, exact)), wall, f))
    return rows, ("err",)


def _run_tv_step(spec):
    sch = scheme_1d(spec.order, **spec.scheme_kwargs())
    rows = []
    for N in spec.grids:
        f, model, bc = bm.setup_tv_step(N, ghost=sch.r)
        tv0 = total_variation(f.interior()[0])
        t0 = time.perf_counter()
        integrate(f, lambda fld: semidiscrete_rhs_1d(fld, sch, model, bc),
                  model, T=spec.final_time, cfl=spec.cfl, method=spec.method)
        wall = time.perf_counter() - t0
        rows.append((N, (total_variation(f.interior()[0]) - tv0,), wall, f))
    return rows, ("tv_increase",)


def _run_jiang_shu(spec):
    sch = scheme_1d(spec.order, **spec.scheme_kwargs())
    rows = []
    for N in spec.grids:
        f, model, bc = bm.setup_jiang_shu(N, ghost=sch.r)
        ref = f.interior().copy()  # period-2 domain: exact return after T=8
        t0 = time.perf_counter()
        integrate(f, lambda fld: semidiscrete_rhs_1d(fld, sch, model, bc),
                  model, T=spec.final_time, cfl=spec.cfl, method=spec.method)
        wall = time.perf_counter() - t0
        rows.append((N, tuple(_l1_error(f, ref)), wall, f))
    return rows, ("err",)


def _run_crit_point(spec):
    sch = scheme_1d(spec.order, **spec.scheme_kwargs())
    dxs = [1.0 / N for N in spec.grids]
    study = critical_point_study(sch, "u1", None, dxs)
    rows = [(N, (study.tau[i], study.maxw[i], study.err[i]), 0.0, None)
            for i, N in enumerate(spec.grids)]
    return rows, ("tau", "maxw", "err")


# reference resolution for the shock-acoustic test (10x the standard grid)
SHU_OSHER_REFERENCE_CELLS = 8000


def _run_shu_osher(spec):
    sch = scheme_1d(spec.order, **spec.scheme_kwargs())
    reference = None
    if spec.reference:
        n_ref = SHU_OSHER_REFERENCE_CELLS
        fr, model, bc = bm.setup_shu_osher(n_ref, ghost=4)
        ref_scheme = scheme_1d(5, mode="cw", power=2, m_hat=2, i0="p0")
        integrate(fr, lambda fld: semidiscrete_rhs_1d(fld, ref_scheme, model, bc),
                  model, T=spec.final_time, cfl=spec.cfl, method="rk5")
        reference = fr
    rows = []
    for N in spec.grids:
        f, model, bc = bm.setup_shu_osher(N, ghost=sch.r)
        t0 = time.perf_counter()
        integrate(f, lambda fld: semidiscrete_rhs_1d(fld, sch, model, bc),
                  model, T=spec.final_time, cfl=spec.cfl, method=spec.method)
        wall = time.perf_counter() - t0
        if reference is not None:
            ratio = reference.grid.n // N
            coarse = reference.interior()[0].reshape(N, ratio).mean(axis=1)
            err = float(np.sum(np.abs(f.interior()[0] - coarse)) * f.grid.dx)
        else:
            err = float(np.min(f.interior()[0]))  # min density as a diagnostic
        rows.append((N, (err,), wall, f))
    return rows, ("err" if spec.reference else "min_density",)


def _run_vortex(spec):
    sch = scheme_2d(**spec.scheme_kwargs())
    rows = []
    for N in spec.grids:
        f, model, bc = bm.setup_vortex(N)
        ref = f.interior().copy()
        t0 = time.perf_counter()
        integrate(f, lambda fld: semidiscrete_rhs_2d(fld, sch, model, bc),
                  model, T=spec.final_time, cfl=spec.cfl, method="ssprk3")
        wall = time.perf_counter() - t0
        errs = _l1_error(f, ref)
        rows.append((N, (errs[0], errs[3]), wall, f))
    return rows, ("err_density", "err_energy")


def _run_shock_2d(spec):
    sch = scheme_2d(**spec.scheme_kwargs())
    setups = {"ffs": bm.setup_ffs, "dmr": bm.setup_dmr, "shock-bubble": bm.setup_shock_bubble}
    rows = []
    for g in spec.grids:
        nx, ny = g if isinstance(g, tuple) else (g, g)
        f, model, bc = setups[spec.benchmark](nx, ny)
        t0 = time.perf_counter()
        integrate(f, lambda fld: semidiscrete_rhs_2d(fld, sch, model, bc),
                  model, T=spec.final_time, cfl=spec.cfl, method="ssprk3")
        wall = time.perf_counter() - t0
        U = f.interior()
        if f.step is not None:
            mask = f.fluid_mask()
            rho_min = float(U[0][mask].min())
        else:
            rho_min = float(U[0].min())
        rows.append((nx * ny, (rho_min,), wall, f))
    return rows, ("min_density",)


def _run_recon_accuracy_2d(spec):
    sch = scheme_2d(**spec.scheme_kwargs())
    u = lambda X, Y: np.sin(2 * np.pi * X) * np.cos(2 * np.pi * Y)
    rows = []
    for N in spec.grids:
        h = 1.0 / N
        t0 = time.perf_counter()
        f = field_from_function_2d(u, 4, 4, h, h, ghost=1, x0=0.203, y0=0.407)
        e = 0.0
        for j in range(4):
            for i in range(4):
                rec = reconstruct_cell_2d(sch, f, i, j)
                for side in ("E", "N"):
                    pts, _ = face_gauss_points(f.cell(i, j), side)
                    e = max(e, float(np.max(np.abs(rec(pts) - u(pts[:, 0], pts[:, 1])))))
        taus = tau_study_2d(sch, u, (0.203, 0.407), [h])
        rows.append((N, (e, float(taus[0])), time.perf_counter() - t0, None))
    return rows, ("err_face", "tau")


_RUNNERS = {
    "advect-lf": lambda spec: _run_1d_advection(spec, bm.lf_datum, bm.lf_datum_antideriv),
    "advect-hf": lambda spec: _run_1d_advection(spec, bm.hf_datum, None),
    "jiang-shu": _run_jiang_shu,
    "tv-step": _run_tv_step,
    "crit-point": _run_crit_point,
    "shu-osher": _run_shu_osher,
    "vortex": _run_vortex,
    "ffs": _run_shock_2d,
    "dmr": _run_shock_2d,
    "shock-bubble": _run_shock_2d,
    "recon-accuracy-2d": _run_recon_accuracy_2d,
}


def run_experiment(spec: ExperimentSpec) -> StudyResult:
    """Run one benchmark study; optionally write CSV/dump artifacts."""
    rows, columns = _RUNNERS[spec.benchmark](spec)
    result = StudyResult(
        benchmark=spec.benchmark, scheme=spec.scheme_string(),
        spec_hash=spec.spec_hash(), columns=columns,
        resolutions=[r[0] for r in rows],
        errors=[r[1] for r in rows],
        walltimes=[r[2] for r in rows],
    )
    if spec.output:
        import os
        os.makedirs(spec.output, exist_ok=True)
        base = f"{spec.benchmark}_{spec.spec_hash()}"
        with open(os.path.join(spec.output, base + ".csv"), "w") as fh:
            result.to_csv(fh)
        with open(os.path.join(spec.output, base + ".log"), "w") as fh:
            fh.write(f"benchmark: {spec.benchmark}\nscheme: {result.scheme}\n"
                     f"hash: {result.spec_hash}\ntimestamp: {result.timestamp}\n")
            for res, wall in zip(result.resolutions, result.walltimes):
                fh.write(f"cells {res}: wall {wall:.3f} s\n")
        for res, row in zip(result.resolutions, rows):
            fld = row[3]
            if isinstance(fld, Field2D):
                dump_field_2d(fld, os.path.join(spec.output, f"{base}_{res}.dat"),
                              style="grid")
                dump_field_2d(fld, os.path.join(spec.output, f"{base}_{res}.pgm"),
                              style="schlieren")
    return result
