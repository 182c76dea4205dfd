"""One-dimensional CWENO/CWENOZ reconstruction of order 2r-1 on uniform grids.

The candidate-fit operators, indicator quadratic forms and face-evaluation
rows are dimensionless in the local cell basis, so they are precomputed
once per scheme and reused on every grid.  The batch driver applies them
with fixed-order accumulation, which makes per-cell and whole-field calls
agree bit for bit.
"""

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .cweno import CWenoConfig, default_linear_weights, power_of_dx, tau_preset
from .errors import InsufficientGhosts
from .poly import Poly, StencilData, cell_1d, fit_constrained_ls
from .smoothness import build_system


def _interp_operator(offsets, degree):
    """Matrix mapping stencil averages to local-basis coefficients.

    The constrained fit is linear in the data, so columns are obtained by
    fitting the unit data vectors on a unit-spacing stencil (the operator
    does not depend on the actual grid spacing).
    """
    cells = [cell_1d(float(o), 1.0) for o in offsets]
    central = list(offsets).index(0)
    cols = []
    for i in range(len(offsets)):
        e = np.zeros(len(offsets))
        e[i] = 1.0
        st = StencilData(cells=cells, values=e, central=central)
        cols.append(fit_constrained_ls(st, degree).coeffs)
    return np.column_stack(cols)


def _apply_operator(R, W):
    """out[a] = sum_k R[a,k] W[k], accumulated in fixed k order."""
    out = np.empty((R.shape[0],) + W.shape[1:])
    for a in range(R.shape[0]):
        acc = R[a, 0] * W[0]
        for k in range(1, R.shape[1]):
            acc = acc + R[a, k] * W[k]
        out[a] = acc
    return out


def _quadratic_form(E, C):
    """sum_ij E[i,j] C[i] C[j] with a fixed iteration order."""
    acc = None
    for i in range(E.shape[0]):
        for j in range(E.shape[1]):
            if E[i, j] == 0.0:
                continue
            term = E[i, j] * (C[i] * C[j])
            acc = term if acc is None else acc + term
    return acc


DEFAULT_PARAMS_1D = {3: (2, 2), 5: (1, 3), 7: (1, 6), 9: (1, 5), 11: (1, 5)}
DEFAULT_TAU_1D = {3: "tau3_hat", 5: "tau5_hat", 7: "tau7_hat", 9: "tau9_hat", 11: "tau11_hat"}


def config_1d(order, mode="cwz", power=None, m_hat=None, eps=None, i0="opt",
              tau=None, d=None) -> CWenoConfig:
    """Standard configuration for a 1D blend of the given (odd) order."""
    r = (order + 1) // 2
    if power is None:
        power = DEFAULT_PARAMS_1D[order][0]
    if m_hat is None:
        m_hat = DEFAULT_PARAMS_1D[order][1]
    lam = None
    if mode == "cwz":
        if tau is None:
            tau = DEFAULT_TAU_1D[order]
        lam = tau_preset(tau, m=r) if isinstance(tau, str) else tuple(tau)
    epsilon = eps if eps is not None else power_of_dx(m_hat)
    return CWenoConfig(mode=mode, d=d or default_linear_weights(r), power=power,
                       epsilon=epsilon, lam=lam, i0=i0)


@dataclass
class Recon1DScheme:
    """Order 2r-1 scheme: central stencil -g..g plus r one-sided substencils."""

    r: int
    config: CWenoConfig

    def __post_init__(self):
        if not 2 <= self.r <= 6:
            raise ValueError("supported orders are 2 <= r <= 6")
        r = self.r
        self.G = 2 * r - 2
        self.g = r - 1
        self.m = r
        if len(self.config.d) != self.m + 1:
            raise ValueError(f"configuration needs {self.m + 1} linear weights")
        self.opt_offsets = tuple(range(-self.g, self.g + 1))
        self.sub_offsets = tuple(tuple(range(k - r, k)) for k in range(1, self.m + 1))
        self.R_opt = _interp_operator(self.opt_offsets, self.G)
        self.R_sub = tuple(_interp_operator(off, self.g) for off in self.sub_offsets)
        self.E_opt = build_system(1, self.G).E
        self.E_sub = build_system(1, self.g).E
        # rows evaluating a degree-G local polynomial at xi = -1/2, +1/2
        xi = np.array([-0.5, 0.5])
        self.face_rows = np.vander(xi, self.G + 1, increasing=True)

    @property
    def order(self):
        return 2 * self.r - 1


def scheme_1d(order, **kwargs) -> Recon1DScheme:
    return Recon1DScheme(r=(order + 1) // 2, config=config_1d(order, **kwargs))


@dataclass
class ScalarField1D:
    """Cell averages on a uniform 1D grid with ghost cells."""

    values: np.ndarray
    dx: float
    ghost: int
    x0: float = 0.0  # left edge of the interior
    boundary: str = "periodic"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.size <= 2 * self.ghost:
            raise ValueError("no interior cells")

    @property
    def n(self):
        return self.values.size - 2 * self.ghost

    def interior(self):
        return self.values[self.ghost: self.ghost + self.n]

    def center(self, j):
        return self.x0 + (j + 0.5) * self.dx

    def cell(self, j):
        return cell_1d(self.center(j), self.dx)

    def fill_ghosts(self):
        g, n = self.ghost, self.n
        v = self.values
        if g == 0:
            return
        if self.boundary == "periodic":
            interior = v[g: g + n].copy()
            v[:g] = interior[np.arange(-g, 0) % n]
            v[n + g:] = interior[np.arange(n, n + g) % n]
        elif self.boundary == "freeflow":
            v[:g] = v[g]
            v[n + g:] = v[n + g - 1]
        else:
            raise ValueError(f"unknown boundary rule {self.boundary!r}")


@dataclass
class BatchRecon1D:
    """Per-cell blend coefficients and weight diagnostics for a range of cells."""

    coeffs: np.ndarray        # (G+1, ncells) local-basis blend coefficients
    omega: np.ndarray         # (m+1, ncells)
    indicators: np.ndarray    # (m+1, ncells), row 0 holds I0 as used
    tau: np.ndarray           # (ncells,) or None in cw mode


def batch_reconstruct(scheme: Recon1DScheme, values, first, ncells, dx) -> BatchRecon1D:
    """Reconstruct cells first..first+ncells-1 of a padded value array.

    `values[first + o]` must exist for every stencil offset o, i.e. the
    caller provides at least g cells on each side of the requested range.
    """
    values = np.asarray(values, dtype=float)
    g = scheme.g
    if first - g < 0 or first + ncells - 1 + g >= values.size:
        raise InsufficientGhosts(
            f"need {g} cells beyond the requested range on each side")
    cfg = scheme.config
    d = np.asarray(cfg.d)

    W_opt = np.stack([values[first + o: first + o + ncells] for o in scheme.opt_offsets])
    c_opt = _apply_operator(scheme.R_opt, W_opt)
    c_sub = []
    for off, R in zip(scheme.sub_offsets, scheme.R_sub):
        W = np.stack([values[first + o: first + o + ncells] for o in off])
        c_sub.append(_apply_operator(R, W))

    # residual candidate P0 on the degree-G coefficients
    c_p0 = c_opt.copy()
    for dk, ck in zip(d[1:], c_sub):
        c_p0[: ck.shape[0]] = c_p0[: ck.shape[0]] - dk * ck
    c_p0 = c_p0 / d[0]

    I_sub = [_quadratic_form(scheme.E_sub, ck) for ck in c_sub]
    if cfg.i0 == "opt":
        I0 = _quadratic_form(scheme.E_opt, c_opt)
    else:
        I0 = _quadratic_form(scheme.E_opt, c_p0)
    indicators = np.stack([I0] + I_sub)

    eps = cfg.epsilon(dx)
    if cfg.mode == "cw":
        tau = None
        alpha = np.empty_like(indicators)
        for k in range(indicators.shape[0]):
            alpha[k] = d[k] / (indicators[k] + eps) ** cfg.power
    else:
        lam = np.asarray(cfg.lam)
        acc = lam[0] * indicators[0]
        for k in range(1, lam.size):
            acc = acc + lam[k] * indicators[k]
        tau = np.abs(acc)
        alpha = np.empty_like(indicators)
        for k in range(indicators.shape[0]):
            alpha[k] = d[k] * (1.0 + (tau / (indicators[k] + eps)) ** cfg.power)
    asum = alpha[0]
    for k in range(1, alpha.shape[0]):
        asum = asum + alpha[k]
    omega = alpha / asum

    coeffs = omega[0] * c_p0
    for k, ck in enumerate(c_sub):
        coeffs[: ck.shape[0]] = coeffs[: ck.shape[0]] + omega[k + 1] * ck
    return BatchRecon1D(coeffs=coeffs, omega=omega, indicators=indicators, tau=tau)


def reconstruct_cell_1d(scheme: Recon1DScheme, field: ScalarField1D, j,
                        with_weights=False):
    """Blend polynomial for interior cell j (0-based)."""
    batch = batch_reconstruct(scheme, field.values, field.ghost + j, 1, field.dx)
    p = Poly(1, scheme.G, batch.coeffs[:, 0], field.cell(j))
    if with_weights:
        return p, batch
    return p


def reconstruct_field_1d(scheme: Recon1DScheme, field: ScalarField1D):
    """Blend polynomials for every interior cell."""
    batch = batch_reconstruct(scheme, field.values, field.ghost, field.n, field.dx)
    return [Poly(1, scheme.G, batch.coeffs[:, j], field.cell(j))
            for j in range(field.n)]


# -- critical-point reconstruction study -------------------------------------

def u0_catalog(x):
    return np.exp(-np.asarray(x) ** 2)


def u1_catalog(x):
    x = np.asarray(x)
    return np.sin(np.pi * x - np.sin(np.pi * x) / np.pi)


def u2_catalog(x):
    return 1.0 + np.sin(np.pi * np.asarray(x)) ** 3


def u3_catalog(x):
    return np.cos(np.pi * np.asarray(x)) ** 4


# (function, critical location, order of the critical point)
CRITICAL_POINT_CATALOG = {
    "u0": (u0_catalog, 0.2, 0),
    "u1": (u1_catalog, 0.596683186911209, 1),
    "u2": (u2_catalog, 0.0, 2),
    "u3": (u3_catalog, 0.5, 3),
}

_GAUSS5_X, _GAUSS5_W = np.polynomial.legendre.leggauss(5)


def gauss_cell_averages(u, centers, dx, npts=5):
    """Cell averages by per-cell Gauss-Legendre quadrature."""
    if npts == 5:
        x, w = _GAUSS5_X, _GAUSS5_W
    else:
        x, w = np.polynomial.legendre.leggauss(npts)
    centers = np.asarray(centers, dtype=float)
    pts = centers[:, None] + 0.5 * dx * x[None, :]
    return 0.5 * (u(pts) @ w)


@dataclass
class CriticalPointStudy:
    dx: np.ndarray
    tau: np.ndarray
    maxw: np.ndarray
    err: np.ndarray
    tau_rate: np.ndarray = dataclass_field(default=None)
    maxw_rate: np.ndarray = dataclass_field(default=None)
    err_rate: np.ndarray = dataclass_field(default=None)

    def __post_init__(self):
        def rates(v):
            out = np.full(v.size, np.nan)
            for i in range(1, v.size):
                if v[i] > 0 and v[i - 1] > 0:
                    out[i] = np.log(v[i - 1] / v[i]) / np.log(self.dx[i - 1] / self.dx[i])
            return out
        self.tau_rate = rates(self.tau)
        self.maxw_rate = rates(self.maxw)
        self.err_rate = rates(self.err)

    def to_csv(self, stream):
        stream.write("dx,tau,tau_rate,maxw,maxw_rate,err,err_rate\n")
        for i in range(self.dx.size):
            def fr(x):
                return "" if np.isnan(x) else f"{x:.2f}"
            stream.write(
                f"{self.dx[i]:.5e},{self.tau[i]:.5e},{fr(self.tau_rate[i])},"
                f"{self.maxw[i]:.5e},{fr(self.maxw_rate[i])},"
                f"{self.err[i]:.5e},{fr(self.err_rate[i])}\n")


def critical_point_study(scheme: Recon1DScheme, u, x_crit, dxs,
                         quad_points=5) -> CriticalPointStudy:
    """Reconstruction diagnostics on grids with a cell centred at x_crit.

    For each grid size: the global indicator tau, the largest deviation of
    the nonlinear weights from the linear ones, and the reconstruction
    error at the two faces of the critical cell (the in-cell evaluation
    points are a protocol choice).
    """
    if isinstance(u, str):
        u, x_crit, _ = CRITICAL_POINT_CATALOG[u]
    d = np.asarray(scheme.config.d)
    taus, maxws, errs = [], [], []
    for dx in np.asarray(dxs, dtype=float):
        offsets = np.arange(-scheme.g, scheme.g + 1)
        centers = x_crit + offsets * dx
        vals = gauss_cell_averages(u, centers, dx, npts=quad_points)
        field = ScalarField1D(values=vals, dx=dx, ghost=scheme.g,
                              x0=x_crit - 0.5 * dx)
        p, batch = reconstruct_cell_1d(scheme, field, 0, with_weights=True)
        taus.append(float(batch.tau[0]) if batch.tau is not None else np.nan)
        maxws.append(float(np.max(np.abs(batch.omega[:, 0] - d))))
        faces = np.array([[x_crit - dx / 2], [x_crit + dx / 2]])
        errs.append(float(np.max(np.abs(p(faces) - u(faces[:, 0])))))
    return CriticalPointStudy(dx=np.asarray(dxs, float), tau=np.array(taus),
                              maxw=np.array(maxws), err=np.array(errs))
