"""Polynomials in local cell coordinates and the constrained least-squares fit.

Every polynomial is stored in the dimensionless basis of monomials in
xi = (x - center) / extents, so that coefficients and all derived
quantities (cell averages over neighbouring cells of a uniform grid,
smoothness indicators) are independent of the absolute grid spacing.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from .errors import RankDeficient, StencilTooSmall

# Singular values below RANK_RTOL * sigma_max flag a degenerate stencil.
RANK_RTOL = 1e-10


@lru_cache(maxsize=None)
def multi_indices(n, degree):
    """Graded multi-index enumeration for n in {1, 2}.

    1D: (0,), (1,), ..., (degree,).
    2D: grade by |alpha|, within a grade order (g,0), (g-1,1), ..., (0,g),
    i.e. (0,0); (1,0), (0,1); (2,0), (1,1), (0,2); ...
    """
    if n == 1:
        return tuple((i,) for i in range(degree + 1))
    if n == 2:
        out = []
        for g in range(degree + 1):
            for ay in range(g + 1):
                out.append((g - ay, ay))
        return tuple(out)
    raise ValueError(f"unsupported dimension {n}")


def poly_dim(n, degree):
    """Number of coefficients of a polynomial of the given total degree."""
    return comb(degree + n, n)


@lru_cache(maxsize=None)
def central_moments(n, degree):
    """Averages of xi^alpha over the unit cell [-1/2, 1/2]^n.

    Zero when any alpha component is odd, otherwise
    1 / (2^|alpha| * prod(alpha + 1)).
    """
    vals = []
    for alpha in multi_indices(n, degree):
        if any(a % 2 for a in alpha):
            vals.append(0.0)
        else:
            denom = 2 ** sum(alpha)
            for a in alpha:
                denom *= a + 1
            vals.append(1.0 / denom)
    return np.array(vals)


@dataclass(frozen=True)
class CellGeometry:
    """Axis-aligned cell: center, per-axis extents and 2-norm diameter."""

    center: np.ndarray
    extents: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float))
        e = np.atleast_1d(np.asarray(self.extents, dtype=float))
        if c.shape != e.shape:
            raise ValueError("center and extents must have the same length")
        if np.any(e <= 0):
            raise ValueError("cell extents must be strictly positive")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "extents", e)

    @property
    def n(self):
        return self.center.size

    @property
    def diameter(self):
        return float(np.linalg.norm(self.extents))

    @property
    def volume(self):
        return float(np.prod(self.extents))


def cell_1d(center, dx):
    return CellGeometry(np.array([center]), np.array([dx]))


def cell_2d(center, h, k):
    return CellGeometry(np.asarray(center, dtype=float), np.array([h, k]))


@dataclass(frozen=True)
class Poly:
    """Polynomial sum_alpha a_alpha xi^alpha on a cell, xi = (x-c)/dx."""

    n: int
    degree: int
    coeffs: np.ndarray
    cell: CellGeometry

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.size != poly_dim(self.n, self.degree):
            raise ValueError(
                f"expected {poly_dim(self.n, self.degree)} coefficients, got {c.size}"
            )
        object.__setattr__(self, "coeffs", c)

    def __call__(self, x):
        return eval_poly(self, x)


def eval_poly(p, x):
    """Evaluate p at a point (or at an array of points, last axis = n)."""
    x = np.asarray(x, dtype=float)
    scalar_input = x.ndim <= 1
    pts = np.atleast_2d(x)
    if pts.shape[-1] != p.n:
        raise ValueError(f"point dimension {pts.shape[-1]} != poly dimension {p.n}")
    xi = (pts - p.cell.center) / p.cell.extents
    # per-axis power tables up to the degree
    powers = [np.vander(xi[:, ax], p.degree + 1, increasing=True) for ax in range(p.n)]
    out = np.zeros(pts.shape[0])
    for a, alpha in zip(p.coeffs, multi_indices(p.n, p.degree)):
        term = np.full(pts.shape[0], a)
        for ax, e in enumerate(alpha):
            term = term * powers[ax][:, e]
        out += term
    return float(out[0]) if scalar_input else out


def monomial_averages(base: CellGeometry, cell: CellGeometry, degree):
    """Averages of the base cell's local monomials xi^alpha over `cell`.

    In base-local coordinates `cell` is the box centred at
    m = (cell.center - base.center)/base.extents with per-axis half-width
    s/2 = cell.extents/(2*base.extents); the average of xi^a over
    [m-s/2, m+s/2] is ((m+s/2)^(a+1) - (m-s/2)^(a+1)) / ((a+1) s).
    """
    n = base.n
    m = (cell.center - base.center) / base.extents
    s = cell.extents / base.extents
    per_axis = np.empty((n, degree + 1))
    for ax in range(n):
        lo = m[ax] - 0.5 * s[ax]
        hi = m[ax] + 0.5 * s[ax]
        lo_pow, hi_pow = lo, hi
        for a in range(degree + 1):
            per_axis[ax, a] = (hi_pow - lo_pow) / ((a + 1) * s[ax])
            lo_pow *= lo
            hi_pow *= hi
    out = []
    for alpha in multi_indices(n, degree):
        v = 1.0
        for ax, a in enumerate(alpha):
            v *= per_axis[ax, a]
        out.append(v)
    return np.array(out)


def cell_average(p: Poly, cell: CellGeometry):
    """Exact average of p over an axis-aligned cell (closed-form moments)."""
    return float(p.coeffs @ monomial_averages(p.cell, cell, p.degree))


@dataclass
class StencilData:
    """Cell averages over a stencil; the central cell is the fit target."""

    cells: list
    values: np.ndarray
    central: int

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if not 0 <= self.central < len(self.cells):
            raise ValueError("central index out of range")
        if len(self.cells) != self.values.size:
            raise ValueError("one value per cell required")


def fit_constrained_ls(data: StencilData, degree) -> Poly:
    """Degree-`degree` polynomial matching the central average exactly and
    the remaining stencil averages in the least-squares sense.

    Works in the zero-mean basis phi_alpha = xi^alpha - <xi^alpha>_0 for
    |alpha| >= 1, which turns the constrained problem into an ordinary
    least-squares one for the non-constant coefficients.
    """
    base = data.cells[data.central]
    n = base.n
    dim = poly_dim(n, degree)
    eta = len(data.cells)
    if eta < dim:
        raise StencilTooSmall(f"stencil has {eta} cells, need at least {dim}")

    ubar0 = float(data.values[data.central])
    coeffs = np.zeros(dim)
    if degree == 0:
        coeffs[0] = ubar0
        return Poly(n, 0, coeffs, base)

    moments = central_moments(n, degree)
    design = np.empty((eta, dim - 1))
    for i, cell in enumerate(data.cells):
        design[i] = (monomial_averages(base, cell, degree) - moments)[1:]
    rhs = data.values - ubar0

    c, _, rank, sv = np.linalg.lstsq(design, rhs, rcond=None)
    if sv.size and sv[-1] < RANK_RTOL * sv[0]:
        raise RankDeficient(
            f"design matrix rank {rank} with sigma_min/sigma_max = {sv[-1] / sv[0]:.2e}"
        )
    if rank < dim - 1:
        raise RankDeficient(f"design matrix rank {rank} < {dim - 1}")

    coeffs[1:] = c
    coeffs[0] = ubar0 - c @ moments[1:]
    return Poly(n, degree, coeffs, base)


def to_physical_coeffs(p: Poly):
    """Coefficients of p as a polynomial in the raw monomials x^beta.

    Expands each xi^alpha = prod((x_i - c_i)/dx_i)^alpha_i binomially.
    """
    idx = multi_indices(p.n, p.degree)
    pos = {alpha: i for i, alpha in enumerate(idx)}
    out = np.zeros_like(p.coeffs)
    c = p.cell.center
    d = p.cell.extents
    for a, alpha in zip(p.coeffs, idx):
        scale = a / np.prod(d.astype(float) ** np.array(alpha))
        # product over axes of sum_k C(alpha_i, k) x^k (-c_i)^(alpha_i - k)
        terms = [((), 1.0)]
        for ax, e in enumerate(alpha):
            new = []
            for beta, w in terms:
                for kk in range(e + 1):
                    new.append((beta + (kk,), w * comb(e, kk) * (-c[ax]) ** (e - kk)))
            terms = new
        for beta, w in terms:
            out[pos[beta]] += scale * w
    return out


def from_physical_coeffs(n, degree, phys, cell: CellGeometry) -> Poly:
    """Inverse of to_physical_coeffs: x-monomial coefficients to a Poly."""
    idx = multi_indices(n, degree)
    pos = {alpha: i for i, alpha in enumerate(idx)}
    coeffs = np.zeros(len(idx))
    c = cell.center
    d = cell.extents
    # x_i = c_i + dx_i * xi_i
    for b, beta in zip(np.asarray(phys, dtype=float), idx):
        terms = [((), 1.0)]
        for ax, e in enumerate(beta):
            new = []
            for alpha, w in terms:
                for kk in range(e + 1):
                    new.append(
                        (alpha + (kk,), w * comb(e, kk) * c[ax] ** (e - kk) * d[ax] ** kk)
                    )
            terms = new
        for alpha, w in terms:
            coeffs[pos[alpha]] += b * w
    return Poly(n, degree, coeffs, cell)
