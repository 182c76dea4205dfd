"""Jiang-Shu smoothness indicators as constant bilinear forms.

The indicator of a polynomial q of degree at most M over its own cell,

    I[q] = sum_{1 <= |beta| <= M} dx^(2 beta - 1) integral (d_beta q)^2,

reduces to v . C v where v is a scaled moment vector of q and C is a
constant matrix depending only on (n, M).  All matrices are assembled in
exact rational arithmetic and converted to floating point once, so entries
like 32803/30240 are bit-reproducible.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np

from .errors import DegreeMismatch, UnsupportedDimension, UnsupportedM
from .poly import Poly, multi_indices


def _tuple_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _tuple_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _is_even(a):
    return all(x % 2 == 0 for x in a)


def _geq(a, b):
    return all(x >= y for x, y in zip(a, b))


def _u_entry(alpha, beta):
    # beta! / ((beta - alpha + 1)! * 2^|beta-alpha|) for beta >= alpha, even diff
    if not _geq(beta, alpha) or not _is_even(_tuple_sub(beta, alpha)):
        return Fraction(0)
    num = 1
    den = 1
    for a, b in zip(alpha, beta):
        num *= factorial(b)
        den *= factorial(b - a + 1)
    den *= 2 ** sum(_tuple_sub(beta, alpha))
    return Fraction(num, den)


def _b_entry(alpha, beta):
    # 1 / (prod(alpha + beta + 1) * 2^|alpha+beta|) when alpha+beta is even
    s = _tuple_add(alpha, beta)
    if not _is_even(s):
        return Fraction(0)
    den = 2 ** sum(s)
    for x in s:
        den *= x + 1
    return Fraction(1, den)


def _invert_upper(mat):
    """Exact inverse of an upper-triangular Fraction matrix."""
    n = len(mat)
    inv = [[Fraction(0)] * n for _ in range(n)]
    for j in range(n):
        inv[j][j] = 1 / mat[j][j]
        for i in range(j - 1, -1, -1):
            s = Fraction(0)
            for k in range(i + 1, j + 1):
                s += mat[i][k] * inv[k][j]
            inv[i][j] = -s / mat[i][i]
    return inv


def _matmul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    out = [[Fraction(0)] * p for _ in range(n)]
    for i in range(n):
        for k in range(m):
            if a[i][k]:
                aik = a[i][k]
                for j in range(p):
                    out[i][j] += aik * b[k][j]
    return out


def _transpose(a):
    return [list(col) for col in zip(*a)]


@dataclass(frozen=True)
class SmoothnessSystem:
    """Constant matrices turning the indicator into a quadratic form.

    U maps local monomial coefficients to the scaled moment vector
    v = U a; A = (U^-1)^T B U^-1; the shift matrices Q^beta move moments
    to those of d_beta; C = sum_{|beta|>=1} (Q^beta)^T A Q^beta.
    E = U^T C U expresses the indicator directly on local coefficients.
    """

    n: int
    M: int
    indices: tuple
    U: np.ndarray
    B: np.ndarray
    A: np.ndarray
    Q: dict
    C: np.ndarray
    E: np.ndarray
    U_frac: tuple
    B_frac: tuple
    A_frac: tuple
    C_frac: tuple


@lru_cache(maxsize=None)
def build_system(n, M) -> SmoothnessSystem:
    """Assemble (and memoize) the smoothness system for dimension n, degree M."""
    if n not in (1, 2):
        raise UnsupportedDimension(f"dimension {n} not supported")
    if M < 1:
        raise ValueError("M must be at least 1")
    idx = multi_indices(n, M)
    dim = len(idx)

    U = [[_u_entry(a, b) for b in idx] for a in idx]
    B = [[_b_entry(a, b) for b in idx] for a in idx]
    Uinv = _invert_upper(U)
    A = _matmul(_transpose(Uinv), _matmul(B, Uinv))

    pos = {alpha: i for i, alpha in enumerate(idx)}
    Q = {}
    C = [[Fraction(0)] * dim for _ in range(dim)]
    for beta in idx:
        if sum(beta) < 1:
            continue
        qb = np.zeros((dim, dim))
        for i, alpha in enumerate(idx):
            gamma = _tuple_add(alpha, beta)
            j = pos.get(gamma)
            if j is not None:
                qb[i, j] = 1.0
        Q[beta] = qb
        # C += Q^T A Q, done exactly: C[g,g'] += A[g-beta, g'-beta]
        for gi, g in enumerate(idx):
            gs = _tuple_sub(g, beta)
            if min(gs) < 0 or gs not in pos:
                continue
            for gj, g2 in enumerate(idx):
                g2s = _tuple_sub(g2, beta)
                if min(g2s) < 0 or g2s not in pos:
                    continue
                C[gi][gj] += A[pos[gs]][pos[g2s]]

    Uf = np.array([[float(x) for x in row] for row in U])
    Bf = np.array([[float(x) for x in row] for row in B])
    Af = np.array([[float(x) for x in row] for row in A])
    Cf = np.array([[float(x) for x in row] for row in C])
    Ef = Uf.T @ Cf @ Uf
    return SmoothnessSystem(
        n=n, M=M, indices=idx, U=Uf, B=Bf, A=Af, Q=Q, C=Cf, E=Ef,
        U_frac=tuple(map(tuple, U)), B_frac=tuple(map(tuple, B)),
        A_frac=tuple(map(tuple, A)), C_frac=tuple(map(tuple, C)),
    )


@dataclass(frozen=True)
class MomentVector:
    """Scaled moment vector v of a polynomial, indexed like its system."""

    values: np.ndarray
    poly: Poly
    system: SmoothnessSystem


def _padded_coeffs(p: Poly, sys: SmoothnessSystem):
    if p.n != sys.n:
        raise DegreeMismatch(f"polynomial dimension {p.n} != system dimension {sys.n}")
    if p.degree > sys.M:
        raise DegreeMismatch(f"degree {p.degree} exceeds system degree {sys.M}")
    a = np.zeros(len(sys.indices))
    a[: p.coeffs.size] = p.coeffs
    return a


def moment_vector(p: Poly, sys: SmoothnessSystem) -> MomentVector:
    """v_alpha = dx^(alpha-1) * integral of d_alpha p over the cell.

    In the local basis this is simply U times the coefficient vector; the
    grid-spacing powers cancel against the coefficient scaling.
    """
    a = _padded_coeffs(p, sys)
    return MomentVector(values=sys.U @ a, poly=p, system=sys)


def indicator(p: Poly, sys: SmoothnessSystem = None) -> float:
    """Jiang-Shu indicator of p over its own cell, evaluated as v . C v."""
    if sys is None:
        sys = build_system(p.n, max(p.degree, 1))
    v = moment_vector(p, sys).values
    return float(v @ sys.C @ v)


@lru_cache(maxsize=None)
def _gauss_rule(npts):
    # nodes/weights on [-1/2, 1/2]
    x, w = np.polynomial.legendre.leggauss(npts)
    return 0.5 * x, 0.5 * w


def _derive_local(coeffs, n, degree, beta):
    """Local-basis coefficients of the beta-derivative (in xi)."""
    idx = multi_indices(n, degree)
    pos = {a: i for i, a in enumerate(idx)}
    out = np.zeros(len(idx))
    for a, alpha in zip(coeffs, idx):
        tgt = _tuple_sub(alpha, beta)
        if min(tgt) < 0:
            continue
        fac = 1.0
        for t, bb in zip(tgt, beta):
            for j in range(t + 1, t + bb + 1):
                fac *= j
        out[pos[tgt]] += a * fac
    return out


def indicator_direct(p: Poly, max_order=None) -> float:
    """Reference indicator: analytic differentiation plus tensor Gauss
    quadrature of each squared derivative.  Independent of `indicator`.

    In local coordinates every dx power cancels, leaving
    sum_beta integral over [-1/2,1/2]^n of (d^beta_xi p)^2.
    """
    M = p.degree if max_order is None else max_order
    if M < 1:
        return 0.0
    npts = (2 * M + 2 + 1) // 2 + 2
    x, w = _gauss_rule(npts)
    total = 0.0
    if p.n == 1:
        for b in range(1, M + 1):
            d = _derive_local(p.coeffs, 1, p.degree, (b,))
            vals = np.polyval(d[::-1], x)
            total += float(w @ vals**2)
    else:
        X, Y = np.meshgrid(x, x, indexing="ij")
        W = np.outer(w, w)
        idx = multi_indices(2, p.degree)
        for beta in multi_indices(2, M):
            if sum(beta) < 1:
                continue
            d = _derive_local(p.coeffs, 2, p.degree, beta)
            vals = np.zeros_like(X)
            for a, alpha in zip(d, idx):
                if a:
                    vals += a * X ** alpha[0] * Y ** alpha[1]
            total += float(np.sum(W * vals**2))
    return total


def bm_reference(M, derivative_samples, dx) -> float:
    """Smooth part of the indicator expansion, from point derivatives:

    B1 = u'^2 dx^2
    B2 = B1 + 13/12 u''^2 dx^4
    B3 = u'^2 dx^2 + (13/12 u''^2 + 1/12 u' u''') dx^4 + 1043/960 u'''^2 dx^6
    """
    d = tuple(derivative_samples)
    if M == 1:
        return d[0] ** 2 * dx**2
    if M == 2:
        return d[0] ** 2 * dx**2 + 13.0 / 12.0 * d[1] ** 2 * dx**4
    if M == 3:
        return (
            d[0] ** 2 * dx**2
            + (13.0 / 12.0 * d[1] ** 2 + d[0] * d[2] / 12.0) * dx**4
            + 1043.0 / 960.0 * d[2] ** 2 * dx**6
        )
    raise UnsupportedM(f"no closed form for M={M}")


def smooth_part_reference(sys: SmoothnessSystem, derivs, dx) -> float:
    """General smooth part B_M = vB . C vB for arbitrary (n, M).

    `derivs` maps a multi-index (or its 1D order) to the point derivative of
    the underlying smooth function at the cell centre.  Used by tests as an
    oracle; bm_reference gives the 1D closed forms for M <= 3.
    """
    dx = np.atleast_1d(np.asarray(dx, dtype=float))

    def lookup(alpha):
        if alpha in derivs:
            return derivs[alpha]
        if len(alpha) == 1 and alpha[0] in derivs:
            return derivs[alpha[0]]
        return 0.0

    vB = np.zeros(len(sys.indices))
    for i, alpha in enumerate(sys.indices):
        if sum(alpha) < 1:
            continue
        acc = 0.0
        for beta in multi_indices(sys.n, sys.M - sum(alpha)):
            if not _is_even(beta):
                continue
            fac = 2.0 ** sum(beta)
            for b in beta:
                fac *= factorial(b + 1)
            acc += (
                lookup(_tuple_add(alpha, beta))
                / fac
                * float(np.prod(dx ** np.array(_tuple_add(beta, alpha))))
            )
        vB[i] = acc
    return float(vB @ sys.C @ vB)


def partial_indicator_matrix(sys: SmoothnessSystem, max_order):
    """C-like matrix with the derivative sum truncated at |beta| <= max_order.

    With max_order == M this is exactly sys.C.
    """
    dim = len(sys.indices)
    out = np.zeros((dim, dim))
    for beta, qb in sys.Q.items():
        if sum(beta) <= max_order:
            out += qb.T @ sys.A @ qb
    return out


def dump_system(sys: SmoothnessSystem, stream):
    """Plain-text dump of U/B/A/C (row-major, 17 significant digits)."""
    for name, mat in (("U", sys.U), ("B", sys.B), ("A", sys.A), ("C", sys.C)):
        stream.write(f"# {name} ({mat.shape[0]}x{mat.shape[1]}) n={sys.n} M={sys.M}\n")
        for row in mat:
            stream.write(" ".join(f"{x:.17g}" for x in row) + "\n")
