"""Central WENO / WENOZ blending: residual polynomial, nonlinear weights,
global smoothness indicator presets and the accuracy-condition validator."""

from dataclasses import dataclass

import numpy as np

from .errors import DegreeViolation, MismatchedCells, UnknownPreset
from .poly import Poly, poly_dim


@dataclass(frozen=True)
class EpsilonLaw:
    """Regularization floor: eps = scale^exponent, or a fixed value."""

    kind: str  # "power" or "fixed"
    value: float  # exponent for "power", eps itself for "fixed"

    def __call__(self, scale):
        if self.kind == "power":
            return scale**self.value
        return self.value


def power_of_dx(m_hat):
    return EpsilonLaw("power", float(m_hat))


def fixed_eps(eps0):
    if eps0 <= 0:
        raise ValueError("fixed epsilon must be positive")
    return EpsilonLaw("fixed", float(eps0))


@dataclass(frozen=True)
class CWenoConfig:
    """Everything the nonlinear blend needs.

    mode: "cw" (inverse-indicator weights) or "cwz" (tau-driven weights).
    d: linear weights (d0 first), positive, summing to 1.
    power: the exponent l >= 1 in the weight formulas.
    epsilon: EpsilonLaw.
    lam: tau coefficients (lambda_0 for I0 first), zero-sum; cwz only.
    i0: "opt" uses I[P_opt] as I0, "p0" uses I[P0].
    """

    mode: str
    d: tuple
    power: int
    epsilon: EpsilonLaw
    lam: tuple = None
    i0: str = "opt"

    def __post_init__(self):
        if self.mode not in ("cw", "cwz"):
            raise ValueError(f"unknown mode {self.mode!r}")
        d = np.asarray(self.d, dtype=float)
        if np.any(d <= 0) or abs(d.sum() - 1.0) > 1e-12:
            raise ValueError("linear weights must be positive and sum to 1")
        object.__setattr__(self, "d", tuple(d))
        if self.power < 1:
            raise ValueError("power must be >= 1")
        if self.mode == "cwz":
            if self.lam is None:
                raise ValueError("cwz mode needs tau coefficients")
            lam = np.asarray(self.lam, dtype=float)
            if lam.size != d.size:
                raise ValueError("need one tau coefficient per candidate")
            if abs(lam.sum()) > 1e-12:
                raise ValueError("tau coefficients must sum to zero")
            object.__setattr__(self, "lam", tuple(lam))
        if self.i0 not in ("opt", "p0"):
            raise ValueError(f"unknown i0 choice {self.i0!r}")


@dataclass(frozen=True)
class WeightSet:
    indicators: np.ndarray
    tau: float  # None in cw mode
    alpha: np.ndarray
    omega: np.ndarray


def default_linear_weights(m):
    """d0 = 3/4 with the remaining 1/4 split evenly over m candidates."""
    return (0.75,) + (0.25 / m,) * m


# Decay order theta(tau) on smooth non-critical data, per preset.
TAU_DECAY_ORDERS = {
    "tau3_hat": 4,
    "tau5_hat": 6,
    "tau7_hat": 7,
    "tau9_hat": 8,
    "tau11_hat": 9,
    "tau3_2d": 4,
    "tau3_2d_b": 4,
    "db3": 3,
    "db5": 5,
}

# lambda_0 (for I0) first, then lambda_1..lambda_m.  Free parameters fixed
# at t = 1 (and u = 1, s = 1 where present); the 2D default uses t=1, u=2.
_TAU_PRESETS = {
    "tau3_hat": (-2.0, 1.0, 1.0),
    "tau5_hat": (-6.0, 1.0, 4.0, 1.0),
    "tau7_hat": (0.0, -1.0, -3.0, 3.0, 1.0),
    "tau9_hat": (-5.0, 1.0, 3.0, -3.0, 3.0, 1.0),
    "tau11_hat": (-210.0, 0.0, 36.0, 126.0, 46.0, 1.0, 1.0),
    # 2D ordering: (I0, I_NE, I_SE, I_SW, I_NW)
    "tau3_2d": (-4.0, 1.0, 1.0, 1.0, 1.0),
    # variant without the central indicator; can break down on strong shocks
    "tau3_2d_b": (0.0, 1.0, -1.0, 1.0, -1.0),
    # comparison baselines in the style of classical WENOZ weights
    "db3": (0.0, 1.0, -1.0),
    "db5": (0.0, 1.0, 0.0, -1.0),
}


def tau_preset(name, m=None):
    """Coefficient vector (lambda_0 first) for a named tau definition."""
    if name not in _TAU_PRESETS:
        raise UnknownPreset(f"unknown tau preset {name!r}")
    lam = _TAU_PRESETS[name]
    if m is not None and len(lam) != m + 1:
        raise UnknownPreset(f"preset {name} has {len(lam) - 1} substencil slots, not {m}")
    return lam


def custom_tau(lam):
    lam = tuple(float(x) for x in lam)
    if abs(sum(lam)) > 1e-12:
        raise ValueError("tau coefficients must sum to zero")
    return lam


def compute_p0(popt: Poly, lows, d) -> Poly:
    """Residual polynomial P0 = (P_opt - sum_k d_k P_k) / d0."""
    d = np.asarray(d, dtype=float)
    if len(lows) != d.size - 1:
        raise ValueError("need one weight per candidate")
    G = popt.degree
    for p in lows:
        if p.degree >= G:
            raise DegreeViolation("candidate degrees must be below the optimal degree")
        if p.n != popt.n or not np.array_equal(p.cell.center, popt.cell.center) \
                or not np.array_equal(p.cell.extents, popt.cell.extents):
            raise MismatchedCells("all candidates must live on the same cell")
    coeffs = popt.coeffs.copy()
    for dk, p in zip(d[1:], lows):
        coeffs[: p.coeffs.size] -= dk * p.coeffs
    coeffs /= d[0]
    return Poly(popt.n, G, coeffs, popt.cell)


def nonlinear_weights(cfg: CWenoConfig, indicators, scale) -> WeightSet:
    """Weights from indicators; `scale` feeds the epsilon law (dx or rho).

    indicators[0] is I0 (of P_opt or P0 per the configuration), then I_k.
    """
    I = np.asarray(indicators, dtype=float)
    d = np.asarray(cfg.d)
    eps = cfg.epsilon(scale)
    if cfg.mode == "cw":
        alpha = d / (I + eps) ** cfg.power
        tau = None
    else:
        lam = np.asarray(cfg.lam)
        tau = abs(float(lam @ I))
        alpha = d * (1.0 + (tau / (I + eps)) ** cfg.power)
    omega = alpha / alpha.sum()
    return WeightSet(indicators=I, tau=tau, alpha=alpha, omega=omega)


def blend(polys, ws: WeightSet) -> Poly:
    """Reconstruction polynomial sum_k omega_k P_k (P0 first)."""
    base = polys[0]
    G = max(p.degree for p in polys)
    coeffs = np.zeros(poly_dim(base.n, G))
    for w, p in zip(ws.omega, polys):
        if p.n != base.n or not np.array_equal(p.cell.center, base.cell.center) \
                or not np.array_equal(p.cell.extents, base.cell.extents):
            raise MismatchedCells("all candidates must live on the same cell")
        coeffs[: p.coeffs.size] += w * p.coeffs
    return Poly(base.n, G, coeffs, base.cell)


def validate_parameters(M, G, g, power, m_hat, theta_tau):
    """Check the accuracy conditions linking (l, m_hat) to theta(tau).

    Returns (ok, violated) where violated is one of "m-hat-cap",
    "tau-margin", "epsilon-margin" or None.  The tau condition binds for
    every m_hat when theta_tau <= 2M; in the regime theta_tau >= 2M+1 it
    only constrains m_hat beyond 2M (the sensitivity-bound tables for the
    high-order one-dimensional blends follow this reading).
    """
    need = G - g - 1
    if m_hat > 2 * M + 1:
        return False, "m-hat-cap"
    if theta_tau >= 2 * M + 1:
        if m_hat > 2 * M and power * (theta_tau - 2 * M) < need:
            return False, "tau-margin"
    else:
        if power * (theta_tau - min(m_hat, 2 * M)) < need:
            return False, "tau-margin"
    if power * (2 * M + 2 - m_hat) < need:
        return False, "epsilon-margin"
    return True, None


def max_valid_epsilon_exponent(r, power, theta_tau):
    """Largest m_hat accepted for a 1D blend of order 2r-1 at the given power."""
    M = r - 1
    G = 2 * r - 2
    g = r - 1
    best = 0
    for m_hat in range(0, 2 * M + 2):
        ok, _ = validate_parameters(M, G, g, power, m_hat, theta_tau)
        if ok:
            best = m_hat
    return best
