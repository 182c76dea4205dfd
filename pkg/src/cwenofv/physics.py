"""Flux models: linear advection and the Euler equations in 1D/2D.

State arrays have the component axis first: (J,) + grid shape.
"""

import numpy as np

from .errors import InadmissibleState


class LinearAdvection1D:
    nvars = 1
    ndim = 1
    name = "advection1d"

    def __init__(self, a=1.0):
        self.a = float(a)

    def flux(self, U, axis=0):
        return self.a * U

    def max_wavespeed(self, U, axis=0):
        return np.full(U.shape[1:], abs(self.a))

    def check_admissible(self, U):
        return None


class LinearAdvection2D:
    nvars = 1
    ndim = 2
    name = "advection2d"

    def __init__(self, a=(1.0, 1.0)):
        self.a = (float(a[0]), float(a[1]))

    def flux(self, U, axis=0):
        return self.a[axis] * U

    def max_wavespeed(self, U, axis=0):
        return np.full(U.shape[1:], abs(self.a[axis]))

    def check_admissible(self, U):
        return None


class Euler1D:
    nvars = 3
    ndim = 1
    name = "euler1d"

    def __init__(self, gamma=1.4):
        self.gamma = float(gamma)

    def primitives(self, U):
        rho = U[0]
        u = U[1] / rho
        p = (self.gamma - 1.0) * (U[2] - 0.5 * rho * u * u)
        return rho, u, p

    def conserved(self, rho, u, p):
        E = p / (self.gamma - 1.0) + 0.5 * rho * u * u
        return np.stack([rho, rho * u, E])

    def flux(self, U, axis=0):
        rho, u, p = self.primitives(U)
        return np.stack([U[1], U[1] * u + p, u * (U[2] + p)])

    def sound_speed(self, U):
        rho, _, p = self.primitives(U)
        return np.sqrt(self.gamma * p / rho)

    def max_wavespeed(self, U, axis=0):
        rho, u, p = self.primitives(U)
        return np.abs(u) + np.sqrt(self.gamma * p / rho)

    def check_admissible(self, U):
        rho, _, p = self.primitives(U)
        bad = (rho <= 0) | (p <= 0) | ~np.isfinite(rho) | ~np.isfinite(p)
        if np.any(bad):
            idx = int(np.argmax(bad))
            raise InadmissibleState(f"non-positive density or pressure at flat index {idx}")


class Euler2D:
    nvars = 4
    ndim = 2
    name = "euler2d"

    def __init__(self, gamma=1.4):
        self.gamma = float(gamma)

    def primitives(self, U):
        rho = U[0]
        u = U[1] / rho
        v = U[2] / rho
        p = (self.gamma - 1.0) * (U[3] - 0.5 * rho * (u * u + v * v))
        return rho, u, v, p

    def conserved(self, rho, u, v, p):
        rho, u, v, p = np.broadcast_arrays(
            np.asarray(rho, float), np.asarray(u, float),
            np.asarray(v, float), np.asarray(p, float))
        E = p / (self.gamma - 1.0) + 0.5 * rho * (u * u + v * v)
        return np.stack([rho, rho * u, rho * v, E])

    def flux(self, U, axis=0):
        rho, u, v, p = self.primitives(U)
        if axis == 0:
            return np.stack([U[1], U[1] * u + p, U[2] * u, u * (U[3] + p)])
        return np.stack([U[2], U[1] * v, U[2] * v + p, v * (U[3] + p)])

    def sound_speed(self, U):
        rho, _, _, p = self.primitives(U)
        return np.sqrt(self.gamma * p / rho)

    def max_wavespeed(self, U, axis=0):
        rho, u, v, p = self.primitives(U)
        vel = u if axis == 0 else v
        return np.abs(vel) + np.sqrt(self.gamma * p / rho)

    def check_admissible(self, U):
        rho, _, _, p = self.primitives(U)
        bad = (rho <= 0) | (p <= 0) | ~np.isfinite(rho) | ~np.isfinite(p)
        if np.any(bad):
            idx = int(np.argmax(bad))
            raise InadmissibleState(f"non-positive density or pressure at flat index {idx}")


def llf_flux(uL, uR, model, axis=0):
    """Local Lax-Friedrichs flux: central average plus wave-speed dissipation.

    The dissipation speed is the pointwise max of the directional wave
    speeds of the two states.
    """
    fL = model.flux(uL, axis)
    fR = model.flux(uR, axis)
    alpha = np.maximum(model.max_wavespeed(uL, axis), model.max_wavespeed(uR, axis))
    return 0.5 * (fL + fR) - 0.5 * alpha * (uR - uL)
