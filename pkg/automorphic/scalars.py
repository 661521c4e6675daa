"""
Scalar Laurent data over Q
lambda_F, volumes, the functionals B and C, Hecke eigen-scalars and the invariance-defect coefficients
"""

import math
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy import integrate

from automorphic.complexfn import Jet, lambda_complete, lambda_complete_jet, zeta
from automorphic.config import config

logger = logging.getLogger(__name__)

# Res_{s=1} zeta for Q
ZETA_STAR = 1.0


def m_scalar(s):
    """Spherical intertwining scalar m(s) = Lambda(1-2s)/Lambda(1+2s)"""
    s = np.asarray(s, dtype=complex)
    value = lambda_complete(1 - 2 * s) / lambda_complete(1 + 2 * s)
    return complex(value) if np.ndim(value) == 0 else value


def m_jet(s0: complex, order_max: int) -> Jet:
    """Taylor jet of m at s0 (s0 away from +-1/2)"""
    return Jet.from_function(m_scalar, s0, 0, order_max)


def lambda_F(s):
    """lambda_F(s) = Lambda(-2s)/Lambda(2+2s), i.e. m(1/2 + s)"""
    s = np.asarray(s, dtype=complex)
    value = lambda_complete(-2 * s) / lambda_complete(2 + 2 * s)
    return complex(value) if np.ndim(value) == 0 else value


@lru_cache(maxsize=16)
def lambda_jet(order_max: int) -> Jet:
    """Laurent jet of lambda_F at 0 (k_min = -1) by division of Lambda-jets"""
    if order_max < 0:
        raise ValueError("order_max must be non-negative")
    numerator = lambda_complete_jet(0, order_max + 1).compose_linear(-2, 0)
    denominator = lambda_complete_jet(2, order_max + 2).compose_linear(2, 0)
    jet = numerator / denominator
    return Jet(0, -1, jet.coeffs[: order_max + 2])


def lambda_jet_direct(order_max: int) -> Jet:
    """Same jet by a contour integral of lambda_F itself"""
    return Jet.from_function(lambda_F, 0, -1, order_max)


def lambda_jet_at(s0: complex, order_max: int) -> Jet:
    """Taylor jet of lambda_F at a regular point s0 != 0; the circle stays clear of the pole at 0"""
    if s0 == 0:
        raise ValueError("lambda_F has a pole at 0; use lambda_jet")
    radius = min(config.get_jet_config()["radius"], abs(s0) / 2)
    return Jet.from_function(lambda_F, s0, 0, order_max, radius=radius)


def lambda_residue_forms() -> dict:
    """The three closed forms of lambda^{(-1)}(0) and the closed form of lambda^{(0)}(0)"""
    lam0 = lambda_complete_jet(0, 1)
    lam1 = lambda_complete_jet(1, 1)
    lam2 = lambda_complete_jet(2, 1)
    return {
        "via_Lambda2": 1.0 / (2 * lam2.coeff(0).real),
        "via_pole_at_0": (-lam0.residue / (2 * lam2.coeff(0))).real,
        "via_pole_at_1": (lam1.residue / (2 * lam2.coeff(0))).real,
        "order_0": (lam2.coeff(1) * lam0.residue / lam2.coeff(0) ** 2
                    + lam0.coeff(0) / lam2.coeff(0)).real,
    }


def spherical_pole_residue() -> float:
    """lim_{s->1/2} (s - 1/2) m(s) = -Lambda^{(-1)}(0) / (2 Lambda(2))"""
    lam0 = lambda_complete_jet(0, 0)
    return (-lam0.residue / (2 * lambda_complete(2))).real


@dataclass
class ZetaConstants:
    """Constants of Q used across the engine"""
    zeta_star: float = ZETA_STAR
    lambda_jet: Jet = None
    volume: float = None
    d_F: int = 1
    r1: int = 1
    r2: int = 0

    def __post_init__(self):
        if self.lambda_jet is None:
            self.lambda_jet = lambda_jet(3)
        if self.volume is None:
            self.volume = self.zeta_star / self.lambda_jet.residue.real

    @property
    def lambda_residue(self) -> float:
        return self.lambda_jet.residue.real


def volume_forms() -> Tuple[float, float]:
    """Vol([PGL2]) as 2 pi^{-1} zeta(2) and as zeta*/lambda^{(-1)}(0)"""
    closed = 2.0 / math.pi * zeta(2).real
    via_lambda = ZETA_STAR / lambda_jet(0).residue.real
    return closed, via_lambda


def volume_pgl2() -> float:
    closed, via_lambda = volume_forms()
    if abs(closed - via_lambda) > 1e-10:
        logger.error(f"Volume closed forms disagree: {closed} vs {via_lambda}")
    return closed


def functionals_BC() -> Tuple[float, float]:
    """(C, B) for the standard Gaussian Schwartz function over Q"""
    C = 1.0
    B = lambda_complete_jet(0, 1).coeff(0).real
    return C, B


def functional_B_quadrature() -> float:
    """Finite part at s = 0 of the theta-series Mellin integral for Lambda

    Lambda(s) = -1/s - 1/(1-s) + int_1^inf (t^{s/2} + t^{(1-s)/2}) omega(t) dt/t,
    omega(t) = sum_{n>=1} exp(-pi n^2 t).
    """
    n = np.arange(1, 30)

    def integrand(t):
        omega = np.sum(np.exp(-np.pi * n * n * t))
        return (1.0 + math.sqrt(t)) * omega / t

    value, _ = integrate.quad(integrand, 1.0, np.inf, epsabs=1e-15, epsrel=1e-13, limit=200)
    return value - 1.0


def hecke_eigenvalue(p: int, s):
    """Eigenvalue of the normalized T(p) on E(s): (p^s + p^-s)/(p^{1/2} + p^{-1/2})"""
    s = np.asarray(s, dtype=complex)
    value = (p ** s + p ** (-s)) / (math.sqrt(p) + 1 / math.sqrt(p))
    return complex(value) if value.ndim == 0 else value


def hecke_scalar(p: int, s0: complex, order_max: int) -> Jet:
    """Jet at s0 of s -> hecke_eigenvalue(p, 1/2 + s), equal to 1 at s = 0"""
    return Jet.from_function(lambda s: hecke_eigenvalue(p, 0.5 + s), s0, 0, order_max)


def reg_hecke_defect(p: int) -> float:
    """Constant value of (T(p) - 1) E^reg: lambda^{(-1)}(0) times the s-derivative of the eigenvalue at 1/2"""
    return (hecke_scalar(p, 0.0, 1).derivative(1) * lambda_jet(0).residue).real


def mv_scalars(q: float, s: complex) -> Tuple[complex, complex, complex]:
    """(mu1, c0, c1) controlling the invariance defect at a place with residue field size q"""
    if q < 2:
        raise ValueError(f"q must be at least 2, got {q}")
    s = complex(s)
    norm = math.sqrt(q) + 1 / math.sqrt(q)
    mu1 = q ** (-2 * s) * (1 - q ** (-(1 - 2 * s))) / (1 + q ** (-(1 + 2 * s)))
    c1 = (q ** (s + 0.5) - q ** (-(s + 0.5))) / norm
    c0 = (q ** s + q ** (-s)) / norm
    return mu1, c0, c1


def invariance_defect(q: float) -> float:
    """lambda^{(-1)}(0)·c0'(-1/2), the failure of invariance of the regularized integral"""
    norm = math.sqrt(q) + 1 / math.sqrt(q)
    c0_prime = math.log(q) * (q ** -0.5 - q ** 0.5) / norm
    return lambda_jet(0).residue.real * c0_prime


def assemble_puzzle(trace0: complex, traceM: complex) -> Jet:
    """Principal part at s = 1/2 of the continuous-spectrum contribution from the two traces"""
    C, B = functionals_BC()
    zs = ZETA_STAR
    order_m2 = -(2 * trace0 / zs) * (zs ** 2 * C / 2)
    order_m1 = -(2 * trace0 / zs) * zs * B + (zs ** 2 * C / 2) * traceM / zs
    return Jet(0.5, -2, [order_m2, order_m1])


def rankin_selberg_rstar(s, s1: complex, s2: complex):
    """R*(s) of E(s1)E(s2): prod over signs of Lambda(1/2 + s +- s1 +- s2) / (Lambda(1+2s1) Lambda(1+2s2))

    The unfolded Bessel integral fixes the overall constant to 1.
    """
    s = np.asarray(s, dtype=complex)
    product = np.ones_like(s)
    for e1 in (1, -1):
        for e2 in (1, -1):
            product = product * lambda_complete(0.5 + s + e1 * s1 + e2 * s2)
    value = product / (lambda_complete(1 + 2 * complex(s1)) * lambda_complete(1 + 2 * complex(s2)))
    return complex(value) if value.ndim == 0 else value


def derivative_square_rstar(s):
    """R*(s) of E'(0)^2, the mixed s1-s2 derivative of the product above at 0: 4 Lambda(1/2 + s)^4"""
    s = np.asarray(s, dtype=complex)
    value = 4 * lambda_complete(0.5 + s) ** 4
    return complex(value) if np.ndim(value) == 0 else value
