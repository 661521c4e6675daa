"""
Named automorphic functions
Constants, Eisenstein series and their derivatives, Rankin-Selberg products and |Delta|^2,
each with its declared exponent profile, exact constant term and R*(s) closed form where known
"""

import math
import logging
from typing import Callable, Dict

import numpy as np

from automorphic.complexfn import Jet, lambda_complete_jet
from automorphic.config import config
from automorphic.eisenstein import (EisSpec, constant_term_many, delta_square, delta_square_kernel,
                                    eval_many)
from automorphic.regint import AutomorphicFn, ExponentProfile
from automorphic.scalars import (derivative_square_rstar, lambda_jet, lambda_jet_at, m_jet,
                                 rankin_selberg_rstar)

logger = logging.getLogger(__name__)


def _zero_rstar(s):
    return np.zeros(np.shape(np.atleast_1d(s)), dtype=complex)


def constant_fn(c: complex = 1.0) -> AutomorphicFn:
    """phi = c; R vanishes identically and reg_integral(c) = c·Vol"""
    c = complex(c)
    return AutomorphicFn(
        sampler=lambda x, y: np.full(np.shape(x), c),
        profile=ExponentProfile([(c, -0.5, 0)]),
        name=f"const({c.real:g})" if c.imag == 0 else f"const({c:g})",
        kernel=lambda t: np.full(np.shape(np.atleast_1d(t)), c),
        r_star_oracle=_zero_rstar,
    )


def _power_terms(g: Jet, sign: int, s0: complex, k: int):
    """Profile terms of d^k/ds^k [g(s) t^{1/2 + sign·s}] at s0"""
    return [
        (math.comb(k, j) * g.derivative(k - j) * sign ** j * math.factorial(j), sign * s0, j)
        for j in range(k + 1)
    ]


def _unit_jet(s0: complex, k: int) -> Jet:
    return Jet(s0, 0, np.eye(1, k + 1)[0])


def eisenstein_profile(s0: complex, deriv: int = 0, variant: str = "plain") -> ExponentProfile:
    """Exponent profile of the deriv-th s-derivative of an Eisenstein variant at s0"""
    s0 = complex(s0)
    k = deriv
    if variant == "plain":
        return ExponentProfile(_power_terms(_unit_jet(s0, k), 1, s0, k)
                               + _power_terms(m_jet(s0, k), -1, s0, k))
    if variant == "star":
        if abs(s0) < config.get_tolerance_config()["pole_guard"]:
            raise ValueError("E*(0) = E'(0)/2; use the plain derivative at s0 = 0")
        up = lambda_complete_jet(1 + 2 * s0, k).compose_linear(2, s0)
        down = lambda_complete_jet(1 - 2 * s0, k).compose_linear(-2, s0)
        return ExponentProfile(_power_terms(up, 1, s0, k) + _power_terms(down, -1, s0, k))
    if variant not in ("reg", "classical"):
        raise ValueError(f"unknown variant {variant!r}")

    u0 = s0 - 0.5
    terms = [(math.factorial(k), s0, k)]
    if abs(u0) < 1e-12:
        lam = lambda_jet(k + 1)
        terms += [(math.factorial(k) * lam.coeff(k - i) * (-1) ** i, -0.5, i) for i in range(1, k + 2)]
        if variant == "classical":
            terms.append((math.factorial(k) * lam.coeff(k), -0.5, 0))
        return ExponentProfile(terms)

    lam_at = lambda_jet_at(u0, k)
    terms += _power_terms(lam_at, -1, s0, k)
    terms.append((-lam_at.derivative(k), -0.5, 0))
    if variant == "classical":
        residue = lambda_jet(0).residue
        pole_part = residue * (-1) ** k * math.factorial(k) / u0 ** (k + 1)
        terms.append((lam_at.derivative(k) - pole_part, -0.5, 0))
    return ExponentProfile(terms)


def eisenstein_fn(s0: complex, deriv: int = 0, variant: str = "plain",
                  fourier_terms=None) -> AutomorphicFn:
    """E(s0) or one of its variants and s-derivatives as a sampleable function

    A single Eisenstein series pairs to zero with every E(s), so R vanishes identically.
    """
    spec = EisSpec(s0=s0, deriv=deriv, variant=variant, fourier_terms=fourier_terms)
    prime = "'" * deriv if deriv <= 3 else f"^({deriv})"
    label = {"plain": "E", "star": "E*", "reg": "E_reg", "classical": "E_cl"}[variant]
    return AutomorphicFn(
        sampler=lambda x, y: eval_many(spec, x, y),
        profile=eisenstein_profile(spec.s0, deriv, variant),
        name=f"{label}{prime}({spec.s0.real:g})" if spec.s0.imag == 0 else f"{label}{prime}({spec.s0:g})",
        kernel=lambda t: constant_term_many(spec, t),
        r_star_oracle=_zero_rstar,
    )


def eisenstein_reg_fn(s0: complex = 0.5, deriv: int = 0, classical: bool = False) -> AutomorphicFn:
    return eisenstein_fn(s0, deriv, "classical" if classical else "reg")


def eisenstein_builder(alpha: complex, n: int) -> AutomorphicFn:
    """E^{(n)}(alpha), or E_reg^{(n)}(1/2) when alpha = 1/2; used by the L2 residue construction"""
    if complex(alpha) == 0.5:
        return eisenstein_fn(0.5, n, "reg")
    return eisenstein_fn(alpha, n, "plain")


def eisenstein_product(s1: complex, s2: complex) -> AutomorphicFn:
    """E(s1)E(s2) with its Rankin-Selberg R*(s)"""
    first, second = eisenstein_fn(s1), eisenstein_fn(s2)
    product = first * second
    product.r_star_oracle = lambda s: rankin_selberg_rstar(s, s1, s2)
    return product


def derivative_square() -> AutomorphicFn:
    """E'(0)^2, whose R*(s) = 4 Lambda(1/2 + s)^4 has a pole of order 4 at s = 1/2"""
    first = eisenstein_fn(0.0, deriv=1)
    product = first * first
    product.name = "E'(0)^2"
    product.r_star_oracle = derivative_square_rstar
    return product


def delta_square_fn() -> AutomorphicFn:
    """|Delta(z)|^2 y^12, rapidly decaying, with its exact constant term"""
    return AutomorphicFn(
        sampler=delta_square,
        profile=ExponentProfile(),
        name="|Delta|^2 y^12",
        kernel=delta_square_kernel,
    )


FORMS: Dict[str, Callable[..., AutomorphicFn]] = {
    "constant": constant_fn,
    "eisenstein": eisenstein_fn,
    "eisenstein_reg": eisenstein_reg_fn,
    "eisenstein_product": eisenstein_product,
    "derivative_square": derivative_square,
    "delta_square": delta_square_fn,
}


def build_form(name: str, **params) -> AutomorphicFn:
    """Look up a named function and build it with the given parameters"""
    if name not in FORMS:
        raise KeyError(f"unknown function {name!r}; available: {sorted(FORMS)}")
    logger.debug(f"building {name} with {params}")
    return FORMS[name](**params)
