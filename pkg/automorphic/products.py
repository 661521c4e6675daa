"""
Regularized integrals of products of Eisenstein series
Spherical intertwining jets, the unitary-product formula and its engine cross-checks,
vanishing identities and the deformation limit
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from automorphic.complexfn import Jet, lambda_complete
from automorphic.forms import derivative_square, eisenstein_fn, eisenstein_profile, eisenstein_reg_fn
from automorphic.regint import RegularizedIntegralEngine
from automorphic.scalars import (derivative_square_rstar, lambda_F, lambda_jet, lambda_jet_at,
                                 m_jet, m_scalar, rankin_selberg_rstar)

logger = logging.getLogger(__name__)

__all__ = [
    "MScalarJet", "rip_unitary_rhs", "rip_unitary_rhs_as_printed", "rip_unitary_closed_form",
    "rip_unitary_lhs", "vanishing_checks", "Case1Pairings", "rip_case1_formula",
    "deformation_limit", "deformation_checks", "rankin_selberg_rstar",
]


@dataclass
class MScalarJet:
    """Jet of m(s) = Lambda(1-2s)/Lambda(1+2s) at 0; m_k is the k-th derivative"""
    jet: Jet = None

    def __post_init__(self):
        if self.jet is None:
            self.jet = m_jet(0, 4)

    @classmethod
    def artificial(cls, m1: float = 0.0, m2: float = 0.0, m3: float = 0.0) -> "MScalarJet":
        return cls(Jet(0, 0, [-1.0, m1, m2 / 2, m3 / 6]))

    def m(self, k: int) -> complex:
        return self.jet.derivative(k)

    @property
    def m0(self) -> float:
        return self.m(0).real

    @property
    def m1(self) -> float:
        return self.m(1).real

    @property
    def m2(self) -> float:
        return self.m(2).real

    @property
    def m3(self) -> float:
        return self.m(3).real

    def inversion_defect(self) -> float:
        """Largest coefficient of m(s)m(-s) - 1 up to the jet precision"""
        product = self.jet * self.jet.compose_linear(-1, 0)
        return float(np.max(np.abs((product - 1).coeffs)))


def _lambda_derivatives():
    """(lambda^{(-1)}, lambda^{(0)}, lambda^{(1)}, lambda^{(2)}) with lambda^{(k)} = k!·c_k for k >= 0"""
    jet = lambda_jet(3)
    return jet.residue.real, jet.derivative(0).real, jet.derivative(1).real, jet.derivative(2).real


def rip_unitary_rhs(mjet: Optional[MScalarJet] = None) -> float:
    """Closed value of the regularized integral of E'(0)^2 from the scalar jets

    4 l2/l_ + 4 l1 m1/l_ + (l0/l_) m1^2 - m3/3 - m1 m2/2, with l_ the residue of lambda_F at 0.
    """
    mjet = mjet or MScalarJet()
    lam_m1, lam0, lam1, lam2 = _lambda_derivatives()
    m1, m2, m3 = mjet.m1, mjet.m2, mjet.m3
    return (4 * lam2 / lam_m1 + 4 * lam1 * m1 / lam_m1 + lam0 / lam_m1 * m1 ** 2
            - m3 / 3 - m1 * m2 / 2)


def rip_unitary_rhs_as_printed(mjet: Optional[MScalarJet] = None) -> float:
    """The displayed variant 4 l2/l_·(1 + m1) + (l0/l_) m1^2 - m3/3 - m2 m1, kept for comparison"""
    mjet = mjet or MScalarJet()
    lam_m1, lam0, _, lam2 = _lambda_derivatives()
    m1, m2, m3 = mjet.m1, mjet.m2, mjet.m3
    return 4 * lam2 / lam_m1 * (1 + m1) + lam0 / lam_m1 * m1 ** 2 - m3 / 3 - m2 * m1


def rip_unitary_closed_form(radius: float = 0.2) -> float:
    """Res_{s=1/2} 4 Lambda(1/2+s)^4 / Lambda(1+2s), divided by lambda^{(-1)}(0)"""
    jet = Jet.from_function(lambda s: derivative_square_rstar(s) / lambda_complete(1 + 2 * s),
                            0.5, -5, 1, radius=radius)
    return (jet.residue / lambda_jet(0).residue).real


def rip_unitary_lhs(engine: RegularizedIntegralEngine, T: Optional[float] = None) -> dict:
    """Engine value of the regularized integral of E'(0)^2 with its declared profile"""
    phi = derivative_square()
    result = engine.reg_integral(phi, T=T, radius=0.2)
    t_check = 8.0
    gap = abs(engine.kernel_a(phi, [t_check])[0] - phi.profile.f([t_check])[0])
    return {
        "value": result.value.real,
        "principal": result.principal.real,
        "degenerate": result.degenerate.real,
        "kernel_gap_at_8": float(gap),
        "profile": [[c.real, a.real, n] for c, a, n in phi.profile],
    }


def vanishing_checks(engine: RegularizedIntegralEngine, s: float = 0.07,
                     T: Optional[float] = None) -> Dict[str, dict]:
    """Identities that must vanish, or match a closed form, at a small s != 0"""
    lam_m1 = lambda_jet(0).residue.real
    report = {}

    phi = eisenstein_fn(s) * eisenstein_fn(0.0, deriv=1)
    value = engine.reg_integral(phi, T=T).value
    report["E(s)E'(0)"] = {"computed": [value.real, value.imag], "expected": 0.0, "error": abs(value)}

    phi = eisenstein_reg_fn(0.5 + s) * eisenstein_reg_fn(0.5)
    value = engine.reg_integral(phi, T=T).value
    report["E_reg(1/2+s)E_reg(1/2)"] = {"computed": [value.real, value.imag], "expected": 0.0,
                                       "error": abs(value)}

    for n in (0, 1):
        value = engine.reg_integral(eisenstein_reg_fn(0.5 + s, deriv=n), T=T).value
        expected = -lambda_jet_at(s, n).derivative(n).real / lam_m1
        report[f"E_reg^({n})(1/2+s)"] = {"computed": [value.real, value.imag], "expected": expected,
                                        "error": abs(value - expected)}

    for name, row in report.items():
        logger.info(f"{name} at s = {s}: error {row['error']:.3e}")
    return report


@dataclass
class Case1Pairings:
    """Pairings P_K(.) entering the formula for two non-unitary pairs of characters"""
    f1_f2: complex = 0.0
    dM_f1_M_f2: complex = 0.0
    f1_M_f2: complex = 0.0
    f2_M_f1: complex = 0.0
    dM_f1_f2: complex = 0.0

    def swapped(self) -> "Case1Pairings":
        """Exchange the roles of f1 and f2 in the symmetric pairings"""
        return Case1Pairings(f1_f2=self.f1_f2, dM_f1_M_f2=self.dM_f1_M_f2, f1_M_f2=self.f2_M_f1,
                             f2_M_f1=self.f1_M_f2, dM_f1_f2=self.dM_f1_f2)


def rip_case1_formula(pairings: Case1Pairings) -> Dict[str, complex]:
    """Both expressions of the non-unitary case, evaluated from supplied pairings

    pair_a: 2 l0/l_ P(f1 f2) - P(M'f1 · M f2)
    pair_b: l0/l_ (P(f1 M f2) + P(f2 M f1)) - P(M'f1 · f2)
    """
    lam_m1, lam0, _, _ = _lambda_derivatives()
    ratio = lam0 / lam_m1
    return {
        "pair_a": 2 * ratio * pairings.f1_f2 - pairings.dM_f1_M_f2,
        "pair_b": ratio * (pairings.f1_M_f2 + pairings.f2_M_f1) - pairings.dM_f1_f2,
    }


def deformation_limit(s: float, mjet: Optional[MScalarJet] = None) -> float:
    """s^{-1}{2 l'(s) + 2 l'(-s) m(s) + m1 l(s) + m1 m(s) l(-s)} / l_, regular as s -> 0"""
    if s == 0:
        raise ValueError("the deformed quantity is evaluated at s != 0")
    mjet = mjet or MScalarJet()
    lam_m1 = lambda_jet(0).residue.real
    m1 = mjet.m1
    d_plus = lambda_jet_at(s, 1).derivative(1)
    d_minus = lambda_jet_at(-s, 1).derivative(1)
    m = m_scalar(s)
    value = (2 * d_plus + 2 * d_minus * m + m1 * lambda_F(s) + m1 * m * lambda_F(-s)) / (s * lam_m1)
    return complex(value).real


def deformation_checks(s_values=(0.08, 0.04, 0.02)) -> dict:
    """Deformed values approach the closed value with shrinking error"""
    target = rip_unitary_rhs()
    errors = [abs(deformation_limit(s) - target) for s in s_values]
    monotone = all(b < a for a, b in zip(errors, errors[1:]))
    return {"s": list(s_values), "errors": errors, "monotone": monotone, "target": target}


def reg_eisenstein_finite_part(radius: float = 0.02) -> float:
    """Constant Laurent coefficient at 0 of s -> reg integral of E_reg(1/2+s)

    A single Eisenstein series has R = 0, so the family is its degenerate part.
    """
    lam_m1 = lambda_jet(0).residue.real

    def family(values):
        return np.array([eisenstein_profile(0.5 + v, 0, "reg").degenerate_part() / lam_m1 for v in values])

    return Jet.from_function(family, 0, -1, 1, radius=radius).coeff(0).real
