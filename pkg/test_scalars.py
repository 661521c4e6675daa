"""
Tests for the special functions and scalar constants
Run this to check zeta, Gamma, Bessel K, Laurent jets and the constants of Q
"""

import sys
import os
import math
import logging
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import numpy as np
from mpmath import mp, besselk

from automorphic.complexfn import ContourError, Jet, PoleError, bessel_k, bessel_k_grid, gamma, lambda_complete, zeta
from automorphic.scalars import (functional_B_quadrature, functionals_BC, hecke_eigenvalue, hecke_scalar,
                                 invariance_defect, lambda_jet, lambda_jet_direct, lambda_residue_forms,
                                 m_scalar, spherical_pole_residue, volume_forms, volume_pgl2)


def test_zeta_and_gamma():
    """Closed values and poles"""
    print("🧪 Testing zeta and Gamma...")
    assert abs(zeta(2) - math.pi ** 2 / 6) < 1e-12
    assert abs(zeta(-1) + 1 / 12) < 1e-12
    assert abs(zeta(0) + 0.5) < 1e-12
    assert abs(gamma(0.5) - math.sqrt(math.pi)) < 1e-12
    try:
        gamma(-2)
        raise AssertionError("Gamma(-2) should raise")
    except PoleError:
        pass
    print("   ✅ zeta and Gamma test passed")


def test_completed_zeta():
    """Lambda(s) = Lambda(1 - s) and the residues at 0 and 1"""
    print("🧪 Testing completed zeta...")
    rng = np.random.default_rng(7)
    s = rng.uniform(-3, 4, 20) + 1j * rng.uniform(-10, 10, 20)
    assert np.max(np.abs(lambda_complete(s) - lambda_complete(1 - s)) / np.abs(lambda_complete(s))) < 1e-10
    assert abs(lambda_complete(2) - math.pi / 6) < 1e-12
    assert abs(Jet.from_function(lambda_complete, 0, -1, 1).residue + 1) < 1e-9
    assert abs(Jet.from_function(lambda_complete, 1, -1, 1).residue - 1) < 1e-9
    print("   ✅ Completed zeta test passed")


def test_jet_arithmetic():
    """Products, reciprocals and derivatives of truncated Laurent series"""
    print("🧪 Testing jet arithmetic...")
    pole = Jet(0, -1, [1.0, 2.0, 3.0])
    square = pole * pole
    assert square.k_min == -2
    assert abs(square.coeff(-2) - 1) < 1e-14 and abs(square.coeff(-1) - 4) < 1e-14
    one = pole * pole.reciprocal()
    assert abs(one.coeff(0) - 1) < 1e-12 and abs(one.coeff(1)) < 1e-12
    exp_jet = Jet.from_function(np.exp, 0.3, 0, 4)
    assert abs(exp_jet.derivative(3) - math.exp(0.3)) < 1e-9
    assert pole.coeff(-3) == 0
    print("   ✅ Jet arithmetic test passed")


def test_contour_round_off():
    """A function that vanishes up to round-off has a zero jet; a real inner pole still raises"""
    print("🧪 Testing contour round-off floor...")
    rng = np.random.default_rng(2)
    noise = lambda s: 1e-15 * (rng.normal(size=s.shape) + 1j * rng.normal(size=s.shape))
    jet = Jet.from_function(noise, 0.5, -5, 1)
    assert np.max(np.abs(jet.coeffs * 0.05 ** np.arange(-5, 2))) < 1e-13
    try:
        Jet.from_function(lambda s: (s - 0.5) ** -7, 0.5, -5, 1)
        raise AssertionError("a pole of order 7 inside the circle should raise")
    except ContourError:
        pass
    print("   ✅ Contour round-off floor test passed")


def test_bessel_k():
    """Quadrature and grid K against mpmath"""
    print("🧪 Testing Bessel K...")
    mp.dps = 30
    for nu, y in ((0.5, 1.0), (0.3 + 0.2j, 2.5), (0.25j, 0.4), (1.7, 10.0)):
        expected = complex(besselk(nu, y))
        assert abs(bessel_k(nu, y) - expected) <= 1e-10 * abs(expected)
    grid = bessel_k_grid([0.3 + 0.2j], [0.5, 3.0, 12.0])[0]
    for value, y in zip(grid, (0.5, 3.0, 12.0)):
        expected = complex(besselk(0.3 + 0.2j, y))
        assert abs(value - expected) <= 1e-10 * abs(expected)
    assert abs(bessel_k(0.5, 2.0) - math.sqrt(math.pi / 4.0) * math.exp(-2.0)) < 1e-12
    print("   ✅ Bessel K test passed")


def test_lambda_constants():
    """lambda_F residue 3/pi, its closed forms and the volume pi/3"""
    print("🧪 Testing lambda_F constants...")
    jet = lambda_jet(2)
    assert abs(jet.residue - 3 / math.pi) < 1e-10
    forms = lambda_residue_forms()
    for key in ("via_Lambda2", "via_pole_at_0", "via_pole_at_1"):
        assert abs(forms[key] - 3 / math.pi) < 1e-10, key
    assert abs(forms["order_0"] - jet.coeff(0).real) < 1e-9
    direct = lambda_jet_direct(1)
    assert abs(direct.coeff(0) - jet.coeff(0)) < 1e-8
    closed, via_lambda = volume_forms()
    assert abs(closed - math.pi / 3) < 1e-12 and abs(via_lambda - math.pi / 3) < 1e-10
    assert abs(volume_pgl2() - math.pi / 3) < 1e-12
    print(f"   lambda^(0)(0) = {jet.coeff(0).real:.10f}")
    print("   ✅ lambda_F constants test passed")


def test_intertwining_scalar():
    """m(0) = -1, m(s) m(-s) = 1 and the pole at 1/2"""
    print("🧪 Testing intertwining scalar...")
    assert abs(m_scalar(0.0) + 1) < 1e-12
    s = 0.17 + 0.4j
    assert abs(m_scalar(s) * m_scalar(-s) - 1) < 1e-12
    residue = Jet.from_function(m_scalar, 0.5, -1, 1, radius=0.1).residue
    assert abs(residue - spherical_pole_residue()) < 1e-8
    print("   ✅ Intertwining scalar test passed")


def test_functional_B():
    """B from the Lambda jet agrees with the theta-series integral"""
    print("🧪 Testing B functional...")
    C, B = functionals_BC()
    assert C == 1.0
    assert abs(B - functional_B_quadrature()) < 1e-8
    print("   ✅ B functional test passed")


def test_hecke_scalars():
    """Eigenvalue 1 at s = 1/2 and the invariance defect log 2 / pi"""
    print("🧪 Testing Hecke scalars...")
    for p in (2, 3, 5):
        assert abs(hecke_eigenvalue(p, 0.5) - 1) < 1e-14
    jet = hecke_scalar(2, 0.0, 2)
    assert abs(jet.coeff(0) - 1) < 1e-12
    defect = (jet.derivative(1) * lambda_jet(0).residue).real
    assert abs(defect - math.log(2) / math.pi) < 1e-9
    # the invariance defect is the Hecke constant with the opposite sign
    assert abs(invariance_defect(2) + math.log(2) / math.pi) < 1e-9
    print("   ✅ Hecke scalars test passed")


def run_all_tests():
    """Run all tests and provide summary"""
    print("🚀 Starting special function and constant tests\n")

    tests = [
        ("Zeta and Gamma", test_zeta_and_gamma),
        ("Completed zeta", test_completed_zeta),
        ("Jet arithmetic", test_jet_arithmetic),
        ("Contour round-off", test_contour_round_off),
        ("Bessel K", test_bessel_k),
        ("lambda_F constants", test_lambda_constants),
        ("Intertwining scalar", test_intertwining_scalar),
        ("B functional", test_functional_B),
        ("Hecke scalars", test_hecke_scalars),
    ]

    results = []
    for test_name, test_func in tests:
        try:
            test_func()
            results.append((test_name, True))
        except Exception as e:
            print(f"   ❌ {test_name} test failed: {e!r}")
            results.append((test_name, False))
        print()

    print("📋 Test Summary:")
    passed = sum(1 for _, ok in results if ok)
    for test_name, ok in results:
        print(f"   {test_name}: {'✅ PASSED' if ok else '❌ FAILED'}")
    print(f"\n🎯 Overall: {passed}/{len(results)} tests passed")
    return passed == len(results)


if __name__ == "__main__":
    logging.basicConfig(level=logging.WARNING)
    sys.exit(0 if run_all_tests() else 1)
