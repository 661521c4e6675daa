"""
Tests for Eisenstein series on SL2(Z)\\H
Checks values against an mpmath evaluation and the direct lattice sum, invariance, constant terms and Hecke operators
"""

import sys
import os
import math
import logging
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import numpy as np
from mpmath import mp, besselk, cos, gamma, mpc, mpf, pi, sqrt, zeta

from automorphic.complexfn import PoleError, lambda_complete
from automorphic.eisenstein import (EPSTEIN_POINTS, EisSpec, Point, act, constant_term, delta_square,
                                    delta_square_kernel, epstein_sum, error_bound, eval, eval_many,
                                    hecke_apply_many, ramanujan_tau, reduce, truncate)
from automorphic.scalars import hecke_eigenvalue, lambda_jet, m_scalar, reg_hecke_defect


def completed_reference(s, x, y, terms=40):
    """Lambda(1+2s) E(s, z) from its Fourier expansion, evaluated in mpmath"""
    mp.dps = 25
    s, x, y = mpc(s), mpf(x), mpf(y)

    def xi(w):
        return pi ** (-w / 2) * gamma(w / 2) * zeta(w)

    total = xi(1 + 2 * s) * y ** (0.5 + s) + xi(1 - 2 * s) * y ** (0.5 - s)
    for n in range(1, terms + 1):
        sigma = sum(mpf(d) ** (-2 * s) for d in range(1, n + 1) if n % d == 0)
        total += 4 * sqrt(y) * mpf(n) ** s * sigma * besselk(s, 2 * pi * n * y) * cos(2 * pi * n * x)
    return complex(total)


def test_reference_values():
    """Completed series against the mpmath expansion at reduced points"""
    print("🧪 Testing Eisenstein values...")
    for s in (0.3, 0.2 + 0.7j, 0.17j):
        for x, y in ((0.1, 1.2), (-0.37, 0.95), (0.25, 2.4)):
            computed = eval(EisSpec(s0=s, variant="star"), Point(x, y))
            expected = completed_reference(s, x, y)
            assert abs(computed - expected) <= 1e-9 * max(1.0, abs(expected)), (s, x, y)
    rough, z = EisSpec(s0=0.3, fourier_terms=3), Point(0.1, 1.2)
    assert abs(eval(rough, z) - eval(EisSpec(s0=0.3), z)) <= error_bound(rough, z)
    assert error_bound(EisSpec(s0=0.3), z) < 1e-12
    print("   ✅ Eisenstein values test passed")


def test_variants():
    """plain = star / Lambda(1+2s); reg subtracts m(s)"""
    print("🧪 Testing series variants...")
    z = Point(0.13, 1.1)
    s = 0.6
    plain = eval(EisSpec(s0=s), z)
    star = eval(EisSpec(s0=s, variant="star"), z)
    assert abs(star / lambda_complete(1 + 2 * s) - plain) < 1e-12
    assert abs(eval(EisSpec(s0=s, variant="reg"), z) - (plain - m_scalar(s))) < 1e-12
    shift = eval(EisSpec(s0=0.5, variant="classical"), z) - eval(EisSpec(s0=0.5, variant="reg"), z)
    assert abs(shift - lambda_jet(0).coeff(0)) < 1e-8
    try:
        eval(EisSpec(s0=0.5), z)
        raise AssertionError("E(1/2) should raise")
    except PoleError:
        pass
    print("   ✅ Series variants test passed")


def test_modular_invariance():
    """E(gz) = E(z) and reduction into the fundamental domain"""
    print("🧪 Testing modular invariance...")
    spec = EisSpec(s0=0.3 + 0.2j)
    z = Point(0.21, 1.37)
    base = eval(spec, z)
    for g in ([[1, 1], [0, 1]], [[0, -1], [1, 0]], [[2, 1], [7, 4]], [[5, 2], [2, 1]]):
        assert abs(eval(spec, act(g, z)) - base) < 1e-9
    reduced, g = reduce(Point(3.3, 0.02))
    assert abs(reduced.x) <= 0.5 and reduced.x ** 2 + reduced.y ** 2 >= 1 - 1e-12
    print("   ✅ Modular invariance test passed")


def test_laplacian():
    """Delta E(s) = (1/4 - s^2) E(s) by central differences"""
    print("🧪 Testing Laplace eigenvalue...")
    spec = EisSpec(s0=0.3)
    h, x, y = 1e-3, 0.13, 1.2
    v = eval_many(spec, [x, x + h, x - h, x, x], [y, y, y, y + h, y - h])
    laplacian = -y ** 2 * ((v[1] + v[2] - 2 * v[0]) + (v[3] + v[4] - 2 * v[0])) / h ** 2
    assert abs(laplacian / v[0] - (0.25 - 0.09)) < 1e-4 * 0.16
    print("   ✅ Laplace eigenvalue test passed")


def test_constant_term_and_truncation():
    """x-average equals the constant term; truncation removes it above T"""
    print("🧪 Testing constant term and truncation...")
    spec = EisSpec(s0=0.3)
    n = 64
    grid = (np.arange(n) + 0.5) / n - 0.5
    average = np.mean(eval_many(spec, grid, np.full(n, 2.0)))
    expected = 2.0 ** 0.8 + m_scalar(0.3) * 2.0 ** 0.2
    assert abs(constant_term(spec, 2.0) - expected) < 1e-12
    assert abs(average - expected) < 1e-10
    low, high = Point(0.2, 1.5), Point(0.1, 3.0)
    assert truncate(spec, low, 2.0) == eval(spec, low)
    assert abs(truncate(spec, high, 2.0) - (eval(spec, high) - constant_term(spec, 3.0))) < 1e-12
    print("   ✅ Constant term and truncation test passed")


def test_hecke_eigenvalues():
    """T(p) E(s) = lambda_p(s) E(s)"""
    print("🧪 Testing Hecke eigenvalues...")
    x, y = np.array([0.11, -0.31]), np.array([1.3, 0.95])
    spec = EisSpec(s0=0.3 + 0.1j)
    sampler = lambda a, b: eval_many(spec, a, b)
    for p in (2, 3, 5):
        image = hecke_apply_many(sampler, p, x, y)
        assert np.max(np.abs(image - hecke_eigenvalue(p, spec.s0) * sampler(x, y))) < 1e-8
    print("   ✅ Hecke eigenvalues test passed")


def test_reg_hecke_defect():
    """(T(p) - 1) E_reg is a constant and (T(p) - 1)^2 kills it, at every point"""
    print("🧪 Testing Hecke action on E_reg...")
    x, y = np.array([0.11, -0.31, 0.4, 0.0]), np.array([1.3, 0.95, 2.2, 1.0])
    reg = lambda a, b: eval_many(EisSpec(s0=0.5, variant="reg"), a, b)
    assert abs(reg_hecke_defect(2) - math.log(2) / math.pi) < 1e-9
    for p in (2, 3, 5):
        shifted = lambda a, b, p=p: hecke_apply_many(reg, p, a, b) - reg(a, b)
        once = shifted(x, y)
        assert np.max(np.abs(once - reg_hecke_defect(p))) < 1e-6, (p, once)
        twice = hecke_apply_many(shifted, p, x, y) - once
        assert np.max(np.abs(twice)) < 1e-6, (p, twice)
    print("   ✅ Hecke action on E_reg test passed")


def test_epstein_sum():
    """Fourier evaluation against the direct lattice sum where it converges"""
    print("🧪 Testing lattice-sum oracle...")
    for s, (x, y) in EPSTEIN_POINTS:
        expected = epstein_sum(s, Point(x, y))
        computed = eval(EisSpec(s0=s), Point(x, y))
        assert abs(computed - expected) <= 1e-8 * abs(expected), (s, x, y, computed, expected)
    try:
        epstein_sum(0.3, Point(0.0, 1.0))
        raise AssertionError("Re s <= 1/2 should raise")
    except ValueError:
        pass
    print("   ✅ Lattice-sum oracle test passed")


def test_delta():
    """Ramanujan tau and the constant term of |Delta|^2 y^12"""
    print("🧪 Testing Delta...")
    assert ramanujan_tau(6)[1:] == (1, -24, 252, -1472, 4830, -6048)
    t = 1.3
    n = 256
    grid = (np.arange(n) + 0.5) / n - 0.5
    average = np.mean(delta_square(grid, np.full(n, t)))
    assert abs(average - delta_square_kernel([t])[0]) <= 1e-10 * abs(average)
    print("   ✅ Delta test passed")


def run_all_tests():
    """Run all tests and provide summary"""
    print("🚀 Starting Eisenstein series tests\n")

    tests = [
        ("Reference values", test_reference_values),
        ("Variants", test_variants),
        ("Modular invariance", test_modular_invariance),
        ("Laplacian", test_laplacian),
        ("Constant term and truncation", test_constant_term_and_truncation),
        ("Hecke eigenvalues", test_hecke_eigenvalues),
        ("Hecke action on E_reg", test_reg_hecke_defect),
        ("Lattice-sum oracle", test_epstein_sum),
        ("Delta", test_delta),
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
