"""
Tests for the archimedean Mellin pair and Whittaker functions
"""

import sys
import os
import math
import logging
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import numpy as np
from scipy.special import gamma

from automorphic.mellin_arch import (BandError, LogGridFn, decay_checks, decay_table, f1_decompose,
                                     finite_whittaker, global_sum_checks, global_whittaker_sum, mellin,
                                     mellin_checks, roundtrip_error, sobolev_checks, sobolev_ratio,
                                     whittaker_arch, whittaker_constant)
from automorphic.padic import PadicCharSpec, whittaker_na


def test_mellin_values():
    """Gamma(2) = 1, the Gaussian at 1 and the band guard"""
    print("🧪 Testing Mellin transform...")
    exp_fn = LogGridFn.from_callable(lambda y: np.exp(-y), band=(0.0, math.inf))
    assert abs(mellin(exp_fn, 2.0)[0] - 1) < 1e-10
    assert abs(mellin(exp_fn, 3 + 1j)[0] - complex(gamma(3 + 1j))) < 1e-9
    try:
        mellin(exp_fn, -0.5)
        raise AssertionError("Re s outside the band should raise")
    except BandError:
        pass
    report = mellin_checks()
    assert all(row["ok"] for row in report.values()), report
    print("   ✅ Mellin transform test passed")


def test_roundtrip():
    """inverse(mellin(f)) = f on smooth rapidly decaying functions"""
    print("🧪 Testing Mellin round trip...")
    error = roundtrip_error(lambda v: np.exp(-v - 1 / v), 2.0, [0.3, 1.0, 2.5])
    assert error < 1e-8, error
    print("   ✅ Mellin round trip test passed")


def test_f1_decompose():
    """Even/odd parts on R and angular modes on C"""
    print("🧪 Testing norm-one decomposition...")
    gauss = lambda t: np.exp(-np.pi * np.abs(t) ** 2)
    even = f1_decompose(gauss, "R", 1, K=200)
    odd = f1_decompose(gauss, "R", -1, K=200)
    assert np.allclose(even.values, np.exp(-np.pi * even.t ** 2))
    assert np.max(np.abs(odd.values)) < 1e-15
    radial = f1_decompose(gauss, "C", 0, K=200)
    first = f1_decompose(lambda z: z * gauss(z), "C", -1, K=200)
    assert np.allclose(radial.values, np.exp(-np.pi * radial.t ** 2))
    assert np.allclose(first.values, radial.t * np.exp(-np.pi * radial.t ** 2))
    try:
        f1_decompose(gauss, "R", 2)
        raise AssertionError("xi_index 2 on R should raise")
    except ValueError:
        pass
    print("   ✅ Norm-one decomposition test passed")


def test_whittaker_paths():
    """The t-integral equals 2 |y|^{1/2} K_s(2 pi |y|)"""
    print("🧪 Testing archimedean Whittaker function...")
    assert abs(whittaker_constant() - 2) < 1e-10
    for s, y in ((0.3 + 0.2j, 0.5), (0.1j, 2.0), (-0.4, 1.3)):
        closed = whittaker_arch(s, y)
        assert abs(whittaker_arch(s, y, path="integral") - closed) <= 1e-8 * abs(closed)
        assert abs(whittaker_arch(-s, y) - closed) <= 1e-10 * abs(closed)
    report = decay_checks()
    assert all(row["ok"] for row in report.values()), report
    table = decay_table()
    assert list(table.columns) == ["regime", "y", "abs_W"] and len(table) == 10
    print("   ✅ Archimedean Whittaker function test passed")


def test_global_sum():
    """Finite Whittaker product and the rapidly decaying global sum"""
    print("🧪 Testing global Whittaker sum...")
    s = 0.3
    assert abs(finite_whittaker(s, 1) - 1) < 1e-15
    product = whittaker_na(PadicCharSpec(2, s=s), 1) * whittaker_na(PadicCharSpec(3, s=s), 1)
    assert abs(finite_whittaker(s, 6) - product) < 1e-14
    # prod_p W_p(a(n)) = n^{-1/2} n^s sigma_{-2s}(n)
    assert abs(finite_whittaker(s, 6) - 6 ** -0.5 * 6 ** s * sum(d ** (-2 * s) for d in (1, 2, 3, 6))) < 1e-12
    assert global_whittaker_sum(s, 200.0) == 0.0
    report = global_sum_checks()
    assert all(row["ok"] for row in report.values()), report
    print("   ✅ Global Whittaker sum test passed")


def test_sobolev():
    """Sup-norm ratios stay bounded and scale as predicted"""
    print("🧪 Testing Sobolev ratios...")
    ratio = sobolev_ratio(lambda x: np.exp(-np.pi * x ** 2))
    assert 0 < ratio <= 1.0
    report = sobolev_checks()
    assert all(row["ok"] for row in report.values()), report
    print("   ✅ Sobolev ratios test passed")


def run_all_tests():
    """Run all tests and provide summary"""
    print("🚀 Starting archimedean Mellin tests\n")

    tests = [
        ("Mellin transform", test_mellin_values),
        ("Round trip", test_roundtrip),
        ("Norm-one decomposition", test_f1_decompose),
        ("Whittaker paths", test_whittaker_paths),
        ("Global sum", test_global_sum),
        ("Sobolev ratios", test_sobolev),
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
