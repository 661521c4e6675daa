"""
Tests for Gamma_0(N) coset normal forms
"""

import sys
import os
import logging
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import numpy as np

from automorphic.coset import (NotUnimodularError, as_intmat, centered, decompose, enumerate_cosets_r2,
                               gamma0_index, in_normal_form, random_sl, soundness_checks, verify)


def test_unimodular_input():
    """Non-square, non-integer and det != 1 inputs are rejected"""
    print("🧪 Testing unimodular input...")
    for bad in ([[2, 0], [0, 1]], [[1, 2, 3], [0, 1, 0]], [[1, 0.5], [0, 1]]):
        try:
            as_intmat(bad)
            raise AssertionError(f"{bad} should be rejected")
        except NotUnimodularError:
            pass
    assert as_intmat(np.array([[2, 1], [7, 4]])).det() == 1
    print("   ✅ Unimodular input test passed")


def test_centered_representatives():
    """Centered residues lie in [-N/2, N/2]"""
    print("🧪 Testing centered residues...")
    assert centered(3, 6) == 3
    assert centered(4, 6) == -2
    assert centered(-7, 5) == -2
    assert all(abs(centered(v, 7)) <= 3.5 for v in range(-20, 20))
    print("   ✅ Centered residues test passed")


def test_decompose_examples():
    """Known matrices decompose and verify for both flavors"""
    print("🧪 Testing decompositions...")
    for A, N in (([[2, 1], [7, 4]], 5), ([[1, 0], [3, 1]], 6), ([[0, -1], [1, 0]], 4)):
        for flavor in ("gamma0", "gamma0_minus"):
            rep = decompose(A, N, flavor)
            assert in_normal_form(rep)
            assert verify(A, rep), (A, N, flavor)
    rep = decompose([[1, 0], [0, 1]], 7)
    assert rep.to_dict()["n_minus"] == [[1, 0], [0, 1]]
    A = [[2, 3, 1], [1, 2, 1], [1, 1, 1]]
    assert verify(A, decompose(A, 12))
    print("   ✅ Decompositions test passed")


def test_enumeration():
    """The r = 2 walk finds index-many distinct verified cosets"""
    print("🧪 Testing coset enumeration...")
    assert [gamma0_index(N) for N in (2, 3, 4, 6, 12)] == [3, 4, 6, 12, 24]
    for N in range(2, 13):
        result = enumerate_cosets_r2(N)
        assert result["passed"], result
        assert result["count"] == gamma0_index(N)
    print("   ✅ Coset enumeration test passed")


def test_random_soundness():
    """Random SL_r(Z) matrices for r = 2, 3, 4"""
    print("🧪 Testing random soundness...")
    rng = np.random.default_rng(5)
    M = random_sl(3, rng)
    assert M.det() == 1 and max(abs(int(v)) for v in M) <= 50
    report = soundness_checks(trials=60, seed=11)
    assert report["passed"], report["failures"]
    print("   ✅ Random soundness test passed")


def run_all_tests():
    """Run all tests and provide summary"""
    print("🚀 Starting coset normal form tests\n")

    tests = [
        ("Unimodular input", test_unimodular_input),
        ("Centered residues", test_centered_representatives),
        ("Decompositions", test_decompose_examples),
        ("Enumeration", test_enumeration),
        ("Random soundness", test_random_soundness),
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
