"""
Tests for p-adic Schwartz-Bruhat functions
Covers the (D, delta, m) indices, Fourier transforms, norms, the discrete Mellin pair and Whittaker values
"""

import sys
import os
import math
import logging
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import numpy as np

from automorphic.padic import (DiscreteSeq, PadicCharSpec, PadicSchwartz, RamifiedCharacterError, b_norm,
                               discrete_mellin, h_norm, inverse_discrete_mellin, local_whittaker_bound,
                               radial_sequence, verify_padic, whittaker_na, whittaker_na_integral,
                               whittaker_support_floor)


def test_indices():
    """Tight (D, delta, m) for indicators and a shifted ball"""
    print("🧪 Testing indices...")
    p = 3
    shifted_ball = PadicSchwartz(p, 0, 1, [0, 1, 0])
    assert shifted_ball.indices() == (0, 1, 1)
    assert PadicSchwartz.indicator(p, 2).indices() == (2, 2, 0)
    assert PadicSchwartz.indicator(p, -1, dim=2).indices() == (-1, -1, 0)
    # constant on a coarser grid collapses to the indicator
    assert PadicSchwartz(p, 0, 2, np.ones(9)).indices() == (0, 0, 0)
    zero = PadicSchwartz(p, 0, 1, np.zeros(3))
    assert zero.is_zero and zero.indices() == (math.inf, -math.inf, 0)
    print("   ✅ Indices test passed")


def test_fourier():
    """F of 1_{p^2 Z_p}, the index identity and F F Phi(x) = Phi(-x)"""
    print("🧪 Testing Fourier transform...")
    p = 3
    hat = PadicSchwartz.indicator(p, 2).fourier()
    assert (hat.D, hat.delta) == (-2, -2)
    assert abs(hat.values[0] - p ** -2) < 1e-14
    rng = np.random.default_rng(3)
    for dim in (1, 2):
        for _ in range(10):
            phi = PadicSchwartz.random(p, dim, rng)
            for c_psi in (-1, 0, 2):
                transformed = phi.fourier(c_psi)
                assert transformed.D == -c_psi - phi.delta and transformed.delta == -c_psi - phi.D
            assert phi.fourier().fourier().equals(phi.reflect())
    print("   ✅ Fourier transform test passed")


def test_group_action():
    """Index invariance under GL_2(Z_p) monomials"""
    print("🧪 Testing group action...")
    p = 5
    phi = PadicSchwartz.from_callable(p, 0, 2, lambda j: (j[0] % 5 == 1) * (1 + j[1]), dim=2)
    swapped = phi.act([[0, 1], [1, 0]])
    assert swapped.indices() == phi.indices()
    assert swapped.act([[0, 1], [1, 0]]).equals(phi)
    print("   ✅ Group action test passed")


def test_norms():
    """L^l norms of balls and the sup/L^l relations"""
    print("🧪 Testing norms...")
    p = 3
    assert abs(PadicSchwartz.indicator(p, 0).norm(1) - 1) < 1e-14
    assert abs(PadicSchwartz.indicator(p, 1).norm(1) - 1 / 3) < 1e-14
    assert abs(PadicSchwartz.indicator(p, 1, dim=2).norm(2) - 1 / 3) < 1e-14
    assert PadicSchwartz.indicator(p, -1).norm(math.inf) == 1.0
    ball = PadicSchwartz.indicator(p, 0)
    # int_{Z_p} |x| dx = (1 - 1/p) / (1 - 1/p^2)
    assert abs(ball.seminorm(1, (1.0,)) - (1 - 1 / p) / (1 - p ** -2)) < 1e-12
    print("   ✅ Norms test passed")


def test_discrete_mellin():
    """Round trip and the B/H inequalities"""
    print("🧪 Testing discrete Mellin pair...")
    rng = np.random.default_rng(1)
    f = DiscreteSeq(5, -2, rng.normal(size=6) + 1j * rng.normal(size=6))
    back = inverse_discrete_mellin(lambda s: discrete_mellin(f, s), 5, 0.4, f.n)
    assert np.max(np.abs(back - f.values)) < 1e-12
    assert h_norm(lambda s: discrete_mellin(f, s), 5, 0.4, math.inf) <= b_norm(f, 0.4, 1) * (1 + 1e-12)
    phi = PadicSchwartz(3, 0, 1, [0, 1, 0])
    assert np.allclose(radial_sequence(phi, [-1, 0, 1]), [0, 0.5, 0])
    print("   ✅ Discrete Mellin pair test passed")


def test_whittaker():
    """Closed Whittaker values, the integral path and the small-y bound"""
    print("🧪 Testing p-adic Whittaker function...")
    spec = PadicCharSpec(3, s=0.2 + 0.3j)
    assert abs(whittaker_na(spec, 0) - 1) < 1e-15
    assert whittaker_na(spec, -1) == 0
    assert abs(whittaker_na(spec, 1) - 3 ** -0.5 * (spec.alpha + spec.beta)) < 1e-14
    unit_square = PadicSchwartz.indicator(3, 0, dim=2)
    for n in range(0, 6):
        assert abs(whittaker_na_integral(unit_square, spec, n) - whittaker_na(spec, n)) < 1e-12
    assert whittaker_support_floor(unit_square) == 0
    assert all(abs(whittaker_na(spec, n)) <= local_whittaker_bound(spec, n, 0.1) * (1 + 1e-12) for n in range(30))
    try:
        PadicCharSpec(3, xi_conductor=1)
        raise AssertionError("a ramified character should raise")
    except RamifiedCharacterError:
        pass
    print("   ✅ p-adic Whittaker function test passed")


def test_verify_corpus():
    """The random-corpus report passes for small primes"""
    print("🧪 Testing p-adic verification corpus...")
    for p in (2, 3):
        report = verify_padic(p, trials=40, seed=17)
        failed = [key for key, row in report.items() if not row["ok"]]
        assert not failed, failed
    print("   ✅ p-adic verification corpus test passed")


def run_all_tests():
    """Run all tests and provide summary"""
    print("🚀 Starting p-adic tests\n")

    tests = [
        ("Indices", test_indices),
        ("Fourier transform", test_fourier),
        ("Group action", test_group_action),
        ("Norms", test_norms),
        ("Discrete Mellin pair", test_discrete_mellin),
        ("Whittaker function", test_whittaker),
        ("Verification corpus", test_verify_corpus),
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
