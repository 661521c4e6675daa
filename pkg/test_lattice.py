"""
Tests for lattice sums over (1/m)Z and (1/m)Z[i]
"""

import sys
import os
import logging
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from scipy.special import zeta

from automorphic.lattice import (LatticeSpec, RadiusError, lattice_sum, lattice_table, part1_bound,
                                 part2_bound, verify_lemma)


def test_spec_validation():
    """Field, m and c are checked; defaults follow the field"""
    print("🧪 Testing lattice specs...")
    assert LatticeSpec().R == 1000 and LatticeSpec(field="Qi").R == 400
    assert LatticeSpec(field="Qi", m=3).ideal_norm == 9
    for bad in (dict(field="Q5"), dict(m=0), dict(c=1.0)):
        try:
            LatticeSpec(**bad)
            raise AssertionError(f"{bad} should be rejected")
        except ValueError:
            pass
    print("   ✅ Lattice specs test passed")


def test_exact_sums():
    """Over Z the sum at t = 10 is 2 zeta(3) 10^-3; the zero term adds 1"""
    print("🧪 Testing exact lattice sums...")
    spec = LatticeSpec(field="Q", c=3.0)
    expected = 2e-3 * zeta(3.0)
    assert abs(lattice_sum(spec, 10.0) - expected) < 1e-15
    assert abs(lattice_sum(spec, 10.0, include_zero=True) - (1 + expected)) < 1e-14
    # (1/2)Z at t = 20 is Z at t = 10
    assert abs(lattice_sum(LatticeSpec(field="Q", m=2, c=3.0), 20.0) - expected) < 1e-15
    try:
        lattice_sum(spec, 0.001, R=5)
        raise AssertionError("a radius inside the flat region should raise")
    except RadiusError:
        pass
    print("   ✅ Exact lattice sums test passed")


def test_gaussian_integers():
    """Radius doubling leaves the Z[i] sum unchanged"""
    print("🧪 Testing Z[i] sums...")
    spec = LatticeSpec(field="Qi", c=2.5)
    base = lattice_sum(spec, 10.0)
    wide = lattice_sum(spec, 10.0, R=800)
    assert abs(wide - base) <= 1e-9 * base
    # the four units give four equal smallest terms
    assert base > 4 * 10.0 ** -5
    print("   ✅ Z[i] sums test passed")


def test_bounds():
    """Closed forms of both bounds"""
    print("🧪 Testing bounds...")
    spec = LatticeSpec(field="Qi", m=2, c=2.5)
    assert abs(part1_bound(spec, 4.0) - 4 ** 7.5 * 4.0 ** -2.5) < 1e-9
    assert abs(part2_bound(spec, 0.5) - 0.5 ** -2 / 4 * (1 + 0.5 * 16 / 2 ** 0.5) ** 5.0) < 1e-9
    table = lattice_table("Q", 3.0, [1, 2], [10.0, 20.0], part=1)
    assert len(table) == 4 and (table["ratio"] > 0).all()
    print("   ✅ Bounds test passed")


def test_convergence_estimates():
    """Fitted constants and slopes for Q and Q(i)"""
    print("🧪 Testing convergence estimates...")
    for spec, grids in ((LatticeSpec(field="Q", c=3.0), dict(m_grid=(1, 2, 4))),
                        (LatticeSpec(field="Qi", c=2.5), dict(m_grid=(1, 2), small_m_grid=(1, 2)))):
        report = verify_lemma(spec, **grids)
        for key in ("part1", "part2", "radius_doubling"):
            assert report[key]["ok"], (spec.field, key, report[key])
        assert not report["table"].empty
    print("   ✅ Convergence estimates test passed")


def run_all_tests():
    """Run all tests and provide summary"""
    print("🚀 Starting lattice sum tests\n")

    tests = [
        ("Lattice specs", test_spec_validation),
        ("Exact sums", test_exact_sums),
        ("Z[i] sums", test_gaussian_integers),
        ("Bounds", test_bounds),
        ("Convergence estimates", test_convergence_estimates),
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
