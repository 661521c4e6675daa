"""
Archimedean Mellin analysis
Mellin pair on a logarithmic grid, F^1-Fourier decomposition, Whittaker functions of the
Gaussian section, their decay, the global Whittaker sum and Sobolev-type norm checks
"""

import math
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from sympy import factorint

from automorphic.complexfn import bessel_k, bessel_k_grid
from automorphic.config import AutomorphicError
from automorphic.eisenstein import completed_values
from automorphic.padic import PadicCharSpec, whittaker_na

logger = logging.getLogger(__name__)


class BandError(AutomorphicError):
    """Raised when a Mellin transform is requested outside its convergence band"""


@dataclass
class LogGridFn:
    """Samples f(e^{kh}) for k = -K..K"""
    values: np.ndarray
    h: float = 0.05
    K: int = 400
    band: Optional[Tuple[float, float]] = None
    decays_low: bool = field(init=False)
    decays_high: bool = field(init=False)

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError(f"grid step must be positive, got {self.h}")
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (2 * self.K + 1,):
            raise ValueError(f"expected {2 * self.K + 1} samples, got {self.values.shape}")
        peak = float(np.max(np.abs(self.values))) or 1.0
        self.decays_low = abs(self.values[0]) <= 1e-12 * peak
        self.decays_high = abs(self.values[-1]) <= 1e-12 * peak

    @property
    def log_t(self) -> np.ndarray:
        return self.h * np.arange(-self.K, self.K + 1)

    @property
    def t(self) -> np.ndarray:
        return np.exp(self.log_t)

    @classmethod
    def from_callable(cls, f: Callable, h: float = 0.05, K: int = 400,
                      band: Optional[Tuple[float, float]] = None) -> "LogGridFn":
        grid = np.exp(h * np.arange(-K, K + 1))
        return cls(np.asarray(f(grid), dtype=complex), h=h, K=K, band=band)


def _check_band(f: LogGridFn, sigma: float, tol: float = 1e-10):
    if f.band is not None and not f.band[0] < sigma < f.band[1]:
        raise BandError(f"Re s = {sigma} is outside the band {f.band}")
    weighted = np.abs(f.values) * np.exp(sigma * f.log_t)
    peak = float(np.max(weighted))
    if peak > 0 and max(weighted[0], weighted[-1]) > tol * peak:
        raise BandError(f"f(y) y^{sigma} does not decay at the ends of the grid")


def mellin(f: LogGridFn, s) -> np.ndarray:
    """Mf(s) = int_0^inf f(y) y^s dy/y by the trapezoid rule in log y"""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    for sigma in np.unique(s.real):
        _check_band(f, float(sigma))
    return f.h * (np.exp(np.outer(s, f.log_t)) @ f.values)


def inverse_mellin(M: Callable, sigma: float, y, step: float = 0.1, L: float = 80.0) -> np.ndarray:
    """f(y) = (1/2 pi) int M(sigma + i tau) y^{-sigma - i tau} dtau over |tau| <= L"""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    tau = np.arange(-L, L + step / 2, step)
    s = sigma + 1j * tau
    m = np.asarray(M(s), dtype=complex)
    edge = max(abs(m[0]), abs(m[-1]))
    if edge > 1e-12 * float(np.max(np.abs(m))):
        logger.warning(f"M(sigma + i tau) is still {edge:.2e} at |tau| = {L}; inverse may be truncated")
    return step / (2 * np.pi) * (np.exp(-np.outer(np.log(y), s)) @ m)


def roundtrip_error(f: Callable, sigma: float, y_values: Sequence[float], h: float = 0.05, K: int = 400) -> float:
    """max |f(y) - inverse(mellin(f))(y)|"""
    grid_fn = LogGridFn.from_callable(f, h=h, K=K)
    y = np.asarray(y_values, dtype=float)
    back = inverse_mellin(lambda s: mellin(grid_fn, s), sigma, y)
    return float(np.max(np.abs(back - f(y))))


def f1_decompose(f: Callable, place: str = "R", xi_index=1, h: float = 0.05, K: int = 400,
                 angles: int = 64) -> LogGridFn:
    """Function on R_+ attached to f and a character of the norm-one group

    R: xi_index = +1 or -1 gives (f(t) + xi_index f(-t))/2.
    C: xi_index = n gives (1/2 pi) int f(t e^{i theta}) e^{i n theta} dtheta.
    """
    t = np.exp(h * np.arange(-K, K + 1))
    if place == "R":
        if xi_index not in (1, -1):
            raise ValueError("xi_index on R must be +1 or -1")
        values = (np.asarray(f(t), dtype=complex) + xi_index * np.asarray(f(-t), dtype=complex)) / 2
    elif place == "C":
        theta = 2 * np.pi * np.arange(angles) / angles
        z = np.outer(t, np.exp(1j * theta))
        values = np.mean(np.asarray(f(z), dtype=complex) * np.exp(1j * int(xi_index) * theta)[None, :], axis=1)
    else:
        raise ValueError(f"place must be 'R' or 'C', got {place!r}")
    return LogGridFn(values, h=h, K=K)


def _whittaker_integral(s: complex, y: float, h: float = 0.01, span: float = 6.0) -> complex:
    """|y|^{1/2-s} int_{R^x} e^{-pi(t^2 + y^2/t^2)} |t|^{2s} d^x t by the trapezoid rule in log t"""
    ay = abs(y)
    centre = 0.5 * math.log(ay)
    u = centre + np.arange(-span, span + h / 2, h)
    integrand = np.exp(-np.pi * (np.exp(2 * u) + ay ** 2 * np.exp(-2 * u)) + 2 * s * u)
    return 2 * h * complex(np.sum(integrand)) * ay ** (0.5 - s)


@lru_cache(maxsize=1)
def whittaker_constant(s_ref: complex = 0.3 + 0.1j, y_ref: float = 1.0) -> complex:
    """Ratio between the t-integral and |y|^{1/2} K_s(2 pi |y|) at a reference point"""
    return _whittaker_integral(s_ref, y_ref) / (abs(y_ref) ** 0.5 * bessel_k(s_ref, 2 * np.pi * abs(y_ref)))


def whittaker_arch(s: complex, y: float, path: str = "closed") -> complex:
    """Whittaker function of the standard Gaussian section at a(y)

    path "integral" integrates the partially transformed Gaussian directly, path "closed"
    uses C |y|^{1/2} K_s(2 pi |y|) with C fixed once by the integral.
    """
    if y == 0:
        raise ValueError("the Whittaker function is evaluated at y != 0")
    s = complex(s)
    if path == "integral":
        return _whittaker_integral(s, y)
    if path != "closed":
        raise ValueError(f"unknown path {path!r}")
    return whittaker_constant() * abs(y) ** 0.5 * bessel_k(s, 2 * np.pi * abs(y))


def loglog_slope(x: Sequence[float], values: Sequence[complex]) -> float:
    """Least-squares slope of log|values| against log x"""
    lx = np.log(np.asarray(x, dtype=float))
    lv = np.log(np.abs(np.asarray(values, dtype=complex)))
    return float(np.polyfit(lx, lv, 1)[0])


def decay_checks(s: complex = 0.3 + 0.2j, eps: float = 0.1, N: int = 10) -> Dict[str, dict]:
    """Large-y and small-y behaviour of the archimedean Whittaker function"""
    s = complex(s)
    large_y = [2.0, 4.0, 8.0, 16.0]
    large = [whittaker_arch(s, y) for y in large_y]
    large_slope = loglog_slope(large_y, large)

    small_y = [0.5, 0.25, 0.125]
    small = [whittaker_arch(s, y) for y in small_y]
    exponent = 0.5 - abs(s.real) - eps
    fitted = max(abs(w) / y ** exponent for w, y in zip(small, small_y))

    tiny_y = [2.0 ** -k for k in (16, 18, 20)]
    tiny_slope = loglog_slope(tiny_y, [whittaker_arch(s, y) for y in tiny_y])
    predicted = 0.5 - abs(s.real)

    symmetry = max(abs(whittaker_arch(s, y) - whittaker_arch(-s, y)) for y in (0.25, 1.0, 3.0))
    agreement = max(abs(whittaker_arch(s, y, "integral") - whittaker_arch(s, y)) / abs(whittaker_arch(s, y))
                    for y in (0.125, 0.5, 1.0, 2.0, 4.0))
    report = {
        "large_y": {"y": large_y, "slope": large_slope, "bound_exponent": -N, "ok": large_slope <= -N},
        "small_y": {"y": small_y, "fitted_constant": fitted, "exponent": exponent,
                    "ok": bool(np.isfinite(fitted))},
        "small_y_slope": {"slope": tiny_slope, "predicted": predicted,
                          "ok": abs(tiny_slope - predicted) <= 0.05},
        "s_symmetry": {"max_difference": symmetry, "ok": symmetry <= 1e-10},
        "two_paths": {"max_relative": agreement, "constant": [whittaker_constant().real, whittaker_constant().imag],
                      "ok": agreement <= 1e-8},
    }
    for key, row in report.items():
        if not row["ok"]:
            logger.error(f"archimedean Whittaker check {key} failed: {row}")
    return report


def finite_whittaker(s: complex, n: int) -> complex:
    """prod_p W_p(a(n)) for the unramified data alpha = p^{-s}, beta = p^s"""
    n = abs(int(n))
    value = 1 + 0j
    for p, k in factorint(n).items():
        value *= whittaker_na(PadicCharSpec(int(p), s=s), int(k))
    return value


def global_whittaker_sum(s: complex, y: float, tol: float = 1e-16, n_max: int = 100_000) -> float:
    """sum over alpha in Q^x of |W(a(alpha y))|; only nonzero integers contribute"""
    if y <= 0:
        raise ValueError(f"y must be positive, got {y}")
    s = complex(s)
    constant = whittaker_constant()
    total, n, block = 0.0, 1, 64
    while n <= n_max:
        ns = np.arange(n, n + block)
        archimedean = np.abs(constant) * np.sqrt(ns * y) * np.abs(bessel_k_grid([s], 2 * np.pi * ns * y)[0])
        if not np.any(archimedean):
            break
        terms = archimedean * np.array([abs(finite_whittaker(s, k)) for k in ns])
        total += 2 * float(np.sum(terms))
        # later terms shrink at least geometrically once 2 pi y n exceeds |Re s|
        ratio = math.exp(-2 * math.pi * y) * (1 + 1 / ns[-1]) ** (abs(s.real) + 1.5)
        if ratio < 1 and terms[-1] * ratio / (1 - ratio) * 2 <= tol * max(total, 1e-300):
            break
        n += block
    return total


def global_sum_checks(s: complex = 0.3, y_values=(4.0, 8.0, 16.0)) -> Dict[str, dict]:
    """Rapid decay across doubling y and agreement with E* - E*_N"""
    sums = [global_whittaker_sum(s, y) for y in y_values]
    ratios = [b / a if a else 0.0 for a, b in zip(sums, sums[1:])]

    x = np.linspace(-0.5, 0.5, 201)
    y = 2.0
    reference = {}
    for label, s_ref in (("real", 0.3), ("critical", 0.25j)):
        nonconstant = completed_values(s_ref, x, np.full(x.size, y), part="nonconstant")[0]
        total = global_whittaker_sum(s_ref, y)
        reference[label] = {"sup_over_x": float(np.max(np.abs(nonconstant))), "sum": total,
                            "at_zero": float(abs(nonconstant[100]))}
    reference_ok = (reference["critical"]["sup_over_x"] <= reference["critical"]["sum"] * (1 + 1e-8)
                    and abs(reference["real"]["at_zero"] - reference["real"]["sum"]) <= 1e-8 * reference["real"]["sum"])
    return {
        "doubling": {"y": list(y_values), "sums": sums, "ratios": ratios,
                     "ok": all(r < 2.0 ** -10 for r in ratios)},
        "eisenstein": dict(reference, ok=reference_ok),
        "underflow": {"value": global_whittaker_sum(s, 200.0), "ok": global_whittaker_sum(s, 200.0) == 0.0},
    }


def _norms_on_line(values: np.ndarray, dx: float) -> Tuple[float, float, float]:
    derivative = np.gradient(values, dx)
    return (float(np.max(np.abs(values))), float(np.sum(np.abs(values)) * dx),
            float(np.sum(np.abs(derivative)) * dx))


def sobolev_ratio(phi: Callable, half_width: float = 12.0, points: int = 24001) -> float:
    """||Phi||_inf / (||Phi||_1 + ||Phi'||_1) on a uniform grid"""
    x = np.linspace(-half_width, half_width, points)
    sup, l1, d1 = _norms_on_line(phi(x), x[1] - x[0])
    return sup / (l1 + d1)


def sobolev_checks(scales=(1.0, 2.0, 4.0, 8.0), sigma: float = 2.0) -> Dict[str, dict]:
    """Empirical constants for the norm relations on a Gaussian corpus, a scaling family and a bump"""
    corpus = {f"gauss_{a:g}": (lambda x, a=a: np.exp(-np.pi * a * x ** 2)) for a in (0.5, 1.0, 2.0)}
    corpus["bump"] = lambda x: np.exp(-1 / np.clip(1 - (8 * x) ** 2, 1e-300, None)) * (np.abs(8 * x) < 1)
    ratios, stable = {}, True
    for name, phi in corpus.items():
        coarse, fine = sobolev_ratio(phi, points=12001), sobolev_ratio(phi, points=48001)
        ratios[name] = fine
        stable &= abs(coarse - fine) <= 0.1 * fine
    report = {"sobolev": {"ratios": ratios, "max_ratio": max(ratios.values()), "stable": bool(stable),
                          "ok": bool(stable) and max(ratios.values()) <= 1.0}}

    base = corpus["gauss_1"]
    x = np.linspace(-12, 12, 48001)
    sup, l1, d1 = _norms_on_line(base(x), x[1] - x[0])
    scaling = []
    for lam in scales:
        observed = sobolev_ratio(lambda v: base(lam * v), half_width=12.0, points=48001)
        scaling.append({"lambda": lam, "observed": observed, "homogeneous": sup / (l1 / lam + d1)})
    report["scaling"] = {"rows": scaling, "ok": all(abs(r["observed"] - r["homogeneous"]) <= 1e-3 * r["homogeneous"]
                                                    for r in scaling)}

    # B/H relations on R_+: H_inf(Mf) <= B_1(f) and sup |f y^sigma| <= H_1(Mf)
    chain = []
    for name, f in {"exp": lambda y: np.exp(-y), "gauss": lambda y: np.exp(-np.pi * y ** 2),
                    "double": lambda y: np.exp(-y - 1 / y)}.items():
        grid_fn = LogGridFn.from_callable(f)
        b1 = float(np.sum(np.abs(grid_fn.values) * np.exp(sigma * grid_fn.log_t)) * grid_fn.h)
        b_inf = float(np.max(np.abs(grid_fn.values) * np.exp(sigma * grid_fn.log_t)))
        tau = np.arange(-80, 80.05, 0.1)
        m = np.abs(mellin(grid_fn, sigma + 1j * tau))
        h_inf, h1 = float(np.max(m)), float(np.sum(m) * 0.1 / (2 * np.pi))
        chain.append({"f": name, "H_inf": h_inf, "B_1": b1, "B_inf": b_inf, "H_1": h1,
                      "ok": h_inf <= b1 * (1 + 1e-10) and b_inf <= h1 * (1 + 1e-6)})
    report["mellin_seminorms"] = {"rows": chain, "ok": all(r["ok"] for r in chain)}
    return report


def mellin_checks() -> Dict[str, dict]:
    """Closed values and round trips on the smooth corpus"""
    exp_fn = LogGridFn.from_callable(lambda y: np.exp(-y), band=(0.0, math.inf))
    gauss_fn = LogGridFn.from_callable(lambda y: np.exp(-np.pi * y ** 2), K=600, band=(0.0, math.inf))
    gamma_2 = complex(mellin(exp_fn, 2.0)[0])
    gauss_1 = complex(mellin(gauss_fn, 1.0)[0])
    y = [0.3, 1.0, 2.5]
    errors = {
        "double_exponential": roundtrip_error(lambda v: np.exp(-v - 1 / v), 2.0, y),
        "gaussian": roundtrip_error(lambda v: np.exp(-np.pi * v ** 2), 2.0, y),
    }
    return {
        "gamma_at_2": {"computed": gamma_2.real, "expected": 1.0, "ok": abs(gamma_2 - 1) <= 1e-10},
        "gaussian_at_1": {"computed": gauss_1.real, "expected": 0.5, "ok": abs(gauss_1 - 0.5) <= 1e-10},
        "roundtrip": {"errors": errors, "ok": max(errors.values()) <= 1e-8},
    }


def decay_table(s: complex = 0.3 + 0.2j) -> pd.DataFrame:
    """|W(a(y))| on the large and small y grids used by the decay checks"""
    rows = []
    for regime, ys in (("large", (2.0, 4.0, 8.0, 16.0)), ("small", (0.5, 0.25, 0.125)),
                       ("tiny", tuple(2.0 ** -k for k in (16, 18, 20)))):
        for y in ys:
            rows.append({"regime": regime, "y": y, "abs_W": abs(whittaker_arch(s, y))})
    return pd.DataFrame(rows)
