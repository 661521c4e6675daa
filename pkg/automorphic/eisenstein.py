"""
Spherical Eisenstein series for SL2(Z)
Fourier-expansion evaluation in the spectral normalization s (center of symmetry s = 0),
s-derivatives through contour jets, constant terms, truncation, Hecke operators and Delta
"""

import math
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Tuple

import mpmath
import numpy as np

from automorphic.complexfn import (PoleError, bessel_k_grid, contour_coefficients,
                                   lambda_complete)
from automorphic.config import config
from automorphic.scalars import lambda_jet, m_scalar

logger = logging.getLogger(__name__)

VARIANTS = ("plain", "star", "reg", "classical")


@dataclass(frozen=True)
class Point:
    """z = x + iy in the upper half-plane; the height is y"""
    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError(f"a point of the upper half-plane needs y > 0, got {self.y}")


@dataclass
class EisSpec:
    """Which Eisenstein series to evaluate

    plain: E(s); star: Lambda(1+2s) E(s); reg: E(s) - m(s), holomorphic at s = 1/2;
    classical: E(s) - lambda^{(-1)}(0)/(s - 1/2), which at s = 1/2 equals reg plus lambda^{(0)}(0).
    """
    s0: complex = 0.0
    deriv: int = 0
    variant: str = "plain"
    fourier_terms: Optional[int] = None

    def __post_init__(self):
        self.s0 = complex(self.s0)
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        if self.deriv < 0:
            raise ValueError("deriv must be non-negative")
        if self.fourier_terms is not None and self.fourier_terms < 1:
            raise ValueError("fourier_terms must be at least 1")
        if self.variant in ("reg", "classical") and abs(self.s0 - 0.5) > 0.25:
            raise ValueError("the regularized variants are defined near s0 = 1/2 only")


def reduce(z: Point) -> Tuple[Point, np.ndarray]:
    """Move z into the standard fundamental domain; returns (z', gamma) with gamma z = z'"""
    x, y = float(z.x), float(z.y)
    g = np.eye(2, dtype=np.int64)
    for _ in range(10000):
        n = math.floor(x + 0.5)
        x -= n
        g = np.array([[1, -n], [0, 1]], dtype=np.int64) @ g
        r2 = x * x + y * y
        if r2 >= 1.0 - 1e-13:
            break
        x, y = -x / r2, y / r2
        g = np.array([[0, -1], [1, 0]], dtype=np.int64) @ g
    return Point(x, y), g


def reduce_many(x, y) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized reduction (no matrices)"""
    x = np.array(x, dtype=float, copy=True)
    y = np.array(y, dtype=float, copy=True)
    x -= np.floor(x + 0.5)
    for _ in range(10000):
        r2 = x * x + y * y
        inside = r2 < 1.0 - 1e-13
        if not inside.any():
            break
        x[inside] = -x[inside] / r2[inside]
        y[inside] = y[inside] / r2[inside]
        x -= np.floor(x + 0.5)
    return x, y


def act(g, z: Point) -> Point:
    """Mobius action of an integer matrix of determinant 1"""
    (a, b), (c, d) = np.asarray(g)
    w = complex(z.x, z.y)
    w = (a * w + b) / (c * w + d)
    return Point(w.real, w.imag)


def fourier_terms_for(y_min: float, fourier_terms: Optional[int] = None) -> int:
    if fourier_terms is not None:
        return int(fourier_terms)
    return int(math.ceil(10.0 / y_min)) + 20


def _divisor_sums(s: np.ndarray, M: int) -> np.ndarray:
    """sigma_{-2s}(n) for n = 1..M, shape (len(s), M)"""
    out = np.zeros((s.size, M), dtype=complex)
    for d in range(1, M + 1):
        out[:, d - 1::d] += np.exp(-2 * s * math.log(d))[:, None]
    return out


def fourier_radial(s, y, M: int) -> np.ndarray:
    """4 n^s sigma_{-2s}(n) sqrt(y) K_s(2 pi n y), shape (len(s), len(y), M)"""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    n = np.arange(1, M + 1)
    coef = 4 * np.exp(np.outer(s, np.log(n))) * _divisor_sums(s, M)
    K = bessel_k_grid(s, (2 * np.pi * np.outer(y, n)).ravel()).reshape(s.size, y.size, M)
    return coef[:, None, :] * K * np.sqrt(y)[None, :, None]


def completed_values(s, x, y, part: str = "full", fourier_terms: Optional[int] = None) -> np.ndarray:
    """E*(s, z) = Lambda(1+2s) E(s, z) for each s (rows) and reduced point (columns)

    part selects the full series, its constant term or its non-constant part.
    """
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    out = np.zeros((s.size, x.size), dtype=complex)

    if part in ("full", "constant"):
        logy = np.log(y)
        out += (lambda_complete(1 + 2 * s)[:, None] * np.exp(np.outer(0.5 + s, logy))
                + lambda_complete(1 - 2 * s)[:, None] * np.exp(np.outer(0.5 - s, logy)))

    if part in ("full", "nonconstant"):
        unique_y, inverse = np.unique(y, return_inverse=True)
        M = fourier_terms_for(unique_y.min(), fourier_terms)
        _check_truncation(s, unique_y.min(), M)
        radial = fourier_radial(s, unique_y, M)
        for j in range(M):
            out += radial[:, inverse, j] * np.cos(2 * np.pi * (j + 1) * x)[None, :]
    return out


def truncation_bound(s, y_min: float, M: int) -> float:
    """Majorant of the omitted Fourier terms n > M of the completed series"""
    n = M + 1
    sigma = float(np.max(np.abs(np.asarray(s, dtype=complex).real)))
    first = 4 * n ** (sigma + 1) * math.exp(-2 * math.pi * n * y_min)
    return first / (1 - math.exp(-2 * math.pi * y_min))


def _check_truncation(s: np.ndarray, y_min: float, M: int, tol: float = 1e-12):
    """Warn when the omitted Fourier terms may exceed tol"""
    bound = truncation_bound(s, y_min, M)
    if bound > tol:
        logger.warning(f"Fourier truncation at M={M} may leave a tail of {bound:.2e} at y={y_min:.3f}")


def _series_function(variant: str, x, y, part: str, fourier_terms: Optional[int]) -> Callable:
    """s-array -> values array (len(s), len(points)) for the requested variant"""
    lam_m1 = lambda_jet(0).residue

    def values(s):
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        star = completed_values(s, x, y, part=part, fourier_terms=fourier_terms)
        if variant == "star":
            return star
        plain = star / lambda_complete(1 + 2 * s)[:, None]
        if variant == "plain":
            return plain
        if part == "nonconstant":
            return plain
        if variant == "reg":
            return plain - m_scalar(s)[:, None]
        return plain - (lam_m1 / (s - 0.5))[:, None]

    return values


def _check_pole(spec: EisSpec):
    guard = config.get_tolerance_config()["pole_guard"]
    if spec.variant in ("plain", "star"):
        for pole in (0.5, -0.5):
            if abs(spec.s0 - pole) < guard:
                raise PoleError(f"E({spec.s0}) is within {guard} of the pole at s = {pole}")


def _evaluate(spec: EisSpec, x, y, part: str) -> np.ndarray:
    values = _series_function(spec.variant, x, y, part, spec.fourier_terms)
    near_half = abs(spec.s0 - 0.5) < 1e-12
    if spec.deriv == 0 and not (spec.variant in ("reg", "classical") and near_half):
        _check_pole(spec)
        return values(spec.s0)[0]
    coeffs = contour_coefficients(values, spec.s0, 0, spec.deriv)
    return math.factorial(spec.deriv) * coeffs[spec.deriv]


def eval_many(spec: EisSpec, x, y) -> np.ndarray:
    """Values (or s-derivatives) of the series at many points; points are reduced first"""
    xr, yr = reduce_many(x, y)
    return _evaluate(spec, xr, yr, "full")


def eval(spec: EisSpec, z: Point) -> complex:
    """Value of the series (or its deriv-th s-derivative) at z"""
    return complex(eval_many(spec, [z.x], [z.y])[0])


def error_bound(spec: EisSpec, z: Point) -> float:
    """Bound on the Fourier truncation error of eval(spec, z)"""
    zr, _ = reduce(z)
    M = fourier_terms_for(zr.y, spec.fourier_terms)
    if spec.deriv == 0:
        bound = truncation_bound(spec.s0, zr.y, M)
        scale = 1.0 if spec.variant == "star" else abs(lambda_complete(1 + 2 * spec.s0))
        return bound / scale
    # Cauchy estimate on the jet circle
    radius = config.get_jet_config()["radius"]
    circle = spec.s0 + radius * np.exp(2j * np.pi * np.arange(16) / 16)
    bound = max(truncation_bound(s, zr.y, M) for s in circle)
    scale = 1.0 if spec.variant == "star" else float(np.min(np.abs(lambda_complete(1 + 2 * circle))))
    return math.factorial(spec.deriv) * bound / (scale * radius ** spec.deriv)


# (s, (x, y)) in the absolutely convergent region Re s > 1/2
EPSTEIN_POINTS = (
    (1.3, (0.3, 1.1)),
    (0.75 + 2.0j, (-0.4, 1.5)),
    (0.6, (0.1, 0.9)),
    (1.0 + 0.5j, (0.45, 0.95)),
    (2.0, (0.05, 2.3)),
)


def epstein_sum(s: complex, z: Point, rows: int = 40, width: int = 2000) -> complex:
    """E(s, z) summed over the lattice: sum' y^w |cz + d|^{-2w} / (2 zeta(2w)), w = 1/2 + s

    Rows 1 <= c <= rows are summed over a window of 2*width + 1 values of d with an
    asymptotic tail; rows beyond use the integral over d, exact up to e^{-2 pi rows y}.
    Absolutely convergent for Re s > 1/2 only.
    """
    s = complex(s)
    if s.real <= 0.5:
        raise ValueError(f"the lattice sum converges for Re s > 1/2 only, got {s}")
    zr, _ = reduce(z)
    x, y = zr.x, zr.y
    w = 0.5 + s
    zeta_2w = complex(mpmath.zeta(2 * w))

    # c = 0 and the pairs (-c, -d) double the rows c >= 1
    total = 2 * zeta_2w * y ** w
    offsets = np.arange(-width, width + 1)
    for c in range(1, rows + 1):
        u = c * x + (offsets - round(c * x))
        b2 = (c * y) ** 2
        body = np.sum(np.exp(-w * np.log(u * u + b2)))
        tail = sum(_row_tail(w, a, b2) for a in (u[-1] + 0.5, -u[0] + 0.5))
        total += 2 * (y ** w) * (body + tail)

    row_integral = math.sqrt(math.pi) * complex(mpmath.gamma(w - 0.5) / mpmath.gamma(w))
    far = complex(mpmath.zeta(2 * w - 1, rows + 1))
    total += 2 * (y ** w) * row_integral * y ** (1 - 2 * w) * far
    return complex(total / (2 * zeta_2w))


def _row_tail(w: complex, a: float, b2: float) -> complex:
    """sum over d >= a + 1/2 of (d^2 + b2)^{-w}: midpoint integral from a plus its first correction"""
    integral = 0j
    coeff = 1.0 + 0j
    for k in range(4):
        integral += coeff * b2 ** k * a ** (1 - 2 * w - 2 * k) / (2 * w + 2 * k - 1)
        coeff *= -(w + k) / (k + 1)
    slope = -2 * w * a * (a * a + b2) ** (-w - 1)
    return integral + slope / 24


def _constant_function(variant: str, y) -> Callable:
    lam_m1 = lambda_jet(0).residue
    logy = np.log(np.atleast_1d(np.asarray(y, dtype=float)))

    def values(s):
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        up = np.exp(np.outer(0.5 + s, logy))
        down = np.exp(np.outer(0.5 - s, logy))
        m = m_scalar(s)[:, None]
        if variant == "plain":
            return up + m * down
        if variant == "star":
            return lambda_complete(1 + 2 * s)[:, None] * up + lambda_complete(1 - 2 * s)[:, None] * down
        if variant == "reg":
            return up + m * (down - 1.0)
        return up + m * down - (lam_m1 / (s - 0.5))[:, None]

    return values


def constant_term_many(spec: EisSpec, y) -> np.ndarray:
    """Constant term along the unipotent x-average, at heights y"""
    values = _constant_function(spec.variant, y)
    near_half = abs(spec.s0 - 0.5) < 1e-12
    if spec.deriv == 0 and not (spec.variant in ("reg", "classical") and near_half):
        _check_pole(spec)
        return values(spec.s0)[0]
    coeffs = contour_coefficients(values, spec.s0, 0, spec.deriv)
    return math.factorial(spec.deriv) * coeffs[spec.deriv]


def constant_term(spec: EisSpec, y: float) -> complex:
    return complex(constant_term_many(spec, [y])[0])


def truncate(spec: EisSpec, z: Point, T: float) -> complex:
    """Lambda^T E(z) = E(z) - E_N(y)·[y > T] on the reduced point"""
    if T < 1:
        raise ValueError(f"truncation height must be >= 1, got {T}")
    zr, _ = reduce(z)
    value = eval(spec, zr)
    if zr.y > T:
        value -= constant_term(spec, zr.y)
    return value


def hecke_apply_many(sampler: Callable, p: int, x, y) -> np.ndarray:
    """Normalized T(p): p^{-1/2}(phi(pz) + sum_j phi((z+j)/p)) / (p^{1/2} + p^{-1/2})

    sampler maps arrays (x, y) to values; with this normalization E(s) has
    eigenvalue (p^s + p^-s)/(p^{1/2} + p^{-1/2}).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    total = sampler(p * x, p * y)
    for j in range(p):
        total = total + sampler((x + j) / p, y / p)
    return total / math.sqrt(p) / (math.sqrt(p) + 1 / math.sqrt(p))


def hecke_apply(phi, p: int, z: Point) -> complex:
    sampler = phi.sample if hasattr(phi, "sample") else phi
    return complex(hecke_apply_many(sampler, p, [z.x], [z.y])[0])


@lru_cache(maxsize=8)
def ramanujan_tau(n_max: int) -> Tuple[int, ...]:
    """tau(0..n_max) from q prod (1 - q^n)^24, exact integers"""
    euler = [0] * (n_max + 1)
    k = 0
    while True:
        hits = False
        for j in (k, -k) if k else (0,):
            e = j * (3 * j - 1) // 2
            if e <= n_max:
                euler[e] = (-1) ** abs(j)
                hits = True
        if not hits:
            break
        k += 1

    def mul(a, b):
        out = [0] * (n_max + 1)
        for i, ai in enumerate(a):
            if ai:
                for j in range(n_max + 1 - i):
                    out[i + j] += ai * b[j]
        return out

    p2 = mul(euler, euler)
    p4 = mul(p2, p2)
    p8 = mul(p4, p4)
    p24 = mul(mul(p8, p8), p8)
    tau = [0] + [int(v) for v in p24[: n_max]]
    return tuple(tau)


def delta_values(x, y, n_terms: int = 60) -> np.ndarray:
    """Delta(z) = sum tau(n) q^n at (unreduced) points"""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    tau = np.array(ramanujan_tau(n_terms)[1:], dtype=float)
    n = np.arange(1, n_terms + 1)
    q = np.exp(2j * np.pi * np.outer(x + 1j * y, n))
    return q @ tau


def delta_square(x, y) -> np.ndarray:
    """|Delta(z)|^2 y^12, evaluated at reduced points"""
    xr, yr = reduce_many(x, y)
    return np.abs(delta_values(xr, yr)) ** 2 * yr ** 12


def delta_square_kernel(t) -> np.ndarray:
    """Exact constant term t^12 sum tau(n)^2 e^{-4 pi n t} of |Delta|^2 y^12"""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    n_max = min(1000, int(80.0 / (4 * np.pi * t.min())) + 50)
    tau = np.array(ramanujan_tau(n_max)[1:], dtype=float)
    n = np.arange(1, n_max + 1)
    return t ** 12 * (np.exp(-4 * np.pi * np.outer(t, n)) @ (tau * tau))
