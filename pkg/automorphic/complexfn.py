"""
Complex special functions and Laurent jets
Gamma, Riemann zeta, the completed zeta function, K-Bessel and truncated Laurent series
"""

import math
import logging
from typing import Callable, Optional, Union

import numpy as np
from scipy import integrate, special

from automorphic.config import AutomorphicError, config

logger = logging.getLogger(__name__)

Number = Union[complex, float, int]

# exp(-700) is still a normal double
_EXP_LIMIT = 700.0
_BERNOULLI = special.bernoulli(16)


class PoleError(AutomorphicError):
    """Raised when a function is evaluated at (or too close to) one of its poles"""


class ContourError(AutomorphicError):
    """Raised when a Cauchy contour encloses a singularity other than the anchor"""


class Jet:
    """Truncated Laurent series sum_{k=k_min}^{k_max} c_k (s - anchor)^k"""

    def __init__(self, anchor: Number, k_min: int, coeffs):
        coeffs = np.array(coeffs, dtype=complex).ravel()
        if coeffs.size == 0:
            raise ValueError("a jet needs at least one coefficient")
        self.anchor = complex(anchor)
        self.k_min = int(k_min)
        self.coeffs = coeffs
        self.coeffs.setflags(write=False)

    @property
    def k_max(self) -> int:
        return self.k_min + self.coeffs.size - 1

    @property
    def residue(self) -> complex:
        return self.coeff(-1)

    def coeff(self, k: int) -> complex:
        """Coefficient of order k (zero below k_min)"""
        if k < self.k_min:
            return 0j
        if k > self.k_max:
            raise ValueError(f"order {k} exceeds jet precision {self.k_max}")
        return complex(self.coeffs[k - self.k_min])

    def derivative(self, k: int) -> complex:
        """k-th derivative at the anchor, k!·c_k"""
        if k < 0:
            raise ValueError("derivative order must be non-negative")
        return math.factorial(k) * self.coeff(k)

    def principal_part(self) -> "Jet":
        if self.k_min >= 0:
            return Jet(self.anchor, 0, [0])
        return Jet(self.anchor, self.k_min, self.coeffs[:-self.k_min])

    def __call__(self, s):
        """Evaluate the truncated series at s"""
        h = np.asarray(s, dtype=complex) - self.anchor
        powers = np.arange(self.k_min, self.k_max + 1)
        return np.sum(self.coeffs * np.power.outer(h, powers), axis=-1)

    def _check_anchor(self, other: "Jet"):
        if abs(self.anchor - other.anchor) > 1e-12:
            raise ValueError(f"jets anchored at {self.anchor} and {other.anchor} cannot be combined")

    def __add__(self, other):
        if not isinstance(other, Jet):
            if self.k_max < 0:
                raise ValueError("jet precision too low to absorb a constant")
            lo = min(self.k_min, 0)
            out = np.zeros(self.k_max - lo + 1, dtype=complex)
            out[self.k_min - lo:] = self.coeffs
            out[-lo] += complex(other)
            return Jet(self.anchor, lo, out)
        self._check_anchor(other)
        lo = min(self.k_min, other.k_min)
        hi = min(self.k_max, other.k_max)
        out = np.zeros(hi - lo + 1, dtype=complex)
        for jet in (self, other):
            top = min(jet.k_max, hi)
            out[jet.k_min - lo: top - lo + 1] += jet.coeffs[: top - jet.k_min + 1]
        return Jet(self.anchor, lo, out)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.anchor, self.k_min, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.anchor, self.k_min, self.coeffs * complex(other))
        self._check_anchor(other)
        lo = self.k_min + other.k_min
        hi = min(self.k_max + other.k_min, other.k_max + self.k_min)
        full = np.convolve(self.coeffs, other.coeffs)
        return Jet(self.anchor, lo, full[: hi - lo + 1])

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.reciprocal() ** (-n)
        if n == 0:
            return Jet(self.anchor, 0, np.eye(1, self.coeffs.size)[0])
        result = self
        for _ in range(n - 1):
            result = result * self
        return result

    def reciprocal(self) -> "Jet":
        """1/f as a jet; the leading non-zero coefficient fixes the new k_min"""
        scale = np.max(np.abs(self.coeffs))
        nonzero = np.nonzero(np.abs(self.coeffs) > 1e-14 * scale)[0]
        if scale == 0 or nonzero.size == 0:
            raise PoleError("reciprocal of a zero jet")
        a = self.coeffs[nonzero[0]:]
        b = np.zeros_like(a)
        b[0] = 1.0 / a[0]
        for n in range(1, a.size):
            b[n] = -np.dot(a[1:n + 1], b[n - 1::-1][:n]) / a[0]
        return Jet(self.anchor, -(self.k_min + nonzero[0]), b)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return self * (1.0 / complex(other))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def compose_linear(self, factor: Number, new_anchor: Number) -> "Jet":
        """Jet at new_anchor of s -> f(anchor + factor·(s - new_anchor))"""
        powers = complex(factor) ** np.arange(self.k_min, self.k_max + 1)
        return Jet(new_anchor, self.k_min, self.coeffs * powers)

    def to_dict(self) -> dict:
        return {
            "anchor": [self.anchor.real, self.anchor.imag],
            "k_min": self.k_min,
            "coeffs": [[c.real, c.imag] for c in self.coeffs],
        }

    def __repr__(self):
        return f"Jet(anchor={self.anchor}, k_min={self.k_min}, coeffs={np.round(self.coeffs, 12).tolist()})"

    @classmethod
    def from_function(cls, f: Callable, anchor: Number, k_min: int, k_max: int,
                      radius: Optional[float] = None, points: Optional[int] = None) -> "Jet":
        """Laurent jet of a scalar function f at anchor (see contour_coefficients)"""
        coeffs = contour_coefficients(f, anchor, k_min, k_max, radius=radius, points=points)
        return cls(anchor, k_min, coeffs)


def contour_coefficients(f: Callable, anchor: Number, k_min: int, k_max: int,
                         radius: Optional[float] = None, points: Optional[int] = None) -> np.ndarray:
    """Laurent coefficients of f at anchor by the trapezoid rule on a circle

    f maps a 1-D array of complex arguments to an array whose first axis runs
    over those arguments; any trailing axes are carried through, so the result
    has shape (k_max - k_min + 1, ...). Orders below k_min are computed as well
    and must vanish, otherwise the circle encloses a singularity the jet
    cannot represent.
    """
    jet_config = config.get_jet_config()
    radius = radius or jet_config["radius"]
    points = points or jet_config["points"]
    if k_max - k_min + 5 > points // 2:
        raise ValueError(f"{points} contour points cannot resolve orders {k_min}..{k_max}")

    theta = 2 * np.pi * np.arange(points) / points
    nodes = complex(anchor) + radius * np.exp(1j * theta)
    samples = np.asarray(f(nodes), dtype=complex)
    if not np.all(np.isfinite(samples)):
        raise ContourError(f"non-finite samples on the circle of radius {radius} around {anchor}")

    scaled = np.fft.fft(samples, axis=0) / points
    wanted = np.abs(scaled[np.arange(k_min, k_max + 1) % points])
    spill = np.abs(scaled[np.arange(k_min - 4, k_min) % points])
    # absolute floor: an identically vanishing f leaves only round-off in every order
    floor = 1e-12 * max(1.0, float(np.abs(samples).max()))
    if spill.max() > 1e-7 * wanted.max() + floor:
        raise ContourError(
            f"circle of radius {radius} around {anchor} encloses a singularity "
            f"of order below {k_min}"
        )
    orders = np.arange(k_min, k_max + 1)
    factors = radius ** (-orders.astype(float))
    return scaled[orders % points] * factors.reshape((-1,) + (1,) * (samples.ndim - 1))


def _is_nonpositive_integer(s: complex) -> bool:
    return s.imag == 0 and s.real <= 0 and s.real == math.floor(s.real)


def gamma(s):
    """Gamma function for complex scalars or arrays"""
    arr = np.asarray(s, dtype=complex)
    if any(_is_nonpositive_integer(v) for v in arr.ravel()):
        raise PoleError(f"Gamma has a pole at {s}")
    value = special.gamma(arr)
    return complex(value) if arr.ndim == 0 else value


def _zeta_euler_maclaurin(s: complex) -> complex:
    N = max(20, int(math.ceil(2 * abs(s.imag))))
    n = np.arange(1, N, dtype=float)
    total = np.sum(np.exp(-s * np.log(n)))
    logN = math.log(N)
    total += np.exp((1 - s) * logN) / (s - 1) + 0.5 * np.exp(-s * logN)
    rising = s
    for k in range(1, 9):
        term = _BERNOULLI[2 * k] / math.factorial(2 * k) * rising * np.exp((-s - 2 * k + 1) * logN)
        total += term
        rising *= (s + 2 * k - 1) * (s + 2 * k)
    return complex(total)


def _zeta_scalar(s: complex) -> complex:
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    if s.real >= 0:
        return _zeta_euler_maclaurin(s)
    # reflection onto Re s > 1
    return complex(2 ** s * np.pi ** (s - 1) * np.sin(np.pi * s / 2)
                   * special.gamma(1 - s) * _zeta_euler_maclaurin(1 - s))


def zeta(s):
    """Riemann zeta function by Euler-Maclaurin summation"""
    arr = np.asarray(s, dtype=complex)
    if arr.ndim == 0:
        return _zeta_scalar(complex(arr))
    return np.array([_zeta_scalar(complex(v)) for v in arr.ravel()]).reshape(arr.shape)


def _lambda_scalar(s: complex) -> complex:
    if s == 0 or s == 1:
        raise PoleError(f"completed zeta has a pole at s = {s.real:g}")
    if s.real < 0.5:
        s = 1 - s
    return complex(np.pi ** (-s / 2) * special.gamma(s / 2) * _zeta_euler_maclaurin(s))


def lambda_complete(s):
    """Completed zeta Lambda(s) = pi^(-s/2) Gamma(s/2) zeta(s), using Lambda(s) = Lambda(1-s)"""
    arr = np.asarray(s, dtype=complex)
    if arr.ndim == 0:
        return _lambda_scalar(complex(arr))
    return np.array([_lambda_scalar(complex(v)) for v in arr.ravel()]).reshape(arr.shape)


def lambda_complete_jet(s0: Number, k_max: int, radius: Optional[float] = None) -> Jet:
    """Laurent jet of Lambda at s0; k_min = -1 at the poles 0 and 1"""
    s0 = complex(s0)
    k_min = -1 if (abs(s0) < 1e-12 or abs(s0 - 1) < 1e-12) else 0
    return Jet.from_function(lambda_complete, s0, k_min, k_max, radius=radius)


def _tail_cutoff(y_min: float, nu_re: float, depth: float = 40.0) -> float:
    """Smallest t beyond which e^{-y(cosh t - 1)} cosh(nu t) is below e^{-depth} of its peak"""
    t = np.linspace(0.0, 60.0, 6001)
    g = -y_min * (np.cosh(t) - 1.0) + nu_re * t
    alive = np.nonzero(g > g.max() - depth)[0]
    return float(t[alive[-1]]) + 0.1


def bessel_k(nu: Number, y: float) -> complex:
    """K_nu(y) = int_0^inf e^{-y cosh t} cosh(nu t) dt by adaptive quadrature"""
    if y <= 0:
        raise ValueError(f"bessel_k needs y > 0, got {y}")
    nu = complex(nu)
    if y > _EXP_LIMIT:
        logger.warning(f"K_{nu}({y}) underflows; returning 0")
        return 0j

    t_max = _tail_cutoff(y, abs(nu.real), depth=50.0)

    def integrand(t, part):
        value = np.exp(-y * (np.cosh(t) - 1.0)) * np.cosh(nu * t)
        return value.real if part == 0 else value.imag

    options = dict(limit=400, epsabs=0.0, epsrel=1e-13)
    re, _ = integrate.quad(integrand, 0.0, t_max, args=(0,), **options)
    im = 0.0
    if nu.imag != 0 and nu.real != 0:
        im, _ = integrate.quad(integrand, 0.0, t_max, args=(1,), **options)
    return complex(re, im) * math.exp(-y)


def bessel_k_grid(nu, Y) -> np.ndarray:
    """K_nu(Y) for every pair (nu_i, Y_j), shape (len(nu), len(Y))

    Trapezoid rule in t, which converges geometrically for this analytic
    integrand; Y is grouped by octave so each group gets its own step and
    cutoff. Entries with Y beyond the exponent range are set to zero.
    """
    nu = np.atleast_1d(np.asarray(nu, dtype=complex))
    Y = np.atleast_1d(np.asarray(Y, dtype=float))
    out = np.zeros((nu.size, Y.size), dtype=complex)
    live = np.nonzero((Y > 0) & (Y <= _EXP_LIMIT))[0]
    if live.size == 0:
        return out

    nu_re = float(np.max(np.abs(nu.real)))
    octave = np.floor(np.log2(Y[live]))
    for band in np.unique(octave):
        sel = live[octave == band]
        h = min(0.05, 0.6 / math.sqrt(Y[sel].max()))
        t = np.arange(0.0, _tail_cutoff(Y[sel].min(), nu_re) + h, h)
        weights = np.full(t.size, h)
        weights[0] = h / 2
        kernel = np.cosh(np.outer(nu, t)) * weights
        n_chunks = max(1, (sel.size * t.size) // 4_000_000 + 1)
        for chunk in np.array_split(sel, n_chunks):
            decay = np.exp(-np.outer(Y[chunk], np.cosh(t) - 1.0) - Y[chunk][:, None])
            out[:, chunk] = kernel @ decay.T
    return out
