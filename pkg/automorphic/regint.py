"""
Regularized integral engine
Exponent profiles, the regularizing kernel a(t), h_T, R(s), the fundamental identity
and the regularized integral over SL2(Z)\\H
"""

import math
import logging
import threading
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from automorphic.complexfn import Jet, PoleError, lambda_complete
from automorphic.config import AutomorphicError, ConfigError, config
from automorphic.eisenstein import fourier_radial, fourier_terms_for
from automorphic.scalars import ZetaConstants

logger = logging.getLogger(__name__)


class ProfileMismatchError(AutomorphicError):
    """Raised when a(T) - f(T) is too large for the declared exponent profile"""


class BoundaryExponentError(AutomorphicError):
    """Raised when an exponent sits on Re(alpha) = 1/2 with alpha != 1/2"""


def _key(alpha: complex) -> Tuple[float, float]:
    return (float(alpha.real), float(alpha.imag))


class ExponentProfile:
    """Asymptotic f(t) = sum (c_i / n_i!) t^{1/2 + alpha_i} log^{n_i} t of a regularizing kernel

    Terms are merged on exact equality of (alpha, n); the empty profile means rapid decay.
    """

    def __init__(self, terms: Iterable[Tuple[complex, complex, int]] = ()):
        merged: Dict[Tuple[Tuple[float, float], int], complex] = {}
        for c, alpha, n in terms:
            if n < 0:
                raise ValueError(f"log power must be non-negative, got {n}")
            key = (_key(complex(alpha)), int(n))
            merged[key] = merged.get(key, 0j) + complex(c)
        self.terms: Tuple[Tuple[complex, complex, int], ...] = tuple(
            (c, complex(*a), n) for (a, n), c in sorted(merged.items()) if c != 0
        )

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        body = ", ".join(f"({c:.6g}, {a:.6g}, {n})" for c, a, n in self.terms)
        return f"ExponentProfile([{body}])"

    def __add__(self, other: "ExponentProfile") -> "ExponentProfile":
        return ExponentProfile(self.terms + other.terms)

    def __neg__(self) -> "ExponentProfile":
        return self.scale(-1)

    def __sub__(self, other: "ExponentProfile") -> "ExponentProfile":
        return self + (-other)

    def scale(self, k: complex) -> "ExponentProfile":
        return ExponentProfile((k * c, a, n) for c, a, n in self.terms)

    def __mul__(self, other: "ExponentProfile") -> "ExponentProfile":
        """Profile of the product of two kernels' asymptotics"""
        terms = []
        for c1, a1, n1 in self.terms:
            for c2, a2, n2 in other.terms:
                terms.append((c1 * c2 * math.comb(n1 + n2, n1), a1 + a2 + 0.5, n1 + n2))
        return ExponentProfile(terms)

    @property
    def alphas(self) -> List[complex]:
        return [a for _, a, _ in self.terms]

    def f(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        logt = np.log(t)
        total = np.zeros(t.shape, dtype=complex)
        for c, a, n in self.terms:
            total += c / math.factorial(n) * np.exp((0.5 + a) * logt) * logt ** n
        return total

    def degenerate_part(self) -> complex:
        """Sum of c over the terms with alpha = -1/2 and n = 0 (exact test)"""
        return sum((c for c, a, n in self.terms if a == -0.5 and n == 0), 0j)

    def residue_at_half(self) -> complex:
        """Res_{s=1/2} h_T(s); only the (alpha, n) = (-1/2, 0) terms contribute"""
        return self.degenerate_part()

    def clear_radius(self, s0: complex, radius: float) -> float:
        """Contour radius around s0, at most radius, keeping the other poles +-alpha_i twice as far"""
        s0 = complex(s0)
        gaps = [abs(s0 - pole) for a in self.alphas for pole in (a, -a) if abs(s0 - pole) > 1e-12]
        return min([radius] + [gap / 2 for gap in gaps])

    def is_integrable(self) -> bool:
        return all(a.real < 0.5 for a in self.alphas)

    def h_T(self, s, T: float):
        """Closed form of int_0^T f(t) t^{s - 1/2} dt/t (continued meromorphically)"""
        s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
        guard = config.get_tolerance_config()["pole_guard"]
        logT = math.log(T)
        total = np.zeros(s_arr.shape, dtype=complex)
        for c, a, n in self.terms:
            z = s_arr + a
            if np.any(np.abs(z) < guard):
                raise PoleError(f"h_T has a pole at s = {-a}; use h_T_jet")
            power = np.exp(z * logT)
            for m in range(n + 1):
                total += c * (-1) ** (n - m) / math.factorial(m) * power * logT ** m / z ** (n - m + 1)
        return complex(total[0]) if np.ndim(s) == 0 else total

    def h_T_jet(self, s0: complex, T: float, k_max: int) -> Jet:
        """Laurent jet of h_T at s0, exact even when s0 = -alpha_i"""
        s0 = complex(s0)
        logT = math.log(T)
        depth = max([n + 1 for _, _, n in self.terms] + [1])
        length = k_max + depth + 1
        result = Jet(s0, 0, np.zeros(k_max + 1))
        for c, a, n in self.terms:
            z0 = s0 + a
            exp_coeffs = [np.exp(z0 * logT) * logT ** k / math.factorial(k) for k in range(length)]
            power = Jet(s0, 0, exp_coeffs)
            for m in range(n + 1):
                order = n - m + 1
                if abs(z0) < 1e-12:
                    inverse = Jet(s0, -order, np.eye(1, length)[0])
                else:
                    inverse = Jet(s0, 0, np.eye(2, length)[0] * z0 + np.eye(2, length)[1]) ** (-order)
                term = power * inverse * (c * (-1) ** (n - m) / math.factorial(m) * logT ** m)
                result = result + term
        return Jet(s0, result.k_min, result.coeffs[: k_max - result.k_min + 1])


@dataclass
class AutomorphicFn:
    """A sampleable SL2(Z)-invariant function with its declared exponent profile

    sampler maps arrays (x, y) to complex values. kernel, when given, is the exact
    constant term t -> a(t); r_star_oracle, when given, is an independent closed form
    for R*(s) used as the second path of the fundamental identity.
    """
    sampler: Callable[[np.ndarray, np.ndarray], np.ndarray]
    profile: ExponentProfile = field(default_factory=ExponentProfile)
    name: str = "phi"
    kernel: Optional[Callable] = None
    r_star_oracle: Optional[Callable] = None
    check: bool = True

    def __post_init__(self):
        if self.check:
            x = np.array([0.123, -0.31, 0.47])
            y = np.array([1.1, 0.9, 2.3])
            here = self.sample(x, y)
            shifted = self.sample(x + 1.0, y)
            if np.any(np.abs(here - shifted) > 1e-8 * np.maximum(1.0, np.abs(here))):
                raise ValueError(f"{self.name} is not invariant under z -> z + 1")

    def sample(self, x, y) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        return np.asarray(self.sampler(x, y), dtype=complex)

    def scale(self, k: complex, name: Optional[str] = None) -> "AutomorphicFn":
        k = complex(k)
        return AutomorphicFn(
            sampler=lambda x, y: k * self.sample(x, y),
            profile=self.profile.scale(k),
            name=name or f"{k:g}*{self.name}",
            kernel=(lambda t: k * self.kernel(t)) if self.kernel else None,
            r_star_oracle=(lambda s: k * self.r_star_oracle(s)) if self.r_star_oracle else None,
            check=False,
        )

    def __add__(self, other: "AutomorphicFn") -> "AutomorphicFn":
        both_kernels = self.kernel is not None and other.kernel is not None
        both_oracles = self.r_star_oracle is not None and other.r_star_oracle is not None
        return AutomorphicFn(
            sampler=lambda x, y: self.sample(x, y) + other.sample(x, y),
            profile=self.profile + other.profile,
            name=f"({self.name} + {other.name})",
            kernel=(lambda t: self.kernel(t) + other.kernel(t)) if both_kernels else None,
            r_star_oracle=(lambda s: self.r_star_oracle(s) + other.r_star_oracle(s)) if both_oracles else None,
            check=False,
        )

    def __sub__(self, other: "AutomorphicFn") -> "AutomorphicFn":
        return self + other.scale(-1, name=f"-{other.name}")

    def __mul__(self, other: "AutomorphicFn") -> "AutomorphicFn":
        return AutomorphicFn(
            sampler=lambda x, y: self.sample(x, y) * other.sample(x, y),
            profile=self.profile * other.profile,
            name=f"{self.name}*{other.name}",
            check=False,
        )


@dataclass
class QuadratureSpec:
    """Quadrature settings for the kernel average, the domain grid and the unfolding oracle"""
    x_points: int = None
    t_points: int = None
    t_min: float = None
    t_max: float = None
    tail_order: int = None
    panel_width: float = None
    strip_height: float = None
    lower_nodes: int = None

    def __post_init__(self):
        quad = config.get_quadrature_config()
        if self.x_points is None:
            self.x_points = quad["x_points"]
        if self.t_points is None:
            self.t_points = quad["panel_nodes"]
        if self.t_min is None:
            self.t_min = quad["t_min"]
        if self.t_max is None:
            self.t_max = quad["t_max"]
        if self.tail_order is None:
            self.tail_order = quad["panel_nodes"]
        if self.panel_width is None:
            self.panel_width = quad["panel_width"]
        if self.strip_height is None:
            self.strip_height = quad["strip_height"]
        if self.lower_nodes is None:
            self.lower_nodes = quad["lower_nodes"]
        if not self.t_min < 1 < self.t_max:
            raise ConfigError(f"need t_min < 1 < t_max, got {self.t_min}, {self.t_max}")
        if self.x_points < 4:
            raise ConfigError("x_points must be at least 4")


def gauss_panels(a: float, b: float, width: float, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on [a, b]"""
    if b <= a:
        return np.zeros(0), np.zeros(0)
    edges = np.linspace(a, b, max(1, int(math.ceil((b - a) / width - 1e-9))) + 1)
    g, w = leggauss(order)
    half = (edges[1:] - edges[:-1])[:, None] / 2
    mid = (edges[1:] + edges[:-1])[:, None] / 2
    return (mid + half * g).ravel(), (half * w).ravel()


@dataclass
class DomainGrid:
    """Nodes of the fundamental domain split at height T, weights include dx dy / y^2"""
    T: float
    x: np.ndarray
    y: np.ndarray
    w: np.ndarray
    truncated: np.ndarray
    strip_t: np.ndarray
    strip_tw: np.ndarray
    x_points: int

    @classmethod
    def build(cls, T: float, quad: QuadratureSpec) -> "DomainGrid":
        if T < 1:
            raise ValueError(f"truncation height must be >= 1, got {T}")
        gx, gw = leggauss(quad.lower_nodes)
        xb, wb = gx / 2, gw / 2
        lower_x, lower_y, lower_w = [], [], []
        for xi, wi in zip(xb, wb):
            y0 = math.sqrt(1 - xi * xi)
            yy, wy = gauss_panels(y0, 1.0, 1.0, quad.lower_nodes)
            lower_x.append(np.full(yy.size, xi))
            lower_y.append(yy)
            lower_w.append(wi * wy / yy ** 2)

        xt = -0.5 + (np.arange(quad.x_points) + 0.5) / quad.x_points
        ya, wa = gauss_panels(1.0, T, quad.panel_width, quad.t_points)
        ys, ws = gauss_panels(T, T + quad.strip_height, 1.0, quad.tail_order)

        def tensor(yy, wy):
            X, Yg = np.meshgrid(xt, yy)
            W = np.outer(wy / yy ** 2, np.full(xt.size, 1.0 / quad.x_points))
            return X.ravel(), Yg.ravel(), W.ravel()

        xa_, ya_, wa_ = tensor(ya, wa)
        xs_, ys_, ws_ = tensor(ys, ws)
        x = np.concatenate(lower_x + [xa_, xs_])
        y = np.concatenate(lower_y + [ya_, ys_])
        w = np.concatenate(lower_w + [wa_, ws_])
        truncated = np.zeros(x.size, dtype=bool)
        truncated[: x.size - xs_.size] = True
        return cls(T=T, x=x, y=y, w=w, truncated=truncated, strip_t=ys, strip_tw=ws,
                   x_points=quad.x_points)


@dataclass
class PairingData:
    """Everything R*(s) needs at one truncation height, with phi already sampled"""
    profile: ExponentProfile
    T: float
    const_y: np.ndarray
    const_weight: np.ndarray
    modes_y: np.ndarray
    modes: np.ndarray
    tail_t: np.ndarray
    tail_w: np.ndarray
    tail_gap: np.ndarray

    def pairing(self, s) -> np.ndarray:
        """int over the domain of phi times Lambda^T E*(s)"""
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        logy = np.log(self.const_y)
        const = (lambda_complete(1 + 2 * s)[:, None] * np.exp(np.outer(0.5 + s, logy))
                 + lambda_complete(1 - 2 * s)[:, None] * np.exp(np.outer(0.5 - s, logy))) @ self.const_weight
        radial = fourier_radial(s, self.modes_y, self.modes.shape[1])
        return const + np.einsum("sum,um->s", radial, self.modes)

    def tails(self, s) -> Tuple[np.ndarray, np.ndarray]:
        """I_+-(s) = int_T^inf (a - f) t^{+-s - 1/2} dt/t"""
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        logt = np.log(self.tail_t)
        base = self.tail_w * self.tail_gap / self.tail_t
        plus = np.exp(np.outer(s - 0.5, logt)) @ base
        minus = np.exp(np.outer(-s - 0.5, logt)) @ base
        return plus, minus

    def rhs(self, s) -> np.ndarray:
        """Truncated pairing plus tails: R* + Lambda(1+2s) h_T(s) + Lambda(1-2s) h_T(-s)"""
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        plus, minus = self.tails(s)
        return self.pairing(s) + lambda_complete(1 + 2 * s) * plus + lambda_complete(1 - 2 * s) * minus

    def r_star(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        h_plus = self.profile.h_T(s, self.T)
        h_minus = self.profile.h_T(-s, self.T)
        return self.rhs(s) - lambda_complete(1 + 2 * s) * h_plus - lambda_complete(1 - 2 * s) * h_minus


@dataclass
class RegIntResult:
    principal: complex
    degenerate: complex
    value: complex
    residue: complex
    T: float

    def to_dict(self) -> dict:
        return {name: ([v.real, v.imag] if isinstance(v, complex) else v)
                for name, v in self.__dict__.items()}


class RegularizedIntegralEngine:
    """Regularized integrals over SL2(Z)\\H; immutable apart from an internal grid cache"""

    def __init__(self, quad: Optional[QuadratureSpec] = None, T_default: float = 4.0):
        self.quad = quad or QuadratureSpec()
        self.T_default = T_default
        self.constants = ZetaConstants()
        self.logger = logging.getLogger(__name__)
        tolerances = config.get_tolerance_config()
        self.mismatch_tol = tolerances["profile_mismatch"]
        self.pole_guard = tolerances["pole_guard"]
        self._grids: Dict[float, DomainGrid] = {}
        self._lock = threading.Lock()

    def grid(self, T: float) -> DomainGrid:
        with self._lock:
            if T not in self._grids:
                self._grids[T] = DomainGrid.build(T, self.quad)
            return self._grids[T]

    def kernel_a(self, phi: AutomorphicFn, t) -> np.ndarray:
        """a(t, phi) = int_0^1 phi(x + it) dx by the periodic trapezoid rule"""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        n_x = self.quad.x_points
        x = (np.arange(n_x) + 0.5) / n_x
        X, Tg = np.meshgrid(x, t)
        return phi.sample(X.ravel(), Tg.ravel()).reshape(t.size, n_x).mean(axis=1)

    def check_profile(self, phi: AutomorphicFn, T: float) -> float:
        """|a(T) - f(T)| relative to max(1, |f(T)|); raises on mismatch"""
        a = self.kernel_a(phi, [T])[0]
        f = phi.profile.f([T])[0]
        gap = abs(a - f) / max(1.0, abs(f))
        if gap > self.mismatch_tol:
            raise ProfileMismatchError(
                f"{phi.name}: a(T) - f(T) = {gap:.3e} at T = {T} exceeds {self.mismatch_tol:.1e}; "
                f"the declared profile {phi.profile} does not match"
            )
        return gap

    def prepare(self, phi: AutomorphicFn, T: Optional[float] = None) -> PairingData:
        """Sample phi on the domain grid and reduce it to the data R*(s) depends on"""
        T = T or self.T_default
        self.check_profile(phi, T)
        grid = self.grid(T)
        values = phi.sample(grid.x, grid.y)
        weighted = grid.w * values

        inner = grid.truncated
        const_y, const_inv = np.unique(grid.y[inner], return_inverse=True)
        const_weight = np.zeros(const_y.size, dtype=complex)
        np.add.at(const_weight, const_inv, weighted[inner])

        modes_y, modes_inv = np.unique(grid.y, return_inverse=True)
        M = fourier_terms_for(modes_y.min())
        n = np.arange(1, M + 1)
        contrib = weighted[:, None] * np.cos(2 * np.pi * np.outer(grid.x, n))
        modes = np.zeros((modes_y.size, M), dtype=complex)
        np.add.at(modes, modes_inv, contrib)

        strip_values = values[~inner].reshape(grid.strip_t.size, grid.x_points)
        tail_gap = strip_values.mean(axis=1) - phi.profile.f(grid.strip_t)
        return PairingData(profile=phi.profile, T=T, const_y=const_y, const_weight=const_weight,
                           modes_y=modes_y, modes=modes, tail_t=grid.strip_t,
                           tail_w=grid.strip_tw, tail_gap=tail_gap)

    def truncated_pairing(self, phi: AutomorphicFn, s, T: Optional[float] = None) -> np.ndarray:
        return self.prepare(phi, T).pairing(s)

    def _point_guard(self, phi: AutomorphicFn, s: np.ndarray):
        poles = [0.5, -0.5] + [p for a in phi.profile.alphas for p in (a, -a)]
        for pole in poles:
            if np.any(np.abs(s - pole) < self.pole_guard):
                raise PoleError(f"s within {self.pole_guard} of a possible pole at {pole}; use jet mode")

    def r_star_values(self, phi: AutomorphicFn, s, T: Optional[float] = None) -> np.ndarray:
        """Point values of R*(s) = Lambda(1+2s) R(s, phi)"""
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        self._point_guard(phi, s)
        return self.prepare(phi, T).r_star(s)

    def R_star(self, phi: AutomorphicFn, s0: complex, k_max: int = 2, T: Optional[float] = None,
               k_min: int = -2, radius: Optional[float] = None) -> Jet:
        """Laurent jet of R*(s) at s0 from the fundamental identity"""
        data = self.prepare(phi, T)
        return Jet.from_function(data.r_star, s0, k_min, k_max, radius=self._radius(phi, s0, radius))

    def R_jet(self, phi: AutomorphicFn, s0: complex, k_max: int = 1, T: Optional[float] = None,
              k_min: int = -5, radius: Optional[float] = None) -> Jet:
        """Laurent jet of R(s, phi) = R*(s)/Lambda(1+2s) at s0"""
        data = self.prepare(phi, T)
        return Jet.from_function(lambda s: data.r_star(s) / lambda_complete(1 + 2 * s),
                                 s0, k_min, k_max, radius=self._radius(phi, s0, radius))

    def _radius(self, phi: AutomorphicFn, s0: complex, radius: Optional[float]) -> float:
        if radius is not None:
            return radius
        chosen = phi.profile.clear_radius(s0, config.get_jet_config()["radius"])
        if chosen < config.get_jet_config()["radius"]:
            self.logger.debug(f"contour around {s0} shrunk to {chosen:.3g} for {phi.name}")
        return chosen

    def reg_integral(self, phi: AutomorphicFn, T: Optional[float] = None,
                     radius: Optional[float] = None) -> RegIntResult:
        """(Res_{s=1/2} R(s, phi) + degenerate part) / lambda^{(-1)}(0)"""
        T = T or self.T_default
        lam = self.constants.lambda_residue
        residue = self.R_jet(phi, 0.5, k_max=1, T=T, radius=radius).residue
        degenerate = phi.profile.degenerate_part()
        result = RegIntResult(principal=residue / lam, degenerate=degenerate / lam,
                              value=(residue + degenerate) / lam, residue=residue, T=T)
        self.logger.info(f"reg_integral({phi.name}) = {result.value:.10g} at T = {T}")
        return result

    def finite_part(self, family: Callable[[complex], complex], radius: float = 0.02) -> complex:
        """Constant Laurent coefficient at 0 of a scalar family s -> value(s)"""
        return Jet.from_function(lambda s: np.array([family(v) for v in s]), 0, -1, 1,
                                 radius=radius).coeff(0)

    def plain_integral(self, phi: AutomorphicFn, T: Optional[float] = None) -> complex:
        """Ordinary integral of an integrable phi (all Re(alpha) < 1/2)"""
        if not phi.profile.is_integrable():
            raise ValueError(f"{phi.name} is not integrable: exponents {phi.profile.alphas}")
        data = self.prepare(phi, T)
        inner = np.sum(data.const_weight)
        tail = np.sum(data.tail_w * data.tail_gap / data.tail_t ** 2)
        profile_tail = -phi.profile.h_T(-0.5, data.T) if len(phi.profile) else 0j
        return complex(inner + tail + profile_tail)

    def volume_by_quadrature(self) -> float:
        one = AutomorphicFn(lambda x, y: np.ones(np.shape(x)), ExponentProfile([(1, -0.5, 0)]), "one")
        return self.plain_integral(one).real

    def l2_residue(self, phi: AutomorphicFn, builders: Callable[[complex, int], AutomorphicFn]) -> AutomorphicFn:
        """phi minus the Eisenstein combination carrying its exponents with Re(alpha) > 0

        builders(alpha, n) returns E^{(n)}(alpha) (or E^{reg,(n)}(1/2) at alpha = 1/2)
        as an AutomorphicFn with its profile.
        """
        pieces = []
        for c, a, n in phi.profile:
            if a.real <= 0:
                continue
            if a.real == 0.5 and a != 0.5:
                raise BoundaryExponentError(f"exponent {a} lies on Re(alpha) = 1/2")
            pieces.append(builders(a, n).scale(c / math.factorial(n)))
        if not pieces:
            return phi
        eis = pieces[0]
        for piece in pieces[1:]:
            eis = eis + piece
        residual = phi - eis
        residual.name = f"{phi.name} - E({phi.name})"
        return residual

    def unfolding_oracle(self, phi: AutomorphicFn, s, mean: Optional[complex] = None) -> np.ndarray:
        """R(s) = int_0^inf a(t) t^{s - 1/2} dt/t for a cuspidal phi, Re(s) > 1/2

        The end t < t_min is replaced by its equidistribution limit a(t) -> mean.
        """
        if len(phi.profile):
            raise ValueError("the unfolding oracle needs a rapidly decaying phi")
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        if np.any(s.real <= 0.5):
            raise ValueError("the unfolded integral converges for Re(s) > 1/2 only")
        u, wu = gauss_panels(math.log(self.quad.t_min), math.log(self.quad.t_max), 0.5, self.quad.t_points)
        t = np.exp(u)
        if phi.kernel is not None:
            a = np.asarray(phi.kernel(t), dtype=complex)
        else:
            a = np.array([self._kernel_fine(phi, tk) for tk in t])
        if mean is None:
            mean = self.plain_integral(phi) / self.constants.volume
        body = np.exp(np.outer(s - 0.5, u)) @ (wu * a)
        head = mean * self.quad.t_min ** (s - 0.5) / (s - 0.5)
        return body + head

    def _kernel_fine(self, phi: AutomorphicFn, t: float) -> complex:
        n_x = max(self.quad.x_points, int(math.ceil(12.0 / t)))
        x = (np.arange(n_x) + 0.5) / n_x
        return complex(phi.sample(x, np.full(n_x, t)).mean())

    def oracle_r_star(self, phi: AutomorphicFn, s) -> np.ndarray:
        """Independent R*(s): the declared closed form, or the unfolding integral via R*(s) = R*(-s)"""
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        if phi.r_star_oracle is not None:
            return np.asarray(phi.r_star_oracle(s), dtype=complex)
        flipped = np.where(s.real < 0, -s, s)
        return lambda_complete(1 + 2 * flipped) * self.unfolding_oracle(phi, flipped)

    def verify_fundamental_identity(self, phi: AutomorphicFn, s_grid: Sequence[complex],
                                    T_list: Sequence[float]) -> dict:
        """Both sides of the fundamental identity on a grid of (s, T)"""
        s = np.asarray(s_grid, dtype=complex)
        self._point_guard(phi, s)
        oracle = self.oracle_r_star(phi, s)
        rows, r_stars = [], []
        for T in T_list:
            data = self.prepare(phi, T)
            lhs = (oracle + lambda_complete(1 + 2 * s) * phi.profile.h_T(s, T)
                   + lambda_complete(1 - 2 * s) * phi.profile.h_T(-s, T))
            rhs = data.rhs(s)
            r_star = data.r_star(s)
            r_stars.append(r_star)
            for k in range(s.size):
                rows.append({"T": T, "s": [s[k].real, s[k].imag],
                             "lhs": [lhs[k].real, lhs[k].imag], "rhs": [rhs[k].real, rhs[k].imag],
                             "abs_diff": float(abs(lhs[k] - rhs[k]))})
        spread = float(np.max(np.abs(np.array(r_stars) - r_stars[0]))) if len(r_stars) > 1 else 0.0
        flipped = self.prepare(phi, T_list[0]).r_star(-s)
        report = {
            "phi": phi.name,
            "rows": rows,
            "max_abs_diff": max(r["abs_diff"] for r in rows),
            "T_spread": spread,
            "functional_equation": float(np.max(np.abs(r_stars[0] - flipped))),
        }
        self.logger.info(f"fundamental identity for {phi.name}: max diff {report['max_abs_diff']:.3e}, "
                         f"T spread {spread:.3e}")
        return report

    def detect_profile(self, phi: AutomorphicFn, candidates: Sequence[Tuple[complex, int]],
                       t_values: Optional[Sequence[float]] = None) -> dict:
        """Least-squares fit of a(t) on t^{1/2+alpha} log^n t / n! over the candidate exponents

        Diagnostic only: the engine always uses declared profiles.
        """
        t = np.asarray(t_values if t_values is not None else np.linspace(3.0, 8.0, 24), dtype=float)
        a = self.kernel_a(phi, t)
        basis = np.column_stack([
            np.exp((0.5 + complex(alpha)) * np.log(t)) * np.log(t) ** n / math.factorial(n)
            for alpha, n in candidates
        ])
        coeffs, *_ = np.linalg.lstsq(basis, a, rcond=None)
        residual = float(np.max(np.abs(basis @ coeffs - a)))
        fitted = ExponentProfile((c, alpha, n) for c, (alpha, n) in zip(coeffs, candidates))
        return {"profile": fitted, "residual": residual}
