"""
Schwartz-Bruhat functions on Q_p and Q_p^2
Ball-array representation with support, additive and multiplicative indices, full and partial
Fourier transforms, norms, the discrete Mellin pair and unramified local Whittaker functions
"""

import math
import logging
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from automorphic.config import AutomorphicError

logger = logging.getLogger(__name__)

_ZERO_TOL = 1e-12


class RamifiedCharacterError(AutomorphicError):
    """Raised when a Whittaker integral is requested for a ramified character"""


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % k for k in range(2, int(math.isqrt(p)) + 1))


def _units(p: int, level: int, congruent_to_one: int = 0) -> np.ndarray:
    """Units of Z/p^level that are 1 mod p^congruent_to_one"""
    modulus = p ** level
    u = np.arange(modulus)
    keep = (u % p != 0) if level > 0 else np.ones(1, dtype=bool)
    if congruent_to_one > 0:
        keep &= (u % p ** min(congruent_to_one, level)) == 1 % p ** min(congruent_to_one, level)
    return u[keep] if level > 0 else np.array([1])


def _regrid_axis(values: np.ndarray, axis: int, p: int, D: int, delta: int,
                 D_new: int, delta_new: int) -> np.ndarray:
    """Resample one axis from (D, delta) to the finer grid (D_new <= D, delta_new >= delta)"""
    shift = D - D_new
    j = np.arange(p ** (delta_new - D_new))
    inside = (j % p ** shift) == 0
    old = (j // p ** shift) % p ** (delta - D)
    out = np.take(values, old, axis=axis)
    shape = [1] * values.ndim
    shape[axis] = j.size
    return out * inside.reshape(shape)


class PadicSchwartz:
    """Phi on Q_p^dim supported in (p^D Z_p)^dim and invariant under (p^delta Z_p)^dim

    values[j] is Phi(p^D j) for j in (Z/p^{delta-D})^dim; the stored (D, delta) are always
    the tight indices, so D(Phi) and delta(Phi) are read off exactly.
    """

    def __init__(self, p: int, D: int, delta: int, values):
        if not _is_prime(p):
            raise ValueError(f"p must be prime, got {p}")
        values = np.asarray(values, dtype=complex)
        if values.ndim not in (1, 2):
            raise ValueError("only dimensions 1 and 2 are supported")
        if delta < D:
            raise ValueError(f"need D <= delta, got D = {D}, delta = {delta}")
        if any(n != p ** (delta - D) for n in values.shape):
            raise ValueError(f"values must have side p^(delta - D) = {p ** (delta - D)}")
        self.p = p
        self.dim = values.ndim
        self.D, self.delta, self.values = self._canonical(D, delta, values)
        self.values.setflags(write=False)

    def _canonical(self, D: int, delta: int, values: np.ndarray):
        p = self.p
        scale = np.max(np.abs(values)) if values.size else 0.0
        if scale <= _ZERO_TOL:
            self.is_zero = True
            return 0, 0, np.zeros((1,) * self.dim, dtype=complex)
        self.is_zero = False
        tol = _ZERO_TOL * max(1.0, scale)
        changed = True
        while changed and delta > D:
            changed = False
            n = delta - D
            coarse = np.ones(values.shape, dtype=bool)
            for axis in range(self.dim):
                index = np.arange(p ** n).reshape([-1 if a == axis else 1 for a in range(self.dim)])
                coarse = coarse & (index % p == 0)
            if np.all(np.abs(values[~coarse]) <= tol):
                values = values[(slice(None, None, p),) * self.dim]
                D += 1
                changed = True
                continue
            step = p ** (n - 1)
            if all(np.allclose(values, np.roll(values, step, axis=a), atol=tol, rtol=0)
                   for a in range(self.dim)):
                values = values[(slice(0, step),) * self.dim]
                delta -= 1
                changed = True
        return D, delta, values

    @property
    def n(self) -> int:
        return self.delta - self.D

    @classmethod
    def indicator(cls, p: int, D: int, dim: int = 1) -> "PadicSchwartz":
        """1 on (p^D Z_p)^dim"""
        return cls(p, D, D, np.ones((1,) * dim))

    @classmethod
    def from_callable(cls, p: int, D: int, delta: int, f: Callable, dim: int = 1) -> "PadicSchwartz":
        """Build from f(j) (j an int, or a pair for dim 2) on the index grid of (D, delta)"""
        side = p ** (delta - D)
        if dim == 1:
            values = np.array([f(j) for j in range(side)], dtype=complex)
        else:
            values = np.array([[f((a, b)) for b in range(side)] for a in range(side)], dtype=complex)
        return cls(p, D, delta, values)

    @classmethod
    def random(cls, p: int, dim: int, rng: np.random.Generator) -> "PadicSchwartz":
        """Random integer-valued Phi with varied support, invariance and multiplicative structure"""
        D = int(rng.integers(-2, 3))
        n = int(rng.integers(0, 4 if dim == 1 else 3))
        n_coarse = int(rng.integers(0, n + 1))
        coarse = rng.integers(-3, 4, size=(p ** n_coarse,) * dim) + 1j * rng.integers(-2, 3, size=(p ** n_coarse,) * dim)
        j = np.arange(p ** n)
        grids = np.meshgrid(*([j] * dim), indexing="ij")
        values = coarse[tuple(g % p ** n_coarse for g in grids)]
        support = int(rng.integers(0, n + 1))
        for g in grids:
            values = values * (g % p ** support == 0)
        if not np.any(values):
            values[(0,) * dim] = 1
        return cls(p, D, D + n, values)

    def indices(self) -> Tuple[float, float, int]:
        """(D, delta, m); the zero function gives (+inf, -inf, 0)"""
        if self.is_zero:
            return math.inf, -math.inf, 0
        return self.D, self.delta, self.m_index()

    def _level_generators(self, m: int) -> List[np.ndarray]:
        """Generators of {kappa in GL_dim(Z/p^n) : kappa = 1 mod p^m}"""
        p, n = self.p, self.n
        units = _units(p, n, m)
        if self.dim == 1:
            return [np.array([[int(u)]]) for u in units]
        t = p ** m
        gens = [np.array([[1, t], [0, 1]]), np.array([[1, 0], [t, 1]])]
        for u in units:
            gens.append(np.array([[int(u), 0], [0, 1]]))
            gens.append(np.array([[1, 0], [0, int(u)]]))
        return gens

    def m_index(self) -> int:
        """Smallest m >= 0 with Phi(x kappa) = Phi(x) for every kappa = 1 mod p^m"""
        if self.is_zero:
            return 0
        for m in range(self.n + 1):
            if all(self.act(kappa).equals(self) for kappa in self._level_generators(m)):
                return m
        return self.n

    def _index_grids(self) -> List[np.ndarray]:
        j = np.arange(self.p ** self.n)
        return np.meshgrid(*([j] * self.dim), indexing="ij")

    def act(self, kappa) -> "PadicSchwartz":
        """R(kappa).Phi(x) = Phi(x kappa) for kappa in GL_dim(Z_p), x a row vector"""
        kappa = np.atleast_2d(np.asarray(kappa, dtype=np.int64))
        side = self.p ** self.n
        grids = self._index_grids()
        moved = [sum(grids[i] * int(kappa[i, k]) for i in range(self.dim)) % side for k in range(self.dim)]
        return PadicSchwartz(self.p, self.D, self.delta, self.values[tuple(moved)])

    def reflect(self) -> "PadicSchwartz":
        """x -> Phi(-x)"""
        side = self.p ** self.n
        grids = self._index_grids()
        return PadicSchwartz(self.p, self.D, self.delta, self.values[tuple((-g) % side for g in grids)])

    def equals(self, other: "PadicSchwartz", tol: float = 1e-10) -> bool:
        if self.is_zero or other.is_zero:
            return self.is_zero and other.is_zero
        if (self.p, self.dim, self.D, self.delta) != (other.p, other.dim, other.D, other.delta):
            return False
        return bool(np.allclose(self.values, other.values, atol=tol * max(1.0, np.max(np.abs(self.values))), rtol=0))

    def regrid(self, D_new: int, delta_new: int) -> np.ndarray:
        """Values on the finer grid (D_new, delta_new)"""
        if D_new > self.D or delta_new < self.delta:
            raise ValueError("regrid only refines the grid")
        values = self.values
        for axis in range(self.dim):
            values = _regrid_axis(values, axis, self.p, self.D, self.delta, D_new, delta_new)
        return values

    def fourier(self, c_psi: int = 0, axes: Optional[Iterable[int]] = None) -> "PadicSchwartz":
        """F_I Phi(x) = int Phi(y) psi(-y_I . x_I) dy_I for the coordinates I = axes (all by default)

        psi has conductor c_psi (trivial exactly on p^{-c_psi} Z_p) and dy is self-dual,
        so each transformed coordinate picks up p^{-delta} p^{-c_psi/2} per cell.
        """
        axes = tuple(range(self.dim)) if axes is None else tuple(axes)
        if any(a not in range(self.dim) for a in axes):
            raise ValueError(f"axes {axes} do not match dimension {self.dim}")
        if self.is_zero:
            return self
        Ds = [self.D] * self.dim
        deltas = [self.delta] * self.dim
        values = self.values
        side = self.p ** self.n
        for a in axes:
            mass = float(self.p) ** (-deltas[a]) * float(self.p) ** (-c_psi / 2)
            values = np.fft.fft(values, axis=a) * mass
            Ds[a], deltas[a] = -c_psi - deltas[a], -c_psi - Ds[a]
        D_common, delta_common = min(Ds), max(deltas)
        for a in range(self.dim):
            values = _regrid_axis(values, a, self.p, Ds[a], deltas[a], D_common, delta_common)
        if values.shape != (self.p ** (delta_common - D_common),) * self.dim:
            raise AutomorphicError(f"regrid produced shape {values.shape} (side {side})")
        return PadicSchwartz(self.p, D_common, delta_common, values)

    def value_at(self, point: Sequence[Tuple[float, int]]) -> complex:
        """Phi at x with coordinates p^v u (v may be inf for 0), u a unit given mod a high power of p"""
        if self.is_zero:
            return 0j
        side = self.p ** self.n
        index = []
        for v, u in point:
            if v >= self.delta:
                index.append(0)
            elif v < self.D:
                return 0j
            else:
                index.append((self.p ** int(v - self.D) * int(u)) % side)
        return complex(self.values[tuple(index)])

    def _axis_weights(self, power: float, sup: bool) -> np.ndarray:
        """Per-cell integral (or sup) of |x|^power over the cells of one axis, Haar(Z_p) = 1"""
        p, D, delta = self.p, self.D, self.delta
        j = np.arange(p ** self.n)
        val = np.array([D + _valuation(int(k), p) if k else delta for k in j], dtype=float)
        if sup:
            return p ** (-val * power)
        cell = p ** (-val * power) * float(p) ** (-delta)
        # the cell at 0 is the whole ball p^delta Z_p
        cell[0] = (1 - 1 / p) * float(p) ** (-delta * (power + 1)) / (1 - float(p) ** (-(power + 1)))
        return cell

    def norm(self, l: float) -> float:
        """L^l norm with Haar(Z_p) = 1"""
        return self.seminorm(l, (0.0,) * self.dim)

    def seminorm(self, l: float, sigma: Sequence[float]) -> float:
        """S_l^sigma(Phi) = || prod |x_i|^{sigma_i} Phi ||_l"""
        if any(s < 0 for s in sigma):
            raise ValueError("sigma components must be non-negative")
        if self.is_zero:
            return 0.0
        sup = math.isinf(l)
        weight = np.ones((1,) * self.dim)
        for axis, s in enumerate(sigma):
            w = self._axis_weights(s if sup else s * l, sup)
            weight = weight * w.reshape([-1 if a == axis else 1 for a in range(self.dim)])
        mag = np.abs(self.values)
        if sup:
            return float(np.max(weight * mag))
        return float(np.sum(weight * mag ** l) ** (1.0 / l))


def _valuation(k: int, p: int) -> int:
    v = 0
    while k % p == 0:
        k //= p
        v += 1
    return v


def radial_sequence(phi: PadicSchwartz, n_values: Sequence[int]) -> np.ndarray:
    """f_1(p^n) = average of Phi(p^n u) over units u (dim 1)"""
    if phi.dim != 1:
        raise ValueError("radial_sequence needs a one-dimensional Phi")
    level = max(phi.n, 1)
    units = _units(phi.p, level)
    return np.array([np.mean([phi.value_at([(n, int(u))]) for u in units]) for n in n_values])


@dataclass
class DiscreteSeq:
    """f(p^n) for n = n0, n0 + 1, ...; zero below n0 and beyond the stored values"""
    q: float
    n0: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.q <= 1:
            raise ValueError("q must exceed 1")

    @property
    def n(self) -> np.ndarray:
        return self.n0 + np.arange(self.values.size)


def discrete_mellin(f: DiscreteSeq, s) -> np.ndarray:
    """Mf(s) = sum_n f(p^n) q^{-ns}, a finite sum"""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    return np.exp(-np.outer(s, f.n) * math.log(f.q)) @ f.values


def inverse_discrete_mellin(M: Callable, q: float, sigma: float, n_values: Sequence[int],
                            points: int = 256) -> np.ndarray:
    """f_M(p^n) = int_0^{2 pi/log q} M(sigma + i tau) q^{n(sigma + i tau)} log q dtau/(2 pi)

    Trapezoid over one period; exact for trigonometric polynomials of degree below points.
    """
    logq = math.log(q)
    tau = 2 * np.pi / logq * np.arange(points) / points
    s = sigma + 1j * tau
    m = np.asarray(M(s), dtype=complex)
    n = np.asarray(n_values)
    return (np.exp(np.outer(n, s) * logq) @ m) / points


def b_norm(f: DiscreteSeq, sigma: float, l: float) -> float:
    weights = np.abs(f.values) * f.q ** (-f.n * sigma)
    if math.isinf(l):
        return float(np.max(weights))
    return float(np.sum(weights ** l) ** (1 / l))


def h_norm(M: Callable, q: float, sigma: float, l: float, points: int = 256) -> float:
    """H_l^sigma over one period by the same trapezoid nodes as the inverse"""
    tau = 2 * np.pi / math.log(q) * np.arange(points) / points
    mag = np.abs(np.asarray(M(sigma + 1j * tau), dtype=complex))
    if math.isinf(l):
        return float(np.max(mag))
    return float(np.mean(mag ** l) ** (1 / l))


@dataclass
class PadicCharSpec:
    """Unramified data at p: psi of conductor c_psi and Satake parameters alpha, beta

    Given s and the unramified values xi(p), omega xi^{-1}(p), alpha = xi(p) q^{-s} and
    beta = omega xi^{-1}(p) q^{s}.
    """
    p: int
    c_psi: int = 0
    s: complex = 0.0
    xi_value: complex = 1.0
    omega_xi_inv_value: complex = 1.0
    xi_conductor: int = 0
    alpha: Optional[complex] = None
    beta: Optional[complex] = None

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"p must be prime, got {self.p}")
        if self.xi_conductor != 0:
            raise RamifiedCharacterError(f"character of conductor {self.xi_conductor} is ramified")
        self.s = complex(self.s)
        if self.alpha is None:
            self.alpha = complex(self.xi_value) * self.p ** (-self.s)
        if self.beta is None:
            self.beta = complex(self.omega_xi_inv_value) * self.p ** self.s

    @property
    def q(self) -> int:
        return self.p


def whittaker_na(spec: PadicCharSpec, n: int) -> complex:
    """W(a(p^n)) = q^{-n/2}(alpha^{n+1} - beta^{n+1})/(alpha - beta) for n >= 0, else 0"""
    if n < 0:
        return 0j
    a, b = complex(spec.alpha), complex(spec.beta)
    if abs(a - b) < 1e-14 * max(1.0, abs(a)):
        geometric = (n + 1) * a ** n
    else:
        geometric = (a ** (n + 1) - b ** (n + 1)) / (a - b)
    return spec.q ** (-n / 2) * geometric


def whittaker_na_integral(phi: PadicSchwartz, spec: PadicCharSpec, n: int) -> complex:
    """beta^n q^{-n/2} sum_k (alpha/beta)^k avg_u F_2 Phi(p^k u, p^{n-k} u^{-1})"""
    if phi.dim != 2:
        raise ValueError("the Whittaker integral needs a two-dimensional Phi")
    if spec.p != phi.p:
        raise ValueError("character and Schwartz function live at different primes")
    transformed = phi.fourier(spec.c_psi, axes=(1,))
    if transformed.is_zero:
        return 0j
    D = transformed.D
    level = max(transformed.n, 1)
    modulus = spec.p ** level
    units = [int(u) for u in _units(spec.p, level)]
    inverses = [pow(u, -1, modulus) for u in units]
    ratio = complex(spec.alpha) / complex(spec.beta)
    total = 0j
    for k in range(D, n - D + 1):
        avg = np.mean([transformed.value_at([(k, u), (n - k, ui)]) for u, ui in zip(units, inverses)])
        total += ratio ** k * avg
    return complex(spec.beta) ** n * spec.q ** (-n / 2) * total


def whittaker_support_floor(phi: PadicSchwartz, c_psi: int = 0) -> int:
    """2D with D = min(D(Phi), -c(psi) - delta(Phi)): W vanishes below valuation 2D"""
    return 2 * min(phi.D, -c_psi - phi.delta)


def local_whittaker_bound(spec: PadicCharSpec, n: int, eps: float) -> float:
    """(2/(eps log q)) sup(x e^{-x}) q^{-n(1/2 - |Re s| - eps)} for n >= 1, 1 at n = 0"""
    if n == 0:
        return 1.0
    if n < 0:
        return 0.0
    return 2 / (eps * math.log(spec.q)) * math.exp(-1) * spec.q ** (-n * (0.5 - abs(spec.s.real) - eps))


def verify_padic(p: int, trials: int = 200, seed: int = 20240601) -> Dict[str, dict]:
    """Index identities, norm relations, Mellin pair and Whittaker checks on a random corpus"""
    rng = np.random.default_rng(seed)
    counts = {key: [0, 0] for key in (
        "index_identity", "partial_transform", "m_bound", "rotation_invariance",
        "norm_relations", "double_transform", "radial_bound",
    )}

    def record(key, ok):
        counts[key][0] += int(bool(ok))
        counts[key][1] += 1

    for trial in range(trials):
        dim = 1 if trial % 2 == 0 else 2
        phi = PadicSchwartz.random(p, dim, rng)
        D, delta, m = phi.indices()
        record("m_bound", m <= delta - D)
        for c_psi in (-1, 0, 1):
            hat = phi.fourier(c_psi)
            record("index_identity", D + hat.delta == -c_psi and delta + hat.D == -c_psi)
            if dim == 2:
                for axes in ((0,), (1,)):
                    part = phi.fourier(c_psi, axes=axes)
                    record("partial_transform", part.delta <= max(delta, -c_psi - D)
                           and part.D >= min(D, -c_psi - delta))
        record("double_transform", phi.fourier().fourier().equals(phi.reflect()))
        if dim == 2:
            monomial = [[0, 1], [1, 0]] if rng.random() < 0.5 else [[int(_units(p, 1)[-1]), 0], [0, 1]]
            moved = phi.act(monomial)
            record("rotation_invariance", moved.indices() == (D, delta, m))
        else:
            u = int(_units(p, max(phi.n, 1))[int(rng.integers(len(_units(p, max(phi.n, 1)))))])
            record("rotation_invariance", phi.act([[u]]).indices() == (D, delta, m))
            sigma = float(rng.uniform(0, 2))
            radial = radial_sequence(phi, range(D - 1, delta + 4))
            bound = phi.seminorm(math.inf, (sigma,))
            n_vals = np.arange(D - 1, delta + 4)
            record("radial_bound", np.max(np.abs(radial) * float(p) ** (-n_vals * sigma)) <= bound * (1 + 1e-12))
        ok = True
        sup = phi.norm(math.inf)
        for l in (1.0, 2.0, 3.0):
            norm_l = phi.norm(l)
            ok &= sup <= float(p) ** (dim * delta / l) * norm_l * (1 + 1e-12)
            ok &= norm_l <= float(p) ** (-dim * D / l) * sup * (1 + 1e-12)
            sigma = tuple(float(v) for v in rng.uniform(0, 1.5, size=dim))
            ok &= phi.seminorm(l, sigma) <= float(p) ** (-sum(sigma) * D) * norm_l * (1 + 1e-12)
        record("norm_relations", ok)

    report = {key: {"passed": hits, "total": total, "ok": hits == total} for key, (hits, total) in counts.items()}

    # discrete Mellin pair and semi-norm chain
    mellin_err, chain_ok = 0.0, True
    for _ in range(20):
        f = DiscreteSeq(p, int(rng.integers(-3, 3)), rng.normal(size=8) + 1j * rng.normal(size=8))
        sigma = float(rng.uniform(0.1, 1.0))
        back = inverse_discrete_mellin(lambda s: discrete_mellin(f, s), p, sigma, f.n)
        mellin_err = max(mellin_err, float(np.max(np.abs(back - f.values))))
        chain_ok &= h_norm(lambda s: discrete_mellin(f, s), p, sigma, math.inf) <= b_norm(f, sigma, 1) * (1 + 1e-12)
        chain_ok &= b_norm(f, sigma, math.inf) <= b_norm(f, sigma, 2) * (1 + 1e-12)
        fM = DiscreteSeq(p, f.n0, back)
        chain_ok &= b_norm(fM, sigma, math.inf) <= h_norm(lambda s: discrete_mellin(f, s), p, sigma, 1) * (1 + 1e-9)
    report["mellin_round_trip"] = {"max_error": mellin_err, "ok": mellin_err <= 1e-12}
    report["seminorm_chain"] = {"ok": bool(chain_ok)}

    # Whittaker values and bounds
    spec = PadicCharSpec(p, s=0.2 + 0.3j)
    unit_square = PadicSchwartz.indicator(p, 0, dim=2)
    closed = [whittaker_na(spec, n) for n in range(-2, 8)]
    integral = [whittaker_na_integral(unit_square, spec, n) for n in range(-2, 8)]
    eps = 0.1
    bound_ok = all(abs(whittaker_na(spec, n)) <= local_whittaker_bound(spec, n, eps) * (1 + 1e-12) for n in range(0, 40))
    report["whittaker"] = {
        "n0": abs(whittaker_na(spec, 0) - 1), "n_negative": abs(whittaker_na(spec, -1)),
        "integral_vs_closed": float(np.max(np.abs(np.array(closed) - np.array(integral)))),
        "small_y_bound": bound_ok,
    }
    report["whittaker"]["ok"] = (report["whittaker"]["n0"] < 1e-14 and report["whittaker"]["n_negative"] == 0
                                 and report["whittaker"]["integral_vs_closed"] < 1e-12 and bound_ok)
    for key, row in report.items():
        if not row["ok"]:
            logger.error(f"p-adic check {key} failed at p = {p}: {row}")
    return report
