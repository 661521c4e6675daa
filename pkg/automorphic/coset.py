"""
Coset representatives for Gamma_0(N) in SL_r(Z)
Unipotent normal forms N_- N_+ with entries in [-N/2, N/2], exact membership tests and
a full enumeration of Gamma_0(N)\\SL_2(Z) through the projective line over Z/N
"""

import math
import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import List, Sequence, Tuple

import numpy as np
from sympy import Matrix, eye, gcdex, mod_inverse, primefactors

from automorphic.config import AutomorphicError

logger = logging.getLogger(__name__)

FLAVORS = ("gamma0", "gamma0_minus")


class NotUnimodularError(AutomorphicError):
    """Raised when a matrix is not square with determinant 1"""


def as_intmat(A) -> Matrix:
    """Exact integer matrix from nested lists, numpy arrays or a sympy Matrix"""
    M = Matrix(np.asarray(A, dtype=object).tolist()) if not isinstance(A, Matrix) else A
    if M.rows != M.cols:
        raise NotUnimodularError(f"expected a square matrix, got {M.rows}x{M.cols}")
    if any(not v.is_integer for v in M):
        raise NotUnimodularError("matrix entries must be integers")
    if M.det() != 1:
        raise NotUnimodularError(f"determinant is {M.det()}, not 1")
    return M


def centered(v: int, N: int) -> int:
    """Representative of v mod N in [-N/2, N/2]; the tie at N/2 goes to +N/2"""
    r = int(v) % N
    return r - N if r > N / 2 else r


def _antidiagonal(r: int) -> Matrix:
    return Matrix(r, r, lambda i, j: 1 if i + j == r - 1 else 0)


@dataclass
class CosetRep:
    """N_- (lower unipotent) and N_+ (upper unipotent) for the modulus N"""
    n_minus: Matrix
    n_plus: Matrix
    N: int
    flavor: str = "gamma0"

    @property
    def product(self) -> Matrix:
        if self.flavor == "gamma0":
            return self.n_minus * self.n_plus
        return self.n_plus * self.n_minus

    def key(self) -> Tuple[int, ...]:
        return tuple(int(v) for v in self.n_minus) + tuple(int(v) for v in self.n_plus)

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "flavor": self.flavor,
            "n_minus": [[int(v) for v in row] for row in self.n_minus.tolist()],
            "n_plus": [[int(v) for v in row] for row in self.n_plus.tolist()],
        }


@lru_cache(maxsize=64)
def _shift_vectors(length: int, N: int) -> Tuple[Tuple[int, ...], ...]:
    """All shift vectors in [-N/2, N/2]^length, smallest |k| first, then lexicographic"""
    half = N // 2
    span = range(-half, half + 1)
    return tuple(sorted(product(span, repeat=length), key=lambda k: (sum(abs(v) for v in k), k)))


def _coprime_shift(t0: int, others: Sequence[int], N: int) -> Tuple[int, ...]:
    """Shift k with gcd(t0 + sum k_i t_i, N) = 1; one exists when gcd(t0, others, N) = 1"""
    for k in _shift_vectors(len(others), N):
        if math.gcd(t0 + sum(a * b for a, b in zip(k, others)), N) == 1:
            return k
    raise AutomorphicError(f"no shift makes {t0} coprime to {N}; the minors share a factor with N")


def _crout_mod(X: List[List[int]], N: int) -> Tuple[List[List[int]], List[List[int]]]:
    """X = Lo·Up mod N with Lo lower, Up unit upper; leading principal minors must be units"""
    r = len(X)
    Lo = [[0] * r for _ in range(r)]
    Up = [[int(i == j) for j in range(r)] for i in range(r)]
    for j in range(r):
        for i in range(j, r):
            Lo[i][j] = (X[i][j] - sum(Lo[i][k] * Up[k][j] for k in range(j))) % N
        pivot = mod_inverse(Lo[j][j], N)
        for i in range(j + 1, r):
            Up[j][i] = (X[j][i] - sum(Lo[j][k] * Up[k][i] for k in range(j))) * pivot % N
    return Lo, Up


def _decompose_upper(A: Matrix, N: int) -> CosetRep:
    r = A.rows
    M = A.copy()
    U = eye(r)
    # make every bottom-right minor a unit mod N, fixing columns from the right
    for c in range(r - 1, 0, -1):
        block = M[c:, c:]
        t0 = int(block.det())
        others = []
        for i in range(c):
            swapped = block.copy()
            swapped[:, 0] = M[c:, i]
            others.append(int(swapped.det()))
        k = _coprime_shift(t0, others, N)
        step = eye(r)
        for i, ki in enumerate(k):
            step[i, c] = ki
        M = M * step
        U = U * step

    J = _antidiagonal(r)
    X = (J * M * J).applyfunc(lambda v: int(v) % N)
    _, Up = _crout_mod(X.tolist(), N)
    lower = J * Matrix(Up) * J
    n_minus = Matrix(r, r, lambda i, j: 1 if i == j else (centered(lower[i, j], N) if i > j else 0))
    inverse = U.inv()
    n_plus = Matrix(r, r, lambda i, j: 1 if i == j else (centered(inverse[i, j], N) if i < j else 0))
    return CosetRep(n_minus=n_minus, n_plus=n_plus, N=N, flavor="gamma0")


def decompose(A, N: int, flavor: str = "gamma0") -> CosetRep:
    """Normal-form representative of the coset of A

    gamma0: A = B·N_-·N_+ with B upper triangular mod N;
    gamma0_minus: A = B·N_+·N_- with B lower triangular mod N.
    """
    if N < 2:
        raise ValueError(f"modulus must be at least 2, got {N}")
    if flavor not in FLAVORS:
        raise ValueError(f"unknown flavor {flavor!r}; expected one of {FLAVORS}")
    A = as_intmat(A)
    if flavor == "gamma0":
        return _decompose_upper(A, N)
    J = _antidiagonal(A.rows)
    rep = _decompose_upper(J * A * J, N)
    return CosetRep(n_minus=J * rep.n_plus * J, n_plus=J * rep.n_minus * J, N=N, flavor=flavor)


def in_normal_form(rep: CosetRep) -> bool:
    half = rep.N / 2
    r = rep.n_minus.rows
    for i in range(r):
        for j in range(r):
            low, up = rep.n_minus[i, j], rep.n_plus[i, j]
            if i == j and (low != 1 or up != 1):
                return False
            if i < j and (low != 0 or abs(up) > half):
                return False
            if i > j and (up != 0 or abs(low) > half):
                return False
    return True


def verify(A, rep: CosetRep) -> bool:
    """A·(N_- N_+)^{-1} (resp. (N_+ N_-)^{-1}) is triangular mod N, exactly"""
    A = as_intmat(A)
    if rep.n_minus.shape != A.shape or rep.n_plus.shape != A.shape:
        return False
    if not in_normal_form(rep):
        return False
    X = A * rep.product.inv()
    r = A.rows
    if rep.flavor == "gamma0":
        below = [X[i, j] for i in range(r) for j in range(i)]
    else:
        below = [X[i, j] for i in range(r) for j in range(i + 1, r)]
    return all(v.is_integer and int(v) % rep.N == 0 for v in below)


def gamma0_index(N: int) -> int:
    """[SL_2(Z) : Gamma_0(N)] = N prod_{p | N} (1 + 1/p)"""
    index = N
    for p in primefactors(N):
        index = index // p * (p + 1)
    return index


def _p1_key(c: int, d: int, N: int, units: Sequence[int]) -> Tuple[int, int]:
    return min(((u * c) % N, (u * d) % N) for u in units)


def _lift_bottom_row(c: int, d: int, N: int) -> Matrix:
    """Matrix in SL_2(Z) whose bottom row is congruent to (c, d) mod N"""
    c = c if c != 0 else N
    d_lift = d
    while math.gcd(c, d_lift) != 1:
        d_lift += N
    x, y, g = gcdex(d_lift, c)
    assert g == 1
    # x d + y c = 1  ->  [[x, -y], [c, d]]
    return Matrix([[int(x), -int(y)], [c, d_lift]])


def enumerate_cosets_r2(N: int) -> dict:
    """Walk P^1(Z/N), build a matrix for every coset and decompose it"""
    if not 2 <= N <= 60:
        raise ValueError(f"enumeration supports 2 <= N <= 60, got {N}")
    units = [u for u in range(1, N) if math.gcd(u, N) == 1]
    classes = {}
    for c in range(N):
        for d in range(N):
            if math.gcd(math.gcd(c, d), N) == 1:
                classes.setdefault(_p1_key(c, d, N, units), (c, d))

    reps = {}
    verified = 0
    for key, (c, d) in sorted(classes.items()):
        A = _lift_bottom_row(c, d, N)
        rep = decompose(A, N)
        if verify(A, rep):
            verified += 1
        else:
            logger.error(f"coset ({c}:{d}) mod {N}: representative failed verification")
        reps[rep.key()] = key

    count = len(classes)
    result = {
        "N": N,
        "count": count,
        "index": gamma0_index(N),
        "verified": verified,
        "injective": len(reps) == count,
    }
    result["passed"] = count == result["index"] and verified == count and result["injective"]
    return result


def random_sl(r: int, rng: np.random.Generator, entry_bound: int = 50, steps: int = 40) -> Matrix:
    """Random element of SL_r(Z) from elementary row operations, entries bounded by entry_bound"""
    M = eye(r)
    for _ in range(steps):
        i, j = (int(v) for v in rng.choice(r, size=2, replace=False))
        k = int(rng.integers(-3, 4))
        candidate = M.copy()
        candidate[i, :] = candidate[i, :] + k * candidate[j, :]
        if max(abs(int(v)) for v in candidate) <= entry_bound:
            M = candidate
    return M


def soundness_checks(trials: int = 1000, seed: int = 20240601, r_values=(2, 3, 4),
                     moduli=range(2, 13)) -> dict:
    """decompose/verify on random matrices for both flavors"""
    rng = np.random.default_rng(seed)
    moduli = list(moduli)
    failures = []
    for trial in range(trials):
        r = int(r_values[trial % len(r_values)])
        N = int(moduli[int(rng.integers(len(moduli)))])
        A = random_sl(r, rng)
        for flavor in FLAVORS:
            rep = decompose(A, N, flavor)
            if not verify(A, rep):
                failures.append({"r": r, "N": N, "flavor": flavor, "A": A.tolist()})
    if failures:
        logger.error(f"{len(failures)} coset decompositions failed verification")
    return {"trials": trials, "failures": failures[:10], "n_failures": len(failures),
            "passed": not failures}
