"""
Lattice sums over fractional ideals
Sums of f_c(t sigma(alpha)) over (1/m)Z and (1/m)Z[i] with exact or integral tails, and the
two convergence estimates checked through fitted constants and log-log slopes
"""

import math
import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import integrate, special

from automorphic.config import AutomorphicError

logger = logging.getLogger(__name__)

FIELDS = {"Q": 1, "Qi": 2}


class RadiusError(AutomorphicError):
    """Raised when the enumeration radius does not reach the region where f_c < 1"""


@dataclass
class LatticeSpec:
    """Ideal (m) of Z or Z[i], exponent c and enumeration radius R (in lattice units)"""
    field: str = "Q"
    m: int = 1
    c: float = 3.0
    R: Optional[int] = None

    def __post_init__(self):
        if self.field not in FIELDS:
            raise ValueError(f"field must be one of {sorted(FIELDS)}, got {self.field!r}")
        if self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m}")
        if self.c <= 1:
            raise ValueError(f"c must exceed 1, got {self.c}")
        if self.R is None:
            self.R = 1000 if self.field == "Q" else 400

    @property
    def degree(self) -> int:
        return FIELDS[self.field]

    @property
    def ideal_norm(self) -> int:
        """|o/J| for J = (m)"""
        return self.m ** self.degree


def _radius_for(spec: LatticeSpec, t: float) -> int:
    """Enumeration radius; enlarged (with a warning) when f_c is still 1 at the boundary"""
    needed = int(math.ceil(spec.m / t)) + 1
    if spec.R >= needed:
        return spec.R
    logger.warning(f"radius {spec.R} too small at t = {t}; enlarging to {needed + needed // 4}")
    return needed + needed // 4


def _tail_square(c: float, edge: float) -> float:
    """sum over integer points outside [-edge, edge]^2 of |n|^{-2c}, by the integral"""
    I_c, _ = integrate.quad(lambda u: (1 + u * u) ** (-c), 0.0, 1.0, epsabs=0.0, epsrel=1e-14)
    return 8 * I_c * edge ** (2 - 2 * c) / (2 * c - 2)


def lattice_sum(spec: LatticeSpec, t: float, include_zero: bool = False, R: Optional[int] = None) -> float:
    """sum over alpha in (1/m)O, alpha != 0 unless include_zero, of f_c(t sigma(alpha))"""
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    radius = int(R) if R is not None else _radius_for(spec, t)
    if t * radius / spec.m < 1:
        raise RadiusError(f"radius {radius} does not reach t|alpha| >= 1 at t = {t}")
    scale = t / spec.m
    c = spec.c

    if spec.field == "Q":
        k = np.arange(1, radius + 1, dtype=float)
        head = 2 * float(np.sum(np.minimum(1.0, (scale * k) ** (-c))))
        tail = 2 * scale ** (-c) * float(special.zeta(c, radius + 1))
    else:
        a = np.arange(-radius, radius + 1, dtype=float)
        norm = np.hypot(a[:, None], a[None, :])
        norm[radius, radius] = np.inf
        head = float(np.sum(np.minimum(1.0, (scale * norm) ** (-2 * c))))
        tail = scale ** (-2 * c) * _tail_square(c, radius + 0.5)
    return head + tail + (1.0 if include_zero else 0.0)


def part1_bound(spec: LatticeSpec, t: float) -> float:
    """|o/J|^{3c} t^{-c}"""
    return spec.ideal_norm ** (3 * spec.c) * t ** (-spec.c)


def part2_bound(spec: LatticeSpec, t: float) -> float:
    """t^{-r} |o/J|^{-1} (1 + t |o/J|^2 / sqrt(r))^{rc}"""
    r, N = spec.degree, spec.ideal_norm
    return t ** (-r) / N * (1 + t * N ** 2 / math.sqrt(r)) ** (r * spec.c)


def _slope(t: Sequence[float], values: Sequence[float]) -> float:
    return float(np.polyfit(np.log(t), np.log(values), 1)[0])


def lattice_table(field: str, c: float, m_grid: Sequence[int], t_grid: Sequence[float],
                  part: int = 1) -> pd.DataFrame:
    """Rows (field, m, t, sum, bound, ratio) for one part of the estimate"""
    rows = []
    for m in m_grid:
        spec = LatticeSpec(field=field, m=int(m), c=c)
        for t in t_grid:
            total = lattice_sum(spec, t, include_zero=(part == 2))
            bound = part1_bound(spec, t) if part == 1 else part2_bound(spec, t)
            rows.append({"field": field, "part": part, "m": int(m), "t": float(t),
                         "sum": total, "bound": bound, "ratio": total / bound})
    return pd.DataFrame(rows)


def verify_lemma(spec: LatticeSpec, t_grid: Sequence[float] = (10.0, 20.0, 40.0, 80.0, 160.0),
                 m_grid: Sequence[int] = (1, 2, 4),
                 small_t_grid: Sequence[float] = (1 / 320, 1 / 160, 1 / 80, 1 / 40),
                 small_m_grid: Optional[Sequence[int]] = None) -> Dict[str, object]:
    """Fitted constants and slopes for both estimates

    Part (1) slopes are read against the idelic height |t|^r, which turns the raw slope -rc
    on complex slots into -c; part (2) at small t behaves like the covolume term t^{-r}.
    """
    r, c = spec.degree, spec.c
    part1 = lattice_table(spec.field, c, m_grid, t_grid, part=1)
    part2 = lattice_table(spec.field, c, small_m_grid or m_grid, small_t_grid, part=2)

    slopes = []
    for m, group in part1.groupby("m"):
        raw = _slope(group["t"], group["sum"])
        slopes.append({"m": int(m), "raw_slope": raw, "height_slope": raw / r})
    small_slopes = [{"m": int(m), "slope": _slope(g["t"], g["sum"])} for m, g in part2.groupby("m")]

    doubled = []
    for t in (t_grid[0], small_t_grid[-1]):
        base = lattice_sum(spec, t, include_zero=True)
        wide = lattice_sum(spec, t, include_zero=True, R=2 * _radius_for(spec, t))
        doubled.append(abs(wide - base) / base)

    report = {
        "field": spec.field,
        "c": c,
        "part1": {
            "fitted_constant": float(part1["ratio"].max()),
            "slopes": slopes,
            "ok": bool(np.isfinite(part1["ratio"].max()))
            and all(abs(row["height_slope"] + c) <= 0.05 for row in slopes),
        },
        "part2": {
            "fitted_constant": float(part2["ratio"].max()),
            "slopes": small_slopes,
            "ok": bool(np.isfinite(part2["ratio"].max()))
            and all(abs(row["slope"] + r) <= 0.05 for row in small_slopes),
        },
        "radius_doubling": {"max_relative": max(doubled), "ok": max(doubled) <= 1e-9},
        "table": pd.concat([part1, part2], ignore_index=True),
    }
    if spec.degree == 2 and c <= r:
        logger.warning(f"c = {c} does not exceed the degree {r}; part (1) needs c > r")
    return report
