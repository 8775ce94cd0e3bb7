"""Recursive-merge cost model (Tran protocol) and the hybrid DP optimizer.

The recursion builds a GHZ state over an edge-r region out of m^d blocks of
edge r1 (m = r/r1): three sequential block-level phases at cost t1 each plus
one merge evolution of duration t2, i.e. ``t(r; r1) = 3 t(r1) + t2(r1, m)``.
The dynamic program chooses, for every r, the better of the plain cascade time
and the best recursive split, giving the hybrid protocol curve and its
crossover.

``merge_time_t2`` supports two prefactor conventions:

- ``"diagonal"`` — pi * d**(alpha/2) * (m*r1)**alpha / r1**(2d), the
  worst-case block-diameter bound (the formula used by the state-vector
  verifier, where the merge phase must hit pi exactly);
- ``"axis"`` — the same with the d**(alpha/2) factor dropped (axis-extent
  distance).  This is the convention that reproduces the published crossover
  numbers (r* near 244 at alpha=3, d=2), so the optimizer defaults to it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cascade import EldredgeFit, ScalingClass, base_time_array, eldredge_time

MERGE_CONVENTIONS = ("axis", "diagonal")


@dataclass(frozen=True)
class ScalingConstants:
    """gamma = 3 sqrt(d); kappa_alpha = log 4 / log(2d/alpha), defined only on
    d < alpha < 2d (where it always exceeds 2)."""

    gamma: float
    kappa_alpha: float | None

    @classmethod
    def for_model(cls, alpha: float, d: int) -> "ScalingConstants":
        if d not in (1, 2, 3):
            raise ValueError("d must be 1, 2 or 3")
        gamma = 3.0 * math.sqrt(d)
        kappa = None
        if d < alpha < 2 * d:
            kappa = math.log(4.0) / math.log(2.0 * d / alpha)
        return cls(gamma=gamma, kappa_alpha=kappa)


def _merge_prefactor(alpha: float, d: int, convention: str) -> float:
    if convention == "diagonal":
        return math.pi * d ** (alpha / 2.0)
    if convention == "axis":
        return math.pi
    raise ValueError(f"merge convention must be one of {MERGE_CONVENTIONS}")


def merge_time_t2(
    r1: int | float,
    m: float,
    alpha: float,
    d: int,
    convention: str = "diagonal",
) -> float:
    """Duration of the block-merge evolution for m^d blocks of edge r1.

    With uniform inter-block couplings at the worst-case block-pair distance,
    every target block accumulates phase pi after
    ``pref * (m*r1)**alpha / r1**(2d)`` where pref depends on the convention
    (see module docstring).  Decreases with r1 at fixed m whenever alpha < 2d.
    """
    if r1 < 1:
        raise ValueError("r1 must be >= 1")
    if m < 2:
        raise ValueError("need at least m = 2 blocks per axis")
    pref = _merge_prefactor(alpha, d, convention)
    return pref * (m * r1) ** alpha / float(r1) ** (2 * d)


def choose_m(r1: float, alpha: float, d: int, constant: float = 1.0) -> float:
    """Asymptotically optimal blocks-per-axis at scale r1 (analysis aid only;
    the DP optimizes m directly and never calls this)."""
    if r1 < 2:
        raise ValueError("r1 must be >= 2")
    if alpha < 2 * d - 1e-12:
        return constant * r1 ** (2.0 * d / alpha - 1.0)
    if alpha <= 2 * d + 1e-12:
        gamma = 3.0 * math.sqrt(d)
        return constant * math.exp(gamma / (2.0 * d) * math.sqrt(math.log(r1)))
    return constant * float(r1)


def classify_tran_asymptotics(alpha: float, d: int) -> ScalingClass:
    """Scaling class of the recursive protocol's GHZ time in (alpha, d):
    polylog with exponent kappa_alpha for d < alpha < 2d, stretched
    exponential exp(gamma sqrt(log r)) at alpha = 2d, and a power
    min(alpha - 2d, 1) beyond."""
    if d not in (1, 2, 3):
        raise ValueError("d must be 1, 2 or 3")
    if alpha <= d:
        raise ValueError("recursive protocol is defined for alpha > d")
    consts = ScalingConstants.for_model(alpha, d)
    if alpha < 2 * d - 1e-12:
        return ScalingClass(kind="polylog", kappa=consts.kappa_alpha)
    if alpha <= 2 * d + 1e-12:
        return ScalingClass(kind="stretched_exponential", gamma=consts.gamma)
    return ScalingClass(kind="power", exponent=min(alpha - 2.0 * d, 1.0))


@dataclass
class HybridPlan:
    """DP table indexed by r: optimal time, split choice, recursion depth.

    ``best_split[r] == 0`` encodes "no split" (plain cascade optimal at r);
    otherwise it holds the optimal sub-block edge r1.
    """

    base: EldredgeFit
    best_time: np.ndarray
    best_split: np.ndarray
    depth: np.ndarray
    r_max: int
    alpha: float
    d: int
    merge_convention: str

    def crossover(self) -> int | None:
        """Smallest r whose optimum uses a split, or None if never."""
        hits = np.nonzero(self.best_split[2:])[0]
        return int(hits[0]) + 2 if len(hits) else None

    def depth_onset(self, level: int) -> int | None:
        """Smallest r whose optimal plan recurses at least ``level`` deep."""
        hits = np.nonzero(self.depth[2:] >= level)[0]
        return int(hits[0]) + 2 if len(hits) else None

    def m_of(self, r: int) -> float | None:
        s = int(self.best_split[r])
        return (r / s) if s else None

    def m_range(self, r_lo: int, r_hi: int) -> tuple[float, float]:
        """(min, max) of m = r / r1 over split points with r in [r_lo, r_hi]."""
        ms = [r / s for r in range(r_lo, r_hi + 1) if (s := int(self.best_split[r]))]
        if not ms:
            raise ValueError(f"no splits in [{r_lo}, {r_hi}]")
        return min(ms), max(ms)

    def rows(self):
        """Per-r table rows: (r, best_time, eldredge_time, best_split, depth)."""
        for r in range(2, self.r_max + 1):
            yield (
                r,
                float(self.best_time[r]),
                eldredge_time(self.base, r),
                int(self.best_split[r]),
                int(self.depth[r]),
            )


_FULL_SCAN_LIMIT = 4096


def _inner_scan(
    best: np.ndarray, inv_r1: np.ndarray, r_pow: float, hi: int, start_cap: int
) -> tuple[int, float]:
    """argmin over r1 in [2, hi] of 3*best[r1] + r_pow*inv_r1[r1], scanning a
    prefix and doubling it whenever the argmin lands near the scan boundary
    (so truncation can never hide the true minimum)."""
    scan = hi if hi <= start_cap else start_cap
    while True:
        cand = 3.0 * best[2 : scan + 1] + r_pow * inv_r1[2 : scan + 1]
        j = int(np.argmin(cand))
        if scan < hi and j >= 0.8 * (scan - 2):
            scan = min(hi, scan * 2)
            continue
        return j + 2, float(cand[j])


def optimize(
    base: EldredgeFit,
    r_max: int,
    alpha: float,
    d: int,
    merge_convention: str = "axis",
    t2_scale: float = 1.0,
    base_scale: float = 1.0,
) -> HybridPlan:
    """Bottom-up DP: best_time(r) = min(cascade(r), min_r1 3*best_time(r1) + t2).

    r1 ranges over integers in [2, r//2]; m = r/r1 is real.  ``t2_scale`` and
    ``base_scale`` are homogeneity knobs (both scaled together rescales the
    whole table without moving any argmin).
    """
    if r_max < 2:
        raise ValueError("r_max must be >= 2")
    pref = t2_scale * _merge_prefactor(alpha, d, merge_convention)
    best = base_scale * base_time_array(base, r_max)
    split = np.zeros(r_max + 1, dtype=int)
    depth = np.zeros(r_max + 1, dtype=int)

    r1v = np.arange(r_max + 1, dtype=float)
    with np.errstate(divide="ignore"):
        inv_r1 = r1v ** (-2.0 * d)

    for r in range(4, r_max + 1):
        hi = r // 2
        r1_best, t_best = _inner_scan(best, inv_r1, pref * float(r) ** alpha, hi, _FULL_SCAN_LIMIT)
        if t_best < best[r]:
            best[r] = t_best
            split[r] = r1_best
            depth[r] = depth[r1_best] + 1

    return HybridPlan(
        base=base,
        best_time=best,
        best_split=split,
        depth=depth,
        r_max=int(r_max),
        alpha=alpha,
        d=d,
        merge_convention=merge_convention,
    )


@dataclass
class MScalingCurve:
    """Sampled optimal m versus r in the deep-recursion regime."""

    rs: np.ndarray
    ms: np.ndarray

    def loglog_slope(self) -> float:
        return float(np.polyfit(np.log(self.rs), np.log(self.ms), 1)[0])


def m_scaling_curve(
    base: EldredgeFit,
    alpha: float,
    d: int,
    r_lo: float = 1e4,
    r_hi: float = 1e6,
    num: int = 48,
    table_rmax: int = 60_000,
    merge_convention: str = "axis",
) -> MScalingCurve:
    """Optimal top-level m = r/r1 at geometrically spaced r in [r_lo, r_hi].

    Builds the DP table once up to ``table_rmax`` and scans top-level splits
    against it (the boundary-doubling scan rule guarantees the argmin is
    interior, i.e. never an artifact of a truncated scan range).
    """
    plan = optimize(base, table_rmax, alpha, d, merge_convention=merge_convention)
    pref = _merge_prefactor(alpha, d, merge_convention)
    r1v = np.arange(table_rmax + 1, dtype=float)
    with np.errstate(divide="ignore"):
        inv_r1 = r1v ** (-2.0 * d)

    rs = np.unique(np.round(np.geomspace(r_lo, r_hi, num)).astype(np.int64))
    ms = []
    for r in rs:
        hi = min(int(r) // 2, table_rmax)
        r1_best, _ = _inner_scan(plan.best_time, inv_r1, pref * float(r) ** alpha, hi, 4096)
        ms.append(r / r1_best)
    return MScalingCurve(rs=rs.astype(float), ms=np.array(ms))


def recursion_depth_estimate(r: float, r0: float, alpha: float, d: int) -> int:
    """Levels needed to shrink scale r below r0 when every level splits by the
    asymptotically optimal m: iterate r <- r / choose_m(r) and count."""
    if r0 < 2:
        raise ValueError("r0 must be >= 2")
    if r == r0:
        return 0
    if r < r0:
        raise ValueError("need r >= r0")
    x = float(r)
    depth = 0
    while x > r0:
        m = choose_m(x, alpha, d)
        if m <= 1.0:
            break
        x = x / m
        depth += 1
        if depth > 500:
            raise RuntimeError("recursion depth estimate failed to converge")
    return depth
