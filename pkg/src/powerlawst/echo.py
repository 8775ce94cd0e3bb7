"""Spin-echo pulse schedules and exact cancellation certificates.

Square-wave sign sequences with halving periods (Walsh/Rademacher family) over
2**(n-1) equal segments make any two distinct colors' sign rows orthogonal
under the duration weighting, which cancels every cross-color two-body phase
exactly; same-color interactions survive with their full weight T.  Segment
durations are T / 2**(n-1), an exact binary fraction of T, so the cancellation
sums are integer arithmetic scaled by one float and vanish identically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import CouplingModel, PlaquetteTiling

MAX_COLORS = 20


@dataclass
class PulseSequence:
    """Per-color sign rows over equal time segments."""

    n_colors: int
    T: float
    segment_durations: np.ndarray
    signs: np.ndarray  # shape (n_colors, n_segments), entries +-1
    pulses_of_color: list[int]

    @property
    def n_segments(self) -> int:
        return self.signs.shape[1]

    def sign_of_color(self, color: int, segment: int) -> int:
        return int(self.signs[color, segment])

    def weighted_inner(self, c1: int, c2: int) -> float:
        """Duration-weighted inner product of two colors' sign rows.

        Computed as (integer row dot) * (T / n_segments) so that orthogonal
        rows give exactly 0.0.
        """
        dot = int(np.dot(self.signs[c1].astype(np.int64), self.signs[c2].astype(np.int64)))
        return dot * (self.T / self.n_segments)

    def distinct_pulse_times(self) -> list[float]:
        """Times at which at least one color flips sign (including the final
        refocus at T for rows ending at -1)."""
        dt = self.T / self.n_segments
        times = set()
        for c in range(self.n_colors):
            row = self.signs[c]
            for k in range(1, self.n_segments):
                if row[k] != row[k - 1]:
                    times.add(k * dt)
            if row[-1] == -1:
                times.add(self.T)
        return sorted(times)


def walsh_sequence(n: int, T: float) -> PulseSequence:
    """Sign schedule for n colors over 2**(n-1) equal segments.

    Color 1 is constant +1; color i >= 2 alternates with half-period
    2**(n-i) segments, giving pulse counts 0, 2, 4, ..., 2**(i-1) (sign flips
    including the trailing refocus) and exact pairwise orthogonality.
    """
    if n < 1:
        raise ValueError("need n >= 1 colors")
    if n > MAX_COLORS:
        raise ValueError(f"n = {n} exceeds the segment budget (max {MAX_COLORS} colors)")
    if T <= 0:
        raise ValueError("total time must be positive")
    K = 1 if n == 1 else 2 ** (n - 1)
    signs = np.ones((n, K), dtype=np.int8)
    k = np.arange(K)
    for i in range(2, n + 1):
        half_period = 2 ** (n - i)
        signs[i - 1] = np.where((k // half_period) % 2 == 0, 1, -1)

    pulses = []
    for c in range(n):
        row = signs[c]
        flips = int(np.sum(row[1:] != row[:-1]))
        if row[-1] == -1:
            flips += 1
        pulses.append(flips)

    durations = np.full(K, T / K)
    return PulseSequence(
        n_colors=n, T=float(T), segment_durations=durations, signs=signs, pulses_of_color=pulses
    )


@dataclass
class EffectiveCouplings:
    """Accumulated coupling*time for every site pair after a schedule."""

    matrix: np.ndarray
    labels: list[str]

    def entry(self, i: int, j: int) -> float:
        return float(self.matrix[i, j])


def control_target_echo(
    J: np.ndarray, labels, t: float, a: float, shelve_uninvolved: bool = True
) -> EffectiveCouplings:
    """Two-segment +-H echo: evolve J for t, flip targets, evolve -a*J for t/a.

    Accumulates J*t*(1 - s_i s_j) with s = -1 on targets: control-control and
    target-target pairs cancel exactly, control-target pairs retain 2*J*t.
    Pairs touching uninvolved sites are zeroed when shelved, otherwise their
    residual (2*J*t on target-uninvolved pairs) is reported as-is.
    """
    if a <= 0:
        raise ValueError("echo rescaling factor a must be positive")
    J = np.asarray(J, dtype=float)
    labels = list(labels)
    if J.shape != (len(labels), len(labels)):
        raise ValueError("labels must match the coupling matrix size")
    bad = set(labels) - {"control", "target", "uninvolved"}
    if bad:
        raise ValueError(f"unknown site labels: {sorted(bad)}")
    Jw = J.copy()
    if shelve_uninvolved:
        idle = [i for i, lab in enumerate(labels) if lab == "uninvolved"]
        Jw[idle, :] = 0.0
        Jw[:, idle] = 0.0
    s = np.array([-1.0 if lab == "target" else 1.0 for lab in labels])
    # segment 1: +J for t; segment 2: -a*J for t/a with target signs flipped
    M = Jw * t + (-a) * Jw * np.outer(s, s) * (t / a)
    np.fill_diagonal(M, 0.0)
    return EffectiveCouplings(matrix=M, labels=labels)


def per_target_trim(
    t_required: dict[int, float], J: np.ndarray, t_max: float | None = None
) -> tuple[list[tuple[float, int]], EffectiveCouplings]:
    """Pi-pulse schedule making each target's accumulated time equal its own
    t_i within one global window t_max.

    Target i is flipped once at t_i + (t_max - t_i)/2, so its pair phase with
    any unflipped site integrates to t_i exactly (forward until the pulse,
    reversed after).  Returns the pulse schedule sorted by time and the full
    accumulated coupling*time matrix (target-target pairs overlap reversed
    windows and keep t_max - |t_i - t_j|; unflipped pairs keep t_max).
    """
    J = np.asarray(J, dtype=float)
    n = J.shape[0]
    if t_max is None:
        t_max = max(t_required.values())
    for site, ti in t_required.items():
        if not 0 < ti <= t_max:
            raise ValueError(f"required time for site {site} outside (0, t_max]")
        if not 0 <= site < n:
            raise ValueError(f"site {site} outside the coupling matrix")

    pulse_at = {site: ti + (t_max - ti) / 2.0 for site, ti in t_required.items()}
    schedule = sorted((p, site) for site, p in pulse_at.items() if p < t_max)

    weights = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            pi = pulse_at.get(i)
            pj = pulse_at.get(j)
            if pi is None and pj is None:
                w = t_max
            elif pi is None:
                w = 2.0 * pj - t_max
            elif pj is None:
                w = 2.0 * pi - t_max
            else:
                w = t_max - 2.0 * abs(pi - pj)
            weights[i, j] = w
    M = J * weights
    np.fill_diagonal(M, 0.0)
    labels = ["target" if i in t_required else "control" for i in range(n)]
    return schedule, EffectiveCouplings(matrix=M, labels=labels)


@dataclass
class CancellationReport:
    """Exact per-block-pair accumulated couplings under a pulse sequence."""

    max_cross_residual: float
    threshold: float
    cross_pairs: int
    same_color_totals: list[tuple[int, int, float]]
    passed: bool


def verify_cancellation(
    seq: PulseSequence, tiling: PlaquetteTiling, model: CouplingModel
) -> CancellationReport:
    """Accumulate every block pair's coupling*time under the sign schedule.

    Pair (A, B) accumulates (sum_k s_cA(k) s_cB(k) dt_k) * sum_{i in A, j in B}
    h(i, j); cross-color weights vanish identically, same-color pairs retain
    the raw coupling sum times T.
    """
    colors = tiling.color_of_block
    if max(colors) >= seq.n_colors:
        raise ValueError("tiling uses colors the pulse sequence does not provide")
    coords = tiling.lattice.coordinates().astype(float)
    n_blocks = len(tiling.blocks)

    def block_pair_sum(A, B) -> float:
        pa = coords[list(A)]
        pb = coords[list(B)]
        diff = pa[:, None, :] - pb[None, :, :]
        dist2 = np.sum(diff * diff, axis=2)
        return float(np.sum(model.prefactor * dist2 ** (-model.alpha / 2.0)))

    max_cross = 0.0
    cross_pairs = 0
    same: list[tuple[int, int, float]] = []
    scale = 0.0
    for a in range(n_blocks):
        for b in range(a + 1, n_blocks):
            h_sum = block_pair_sum(tiling.blocks[a], tiling.blocks[b])
            weight = seq.weighted_inner(colors[a], colors[b])
            acc = weight * h_sum
            scale = max(scale, seq.T * h_sum)
            if colors[a] == colors[b]:
                same.append((a, b, acc))
            else:
                cross_pairs += 1
                max_cross = max(max_cross, abs(acc))
    threshold = 1e-12 * scale
    return CancellationReport(
        max_cross_residual=max_cross,
        threshold=threshold,
        cross_pairs=cross_pairs,
        same_color_totals=same,
        passed=max_cross <= threshold,
    )
