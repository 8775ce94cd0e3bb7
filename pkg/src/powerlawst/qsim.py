"""Exact dense state-vector verification of the protocols at desk scale.

Amplitudes are a complex128 vector over computational basis states; qubit q is
bit q of the basis index (qubit 0 least significant).  The controlled-X
evolution applies exp(-i * theta_eff(z) * X_j) to each target j, where
theta_eff is the target's nominal angle scaled by the fraction of its control
coupling present in the basis configuration z — exactly the partial rotations
generated by h_ij |1><1|_i X_j terms, which all commute within a segment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import CouplingModel, Lattice

MAX_QUBITS = 22


@dataclass
class QuantumState:
    num_qubits: int
    amplitudes: np.ndarray

    @classmethod
    def zero(cls, num_qubits: int) -> "QuantumState":
        if not 1 <= num_qubits <= MAX_QUBITS:
            raise ValueError(f"qubit count must be in [1, {MAX_QUBITS}]")
        amp = np.zeros(1 << num_qubits, dtype=np.complex128)
        amp[0] = 1.0
        return cls(num_qubits, amp)

    @classmethod
    def with_source(cls, num_qubits: int, source: int, a: complex, b: complex) -> "QuantumState":
        """|0...0> with the source qubit in a|0> + b|1>."""
        state = cls.zero(num_qubits)
        state.amplitudes[0] = a
        state.amplitudes[1 << source] = b
        return state

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def copy(self) -> "QuantumState":
        return QuantumState(self.num_qubits, self.amplitudes.copy())


def _bit(indices: np.ndarray, q: int) -> np.ndarray:
    return (indices >> q) & 1


def evolve_controlled_x(
    state: QuantumState,
    controls,
    targets,
    angles: dict[int, float],
    couplings: dict[tuple[int, int], float] | None = None,
) -> QuantumState:
    """Apply exp(-i theta_eff X_j) per target j, conditioned on the controls.

    ``angles[j]`` is the full rotation a target receives when every control is
    in |1>; a basis configuration with only part of the control set excited
    rotates by the coupling-weighted fraction (equal weights when
    ``couplings`` is omitted).  Controls and targets must be disjoint.
    """
    controls = list(controls)
    targets = list(targets)
    if set(controls) & set(targets):
        raise ValueError("controls and targets overlap")
    if not controls:
        raise ValueError("need at least one control")
    amp = state.amplitudes
    z = np.arange(len(amp), dtype=np.int64)
    for j in targets:
        theta = float(angles[j])
        if couplings is None:
            weights = sum(_bit(z, i) for i in controls) / float(len(controls))
        else:
            hs = np.array([couplings[(i, j)] for i in controls], dtype=float)
            total = hs.sum()
            weights = sum(h * _bit(z, i) for h, i in zip(hs, controls)) / total
        eff = theta * weights
        c = np.cos(eff)
        s = np.sin(eff)
        partner = amp[z ^ (1 << j)]
        state.amplitudes = c * amp - 1j * s * partner
        amp = state.amplitudes
    return state


def phase_fix(state: QuantumState, any_control: int, inverse: bool = False) -> QuantumState:
    """diag(1, i) on one control: cancels the -i a completed pi/2 rotation
    leaves on the all-ones branch."""
    z = np.arange(len(state.amplitudes), dtype=np.int64)
    mask = _bit(z, any_control).astype(bool)
    state.amplitudes[mask] *= -1j if inverse else 1j
    return state


def apply_hadamard(state: QuantumState, q: int) -> QuantumState:
    amp = state.amplitudes
    z = np.arange(len(amp), dtype=np.int64)
    partner = amp[z ^ (1 << q)]
    sign = 1.0 - 2.0 * _bit(z, q)
    state.amplitudes = (sign * amp + partner) / math.sqrt(2.0)
    return state


def evolve_diagonal_zz(
    state: QuantumState,
    couplings: dict[tuple[int, int], float],
    t: float,
    form: str = "zz",
) -> QuantumState:
    """Diagonal two-body evolution exp(-i t E(z)).

    form="zz": E = (1/2) sum J_ij Z_i Z_j; form="projector": E = sum J_ij
    b_i b_j (each |11> pair accumulates phase -J t).
    """
    z = np.arange(len(state.amplitudes), dtype=np.int64)
    energy = np.zeros(len(z))
    for (i, j), J in couplings.items():
        bi = _bit(z, i).astype(float)
        bj = _bit(z, j).astype(float)
        if form == "zz":
            energy += 0.5 * J * (1.0 - 2.0 * bi) * (1.0 - 2.0 * bj)
        elif form == "projector":
            energy += J * bi * bj
        else:
            raise ValueError("form must be 'zz' or 'projector'")
    state.amplitudes = state.amplitudes * np.exp(-1j * t * energy)
    return state


def ghz_fidelity(state: QuantumState, region, a: complex, b: complex) -> float:
    """|<GHZ(a,b)|psi>|^2 on the region, all other qubits in |0>."""
    region = list(region)
    ones = 0
    for q in region:
        ones |= 1 << q
    overlap = np.conj(a) * state.amplitudes[0] + np.conj(b) * state.amplitudes[ones]
    return float(abs(overlap) ** 2)


def ghz_leakage(state: QuantumState, region) -> float:
    """Probability weight outside the two GHZ basis components."""
    region = list(region)
    ones = 0
    for q in region:
        ones |= 1 << q
    keep = abs(state.amplitudes[0]) ** 2 + abs(state.amplitudes[ones]) ** 2
    return float(1.0 - keep)


# ---------------------------------------------------------------------------
# protocol replays


def _coupling_lookup(coords: np.ndarray, alpha: float, prefactor: float):
    def h(i: int, j: int) -> float:
        diff = coords[i] - coords[j]
        return prefactor * float(np.dot(diff, diff)) ** (-alpha / 2.0)

    return h


def _block_ops(block_coords: np.ndarray, alpha: float, prefactor: float, block_sites, source_local: int):
    """Gate-op list for one cascade run restricted to ``block_sites``.

    ops are ("cx", controls, targets, angles, couplings) per inter-event
    segment and ("fix", control) per completion, all on global qubit ids.
    """
    from .cascade import _schedule_from_coords

    sched = _schedule_from_coords(block_coords, alpha, prefactor, source_local)
    h = _coupling_lookup(block_coords, alpha, prefactor)
    ops = []
    controls = [source_local]
    pending = [k for k in range(len(block_sites)) if k != source_local]
    prev_t = 0.0
    for t_k, completed in sched.events:
        dt = t_k - prev_t
        prev_t = t_k
        angles = {}
        coup = {}
        for j in pending:
            rate = 0.0
            for i in controls:
                hij = h(i, j)
                coup[(block_sites[i], block_sites[j])] = hij
                rate += hij
            angles[block_sites[j]] = dt * rate
        ops.append(
            (
                "cx",
                [block_sites[i] for i in controls],
                [block_sites[j] for j in pending],
                angles,
                coup,
            )
        )
        ops.append(("fix", block_sites[source_local]))
        controls.append(completed)
        pending.remove(completed)
    return ops


def _apply_ops(state: QuantumState, ops, inverse: bool = False) -> QuantumState:
    if not inverse:
        for op in ops:
            if op[0] == "cx":
                _, controls, targets, angles, coup = op
                evolve_controlled_x(state, controls, targets, angles, coup)
            else:
                phase_fix(state, op[1])
    else:
        for op in reversed(ops):
            if op[0] == "cx":
                _, controls, targets, angles, coup = op
                neg = {j: -th for j, th in angles.items()}
                evolve_controlled_x(state, controls, targets, neg, coup)
            else:
                phase_fix(state, op[1], inverse=True)
    return state


def run_eldredge_protocol(
    lattice: Lattice, model: CouplingModel, source: int, a: complex, b: complex
) -> tuple[QuantumState, float]:
    """Replay the greedy cascade on the full lattice and score the GHZ overlap."""
    n = lattice.num_sites
    if not 2 <= n <= 16:
        raise ValueError("protocol verification supports 2..16 qubits")
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > 1e-9:
        raise ValueError("|a|^2 + |b|^2 must be 1")
    coords = lattice.coordinates().astype(float)
    ops = _block_ops(coords, model.alpha, model.prefactor, list(range(n)), source)
    state = QuantumState.with_source(n, source, a, b)
    _apply_ops(state, ops)
    return state, ghz_fidelity(state, range(n), a, b)


def run_tran_step(
    lattice: Lattice,
    model: CouplingModel,
    blocks,
    a: complex,
    b: complex,
) -> tuple[QuantumState, float]:
    """One merge step: cascades inside every block, a controlled-phase merge,
    then uncompute / Hadamard / recompute on the target blocks.

    ``blocks`` lists each block's site indices; the first block holds the
    encoded state on its first site, and every other block's first site is its
    designated merge qubit.  The merge evolution uses uniform couplings at the
    worst-case block-pair distance (m r1 sqrt(d))**(-alpha) for the duration
    that makes every block-pair phase reach pi exactly.
    """
    n = lattice.num_sites
    if n > 20:
        raise ValueError("merge-step verification supports at most 20 qubits")
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > 1e-9:
        raise ValueError("|a|^2 + |b|^2 must be 1")
    blocks = [list(bl) for bl in blocks]
    sizes = {len(bl) for bl in blocks}
    if len(sizes) != 1:
        raise ValueError("all blocks must have the same size")
    V = sizes.pop()
    d = lattice.d
    r1 = round(V ** (1.0 / d))
    if r1**d != V:
        raise ValueError("blocks must be hypercubes")
    m = round(len(blocks) ** (1.0 / d))
    if m**d != len(blocks):
        raise ValueError("need m^d blocks")

    coords = lattice.coordinates().astype(float)
    alpha, pref = model.alpha, model.prefactor

    block_ops = []
    for bl in blocks:
        block_ops.append(_block_ops(coords[bl], alpha, pref, bl, source_local=0))

    c_sites = [bl[0] for bl in blocks]
    state = QuantumState.with_source(n, c_sites[0], a, b)
    for cj in c_sites[1:]:
        apply_hadamard(state, cj)

    # Step 1: grow a GHZ branch pair inside every block
    for ops in block_ops:
        _apply_ops(state, ops)

    # Step 2: uniform controlled-phase merge, pi per block pair
    h_merge = pref / (m * r1 * math.sqrt(d)) ** alpha
    t2 = math.pi * d ** (alpha / 2.0) * (m * r1) ** alpha / (float(r1) ** (2 * d) * pref)
    merge_couplings = {
        (i, j): h_merge for bl in blocks[1:] for i in blocks[0] for j in bl
    }
    evolve_diagonal_zz(state, merge_couplings, t2, form="projector")

    # Steps 3-5: uncompute target blocks, Hadamard the merge qubits, recompute
    for ops in block_ops[1:]:
        _apply_ops(state, ops, inverse=True)
    for cj in c_sites[1:]:
        apply_hadamard(state, cj)
    for ops in block_ops[1:]:
        _apply_ops(state, ops)

    region = [q for bl in blocks for q in bl]
    return state, ghz_fidelity(state, region, a, b)
