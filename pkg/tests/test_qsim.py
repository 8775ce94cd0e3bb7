import math

import numpy as np
import pytest

import oracles
from powerlawst.cascade import run_schedule
from powerlawst.echo import walsh_sequence
from powerlawst.lattice import CouplingModel, hypercube, tile_and_color
from powerlawst.qsim import (
    QuantumState,
    apply_hadamard,
    evolve_controlled_x,
    evolve_diagonal_zz,
    ghz_fidelity,
    ghz_leakage,
    phase_fix,
    run_eldredge_protocol,
    run_tran_step,
)


def random_state(n, seed):
    rng = np.random.default_rng(seed)
    amp = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    amp /= np.linalg.norm(amp)
    return QuantumState(n, amp.astype(np.complex128))


def test_state_construction_and_guards():
    st = QuantumState.zero(3)
    assert st.amplitudes[0] == 1.0
    assert st.norm() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        QuantumState.zero(23)
    with pytest.raises(ValueError):
        QuantumState.zero(0)


def test_controlled_x_norm_and_linearity():
    psi = random_state(4, 1)
    phi = random_state(4, 2)
    angles = {2: 0.7, 3: 0.3}
    combo = QuantumState(4, 0.6 * psi.amplitudes + 0.8j * phi.amplitudes)
    out_psi = evolve_controlled_x(psi.copy(), [0, 1], [2, 3], angles)
    out_phi = evolve_controlled_x(phi.copy(), [0, 1], [2, 3], angles)
    out_combo = evolve_controlled_x(combo, [0, 1], [2, 3], angles)
    assert out_psi.norm() == pytest.approx(1.0, abs=1e-12)
    recombined = 0.6 * out_psi.amplitudes + 0.8j * out_phi.amplitudes
    assert np.allclose(out_combo.amplitudes, recombined, atol=1e-12)


def test_controlled_x_guards():
    psi = random_state(3, 3)
    with pytest.raises(ValueError):
        evolve_controlled_x(psi, [0, 1], [1, 2], {1: 0.1, 2: 0.1})
    with pytest.raises(ValueError):
        evolve_controlled_x(psi, [], [1], {1: 0.1})


def test_controlled_x_inverse_restores_state():
    psi = random_state(4, 4)
    before = psi.amplitudes.copy()
    coup = {(0, 2): 0.5, (1, 2): 1.5, (0, 3): 1.0, (1, 3): 0.25}
    angles = {2: 0.9, 3: 0.4}
    evolve_controlled_x(psi, [0, 1], [2, 3], angles, coup)
    neg = {j: -th for j, th in angles.items()}
    evolve_controlled_x(psi, [0, 1], [2, 3], neg, coup)
    assert np.allclose(psi.amplitudes, before, atol=1e-13)


def test_controlled_x_matches_dense_oracle():
    n = 4
    controls, targets = [0, 1], [2, 3]
    h = {(0, 2): 0.9, (1, 2): 0.4, (0, 3): 0.7, (1, 3): 1.3}
    t = 0.37
    H = oracles.controlled_x_hamiltonian(
        n, controls, targets, lambda i, j: h[(i, j)]
    )
    psi = random_state(n, 5)
    expected = oracles.expm_apply(H, t, psi.amplitudes)
    angles = {j: t * sum(h[(i, j)] for i in controls) for j in targets}
    out = evolve_controlled_x(psi, controls, targets, angles, h)
    assert np.allclose(out.amplitudes, expected, atol=1e-12)


def test_phase_fix_squares_to_z():
    psi = random_state(2, 6)
    expected = psi.amplitudes.copy()
    z = np.arange(4)
    expected[(z >> 0) & 1 == 1] *= -1.0  # diag(1,i)^2 = diag(1,-1)
    phase_fix(phase_fix(psi, 0), 0)
    assert np.allclose(psi.amplitudes, expected, atol=1e-15)
    phase_fix(psi, 0, inverse=True)
    phase_fix(psi, 0, inverse=True)
    z_expected = expected.copy()
    z_expected[(z >> 0) & 1 == 1] *= -1.0
    assert np.allclose(psi.amplitudes, z_expected, atol=1e-15)


def test_hadamard_involution():
    psi = random_state(3, 7)
    before = psi.amplitudes.copy()
    apply_hadamard(apply_hadamard(psi, 1), 1)
    assert np.allclose(psi.amplitudes, before, atol=1e-14)


def test_diagonal_zz_forms():
    st = QuantumState(2, np.full(4, 0.5, dtype=np.complex128))
    zz = evolve_diagonal_zz(st.copy(), {(0, 1): 1.0}, math.pi / 2.0, form="zz")
    # E = (1/2) Z Z: aligned pairs pick up -pi/4, anti-aligned +pi/4
    phase = np.exp(-1j * math.pi / 4.0)
    assert np.allclose(
        zz.amplitudes, 0.5 * np.array([phase, phase.conj(), phase.conj(), phase]), atol=1e-14
    )
    proj = evolve_diagonal_zz(st.copy(), {(0, 1): 1.0}, math.pi / 2.0, form="projector")
    assert np.allclose(proj.amplitudes, 0.5 * np.array([1, 1, 1, -1j]), atol=1e-14)
    with pytest.raises(ValueError):
        evolve_diagonal_zz(st.copy(), {(0, 1): 1.0}, 1.0, form="bogus")


def test_ghz_fidelity_and_leakage():
    a, b = 0.6, 0.8
    amp = np.zeros(8, dtype=np.complex128)
    amp[0] = a
    amp[7] = b
    st = QuantumState(3, amp)
    assert ghz_fidelity(st, [0, 1, 2], a, b) == pytest.approx(1.0, rel=1e-15)
    assert ghz_leakage(st, [0, 1, 2]) == pytest.approx(0.0, abs=1e-15)
    assert ghz_fidelity(st, [0, 1, 2], b, -a) == pytest.approx(0.0, abs=1e-15)


def test_protocol_matches_dense_matrix_oracle():
    lat = hypercube(4, 1)
    model = CouplingModel(alpha=3.0)
    events = run_schedule(lat, model, source=0).events
    U = oracles.cascade_protocol_matrix(
        lat.coordinates().astype(float), 3.0, 1.0, 0, events
    )
    a, b = 0.6, 0.8j
    psi0 = np.zeros(16, dtype=np.complex128)
    psi0[0], psi0[1] = a, b
    expected = U @ psi0
    state, fid = run_eldredge_protocol(lat, model, 0, a, b)
    assert np.allclose(state.amplitudes, expected, atol=1e-9)
    assert fid >= 1.0 - 1e-9


def test_eldredge_protocol_fidelity_samples():
    rng = np.random.default_rng(11)
    for lat in (hypercube(6, 1), hypercube(3, 2)):
        a = rng.normal() + 1j * rng.normal()
        b = rng.normal() + 1j * rng.normal()
        norm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
        a, b = a / norm, b / norm
        state, fid = run_eldredge_protocol(lat, CouplingModel(alpha=3.0), 0, a, b)
        assert fid >= 1.0 - 1e-9
        assert state.norm() == pytest.approx(1.0, abs=1e-12)


def test_eldredge_protocol_guards():
    with pytest.raises(ValueError):
        run_eldredge_protocol(hypercube(5, 2), CouplingModel(alpha=3.0), 0, 0.6, 0.8)
    with pytest.raises(ValueError):
        run_eldredge_protocol(hypercube(2, 1), CouplingModel(alpha=3.0), 0, 0.6, 0.9)


def test_tran_step_fidelity_variants():
    model = CouplingModel(alpha=3.0)
    a, b = 1.0 / math.sqrt(3.0), math.sqrt(2.0 / 3.0)
    _, fid = run_tran_step(hypercube(4, 1), model, [[0, 1], [2, 3]], a, b)
    assert fid >= 1.0 - 1e-9
    _, fid3 = run_tran_step(
        hypercube(6, 1), model, [[0, 1], [2, 3], [4, 5]], a, b
    )
    assert fid3 >= 1.0 - 1e-9


def test_tran_step_guards():
    model = CouplingModel(alpha=3.0)
    with pytest.raises(ValueError):
        run_tran_step(hypercube(6, 1), model, [[0, 1], [2, 3, 4]], 0.6, 0.8)
    with pytest.raises(ValueError):
        # two sites is not a square block in d = 2
        run_tran_step(hypercube(2, 2), model, [[0, 1], [2, 3]], 0.6, 0.8)
    with pytest.raises(ValueError):
        run_tran_step(hypercube(4, 1), model, [[0, 1], [2, 3]], 0.6, 0.9)


def test_echo_replay_matches_accumulated_weights():
    # 10-qubit line, 5 blocks of 2, alternating colors: per-segment signed
    # evolution must equal one evolution with the accumulated (echoed) weights
    lat = hypercube(10, 1)
    model = CouplingModel(alpha=3.0)
    tiling = tile_and_color(lat, 2, 2)
    seq = walsh_sequence(2, 0.75)
    site_color = {}
    for b_idx, bl in enumerate(tiling.blocks):
        for s in bl:
            site_color[s] = tiling.color_of_block[b_idx]
    coords = lat.coordinates().astype(float)

    def h(i, j):
        diff = coords[i] - coords[j]
        return float(np.dot(diff, diff)) ** (-model.alpha / 2.0)

    pairs = [(i, j) for i in range(10) for j in range(i + 1, 10)]
    replay = random_state(10, 13)
    dt = 0.75 / seq.n_segments
    for k in range(seq.n_segments):
        seg = {
            (i, j): seq.signs[site_color[i], k] * seq.signs[site_color[j], k] * h(i, j)
            for (i, j) in pairs
        }
        evolve_diagonal_zz(replay, seg, dt, form="zz")
    direct = random_state(10, 13)
    accumulated = {
        (i, j): h(i, j)
        for (i, j) in pairs
        if site_color[i] == site_color[j]
    }
    evolve_diagonal_zz(direct, accumulated, 0.75, form="zz")
    assert np.allclose(replay.amplitudes, direct.amplitudes, atol=1e-10)
