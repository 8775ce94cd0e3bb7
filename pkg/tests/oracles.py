"""Independent reference implementations used only by the tests.

Nothing here imports the scheduler or simulator internals: the dense
integrator re-derives cascade timings by brute-force grid scanning, and the
matrix oracle builds gate unitaries by explicit Kronecker products plus an
eigendecomposition-based matrix exponential.
"""

from __future__ import annotations

import math

import numpy as np

HALF_PI = math.pi / 2.0


# ---------------------------------------------------------------------------
# dense fixed-step integrator (cascade timing reference)


def integrate_schedule(coords, alpha, prefactor, source, dt=1e-5, chunk=65536):
    """Brute-force the cascade on a fixed time grid.

    Between completions every pending site's angle grows linearly; we scan the
    grid in vectorized chunks and record a completion at the first grid point
    where a site reaches pi/2 (ties: lowest site index).  Accuracy is one grid
    step per event.

    Returns (total_time, events) with events = [(time, site), ...].
    """
    coords = np.asarray(coords, dtype=float)
    n = len(coords)
    pending = [j for j in range(n) if j != source]
    controls = [source]
    accrued = {j: 0.0 for j in pending}
    events = []
    step = 0

    def pair_rate(i, j):
        diff = coords[i] - coords[j]
        return prefactor * float(np.dot(diff, diff)) ** (-alpha / 2.0)

    while pending:
        rates = np.array(
            [sum(pair_rate(c, j) for c in controls) for j in pending]
        )
        acc = np.array([accrued[j] for j in pending])
        done = None
        while done is None:
            ks = np.arange(1, chunk + 1)
            # angles at the next `chunk` grid points, one row per pending site
            grid = acc[:, None] + rates[:, None] * (ks[None, :] * dt)
            hit = grid >= HALF_PI
            if hit.any():
                first_k = np.where(hit.any(axis=0))[0][0]
                winners = np.where(hit[:, first_k])[0]
                done = min(pending[w] for w in winners)
                step += int(first_k) + 1
                for idx, j in enumerate(pending):
                    accrued[j] = acc[idx] + rates[idx] * (first_k + 1) * dt
            else:
                step += chunk
                acc = acc + rates * (chunk * dt)
                for idx, j in enumerate(pending):
                    accrued[j] = acc[idx]
        events.append((step * dt, done))
        controls.append(done)
        pending.remove(done)
        accrued.pop(done)
    return step * dt, events


# ---------------------------------------------------------------------------
# dense matrix oracle (N <= 4 qubits)

_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_P1 = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)


def _embed(ops: dict[int, np.ndarray], n: int) -> np.ndarray:
    """Kronecker product with single-qubit ``ops`` at the given positions.

    Qubit 0 is the least significant bit, so it sits rightmost in the product.
    """
    out = np.array([[1.0 + 0.0j]])
    for q in range(n - 1, -1, -1):
        out = np.kron(out, ops.get(q, np.eye(2, dtype=complex)))
    return out


def controlled_x_hamiltonian(n, controls, targets, coupling_fn) -> np.ndarray:
    """H = sum over (control i, target j) of h(i,j) |1><1|_i X_j."""
    dim = 1 << n
    H = np.zeros((dim, dim), dtype=complex)
    for i in controls:
        for j in targets:
            H += coupling_fn(i, j) * _embed({i: _P1, j: _X}, n)
    return H


def expm_apply(H: np.ndarray, t: float, psi: np.ndarray) -> np.ndarray:
    """exp(-i H t) psi via eigendecomposition (H Hermitian)."""
    vals, vecs = np.linalg.eigh(H)
    return vecs @ (np.exp(-1j * vals * t) * (vecs.conj().T @ psi))


def phase_fix_matrix(n, control, inverse=False) -> np.ndarray:
    diag = np.ones(1 << n, dtype=complex)
    phase = -1j if inverse else 1j
    for z in range(1 << n):
        if (z >> control) & 1:
            diag[z] = phase
    return np.diag(diag)


def cascade_protocol_matrix(coords, alpha, prefactor, source, events) -> np.ndarray:
    """Full protocol unitary from the event timeline, as one dense matrix.

    ``events`` is the event-driven schedule [(time, site), ...]; each
    inter-event segment evolves the control/pending Hamiltonian for its
    duration, followed by the phase correction on the source.
    """
    coords = np.asarray(coords, dtype=float)
    n = len(coords)

    def h(i, j):
        diff = coords[i] - coords[j]
        return prefactor * float(np.dot(diff, diff)) ** (-alpha / 2.0)

    U = np.eye(1 << n, dtype=complex)
    controls = [source]
    pending = [j for j in range(n) if j != source]
    prev_t = 0.0
    for t_k, site in events:
        H = controlled_x_hamiltonian(n, controls, pending, h)
        vals, vecs = np.linalg.eigh(H)
        seg = vecs @ np.diag(np.exp(-1j * vals * (t_k - prev_t))) @ vecs.conj().T
        U = phase_fix_matrix(n, source) @ seg @ U
        prev_t = t_k
        controls.append(site)
        pending.remove(site)
    return U
