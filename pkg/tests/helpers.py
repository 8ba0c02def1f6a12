"""Brute-force oracles shared by the test modules.

Everything here evolves the full 2 * 4^N dimensional electron-plus-bath
system directly (dense eigendecomposition, fully mixed bath, partial trace)
and stays deliberately independent of the sector-decomposition code it
checks.
"""

import numpy as np

HBAR = 0.6582119569
MU_B = 57.8838180
G_FACTOR = -0.44

_M32 = np.array([1.5, 0.5, -0.5, -1.5])
_IZ = np.diag(_M32)
_IP = np.zeros((4, 4))
for _i in range(1, 4):
    _IP[_i - 1, _i] = np.sqrt(3.75 - _M32[_i] * (_M32[_i] + 1.0))
_IM = _IP.T.copy()


def _op_at(op: np.ndarray, site: int, n_sites: int) -> np.ndarray:
    out = np.array([[1.0]])
    for j in range(n_sites):
        out = np.kron(out, op if j == site else np.eye(4))
    return out


def dense_channel(couplings, b_field_t, times, flipflop=True):
    """Exact (q, phi) of the full unitary evolution with a fully mixed bath.

    couplings: per-nucleus A_k in ueV (arbitrary, not necessarily uniform).
    """
    couplings = np.asarray(couplings, dtype=float)
    n = len(couplings)
    dim = 4**n
    h_zz = sum(a * _op_at(_IZ, k, n) for k, a in enumerate(couplings))
    h_flip = sum(a * _op_at(_IM, k, n) for k, a in enumerate(couplings))
    omega_e = -G_FACTOR * MU_B * b_field_t
    h_up = (omega_e / 2.0) * np.eye(dim) + 0.5 * h_zz
    h_dn = (-omega_e / 2.0) * np.eye(dim) - 0.5 * h_zz
    h_ud = 0.5 * h_flip if flipflop else np.zeros((dim, dim))
    ham = np.block([[h_up, h_ud], [h_ud.conj().T, h_dn]])
    lam, vec = np.linalg.eigh(ham)
    v_up, v_dn = vec[:dim], vec[dim:]

    # q(t) = Tr[U_du U_du^dag]/dim and phi(t) = Tr[U_uu U_dd^dag]/dim reduce
    # to double sums over eigenpairs weighted by e^{-i(l_m - l_n)t}.
    g_up = v_up.conj().T @ v_up
    g_dn = v_dn.conj().T @ v_dn
    x_ud = v_up.conj().T @ v_dn
    m_q = g_up * g_dn.conj()
    m_phi = np.abs(x_ud) ** 2

    qs, phis = [], []
    for t in np.asarray(times, dtype=float):
        z = np.exp(1j * lam * t / HBAR)
        qs.append(np.real(np.conj(z) @ (m_q @ z)) / dim)
        phis.append((np.conj(z) @ (m_phi @ z)) / dim)
    return np.array(qs), np.array(phis)


def multiplicity_by_diagonalization(n_spins: int) -> dict[int, int]:
    """Irrep multiplicities n(N, J) from the dense spectrum of total J^2."""
    n = n_spins
    jx = np.zeros((4**n, 4**n), dtype=complex)
    jy = np.zeros_like(jx)
    jz = np.zeros_like(jx)
    for k in range(n):
        ip = _op_at(_IP, k, n)
        im = _op_at(_IM, k, n)
        jx += 0.5 * (ip + im)
        jy += -0.5j * (ip - im)
        jz += _op_at(_IZ, k, n)
    j_squared = jx @ jx + jy @ jy + jz @ jz
    eigs = np.linalg.eigvalsh(j_squared)
    counts: dict[int, int] = {}
    for e in eigs:
        two_j = int(round(np.sqrt(4.0 * e + 1.0) - 1.0))
        counts[two_j] = counts.get(two_j, 0) + 1
    # each irrep J contributes 2J+1 states
    return {tj: c // (tj + 1) for tj, c in counts.items()}
