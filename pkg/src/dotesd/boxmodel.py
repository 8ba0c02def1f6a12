"""Exact single-qubit decoherence channel for the uniform-coupling bath.

An electron spin coupled uniformly (A_k = alpha = A/N) to N spin-3/2 nuclei
in the fully mixed state conserves the total nuclear spin J, so the dynamics
splits into two-level blocks {|up, J, m>, |down, J, m+1>}. The channel is
phase covariant and unital; it is fully described by a flip probability q(t)
and a complex coherence factor phi(t):

    q(t)   = sum_J w(J) sum_{m=-J}^{J-1} |b_Jm(t)|^2
    phi(t) = sum_J w(J) sum_{m=-J}^{J}   a_Jm(t) conj(d_Jm(t))

where a, b are the stay-up and transfer amplitudes of the block containing
|up, J, m> and d is the stay-down amplitude of |down, J, m>. Weights
w(J) = n(N, J)/4^N count irrep multiplicities per (J, m) basis state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft

from .material import CONSTANTS, GAAS, MaterialSpec, PhysicalConstants, electron_larmor_uev

# Above this bath size the J-recursion for multiplicities is replaced by the
# equivalent characteristic-function route (see _weights_fft).
_RECURSION_LIMIT = 4096


@dataclass
class SectorTable:
    """Total-spin sectors of N spin-3/2 nuclei.

    weights[i] is the probability n(N, J)/4^N carried by each (J, m) basis
    state of the sector two_j[i]; sum over sectors of weight*(2J+1) is 1.
    """

    n_spins: int
    two_j: np.ndarray
    weights: np.ndarray

    def normalization(self) -> float:
        return float(math.fsum(self.weights * (self.two_j + 1)))


def _weights_recursion(n_spins: int) -> np.ndarray:
    """Normalized multiplicities w(J) = n(N, J)/4^N indexed by twoJ.

    Standard angular-momentum addition: n(N, J) = sum over the J' with
    J in J' x 3/2, carried directly on w = n/4^N (one division by 4 per
    added spin) so no overflow occurs.
    """
    w = np.zeros(4)
    w[3] = 0.25
    for n in range(2, n_spins + 1):
        size = 3 * n + 1
        pad = np.zeros(size + 6)
        pad[3 : 3 + len(w)] = w
        nxt = (pad[0:size] + pad[2 : size + 2] + pad[4 : size + 4] + pad[6 : size + 6]) / 4.0
        # Triangle rule J >= |J' - 3/2| forbids two of the shifted gathers:
        # twoJ=0 from twoJ'=1 and twoJ=1 from twoJ'=0.
        if n % 2 == 0:
            nxt[0] -= pad[4] / 4.0
        else:
            nxt[1] -= pad[3] / 4.0
        w = nxt
    return w


def _weights_fft(n_spins: int) -> np.ndarray:
    """Same w(J), via the distribution of the total z projection.

    n(N, J)/4^N = P(M = J) - P(M = J + 1) where M is the sum of N iid
    projections uniform on {-3/2,...,3/2}. P is computed as the N-th
    convolution power of the flat 4-point kernel through its characteristic
    function, in extended precision so the differences stay accurate.
    """
    size = 3 * n_spins + 1
    nfft = scipy.fft.next_fast_len(size, real=True)
    kernel = np.zeros(nfft, dtype=np.longdouble)
    kernel[:4] = 0.25
    chf = scipy.fft.rfft(kernel)
    p = scipy.fft.irfft(chf**n_spins, n=nfft)[:size]
    two_j = np.arange(3 * n_spins % 2, size, 2)
    j_hi = (two_j + 3 * n_spins) // 2
    diff = p[j_hi] - np.concatenate((p[j_hi[:-1] + 1], [0.0]))
    # The transform carries a flat noise floor that would swamp the tails,
    # where true weights are double-exponentially small but the (2J+1) factor
    # is huge. Calibrate the floor on the far tail (beyond 12 standard
    # deviations of the projection distribution nothing physical survives)
    # and zero everything within a safe multiple of it.
    sigma_two_j = math.sqrt(5.0 * n_spins)
    pure_noise = two_j > 12.0 * sigma_two_j
    if pure_noise.any():
        floor = 8.0 * np.abs(diff[pure_noise]).max()
        diff[np.abs(diff) < floor] = 0.0
    w = np.zeros(size, dtype=np.longdouble)
    w[two_j] = np.maximum(diff, 0.0)
    return w.astype(np.float64)


def sector_weights(n_spins: int) -> SectorTable:
    """Sector decomposition of N spin-3/2 nuclei, zero-weight sectors dropped."""
    if not 1 <= n_spins <= 10**7:
        raise ValueError("n_spins must be in [1, 1e7]")
    if n_spins <= _RECURSION_LIMIT:
        w = _weights_recursion(n_spins)
    else:
        w = _weights_fft(n_spins)
    two_j = np.arange(3 * n_spins % 2, 3 * n_spins + 1, 2)
    keep = w[two_j] > 0.0
    return SectorTable(n_spins=n_spins, two_j=two_j[keep], weights=w[two_j][keep])


@dataclass(frozen=True)
class BlockParams:
    """One conserved block of the box Hamiltonian.

    Basis {|up, J, m>, |down, J, m+1>}; e_down and v are None for the
    one-dimensional block at m = J.
    """

    e_up: float
    e_down: float | None = None
    v: float | None = None

    @property
    def is_one_dimensional(self) -> bool:
        return self.e_down is None


def block_params(
    two_j: int,
    two_m: int,
    b_field_t: float,
    alpha_uev: float,
    material: MaterialSpec = GAAS,
    constants: PhysicalConstants = CONSTANTS,
) -> BlockParams:
    """Block energies and flip-flop element for sector (J, m)."""
    if abs(two_m) > two_j:
        raise ValueError(f"twoM={two_m} outside [-{two_j}, {two_j}]")
    if (two_j - two_m) % 2 != 0:
        raise ValueError("twoM must have the parity of twoJ")
    omega_e = electron_larmor_uev(b_field_t, material, constants)
    j = two_j / 2.0
    m = two_m / 2.0
    e_up = omega_e / 2.0 + alpha_uev * m / 2.0
    if two_m == two_j:
        return BlockParams(e_up=e_up)
    e_down = -omega_e / 2.0 - alpha_uev * (m + 1.0) / 2.0
    v = (alpha_uev / 2.0) * math.sqrt(j * (j + 1.0) - m * (m + 1.0))
    return BlockParams(e_up=e_up, e_down=e_down, v=v)


def block_amplitudes(
    params: BlockParams, t_ns: float, constants: PhysicalConstants = CONSTANTS
) -> tuple[complex, complex]:
    """Stay-up and transfer amplitudes (a, b) of a block at time t.

    Closed Rabi form: with Ebar = (E_up + E_down)/2, Delta = (E_up - E_down)/2
    and Omega = sqrt(Delta^2 + V^2)/hbar,

        a = exp(-i Ebar t/hbar) (cos Omega t - i Delta/sqrt(...) sin Omega t)
        b = -i V/sqrt(...) exp(-i Ebar t/hbar) sin Omega t
    """
    hbar = constants.hbar_uev_ns
    if params.is_one_dimensional:
        return complex(np.exp(-1j * params.e_up * t_ns / hbar)), 0.0 + 0.0j
    ebar = 0.5 * (params.e_up + params.e_down)
    delta = 0.5 * (params.e_up - params.e_down)
    s = math.hypot(delta, params.v)
    phase = np.exp(-1j * ebar * t_ns / hbar)
    if s == 0.0:
        return complex(phase), 0.0 + 0.0j
    omega_t = s * t_ns / hbar
    a = phase * (math.cos(omega_t) - 1j * (delta / s) * math.sin(omega_t))
    b = -1j * (params.v / s) * phase * math.sin(omega_t)
    return complex(a), complex(b)


@dataclass(frozen=True)
class ChannelSnapshot:
    """Channel parameters at one time: flip probability and coherence factor."""

    q: float
    phi: complex

    def validate(self, tol: float = 1e-10) -> None:
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"flip probability {self.q} outside [0, 1]")
        if abs(self.phi) > 1.0 - self.q + tol:
            raise ValueError(
                f"complete positivity violated: |phi|={abs(self.phi)} > 1-q={1 - self.q}"
            )


IDENTITY_SNAPSHOT = ChannelSnapshot(q=0.0, phi=1.0 + 0.0j)


@dataclass
class ChannelTrace:
    times: np.ndarray
    q: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        if self.times[0] != 0.0 or np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing from t=0")

    def snapshot(self, i: int) -> ChannelSnapshot:
        return ChannelSnapshot(q=float(self.q[i]), phi=complex(self.phi[i]))


class BoxChannel:
    """Precomputed block data for one dot; evaluates (q, phi) on any times.

    All per-(J, m) quantities are laid out in ascending (J, m) order once at
    construction; every evaluation reduces the per-term contributions in that
    fixed order with extended-precision accumulation, so results do not depend
    on chunking or worker count.
    """

    def __init__(
        self,
        n_spins: int,
        a_total_uev: float,
        b_field_t: float,
        material: MaterialSpec = GAAS,
        constants: PhysicalConstants = CONSTANTS,
    ):
        self.n_spins = n_spins
        self.a_total_uev = a_total_uev
        self.b_field_t = b_field_t
        self.constants = constants
        alpha = a_total_uev / n_spins
        hbar = constants.hbar_uev_ns
        omega_e = electron_larmor_uev(b_field_t, material, constants)
        table = sector_weights(n_spins)

        # Flattened 2-dim blocks, ascending (J, block m = -J .. J-1).
        two_j_rep = np.repeat(table.two_j, table.two_j)
        w_rep = np.repeat(table.weights, table.two_j)
        offs = np.concatenate([np.arange(tj) for tj in table.two_j]) if len(table.two_j) else np.array([], dtype=np.intp)
        two_mb = -two_j_rep + 2 * offs
        j = two_j_rep / 2.0
        mb = two_mb / 2.0
        delta = omega_e / 2.0 + alpha * (2.0 * mb + 1.0) / 4.0
        v = (alpha / 2.0) * np.sqrt(j * (j + 1.0) - mb * (mb + 1.0))
        s = np.hypot(delta, v)
        self._omega = s / hbar
        self._dtilde = delta / s
        self._wr = w_rep * (v / s) ** 2   # weighted q amplitude per block

        # phi terms in ascending (J, m) order, m = -J .. J. Interior terms are
        # products of consecutive block amplitudes u_m u_{m-1}; the edge terms
        # carry explicit phases (the block center energy is -alpha/4 for every
        # 2-dim block, so interior phases cancel).
        starts = np.concatenate(([0], np.cumsum(table.two_j)[:-1])).astype(np.intp)
        n_terms = int(np.sum(table.two_j + 1))
        self._n_terms = n_terms
        bottom_pos, bottom_blk, bottom_rate = [], [], []
        top_pos, top_blk, top_rate = [], [], []
        zero_pos = []
        int_pos, int_hi, int_lo = [], [], []
        w_term = np.empty(n_terms)
        pos = 0
        for k, tj in enumerate(table.two_j):
            w_term[pos : pos + tj + 1] = table.weights[k]
            if tj == 0:
                zero_pos.append(pos)
                pos += 1
                continue
            b0 = int(starts[k])
            jval = tj / 2.0
            bottom_pos.append(pos)
            bottom_blk.append(b0)
            bottom_rate.append((-omega_e / 2.0 + alpha * jval / 2.0 + alpha / 4.0) / hbar)
            for i in range(1, tj):
                int_pos.append(pos + i)
                int_hi.append(b0 + i)
                int_lo.append(b0 + i - 1)
            top_pos.append(pos + tj)
            top_blk.append(b0 + tj - 1)
            top_rate.append((omega_e / 2.0 + alpha * jval / 2.0 + alpha / 4.0) / hbar)
            pos += tj + 1
        self._w_term = w_term
        self._bottom = (np.array(bottom_pos, dtype=np.intp), np.array(bottom_blk, dtype=np.intp), np.array(bottom_rate))
        self._top = (np.array(top_pos, dtype=np.intp), np.array(top_blk, dtype=np.intp), np.array(top_rate))
        self._zero_pos = np.array(zero_pos, dtype=np.intp)
        self._interior = (np.array(int_pos, dtype=np.intp), np.array(int_hi, dtype=np.intp), np.array(int_lo, dtype=np.intp))
        self._omega_e_rate = omega_e / hbar

    def evaluate(self, times) -> tuple[np.ndarray, np.ndarray]:
        """(q, phi) arrays on the given times (ns)."""
        times = np.atleast_1d(np.asarray(times, dtype=np.float64))
        q = np.empty(len(times))
        phi = np.empty(len(times), dtype=np.complex128)
        chunk = max(8, int(4e6 / max(1, len(self._omega))))
        for i0 in range(0, len(times), chunk):
            tc = times[i0 : i0 + chunk]
            ph = np.outer(self._omega, tc)
            cs = np.cos(ph)
            sn = np.sin(ph)
            np.multiply(sn, sn, out=ph)
            q[i0 : i0 + chunk] = np.sum(
                self._wr[:, None] * ph, axis=0, dtype=np.longdouble
            )
            u = cs - 1j * self._dtilde[:, None] * sn
            terms = np.empty((self._n_terms, len(tc)), dtype=np.complex128)
            bpos, bblk, brate = self._bottom
            terms[bpos] = u[bblk] * np.exp(1j * np.outer(brate, tc))
            tpos, tblk, trate = self._top
            terms[tpos] = u[tblk] * np.exp(-1j * np.outer(trate, tc))
            ipos, ihi, ilo = self._interior
            terms[ipos] = u[ihi] * u[ilo]
            if len(self._zero_pos):
                terms[self._zero_pos] = np.exp(-1j * self._omega_e_rate * tc)[None, :]
            terms *= self._w_term[:, None]
            phi[i0 : i0 + chunk] = np.sum(terms, axis=0, dtype=np.clongdouble)
        return q, phi


def compute_channel(
    n_spins: int,
    a_total_uev: float,
    b_field_t: float,
    times,
    material: MaterialSpec = GAAS,
    constants: PhysicalConstants = CONSTANTS,
) -> ChannelTrace:
    """Exact box-model channel trace on a time grid starting at t=0."""
    times = np.asarray(times, dtype=np.float64)
    channel = BoxChannel(n_spins, a_total_uev, b_field_t, material, constants)
    q, phi = channel.evaluate(times)
    return ChannelTrace(times=times, q=q, phi=phi)


def apply_snapshot(snapshot: ChannelSnapshot, rho: np.ndarray) -> np.ndarray:
    """Apply the phase-covariant unital channel to a single-qubit state.

    Populations mix with weight q, coherences pick up phi. Written in the
    difference form rho00 + q (rho11 - rho00) so the maximally mixed state is
    a fixed point exactly, not just to rounding.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (2, 2):
        raise ValueError("expected a 2x2 density matrix")
    if abs(rho[0, 1] - np.conj(rho[1, 0])) > 1e-10 or abs(rho.trace() - 1.0) > 1e-10:
        raise ValueError("input is not a unit-trace Hermitian matrix")
    q, phi = snapshot.q, snapshot.phi
    out = np.empty((2, 2), dtype=np.complex128)
    out[0, 0] = rho[0, 0] + q * (rho[1, 1] - rho[0, 0])
    out[1, 1] = rho[1, 1] + q * (rho[0, 0] - rho[1, 1])
    out[0, 1] = phi * rho[0, 1]
    out[1, 0] = np.conj(phi) * rho[1, 0]
    return out
