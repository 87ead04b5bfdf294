"""Brute-force truncated-Fock reference for the Gaussian/Wick pipeline.

Everything here works directly with Fock amplitudes of the cascaded source:
four truncated TMSV ladders, idler swaps, beam splitters applied per
photon-number sector via the matrix exponential of the generator, Kraus loss,
and explicit detection kernels.  Independent of the covariance/K-function
machinery by construction; agreement between the two is the package's core
correctness argument.

Mode bookkeeping: TMSV ladder indices (n, m, k, l) populate modes
(1,4) = n, (2,3) = m, (5,8) = k, (6,7) = l before the splitters mix
(3,5) and (4,6).  Metrics factor into two independent "chains":
chain A covers modes 1, 7 and the (4,6) splitter (indices n, l), chain B
covers modes 2, 8 and the (3,5) splitter (indices m, k).
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from math import comb, factorial, sqrt

import numpy as np
import scipy.linalg

from .errors import ConvergenceError

DEFAULT_BS_TRANSMISSIVITY = 0.5
CUTOFF_START = 4
CUTOFF_STEP = 2
CUTOFF_CAP = 30
CONVERGENCE_ATOL = 1e-11
CONVERGENCE_RTOL = 1e-10


def _tmsv_amps(mu: float, nmax: int) -> np.ndarray:
    n = np.arange(nmax + 1)
    return np.sqrt(mu**n / (1.0 + mu) ** (n + 1))


@functools.lru_cache(maxsize=4096)
def _bs_sector(total: int, theta: float) -> np.ndarray:
    """Beam splitter unitary within one photon-number sector.

    Basis |a, total-a> indexed by the first mode's count; generated by
    a1^dag a2 - a1 a2^dag so that a1^dag -> cos(theta) a1^dag - sin(theta) a2^dag.
    """
    if total == 0:
        return np.ones((1, 1))
    dim = total + 1
    g = np.zeros((dim, dim))
    for a in range(total):
        g[a + 1, a] = sqrt((a + 1) * (total - a))
        g[a, a + 1] = -sqrt((a + 1) * (total - a))
    return scipy.linalg.expm(theta * g)


def _kernel_vec(nmax: int, d: int, g: int, eta: float) -> tuple[int, np.ndarray]:
    """Detection kernel <d| L_eta(|o><o'|) |g> as (shift, vec) with o' = o + shift.

    The Kraus index is forced to K = o - d = o' - g; vec[o] holds the value.
    """
    shift = g - d
    vec = np.zeros(nmax + 1)
    for o in range(d, nmax + 1):
        op = o + shift
        if op < 0:
            continue
        kk = o - d
        vec[o] = (
            (1.0 - eta) ** kk
            / factorial(kk)
            * eta ** ((d + g) / 2.0)
            * sqrt(factorial(o) / factorial(d))
            * sqrt(factorial(op) / factorial(g))
        )
    return shift, vec


def _trace_vec(nmax: int) -> tuple[int, np.ndarray]:
    return 0, np.ones(nmax + 1)


def _chain_value(
    mu: float,
    cutoff: int,
    theta: float,
    outer1: tuple[int, np.ndarray],
    outer2: tuple[int, np.ndarray],
    bs1: tuple[int, np.ndarray],
    bs2: tuple[int, np.ndarray],
) -> float:
    """One chain's contribution: sum over its TMSV indices (u, v).

    outer1/outer2 are the kernels of the chain's undisturbed modes (occupancy
    u and v); bs1/bs2 the kernels of the two splitter outputs.  Photon-number
    conservation of the splitter forces the shifts to balance.
    """
    du, vec_u = outer1
    dv, vec_v = outer2
    s1, w1 = bs1
    s2, w2 = bs2
    if du + dv != s1 + s2:
        return 0.0
    amps = _tmsv_amps(mu, cutoff + max(abs(du), abs(dv)))
    total = 0.0
    for u in range(cutoff + 1):
        ub = u + du
        if not 0 <= ub <= cutoff:
            continue
        cu = amps[u] * amps[ub] * vec_u[u]
        if cu == 0.0:
            continue
        for v in range(cutoff + 1):
            vb = v + dv
            if not 0 <= vb <= cutoff:
                continue
            cv = amps[v] * amps[vb] * vec_v[v]
            if cv == 0.0:
                continue
            t = u + v
            tb = ub + vb
            uk = _bs_sector(t, theta)
            ukb = _bs_sector(tb, theta)
            acc = 0.0
            for a in range(t + 1):
                ab = a + s1
                if not 0 <= ab <= tb:
                    continue
                acc += uk[a, u] * ukb[ab, ub] * w1[a] * w2[t - a]
            total += cu * cv * acc
    return total


def _converge(evaluate, start: int = CUTOFF_START) -> tuple[np.ndarray, int]:
    """Increase the cutoff until the result stabilizes.

    Successive increments of the TMSV truncation shrink the error by the
    geometric Schmidt ratio, so a small last increment certifies the
    doubled-cutoff value would agree too.
    """
    prev = np.asarray(evaluate(start))
    cutoff = start
    while cutoff < CUTOFF_CAP:
        cutoff += CUTOFF_STEP
        cur = np.asarray(evaluate(cutoff))
        delta = float(np.max(np.abs(cur - prev)))
        if delta < CONVERGENCE_ATOL + CONVERGENCE_RTOL * float(np.max(np.abs(cur))):
            return cur, cutoff
        prev = cur
    raise ConvergenceError(f"no convergence by cutoff {CUTOFF_CAP}")


def _herald_kernels(pattern, eta_b: float, nmax: int):
    p3, p4, p5, p6 = pattern
    return {
        3: _kernel_vec(nmax, p3, p3, eta_b),
        4: _kernel_vec(nmax, p4, p4, eta_b),
        5: _kernel_vec(nmax, p5, p5, eta_b),
        6: _kernel_vec(nmax, p6, p6, eta_b),
    }


def oracle_pgen(
    mu: float,
    eta_b: float = 1.0,
    pattern=(1, 1, 0, 0),
    cutoff: int | None = None,
    t: float = DEFAULT_BS_TRANSMISSIVITY,
) -> float:
    """Heralding-pattern probability by direct Fock-space contraction."""
    pattern = tuple(int(n) for n in pattern)
    theta = float(np.arccos(np.sqrt(t)))

    def at(c: int) -> float:
        nmax = 2 * c
        h = _herald_kernels(pattern, eta_b, nmax)
        tr = _trace_vec(c)
        chain_b = _chain_value(mu, c, theta, tr, tr, h[3], h[5])
        chain_a = _chain_value(mu, c, theta, tr, tr, h[4], h[6])
        return chain_a * chain_b

    if cutoff is not None:
        return at(cutoff)
    value, _ = _converge(at)
    return float(value)


def oracle_fock_element(
    mu: float,
    etas,
    d,
    g,
    cutoff: int | None = None,
    t: float = DEFAULT_BS_TRANSMISSIVITY,
) -> complex:
    """<d| rho_lossy |g> for 8-mode Fock indices by chain contraction."""
    etas = np.asarray(etas, dtype=float)
    d = tuple(int(x) for x in d)
    g = tuple(int(x) for x in g)
    theta = float(np.arccos(np.sqrt(t)))

    def at(c: int) -> float:
        nmax = 2 * c
        ker = {m: _kernel_vec(nmax if m in (3, 4, 5, 6) else c, d[m - 1], g[m - 1], etas[m - 1]) for m in range(1, 9)}
        chain_b = _chain_value(mu, c, theta, ker[2], ker[8], ker[3], ker[5])
        chain_a = _chain_value(mu, c, theta, ker[1], ker[7], ker[4], ker[6])
        return chain_a * chain_b

    if cutoff is not None:
        return complex(at(cutoff))
    value, _ = _converge(at)
    return complex(value)


def oracle_fidelity(
    mu: float,
    etas,
    pattern=(1, 1, 0, 0),
    cross_sign: float = 1.0,
    cutoff: int | None = None,
) -> float:
    """Conditional Bell fidelity of the heralded photonic state."""
    pattern = tuple(int(n) for n in pattern)
    etas = np.asarray(etas, dtype=float)
    e1 = (1, 0) + pattern + (0, 1)
    e2 = (0, 1) + pattern + (1, 0)

    def at(c: int) -> float:
        t11 = oracle_fock_element(mu, etas, e1, e1, cutoff=c).real
        t22 = oracle_fock_element(mu, etas, e2, e2, cutoff=c).real
        t12 = oracle_fock_element(mu, etas, e1, e2, cutoff=c).real
        t21 = oracle_fock_element(mu, etas, e2, e1, cutoff=c).real
        den = oracle_pgen(mu, etas[2], pattern, cutoff=c)
        return 0.5 * (t11 + t22 + cross_sign * (t12 + t21)) / den

    if cutoff is not None:
        return at(cutoff)
    value, _ = _converge(at)
    return float(value)


_PBS_AMP = {
    ((0, 0), (0, 0)): 1.0,
    ((1, 0), (1, 0)): 1.0 / sqrt(2.0),
    ((1, 0), (0, 1)): 1.0 / sqrt(2.0),
    ((0, 1), (1, 0)): 1.0 / sqrt(2.0),
    ((0, 1), (0, 1)): -1.0 / sqrt(2.0),
}


def _pair_detection_amps(clicks: tuple[int, int]):
    """(r_first, r_second, amplitude) options reaching a memory-pair click."""
    if clicks == (0, 0):
        return [((0, 0), 1.0)]
    if sum(clicks) != 1:
        raise ValueError(f"memory-pair clicks must total 0 or 1, got {clicks}")
    return [(r, _PBS_AMP[(clicks, r)]) for r in ((1, 0), (0, 1))]


def oracle_spin_spin(
    mu: float,
    etas,
    click_pattern=(1, 0, 1, 1, 0, 0, 1, 0),
    cutoff: int | None = None,
    t: float = DEFAULT_BS_TRANSMISSIVITY,
) -> np.ndarray:
    """Unnormalized 4x4 spin-spin matrix by direct Fock-space loading.

    The memory branches enter as conditional sign flips on modes 2 and 8
    before the pair interference; detection keeps at most one photon per
    memory pair, so the per-mode Kraus decomposition collapses to small
    kernel sums threaded through the two chains.
    """
    etas = np.asarray(etas, dtype=float)
    click = tuple(int(n) for n in click_pattern)
    theta = float(np.arccos(np.sqrt(t)))
    herald = click[2:6]
    opts12 = _pair_detection_amps((click[0], click[1]))
    opts78 = _pair_detection_amps((click[6], click[7]))
    branches = ("01", "10")

    def at(c: int) -> np.ndarray:
        nmax = 2 * c
        h = _herald_kernels(herald, etas[2], nmax)

        @functools.lru_cache(maxsize=None)
        def chain_a(r1: int, rb1: int, r7: int, rb7: int) -> float:
            k1 = _kernel_vec(c, r1, rb1, etas[0])
            k7 = _kernel_vec(c, r7, rb7, etas[6])
            return _chain_value(mu, c, theta, k1, k7, h[4], h[6])

        @functools.lru_cache(maxsize=None)
        def chain_b(r2: int, rb2: int, r8: int, rb8: int) -> float:
            k2 = _kernel_vec(c, r2, rb2, etas[1])
            k8 = _kernel_vec(c, r8, rb8, etas[7])
            return _chain_value(mu, c, theta, k2, k8, h[3], h[5])

        def phase(branch: str, r_second: int) -> float:
            return -1.0 if branch == "01" and r_second % 2 == 1 else 1.0

        out = np.zeros((4, 4), dtype=complex)
        basis = tuple((a, b) for a in branches for b in branches)
        for (rk12, ak12), (rb12, ab12), (rk78, ak78), (rb78, ab78) in itertools.product(
            opts12, opts12, opts78, opts78
        ):
            ca = chain_a(rk12[0], rb12[0], rk78[0], rb78[0])
            cb = chain_b(rk12[1], rb12[1], rk78[1], rb78[1])
            weight = 0.25 * ak12 * ab12 * ak78 * ab78 * ca * cb
            if weight == 0.0:
                continue
            for r, (ket_a, ket_b) in enumerate(basis):
                pk = phase(ket_a, rk12[1]) * phase(ket_b, rk78[1])
                for col, (bra_a, bra_b) in enumerate(basis):
                    pb = phase(bra_a, rb12[1]) * phase(bra_b, rb78[1])
                    out[r, col] += weight * pk * pb
        return out

    if cutoff is not None:
        return at(cutoff)
    value, _ = _converge(at)
    return value


def oracle_pgen_dark(
    mu: float,
    eta_b: float,
    dark_click_prob: float,
    pattern=(1, 1, 0, 0),
    cutoff: int | None = None,
) -> float:
    """Dark-count heralding probability with the complete classical weights.

    Every detector, including the two that must stay silent, carries its own
    no-dark factor.  The closed-form detection model quoted by the engine
    omits the silent detectors' (1 - P_d)^2; the validation report surfaces
    the resulting ratio.
    """
    pd = dark_click_prob
    clicked = [i for i, n in enumerate(pattern) if n == 1]
    if len(clicked) != 2 or sum(pattern) != 2:
        raise ValueError(f"dark-count heralding needs two single clicks, got {pattern}")
    total = 0.0
    for dark in (0, 1, 2):
        for removed in itertools.combinations(clicked, dark):
            photon_pattern = list(pattern)
            for idx in removed:
                photon_pattern[idx] = 0
            weight = pd**dark * (1.0 - pd) ** (4 - dark)
            total += weight * oracle_pgen(mu, eta_b, tuple(photon_pattern), cutoff=cutoff)
    return total


@dataclass
class TruncatedState:
    """Sparse Fock representation with Kraus-loss branch decomposition.

    branches maps occupation tuples to amplitudes; before any loss there is a
    single branch.  norm_deficit bounds the weight lost to truncation.
    """

    n_modes: int
    cutoff: int
    branches: list[dict[tuple[int, ...], complex]]
    norm_deficit: float
    warning: str | None = None

    def total_weight(self) -> float:
        return sum(sum(abs(a) ** 2 for a in b.values()) for b in self.branches)


def _support_arrays(mu: float, cutoff: int, t: float = DEFAULT_BS_TRANSMISSIVITY):
    """Occupations and amplitudes of the truncated cascaded state, vectorized.

    Groups the four TMSV indices (n, m, k, l) by splitter sector totals so
    the splitter amplitudes broadcast; returns (occs [N, 8], amps [N]).
    """
    theta = float(np.arccos(np.sqrt(t)))
    amps1 = _tmsv_amps(mu, cutoff)
    occ_blocks = []
    amp_blocks = []
    idx = np.arange(cutoff + 1)
    for t35 in range(2 * cutoff + 1):
        m = idx[(idx >= t35 - cutoff) & (idx <= t35)]
        if m.size == 0:
            continue
        k = t35 - m
        u35 = _bs_sector(t35, theta)
        for t46 in range(2 * cutoff + 1):
            n = idx[(idx >= t46 - cutoff) & (idx <= t46)]
            if n.size == 0:
                continue
            l = t46 - n
            u46 = _bs_sector(t46, theta)
            base = np.einsum("i,j->ij", amps1[n] * amps1[l], amps1[m] * amps1[k])
            # amplitude[(n,l),(m,k),a,e] = base * u35[a, m] * u46[e, n]
            amp = np.einsum("ij,aj,ei->ijae", base, u35[:, m], u46[:, n])
            na, nm = n.size, m.size
            da, de = t35 + 1, t46 + 1
            a_grid = np.arange(da)
            e_grid = np.arange(de)
            shape = (na, nm, da, de)
            occ = np.empty(shape + (8,), dtype=np.int16)
            occ[..., 0] = n[:, None, None, None]
            occ[..., 1] = m[None, :, None, None]
            occ[..., 2] = a_grid[None, None, :, None]
            occ[..., 3] = e_grid[None, None, None, :]
            occ[..., 4] = t35 - a_grid[None, None, :, None]
            occ[..., 5] = t46 - e_grid[None, None, None, :]
            occ[..., 6] = l[:, None, None, None]
            occ[..., 7] = k[None, :, None, None]
            occ_blocks.append(occ.reshape(-1, 8))
            amp_blocks.append(amp.reshape(-1))
    occs = np.concatenate(occ_blocks, axis=0)
    amps = np.concatenate(amp_blocks, axis=0)
    keep = amps != 0.0
    return occs[keep], amps[keep]


def oracle_build_cascaded(mu: float, cutoff: int, t: float = DEFAULT_BS_TRANSMISSIVITY) -> TruncatedState:
    """Cascaded-source state from four truncated TMSV ladders and the BSM splitters."""
    if cutoff < 1:
        raise ValueError(f"cutoff must be >= 1, got {cutoff}")
    if not np.isfinite(mu) or mu < 0:
        raise ValueError(f"mean photon number must be finite and >= 0, got {mu}")
    occs, amps = _support_arrays(mu, cutoff, t)
    state = {tuple(int(x) for x in occ): complex(amp) for occ, amp in zip(occs, amps)}
    ratio = mu / (1.0 + mu)
    deficit = 1.0 - (1.0 - ratio ** (cutoff + 1)) ** 4
    warning = None
    if deficit > 1e-3:
        warning = f"norm deficit {deficit:.2e} exceeds 1e-3 at mu={mu}"
    return TruncatedState(8, cutoff, [state], deficit, warning)


def oracle_apply_loss(state: TruncatedState, mode: int, eta: float) -> TruncatedState:
    """Expand the Kraus-operator loss channel on one mode into branches."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    max_occ = 0
    for branch in state.branches:
        for occ in branch:
            max_occ = max(max_occ, occ[mode - 1])
    new_branches = []
    for branch in state.branches:
        for kk in range(max_occ + 1):
            nb: dict[tuple[int, ...], complex] = {}
            for occ, amp in branch.items():
                o = occ[mode - 1]
                if o < kk:
                    continue
                coeff = sqrt((1.0 - eta) ** kk / factorial(kk)) * eta ** ((o - kk) / 2.0) * sqrt(
                    factorial(o) / factorial(o - kk)
                )
                if coeff == 0.0:
                    continue
                nb[occ[: mode - 1] + (o - kk,) + occ[mode:]] = amp * coeff
            if nb:
                new_branches.append(nb)
    return TruncatedState(state.n_modes, state.cutoff, new_branches, state.norm_deficit)


def build_pre_bsm_state(mu: float, cutoff: int) -> TruncatedState:
    """Two SPDC sources side by side, before the BSM splitters mix (3,5) and (4,6)."""
    if cutoff < 1:
        raise ValueError(f"cutoff must be >= 1, got {cutoff}")
    amps = _tmsv_amps(mu, cutoff)
    state: dict[tuple[int, ...], complex] = {}
    rng = range(cutoff + 1)
    for n, m, k, l in itertools.product(rng, rng, rng, rng):
        amp = amps[n] * amps[m] * amps[k] * amps[l]
        if amp != 0.0:
            state[(n, m, m, n, k, l, l, k)] = amp
    ratio = mu / (1.0 + mu)
    deficit = 1.0 - (1.0 - ratio ** (cutoff + 1)) ** 4
    return TruncatedState(8, cutoff, [state], deficit)


def apply_beamsplitter(
    state: TruncatedState, i: int, j: int, t: float = DEFAULT_BS_TRANSMISSIVITY
) -> TruncatedState:
    """Apply the (i, j) beam splitter to every branch, sector by sector."""
    theta = float(np.arccos(np.sqrt(t)))
    new_branches = []
    for branch in state.branches:
        nb: dict[tuple[int, ...], complex] = {}
        for occ, amp in branch.items():
            oi, oj = occ[i - 1], occ[j - 1]
            sector = _bs_sector(oi + oj, theta)
            for a in range(oi + oj + 1):
                f = sector[a, oi]
                if f == 0.0:
                    continue
                new_occ = list(occ)
                new_occ[i - 1] = a
                new_occ[j - 1] = oi + oj - a
                key = tuple(new_occ)
                nb[key] = nb.get(key, 0.0) + amp * f
        new_branches.append(nb)
    return TruncatedState(state.n_modes, state.cutoff, new_branches, state.norm_deficit)


def pattern_probability(state: TruncatedState, modes: tuple[int, ...], pattern: tuple[int, ...]) -> float:
    """Probability of an exact click pattern on a mode subset, tracing the rest."""
    idx = tuple(m - 1 for m in modes)
    pattern = tuple(pattern)
    return sum(
        abs(amp) ** 2
        for branch in state.branches
        for occ, amp in branch.items()
        if tuple(occ[i] for i in idx) == pattern
    )


def oracle_pgen_filtered(
    mu: float, eta_b: float, pattern=(1, 1, 0, 0), cutoff: int = 4
) -> float:
    """Second, independent heralding-probability path: Kraus branches + amplitude filtering."""
    pattern = tuple(int(n) for n in pattern)
    state = oracle_build_cascaded(mu, cutoff)
    for mode in (3, 4, 5, 6):
        state = oracle_apply_loss(state, mode, eta_b)
    return pattern_probability(state, (3, 4, 5, 6), pattern)


def oracle_covariance(mu: float, cutoff: int, t: float = DEFAULT_BS_TRANSMISSIVITY) -> np.ndarray:
    """Symmetrized quadrature second moments of the truncated state, QQPP ordering.

    Uses q = a + a^dag, p = i(a^dag - a) so the vacuum diagonal is 1, matching
    the covariance stage's normalization.
    """
    theta = float(np.arccos(np.sqrt(t)))
    amps1 = _tmsv_amps(mu, cutoff)

    def chain_support(first_modes: bool):
        # chain A covers modes (1, 4, 6, 7) via indices (n, l); chain B covers
        # (2, 3, 5, 8) via (m, k).  Occupations listed in mode order.
        occ_rows = []
        amp_rows = []
        for u in range(cutoff + 1):
            for v in range(cutoff + 1):
                sector = _bs_sector(u + v, theta)
                for a in range(u + v + 1):
                    amp = amps1[u] * amps1[v] * sector[a, u]
                    if amp != 0.0:
                        occ_rows.append((u, a, u + v - a, v))
                        amp_rows.append(amp)
        return np.array(occ_rows, dtype=np.int64), np.array(amp_rows)

    def chain_moments(occs: np.ndarray, amps: np.ndarray):
        norm = float(np.sum(amps**2))
        keymax = 2 * cutoff + 2
        powers = keymax ** np.arange(4, dtype=np.int64)
        index = {int(k): i for i, k in enumerate(occs @ powers)}

        def pair_expect(i: int, j: int, lower_both: bool) -> float:
            total = 0.0
            for row, occ in enumerate(occs):
                nj = occ[j]
                if nj == 0:
                    continue
                target = occ.copy()
                target[j] -= 1
                ni = target[i]
                if lower_both:
                    if ni == 0:
                        continue
                    target[i] -= 1
                    factor = sqrt(nj * ni)
                else:
                    target[i] += 1
                    factor = sqrt(nj * (ni + 1))
                other = index.get(int(target @ powers))
                if other is not None:
                    total += amps[other] * amps[row] * factor
            return total / norm

        ada = np.array([[pair_expect(i, j, False) for j in range(4)] for i in range(4)])
        aa = np.array([[pair_expect(i, j, True) for j in range(4)] for i in range(4)])
        return ada, aa

    a_occ, a_amp = chain_support(True)
    b_occ, b_amp = chain_support(False)
    ada_a, aa_a = chain_moments(a_occ, a_amp)
    ada_b, aa_b = chain_moments(b_occ, b_amp)

    # Cross-chain moments vanish: the state is a product over the chains and
    # each chain has even total photon number.
    chain_a_modes = (1, 4, 6, 7)
    chain_b_modes = (2, 3, 5, 8)
    ada = np.zeros((8, 8))
    aa = np.zeros((8, 8))
    for local_i, gi in enumerate(chain_a_modes):
        for local_j, gj in enumerate(chain_a_modes):
            ada[gi - 1, gj - 1] = ada_a[local_i, local_j]
            aa[gi - 1, gj - 1] = aa_a[local_i, local_j]
    for local_i, gi in enumerate(chain_b_modes):
        for local_j, gj in enumerate(chain_b_modes):
            ada[gi - 1, gj - 1] = ada_b[local_i, local_j]
            aa[gi - 1, gj - 1] = aa_b[local_i, local_j]

    n = 8
    v = np.zeros((16, 16))
    for i in range(n):
        for j in range(n):
            delta = 1.0 if i == j else 0.0
            # real amplitudes: <a a> and <a^dag a> are real, so q-p blocks vanish
            v[i, j] = 2.0 * aa[i, j] + ada[i, j] + ada[j, i] + delta
            v[n + i, n + j] = -2.0 * aa[i, j] + ada[i, j] + ada[j, i] + delta
    return (v + v.T) / 2.0
