"""Gaussian moment engine: exponent-matrix assembly, hafnian, and Wick coupling.

All detection-stage quantities reduce to integrals of a polynomial prefactor
against exp(-x^T A x / 2) over the doubled quadrature vector

    x = (q_a1..q_aN, p_a1..p_aN, q_b1..q_bN, p_b1..p_bN)

where the a-block carries the ket kernel and the b-block the conjugated bra
kernel.  Wick's theorem evaluates the polynomial part as a hafnian of
two-point functions drawn from A^{-1}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalDomainError
from .kfunction import KFunctionData

MAX_REQUEST_CARDINALITY = 16


def variable_order(n_modes: int = 8) -> tuple[str, ...]:
    """Labels of the doubled quadrature vector, in storage order."""
    return tuple(
        f"{quad}_{side}{mode}"
        for side in ("a", "b")
        for quad in ("q", "p")
        for mode in range(1, n_modes + 1)
    )


@dataclass(frozen=True)
class LinearForm:
    """Complex linear form over the doubled quadrature vector."""

    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.coeffs, dtype=complex)
        arr.flags.writeable = False
        object.__setattr__(self, "coeffs", arr)

    def __add__(self, other: "LinearForm") -> "LinearForm":
        return LinearForm(self.coeffs + other.coeffs)

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return LinearForm(self.coeffs - other.coeffs)

    def __mul__(self, scalar: complex) -> "LinearForm":
        return LinearForm(self.coeffs * scalar)

    __rmul__ = __mul__


def alpha_form(mode: int, n_modes: int = 8) -> LinearForm:
    """Ket-side coherent amplitude alpha_j = (q_aj + i p_aj)/sqrt(2)."""
    coeffs = np.zeros(4 * n_modes, dtype=complex)
    coeffs[mode - 1] = 1.0 / np.sqrt(2.0)
    coeffs[n_modes + mode - 1] = 1.0j / np.sqrt(2.0)
    return LinearForm(coeffs)


def beta_conj_form(mode: int, n_modes: int = 8) -> LinearForm:
    """Bra-side conjugated amplitude beta_j* = (q_bj - i p_bj)/sqrt(2)."""
    coeffs = np.zeros(4 * n_modes, dtype=complex)
    coeffs[2 * n_modes + mode - 1] = 1.0 / np.sqrt(2.0)
    coeffs[3 * n_modes + mode - 1] = -1.0j / np.sqrt(2.0)
    return LinearForm(coeffs)


@dataclass(frozen=True)
class MomentRequest:
    """Multiset of linear forms to Wick-integrate, times a scalar prefactor.

    The scalar carries efficiency powers and 1/n! factors; repeated Fock
    exponents enter as repeated forms.
    """

    forms: tuple[LinearForm, ...]
    scalar_prefactor: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "forms", tuple(self.forms))
        if len(self.forms) > MAX_REQUEST_CARDINALITY:
            raise ValueError(
                f"request cardinality {len(self.forms)} exceeds the cap of {MAX_REQUEST_CARDINALITY}"
            )


@dataclass(frozen=True)
class AMatrix:
    """Complex symmetric exponent matrix with its cached inverse and log-det."""

    entries: np.ndarray
    eta: np.ndarray | None = None
    traced_modes: frozenset[int] = frozenset()
    inverse: np.ndarray = field(init=False)
    log_det: complex = field(init=False)

    def __post_init__(self):
        m = np.ascontiguousarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"A matrix must be square, got shape {m.shape}")
        m = (m + m.T) / 2.0
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "traced_modes", frozenset(self.traced_modes))
        sign, logabs = np.linalg.slogdet(m)
        if sign == 0 or not np.isfinite(logabs):
            raise NumericalDomainError("A matrix is singular")
        # Principal branch; physical outputs are asserted real downstream.
        object.__setattr__(self, "log_det", complex(logabs, float(np.angle(sign))))
        inv = np.linalg.inv(m)
        inv = (inv + inv.T) / 2.0
        inv.flags.writeable = False
        object.__setattr__(self, "inverse", inv)

    @property
    def n_modes(self) -> int:
        return self.entries.shape[0] // 4


def assemble_a(
    kA: KFunctionData,
    kB: KFunctionData,
    eta: np.ndarray,
    traced_modes: frozenset[int] | set[int] = frozenset(),
) -> AMatrix:
    """Assemble the detection exponent matrix for one loss/trace configuration.

    The bra kernel enters conjugated.  Each mode contributes an a<->b cross
    coupling expanded from (eta_i - 1)(q_a + i p_a)(q_b - i p_b), with the
    coefficient replaced by -1 on traced-out modes; every off-diagonal
    contribution is halved before symmetric placement so the quadratic form
    reproduces the scalar exponent exactly.
    """
    n = kA.n_modes
    eta = np.asarray(eta, dtype=float)
    if eta.shape != (n,):
        raise ValueError(f"expected {n} per-mode efficiencies, got shape {eta.shape}")
    if np.any(eta < 0.0) or np.any(eta > 1.0):
        raise ValueError("efficiencies must lie in [0, 1]")
    traced = frozenset(traced_modes)
    if any(not 1 <= m <= n for m in traced):
        raise ValueError(f"traced modes must lie in 1..{n}")
    dim = 4 * n
    a = np.zeros((dim, dim), dtype=complex)
    a[: 2 * n, : 2 * n] = kA.script_b
    a[2 * n :, 2 * n :] = np.conj(kB.script_b)
    a += 0.5 * np.eye(dim)
    for mode in range(1, n + 1):
        w = -1.0 if mode in traced else eta[mode - 1] - 1.0
        if w == 0.0:
            continue
        qa, pa = mode - 1, n + mode - 1
        qb, pb = 2 * n + mode - 1, 3 * n + mode - 1
        half = 0.5 * w
        for r, c, v in (
            (qa, qb, half),
            (pa, pb, half),
            (qa, pb, -1.0j * half),
            (pa, qb, 1.0j * half),
        ):
            a[r, c] += v
            a[c, r] += v
    return AMatrix(a, eta=eta, traced_modes=traced)


def hafnian(m: np.ndarray) -> complex:
    """Hafnian of a symmetric matrix by exact perfect-matching enumeration.

    Recursion anchors the first remaining index and sums over its (n-1)
    partners, visiting every one of the (n-1)!! matchings once.  Fine up to
    n = 16; beyond that the O(n^3 2^(n/2)) power-trace algorithm would be the
    upgrade path.
    """
    m = np.asarray(m)
    n = m.shape[0]
    if m.ndim != 2 or m.shape != (n, n):
        raise ValueError(f"hafnian needs a square matrix, got shape {m.shape}")
    if n % 2 != 0:
        raise ValueError(f"hafnian is defined for even dimension, got {n}")

    def rec(idx: tuple[int, ...]) -> complex:
        if not idx:
            return 1.0 + 0.0j
        i0 = idx[0]
        total = 0.0 + 0.0j
        for pos in range(1, len(idx)):
            rest = idx[1:pos] + idx[pos + 1 :]
            total += m[i0, idx[pos]] * rec(rest)
        return total

    return complex(rec(tuple(range(n))))


def wick_moment(a: AMatrix, req: MomentRequest) -> complex:
    """Gaussian moment of the request's forms under exp(-x^T A x / 2).

    Stacks the forms into L and evaluates haf(L A^{-1} L^T) times the scalar
    prefactor; odd cardinality vanishes identically.
    """
    n_forms = len(req.forms)
    if n_forms == 0:
        return complex(req.scalar_prefactor)
    if n_forms % 2 == 1:
        return 0.0 + 0.0j
    l = np.vstack([f.coeffs for f in req.forms])
    if l.shape[1] != a.entries.shape[0]:
        raise ValueError(f"form dimension {l.shape[1]} does not match A dimension {a.entries.shape[0]}")
    pair = l @ a.inverse @ l.T
    pair = (pair + pair.T) / 2.0
    return complex(req.scalar_prefactor) * hafnian(pair)


def gaussian_prefactor(a: AMatrix, kA: KFunctionData, kB: KFunctionData) -> complex:
    """Normalization 1 / (det(Gamma)^(1/4) det(Gamma*)^(1/4) sqrt(det A)).

    Computed in log space; the 2 pi powers of the kernel normalization and the
    Gaussian integral cancel exactly at this dimension.
    """
    log_total = -0.25 * kA.log_det_gamma - 0.25 * kB.log_det_gamma - 0.5 * a.log_det
    return complex(np.exp(log_total))
