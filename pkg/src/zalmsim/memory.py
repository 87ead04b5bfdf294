"""Two-memory loading: click-pattern projection of the source state onto spins.

Each receiver holds an ideal dual-rail memory prepared in (|0,1> + |1,0>)/sqrt(2).
A conditional-phase interaction flips the sign of source mode 2 (8) when
memory A (B) occupies its second rail, the mode pair interferes on a
polarizing beam splitter, and single-photon detection heralds the load.  The
resulting unnormalized 4x4 spin-spin matrix lives on the ordered basis

    (|0,1>|0,1>, |0,1>|1,0>, |1,0>|0,1>, |1,0>|1,0>)

and its trace is the probability of the full click pattern.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import UndefinedFidelityError
from .metrics import A_FULL, HERALD_MODES, _variants
from .moments import LinearForm, MomentRequest, alpha_form, beta_conj_form, gaussian_prefactor, wick_moment
from .sources import SourceParams

DEFAULT_CLICK_PATTERN = (1, 0, 1, 1, 0, 0, 1, 0)
MEMORY_PAIRS = ((1, 2), (7, 8))
BRANCHES = ("01", "10")
BASIS = tuple((a, b) for a in BRANCHES for b in BRANCHES)

BELL_TARGETS = {
    "phi_plus": np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0),
    "phi_minus": np.array([-1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0),
    "psi_plus": np.array([0.0, 1.0, 1.0, 0.0]) / np.sqrt(2.0),
    "psi_minus": np.array([0.0, -1.0, 1.0, 0.0]) / np.sqrt(2.0),
}

# Click patterns mixed in by dark counts, grouped by how many of the base
# pattern's four clicks are attributed to dark counts.
SIGMA_PATTERNS = {
    1: (
        (0, 0, 1, 1, 0, 0, 1, 0),
        (1, 0, 0, 1, 0, 0, 1, 0),
        (1, 0, 1, 0, 0, 0, 1, 0),
        (1, 0, 1, 1, 0, 0, 0, 0),
    ),
    2: (
        (0, 0, 0, 1, 0, 0, 1, 0),
        (0, 0, 1, 0, 0, 0, 1, 0),
        (0, 0, 1, 1, 0, 0, 0, 0),
        (1, 0, 0, 0, 0, 0, 1, 0),
        (1, 0, 0, 1, 0, 0, 0, 0),
        (1, 0, 1, 0, 0, 0, 0, 0),
    ),
    3: (
        (1, 0, 0, 0, 0, 0, 0, 0),
        (0, 0, 1, 0, 0, 0, 0, 0),
        (0, 0, 0, 1, 0, 0, 0, 0),
        (0, 0, 0, 0, 0, 0, 1, 0),
    ),
    4: ((0, 0, 0, 0, 0, 0, 0, 0),),
}


def validate_click_pattern(click) -> tuple[int, ...]:
    click = tuple(int(n) for n in click)
    if len(click) != 8 or any(n < 0 for n in click):
        raise ValueError(f"click pattern must be 8 nonnegative counts, got {click}")
    for i in (1, 2, 7, 8):
        if click[i - 1] > 1:
            raise ValueError(f"memory-side clicks are limited to 0 or 1, got {click[i - 1]} on mode {i}")
    if sum(click[2:6]) > 8:
        raise ValueError("heralding clicks exceed the cap of 8")
    return click


def generated_sigma_patterns() -> dict[int, tuple[tuple[int, ...], ...]]:
    """Enumerate the dark-click patterns from the base pattern's click subsets.

    Cross-check for the hard-coded list: attributing k of the four base
    clicks to dark counts removes them from the photon pattern.
    """
    clicked = [i for i, n in enumerate(DEFAULT_CLICK_PATTERN) if n == 1]
    out: dict[int, list[tuple[int, ...]]] = {1: [], 2: [], 3: [], 4: []}
    import itertools

    for k in (1, 2, 3, 4):
        for removed in itertools.combinations(clicked, k):
            pattern = list(DEFAULT_CLICK_PATTERN)
            for idx in removed:
                pattern[idx] = 0
            out[k].append(tuple(pattern))
    return {k: tuple(v) for k, v in out.items()}


@dataclass(frozen=True)
class SpinSpinDM:
    """Unnormalized spin-spin density matrix over the dual-rail basis."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.ascontiguousarray(self.entries, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"spin-spin matrix must be 4x4, got {m.shape}")
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.entries)))

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def min_eigenvalue(self) -> float:
        herm = (self.entries + self.entries.conj().T) / 2.0
        return float(np.min(np.linalg.eigvalsh(herm)))


def _pair_forms(pair, clicks, branch, eta, conjugate) -> list[LinearForm]:
    """Detection form(s) for one memory pair, one branch, one click pair."""
    i, j = pair
    ni, nj = clicks
    if (ni, nj) == (0, 0):
        return []
    if (ni, nj) not in ((1, 0), (0, 1)):
        raise ValueError(f"memory pair clicks must be (0,0), (1,0) or (0,1), got {(ni, nj)}")
    base = beta_conj_form if conjugate else alpha_form
    sign = 1.0 if branch == "10" else -1.0
    if (ni, nj) == (0, 1):
        sign = -sign
    fi = base(i) * (np.sqrt(eta[i - 1]) / np.sqrt(2.0))
    fj = base(j) * (sign * np.sqrt(eta[j - 1]) / np.sqrt(2.0))
    return [fi + fj]


def branch_forms(branch, click, eta, conjugate: bool = False) -> list[LinearForm]:
    """Memory-side detection forms for both pairs of one bra or ket branch.

    branch is a (memory A, memory B) pair of rail labels from BRANCHES.  The
    second rail's amplitude flips sign on the |0,1> branch (conditional-phase
    interaction); the polarizing beam splitter then maps click (1,0) to the
    sum form and click (0,1) to the difference form.
    """
    click = validate_click_pattern(click)
    forms: list[LinearForm] = []
    for pair, mem in zip(MEMORY_PAIRS, branch):
        clicks = (click[pair[0] - 1], click[pair[1] - 1])
        forms.extend(_pair_forms(pair, clicks, mem, eta, conjugate))
    return forms


def spin_spin_dm(params: SourceParams, click=DEFAULT_CLICK_PATTERN) -> SpinSpinDM:
    """Unnormalized two-memory density matrix heralded by one click pattern.

    The exponent matrix is the no-traced-modes variant; memory loading only
    changes the polynomial prefactor of each entry.
    """
    click = validate_click_pattern(click)
    k, a = _variants(params, A_FULL)
    eta = params.eta_vector
    pref = gaussian_prefactor(a, k, k)
    herald_scalar = 0.25
    herald_forms: list[LinearForm] = []
    for mode, clicks in zip(HERALD_MODES, click[2:6]):
        herald_scalar *= eta[mode - 1] ** clicks / factorial(clicks)
        for _ in range(clicks):
            herald_forms.append(alpha_form(mode))
            herald_forms.append(beta_conj_form(mode))
    entries = np.zeros((4, 4), dtype=complex)
    ket_forms = {b: branch_forms(b, click, eta, conjugate=False) for b in BASIS}
    bra_forms = {b: branch_forms(b, click, eta, conjugate=True) for b in BASIS}
    for r, ket in enumerate(BASIS):
        for c, bra in enumerate(BASIS):
            forms = tuple(herald_forms + ket_forms[ket] + bra_forms[bra])
            entries[r, c] = pref * wick_moment(a, MomentRequest(forms, herald_scalar))
    return SpinSpinDM(entries)


def spin_spin_dm_dark(params: SourceParams) -> SpinSpinDM:
    """Spin-spin matrix for the base click pattern including dark counts.

    Convex mixture over the click patterns whose missing clicks could have
    been supplied by dark counts, weighted by the dark-click probabilities of
    the eight detectors.
    """
    pd = params.dark_click_prob
    total = (1.0 - pd) ** 8 * spin_spin_dm(params, DEFAULT_CLICK_PATTERN).entries
    if pd > 0.0:
        for k, patterns in SIGMA_PATTERNS.items():
            weight = pd**k * (1.0 - pd) ** (8 - k)
            for pattern in patterns:
                total = total + weight * spin_spin_dm(params, pattern).entries
    return SpinSpinDM(total)


def bell_fidelity_spin(dm: SpinSpinDM, target) -> float:
    """Overlap <target| dm |target> / trace for a Bell label or explicit 4-vector."""
    if isinstance(target, str):
        try:
            vec = BELL_TARGETS[target]
        except KeyError:
            raise ValueError(f"unknown Bell target {target!r}; options: {sorted(BELL_TARGETS)}")
    else:
        vec = np.asarray(target, dtype=complex)
        if vec.shape != (4,):
            raise ValueError("explicit Bell target must be a 4-vector")
    tr = dm.trace
    if tr <= 0.0:
        raise UndefinedFidelityError("spin-spin matrix has nonpositive trace")
    return float(np.real(vec.conj() @ dm.entries @ vec) / tr)
