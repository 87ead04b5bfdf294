"""Photonic figures of merit: trace, heralding probability, fidelity, Fock elements."""

from __future__ import annotations

import functools
from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import UndefinedFidelityError
from .kfunction import KFunctionData, k_data
from .moments import (
    AMatrix,
    MomentRequest,
    alpha_form,
    assemble_a,
    beta_conj_form,
    gaussian_prefactor,
    wick_moment,
)
from .sources import SourceParams, build_cascaded_cov

HERALD_MODES = (3, 4, 5, 6)
OUTER_MODES = (1, 2, 7, 8)
REAL_TOLERANCE = 1e-9
MAX_TOTAL_FOCK = 16


@dataclass(frozen=True)
class MetricResult:
    """A real scalar observable with its imaginary residual diagnostics."""

    value: float
    imag_residual: float
    params_echo: SourceParams
    flags: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.flags


def _as_metric(raw: complex, params: SourceParams, extra_flags: tuple[str, ...] = ()) -> MetricResult:
    value = float(np.real(raw))
    residual = abs(float(np.imag(raw)))
    flags = list(extra_flags)
    if residual >= REAL_TOLERANCE * max(abs(value), 1e-30):
        flags.append("imag_residual")
    return MetricResult(value, residual, params, tuple(flags))


@functools.lru_cache(maxsize=256)
def _kernel_for(mu: float) -> KFunctionData:
    return k_data(build_cascaded_cov(mu))


@functools.lru_cache(maxsize=256)
def _a_variant(mu: float, eta: tuple[float, ...], traced: frozenset[int]) -> AMatrix:
    k = _kernel_for(mu)
    return assemble_a(k, k, np.asarray(eta), traced)


def _variants(params: SourceParams, traced: frozenset[int]) -> tuple[KFunctionData, AMatrix]:
    eta = tuple(params.eta_vector)
    return _kernel_for(params.mean_photon), _a_variant(params.mean_photon, eta, traced)


A_FULL = frozenset()
A_PGEN_TRACED = frozenset(OUTER_MODES)
A_TRACE_ALL = frozenset(range(1, 9))


def _herald_request(pattern, eta, scalar=1.0) -> MomentRequest:
    """Clicked-mode coherent amplitudes with their eta^n / n! weights."""
    forms = []
    for mode, clicks in zip(HERALD_MODES, pattern):
        scalar *= eta[mode - 1] ** clicks / factorial(clicks)
        for _ in range(clicks):
            forms.append(alpha_form(mode))
            forms.append(beta_conj_form(mode))
    return MomentRequest(tuple(forms), scalar)


def photonic_trace(params: SourceParams) -> MetricResult:
    """Trace of the lossy source state; equals 1 for every physical parameter set."""
    k, a = _variants(params, A_TRACE_ALL)
    raw = gaussian_prefactor(a, k, k) * wick_moment(a, MomentRequest(()))
    return _as_metric(raw, params)


def pgen(params: SourceParams) -> MetricResult:
    """Probability that the heralding detectors fire with the requested pattern."""
    k, a = _variants(params, A_PGEN_TRACED)
    req = _herald_request(params.herald_pattern, params.eta_vector)
    raw = gaussian_prefactor(a, k, k) * wick_moment(a, req)
    return _as_metric(raw, params)


def pgen_with_dark(params: SourceParams) -> MetricResult:
    """Heralding probability including detector dark clicks.

    Sums the click-attribution terms for the (1, 1, 0, 0)-class pattern: both
    clicks real, either single click real with the other dark, or both dark.
    A dark-attributed detector keeps its mode in the detected set with zero
    photons, so all four terms share the same exponent matrix.
    """
    pattern = params.herald_pattern
    if sorted(pattern) != [0, 0, 1, 1]:
        raise ValueError(f"dark-count heralding is defined for two single clicks, got {pattern}")
    pd = params.dark_click_prob
    k, a = _variants(params, A_PGEN_TRACED)
    pref = gaussian_prefactor(a, k, k)
    eta = params.eta_vector
    clicked = [m for m, n in zip(HERALD_MODES, pattern) if n == 1]
    m1, m2 = clicked

    def w(modes) -> complex:
        forms = []
        for mode in modes:
            forms.append(alpha_form(mode))
            forms.append(beta_conj_form(mode))
        return wick_moment(a, MomentRequest(tuple(forms)))

    eta1, eta2 = eta[m1 - 1], eta[m2 - 1]
    raw = (eta1 * eta2) * (1.0 - pd) ** 2 * w((m1, m2))
    if pd > 0.0:
        raw += eta1 * pd * (1.0 - pd) * w((m1,))
        raw += eta2 * pd * (1.0 - pd) * w((m2,))
        raw += pd * pd * w(())
    return _as_metric(pref * raw, params)


def fidelity(params: SourceParams, bell_target: str = "psi_minus") -> MetricResult:
    """Bell fidelity of the heralded photonic state.

    Supported patterns click exactly one photon on each of two heralding
    modes, (1,1,0,0) or (0,0,1,1).  bell_target selects the relative sign of
    the two coherence terms; "psi_minus" reproduces the pattern's nominal
    Bell state, "psi_plus" the orthogonal one.
    """
    pattern = params.herald_pattern
    if pattern == (1, 1, 0, 0):
        h1, h2 = 3, 4
    elif pattern == (0, 0, 1, 1):
        h1, h2 = 5, 6
    else:
        raise ValueError(f"fidelity is defined for patterns (1,1,0,0) or (0,0,1,1), got {pattern}")
    if bell_target == "psi_minus":
        cross_sign = 1.0
    elif bell_target == "psi_plus":
        cross_sign = -1.0
    else:
        raise ValueError(f"unknown bell_target {bell_target!r}")
    if params.mean_photon == 0.0:
        raise UndefinedFidelityError("zero heralding probability at mean_photon = 0")
    k, a_full = _variants(params, A_FULL)
    _, a_pgen = _variants(params, A_PGEN_TRACED)

    def w(alphas, betas) -> complex:
        forms = [alpha_form(m) for m in alphas] + [beta_conj_form(m) for m in betas]
        return wick_moment(a_full, MomentRequest(tuple(forms)))

    ket1 = (1, h1, h2, 8)
    ket2 = (2, h1, h2, 7)
    w11 = w(ket1, ket1)
    w12 = w(ket1, ket2)
    w21 = w(ket2, ket1)
    w22 = w(ket2, ket2)
    denom = wick_moment(
        a_pgen,
        MomentRequest((alpha_form(h1), beta_conj_form(h1), alpha_form(h2), beta_conj_form(h2))),
    )
    if denom == 0.0:
        raise UndefinedFidelityError("heralding probability vanished")
    det_ratio = np.exp(0.5 * (a_pgen.log_det - a_full.log_det))
    raw = (
        (params.eta_d * params.eta_t) ** 2
        * det_ratio
        * (w11 + w22 + cross_sign * (w12 + w21))
        / (2.0 * denom)
    )
    flags = ()
    value = float(np.real(raw))
    if value < -REAL_TOLERANCE or value > 1.0 + REAL_TOLERANCE:
        flags = ("out_of_range",)
    return _as_metric(raw, params, flags)


def fock_element(params: SourceParams, d, g) -> complex:
    """Matrix element <d| rho |g> of the lossy photonic state in the Fock basis."""
    d = tuple(int(x) for x in d)
    g = tuple(int(x) for x in g)
    if len(d) != 8 or len(g) != 8 or any(x < 0 for x in d + g):
        raise ValueError("Fock indices must be 8 nonnegative integers each")
    if sum(d) + sum(g) > MAX_TOTAL_FOCK:
        raise ValueError(f"total photon count {sum(d) + sum(g)} exceeds the cap of {MAX_TOTAL_FOCK}")
    k, a = _variants(params, A_FULL)
    eta = params.eta_vector
    scalar = 1.0
    forms = []
    for mode in range(1, 9):
        dj, gj = d[mode - 1], g[mode - 1]
        scalar *= np.sqrt(eta[mode - 1]) ** (dj + gj) / np.sqrt(factorial(dj) * factorial(gj))
        forms.extend([alpha_form(mode)] * dj)
        forms.extend([beta_conj_form(mode)] * gj)
    return gaussian_prefactor(a, k, k) * wick_moment(a, MomentRequest(tuple(forms), scalar))
