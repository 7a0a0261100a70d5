"""Oscillatory integrals: direct quadrature of int e^(i t psi(x)) F(x) chi(x) dx,
the stationary-phase leading term with the Fresnel-normalized constant, the
non-stationary upper bound, and the bilinear Duhamel frequency convolution.

Quadrature is composite Gauss-Legendre with the panel width tied to
1/(t max|psi'|), chosen over FFT methods because the phases here are not
polynomial.  Optional breakpoints get geometrically graded panels so mildly
singular amplitudes (|x - a|^gamma, gamma > -1) integrate accurately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import DegenerateStationaryPoint, InvalidFloor, ResolutionError
from .phase import PhaseParams, dphase_deta, phase
from .transform import Grid, interp_matrix

# Fresnel normalization of the stationary-phase constant:
# int e^(i t x^2) dx = sqrt(pi/t) e^(i pi/4).
C_SP = math.sqrt(2.0 * math.pi)

_GL_ORDER = 16
_MAX_NODES = 20_000_000
_CHUNK = 1 << 18


@dataclass(frozen=True)
class SmoothBump:
    """C-infinity cutoff supported on [center - radius, center + radius].

    chi(x) = exp(1 - 1/(1 - u^2)), u = (x - center)/radius; chi(center) = 1
    and max |chi'| is about 2.1/radius.  Only the support and the 1/radius
    slope scale matter to the estimates; the exact shape is a free choice.
    """

    center: float
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("cutoff radius must be positive")

    def __call__(self, x):
        u = (np.asarray(x, dtype=float) - self.center) / self.radius
        out = np.zeros_like(u)
        inside = np.abs(u) < 1.0
        with np.errstate(divide="ignore", over="ignore"):
            out[inside] = np.exp(1.0 - 1.0 / (1.0 - u[inside] ** 2))
        return out if out.ndim else float(out)

    @property
    def support(self) -> tuple[float, float]:
        return (self.center - self.radius, self.center + self.radius)


@dataclass(frozen=True)
class PhaseCurve:
    """Phase psi with first derivative (second optional; finite differences
    otherwise)."""

    psi: Callable
    dpsi: Callable
    d2psi: Callable | None = None

    def second(self, x: float, h: float = 1e-5) -> float:
        if self.d2psi is not None:
            return float(self.d2psi(x))
        return float((self.dpsi(x + h) - self.dpsi(x - h)) / (2.0 * h))


@dataclass(frozen=True)
class OscIntegralSpec:
    """Everything defining I = int e^(i t psi) F chi dx.

    With ``cutoff`` None the integral runs over ``window`` with chi = 1
    (used when closed-form comparisons need chi identically one where the
    amplitude lives).
    """

    phase: PhaseCurve
    amplitude: Callable
    time: float
    cutoff: SmoothBump | None = None
    window: tuple[float, float] | None = None
    amplitude_deriv: Callable | None = None

    def domain(self) -> tuple[float, float]:
        if self.cutoff is not None:
            return self.cutoff.support
        if self.window is None:
            raise ValueError("spec needs a cutoff or an explicit window")
        return self.window

    def chi(self, x):
        if self.cutoff is None:
            return np.ones_like(np.asarray(x, dtype=float))
        return self.cutoff(x)


def _panel_edges(a: float, b: float, t: float, dpsi_max: float,
                 breakpoints: tuple[float, ...]) -> np.ndarray:
    span = b - a
    # <= 8 radians of phase per 16-point panel keeps the rule machine-exact
    width = min(span / 8.0, 8.0 / (abs(t) * dpsi_max + 1e-300), 1.0)
    n_panels = max(8, math.ceil(span / width))
    if n_panels * _GL_ORDER > _MAX_NODES:
        raise ResolutionError(
            f"{n_panels} panels needed on [{a:.3g}, {b:.3g}] exceeds node budget")
    edges = np.linspace(a, b, n_panels + 1)
    for c in breakpoints:
        if not a < c < b:
            continue
        edges = edges[np.abs(edges - c) > 1e-15]
        local = np.concatenate([c - width * 0.5 ** np.arange(48),
                                [c], c + width * 0.5 ** np.arange(48)])
        edges = np.concatenate([edges, local[(local > a) & (local < b)]])
    return np.unique(edges)


def quadrature_oscillatory(spec: OscIntegralSpec, resolution: float = 1.0,
                           breakpoints: tuple[float, ...] = ()) -> complex:
    """Composite Gauss-Legendre value of the oscillatory integral.

    ``resolution`` > 1 refines every panel by that factor (used by the
    stability tests that double the resolution).  Raises ResolutionError when
    the oscillation cannot be resolved within the node budget.
    """
    a, b = spec.domain()
    t = spec.time
    sample = np.linspace(a, b, 2049)
    dpsi_max = float(np.max(np.abs(spec.phase.dpsi(sample))))
    edges = _panel_edges(a, b, t, dpsi_max, breakpoints)
    if resolution != 1.0:
        extra = np.ceil(resolution).astype(int)
        fine = [np.linspace(edges[i], edges[i + 1], extra + 1)[:-1]
                for i in range(edges.size - 1)]
        edges = np.unique(np.concatenate(fine + [edges[-1:]]))
    nodes, weights = leggauss(_GL_ORDER)
    total = 0.0 + 0.0j
    los, his = edges[:-1], edges[1:]
    step = max(1, _CHUNK // _GL_ORDER)
    for start in range(0, los.size, step):
        lo = los[start:start + step]
        hi = his[start:start + step]
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        x = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
        w = (half[:, None] * weights[None, :]).ravel()
        vals = np.exp(1j * t * np.asarray(spec.phase.psi(x), dtype=float)) \
            * np.asarray(spec.amplitude(x), dtype=complex) * spec.chi(x)
        total += np.sum(w * vals)
    return complex(total)


def stationary_phase_leading(spec: OscIntegralSpec, x0: float,
                             psi_dd_at_x0: float | None = None) -> complex:
    """Leading term sqrt(2 pi/(t |psi''(x0)|)) e^(i pi/4 sgn psi'') e^(i t psi(x0))
    chi(x0) F(x0).

    The constant is fixed by the Fresnel normalization and validated against
    the exact Fresnel-Gaussian integral in the tests.
    """
    if spec.time <= 0:
        raise ValueError("stationary-phase leading term needs t > 0")
    dpsi0 = float(spec.phase.dpsi(x0))
    scale = 1.0 + abs(float(spec.phase.dpsi(x0 + 1.0)) - dpsi0)
    if abs(dpsi0) > 1e-6 * scale:
        raise ValueError(f"psi'({x0}) = {dpsi0:.3g} is not a stationary point")
    dd = psi_dd_at_x0 if psi_dd_at_x0 is not None else spec.phase.second(x0)
    if abs(dd) < 1e-12:
        raise DegenerateStationaryPoint(f"|psi''({x0})| = {abs(dd):.3g}")
    amp = complex(np.asarray(spec.amplitude(x0), dtype=complex))
    chi0 = float(spec.chi(x0))
    return (math.sqrt(2.0 * math.pi / (spec.time * abs(dd)))
            * np.exp(1j * (math.pi / 4.0) * np.sign(dd))
            * np.exp(1j * spec.time * float(spec.phase.psi(x0)))
            * chi0 * amp)


def nonstationary_bound(spec: OscIntegralSpec, gradient_floor: float) -> float:
    """Upper bound sqrt(rho)/(t m) (||F||_2 + ||F'||_2) valid when |psi'| >= m
    on the cutoff support."""
    if gradient_floor <= 0:
        raise InvalidFloor(f"gradient floor {gradient_floor} must be positive")
    a, b = spec.domain()
    rho = 0.5 * (b - a) if spec.cutoff is None else spec.cutoff.radius
    nodes, weights = leggauss(64)
    x = 0.5 * (a + b) + 0.5 * (b - a) * nodes
    w = 0.5 * (b - a) * weights
    f = np.asarray(spec.amplitude(x), dtype=complex)
    if spec.amplitude_deriv is not None:
        fp = np.asarray(spec.amplitude_deriv(x), dtype=complex)
    else:
        h = 1e-6 * (1.0 + abs(b - a))
        fp = (np.asarray(spec.amplitude(x + h), complex)
              - np.asarray(spec.amplitude(x - h), complex)) / (2.0 * h)
    norm_f = math.sqrt(float(np.sum(w * np.abs(f) ** 2)))
    norm_fp = math.sqrt(float(np.sum(w * np.abs(fp) ** 2)))
    return math.sqrt(rho) / (spec.time * gradient_floor) * (norm_f + norm_fp)


def fresnel_gaussian_spec(t: float, kink: bool = False) -> OscIntegralSpec:
    """The Gaussian test family: psi = x^2, F = e^(-x^2) (optionally times the
    borderline factor 1 + |x|^(1/2), whose stationary-point singularity makes
    the remainder attain the t^(-3/4) scale); window [-8, 8]."""
    if kink:
        amp = lambda x: np.exp(-x * x) * (1.0 + np.sqrt(np.abs(x)))
    else:
        amp = lambda x: np.exp(-x * x)
    return OscIntegralSpec(
        phase=PhaseCurve(psi=lambda x: x * x, dpsi=lambda x: 2.0 * x,
                         d2psi=lambda x: 2.0 + 0.0 * np.asarray(x, float)),
        amplitude=amp, time=t, window=(-8.0, 8.0))


def stat_phase_decay_table(times=(100.0, 316.23, 1000.0, 3162.3, 10000.0),
                           threads: int = 0) -> dict:
    """Quadrature vs leading term across t in [1e2, 1e4] for the kinked
    Gaussian family; returns rows and the fitted exponent of |quad - leading|."""
    from .parallel import thread_map

    def one(t: float):
        spec = fresnel_gaussian_spec(t, kink=True)
        quad = quadrature_oscillatory(spec, breakpoints=(0.0,))
        lead = stationary_phase_leading(spec, 0.0)
        return {"t": t, "quadrature_re": quad.real, "quadrature_im": quad.imag,
                "leading_re": lead.real, "leading_im": lead.imag,
                "abs_diff": abs(quad - lead)}

    rows = thread_map(one, list(times), threads)
    logs = np.log([r["abs_diff"] for r in rows])
    exponent = float(np.polyfit(np.log(list(times)), logs, 1)[0])
    return {"rows": rows, "fitted_exponent": exponent}


def duhamel_phase(params: PhaseParams, xi: float, sign: int) -> PhaseCurve:
    """psi(eta) = -sign * phi(xi, eta): the component-(+) integrand carries
    e^(-i s phi), the component-(-) one e^(+i s phi)."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 (top) or -1 (bottom)")
    return PhaseCurve(
        psi=lambda eta: -sign * phase(params, xi, eta),
        dpsi=lambda eta: -sign * dphase_deta(params, xi, eta),
    )


def duhamel_kernel(fm: np.ndarray, fn: np.ndarray, params: PhaseParams, s: float,
                   sign: int, grid: Grid, xi_out: np.ndarray | None = None,
                   resolution: float = 1.0) -> np.ndarray:
    """Direct quadrature, for each output frequency xi, of

        int e^(-i sign s phi(xi, eta)) fm~(eta)/<eta>_m fn~(xi-eta)/<xi-eta>_n deta

    with fm~, fn~ band-limited interpolants of the coefficient arrays.  The
    prefactors (alpha beta, coupling, -1/(8 pi)) are the caller's business.
    This is the slow reference for the solver nonlinearity and the calibration
    target of the resonant kernel.
    """
    if xi_out is None:
        xi_out = grid.xi
    xi_out = np.atleast_1d(np.asarray(xi_out, dtype=float))
    W = grid.xi_max
    # resolve both the s-oscillation (|d_eta phi| <= 2) and the x1-content of
    # the interpolants (|x| <= L/2)
    density = 2.0 * abs(s) + grid.length_x1 / 2.0 + 4.0
    n_nodes = int(min(max(512, math.ceil(2.0 * W * density * resolution)),
                      _MAX_NODES))
    if n_nodes >= _MAX_NODES:
        raise ResolutionError(f"duhamel kernel needs more than {_MAX_NODES} nodes")
    n_panels = max(1, n_nodes // _GL_ORDER)
    edges = np.linspace(-W, W, n_panels + 1)
    nodes, weights = leggauss(_GL_ORDER)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    eta = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    fm_eta = (interp_matrix(grid, eta) @ np.asarray(fm, complex)) \
        / np.sqrt(eta ** 2 + 2.0 * params.m + 2.0)
    out = np.empty(xi_out.size, dtype=complex)
    for i, xi in enumerate(xi_out):
        shifted = xi - eta
        # the convolution partner may leave the window; fold it in periodically
        # (band-limited interpolants are L-periodic in x, 2W-periodic in xi)
        folded = (shifted + W) % (2.0 * W) - W
        fn_shift = (interp_matrix(grid, folded) @ np.asarray(fn, complex)) \
            / np.sqrt(shifted ** 2 + 2.0 * params.n + 2.0)
        osc = np.exp(-1j * sign * s * phase(params, xi, eta))
        out[i] = np.sum(w * osc * fm_eta * fn_shift)
    return out
