"""Fourier-Hermite transforms between physical fields and mode coefficients,
Sobolev-type norms, and binary state snapshots.

Conventions (fixed once, used everywhere)
-----------------------------------------
Fourier transform in the free direction x1:  F(g)(xi) = integral e^(-i x xi) g dx,
inverse carries 1/(2 pi).  The x1 box is [-L/2, L/2) with n equispaced points and
frequencies xi_k = 2 pi k / L, k = -n/2 .. n/2 - 1, stored in FFT order.
The trapped direction x2 is sampled at the Gauss-Hermite nodes of the basis and
projected onto normalized phi_p.

With this convention ||f||^2_{L2(R^2)} = (2 pi)^(-1) sum_p ||f~_p||^2_{L2(dxi)}.
``sobolev_weighted_norm`` is the plain frequency-side norm (no 1/(2 pi)); the
composite norms include the (2 pi)^(-1/2) physical normalization.

The <x1>^kappa weights are realized as kappa frequency derivatives taken by
centered finite differences on the periodic frequency grid; the physical-space
multiplication route is kept as a cross-check (``xi_derivative_physical``).
"""

from __future__ import annotations

import math
import struct
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfinementWarning, InterpolationRangeError
from .hermite import HermiteBasis

MAGIC = b"FHSTATE1"


@dataclass(frozen=True)
class Grid:
    """Discretization: periodic x1 box and shared Hermite basis for x2."""

    n_x1: int
    length_x1: float
    basis: HermiteBasis

    def __post_init__(self):
        if self.n_x1 < 16 or (self.n_x1 & (self.n_x1 - 1)) != 0:
            raise ValueError("n_x1 must be a power of two >= 16")
        if self.length_x1 <= 0:
            raise ValueError("length_x1 must be positive")

    @property
    def dx(self) -> float:
        return self.length_x1 / self.n_x1

    @property
    def dxi(self) -> float:
        return 2.0 * math.pi / self.length_x1

    @property
    def x1(self) -> np.ndarray:
        return -0.5 * self.length_x1 + self.dx * np.arange(self.n_x1)

    @property
    def xi(self) -> np.ndarray:
        """Frequencies in FFT storage order."""
        return 2.0 * math.pi * np.fft.fftfreq(self.n_x1, d=self.dx)

    @property
    def xi_max(self) -> float:
        return math.pi * self.n_x1 / self.length_x1

    @property
    def alt(self) -> np.ndarray:
        """(-1)^k phases translating the FFT to the centered-box transform."""
        k = np.arange(self.n_x1)
        return np.where(k % 2 == 0, 1.0, -1.0)


@dataclass
class SpectralState:
    """Profile coefficients f~_{sigma,p}(xi_k); component 0 is "+", 1 is "-".

    For a real solution u with real du/dt the components are paired by
    f~_{-,p}(xi) = conj(f~_{+,p}(-xi)).
    """

    time: float
    coeffs: np.ndarray  # complex, shape (2, P, n_x1)

    @property
    def n_modes(self) -> int:
        return self.coeffs.shape[1]

    def copy(self) -> "SpectralState":
        return SpectralState(self.time, self.coeffs.copy())


def reality_defect(state: SpectralState) -> float:
    """Max deviation from f~_{-,p}(xi) = conj(f~_{+,p}(-xi))."""
    plus, minus = state.coeffs
    mirrored = np.conj(plus[:, _reflect_index(plus.shape[1])])
    return float(np.max(np.abs(minus - mirrored)))


def enforce_reality(state: SpectralState) -> None:
    """Overwrite the "-" component with the conjugate mirror of "+"."""
    plus = state.coeffs[0]
    state.coeffs[1] = np.conj(plus[:, _reflect_index(plus.shape[1])])


def _reflect_index(n: int) -> np.ndarray:
    """Index map k -> -k on the FFT-ordered frequency grid."""
    return (-np.arange(n)) % n


def forward_x1(grid: Grid, field: np.ndarray) -> np.ndarray:
    """DFT approximation of integral e^(-i x xi) f(x) dx along axis 0."""
    return grid.dx * grid.alt[:, None] * np.fft.fft(field, axis=0) \
        if field.ndim > 1 else grid.dx * grid.alt * np.fft.fft(field)


def inverse_x1(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    """Inverse of ``forward_x1`` (carries the 1/(2 pi), i.e. 1/L discretely)."""
    if coeffs.ndim > 1:
        return (grid.n_x1 / grid.length_x1) * np.fft.ifft(grid.alt[:, None] * coeffs, axis=0)
    return (grid.n_x1 / grid.length_x1) * np.fft.ifft(grid.alt * coeffs)


def forward(grid: Grid, field: np.ndarray, n_modes: int | None = None,
            confinement_tol: float = 1e-12) -> np.ndarray:
    """Field sampled on (x1 grid) x (Hermite nodes) -> coefficients (P, n_x1).

    Warns with ConfinementWarning when the field has not decayed below
    ``confinement_tol`` (relative to its peak) at the outermost x2 nodes.
    """
    basis = grid.basis
    field = np.asarray(field)
    if field.shape != (grid.n_x1, basis.quad_order):
        raise ValueError(f"field must have shape ({grid.n_x1}, {basis.quad_order})")
    peak = np.max(np.abs(field))
    if peak > 0:
        edge = max(np.max(np.abs(field[:, 0])), np.max(np.abs(field[:, -1])))
        if edge > confinement_tol * peak:
            warnings.warn(
                f"field at x2 quadrature boundary is {edge / peak:.2e} of peak",
                ConfinementWarning,
            )
    if n_modes is None:
        n_modes = basis.max_mode + 1
    hat = forward_x1(grid, field)                      # (n_x1, Q)
    weighted = basis.total_weights * basis.phi[:n_modes]   # (P, Q)
    return weighted @ hat.T                            # (P, n_x1)


def inverse(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    """Coefficients (P, n_x1) -> field on (x1 grid) x (Hermite nodes)."""
    coeffs = np.asarray(coeffs)
    n_modes = coeffs.shape[0]
    phys_x1 = inverse_x1(grid, coeffs.T)               # (n_x1, P)
    return phys_x1 @ grid.basis.phi[:n_modes]          # (n_x1, Q)


def xi_derivative(coeffs: np.ndarray, dxi: float, order: int = 1) -> np.ndarray:
    """Centered finite difference d/dxi on the FFT-ordered frequency axis.

    The grid is treated as periodic after reordering to monotone xi; for
    trap-confined, band-limited data the wrap-around rows are negligible.
    """
    out = np.fft.fftshift(np.asarray(coeffs, dtype=complex), axes=-1)
    for _ in range(order):
        out = (np.roll(out, -1, axis=-1) - np.roll(out, 1, axis=-1)) / (2.0 * dxi)
    return np.fft.ifftshift(out, axes=-1)


def xi_derivative_physical(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    """Cross-check route: d/dxi f~ = transform of (-i x) f, exact band-limited."""
    phys = inverse_x1(grid, np.moveaxis(np.asarray(coeffs, complex), -1, 0))
    phys *= (-1j * grid.x1).reshape((-1,) + (1,) * (phys.ndim - 1))
    return np.moveaxis(forward_x1(grid, phys), 0, -1)


def sobolev_weighted_norm(f_p: np.ndarray, grid: Grid, N: float, kappa: int) -> float:
    """|| <xi>^N f~ ||-type norm of one mode with kappa frequency derivatives.

    norm^2 = sum_{j<=kappa} binom(kappa, j) || <xi>^N d^j f~ ||^2_{L2(dxi)}.
    Plain frequency-side L2 for N = kappa = 0 (no Parseval factor).
    """
    if N < 0 or kappa not in (0, 1, 2):
        raise ValueError("need N >= 0 and kappa in {0, 1, 2}")
    w = (1.0 + grid.xi ** 2) ** N   # <xi>^(2N)
    f_p = np.asarray(f_p, dtype=complex)
    total = np.sum(w * np.abs(f_p) ** 2)
    d = f_p
    for j in range(1, kappa + 1):
        d = xi_derivative(d, grid.dxi)
        total += math.comb(kappa, j) * np.sum(w * np.abs(d) ** 2)
    return float(math.sqrt(total * grid.dxi))


def l2_norm_physical(grid: Grid, coeffs: np.ndarray) -> float:
    """||f||_{L2(R^2)} from coefficients via the Parseval identity."""
    return math.sqrt(np.sum(np.abs(coeffs) ** 2) * grid.dxi / (2.0 * math.pi))


@dataclass(frozen=True)
class CompositeNorms:
    tilde_HN: float
    HM_HN: float
    B_t: float
    S_MN_t: float


def _eigenvalues(n_modes: int) -> np.ndarray:
    return 2.0 * np.arange(n_modes) + 2.0


def composite_norms(state: SpectralState, grid: Grid, M: float, N: float,
                    t: float | None = None) -> CompositeNorms:
    """All norms of Definition-style spaces for a two-component state.

    tilde_HN uses the full 2D symbol (xi^2 + 2p + 2)^N; HM_HN uses eigenvalue
    multipliers (2p+2)^M on per-mode H^N norms; B_t = <t>^(-1/2) times the
    H^(3/2)(<x1>) norm; S_MN_t = tilde_HN + <t>^(-1/2) * (Hermite-weighted
    H^(3/2)(<x1>)).  Vector norms are the sum over the two components.
    """
    if t is None:
        t = state.time
    xi2 = grid.xi ** 2
    lam = _eigenvalues(state.n_modes)
    w_full = (xi2[None, :] + lam[:, None]) ** (2.0 * N)
    w_xi_N = (1.0 + xi2) ** N
    w_xi_32 = (1.0 + xi2) ** 1.5
    bracket_t = math.sqrt(1.0 + t * t)
    scale = grid.dxi / (2.0 * math.pi)

    tilde = hmhn = b_t = s = 0.0
    for comp in state.coeffs:
        a2 = np.abs(comp) ** 2
        tilde_c = math.sqrt(np.sum(w_full * a2) * scale)
        hmhn_c = math.sqrt(np.sum(lam ** (2.0 * M) * np.sum(w_xi_N * a2, axis=1)) * scale)
        d1 = np.abs(xi_derivative(comp, grid.dxi)) ** 2
        mode32 = np.sum(w_xi_32 * (a2 + d1), axis=1)   # per-mode H^(3/2)(<x>)^2
        b_c = math.sqrt(np.sum(mode32) * scale) / math.sqrt(bracket_t)
        bm_c = math.sqrt(np.sum(lam ** (2.0 * M) * mode32) * scale) / math.sqrt(bracket_t)
        tilde += tilde_c
        hmhn += hmhn_c
        b_t += b_c
        s += tilde_c + bm_c
    return CompositeNorms(tilde_HN=tilde, HM_HN=hmhn, B_t=b_t, S_MN_t=s)


def hm_l2_norm(coeffs: np.ndarray, grid: Grid, M0: float) -> float:
    """Hermite-weighted L2 norm sum_sigma ||(2p+2)^M0 f_p||_{l2 L2}, physical scale."""
    coeffs = np.atleast_3d(coeffs)
    lam = _eigenvalues(coeffs.shape[1]) ** (2.0 * M0)
    total = 0.0
    for comp in coeffs:
        total += math.sqrt(np.sum(lam[:, None] * np.abs(comp) ** 2)
                           * grid.dxi / (2.0 * math.pi))
    return float(total)


def interp_matrix(grid: Grid, targets: np.ndarray) -> np.ndarray:
    """Matrix evaluating the band-limited interpolant of f~ at ``targets``.

    The interpolant is the unique trigonometric polynomial through the grid
    values: f~(xi*) = dx * sum_j f_j e^(-i x_j xi*), with f_j recovered by the
    inverse transform.  Raises InterpolationRangeError outside [-xi_max, xi_max].
    """
    targets = np.asarray(targets, dtype=float)
    bound = grid.xi_max * (1.0 + 1e-12)
    if np.any(np.abs(targets) > bound):
        raise InterpolationRangeError(
            f"target frequency beyond window +-{grid.xi_max:.6g}")
    expo = np.exp(-1j * np.outer(targets, grid.x1))           # (T, n)
    n = grid.n_x1
    inv = np.fft.ifft(np.diag(grid.alt + 0j), axis=0) * (n / grid.length_x1)  # coeffs -> samples
    return grid.dx * (expo @ inv)


def interp_eval(grid: Grid, coeffs: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Band-limited evaluation of coefficient rows at arbitrary frequencies."""
    return np.asarray(coeffs, complex) @ interp_matrix(grid, targets).T


def save_state(path, grid: Grid, state: SpectralState) -> None:
    """Little-endian FHSTATE1 snapshot: header then (re, im) float64 pairs in
    (component, mode, frequency) order."""
    coeffs = np.ascontiguousarray(state.coeffs, dtype=complex)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<IIdd", coeffs.shape[1], grid.n_x1,
                             grid.length_x1, state.time))
        inter = np.empty(coeffs.size * 2)
        inter[0::2] = coeffs.real.ravel()
        inter[1::2] = coeffs.imag.ravel()
        fh.write(inter.astype("<f8").tobytes())


def load_state(path, grid: Grid | None = None) -> tuple[SpectralState, int, float]:
    """Read an FHSTATE1 snapshot; returns (state, n_x1, length_x1).

    When ``grid`` is given its geometry is checked against the header.
    """
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != MAGIC:
            raise ValueError(f"bad magic {magic!r}")
        n_modes, n_x1, length_x1, time = struct.unpack("<IIdd", fh.read(24))
        raw = np.frombuffer(fh.read(), dtype="<f8")
    if raw.size != 2 * 2 * n_modes * n_x1:
        raise ValueError("truncated FHSTATE1 payload")
    coeffs = (raw[0::2] + 1j * raw[1::2]).reshape(2, n_modes, n_x1)
    if grid is not None and (n_x1 != grid.n_x1
                             or abs(length_x1 - grid.length_x1) > 1e-12):
        raise ValueError("snapshot geometry does not match grid")
    return SpectralState(time, coeffs.copy()), n_x1, length_x1
