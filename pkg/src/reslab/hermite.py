"""Normalized Hermite functions, Gauss-Hermite quadrature, and the triple
interaction tensor.

Conventions
-----------
The stored functions are the L2-normalized Hermite functions

    phi_n = psi_n / ||psi_n||_2,      ||psi_n||_2 = (2^n n! sqrt(pi))^(1/2),

where psi_n(x) = (-1)^n e^(x^2/2) d^n/dx^n e^(-x^2) is the unnormalized
family.  Either convention is recoverable through ``norm_constant``.
phi_n is an eigenfunction of -d^2/dx^2 + x^2 with eigenvalue 2n+1.

Triple products are computed for the normalized family,

    T(m, n, p) = integral phi_m phi_n phi_p dx,

by Gauss-Hermite quadrature after the substitution x = sqrt(2/3) y, which
turns the total Gaussian factor e^(-3x^2/2) into the quadrature weight
e^(-y^2) and makes the rule exact for m + n + p <= 2*order - 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_hermite

from .errors import GridTooCoarseError

# x = _SCALE * y maps the weight e^(-3x^2/2) to e^(-y^2)
_SCALE = math.sqrt(2.0 / 3.0)

# Above this order the raw Gauss-Hermite weights underflow and the
# weight/exp(x^2) recombination loses all digits.
MAX_QUAD_ORDER = 320


def norm_constant(n: int) -> float:
    """||psi_n||_2 = (2^n n! sqrt(pi))^(1/2), computed in log space."""
    return math.exp(0.5 * (n * math.log(2.0) + math.lgamma(n + 1.0) + 0.5 * math.log(math.pi)))


def hermite_eval(n: int, x):
    """Evaluate phi_n(x) by the three-term recurrence with the Gaussian folded in.

    phi_0 = pi^(-1/4) e^(-x^2/2),  phi_1 = sqrt(2) x phi_0,
    phi_{k+1} = sqrt(2/(k+1)) x phi_k - sqrt(k/(k+1)) phi_{k-1}.

    Stable for large n where differentiating e^(-x^2) overflows.
    """
    if n < 0:
        raise ValueError("mode index must be >= 0")
    x = np.asarray(x, dtype=float)
    p0 = math.pi ** -0.25 * np.exp(-0.5 * x * x)
    if n == 0:
        return p0 if p0.ndim else float(p0)
    p1 = math.sqrt(2.0) * x * p0
    for k in range(1, n):
        p0, p1 = p1, math.sqrt(2.0 / (k + 1.0)) * x * p1 - math.sqrt(k / (k + 1.0)) * p0
    return p1 if p1.ndim else float(p1)


def hermite_table(n_max: int, x: np.ndarray) -> np.ndarray:
    """All phi_0..phi_{n_max} on the points x; shape (n_max+1, len(x))."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1, x.size))
    out[0] = math.pi ** -0.25 * np.exp(-0.5 * x * x)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for k in range(1, n_max):
        out[k + 1] = math.sqrt(2.0 / (k + 1.0)) * x * out[k] - math.sqrt(k / (k + 1.0)) * out[k - 1]
    return out


@lru_cache(maxsize=64)
def gauss_hermite(order: int):
    """Nodes, weights and total weights w*exp(x^2) of the order-point rule.

    The rule integrates poly(x) * e^(-x^2) exactly for deg <= 2*order - 1;
    the total weights integrate decaying smooth functions directly.
    """
    if order < 1:
        raise ValueError("quadrature order must be >= 1")
    if order > MAX_QUAD_ORDER:
        raise ValueError(f"quadrature order {order} exceeds {MAX_QUAD_ORDER}")
    nodes, weights = roots_hermite(order)
    if np.any(weights <= 0.0):
        raise ValueError(f"Gauss-Hermite weights underflow at order {order}")
    total = np.exp(np.log(weights) + nodes * nodes)
    return nodes, weights, total


@dataclass(frozen=True)
class HermiteBasis:
    """Immutable bundle of nodes, weights and mode values for the trap direction.

    ``nodes``/``weights`` form the plain Gauss-Hermite rule used for mode
    projections (integrands poly * e^(-x^2)); ``cubic_nodes`` carry the
    sqrt(2/3)-substituted rule that makes triple integrals exact.
    """

    max_mode: int
    quad_order: int
    nodes: np.ndarray
    weights: np.ndarray
    total_weights: np.ndarray
    norm_constants: np.ndarray
    phi: np.ndarray          # (max_mode+1, quad_order) values at nodes
    cubic_nodes: np.ndarray
    cubic_total_weights: np.ndarray   # includes the sqrt(2/3) Jacobian
    cubic_phi: np.ndarray

    @classmethod
    def build(cls, max_mode: int, quad_order: int | None = None) -> "HermiteBasis":
        if max_mode < 0:
            raise ValueError("max_mode must be >= 0")
        if quad_order is None:
            # exact for phi_a phi_b projections and for the quadratic
            # nonlinearity projected onto modes <= max_mode; the floor keeps
            # the node extent wide enough that trap-confined test fields decay
            # below 1e-12 at the boundary
            quad_order = max((3 * max_mode) // 2 + 2, 40)
        nodes, weights, total = gauss_hermite(quad_order)
        ynodes, _, ytotal = gauss_hermite(quad_order)
        cubic_nodes = _SCALE * ynodes
        return cls(
            max_mode=max_mode,
            quad_order=quad_order,
            nodes=nodes,
            weights=weights,
            total_weights=total,
            norm_constants=np.array([norm_constant(n) for n in range(max_mode + 1)]),
            phi=hermite_table(max_mode, nodes),
            cubic_nodes=cubic_nodes,
            cubic_total_weights=_SCALE * ytotal,
            cubic_phi=hermite_table(max_mode, cubic_nodes),
        )

    def project(self, values: np.ndarray) -> np.ndarray:
        """Mode coefficients of samples at ``nodes`` (last axis)."""
        return values @ (self.total_weights * self.phi).T

    def synthesize(self, coeffs: np.ndarray, x: np.ndarray | None = None) -> np.ndarray:
        """Point values sum_p coeffs[..., p] phi_p; defaults to the basis nodes."""
        table = self.phi if x is None else hermite_table(self.max_mode, np.asarray(x, float))
        return coeffs @ table


def eigen_residual(n: int, grid: np.ndarray) -> float:
    """Max-norm residual of (-phi_n'' + x^2 phi_n) - (2n+1) phi_n on the grid.

    The second derivative is the 5-point fourth-order stencil; only interior
    points enter the max.  Raises GridTooCoarseError when the grid violates
    spacing <= 0.1 or extent >= 2 sqrt(2n+2).
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 5:
        raise GridTooCoarseError("need a 1-d grid with at least 5 points")
    h = np.diff(grid)
    if not np.allclose(h, h[0], rtol=1e-12, atol=1e-14):
        raise GridTooCoarseError("grid must be uniform")
    h = float(h[0])
    if h > 0.1:
        raise GridTooCoarseError(f"spacing {h:.3g} > 0.1")
    extent = 2.0 * math.sqrt(2.0 * n + 2.0)
    if grid[-1] < extent or grid[0] > -extent:
        raise GridTooCoarseError(f"grid must cover [-{extent:.3g}, {extent:.3g}]")
    f = hermite_eval(n, grid)
    d2 = (-f[:-4] + 16.0 * f[1:-3] - 30.0 * f[2:-2] + 16.0 * f[3:-1] - f[4:]) / (12.0 * h * h)
    x = grid[2:-2]
    return float(np.max(np.abs(-d2 + x * x * f[2:-2] - (2.0 * n + 1.0) * f[2:-2])))


def triple_quad_order(m: int, n: int, p: int) -> int:
    return (m + n + p) // 2 + 2


def triple_product(m: int, n: int, p: int, quad_order: int | None = None) -> float:
    """integral phi_m phi_n phi_p dx, exact by substituted Gauss-Hermite.

    Zero is returned exactly for odd m+n+p (odd integrand).
    """
    if min(m, n, p) < 0:
        raise ValueError("mode indices must be >= 0")
    if (m + n + p) % 2 == 1:
        return 0.0
    m, n, p = sorted((m, n, p))   # canonical order: permutations agree bitwise
    if quad_order is None:
        quad_order = triple_quad_order(m, n, p)
    ynodes, _, ytotal = gauss_hermite(quad_order)
    x = _SCALE * ynodes
    table = hermite_table(p, x)
    return float(_SCALE * np.sum(ytotal * table[m] * table[n] * table[p]))


class TripleProductTable:
    """Symmetric sparse table of T(m,n,p) for m <= n <= p <= max_mode.

    Entries are computed once in canonical order, so all index permutations
    return bit-identical values.  Odd-parity entries are exactly 0 and not
    stored.
    """

    def __init__(self, max_mode: int, quad_order: int | None = None):
        if quad_order is None:
            quad_order = triple_quad_order(max_mode, max_mode, max_mode)
        self.max_mode = max_mode
        self.built_with = quad_order
        ynodes, _, ytotal = gauss_hermite(quad_order)
        table = hermite_table(max_mode, _SCALE * ynodes)
        entries: dict[tuple[int, int, int], float] = {}
        for p in range(max_mode + 1):
            w = _SCALE * ytotal * table[p]
            # G[m, n] = sum_i w_i phi_m phi_n for m, n <= p
            g = (table[: p + 1] * w) @ table[: p + 1].T
            for mm in range(p + 1):
                for nn in range(mm, p + 1):
                    if (mm + nn + p) % 2 == 0:
                        entries[(mm, nn, p)] = float(g[mm, nn])
        self.entries = entries

    def get(self, m: int, n: int, p: int) -> float:
        if min(m, n, p) < 0:
            raise ValueError("mode indices must be >= 0")
        if max(m, n, p) > self.max_mode:
            raise KeyError(f"mode above table max_mode={self.max_mode}")
        if (m + n + p) % 2 == 1:
            return 0.0
        a, b, c = sorted((m, n, p))
        return self.entries[(a, b, c)]

    def write_csv(self, path) -> None:
        """Columns m,n,p,value with m<=n<=p, lexicographic row order."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("m,n,p,value\n")
            for key in sorted(self.entries):
                fh.write("%d,%d,%d,%.17g\n" % (*key, self.entries[key]))


def _underline(k: int) -> int:
    return max(1, k)


def interaction_bound_ratio(m: int, n: int, p: int, K: int, nu: float, beta: float,
                            table: TripleProductTable | None = None) -> float:
    """|T(m,n,p)| divided by the decay envelope (m^nu / p^beta) (sqrt(mn)/(sqrt(mn)+p-n))^K.

    max(1, .) is applied to every index so the ratio is finite at mode 0.
    Requires m <= n <= p.
    """
    if not (m <= n <= p):
        raise ValueError("requires m <= n <= p")
    if nu <= 0.125:
        raise ValueError("nu must exceed 1/8")
    if not 0.0 <= beta < 1.0 / 24.0:
        raise ValueError("beta must lie in [0, 1/24)")
    value = table.get(m, n, p) if table is not None else triple_product(m, n, p)
    root = math.sqrt(_underline(m) * _underline(n))
    envelope = (_underline(m) ** nu / _underline(p) ** beta) * (root / (root + p - n)) ** K
    return abs(value) / envelope
