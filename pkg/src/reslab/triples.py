"""Integer enumeration of space-time resonant mode triples.

A triple (m, n, p) is resonant exactly when

    m^2 + n^2 + p^2 - 2mn - 2pm - 2pn - 2m - 2n - 2p - 3 = 0,

a fully symmetric condition equivalent to one of sqrt(m+1), sqrt(n+1),
sqrt(p+1) being the sum of the other two.  Enumeration walks (m, n) pairs and
tests (m+1)(n+1) for perfect squareness, O(max_mode^2); the cubic brute-force
scan survives only as a test oracle.

All arithmetic is exact (Python integers); there is no overflow bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def condition_polynomial(m: int, n: int, p: int) -> int:
    """Exact integer value of the resonance polynomial."""
    return (m * m + n * n + p * p
            - 2 * m * n - 2 * p * m - 2 * p * n
            - 2 * m - 2 * n - 2 * p - 3)


def is_resonant(m: int, n: int, p: int) -> bool:
    """Exact integer test of the resonance condition; no floating point."""
    if min(m, n, p) < 0:
        raise ValueError("mode indices must be >= 0")
    return condition_polynomial(m, n, p) == 0


def is_resonant_massless(m: int, n: int, p: int) -> bool:
    """Same condition for the massless variant (eigenvalues 2k+1).

    Requires (2(p-m-n) - 1)^2 = 4(2m+1)(2n+1) up to permutation, which is
    impossible mod 8; the solution set is provably empty.
    """
    if min(m, n, p) < 0:
        raise ValueError("mode indices must be >= 0")
    for a, b, c in ((m, n, p), (n, p, m), (p, m, n)):
        if (2 * (c - a - b) - 1) ** 2 == 4 * (2 * a + 1) * (2 * b + 1):
            return True
    return False


def _partner(m: int, n: int) -> int | None:
    """p with sqrt(p+1) = sqrt(m+1) + sqrt(n+1), or None if not an integer."""
    prod = (m + 1) * (n + 1)
    r = math.isqrt(prod)
    if r * r != prod:
        return None
    return m + n + 1 + 2 * r


def enumerate_triples(max_mode: int, massless: bool = False) -> list[tuple[int, int, int]]:
    """Sorted triples (m, n, p), m <= n, p in the largest-root position,
    with all indices <= max_mode.

    Every solution of the resonance polynomial is an index permutation of an
    entry of this list.  The massless variant returns [] (empty solution set).
    """
    if max_mode < 0:
        raise ValueError("max_mode must be >= 0")
    if massless:
        return []
    out = []
    for m in range(max_mode + 1):
        for n in range(m, max_mode + 1):
            p = _partner(m, n)
            if p is not None and p <= max_mode:
                out.append((m, n, p))
    out.sort()
    return out


def sqrt_gate_admissible(m: int, n: int, p: int, alpha: int, beta: int) -> bool:
    """Root-characterization gate: the index whose sign opposes the output
    carries the largest root.

    phi = <xi>_p + alpha <eta>_m + beta <xi-eta>_n vanishes on the space
    resonant line iff the root of the (+)-signed group equals the sum of the
    (-)-signed ones:
      (alpha, beta) = (-1, -1): sqrt(p+1) = sqrt(m+1) + sqrt(n+1)
      (alpha, beta) = (-1, +1): sqrt(m+1) = sqrt(n+1) + sqrt(p+1)
      (alpha, beta) = (+1, -1): sqrt(n+1) = sqrt(m+1) + sqrt(p+1)
      (alpha, beta) = (+1, +1): never.
    """
    if (alpha, beta) == (1, 1):
        return False
    if (alpha, beta) == (-1, -1):
        big, rest = p, (m, n)
    elif (alpha, beta) == (-1, 1):
        big, rest = m, (n, p)
    else:
        big, rest = n, (m, p)
    a, b = rest
    return _partner(a, b) == big


def printed_gate_admissible(m: int, n: int, p: int, alpha: int, beta: int) -> bool:
    """Admissibility via the sign-inequality case analysis.

    Disagrees with the root characterization on some mixed-sign tuples
    (reports surface the differences); kept selectable for comparison.
    """
    if (alpha, beta) == (1, 1):
        return False
    ab = alpha * beta
    if ab * p + beta * m < 0 or ab * p + beta * n < 0:
        return False
    return condition_polynomial(m, n, p) == 0 and ab * p + beta * m + alpha * n >= 0


@dataclass(frozen=True)
class ResonantTriple:
    """One admissible interaction feeding output mode p.

    ``alpha``/``beta`` are the phase-class signs of the m- and n-legs; ``lam``
    is the stationary frequency ratio and ``coupling`` the (normalized) triple
    interaction coefficient.
    """

    m: int
    n: int
    p: int
    alpha: int
    beta: int
    lam: float
    coupling: float

    def __post_init__(self):
        if condition_polynomial(self.m, self.n, self.p) != 0:
            raise ValueError("triple does not satisfy the resonance condition")
        if self.m == self.n and self.alpha == -self.beta:
            raise ValueError("degenerate self-interaction is excluded")


def _input_pairs_for_output(p: int, max_mode: int) -> list[tuple[int, int]]:
    """Ordered (m, n) with the resonance polynomial zero for (m, n, p).

    Every solution is an index permutation of a canonically enumerated triple,
    so this walks the O(max_mode^2) enumeration instead of scanning the
    (m, n) grid.
    """
    from itertools import permutations

    pairs = set()
    for triple in enumerate_triples(max_mode):
        if p not in triple:
            continue
        for m, n, q in set(permutations(triple)):
            if q == p:
                pairs.add((m, n))
    return sorted(pairs)


def interactions_for_output(p: int, max_mode: int, gate: str = "sqrt",
                            table=None) -> list[ResonantTriple]:
    """All (m, n, alpha, beta) interactions entering the resonant sum for
    output mode p, in lexicographic (m, n, alpha, beta) order.

    ``gate`` is "sqrt" or "printed".  ``table`` is an optional
    TripleProductTable; without it couplings are computed on the fly.
    """
    from .hermite import triple_product
    from .phase import lambda_coeff

    if p > max_mode:
        raise ValueError("output mode exceeds max_mode")
    admissible = {"sqrt": sqrt_gate_admissible, "printed": printed_gate_admissible}[gate]
    out = []
    for m, n in _input_pairs_for_output(p, max_mode):
        for alpha in (-1, 1):
            for beta in (-1, 1):
                if m == n and alpha == -beta:
                    continue
                if not admissible(m, n, p, alpha, beta):
                    continue
                coupling = (table.get(m, n, p) if table is not None
                            else triple_product(m, n, p))
                out.append(ResonantTriple(
                    m=m, n=n, p=p, alpha=alpha, beta=beta,
                    lam=lambda_coeff(m, n, alpha, beta),
                    coupling=coupling))
    return out


def gate_disagreements(max_mode: int) -> list[tuple[int, int, int, int, int]]:
    """(m, n, p, alpha, beta) tuples on which the two admissibility gates differ."""
    from itertools import permutations

    out = []
    for triple in enumerate_triples(max_mode):
        for m, n, p in sorted(set(permutations(triple))):
            for alpha in (-1, 1):
                for beta in (-1, 1):
                    if m == n and alpha == -beta:
                        continue
                    if sqrt_gate_admissible(m, n, p, alpha, beta) != \
                            printed_gate_admissible(m, n, p, alpha, beta):
                        out.append((m, n, p, alpha, beta))
    return sorted(out)
