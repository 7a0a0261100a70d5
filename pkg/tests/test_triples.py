import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_force_triples
from reslab.triples import (ResonantTriple, condition_polynomial,
                            enumerate_triples, gate_disagreements, is_resonant,
                            is_resonant_massless, interactions_for_output,
                            printed_gate_admissible, sqrt_gate_admissible)


def test_is_resonant_examples():
    assert is_resonant(0, 0, 3)
    assert is_resonant(0, 3, 8)
    assert not is_resonant(0, 0, 1)


def test_is_resonant_rejects_negative():
    with pytest.raises(ValueError):
        is_resonant(-1, 0, 3)


def test_is_resonant_arbitrary_precision():
    # Python integers are unbounded: there is no overflow cutoff
    m = 10 ** 40 - 1
    n = 4 * 10 ** 40 - 1   # (m+1)(n+1) = 4e80 = (2e40)^2
    p = m + n + 1 + 2 * (2 * 10 ** 40)
    assert is_resonant(m, n, p)


def test_enumerate_small_ranges():
    assert enumerate_triples(3) == [(0, 0, 3)]
    assert enumerate_triples(8) == [(0, 0, 3), (0, 3, 8), (1, 1, 7)]
    assert enumerate_triples(2) == []


@pytest.mark.parametrize("max_mode", [10, 50])
def test_enumerate_equals_brute_force(max_mode):
    assert set(enumerate_triples(max_mode)) == brute_force_triples(max_mode)


def test_sqrt_identity_for_enumerated():
    for m, n, p in enumerate_triples(200):
        assert abs(math.sqrt(p + 1) - math.sqrt(m + 1) - math.sqrt(n + 1)) <= 1e-12


def test_every_resonant_triple_has_odd_parity():
    # the polynomial reduces mod 2 to m + n + p + 1, so solutions are odd;
    # combined with the parity of the Hermite triple integral this zeroes
    # every resonant coupling
    for m, n, p in enumerate_triples(200):
        assert (m + n + p) % 2 == 1


def test_symmetry_closure():
    for m, n, p in enumerate_triples(60):
        for perm in ((m, n, p), (n, p, m), (p, m, n), (p, n, m), (n, m, p), (m, p, n)):
            assert condition_polynomial(*perm) == 0
        assert m <= n <= p


def test_density_monotone_and_oracle_count():
    counts = [len(enumerate_triples(k)) for k in (10, 50, 100, 200)]
    assert counts == sorted(counts)
    assert counts[0] < counts[-1]
    assert counts[1] == len(brute_force_triples(50))


def test_interactions_for_output_p3():
    out = interactions_for_output(3, 8, gate="sqrt")
    keys = {(t.m, t.n, t.alpha, t.beta) for t in out}
    assert (0, 0, -1, -1) in keys
    tr = [t for t in out if (t.m, t.n) == (0, 0)][0]
    assert tr.lam == pytest.approx(0.5, rel=1e-15)
    out_printed = interactions_for_output(3, 8, gate="printed")
    assert (0, 0, -1, -1) in {(t.m, t.n, t.alpha, t.beta) for t in out_printed}


def test_interactions_for_output_p7():
    out = interactions_for_output(7, 7, gate="sqrt")
    tr = [t for t in out if (t.m, t.n) == (1, 1)]
    assert len(tr) == 1 and tr[0].lam == pytest.approx(0.5, rel=1e-15)


def test_interactions_output_p0_matches_brute_force():
    out = interactions_for_output(0, 50, gate="sqrt")
    # brute-force classification: (m, n) with some permutation of (m, n, 0)
    # resonant and the root of the opposite-signed index dominant
    expected = set()
    for m in range(51):
        for n in range(51):
            if condition_polynomial(m, n, 0) != 0:
                continue
            for a, b in ((-1, -1), (-1, 1), (1, -1)):
                if m == n and a == -b:
                    continue
                big = {(-1, -1): 0, (-1, 1): m, (1, -1): n}[(a, b)]
                rest = {(-1, -1): (m, n), (-1, 1): (n, 0), (1, -1): (m, 0)}[(a, b)]
                if abs(math.sqrt(big + 1) - math.sqrt(rest[0] + 1)
                       - math.sqrt(rest[1] + 1)) < 1e-9:
                    expected.add((m, n, a, b))
    assert {(t.m, t.n, t.alpha, t.beta) for t in out} == expected
    # mode 0 is never the largest root: only mixed-sign branches feed it
    assert all((t.alpha, t.beta) != (-1, -1) for t in out)


def test_interactions_sorted_lexicographically():
    out = interactions_for_output(0, 50, gate="sqrt")
    keys = [(t.m, t.n, t.alpha, t.beta) for t in out]
    assert keys == sorted(keys)


def test_gate_disagreements_nonempty_and_flagged():
    dis = gate_disagreements(10)
    assert (8, 0, 3, -1, 1) in dis
    # the disagreeing entry is sqrt-admissible but rejected as printed
    assert sqrt_gate_admissible(8, 0, 3, -1, 1)
    assert not printed_gate_admissible(8, 0, 3, -1, 1)


def test_gates_agree_on_canonical_branch():
    for m, n, p in enumerate_triples(30):
        assert sqrt_gate_admissible(m, n, p, -1, -1)
        assert printed_gate_admissible(m, n, p, -1, -1)
        assert not sqrt_gate_admissible(m, n, p, 1, 1)
        assert not printed_gate_admissible(m, n, p, 1, 1)


def test_massless_variant_empty():
    assert enumerate_triples(50, massless=True) == []
    for m in range(20):
        for n in range(20):
            for p in range(20):
                assert not is_resonant_massless(m, n, p)


def test_resonant_triple_validation():
    with pytest.raises(ValueError):
        ResonantTriple(0, 0, 1, -1, -1, 0.5, 0.0)   # not resonant
    with pytest.raises(ValueError):
        ResonantTriple(1, 1, 7, -1, 1, 0.5, 0.0)    # degenerate signs


def _sqrt_characterization(m, n, p):
    # some index's root equals the sum of the other two
    for big, a, b in ((p, m, n), (m, n, p), (n, m, p)):
        prod = (a + 1) * (b + 1)
        r = math.isqrt(prod)
        if r * r == prod and big == a + b + 1 + 2 * r:
            return True
    return False


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 400), st.integers(0, 400), st.integers(0, 400))
def test_polynomial_equals_sqrt_characterization(m, n, p):
    assert is_resonant(m, n, p) == _sqrt_characterization(m, n, p)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 500), st.integers(0, 500))
def test_partner_closed_form_property(m, n):
    prod = (m + 1) * (n + 1)
    r = math.isqrt(prod)
    if r * r == prod:
        assert is_resonant(m, n, m + n + 1 + 2 * r)
