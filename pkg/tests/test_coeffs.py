import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from collatz_flows import (
    BudgetExceeded,
    CollatzParams,
    IdentityViolation,
    build_coeff_table,
    coeff_sums,
    coeff_tables,
    iterate,
    parity_vector,
    verify_mod_decomposition,
)
from collatz_flows.coeffs import CoeffTable, expected_sum_a, expected_sum_b

from strategies import collatz_params


def solved_table(p, k):
    """a, b per residue from two representatives, with no recurrence involved."""
    size = 1 << k
    a, b = [], []
    for i in range(size):
        n1 = i or size
        n2 = n1 + size
        ai = iterate(p, n2, k) - iterate(p, n1, k)
        a.append(ai)
        b.append(size * iterate(p, n1, k) - ai * n1)
    return a, b


# -- oracles --------------------------------------------------------------------


def test_square_table_collatz():
    t = build_coeff_table(CollatzParams(3, 1), 2)
    assert t.to_lists() == ([1, 3, 3, 9], [0, 1, 2, 5])
    assert coeff_sums(t).sum_a == 16 and coeff_sums(t).sum_b == 8


def test_level_one():
    assert build_coeff_table(CollatzParams(3, 1), 1).to_lists() == ([1, 3], [0, 1])


@pytest.mark.parametrize(
    "alpha,beta,k,sum_a,sum_b",
    [(5, 3, 3, 216, 228), (3, 1, 2, 16, 8), (1, 1, 1, 2, 1), (5, 1, 4, 1296, 520)],
)
def test_sum_examples(alpha, beta, k, sum_a, sum_b):
    p = CollatzParams(alpha, beta)
    sums = coeff_sums(build_coeff_table(p, k))
    assert (sums.sum_a, sums.sum_b) == (sum_a, sum_b)
    assert solved_table(p, k)[0] == build_coeff_table(p, k).to_lists()[0]


def test_evaluate_examples():
    t = build_coeff_table(CollatzParams(3, 1), 2)
    assert 4 * t.evaluate(7) == 68 == 9 * 7 + 5
    assert t.evaluate(4) == 1


def test_nollatz_exhaustive():
    t = build_coeff_table(CollatzParams(1, 1), 3)
    res = verify_mod_decomposition(t, sample_count=0)
    assert res and res.checked == 32


def test_table_matches_solved_oracle(params):
    for k in range(1, 9):
        assert build_coeff_table(params, k).to_lists() == solved_table(params, k)


def test_budget():
    with pytest.raises(BudgetExceeded):
        build_coeff_table(CollatzParams(3, 1), 10, max_k=8)


def test_big_entries_exact():
    t = build_coeff_table(CollatzParams(7, 3), 20)
    a, _ = t.to_lists()
    assert max(a) == 7**20 > 2**53
    assert coeff_sums(t).sum_a == 8**20


def test_coeff_sums_detects_corruption():
    t = build_coeff_table(CollatzParams(3, 1), 3)
    a = t.a.copy()
    a[1] += 2
    with pytest.raises(IdentityViolation):
        coeff_sums(CoeffTable(t.params, t.k, a, t.b))
    assert not verify_mod_decomposition(CoeffTable(t.params, t.k, a, t.b))


def test_beta_changes_residue_rows():
    """Rows depend on beta mod 2^k even though the a-multiset does not."""
    t1 = build_coeff_table(CollatzParams(3, 1), 3).to_lists()[0]
    t5 = build_coeff_table(CollatzParams(3, 5), 3).to_lists()[0]
    assert t1[1] == 9 and t5[1] == 3
    assert sorted(t1) == sorted(t5)


# -- properties -----------------------------------------------------------------


@given(collatz_params(), st.integers(1, 14))
def test_sums_closed_form(p, k):
    t = build_coeff_table(p, k)
    a, b = t.to_lists()
    assert sum(a) == expected_sum_a(p, k) == (p.alpha + 1) ** k
    want_b = p.beta * k * 4 ** (k - 1) if p.alpha == 3 else p.beta * ((p.alpha + 1) ** k - 4**k) // (p.alpha - 3)
    assert sum(b) == expected_sum_b(p, k) == want_b


@given(collatz_params(), st.integers(1, 12), st.integers(1, 2**200))
def test_decomposition_random_n(p, k, n):
    t = build_coeff_table(p, k)
    ai, bi = t.row(n % 2**k)
    assert 2**k * iterate(p, n, k) == ai * n + bi


@given(collatz_params(), st.integers(1, 10), st.data())
def test_exponent_is_odd_step_count(p, k, data):
    t = build_coeff_table(p, k)
    i = data.draw(st.integers(0, 2**k - 1))
    ones = sum(parity_vector(p, i or 2**k, k).bits)
    assert t.row(i)[0] == p.alpha**ones


@given(collatz_params(), st.integers(1, 10))
def test_exponent_distribution_is_binomial(p, k):
    if p.alpha == 1:
        return
    exps = build_coeff_table(p, k).alpha_exponents()
    assert all(exps.count(e) == math.comb(k, e) for e in range(k + 1))


@given(collatz_params(), st.integers(1, 8), st.integers(1, 20))
def test_rows_depend_on_beta_mod_2k(p, k, shift):
    beta2 = p.beta + shift * 2**k
    if math.gcd(p.alpha, beta2) != 1:
        return
    assert build_coeff_table(p, k).to_lists()[0] == build_coeff_table(CollatzParams(p.alpha, beta2), k).to_lists()[0]


def test_levels_refine(params):
    tables = coeff_tables(params, 10)
    for k in range(10):
        lo_a, lo_b = tables[k].to_lists()
        hi_a, hi_b = tables[k + 1].to_lists()
        for j in range(2 ** (k + 1)):
            pa, pb = lo_a[j % 2**k], lo_b[j % 2**k]
            assert (hi_a[j], hi_b[j]) in {(pa, pb), (params.alpha * pa, params.alpha * pb + 2**k * params.beta)}


def test_dtype_is_int64_when_safe():
    assert build_coeff_table(CollatzParams(3, 1), 12).a.dtype == np.int64
