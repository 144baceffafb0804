import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linksubdiv.recurrence import SeriesTooShort, fit_recurrence, hankel_rank


def berlekamp_massey(seq):
    """Shortest linear recurrence of ``seq`` over the rationals (oracle).

    Returns ``c`` with ``seq[n] = sum(c[i] * seq[n-1-i])``.
    """
    s = [Fraction(x) for x in seq]
    cur, prev = [Fraction(1)], [Fraction(1)]
    length, shift, b = 0, 1, Fraction(1)
    for n in range(len(s)):
        d = s[n] + sum(cur[i] * s[n - i] for i in range(1, length + 1))
        if d == 0:
            shift += 1
            continue
        coef = d / b
        new = cur + [Fraction(0)] * max(0, len(prev) + shift - len(cur))
        for i, p in enumerate(prev):
            new[i + shift] -= coef * p
        if 2 * length <= n:
            prev, b, length, shift = cur, d, n + 1 - length, 1
        else:
            shift += 1
        cur = new
    cur = cur + [Fraction(0)] * (length + 1 - len(cur))
    return [-x for x in cur[1:length + 1]]


def test_constant_series_is_order_one():
    rec = fit_recurrence([2, 2, 2, 2])
    assert rec.order == 1 and rec.coeffs == (1,)


def test_powers_of_two():
    rec = fit_recurrence([2 ** k for k in range(8)])
    assert rec.order == 1 and rec.coeffs == (2,)
    assert rec.predict([2 ** k for k in range(8)], 2) == [256, 512]


def test_fibonacci():
    fib = [1, 1]
    while len(fib) < 12:
        fib.append(fib[-1] + fib[-2])
    rec = fit_recurrence(fib)
    assert rec.order == 2 and rec.coeffs == (1, 1)


def test_quadratic_needs_order_three():
    seq = [2 * n * n + 2 * n + 1 for n in range(10)]
    rec = fit_recurrence(seq)
    assert rec.order == 3 and rec.coeffs == (3, -3, 1)


def test_too_short():
    with pytest.raises(SeriesTooShort):
        fit_recurrence([1, 2, 3])


def test_no_recurrence_within_budget():
    # factorials satisfy no constant-coefficient recurrence
    seq = [1]
    for k in range(1, 14):
        seq.append(seq[-1] * k)
    assert fit_recurrence(seq, max_order=4) is None


def test_order_needs_two_spare_terms():
    # six terms only allow orders up to two
    seq = [1, 2, 4, 8, 16, 31]
    assert fit_recurrence(seq) is None


def test_hankel_rank_of_geometric_series():
    assert hankel_rank([3 ** k for k in range(9)], 4) == 1


def test_json_uses_exact_fractions():
    rec = fit_recurrence([1024 >> k for k in range(8)])
    doc = json.loads(rec.to_json())
    assert doc["coefficients"] == [[1, 2]] and doc["order"] == 1


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=1, max_size=3),
       st.lists(st.integers(-5, 5), min_size=3, max_size=3))
def test_agrees_with_berlekamp_massey(coeffs, init):
    r = len(coeffs)
    seq = list(init[:r])
    while len(seq) < 2 * 3 + 4:
        seq.append(sum(c * seq[-1 - i] for i, c in enumerate(coeffs)))
    rec = fit_recurrence(seq, max_order=3)
    bm = berlekamp_massey(seq)
    assert rec is not None and rec.reproduces(seq)
    assert rec.order == max(1, len(bm))
    assert rec.predict(seq, 4) == _bm_predict(seq, bm, 4)


def _bm_predict(seq, c, steps):
    vals = [Fraction(x) for x in seq]
    out = []
    for _ in range(steps):
        vals.append(sum(ci * vals[-1 - i] for i, ci in enumerate(c)))
        out.append(vals[-1])
    return out
