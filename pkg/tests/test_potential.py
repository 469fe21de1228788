import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alres.algebra import BiLaurent, Mat2, RatFun, mat2_inv
from alres.errors import EmptyInterval, InvalidRange, ParseError
from alres.potential import (
    P_LOWER,
    Potential,
    Q_total,
    all_potentials,
    degeneracy_flags,
    load_potential,
    ordered_prod_left,
    parse_potential,
    q_count,
    selective_prod_brute,
    selective_prod_right,
    u_site,
    u_site_reg,
    u_tilde_site,
)

W = RatFun.w()
WI = RatFun.w(-1)
LAM = RatFun.lam()

potentials = st.integers(1, 5).flatmap(
    lambda n: st.builds(Potential, st.integers(-3, 3),
                        st.tuples(*[st.integers(0, 1)] * n), st.tuples(*[st.integers(0, 1)] * n)))


def site(r, s):
    return Potential(0, (r,), (s,))


# site matrices

def test_free_site():
    assert u_site(site(0, 0), 0) == Mat2.w_sigma()
    assert u_site(site(1, 1), 5) == Mat2.w_sigma()  # outside the support


def test_degenerate_site():
    u = u_site(site(1, 1), 0)
    assert u == Mat2(W, 1, 1, WI)
    assert u.det().is_zero()


def test_upper_triangular_site():
    u = u_site(site(1, 0), 0)
    assert u == Mat2(W, 1, 0, WI)
    assert u.det() == RatFun.one()


def test_regularized_degenerate_site():
    assert u_site_reg(site(1, 1), 0) == Mat2((LAM + 1) * W, 1, 1, WI)


@pytest.mark.parametrize("r,s", [(0, 0), (1, 0), (0, 1)])
def test_regularization_leaves_other_sites(r, s):
    p = site(r, s)
    assert u_site_reg(p, 0) == u_site(p, 0)


@pytest.mark.parametrize("r,s", [(0, 0), (1, 0), (0, 1), (1, 1)])
def test_regularized_determinant(r, s):
    det = u_site_reg(site(r, s), 0).det()
    assert det == RatFun(1 - r * s) + LAM * (r * s)


def test_tilde_free_site():
    assert u_tilde_site(site(0, 0), 0) == mat2_inv(Mat2.w_sigma())


def test_tilde_degenerate_site():
    p = site(1, 1)
    assert u_tilde_site(p, 0) == Mat2(WI, -1, -1, W)
    assert (u_site(p, 0) @ u_tilde_site(p, 0)).is_zero()


def test_tilde_lower_triangular_site():
    p = site(0, 1)
    assert u_tilde_site(p, 0) == Mat2(WI, 0, -1, W)
    assert u_site(p, 0) @ u_tilde_site(p, 0) == Mat2.identity()


@pytest.mark.parametrize("r,s", [(0, 0), (1, 0), (0, 1), (1, 1)])
def test_tilde_commutes_to_scalar(r, s):
    p = site(r, s)
    scalar = Mat2.diag(1 - r * s, 1 - r * s)
    assert u_site(p, 0) @ u_tilde_site(p, 0) == scalar
    assert u_tilde_site(p, 0) @ u_site(p, 0) == scalar


# counts

def test_counts_two_degenerate_sites():
    p = Potential(0, (1, 1), (1, 1))
    assert q_count(p, 0, 1) == 2
    assert Q_total(p) == 2


def test_count_outside_support():
    assert q_count(Potential(0, (1, 1), (1, 1)), -5, -1) == 0


def test_count_mixed():
    p = Potential(0, (1, 0, 1), (1, 1, 1))
    assert q_count(p, 0, 2) == 2
    assert degeneracy_flags(p) == [1, 0, 1]
    assert p.degenerate_sites() == [0, 2]


def test_count_empty_interval():
    with pytest.raises(EmptyInterval):
        q_count(Potential(0, (1,), (1,)), 2, 1)


@given(potentials, st.data())
def test_count_additivity(p, data):
    m = data.draw(st.integers(p.k - 2, p.K + 1))
    n = data.draw(st.integers(m + 1, p.K + 3))
    mid = data.draw(st.integers(m, n - 1))
    assert q_count(p, m, n) == q_count(p, m, mid) + q_count(p, mid + 1, n)


# ordered products

def test_empty_ordered_product():
    assert ordered_prod_left(site(1, 1), 3, 2) == Mat2.identity()


def test_single_factor_product():
    assert ordered_prod_left(site(1, 1), 0, 0) == Mat2((LAM + 1) * W, 1, 1, WI)


def test_two_factor_product_order():
    p = Potential(0, (1, 1), (1, 1))
    assert ordered_prod_left(p, 0, 1) == u_site_reg(p, 1) @ u_site_reg(p, 0)


def test_invalid_range():
    with pytest.raises(InvalidRange):
        ordered_prod_left(site(1, 1), 3, 1)


@given(potentials, st.data())
@settings(max_examples=30)
def test_left_product_recursion(p, data):
    lo = data.draw(st.integers(p.k - 1, p.K))
    hi = data.draw(st.integers(lo - 1, p.K + 1))
    assert ordered_prod_left(p, lo, hi + 1) == u_site_reg(p, hi + 1) @ ordered_prod_left(p, lo, hi)


# selective products

def test_selective_without_replacement():
    p = Potential(0, (1, 0, 1), (1, 1, 0))
    plain = u_tilde_site(p, 0) @ u_tilde_site(p, 1) @ u_tilde_site(p, 2)
    assert selective_prod_right(p, 0, 2, 0) == plain


def test_selective_single_site():
    assert selective_prod_right(site(1, 1), 0, 0, 1) == P_LOWER


def test_selective_beyond_count_is_zero():
    assert selective_prod_right(site(1, 1), 0, 0, 2).is_zero()
    assert selective_prod_right(site(0, 1), -1, 1, 1).is_zero()


@pytest.mark.parametrize("p", list(all_potentials(3)), ids=str)
def test_selective_matches_enumeration(p):
    for m in range(p.k - 1, p.K + 1):
        for n in range(m, p.K + 2):
            for j in range(0, q_count(p, m, n) + 2):
                assert selective_prod_right(p, m, n, j) == selective_prod_brute(p, m, n, j)


@pytest.mark.parametrize("p", [Potential(0, (1,), (1,)), Potential(0, (1, 1), (1, 1)),
                               Potential(0, (1, 0, 1), (1, 1, 1)), Potential(-1, (1, 1, 0, 1), (1, 1, 1, 1))],
                         ids=str)
def test_right_ordered_expansion_identity(p):
    for m in range(p.k - 1, p.K + 1):
        for n in range(m, p.K + 2):
            q = q_count(p, m, n)
            lhs = Mat2.identity()
            for l in range(m, n + 1):
                lhs = lhs @ mat2_inv(u_site_reg(p, l))
            lhs = lhs * RatFun(BiLaurent.lam(q))
            rhs = Mat2.zero()
            for j in range(q + 1):
                rhs = rhs + selective_prod_right(p, m, n, j) * RatFun(BiLaurent.monomial(1, j, j))
            assert lhs == rhs, (m, n)


# construction and loading

def test_potential_validation():
    with pytest.raises(ValueError):
        Potential(0, (1, 2), (0, 0))
    with pytest.raises(ValueError):
        Potential(0, (1,), (0, 0))
    with pytest.raises(ValueError):
        Potential(0, (), ())


def test_potential_borders_and_queries():
    p = Potential(3, (1, 0), (1, 1))
    assert (p.k, p.K) == (3, 4)
    assert p.r_at(2) == p.s_at(5) == 0
    assert p.is_degenerate(3) and not p.is_degenerate(4)


def test_all_potentials_count():
    assert len(list(all_potentials(2))) == 16


def test_random_potential_is_reproducible():
    a = Potential.random(6, random.Random(3))
    b = Potential.random(6, random.Random(3))
    assert a == b and len(a.r) == 6


def test_parse_valid():
    p = parse_potential('{"k": -1, "r": [1, 0], "s": [1, 1]}')
    assert p == Potential(-1, (1, 0), (1, 1))


@pytest.mark.parametrize("text,fragment", [
    ('{"k": 0, "r": [1, 2], "s": [1, 1]}', "'r'[1]"),
    ('{"k": 0, "r": [true], "s": [1]}', "'r'[0]"),
    ('{"k": 0, "r": [], "s": []}', "empty"),
    ('{"k": 0, "r": [1]}', "missing field 's'"),
    ('{"k": 0.5, "r": [1], "s": [1]}', "'k'"),
    ('{"k": 0, "r": [1, 0], "s": [1]}', "differ in length"),
    ('{"k": 0,\n "r": [1,, 0]}', "line 2"),
    ('[1, 2]', "top level"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError) as info:
        parse_potential(text, "pot.json")
    assert fragment in str(info.value)
    assert "pot.json" in str(info.value)


def test_load_round_trip(tmp_path):
    p = Potential(2, (1, 0, 1), (0, 1, 1))
    path = tmp_path / "p.json"
    path.write_text(json.dumps(p.to_json()))
    assert load_potential(path) == p


def test_load_missing_file(tmp_path):
    with pytest.raises(ParseError):
        load_potential(tmp_path / "nope.json")
