import json

import numpy as np
import pytest

from alres.algebra import BiLaurent, Mat2, RatFun, lambda_series, mat2_inv, mat2_lambda_series
from alres.errors import BoundarySurface, InvalidResidueIndex
from alres.potential import Potential, Q_total, u_site, u_site_reg, u_tilde_site
from alres.resolvent import (
    REGIONS,
    KernelWindow,
    RegionTag,
    a_inverse_expansion,
    a_matrix,
    default_window,
    free_resolvent_entry,
    gamma,
    lambda_expansion,
    limit_resolvent_window,
    region_classify,
    regular_part_window,
    residue_window,
    resolvent_window,
    series_window,
    x_col,
    y_row,
)

W = RatFun.w()
WI = RatFun.w(-1)
LAM = RatFun.lam()
ONE_SITE = Potential(0, (1,), (1,))
TWO_SITES = Potential(0, (1, 1), (1, 1))
ZERO = Potential(0, (0,), (0,))
MIXED = Potential(-1, (1, 0, 1, 1), (1, 1, 0, 1))


# classification

@pytest.mark.parametrize("abs_w,h,tag", [
    (2, 3, RegionTag.R_BOTH_BELOW),
    (2, 1, RegionTag.R_W_ABOVE),
    (0.5, 1, RegionTag.R_WINV_ABOVE),
    (2, 0.1, RegionTag.R_BOTH_ABOVE),
    (0.5, 0.1, RegionTag.R_BOTH_ABOVE),
    (3, 0, RegionTag.R_BOTH_ABOVE),
])
def test_region_classify(abs_w, h, tag):
    assert region_classify(abs_w, h) is tag


@pytest.mark.parametrize("abs_w,h", [(2, 2), (2, 0.5), (1, 1)])
def test_boundary_surfaces(abs_w, h):
    with pytest.raises(BoundarySurface):
        region_classify(abs_w, h)


def test_classify_rejects_bad_input():
    with pytest.raises(ValueError):
        region_classify(0, 1)
    with pytest.raises(ValueError):
        region_classify(1, -1)


# annihilators and transition matrix

def test_x_at_left_border():
    assert x_col(MIXED, MIXED.k) == Mat2.w_sigma(MIXED.k)
    assert x_col(MIXED, MIXED.k - 3) == Mat2.w_sigma(MIXED.k - 3)


def test_x_past_one_degenerate_site():
    assert x_col(ONE_SITE, 1) == u_site_reg(ONE_SITE, 0) @ Mat2.w_sigma(0)


def test_y_at_right_border():
    assert y_row(MIXED, MIXED.K) == Mat2.w_sigma(-MIXED.K)
    assert y_row(MIXED, MIXED.K - 1) == Mat2.w_sigma(-MIXED.K) @ u_site_reg(MIXED, MIXED.K)


@pytest.mark.parametrize("m", range(-4, 5))
def test_zero_potential_annihilators(m):
    p = Potential(-1, (0, 0, 0), (0, 0, 0))
    assert x_col(p, m) == Mat2.w_sigma(m)
    assert y_row(p, m) == Mat2.w_sigma(-m)


def test_a_matrix_zero_potential():
    # w^(-K sigma) u_0 w^(k sigma) at k = K = 0
    assert a_matrix(ZERO) == Mat2.w_sigma()


def test_a_matrix_one_site():
    a = a_matrix(ONE_SITE)
    assert a == Mat2((LAM + 1) * W, 1, 1, WI)
    assert a.det() == LAM


@pytest.mark.parametrize("p", [ONE_SITE, TWO_SITES, MIXED], ids=str)
def test_det_a_is_lam_power(p):
    assert a_matrix(p).det() == RatFun.lam(Q_total(p))


def test_gamma_both_below():
    assert gamma(MIXED, RegionTag.R_BOTH_BELOW).is_zero()


def test_gamma_w_above_zero_potential():
    assert gamma(ZERO, RegionTag.R_W_ABOVE) == Mat2.diag(WI, 0)


def test_gamma_winv_above_zero_potential():
    assert gamma(ZERO, RegionTag.R_WINV_ABOVE) == Mat2.diag(0, W)


def test_gamma_both_above_one_site():
    assert gamma(ONE_SITE, RegionTag.R_BOTH_ABOVE) == Mat2(WI, -1, -1, (LAM + 1) * W) * (RatFun.one() / LAM)


def test_unregularized_gamma_rejected_with_degenerate_sites():
    with pytest.raises(ValueError):
        gamma(ONE_SITE, RegionTag.R_BOTH_ABOVE, regularized=False)
    assert gamma(ZERO, RegionTag.R_BOTH_ABOVE, regularized=False) == Mat2.w_sigma(-1)


# free resolvent

def test_free_entry_below_diagonal():
    mat, h_exp = free_resolvent_entry(RegionTag.R_BOTH_BELOW, 1, 0)
    assert mat == Mat2.identity() and h_exp == -1


def test_free_entry_both_above_diagonal():
    mat, h_exp = free_resolvent_entry(RegionTag.R_BOTH_ABOVE, 0, 0)
    assert mat == -Mat2.w_sigma(-1) and h_exp == 0


def test_free_entry_w_above_diagonal():
    # upper component from the n >= m branch, lower component vanishes
    mat, _ = free_resolvent_entry(RegionTag.R_W_ABOVE, 0, 0)
    assert mat == Mat2.diag(-WI, 0)


def test_free_entry_winv_above_diagonal():
    mat, _ = free_resolvent_entry(RegionTag.R_WINV_ABOVE, 0, 0)
    assert mat == Mat2.diag(0, -W)


@pytest.mark.parametrize("region", REGIONS)
def test_zero_potential_matches_free_form(region):
    window = (-6, 6, -6, 6)
    kernel = resolvent_window(ZERO, region, window)
    for m, n in kernel.indices():
        assert kernel[m, n] == free_resolvent_entry(region, m, n)[0], (m, n)


def test_both_below_is_lower_triangular():
    kernel = resolvent_window(MIXED, RegionTag.R_BOTH_BELOW)
    for m, n in kernel.indices():
        if m <= n:
            assert kernel[m, n].is_zero()


def test_both_above_is_upper_triangular():
    kernel = resolvent_window(MIXED, RegionTag.R_BOTH_ABOVE)
    for m, n in kernel.indices():
        if m > n:
            assert kernel[m, n].is_zero()


def test_one_site_entry():
    kernel = resolvent_window(ONE_SITE, RegionTag.R_BOTH_ABOVE, (0, 0, 0, 0))
    assert kernel[0, 0] == -(Mat2(WI, -1, -1, (LAM + 1) * W) * (RatFun.one() / LAM))


@pytest.mark.parametrize("p", [ONE_SITE, TWO_SITES, MIXED], ids=str)
def test_theorem_path_matches_inverse_products(p):
    direct = resolvent_window(p, RegionTag.R_BOTH_ABOVE)
    via = resolvent_window(p, RegionTag.R_BOTH_ABOVE, method="theorem")
    assert direct.entries == via.entries


def test_unknown_method():
    with pytest.raises(ValueError):
        resolvent_window(ONE_SITE, RegionTag.R_W_ABOVE, method="magic")


def test_default_window_margin():
    assert default_window(TWO_SITES) == (-5, 6, -5, 6)


# lam -> 0 structure

def test_a_inverse_one_site():
    coeffs = a_inverse_expansion(ONE_SITE)
    assert coeffs[0] == u_tilde_site(ONE_SITE, 0)
    assert coeffs[1] == Mat2.diag(0, W)


@pytest.mark.parametrize("p", [ONE_SITE, TWO_SITES, Potential(0, (1, 0), (1, 1)),
                               Potential(3, (1, 1), (1, 0))], ids=str)
def test_a_inverse_matches_direct_series(p):
    Q = Q_total(p)
    oracle = mat2_lambda_series(mat2_inv(a_matrix(p)), -Q, 0)
    coeffs = a_inverse_expansion(p)
    assert coeffs == [oracle[e] for e in range(-Q, 1)]


@pytest.mark.parametrize("p", [ONE_SITE, TWO_SITES], ids=str)
def test_printed_exponent_disagrees(p):
    Q = Q_total(p)
    oracle = mat2_lambda_series(mat2_inv(a_matrix(p)), -Q, 0)
    printed = a_inverse_expansion(p, printed_exponent=True)
    assert printed != [oracle[e] for e in range(-Q, 1)]


def test_one_site_residue():
    res = residue_window(ONE_SITE, 1, (-1, 1, -1, 1))
    assert res[0, 0] == -u_tilde_site(ONE_SITE, 0)
    assert res[1, 0].is_zero()  # n < m
    assert res[1, 1].is_zero()  # no degenerate site in [1, 1]


def test_residue_index_range():
    with pytest.raises(InvalidResidueIndex):
        residue_window(ONE_SITE, 2)
    with pytest.raises(InvalidResidueIndex):
        residue_window(ZERO, 1)
    with pytest.raises(InvalidResidueIndex):
        lambda_expansion(ONE_SITE).residue(0)


def test_residue_beyond_Q_is_zero_kernel():
    assert lambda_expansion(TWO_SITES).residue(3) is None


@pytest.mark.parametrize("p", [ONE_SITE, TWO_SITES, MIXED], ids=str)
def test_residues_match_series(p):
    window = default_window(p, 2)
    kernel = resolvent_window(p, RegionTag.R_BOTH_ABOVE, window)
    exp = lambda_expansion(p, window)
    assert exp.Q == Q_total(p)
    for j in range(1, exp.Q + 1):
        assert series_window(kernel, -j, "s").entries == exp.residue(j).entries
    assert series_window(kernel, 0, "s").entries == exp.regular.entries
    assert regular_part_window(p, window).entries == exp.regular.entries


def test_one_site_limit():
    limit = limit_resolvent_window(ONE_SITE, RegionTag.R_BOTH_ABOVE, (0, 0, 0, 0))
    assert limit[0, 0] == -Mat2.diag(0, W)


@pytest.mark.parametrize("region", REGIONS)
def test_zero_potential_limit_is_free(region):
    window = (-3, 3, -3, 3)
    limit = limit_resolvent_window(ZERO, region, window)
    for m, n in limit.indices():
        assert limit[m, n] == free_resolvent_entry(region, m, n)[0]


def test_both_below_limit_uses_plain_sites():
    window = (-2, 4, -2, 4)
    limit = limit_resolvent_window(MIXED, RegionTag.R_BOTH_BELOW, window)
    plain = resolvent_window(MIXED, RegionTag.R_BOTH_BELOW, window, regularized=False)
    assert limit.entries == plain.entries


def test_limit_entry_is_series_coefficient():
    kernel = resolvent_window(TWO_SITES, RegionTag.R_BOTH_ABOVE, (0, 1, 0, 1))
    x = kernel[0, 1].e22
    assert lambda_series(x, 0, 0)[0] == regular_part_window(TWO_SITES, (0, 1, 0, 1))[0, 1].e22.num


# numeric and serialization

def test_full_entry_applies_h_power():
    kernel = resolvent_window(ZERO, RegionTag.R_BOTH_BELOW, (1, 1, 0, 0))
    assert np.allclose(kernel.full_entry(1, 0, 2.0, 0, 4.0), np.eye(2) / 4)


def test_kernel_json_round_trip():
    kernel = resolvent_window(MIXED, RegionTag.R_W_ABOVE, (-2, 2, -2, 2))
    text = json.dumps(kernel.to_json(), sort_keys=True)
    back = KernelWindow.from_json(json.loads(text))
    assert back.entries == kernel.entries and back.window == kernel.window
    assert json.dumps(back.to_json(), sort_keys=True) == text
