"""Band-operator window calculus and the exact identity suites.

All compositions either go through the finitely supported operator D or
through the two-diagonal operator L, so every sum is finite and every check
is an exact zero test of rational functions.

D is the lam-derivative of the regularized site matrix: w * diag(1, 0) at
degenerate sites, zero elsewhere, so that L(w, lam) = L(w) - lam * D.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .algebra import BiLaurent, Mat2, RatFun, lambda_pole_order, mat2_inv, mat2_lambda_series
from .errors import WindowTooSmall
from .potential import Potential, Q_total, site_matrix
from .resolvent import (
    REGIONS,
    KernelWindow,
    LambdaExpansion,
    RegionTag,
    Window,
    a_inverse_expansion,
    a_matrix,
    default_window,
    lambda_expansion,
    regular_part_window,
    resolvent_window,
    series_window,
    x_col,
    y_row,
)

_ZERO = RatFun.zero()
_W = RatFun.w()
_ONE = RatFun.one()


@dataclass
class IdentityReport:
    name: str
    potential: str
    region: Optional[str]
    window: Optional[Tuple[int, ...]]
    passed: bool
    checked: int = 0
    failure: Optional[Tuple[int, int]] = None
    residual: Optional[str] = None
    advisory: bool = False
    note: str = ""

    def to_json(self) -> dict:
        d = asdict(self)
        d["window"] = list(self.window) if self.window else None
        d["failure"] = list(self.failure) if self.failure else None
        return d

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        if self.advisory:
            status += " (advisory)"
        where = f" first failure at {self.failure}" if self.failure else ""
        region = f" [{self.region}]" if self.region else ""
        return f"{status} {self.name}{region} {self.potential} checked={self.checked}{where}"


@dataclass
class BandOperatorWindow:
    """Matrix elements of L (kind 'L') or D (kind 'D'), h-stripped like kernels."""

    kind: str
    potential: Potential
    regularized: bool = False

    def entry(self, m: int, n: int) -> Mat2:
        p = self.potential
        if self.kind == "L":
            if n == m + 1:
                return Mat2.identity()
            if n == m:
                return -site_matrix(p, m, self.regularized)
            return Mat2.zero()
        if self.kind == "D":
            return d_entry(p, m) if m == n else Mat2.zero()
        raise ValueError(f"unknown band operator kind {self.kind!r}")

    def support(self, lo: int, hi: int) -> List[Tuple[int, int]]:
        return [(m, n) for m in range(lo, hi + 1) for n in range(lo, hi + 1)
                if not self.entry(m, n).is_zero()]


def d_entry(p: Potential, n: int, printed: bool = False) -> Mat2:
    if not p.is_degenerate(n):
        return Mat2.zero()
    return Mat2.diag(1 if printed else _W, 0)


def corrupt(kernel: KernelWindow, m: int, n: int, amount=1) -> KernelWindow:
    """Copy of ``kernel`` with ``amount`` added to component (1,1) of entry (m, n)."""
    out = kernel.copy()
    out[m, n] = kernel[m, n] + Mat2(amount, 0, 0, 0)
    return out


def compose_through_D(A: KernelWindow, B: Optional[KernelWindow], p: Potential,
                      printed: bool = False) -> KernelWindow:
    """(A D B)[m, n] = sum over degenerate l of A[m, l] D_l B[l, n].

    ``B=None`` stands for the zero kernel.  h-exponents add to n - m, so the
    result is again h-stripped.
    """
    if B is None:
        return KernelWindow(A.m_lo, A.m_hi, A.n_lo, A.n_hi, A.region,
                            {mn: Mat2.zero() for mn in A.indices()}, "zero")
    if A.n_lo > p.k or A.n_hi < p.K or B.m_lo > p.k or B.m_hi < p.K:
        raise WindowTooSmall(f"windows {A.window} / {B.window} do not cover [{p.k}, {p.K}]")
    weight = _ONE if printed else _W
    sites = p.degenerate_sites()
    out = KernelWindow(A.m_lo, A.m_hi, B.n_lo, B.n_hi, A.region, label="composition")
    cols = {(m, l): (A[m, l].e[0] * weight, A[m, l].e[2] * weight)
            for m in range(A.m_lo, A.m_hi + 1) for l in sites}
    for m, n in out.indices():
        acc = [_ZERO, _ZERO, _ZERO, _ZERO]
        for l in sites:
            c1, c2 = cols[m, l]
            b = B[l, n].e
            r1, r2 = b[0], b[1]
            if c1.is_zero() and c2.is_zero() or r1.is_zero() and r2.is_zero():
                continue
            acc[0] = acc[0] + c1 * r1
            acc[1] = acc[1] + c1 * r2
            acc[2] = acc[2] + c2 * r1
            acc[3] = acc[3] + c2 * r2
        out[m, n] = Mat2._raw(acc)
    return out


# report helpers

def _run(name: str, p: Potential, region, window, pairs, advisory=False, note="") -> IdentityReport:
    """``pairs`` yields ((m, n), lhs, rhs); stops at the first mismatch."""
    checked = 0
    for mn, lhs, rhs in pairs:
        checked += 1
        if not lhs == rhs:
            return IdentityReport(name, str(p), getattr(region, "value", region),
                                  tuple(window) if window else None, False, checked, mn,
                                  _residual(lhs, rhs), advisory, note)
    return IdentityReport(name, str(p), getattr(region, "value", region),
                          tuple(window) if window else None, True, checked,
                          advisory=advisory, note=note)


def _residual(lhs, rhs) -> str:
    if isinstance(lhs, tuple):
        return str(tuple(str(a - b) for a, b in zip(lhs, rhs)))
    return str(lhs - rhs)


def _delta(m: int, n: int) -> Mat2:
    return Mat2.identity() if m == n else Mat2.zero()


def _left_L(kernel: KernelWindow, p: Potential, regularized: bool, m: int, n: int) -> Mat2:
    """(L K)[m, n] with L h-stripped: K[m+1, n] - u_m K[m, n]."""
    return kernel[m + 1, n] - site_matrix(p, m, regularized) @ kernel[m, n]


def _right_L(kernel: KernelWindow, p: Potential, regularized: bool, m: int, n: int) -> Mat2:
    """(K L)[m, n]: K[m, n-1] - K[m, n] u_n."""
    return kernel[m, n - 1] - kernel[m, n] @ site_matrix(p, n, regularized)


def _get(kernel: Optional[KernelWindow], m: int, n: int) -> Mat2:
    return Mat2.zero() if kernel is None else kernel[m, n]


def _D_left(p: Potential, kernel: Optional[KernelWindow], m: int, n: int) -> Mat2:
    return d_entry(p, m) @ _get(kernel, m, n)


def _D_right(p: Potential, kernel: Optional[KernelWindow], m: int, n: int) -> Mat2:
    return _get(kernel, m, n) @ d_entry(p, n)


# suites

def check_inverse(p: Potential, region: RegionTag, window: Optional[Window] = None,
                  kernel: Optional[KernelWindow] = None) -> IdentityReport:
    """L M = I and M L = I on every entry of the window where both sides are defined."""
    window = window or default_window(p)
    kernel = kernel or resolvent_window(p, region, window)
    m_lo, m_hi, n_lo, n_hi = kernel.window

    def pairs():
        for m in range(m_lo, m_hi):
            for n in range(n_lo, n_hi + 1):
                yield (m, n), _left_L(kernel, p, True, m, n), _delta(m, n)
        for m in range(m_lo, m_hi + 1):
            for n in range(n_lo + 1, n_hi + 1):
                yield (m, n), _right_L(kernel, p, True, m, n), _delta(m, n)
    return _run("inverse", p, region, kernel.window, pairs())


def check_theorem1(p: Potential, window: Optional[Window] = None) -> IdentityReport:
    """x Gamma y form with Gamma = a^-1 equals the inverse-product form in R_BOTH_ABOVE."""
    window = window or default_window(p)
    region = RegionTag.R_BOTH_ABOVE
    direct = resolvent_window(p, region, window)
    via_gamma = resolvent_window(p, region, window, method="theorem")
    pairs = ((mn, via_gamma[mn], direct[mn]) for mn in direct.indices())
    return _run("theorem1_consistency", p, region, window, pairs)


def check_lambda_structure(p: Potential, window: Optional[Window] = None,
                           kernel: Optional[KernelWindow] = None) -> List[IdentityReport]:
    """det a = lam^Q, and lam^Q * entry is lam-polynomial on both construction paths.

    ``kernel`` replaces the direct-path kernel (negative controls).
    """
    window = window or default_window(p)
    Q = Q_total(p)
    lam_Q = RatFun.lam(Q)
    det_rep = _run("det_a_equals_lam_Q", p, None, None,
                   [((p.k, p.K), a_matrix(p).det(), lam_Q)])
    kernels = [kernel or resolvent_window(p, RegionTag.R_BOTH_ABOVE, window),
               resolvent_window(p, RegionTag.R_BOTH_ABOVE, window, method="theorem")]

    def pairs():
        for kernel in kernels:
            for mn in kernel.indices():
                ok = all(lambda_pole_order(x) <= Q and not (x * lam_Q).den.depends_on_lam()
                         for x in kernel[mn].e)
                yield mn, ok, True
    pole = _run("pole_order_at_most_Q", p, RegionTag.R_BOTH_ABOVE, window, pairs())
    return [det_rep, pole]


def check_residues(p: Potential, window: Optional[Window] = None,
                   kernel: Optional[KernelWindow] = None) -> List[IdentityReport]:
    """Closed-form residues and regular part versus exact series of the kernel.

    ``kernel`` replaces the R_BOTH_ABOVE kernel the series are taken from.
    """
    window = window or default_window(p)
    Q = Q_total(p)
    kernel = kernel or resolvent_window(p, RegionTag.R_BOTH_ABOVE, window)
    exp = lambda_expansion(p, window)
    reports = []

    def pairs():
        for j in range(1, Q + 1):
            series = series_window(kernel, -j, f"series {j}")
            closed = exp.residue(j)
            for mn in series.indices():
                yield mn, closed[mn], series[mn]
        # nothing beyond the pole order
        series = series_window(kernel, -(Q + 1), "series beyond")
        for mn in series.indices():
            yield mn, series[mn], Mat2.zero()
    reports.append(_run("residues_vs_series", p, RegionTag.R_BOTH_ABOVE, window, pairs()))
    series0 = series_window(kernel, 0, "series 0")
    closed0 = regular_part_window(p, window)
    reports.append(_run("regular_part_vs_series", p, RegionTag.R_BOTH_ABOVE, window,
                        ((mn, closed0[mn], series0[mn]) for mn in closed0.indices())))
    coeffs = a_inverse_expansion(p)
    oracle = mat2_lambda_series(mat2_inv(a_matrix(p)), -Q, 0)
    reports.append(_run("a_inverse_expansion", p, None, None,
                        (((-Q + i, 0), c, oracle[-Q + i]) for i, c in enumerate(coeffs))))
    return reports


def _clear_denominators(kernel: KernelWindow):
    """Common multiple C of all entry denominators and the polynomial entries C*M."""
    dens: Dict[frozenset, BiLaurent] = {}
    for A in kernel.entries.values():
        for x in A.e:
            if not x.den.is_one():
                dens.setdefault(frozenset(x.den.terms.items()), x.den)
    C = BiLaurent.const(1)
    for d in sorted(dens.values(), key=lambda d: (-len(d), -d.lam_degree())):
        if C.exact_div(d) is None:
            C = C * d
    cof: Dict[frozenset, BiLaurent] = {key: C.exact_div(d) for key, d in dens.items()}
    polys = {}
    for mn, A in kernel.entries.items():
        polys[mn] = tuple(x.num * C if x.den.is_one()
                          else x.num * cof[frozenset(x.den.terms.items())] for x in A.e)
    return C, polys


def _hilbert_setup(base: KernelWindow, first: KernelWindow):
    Cb, Nb = _clear_denominators(base)
    C1, N1 = (Cb, Nb) if first is base else _clear_denominators(first)
    deg = max([C1.lam_degree(), Cb.lam_degree()]
              + [x.lam_degree() for t in list(N1.values()) + list(Nb.values()) for x in t])
    N = deg + 2
    C2 = Cb.lam_power_map(N)
    N2 = {mn: tuple(x.lam_power_map(N) for x in t) for mn, t in Nb.items()}
    return C1, N1, C2, N2, N


def _hilbert_polynomial_pairs(p: Potential, first: KernelWindow, setup, sign: int):
    """Yield (mn, lhs, rhs) for C2*N1 - C1*N2 = sign*(l1 - l2) * N2 D N1, all polynomial.

    Here l1 = lam, l2 = lam^N and N_i = C_i * M(l_i); multiplying the rational
    identity through by C1*C2 leaves only ring arithmetic.
    """
    C1, N1, C2, N2, N = setup
    factor = (BiLaurent.lam() - BiLaurent.lam(N)) * sign * _W.num
    sites = p.degenerate_sites()
    for m in range(first.m_lo, first.m_hi + 1):
        cols = [(N2[m, l][0] * factor, N2[m, l][2] * factor) for l in sites]
        for n in range(first.n_lo, first.n_hi + 1):
            acc = [BiLaurent._raw({})] * 4
            for (c1, c2), l in zip(cols, sites):
                r1, r2 = N1[l, n][0], N1[l, n][1]
                acc = [acc[0] + c1 * r1, acc[1] + c1 * r2, acc[2] + c2 * r1, acc[3] + c2 * r2]
            lhs = tuple(C2 * a - C1 * b for a, b in zip(N1[m, n], N2[m, n]))
            yield (m, n), lhs, tuple(acc)


def check_hilbert(p: Potential, region: RegionTag, window: Optional[Window] = None,
                  markers="symbolic", kernel: Optional[KernelWindow] = None,
                  with_printed: bool = False, base: Optional[KernelWindow] = None):
    """M(l1) - M(l2) = (l1 - l2) M(l2) D M(l1), exactly.

    ``markers='symbolic'`` takes l1 = lam and l2 = lam^N with N beyond every
    lam-degree in play, which makes the check a genuine bivariate identity.
    A pair of integers or RatFun constants may be given instead.
    ``kernel`` replaces M(l1) (negative controls); M(l2) is always rebuilt.
    ``with_printed=True`` also returns the advisory report for the variant
    with (l2 - l1) on the right-hand side.  ``base`` is a prebuilt M(lam).
    """
    window = window or default_window(p)
    if base is None:
        base = resolvent_window(p, region, window)
    first = base if kernel is None else kernel
    if markers == "symbolic":
        note = "markers=symbolic"
        setup = _hilbert_setup(base, first)
        variants = [("hilbert", 1, False), ("hilbert_printed_sign", -1, True)]
        reports = [_run(name, p, region, window,
                        _hilbert_polynomial_pairs(p, first, setup, sign),
                        advisory=adv, note=note)
                   for name, sign, adv in variants[:2 if with_printed else 1]]
        return reports if with_printed else reports[0]
    l1, l2 = (RatFun.coerce(c) for c in markers)
    m1 = _substitute(first, l1)
    m2 = _substitute(base, l2)
    comp = compose_through_D(m2, m1, p)
    diff = {mn: m1[mn] - m2[mn] for mn in comp.indices()}
    note = f"markers={l1},{l2}"
    report = _run("hilbert", p, region, window,
                  ((mn, diff[mn], (l1 - l2) * comp[mn]) for mn in comp.indices()), note=note)
    if not with_printed:
        return report
    printed = _run("hilbert_printed_sign", p, region, window,
                   ((mn, diff[mn], (l2 - l1) * comp[mn]) for mn in comp.indices()),
                   advisory=True, note=note)
    return [report, printed]


def _substitute(kernel: KernelWindow, value: RatFun, identity: bool = False) -> KernelWindow:
    """lam -> value in every entry; shared numerators/denominators are substituted once."""
    if identity:
        return kernel
    cache: Dict[BiLaurent, RatFun] = {}

    def sub(x: BiLaurent) -> RatFun:
        if not x.depends_on_lam():
            return RatFun(x)
        r = cache.get(x)
        if r is None:
            r = cache[x] = x.subs_lam(value)
        return r

    def entry(A: Mat2) -> Mat2:
        return Mat2._raw(sub(e.num) / sub(e.den) if not e.den.is_one() else sub(e.num)
                         for e in A.e)
    return kernel.map(entry)


def check_modified_inverse(p: Potential, window: Optional[Window] = None,
                           expansion: Optional[LambdaExpansion] = None,
                           limit: Optional[KernelWindow] = None) -> List[IdentityReport]:
    """Equations for the limit resolvent and the residues in R_BOTH_ABOVE.

    L M = I + D M1, M L = I + M1 D; L M(j) = D M(j+1), M(j) L = M(j+1) D for
    j < Q; L M(Q) = M(Q) L = 0.  The variant with an extra I on the j-equations
    is reported as advisory.
    """
    window = window or default_window(p)
    region = RegionTag.R_BOTH_ABOVE
    exp = expansion or lambda_expansion(p, window)
    M = limit or exp.regular
    Q = exp.Q
    m_lo, m_hi, n_lo, n_hi = M.window
    res = {j: exp.residue(j) for j in range(1, Q + 2)} if Q else {1: None}
    reports = []

    def left_rows():
        return ((m, n) for m in range(m_lo, m_hi) for n in range(n_lo, n_hi + 1))

    def right_cols():
        return ((m, n) for m in range(m_lo, m_hi + 1) for n in range(n_lo + 1, n_hi + 1))

    reports.append(_run("modified_inverse_left", p, region, window,
                        ((mn, _left_L(M, p, False, *mn),
                          _delta(*mn) + _D_left(p, res[1], *mn)) for mn in left_rows())))
    reports.append(_run("modified_inverse_right", p, region, window,
                        ((mn, _right_L(M, p, False, *mn),
                          _delta(*mn) + _D_right(p, res[1], *mn)) for mn in right_cols())))

    def chain(side: str, with_identity: bool):
        for j in range(1, Q + 1):
            Mj, Mj1 = res[j], res[j + 1]
            if side == "left":
                for mn in left_rows():
                    rhs = _D_left(p, Mj1, *mn)
                    if with_identity and j < Q:
                        rhs = rhs + _delta(*mn)
                    yield mn, _left_L(Mj, p, False, *mn), rhs
            else:
                for mn in right_cols():
                    rhs = _D_right(p, Mj1, *mn)
                    if with_identity and j < Q:
                        rhs = rhs + _delta(*mn)
                    yield mn, _right_L(Mj, p, False, *mn), rhs

    reports.append(_run("residue_chain_left", p, region, window, chain("left", False)))
    reports.append(_run("residue_chain_right", p, region, window, chain("right", False)))
    if Q >= 2:
        reports.append(_run("residue_chain_left_printed", p, region, window,
                            chain("left", True), advisory=True,
                            note="j-equations with the extra identity term"))
    return reports


def check_residue_algebra(p: Potential, window: Optional[Window] = None,
                          expansion: Optional[LambdaExpansion] = None,
                          limit: Optional[KernelWindow] = None) -> List[IdentityReport]:
    """Products of residues and the limit resolvent through D."""
    window = window or default_window(p)
    region = RegionTag.R_BOTH_ABOVE
    exp = expansion or lambda_expansion(p, window)
    Q = exp.Q
    if Q == 0:
        return []
    M = limit or exp.regular
    # ops[0] is the limit resolvent M(w); ops[Q+1] is the zero kernel
    ops: Dict[int, Optional[KernelWindow]] = {0: M}
    for j in range(1, Q + 2):
        ops[j] = exp.residue(j)
    comp: Dict[Tuple[int, int], KernelWindow] = {}

    def C(i: int, l: int) -> KernelWindow:
        if (i, l) not in comp:
            A, B = ops[i], ops[l]
            if A is None or B is None:
                comp[i, l] = compose_through_D(M, None, p)
            else:
                comp[i, l] = compose_through_D(A, B, p)
        return comp[i, l]

    def zero_or(kernel: Optional[KernelWindow], mn) -> Mat2:
        return Mat2.zero() if kernel is None else kernel[mn]

    idx = list(M.indices())
    reports = []

    def gen(fn):
        for j in range(1, Q + 1):
            for mn in idx:
                lhs, rhs = fn(j, mn)
                yield mn, lhs, rhs

    reports.append(_run("residue_times_first", p, region, window,
                        gen(lambda j, mn: (ops[j][mn], -C(j, 1)[mn]))))
    reports.append(_run("first_times_residue", p, region, window,
                        gen(lambda j, mn: (ops[j][mn], -C(1, j)[mn]))))
    reports.append(_run("residue_D_limit_zero", p, region, window,
                        gen(lambda j, mn: (C(j, 0)[mn], Mat2.zero()))))
    reports.append(_run("limit_D_residue_zero", p, region, window,
                        gen(lambda j, mn: (C(0, j)[mn], Mat2.zero()))))
    reports.append(_run("limit_residue_commute", p, region, window,
                        ((mn, C(1, 0)[mn], C(0, 1)[mn]) for mn in idx)))
    reports.append(_run("residue_recursion_left", p, region, window,
                        gen(lambda j, mn: (ops[j][mn], C(0, j + 1)[mn] - C(1, j)[mn]))))
    reports.append(_run("residue_recursion_right", p, region, window,
                        gen(lambda j, mn: (ops[j][mn], C(j + 1, 0)[mn] - C(j, 1)[mn]))))

    def shift_pairs():
        for j in range(1, Q + 1):
            for l in range(1, Q + 1):
                for mn in idx:
                    yield mn, C(j + 1, l)[mn], C(j, l + 1)[mn]

    reports.append(_run("residue_shift", p, region, window, shift_pairs()))

    def interp_pairs():
        for j in range(1, Q + 1):
            for l in range(1, Q + 1):
                for s in range(1, j):
                    if l + s <= Q + 1:
                        for mn in idx:
                            yield mn, C(j, l)[mn], C(j - s, l + s)[mn]

    reports.append(_run("residue_interpolation", p, region, window, interp_pairs()))

    def product_pairs():
        for j in range(1, Q + 1):
            for l in range(1, Q + 1):
                target = ops[l + j - 1] if l + j <= Q + 1 else None
                for mn in idx:
                    yield mn, C(j, l)[mn], -zero_or(target, mn)

    reports.append(_run("residue_product", p, region, window, product_pairs()))
    return reports


def check_annihilators(p: Potential, m_range: Optional[Tuple[int, int]] = None,
                       regularized: bool = True,
                       corrupt_at: Optional[int] = None) -> List[IdentityReport]:
    """x_{m+1} = u_m x_m and y_{m-1} = y_m u_m across the support borders."""
    lo, hi = m_range or (p.k - 10, p.K + 10)

    def x(m):
        v = x_col(p, m, regularized)
        return v + Mat2(1, 0, 0, 0) if m == corrupt_at else v

    def y(n):
        v = y_row(p, n, regularized)
        return v + Mat2(1, 0, 0, 0) if n == corrupt_at else v

    xs = ((( m, m), x(m + 1), site_matrix(p, m, regularized) @ x(m)) for m in range(lo, hi))
    ys = (((n, n), y(n - 1), y(n) @ site_matrix(p, n, regularized)) for n in range(lo + 1, hi + 1))
    window = (lo, hi, lo, hi)
    return [_run("annihilator_column", p, None, window, xs),
            _run("annihilator_row", p, None, window, ys)]


SUITES = ("inverse", "hilbert", "theorem1", "lambda_structure", "residues",
          "modified_inverse", "residue_algebra", "annihilators")


def run_suites(p: Potential, window: Optional[Window] = None,
               suites: Sequence[str] = SUITES, regions: Sequence[RegionTag] = REGIONS,
               corrupt_at: Optional[Tuple[int, int]] = None,
               hilbert_markers="symbolic") -> List[IdentityReport]:
    """Run the requested suites; ``corrupt_at`` tampers with each suite's primary kernel."""
    window = window or default_window(p)
    reports: List[IdentityReport] = []

    def tampered(kernel: KernelWindow) -> KernelWindow:
        return corrupt(kernel, *corrupt_at) if corrupt_at else kernel

    kernels = {}
    expansion = []

    def expansion_for():
        if not expansion:
            expansion.append(lambda_expansion(p, window))
        return expansion[0]

    def kernel_for(region):
        if region not in kernels:
            kernels[region] = resolvent_window(p, region, window)
        return kernels[region]

    for name in suites:
        if name == "inverse":
            for region in regions:
                reports.append(check_inverse(p, region, window, tampered(kernel_for(region))))
        elif name == "hilbert":
            for region in regions:
                kern = tampered(kernel_for(region)) if corrupt_at else None
                reports.extend(check_hilbert(p, region, window, hilbert_markers, kern,
                                             with_printed=True, base=kernel_for(region)))
        elif name == "theorem1":
            rep = check_theorem1(p, window)
            if corrupt_at:
                direct = tampered(kernel_for(RegionTag.R_BOTH_ABOVE))
                via = resolvent_window(p, RegionTag.R_BOTH_ABOVE, window, method="theorem")
                rep = _run("theorem1_consistency", p, RegionTag.R_BOTH_ABOVE, window,
                           ((mn, via[mn], direct[mn]) for mn in direct.indices()))
            reports.append(rep)
        elif name == "lambda_structure":
            kern = None
            if corrupt_at:
                # an extra pole of order Q + 1 breaks the structure claim
                kern = corrupt(kernel_for(RegionTag.R_BOTH_ABOVE), *corrupt_at,
                               amount=RatFun(1, BiLaurent.lam(Q_total(p) + 1)))
            reports.extend(check_lambda_structure(p, window, kern))
        elif name == "residues":
            kern = tampered(kernel_for(RegionTag.R_BOTH_ABOVE)) if corrupt_at else None
            reports.extend(check_residues(p, window, kern))
        elif name == "modified_inverse":
            exp = expansion_for()
            reports.extend(check_modified_inverse(p, window, exp, tampered(exp.regular)))
        elif name == "residue_algebra":
            exp = expansion_for()
            if corrupt_at and exp.Q:
                exp = LambdaExpansion(exp.Q, [tampered(exp.residues[0])] + exp.residues[1:],
                                      exp.regular, exp.region)
            reports.extend(check_residue_algebra(p, window, exp))
        elif name == "annihilators":
            reports.extend(check_annihilators(p, corrupt_at=corrupt_at[0] if corrupt_at else None))
        else:
            raise ValueError(f"unknown suite {name!r}")
    return reports


def all_passed(reports: Iterable[IdentityReport]) -> bool:
    return all(r.passed for r in reports if not r.advisory)
