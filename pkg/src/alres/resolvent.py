"""Extended resolvent kernels of the regularized Ablowitz-Ladik operator.

Kernel entries are stored h-stripped: a window holds Mt[m, n] and the full
matrix element is h**(n - m) * Mt[m, n].  The h-dependence enters only through
the region tag, so ``h`` never appears as a ring variable.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Tuple

import numpy as np

from .algebra import BiLaurent, Mat2, RatFun, lambda_series, mat2_inv
from .errors import BoundarySurface, InvalidResidueIndex, SingularTransition
from .potential import (
    P_LOWER,
    P_UPPER,
    Potential,
    Q_total,
    ordered_prod_left,
    q_count,
    selective_prod_right,
    site_matrix,
    u_site_adj,
    u_tilde_site,
)

Window = Tuple[int, int, int, int]  # m_lo, m_hi, n_lo, n_hi (inclusive)


class RegionTag(str, enum.Enum):
    R_BOTH_BELOW = "R_BOTH_BELOW"  # h > |w|, h > 1/|w|
    R_W_ABOVE = "R_W_ABOVE"  # |w| > h > 1/|w|
    R_WINV_ABOVE = "R_WINV_ABOVE"  # 1/|w| > h > |w|
    R_BOTH_ABOVE = "R_BOTH_ABOVE"  # |w| > h, 1/|w| > h

    @property
    def theta_below(self) -> Tuple[int, int]:
        """Diagonal of the matrix step function theta(h - |w^sigma|)."""
        return {
            RegionTag.R_BOTH_BELOW: (1, 1),
            RegionTag.R_W_ABOVE: (0, 1),
            RegionTag.R_WINV_ABOVE: (1, 0),
            RegionTag.R_BOTH_ABOVE: (0, 0),
        }[self]


REGIONS = tuple(RegionTag)


def region_classify(abs_w: float, h: float, rtol: float = 1e-14) -> RegionTag:
    if not abs_w > 0:
        raise ValueError(f"|w| must be positive, got {abs_w!r}")
    if h < 0:
        raise ValueError(f"h must be non-negative, got {h!r}")
    if h == 0:
        return RegionTag.R_BOTH_ABOVE
    if math.isclose(abs_w, h, rel_tol=rtol) or math.isclose(abs_w * h, 1.0, rel_tol=rtol):
        raise BoundarySurface(f"|w| = {abs_w!r}, h = {h!r} lies on a discontinuity surface")
    w_above = abs_w > h
    winv_above = 1.0 / abs_w > h
    if w_above and winv_above:
        return RegionTag.R_BOTH_ABOVE
    if w_above:
        return RegionTag.R_W_ABOVE
    if winv_above:
        return RegionTag.R_WINV_ABOVE
    return RegionTag.R_BOTH_BELOW


@dataclass
class KernelWindow:
    m_lo: int
    m_hi: int
    n_lo: int
    n_hi: int
    region: RegionTag
    entries: Dict[Tuple[int, int], Mat2] = field(default_factory=dict)
    label: str = "resolvent"

    @property
    def window(self) -> Window:
        return (self.m_lo, self.m_hi, self.n_lo, self.n_hi)

    def __getitem__(self, mn: Tuple[int, int]) -> Mat2:
        return self.entries[mn]

    def __setitem__(self, mn: Tuple[int, int], value: Mat2) -> None:
        self.entries[mn] = value

    def __contains__(self, mn) -> bool:
        return mn in self.entries

    def indices(self) -> Iterator[Tuple[int, int]]:
        for m in range(self.m_lo, self.m_hi + 1):
            for n in range(self.n_lo, self.n_hi + 1):
                yield m, n

    def map(self, f: Callable[[Mat2], Mat2], label: Optional[str] = None) -> "KernelWindow":
        return KernelWindow(*self.window, self.region,
                            {mn: f(x) for mn, x in self.entries.items()},
                            label or self.label)

    def copy(self) -> "KernelWindow":
        return self.map(lambda x: x)

    @staticmethod
    def h_exp(m: int, n: int) -> int:
        return n - m

    def full_entry(self, m: int, n: int, w0: complex, lam0: complex, h0: float) -> np.ndarray:
        mt = self.entries[m, n]
        if mt.is_zero():
            return np.zeros((2, 2), dtype=complex)
        return h0 ** (n - m) * mt.evaluate(w0, lam0)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "region": self.region.value,
            "window": {"m_lo": self.m_lo, "m_hi": self.m_hi,
                       "n_lo": self.n_lo, "n_hi": self.n_hi},
            "entries": [
                {"m": m, "n": n, "h_exp": n - m, "matrix": self.entries[m, n].to_json()}
                for m, n in sorted(self.entries)
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "KernelWindow":
        w = data["window"]
        kw = cls(w["m_lo"], w["m_hi"], w["n_lo"], w["n_hi"], RegionTag(data["region"]),
                 label=data.get("label", "resolvent"))
        for item in data["entries"]:
            kw[item["m"], item["n"]] = Mat2.from_json(item["matrix"])
        return kw


@dataclass
class LambdaExpansion:
    Q: int
    residues: List[KernelWindow]  # residues[j-1] holds M^(j)
    regular: KernelWindow
    region: RegionTag = RegionTag.R_BOTH_ABOVE

    def residue(self, j: int) -> Optional[KernelWindow]:
        """M^(j); None stands for the identically-zero M^(Q+1)."""
        if j == self.Q + 1:
            return None
        if not 1 <= j <= self.Q:
            raise InvalidResidueIndex(f"j = {j} outside 1..{self.Q}")
        return self.residues[j - 1]

    def to_json(self) -> dict:
        return {
            "Q": self.Q,
            "region": self.region.value,
            "residues": [r.to_json() for r in self.residues],
            "regular": self.regular.to_json(),
        }


def default_window(p: Potential, margin: Optional[int] = None) -> Window:
    if margin is None:
        margin = 3 + Q_total(p)
    return (p.k - margin, p.K + margin, p.k - margin, p.K + margin)


# annihilator column / row and transition matrix

def x_col(p: Potential, m: int, regularized: bool = True) -> Mat2:
    if m <= p.k:
        return Mat2.w_sigma(m)
    return ordered_prod_left(p, p.k, m - 1, regularized) @ Mat2.w_sigma(p.k)


def y_row(p: Potential, n: int, regularized: bool = True) -> Mat2:
    if n >= p.K:
        return Mat2.w_sigma(-n)
    return Mat2.w_sigma(-p.K) @ ordered_prod_left(p, n + 1, p.K, regularized)


def a_matrix(p: Potential, regularized: bool = True) -> Mat2:
    return Mat2.w_sigma(-p.K) @ ordered_prod_left(p, p.k, p.K, regularized) @ Mat2.w_sigma(p.k)


def _gamma_parts(p: Potential, region: RegionTag, regularized: bool) -> Tuple[Mat2, BiLaurent]:
    """Gamma as (polynomial matrix G, polynomial delta) with Gamma = G / delta."""
    if region is RegionTag.R_BOTH_BELOW:
        return Mat2.zero(), BiLaurent.const(1)
    a = a_matrix(p, regularized)
    if region is RegionTag.R_W_ABOVE:
        a11 = a.e11
        if a11.is_zero():
            raise SingularTransition(f"a11 vanishes identically for {p}")
        return P_UPPER, a11.num
    if region is RegionTag.R_WINV_ABOVE:
        a22 = a.e22
        if a22.is_zero():
            raise SingularTransition(f"a22 vanishes identically for {p}")
        return Mat2.diag(0, 1), a22.num
    if not regularized and Q_total(p) > 0:
        raise ValueError("R_BOTH_ABOVE needs the regularized transition matrix when Q > 0")
    det = a.det()
    if det.is_zero():
        raise SingularTransition(f"det a vanishes identically for {p}")
    return a.adj(), det.num


def gamma(p: Potential, region: RegionTag, regularized: bool = True) -> Mat2:
    G, delta = _gamma_parts(p, region, regularized)
    inv = RatFun(BiLaurent.const(1), delta)
    return G * inv


def free_resolvent_entry(region: RegionTag, m: int, n: int) -> Tuple[Mat2, int]:
    """Closed-form zero-potential kernel: (h-stripped matrix, h exponent n - m)."""
    t1, t2 = region.theta_below
    lower = 1 if m >= n + 1 else 0
    upper = 1 if n >= m else 0
    d = m - n - 1
    c1 = t1 * lower - (1 - t1) * upper
    c2 = t2 * lower - (1 - t2) * upper
    return Mat2.diag(BiLaurent.monomial(c1, d, 0), BiLaurent.monomial(c2, -d, 0)), n - m


def _left_products(p: Potential, window: Window, regularized: bool) -> Dict[Tuple[int, int], Mat2]:
    """theta(m >= n+1) * (u_{m-1} ... u_{n+1}) over the window."""
    m_lo, m_hi, n_lo, n_hi = window
    out: Dict[Tuple[int, int], Mat2] = {}
    for n in range(n_lo, n_hi + 1):
        prod = Mat2.identity()
        for m in range(n + 1, m_hi + 1):
            if m > n + 1:
                prod = site_matrix(p, m - 1, regularized) @ prod
            if m >= m_lo:
                out[m, n] = prod
    return out


def _theorem_window(p: Potential, region: RegionTag, window: Window,
                    regularized: bool) -> KernelWindow:
    m_lo, m_hi, n_lo, n_hi = window
    G, delta = _gamma_parts(p, region, regularized)
    lefts = _left_products(p, window, regularized)
    xs = {m: x_col(p, m, regularized) for m in range(m_lo, m_hi + 1)}
    ys = {n: y_row(p, n, regularized) for n in range(n_lo, n_hi + 1)}
    xG = {m: x @ G for m, x in xs.items()}
    dmat = Mat2(delta, 0, 0, delta)
    kw = KernelWindow(*window, region)
    trivial = delta.is_one()
    for m in range(m_lo, m_hi + 1):
        for n in range(n_lo, n_hi + 1):
            numer = -(xG[m] @ ys[n])
            left = lefts.get((m, n))
            if left is not None:
                numer = numer + (left if trivial else dmat @ left)
            if trivial:
                kw[m, n] = numer
            else:
                kw[m, n] = numer.map(lambda e: RatFun(e.num, delta))
    return kw


def _inverse_product_window(p: Potential, window: Window, regularized: bool) -> KernelWindow:
    """Mt[m, n] = -theta(n >= m) (u_n ... u_m)^{-1}, built from adjugates over lam^q."""
    m_lo, m_hi, n_lo, n_hi = window
    kw = KernelWindow(*window, RegionTag.R_BOTH_ABOVE)
    zero = Mat2.zero()
    for m in range(m_lo, m_hi + 1):
        prod = Mat2.identity()
        q = 0
        for n in range(m, n_hi + 1):
            prod = prod @ u_site_adj(p, n, regularized)
            if p.is_degenerate(n):
                if not regularized:
                    raise ValueError("degenerate site needs the regularized operator")
                q += 1
            if n >= n_lo:
                den = BiLaurent.lam(q)
                kw[m, n] = prod.map(lambda e: RatFun(-e.num, den))
        for n in range(n_lo, min(m, n_hi + 1)):
            kw[m, n] = zero
    return kw


def resolvent_window(p: Potential, region: RegionTag, window: Optional[Window] = None,
                     regularized: bool = True, method: str = "auto") -> KernelWindow:
    """Exact h-stripped kernel Mt[m, n] on a window.

    ``method='auto'`` uses the shortest closed form for the region (the
    inverse-product form in R_BOTH_ABOVE); ``method='theorem'`` always goes
    through the x * Gamma * y representation.
    """
    if window is None:
        window = default_window(p)
    if method == "auto" and region is RegionTag.R_BOTH_ABOVE:
        return _inverse_product_window(p, window, regularized)
    if method not in ("auto", "theorem"):
        raise ValueError(f"unknown method {method!r}")
    return _theorem_window(p, region, window, regularized)


def free_resolvent_window(region: RegionTag, window: Window) -> KernelWindow:
    kw = KernelWindow(*window, region, label="free")
    for m, n in kw.indices():
        kw[m, n] = free_resolvent_entry(region, m, n)[0]
    return kw


# lam -> 0 structure

def a_inverse_expansion(p: Potential, printed_exponent: bool = False) -> List[Mat2]:
    """Coefficients of lam^-Q .. lam^0 of a(w, lam)^-1.

    The lam^-j coefficient is w^(Q-j) w^(-k sigma) S_(Q-j) w^(K sigma), with
    S_i the selective right product over [k, K].  ``printed_exponent=True``
    uses w^Q instead of w^(Q-j); kept only to demonstrate that variant fails.
    """
    Q = Q_total(p)
    left, right = Mat2.w_sigma(-p.k), Mat2.w_sigma(p.K)
    out = []
    for j in range(Q, -1, -1):
        scal = RatFun(BiLaurent.w(Q if printed_exponent else Q - j))
        sel = selective_prod_right(p, p.k, p.K, Q - j)
        out.append(scal * (left @ sel @ right))
    return out


def residue_window(p: Potential, j: int, window: Optional[Window] = None) -> KernelWindow:
    """M^(j): -theta(n >= m) theta(q >= j) w^(q-j) S_(q-j)[m, n], h-stripped."""
    Q = Q_total(p)
    if not 1 <= j <= Q:
        raise InvalidResidueIndex(f"j = {j} outside 1..{Q}")
    return _selective_window(p, j, window or default_window(p), f"residue {j}")


def _selective_windows(p: Potential, window: Window) -> List[KernelWindow]:
    """Closed-form lam^-j coefficients of the R_BOTH_ABOVE kernel for j = 0..Q.

    One pass per row m: dp[i] holds the selective right product over [m, n]
    with i replaced factors, extended one site at a time.
    """
    Q = Q_total(p)
    labels = ["regular"] + [f"residue{j}" for j in range(1, Q + 1)]
    out = [KernelWindow(*window, RegionTag.R_BOTH_ABOVE, label=lab) for lab in labels]
    m_lo, m_hi, n_lo, n_hi = window
    zero = Mat2.zero()
    for m in range(m_lo, m_hi + 1):
        for n in range(n_lo, min(m - 1, n_hi) + 1):
            for kw in out:
                kw[m, n] = zero
        dp: List[Optional[Mat2]] = [Mat2.identity()] + [None] * Q
        q = 0
        for n in range(m, n_hi + 1):
            ut = u_tilde_site(p, n)
            if p.is_degenerate(n):
                q += 1
                new = [None] * (Q + 1)
                for i in range(q + 1):
                    acc = dp[i] @ ut if dp[i] is not None else None
                    if i > 0 and dp[i - 1] is not None:
                        rep = dp[i - 1] @ P_LOWER
                        acc = rep if acc is None else acc + rep
                    new[i] = acc
                dp = new
            else:
                dp = [d @ ut if d is not None else None for d in dp]
            if n < n_lo:
                continue
            for j, kw in enumerate(out):
                if j > q:
                    kw[m, n] = zero
                else:
                    kw[m, n] = -(RatFun(BiLaurent.w(q - j)) * dp[q - j])
    return out


def _selective_window(p: Potential, j: int, window: Window, label: str) -> KernelWindow:
    kw = _selective_windows(p, window)[j]
    kw.label = label
    return kw


def regular_part_window(p: Potential, window: Optional[Window] = None) -> KernelWindow:
    """lam^0 coefficient of the R_BOTH_ABOVE kernel (closed form, j = 0 of the residue formula)."""
    return _selective_window(p, 0, window or default_window(p), "regular")


def series_window(kernel: KernelWindow, exponent: int, label: str) -> KernelWindow:
    """Coefficient of lam^exponent of every entry, via exact power-series division."""
    def coeff(A: Mat2) -> Mat2:
        return A.map(lambda x: RatFun(lambda_series(x, exponent, exponent)[exponent]))
    return kernel.map(coeff, label)


def limit_resolvent_window(p: Potential, region: RegionTag,
                           window: Optional[Window] = None) -> KernelWindow:
    """Resolvent of the unregularized operator: lam = 0 value, or the regular part in R_BOTH_ABOVE."""
    window = window or default_window(p)
    kernel = resolvent_window(p, region, window, regularized=True)
    if region is RegionTag.R_BOTH_ABOVE:
        return series_window(kernel, 0, "limit")
    zero = RatFun.zero()

    def at_zero(A: Mat2) -> Mat2:
        try:
            return A.subs_lam(zero)
        except ZeroDivisionError as exc:
            raise SingularTransition(f"lam = 0 limit does not exist for {p}") from exc
    return kernel.map(at_zero, "limit")


def lambda_expansion(p: Potential, window: Optional[Window] = None) -> LambdaExpansion:
    window = window or default_window(p)
    Q = Q_total(p)
    parts = _selective_windows(p, window)
    return LambdaExpansion(Q, parts[1:], parts[0])
