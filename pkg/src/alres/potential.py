"""Binary finite-support potentials and the site matrices built from them."""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Tuple

from .algebra import BiLaurent, Mat2
from .errors import EmptyInterval, InvalidRange, ParseError

# diag(0, 1) = (1 - sigma)/2 and diag(1, 0) = (1 + sigma)/2
P_LOWER = Mat2.diag(0, 1)
P_UPPER = Mat2.diag(1, 0)
_W = BiLaurent.w()
_WINV = BiLaurent.w(-1)
_LAM_W = BiLaurent.monomial(1, 1, 1)  # lam * w


@dataclass(frozen=True)
class Potential:
    """Sequences r, s in {0, 1} supported on [k, K]; zero elsewhere."""

    k: int
    r: Tuple[int, ...]
    s: Tuple[int, ...]

    def __post_init__(self):
        r, s = tuple(int(x) for x in self.r), tuple(int(x) for x in self.s)
        if len(r) != len(s):
            raise ValueError("r and s must have equal length")
        if not r:
            raise ValueError("empty support")
        if any(x not in (0, 1) for x in r + s):
            raise ValueError("potential values must be 0 or 1")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "s", s)

    @property
    def K(self) -> int:
        return self.k + len(self.r) - 1

    def r_at(self, n: int) -> int:
        return self.r[n - self.k] if self.k <= n <= self.K else 0

    def s_at(self, n: int) -> int:
        return self.s[n - self.k] if self.k <= n <= self.K else 0

    def is_degenerate(self, n: int) -> bool:
        return bool(self.r_at(n) and self.s_at(n))

    def degenerate_sites(self) -> List[int]:
        return [n for n in range(self.k, self.K + 1) if self.is_degenerate(n)]

    @property
    def Q(self) -> int:
        return Q_total(self)

    @classmethod
    def zero(cls, k: int = 0, length: int = 1) -> "Potential":
        return cls(k, (0,) * length, (0,) * length)

    @classmethod
    def random(cls, length: int, rng: random.Random, k: int = 0) -> "Potential":
        return cls(k, tuple(rng.randint(0, 1) for _ in range(length)),
                   tuple(rng.randint(0, 1) for _ in range(length)))

    def to_json(self) -> dict:
        return {"k": self.k, "r": list(self.r), "s": list(self.s)}

    def __str__(self) -> str:
        r = "".join(map(str, self.r))
        s = "".join(map(str, self.s))
        return f"Potential(k={self.k}, r={r}, s={s})"


def all_potentials(length: int, k: int = 0) -> Iterator[Potential]:
    """Every binary potential on [k, k+length-1] (4**length of them)."""
    for bits in itertools.product((0, 1), repeat=2 * length):
        yield Potential(k, bits[:length], bits[length:])


def parse_potential(text: str, source: str = "<string>") -> Potential:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{source}: top level must be an object")
    for field in ("k", "r", "s"):
        if field not in data:
            raise ParseError(f"{source}: missing field {field!r}")
    k = data["k"]
    if not isinstance(k, int) or isinstance(k, bool):
        raise ParseError(f"{source}: field 'k' must be an integer")
    for field in ("r", "s"):
        vals = data[field]
        if not isinstance(vals, list):
            raise ParseError(f"{source}: field {field!r} must be a list")
        for i, v in enumerate(vals):
            if isinstance(v, bool) or v not in (0, 1):
                raise ParseError(f"{source}: field {field!r}[{i}] = {v!r} is not 0/1")
    if len(data["r"]) != len(data["s"]):
        raise ParseError(f"{source}: fields 'r' and 's' differ in length")
    if not data["r"]:
        raise ParseError(f"{source}: field 'r' is empty (zero-length support)")
    return Potential(k, tuple(data["r"]), tuple(data["s"]))


def load_potential(path) -> Potential:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    return parse_potential(text, str(path))


def u_site(p: Potential, n: int) -> Mat2:
    return Mat2(_W, p.r_at(n), p.s_at(n), _WINV)


def u_site_reg(p: Potential, n: int) -> Mat2:
    if p.is_degenerate(n):
        return Mat2(_W + _LAM_W, 1, 1, _WINV)
    return u_site(p, n)


def u_site_adj(p: Potential, n: int, regularized: bool = True) -> Mat2:
    """Adjugate of the (regularized) site matrix: u~_n + lam*w*(1-det u_n)*diag(0,1)."""
    r, s = p.r_at(n), p.s_at(n)
    e22 = _W + _LAM_W if (regularized and r and s) else _W
    return Mat2(_WINV, -r, -s, e22)


def u_tilde_site(p: Potential, n: int) -> Mat2:
    return Mat2(_WINV, -p.r_at(n), -p.s_at(n), _W)


def site_matrix(p: Potential, n: int, regularized: bool) -> Mat2:
    return u_site_reg(p, n) if regularized else u_site(p, n)


def q_count(p: Potential, m: int, n: int) -> int:
    if m > n:
        raise EmptyInterval(f"q({m}, {n}) needs m <= n")
    lo, hi = max(m, p.k), min(n, p.K)
    return sum(1 for l in range(lo, hi + 1) if p.is_degenerate(l))


def Q_total(p: Potential) -> int:
    return q_count(p, p.k, p.K)


def degeneracy_flags(p: Potential) -> List[int]:
    return [int(p.is_degenerate(n)) for n in range(p.k, p.K + 1)]


def ordered_prod_left(p: Potential, lo: int, hi: int, regularized: bool = True) -> Mat2:
    """u_hi * u_{hi-1} * ... * u_lo; identity for the empty range hi = lo - 1."""
    if hi < lo - 1:
        raise InvalidRange(f"left product over [{lo}, {hi}]")
    out = Mat2.identity()
    for l in range(lo, hi + 1):
        out = site_matrix(p, l, regularized) @ out
    return out


def selective_prod_right(p: Potential, m: int, n: int, j: int) -> Mat2:
    """Sum over j-subsets of degenerate sites in [m, n] of u~_m...u~_n with the
    chosen factors replaced by diag(0, 1)."""
    if m > n:
        raise EmptyInterval(f"selective product over [{m}, {n}]")
    if j < 0:
        raise ValueError("j must be non-negative")
    # dp[i] accumulates the partial products with i replacements so far
    dp: List[Mat2 | None] = [Mat2.identity()] + [None] * j
    for l in range(m, n + 1):
        ut = u_tilde_site(p, l)
        degen = p.is_degenerate(l)
        new: List[Mat2 | None] = [None] * (j + 1)
        for i in range(j + 1):
            acc = dp[i] @ ut if dp[i] is not None else None
            if degen and i > 0 and dp[i - 1] is not None:
                rep = dp[i - 1] @ P_LOWER
                acc = rep if acc is None else acc + rep
            new[i] = acc
        dp = new
    return dp[j] if dp[j] is not None else Mat2.zero()


def selective_prod_brute(p: Potential, m: int, n: int, j: int) -> Mat2:
    """Enumerating oracle for selective_prod_right."""
    degen = [l for l in range(m, n + 1) if p.is_degenerate(l)]
    total = Mat2.zero()
    for chosen in itertools.combinations(degen, j):
        prod = Mat2.identity()
        for l in range(m, n + 1):
            prod = prod @ (P_LOWER if l in chosen else u_tilde_site(p, l))
        total = total + prod
    return total
