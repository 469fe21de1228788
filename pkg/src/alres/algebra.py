"""Exact arithmetic over Z[w, 1/w, lam] and its fractions.

Everything the resolvent construction touches is an integer Laurent polynomial
in ``w`` and an ordinary polynomial in ``lam``, or a quotient of two such.
Monomials are packed into a single Python int (``w_exp * _B + lam_exp``) so
that multiplication only ever adds integers; coefficients are Python ints.
"""
from __future__ import annotations

import math
from typing import Dict, Iterable, Iterator, Mapping, Optional, Tuple, Union

import numpy as np

from .errors import (
    ExponentGuard,
    NearSingularEvaluation,
    PoleAtOrigin,
    SingularMatrix,
    UnsupportedDenominator,
    ZeroDivide,
)

_B = 1 << 21
EXPONENT_GUARD = 10**6
NEAR_SINGULAR_RTOL = 1e-9


def _pack(wexp: int, lexp: int) -> int:
    return wexp * _B + lexp


def _unpack(key: int) -> Tuple[int, int]:
    return key // _B, key % _B


class BiLaurent:
    """Sparse integer polynomial in w (any exponent) and lam (exponent >= 0).

    Instances are immutable; arithmetic returns new objects.
    """

    __slots__ = ("_t",)

    def __init__(self, terms: Mapping[Tuple[int, int], int] | None = None):
        t: Dict[int, int] = {}
        if terms:
            for (a, b), c in terms.items():
                c = int(c)
                if b < 0:
                    raise ValueError(f"negative lam exponent {b}")
                if abs(a) > EXPONENT_GUARD or b > EXPONENT_GUARD:
                    raise ExponentGuard(f"exponent ({a}, {b}) beyond guard")
                if c:
                    key = _pack(a, b)
                    c += t.get(key, 0)
                    if c:
                        t[key] = c
                    else:
                        t.pop(key, None)
        self._t = t

    @classmethod
    def _raw(cls, t: Dict[int, int]) -> "BiLaurent":
        obj = cls.__new__(cls)
        obj._t = t
        return obj

    # constructors
    @classmethod
    def const(cls, c: int) -> "BiLaurent":
        return cls._raw({0: int(c)} if c else {})

    @classmethod
    def monomial(cls, c: int = 1, wexp: int = 0, lexp: int = 0) -> "BiLaurent":
        return cls({(wexp, lexp): c})

    @classmethod
    def w(cls, power: int = 1) -> "BiLaurent":
        return cls.monomial(1, power, 0)

    @classmethod
    def lam(cls, power: int = 1) -> "BiLaurent":
        return cls.monomial(1, 0, power)

    # inspection
    @property
    def terms(self) -> Dict[Tuple[int, int], int]:
        return {_unpack(k): c for k, c in self._t.items()}

    def items(self) -> Iterator[Tuple[Tuple[int, int], int]]:
        for k, c in self._t.items():
            yield _unpack(k), c

    def is_zero(self) -> bool:
        return not self._t

    def is_one(self) -> bool:
        return self._t == {0: 1}

    def is_monomial(self) -> bool:
        return len(self._t) == 1

    def __len__(self) -> int:
        return len(self._t)

    def w_range(self) -> Tuple[int, int]:
        ws = [k // _B for k in self._t]
        return min(ws), max(ws)

    def lam_degree(self) -> int:
        return max((k % _B for k in self._t), default=0)

    def lam_valuation(self) -> int:
        return min(k % _B for k in self._t)

    def content(self) -> int:
        return math.gcd(*self._t.values()) if self._t else 0

    def lam_coeffs(self) -> Dict[int, "BiLaurent"]:
        """Split into {lam exponent: Laurent polynomial in w}."""
        out: Dict[int, Dict[int, int]] = {}
        for k, c in self._t.items():
            out.setdefault(k % _B, {})[(k // _B) * _B] = c
        return {b: BiLaurent._raw(t) for b, t in out.items()}

    def depends_on_lam(self) -> bool:
        return any(k % _B for k in self._t)

    # arithmetic
    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = BiLaurent.const(other)
        if not isinstance(other, BiLaurent):
            return NotImplemented
        return self._t == other._t

    def __hash__(self) -> int:
        return hash(frozenset(self._t.items()))

    def __neg__(self) -> "BiLaurent":
        return BiLaurent._raw({k: -c for k, c in self._t.items()})

    def __add__(self, other) -> "BiLaurent":
        if isinstance(other, int):
            other = BiLaurent.const(other)
        elif not isinstance(other, BiLaurent):
            return NotImplemented
        a, b = self._t, other._t
        if len(a) < len(b):
            a, b = b, a
        t = dict(a)
        for k, c in b.items():
            c += t.get(k, 0)
            if c:
                t[k] = c
            else:
                del t[k]
        return BiLaurent._raw(t)

    __radd__ = __add__

    def __sub__(self, other) -> "BiLaurent":
        if isinstance(other, int):
            other = BiLaurent.const(other)
        elif not isinstance(other, BiLaurent):
            return NotImplemented
        t = dict(self._t)
        for k, c in other._t.items():
            c = t.get(k, 0) - c
            if c:
                t[k] = c
            else:
                del t[k]
        return BiLaurent._raw(t)

    def __rsub__(self, other) -> "BiLaurent":
        return (-self) + other

    def __mul__(self, other) -> "BiLaurent":
        if isinstance(other, int):
            if not other:
                return BiLaurent._raw({})
            return BiLaurent._raw({k: c * other for k, c in self._t.items()})
        if not isinstance(other, BiLaurent):
            return NotImplemented
        a, b = self._t, other._t
        if not a or not b:
            return BiLaurent._raw({})
        if len(a) > len(b):
            a, b = b, a
        if len(a) == 1:
            ((ka, ca),) = a.items()
            t = {ka + k: ca * c for k, c in b.items()}
        else:
            t = {}
            get = t.get
            bi = list(b.items())
            for ka, ca in a.items():
                for kb, cb in bi:
                    k = ka + kb
                    t[k] = get(k, 0) + ca * cb
            t = {k: c for k, c in t.items() if c}
        return BiLaurent._raw(t)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "BiLaurent":
        if n < 0:
            # only the units +-w^a have inverses in the ring
            if not self.is_monomial():
                raise ValueError("negative power of a non-monomial")
            ((k, c),) = self._t.items()
            if c not in (1, -1) or k % _B:
                raise ValueError("only +-w^a is invertible in the ring")
            return BiLaurent.monomial(c ** abs(n), (k // _B) * n, 0)
        out = BiLaurent.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out.check_guard()

    def check_guard(self, guard: int = EXPONENT_GUARD) -> "BiLaurent":
        if self._t:
            lo, hi = min(self._t) // _B, max(self._t) // _B
            if max(-lo, hi) > guard or self.lam_degree() > guard:
                raise ExponentGuard(f"exponent beyond guard {guard}")
        return self

    def shift(self, wexp: int = 0, lexp: int = 0) -> "BiLaurent":
        """Multiply by the monomial w^wexp lam^lexp (lexp may be negative if divisible)."""
        d = _pack(wexp, lexp)
        if lexp < 0 and self._t and self.lam_valuation() + lexp < 0:
            raise ValueError("lam shift would produce a negative exponent")
        return BiLaurent._raw({k + d: c for k, c in self._t.items()}).check_guard()

    def exact_div_int(self, g: int) -> "BiLaurent":
        return BiLaurent._raw({k: c // g for k, c in self._t.items()})

    def exact_div(self, other: "BiLaurent") -> Optional["BiLaurent"]:
        """Quotient q with q*other == self, or None when other does not divide self.

        Long division on the packed exponent, which is a monomial order.
        """
        if other.is_zero():
            raise ZeroDivide("division by the zero polynomial")
        lead = max(other._t)
        lc = other._t[lead]
        floor = min(self._t, default=0) - min(other._t)
        rem = dict(self._t)
        quot: Dict[int, int] = {}
        while rem:
            top = max(rem)
            c, r = divmod(rem[top], lc)
            lq = top % _B - lead % _B
            k = (top // _B - lead // _B) * _B + lq
            if r or lq < 0 or k < floor:
                return None
            quot[k] = c
            for ko, co in other._t.items():
                kk = k + ko
                v = rem.get(kk, 0) - c * co
                if v:
                    rem[kk] = v
                else:
                    rem.pop(kk, None)
        return BiLaurent._raw(quot)

    def lam_power_map(self, n: int) -> "BiLaurent":
        """lam -> lam**n, a monomial substitution."""
        if n < 0:
            raise ValueError("n must be non-negative")
        if self.lam_degree() * n > EXPONENT_GUARD:
            raise ExponentGuard("substitution would exceed the exponent guard")
        out: Dict[int, int] = {}
        for k, c in self._t.items():
            b = k % _B
            kk = k - b + b * n
            out[kk] = out.get(kk, 0) + c
        return BiLaurent._raw({k: c for k, c in out.items() if c})

    # substitution / evaluation
    def subs_lam(self, value: "RatFun") -> "RatFun":
        """Substitute lam -> value (a RatFun) exactly."""
        parts = self.lam_coeffs()
        if not parts:
            return RatFun.zero()
        d = max(parts)
        num, den = value.num, value.den
        if d * max(num.lam_degree(), den.lam_degree()) > EXPONENT_GUARD:
            raise ExponentGuard("substitution would exceed the exponent guard")
        num_pows = [BiLaurent.const(1)]
        den_pows = [BiLaurent.const(1)]
        for _ in range(d):
            num_pows.append(num_pows[-1] * num)
            den_pows.append(den_pows[-1] * den)
        acc = BiLaurent._raw({})
        for b, coeff in parts.items():
            acc = acc + coeff * num_pows[b] * den_pows[d - b]
        return RatFun(acc, den_pows[d])

    def evaluate(self, w0: complex, lam0: complex = 0.0) -> complex:
        if w0 == 0:
            raise PoleAtOrigin("w0 = 0 is a pole of every Laurent term")
        # Horner in lam over Laurent-in-w coefficients
        parts = self.lam_coeffs()
        if not parts:
            return 0j
        acc = 0j
        for b in range(max(parts), -1, -1):
            acc = acc * lam0
            p = parts.get(b)
            if p is not None:
                acc += p._eval_w(w0)
        return acc

    def _eval_w(self, w0: complex) -> complex:
        ws = sorted(((k // _B), c) for k, c in self._t.items())
        lo = ws[0][0]
        acc = 0j
        prev = ws[-1][0]
        for a, c in reversed(ws):
            acc *= w0 ** (prev - a)
            acc += c
            prev = a
        acc *= w0 ** (prev - lo)
        return acc * w0 ** lo

    def abs_coeff_sum(self) -> int:
        return sum(abs(c) for c in self._t.values())

    # serialization and display
    def to_json(self) -> list:
        return [[a, b, str(c)] for (a, b), c in sorted(self.items())]

    @classmethod
    def from_json(cls, data: Iterable) -> "BiLaurent":
        return cls({(int(a), int(b)): int(c) for a, b, c in data})

    def __repr__(self) -> str:
        return f"BiLaurent({self})"

    def __str__(self) -> str:
        if not self._t:
            return "0"
        out = []
        for (a, b), c in sorted(self.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            mono = []
            if a:
                mono.append("w" if a == 1 else f"w^{a}")
            if b:
                mono.append("lam" if b == 1 else f"lam^{b}")
            if not mono:
                s = str(c)
            elif c == 1:
                s = "*".join(mono)
            elif c == -1:
                s = "-" + "*".join(mono)
            else:
                s = f"{c}*" + "*".join(mono)
            out.append(s)
        return " + ".join(out).replace("+ -", "- ")


_ONE = BiLaurent.const(1)


class RatFun:
    """Quotient num/den of two BiLaurent values.

    Equality is decided by cross-multiplication.  Construction applies the
    cheap normalization only: integer content, a common lam power, and the
    w-monomial part of the denominator are removed; no polynomial gcd.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, normalize: bool = True):
        if isinstance(num, int):
            num = BiLaurent.const(num)
        if den is None:
            den = _ONE
        elif isinstance(den, int):
            den = BiLaurent.const(den)
        if den.is_zero():
            raise ZeroDivide("zero denominator")
        if den.is_one():
            den = _ONE
        self.num = num
        self.den = den
        if normalize and den is not _ONE:
            self._normalize()

    def _normalize(self) -> None:
        num, den = self.num, self.den
        if num.is_zero():
            self.num, self.den = num, _ONE
            return
        wlo = min(den._t) // _B
        lv = min(num.lam_valuation(), den.lam_valuation())
        if wlo or lv:
            num = num.shift(-wlo, -lv)
            den = den.shift(-wlo, -lv)
        g = math.gcd(num.content(), den.content())
        lead = den._t[max(den._t)]
        if lead < 0:
            g = -g
        if g != 1:
            num = num.exact_div_int(g)
            den = den.exact_div_int(g)
        self.num, self.den = num, _ONE if den.is_one() else den

    @classmethod
    def _make(cls, num: BiLaurent, den: BiLaurent) -> "RatFun":
        obj = cls.__new__(cls)
        obj.num = num
        obj.den = den
        return obj

    @classmethod
    def zero(cls) -> "RatFun":
        return _RF_ZERO

    @classmethod
    def one(cls) -> "RatFun":
        return _RF_ONE

    @classmethod
    def w(cls, power: int = 1) -> "RatFun":
        return cls(BiLaurent.w(power))

    @classmethod
    def lam(cls, power: int = 1) -> "RatFun":
        return cls(BiLaurent.lam(power))

    @staticmethod
    def coerce(x) -> "RatFun":
        if isinstance(x, RatFun):
            return x
        if isinstance(x, int):
            return _RF_ZERO if x == 0 else (_RF_ONE if x == 1 else RatFun(x))
        if isinstance(x, BiLaurent):
            return RatFun._make(x, _ONE)
        raise TypeError(f"cannot coerce {type(x).__name__} to RatFun")

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def __eq__(self, other) -> bool:
        if isinstance(other, RatFun) and self.den is other.den:
            return self.num._t == other.num._t
        try:
            other = RatFun.coerce(other)
        except TypeError:
            return NotImplemented
        if self.den == other.den:
            return self.num == other.num
        return self.num * other.den == other.num * self.den

    __hash__ = None

    def __neg__(self) -> "RatFun":
        return RatFun._make(-self.num, self.den)

    def __add__(self, other) -> "RatFun":
        if not isinstance(other, (RatFun, BiLaurent, int)):
            return NotImplemented
        other = RatFun.coerce(other)
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.den._t == other.den._t:
            if self.den.is_one():
                t = self.num + other.num
                return RatFun._make(t, _ONE) if t._t else _RF_ZERO
            return RatFun(self.num + other.num, self.den)
        if other.den.is_one():
            return RatFun(self.num + other.num * self.den, self.den)
        if self.den.is_one():
            return RatFun(self.num * other.den + other.num, other.den)
        return RatFun(self.num * other.den + other.num * self.den,
                      self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other) -> "RatFun":
        if isinstance(other, RatFun) and self.den is _ONE and other.den is _ONE:
            t = self.num - other.num
            return RatFun._make(t, _ONE) if t._t else _RF_ZERO
        return self + (-RatFun.coerce(other))

    def __rsub__(self, other) -> "RatFun":
        return RatFun.coerce(other) - self

    def __mul__(self, other) -> "RatFun":
        if not isinstance(other, (RatFun, BiLaurent, int)):
            return NotImplemented
        other = RatFun.coerce(other)
        if not self.num._t or not other.num._t:
            return _RF_ZERO
        if self.den.is_one() and other.den.is_one():
            return RatFun._make(self.num * other.num, _ONE)
        return RatFun(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RatFun":
        if not isinstance(other, (RatFun, BiLaurent, int)):
            return NotImplemented
        other = RatFun.coerce(other)
        if other.num.is_zero():
            raise ZeroDivide("division by the zero rational function")
        return self * RatFun(other.den, other.num)

    def __rtruediv__(self, other) -> "RatFun":
        return RatFun.coerce(other) / self

    def inverse(self) -> "RatFun":
        return RatFun.one() / self

    def subs_lam(self, value) -> "RatFun":
        value = RatFun.coerce(value)
        return self.num.subs_lam(value) / self.den.subs_lam(value)

    def evaluate(self, w0: complex, lam0: complex = 0.0) -> complex:
        d = self.den.evaluate(w0, lam0)
        thr = NEAR_SINGULAR_RTOL * self.den.abs_coeff_sum()
        if abs(d) < thr:
            raise NearSingularEvaluation(d, thr)
        return self.num.evaluate(w0, lam0) / d

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, data: Mapping) -> "RatFun":
        return cls(BiLaurent.from_json(data["num"]),
                   BiLaurent.from_json(data["den"]), normalize=False)

    def __repr__(self) -> str:
        return f"RatFun({self})"

    def __str__(self) -> str:
        if self.den.is_one():
            return str(self.num)
        return f"({self.num})/({self.den})"


_RF_ZERO = RatFun._make(BiLaurent._raw({}), _ONE)
_RF_ONE = RatFun._make(_ONE, _ONE)

Scalar = Union[int, BiLaurent, RatFun]


class Mat2:
    """2x2 matrix over RatFun, stored row-major as (e11, e12, e21, e22)."""

    __slots__ = ("e",)

    def __init__(self, e11: Scalar, e12: Scalar, e21: Scalar, e22: Scalar):
        c = RatFun.coerce
        self.e = (c(e11), c(e12), c(e21), c(e22))

    @classmethod
    def _raw(cls, e) -> "Mat2":
        obj = cls.__new__(cls)
        obj.e = tuple(e)
        return obj

    @classmethod
    def identity(cls) -> "Mat2":
        return _MAT_ID

    @classmethod
    def zero(cls) -> "Mat2":
        return _MAT_ZERO

    @classmethod
    def diag(cls, a: Scalar, b: Scalar) -> "Mat2":
        return cls(a, 0, 0, b)

    @classmethod
    def w_sigma(cls, power: int = 1) -> "Mat2":
        """w^(power*sigma) = diag(w^power, w^-power)."""
        return cls(BiLaurent.w(power), 0, 0, BiLaurent.w(-power))

    @property
    def e11(self) -> RatFun:
        return self.e[0]

    @property
    def e12(self) -> RatFun:
        return self.e[1]

    @property
    def e21(self) -> RatFun:
        return self.e[2]

    @property
    def e22(self) -> RatFun:
        return self.e[3]

    def rows(self):
        return ((self.e[0], self.e[1]), (self.e[2], self.e[3]))

    def __iter__(self):
        return iter(self.e)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat2):
            return NotImplemented
        return all(x == y for x, y in zip(self.e, other.e))

    __hash__ = None

    def is_zero(self) -> bool:
        return not any(x.num._t for x in self.e)

    def __add__(self, other: "Mat2") -> "Mat2":
        return Mat2._raw(x + y for x, y in zip(self.e, other.e))

    def __sub__(self, other: "Mat2") -> "Mat2":
        return Mat2._raw(x - y for x, y in zip(self.e, other.e))

    def __neg__(self) -> "Mat2":
        return Mat2._raw(-x for x in self.e)

    def __mul__(self, other) -> "Mat2":
        if isinstance(other, Mat2):
            return mat2_mul(self, other)
        s = RatFun.coerce(other)
        return Mat2._raw(x * s for x in self.e)

    def __rmul__(self, other) -> "Mat2":
        s = RatFun.coerce(other)
        return Mat2._raw(s * x for x in self.e)

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return mat2_mul(self, other)

    def det(self) -> RatFun:
        a, b, c, d = self.e
        return a * d - b * c

    def adj(self) -> "Mat2":
        a, b, c, d = self.e
        return Mat2._raw((d, -b, -c, a))

    def inv(self) -> "Mat2":
        return mat2_inv(self)

    def map(self, f) -> "Mat2":
        return Mat2._raw(f(x) for x in self.e)

    def subs_lam(self, value) -> "Mat2":
        value = RatFun.coerce(value)
        return self.map(lambda x: x.subs_lam(value))

    def evaluate(self, w0: complex, lam0: complex = 0.0) -> np.ndarray:
        return np.array([[x.evaluate(w0, lam0) for x in row] for row in self.rows()],
                        dtype=complex)

    def to_json(self) -> list:
        return [[x.to_json() for x in row] for row in self.rows()]

    @classmethod
    def from_json(cls, data) -> "Mat2":
        (a, b), (c, d) = data
        f = RatFun.from_json
        return cls._raw((f(a), f(b), f(c), f(d)))

    def __repr__(self) -> str:
        a, b, c, d = self.e
        return f"Mat2([[{a}, {b}], [{c}, {d}]])"


_MAT_ID = Mat2._raw((_RF_ONE, _RF_ZERO, _RF_ZERO, _RF_ONE))
_MAT_ZERO = Mat2._raw((_RF_ZERO,) * 4)


def ratfun_arith(a: Scalar, b: Scalar, op: str) -> RatFun:
    a, b = RatFun.coerce(a), RatFun.coerce(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def _dot2(x1: BiLaurent, y1: BiLaurent, x2: BiLaurent, y2: BiLaurent) -> RatFun:
    if not (x1._t and y1._t):
        t = x2 * y2 if x2._t and y2._t else None
    elif not (x2._t and y2._t):
        t = x1 * y1
    else:
        t = x1 * y1 + x2 * y2
    return RatFun._make(t, _ONE) if t is not None and t._t else _RF_ZERO


def mat2_mul(A: Mat2, B: Mat2) -> Mat2:
    a, b, c, d = A.e
    p, q, r, s = B.e
    if all(x.den is _ONE for x in A.e) and all(x.den is _ONE for x in B.e):
        a, b, c, d, p, q, r, s = (x.num for x in (a, b, c, d, p, q, r, s))
        return Mat2._raw((_dot2(a, p, b, r), _dot2(a, q, b, s),
                          _dot2(c, p, d, r), _dot2(c, q, d, s)))
    return Mat2._raw((a * p + b * r, a * q + b * s, c * p + d * r, c * q + d * s))


def mat2_inv(A: Mat2) -> Mat2:
    det = A.det()
    if det.is_zero():
        raise SingularMatrix("determinant vanishes identically")
    inv_det = det.inverse()
    return Mat2._raw(x * inv_det for x in A.adj().e)


def eval_numeric(x: Union[RatFun, Mat2, BiLaurent], w0: complex, lam0: complex = 0.0):
    if w0 == 0:
        raise PoleAtOrigin("w0 = 0")
    if isinstance(x, BiLaurent):
        x = RatFun(x)
    return x.evaluate(complex(w0), complex(lam0))


def lambda_series(x: Scalar, low: int, high: int) -> Dict[int, BiLaurent]:
    """Coefficients of lam^low .. lam^high of the Laurent expansion at lam = 0.

    The denominator must be lam^p * d(w, lam) with d(w, 0) a unit of the
    Laurent ring (a monomial +-w^a); every denominator built by this package
    (1, lam^Q, their products) has that form.
    """
    x = RatFun.coerce(x)
    out: Dict[int, BiLaurent] = {}
    if low > high:
        return out
    if x.is_zero():
        return {e: BiLaurent() for e in range(low, high + 1)}
    den = x.den
    p = den.lam_valuation()
    dparts = {b - p: c for b, c in den.lam_coeffs().items()}
    d0 = dparts[0]
    if not d0.is_monomial():
        raise UnsupportedDenominator(f"lam^0 part of denominator is not a unit: {d0}")
    ((k0, c0),) = d0._t.items()
    if c0 not in (1, -1):
        raise UnsupportedDenominator(f"non-unit constant {c0} in denominator")
    d0_inv = BiLaurent.monomial(c0, -(k0 // _B), 0)
    nparts = x.num.lam_coeffs()
    coeffs = []
    for i in range(0, high + p + 1):
        acc = nparts.get(i, BiLaurent())
        for j in range(1, i + 1):
            dj = dparts.get(j)
            if dj is not None and not coeffs[i - j].is_zero():
                acc = acc - dj * coeffs[i - j]
        coeffs.append(acc * d0_inv)
    for e in range(low, high + 1):
        i = e + p
        out[e] = coeffs[i] if 0 <= i < len(coeffs) else BiLaurent()
    return out


def lambda_pole_order(x: Scalar) -> int:
    """Order of the pole at lam = 0 (0 if regular); den must satisfy lambda_series' precondition."""
    x = RatFun.coerce(x)
    if x.is_zero():
        return 0
    return max(0, x.den.lam_valuation() - x.num.lam_valuation())


def mat2_lambda_series(A: Mat2, low: int, high: int) -> Dict[int, Mat2]:
    parts = [lambda_series(x, low, high) for x in A.e]
    return {e: Mat2._raw(RatFun(p[e]) for p in parts) for e in range(low, high + 1)}


def resum(series: Mapping[int, BiLaurent]) -> RatFun:
    """Rebuild sum_e c_e lam^e as a RatFun."""
    lo = min(series, default=0)
    shift = -lo if lo < 0 else 0
    acc = BiLaurent()
    for e, c in series.items():
        acc = acc + c.shift(0, e + shift)
    return RatFun(acc, BiLaurent.lam(shift))
