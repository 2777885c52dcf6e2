"""Exact scalars: rationals (``fractions.Fraction``) and elements of Q(zeta_n).

A cyclotomic element is stored by its coefficient vector in the power basis
1, z, ..., z^(phi(n)-1) of Q[x]/(Phi_n).  Results that turn out rational are
returned as plain ``Fraction`` so that rational matrices stay rational.
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Union

from . import config


class DivisionByZero(ZeroDivisionError):
    pass


class IncompatibleCyclotomicOrders(ArithmeticError):
    """Raised only when the common embedding would exceed the order bound."""


class OrderBoundExceeded(ValueError):
    pass


def lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _check_order(n: int) -> None:
    if n < 1:
        raise ValueError(f"cyclotomic order must be positive, got {n}")
    bound = config.GUARDS.max_cyclotomic_order
    if n > bound:
        raise OrderBoundExceeded(f"cyclotomic order {n} exceeds bound {bound}")


def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    _check_order(n)
    return _cyclotomic_polynomial(n)


@lru_cache(maxsize=None)
def _cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    num = [-1] + [0] * (n - 1) + [1]
    for d in divisors(n)[:-1]:
        num = _divide_monic(num, _cyclotomic_polynomial(d))
    return tuple(num)


def _divide_monic(num: list[int], den: tuple[int, ...]) -> list[int]:
    num = list(num)
    dd = len(den) - 1
    quot = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c:
            quot[i - dd] = c
            for j in range(dd + 1):
                num[i - dd + j] -= c * den[j]
    assert not any(num[:dd]), "inexact cyclotomic division"
    return quot


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    return len(_cyclotomic_polynomial(n)) - 1


@lru_cache(maxsize=None)
def _mobius(n: int) -> int:
    result, p, m = 1, 2, n
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    if m > 1:
        result = -result
    return result


def _reduce(order: int, poly) -> list[Fraction]:
    """Reduce a coefficient list modulo Phi_order (in place on a copy)."""
    phi = _cyclotomic_polynomial(order)
    deg = len(phi) - 1
    p = [Fraction(c) for c in poly]
    for i in range(len(p) - 1, deg - 1, -1):
        c = p[i]
        if c:
            base = i - deg
            for j in range(deg):
                if phi[j]:
                    p[base + j] -= c * phi[j]
            p[i] = Fraction(0)
    p = p[:deg] + [Fraction(0)] * max(0, deg - len(p))
    return p


def make_cyclotomic(order: int, poly) -> "Scalar":
    """Element of Q(zeta_order) given by any polynomial in zeta; rational results demote."""
    _check_order(order)
    coeffs = _reduce(order, poly)
    if not any(coeffs[1:]):
        return coeffs[0] if coeffs else Fraction(0)
    return Cyclotomic(order, tuple(coeffs))


def zeta(n: int, k: int = 1) -> "Scalar":
    """The root of unity zeta_n^k = exp(2 pi i k / n)."""
    _check_order(n)
    k %= n
    return make_cyclotomic(n, [0] * k + [1])


class Cyclotomic:
    """Non-rational element of Q(zeta_order), reduced modulo Phi_order."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: tuple):
        self.order = order
        self.coeffs = coeffs

    # -- promotion -------------------------------------------------------
    def lifted(self, order: int) -> list[Fraction]:
        if order == self.order:
            return list(self.coeffs)
        if order % self.order:
            raise IncompatibleCyclotomicOrders(f"Q(zeta_{self.order}) does not embed in Q(zeta_{order})")
        step = order // self.order
        poly = [Fraction(0)] * ((len(self.coeffs) - 1) * step + 1)
        for i, c in enumerate(self.coeffs):
            poly[i * step] = c
        return _reduce(order, poly)

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        return _binary(self, other, "add")

    def __radd__(self, other):
        return _binary(other, self, "add")

    def __sub__(self, other):
        return _binary(self, other, "sub")

    def __rsub__(self, other):
        return _binary(other, self, "sub")

    def __mul__(self, other):
        return _binary(self, other, "mul")

    def __rmul__(self, other):
        return _binary(other, self, "mul")

    def __truediv__(self, other):
        return _binary(self, other, "div")

    def __rtruediv__(self, other):
        return _binary(other, self, "div")

    def __neg__(self):
        return Cyclotomic(self.order, tuple(-c for c in self.coeffs))

    def __pos__(self):
        return self

    def __pow__(self, e: int):
        if e < 0:
            return inverse(self) ** (-e)
        result: Scalar = Fraction(1)
        base: Scalar = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __bool__(self):
        return True  # rational (hence possibly zero) values are never Cyclotomic

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return False
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        if other.order == self.order:
            return self.coeffs == other.coeffs
        order = lcm(self.order, other.order)
        return self.lifted(order) == other.lifted(order)

    def __hash__(self):
        # normalized trace is independent of the ambient order
        return hash(normalized_trace(self))

    def __repr__(self):
        return f"Cyclotomic({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


Scalar = Union[Fraction, Cyclotomic]


def as_scalar(x) -> Scalar:
    if isinstance(x, Cyclotomic):
        return x
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_scalar(x)
    raise TypeError(f"not an exact scalar: {x!r}")


def is_rational(x) -> bool:
    return not isinstance(x, Cyclotomic)


def scalar_order(x) -> int:
    return x.order if isinstance(x, Cyclotomic) else 1


def _polymul(a: list, b: list) -> list:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _binary(a, b, op: str) -> Scalar:
    if not isinstance(a, (Cyclotomic, Fraction, int)) or not isinstance(b, (Cyclotomic, Fraction, int)):
        return NotImplemented
    if not isinstance(a, Cyclotomic) and not isinstance(b, Cyclotomic):
        a, b = Fraction(a), Fraction(b)
        if op == "add":
            return a + b
        if op == "sub":
            return a - b
        if op == "mul":
            return a * b
        if b == 0:
            raise DivisionByZero("division by zero")
        return a / b
    if op == "div":
        return _binary(a, inverse(b), "mul")
    order = lcm(scalar_order(a), scalar_order(b))
    if order > config.GUARDS.max_cyclotomic_order:
        raise IncompatibleCyclotomicOrders(f"common order {order} exceeds bound")
    if not isinstance(a, Cyclotomic) and op == "mul":
        return _scale(b, Fraction(a))
    if not isinstance(b, Cyclotomic) and op == "mul":
        return _scale(a, Fraction(b))
    ca = a.lifted(order) if isinstance(a, Cyclotomic) else [Fraction(a)] + [Fraction(0)] * (euler_phi(order) - 1)
    cb = b.lifted(order) if isinstance(b, Cyclotomic) else [Fraction(b)] + [Fraction(0)] * (euler_phi(order) - 1)
    if op == "add":
        return make_cyclotomic(order, [x + y for x, y in zip(ca, cb)])
    if op == "sub":
        return make_cyclotomic(order, [x - y for x, y in zip(ca, cb)])
    return make_cyclotomic(order, _polymul(ca, cb))


def _scale(a: Cyclotomic, r: Fraction) -> Scalar:
    if not r:
        return Fraction(0)
    return Cyclotomic(a.order, tuple(c * r for c in a.coeffs))


def scalar_arith(a, b, op: str) -> Scalar:
    """Exact field arithmetic; ``op`` is one of add, sub, mul, div."""
    if op not in ("add", "sub", "mul", "div"):
        raise ValueError(f"unknown operation {op!r}")
    return _binary(as_scalar(a), as_scalar(b), op)


# -- inversion by extended Euclid in Q[x] ---------------------------------

def _trim(p: list) -> list:
    while p and not p[-1]:
        p.pop()
    return p


def _polydivmod(a: list, b: list) -> tuple[list, list]:
    a = _trim(list(a))
    b = _trim(list(b))
    if len(a) < len(b):
        return [], a
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    lead = b[-1]
    while len(a) >= len(b) and a:
        c = a[-1] / lead
        shift = len(a) - len(b)
        q[shift] = c
        for j, y in enumerate(b):
            a[shift + j] -= c * y
        _trim(a)
    return q, a


def _polysub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


def inverse(x) -> Scalar:
    x = as_scalar(x)
    if not isinstance(x, Cyclotomic):
        if x == 0:
            raise DivisionByZero("inverse of zero")
        return 1 / x
    modulus = [Fraction(c) for c in _cyclotomic_polynomial(x.order)]
    r0, r1 = modulus, _trim(list(x.coeffs))
    s0, s1 = [], [Fraction(1)]
    while r1:
        q, r = _polydivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _polysub(s0, _polymul(q, s1) if q and s1 else [])
    # r0 is a nonzero constant because Phi_n is irreducible
    assert len(r0) == 1, "cyclotomic polynomial not coprime to element"
    c = r0[0]
    return make_cyclotomic(x.order, [v / c for v in s0] or [0])


def conj(x) -> Scalar:
    """Complex conjugation, zeta -> zeta^-1."""
    if not isinstance(x, Cyclotomic):
        return x
    n = x.order
    poly = [Fraction(0)] * n
    for i, c in enumerate(x.coeffs):
        poly[(-i) % n] += c
    return make_cyclotomic(n, poly)


def normalized_trace(x) -> Fraction:
    """Tr_{K/Q}(x) / [K:Q]; independent of the cyclotomic field K containing x."""
    if not isinstance(x, Cyclotomic):
        return Fraction(x)
    n = x.order
    total = Fraction(0)
    for i, c in enumerate(x.coeffs):
        if c:
            m = n // gcd(n, i) if i else 1
            total += c * Fraction(_mobius(m), euler_phi(m))
    return total


def is_zero(x) -> bool:
    return not isinstance(x, Cyclotomic) and x == 0


# -- text format ------------------------------------------------------------
# Rationals print as "p/q"; cyclotomic elements as sums "c*zN^k" with zN = zeta_N.

def _format_rational(r: Fraction) -> str:
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


def format_scalar(x) -> str:
    x = as_scalar(x) if not isinstance(x, (Fraction, Cyclotomic)) else x
    if not isinstance(x, Cyclotomic):
        return _format_rational(x)
    parts = []
    for i, c in enumerate(x.coeffs):
        if not c:
            continue
        if i == 0:
            term = _format_rational(c)
        else:
            power = f"z{x.order}" + (f"^{i}" if i > 1 else "")
            if c == 1:
                term = power
            elif c == -1:
                term = "-" + power
            else:
                term = f"{_format_rational(c)}*{power}"
        parts.append(term)
    out = parts[0]
    for p in parts[1:]:
        out += p if p.startswith("-") else "+" + p
    return out


_TERM = re.compile(
    r"""\s*(?P<sign>[+-])?\s*
        (?:(?P<num>\d+)(?:/(?P<den>\d+))?)?\s*
        (?P<star>\*)?\s*
        (?:z(?P<order>\d+)(?:\^(?P<exp>-?\d+))?)?\s*""",
    re.VERBOSE,
)


class ScalarParseError(ValueError):
    pass


def parse_scalar(text: str) -> Scalar:
    """Parse ``"3/4"``, ``"z3^2"``, ``"1+z3"``, ``"-1/2*z8^3+2"`` and so on."""
    s = text.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    if not s:
        raise ScalarParseError(f"empty scalar {text!r}")
    pos = 0
    total: Scalar = Fraction(0)
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ScalarParseError(f"cannot parse scalar {text!r} at {s[pos:]!r}")
        if not first and m.group("sign") is None:
            raise ScalarParseError(f"missing sign in {text!r}")
        if m.group("num") is None and m.group("order") is None:
            raise ScalarParseError(f"dangling sign in {text!r}")
        if m.group("star") and (m.group("num") is None or m.group("order") is None):
            raise ScalarParseError(f"misplaced '*' in {text!r}")
        if m.group("den") is not None and int(m.group("den")) == 0:
            raise ScalarParseError(f"zero denominator in {text!r}")
        if m.group("order") is not None and int(m.group("order")) == 0:
            raise ScalarParseError(f"z0 is not a root of unity in {text!r}")
        coeff = Fraction(int(m.group("num")), int(m.group("den") or 1)) if m.group("num") else Fraction(1)
        if m.group("sign") == "-":
            coeff = -coeff
        term: Scalar = coeff
        if m.group("order"):
            term = coeff * zeta(int(m.group("order")), int(m.group("exp") or 1))
        total = total + term
        pos = m.end()
        first = False
    return total
