"""
Exact scalar arithmetic.

Everything in this package is computed over Q(q), the field of rational
functions in an indeterminate q, with an extra polynomial variable z for the
quasi-periodic boundary twist.  The layers are

    BigRat     -> fractions.Fraction
    PolyQ      -> polynomials in q with rational coefficients
    RatFuncQ   -> reduced quotients of PolyQ with monic denominator
    PolyZ      -> polynomials in z with RatFuncQ coefficients
    VSeries    -> truncated power series over any ring
    MultiPoly  -> sparse commutative polynomials in named variables

All values are immutable.  Canonical forms are unique, so ``==`` is the
equality test of the underlying mathematical objects.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Sequence

BigRat = Fraction

_INT_TYPES = (int, Fraction)


def _norm(c):
    # keep integral coefficients as plain ints: int arithmetic is much faster
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def _strip(coeffs: list) -> tuple:
    i = len(coeffs)
    while i and not coeffs[i - 1]:
        i -= 1
    return tuple(_norm(c) for c in coeffs[:i])


def _rat_str(c) -> str:
    c = Fraction(c)
    return f"{c.numerator}/{c.denominator}"


def _parse_rat(s) -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    return Fraction(str(s))


class RingError(ArithmeticError):
    """Raised on non-invertible elements or mismatched operands."""


class PolyQ:
    """Univariate polynomial in q, coefficients ascending by power."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable = ()):
        self.c = _strip([Fraction(x) if isinstance(x, str) else x for x in coeffs])

    @classmethod
    def _raw(cls, c: tuple) -> "PolyQ":
        p = object.__new__(cls)
        p.c = c
        return p

    @classmethod
    def monomial(cls, power: int, coeff=1) -> "PolyQ":
        if power < 0:
            raise ValueError("negative power in a polynomial")
        if not coeff:
            return PolyQ.ZERO
        return cls._raw((0,) * power + (_norm(coeff),))

    @classmethod
    def const(cls, c) -> "PolyQ":
        return cls._raw((_norm(c),)) if c else PolyQ.ZERO

    # -- inspection
    def degree(self) -> int:
        return len(self.c) - 1

    def valuation(self) -> int:
        for i, x in enumerate(self.c):
            if x:
                return i
        return -1

    def is_zero(self) -> bool:
        return not self.c

    def is_one(self) -> bool:
        return self.c == (1,)

    def is_monomial(self) -> bool:
        return bool(self.c) and not any(self.c[:-1])

    def lc(self):
        return self.c[-1]

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        if isinstance(other, PolyQ):
            return self.c == other.c
        if isinstance(other, _INT_TYPES):
            return self.c == ((_norm(other),) if other else ())
        return NotImplemented

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return f"PolyQ({list(self.c)!r})"

    def __str__(self):
        return _poly_str(self.c, "q")

    # -- arithmetic
    def __neg__(self):
        return PolyQ._raw(tuple(-x for x in self.c))

    def __add__(self, other):
        if not isinstance(other, PolyQ):
            if isinstance(other, _INT_TYPES):
                other = PolyQ.const(other)
            else:
                return NotImplemented
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        res = list(a)
        for i, x in enumerate(b):
            res[i] += x
        return PolyQ._raw(_strip(res))

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, PolyQ):
            if isinstance(other, _INT_TYPES):
                other = PolyQ.const(other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, PolyQ):
            if isinstance(other, _INT_TYPES):
                if not other:
                    return PolyQ.ZERO
                return PolyQ._raw(tuple(_norm(x * other) for x in self.c))
            return NotImplemented
        a, b = self.c, other.c
        if not a or not b:
            return PolyQ.ZERO
        if len(a) == 1 and a[0] == 1:
            return other
        if len(b) == 1 and b[0] == 1:
            return self
        res = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        res[i + j] += x * y
        return PolyQ._raw(_strip(res))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative exponent")
        result, base = PolyQ.ONE, self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def shift(self, m: int) -> "PolyQ":
        """Multiply by q^m (m may be negative if the result stays polynomial)."""
        if not self.c or m == 0:
            return self
        if m > 0:
            return PolyQ._raw((0,) * m + self.c)
        if any(self.c[:-m]):
            raise RingError("shift would leave a negative power of q")
        return PolyQ._raw(self.c[-m:])

    def scale_q(self, factor: int) -> "PolyQ":
        """Substitute q -> q^factor."""
        if factor <= 0:
            raise ValueError("substitution exponent must be positive")
        if len(self.c) <= 1 or factor == 1:
            return self
        res = [0] * ((len(self.c) - 1) * factor + 1)
        for i, x in enumerate(self.c):
            res[i * factor] = x
        return PolyQ._raw(tuple(res))

    def divmod(self, other: "PolyQ") -> tuple["PolyQ", "PolyQ"]:
        if not other.c:
            raise ZeroDivisionError("polynomial division by zero")
        num = list(self.c)
        db = len(other.c) - 1
        if len(num) - 1 < db:
            return PolyQ.ZERO, self
        inv = Fraction(1) / Fraction(other.c[-1]) if other.c[-1] not in (1, -1) else other.c[-1]
        quot = [0] * (len(num) - db)
        for i in range(len(num) - 1 - db, -1, -1):
            coef = num[i + db]
            if coef:
                coef = _norm(coef * inv)
                quot[i] = coef
                for j, y in enumerate(other.c):
                    if y:
                        num[i + j] -= coef * y
        return PolyQ._raw(_strip(quot)), PolyQ._raw(_strip(num[:db]))

    def exact_div(self, other: "PolyQ") -> "PolyQ":
        quot, rem = self.divmod(other)
        if rem.c:
            raise RingError(f"{self} is not divisible by {other}")
        return quot

    def monic(self) -> "PolyQ":
        if not self.c or self.c[-1] == 1:
            return self
        return self * (Fraction(1) / Fraction(self.c[-1]))

    def derivative(self) -> "PolyQ":
        return PolyQ._raw(_strip([i * x for i, x in enumerate(self.c)][1:]))

    def __call__(self, x):
        acc = 0
        for coef in reversed(self.c):
            acc = acc * x + coef
        return acc

    def to_json(self) -> list[str]:
        return [_rat_str(x) for x in self.c]

    @classmethod
    def from_json(cls, data: Sequence) -> "PolyQ":
        return cls(_parse_rat(s) for s in data)


def _poly_str(c: tuple, var: str) -> str:
    if not c:
        return "0"
    terms = []
    for i, x in enumerate(c):
        if not x:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if mono and x == 1:
            terms.append(mono)
        elif mono and x == -1:
            terms.append("-" + mono)
        else:
            s = str(x)
            if mono and isinstance(x, Fraction):
                s = f"({s})"
            terms.append(s + ("*" + mono if mono else ""))
    return " + ".join(terms).replace("+ -", "- ")


PolyQ.ZERO = PolyQ._raw(())
PolyQ.ONE = PolyQ._raw((1,))


def poly_gcd(a: PolyQ, b: PolyQ) -> PolyQ:
    """Monic gcd by the Euclidean algorithm over Q."""
    while b.c:
        a, b = b, a.divmod(b)[1]
    return a.monic() if a.c else PolyQ.ONE


class RatFuncQ:
    """Element of Q(q) stored as num/den, coprime, den monic."""

    __slots__ = ("num", "den")

    def __init__(self, num=0, den=None):
        if not isinstance(num, PolyQ):
            num = PolyQ.const(num) if isinstance(num, _INT_TYPES) else PolyQ(num)
        if den is None:
            self.num, self.den = num, PolyQ.ONE
            return
        if not isinstance(den, PolyQ):
            den = PolyQ.const(den) if isinstance(den, _INT_TYPES) else PolyQ(den)
        if not den.c:
            raise ZeroDivisionError("rational function with zero denominator")
        self.num, self.den = _reduce(num, den)

    @classmethod
    def _raw(cls, num: PolyQ, den: PolyQ) -> "RatFuncQ":
        r = object.__new__(cls)
        r.num, r.den = num, den
        return r

    @classmethod
    def q_power(cls, m: int) -> "RatFuncQ":
        if m >= 0:
            return cls._raw(PolyQ.monomial(m), PolyQ.ONE)
        return cls._raw(PolyQ.ONE, PolyQ.monomial(-m))

    def is_zero(self) -> bool:
        return not self.num.c

    def is_polynomial(self) -> bool:
        return self.den.c == (1,)

    def __bool__(self):
        return bool(self.num.c)

    def __eq__(self, other):
        if isinstance(other, RatFuncQ):
            return self.num.c == other.num.c and self.den.c == other.den.c
        if isinstance(other, (PolyQ,) + _INT_TYPES):
            return self.den.c == (1,) and self.num == other
        return NotImplemented

    def __hash__(self):
        return hash((self.num.c, self.den.c))

    def __repr__(self):
        return f"RatFuncQ({list(self.num.c)!r}, {list(self.den.c)!r})"

    def __str__(self):
        if self.den.c == (1,):
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __neg__(self):
        return RatFuncQ._raw(-self.num, self.den)

    def __add__(self, other):
        if not isinstance(other, RatFuncQ):
            other = _to_ratfunc(other)
            if other is NotImplemented:
                return NotImplemented
        if self.den.c == (1,) and other.den.c == (1,):
            return RatFuncQ._raw(self.num + other.num, PolyQ.ONE)
        if self.den == other.den:
            return RatFuncQ._raw(*_reduce(self.num + other.num, self.den))
        return RatFuncQ._raw(*_reduce(self.num * other.den + other.num * self.den,
                                      self.den * other.den))

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, RatFuncQ):
            other = _to_ratfunc(other)
            if other is NotImplemented:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, RatFuncQ):
            if isinstance(other, _INT_TYPES):
                return RatFuncQ._raw(self.num * other, self.den) if other else RatFuncQ.ZERO
            other = _to_ratfunc(other)
            if other is NotImplemented:
                return NotImplemented
        if self.den.c == (1,) and other.den.c == (1,):
            return RatFuncQ._raw(self.num * other.num, PolyQ.ONE)
        if not self.num.c or not other.num.c:
            return RatFuncQ.ZERO
        n1, d2 = _cancel(self.num, other.den)
        n2, d1 = _cancel(other.num, self.den)
        num, den = n1 * n2, d1 * d2
        lc = den.c[-1]
        if lc != 1:
            inv = Fraction(1) / Fraction(lc)
            num, den = num * inv, den * inv
        return RatFuncQ._raw(num, den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFuncQ":
        if not self.num.c:
            raise ZeroDivisionError("inverse of zero rational function")
        num, den = self.den, self.num
        lc = den.c[-1]
        if lc != 1:
            inv = Fraction(1) / Fraction(lc)
            num, den = num * inv, den * inv
        return RatFuncQ._raw(num, den)

    def __truediv__(self, other):
        if not isinstance(other, RatFuncQ):
            other = _to_ratfunc(other)
            if other is NotImplemented:
                return NotImplemented
        if not other.num.c:
            raise ZeroDivisionError("rational function division by zero")
        if self.den.c == (1,) and other.den.c == (1,):
            quot, rem = self.num.divmod(other.num)
            if not rem.c:
                return RatFuncQ._raw(quot, PolyQ.ONE)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _to_ratfunc(other) / self

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return RatFuncQ._raw(self.num ** e, self.den ** e)

    def subs_q_power(self, factor: int) -> "RatFuncQ":
        """Substitute q -> q^factor (factor > 0)."""
        return RatFuncQ(self.num.scale_q(factor), self.den.scale_q(factor))

    def __call__(self, x):
        return self.num(x) / self.den(x)

    def to_json(self) -> list[list[str]]:
        return [self.num.to_json(), self.den.to_json()]

    @classmethod
    def from_json(cls, data) -> "RatFuncQ":
        num, den = data
        return cls(PolyQ.from_json(num), PolyQ.from_json(den))


def _cancel(a: PolyQ, b: PolyQ) -> tuple[PolyQ, PolyQ]:
    if b.c == (1,):
        return a, b
    g = _fast_gcd(a, b)
    if g.c == (1,):
        return a, b
    return a.exact_div(g), b.exact_div(g)


def _fast_gcd(a: PolyQ, b: PolyQ) -> PolyQ:
    if b.is_monomial():
        return PolyQ.monomial(min(a.valuation(), b.degree()))
    if a.is_monomial():
        return PolyQ.monomial(min(b.valuation(), a.degree()))
    return poly_gcd(a, b)


def _reduce(num: PolyQ, den: PolyQ) -> tuple[PolyQ, PolyQ]:
    if not num.c:
        return PolyQ.ZERO, PolyQ.ONE
    if den.c != (1,):
        g = _fast_gcd(num, den)
        if g.c != (1,):
            num, den = num.exact_div(g), den.exact_div(g)
    lc = den.c[-1]
    if lc != 1:
        inv = Fraction(1) / Fraction(lc)
        num, den = num * inv, den * inv
    return num, den


def _to_ratfunc(x):
    if isinstance(x, RatFuncQ):
        return x
    if isinstance(x, PolyQ):
        return RatFuncQ._raw(x, PolyQ.ONE)
    if isinstance(x, _INT_TYPES):
        return RatFuncQ._raw(PolyQ.const(x), PolyQ.ONE)
    return NotImplemented


RatFuncQ.ZERO = RatFuncQ._raw(PolyQ.ZERO, PolyQ.ONE)
RatFuncQ.ONE = RatFuncQ._raw(PolyQ.ONE, PolyQ.ONE)


def ratfunc_arith(a: RatFuncQ, b: RatFuncQ, op: str) -> RatFuncQ:
    """Dispatch ``add``/``sub``/``mul``/``div`` on two rational functions."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


class PolyZ:
    """Polynomial in the twist variable z with coefficients in Q(q)."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [x if isinstance(x, RatFuncQ) else _to_ratfunc(x) for x in coeffs]
        i = len(cs)
        while i and not cs[i - 1].num.c:
            i -= 1
        self.c = tuple(cs[:i])

    @classmethod
    def _raw(cls, c: tuple) -> "PolyZ":
        p = object.__new__(cls)
        p.c = c
        return p

    @classmethod
    def const(cls, x) -> "PolyZ":
        x = _to_ratfunc(x)
        return cls._raw((x,)) if x.num.c else PolyZ.ZERO

    @classmethod
    def z_power(cls, m: int, coeff=None) -> "PolyZ":
        coeff = RatFuncQ.ONE if coeff is None else _to_ratfunc(coeff)
        if not coeff:
            return PolyZ.ZERO
        return cls._raw((RatFuncQ.ZERO,) * m + (coeff,))

    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        if isinstance(other, PolyZ):
            return self.c == other.c
        if isinstance(other, (RatFuncQ, PolyQ) + _INT_TYPES):
            return self == PolyZ.const(other)
        return NotImplemented

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return f"PolyZ({[str(x) for x in self.c]!r})"

    def __str__(self):
        if not self.c:
            return "0"
        parts = []
        for i, x in enumerate(self.c):
            if not x:
                continue
            mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
            coef = str(x)
            if mono:
                parts.append(mono if coef == "1" else f"({coef})*{mono}")
            else:
                parts.append(coef)
        return " + ".join(parts)

    def __neg__(self):
        return PolyZ._raw(tuple(-x for x in self.c))

    def __add__(self, other):
        if not isinstance(other, PolyZ):
            other = _to_polyz(other)
            if other is NotImplemented:
                return NotImplemented
        a, b = self.c, other.c
        if not b:
            return self
        if not a:
            return other
        if len(a) < len(b):
            a, b = b, a
        res = list(a)
        for i, x in enumerate(b):
            res[i] = res[i] + x
        i = len(res)
        while i and not res[i - 1].num.c:
            i -= 1
        return PolyZ._raw(tuple(res[:i]))

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, PolyZ):
            other = _to_polyz(other)
            if other is NotImplemented:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, PolyZ):
            if isinstance(other, (RatFuncQ, PolyQ) + _INT_TYPES):
                if not other:
                    return PolyZ.ZERO
                return PolyZ._raw(tuple(x * other for x in self.c))
            return NotImplemented
        a, b = self.c, other.c
        if not a or not b:
            return PolyZ.ZERO
        if len(a) == 1 and len(b) == 1:
            return PolyZ._raw((a[0] * b[0],))
        res = [RatFuncQ.ZERO] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x.num.c:
                for j, y in enumerate(b):
                    if y.num.c:
                        res[i + j] = res[i + j] + x * y
        i = len(res)
        while i and not res[i - 1].num.c:
            i -= 1
        return PolyZ._raw(tuple(res[:i]))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, PolyZ):
            if len(other.c) != 1:
                raise RingError("division by a non-constant polynomial in z")
            other = other.c[0]
        other = _to_ratfunc(other)
        if other is NotImplemented:
            return NotImplemented
        return PolyZ._raw(tuple(x / other for x in self.c))

    def __pow__(self, e: int):
        result = PolyZ.ONE
        for _ in range(e):
            result = result * self
        return result

    def at_z(self, z0) -> RatFuncQ:
        """Specialise z to an exact constant."""
        acc = RatFuncQ.ZERO
        for x in reversed(self.c):
            acc = acc * z0 + x
        return acc

    def is_polynomial_in_q(self) -> bool:
        return all(x.den.c == (1,) for x in self.c)

    def evaluate(self, q, z=1):
        """Numeric value at numeric q, z."""
        acc = 0
        for x in reversed(self.c):
            acc = acc * z + x.num(q) / x.den(q)
        return acc

    def to_json(self) -> list:
        return [x.to_json() for x in self.c]

    @classmethod
    def from_json(cls, data) -> "PolyZ":
        return cls(RatFuncQ.from_json(x) for x in data)


def _to_polyz(x):
    if isinstance(x, PolyZ):
        return x
    r = _to_ratfunc(x)
    if r is NotImplemented:
        return NotImplemented
    return PolyZ.const(r)


PolyZ.ZERO = PolyZ._raw(())
PolyZ.ONE = PolyZ._raw((RatFuncQ.ONE,))

# handy constants
Q = PolyQ.monomial(1)
Z = PolyZ.z_power(1)


def qpow(m: int) -> RatFuncQ:
    """q^m as a rational function (m may be negative)."""
    return RatFuncQ.q_power(m)


# ---------------------------------------------------------------------------
# truncated power series


class VSeries:
    """
    Power series in one formal variable truncated after ``order``.

    The coefficient ring is whatever the coefficients are: scalars,
    ``MultiPoly`` or graded operators all work provided they implement
    ``+``, ``-`` and ``*``.  Products never read beyond the truncation order.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence, order: int | None = None, zero=None):
        coeffs = list(coeffs)
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise ValueError("series order must be nonnegative")
        if len(coeffs) < order + 1:
            if zero is None:
                if not coeffs:
                    raise ValueError("cannot infer the zero of an empty series")
                zero = coeffs[0] - coeffs[0]
            coeffs += [zero] * (order + 1 - len(coeffs))
        self.coeffs = tuple(coeffs[: order + 1])

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, r: int):
        return self.coeffs[r]

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, VSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"VSeries(order={self.order}, {list(self.coeffs)!r})"

    def _check(self, other: "VSeries"):
        if not isinstance(other, VSeries):
            raise RingError("series arithmetic with a non-series operand")

    def truncate(self, order: int) -> "VSeries":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return VSeries(self.coeffs[: order + 1])

    def __add__(self, other):
        self._check(other)
        o = min(self.order, other.order)
        return VSeries([self.coeffs[r] + other.coeffs[r] for r in range(o + 1)])

    def __sub__(self, other):
        self._check(other)
        o = min(self.order, other.order)
        return VSeries([self.coeffs[r] - other.coeffs[r] for r in range(o + 1)])

    def __neg__(self):
        return VSeries([-c for c in self.coeffs])

    def __mul__(self, other):
        if not isinstance(other, VSeries):
            return VSeries([c * other for c in self.coeffs])
        o = min(self.order, other.order)
        out = []
        for r in range(o + 1):
            acc = self.coeffs[0] * other.coeffs[r]
            for s in range(1, r + 1):
                acc = acc + self.coeffs[s] * other.coeffs[r - s]
            out.append(acc)
        return VSeries(out)

    def __rmul__(self, other):
        return VSeries([other * c for c in self.coeffs])

    def scale(self, factors: Callable[[int], object]) -> "VSeries":
        """Multiply coefficient r by ``factors(r)`` (a scalar)."""
        return VSeries([factors(r) * c for r, c in enumerate(self.coeffs)])

    def shift_q(self, s: int) -> "VSeries":
        """f(u) -> f(u q^{2s}): coefficient r picks up q^{2 s r}."""
        return self.scale(lambda r: qpow(2 * s * r))

    def shift_power(self, m: int) -> "VSeries":
        """Multiply by the series variable to the power m >= 0 (keeps the order)."""
        if m == 0:
            return self
        zero = self.coeffs[0] - self.coeffs[0]
        return VSeries([zero] * m + list(self.coeffs[: len(self.coeffs) - m]), self.order, zero)

    def invert(self, unit_inverse=None) -> "VSeries":
        """
        Two-sided inverse up to the truncation order.

        ``unit_inverse`` is the inverse of the constant term; when omitted the
        constant term must be 1 or invertible via ``.inverse()`` / ``1/x``.
        """
        c0 = self.coeffs[0]
        if unit_inverse is None:
            unit_inverse = _unit_inverse(c0)
        out = [unit_inverse]
        for r in range(1, self.order + 1):
            acc = self.coeffs[1] * out[r - 1]
            for s in range(2, r + 1):
                acc = acc + self.coeffs[s] * out[r - s]
            out.append(-(unit_inverse * acc))
        return VSeries(out)


def _unit_inverse(c0):
    if isinstance(c0, int) and c0 in (1, -1):
        return c0
    if isinstance(c0, Fraction):
        if not c0:
            raise RingError("series constant term is not a unit")
        return 1 / c0
    inv = getattr(c0, "inverse", None)
    if inv is None:
        raise RingError("series constant term is not a unit")
    try:
        return inv()
    except ZeroDivisionError as exc:
        raise RingError("series constant term is not a unit") from exc


def series_arith(s: VSeries, t: VSeries | None, op: str, shift: int = 0) -> VSeries:
    """Dispatch ``add``/``mul``/``invert``/``shift_q`` on truncated series."""
    if op == "add":
        return s + t
    if op == "mul":
        return s * t
    if op == "invert":
        return s.invert()
    if op == "shift_q":
        return s.shift_q(shift)
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# determinants


def poly_determinant(M: Sequence[Sequence]):
    """
    Division-free determinant over a commutative ring.

    Uses the Laplace expansion organised as a dynamic programme over column
    subsets, which costs O(2^n n) ring operations: negligible for n <= 8 and
    valid for entries that only commute (e.g. blocks of commuting operators).
    """
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    if n == 1:
        return M[0][0]
    # minors[S] = det of rows 0..|S|-1 restricted to columns S
    minors = {(j,): M[0][j] for j in range(n)}
    for size in range(2, n + 1):
        row = M[size - 1]
        new = {}
        for cols in combinations(range(n), size):
            acc = None
            for pos, j in enumerate(cols):
                entry = row[j]
                if isinstance(entry, (int, Fraction)) and entry == 0:
                    continue
                sub = minors[cols[:pos] + cols[pos + 1:]]
                if isinstance(sub, (int, Fraction)) and sub == 0:
                    continue
                term = entry * sub
                # sign: number of chosen columns to the right of j
                if (size - 1 - pos) % 2:
                    term = -term
                acc = term if acc is None else acc + term
            new[cols] = 0 if acc is None else acc
        minors = new
    return minors[tuple(range(n))]


# ---------------------------------------------------------------------------
# sparse commutative polynomials


class MultiPoly:
    """Sparse polynomial in a fixed, named set of commuting variables."""

    __slots__ = ("names", "terms")

    def __init__(self, names: Sequence[str], terms: dict | None = None):
        self.names = tuple(names)
        self.terms = {}
        if terms:
            nv = len(self.names)
            for exps, coef in terms.items():
                if len(exps) != nv:
                    raise ValueError("exponent vector length does not match variables")
                if coef:
                    self.terms[tuple(exps)] = _norm(coef)

    @classmethod
    def _raw(cls, names: tuple, terms: dict) -> "MultiPoly":
        p = object.__new__(cls)
        p.names, p.terms = names, terms
        return p

    @classmethod
    def var(cls, name: str, names: Sequence[str]) -> "MultiPoly":
        names = tuple(names)
        if name not in names:
            raise KeyError(f"unknown variable {name!r}")
        exps = tuple(int(v == name) for v in names)
        return cls._raw(names, {exps: 1})

    @classmethod
    def constant(cls, c, names: Sequence[str]) -> "MultiPoly":
        names = tuple(names)
        return cls._raw(names, {(0,) * len(names): _norm(c)} if c else {})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.names == other.names and self.terms == other.terms
        if isinstance(other, _INT_TYPES):
            return self == MultiPoly.constant(other, self.names)
        return NotImplemented

    def __hash__(self):
        return hash((self.names, frozenset(self.terms.items())))

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.names != self.names:
                raise RingError("polynomials over different variable sets")
            return other
        if isinstance(other, _INT_TYPES):
            return MultiPoly.constant(other, self.names)
        raise RingError(f"cannot combine MultiPoly with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            v = terms.get(e, 0) + c
            if v:
                terms[e] = _norm(v)
            else:
                terms.pop(e, None)
        return MultiPoly._raw(self.names, terms)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.names, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, _INT_TYPES):
            if not other:
                return MultiPoly._raw(self.names, {})
            return MultiPoly._raw(self.names, {e: _norm(c * other) for e, c in self.terms.items()})
        other = self._coerce(other)
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return MultiPoly._raw(self.names, {e: _norm(c) for e, c in terms.items() if c})

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = MultiPoly.constant(1, self.names)
        for _ in range(e):
            result = result * self
        return result

    def partial(self, name: str) -> "MultiPoly":
        try:
            i = self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None
        terms = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = e[:i] + (e[i] - 1,) + e[i + 1:]
                terms[e2] = c * e[i]
        return MultiPoly._raw(self.names, terms)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def __repr__(self):
        return f"MultiPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(self.names, e) if k)
            if not mono:
                out.append(str(c))
            elif c == 1:
                out.append(mono)
            elif c == -1:
                out.append("-" + mono)
            else:
                out.append(f"{c}*{mono}")
        return " + ".join(out).replace("+ -", "- ")


def multipoly_arith(f: MultiPoly, g: MultiPoly | None, op: str, var: str | None = None) -> MultiPoly:
    """Dispatch ``add``/``mul``/``partial_derivative`` on sparse polynomials."""
    if op == "add":
        return f + g
    if op == "mul":
        return f * g
    if op == "partial_derivative":
        return f.partial(var)
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# fast matrix entries


_ZB = 1 << 24  # packing base: key = z_exp * _ZB + q_exp, additive under products
_ZH = _ZB >> 1


def _unpack(key: int) -> tuple[int, int]:
    z, qe = divmod(key + _ZH, _ZB)
    return z, qe - _ZH


def _pack(z: int, qe: int) -> int:
    return z * _ZB + qe


class ZQPoly:
    """
    Sparse polynomial in z and Laurent polynomial in q, rational coefficients.

    This is the working representation of operator matrix entries.  Monomial
    exponents are packed into one int so that multiplying monomials is a
    single integer addition.  ``to_polyz``/``from_polyz`` convert to and from
    the canonical ``PolyZ`` form (negative q powers become q^m denominators).
    """

    __slots__ = ("t",)

    def __init__(self, terms: dict | None = None):
        self.t = {k: _norm(c) for k, c in (terms or {}).items() if c}

    @classmethod
    def _raw(cls, t: dict) -> "ZQPoly":
        p = object.__new__(cls)
        p.t = t
        return p

    @classmethod
    def monomial(cls, coeff=1, qe: int = 0, ze: int = 0) -> "ZQPoly":
        if not coeff:
            return cls._raw({})
        return cls._raw({_pack(ze, qe): _norm(coeff)})

    @classmethod
    def from_terms(cls, items: Iterable[tuple[int, int, object]]) -> "ZQPoly":
        """Build from (z_exp, q_exp, coeff) triples."""
        t: dict = {}
        for ze, qe, c in items:
            key = _pack(ze, qe)
            t[key] = t.get(key, 0) + c
        return cls._raw({k: _norm(c) for k, c in t.items() if c})

    @classmethod
    def from_polyq(cls, p: PolyQ, ze: int = 0, qshift: int = 0) -> "ZQPoly":
        base = ze * _ZB + qshift
        return cls._raw({base + i: c for i, c in enumerate(p.c) if c})

    @classmethod
    def coerce(cls, x) -> "ZQPoly":
        if isinstance(x, ZQPoly):
            return x
        if isinstance(x, _INT_TYPES):
            return cls.monomial(x)
        if isinstance(x, PolyQ):
            return cls.from_polyq(x)
        if isinstance(x, RatFuncQ):
            return cls._from_ratfunc(x, 0)
        if isinstance(x, PolyZ):
            return cls.from_polyz(x)
        raise RingError(f"cannot use {type(x).__name__} as a matrix entry")

    @classmethod
    def _from_ratfunc(cls, r: RatFuncQ, ze: int) -> "ZQPoly":
        if r.den.c == (1,):
            return cls.from_polyq(r.num, ze)
        if not r.den.is_monomial():
            raise RingError(f"{r} is not a Laurent polynomial in q")
        return cls.from_polyq(r.num, ze, -r.den.degree())

    @classmethod
    def from_polyz(cls, p: PolyZ) -> "ZQPoly":
        t: dict = {}
        for ze, r in enumerate(p.c):
            t.update(cls._from_ratfunc(r, ze).t)
        return cls._raw(t)

    # -- inspection
    def __bool__(self):
        return bool(self.t)

    def is_zero(self) -> bool:
        return not self.t

    def terms(self) -> list[tuple[int, int, object]]:
        """Sorted (z_exp, q_exp, coeff) triples."""
        return sorted(_unpack(k) + (c,) for k, c in self.t.items())

    def __eq__(self, other):
        if isinstance(other, ZQPoly):
            return self.t == other.t
        try:
            return self.t == ZQPoly.coerce(other).t
        except RingError:
            return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.t.items()))

    def __repr__(self):
        return f"ZQPoly({self})"

    def __str__(self):
        if not self.t:
            return "0"
        out = []
        for ze, qe, c in self.terms():
            mono = "*".join(s for s in (
                "" if qe == 0 else ("q" if qe == 1 else f"q^{qe}"),
                "" if ze == 0 else ("z" if ze == 1 else f"z^{ze}")) if s)
            if not mono:
                out.append(str(c))
            elif c == 1:
                out.append(mono)
            elif c == -1:
                out.append("-" + mono)
            else:
                out.append(f"{c}*{mono}")
        return " + ".join(out).replace("+ -", "- ")

    # -- arithmetic
    def __neg__(self):
        return ZQPoly._raw({k: -c for k, c in self.t.items()})

    def __add__(self, other):
        if not isinstance(other, ZQPoly):
            other = ZQPoly.coerce(other)
        if not other.t:
            return self
        if not self.t:
            return other
        t = dict(self.t)
        for k, c in other.t.items():
            v = t.get(k, 0) + c
            if v:
                t[k] = v
            else:
                del t[k]
        return ZQPoly._raw(t)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, ZQPoly):
            other = ZQPoly.coerce(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, _INT_TYPES):
            if not other:
                return ZQPoly._raw({})
            return ZQPoly._raw({k: _norm(c * other) for k, c in self.t.items()})
        if not isinstance(other, ZQPoly):
            other = ZQPoly.coerce(other)
        t: dict = {}
        for ka, ca in self.t.items():
            for kb, cb in other.t.items():
                k = ka + kb
                t[k] = t.get(k, 0) + ca * cb
        return ZQPoly._raw({k: _norm(c) for k, c in t.items() if c})

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = ZQPoly.monomial(1)
        for _ in range(e):
            out = out * self
        return out

    def shift(self, qe: int = 0, ze: int = 0) -> "ZQPoly":
        """Multiply by q^qe z^ze."""
        off = _pack(ze, qe)
        if not off:
            return self
        return ZQPoly._raw({k + off: c for k, c in self.t.items()})

    def z_slices(self) -> dict[int, dict[int, object]]:
        out: dict = {}
        for k, c in self.t.items():
            ze, qe = _unpack(k)
            out.setdefault(ze, {})[qe] = c
        return out

    def _slice_polyq(self, sl: dict) -> tuple[PolyQ, int]:
        v = min(sl)
        coeffs = [0] * (max(sl) - v + 1)
        for qe, c in sl.items():
            coeffs[qe - v] = c
        return PolyQ._raw(tuple(coeffs)), v

    def exact_div(self, p: PolyQ) -> "ZQPoly":
        """Divide by a polynomial in q, which must divide every z-slice."""
        if p.c == (1,):
            return self
        vp = p.valuation()
        p = p.shift(-vp)
        t: dict = {}
        for ze, sl in self.z_slices().items():
            poly, v = self._slice_polyq(sl)
            quot = poly.exact_div(p)
            t.update(ZQPoly.from_polyq(quot, ze, v - vp).t)
        return ZQPoly._raw(t)

    def at_z(self, z0) -> "ZQPoly":
        """Specialise z to a constant (the result has no z)."""
        t: dict = {}
        for k, c in self.t.items():
            ze, qe = _unpack(k)
            v = t.get(qe, 0) + c * z0 ** ze
            t[qe] = v
        return ZQPoly._raw({k: _norm(c) for k, c in t.items() if c})

    def q_valuation(self) -> int:
        return min((_unpack(k)[1] for k in self.t), default=0)

    def max_z(self) -> int:
        return max((_unpack(k)[0] for k in self.t), default=0)

    def is_polynomial(self) -> bool:
        """No negative powers of q and integer coefficients."""
        return all(_unpack(k)[1] >= 0 and isinstance(c, int) for k, c in self.t.items())

    def is_even_in_q(self) -> bool:
        return all(_unpack(k)[1] % 2 == 0 for k in self.t)

    def to_polyz(self) -> PolyZ:
        out = []
        slices = self.z_slices()
        for ze in range(max(slices, default=-1) + 1):
            sl = slices.get(ze)
            if not sl:
                out.append(RatFuncQ.ZERO)
                continue
            poly, v = self._slice_polyq(sl)
            if v >= 0:
                out.append(RatFuncQ._raw(poly.shift(v), PolyQ.ONE))
            else:
                out.append(RatFuncQ._raw(poly, PolyQ.monomial(-v)))
        return PolyZ(out)

    def to_ratfunc(self) -> RatFuncQ:
        """Value as an element of Q(q); requires no z dependence."""
        if self.max_z():
            raise RingError("entry depends on z")
        return self.to_polyz().at_z(0) if self.t else RatFuncQ.ZERO

    def evaluate(self, q, z=1):
        acc = 0
        for k, c in self.t.items():
            ze, qe = _unpack(k)
            acc += complex(c) * q ** qe * z ** ze if isinstance(q, complex) else float(c) * q ** qe * z ** ze
        return acc

    def to_json(self) -> list:
        return self.to_polyz().to_json()


ZQPoly.ZERO = ZQPoly._raw({})
ZQPoly.ONE = ZQPoly._raw({0: 1})
