"""Dense univariate polynomials with exact rational coefficients.

Used by the gadget dynamic program: running the recurrence once with the
clique-edge weight left symbolic yields Z^k as a polynomial, after which
every tuner grid point costs one Horner evaluation instead of a full DP.
"""

from __future__ import annotations

from .rationals import ONE, ZERO, Rat, to_rat


class RatPoly:
    __slots__ = ("c",)

    def __init__(self, coeffs=()):
        cs = [to_rat(x) for x in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.c = tuple(cs)

    @staticmethod
    def const(x) -> "RatPoly":
        return RatPoly((to_rat(x),))

    @staticmethod
    def x() -> "RatPoly":
        return RatPoly((ZERO, ONE))

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def __bool__(self) -> bool:
        return bool(self.c)

    def __eq__(self, other) -> bool:
        if isinstance(other, RatPoly):
            return self.c == other.c
        if not self.c:
            return to_rat(other) == 0
        return len(self.c) == 1 and self.c[0] == to_rat(other)

    def __hash__(self):
        return hash(self.c)

    def _coerce(self, other):
        if isinstance(other, RatPoly):
            return other
        return RatPoly.const(other)

    def __add__(self, other):
        o = self._coerce(other)
        a, b = self.c, o.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, x in enumerate(b):
            out[i] += x
        return RatPoly(out)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (self._coerce(other) * -1)

    def __rsub__(self, other):
        return self._coerce(other) + (self * -1)

    def __mul__(self, other):
        if not isinstance(other, RatPoly):
            k = to_rat(other)
            return RatPoly(x * k for x in self.c)
        if not self.c or not other.c:
            return RatPoly()
        out = [ZERO] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if a == 0:
                continue
            for j, b in enumerate(other.c):
                out[i + j] += a * b
        return RatPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = RatPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __call__(self, x) -> Rat:
        x = to_rat(x)
        acc = ZERO
        for coef in reversed(self.c):
            acc = acc * x + coef
        return acc

    def __repr__(self):
        return f"RatPoly({list(self.c)!r})"
