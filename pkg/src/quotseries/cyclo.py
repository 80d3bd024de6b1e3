"""Cyclotomic polynomials and the fields Q(zeta_e) over a base ring."""

from __future__ import annotations

from functools import lru_cache
from typing import List, Sequence, Tuple

from gmpy2 import mpq

from .errors import NonInvertible
from .rings import QQ, is_scalar, to_mpq
from .series import INF, TruncSeries


def _poly_divmod_int(num: List[int], den: List[int]) -> Tuple[List[int], List[int]]:
    """Exact division of integer polynomials (low degree first) by a monic divisor."""
    num = list(num)
    dd = len(den) - 1
    if den[-1] != 1:
        raise ValueError("divisor must be monic")
    if len(num) - 1 < dd:
        return [0], num
    quot = [0] * (len(num) - dd)
    for k in range(len(num) - 1, dd - 1, -1):
        c = num[k]
        if c:
            quot[k - dd] = c
            for j, d in enumerate(den):
                num[k - dd + j] -= c * d
    rem = num[:dd] or [0]
    return quot, rem


@lru_cache(maxsize=None)
def cyclotomic_coeffs(e: int) -> Tuple[int, ...]:
    """Integer coefficients of Phi_e, lowest degree first."""
    if e < 1:
        raise ValueError("cyclotomic index must be >= 1")
    num = [-1] + [0] * (e - 1) + [1]
    for d in range(1, e):
        if e % d == 0:
            num, rem = _poly_divmod_int(num, list(cyclotomic_coeffs(d)))
            if any(rem):
                raise AssertionError("non-exact cyclotomic division")
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return tuple(num)


def cyclotomic_poly(e: int, var: str = "x") -> TruncSeries:
    """Phi_e as an exact polynomial over QQ."""
    return TruncSeries(QQ, [mpq(c) for c in cyclotomic_coeffs(e)], order=INF, var=var)


def euler_phi(e: int) -> int:
    return len(cyclotomic_coeffs(e)) - 1


class CycloField:
    """The ring ``base[zeta_e]`` with ``zeta_e`` a primitive e-th root of unity.

    When ``phi(e) == 1`` (e = 1, 2) zeta is rational and elements are plain
    base-ring elements; otherwise they are :class:`CycloNum` vectors reduced
    modulo Phi_e.
    """

    def __init__(self, e: int, base=QQ):
        self.e = e
        self.base = base
        self.modulus = cyclotomic_coeffs(e)
        self.degree = len(self.modulus) - 1
        self.trivial = self.degree == 1
        d = self.degree
        # x^k mod Phi_e for d <= k <= 2d-2, as integer vectors
        self._red = {}
        if d > 1:
            cur = [-c for c in self.modulus[:d]]  # x^d
            self._red[d] = tuple(cur)
            for k in range(d + 1, 2 * d - 1):
                top = cur[-1]
                nxt = [0] + cur[:-1]
                if top:
                    nxt = [a + top * b for a, b in zip(nxt, self._red[d])]
                cur = nxt
                self._red[k] = tuple(cur)
        if self.trivial:
            self.zero = base.zero
            self.one = base.one
        else:
            self.zero = CycloNum(self, (base.zero,) * d)
            self.one = CycloNum(self, (base.one,) + (base.zero,) * (d - 1))
        self._zeta_cache = {}

    def __repr__(self):
        return f"CycloField({self.e}, {self.base!r})"

    def __call__(self, x):
        if self.trivial:
            return self.base(x)
        if isinstance(x, CycloNum):
            if x.field is self:
                return x
            raise TypeError("element of a different cyclotomic field")
        b = self.base(x)
        return CycloNum(self, (b,) + (self.base.zero,) * (self.degree - 1))

    def from_vector(self, comps: Sequence) -> "CycloNum":
        comps = [self.base(c) for c in comps]
        if self.trivial:
            return comps[0]
        if len(comps) < self.degree:
            comps = comps + [self.base.zero] * (self.degree - len(comps))
        return CycloNum(self, tuple(comps[: self.degree]))

    def zeta(self, k: int = 1):
        """zeta_e^k."""
        k %= self.e
        z = self._zeta_cache.get(k)
        if z is not None:
            return z
        if self.trivial:
            z = self.base.one if (self.e == 1 or k % 2 == 0) else -self.base.one
        else:
            vec = [0] * (k + 1)
            vec[k] = 1
            z = self._reduce_int(vec)
        self._zeta_cache[k] = z
        return z

    def _reduce_int(self, vec: List[int]) -> "CycloNum":
        d = self.degree
        vec = list(vec)
        # long division by the monic modulus
        for k in range(len(vec) - 1, d - 1, -1):
            c = vec[k]
            if c:
                vec[k] = 0
                for j in range(d):
                    vec[k - d + j] -= c * self.modulus[j]
        vec = (vec + [0] * d)[:d]
        return CycloNum(self, tuple(self.base(c) for c in vec))

    def is_zero(self, x) -> bool:
        return not x

    def inverse(self, x):
        if self.trivial:
            return self.base.inverse(x)
        x = self(x)
        if not x:
            raise NonInvertible("zero in cyclotomic field")
        comps = x.comps
        base = self.base
        if not getattr(base, "is_field", False):
            if all(_is_const(c) for c in comps):
                qf = CycloField(self.e, QQ)
                inv = qf.inverse(CycloNum(qf, tuple(_const_value(c) for c in comps)))
                return CycloNum(self, tuple(base(c) for c in inv.comps))
            raise NonInvertible("inverse over a non-field base needs rational components")
        d = self.degree
        # columns: x * zeta^j
        cols = []
        for j in range(d):
            cols.append((x * self.zeta(j)).comps)
        mat = [[cols[j][i] for j in range(d)] + [base.one if i == 0 else base.zero] for i in range(d)]
        sol = _solve(mat, base)
        return CycloNum(self, tuple(sol))

    def trace_rational(self, x):
        """Component along 1 when the element is rational, else None."""
        if self.trivial:
            return x
        if all(not c for c in x.comps[1:]):
            return x.comps[0]
        return None


def _is_const(c) -> bool:
    if is_scalar(c):
        return True
    return hasattr(c, "is_constant") and c.is_constant()


def _const_value(c):
    return to_mpq(c) if is_scalar(c) else c.constant_value()


def _solve(mat, base):
    n = len(mat)
    for col in range(n):
        piv = next((r for r in range(col, n) if mat[r][col]), None)
        if piv is None:
            raise NonInvertible("singular multiplication matrix")
        mat[col], mat[piv] = mat[piv], mat[col]
        inv = base.inverse(mat[col][col])
        mat[col] = [v * inv for v in mat[col]]
        for r in range(n):
            if r != col and mat[r][col]:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[col])]
    return [mat[r][n] for r in range(n)]


class CycloNum:
    """Element of ``base[zeta_e]`` stored as coefficients of 1, zeta, ..., zeta^(d-1)."""

    __slots__ = ("field", "comps")

    def __init__(self, field: CycloField, comps: Tuple):
        self.field = field
        self.comps = comps

    def _wrap(self, other):
        if isinstance(other, CycloNum):
            if other.field is not self.field:
                raise TypeError("mixing cyclotomic fields")
            return other
        try:
            return self.field(other)
        except TypeError:
            return NotImplemented

    def __add__(self, other):
        o = self._wrap(other)
        if o is NotImplemented:
            return NotImplemented
        return CycloNum(self.field, tuple(a + b for a, b in zip(self.comps, o.comps)))

    __radd__ = __add__

    def __neg__(self):
        return CycloNum(self.field, tuple(-a for a in self.comps))

    def __sub__(self, other):
        o = self._wrap(other)
        if o is NotImplemented:
            return NotImplemented
        return CycloNum(self.field, tuple(a - b for a, b in zip(self.comps, o.comps)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if is_scalar(other):
            c = to_mpq(other)
            return CycloNum(self.field, tuple(a * c for a in self.comps))
        if not isinstance(other, CycloNum):
            o = self._wrap(other)
            if o is NotImplemented:
                return NotImplemented
            other = o
        f = self.field
        d = f.degree
        a, b = self.comps, other.comps
        zero = f.base.zero
        prod = [zero] * (2 * d - 1)
        for i in range(d):
            x = a[i]
            if not x:
                continue
            for j in range(d):
                y = b[j]
                if y:
                    prod[i + j] = prod[i + j] + x * y
        out = prod[:d]
        for k in range(d, 2 * d - 1):
            c = prod[k]
            if c:
                red = f._red[k]
                for i in range(d):
                    r = red[i]
                    if r:
                        out[i] = out[i] + c * r
        return CycloNum(f, tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if is_scalar(other):
            return self * (1 / to_mpq(other))
        return self * self.field.inverse(other)

    def __rtruediv__(self, other):
        return self.field(other) * self.field.inverse(self)

    def __pow__(self, k: int):
        if k < 0:
            return self.field.inverse(self) ** (-k)
        result = self.field.one
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        o = self._wrap(other)
        if o is NotImplemented:
            return NotImplemented
        return self.comps == o.comps

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        return hash(self.comps)

    def __bool__(self):
        return any(bool(c) for c in self.comps)

    def is_rational(self) -> bool:
        return all(not c for c in self.comps[1:])

    def __repr__(self):
        parts = []
        for i, c in enumerate(self.comps):
            if not c:
                continue
            mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
            parts.append(f"({c}){'*' + mono if mono else ''}")
        return " + ".join(parts) if parts else "0"
