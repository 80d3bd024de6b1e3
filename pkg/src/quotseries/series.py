"""Truncated formal (Laurent) power series over an exact coefficient ring.

A :class:`TruncSeries` knows every coefficient below its ``order`` and nothing
at or above it.  Asking for an unknown coefficient raises
:class:`TruncationError`; arithmetic propagates orders pessimistically so that
no result ever claims precision it does not have.  ``order`` may be
``math.inf`` for exact (polynomial or Laurent polynomial) inputs.
"""

from __future__ import annotations

import math
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Tuple

from gmpy2 import mpq

from .errors import DomainError, NonInvertible, TruncationError
from .rings import QQ, fraction_str, is_scalar, to_mpq

INF = math.inf

_RECIP: List = [None] + [mpq(1, n) for n in range(1, 512)]


def _recip(n: int):
    if 0 < n < len(_RECIP):
        return _RECIP[n]
    return mpq(1, n)


class TruncSeries:
    """Immutable truncated series ``sum_{k} c_k var^k + O(var^order)``."""

    __slots__ = ("ring", "start", "coeffs", "order", "var")

    def __init__(self, ring, coeffs=None, order=INF, var: str = "q", start: int = 0):
        self.ring = ring
        self.var = var
        if order != INF:
            order = int(order)
        self.order = order
        if coeffs is None:
            coeffs = {}
        if isinstance(coeffs, dict):
            items = [(int(k), v) for k, v in coeffs.items()]
            items = [(k, ring(v)) for k, v in items if k < order]
            items = [(k, v) for k, v in items if v]
            if items:
                lo = min(k for k, _ in items)
                hi = max(k for k, _ in items)
                dense = [ring.zero] * (hi - lo + 1)
                for k, v in items:
                    dense[k - lo] = v
                self.start, self.coeffs = lo, dense
            else:
                self.start, self.coeffs = 0, []
        else:
            dense = [ring(v) for v in coeffs]
            if order != INF:
                dense = dense[: max(0, order - start)]
            self.start, self.coeffs = start, dense
            self._strip()

    # ------------------------------------------------------------------ build
    @classmethod
    def _raw(cls, ring, start, coeffs, order, var):
        s = cls.__new__(cls)
        s.ring, s.start, s.coeffs, s.order, s.var = ring, start, coeffs, order, var
        s._strip()
        return s

    def _strip(self):
        c = self.coeffs
        i = 0
        while i < len(c) and not c[i]:
            i += 1
        j = len(c)
        while j > i and not c[j - 1]:
            j -= 1
        if i or j != len(c):
            self.coeffs = c[i:j]
            self.start = self.start + i if j > i else 0

    @classmethod
    def from_list(cls, ring, values: Iterable, order=None, var="q", start=0):
        vals = list(values)
        if order is None:
            order = start + len(vals)
        return cls(ring, vals, order=order, var=var, start=start)

    @classmethod
    def constant(cls, ring, value, order=INF, var="q"):
        return cls(ring, [value], order=order, var=var)

    @classmethod
    def monomial(cls, ring, exponent: int, coeff=1, order=INF, var="q"):
        return cls(ring, {exponent: coeff}, order=order, var=var)

    @classmethod
    def from_function(cls, ring, fn: Callable[[int], object], order: int, var="q", start=0):
        return cls(ring, [fn(k) for k in range(start, order)], order=order, var=var, start=start)

    def _like(self, start, coeffs, order, var=None, ring=None):
        return TruncSeries._raw(ring or self.ring, start, coeffs, order, var or self.var)

    # ------------------------------------------------------------ inspection
    def valuation(self) -> Optional[int]:
        """Lowest exponent with a nonzero known coefficient (None if all known ones vanish)."""
        return self.start if self.coeffs else None

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_exact(self) -> bool:
        return self.order == INF

    def coeff(self, n: int):
        """Coefficient of ``var^n``; raises TruncationError when ``n >= order``."""
        if n >= self.order:
            raise TruncationError(f"coefficient {self.var}^{n} requested but series known only below {self.order}")
        k = n - self.start
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return self.ring.zero

    __getitem__ = coeff

    def residue(self):
        return self.coeff(-1)

    def items(self) -> Iterator[Tuple[int, object]]:
        """Nonzero (exponent, coefficient) pairs in increasing order."""
        for i, c in enumerate(self.coeffs):
            if c:
                yield self.start + i, c

    def to_dict(self) -> Dict[int, object]:
        return dict(self.items())

    def top(self) -> int:
        """One past the highest stored exponent."""
        return self.start + len(self.coeffs) if self.coeffs else self.start

    def coeff_list(self, lo: int = 0, hi: Optional[int] = None) -> List:
        if hi is None:
            hi = self.order if self.order != INF else self.top()
        return [self.coeff(k) for k in range(lo, hi)]

    def _check(self, other: "TruncSeries"):
        if other.var != self.var:
            raise ValueError(f"variable mismatch: {self.var} vs {other.var}")

    def _coerce(self, other):
        if isinstance(other, TruncSeries):
            self._check(other)
            return other
        return TruncSeries(self.ring, [self.ring(other)], order=INF, var=self.var)

    # ---------------------------------------------------------- ring structure
    def truncate(self, order) -> "TruncSeries":
        order = min(self.order, order)
        if order == INF:
            return self
        keep = max(0, order - self.start)
        return self._like(self.start, self.coeffs[:keep], order)

    def __add__(self, other):
        o = self._coerce(other)
        order = min(self.order, o.order)
        if not o.coeffs:
            return self.truncate(order)
        if not self.coeffs:
            return o.truncate(order)
        lo = min(self.start, o.start)
        hi = max(self.top(), o.top())
        if order != INF:
            hi = min(hi, order)
        if hi <= lo:
            return self._like(0, [], order)
        zero = self.ring.zero
        out = [zero] * (hi - lo)
        for i, c in enumerate(self.coeffs):
            k = self.start + i - lo
            if k < len(out):
                out[k] = c
        for i, c in enumerate(o.coeffs):
            k = o.start + i - lo
            if k < len(out):
                out[k] = out[k] + c
        return self._like(lo, out, order)

    __radd__ = __add__

    def __neg__(self):
        return self._like(self.start, [-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "TruncSeries":
        """Multiply every coefficient by a ring element."""
        if is_scalar(c):
            c = to_mpq(c)
        return self._like(self.start, [x * c for x in self.coeffs], self.order)

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            return self.scale(other)
        self._check(other)
        a, b = self, other
        if not a.coeffs or not b.coeffs:
            va = a.start if a.coeffs else None
            vb = b.start if b.coeffs else None
            # zero times something: precision of the zero factor dominates
            o1 = a.order + (vb if vb is not None else (b.order if b.order != INF else 0))
            o2 = b.order + (va if va is not None else (a.order if a.order != INF else 0))
            order = min(o1, o2)
            return self._like(0, [], order)
        va, vb = a.start, b.start
        order = min(a.order + vb, b.order + va)
        lo = va + vb
        hi = a.top() + b.top() - 1
        if order != INF:
            hi = min(hi, order)
        n = hi - lo
        if n <= 0:
            return self._like(0, [], order)
        ac, bc = a.coeffs, b.coeffs
        la, lb = len(ac), len(bc)
        zero = self.ring.zero
        out = [zero] * n
        for i in range(min(la, n)):
            x = ac[i]
            if not x:
                continue
            lim = min(lb, n - i)
            for j in range(lim):
                y = bc[j]
                if y:
                    out[i + j] = out[i + j] + x * y
        return self._like(lo, out, order)

    def __rmul__(self, other):
        return self.scale(other)

    def shift(self, k: int) -> "TruncSeries":
        """Multiply by ``var^k``."""
        order = self.order + k if self.order != INF else INF
        return self._like(self.start + k, list(self.coeffs), order)

    def inverse(self, order=None) -> "TruncSeries":
        if not self.coeffs:
            raise NonInvertible("cannot invert a series with no known nonzero coefficient")
        v = self.start
        if self.order == INF:
            if order is None:
                if len(self.coeffs) == 1:
                    inv = self.ring.inverse(self.coeffs[0])
                    return self._like(-v, [inv], INF)
                raise DomainError("inverse of an exact non-monomial series needs an explicit order")
            rel = order + v
        else:
            rel = self.order - v
            if order is not None:
                rel = min(rel, order + v)
        try:
            c0inv = self.ring.inverse(self.coeffs[0])
        except NonInvertible as exc:
            raise NonInvertible(f"lowest coefficient {self.coeffs[0]} of the divisor is not a unit") from exc
        a = self.coeffs
        la = len(a)
        out = [c0inv]
        for n in range(1, rel):
            acc = self.ring.zero
            for k in range(1, min(n, la - 1) + 1):
                x = a[k]
                if x:
                    acc = acc + x * out[n - k]
            out.append(-(acc * c0inv))
        return self._like(-v, out, rel - v)

    def __truediv__(self, other):
        if isinstance(other, TruncSeries):
            self._check(other)
            if other.order == INF and len(other.coeffs) == 1:
                return self * other.inverse()
            if other.order == INF:
                base = self.order if self.order != INF else None
                if base is None:
                    raise DomainError("division of exact series needs an explicit order; truncate first")
                vb = other.start if other.coeffs else 0
                va = self.start if self.coeffs else 0
                return self * other.inverse(order=self.order - vb - va)
            return self * other.inverse()
        if is_scalar(other):
            o = to_mpq(other)
            if not o:
                raise NonInvertible("division by zero")
            return self.scale(1 / o)
        return self.scale(self.ring.inverse(other))

    def __rtruediv__(self, other):
        return TruncSeries(self.ring, [self.ring(other)], order=INF, var=self.var) / self

    def __pow__(self, k):
        if not isinstance(k, int):
            return self.pow_formal(k)
        if k < 0:
            return self.inverse() ** (-k)
        result = TruncSeries(self.ring, [self.ring.one], order=INF, var=self.var)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            if is_scalar(other):
                other = TruncSeries(self.ring, [self.ring(other)], var=self.var)
            else:
                return NotImplemented
        if other.var != self.var:
            return False
        order = min(self.order, other.order)
        lo = min(self.start, other.start)
        hi = max(self.top(), other.top())
        if order != INF:
            hi = min(hi, order)
        return all(self.coeff(k) == other.coeff(k) for k in range(lo, hi))

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    __hash__ = None

    # -------------------------------------------------------- calculus & maps
    def derivative(self) -> "TruncSeries":
        out = [c * (self.start + i) for i, c in enumerate(self.coeffs)]
        order = self.order - 1 if self.order != INF else INF
        return self._like(self.start - 1, out, order)

    def integral(self) -> "TruncSeries":
        """Antiderivative with zero constant term; requires no var^-1 term."""
        if self.order > -1 and self.coeff(-1):
            raise DomainError("cannot integrate a series with a nonzero residue")
        out = [c * _recip_signed(self.start + i + 1) if (self.start + i + 1) else self.ring.zero
               for i, c in enumerate(self.coeffs)]
        order = self.order + 1 if self.order != INF else INF
        return self._like(self.start + 1, out, order)

    def map_coeffs(self, fn, ring=None) -> "TruncSeries":
        ring = ring or self.ring
        return TruncSeries._raw(ring, self.start, [fn(c) for c in self.coeffs], self.order, self.var)

    def rename(self, var: str) -> "TruncSeries":
        return self._like(self.start, list(self.coeffs), self.order, var=var)

    def dilate(self, c) -> "TruncSeries":
        """Substitute ``var -> c * var``."""
        out = []
        cc = self.ring(c)
        if self.start >= 0:
            p = cc ** self.start
        else:
            p = self.ring.inverse(cc) ** (-self.start)
        for x in self.coeffs:
            out.append(x * p)
            p = p * cc
        return self._like(self.start, out, self.order)

    def ramify(self, k: int, var: Optional[str] = None) -> "TruncSeries":
        """Substitute ``var -> var^k`` (k >= 1)."""
        if k < 1:
            raise DomainError("ramification index must be positive")
        d = {e * k: c for e, c in self.items()}
        order = self.order * k if self.order != INF else INF
        return TruncSeries(self.ring, d, order=order, var=var or self.var)

    # ------------------------------------------------------------ exp & log
    def exp(self) -> "TruncSeries":
        if self.order == INF:
            raise DomainError("exp of an exact series needs a truncation order; call truncate first")
        if self.coeffs and self.start <= 0:
            if self.start < 0 or self.coeffs[0]:
                raise DomainError("exp requires constant term 0 and no negative powers")
        N = self.order
        s = [self.coeff(k) for k in range(N)] if N > 0 else []
        ring = self.ring
        out = [ring.one] + [ring.zero] * max(0, N - 1)
        ks = [s[k] * k if s[k] else None for k in range(N)]
        for n in range(1, N):
            acc = ring.zero
            for k in range(1, n + 1):
                x = ks[k]
                if x is not None:
                    y = out[n - k]
                    if y:
                        acc = acc + x * y
            out[n] = acc * _recip(n)
        return self._like(0, out[:N] if N > 0 else [], N)

    def log(self) -> "TruncSeries":
        if self.order == INF:
            raise DomainError("log of an exact series needs a truncation order; call truncate first")
        if not self.coeffs or self.start != 0 or self.coeffs[0] != 1:
            raise DomainError("log requires constant term 1")
        N = self.order
        s = [self.coeff(k) for k in range(N)]
        ring = self.ring
        out = [ring.zero] * N
        for n in range(1, N):
            acc = s[n] * n
            for k in range(1, n):
                x = out[k]
                y = s[n - k]
                if x and y:
                    acc = acc - x * y * k
            out[n] = acc * _recip(n)
        return self._like(0, out, N)

    def pow_formal(self, gamma) -> "TruncSeries":
        """``exp(gamma * log(self))`` for a ring element ``gamma``; constant term must be 1."""
        if self.order == INF:
            raise DomainError("pow_formal of an exact series needs a truncation order")
        if not self.coeffs or self.start != 0 or self.coeffs[0] != 1:
            raise DomainError("pow_formal requires constant term 1")
        if is_scalar(gamma):
            g = to_mpq(gamma)
            if g == 0:
                return TruncSeries(self.ring, [self.ring.one], order=self.order, var=self.var)
            if g.denominator == 1 and 0 < g <= 4:
                return self ** int(g)
        return (self.log() * gamma).exp()

    def compose(self, g: "TruncSeries") -> "TruncSeries":
        """``self(g(x))``; ``g`` must have positive valuation.  Result uses ``g``'s variable."""
        if g.coeffs and g.start <= 0:
            raise DomainError("inner series must have zero constant term")
        if not g.coeffs:
            if g.order == INF:
                raise DomainError("composition with the zero series")
            vg = g.order
        else:
            vg = g.start
        m = self.start if self.coeffs else 0
        if self.order == INF:
            of = INF
        else:
            of = self.order * vg
        og = g.order
        if og != INF:
            m_der = m if m < 0 else max(m, 1)
            og = og + (m_der - 1) * vg
        order = min(of, og)
        if order == INF:
            hi_f = self.top()
        else:
            hi_f = min(self.top(), -(-order // vg) if vg > 0 else self.top())
        ring = self.ring
        one = TruncSeries(ring, [ring.one], order=INF, var=g.var)
        gt = g.truncate(order) if order != INF else g
        acc = TruncSeries(ring, {}, order=order, var=g.var)
        if not self.coeffs:
            return acc
        # Horner on the nonnegative part, explicit powers for the negative part
        pos = [self.coeff(k) if k >= self.start else ring.zero for k in range(max(0, m), hi_f)]
        if pos:
            h = TruncSeries(ring, {}, order=order, var=g.var)
            for c in reversed(pos):
                h = (h * gt).truncate(order) + TruncSeries(ring, [c], order=order, var=g.var)
            if m > 0:
                h = h * (gt ** m)
            acc = acc + h
        if m < 0:
            ginv = gt.inverse()
            p = one
            for k in range(-1, m - 1, -1):
                p = (p * ginv)
                c = self.coeff(k)
                if c:
                    acc = acc + p.scale(c)
        return acc.truncate(order)

    # ------------------------------------------------------------ output
    def to_triples(self) -> List[List]:
        """JSON-ready ``[exponent, numerator, denominator]`` triples (rational coefficients only)."""
        out = []
        for k, c in self.items():
            r = to_mpq(c if not hasattr(c, "constant_value") else c.constant_value())
            out.append([k, int(r.numerator), int(r.denominator)])
        return out

    def __repr__(self):
        terms = []
        for k, c in self.items():
            cs = fraction_str(c) if is_scalar(c) else f"({c})"
            if k == 0:
                terms.append(cs)
            elif k == 1:
                terms.append(f"{cs}*{self.var}")
            else:
                terms.append(f"{cs}*{self.var}^{k}")
        body = " + ".join(terms) if terms else "0"
        if self.order == INF:
            return body
        return f"{body} + O({self.var}^{self.order})"


def _recip_signed(n: int):
    return _recip(n) if n > 0 else -_recip(-n)


def series(values, order=None, var="q", ring=QQ, start=0) -> TruncSeries:
    """Shorthand: ``series([1, 2, 3], order=5)``."""
    return TruncSeries.from_list(ring, values, order=order, var=var, start=start)


def polynomial(values, var="z", ring=QQ) -> TruncSeries:
    """An exact polynomial from its coefficient list (lowest degree first)."""
    return TruncSeries(ring, list(values), order=INF, var=var)


def exp_series(order: int, var="z", ring=QQ, scale=1) -> TruncSeries:
    """``exp(scale * var)`` truncated at ``order``."""
    s = to_mpq(scale)
    out = []
    term = mpq(1)
    for k in range(order):
        out.append(ring(term))
        term = term * s / (k + 1)
    return TruncSeries(ring, out, order=order, var=var)
