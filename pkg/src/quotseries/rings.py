"""Exact coefficient rings.

Every ring object exposes the same small protocol used by the series code:

* ``zero`` / ``one``
* ``ring(x)`` coerces integers, fractions and own elements
* ``ring.inverse(x)`` returns ``1/x`` or raises :class:`NonInvertible`
* ``ring.is_zero(x)``

Elements themselves support ``+ - *`` and integer powers through the usual
Python operators, and can be multiplied by rationals on either side.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

import gmpy2
from gmpy2 import mpq

from .errors import DomainError, NonInvertible

MPQ_TYPE = type(mpq(0))
_SCALARS = (int, MPQ_TYPE, Fraction, type(gmpy2.mpz(0)))


def to_mpq(x) -> "mpq":
    """Convert ints, Fractions, mpq and ``"num/den"`` strings to ``mpq``."""
    if isinstance(x, MPQ_TYPE):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, (int, type(gmpy2.mpz(0)))):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return mpq(Fraction(x.strip()))
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a Fraction or a 'num/den' string")
    raise TypeError(f"cannot interpret {x!r} as a rational")


def fraction_str(x) -> str:
    """Serialize a rational as ``"num/den"`` (or ``"num"`` for integers)."""
    x = to_mpq(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def is_scalar(x) -> bool:
    return isinstance(x, _SCALARS) and not isinstance(x, bool)


class RationalField:
    """The field of rationals, backed by ``gmpy2.mpq``."""

    name = "QQ"
    is_field = True

    def __init__(self):
        self.zero = mpq(0)
        self.one = mpq(1)

    def __call__(self, x):
        return to_mpq(x)

    def inverse(self, x):
        if x == 0:
            raise NonInvertible("0 is not invertible in QQ")
        return 1 / to_mpq(x)

    def is_zero(self, x) -> bool:
        return x == 0

    def constant(self, x):
        return to_mpq(x)

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")


QQ = RationalField()


Monomial = Tuple[int, ...]


class PolyRing:
    """Sparse multivariate Laurent polynomials over QQ.

    ``caps`` maps a generator name to a maximal degree; monomials exceeding it
    are dropped, so that generator becomes nilpotent.  Any generator without a
    cap may appear with negative exponents.
    """

    is_field = False

    def __init__(self, gens: Sequence[str], caps: Optional[Mapping[str, int]] = None):
        self.gens = tuple(gens)
        if len(set(self.gens)) != len(self.gens):
            raise ValueError("duplicate generator names")
        caps = dict(caps or {})
        unknown = set(caps) - set(self.gens)
        if unknown:
            raise ValueError(f"caps for unknown generators {sorted(unknown)}")
        self.caps = tuple(caps.get(g) for g in self.gens)
        self._capped = tuple(i for i, c in enumerate(self.caps) if c is not None)
        self.nvars = len(self.gens)
        self._zero_exp = (0,) * self.nvars
        self.zero = Poly(self, {})
        self.one = Poly(self, {self._zero_exp: mpq(1)})

    def __repr__(self):
        caps = {g: c for g, c in zip(self.gens, self.caps) if c is not None}
        return f"PolyRing({list(self.gens)}, caps={caps})"

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self.gens == other.gens and self.caps == other.caps

    def __hash__(self):
        return hash((self.gens, self.caps))

    def __call__(self, x) -> "Poly":
        if isinstance(x, Poly):
            if x.ring is self:
                return x
            if x.ring == self:
                return Poly(self, dict(x.terms))
            raise TypeError(f"cannot coerce element of {x.ring} into {self}")
        c = to_mpq(x)
        return Poly(self, {self._zero_exp: c} if c else {})

    def gen(self, name: str) -> "Poly":
        i = self.gens.index(name)
        exp = [0] * self.nvars
        exp[i] = 1
        return self.monomial(tuple(exp))

    def gens_tuple(self):
        return tuple(self.gen(g) for g in self.gens)

    def monomial(self, exp: Iterable[int], coeff=1) -> "Poly":
        exp = tuple(exp)
        c = to_mpq(coeff)
        if not c or not self._admissible(exp):
            return self.zero
        return Poly(self, {exp: c})

    def _admissible(self, exp: Monomial) -> bool:
        for i in self._capped:
            if exp[i] > self.caps[i] or exp[i] < 0:
                return False
        return True

    def is_zero(self, x) -> bool:
        return not self(x).terms

    def constant(self, x):
        """Constant coefficient as a rational."""
        return self(x).terms.get(self._zero_exp, mpq(0))

    def inverse(self, x) -> "Poly":
        p = self(x)
        if not p.terms:
            raise NonInvertible("zero polynomial")
        # Split into the part free of nilpotent generators and the rest.
        free = {m: c for m, c in p.terms.items() if all(m[i] == 0 for i in self._capped)}
        if len(free) != 1:
            raise NonInvertible(f"{p} is not a monomial unit times (1 + nilpotent)")
        (m0, c0), = free.items()
        lead_inv = Poly(self, {tuple(-k for k in m0): 1 / c0})
        rest = p * lead_inv - self.one
        if not rest.terms:
            return lead_inv
        depth = sum(self.caps[i] for i in self._capped)
        acc = self.one
        power = self.one
        neg = -rest
        for _ in range(depth):
            power = power * neg
            if not power.terms:
                break
            acc = acc + power
        return acc * lead_inv


class Poly:
    """Element of a :class:`PolyRing`; immutable."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: Dict[Monomial, "mpq"]):
        self.ring = ring
        self.terms = terms

    # construction helpers -------------------------------------------------
    def _wrap(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring is not self.ring and other.ring != self.ring:
                raise TypeError("mixing polynomials from different rings")
            return other
        if is_scalar(other):
            return self.ring(other)
        return NotImplemented

    # arithmetic ----------------------------------------------------------
    def __add__(self, other):
        o = self._wrap(other)
        if o is NotImplemented:
            return NotImplemented
        if not o.terms:
            return self
        if not self.terms:
            return o
        t = dict(self.terms)
        for m, c in o.terms.items():
            s = t.get(m)
            if s is None:
                t[m] = c
            else:
                s = s + c
                if s:
                    t[m] = s
                else:
                    del t[m]
        return Poly(self.ring, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        o = self._wrap(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._wrap(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if is_scalar(other):
            c = to_mpq(other)
            if not c:
                return self.ring.zero
            return Poly(self.ring, {m: v * c for m, v in self.terms.items()})
        o = self._wrap(other)
        if o is NotImplemented:
            return NotImplemented
        if not self.terms or not o.terms:
            return self.ring.zero
        ring = self.ring
        capped = ring._capped
        caps = ring.caps
        t: Dict[Monomial, mpq] = {}
        get = t.get
        n = ring.nvars
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                if n == 1:
                    m = (m1[0] + m2[0],)
                else:
                    m = tuple([a + b for a, b in zip(m1, m2)])
                if capped:
                    bad = False
                    for i in capped:
                        if m[i] > caps[i]:
                            bad = True
                            break
                    if bad:
                        continue
                s = get(m)
                t[m] = c1 * c2 if s is None else s + c1 * c2
        return Poly(ring, {m: c for m, c in t.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if is_scalar(other):
            c = to_mpq(other)
            if not c:
                raise NonInvertible("division by zero")
            return self * (1 / c)
        o = self._wrap(other)
        if o is NotImplemented:
            return NotImplemented
        return self * self.ring.inverse(o)

    def __rtruediv__(self, other):
        o = self._wrap(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.ring.inverse(self)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("only integer powers of polynomials")
        if k < 0:
            return self.ring.inverse(self) ** (-k)
        result = self.ring.one
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # comparison ----------------------------------------------------------
    def __eq__(self, other):
        o = self._wrap(other) if not isinstance(other, Poly) else other
        if o is NotImplemented:
            return NotImplemented
        return self.terms == o.terms

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    # inspection ------------------------------------------------------------
    def is_constant(self) -> bool:
        return all(m == self.ring._zero_exp for m in self.terms)

    def constant_value(self):
        if not self.is_constant():
            raise DomainError(f"{self} is not constant")
        return self.terms.get(self.ring._zero_exp, mpq(0))

    def degree(self, name: str) -> Tuple[int, int]:
        """(min, max) exponent of a generator; (0, 0) for the zero polynomial."""
        i = self.ring.gens.index(name)
        exps = [m[i] for m in self.terms]
        if not exps:
            return (0, 0)
        return (min(exps), max(exps))

    def coefficient(self, **powers) -> "Poly":
        """Collect the terms with the given generator exponents, dropping those generators."""
        idx = {self.ring.gens.index(k): v for k, v in powers.items()}
        t = {}
        for m, c in self.terms.items():
            if all(m[i] == v for i, v in idx.items()):
                mm = tuple(0 if i in idx else e for i, e in enumerate(m))
                t[mm] = c
        return Poly(self.ring, t)

    def subs(self, target=None, **values):
        """Substitute generators by elements of ``target`` (default: this ring).

        Values may be scalars or elements of the target ring; any generator left
        out is mapped to the same-named generator of the target ring.
        """
        target = target or self.ring
        gens_t = []
        for g in self.ring.gens:
            if g in values:
                gens_t.append(values[g])
            else:
                gens_t.append(target.gen(g) if isinstance(target, PolyRing) else target(0))
        result = target.zero
        cache: Dict[Tuple[int, int], object] = {}
        for m, c in self.terms.items():
            term = target(c) if not isinstance(target, RationalField) else c
            for i, k in enumerate(m):
                if k == 0:
                    continue
                key = (i, k)
                val = cache.get(key)
                if val is None:
                    base = gens_t[i]
                    if k > 0:
                        val = base ** k
                    else:
                        inv = target.inverse(base) if not is_scalar(base) else 1 / to_mpq(base)
                        val = inv ** (-k)
                    cache[key] = val
                term = term * val
            result = result + term
        return result

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, reverse=True):
            c = self.terms[m]
            mono = "*".join(
                (g if k == 1 else f"{g}^{k}") for g, k in zip(self.ring.gens, m) if k
            )
            if not mono:
                parts.append(fraction_str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{fraction_str(c)}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    __str__ = __repr__


class SympyFractionField:
    """Rational functions QQ(gens) via ``sympy.polys.fields``.

    Used where genuinely non-monomial denominators appear (the Nekrasov genus
    has ``w - 1/w`` in its normalisation).
    """

    is_field = True

    def __init__(self, gens: Sequence[str]):
        from sympy import QQ as SQQ
        from sympy.polys.fields import field

        self.gens = tuple(gens)
        self._field, *self._gen_elems = field(",".join(self.gens), SQQ)
        self.zero = self._field.zero
        self.one = self._field.one

    def __repr__(self):
        return f"QQ({', '.join(self.gens)})"

    def __call__(self, x):
        if isinstance(x, type(self.one)):
            return x
        q = to_mpq(x)
        return self._field(int(q.numerator)) / int(q.denominator)

    def gen(self, name: str):
        return self._gen_elems[self.gens.index(name)]

    def inverse(self, x):
        if not x:
            raise NonInvertible("zero rational function")
        return self.one / x

    def is_zero(self, x) -> bool:
        return not x

    def subs(self, x, **values):
        """Evaluate at rational points; raises NonInvertible if a denominator vanishes."""
        from sympy import Rational

        expr = x.as_expr()
        sym = {s.name: s for s in expr.free_symbols}
        args = {sym[k]: Rational(int(to_mpq(v).numerator), int(to_mpq(v).denominator))
                for k, v in values.items() if k in sym}
        num, den = x.numer.as_expr(), x.denom.as_expr()
        dv = den.subs(args)
        if dv == 0:
            raise NonInvertible("denominator vanishes at the evaluation point")
        val = num.subs(args) / dv
        if val.free_symbols:
            return self._field.from_expr(val)
        return to_mpq(Fraction(int(val.p), int(val.q)))

    def laurent_terms(self, x, name: str) -> Dict[int, "mpq"]:
        """Exponent -> coefficient map when ``x`` is a Laurent polynomial in one generator."""
        from sympy import Poly as SPoly, Symbol

        sym = Symbol(name)
        den = SPoly(x.denom.as_expr(), sym)
        if len(den.terms()) != 1:
            raise DomainError(f"{x} is not a Laurent polynomial in {name}")
        (dexp,), dcoef = den.terms()[0]
        num = SPoly(x.numer.as_expr(), sym)
        out = {}
        for (k,), c in num.terms():
            out[k - dexp] = to_mpq(Fraction(int((c / dcoef).p), int((c / dcoef).q)))
        return out
