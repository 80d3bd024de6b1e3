"""The even lattice vertex algebra on ``Q[Z x Z] (x) Q[u_{sigma,i}]`` and its Lie bracket.

States are finite sums ``c * e^(n,d) (x) monomial`` where the label ``(n, d)``
stands for the lattice vector ``n p + d b`` (``p`` the point class, ``b`` the
framing generator) and monomials are commuting products of ``u_{sigma,i}``
with ``sigma`` a basis symbol and ``i >= 1``.

Fields are implemented for the two shapes used in wall-crossing
computations: exponential states ``e^alpha (x) 1`` and their dressing
``e^alpha (x) u_{sigma,1}`` (a normally ordered product).  Other shapes raise
:class:`NotImplementedError`.
"""

from __future__ import annotations

from math import comb
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from gmpy2 import mpq

from .errors import DomainError, InternalError
from .geometry import CY4, SURFACE, GeometrySpec
from .linalg import solve_sparse
from .rings import is_scalar, to_mpq

Var = Tuple[str, int]
Monomial = Tuple[Tuple[Var, int], ...]
Label = Tuple[int, int]
Poly = Dict[Monomial, object]

ONE: Monomial = ()
VACUUM_LABEL: Label = (0, 0)


# ------------------------------------------------------------------ monomials
def mono(*powers: Tuple[Var, int]) -> Monomial:
    """Canonical monomial from ``((sym, i), exp)`` pairs (repeats are merged)."""
    acc: Dict[Var, int] = {}
    for var, k in powers:
        if k:
            acc[var] = acc.get(var, 0) + k
    return tuple(sorted((v, k) for v, k in acc.items() if k))


def var(sym: str, i: int = 1) -> Monomial:
    return (((sym, i), 1),)


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    acc = dict(a)
    for v, k in b:
        acc[v] = acc.get(v, 0) + k
    return tuple(sorted(acc.items()))


def mono_weight(m: Monomial) -> int:
    return sum(v[1] * k for v, k in m)


def mono_degree(m: Monomial) -> int:
    return sum(k for _, k in m)


def mono_str(m: Monomial) -> str:
    if not m:
        return "1"
    parts = []
    for (s, i), k in m:
        base = f"u[{s},{i}]"
        parts.append(base if k == 1 else f"{base}^{k}")
    return "*".join(parts)


# ------------------------------------------------------------------ polynomials
def _add_term(acc: Poly, m: Monomial, c) -> None:
    if not c:
        return
    old = acc.get(m)
    new = c if old is None else old + c
    if new:
        acc[m] = new
    elif old is not None:
        del acc[m]


def poly_add(*polys: Poly) -> Poly:
    acc: Poly = {}
    for P in polys:
        for m, c in P.items():
            _add_term(acc, m, c)
    return acc


def poly_scale(P: Poly, c) -> Poly:
    if not c:
        return {}
    out: Poly = {}
    for m, x in P.items():
        _add_term(out, m, x * c)
    return out


def poly_mul(P: Poly, Q: Poly) -> Poly:
    out: Poly = {}
    for m1, c1 in P.items():
        for m2, c2 in Q.items():
            _add_term(out, mono_mul(m1, m2), c1 * c2)
    return out


def poly_deriv(P: Poly, v: Var) -> Poly:
    """``dP/du_v``."""
    out: Poly = {}
    for m, c in P.items():
        for idx, (w, k) in enumerate(m):
            if w == v:
                rest = m[:idx] + (((w, k - 1),) if k > 1 else ()) + m[idx + 1:]
                _add_term(out, rest, c * k)
                break
    return out


def poly_constant(P: Poly):
    return P.get(ONE, 0)


def poly_variables(P: Poly) -> List[Var]:
    return sorted({v for m in P for v, _ in m})


# ------------------------------------------------------------------ states
class VAState:
    """Immutable finite sum of ``coeff * e^label (x) monomial``."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Tuple[Label, Monomial], object]] = None):
        clean = {}
        for (label, m), c in (terms or {}).items():
            if c:
                clean[(tuple(label), m)] = c
        self._terms = clean
        self._hash = None

    # constructors
    @classmethod
    def exponential(cls, label: Label, coeff=1) -> "VAState":
        return cls({(tuple(label), ONE): to_mpq(coeff) if is_scalar(coeff) else coeff})

    @classmethod
    def vacuum(cls) -> "VAState":
        return cls.exponential(VACUUM_LABEL)

    @classmethod
    def from_poly(cls, label: Label, P: Poly) -> "VAState":
        return cls({(tuple(label), m): c for m, c in P.items()})

    @classmethod
    def from_parts(cls, parts: Mapping[Label, Poly]) -> "VAState":
        return cls({(lab, m): c for lab, P in parts.items() for m, c in P.items()})

    # access
    @property
    def terms(self) -> Dict[Tuple[Label, Monomial], object]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def labels(self) -> List[Label]:
        return sorted({lab for lab, _ in self._terms})

    def parts(self) -> Dict[Label, Poly]:
        out: Dict[Label, Poly] = {}
        for (lab, m), c in self._terms.items():
            out.setdefault(lab, {})[m] = c
        return out

    def poly(self, label: Label) -> Poly:
        return {m: c for (lab, m), c in self._terms.items() if lab == tuple(label)}

    def coefficient(self, label: Label, m: Monomial = ONE):
        return self._terms.get((tuple(label), m), 0)

    def weights(self) -> List[int]:
        return sorted({mono_weight(m) for _, m in self._terms})

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    # arithmetic
    def __add__(self, other: "VAState") -> "VAState":
        if not isinstance(other, VAState):
            return NotImplemented
        acc = dict(self._terms)
        for k, c in other._terms.items():
            old = acc.get(k)
            acc[k] = c if old is None else old + c
        return VAState(acc)

    def __neg__(self) -> "VAState":
        return VAState({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "VAState") -> "VAState":
        return self + (-other)

    def scale(self, c) -> "VAState":
        if is_scalar(c):
            c = to_mpq(c)
        return VAState({k: v * c for k, v in self._terms.items()})

    def __mul__(self, c):
        if isinstance(c, VAState):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def map_coeffs(self, fn: Callable) -> "VAState":
        return VAState({k: fn(c) for k, c in self._terms.items()})

    def __eq__(self, other):
        if not isinstance(other, VAState):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset((k, str(v)) for k, v in self._terms.items()))
        return self._hash

    def __repr__(self):
        if not self._terms:
            return "VAState(0)"
        parts = [f"({c}) e^{lab} {mono_str(m)}" for (lab, m), c in sorted(self._terms.items(), key=lambda t: (t[0][0], t[0][1]))]
        return "VAState(" + " + ".join(parts) + ")"


def add_states(states: Iterable[VAState]) -> VAState:
    acc: Dict = {}
    for s in states:
        for k, c in s.items():
            old = acc.get(k)
            acc[k] = c if old is None else old + c
    return VAState(acc)


# ------------------------------------------------------------------ lattice data
class LatticeData:
    """Symmetric pairing on basis symbols plus the sign cocycle on labels.

    ``symbols`` lists the basis symbols; labels ``(n, d)`` are the vectors
    ``n * point + d * framing`` for the two distinguished symbols in ``axes``.
    """

    def __init__(self, symbols: Sequence[str], pairing: Mapping[Tuple[str, str], object],
                 sign: Callable[[Label, Label], int], axes: Tuple[str, str] = ("p", "b"), name: str = ""):
        self.symbols = tuple(symbols)
        if len(set(self.symbols)) != len(self.symbols):
            raise DomainError("basis symbols must be distinct")
        for ax in axes:
            if ax not in self.symbols:
                raise DomainError(f"axis symbol {ax!r} missing from the basis")
        self.axes = tuple(axes)
        self._pair: Dict[Tuple[str, str], mpq] = {}
        for (s, t), val in pairing.items():
            if s not in self.symbols or t not in self.symbols:
                raise DomainError(f"pairing mentions unknown symbol in {(s, t)!r}")
            val = to_mpq(val)
            other = self._pair.get((t, s))
            if other is not None and other != val:
                raise DomainError(f"pairing is not symmetric on {(s, t)!r}")
            if val:
                self._pair[(s, t)] = val
                self._pair[(t, s)] = val
        self._sign = sign
        self.name = name
        for a in self.axes:
            for b in self.axes:
                v = self.chi(a, b)
                if v != int(v):
                    raise DomainError("label pairing must be integral")

    def __repr__(self):
        return f"LatticeData({self.name or 'custom'}, symbols={self.symbols})"

    def vector(self, x) -> Dict[str, int]:
        """Components of a symbol or a label in the basis."""
        if isinstance(x, str):
            return {x: 1}
        n, d = x
        out = {}
        if n:
            out[self.axes[0]] = n
        if d:
            out[self.axes[1]] = d
        return out

    def chi(self, x, y) -> mpq:
        """Bilinear pairing of symbols and/or labels."""
        acc = mpq(0)
        for s, a in self.vector(x).items():
            for t, b in self.vector(y).items():
                v = self._pair.get((s, t))
                if v:
                    acc += a * b * v
        return acc

    def label_chi(self, a: Label, b: Label) -> int:
        return int(self.chi(tuple(a), tuple(b)))

    def sign(self, a: Label, b: Label) -> int:
        s = self._sign(tuple(a), tuple(b))
        if s not in (1, -1):
            raise DomainError("sign cocycle must take values +-1")
        return s

    def check_sign_laws(self, labels: Iterable[Label]) -> List[str]:
        """Violations of normalisation, symmetry and the 2-cocycle law on the given labels."""
        labels = [tuple(l) for l in labels]
        bad = []
        for a in labels:
            if self.sign(a, (0, 0)) != 1 or self.sign((0, 0), a) != 1:
                bad.append(f"normalisation at {a}")
            for b in labels:
                expo = self.label_chi(a, b) + self.label_chi(a, a) * self.label_chi(b, b)
                if self.sign(a, b) != (-1) ** (expo % 2) * self.sign(b, a):
                    bad.append(f"symmetry at {a},{b}")
                for c in labels:
                    ab = (a[0] + b[0], a[1] + b[1])
                    bc = (b[0] + c[0], b[1] + c[1])
                    if self.sign(a, b) * self.sign(ab, c) != self.sign(b, c) * self.sign(a, bc):
                        bad.append(f"cocycle at {a},{b},{c}")
        return bad


def basis_symbols(geom: GeometrySpec) -> List[str]:
    return [f"v{i}" for i in range(geom.basis_dim)]


def _require_basis(geom: GeometrySpec):
    if not geom.has_basis:
        raise DomainError("the vertex-algebra route needs basis-level geometry (gram and vectors)")


def surface_lattice(geom: GeometrySpec) -> LatticeData:
    """Pair lattice of ``Quot_S(E, n)``: ``chi(v,w) = -2 v.w``, ``chi(v,b) = c_1(E).v - e c_1.v/2``,
    ``chi(p,b) = -e``; sign ``(-1)^(e d_1 n_2)``."""
    _require_basis(geom)
    if geom.kind != SURFACE:
        raise DomainError("surface_lattice needs a surface geometry")
    syms = basis_symbols(geom)
    e = geom.e
    pairing = {}
    for i, s in enumerate(syms):
        for j, t in enumerate(syms):
            pairing[(s, t)] = -2 * geom.gram[i][j]
        pairing[(s, "b")] = to_mpq(geom.pair_basis(geom.c1E, i)) - mpq(e, 2) * geom.pair_basis(geom.canonical, i)
    pairing[("p", "b")] = -e
    return LatticeData(syms + ["p", "b"], pairing, lambda a, b: -1 if (e * a[1] * b[0]) % 2 else 1,
                       name=f"surface(e={e})")


def surface_twisted_lattice(geom: GeometrySpec, c1L: Sequence) -> LatticeData:
    """L-twisted lattice of the Hilbert scheme (``E = O``): ``chi_L(v,w) = -v.w``,
    ``chi_L(v,b) = c_1(L).v``, trivial signs."""
    _require_basis(geom)
    syms = basis_symbols(geom)
    pairing = {}
    for i, s in enumerate(syms):
        for j, t in enumerate(syms):
            pairing[(s, t)] = -geom.gram[i][j] if geom.kind == SURFACE else 0
        pairing[(s, "b")] = geom.pair_basis(tuple(c1L), i)
    if geom.kind == SURFACE:
        sign = lambda a, b: 1
    else:
        sign = lambda a, b: -1 if (a[1] * b[0] + a[0] * b[1]) % 2 else 1
    return LatticeData(syms + ["p", "b"], pairing, sign, name=f"{geom.kind}-twisted")


def cy4_lattice(geom: GeometrySpec, chi_EE: int = 0) -> LatticeData:
    """Pair lattice of ``Quot_X(E, n)``: ``chi(v,w) = 0`` on curve classes, ``chi(v,b) = c_1(E).v``,
    ``chi(p,b) = -e``, ``chi(b,b) = chi(E^*E)``; point-canonical sign ``(-1)^(e n_1 d_2)``."""
    _require_basis(geom)
    if geom.kind != CY4:
        raise DomainError("cy4_lattice needs a fourfold geometry")
    syms = basis_symbols(geom)
    e = geom.e
    pairing = {}
    for i, s in enumerate(syms):
        pairing[(s, "b")] = geom.pair_basis(geom.c1E, i)
    pairing[("p", "b")] = -e
    pairing[("b", "b")] = chi_EE
    return LatticeData(syms + ["p", "b"], pairing, lambda a, b: -1 if (e * a[0] * b[1]) % 2 else 1,
                       name=f"cy4(e={e})")


def pair_lattice(geom: GeometrySpec) -> LatticeData:
    return surface_lattice(geom) if geom.kind == SURFACE else cy4_lattice(geom)


# ------------------------------------------------------------------ translation
def translate(state: VAState, lattice: LatticeData) -> VAState:
    """``T``: the derivation with ``T(e^alpha) = e^alpha (x) sum alpha_s u_{s,1}`` and
    ``T(u_{s,i}) = i u_{s,i+1}``."""
    out: Dict = {}
    for (lab, m), c in state.items():
        for s, a in lattice.vector(lab).items():
            k = (lab, mono_mul(m, var(s, 1)))
            out[k] = out.get(k, 0) + c * a
        for idx, ((s, i), k) in enumerate(m):
            rest = m[:idx] + ((((s, i), k - 1),) if k > 1 else ()) + m[idx + 1:]
            key = (lab, mono_mul(rest, var(s, i + 1)))
            out[key] = out.get(key, 0) + c * (k * i)
    return VAState(out)


# ------------------------------------------------------------------ fields
class FieldExpansion:
    """Coefficients ``[z^k] Y(u, z) v`` for ``lo <= k <= hi``."""

    def __init__(self, coeffs: Mapping[int, VAState], lo: int, hi: int):
        self.lo, self.hi = lo, hi
        self._c = {k: s for k, s in coeffs.items() if lo <= k <= hi and not s.is_zero()}

    def coeff(self, k: int) -> VAState:
        if not self.lo <= k <= self.hi:
            raise IndexError(f"z^{k} outside the computed window [{self.lo}, {self.hi}]")
        return self._c.get(k, VAState())

    def powers(self) -> List[int]:
        return sorted(self._c)

    def __eq__(self, other):
        if not isinstance(other, FieldExpansion):
            return NotImplemented
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return all(self.coeff(k) == other.coeff(k) for k in range(lo, hi + 1))

    def __repr__(self):
        return f"FieldExpansion[{self.lo},{self.hi}]({ {k: v for k, v in self._c.items()} })"


def _creation_series(lattice: LatticeData, label: Label, top: int) -> List[Poly]:
    """``exp(sum_{k>0} sum_s alpha_s u_{s,k} z^k / k)`` as ``[P_0, ..., P_top]``."""
    vec = lattice.vector(label)
    out: List[Poly] = [{ONE: mpq(1)}]
    for m in range(1, top + 1):
        acc: Poly = {}
        for k in range(1, m + 1):
            lin = {var(s, k): mpq(a) for s, a in vec.items()}
            for mm, c in poly_mul(lin, out[m - k]).items():
                _add_term(acc, mm, c)
        out.append(poly_scale(acc, mpq(1, m)))
    return out


def _annihilate(lattice: LatticeData, label: Label, K: Poly) -> Dict[int, Poly]:
    """``exp(-sum_k sum_s chi(alpha,s) d/du_{s,k} z^-k) K``, i.e. ``u_{s,k} -> u_{s,k} - chi(alpha,s) z^-k``."""
    shifts = {s: lattice.chi(label, s) for s in lattice.symbols}
    out: Dict[int, Poly] = {}
    for m, c in K.items():
        # expand prod (u - a z^-i)^k
        partial: Dict[int, Poly] = {0: {ONE: c}}
        for (s, i), k in m:
            a = shifts.get(s, 0)
            factor: Dict[int, Poly] = {}
            for r in range(k + 1):
                coeff = comb(k, r) * ((-a) ** r) if r else 1
                if not coeff:
                    continue
                factor.setdefault(-i * r, {})[(((s, i), k - r),) if k - r else ONE] = mpq(coeff)
            nxt: Dict[int, Poly] = {}
            for p1, P1 in partial.items():
                for p2, P2 in factor.items():
                    tgt = nxt.setdefault(p1 + p2, {})
                    for mm, cc in poly_mul(P1, P2).items():
                        _add_term(tgt, mm, cc)
            partial = nxt
        for p, P in partial.items():
            tgt = out.setdefault(p, {})
            for mm, cc in P.items():
                _add_term(tgt, mm, cc)
    return {p: P for p, P in out.items() if P}


def _exp_field(lattice: LatticeData, alpha: Label, v: VAState, lo: int, hi: int) -> Dict[int, Dict]:
    """``Y(e^alpha (x) 1, z) v`` restricted to ``lo <= power <= hi`` as {power: {(label, mono): c}}."""
    out: Dict[int, Dict] = {}
    for beta, K in v.parts().items():
        eps = lattice.sign(alpha, beta)
        shift = lattice.label_chi(alpha, beta)
        ann = _annihilate(lattice, alpha, K)
        if not ann:
            continue
        lowest = min(ann)
        top = hi - shift - lowest
        if top < 0:
            continue
        E = _creation_series(lattice, alpha, top)
        tgt_label = (alpha[0] + beta[0], alpha[1] + beta[1])
        for j, A in ann.items():
            for m_e in range(len(E)):
                p = shift + j + m_e
                if p < lo or p > hi:
                    continue
                bucket = out.setdefault(p, {})
                for mm, c in poly_mul(E[m_e], A).items():
                    key = (tgt_label, mm)
                    bucket[key] = bucket.get(key, 0) + c * eps
    return out


def _lowest_power(lattice: LatticeData, alpha: Label, v: VAState) -> int:
    low = None
    for beta, K in v.parts().items():
        ann = _annihilate(lattice, alpha, K)
        if ann:
            p = lattice.label_chi(alpha, beta) + min(ann)
            low = p if low is None else min(low, p)
    return 0 if low is None else low


def _dressed_field(lattice: LatticeData, alpha: Label, sym: str, v: VAState, lo: int, hi: int) -> Dict[int, Dict]:
    """``:Y(e^0 (x) u_{sym,1}, z) Y(e^alpha (x) 1, z): v``."""
    out: Dict[int, Dict] = {}

    def put(p, key, c):
        if lo <= p <= hi and c:
            bucket = out.setdefault(p, {})
            bucket[key] = bucket.get(key, 0) + c

    # creation part: sum_k u_{sym,k} z^(k-1) Y(e^alpha, z) v
    base_lo = _lowest_power(lattice, alpha, v)
    F = _exp_field(lattice, alpha, v, min(base_lo, lo), hi)
    for p, bucket in F.items():
        for k in range(1, hi - p + 2):
            q = p + k - 1
            if q < lo:
                continue
            for (lab, mm), c in bucket.items():
                put(q, (lab, mono_mul(mm, var(sym, k))), c)
    # annihilation part applied first: sum_k sum_t k chi(sym,t) dK/du_{t,k} z^(-k-1) + chi(sym,beta) z^-1
    for beta, K in v.parts().items():
        pieces: Dict[int, Poly] = {}
        zero_mode = lattice.chi(sym, beta)
        if zero_mode:
            pieces[-1] = poly_scale(K, zero_mode)
        for w in poly_variables(K):
            t, k = w
            c = lattice.chi(sym, t)
            if c:
                d = poly_scale(poly_deriv(K, w), c * k)
                pieces[-k - 1] = poly_add(pieces.get(-k - 1, {}), d)
        for p, P in pieces.items():
            if not P:
                continue
            sub = VAState.from_poly(beta, P)
            G = _exp_field(lattice, alpha, sub, lo - p, hi - p)
            for q, bucket in G.items():
                for key, c in bucket.items():
                    put(q + p, key, c)
    return out


def _field_shape(u: VAState):
    """Split ``u`` into (coeff, alpha, symbol-or-None) pieces, rejecting unsupported shapes."""
    pieces = []
    for (lab, m), c in u.items():
        if not m:
            pieces.append((c, lab, None))
        elif len(m) == 1 and m[0][1] == 1 and m[0][0][1] == 1:
            pieces.append((c, lab, m[0][0][0]))
        else:
            raise NotImplementedError(
                f"field of e^{lab} (x) {mono_str(m)} is outside the supported shapes "
                "(exponential states and u_(s,1)-dressed exponential states)")
    return pieces


def field_apply(u: VAState, v: VAState, lattice: LatticeData, window: Tuple[int, int]) -> FieldExpansion:
    """``Y(u, z) v`` for ``z``-powers in ``window`` (inclusive), exactly."""
    lo, hi = window
    acc: Dict[int, Dict] = {}
    for c, alpha, sym in _field_shape(u):
        part = (_exp_field(lattice, alpha, v, lo, hi) if sym is None
                else _dressed_field(lattice, alpha, sym, v, lo, hi))
        for p, bucket in part.items():
            tgt = acc.setdefault(p, {})
            for key, x in bucket.items():
                tgt[key] = tgt.get(key, 0) + x * c
    return FieldExpansion({p: VAState(b) for p, b in acc.items()}, lo, hi)


def lie_bracket(u: VAState, v: VAState, lattice: LatticeData) -> VAState:
    """``[u, v] = [z^-1] Y(u, z) v`` (a representative modulo ``T``-images)."""
    return field_apply(u, v, lattice, (-1, -1)).coeff(-1)


# ------------------------------------------------------------------ T-images
def _monomials_of_weight(symbols: Sequence[str], weight: int) -> List[Monomial]:
    """All monomials in ``u_{s,i}`` of total weight ``sum i = weight``."""
    if weight == 0:
        return [ONE]
    vars_ = [(s, i) for i in range(1, weight + 1) for s in symbols]
    out: List[Monomial] = []

    def rec(start: int, remaining: int, acc: List[Var]):
        if remaining == 0:
            out.append(mono(*((v, 1) for v in acc)))
            return
        for idx in range(start, len(vars_)):
            v = vars_[idx]
            if v[1] <= remaining:
                acc.append(v)
                rec(idx, remaining - v[1], acc)
                acc.pop()

    rec(0, weight, [])
    return sorted(set(out))


def t_image_membership(x: VAState, lattice: LatticeData, symbols: Optional[Sequence[str]] = None):
    """Decide whether ``x = T(y)``; returns ``(True, y)`` or ``(False, None)``.

    ``x`` must be homogeneous (one label, one weight); ``y`` ranges over the
    piece of weight one lower in the given symbols (default: all basis symbols).
    """
    if x.is_zero():
        return True, VAState()
    labels = x.labels()
    weights = x.weights()
    if len(labels) != 1 or len(weights) != 1:
        raise DomainError("t_image_membership needs a state homogeneous in label and weight")
    lab, w = labels[0], weights[0]
    for _, c in x.items():
        if not is_scalar(c):
            raise DomainError("t_image_membership works over rational coefficients")
    if w == 0:
        return False, None
    # T never removes a symbol from a monomial, so symbols absent from x cannot help
    present = {v[0] for (_, m) in x.terms for v, _k in m}
    syms = tuple(s for s in (symbols if symbols is not None else lattice.symbols) if s in present)
    basis = _monomials_of_weight(syms, w - 1)
    columns = []
    for m in basis:
        img = translate(VAState({(lab, m): mpq(1)}), lattice)
        columns.append({mm: c for (_, mm), c in img.items()})
    rhs = {m: c for (_, m), c in x.items()}
    sol = solve_sparse(columns, rhs)
    if sol is None:
        return False, None
    witness = VAState({(lab, m): c for m, c in zip(basis, sol) if c})
    if translate(witness, lattice) != x:
        raise InternalError("T-image witness does not reproduce the state")
    return True, witness
