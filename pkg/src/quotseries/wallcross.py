"""Wall-crossing in the lattice vertex algebra and integration of the resulting classes.

Two recursions are implemented literally with :func:`lie_bracket`:

* :func:`recover_point_classes` inverts the L-twisted Hilbert-scheme formula
  ``I_n(L) e^(n,1) = sum (-1)^k/k! [[..[e^(0,1), M_n1]^L, ..]^L, M_nk]^L``
  order by order in ``n``;
* :func:`quot_classes` assembles ``Q_n = sum 1/k! [M_n1, [.., [M_nk, e^(0,1)]]]``.

:func:`closed_form_quot` evaluates the exponential closed form of the same
classes, and :func:`integrate_genus` turns classes into numbers by the
exponential differential operator built from the log-coefficients of the genera.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from gmpy2 import mpq

from .errors import ContradictionError, DomainError, InternalError
from .genus import GenusSpec
from .geometry import CY4, SURFACE, GeometrySpec
from .lagrange import macmahon, sigma2
from .linalg import solve_linear
from .rings import QQ, PolyRing, is_scalar, to_mpq
from .series import TruncSeries
from .vertex import (ONE, Label, LatticeData, Poly, VAState, _add_term, _creation_series, basis_symbols,
                     lie_bracket, mono_mul, pair_lattice, poly_add, poly_deriv, poly_mul, poly_scale,
                     surface_twisted_lattice, var)

POINT = "p"
FRAMING = "b"
FRAMING_STATE_LABEL: Label = (0, 1)


def compositions(n: int):
    """Ordered tuples of positive integers summing to ``n``."""
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in compositions(n - first):
            yield (first,) + rest


def partitions(n: int, largest: Optional[int] = None):
    """Non-increasing tuples of positive integers summing to ``n``."""
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


# ------------------------------------------------------------------ point classes
@dataclass(frozen=True)
class PointClasses:
    """``M_n = e^(n,0) (x) (sum_v a_v(n) u_(v,1) + lambda_n u_(p,1))`` for ``1 <= n <= N``.

    ``coeffs[n]`` holds ``a_v(n)`` in the order of ``symbols``; ``ambiguity[n]``
    is the coefficient of ``u_(p,1)``, which the Hilbert-scheme input cannot
    fix (it multiplies a ``T``-image).  It is 0 or a formal ring generator.
    """

    kind: str
    symbols: Tuple[str, ...]
    coeffs: Mapping[int, Tuple]
    ambiguity: Mapping[int, object] = field(default_factory=dict)
    undetermined_direction: Optional[str] = POINT

    @property
    def N(self) -> int:
        return max(self.coeffs) if self.coeffs else 0

    def poly(self, n: int) -> Poly:
        P: Poly = {}
        for s, a in zip(self.symbols, self.coeffs[n]):
            _add_term(P, var(s, 1), a)
        lam = self.ambiguity.get(n, 0)
        if not _is_zero(lam):
            _add_term(P, var(POINT, 1), lam)
        return P

    def state(self, n: int) -> VAState:
        return VAState.from_poly((n, 0), self.poly(n))

    def with_ambiguity(self, ring: Optional[PolyRing] = None) -> "PointClasses":
        """Attach a formal generator ``lam{n}`` to every ``u_(p,1)`` direction."""
        names = [f"lam{n}" for n in sorted(self.coeffs)]
        ring = ring or PolyRing(names)
        amb = {n: ring.gen(f"lam{n}") for n in sorted(self.coeffs)}
        return PointClasses(self.kind, self.symbols, dict(self.coeffs), amb, self.undetermined_direction)

    @property
    def ambiguity_ring(self):
        for lam in self.ambiguity.values():
            ring = getattr(lam, "ring", None)
            if ring is not None:
                return ring
        return None


def _is_zero(x) -> bool:
    return not x


def closed_form_points(geom: GeometrySpec, N: int) -> PointClasses:
    """Point classes read off ``(1 - e^p q)^(-sum c_(1,v) u_(v,1))`` resp. ``M(e^p q)^(sum c_(3,v) u_(v,1))``."""
    _require_basis(geom)
    syms = tuple(basis_symbols(geom))
    coeffs = {}
    for n in range(1, N + 1):
        if geom.kind == SURFACE:
            factor = mpq(1, n)
        else:
            factor = mpq(sigma2(n), n)
        coeffs[n] = tuple(to_mpq(c) * factor for c in geom.canonical)
    return PointClasses(geom.kind, syms, coeffs)


def stated_points(geom: GeometrySpec, N: int) -> PointClasses:
    """Surface point classes with the opposite sign, ``a_v(n) = -c_(1,v)/n``.

    The literal bracket recovery does not produce these; they are kept so the
    mismatch can be reported (see :func:`recover_point_classes`).  On a
    fourfold this coincides with :func:`closed_form_points`.
    """
    pts = closed_form_points(geom, N)
    if geom.kind != SURFACE:
        return pts
    return PointClasses(pts.kind, pts.symbols, {n: tuple(-c for c in v) for n, v in pts.coeffs.items()})


def _require_basis(geom: GeometrySpec):
    if not geom.has_basis:
        raise DomainError("wall-crossing needs basis-level geometry (gram and component vectors)")


def default_hilbert_input(geom: GeometrySpec, c1L: Sequence, N: int) -> TruncSeries:
    """Generating series of L-twisted Hilbert-scheme invariants used as recursion input.

    Surfaces: ``(1 - q)^(-c_1(L).c_1)``.  Fourfolds: ``M(-q)^(c_1(L).c_3)``.
    """
    dot = geom.pair(tuple(c1L), geom.canonical)
    if geom.kind == SURFACE:
        base = TruncSeries(QQ, [1, -1], order=N + 1, var="q")
        return base.pow_formal(-to_mpq(dot))
    return macmahon(N + 1).dilate(-1).pow_formal(to_mpq(dot))


def twisted_lattice(geom: GeometrySpec, c1L: Sequence) -> LatticeData:
    return surface_twisted_lattice(geom, c1L)


@dataclass
class RecoveryReport:
    """Per-step bookkeeping of :func:`recover_point_classes`."""

    new_unknowns: Dict[int, int] = field(default_factory=dict)
    point_column_zero: Dict[int, bool] = field(default_factory=dict)


def _scalar_multiple(state: VAState, label: Label):
    """Coefficient of ``e^label (x) 1``; anything else in the state is an internal error."""
    for (lab, m), c in state.items():
        if lab != tuple(label) or m != ONE:
            raise InternalError(f"expected a multiple of e^{label}, found term e^{lab} {m}")
    return state.coefficient(label, ONE)


def recover_point_classes(geom: GeometrySpec, N: int, hilbert: Optional[Callable] = None,
                          twists: Optional[Sequence[Sequence]] = None,
                          report: Optional[RecoveryReport] = None) -> PointClasses:
    """Solve the twisted Hilbert-scheme wall-crossing triangularly for ``a_v(n)``, ``n <= N``.

    ``twists`` lists first Chern classes of line bundles ``L`` (components in the
    basis; default: the basis vectors themselves) and ``hilbert(c1L, N)`` returns
    the input series for each (default :func:`default_hilbert_input`).  The
    ``u_(p,1)`` coefficient is left undetermined; its column in every linear
    system is checked to vanish identically.
    """
    _require_basis(geom)
    b = geom.basis_dim
    syms = tuple(basis_symbols(geom))
    twists = [tuple(t) for t in (twists if twists is not None else
                                 [tuple(1 if i == j else 0 for i in range(b)) for j in range(b)])]
    hilbert = hilbert or (lambda c1L, n: default_hilbert_input(geom, c1L, n))
    lattices = [twisted_lattice(geom, t) for t in twists]
    inputs = [hilbert(t, N) for t in twists]
    seed = VAState.exponential(FRAMING_STATE_LABEL)
    coeffs: Dict[int, Tuple] = {}
    for n in range(1, N + 1):
        rows, rhs = [], []
        point_zero = True
        for lat, I in zip(lattices, inputs):
            known = _twisted_known_part(lat, seed, coeffs, syms, n)
            cols = []
            for s in syms + (POINT,):
                unit = VAState.from_poly((n, 0), {var(s, 1): mpq(1)})
                cols.append(-_scalar_multiple(lie_bracket(seed, unit, lat), (n, 1)))
            if cols[-1]:
                point_zero = False
            rows.append(cols[:-1])
            rhs.append(to_mpq(I.coeff(n)) - known)
        sol, nullity = solve_linear(rows, rhs)
        if sol is None:
            raise ContradictionError(f"wall-crossing equations at n={n} are inconsistent")
        if nullity:
            raise DomainError(f"the twists do not determine a_v({n}) (nullity {nullity}); "
                              "supply more line bundles or a nondegenerate pairing")
        coeffs[n] = tuple(sol)
        if report is not None:
            report.new_unknowns[n] = len(syms)
            report.point_column_zero[n] = point_zero
        if not point_zero:
            raise InternalError("the u_(p,1) direction entered the twisted bracket")
    return PointClasses(geom.kind, syms, coeffs)


def _twisted_known_part(lat: LatticeData, seed: VAState, coeffs, syms, n: int):
    """Scalar in front of ``e^(n,1)`` from all compositions of ``n`` except ``(n,)``."""
    states = {n_: VAState.from_poly((n_, 0), {var(s, 1): a for s, a in zip(syms, coeffs[n_]) if a})
              for n_ in coeffs}
    total = mpq(0)
    cache: Dict[Tuple[int, ...], VAState] = {(): seed}

    def chain(prefix: Tuple[int, ...]) -> VAState:
        got = cache.get(prefix)
        if got is None:
            got = lie_bracket(chain(prefix[:-1]), states[prefix[-1]], lat)
            cache[prefix] = got
        return got

    for comp in compositions(n):
        if comp == (n,):
            continue
        k = len(comp)
        c = _scalar_multiple(chain(comp), (n, 1))
        total += c * mpq((-1) ** k, factorial(k))
    return total


# ------------------------------------------------------------------ Quot classes
@dataclass(frozen=True)
class QuotClasses:
    """``Q_n`` as the polynomial part of ``e^(n,1) (x) Q_n`` for ``0 <= n <= N``."""

    kind: str
    e: int
    classes: Mapping[int, Poly]

    @property
    def N(self) -> int:
        return max(self.classes)

    def state(self, n: int) -> VAState:
        return VAState.from_poly((n, 1), self.classes[n])

    def differing_orders(self, other: "QuotClasses") -> List[int]:
        out = []
        for n in sorted(set(self.classes) | set(other.classes)):
            if n in self.classes and n in other.classes:
                if not VAState.from_poly((n, 1), poly_add(self.classes[n], poly_scale(other.classes[n], -1))).is_zero():
                    out.append(n)
        return out

    def __eq__(self, other):
        if not isinstance(other, QuotClasses):
            return NotImplemented
        return not self.differing_orders(other)

    def map_coeffs(self, fn: Callable) -> "QuotClasses":
        return QuotClasses(self.kind, self.e, {n: {m: fn(c) for m, c in P.items() if fn(c)}
                                               for n, P in self.classes.items()})


def quot_classes(geom: GeometrySpec, points: PointClasses, N: int, method: str = "multiset") -> QuotClasses:
    """``Q_n`` from iterated brackets of point classes with ``e^(0,1) (x) 1``.

    ``method="ordered"`` sums over all ordered tuples with weight ``1/k!``;
    ``method="multiset"`` sums over partitions with weight ``1/prod m_j!``,
    which is equal because the operators ``[M_a, -]`` commute exactly.
    """
    if points.N < N:
        raise DomainError(f"point classes known up to n={points.N}, need {N}")
    lat = pair_lattice(geom)
    seed = VAState.exponential(FRAMING_STATE_LABEL)
    M = {n: points.state(n) for n in range(1, N + 1)}
    cache: Dict[Tuple[int, ...], VAState] = {(): seed}

    def nest(parts: Tuple[int, ...]) -> VAState:
        """``[M_parts[0], [M_parts[1], ... [M_parts[-1], seed]]]``."""
        got = cache.get(parts)
        if got is None:
            got = lie_bracket(M[parts[0]], nest(parts[1:]), lat)
            cache[parts] = got
        return got

    out: Dict[int, Poly] = {0: {ONE: mpq(1)}}
    for n in range(1, N + 1):
        acc = VAState()
        if method == "ordered":
            for comp in compositions(n):
                acc = acc + nest(comp).scale(mpq(1, factorial(len(comp))))
        elif method == "multiset":
            for part in partitions(n):
                weight = 1
                for size in set(part):
                    weight *= factorial(part.count(size))
                acc = acc + nest(part).scale(mpq(1, weight))
        else:
            raise ValueError(f"unknown method {method!r}")
        labels = acc.labels()
        if labels and labels != [(n, 1)]:
            raise InternalError(f"Quot class at n={n} landed in labels {labels}")
        out[n] = acc.poly((n, 1))
    return QuotClasses(geom.kind, geom.e, out)


# ------------------------------------------------------------------ closed form
@dataclass(frozen=True)
class ClosedFormSigns:
    """Signs in front of the three building blocks of the surface closed form."""

    H: int = 1
    L: int = -1
    pair: int = -1


# The L-term enters with a minus sign: this is what the bracket recursion produces
# and what integrates to the Lagrange-inversion closed form.
VERIFIED_SIGNS = ClosedFormSigns(1, -1, -1)


def _series_exp(A: Dict[int, Poly], N: int) -> Dict[int, Poly]:
    """``exp(sum_{n>0} A_n q^n)`` for polynomial coefficients, via ``n E_n = sum k A_k E_{n-k}``."""
    E: Dict[int, Poly] = {0: {ONE: mpq(1)}}
    for n in range(1, N + 1):
        acc: Poly = {}
        for k in range(1, n + 1):
            if A.get(k) and E[n - k]:
                for m, c in poly_mul(A[k], E[n - k]).items():
                    _add_term(acc, m, c * k)
        E[n] = poly_scale(acc, mpq(1, n))
    return E


def closed_form_quot(geom: GeometrySpec, N: int, signs: ClosedFormSigns = VERIFIED_SIGNS) -> QuotClasses:
    """Exponential closed form of ``sum_n Q_n q^n`` in the variables ``u_(v,k)`` and ``y_k = u_(p,k)``."""
    _require_basis(geom)
    e = geom.e
    syms = basis_symbols(geom)
    lat = pair_lattice(geom)
    top = N * e + N * e + 1
    P = {n: _creation_series(lat, (n, 0), top) for n in range(1, N + 1)}

    def L(n):
        return P[n][n * e]

    def H(n, weights):
        acc: Poly = {}
        for s, c in zip(syms, weights):
            if not c:
                continue
            for k in range(1, n * e + 1):
                for m, x in P[n][n * e - k].items():
                    _add_term(acc, mono_mul(m, var(s, k)), x * c)
        return acc

    def Qb(n, j):
        idx = n * e + j
        if idx < 0:
            return {}
        return poly_scale(P[n][idx], mpq(1, n))

    A: Dict[int, Poly] = {}
    c3 = [to_mpq(x) for x in geom.canonical]
    if geom.kind == SURFACE:
        c1sq = to_mpq(geom.c1sq)
        kappa = to_mpq(geom.c1E_dot)
        for n in range(1, N + 1):
            term = poly_scale(H(n, [x / n for x in c3]), signs.H)
            coef = signs.L * (e * c1sq / (2 * n) - kappa / n)
            A[n] = poly_add(term, poly_scale(L(n), coef))
        if c1sq:
            for n1 in range(1, N):
                for n2 in range(1, N - n1 + 1):
                    acc: Poly = {}
                    for j in range(1, n1 * e + 1):
                        for m, x in poly_mul(Qb(n1, -j), Qb(n2, j)).items():
                            _add_term(acc, m, x * j)
                    A[n1 + n2] = poly_add(A.get(n1 + n2, {}), poly_scale(acc, signs.pair * c1sq))
    else:
        kappa = to_mpq(geom.c1E_dot)
        for n in range(1, N + 1):
            w = mpq(sigma2(n), n)
            term = poly_add(H(n, [x * w for x in c3]), poly_scale(L(n), kappa * w))
            A[n] = poly_scale(term, (-1) ** (n * e))
    E = _series_exp(A, N)
    return QuotClasses(geom.kind, e, {n: E[n] for n in range(N + 1)})


# ------------------------------------------------------------------ integration
@dataclass(frozen=True)
class Insertion:
    """A genus ``f`` evaluated on ``alpha^[n]`` for ``alpha`` of rank ``a`` with ``c_1(alpha)`` given in the basis."""

    f: GenusSpec
    a: int
    c1alpha: Tuple


@dataclass
class DiffOperator:
    """``sum_x lin[x] d/dx + sum_{x<=y} quad[x,y] d/dx d/dy`` acting on polynomials in ``u_(s,k)``."""

    lin: Dict[Tuple[str, int], object] = field(default_factory=dict)
    quad: Dict[Tuple[Tuple[str, int], Tuple[str, int]], object] = field(default_factory=dict)

    def add_lin(self, v, c):
        if c:
            new = self.lin.get(v, 0) + c
            if new:
                self.lin[v] = new
            else:
                self.lin.pop(v, None)

    def add_quad(self, v, w, c):
        if not c:
            return
        key = (v, w) if v <= w else (w, v)
        new = self.quad.get(key, 0) + c
        if new:
            self.quad[key] = new
        else:
            self.quad.pop(key, None)

    def apply(self, P: Poly) -> Poly:
        out: Poly = {}
        for v, c in self.lin.items():
            for m, x in poly_deriv(P, v).items():
                _add_term(out, m, x * c)
        for (v, w), c in self.quad.items():
            for m, x in poly_deriv(poly_deriv(P, v), w).items():
                _add_term(out, m, x * c)
        return out

    def exp_at_zero(self, P: Poly):
        """``(exp(D) P)(u = 0)`` by the terminating sum ``sum_m D^m P / m!``."""
        total = P.get(ONE, 0)
        cur = P
        m = 0
        while cur:
            m += 1
            cur = poly_scale(self.apply(cur), mpq(1, m))
            total = total + cur.get(ONE, 0)
        return total


def _mu(k: int) -> mpq:
    """Normalisation ``mu_(s,k) = 1/(k-1)! d/du_(s,k)``."""
    return mpq(1, factorial(k - 1))


@dataclass(frozen=True)
class IntegrationSigns:
    """Sign of the quadratic ``ch_k(T^vir)`` term on surfaces and of the point term on fourfolds."""

    pair: int = 1
    cy4_point: int = 1


DERIVED_SIGNS = IntegrationSigns(1, 1)


def integration_operator(geom: GeometrySpec, insertions: Sequence[Insertion], g: Optional[GenusSpec], kmax: int,
                         gg: Optional[GenusSpec] = None, signs: IntegrationSigns = DERIVED_SIGNS) -> DiffOperator:
    """Operator ``sum_k f_k ch_k(alpha^[n]) + g_k ch_k(T^vir)`` written through ``mu_(s,k)``."""
    _require_basis(geom)
    syms = basis_symbols(geom)
    e = geom.e
    D = DiffOperator()
    for ins in insertions:
        fk = ins.f.log_coeffs(kmax)
        for k in range(1, kmax + 1):
            if not fk[k]:
                continue
            for i, s in enumerate(syms):
                w = to_mpq(geom.pair_basis(ins.c1alpha, i))
                if geom.kind == SURFACE:
                    w += mpq(ins.a, 2) * to_mpq(geom.pair_basis(geom.canonical, i))
                D.add_lin((s, k), fk[k] * w * _mu(k))
            D.add_lin((POINT, k), fk[k] * ins.a * _mu(k))
    if geom.kind == SURFACE:
        if g is None:
            return D
        gk = g.log_coeffs(kmax)
        for k in range(1, kmax + 1):
            if not gk[k]:
                continue
            for i, s in enumerate(syms):
                w = mpq(e, 2) * to_mpq(geom.pair_basis(geom.canonical, i)) - to_mpq(geom.pair_basis(geom.c1E, i))
                D.add_lin((s, k), gk[k] * w * _mu(k))
            D.add_lin((POINT, k), gk[k] * e * _mu(k))
            for i_ in range(1, k):
                j_ = k - i_
                for a_, s in enumerate(syms):
                    for b_, t in enumerate(syms):
                        gram = geom.gram[a_][b_]
                        if gram:
                            D.add_quad((s, i_), (t, j_),
                                       gk[k] * signs.pair * (-1) ** i_ * gram * _mu(i_) * _mu(j_))
    else:
        if gg is None:
            if g is None:
                return D
            gg = g.times(g.mirrored(), name="gg")
        hk = gg.log_coeffs(kmax)
        for k in range(1, kmax + 1):
            if not hk[k]:
                continue
            for i, s in enumerate(syms):
                D.add_lin((s, k), -hk[k] * to_mpq(geom.pair_basis(geom.c1E, i)) * _mu(k))
            D.add_lin((POINT, k), signs.cy4_point * hk[k] * e * _mu(k))
    return D


def _ring_of(values) -> object:
    for v in values:
        ring = getattr(v, "ring", None)
        if ring is not None:
            return ring
    return QQ


def integrate_genus(classes: QuotClasses, geom: GeometrySpec, insertions: Sequence[Insertion],
                    g: Optional[GenusSpec] = None, gg: Optional[GenusSpec] = None,
                    signs: IntegrationSigns = DERIVED_SIGNS, N: Optional[int] = None) -> TruncSeries:
    """``sum_n q^n int_{Q_n} prod f_i(alpha_i^[n]) g(T^vir)`` modulo ``q^(N+1)``.

    Genera are normalised by their constant terms; the constants are restored
    by ``q -> prod f_i(0)^(a_i) g(0)^e q`` (``gg(0)^e`` on fourfolds).
    """
    N = classes.N if N is None else N
    kmax = max(1, N * geom.e)
    D = integration_operator(geom, insertions, g, kmax, gg=gg, signs=signs)
    values = {n: D.exp_at_zero(classes.classes[n]) for n in range(N + 1)}
    ring = _ring_of(values.values())
    coeffs = {n: (ring(v) if ring is not QQ else to_mpq(v)) for n, v in values.items()}
    series = TruncSeries(ring, coeffs, order=N + 1, var="q")
    scale = 1
    for ins in insertions:
        scale = scale * _power(ins.f.constant(), ins.a)
    tv = gg if (geom.kind == CY4 and gg is not None) else (g.times(g.mirrored()) if geom.kind == CY4 and g is not None else g)
    if tv is not None:
        scale = scale * _power(tv.constant(), geom.e)
    return series if scale == 1 else series.dilate(scale)


def _power(x, k: int):
    x = to_mpq(x) if is_scalar(x) else x
    return x ** k if k >= 0 else (1 / x) ** (-k)


# ------------------------------------------------------------------ exponential fast path
def apply_exp_operator(P: Poly, lin: Mapping, quad: Mapping):
    """Literal ``exp(sum c_ij d_i d_j + sum c_i d_i) P`` evaluated at the origin."""
    D = DiffOperator()
    for v, c in lin.items():
        D.add_lin(v, to_mpq(c))
    for (v, w), c in quad.items():
        D.add_quad(v, w, to_mpq(c))
    return D.exp_at_zero(P)


def exponential_state_poly(a: Mapping, t_power: int) -> Poly:
    """``[t^m] exp(t sum a_i x_i)`` as a polynomial in the ``x_i``."""
    lin = {v: to_mpq(c) for v, c in a.items() if c}
    cur: Poly = {ONE: mpq(1)}
    for m in range(1, t_power + 1):
        nxt: Poly = {}
        for v, c in lin.items():
            for mm, x in cur.items():
                _add_term(nxt, mono_mul(mm, ((v, 1),)), x * c)
        cur = poly_scale(nxt, mpq(1, m))
    return cur


def secder_exponential(a: Mapping, lin: Mapping, quad: Mapping, order: int) -> TruncSeries:
    """Fast path: ``exp(t^2 sum c_ij a_i a_j + t sum c_i a_i)`` modulo ``t^order``.

    ``quad`` maps ordered pairs ``(i, j)`` to ``c_ij``; a key with ``i == j``
    contributes ``c_ii d_i^2``.
    """
    s1 = sum((to_mpq(c) * to_mpq(a.get(v, 0)) for v, c in lin.items()), mpq(0))
    s2 = sum((to_mpq(c) * to_mpq(a.get(v, 0)) * to_mpq(a.get(w, 0)) for (v, w), c in quad.items()), mpq(0))
    expo = TruncSeries(QQ, {1: s1, 2: s2}, order=order, var="t")
    return expo.exp()


def secder_literal(a: Mapping, lin: Mapping, quad: Mapping, order: int) -> TruncSeries:
    """Same quantity by literal differentiation of each ``t``-graded piece of ``exp(t sum a_i x_i)``."""
    coeffs = {}
    for m in range(order):
        P = exponential_state_poly(a, m)
        # exp(D) lowers the x-degree; pieces of degree m contribute at t^m only
        coeffs[m] = to_mpq(apply_exp_operator(P, lin, quad))
    return TruncSeries(QQ, coeffs, order=order, var="t")
