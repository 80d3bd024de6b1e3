"""Closed-form generating series of Quot-scheme invariants and their symmetry checks.

Conventions
-----------
All series are built from normalised genera ``f/f(0)`` and ``g/g(0)``.  The
constants are restored by rescaling ``q -> f(0)^a g(0)^e q`` (resp. ``h(0)^e``
with ``h(z) = g(z) g(-z)`` on fourfolds), which is how the rank of
``alpha^[n]`` and of the virtual tangent bundle enter the integrals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from gmpy2 import mpq

from .errors import DomainError, NoCertificate
from .genus import (GenusSpec, chern_genus, chi_y_genus, determinant_genus, lift_genus, nekrasov_f, nekrasov_gg,
                    segre_genus, todd_genus, trivial_genus, wedge_genus)
from .geometry import CY4, SURFACE, GeometrySpec
from .lagrange import (branch_discriminant_factor, branch_product, macmahon, prod_H_over_q_log,
                       u_transform)
from .rings import QQ, PolyRing, SympyFractionField, is_scalar, to_mpq
from .series import INF, TruncSeries


def raise_to(s: TruncSeries, gamma) -> TruncSeries:
    """``s^gamma`` for a rational or formal exponent; lifts QQ series into the exponent's ring."""
    if is_scalar(gamma):
        return s.pow_formal(to_mpq(gamma))
    ring = getattr(gamma, "ring", None)
    if ring is not None and s.ring is QQ:
        s = s.map_coeffs(ring, ring=ring)
    return s.pow_formal(gamma)


def _common_ring(*genera: GenusSpec):
    rings = [g.ring for g in genera if g is not None]
    for r in rings:
        if r is not QQ:
            return r
    return QQ


def _lift(g: GenusSpec, ring) -> GenusSpec:
    return g if g.ring is ring else lift_genus(g, ring)


def _ring_power(ring, x, k: int):
    if k >= 0:
        return ring(x) ** k
    return ring.inverse(ring(x)) ** (-k)


def _rescale(s: TruncSeries, factor) -> TruncSeries:
    if factor == 1:
        return s
    return s.dilate(factor)


def _normalized_pieces(fs: Sequence[GenusSpec], ranks: Sequence[int], g: GenusSpec, e: int, order: int):
    """Normalised genera, ``Q = prod f_i^a_i g^e`` and the q-rescaling constant."""
    ring = _common_ring(g, *fs)
    g = _lift(g, ring)
    fs = [_lift(f, ring) for f in fs]
    gh = g.normalized(order)
    fhs = [f.normalized(order) for f in fs]
    Q = gh ** e
    scale = _ring_power(ring, g.constant(), e)
    for fh, f, a in zip(fhs, fs, ranks):
        if a:
            Q = Q * (fh ** a)
            scale = scale * _ring_power(ring, f.constant(), a)
    return ring, fhs, gh, Q.truncate(order), scale


def multi_insertion_z(fs: Sequence[GenusSpec], alphas: Sequence[dict], g: GenusSpec, geom: GeometrySpec,
                      N: int) -> TruncSeries:
    """Surface series with several insertions ``prod_i f_i(alpha_i^[n])``.

    ``alphas[i]`` holds ``{"a": rank, "c1alpha_dot": c_1(alpha_i).c_1}``.
    """
    if geom.kind != SURFACE:
        raise DomainError("multi_insertion_z is the surface formula")
    e = geom.e
    order = (N - 1) * e + 2
    ranks = [int(al.get("a", 0)) for al in alphas]
    ring, fhs, gh, Q, scale = _normalized_pieces(fs, ranks, g, e, order)
    mu = geom.mu
    c1sq = geom.c1sq
    total = TruncSeries(ring, [ring.one], order=N, var="q")
    for fh, al, a in zip(fhs, alphas, ranks):
        expo = al.get("c1alpha_dot", 0) + mu * a + c1sq * a
        if _is_zero(expo):
            continue
        P = branch_product(Q, fh, e, N)
        total = total * raise_to(P, expo)
    if not _is_zero(c1sq):
        W = branch_discriminant_factor(Q, gh, e, N)
        total = total * raise_to(W, c1sq)
    return _rescale(total.truncate(N), scale)


def _is_zero(x) -> bool:
    return not x


def z_series_surface(f: GenusSpec, g: GenusSpec, geom: GeometrySpec, N: int) -> TruncSeries:
    """``sum_n q^n int f(alpha^[n]) g(T^vir)`` over ``[Quot_S(E, n)]^vir`` modulo ``q^N``."""
    return multi_insertion_z([f], [{"a": geom.a, "c1alpha_dot": geom.c1alpha_dot}], g, geom, N)


def z_series_cy4(f: GenusSpec, g: Optional[GenusSpec], geom: GeometrySpec, N: int,
                 gg: Optional[GenusSpec] = None, route: str = "split") -> TruncSeries:
    """Fourfold series ``U_e( prod f(H_i)^(c_1(alpha).c_3) ... )`` modulo ``q^N``.

    Either ``g`` or the even product ``gg(z) = g(z) g(-z)`` must be supplied.
    ``route="split"`` keeps the ``gg`` and ``prod H_i / q`` factors separate;
    ``route="slope"`` collapses them into ``prod f(H_i)^(a mu)``.
    """
    if gg is None:
        if g is None:
            raise DomainError("z_series_cy4 needs g or gg")
        gg = g.times(g.mirrored(), name="gg")
    e, a = geom.e, geom.a
    order = (N - 1) * e + 2
    ring, (fh,), hh, Q, scale = _normalized_pieces([f], [a], gg, e, order)
    kappa = geom.c1E_dot
    if route == "split":
        total = raise_to(branch_product(Q, fh, e, N), geom.c1alpha_dot)
        if not _is_zero(kappa):
            total = total * raise_to(branch_product(Q, hh, e, N), -kappa)
            total = total * raise_to(prod_H_over_q_log(Q, e, N).exp(), kappa)
    elif route == "slope":
        total = raise_to(branch_product(Q, fh, e, N), geom.c1alpha_dot + geom.mu * a)
    else:
        raise ValueError(f"unknown route {route!r}")
    return u_transform(_rescale(total.truncate(N), scale), e)


def z_series(f: GenusSpec, g: GenusSpec, geom: GeometrySpec, N: int, gg: Optional[GenusSpec] = None):
    if geom.kind == SURFACE:
        return z_series_surface(f, g, geom, N)
    return z_series_cy4(f, g, geom, N, gg=gg)


def segre(geom: GeometrySpec, N: int) -> TruncSeries:
    """Top Segre classes of ``alpha^[n]``: ``f = 1/(1+z)``, ``g = 1``."""
    order = (N - 1) * geom.e + 2
    f = segre_genus(order)
    if geom.kind == SURFACE:
        return z_series_surface(f, trivial_genus(), geom, N)
    return z_series_cy4(f, None, geom, N, gg=trivial_genus())


def verlinde(geom: GeometrySpec, N: int) -> TruncSeries:
    """Virtual Euler characteristics of ``det(alpha^[n])`` via ``f = e^z``, ``g = Todd``.

    On a fourfold the Todd genus is used for the even product ``g(z)g(-z)``,
    which is the genus-level form of the surface-to-fourfold bridge.
    """
    order = (N - 1) * geom.e + 2
    f = determinant_genus(order)
    td = todd_genus(order)
    if geom.kind == SURFACE:
        return z_series_surface(f, td, geom, N)
    return z_series_cy4(f, None, geom, N, gg=td)


def curve_verlinde(geom: GeometrySpec, N: int) -> TruncSeries:
    """Twisted Verlinde series of the curve Quot schemes.

    The curve-side Euler characteristics ``chi(Q_C, det (x) D_n)`` coincide with
    the virtual surface ones, so this is the surface Verlinde series under
    another name; no independent localization on the curve is performed.
    """
    if geom.kind != SURFACE:
        raise DomainError("the curve series is identified with the surface route")
    return verlinde(geom, N)


def flip_q(s: TruncSeries, e: int) -> TruncSeries:
    """``F(q) -> F((-1)^e q)``."""
    if e % 2 == 0:
        return s
    return s.dilate(-1)


def exchange_geometry(geom: GeometrySpec, f_rank: int, c1F_dot) -> GeometrySpec:
    """Swap the roles of ``E`` and ``alpha = F`` (ranks and first Chern classes)."""
    return geom.with_(e=f_rank, a=geom.e, c1E_dot=c1F_dot, c1alpha_dot=geom.c1E_dot,
                      gram=None, canonical=None, c1E=None, c1alpha=None, c1L=None)


# ---------------------------------------------------------------- Nekrasov
@dataclass
class NekrasovResult:
    general: TruncSeries
    closed_form: Optional[TruncSeries]
    gamma: object
    ring: object

    @property
    def agree(self) -> Optional[bool]:
        if self.closed_form is None:
            return None
        return self.general == self.closed_form


def nekrasov_ring() -> SympyFractionField:
    return SympyFractionField(["w"])


def macmahon_pair(e: int, gamma, N: int, ring) -> TruncSeries:
    """``(M(w^e q) M(w^-e q))^gamma`` over ``QQ(w)``."""
    M = macmahon(N)
    Ml = M.map_coeffs(ring, ring=ring)
    w = ring.gen("w")
    prod = Ml.dilate(w ** e) * Ml.dilate(ring.inverse(w) ** e)
    return prod.pow_formal(gamma)


def nekrasov(geom: GeometrySpec, N: int, ring=None) -> NekrasovResult:
    """Nekrasov genus series over ``QQ(w)``, ``w^2 = y``."""
    if geom.kind != CY4:
        raise DomainError("the Nekrasov genus is defined on fourfolds")
    a, e = geom.a, geom.e
    if not (a % 2 == 1 or a == e):
        raise DomainError("Nekrasov formula requires odd rank(alpha) or rank(alpha) == rank(E)")
    ring = ring or nekrasov_ring()
    order = (N - 1) * e + 2
    w = ring.gen("w")
    f = nekrasov_f(order, w, ring)
    gg = lift_genus(nekrasov_gg(order), ring)
    general = z_series_cy4(f, None, geom, N, gg=gg)
    gamma = (to_mpq(geom.c1alpha_dot) + geom.mu) / 2
    closed = macmahon_pair(e, gamma, N, ring) if a == e else None
    return NekrasovResult(general, closed, gamma, ring)


def cohomological_limit(series: TruncSeries, a: int, e: int, ring) -> TruncSeries:
    """Multiply ``[q^n]`` by ``(1 - y^-1)^((e-a) n)`` and set ``y = 1`` exactly."""
    w = ring.gen("w")
    pref = ring.one - ring.inverse(w * w)
    out = {}
    for n in range(series.order):
        c = series.coeff(n)
        k = (e - a) * n
        if k:
            c = c * (pref ** k if k > 0 else ring.inverse(pref) ** (-k))
        out[n] = ring.subs(c, w=1)
    return TruncSeries(QQ, out, order=series.order, var=series.var)


def chern_series_cy4(geom: GeometrySpec, N: int) -> TruncSeries:
    """``sum_n q^n int c(alpha^[n])`` on a fourfold with ``g g(-z) = 1``."""
    return z_series_cy4(chern_genus(), None, geom, N, gg=trivial_genus())


# ---------------------------------------------------------------- pole certificates
@dataclass
class PoleCertificate:
    """``series * denominator`` agrees with a polynomial of degree ``<= numerator_bound`` below ``order``.

    This is evidence at the truncation order, not a proof of rationality: the
    coefficients in degrees ``numerator_bound + 1 .. order - 1`` of the product
    were all found to vanish.
    """

    factors: List[tuple]               # (label, exponent) pairs describing the denominator
    denominator: TruncSeries
    numerator: TruncSeries
    numerator_bound: int
    order: int

    @property
    def checked_coefficients(self) -> int:
        return self.order - 1 - self.numerator_bound


@dataclass
class InvariantReport:
    series: TruncSeries
    metadata: Dict[str, object] = field(default_factory=dict)
    certificate: Optional[PoleCertificate] = None
    failure: Optional[str] = None

    @property
    def verdict(self) -> str:
        return "pass" if self.certificate is not None else "no-certificate"


def _poly_series(ring, coeffs, var="q") -> TruncSeries:
    return TruncSeries(ring, [ring(c) for c in coeffs], order=INF, var=var)


def denominator_series(ring, factors: Sequence[tuple]) -> TruncSeries:
    """Product of ``(1 - c q)^m`` for ``(c, m)`` pairs, as an exact polynomial."""
    D = TruncSeries(ring, [ring.one], order=INF, var="q")
    for c, m in factors:
        base = _poly_series(ring, [ring.one, -ring(c)])
        for _ in range(m):
            D = D * base
    return D


def pole_certificate(series: TruncSeries, ring, factors: Sequence[tuple], labels: Sequence[str],
                     margin: int = 4) -> PoleCertificate:
    """Certificate that ``series`` times ``prod (1 - c q)^m`` is a polynomial below the truncation order.

    The numerator degree is allowed up to ``order - 1 - margin``; the last
    ``margin`` coefficients of the product must vanish.  Raises
    :class:`NoCertificate` when they do not.
    """
    N = series.order
    bound = N - 1 - margin
    if bound < 0:
        raise NoCertificate(f"order {N} leaves no room for a margin of {margin}")
    D = denominator_series(ring, factors)
    prod = (series * D.truncate(N)).truncate(N)
    for n in range(bound + 1, N):
        if not ring.is_zero(prod.coeff(n)):
            raise NoCertificate(f"coefficient of q^{n} in series*denominator is nonzero")
    numerator = TruncSeries(ring, {n: prod.coeff(n) for n in range(bound + 1)}, order=INF, var="q")
    return PoleCertificate([(lab, m) for lab, (_, m) in zip(labels, factors)], D, numerator, bound, N)


# ---------------------------------------------------------------- descendants
def _alpha_data(alpha) -> dict:
    if isinstance(alpha, dict):
        return {"a": int(alpha.get("a", 0)), "c1alpha_dot": alpha.get("c1alpha_dot", 0)}
    a, dot = alpha
    return {"a": int(a), "c1alpha_dot": dot}


def _check_k_list(k_list, alpha_list):
    if len(k_list) != len(alpha_list):
        raise DomainError("k_list and alpha_list must have the same length")
    if any(int(k) < 0 for k in k_list):
        raise DomainError("descendant orders must be non-negative")


def _extract(series: TruncSeries, ring, exps: Dict[int, int], target) -> TruncSeries:
    """Coefficient of the monomial ``prod gen_i^exps[i]`` (other generators kept) in each coefficient."""
    out = {}
    for n in range(series.order):
        c = series.coeff(n)
        acc = {}
        for m, val in ring(c).terms.items():
            if all(m[i] == k for i, k in exps.items()):
                key = tuple(m[i] for i in range(len(m)) if i not in exps)
                acc[key] = acc.get(key, 0) + val
        out[n] = target(acc)
    return TruncSeries(target.ring, out, order=series.order, var=series.var)


class _Collect:
    """Rebuilds extracted coefficient dictionaries as elements of a smaller ring."""

    def __init__(self, ring, convert=None):
        self.ring = ring
        self.convert = convert

    def __call__(self, terms):
        if self.convert is not None:
            return self.convert(terms)
        if self.ring is QQ:
            return sum(terms.values(), mpq(0))
        return sum((self.ring.monomial(m, c) for m, c in terms.items()), self.ring.zero)


def _v_to_y(terms: Dict[tuple, object], yring) -> object:
    """Rewrite ``sum c v^m`` (``v = 1 - y``) as a polynomial in ``y``."""
    one_minus_y = yring.one - yring.gen("y")
    acc = yring.zero
    for (m,), c in terms.items():
        if m < 0:
            raise DomainError("coefficient is not polynomial in y")
        acc = acc + one_minus_y ** m * c
    return acc


def chi_y_descendants(k_list: Sequence[int], alpha_list: Sequence, geom: GeometrySpec, N: Optional[int] = None,
                      margin: int = 1) -> InvariantReport:
    """K-theoretic descendants ``chi^vir(wedge^k_1 alpha_1^[n] ... Lambda_{-y} Omega^vir)`` on a surface.

    Uses ``f_i = 1 + x_i e^z`` and ``g = z (1 - y e^-z)/(1 - e^-z)`` and takes the
    coefficient of ``prod x_i^k_i``.  Coefficients are polynomials in ``y``.
    The attached certificate tests the denominator
    ``(1-q)^(2 sum k) (1-(1+y)^e q)^(e + sum k)`` at order ``N``
    (default ``2 sum k + e + 8``).  Numerators observed in practice have degree
    ``3 sum k + 2e``, so at the default order only the last few coefficients
    carry evidence; ``margin`` sets how many must vanish.
    """
    if geom.kind != SURFACE:
        raise DomainError("descendant series are defined on surfaces")
    _check_k_list(k_list, alpha_list)
    ks = [int(k) for k in k_list]
    total_k, e = sum(ks), geom.e
    N = N if N is not None else 2 * total_k + e + 8
    names = [f"x{i}" for i in range(len(ks))]
    # v = 1 - y is a unit in the Laurent ring, so g(0) = 1 - y can be inverted exactly
    ring = PolyRing(["v"] + names, caps=dict(zip(names, ks)))
    v = ring.gen("v")
    order = (N - 1) * e + 2
    g = chi_y_genus(order, ring.one - v, ring)
    fs = [wedge_genus(order, ring.gen(n), ring) for n in names]
    Z = multi_insertion_z(fs, [_alpha_data(al) for al in alpha_list], g, geom, N)
    yring = PolyRing(["y"])
    exps = {i + 1: k for i, k in enumerate(ks)}
    series = _extract(Z, ring, exps, _Collect(yring, lambda t: _v_to_y(t, yring)))
    y = yring.gen("y")
    factors = [(yring.one, 2 * total_k), ((yring.one + y) ** e, e + total_k)]
    labels = ["1-q", f"1-(1+y)^{e} q"]
    meta = {"invariant": "chi_y_descendants", "k": ks, "e": e, "order": N}
    try:
        cert = pole_certificate(series, yring, factors, labels, margin)
        return InvariantReport(series, meta, cert)
    except NoCertificate as exc:
        return InvariantReport(series, meta, None, str(exc))


def chern_descendant_series(k_list: Sequence[int], alpha_list: Sequence, geom: GeometrySpec, N: int,
                            g: Optional[GenusSpec] = None) -> TruncSeries:
    """``sum_n q^n int c_k1(alpha_1^[n]) ... c_kl(alpha_l^[n]) g(T^vir)`` on a surface.

    Insertions are ``f_i = 1 + t_i z`` over a ring where ``t_i^(k_i+1) = 0``;
    the coefficient of ``prod t_i^k_i`` is returned.  ``g`` defaults to the
    total Chern class ``1 + z``.  Formal scalars in ``geom`` are supported when
    they live in a :class:`PolyRing`; their generators are kept.
    """
    if geom.kind != SURFACE:
        raise DomainError("descendant series are defined on surfaces")
    _check_k_list(k_list, alpha_list)
    ks = [int(k) for k in k_list]
    names = [f"t{i}" for i in range(len(ks))]
    extra = _formal_gens(geom, g)
    ring = PolyRing(list(extra.gens if extra else ()) + names, caps=dict(zip(names, ks), **(_caps(extra))))
    offset = len(extra.gens) if extra else 0
    fs = [chern_genus(ring, ring.gen(n)) for n in names]
    g = chern_genus(ring) if g is None else _relift(g, ring)
    geom = _relift_geometry(geom, ring)
    Z = multi_insertion_z(fs, [_alpha_data(al) for al in alpha_list], g, geom, N)
    exps = {offset + i: k for i, k in enumerate(ks)}
    target = _Collect(extra if extra else QQ)
    out = _extract(Z, ring, exps, target)
    if extra is None:
        return TruncSeries(QQ, {n: out.coeff(n) for n in range(N)}, order=N, var="q")
    return out


def _formal_gens(geom: GeometrySpec, g: Optional[GenusSpec]):
    for x in (geom.c1sq, geom.c1E_dot, geom.c1alpha_dot):
        if isinstance(getattr(x, "ring", None), PolyRing):
            return x.ring
    if g is not None and isinstance(g.ring, PolyRing):
        return g.ring
    return None


def _caps(ring) -> Dict[str, int]:
    if ring is None:
        return {}
    return {n: c for n, c in zip(ring.gens, ring.caps) if c is not None}


def _embed(x, ring):
    """Re-express an element of a smaller PolyRing in ``ring`` (whose leading generators match)."""
    if is_scalar(x):
        return ring(to_mpq(x))
    pad = (0,) * (ring.nvars - x.ring.nvars)
    return sum((ring.monomial(m + pad, c) for m, c in x.terms.items()), ring.zero)


def _relift(g: GenusSpec, ring) -> GenusSpec:
    if g.ring is QQ:
        return lift_genus(g, ring)
    return GenusSpec(g.series.map_coeffs(lambda c: _embed(c, ring), ring=ring), g.name)


def _relift_geometry(geom: GeometrySpec, ring) -> GeometrySpec:
    changes = {}
    for name in ("c1sq", "c1E_dot", "c1alpha_dot"):
        x = getattr(geom, name)
        if not is_scalar(x):
            changes[name] = _embed(x, ring)
    return geom.with_(**changes) if changes else geom


def _exponent_vectors(n: int, total: int):
    if n == 0:
        if total == 0:
            yield ()
        return
    for k in range(total, -1, -1):
        for rest in _exponent_vectors(n - 1, total - k):
            yield (k,) + rest


def cohomological_descendants(k_list: Sequence[int], alpha_list: Sequence, geom: GeometrySpec, N: int = 14,
                              max_pole: int = 8, margin: int = 4, bases: Optional[Sequence[int]] = None
                              ) -> InvariantReport:
    """Chern-class descendants against ``c(T^vir)`` with a searched rationality certificate.

    No explicit denominator is available here, so products ``prod (1 - b q)^m_b``
    over small integers ``b`` (default ``+-1, +-2, +-2^e``) are tried in order
    of total degree up to ``max_pole``.
    """
    series = chern_descendant_series(k_list, alpha_list, geom, N)
    meta = {"invariant": "cohomological_descendants", "k": [int(k) for k in k_list], "e": geom.e, "order": N}
    if bases is None:
        bases = []
        for b in (1, -1, 2, -2, 2 ** geom.e, -(2 ** geom.e)):
            if b not in bases:
                bases.append(b)
    labels = [f"1-({b})q" for b in bases]
    for total in range(max_pole + 1):
        for exps in _exponent_vectors(len(bases), total):
            factors = [(mpq(b), m) for b, m in zip(bases, exps)]
            try:
                cert = pole_certificate(series, QQ, factors, labels, margin)
            except NoCertificate:
                continue
            cert.factors = [f for f in cert.factors if f[1]]
            return InvariantReport(series, meta, cert)
    return InvariantReport(series, meta, None, f"no denominator over bases {list(bases)} of degree <= {max_pole}")


def kappa_independence(geom: GeometrySpec, N: int, chern_params: int = 2) -> TruncSeries:
    """Series of ``int prod_j c_{t_j}(T^vir)`` with ``c_1(E).c_1`` replaced by a formal generator ``kappa``.

    Each ``c_{t_j}`` is the Chern genus ``1 + t_j z`` with ``t_j`` a free
    generator, so coefficients are polynomials in ``t_j`` and ``kappa``; the
    caller checks that ``kappa`` does not occur.
    """
    names = [f"t{j}" for j in range(chern_params)]
    ring = PolyRing(["kappa"] + names)
    g = trivial_genus(ring)
    for n in names:
        g = g.times(chern_genus(ring, ring.gen(n)))
    formal = geom.with_(c1E_dot=ring.gen("kappa"))
    return multi_insertion_z([], [], g, formal, N)


def kappa_free(series: TruncSeries) -> bool:
    """True when no coefficient involves the generator ``kappa``."""
    ring = series.ring
    i = ring.gens.index("kappa")
    return all(m[i] == 0 for _, c in series.items() for m in ring(c).terms)


def zezc_ratio_check(geom: GeometrySpec, N: int, route: str = "closed", f: Optional[GenusSpec] = None,
                     g: Optional[GenusSpec] = None):
    """Both sides of ``Z_E / Z_(E with c_1(E).c_1 = 0) = prod (f(H_i)/f(0))^(a c_1(E).c_1 / e)``.

    Genera default to Segre and Todd (both with constant term 1).  With
    ``route="vertex"`` the left side is integrated from the closed-form Quot
    classes of a basis geometry instead of the product formula.
    """
    if geom.kind != SURFACE:
        raise DomainError("the ratio formula is stated on surfaces")
    e, a = geom.e, geom.a
    order = (N - 1) * e + 2
    f = f or segre_genus(order)
    g = g or todd_genus(order)
    if route == "closed":
        base = geom.with_(c1E_dot=0, c1E=None)
        lhs = z_series_surface(f, g, geom, N) / z_series_surface(f, g, base, N)
    elif route == "vertex":
        from .wallcross import Insertion, closed_form_quot, integrate_genus

        if not geom.has_basis:
            raise DomainError("the vertex route needs basis-level geometry")
        base = GeometrySpec.from_basis(geom.kind, e, a, geom.gram, geom.canonical, None, geom.c1alpha, geom.c1L)
        sides = []
        for gm in (geom, base):
            classes = closed_form_quot(gm, N - 1)
            sides.append(integrate_genus(classes, gm, [Insertion(f, a, gm.c1alpha)], g=g))
        lhs = sides[0] / sides[1]
    else:
        raise ValueError(f"unknown route {route!r}")
    _, (fh,), _, Q, _ = _normalized_pieces([f], [a], g, e, order)
    rhs = raise_to(branch_product(Q, fh, e, N), to_mpq(geom.c1E_dot) * a / e)
    return lhs, rhs
