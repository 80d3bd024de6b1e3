"""Lagrange-inversion formulas for symmetric functions of the branches of ``H^e = q Q(H)``.

Everything here except :func:`g_rhs` works with the coefficients of ``Q`` only
and never adjoins roots of unity.  :func:`g_rhs` evaluates the product side of
the identity on genuine Newton-Puiseux branches.
"""

from __future__ import annotations

from typing import List, Optional

from gmpy2 import mpq

from .errors import DomainError, TruncationError
from .puiseux import PuiseuxBranch, puiseux_branches, symmetric_reduce
from .rings import QQ
from .series import INF, TruncSeries


def _check_normalized(Q: TruncSeries):
    if (Q.coeffs and Q.start < 0) or Q.coeff(0) != 1:
        raise DomainError("Q must satisfy Q(0) = 1")


def _zero(ring, N, var="q"):
    return TruncSeries(ring, {}, order=N, var=var)


class _PowerCache:
    """Truncated powers ``Q^n`` computed on demand."""

    def __init__(self, Q: TruncSeries, order: int):
        self.Q = Q.truncate(order) if Q.order == INF or Q.order > order else Q
        self.order = order
        self._pows = {0: TruncSeries(Q.ring, [Q.ring.one], order=INF, var=Q.var)}
        self._neg: Optional[TruncSeries] = None

    def __getitem__(self, n: int) -> TruncSeries:
        p = self._pows.get(n)
        if p is not None:
            return p
        if n > 0:
            p = (self[n - 1] * self.Q).truncate(self.order)
        else:
            if self._neg is None:
                self._neg = self.Q.inverse()
            p = (self[n + 1] * self._neg).truncate(self.order)
        self._pows[n] = p
        return p


def branch_sum(Q: TruncSeries, phi: TruncSeries, e: int, N: int) -> TruncSeries:
    """``sum_i phi(H_i(q))`` modulo ``q^N``.

    ``phi`` may be a Laurent series in the same variable as ``Q``; poles of
    ``phi`` produce negative powers of ``q``.
    """
    _check_normalized(Q)
    ring = Q.ring
    if phi.var != Q.var:
        phi = phi.rename(Q.var)
    dphi = phi.derivative()
    lo_phi = phi.start if phi.coeffs else 0
    out = {}
    out[0] = ring.zero
    phi0 = phi.coeff(0)
    if phi0:
        out[0] = phi0 * e
    if lo_phi < 0:
        logQ = Q.truncate(-lo_phi + 1).log() if Q.order == INF or Q.order > -lo_phi + 1 else Q.log()
        out[0] = out[0] + (dphi * logQ).coeff(-1)
    lo_d = dphi.start if dphi.coeffs else 0
    # t-precision needed for [t^(ne-1)] of dphi * Q^n
    need = (N - 1) * e - lo_d + 1
    pows = _PowerCache(Q, max(need, 1))
    # smallest n with n*e - 1 >= lowest exponent of phi'
    n_min = min(1, -((-(lo_d + 1)) // e))
    for n in range(n_min, N):
        if n == 0:
            continue
        target = n * e - 1
        term = _mul_coeff(dphi, pows[n], target)
        if term:
            out[n] = term * mpq(1, n)
    return TruncSeries(ring, out, order=N, var="q")


def _mul_coeff(a: TruncSeries, b: TruncSeries, k: int):
    """``[t^k](a*b)`` without forming the product."""
    ring = a.ring
    acc = ring.zero
    for i, c in a.items():
        j = k - i
        if b.coeffs and j < b.start:
            continue
        if j >= b.order:
            raise TruncationError(f"need [t^{j}] of a series known below t^{b.order}")
        d = b.coeff(j)
        if d:
            acc = acc + c * d
    return acc


def prod_H_over_q_log(Q: TruncSeries, e: int, N: int) -> TruncSeries:
    """``log(prod_i H_i / q) = sum_m (1/m) [t^(me)] Q^m q^m`` modulo ``q^N``."""
    _check_normalized(Q)
    pows = _PowerCache(Q, max((N - 1) * e + 1, 1))
    out = {}
    for m in range(1, N):
        c = pows[m].coeff(m * e)
        if c:
            out[m] = c * mpq(1, m)
    return TruncSeries(Q.ring, out, order=N, var="q")


def normalized_log(f: TruncSeries, order: int) -> TruncSeries:
    """``log(f / f(0))`` truncated at ``order``."""
    f = f.truncate(order) if f.order == INF or f.order > order else f
    c0 = f.coeff(0)
    if f.coeffs and f.start < 0:
        raise DomainError("genus series must be a power series")
    inv = f.ring.inverse(c0)
    return (f.scale(inv)).log()


def branch_product(Q: TruncSeries, f: TruncSeries, e: int, N: int, power=1) -> TruncSeries:
    """``prod_i (f(H_i)/f(0))^power`` modulo ``q^N``."""
    lf = normalized_log(f, max((N - 1) * e + 2, 2)).rename(Q.var)
    s = branch_sum(Q, lf, e, N)
    if power != 1:
        s = s * power
    return s.exp()


def power_sums(Q: TruncSeries, e: int, N: int, kmax: int) -> List[TruncSeries]:
    """``p_k = sum_i H_i^k`` for ``0 <= k <= kmax`` via the Lagrange formula."""
    out = []
    for k in range(kmax + 1):
        phi = TruncSeries(Q.ring, {k: 1}, order=INF, var=Q.var)
        out.append(branch_sum(Q, phi, e, N))
    return out


def g_lhs(Q: TruncSeries, e: int, N: int) -> TruncSeries:
    """The double-sum side of the G_e identity, exactly as a finite sum modulo ``q^N``."""
    _check_normalized(Q)
    need = (N - 1) * e + 1
    if Q.order != INF and Q.order < need:
        raise TruncationError(f"Q known below z^{Q.order}, need z^{need - 1}")
    pows = _PowerCache(Q, need + e)
    exponent = {}
    for n in range(1, N):
        for m in range(1, N - n):
            acc = Q.ring.zero
            Pn, Pm = pows[n], pows[m]
            for j in range(1, n * e + 1):
                a = Pm.coeff(m * e + j)
                if not a:
                    continue
                b = Pn.coeff(n * e - j)
                if b:
                    acc = acc + a * b * j
            if acc:
                exponent[n + m] = exponent.get(n + m, Q.ring.zero) + acc * mpq(1, n * m)
    ex = TruncSeries(Q.ring, {k: -v for k, v in exponent.items()}, order=N, var="q")
    return ex.exp()


def _per_branch_blocks(Q: TruncSeries, branches: List[PuiseuxBranch], g: Optional[TruncSeries],
                       s_prec: int) -> TruncSeries:
    """``prod_i [e - H_i Q'(H_i)/Q(H_i)] * prod_{j != i} (-H_i)/(H_i - H_j)``, optionally dressed
    with ``g(H_i - H_j) / g(-H_i)`` for each ordered pair/branch, as one s-series."""
    e = len(branches)
    field = branches[0].series.ring
    lift = (lambda s: TruncSeries(field, {k: field(c) for k, c in s.items()}, order=s.order, var="s"))
    Qs = lift(Q.rename("s").truncate(s_prec + 1))
    dlogQ = (Qs.derivative() * Qs.truncate(s_prec + 1).inverse()).truncate(s_prec)
    if g is not None:
        gs = lift(g.rename("s").truncate(s_prec + 1))
    total = TruncSeries(field, [field.one], order=s_prec, var="s")
    for br in branches:
        H = br.series.truncate(s_prec + 1)
        i = br.index
        Hs = H.shift(-1)  # H / s, a unit series
        block = (TruncSeries(field, [field(e)], order=INF, var="s") - H * dlogQ.compose(H)).truncate(s_prec)
        for other in branches:
            if other.index == i:
                continue
            D = (H - other.series.truncate(s_prec + 1)).shift(-1)  # (H_i - H_j)/s
            block = (block * (-Hs) * D.truncate(s_prec).inverse()).truncate(s_prec)
            if g is not None:
                diff = (H - other.series.truncate(s_prec + 1))
                block = (block * gs.compose(diff)).truncate(s_prec)
        if g is not None:
            block = (block * gs.compose(-H).inverse() ** e).truncate(s_prec)
        total = (total * block).truncate(s_prec)
    return total


def g_rhs(Q: TruncSeries, e: int, N: int) -> TruncSeries:
    """The product side of the G_e identity, evaluated on the Puiseux branches."""
    _check_normalized(Q)
    s_prec = (N - 1) * e + 1
    branches = puiseux_branches(Q, e, N, s_order=s_prec + 1)
    field = branches[0].series.ring
    lift = (lambda s: TruncSeries(field, {k: field(c) for k, c in s.items()}, order=s.order, var="s"))
    Qs = lift(Q.rename("s").truncate(s_prec + 1))
    total = _per_branch_blocks(Q, branches, None, s_prec)
    for br in branches:
        total = (total * Qs.compose(br.series.truncate(s_prec + 1))).truncate(s_prec)
    return symmetric_reduce(total, e).truncate(N)


def branch_discriminant_factor(Q: TruncSeries, g: TruncSeries, e: int, N: int) -> TruncSeries:
    """``prod (-H_i/g(-H_i))^e prod_{i!=j} g(H_i-H_j)/(H_i-H_j) prod (Q'/Q(H_i) - e/H_i)``
    for normalised ``g``, as a q-series (constant term 1)."""
    _check_normalized(Q)
    s_prec = (N - 1) * e + 1
    # the branches only feed a product formula here, so the fast unit solver is used
    branches = puiseux_branches(Q, e, N, s_order=s_prec + 1, unit="lagrange")
    total = _per_branch_blocks(Q, branches, g, s_prec)
    return symmetric_reduce(total, e).truncate(N)


def sigma2(m: int) -> int:
    return sum(d * d for d in range(1, m + 1) if m % d == 0)


def u_transform(f: TruncSeries, e: int, N: Optional[int] = None) -> TruncSeries:
    """``prod_{n>0} prod_{k=1..n} f((-1)^e zeta_n^k t)^n`` through the divisor-sum rule on log-coefficients."""
    if N is not None:
        f = f.truncate(N)
    if f.order == INF:
        raise DomainError("u_transform needs a truncation order")
    if f.coeff(0) != 1 or (f.coeffs and f.start < 0):
        raise DomainError("u_transform requires f(0) = 1")
    lg = f.log()
    out = {}
    for m, c in lg.items():
        sign = -1 if (e * m) % 2 else 1
        out[m] = c * (sign * sigma2(m))
    return TruncSeries(f.ring, out, order=f.order, var=f.var).exp()


def macmahon(N: int, ring=QQ, var: str = "q") -> TruncSeries:
    """``prod_{n>0} (1 - q^n)^(-n)`` modulo ``q^N`` by direct expansion of the product."""
    if N < 1:
        raise DomainError("order must be >= 1")
    acc = TruncSeries(ring, [ring.one], order=N, var=var)
    for n in range(1, N):
        # multiply by 1/(1 - q^n) n times, each a running-sum recurrence
        for _ in range(n):
            c = list(acc.coeff_list(0, N))
            for k in range(n, N):
                c[k] = c[k] + c[k - n]
            acc = TruncSeries(ring, c, order=N, var=var)
    return acc
