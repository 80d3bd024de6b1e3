"""Newton-Puiseux branches of ``H^e = q Q(H)``.

With ``s = q^(1/e)`` the branches are ``H_i(s) = zeta^i s u(zeta^i s)`` where
``u`` solves ``u^e = Q(s u)``.  The principal ``u`` has coefficients in the
base ring; the conjugates only multiply the ``s^k`` coefficient by
``zeta^(i k)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

from .cyclo import CycloField
from .errors import DomainError, InternalError, SymmetryViolation
from .series import INF, TruncSeries


@dataclass(frozen=True)
class PuiseuxBranch:
    index: int
    series: TruncSeries  # in s over CycloField(e, base)
    ramification: int


def _require_normalized(Q: TruncSeries):
    if Q.order != INF and Q.order < 1:
        raise DomainError("Q is not known to constant order")
    if Q.coeff(0) != 1 or (Q.coeffs and Q.start < 0):
        raise DomainError("Q must be a power series with Q(0) = 1; rescale q to normalise")


def principal_unit(Q: TruncSeries, e: int, s_order: int) -> TruncSeries:
    """The unit ``u(s)`` with ``u^e = Q(s u)`` and ``u(0) = 1``, known modulo ``s^s_order``.

    Fixed-point iteration ``u <- exp(log Q(s u) / e)``; each pass fixes one more
    coefficient.  The final pass is repeated once and must reproduce itself.
    """
    _require_normalized(Q)
    ring = Q.ring
    z = Q.var
    logQ = Q.truncate(s_order).log() if Q.order == INF or Q.order >= s_order else Q.log()
    inv_e = 1 if e == 1 else None
    u = TruncSeries(ring, [ring.one], order=1, var="s")
    prev = None
    for k in range(1, s_order + 2):
        prec = min(k, s_order)
        su = u.truncate(prec).shift(1)
        su = TruncSeries(ring, dict(su.items()), order=prec + 1, var="s")
        arg = logQ.truncate(prec).rename("s").compose(su) if z != "s" else logQ.truncate(prec).compose(su)
        arg = arg.truncate(prec)
        nxt = (arg if inv_e == 1 else arg * _inv(e)).exp()
        prev, u = u, nxt
    if prev.truncate(s_order) != u.truncate(s_order) or u.order < s_order:
        raise InternalError("fixed-point iteration for the Puiseux unit did not stabilise")
    return u.truncate(s_order)


def lagrange_unit(Q: TruncSeries, e: int, s_order: int) -> TruncSeries:
    """Same unit as :func:`principal_unit`, from Lagrange inversion.

    ``H = s u`` solves ``H = s phi(H)`` with ``phi = Q^(1/e)``, so
    ``[s^(n-1)] u = [z^(n-1)] phi^n / n``.  Much faster on large coefficient
    rings; it is not independent of the Lagrange-inversion formulas, so oracle
    checks keep the fixed-point route.
    """
    _require_normalized(Q)
    ring = Q.ring
    Qt = Q.truncate(s_order) if Q.order == INF or Q.order >= s_order else Q
    if Qt.order < s_order:
        raise InternalError("Q is not known to the requested order")
    logQ = Qt.log()
    phi = (logQ if e == 1 else logQ * _inv(e)).exp().truncate(s_order)
    power = TruncSeries(ring, [ring.one], order=s_order, var=phi.var)
    coeffs = {}
    for n in range(1, s_order + 1):
        power = (power * phi).truncate(s_order)
        c = power.coeff(n - 1)
        if c:
            coeffs[n - 1] = c * _inv(n)
    return TruncSeries(ring, coeffs, order=s_order, var="s")


def _inv(e: int):
    from gmpy2 import mpq

    return mpq(1, e)


def puiseux_branches(Q: TruncSeries, e: int, N: int, s_order: Optional[int] = None,
                     verify: bool = True, unit: str = "fixed-point") -> List[PuiseuxBranch]:
    """All ``e`` branches, as series in ``s`` over ``CycloField(e, Q.ring)``.

    ``N`` is the target q-order; branches are known modulo ``s^(e*N + 1)``
    unless ``s_order`` overrides it.
    """
    if e < 1:
        raise DomainError("ramification e must be >= 1")
    if N < 1:
        raise DomainError("order must be >= 1")
    _require_normalized(Q)
    if s_order is None:
        s_order = e * N + 1
    if unit == "fixed-point":
        u = principal_unit(Q, e, s_order - 1)
    elif unit == "lagrange":
        u = lagrange_unit(Q, e, s_order - 1)
    else:
        raise ValueError(f"unknown unit solver {unit!r}")
    field = CycloField(e, Q.ring)
    out = []
    for i in range(e):
        coeffs = {}
        for k, c in u.items():
            coeffs[k + 1] = field.zeta(i * (k + 1)) * field(c) if not field.trivial else field.zeta(i * (k + 1)) * c
        H = TruncSeries(field, coeffs, order=s_order, var="s")
        out.append(PuiseuxBranch(i, H, e))
    if verify:
        for br in out:
            check_branch(Q, br)
    return out


def check_branch(Q: TruncSeries, br: PuiseuxBranch) -> None:
    """Back-substitute into ``H^e - s^e Q(H)``; raises InternalError on a nonzero residual."""
    H = br.series
    field = H.ring
    e = br.ramification
    Qf = TruncSeries(field, {k: field(c) for k, c in Q.items()}, order=Q.order, var="s")
    lhs = H ** e
    rhs = Qf.compose(H).shift(e)
    diff = lhs - rhs
    if any(True for _ in diff.items()):
        raise InternalError(f"branch {br.index} fails back-substitution")


def symmetric_reduce(expr: TruncSeries, e: int, var: str = "q") -> TruncSeries:
    """Map a symmetric s-series over Q(zeta_e) to a q-series over the base ring."""
    field = expr.ring
    base = field.base if isinstance(field, CycloField) else field
    out = {}
    for k, c in expr.items():
        if isinstance(field, CycloField) and not field.trivial:
            if not c.is_rational():
                raise SymmetryViolation(f"coefficient of s^{k} is not rational: {c}")
            c = c.comps[0]
        if k % e:
            raise SymmetryViolation(f"fractional power q^({k}/{e}) with nonzero coefficient")
        out[k // e] = c
    order = INF if expr.order == INF else -(-expr.order // e)
    return TruncSeries(base, out, order=order, var=var)


def _lift_to_field(f: TruncSeries, field, var: str = "s") -> TruncSeries:
    if not isinstance(field, CycloField) or field.trivial:
        return f.rename(var)
    return TruncSeries(field, {k: field(c) for k, c in f.items()}, order=f.order, var=var)


def branch_sum_direct(Q: TruncSeries, phi: TruncSeries, e: int, N: int) -> TruncSeries:
    """``sum_i phi(H_i)`` modulo ``q^N`` by substituting each branch and reducing.

    Independent of the Lagrange-inversion formulas; ``phi`` may have a pole
    at the origin.
    """
    lo = phi.start if phi.coeffs else 0
    s_order = (N - 1) * e + 1 + max(0, -lo) * 2
    branches = puiseux_branches(Q, e, N, s_order=s_order + 1)
    field = branches[0].series.ring
    phis = _lift_to_field(phi.truncate(s_order) if phi.order == INF or phi.order > s_order else phi, field)
    total = TruncSeries(field, {}, order=INF, var="s")
    for br in branches:
        total = total + phis.compose(br.series.truncate(s_order + 1))
    return symmetric_reduce(total.truncate((N - 1) * e + 1), e).truncate(N)


def unit_product_log_direct(Q: TruncSeries, e: int, N: int) -> TruncSeries:
    """``log prod_i H_i / (zeta^i q^(1/e))`` modulo ``q^N`` from the branches."""
    s_order = (N - 1) * e + 1
    branches = puiseux_branches(Q, e, N, s_order=s_order + 1)
    field = branches[0].series.ring
    total = TruncSeries(field, [field.one], order=INF, var="s")
    for br in branches:
        zeta_inv = field.zeta((e - br.index) % e) if isinstance(field, CycloField) else 1
        unit = br.series.shift(-1)
        if zeta_inv != 1:
            unit = unit.scale(zeta_inv)
        total = (total * unit).truncate(s_order)
    return symmetric_reduce(total, e).truncate(N).log()
