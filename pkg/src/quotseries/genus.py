"""Multiplicative genera as power series in ``z`` and their log-coefficients."""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import List, Optional

from gmpy2 import mpq

from .errors import DomainError
from .rings import QQ
from .series import INF, TruncSeries, exp_series


@dataclass(frozen=True)
class GenusSpec:
    """A genus ``f(z)`` with invertible constant term.

    ``series`` may be exact (a polynomial) or truncated; ``order`` bounds the
    precision requested from transcendental built-ins.
    """

    series: TruncSeries
    name: str = "custom"

    @property
    def ring(self):
        return self.series.ring

    def constant(self):
        return self.series.coeff(0)

    def normalized(self, order: int) -> TruncSeries:
        """``f / f(0)`` modulo ``z^order``."""
        s = self.series
        if s.coeffs and s.start < 0:
            raise DomainError("a genus must be a power series")
        s = s.truncate(order)
        if s.order < order:
            raise DomainError(f"genus {self.name} known only below z^{s.order}, need z^{order - 1}")
        return s.scale(self.ring.inverse(s.coeff(0)))

    def log_coeffs(self, kmax: int) -> List:
        """``[f_1, ..., f_kmax]`` with ``sum_k f_k z^k / k! = log(f/f(0))``; index 0 holds 0."""
        lg = self.normalized(kmax + 1).log()
        return [self.ring.zero] + [lg.coeff(k) * factorial(k) for k in range(1, kmax + 1)]

    def mirrored(self) -> "GenusSpec":
        """``z -> -z``."""
        s = self.series
        return GenusSpec(TruncSeries(s.ring, {k: (c if k % 2 == 0 else -c) for k, c in s.items()},
                                     order=s.order, var=s.var), name=f"{self.name}(-z)")

    def times(self, other: "GenusSpec", name: Optional[str] = None) -> "GenusSpec":
        return GenusSpec(self.series * other.series, name=name or f"{self.name}*{other.name}")

    def truncate(self, order: int) -> "GenusSpec":
        return GenusSpec(self.series.truncate(order), name=self.name)


def _z(values, order=INF, ring=QQ):
    return TruncSeries(ring, values, order=order, var="z")


def trivial_genus(ring=QQ) -> GenusSpec:
    return GenusSpec(_z([ring.one], ring=ring), "one")


def segre_genus(order: int, ring=QQ) -> GenusSpec:
    """``1/(1+z)``."""
    return GenusSpec(_z([(-1) ** k for k in range(order)], order, ring), "segre")


def chern_genus(ring=QQ, t=None) -> GenusSpec:
    """Total Chern class ``1 + t z`` (``t = 1`` by default)."""
    t = ring.one if t is None else t
    return GenusSpec(_z([ring.one, t], ring=ring), "chern")


def determinant_genus(order: int, ring=QQ) -> GenusSpec:
    """``e^z``."""
    return GenusSpec(exp_series(order, "z", ring), "det")


def todd_genus(order: int, ring=QQ) -> GenusSpec:
    """``z / (1 - e^(-z))``."""
    one_minus = (TruncSeries(ring, [ring.one], order=INF, var="z") - exp_series(order + 1, "z", ring, -1))
    return GenusSpec(one_minus.shift(-1).inverse().truncate(order), "todd")


def chi_y_genus(order: int, y, ring) -> GenusSpec:
    """``z (1 - y e^(-z)) / (1 - e^(-z))`` with ``y`` an element of ``ring``."""
    td = todd_genus(order, ring).series
    num = TruncSeries(ring, [ring.one], order=INF, var="z") - exp_series(order, "z", ring, -1).scale(y)
    return GenusSpec((td * num).truncate(order), "chi_y")


def wedge_genus(order: int, x, ring) -> GenusSpec:
    """``1 + x e^z``."""
    return GenusSpec((exp_series(order, "z", ring).scale(x) + ring.one).truncate(order), "wedge")


def nekrasov_f(order: int, w, ring) -> GenusSpec:
    """``w e^(-z/2) - w^(-1) e^(z/2)`` with ``w^2 = y``."""
    a = exp_series(order, "z", ring, mpq(-1, 2)).scale(w)
    b = exp_series(order, "z", ring, mpq(1, 2)).scale(ring.inverse(w))
    return GenusSpec(a - b, "nekrasov")


def nekrasov_gg(order: int, ring=QQ) -> GenusSpec:
    """``z / (e^(z/2) - e^(-z/2))``, the product ``g(z) g(-z)`` of the Nekrasov pair."""
    d = exp_series(order + 1, "z", ring, mpq(1, 2)) - exp_series(order + 1, "z", ring, mpq(-1, 2))
    return GenusSpec(d.shift(-1).inverse().truncate(order), "nekrasov_gg")


def lift_genus(g: GenusSpec, ring) -> GenusSpec:
    """Coerce the coefficients of a rational genus into another ring."""
    s = g.series
    return GenusSpec(TruncSeries(ring, {k: ring(c) for k, c in s.items()}, order=s.order, var=s.var), g.name)
