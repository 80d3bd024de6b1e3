"""Intersection data of the target surface or Calabi-Yau fourfold."""

from __future__ import annotations

from dataclasses import dataclass, replace
from random import Random
from typing import Optional, Sequence

from gmpy2 import mpq

from .errors import ConfigError
from .rings import is_scalar, to_mpq

SURFACE = "surface"
CY4 = "cy4"


def _dot(x: Sequence, y: Sequence, gram: Sequence[Sequence]):
    acc = 0
    for i, xi in enumerate(x):
        if not xi:
            continue
        for j, yj in enumerate(y):
            g = gram[i][j]
            if g and yj:
                acc = acc + xi * g * yj
    return acc


@dataclass(frozen=True)
class GeometrySpec:
    """Numerical data of a surface ``S`` or a CY fourfold ``X`` together with ranks of ``E`` and ``alpha``.

    Basis-level data (``gram`` and component vectors) is optional and only
    needed by the vertex-algebra route.  Vectors are components in the basis;
    ``gram[i][j]`` pairs basis elements (``v . w`` on a surface, the pairing of
    ``H^2`` against ``H^6`` on a fourfold).  The scalar fields hold pairings with
    the canonical vector (``c_1(S)`` resp. ``c_3(X)``) and may be formal ring
    elements.
    """

    kind: str = SURFACE
    e: int = 1
    a: int = 0
    gram: Optional[tuple] = None
    canonical: Optional[tuple] = None   # components of c_1(S) or c_3(X)
    c1E: Optional[tuple] = None
    c1alpha: Optional[tuple] = None
    c1L: Optional[tuple] = None
    c1sq: object = 0                    # c_1(S)^2 (surface only)
    c1E_dot: object = 0                 # c_1(E).c_1 or c_1(E).c_3
    c1alpha_dot: object = 0             # c_1(alpha).c_1 or c_1(alpha).c_3
    c1L_dot: object = 0                 # c_1(L).c_1 or c_1(L).c_3

    def __post_init__(self):
        if self.kind not in (SURFACE, CY4):
            raise ConfigError("kind", f"must be '{SURFACE}' or '{CY4}', got {self.kind!r}")
        if not isinstance(self.e, int) or self.e < 1:
            raise ConfigError("e", f"rank of E must be a positive integer, got {self.e!r}")
        if not isinstance(self.a, int):
            raise ConfigError("a", f"rank of alpha must be an integer, got {self.a!r}")

    @classmethod
    def from_basis(cls, kind: str, e: int, a: int, gram, canonical, c1E=None, c1alpha=None,
                   c1L=None) -> "GeometrySpec":
        """Build a geometry from basis data, deriving every scalar."""
        b = len(gram)
        if any(len(row) != b for row in gram):
            raise ConfigError("gram", "must be a square matrix")
        if kind == SURFACE and any(gram[i][j] != gram[j][i] for i in range(b) for j in range(b)):
            raise ConfigError("gram", "surface intersection form must be symmetric")
        zero = (0,) * b
        c1E = tuple(c1E) if c1E is not None else zero
        c1alpha = tuple(c1alpha) if c1alpha is not None else zero
        c1L = tuple(c1L) if c1L is not None else zero
        canonical = tuple(canonical)
        for name, vec in (("canonical", canonical), ("c1E", c1E), ("c1alpha", c1alpha), ("c1L", c1L)):
            if len(vec) != b:
                raise ConfigError(name, f"expected {b} components, got {len(vec)}")
        gram = tuple(tuple(r) for r in gram)
        if kind == SURFACE:
            dot = lambda x: _dot(x, canonical, gram)
            c1sq = _dot(canonical, canonical, gram)
        else:
            dot = lambda x: _dot(x, canonical, gram)
            c1sq = 0
        return cls(kind=kind, e=e, a=a, gram=gram, canonical=canonical, c1E=c1E, c1alpha=c1alpha,
                   c1L=c1L, c1sq=c1sq, c1E_dot=dot(c1E), c1alpha_dot=dot(c1alpha), c1L_dot=dot(c1L))

    @property
    def basis_dim(self) -> int:
        return len(self.gram) if self.gram is not None else 0

    @property
    def has_basis(self) -> bool:
        return self.gram is not None

    def pair(self, x: Sequence, y: Sequence):
        return _dot(x, y, self.gram)

    def pair_basis(self, vec: Sequence, idx: int):
        """``x . v_idx`` for a component vector ``x``."""
        return sum(vec[i] * self.gram[i][idx] for i in range(self.basis_dim) if vec[i])

    @property
    def mu(self):
        """Slope ``c_1(E).c / e``."""
        if is_scalar(self.c1E_dot):
            return to_mpq(self.c1E_dot) / self.e
        return self.c1E_dot * mpq(1, self.e)

    def check_consistent(self) -> None:
        if not self.has_basis:
            return
        derived = GeometrySpec.from_basis(self.kind, self.e, self.a, self.gram, self.canonical,
                                          self.c1E, self.c1alpha, self.c1L)
        for name in ("c1sq", "c1E_dot", "c1alpha_dot", "c1L_dot"):
            if getattr(derived, name) != getattr(self, name):
                raise ConfigError(name, f"inconsistent with basis data ({getattr(self, name)} vs {getattr(derived, name)})")

    def with_(self, **changes) -> "GeometrySpec":
        return replace(self, **changes)


def _det(m: Sequence[Sequence]) -> mpq:
    """Exact determinant by fraction-preserving elimination."""
    a = [[to_mpq(x) for x in row] for row in m]
    n = len(a)
    det = mpq(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            return mpq(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det


def random_geometry(rng: Random, kind: str = SURFACE, e: int = 1, a: int = 1, basis_dim: int = 2,
                    bound: int = 2, nondegenerate: bool = True) -> GeometrySpec:
    """Seeded random basis geometry with small integer entries.

    With ``nondegenerate`` the Gram matrix is resampled until it is invertible,
    which the wall-crossing recovery needs.
    """
    b = basis_dim
    while True:
        gram = [[0] * b for _ in range(b)]
        for i in range(b):
            for j in range(i, b):
                v = rng.randint(-bound, bound)
                gram[i][j] = v
                if kind == SURFACE:
                    gram[j][i] = v
                else:
                    gram[j][i] = rng.randint(-bound, bound) if i != j else v
        if not nondegenerate or _det(gram):
            break
    vec = lambda: tuple(rng.randint(-bound, bound) for _ in range(b))
    return GeometrySpec.from_basis(kind, e, a, gram, vec(), vec(), vec(), vec())


def random_scalar_geometry(rng: Random, kind: str = SURFACE, e: int = 1, a: int = 1, bound: int = 3,
                           c1sq: Optional[int] = None) -> GeometrySpec:
    """Seeded random geometry given by its intersection numbers only."""
    if c1sq is None:
        c1sq = rng.randint(-bound, bound) if kind == SURFACE else 0
    return GeometrySpec(kind=kind, e=e, a=a, c1sq=c1sq, c1E_dot=rng.randint(-bound, bound),
                        c1alpha_dot=rng.randint(-bound, bound))
