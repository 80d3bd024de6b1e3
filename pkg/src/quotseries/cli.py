"""Batch driver: read a TOML run configuration, compute series and checks, write JSON.

Every subcommand accepts ``--config``, ``--order``, ``--seed`` and ``--out``.
Command-line flags override the corresponding config keys.  Independent check
items may run in worker processes (``QUOTSERIES_WORKERS``); results are always
sorted by item key, so output is byte-identical for a fixed config and seed.
"""

from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from random import Random
from typing import Any, Callable, Dict, List, Optional, Sequence

import click
from gmpy2 import mpq

from .errors import ConfigError, QuotSeriesError
from .genus import (GenusSpec, chern_genus, determinant_genus, segre_genus, todd_genus, trivial_genus)
from .geometry import CY4, SURFACE, GeometrySpec, random_geometry, random_scalar_geometry
from .rings import QQ, Poly, SympyFractionField, to_mpq
from .series import TruncSeries

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

SCHEMA = 1
TASKS = ("series", "wallcross", "verify-identity", "symmetry", "nekrasov", "descendants")
WORKERS_ENV = "QUOTSERIES_WORKERS"
GEOMETRY_KEYS = ("kind", "e", "a", "c1sq", "c1E_dot", "c1alpha_dot", "c1L_dot", "gram", "canonical", "c1E",
                 "c1alpha", "c1L")


# ------------------------------------------------------------------ serialisation
def frac(x) -> str:
    """``"num/den"`` for any exact rational (``den`` is 1 for integers)."""
    x = to_mpq(x)
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(value) -> mpq:
    """Inverse of :func:`frac`; also accepts integers and ``"num"``."""
    if isinstance(value, bool):
        raise ValueError("booleans are not numbers")
    if isinstance(value, int):
        return mpq(value)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, den = text.split("/", 1)
            return mpq(int(num), int(den))
        return mpq(int(text))
    raise ValueError(f"cannot read {value!r} as an exact rational")


def coeff_json(c, ring=None) -> Any:
    """A coefficient as a fraction string, or as sparse terms ``[[exponents], "num/den"]``."""
    if isinstance(c, Poly):
        terms = [[list(m), frac(v)] for m, v in sorted(c.terms.items())]
        return {"gens": list(c.ring.gens), "terms": terms}
    if isinstance(ring, SympyFractionField):
        name = ring.gens[0]
        terms = [[[k], frac(v)] for k, v in sorted(ring.laurent_terms(c, name).items())]
        return {"gens": [name], "terms": terms}
    return frac(c)


def series_json(s: TruncSeries) -> Dict[str, Any]:
    return {"var": s.var, "order": s.order,
            "coeffs": [[n, coeff_json(s.coeff(n), s.ring)] for n in range(s.order)]}


def compare(lhs: TruncSeries, rhs: TruncSeries) -> Dict[str, Any]:
    """Verdict of an exact comparison; on failure the first differing coefficient is reported."""
    order = min(lhs.order, rhs.order)
    for n in range(order):
        a, b = lhs.coeff(n), rhs.coeff(n)
        if a != b:
            return {"verdict": "fail",
                    "first_difference": {"n": n, "lhs": coeff_json(a, lhs.ring), "rhs": coeff_json(b, rhs.ring)}}
    return {"verdict": "pass", "checked_order": order}


# ------------------------------------------------------------------ configuration
@dataclass
class RunConfig:
    task: str
    order: int
    seed: int = 0
    out: Optional[str] = None
    params: Dict[str, Any] = field(default_factory=dict)

    def get(self, key: str, default=None):
        return self.params.get(key, default)


def _int_list(cfg: RunConfig, key: str, default: Sequence[int], positive: bool = True) -> List[int]:
    value = cfg.get(key, list(default))
    values = value if isinstance(value, list) else [value]
    out = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(key, f"expected integers, got {v!r}")
        if positive and v < 1:
            raise ConfigError(key, f"must be a positive integer, got {v}")
        out.append(v)
    if not out:
        raise ConfigError(key, "must not be empty")
    return out


def _int(cfg: RunConfig, key: str, default: int, minimum: Optional[int] = None) -> int:
    v = cfg.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(key, f"expected an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigError(key, f"must be >= {minimum}, got {v}")
    return v


def _choice(cfg: RunConfig, key: str, default: str, allowed: Sequence[str]) -> str:
    v = cfg.get(key, default)
    if v not in allowed:
        raise ConfigError(key, f"must be one of {list(allowed)}, got {v!r}")
    return v


def _str_list(cfg: RunConfig, key: str, default: Sequence[str], allowed: Sequence[str]) -> List[str]:
    value = cfg.get(key, list(default))
    values = value if isinstance(value, list) else [value]
    for v in values:
        if v not in allowed:
            raise ConfigError(key, f"entries must be among {list(allowed)}, got {v!r}")
    return list(values)


def build_config(task: str, path: Optional[str], order: Optional[int], seed: Optional[int],
                 out: Optional[str]) -> RunConfig:
    params: Dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                params = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError("config", f"not valid TOML: {exc}") from exc
        except OSError as exc:
            raise ConfigError("config", str(exc)) from exc
    geometry = params.pop("geometry", None)
    if geometry is not None:
        if not isinstance(geometry, dict):
            raise ConfigError("geometry", "must be a table")
        for k, v in geometry.items():
            params.setdefault(k, v)
    declared = params.pop("task", task)
    if declared != task:
        raise ConfigError("task", f"config declares {declared!r} but the subcommand is {task!r}")
    if order is None:
        order = params.pop("order", 6)
    else:
        params.pop("order", None)
    if isinstance(order, bool) or not isinstance(order, int) or order < 1:
        raise ConfigError("order", f"must be an integer >= 1, got {order!r}")
    if seed is None:
        seed = params.pop("seed", 0)
    else:
        params.pop("seed", None)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError("seed", f"must be an integer, got {seed!r}")
    if out is None:
        out = params.pop("out", None)
    else:
        params.pop("out", None)
    _validate_geometry_keys(params)
    return RunConfig(task, order, seed, out, params)


def _validate_geometry_keys(params: Dict[str, Any]) -> None:
    """Reject malformed geometry keys up front, whichever task reads them."""
    if "kind" in params and params["kind"] not in (SURFACE, CY4):
        raise ConfigError("kind", f"must be '{SURFACE}' or '{CY4}', got {params['kind']!r}")
    if "e" in params:
        values = params["e"] if isinstance(params["e"], list) else [params["e"]]
        for v in values:
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ConfigError("e", f"rank of E must be a positive integer, got {v!r}")
    if "a" in params and (isinstance(params["a"], bool) or not isinstance(params["a"], int)):
        raise ConfigError("a", f"rank of alpha must be an integer, got {params['a']!r}")


def _rational(key: str, value) -> mpq:
    try:
        return parse_fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(key, str(exc)) from exc


def geometry_from(cfg: RunConfig, e: Optional[int] = None, a: Optional[int] = None,
                  kind: Optional[str] = None) -> GeometrySpec:
    """Geometry from the plain config keys; basis data wins when ``gram`` is present."""
    kind = kind or cfg.get("kind", SURFACE)
    if kind not in (SURFACE, CY4):
        raise ConfigError("kind", f"must be '{SURFACE}' or '{CY4}', got {kind!r}")
    e = cfg.get("e", 1) if e is None else e
    a = cfg.get("a", 0) if a is None else a
    if isinstance(e, bool) or not isinstance(e, int) or e < 1:
        raise ConfigError("e", f"rank of E must be a positive integer, got {e!r}")
    if isinstance(a, bool) or not isinstance(a, int):
        raise ConfigError("a", f"rank of alpha must be an integer, got {a!r}")
    if cfg.get("gram") is not None:
        gram = [[_rational("gram", x) for x in row] for row in cfg.get("gram")]
        vec = lambda k: None if cfg.get(k) is None else [_rational(k, x) for x in cfg.get(k)]
        if cfg.get("canonical") is None:
            raise ConfigError("canonical", "required together with gram")
        return GeometrySpec.from_basis(kind, e, a, gram, vec("canonical"), vec("c1E"), vec("c1alpha"), vec("c1L"))
    scal = {k: _rational(k, cfg.get(k, 0)) for k in ("c1sq", "c1E_dot", "c1alpha_dot", "c1L_dot")}
    if kind == CY4 and scal["c1sq"]:
        raise ConfigError("c1sq", "is a surface quantity; leave it 0 on a fourfold")
    return GeometrySpec(kind=kind, e=e, a=a, **scal)


GENUS_NAMES = ("one", "segre", "chern", "det", "todd")


def genus_from(key: str, value, order: int) -> GenusSpec:
    """A genus by name or by an explicit coefficient list ``[c0, c1, ...]`` in ``z``."""
    if isinstance(value, str):
        makers: Dict[str, Callable[[], GenusSpec]] = {
            "one": trivial_genus, "segre": lambda: segre_genus(order), "chern": chern_genus,
            "det": lambda: determinant_genus(order), "todd": lambda: todd_genus(order)}
        if value not in makers:
            raise ConfigError(key, f"unknown genus {value!r}; choose from {list(GENUS_NAMES)} or give coefficients")
        return makers[value]()
    if isinstance(value, list) and value:
        coeffs = [_rational(key, c) for c in value]
        if not coeffs[0]:
            raise ConfigError(key, "constant term must be nonzero")
        return GenusSpec(TruncSeries(QQ, coeffs, order=max(order, len(coeffs)), var="z"), "custom")
    raise ConfigError(key, f"expected a genus name or coefficient list, got {value!r}")


# ------------------------------------------------------------------ item runners
# Each runner takes plain, picklable parameters and returns a JSON-ready dict.
def _geom_params(g: GeometrySpec) -> Dict[str, Any]:
    out = {"kind": g.kind, "e": g.e, "a": g.a}
    for k in ("c1sq", "c1E_dot", "c1alpha_dot"):
        out[k] = frac(getattr(g, k))
    if g.has_basis:
        out["gram"] = [[frac(x) for x in row] for row in g.gram]
        for k in ("canonical", "c1E", "c1alpha", "c1L"):
            out[k] = [frac(x) for x in getattr(g, k)]
    return out


def _geom_from_params(p: Dict[str, Any]) -> GeometrySpec:
    if "gram" in p:
        vec = lambda k: [parse_fraction(x) for x in p[k]]
        return GeometrySpec.from_basis(p["kind"], p["e"], p["a"], [vec_row(r) for r in p["gram"]],
                                       vec("canonical"), vec("c1E"), vec("c1alpha"), vec("c1L"))
    return GeometrySpec(kind=p["kind"], e=p["e"], a=p["a"], c1sq=parse_fraction(p["c1sq"]),
                        c1E_dot=parse_fraction(p["c1E_dot"]), c1alpha_dot=parse_fraction(p["c1alpha_dot"]))


def vec_row(row):
    return [parse_fraction(x) for x in row]


def run_identity_item(p: Dict[str, Any]) -> Dict[str, Any]:
    from .lagrange import branch_sum, g_lhs, g_rhs, prod_H_over_q_log
    from .puiseux import branch_sum_direct, unit_product_log_direct

    e, N = p["e"], p["order"]
    Q = TruncSeries(QQ, [parse_fraction(c) for c in p["Q"]], var="z")
    if p["identity"] == "G":
        return compare(g_lhs(Q, e, N), g_rhs(Q, e, N))
    if p["identity"] == "log-product":
        return compare(prod_H_over_q_log(Q, e, N), unit_product_log_direct(Q, e, N))
    phi = TruncSeries(QQ, {int(k): parse_fraction(v) for k, v in p["phi"]}, var="z")
    return compare(branch_sum(Q, phi, e, N), branch_sum_direct(Q, phi, e, N))


def run_symmetry_item(p: Dict[str, Any]) -> Dict[str, Any]:
    from .invariants import (exchange_geometry, flip_q, segre, verlinde, z_series_cy4, z_series_surface,
                             zezc_ratio_check)
    from .lagrange import u_transform

    g = _geom_from_params(p["geometry"])
    N, check = p["order"], p["check"]
    if check == "segre-verlinde":
        return compare(flip_q(segre(g, N), g.e), verlinde(g, N))
    if check in ("exchange-segre", "exchange-verlinde"):
        g2 = exchange_geometry(g, g.a, g.c1alpha_dot)
        if check == "exchange-segre":
            return compare(flip_q(segre(g, N), g.e), flip_q(segre(g2, N), g2.e))
        return compare(verlinde(g, N), verlinde(g2, N))
    if check == "bridge":
        order = (N - 1) * g.e + 2
        f, gen = segre_genus(order), todd_genus(order)
        gg = gen.times(gen.mirrored(), name="gg")
        gs = GeometrySpec(kind=SURFACE, e=g.e, a=g.a, c1sq=0, c1E_dot=g.c1E_dot, c1alpha_dot=g.c1alpha_dot)
        gx = GeometrySpec(kind=CY4, e=g.e, a=g.a, c1E_dot=g.c1E_dot, c1alpha_dot=g.c1alpha_dot)
        return compare(z_series_cy4(f, gen, gx, N), u_transform(z_series_surface(f, gg, gs, N), g.e))
    if check == "ratio":
        lhs, rhs = zezc_ratio_check(g, N, route="vertex" if g.has_basis else "closed")
        return compare(lhs, rhs)
    raise ConfigError("checks", f"unknown check {check!r}")


def run_wallcross_item(p: Dict[str, Any]) -> Dict[str, Any]:
    from .invariants import z_series_cy4, z_series_surface
    from .wallcross import (Insertion, closed_form_points, closed_form_quot, integrate_genus, quot_classes,
                            recover_point_classes, stated_points)

    g = _geom_from_params(p["geometry"])
    N, check = p["order"], p["check"]
    if check in ("points", "points-stated"):
        rec = recover_point_classes(g, N)
        ref = closed_form_points(g, N) if check == "points" else stated_points(g, N)
        for n in range(1, N + 1):
            if tuple(rec.coeffs[n]) != tuple(ref.coeffs[n]):
                return {"verdict": "fail", "first_difference": {
                    "n": n, "lhs": [frac(x) for x in rec.coeffs[n]], "rhs": [frac(x) for x in ref.coeffs[n]]}}
        return {"verdict": "pass", "checked_order": N}
    points = recover_point_classes(g, N).with_ambiguity()
    classes = quot_classes(g, points, N)
    if check == "quot":
        diff = classes.differing_orders(closed_form_quot(g, N))
        if diff:
            return {"verdict": "fail", "first_difference": {"n": diff[0]}}
        return {"verdict": "pass", "checked_order": N}
    order = N * g.e + 2
    f = genus_from("f", p["f"], order)
    gen = genus_from("g", p["g"], order)
    if g.kind == SURFACE:
        lhs = integrate_genus(classes, g, [Insertion(f, g.a, g.c1alpha)], g=gen)
        rhs = z_series_surface(f, gen, g, N + 1)
    else:
        lhs = integrate_genus(classes, g, [Insertion(f, g.a, g.c1alpha)], g=gen)
        rhs = z_series_cy4(f, gen, g, N + 1)
    lhs = _drop_ambiguity(lhs)
    if lhs is None:
        return {"verdict": "fail", "reason": "ambiguity parameters survive integration"}
    return compare(lhs, rhs)


def _drop_ambiguity(s: TruncSeries) -> Optional[TruncSeries]:
    """Rational series when every coefficient is free of the ``lam`` generators, else ``None``."""
    if s.ring is QQ:
        return s
    out = {}
    for n in range(s.order):
        c = s.coeff(n)
        if isinstance(c, Poly):
            if any(any(m) for m in c.terms):
                return None
            c = c.ring.constant(c)
        out[n] = to_mpq(c)
    return TruncSeries(QQ, out, order=s.order, var=s.var)


def run_nekrasov_item(p: Dict[str, Any]) -> Dict[str, Any]:
    from .invariants import chern_series_cy4, cohomological_limit, flip_q, nekrasov
    from .lagrange import macmahon

    e, gamma, N = p["e"], p["gamma"], p["order"]
    g = GeometrySpec(kind=CY4, e=e, a=e, c1E_dot=0, c1alpha_dot=2 * gamma)
    res = nekrasov(g, N)
    out = {"closed_form": compare(res.general, res.closed_form)}
    limit = cohomological_limit(res.general, g.a, g.e, res.ring)
    chern = chern_series_cy4(g, N)
    out["cohomological_limit"] = compare(limit, flip_q(chern, e))
    out["chern_macmahon"] = compare(chern, macmahon(N).dilate((-1) ** e).pow_formal(2 * gamma))
    verdicts = [v["verdict"] for v in out.values()]
    out["verdict"] = "pass" if all(v == "pass" for v in verdicts) else "fail"
    out["series"] = series_json(res.general)
    return out


def run_descendants_item(p: Dict[str, Any]) -> Dict[str, Any]:
    from .invariants import chi_y_descendants, cohomological_descendants

    g = _geom_from_params(p["geometry"])
    alphas = [{"a": al["a"], "c1alpha_dot": parse_fraction(al["c1alpha_dot"])} for al in p["alphas"]]
    if p["descendant"] == "chi_y":
        rep = chi_y_descendants(p["k"], alphas, g, N=p.get("certificate_order"))
    else:
        rep = cohomological_descendants(p["k"], alphas, g, N=p["order"])
    out = {"verdict": rep.verdict, "series": series_json(rep.series)}
    if rep.certificate is not None:
        c = rep.certificate
        out["certificate"] = {"factors": [[lab, m] for lab, m in c.factors],
                              "numerator": series_json(TruncSeries(c.numerator.ring, dict(c.numerator.items()),
                                                                   order=c.numerator_bound + 1)),
                              "numerator_degree_bound": c.numerator_bound,
                              "vanishing_coefficients": c.checked_coefficients, "order": c.order}
    else:
        out["reason"] = rep.failure
    return out


RUNNERS = {"verify-identity": run_identity_item, "symmetry": run_symmetry_item,
           "wallcross": run_wallcross_item, "nekrasov": run_nekrasov_item, "descendants": run_descendants_item}


# ------------------------------------------------------------------ item planning
def _random_Q(rng: Random, degree: int, bound: int) -> List[str]:
    return ["1/1"] + [frac(rng.randint(-bound, bound)) for _ in range(degree)]


def plan_identity(cfg: RunConfig) -> List[tuple]:
    identity = _choice(cfg, "identity", "G", ("G", "branch-sum", "log-product"))
    ranks = _int_list(cfg, "e", [1, 2, 3])
    items = []
    if cfg.get("Q") is not None:
        Q = [frac(_rational("Q", c)) for c in cfg.get("Q")]
        if not Q or parse_fraction(Q[0]) != 1:
            raise ConfigError("Q", "must start with constant term 1")
        samples = [Q]
    else:
        rng = Random(cfg.seed)
        count = _int(cfg, "random", 20, 1)
        degree = _int(cfg, "degree", 4, 0)
        bound = _int(cfg, "bound", 3, 0)
        samples = [_random_Q(rng, degree, bound) for _ in range(count)]
    phi = cfg.get("phi", {"-1": 1, "0": 2, "1": -1, "3": 2}) if identity == "branch-sum" else None
    if phi is not None:
        if not isinstance(phi, dict):
            raise ConfigError("phi", "must be a table mapping exponents to coefficients")
        phi = sorted([[int(k), frac(_rational("phi", v))] for k, v in phi.items()])
    for e in ranks:
        for i, Q in enumerate(samples):
            params = {"identity": identity, "e": e, "order": cfg.order, "Q": Q}
            if phi is not None:
                params["phi"] = phi
            items.append((f"{identity}/e={e}/Q{i:03d}", params))
    return items


SYMMETRY_CHECKS = ("segre-verlinde", "exchange-segre", "exchange-verlinde", "bridge", "ratio")


def plan_symmetry(cfg: RunConfig) -> List[tuple]:
    checks = _str_list(cfg, "checks", SYMMETRY_CHECKS, SYMMETRY_CHECKS)
    kinds = _str_list(cfg, "kinds", [SURFACE, CY4], (SURFACE, CY4))
    ranks = _int_list(cfg, "e", [1, 2, 3])
    other = _int_list(cfg, "f", [1, 2, 3])
    count = _int(cfg, "random", 10, 1)
    rng = Random(cfg.seed)
    items = []
    for check in checks:
        for kind in kinds:
            if check in ("bridge", "ratio") and kind != SURFACE:
                continue
            for e in ranks:
                for f in (other if check.startswith("exchange") else [None]):
                    for i in range(count):
                        a = f if f is not None else rng.randint(-2, 3)
                        if check == "ratio":
                            g = random_geometry(rng, kind, e=e, a=a)
                        else:
                            c1sq = 0 if check == "bridge" else None
                            g = random_scalar_geometry(rng, kind, e, a, c1sq=c1sq)
                        key = f"{check}/{kind}/e={e}" + (f"/f={f}" if f is not None else "") + f"/{i:03d}"
                        items.append((key, {"check": check, "order": cfg.order, "geometry": _geom_params(g)}))
    return items


WALLCROSS_CHECKS = ("points", "points-stated", "quot", "integration")


def plan_wallcross(cfg: RunConfig) -> List[tuple]:
    checks = _str_list(cfg, "checks", ["points", "quot", "integration"], WALLCROSS_CHECKS)
    kinds = _str_list(cfg, "kinds", [SURFACE, CY4], (SURFACE, CY4))
    ranks = _int_list(cfg, "e", [1, 2])
    count = _int(cfg, "random", 2, 1)
    f = cfg.get("f", "chern")
    gname = cfg.get("g", "todd")
    genus_from("f", f, 4)
    genus_from("g", gname, 4)
    rng = Random(cfg.seed)
    items = []
    for kind in kinds:
        for e in ranks:
            for i in range(count):
                if cfg.get("gram") is not None:
                    g = geometry_from(cfg, e=e, kind=kind)
                else:
                    g = random_geometry(rng, kind, e=e, a=rng.randint(0, 2))
                for check in checks:
                    items.append((f"{check}/{kind}/e={e}/{i:03d}",
                                  {"check": check, "order": cfg.order, "geometry": _geom_params(g),
                                   "f": f, "g": gname}))
    return items


def plan_nekrasov(cfg: RunConfig) -> List[tuple]:
    ranks = _int_list(cfg, "e", [1, 2])
    gammas = _int_list(cfg, "gamma", [1, 2], positive=False)
    return [(f"nekrasov/e={e}/gamma={gm}", {"e": e, "gamma": gm, "order": cfg.order})
            for e in ranks for gm in gammas]


def plan_descendants(cfg: RunConfig) -> List[tuple]:
    kind = _choice(cfg, "descendant", "chi_y", ("chi_y", "cohomological"))
    ks = _int_list(cfg, "k", [1], positive=False)
    alphas = cfg.get("alphas", [{"a": 1, "c1alpha_dot": 1}] * len(ks))
    if not isinstance(alphas, list) or len(alphas) != len(ks):
        raise ConfigError("alphas", f"need one table per entry of k ({len(ks)})")
    norm = []
    for al in alphas:
        if not isinstance(al, dict):
            raise ConfigError("alphas", "entries must be tables with keys a and c1alpha_dot")
        a = al.get("a", 0)
        if isinstance(a, bool) or not isinstance(a, int):
            raise ConfigError("alphas", f"rank a must be an integer, got {a!r}")
        norm.append({"a": a, "c1alpha_dot": frac(_rational("alphas", al.get("c1alpha_dot", 0)))})
    g = geometry_from(cfg)
    if g.kind != SURFACE:
        raise ConfigError("kind", "descendants are defined on surfaces")
    params = {"descendant": kind, "k": ks, "alphas": norm, "geometry": _geom_params(g), "order": cfg.order}
    if kind == "chi_y":
        params["certificate_order"] = cfg.get("certificate_order")
    return [(f"{kind}/k={','.join(map(str, ks))}", params)]


PLANNERS = {"verify-identity": plan_identity, "symmetry": plan_symmetry, "wallcross": plan_wallcross,
            "nekrasov": plan_nekrasov, "descendants": plan_descendants}


# ------------------------------------------------------------------ series task
SERIES_NAMES = ("macmahon", "segre", "verlinde", "curve-verlinde", "z")


def run_series(cfg: RunConfig) -> Dict[str, Any]:
    from .invariants import curve_verlinde, segre, verlinde, z_series
    from .lagrange import macmahon

    name = _choice(cfg, "series", "macmahon", SERIES_NAMES)
    N = cfg.order
    if name == "macmahon":
        s = macmahon(N)
    else:
        g = geometry_from(cfg)
        if name == "segre":
            s = segre(g, N)
        elif name == "verlinde":
            s = verlinde(g, N)
        elif name == "curve-verlinde":
            s = curve_verlinde(g, N)
        else:
            order = (N - 1) * g.e + 2
            s = z_series(genus_from("f", cfg.get("f", "one"), order), genus_from("g", cfg.get("g", "one"), order),
                         g, N)
    return {"name": name, "series": series_json(s)}


# ------------------------------------------------------------------ driver
def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(WORKERS_ENV, f"must be an integer, got {raw!r}") from exc
    if n < 1:
        raise ConfigError(WORKERS_ENV, f"must be >= 1, got {n}")
    return n


def _run_one(task: str, params: Dict[str, Any]) -> Dict[str, Any]:
    try:
        return RUNNERS[task](params)
    except QuotSeriesError as exc:
        return {"verdict": "fail", "error": type(exc).__name__, "message": str(exc)}


def run(cfg: RunConfig, workers: int = 1) -> Dict[str, Any]:
    """Execute a configuration and return the structured result."""
    result: Dict[str, Any] = {"schema": SCHEMA, "task": cfg.task, "order": cfg.order, "seed": cfg.seed}
    if cfg.task == "series":
        result.update(run_series(cfg))
        result["verdicts"] = {}
        result["all_pass"] = True
        return result
    items = sorted(PLANNERS[cfg.task](cfg), key=lambda kv: kv[0])
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(_run_one, [cfg.task] * len(items), [p for _, p in items]))
    else:
        outputs = [_run_one(cfg.task, p) for _, p in items]
    result["items"] = [{"key": k, **out} for (k, _), out in zip(items, outputs)]
    counts: Dict[str, int] = {}
    for out in outputs:
        counts[out["verdict"]] = counts.get(out["verdict"], 0) + 1
    result["verdicts"] = dict(sorted(counts.items()))
    result["all_pass"] = all(out["verdict"] == "pass" for out in outputs)
    return result


def dump(result: Dict[str, Any]) -> str:
    return json.dumps(result, indent=2, sort_keys=True) + "\n"


def _execute(task: str, config: Optional[str], order: Optional[int], seed: Optional[int], out: Optional[str]):
    try:
        cfg = build_config(task, config, order, seed, out)
        result = run(cfg, worker_count())
    except ConfigError as exc:
        click.echo(json.dumps({"schema": SCHEMA, "error": "ConfigError", "field": exc.field,
                               "message": str(exc)}, sort_keys=True), err=True)
        sys.exit(2)
    except QuotSeriesError as exc:
        click.echo(json.dumps({"schema": SCHEMA, "error": type(exc).__name__, "message": str(exc)},
                              sort_keys=True), err=True)
        sys.exit(3)
    text = dump(result)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)
    sys.exit(0 if result["all_pass"] else 1)


def _common(fn):
    fn = click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write JSON here.")(fn)
    fn = click.option("--seed", type=int, default=None, help="Seed for random test data.")(fn)
    fn = click.option("--order", type=int, default=None, help="Truncation order N (series mod q^N).")(fn)
    fn = click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None,
                      help="TOML run configuration.")(fn)
    return fn


@click.group()
def main():
    """Exact generating series of Quot-scheme invariants and their identities."""


def _subcommand(task: str, help_text: str):
    @_common
    def command(config, order, seed, out):
        _execute(task, config, order, seed, out)

    command.__doc__ = help_text
    main.command(name=task)(command)


_subcommand("series", "Print the coefficients of a named series (macmahon, segre, verlinde, curve-verlinde, z).")
_subcommand("wallcross", "Recover point classes, build Quot classes by brackets, compare with closed forms.")
_subcommand("verify-identity", "Check the G_e identity or the Lagrange-inversion formulas against branches.")
_subcommand("symmetry", "Segre-Verlinde, exchange, bridge and ratio identities on random geometries.")
_subcommand("nekrasov", "Nekrasov genus against the MacMahon closed form and its cohomological limit.")
_subcommand("descendants", "Descendant series with a pole or rationality certificate.")


if __name__ == "__main__":  # pragma: no cover
    main()
