"""Built-in analytic metrics with known properties, used as the test corpus.

The property flags are claims, not trusted data: the test suite recomputes each
one through the curvature pipeline at the entry's safe points.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dsl import MetricField, parse_expr, to_str
from .errors import DimensionError, ValidationError

NAMES = (
    "flat",
    "round_sphere_stereographic",
    "hyperbolic_ball",
    "conformally_flat",
    "schwarzschild_tangherlini",
    "product_sphere_sphere",
)


@dataclass(frozen=True)
class Properties:
    flat: bool = False
    conformally_flat: bool = False
    einstein: float | None = None  # c with Ric = c g
    ricci_flat: bool = False
    weyl_nonzero: bool = False


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    field: MetricField
    properties: Properties
    safe_points: tuple = field(repr=False)

    @property
    def dim(self):
        return self.field.dim


def _coords(n):
    return [f"x{i + 1}" for i in range(n)]


def _diag(coords, factor, name, params=None):
    comps = {(i, i): factor for i in range(len(coords))}
    return MetricField.from_strings(coords, comps, params=params, name=name)


def _ball_points(n, count, radius, rng):
    pts = [np.zeros(n)]
    while len(pts) < count:
        p = rng.uniform(-1, 1, n)
        r = np.linalg.norm(p)
        if 0 < r:
            pts.append(p / r * radius * rng.uniform(0.1, 1.0))
    return tuple(pts)


def _tangherlini(n, r0):
    if n < 4:
        raise DimensionError("schwarzschild_tangherlini needs n >= 4")
    if r0 <= 0:
        raise ValidationError("schwarzschild_tangherlini needs r0 > 0")
    angles = [f"th{i + 1}" for i in range(n - 2)]
    coords = ["tau", "r"] + angles
    f = f"(1 - (r0/r)^{n - 3})"
    comps = {(0, 0): f, (1, 1): f"1/{f}"}
    sines = []
    for a, th in enumerate(angles):
        comps[(a + 2, a + 2)] = "*".join(["r^2"] + sines)
        sines.append(f"sin({th})^2")
    return MetricField.from_strings(
        coords, comps, params={"r0": float(r0)}, name=f"schwarzschild_tangherlini(n={n},r0={r0:g})"
    )


def _tangherlini_points(n, r0, count, rng):
    pts = []
    for _ in range(count):
        r = r0 * rng.uniform(1.4, 3.0)
        th = rng.uniform(0.6, np.pi - 0.6, n - 2)
        pts.append(np.concatenate([[rng.uniform(-1, 1), r], th]))
    return tuple(pts)


def builtin(name, n=None, params=None, *, points=5, seed=0) -> CatalogEntry:
    """Construct a catalog entry.

    ``name`` may be given with an inline argument, e.g.
    ``conformally_flat(x1*x2/3)`` or ``schwarzschild_tangherlini(1.5)``.
    """
    params = dict(params or {})
    if "(" in name and name.endswith(")"):
        name, arg = name[:-1].split("(", 1)
        key = {"conformally_flat": "upsilon", "schwarzschild_tangherlini": "r0"}.get(name)
        if key is None:
            raise ValidationError(f"catalog entry {name!r} takes no inline argument")
        params[key] = arg
    rng = np.random.default_rng(seed)

    if name == "flat":
        n = _need_dim(name, n, 1)
        fld = _diag(_coords(n), "1", f"flat(n={n})")
        props = Properties(flat=True, conformally_flat=True, einstein=0.0, ricci_flat=True)
        pts = tuple(rng.uniform(-1, 1, (points, n)))
    elif name == "round_sphere_stereographic":
        n = _need_dim(name, n, 2)
        cs = _coords(n)
        fld = _diag(cs, f"4/(1 + {' + '.join(c + '^2' for c in cs)})^2", f"round_sphere(n={n})")
        props = Properties(conformally_flat=True, einstein=float(n - 1))
        pts = _ball_points(n, points, 1.5, rng)
    elif name == "hyperbolic_ball":
        n = _need_dim(name, n, 2)
        cs = _coords(n)
        fld = _diag(cs, f"4/(1 - ({' + '.join(c + '^2' for c in cs)}))^2", f"hyperbolic_ball(n={n})")
        props = Properties(conformally_flat=True, einstein=-float(n - 1))
        pts = _ball_points(n, points, 0.6, rng)
    elif name == "conformally_flat":
        n = _need_dim(name, n, 1)
        ups = params.get("upsilon")
        if ups is None:
            raise ValidationError("conformally_flat needs an 'upsilon' expression")
        ups = parse_expr(ups) if isinstance(ups, str) else ups
        fld = _diag(_coords(n), f"exp(2*({to_str(ups)}))", f"conformally_flat({to_str(ups)})")
        props = Properties(conformally_flat=True)
        pts = tuple(rng.uniform(-0.8, 0.8, (points, n)))
    elif name == "schwarzschild_tangherlini":
        n = _need_dim(name, n, 4)
        r0 = float(params.get("r0", 1.0))
        fld = _tangherlini(n, r0)
        props = Properties(einstein=0.0, ricci_flat=True, weyl_nonzero=True)
        pts = _tangherlini_points(n, r0, points, rng)
    elif name == "product_sphere_sphere":
        if n not in (None, 4):
            raise DimensionError("product_sphere_sphere is four-dimensional")
        n = 4
        comps = {(0, 0): "4/(1 + x1^2 + x2^2)^2", (1, 1): "4/(1 + x1^2 + x2^2)^2",
                 (2, 2): "4/(1 + x3^2 + x4^2)^2", (3, 3): "4/(1 + x3^2 + x4^2)^2"}
        fld = MetricField.from_strings(_coords(4), comps, name="product_sphere_sphere")
        props = Properties(einstein=1.0, weyl_nonzero=True)
        pts = _ball_points(4, points, 1.2, rng)
    else:
        raise ValidationError(f"unknown catalog metric {name!r}; known: {', '.join(NAMES)}")
    return CatalogEntry(name, fld, props, tuple(np.asarray(p, dtype=float) for p in pts))


def _need_dim(name, n, lo):
    if n is None:
        raise DimensionError(f"{name} needs a dimension")
    n = int(n)
    if n < lo:
        raise DimensionError(f"{name} needs n >= {lo}, got {n}")
    return n


def unit_sphere_einstein_lambda(entry: CatalogEntry):
    """``lambda`` with ``Ric = lambda (n-1) g`` (unit sphere gives 1)."""
    c = entry.properties.einstein
    if c is None:
        return None
    return c / (entry.dim - 1)
